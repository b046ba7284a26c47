//! End-to-end drivers: complex -> gadget -> min-POP -> gradient field, and
//! the Morse-complex homology computation built on it.

use thiserror::Error;

use crate::complex::{CellId, SimplicialComplex};
use crate::gadget::{recover_matching, reduce_mmup_to_pop, GadgetError, GadgetMode, Prescriptions};
use crate::hasse::HasseGraph;
use crate::homology::{homology_from_chain, Coefficient, HomologyError, HomologyGroups};
use crate::matrix::SparseMatrix;
use crate::morse::{cancel_pair, compute_morse_boundary, extract_dgvf, path_count, topo_sort_dmf, Dgvf, MorseError};
use crate::pop::{solve_min_pop, PopConfig, PopError, RecursionTrace};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Pop(#[from] PopError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseConfig {
    pub pop: PopConfig,
    pub gadget: GadgetMode,
    /// Cancel critical pairs joined by a single gradient path before
    /// computing homology.
    pub cancel: bool,
}

impl Default for MorseConfig {
    fn default() -> Self {
        MorseConfig {
            pop: PopConfig::default(),
            gadget: GadgetMode::PseudoFft,
            cancel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MorseRun {
    pub dgvf: Dgvf,
    pub trace: RecursionTrace,
    pub gadget_nodes: usize,
    pub gadget_rigid: usize,
}

/// Solves the (prescribed) Morse matching problem for `k` through the
/// min-POP reduction and validates the resulting field.
pub fn morse_matching(k: &SimplicialComplex, cfg: &MorseConfig, pre: &Prescriptions) -> Result<MorseRun, PipelineError> {
    let inst = reduce_mmup_to_pop(k, cfg.gadget, pre)?;
    let (sol, trace) = solve_min_pop(&inst, &cfg.pop)?;
    let (matched, _) = recover_matching(&inst, &sol)?;
    let h = HasseGraph::build(k);
    let pairs: Vec<(CellId, CellId)> = matched
        .iter()
        .map(|&e| {
            let he = h.edge(e);
            (he.face, he.coface)
        })
        .collect();
    let dgvf = extract_dgvf(k, &pairs)?;
    Ok(MorseRun {
        dgvf,
        trace,
        gadget_nodes: inst.node_count(),
        gadget_rigid: inst.rigid_edges().count(),
    })
}

/// Repeatedly cancels a critical pair `(tau, sigma)` whose Morse boundary
/// coefficient is a unit reached by exactly one gradient path. Lowest
/// dimension and cell ids first.
pub fn cancel_all(k: &SimplicialComplex, mut v: Dgvf) -> Dgvf {
    'again: loop {
        let crit = v.critical().to_vec();
        for q in 1..crit.len() {
            for &sigma in &crit[q] {
                for &tau in &crit[q - 1] {
                    let (s, n) = path_count(k, &v, sigma, tau);
                    if s.abs() == 1 && n == 1 {
                        if let Ok(w) = cancel_pair(k, &v, tau, sigma) {
                            v = w;
                            continue 'again;
                        }
                    }
                }
            }
        }
        return v;
    }
}

/// The Morse complex of a field as `(counts, boundaries)` in the layout
/// `homology_from_chain` expects.
pub fn morse_chain(k: &SimplicialComplex, v: &Dgvf) -> (Vec<usize>, Vec<SparseMatrix>) {
    let b = compute_morse_boundary(k, v, &topo_sort_dmf(k, v));
    let counts = v.critical_counts();
    (counts, b.matrices().to_vec())
}

/// Homology computed on the Morse complex of a solver-produced field.
pub fn homology_via_mmup(
    k: &SimplicialComplex,
    cfg: &MorseConfig,
    coeff: Coefficient,
) -> Result<(HomologyGroups, Dgvf), PipelineError> {
    if k.is_empty() {
        return Ok((
            HomologyGroups {
                coefficient: coeff,
                groups: Vec::new(),
            },
            extract_dgvf(k, &[])?,
        ));
    }
    let run = morse_matching(k, cfg, &Prescriptions::default())?;
    let v = if cfg.cancel { cancel_all(k, run.dgvf) } else { run.dgvf };
    let (counts, bd) = morse_chain(k, &v);
    Ok((homology_from_chain(&counts, &bd, coeff)?, v))
}
