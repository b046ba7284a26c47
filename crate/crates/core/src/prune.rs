//! Boundary pruning: collapse free faces, top dimension first, down to a
//! core that has none.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::complex::{CellId, SimplicialComplex, Vertex};
use crate::gadget::Prescriptions;
use crate::morse::{extract_dgvf, Dgvf};
use crate::pipeline::{morse_matching, MorseConfig, PipelineError};

/// Live cofaces of a cell in a partially collapsed complex.
fn live_cofaces(k: &SimplicialComplex, alive: &[bool], c: CellId) -> usize {
    k.cofaces(c).iter().filter(|&&t| alive[t]).count()
}

/// First face (canonical order) of `c` whose only live coface is `c`.
fn free_face(k: &SimplicialComplex, alive: &[bool], c: CellId) -> Option<CellId> {
    k.faces(c)
        .iter()
        .copied()
        .find(|&f| alive[f] && live_cofaces(k, alive, f) == 1)
}

/// The `d`-simplices having a face whose only coface they are.
pub fn find_boundary(k: &SimplicialComplex, d: usize) -> Vec<CellId> {
    let alive = vec![true; k.len()];
    k.cells_of_dim(d).filter(|&c| d > 0 && free_face(k, &alive, c).is_some()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneStep {
    pub dim: usize,
    /// The free face.
    pub rho: CellId,
    /// Its unique coface.
    pub eta: CellId,
}

#[derive(Debug, Clone)]
pub struct PruneResult {
    pub core: SimplicialComplex,
    /// Cell id in the input for each core cell.
    pub core_cells: Vec<CellId>,
    pub steps: Vec<PruneStep>,
    /// The collapse pairs as a gradient field on the input.
    pub seed: Dgvf,
}

impl PruneResult {
    /// Collapses per dimension of `eta`, index `d` for dimension `d`.
    pub fn counts(&self) -> Vec<usize> {
        let top = self.steps.iter().map(|s| s.dim).max().unwrap_or(0);
        let mut c = vec![0; top + 1];
        for s in &self.steps {
            c[s.dim] += 1;
        }
        c
    }

    /// One `d rho_id eta_id` line per collapse.
    pub fn trace(&self) -> String {
        let mut s = String::new();
        for st in &self.steps {
            let _ = writeln!(s, "{} {} {}", st.dim, st.rho, st.eta);
        }
        s
    }
}

/// Collapses free faces from the top dimension down, each dimension with a
/// FIFO queue seeded by `find_boundary`. After a collapse the other
/// cofaces of the removed cell's faces are queued again.
pub fn prune_boundary(k: &SimplicialComplex) -> PruneResult {
    let mut alive = vec![true; k.len()];
    let mut steps = Vec::new();
    let top = if k.is_empty() { 0 } else { k.max_dim() };
    for d in (1..=top).rev() {
        let mut queue: VecDeque<CellId> = k.cells_of_dim(d).filter(|&c| free_face(k, &alive, c).is_some()).collect();
        while let Some(eta) = queue.pop_front() {
            if !alive[eta] || live_cofaces(k, &alive, eta) > 0 {
                continue;
            }
            let Some(rho) = free_face(k, &alive, eta) else { continue };
            alive[rho] = false;
            alive[eta] = false;
            steps.push(PruneStep { dim: d, rho, eta });
            for &f in k.faces(eta) {
                for &t in k.cofaces(f) {
                    if alive[t] {
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    let keep: Vec<CellId> = (0..k.len()).filter(|&c| alive[c]).collect();
    let (core, core_cells) = k.subcomplex(&keep);
    let pairs: Vec<(CellId, CellId)> = steps.iter().map(|s| (s.rho, s.eta)).collect();
    let seed = extract_dgvf(k, &pairs).expect("collapses form an acyclic matching");
    PruneResult {
        core,
        core_cells,
        steps,
        seed,
    }
}

/// Pairs `(v1, v2)` where every maximal simplex containing `v2` also
/// contains `v1`. Empty on a pruned core.
pub fn check_core(k: &SimplicialComplex) -> Vec<(Vertex, Vertex)> {
    let maximal = k.maximal_cells();
    let verts: Vec<Vertex> = k.cells_of_dim(0).map(|c| k.vertices(c)[0]).collect();
    let mut out = Vec::new();
    for &v2 in &verts {
        let around: Vec<&[Vertex]> = maximal
            .iter()
            .map(|&m| k.vertices(m))
            .filter(|s| s.contains(&v2))
            .collect();
        for &v1 in &verts {
            if v1 != v2 && around.iter().all(|s| s.contains(&v1)) {
                out.push((v1, v2));
            }
        }
    }
    out
}

/// Prunes, solves the matching problem on the core only, and merges the
/// core field with the collapse pairs.
pub fn morse_with_pruning(k: &SimplicialComplex, cfg: &MorseConfig) -> Result<(Dgvf, PruneResult), PipelineError> {
    let pr = prune_boundary(k);
    let mut pairs: Vec<(CellId, CellId)> = pr.seed.pairs().to_vec();
    if !pr.core.is_empty() {
        let run = morse_matching(&pr.core, cfg, &Prescriptions::default())?;
        pairs.extend(run.dgvf.pairs().iter().map(|&(a, b)| (pr.core_cells[a], pr.core_cells[b])));
    }
    let v = extract_dgvf(k, &pairs)?;
    Ok((v, pr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;

    #[test]
    fn boundary_lists() {
        let k = parse_complex("0 1 2").unwrap();
        assert_eq!(find_boundary(&k, 2), vec![k.id_of(&[0, 1, 2]).unwrap()]);
        let c = parse_complex("0 1\n1 2\n0 2").unwrap();
        assert!(find_boundary(&c, 1).is_empty());
        let s = parse_complex("0 1 2\n1 2 3").unwrap();
        assert_eq!(find_boundary(&s, 2).len(), 2);
    }

    #[test]
    fn solid_triangle_to_point() {
        let k = parse_complex("0 1 2").unwrap();
        let r = prune_boundary(&k);
        assert_eq!(r.steps.len(), 3);
        assert_eq!(r.core.len(), 1);
        assert_eq!(r.counts(), vec![0, 2, 1]);
        assert_eq!(r.trace().lines().count(), 3);
        assert!(r.trace().starts_with("2 "));
    }

    #[test]
    fn fixed_point_and_cone() {
        let c = parse_complex("0 1\n1 2\n0 2").unwrap();
        let r = prune_boundary(&c);
        assert!(r.steps.is_empty());
        assert_eq!(r.core.len(), c.len());
        assert!(check_core(&r.core).is_empty());

        let cone = parse_complex("0 1 4\n1 2 4\n2 3 4\n0 3 4").unwrap();
        let r = prune_boundary(&cone);
        assert_eq!(r.core.len(), 1);
    }

    #[test]
    fn dominated_vertices() {
        let e = parse_complex("0 1").unwrap();
        assert_eq!(check_core(&e), vec![(1, 0), (0, 1)]);
    }

    #[test]
    fn pruned_matching_is_optimal_on_triangle() {
        let k = parse_complex("0 1 2\n2 3").unwrap();
        let (v, _) = morse_with_pruning(&k, &MorseConfig::default()).unwrap();
        assert_eq!(v.critical_total(), 1);
    }
}
