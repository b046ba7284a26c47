//! Gradient fields compatible with a scalar field on the vertices: every
//! simplex inherits the value of its maximal vertex, and a face may only be
//! matched with a coface that inherits from the same vertex.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::complex::{CellId, SimplicialComplex, Vertex};
use crate::gadget::{Orientation, Prescriptions};
use crate::hasse::HasseGraph;
use crate::morse::Dgvf;
use crate::pipeline::{morse_matching, MorseConfig, MorseRun, PipelineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} has no value")]
    Missing(Vertex),
    #[error("vertices {0} and {1} share the value {2}")]
    Tie(Vertex, Vertex, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    #[default]
    Reject,
    /// Break ties by vertex id (larger id counts as larger).
    Perturb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: BTreeMap<Vertex, f64>,
}

impl ScalarField {
    pub fn new(values: BTreeMap<Vertex, f64>) -> Self {
        ScalarField { values }
    }

    pub fn value(&self, v: Vertex) -> Option<f64> {
        self.values.get(&v).copied()
    }

    /// Total order on vertices: by value, ties by id.
    fn cmp(&self, a: Vertex, b: Vertex) -> Ordering {
        self.values[&a].total_cmp(&self.values[&b]).then(a.cmp(&b))
    }

    /// Checks every vertex of `k` has a value and, under `Reject`, that
    /// values are pairwise distinct.
    pub fn check(&self, k: &SimplicialComplex, policy: TiePolicy) -> Result<(), ScalarError> {
        let verts: Vec<Vertex> = k.cells_of_dim(0).map(|c| k.vertices(c)[0]).collect();
        for &v in &verts {
            if !self.values.contains_key(&v) {
                return Err(ScalarError::Missing(v));
            }
        }
        if policy == TiePolicy::Reject {
            let mut sorted: Vec<(f64, Vertex)> = verts.iter().map(|&v| (self.values[&v], v)).collect();
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(ScalarError::Tie(w[0].1, w[1].1, w[0].0));
            }
        }
        Ok(())
    }
}

/// Lines `vertex_id value`.
pub fn parse_scalar_field(text: &str) -> Result<ScalarField, ScalarError> {
    let mut values = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ScalarError::Parse { line: i + 1, msg };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [v, x] = parts[..] else {
            return Err(err(format!("expected `vertex value`, got `{line}`")));
        };
        let v: Vertex = v.parse().map_err(|_| err(format!("bad vertex `{v}`")))?;
        let x: f64 = x.parse().map_err(|_| err(format!("bad value `{x}`")))?;
        if !x.is_finite() {
            return Err(err("value must be finite".into()));
        }
        if values.insert(v, x).is_some() {
            return Err(err(format!("vertex {v} given twice")));
        }
    }
    Ok(ScalarField { values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityConstraints {
    /// Maximal vertex of each cell.
    pub inherit: Vec<Vertex>,
    /// The face a cell may not be matched with: the one without its
    /// maximal vertex. `None` for vertices.
    pub prohibited: Vec<Option<CellId>>,
}

impl CompatibilityConstraints {
    pub fn allows(&self, face: CellId, coface: CellId) -> bool {
        self.prohibited[coface] != Some(face)
    }

    /// Inherited value of a cell.
    pub fn value(&self, f: &ScalarField, c: CellId) -> f64 {
        f.values[&self.inherit[c]]
    }
}

pub fn build_constraints(
    k: &SimplicialComplex,
    f: &ScalarField,
    policy: TiePolicy,
) -> Result<CompatibilityConstraints, ScalarError> {
    f.check(k, policy)?;
    let mut inherit = Vec::with_capacity(k.len());
    let mut prohibited = Vec::with_capacity(k.len());
    for c in 0..k.len() {
        let top = *k.vertices(c).iter().max_by(|&&a, &&b| f.cmp(a, b)).unwrap();
        inherit.push(top);
        prohibited.push(k.faces(c).iter().copied().find(|&fc| !k.vertices(fc).contains(&top)));
    }
    Ok(CompatibilityConstraints { inherit, prohibited })
}

/// Prescriptions forbidding every prohibited face-coface matching.
pub fn constraint_prescriptions(k: &SimplicialComplex, cons: &CompatibilityConstraints) -> Prescriptions {
    let h = HasseGraph::build(k);
    let forbidden = h
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !cons.allows(e.face, e.coface))
        .map(|(id, _)| (id, Orientation::Up))
        .collect();
    Prescriptions {
        rigid: Vec::new(),
        forbidden,
    }
}

#[derive(Debug, Clone)]
pub struct CompatibleRun {
    pub constraints: CompatibilityConstraints,
    pub run: MorseRun,
}

/// Solves the matching problem with the compatibility constraints as
/// forbidden orientations.
pub fn solve_compatible(
    k: &SimplicialComplex,
    f: &ScalarField,
    policy: TiePolicy,
    cfg: &MorseConfig,
) -> Result<CompatibleRun, ScalarSolveError> {
    let constraints = build_constraints(k, f, policy)?;
    let pre = constraint_prescriptions(k, &constraints);
    let run = morse_matching(k, cfg, &pre)?;
    Ok(CompatibleRun { constraints, run })
}

#[derive(Debug, Error)]
pub enum ScalarSolveError {
    #[error(transparent)]
    Field(#[from] ScalarError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Gradient pairs whose two cells inherit from different vertices.
pub fn validate_compatibility(k: &SimplicialComplex, f: &ScalarField, v: &Dgvf) -> Vec<String> {
    let top = |c: CellId| *k.vertices(c).iter().max_by(|&&a, &&b| f.cmp(a, b)).unwrap();
    v.pairs()
        .iter()
        .filter(|&&(a, b)| top(a) != top(b))
        .map(|&(a, b)| {
            format!(
                "pair {:?} < {:?} crosses from vertex {} to {}",
                k.vertices(a),
                k.vertices(b),
                top(a),
                top(b)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;
    use crate::morse::extract_dgvf;

    fn fig_field() -> ScalarField {
        parse_scalar_field("0 5\n1 8\n2 12\n3 3").unwrap()
    }

    #[test]
    fn inherited_values_of_tetrahedron() {
        let k = parse_complex("0 1 2 3").unwrap();
        assert_eq!(k.len(), 15);
        let f = fig_field();
        let c = build_constraints(&k, &f, TiePolicy::Reject).unwrap();
        let val = |vs: &[u32]| c.value(&f, k.id_of(vs).unwrap());
        assert_eq!(val(&[0, 1]), 8.0);
        assert_eq!(val(&[1, 2]), 12.0);
        assert_eq!(val(&[0, 1, 2]), 12.0);
        assert_eq!(val(&[0, 3]), 5.0);
        let e03 = k.id_of(&[0, 3]).unwrap();
        assert_eq!(c.prohibited[e03], k.id_of(&[3]));
        let t123 = k.id_of(&[1, 2, 3]).unwrap();
        assert_eq!(c.prohibited[t123], k.id_of(&[1, 3]));
    }

    #[test]
    fn ties() {
        let k = parse_complex("0 1").unwrap();
        let f = parse_scalar_field("0 1\n1 1").unwrap();
        assert_eq!(build_constraints(&k, &f, TiePolicy::Reject), Err(ScalarError::Tie(0, 1, 1.0)));
        let c = build_constraints(&k, &f, TiePolicy::Perturb).unwrap();
        assert_eq!(c.inherit[k.id_of(&[0, 1]).unwrap()], 1);
        assert!(matches!(parse_scalar_field("0"), Err(ScalarError::Parse { line: 1, .. })));
        let short = parse_scalar_field("0 1").unwrap();
        assert_eq!(build_constraints(&k, &short, TiePolicy::Reject), Err(ScalarError::Missing(1)));
    }

    #[test]
    fn validation_flags_crossing_pair() {
        let k = parse_complex("0 1 2 3").unwrap();
        let f = fig_field();
        let bad = extract_dgvf(&k, &[(k.id_of(&[1, 3]).unwrap(), k.id_of(&[1, 2, 3]).unwrap())]).unwrap();
        assert_eq!(validate_compatibility(&k, &f, &bad).len(), 1);
        let good = extract_dgvf(&k, &[(k.id_of(&[2]).unwrap(), k.id_of(&[1, 2]).unwrap())]).unwrap();
        assert!(validate_compatibility(&k, &f, &good).is_empty());
    }

    #[test]
    fn solver_respects_constraints() {
        let k = parse_complex("0 1 2 3").unwrap();
        let f = fig_field();
        let r = solve_compatible(&k, &f, TiePolicy::Reject, &MorseConfig::default()).unwrap();
        assert!(validate_compatibility(&k, &f, &r.run.dgvf).is_empty());
        // a full simplex needs only its minimum
        assert_eq!(r.run.dgvf.critical_total(), 1);
    }
}
