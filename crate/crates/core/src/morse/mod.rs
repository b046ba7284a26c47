//! Discrete gradient vector fields, implicit Morse functions, the Morse
//! boundary operator and critical-pair cancellation.

mod boundary;
mod cancel;

pub use boundary::{compute_morse_boundary, gradient_paths, path_count, GradientPath, MorseBoundary};
pub use cancel::{cancel_nonsmooth, cancel_pair, is_ridge_critical, NonSmoothClause};

use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{CellId, SimplicialComplex};
use crate::gadget::{find_cycle, topological_order};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("cells {0} and {1} are not a face incidence")]
    NotIncident(CellId, CellId),
    #[error("cell {0} occurs in more than one pair")]
    DoubleMatched(CellId),
    #[error("matching closes a V-path through cells {0:?}")]
    Cycle(Vec<CellId>),
    #[error("cancellation of ({tau}, {sigma}) refused: {reason}")]
    CancelRefused { tau: CellId, sigma: CellId, reason: String },
    #[error("non-smooth cancellation refused: {0}")]
    NonSmoothRefused(NonSmoothClause),
    #[error("Morse inequality violated in dimension {dim}: c = {c} < b = {b}")]
    Inequality { dim: usize, c: usize, b: usize },
    #[error("alternating critical count {got} differs from Euler characteristic {chi}")]
    Euler { got: i64, chi: i64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An acyclic matching on the Hasse graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dgvf {
    /// `(face, coface)` pairs sorted by face.
    pairs: Vec<(CellId, CellId)>,
    partner: Vec<Option<CellId>>,
    critical: Vec<Vec<CellId>>,
}

impl Dgvf {
    pub fn pairs(&self) -> &[(CellId, CellId)] {
        &self.pairs
    }

    pub fn partner(&self, c: CellId) -> Option<CellId> {
        self.partner[c]
    }

    /// The coface a cell is matched up to, if it is the face of its pair.
    pub fn up(&self, k: &SimplicialComplex, c: CellId) -> Option<CellId> {
        self.partner[c].filter(|&p| k.dim(p) > k.dim(c))
    }

    /// The face a cell is matched down to, if it is the coface of its pair.
    pub fn down(&self, k: &SimplicialComplex, c: CellId) -> Option<CellId> {
        self.partner[c].filter(|&p| k.dim(p) < k.dim(c))
    }

    pub fn is_critical(&self, c: CellId) -> bool {
        self.partner[c].is_none()
    }

    /// Critical cells of each dimension, ascending.
    pub fn critical(&self) -> &[Vec<CellId>] {
        &self.critical
    }

    pub fn critical_counts(&self) -> Vec<usize> {
        self.critical.iter().map(Vec::len).collect()
    }

    pub fn critical_total(&self) -> usize {
        self.critical.iter().map(Vec::len).sum()
    }

    /// One pair per line: `alpha_id beta_id`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for &(a, b) in &self.pairs {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    pub fn parse(k: &SimplicialComplex, text: &str) -> Result<Dgvf, MorseError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ids: Result<Vec<CellId>, _> = line.split_whitespace().map(str::parse).collect();
            match ids.as_deref() {
                Ok(&[a, b]) if a < k.len() && b < k.len() => pairs.push((a, b)),
                _ => {
                    return Err(MorseError::Parse {
                        line: i + 1,
                        msg: format!("expected two cell ids, got `{line}`"),
                    })
                }
            }
        }
        extract_dgvf(k, &pairs)
    }

    /// Arcs of the reoriented Hasse graph: matched incidences point up,
    /// every other incidence points down.
    pub fn reoriented_arcs(&self, k: &SimplicialComplex) -> Vec<(CellId, CellId)> {
        let mut arcs = Vec::new();
        for c in 0..k.len() {
            for &f in k.faces(c) {
                if self.partner[f] == Some(c) {
                    arcs.push((f, c));
                } else {
                    arcs.push((c, f));
                }
            }
        }
        arcs
    }

    pub(crate) fn from_pairs_unchecked(k: &SimplicialComplex, pairs: Vec<(CellId, CellId)>) -> Dgvf {
        let mut partner = vec![None; k.len()];
        for &(a, b) in &pairs {
            partner[a] = Some(b);
            partner[b] = Some(a);
        }
        let mut critical = vec![Vec::new(); if k.is_empty() { 0 } else { k.max_dim() + 1 }];
        for c in 0..k.len() {
            if partner[c].is_none() {
                critical[k.dim(c)].push(c);
            }
        }
        let mut pairs = pairs;
        pairs.sort_unstable();
        Dgvf {
            pairs,
            partner,
            critical,
        }
    }
}

/// Validates a matching `(face, coface)` and builds its gradient field.
pub fn extract_dgvf(k: &SimplicialComplex, matching: &[(CellId, CellId)]) -> Result<Dgvf, MorseError> {
    let mut seen = vec![false; k.len()];
    let mut pairs = Vec::with_capacity(matching.len());
    for &(a, b) in matching {
        let (f, c) = if k.dim(a) < k.dim(b) { (a, b) } else { (b, a) };
        if k.dim(c) != k.dim(f) + 1 || !k.faces(c).contains(&f) {
            return Err(MorseError::NotIncident(a, b));
        }
        for x in [f, c] {
            if seen[x] {
                return Err(MorseError::DoubleMatched(x));
            }
            seen[x] = true;
        }
        pairs.push((f, c));
    }
    let v = Dgvf::from_pairs_unchecked(k, pairs);
    if let Some(cycle) = find_cycle(k.len(), &v.reoriented_arcs(k)) {
        return Err(MorseError::Cycle(cycle));
    }
    Ok(v)
}

/// A total order compatible with the gradient field; a cell's position is
/// its Morse function value. Faces precede cofaces except inside gradient
/// pairs, where the coface comes first.
pub fn topo_sort_dmf(k: &SimplicialComplex, v: &Dgvf) -> Vec<CellId> {
    let mut order = topological_order(k.len(), &v.reoriented_arcs(k)).expect("gradient field is acyclic");
    order.reverse();
    order
}

/// Checks the discrete Morse function axioms for `F(cell) = position`:
/// at most one coface with `F <= F(σ)` and at most one face with
/// `F >= F(σ)`, for every cell.
pub fn check_dmf(k: &SimplicialComplex, order: &[CellId]) -> Vec<String> {
    let mut f = vec![0usize; k.len()];
    for (i, &c) in order.iter().enumerate() {
        f[c] = i;
    }
    let mut out = Vec::new();
    for s in 0..k.len() {
        let n1 = k.cofaces(s).iter().filter(|&&t| f[t] <= f[s]).count();
        let n2 = k.faces(s).iter().filter(|&&t| f[t] >= f[s]).count();
        if n1 > 1 {
            out.push(format!("cell {s}: {n1} cofaces with lower value"));
        }
        if n2 > 1 {
            out.push(format!("cell {s}: {n2} faces with higher value"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseSummary {
    pub critical: Vec<usize>,
    pub betti: Vec<usize>,
    pub euler: i64,
    /// Total critical cells.
    pub morse_total: usize,
    /// Total Betti number.
    pub betti_total: usize,
    /// `morse_total / betti_total` (weak optimality ratio).
    pub ratio: f64,
}

impl MorseSummary {
    pub fn render(&self) -> String {
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "critical: {}\nbetti: {}\neuler: {}\nmorse_total: {}\nbetti_total: {}\nratio: {:.4}\n",
            list(&self.critical),
            list(&self.betti),
            self.euler,
            self.morse_total,
            self.betti_total,
            self.ratio
        )
    }
}

/// Checks `Σ(-1)^m c_m = χ` and `c_m >= b_m`, and reports the aggregates.
pub fn morse_summary(k: &SimplicialComplex, v: &Dgvf, betti: &[usize]) -> Result<MorseSummary, MorseError> {
    let c = v.critical_counts();
    let alt: i64 = c
        .iter()
        .enumerate()
        .map(|(m, &x)| if m % 2 == 0 { x as i64 } else { -(x as i64) })
        .sum();
    let chi = k.euler_characteristic();
    if alt != chi {
        return Err(MorseError::Euler { got: alt, chi });
    }
    for (dim, &b) in betti.iter().enumerate() {
        let cm = c.get(dim).copied().unwrap_or(0);
        if cm < b {
            return Err(MorseError::Inequality { dim, c: cm, b });
        }
    }
    let morse_total: usize = c.iter().sum();
    let betti_total: usize = betti.iter().sum();
    Ok(MorseSummary {
        critical: c,
        betti: betti.to_vec(),
        euler: chi,
        morse_total,
        betti_total,
        ratio: if betti_total == 0 {
            f64::INFINITY
        } else {
            morse_total as f64 / betti_total as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;

    fn id(k: &SimplicialComplex, v: &[u32]) -> CellId {
        k.id_of(v).unwrap()
    }

    #[test]
    fn empty_matching_all_critical() {
        let k = parse_complex("0 1 2").unwrap();
        let v = extract_dgvf(&k, &[]).unwrap();
        assert_eq!(v.critical_counts(), vec![3, 3, 1]);
    }

    #[test]
    fn solid_triangle_optimal() {
        let k = parse_complex("0 1 2").unwrap();
        let m = [
            (id(&k, &[1]), id(&k, &[0, 1])),
            (id(&k, &[2]), id(&k, &[0, 2])),
            (id(&k, &[1, 2]), id(&k, &[0, 1, 2])),
        ];
        let v = extract_dgvf(&k, &m).unwrap();
        assert_eq!(v.critical_counts(), vec![1, 0, 0]);
        let s = morse_summary(&k, &v, &[1, 0, 0]).unwrap();
        assert_eq!(s.morse_total, 1);
        assert_eq!(Dgvf::parse(&k, &v.serialize()).unwrap(), v);
    }

    #[test]
    fn cycle_rejected() {
        // around the triangle boundary: 0->01, 1->12, 2->02 closes a V-path
        let k = parse_complex("0 1\n1 2\n0 2").unwrap();
        let m = [
            (id(&k, &[0]), id(&k, &[0, 1])),
            (id(&k, &[1]), id(&k, &[1, 2])),
            (id(&k, &[2]), id(&k, &[0, 2])),
        ];
        assert!(matches!(extract_dgvf(&k, &m), Err(MorseError::Cycle(_))));
        let double = [(id(&k, &[0]), id(&k, &[0, 1])), (id(&k, &[0]), id(&k, &[0, 2]))];
        assert_eq!(extract_dgvf(&k, &double), Err(MorseError::DoubleMatched(id(&k, &[0]))));
        assert!(matches!(extract_dgvf(&k, &[(0, 1)]), Err(MorseError::NotIncident(0, 1))));
    }

    #[test]
    fn topo_order_is_dmf() {
        let k = parse_complex("0").unwrap();
        let v = extract_dgvf(&k, &[]).unwrap();
        assert_eq!(topo_sort_dmf(&k, &v), vec![0]);

        let k = parse_complex("0 1").unwrap();
        let v = extract_dgvf(&k, &[(0, 2)]).unwrap();
        let order = topo_sort_dmf(&k, &v);
        assert!(check_dmf(&k, &order).is_empty());
        let pos = |c| order.iter().position(|&x| x == c).unwrap();
        assert!(pos(2) < pos(0));

        let k = parse_complex("0 1\n1 2\n0 2").unwrap();
        let m = [(id(&k, &[1]), id(&k, &[0, 1])), (id(&k, &[2]), id(&k, &[1, 2]))];
        let v = extract_dgvf(&k, &m).unwrap();
        assert!(check_dmf(&k, &topo_sort_dmf(&k, &v)).is_empty());
    }

    #[test]
    fn summary_checks() {
        let k = parse_complex("0 1\n1 2\n0 2").unwrap();
        let v = extract_dgvf(&k, &[]).unwrap();
        let s = morse_summary(&k, &v, &[1, 1]).unwrap();
        assert_eq!(s.critical, vec![3, 3]);
        assert_eq!(s.ratio, 3.0);
        assert!(matches!(
            morse_summary(&k, &v, &[4, 1]),
            Err(MorseError::Inequality { dim: 0, .. })
        ));
    }
}
