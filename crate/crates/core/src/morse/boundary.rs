use std::collections::BTreeMap;

use crate::complex::{CellId, SimplicialComplex};
use crate::matrix::SparseMatrix;

use super::Dgvf;

/// Sparse formal sum over critical cells.
type Chain = BTreeMap<CellId, i64>;

fn axpy(acc: &mut Chain, a: i64, x: &Chain) {
    for (&c, &v) in x {
        let e = acc.entry(c).or_insert(0);
        *e += a * v;
        if *e == 0 {
            acc.remove(&c);
        }
    }
}

/// The Morse complex of a gradient field.
#[derive(Debug, Clone)]
pub struct MorseBoundary {
    /// `delta[c]`: for a cell matched up, its image as a chain of critical
    /// cells of the same dimension; otherwise the image of its boundary
    /// with the matched face (if any) left out.
    delta: Vec<Chain>,
    /// Critical cells per dimension; row/column order of the matrices.
    critical: Vec<Vec<CellId>>,
    /// `matrices[q]` maps critical q-cells to critical (q-1)-cells; index 0
    /// is an empty placeholder.
    matrices: Vec<SparseMatrix>,
}

impl MorseBoundary {
    pub fn critical(&self) -> &[Vec<CellId>] {
        &self.critical
    }

    /// `∂̂_q`, rows indexed by critical (q-1)-cells.
    pub fn matrix(&self, q: usize) -> &SparseMatrix {
        &self.matrices[q]
    }

    pub fn matrices(&self) -> &[SparseMatrix] {
        &self.matrices
    }

    pub fn delta(&self, c: CellId) -> impl Iterator<Item = (CellId, i64)> + '_ {
        self.delta[c].iter().map(|(&a, &b)| (a, b))
    }

    /// Coefficient of critical `alpha` in `∂̂ beta`.
    pub fn coefficient(&self, beta: CellId, alpha: CellId) -> i64 {
        self.delta[beta].get(&alpha).copied().unwrap_or(0)
    }

    /// `∂̂_q ∘ ∂̂_{q+1} = 0` for every q.
    pub fn is_chain_complex(&self) -> bool {
        (1..self.matrices.len().saturating_sub(1)).all(|q| self.matrices[q].mul(&self.matrices[q + 1]).is_zero())
    }
}

/// Runs the multiplicity recursion over `order` (from `topo_sort_dmf`)
/// and assembles the boundary matrices on critical cells.
pub fn compute_morse_boundary(k: &SimplicialComplex, v: &Dgvf, order: &[CellId]) -> MorseBoundary {
    let mut delta: Vec<Chain> = vec![Chain::new(); k.len()];
    for &c in order {
        if let Some(beta) = v.up(k, c) {
            // matched face: its image is the rest of ∂beta, sign-corrected
            let s = k.incidence(beta, c);
            let mut img = Chain::new();
            axpy(&mut img, -s, &delta[beta]);
            delta[c] = img;
        } else {
            let skip = v.down(k, c);
            let mut img = Chain::new();
            for (f, s) in k.boundary(c) {
                if Some(f) == skip {
                    continue;
                }
                if v.is_critical(f) {
                    axpy(&mut img, s, &Chain::from([(f, 1)]));
                } else if v.up(k, f).is_some() {
                    axpy(&mut img, s, &delta[f]);
                }
            }
            delta[c] = img;
        }
    }
    let critical = v.critical().to_vec();
    let mut local = vec![usize::MAX; k.len()];
    for cells in &critical {
        for (i, &c) in cells.iter().enumerate() {
            local[c] = i;
        }
    }
    let mut matrices = vec![SparseMatrix::zeros(0, critical.first().map_or(0, Vec::len))];
    for q in 1..critical.len() {
        let cols = critical[q]
            .iter()
            .map(|&b| delta[b].iter().map(|(&a, &x)| (local[a], x)).collect())
            .collect();
        matrices.push(SparseMatrix::from_columns(critical[q - 1].len(), cols));
    }
    MorseBoundary {
        delta,
        critical,
        matrices,
    }
}

/// A gradient path `tau_0, sigma_0, tau_1, ..., tau_r` starting at a face of
/// some cell, with its signed multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientPath {
    pub cells: Vec<CellId>,
    pub multiplicity: i64,
}

/// Enumerates every gradient path from `∂sigma` to `tau` by depth-first
/// search. Exponential in general; meant for small complexes and tests.
pub fn gradient_paths(k: &SimplicialComplex, v: &Dgvf, sigma: CellId, tau: CellId) -> Vec<GradientPath> {
    fn walk(
        k: &SimplicialComplex,
        v: &Dgvf,
        cur: CellId,
        tau: CellId,
        stack: &mut Vec<CellId>,
        mult: i64,
        out: &mut Vec<GradientPath>,
    ) {
        stack.push(cur);
        if cur == tau {
            out.push(GradientPath {
                cells: stack.clone(),
                multiplicity: mult,
            });
        } else if let Some(s) = v.up(k, cur) {
            stack.push(s);
            let a = k.incidence(s, cur);
            for (f, b) in k.boundary(s) {
                if f != cur {
                    walk(k, v, f, tau, stack, -mult * a * b, out);
                }
            }
            stack.pop();
        }
        stack.pop();
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    if k.dim(sigma) == k.dim(tau) + 1 {
        for (f, s) in k.boundary(sigma) {
            walk(k, v, f, tau, &mut stack, s, &mut out);
        }
    }
    out
}

/// `(signed multiplicity, number of distinct paths)` from `∂sigma` to
/// `tau`, by memoized counting over the acyclic field. The distinct count
/// saturates.
pub fn path_count(k: &SimplicialComplex, v: &Dgvf, sigma: CellId, tau: CellId) -> (i64, u64) {
    if k.dim(sigma) != k.dim(tau) + 1 {
        return (0, 0);
    }
    // memo[c] = paths from c (a cell of dim(tau)) to tau
    let mut memo: BTreeMap<CellId, (i64, u64)> = BTreeMap::new();
    fn count(
        k: &SimplicialComplex,
        v: &Dgvf,
        c: CellId,
        tau: CellId,
        memo: &mut BTreeMap<CellId, (i64, u64)>,
    ) -> (i64, u64) {
        if c == tau {
            return (1, 1);
        }
        if let Some(&r) = memo.get(&c) {
            return r;
        }
        let mut r = (0i64, 0u64);
        if let Some(s) = v.up(k, c) {
            let a = k.incidence(s, c);
            for (f, b) in k.boundary(s) {
                if f != c {
                    let (x, n) = count(k, v, f, tau, memo);
                    r.0 += -a * b * x;
                    r.1 = r.1.saturating_add(n);
                }
            }
        }
        memo.insert(c, r);
        r
    }
    let mut total = (0i64, 0u64);
    for (f, s) in k.boundary(sigma) {
        let (x, n) = count(k, v, f, tau, &mut memo);
        total.0 += s * x;
        total.1 = total.1.saturating_add(n);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;
    use crate::morse::{extract_dgvf, topo_sort_dmf};

    fn id(k: &SimplicialComplex, v: &[u32]) -> CellId {
        k.id_of(v).unwrap()
    }

    fn boundary(k: &SimplicialComplex, v: &Dgvf) -> MorseBoundary {
        compute_morse_boundary(k, v, &topo_sort_dmf(k, v))
    }

    #[test]
    fn no_pairs_gives_simplicial_boundary() {
        let k = parse_complex("0 1 2\n2 3").unwrap();
        let v = extract_dgvf(&k, &[]).unwrap();
        let b = boundary(&k, &v);
        for q in 1..=k.max_dim() {
            assert_eq!(b.matrix(q), &k.boundary_matrix(q).unwrap());
        }
        assert!(b.is_chain_complex());
    }

    #[test]
    fn solid_triangle_trivial() {
        let k = parse_complex("0 1 2").unwrap();
        let m = [
            (id(&k, &[1]), id(&k, &[0, 1])),
            (id(&k, &[2]), id(&k, &[0, 2])),
            (id(&k, &[1, 2]), id(&k, &[0, 1, 2])),
        ];
        let b = boundary(&k, &extract_dgvf(&k, &m).unwrap());
        assert_eq!(b.matrix(1).ncols(), 0);
        assert_eq!(b.matrix(2).ncols(), 0);
    }

    #[test]
    fn triangle_boundary_cancels() {
        let k = parse_complex("0 1\n1 2\n0 2").unwrap();
        let m = [(id(&k, &[1]), id(&k, &[0, 1])), (id(&k, &[2]), id(&k, &[1, 2]))];
        let v = extract_dgvf(&k, &m).unwrap();
        let b = boundary(&k, &v);
        let d1 = b.matrix(1);
        assert_eq!((d1.nrows(), d1.ncols()), (1, 1));
        assert!(d1.is_zero());
        let e02 = id(&k, &[0, 2]);
        let paths = gradient_paths(&k, &v, e02, 0);
        let mut mults: Vec<i64> = paths.iter().map(|p| p.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, vec![-1, 1]);
        assert_eq!(path_count(&k, &v, e02, 0), (0, 2));
    }

    #[test]
    fn enumeration_matches_recursion_on_collapsible_disk() {
        // cone over a square: 4 triangles around vertex 4
        let k = parse_complex("0 1 4\n1 2 4\n2 3 4\n0 3 4").unwrap();
        let m = [
            (id(&k, &[0]), id(&k, &[0, 4])),
            (id(&k, &[1]), id(&k, &[1, 4])),
            (id(&k, &[2]), id(&k, &[2, 4])),
            (id(&k, &[3]), id(&k, &[3, 4])),
            (id(&k, &[0, 1]), id(&k, &[0, 1, 4])),
            (id(&k, &[1, 2]), id(&k, &[1, 2, 4])),
        ];
        let v = extract_dgvf(&k, &m).unwrap();
        let b = boundary(&k, &v);
        assert!(b.is_chain_complex());
        for q in 1..b.critical().len() {
            for &beta in &b.critical()[q] {
                for &alpha in &b.critical()[q - 1] {
                    let sum: i64 = gradient_paths(&k, &v, beta, alpha).iter().map(|p| p.multiplicity).sum();
                    assert_eq!(b.coefficient(beta, alpha), sum, "{beta} -> {alpha}");
                    assert_eq!(path_count(&k, &v, beta, alpha).0, sum);
                }
            }
        }
    }
}
