//! Vector relaxation of the directed balanced cut with forbidden arcs.
//!
//! Gram index 0 is the reference vector `v0`; vertex `i` is Gram index
//! `i + 1`. The directed semimetric is
//! `D(u, v) = |v0 - v|^2 - |v0 - u|^2 + |v - u|^2`, which is 8 for an arc from
//! the `v0` side to the `-v0` side of a boolean embedding and 0 otherwise.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{greedy_dbcre, CutError, CutInstance, DirectedCut};

#[derive(Debug, Clone, PartialEq)]
pub struct SdpInstance {
    pub cut: CutInstance,
}

impl SdpInstance {
    pub fn n(&self) -> usize {
        self.cut.n
    }

    /// Gram dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.cut.n + 1
    }

    /// `4 c (1 - c) n^2`.
    pub fn spreading_target(&self) -> f64 {
        let n = self.n() as f64;
        4.0 * self.cut.c * (1.0 - self.cut.c) * n * n
    }

    /// `D(u, v)` for vertices `u, v` read from a Gram matrix.
    pub fn directed(x: &DMatrix<f64>, u: usize, v: usize) -> f64 {
        let (u, v) = (u + 1, v + 1);
        2.0 - 2.0 * x[(0, v)] + 2.0 * x[(0, u)] - 2.0 * x[(u, v)]
    }

    /// `(1/8) sum w D(u, v)` over arcs.
    pub fn objective(&self, x: &DMatrix<f64>) -> f64 {
        self.cut
            .arcs
            .iter()
            .map(|a| a.weight * Self::directed(x, a.src, a.dst))
            .sum::<f64>()
            / 8.0
    }

    pub fn forbidden_sum(&self, x: &DMatrix<f64>) -> f64 {
        self.cut.forbidden.iter().map(|&(u, v)| Self::directed(x, u, v)).sum()
    }

    /// `sum_{i<j} |v_i - v_j|^2` over vertices (not `v0`).
    pub fn spreading(&self, x: &DMatrix<f64>) -> f64 {
        let m = self.dim();
        let mut s = 0.0;
        for i in 1..m {
            for j in i + 1..m {
                s += 2.0 - 2.0 * x[(i, j)];
            }
        }
        s
    }

    pub fn unit_residual(x: &DMatrix<f64>) -> f64 {
        (0..x.nrows()).map(|i| (x[(i, i)] - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest `d(i,j) - d(i,k) - d(k,j)` over Gram-index triples.
    pub fn triangle_violation(x: &DMatrix<f64>) -> f64 {
        let m = x.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let dij = x[(i, i)] + x[(j, j)] - 2.0 * x[(i, j)];
                for k in 0..m {
                    if k == i || k == j {
                        continue;
                    }
                    let dik = x[(i, i)] + x[(k, k)] - 2.0 * x[(i, k)];
                    let dkj = x[(k, k)] + x[(j, j)] - 2.0 * x[(k, j)];
                    worst = worst.max(dij - dik - dkj);
                }
            }
        }
        worst
    }

    pub fn residuals(&self, x: &DMatrix<f64>) -> Residuals {
        Residuals {
            unit: Self::unit_residual(x),
            triangle: Self::triangle_violation(x),
            spreading: (self.spreading_target() - self.spreading(x)).max(0.0),
            forbidden: self.forbidden_sum(x).max(0.0),
            min_eigenvalue: SymmetricEigen::new(x.clone()).eigenvalues.min(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub unit: f64,
    pub triangle: f64,
    pub spreading: f64,
    pub forbidden: f64,
    pub min_eigenvalue: f64,
}

impl Residuals {
    pub fn within(&self, tol: f64) -> bool {
        self.unit <= tol
            && self.triangle <= tol
            && self.spreading <= tol
            && self.forbidden <= tol
            && self.min_eigenvalue >= -tol
    }
}

pub fn build_sdp(inst: &CutInstance) -> SdpInstance {
    SdpInstance { cut: inst.clone() }
}

/// Unit vectors `v0, v1, ..., vn` with their Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub gram: DMatrix<f64>,
    pub vectors: Vec<DVector<f64>>,
    pub objective: f64,
    pub residuals: Residuals,
}

impl Embedding {
    pub fn from_gram(sdp: &SdpInstance, gram: DMatrix<f64>) -> Self {
        let vectors = factor(&gram);
        Embedding {
            objective: sdp.objective(&gram),
            residuals: sdp.residuals(&gram),
            gram,
            vectors,
        }
    }

    /// `v_i = v0` for `i` in `A`, `-v0` otherwise.
    pub fn boolean(sdp: &SdpInstance, in_a: &[bool]) -> Self {
        Self::from_gram(sdp, boolean_gram(in_a))
    }

    pub fn n(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn v0(&self) -> &DVector<f64> {
        &self.vectors[0]
    }

    pub fn vector(&self, i: usize) -> &DVector<f64> {
        &self.vectors[i + 1]
    }

    /// Squared distance between vertices.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        (self.vector(i) - self.vector(j)).norm_squared()
    }

    /// Squared distance from `v0`.
    pub fn dist0(&self, i: usize) -> f64 {
        (self.v0() - self.vector(i)).norm_squared()
    }

    pub fn directed(&self, u: usize, v: usize) -> f64 {
        self.dist0(v) - self.dist0(u) + self.dist(u, v)
    }
}

fn boolean_gram(in_a: &[bool]) -> DMatrix<f64> {
    let s: Vec<f64> = std::iter::once(1.0)
        .chain(in_a.iter().map(|&a| if a { 1.0 } else { -1.0 }))
        .collect();
    DMatrix::from_fn(s.len(), s.len(), |i, j| s[i] * s[j])
}

/// Rows of `U sqrt(Λ)` normalized to unit length.
fn factor(gram: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let m = gram.nrows();
    let eig = SymmetricEigen::new(gram.clone());
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    (0..m)
        .map(|i| {
            let mut v = DVector::from_fn(m, |k, _| eig.eigenvectors[(i, k)] * roots[k]);
            let norm = v.norm();
            if norm > 1e-12 {
                v /= norm;
            }
            v
        })
        .collect()
}

/// Clips negative eigenvalues and rescales to unit diagonal.
pub(crate) fn project_psd_unit(x: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let clipped = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)));
    let mut y = &eig.eigenvectors * clipped * eig.eigenvectors.transpose();
    let m = y.nrows();
    let d: Vec<f64> = (0..m).map(|i| y[(i, i)].max(1e-12).sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            y[(i, j)] /= d[i] * d[j];
        }
    }
    y
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConfig {
    pub iterations: usize,
    pub step: f64,
    pub penalty: f64,
    pub penalty_growth: f64,
    pub sweep_every: usize,
    pub sampled_triples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            iterations: 150,
            step: 0.05,
            penalty: 1.0,
            penalty_growth: 1.03,
            sweep_every: 10,
            sampled_triples: 64,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

/// Reference solver: projected gradient steps with constraint penalties, then
/// the largest blend with a boolean feasible point that meets every
/// constraint within tolerance.
pub fn solve_embedding(sdp: &SdpInstance, cfg: &EmbeddingConfig) -> Result<Embedding, CutError> {
    let n = sdp.n();
    let m = sdp.dim();
    let start: DirectedCut = greedy_dbcre(&sdp.cut).map_err(|e| CutError::Embedding(format!("no boolean start: {e}")))?;
    let xb = boolean_gram(&start.membership(n));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // constant objective and forbidden directions
    let mut grad_obj = DMatrix::<f64>::zeros(m, m);
    for a in &sdp.cut.arcs {
        add_directed(&mut grad_obj, a.src, a.dst, a.weight / 8.0);
    }
    let mut grad_forb = DMatrix::<f64>::zeros(m, m);
    for &(u, v) in &sdp.cut.forbidden {
        add_directed(&mut grad_forb, u, v, 1.0);
    }
    let scale = grad_obj.abs().max().max(1e-12);
    grad_obj /= scale;

    let mut x = (&xb + DMatrix::identity(m, m)) * 0.5;
    let mut mu = cfg.penalty;
    let mut violated: Vec<(usize, usize, usize)> = Vec::new();
    let target = sdp.spreading_target();
    let pairs = (n * n.saturating_sub(1) / 2).max(1) as f64;
    for it in 0..cfg.iterations {
        let mut g = grad_obj.clone();
        if sdp.forbidden_sum(&x) > 0.0 {
            g += &grad_forb * mu;
        }
        let deficit = target - sdp.spreading(&x);
        if deficit > 0.0 {
            let w = mu * deficit / pairs;
            for i in 1..m {
                for j in 1..m {
                    if i != j {
                        g[(i, j)] += w;
                    }
                }
            }
        }
        if it % cfg.sweep_every == 0 {
            violated = violated_triples(&x, 1e-9);
        }
        for _ in 0..cfg.sampled_triples.min(m * m * m) {
            let t = (rng.random_range(0..m), rng.random_range(0..m), rng.random_range(0..m));
            if t.0 != t.1 && t.1 != t.2 && t.0 != t.2 {
                violated.push(t);
            }
        }
        for &(i, j, k) in &violated {
            let viol = tri(&x, i, j, k);
            if viol > 0.0 {
                let w = mu;
                g[(i, j)] -= w;
                g[(j, i)] -= w;
                g[(i, k)] += w;
                g[(k, i)] += w;
                g[(k, j)] += w;
                g[(j, k)] += w;
            }
        }
        violated.retain(|&(i, j, k)| tri(&x, i, j, k) > 0.0);
        x -= g * cfg.step;
        x = project_psd_unit(&x);
        mu *= cfg.penalty_growth;
    }

    // blend towards the boolean point until feasible
    let feasible = |y: &DMatrix<f64>| sdp.residuals(y).within(cfg.tolerance);
    let blend = |l: f64| &x * l + &xb * (1.0 - l);
    let best = if feasible(&x) {
        x.clone()
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if feasible(&blend(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        blend(lo)
    };
    let best = if sdp.objective(&best) <= sdp.objective(&xb) { best } else { xb };
    let emb = Embedding::from_gram(sdp, best);
    if !emb.residuals.within(10.0 * cfg.tolerance) {
        return Err(CutError::Embedding(format!("residuals {:?}", emb.residuals)));
    }
    Ok(emb)
}

fn add_directed(g: &mut DMatrix<f64>, u: usize, v: usize, w: f64) {
    let (u, v) = (u + 1, v + 1);
    g[(0, v)] -= w;
    g[(v, 0)] -= w;
    g[(0, u)] += w;
    g[(u, 0)] += w;
    g[(u, v)] -= w;
    g[(v, u)] -= w;
}

fn tri(x: &DMatrix<f64>, i: usize, j: usize, k: usize) -> f64 {
    let d = |a: usize, b: usize| x[(a, a)] + x[(b, b)] - 2.0 * x[(a, b)];
    d(i, j) - d(i, k) - d(k, j)
}

fn violated_triples(x: &DMatrix<f64>, tol: f64) -> Vec<(usize, usize, usize)> {
    let m = x.nrows();
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if i != j && j != k && i != k && tri(x, i, j, k) > tol {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::exact_dbcre;
    use crate::cut::test_instances::bidirected_cycle;

    #[test]
    fn no_forbidden_is_vacuous() {
        let sdp = build_sdp(&bidirected_cycle(4, 0.5));
        let x = DMatrix::identity(5, 5);
        assert_eq!(sdp.forbidden_sum(&x), 0.0);
    }

    #[test]
    fn boolean_assignment_is_feasible_and_counts_cut() {
        let mut inst = bidirected_cycle(6, 1.0 / 3.0);
        inst.add_forbidden(1, 0);
        let sdp = build_sdp(&inst);
        let in_a = [true, true, true, false, false, false];
        let emb = Embedding::boolean(&sdp, &in_a);
        assert!(emb.residuals.within(1e-9));
        assert!((emb.objective - inst.cut_cost(&in_a)).abs() < 1e-9);
        // D is 8 across A -> B, 0 otherwise, and D(u,v) + D(v,u) = 2|u-v|^2
        for u in 0..6 {
            for v in 0..6 {
                let d = emb.directed(u, v);
                let want = if in_a[u] && !in_a[v] { 8.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-9);
                let sym = d + emb.directed(v, u);
                assert!((sym - 2.0 * emb.dist(u, v)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn two_node_embedding() {
        let mut inst = CutInstance::new(2, 0.5).unwrap();
        inst.add_arc(0, 1, 1.0);
        let sdp = build_sdp(&inst);
        let emb = solve_embedding(&sdp, &EmbeddingConfig::default()).unwrap();
        // spreading forces antipodal vertices; the optimum puts the arc head
        // on the v0 side and costs nothing
        assert!(emb.dist(0, 1) > 4.0 - 1e-5);
        assert!(emb.objective < 1e-5);
    }

    #[test]
    fn relaxation_bound_on_cycle() {
        let inst = bidirected_cycle(6, 1.0 / 3.0);
        let sdp = build_sdp(&inst);
        let emb = solve_embedding(&sdp, &EmbeddingConfig::default()).unwrap();
        assert!(emb.residuals.within(1e-5));
        assert!(emb.objective <= exact_dbcre(&inst).unwrap().cost + 1e-6);
    }
}
