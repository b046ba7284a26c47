use rand::Rng;
use rand_distr::StandardNormal;

use super::{close_backward, close_forward, CutError, CutInstance, DirectedCut, Embedding};

#[derive(Debug, Clone, PartialEq)]
pub struct ArvConfig {
    /// Separation scale `Δ`; `None` means `1 / (20 sqrt(ln n))`.
    pub delta: Option<f64>,
    pub max_retries: usize,
}

impl Default for ArvConfig {
    fn default() -> Self {
        ArvConfig {
            delta: None,
            max_retries: 64,
        }
    }
}

impl ArvConfig {
    pub fn delta_for(&self, n: usize) -> f64 {
        self.delta
            .unwrap_or_else(|| 1.0 / (20.0 * (n.max(3) as f64).ln().sqrt()))
    }
}

/// Hyperplane rounding of an embedding into a directed cut.
///
/// `U` is the half of the points closest to `v0` (radius `Φ` is their median
/// squared distance). A random direction splits `U` into `V+`, `V-` and a fat
/// band of half-width `σ`, drawn uniformly from `(0, Δ]`. The larger of `V+`
/// and `V-` seeds `A`; band points join when all their forbidden successors
/// lie in the seed or the band. `A` is then closed under forbidden arcs
/// (forward, or by evicting predecessors, whichever balances better), so no
/// forbidden arc is ever cut. Attempts below `c/2` balance are retried.
pub fn round_arv<R: Rng + ?Sized>(
    emb: &Embedding,
    inst: &CutInstance,
    rng: &mut R,
    cfg: &ArvConfig,
) -> Result<DirectedCut, CutError> {
    let n = inst.n;
    assert_eq!(emb.n(), n, "embedding and instance sizes differ");
    let need = inst.min_side_relaxed();
    let dim = emb.v0().len();
    let delta = cfg.delta_for(n);

    let d0: Vec<f64> = (0..n).map(|i| emb.dist0(i)).collect();
    let mut sorted = d0.clone();
    sorted.sort_by(f64::total_cmp);
    let phi = if n == 0 { 0.0 } else { sorted[n.div_ceil(2) - 1] };
    let in_u: Vec<bool> = d0.iter().map(|&d| d <= phi + 1e-12).collect();

    let mut succ = vec![Vec::new(); n];
    for &(u, v) in &inst.forbidden {
        succ[u].push(v);
    }

    for _ in 0..cfg.max_retries {
        let r: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let sigma = delta * (1.0 - rng.random::<f64>());
        let proj: Vec<f64> = (0..n)
            .map(|i| emb.vector(i).iter().zip(&r).map(|(a, b)| a * b).sum())
            .collect();
        let plus: Vec<bool> = (0..n).map(|i| in_u[i] && proj[i] >= sigma).collect();
        let minus: Vec<bool> = (0..n).map(|i| in_u[i] && proj[i] <= -sigma).collect();
        let band: Vec<bool> = (0..n).map(|i| in_u[i] && !plus[i] && !minus[i]).collect();
        let seed = if plus.iter().filter(|&&x| x).count() >= minus.iter().filter(|&&x| x).count() {
            plus
        } else {
            minus
        };
        let mut in_a = seed.clone();
        for b in 0..n {
            if band[b] && succ[b].iter().all(|&v| seed[v] || band[v]) {
                in_a[b] = true;
            }
        }
        let mut grown = in_a.clone();
        close_forward(inst, &mut grown);
        let mut shrunk = in_a;
        close_backward(inst, &mut shrunk);
        let candidates = [grown, shrunk];
        let best = candidates
            .iter()
            .map(|a| DirectedCut::from_membership(inst, a))
            .filter(|c| c.min_side() >= need)
            .min_by(|x, y| x.cost.total_cmp(&y.cost));
        if let Some(cut) = best {
            debug_assert!(!inst.cuts_forbidden(&cut.membership(n)));
            return Ok(cut);
        }
    }
    Err(CutError::RoundingFailed(cfg.max_retries))
}
