//! Minimum directed c-balanced cuts with arcs that must not be cut.
//!
//! Convention: a cut is a partition `(A, B)`; its cost is the total weight of
//! arcs leaving `A` into `B`. Forbidden arcs may never go from `A` to `B`.

mod arv;
pub(crate) mod exact;
mod flow;
mod greedy;
mod mwum;
mod sdp;

pub use arv::{round_arv, ArvConfig};
pub use exact::exact_dbcre;
pub use flow::{max_flow, FlowResult};
pub use greedy::greedy_dbcre;
pub use mwum::{
    mwum_search, mwum_solve, violation_oracle, MwumConfig, MwumOutcome, MwumRecord, MwumSearch, MwumState,
    OracleAnswer,
};
pub use sdp::{build_sdp, solve_embedding, Embedding, EmbeddingConfig, SdpInstance};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error("no c-balanced cut avoids every forbidden arc")]
    Infeasible,
    #[error("instance has {n} vertices, above the enumeration bound {max}")]
    TooLarge { n: usize, max: usize },
    #[error("forbidden arcs contain a directed cycle")]
    ForbiddenCycle,
    #[error("rounding failed after {0} attempts")]
    RoundingFailed(usize),
    #[error("embedding solver failed: {0}")]
    Embedding(String),
    #[error("balance parameter {0} outside (0, 1/2]")]
    BadBalance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedArc {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutInstance {
    pub n: usize,
    pub arcs: Vec<WeightedArc>,
    pub forbidden: Vec<(usize, usize)>,
    pub c: f64,
}

impl CutInstance {
    pub fn new(n: usize, c: f64) -> Result<Self, CutError> {
        if !(c > 0.0 && c <= 0.5) {
            return Err(CutError::BadBalance(c));
        }
        Ok(CutInstance {
            n,
            arcs: Vec::new(),
            forbidden: Vec::new(),
            c,
        })
    }

    pub fn add_arc(&mut self, src: usize, dst: usize, weight: f64) {
        assert!(src < self.n && dst < self.n);
        self.arcs.push(WeightedArc { src, dst, weight });
    }

    pub fn add_forbidden(&mut self, src: usize, dst: usize) {
        assert!(src < self.n && dst < self.n);
        self.forbidden.push((src, dst));
    }

    /// Smallest side size accepted by the exact solver, `ceil(c n)`.
    pub fn min_side(&self) -> usize {
        (self.c * self.n as f64 - 1e-9).ceil().max(0.0) as usize
    }

    /// Smallest side size accepted from pseudo-approximate rounding,
    /// `floor(c n / 2)` but at least one when `n >= 2`.
    pub fn min_side_relaxed(&self) -> usize {
        let k = (self.c * self.n as f64 / 2.0 + 1e-9).floor() as usize;
        if self.n >= 2 {
            k.max(1)
        } else {
            k
        }
    }

    pub fn cut_cost(&self, in_a: &[bool]) -> f64 {
        self.arcs
            .iter()
            .filter(|a| in_a[a.src] && !in_a[a.dst])
            .map(|a| a.weight)
            .sum()
    }

    pub fn cuts_forbidden(&self, in_a: &[bool]) -> bool {
        self.forbidden.iter().any(|&(u, v)| in_a[u] && !in_a[v])
    }

    pub fn total_weight(&self) -> f64 {
        self.arcs.iter().map(|a| a.weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedCut {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
    pub cost: f64,
    pub balance: f64,
}

impl DirectedCut {
    pub fn from_membership(inst: &CutInstance, in_a: &[bool]) -> Self {
        let side_a: Vec<usize> = (0..inst.n).filter(|&v| in_a[v]).collect();
        let side_b: Vec<usize> = (0..inst.n).filter(|&v| !in_a[v]).collect();
        let balance = if inst.n == 0 {
            0.0
        } else {
            side_a.len().min(side_b.len()) as f64 / inst.n as f64
        };
        DirectedCut {
            cost: inst.cut_cost(in_a),
            side_a,
            side_b,
            balance,
        }
    }

    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut in_a = vec![false; n];
        for &v in &self.side_a {
            in_a[v] = true;
        }
        in_a
    }

    pub fn min_side(&self) -> usize {
        self.side_a.len().min(self.side_b.len())
    }
}

/// Forward closure of `in_a` along forbidden arcs: if `u` is in `A` and
/// `u -> v` is forbidden, `v` joins `A`.
pub(crate) fn close_forward(inst: &CutInstance, in_a: &mut [bool]) {
    let mut adj = vec![Vec::new(); inst.n];
    for &(u, v) in &inst.forbidden {
        adj[u].push(v);
    }
    let mut stack: Vec<usize> = (0..inst.n).filter(|&v| in_a[v]).collect();
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !in_a[v] {
                in_a[v] = true;
                stack.push(v);
            }
        }
    }
}

/// Backward closure of the complement: if `v` is in `B` and `u -> v` is
/// forbidden, `u` leaves `A`.
pub(crate) fn close_backward(inst: &CutInstance, in_a: &mut [bool]) {
    let mut radj = vec![Vec::new(); inst.n];
    for &(u, v) in &inst.forbidden {
        radj[v].push(u);
    }
    let mut stack: Vec<usize> = (0..inst.n).filter(|&v| !in_a[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in &radj[v] {
            if in_a[u] {
                in_a[u] = false;
                stack.push(u);
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod test_instances {
    use super::CutInstance;

    /// Bidirected cycle on `n` nodes with unit weights.
    pub fn bidirected_cycle(n: usize, c: f64) -> CutInstance {
        let mut inst = CutInstance::new(n, c).unwrap();
        for i in 0..n {
            let j = (i + 1) % n;
            inst.add_arc(i, j, 1.0);
            inst.add_arc(j, i, 1.0);
        }
        inst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_side_rounding() {
        let inst = CutInstance::new(6, 1.0 / 3.0).unwrap();
        assert_eq!(inst.min_side(), 2);
        assert_eq!(inst.min_side_relaxed(), 1);
        assert!(CutInstance::new(3, 0.7).is_err());
        assert!(CutInstance::new(3, 0.0).is_err());
    }

    #[test]
    fn closures() {
        let mut inst = CutInstance::new(4, 0.5).unwrap();
        inst.add_forbidden(0, 1);
        inst.add_forbidden(1, 2);
        let mut a = vec![true, false, false, false];
        close_forward(&inst, &mut a);
        assert_eq!(a, vec![true, true, true, false]);
        let mut a = vec![true, true, false, true];
        close_backward(&inst, &mut a);
        assert_eq!(a, vec![false, false, false, true]);
        assert!(!inst.cuts_forbidden(&a));
    }
}
