use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{CutError, CutInstance, DirectedCut};

/// Heuristic c-balanced cut: sweep split points of a few topological orders
/// of the forbidden arcs (prefix is `B`, suffix is `A`, so forbidden arcs
/// always point from `B` to `A` or stay inside a side), then improve by
/// single-vertex moves.
pub fn greedy_dbcre(inst: &CutInstance) -> Result<DirectedCut, CutError> {
    let n = inst.n;
    let k = inst.min_side();
    if n < 2 * k || n < 2 {
        return Err(CutError::Infeasible);
    }
    let mut best: Option<(f64, Vec<bool>)> = None;
    for order in candidate_orders(inst)? {
        let (cost, split) = best_split(inst, &order, k);
        if best.as_ref().is_none_or(|(b, _)| cost < *b - 1e-12) {
            let mut in_a = vec![false; n];
            for &v in &order[split..] {
                in_a[v] = true;
            }
            best = Some((cost, in_a));
        }
    }
    let (_, mut in_a) = best.ok_or(CutError::Infeasible)?;
    improve(inst, &mut in_a, k);
    Ok(DirectedCut::from_membership(inst, &in_a))
}

fn candidate_orders(inst: &CutInstance) -> Result<Vec<Vec<usize>>, CutError> {
    let n = inst.n;
    let mut out_w = vec![0.0; n];
    let mut in_w = vec![0.0; n];
    let mut wadj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for a in &inst.arcs {
        out_w[a.src] += a.weight;
        in_w[a.dst] += a.weight;
        wadj[a.src].push((a.dst, a.weight));
        wadj[a.dst].push((a.src, -a.weight));
    }
    let by_id = kahn(inst, |v| Reverse(v as i64))?;
    let static_score: Vec<i64> = (0..n).map(|v| ((out_w[v] - in_w[v]) * 1024.0).round() as i64).collect();
    let by_score = kahn(inst, |v| (static_score[v], Reverse(v)))?;
    let dynamic = dynamic_order(inst, &wadj)?;
    Ok(vec![by_id, by_score, dynamic])
}

/// Kahn's algorithm over forbidden arcs, popping the ready vertex with the
/// largest key.
fn kahn<K: Ord>(inst: &CutInstance, key: impl Fn(usize) -> K) -> Result<Vec<usize>, CutError> {
    let n = inst.n;
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(u, v) in &inst.forbidden {
        adj[u].push(v);
        indeg[v] += 1;
    }
    let mut heap: BinaryHeap<(K, usize)> = (0..n).filter(|&v| indeg[v] == 0).map(|v| (key(v), v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = heap.pop() {
        order.push(v);
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push((key(w), w));
            }
        }
    }
    if order.len() != n {
        return Err(CutError::ForbiddenCycle);
    }
    Ok(order)
}

/// Topological order that repeatedly places the ready vertex with the largest
/// outgoing minus incoming weight towards unplaced vertices.
fn dynamic_order(inst: &CutInstance, wadj: &[Vec<(usize, f64)>]) -> Result<Vec<usize>, CutError> {
    let n = inst.n;
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(u, v) in &inst.forbidden {
        adj[u].push(v);
        indeg[v] += 1;
    }
    let mut score: Vec<f64> = (0..n).map(|v| wadj[v].iter().map(|&(_, w)| w).sum()).collect();
    let mut ready: Vec<bool> = (0..n).map(|v| indeg[v] == 0).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| ready[v] && !placed[v])
            .max_by(|&a, &b| score[a].total_cmp(&score[b]).then(b.cmp(&a)));
        let Some(v) = next else {
            return Err(CutError::ForbiddenCycle);
        };
        placed[v] = true;
        order.push(v);
        for &(u, w) in &wadj[v] {
            // the arc between u and v no longer points to an unplaced vertex
            score[u] += w;
        }
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready[w] = true;
            }
        }
    }
    Ok(order)
}

/// Best split `order[..s]` = B, `order[s..]` = A with both sides `>= k`.
fn best_split(inst: &CutInstance, order: &[usize], k: usize) -> (f64, usize) {
    let n = inst.n;
    let mut out_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut in_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for a in &inst.arcs {
        out_adj[a.src].push((a.dst, a.weight));
        in_adj[a.dst].push((a.src, a.weight));
    }
    let mut in_b = vec![false; n];
    let mut cost = 0.0;
    let mut best = (f64::INFINITY, k);
    for (s, &v) in order.iter().enumerate().take(n - k) {
        // move v from A to B
        for &(u, w) in &in_adj[v] {
            if !in_b[u] && u != v {
                cost += w;
            }
        }
        for &(x, w) in &out_adj[v] {
            if in_b[x] {
                cost -= w;
            }
        }
        in_b[v] = true;
        let split = s + 1;
        if split >= k && cost < best.0 - 1e-12 {
            best = (cost, split);
        }
    }
    best
}

fn improve(inst: &CutInstance, in_a: &mut [bool], k: usize) {
    let n = inst.n;
    let mut adj: Vec<Vec<(usize, f64, bool)>> = vec![Vec::new(); n];
    for a in &inst.arcs {
        adj[a.src].push((a.dst, a.weight, true));
        adj[a.dst].push((a.src, a.weight, false));
    }
    let mut size_a = in_a.iter().filter(|&&x| x).count();
    for _ in 0..4 * n {
        let mut improved = false;
        for v in 0..n {
            let to_a = !in_a[v];
            let (new_a, new_b) = if to_a {
                (size_a + 1, n - size_a - 1)
            } else {
                (size_a - 1, n - size_a + 1)
            };
            if new_a < k || new_b < k {
                continue;
            }
            let mut delta = 0.0;
            for &(u, w, out) in &adj[v] {
                if u == v {
                    continue;
                }
                let (src_a, dst_a) = if out { (in_a[v], in_a[u]) } else { (in_a[u], in_a[v]) };
                let before = src_a && !dst_a;
                let (src_a2, dst_a2) = if out { (to_a, in_a[u]) } else { (in_a[u], to_a) };
                let after = src_a2 && !dst_a2;
                delta += w * (after as i32 - before as i32) as f64;
            }
            if delta < -1e-12 {
                in_a[v] = to_a;
                if inst.cuts_forbidden(in_a) {
                    in_a[v] = !to_a;
                    continue;
                }
                size_a = new_a;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::exact_dbcre;
    use crate::cut::test_instances::bidirected_cycle;

    #[test]
    fn cycle_matches_exact() {
        let inst = bidirected_cycle(8, 1.0 / 3.0);
        let g = greedy_dbcre(&inst).unwrap();
        assert_eq!(g.cost, exact_dbcre(&inst).unwrap().cost);
    }

    #[test]
    fn respects_forbidden_and_balance() {
        let mut inst = bidirected_cycle(10, 0.4);
        inst.add_forbidden(3, 7);
        inst.add_forbidden(7, 1);
        let g = greedy_dbcre(&inst).unwrap();
        assert!(!inst.cuts_forbidden(&g.membership(10)));
        assert!(g.min_side() >= inst.min_side());
    }

    #[test]
    fn forbidden_cycle_reported() {
        let mut inst = CutInstance::new(3, 0.3).unwrap();
        inst.add_forbidden(0, 1);
        inst.add_forbidden(1, 0);
        assert_eq!(greedy_dbcre(&inst), Err(CutError::ForbiddenCycle));
    }

    #[test]
    fn dag_costs_nothing() {
        let mut inst = CutInstance::new(6, 0.5).unwrap();
        for i in 0..5 {
            inst.add_arc(i, i + 1, 1.0);
        }
        assert_eq!(greedy_dbcre(&inst).unwrap().cost, 0.0);
    }
}
