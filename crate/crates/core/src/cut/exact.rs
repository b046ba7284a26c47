use super::{CutError, CutInstance, DirectedCut};

pub const MAX_EXACT_CUT: usize = 22;

/// Exhaustive minimum directed c-balanced cut. Both sides hold at least
/// `ceil(c n)` vertices and no forbidden arc is cut. Among equal costs the
/// smallest bitmask of `A` wins.
pub fn exact_dbcre(inst: &CutInstance) -> Result<DirectedCut, CutError> {
    let n = inst.n;
    if n > MAX_EXACT_CUT {
        return Err(CutError::TooLarge { n, max: MAX_EXACT_CUT });
    }
    let k = inst.min_side();
    let arcs: Vec<(u32, u32, f64)> = inst
        .arcs
        .iter()
        .map(|a| (1u32 << a.src, 1u32 << a.dst, a.weight))
        .collect();
    let forbidden: Vec<(u32, u32)> = inst.forbidden.iter().map(|&(u, v)| (1u32 << u, 1u32 << v)).collect();
    let mut best: Option<(f64, u32)> = None;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < k || n - size < k {
            continue;
        }
        if forbidden.iter().any(|&(u, v)| mask & u != 0 && mask & v == 0) {
            continue;
        }
        let cost: f64 = arcs
            .iter()
            .filter(|&&(u, v, _)| mask & u != 0 && mask & v == 0)
            .map(|&(_, _, w)| w)
            .sum();
        if best.is_none_or(|(b, _)| cost < b - 1e-12) {
            best = Some((cost, mask));
        }
    }
    let (_, mask) = best.ok_or(CutError::Infeasible)?;
    let in_a: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
    Ok(DirectedCut::from_membership(inst, &in_a))
}
