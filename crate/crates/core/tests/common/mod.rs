#![allow(dead_code)]

use dmt_core::complex::{parse_complex, CellId, SimplicialComplex};
use dmt_core::gadget::{find_cycle, reduce_mmup_to_pop, GadgetMode, Prescriptions};
use dmt_core::pop::exact_min_pop;
use dmt_core::persistence::Filtration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SOLID_TRI: &str = "0 1 2";
pub const TRI_BOUNDARY: &str = "0 1\n1 2\n0 2";
pub const PATH3: &str = "0 1\n1 2\n2 3";
pub const PATH4: &str = "0 1\n1 2\n2 3\n3 4";
pub const STRIP: &str = "0 1 2\n1 2 3";
pub const TET_BOUNDARY: &str = "0 1 2\n0 1 3\n0 2 3\n1 2 3";
/// Four vertices, five edges, one triangle (the complex with a printed
/// boundary operator).
pub const FIG_X: &str = "0 1 2\n1 3\n2 3";
pub const RP2: &str = "1 2 3\n1 3 4\n1 4 5\n1 5 6\n1 6 2\n2 3 5\n3 4 6\n4 5 2\n5 6 3\n6 2 4";

/// Complexes of at most 20 cells.
pub fn small_corpus() -> Vec<(&'static str, SimplicialComplex)> {
    [
        ("solid_tri", SOLID_TRI),
        ("tri_boundary", TRI_BOUNDARY),
        ("path3", PATH3),
        ("path4", PATH4),
        ("strip", STRIP),
        ("tet_boundary", TET_BOUNDARY),
        ("fig_x", FIG_X),
    ]
    .into_iter()
    .map(|(n, t)| (n, parse_complex(t).unwrap()))
    .collect()
}

/// All acyclic matchings, visited by backtracking over Hasse edges.
pub fn for_each_acyclic_matching(k: &SimplicialComplex, f: impl FnMut(&[(CellId, CellId)])) {
    for_each_acyclic_matching_where(k, |_, _| true, f)
}

/// As [`for_each_acyclic_matching`], using only pairs accepted by `allow`.
pub fn for_each_acyclic_matching_where(
    k: &SimplicialComplex,
    allow: impl Fn(CellId, CellId) -> bool,
    mut f: impl FnMut(&[(CellId, CellId)]),
) {
    let edges: Vec<(CellId, CellId)> = (0..k.len())
        .flat_map(|c| k.faces(c).iter().map(move |&fc| (fc, c)))
        .filter(|&(a, b)| allow(a, b))
        .collect();
    fn rec(
        k: &SimplicialComplex,
        edges: &[(CellId, CellId)],
        i: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(CellId, CellId)>,
        f: &mut dyn FnMut(&[(CellId, CellId)]),
    ) {
        if i == edges.len() {
            f(cur);
            return;
        }
        rec(k, edges, i + 1, used, cur, f);
        let (a, b) = edges[i];
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            cur.push((a, b));
            if is_acyclic(k, cur) {
                rec(k, edges, i + 1, used, cur, f);
            }
            cur.pop();
            used[a] = false;
            used[b] = false;
        }
    }
    let mut used = vec![false; k.len()];
    rec(k, &edges, 0, &mut used, &mut Vec::new(), &mut f);
}

pub fn is_acyclic(k: &SimplicialComplex, m: &[(CellId, CellId)]) -> bool {
    let mut arcs = Vec::new();
    for c in 0..k.len() {
        for &f in k.faces(c) {
            if m.contains(&(f, c)) {
                arcs.push((f, c));
            } else {
                arcs.push((c, f));
            }
        }
    }
    find_cycle(k.len(), &arcs).is_none()
}

/// Minimum number of critical cells over all acyclic matchings.
pub fn brute_force_optimum(k: &SimplicialComplex) -> usize {
    let mut best = usize::MAX;
    for_each_acyclic_matching(k, |m| best = best.min(k.len() - 2 * m.len()));
    best
}

/// Random flag-free 2-complex: `n` vertices, random triangles plus their
/// faces and some extra edges.
pub fn random_complex(seed: u64, n: u32, triangles: usize, edges: usize) -> SimplicialComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tops: Vec<Vec<u32>> = (0..n).map(|v| vec![v]).collect();
    for _ in 0..triangles {
        let mut t = [rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)];
        t.sort();
        if t[0] != t[1] && t[1] != t[2] {
            tops.push(t.to_vec());
        }
    }
    for _ in 0..edges {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            tops.push(vec![a.min(b), a.max(b)]);
        }
    }
    SimplicialComplex::from_simplices(tops).unwrap()
}

/// Random filtration of a random complex: vertex values are random, every
/// other simplex enters at the maximum of its faces plus a random delay.
/// Values are multiples of 1/8, so ties across dimensions are common.
pub fn random_filtration(seed: u64, n: u32, triangles: usize, edges: usize) -> Filtration {
    let k = random_complex(seed, n, triangles, edges);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut val = vec![0.0f64; k.len()];
    for c in 0..k.len() {
        let base = k.faces(c).iter().map(|&f| val[f]).fold(0.0, f64::max);
        val[c] = base + rng.random_range(0..4u32) as f64 / 8.0;
    }
    Filtration::new((0..k.len()).map(|c| (k.vertices(c).to_vec(), val[c])).collect()).unwrap()
}

/// Complexes of at most 20 Hasse edges, small enough to enumerate orientations.
pub fn tiny_corpus() -> Vec<(&'static str, SimplicialComplex)> {
    [
        ("vertex", "0"),
        ("edge", "0 1"),
        ("two_vertices", "0\n1"),
        ("wedge", "0 1\n0 2"),
        ("star", "0 1\n0 2\n0 3"),
        ("solid_tri", SOLID_TRI),
        ("tri_boundary", TRI_BOUNDARY),
        ("path3", PATH3),
        ("path4", PATH4),
        ("square", "0 1\n1 2\n2 3\n0 3"),
        ("tri_with_tail", "0 1\n1 2\n0 2\n2 3"),
        ("two_loops", "0 1\n1 2\n0 2\n0 3\n3 4\n0 4"),
        ("star8", "0 1\n0 2\n0 3\n0 4\n0 5\n0 6\n0 7\n0 8"),
        ("star8_loop", "0 1\n0 2\n0 3\n0 4\n0 5\n0 6\n0 7\n0 8\n1 2"),
    ]
    .into_iter()
    .map(|(n, t)| (n, parse_complex(t).unwrap()))
    .collect()
}

/// Minimum POP objective by trying every orientation of the normal pairs;
/// also checks the branch-and-bound solver against it.
pub fn enumerate_min_pop(k: &SimplicialComplex, mode: GadgetMode) -> usize {
    let inst = reduce_mmup_to_pop(k, mode, &Prescriptions::default()).unwrap();
    let rigid: Vec<(usize, usize)> = inst.rigid_edges().map(|e| (e.src, e.dst)).collect();
    let pairs: Vec<(usize, usize)> = inst.pairs().iter().map(|p| (p.bottom, p.top)).collect();
    let mut best = usize::MAX;
    for mask in 0u32..(1 << pairs.len()) {
        let mut arcs = rigid.clone();
        let mut up = 0;
        for (i, &(b, t)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                arcs.push((b, t));
                up += 1;
            } else {
                arcs.push((t, b));
            }
        }
        if find_cycle(inst.node_count(), &arcs).is_none() {
            best = best.min(inst.objective_for_up_count(up));
        }
    }
    let up = exact_min_pop(inst.node_count(), &rigid, &pairs).unwrap();
    assert_eq!(inst.objective_for_up_count(up.iter().filter(|&&u| u).count()), best);
    best
}
