//! Reduction of Morse matching (and its prescribed-edge variant) to the
//! partially rigid orientation problem (min-POP).
//!
//! The Hasse graph is turned into a gadget digraph in four steps:
//!
//! 1. every undirected Hasse edge becomes two opposite arcs;
//! 2. every arc pair is isolated on its own two cloned endpoints: a bottom
//!    node (clone of the face) and a top node (clone of the coface), joined by
//!    an up-normal arc `bottom -> top` and a down-normal arc `top -> bottom`;
//! 3. cycle rigid edges (CR) link the top of an up-edge `(a, b)` to the bottom
//!    of every up-edge `(c, d)` reachable by one down step `b -> c`, with
//!    `c != a` and `d != b`;
//! 4. matching conflicts at every Hasse node are encoded either by pairwise
//!    rigid edges (MR) or by the linear-size pseudo-FFT gadget.
//!
//! A min-POP solution picks one arc of every normal pair such that the picked
//! arcs together with all rigid edges are acyclic. Up arcs are matched Hasse
//! edges; the objective `sum_v (#down arcs at v) - (d(v) - 1)` equals the number
//! of unmatched (critical) cells.

use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{CellId, SimplicialComplex};
use crate::hasse::{HasseEdgeId, HasseGraph};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    UpNormal,
    DownNormal,
    Rigid,
    Forbidden,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::UpNormal => "UP_NORMAL",
            EdgeKind::DownNormal => "DOWN_NORMAL",
            EdgeKind::Rigid => "RIGID",
            EdgeKind::Forbidden => "FORBIDDEN",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GadgetEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: EdgeKind,
    /// Hasse edge this arc stands for (normal pairs and their prescribed
    /// rigid/forbidden replacements).
    pub origin: Option<HasseEdgeId>,
}

/// Orientation of a Hasse edge: `Up` means the face is matched to the coface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Up => Orientation::Down,
            Orientation::Down => Orientation::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetMode {
    MatchingGadget,
    /// Pseudo-FFT at Hasse nodes where it is smaller than the direct
    /// matching links (degree 8 and up), direct links elsewhere.
    PseudoFft,
    /// Pseudo-FFT at every Hasse node of degree at least two.
    PseudoFftEverywhere,
}

/// Prescribed orientations of individual Hasse edges.
///
/// A rigid prescription forces an orientation; a forbidden one excludes it,
/// which forces the opposite orientation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Prescriptions {
    pub rigid: Vec<(HasseEdgeId, Orientation)>,
    pub forbidden: Vec<(HasseEdgeId, Orientation)>,
}

impl Prescriptions {
    pub fn is_empty(&self) -> bool {
        self.rigid.is_empty() && self.forbidden.is_empty()
    }

    /// Forced orientation per Hasse edge.
    fn forced(&self, edge_count: usize) -> Result<Vec<Option<Orientation>>, GadgetError> {
        let mut forced = vec![None; edge_count];
        let rigid = self.rigid.iter().copied();
        let from_forbidden = self.forbidden.iter().map(|&(e, o)| (e, o.flip()));
        for (e, o) in rigid.chain(from_forbidden) {
            if e >= edge_count {
                return Err(GadgetError::UnknownEdge(e));
            }
            match forced[e] {
                Some(prev) if prev != o => return Err(GadgetError::ConflictingPrescription(e)),
                _ => forced[e] = Some(o),
            }
        }
        Ok(forced)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("prescription references unknown Hasse edge {0}")]
    UnknownEdge(HasseEdgeId),
    #[error("Hasse edge {0} is prescribed both up and down")]
    ConflictingPrescription(HasseEdgeId),
    #[error("prescribed rigid edges close a rigid cycle through nodes {0:?}")]
    RigidCycle(Vec<NodeId>),
    #[error("solution has {got} orientations for {expected} normal pairs")]
    WrongSize { expected: usize, got: usize },
    #[error("solution is infeasible: {0}")]
    Infeasible(String),
}

/// What a gadget node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// Clone of the face of a Hasse edge.
    Bottom(HasseEdgeId),
    /// Clone of the coface of a Hasse edge.
    Top(HasseEdgeId),
    /// Internal from-tree node of the pseudo-FFT gadget at a Hasse node.
    From { cell: CellId, level: usize, index: usize },
    /// Internal to-tree node of the pseudo-FFT gadget at a Hasse node.
    To { cell: CellId, level: usize, index: usize },
}

/// One isolated normal pair, i.e. one Hasse edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalPair {
    pub edge: HasseEdgeId,
    pub face: CellId,
    pub coface: CellId,
    pub bottom: NodeId,
    pub top: NodeId,
    pub forced: Option<Orientation>,
}

/// The arcs of the edge-duplicated Hasse graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicatedGraph {
    pub node_count: usize,
    /// `(src, dst, hasse edge, is_up)`.
    pub arcs: Vec<(CellId, CellId, HasseEdgeId, bool)>,
}

/// Replaces every undirected Hasse edge by an up arc and a down arc.
pub fn duplicate_edges(h: &HasseGraph) -> DuplicatedGraph {
    let mut arcs = Vec::with_capacity(2 * h.edge_count());
    for (id, e) in h.edges().iter().enumerate() {
        arcs.push((e.face, e.coface, id, true));
        arcs.push((e.coface, e.face, id, false));
    }
    DuplicatedGraph {
        node_count: h.node_count(),
        arcs,
    }
}

/// The disjoint union of isolated arc pairs on cloned endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedPairs {
    /// Hasse node each clone was copied from.
    pub clone_of: Vec<CellId>,
    /// Per Hasse edge: `(bottom clone, top clone)`; bottom is `2e`, top `2e+1`.
    pub pairs: Vec<(NodeId, NodeId)>,
}

impl IsolatedPairs {
    pub fn node_count(&self) -> usize {
        self.clone_of.len()
    }

    pub fn arc_count(&self) -> usize {
        2 * self.pairs.len()
    }
}

/// Gives every Hasse node one clone per incident edge so that each arc pair
/// sits on its own two nodes.
pub fn isolate_edge_pairs(h1: &DuplicatedGraph) -> IsolatedPairs {
    let edge_count = h1.arcs.len() / 2;
    let mut clone_of = vec![0; 2 * edge_count];
    let mut pairs = vec![(0, 0); edge_count];
    for &(src, dst, e, up) in &h1.arcs {
        if up {
            clone_of[2 * e] = src;
            clone_of[2 * e + 1] = dst;
            pairs[e] = (2 * e, 2 * e + 1);
        }
    }
    IsolatedPairs { clone_of, pairs }
}

/// Cycle rigid edges: `top(i) -> bottom(j)` whenever up-edge `i = (a, b)` and
/// up-edge `j = (c, d)` are joined by the down step `b -> c`, `c != a`,
/// `d != b`. Returned as `(from edge i, to edge j)`.
pub fn cycle_gadget_links(h: &HasseGraph, k: &SimplicialComplex) -> Vec<(HasseEdgeId, HasseEdgeId)> {
    let mut links = Vec::new();
    for (i, ei) in h.edges().iter().enumerate() {
        for &c in k.faces(ei.coface) {
            if c == ei.face {
                continue;
            }
            for &j in h.incident(c) {
                let ej = h.edge(j);
                if ej.face == c && ej.coface != ei.coface {
                    links.push((i, j));
                }
            }
        }
    }
    links
}

/// Matching rigid edges: for every Hasse node and every ordered pair of
/// distinct incident edges `(i, j)`, a rigid edge `top(i) -> bottom(j)`.
pub fn matching_gadget_links(h: &HasseGraph) -> Vec<(HasseEdgeId, HasseEdgeId)> {
    let mut links = Vec::new();
    for v in 0..h.node_count() {
        let inc = h.incident(v);
        for &i in inc {
            for &j in inc {
                if i != j {
                    links.push((i, j));
                }
            }
        }
    }
    links
}

/// A pseudo-FFT gadget over `N` isolated pairs at one Hasse node.
///
/// Level 1 of the from-tree is the list of pair tops, level 1 of the to-tree
/// the list of pair bottoms. Each further level pairs up neighbours left to
/// right (label merging); an odd last node is carried up alone (direct label
/// inheritance). Levels are built until a level has two nodes. Binary
/// complements at every level receive mirrored cross arcs `F_i -> T_{i+1}`,
/// `F_{i+1} -> T_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoFft {
    pub from_levels: Vec<Vec<NodeId>>,
    pub to_levels: Vec<Vec<NodeId>>,
    /// Leaf indices covered by each from-node (same shape as `from_levels`);
    /// the to-tree uses identical labels.
    pub labels: Vec<Vec<Vec<usize>>>,
    pub arcs: Vec<(NodeId, NodeId)>,
}

impl PseudoFft {
    pub fn level_count(&self) -> usize {
        self.from_levels.len()
    }

    pub fn internal_node_count(&self) -> usize {
        self.from_levels.iter().skip(1).map(Vec::len).sum::<usize>()
            + self.to_levels.iter().skip(1).map(Vec::len).sum::<usize>()
    }
}

/// Internal nodes plus arcs of the pseudo-FFT gadget over `n` pairs.
pub fn pseudo_fft_size(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    let (mut size, mut m) = (0, n);
    loop {
        size += 2 * (m / 2);
        if m <= 2 {
            return size;
        }
        let next = m.div_ceil(2);
        size += 2 * next + 2 * m;
        m = next;
    }
}

/// Builds the pseudo-FFT gadget for pairs with the given tops and bottoms.
/// New internal nodes are numbered from `*next_node` upward. Returns `None`
/// for fewer than two pairs, where no matching conflict can arise.
pub fn build_pseudo_fft(tops: &[NodeId], bottoms: &[NodeId], next_node: &mut NodeId) -> Option<PseudoFft> {
    assert_eq!(tops.len(), bottoms.len());
    let n = tops.len();
    if n < 2 {
        return None;
    }
    let mut from_levels = vec![tops.to_vec()];
    let mut to_levels = vec![bottoms.to_vec()];
    let mut labels: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
    let mut arcs = Vec::new();
    loop {
        let level = from_levels.len() - 1;
        let cur_from = from_levels[level].clone();
        let cur_to = to_levels[level].clone();
        let m = cur_from.len();
        // mirrored cross arcs between binary complements of this level
        let mut i = 0;
        while i + 1 < m {
            arcs.push((cur_from[i], cur_to[i + 1]));
            arcs.push((cur_from[i + 1], cur_to[i]));
            i += 2;
        }
        if m <= 2 {
            break;
        }
        let mut next_from = Vec::with_capacity(m.div_ceil(2));
        let mut next_to = Vec::with_capacity(m.div_ceil(2));
        let mut next_labels = Vec::with_capacity(m.div_ceil(2));
        let mut i = 0;
        while i < m {
            let f = *next_node;
            let t = *next_node + 1;
            *next_node += 2;
            arcs.push((cur_from[i], f));
            arcs.push((t, cur_to[i]));
            let mut label = labels[level][i].clone();
            if i + 1 < m {
                arcs.push((cur_from[i + 1], f));
                arcs.push((t, cur_to[i + 1]));
                label.extend_from_slice(&labels[level][i + 1]);
            }
            next_from.push(f);
            next_to.push(t);
            next_labels.push(label);
            i += 2;
        }
        from_levels.push(next_from);
        to_levels.push(next_to);
        labels.push(next_labels);
    }
    Some(PseudoFft {
        from_levels,
        to_levels,
        labels,
        arcs,
    })
}

/// The min-POP instance produced by the reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopInstance {
    node_count: usize,
    roles: Vec<NodeRole>,
    edges: Vec<GadgetEdge>,
    pairs: Vec<NormalPair>,
    hasse_node_count: usize,
    degree_terms: Vec<usize>,
    mode: GadgetMode,
}

impl PopInstance {
    /// A hand-built instance: free pairs `(bottom, top)` and rigid arcs on
    /// `node_count` nodes. Each pair stands for its own two-cell Hasse edge.
    pub fn custom(node_count: usize, pairs: &[(NodeId, NodeId)], rigid: &[(NodeId, NodeId)]) -> Self {
        let mut roles = vec![NodeRole::Bottom(0); node_count];
        let mut edges = Vec::new();
        let mut normal = Vec::new();
        for (e, &(bottom, top)) in pairs.iter().enumerate() {
            roles[bottom] = NodeRole::Bottom(e);
            roles[top] = NodeRole::Top(e);
            edges.push(GadgetEdge { src: bottom, dst: top, kind: EdgeKind::UpNormal, origin: Some(e) });
            edges.push(GadgetEdge { src: top, dst: bottom, kind: EdgeKind::DownNormal, origin: Some(e) });
            normal.push(NormalPair { edge: e, face: 2 * e, coface: 2 * e + 1, bottom, top, forced: None });
        }
        edges.extend(rigid.iter().map(|&(src, dst)| GadgetEdge { src, dst, kind: EdgeKind::Rigid, origin: None }));
        PopInstance {
            node_count,
            roles,
            edges,
            hasse_node_count: 2 * pairs.len(),
            degree_terms: vec![1; 2 * pairs.len()],
            pairs: normal,
            mode: GadgetMode::MatchingGadget,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[GadgetEdge] {
        &self.edges
    }

    pub fn pairs(&self) -> &[NormalPair] {
        &self.pairs
    }

    pub fn role(&self, node: NodeId) -> NodeRole {
        self.roles[node]
    }

    pub fn mode(&self) -> GadgetMode {
        self.mode
    }

    /// `|E(H)|` of the source Hasse graph.
    pub fn hasse_edge_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn hasse_node_count(&self) -> usize {
        self.hasse_node_count
    }

    /// `d(v)` for every Hasse node.
    pub fn degree_terms(&self) -> &[usize] {
        &self.degree_terms
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn rigid_edges(&self) -> impl Iterator<Item = &GadgetEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Rigid)
    }

    /// Nodes plus edges of every kind.
    pub fn total_size(&self) -> usize {
        self.node_count + self.edges.len()
    }

    /// Critical-cell count of the matching that orients the given number of
    /// pairs up: `sum_v Υ(v) = |V| - 2 * #up`.
    pub fn objective_for_up_count(&self, up: usize) -> usize {
        self.hasse_node_count - 2 * up
    }

    /// One edge per line: `KIND src dst [origin]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = write!(out, "{} {} {}", e.kind.as_str(), e.src, e.dst);
            if let Some(o) = e.origin {
                let _ = write!(out, " {o}");
            }
            out.push('\n');
        }
        out
    }

    /// A rigid cycle (node sequence) if the rigid-only subgraph has one.
    pub fn rigid_cycle(&self) -> Option<Vec<NodeId>> {
        let arcs: Vec<(NodeId, NodeId)> = self.rigid_edges().map(|e| (e.src, e.dst)).collect();
        find_cycle(self.node_count, &arcs)
    }

    /// Arcs selected by an orientation: the gadget's rigid edges plus the
    /// chosen arc of every pair (prescribed pairs included).
    pub fn selected_arcs(&self, orientation: &[Orientation]) -> Vec<(NodeId, NodeId)> {
        let mut arcs: Vec<(NodeId, NodeId)> = self
            .rigid_edges()
            .filter(|e| e.origin.is_none())
            .map(|e| (e.src, e.dst))
            .collect();
        for (p, &o) in self.pairs.iter().zip(orientation) {
            arcs.push(match o {
                Orientation::Up => (p.bottom, p.top),
                Orientation::Down => (p.top, p.bottom),
            });
        }
        arcs
    }
}

impl fmt::Display for PopInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PopInstance({} nodes, {} pairs, {} rigid, {} forbidden)",
            self.node_count,
            self.pairs.len(),
            self.count_kind(EdgeKind::Rigid),
            self.count_kind(EdgeKind::Forbidden)
        )
    }
}

/// Builds the min-POP gadget for a complex, with optional prescribed
/// orientations (the prescribed-edge variant of the problem).
pub fn reduce_mmup_to_pop(
    k: &SimplicialComplex,
    mode: GadgetMode,
    extra: &Prescriptions,
) -> Result<PopInstance, GadgetError> {
    let h = HasseGraph::build(k);
    let forced = extra.forced(h.edge_count())?;
    let h1 = duplicate_edges(&h);
    let h2 = isolate_edge_pairs(&h1);

    let mut roles: Vec<NodeRole> = Vec::with_capacity(h2.node_count());
    for e in 0..h.edge_count() {
        roles.push(NodeRole::Bottom(e));
        roles.push(NodeRole::Top(e));
    }

    let mut edges = Vec::new();
    let mut pairs = Vec::with_capacity(h.edge_count());
    for (e, &(bottom, top)) in h2.pairs.iter().enumerate() {
        let he = h.edge(e);
        let (up_kind, down_kind) = match forced[e] {
            None => (EdgeKind::UpNormal, EdgeKind::DownNormal),
            Some(Orientation::Up) => (EdgeKind::Rigid, EdgeKind::Forbidden),
            Some(Orientation::Down) => (EdgeKind::Forbidden, EdgeKind::Rigid),
        };
        edges.push(GadgetEdge {
            src: bottom,
            dst: top,
            kind: up_kind,
            origin: Some(e),
        });
        edges.push(GadgetEdge {
            src: top,
            dst: bottom,
            kind: down_kind,
            origin: Some(e),
        });
        pairs.push(NormalPair {
            edge: e,
            face: he.face,
            coface: he.coface,
            bottom,
            top,
            forced: forced[e],
        });
    }

    let rigid = |src: NodeId, dst: NodeId| GadgetEdge {
        src,
        dst,
        kind: EdgeKind::Rigid,
        origin: None,
    };
    for (i, j) in cycle_gadget_links(&h, k) {
        edges.push(rigid(pairs[i].top, pairs[j].bottom));
    }

    let mut node_count = h2.node_count();
    match mode {
        GadgetMode::MatchingGadget => {
            for (i, j) in matching_gadget_links(&h) {
                edges.push(rigid(pairs[i].top, pairs[j].bottom));
            }
        }
        GadgetMode::PseudoFft | GadgetMode::PseudoFftEverywhere => {
            for v in 0..h.node_count() {
                let inc = h.incident(v);
                let d = inc.len();
                if mode == GadgetMode::PseudoFft && d * d.saturating_sub(1) <= pseudo_fft_size(d) {
                    for &i in inc {
                        for &j in inc {
                            if i != j {
                                edges.push(rigid(pairs[i].top, pairs[j].bottom));
                            }
                        }
                    }
                    continue;
                }
                let tops: Vec<NodeId> = inc.iter().map(|&e| pairs[e].top).collect();
                let bottoms: Vec<NodeId> = inc.iter().map(|&e| pairs[e].bottom).collect();
                if let Some(fft) = build_pseudo_fft(&tops, &bottoms, &mut node_count) {
                    roles.resize(node_count, NodeRole::Bottom(0));
                    for (level, (fl, tl)) in fft.from_levels.iter().zip(&fft.to_levels).enumerate().skip(1) {
                        for (index, (&fnode, &tnode)) in fl.iter().zip(tl).enumerate() {
                            roles[fnode] = NodeRole::From { cell: v, level, index };
                            roles[tnode] = NodeRole::To { cell: v, level, index };
                        }
                    }
                    edges.extend(fft.arcs.iter().map(|&(s, d)| rigid(s, d)));
                }
            }
        }
    }

    let inst = PopInstance {
        node_count,
        roles,
        edges,
        pairs,
        hasse_node_count: h.node_count(),
        degree_terms: (0..h.node_count()).map(|v| h.degree(v)).collect(),
        mode,
    };
    if !extra.is_empty() {
        if let Some(cycle) = inst.rigid_cycle() {
            return Err(GadgetError::RigidCycle(cycle));
        }
    }
    Ok(inst)
}

/// A min-POP solution: one orientation per normal pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PopSolution {
    pub orientation: Vec<Orientation>,
}

impl PopSolution {
    pub fn all(len: usize, o: Orientation) -> Self {
        PopSolution {
            orientation: vec![o; len],
        }
    }

    pub fn up_count(&self) -> usize {
        self.orientation.iter().filter(|&&o| o == Orientation::Up).count()
    }

    /// Up-normal edges excluded by this solution (pairs oriented down).
    pub fn removed(&self) -> Vec<HasseEdgeId> {
        self.orientation
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == Orientation::Down)
            .map(|(e, _)| e)
            .collect()
    }

    /// `sum_v Υ(v)` with `Υ(v) = (#incident down arcs) - (d(v) - 1)`.
    pub fn objective(&self, inst: &PopInstance) -> i64 {
        let mut down_at = vec![0i64; inst.hasse_node_count()];
        for (p, &o) in inst.pairs().iter().zip(&self.orientation) {
            if o == Orientation::Down {
                down_at[p.face] += 1;
                down_at[p.coface] += 1;
            }
        }
        inst.degree_terms()
            .iter()
            .zip(down_at)
            .map(|(&d, down)| down - (d as i64 - 1))
            .sum()
    }
}

/// Violations of a candidate solution: forced orientations ignored, or a
/// directed cycle among the selected arcs.
pub fn solution_violations(inst: &PopInstance, sol: &PopSolution) -> Result<Vec<String>, GadgetError> {
    if sol.orientation.len() != inst.pairs().len() {
        return Err(GadgetError::WrongSize {
            expected: inst.pairs().len(),
            got: sol.orientation.len(),
        });
    }
    let mut out = Vec::new();
    for (p, &o) in inst.pairs().iter().zip(&sol.orientation) {
        if let Some(f) = p.forced {
            if f != o {
                out.push(format!(
                    "pair {} is prescribed {:?} but oriented {:?}",
                    p.edge, f, o
                ));
            }
        }
    }
    if let Some(c) = find_cycle(inst.node_count(), &inst.selected_arcs(&sol.orientation)) {
        out.push(format!("directed cycle through nodes {c:?}"));
    }
    Ok(out)
}

/// Matched Hasse edges and the critical-cell count of a feasible solution.
pub fn recover_matching(inst: &PopInstance, sol: &PopSolution) -> Result<(Vec<HasseEdgeId>, usize), GadgetError> {
    let violations = solution_violations(inst, sol)?;
    if !violations.is_empty() {
        return Err(GadgetError::Infeasible(violations.join("; ")));
    }
    let matched: Vec<HasseEdgeId> = sol
        .orientation
        .iter()
        .enumerate()
        .filter(|(_, &o)| o == Orientation::Up)
        .map(|(e, _)| e)
        .collect();
    let critical = sol.objective(inst);
    debug_assert!(critical >= 0);
    Ok((matched, critical as usize))
}

/// Finds a directed cycle with an iterative DFS; returns its nodes in order.
pub fn find_cycle(n: usize, arcs: &[(NodeId, NodeId)]) -> Option<Vec<NodeId>> {
    let mut adj = vec![Vec::new(); n];
    for &(s, d) in arcs {
        adj[s].push(d);
    }
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cycle = vec![w];
                        let mut x = v;
                        while x != w {
                            cycle.push(x);
                            x = parent[x];
                        }
                        cycle[1..].reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Kahn topological order, or `None` when the arcs contain a cycle. Ties are
/// broken by smallest node id.
pub fn topological_order(n: usize, arcs: &[(NodeId, NodeId)]) -> Option<Vec<NodeId>> {
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(s, d) in arcs {
        adj[s].push(d);
        indeg[d] += 1;
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<NodeId>> =
        (0..n).filter(|&v| indeg[v] == 0).map(std::cmp::Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(std::cmp::Reverse(w));
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Nodes reachable from `start` along the given arcs.
pub fn reachable(n: usize, arcs: &[(NodeId, NodeId)], start: NodeId) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for &(s, d) in arcs {
        adj[s].push(d);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;

    fn solid_triangle() -> SimplicialComplex {
        parse_complex("0 1 2").unwrap()
    }

    #[test]
    fn duplication_and_isolation_counts() {
        let k = parse_complex("0 1").unwrap();
        let h = HasseGraph::build(&k);
        let h1 = duplicate_edges(&h);
        assert_eq!(h1.arcs.len(), 4);
        let h2 = isolate_edge_pairs(&h1);
        assert_eq!(h2.node_count(), 4);
        assert_eq!(h2.arc_count(), 4);

        let k = solid_triangle();
        let h = HasseGraph::build(&k);
        let h1 = duplicate_edges(&h);
        assert_eq!(h1.arcs.len(), 18);
        let h2 = isolate_edge_pairs(&h1);
        assert_eq!(h2.node_count(), 2 * h.edge_count());
        // each cell has one clone per incident edge
        for v in 0..h.node_count() {
            let clones = h2.clone_of.iter().filter(|&&c| c == v).count();
            assert_eq!(clones, h.degree(v));
        }
    }

    #[test]
    fn single_edge_isolation() {
        let k = parse_complex("0").unwrap();
        let h = HasseGraph::build(&k);
        let h2 = isolate_edge_pairs(&duplicate_edges(&h));
        assert_eq!(h2.node_count(), 0);
    }

    #[test]
    fn cycle_gadget_on_hexagon() {
        // the triangle boundary's Hasse graph is a hexagon alternating
        // vertices and edges
        let k = parse_complex("0 1\n1 2\n0 2").unwrap();
        let h = HasseGraph::build(&k);
        let links = cycle_gadget_links(&h, &k);
        assert_eq!(links.len(), 6);
        // every up-edge has exactly one successor and one predecessor, and the
        // successor relation splits into two 3-cycles
        let mut succ = vec![usize::MAX; h.edge_count()];
        for &(i, j) in &links {
            assert_eq!(succ[i], usize::MAX);
            succ[i] = j;
        }
        for start in 0..h.edge_count() {
            let mut x = start;
            for _ in 0..3 {
                x = succ[x];
            }
            assert_eq!(x, start);
            assert_ne!(succ[start], start);
        }
    }

    #[test]
    fn cycle_gadget_on_path_and_single_pair() {
        // path a - B - c: vertex 0, edge 01, vertex 1 ; the up-edge (0, 01)
        // reaches (1, 12) through the down step 01 -> 1
        let k = parse_complex("0 1\n1 2").unwrap();
        let h = HasseGraph::build(&k);
        let links = cycle_gadget_links(&h, &k);
        let e01 = k.id_of(&[0, 1]).unwrap();
        let e12 = k.id_of(&[1, 2]).unwrap();
        let i = h.find_edge(0, e01).unwrap();
        let j = h.find_edge(1, e12).unwrap();
        assert!(links.contains(&(i, j)));
        let single = parse_complex("0 1").unwrap();
        let hs = HasseGraph::build(&single);
        assert!(cycle_gadget_links(&hs, &single).is_empty());
    }

    #[test]
    fn matching_gadget_counts() {
        // vertex 0 of a star with k edges carries k(k-1) MR edges
        for kdeg in 2..6u32 {
            let text: String = (1..=kdeg).map(|i| format!("0 {i}\n")).collect();
            let k = parse_complex(&text).unwrap();
            let h = HasseGraph::build(&k);
            let at_zero = matching_gadget_links(&h)
                .iter()
                .filter(|&&(i, j)| h.edge(i).face == 0 && h.edge(j).face == 0)
                .count();
            assert_eq!(at_zero, (kdeg * (kdeg - 1)) as usize);
        }
        let k = parse_complex("0 1\n0 2").unwrap();
        let h = HasseGraph::build(&k);
        let at_zero: Vec<_> = matching_gadget_links(&h)
            .into_iter()
            .filter(|&(i, j)| h.edge(i).face == 0 && h.edge(j).face == 0)
            .collect();
        assert_eq!(at_zero.len(), 2);
    }

    fn fft_reach(n: usize) -> (PseudoFft, Vec<NodeId>, Vec<NodeId>, usize) {
        let tops: Vec<NodeId> = (0..n).map(|i| 2 * i + 1).collect();
        let bottoms: Vec<NodeId> = (0..n).map(|i| 2 * i).collect();
        let mut next = 2 * n;
        let fft = build_pseudo_fft(&tops, &bottoms, &mut next).unwrap();
        (fft, tops, bottoms, next)
    }

    #[test]
    fn pseudo_fft_two_pairs() {
        let (fft, tops, bottoms, next) = fft_reach(2);
        assert_eq!(next, 4);
        assert_eq!(fft.level_count(), 1);
        assert_eq!(fft.arcs, vec![(tops[0], bottoms[1]), (tops[1], bottoms[0])]);
        assert!(build_pseudo_fft(&[1], &[0], &mut 2).is_none());
    }

    #[test]
    fn pseudo_fft_sixteen_pairs_levels() {
        let (fft, ..) = fft_reach(16);
        let sizes: Vec<usize> = fft.from_levels.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![16, 8, 4, 2]);
        assert_eq!(sizes.iter().sum::<usize>(), 30);
    }

    #[test]
    fn pseudo_fft_dominates_exactly_the_other_bottoms() {
        for n in 2..=20 {
            let (fft, tops, bottoms, total) = fft_reach(n);
            for i in 0..n {
                let seen = reachable(total, &fft.arcs, tops[i]);
                for j in 0..n {
                    assert_eq!(seen[bottoms[j]], i != j, "n={n} i={i} j={j}");
                }
            }
            assert!(find_cycle(total, &fft.arcs).is_none());
        }
    }

    #[test]
    fn pseudo_fft_nine_pairs_mix_merging_and_inheritance() {
        let (fft, tops, bottoms, total) = fft_reach(9);
        let sizes: Vec<usize> = fft.from_levels.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![9, 5, 3, 2]);
        // level 2 node 5 inherits the single leaf 8 directly
        assert_eq!(fft.labels[1][4], vec![8]);
        assert_eq!(fft.labels[1][0], vec![0, 1]);
        assert_eq!(fft.labels[3][0], vec![0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(fft.labels[3][1], vec![8]);
        let mut dominations = 0;
        for &t in &tops {
            let seen = reachable(total, &fft.arcs, t);
            dominations += bottoms.iter().filter(|&&b| seen[b]).count();
        }
        assert_eq!(dominations, 72);
    }

    #[test]
    fn pseudo_fft_label_inheritance() {
        let (fft, ..) = fft_reach(11);
        for l in 1..fft.level_count() {
            let mut covered: Vec<usize> = fft.labels[l].iter().flatten().copied().collect();
            covered.sort_unstable();
            assert_eq!(covered, (0..11).collect::<Vec<_>>());
        }
    }

    #[test]
    fn reduce_has_no_rigid_cycle_and_is_linear() {
        let k = parse_complex("0 1 2\n0 1 3\n0 2 3\n1 2 3").unwrap();
        for mode in [GadgetMode::MatchingGadget, GadgetMode::PseudoFft, GadgetMode::PseudoFftEverywhere] {
            let inst = reduce_mmup_to_pop(&k, mode, &Prescriptions::default()).unwrap();
            assert!(inst.rigid_cycle().is_none());
            assert_eq!(inst.count_kind(EdgeKind::UpNormal), 24);
            assert_eq!(inst.count_kind(EdgeKind::DownNormal), 24);
        }
        let inst = reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &Prescriptions::default()).unwrap();
        assert!(inst.count_kind(EdgeKind::Rigid) <= 15 * inst.hasse_edge_count());
    }

    #[test]
    fn size_formula_matches_construction() {
        for n in 0..40 {
            let tops: Vec<NodeId> = (0..n).collect();
            let bottoms: Vec<NodeId> = (n..2 * n).collect();
            let mut next = 2 * n;
            let size = build_pseudo_fft(&tops, &bottoms, &mut next).map_or(0, |f| f.internal_node_count() + f.arcs.len());
            assert_eq!(pseudo_fft_size(n), size, "n = {n}");
        }
        // direct links win below degree 8
        assert!(pseudo_fft_size(7) > 42 && pseudo_fft_size(8) < 56);
    }

    #[test]
    fn mixed_gadget_uses_trees_only_at_high_degree() {
        // vertex 0 has degree 9: the only node that gets a tree
        let star: String = (1..=9).map(|i| format!("0 {i}\n")).collect();
        let k = parse_complex(&star).unwrap();
        let inst = reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &Prescriptions::default()).unwrap();
        let mut next = 0;
        let tree = build_pseudo_fft(&[0; 9], &[0; 9], &mut next).unwrap();
        assert_eq!(inst.node_count(), 2 * 18 + tree.internal_node_count());
        let low = parse_complex("0 1\n0 2\n0 3").unwrap();
        let inst = reduce_mmup_to_pop(&low, GadgetMode::PseudoFft, &Prescriptions::default()).unwrap();
        assert_eq!(inst.node_count(), 2 * 6);
        let all = reduce_mmup_to_pop(&low, GadgetMode::PseudoFftEverywhere, &Prescriptions::default()).unwrap();
        assert!(all.node_count() > 2 * 6);
    }

    #[test]
    fn objective_matches_upsilon() {
        let k = parse_complex("0 1").unwrap();
        let inst = reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &Prescriptions::default()).unwrap();
        let all_down = PopSolution::all(2, Orientation::Down);
        assert_eq!(recover_matching(&inst, &all_down).unwrap().1, 3);
        // match vertex 0 with the edge: vertex 1 stays critical
        let e = HasseGraph::build(&k).find_edge(0, 2).unwrap();
        let mut sol = all_down.clone();
        sol.orientation[e] = Orientation::Up;
        let (matched, critical) = recover_matching(&inst, &sol).unwrap();
        assert_eq!(matched, vec![e]);
        assert_eq!(critical, 1);
        assert_eq!(critical, inst.objective_for_up_count(sol.up_count()));
        // both up is a matching conflict at the edge
        let both = PopSolution::all(2, Orientation::Up);
        assert!(matches!(recover_matching(&inst, &both), Err(GadgetError::Infeasible(_))));
    }

    #[test]
    fn single_vertex_objective() {
        let k = parse_complex("0").unwrap();
        let inst = reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &Prescriptions::default()).unwrap();
        assert_eq!(inst.node_count(), 0);
        assert_eq!(recover_matching(&inst, &PopSolution::all(0, Orientation::Up)).unwrap().1, 1);
    }

    #[test]
    fn prescriptions() {
        let k = parse_complex("0 1\n1 2").unwrap();
        let h = HasseGraph::build(&k);
        let e01 = k.id_of(&[0, 1]).unwrap();
        let a = h.find_edge(0, e01).unwrap();
        let b = h.find_edge(1, e01).unwrap();
        let ok = Prescriptions {
            rigid: vec![(a, Orientation::Up)],
            forbidden: vec![(b, Orientation::Up)],
        };
        let inst = reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &ok).unwrap();
        assert_eq!(inst.pairs()[a].forced, Some(Orientation::Up));
        assert_eq!(inst.pairs()[b].forced, Some(Orientation::Down));
        assert_eq!(inst.count_kind(EdgeKind::Forbidden), 2);

        let conflict = Prescriptions {
            rigid: vec![(a, Orientation::Up), (b, Orientation::Up)],
            forbidden: vec![],
        };
        assert!(matches!(
            reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &conflict),
            Err(GadgetError::RigidCycle(_))
        ));
        let both = Prescriptions {
            rigid: vec![(a, Orientation::Up)],
            forbidden: vec![(a, Orientation::Up)],
        };
        assert_eq!(
            reduce_mmup_to_pop(&k, GadgetMode::PseudoFft, &both).unwrap_err(),
            GadgetError::ConflictingPrescription(a)
        );
    }

    #[test]
    fn dump_format() {
        let k = parse_complex("0 1").unwrap();
        let inst = reduce_mmup_to_pop(&k, GadgetMode::MatchingGadget, &Prescriptions::default()).unwrap();
        let dump = inst.dump();
        assert!(dump.starts_with("UP_NORMAL 0 1 0\nDOWN_NORMAL 1 0 0\n"));
        assert!(dump.lines().any(|l| l.starts_with("RIGID ")));
    }

    #[test]
    fn find_cycle_and_topo() {
        assert!(find_cycle(3, &[(0, 1), (1, 2)]).is_none());
        let c = find_cycle(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(topological_order(3, &[(2, 1), (1, 0)]), Some(vec![2, 1, 0]));
        assert!(topological_order(2, &[(0, 1), (1, 0)]).is_none());
    }
}
