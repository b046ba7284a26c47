//! Divide-and-conquer solver for min-POP: split the gadget graph with
//! balanced directed cuts, solve the halves recursively, and concatenate
//! their linear orders. Small subproblems are solved exactly.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cut::{
    build_sdp, exact_dbcre, greedy_dbcre, mwum_search, round_arv, solve_embedding, ArvConfig, CutError,
    CutInstance, DirectedCut, EmbeddingConfig, MwumConfig,
};
use crate::gadget::{find_cycle, EdgeKind, NodeId, Orientation, PopInstance, PopSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Exact cuts while enumeration is feasible, ARV above that.
    Auto,
    Exact,
    Arv,
    Mwum,
    Greedy,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Auto => "auto",
            SolverKind::Exact => "exact",
            SolverKind::Arv => "arv",
            SolverKind::Mwum => "mwum",
            SolverKind::Greedy => "greedy",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(SolverKind::Auto),
            "exact" => Ok(SolverKind::Exact),
            "arv" => Ok(SolverKind::Arv),
            "mwum" => Ok(SolverKind::Mwum),
            "greedy" => Ok(SolverKind::Greedy),
            _ => Err(format!("unknown solver `{s}` (expected auto, exact, arv, mwum or greedy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopConfig {
    pub balance_c: f64,
    pub seed: u64,
    /// Subproblems with at most this many gadget nodes are solved exactly,
    /// unless the search exceeds `exact_budget`; then the best orientation
    /// found so far is used, or the subproblem is split if there is none.
    pub max_exact_size: usize,
    /// Branch-and-bound work limit per subproblem, in graph nodes and arcs
    /// visited. Subproblems of at most
    /// `ALWAYS_EXACT` nodes ignore it.
    pub exact_budget: u64,
    pub solver: SolverKind,
    /// Above this size the embedding-based solvers hand over to the greedy
    /// cut.
    pub sdp_max_nodes: usize,
    pub embedding: EmbeddingConfig,
    pub arv: ArvConfig,
    pub mwum: MwumConfig,
    /// Solve sibling subproblems on the rayon pool.
    pub parallel: bool,
}

impl Default for PopConfig {
    fn default() -> Self {
        PopConfig {
            balance_c: 1.0 / 3.0,
            seed: 0,
            max_exact_size: 1024,
            exact_budget: 2_000_000,
            solver: SolverKind::Auto,
            sdp_max_nodes: 48,
            embedding: EmbeddingConfig::default(),
            arv: ArvConfig::default(),
            mwum: MwumConfig::default(),
            parallel: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PopError {
    #[error("rigid edges contain a cycle through {0:?}")]
    RigidCycle(Vec<NodeId>),
    #[error("cut solver failed at depth {depth} on {size} nodes: {source}")]
    Cut {
        depth: usize,
        size: usize,
        #[source]
        source: CutError,
    },
    #[error("no feasible orientation of a {0}-node subproblem")]
    Infeasible(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceKind {
    Split {
        cut_cost: usize,
        balance: f64,
        solver: &'static str,
        /// Node ids of the children in order: sink side `B` first, then `A`.
        children: [usize; 2],
    },
    Leaf {
        removed: usize,
        exact: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    pub depth: usize,
    pub size: usize,
    /// Up-normal edges removed inside this subproblem.
    pub cost: usize,
    pub kind: TraceKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecursionTrace {
    /// Node 0 is the root when non-empty.
    pub nodes: Vec<TraceNode>,
}

impl RecursionTrace {
    pub fn total_cost(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.cost)
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().map_or(0, |d| d + 1)
    }

    /// Checks `cost = cost(B) + cost(A) + cut` at every split, children
    /// sizes summing to the parent, and (when `c` is given) both children
    /// holding at least `floor(c/2 · size)` nodes.
    pub fn check(&self, c: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if let TraceKind::Split { cut_cost, children, .. } = &n.kind {
                let [b, a] = *children;
                let (nb, na) = (&self.nodes[b], &self.nodes[a]);
                if nb.cost + na.cost + cut_cost != n.cost {
                    out.push(format!("node {i}: cost {} != {} + {} + {}", n.cost, nb.cost, na.cost, cut_cost));
                }
                if nb.size + na.size != n.size {
                    out.push(format!("node {i}: sizes {} + {} != {}", nb.size, na.size, n.size));
                }
                if let Some(c) = c {
                    let floor = (c / 2.0 * n.size as f64 + 1e-9).floor() as usize;
                    if nb.size.min(na.size) < floor {
                        out.push(format!("node {i}: child below c/2 balance"));
                    }
                }
            }
        }
        out
    }

    /// One line per node: `depth size cost kind ...`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let pad = "  ".repeat(n.depth);
            match &n.kind {
                TraceKind::Split {
                    cut_cost,
                    balance,
                    solver,
                    ..
                } => s.push_str(&format!(
                    "{pad}split size={} cost={} cut={} balance={:.3} solver={}\n",
                    n.size, n.cost, cut_cost, balance, solver
                )),
                TraceKind::Leaf { removed, exact } => s.push_str(&format!(
                    "{pad}leaf size={} removed={} exact={}\n",
                    n.size, removed, exact
                )),
            }
        }
        s
    }
}

/// Read-only view shared by all subproblems.
struct Graph<'a> {
    inst: &'a PopInstance,
    rigid_out: Vec<Vec<NodeId>>,
    /// `(pair, is_bottom)` for the endpoints of free pairs.
    pair_of: Vec<Option<(usize, bool)>>,
}

impl<'a> Graph<'a> {
    fn new(inst: &'a PopInstance) -> Self {
        let n = inst.node_count();
        let mut rigid_out = vec![Vec::new(); n];
        for e in inst.edges() {
            if e.kind == EdgeKind::Rigid {
                rigid_out[e.src].push(e.dst);
            }
        }
        let mut pair_of = vec![None; n];
        for (i, p) in inst.pairs().iter().enumerate() {
            if p.forced.is_none() {
                pair_of[p.bottom] = Some((i, true));
                pair_of[p.top] = Some((i, false));
            }
        }
        Graph {
            inst,
            rigid_out,
            pair_of,
        }
    }

    /// Local rigid arcs and free pairs `(bottom, top)` of a sorted node set.
    fn induced(&self, nodes: &[NodeId]) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let local = |g: NodeId| nodes.binary_search(&g).ok();
        let mut rigid = Vec::new();
        let mut pairs = Vec::new();
        for (i, &g) in nodes.iter().enumerate() {
            for &h in &self.rigid_out[g] {
                if let Some(j) = local(h) {
                    rigid.push((i, j));
                }
            }
            if let Some((p, true)) = self.pair_of[g] {
                if let Some(j) = local(self.inst.pairs()[p].top) {
                    pairs.push((i, j));
                }
            }
        }
        (rigid, pairs)
    }
}

fn mix_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Sub {
    order: Vec<NodeId>,
    nodes: Vec<TraceNode>,
}

/// Solves min-POP by recursive balanced cuts. The sink side `B` of every cut
/// precedes the source side `A` in the assembled order, so the cut arcs
/// `A -> B` are exactly the removed ones; rigid arcs are never cut.
pub fn solve_min_pop(inst: &PopInstance, cfg: &PopConfig) -> Result<(PopSolution, RecursionTrace), PopError> {
    if let Some(c) = inst.rigid_cycle() {
        return Err(PopError::RigidCycle(c));
    }
    let g = Graph::new(inst);
    let all: Vec<NodeId> = (0..inst.node_count()).collect();
    let sub = solve_sub(&g, cfg, all, 0, cfg.seed)?;
    let mut pos = vec![0usize; inst.node_count()];
    for (i, &v) in sub.order.iter().enumerate() {
        pos[v] = i;
    }
    let orientation = inst
        .pairs()
        .iter()
        .map(|p| match p.forced {
            Some(o) => o,
            None if pos[p.bottom] < pos[p.top] => Orientation::Up,
            None => Orientation::Down,
        })
        .collect();
    Ok((PopSolution { orientation }, RecursionTrace { nodes: sub.nodes }))
}

fn solve_sub(g: &Graph, cfg: &PopConfig, nodes: Vec<NodeId>, depth: usize, seed: u64) -> Result<Sub, PopError> {
    let size = nodes.len();
    let (rigid, pairs) = g.induced(&nodes);
    if size <= ALWAYS_EXACT || size <= cfg.max_exact_size {
        let budget = if size <= ALWAYS_EXACT { u64::MAX } else { cfg.exact_budget };
        if let Some(sub) = leaf(&nodes, &rigid, &pairs, depth, budget)? {
            return Ok(sub);
        }
    }
    let mut inst = CutInstance::new(size, cfg.balance_c).map_err(|source| PopError::Cut { depth, size, source })?;
    for &(b, t) in &pairs {
        inst.add_arc(b, t, 1.0);
    }
    for &(u, v) in &rigid {
        inst.add_forbidden(u, v);
    }
    let (cut, solver) = choose_cut(&inst, cfg, seed).map_err(|source| PopError::Cut { depth, size, source })?;
    if cut.side_a.is_empty() || cut.side_b.is_empty() || inst.cuts_forbidden(&cut.membership(size)) {
        return Err(PopError::Cut {
            depth,
            size,
            source: CutError::Infeasible,
        });
    }
    let side_b: Vec<NodeId> = cut.side_b.iter().map(|&i| nodes[i]).collect();
    let side_a: Vec<NodeId> = cut.side_a.iter().map(|&i| nodes[i]).collect();
    let (sb, sa) = (mix_seed(seed, 1), mix_seed(seed, 2));
    let (rb, ra) = if cfg.parallel && size > 256 {
        rayon::join(
            || solve_sub(g, cfg, side_b, depth + 1, sb),
            || solve_sub(g, cfg, side_a, depth + 1, sa),
        )
    } else {
        (
            solve_sub(g, cfg, side_b, depth + 1, sb),
            solve_sub(g, cfg, side_a, depth + 1, sa),
        )
    };
    let (rb, ra) = (rb?, ra?);
    let cut_cost = cut.cost.round() as usize;
    let cost = rb.nodes[0].cost + ra.nodes[0].cost + cut_cost;
    let mut out = vec![TraceNode {
        depth,
        size,
        cost,
        kind: TraceKind::Split {
            cut_cost,
            balance: cut.balance,
            solver,
            children: [1, 1 + rb.nodes.len()],
        },
    }];
    append_shifted(&mut out, rb.nodes);
    append_shifted(&mut out, ra.nodes);
    let mut order = rb.order;
    order.extend(ra.order);
    Ok(Sub { order, nodes: out })
}

fn append_shifted(out: &mut Vec<TraceNode>, nodes: Vec<TraceNode>) {
    let shift = out.len();
    out.extend(nodes.into_iter().map(|mut n| {
        if let TraceKind::Split { children, .. } = &mut n.kind {
            children[0] += shift;
            children[1] += shift;
        }
        n
    }));
}

fn choose_cut(inst: &CutInstance, cfg: &PopConfig, seed: u64) -> Result<(DirectedCut, &'static str), CutError> {
    let n = inst.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match cfg.solver {
        SolverKind::Exact | SolverKind::Auto if n <= crate::cut::exact::MAX_EXACT_CUT => {
            Ok((exact_dbcre(inst)?, "exact"))
        }
        SolverKind::Arv | SolverKind::Auto if n <= cfg.sdp_max_nodes => {
            let sdp = build_sdp(inst);
            let emb_cfg = EmbeddingConfig {
                seed,
                ..cfg.embedding.clone()
            };
            match solve_embedding(&sdp, &emb_cfg).and_then(|emb| round_arv(&emb, inst, &mut rng, &cfg.arv)) {
                Ok(cut) => Ok((cut, "arv")),
                Err(_) => Ok((greedy_dbcre(inst)?, "greedy")),
            }
        }
        SolverKind::Mwum if n <= cfg.sdp_max_nodes => match mwum_search(inst, &cfg.mwum, &mut rng) {
            Ok(s) => Ok((s.cut, "mwum")),
            Err(_) => Ok((greedy_dbcre(inst)?, "greedy")),
        },
        _ => Ok((greedy_dbcre(inst)?, "greedy")),
    }
}

/// Below this size subproblems are always solved exactly.
pub const ALWAYS_EXACT: usize = 12;

/// Exact solve, or the best orientation found when the search budget ran
/// out. `Ok(None)` when the budget ran out before any was found.
fn leaf(
    nodes: &[NodeId],
    rigid: &[(usize, usize)],
    pairs: &[(usize, usize)],
    depth: usize,
    budget: u64,
) -> Result<Option<Sub>, PopError> {
    let size = nodes.len();
    let (up, exact) = match exact_min_pop_limited(size, rigid, pairs, budget) {
        Ok(up) => (up.ok_or(PopError::Infeasible(size))?, true),
        Err(Some(up)) => (up, false),
        Err(None) => return Ok(None),
    };
    let mut arcs = rigid.to_vec();
    for (&(b, t), &u) in pairs.iter().zip(&up) {
        arcs.push(if u { (b, t) } else { (t, b) });
    }
    let order = crate::gadget::topological_order(size, &arcs).ok_or(PopError::Infeasible(size))?;
    let removed = up.iter().filter(|&&u| !u).count();
    Ok(Some(Sub {
        order: order.into_iter().map(|i| nodes[i]).collect(),
        nodes: vec![TraceNode {
            depth,
            size,
            cost: removed,
            kind: TraceKind::Leaf { removed, exact },
        }],
    }))
}

/// Exact min-POP on a small digraph: choose up (`b -> t`) or down
/// (`t -> b`) for every pair so that, together with the rigid arcs, the
/// graph is acyclic and the number of up choices is maximal. Branch and
/// bound; the bound counts still-orientable pairs, grouped into greedy
/// cliques of mutually exclusive pairs. Returns `None` when no acyclic
/// choice exists.
pub fn exact_min_pop(n: usize, rigid: &[(usize, usize)], pairs: &[(usize, usize)]) -> Option<Vec<bool>> {
    exact_min_pop_limited(n, rigid, pairs, u64::MAX).expect("unlimited search completes")
}

/// As [`exact_min_pop`], stopping once the search has visited `budget`
/// graph nodes and arcs in total. A stopped
/// search returns `Err` with the best orientation found so far.
pub fn exact_min_pop_limited(
    n: usize,
    rigid: &[(usize, usize)],
    pairs: &[(usize, usize)],
    budget: u64,
) -> Result<Option<Vec<bool>>, Option<Vec<bool>>> {
    if find_cycle(n, rigid).is_some() {
        return Ok(None);
    }
    let mut s = Bnb {
        adj: vec![Vec::new(); n],
        pairs,
        choice: vec![None; pairs.len()],
        best: None,
        best_up: 0,
        stamp: vec![0; n],
        epoch: 0,
        stack: Vec::new(),
        budget,
    };
    for &(u, v) in rigid {
        s.adj[u].push(v);
    }
    s.search(0);
    if s.budget == 0 {
        return Err(s.best);
    }
    Ok(s.best)
}

struct Bnb<'a> {
    adj: Vec<Vec<usize>>,
    pairs: &'a [(usize, usize)],
    choice: Vec<Option<bool>>,
    best: Option<Vec<bool>>,
    best_up: usize,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<usize>,
    budget: u64,
}

impl Bnb<'_> {
    fn reaches(&mut self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        self.epoch += 1;
        let e = self.epoch;
        self.stack.clear();
        self.stack.push(from);
        self.stamp[from] = e;
        while let Some(u) = self.stack.pop() {
            self.spend(self.adj[u].len() as u64 + 1);
            for i in 0..self.adj[u].len() {
                let v = self.adj[u][i];
                if v == to {
                    return true;
                }
                if self.stamp[v] != e {
                    self.stamp[v] = e;
                    self.stack.push(v);
                }
            }
        }
        false
    }

    fn reach_set(&mut self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            self.spend(self.adj[u].len() as u64 + 1);
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn spend(&mut self, w: u64) {
        self.budget = self.budget.saturating_sub(w);
    }

    fn ups(&self) -> usize {
        self.choice.iter().filter(|c| **c == Some(true)).count()
    }

    /// Upper bound on further up choices.
    fn bound(&mut self) -> usize {
        let mut live = Vec::new();
        for j in 0..self.pairs.len() {
            let (b, t) = self.pairs[j];
            if self.choice[j].is_none() && !self.reaches(t, b) {
                live.push(j);
            }
        }
        if live.len() <= 1 {
            return live.len();
        }
        let reach: Vec<Vec<bool>> = live.iter().map(|&j| self.reach_set(self.pairs[j].1)).collect();
        let conflict = |x: usize, y: usize| {
            let (bx, _) = self.pairs[live[x]];
            let (by, _) = self.pairs[live[y]];
            reach[x][by] && reach[y][bx]
        };
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for x in 0..live.len() {
            match cliques.iter_mut().find(|c| c.iter().all(|&y| conflict(x, y))) {
                Some(c) => c.push(x),
                None => cliques.push(vec![x]),
            }
        }
        cliques.len()
    }

    fn search(&mut self, from: usize) {
        if self.budget == 0 {
            return;
        }
        self.spend(1);
        let Some(i) = (from..self.pairs.len()).find(|&i| self.choice[i].is_none()) else {
            let ups = self.ups();
            if self.best.is_none() || ups > self.best_up {
                self.best_up = ups;
                self.best = Some(self.choice.iter().map(|c| c.unwrap()).collect());
            }
            return;
        };
        if self.best.is_some() && self.ups() + self.bound() <= self.best_up {
            return;
        }
        let (b, t) = self.pairs[i];
        for up in [true, false] {
            let (u, v) = if up { (b, t) } else { (t, b) };
            if self.reaches(v, u) {
                continue;
            }
            self.adj[u].push(v);
            self.choice[i] = Some(up);
            self.search(i + 1);
            self.choice[i] = None;
            self.adj[u].pop();
        }
    }
}

/// Outcome of checking a candidate solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<String>,
    pub cycle: Option<Vec<NodeId>>,
    /// Removed up-normal edges (free pairs oriented down).
    pub removed: usize,
    pub critical: Option<i64>,
}

impl VerifyReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks rigid inclusion, forbidden exclusion and acyclicity.
pub fn verify_solution(inst: &PopInstance, sol: &PopSolution) -> VerifyReport {
    let mut violations = Vec::new();
    if sol.orientation.len() != inst.pairs().len() {
        violations.push(format!(
            "{} orientations for {} pairs",
            sol.orientation.len(),
            inst.pairs().len()
        ));
        return VerifyReport {
            violations,
            cycle: None,
            removed: 0,
            critical: None,
        };
    }
    for (p, &o) in inst.pairs().iter().zip(&sol.orientation) {
        if let Some(f) = p.forced {
            if f != o {
                let (s, d) = match f {
                    Orientation::Up => (p.bottom, p.top),
                    Orientation::Down => (p.top, p.bottom),
                };
                violations.push(format!("rigid arc {s}->{d} of pair {} is missing", p.edge));
            }
        }
    }
    let cycle = find_cycle(inst.node_count(), &inst.selected_arcs(&sol.orientation));
    if let Some(c) = &cycle {
        violations.push(format!("directed cycle through {c:?}"));
    }
    let removed = inst
        .pairs()
        .iter()
        .zip(&sol.orientation)
        .filter(|(p, &o)| p.forced.is_none() && o == Orientation::Down)
        .count();
    VerifyReport {
        critical: violations.is_empty().then(|| sol.objective(inst)),
        violations,
        cycle,
        removed,
    }
}
