use std::collections::VecDeque;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub value: f64,
    /// Vertices reachable from the source in the residual graph.
    pub source_side: Vec<bool>,
    /// Flow on each input arc.
    pub arc_flow: Vec<f64>,
}

struct Edge {
    to: usize,
    cap: f64,
}

/// Dinic's blocking-flow maximum flow on `(src, dst, capacity)` arcs.
pub fn max_flow(n: usize, arcs: &[(usize, usize, f64)], source: usize, sink: usize) -> FlowResult {
    assert!(source < n && sink < n);
    let mut edges: Vec<Edge> = Vec::with_capacity(2 * arcs.len());
    let mut adj = vec![Vec::new(); n];
    for &(u, v, c) in arcs {
        assert!(c >= 0.0, "negative capacity");
        adj[u].push(edges.len());
        edges.push(Edge { to: v, cap: c });
        adj[v].push(edges.len());
        edges.push(Edge { to: u, cap: 0.0 });
    }
    let mut value = 0.0;
    if source != sink {
        let mut level = vec![usize::MAX; n];
        let mut it = vec![0usize; n];
        loop {
            level.fill(usize::MAX);
            level[source] = 0;
            let mut q = VecDeque::from([source]);
            while let Some(u) = q.pop_front() {
                for &e in &adj[u] {
                    let v = edges[e].to;
                    if edges[e].cap > EPS && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            if level[sink] == usize::MAX {
                break;
            }
            it.fill(0);
            loop {
                let pushed = augment(&mut edges, &adj, &level, &mut it, source, sink);
                if pushed <= EPS {
                    break;
                }
                value += pushed;
            }
        }
    }
    let mut source_side = vec![false; n];
    source_side[source] = true;
    let mut q = VecDeque::from([source]);
    while let Some(u) = q.pop_front() {
        for &e in &adj[u] {
            let v = edges[e].to;
            if edges[e].cap > EPS && !source_side[v] {
                source_side[v] = true;
                q.push_back(v);
            }
        }
    }
    let arc_flow = (0..arcs.len()).map(|i| edges[2 * i + 1].cap).collect();
    FlowResult {
        value,
        source_side,
        arc_flow,
    }
}

/// One augmenting path in the level graph, found iteratively.
fn augment(edges: &mut [Edge], adj: &[Vec<usize>], level: &[usize], it: &mut [usize], s: usize, t: usize) -> f64 {
    let mut path: Vec<usize> = Vec::new();
    let mut u = s;
    loop {
        if u == t {
            let f = path.iter().map(|&e| edges[e].cap).fold(f64::INFINITY, f64::min);
            for &e in &path {
                edges[e].cap -= f;
                edges[e ^ 1].cap += f;
            }
            return f;
        }
        let mut advanced = false;
        while it[u] < adj[u].len() {
            let e = adj[u][it[u]];
            let v = edges[e].to;
            if edges[e].cap > EPS && level[v] == level[u] + 1 {
                path.push(e);
                u = v;
                advanced = true;
                break;
            }
            it[u] += 1;
        }
        if !advanced {
            // dead end: retreat
            match path.pop() {
                None => return 0.0,
                Some(e) => {
                    u = edges[e ^ 1].to;
                    it[u] += 1;
                }
            }
        }
    }
}
