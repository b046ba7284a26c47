//! Persistent homology over Z2 of simplex-wise filtrations: a standard
//! column reduction, and an incremental pipeline that keeps a gradient field
//! and the images of all cells in the current critical cells.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{CellId, SimplicialComplex, Vertex};
use crate::morse::{cancel_pair, extract_dgvf, path_count, Dgvf};
use crate::pipeline::{morse_matching, MorseConfig, PipelineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiltrationError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face {face:?} of {coface:?} is missing from the filtration")]
    MissingFace { face: Vec<Vertex>, coface: Vec<Vertex> },
    #[error("face {face:?} enters at {face_value} after its coface {coface:?} at {coface_value}")]
    NotMonotone {
        face: Vec<Vertex>,
        face_value: f64,
        coface: Vec<Vertex>,
        coface_value: f64,
    },
    #[error("simplex {0:?} listed twice")]
    Duplicate(Vec<Vertex>),
}

/// Simplices in entry order with their values. Every prefix is a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<Vec<Vertex>>,
    values: Vec<f64>,
    index: BTreeMap<Vec<Vertex>, usize>,
}

impl Filtration {
    /// Sorts by value, then dimension, then vertex list, and validates.
    pub fn new(entries: Vec<(Vec<Vertex>, f64)>) -> Result<Filtration, FiltrationError> {
        let mut entries: Vec<(Vec<Vertex>, f64)> = entries
            .into_iter()
            .map(|(mut s, v)| {
                s.sort_unstable();
                (s, v)
            })
            .collect();
        entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.len().cmp(&b.0.len())).then(a.0.cmp(&b.0)));
        let mut index = BTreeMap::new();
        for (i, (s, _)) in entries.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(FiltrationError::Duplicate(s.clone()));
            }
        }
        for (s, v) in &entries {
            if s.len() < 2 {
                continue;
            }
            for skip in 0..s.len() {
                let face: Vec<Vertex> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                match index.get(&face) {
                    None => {
                        return Err(FiltrationError::MissingFace {
                            face,
                            coface: s.clone(),
                        })
                    }
                    Some(&j) if entries[j].1 > *v => {
                        return Err(FiltrationError::NotMonotone {
                            face,
                            face_value: entries[j].1,
                            coface: s.clone(),
                            coface_value: *v,
                        })
                    }
                    _ => {}
                }
            }
        }
        let (simplices, values) = entries.into_iter().unzip();
        Ok(Filtration {
            simplices,
            values,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, i: usize) -> &[Vertex] {
        &self.simplices[i]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.simplices[i].len() - 1
    }

    pub fn index_of(&self, s: &[Vertex]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Filtration indices of the codimension-one faces of simplex `i`.
    pub fn faces(&self, i: usize) -> Vec<usize> {
        let s = &self.simplices[i];
        if s.len() < 2 {
            return Vec::new();
        }
        (0..s.len())
            .map(|skip| {
                let f: Vec<Vertex> = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &x)| x).collect();
                self.index[&f]
            })
            .collect()
    }

    /// The complex of the first `len` simplices.
    pub fn prefix(&self, len: usize) -> SimplicialComplex {
        SimplicialComplex::from_simplices(&self.simplices[..len]).expect("prefix of a filtration is a complex")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (simplex, v) in self.simplices.iter().zip(&self.values) {
            let vs: Vec<String> = simplex.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{v} {}", vs.join(" "));
        }
        s
    }
}

/// Lines `value v0 v1 ...`; `#` starts a comment.
pub fn parse_filtration(text: &str) -> Result<Filtration, FiltrationError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| FiltrationError::Parse { line: i + 1, msg };
        let mut it = line.split_whitespace();
        let value: f64 = it
            .next()
            .unwrap()
            .parse()
            .map_err(|_| err(format!("bad value in `{line}`")))?;
        if !value.is_finite() {
            return Err(err("value must be finite".into()));
        }
        let verts: Result<Vec<Vertex>, _> = it.map(str::parse).collect();
        let mut verts = verts.map_err(|_| err(format!("bad vertex in `{line}`")))?;
        if verts.is_empty() {
            return Err(err("simplex has no vertices".into()));
        }
        verts.sort_unstable();
        if verts.windows(2).any(|w| w[0] == w[1]) {
            return Err(err("repeated vertex".into()));
        }
        entries.push((verts, value));
    }
    Filtration::new(entries)
}

/// Vietoris–Rips filtration with radius parameter: a simplex enters once
/// all pairwise distances are below twice the radius, i.e. at half its
/// diameter.
pub fn rips_filtration(points: &[Vec<f64>], max_dim: usize) -> Filtration {
    let n = points.len();
    let dist = |a: usize, b: usize| -> f64 {
        points[a].iter().zip(&points[b]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    let mut entries: Vec<(Vec<Vertex>, f64)> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while let Some(s) = stack.pop() {
        let mut diam = 0.0f64;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                diam = diam.max(dist(s[i], s[j]));
            }
        }
        entries.push((s.iter().map(|&v| v as Vertex).collect(), diam / 2.0));
        if s.len() <= max_dim {
            for w in s.last().unwrap() + 1..n {
                let mut t = s.clone();
                t.push(w);
                stack.push(t);
            }
        }
    }
    Filtration::new(entries).expect("rips values are monotone")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: usize,
    pub death: Option<usize>,
    pub birth_value: f64,
    pub death_value: Option<f64>,
}

impl PersistencePair {
    fn new(f: &Filtration, birth: usize, death: Option<usize>) -> Self {
        PersistencePair {
            dim: f.dim(birth),
            birth,
            death,
            birth_value: f.value(birth),
            death_value: death.map(|d| f.value(d)),
        }
    }

    pub fn persistence(&self) -> f64 {
        self.death_value.map_or(f64::INFINITY, |d| d - self.birth_value)
    }
}

fn sort_pairs(pairs: &mut [PersistencePair]) {
    pairs.sort_by_key(|p| (p.dim, p.birth, p.death.unwrap_or(usize::MAX)));
}

/// Symmetric difference of two sorted index lists.
fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Standard boundary-matrix reduction over Z2.
pub fn persist_naive(f: &Filtration) -> Vec<PersistencePair> {
    let n = f.len();
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut killed = vec![false; n];
    let mut pairs = Vec::new();
    for j in 0..n {
        let mut col = f.faces(j);
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match owner.get(&low) {
                Some(&k) => col = xor_sorted(&col, &cols[k]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            owner.insert(low, j);
            killed[low] = true;
            killed[j] = true;
            pairs.push(PersistencePair::new(f, low, Some(j)));
        }
        cols.push(col);
    }
    for (i, &k) in killed.iter().enumerate() {
        if !k {
            pairs.push(PersistencePair::new(f, i, None));
        }
    }
    sort_pairs(&mut pairs);
    pairs
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncrementalConfig {
    pub morse: MorseConfig,
    /// Re-optimize the gradient field with the matching solver after this
    /// many negative simplices; 0 disables it.
    pub recompute_every: usize,
}

impl Default for IncrementalConfig {
    fn default() -> Self {
        IncrementalConfig {
            morse: MorseConfig::default(),
            recompute_every: 16,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IncrementalStats {
    pub positive: usize,
    pub negative: usize,
    /// Negative simplices whose cancellation reversed a unique gradient path.
    pub reversals: usize,
    /// Negative simplices handled by column operations on the images only.
    pub column_ops: usize,
    pub recomputations: usize,
    /// Critical cells of the final gradient field.
    pub final_critical: usize,
}

#[derive(Debug, Clone)]
pub struct IncrementalResult {
    pub pairs: Vec<PersistencePair>,
    pub stats: IncrementalStats,
    pub dgvf: Dgvf,
    pub complex: SimplicialComplex,
}

/// Incremental persistence. Every cell carries its image: a Z2 chain over
/// the currently alive critical cells (the classes not yet killed). A new
/// simplex whose boundary image is nonzero is negative and kills the
/// youngest alive cell in it; otherwise it is a new critical cell. The
/// gradient field on the growing complex follows by path reversal when the
/// path is unique, and is re-solved periodically.
pub fn persist_incremental(f: &Filtration, cfg: &IncrementalConfig) -> Result<IncrementalResult, PipelineError> {
    let n = f.len();
    let k = f.prefix(n);
    // filtration index <-> cell id of the full complex
    let cell: Vec<CellId> = (0..n).map(|i| k.id_of(f.simplex(i)).unwrap()).collect();
    let mut image: Vec<Vec<usize>> = vec![Vec::new(); n];
    // cells (by filtration index) whose image mentions an alive cell
    let mut holders: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut pairs = Vec::new();
    let mut stats = IncrementalStats::default();
    // gradient pairs as filtration indices (face, coface)
    let mut gradient: Vec<(usize, usize)> = Vec::new();
    let mut since_recompute = 0;

    for s in 0..n {
        let mut delta: Vec<usize> = Vec::new();
        for face in f.faces(s) {
            delta = xor_sorted(&delta, &image[face]);
        }
        match delta.last().copied() {
            None => {
                stats.positive += 1;
                image[s] = vec![s];
                holders.entry(s).or_default().insert(s);
            }
            Some(tau) => {
                stats.negative += 1;
                pairs.push(PersistencePair::new(f, tau, Some(s)));
                // substitute tau by the rest of delta in every image
                let hold = holders.remove(&tau).unwrap_or_default();
                for c in hold {
                    let old = std::mem::take(&mut image[c]);
                    let new = xor_sorted(&old, &delta);
                    for &a in &old {
                        if a != tau && !new.contains(&a) {
                            if let Some(h) = holders.get_mut(&a) {
                                h.remove(&c);
                            }
                        }
                    }
                    for &a in &new {
                        holders.entry(a).or_default().insert(c);
                    }
                    image[c] = new;
                }
                let (kp, map) = prefix_complex(f, s + 1);
                let v = extract_dgvf(&kp, &to_cells(&gradient, &map)).expect("field stays acyclic");
                let (t_id, s_id) = (map[tau], map[s]);
                let (signed, distinct) = path_count(&kp, &v, s_id, t_id);
                let reversed = if signed.abs() == 1 && distinct == 1 && v.is_critical(t_id) {
                    cancel_pair(&kp, &v, t_id, s_id).ok()
                } else {
                    None
                };
                match reversed {
                    Some(w) => {
                        stats.reversals += 1;
                        gradient = from_cells(w.pairs(), f, &kp);
                    }
                    None => stats.column_ops += 1,
                }
                since_recompute += 1;
                if cfg.recompute_every > 0 && since_recompute >= cfg.recompute_every {
                    since_recompute = 0;
                    stats.recomputations += 1;
                    let run = morse_matching(&kp, &cfg.morse, &Default::default())?;
                    gradient = from_cells(run.dgvf.pairs(), f, &kp);
                }
            }
        }
    }
    let mut killed = vec![false; n];
    for p in &pairs {
        killed[p.birth] = true;
        killed[p.death.unwrap()] = true;
    }
    for (i, &dead) in killed.iter().enumerate() {
        if !dead {
            pairs.push(PersistencePair::new(f, i, None));
        }
    }
    sort_pairs(&mut pairs);
    let full: Vec<(CellId, CellId)> = gradient.iter().map(|&(a, b)| (cell[a], cell[b])).collect();
    let dgvf = extract_dgvf(&k, &full)?;
    stats.final_critical = dgvf.critical_total();
    Ok(IncrementalResult {
        pairs,
        stats,
        dgvf,
        complex: k,
    })
}

/// Complex of the first `len` simplices and the map filtration index ->
/// cell id in it.
fn prefix_complex(f: &Filtration, len: usize) -> (SimplicialComplex, Vec<CellId>) {
    let k = f.prefix(len);
    let map = (0..len).map(|i| k.id_of(f.simplex(i)).unwrap()).collect();
    (k, map)
}

fn to_cells(pairs: &[(usize, usize)], map: &[CellId]) -> Vec<(CellId, CellId)> {
    pairs.iter().map(|&(a, b)| (map[a], map[b])).collect()
}

fn from_cells(pairs: &[(CellId, CellId)], f: &Filtration, k: &SimplicialComplex) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .map(|&(a, b)| (f.index_of(k.vertices(a)).unwrap(), f.index_of(k.vertices(b)).unwrap()))
        .collect()
}

/// Diagram as text: one `dim birth death` line per pair, `inf` for
/// essential classes, sorted.
pub fn diagram_text(pairs: &[PersistencePair]) -> String {
    let mut rows: Vec<(usize, f64, f64)> = pairs
        .iter()
        .map(|p| (p.dim, p.birth_value, p.death_value.unwrap_or(f64::INFINITY)))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let mut s = String::new();
    for (d, b, e) in rows {
        if e.is_infinite() {
            let _ = writeln!(s, "{d} {b} inf");
        } else {
            let _ = writeln!(s, "{d} {b} {e}");
        }
    }
    s
}

/// Diagram as SVG: one colour per dimension, essential classes drawn on a
/// line above the plot.
pub fn diagram_svg(pairs: &[PersistencePair], size: u32) -> String {
    let finite = pairs
        .iter()
        .flat_map(|p| std::iter::once(p.birth_value).chain(p.death_value))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if finite.0.is_finite() { finite } else { (0.0, 1.0) };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let m = 30.0;
    let w = size as f64;
    let inner = w - 2.0 * m;
    let x = |v: f64| m + (v - lo) / span * inner;
    let y = |v: f64| w - m - (v - lo) / span * inner;
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
        x(lo),
        y(lo),
        x(hi),
        y(hi)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="lightgray" stroke-dasharray="4"/>"#,
        m / 2.0,
        w - m,
        m / 2.0
    );
    for p in pairs {
        let cy = p.death_value.map_or(m / 2.0, y);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"><title>H{} ({}, {})</title></circle>"#,
            x(p.birth_value),
            cy,
            colors[p.dim % colors.len()],
            p.dim,
            p.birth_value,
            p.death_value.map_or("inf".to_string(), |d| d.to_string())
        );
    }
    s.push_str("</svg>\n");
    s
}
