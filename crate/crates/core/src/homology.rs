//! Integer Smith normal form, homology over Z and Z/p, and a simplicial
//! reference computation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::matrix::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("boundary composition d_{q} d_{} is not zero", q + 1)]
    NotChain { q: usize },
    #[error("boundary d_{q} has shape {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape {
        q: usize,
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("unsupported coefficients `{0}` (use Z, Z2, Z3, Z5 or Zp for a prime p)")]
    Coefficient(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Integers,
    /// Prime field Z/p.
    Prime(u64),
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Integers => f.write_str("Z"),
            Coefficient::Prime(p) => write!(f, "Z{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl FromStr for Coefficient {
    type Err = HomologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Z" || t == "z" {
            return Ok(Coefficient::Integers);
        }
        let p = t
            .strip_prefix('Z')
            .or_else(|| t.strip_prefix('z'))
            .and_then(|r| r.parse::<u64>().ok())
            .filter(|&p| is_prime(p) && p < (1 << 31));
        p.map(Coefficient::Prime).ok_or_else(|| HomologyError::Coefficient(s.to_string()))
    }
}

/// Invariant factors `d_1 | d_2 | ...` (all positive) of an integer matrix.
/// Their count is the rank.
pub fn smith_normal_form(m: &SparseMatrix) -> Vec<BigInt> {
    let mut factors = Vec::new();
    let rest = eliminate_units(m, &mut factors);
    factors.extend(dense_snf(rest));
    factors.sort();
    factors
}

pub fn rank_over_z(m: &SparseMatrix) -> usize {
    smith_normal_form(m).len()
}

/// Clears unit pivots on a sparse copy, recording a factor 1 for each, and
/// returns what remains as a dense matrix. Stops early when an entry would
/// overflow.
fn eliminate_units(m: &SparseMatrix, factors: &mut Vec<BigInt>) -> Vec<Vec<BigInt>> {
    let mut cols: Vec<Vec<(usize, i64)>> = m.columns().map(|c| c.to_vec()).collect();
    let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.nrows()];
    for (j, c) in cols.iter().enumerate() {
        for &(i, _) in c {
            rows[i].insert(j);
        }
    }
    let mut col_alive = vec![true; cols.len()];
    let mut row_alive = vec![true; m.nrows()];
    'outer: loop {
        // cheapest unit pivot by Markowitz cost
        let mut best: Option<(usize, usize, usize)> = None;
        for (j, c) in cols.iter().enumerate() {
            if !col_alive[j] {
                continue;
            }
            for &(i, v) in c {
                if v.abs() == 1 {
                    let cost = (c.len() - 1) * (rows[i].len() - 1);
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, j));
                    }
                }
            }
        }
        let Some((_, r, p)) = best else { break };
        let pv = cols[p].iter().find(|e| e.0 == r).unwrap().1;
        let others: Vec<usize> = rows[r].iter().copied().filter(|&j| j != p).collect();
        for j in others {
            let a = cols[j].iter().find(|e| e.0 == r).unwrap().1;
            let Some(f) = a.checked_mul(pv) else { break 'outer };
            // col_j -= f * col_p
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(cols[j].len() + cols[p].len());
            let (mut x, mut y) = (0, 0);
            let (cj, cp) = (&cols[j], &cols[p]);
            while x < cj.len() || y < cp.len() {
                let take_j = y >= cp.len() || (x < cj.len() && cj[x].0 < cp[y].0);
                let take_p = x >= cj.len() || (y < cp.len() && cp[y].0 < cj[x].0);
                if take_j {
                    merged.push(cj[x]);
                    x += 1;
                } else if take_p {
                    let Some(v) = cp[y].1.checked_mul(f).and_then(i64::checked_neg) else { break 'outer };
                    merged.push((cp[y].0, v));
                    y += 1;
                } else {
                    let Some(v) = cp[y].1.checked_mul(f).and_then(|t| cj[x].1.checked_sub(t)) else {
                        break 'outer;
                    };
                    if v != 0 {
                        merged.push((cj[x].0, v));
                    }
                    x += 1;
                    y += 1;
                }
            }
            for &(i, _) in &cols[j] {
                rows[i].remove(&j);
            }
            for &(i, _) in &merged {
                rows[i].insert(j);
            }
            cols[j] = merged;
        }
        factors.push(BigInt::one());
        for &(i, _) in &cols[p] {
            rows[i].remove(&p);
        }
        cols[p].clear();
        col_alive[p] = false;
        row_alive[r] = false;
    }
    let live_rows: Vec<usize> = (0..m.nrows()).filter(|&i| row_alive[i] && !rows[i].is_empty()).collect();
    let mut index = vec![usize::MAX; m.nrows()];
    for (k, &i) in live_rows.iter().enumerate() {
        index[i] = k;
    }
    let live_cols: Vec<usize> = (0..cols.len()).filter(|&j| col_alive[j] && !cols[j].is_empty()).collect();
    let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
    for (k, &j) in live_cols.iter().enumerate() {
        for &(i, v) in &cols[j] {
            dense[index[i]][k] = BigInt::from(v);
        }
    }
    dense
}

/// Smith form of a dense matrix with smallest-magnitude pivots.
fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < n.min(m) {
        let mut pivot: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && pivot.is_none_or(|(pi, pj)| x.abs() < a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..n {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&p);
                    for j in t..m {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    dirty |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..m {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&p);
                    for row in a.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    dirty |= !a[t][j].is_zero();
                }
            }
            if !dirty {
                // divisibility: fold any entry not divisible by the pivot
                let bad = (t + 1..n).find(|&i| (t + 1..m).any(|j| !(&a[i][j] % &p).is_zero()));
                match bad {
                    Some(i) => {
                        for j in t..m {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..n {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..m {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rank of an integer matrix reduced mod a prime.
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let p = p as i64;
    let md = |x: i64| x.rem_euclid(p);
    let inv = |x: i64| {
        // Fermat
        let (mut b, mut e, mut r) = (x, p - 2, 1i64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    // column reduction keyed by lowest nonzero row
    let mut low_owner: std::collections::HashMap<usize, Vec<(usize, i64)>> = std::collections::HashMap::new();
    let mut rank = 0;
    for c in m.columns() {
        let mut col: std::collections::BTreeMap<usize, i64> =
            c.iter().map(|&(i, v)| (i, md(v))).filter(|&(_, v)| v != 0).collect();
        while let Some((&low, &lv)) = col.iter().next_back() {
            let Some(piv) = low_owner.get(&low) else { break };
            let f = lv * inv(piv.last().unwrap().1) % p;
            for &(i, v) in piv {
                let e = col.entry(i).or_insert(0);
                *e = md(*e - f * v);
                if *e == 0 {
                    col.remove(&i);
                }
            }
        }
        if let Some((&low, _)) = col.iter().next_back() {
            low_owner.insert(low, col.into_iter().collect());
            rank += 1;
        }
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Torsion coefficients greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyGroups {
    pub coefficient: Coefficient,
    pub groups: Vec<HomologyGroup>,
}

impl HomologyGroups {
    /// Equality up to trailing trivial groups.
    pub fn isomorphic(&self, other: &HomologyGroups) -> bool {
        fn trim(g: &[HomologyGroup]) -> &[HomologyGroup] {
            let n = g.iter().rposition(|x| x.betti != 0 || !x.torsion.is_empty()).map_or(0, |i| i + 1);
            &g[..n]
        }
        self.coefficient == other.coefficient && trim(&self.groups) == trim(&other.groups)
    }

    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.betti).collect()
    }

    pub fn euler(&self) -> i64 {
        self.groups
            .iter()
            .enumerate()
            .map(|(q, g)| if q % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) })
            .sum()
    }

    /// One line per dimension, e.g. `H_1 = Z^1 ⊕ Z/2`.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for (q, g) in self.groups.iter().enumerate() {
            let mut parts = Vec::new();
            if g.betti > 0 {
                parts.push(format!("{}^{}", self.coefficient, g.betti));
            }
            for d in &g.torsion {
                parts.push(format!("Z/{d}"));
            }
            if parts.is_empty() {
                parts.push("0".into());
            }
            s.push_str(&format!("H_{q} = {}\n", parts.join(" ⊕ ")));
        }
        s
    }
}

/// Homology of a chain complex with `counts[q]` generators in degree q;
/// `boundaries[q]` is `∂_q` for q >= 1 (index 0 is ignored).
pub fn homology_from_chain(
    counts: &[usize],
    boundaries: &[SparseMatrix],
    coeff: Coefficient,
) -> Result<HomologyGroups, HomologyError> {
    let top = counts.len();
    for q in 1..top {
        let d = &boundaries[q];
        if d.nrows() != counts[q - 1] || d.ncols() != counts[q] {
            return Err(HomologyError::Shape {
                q,
                rows: d.nrows(),
                cols: d.ncols(),
                want_rows: counts[q - 1],
                want_cols: counts[q],
            });
        }
        if q + 1 < top && !d.mul(&boundaries[q + 1]).is_zero() {
            return Err(HomologyError::NotChain { q });
        }
    }
    let mut ranks = vec![0usize; top + 1];
    let mut torsion = vec![Vec::new(); top + 1];
    for q in 1..top {
        match coeff {
            Coefficient::Integers => {
                let f = smith_normal_form(&boundaries[q]);
                ranks[q] = f.len();
                torsion[q] = f.into_iter().filter(|d| !d.is_one()).collect();
            }
            Coefficient::Prime(p) => ranks[q] = rank_mod_p(&boundaries[q], p),
        }
    }
    let groups = (0..top)
        .map(|q| HomologyGroup {
            betti: counts[q] - ranks[q] - ranks[q + 1],
            torsion: torsion[q + 1].clone(),
        })
        .collect();
    Ok(HomologyGroups {
        coefficient: coeff,
        groups,
    })
}

/// Homology straight from the simplicial boundary matrices.
pub fn simplicial_homology(k: &SimplicialComplex, coeff: Coefficient) -> HomologyGroups {
    if k.is_empty() {
        return HomologyGroups {
            coefficient: coeff,
            groups: Vec::new(),
        };
    }
    let counts = k.counts();
    let mut bd = vec![SparseMatrix::zeros(0, counts[0])];
    for q in 1..counts.len() {
        bd.push(k.boundary_matrix(q).expect("dimension in range"));
    }
    homology_from_chain(&counts, &bd, coeff).expect("simplicial boundaries form a chain complex")
}

/// Small torsion coefficients as machine integers, for reports and tests.
pub fn torsion_u64(g: &HomologyGroup) -> Vec<u64> {
    g.torsion.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
}
