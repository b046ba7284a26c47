//! Simplicial complexes: parsing, canonical ids, incidences, boundary
//! matrices and the Euler characteristic.
//!
//! Every simplex is stored with its vertex list sorted ascending. Cell ids are
//! dense and assigned in (dimension, lexicographic vertex list) order, so two
//! complexes with the same simplices always get the same ids. The orientation
//! of a simplex is the one induced by its sorted vertex list; omitting the
//! `i`-th vertex yields a face with incidence sign `(-1)^i`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::matrix::SparseMatrix;

pub type CellId = usize;
pub type Vertex = u32;

/// Default bound on the dimension of accepted complexes.
pub const DEFAULT_MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate simplex {simplex:?}")]
    Duplicate { line: usize, simplex: Vec<Vertex> },
    #[error("simplex {simplex:?} has dimension {dim}, above the configured bound {max}")]
    DimensionTooLarge {
        simplex: Vec<Vertex>,
        dim: usize,
        max: usize,
    },
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<Vertex>),
    #[error("empty simplex")]
    Empty,
    #[error("boundary dimension {q} out of range 1..={max_dim}")]
    DimensionOutOfRange { q: usize, max_dim: usize },
    #[error("header declares counts {declared:?} but the complex has {actual:?}")]
    HeaderMismatch {
        declared: Vec<usize>,
        actual: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    pub id: CellId,
    pub dim: usize,
    pub vertices: Vec<Vertex>,
}

/// A face-closed simplicial complex with codimension-one incidences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    cells: Vec<Simplex>,
    index: HashMap<Vec<Vertex>, CellId>,
    /// `faces[c][i]` omits the `i`-th vertex of `c`.
    faces: Vec<Vec<CellId>>,
    cofaces: Vec<Vec<CellId>>,
    /// `dim_start[d]..dim_start[d + 1]` are the ids of the `d`-cells.
    dim_start: Vec<usize>,
}

fn canonical(mut vs: Vec<Vertex>) -> Result<Vec<Vertex>, ComplexError> {
    if vs.is_empty() {
        return Err(ComplexError::Empty);
    }
    vs.sort_unstable();
    if vs.windows(2).any(|w| w[0] == w[1]) {
        return Err(ComplexError::RepeatedVertex(vs));
    }
    Ok(vs)
}

impl SimplicialComplex {
    /// Builds the face closure of the given simplices with the default
    /// dimension bound. Repeats are merged.
    pub fn from_simplices<I, S>(simplices: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[Vertex]>,
    {
        Self::from_simplices_bounded(simplices, DEFAULT_MAX_DIM)
    }

    pub fn from_simplices_bounded<I, S>(simplices: I, max_dim: usize) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[Vertex]>,
    {
        let mut all: BTreeSet<(usize, Vec<Vertex>)> = BTreeSet::new();
        for s in simplices {
            let vs = canonical(s.as_ref().to_vec())?;
            let dim = vs.len() - 1;
            if dim > max_dim {
                return Err(ComplexError::DimensionTooLarge {
                    simplex: vs,
                    dim,
                    max: max_dim,
                });
            }
            if all.contains(&(dim, vs.clone())) {
                continue;
            }
            close_into(&vs, &mut all);
        }
        Ok(Self::from_closed(all))
    }

    fn from_closed(all: BTreeSet<(usize, Vec<Vertex>)>) -> Self {
        let top = all.iter().next_back().map_or(0, |(d, _)| *d);
        let mut dim_start = vec![0usize; top + 2];
        let mut cells = Vec::with_capacity(all.len());
        let mut index = HashMap::with_capacity(all.len());
        for (id, (dim, vs)) in all.into_iter().enumerate() {
            dim_start[dim + 1] = id + 1;
            index.insert(vs.clone(), id);
            cells.push(Simplex {
                id,
                dim,
                vertices: vs,
            });
        }
        for d in 1..dim_start.len() {
            dim_start[d] = dim_start[d].max(dim_start[d - 1]);
        }
        let mut faces = vec![Vec::new(); cells.len()];
        let mut cofaces = vec![Vec::new(); cells.len()];
        for c in &cells {
            if c.dim == 0 {
                continue;
            }
            for i in 0..c.vertices.len() {
                let mut f = c.vertices.clone();
                f.remove(i);
                let fid = index[&f];
                faces[c.id].push(fid);
                cofaces[fid].push(c.id);
            }
        }
        SimplicialComplex {
            cells,
            index,
            faces,
            cofaces,
            dim_start,
        }
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.dim_start.len().saturating_sub(2)
    }

    pub fn cells(&self) -> &[Simplex] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Simplex {
        &self.cells[id]
    }

    pub fn dim(&self, id: CellId) -> usize {
        self.cells[id].dim
    }

    pub fn vertices(&self, id: CellId) -> &[Vertex] {
        &self.cells[id].vertices
    }

    pub fn id_of(&self, vertices: &[Vertex]) -> Option<CellId> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        self.index.get(&v).copied()
    }

    /// Codimension-one faces, ordered by the position of the omitted vertex.
    pub fn faces(&self, id: CellId) -> &[CellId] {
        &self.faces[id]
    }

    pub fn cofaces(&self, id: CellId) -> &[CellId] {
        &self.cofaces[id]
    }

    /// Signed boundary `(face, ±1)` of a cell.
    pub fn boundary(&self, id: CellId) -> impl Iterator<Item = (CellId, i64)> + '_ {
        self.faces[id]
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, if i % 2 == 0 { 1 } else { -1 }))
    }

    /// Incidence number `[coface : face]`, zero when not incident.
    pub fn incidence(&self, coface: CellId, face: CellId) -> i64 {
        self.faces[coface]
            .iter()
            .position(|&f| f == face)
            .map_or(0, |i| if i % 2 == 0 { 1 } else { -1 })
    }

    pub fn cells_of_dim(&self, d: usize) -> std::ops::Range<CellId> {
        if d + 1 >= self.dim_start.len() {
            return self.len()..self.len();
        }
        self.dim_start[d]..self.dim_start[d + 1]
    }

    pub fn count_of_dim(&self, d: usize) -> usize {
        self.cells_of_dim(d).len()
    }

    /// Cell counts `c_0, c_1, ..., c_max_dim`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.max_dim()).map(|d| self.count_of_dim(d)).collect()
    }

    /// Position of a cell among the cells of its dimension.
    pub fn local_index(&self, id: CellId) -> usize {
        id - self.dim_start[self.cells[id].dim]
    }

    /// Matrix of the boundary map `C_q -> C_{q-1}`; rows and columns follow
    /// cell-id order within each dimension.
    pub fn boundary_matrix(&self, q: usize) -> Result<SparseMatrix, ComplexError> {
        if q == 0 || q > self.max_dim() {
            return Err(ComplexError::DimensionOutOfRange {
                q,
                max_dim: self.max_dim(),
            });
        }
        let row_base = self.dim_start[q - 1];
        let cols = self
            .cells_of_dim(q)
            .map(|c| {
                self.boundary(c)
                    .map(|(f, s)| (f - row_base, s))
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(SparseMatrix::from_columns(self.count_of_dim(q - 1), cols))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Ids of simplices without cofaces.
    pub fn maximal_cells(&self) -> Vec<CellId> {
        (0..self.len()).filter(|&c| self.cofaces[c].is_empty()).collect()
    }

    /// Subcomplex spanned by the listed cells (which must be face closed).
    /// Returns the subcomplex and, for each of its cells, the id in `self`.
    pub fn subcomplex(&self, keep: &[CellId]) -> (SimplicialComplex, Vec<CellId>) {
        let sub = SimplicialComplex::from_simplices(keep.iter().map(|&c| self.vertices(c).to_vec()))
            .expect("cells of a valid complex are valid simplices");
        let back = sub
            .cells()
            .iter()
            .map(|s| self.index[&s.vertices])
            .collect();
        (sub, back)
    }

    /// Canonical text form: a `dim counts:` header followed by the maximal
    /// simplices in id order.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::from("dim counts:");
        for c in self.counts() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        for c in self.maximal_cells() {
            let line: Vec<String> = self.vertices(c).iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn close_into(vs: &[Vertex], all: &mut BTreeSet<(usize, Vec<Vertex>)>) {
    let n = vs.len();
    // every non-empty subset of a sorted list is itself sorted
    for mask in 1u64..(1u64 << n) {
        let sub: Vec<Vertex> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vs[i]).collect();
        all.insert((sub.len() - 1, sub));
    }
}

/// Parses a line-oriented simplex listing: one whitespace-separated vertex
/// list per line, `#` starts a comment. A `dim counts:` header line (as
/// produced by [`SimplicialComplex::to_canonical_string`]) is checked
/// against the resulting complex.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex, ComplexError> {
    parse_complex_bounded(text, DEFAULT_MAX_DIM)
}

pub fn parse_complex_bounded(text: &str, max_dim: usize) -> Result<SimplicialComplex, ComplexError> {
    let mut listed: HashMap<Vec<Vertex>, usize> = HashMap::new();
    let mut simplices = Vec::new();
    let mut header: Option<Vec<usize>> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("dim counts:") {
            let counts = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| ComplexError::Parse {
                        line: line_no,
                        msg: format!("bad count `{t}` in header"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            header = Some(counts);
            continue;
        }
        let vs = line
            .split_whitespace()
            .map(|t| {
                t.parse::<Vertex>().map_err(|_| ComplexError::Parse {
                    line: line_no,
                    msg: format!("vertex token `{t}` is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let vs = canonical(vs).map_err(|e| ComplexError::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if listed.insert(vs.clone(), line_no).is_some() {
            return Err(ComplexError::Duplicate {
                line: line_no,
                simplex: vs,
            });
        }
        simplices.push(vs);
    }
    let k = SimplicialComplex::from_simplices_bounded(simplices, max_dim)?;
    if let Some(declared) = header {
        let actual = if k.is_empty() { Vec::new() } else { k.counts() };
        if declared != actual {
            return Err(ComplexError::HeaderMismatch { declared, actual });
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The four-vertex example complex: edges v0v1, v0v2, v1v2, v1v3, v2v3 and
    /// triangle v0v1v2.
    fn example_x() -> SimplicialComplex {
        parse_complex("0 1 2\n1 3\n2 3\n").unwrap()
    }

    #[test]
    fn parse_solid_triangle() {
        let k = parse_complex("0 1 2").unwrap();
        assert_eq!(k.len(), 7);
        assert_eq!(k.counts(), vec![3, 3, 1]);
    }

    #[test]
    fn parse_circle() {
        let k = parse_complex("0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(k.counts(), vec![3, 3]);
    }

    #[test]
    fn parse_example_x_has_ten_cells() {
        assert_eq!(example_x().len(), 10);
    }

    #[test]
    fn parse_errors() {
        let e = parse_complex("0 1\n# comment\n1 0\n").unwrap_err();
        assert_eq!(
            e,
            ComplexError::Duplicate {
                line: 3,
                simplex: vec![0, 1]
            }
        );
        assert!(matches!(
            parse_complex("0 x").unwrap_err(),
            ComplexError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_complex("0 -1").unwrap_err(),
            ComplexError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_complex_bounded("0 1 2", 1).unwrap_err(),
            ComplexError::DimensionTooLarge { .. }
        ));
    }

    #[test]
    fn ids_follow_dimension_then_lex_order() {
        let k = example_x();
        let names: Vec<Vec<Vertex>> = k.cells().iter().map(|s| s.vertices.clone()).collect();
        assert_eq!(
            names,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![3],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn example_x_boundary_matrices() {
        let k = example_x();
        let d1 = k.boundary_matrix(1).unwrap().to_dense();
        assert_eq!(
            d1,
            vec![
                vec![-1, -1, 0, 0, 0],
                vec![1, 0, -1, -1, 0],
                vec![0, 1, 1, 0, -1],
                vec![0, 0, 0, 1, 1],
            ]
        );
        let d2 = k.boundary_matrix(2).unwrap().to_dense();
        assert_eq!(d2, vec![vec![1], vec![-1], vec![1], vec![0], vec![0]]);
        let prod = k.boundary_matrix(1).unwrap().mul(&k.boundary_matrix(2).unwrap());
        assert!(prod.is_zero());
        assert!(k.boundary_matrix(0).is_err());
        assert!(k.boundary_matrix(3).is_err());
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(parse_complex("0 1 2").unwrap().euler_characteristic(), 1);
        assert_eq!(parse_complex("0 1\n1 2\n0 2").unwrap().euler_characteristic(), 0);
        let tet = parse_complex("0 1 2\n0 1 3\n0 2 3\n1 2 3").unwrap();
        assert_eq!(tet.euler_characteristic(), 2);
    }

    #[test]
    fn canonical_round_trip() {
        let k = example_x();
        let text = k.to_canonical_string();
        assert!(text.starts_with("dim counts: 4 5 1\n"));
        let again = parse_complex(&text).unwrap();
        assert_eq!(again, k);
        assert_eq!(again.to_canonical_string(), text);
        assert!(matches!(
            parse_complex("dim counts: 3 2\n0 1 2").unwrap_err(),
            ComplexError::HeaderMismatch { .. }
        ));
    }
}
