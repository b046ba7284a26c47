//! The Hasse graph of a simplicial complex: one node per cell, one undirected
//! edge per codimension-one face incidence.

use crate::complex::{CellId, SimplicialComplex};

pub type HasseEdgeId = usize;

/// Face incidence `(face, coface)` with `dim(coface) = dim(face) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HasseEdge {
    pub face: CellId,
    pub coface: CellId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseGraph {
    levels: Vec<usize>,
    edges: Vec<HasseEdge>,
    /// Incident edge ids per node, in increasing edge id.
    incident: Vec<Vec<HasseEdgeId>>,
}

impl HasseGraph {
    /// Edges are numbered coface by coface in cell-id order, and within a
    /// coface in canonical face order.
    pub fn build(k: &SimplicialComplex) -> Self {
        let levels: Vec<usize> = k.cells().iter().map(|s| s.dim).collect();
        let mut edges = Vec::new();
        let mut incident = vec![Vec::new(); k.len()];
        for c in 0..k.len() {
            for &f in k.faces(c) {
                let id = edges.len();
                edges.push(HasseEdge { face: f, coface: c });
                incident[f].push(id);
                incident[c].push(id);
            }
        }
        for inc in &mut incident {
            inc.sort_unstable();
        }
        HasseGraph {
            levels,
            edges,
            incident,
        }
    }

    pub fn node_count(&self) -> usize {
        self.levels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn level(&self, node: CellId) -> usize {
        self.levels[node]
    }

    pub fn edges(&self) -> &[HasseEdge] {
        &self.edges
    }

    pub fn edge(&self, e: HasseEdgeId) -> HasseEdge {
        self.edges[e]
    }

    /// Edge ids incident to a node (both as face and as coface).
    pub fn incident(&self, node: CellId) -> &[HasseEdgeId] {
        &self.incident[node]
    }

    pub fn degree(&self, node: CellId) -> usize {
        self.incident[node].len()
    }

    pub fn find_edge(&self, face: CellId, coface: CellId) -> Option<HasseEdgeId> {
        self.incident[face]
            .iter()
            .copied()
            .find(|&e| self.edges[e].coface == coface && self.edges[e].face == face)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;

    #[test]
    fn counts() {
        let v = parse_complex("0").unwrap();
        let h = HasseGraph::build(&v);
        assert_eq!((h.node_count(), h.edge_count()), (1, 0));

        let tri = parse_complex("0 1 2").unwrap();
        let h = HasseGraph::build(&tri);
        assert_eq!((h.node_count(), h.edge_count()), (7, 9));

        let tet = parse_complex("0 1 2\n0 1 3\n0 2 3\n1 2 3").unwrap();
        let h = HasseGraph::build(&tet);
        assert_eq!((h.node_count(), h.edge_count()), (14, 24));
    }

    #[test]
    fn edges_recover_face_relation() {
        let k = parse_complex("0 1 2\n2 3").unwrap();
        let h = HasseGraph::build(&k);
        for e in h.edges() {
            assert_eq!(h.level(e.coface), h.level(e.face) + 1);
            assert!(k.faces(e.coface).contains(&e.face));
        }
        let from_h: usize = h.edges().len();
        let from_k: usize = (0..k.len()).map(|c| k.faces(c).len()).sum();
        assert_eq!(from_h, from_k);
        let e = h.find_edge(0, k.id_of(&[0, 1]).unwrap()).unwrap();
        assert!(h.incident(0).contains(&e));
    }
}
