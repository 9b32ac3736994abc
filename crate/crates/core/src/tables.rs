//! Cached per-dimension lookup tables: the edge list of `Q_n` in `(lo, hi)`
//! order and the dense edge-id indexing used by bitset representations.

use std::sync::{Arc, OnceLock};

use crate::cube::{CubeDim, Edge, FaultSet, Vertex, MAX_DIM};
use crate::edgeset::EdgeBits;

pub(crate) struct CubeTables {
    pub n: CubeDim,
    /// All edges of `Q_n`, sorted by `(lo, hi)`; the index in this list is
    /// the edge id.
    pub edges: Vec<Edge>,
    /// `id_by_vertex_dim[v * n + d]` is the id of the edge from `v` along
    /// dimension `d`.
    id_by_vertex_dim: Vec<u32>,
}

impl CubeTables {
    fn build(n: CubeDim) -> CubeTables {
        let nn = n.get();
        let mut edges = Vec::with_capacity(n.edge_count() as usize);
        for v in 0..n.vertex_count() {
            for d in 0..nn {
                if v & (1 << d) == 0 {
                    edges.push(Edge::along(v, d));
                }
            }
        }
        edges.sort_unstable();
        let mut id_by_vertex_dim = vec![u32::MAX; (n.vertex_count() * nn) as usize];
        for (id, e) in edges.iter().enumerate() {
            let d = e.dim();
            id_by_vertex_dim[(e.lo() * nn + d) as usize] = id as u32;
            id_by_vertex_dim[(e.hi() * nn + d) as usize] = id as u32;
        }
        CubeTables { n, edges, id_by_vertex_dim }
    }

    #[inline]
    pub fn edge_id(&self, e: Edge) -> u32 {
        self.id_by_vertex_dim[(e.lo() * self.n.get() + e.dim()) as usize]
    }

    #[inline]
    pub fn id_from(&self, v: Vertex, dim: u32) -> u32 {
        self.id_by_vertex_dim[(v * self.n.get() + dim) as usize]
    }

    #[inline]
    pub fn edge(&self, id: u32) -> Edge {
        self.edges[id as usize]
    }

    pub fn fault_bits(&self, f: &FaultSet) -> EdgeBits {
        EdgeBits::from_ids(f.edges().iter().map(|&e| self.edge_id(e)))
    }

    pub fn fault_set_from_bits(&self, bits: &EdgeBits) -> FaultSet {
        let edges: Vec<Edge> = bits.iter_ids().map(|id| self.edge(id)).collect();
        FaultSet::from_edges(self.n, edges).expect("edge ids are valid and distinct")
    }
}

static TABLES: [OnceLock<Arc<CubeTables>>; MAX_DIM as usize + 1] =
    [const { OnceLock::new() }; MAX_DIM as usize + 1];

pub(crate) fn tables(n: CubeDim) -> Arc<CubeTables> {
    TABLES[n.get() as usize]
        .get_or_init(|| Arc::new(CubeTables::build(n)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_ids_are_dense_and_sorted() {
        let n = CubeDim::new(4).unwrap();
        let t = tables(n);
        assert_eq!(t.edges.len(), 32);
        for (id, e) in t.edges.iter().enumerate() {
            assert_eq!(t.edge_id(*e), id as u32);
            assert_eq!(t.id_from(e.lo(), e.dim()), id as u32);
            assert_eq!(t.id_from(e.hi(), e.dim()), id as u32);
        }
        assert!(t.edges.windows(2).all(|w| w[0] < w[1]));
    }
}
