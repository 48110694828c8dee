//! Dual graphs of nodal curves: stability, arithmetic genus and the
//! dimension of the first-order deformation space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a curve needs at least one component")]
    NoVertices,
    #[error("half-edge {half_edge} refers to missing vertex {vertex}")]
    BadVertex { half_edge: usize, vertex: usize },
    #[error("mark {mark} refers to missing vertex {vertex}")]
    BadMarkVertex { mark: usize, vertex: usize },
    #[error("edge {edge} refers to missing half-edge {half_edge}")]
    BadHalfEdge { edge: usize, half_edge: usize },
    #[error("edge {edge} uses half-edge {half_edge} twice")]
    DegenerateEdge { edge: usize, half_edge: usize },
    #[error("half-edge {0} is not part of any edge")]
    DanglingHalfEdge(usize),
    #[error("half-edge {0} belongs to more than one edge")]
    SharedHalfEdge(usize),
    #[error("unstable components (2g - 2 + special points <= 0): {0:?}")]
    Unstable(Vec<usize>),
    #[error("dual graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("T1 of marked curves not in scope")]
    MarkedCurve,
}

/// Unvalidated dual graph data.
///
/// Vertices, half-edges, edges and marks are identified by their position.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphData {
    /// Geometric genus of the normalization of each component.
    pub genera: Vec<u32>,
    /// Vertex carrying each half-edge (branch over a node).
    pub half_edges: Vec<usize>,
    /// Nodes, as unordered pairs of half-edges.
    pub edges: Vec<[usize; 2]>,
    /// Vertex carrying each marked point.
    pub marks: Vec<usize>,
}

/// Non-equivariant deformation count of a stable curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct T1Breakdown {
    /// One dimension per node (local smoothing parameters).
    pub delta: i64,
    /// Tangent lines at the branches over the nodes, `2δ`.
    pub branch_term: i64,
    /// `-χ(T)` on the normalization, `3Σg_v - 3ν`.
    pub minus_chi: i64,
    pub total: i64,
}

/// A validated stable dual graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    data: GraphData,
    edge_of: Vec<usize>,
    at_vertex: Vec<Vec<usize>>,
    marks_at: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    components: usize,
}

impl DualGraph {
    pub fn validate(data: GraphData) -> Result<Self, GraphError> {
        Self::validate_with(data, false)
    }

    /// Validates, optionally accepting disconnected graphs (normalizations).
    pub fn validate_with(data: GraphData, allow_disconnected: bool) -> Result<Self, GraphError> {
        let nv = data.genera.len();
        if nv == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut at_vertex = vec![Vec::new(); nv];
        for (h, &v) in data.half_edges.iter().enumerate() {
            if v >= nv {
                return Err(GraphError::BadVertex { half_edge: h, vertex: v });
            }
            at_vertex[v].push(h);
        }
        let mut marks_at = vec![Vec::new(); nv];
        for (m, &v) in data.marks.iter().enumerate() {
            if v >= nv {
                return Err(GraphError::BadMarkVertex { mark: m, vertex: v });
            }
            marks_at[v].push(m);
        }
        let nh = data.half_edges.len();
        let mut edge_of = vec![usize::MAX; nh];
        for (e, &[a, b]) in data.edges.iter().enumerate() {
            for h in [a, b] {
                if h >= nh {
                    return Err(GraphError::BadHalfEdge { edge: e, half_edge: h });
                }
            }
            if a == b {
                return Err(GraphError::DegenerateEdge { edge: e, half_edge: a });
            }
            for h in [a, b] {
                if edge_of[h] != usize::MAX {
                    return Err(GraphError::SharedHalfEdge(h));
                }
                edge_of[h] = e;
            }
        }
        if let Some(h) = edge_of.iter().position(|&e| e == usize::MAX) {
            return Err(GraphError::DanglingHalfEdge(h));
        }
        let unstable: Vec<usize> = (0..nv)
            .filter(|&v| {
                2 * data.genera[v] as i64 - 2 + at_vertex[v].len() as i64 + marks_at[v].len() as i64
                    <= 0
            })
            .collect();
        if !unstable.is_empty() {
            return Err(GraphError::Unstable(unstable));
        }

        // connected components by union-find over edges
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        for &[a, b] in &data.edges {
            let (ra, rb) = (find(&mut parent, data.half_edges[a]), find(&mut parent, data.half_edges[b]));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut label = vec![usize::MAX; nv];
        let mut component_of = vec![0; nv];
        let mut components = 0;
        for v in 0..nv {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = components;
                components += 1;
            }
            component_of[v] = label[r];
        }
        if components > 1 && !allow_disconnected {
            return Err(GraphError::Disconnected(components));
        }
        Ok(DualGraph {
            data,
            edge_of,
            at_vertex,
            marks_at,
            component_of,
            components,
        })
    }

    pub fn data(&self) -> &GraphData {
        &self.data
    }

    pub fn into_data(self) -> GraphData {
        self.data
    }

    /// ν, the number of components.
    pub fn num_vertices(&self) -> usize {
        self.data.genera.len()
    }

    /// δ, the number of nodes.
    pub fn num_edges(&self) -> usize {
        self.data.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.data.half_edges.len()
    }

    pub fn num_marks(&self) -> usize {
        self.data.marks.len()
    }

    pub fn genus(&self, v: usize) -> u32 {
        self.data.genera[v]
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.data.half_edges[h]
    }

    pub fn mark_vertex(&self, m: usize) -> usize {
        self.data.marks[m]
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.data.edges[e]
    }

    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    /// The other branch over the same node.
    pub fn opposite(&self, h: usize) -> usize {
        let [a, b] = self.data.edges[self.edge_of[h]];
        if a == h {
            b
        } else {
            a
        }
    }

    pub fn half_edges_at(&self, v: usize) -> &[usize] {
        &self.at_vertex[v]
    }

    pub fn marks_at(&self, v: usize) -> &[usize] {
        &self.marks_at[v]
    }

    /// Nodes and marks on the component of `v`.
    pub fn special_points(&self, v: usize) -> usize {
        self.at_vertex[v].len() + self.marks_at[v].len()
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    pub fn num_components(&self) -> usize {
        self.components
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// `Σ g_v + δ - ν + 1` for a connected graph, or the same formula per
    /// connected component otherwise.
    pub fn component_genera(&self) -> Vec<u64> {
        let mut g = vec![1i64; self.components];
        for v in 0..self.num_vertices() {
            g[self.component_of[v]] += self.data.genera[v] as i64 - 1;
        }
        for &[a, _] in &self.data.edges {
            g[self.component_of[self.data.half_edges[a]]] += 1;
        }
        g.into_iter().map(|x| x as u64).collect()
    }

    /// Arithmetic genus of a connected curve.
    pub fn arithmetic_genus(&self) -> Result<u64, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected(self.components));
        }
        Ok(self.component_genera()[0])
    }

    /// Dimension of T¹ split into nodes, branches and normalization terms.
    pub fn t1_dimension(&self) -> Result<T1Breakdown, GraphError> {
        if self.num_marks() > 0 {
            return Err(GraphError::MarkedCurve);
        }
        let genus = self.arithmetic_genus()? as i64;
        let delta = self.num_edges() as i64;
        let nu = self.num_vertices() as i64;
        let sum_g: i64 = self.data.genera.iter().map(|&g| g as i64).sum();
        let b = T1Breakdown {
            delta,
            branch_term: 2 * delta,
            minus_chi: 3 * sum_g - 3 * nu,
            total: delta + 2 * delta + 3 * sum_g - 3 * nu,
        };
        assert_eq!(b.total, 3 * genus - 3, "T1 total must equal 3g - 3");
        Ok(b)
    }
}
