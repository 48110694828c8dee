//! Finite group actions on stable curves with local character data, the
//! Riemann–Hurwitz quotient of each component orbit, and the dimension of
//! the space of invariant first-order deformations.
//!
//! The local data is explicit input because the dual graph alone does not
//! determine how a stabilizer acts near a node:
//!
//! * a *tangent character* for every element fixing a branch `p`, giving its
//!   eigenvalue on the tangent line of the normalization at `p`;
//! * a *smoothing character* for every element fixing a node, giving its
//!   eigenvalue on the smoothing parameter (the one-dimensional stalk of
//!   `Ext¹(Ω, O)` at the node). For branch-preserving elements it is the
//!   product of the two tangent characters; for branch-swapping elements it
//!   must be declared;
//! * a *kernel* `K_v` for each component, the elements of its stabilizer
//!   acting trivially on it;
//! * *ramification orbits*: orbits of smooth points off the nodes with
//!   nontrivial stabilizer.
//!
//! Declarations may be given at any object of an orbit; they are carried to
//! the orbit representative by conjugation, closed under multiplication and
//! carried back, so every consistency relation is checked rather than
//! assumed.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve_graph::{DualGraph, GraphError, T1Breakdown};
use crate::finite_group::{
    invariant_dimension_orbits, invariant_dimension_trace, CharTable, FiniteGroup, GroupError,
    Orbit, Perm, PermAction, RotationChar, Subgroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("vertex action: {0}")]
    VertexAction(GroupError),
    #[error("half-edge action: {0}")]
    HalfEdgeAction(GroupError),
    #[error("mark action: {0}")]
    MarkAction(GroupError),
    #[error("half-edge action does not cover the vertex action: generator {generator} moves half-edge {half_edge} off the image of its vertex")]
    NotCovering { generator: usize, half_edge: usize },
    #[error("mark action does not cover the vertex action: generator {generator} moves mark {mark} off the image of its vertex")]
    MarkNotCovering { generator: usize, mark: usize },
    #[error("generator {generator} does not map edge {edge} to an edge")]
    EdgeNotPreserved { generator: usize, edge: usize },
    #[error("{context}: {element} is not an element of the group")]
    UnknownElement { context: String, element: Perm },
    #[error("{what} index {index} out of range")]
    BadIndex { what: &'static str, index: usize },
    #[error("{element} does not fix {object}")]
    NotFixing { element: Perm, object: String },
    #[error("tangent character at half-edge {half_edge} is not multiplicative: {element} gets both {first} and {second}")]
    TangentConflict {
        half_edge: usize,
        element: Perm,
        first: RotationChar,
        second: RotationChar,
    },
    #[error("tangent character at half-edge {half_edge} missing for stabilizer elements {missing:?}")]
    TangentGap { half_edge: usize, missing: Vec<Perm> },
    #[error("smoothing character at edge {edge} is inconsistent: {element} gets both {first} and {second}")]
    SmoothingConflict {
        edge: usize,
        element: Perm,
        first: RotationChar,
        second: RotationChar,
    },
    #[error("smoothing character at edge {edge} missing for branch-swapping elements {missing:?}")]
    SmoothingGap { edge: usize, missing: Vec<Perm> },
    #[error("kernel at vertex {vertex}: {element} does not fix the vertex")]
    KernelNotInStabilizer { vertex: usize, element: Perm },
    #[error("kernel at vertex {vertex} is not normal in the vertex stabilizer")]
    KernelNotNormal { vertex: usize },
    #[error("kernels declared at vertex {vertex} and elsewhere in its orbit are not conjugate")]
    KernelMismatch { vertex: usize },
    #[error("kernel element {element} at vertex {vertex}: {detail}")]
    KernelViolation {
        vertex: usize,
        element: Perm,
        detail: String,
    },
    #[error("{element} fixes half-edge {half_edge} with trivial tangent character but is not in the kernel of its component")]
    NotFaithful { half_edge: usize, element: Perm },
    #[error("ramification orbit {index}: {reason}")]
    Ramification { index: usize, reason: String },
    #[error("inconsistent ramification data at vertex {vertex}: {residue}")]
    InconsistentRamification { vertex: usize, residue: String },
    #[error("inconsistent character data: {0}")]
    InconsistentCharacter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentCharDecl {
    pub element: Perm,
    pub half_edge: usize,
    pub value: RotationChar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothingCharDecl {
    pub element: Perm,
    pub edge: usize,
    pub value: RotationChar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelDecl {
    pub vertex: usize,
    pub generators: Vec<Perm>,
}

/// An orbit of smooth non-node points on the component `vertex` whose
/// stabilizer is generated by `element` (modulo the kernel), acting on the
/// tangent line by `value`, with ramification order `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationDecl {
    pub vertex: usize,
    pub element: Perm,
    pub value: RotationChar,
    pub order: u32,
}

/// Unvalidated action data. Generator images are listed in generator order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionData {
    pub vertex_images: Vec<Perm>,
    pub half_edge_images: Vec<Perm>,
    /// Empty means every generator fixes every mark.
    pub mark_images: Vec<Perm>,
    pub tangent_chars: Vec<TangentCharDecl>,
    pub smoothing_chars: Vec<SmoothingCharDecl>,
    pub kernels: Vec<KernelDecl>,
    pub ramification: Vec<RamificationDecl>,
}

impl ActionData {
    /// Every generator acting as the identity, with no local data.
    pub fn identity(group: &FiniteGroup, graph: &DualGraph) -> Self {
        let k = group.generators().len();
        ActionData {
            vertex_images: vec![Perm::identity(graph.num_vertices()); k],
            half_edge_images: vec![Perm::identity(graph.num_half_edges()); k],
            ..Default::default()
        }
    }
}

/// A ramified point orbit after normalization to a specific vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamifiedOrbit {
    pub generator: usize,
    /// Full stabilizer of one point of the orbit (generator and kernel).
    pub stabilizer: Subgroup,
    pub value: RotationChar,
    pub order: u32,
}

/// Riemann–Hurwitz data of one component orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSignature {
    /// Representative vertex of the orbit.
    pub vertex_orbit: usize,
    /// Order of the group acting effectively on the component.
    pub effective_order: usize,
    pub g_prime: u64,
    pub b: usize,
    /// Ramification order of each branch point.
    pub ramification_orders: Vec<u32>,
    /// `3g' - 3 + b`.
    pub contribution: i64,
}

impl QuotientSignature {
    /// `|H̄|(2g' - 2) + Σ (|H̄|/e)(e - 1)`, which must equal `2g_v - 2`.
    pub fn reconstructed_euler(&self) -> i64 {
        let h = self.effective_order as i64;
        let ram: i64 = self
            .ramification_orders
            .iter()
            .map(|&e| (h / e as i64) * (e as i64 - 1))
            .sum();
        h * (2 * self.g_prime as i64 - 2) + ram
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantT1 {
    /// Invariant smoothing parameters.
    pub node_inv: i64,
    /// Invariant tangent directions at the branches.
    pub branch_inv: i64,
    /// `-χ(T)^G` on the normalization, `Σ (3g' - 3 + b)` over component orbits.
    pub minus_chi_inv: i64,
    pub total: i64,
}

impl From<T1Breakdown> for EquivariantT1 {
    fn from(b: T1Breakdown) -> Self {
        EquivariantT1 {
            node_inv: b.delta,
            branch_inv: b.branch_term,
            minus_chi_inv: b.minus_chi,
            total: b.total,
        }
    }
}

/// A validated action of a finite group on a stable curve.
#[derive(Debug, Clone)]
pub struct CurveAction {
    group: Arc<FiniteGroup>,
    graph: DualGraph,
    data: ActionData,
    vertices: PermAction,
    half_edges: PermAction,
    edges: PermAction,
    marks: PermAction,
    vertex_orbits: Vec<Orbit>,
    half_edge_orbits: Vec<Orbit>,
    edge_orbits: Vec<Orbit>,
    kernels: Vec<Subgroup>,
    tangent: Vec<CharTable>,
    smoothing: Vec<CharTable>,
    ramification: Vec<Vec<RamifiedOrbit>>,
}

fn orbit_index(orbits: &[Orbit], n: usize) -> Vec<usize> {
    let mut idx = vec![usize::MAX; n];
    for (i, o) in orbits.iter().enumerate() {
        for &p in &o.points {
            idx[p] = i;
        }
    }
    idx
}

/// Carries a character table at `rep` to the point reached by `t`.
fn transport_table(group: &FiniteGroup, table: &CharTable, t: usize) -> CharTable {
    table
        .iter()
        .map(|(&h, &v)| (group.conjugate(h, t), v))
        .collect()
}

impl CurveAction {
    pub fn new(
        group: Arc<FiniteGroup>,
        graph: DualGraph,
        data: ActionData,
    ) -> Result<Self, ActionError> {
        let g = &*group;
        let ngen = g.generators().len();
        let nv = graph.num_vertices();
        let nh = graph.num_half_edges();
        let ne = graph.num_edges();
        let nm = graph.num_marks();

        let vertices = PermAction::from_generators(g, &data.vertex_images, nv)
            .map_err(ActionError::VertexAction)?;
        let half_edges = PermAction::from_generators(g, &data.half_edge_images, nh)
            .map_err(ActionError::HalfEdgeAction)?;
        let mark_images = if data.mark_images.is_empty() {
            vec![Perm::identity(nm); ngen]
        } else {
            data.mark_images.clone()
        };
        let marks =
            PermAction::from_generators(g, &mark_images, nm).map_err(ActionError::MarkAction)?;

        for s in 0..ngen {
            let gi = g.generator_indices()[s];
            for h in 0..nh {
                if graph.vertex_of(half_edges.image(gi, h)) != vertices.image(gi, graph.vertex_of(h)) {
                    return Err(ActionError::NotCovering { generator: s, half_edge: h });
                }
            }
            for m in 0..nm {
                if graph.mark_vertex(marks.image(gi, m)) != vertices.image(gi, graph.mark_vertex(m)) {
                    return Err(ActionError::MarkNotCovering { generator: s, mark: m });
                }
            }
        }

        let mut edge_images = Vec::with_capacity(ngen);
        for s in 0..ngen {
            let gi = g.generator_indices()[s];
            let mut img = Vec::with_capacity(ne);
            for e in 0..ne {
                let [a, b] = graph.edge(e);
                let (ea, eb) = (
                    graph.edge_of(half_edges.image(gi, a)),
                    graph.edge_of(half_edges.image(gi, b)),
                );
                if ea != eb {
                    return Err(ActionError::EdgeNotPreserved { generator: s, edge: e });
                }
                img.push(ea);
            }
            edge_images.push(Perm::from_images(img).expect("induced by a bijection of half-edges"));
        }
        let edges = PermAction::from_generators(g, &edge_images, ne)
            .expect("edge action induced by a group action");

        let vertex_orbits = vertices.orbits(g);
        let half_edge_orbits = half_edges.orbits(g);
        let edge_orbits = edges.orbits(g);
        let v_orbit = orbit_index(&vertex_orbits, nv);
        let h_orbit = orbit_index(&half_edge_orbits, nh);
        let e_orbit = orbit_index(&edge_orbits, ne);

        let resolve = |p: &Perm, context: &dyn Fn() -> String| -> Result<usize, ActionError> {
            if p.degree() == g.degree() {
                if let Some(i) = g.index_of(p) {
                    return Ok(i);
                }
            }
            Err(ActionError::UnknownElement {
                context: context(),
                element: p.clone(),
            })
        };

        // kernels
        let mut declared_kernel: Vec<Option<Subgroup>> = vec![None; vertex_orbits.len()];
        for decl in &data.kernels {
            let v = decl.vertex;
            if v >= nv {
                return Err(ActionError::BadIndex { what: "kernel vertex", index: v });
            }
            let mut elems = Vec::new();
            for p in &decl.generators {
                elems.push(resolve(p, &|| format!("kernel at vertex {v}"))?);
            }
            let k = g.generated(&elems);
            for &x in k.elements() {
                if !vertices.fixes(x, v) {
                    return Err(ActionError::KernelNotInStabilizer {
                        vertex: v,
                        element: g.perm(x).clone(),
                    });
                }
            }
            let o = &vertex_orbits[v_orbit[v]];
            let t = o.transporter(v).expect("vertex in its orbit");
            let at_rep = g.conjugate_subgroup(&k, g.inv(t));
            match &declared_kernel[v_orbit[v]] {
                Some(prev) if *prev != at_rep => return Err(ActionError::KernelMismatch { vertex: v }),
                _ => declared_kernel[v_orbit[v]] = Some(at_rep),
            }
        }
        let mut kernels = vec![g.trivial_subgroup(); nv];
        for (i, o) in vertex_orbits.iter().enumerate() {
            let k_rep = declared_kernel[i].clone().unwrap_or_else(|| g.trivial_subgroup());
            if !g.is_normal_in(&k_rep, &o.stabilizer) {
                return Err(ActionError::KernelNotNormal { vertex: o.representative });
            }
            for (&v, &t) in o.points.iter().zip(&o.transversal) {
                kernels[v] = g.conjugate_subgroup(&k_rep, t);
            }
        }
        for v in 0..nv {
            for &k in kernels[v].elements() {
                for &h in graph.half_edges_at(v) {
                    if !half_edges.fixes(k, h) {
                        return Err(ActionError::KernelViolation {
                            vertex: v,
                            element: g.perm(k).clone(),
                            detail: format!("moves half-edge {h}"),
                        });
                    }
                }
                for &m in graph.marks_at(v) {
                    if !marks.fixes(k, m) {
                        return Err(ActionError::KernelViolation {
                            vertex: v,
                            element: g.perm(k).clone(),
                            detail: format!("moves mark {m}"),
                        });
                    }
                }
            }
        }

        // tangent characters
        let mut tangent_seeds: Vec<Vec<(usize, RotationChar)>> = vec![Vec::new(); half_edge_orbits.len()];
        for decl in &data.tangent_chars {
            let p = decl.half_edge;
            if p >= nh {
                return Err(ActionError::BadIndex { what: "tangent character half-edge", index: p });
            }
            let h = resolve(&decl.element, &|| format!("tangent character at half-edge {p}"))?;
            if !half_edges.fixes(h, p) {
                return Err(ActionError::NotFixing {
                    element: decl.element.clone(),
                    object: format!("half-edge {p}"),
                });
            }
            let v = graph.vertex_of(p);
            if kernels[v].contains(h) && !decl.value.is_trivial() {
                return Err(ActionError::KernelViolation {
                    vertex: v,
                    element: decl.element.clone(),
                    detail: format!("nontrivial tangent character {} at half-edge {p}", decl.value),
                });
            }
            let o = &half_edge_orbits[h_orbit[p]];
            let t = o.transporter(p).expect("half-edge in its orbit");
            tangent_seeds[h_orbit[p]].push((g.conjugate(h, g.inv(t)), decl.value));
        }
        let mut tangent = vec![CharTable::new(); nh];
        for (i, o) in half_edge_orbits.iter().enumerate() {
            let r = o.representative;
            let kr = &kernels[graph.vertex_of(r)];
            let mut seeds = tangent_seeds[i].clone();
            seeds.extend(g.generating_set(kr).into_iter().map(|k| (k, RotationChar::TRIVIAL)));
            let table = g.extend_character(&seeds).map_err(|c| ActionError::TangentConflict {
                half_edge: r,
                element: g.perm(c.element).clone(),
                first: c.first,
                second: c.second,
            })?;
            let missing: Vec<Perm> = o
                .stabilizer
                .elements()
                .iter()
                .filter(|h| !table.contains_key(h))
                .map(|&h| g.perm(h).clone())
                .collect();
            if !missing.is_empty() {
                return Err(ActionError::TangentGap { half_edge: r, missing });
            }
            for (&h, &c) in &table {
                if c.is_trivial() && !kr.contains(h) {
                    return Err(ActionError::NotFaithful {
                        half_edge: r,
                        element: g.perm(h).clone(),
                    });
                }
            }
            for (&p, &t) in o.points.iter().zip(&o.transversal) {
                tangent[p] = transport_table(g, &table, t);
            }
        }

        // smoothing characters
        let mut smoothing_seeds: Vec<Vec<(usize, RotationChar)>> = vec![Vec::new(); edge_orbits.len()];
        for decl in &data.smoothing_chars {
            let n = decl.edge;
            if n >= ne {
                return Err(ActionError::BadIndex { what: "smoothing character edge", index: n });
            }
            let h = resolve(&decl.element, &|| format!("smoothing character at edge {n}"))?;
            if !edges.fixes(h, n) {
                return Err(ActionError::NotFixing {
                    element: decl.element.clone(),
                    object: format!("edge {n}"),
                });
            }
            let o = &edge_orbits[e_orbit[n]];
            let t = o.transporter(n).expect("edge in its orbit");
            smoothing_seeds[e_orbit[n]].push((g.conjugate(h, g.inv(t)), decl.value));
        }
        let mut smoothing = vec![CharTable::new(); ne];
        for (i, o) in edge_orbits.iter().enumerate() {
            let n = o.representative;
            let [a, b] = graph.edge(n);
            let mut seeds: Vec<(usize, RotationChar)> = o
                .stabilizer
                .elements()
                .iter()
                .filter(|&&h| half_edges.fixes(h, a))
                .map(|&h| (h, tangent[a][&h].mul(tangent[b][&h])))
                .collect();
            seeds.extend(smoothing_seeds[i].iter().copied());
            let table = g.extend_character(&seeds).map_err(|c| ActionError::SmoothingConflict {
                edge: n,
                element: g.perm(c.element).clone(),
                first: c.first,
                second: c.second,
            })?;
            let missing: Vec<Perm> = o
                .stabilizer
                .elements()
                .iter()
                .filter(|h| !table.contains_key(h))
                .map(|&h| g.perm(h).clone())
                .collect();
            if !missing.is_empty() {
                return Err(ActionError::SmoothingGap { edge: n, missing });
            }
            for (&e, &t) in o.points.iter().zip(&o.transversal) {
                smoothing[e] = transport_table(g, &table, t);
            }
        }

        // ramification orbits
        let mut ramification: Vec<Vec<RamifiedOrbit>> = vec![Vec::new(); nv];
        for (index, decl) in data.ramification.iter().enumerate() {
            let v = decl.vertex;
            if v >= nv {
                return Err(ActionError::BadIndex { what: "ramification vertex", index: v });
            }
            let h = resolve(&decl.element, &|| format!("ramification orbit {index}"))?;
            let fail = |reason: String| ActionError::Ramification { index, reason };
            if !vertices.fixes(h, v) {
                return Err(fail(format!("{} does not fix vertex {v}", decl.element)));
            }
            let k = &kernels[v];
            if k.contains(h) {
                return Err(fail(format!(
                    "{} acts trivially on the component of vertex {v}",
                    decl.element
                )));
            }
            let e = g.order_modulo(h, k);
            if decl.order as usize != e {
                return Err(fail(format!(
                    "declared order {} but {} has order {e} on the component",
                    decl.order, decl.element
                )));
            }
            if decl.value.order() as usize != e {
                return Err(fail(format!(
                    "character {} does not have exact order {e}",
                    decl.value
                )));
            }
            let mut gens = vec![h];
            gens.extend(g.generating_set(k));
            let stab = g.generated(&gens);
            let o = &vertex_orbits[v_orbit[v]];
            let t = o.transporter(v).expect("vertex in its orbit");
            let ti = g.inv(t);
            let (h_rep, stab_rep) = (g.conjugate(h, ti), g.conjugate_subgroup(&stab, ti));
            for (&w, &tw) in o.points.iter().zip(&o.transversal) {
                ramification[w].push(RamifiedOrbit {
                    generator: g.conjugate(h_rep, tw),
                    stabilizer: g.conjugate_subgroup(&stab_rep, tw),
                    value: decl.value,
                    order: decl.order,
                });
            }
        }

        Ok(CurveAction {
            group,
            graph,
            data,
            vertices,
            half_edges,
            edges,
            marks,
            vertex_orbits,
            half_edge_orbits,
            edge_orbits,
            kernels,
            tangent,
            smoothing,
            ramification,
        })
    }

    /// The action of the trivial group.
    pub fn trivial(graph: DualGraph) -> Self {
        let group = Arc::new(FiniteGroup::trivial());
        let data = ActionData::identity(&group, &graph);
        CurveAction::new(group, graph, data).expect("trivial action is valid")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn data(&self) -> &ActionData {
        &self.data
    }

    pub fn vertex_action(&self) -> &PermAction {
        &self.vertices
    }

    pub fn half_edge_action(&self) -> &PermAction {
        &self.half_edges
    }

    pub fn edge_action(&self) -> &PermAction {
        &self.edges
    }

    pub fn mark_action(&self) -> &PermAction {
        &self.marks
    }

    pub fn vertex_orbits(&self) -> &[Orbit] {
        &self.vertex_orbits
    }

    pub fn half_edge_orbits(&self) -> &[Orbit] {
        &self.half_edge_orbits
    }

    pub fn edge_orbits(&self) -> &[Orbit] {
        &self.edge_orbits
    }

    pub fn kernel(&self, v: usize) -> &Subgroup {
        &self.kernels[v]
    }

    /// Character of `h` on the tangent line at half-edge `p`, if `h` fixes `p`.
    pub fn tangent_char(&self, h: usize, p: usize) -> Option<RotationChar> {
        self.tangent[p].get(&h).copied()
    }

    /// Character of `h` on the smoothing parameter of edge `n`, if `h` fixes `n`.
    pub fn smoothing_char(&self, h: usize, n: usize) -> Option<RotationChar> {
        self.smoothing[n].get(&h).copied()
    }

    pub fn tangent_table(&self, p: usize) -> &CharTable {
        &self.tangent[p]
    }

    pub fn smoothing_table(&self, n: usize) -> &CharTable {
        &self.smoothing[n]
    }

    /// Ramified point orbits on the component of `v`, normalized to `v`.
    pub fn ramification_at(&self, v: usize) -> &[RamifiedOrbit] {
        &self.ramification[v]
    }

    /// Whether `h` fixes edge `n` and exchanges its branches.
    pub fn swaps(&self, h: usize, n: usize) -> bool {
        let [a, b] = self.graph.edge(n);
        self.half_edges.image(h, a) == b
    }

    /// The first nonidentity element acting trivially on the whole curve.
    pub fn non_faithful_element(&self) -> Option<usize> {
        (1..self.group.order()).find(|&g| {
            (0..self.graph.num_vertices()).all(|v| self.kernels[v].contains(g))
        })
    }

    fn check_t1_preconditions(&self) -> Result<(), ActionError> {
        if self.graph.num_marks() > 0 {
            return Err(GraphError::MarkedCurve.into());
        }
        if !self.graph.is_connected() {
            return Err(GraphError::Disconnected(self.graph.num_components()).into());
        }
        Ok(())
    }

    /// Number of edge orbits whose stabilizer fixes the smoothing parameter.
    pub fn node_invariants(&self) -> usize {
        self.edge_orbits
            .iter()
            .filter(|o| self.smoothing[o.representative].values().all(|c| c.is_trivial()))
            .count()
    }

    /// Number of half-edge orbits whose stabilizer fixes the tangent line.
    pub fn branch_invariants(&self) -> usize {
        self.half_edge_orbits
            .iter()
            .filter(|o| self.tangent[o.representative].values().all(|c| c.is_trivial()))
            .count()
    }

    /// Quotient genus and branch points of the component orbit containing `vertex`.
    pub fn quotient_signature(&self, vertex: usize) -> Result<QuotientSignature, ActionError> {
        if vertex >= self.graph.num_vertices() {
            return Err(ActionError::BadIndex { what: "vertex", index: vertex });
        }
        let orbit = self
            .vertex_orbits
            .iter()
            .find(|o| o.points.binary_search(&vertex).is_ok())
            .expect("every vertex lies in an orbit");
        let v = orbit.representative;
        let stab = &orbit.stabilizer;
        let kernel = &self.kernels[v];
        let effective = stab.order() / kernel.order();

        let g = &*self.group;
        let mut orders: Vec<u32> = Vec::new();
        // Local monodromy of each branch point: the stabilizer element
        // rotating the tangent line by exactly 1/e.
        let mut monodromy: Vec<usize> = Vec::new();
        for r in &self.ramification[v] {
            orders.push(r.order);
            let e = r.order as i64;
            let k = (1..e).find(|k| (k * r.value.numerator() as i64) % e == 1).unwrap_or(1);
            monodromy.push(g.pow(r.generator, k as usize));
        }
        let mut seen = vec![false; self.graph.num_half_edges()];
        for &p in self.graph.half_edges_at(v) {
            if seen[p] {
                continue;
            }
            for &s in stab.elements() {
                seen[self.half_edges.image(s, p)] = true;
            }
            let e = self.tangent[p].len() / kernel.order();
            if e >= 2 {
                orders.push(e as u32);
                let c = self.tangent[p]
                    .iter()
                    .find(|(_, c)| c.numerator() == 1 && c.order() == e as u64)
                    .map(|(&x, _)| x)
                    .expect("a faithful cyclic stabilizer has a generator of character 1/e");
                monodromy.push(c);
            }
        }

        let h = effective as i64;
        let ram: i64 = orders.iter().map(|&e| (h / e as i64) * (e as i64 - 1)).sum();
        let euler = 2 * self.graph.genus(v) as i64 - 2;
        let rest = euler - ram;
        if rest % (2 * h) != 0 || rest / h < -2 {
            return Err(ActionError::InconsistentRamification {
                vertex: v,
                residue: format!(
                    "2g-2 = {euler}, ramification contributes {ram}, leaving {rest}, \
                     which is not |H| * (2g' - 2) for |H| = {h} and an integer g' >= 0"
                ),
            });
        }
        let g_prime = (rest / (2 * h) + 1) as u64;
        self.check_monodromy(v, stab, &monodromy, g_prime)?;
        let b = orders.len();
        Ok(QuotientSignature {
            vertex_orbit: v,
            effective_order: effective,
            g_prime,
            b,
            ramification_orders: orders,
            contribution: 3 * g_prime as i64 - 3 + b as i64,
        })
    }

    /// Necessary conditions for the branched cover to exist: the product of
    /// the local monodromies is trivial in the abelianization of
    /// `Stab(v)/K_v`, and over a rational quotient they generate it.
    fn check_monodromy(&self, v: usize, stab: &Subgroup, monodromy: &[usize], g_prime: u64) -> Result<(), ActionError> {
        let g = &*self.group;
        let kernel = &self.kernels[v];
        let mut gens: Vec<usize> = kernel.elements().to_vec();
        for &a in stab.elements() {
            for &b in stab.elements() {
                gens.push(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
            }
        }
        let derived = g.generated(&gens);
        let product = monodromy.iter().fold(g.identity(), |acc, &c| g.mul(acc, c));
        if !derived.contains(product) {
            let list: Vec<String> = monodromy.iter().map(|&c| g.perm(c).to_string()).collect();
            return Err(ActionError::InconsistentRamification {
                vertex: v,
                residue: format!(
                    "the local monodromies [{}] multiply to {}, which is not trivial in the \
                     abelianization of the effective group",
                    list.join(", "),
                    g.perm(product)
                ),
            });
        }
        if g_prime == 0 {
            let mut gens = kernel.elements().to_vec();
            gens.extend_from_slice(monodromy);
            if g.generated(&gens).order() != stab.order() {
                return Err(ActionError::InconsistentRamification {
                    vertex: v,
                    residue: "the quotient is rational but the local monodromies do not generate the effective group"
                        .into(),
                });
            }
        }
        Ok(())
    }

    /// One signature per component orbit, in orbit order.
    pub fn quotient_signatures(&self) -> Result<Vec<QuotientSignature>, ActionError> {
        self.vertex_orbits
            .iter()
            .map(|o| self.quotient_signature(o.representative))
            .collect()
    }

    /// Dimension of the invariant first-order deformations, by orbit counting.
    pub fn t1_equivariant(&self) -> Result<EquivariantT1, ActionError> {
        self.check_t1_preconditions()?;
        let node_inv = self.node_invariants() as i64;
        let branch_inv = self.branch_invariants() as i64;
        let minus_chi_inv: i64 = self
            .quotient_signatures()?
            .iter()
            .map(|s| s.contribution)
            .sum();
        Ok(EquivariantT1 {
            node_inv,
            branch_inv,
            minus_chi_inv,
            total: node_inv + branch_inv + minus_chi_inv,
        })
    }

    /// The same count by an independent route: trace averages for the node
    /// and branch representations, and per-element fixed-point counts
    /// (Lefschetz for the quotient Euler characteristic, Burnside for the
    /// number of branch points) for the normalization term.
    pub fn t1_equivariant_oracle(&self) -> Result<EquivariantT1, ActionError> {
        self.check_t1_preconditions()?;
        let g = &*self.group;
        let trace_err = |e: GroupError| ActionError::InconsistentCharacter(e.to_string());
        let node_inv = invariant_dimension_trace(g, &self.edges, |h, n| self.smoothing_char(h, n))
            .map_err(trace_err)? as i64;
        let branch_inv =
            invariant_dimension_trace(g, &self.half_edges, |h, p| self.tangent_char(h, p))
                .map_err(trace_err)? as i64;

        let order = g.order() as i64;
        let mut minus_chi = Ratio::from_integer(0i64);
        for v in 0..self.graph.num_vertices() {
            let stab: Vec<usize> = (0..g.order()).filter(|&s| self.vertices.fixes(s, v)).collect();
            let kernel = &self.kernels[v];
            let here = self.graph.half_edges_at(v);
            let ramified_branches = here
                .iter()
                .filter(|&&p| {
                    (0..g.order()).filter(|&s| self.half_edges.fixes(s, p)).count() > kernel.order()
                })
                .count() as i64;
            let s_order = stab.len() as i64;
            let points_total: i64 = ramified_branches
                + self.ramification[v]
                    .iter()
                    .map(|r| s_order / r.stabilizer.order() as i64)
                    .sum::<i64>();
            let mut lefschetz = 0i64;
            let mut burnside = 0i64;
            for &s in &stab {
                if kernel.contains(s) {
                    lefschetz += 2 - 2 * self.graph.genus(v) as i64;
                    burnside += points_total;
                } else {
                    let mut fixed = here.iter().filter(|&&p| self.half_edges.fixes(s, p)).count() as i64;
                    for r in &self.ramification[v] {
                        let conj_hits = stab
                            .iter()
                            .filter(|&&t| r.stabilizer.contains(g.mul(g.mul(g.inv(t), s), t)))
                            .count();
                        fixed += (conj_hits / r.stabilizer.order()) as i64;
                    }
                    lefschetz += fixed;
                    burnside += fixed;
                }
            }
            let quotient_euler = Ratio::new(lefschetz, s_order);
            let b = Ratio::new(burnside, s_order);
            let two_g_minus_two = -quotient_euler;
            if !two_g_minus_two.is_integer()
                || two_g_minus_two.to_integer() % 2 != 0
                || two_g_minus_two.to_integer() < -2
                || !b.is_integer()
            {
                return Err(ActionError::InconsistentRamification {
                    vertex: v,
                    residue: format!(
                        "fixed-point count gives quotient Euler characteristic {quotient_euler} \
                         and {b} branch points"
                    ),
                });
            }
            let contribution = Ratio::from_integer(3) * two_g_minus_two / 2 + b;
            minus_chi += contribution * Ratio::new(s_order, order);
        }
        if !minus_chi.is_integer() {
            return Err(ActionError::InconsistentCharacter(format!(
                "normalization term {minus_chi} is not an integer"
            )));
        }
        let minus_chi_inv = minus_chi.to_integer();
        Ok(EquivariantT1 {
            node_inv,
            branch_inv,
            minus_chi_inv,
            total: node_inv + branch_inv + minus_chi_inv,
        })
    }

    /// Node and branch invariant counts by orbit counting through the
    /// generic finite-group routine (used to cross-check the cached tables).
    pub fn invariant_counts_by_orbits(&self) -> (usize, usize) {
        let g = &*self.group;
        (
            invariant_dimension_orbits(g, &self.edges, |h, n| self.smoothing_char(h, n)),
            invariant_dimension_orbits(g, &self.half_edges, |h, p| self.tangent_char(h, p)),
        )
    }
}

/// Evaluates many actions, in parallel when the `parallel` feature is on.
pub fn t1_equivariant_batch(actions: &[CurveAction]) -> Vec<Result<EquivariantT1, ActionError>> {
    crate::parallel::map(actions, |a| a.t1_equivariant())
}

/// Sequential reference for [`t1_equivariant_batch`].
pub fn t1_equivariant_batch_sequential(
    actions: &[CurveAction],
) -> Vec<Result<EquivariantT1, ActionError>> {
    actions.iter().map(|a| a.t1_equivariant()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_graph::GraphData;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
        let c: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
        Perm::from_cycles(n, &c).unwrap()
    }

    fn half() -> RotationChar {
        RotationChar::new(1, 2).unwrap()
    }

    /// One genus-2 component with a self-node; the involution fixes the
    /// component, exchanges the branches, and has two further fixed points.
    fn quartic_node() -> CurveAction {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData {
            genera: vec![2],
            half_edges: vec![0, 0],
            edges: vec![[0, 1]],
            marks: vec![],
        })
        .unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![cyc(2, &[&[0, 1]])],
            smoothing_chars: vec![SmoothingCharDecl {
                element: sigma.clone(),
                edge: 0,
                value: RotationChar::TRIVIAL,
            }],
            ramification: vec![
                RamificationDecl { vertex: 0, element: sigma.clone(), value: half(), order: 2 },
                RamificationDecl { vertex: 0, element: sigma, value: half(), order: 2 },
            ],
            ..Default::default()
        };
        CurveAction::new(group, graph, data).unwrap()
    }

    /// Involution fixing a self-node of a genus-2 component and both of its
    /// branches, with the given tangent characters.
    fn fixed_branches(chars: [RotationChar; 2], smoothing: Option<RotationChar>) -> Result<CurveAction, ActionError> {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData {
            genera: vec![2],
            half_edges: vec![0, 0],
            edges: vec![[0, 1]],
            marks: vec![],
        })
        .unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![Perm::identity(2)],
            tangent_chars: vec![
                TangentCharDecl { element: sigma.clone(), half_edge: 0, value: chars[0] },
                TangentCharDecl { element: sigma.clone(), half_edge: 1, value: chars[1] },
            ],
            smoothing_chars: smoothing
                .map(|value| vec![SmoothingCharDecl { element: sigma.clone(), edge: 0, value }])
                .unwrap_or_default(),
            ..Default::default()
        };
        CurveAction::new(group, graph, data)
    }

    #[test]
    fn trivial_action_validates() {
        let graph = DualGraph::validate(GraphData {
            genera: vec![0, 0],
            half_edges: vec![0, 1, 0, 1, 0, 1],
            edges: vec![[0, 1], [2, 3], [4, 5]],
            marks: vec![],
        })
        .unwrap();
        let a = CurveAction::trivial(graph);
        assert_eq!(a.node_invariants(), 3);
        assert_eq!(a.branch_invariants(), 6);
        let t = a.t1_equivariant().unwrap();
        assert_eq!((t.node_inv, t.branch_inv, t.minus_chi_inv, t.total), (3, 6, -6, 3));
    }

    #[test]
    fn quartic_node_pieces() {
        let a = quartic_node();
        assert_eq!(a.node_invariants(), 1);
        assert_eq!(a.branch_invariants(), 1);
        let s = a.quotient_signature(0).unwrap();
        assert_eq!((s.g_prime, s.b, s.contribution), (1, 2, 2));
        assert_eq!(s.reconstructed_euler(), 2);
        let t = a.t1_equivariant().unwrap();
        assert_eq!((t.node_inv, t.branch_inv, t.minus_chi_inv, t.total), (1, 1, 2, 4));
        assert_eq!(a.t1_equivariant_oracle().unwrap(), t);
    }

    #[test]
    fn product_rule_for_smoothing_character() {
        // (-1)(-1) = +1, so declaring -1 is a conflict
        let err = fixed_branches([half(), half()], Some(half())).unwrap_err();
        assert!(matches!(err, ActionError::SmoothingConflict { .. }), "{err}");
        let ok = fixed_branches([half(), half()], Some(RotationChar::TRIVIAL)).unwrap();
        assert_eq!(ok.smoothing_char(1, 0), Some(RotationChar::TRIVIAL));
        let derived = fixed_branches([half(), half()], None).unwrap();
        assert_eq!(derived.smoothing_char(1, 0), Some(RotationChar::TRIVIAL));
        assert_eq!(derived.branch_invariants(), 0);
        assert_eq!(derived.node_invariants(), 1);
    }

    #[test]
    fn node_with_mixed_branch_characters_is_not_invariant() {
        // the involution fixes the branch at w with trivial tangent character,
        // so it must act trivially on w's component
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData {
            genera: vec![2, 2],
            half_edges: vec![0, 1],
            edges: vec![[0, 1]],
            marks: vec![],
        })
        .unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(2)],
            half_edge_images: vec![Perm::identity(2)],
            tangent_chars: vec![TangentCharDecl { element: sigma.clone(), half_edge: 0, value: half() }],
            kernels: vec![KernelDecl { vertex: 1, generators: vec![sigma.clone()] }],
            ramification: (0..5)
                .map(|_| RamificationDecl { vertex: 0, element: sigma.clone(), value: half(), order: 2 })
                .collect(),
            ..Default::default()
        };
        let a = CurveAction::new(group, graph, data).unwrap();
        assert_eq!(a.smoothing_char(1, 0), Some(half()));
        assert_eq!(a.node_invariants(), 0);
        let sig0 = a.quotient_signature(0).unwrap();
        assert_eq!((sig0.g_prime, sig0.b), (0, 6));
        let sig1 = a.quotient_signature(1).unwrap();
        assert_eq!((sig1.g_prime, sig1.b, sig1.effective_order), (2, 0, 1));
        assert_eq!(a.t1_equivariant().unwrap(), a.t1_equivariant_oracle().unwrap());
    }

    #[test]
    fn unfaithful_tangent_data_is_rejected() {
        let err = fixed_branches([half(), RotationChar::TRIVIAL], None).unwrap_err();
        assert!(matches!(err, ActionError::NotFaithful { half_edge: 1, .. }), "{err}");
    }

    #[test]
    fn missing_tangent_character_is_a_gap() {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData {
            genera: vec![2],
            half_edges: vec![0, 0],
            edges: vec![[0, 1]],
            marks: vec![],
        })
        .unwrap();
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![Perm::identity(2)],
            ..Default::default()
        };
        let err = CurveAction::new(group, graph, data).unwrap_err();
        assert!(matches!(err, ActionError::TangentGap { .. }), "{err}");
    }

    #[test]
    fn swap_needs_declared_smoothing_character() {
        let a = quartic_node();
        let mut data = a.data().clone();
        data.smoothing_chars.clear();
        let err = CurveAction::new(a.group().clone(), a.graph().clone(), data).unwrap_err();
        assert!(matches!(err, ActionError::SmoothingGap { .. }), "{err}");
    }

    #[test]
    fn hyperelliptic_signature() {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData { genera: vec![2], ..Default::default() }).unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![Perm::identity(0)],
            ramification: (0..6)
                .map(|_| RamificationDecl { vertex: 0, element: sigma.clone(), value: half(), order: 2 })
                .collect(),
            ..Default::default()
        };
        let a = CurveAction::new(group, graph, data).unwrap();
        let s = a.quotient_signature(0).unwrap();
        assert_eq!((s.g_prime, s.b, s.contribution), (0, 6, 3));
        assert_eq!(s.reconstructed_euler(), 2);
    }

    #[test]
    fn inconsistent_ramification_reports_residue() {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData { genera: vec![3], ..Default::default() }).unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![Perm::identity(0)],
            ramification: (0..3)
                .map(|_| RamificationDecl { vertex: 0, element: sigma.clone(), value: half(), order: 2 })
                .collect(),
            ..Default::default()
        };
        let a = CurveAction::new(group, graph, data).unwrap();
        let err = a.quotient_signature(0).unwrap_err();
        assert!(matches!(err, ActionError::InconsistentRamification { vertex: 0, .. }));
        assert!(a.t1_equivariant_oracle().is_err());
    }

    #[test]
    fn monodromy_must_be_realizable() {
        let a = cyc(4, &[&[0, 1]]);
        let b = cyc(4, &[&[2, 3]]);
        let group = Arc::new(FiniteGroup::enumerate(vec![a.clone(), b.clone()], 4).unwrap());
        let action = |genus: u32, stabs: &[&Perm]| {
            let graph = DualGraph::validate(GraphData { genera: vec![genus], ..Default::default() }).unwrap();
            let data = ActionData {
                vertex_images: vec![Perm::identity(1); 2],
                half_edge_images: vec![Perm::identity(0); 2],
                ramification: stabs
                    .iter()
                    .map(|&h| RamificationDecl { vertex: 0, element: h.clone(), value: half(), order: 2 })
                    .collect(),
                ..Default::default()
            };
            CurveAction::new(group.clone(), graph, data).unwrap()
        };
        // Riemann-Hurwitz alone allows both; only the first cover exists
        assert_eq!(action(3, &[&a, &a]).quotient_signature(0).unwrap().g_prime, 1);
        let err = action(3, &[&a, &b]).quotient_signature(0).unwrap_err();
        assert!(err.to_string().contains("abelianization"), "{err}");
        // over a rational quotient the monodromies must generate
        assert_eq!(action(3, &[&a, &a, &a, &a, &b, &b]).quotient_signature(0).unwrap().g_prime, 0);
        assert!(action(3, &[&a; 6]).quotient_signature(0).is_err());
    }

    #[test]
    fn ramification_order_must_match() {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData { genera: vec![2], ..Default::default() }).unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![Perm::identity(0)],
            ramification: vec![RamificationDecl { vertex: 0, element: sigma, value: half(), order: 3 }],
            ..Default::default()
        };
        let err = CurveAction::new(group, graph, data).unwrap_err();
        assert!(matches!(err, ActionError::Ramification { index: 0, .. }));
    }

    #[test]
    fn smooth_fiber_of_quartic() {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData { genera: vec![3], ..Default::default() }).unwrap();
        let sigma = cyc(2, &[&[0, 1]]);
        let data = ActionData {
            vertex_images: vec![Perm::identity(1)],
            half_edge_images: vec![Perm::identity(0)],
            ramification: (0..4)
                .map(|_| RamificationDecl { vertex: 0, element: sigma.clone(), value: half(), order: 2 })
                .collect(),
            ..Default::default()
        };
        let a = CurveAction::new(group, graph, data).unwrap();
        let t = a.t1_equivariant().unwrap();
        assert_eq!((t.node_inv, t.branch_inv, t.minus_chi_inv, t.total), (0, 0, 4, 4));
    }

    #[test]
    fn homomorphism_failure() {
        let group = Arc::new(FiniteGroup::cyclic(2));
        let graph = DualGraph::validate(GraphData { genera: vec![2, 2, 2], ..Default::default() });
        // disconnected graphs need the flag
        assert!(graph.is_err());
        let graph = DualGraph::validate_with(GraphData { genera: vec![2, 2, 2], ..Default::default() }, true).unwrap();
        let data = ActionData {
            vertex_images: vec![cyc(3, &[&[0, 1, 2]])],
            half_edge_images: vec![Perm::identity(0)],
            ..Default::default()
        };
        assert!(matches!(
            CurveAction::new(group, graph, data),
            Err(ActionError::VertexAction(GroupError::NotAnAction(_)))
        ));
    }
}
