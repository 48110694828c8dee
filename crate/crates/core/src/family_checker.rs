//! Equivariant smoothing of node orbits, and comparison of the invariant
//! deformation dimension across the strata of a family.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve_graph::{DualGraph, GraphData};
use crate::equivariant_action::{
    ActionData, ActionError, CurveAction, EquivariantT1, KernelDecl, RamificationDecl,
    SmoothingCharDecl, TangentCharDecl,
};
use crate::finite_group::{FiniteGroup, RotationChar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmoothingError {
    #[error("edge {0} out of range")]
    BadEdge(usize),
    #[error("node orbit not equivariantly smoothable: {element} acts on the smoothing parameter of edge {edge} by {value}")]
    NotSmoothable {
        edge: usize,
        element: String,
        value: RotationChar,
    },
    #[error("unsupported local model at edge {edge}: stabilizer of order {order} with {swappers} branch-swapping elements")]
    UnsupportedModel {
        edge: usize,
        order: usize,
        swappers: usize,
    },
    #[error("smoothed action failed validation: {0}")]
    Invalid(#[from] ActionError),
}

/// Local model of a node orbit, by the stabilizer of one of its nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalModel {
    /// Trivial stabilizer.
    Free,
    /// Every stabilizer element preserves both branches.
    BranchPreserving,
    /// Stabilizer of order two exchanging the branches.
    Swap,
}

impl LocalModel {
    pub fn label(self) -> &'static str {
        match self {
            LocalModel::Free => "free",
            LocalModel::BranchPreserving => "branch-preserving",
            LocalModel::Swap => "swap",
        }
    }
}

/// Classifies the node orbit of `edge` and checks that it has an invariant
/// smoothing direction.
pub fn local_model(action: &CurveAction, edge: usize) -> Result<LocalModel, SmoothingError> {
    let graph = action.graph();
    if edge >= graph.num_edges() {
        return Err(SmoothingError::BadEdge(edge));
    }
    let g = action.group();
    let table = action.smoothing_table(edge);
    if let Some((&h, &value)) = table.iter().find(|(_, c)| !c.is_trivial()) {
        return Err(SmoothingError::NotSmoothable {
            edge,
            element: g.perm(h).to_string(),
            value,
        });
    }
    let swappers = table.keys().filter(|&&h| action.swaps(h, edge)).count();
    match (table.len(), swappers) {
        (1, _) => Ok(LocalModel::Free),
        (_, 0) => Ok(LocalModel::BranchPreserving),
        (2, 1) => Ok(LocalModel::Swap),
        (order, swappers) => Err(SmoothingError::UnsupportedModel { edge, order, swappers }),
    }
}

/// Smooths every node in the orbit of `edge` at once.
pub fn smooth_node_orbit(action: &CurveAction, edge: usize) -> Result<CurveAction, SmoothingError> {
    let model = local_model(action, edge)?;
    let g: &FiniteGroup = action.group();
    let graph = action.graph();
    let orbit = action
        .edge_orbits()
        .iter()
        .find(|o| o.points.binary_search(&edge).is_ok())
        .expect("edge in its orbit");
    let removed_edges = &orbit.points;
    let nv = graph.num_vertices();

    // merge the endpoints of every edge in the orbit
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &e in removed_edges {
        let [a, b] = graph.edge(e);
        let (ra, rb) = (find(&mut parent, graph.vertex_of(a)), find(&mut parent, graph.vertex_of(b)));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..nv).map(|v| find(&mut parent, v)).collect();
    let mut class_of = vec![usize::MAX; nv];
    let mut class_count = 0;
    for v in 0..nv {
        if roots[v] == v {
            class_of[v] = class_count;
            class_count += 1;
        }
    }
    let class: Vec<usize> = (0..nv).map(|v| class_of[roots[v]]).collect();

    let mut genera = vec![0i64; class_count];
    let mut members = vec![0i64; class_count];
    for v in 0..nv {
        genera[class[v]] += graph.genus(v) as i64;
        members[class[v]] += 1;
    }
    for &e in removed_edges {
        genera[class[graph.vertex_of(graph.edge(e)[0])]] += 1;
    }
    for c in 0..class_count {
        genera[c] += 1 - members[c];
    }

    let removed_half: Vec<bool> = (0..graph.num_half_edges())
        .map(|h| removed_edges.binary_search(&graph.edge_of(h)).is_ok())
        .collect();
    let mut new_half = vec![usize::MAX; graph.num_half_edges()];
    let mut half_edges = Vec::new();
    for h in 0..graph.num_half_edges() {
        if !removed_half[h] {
            new_half[h] = half_edges.len();
            half_edges.push(class[graph.vertex_of(h)]);
        }
    }
    let mut new_edge = vec![usize::MAX; graph.num_edges()];
    let mut edges = Vec::new();
    for e in 0..graph.num_edges() {
        if removed_edges.binary_search(&e).is_err() {
            let [a, b] = graph.edge(e);
            new_edge[e] = edges.len();
            edges.push([new_half[a], new_half[b]]);
        }
    }
    let data = GraphData {
        genera: genera.iter().map(|&x| x as u32).collect(),
        half_edges,
        edges,
        marks: graph.data().marks.iter().map(|&v| class[v]).collect(),
    };
    let new_graph = DualGraph::validate_with(data, !graph.is_connected())
        .map_err(ActionError::from)?;

    let mut out = ActionData::default();
    for &s in g.generator_indices() {
        let mut vimg = vec![0; class_count];
        for v in 0..nv {
            vimg[class[v]] = class[action.vertex_action().image(s, v)];
        }
        let mut himg = vec![0; new_graph.num_half_edges()];
        for h in 0..graph.num_half_edges() {
            if !removed_half[h] {
                himg[new_half[h]] = new_half[action.half_edge_action().image(s, h)];
            }
        }
        out.vertex_images.push(crate::finite_group::Perm::from_images(vimg).expect("induced"));
        out.half_edge_images.push(crate::finite_group::Perm::from_images(himg).expect("induced"));
        if graph.num_marks() > 0 {
            out.mark_images.push(action.mark_action().perm_of(s).clone());
        }
    }

    for o in action.half_edge_orbits() {
        let p = o.representative;
        if removed_half[p] {
            continue;
        }
        for (&h, &value) in action.tangent_table(p) {
            if h != g.identity() {
                out.tangent_chars.push(TangentCharDecl {
                    element: g.perm(h).clone(),
                    half_edge: new_half[p],
                    value,
                });
            }
        }
    }
    for o in action.edge_orbits() {
        let n = o.representative;
        if new_edge[n] == usize::MAX {
            continue;
        }
        for (&h, &value) in action.smoothing_table(n) {
            if action.swaps(h, n) {
                out.smoothing_chars.push(SmoothingCharDecl {
                    element: g.perm(h).clone(),
                    edge: new_edge[n],
                    value,
                });
            }
        }
    }

    let mut kernels = vec![None; class_count];
    for v in 0..nv {
        let k = action.kernel(v);
        kernels[class[v]] = Some(match kernels[class[v]].take() {
            None => k.clone(),
            Some(prev) => g.intersection(&prev, k),
        });
    }
    for (c, k) in kernels.iter().enumerate() {
        let k = k.as_ref().expect("every class has a vertex");
        if !k.is_trivial() {
            out.kernels.push(KernelDecl {
                vertex: c,
                generators: g.generating_set(k).iter().map(|&x| g.perm(x).clone()).collect(),
            });
        }
    }
    let kernel_of = |c: usize| kernels[c].as_ref().expect("every class has a vertex");
    for r in &action.data().ramification {
        let c = class[r.vertex];
        let h = g.index_of(&r.element).expect("validated element");
        out.ramification.push(RamificationDecl {
            vertex: c,
            element: r.element.clone(),
            value: r.value,
            order: g.order_modulo(h, kernel_of(c)) as u32,
        });
    }
    if model == LocalModel::Swap {
        let sigma = *action
            .smoothing_table(edge)
            .keys()
            .find(|&&h| action.swaps(h, edge))
            .expect("swap model has a swapper");
        let c = class[graph.vertex_of(graph.edge(edge)[0])];
        let half = RotationChar::new(1, 2).expect("1/2");
        for _ in 0..2 {
            out.ramification.push(RamificationDecl {
                vertex: c,
                element: g.perm(sigma).clone(),
                value: half,
                order: g.order_modulo(sigma, kernel_of(c)) as u32,
            });
        }
    }

    Ok(CurveAction::new(action.group().clone(), new_graph, out)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothingStep {
    /// Representative edge in the numbering of the stratum being smoothed.
    pub edge: usize,
    pub model: LocalModel,
    pub orbit_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub edge: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainEnd {
    /// The last stratum has no nodes.
    Smooth,
    /// Every remaining node orbit is obstructed.
    Obstructed(Vec<Obstruction>),
}

#[derive(Debug, Clone)]
pub struct SmoothingChain {
    /// The input followed by each successive smoothing.
    pub strata: Vec<CurveAction>,
    pub steps: Vec<SmoothingStep>,
    pub end: ChainEnd,
}

/// Smooths node orbits one at a time, always taking the smoothable orbit
/// with the least edge, until none is left.
pub fn smoothing_chain(action: &CurveAction) -> SmoothingChain {
    let mut strata = vec![action.clone()];
    let mut steps = Vec::new();
    loop {
        let current = strata.last().expect("nonempty");
        if current.graph().num_edges() == 0 {
            return SmoothingChain { strata, steps, end: ChainEnd::Smooth };
        }
        let mut obstructions = Vec::new();
        let mut next = None;
        for o in current.edge_orbits() {
            let e = o.representative;
            match local_model(current, e).and_then(|m| smooth_node_orbit(current, e).map(|a| (m, a))) {
                Ok((model, a)) => {
                    next = Some((SmoothingStep { edge: e, model, orbit_size: o.len() }, a));
                    break;
                }
                Err(err) => obstructions.push(Obstruction { edge: e, reason: err.to_string() }),
            }
        }
        match next {
            Some((step, a)) => {
                steps.push(step);
                strata.push(a);
            }
            None => {
                return SmoothingChain {
                    strata,
                    steps,
                    end: ChainEnd::Obstructed(obstructions),
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct FamilyStratum {
    pub label: String,
    pub action: CurveAction,
}

impl FamilyStratum {
    pub fn new(label: impl Into<String>, action: CurveAction) -> Self {
        FamilyStratum { label: label.into(), action }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumValue {
    pub label: String,
    pub nodes: usize,
    pub result: Result<EquivariantT1, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Constant { value: i64 },
    Violation {
        first: String,
        first_value: i64,
        second: String,
        second_value: i64,
    },
    /// Some strata could not be evaluated.
    Failed { labels: Vec<String> },
}

/// The bound `dim(special) >= dim(general)` for a pair of strata with
/// different numbers of nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemicontinuityCheck {
    pub special: String,
    pub general: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub values: Vec<StratumValue>,
    pub verdict: Verdict,
    pub semicontinuity: Vec<SemicontinuityCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("a family needs at least two strata, got {0}")]
    TooFewStrata(usize),
    #[error("stratum {0} uses a different group")]
    GroupMismatch(String),
}

pub fn check_constancy(strata: &[FamilyStratum]) -> Result<ConstancyReport, FamilyError> {
    if strata.len() < 2 {
        return Err(FamilyError::TooFewStrata(strata.len()));
    }
    let group = strata[0].action.group();
    for s in &strata[1..] {
        if !Arc::ptr_eq(group, s.action.group()) && **group != **s.action.group() {
            return Err(FamilyError::GroupMismatch(s.label.clone()));
        }
    }
    let values: Vec<StratumValue> = crate::parallel::map(strata, |s| StratumValue {
        label: s.label.clone(),
        nodes: s.action.graph().num_edges(),
        result: s.action.t1_equivariant().map_err(|e| e.to_string()),
    });

    Ok(report_from_values(values))
}

/// Verdict and semicontinuity checks for already computed stratum values.
pub fn report_from_values(values: Vec<StratumValue>) -> ConstancyReport {
    let failed: Vec<String> = values
        .iter()
        .filter(|v| v.result.is_err())
        .map(|v| v.label.clone())
        .collect();
    let totals: Vec<Option<i64>> = values.iter().map(|v| v.result.as_ref().ok().map(|t| t.total)).collect();

    let verdict = if !failed.is_empty() {
        Verdict::Failed { labels: failed }
    } else {
        let first = totals[0].expect("no failures");
        match totals.iter().position(|&t| t != Some(first)) {
            None => Verdict::Constant { value: first },
            Some(i) => Verdict::Violation {
                first: values[0].label.clone(),
                first_value: first,
                second: values[i].label.clone(),
                second_value: totals[i].expect("no failures"),
            },
        }
    };

    let mut semicontinuity = Vec::new();
    for i in 0..values.len() {
        for j in 0..values.len() {
            if values[i].nodes > values[j].nodes {
                if let (Some(a), Some(b)) = (totals[i], totals[j]) {
                    semicontinuity.push(SemicontinuityCheck {
                        special: values[i].label.clone(),
                        general: values[j].label.clone(),
                        holds: a >= b,
                    });
                }
            }
        }
    }

    ConstancyReport {
        values,
        verdict,
        semicontinuity,
    }
}

/// The strata of a smoothing chain, labelled by position.
pub fn chain_strata(chain: &SmoothingChain) -> Vec<FamilyStratum> {
    chain
        .strata
        .iter()
        .enumerate()
        .map(|(i, a)| FamilyStratum::new(format!("stratum {i}"), a.clone()))
        .collect()
}
