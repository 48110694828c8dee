//! Writing documents back to JSON in the input schema.

use std::collections::BTreeMap;

use serde::Serialize;

use super::parse::{
    ActionSpec, CurveSpec, GroupSpec, InputDocument, SurfaceSpec, DEFAULT_GROUP, FORMAT_VERSION,
};
use crate::equivariant_action::CurveAction;
use crate::finite_group::{FiniteGroup, Perm, RotationChar};

type Cycles = Vec<Vec<usize>>;

fn cycles(p: &Perm) -> Cycles {
    p.cycles()
}

#[derive(Serialize)]
struct WireGroup {
    degree: usize,
    generators: Vec<Cycles>,
}

#[derive(Serialize)]
struct WireVertex {
    genus: u32,
}

#[derive(Serialize)]
struct WireAt {
    vertex: usize,
}

#[derive(Serialize)]
struct WireCurve {
    vertices: Vec<WireVertex>,
    half_edges: Vec<WireAt>,
    edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    marks: Vec<WireAt>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    allow_disconnected: bool,
}

#[derive(Serialize)]
struct WireTangent {
    element: Cycles,
    half_edge: usize,
    char: RotationChar,
}

#[derive(Serialize)]
struct WireSmoothing {
    element: Cycles,
    edge: usize,
    char: RotationChar,
}

#[derive(Serialize)]
struct WireKernel {
    vertex: usize,
    generators: Vec<Cycles>,
}

#[derive(Serialize)]
struct WireRamification {
    vertex: usize,
    element: Cycles,
    char: RotationChar,
    order: u32,
}

#[derive(Serialize)]
struct WireAction {
    curve: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<String>,
    vertex_images: Vec<Cycles>,
    half_edge_images: Vec<Cycles>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    mark_images: Vec<Cycles>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    tangent_chars: Vec<WireTangent>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    smoothing_chars: Vec<WireSmoothing>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    kernels: Vec<WireKernel>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    ramification: Vec<WireRamification>,
}

#[derive(Serialize)]
struct WireSurface {
    factor1: String,
    factor2: String,
    minimal: bool,
}

#[derive(Serialize)]
struct WireDocument {
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<WireGroup>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    groups: BTreeMap<String, WireGroup>,
    curves: BTreeMap<String, WireCurve>,
    actions: BTreeMap<String, WireAction>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    surfaces: BTreeMap<String, WireSurface>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    families: BTreeMap<String, Vec<String>>,
}

fn wire_group(g: &GroupSpec) -> WireGroup {
    WireGroup {
        degree: g.degree,
        generators: g.generators.iter().map(cycles).collect(),
    }
}

fn wire_curve(c: &CurveSpec) -> WireCurve {
    let g = &c.graph;
    WireCurve {
        vertices: g.genera.iter().map(|&genus| WireVertex { genus }).collect(),
        half_edges: g.half_edges.iter().map(|&vertex| WireAt { vertex }).collect(),
        edges: g.edges.clone(),
        marks: g.marks.iter().map(|&vertex| WireAt { vertex }).collect(),
        allow_disconnected: c.allow_disconnected,
    }
}

fn wire_action(a: &ActionSpec) -> WireAction {
    let d = &a.data;
    WireAction {
        curve: a.curve.clone(),
        group: (a.group != DEFAULT_GROUP).then(|| a.group.clone()),
        vertex_images: d.vertex_images.iter().map(cycles).collect(),
        half_edge_images: d.half_edge_images.iter().map(cycles).collect(),
        mark_images: d.mark_images.iter().map(cycles).collect(),
        tangent_chars: d
            .tangent_chars
            .iter()
            .map(|t| WireTangent { element: cycles(&t.element), half_edge: t.half_edge, char: t.value })
            .collect(),
        smoothing_chars: d
            .smoothing_chars
            .iter()
            .map(|s| WireSmoothing { element: cycles(&s.element), edge: s.edge, char: s.value })
            .collect(),
        kernels: d
            .kernels
            .iter()
            .map(|k| WireKernel { vertex: k.vertex, generators: k.generators.iter().map(cycles).collect() })
            .collect(),
        ramification: d
            .ramification
            .iter()
            .map(|r| WireRamification { vertex: r.vertex, element: cycles(&r.element), char: r.value, order: r.order })
            .collect(),
    }
}

fn wire_surface(s: &SurfaceSpec) -> WireSurface {
    WireSurface {
        factor1: s.factor1.clone(),
        factor2: s.factor2.clone(),
        minimal: s.minimal,
    }
}

pub fn emit_value(doc: &InputDocument) -> serde_json::Value {
    let wire = WireDocument {
        version: FORMAT_VERSION,
        group: doc.groups.get(DEFAULT_GROUP).map(wire_group),
        groups: doc
            .groups
            .iter()
            .filter(|(k, _)| *k != DEFAULT_GROUP)
            .map(|(k, g)| (k.clone(), wire_group(g)))
            .collect(),
        curves: doc.curves.iter().map(|(k, c)| (k.clone(), wire_curve(c))).collect(),
        actions: doc.actions.iter().map(|(k, a)| (k.clone(), wire_action(a))).collect(),
        surfaces: doc.surfaces.iter().map(|(k, s)| (k.clone(), wire_surface(s))).collect(),
        families: doc.families.clone(),
    };
    serde_json::to_value(wire).expect("document serializes")
}

/// Pretty-printed JSON in the input schema.
pub fn emit(doc: &InputDocument) -> String {
    serde_json::to_string_pretty(&emit_value(doc)).expect("document serializes")
}

pub fn group_spec(g: &FiniteGroup) -> GroupSpec {
    GroupSpec {
        degree: g.degree(),
        generators: g.generators().to_vec(),
    }
}

/// A document holding the given actions over one group, each with its own
/// curve named after it.
pub fn document_for_actions<'a>(
    actions: impl IntoIterator<Item = (String, &'a CurveAction)>,
) -> InputDocument {
    let mut doc = InputDocument::default();
    for (name, a) in actions {
        doc.groups
            .entry(DEFAULT_GROUP.to_string())
            .or_insert_with(|| group_spec(a.group()));
        doc.curves.insert(
            name.clone(),
            CurveSpec {
                graph: a.graph().data().clone(),
                allow_disconnected: !a.graph().is_connected(),
            },
        );
        doc.actions.insert(
            name.clone(),
            ActionSpec {
                curve: name,
                group: DEFAULT_GROUP.to_string(),
                data: a.data().clone(),
            },
        );
    }
    doc
}
