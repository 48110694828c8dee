//! Reading input documents from JSON, collecting every schema error with
//! the JSON path at which it occurs.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{Map, Value};

use crate::curve_graph::GraphData;
use crate::equivariant_action::{
    ActionData, KernelDecl, RamificationDecl, SmoothingCharDecl, TangentCharDecl,
};
use crate::finite_group::{Perm, RotationChar};

pub const FORMAT_VERSION: &str = "1";

/// Name under which the top-level `group` is registered.
pub const DEFAULT_GROUP: &str = "default";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Perm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSpec {
    pub graph: GraphData,
    pub allow_disconnected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpec {
    pub curve: String,
    pub group: String,
    pub data: ActionData,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub factor1: String,
    pub factor2: String,
    pub minimal: bool,
}

/// A document whose structure and cross-references have been checked.
/// Mathematical validation happens when it is loaded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InputDocument {
    pub groups: BTreeMap<String, GroupSpec>,
    pub curves: BTreeMap<String, CurveSpec>,
    pub actions: BTreeMap<String, ActionSpec>,
    pub surfaces: BTreeMap<String, SurfaceSpec>,
    pub families: BTreeMap<String, Vec<String>>,
}

impl InputDocument {
    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
            && self.actions.is_empty()
            && self.surfaces.is_empty()
            && self.families.is_empty()
    }
}

struct Walker {
    errors: Vec<SchemaError>,
    /// Names declared but rejected, so references to them are not reported twice.
    rejected: std::collections::BTreeSet<String>,
}

impl Walker {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(SchemaError {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        match v {
            Value::Object(m) => Some(m),
            _ => {
                self.err(path, "expected an object");
                None
            }
        }
    }

    fn array<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Vec<Value>> {
        match v {
            Value::Array(a) => Some(a),
            _ => {
                self.err(path, "expected an array");
                None
            }
        }
    }

    fn unknown_keys(&mut self, m: &Map<String, Value>, allowed: &[&str], path: &str) {
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&format!("{path}.{k}"), "unknown field");
            }
        }
    }

    fn required<'v>(&mut self, m: &'v Map<String, Value>, key: &str, path: &str) -> Option<&'v Value> {
        let v = m.get(key);
        if v.is_none() {
            self.err(&format!("{path}.{key}"), "missing field");
        }
        v
    }

    fn index(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64() {
            Some(n) => Some(n as usize),
            None => {
                self.err(path, "expected a nonnegative integer");
                None
            }
        }
    }

    fn string(&mut self, v: &Value, path: &str) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.err(path, "expected a string");
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        match v {
            Value::Bool(b) => Some(*b),
            _ => {
                self.err(path, "expected true or false");
                None
            }
        }
    }

    fn character(&mut self, v: &Value, path: &str) -> Option<RotationChar> {
        let s = self.string(v, path)?;
        match s.parse::<RotationChar>() {
            Ok(c) => Some(c),
            Err(e) => {
                self.err(path, e.to_string());
                None
            }
        }
    }

    /// A permutation of `{0, .., degree-1}` in cycle notation.
    fn perm(&mut self, v: &Value, degree: usize, path: &str) -> Option<Perm> {
        let cycles = self.array(v, path)?;
        let mut out = Vec::new();
        let mut ok = true;
        for (i, c) in cycles.iter().enumerate() {
            let cpath = format!("{path}[{i}]");
            let Some(points) = self.array(c, &cpath) else {
                ok = false;
                continue;
            };
            let mut cycle = Vec::new();
            for (j, p) in points.iter().enumerate() {
                match self.index(p, &format!("{cpath}[{j}]")) {
                    Some(p) => cycle.push(p),
                    None => ok = false,
                }
            }
            out.push(cycle);
        }
        if !ok {
            return None;
        }
        match Perm::from_cycles(degree, &out) {
            Ok(p) => Some(p),
            Err(e) => {
                self.err(path, format!("{e} (on {degree} points)"));
                None
            }
        }
    }

    fn perm_list(&mut self, v: &Value, degree: usize, path: &str) -> Option<Vec<Perm>> {
        let items = self.array(v, path)?;
        let perms: Vec<Option<Perm>> = items
            .iter()
            .enumerate()
            .map(|(i, p)| self.perm(p, degree, &format!("{path}[{i}]")))
            .collect();
        perms.into_iter().collect()
    }

    fn named_map<'v>(&mut self, v: Option<&'v Value>, path: &str) -> Vec<(String, &'v Value, String)> {
        match v {
            None => Vec::new(),
            Some(Value::Array(a)) if a.is_empty() => Vec::new(),
            Some(v) => match self.object(v, path) {
                Some(m) => m
                    .iter()
                    .map(|(k, v)| (k.clone(), v, format!("{path}.{k}")))
                    .collect(),
                None => Vec::new(),
            },
        }
    }

    fn group(&mut self, v: &Value, path: &str) -> Option<GroupSpec> {
        let m = self.object(v, path)?;
        self.unknown_keys(m, &["degree", "generators"], path);
        let degree = self.required(m, "degree", path).and_then(|d| self.index(d, &format!("{path}.degree")));
        let degree = match degree {
            Some(0) => {
                self.err(&format!("{path}.degree"), "degree must be at least 1");
                return None;
            }
            d => d?,
        };
        let generators = match m.get("generators") {
            None => Vec::new(),
            Some(g) => self.perm_list(g, degree, &format!("{path}.generators"))?,
        };
        Some(GroupSpec { degree, generators })
    }

    fn curve(&mut self, v: &Value, path: &str) -> Option<CurveSpec> {
        let m = self.object(v, path)?;
        self.unknown_keys(m, &["vertices", "half_edges", "edges", "marks", "allow_disconnected"], path);
        let mut ok = true;
        let mut graph = GraphData::default();
        let vpath = format!("{path}.vertices");
        match self.required(m, "vertices", path).and_then(|v| self.array(v, &vpath)) {
            Some(vs) => {
                for (i, vertex) in vs.iter().enumerate() {
                    let p = format!("{vpath}[{i}]");
                    let Some(vm) = self.object(vertex, &p) else {
                        ok = false;
                        continue;
                    };
                    self.unknown_keys(vm, &["genus"], &p);
                    match self.required(vm, "genus", &p).and_then(|g| self.index(g, &format!("{p}.genus"))) {
                        Some(g) if g <= u32::MAX as usize => graph.genera.push(g as u32),
                        _ => ok = false,
                    }
                }
            }
            None => ok = false,
        }
        for (key, target) in [("half_edges", 0), ("marks", 1)] {
            let lpath = format!("{path}.{key}");
            let Some(list) = m.get(key) else { continue };
            let Some(items) = self.array(list, &lpath) else {
                ok = false;
                continue;
            };
            for (i, item) in items.iter().enumerate() {
                let p = format!("{lpath}[{i}]");
                let Some(im) = self.object(item, &p) else {
                    ok = false;
                    continue;
                };
                self.unknown_keys(im, &["vertex"], &p);
                match self.required(im, "vertex", &p).and_then(|x| self.index(x, &format!("{p}.vertex"))) {
                    Some(x) if target == 0 => graph.half_edges.push(x),
                    Some(x) => graph.marks.push(x),
                    None => ok = false,
                }
            }
        }
        if let Some(edges) = m.get("edges") {
            let epath = format!("{path}.edges");
            match self.array(edges, &epath) {
                Some(es) => {
                    for (i, e) in es.iter().enumerate() {
                        let p = format!("{epath}[{i}]");
                        match e.as_array().map(|a| a.as_slice()) {
                            Some([a, b]) => match (self.index(a, &format!("{p}[0]")), self.index(b, &format!("{p}[1]"))) {
                                (Some(a), Some(b)) => graph.edges.push([a, b]),
                                _ => ok = false,
                            },
                            _ => {
                                self.err(&p, "expected a pair of half-edge indices");
                                ok = false;
                            }
                        }
                    }
                }
                None => ok = false,
            }
        }
        let allow_disconnected = match m.get("allow_disconnected") {
            None => false,
            Some(b) => self.boolean(b, &format!("{path}.allow_disconnected")).unwrap_or(false),
        };
        ok.then_some(CurveSpec { graph, allow_disconnected })
    }

    fn action(
        &mut self,
        v: &Value,
        path: &str,
        groups: &BTreeMap<String, GroupSpec>,
        curves: &BTreeMap<String, CurveSpec>,
    ) -> Option<ActionSpec> {
        let m = self.object(v, path)?;
        self.unknown_keys(
            m,
            &[
                "curve",
                "group",
                "vertex_images",
                "half_edge_images",
                "mark_images",
                "tangent_chars",
                "smoothing_chars",
                "kernels",
                "ramification",
            ],
            path,
        );
        let curve = self.required(m, "curve", path).and_then(|c| self.string(c, &format!("{path}.curve")))?;
        let group = match m.get("group") {
            Some(g) => self.string(g, &format!("{path}.group"))?,
            None => DEFAULT_GROUP.to_string(),
        };
        let Some(gspec) = groups.get(&group) else {
            if self.rejected.contains(&format!("group:{group}")) {
                return None;
            }
            let at = if m.contains_key("group") { format!("{path}.group") } else { path.to_string() };
            self.err(&at, format!("unresolved group reference {group:?}"));
            return None;
        };
        let Some(cspec) = curves.get(&curve) else {
            if self.rejected.contains(&format!("curve:{curve}")) {
                return None;
            }
            self.err(&format!("{path}.curve"), format!("unresolved curve reference {curve:?}"));
            return None;
        };
        let gdeg = gspec.degree;
        let graph = &cspec.graph;
        let mut ok = true;
        let mut data = ActionData::default();

        let images = |w: &mut Walker, key: &str, points: usize, required: bool| -> Option<Vec<Perm>> {
            match m.get(key) {
                None if !required => Some(Vec::new()),
                None => {
                    if gspec.generators.is_empty() {
                        Some(Vec::new())
                    } else {
                        w.err(&format!("{path}.{key}"), "missing field");
                        None
                    }
                }
                Some(v) => {
                    let p = format!("{path}.{key}");
                    let list = w.perm_list(v, points, &p)?;
                    if list.len() != gspec.generators.len() {
                        w.err(
                            &p,
                            format!("expected one image per generator ({}), got {}", gspec.generators.len(), list.len()),
                        );
                        return None;
                    }
                    Some(list)
                }
            }
        };
        match images(self, "vertex_images", graph.genera.len(), true) {
            Some(v) => data.vertex_images = v,
            None => ok = false,
        }
        match images(self, "half_edge_images", graph.half_edges.len(), true) {
            Some(v) => data.half_edge_images = v,
            None => ok = false,
        }
        match images(self, "mark_images", graph.marks.len(), false) {
            Some(v) => data.mark_images = v,
            None => ok = false,
        }
        if gspec.generators.is_empty() {
            data.vertex_images.clear();
            data.half_edge_images.clear();
        }

        let entries = |w: &mut Walker, key: &str| -> Vec<(String, Map<String, Value>)> {
            let Some(v) = m.get(key) else { return Vec::new() };
            let p = format!("{path}.{key}");
            let Some(items) = w.array(v, &p) else { return Vec::new() };
            items
                .iter()
                .enumerate()
                .filter_map(|(i, item)| {
                    let ip = format!("{p}[{i}]");
                    w.object(item, &ip).map(|o| (ip, o.clone()))
                })
                .collect()
        };
        let before = self.errors.len();
        for (p, e) in entries(self, "tangent_chars") {
            self.unknown_keys(&e, &["element", "half_edge", "char"], &p);
            let element = self.required(&e, "element", &p).and_then(|x| self.perm(x, gdeg, &format!("{p}.element")));
            let half_edge = self.required(&e, "half_edge", &p).and_then(|x| self.index(x, &format!("{p}.half_edge")));
            let value = self.required(&e, "char", &p).and_then(|x| self.character(x, &format!("{p}.char")));
            if let (Some(element), Some(half_edge), Some(value)) = (element, half_edge, value) {
                data.tangent_chars.push(TangentCharDecl { element, half_edge, value });
            }
        }
        for (p, e) in entries(self, "smoothing_chars") {
            self.unknown_keys(&e, &["element", "edge", "char"], &p);
            let element = self.required(&e, "element", &p).and_then(|x| self.perm(x, gdeg, &format!("{p}.element")));
            let edge = self.required(&e, "edge", &p).and_then(|x| self.index(x, &format!("{p}.edge")));
            let value = self.required(&e, "char", &p).and_then(|x| self.character(x, &format!("{p}.char")));
            if let (Some(element), Some(edge), Some(value)) = (element, edge, value) {
                data.smoothing_chars.push(SmoothingCharDecl { element, edge, value });
            }
        }
        for (p, e) in entries(self, "kernels") {
            self.unknown_keys(&e, &["vertex", "generators"], &p);
            let vertex = self.required(&e, "vertex", &p).and_then(|x| self.index(x, &format!("{p}.vertex")));
            let generators = self
                .required(&e, "generators", &p)
                .and_then(|x| self.perm_list(x, gdeg, &format!("{p}.generators")));
            if let (Some(vertex), Some(generators)) = (vertex, generators) {
                data.kernels.push(KernelDecl { vertex, generators });
            }
        }
        for (p, e) in entries(self, "ramification") {
            self.unknown_keys(&e, &["vertex", "element", "char", "order"], &p);
            let vertex = self.required(&e, "vertex", &p).and_then(|x| self.index(x, &format!("{p}.vertex")));
            let element = self.required(&e, "element", &p).and_then(|x| self.perm(x, gdeg, &format!("{p}.element")));
            let value = self.required(&e, "char", &p).and_then(|x| self.character(x, &format!("{p}.char")));
            let order = self.required(&e, "order", &p).and_then(|x| self.index(x, &format!("{p}.order")));
            if let (Some(vertex), Some(element), Some(value), Some(order)) = (vertex, element, value, order) {
                data.ramification.push(RamificationDecl { vertex, element, value, order: order as u32 });
            }
        }
        if self.errors.len() > before {
            ok = false;
        }
        ok.then_some(ActionSpec { curve, group, data })
    }
}

/// Parses a document, returning every schema error found.
pub fn parse(text: &str) -> Result<InputDocument, Vec<SchemaError>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        vec![SchemaError {
            path: "$".into(),
            message: format!("invalid JSON: {e}"),
        }]
    })?;
    parse_value(&value)
}

pub fn parse_value(value: &Value) -> Result<InputDocument, Vec<SchemaError>> {
    let mut w = Walker { errors: Vec::new(), rejected: Default::default() };
    let Some(root) = w.object(value, "$") else {
        return Err(w.errors);
    };
    w.unknown_keys(root, &["version", "group", "groups", "curves", "actions", "surfaces", "families"], "$");
    match root.get("version") {
        None => w.err("$.version", "missing field"),
        Some(Value::String(v)) if v == FORMAT_VERSION => {}
        Some(Value::String(v)) => w.err("$.version", format!("unknown version {v:?}, expected {FORMAT_VERSION:?}")),
        Some(_) => w.err("$.version", "expected a string"),
    }

    let mut doc = InputDocument::default();
    if let Some(g) = root.get("group") {
        match w.group(g, "$.group") {
            Some(spec) => {
                doc.groups.insert(DEFAULT_GROUP.into(), spec);
            }
            None => {
                w.rejected.insert(format!("group:{DEFAULT_GROUP}"));
            }
        }
    }
    for (name, v, path) in w.named_map(root.get("groups"), "$.groups") {
        if name == DEFAULT_GROUP && root.contains_key("group") {
            w.err(&path, format!("{DEFAULT_GROUP:?} is already defined by $.group"));
            continue;
        }
        match w.group(v, &path) {
            Some(spec) => {
                doc.groups.insert(name, spec);
            }
            None => {
                w.rejected.insert(format!("group:{name}"));
            }
        }
    }
    for (name, v, path) in w.named_map(root.get("curves"), "$.curves") {
        match w.curve(v, &path) {
            Some(spec) => {
                doc.curves.insert(name, spec);
            }
            None => {
                w.rejected.insert(format!("curve:{name}"));
            }
        }
    }
    for (name, v, path) in w.named_map(root.get("actions"), "$.actions") {
        if let Some(spec) = w.action(v, &path, &doc.groups, &doc.curves) {
            doc.actions.insert(name, spec);
        }
    }
    let declared_actions: Vec<String> = match root.get("actions") {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    };
    for (name, v, path) in w.named_map(root.get("surfaces"), "$.surfaces") {
        let Some(m) = w.object(v, &path) else { continue };
        w.unknown_keys(m, &["factor1", "factor2", "minimal"], &path);
        let mut names = Vec::new();
        for key in ["factor1", "factor2"] {
            let p = format!("{path}.{key}");
            let n = w.required(m, key, &path).and_then(|x| w.string(x, &p));
            if let Some(n) = &n {
                if !declared_actions.contains(n) {
                    w.err(&p, format!("unresolved action reference {n:?}"));
                }
            }
            names.push(n);
        }
        let minimal = match m.get("minimal") {
            None => false,
            Some(b) => w.boolean(b, &format!("{path}.minimal")).unwrap_or(false),
        };
        if let [Some(f1), Some(f2)] = [names[0].take(), names[1].take()] {
            doc.surfaces.insert(name, SurfaceSpec { factor1: f1, factor2: f2, minimal });
        }
    }
    for (name, v, path) in w.named_map(root.get("families"), "$.families") {
        let Some(items) = w.array(v, &path) else { continue };
        let mut members = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let p = format!("{path}[{i}]");
            if let Some(n) = w.string(item, &p) {
                if !declared_actions.contains(&n) {
                    w.err(&p, format!("unresolved action reference {n:?}"));
                }
                members.push(n);
            }
        }
        doc.families.insert(name, members);
    }

    if w.errors.is_empty() {
        Ok(doc)
    } else {
        Err(w.errors)
    }
}
