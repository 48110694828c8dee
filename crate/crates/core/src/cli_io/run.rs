//! Loading a parsed document and running one command over its items.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::emit::{document_for_actions, emit_value};
use super::parse::{parse, InputDocument};
use super::report::{Item, Outcome, Report, Status};
use crate::curve_graph::DualGraph;
use crate::equivariant_action::CurveAction;
use crate::family_checker::{
    local_model, report_from_values, smooth_node_orbit, smoothing_chain, SmoothingError,
    StratumValue,
};
use crate::finite_group::{FiniteGroup, DEFAULT_GROUP_CAP};
use crate::product_surface::{
    certify_degeneration, kuranishi_dimension, surface_invariants, SurfaceDescriptor, SurfaceError,
};

pub const GROUP_CAP_VAR: &str = "ISOPROD_GROUP_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Genus,
    T1,
    T1Equivariant,
    Quotient,
    SurfaceInvariants,
    Kuranishi,
    CertifyDegeneration,
    CheckFamily,
    Smooth,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Validate,
        Command::Genus,
        Command::T1,
        Command::T1Equivariant,
        Command::Quotient,
        Command::SurfaceInvariants,
        Command::Kuranishi,
        Command::CertifyDegeneration,
        Command::CheckFamily,
        Command::Smooth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Genus => "genus",
            Command::T1 => "t1",
            Command::T1Equivariant => "t1-equivariant",
            Command::Quotient => "quotient",
            Command::SurfaceInvariants => "surface-invariants",
            Command::Kuranishi => "kuranishi",
            Command::CertifyDegeneration => "certify-degeneration",
            Command::CheckFamily => "check-family",
            Command::Smooth => "smooth",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    /// Restrict to the item with this name.
    pub name: Option<String>,
    /// For `smooth`: smooth only the orbit of this edge.
    pub edge: Option<usize>,
    pub group_cap: usize,
}

impl RunOptions {
    pub fn new(command: Command) -> Self {
        RunOptions {
            command,
            name: None,
            edge: None,
            group_cap: DEFAULT_GROUP_CAP,
        }
    }
}

/// Reads the group-order cap from the environment.
pub fn group_cap_from_env() -> Result<usize, String> {
    match std::env::var(GROUP_CAP_VAR) {
        Err(_) => Ok(DEFAULT_GROUP_CAP),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{GROUP_CAP_VAR} must be a positive integer, got {v:?}")),
    }
}

/// Every object of a document after mathematical validation. Failures are
/// kept per item so one bad entry does not hide the others.
pub struct Workspace {
    pub groups: BTreeMap<String, Result<Arc<FiniteGroup>, String>>,
    pub curves: BTreeMap<String, Result<DualGraph, String>>,
    pub actions: BTreeMap<String, Result<CurveAction, String>>,
    pub surfaces: BTreeMap<String, Result<SurfaceDescriptor, String>>,
    pub families: BTreeMap<String, Vec<String>>,
    /// Number of edges of each action's curve, for strata that failed to load.
    action_nodes: BTreeMap<String, usize>,
}

impl Workspace {
    pub fn load(doc: &InputDocument, group_cap: usize) -> Self {
        let groups: BTreeMap<String, Result<Arc<FiniteGroup>, String>> = doc
            .groups
            .iter()
            .map(|(name, g)| {
                let r = FiniteGroup::enumerate_with_cap(g.generators.clone(), g.degree, group_cap)
                    .map(Arc::new)
                    .map_err(|e| e.to_string());
                (name.clone(), r)
            })
            .collect();
        let curves: BTreeMap<String, Result<DualGraph, String>> = doc
            .curves
            .iter()
            .map(|(name, c)| {
                let r = DualGraph::validate_with(c.graph.clone(), c.allow_disconnected).map_err(|e| e.to_string());
                (name.clone(), r)
            })
            .collect();
        let actions: BTreeMap<String, Result<CurveAction, String>> = doc
            .actions
            .iter()
            .map(|(name, a)| {
                let r = match (&groups[&a.group], &curves[&a.curve]) {
                    (Err(_), _) => Err(format!("group {:?} is invalid", a.group)),
                    (_, Err(_)) => Err(format!("curve {:?} is invalid", a.curve)),
                    (Ok(g), Ok(c)) => {
                        CurveAction::new(g.clone(), c.clone(), a.data.clone()).map_err(|e| e.to_string())
                    }
                };
                (name.clone(), r)
            })
            .collect();
        let surfaces = doc
            .surfaces
            .iter()
            .map(|(name, s)| {
                let r = match (&actions[&s.factor1], &actions[&s.factor2]) {
                    (Ok(a), Ok(b)) => SurfaceDescriptor::new(a.clone(), b.clone(), s.minimal).map_err(|e| e.to_string()),
                    (Err(_), _) => Err(format!("action {:?} is invalid", s.factor1)),
                    (_, Err(_)) => Err(format!("action {:?} is invalid", s.factor2)),
                };
                (name.clone(), r)
            })
            .collect();
        let action_nodes = doc
            .actions
            .iter()
            .map(|(name, a)| (name.clone(), doc.curves[&a.curve].graph.edges.len()))
            .collect();
        Workspace {
            groups,
            curves,
            actions,
            surfaces,
            families: doc.families.clone(),
            action_nodes,
        }
    }
}

fn invalid(error: impl Into<String>) -> Outcome {
    Outcome::Invalid { error: error.into() }
}

fn select<'a, T>(
    map: &'a BTreeMap<String, T>,
    name: &Option<String>,
    kind: &str,
    messages: &mut Vec<String>,
) -> Option<Vec<(&'a String, &'a T)>> {
    match name {
        None => Some(map.iter().collect()),
        Some(n) => match map.get_key_value(n) {
            Some(kv) => Some(vec![kv]),
            None => {
                messages.push(format!("no {kind} named {n:?}"));
                None
            }
        },
    }
}

fn item(name: &str, kind: &str, outcome: Outcome) -> Item {
    Item {
        name: name.to_string(),
        kind: kind.to_string(),
        outcome,
    }
}

fn run_items(ws: &Workspace, opts: &RunOptions, messages: &mut Vec<String>) -> Option<Vec<Item>> {
    let name = &opts.name;
    let items = match opts.command {
        Command::Validate => {
            if name.is_some() {
                messages.push("validate checks the whole document; --name is ignored".into());
            }
            let mut out = Vec::new();
            let verdict = |r: Result<(), &String>| match r {
                Ok(()) => Outcome::Valid,
                Err(e) => invalid(e.clone()),
            };
            for (n, r) in &ws.groups {
                out.push(item(n, "group", verdict(r.as_ref().map(|_| ()))));
            }
            for (n, r) in &ws.curves {
                out.push(item(n, "curve", verdict(r.as_ref().map(|_| ()))));
            }
            for (n, r) in &ws.actions {
                out.push(item(n, "action", verdict(r.as_ref().map(|_| ()))));
            }
            for (n, r) in &ws.surfaces {
                out.push(item(n, "surface", verdict(r.as_ref().map(|_| ()))));
            }
            for (n, members) in &ws.families {
                let bad: Vec<&String> = members.iter().filter(|m| ws.actions[*m].is_err()).collect();
                let outcome = if members.len() < 2 {
                    invalid(format!("a family needs at least two strata, got {}", members.len()))
                } else if bad.is_empty() {
                    Outcome::Valid
                } else {
                    invalid(format!("invalid strata: {bad:?}"))
                };
                out.push(item(n, "family", outcome));
            }
            out
        }
        Command::Genus | Command::T1 => select(&ws.curves, name, "curve", messages)?
            .into_iter()
            .map(|(n, r)| {
                let outcome = match r {
                    Err(e) => invalid(e.clone()),
                    Ok(g) if opts.command == Command::Genus => match g.arithmetic_genus() {
                        Ok(genus) => Outcome::Genus {
                            genus,
                            vertices: g.num_vertices(),
                            edges: g.num_edges(),
                        },
                        Err(e) => invalid(e.to_string()),
                    },
                    Ok(g) => match g.t1_dimension() {
                        Ok(t) => Outcome::T1(t),
                        Err(e) => invalid(e.to_string()),
                    },
                };
                item(n, "curve", outcome)
            })
            .collect(),
        Command::T1Equivariant | Command::Quotient => {
            let selected = select(&ws.actions, name, "action", messages)?;
            let outcomes = crate::parallel::map(&selected, |(_, r)| match r {
                Err(e) => invalid(e.clone()),
                Ok(a) if opts.command == Command::T1Equivariant => match a.t1_equivariant() {
                    Ok(t) => Outcome::T1Equivariant(t),
                    Err(e) => invalid(e.to_string()),
                },
                Ok(a) => match a.quotient_signatures() {
                    Ok(signatures) => Outcome::Quotient { signatures },
                    Err(e) => invalid(e.to_string()),
                },
            });
            selected
                .iter()
                .zip(outcomes)
                .map(|((n, _), o)| item(n, "action", o))
                .collect()
        }
        Command::SurfaceInvariants | Command::Kuranishi | Command::CertifyDegeneration => {
            select(&ws.surfaces, name, "surface", messages)?
                .into_iter()
                .map(|(n, r)| {
                    let outcome = match r {
                        Err(e) => invalid(e.clone()),
                        Ok(s) => match opts.command {
                            Command::SurfaceInvariants => match surface_invariants(s) {
                                Ok(inv) => Outcome::SurfaceInvariants(inv),
                                Err(SurfaceError::NotFree(witness)) => Outcome::NotFree { witness },
                                Err(e) => invalid(e.to_string()),
                            },
                            Command::Kuranishi => match kuranishi_dimension(s) {
                                Ok(k) => Outcome::Kuranishi(k),
                                Err(e) => invalid(e.to_string()),
                            },
                            _ => Outcome::Certificate(certify_degeneration(s)),
                        },
                    };
                    item(n, "surface", outcome)
                })
                .collect()
        }
        Command::CheckFamily => select(&ws.families, name, "family", messages)?
            .into_iter()
            .map(|(n, members)| item(n, "family", check_family(ws, members)))
            .collect(),
        Command::Smooth => select(&ws.actions, name, "action", messages)?
            .into_iter()
            .map(|(n, r)| {
                let outcome = match r {
                    Err(e) => invalid(e.clone()),
                    Ok(a) => smooth(n, a, opts.edge),
                };
                item(n, "action", outcome)
            })
            .collect(),
    };
    Some(items)
}

fn check_family(ws: &Workspace, members: &[String]) -> Outcome {
    if members.len() < 2 {
        return invalid(format!("a family needs at least two strata, got {}", members.len()));
    }
    let bad: Vec<String> = members
        .iter()
        .filter_map(|m| ws.actions[m].as_ref().err().map(|e| format!("{m}: {e}")))
        .collect();
    if !bad.is_empty() {
        return invalid(format!("invalid strata: {}", bad.join("; ")));
    }
    let actions: Vec<(&String, &CurveAction)> = members
        .iter()
        .map(|m| (m, ws.actions[m].as_ref().expect("checked above")))
        .collect();
    let group = actions[0].1.group();
    if let Some((m, _)) = actions
        .iter()
        .find(|(_, a)| !Arc::ptr_eq(a.group(), group) && **a.group() != **group)
    {
        return invalid(format!("stratum {m} uses a different group"));
    }
    let values = crate::parallel::map(&actions, |(m, a)| StratumValue {
        label: m.to_string(),
        nodes: ws.action_nodes[*m],
        result: a.t1_equivariant().map_err(|e| e.to_string()),
    });
    Outcome::Family(report_from_values(values))
}

fn smooth(name: &str, action: &CurveAction, edge: Option<usize>) -> Outcome {
    match edge {
        Some(e) => match local_model(action, e).and_then(|m| smooth_node_orbit(action, e).map(|s| (m, s))) {
            Ok((model, s)) => Outcome::Smoothed {
                edge: e,
                model,
                document: emit_value(&document_for_actions([(format!("{name}_smoothed"), &s)])),
            },
            Err(err @ (SmoothingError::NotSmoothable { .. } | SmoothingError::UnsupportedModel { .. })) => {
                Outcome::NotSmoothable { edge: e, reason: err.to_string() }
            }
            Err(err) => invalid(err.to_string()),
        },
        None => {
            let chain = smoothing_chain(action);
            let names: Vec<String> = (0..chain.strata.len()).map(|i| format!("{name}_{i}")).collect();
            let mut doc = document_for_actions(names.iter().cloned().zip(chain.strata.iter()));
            if names.len() >= 2 {
                doc.families.insert(format!("{name}_chain"), names);
            }
            Outcome::Chain {
                steps: chain.steps,
                end: chain.end,
                document: emit_value(&doc),
            }
        }
    }
}

/// Parses `text` and runs one command over it.
pub fn run(text: &str, opts: &RunOptions) -> Report {
    let mut report = Report {
        command: opts.command.name().to_string(),
        format_version: super::parse::FORMAT_VERSION.to_string(),
        status: Status::Ok,
        messages: Vec::new(),
        items: Vec::new(),
    };
    let doc = match parse(text) {
        Ok(d) => d,
        Err(errors) => {
            report.status = Status::InputError;
            report.messages = errors.iter().map(|e| e.to_string()).collect();
            return report;
        }
    };
    run_document(&doc, opts, report)
}

fn run_document(doc: &InputDocument, opts: &RunOptions, mut report: Report) -> Report {
    if doc.is_empty() {
        report.messages.push("nothing to do".into());
        return report;
    }
    let ws = Workspace::load(doc, opts.group_cap);
    match run_items(&ws, opts, &mut report.messages) {
        None => report.status = Status::InputError,
        Some(items) => {
            if items.is_empty() {
                report.messages.push("nothing to do".into());
            }
            report.items = items;
        }
    }
    report.compute_status();
    report
}
