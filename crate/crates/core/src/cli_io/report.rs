//! Command reports: a machine block that round-trips through serde, and a
//! text rendering derived from it.

use serde::{Deserialize, Serialize};

use crate::curve_graph::T1Breakdown;
use crate::equivariant_action::{EquivariantT1, QuotientSignature};
use crate::family_checker::{ChainEnd, ConstancyReport, LocalModel, SmoothingStep, Verdict};
use crate::product_surface::{DegenerationCertificate, KuranishiDimension, SurfaceInvariants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// The computation succeeded and its verdict is negative.
    Negative,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Negative => 2,
            Status::InputError => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Valid,
    Invalid { error: String },
    Genus { genus: u64, vertices: usize, edges: usize },
    T1(T1Breakdown),
    T1Equivariant(EquivariantT1),
    Quotient { signatures: Vec<QuotientSignature> },
    SurfaceInvariants(SurfaceInvariants),
    NotFree { witness: String },
    Kuranishi(KuranishiDimension),
    Certificate(DegenerationCertificate),
    Family(ConstancyReport),
    Smoothed {
        edge: usize,
        model: LocalModel,
        document: serde_json::Value,
    },
    NotSmoothable { edge: usize, reason: String },
    Chain {
        steps: Vec<SmoothingStep>,
        end: ChainEnd,
        document: serde_json::Value,
    },
}

impl Outcome {
    pub fn status(&self) -> Status {
        match self {
            Outcome::Invalid { .. } => Status::InputError,
            Outcome::NotFree { .. } | Outcome::NotSmoothable { .. } => Status::Negative,
            Outcome::Certificate(c) if !c.pass => Status::Negative,
            Outcome::Family(r) if !matches!(r.verdict, Verdict::Constant { .. }) => Status::Negative,
            _ => Status::Ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub name: String,
    pub kind: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub format_version: String,
    pub status: Status,
    pub messages: Vec<String>,
    pub items: Vec<Item>,
}

impl Report {
    /// Input errors take precedence over negative verdicts.
    pub fn compute_status(&mut self) {
        let mut status = Status::Ok;
        for item in &self.items {
            match item.outcome.status() {
                Status::InputError => status = Status::InputError,
                Status::Negative if status == Status::Ok => status = Status::Negative,
                _ => {}
            }
        }
        if status != Status::InputError && self.status == Status::InputError {
            status = Status::InputError;
        }
        self.status = status;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let pad = widths[i] - c.chars().count();
                if i == 0 {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect();
        format!("  {}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.iter().map(|s| s.to_string()).collect());
    for r in rows {
        out.push_str(&line(r.clone()));
    }
    out
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn ratio(r: &num_rational::Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

enum Block {
    Rows(&'static [&'static str], Vec<Vec<String>>),
    Text(String),
}

fn rows(header: &'static [&'static str], rows: Vec<Vec<String>>) -> Block {
    Block::Rows(header, rows)
}

fn render_item(item: &Item) -> Block {
    let n = item.name.clone();
    let text = |s: String| Block::Text(s);
    match &item.outcome {
        Outcome::Valid => rows(&["name", "kind", "status"], vec![vec![n, item.kind.clone(), "valid".into()]]),
        Outcome::Invalid { error } => text(format!("  {n}: error: {error}\n")),
        Outcome::Genus { genus, vertices, edges } => rows(
            &["name", "vertices", "edges", "genus"],
            vec![vec![n, vertices.to_string(), edges.to_string(), genus.to_string()]],
        ),
        Outcome::T1(t) => rows(
            &["name", "nodes", "branches", "-chi", "total"],
            vec![vec![n, t.delta.to_string(), t.branch_term.to_string(), t.minus_chi.to_string(), t.total.to_string()]],
        ),
        Outcome::T1Equivariant(t) => rows(
            &["name", "node_inv", "branch_inv", "quotient", "total"],
            vec![vec![n, t.node_inv.to_string(), t.branch_inv.to_string(), t.minus_chi_inv.to_string(), t.total.to_string()]],
        ),
        Outcome::Quotient { signatures } => {
            let sig_rows: Vec<Vec<String>> = signatures
                .iter()
                .map(|s| {
                    let orders: Vec<String> = s.ramification_orders.iter().map(|e| e.to_string()).collect();
                    vec![
                        n.clone(),
                        s.vertex_orbit.to_string(),
                        s.effective_order.to_string(),
                        s.g_prime.to_string(),
                        s.b.to_string(),
                        if orders.is_empty() { "-".into() } else { orders.join(",") },
                        s.contribution.to_string(),
                    ]
                })
                .collect();
            rows(&["name", "orbit", "|H|", "g'", "b", "orders", "3g'-3+b"], sig_rows)
        }
        Outcome::SurfaceInvariants(s) => rows(
            &["name", "chi", "K^2", "e", "q", "p_g"],
            vec![vec![n, ratio(&s.chi), ratio(&s.k_squared), ratio(&s.euler), opt(&s.q), opt(&s.p_g.map(|p| ratio(&p)))]],
        ),
        Outcome::NotFree { witness } => text(format!("  {n}: not free, {witness} has fixed points on both factors\n")),
        Outcome::Kuranishi(k) => rows(
            &["name", "factor1", "factor2", "total", "free"],
            vec![vec![n, k.factor1.total.to_string(), k.factor2.total.to_string(), k.total.to_string(), k.free.to_string()]],
        ),
        Outcome::Certificate(c) => {
            let rows: Vec<Vec<String>> = c
                .conditions
                .iter()
                .map(|x| {
                    vec![
                        format!("({})", x.id),
                        if x.pass { "pass" } else { "FAIL" }.into(),
                        x.name.clone(),
                        x.witness.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            text(format!(
                "  {n}: certificate {}\n{}",
                if c.pass { "passes" } else { "fails" },
                table(&["cond", "status", "condition", "witness"], &rows)
            ))
        }
        Outcome::Family(r) => {
            let rows: Vec<Vec<String>> = r
                .values
                .iter()
                .map(|v| match &v.result {
                    Ok(t) => vec![
                        v.label.clone(),
                        v.nodes.to_string(),
                        t.node_inv.to_string(),
                        t.branch_inv.to_string(),
                        t.minus_chi_inv.to_string(),
                        t.total.to_string(),
                    ],
                    Err(e) => vec![v.label.clone(), v.nodes.to_string(), "-".into(), "-".into(), "-".into(), format!("error: {e}")],
                })
                .collect();
            let verdict = match &r.verdict {
                Verdict::Constant { value } => format!("constant at {value}"),
                Verdict::Violation { first, first_value, second, second_value } => {
                    format!("violation: {first} has {first_value}, {second} has {second_value}")
                }
                Verdict::Failed { labels } => format!("not evaluated: {}", labels.join(", ")),
            };
            let bound = if r.semicontinuity.iter().all(|s| s.holds) {
                "semicontinuity bound holds".to_string()
            } else {
                let bad: Vec<String> = r
                    .semicontinuity
                    .iter()
                    .filter(|s| !s.holds)
                    .map(|s| format!("{} < {}", s.special, s.general))
                    .collect();
                format!("semicontinuity bound fails: {}", bad.join(", "))
            };
            text(format!(
                "  {n}: {verdict}\n{}  {bound}\n",
                table(&["stratum", "nodes", "node_inv", "branch_inv", "quotient", "total"], &rows)
            ))
        }
        Outcome::Smoothed { edge, model, .. } => {
            text(format!("  {n}: smoothed the orbit of edge {edge} ({} model)\n", model.label()))
        }
        Outcome::NotSmoothable { edge, reason } => text(format!("  {n}: edge {edge}: {reason}\n")),
        Outcome::Chain { steps, end, .. } => {
            let rows: Vec<Vec<String>> = steps
                .iter()
                .enumerate()
                .map(|(i, s)| vec![(i + 1).to_string(), s.edge.to_string(), s.orbit_size.to_string(), s.model.label().into()])
                .collect();
            let tail = match end {
                ChainEnd::Smooth => "ends at a smooth curve".to_string(),
                ChainEnd::Obstructed(o) => {
                    let reasons: Vec<String> = o.iter().map(|x| format!("edge {}: {}", x.edge, x.reason)).collect();
                    format!("ends at an obstructed stratum ({})", reasons.join("; "))
                }
            };
            text(format!(
                "  {n}: {} steps, {tail}\n{}",
                steps.len(),
                table(&["step", "edge", "orbit", "model"], &rows)
            ))
        }
    }
}

/// Text rendering; uses only the report.
pub fn render_human(report: &Report) -> String {
    let status = match report.status {
        Status::Ok => "ok",
        Status::Negative => "negative",
        Status::InputError => "input error",
    };
    let mut out = format!("{}: {status}\n", report.command);
    for m in &report.messages {
        out.push_str(&format!("  {m}\n"));
    }
    // Consecutive items with the same columns share one table.
    let mut pending: Option<(&[&str], Vec<Vec<String>>)> = None;
    for item in &report.items {
        match render_item(item) {
            Block::Rows(header, mut r) => match &mut pending {
                Some((h, acc)) if *h == header => acc.append(&mut r),
                _ => {
                    if let Some((h, acc)) = pending.take() {
                        out.push_str(&table(h, &acc));
                    }
                    pending = Some((header, r));
                }
            },
            Block::Text(t) => {
                if let Some((h, acc)) = pending.take() {
                    out.push_str(&table(h, &acc));
                }
                out.push_str(&t);
            }
        }
    }
    if let Some((h, acc)) = pending {
        out.push_str(&table(h, &acc));
    }
    out
}
