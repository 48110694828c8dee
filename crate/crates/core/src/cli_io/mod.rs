//! The JSON document format and the command runner shared by the binary.

pub mod emit;
pub mod parse;
pub mod report;
pub mod run;

pub use emit::{document_for_actions, emit, emit_value};
pub use parse::{parse, parse_value, InputDocument, SchemaError, DEFAULT_GROUP, FORMAT_VERSION};
pub use report::{render_human, Item, Outcome, Report, Status};
pub use run::{group_cap_from_env, run, Command, RunOptions, Workspace, GROUP_CAP_VAR};

/// Human block, a blank line, then the JSON report. `json_only` drops the
/// human block.
pub fn render(report: &Report, json_only: bool) -> String {
    if json_only {
        format!("{}\n", report.to_json())
    } else {
        format!("{}\n{}\n", render_human(report), report.to_json())
    }
}
