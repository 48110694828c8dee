use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isoprod::cli_io::{group_cap_from_env, render, run, Command, Report, RunOptions, Status};

#[derive(Parser)]
#[command(name = "isoprod", version, about = "Equivariant deformation counts for stable curves and product-quotient surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// Input document (JSON, format version 1).
    file: PathBuf,
    /// Print only the JSON report.
    #[arg(long)]
    json: bool,
    /// Only process the item with this name.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Check every group, curve, action, surface and family in the document.
    Validate(Common),
    /// Arithmetic genus of each curve.
    Genus(Common),
    /// Non-equivariant T1 breakdown of each curve.
    T1(Common),
    /// Equivariant T1 breakdown of each action.
    #[command(name = "t1-equivariant")]
    T1Equivariant(Common),
    /// Quotient signatures of each action.
    Quotient(Common),
    /// chi, K^2, e, q and p_g of each free surface.
    #[command(name = "surface-invariants")]
    SurfaceInvariants(Common),
    /// Kuranishi dimension of each surface.
    Kuranishi(Common),
    /// Degeneration certificate of each surface.
    #[command(name = "certify-degeneration")]
    CertifyDegeneration(Common),
    /// Constancy of equivariant T1 along each family.
    #[command(name = "check-family")]
    CheckFamily(Common),
    /// Smooth one node orbit (--edge) or run the full smoothing chain.
    Smooth {
        #[command(flatten)]
        common: Common,
        /// Edge whose orbit is smoothed.
        #[arg(long)]
        edge: Option<usize>,
    },
}

fn split(sub: Sub) -> (Command, Common, Option<usize>) {
    match sub {
        Sub::Validate(c) => (Command::Validate, c, None),
        Sub::Genus(c) => (Command::Genus, c, None),
        Sub::T1(c) => (Command::T1, c, None),
        Sub::T1Equivariant(c) => (Command::T1Equivariant, c, None),
        Sub::Quotient(c) => (Command::Quotient, c, None),
        Sub::SurfaceInvariants(c) => (Command::SurfaceInvariants, c, None),
        Sub::Kuranishi(c) => (Command::Kuranishi, c, None),
        Sub::CertifyDegeneration(c) => (Command::CertifyDegeneration, c, None),
        Sub::CheckFamily(c) => (Command::CheckFamily, c, None),
        Sub::Smooth { common, edge } => (Command::Smooth, common, edge),
    }
}

fn input_error(command: Command, message: String) -> Report {
    Report {
        command: command.name().to_string(),
        format_version: isoprod::cli_io::FORMAT_VERSION.to_string(),
        status: Status::InputError,
        messages: vec![message],
        items: Vec::new(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, edge) = split(cli.command);
    let report = match (group_cap_from_env(), std::fs::read_to_string(&common.file)) {
        (Err(e), _) => input_error(command, e),
        (_, Err(e)) => input_error(command, format!("cannot read {}: {e}", common.file.display())),
        (Ok(group_cap), Ok(text)) => {
            let opts = RunOptions { command, name: common.name, edge, group_cap };
            run(&text, &opts)
        }
    };
    print!("{}", render(&report, common.json));
    ExitCode::from(report.status.exit_code() as u8)
}
