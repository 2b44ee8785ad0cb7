//! Command-line front end: spec files in, reports out.
//!
//! Exit codes are 0 when every check passes, 1 when a check fails and 2 for
//! unreadable or invalid input.

pub mod expr;
pub mod pipeline;
pub mod spec_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::derham::SignConvention;
use crate::error::Error;
use crate::report::error_class;
pub use pipeline::{run_pipeline, PipelineReport, RunOptions};
pub use spec_file::{parse_spec, parse_spec_file, InstanceSpecFile, Kind};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variable holding the seed for sampled points.
pub const SEED_VAR: &str = "DARBOUX_FORGE_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "darboux-forge",
    version,
    about = "Build and verify shifted Darboux models exactly over the rationals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check and print a table (or JSON).
    Verify {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the model; with --emit-fixture print the canonical spec instead.
    Build {
        spec: PathBuf,
        #[arg(long)]
        emit_fixture: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every check and print the report (JSON by default).
    Report {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Number of sampled classical-locus points.
    #[arg(long)]
    points: Option<usize>,
    /// Highest index of closed-sequence relations to check.
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, value_enum)]
    sign_convention: Option<SignArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Human,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    Minus,
    Plus,
}

impl From<SignArg> for SignConvention {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Minus => SignConvention::Minus,
            SignArg::Plus => SignConvention::Plus,
        }
    }
}

fn input_error(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error [{}]: {e}", error_class(e));
    EXIT_INPUT
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write, err: &mut dyn Write) -> Option<i32> {
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let e = Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                };
                return Some(input_error(err, &e));
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    None
}

fn seed_from(value: Option<String>) -> Result<u64, Error> {
    match value {
        None => Ok(0),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidOption(format!("{SEED_VAR} must be an unsigned integer, got `{v}`"))),
    }
}

/// Entry point behind the binary, with the seed variable's value passed in.
pub fn run<I, T>(args: I, seed_var: Option<String>, stdout: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match cli.command {
        Command::Verify { spec, run, format, out } | Command::Report { spec, run, format, out } => {
            let seed = match seed_from(seed_var) {
                Ok(s) => s,
                Err(e) => return input_error(err, &e),
            };
            let parsed = match parse_spec_file(&spec) {
                Ok(s) => s,
                Err(e) => return input_error(err, &e),
            };
            let opts = RunOptions::resolve(
                &parsed,
                run.points,
                run.truncation,
                run.sign_convention.map(Into::into),
                seed,
            );
            let report = run_pipeline(&parsed, &opts);
            let text = match format {
                Format::Json => report.to_json(),
                Format::Human => report.to_human(),
            };
            if let Some(code) = emit(&text, out.as_ref(), stdout, err) {
                return code;
            }
            if report.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Command::Build {
            spec,
            emit_fixture,
            out,
        } => {
            let parsed = match parse_spec_file(&spec) {
                Ok(s) => s,
                Err(e) => return input_error(err, &e),
            };
            let text = if emit_fixture {
                match parsed.serialize() {
                    Ok(t) => t,
                    Err(e) => return input_error(err, &e),
                }
            } else {
                match describe_build(&parsed) {
                    Ok(t) => t,
                    Err(e) => {
                        let _ = writeln!(err, "build failed [{}]: {e}", error_class(&e));
                        return EXIT_FAIL;
                    }
                }
            };
            emit(&text, out.as_ref(), stdout, err).unwrap_or(EXIT_PASS)
        }
    }
}

/// Build the model and list each presentation's generators and differential.
fn describe_build(spec: &InstanceSpecFile) -> crate::Result<String> {
    use crate::cdga::CdgaPresentation;
    use crate::darboux::{build_contact_darboux, build_symplectic_darboux, DarbouxSpec};
    use crate::lagrangian::{build_lagrangian_model, LagrangianDarbouxSpec};
    use crate::legendrian::{build_jet1_zero_section, build_legendrian_model};
    use std::fmt::Write as _;

    fn section(s: &mut String, title: &str, p: &CdgaPresentation) {
        let alg = p.algebra();
        let _ = writeln!(s, "{title}:");
        for (pos, g) in alg.generators().iter().enumerate() {
            let _ = writeln!(
                s,
                "  d {} = {}    (degree {})",
                g.name,
                alg.format(p.d_image(pos)),
                g.degree
            );
        }
    }

    let mut s = format!("{}\n", spec.kind);
    let target = || DarbouxSpec::new(spec.target_shape()?, spec.hamiltonian.clone().unwrap_or_default());
    match spec.kind {
        Kind::SymplecticDarboux => section(&mut s, "target", &build_symplectic_darboux(&target()?)?.presentation),
        Kind::ContactDarboux => section(&mut s, "target", &build_contact_darboux(&target()?)?.presentation),
        Kind::Lagrangian | Kind::Legendrian => {
            let ls = LagrangianDarbouxSpec::new(
                target()?,
                spec.n.clone(),
                spec.superpotential.clone().unwrap_or_default(),
            )?;
            let model = if spec.kind == Kind::Lagrangian {
                build_lagrangian_model(&ls)?
            } else {
                build_legendrian_model(&ls)?.model
            };
            section(&mut s, "target", &model.target.presentation);
            section(&mut s, "source", &model.source);
            let (ta, sa) = (model.target.algebra(), model.source.algebra());
            let _ = writeln!(s, "map:");
            for pos in 0..ta.len() {
                let _ = writeln!(
                    s,
                    "  {} -> {}",
                    ta.generator(pos).name,
                    sa.format(model.beta.image(pos))
                );
            }
        }
        Kind::Jet1ZeroSection => {
            let d = build_jet1_zero_section(spec.m.first().copied().unwrap_or(0), spec.shift)?;
            section(&mut s, "target", &d.target);
            section(&mut s, "source", &d.source);
        }
        Kind::PointTarget => section(&mut s, "source", &*spec.point_target_source()?),
    }
    Ok(s)
}
