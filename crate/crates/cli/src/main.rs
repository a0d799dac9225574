use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lojasiewicz::parse::parse_germ;
use lojasiewicz::report::{
    analyze, audits_json, exit, exit_code_for, fan_report, nondegen_report, run_audits, verify_only, Options,
    UserExponents,
};
use lojasiewicz::verify::{write_envelope_csv, AuditResult};
use lojasiewicz::{Error, TaylorModel};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "loja", version, about = "Łojasiewicz exponents of Newton non-degenerate germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: polyhedron, fan, hypotheses, exponents and audits.
    Analyze(Common),
    /// Everything except the numeric audits.
    Exponents(Common),
    /// Dump the normal fan and its unimodular refinement.
    Fan(Common),
    /// Face-by-face non-degeneracy verdicts.
    Nondegen(Common),
    /// Audit user-supplied exponents.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Gradient exponent θ, as a rational or decimal.
        #[arg(long, value_parser = parse_number)]
        theta: Option<f64>,
        /// Exponent α for the monomial comparison.
        #[arg(long, value_parser = parse_number)]
        alpha: Option<f64>,
        /// Distance exponent ℒ.
        #[arg(long, value_parser = parse_number)]
        loj: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Declared {
    Nonnegative,
    Convex,
}

#[derive(Args)]
struct Common {
    /// Germ file, text or JSON.
    #[arg(required_unless_present = "expr", conflicts_with = "expr")]
    file: Option<PathBuf>,
    /// Inline germ, e.g. "x^2 + y^2".
    #[arg(short, long)]
    expr: Option<String>,
    /// Write the JSON report here; "-" prints it instead of the summary.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory for (radius, min-ratio) CSV tables, one per audit.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample directions per radius level.
    #[arg(long, default_value_t = lojasiewicz::verify::DEFAULT_DIRECTIONS)]
    samples: usize,
    /// Outer radius of the sampling grid (max-norm).
    #[arg(long, default_value_t = lojasiewicz::verify::DEFAULT_RADIUS)]
    radius: f64,
    /// Residual threshold of the numeric non-degeneracy search.
    #[arg(long, default_value_t = lojasiewicz::nondegen::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = lojasiewicz::newton::MAX_DIM)]
    max_dim: usize,
    /// Run audits even when a hypothesis gate fails; results are marked.
    #[arg(long)]
    force: bool,
    /// User hypotheses; convex implies non-negative.
    #[arg(long, value_enum)]
    declare: Vec<Declared>,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            seed: self.seed,
            samples: self.samples,
            radius: self.radius,
            tol: self.tol,
            max_dim: self.max_dim,
            force: self.force,
            declare_nonnegative: self.declare.contains(&Declared::Nonnegative),
            declare_convex: self.declare.contains(&Declared::Convex),
            ..Options::default()
        }
    }

    fn model(&self) -> lojasiewicz::Result<TaylorModel> {
        let text = match (&self.file, &self.expr) {
            (Some(p), None) => fs::read_to_string(p).map_err(|e| {
                Error::InvalidModel(format!("cannot read {}: {e}", p.display()))
            })?,
            (None, Some(e)) => e.clone(),
            _ => unreachable!("clap enforces exactly one source"),
        };
        parse_germ(&text)
    }
}

fn parse_number(s: &str) -> Result<f64, String> {
    let bad = || format!("'{s}' is not a number");
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn emit(common: &Common, report: &Value, summary: &str) -> lojasiewicz::Result<()> {
    match &common.json {
        Some(p) if p.as_os_str() == "-" => println!("{}", serde_json::to_string_pretty(report)?),
        Some(p) => {
            fs::write(p, serde_json::to_string_pretty(report)?)?;
            print!("{summary}");
        }
        None => print!("{summary}"),
    }
    Ok(())
}

fn dump_csv(dir: Option<&Path>, audits: &[AuditResult]) -> lojasiewicz::Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    fs::create_dir_all(dir)?;
    for a in audits {
        write_envelope_csv(&dir.join(format!("{}.csv", a.inequality)), a)?;
    }
    Ok(())
}

fn audit_lines(audits: &[AuditResult]) -> String {
    audits
        .iter()
        .map(|a| {
            format!(
                "audit {:<16} exponent {:<8} min {:.4e} slope {:+.3} {:?}\n",
                a.inequality,
                a.exponent.map_or("-".into(), |e| format!("{e:.4}")),
                a.min_ratio,
                a.empirical_slope,
                a.verdict
            )
        })
        .collect()
}

fn run(cli: Cli) -> lojasiewicz::Result<i32> {
    match cli.command {
        Command::Analyze(c) => pipeline(&c, true),
        Command::Exponents(c) => pipeline(&c, false),
        Command::Fan(c) => {
            let report = fan_report(&c.model()?, &c.options())?;
            let summary = format!(
                "{} rays, {} unimodular cones, L = {}, N = {}\n",
                report["resolution"]["rays"].as_array().map_or(0, Vec::len),
                report["resolution"]["cones"].as_array().map_or(0, Vec::len),
                report["L"]["num"],
                report["N"]["num"],
            );
            emit(&c, &report, &summary)?;
            Ok(exit::OK)
        }
        Command::Nondegen(c) => {
            let (report, ok) = nondegen_report(&c.model()?, &c.options())?;
            let faces = report["nondegeneracy"]["faces"].as_array().map_or(0, Vec::len);
            let summary = format!(
                "{faces} compact faces, nondegenerate: {ok}, certified: {}\n",
                report["nondegeneracy"]["certified"]
            );
            emit(&c, &report, &summary)?;
            Ok(if ok { exit::OK } else { exit::GATE })
        }
        Command::Verify {
            common,
            theta,
            alpha,
            loj,
        } => {
            let model = common.model()?;
            let user = UserExponents { theta, alpha, loj };
            let audits = verify_only(&model, &user, &common.options())?;
            dump_csv(common.csv.as_deref(), &audits)?;
            let report = json!({"audits": audits_json(&audits)});
            emit(&common, &report, &audit_lines(&audits))?;
            Ok(exit::OK)
        }
    }
}

fn pipeline(c: &Common, audits: bool) -> lojasiewicz::Result<i32> {
    let opts = c.options();
    let mut a = analyze(&c.model()?, &opts)?;
    if audits {
        run_audits(&mut a, &opts)?;
        dump_csv(c.csv.as_deref(), &a.audits)?;
    }
    emit(c, &a.to_json(), &a.summary())?;
    Ok(a.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
