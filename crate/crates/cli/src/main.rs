mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use braidtri::angles::{find_interior_point, to_csv};
use braidtri::braid::{verify_pretzel_chain_with, verify_tlink_form_with, ChainReport, Tamper};
use braidtri::geometry::{Tolerances, Verdict};
use braidtri::notation::{canonical_table, same_named_triangulation};
use braidtri::par;
use braidtri::pipeline::{prepare, solve_prepared, Solution, Subject};
use braidtri::tau::{build_hat_tau, build_tau, hat_after_three_two, simplify_hat_to_tau};
use braidtri::triangulation::Triangulation;
use braidtri::twobridge::{twobridge_report, TwistWord};
use braidtri::volume::{multistart, MaxOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use output::{num, Report};

/// Ideal triangulations of C^2 s1^p s2^-1 closures and two-bridge links,
/// angle structures and volume maximization.
#[derive(Parser)]
#[command(name = "braidtri", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build triangulations and print edge and cusp censuses.
    Build(TargetArgs),
    /// Run the 3-2 and 2-0 moves from the preliminary triangulation.
    Simplify(RangeArgs),
    /// Maximize volume and certify the result.
    Solve(SolveArgs),
    /// Positive angle structure from the linear program.
    Angles(TargetArgs),
    /// Shape parameters and gluing residuals at the maximizer.
    Shapes(SolveArgs),
    /// Verify the braid identities for each p.
    BraidCheck(BraidArgs),
    /// Layered triangulation of a two-bridge link from a twist word.
    Twobridge(WordArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PRange {
    start: usize,
    end: usize,
}

impl PRange {
    fn values(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

fn parse_range(text: &str) -> Result<PRange, String> {
    let one = |s: &str| -> Result<usize, String> {
        let p: usize = s
            .trim()
            .parse()
            .map_err(|_| format!("'{s}' is not a nonnegative integer"))?;
        if p == 0 {
            return Err("p must be at least 1".into());
        }
        Ok(p)
    };
    let (start, end) = match text.split_once("..") {
        Some((a, b)) => (one(a)?, one(b.trim_start_matches('='))?),
        None => {
            let p = one(text)?;
            (p, p)
        }
    };
    if start > end {
        return Err(format!("empty range {text}"));
    }
    Ok(PRange { start, end })
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Target {
    /// Parameter p, or an inclusive range `a..b`.
    #[arg(long, value_parser = parse_range)]
    p: Option<PRange>,
    /// Two-bridge twist word such as RRRLLR or R3L2R1.
    #[arg(long)]
    word: Option<String>,
    /// Triangulation document (JSON).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TargetArgs {
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, value_parser = parse_range)]
    p: PRange,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    target: Target,
    /// Gradient-norm tolerance of the Newton iteration.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Seed for the random starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additional random starts used to check that the maximizer is unique.
    #[arg(long, default_value_t = 1)]
    starts: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BraidArgs {
    #[arg(long, value_parser = parse_range)]
    p: PRange,
    /// Corrupt the given chain step (negative control).
    #[arg(long, hide = true)]
    tamper_step: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WordArgs {
    #[arg(long)]
    word: String,
    #[command(flatten)]
    output: OutputArgs,
}

const OK: u8 = 0;
const ERROR: u8 = 1;
const DEGENERATE: u8 = 2;

type CmdResult = Result<(Report, u8), String>;

fn subjects(t: &Target) -> Result<Vec<Subject>, String> {
    if let Some(r) = t.p {
        return Ok(r.values().map(Subject::Tau).collect());
    }
    if let Some(w) = &t.word {
        return Ok(vec![Subject::TwoBridge(
            TwistWord::parse(w).map_err(|e| e.to_string())?,
        )]);
    }
    let path = t.file.as_ref().expect("clap requires one target");
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let bad = |e: String| format!("{}: {e}", path.display());
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    // `build --format json` output is accepted as well as a bare document.
    let docs = match doc.get("results").and_then(|r| r.as_array()) {
        Some(rs) => rs
            .iter()
            .filter_map(|r| r.get("triangulation"))
            .cloned()
            .collect(),
        None => vec![doc],
    };
    docs.into_iter()
        .map(|d| {
            Triangulation::from_json(&d.to_string())
                .map(Subject::Given)
                .map_err(|e| bad(e.to_string()))
        })
        .collect()
}

fn build(args: &TargetArgs) -> CmdResult {
    let mut report = Report::new(
        "build",
        "subject,tets,gluings,edge_classes,edge_degrees,cusps,cusp_euler_characteristics",
    );
    for s in subjects(&args.target)? {
        let label = s.label();
        let prep = prepare(&s).map_err(|e| format!("{label}: {e}"))?;
        let tri = &prep.tri;
        let mut degrees: Vec<usize> = tri
            .edge_classes()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|c| c.degree())
            .collect();
        degrees.sort_unstable();
        let links = tri.cusp_links().map_err(|e| e.to_string())?;
        let chis: Vec<i64> = links.iter().map(|l| l.euler_characteristic).collect();
        report.json.push(json!({
            "subject": label,
            "tets": tri.len(),
            "gluings": tri.gluings().len(),
            "edge_degrees": degrees,
            "cusps": links.len(),
            "cusp_euler_characteristics": chis,
            "triangulation": tri.to_json_value(),
        }));
        report.csv_row(&[
            label.clone(),
            tri.len().to_string(),
            tri.gluings().len().to_string(),
            degrees.len().to_string(),
            join(&degrees),
            links.len().to_string(),
            join(&chis),
        ]);
        report.line(format!(
            "{label}: {} tets, {} gluings, edge degrees [{}], {} cusp(s), euler characteristics [{}]",
            tri.len(),
            tri.gluings().len(),
            join(&degrees),
            links.len(),
            join(&chis)
        ));
        for row in canonical_table(tri) {
            report.line(format!("  {row}"));
        }
    }
    Ok((report, OK))
}

fn simplify(args: &RangeArgs) -> CmdResult {
    let mut report = Report::new(
        "simplify",
        "p,hat_tets,after_3_2_tets,tau_tets,matches_build_tau",
    );
    let mut code = OK;
    for p in args.p.values() {
        let err = |e: braidtri::error::Error| format!("p={p}: {e}");
        let hat = build_hat_tau(p).map_err(err)?;
        let mid = hat_after_three_two(&hat).map_err(err)?;
        let tau = simplify_hat_to_tau(&hat, p).map_err(err)?;
        let matches = same_named_triangulation(&tau, &build_tau(p).map_err(err)?);
        if !matches {
            code = ERROR;
        }
        let counts = [hat.len(), mid.len(), tau.len()];
        report.json.push(json!({
            "p": p,
            "tets": counts,
            "matches_build_tau": matches,
            "table": canonical_table(&tau),
        }));
        report.csv_row(&[
            p.to_string(),
            counts[0].to_string(),
            counts[1].to_string(),
            counts[2].to_string(),
            matches.to_string(),
        ]);
        report.line(format!(
            "p={p}: {} -> {} -> {} tets, {}",
            counts[0],
            counts[1],
            counts[2],
            if matches {
                "matches build_tau"
            } else {
                "DIFFERS from build_tau"
            }
        ));
    }
    Ok((report, code))
}

fn angles(args: &TargetArgs) -> CmdResult {
    let mut report = Report::new("angles", "subject,tet,slot,radians,over_pi");
    let mut code = OK;
    for s in subjects(&args.target)? {
        let label = s.label();
        let prep = prepare(&s).map_err(|e| format!("{label}: {e}"))?;
        let ip = find_interior_point(&prep.cs);
        let slots: Vec<String> = (0..prep.cs.n_cols())
            .map(|c| prep.cs.column_name(c))
            .collect();
        report
            .json
            .push(json!({ "subject": label, "slots": slots, "interior_point": ip }));
        if !ip.feasible {
            code = DEGENERATE;
            let why = ip
                .certificate
                .as_ref()
                .map(|c| c.explanation.clone())
                .unwrap_or_default();
            report.line(format!("{label}: no positive angle structure: {why}"));
            continue;
        }
        report.line(format!(
            "{label}: feasible, smallest angle {} = pi * {}",
            num(ip.min_slack),
            ip.min_angle_pi
        ));
        let csv = to_csv(&prep.cs, &ip.theta).map_err(|e| e.to_string())?;
        for row in csv.lines().skip(1) {
            report.csv.push_str(&format!("{label},{row}\n"));
        }
        for (c, x) in ip.theta.iter().enumerate() {
            report.line(format!("  {:<16} {}", slots[c], num(*x)));
        }
    }
    Ok((report, code))
}

#[derive(Serialize)]
struct MultiStart {
    starts: usize,
    seed: u64,
    /// Largest coordinate distance from the first run's maximizer.
    spread: f64,
    volume_min: f64,
    volume_max: f64,
}

struct Solved {
    label: String,
    solution: Solution,
    multistart: Option<MultiStart>,
}

fn run_solver(args: &SolveArgs) -> Result<Vec<Solved>, String> {
    let opts = MaxOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        ..MaxOptions::default()
    };
    let tol = Tolerances::default();
    let subjects = subjects(&args.target)?;
    let results = par::map(&subjects, |s| -> Result<Solved, String> {
        let label = s.label();
        let prep = prepare(s).map_err(|e| format!("{label}: build failed: {e}"))?;
        let solution = solve_prepared(&prep, &opts, &tol).map_err(|e| format!("{label}: {e}"))?;
        let multistart = if args.starts > 1 && solution.max.as_ref().is_some_and(|m| m.interior) {
            let runs = multistart(&prep.cs, args.starts, args.seed, &opts)
                .map_err(|e| format!("{label}: multistart failed: {e}"))?;
            let first = &runs[0].theta;
            let spread = runs
                .iter()
                .flat_map(|r| r.theta.iter().zip(first).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            let volumes = runs.iter().map(|r| r.volume);
            Some(MultiStart {
                starts: args.starts,
                seed: args.seed,
                spread,
                volume_min: volumes.clone().fold(f64::INFINITY, f64::min),
                volume_max: volumes.fold(f64::NEG_INFINITY, f64::max),
            })
        } else {
            None
        };
        Ok(Solved {
            label,
            solution,
            multistart,
        })
    });
    results.into_iter().collect()
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Geometric => "geometric",
        Verdict::Degenerate { .. } => "degenerate",
    }
}

fn solve(args: &SolveArgs) -> CmdResult {
    let mut report = Report::new(
        "solve",
        "subject,tets,cusps,verdict,volume,min_angle,grad_norm,iterations,max_edge_residual,max_cusp_residual",
    );
    let mut code = OK;
    for Solved {
        label,
        solution: s,
        multistart,
    } in run_solver(args)?
    {
        if !s.verdict.is_geometric() {
            code = DEGENERATE;
        }
        let m = s.max.as_ref();
        let field =
            |f: fn(&braidtri::volume::MaxResult) -> f64| m.map(|m| num(f(m))).unwrap_or_default();
        report.csv_row(&[
            label.clone(),
            s.tets.to_string(),
            s.cusps.to_string(),
            verdict_name(&s.verdict).into(),
            field(|m| m.volume),
            field(|m| m.min_angle),
            field(|m| m.grad_norm),
            m.map(|m| m.iterations.to_string()).unwrap_or_default(),
            num(s.max_edge_residual()),
            num(s.max_cusp_residual()),
        ]);
        match (&s.verdict, m) {
            (Verdict::Geometric, Some(m)) => report.line(format!(
                "{label}: geometric, volume {}, min angle {}, gradient {}, {} iterations, edge residual {}, cusp residual {}",
                num(m.volume),
                num(m.min_angle),
                num(m.grad_norm),
                m.iterations,
                num(s.max_edge_residual()),
                num(s.max_cusp_residual())
            )),
            (Verdict::Degenerate { reason, .. }, _) => report.line(format!("{label}: degenerate: {reason}")),
            (Verdict::Geometric, None) => unreachable!("a geometric verdict always has a maximizer"),
        }
        if let Some(ms) = &multistart {
            report.line(format!(
                "  {} starts (seed {}): spread {}, volumes {} .. {}",
                ms.starts,
                ms.seed,
                num(ms.spread),
                num(ms.volume_min),
                num(ms.volume_max)
            ));
        }
        report.json.push(json!({
            "subject": label,
            "verdict": verdict_name(&s.verdict),
            "volume": m.map(|m| m.volume),
            "max_edge_residual": s.max_edge_residual(),
            "max_cusp_residual": s.max_cusp_residual(),
            "multistart": multistart,
            "solution": s,
        }));
    }
    Ok((report, code))
}

fn shapes(args: &SolveArgs) -> CmdResult {
    let mut report = Report::new("shapes", "subject,tet,pair,re,im,arg");
    let mut code = OK;
    for Solved {
        label, solution: s, ..
    } in run_solver(args)?
    {
        if !s.verdict.is_geometric() {
            code = DEGENERATE;
        }
        report.line(format!("{label}: {}", verdict_name(&s.verdict)));
        for shape in &s.shapes {
            let zs: Vec<String> = shape
                .order
                .iter()
                .map(|&k| complex(shape.by_pair[k]))
                .collect();
            report.line(format!(
                "  {:<8} z = {}   z' = {}   z'' = {}",
                shape.tet, zs[0], zs[1], zs[2]
            ));
            for (k, z) in shape.by_pair.iter().enumerate() {
                report.csv_row(&[
                    label.clone(),
                    shape.tet.clone(),
                    k.to_string(),
                    num(z.re),
                    num(z.im),
                    num(z.arg()),
                ]);
            }
        }
        for (i, e) in s.edges.iter().enumerate() {
            report.line(format!(
                "  edge {i:<3} degree {:<3} |prod - 1| {}  |sum arg - 2pi| {}",
                e.degree,
                num(e.modulus),
                num(e.angle)
            ));
        }
        for c in &s.cusp_residuals {
            report.line(format!(
                "  cusp {}: cycles {} {}",
                c.cusp,
                num(c.cycles[0]),
                num(c.cycles[1])
            ));
        }
        report.json.push(json!({
            "subject": label,
            "verdict": s.verdict,
            "shapes": s.shapes,
            "edges": s.edges,
            "cusps": s.cusp_residuals,
        }));
    }
    Ok((report, code))
}

fn complex(z: num_complex::Complex64) -> String {
    let sign = if z.im < 0.0 { "-" } else { "+" };
    format!("{} {sign} {}i", num(z.re), num(z.im.abs()))
}

fn chain_summary(r: &ChainReport) -> String {
    match r.failed_step {
        None => format!("ok ({} steps)", r.steps.len()),
        Some(k) => {
            let s = &r.steps[k - 1];
            format!("FAILED at step {k}: {} -> {}", s.from, s.to)
        }
    }
}

fn braid_check(args: &BraidArgs) -> CmdResult {
    let mut report = Report::new(
        "braid-check",
        "p,pretzel_chain,tlink_form,exponent_sum,failed_step",
    );
    let tamper = args.tamper_step.map(|step| Tamper { step });
    let mut code = OK;
    for p in args.p.values() {
        let chain = verify_pretzel_chain_with(p, tamper);
        let tlink = verify_tlink_form_with(p, tamper);
        let ok = chain.ok && tlink.ok;
        if !ok {
            code = ERROR;
        }
        let exp = chain.exponent_sums[0];
        report.csv_row(&[
            p.to_string(),
            chain.ok.to_string(),
            tlink.ok.to_string(),
            exp.to_string(),
            chain
                .failed_step
                .or(tlink.failed_step)
                .map(|k| k.to_string())
                .unwrap_or_default(),
        ]);
        report.line(format!(
            "p={p}: exponent sum {exp}, pretzel chain {}, T-link form {}",
            chain_summary(&chain),
            chain_summary(&tlink)
        ));
        if !ok {
            report.line(chain.table());
            report.line(tlink.table());
        }
        report.json.push(json!({ "p": p, "ok": ok, "exponent_sum": exp, "pretzel_chain": chain, "tlink_form": tlink }));
    }
    Ok((report, code))
}

fn twobridge(args: &WordArgs) -> CmdResult {
    let mut report = Report::new(
        "twobridge",
        "word,layers,tets,valid,edge_degrees,cusps,cusp_euler_characteristics",
    );
    let word = TwistWord::parse(&args.word).map_err(|e| e.to_string())?;
    let r = twobridge_report(&word).map_err(|e| e.to_string())?;
    report.csv_row(&[
        r.word.clone(),
        r.layers.to_string(),
        r.tets.to_string(),
        r.valid.to_string(),
        join(&r.edge_degrees),
        r.cusps.to_string(),
        join(&r.cusp_euler_characteristics),
    ]);
    report.line(format!(
        "{}: {} layers, {} tets, {}, edge degrees [{}], {} cusp(s), euler characteristics [{}]",
        r.word,
        r.layers,
        r.tets,
        if r.valid { "valid" } else { "INVALID" },
        join(&r.edge_degrees),
        r.cusps,
        join(&r.cusp_euler_characteristics)
    ));
    report
        .json
        .push(serde_json::to_value(&r).map_err(|e| e.to_string())?);
    Ok((report, if r.valid { OK } else { ERROR }))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ERROR } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (result, output) = match &cli.command {
        Command::Build(a) => (build(a), &a.output),
        Command::Simplify(a) => (simplify(a), &a.output),
        Command::Solve(a) => (solve(a), &a.output),
        Command::Angles(a) => (angles(a), &a.output),
        Command::Shapes(a) => (shapes(a), &a.output),
        Command::BraidCheck(a) => (braid_check(a), &a.output),
        Command::Twobridge(a) => (twobridge(a), &a.output),
    };
    match result {
        Ok((report, code)) => {
            let text = match output.format {
                Format::Json => report.json_text(),
                Format::Csv => report.csv_text(),
                Format::Text => report.text,
            };
            if let Err(e) = output::write(output.out.as_deref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(ERROR);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR)
        }
    }
}
