use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nqh_core::blowup::{
    divisor_restriction, pulled_normal_form, strict_transform_factorization, Chart,
};
use nqh_core::cocycle::{
    build_level_matrix_in, closed_form_oracles_with, full_matrix_in, level_one_blocks,
    CocycleContext, CocycleMatrix, Fault, OracleReport, Status, DEFAULT_MARGIN,
};
use nqh_core::lattice::{dimension, enumerate_basis, level_rows, max_level};
use nqh_core::normal_form::{
    build_normal_form, factored_display, read_params, sample_generic_parameters, write_params,
    ParameterPoint,
};
use nqh_core::report::run_verify;
use nqh_core::scalar::{display_rational, format_rational};
use nqh_core::Error;

#[derive(Parser)]
#[command(name = "nqh", version, about = "Normal forms, blow-up charts and cocycle matrices in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartArg {
    V1,
    V2,
    V3,
    V4,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Chart {
        match c {
            ChartArg::V1 => Chart::V1,
            ChartArg::V2 => Chart::V2,
            ChartArg::V3 => Chart::V3,
            ChartArg::V4 => Chart::V4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    M4Sign,
}

#[derive(Args)]
struct Size {
    /// Number of `y + b x²`-type branches plus two.
    m: usize,
    /// Number of `y + a x`-type branches plus one.
    n: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct Point {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Parameter file (`M`, `N`, then `a k i value` / `b k i value` lines).
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension of the moduli space and the cohomology basis.
    Dim {
        #[command(flatten)]
        size: Size,
    },
    /// Basis monomials, optionally of one level only.
    Basis {
        #[command(flatten)]
        size: Size,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Expanded and factored normal form at a parameter point.
    NormalForm {
        #[command(flatten)]
        size: Size,
        #[command(flatten)]
        point: Point,
    },
    /// Pullback of the normal form to a blow-up chart.
    Pullback {
        #[command(flatten)]
        size: Size,
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value = "v4")]
        chart: ChartArg,
    },
    /// Cocycle matrix, its determinants and the closed-form comparisons.
    Matrix {
        #[command(flatten)]
        size: Size,
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Runs every identity check on seeded random points.
    Verify {
        #[command(flatten)]
        size: Size,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

/// Command failure, mapped to an exit code.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalConsistency(_) | Error::InexactDivision(_) => {
                Failure::Check(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(format: Format, doc: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(doc).expect("report serializes")
        ),
        Format::Text => print!("{}", text()),
    }
}

fn load_point(size: &Size, point: &Point) -> Result<(ParameterPoint, Option<u64>), Failure> {
    match &point.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let p = read_params(&text)?;
            if (p.m(), p.n()) != (size.m, size.n) {
                return Err(Failure::Usage(format!(
                    "parameter file is for (M, N) = ({}, {}), not ({}, {})",
                    p.m(),
                    p.n(),
                    size.m,
                    size.n
                )));
            }
            Ok((p, None))
        }
        None => Ok((
            sample_generic_parameters(size.m, size.n, point.seed)?,
            Some(point.seed),
        )),
    }
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Dim { size } => cmd_dim(&size),
        Cmd::Basis { size, level } => cmd_basis(&size, level),
        Cmd::NormalForm { size, point } => cmd_normal_form(&size, &point),
        Cmd::Pullback { size, point, chart } => cmd_pullback(&size, &point, chart.into()),
        Cmd::Matrix { size, point, level } => cmd_matrix(&size, &point, level),
        Cmd::Verify {
            size,
            seed,
            trials,
            inject_fault,
        } => cmd_verify(&size, seed, trials, inject_fault),
    }
}

fn cmd_dim(size: &Size) -> Outcome {
    let d = dimension(size.m, size.n)?;
    let basis = enumerate_basis(size.m, size.n)?;
    let doc = json!({ "M": size.m, "N": size.n, "dimension": d, "basis": basis });
    emit(size.format, &doc, || {
        let mut s = format!("dimension({}, {}) = {d}\n", size.m, size.n);
        for b in &basis {
            s.push_str(&format!("  {b}\n"));
        }
        s
    });
    Ok(true)
}

fn cmd_basis(size: &Size, level: Option<usize>) -> Outcome {
    let rows = match level {
        Some(k) => level_rows(size.m, size.n, k)?,
        None => enumerate_basis(size.m, size.n)?,
    };
    let doc = json!({ "M": size.m, "N": size.n, "level": level, "rows": rows });
    emit(size.format, &doc, || {
        let mut s = String::new();
        for k in 1..=max_level(size.m, size.n) {
            let at: Vec<_> = rows.iter().filter(|r| r.level == k).collect();
            if at.is_empty() {
                continue;
            }
            s.push_str(&format!("level {k}:"));
            for r in at {
                s.push_str(&format!(" x4^{} y4^{} [{}]", r.i, r.j, r.component));
            }
            s.push('\n');
        }
        s
    });
    Ok(true)
}

fn cmd_normal_form(size: &Size, point: &Point) -> Outcome {
    let (p, seed) = load_point(size, point)?;
    let f = build_normal_form(&p);
    let factored = factored_display(&p);
    let file = write_params(&p);
    let roundtrip = read_params(&file)? == p;
    let doc = json!({
        "M": size.m,
        "N": size.n,
        "seed": seed,
        "params": p,
        "factored": factored,
        "expanded": f.to_string(),
        "params_roundtrip": roundtrip,
    });
    emit(size.format, &doc, || {
        format!("N = {factored}\n  = {f}\n\n{file}")
    });
    Ok(roundtrip)
}

fn cmd_pullback(size: &Size, point: &Point, chart: Chart) -> Outcome {
    let (p, seed) = load_point(size, point)?;
    let pulled = pulled_normal_form(&p, chart)?;
    let fact = strict_transform_factorization(&p, chart)?;
    let restriction = match chart {
        Chart::V4 => None,
        _ => Some(divisor_restriction(&fact)?),
    };
    let vars = chart.vars();
    let doc = json!({
        "M": size.m,
        "N": size.n,
        "seed": seed,
        "chart": chart.to_string(),
        "exceptional_exponents": [fact.exc_x, fact.exc_y],
        "strict_transform": fact.rest.to_string(),
        "restriction": restriction.as_ref().map(|r| r.coeffs().iter().map(format_rational).collect::<Vec<_>>()),
        "pullback": pulled.to_string(),
    });
    emit(size.format, &doc, || {
        let mut s = format!(
            "chart {chart}: {}^{} {}^{} · ({})\n",
            vars.0, fact.exc_x, vars.1, fact.exc_y, fact.rest
        );
        if let Some(r) = &restriction {
            s.push_str(&format!("restriction to the divisor: {r}\n"));
        }
        s
    });
    Ok(true)
}

fn block_dets(mat: &CocycleMatrix) -> Result<Vec<(usize, String)>, Failure> {
    let mut out = Vec::new();
    for b in &mat.blocks {
        let blk = mat.block(b.level).expect("listed block exists");
        out.push((b.level, format_rational(&blk.det()?)));
    }
    Ok(out)
}

fn cmd_matrix(size: &Size, point: &Point, level: Option<usize>) -> Outcome {
    let (p, seed) = load_point(size, point)?;
    let ctx = CocycleContext::new(&p)?;
    let mat = match level {
        Some(k) => build_level_matrix_in(&ctx, k, DEFAULT_MARGIN)?,
        None => full_matrix_in(&ctx, DEFAULT_MARGIN)?,
    };
    let det = mat.det()?;
    let dets = block_dets(&mat)?;
    let oracles = closed_form_oracles_with(&ctx, None)?;
    let triangular = mat.is_block_lower_triangular();
    let doc = json!({
        "seed": seed,
        "level": level,
        "matrix": mat,
        "det": format_rational(&det),
        "block_dets": dets.iter().map(|(k, d)| json!({ "level": k, "det": d })).collect::<Vec<_>>(),
        "block_lower_triangular": triangular,
        "oracles": oracles,
    });
    emit(size.format, &doc, || {
        let mut s = format!(
            "{}x{} cocycle matrix, blocks {:?}\n{mat}\n",
            mat.rows.len(),
            mat.cols.len(),
            mat.block_sizes()
        );
        if mat.blocks.iter().any(|b| b.level == 1) {
            let a1 = mat.block(1).expect("level 1 present");
            let a1 = CocycleMatrix {
                rows: mat.rows[mat.blocks[0].rows.clone()].to_vec(),
                cols: mat.cols[mat.blocks[0].cols.clone()].to_vec(),
                entries: a1,
                blocks: vec![],
                ..mat.clone()
            };
            for (name, b) in ["M1", "M2", "M3", "M4"].iter().zip(level_one_blocks(&a1)) {
                s.push_str(&format!(
                    "{name} ({}x{}){}\n",
                    b.rows(),
                    b.cols(),
                    if b.is_zero() { " = 0" } else { "" }
                ));
            }
        }
        for (k, d) in &dets {
            s.push_str(&format!("det A_{k} = {d}\n"));
        }
        s.push_str(&format!("det = {}\n", display_rational(&det)));
        s.push_str(&format!("block lower triangular: {triangular}\n"));
        s.push_str(&oracle_text(&oracles));
        s
    });
    Ok(oracles.passed() && triangular)
}

fn oracle_text(r: &OracleReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        if c.detail.is_empty() {
            s.push_str(&format!("[{}] {}\n", c.status, c.name));
        } else {
            s.push_str(&format!("[{}] {} {}\n", c.status, c.name, c.detail));
        }
    }
    s
}

fn cmd_verify(size: &Size, seed: u64, trials: usize, fault: Option<FaultArg>) -> Outcome {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let fault = fault.map(|f| match f {
        FaultArg::M4Sign => Fault::M4Sign,
    });
    let report = run_verify(size.m, size.n, seed, trials, fault)?;
    let doc = serde_json::to_value(&report).expect("report serializes");
    emit(size.format, &doc, || {
        let mut s = String::new();
        for c in &report.checks {
            s.push_str(&format!("[{}] {}", c.status, c.name));
            if c.status == Status::Fail && !c.detail.is_empty() {
                s.push_str(&format!(" ({})", c.detail));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "{} passed, {} failed, {} skipped (M = {}, N = {}, seed {seed}, {trials} trials)\n",
            report.count(Status::Pass),
            report.count(Status::Fail),
            report.count(Status::Skipped),
            size.m,
            size.n
        ));
        s
    });
    Ok(report.passed)
}
