//! `eqforge`: build the groups, classify isotropy, compute Molien data and
//! equivariant bases, analyse cubic bifurcation problems, and run the
//! self-check suite. Reports are canonical JSON (sorted keys, fixed float
//! format); branches are CSV.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid parameters,
//! 3 non-generic coefficients, 4 numerical ambiguity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eqforge::bifurcation::{
    branch_spectrum, fix_k_extract, off_fix_norm, sphere_zero_search, HYPERBOLICITY_TOL,
};
use eqforge::characters::molien;
use eqforge::equivariants::{canonical_count, equivariant_basis, invariant_dimension};
use eqforge::group::{generator_matrices_g, generator_matrices_h, relation_checks};
use eqforge::linalg::DEFAULT_RANK_TOL;
use eqforge::report::{branch_csv, report_json};
use eqforge::verify::{run_verify, VerifyOptions};
use eqforge::{
    branch_continuation, classify_isotropy, enumerate_group, genericity_check,
    phase_jacobian_at_y0, CubicTruncation, DenseMatrix, Error, GroupParams,
};

#[derive(Parser)]
#[command(
    name = "eqforge",
    version,
    about = "Finite subgroups of SO(4) and O(8) and their equivariant bifurcations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order, generator matrices and relation checks.
    Group(GroupArgs),
    /// Conjugacy classes of isotropy subgroups with nontrivial fixed space.
    Isotropy(GroupArgs),
    /// Molien coefficients R_d and r_d for d ≤ 3.
    Molien(MolienArgs),
    /// Orthonormal basis of homogeneous equivariant maps of one degree.
    Equivariants(EquivariantsArgs),
    /// Phase field spectrum at y₀ and the equilibrium branch of a cubic truncation.
    Bifurcate(BifurcateArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// H_{a,b} acting on ℝ⁴.
    H,
    /// G_{a,b} acting on ℝ⁸.
    G,
}

#[derive(Args)]
struct GroupSpec {
    #[arg(long, value_enum, default_value = "g")]
    family: FamilyArg,
    #[arg(long)]
    a: u64,
    #[arg(long)]
    b: u64,
    /// Odd square root of −1 mod a (eight-dimensional family; default: smallest).
    #[arg(long)]
    rho: Option<u64>,
}

impl GroupSpec {
    fn params(&self) -> eqforge::Result<GroupParams> {
        match (self.family, self.rho) {
            (FamilyArg::H, None) => GroupParams::h4(self.a, self.b),
            (FamilyArg::H, Some(_)) => Err(Error::InvalidParams(
                "--rho applies to the eight-dimensional family".into(),
            )),
            (FamilyArg::G, None) => GroupParams::g8(self.a, self.b),
            (FamilyArg::G, Some(rho)) => GroupParams::g8_with_rho(self.a, self.b, rho),
        }
    }

    fn generators(&self, p: &GroupParams) -> eqforge::Result<Vec<DenseMatrix<f64>>> {
        Ok(match self.family {
            FamilyArg::H => generator_matrices_h::<f64>(p).to_vec(),
            FamilyArg::G => generator_matrices_g::<f64>(p)?.to_vec(),
        })
    }
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(path) => write_file(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Args)]
struct GroupArgs {
    #[command(flatten)]
    group: GroupSpec,
    /// Residual tolerance for matrix identities and rank decisions.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct MolienArgs {
    #[command(flatten)]
    group: GroupSpec,
    /// Largest degree (at most 3).
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Skip the nullspace cross-check.
    #[arg(long)]
    no_cross_check: bool,
    /// Relative singular-value cut for the cross-check.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct EquivariantsArgs {
    #[command(flatten)]
    group: GroupSpec,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct BifurcateArgs {
    #[arg(long, default_value_t = 13)]
    a: u64,
    #[arg(long, default_value_t = 3)]
    b: u64,
    /// Comma-separated (α, β, γ, δ, ε); eight values when a = 5.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    coefficients: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    r_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Random seeds for the search for other zeros of the phase field.
    #[arg(long, default_value_t = 64)]
    seeds: usize,
    /// Eigenvalues with |Re| at or below this are not hyperbolic.
    #[arg(long, default_value_t = HYPERBOLICITY_TOL)]
    hyperbolicity_tol: f64,
    /// Directory for phase_field.json and branch.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Skip the exhaustive product sweep.
    #[arg(long)]
    quick: bool,
    /// Pairs a:b of the eight-dimensional family.
    #[arg(long, value_delimiter = ',', default_values_t = ["5:3".to_string(), "13:3".to_string()])]
    pairs: Vec<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Negative control: perturb one tabulated coefficient.
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[command(flatten)]
    out: Output,
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn matrix_json(m: &DenseMatrix<f64>) -> Value {
    json!(m.rows())
}

fn cmd_group(args: &GroupArgs) -> anyhow::Result<ExitCode> {
    let p = args.group.params()?;
    let names = ["C", "D", "Q", "S", "V"];
    let gens = args.group.generators(&p)?;
    let generator_matrices: serde_json::Map<String, Value> = names
        .iter()
        .zip(&gens)
        .map(|(n, g)| (n.to_string(), matrix_json(g)))
        .collect();
    let rel = relation_checks(&p, args.tol)?;
    let body = json!({
        "group": p.to_string(),
        "params": p,
        "order": p.order(),
        "enumerated_order": enumerate_group(&p).len(),
        "rho": p.rho,
        "generator_matrices": generator_matrices,
        "relation_check": rel,
        "relations_hold": rel.iter().all(|r| r.passed),
    });
    args.out.emit(&report_json("group", &body)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_isotropy(args: &GroupArgs) -> anyhow::Result<ExitCode> {
    let p = args.group.params()?;
    let classes = classify_isotropy(&p, args.tol.max(DEFAULT_RANK_TOL))?;
    let body = json!({
        "group": p.to_string(),
        "params": p,
        "class_count": classes.len(),
        "classes": classes,
    });
    args.out.emit(&report_json("isotropy", &body)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_molien(args: &MolienArgs) -> anyhow::Result<ExitCode> {
    let p = args.group.params()?;
    if args.degree > 3 {
        return Err(Error::UnsupportedDegree(args.degree).into());
    }
    let mut body = serde_json::Map::new();
    body.insert("group".into(), json!(p.to_string()));
    body.insert("params".into(), json!(p));
    let mut equivariant = Vec::new();
    let mut invariant = Vec::new();
    for d in 0..=args.degree {
        let m = molien(&p, d)?;
        body.insert(format!("r_{d}"), json!(m.invariant));
        invariant.push(m.invariant);
        if d > 0 {
            body.insert(format!("R_{d}"), json!(m.equivariant));
            equivariant.push(m.equivariant);
        }
    }
    body.insert("R".into(), json!(equivariant));
    body.insert("r".into(), json!(invariant));
    if !args.no_cross_check {
        let gens = args.group.generators(&p)?;
        let n = p.dim();
        let eq_dims = (1..=args.degree)
            .map(|d| equivariant_basis(&gens, n, d, args.rank_tol).map(|b| b.len() as u64))
            .collect::<eqforge::Result<Vec<_>>>()?;
        let inv_dims = (0..=args.degree)
            .map(|d| invariant_dimension(&gens, n, d, args.rank_tol).map(|v| v as u64))
            .collect::<eqforge::Result<Vec<_>>>()?;
        body.insert(
            "cross_check".into(),
            json!({
                "equivariant_dims": eq_dims,
                "invariant_dims": inv_dims,
                "agree": eq_dims == equivariant && inv_dims == invariant,
            }),
        );
    }
    args.out
        .emit(&report_json("molien", &Value::Object(body))?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_equivariants(args: &EquivariantsArgs) -> anyhow::Result<ExitCode> {
    let p = args.group.params()?;
    if args.degree > 3 {
        return Err(Error::UnsupportedDegree(args.degree).into());
    }
    let gens = args.group.generators(&p)?;
    let basis = equivariant_basis(&gens, p.dim(), args.degree, args.rank_tol)?;
    let body = json!({
        "group": p.to_string(),
        "params": p,
        "degree": args.degree,
        "dimension": basis.len(),
        "molien": molien(&p, args.degree)?.equivariant,
        "basis": basis.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
    });
    args.out.emit(&report_json("equivariants", &body)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bifurcate(args: &BifurcateArgs) -> anyhow::Result<ExitCode> {
    let p = GroupParams::g8(args.a, args.b)?;
    let expected = [5, canonical_count(args.a)];
    if !expected.contains(&args.coefficients.len()) {
        return Err(Error::InvalidParams(format!(
            "{p} takes {} coefficients, got {}",
            if args.a == 5 { "5 or 8" } else { "5" },
            args.coefficients.len()
        ))
        .into());
    }
    let t = CubicTruncation::new(&args.coefficients)?;
    let genericity = genericity_check(&t);
    if !genericity.generic {
        return Err(Error::NotGeneric(genericity.violations).into());
    }
    let mut phase = phase_jacobian_at_y0(&t)?;
    phase.hyperbolic = phase
        .eigenvalues
        .iter()
        .all(|e| e.0.abs() > args.hyperbolicity_tol);
    let branch = branch_continuation(&t, args.r_max, args.steps)?;
    let spectra = branch
        .iter()
        .map(|pt| Ok(json!({ "r": pt.r, "eigenvalues": branch_spectrum(&t, pt)? })))
        .collect::<eqforge::Result<Vec<_>>>()?;
    let zeros = sphere_zero_search(&t.restricted()?, args.seeds)?;
    let law = branch
        .iter()
        .map(|pt| (pt.lambda + t.alpha() * pt.r * pt.r).abs())
        .fold(0.0, f64::max);
    let body = json!({
        "group": p.to_string(),
        "params": p,
        "coefficients": t.coeffs(),
        "genericity": genericity,
        "phase_field": phase,
        "branch": {
            "r_max": args.r_max,
            "steps": args.steps,
            "max_law_deviation": law,
            "max_residual": branch.iter().map(|pt| pt.residual).fold(0.0, f64::max),
            "max_off_fix": branch.iter().map(|pt| off_fix_norm(&pt.x)).fold(0.0, f64::max),
            "end_point": fix_k_extract(&branch[branch.len() - 1].x),
            "spectra": spectra,
        },
        "sphere_zeros": zeros,
    });
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let json_path = args.out_dir.join("phase_field.json");
    let csv_path = args.out_dir.join("branch.csv");
    write_file(&json_path, &report_json("bifurcate", &body)?)?;
    write_file(&csv_path, &branch_csv(&branch))?;
    println!("{}", json_path.display());
    println!("{}", csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn parse_pair(s: &str) -> anyhow::Result<(u64, u64)> {
    let Some((a, b)) = s.split_once(':') else {
        bail!("expected a:b, got {s:?}");
    };
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let pairs = args
        .pairs
        .iter()
        .map(|s| parse_pair(s))
        .collect::<anyhow::Result<Vec<_>>>()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let opts = VerifyOptions {
        pairs,
        quick: args.quick,
        inject_fault: args.inject_fault,
        tol: args.tol,
    };
    let report = run_verify(&opts);
    for c in &report.checks {
        eprintln!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    args.out.emit(&report_json("verify", &report)?)?;
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("EQFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidParams(format!(
            "EQFORGE_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    configure_threads()?;
    match &cli.command {
        Command::Group(a) => cmd_group(a),
        Command::Isotropy(a) => cmd_isotropy(a),
        Command::Molien(a) => cmd_molien(a),
        Command::Equivariants(a) => cmd_equivariants(a),
        Command::Bifurcate(a) => cmd_bifurcate(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .chain()
                .find_map(|c| c.downcast_ref::<Error>())
                .map_or(1, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
