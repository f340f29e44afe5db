//! `qtate`: JSON front end to the qtate library.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! malformed input, 3 for a violated precondition.

mod sampler;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use qtate::field::parse_rational;
use qtate::k3model::{self, ChartModel, KThreePresentation, Overlap};
use qtate::qalg::{Domain, TwistForm};
use qtate::scatter::{self, ScatteringDiagram, WallAutomorphism};
use qtate::sheaf::{self, ActionConvention, TransitionData};
use qtate::spectra::{self, SpectrumPoint};
use qtate::{default_precision, int, Algebra, Element, Free, Rational, Scalar};

use sampler::Sampler;

#[derive(Parser)]
#[command(name = "qtate", version, about = "Exact quantum Tate algebra computations over Q((t))")]
struct Cli {
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gauss norms of twisted and free elements.
    #[command(subcommand)]
    Norm(NormCmd),
    /// Seminorms at points of the Berkovich spectrum.
    #[command(subcommand)]
    Seminorm(SeminormCmd),
    /// Transition maps acting on sections and points.
    #[command(subcommand)]
    Sheaf(SheafCmd),
    /// Wall-crossing factorization and scattering.
    #[command(subcommand)]
    Scatter(ScatterCmd),
    /// The quantum K3 local model.
    #[command(subcommand)]
    K3(K3Cmd),
}

#[derive(Subcommand)]
enum NormCmd {
    /// Gauss norm of an element at log-radii.
    Gauss {
        #[arg(long)]
        element: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
    },
    /// Checks gauss_norm(fg) = gauss_norm(f) + gauss_norm(g).
    Mul {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
    },
    /// Path-monomial norm of a free-algebra element.
    Free {
        #[arg(long)]
        element: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        radii: String,
    },
    /// Randomized multiplicativity suite with q = 1 + t.
    Check(NormCheck),
}

#[derive(Args)]
struct NormCheck {
    #[arg(long, default_value_t = 500)]
    pairs: usize,
    #[arg(long, default_value_t = 200)]
    free_pairs: usize,
    #[arg(long, default_value_t = 3)]
    max_dim: usize,
    #[arg(long, default_value_t = 5)]
    max_degree: i64,
}

#[derive(Subcommand)]
enum SeminormCmd {
    /// Evaluates a point on an element.
    Eval {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Randomized multiplicativity check at a point, with q = 1 + t.
    Check {
        #[arg(long)]
        point: PathBuf,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Direct,
    Inverse,
}

impl From<Convention> for ActionConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Direct => ActionConvention::Direct,
            Convention::Inverse => ActionConvention::Inverse,
        }
    }
}

#[derive(Subcommand)]
enum SheafCmd {
    /// Transforms a section and a point and compares stalk norms.
    Transform {
        #[arg(long)]
        transition: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value_t = Convention::Direct)]
        convention: Convention,
    },
}

#[derive(Subcommand)]
enum ScatterCmd {
    /// The standard two-wall input.
    Standard {
        #[arg(long)]
        order: u32,
        /// Use q = 1 instead of q = 1 + t.
        #[arg(long)]
        classical: bool,
    },
    /// Factorizes g_inf . g_0 into slope-ordered factors.
    Factorize {
        #[arg(long)]
        g0: PathBuf,
        #[arg(long)]
        ginf: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Runs every collision of a diagram of rays.
    Chart {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        order: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OverlapArg {
    #[value(name = "u1_u2")]
    U1U2,
    #[value(name = "u1_u3")]
    U1U3,
}

#[derive(Subcommand)]
enum K3Cmd {
    /// Relation residuals of a chart.
    Verify {
        #[arg(long)]
        chart: u8,
        #[arg(long)]
        order: u32,
        /// Specialize to t = 0 (q = 1).
        #[arg(long)]
        t_zero: bool,
    },
    /// Compatibility of j o pi with f on a grid of the chart domain.
    Sweep {
        #[arg(long)]
        chart: u8,
        #[arg(long, default_value_t = 10)]
        grid: u32,
    },
    /// Gluing automorphism checks on an overlap.
    Glue {
        #[arg(long, value_enum)]
        overlap: OverlapArg,
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long, default_value_t = 8)]
        grid: u32,
    },
    /// Which orientation conventions make all charts homomorphisms.
    Conventions,
}

enum Failure {
    Input(String),
    Precondition(String),
    Check(Value),
}

impl From<qtate::Error> for Failure {
    fn from(e: qtate::Error) -> Self {
        if e.is_parse() {
            Failure::Input(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    }
}

type Outcome = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Norm(c) => norm(c, cli.seed),
        Command::Seminorm(c) => seminorm(c, cli.seed),
        Command::Sheaf(c) => sheaf_cmd(c),
        Command::Scatter(c) => scatter_cmd(c),
        Command::K3(c) => k3(c),
    };
    match out {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(v)) => {
            print(&v);
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: malformed input: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn rationals(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(|x| parse_rational(x).ok_or_else(|| Failure::Input(format!("bad rational {x:?}"))))
        .collect()
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn verdict(passed: bool, report: Value) -> Outcome {
    if passed {
        Ok(report)
    } else {
        Err(Failure::Check(report))
    }
}

fn one_plus_t(precision: i64) -> Scalar {
    Scalar::from_terms([(0, int(1)), (1, int(1))], precision)
}

fn norm(cmd: NormCmd, seed: u64) -> Outcome {
    match cmd {
        NormCmd::Gauss { element, rho } => {
            let f: Element = read_json(&element)?;
            Ok(json!({ "lognorm": f.gauss_norm(&rationals(&rho)?)? }))
        }
        NormCmd::Mul { f, g, rho } => {
            let f: Element = read_json(&f)?;
            let g: Element = read_json(&g)?;
            let rho = rationals(&rho)?;
            let (nf, ng) = (f.gauss_norm(&rho)?, g.gauss_norm(&rho)?);
            let nfg = f.try_mul(&g)?.gauss_norm(&rho)?;
            let ok = nfg == &nf + &ng;
            verdict(ok, json!({ "lognorm_f": nf, "lognorm_g": ng, "lognorm_fg": nfg, "multiplicative": ok }))
        }
        NormCmd::Free { element, radii } => {
            let f: Free = read_json(&element)?;
            Ok(json!({ "lognorm": f.gauss_norm(&rationals(&radii)?)? }))
        }
        NormCmd::Check(c) => norm_check(c, seed),
    }
}

fn norm_check(c: NormCheck, seed: u64) -> Outcome {
    let p = default_precision();
    let mut s = Sampler::new(seed, p);
    let mut failures = Vec::new();
    for i in 0..c.pairs {
        let d = s.dim(c.max_dim.max(1));
        let alg = Algebra::new(TwistForm::ordered(d), one_plus_t(p))?;
        let f = s.element(&alg, Domain::Polydisc, c.max_degree, 4);
        let g = s.element(&alg, Domain::Polydisc, c.max_degree, 4);
        let rho = s.radii(d);
        let lhs = f.try_mul(&g)?.gauss_norm(&rho)?;
        let rhs = &f.gauss_norm(&rho)? + &g.gauss_norm(&rho)?;
        if lhs != rhs {
            failures.push(json!({ "kind": "twisted", "pair": i, "lhs": lhs, "rhs": rhs }));
        }
    }
    for i in 0..c.free_pairs {
        let n = s.dim(c.max_dim.max(1));
        let f = s.free(n, c.max_degree as usize, 4);
        let g = s.free(n, c.max_degree as usize, 4);
        let r = s.radii(n);
        let lhs = f.try_mul(&g)?.gauss_norm(&r)?;
        let rhs = &f.gauss_norm(&r)? + &g.gauss_norm(&r)?;
        if lhs != rhs {
            failures.push(json!({ "kind": "free", "pair": i, "lhs": lhs, "rhs": rhs }));
        }
    }
    let ok = failures.is_empty();
    verdict(ok, json!({ "seed": seed, "pairs": c.pairs, "free_pairs": c.free_pairs, "failures": failures }))
}

fn seminorm(cmd: SeminormCmd, seed: u64) -> Outcome {
    match cmd {
        SeminormCmd::Eval { point, element } => {
            let point: SpectrumPoint = read_json(&point)?;
            let f: Element = read_json(&element)?;
            Ok(to_json(&point.evaluate(&f)?))
        }
        SeminormCmd::Check { point, pairs, max_degree } => {
            let point: SpectrumPoint = read_json(&point)?;
            point.validate()?;
            let precision = match &point {
                SpectrumPoint::ShiftedPolydisc { a, .. } | SpectrumPoint::ShiftedTorus { a, .. } => {
                    a.iter().map(|x| x.precision()).min().unwrap_or_else(default_precision)
                }
                SpectrumPoint::Monomial { .. } => default_precision(),
            };
            let domain = match point {
                SpectrumPoint::ShiftedPolydisc { .. } => Domain::Polydisc,
                _ => Domain::Torus,
            };
            let alg = Algebra::new(TwistForm::ordered(point.dim()), one_plus_t(precision))?;
            let mut s = Sampler::new(seed, precision);
            let samples: Vec<(Element, Element)> = (0..pairs)
                .map(|_| (s.element(&alg, domain, max_degree, 3), s.element(&alg, domain, max_degree, 3)))
                .collect();
            let report = spectra::check_point_multiplicative(&point, &samples)?;
            let mut v = to_json(&report);
            v["seed"] = json!(seed);
            verdict(report.passed(), v)
        }
    }
}

fn sheaf_cmd(cmd: SheafCmd) -> Outcome {
    let SheafCmd::Transform { transition, element, point, convention } = cmd;
    let g: TransitionData = read_json(&transition)?;
    let f: Element = read_json(&element)?;
    let x = rationals(&point)?;
    let conv = ActionConvention::from(convention);
    let gf = sheaf::transform_section(&g, &f, conv)?;
    let gx = sheaf::transform_point(&g, &x, conv)?;
    let before = sheaf::stalk_lognorm(&f, &x)?;
    let after = sheaf::stalk_lognorm(&gf, &gx)?;
    let ok = before == after;
    let gx_text: Vec<String> = gx.iter().map(|r| r.to_string()).collect();
    verdict(
        ok,
        json!({ "section": gf, "point": gx_text, "lognorm": before, "lognorm_transformed": after, "equivariant": ok }),
    )
}

fn retarget(aut: &WallAutomorphism, alg: &Arc<Algebra>, order: u32) -> Result<WallAutomorphism, Failure> {
    let (x, y) = aut.images()?;
    let cone = aut.cone().with_order(order)?;
    Ok(WallAutomorphism::from_images(alg, cone, &x, &y)?)
}

fn scatter_cmd(cmd: ScatterCmd) -> Outcome {
    match cmd {
        ScatterCmd::Standard { order, classical } => {
            let p = default_precision();
            let q = if classical { Scalar::one(p) } else { one_plus_t(p) };
            let alg = Algebra::new(TwistForm::ordered(2), q)?;
            let (g0, ginf) = scatter::standard_input(&alg, order)?;
            Ok(json!({ "g0": g0, "ginf": ginf }))
        }
        ScatterCmd::Factorize { g0, ginf, order } => {
            let g0: WallAutomorphism = read_json(&g0)?;
            let ginf: WallAutomorphism = read_json(&ginf)?;
            let alg = g0.algebra().clone();
            let g0 = retarget(&g0, &alg, order)?;
            let ginf = retarget(&ginf, &alg, order)?;
            let fac = scatter::factorize(&g0, &ginf)?;
            let identity = WallAutomorphism::identity(&alg, *g0.cone())?;
            let (dx, dy) = fac.ordered_product(&identity)?.difference(&ginf.product(&g0)?)?;
            let residual = if dx.is_zero() && dy.is_zero() { "0".to_string() } else { format!("{dx}; {dy}") };
            let factors: Vec<Value> =
                fac.factors.iter().map(|(s, g)| json!({ "slope": s, "automorphism": g })).collect();
            let ok = residual == "0";
            verdict(ok, json!({ "cone": fac.cone, "factors": factors, "residual": residual }))
        }
        ScatterCmd::Chart { diagram, order } => {
            let d: ScatteringDiagram = read_json(&diagram)?;
            let out = scatter::scatter_chart(&d, order)?;
            verdict(out.is_consistent(), to_json(&out))
        }
    }
}

fn k3(cmd: K3Cmd) -> Outcome {
    let pres = KThreePresentation::standard(default_precision())?;
    match cmd {
        K3Cmd::Verify { chart, order, t_zero } => {
            let pres = if t_zero { pres.at_t_zero()? } else { pres };
            let c = ChartModel::new(chart, &pres)?;
            let residuals = k3model::verify_chart_homomorphism(&c, &pres, Some(order))?;
            let ok = residuals.iter().all(|r| r.is_zero());
            let text: Vec<String> = residuals.iter().map(|r| r.to_string()).collect();
            verdict(ok, json!({ "residuals": text }))
        }
        K3Cmd::Sweep { chart, grid } => {
            let c = ChartModel::new(chart, &pres)?;
            let report = k3model::compatibility_sweep(&c, &c.region.grid(grid))?;
            verdict(report.passed(), to_json(&report))
        }
        K3Cmd::Glue { overlap, order, grid } => {
            let overlap = match overlap {
                OverlapArg::U1U2 => Overlap::U1U2,
                OverlapArg::U1U3 => Overlap::U1U3,
            };
            let report = k3model::glue_automorphism_check(&pres, overlap, order, grid)?;
            verdict(report.passed(), to_json(&report))
        }
        K3Cmd::Conventions => {
            let found = k3model::convention_search(&pres.q)?;
            let rows: Vec<Value> = found
                .iter()
                .map(|(c, ok)| json!({ "conventions": c, "description": c.to_string(), "consistent": ok }))
                .collect();
            let unique = found.iter().filter(|(_, ok)| *ok).count() == 1;
            verdict(unique, json!({ "candidates": rows, "unique": unique }))
        }
    }
}
