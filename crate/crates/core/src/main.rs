use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pointless::algebra::field::prime_power;
use pointless::algebra::parse::{parse_constant, parse_poly};
use pointless::algebra::FiniteField;
use pointless::curves::TrigonalShape;
use pointless::density::{montecarlo_pointless_rate, DensityProblem};
use pointless::elliptic::{CoverSearch, EllipticCurve, TorsionRule};
use pointless::harness::{load_fixtures, parse_fixtures, verify, FixtureEntry, FixtureKind, TABLES};
use pointless::search::{
    self, DiagonalQuarticEngine, DoubleCoverEngine, Engine, Family, FiberProductEngine, HyperGenus3Engine,
    HyperGenus4Char2Engine, Klein4EvenEngine, Klein4OddEngine, Mode, QuarticChar2Engine, SearchConfig,
};
use pointless::zeta::{self, Bound};
use pointless::Result;

type Outcome<T> = std::result::Result<T, Box<dyn std::error::Error>>;

/// Construct, verify and search for curves without rational points.
///
/// Every subcommand prints JSON on stdout. Exit status is 0 on success, 1
/// when a verification or a search expectation fails and 2 on usage errors.
#[derive(Parser)]
#[command(name = "pointless", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rebuild every fixture entry and check its claims.
    Verify(VerifyArgs),
    /// Count points of one curve over F_{q^i}, i = 1..depth.
    Count(CountArgs),
    /// Zeta data from N_1..N_g: L-polynomial, real Weil polynomial, predicted counts.
    Zeta(ZetaArgs),
    /// Largest q at which a pointless curve of the genus is not excluded.
    Bounds(BoundsArgs),
    /// Exhaustive search over a curve family.
    Search(SearchArgs),
    /// Proportion of derangements in a transitive permutation group.
    Density(DensityArgs),
    /// Sampled pointless rate of a family against the density heuristic.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Field size, a prime power.
    #[arg(long)]
    q: u64,
    /// Defining polynomial in `a` for prime-power q, e.g. "a^2 - a + 2".
    /// Defaults to the smallest irreducible polynomial.
    #[arg(long)]
    def_poly: Option<String>,
}

impl FieldArgs {
    fn field(&self) -> Outcome<FiniteField> {
        let (p, n) = prime_power(self.q).ok_or_else(|| usage(format!("{} is not a prime power", self.q)))?;
        match &self.def_poly {
            None => Ok(FiniteField::standard(p, n)?),
            Some(src) => {
                let m = parse_poly(&FiniteField::prime(p)?, "a", src)?;
                if m.deg() != n as isize {
                    return Err(usage(format!("defining polynomial must have degree {n}")));
                }
                let coeffs: Vec<u64> = m.monic().coeffs().iter().map(|c| c.0).collect();
                Ok(FiniteField::new(p, n, Some(&coeffs))?)
            }
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Fixture file; the shipped tables when omitted.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Count over F_{q^i} for i up to this depth.
    #[arg(long, default_value_t = 1)]
    depth: u32,
    /// Worker threads.
    #[arg(long, env = "POINTLESS_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Curve model.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Polynomial f in x (hyperelliptic, fiber_product).
    #[arg(long)]
    f: Option<String>,
    /// Polynomial g in x (fiber_product).
    #[arg(long)]
    g: Option<String>,
    /// Numerator (artin_schreier, trigonal, as_tower).
    #[arg(long)]
    num: Option<String>,
    /// Denominator (artin_schreier, trigonal, as_tower).
    #[arg(long)]
    den: Option<String>,
    /// Second-step numerator in x, y (as_tower).
    #[arg(long)]
    num2: Option<String>,
    /// Second-step denominator in x, y (as_tower).
    #[arg(long)]
    den2: Option<String>,
    /// Quartic form in x, y, z, or in x, y with --affine.
    #[arg(long)]
    equation: Option<String>,
    #[arg(long)]
    affine: bool,
    /// Trigonal shape.
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    /// Constant added to an Artin-Schreier right-hand side.
    #[arg(long)]
    constant: Option<String>,
    /// Genus claimed for an Artin-Schreier tower.
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long, default_value_t = 1)]
    depth: u32,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    Hyperelliptic,
    ArtinSchreier,
    PlaneQuartic,
    FiberProduct,
    Trigonal,
    AsTower,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ShapeArg {
    Cubic,
    Kummer,
}

#[derive(Args)]
struct ZetaArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    genus: usize,
    /// N_1, ..., N_g separated by commas.
    #[arg(long, value_delimiter = ',', required = true)]
    counts: Vec<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    genus: u64,
    #[arg(long, value_enum, default_value = "serre")]
    bound: BoundArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Weil,
    Serre,
}

#[derive(Args)]
struct SearchArgs {
    /// klein4_hyper_odd, klein4_hyper_even, diagonal_quartic, quartic_char2,
    /// fiberproduct, hyper_genus3, double_covers or hyper_genus4_char2.
    family: String,
    #[command(flatten)]
    field: FieldArgs,
    /// Parameter n of the Klein-group family (a field constant).
    #[arg(long)]
    n: Option<String>,
    #[arg(long, value_enum, default_value = "first")]
    mode: ModeArg,
    /// Worker threads.
    #[arg(long, env = "POINTLESS_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Checkpoint file; an interrupted run resumes from it.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Stop after examining this many candidates.
    #[arg(long)]
    budget: Option<u64>,
    /// Elliptic curve y^2 = x^3 + a2 x^2 + a4 x + a6 as "a2,a4,a6" (double_covers).
    #[arg(long)]
    curve: Option<String>,
    /// Search every elliptic curve with this many points instead of --curve (double_covers).
    #[arg(long)]
    points: Option<u64>,
    /// Genus of the covers, 3 or 4 (double_covers).
    #[arg(long, default_value_t = 3)]
    genus: u32,
    #[arg(long, value_enum, default_value = "include")]
    torsion: TorsionArg,
    /// Expected number of survivor classes; exit 1 on mismatch.
    #[arg(long)]
    expect_classes: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    Census,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TorsionArg {
    Include,
    Exclude,
    ExcludeWithFallback,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    degree: usize,
    /// Generators in cycle notation on 1..degree, e.g. "(1 2 3 4), (1 2)".
    #[arg(long)]
    gens: String,
}

#[derive(Args)]
struct MonteCarloArgs {
    /// klein4_hyper_odd, diagonal_quartic or fiberproduct.
    #[arg(long)]
    family: String,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn usage(message: impl Into<String>) -> Box<dyn std::error::Error> {
    message.into().into()
}

fn print(value: &impl Serialize) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(j) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
}

fn run_verify(args: VerifyArgs) -> Outcome<bool> {
    set_jobs(args.jobs);
    let entries = match &args.fixtures {
        Some(path) => load_fixtures(path)?,
        None => parse_fixtures(TABLES)?,
    };
    let report = verify(&entries, args.depth);
    print(&report);
    Ok(report.exit_status == 0)
}

fn run_count(args: CountArgs) -> Outcome<bool> {
    let k = args.field.field()?;
    let kind = match args.kind {
        KindArg::Hyperelliptic => FixtureKind::Hyperelliptic,
        KindArg::ArtinSchreier => FixtureKind::ArtinSchreier,
        KindArg::PlaneQuartic => FixtureKind::PlaneQuartic,
        KindArg::FiberProduct => FixtureKind::FiberProduct,
        KindArg::Trigonal => FixtureKind::Trigonal,
        KindArg::AsTower => FixtureKind::AsTower,
    };
    let entry = FixtureEntry {
        id: "cli".into(),
        table: String::new(),
        p: k.p(),
        n: k.n(),
        defining_poly: (k.n() > 1).then(|| modulus_string(&k)),
        kind,
        f: args.f,
        g: args.g,
        num: args.num,
        den: args.den,
        num2: args.num2,
        den2: args.den2,
        equation: args.equation,
        affine: args.affine.then_some(true),
        shape: args.shape.map(|s| match s {
            ShapeArg::Cubic => TrigonalShape::Cubic,
            ShapeArg::Kummer => TrigonalShape::Kummer,
        }),
        constant: args.constant,
        genus: args.genus.unwrap_or(0),
        pointless: false,
        counts: None,
        real_weil: None,
        note: None,
    };
    let curve = entry.curve()?;
    let genus = curve.genus()?;
    let counts = (1..=args.depth.max(1)).map(|i| curve.count(i)).collect::<Result<Vec<u64>>>()?;
    let zeta = if counts.len() >= genus as usize && genus > 0 {
        Some(zeta::zeta_report(k.q(), genus as usize, &counts)?)
    } else {
        None
    };
    print(&json!({
        "field": search::field_label(&k),
        "curve": curve.describe(),
        "kind": curve.kind(),
        "genus": genus,
        "counts": counts,
        "pointless": counts[0] == 0,
        "zeta": zeta,
    }));
    Ok(true)
}

fn modulus_string(k: &FiniteField) -> String {
    let fp = FiniteField::prime(k.p()).expect("prime field");
    let coeffs = k.modulus().iter().map(|&c| fp.from_int(c as i64)).collect();
    pointless::algebra::Poly::new(&fp, coeffs).to_string_var("a")
}

fn run_zeta(args: ZetaArgs) -> Outcome<bool> {
    if args.counts.len() < args.genus {
        return Err(usage(format!("need {} counts, got {}", args.genus, args.counts.len())));
    }
    let report = zeta::zeta_report(args.q, args.genus, &args.counts)?;
    print(&report);
    Ok(true)
}

fn run_bounds(args: BoundsArgs) -> Outcome<bool> {
    let bound = match args.bound {
        BoundArg::Weil => Bound::Weil,
        BoundArg::Serre => Bound::Serre,
    };
    print(&zeta::pointless_q_range(args.genus, bound));
    Ok(true)
}

fn engines(args: &SearchArgs, family: Family, k: &FiniteField) -> Outcome<Vec<Box<dyn Engine>>> {
    let one: Box<dyn Engine> = match family {
        Family::Klein4HyperOdd => {
            let n = args.n.as_deref().ok_or_else(|| usage("klein4_hyper_odd needs --n"))?;
            Box::new(Klein4OddEngine::new(k, parse_constant(k, n)?)?)
        }
        Family::Klein4HyperEven => Box::new(Klein4EvenEngine::new(k)?),
        Family::DiagonalQuartic => Box::new(DiagonalQuarticEngine::new(k)?),
        Family::QuarticChar2 => Box::new(QuarticChar2Engine::new(k)?),
        Family::Fiberproduct => Box::new(FiberProductEngine::new(k)?),
        Family::HyperGenus3 => Box::new(HyperGenus3Engine::new(k)?),
        Family::HyperGenus4Char2 => Box::new(HyperGenus4Char2Engine::new(k)?),
        Family::DoubleCovers => {
            let torsion = match args.torsion {
                TorsionArg::Include => TorsionRule::Include,
                TorsionArg::Exclude => TorsionRule::Exclude,
                TorsionArg::ExcludeWithFallback => TorsionRule::ExcludeWithFallback,
            };
            let curves = match (&args.curve, args.points) {
                (Some(src), None) => {
                    let c: Vec<_> = src.split(',').map(|s| parse_constant(k, s.trim())).collect::<Result<_>>()?;
                    if c.len() != 3 {
                        return Err(usage("--curve takes a2,a4,a6"));
                    }
                    vec![EllipticCurve::new(k, c[0], c[1], c[2])?]
                }
                (None, Some(n)) => EllipticCurve::with_order(k, n)?,
                _ => return Err(usage("double_covers needs exactly one of --curve and --points")),
            };
            let mut out: Vec<Box<dyn Engine>> = Vec::new();
            for e in curves {
                out.push(Box::new(DoubleCoverEngine::new(CoverSearch::new(e, args.genus, torsion)?)?));
            }
            return Ok(out);
        }
    };
    Ok(vec![one])
}

fn run_search(args: SearchArgs) -> Outcome<bool> {
    let family: Family = args.family.parse()?;
    let k = args.field.field()?;
    let config = SearchConfig {
        mode: match args.mode {
            ModeArg::First => Mode::FirstFind,
            ModeArg::Census => Mode::Census,
        },
        jobs: args.jobs.max(1),
        budget: args.budget,
        checkpoint: args.checkpoint.clone(),
    };
    let engines = engines(&args, family, &k)?;
    let per_curve = args.points.is_some();
    let mut reports = Vec::with_capacity(engines.len());
    for (i, engine) in engines.iter().enumerate() {
        let mut cfg = config.clone();
        if per_curve {
            cfg.checkpoint = cfg.checkpoint.map(|p| p.with_extension(format!("{i}.json")));
        }
        reports.push(search::run(engine.as_ref(), &cfg)?);
    }
    let classes: usize = reports.iter().map(|r| r.classes).sum();
    if per_curve {
        print(&reports);
    } else {
        print(&reports[0]);
    }
    Ok(args.expect_classes.is_none_or(|want| want == classes))
}

fn run_density(args: DensityArgs) -> Outcome<bool> {
    let problem = DensityProblem::parse(args.degree, &args.gens)?;
    print(&problem.density()?);
    Ok(true)
}

fn run_montecarlo(args: MonteCarloArgs) -> Outcome<bool> {
    let family: Family = args.family.parse()?;
    let k = args.field.field()?;
    print(&montecarlo_pointless_rate(family, &k, args.samples, args.seed)?);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Count(a) => run_count(a),
        Command::Zeta(a) => run_zeta(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Search(a) => run_search(a),
        Command::Density(a) => run_density(a),
        Command::Montecarlo(a) => run_montecarlo(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
