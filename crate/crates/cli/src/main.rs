//! `perindex`: spaces, cohomology, operations and the period–index pipeline.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perindex_core::cochain_ops::{bockstein, pontryagin_square, q_class, OperationContext};
use perindex_core::cohomology::{BackendRegistry, Cochain, CohomologyClass};
use perindex_core::complexes::{Budget, SimplicialSet, SpaceRegistry};
use perindex_core::linalg::{Int, SmithCache};
use perindex_core::period_index::{index_bound, index_bound_audited, DEFAULT_COSET_CAP};
use perindex_core::verify::{audit_classes, run_suite, DEFAULT_SEED};
use perindex_core::{Error, Result};

#[derive(Parser)]
#[command(name = "perindex", version, about = "Topological period and index of Brauer classes on simplicial sets")]
struct Cli {
    /// Directory for cached Smith decompositions (overrides PERINDEX_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Cohomology backend: auto, direct or eilenberg-zilber.
    #[arg(long, global = true, default_value = "auto")]
    backend: String,
    /// Largest number of nondegenerate simplices a generator may build.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_MAX)]
    max_simplices: u64,
    /// Write the main output to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a space and print it in the sset v1 format.
    Generate(GenerateArgs),
    /// Print H^k(X; Z/m) (m = 0 for integer coefficients).
    Cohomology {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        modulus: u64,
        /// Also print a cocycle for each generator.
        #[arg(long)]
        generators: bool,
    },
    /// Unreduced Bockstein of a mod-n class.
    Bockstein(ClassArgs),
    /// Pontryagin square of a degree-2 class with even modulus.
    Pontryagin(ClassArgs),
    /// Q(ξ) in H^5(X; Z) for a degree-2 class.
    Q(ClassArgs),
    /// Period, Q̃ and index bound for classes in H^3(X; Z).
    PeriodIndex {
        #[command(flatten)]
        space: SpaceArgs,
        /// `gen` (first torsion generator), `all`, or comma-separated coordinates.
        #[arg(long, default_value = "gen")]
        alpha: String,
        /// Also enumerate every lift and check that Q̃ agrees.
        #[arg(long)]
        audit: bool,
        /// Audit lifts mod this modulus instead of mod the period.
        #[arg(long, requires = "audit")]
        audit_modulus: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_COSET_CAP)]
        coset_cap: u128,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the seeded property batteries.
    Verify {
        /// Module name or `all`.
        #[arg(long, default_value = "all")]
        scope: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator name (em2, wbar, moore, torus, …) or a full space spec.
    name: String,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    dmax: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpaceArgs {
    /// Space spec, e.g. `em2:2:6` or `product(em2:2:6,torus;dmax=5)`.
    #[arg(long)]
    space: Option<String>,
    /// A space in the sset v1 format.
    #[arg(long)]
    space_file: Option<PathBuf>,
}

#[derive(Args)]
struct ClassArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long)]
    modulus: u64,
    /// Comma-separated coordinates in H^degree(X; Z/modulus).
    #[arg(long, conflicts_with = "cochain", required_unless_present = "cochain")]
    class: Option<String>,
    /// A cocycle in the cochain v1 format.
    #[arg(long)]
    cochain: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Budget(_) => 3,
        Error::NoLift { .. } => 4,
        Error::NotTorsion => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: kind={} message={}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(dir) = &cli.cache_dir {
        SmithCache::global().set_dir(Some(dir.clone()));
    }
    if cli.backend != "auto" {
        BackendRegistry::standard().get(&cli.backend)?;
    }
    let budget = Budget::new(cli.max_simplices);
    let mut out = String::new();
    let mut code = ExitCode::SUCCESS;
    match &cli.command {
        Command::Generate(g) => {
            let x = SpaceRegistry::standard().build(&generate_spec(g)?, budget)?;
            out = x.to_text();
        }
        Command::Cohomology { space, degree, modulus, generators } => {
            let c = context(cli, space, budget)?;
            let g = c.group(*degree, *modulus)?;
            out.push_str(&format!("{}\n", g.describe()));
            if *generators {
                for z in g.generators()? {
                    out.push_str(&z.to_text());
                }
            }
        }
        Command::Bockstein(a) => {
            let (c, xi) = class(cli, a, budget)?;
            out = describe_class(&bockstein(&c, &xi)?);
        }
        Command::Pontryagin(a) => {
            let (c, xi) = class(cli, a, budget)?;
            out = describe_class(&pontryagin_square(&c, &xi)?);
        }
        Command::Q(a) => {
            let (c, xi) = class(cli, a, budget)?;
            out = describe_class(&q_class(&c, &xi)?);
        }
        Command::PeriodIndex { space, alpha, audit, audit_modulus, coset_cap, format } => {
            let c = context(cli, space, budget)?;
            for a in alphas(&c, alpha)? {
                let r = if *audit { index_bound_audited(&c, &a, *audit_modulus, *coset_cap)? } else { index_bound(&c, &a)? };
                match format {
                    Format::Json => out.push_str(&format!("{}\n", r.record())),
                    Format::Table => out.push_str(&format!("{}\n", r.table())),
                }
            }
        }
        Command::Verify { scope, seed } => {
            let results = run_suite(scope, *seed)?;
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                out.push_str(&format!("{}\n", r.line()));
            }
            out.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
            if failed > 0 {
                code = ExitCode::FAILURE;
            }
        }
    }
    match &cli.output {
        Some(path) => fs::write(path, out)?,
        None => std::io::stdout().write_all(out.as_bytes())?,
    }
    Ok(code)
}

fn generate_spec(g: &GenerateArgs) -> Result<String> {
    let need = |v: Option<u64>, what: &str| v.ok_or_else(|| Error::Parse(format!("{} needs --{what}", g.name)));
    Ok(match g.name.as_str() {
        "em2" | "wbar" => {
            let dmax = g.dmax.ok_or_else(|| Error::Parse(format!("{} needs --dmax", g.name)))?;
            format!("{}:{}:{dmax}", g.name, need(g.n, "n")?)
        }
        "moore" => format!("moore:{}", need(g.n, "n")?),
        "points" => format!("points:{}", need(g.n, "n")?),
        other => other.to_string(),
    })
}

fn load_space(s: &SpaceArgs, budget: Budget) -> Result<SimplicialSet> {
    match (&s.space, &s.space_file) {
        (Some(spec), None) => SpaceRegistry::standard().build(spec, budget),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            SimplicialSet::from_text(&text, format!("file:{}", path.display()))
        }
        _ => Err(Error::Parse("give exactly one of --space and --space-file".into())),
    }
}

fn context(cli: &Cli, s: &SpaceArgs, budget: Budget) -> Result<OperationContext> {
    OperationContext::with_backend(Arc::new(load_space(s, budget)?), &cli.backend)
}

fn parse_coords(text: &str) -> Result<Vec<Int>> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',')
        .map(|t| t.trim().parse::<Int>().map_err(|_| Error::Parse(format!("bad coordinate '{t}'"))))
        .collect()
}

fn class(cli: &Cli, a: &ClassArgs, budget: Budget) -> Result<(OperationContext, CohomologyClass)> {
    let c = context(cli, &a.space, budget)?;
    let xi = match (&a.class, &a.cochain) {
        (Some(coords), None) => c.class(a.degree, a.modulus, &parse_coords(coords)?)?,
        (None, Some(path)) => {
            let z = Cochain::from_text(&fs::read_to_string(path)?, c.space_id())?;
            if z.degree() != a.degree || z.modulus() != a.modulus {
                return Err(Error::Shape(format!(
                    "cochain has degree {} modulus {}, expected degree {} modulus {}",
                    z.degree(),
                    z.modulus(),
                    a.degree,
                    a.modulus
                )));
            }
            c.class_of(&z)?
        }
        _ => return Err(Error::Parse("give exactly one of --class and --cochain".into())),
    };
    Ok((c, xi))
}

fn describe_class(c: &CohomologyClass) -> String {
    let m = if c.modulus() == 0 { "Z".to_string() } else { format!("Z/{}", c.modulus()) };
    let order = match c.order() {
        perindex_core::linalg::Order::Finite(k) => k.to_string(),
        perindex_core::linalg::Order::Infinite => "infinite".into(),
    };
    format!("group H^{}(X;{m}) = {}\nclass {}\norder {order}\n", c.degree(), c.group().describe(), c.format())
}

fn alphas(c: &OperationContext, spec: &str) -> Result<Vec<CohomologyClass>> {
    let h3 = c.group(3, 0)?;
    match spec {
        "gen" => {
            let p = h3.presentation();
            if p.torsion().is_empty() {
                return Err(Error::Parse(format!("H^3 = {} has no torsion generator", h3.describe())));
            }
            Ok(vec![CohomologyClass::generator(h3.clone(), p.free_rank())?])
        }
        "all" => audit_classes(c),
        coords => Ok(vec![CohomologyClass::new(h3, &parse_coords(coords)?)?]),
    }
}
