use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use pathduality::discrimination::{
    helstrom, min_error_solve, pairwise_bound, pretty_good_measurement, success_probability,
    Ensemble, SolverOptions,
};
use pathduality::duality::{
    check_two_particle_sum, entanglement_witnesses, DualityOptions, DualityReport, RelationId,
    ScenarioAnalysis, Tolerances, PARTICLE_A, PARTICLE_B,
};
use pathduality::harness::{
    emit, parse_scenario, run_sweep, DetectorDim, ExitStatus, OutputFormat, ScenarioFile,
    SweepConfig, SweepSummary,
};
use pathduality::linalg::purity;

/// Default directory for sweep output when `--out` is not given.
const OUT_DIR_ENV: &str = "PATHDUALITY_OUT_DIR";

#[derive(Parser)]
#[command(name = "pathduality", version, about = "Coherence / path-information duality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate duality relations on one scenario file.
    Check(CheckArgs),
    /// Seeded Haar-random verification sweep.
    Sweep(SweepArgs),
    /// Minimum-error discrimination of an ensemble (or a scenario's detector states).
    Discriminate { file: PathBuf },
    /// Purity and conditional-entropy entanglement witnesses.
    Witness { file: PathBuf },
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    /// Relation id, repeatable; default: every relation that applies.
    #[arg(long = "relation", short = 'r')]
    relations: Vec<RelationId>,
    /// Slack floor for inequalities.
    #[arg(long)]
    tol: Option<f64>,
    /// Largest |slack| accepted for equalities.
    #[arg(long)]
    eq_tol: Option<f64>,
    /// Random POVMs tried by the entropic relations.
    #[arg(long, default_value_t = 4)]
    random_povms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print reports as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scenarios per (N, d_B) cell.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    db: Vec<usize>,
    /// Detector dimension; default d_D = N.
    #[arg(long)]
    dd: Option<usize>,
    #[arg(long = "relation", short = 'r', value_delimiter = ',')]
    relations: Vec<RelationId>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    eq_tol: Option<f64>,
    #[arg(long, default_value_t = 4)]
    random_povms: usize,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, conflicts_with = "serial")]
    jobs: Option<usize>,
    /// Run on the calling thread only.
    #[arg(long)]
    serial: bool,
    /// Output file; default: $PATHDUALITY_OUT_DIR/sweep-<seed>.<ext>, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Fill the `ms` column with wall time (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

fn tolerances(tol: Option<f64>, eq_tol: Option<f64>) -> anyhow::Result<Tolerances> {
    let mut t = Tolerances::default();
    for (v, name) in [(tol, "--tol"), (eq_tol, "--eq-tol")] {
        if let Some(v) = v {
            if !(v.is_finite() && v >= 0.0) {
                bail!("{name} must be a non-negative number, got {v}");
            }
        }
    }
    t.inequality = tol.unwrap_or(t.inequality);
    t.equality = eq_tol.unwrap_or(t.equality);
    Ok(t)
}

fn print_report(r: &DualityReport) {
    println!(
        "{:<20} lhs={} rhs={} slack={} satisfied={} certified={}",
        r.relation.as_str(),
        r.lhs,
        r.rhs,
        r.slack,
        r.satisfied,
        r.solver_certified
    );
    for (k, v) in &r.components {
        println!("    {k} = {v}");
    }
    for (k, ok) in &r.aux_checks {
        println!("    [{}] {k}", if *ok { "ok" } else { "FAIL" });
    }
}

fn check(args: CheckArgs) -> anyhow::Result<ExitStatus> {
    let opts = DualityOptions {
        tol: tolerances(args.tol, args.eq_tol)?,
        random_povms: args.random_povms,
        seed: args.seed,
        ..DualityOptions::default()
    };
    let reports = match parse_scenario(&args.file)? {
        ScenarioFile::Scenario(spec) => {
            let analysis = ScenarioAnalysis::new(&spec, opts)?;
            if args.relations.is_empty() {
                analysis.evaluate_all()?
            } else {
                args.relations
                    .iter()
                    .map(|&r| analysis.evaluate(r))
                    .collect::<Result<_, _>>()?
            }
        }
        ScenarioFile::TwoParticle(tp) => {
            if let Some(r) = args.relations.iter().find(|&&r| r != RelationId::TwoParticleSum) {
                bail!("{r} does not apply to a two-particle scenario");
            }
            vec![check_two_particle_sum(&tp, &opts)?]
        }
        ScenarioFile::Ensemble(_) => bail!("`check` needs a scenario file, got an ensemble"),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        reports.iter().for_each(print_report);
    }
    Ok(ExitStatus::of_reports(
        reports.iter().map(|r| (r.satisfied, r.solver_certified)),
    ))
}

fn sweep(args: SweepArgs) -> anyhow::Result<ExitStatus> {
    let config = SweepConfig {
        seed: args.seed,
        count: args.count,
        n_values: args.n,
        d_b_values: args.db,
        d_d: args.dd.map_or(DetectorDim::MatchN, DetectorDim::Fixed),
        relations: if args.relations.is_empty() {
            RelationId::ALL.to_vec()
        } else {
            args.relations
        },
        tol: tolerances(args.tol, args.eq_tol)?,
        random_povms: args.random_povms,
        accessible_restarts: args.restarts,
        jobs: args.jobs,
        serial: args.serial,
        timing: args.timing,
    };
    let rows = run_sweep(&config)?;
    let out = args.out.or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| {
            PathBuf::from(dir).join(format!("sweep-{}.{}", args.seed, args.format.extension()))
        })
    });
    emit(&rows, args.format, out.as_deref())?;
    let summary = SweepSummary::of(&rows);
    eprintln!(
        "rows={} violations={} uncertified={}{}",
        summary.rows,
        summary.violations,
        summary.uncertified,
        out.map(|p| format!(" -> {}", p.display())).unwrap_or_default()
    );
    Ok(summary.status())
}

fn discriminate(file: PathBuf) -> anyhow::Result<ExitStatus> {
    let ensemble = match parse_scenario(&file)? {
        ScenarioFile::Ensemble(e) => e,
        ScenarioFile::Scenario(s) => Ensemble::from_scenario(&s),
        ScenarioFile::TwoParticle(_) => bail!("`discriminate` needs an ensemble or scenario file"),
    };
    let r = min_error_solve(&ensemble, SolverOptions::default());
    println!("states          = {}", ensemble.len());
    println!("dimension       = {}", ensemble.dim());
    println!("p_success       = {}", r.p_success);
    println!("dual_bound      = {}", r.dual_bound());
    println!("pairwise_bound  = {}", pairwise_bound(&ensemble));
    println!("certificate_gap = {}", r.certificate_gap);
    println!("iterations      = {}", r.iterations);
    println!("converged       = {}", r.converged);
    println!("certified       = {}", r.certified());
    let pgm = pretty_good_measurement(&ensemble);
    println!("pgm_success     = {}", success_probability(&ensemble, &pgm)?);
    if ensemble.len() == 2 {
        println!("helstrom        = {}", helstrom(&ensemble)?.p_success);
    }
    Ok(if r.certified() {
        ExitStatus::Ok
    } else {
        ExitStatus::Uncertified
    })
}

fn witness(file: PathBuf) -> anyhow::Result<ExitStatus> {
    let (rho_ab, dims) = match parse_scenario(&file)? {
        ScenarioFile::Scenario(s) => {
            let a = ScenarioAnalysis::new(&s, DualityOptions::default())?;
            (a.reduced().rho_ab.clone(), s.particle_memory_dims())
        }
        ScenarioFile::TwoParticle(tp) => {
            let state = tp.state();
            let rho = state.reduced(&[PARTICLE_A, PARTICLE_B])?;
            let dims = state.dims().restrict(&[PARTICLE_A, PARTICLE_B])?;
            (rho, dims)
        }
        ScenarioFile::Ensemble(_) => bail!("`witness` needs a scenario file, got an ensemble"),
    };
    let (pw, cw) = entanglement_witnesses(&rho_ab, &dims)?;
    println!("purity_ab        = {}", purity(&rho_ab));
    println!("purity_witness   = {pw}");
    println!("cond_ent_witness = {cw}");
    println!("entangled        = {}", pw < -1e-9 || cw < -1e-9);
    Ok(ExitStatus::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Sweep(a) => sweep(a),
        Command::Discriminate { file } => discriminate(file),
        Command::Witness { file } => witness(file),
    };
    match result.context("pathduality") {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitStatus::InputError.code())
        }
    }
}
