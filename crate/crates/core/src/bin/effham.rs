//! Command-line front end. Exit codes: 0 all rows PASS/VACUOUS/SKIPPED,
//! 1 any FAIL or ERROR row, 2 bad input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effham::cache;
use effham::corpus::{generate_corpus, CorpusSpec};
use effham::lattice::SiteSet;
use effham::model_file::Model;
use effham::runner::{self, CounterexampleSpec, ExperimentConfig, ModelRun, ModelSource, RangeSpec, Report, RunManifest, Suite};
use effham::truncation;
use effham::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "effham", version, about = "Energy-truncated effective Hamiltonians for finite spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a model file and print its constants and boundary data.
    Build(BuildArgs),
    /// Truncate the environment at M and check the structural invariants.
    Truncate(TruncateArgs),
    /// Run one certificate suite.
    Certify(CertifyArgs),
    /// Ising divergence scan against the analytic bound.
    Counterexample(CounterexampleArgs),
    /// Range truncation of decaying pair interactions.
    RangeTrunc(RangeArgs),
    /// Write a seeded corpus of model files.
    Corpus(CorpusArgs),
    /// Summarize a certificates.csv by claim and status.
    Report {
        csv: PathBuf,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Model file (effham-interaction/1 TOML).
    model: PathBuf,
    /// Sites of L as comma-separated indices; the first half by default.
    #[arg(long, value_delimiter = ',')]
    region: Option<Vec<usize>>,
}

impl ModelArgs {
    fn load(&self) -> Result<ModelRun> {
        let model = Model::read(&self.model)?;
        match &self.region {
            Some(r) => ModelRun::new(model, r.iter().copied().collect::<SiteSet>()),
            None => ModelRun::first_half(model),
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Also write H, H_∂L and env as binary operator files here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TruncateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long = "M")]
    cutoff: f64,
    /// Write the truncated Hamiltonian and the invariant report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    suite: Suite,
    /// Experiment TOML; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Model files; otherwise a seeded corpus.
    #[arg(long = "model")]
    models: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    sites: Vec<usize>,
    /// Truncation cutoffs, comma-separated; per-model defaults otherwise.
    #[arg(long = "M", value_delimiter = ',')]
    cutoffs: Option<Vec<f64>>,
    /// Relative tolerance replacing the per-claim defaults.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long = "M", default_value_t = 10.0)]
    cutoff: f64,
    #[arg(long = "N-max", default_value_t = 10_001)]
    n_max: usize,
    #[arg(long)]
    no_cross_check: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    ell: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<i64>,
    /// Length b - a of the kept interval.
    #[arg(long)]
    window: Option<i64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Also run finite chains of this many sites with the gap-stability rows.
    #[arg(long)]
    finite_sites: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    sites: Vec<usize>,
    /// Target strength 𝔧; uniform in [1, 4] otherwise.
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
}

fn build(a: &BuildArgs) -> Result<u8> {
    let run = a.model.load()?;
    let ham = &run.prep.ham;
    let split = ham.split();
    let d = ham.decomposition();
    let summary = json!({
        "id": run.model.id,
        "sites": run.model.lattice.len(),
        "constants": ham.constants(),
        "region": split.region(),
        "boundary": split.boundary(),
        "terms": { "inner_l": d.inner_l.len(), "boundary": d.boundary.len(), "inner_lc": d.inner_lc.len() },
        "boundary_norm": ham.boundary_norm(),
        "ground_shift": ham.shift(),
        "h_norm": run.prep.h.norm(),
        "env_min": run.prep.env.min(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        for (name, op) in [("h.op", ham.full()), ("boundary.op", ham.boundary()), ("env.op", ham.env())] {
            std::fs::write(dir.join(name), cache::encode_operator(op))?;
        }
    }
    Ok(0)
}

fn truncate(a: &TruncateArgs) -> Result<u8> {
    let run = a.model.load()?;
    let result = run.prep.truncate(a.cutoff)?;
    let report = truncation::check_invariants(&run.prep, &result, None)?;
    let out = json!({ "report": report, "ties": result.ties, "holds": report.holds() });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("h_bar.op"), cache::encode_operator(&result.h_bar))?;
        std::fs::write(dir.join("invariants.json"), serde_json::to_vec_pretty(&out).expect("json"))?;
    }
    Ok(if report.holds() { 0 } else { 1 })
}

fn certify(a: &CertifyArgs) -> Result<u8> {
    let mut config = match &a.config {
        Some(p) => {
            let c = ExperimentConfig::from_toml(&std::fs::read_to_string(p)?)?;
            if c.suite != a.suite {
                return Err(Error::Config(format!("{} is for suite {}, not {}", p.display(), c.suite, a.suite)));
            }
            c
        }
        None => {
            let mut c = ExperimentConfig::new(a.suite, &a.out);
            c.model = Some(if a.models.is_empty() {
                ModelSource::Corpus(CorpusSpec { seed: a.seed, count: a.count, sites: a.sites.clone(), coupling: None })
            } else {
                ModelSource::File { paths: a.models.clone() }
            });
            c
        }
    };
    if a.config.is_none() || a.out != Path::new("out") {
        config.output_dir = a.out.clone();
    }
    if a.cutoffs.is_some() {
        config.grid.cutoffs = a.cutoffs.clone();
    }
    if a.tolerance.is_some() {
        config.tolerance = a.tolerance;
    }
    if a.cache_dir.is_some() {
        config.cache_dir = a.cache_dir.clone();
    }
    finish(runner::run_suite(&config)?)
}

fn counterexample(a: &CounterexampleArgs) -> Result<u8> {
    let mut config = ExperimentConfig::new(Suite::Counterexample, &a.out);
    config.counterexample = Some(CounterexampleSpec { cutoff: a.cutoff, n_max: a.n_max, cross_check: !a.no_cross_check });
    finish(runner::run_suite(&config)?)
}

fn range_trunc(a: &RangeArgs) -> Result<u8> {
    let mut config = ExperimentConfig::new(Suite::RangeTrunc, &a.out);
    config.range = Some(RangeSpec {
        alpha: a.alpha.clone(),
        ell: a.ell.clone(),
        q: a.q.clone(),
        seeds: a.seeds.clone(),
        window: a.window,
        finite_sites: a.finite_sites,
        field: 2.0,
    });
    finish(runner::run_suite(&config)?)
}

fn corpus(a: &CorpusArgs) -> Result<u8> {
    let spec = CorpusSpec { seed: a.seed, count: a.count, sites: a.sites.clone(), coupling: a.coupling };
    let paths = generate_corpus(&spec, &a.out)?;
    println!("wrote {} model files to {}", paths.len(), a.out.display());
    Ok(0)
}

fn finish(m: RunManifest) -> Result<u8> {
    let t = &m.tally;
    println!(
        "{}: {} rows  PASS {}  VACUOUS {}  VBS {}  SKIPPED {}  N/A {}  FAIL {}  ERROR {}{}  ({:.1}s)",
        m.suite,
        m.rows,
        t.pass,
        t.vacuous,
        t.vacuous_by_structure,
        t.skipped,
        t.not_applicable,
        t.fail,
        t.error,
        if m.aborted { "  aborted, see repro/" } else { "" },
        m.wall_time_s
    );
    Ok(m.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Build(a) => build(a),
        Command::Truncate(a) => truncate(a),
        Command::Certify(a) => certify(a),
        Command::Counterexample(a) => counterexample(a),
        Command::RangeTrunc(a) => range_trunc(a),
        Command::Corpus(a) => corpus(a),
        Command::Report { csv } => Report::from_csv(csv).map(|r| {
            print!("{}", r.render());
            u8::from(!r.total.all_ok())
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("effham: {e}");
            ExitCode::from(match e {
                Error::CertificateFailed(_) => 1,
                _ => 2,
            })
        }
    }
}
