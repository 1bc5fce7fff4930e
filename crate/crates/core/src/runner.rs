//! Experiment configuration, suite execution and run artifacts.
//!
//! A run writes into `output_dir`:
//! `certificates.csv`, `manifest.json`, suite-specific extras
//! (`divergence.csv`, `plot.csv` for the counterexample suite) and, when a
//! certificate FAILs, a `repro/` bundle with the model file, the config and
//! the failing row. Rows are emitted in a fixed loop order
//! (model, cutoff, grid point), so identical configs give identical CSV bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cache::SpectralCache;
use crate::certify::{
    self, hadamard_series_check, overlap_i, overlap_ii, overlap_shifted, sandwich, BoundCertificate, BoundKind, Claim,
    Constants, OffDiagProbe, OffDiagVariant, Status, Tally, TailVariant, TheoremContext,
};
use crate::corpus::{transverse_field_chain, CorpusSpec};
use crate::error::{Error, Result};
use crate::ising;
use crate::lattice::{RegionSplit, SiteSet};
use crate::linalg::{self, C64};
use crate::model_file::Model;
use crate::operator::DEFAULT_DENSE_CAP;
use crate::range::{self, ChainOrigin, TruncationGeometry};
use crate::spectral::{self, Interval, SpectralData, SpectralOverlap};
use crate::truncation::{check_invariants, order_floor, Prepared, TruncationResult};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest chain the dense suites accept.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    #[serde(rename = "overlap-i")]
    OverlapI,
    #[serde(rename = "overlap-ii")]
    OverlapII,
    Sandwich,
    GroundOverlap,
    Offdiag,
    Tail,
    Hadamard,
    Truncation,
    Counterexample,
    RangeTrunc,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::OverlapI,
        Suite::OverlapII,
        Suite::Sandwich,
        Suite::GroundOverlap,
        Suite::Offdiag,
        Suite::Tail,
        Suite::Hadamard,
        Suite::Truncation,
        Suite::Counterexample,
        Suite::RangeTrunc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::OverlapI => "overlap-i",
            Suite::OverlapII => "overlap-ii",
            Suite::Sandwich => "sandwich",
            Suite::GroundOverlap => "ground-overlap",
            Suite::Offdiag => "offdiag",
            Suite::Tail => "tail",
            Suite::Hadamard => "hadamard",
            Suite::Truncation => "truncation",
            Suite::Counterexample => "counterexample",
            Suite::RangeTrunc => "range-trunc",
        }
    }

    fn needs_model(self) -> bool {
        !matches!(self, Suite::Counterexample | Suite::RangeTrunc)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.as_str()).collect();
            Error::Config(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Where the models of a dense suite come from. `L` is the first half of
/// the sites (by index) unless the source fixes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum ModelSource {
    Corpus(CorpusSpec),
    /// The ferromagnetic chain on `2N` sites cut between `N` and `N+1`.
    Ising { half_length: usize },
    /// Seeded transverse-field chain.
    Transverse { sites: usize, field: f64, seed: u64 },
    File { paths: Vec<PathBuf> },
}

/// Parameter grids. Absent grids are filled per model from its spectrum
/// (see [`AutoGrid`]); present grids must be nonempty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// Truncation cutoffs `M`.
    pub cutoffs: Option<Vec<f64>>,
    /// `(p, q)` pairs.
    pub pq: Option<Vec<[f64; 2]>>,
    /// `(ε, δ)` pairs.
    pub eps_delta: Option<Vec<[f64; 2]>>,
    /// Window centres `ξ` for the shifted bound.
    pub xi: Option<Vec<f64>>,
    /// `(M_cut, N_cut)` pairs of the off-diagonal bound.
    pub cuts: Option<Vec<[f64; 2]>>,
    /// `(ε, N_cut)` pairs of the tail bound.
    pub tail: Option<Vec<[f64; 2]>>,
    /// `s` as fractions of `S_X`.
    pub s_fraction: Option<Vec<f64>>,
    /// Eigenvalue count of the sandwich suite (all when absent).
    pub j_max: Option<usize>,
    /// Series order of the hadamard suite.
    pub n_max: Option<usize>,
    /// Random unit-norm observables per model in the offdiag suite.
    pub observables: Option<usize>,
}

impl Grid {
    fn validate(&self) -> Result<()> {
        let empty = |name: &str, len: Option<usize>| match len {
            Some(0) => Err(Error::Config(format!("grid.{name} is empty"))),
            _ => Ok(()),
        };
        empty("cutoffs", self.cutoffs.as_ref().map(Vec::len))?;
        empty("pq", self.pq.as_ref().map(Vec::len))?;
        empty("eps_delta", self.eps_delta.as_ref().map(Vec::len))?;
        empty("xi", self.xi.as_ref().map(Vec::len))?;
        empty("cuts", self.cuts.as_ref().map(Vec::len))?;
        empty("tail", self.tail.as_ref().map(Vec::len))?;
        empty("s_fraction", self.s_fraction.as_ref().map(Vec::len))?;
        if self.j_max == Some(0) {
            return Err(Error::Config("grid.j_max must be positive".into()));
        }
        if self.n_max == Some(0) {
            return Err(Error::Config("grid.n_max must be positive".into()));
        }
        let finite = |name: &str, v: &[f64]| match v.iter().find(|x| !x.is_finite()) {
            Some(x) => Err(Error::Config(format!("grid.{name} contains {x}"))),
            None => Ok(()),
        };
        finite("cutoffs", self.cutoffs.as_deref().unwrap_or_default())?;
        finite("xi", self.xi.as_deref().unwrap_or_default())?;
        finite("s_fraction", self.s_fraction.as_deref().unwrap_or_default())?;
        for (name, pairs) in [("pq", &self.pq), ("eps_delta", &self.eps_delta), ("cuts", &self.cuts), ("tail", &self.tail)] {
            finite(name, &pairs.iter().flatten().flatten().copied().collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSpec {
    pub cutoff: f64,
    pub n_max: usize,
    /// Dense and exhaustive-diagonal cross checks where they fit.
    #[serde(default = "yes")]
    pub cross_check: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub alpha: Vec<f64>,
    pub ell: Vec<i64>,
    pub q: Vec<i64>,
    pub seeds: Vec<u64>,
    /// Length `b - a` of the kept interval; the smallest admissible one when absent.
    #[serde(default)]
    pub window: Option<i64>,
    /// Also run finite chains of this many sites with the gap-stability bundle.
    #[serde(default)]
    pub finite_sites: Option<usize>,
    /// One-site field `-h σ^X` on the finite chains.
    #[serde(default = "default_field")]
    pub field: f64,
}

fn default_field() -> f64 {
    2.0
}

impl RangeSpec {
    fn validate(&self) -> Result<()> {
        for (name, len) in [("alpha", self.alpha.len()), ("ell", self.ell.len()), ("q", self.q.len()), ("seeds", self.seeds.len())] {
            if len == 0 {
                return Err(Error::Config(format!("range.{name} is empty")));
            }
        }
        if let Some(a) = self.alpha.iter().find(|&&a| !(a > 2.0)) {
            return Err(Error::Config(format!("range.alpha must exceed 2, got {a}")));
        }
        if let Some(n) = self.finite_sites.filter(|&n| n > MAX_DENSE_SITES || n < 4) {
            return Err(Error::Config(format!("range.finite_sites = {n} outside 4..={MAX_DENSE_SITES}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model: Option<ModelSource>,
    #[serde(default)]
    pub grid: Grid,
    /// Relative tolerance replacing the per-claim defaults.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub counterexample: Option<CounterexampleSpec>,
    #[serde(default)]
    pub range: Option<RangeSpec>,
}

impl ExperimentConfig {
    pub fn new(suite: Suite, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            suite,
            output_dir: output_dir.into(),
            model: None,
            grid: Grid::default(),
            tolerance: None,
            cache_dir: None,
            counterexample: None,
            range: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tolerance must be a nonnegative number, got {t}")));
            }
        }
        if self.suite.needs_model() {
            match &self.model {
                None => return Err(Error::Config(format!("suite {} needs a [model] section", self.suite))),
                Some(ModelSource::Corpus(spec)) => {
                    spec.validate()?;
                    if spec.count == 0 {
                        return Err(Error::Config("model.count is 0".into()));
                    }
                    if let Some(&n) = spec.sites.iter().find(|&&n| n > MAX_DENSE_SITES) {
                        return Err(Error::Config(format!("model.sites: {n} exceeds the dense limit {MAX_DENSE_SITES}")));
                    }
                }
                Some(ModelSource::Ising { half_length }) => {
                    if 2 * half_length > MAX_DENSE_SITES || *half_length < 3 || half_length % 2 == 0 {
                        return Err(Error::Config(format!("model.half_length must be odd in 3..={}", MAX_DENSE_SITES / 2)));
                    }
                }
                Some(ModelSource::Transverse { sites, field, .. }) => {
                    if *sites < 2 || *sites > MAX_DENSE_SITES {
                        return Err(Error::Config(format!("model.sites = {sites} outside 2..={MAX_DENSE_SITES}")));
                    }
                    if !field.is_finite() {
                        return Err(Error::Config("model.field is not finite".into()));
                    }
                }
                Some(ModelSource::File { paths }) => {
                    if paths.is_empty() {
                        return Err(Error::Config("model.paths is empty".into()));
                    }
                }
            }
        }
        match self.suite {
            Suite::Counterexample => {
                let c = self.counterexample.as_ref().ok_or_else(|| Error::Config("suite counterexample needs [counterexample]".into()))?;
                if !(c.cutoff > 2.0) {
                    return Err(Error::Config(format!("counterexample.cutoff must exceed 2, got {}", c.cutoff)));
                }
                if ising::odd_range(c.n_max).is_empty() {
                    return Err(Error::Config(format!("counterexample.n_max = {} leaves no odd N >= 5", c.n_max)));
                }
                let first = ising::witness_env_energy(5) as f64;
                if !(first > c.cutoff) {
                    return Err(Error::Config(format!("counterexample.cutoff must be below 4*5-4 = {first}")));
                }
            }
            Suite::RangeTrunc => {
                self.range.as_ref().ok_or_else(|| Error::Config("suite range-trunc needs [range]".into()))?.validate()?;
            }
            _ => {}
        }
        Ok(())
    }
}

/// Per-model defaults used for absent grids. `W = ‖H‖` (ground energy 0),
/// `E = max env`, `b = ‖H_∂L‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AutoGrid {
    pub width: f64,
    pub env_max: f64,
    pub boundary_norm: f64,
    pub lambda: f64,
}

/// Fractions of `W` for the auto `(p, q)` and `(ε, δ)` grids.
const AUTO_LOW: [f64; 5] = [0.0, 0.05, 0.1, 0.2, 0.4];
const AUTO_GAP: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];

impl AutoGrid {
    /// Three cutoffs inside the environment spectrum and two far above it,
    /// where `λ(M - 2p - 18b) ≥ 8` resp. `16` over the auto `(p, q)` grid.
    pub fn cutoffs(&self) -> Vec<f64> {
        let b = self.boundary_norm;
        let top = self.env_max.max(b + 1.0);
        let far = top + 2.0 * self.width + 18.0 * b;
        vec![b + 0.25 * (top - b), b + 0.5 * (top - b), b + 0.75 * (top - b), far + 8.0 / self.lambda, far + 16.0 / self.lambda]
    }

    pub fn pq(&self) -> Vec<[f64; 2]> {
        let w = self.width.max(1e-3);
        AUTO_LOW.iter().flat_map(|&p| AUTO_GAP.iter().map(move |&g| [p * w, (p + g) * w])).collect()
    }

    pub fn eps_delta(&self) -> Vec<[f64; 2]> {
        self.pq().into_iter().map(|[p, q]| [p, q]).collect()
    }

    pub fn xi(&self) -> Vec<f64> {
        vec![-2.0 * self.boundary_norm, 0.1 * self.width, 0.3 * self.width]
    }

    pub fn cuts(&self) -> Vec<[f64; 2]> {
        let e = self.width.max(self.env_max).max(1e-3);
        let mut out = Vec::new();
        for n in [0.05, 0.15, 0.3] {
            for gap in [0.1, 0.3, 0.6] {
                out.push([(n + gap) * e, n * e]);
            }
        }
        out
    }

    /// `(ε, N_cut)` with `N_cut` relative to the cutoff, including `N > M`.
    pub fn tail(&self, cutoff: f64) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for eps in [0.0, 0.05 * self.width, 0.2 * self.width] {
            for n in [0.3, 0.6, 0.9, 1.2] {
                out.push([eps, n * cutoff]);
            }
        }
        out
    }

    pub fn s_fraction() -> Vec<f64> {
        vec![0.0, 0.25, 0.5]
    }
}

/// A prepared dense model.
pub struct ModelRun {
    pub model: Model,
    pub prep: Prepared,
    pub boundary_size: usize,
}

impl ModelRun {
    pub fn new(model: Model, region: SiteSet) -> Result<Self> {
        if let Some(d) = model.lattice.hilbert_dim().filter(|&d| d > DEFAULT_DENSE_CAP) {
            return Err(Error::DenseCapExceeded { dim: d, cap: DEFAULT_DENSE_CAP });
        }
        let r = model.constants()?.range_r;
        let split = RegionSplit::minimal(&model.lattice, region, r)?;
        let boundary_size = split.boundary().len();
        let prep = Prepared::new(model.lattice.clone(), model.interaction.clone(), split)?;
        Ok(Self { model, prep, boundary_size })
    }

    /// `L` = the first half of the sites by index.
    pub fn first_half(model: Model) -> Result<Self> {
        let region = (0..model.lattice.len() / 2).collect();
        Self::new(model, region)
    }

    pub fn constants(&self, cutoff: f64) -> Result<Constants> {
        Constants::new(self.prep.ham.constants(), self.boundary_size, self.prep.ham.boundary_norm(), cutoff)
    }

    pub fn auto_grid(&self) -> Result<AutoGrid> {
        Ok(AutoGrid {
            width: self.prep.h.max(),
            env_max: self.prep.env.max(),
            boundary_norm: self.prep.ham.boundary_norm(),
            lambda: self.constants(self.prep.ham.boundary_norm() + 1.0)?.lambda,
        })
    }

    fn tag(&self, c: BoundCertificate) -> BoundCertificate {
        c.for_model(self.model.id.clone(), self.model.seed)
    }
}

/// A truncation of a model at one cutoff with the spectrum of `H̄`.
pub struct Truncated {
    pub result: TruncationResult,
    pub h_bar: std::sync::Arc<SpectralData>,
    pub constants: Constants,
}

pub fn load_models(source: &ModelSource) -> Result<Vec<(Model, SiteSet)>> {
    let first_half = |m: Model| {
        let region: SiteSet = (0..m.lattice.len() / 2).collect();
        (m, region)
    };
    Ok(match source {
        ModelSource::Corpus(spec) => spec.models()?.into_iter().map(first_half).collect(),
        ModelSource::Ising { half_length } => {
            let inst = ising::build_instance(*half_length, 3.0)?;
            let m = Model::new(format!("ising-N{half_length}"), None, inst.lattice().clone(), inst.interaction().clone());
            vec![(m, inst.split().region().clone())]
        }
        ModelSource::Transverse { sites, field, seed } => vec![first_half(transverse_field_chain(*sites, *field, *seed)?)],
        ModelSource::File { paths } => paths.iter().map(|p| Model::read(p).map(first_half)).collect::<Result<_>>()?,
    })
}

/// Outcome of [`run_suite`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub suite: Suite,
    pub config_hash: String,
    pub engine_version: String,
    pub rows: usize,
    pub rows_per_claim: BTreeMap<String, usize>,
    pub tally: Tally,
    pub aborted: bool,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    /// 0 when every row is PASS, VACUOUS, SKIPPED or not applicable, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.tally.all_ok() && !self.aborted {
            0
        } else {
            1
        }
    }

    /// Passing rows with an informative bound, as a fraction of passing rows.
    pub fn informative_fraction(&self) -> f64 {
        let ok = self.tally.pass + self.tally.vacuous;
        if ok == 0 {
            0.0
        } else {
            self.tally.pass as f64 / ok as f64
        }
    }
}

/// Rows with a FAIL stop the run; this carries the reproduction context.
struct Abort {
    model: Option<Model>,
}

/// Accumulates rows and stops at the first FAIL.
struct Sink {
    rows: Vec<BoundCertificate>,
    tolerance: Option<f64>,
    abort: Option<Abort>,
}

impl Sink {
    fn push(&mut self, mut c: BoundCertificate, model: Option<&Model>) -> bool {
        if let Some(t) = self.tolerance {
            c.retolerance(t);
        }
        let failed = c.status == Status::Fail;
        self.rows.push(c);
        if failed {
            self.abort = Some(Abort { model: model.cloned() });
        }
        !failed
    }

    fn extend(&mut self, certs: impl IntoIterator<Item = BoundCertificate>, model: Option<&Model>) -> bool {
        for c in certs {
            if !self.push(c, model) {
                return false;
            }
        }
        true
    }
}

fn error_row(claim: Claim, params: &[(&str, f64)], e: &Error) -> BoundCertificate {
    BoundCertificate::with_status(claim, params, Status::Error, e.to_string())
}

/// Runs one suite and writes its artifacts. Config errors are returned
/// before anything is written.
pub fn run_suite(config: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    config.validate()?;
    let mut extras: Vec<(String, Vec<u8>)> = Vec::new();
    let mut sink = Sink { rows: Vec::new(), tolerance: config.tolerance, abort: None };
    let mut cache = match &config.cache_dir {
        Some(d) => SpectralCache::on_disk(d)?,
        None => SpectralCache::in_memory(),
    };

    match config.suite {
        Suite::Counterexample => run_counterexample(config.counterexample.as_ref().unwrap(), &mut sink, &mut extras)?,
        Suite::RangeTrunc => run_range(config.range.as_ref().unwrap(), &mut sink)?,
        suite => {
            let models = load_models(config.model.as_ref().unwrap())?;
            for (model, region) in models {
                let run = match ModelRun::new(model.clone(), region) {
                    Ok(r) => r,
                    Err(e @ Error::DenseCapExceeded { .. }) => return Err(e),
                    Err(e) => {
                        let row = error_row(primary_claim(suite), &[], &e).for_model(model.id.clone(), model.seed);
                        sink.push(row, Some(&model));
                        continue;
                    }
                };
                if !run_model(&[suite], &config.grid, &run, &mut cache, &mut sink)? {
                    break;
                }
            }
        }
    }

    std::fs::create_dir_all(&config.output_dir)?;
    let mut artifacts = vec!["certificates.csv".to_string()];
    let mut csv = Vec::new();
    certify::write_csv(&mut csv, &sink.rows)?;
    std::fs::write(config.output_dir.join("certificates.csv"), csv)?;
    for (name, bytes) in &extras {
        std::fs::write(config.output_dir.join(name), bytes)?;
        artifacts.push(name.clone());
    }
    let aborted = sink.abort.is_some();
    if let Some(abort) = &sink.abort {
        let failing = sink.rows.last().expect("a failing row was pushed");
        write_repro(&config.output_dir.join("repro"), config, failing, abort.model.as_ref())?;
        artifacts.push("repro/".into());
    }
    let mut rows_per_claim = BTreeMap::new();
    for r in &sink.rows {
        *rows_per_claim.entry(r.claim.id().to_string()).or_insert(0) += 1;
    }
    let manifest = RunManifest {
        suite: config.suite,
        config_hash: config.hash(),
        engine_version: ENGINE_VERSION.into(),
        rows: sink.rows.len(),
        rows_per_claim,
        tally: Tally::of(&sink.rows),
        aborted,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts,
    };
    std::fs::write(config.output_dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest).expect("manifest serializes"))?;
    Ok(manifest)
}

/// Writes the config, the failing certificate and the model (if any).
pub fn write_repro(dir: &Path, config: &ExperimentConfig, failing: &BoundCertificate, model: Option<&Model>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
    std::fs::write(dir.join("certificate.json"), serde_json::to_vec_pretty(failing).expect("certificate serializes"))?;
    if let Some(m) = model {
        m.write(&dir.join("model.toml"))?;
    }
    Ok(())
}

/// In-memory run returning the rows, for library callers and tests.
pub fn run_rows(suites: &[Suite], grid: &Grid, runs: &[ModelRun]) -> Result<Vec<BoundCertificate>> {
    let mut sink = Sink { rows: Vec::new(), tolerance: None, abort: None };
    let mut cache = SpectralCache::in_memory();
    for run in runs {
        if !run_model(suites, grid, run, &mut cache, &mut sink)? {
            break;
        }
    }
    Ok(sink.rows)
}

fn primary_claim(suite: Suite) -> Claim {
    match suite {
        Suite::OverlapI => Claim::OverlapLow,
        Suite::OverlapII => Claim::OverlapWindow,
        Suite::Sandwich => Claim::SandwichUpper,
        Suite::GroundOverlap => Claim::GroundOverlap,
        Suite::Offdiag => Claim::OffDiagH,
        Suite::Tail => Claim::TailPlain,
        Suite::Hadamard => Claim::HadamardSum,
        Suite::Truncation => Claim::TruncationDomination,
        Suite::Counterexample => Claim::IsingNorm,
        Suite::RangeTrunc => Claim::RangeDecaySum,
    }
}

pub fn truncate_at(run: &ModelRun, cutoff: f64, cache: &mut SpectralCache) -> Result<Truncated> {
    let result = run.prep.truncate(cutoff)?;
    let h_bar = cache.get_or_compute(&result.h_bar)?;
    Ok(Truncated { result, h_bar, constants: run.constants(cutoff)? })
}

/// Runs `suites` on one model, sharing the truncation and the theorem
/// context of each cutoff. Returns `false` once a FAIL stopped the run.
fn run_model(suites: &[Suite], grid: &Grid, run: &ModelRun, cache: &mut SpectralCache, sink: &mut Sink) -> Result<bool> {
    let auto = run.auto_grid()?;
    let model = Some(&run.model);
    if suites.contains(&Suite::Hadamard) && !sink.extend(hadamard_rows(grid, run).into_iter().map(|c| run.tag(c)), model) {
        return Ok(false);
    }
    let per_cutoff: Vec<Suite> = suites.iter().copied().filter(|&s| s != Suite::Hadamard).collect();
    let Some(&lead) = per_cutoff.first() else {
        return Ok(true);
    };
    let needs_ctx = per_cutoff.iter().any(|s| matches!(s, Suite::OverlapI | Suite::OverlapII | Suite::Sandwich | Suite::GroundOverlap));
    let cutoffs = grid.cutoffs.clone().unwrap_or_else(|| auto.cutoffs());
    let mut previous: Option<(f64, Truncated)> = None;
    for &m in &cutoffs {
        let t = match truncate_at(run, m, cache) {
            Ok(t) => t,
            Err(e) => {
                if !sink.push(run.tag(error_row(primary_claim(lead), &[("M", m)], &e)), model) {
                    return Ok(false);
                }
                continue;
            }
        };
        let ctx = needs_ctx.then(|| TheoremContext::new(&run.prep.h, &t.h_bar, t.constants));
        let first = previous.is_none();
        for &suite in &per_cutoff {
            let rows = match suite {
                Suite::OverlapI => with_ctx(&ctx, Claim::OverlapLow, m, |c| overlap_i_rows(grid, &auto, c)),
                Suite::OverlapII => with_ctx(&ctx, Claim::OverlapWindow, m, |c| overlap_ii_rows(grid, &auto, c)),
                Suite::Sandwich => with_ctx(&ctx, Claim::SandwichUpper, m, |c| sandwich(c, grid.j_max.unwrap_or(usize::MAX))),
                Suite::GroundOverlap => with_ctx(&ctx, Claim::GroundOverlap, m, |c| vec![certify::ground_overlap(c)]),
                Suite::Offdiag => offdiag_rows(grid, &auto, run, &t, first),
                Suite::Tail => tail_rows(grid, &auto, run, &t, first),
                Suite::Truncation => truncation_rows(run, &t, previous.as_ref()),
                Suite::Hadamard | Suite::Counterexample | Suite::RangeTrunc => Vec::new(),
            };
            if !sink.extend(rows.into_iter().map(|c| run.tag(c)), model) {
                return Ok(false);
            }
        }
        previous = Some((m, t));
    }
    Ok(true)
}

fn with_ctx(
    ctx: &Option<Result<TheoremContext<'_>>>,
    claim: Claim,
    m: f64,
    f: impl FnOnce(&TheoremContext<'_>) -> Vec<BoundCertificate>,
) -> Vec<BoundCertificate> {
    match ctx {
        Some(Ok(c)) => f(c),
        Some(Err(e)) => vec![error_row(claim, &[("M", m)], e)],
        None => Vec::new(),
    }
}

fn overlap_i_rows(grid: &Grid, auto: &AutoGrid, ctx: &TheoremContext<'_>) -> Vec<BoundCertificate> {
    let m = ctx.constants.cutoff;
    grid.pq
        .clone()
        .unwrap_or_else(|| auto.pq())
        .iter()
        .map(|&[p, q]| overlap_i(ctx, p, q).unwrap_or_else(|e| error_row(Claim::OverlapLow, &[("M", m), ("p", p), ("q", q)], &e)))
        .collect()
}

fn overlap_ii_rows(grid: &Grid, auto: &AutoGrid, ctx: &TheoremContext<'_>) -> Vec<BoundCertificate> {
    let pairs = grid.eps_delta.clone().unwrap_or_else(|| auto.eps_delta());
    let xis = grid.xi.clone().unwrap_or_else(|| auto.xi());
    let m = ctx.constants.cutoff;
    let mut out = Vec::with_capacity(pairs.len() * (1 + xis.len()));
    for &[eps, delt] in &pairs {
        let params = [("M", m), ("eps", eps), ("delta", delt)];
        out.push(overlap_ii(ctx, eps, delt).unwrap_or_else(|e| error_row(Claim::OverlapWindow, &params, &e)));
    }
    for &xi in &xis {
        for &[eps, delt] in &pairs {
            let params = [("M", m), ("eps", eps), ("delta", delt), ("xi", xi)];
            out.push(overlap_shifted(ctx, eps, delt, xi).unwrap_or_else(|e| error_row(Claim::OverlapShifted, &params, &e)));
        }
    }
    out
}

/// Seeded unit-norm random observables followed by two spectral projections
/// of the model (a low window of `H` and one of the environment).
pub fn offdiag_observables(run: &ModelRun, auto: &AutoGrid, count: usize) -> Vec<Mat<C64>> {
    let n = run.prep.h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(run.model.seed.unwrap_or(0) ^ 0x0ff_d1a9);
    let mut out: Vec<Mat<C64>> = (0..count)
        .map(|_| {
            let a = linalg::random_hermitian(&mut rng, n);
            let norm = linalg::opnorm(a.as_ref());
            linalg::scaled(a.as_ref(), 1.0 / norm)
        })
        .collect();
    out.push(spectral::projector(&run.prep.h, Interval::closed(0.0, 0.2 * auto.width)).matrix());
    let e = &run.prep.env;
    out.push(spectral::projector(e, Interval::closed(e.min(), e.min() + 0.3 * (e.max() - e.min()))).matrix());
    out
}

fn offdiag_rows(grid: &Grid, auto: &AutoGrid, run: &ModelRun, t: &Truncated, first: bool) -> Vec<BoundCertificate> {
    let cuts = grid.cuts.clone().unwrap_or_else(|| auto.cuts());
    let observables = offdiag_observables(run, auto, grid.observables.unwrap_or(2));
    let env_bar = &t.result.truncated_env_spectral;
    let mut variants: Vec<(OffDiagVariant, &SpectralData, &SpectralData)> = Vec::with_capacity(4);
    // The untruncated pair does not depend on M.
    if first {
        variants.push((OffDiagVariant::H, &run.prep.h, &run.prep.env));
        variants.push((OffDiagVariant::Env, &run.prep.env, &run.prep.h));
    }
    variants.push((OffDiagVariant::HBar, &t.h_bar, env_bar));
    variants.push((OffDiagVariant::EnvBar, env_bar, &t.h_bar));
    let m = t.constants.cutoff;
    let mut out = Vec::new();
    for (variant, windows, conj) in variants {
        for (k, a) in observables.iter().enumerate() {
            match OffDiagProbe::new(variant, windows, conj, a.as_ref(), t.constants) {
                Ok(probe) => out.extend(cuts.iter().map(|&[mc, nc]| probe.certify(mc, nc).with_param("A", k as f64))),
                Err(e) => out.push(error_row(variant.claim(), &[("M", m), ("A", k as f64)], &e)),
            }
        }
    }
    out
}

fn tail_rows(grid: &Grid, auto: &AutoGrid, run: &ModelRun, t: &Truncated, first: bool) -> Vec<BoundCertificate> {
    let m = t.constants.cutoff;
    let points = grid.tail.clone().unwrap_or_else(|| auto.tail(m));
    let env_bar = &t.result.truncated_env_spectral;
    let mut out = Vec::new();
    let mut emit = |variant: TailVariant, env: &SpectralData, target: &SpectralData, pts: &[[f64; 2]]| {
        match SpectralOverlap::new(env, target) {
            Ok(g) => {
                for &[eps, n_cut] in pts {
                    let params = [("M", m), ("N_cut", n_cut), ("eps", eps)];
                    out.push(
                        certify::tail(variant, env, target, &g, eps, n_cut, &t.constants)
                            .unwrap_or_else(|e| error_row(variant.claim(), &params, &e)),
                    );
                }
            }
            Err(e) => out.push(error_row(variant.claim(), &[("M", m)], &e)),
        }
    };
    if first {
        emit(TailVariant::Plain, &run.prep.env, &run.prep.h, &points);
    }
    emit(TailVariant::Truncated, env_bar, &t.h_bar, &points);
    // N is fixed to M; one row per ε.
    let mut eps: Vec<f64> = points.iter().map(|p| p[0]).collect();
    eps.dedup();
    let at_cutoff: Vec<[f64; 2]> = eps.into_iter().map(|e| [e, m]).collect();
    emit(TailVariant::AtCutoff, &run.prep.env, &t.h_bar, &at_cutoff);
    out
}

/// Structural invariants of one truncation and monotonicity against the
/// previous cutoff.
pub fn truncation_rows(run: &ModelRun, t: &Truncated, previous: Option<&(f64, Truncated)>) -> Vec<BoundCertificate> {
    let m = t.constants.cutoff;
    let r = match check_invariants(&run.prep, &t.result, Some(&t.h_bar)) {
        Ok(r) => r,
        Err(e) => return vec![error_row(Claim::TruncationDomination, &[("M", m)], &e)],
    };
    let tol = r.tolerance();
    let params = [("M", m), ("b", r.boundary_norm)];
    let mut out = vec![
        BoundCertificate::judge_abs(Claim::TruncationDomination, &params, -r.domination_floor, 0.0, BoundKind::Plain, tol)
            .with_note("lhs = -min spec(H - H_bar)"),
        BoundCertificate::judge_abs(Claim::TruncationNormCap, &params, r.h_bar_norm, r.boundary_norm + m, BoundKind::Plain, tol),
        BoundCertificate::judge_abs(Claim::TruncationEnvFloor, &params, -r.env_floor, r.boundary_norm, BoundKind::Plain, tol)
            .with_note("lhs = -min spec(env)"),
        BoundCertificate::judge_abs(
            Claim::TruncationEnvFloor,
            &[("M", m), ("b", r.boundary_norm), ("truncated", 1.0)],
            r.truncated_env_max,
            m,
            BoundKind::Plain,
            tol,
        )
        .with_note("lhs = max spec(truncated env)"),
    ];
    if let Some((m_prev, prev)) = previous {
        let row = match order_floor(&prev.result.h_bar, &t.result.h_bar) {
            Ok(f) => BoundCertificate::judge_abs(
                Claim::TruncationMonotone,
                &[("M", m), ("M_prev", *m_prev)],
                if m >= *m_prev { -f } else { f.min(0.0) },
                0.0,
                BoundKind::Plain,
                tol,
            )
            .with_note("lhs = -min spec(H_bar(M) - H_bar(M_prev))"),
            Err(e) => error_row(Claim::TruncationMonotone, &[("M", m), ("M_prev", *m_prev)], &e),
        };
        out.push(row);
    }
    out
}

fn hadamard_rows(grid: &Grid, run: &ModelRun) -> Vec<BoundCertificate> {
    let ham = &run.prep.ham;
    let c = ham.constants();
    let b = ham.boundary_norm();
    let s_x = match run.constants(b + 1.0) {
        Ok(k) => k.s_x,
        Err(e) => return vec![error_row(Claim::HadamardSum, &[], &e)],
    };
    let fractions = grid.s_fraction.clone().unwrap_or_else(AutoGrid::s_fraction);
    let n_max = grid.n_max.unwrap_or(20);
    let env_spec;
    let generators: [(f64, &crate::operator::HermitianOperator, &SpectralData); 2] = [
        (0.0, ham.full(), &run.prep.h),
        (1.0, ham.env(), {
            env_spec = &run.prep.env;
            env_spec
        }),
    ];
    let mut out = Vec::new();
    for (gen_id, gen, spec) in generators {
        for &f in &fractions {
            let s = f * s_x;
            match hadamard_series_check(ham.boundary(), run.boundary_size, gen, spec, c.strength_j, c.locality_n, s, s_x, n_max) {
                Ok(r) => out.extend(r.certificates.into_iter().map(|x| x.with_param("generator", gen_id).with_param("s_fraction", f))),
                Err(e) => out.push(error_row(Claim::HadamardSum, &[("s", s), ("generator", gen_id)], &e)),
            }
        }
    }
    out
}

fn run_counterexample(spec: &CounterexampleSpec, sink: &mut Sink, extras: &mut Vec<(String, Vec<u8>)>) -> Result<()> {
    let rows = ising::divergence_scan(&ising::odd_range(spec.n_max), spec.cutoff, spec.cross_check)?;
    let mut div = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    div.write_record(["N", "lower_bound", "measured_norm", "method", "akl_rhs", "crossed"])?;
    for r in &rows {
        div.write_record([
            r.half_length.to_string(),
            r.lower_bound.to_string(),
            r.measured_norm.to_string(),
            r.method.as_str().to_string(),
            r.akl_rhs.to_string(),
            r.crossed.to_string(),
        ])?;
    }
    extras.push(("divergence.csv".into(), div.into_inner().map_err(|e| Error::Io(e.into_error()))?));
    extras.push(("plot.csv".into(), plot_csv(&ising::plot_data(&rows))?));
    for r in &rows {
        if !sink.push(r.certificate(spec.cutoff).for_model(format!("ising-N{}", r.half_length), None), None) {
            break;
        }
    }
    Ok(())
}

/// `(x, y, series)` triples as CSV.
pub fn plot_csv(points: &[(f64, f64, &str)]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["x", "y", "series"])?;
    for (x, y, s) in points {
        w.write_record([x.to_string(), y.to_string(), s.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Geometry for a finite chain `1..=n`: the kept interval is centred with
/// its block neighbourhoods flush against the chain ends.
pub fn finite_chain_geometry(n: usize, ell: i64, q: i64) -> Result<TruncationGeometry> {
    let margin = (q + 1) * ell;
    TruncationGeometry::new(1 + margin, n as i64 - margin, ell, q)
}

/// Decay-bound rows for one windowed instance.
pub fn range_window_rows(alpha: f64, ell: i64, q: i64, seed: u64, window: Option<i64>) -> Result<Vec<BoundCertificate>> {
    let geom = match window {
        Some(len) => TruncationGeometry::new(0, len, ell, q)?,
        None => TruncationGeometry::centered(ell, q)?,
    };
    let model = range::decaying_window(&geom, alpha, seed)?;
    let r = range::range_truncate(&model, &geom)?;
    Ok(range::decay_bound_certificate(&r))
}

/// Decay-bound rows and the gap-stability bundle for one finite chain.
pub fn range_finite_rows(n: usize, alpha: f64, ell: i64, q: i64, seed: u64, field: f64) -> Result<Vec<BoundCertificate>> {
    let geom = finite_chain_geometry(n, ell, q)?;
    let model = range::decaying_pair_model(1, n as i64, alpha, n - 1, field, seed, ChainOrigin::FiniteChain)?;
    let r = range::range_truncate(&model, &geom)?;
    let mut rows = range::decay_bound_certificate(&r);
    let delta_h = r.delta_h.as_ref().ok_or(Error::DenseCapExceeded { dim: usize::MAX, cap: DEFAULT_DENSE_CAP })?;
    let h = crate::operator::assemble(model.interaction().terms(), model.lattice())?;
    let h_spec = spectral::eig(&h)?;
    let (gap_rows, _) = range::gap_stability_certificate(&h, &h_spec, delta_h)?;
    rows.extend(gap_rows);
    Ok(rows)
}

fn run_range(spec: &RangeSpec, sink: &mut Sink) -> Result<()> {
    for &alpha in &spec.alpha {
        for &ell in &spec.ell {
            for &q in &spec.q {
                for &seed in &spec.seeds {
                    let params = [("alpha", alpha), ("ell", ell as f64), ("q", q as f64)];
                    let mut rows = range_window_rows(alpha, ell, q, seed, spec.window)
                        .unwrap_or_else(|e| vec![error_row(Claim::RangeDecaySum, &params, &e)]);
                    if let Some(n) = spec.finite_sites {
                        match range_finite_rows(n, alpha, ell, q, seed, spec.field) {
                            Ok(r) => rows.extend(r.into_iter().map(|c| c.with_param("finite", 1.0))),
                            Err(Error::InvalidGeometry(why)) => rows.push(
                                BoundCertificate::with_status(Claim::RangeDecaySum, &params, Status::NotApplicable, why)
                                    .with_param("finite", 1.0),
                            ),
                            Err(e) => rows.push(error_row(Claim::RangeDecaySum, &params, &e).with_param("finite", 1.0)),
                        }
                    }
                    let id = format!("decay-a{alpha}-l{ell}-q{q}");
                    if !sink.extend(rows.into_iter().map(|c| c.for_model(id.clone(), Some(seed))), None) {
                        return Ok(());
                    }
                }
            }
        }
    }
    Ok(())
}

/// Per-claim status counts of a certificate CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub per_claim: BTreeMap<String, Tally>,
    pub total: Tally,
}

impl Report {
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != certify::CSV_HEADER {
            return Err(Error::Config(format!("{} is not a certificate CSV", path.display())));
        }
        let mut out = Report::default();
        for rec in r.records() {
            let rec = rec?;
            let status: Status = rec[6].parse()?;
            out.per_claim.entry(rec[0].to_string()).or_default().add(status);
            out.total.add(status);
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "{:<22} {:>7} {:>6} {:>6} {:>8} {:>6} {:>7} {:>5} {:>6}\n",
            "claim", "rows", "PASS", "FAIL", "VACUOUS", "VBS", "SKIPPED", "N/A", "ERROR"
        );
        let line = |name: &str, t: &Tally| {
            format!(
                "{:<22} {:>7} {:>6} {:>6} {:>8} {:>6} {:>7} {:>5} {:>6}\n",
                name,
                t.total(),
                t.pass,
                t.fail,
                t.vacuous,
                t.vacuous_by_structure,
                t.skipped,
                t.not_applicable,
                t.error
            )
        };
        for (k, t) in &self.per_claim {
            s.push_str(&line(k, t));
        }
        s.push_str(&line("total", &self.total));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::DEFAULT_TOL;

    fn small_corpus() -> ModelSource {
        ModelSource::Corpus(CorpusSpec { seed: 40, count: 2, sites: vec![6], coupling: None })
    }

    #[test]
    fn config_round_trip_and_hash() {
        let mut c = ExperimentConfig::new(Suite::OverlapI, "out");
        c.model = Some(small_corpus());
        c.grid.cutoffs = Some(vec![5.0, 500.0]);
        let text = c.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert!(text.contains("suite = \"overlap-i\""));
    }

    #[test]
    fn empty_grid_is_rejected_without_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let mut c = ExperimentConfig::new(Suite::OverlapI, &out);
        c.model = Some(small_corpus());
        c.grid.pq = Some(vec![]);
        assert!(matches!(run_suite(&c), Err(Error::Config(m)) if m.contains("grid.pq")));
        assert!(!out.exists());
        let c = ExperimentConfig::new(Suite::Sandwich, &out);
        assert!(matches!(run_suite(&c), Err(Error::Config(_))));
        assert!(!out.exists());
    }

    #[test]
    fn dense_limit_is_enforced() {
        let mut c = ExperimentConfig::new(Suite::Tail, "unused");
        c.model = Some(ModelSource::Corpus(CorpusSpec { seed: 0, count: 1, sites: vec![14], coupling: None }));
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn auto_grids_are_admissible() {
        let runs: Vec<ModelRun> = load_models(&small_corpus())
            .unwrap()
            .into_iter()
            .map(|(m, r)| ModelRun::new(m, r).unwrap())
            .collect();
        for run in &runs {
            let a = run.auto_grid().unwrap();
            let b = a.boundary_norm;
            assert!(a.cutoffs().iter().all(|&m| m > b));
            assert!(a.pq().iter().all(|&[p, q]| q > p && p >= -2.0 * b));
            assert_eq!(a.pq().len(), 25);
        }
        for suite in [Suite::OverlapI, Suite::OverlapII, Suite::Sandwich, Suite::Truncation] {
            let rows = run_rows(&[suite], &Grid::default(), &runs).unwrap();
            assert!(!rows.is_empty());
            assert!(rows.iter().all(|r| r.passed()), "{suite}: {:?}", rows.iter().find(|r| !r.passed()));
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new(Suite::Tail, dir.path().join("a"));
        c.model = Some(small_corpus());
        c.grid.cutoffs = Some(vec![4.0, 8.0]);
        let m1 = run_suite(&c).unwrap();
        let first = std::fs::read(dir.path().join("a/certificates.csv")).unwrap();
        c.output_dir = dir.path().join("b");
        let m2 = run_suite(&c).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join("b/certificates.csv")).unwrap());
        assert_eq!(m1.tally, m2.tally);
        assert_eq!(m1.tally.total(), m1.rows);
        assert_eq!(m1.rows_per_claim.values().sum::<usize>(), m1.rows);
        assert_eq!(m1.exit_code(), 0);
        let report = Report::from_csv(&dir.path().join("a/certificates.csv")).unwrap();
        assert_eq!(report.total, m1.tally);
        assert!(report.render().contains("tail-truncated"));
    }

    #[test]
    fn cutoff_below_boundary_norm_is_an_error_row() {
        let runs: Vec<ModelRun> = load_models(&small_corpus())
            .unwrap()
            .into_iter()
            .take(1)
            .map(|(m, r)| ModelRun::new(m, r).unwrap())
            .collect();
        let grid = Grid { cutoffs: Some(vec![0.0]), ..Grid::default() };
        let rows = run_rows(&[Suite::OverlapI], &grid, &runs).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, Status::Error);
    }

    #[test]
    fn failing_row_stops_the_sink_and_bundles() {
        let mut sink = Sink { rows: Vec::new(), tolerance: None, abort: None };
        let ok = BoundCertificate::judge(Claim::SandwichUpper, &[], 1.0, 1.0, BoundKind::Plain, DEFAULT_TOL);
        let bad = BoundCertificate::judge(Claim::SandwichUpper, &[], 2.0, 1.0, BoundKind::Plain, DEFAULT_TOL);
        assert!(!sink.extend([ok, bad.clone(), bad.clone()], None));
        assert_eq!(sink.rows.len(), 2);
        assert!(sink.abort.is_some());

        let dir = tempfile::tempdir().unwrap();
        let model = load_models(&small_corpus()).unwrap().remove(0).0;
        let mut c = ExperimentConfig::new(Suite::Sandwich, dir.path());
        c.model = Some(small_corpus());
        write_repro(&dir.path().join("repro"), &c, &bad, Some(&model)).unwrap();
        let back = Model::read(&dir.path().join("repro/model.toml")).unwrap();
        assert_eq!(back.id, model.id);
        let cfg = std::fs::read_to_string(dir.path().join("repro/config.toml")).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg).unwrap(), c);
        let cert: BoundCertificate =
            serde_json::from_slice(&std::fs::read(dir.path().join("repro/certificate.json")).unwrap()).unwrap();
        assert_eq!(cert.status, Status::Fail);
    }

    #[test]
    fn tolerance_override_rejudges() {
        let mut sink = Sink { rows: Vec::new(), tolerance: Some(0.5), abort: None };
        let near = BoundCertificate::judge(Claim::SandwichUpper, &[], 1.2, 1.0, BoundKind::Plain, DEFAULT_TOL);
        assert_eq!(near.status, Status::Fail);
        assert!(sink.push(near, None));
        assert_eq!(sink.rows[0].status, Status::Pass);
    }

    #[test]
    fn counterexample_suite_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new(Suite::Counterexample, dir.path());
        c.counterexample = Some(CounterexampleSpec { cutoff: 10.0, n_max: 31, cross_check: false });
        let m = run_suite(&c).unwrap();
        assert_eq!(m.rows, (31 - 5) / 2 + 1);
        assert_eq!(m.exit_code(), 0);
        let div = std::fs::read_to_string(dir.path().join("divergence.csv")).unwrap();
        assert_eq!(div.lines().count(), m.rows + 1);
        assert!(div.lines().skip(1).all(|l| l.ends_with("false")));
        let plot = std::fs::read_to_string(dir.path().join("plot.csv")).unwrap();
        assert_eq!(plot.lines().count(), 3 * m.rows + 1);
    }

    #[test]
    fn range_suite_rows() {
        let spec = RangeSpec {
            alpha: vec![3.0],
            ell: vec![1, 2],
            q: vec![1],
            seeds: vec![5],
            window: None,
            finite_sites: Some(10),
            field: 2.0,
        };
        let mut sink = Sink { rows: Vec::new(), tolerance: None, abort: None };
        run_range(&spec, &mut sink).unwrap();
        assert!(sink.abort.is_none());
        let finite: Vec<_> = sink.rows.iter().filter(|r| r.param("finite") == Some(1.0)).collect();
        // ℓ = 1 fits ten sites: two decay rows and five gap rows; ℓ = 2 does not.
        assert_eq!(finite.len(), 8);
        assert!(finite.iter().filter(|r| r.claim == Claim::GapFidelity).all(|r| r.status == Status::Pass));
        assert!(sink.rows.iter().all(|r| r.passed()));
    }
}
