//! Config-driven experiment runs.
//!
//! Every run takes an [`ExperimentConfig`] (JSON), computes its result without
//! touching the file system, and can then write CSV tables plus a
//! `summary.json` into an output directory. Outputs depend only on the config,
//! so reruns are byte-identical.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{CoinField, FieldSpec};
use crate::error::{Error, Result};
use crate::measure::{ks_distance, VelocityMeasure, KS_GRID_POINTS};
use crate::momentum::{velocity_pushforward, BandDecomposition, DEFAULT_GRID};
use crate::scattering::{
    perturbed_velocity_measure, trace_norm_partial, TraceNormDiagnostic, WaveDirection, WaveProbe,
    DEFAULT_PROBE_TIMES,
};
use crate::spectral::{
    point_mass_weight, point_spectrum, BoundStateSet, Boundary, TruncatedEvolution,
    DEFAULT_HALF_WIDTH,
};
use crate::walk::{fmt_f64, Direction, PositionDistribution, Spinor, WalkState};
use crate::C64;

/// Tolerance on `|α|² + |β|² = 1` for configured spinors.
pub const SPINOR_TOL: f64 = 1e-10;

/// Frequencies at which characteristic functions are compared.
pub const CHARFN_XI: [f64; 6] = [-4.0, -2.0, -1.0, 1.0, 2.0, 4.0];

fn default_grid() -> usize {
    DEFAULT_GRID
}
fn default_truncation() -> usize {
    DEFAULT_HALF_WIDTH
}
fn default_boundary() -> Boundary {
    Boundary::Periodic
}
fn default_probe_times() -> Vec<usize> {
    DEFAULT_PROBE_TIMES.to_vec()
}
fn default_trap_radius() -> i64 {
    20
}
fn default_trace_radius() -> u64 {
    10_000
}

/// Initial state of a run. Spinors are `[re α, im α, re β, im β]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialSpec {
    /// `δ_site ⊗ (α, β)`.
    Site { site: i64, spinor: [f64; 4] },
    /// Gaussian envelope of width `width` around `center`, carrying momentum
    /// `momentum`.
    Packet {
        center: i64,
        width: f64,
        momentum: f64,
        spinor: [f64; 4],
    },
    /// `δ_site` with a spinor drawn uniformly from the unit sphere of C²
    /// using the run seed.
    RandomSpinor { site: i64 },
}

/// Which vector the backward wave probe is applied to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackwardInput {
    /// The initial state as configured.
    #[default]
    Initial,
    /// The initial state with its bound-state components removed.
    Dispersive,
    /// The first bound state of the field; the probe should not settle.
    BoundState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: FieldSpec,
    pub initial: InitialSpec,
    /// Number of steps `t`.
    pub horizon: usize,
    /// Extra times at which the position law is recorded; the horizon is
    /// always included.
    #[serde(default)]
    pub checkpoints: Vec<usize>,
    /// Momentum grid size `N`.
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    /// Truncation half-width `L` for the spectral stage.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    #[serde(default = "default_probe_times")]
    pub probe_times: Vec<usize>,
    #[serde(default)]
    pub backward_input: BackwardInput,
    /// Sites `|x| ≤ trap_radius` count as trapped near the origin.
    #[serde(default = "default_trap_radius")]
    pub trap_radius: i64,
    /// Time window `[t₁, t₂]` for the time-averaged trapped probability.
    #[serde(default)]
    pub average_window: Option<[usize; 2]>,
    #[serde(default = "default_trace_radius")]
    pub trace_radius: u64,
    /// Transport time for `U₀^{−t}U^t`; defaults to the horizon.
    #[serde(default)]
    pub wave_time: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Default output directory when none is given on the command line.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn spinor_from(f: [f64; 4]) -> Spinor {
    [C64::new(f[0], f[1]), C64::new(f[2], f[3])]
}

fn check_spinor(f: [f64; 4]) -> Result<()> {
    let n = f.iter().map(|v| v * v).sum::<f64>();
    if !((n - 1.0).abs() <= SPINOR_TOL) {
        return Err(Error::Config(format!(
            "initial spinor must satisfy |a|^2 + |b|^2 = 1, got {n}"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if self.grid_size == 0 {
            return Err(Error::Config("grid_size must be positive".into()));
        }
        if self.truncation == 0 {
            return Err(Error::Config("truncation must be positive".into()));
        }
        if self.trap_radius < 0 {
            return Err(Error::Config("trap_radius must be nonnegative".into()));
        }
        if self.wave_time == Some(0) {
            return Err(Error::Config("wave_time must be positive".into()));
        }
        if let Some(&t) = self.checkpoints.iter().find(|&&t| t > self.horizon) {
            return Err(Error::Config(format!(
                "checkpoint {t} lies beyond the horizon {}",
                self.horizon
            )));
        }
        if let Some([a, b]) = self.average_window {
            if a > b {
                return Err(Error::Config(format!("empty averaging window [{a}, {b}]")));
            }
        }
        match &self.initial {
            InitialSpec::Site { spinor, .. } => check_spinor(*spinor)?,
            InitialSpec::Packet { width, spinor, .. } => {
                check_spinor(*spinor)?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::Config(format!(
                        "packet width must be positive, got {width}"
                    )));
                }
            }
            InitialSpec::RandomSpinor { .. } => {}
        }
        CoinField::from_spec(&self.field).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn field(&self) -> Result<CoinField> {
        CoinField::from_spec(&self.field)
    }

    pub fn initial_state(&self) -> Result<WalkState> {
        match &self.initial {
            InitialSpec::Site { site, spinor } => {
                Ok(WalkState::localized(*site, spinor_from(*spinor)))
            }
            InitialSpec::Packet {
                center,
                width,
                momentum,
                spinor,
            } => WalkState::gaussian_packet(*center, *width, *momentum, spinor_from(*spinor)),
            InitialSpec::RandomSpinor { site } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                // |α|² is uniform on [0, 1] under the unitarily invariant measure
                let p: f64 = rng.gen();
                let phases: [f64; 2] = [
                    rng.gen_range(0.0..std::f64::consts::TAU),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ];
                Ok(WalkState::localized(
                    *site,
                    [
                        C64::from_polar(p.sqrt(), phases[0]),
                        C64::from_polar((1.0 - p).sqrt(), phases[1]),
                    ],
                ))
            }
        }
    }

    fn wave_time(&self) -> usize {
        self.wave_time.unwrap_or(self.horizon)
    }

    fn ensure_inside_truncation(&self, psi: &WalkState) -> Result<()> {
        let l = self.truncation as i64;
        let (lo, hi) = psi.window();
        if lo < -l || hi > l {
            return Err(Error::Config(format!(
                "initial state on [{lo}, {hi}] lies outside the truncation window [-{l}, {l}]"
            )));
        }
        Ok(())
    }

    fn bound_states(&self, field: &CoinField) -> Result<BoundStateSet> {
        if field.is_homogeneous() {
            return Ok(BoundStateSet::empty(field, self.truncation));
        }
        let trunc = TruncatedEvolution::build(field, self.truncation, self.boundary)?;
        point_spectrum(&trunc, field)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_summary<T: Serialize>(dir: &Path, summary: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(dir.join("summary.json"), text)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub t: usize,
    /// `E[Xₜ/t]`
    pub mean: f64,
    /// `E[(Xₜ/t)²]`
    pub second: f64,
    pub norm: f64,
}

/// Position laws at the checkpoints of one evolution.
#[derive(Clone, Debug)]
pub struct EvolutionRun {
    pub laws: Vec<PositionDistribution>,
    pub moments: Vec<MomentRow>,
}

impl EvolutionRun {
    pub fn final_law(&self) -> &PositionDistribution {
        self.laws.last().expect("horizon is always recorded")
    }

    pub fn final_moments(&self) -> MomentRow {
        *self.moments.last().expect("horizon is always recorded")
    }

    /// Writes `distribution_t<T>.csv` per checkpoint, `moments.csv` and
    /// `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for law in &self.laws {
            law.write_csv(create(dir, &format!("distribution_t{}.csv", law.time()))?)?;
        }
        let mut w = csv::Writer::from_writer(create(dir, "moments.csv")?);
        w.write_record(["t", "mean", "second_moment", "norm"])?;
        for m in &self.moments {
            w.write_record([
                m.t.to_string(),
                fmt_f64(m.mean),
                fmt_f64(m.second),
                fmt_f64(m.norm),
            ])?;
        }
        w.flush()?;
        #[derive(Serialize)]
        struct Summary<'a> {
            horizon: usize,
            mean: f64,
            second_moment: f64,
            norm: f64,
            checkpoints: &'a [MomentRow],
        }
        let last = self.final_moments();
        write_summary(
            dir,
            &Summary {
                horizon: last.t,
                mean: last.mean,
                second_moment: last.second,
                norm: last.norm,
                checkpoints: &self.moments,
            },
        )
    }
}

pub fn run_evolution(cfg: &ExperimentConfig) -> Result<EvolutionRun> {
    cfg.validate()?;
    let field = cfg.field()?;
    let psi0 = cfg.initial_state()?;
    let mut times = cfg.checkpoints.clone();
    times.push(cfg.horizon);
    times.sort_unstable();
    times.dedup();

    let mut laws = Vec::with_capacity(times.len());
    let mut moments = Vec::with_capacity(times.len());
    let mut next = times.iter().peekable();
    let mut failure = None;
    psi0.evolve_visit(&field, cfg.horizon, |state| {
        let t = state.time() as usize;
        if next.peek() != Some(&&t) || failure.is_some() {
            return;
        }
        next.next();
        match state.position_distribution() {
            Ok(law) => {
                moments.push(MomentRow {
                    t,
                    mean: law.scaled_moment(1).unwrap_or(f64::NAN),
                    second: law.scaled_moment(2).unwrap_or(f64::NAN),
                    norm: state.norm(),
                });
                laws.push(law);
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(EvolutionRun { laws, moments }),
    }
}

/// `(1/(t₂−t₁+1)) Σ_{t=t₁}^{t₂} Σ_{|x|≤r} Pₜ(x)`.
pub fn trapped_time_average(
    psi0: &WalkState,
    field: &CoinField,
    radius: i64,
    window: [usize; 2],
) -> f64 {
    let [t1, t2] = window;
    let mut sum = 0.0;
    psi0.evolve_visit(field, t2, |state| {
        let t = state.time();
        if t >= t1 as i64 {
            sum += state
                .iter()
                .filter(|(x, _)| x.abs() <= radius)
                .map(|(_, s)| s[0].norm_sqr() + s[1].norm_sqr())
                .sum::<f64>();
        }
    });
    sum / (t2 - t1 + 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentError {
    pub m: i32,
    pub empirical: f64,
    pub theory: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharFnError {
    pub xi: f64,
    pub error: f64,
}

/// Distances between the law of `Xₜ/t` and the predicted limit law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub t: usize,
    pub ks_distance: f64,
    /// `m = 1, 2`.
    pub moment_errors: Vec<MomentError>,
    /// Largest characteristic-function error over [`CHARFN_XI`].
    pub charfn_errors: f64,
    pub charfn_detail: Vec<CharFnError>,
    /// `|Σ_{|x|≤r} Pₜ(x) − μ_V({0})|` with `r` the trap radius.
    pub atom_weight_error: f64,
    /// Atom of the limit law at `v = 0`.
    pub theory_atom_weight: f64,
    pub theory_total_mass: f64,
    pub bound_states: usize,
}

impl ComparisonReport {
    pub fn moment_error(&self, m: i32) -> Option<f64> {
        self.moment_errors
            .iter()
            .find(|e| e.m == m)
            .map(|e| e.error)
    }
}

/// Builds a report from the two laws.
pub fn compare_laws(
    law: &PositionDistribution,
    theory: &VelocityMeasure,
    trap_radius: i64,
    bound_states: usize,
) -> Result<(ComparisonReport, VelocityMeasure)> {
    let empirical = VelocityMeasure::from_position_law(law)?;
    let moment_errors = [1, 2]
        .into_iter()
        .map(|m| {
            let (e, th) = (empirical.moment(m), theory.moment(m));
            MomentError {
                m,
                empirical: e,
                theory: th,
                error: (e - th).abs(),
            }
        })
        .collect();
    let charfn_detail: Vec<CharFnError> = CHARFN_XI
        .iter()
        .map(|&xi| CharFnError {
            xi,
            error: (empirical.characteristic(xi) - theory.characteristic(xi)).norm(),
        })
        .collect();
    let theory_atom_weight = theory.atom_at(0.0);
    let report = ComparisonReport {
        t: law.time() as usize,
        ks_distance: ks_distance(&empirical, theory),
        moment_errors,
        charfn_errors: charfn_detail.iter().map(|c| c.error).fold(0.0, f64::max),
        charfn_detail,
        atom_weight_error: (law.mass_within(trap_radius) - theory_atom_weight).abs(),
        theory_atom_weight,
        theory_total_mass: theory.total_mass(),
        bound_states,
    };
    Ok((report, empirical))
}

#[derive(Clone, Debug)]
pub struct LimitComparison {
    pub report: ComparisonReport,
    pub empirical: VelocityMeasure,
    pub theory: VelocityMeasure,
}

impl LimitComparison {
    /// Writes `empirical.csv`, `theory.csv`, `cdf.csv` (both CDFs on the KS
    /// grid) and `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.empirical.write_csv(create(dir, "empirical.csv")?)?;
        self.theory.write_csv(create(dir, "theory.csv")?)?;
        let mut w = csv::Writer::from_writer(create(dir, "cdf.csv")?);
        w.write_record(["v", "empirical", "theory"])?;
        for i in 0..KS_GRID_POINTS {
            let v = -1.0 + 2.0 * i as f64 / (KS_GRID_POINTS - 1) as f64;
            w.write_record([
                fmt_f64(v),
                fmt_f64(self.empirical.cdf(v)),
                fmt_f64(self.theory.cdf(v)),
            ])?;
        }
        w.flush()?;
        write_summary(dir, &self.report)
    }
}

/// Limit law predicted for the configured walk: the free pushforward for a
/// homogeneous field, the bound-state atom plus the transported dispersive
/// part otherwise.
pub fn theoretical_law(cfg: &ExperimentConfig) -> Result<(VelocityMeasure, usize)> {
    let field = cfg.field()?;
    let psi0 = cfg.initial_state()?;
    let bands = BandDecomposition::new(field.limit(), cfg.grid_size)?;
    if field.is_homogeneous() {
        return Ok((velocity_pushforward(&psi0, &bands)?, 0));
    }
    cfg.ensure_inside_truncation(&psi0)?;
    let bs = cfg.bound_states(&field)?;
    let mu = perturbed_velocity_measure(&psi0, &field, &bands, &bs, cfg.wave_time())?;
    Ok((mu, bs.len()))
}

pub fn run_limit_compare(cfg: &ExperimentConfig) -> Result<LimitComparison> {
    cfg.validate()?;
    let field = cfg.field()?;
    let psi0 = cfg.initial_state()?;
    let (theory, bound_states) = theoretical_law(cfg)?;
    let law = psi0
        .evolve(&field, cfg.horizon, Direction::Forward)
        .position_distribution()?;
    let (report, empirical) = compare_laws(&law, &theory, cfg.trap_radius, bound_states)?;
    Ok(LimitComparison {
        report,
        empirical,
        theory,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub decreasing: bool,
    pub final_residual: Option<f64>,
    /// Set when the residuals fail to decrease, as expected for bound-state
    /// input.
    pub flagged: bool,
}

impl ProbeSummary {
    fn of(probe: &WaveProbe) -> Self {
        let decreasing = probe.is_decreasing();
        ProbeSummary {
            decreasing,
            final_residual: probe.final_residual(),
            flagged: !decreasing,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WaveProbeRun {
    pub forward: WaveProbe,
    pub backward: WaveProbe,
    pub backward_input: BackwardInput,
}

impl WaveProbeRun {
    /// Writes `wave_probe_forward.csv`, `wave_probe_backward.csv` and
    /// `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.forward
            .write_csv(create(dir, "wave_probe_forward.csv")?)?;
        self.backward
            .write_csv(create(dir, "wave_probe_backward.csv")?)?;
        #[derive(Serialize)]
        struct Summary {
            times: Vec<usize>,
            forward: ProbeSummary,
            backward: ProbeSummary,
            backward_input: BackwardInput,
        }
        write_summary(
            dir,
            &Summary {
                times: self.forward.times.clone(),
                forward: ProbeSummary::of(&self.forward),
                backward: ProbeSummary::of(&self.backward),
                backward_input: self.backward_input,
            },
        )
    }
}

pub fn run_wave_probe(cfg: &ExperimentConfig) -> Result<WaveProbeRun> {
    cfg.validate()?;
    let field = cfg.field()?;
    let psi0 = cfg.initial_state()?;
    let backward_psi = match cfg.backward_input {
        BackwardInput::Initial => psi0.clone(),
        BackwardInput::Dispersive => {
            cfg.ensure_inside_truncation(&psi0)?;
            cfg.bound_states(&field)?.remove_bound_part(&psi0)
        }
        BackwardInput::BoundState => cfg
            .bound_states(&field)?
            .states()
            .first()
            .map(|b| b.vector.clone())
            .ok_or_else(|| Error::NumericalCheck("the field has no bound state to probe".into()))?,
    };
    let (forward, backward) = rayon::join(
        || WaveProbe::run(&psi0, &field, &cfg.probe_times, WaveDirection::Forward),
        || {
            WaveProbe::run(
                &backward_psi,
                &field,
                &cfg.probe_times,
                WaveDirection::Backward,
            )
        },
    );
    Ok(WaveProbeRun {
        forward: forward?,
        backward: backward?,
        backward_input: cfg.backward_input,
    })
}

#[derive(Clone, Debug)]
pub struct SpectrumRun {
    pub bound_states: BoundStateSet,
    pub point_mass_weight: f64,
    /// Time-averaged trapped probability, when an averaging window is set.
    pub trapped_average: Option<f64>,
    /// `max ‖Uηₙ − e^{iθₙ}ηₙ‖` on the infinite lattice.
    pub max_eigen_residual: f64,
}

impl SpectrumRun {
    /// Writes `bound_states.json`, one `bound_state_<n>.csv` per state and
    /// `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.bound_states.write_json(dir)?;
        #[derive(Serialize)]
        struct Summary {
            count: usize,
            thetas: Vec<f64>,
            stability_shifts: Vec<f64>,
            point_mass_weight: f64,
            trapped_average: Option<f64>,
            max_eigen_residual: f64,
            half_width: usize,
            field_hash: String,
        }
        let states = self.bound_states.states();
        write_summary(
            dir,
            &Summary {
                count: states.len(),
                thetas: states.iter().map(|b| b.theta).collect(),
                stability_shifts: states.iter().map(|b| b.stability_shift).collect(),
                point_mass_weight: self.point_mass_weight,
                trapped_average: self.trapped_average,
                max_eigen_residual: self.max_eigen_residual,
                half_width: self.bound_states.half_width(),
                field_hash: self.bound_states.field_hash().to_string(),
            },
        )
    }
}

pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumRun> {
    cfg.validate()?;
    let field = cfg.field()?;
    let psi0 = cfg.initial_state()?;
    cfg.ensure_inside_truncation(&psi0)?;
    let trunc = TruncatedEvolution::build(&field, cfg.truncation, cfg.boundary)?;
    let bound_states = point_spectrum(&trunc, &field)?;
    let weight = point_mass_weight(&bound_states, &field, &psi0)?;
    let max_eigen_residual = bound_states
        .states()
        .iter()
        .map(|b| b.eigen_residual(&field))
        .fold(0.0, f64::max);
    let trapped_average = cfg
        .average_window
        .map(|w| trapped_time_average(&psi0, &field, cfg.trap_radius, w));
    Ok(SpectrumRun {
        bound_states,
        point_mass_weight: weight,
        trapped_average,
        max_eigen_residual,
    })
}

#[derive(Clone, Debug)]
pub struct TraceNormRun {
    pub diagnostic: TraceNormDiagnostic,
}

impl TraceNormRun {
    /// Writes `trace_norm.csv` and `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let d = &self.diagnostic;
        d.write_csv(create(dir, "trace_norm.csv")?)?;
        #[derive(Serialize)]
        struct Summary {
            radius: u64,
            partial_sum: f64,
            bound: Option<f64>,
            origin_term: f64,
            total: f64,
            monotone: bool,
            within_bound: bool,
        }
        write_summary(
            dir,
            &Summary {
                radius: d.radius(),
                partial_sum: d.partial_sum(),
                bound: d.rows.last().and_then(|r| r.bound),
                origin_term: d.origin_term,
                total: d.total(),
                monotone: d.is_monotone(),
                within_bound: d.within_bound(),
            },
        )
    }
}

pub fn run_trace_norm(cfg: &ExperimentConfig) -> Result<TraceNormRun> {
    cfg.validate()?;
    let field = cfg.field()?;
    Ok(TraceNormRun {
        diagnostic: trace_norm_partial(&field, cfg.trace_radius),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Evolve,
    LimitCompare,
    WaveProbe,
    Spectrum,
    TraceNorm,
}

/// Runs one experiment and writes its outputs into `out`.
pub fn run_and_write(kind: Experiment, cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    match kind {
        Experiment::Evolve => run_evolution(cfg)?.write(out),
        Experiment::LimitCompare => run_limit_compare(cfg)?.write(out),
        Experiment::WaveProbe => run_wave_probe(cfg)?.write(out),
        Experiment::Spectrum => run_spectrum(cfg)?.write(out),
        Experiment::TraceNorm => run_trace_norm(cfg)?.write(out),
    }
}

/// Runs independent experiments on the rayon pool. Results come back in input
/// order.
pub fn run_batch(jobs: &[(Experiment, ExperimentConfig, PathBuf)]) -> Vec<Result<()>> {
    jobs.par_iter()
        .map(|(kind, cfg, out)| run_and_write(*kind, cfg, out))
        .collect()
}
