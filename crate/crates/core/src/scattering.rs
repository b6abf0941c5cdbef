//! Finite-time wave operators and the limit law of the perturbed walk.
//!
//! `W_t = U^{−t} U₀^t` converges strongly as `t → ∞` when `U − U₀` is trace
//! class; its adjoint limit `U₀^{−t} U^t` on the absolutely continuous
//! subspace of `U` transports the dispersive part of an initial state to the
//! free walk, where the limit velocity law is known from the band structure.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::coin::CoinField;
use crate::error::{Error, Result};
use crate::measure::VelocityMeasure;
use crate::momentum::{pushforward_unnormalized, BandDecomposition};
use crate::spectral::BoundStateSet;
use crate::walk::{fmt_f64, Direction, WalkState};

/// Default probe schedule.
pub const DEFAULT_PROBE_TIMES: [usize; 5] = [64, 128, 256, 512, 1024];

/// Tolerance on the total mass of the mixture law.
pub const MIXTURE_MASS_TOL: f64 = 1e-6;

/// `W_t ψ = U^{−t}(U₀^t ψ)`: `t` free steps forward, then `t` perturbed steps
/// back. A homogeneous field gives `ψ` itself.
pub fn wave_forward(psi: &WalkState, field: &CoinField, t: usize) -> WalkState {
    if field.is_homogeneous() {
        return psi.clone();
    }
    psi.evolve(&field.free(), t, Direction::Forward)
        .evolve(field, t, Direction::Backward)
}

/// `U₀^{−t}(U^t ψ)`. A homogeneous field gives `ψ` itself.
pub fn wave_backward(psi: &WalkState, field: &CoinField, t: usize) -> WalkState {
    if field.is_homogeneous() {
        return psi.clone();
    }
    psi.evolve(field, t, Direction::Forward)
        .evolve(&field.free(), t, Direction::Backward)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveDirection {
    /// `U^{−t} U₀^t`
    Forward,
    /// `U₀^{−t} U^t`
    Backward,
}

/// Cauchy probe of a finite-time wave operator along increasing times.
#[derive(Clone, Debug)]
pub struct WaveProbe {
    pub direction: WaveDirection,
    pub times: Vec<usize>,
    pub vectors: Vec<WalkState>,
    /// `residuals[i] = ‖W_{t_{i+1}}ψ − W_{t_i}ψ‖`, reported at `t_{i+1}`.
    pub residuals: Vec<f64>,
    pub norms: Vec<f64>,
}

impl WaveProbe {
    /// Applies the wave operator at every time (independently, in parallel).
    pub fn run(
        psi: &WalkState,
        field: &CoinField,
        times: &[usize],
        direction: WaveDirection,
    ) -> Result<Self> {
        if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "probe times must be nonempty and strictly increasing".into(),
            ));
        }
        let vectors: Vec<WalkState> = times
            .par_iter()
            .map(|&t| match direction {
                WaveDirection::Forward => wave_forward(psi, field, t),
                WaveDirection::Backward => wave_backward(psi, field, t),
            })
            .collect();
        let residuals = vectors.windows(2).map(|w| w[1].distance(&w[0])).collect();
        let norms = vectors.iter().map(WalkState::norm).collect();
        Ok(WaveProbe {
            direction,
            times: times.to_vec(),
            vectors,
            residuals,
            norms,
        })
    }

    /// True when the residual sequence is strictly decreasing.
    pub fn is_decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] < w[0])
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }

    /// CSV columns `t,residual,norm`. The first probe time has no residual
    /// and reports an empty field.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "residual", "norm"])?;
        for (i, (&t, &norm)) in self.times.iter().zip(&self.norms).enumerate() {
            let residual = if i == 0 {
                String::new()
            } else {
                fmt_f64(self.residuals[i - 1])
            };
            w.write_record([t.to_string(), residual, fmt_f64(norm)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `‖U(W_tψ) − W_t(U₀ψ)‖`, the finite-time defect of `UW₊ = W₊U₀`.
pub fn intertwining_residual(psi: &WalkState, field: &CoinField, t: usize) -> f64 {
    let left = wave_forward(psi, field, t).step_forward(field);
    let right = wave_forward(&psi.step_forward(&field.free()), field, t);
    left.distance(&right)
}

/// Limit law of `Xₜ/t` for the perturbed walk:
/// `‖Π_p(U)Ψ₀‖² δ₀ + ‖E_{v̂₀}(·) W₊* Π_ac(U)Ψ₀‖²`.
///
/// `Π_ac(U)Ψ₀` is taken as `Ψ₀` minus its projection on the bound states and
/// `W₊*` is approximated by `U₀^{−t}U^t`. The dispersive part is rescaled to
/// carry exactly the mass `1 − ‖Π_pΨ₀‖²`.
pub fn perturbed_velocity_measure(
    psi0: &WalkState,
    field: &CoinField,
    bands: &BandDecomposition,
    bound_states: &BoundStateSet,
    t: usize,
) -> Result<VelocityMeasure> {
    psi0.ensure_normalized()?;
    bound_states.ensure_field(field)?;
    bands.ensure_nondegenerate()?;

    let atom = bound_states.point_mass_weight_unchecked(psi0);
    let dispersive = bound_states.remove_bound_part(psi0);
    let transported = wave_backward(&dispersive, field, t);
    let ac = pushforward_unnormalized(&transported, bands)?;

    let ac_target = (1.0 - atom).max(0.0);
    let ac_mass = ac.total_mass();
    let ac = if ac_mass > 0.0 {
        ac.scale_cloud(ac_target / ac_mass)?
    } else {
        ac
    };
    let mu = if atom > 0.0 {
        ac.with_atom(0.0, atom)?
    } else {
        ac
    };
    let total = mu.total_mass();
    if !((total - 1.0).abs() <= MIXTURE_MASS_TOL) {
        return Err(Error::NumericalCheck(format!(
            "mixture law has total mass {total}"
        )));
    }
    Ok(mu)
}

/// One row of the trace-norm diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceNormRow {
    pub radius: u64,
    /// `Σ_{0<|x|≤X} Σᵢ √tᵢ(x)`, `tᵢ(x)` the eigenvalues of `(C(x)−C₀)*(C(x)−C₀)`.
    pub partial_sum: f64,
    /// `2c₁ Σ_{0<|x|≤X} |x|^{−1−ε}` when decay parameters are known.
    pub bound: Option<f64>,
}

/// Partial sums of the trace norm of `U − U₀` over growing radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceNormDiagnostic {
    pub rows: Vec<TraceNormRow>,
    /// Singular-value sum of `C(0) − C₀`, excluded from the partial sums.
    pub origin_term: f64,
}

impl TraceNormDiagnostic {
    pub fn radius(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.radius)
    }

    pub fn partial_sum(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.partial_sum)
    }

    /// Full `Tr|C − C₀|` up to the largest radius, origin included.
    pub fn total(&self) -> f64 {
        self.partial_sum() + self.origin_term
    }

    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].partial_sum >= w[0].partial_sum)
    }

    /// True when every partial sum respects its bound (vacuous without decay
    /// parameters).
    pub fn within_bound(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.bound.is_none_or(|b| r.partial_sum <= b))
    }

    /// CSV columns `X,partial_sum,bound`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["X", "partial_sum", "bound"])?;
        for r in &self.rows {
            w.write_record([
                r.radius.to_string(),
                fmt_f64(r.partial_sum),
                r.bound.map(fmt_f64).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Trace-norm partial sums for every radius `X = 1..=radius`.
pub fn trace_norm_partial(field: &CoinField, radius: u64) -> TraceNormDiagnostic {
    let limit = field.limit();
    let site_term = |x: i64| {
        let (s1, s2) = field.coin(x).mat().sub(limit.mat()).singular_values();
        s1 + s2
    };
    let decay = field.decay_params();
    let mut sum = 0.0;
    let mut bound = 0.0;
    let rows = (1..=radius)
        .map(|r| {
            let x = r as i64;
            sum += site_term(x) + site_term(-x);
            let bound = decay.map(|p| {
                bound += 2.0 * p.c1 * 2.0 * (r as f64).powf(-1.0 - p.eps);
                bound
            });
            TraceNormRow {
                radius: r,
                partial_sum: sum,
                bound,
            }
        })
        .collect();
    TraceNormDiagnostic {
        rows,
        origin_term: site_term(0),
    }
}
