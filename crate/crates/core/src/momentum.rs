//! Band structure of the homogeneous walk and its limit velocity law.
//!
//! In momentum space `U₀` acts at each `k` as the 2×2 unitary symbol
//! `Û₀(k) = diag(e^{ik}, e^{−ik}) C₀`. Its eigenpairs `(λⱼ(k), uⱼ(k))` form two
//! bands; the group velocity of band `j` is `iλⱼ′(k)/λⱼ(k)`. Differentiating
//! the symbol gives `Û₀′(k) = iσ₃Û₀(k)`, so by Hellmann–Feynman the velocity
//! is `−⟨uⱼ(k), σ₃uⱼ(k)⟩ = |uⱼ⁽¹⁾|² − |uⱼ⁽⁰⁾|²`, with no derivative needed.
//!
//! The free walk started from `Ψ₀` satisfies `Xₜ/t → V₀` in law, where `V₀`
//! has law `Σⱼ ∫ |⟨uⱼ(k), Ψ̂₀(k)⟩|² δ_{vⱼ(k)} dk/2π`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::coin::{CoinMatrix, Mat2};
use crate::error::{Error, Result};
use crate::measure::VelocityMeasure;
use crate::walk::{fmt_f64, Spinor, WalkState};
use crate::C64;

/// Eigenvalue gaps below this count as a band crossing.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Default number of momentum grid points.
pub const DEFAULT_GRID: usize = 1 << 14;

/// A band whose velocity varies by less than this over the grid is flat and
/// becomes an atom of the velocity law.
pub const FLAT_BAND_TOL: f64 = 1e-10;

/// `Û₀(k) = diag(e^{ik}, e^{−ik}) C₀`.
pub fn symbol(k: f64, coin: &CoinMatrix) -> CoinMatrix {
    let phases = Mat2::diag(C64::from_polar(1.0, k), C64::from_polar(1.0, -k));
    CoinMatrix::from_mat_unchecked(phases.mul(coin.mat()))
}

/// Eigenpairs of a 2×2 unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolEigen {
    pub values: [C64; 2],
    pub vectors: [Spinor; 2],
    /// `|λ₁ − λ₂|`.
    pub gap: f64,
}

impl SymbolEigen {
    pub fn is_degenerate(&self) -> bool {
        !(self.gap >= DEGENERACY_TOL)
    }
}

/// Closed-form eigensolve of a 2×2 unitary.
///
/// `λⱼ = tr/2 + (−1)ʲ √(tr²/4 − det)` with the principal square root; for the
/// Hadamard symbol this reproduces `λⱼ(k) = ((−1)ʲ w(k) + i sin k)/√2`.
/// Returns [`Error::DegenerateBands`] when the gap is below
/// [`DEGENERACY_TOL`].
pub fn eigendecompose_symbol(m: &CoinMatrix) -> Result<SymbolEigen> {
    let eig = eigen_unchecked(m.mat());
    if eig.is_degenerate() {
        return Err(Error::DegenerateBands {
            k: f64::NAN,
            gap: eig.gap,
        });
    }
    Ok(eig)
}

/// As [`eigendecompose_symbol`], but a degenerate (necessarily scalar) matrix
/// yields the standard basis instead of an error.
pub(crate) fn eigen_unchecked(m: &Mat2) -> SymbolEigen {
    let half_tr = 0.5 * m.trace();
    let root = (half_tr * half_tr - m.det()).sqrt();
    let values = [half_tr - root, half_tr + root];
    let gap = (values[0] - values[1]).norm();
    if !(gap >= DEGENERACY_TOL) {
        return SymbolEigen {
            values,
            vectors: [
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            ],
            gap,
        };
    }
    let vectors = values.map(|lambda| eigenvector(m, lambda));
    SymbolEigen {
        values,
        vectors,
        gap,
    }
}

/// Unit eigenvector for a simple eigenvalue: the better conditioned of the
/// two null vectors `(b, λ − a)` and `(λ − d, c)` of `M − λ`.
fn eigenvector(m: &Mat2, lambda: C64) -> Spinor {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let first = [b, lambda - a];
    let second = [lambda - d, c];
    let n1 = first[0].norm_sqr() + first[1].norm_sqr();
    let n2 = second[0].norm_sqr() + second[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (first, n1) } else { (second, n2) };
    let n = n.sqrt();
    [v[0] / n, v[1] / n]
}

/// `−⟨u, σ₃u⟩ / ‖u‖²`.
pub fn velocity_of(u: &Spinor) -> f64 {
    let up = u[0].norm_sqr();
    let down = u[1].norm_sqr();
    (down - up) / (down + up)
}

/// Band data at one momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSample {
    pub k: f64,
    pub lambda: [C64; 2],
    pub vectors: [Spinor; 2],
    pub velocity: [f64; 2],
    pub gap: f64,
}

impl SymbolSample {
    pub fn at(k: f64, coin: &CoinMatrix) -> Self {
        let eig = eigen_unchecked(symbol(k, coin).mat());
        SymbolSample {
            k,
            lambda: eig.values,
            vectors: eig.vectors,
            velocity: eig.vectors.map(|u| velocity_of(&u)),
            gap: eig.gap,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.gap >= DEGENERACY_TOL)
    }

    fn swap_bands(&mut self) {
        self.lambda.swap(0, 1);
        self.vectors.swap(0, 1);
        self.velocity.swap(0, 1);
    }
}

/// Group velocities `(v₁, v₂)` of a sample; rejects degenerate samples.
pub fn group_velocity(sample: &SymbolSample) -> Result<[f64; 2]> {
    if sample.is_degenerate() {
        return Err(Error::DegenerateBands {
            k: sample.k,
            gap: sample.gap,
        });
    }
    Ok(sample.vectors.map(|u| velocity_of(&u)))
}

fn inner(a: &Spinor, b: &Spinor) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Both bands sampled on the uniform midpoint grid `k_m = 2π(m + ½)/N`.
///
/// Labels follow the bands continuously along the grid (maximal overlap with
/// the previous point) and each eigenvector's phase is fixed so that
/// `⟨uⱼ(k_m), uⱼ(k_{m+1})⟩` is real and positive.
#[derive(Clone, Debug)]
pub struct BandDecomposition {
    coin: CoinMatrix,
    samples: Vec<SymbolSample>,
    min_gap: f64,
    min_gap_k: f64,
}

impl BandDecomposition {
    pub fn new(coin: &CoinMatrix, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "momentum grid needs at least 2 points, got {n}"
            )));
        }
        let mut samples: Vec<SymbolSample> = (0..n)
            .into_par_iter()
            .map(|m| SymbolSample::at(grid_point(m, n), coin))
            .collect();

        for m in 1..n {
            let (done, rest) = samples.split_at_mut(m);
            let prev = &done[m - 1];
            let cur = &mut rest[0];
            let direct = inner(&prev.vectors[0], &cur.vectors[0]).norm_sqr()
                + inner(&prev.vectors[1], &cur.vectors[1]).norm_sqr();
            let crossed = inner(&prev.vectors[0], &cur.vectors[1]).norm_sqr()
                + inner(&prev.vectors[1], &cur.vectors[0]).norm_sqr();
            if crossed > direct {
                cur.swap_bands();
            }
            for j in 0..2 {
                let overlap = inner(&prev.vectors[j], &cur.vectors[j]);
                let r = overlap.norm();
                if r > 0.0 {
                    let phase = overlap.conj() / r;
                    cur.vectors[j] = cur.vectors[j].map(|z| z * phase);
                }
            }
        }

        let (min_gap, min_gap_k) =
            samples
                .iter()
                .map(|s| (s.gap, s.k))
                .fold(
                    (f64::INFINITY, f64::NAN),
                    |acc, x| if x.0 < acc.0 { x } else { acc },
                );
        Ok(BandDecomposition {
            coin: *coin,
            samples,
            min_gap,
            min_gap_k,
        })
    }

    pub fn coin(&self) -> &CoinMatrix {
        &self.coin
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[SymbolSample] {
        &self.samples
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.samples.len() as f64
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.min_gap >= DEGENERACY_TOL)
    }

    pub fn ensure_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            return Err(Error::DegenerateBands {
                k: self.min_gap_k,
                gap: self.min_gap,
            });
        }
        Ok(())
    }

    /// `max_m ‖uⱼ(k_{m+1}) − uⱼ(k_m)‖` along the grid (no wrap-around).
    pub fn max_section_jump(&self, band: usize) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0].vectors[band], &w[1].vectors[band]);
                ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// CSV columns: `k, re(λ₁), im(λ₁), v₁, re/im of u₁ components`, then the
    /// same for band 2.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "k",
            "re_lambda1",
            "im_lambda1",
            "v1",
            "re_u1_0",
            "im_u1_0",
            "re_u1_1",
            "im_u1_1",
            "re_lambda2",
            "im_lambda2",
            "v2",
            "re_u2_0",
            "im_u2_0",
            "re_u2_1",
            "im_u2_1",
        ])?;
        for s in &self.samples {
            let mut row = vec![fmt_f64(s.k)];
            for j in 0..2 {
                row.push(fmt_f64(s.lambda[j].re));
                row.push(fmt_f64(s.lambda[j].im));
                row.push(fmt_f64(s.velocity[j]));
                for z in s.vectors[j] {
                    row.push(fmt_f64(z.re));
                    row.push(fmt_f64(z.im));
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `k_m = 2π(m + ½)/N`.
pub fn grid_point(m: usize, n: usize) -> f64 {
    2.0 * PI * (m as f64 + 0.5) / n as f64
}

/// `Ψ̂(k_m) = Σₓ e^{−i k_m x} Ψ(x)` on the midpoint grid, by FFT.
///
/// The window must fit in `n` sites so that distinct sites do not alias.
pub fn fourier_on_grid(state: &WalkState, n: usize) -> Result<Vec<Spinor>> {
    if state.len() > n {
        return Err(Error::GridTooCoarse {
            width: state.len(),
            grid: n,
        });
    }
    let nn = n as i64;
    let mut upper = vec![C64::new(0.0, 0.0); n];
    let mut lower = vec![C64::new(0.0, 0.0); n];
    for (x, s) in state.iter() {
        // the half-step shift of the grid becomes a modulation in x
        let twist = C64::from_polar(1.0, -PI * x as f64 / n as f64);
        let i = x.rem_euclid(nn) as usize;
        upper[i] = s[0] * twist;
        lower[i] = s[1] * twist;
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    fft.process(&mut upper);
    fft.process(&mut lower);
    Ok(upper.into_iter().zip(lower).map(|(a, b)| [a, b]).collect())
}

/// Pushforward of `‖Ψ̂(k)‖²dk/2π` onto velocities, for any (not necessarily
/// normalized) state. Total mass is `‖Ψ‖²` (discrete Parseval).
pub(crate) fn pushforward_unnormalized(
    state: &WalkState,
    bands: &BandDecomposition,
) -> Result<VelocityMeasure> {
    bands.ensure_nondegenerate()?;
    let n = bands.len();
    let psi_hat = fourier_on_grid(state, n)?;
    let scale = 1.0 / n as f64;
    let mut atoms = Vec::new();
    let mut cloud = Vec::new();
    for j in 0..2 {
        let weights: Vec<(f64, f64)> = bands
            .samples
            .iter()
            .zip(&psi_hat)
            .map(|(s, p)| (s.velocity[j], inner(&s.vectors[j], p).norm_sqr() * scale))
            .collect();
        let (lo, hi) = weights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(v, _)| {
                (lo.min(v), hi.max(v))
            });
        if hi - lo <= FLAT_BAND_TOL {
            // A flat band has λ(k) ∝ e^{−ivk}, and periodicity forces the
            // constant velocity to be −1, 0 or 1.
            let v = (0.5 * (lo + hi)).round();
            atoms.push((v, weights.iter().map(|&(_, w)| w).sum()));
        } else {
            cloud.extend(weights.into_iter().map(|(v, w)| (v.clamp(-1.0, 1.0), w)));
        }
    }
    VelocityMeasure::new(atoms, cloud)
}

/// Limit law of `Xₜ/t` for the free walk started from `psi0`.
pub fn velocity_pushforward(
    psi0: &WalkState,
    bands: &BandDecomposition,
) -> Result<VelocityMeasure> {
    psi0.ensure_normalized()?;
    pushforward_unnormalized(psi0, bands)
}

fn check_konno_parameter(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Konno parameter must lie in (0, 1), got {r}"
        )));
    }
    Ok(())
}

/// Konno density `√(1−r²) / (π(1−v²)√(r²−v²))` on `(−r, r)`, zero elsewhere.
pub fn konno_density(v: f64, r: f64) -> Result<f64> {
    check_konno_parameter(r)?;
    if v.abs() >= r {
        return Ok(0.0);
    }
    Ok((1.0 - r * r).sqrt() / (PI * (1.0 - v * v) * (r * r - v * v).sqrt()))
}

/// `∫_{−∞}^{v} f_K(u; r) du`.
///
/// With `u = r sin φ` the density becomes `√(1−r²)/(π(1 − r² sin²φ))`, whose
/// antiderivative is `arctan(√(1−r²) tan φ)/π`.
pub fn konno_cdf(v: f64, r: f64) -> Result<f64> {
    check_konno_parameter(r)?;
    if v <= -r {
        return Ok(0.0);
    }
    if v >= r {
        return Ok(1.0);
    }
    let phi = (v / r).asin();
    Ok(0.5 + ((1.0 - r * r).sqrt() * phi.tan()).atan() / PI)
}

/// `∫_{−∞}^{v} u f_K(u; r) du = −arctan(√(r²−v²)/√(1−r²))/π` on `(−r, r)`.
fn konno_first_moment_cdf(v: f64, r: f64) -> f64 {
    if v.abs() >= r {
        return 0.0;
    }
    -((r * r - v * v).sqrt() / (1.0 - r * r).sqrt()).atan() / PI
}

fn check_spinor(alpha: C64, beta: C64) -> Result<()> {
    let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
    if !((norm_sqr - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// `c_{α,β} = |α|² − |β|² + αβ̄ + ᾱβ`.
pub fn hadamard_asymmetry(alpha: C64, beta: C64) -> Result<f64> {
    check_spinor(alpha, beta)?;
    Ok(alpha.norm_sqr() - beta.norm_sqr() + 2.0 * (alpha * beta.conj()).re)
}

/// Limit density `(1 − c_{α,β} v) f_K(v; 1/√2)` of the Hadamard walk started
/// from `δ₀ ⊗ (α, β)`.
pub fn hadamard_limit_density(v: f64, alpha: C64, beta: C64) -> Result<f64> {
    let c = hadamard_asymmetry(alpha, beta)?;
    Ok((1.0 - c * v) * konno_density(v, FRAC_1_SQRT_2)?)
}

/// Distribution function of [`hadamard_limit_density`].
pub fn hadamard_limit_cdf(v: f64, alpha: C64, beta: C64) -> Result<f64> {
    let c = hadamard_asymmetry(alpha, beta)?;
    let r = FRAC_1_SQRT_2;
    Ok(konno_cdf(v, r)? - c * konno_first_moment_cdf(v, r))
}
