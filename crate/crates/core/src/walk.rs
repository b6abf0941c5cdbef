//! Walk states on an expanding support window and their exact evolution.
//!
//! A state stores amplitudes only on an integer window `[x_min, x_max]`;
//! every site outside carries exactly zero. Since the walk moves at most one
//! site per step, growing the window by one site on each side per step keeps
//! the dynamics exact with no truncation.

use std::io::{Read, Write};

use serde::Serialize;

use crate::coin::{CoinField, CoinMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Internal state `(Ψ⁽⁰⁾(x), Ψ⁽¹⁾(x))` at one site.
pub type Spinor = [C64; 2];

const ZERO_SPINOR: Spinor = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

/// Tolerance on `|‖Ψ‖² − 1|` for a state to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// A finitely supported element of `ℓ²(Z; C²)` with an integer time tag.
///
/// The time counts net applications of `U` (backward steps decrement it).
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    x_min: i64,
    amps: Vec<Spinor>,
    time: i64,
}

impl WalkState {
    pub fn new(x_min: i64, amps: Vec<Spinor>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(WalkState {
            x_min,
            amps,
            time: 0,
        })
    }

    /// `δ_site ⊗ spinor`.
    pub fn localized(site: i64, spinor: Spinor) -> Self {
        WalkState {
            x_min: site,
            amps: vec![spinor],
            time: 0,
        }
    }

    pub fn from_fn(x_min: i64, x_max: i64, f: impl FnMut(i64) -> Spinor) -> Result<Self> {
        if x_max < x_min {
            return Err(Error::EmptyWindow);
        }
        Self::new(x_min, (x_min..=x_max).map(f).collect())
    }

    /// Normalized Gaussian-modulated plane wave
    /// `Ψ(x) ∝ exp(−(x−x₀)²/(4σ²) + i k₀ x) · spinor`.
    ///
    /// The window extends `ceil(13σ)` sites on each side of the centre, where
    /// the envelope has dropped below 1e-18.
    pub fn gaussian_packet(center: i64, width: f64, momentum: f64, spinor: Spinor) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "packet width must be positive, got {width}"
            )));
        }
        let norm = (spinor[0].norm_sqr() + spinor[1].norm_sqr()).sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("packet spinor is zero".into()));
        }
        let radius = (13.0 * width).ceil() as i64;
        let mut state = Self::from_fn(center - radius, center + radius, |x| {
            let d = (x - center) as f64;
            let env = (-d * d / (4.0 * width * width)).exp();
            let phase = C64::from_polar(env / norm, momentum * x as f64);
            [spinor[0] * phase, spinor[1] * phase]
        })?;
        state.normalize();
        Ok(state)
    }

    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.amps.len() as i64 - 1
    }

    pub fn window(&self) -> (i64, i64) {
        (self.x_min, self.x_max())
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn with_time(mut self, time: i64) -> Self {
        self.time = time;
        self
    }

    pub fn amplitudes(&self) -> &[Spinor] {
        &self.amps
    }

    /// Sites paired with their amplitudes.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Spinor)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, s)| (self.x_min + i as i64, s))
    }

    /// Amplitude at `x`, zero outside the window.
    pub fn get(&self, x: i64) -> Spinor {
        if x < self.x_min {
            return ZERO_SPINOR;
        }
        self.amps
            .get((x - self.x_min) as usize)
            .copied()
            .unwrap_or(ZERO_SPINOR)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|s| s[0].norm_sqr() + s[1].norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for s in &mut self.amps {
                s[0] /= n;
                s[1] /= n;
            }
        }
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if !((norm_sqr - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &WalkState) -> C64 {
        let lo = self.x_min.max(other.x_min);
        let hi = self.x_max().min(other.x_max());
        (lo..=hi)
            .map(|x| {
                let a = self.get(x);
                let b = other.get(x);
                a[0].conj() * b[0] + a[1].conj() * b[1]
            })
            .sum()
    }

    /// `self + scale · other` on the union of both windows.
    pub fn add_scaled(&self, scale: C64, other: &WalkState) -> WalkState {
        let lo = self.x_min.min(other.x_min);
        let hi = self.x_max().max(other.x_max());
        let amps = (lo..=hi)
            .map(|x| {
                let a = self.get(x);
                let b = other.get(x);
                [a[0] + scale * b[0], a[1] + scale * b[1]]
            })
            .collect();
        WalkState {
            x_min: lo,
            amps,
            time: self.time,
        }
    }

    pub fn scaled(&self, scale: C64) -> WalkState {
        WalkState {
            x_min: self.x_min,
            amps: self
                .amps
                .iter()
                .map(|s| [s[0] * scale, s[1] * scale])
                .collect(),
            time: self.time,
        }
    }

    /// `‖self − other‖`, treating both as elements of `ℓ²(Z; C²)`.
    pub fn distance(&self, other: &WalkState) -> f64 {
        let lo = self.x_min.min(other.x_min);
        let hi = self.x_max().max(other.x_max());
        (lo..=hi)
            .map(|x| {
                let a = self.get(x);
                let b = other.get(x);
                (a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// The same vector on the larger window `[lo, hi] ⊇ window`.
    pub fn padded(&self, lo: i64, hi: i64) -> WalkState {
        let lo = lo.min(self.x_min);
        let hi = hi.max(self.x_max());
        WalkState {
            x_min: lo,
            amps: (lo..=hi).map(|x| self.get(x)).collect(),
            time: self.time,
        }
    }

    /// Drops boundary sites whose amplitudes are exactly zero, keeping at
    /// least one site.
    pub fn trimmed(&self) -> WalkState {
        let is_zero = |s: &Spinor| s[0] == C64::new(0.0, 0.0) && s[1] == C64::new(0.0, 0.0);
        let first = self.amps.iter().position(|s| !is_zero(s));
        let Some(first) = first else {
            return WalkState {
                x_min: self.x_min,
                amps: vec![ZERO_SPINOR],
                time: self.time,
            };
        };
        let last = self.amps.iter().rposition(|s| !is_zero(s)).unwrap_or(first);
        WalkState {
            x_min: self.x_min + first as i64,
            amps: self.amps[first..=last].to_vec(),
            time: self.time,
        }
    }

    /// `UΨ`: `(UΨ)(x) = P(x+1)Ψ(x+1) + Q(x−1)Ψ(x−1)`. The window grows by
    /// one site on each side.
    pub fn step_forward(&self, field: &CoinField) -> WalkState {
        let coins = CoinTable::new(field, self.x_min, self.x_max());
        self.step_forward_with(&coins)
    }

    /// `U⁻¹Ψ = C* S* Ψ`. The window grows by one site on each side.
    pub fn step_backward(&self, field: &CoinField) -> WalkState {
        let coins = CoinTable::new(field, self.x_min - 1, self.x_max() + 1);
        self.step_backward_with(&coins)
    }

    /// `n` steps in the given direction.
    pub fn evolve(&self, field: &CoinField, n: usize, direction: Direction) -> WalkState {
        let reach = n as i64;
        let coins = CoinTable::new(field, self.x_min - reach, self.x_max() + reach);
        let mut state = self.clone();
        for _ in 0..n {
            state = match direction {
                Direction::Forward => state.step_forward_with(&coins),
                Direction::Backward => state.step_backward_with(&coins),
            };
        }
        state
    }

    /// Evolves forward and hands each intermediate state (including the
    /// initial one) to `visit`.
    pub fn evolve_visit(
        &self,
        field: &CoinField,
        n: usize,
        mut visit: impl FnMut(&WalkState),
    ) -> WalkState {
        let reach = n as i64;
        let coins = CoinTable::new(field, self.x_min - reach, self.x_max() + reach);
        let mut state = self.clone();
        visit(&state);
        for _ in 0..n {
            state = state.step_forward_with(&coins);
            visit(&state);
        }
        state
    }

    pub(crate) fn step_forward_with(&self, coins: &CoinTable) -> WalkState {
        let n = self.amps.len();
        let mut out = vec![ZERO_SPINOR; n + 2];
        // Site x = x_min + i sends its upper component to x − 1 (index i in
        // the new window) and its lower component to x + 1 (index i + 2).
        // Each output slot receives exactly one contribution.
        for (i, psi) in self.amps.iter().enumerate() {
            let phi = coins.get(self.x_min + i as i64).apply(*psi);
            out[i][0] = phi[0];
            out[i + 2][1] = phi[1];
        }
        WalkState {
            x_min: self.x_min - 1,
            amps: out,
            time: self.time + 1,
        }
    }

    pub(crate) fn step_backward_with(&self, coins: &CoinTable) -> WalkState {
        let n = self.amps.len();
        let x_min = self.x_min - 1;
        // (S*Ψ)(y) = (Ψ⁰(y−1), Ψ¹(y+1)); new index j has y = x_min + j, so
        // Ψ⁰(y−1) sits at old index j − 2 and Ψ¹(y+1) at old index j.
        let out = (0..n + 2)
            .map(|j| {
                let upper = if j >= 2 {
                    self.amps[j - 2][0]
                } else {
                    C64::new(0.0, 0.0)
                };
                let lower = if j < n {
                    self.amps[j][1]
                } else {
                    C64::new(0.0, 0.0)
                };
                coins.get(x_min + j as i64).apply_adjoint([upper, lower])
            })
            .collect();
        WalkState {
            x_min,
            amps: out,
            time: self.time - 1,
        }
    }

    /// Law of the position, `P(x) = ‖Ψ(x)‖²`. Requires a normalized state.
    pub fn position_distribution(&self) -> Result<PositionDistribution> {
        self.ensure_normalized()?;
        Ok(PositionDistribution {
            x_min: self.x_min,
            probs: self
                .amps
                .iter()
                .map(|s| s[0].norm_sqr() + s[1].norm_sqr())
                .collect(),
            time: self.time,
        })
    }

    /// CSV with columns `x,re0,im0,re1,im1` (17 significant digits).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "re0", "im0", "re1", "im1"])?;
        for (x, s) in self.iter() {
            w.write_record([
                x.to_string(),
                fmt_f64(s[0].re),
                fmt_f64(s[0].im),
                fmt_f64(s[1].re),
                fmt_f64(s[1].im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV produced by [`WalkState::write_csv`]. Rows must list
    /// consecutive sites.
    pub fn read_csv<R: Read>(reader: R) -> Result<WalkState> {
        let mut r = csv::Reader::from_reader(reader);
        let mut x_min = None;
        let mut amps = Vec::new();
        for record in r.deserialize() {
            let (x, re0, im0, re1, im1): (i64, f64, f64, f64, f64) = record?;
            let start = *x_min.get_or_insert(x);
            if x != start + amps.len() as i64 {
                return Err(Error::InvalidParameter(format!(
                    "state CSV rows must be consecutive sites, found x = {x}"
                )));
            }
            amps.push([C64::new(re0, im0), C64::new(re1, im1)]);
        }
        WalkState::new(x_min.unwrap_or(0), amps)
    }
}

/// Formats a float with 17 significant digits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Coins cached over a fixed site range for repeated stepping.
pub(crate) struct CoinTable {
    x_min: i64,
    coins: Vec<CoinMatrix>,
    limit: CoinMatrix,
}

impl CoinTable {
    pub(crate) fn new(field: &CoinField, x_min: i64, x_max: i64) -> Self {
        CoinTable {
            x_min,
            coins: field.coins_on(x_min, x_max),
            limit: *field.limit(),
        }
    }

    #[inline]
    fn get(&self, x: i64) -> &CoinMatrix {
        // Only homogeneous tails can fall outside the table when it is built
        // for the reachable range.
        let i = x - self.x_min;
        if i < 0 {
            return &self.limit;
        }
        self.coins.get(i as usize).unwrap_or(&self.limit)
    }
}

/// Law of the walker's position at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistribution {
    x_min: i64,
    probs: Vec<f64>,
    time: i64,
}

impl PositionDistribution {
    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn window(&self) -> (i64, i64) {
        (self.x_min, self.x_min + self.probs.len() as i64 - 1)
    }

    pub fn get(&self, x: i64) -> f64 {
        if x < self.x_min {
            return 0.0;
        }
        self.probs
            .get((x - self.x_min) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.x_min + i as i64, *p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `E[f(X)]`.
    pub fn expect(&self, mut f: impl FnMut(i64) -> f64) -> f64 {
        self.iter().map(|(x, p)| p * f(x)).sum()
    }

    /// `E[(X/t)^m]`; `None` at `t = 0`.
    pub fn scaled_moment(&self, m: i32) -> Option<f64> {
        if self.time == 0 {
            return None;
        }
        let t = self.time as f64;
        Some(self.expect(|x| (x as f64 / t).powi(m)))
    }

    /// Mass on `|x| <= radius`.
    pub fn mass_within(&self, radius: i64) -> f64 {
        self.iter()
            .filter(|(x, _)| x.abs() <= radius)
            .map(|(_, p)| p)
            .sum()
    }

    /// CSV with columns `x,probability`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "probability"])?;
        for (x, p) in self.iter() {
            w.write_record([x.to_string(), fmt_f64(p)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::CoinMatrix;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn up() -> Spinor {
        [c(1.0, 0.0), c(0.0, 0.0)]
    }

    fn hadamard() -> CoinField {
        CoinField::homogeneous(CoinMatrix::hadamard())
    }

    #[test]
    fn hadamard_one_step() {
        let s = WalkState::localized(0, up()).step_forward(&hadamard());
        assert_eq!(s.window(), (-1, 1));
        assert_eq!(s.time(), 1);
        let h = FRAC_1_SQRT_2;
        assert!((s.get(-1)[0] - c(h, 0.0)).norm() < 1e-15);
        assert_eq!(s.get(-1)[1], c(0.0, 0.0));
        assert_eq!(s.get(0), ZERO_SPINOR);
        assert_eq!(s.get(1)[0], c(0.0, 0.0));
        assert!((s.get(1)[1] - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_x_one_step() {
        let field = CoinField::homogeneous(CoinMatrix::pauli_x());
        let s = WalkState::localized(0, up()).step_forward(&field);
        assert_eq!(s.get(1), [c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(s.get(-1), ZERO_SPINOR);
        assert_eq!(s.get(0), ZERO_SPINOR);
    }

    #[test]
    fn two_hadamard_steps() {
        let s = WalkState::localized(0, up()).evolve(&hadamard(), 2, Direction::Forward);
        let p = s.position_distribution().unwrap();
        assert_eq!(p.time(), 2);
        for (x, want) in [(-2, 0.25), (-1, 0.0), (0, 0.5), (1, 0.0), (2, 0.25)] {
            assert!((p.get(x) - want).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn backward_inverts_examples() {
        let h = FRAC_1_SQRT_2;
        let psi = WalkState::new(
            -1,
            vec![
                [c(h, 0.0), c(0.0, 0.0)],
                ZERO_SPINOR,
                [c(0.0, 0.0), c(h, 0.0)],
            ],
        )
        .unwrap();
        let back = psi.step_backward(&hadamard());
        let want = WalkState::localized(0, up());
        assert!(back.distance(&want) < 1e-15);
        assert_eq!(back.trimmed().window(), (0, 0));

        let sx = CoinField::homogeneous(CoinMatrix::pauli_x());
        let back = WalkState::localized(1, [c(0.0, 0.0), c(1.0, 0.0)]).step_backward(&sx);
        assert!(back.distance(&want) < 1e-15);
    }

    #[test]
    fn evolve_zero_is_identity() {
        let s = WalkState::localized(3, up());
        assert_eq!(s.evolve(&hadamard(), 0, Direction::Forward), s);
    }

    #[test]
    fn pauli_x_bounces() {
        let field = CoinField::homogeneous(CoinMatrix::pauli_x());
        let s = WalkState::localized(0, up()).evolve(&field, 2, Direction::Forward);
        let t = s.trimmed();
        assert_eq!(t.window(), (0, 0));
        assert_eq!(t.get(0), up());
    }

    #[test]
    fn pauli_z_transports_left() {
        let field = CoinField::homogeneous(CoinMatrix::pauli_z());
        let s = WalkState::localized(0, up()).evolve(&field, 100, Direction::Forward);
        let p = s.position_distribution().unwrap();
        assert_eq!(p.get(-100), 1.0);
        assert_eq!(p.total(), 1.0);
    }

    #[test]
    fn position_distribution_rejects_unnormalized() {
        let s = WalkState::localized(0, [c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            s.position_distribution(),
            Err(Error::NotNormalized { .. })
        ));
        let p = WalkState::localized(7, up())
            .position_distribution()
            .unwrap();
        assert_eq!(p.get(7), 1.0);
    }

    #[test]
    fn packet_is_normalized() {
        let s = WalkState::gaussian_packet(5, 10.0, 1.0, [c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(s.window(), (5 - 130, 5 + 130));
        assert!(s.get(5 + 130)[0].norm() < 1e-18);
        assert!(WalkState::gaussian_packet(0, 0.0, 0.0, up()).is_err());
    }

    #[test]
    fn empty_window_rejected() {
        assert!(matches!(WalkState::new(0, vec![]), Err(Error::EmptyWindow)));
        assert!(WalkState::from_fn(2, 1, |_| up()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = WalkState::gaussian_packet(-3, 2.0, 0.7, [c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,re0,im0,re1,im1\n"));
        let back = WalkState::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.amplitudes(), s.amplitudes());
        assert_eq!(back.window(), s.window());
    }

    #[test]
    fn inner_and_add_scaled() {
        let a = WalkState::localized(0, up());
        let b = WalkState::localized(2, [c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(a.inner(&b), c(0.0, 0.0));
        let s = a.add_scaled(c(2.0, 0.0), &b);
        assert_eq!(s.window(), (0, 2));
        assert!((s.norm_sqr() - 5.0).abs() < 1e-15);
        assert_eq!(s.inner(&b), c(2.0, 0.0));
    }
}
