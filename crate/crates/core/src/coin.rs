//! Coin matrices and site-dependent coin fields.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::C64;

/// Entrywise tolerance on `C*C - I` for a matrix to count as unitary.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Absolute rounding allowance when comparing `‖C(x) − C₀‖` against the decay
/// bound; the difference of two unit-size matrices is only known to a few ulp.
pub const DECAY_CHECK_SLACK: f64 = 1e-15;

/// Sites `0 < |x| <= DECAY_CHECK_RADIUS` are sampled when validating a
/// user-supplied decay rule.
pub const DECAY_CHECK_RADIUS: i64 = 1024;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A general complex 2×2 matrix, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    #[inline]
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// `M* v` without forming the adjoint.
    #[inline]
    pub fn apply_adjoint(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0].conj() * v[0] + m[1][0].conj() * v[1],
            m[0][1].conj() * v[0] + m[1][1].conj() * v[1],
        ]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn sub(&self, rhs: &Mat2) -> Self {
        let mut out = self.0;
        for (row, rrow) in out.iter_mut().zip(rhs.0.iter()) {
            for (e, r) in row.iter_mut().zip(rrow.iter()) {
                *e -= r;
            }
        }
        Mat2(out)
    }

    pub fn add(&self, rhs: &Mat2) -> Self {
        let mut out = self.0;
        for (row, rrow) in out.iter_mut().zip(rhs.0.iter()) {
            for (e, r) in row.iter_mut().zip(rrow.iter()) {
                *e += r;
            }
        }
        Mat2(out)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Singular values `(s_max, s_min)`, i.e. square roots of the eigenvalues
    /// of `M*M`.
    ///
    /// `s_min` comes from `s₁ s₂ = |det M|` so it keeps full relative accuracy
    /// for nearly singular `M`.
    pub fn singular_values(&self) -> (f64, f64) {
        // eigenvalues of MM* = [[p, r], [r̄, q]], written without cancellation
        let m = self.0;
        let p = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let q = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let r = (m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj()).norm();
        let s_max = (0.5 * (p + q) + (0.5 * (p - q)).hypot(r)).sqrt();
        let s_min = if s_max > 0.0 {
            self.det().norm() / s_max
        } else {
            0.0
        };
        (s_max, s_min)
    }

    /// Operator norm on C².
    pub fn op_norm(&self) -> f64 {
        self.singular_values().0
    }

    /// Max entrywise deviation of `M*M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).sub(&Mat2::identity()).max_abs()
    }

    fn to_floats(self) -> [f64; 8] {
        let m = self.0;
        [
            m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im, m[1][0].re, m[1][0].im, m[1][1].re,
            m[1][1].im,
        ]
    }

    fn from_floats(f: [f64; 8]) -> Self {
        Mat2::new(
            C64::new(f[0], f[1]),
            C64::new(f[2], f[3]),
            C64::new(f[4], f[5]),
            C64::new(f[6], f[7]),
        )
    }
}

/// A 2×2 unitary coin `C = (a b; c d)`.
///
/// The unitarity invariant is checked on construction. `P` and `Q` are the
/// upper and lower rows of the coin; the upper row feeds the left-moving
/// component and the lower row the right-moving one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinMatrix(Mat2);

impl CoinMatrix {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        Self::from_mat(Mat2::new(a, b, c, d))
    }

    pub fn from_mat(m: Mat2) -> Result<Self> {
        let defect = m.unitarity_defect();
        if !(defect <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(CoinMatrix(m))
    }

    /// Wraps a matrix known to be unitary by construction (products of
    /// unitaries, phases).
    pub(crate) fn from_mat_unchecked(m: Mat2) -> Self {
        debug_assert!(m.unitarity_defect() < 1e-10);
        CoinMatrix(m)
    }

    pub fn hadamard() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        CoinMatrix(Mat2::new(h, h, h, -h))
    }

    pub fn identity() -> Self {
        CoinMatrix(Mat2::identity())
    }

    /// `σₓ = (0 1; 1 0)`.
    pub fn pauli_x() -> Self {
        CoinMatrix(Mat2::new(ZERO, ONE, ONE, ZERO))
    }

    /// `σ_z = diag(1, -1)`.
    pub fn pauli_z() -> Self {
        CoinMatrix(Mat2::diag(ONE, -ONE))
    }

    /// Real rotation `(cos θ  -sin θ; sin θ  cos θ)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        CoinMatrix(Mat2::new(
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ))
    }

    /// `diag(e^{iφ₀}, e^{iφ₁})`.
    pub fn phases(phi0: f64, phi1: f64) -> Self {
        CoinMatrix(Mat2::diag(
            C64::from_polar(1.0, phi0),
            C64::from_polar(1.0, phi1),
        ))
    }

    /// The general element of U(2):
    /// `e^{iγ} (cos θ e^{iα}  sin θ e^{iβ}; -sin θ e^{-iβ}  cos θ e^{-iα})`.
    pub fn from_angles(gamma: f64, theta: f64, alpha: f64, beta: f64) -> Self {
        let g = C64::from_polar(1.0, gamma);
        let (s, c) = theta.sin_cos();
        CoinMatrix(Mat2::new(
            g * C64::from_polar(c, alpha),
            g * C64::from_polar(s, beta),
            -g * C64::from_polar(s, -beta),
            g * C64::from_polar(c, -alpha),
        ))
    }

    #[inline]
    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn a(&self) -> C64 {
        self.0.get(0, 0)
    }

    pub fn b(&self) -> C64 {
        self.0.get(0, 1)
    }

    pub fn c(&self) -> C64 {
        self.0.get(1, 0)
    }

    pub fn d(&self) -> C64 {
        self.0.get(1, 1)
    }

    /// `P = (a b; 0 0)`.
    pub fn p_block(&self) -> Mat2 {
        Mat2::new(self.a(), self.b(), ZERO, ZERO)
    }

    /// `Q = (0 0; c d)`.
    pub fn q_block(&self) -> Mat2 {
        Mat2::new(ZERO, ZERO, self.c(), self.d())
    }

    #[inline]
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        self.0.apply(v)
    }

    #[inline]
    pub fn apply_adjoint(&self, v: [C64; 2]) -> [C64; 2] {
        self.0.apply_adjoint(v)
    }

    pub fn adjoint(&self) -> Self {
        CoinMatrix(self.0.adjoint())
    }

    pub fn mul(&self, rhs: &CoinMatrix) -> Self {
        CoinMatrix::from_mat_unchecked(self.0.mul(&rhs.0))
    }

    /// `‖self − other‖` in operator norm.
    pub fn distance(&self, other: &CoinMatrix) -> f64 {
        self.0.sub(&other.0).op_norm()
    }

    pub fn to_floats(self) -> [f64; 8] {
        self.0.to_floats()
    }

    pub fn from_floats(f: [f64; 8]) -> Result<Self> {
        Self::from_mat(Mat2::from_floats(f))
    }
}

/// Decay constants `(c₁, ε)` of `‖C(x) − C₀‖ ≤ c₁|x|^{−1−ε}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub c1: f64,
    pub eps: f64,
}

impl DecayParams {
    pub fn new(c1: f64, eps: f64) -> Result<Self> {
        if !(c1 > 0.0 && eps > 0.0 && c1.is_finite() && eps.is_finite()) {
            return Err(Error::InvalidDecayParams { c1, eps });
        }
        Ok(DecayParams { c1, eps })
    }

    /// `c₁|x|^{−1−ε}`; infinite at the origin.
    pub fn bound(&self, x: i64) -> f64 {
        if x == 0 {
            f64::INFINITY
        } else {
            self.c1 * (x.unsigned_abs() as f64).powf(-1.0 - self.eps)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Homogeneous,
    OneDefect,
    FiniteDefects,
    PowerDecay,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FieldKind::Homogeneous => "homogeneous",
            FieldKind::OneDefect => "one_defect",
            FieldKind::FiniteDefects => "finite_defects",
            FieldKind::PowerDecay => "power_decay",
        };
        f.write_str(s)
    }
}

/// Site rule for a custom power-decay field.
pub type DecayRuleFn = dyn Fn(i64) -> CoinMatrix + Send + Sync;

#[derive(Clone)]
enum Perturbation {
    None,
    Defects(BTreeMap<i64, CoinMatrix>),
    /// `C(x) = R(θₓ) C₀` with `θₓ = min(c₁|x|^{−1−ε}, π)`.
    Rotation,
    Custom(Arc<DecayRuleFn>),
}

/// The assignment `x ↦ C(x)` together with its homogeneous limit `C₀`.
#[derive(Clone)]
pub struct CoinField {
    limit: CoinMatrix,
    kind: FieldKind,
    decay: Option<DecayParams>,
    perturbation: Perturbation,
}

impl fmt::Debug for CoinField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoinField")
            .field("kind", &self.kind)
            .field("limit", &self.limit)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

impl CoinField {
    pub fn homogeneous(limit: CoinMatrix) -> Self {
        CoinField {
            limit,
            kind: FieldKind::Homogeneous,
            decay: None,
            perturbation: Perturbation::None,
        }
    }

    /// `C(0) = defect`, `C(x) = C₀` elsewhere.
    pub fn one_defect(limit: CoinMatrix, defect: CoinMatrix) -> Self {
        CoinField {
            limit,
            kind: FieldKind::OneDefect,
            decay: None,
            perturbation: Perturbation::Defects(BTreeMap::from([(0, defect)])),
        }
    }

    /// Finitely many sites carry their own coin. Later entries for the same
    /// site replace earlier ones.
    pub fn finite_defects(
        limit: CoinMatrix,
        defects: impl IntoIterator<Item = (i64, CoinMatrix)>,
    ) -> Self {
        CoinField {
            limit,
            kind: FieldKind::FiniteDefects,
            decay: None,
            perturbation: Perturbation::Defects(defects.into_iter().collect()),
        }
    }

    /// The default decaying family `C(x) = R(θₓ) C₀`, `θₓ = min(c₁|x|^{−1−ε}, π)`.
    pub fn power_decay(limit: CoinMatrix, params: DecayParams) -> Result<Self> {
        let params = DecayParams::new(params.c1, params.eps)?;
        Ok(CoinField {
            limit,
            kind: FieldKind::PowerDecay,
            decay: Some(params),
            perturbation: Perturbation::Rotation,
        })
    }

    /// A decaying field with a caller-supplied site rule. The rule is sampled
    /// on `0 < |x| <= DECAY_CHECK_RADIUS` (and at the origin) for unitarity and
    /// the decay bound.
    pub fn power_decay_with_rule<F>(limit: CoinMatrix, params: DecayParams, rule: F) -> Result<Self>
    where
        F: Fn(i64) -> CoinMatrix + Send + Sync + 'static,
    {
        let params = DecayParams::new(params.c1, params.eps)?;
        let field = CoinField {
            limit,
            kind: FieldKind::PowerDecay,
            decay: Some(params),
            perturbation: Perturbation::Custom(Arc::new(rule)),
        };
        let sites = (-DECAY_CHECK_RADIUS..=DECAY_CHECK_RADIUS).collect::<Vec<_>>();
        for &x in &sites {
            let defect = field.coin(x).mat().unitarity_defect();
            if !(defect <= UNITARITY_TOL) {
                return Err(Error::NotUnitary { defect });
            }
        }
        field.check_decay(sites)?;
        Ok(field)
    }

    /// Attaches decay constants to a defect field and validates them on every
    /// defect site.
    pub fn with_decay_params(mut self, params: DecayParams) -> Result<Self> {
        let params = DecayParams::new(params.c1, params.eps)?;
        self.decay = Some(params);
        let sites = match &self.perturbation {
            Perturbation::Defects(map) => map.keys().copied().collect(),
            _ => (-DECAY_CHECK_RADIUS..=DECAY_CHECK_RADIUS).collect::<Vec<_>>(),
        };
        self.check_decay(sites)?;
        Ok(self)
    }

    /// Checks `‖C(x) − C₀‖ ≤ c₁|x|^{−1−ε}` on the given sites (the origin is
    /// skipped), up to [`DECAY_CHECK_SLACK`] of rounding in the norm. A field
    /// without decay parameters passes trivially.
    pub fn check_decay(&self, sites: impl IntoIterator<Item = i64>) -> Result<()> {
        let Some(params) = self.decay else {
            return Ok(());
        };
        for x in sites.into_iter().filter(|&x| x != 0) {
            let norm = self.coin(x).distance(&self.limit);
            let bound = params.bound(x);
            if norm > bound * (1.0 + 1e-12) + DECAY_CHECK_SLACK {
                return Err(Error::DecayBoundViolated {
                    site: x,
                    norm,
                    bound,
                });
            }
        }
        Ok(())
    }

    pub fn coin(&self, x: i64) -> CoinMatrix {
        match &self.perturbation {
            Perturbation::None => self.limit,
            Perturbation::Defects(map) => map.get(&x).copied().unwrap_or(self.limit),
            Perturbation::Rotation => {
                let params = self.decay.expect("power-decay field carries decay params");
                let theta = params.bound(x).min(PI);
                CoinMatrix::rotation(theta).mul(&self.limit)
            }
            Perturbation::Custom(rule) => rule(x),
        }
    }

    /// Coins on the sites `x_min..=x_max`.
    pub fn coins_on(&self, x_min: i64, x_max: i64) -> Vec<CoinMatrix> {
        (x_min..=x_max).map(|x| self.coin(x)).collect()
    }

    pub fn limit(&self) -> &CoinMatrix {
        &self.limit
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn decay_params(&self) -> Option<DecayParams> {
        self.decay
    }

    /// True when `C(x) = C₀` at every site, so that `U = U₀` exactly.
    pub fn is_homogeneous(&self) -> bool {
        match &self.perturbation {
            Perturbation::None => true,
            Perturbation::Defects(map) => map.values().all(|c| *c == self.limit),
            Perturbation::Rotation | Perturbation::Custom(_) => false,
        }
    }

    /// The homogeneous field of the limit coin, generating `U₀`.
    pub fn free(&self) -> CoinField {
        CoinField::homogeneous(self.limit)
    }

    /// Sites carrying a coin different from `C₀`, when there are finitely many.
    pub fn defect_sites(&self) -> Option<Vec<i64>> {
        match &self.perturbation {
            Perturbation::None => Some(Vec::new()),
            Perturbation::Defects(map) => Some(
                map.iter()
                    .filter(|(_, c)| **c != self.limit)
                    .map(|(x, _)| *x)
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Stable identifier of the coin assignment (hex SHA-256).
    ///
    /// Fields built from a rule closure are identified by their coins on
    /// `|x| <= 256`.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.kind.to_string().as_bytes());
        for f in self.limit.to_floats() {
            hasher.update(f.to_le_bytes());
        }
        if let Some(p) = self.decay {
            hasher.update(p.c1.to_le_bytes());
            hasher.update(p.eps.to_le_bytes());
        }
        match &self.perturbation {
            Perturbation::None | Perturbation::Rotation => {}
            Perturbation::Defects(map) => {
                for (x, c) in map {
                    hasher.update(x.to_le_bytes());
                    for f in c.to_floats() {
                        hasher.update(f.to_le_bytes());
                    }
                }
            }
            Perturbation::Custom(rule) => {
                hasher.update(b"custom");
                for x in -256..=256 {
                    for f in rule(x).to_floats() {
                        hasher.update(f.to_le_bytes());
                    }
                }
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let limit = CoinMatrix::from_floats(spec.c0)?;
        let decay = match (spec.c1, spec.eps) {
            (Some(c1), Some(eps)) => Some(DecayParams::new(c1, eps)?),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidFieldSpec(
                    "c1 and eps must be given together".into(),
                ))
            }
        };
        let defects = spec
            .defects
            .iter()
            .map(|d| Ok((d.x, CoinMatrix::from_floats(d.matrix)?)))
            .collect::<Result<Vec<_>>>()?;

        let field = match spec.kind {
            FieldKind::Homogeneous => {
                if !defects.is_empty() {
                    return Err(Error::InvalidFieldSpec(
                        "a homogeneous field takes no defects".into(),
                    ));
                }
                CoinField::homogeneous(limit)
            }
            FieldKind::OneDefect => match defects.as_slice() {
                [(0, c)] => CoinField::one_defect(limit, *c),
                _ => {
                    return Err(Error::InvalidFieldSpec(
                        "one_defect needs exactly one defect at x = 0".into(),
                    ))
                }
            },
            FieldKind::FiniteDefects => CoinField::finite_defects(limit, defects),
            FieldKind::PowerDecay => {
                let Some(params) = decay else {
                    return Err(Error::InvalidFieldSpec(
                        "power_decay requires c1 and eps".into(),
                    ));
                };
                if !defects.is_empty() {
                    return Err(Error::InvalidFieldSpec(
                        "power_decay takes no defects".into(),
                    ));
                }
                return CoinField::power_decay(limit, params);
            }
        };
        match decay {
            Some(params) => field.with_decay_params(params),
            None => Ok(field),
        }
    }

    /// The JSON-facing description of this field. Fields built from a rule
    /// closure have no spec.
    pub fn to_spec(&self) -> Result<FieldSpec> {
        let defects = match &self.perturbation {
            Perturbation::None | Perturbation::Rotation => Vec::new(),
            Perturbation::Defects(map) => map
                .iter()
                .map(|(x, c)| DefectSpec {
                    x: *x,
                    matrix: c.to_floats(),
                })
                .collect(),
            Perturbation::Custom(_) => {
                return Err(Error::InvalidFieldSpec(
                    "fields with a custom decay rule cannot be serialized".into(),
                ))
            }
        };
        Ok(FieldSpec {
            kind: self.kind,
            c0: self.limit.to_floats(),
            defects,
            c1: self.decay.map(|p| p.c1),
            eps: self.decay.map(|p| p.eps),
        })
    }
}

/// JSON form of a coin field. Matrices are 8 floats: row-major, each entry as
/// `re, im`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub kind: FieldKind,
    #[serde(rename = "C0")]
    pub c0: [f64; 8],
    #[serde(default)]
    pub defects: Vec<DefectSpec>,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSpec {
    pub x: i64,
    pub matrix: [f64; 8],
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn blocks_sum_to_coin() {
        let h = CoinMatrix::from_angles(0.3, 0.7, -1.1, 2.0);
        assert_eq!(h.p_block().add(&h.q_block()), *h.mat());
    }

    #[test]
    fn standard_coins_are_unitary() {
        for coin in [
            CoinMatrix::hadamard(),
            CoinMatrix::identity(),
            CoinMatrix::pauli_x(),
            CoinMatrix::pauli_z(),
            CoinMatrix::rotation(0.4),
            CoinMatrix::from_angles(1.0, 2.0, 3.0, 4.0),
        ] {
            assert!(coin.mat().unitarity_defect() <= UNITARITY_TOL);
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let err = CoinMatrix::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(err, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn one_defect_assignment() {
        let field = CoinField::one_defect(CoinMatrix::hadamard(), CoinMatrix::identity());
        assert_eq!(field.coin(0), CoinMatrix::identity());
        assert_eq!(field.coin(5), CoinMatrix::hadamard());
        assert_eq!(field.coin(-5), CoinMatrix::hadamard());
        assert!(!field.is_homogeneous());
        assert_eq!(field.defect_sites(), Some(vec![0]));
    }

    #[test]
    fn homogeneous_assignment() {
        let field = CoinField::homogeneous(CoinMatrix::hadamard());
        for x in -10..=10 {
            assert_eq!(field.coin(x), CoinMatrix::hadamard());
        }
        assert!(field.is_homogeneous());
        let trivial = CoinField::one_defect(CoinMatrix::hadamard(), CoinMatrix::hadamard());
        assert!(trivial.is_homogeneous());
    }

    #[test]
    fn power_decay_respects_bound() {
        let field =
            CoinField::power_decay(CoinMatrix::hadamard(), DecayParams { c1: 0.5, eps: 1.0 })
                .unwrap();
        let norm = field.coin(3).distance(&CoinMatrix::hadamard());
        assert!(norm <= 0.5 / 9.0);
        // ‖R(θ) − I‖ = 2 sin(θ/2) exactly
        assert!((norm - 2.0 * (0.5f64 / 18.0).sin()).abs() < 1e-15);
        field.check_decay(-2000..=2000).unwrap();
        // the origin is capped at θ = π: C(0) = −C₀
        let c0 = field.coin(0);
        assert!(c0.mat().add(CoinMatrix::hadamard().mat()).max_abs() < 1e-15);
    }

    #[test]
    fn power_decay_rejects_bad_params() {
        let h = CoinMatrix::hadamard();
        for (c1, eps) in [
            (0.0, 1.0),
            (-1.0, 1.0),
            (1.0, 0.0),
            (1.0, -0.5),
            (f64::NAN, 1.0),
        ] {
            assert!(matches!(
                CoinField::power_decay(h, DecayParams { c1, eps }),
                Err(Error::InvalidDecayParams { .. })
            ));
        }
    }

    #[test]
    fn custom_rule_is_validated() {
        let h = CoinMatrix::hadamard();
        let params = DecayParams { c1: 1.0, eps: 0.5 };
        // decays too slowly: θ = |x|^{-1}
        let slow = CoinField::power_decay_with_rule(h, params, move |x| {
            let theta = if x == 0 { 1.0 } else { 1.0 / x.abs() as f64 };
            CoinMatrix::phases(theta, 0.0).mul(&h)
        });
        assert!(matches!(slow, Err(Error::DecayBoundViolated { .. })));

        let fast = CoinField::power_decay_with_rule(h, params, move |x| {
            let theta = if x == 0 {
                1.0
            } else {
                0.5 * (x.abs() as f64).powi(-2)
            };
            CoinMatrix::phases(theta, 0.0).mul(&h)
        })
        .unwrap();
        assert!(fast.to_spec().is_err());
        assert_eq!(fast.fingerprint(), fast.clone().fingerprint());
    }

    #[test]
    fn finite_defects_decay_check() {
        let h = CoinMatrix::hadamard();
        let field = CoinField::finite_defects(h, [(4, CoinMatrix::identity())]);
        let err = field
            .clone()
            .with_decay_params(DecayParams { c1: 0.1, eps: 1.0 });
        assert!(matches!(
            err,
            Err(Error::DecayBoundViolated { site: 4, .. })
        ));
        field
            .with_decay_params(DecayParams {
                c1: 100.0,
                eps: 1.0,
            })
            .unwrap();
    }

    #[test]
    fn spec_round_trip() {
        let field = CoinField::one_defect(CoinMatrix::hadamard(), CoinMatrix::identity());
        let json = serde_json::to_string(&field.to_spec().unwrap()).unwrap();
        assert!(json.contains("\"kind\":\"one_defect\""));
        assert!(json.contains("\"C0\""));
        let spec: FieldSpec = serde_json::from_str(&json).unwrap();
        let back = CoinField::from_spec(&spec).unwrap();
        assert_eq!(back.fingerprint(), field.fingerprint());
        assert_eq!(back.coin(0), CoinMatrix::identity());
    }

    #[test]
    fn spec_validation() {
        let h = CoinMatrix::hadamard().to_floats();
        let bad = FieldSpec {
            kind: FieldKind::OneDefect,
            c0: h,
            defects: vec![DefectSpec { x: 1, matrix: h }],
            c1: None,
            eps: None,
        };
        assert!(matches!(
            CoinField::from_spec(&bad),
            Err(Error::InvalidFieldSpec(_))
        ));

        let no_params = FieldSpec {
            kind: FieldKind::PowerDecay,
            c0: h,
            defects: vec![],
            c1: None,
            eps: None,
        };
        assert!(CoinField::from_spec(&no_params).is_err());

        let mut non_unitary = h;
        non_unitary[0] = 2.0;
        let spec = FieldSpec {
            kind: FieldKind::Homogeneous,
            c0: non_unitary,
            defects: vec![],
            c1: None,
            eps: None,
        };
        assert!(matches!(
            CoinField::from_spec(&spec),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn fingerprints_distinguish_fields() {
        let h = CoinMatrix::hadamard();
        let a = CoinField::one_defect(h, CoinMatrix::identity());
        let b = CoinField::one_defect(h, CoinMatrix::pauli_x());
        let c = CoinField::homogeneous(h);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn singular_values_of_known_matrices() {
        let m = Mat2::diag(c(3.0, 0.0), c(0.0, -0.5));
        let (s1, s2) = m.singular_values();
        assert!((s1 - 3.0).abs() < 1e-15 && (s2 - 0.5).abs() < 1e-15);
        let (s1, s2) = Mat2::zero().singular_values();
        assert_eq!((s1, s2), (0.0, 0.0));
        // rank one
        let r = Mat2::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let (s1, s2) = r.singular_values();
        assert!((s1 - 2.0).abs() < 1e-15 && s2.abs() < 1e-15);
    }
}
