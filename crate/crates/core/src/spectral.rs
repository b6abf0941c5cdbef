//! Bound states of the perturbed walk by truncated diagonalization.
//!
//! `U` is restricted to the sites `[−L, L]` with a unitary boundary rule and
//! diagonalized densely. An eigenpair is kept as a bound state of the
//! infinite walk only if
//!
//! * its eigenvector carries at most `edge_tol` of its mass on `|x| > L/2`,
//! * the same eigenphase shows up (localized) at half-width `2L`, and
//! * it also shows up when the boundary rule is swapped.
//!
//! Eigenpairs of the continuum depend on `L` and on the boundary and fail at
//! least one of these tests.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::coin::CoinField;
use crate::error::{Error, Result};
use crate::walk::{Spinor, WalkState};
use crate::C64;

/// Tolerance on `‖M*M − I‖_max` for a truncated evolution.
pub const TRUNCATION_UNITARITY_TOL: f64 = 1e-10;

/// Default truncation half-width.
pub const DEFAULT_HALF_WIDTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Sites `−L` and `L` are neighbours.
    Periodic,
    /// Amplitude leaving the window turns around at the last site: the upper
    /// output of `−L` feeds the lower component of `−L`, and the lower output
    /// of `L` feeds the upper component of `L`.
    Reflecting,
}

impl Boundary {
    pub fn other(self) -> Boundary {
        match self {
            Boundary::Periodic => Boundary::Reflecting,
            Boundary::Reflecting => Boundary::Periodic,
        }
    }
}

/// Dense matrix of `U` on `[−L, L]`. Basis vector `(x, s)` has index
/// `2(x + L) + s`.
pub struct TruncatedEvolution {
    half_width: usize,
    boundary: Boundary,
    matrix: Mat<C64>,
    field_hash: String,
}

impl TruncatedEvolution {
    pub fn build(field: &CoinField, half_width: usize, boundary: Boundary) -> Result<Self> {
        if half_width < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation half-width must be at least 2, got {half_width}"
            )));
        }
        let l = half_width as i64;
        let sites = 2 * half_width + 1;
        let dim = 2 * sites;
        let index = |x: i64, s: usize| 2 * (x + l) as usize + s;
        let mut matrix = Mat::<C64>::zeros(dim, dim);

        for x in -l..=l {
            let coin = field.coin(x);
            // upper output goes to (x − 1, 0), lower output to (x + 1, 1)
            let upper_target = match (x == -l, boundary) {
                (false, _) => index(x - 1, 0),
                (true, Boundary::Periodic) => index(l, 0),
                (true, Boundary::Reflecting) => index(-l, 1),
            };
            let lower_target = match (x == l, boundary) {
                (false, _) => index(x + 1, 1),
                (true, Boundary::Periodic) => index(-l, 1),
                (true, Boundary::Reflecting) => index(l, 0),
            };
            for s in 0..2 {
                let col = index(x, s);
                matrix[(upper_target, col)] = coin.mat().get(0, s);
                matrix[(lower_target, col)] = coin.mat().get(1, s);
            }
        }

        let trunc = TruncatedEvolution {
            half_width,
            boundary,
            matrix,
            field_hash: field.fingerprint(),
        };
        let defect = trunc.unitarity_defect();
        if !(defect <= TRUNCATION_UNITARITY_TOL) {
            return Err(Error::BoundaryNotUnitary { defect });
        }
        Ok(trunc)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> faer::MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn field_hash(&self) -> &str {
        &self.field_hash
    }

    /// Matrix index of `(x, s)`.
    pub fn index(&self, x: i64, s: usize) -> usize {
        2 * (x + self.half_width as i64) as usize + s
    }

    /// `‖M*M − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        // Columns of a coin-times-permutation matrix have at most two nonzero
        // entries, so the Gram matrix is cheap to form sparsely.
        let dim = self.dim();
        let cols: Vec<Vec<(usize, C64)>> = (0..dim)
            .map(|j| {
                (0..dim)
                    .filter_map(|i| {
                        let z = self.matrix[(i, j)];
                        (z != C64::new(0.0, 0.0)).then_some((i, z))
                    })
                    .collect()
            })
            .collect();
        let mut row_owner: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for (j, col) in cols.iter().enumerate() {
            for &(i, _) in col {
                row_owner[i].push(j);
            }
        }
        let mut worst: f64 = 0.0;
        for (a, col_a) in cols.iter().enumerate() {
            let mut partners: Vec<usize> = col_a
                .iter()
                .flat_map(|&(i, _)| row_owner[i].iter().copied())
                .collect();
            partners.push(a);
            partners.sort_unstable();
            partners.dedup();
            for b in partners {
                let dot: C64 = col_a
                    .iter()
                    .map(|&(i, za)| {
                        let zb = cols[b]
                            .iter()
                            .find(|&&(ib, _)| ib == i)
                            .map_or(C64::new(0.0, 0.0), |&(_, z)| z);
                        za.conj() * zb
                    })
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).norm());
            }
        }
        worst
    }

    /// All eigenpairs `(λ, v)` with unit eigenvectors.
    fn eigenpairs(&self) -> Result<Vec<(C64, Vec<C64>)>> {
        let evd = self
            .matrix
            .eigen()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let values = evd.S().column_vector();
        let vectors = evd.U();
        Ok((0..self.dim())
            .map(|j| {
                let mut v: Vec<C64> = (0..self.dim()).map(|i| vectors[(i, j)]).collect();
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.iter_mut().for_each(|z| *z /= n);
                (values[j], v)
            })
            .collect())
    }

    /// Eigenpairs whose eigenvector keeps at most `edge_tol` of its mass on
    /// `|x| > L/2`.
    fn localized(&self, edge_tol: f64) -> Result<Vec<Candidate>> {
        let l = self.half_width as i64;
        Ok(self
            .eigenpairs()?
            .into_iter()
            .filter_map(|(lambda, v)| {
                let edge_mass: f64 = v
                    .chunks_exact(2)
                    .enumerate()
                    .filter(|(i, _)| 2 * (*i as i64 - l).abs() > l)
                    .map(|(_, s)| s[0].norm_sqr() + s[1].norm_sqr())
                    .sum();
                (edge_mass <= edge_tol).then(|| Candidate {
                    theta: lambda.arg().rem_euclid(TAU),
                    vector: v,
                    edge_mass,
                    shift: 0.0,
                })
            })
            .collect())
    }
}

struct Candidate {
    theta: f64,
    vector: Vec<C64>,
    edge_mass: f64,
    shift: f64,
}

/// Distance between two angles on the circle.
fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Maximal mass on `|x| > L/2` for an eigenvector to count as localized.
    pub edge_tol: f64,
    /// Maximal eigenphase shift between truncations for a stable eigenpair.
    pub stability_tol: f64,
    /// Eigenphases closer than this are treated as one degenerate cluster.
    pub cluster_tol: f64,
    /// Also require the eigenphase to survive a change of boundary rule.
    pub check_boundary_swap: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            edge_tol: 1e-8,
            stability_tol: 1e-8,
            cluster_tol: 1e-10,
            check_boundary_swap: true,
        }
    }
}

/// Exponential fit `‖η(x)‖ ≈ A e^{−κ|x|}` on the tail `|x| > 10`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
}

/// Sites with `|x|` at most this are left out of the decay fit.
pub const DECAY_FIT_START: i64 = 10;
/// Site norms below this are at the rounding floor and left out of the fit.
pub const DECAY_FIT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BoundState {
    /// Eigenphase in `[0, 2π)`.
    pub theta: f64,
    /// Unit eigenvector on `[−L, L]`.
    pub vector: WalkState,
    pub edge_mass: f64,
    /// Largest eigenphase shift against the `2L` and swapped-boundary solves.
    pub stability_shift: f64,
    /// `None` when fewer than three tail sites sit above the rounding floor
    /// (compactly supported states).
    pub decay: Option<DecayFit>,
}

impl BoundState {
    pub fn eigenvalue(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }

    /// `‖Uη − e^{iθ}η‖` computed by stepping on the infinite lattice.
    pub fn eigen_residual(&self, field: &CoinField) -> f64 {
        let stepped = self.vector.step_forward(field).with_time(0);
        stepped.distance(&self.vector.scaled(self.eigenvalue()))
    }
}

fn fit_decay(state: &WalkState) -> Option<DecayFit> {
    let points: Vec<(f64, f64)> = state
        .iter()
        .filter(|(x, _)| x.abs() > DECAY_FIT_START)
        .map(|(x, s)| (x.abs() as f64, (s[0].norm_sqr() + s[1].norm_sqr()).sqrt()))
        .filter(|&(_, n)| n > DECAY_FIT_FLOOR)
        .map(|(x, n)| (x, n.ln()))
        .collect();
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(DecayFit {
        rate: -slope,
        r_squared,
    })
}

/// Accepted bound states of one coin field.
#[derive(Clone, Debug)]
pub struct BoundStateSet {
    states: Vec<BoundState>,
    field_hash: String,
    half_width: usize,
}

impl BoundStateSet {
    pub fn empty(field: &CoinField, half_width: usize) -> Self {
        BoundStateSet {
            states: Vec::new(),
            field_hash: field.fingerprint(),
            half_width,
        }
    }

    pub fn states(&self) -> &[BoundState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn field_hash(&self) -> &str {
        &self.field_hash
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn ensure_field(&self, field: &CoinField) -> Result<()> {
        let expected = field.fingerprint();
        if expected != self.field_hash {
            return Err(Error::FieldMismatch {
                expected,
                found: self.field_hash.clone(),
            });
        }
        Ok(())
    }

    /// `Σₙ |⟨ηₙ, Ψ⟩|²` without any precondition checks.
    pub fn point_mass_weight_unchecked(&self, psi: &WalkState) -> f64 {
        self.states
            .iter()
            .map(|b| b.vector.inner(psi).norm_sqr())
            .sum()
    }

    /// `Ψ − Σₙ ⟨ηₙ, Ψ⟩ ηₙ`.
    pub fn remove_bound_part(&self, psi: &WalkState) -> WalkState {
        self.states.iter().fold(psi.clone(), |acc, b| {
            let c = b.vector.inner(psi);
            acc.add_scaled(-c, &b.vector)
        })
    }

    /// Writes `bound_states.json` (`[{theta, decay_rate, edge_mass,
    /// vector_csv_path}]`) and one state CSV per bound state into `dir`.
    pub fn write_json(&self, dir: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Entry {
            theta: f64,
            decay_rate: Option<f64>,
            edge_mass: f64,
            vector_csv_path: String,
        }
        fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.states.len());
        for (n, b) in self.states.iter().enumerate() {
            let name = format!("bound_state_{n}.csv");
            b.vector.write_csv(fs::File::create(dir.join(&name))?)?;
            entries.push(Entry {
                theta: b.theta,
                decay_rate: b.decay.map(|d| d.rate),
                edge_mass: b.edge_mass,
                vector_csv_path: name,
            });
        }
        fs::write(
            dir.join("bound_states.json"),
            serde_json::to_string_pretty(&entries)?,
        )?;
        Ok(())
    }
}

/// Bound states with the default filter settings.
pub fn point_spectrum(trunc: &TruncatedEvolution, field: &CoinField) -> Result<BoundStateSet> {
    point_spectrum_with(trunc, field, &SpectralOptions::default())
}

pub fn point_spectrum_with(
    trunc: &TruncatedEvolution,
    field: &CoinField,
    opts: &SpectralOptions,
) -> Result<BoundStateSet> {
    let hash = field.fingerprint();
    if hash != trunc.field_hash {
        return Err(Error::FieldMismatch {
            expected: hash,
            found: trunc.field_hash.clone(),
        });
    }
    let l = trunc.half_width;
    let candidates = trunc.localized(opts.edge_tol)?;
    if candidates.is_empty() {
        return Ok(BoundStateSet::empty(field, l));
    }

    let (doubled, swapped) = rayon::join(
        || -> Result<Vec<f64>> {
            let t = TruncatedEvolution::build(field, 2 * l, trunc.boundary)?;
            Ok(t.localized(opts.edge_tol)?
                .into_iter()
                .map(|c| c.theta)
                .collect())
        },
        || -> Result<Option<Vec<f64>>> {
            if !opts.check_boundary_swap {
                return Ok(None);
            }
            let t = TruncatedEvolution::build(field, l, trunc.boundary.other())?;
            Ok(Some(
                t.localized(opts.edge_tol)?
                    .into_iter()
                    .map(|c| c.theta)
                    .collect(),
            ))
        },
    );
    let doubled = doubled?;
    let swapped = swapped?;
    let nearest = |theta: f64, others: &[f64]| {
        others
            .iter()
            .map(|&o| phase_distance(theta, o))
            .fold(f64::INFINITY, f64::min)
    };

    let mut accepted: Vec<Candidate> = candidates
        .into_iter()
        .filter_map(|mut c| {
            let mut shift = nearest(c.theta, &doubled);
            if let Some(s) = &swapped {
                shift = shift.max(nearest(c.theta, s));
            }
            c.shift = shift;
            (shift <= opts.stability_tol).then_some(c)
        })
        .collect();
    accepted.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    orthonormalize_clusters(&mut accepted, opts.cluster_tol);

    let x_min = -(l as i64);
    let states = accepted
        .into_iter()
        .map(|c| {
            let amps: Vec<Spinor> = c.vector.chunks_exact(2).map(|s| [s[0], s[1]]).collect();
            let vector = WalkState::new(x_min, amps)?;
            let decay = fit_decay(&vector);
            Ok(BoundState {
                theta: c.theta,
                vector,
                edge_mass: c.edge_mass,
                stability_shift: c.shift,
                decay,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundStateSet {
        states,
        field_hash: hash,
        half_width: l,
    })
}

/// Modified Gram–Schmidt within runs of nearly equal eigenphases (input
/// sorted by phase).
fn orthonormalize_clusters(cands: &mut [Candidate], tol: f64) {
    let mut start = 0;
    while start < cands.len() {
        let mut end = start + 1;
        while end < cands.len() && phase_distance(cands[end].theta, cands[end - 1].theta) < tol {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let (head, tail) = cands.split_at_mut(i);
                let (q, v) = (&head[j].vector, &mut tail[0].vector);
                let proj: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(b, a)| *b -= proj * a);
            }
            let v = &mut cands[i].vector;
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= n);
        }
        start = end;
    }
}

/// `‖Π_p(U)Ψ₀‖² = Σₙ |⟨ηₙ, Ψ₀⟩|²`.
pub fn point_mass_weight(bs: &BoundStateSet, field: &CoinField, psi0: &WalkState) -> Result<f64> {
    bs.ensure_field(field)?;
    psi0.ensure_normalized()?;
    let l = bs.half_width as i64;
    let (x_min, x_max) = psi0.window();
    if x_min < -l || x_max > l {
        return Err(Error::OutsideTruncation {
            x_min,
            x_max,
            half_width: bs.half_width,
        });
    }
    Ok(bs.point_mass_weight_unchecked(psi0))
}
