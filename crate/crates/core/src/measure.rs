//! Probability measures on velocity space.
//!
//! A [`VelocityMeasure`] is a finite list of atoms plus a weighted sample cloud
//! standing in for the absolutely continuous part. Both are kept sorted with
//! prefix sums so that CDF queries are logarithmic.

use std::io::Write;

use crate::error::{Error, Result};
use crate::walk::{fmt_f64, PositionDistribution};
use crate::C64;

/// Atoms closer than this are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
struct Sorted {
    points: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl Sorted {
    fn new(mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cumulative = points
            .iter()
            .scan(0.0, |acc, &(_, w)| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Sorted { points, cumulative }
    }

    fn mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Mass on `(-∞, v]`.
    fn cdf(&self, v: f64) -> f64 {
        let n = self.points.partition_point(|&(p, _)| p <= v);
        if n == 0 {
            0.0
        } else {
            self.cumulative[n - 1]
        }
    }
}

/// A probability measure on the real line: atoms plus a weighted sample cloud.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VelocityMeasure {
    atoms: Sorted,
    cloud: Sorted,
}

impl VelocityMeasure {
    /// Builds a measure from atoms and cloud samples. Atoms within
    /// [`ATOM_MERGE_TOL`] of each other are merged.
    pub fn new(atoms: Vec<(f64, f64)>, cloud: Vec<(f64, f64)>) -> Result<Self> {
        for &(v, w) in atoms.iter().chain(cloud.iter()) {
            if !(w >= 0.0 && w.is_finite() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "measure point ({v}, {w}) needs a finite location and nonnegative weight"
                )));
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, w) in atoms {
            match merged.last_mut() {
                Some(last) if (v - last.0).abs() <= ATOM_MERGE_TOL => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        Ok(VelocityMeasure {
            atoms: Sorted::new(merged),
            cloud: Sorted::new(cloud),
        })
    }

    pub fn dirac(v: f64) -> Self {
        VelocityMeasure::new(vec![(v, 1.0)], Vec::new()).expect("finite atom")
    }

    /// The law of `X/t` for a position law at time `t ≠ 0`, as atoms at `x/t`.
    pub fn from_position_law(dist: &PositionDistribution) -> Result<Self> {
        let t = dist.time();
        if t == 0 {
            return Err(Error::InvalidParameter(
                "the scaled law X/t needs t != 0".into(),
            ));
        }
        let t = t as f64;
        let atoms = dist
            .iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(x, p)| (x as f64 / t, p))
            .collect();
        VelocityMeasure::new(atoms, Vec::new())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms.points
    }

    pub fn cloud(&self) -> &[(f64, f64)] {
        &self.cloud.points
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.mass()
    }

    pub fn cloud_mass(&self) -> f64 {
        self.cloud.mass()
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.cloud_mass()
    }

    /// Weight of the atom at `v`, zero if there is none.
    pub fn atom_at(&self, v: f64) -> f64 {
        self.atoms
            .points
            .iter()
            .filter(|(p, _)| (p - v).abs() <= ATOM_MERGE_TOL)
            .map(|(_, w)| w)
            .sum()
    }

    /// Right-continuous distribution function `μ((−∞, v])`.
    pub fn cdf(&self, v: f64) -> f64 {
        self.atoms.cdf(v) + self.cloud.cdf(v)
    }

    fn points(&self) -> impl Iterator<Item = &(f64, f64)> + '_ {
        self.atoms.points.iter().chain(self.cloud.points.iter())
    }

    /// `∫ v^m dμ / μ(R)`.
    pub fn moment(&self, m: i32) -> f64 {
        let (s, mass) = self.points().fold((0.0, 0.0), |(s, mass), &(v, w)| {
            (s + w * v.powi(m), mass + w)
        });
        s / mass
    }

    /// `∫ e^{iξv} dμ / μ(R)`; exactly 1 at `ξ = 0`.
    pub fn characteristic(&self, xi: f64) -> C64 {
        let (s, mass) = self
            .points()
            .fold((C64::new(0.0, 0.0), 0.0), |(s, mass), &(v, w)| {
                (s + C64::from_polar(w, xi * v), mass + w)
            });
        s / mass
    }

    /// Multiplies every cloud weight by `factor`.
    pub fn scale_cloud(&self, factor: f64) -> Result<Self> {
        VelocityMeasure::new(
            self.atoms.points.clone(),
            self.cloud
                .points
                .iter()
                .map(|&(v, w)| (v, w * factor))
                .collect(),
        )
    }

    /// Adds an atom of weight `w` at `v`.
    pub fn with_atom(&self, v: f64, w: f64) -> Result<Self> {
        let mut atoms = self.atoms.points.clone();
        atoms.push((v, w));
        VelocityMeasure::new(atoms, self.cloud.points.clone())
    }

    /// CSV with columns `type,v,weight`; `type` is `atom` or `sample`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["type", "v", "weight"])?;
        for &(v, p) in &self.atoms.points {
            w.write_record(["atom".to_string(), fmt_f64(v), fmt_f64(p)])?;
        }
        for &(v, p) in &self.cloud.points {
            w.write_record(["sample".to_string(), fmt_f64(v), fmt_f64(p)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Right-continuous CDF value of `mu` at `v`.
pub fn measure_cdf(mu: &VelocityMeasure, v: f64) -> f64 {
    mu.cdf(v)
}

/// Number of uniform grid points on `[-1, 1]` used by [`ks_distance`].
pub const KS_GRID_POINTS: usize = 2001;

/// Sup-norm distance between the CDFs of `empirical` and `theory`, evaluated
/// on the atoms of `empirical` together with a uniform grid of
/// [`KS_GRID_POINTS`] points on `[-1, 1]`.
pub fn ks_distance(empirical: &VelocityMeasure, theory: &VelocityMeasure) -> f64 {
    let grid = (0..KS_GRID_POINTS).map(|i| -1.0 + 2.0 * i as f64 / (KS_GRID_POINTS - 1) as f64);
    empirical
        .atoms()
        .iter()
        .map(|&(v, _)| v)
        .chain(grid)
        .map(|v| (empirical.cdf(v) - theory.cdf(v)).abs())
        .fold(0.0, f64::max)
        .min(1.0)
}
