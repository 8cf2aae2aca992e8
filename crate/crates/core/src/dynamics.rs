//! Hausdorff semimetrics on sampled sets, orbits of compact samples, and the
//! attraction and coverage certificates of loxodromic dynamics.

use rayon::prelude::*;
use thiserror::Error;

use crate::flag::{dist_to_bouquet, flag_distance, Flag};
use crate::group::{act, GroupElem, GroupError};
use crate::sample::{bouquet, SampledSet};
use crate::spectral::{classify, Loxodromic};
use crate::tube::Tube;

/// Distance to the repelling bouquet below which attraction is refused.
pub const REPELLER_TOL: f64 = 1e-6;
/// Default margin used to filter coverage targets near `B⁺`.
pub const DEFAULT_MARGIN: f64 = 0.1;
/// Points per circle when sampling `B₋` to validate a coverage tube.
const BOUQUET_CHECK_POINTS: usize = 90;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("empty sampled set")]
    EmptySet,
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("sample point {index} lies within {distance:e} of the repelling bouquet")]
    TooCloseToRepeller { index: usize, distance: f64 },
    #[error("no convergence within n_max; last residual {}", .0.residuals.last().map_or(f64::NAN, |r| r.1))]
    NoConvergence(Box<AttractionReport>),
    #[error("tube does not contain the sampled repelling bouquet (witness {0:?})")]
    BadTube(Box<Flag>),
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub(crate) fn loxodromic_data(g: &GroupElem) -> Result<Loxodromic, DynamicsError> {
    classify(g)?
        .loxodromic()
        .cloned()
        .ok_or(DynamicsError::NotLoxodromic)
}

/// `max_{a ∈ A} min_{b ∈ B} d(a, b)`.
pub fn directed_hausdorff(a: &SampledSet, b: &SampledSet) -> Result<f64, DynamicsError> {
    if a.is_empty() || b.is_empty() {
        return Err(DynamicsError::EmptySet);
    }
    Ok(a.points
        .par_iter()
        .map(|x| b.min_distance_to(x))
        .reduce(|| 0.0, f64::max))
}

pub fn hausdorff(a: &SampledSet, b: &SampledSet) -> Result<f64, DynamicsError> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// Pointwise image of `K` under `g^n`. The resolution is dropped since the
/// action distorts distances.
pub fn iterate_set(g: &GroupElem, k: &SampledSet, n: i64) -> SampledSet {
    if n == 0 {
        return k.clone();
    }
    let gn = g.pow(n);
    SampledSet::new(k.points.par_iter().map(|x| act(&gn, x)).collect(), None)
}

/// Largest ratio `d(gx, gy) / d(x, y)` over pairs `(x, y) ∈ A × B`.
pub fn lipschitz_estimate(g: &GroupElem, a: &SampledSet, b: &SampledSet) -> f64 {
    let gb: Vec<Flag> = b.points.iter().map(|y| act(g, y)).collect();
    a.points
        .par_iter()
        .map(|x| {
            let gx = act(g, x);
            b.points
                .iter()
                .zip(&gb)
                .filter_map(|(y, gy)| {
                    let d = flag_distance(x, y);
                    (d > 1e-12).then(|| flag_distance(&gx, gy) / d)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttractionReport {
    pub n_star: usize,
    /// `(n, sup_x dist(g^n x, B⁺))` for every tested `n`.
    pub residuals: Vec<(usize, f64)>,
    pub converged: bool,
}

impl AttractionReport {
    /// Smallest `n₀` from which the recorded residuals never increase.
    pub fn monotone_from(&self) -> usize {
        let r = &self.residuals;
        let mut start = r.len().saturating_sub(1);
        while start > 0 && r[start - 1].1 >= r[start].1 {
            start -= 1;
        }
        r.get(start).map_or(0, |x| x.0)
    }
}

fn sup_bouquet_distance(points: &[Flag], center: &Flag) -> f64 {
    points
        .par_iter()
        .map(|x| dist_to_bouquet(x, center))
        .reduce(|| 0.0, f64::max)
}

/// Least `n ≤ n_max` with `g^n(K)` inside the `eps`-neighbourhood of the
/// attractive bouquet, together with the residual curve.
pub fn attraction_certificate(
    g: &GroupElem,
    k: &SampledSet,
    eps: f64,
    n_max: usize,
) -> Result<AttractionReport, DynamicsError> {
    if k.is_empty() {
        return Err(DynamicsError::EmptySet);
    }
    let lox = loxodromic_data(g)?;
    for (index, x) in k.iter().enumerate() {
        let distance = dist_to_bouquet(x, &lox.x_minus);
        if distance < REPELLER_TOL {
            return Err(DynamicsError::TooCloseToRepeller { index, distance });
        }
    }
    let mut residuals = Vec::new();
    for n in 0..=n_max {
        let image = iterate_set(g, k, n as i64);
        let r = sup_bouquet_distance(&image.points, &lox.x_plus);
        residuals.push((n, r));
        if r < eps {
            return Ok(AttractionReport {
                n_star: n,
                residuals,
                converged: true,
            });
        }
    }
    Err(DynamicsError::NoConvergence(Box::new(AttractionReport {
        n_star: n_max,
        residuals,
        converged: false,
    })))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub targets_total: usize,
    pub targets_reached: usize,
    pub max_steps_used: usize,
    pub failures: Vec<Flag>,
    /// Targets closer than the margin to `B⁺`, not counted in the total.
    pub excluded: Vec<Flag>,
}

impl CoverageReport {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each target `z` off the margin around `B⁺(g)`, searches the least
/// `n ≤ n_max` with `g^{-n} z ∈ P`.
pub fn coverage_certificate(
    g: &GroupElem,
    p: &Tube,
    targets: &SampledSet,
    n_max: usize,
    margin: f64,
) -> Result<CoverageReport, DynamicsError> {
    let lox = loxodromic_data(g)?;
    let repeller = bouquet(&lox.x_minus, BOUQUET_CHECK_POINTS).expect("count above minimum");
    if let Some(w) = repeller.iter().find(|x| !p.contains(x)) {
        return Err(DynamicsError::BadTube(Box::new(*w)));
    }
    let (kept, excluded): (Vec<Flag>, Vec<Flag>) = targets
        .iter()
        .partition(|z| dist_to_bouquet(z, &lox.x_plus) >= margin);
    let ginv = g.inverse();
    let steps: Vec<Option<usize>> = kept
        .par_iter()
        .map(|z| {
            let mut y = *z;
            for n in 0..=n_max {
                if p.contains(&y) {
                    return Some(n);
                }
                y = act(&ginv, &y);
            }
            None
        })
        .collect();
    let failures: Vec<Flag> = kept
        .iter()
        .zip(&steps)
        .filter(|(_, s)| s.is_none())
        .map(|(z, _)| *z)
        .collect();
    Ok(CoverageReport {
        targets_total: kept.len(),
        targets_reached: kept.len() - failures.len(),
        max_steps_used: steps.iter().flatten().copied().max().unwrap_or(0),
        failures,
        excluded,
    })
}
