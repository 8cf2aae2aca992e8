//! Finite samples of subsets of the flag space.
//!
//! Compact sets are represented by point clouds with a covering-radius
//! estimate. Random samplers are driven by a seeded ChaCha stream and draw
//! points sequentially, so output never depends on the rayon pool size; only
//! the order-independent reductions (min / max) run in parallel.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::flag::{alpha_circle_points, beta_circle_points, dist_to_bouquet, flag_distance, Flag};
use crate::linalg::Vec3;
use crate::tube::Tube;

/// Probe count for empirical covering-radius estimates.
pub const RESOLUTION_PROBES: usize = 256;

/// Rejection sampling gives up after this many draws per requested point.
const MAX_DRAWS_PER_POINT: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("requested region is empty: {0}")]
    EmptyRegion(String),
    #[error("sample count must be at least {min}, got {got}")]
    TooFewPoints { min: usize, got: usize },
}

/// A finite point cloud on the flag space.
///
/// `resolution` is an estimate of the covering radius of the points inside
/// the set they discretize; `None` once it is no longer meaningful (e.g.
/// after pushing the cloud through a group element).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSet {
    pub points: Vec<Flag>,
    pub resolution: Option<f64>,
}

impl SampledSet {
    pub fn new(points: Vec<Flag>, resolution: Option<f64>) -> Self {
        SampledSet { points, resolution }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Flag> {
        self.points.iter()
    }

    /// Union of two samples; the coarser resolution wins.
    pub fn union(&self, other: &SampledSet) -> SampledSet {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        let resolution = match (self.resolution, other.resolution) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        SampledSet { points, resolution }
    }

    /// Smallest distance from `x` to a member, `+inf` when empty.
    pub fn min_distance_to(&self, x: &Flag) -> f64 {
        self.points
            .iter()
            .map(|y| flag_distance(x, y))
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_m(m: usize, min: usize) -> Result<(), SampleError> {
    if m < min {
        Err(SampleError::TooFewPoints { min, got: m })
    } else {
        Ok(())
    }
}

/// The α-circle through `x`: `m` flags sharing `x`'s point, lines at equal
/// angular steps of `pi / m` in the pencil.
pub fn alpha_circle(x: &Flag, m: usize) -> Result<SampledSet, SampleError> {
    check_m(m, 3)?;
    Ok(SampledSet::new(alpha_circle_points(x, m), Some(PI / m as f64)))
}

/// The β-circle through `x`: `m` flags sharing `x`'s line.
pub fn beta_circle(x: &Flag, m: usize) -> Result<SampledSet, SampleError> {
    check_m(m, 3)?;
    Ok(SampledSet::new(beta_circle_points(x, m), Some(PI / m as f64)))
}

/// The α–β bouquet through `x`, `2m` points (the basepoint appears twice).
pub fn bouquet(x: &Flag, m: usize) -> Result<SampledSet, SampleError> {
    Ok(alpha_circle(x, m)?.union(&beta_circle(x, m)?))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vec<R: Rng>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

fn unit_vec<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        if let Some(u) = gaussian_vec(rng).normalized(1e-8) {
            return u;
        }
    }
}

/// Orthonormal pair spanning `c^perp`.
fn perp_basis(c: &Vec3) -> (Vec3, Vec3) {
    let u = c.any_orthogonal();
    (u, c.cross(&u))
}

/// Unit vector at angle `angle` from `c`, azimuth `phi` around it.
fn at_angle(c: &Vec3, angle: f64, phi: f64) -> Vec3 {
    let (u, v) = perp_basis(c);
    c.scale(angle.cos()) + (u.scale(phi.cos()) + v.scale(phi.sin())).scale(angle.sin())
}

/// Uniform direction whose line makes an angle in `[lo, hi]` with `c`.
fn in_band<R: Rng>(rng: &mut R, c: &Vec3, lo: f64, hi: f64) -> Vec3 {
    // cos of the angle is uniform for the round measure
    let z = rng.random_range(hi.cos()..=lo.cos());
    let phi = rng.random_range(0.0..2.0 * PI);
    at_angle(c, z.clamp(-1.0, 1.0).acos(), phi)
}

/// Uniform unit vector orthogonal to `p`.
fn perp_uniform<R: Rng>(rng: &mut R, p: &Vec3) -> Vec3 {
    let (u, v) = perp_basis(p);
    let t = rng.random_range(0.0..PI);
    u.scale(t.cos()) + v.scale(t.sin())
}

/// Haar-uniform random flag.
pub fn random_flag<R: Rng>(rng: &mut R) -> Flag {
    let p = unit_vec(rng);
    let n = perp_uniform(rng, &p);
    Flag::from_unit_parts(p, n)
}

/// `m` Haar-uniform flags with an empirical covering radius.
pub fn uniform_sample(m: usize, seed: u64) -> SampledSet {
    let mut rng = rng_from_seed(seed);
    let points: Vec<Flag> = (0..m).map(|_| random_flag(&mut rng)).collect();
    let mut probe_rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    let probes: Vec<Flag> = (0..RESOLUTION_PROBES)
        .map(|_| random_flag(&mut probe_rng))
        .collect();
    let resolution = covering_radius(&points, &probes);
    SampledSet::new(points, Some(resolution))
}

/// Largest distance from a probe to its nearest sample point.
pub fn covering_radius(points: &[Flag], probes: &[Flag]) -> f64 {
    if points.is_empty() {
        return f64::INFINITY;
    }
    probes
        .par_iter()
        .map(|q| {
            points
                .iter()
                .map(|x| flag_distance(q, x))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Draws until `m` points satisfy `accept`, or errors when the region looks
/// empty.
fn rejection<R, G, A>(rng: &mut R, m: usize, mut draw: G, accept: A, what: &str) -> Result<Vec<Flag>, SampleError>
where
    R: Rng,
    G: FnMut(&mut R) -> Flag,
    A: Fn(&Flag) -> bool,
{
    let mut out = Vec::with_capacity(m);
    let budget = MAX_DRAWS_PER_POINT * m.max(1);
    let mut draws = 0usize;
    while out.len() < m {
        if draws >= budget {
            return Err(SampleError::EmptyRegion(format!(
                "{what}: accepted {} of {m} after {draws} draws",
                out.len()
            )));
        }
        draws += 1;
        let x = draw(rng);
        if accept(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Quasi-uniform sample of `X ∖ Int(T)` shrunk by `margin`: flags whose
/// point is at least `r_alpha + margin` from the center point and whose line
/// is at least `r_beta + margin` from the center line.
pub fn tube_complement_sample(t: &Tube, m: usize, margin: f64, seed: u64) -> Result<SampledSet, SampleError> {
    let a_min = t.r_alpha() + margin.max(0.0);
    let b_min = t.r_beta() + margin.max(0.0);
    if a_min >= FRAC_PI_2 || b_min >= FRAC_PI_2 {
        return Err(SampleError::EmptyRegion(format!(
            "radius plus margin reaches pi/2 (alpha {a_min}, beta {b_min})"
        )));
    }
    let c = t.center().p();
    let admissible = move |x: &Flag| {
        let (a, b) = t.angles(x);
        a >= a_min && b >= b_min
    };
    // exact conditioning on the point band, rejection on the line
    let draw = move |r: &mut ChaCha8Rng| {
        let p = in_band(r, &c, a_min, FRAC_PI_2);
        Flag::from_unit_parts(p, perp_uniform(r, &p))
    };
    let mut rng = rng_from_seed(seed);
    let points = rejection(&mut rng, m, draw, admissible, "tube complement")?;
    let mut probe_rng = rng_from_seed(seed ^ 0x5851_f42d_4c95_7f2d);
    let probes = rejection(&mut probe_rng, RESOLUTION_PROBES, draw, admissible, "tube complement probes")?;
    let resolution = covering_radius(&points, &probes);
    Ok(SampledSet::new(points, Some(resolution)))
}

/// Quasi-uniform sample of the closed tube: half the points over the point
/// disc, half over the line disc.
pub fn tube_sample(t: &Tube, m: usize, seed: u64) -> SampledSet {
    let mut rng = rng_from_seed(seed);
    let (c, cn) = (t.center().p(), t.center().n());
    let draw = |r: &mut ChaCha8Rng, k: usize| {
        if k.is_multiple_of(2) {
            let p = in_band(r, &c, 0.0, t.r_alpha());
            Flag::from_unit_parts(p, perp_uniform(r, &p))
        } else {
            let n = in_band(r, &cn, 0.0, t.r_beta());
            Flag::from_unit_parts(perp_uniform(r, &n), n)
        }
    };
    let points: Vec<Flag> = (0..m).map(|k| draw(&mut rng, k)).collect();
    let mut probe_rng = rng_from_seed(seed ^ 0x2545_f491_4f6c_dd1d);
    let probes: Vec<Flag> = (0..RESOLUTION_PROBES).map(|k| draw(&mut probe_rng, k)).collect();
    let resolution = covering_radius(&points, &probes);
    SampledSet::new(points, Some(resolution))
}

/// Sample of the boundary of the tube: flags with point exactly at angle
/// `r_alpha` and line outside the line disc, or line exactly at angle
/// `r_beta` and point outside the point disc.
pub fn tube_boundary_sample(t: &Tube, m: usize, seed: u64) -> Result<SampledSet, SampleError> {
    let mut rng = rng_from_seed(seed);
    let (c, cn) = (t.center().p(), t.center().n());
    let (ra, rb) = (t.r_alpha(), t.r_beta());
    let half = m / 2;
    let on_alpha = |r: &mut ChaCha8Rng| {
        let p = at_angle(&c, ra, r.random_range(0.0..2.0 * PI));
        Flag::from_unit_parts(p, perp_uniform(r, &p))
    };
    let on_beta = |r: &mut ChaCha8Rng| {
        let n = at_angle(&cn, rb, r.random_range(0.0..2.0 * PI));
        Flag::from_unit_parts(perp_uniform(r, &n), n)
    };
    let mut points = rejection(&mut rng, m - half, on_alpha, |x| t.angles(x).1 >= rb, "tube boundary")?;
    points.extend(rejection(&mut rng, half, on_beta, |x| t.angles(x).0 >= ra, "tube boundary")?);
    let mut probe_rng = rng_from_seed(seed ^ 0x1405_7b7e_f767_814f);
    let mut probes = rejection(&mut probe_rng, RESOLUTION_PROBES / 2, on_alpha, |x| t.angles(x).1 >= rb, "probes")?;
    probes.extend(rejection(&mut probe_rng, RESOLUTION_PROBES / 2, on_beta, |x| t.angles(x).0 >= ra, "probes")?);
    let resolution = covering_radius(&points, &probes);
    Ok(SampledSet::new(points, Some(resolution)))
}

/// Uniform sample of flags at distance at least `margin` from the bouquet
/// through `x`.
pub fn bouquet_complement_sample(x: &Flag, m: usize, margin: f64, seed: u64) -> Result<SampledSet, SampleError> {
    let mut rng = rng_from_seed(seed);
    let accept = |y: &Flag| dist_to_bouquet(y, x) >= margin;
    let points = rejection(&mut rng, m, random_flag, accept, "bouquet complement")?;
    let mut probe_rng = rng_from_seed(seed ^ 0x2545_f491_4f6c_dd1d);
    let probes = rejection(&mut probe_rng, RESOLUTION_PROBES, random_flag, accept, "probes")?;
    let resolution = covering_radius(&points, &probes);
    Ok(SampledSet::new(points, Some(resolution)))
}

/// Samples of `X` avoiding every tube in `tubes` by at least `margin` in
/// depth. Used for fundamental domains of Schottky configurations.
pub fn complement_of_tubes_sample(tubes: &[Tube], m: usize, margin: f64, seed: u64) -> Result<SampledSet, SampleError> {
    let mut rng = rng_from_seed(seed);
    let accept = |x: &Flag| tubes.iter().all(|t| t.depth(x) <= -margin);
    let points = rejection(&mut rng, m, random_flag, accept, "tube complement")?;
    let mut probe_rng = rng_from_seed(seed ^ 0x7f4a_7c15_9e37_79b9);
    let probes = rejection(&mut probe_rng, RESOLUTION_PROBES, random_flag, accept, "probes")?;
    let resolution = covering_radius(&points, &probes);
    Ok(SampledSet::new(points, Some(resolution)))
}

/// Greedy farthest-point subsampling down to at most `m` points, starting
/// from the first point. Returns the subsample and its covering radius with
/// respect to the full cloud.
pub fn farthest_point_subsample(points: &[Flag], m: usize) -> (Vec<Flag>, f64) {
    if points.is_empty() || m == 0 {
        return (Vec::new(), if points.is_empty() { 0.0 } else { f64::INFINITY });
    }
    if points.len() <= m {
        return (points.to_vec(), 0.0);
    }
    let mut chosen = vec![points[0]];
    let mut dist: Vec<f64> = points.par_iter().map(|x| flag_distance(x, &points[0])).collect();
    while chosen.len() < m {
        // ties go to the lowest index so the pick is pool-size independent
        let (far_idx, _) = dist
            .par_iter()
            .enumerate()
            .map(|(i, d)| (i, *d))
            .reduce(|| (usize::MAX, f64::NEG_INFINITY), |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            });
        let pick = points[far_idx];
        chosen.push(pick);
        dist.par_iter_mut()
            .zip(points.par_iter())
            .for_each(|(d, x)| *d = d.min(flag_distance(x, &pick)));
    }
    let radius = dist.par_iter().cloned().reduce(|| 0.0, f64::max);
    (chosen, radius)
}
