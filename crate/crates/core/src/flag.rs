//! Points, lines and flags of the real projective plane.
//!
//! A flag is an incident pair `(p, D)` with `p` a point of `RP^2` and `D` a
//! projective line through it. Lines are stored by their normal covector, so
//! incidence reads `<p, n> = 0`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{line_angle, Vec3};

/// Norm below which an input vector is treated as zero.
pub const ZERO_TOL: f64 = 1e-300;
/// Relative bound on `|<p, n>|` accepted by [`make_flag`].
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Drift above which the line normal is re-projected after an action.
pub const REPROJECT_TOL: f64 = 1e-12;
/// Coordinates below this are skipped when fixing the canonical sign.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlagError {
    #[error("input vector is numerically zero")]
    ZeroVector,
    #[error("point and line are not incident (|<p,n>| / (|p||n|) = {0:e})")]
    NonIncident(f64),
    #[error("non-finite coordinates")]
    NonFinite,
}

fn canonical_sign(v: Vec3) -> Vec3 {
    for i in 0..3 {
        if v[i].abs() > SIGN_TOL {
            return if v[i] < 0.0 { -v } else { v };
        }
    }
    v
}

fn canonical_unit(v: &Vec3) -> Result<Vec3, FlagError> {
    if !v.is_finite() {
        return Err(FlagError::NonFinite);
    }
    // rescale first so tiny-but-nonzero inputs normalize cleanly
    let m = v.max_abs();
    if m <= ZERO_TOL {
        return Err(FlagError::ZeroVector);
    }
    let u = v.scale(1.0 / m).normalized(0.0).ok_or(FlagError::ZeroVector)?;
    Ok(canonical_sign(u))
}

/// A point of `RP^2`, stored as a canonical unit representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint(Vec3);

/// A projective line, stored by its canonical unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjLine(Vec3);

impl ProjPoint {
    pub fn new(v: Vec3) -> Result<Self, FlagError> {
        canonical_unit(&v).map(ProjPoint)
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn angle(&self, other: &ProjPoint) -> f64 {
        line_angle(&self.0, &other.0)
    }
}

impl ProjLine {
    pub fn from_normal(n: Vec3) -> Result<Self, FlagError> {
        canonical_unit(&n).map(ProjLine)
    }

    /// The line spanned by two distinct points.
    pub fn through(a: &ProjPoint, b: &ProjPoint) -> Result<Self, FlagError> {
        Self::from_normal(a.0.cross(&b.0))
    }

    pub fn normal(&self) -> Vec3 {
        self.0
    }

    pub fn angle(&self, other: &ProjLine) -> f64 {
        line_angle(&self.0, &other.0)
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.0.dot(&p.0).abs() <= INCIDENCE_TOL
    }
}

/// An element `x = (p, D)` of the flag space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flag {
    p: ProjPoint,
    d: ProjLine,
}

/// Builds the flag `([p], D)` where `D` has normal `n`.
pub fn make_flag(p: Vec3, n: Vec3) -> Result<Flag, FlagError> {
    let pu = canonical_unit(&p)?;
    let nu = canonical_unit(&n)?;
    let residual = pu.dot(&nu).abs();
    if residual > INCIDENCE_TOL {
        return Err(FlagError::NonIncident(residual));
    }
    Ok(Flag::from_unit_parts(pu, nu))
}

impl Flag {
    /// Flag from already-unit vectors, re-projecting the normal when the
    /// incidence drifted past [`REPROJECT_TOL`]. Used after group actions.
    pub(crate) fn from_unit_parts(p: Vec3, n: Vec3) -> Flag {
        let p = canonical_sign(p);
        let drift = p.dot(&n);
        let n = if drift.abs() > REPROJECT_TOL {
            (n - p.scale(drift)).normalized(0.0).unwrap_or_else(|| p.any_orthogonal())
        } else {
            n
        };
        Flag {
            p: ProjPoint(p),
            d: ProjLine(canonical_sign(n)),
        }
    }

    /// Flag from arbitrary nonzero representatives, normalizing both and
    /// re-projecting the normal onto `p^perp`.
    pub(crate) fn from_raw(p: Vec3, n: Vec3) -> Flag {
        let p = p
            .scale(1.0 / p.max_abs())
            .normalized(0.0)
            .expect("point image of an invertible map is nonzero");
        let n = n
            .scale(1.0 / n.max_abs())
            .normalized(0.0)
            .expect("line image of an invertible map is nonzero");
        Flag::from_unit_parts(p, n)
    }

    /// Rebuilds a flag from stored canonical coordinates without touching
    /// the bits when they already satisfy the invariants.
    pub fn from_canonical(p: [f64; 3], n: [f64; 3]) -> Result<Flag, FlagError> {
        let (pv, nv) = (Vec3(p), Vec3(n));
        if !pv.is_finite() || !nv.is_finite() {
            return Err(FlagError::NonFinite);
        }
        let unit = |v: &Vec3| (v.norm() - 1.0).abs() <= 1e-12 && canonical_sign(*v) == *v;
        if unit(&pv) && unit(&nv) && pv.dot(&nv).abs() <= INCIDENCE_TOL {
            Ok(Flag {
                p: ProjPoint(pv),
                d: ProjLine(nv),
            })
        } else {
            make_flag(pv, nv)
        }
    }

    pub fn point(&self) -> &ProjPoint {
        &self.p
    }

    pub fn line(&self) -> &ProjLine {
        &self.d
    }

    pub fn p(&self) -> Vec3 {
        self.p.0
    }

    pub fn n(&self) -> Vec3 {
        self.d.0
    }

    pub fn incidence_residual(&self) -> f64 {
        self.p.0.dot(&self.d.0).abs()
    }

    /// Coordinates as `[px, py, pz, nx, ny, nz]`.
    pub fn to_array(&self) -> [f64; 6] {
        let (p, n) = (self.p.0, self.d.0);
        [p[0], p[1], p[2], n[0], n[1], n[2]]
    }

    /// The standard flag `([e1], [e1, e2])`.
    pub fn standard() -> Flag {
        Flag::from_unit_parts(Vec3::basis(0), Vec3::basis(2))
    }

    /// Point of the α-circle through `self` whose line has angle `theta`
    /// from `self`'s line inside the pencil at `p`.
    pub fn alpha_rotate(&self, theta: f64) -> Flag {
        let (p, n0) = (self.p.0, self.d.0);
        let e = p.cross(&n0);
        Flag::from_unit_parts(p, n0.scale(theta.cos()) + e.scale(theta.sin()))
    }

    /// Point of the β-circle through `self` moved by `theta` along the line.
    pub fn beta_rotate(&self, theta: f64) -> Flag {
        let (p0, n) = (self.p.0, self.d.0);
        let e = n.cross(&p0);
        Flag::from_unit_parts(p0.scale(theta.cos()) + e.scale(theta.sin()), n)
    }
}

/// Sum-of-angles metric on the flag space.
pub fn flag_distance(x: &Flag, y: &Flag) -> f64 {
    x.p.angle(&y.p) + x.d.angle(&y.d)
}

/// Distance from `y` to the α-circle `C_α(x)` (flags sharing `x`'s point).
pub fn dist_to_alpha_circle(y: &Flag, x: &Flag) -> f64 {
    let s = y.n().dot(&x.p()).abs().min(1.0);
    y.p.angle(&x.p) + s.asin()
}

/// Distance from `y` to the β-circle `C_β(x)` (flags sharing `x`'s line).
pub fn dist_to_beta_circle(y: &Flag, x: &Flag) -> f64 {
    let s = y.p().dot(&x.n()).abs().min(1.0);
    y.d.angle(&x.d) + s.asin()
}

/// Distance from `y` to the bouquet `C_α(x) ∪ C_β(x)`.
pub fn dist_to_bouquet(y: &Flag, x: &Flag) -> f64 {
    dist_to_alpha_circle(y, x).min(dist_to_beta_circle(y, x))
}

/// Equally spaced angles `k * pi / m`, `k = 0..m`.
fn pencil_angles(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |k| k as f64 * PI / m as f64)
}

pub(crate) fn alpha_circle_points(x: &Flag, m: usize) -> Vec<Flag> {
    pencil_angles(m).map(|t| x.alpha_rotate(t)).collect()
}

pub(crate) fn beta_circle_points(x: &Flag, m: usize) -> Vec<Flag> {
    pencil_angles(m).map(|t| x.beta_rotate(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn e(i: usize) -> Vec3 {
        Vec3::basis(i)
    }

    #[test]
    fn make_flag_examples() {
        let x = make_flag(e(0), e(2)).unwrap();
        assert_eq!(x.p(), e(0));
        assert_eq!(x.n(), e(2));
        let y = make_flag(e(2), e(0)).unwrap();
        assert_eq!(y.p(), e(2));
        assert_eq!(y.n(), e(0));
        assert!(matches!(make_flag(e(0), e(0)), Err(FlagError::NonIncident(_))));
        assert_eq!(make_flag(Vec3::ZERO, e(0)), Err(FlagError::ZeroVector));
    }

    #[test]
    fn canonical_sign_and_scale() {
        let x = make_flag(Vec3::new(-2.0, 0.0, 0.0), Vec3::new(0.0, -5.0, 0.0)).unwrap();
        assert_eq!(x.p(), e(0));
        assert_eq!(x.n(), e(1));
        let y = make_flag(Vec3::new(1e-12, -3.0, 4.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!(y.p()[1] > 0.0);
    }

    #[test]
    fn distance_examples() {
        let x = make_flag(e(0), e(2)).unwrap();
        let y = make_flag(e(2), e(0)).unwrap();
        let z = make_flag(e(0), e(1)).unwrap();
        assert_eq!(flag_distance(&x, &x), 0.0);
        assert!((flag_distance(&x, &y) - PI).abs() < 1e-15);
        assert!((flag_distance(&x, &z) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn circles_share_the_right_component() {
        let x = Flag::standard();
        for f in alpha_circle_points(&x, 7) {
            assert_eq!(f.p(), e(0));
            assert!(dist_to_alpha_circle(&f, &x) < 1e-15);
        }
        for f in beta_circle_points(&x, 7) {
            assert_eq!(f.n(), e(2));
            assert!(dist_to_beta_circle(&f, &x) < 1e-15);
        }
    }

    #[test]
    fn analytic_circle_distance_matches_dense_sampling() {
        let x = make_flag(Vec3::new(1.0, 2.0, 0.5), Vec3::new(-2.0, 1.0, 0.0)).unwrap();
        let y = make_flag(Vec3::new(0.3, -0.2, 1.0), Vec3::new(1.0, 1.5, 0.0)).unwrap();
        let dense = |pts: Vec<Flag>| {
            pts.iter()
                .map(|f| flag_distance(&y, f))
                .fold(f64::INFINITY, f64::min)
        };
        let a = dense(alpha_circle_points(&x, 200_000));
        let b = dense(beta_circle_points(&x, 200_000));
        assert!((dist_to_alpha_circle(&y, &x) - a).abs() < 1e-4);
        assert!((dist_to_beta_circle(&y, &x) - b).abs() < 1e-4);
        assert!(dist_to_alpha_circle(&y, &x) <= a + 1e-12);
        assert!(dist_to_beta_circle(&y, &x) <= b + 1e-12);
    }
}
