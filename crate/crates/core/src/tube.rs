//! Fibered tubes around α–β bouquets.
//!
//! A tube is `π_α⁻¹(U_α) ∪ π_β⁻¹(U_β)` where `U_α` is an open disc of angular
//! radius `r_alpha` around the center's point and `U_β` an open disc of radius
//! `r_beta` around the center's line.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::flag::Flag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TubeError {
    #[error("tube radii must lie in (0, pi/2), got r_alpha={0}, r_beta={1}")]
    BadRadius(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tube {
    center: Flag,
    r_alpha: f64,
    r_beta: f64,
}

impl Tube {
    pub fn new(center: Flag, r_alpha: f64, r_beta: f64) -> Result<Self, TubeError> {
        let ok = |r: f64| r > 0.0 && r < FRAC_PI_2;
        if !ok(r_alpha) || !ok(r_beta) {
            return Err(TubeError::BadRadius(r_alpha, r_beta));
        }
        Ok(Tube {
            center,
            r_alpha,
            r_beta,
        })
    }

    pub fn center(&self) -> &Flag {
        &self.center
    }

    pub fn r_alpha(&self) -> f64 {
        self.r_alpha
    }

    pub fn r_beta(&self) -> f64 {
        self.r_beta
    }

    /// `(angle to the center point, angle to the center line)`.
    pub fn angles(&self, x: &Flag) -> (f64, f64) {
        (
            x.point().angle(self.center.point()),
            x.line().angle(self.center.line()),
        )
    }

    /// Signed containment depth: positive inside, negative outside, zero on
    /// the boundary.
    pub fn depth(&self, x: &Flag) -> f64 {
        let (a, b) = self.angles(x);
        (self.r_alpha - a).max(self.r_beta - b)
    }

    pub fn contains(&self, x: &Flag) -> bool {
        let (a, b) = self.angles(x);
        a < self.r_alpha || b < self.r_beta
    }

    /// Slack of `self ∩ other = ∅`; positive iff the open tubes are disjoint
    /// with that much angular room, computed exactly from the four pairings of
    /// point discs and line discs.
    pub fn separation(&self, other: &Tube) -> f64 {
        let (c1, c2) = (&self.center, &other.center);
        // two point discs meet iff their centers are closer than the radii sum
        let aa = c1.point().angle(c2.point()) - (self.r_alpha + other.r_alpha);
        let bb = c1.line().angle(c2.line()) - (self.r_beta + other.r_beta);
        // a point disc and a line disc share a flag iff some point of the
        // first is orthogonal to some normal of the second
        let ab = FRAC_PI_2
            - line_to_point_angle(c1, c2)
            - (self.r_alpha + other.r_beta);
        let ba = FRAC_PI_2
            - line_to_point_angle(c2, c1)
            - (other.r_alpha + self.r_beta);
        aa.min(bb).min(ab).min(ba)
    }

    pub fn is_disjoint(&self, other: &Tube) -> bool {
        self.separation(other) >= 0.0
    }

    /// Slack of `closure(self) ⊂ interior(other)` for concentric tubes.
    pub fn nested_slack(&self, other: &Tube) -> Option<f64> {
        if self.center != other.center {
            return None;
        }
        Some((other.r_alpha - self.r_alpha).min(other.r_beta - self.r_beta))
    }
}

/// Angle between the point of `x` and the line normal of `y`.
fn line_to_point_angle(x: &Flag, y: &Flag) -> f64 {
    crate::linalg::line_angle(&x.p(), &y.n())
}
