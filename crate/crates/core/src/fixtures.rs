//! Frozen configurations shared by the tests, the acceptance suite and the
//! example scene files.

use crate::flag::{make_flag, Flag};
use crate::group::GroupElem;
use crate::linalg::{Mat3, Vec3};
use crate::schottky::SchottkyConfig;
use crate::tube::Tube;

/// Exponent found by the surgery search for [`gluing_generator`] and
/// [`gluing_tube`] (margin [`GLUING_MARGIN`], [`GLUING_SAMPLES`] samples, seed 7).
/// Coarser samples can miss the thin failure at the previous exponent.
pub const GLUING_EXPONENT: usize = 4;
pub const GLUING_MARGIN: f64 = 0.01;
pub const GLUING_SAMPLES: usize = 10_000;
pub const SCHOTTKY_MARGIN: f64 = 0.01;
pub const SCHOTTKY_RADIUS: f64 = 0.4;
pub const GLUING_RADIUS: f64 = 0.15;
/// Deformation weights `(s₁, s₂, t₁, t₂)` with commensurable entries.
pub const DEFORM_EPS_A: [f64; 4] = [0.5, 0.25, 0.125, 1.0 / 3.0];
/// `(√2/10, √3/10, 0, 0)`.
pub const DEFORM_EPS_B: [f64; 4] = [0.141_421_356_237_309_5, 0.173_205_080_756_887_72, 0.0, 0.0];

pub fn diag_421() -> GroupElem {
    GroupElem::diag(4.0, 2.0, 1.0).expect("invertible")
}

/// `([e₁], [e₁, e₂])`.
pub fn e1_flag() -> Flag {
    make_flag(Vec3::basis(0), Vec3::basis(2)).expect("incident")
}

/// `([e₃], [e₂, e₃])`.
pub fn e3_flag() -> Flag {
    make_flag(Vec3::basis(2), Vec3::basis(0)).expect("incident")
}

/// Rank-one Schottky configuration: `diag(16,4,1)²` with tubes of radius
/// 0.4 at its fixed flags. The unsquared generator fails the mapping test
/// at this radius.
pub fn rank_one_schottky() -> SchottkyConfig {
    let g = GroupElem::diag(256.0, 16.0, 1.0).expect("invertible");
    let r = SCHOTTKY_RADIUS;
    let pair = (
        Tube::new(e3_flag(), r, r).expect("radius"),
        Tube::new(e1_flag(), r, r).expect("radius"),
    );
    SchottkyConfig::new(vec![g], vec![pair], SCHOTTKY_MARGIN).expect("consistent")
}

/// A flag in the fundamental domain of [`rank_one_schottky`], equidistant
/// from both fixed bouquets.
pub fn domain_flag() -> Flag {
    make_flag(Vec3::new(1.0, 0.0, 1.0), Vec3::new(1.0, 1.0, -1.0)).expect("incident")
}

/// Seed tube for the freeness check, inside the fundamental domain.
pub fn freeness_seed_tube() -> Tube {
    Tube::new(domain_flag(), 0.15, 0.15).expect("radius")
}

/// Orthonormal frame `[n, p × n, p]` of [`domain_flag`].
fn domain_frame() -> Mat3 {
    let x = domain_flag();
    let (p, n) = (x.p(), x.n());
    Mat3::from_columns(n, p.cross(&n), p)
}

/// Loxodromic element with eigenvalues `(4, 2, 1)` whose repelling flag is
/// [`domain_flag`].
pub fn gluing_generator() -> GroupElem {
    let r = domain_frame();
    GroupElem::from_matrix(r * Mat3::diag(4.0, 2.0, 1.0) * r.transpose()).expect("invertible")
}

/// The outer gluing tube `H₂`.
pub fn gluing_tube() -> Tube {
    Tube::new(domain_flag(), GLUING_RADIUS, GLUING_RADIUS).expect("radius")
}

/// Rotation by 0.7 rad about `(1, 2, 2) / 3`, carrying the first group's
/// gluing region to the second's.
pub fn second_conjugator() -> GroupElem {
    let axis = Vec3::new(1.0, 2.0, 2.0).scale(1.0 / 3.0);
    let (s, c) = 0.7_f64.sin_cos();
    let k = Mat3::from_row_major([
        0.0, -axis[2], axis[1], axis[2], 0.0, -axis[0], -axis[1], axis[0], 0.0,
    ]);
    let rot = Mat3::IDENTITY + k.scale(s) + (k * k).scale(1.0 - c);
    GroupElem::from_matrix(rot).expect("rotation")
}

/// [`rank_one_schottky`] transported by [`second_conjugator`].
pub fn second_schottky() -> SchottkyConfig {
    rank_one_schottky().conjugate_by(&second_conjugator())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::flag_distance;
    use crate::spectral::classify;

    #[test]
    fn gluing_generator_repels_from_domain_flag() {
        let spec = classify(&gluing_generator()).unwrap();
        let lox = spec.loxodromic().unwrap();
        assert!(flag_distance(&lox.x_minus, &domain_flag()) < 1e-12);
    }

    #[test]
    fn gluing_tube_sits_in_the_domain() {
        let cfg = rank_one_schottky();
        for t in cfg.tubes() {
            assert!(t.separation(&gluing_tube()) > 0.05);
        }
    }

    #[test]
    fn deform_b_is_scaled_roots() {
        assert!((DEFORM_EPS_B[0] - 2f64.sqrt() / 10.0).abs() < 1e-16);
        assert!((DEFORM_EPS_B[1] - 3f64.sqrt() / 10.0).abs() < 1e-16);
    }

    #[test]
    fn conjugator_is_orthogonal() {
        let m = *second_conjugator().matrix();
        let s = m.frobenius() / 3f64.sqrt();
        let q = m.scale(1.0 / s);
        assert!((q * q.transpose()).dist_max(&Mat3::IDENTITY) < 1e-14);
    }
}
