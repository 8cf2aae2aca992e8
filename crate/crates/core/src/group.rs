//! `PGL(3, R)`, the standard anti-flag involution κ and the extended group
//! they generate.
//!
//! A [`GroupElem`] carries both a representative `m` and its inverse
//! transpose, each normalized to unit Frobenius norm. Points move by `m`,
//! line normals by the dual matrix. Keeping the dual explicitly means high
//! powers never need a cofactor of a nearly rank-one matrix, and inversion
//! and `Θ` are exact swaps.

use std::fmt;

use thiserror::Error;

use crate::flag::{Flag, SIGN_TOL};
use crate::linalg::Mat3;

/// Smallest `|det|` accepted for a Frobenius-normalized input matrix.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("matrix is singular at tolerance (|det| of normalized matrix = {0:e})")]
    Singular(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("element is not loxodromic with positive spectrum")]
    NotPositiveLoxodromic,
    #[error("eigenvector residual {0:e} exceeds tolerance")]
    IllConditioned(f64),
}

fn normalize_projective(m: &Mat3) -> Mat3 {
    let f = m.frobenius();
    let mut out = m.scale(1.0 / f);
    if let Some(&first) = out.0.iter().flatten().find(|x| x.abs() > SIGN_TOL) {
        if first < 0.0 {
            out = out.scale(-1.0);
        }
    }
    out
}

/// An element of `PGL(3, R)`.
#[derive(Clone, Copy, PartialEq)]
pub struct GroupElem {
    m: Mat3,
    dual: Mat3,
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElem({:?})", self.m.to_row_major())
    }
}

impl GroupElem {
    pub fn identity() -> Self {
        let m = normalize_projective(&Mat3::IDENTITY);
        GroupElem { m, dual: m }
    }

    pub fn from_matrix(m: Mat3) -> Result<Self, GroupError> {
        if !m.is_finite() {
            return Err(GroupError::NonFinite);
        }
        let f = m.frobenius();
        if f == 0.0 {
            return Err(GroupError::Singular(0.0));
        }
        let unit = m.scale(1.0 / f);
        let det = unit.det();
        if det.abs() <= DET_TOL {
            return Err(GroupError::Singular(det));
        }
        Ok(GroupElem {
            m: normalize_projective(&unit),
            dual: normalize_projective(&unit.cofactor()),
        })
    }

    pub fn from_row_major(v: [f64; 9]) -> Result<Self, GroupError> {
        Self::from_matrix(Mat3::from_row_major(v))
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Result<Self, GroupError> {
        Self::from_matrix(Mat3::diag(a, b, c))
    }

    /// Builds an element from a matrix and its inverse transpose, both
    /// known up to scale.
    pub(crate) fn from_pair(m: &Mat3, dual: &Mat3) -> Self {
        GroupElem {
            m: normalize_projective(m),
            dual: normalize_projective(dual),
        }
    }

    /// Normalized representative.
    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// Normalized representative of the inverse transpose.
    pub fn dual_matrix(&self) -> &Mat3 {
        &self.dual
    }

    pub fn compose(&self, other: &GroupElem) -> GroupElem {
        GroupElem::from_pair(&(self.m * other.m), &(self.dual * other.dual))
    }

    pub fn inverse(&self) -> GroupElem {
        GroupElem::from_pair(&self.dual.transpose(), &self.m.transpose())
    }

    /// `g^n` by repeated squaring, renormalizing after every product.
    pub fn pow(&self, n: i64) -> GroupElem {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = GroupElem::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    /// Distance between normalized representatives (max entry).
    pub fn distance(&self, other: &GroupElem) -> f64 {
        self.m.dist_max(&other.m)
    }

    /// Distance to the identity class.
    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&GroupElem::identity())
    }
}

/// Projective action on flags: points by `m`, normals by `m^{-T}`.
pub fn act(g: &GroupElem, x: &Flag) -> Flag {
    Flag::from_raw(g.m * x.p(), g.dual * x.n())
}

/// The duality twist `Θ(g) = g^{-T}`.
pub fn theta(g: &GroupElem) -> GroupElem {
    GroupElem {
        m: g.dual,
        dual: g.m,
    }
}

/// The standard involution `κ(p, D) = (D^⊥, p^⊥)`.
pub fn kappa(x: &Flag) -> Flag {
    Flag::from_unit_parts(x.n(), x.p())
}

/// An element of the group generated by `PGL(3)` and κ: the map `κ ∘ g`
/// when `swap` is set, `g` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtElem {
    pub g: GroupElem,
    pub swap: bool,
}

impl ExtElem {
    pub fn plain(g: GroupElem) -> Self {
        ExtElem { g, swap: false }
    }

    pub fn kappa() -> Self {
        ExtElem {
            g: GroupElem::identity(),
            swap: true,
        }
    }

    pub fn identity() -> Self {
        Self::plain(GroupElem::identity())
    }

    /// `(κ^s g)^{-1} = κ^s Θ^s(g^{-1})`.
    pub fn inverse(&self) -> ExtElem {
        let inv = self.g.inverse();
        ExtElem {
            g: if self.swap { theta(&inv) } else { inv },
            swap: self.swap,
        }
    }
}

/// Composition `a ∘ b`, using `g κ = κ Θ(g)` to move κ to the left.
pub fn ext_compose(a: &ExtElem, b: &ExtElem) -> ExtElem {
    let left = if b.swap { theta(&a.g) } else { a.g };
    ExtElem {
        g: left.compose(&b.g),
        swap: a.swap ^ b.swap,
    }
}

pub fn ext_act(a: &ExtElem, x: &Flag) -> Flag {
    let y = act(&a.g, x);
    if a.swap {
        kappa(&y)
    } else {
        y
    }
}

/// The anti-flag involution `g^{-1} ∘ κ ∘ g`.
pub fn antiflag_involution(g: &GroupElem) -> ExtElem {
    let kg = ext_compose(&ExtElem::kappa(), &ExtElem::plain(*g));
    ext_compose(&ExtElem::plain(g.inverse()), &kg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::{flag_distance, make_flag};
    use crate::linalg::Vec3;

    fn e(i: usize) -> Vec3 {
        Vec3::basis(i)
    }

    fn sample_matrix() -> GroupElem {
        GroupElem::from_row_major([2.0, 1.0, 0.0, -0.5, 1.5, 0.3, 0.2, -0.1, 0.9]).unwrap()
    }

    #[test]
    fn normalization_is_projective() {
        let g = sample_matrix();
        let h = GroupElem::from_matrix(g.matrix().scale(-3.7)).unwrap();
        assert!(g.distance(&h) < 1e-15);
        assert!((g.matrix().frobenius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_rejected() {
        let r = GroupElem::from_row_major([1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0]);
        assert!(matches!(r, Err(GroupError::Singular(_))));
    }

    #[test]
    fn act_examples() {
        let x = Flag::standard();
        assert_eq!(act(&GroupElem::identity(), &x), x);
        let g = GroupElem::diag(4.0, 2.0, 1.0).unwrap();
        assert!(flag_distance(&act(&g, &x), &x) < 1e-15);
    }

    #[test]
    fn theta_examples() {
        let g = GroupElem::diag(4.0, 2.0, 1.0).unwrap();
        let t = theta(&g);
        let expected = GroupElem::diag(0.25, 0.5, 1.0).unwrap();
        assert!(t.distance(&expected) < 1e-15);
        assert!(theta(&t).distance(&g) < 1e-15);
        let h = sample_matrix();
        assert!(theta(&g.compose(&h)).distance(&theta(&g).compose(&theta(&h))) < 1e-14);
    }

    #[test]
    fn kappa_examples() {
        let x = Flag::standard();
        let y = kappa(&x);
        assert_eq!(y, make_flag(e(2), e(0)).unwrap());
        assert_eq!(kappa(&y), x);
    }

    #[test]
    fn ext_compose_examples() {
        let k = ExtElem::kappa();
        let kk = ext_compose(&k, &k);
        assert!(!kk.swap);
        assert!(kk.g.distance_to_identity() < 1e-15);
        let g = GroupElem::diag(4.0, 2.0, 1.0).unwrap();
        let kg = ext_compose(&k, &ExtElem::plain(g));
        assert!(kg.swap);
        let sq = ext_compose(&kg, &kg);
        assert!(!sq.swap);
        assert!(sq.g.distance_to_identity() < 1e-15);
        let plain = ExtElem::plain(g);
        assert!(!ext_compose(&plain, &plain).swap);
        assert!(ext_compose(&kg, &plain).swap);
    }

    #[test]
    fn ext_act_examples() {
        let x = Flag::standard();
        let g = sample_matrix();
        assert_eq!(ext_act(&ExtElem::plain(g), &x), act(&g, &x));
        assert_eq!(ext_act(&ExtElem::kappa(), &x), make_flag(e(2), e(0)).unwrap());
    }

    #[test]
    fn ext_compose_agrees_with_actions() {
        let x = make_flag(Vec3::new(0.3, 1.0, -0.2), Vec3::new(1.0, 0.0, 1.5)).unwrap();
        let a = ExtElem { g: sample_matrix(), swap: true };
        let b = ExtElem { g: GroupElem::diag(3.0, -1.0, 0.5).unwrap(), swap: true };
        let lhs = ext_act(&ext_compose(&a, &b), &x);
        let rhs = ext_act(&a, &ext_act(&b, &x));
        assert!(flag_distance(&lhs, &rhs) < 1e-12);
        let inv = ext_compose(&a, &a.inverse());
        assert!(!inv.swap && inv.g.distance_to_identity() < 1e-14);
    }

    #[test]
    fn antiflag_involution_examples() {
        let k = antiflag_involution(&GroupElem::identity());
        assert!(k.swap && k.g.distance_to_identity() < 1e-15);
        let g = sample_matrix();
        let phi = antiflag_involution(&g);
        let sq = ext_compose(&phi, &phi);
        assert!(!sq.swap);
        assert!(sq.g.distance_to_identity() < 1e-10);
    }

    #[test]
    fn pow_matches_repeated_products() {
        let g = sample_matrix();
        let mut acc = GroupElem::identity();
        for _ in 0..7 {
            acc = acc.compose(&g);
        }
        assert!(g.pow(7).distance(&acc) < 1e-13);
        assert!(g.pow(-7).compose(&acc).distance_to_identity() < 1e-12);
        assert_eq!(g.pow(0), GroupElem::identity());
    }

    #[test]
    fn high_powers_keep_line_action_accurate() {
        // the dual matrix is powered directly, so fixed lines stay fixed
        let g = GroupElem::diag(4.0, 2.0, 1.0).unwrap();
        let x = make_flag(e(2), e(0)).unwrap();
        assert_eq!(act(&g.pow(200), &x), x);
    }
}
