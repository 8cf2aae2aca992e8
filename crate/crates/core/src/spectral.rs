//! Spectral classification of projective classes and real one-parameter
//! subgroups through loxodromic elements.

use std::f64::consts::PI;

use crate::flag::{Flag, ProjPoint};
use crate::group::{GroupElem, GroupError};
use crate::linalg::{Mat3, Vec3};

/// Minimal relative gap between absolute eigenvalues for loxodromy.
pub const GAP_TOL: f64 = 1e-9;
/// Largest accepted eigenvector residual `|m v - λ v|` (unit `m`, `v`).
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Spectral data of a loxodromic class, ordered by decreasing `|λ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Loxodromic {
    /// Eigenvalues of the normalized representative.
    pub eigenvalues: [f64; 3],
    /// Unit eigenvectors matching `eigenvalues`.
    pub eigenvectors: [Vec3; 3],
    pub p_plus: ProjPoint,
    pub p_pm: ProjPoint,
    pub p_minus: ProjPoint,
    /// Attractive flag `(p₊, p₊ ∨ p±)`.
    pub x_plus: Flag,
    /// Repulsive flag `(p₋, p₋ ∨ p±)`.
    pub x_minus: Flag,
    /// Largest eigenvector residual.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Loxodromic(Box<Loxodromic>),
    /// Complex or absolute-value-degenerate spectrum; carries whatever
    /// real eigenvalues were found.
    NonLoxodromic { real_eigenvalues: Vec<f64> },
}

impl Spectrum {
    pub fn is_loxodromic(&self) -> bool {
        matches!(self, Spectrum::Loxodromic(_))
    }

    pub fn loxodromic(&self) -> Option<&Loxodromic> {
        match self {
            Spectrum::Loxodromic(l) => Some(l),
            Spectrum::NonLoxodromic { .. } => None,
        }
    }
}

/// Real roots of `λ³ + aλ² + bλ + c`, or `None` when a complex pair exists.
fn real_cubic_roots(a: f64, b: f64, c: f64) -> Option<[f64; 3]> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = 4.0 * p * p * p + 27.0 * q * q;
    let shift = -a / 3.0;
    if p >= 0.0 {
        // monotone depressed cubic: a single real root unless p = q = 0
        if p == 0.0 && q == 0.0 {
            return Some([shift; 3]);
        }
        return None;
    }
    if disc > 0.0 {
        return None;
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, root) in roots.iter_mut().enumerate() {
        *root = r * (phi - 2.0 * PI * k as f64 / 3.0).cos() + shift;
    }
    Some(roots)
}

fn newton_step(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let f = ((x + a) * x + b) * x + c;
    let df = (3.0 * x + 2.0 * a) * x + b;
    if df == 0.0 || !df.is_finite() {
        return x;
    }
    let y = x - f / df;
    let fy = ((y + a) * y + b) * y + c;
    if fy.abs() <= f.abs() {
        y
    } else {
        x
    }
}

/// Unit eigenvector for a simple eigenvalue `lambda` of `m`.
///
/// The adjugate of `m - λ` has rank one with image the eigenline, so its
/// largest column is a first guess; one more adjugate application refines
/// it without ever dividing by the near-zero determinant.
fn eigenvector(m: &Mat3, lambda: f64) -> Vec3 {
    let a = *m - Mat3::IDENTITY.scale(lambda);
    let adj = a.cofactor().transpose();
    let mut best = adj.col(0);
    for j in 1..3 {
        if adj.col(j).norm() > best.norm() {
            best = adj.col(j);
        }
    }
    let v = match best.normalized(0.0) {
        Some(v) => v,
        None => return Vec3::basis(0),
    };
    let refined = adj.mul_vec(&v);
    refined.normalized(0.0).unwrap_or(v)
}

/// Classifies `g` as loxodromic or not and, when loxodromic, returns its
/// eigenlines and fixed flags.
pub fn classify(g: &GroupElem) -> Result<Spectrum, GroupError> {
    let m = g.matrix();
    let a = -m.trace();
    let b = m.cofactor().trace();
    let c = -m.det();
    let roots = match real_cubic_roots(a, b, c) {
        Some(r) => r,
        None => {
            // report the single real root
            let mut x = -a / 3.0;
            for _ in 0..100 {
                x = newton_step(a, b, c, x);
            }
            return Ok(Spectrum::NonLoxodromic {
                real_eigenvalues: vec![x],
            });
        }
    };
    let mut lam = roots.map(|x| newton_step(a, b, c, x));
    lam.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
    // the smallest root is recovered more accurately from the determinant
    if lam[0] != 0.0 && lam[1] != 0.0 {
        lam[2] = -c / (lam[0] * lam[1]);
    }
    let gap = |hi: f64, lo: f64| (hi.abs() - lo.abs()) / hi.abs();
    if !(gap(lam[0], lam[1]) >= GAP_TOL && gap(lam[1], lam[2]) >= GAP_TOL) {
        return Ok(Spectrum::NonLoxodromic {
            real_eigenvalues: lam.to_vec(),
        });
    }
    let vecs = lam.map(|l| eigenvector(m, l));
    let residual = (0..3)
        .map(|i| (m.mul_vec(&vecs[i]) - vecs[i].scale(lam[i])).norm())
        .fold(0.0_f64, f64::max);
    if !(residual <= RESIDUAL_TOL) {
        return Err(GroupError::IllConditioned(residual));
    }
    let pt = |v: &Vec3| ProjPoint::new(*v).map_err(|_| GroupError::IllConditioned(residual));
    let x_plus = Flag::from_raw(vecs[0], vecs[0].cross(&vecs[1]));
    let x_minus = Flag::from_raw(vecs[2], vecs[2].cross(&vecs[1]));
    Ok(Spectrum::Loxodromic(Box::new(Loxodromic {
        eigenvalues: lam,
        eigenvectors: vecs,
        p_plus: pt(&vecs[0])?,
        p_pm: pt(&vecs[1])?,
        p_minus: pt(&vecs[2])?,
        x_plus,
        x_minus,
        residual,
    })))
}

/// Real powers `g^t` of a loxodromic element with a spectrum of constant
/// sign, precomputed on the eigenbasis.
#[derive(Clone, Debug)]
pub struct OneParameterGroup {
    basis: Mat3,
    basis_inv: Mat3,
    logs: [f64; 3],
}

impl OneParameterGroup {
    pub fn new(g: &GroupElem) -> Result<Self, GroupError> {
        let spec = classify(g)?;
        let lox = spec.loxodromic().ok_or(GroupError::NotPositiveLoxodromic)?;
        let lam = lox.eigenvalues;
        // projective classes allow a global sign flip
        let positive = lam.iter().all(|&l| l > 0.0) || lam.iter().all(|&l| l < 0.0);
        if !positive {
            return Err(GroupError::NotPositiveLoxodromic);
        }
        let v = lox.eigenvectors;
        let basis = Mat3::from_columns(v[0], v[1], v[2]);
        let basis_inv = basis
            .inverse()
            .ok_or(GroupError::IllConditioned(lox.residual))?;
        Ok(OneParameterGroup {
            basis,
            basis_inv,
            logs: lam.map(|l| l.abs().ln()),
        })
    }

    /// Natural logarithms of the absolute eigenvalues, largest first.
    pub fn log_eigenvalues(&self) -> [f64; 3] {
        self.logs
    }

    fn scaled_diag(&self, t: f64) -> Mat3 {
        let w = self.logs.map(|l| t * l);
        let top = w[0].max(w[1]).max(w[2]);
        Mat3::diag((w[0] - top).exp(), (w[1] - top).exp(), (w[2] - top).exp())
    }

    pub fn at(&self, t: f64) -> GroupElem {
        let m = self.basis * self.scaled_diag(t) * self.basis_inv;
        let dual = self.basis_inv.transpose() * self.scaled_diag(-t) * self.basis.transpose();
        GroupElem::from_pair(&m, &dual)
    }
}

/// `g^t` for real `t`.
pub fn one_param_power(g: &GroupElem, t: f64) -> Result<GroupElem, GroupError> {
    Ok(OneParameterGroup::new(g)?.at(t))
}
