//! Holonomy of cyclic quotients and of the deformed genus-two structures:
//! surface words, the abelian representations `ρ_ε`, density of their
//! exponent groups, trace invariants, covering parity and the surjectivity
//! obstruction.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{coverage_certificate, loxodromic_data, CoverageReport, DynamicsError};
use crate::group::{GroupElem, GroupError};
use crate::linalg::compensated_sum;
use crate::sample::{bouquet, SampledSet};
use crate::spectral::OneParameterGroup;
use crate::tube::Tube;

/// Combinations with `|value|` at or below this are exact relations, not
/// small positive values.
pub const ZERO_TOL: f64 = 1e-12;
pub const RELATOR_TOL: f64 = 1e-10;
pub const TRACE_DEDUP_TOL: f64 = 1e-9;
/// Points per circle when checking that a probe samples a bouquet.
const PROBE_BOUQUET_POINTS: usize = 64;

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error("relator image is {0:e} away from the identity")]
    Relator(f64),
    #[error("cannot parse surface word: {0}")]
    Parse(String),
    #[error("trace of g^{exponent} is not representable")]
    TraceOverflow { exponent: f64 },
    #[error("image probe misses the {which} bouquet (gap {gap:.3e} > resolution {resolution:.3e})")]
    MissingBouquetSamples { which: BouquetSide, gap: f64, resolution: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BouquetSide {
    Attracting,
    Repelling,
}

impl fmt::Display for BouquetSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BouquetSide::Attracting => "attracting",
            BouquetSide::Repelling => "repelling",
        })
    }
}

/// `(λ, n) ↦ gⁿ`; the surface-group factor acts trivially.
pub fn cyclic_holonomy(n: i64, g: &GroupElem) -> GroupElem {
    g.pow(n)
}

/// Standard generators `a₁, b₁, a₂, b₂` of the genus-two surface group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceGen {
    A1,
    B1,
    A2,
    B2,
}

impl SurfaceGen {
    pub const ALL: [SurfaceGen; 4] = [SurfaceGen::A1, SurfaceGen::B1, SurfaceGen::A2, SurfaceGen::B2];

    fn name(self) -> &'static str {
        match self {
            SurfaceGen::A1 => "a1",
            SurfaceGen::B1 => "b1",
            SurfaceGen::A2 => "a2",
            SurfaceGen::B2 => "b2",
        }
    }

    pub fn is_b(self) -> bool {
        matches!(self, SurfaceGen::B1 | SurfaceGen::B2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceLetter {
    pub gen: SurfaceGen,
    pub inverse: bool,
}

impl SurfaceLetter {
    pub fn new(gen: SurfaceGen, inverse: bool) -> Self {
        SurfaceLetter { gen, inverse }
    }

    pub fn inv(self) -> Self {
        SurfaceLetter { gen: self.gen, inverse: !self.inverse }
    }

    fn sign(self) -> f64 {
        if self.inverse {
            -1.0
        } else {
            1.0
        }
    }
}

/// Freely reduced word in the surface generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SurfaceWord {
    letters: Vec<SurfaceLetter>,
}

impl SurfaceWord {
    /// Freely reduces `letters`.
    pub fn new(letters: impl IntoIterator<Item = SurfaceLetter>) -> Self {
        let mut out: Vec<SurfaceLetter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        SurfaceWord { letters: out }
    }

    pub fn letters(&self) -> &[SurfaceLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        SurfaceWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &SurfaceWord) -> Self {
        SurfaceWord::new(self.letters.iter().chain(&other.letters).copied())
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &SurfaceWord, v: &SurfaceWord) -> Self {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    /// `[a₁, b₁][a₂, b₂]`.
    pub fn relator() -> Self {
        let g = |gen| SurfaceWord::new([SurfaceLetter::new(gen, false)]);
        SurfaceWord::commutator(&g(SurfaceGen::A1), &g(SurfaceGen::B1))
            .concat(&SurfaceWord::commutator(&g(SurfaceGen::A2), &g(SurfaceGen::B2)))
    }
}

impl fmt::Display for SurfaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(l.gen.name())?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Accepts whitespace-separated tokens `a1`, `b2^-1`, or upper case (`A1`)
/// for inverses; `e` or the empty string is the identity.
impl FromStr for SurfaceWord {
    type Err = HolonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (base, mut inverse) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            if base.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
                inverse = !inverse;
            }
            let gen = match base.to_ascii_lowercase().as_str() {
                "a1" => SurfaceGen::A1,
                "b1" => SurfaceGen::B1,
                "a2" => SurfaceGen::A2,
                "b2" => SurfaceGen::B2,
                _ => return Err(HolonomyError::Parse(format!("unknown letter `{tok}`"))),
            };
            letters.push(SurfaceLetter::new(gen, inverse));
        }
        Ok(SurfaceWord::new(letters))
    }
}

/// Exponent weights `(s₁, s₂, t₁, t₂)` of `a₁, a₂, b₁, b₂`.
pub type Eps = [f64; 4];

fn weight(eps: &Eps, gen: SurfaceGen) -> f64 {
    match gen {
        SurfaceGen::A1 => eps[0],
        SurfaceGen::A2 => eps[1],
        SurfaceGen::B1 => eps[2],
        SurfaceGen::B2 => eps[3],
    }
}

/// `a₁ ↦ g^{s₁}, b₁ ↦ g^{t₁}, a₂ ↦ g^{s₂}, b₂ ↦ g^{t₂}` and the fiber
/// generator `z ↦ g`.
#[derive(Clone, Debug)]
pub struct DeformedRep {
    base: GroupElem,
    eps: Eps,
    flow: OneParameterGroup,
}

impl DeformedRep {
    /// Fails unless `base` is positive loxodromic and the relator, evaluated
    /// letter by letter, lands within [`RELATOR_TOL`] of the identity.
    pub fn new(base: GroupElem, eps: Eps) -> Result<Self, HolonomyError> {
        let flow = OneParameterGroup::new(&base)?;
        let rep = DeformedRep { base, eps, flow };
        let residual = rep.letterwise_image(&SurfaceWord::relator()).distance_to_identity();
        if residual > RELATOR_TOL {
            return Err(HolonomyError::Relator(residual));
        }
        Ok(rep)
    }

    pub fn base(&self) -> &GroupElem {
        &self.base
    }

    pub fn eps(&self) -> Eps {
        self.eps
    }

    pub fn generator_image(&self, l: SurfaceLetter) -> GroupElem {
        self.flow.at(l.sign() * weight(&self.eps, l.gen))
    }

    /// Product of the generator images, without collapsing exponents.
    pub fn letterwise_image(&self, w: &SurfaceWord) -> GroupElem {
        w.letters()
            .iter()
            .fold(GroupElem::identity(), |acc, &l| acc.compose(&self.generator_image(l)))
    }

    /// Real exponent `x` with `ρ_ε(w) zⁿ = g^x`.
    pub fn exponent(&self, w: &SurfaceWord, n: i64) -> f64 {
        compensated_sum(
            w.letters()
                .iter()
                .map(|l| l.sign() * weight(&self.eps, l.gen))
                .chain([n as f64]),
        )
    }
}

/// Image of `(w, n)` as a single real power of the base.
pub fn eval_deformed(rep: &DeformedRep, w: &SurfaceWord, n: i64) -> GroupElem {
    rep.flow.at(rep.exponent(w, n))
}

/// Outcome of [`density_check`]. `coefficients` is `(j, k, l, m, n)` for the
/// smallest positive value `|j s₁ + k s₂ + l t₁ + m t₂ + n|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub dense_at_scale: bool,
    pub min_positive: f64,
    pub coefficients: [i64; 5],
}

fn pair_values(a: f64, b: f64, bound: i64) -> Vec<(f64, i64, i64)> {
    let mut out = Vec::with_capacity(((2 * bound + 1) * (2 * bound + 1)) as usize);
    for j in -bound..=bound {
        for k in -bound..=bound {
            out.push((j as f64 * a + k as f64 * b, j, k));
        }
    }
    out
}

/// Sorted values with neighbours closer than [`ZERO_TOL`] merged.
fn sorted_distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, kept| (*x - *kept).abs() <= ZERO_TOL);
    v
}

/// Smallest positive `|j s₁ + k s₂ + l t₁ + m t₂ + n|` over integer
/// coefficients bounded by `bound` in absolute value.
///
/// Exhaustive over the full coefficient box, organised as a meet in the
/// middle: values of `(j, k)` are matched against the sorted values of
/// `(l, m, n)`.
pub fn density_check(eps: &Eps, bound: u32, tol: f64) -> DensityReport {
    assert!(bound >= 1 && tol > 0.0, "density_check needs N >= 1 and tol > 0");
    let nb = bound as i64;
    let [s1, s2, t1, t2] = *eps;
    let left = pair_values(s1, s2, nb);
    let right_lm = pair_values(t1, t2, nb);
    let right = sorted_distinct(
        right_lm
            .iter()
            .flat_map(|&(v, _, _)| (-nb..=nb).map(move |n| v + n as f64))
            .collect(),
    );

    let best = left
        .par_iter()
        .enumerate()
        .filter_map(|(i, &(a, _, _))| {
            let target = -a;
            let at = right.partition_point(|&c| c < target);
            let lo = at.saturating_sub(3);
            let hi = (at + 3).min(right.len());
            right[lo..hi]
                .iter()
                .map(|&c| (a + c).abs())
                .filter(|&v| v > ZERO_TOL)
                .min_by(f64::total_cmp)
                .map(|v| (v, i))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let (min_positive, i) = best.expect("n = ±1 alone gives a positive value");
    let (a, j, k) = left[i];
    // recover the (l, m, n) realising the minimum
    let coefficients = right_lm
        .iter()
        .flat_map(|&(b, l, m)| (-nb..=nb).map(move |n| (b + n as f64, l, m, n)))
        .map(|(c, l, m, n)| ((a + c).abs(), [j, k, l, m, n]))
        .filter(|(v, _)| *v > ZERO_TOL)
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, c)| c)
        .expect("minimum is attained");
    DensityReport { dense_at_scale: min_positive < tol, min_positive, coefficients }
}

/// Distinct exponents `j s₁ + k s₂ + l t₁ + m t₂ + n` with coefficients
/// bounded by `bound`, sorted.
pub fn bounded_exponents(eps: &Eps, bound: u32) -> Vec<f64> {
    let nb = bound as i64;
    let mut out = Vec::new();
    for (a, _, _) in pair_values(eps[0], eps[1], nb) {
        for (b, _, _) in pair_values(eps[2], eps[3], nb) {
            for n in -nb..=nb {
                out.push(compensated_sum([a, b, n as f64]));
            }
        }
    }
    sorted_distinct(out)
}

fn same_trace(a: f64, b: f64) -> bool {
    (a - b).abs() <= TRACE_DEDUP_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Traces of the unit-determinant representatives of `g^x` over the bounded
/// exponents, sorted and deduplicated at [`TRACE_DEDUP_TOL`] (relative above
/// magnitude 1).
pub fn trace_invariants(rep: &DeformedRep, bound: u32) -> Result<Vec<f64>, HolonomyError> {
    let mut traces = bounded_exponents(&rep.eps, bound)
        .into_par_iter()
        .map(|x| {
            let m = *rep.flow.at(x).matrix();
            // the sign convention may pick the negative representative; cbrt keeps the sign
            let det = m.det();
            if det == 0.0 || !det.is_finite() {
                return Err(HolonomyError::TraceOverflow { exponent: x });
            }
            Ok(m.trace() / det.cbrt())
        })
        .collect::<Result<Vec<f64>, _>>()?;
    traces.sort_by(f64::total_cmp);
    traces.dedup_by(|x, kept| same_trace(*x, *kept));
    Ok(traces)
}

/// Whether two trace lists differ at [`TRACE_DEDUP_TOL`].
pub fn trace_lists_differ(a: &[f64], b: &[f64]) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(x, y)| !same_trace(*x, *y))
}

/// Image in `ℤ/2` under `a_i ↦ 0`, `b_i ↦ 1`.
pub fn covering_parity(w: &SurfaceWord) -> u8 {
    (w.letters().iter().filter(|l| l.gen.is_b()).count() % 2) as u8
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    SurjectiveAtScale,
    Unreached { count: usize },
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub verdict: Verdict,
    pub coverage: CoverageReport,
}

/// Largest gap between `bouquet(x)` and the probe.
fn probe_gap(probe: &SampledSet, x: &crate::flag::Flag) -> f64 {
    bouquet(x, PROBE_BOUQUET_POINTS)
        .expect("count above minimum")
        .iter()
        .map(|b| probe.min_distance_to(b))
        .fold(0.0, f64::max)
}

/// Checks that `image_probe` samples both bouquets of `hol_lox` (at its
/// resolution, or the bouquet spacing if none is recorded), then runs the
/// coverage certificate on `targets`.
pub fn surjectivity_obstruction(
    hol_lox: &GroupElem,
    image_probe: &SampledSet,
    p: &Tube,
    targets: &SampledSet,
    n_max: usize,
    margin: f64,
) -> Result<ObstructionReport, HolonomyError> {
    let lox = loxodromic_data(hol_lox)?;
    let resolution = image_probe
        .resolution
        .unwrap_or(std::f64::consts::PI / PROBE_BOUQUET_POINTS as f64);
    for (which, x) in [(BouquetSide::Repelling, lox.x_minus), (BouquetSide::Attracting, lox.x_plus)] {
        let gap = probe_gap(image_probe, &x);
        if gap > resolution {
            return Err(HolonomyError::MissingBouquetSamples { which, gap, resolution });
        }
    }
    let coverage = coverage_certificate(hol_lox, p, targets, n_max, margin)?;
    let verdict = if coverage.complete() {
        Verdict::SurjectiveAtScale
    } else {
        Verdict::Unreached { count: coverage.failures.len() }
    };
    Ok(ObstructionReport { verdict, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DEFAULT_MARGIN;
    use crate::fixtures::{diag_421, e1_flag, e3_flag};
    use crate::flag::dist_to_bouquet;
    use crate::sample::uniform_sample;

    fn word(s: &str) -> SurfaceWord {
        s.parse().unwrap()
    }

    fn rep(eps: Eps) -> DeformedRep {
        DeformedRep::new(diag_421(), eps).unwrap()
    }

    #[test]
    fn cyclic_holonomy_examples() {
        let g = diag_421();
        assert_eq!(cyclic_holonomy(0, &g).distance_to_identity(), 0.0);
        assert!(cyclic_holonomy(1, &g).distance(&g) < 1e-15);
        assert!(cyclic_holonomy(-1, &g).compose(&g).distance_to_identity() < 1e-12);
    }

    #[test]
    fn words_parse_and_reduce() {
        assert_eq!(word("a1 b1 B1 a2").to_string(), "a1 a2");
        assert_eq!(word("a1 a1^-1"), SurfaceWord::default());
        assert_eq!(word("A2").to_string(), "a2^-1");
        assert_eq!(word("e").to_string(), "e");
        assert!("c3".parse::<SurfaceWord>().is_err());
        assert_eq!(SurfaceWord::relator().len(), 8);
    }

    #[test]
    fn eval_examples() {
        let r = rep([1.0, 0.3, 0.2, 0.7]);
        assert!(eval_deformed(&r, &SurfaceWord::default(), 0).distance_to_identity() < 1e-12);
        assert!(eval_deformed(&r, &word("a1"), 0).distance(&diag_421()) < 1e-12);
        let c = SurfaceWord::commutator(&word("a1"), &word("b1"));
        assert!(eval_deformed(&r, &c, 0).distance_to_identity() < 1e-12);
        assert!(r.letterwise_image(&c).distance_to_identity() < 1e-12);
    }

    #[test]
    fn eval_matches_letterwise_product() {
        let r = rep([0.37, -1.2, 0.05, 2.5]);
        let w = word("a1 b2 a2^-1 b1 b1 a1");
        let h = r.letterwise_image(&w).compose(&diag_421().pow(3));
        assert!(eval_deformed(&r, &w, 3).distance(&h) < 1e-10);
    }

    #[test]
    fn mixed_sign_base_is_rejected() {
        let g = GroupElem::diag(4.0, -2.0, 1.0).unwrap();
        assert!(matches!(
            DeformedRep::new(g, [0.0; 4]),
            Err(HolonomyError::Group(GroupError::NotPositiveLoxodromic))
        ));
    }

    fn brute_force_min(eps: &Eps, bound: i64) -> f64 {
        let mut best = f64::INFINITY;
        let r = -bound..=bound;
        for j in r.clone() {
            for k in r.clone() {
                for l in r.clone() {
                    for m in r.clone() {
                        for n in r.clone() {
                            let v = (j as f64 * eps[0] + k as f64 * eps[1] + l as f64 * eps[2] + m as f64 * eps[3]
                                + n as f64)
                                .abs();
                            if v > ZERO_TOL {
                                best = best.min(v);
                            }
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn density_matches_enumeration() {
        let eps = [0.5, 1.0 / 3.0, 0.2, 1.0 / 7.0];
        let rep = density_check(&eps, 1, 1e-3);
        let oracle = brute_force_min(&eps, 1);
        assert!((rep.min_positive - oracle).abs() < 1e-15);
        // 1/3 − 1/5 − 1/7
        assert!((oracle - 1.0 / 105.0).abs() < 1e-15);
        let [j, k, l, m, n] = rep.coefficients;
        let v = (j as f64 * eps[0] + k as f64 * eps[1] + l as f64 * eps[2] + m as f64 * eps[3] + n as f64).abs();
        assert!((v - rep.min_positive).abs() < 1e-15);
        for eps in [[0.31, -0.77, 0.123, 0.5], [2f64.sqrt(), 3f64.sqrt(), 0.0, 0.0]] {
            let a = density_check(&eps, 2, 1e-3).min_positive;
            assert!((a - brute_force_min(&eps, 2)).abs() < 1e-14);
        }
    }

    #[test]
    fn density_examples() {
        let d = density_check(&[2f64.sqrt() / 10.0, 0.0, 0.0, 0.0], 100, 1e-2);
        assert!(d.dense_at_scale, "{d:?}");
        let z = density_check(&[0.0; 4], 3, 0.5);
        assert_eq!(z.min_positive, 1.0);
        assert!(!z.dense_at_scale);
    }

    #[test]
    fn trace_examples() {
        let r = rep([0.5, 0.25, 0.125, 1.0 / 3.0]);
        let t0 = trace_invariants(&r, 0).unwrap();
        assert_eq!(t0.len(), 1);
        assert!((t0[0] - 3.0).abs() < 1e-12);

        // oracle: unit-determinant eigenvalues of g^x are (4,2,1)^x / 2^x
        let t1 = trace_invariants(&r, 1).unwrap();
        let mut oracle: Vec<f64> = bounded_exponents(&r.eps(), 1)
            .iter()
            .map(|&x| 2f64.powf(x) + 1.0 + 2f64.powf(-x))
            .collect();
        oracle.sort_by(f64::total_cmp);
        oracle.dedup_by(|x, k| same_trace(*x, *k));
        assert!(!trace_lists_differ(&t1, &oracle), "{t1:?} vs {oracle:?}");

        let h = GroupElem::from_row_major([1.0, 0.4, -0.3, 0.2, 1.1, 0.5, -0.6, 0.1, 0.9]).unwrap();
        let conj = h.compose(&diag_421()).compose(&h.inverse());
        let rc = DeformedRep::new(conj, r.eps()).unwrap();
        let tc = trace_invariants(&rc, 1).unwrap();
        assert_eq!(t1.len(), tc.len());
        assert!(t1.iter().zip(&tc).all(|(a, b)| (a - b).abs() <= 1e-8 * a.abs().max(1.0)));

        let other = trace_invariants(&rep([2f64.sqrt(), 0.0, 0.0, 0.0]), 1).unwrap();
        assert!(trace_lists_differ(&t1, &other));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(covering_parity(&word("a1 a2")), 0);
        assert_eq!(covering_parity(&word("b1")), 1);
        assert_eq!(covering_parity(&word("b1 b2")), 0);
        assert_eq!(covering_parity(&word("b1^-1 a2")), 1);
    }

    fn p_tube() -> Tube {
        Tube::new(e3_flag(), 0.3, 0.3).unwrap()
    }

    #[test]
    fn full_probe_is_surjective_at_scale() {
        let g = diag_421();
        let probe = uniform_sample(500, 1)
            .union(&bouquet(&e3_flag(), 64).unwrap())
            .union(&bouquet(&e1_flag(), 64).unwrap());
        let probe = SampledSet::new(probe.points, Some(0.05));
        let targets = uniform_sample(300, 2);
        let rep = surjectivity_obstruction(&g, &probe, &p_tube(), &targets, 128, DEFAULT_MARGIN).unwrap();
        assert_eq!(rep.verdict, Verdict::SurjectiveAtScale);

        let none = surjectivity_obstruction(&g, &probe, &p_tube(), &targets, 0, DEFAULT_MARGIN).unwrap();
        assert!(matches!(none.verdict, Verdict::Unreached { count } if count > 0));
    }

    #[test]
    fn kleinian_domain_probe_misses_bouquets() {
        let g = diag_421();
        let omega: Vec<_> = uniform_sample(2000, 4)
            .points
            .into_iter()
            .filter(|x| dist_to_bouquet(x, &e1_flag()) > 0.2 && dist_to_bouquet(x, &e3_flag()) > 0.2)
            .collect();
        let probe = SampledSet::new(omega, Some(0.1));
        let err = surjectivity_obstruction(&g, &probe, &p_tube(), &uniform_sample(10, 1), 16, DEFAULT_MARGIN);
        assert!(matches!(
            err,
            Err(HolonomyError::MissingBouquetSamples { which: BouquetSide::Repelling, .. })
        ));
    }

    #[test]
    fn unit_determinant_traces_are_at_least_three() {
        let r = rep([3.0, -2.0, 1.5, 0.0]);
        let t = trace_invariants(&r, 2).unwrap();
        assert!(t.iter().all(|x| x.is_finite() && *x >= 3.0 - 1e-9));
    }
}
