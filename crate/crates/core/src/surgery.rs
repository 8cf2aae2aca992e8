//! Gluing data for flag surgeries along conjugated anti-flag involutions,
//! and the bookkeeping of the resulting free products.
//!
//! For a loxodromic `g` whose repelling flag is the center of a tube `H₂`,
//! the involution `φₙ = g⁻ⁿ ∘ κ ∘ gⁿ` eventually maps `X ∖ Int H₂` into
//! `Int H₂`. The exact inner region is `H₁ⁿ = φₙ(X ∖ Int H₂)`, tested by
//! `y ∈ H₁ⁿ ⟺ φₙ(y) ∉ Int H₂`; a concentric tube enclosing it is fitted
//! for O(1) membership.

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::directed_hausdorff;
use crate::flag::{flag_distance, Flag};
use crate::group::{act, antiflag_involution, ext_act, ext_compose, ExtElem, GroupElem, GroupError};
use crate::sample::{
    complement_of_tubes_sample, tube_boundary_sample, tube_complement_sample, tube_sample,
    SampleError, SampledSet,
};
use crate::schottky::{reduce_word, reduced_words, word_image_in, Letter, SchottkyConfig, SchottkyError, Word};
use crate::spectral::classify;
use crate::tube::Tube;

/// Largest accepted distance between the repelling flag and the tube center.
pub const CENTER_TOL: f64 = 1e-8;
/// Largest accepted `d(φ(φ(x)), x)`.
pub const INVOLUTION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurgeryError {
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("repelling flag is {0:e} away from the tube center")]
    CenterMismatch(f64),
    #[error("no exponent up to {n_max} maps the complement inside (best minimum depth {best:e})")]
    NoExponentFound { n_max: usize, best: f64 },
    #[error("gluing condition ({condition}) fails: value {value:e} at {witness:?}")]
    ConditionFailed {
        condition: u8,
        witness: Box<Flag>,
        value: f64,
    },
    #[error("conjugated generator {0} is an anti-flag map")]
    SwapParityError(usize),
    #[error("translates by {u} and {w} meet (clearance {clearance:e})")]
    DisjointnessViolation {
        u: Word,
        w: Word,
        witness: Box<Flag>,
        clearance: f64,
    },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Schottky(#[from] SchottkyError),
}

/// `φₙ = g⁻ⁿ ∘ κ ∘ gⁿ`.
pub fn gluing_map(g: &GroupElem, n: usize) -> ExtElem {
    antiflag_involution(&g.pow(n as i64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingData {
    pub g: GroupElem,
    pub n: usize,
    pub phi: ExtElem,
    /// Concentric tube enclosing `H₁ⁿ`.
    pub h1: Tube,
    pub h2: Tube,
}

impl GluingData {
    /// Gluing data at exponent `n` with a given envelope.
    pub fn with_exponent(g: GroupElem, n: usize, h1: Tube, h2: Tube) -> Self {
        GluingData {
            g,
            n,
            phi: gluing_map(&g, n),
            h1,
            h2,
        }
    }

    pub fn apply(&self, x: &Flag) -> Flag {
        ext_act(&self.phi, x)
    }

    /// Membership in the exact inner region `H₁ⁿ`.
    pub fn in_inner_region(&self, y: &Flag) -> bool {
        !self.h2.contains(&self.apply(y))
    }
}

/// Sample of `X ∖ Int H₂` including its boundary, shared by the search and
/// the verification so that minimality is witnessed on the same points.
fn closed_complement(h2: &Tube, m: usize, seed: u64) -> Result<Vec<Flag>, SampleError> {
    let mut pts = tube_complement_sample(h2, m, 0.0, seed)?.points;
    pts.extend(outer_boundary(h2, m, seed)?.points);
    Ok(pts)
}

fn outer_boundary(h2: &Tube, m: usize, seed: u64) -> Result<SampledSet, SampleError> {
    tube_boundary_sample(h2, m.div_ceil(4).max(8), seed ^ 0xa7)
}

fn min_with_index(values: &[f64]) -> (f64, usize) {
    values
        .iter()
        .enumerate()
        .fold((f64::INFINITY, 0), |acc, (i, &v)| if v < acc.0 { (v, i) } else { acc })
}

/// Smallest concentric tube (by `r_alpha + r_beta`) containing every point,
/// with `slack` added to each radius and radii capped at `caps`.
fn fit_envelope(center: Flag, points: &[Flag], slack: f64, caps: (f64, f64)) -> Option<Tube> {
    let probe = Tube::new(center, 1.0, 1.0).expect("valid radii");
    let mut ab: Vec<(f64, f64)> = points.iter().map(|y| probe.angles(y)).collect();
    ab.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = ab.len();
    let mut suffix_b = vec![f64::NEG_INFINITY; n + 1];
    for k in (0..n).rev() {
        suffix_b[k] = suffix_b[k + 1].max(ab[k].1);
    }
    let mut best: Option<(f64, f64)> = None;
    for k in 0..=n {
        // points 0..k are covered by the point disc, the rest by the line disc
        let ra = if k == 0 { slack } else { ab[k - 1].0 + slack };
        let rb = if k == n { slack } else { suffix_b[k] + slack };
        if ra > caps.0 || rb > caps.1 {
            continue;
        }
        if best.is_none_or(|(a, b)| ra + rb < a + b) {
            best = Some((ra, rb));
        }
    }
    best.and_then(|(ra, rb)| Tube::new(center, ra, rb).ok())
}

/// Result of the exponent search.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSearch {
    pub gluing: GluingData,
    /// `(n, min depth in H₂ of φₙ(sample))` for every tested `n`.
    pub curve: Vec<(usize, f64)>,
}

/// Least `n ≤ n_max` such that `φₙ` maps the sampled closed complement of
/// `H₂` into `H₂` with depth greater than `margin`, and the fitted envelope
/// of the image.
pub fn surgery_exponent(
    g: &GroupElem,
    h2: &Tube,
    m: usize,
    n_max: usize,
    margin: f64,
    seed: u64,
) -> Result<ExponentSearch, SurgeryError> {
    let spec = classify(g)?;
    let lox = spec.loxodromic().ok_or(SurgeryError::NotLoxodromic)?;
    let off = flag_distance(&lox.x_minus, h2.center());
    if off > CENTER_TOL {
        return Err(SurgeryError::CenterMismatch(off));
    }
    let pts = closed_complement(h2, m, seed)?;
    let mut curve = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let phi = gluing_map(g, n);
        let images: Vec<Flag> = pts.par_iter().map(|x| ext_act(&phi, x)).collect();
        let depth = images
            .par_iter()
            .map(|y| h2.depth(y))
            .reduce(|| f64::INFINITY, f64::min);
        curve.push((n, depth));
        best = best.max(depth);
        if depth > margin {
            let caps = (h2.r_alpha() - margin / 2.0, h2.r_beta() - margin / 2.0);
            let h1 = fit_envelope(*h2.center(), &images, margin / 2.0, caps)
                .expect("a split with both radii under the caps exists once depth exceeds margin");
            return Ok(ExponentSearch {
                gluing: GluingData {
                    g: *g,
                    n,
                    phi,
                    h1,
                    h2: *h2,
                },
                curve,
            });
        }
    }
    Err(SurgeryError::NoExponentFound { n_max, best })
}

/// Per-condition slack of [`verify_gluing`]; every entry is positive on
/// success.
#[derive(Clone, Debug, PartialEq)]
pub struct GluingReport {
    /// (1) `H₁ ⊂ Int H₂`: envelope nesting and depth of `φ(X ∖ Int H₂)`
    /// beyond the margin.
    pub inner_in_outer: f64,
    /// (2) `φ(H₁) = X ∖ Int H₂`: envelope containment of the image and
    /// the involution residual.
    pub exchange: f64,
    /// (3) `φ(∂H₁) = ∂H₂`: boundary residuals against tolerance and the
    /// sample resolution.
    pub boundary: f64,
    /// (4) `φ` preserves the shell `H₂ ∖ Int H₁`.
    pub shell: f64,
    pub shell_samples: usize,
}

impl GluingReport {
    pub fn margins(&self) -> [f64; 4] {
        [self.inner_in_outer, self.exchange, self.boundary, self.shell]
    }
}

fn failed(condition: u8, witness: Flag, value: f64) -> SurgeryError {
    SurgeryError::ConditionFailed {
        condition,
        witness: Box::new(witness),
        value,
    }
}

/// Sample-scale check of the four exchange conditions, with the inner
/// region read as the exact `H₁ⁿ` and the envelope as its container.
pub fn verify_gluing(gd: &GluingData, m: usize, margin: f64, seed: u64) -> Result<GluingReport, SurgeryError> {
    let (h1, h2) = (&gd.h1, &gd.h2);
    let involution = |x: &Flag| flag_distance(&gd.apply(&gd.apply(x)), x);

    // (1)
    let nest = h1.nested_slack(h2).unwrap_or(f64::NEG_INFINITY);
    if !(nest > 0.0) {
        return Err(failed(1, *h1.center(), nest));
    }
    let pts = closed_complement(h2, m, seed)?;
    let images: Vec<Flag> = pts.par_iter().map(|x| gd.apply(x)).collect();
    let depth2: Vec<f64> = images.par_iter().map(|y| h2.depth(y) - margin).collect();
    let (d1, k1) = min_with_index(&depth2);
    if !(d1 > 0.0) {
        return Err(failed(1, pts[k1], d1));
    }
    let inner_in_outer = nest.min(d1);

    // (2)
    let depth1: Vec<f64> = images.par_iter().map(|y| h1.depth(y)).collect();
    let (e1, k2) = min_with_index(&depth1);
    if !(e1 > 0.0) {
        return Err(failed(2, pts[k2], e1));
    }
    let residuals: Vec<f64> = pts.par_iter().map(|x| INVOLUTION_TOL - involution(x)).collect();
    let (r2, k2) = min_with_index(&residuals);
    if !(r2 > 0.0) {
        return Err(failed(2, pts[k2], r2));
    }
    let exchange = e1.min(r2);

    // (3)
    let bd = outer_boundary(h2, m, seed)?;
    let inner_bd: Vec<Flag> = bd.iter().map(|b| gd.apply(b)).collect();
    let back = SampledSet::new(inner_bd.iter().map(|y| gd.apply(y)).collect(), None);
    let level: Vec<f64> = back.iter().map(|x| INVOLUTION_TOL - h2.depth(x).abs()).collect();
    let (r3, k3) = min_with_index(&level);
    if !(r3 > 0.0) {
        return Err(failed(3, bd.points[k3], r3));
    }
    let inside: Vec<f64> = inner_bd.iter().map(|y| h1.depth(y)).collect();
    let (i3, k3) = min_with_index(&inside);
    if !(i3 > 0.0) {
        return Err(failed(3, bd.points[k3], i3));
    }
    let resolution = bd.resolution.unwrap_or(0.0).max(INVOLUTION_TOL);
    let h = directed_hausdorff(&back, &bd)
        .map_err(|_| failed(3, *h2.center(), f64::NAN))?
        .max(directed_hausdorff(&bd, &back).map_err(|_| failed(3, *h2.center(), f64::NAN))?);
    let boundary = r3.min(i3).min(resolution - h);
    if !(boundary > 0.0) {
        return Err(failed(3, bd.points[0], boundary));
    }

    // (4): shell points are those of H₂ whose image stays in H₂
    let h2_pts = tube_sample(h2, m, seed ^ 0x4e).points;
    let shell: Vec<Flag> = h2_pts
        .into_iter()
        .filter(|y| h2.depth(&gd.apply(y)) >= 0.0)
        .collect();
    let mut shell_margin = f64::INFINITY;
    for y in &shell {
        let z = gd.apply(y);
        // φ(y) stays out of Int H₁ⁿ iff φ(φ(y)) stays in H₂
        let s = (h2.depth(&gd.apply(&z)) + INVOLUTION_TOL).min(INVOLUTION_TOL - involution(y));
        if !(s > 0.0) {
            return Err(failed(4, *y, s));
        }
        shell_margin = shell_margin.min(s);
    }
    Ok(GluingReport {
        inner_in_outer,
        exchange,
        boundary,
        shell: shell_margin,
        shell_samples: shell.len(),
    })
}

/// Two Schottky groups combined through a gluing.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedGroup {
    pub cfg1: SchottkyConfig,
    pub cfg2: SchottkyConfig,
    pub gens1: Vec<GroupElem>,
    /// `ψ γ ψ⁻¹` for the generators `γ` of the second group.
    pub gens2_conj: Vec<GroupElem>,
    /// `ψ = φ ∘ c⁻¹`, carrying the outside of `c(H₂)` onto `H₁ⁿ`.
    pub psi: ExtElem,
    pub conjugator: GroupElem,
    pub gluing: GluingData,
}

impl CombinedGroup {
    pub fn generators(&self) -> Vec<GroupElem> {
        self.gens1.iter().chain(&self.gens2_conj).copied().collect()
    }
}

/// Conjugates the second group's generators by `ψ = φ ∘ c⁻¹`, where the
/// conjugator `c` carries the first group's gluing region `H₂` to the
/// second group's.
pub fn combine_free_product(
    cfg1: &SchottkyConfig,
    cfg2: &SchottkyConfig,
    gd: &GluingData,
    conjugator: &GroupElem,
) -> Result<CombinedGroup, SurgeryError> {
    let psi = ext_compose(&gd.phi, &ExtElem::plain(conjugator.inverse()));
    let psi_inv = psi.inverse();
    let mut gens2_conj = Vec::with_capacity(cfg2.rank());
    for (i, gamma) in cfg2.generators().iter().enumerate() {
        let c = ext_compose(&psi, &ext_compose(&ExtElem::plain(*gamma), &psi_inv));
        if c.swap {
            return Err(SurgeryError::SwapParityError(i));
        }
        gens2_conj.push(c.g);
    }
    Ok(CombinedGroup {
        cfg1: cfg1.clone(),
        cfg2: cfg2.clone(),
        gens1: cfg1.generators().to_vec(),
        gens2_conj,
        psi,
        conjugator: *conjugator,
        gluing: gd.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeReport {
    pub words: usize,
    pub pairs_checked: usize,
    pub samples: usize,
    /// Smallest distance (in depth units) by which a moved sample stays
    /// outside the domain.
    pub worst_clearance: f64,
}

/// Maximal run of letters from one factor, as the product of that factor's
/// generators.
enum Syllable {
    First(GroupElem),
    Second(GroupElem),
}

/// Splits `w` (over the combined generators) into factor runs.
fn syllables(cg: &CombinedGroup, w: &Word) -> Result<Vec<Syllable>, SchottkyError> {
    let r1 = cg.gens1.len();
    let mut out = Vec::new();
    for run in w.letters.chunk_by(|a, b| (a.index < r1) == (b.index < r1)) {
        if run[0].index < r1 {
            out.push(Syllable::First(word_image_in(&cg.gens1, &Word::new(run.to_vec()))?));
        } else {
            let local = run.iter().map(|l| Letter::new(l.index - r1, l.inverse)).collect();
            out.push(Syllable::Second(word_image_in(cg.cfg2.generators(), &Word::new(local))?));
        }
    }
    Ok(out)
}

/// The domain pieces: outside the first group's tubes and `H₂`, and the
/// `ψ`-image of the outside of the second group's tubes and `c(H₂)`.
struct Domain<'a> {
    cg: &'a CombinedGroup,
    psi_inv: ExtElem,
    c_inv: GroupElem,
}

impl Domain<'_> {
    /// Positive inside the domain, negative outside.
    fn clearance(&self, y: &Flag) -> f64 {
        let cg = self.cg;
        let h2 = &cg.gluing.h2;
        let outside = |tubes: &[Tube], x: &Flag| tubes.iter().map(|t| -t.depth(x)).fold(f64::INFINITY, f64::min);
        let first = outside(&cg.cfg1.tubes(), y).min(-h2.depth(y));
        let z = ext_act(&self.psi_inv, y);
        let second = outside(&cg.cfg2.tubes(), &z).min(-h2.depth(&act(&self.c_inv, &z)));
        first.max(second)
    }

    /// Acts by a word syllable by syllable. Runs of the second factor act as
    /// `ψ ∘ γ ∘ ψ⁻¹`: the conjugated matrices are too ill-conditioned to be
    /// multiplied out.
    fn act_word(&self, word: &[Syllable], x: &Flag) -> Flag {
        word.iter().rev().fold(*x, |y, s| match s {
            Syllable::First(h) => act(h, &y),
            Syllable::Second(h) => ext_act(&self.cg.psi, &act(h, &ext_act(&self.psi_inv, &y))),
        })
    }
}

/// Checks that the domain's translates by distinct reduced words of length
/// `≤ depth` in the combined generators are pairwise disjoint on samples.
pub fn tree_disjointness_check(cg: &CombinedGroup, depth: usize, m: usize, seed: u64) -> Result<TreeReport, SurgeryError> {
    let margin = cg.cfg1.margin();
    let domain = Domain {
        cg,
        psi_inv: cg.psi.inverse(),
        c_inv: cg.conjugator.inverse(),
    };
    let mut tubes1 = cg.cfg1.tubes();
    tubes1.push(cg.gluing.h2);
    let mut pts = complement_of_tubes_sample(&tubes1, m, margin, seed)?.points;
    let second = complement_of_tubes_sample(&cg.cfg2.tubes(), 2 * m, margin, seed ^ 0x51)?;
    let h2 = cg.gluing.h2;
    pts.extend(
        second
            .iter()
            .filter(|x| h2.depth(&act(&domain.c_inv, x)) <= -margin)
            .take(m)
            .map(|x| ext_act(&cg.psi, x)),
    );
    let words = reduced_words(cg.gens1.len() + cg.gens2_conj.len(), depth);
    let mut pairs = Vec::new();
    for (a, u) in words.iter().enumerate() {
        for (b, w) in words.iter().enumerate() {
            if a != b {
                pairs.push((a, b, reduce_word(&w.inverse().concat(u))));
            }
        }
    }
    let results: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|(_, _, v)| {
            let word = syllables(cg, v)?;
            Ok(pts
                .iter()
                .enumerate()
                .map(|(k, x)| (-domain.clearance(&domain.act_word(&word, x)), k))
                .fold((f64::INFINITY, 0), |acc, c| if c.0 < acc.0 { c } else { acc }))
        })
        .collect::<Result<_, SchottkyError>>()?;
    let mut worst = f64::INFINITY;
    for ((a, b, _), (c, k)) in pairs.iter().zip(&results) {
        if !(*c > 0.0) {
            return Err(SurgeryError::DisjointnessViolation {
                u: words[*a].clone(),
                w: words[*b].clone(),
                witness: Box::new(pts[*k]),
                clearance: *c,
            });
        }
        worst = worst.min(*c);
    }
    Ok(TreeReport {
        words: words.len(),
        pairs_checked: pairs.len(),
        samples: pts.len(),
        worst_clearance: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        e1_flag, gluing_generator, gluing_tube, rank_one_schottky, second_conjugator, second_schottky, GLUING_EXPONENT,
        GLUING_MARGIN,
    };
    use crate::group::theta;
    use crate::linalg::Mat3;

    const M: usize = 10_000;

    fn fixture() -> GluingData {
        surgery_exponent(&gluing_generator(), &gluing_tube(), M, 32, GLUING_MARGIN, 7)
            .unwrap()
            .gluing
    }

    fn same_class(a: &Mat3, b: &Mat3) -> f64 {
        let na = a.scale(1.0 / a.frobenius());
        let nb = b.scale(1.0 / b.frobenius());
        na.dist_max(&nb).min(na.dist_max(&nb.scale(-1.0)))
    }

    #[test]
    fn gluing_matrix_is_transpose_times_power() {
        let g = gluing_generator();
        for n in 1..6 {
            let gn = *g.pow(n as i64).matrix();
            let phi = gluing_map(&g, n);
            assert!(phi.swap);
            assert!(same_class(phi.g.matrix(), &(gn.transpose() * gn)) < 1e-10);
            // the left factor is Θ(g⁻ⁿ), not Θ(gⁿ)
            let twisted = *theta(&g.pow(n as i64)).matrix() * gn;
            assert!(same_class(phi.g.matrix(), &twisted) > 1e-3);
        }
    }

    #[test]
    fn search_finds_frozen_exponent() {
        let gd = fixture();
        assert_eq!(gd.n, GLUING_EXPONENT);
        assert!(gd.phi.swap);
        let sq = ext_compose(&gd.phi, &gd.phi);
        assert!(!sq.swap && sq.g.distance_to_identity() < 1e-10);
        assert!(gd.h1.nested_slack(&gd.h2).unwrap() > 0.0);
    }

    #[test]
    fn huge_tube_needs_one_step() {
        let g = gluing_generator();
        let big = Tube::new(*gluing_tube().center(), 1.45, 1.45).unwrap();
        let s = surgery_exponent(&g, &big, 500, 8, GLUING_MARGIN, 1).unwrap();
        assert_eq!(s.gluing.n, 1);
    }

    #[test]
    fn off_center_tube_is_rejected() {
        let t = Tube::new(e1_flag(), 0.2, 0.2).unwrap();
        assert!(matches!(
            surgery_exponent(&gluing_generator(), &t, 100, 8, GLUING_MARGIN, 1),
            Err(SurgeryError::CenterMismatch(_))
        ));
    }

    #[test]
    fn verification_passes_and_is_minimal() {
        let gd = fixture();
        let rep = verify_gluing(&gd, M, GLUING_MARGIN, 7).unwrap();
        assert!(rep.margins().iter().all(|&x| x > 0.0));
        assert!(rep.shell_samples > 0);
        let lower = GluingData::with_exponent(gd.g, gd.n - 1, gd.h1, gd.h2);
        assert!(matches!(
            verify_gluing(&lower, M, GLUING_MARGIN, 7),
            Err(SurgeryError::ConditionFailed { condition: 1, .. })
        ));
    }

    #[test]
    fn depth_curve_is_monotone_in_the_exponent() {
        let h2 = gluing_tube();
        let g = gluing_generator();
        let pts = closed_complement(&h2, 500, 3).unwrap();
        let depth = |n| {
            let phi = gluing_map(&g, n);
            pts.iter().map(|x| h2.depth(&ext_act(&phi, x))).fold(f64::INFINITY, f64::min)
        };
        let curve: Vec<f64> = (1..10).map(depth).collect();
        assert!(curve.windows(2).all(|w| w[1] >= w[0]), "{curve:?}");
    }

    #[test]
    fn combination_conjugates_to_plain_elements() {
        let gd = fixture();
        let cg = combine_free_product(&rank_one_schottky(), &second_schottky(), &gd, &second_conjugator()).unwrap();
        assert_eq!(cg.gens2_conj.len(), 1);
        // γ* is conjugate to Θ(γ), so its spectrum is the inverse one
        let gamma = second_schottky().generators()[0];
        let a = classify(&cg.gens2_conj[0]).unwrap();
        let b = classify(&theta(&gamma)).unwrap();
        let (a, b) = (a.loxodromic().unwrap(), b.loxodromic().unwrap());
        let ratio = |l: [f64; 3]| [l[1] / l[0], l[2] / l[0]];
        let (ra, rb) = (ratio(a.eigenvalues), ratio(b.eigenvalues));
        assert!((ra[0] / rb[0] - 1.0).abs() < 1e-4);
        // γ* is far from normal (entries ~1, eigenvalues ~1e-5), so its spectrum
        // is only good to a few digits
        assert!((ra[1] / rb[1] - 1.0).abs() < 1e-2);

        let id_cfg = SchottkyConfig::new(
            vec![GroupElem::identity()],
            vec![(gluing_tube(), gluing_tube())],
            0.01,
        )
        .unwrap();
        let cg = combine_free_product(&rank_one_schottky(), &id_cfg, &gd, &second_conjugator()).unwrap();
        assert!(cg.gens2_conj[0].distance_to_identity() < 1e-10);
    }

    #[test]
    fn tree_check_examples() {
        let gd = fixture();
        let cg = combine_free_product(&rank_one_schottky(), &second_schottky(), &gd, &second_conjugator()).unwrap();
        let rep = tree_disjointness_check(&cg, 1, 300, 3).unwrap();
        assert_eq!((rep.words, rep.pairs_checked), (5, 20));
        // a second generator too weak for its tubes sends domain points back in
        let weak = SchottkyConfig::new(
            vec![GroupElem::diag(16.0, 4.0, 1.0).unwrap()],
            rank_one_schottky().pairs().to_vec(),
            0.01,
        )
        .unwrap()
        .conjugate_by(&second_conjugator());
        let bad = combine_free_product(&rank_one_schottky(), &weak, &gd, &second_conjugator()).unwrap();
        assert!(matches!(
            tree_disjointness_check(&bad, 1, 300, 3),
            Err(SurgeryError::DisjointnessViolation { .. })
        ));
        let empty = SchottkyConfig::new(vec![], vec![], 0.01).unwrap();
        let single = combine_free_product(&rank_one_schottky(), &empty, &gd, &second_conjugator()).unwrap();
        assert!(tree_disjointness_check(&single, 2, 300, 3).is_ok());
    }
}
