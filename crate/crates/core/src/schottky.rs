//! Schottky configurations: ping-pong certificates, free words,
//! fundamental-domain reduction and limit-set samples.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::flag::Flag;
use crate::group::{act, GroupElem, GroupError};
use crate::sample::{
    bouquet, farthest_point_subsample, tube_boundary_sample, tube_complement_sample, tube_sample,
    SampleError, SampledSet,
};
use crate::spectral::{classify, OneParameterGroup};
use crate::tube::Tube;

/// Points per circle used when sampling generator bouquets.
pub const BOUQUET_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchottkyError {
    #[error("configuration is malformed: {0}")]
    BadConfig(String),
    #[error("generator {0} is not loxodromic")]
    NotLoxodromic(usize),
    #[error("letter index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("ping-pong violation: {0}")]
    Violation(Box<Violation>),
    #[error("reduction did not terminate after {} steps (partial word {})", .steps, .partial)]
    NoTermination { steps: usize, partial: Word },
    #[error("limit set needs a ping-pong certificate for this configuration")]
    CertificateRequired,
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Generators with their repelling and attracting tubes.
#[derive(Clone, Debug, PartialEq)]
pub struct SchottkyConfig {
    generators: Vec<GroupElem>,
    pairs: Vec<(Tube, Tube)>,
    margin: f64,
}

impl SchottkyConfig {
    /// `pairs[i] = (H⁻ᵢ, H⁺ᵢ)`.
    pub fn new(generators: Vec<GroupElem>, pairs: Vec<(Tube, Tube)>, margin: f64) -> Result<Self, SchottkyError> {
        if generators.len() != pairs.len() {
            return Err(SchottkyError::BadConfig(format!(
                "{} generators but {} tube pairs",
                generators.len(),
                pairs.len()
            )));
        }
        if !(margin > 0.0) {
            return Err(SchottkyError::BadConfig(format!("margin must be positive, got {margin}")));
        }
        Ok(SchottkyConfig {
            generators,
            pairs,
            margin,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[GroupElem] {
        &self.generators
    }

    pub fn pairs(&self) -> &[(Tube, Tube)] {
        &self.pairs
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// All `2d` tubes, `H⁻₀, H⁺₀, H⁻₁, …`.
    pub fn tubes(&self) -> Vec<Tube> {
        self.pairs.iter().flat_map(|(a, b)| [*a, *b]).collect()
    }

    /// The same configuration with every element and tube pushed by `h`.
    /// Tubes are only transported exactly when `h` is orthogonal; other
    /// maps move the centers and keep the radii.
    pub fn conjugate_by(&self, h: &GroupElem) -> SchottkyConfig {
        let hinv = h.inverse();
        let move_tube = |t: &Tube| {
            Tube::new(act(h, t.center()), t.r_alpha(), t.r_beta()).expect("radii unchanged")
        };
        SchottkyConfig {
            generators: self.generators.iter().map(|g| h.compose(g).compose(&hinv)).collect(),
            pairs: self.pairs.iter().map(|(a, b)| (move_tube(a), move_tube(b))).collect(),
            margin: self.margin,
        }
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        Letter { index, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }
}

/// A word in the generators, read left to right as a matrix product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inv())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| format!("g{}{}", l.index + 1, if l.inverse { "^-1" } else { "" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Free reduction with a stack.
pub fn reduce_word(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word::new(out)
}

/// Every reduced word of length `≤ max_len` on `rank` generators, ordered by
/// length and then lexicographically (index, then positive before inverse).
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..rank)
        .flat_map(|i| [Letter::new(i, false), Letter::new(i, true)])
        .collect();
    let mut all = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.letters.last() != Some(&l.inv()) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word::new(letters));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

pub(crate) fn letter_image(gens: &[GroupElem], l: Letter) -> Result<GroupElem, SchottkyError> {
    let g = gens.get(l.index).ok_or(SchottkyError::IndexOutOfRange {
        index: l.index,
        rank: gens.len(),
    })?;
    Ok(if l.inverse { g.inverse() } else { *g })
}

pub(crate) fn word_image_in(gens: &[GroupElem], w: &Word) -> Result<GroupElem, SchottkyError> {
    w.letters
        .iter()
        .try_fold(GroupElem::identity(), |acc, &l| Ok(acc.compose(&letter_image(gens, l)?)))
}

/// Product of the generator matrices along `w`.
pub fn word_image(w: &Word, cfg: &SchottkyConfig) -> Result<GroupElem, SchottkyError> {
    word_image_in(&cfg.generators, w)
}

/// Which part of the ping-pong hypothesis failed.
#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    /// Tubes `a` and `b` (indices into [`SchottkyConfig::tubes`]) overlap.
    Overlap { a: usize, b: usize },
    /// `g_i^{±1}` fails to push the complement of the source tube deep
    /// enough into the target tube.
    Mapping { generator: usize, inverse: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending sample point, before mapping.
    pub witness: Option<Flag>,
    /// Separation (overlap) or depth (mapping) achieved.
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::Overlap { a, b } => {
                write!(f, "tubes {a} and {b} overlap (separation {:.6e})", self.value)
            }
            ViolationKind::Mapping { generator, inverse } => write!(
                f,
                "generator {}{} reaches depth {:.6e} only",
                generator + 1,
                if inverse { "^-1" } else { "" },
                self.value
            ),
        }
    }
}

/// Evidence that a configuration passes the sampled ping-pong test.
#[derive(Clone, Debug, PartialEq)]
pub struct PingPongCertificate {
    config: SchottkyConfig,
    /// Smallest analytic separation between two distinct tubes.
    pub disjointness_margin: f64,
    /// Smallest depth reached by a mapped complement sample, over all
    /// generators and both directions.
    pub mapping_depth: f64,
    /// Number of sample points pushed through each generator direction.
    pub samples_per_generator: usize,
}

impl PingPongCertificate {
    pub fn config(&self) -> &SchottkyConfig {
        &self.config
    }

    /// Worst slack over both conditions.
    pub fn worst_margin(&self) -> f64 {
        self.disjointness_margin.min(self.mapping_depth - self.config.margin)
    }
}

/// Complement of `source` plus its boundary.
fn closed_complement_sample(source: &Tube, m: usize, seed: u64) -> Result<Vec<Flag>, SampleError> {
    let mut pts = tube_complement_sample(source, m, 0.0, seed)?.points;
    pts.extend(tube_boundary_sample(source, m.div_ceil(4).max(2), seed ^ 0xb5)?.points);
    Ok(pts)
}

/// Checks that the tubes are pairwise disjoint (analytically) and that
/// every generator maps the sampled closed complement of its repelling tube
/// into its attracting tube with depth at least `cfg.margin`, and likewise
/// for the inverse.
pub fn certify_ping_pong(cfg: &SchottkyConfig, m: usize, seed: u64) -> Result<PingPongCertificate, SchottkyError> {
    for (i, g) in cfg.generators.iter().enumerate() {
        if !classify(g)?.is_loxodromic() {
            return Err(SchottkyError::NotLoxodromic(i));
        }
    }
    let tubes = cfg.tubes();
    let mut disjointness_margin = f64::INFINITY;
    for a in 0..tubes.len() {
        for b in a + 1..tubes.len() {
            let s = tubes[a].separation(&tubes[b]);
            if s <= 0.0 {
                return Err(SchottkyError::Violation(Box::new(Violation {
                    kind: ViolationKind::Overlap { a, b },
                    witness: None,
                    value: s,
                })));
            }
            disjointness_margin = disjointness_margin.min(s);
        }
    }
    let mut mapping_depth = f64::INFINITY;
    let mut samples = 0;
    for (i, (g, (hm, hp))) in cfg.generators.iter().zip(&cfg.pairs).enumerate() {
        for inverse in [false, true] {
            let (src, dst, h) = if inverse {
                (hp, hm, g.inverse())
            } else {
                (hm, hp, *g)
            };
            let sub_seed = seed.wrapping_add((2 * i + inverse as usize) as u64);
            let pts = closed_complement_sample(src, m, sub_seed)?;
            samples = pts.len();
            let depths: Vec<f64> = pts.par_iter().map(|x| dst.depth(&act(&h, x))).collect();
            // first failing sample in order, so the witness is deterministic
            if let Some(k) = depths.iter().position(|&d| !(d >= cfg.margin)) {
                return Err(SchottkyError::Violation(Box::new(Violation {
                    kind: ViolationKind::Mapping { generator: i, inverse },
                    witness: Some(pts[k]),
                    value: depths[k],
                })));
            }
            mapping_depth = depths.iter().copied().fold(mapping_depth, f64::min);
        }
    }
    Ok(PingPongCertificate {
        config: cfg.clone(),
        disjointness_margin,
        mapping_depth,
        samples_per_generator: samples,
    })
}

/// Worst separation between distinct word translates of `seed_tube`,
/// measured on interior and boundary samples of the tube.
#[derive(Clone, Debug, PartialEq)]
pub struct FreenessReport {
    pub words: usize,
    pub pairs_checked: usize,
    /// Smallest `-depth` of a transported sample inside the seed tube; the
    /// check passes when this exceeds the configuration margin.
    pub worst_clearance: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("translates by {u} and {w} meet (clearance {clearance:.6e})")]
pub struct FreenessViolation {
    pub u: Word,
    pub w: Word,
    pub witness: Flag,
    pub clearance: f64,
}

/// For all distinct reduced words `u, w` of length `≤ depth`, checks that
/// `u(T)` and `w(T)` are disjoint at sample scale by pushing samples of `T`
/// through `w⁻¹u` and requiring them to land outside `T` with the
/// configuration margin.
pub fn freeness_check(
    cfg: &SchottkyConfig,
    seed_tube: &Tube,
    depth: usize,
    m: usize,
    seed: u64,
) -> Result<Result<FreenessReport, FreenessViolation>, SchottkyError> {
    let mut pts = tube_sample(seed_tube, m, seed).points;
    pts.extend(tube_boundary_sample(seed_tube, m.div_ceil(2).max(2), seed ^ 0x3c)?.points);
    let words = reduced_words(cfg.rank(), depth);
    let images: Vec<GroupElem> = words
        .iter()
        .map(|w| word_image(w, cfg))
        .collect::<Result<_, _>>()?;
    let mut pairs = Vec::new();
    for a in 0..words.len() {
        for b in 0..words.len() {
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    // per pair: worst clearance and its first witness
    let results: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let h = images[b].inverse().compose(&images[a]);
            pts.iter()
                .enumerate()
                .map(|(k, x)| (-seed_tube.depth(&act(&h, x)), k))
                .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc })
        })
        .collect();
    let mut worst = f64::INFINITY;
    for (&(a, b), &(c, k)) in pairs.iter().zip(&results) {
        if !(c >= cfg.margin) {
            return Ok(Err(FreenessViolation {
                u: words[a].clone(),
                w: words[b].clone(),
                witness: pts[k],
                clearance: c,
            }));
        }
        worst = worst.min(c);
    }
    Ok(Ok(FreenessReport {
        words: words.len(),
        pairs_checked: pairs.len(),
        worst_clearance: worst,
    }))
}

/// Output of [`fundamental_domain_reduce`].
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// Letters applied, most recent first: `word_image(word) · z` is the
    /// representative.
    pub word: Word,
    pub representative: Flag,
    /// Rank one with positive spectrum: `(σ, t)` with `σ` on `∂H⁻` and
    /// `z = g^t σ`.
    pub flow: Option<(Flag, f64)>,
}

/// Depth of `z` in the attracting region `g(X ∖ Int H⁻)`, which is the
/// exact image of the repelling complement and sits inside `H⁺`.
fn image_region_depth(g_inv: &GroupElem, hm: &Tube, z: &Flag) -> f64 {
    -hm.depth(&act(g_inv, z))
}

/// Greedy reduction of `z` into the fundamental domain
/// `D = ∩ᵢ (X ∖ Int H⁻ᵢ) ∖ gᵢ(X ∖ Int H⁻ᵢ)`.
///
/// While `z` lies in some `Int H⁻ᵢ` apply `gᵢ`; while it lies in
/// `gᵢ(X ∖ Int H⁻ᵢ)` apply `gᵢ⁻¹`. When several regions contain `z`, the
/// deepest wins, then the lowest index.
pub fn fundamental_domain_reduce(z: &Flag, cfg: &SchottkyConfig, n_max: usize) -> Result<Reduction, SchottkyError> {
    let inverses: Vec<GroupElem> = cfg.generators.iter().map(|g| g.inverse()).collect();
    let mut cur = *z;
    let mut applied: Vec<Letter> = Vec::new();
    loop {
        let mut best: Option<(f64, Letter)> = None;
        for (i, (hm, _)) in cfg.pairs.iter().enumerate() {
            let candidates = [
                (hm.depth(&cur), Letter::new(i, false)),
                (image_region_depth(&inverses[i], hm, &cur), Letter::new(i, true)),
            ];
            for (d, l) in candidates {
                if d > 0.0 && best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, l));
                }
            }
        }
        let Some((_, l)) = best else { break };
        if applied.len() >= n_max {
            applied.reverse();
            return Err(SchottkyError::NoTermination {
                steps: n_max,
                partial: Word::new(applied),
            });
        }
        cur = act(&letter_image(&cfg.generators, l)?, &cur);
        applied.push(l);
    }
    applied.reverse();
    let flow = if cfg.rank() == 1 {
        flow_coordinates(z, &cfg.generators[0], &cfg.pairs[0].0)
    } else {
        None
    };
    Ok(Reduction {
        word: Word::new(applied),
        representative: cur,
        flow,
    })
}

/// Root of `s ↦ depth(H⁻, g^{-s} z)`, bracketed on the integer grid and
/// refined by bisection; `None` without a positive spectrum or if `z` is
/// not carried through `∂H⁻` by the flow.
fn flow_coordinates(z: &Flag, g: &GroupElem, hm: &Tube) -> Option<(Flag, f64)> {
    const MAX_STEPS: i64 = 4096;
    let flow = OneParameterGroup::new(g).ok()?;
    let f = |s: f64| hm.depth(&act(&flow.at(-s), z));
    let (mut lo, mut hi);
    if f(0.0) >= 0.0 {
        hi = 0.0;
        lo = -1.0;
        while f(lo) >= 0.0 {
            hi = lo;
            lo -= 1.0;
            if lo < -(MAX_STEPS as f64) {
                return None;
            }
        }
    } else {
        lo = 0.0;
        hi = 1.0;
        while f(hi) < 0.0 {
            lo = hi;
            hi += 1.0;
            if hi > MAX_STEPS as f64 {
                return None;
            }
        }
    }
    // invariant: f(lo) < 0 <= f(hi)
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((act(&flow.at(-hi), z), hi))
}

/// Images of the generators' attracting and repelling bouquets under all
/// reduced words of length `≤ depth`, thinned to at most `m` points by
/// farthest-point subsampling.
pub fn limit_set(
    cfg: &SchottkyConfig,
    certificate: &PingPongCertificate,
    depth: usize,
    m: usize,
) -> Result<SampledSet, SchottkyError> {
    if certificate.config != *cfg {
        return Err(SchottkyError::CertificateRequired);
    }
    let mut seeds = Vec::new();
    for (i, g) in cfg.generators.iter().enumerate() {
        let spec = classify(g)?;
        let lox = spec.loxodromic().ok_or(SchottkyError::NotLoxodromic(i))?;
        seeds.extend(bouquet(&lox.x_plus, BOUQUET_POINTS)?.points);
        seeds.extend(bouquet(&lox.x_minus, BOUQUET_POINTS)?.points);
    }
    let words = reduced_words(cfg.rank(), depth);
    let images: Vec<Vec<Flag>> = words
        .par_iter()
        .map(|w| {
            let h = word_image(w, cfg)?;
            Ok(seeds.iter().map(|x| act(&h, x)).collect())
        })
        .collect::<Result<_, SchottkyError>>()?;
    let cloud: Vec<Flag> = images.into_iter().flatten().collect();
    let (points, radius) = farthest_point_subsample(&cloud, m);
    let circle_step = std::f64::consts::PI / BOUQUET_POINTS as f64;
    Ok(SampledSet::new(points, Some(radius + circle_step)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{directed_hausdorff, hausdorff, iterate_set};
    use crate::flag::{flag_distance, make_flag};
    use crate::linalg::Vec3;
    use crate::sample::complement_of_tubes_sample;

    fn e(i: usize) -> Vec3 {
        Vec3::basis(i)
    }

    fn l(i: usize) -> Letter {
        Letter::new(i, false)
    }

    fn li(i: usize) -> Letter {
        Letter::new(i, true)
    }

    fn rank_one(r: f64) -> SchottkyConfig {
        let g = GroupElem::diag(256.0, 16.0, 1.0).unwrap();
        let xm = make_flag(e(2), e(0)).unwrap();
        let xp = make_flag(e(0), e(2)).unwrap();
        let pair = (Tube::new(xm, r, r).unwrap(), Tube::new(xp, r, r).unwrap());
        SchottkyConfig::new(vec![g], vec![pair], 0.01).unwrap()
    }

    #[test]
    fn reduce_word_examples() {
        assert!(reduce_word(&Word::new(vec![l(0), li(0)])).is_empty());
        let w = Word::new(vec![l(0), l(1), li(0)]);
        assert_eq!(reduce_word(&w), w);
        let w = Word::new(vec![l(0), l(1), li(1), l(0)]);
        assert_eq!(reduce_word(&w), Word::new(vec![l(0), l(0)]));
        let w = Word::new(vec![l(2), l(0), li(0), li(2), l(1)]);
        assert_eq!(reduce_word(&reduce_word(&w)), reduce_word(&w));
    }

    #[test]
    fn reduced_word_counts() {
        // 1 + 2d * sum (2d-1)^k
        assert_eq!(reduced_words(1, 5).len(), 11);
        assert_eq!(reduced_words(2, 3).len(), 1 + 4 + 12 + 36);
        assert!(reduced_words(3, 3).iter().all(|w| w.is_reduced()));
    }

    #[test]
    fn word_image_examples() {
        let cfg = rank_one(0.4);
        assert_eq!(word_image(&Word::empty(), &cfg).unwrap(), GroupElem::identity());
        assert_eq!(word_image(&Word::new(vec![l(0)]), &cfg).unwrap(), cfg.generators()[0]);
        let w = Word::new(vec![l(0), l(0), li(0)]);
        let id = word_image(&w.concat(&w.inverse()), &cfg).unwrap();
        assert!(id.distance_to_identity() < 1e-10);
        assert!(matches!(
            word_image(&Word::new(vec![l(3)]), &cfg),
            Err(SchottkyError::IndexOutOfRange { index: 3, rank: 1 })
        ));
    }

    #[test]
    fn overlapping_tubes_violate_disjointness() {
        let g = GroupElem::diag(16.0, 4.0, 1.0).unwrap();
        let xm = make_flag(e(2), e(0)).unwrap();
        let t = Tube::new(xm, 0.4, 0.4).unwrap();
        let cfg = SchottkyConfig::new(vec![g], vec![(t, t)], 0.01).unwrap();
        match certify_ping_pong(&cfg, 100, 1) {
            Err(SchottkyError::Violation(v)) => {
                assert_eq!(v.kind, ViolationKind::Overlap { a: 0, b: 1 })
            }
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn non_loxodromic_generator_rejected() {
        let mut cfg = rank_one(0.4);
        cfg.generators[0] = GroupElem::diag(1.0, 1.0, 1.0 + 1e-12).unwrap();
        assert_eq!(certify_ping_pong(&cfg, 10, 1), Err(SchottkyError::NotLoxodromic(0)));
    }

    #[test]
    fn weak_generator_fails_mapping() {
        let mut cfg = rank_one(0.4);
        cfg.generators[0] = GroupElem::diag(16.0, 4.0, 1.0).unwrap();
        assert!(matches!(
            certify_ping_pong(&cfg, 2000, 1),
            Err(SchottkyError::Violation(v)) if matches!(v.kind, ViolationKind::Mapping { .. })
        ));
        assert!(certify_ping_pong(&rank_one(0.4), 2000, 1).is_ok());
    }

    #[test]
    fn seed_tube_in_domain_has_free_translates() {
        let cfg = rank_one(0.4);
        let c = make_flag(Vec3::new(1.0, 0.0, 1.0), Vec3::new(1.0, 1.0, -1.0)).unwrap();
        let seed = Tube::new(c, 0.15, 0.15).unwrap();
        let rep = freeness_check(&cfg, &seed, 3, 200, 2).unwrap().unwrap();
        assert_eq!(rep.words, 7);
        assert!(rep.worst_clearance >= cfg.margin());
        // an attracting tube is nested under the generator, so it cannot
        // serve as a seed
        let nested = cfg.pairs()[0].1;
        assert!(freeness_check(&cfg, &nested, 1, 200, 2).unwrap().is_err());
    }

    #[test]
    fn reduce_examples() {
        let cfg = rank_one(0.4);
        let tubes = cfg.tubes();
        let d = complement_of_tubes_sample(&tubes, 20, 0.05, 4).unwrap();
        let g = cfg.generators()[0];
        for z0 in d.iter() {
            let r = fundamental_domain_reduce(z0, &cfg, 50).unwrap();
            assert!(r.word.is_empty());
            assert_eq!(r.representative, *z0);
            let z = act(&g, z0);
            let r = fundamental_domain_reduce(&z, &cfg, 50).unwrap();
            assert_eq!(r.word, Word::new(vec![li(0)]));
            assert!(flag_distance(&r.representative, z0) < 1e-8);
        }
    }

    #[test]
    fn reduce_word_maps_representative_back() {
        let cfg = rank_one(0.4);
        let pts = crate::sample::uniform_sample(200, 6);
        for z in pts.iter() {
            let r = fundamental_domain_reduce(z, &cfg, 200).unwrap();
            let back = act(&word_image(&r.word.inverse(), &cfg).unwrap(), &r.representative);
            assert!(flag_distance(&back, z) < 1e-8);
        }
    }

    #[test]
    fn flow_time_is_equivariant() {
        let cfg = rank_one(0.4);
        let g = cfg.generators()[0];
        for z in crate::sample::uniform_sample(50, 7).iter() {
            let t0 = fundamental_domain_reduce(z, &cfg, 200).unwrap().flow.unwrap().1;
            let t1 = fundamental_domain_reduce(&act(&g, z), &cfg, 200).unwrap().flow.unwrap().1;
            assert!((t1 - t0 - 1.0).abs() < 1e-6, "{t0} {t1}");
        }
    }

    #[test]
    fn limit_set_examples() {
        let cfg = rank_one(0.4);
        let cert = certify_ping_pong(&cfg, 500, 1).unwrap();
        let ls = limit_set(&cfg, &cert, 0, 10_000).unwrap();
        assert_eq!(ls.len(), 4 * 2 * BOUQUET_POINTS / 2);
        let small = limit_set(&cfg, &cert, 3, 100).unwrap();
        assert!(small.len() <= 100);
        let other = rank_one(0.45);
        assert_eq!(limit_set(&other, &cert, 1, 10), Err(SchottkyError::CertificateRequired));
    }

    #[test]
    fn rank_one_limit_set_is_the_two_bouquets() {
        let cfg = rank_one(0.4);
        let cert = certify_ping_pong(&cfg, 500, 1).unwrap();
        let ls = limit_set(&cfg, &cert, 3, 1500).unwrap();
        assert_eq!(ls.len(), 1500);
        let xm = make_flag(e(2), e(0)).unwrap();
        let xp = make_flag(e(0), e(2)).unwrap();
        let bouquets = bouquet(&xm, 2000).unwrap().union(&bouquet(&xp, 2000).unwrap());
        assert!(directed_hausdorff(&ls, &bouquets).unwrap() < 1e-2);
        let moved = iterate_set(&cfg.generators()[0], &ls, 1);
        assert!(hausdorff(&moved, &ls).unwrap() <= 2.0 * ls.resolution.unwrap());
    }
}
