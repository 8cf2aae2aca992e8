use std::fmt::Display;

use anyhow::anyhow;
use sha2::{Digest, Sha256};

use flagsurge::dynamics::{attraction_certificate, coverage_certificate, iterate_set, DynamicsError};
use flagsurge::export::{flags_to_csv, flags_to_ply, residuals_to_csv};
use flagsurge::holonomy::{covering_parity, density_check, trace_invariants, trace_lists_differ, DeformedRep, SurfaceWord};
use flagsurge::sample::{bouquet, bouquet_complement_sample, uniform_sample, SampledSet};
use flagsurge::schottky::{certify_ping_pong, freeness_check, limit_set, SchottkyError};
use flagsurge::surgery::{
    combine_free_product, surgery_exponent, tree_disjointness_check, verify_gluing, GluingData, SurgeryError,
};
use flagsurge::{classify, Flag, Spectrum};

use crate::scene::{Loaded, SurgerySpec};

/// Input problems exit with 3, failed computations with 2.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Compute(anyhow::Error),
}

pub trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn compute(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn compute(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Compute(e.into()))
    }
}

/// Report lines and files produced by one command. `passed = false` means a
/// violation or non-convergence was found and reported.
#[derive(Default)]
pub struct Outcome {
    pub passed: bool,
    pub report: Vec<(String, String)>,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, ..Default::default() }
    }

    fn line(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.report.push((key.to_string(), value.to_string()));
        self
    }

    fn file(&mut self, name: &str, contents: String) -> &mut Self {
        self.files.push((name.to_string(), contents));
        self
    }

    fn cloud(&mut self, stem: &str, points: &[Flag]) -> &mut Self {
        self.file(&format!("{stem}.csv"), flags_to_csv(points));
        self.file(&format!("{stem}.ply"), flags_to_ply(points))
    }

    fn fail(&mut self) -> &mut Self {
        self.passed = false;
        self
    }
}

fn fmt_flag(x: &Flag) -> String {
    let v = x.to_array().map(|c| c + 0.0);
    format!(
        "p=({:.12}, {:.12}, {:.12}) n=({:.12}, {:.12}, {:.12})",
        v[0], v[1], v[2], v[3], v[4], v[5]
    )
}

fn fmt_resolution(r: Option<f64>) -> String {
    r.map_or_else(|| "none".to_string(), |r| format!("{r:.6e}"))
}

pub fn classify_cmd(l: &Loaded, matrix: Option<&str>) -> Result<Outcome, Failure> {
    let (name, g) = l.pick(&l.matrices, "matrix", matrix).input()?;
    let spec = classify(g).compute()?;
    let mut out = Outcome::new();
    out.line("matrix", &name);
    match spec {
        Spectrum::Loxodromic(lox) => {
            let e = lox.eigenvalues;
            out.line("kind", "loxodromic")
                .line("eigenvalues", format!("{:.12e} {:.12e} {:.12e}", e[0], e[1], e[2]))
                .line("x_plus", fmt_flag(&lox.x_plus))
                .line("x_minus", fmt_flag(&lox.x_minus))
                .line("residual", format!("{:.3e}", lox.residual))
                .file("fixed_flags.csv", flags_to_csv(&[lox.x_plus, lox.x_minus]));
        }
        Spectrum::NonLoxodromic { real_eigenvalues } => {
            let e: Vec<String> = real_eigenvalues.iter().map(|x| format!("{x:.12e}")).collect();
            out.line("kind", "non_loxodromic").line("real_eigenvalues", e.join(" "));
        }
    }
    Ok(out)
}

pub fn bouquet_cmd(l: &Loaded, flag: Option<&str>, points: Option<usize>) -> Result<Outcome, Failure> {
    let (name, x) = l.pick(&l.flags, "flag", flag).input()?;
    let m = points.unwrap_or(l.scene.sampling.points_per_circle);
    let b = bouquet(x, m).input()?;
    let mut out = Outcome::new();
    out.line("flag", &name)
        .line("points", b.len())
        .line("resolution", fmt_resolution(b.resolution))
        .cloud("bouquet", &b.points);
    Ok(out)
}

pub fn iterate_cmd(l: &Loaded, matrix: Option<&str>, cloud: &str, n: i64) -> Result<Outcome, Failure> {
    let (name, g) = l.pick(&l.matrices, "matrix", matrix).input()?;
    let k = l.cloud(cloud).input()?;
    let image = iterate_set(g, &k, n);
    let mut out = Outcome::new();
    out.line("matrix", &name)
        .line("cloud", cloud)
        .line("exponent", n)
        .line("points", image.len())
        .cloud("iterate", &image.points);
    Ok(out)
}

/// Named cloud, or a uniform sample kept `margin` away from `avoid`'s bouquet.
fn cloud_or_default(l: &Loaded, cloud: Option<&str>, avoid: &Flag, margin: f64) -> Result<SampledSet, Failure> {
    match cloud {
        Some(c) => l.cloud(c).input(),
        None => bouquet_complement_sample(avoid, l.scene.sampling.count, margin, l.seed().input()?).compute(),
    }
}

fn loxodromic(g: &flagsurge::GroupElem, name: &str) -> Result<Box<flagsurge::Loxodromic>, Failure> {
    match classify(g).compute()? {
        Spectrum::Loxodromic(lox) => Ok(lox),
        Spectrum::NonLoxodromic { .. } => Err(Failure::Compute(anyhow!("matrix `{name}` is not loxodromic"))),
    }
}

pub fn attract_cmd(
    l: &Loaded,
    matrix: Option<&str>,
    cloud: Option<&str>,
    eps: Option<f64>,
    n_max: Option<usize>,
) -> Result<Outcome, Failure> {
    let s = &l.scene.sampling;
    let (name, g) = l.pick(&l.matrices, "matrix", matrix).input()?;
    let lox = loxodromic(g, &name)?;
    let k = cloud_or_default(l, cloud, &lox.x_minus, s.margin)?;
    let eps = eps.unwrap_or(s.eps);
    let mut out = Outcome::new();
    out.line("matrix", &name).line("samples", k.len()).line("eps", eps);
    let report = match attraction_certificate(g, &k, eps, n_max.unwrap_or(s.n_max)) {
        Ok(r) => r,
        Err(DynamicsError::NoConvergence(r)) => {
            out.fail();
            *r
        }
        Err(e) => return Err(Failure::Compute(e.into())),
    };
    out.line("converged", report.converged)
        .line("n_star", report.n_star)
        .line("monotone_from", report.monotone_from())
        .line(
            "final_residual",
            format!("{:.6e}", report.residuals.last().map_or(f64::NAN, |r| r.1)),
        )
        .file("residuals.csv", residuals_to_csv(&report.residuals));
    Ok(out)
}

pub fn coverage_cmd(
    l: &Loaded,
    matrix: Option<&str>,
    tube: Option<&str>,
    cloud: Option<&str>,
    n_max: Option<usize>,
) -> Result<Outcome, Failure> {
    let s = &l.scene.sampling;
    let (name, g) = l.pick(&l.matrices, "matrix", matrix).input()?;
    let (tname, p) = l.pick(&l.tubes, "tube", tube).input()?;
    let targets = match cloud {
        Some(c) => l.cloud(c).input()?,
        None => uniform_sample(s.count, l.seed().input()?),
    };
    let rep = coverage_certificate(g, p, &targets, n_max.unwrap_or(s.n_max), s.margin).compute()?;
    let mut out = Outcome::new();
    out.line("matrix", &name)
        .line("tube", &tname)
        .line("targets_total", rep.targets_total)
        .line("targets_reached", rep.targets_reached)
        .line("excluded", rep.excluded.len())
        .line("max_steps_used", rep.max_steps_used)
        .line("complete", rep.complete())
        .file("failures.csv", flags_to_csv(&rep.failures));
    if !rep.complete() {
        out.fail();
    }
    Ok(out)
}

fn schottky_error(out: &mut Outcome, e: SchottkyError) -> Result<(), Failure> {
    match e {
        SchottkyError::Violation(v) => {
            out.fail().line("violation", &v);
            if let Some(w) = v.witness {
                out.file("witness.csv", flags_to_csv(&[w]));
            }
            Ok(())
        }
        e => Err(Failure::Compute(e.into())),
    }
}

pub fn certify_cmd(l: &Loaded, schottky: Option<&str>, depth: Option<usize>) -> Result<Outcome, Failure> {
    let s = &l.scene.sampling;
    let (name, cfg) = l.pick(&l.schottky, "schottky", schottky).input()?;
    let seed = l.seed().input()?;
    let mut out = Outcome::new();
    out.line("schottky", &name).line("rank", cfg.rank());
    let cert = match certify_ping_pong(cfg, s.count, seed) {
        Ok(c) => c,
        Err(e) => {
            schottky_error(&mut out, e)?;
            return Ok(out);
        }
    };
    out.line("certified", true)
        .line("disjointness_margin", format!("{:.6e}", cert.disjointness_margin))
        .line("mapping_depth", format!("{:.6e}", cert.mapping_depth));
    if let Some(t) = &l.scene.schottky[&name].seed_tube {
        let depth = depth.unwrap_or(s.depth);
        out.line("freeness_depth", depth);
        match freeness_check(cfg, &l.tubes[t], depth, s.count, seed).compute()? {
            Ok(r) => {
                out.line("freeness_words", r.words)
                    .line("freeness_pairs", r.pairs_checked)
                    .line("freeness_clearance", format!("{:.6e}", r.worst_clearance));
            }
            Err(v) => {
                out.fail()
                    .line("freeness_violation", format!("{} vs {}", v.u, v.w))
                    .line("freeness_clearance", format!("{:.6e}", v.clearance))
                    .file("witness.csv", flags_to_csv(&[v.witness]));
            }
        }
    }
    Ok(out)
}

pub fn limit_set_cmd(
    l: &Loaded,
    schottky: Option<&str>,
    depth: Option<usize>,
    points: Option<usize>,
) -> Result<Outcome, Failure> {
    let s = &l.scene.sampling;
    let (name, cfg) = l.pick(&l.schottky, "schottky", schottky).input()?;
    let mut out = Outcome::new();
    out.line("schottky", &name);
    let cert = match certify_ping_pong(cfg, s.count, l.seed().input()?) {
        Ok(c) => c,
        Err(e) => {
            schottky_error(&mut out, e)?;
            return Ok(out);
        }
    };
    let depth = depth.unwrap_or(s.depth);
    let ls = limit_set(cfg, &cert, depth, points.unwrap_or(s.count)).compute()?;
    out.line("depth", depth)
        .line("points", ls.len())
        .line("resolution", fmt_resolution(ls.resolution))
        .cloud("limit_set", &ls.points);
    Ok(out)
}

fn surgery_spec(l: &Loaded) -> Result<&SurgerySpec, Failure> {
    l.scene
        .surgery
        .as_ref()
        .ok_or_else(|| Failure::Input(anyhow!("scene has no `surgery` section")))
}

fn surgery_error(out: &mut Outcome, e: SurgeryError) -> Result<(), Failure> {
    match e {
        SurgeryError::NoExponentFound { .. } | SurgeryError::SwapParityError(_) => {
            out.fail().line("error", e);
            Ok(())
        }
        SurgeryError::ConditionFailed { condition, witness, value } => {
            out.fail()
                .line("failed_condition", condition)
                .line("failed_value", format!("{value:.6e}"))
                .file("witness.csv", flags_to_csv(&[*witness]));
            Ok(())
        }
        SurgeryError::DisjointnessViolation { u, w, witness, clearance } => {
            out.fail()
                .line("violation", format!("translates by {u} and {w} meet"))
                .line("clearance", format!("{clearance:.6e}"))
                .file("witness.csv", flags_to_csv(&[*witness]));
            Ok(())
        }
        e => Err(Failure::Compute(e.into())),
    }
}

/// Runs the exponent search and verification; `None` if either failed.
fn search_and_verify(l: &Loaded, out: &mut Outcome) -> Result<Option<GluingData>, Failure> {
    let spec = surgery_spec(l)?;
    let g = &l.matrices[&spec.generator];
    let h2 = &l.tubes[&spec.outer_tube];
    let m = spec.samples.unwrap_or(l.scene.sampling.count);
    let seed = l.seed().input()?;
    out.line("generator", &spec.generator).line("outer_tube", &spec.outer_tube).line("samples", m);
    let search = match surgery_exponent(g, h2, m, spec.n_max, spec.margin, seed) {
        Ok(s) => s,
        Err(e) => {
            surgery_error(out, e)?;
            return Ok(None);
        }
    };
    let gd = search.gluing;
    out.line("exponent", gd.n)
        .line("inner_radii", format!("{:.6e} {:.6e}", gd.h1.r_alpha(), gd.h1.r_beta()))
        .file("residuals.csv", residuals_to_csv(&search.curve));
    match verify_gluing(&gd, m, spec.margin, seed) {
        Ok(rep) => {
            let [a, b, c, d] = rep.margins();
            out.line("verified", true)
                .line("margin_inner_in_outer", format!("{a:.6e}"))
                .line("margin_exchange", format!("{b:.6e}"))
                .line("margin_boundary", format!("{c:.6e}"))
                .line("margin_shell", format!("{d:.6e}"))
                .line("shell_samples", rep.shell_samples);
            Ok(Some(gd))
        }
        Err(e) => {
            surgery_error(out, e)?;
            Ok(None)
        }
    }
}

pub fn surgery_cmd(l: &Loaded) -> Result<Outcome, Failure> {
    let mut out = Outcome::new();
    search_and_verify(l, &mut out)?;
    Ok(out)
}

pub fn combine_cmd(l: &Loaded, depth: Option<usize>) -> Result<Outcome, Failure> {
    let spec = surgery_spec(l)?;
    let need = |v: &Option<String>, f: &str| {
        v.clone()
            .ok_or_else(|| Failure::Input(anyhow!("surgery.{f}: required by `combine`")))
    };
    let (first, second, conj) = (need(&spec.first, "first")?, need(&spec.second, "second")?, need(&spec.conjugator, "conjugator")?);
    let mut out = Outcome::new();
    let Some(gd) = search_and_verify(l, &mut out)? else {
        return Ok(out);
    };
    let cg = match combine_free_product(&l.schottky[&first], &l.schottky[&second], &gd, &l.matrices[&conj]) {
        Ok(cg) => cg,
        Err(e) => {
            surgery_error(&mut out, e)?;
            return Ok(out);
        }
    };
    out.line("generators", cg.generators().len()).line("conjugated_swap", 0);
    let depth = depth.or(spec.depth).unwrap_or(l.scene.sampling.depth);
    let m = spec.samples.unwrap_or(l.scene.sampling.count);
    match tree_disjointness_check(&cg, depth, m, l.seed().input()?) {
        Ok(r) => {
            out.line("tree_depth", depth)
                .line("tree_words", r.words)
                .line("tree_pairs", r.pairs_checked)
                .line("tree_samples", r.samples)
                .line("tree_clearance", format!("{:.6e}", r.worst_clearance));
        }
        Err(e) => surgery_error(&mut out, e)?,
    }
    Ok(out)
}

fn traces_csv(traces: &[f64]) -> String {
    let mut s = String::from("trace\n");
    for t in traces {
        s.push_str(&format!("{t:.16e}\n"));
    }
    s
}

fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn deform_cmd(l: &Loaded, bound: u32, tol: f64, trace_bound: Option<u32>) -> Result<Outcome, Failure> {
    let spec = l
        .scene
        .deform
        .as_ref()
        .ok_or_else(|| Failure::Input(anyhow!("scene has no `deform` section")))?;
    if bound == 0 || !(tol > 0.0) {
        return Err(Failure::Input(anyhow!("--N must be at least 1 and --tol positive")));
    }
    let base = l.matrices[&spec.base];
    let rep = DeformedRep::new(base, spec.eps).compute()?;
    let density = density_check(&spec.eps, bound, tol);
    let tb = trace_bound.unwrap_or(spec.trace_bound);
    let traces = trace_invariants(&rep, tb).compute()?;
    let csv = traces_csv(&traces);
    let mut out = Outcome::new();
    let c = density.coefficients;
    out.line("base", &spec.base)
        .line("eps", format!("{:?}", spec.eps))
        .line("relator", "identity")
        .line("bound", bound)
        .line("tol", tol)
        .line("min_positive", format!("{:.6e}", density.min_positive))
        .line("coefficients", format!("{} {} {} {} {}", c[0], c[1], c[2], c[3], c[4]))
        .line("dense_at_scale", u8::from(density.dense_at_scale))
        .line("trace_bound", tb)
        .line("trace_count", traces.len())
        .line("trace_digest", digest(&csv));
    if let Some(other) = spec.compare {
        let rep2 = DeformedRep::new(base, other).compute()?;
        let t2 = trace_invariants(&rep2, tb).compute()?;
        out.line("compare_eps", format!("{other:?}"))
            .line("compare_digest", digest(&traces_csv(&t2)))
            .line("trace_lists_differ", trace_lists_differ(&traces, &t2));
    }
    out.file("traces.csv", csv);
    Ok(out)
}

pub fn parity_cmd(word: &str) -> Result<u8, Failure> {
    let w: SurfaceWord = word.parse().input()?;
    Ok(covering_parity(&w))
}

pub fn export_cmd(l: &Loaded, cloud: &str) -> Result<Outcome, Failure> {
    let set = l.cloud(cloud).input()?;
    let mut out = Outcome::new();
    out.line("cloud", cloud)
        .line("points", set.len())
        .line("resolution", fmt_resolution(set.resolution))
        .cloud("points", &set.points);
    Ok(out)
}
