//! Scene files: a single JSON document of named matrices, flags, tubes,
//! point clouds and Schottky, surgery and deformation sections.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use flagsurge::export::flags_from_csv;
use flagsurge::sample::{
    bouquet, bouquet_complement_sample, tube_complement_sample, tube_sample, uniform_sample, SampledSet,
};
use flagsurge::schottky::SchottkyConfig;
use flagsurge::spectral::classify;
use flagsurge::{make_flag, Flag, GroupElem, Mat3, Tube, Vec3};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    /// Required by every command that samples.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default, deserialize_with = "unique_map")]
    pub matrices: BTreeMap<String, MatrixSpec>,
    #[serde(default, deserialize_with = "unique_map")]
    pub flags: BTreeMap<String, FlagSpec>,
    #[serde(default, deserialize_with = "unique_map")]
    pub tubes: BTreeMap<String, TubeSpec>,
    #[serde(default, deserialize_with = "unique_map")]
    pub clouds: BTreeMap<String, CloudSpec>,
    #[serde(default, deserialize_with = "unique_map")]
    pub schottky: BTreeMap<String, SchottkySpec>,
    #[serde(default)]
    pub surgery: Option<SurgerySpec>,
    #[serde(default)]
    pub deform: Option<DeformSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    pub count: usize,
    pub margin: f64,
    pub n_max: usize,
    pub eps: f64,
    pub depth: usize,
    pub points_per_circle: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { count: 1000, margin: 0.1, n_max: 64, eps: 1e-3, depth: 2, points_per_circle: 64 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MatrixSpec {
    /// Row-major literal.
    Rows([[f64; 3]; 3]),
    Diag { diag: [f64; 3] },
    /// Rotation by `angle` radians about `axis`.
    Rotation { axis: [f64; 3], angle: f64 },
    /// Left-to-right product of named matrices; a `^-1` suffix inverts.
    Product { product: Vec<String> },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FlagSpec {
    Literal { p: [f64; 3], n: [f64; 3] },
    /// Attracting (`plus`) or repelling (`minus`) fixed flag of a matrix.
    Fixed { fixed: String, side: Side },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeSpec {
    pub center: String,
    pub r_alpha: f64,
    pub r_beta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CloudSpec {
    Uniform {
        count: Option<usize>,
    },
    Bouquet {
        flag: String,
        points_per_circle: Option<usize>,
    },
    Tube {
        tube: String,
        count: Option<usize>,
    },
    TubeComplement {
        tube: String,
        count: Option<usize>,
        margin: Option<f64>,
    },
    BouquetComplement {
        flag: String,
        count: Option<usize>,
        margin: Option<f64>,
    },
    /// Flags previously written by `export`; relative to the scene file.
    Csv {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchottkySpec {
    pub generators: Vec<String>,
    /// `[H⁻, H⁺]` tube names, one pair per generator.
    pub pairs: Vec<[String; 2]>,
    #[serde(default = "default_schottky_margin")]
    pub margin: f64,
    /// Seed tube for the freeness check.
    #[serde(default)]
    pub seed_tube: Option<String>,
}

fn default_schottky_margin() -> f64 {
    0.01
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgerySpec {
    pub generator: String,
    pub outer_tube: String,
    #[serde(default = "default_surgery_n_max")]
    pub n_max: usize,
    #[serde(default = "default_schottky_margin")]
    pub margin: f64,
    /// Defaults to `sampling.count`.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub first: Option<String>,
    #[serde(default)]
    pub second: Option<String>,
    #[serde(default)]
    pub conjugator: Option<String>,
    /// Defaults to `sampling.depth`.
    #[serde(default)]
    pub depth: Option<usize>,
}

fn default_surgery_n_max() -> usize {
    32
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformSpec {
    pub base: String,
    /// `(s₁, s₂, t₁, t₂)`.
    pub eps: [f64; 4],
    #[serde(default)]
    pub compare: Option<[f64; 4]>,
    #[serde(default = "default_trace_bound")]
    pub trace_bound: u32,
}

fn default_trace_bound() -> u32 {
    2
}

/// Rejects duplicate keys, which plain maps silently overwrite.
fn unique_map<'de, D, V>(d: D) -> std::result::Result<BTreeMap<String, V>, D::Error>
where
    D: Deserializer<'de>,
    V: Deserialize<'de>,
{
    struct Unique<V>(PhantomData<V>);

    impl<'de, V: Deserialize<'de>> Visitor<'de> for Unique<V> {
        type Value = BTreeMap<String, V>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object of uniquely named entries")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = access.next_entry::<String, V>()? {
                if out.contains_key(&k) {
                    return Err(serde::de::Error::custom(format!("duplicate name `{k}`")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }

    d.deserialize_map(Unique(PhantomData))
}

/// A parsed scene with every named object resolved.
pub struct Loaded {
    pub scene: Scene,
    pub dir: PathBuf,
    pub matrices: BTreeMap<String, GroupElem>,
    pub flags: BTreeMap<String, Flag>,
    pub tubes: BTreeMap<String, Tube>,
    pub schottky: BTreeMap<String, SchottkyConfig>,
}

pub fn parse(text: &str) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            anyhow!("{inner}")
        } else {
            anyhow!("field `{path}`: {inner}")
        }
    })
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scene = parse(&text).with_context(|| format!("{}", path.display()))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    resolve(scene, dir).with_context(|| format!("{}", path.display()))
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, field: &str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| anyhow!("{field}: unknown {what} `{name}`"))
}

pub fn resolve(scene: Scene, dir: PathBuf) -> Result<Loaded> {
    let mut seen = BTreeSet::new();
    let names = scene
        .matrices
        .keys()
        .chain(scene.flags.keys())
        .chain(scene.tubes.keys())
        .chain(scene.clouds.keys())
        .chain(scene.schottky.keys());
    for name in names {
        if !seen.insert(name) {
            bail!("name `{name}` is used by two different objects");
        }
    }

    let mut matrices = BTreeMap::new();
    for name in scene.matrices.keys() {
        resolve_matrix(&scene, name, &mut matrices, &mut Vec::new())?;
    }

    let mut flags = BTreeMap::new();
    for (name, spec) in &scene.flags {
        let field = format!("flags.{name}");
        let x = match spec {
            FlagSpec::Literal { p, n } => {
                make_flag(Vec3(*p), Vec3(*n)).map_err(|e| anyhow!("{field}: {e}"))?
            }
            FlagSpec::Fixed { fixed, side } => {
                let g = lookup(&matrices, "matrix", &format!("{field}.fixed"), fixed)?;
                let spec = classify(g).map_err(|e| anyhow!("{field}: {e}"))?;
                let lox = spec
                    .loxodromic()
                    .ok_or_else(|| anyhow!("{field}: matrix `{fixed}` is not loxodromic"))?;
                match side {
                    Side::Plus => lox.x_plus,
                    Side::Minus => lox.x_minus,
                }
            }
        };
        flags.insert(name.clone(), x);
    }

    let mut tubes = BTreeMap::new();
    for (name, spec) in &scene.tubes {
        let field = format!("tubes.{name}");
        let c = lookup(&flags, "flag", &format!("{field}.center"), &spec.center)?;
        let t = Tube::new(*c, spec.r_alpha, spec.r_beta).map_err(|e| anyhow!("{field}: {e}"))?;
        tubes.insert(name.clone(), t);
    }

    for (name, spec) in &scene.clouds {
        let field = format!("clouds.{name}");
        match spec {
            CloudSpec::Bouquet { flag, .. } | CloudSpec::BouquetComplement { flag, .. } => {
                lookup(&flags, "flag", &format!("{field}.flag"), flag)?;
            }
            CloudSpec::Tube { tube, .. } | CloudSpec::TubeComplement { tube, .. } => {
                lookup(&tubes, "tube", &format!("{field}.tube"), tube)?;
            }
            CloudSpec::Uniform { .. } | CloudSpec::Csv { .. } => {}
        }
    }

    let mut schottky = BTreeMap::new();
    for (name, spec) in &scene.schottky {
        let field = format!("schottky.{name}");
        let gens = spec
            .generators
            .iter()
            .map(|g| lookup(&matrices, "matrix", &format!("{field}.generators"), g).copied())
            .collect::<Result<Vec<_>>>()?;
        let pairs = spec
            .pairs
            .iter()
            .map(|[a, b]| {
                let f = format!("{field}.pairs");
                Ok((*lookup(&tubes, "tube", &f, a)?, *lookup(&tubes, "tube", &f, b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(t) = &spec.seed_tube {
            lookup(&tubes, "tube", &format!("{field}.seed_tube"), t)?;
        }
        let cfg = SchottkyConfig::new(gens, pairs, spec.margin).map_err(|e| anyhow!("{field}: {e}"))?;
        schottky.insert(name.clone(), cfg);
    }

    if let Some(s) = &scene.surgery {
        lookup(&matrices, "matrix", "surgery.generator", &s.generator)?;
        lookup(&tubes, "tube", "surgery.outer_tube", &s.outer_tube)?;
        if let Some(n) = &s.first {
            lookup(&schottky, "schottky section", "surgery.first", n)?;
        }
        if let Some(n) = &s.second {
            lookup(&schottky, "schottky section", "surgery.second", n)?;
        }
        if let Some(n) = &s.conjugator {
            lookup(&matrices, "matrix", "surgery.conjugator", n)?;
        }
    }
    if let Some(d) = &scene.deform {
        lookup(&matrices, "matrix", "deform.base", &d.base)?;
    }

    Ok(Loaded { scene, dir, matrices, flags, tubes, schottky })
}

fn resolve_matrix(
    scene: &Scene,
    name: &str,
    done: &mut BTreeMap<String, GroupElem>,
    stack: &mut Vec<String>,
) -> Result<GroupElem> {
    if let Some(g) = done.get(name) {
        return Ok(*g);
    }
    let field = format!("matrices.{name}");
    if stack.iter().any(|s| s == name) {
        bail!("{field}: product refers back to itself");
    }
    let spec = scene
        .matrices
        .get(name)
        .ok_or_else(|| anyhow!("matrices.{}: unknown matrix `{name}`", stack.last().map_or("", String::as_str)))?;
    let g = match spec {
        MatrixSpec::Rows(r) => GroupElem::from_matrix(Mat3::from_row_major([
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
        ])),
        MatrixSpec::Diag { diag } => GroupElem::diag(diag[0], diag[1], diag[2]),
        MatrixSpec::Rotation { axis, angle } => {
            let a = Vec3(*axis)
                .normalized(0.0)
                .ok_or_else(|| anyhow!("{field}.axis: zero vector"))?;
            GroupElem::from_matrix(rotation(a, *angle))
        }
        MatrixSpec::Product { product } => {
            stack.push(name.to_string());
            let mut acc = GroupElem::identity();
            for term in product {
                let (base, inv) = match term.strip_suffix("^-1") {
                    Some(b) => (b, true),
                    None => (term.as_str(), false),
                };
                let h = resolve_matrix(scene, base, done, stack)?;
                acc = acc.compose(&if inv { h.inverse() } else { h });
            }
            stack.pop();
            Ok(acc)
        }
    }
    .map_err(|e| anyhow!("{field}: {e}"))?;
    done.insert(name.to_string(), g);
    Ok(g)
}

fn rotation(axis: Vec3, angle: f64) -> Mat3 {
    let [x, y, z] = axis.0;
    let k = Mat3::from_row_major([0.0, -z, y, z, 0.0, -x, -y, x, 0.0]);
    let (s, c) = angle.sin_cos();
    Mat3::IDENTITY + k.scale(s) + (k * k).scale(1.0 - c)
}

impl Loaded {
    pub fn seed(&self) -> Result<u64> {
        self.scene
            .seed
            .ok_or_else(|| anyhow!("seed: required for commands that sample"))
    }

    /// `explicit`, or the only entry of `map`.
    pub fn pick<'a, T>(&self, map: &'a BTreeMap<String, T>, what: &str, explicit: Option<&str>) -> Result<(String, &'a T)> {
        match explicit {
            Some(n) => map
                .get_key_value(n)
                .map(|(k, v)| (k.clone(), v))
                .ok_or_else(|| anyhow!("unknown {what} `{n}`")),
            None if map.len() == 1 => {
                let (k, v) = map.iter().next().expect("one entry");
                Ok((k.clone(), v))
            }
            None => bail!("scene has {} {what} entries; name one with --{what}", map.len()),
        }
    }

    pub fn cloud(&self, name: &str) -> Result<SampledSet> {
        let spec = self
            .scene
            .clouds
            .get(name)
            .ok_or_else(|| anyhow!("unknown cloud `{name}`"))?;
        let s = &self.scene.sampling;
        let field = format!("clouds.{name}");
        let set = match spec {
            CloudSpec::Uniform { count } => uniform_sample(count.unwrap_or(s.count), self.seed()?),
            CloudSpec::Bouquet { flag, points_per_circle } => {
                bouquet(&self.flags[flag], points_per_circle.unwrap_or(s.points_per_circle))
                    .map_err(|e| anyhow!("{field}: {e}"))?
            }
            CloudSpec::Tube { tube, count } => tube_sample(&self.tubes[tube], count.unwrap_or(s.count), self.seed()?),
            CloudSpec::TubeComplement { tube, count, margin } => tube_complement_sample(
                &self.tubes[tube],
                count.unwrap_or(s.count),
                margin.unwrap_or(s.margin),
                self.seed()?,
            )
            .map_err(|e| anyhow!("{field}: {e}"))?,
            CloudSpec::BouquetComplement { flag, count, margin } => bouquet_complement_sample(
                &self.flags[flag],
                count.unwrap_or(s.count),
                margin.unwrap_or(s.margin),
                self.seed()?,
            )
            .map_err(|e| anyhow!("{field}: {e}"))?,
            CloudSpec::Csv { path } => {
                let full = self.dir.join(path);
                let file = fs::File::open(&full).with_context(|| format!("{field}: opening {}", full.display()))?;
                let points = flags_from_csv(file).with_context(|| format!("{field}: {}", full.display()))?;
                SampledSet::new(points, None)
            }
        };
        Ok(set)
    }
}
