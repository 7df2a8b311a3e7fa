//! Seeded Monte Carlo estimators for conic functionals of Weyl random
//! cones and their duals, compared against the closed forms.
//!
//! Trials are cut into fixed chunks, each with its own stream, and chunk
//! results are combined in index order. Reports therefore do not depend on
//! how many threads ran them.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    acceptance_probability, expected_angle_sum, expected_dual_face_count, expected_face_count,
    expected_intrinsic_volume, expected_quermass, expected_size_functional_at, Family,
};
use crate::cone::{
    dual_of_generators, face_census, generator_face_census, implicit_equalities, is_zero_cone,
    lineality_dim, orthonormal_kernel, ConeFace, ConeH, FaceProjector, GeneratorCone,
};
use crate::error::{Error, Result};
use crate::linalg::{to_f64, Rational, RationalMatrix, RayTester};
use crate::rng::{purpose, PointDistribution, RngSpec, Stream};
use crate::tessellation::{
    check_gp_lattice, cone_of, enumerate_cones, Budget, PointConfig, SignedOrdering, QUANT_BITS,
};

const CHUNK: u64 = 4096;
const CONFIG_ATTEMPTS: u64 = 5;

/// A Monte Carlo mean with its standard error and, when a closed form is
/// known, the z-score against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    #[serde(with = "opt_rational")]
    pub target: Option<Rational>,
    pub z_score: Option<f64>,
}

mod opt_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&q.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|t| crate::linalg::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl Estimate {
    /// From `hits` successes in `trials` Bernoulli draws, each scored `scale`.
    pub fn from_bernoulli(hits: u64, trials: u64, scale: f64) -> Self {
        assert!(trials > 0);
        let p = hits as f64 / trials as f64;
        let var = if trials > 1 {
            p * (1.0 - p) * trials as f64 / (trials - 1) as f64
        } else {
            0.0
        };
        Self {
            mean: scale * p,
            stderr: scale * (var / trials as f64).sqrt(),
            trials,
            target: None,
            z_score: None,
        }
    }

    /// Sample mean and standard error of `values`, accumulated in order.
    pub fn from_values(values: &[f64]) -> Self {
        assert!(!values.is_empty());
        let t = values.len() as f64;
        let mean = kahan(values.iter().copied()) / t;
        let ss = kahan(values.iter().map(|x| (x - mean) * (x - mean)));
        let var = if values.len() > 1 { ss / (t - 1.0) } else { 0.0 };
        Self {
            mean,
            stderr: (var / t).sqrt(),
            trials: values.len() as u64,
            target: None,
            z_score: None,
        }
    }

    pub fn with_target(mut self, target: Rational) -> Self {
        let t = to_f64(&target);
        self.z_score = (self.stderr > 0.0).then(|| (self.mean - t) / self.stderr);
        self.target = Some(target);
        self
    }

    /// Within `z` standard errors of the target. With zero spread the
    /// mean must hit the target up to rounding.
    pub fn agrees(&self, z: f64) -> bool {
        match (&self.target, self.z_score) {
            (_, Some(s)) => s.abs() <= z,
            (Some(t), None) => (self.mean - to_f64(t)).abs() < 1e-12,
            (None, None) => false,
        }
    }
}

/// Compensated sum, taken in iteration order.
pub fn kahan(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Runs `f(chunk_index, trials_in_chunk)` over fixed-size chunks of
/// `trials` and returns the results in chunk order.
fn chunked<T: Send>(trials: u64, f: impl Fn(u64, u64) -> T + Sync) -> Vec<T> {
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c, CHUNK.min(trials - c * CHUNK)))
        .collect()
}

/// I.i.d. points from `dist`, frozen to the dyadic grid. Redraws if the
/// frozen configuration is not in general position.
pub fn sample_config(dist: PointDistribution, family: Family, n: usize, d: usize, rng: RngSpec) -> Result<PointConfig> {
    for attempt in 0..CONFIG_ATTEMPTS {
        let mut s = if attempt == 0 {
            rng.stream()
        } else {
            rng.child(attempt, purpose::RESAMPLE).stream()
        };
        let pts: Vec<Vec<f64>> = (0..n).map(|_| dist.draw(&mut s, d)).collect();
        let cfg = PointConfig::from_f64(family, d, &pts)?;
        if check_gp_lattice(&cfg) {
            return Ok(cfg);
        }
    }
    Err(Error::Exhausted {
        attempts: CONFIG_ATTEMPTS,
        reason: "sampled configurations were not in general position".into(),
    })
}

/// A uniformly chosen cone of the tessellation.
pub fn sample_weyl_cone(cfg: &PointConfig, rng: RngSpec, budget: &Budget) -> Result<(SignedOrdering, ConeH)> {
    let cones = enumerate_cones(cfg, budget)?;
    let pick = rng.stream().below(cones.len() as u64) as usize;
    let ord = cones[pick].clone();
    let cone = cone_of(cfg, &ord);
    Ok((ord, cone))
}

/// A cone as primitive integer rows, with an `i128` copy when it fits.
struct IntCone {
    dim: usize,
    eq: Vec<Vec<BigInt>>,
    ineq: Vec<Vec<BigInt>>,
    small: Option<(Vec<Vec<i128>>, Vec<Vec<i128>>)>,
}

fn to_small(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    let limit = 1i128 << 62;
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i128().filter(|v| v.abs() < limit)).collect())
        .collect()
}

fn refs<T>(rows: &[Vec<T>]) -> Vec<&[T]> {
    rows.iter().map(|r| r.as_slice()).collect()
}

impl IntCone {
    fn new(c: &ConeH) -> Self {
        let eq = c.eq_rows().integer_rows();
        let ineq = c.ineq_rows().integer_rows();
        let small = to_small(&eq).zip(to_small(&ineq));
        Self {
            dim: c.ambient_dim(),
            eq,
            ineq,
            small,
        }
    }

    /// `C ∩ ker(W) != {0}`.
    fn meets_kernel(&self, w: &[Vec<i128>]) -> bool {
        if let Some((e, s)) = &self.small {
            let mut rows = refs(e);
            rows.extend(w.iter().map(|r| r.as_slice()));
            if let Some(ans) = RayTester::new(&rows, self.dim).and_then(|t| t.nontrivial(&refs(s))) {
                return ans;
            }
        }
        let wb: Vec<Vec<BigInt>> = w.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut rows = refs(&self.eq);
        rows.extend(wb.iter().map(|r| r.as_slice()));
        RayTester::new(&rows, self.dim)
            .and_then(|t| t.nontrivial(&refs(&self.ineq)))
            .expect("big integers do not overflow")
    }
}

/// A `rows x d` Gaussian matrix on the dyadic grid, as integers, redrawn
/// until it has full row rank.
fn gaussian_int_rows(s: &mut Stream, rows: usize, d: usize) -> Vec<Vec<i128>> {
    let scale = (1u64 << QUANT_BITS) as f64;
    loop {
        let w: Vec<Vec<i128>> = (0..rows)
            .map(|_| (0..d).map(|_| (s.gaussian() * scale).round() as i128).collect())
            .collect();
        if crate::linalg::rank_int(&refs(&w), d) == Some(rows) {
            return w;
        }
    }
}

fn hits_of(v: Vec<(u64, u64)>) -> (u64, u64) {
    v.into_iter().fold((0, 0), |(a, b), (x, y)| (a + x, b + y))
}

/// Half the frequency with which a uniform subspace of codimension `j`
/// meets `C` outside the origin. The subspace is the kernel of a frozen
/// `j x d` Gaussian matrix, which is uniform on the Grassmannian.
pub fn estimate_quermass(c: &ConeH, j: usize, trials: u64, rng: RngSpec) -> Result<Estimate> {
    let d = c.ambient_dim();
    if j > d {
        return Err(Error::OutOfRange(format!("need j <= d = {d}, got {j}")));
    }
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    if lineality_dim(c) == crate::cone::cone_dim(c) {
        return Err(Error::Invalid("quermass integrals are not defined for linear subspaces".into()));
    }
    if j == 0 || j == d {
        // the subspace is all of R^d or the origin, so every trial agrees
        let hits = if j == 0 { trials } else { 0 };
        return Ok(Estimate::from_bernoulli(hits, trials, 0.5));
    }
    let ic = IntCone::new(c);
    let (hits, total) = hits_of(chunked(trials, |ci, count| {
        let mut s = rng.child(ci, purpose::SUBSPACE).stream();
        let hits = (0..count)
            .filter(|_| ic.meets_kernel(&gaussian_int_rows(&mut s, j, d)))
            .count() as u64;
        (hits, count)
    }));
    Ok(Estimate::from_bernoulli(hits, total, 0.5))
}

/// Same target as [`estimate_quermass`], with the subspace drawn as the
/// span of `d - j` Gaussian columns and tested by the general rational
/// routine. Slower; kept as a cross-check of the kernel form.
pub fn estimate_quermass_by_span(c: &ConeH, j: usize, trials: u64, rng: RngSpec) -> Result<Estimate> {
    let d = c.ambient_dim();
    if j > d || trials == 0 {
        return Err(Error::OutOfRange(format!("need j <= d and trials > 0, got j = {j}")));
    }
    let mut s = rng.stream();
    let mut hits = 0;
    for _ in 0..trials {
        let hit = if j == d {
            false
        } else {
            let w = gaussian_int_rows(&mut s, d - j, d);
            let cols: Vec<Vec<Rational>> = w
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect();
            crate::cone::meets_subspace_nontrivially(c, &RationalMatrix::from_columns(d, cols)?)?
        };
        hits += hit as u64;
    }
    Ok(Estimate::from_bernoulli(hits, trials, 0.5))
}

/// Frequencies of the dimension of the face hit by the projection of a
/// standard Gaussian vector, for `j = 0..=d`. Draws that land on a
/// numerical tie are redrawn; the second value is how many were.
pub fn estimate_intrinsic_volumes(c: &ConeH, faces: &[ConeFace], trials: u64, rng: RngSpec) -> Result<(Vec<Estimate>, u64)> {
    let d = c.ambient_dim();
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    let proj = FaceProjector::new(c, faces)?;
    let parts = chunked(trials, |ci, count| -> Result<(Vec<u64>, u64)> {
        let mut s = rng.child(ci, purpose::GAUSSIAN).stream();
        let mut hist = vec![0u64; d + 1];
        let mut ties = 0;
        for _ in 0..count {
            loop {
                match proj.project(&s.gaussian_vec(d)) {
                    Ok((_, k)) => {
                        hist[k] += 1;
                        break;
                    }
                    Err(Error::ProjectionTie) => ties += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((hist, ties))
    });
    let mut hist = vec![0u64; d + 1];
    let mut ties = 0;
    for p in parts {
        let (h, t) = p?;
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
        ties += t;
    }
    Ok((hist.into_iter().map(|h| Estimate::from_bernoulli(h, trials, 1.0)).collect(), ties))
}

/// Frequency with which a uniform direction in the linear hull of `F`
/// lies in `F`.
pub fn estimate_solid_angle(f: &ConeH, trials: u64, rng: RngSpec) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    if is_zero_cone(f) {
        return Err(Error::Invalid("the solid angle of {0} is undefined".into()));
    }
    let implicit = implicit_equalities(f);
    let hull_eq = f.eq_rows().vstack(&f.ineq_rows().select_rows(&implicit));
    let basis = orthonormal_kernel(&hull_eq);
    let k = basis.ncols();
    let rows: Vec<Vec<f64>> = (0..f.ineq_rows().nrows())
        .filter(|i| !implicit.contains(i))
        .map(|i| f.ineq_rows().row(i).iter().map(to_f64).collect())
        .collect();
    let (hits, total) = hits_of(chunked(trials, |ci, count| {
        let mut s = rng.child(ci, purpose::ANGLE).stream();
        let mut hits = 0;
        for _ in 0..count {
            let g = nalgebra::DVector::from_vec(s.gaussian_vec(k));
            let x = &basis * g;
            if rows.iter().all(|r| r.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() <= 0.0) {
                hits += 1;
            }
        }
        (hits, count)
    }));
    Ok(Estimate::from_bernoulli(hits, total, 1.0))
}

/// The `k`-faces of `c`, as cones.
pub fn faces_of_dim(c: &ConeH, k: usize) -> Result<Vec<ConeH>> {
    Ok(face_census(c)?
        .into_iter()
        .filter(|f| f.dim == k)
        .map(|f| c.face(&f.tight))
        .collect())
}

fn sum_estimates(parts: &[Estimate]) -> Estimate {
    Estimate {
        mean: kahan(parts.iter().map(|e| e.mean)),
        stderr: kahan(parts.iter().map(|e| e.stderr * e.stderr)).sqrt(),
        trials: parts.iter().map(|e| e.trials).sum(),
        target: None,
        z_score: None,
    }
}

/// Sum of the codimension-`j` quermass integrals over the `k`-faces of
/// `c`, with `trials` split evenly between the faces.
pub fn estimate_size_functional(c: &ConeH, k: usize, j: usize, trials: u64, rng: RngSpec) -> Result<Estimate> {
    if j >= k || k > c.ambient_dim() {
        return Err(Error::OutOfRange(format!("need 0 <= j < k <= d, got k = {k}, j = {j}")));
    }
    let faces = faces_of_dim(c, k)?;
    if faces.is_empty() {
        return Ok(Estimate::from_values(&[0.0]));
    }
    let per = (trials / faces.len() as u64).max(1);
    let parts = faces
        .iter()
        .enumerate()
        .map(|(i, f)| estimate_quermass(f, j, per, rng.child(i as u64, purpose::SUBSPACE)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_estimates(&parts))
}

/// Sum of the solid angles of the `k`-faces of `c`.
pub fn estimate_angle_sum(c: &ConeH, k: usize, trials: u64, rng: RngSpec) -> Result<Estimate> {
    if k == 0 || k > c.ambient_dim() {
        return Err(Error::OutOfRange(format!("need 1 <= k <= d, got {k}")));
    }
    let faces = faces_of_dim(c, k)?;
    if faces.is_empty() {
        return Ok(Estimate::from_values(&[0.0]));
    }
    let per = (trials / faces.len() as u64).max(1);
    let parts = faces
        .iter()
        .enumerate()
        .map(|(i, f)| estimate_solid_angle(f, per, rng.child(i as u64, purpose::ANGLE)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_estimates(&parts))
}

/// `Y_i - Y_{i+1}` for `i < n`, plus `Y_n` for type B.
pub fn dual_generators(cfg: &PointConfig) -> GeneratorCone {
    let pts = cfg.points();
    let n = pts.len();
    let mut gens: Vec<Vec<Rational>> = (0..n - 1)
        .map(|i| pts[i].iter().zip(&pts[i + 1]).map(|(a, b)| a - b).collect())
        .collect();
    if cfg.family() == Family::B {
        gens.push(pts[n - 1].clone());
    }
    GeneratorCone::from_vectors(cfg.d(), gens).expect("generators have length d")
}

/// An accepted draw of the dual random cone.
#[derive(Clone, Debug)]
pub struct DualSample {
    pub config: PointConfig,
    pub generators: GeneratorCone,
    /// The dual of the generated cone: the Weyl cone of the identity ordering.
    pub polar: ConeH,
    pub attempts: u64,
}

/// One draw of the configuration and its polar test: `Some` when the
/// generated cone is not all of `R^d`.
fn dual_attempt(family: Family, dist: PointDistribution, n: usize, d: usize, rng: RngSpec) -> Result<Option<(PointConfig, GeneratorCone, ConeH)>> {
    let cfg = sample_config(dist, family, n, d, rng)?;
    let g = dual_generators(&cfg);
    let polar = dual_of_generators(&g);
    Ok((!is_zero_cone(&polar)).then_some((cfg, g, polar)))
}

/// Rejection sampler for the cone generated by consecutive differences,
/// conditioned on not being the whole space.
pub fn sample_dual_cone(family: Family, dist: PointDistribution, n: usize, d: usize, rng: RngSpec, max_attempts: u64) -> Result<DualSample> {
    if family == Family::Generic {
        return Err(Error::UnsupportedFamily {
            family,
            operation: "sample_dual_cone",
        });
    }
    for a in 0..max_attempts {
        if let Some((config, generators, polar)) = dual_attempt(family, dist, n, d, rng.child(a, purpose::DUAL))? {
            return Ok(DualSample {
                config,
                generators,
                polar,
                attempts: a + 1,
            });
        }
    }
    Err(Error::Exhausted {
        attempts: max_attempts,
        reason: format!(
            "no draw generated a proper cone; the acceptance probability for ({family}, n = {n}, d = {d}) is {}",
            acceptance_probability(family, n, d).map(|p| p.to_string()).unwrap_or_default()
        ),
    })
}

/// Empirical acceptance rate of [`sample_dual_cone`] over `attempts`
/// independent draws.
pub fn estimate_acceptance(family: Family, dist: PointDistribution, n: usize, d: usize, attempts: u64, rng: RngSpec) -> Result<Estimate> {
    let flags = (0..attempts)
        .into_par_iter()
        .map(|a| dual_attempt(family, dist, n, d, rng.child(a, purpose::DUAL)).map(|o| o.is_some() as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_bernoulli(flags.iter().sum(), attempts, 1.0))
}

/// Face numbers `f_0..f_d` of a generated cone and of its polar. Duality
/// says the second is the first reversed.
pub fn dual_face_vectors(s: &DualSample) -> Result<(Vec<usize>, Vec<usize>)> {
    let d = s.generators.ambient_dim();
    let mut primal = vec![0; d + 1];
    for (_, k) in generator_face_census(&s.generators)? {
        primal[k] += 1;
    }
    let mut polar = vec![0; d + 1];
    for f in face_census(&s.polar)? {
        polar[f.dim] += 1;
    }
    Ok((primal, polar))
}

/// What an experiment measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "fk")]
    FaceCount,
    #[serde(rename = "Ykj")]
    SizeFunctional,
    #[serde(rename = "Uj")]
    Quermass,
    #[serde(rename = "vj")]
    IntrinsicVolume,
    #[serde(rename = "lambda")]
    AngleSum,
    #[serde(rename = "dual_fk")]
    DualFaceCount,
    #[serde(rename = "acceptance")]
    Acceptance,
}

impl std::str::FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Invalid(format!("unknown quantity {s:?}")))
    }
}

/// Experiment description. `trials` counts random cones (or dual draws);
/// `inner` is the number of draws spent on each cone's functional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub quantity: Quantity,
    pub family: Family,
    pub n: usize,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default = "default_dist")]
    pub dist: PointDistribution,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_dist() -> PointDistribution {
    PointDistribution::Gaussian
}

pub const DEFAULT_INNER: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub crate_version: String,
    pub git: String,
}

impl Provenance {
    pub fn current() -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").into(),
            git: option_env!("WEYL_CONES_GIT_HASH").unwrap_or("unknown").into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub spec: ExperimentSpec,
    pub estimate: Estimate,
    /// Decimal value of the target at 12 significant digits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_decimal: Option<String>,
    pub passed: bool,
    /// Projection ties redrawn, for `vj`.
    #[serde(default)]
    pub ties: u64,
    /// Accepted dual samples whose face numbers broke duality, for `dual_fk`.
    #[serde(default)]
    pub duality_violations: u64,
    pub provenance: Provenance,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Agreement threshold for reports.
pub const Z_THRESHOLD: f64 = 4.0;

fn need(v: Option<usize>, name: &str) -> Result<usize> {
    v.ok_or_else(|| Error::Invalid(format!("quantity needs {name}")))
}

/// Formats a rational with 12 significant digits.
pub fn decimal(q: &Rational) -> String {
    let x = to_f64(q);
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.11e}", x);
    let v: f64 = s.parse().expect("formatted float parses");
    format!("{v}")
}

fn draw_cone(spec: &ExperimentSpec, t: u64, root: RngSpec, budget: &Budget) -> Result<ConeH> {
    let cfg = sample_config(spec.dist, spec.family, spec.n, spec.d, root.child(t, purpose::CONFIG))?;
    Ok(sample_weyl_cone(&cfg, root.child(t, purpose::CONE), budget)?.1)
}

/// Runs an experiment to a deterministic report.
pub fn run_experiment(spec: &ExperimentSpec, budget: &Budget) -> Result<Report> {
    if spec.family == Family::Generic {
        return Err(Error::UnsupportedFamily {
            family: spec.family,
            operation: "run_experiment",
        });
    }
    if spec.trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    let (family, n, d) = (spec.family, spec.n, spec.d);
    let root = RngSpec::new(spec.seed, 0);
    let inner = spec.inner.unwrap_or(DEFAULT_INNER).max(1);
    let mut ties = 0;
    let mut duality_violations = 0;
    let per_cone = |f: &(dyn Fn(&ConeH, RngSpec) -> Result<f64> + Sync)| -> Result<Estimate> {
        let values = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let draw = draw_cone(spec, t, root, budget)?;
                f(&draw, root.child(t, purpose::SUBSPACE))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Estimate::from_values(&values))
    };
    let (estimate, target) = match spec.quantity {
        Quantity::FaceCount => {
            let k = need(spec.k, "k")?;
            let target = expected_face_count(family, n, d, k)?;
            let e = per_cone(&|c, _| Ok(faces_of_dim(c, k)?.len() as f64))?;
            (e, target)
        }
        Quantity::Quermass => {
            let j = need(spec.j, "j")?;
            let target = expected_quermass(family, n, d, j)?;
            (per_cone(&|c, r| Ok(estimate_quermass(c, j, inner, r)?.mean))?, target)
        }
        Quantity::SizeFunctional => {
            let (k, j) = (need(spec.k, "k")?, need(spec.j, "j")?);
            let target = expected_size_functional_at(family, n, d, k, j)?;
            (per_cone(&|c, r| Ok(estimate_size_functional(c, k, j, inner, r)?.mean))?, target)
        }
        Quantity::AngleSum => {
            let k = need(spec.k, "k")?;
            let target = expected_angle_sum(family, n, d, k)?;
            (per_cone(&|c, r| Ok(estimate_angle_sum(c, k, inner, r)?.mean))?, target)
        }
        Quantity::IntrinsicVolume => {
            let j = need(spec.j, "j")?;
            if j > d {
                return Err(Error::OutOfRange(format!("need j <= d, got {j}")));
            }
            let target = expected_intrinsic_volume(family, n, d, j)?;
            let results = (0..spec.trials)
                .into_par_iter()
                .map(|t| {
                    let draw = draw_cone(spec, t, root, budget)?;
                    let faces = face_census(&draw)?;
                    let (v, ties) = estimate_intrinsic_volumes(&draw, &faces, inner, root.child(t, purpose::GAUSSIAN))?;
                    Ok((v[j].mean, ties))
                })
                .collect::<Result<Vec<(f64, u64)>>>()?;
            ties = results.iter().map(|r| r.1).sum();
            let values: Vec<f64> = results.iter().map(|r| r.0).collect();
            (Estimate::from_values(&values), target)
        }
        Quantity::DualFaceCount => {
            let k = need(spec.k, "k")?;
            if k > d {
                return Err(Error::OutOfRange(format!("need k <= d, got {k}")));
            }
            let target = expected_dual_face_count(family, n, d, k)?;
            let results = (0..spec.trials)
                .into_par_iter()
                .map(|t| {
                    let s = sample_dual_cone(family, spec.dist, n, d, root.child(t, purpose::DUAL), 100_000)?;
                    let (primal, polar) = dual_face_vectors(&s)?;
                    let ok = (0..=d).all(|i| primal[i] == polar[d - i]);
                    Ok((primal[k] as f64, !ok as u64))
                })
                .collect::<Result<Vec<(f64, u64)>>>()?;
            duality_violations = results.iter().map(|r| r.1).sum();
            let values: Vec<f64> = results.iter().map(|r| r.0).collect();
            (Estimate::from_values(&values), target)
        }
        Quantity::Acceptance => {
            let target = acceptance_probability(family, n, d)?;
            (estimate_acceptance(family, spec.dist, n, d, spec.trials, root)?, target)
        }
    };
    let estimate = estimate.with_target(target.clone());
    let passed = estimate.agrees(Z_THRESHOLD) && duality_violations == 0;
    Ok(Report {
        schema: 1,
        spec: spec.clone(),
        target_decimal: Some(decimal(&target)),
        estimate,
        passed,
        ties,
        duality_violations,
        provenance: Provenance::current(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn quadrant() -> ConeH {
        ConeH::from_ineq(RationalMatrix::from_i64_rows(2, &[&[-1, 0], &[0, -1]]).unwrap())
    }

    fn rng(seed: u64) -> RngSpec {
        RngSpec::new(seed, 0)
    }

    #[test]
    fn estimate_statistics() {
        let e = Estimate::from_bernoulli(1, 4, 1.0);
        assert_eq!(e.mean, 0.25);
        assert!((e.stderr - (0.25f64 / 4.0).sqrt()).abs() < 1e-15);
        let v = Estimate::from_values(&[1.0, 2.0, 3.0]).with_target(rat(2));
        assert_eq!(v.mean, 2.0);
        assert!((v.stderr - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(v.z_score, Some(0.0));
        let flat = Estimate::from_bernoulli(5, 5, 0.5).with_target(ratio(1, 2));
        assert_eq!(flat.z_score, None);
        assert!(flat.agrees(4.0));
        assert_eq!(decimal(&ratio(1, 3)), "0.333333333333");
    }

    #[test]
    fn config_sampling() {
        let a = sample_config(PointDistribution::Gaussian, Family::A, 4, 2, rng(1)).unwrap();
        assert!(check_gp_lattice(&a));
        assert_eq!(a, sample_config(PointDistribution::Gaussian, Family::A, 4, 2, rng(1)).unwrap());
        let b = sample_config(PointDistribution::Sphere, Family::B, 3, 2, rng(1)).unwrap();
        for p in b.points() {
            let r: f64 = p.iter().map(|x| to_f64(x).powi(2)).sum();
            assert!((r - 1.0).abs() < 1e-6);
        }
    }

    fn chi_square_uniform(counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let e = total as f64 / counts.len() as f64;
        counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
    }

    #[test]
    fn weyl_cone_draws_are_uniform() {
        let budget = Budget::default();
        for (family, n, cells, crit) in [(Family::A, 3, 6, 20.5), (Family::B, 2, 8, 24.3)] {
            let cfg = sample_config(PointDistribution::Gaussian, family, n, 2, rng(3)).unwrap();
            let cones = enumerate_cones(&cfg, &budget).unwrap();
            assert_eq!(cones.len(), cells);
            let mut counts = vec![0u64; cells];
            for t in 0..6000 {
                let (ord, _) = sample_weyl_cone(&cfg, rng(4).child(t, purpose::CONE), &budget).unwrap();
                counts[cones.iter().position(|c| *c == ord).unwrap()] += 1;
            }
            // 0.999 quantiles of chi-square with 5 and 7 degrees of freedom
            assert!(chi_square_uniform(&counts) < crit, "{counts:?}");
        }
        let cfg = sample_config(PointDistribution::Gaussian, Family::A, 3, 2, rng(3)).unwrap();
        let once = sample_weyl_cone(&cfg, rng(9), &budget).unwrap().0;
        assert_eq!(once, sample_weyl_cone(&cfg, rng(9), &budget).unwrap().0);
    }

    #[test]
    fn quermass_of_quadrant() {
        let q = quadrant();
        let e = estimate_quermass(&q, 1, 100_000, rng(5)).unwrap().with_target(ratio(1, 4));
        assert!(e.agrees(4.0), "{e:?}");
        assert_eq!(estimate_quermass(&q, 0, 1000, rng(5)).unwrap().mean, 0.5);
        assert_eq!(estimate_quermass(&q, 2, 1000, rng(5)).unwrap().mean, 0.0);
        let line = ConeH::new(2, RationalMatrix::from_i64_rows(2, &[&[0, 1]]).unwrap(), RationalMatrix::zeros(0, 2)).unwrap();
        assert!(estimate_quermass(&line, 1, 10, rng(5)).is_err());
    }

    #[test]
    fn kernel_and_span_forms_agree() {
        let c = ConeH::from_ineq(RationalMatrix::from_i64_rows(3, &[&[-1, 0, 0], &[0, -1, 0], &[1, 1, -3]]).unwrap());
        for j in 1..3 {
            let a = estimate_quermass(&c, j, 20_000, rng(6)).unwrap();
            let b = estimate_quermass_by_span(&c, j, 4_000, rng(7)).unwrap();
            let z = (a.mean - b.mean) / (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!(z.abs() < 4.0, "j = {j}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn intrinsic_volumes_of_simple_cones() {
        let q = quadrant();
        let faces = face_census(&q).unwrap();
        let (v, _) = estimate_intrinsic_volumes(&q, &faces, 100_000, rng(8)).unwrap();
        let total: u64 = v.iter().map(|e| (e.mean * e.trials as f64).round() as u64).sum();
        assert_eq!(total, 100_000);
        for (e, t) in v.into_iter().zip([ratio(1, 4), ratio(1, 2), ratio(1, 4)]) {
            let e = e.with_target(t);
            assert!(e.agrees(4.0), "{e:?}");
        }
        let ray = ConeH::new(2, RationalMatrix::from_i64_rows(2, &[&[0, 1]]).unwrap(), RationalMatrix::from_i64_rows(2, &[&[-1, 0]]).unwrap()).unwrap();
        let (v, _) = estimate_intrinsic_volumes(&ray, &face_census(&ray).unwrap(), 20_000, rng(8)).unwrap();
        assert!(v[0].clone().with_target(ratio(1, 2)).agrees(4.0));
        assert!(v[1].clone().with_target(ratio(1, 2)).agrees(4.0));
        assert_eq!(v[2].mean, 0.0);
    }

    #[test]
    fn solid_angles() {
        let q = quadrant();
        assert!(estimate_solid_angle(&q, 100_000, rng(10)).unwrap().with_target(ratio(1, 4)).agrees(4.0));
        let half = ConeH::from_ineq(RationalMatrix::from_i64_rows(2, &[&[0, -1]]).unwrap());
        assert!(estimate_solid_angle(&half, 20_000, rng(10)).unwrap().with_target(ratio(1, 2)).agrees(4.0));
        let ray = ConeH::new(2, RationalMatrix::from_i64_rows(2, &[&[0, 1]]).unwrap(), RationalMatrix::from_i64_rows(2, &[&[-1, 0]]).unwrap()).unwrap();
        assert!(estimate_solid_angle(&ray, 20_000, rng(10)).unwrap().with_target(ratio(1, 2)).agrees(4.0));
    }

    #[test]
    fn size_functional_of_the_cone_itself_is_its_quermass() {
        let q = quadrant();
        let a = estimate_size_functional(&q, 2, 1, 10_000, rng(11)).unwrap();
        let b = estimate_quermass(&q, 1, 10_000, rng(11).child(0, purpose::SUBSPACE)).unwrap();
        assert_eq!(a.mean, b.mean);
        let angles = estimate_angle_sum(&q, 1, 1000, rng(11)).unwrap();
        assert!(angles.with_target(rat(1)).agrees(4.0));
    }

    #[test]
    fn quermass_duality_on_a_pointed_cone() {
        let c = ConeH::from_ineq(RationalMatrix::from_i64_rows(3, &[&[-1, 0, 0], &[0, -1, 0], &[1, 1, -3]]).unwrap());
        let rays = crate::cone::extreme_rays(&c);
        let gens: Vec<Vec<Rational>> = rays.rays.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
        let polar = dual_of_generators(&GeneratorCone::from_vectors(3, gens).unwrap());
        for j in 0..=3 {
            let a = estimate_quermass(&c, j, 20_000, rng(12)).unwrap();
            let b = estimate_quermass(&polar, 3 - j, 20_000, rng(13)).unwrap();
            let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            let gap = a.mean + b.mean - 0.5;
            assert!(gap.abs() <= 4.0 * se + 1e-12, "j = {j}: {a:?} {b:?}");
        }
    }

    #[test]
    fn dual_sampler() {
        let s = sample_dual_cone(Family::A, PointDistribution::Gaussian, 3, 2, rng(14), 10).unwrap();
        assert_eq!(s.attempts, 1);
        let (p, q) = dual_face_vectors(&s).unwrap();
        assert_eq!(p, q.iter().rev().copied().collect::<Vec<_>>());
        let e = estimate_acceptance(Family::A, PointDistribution::Gaussian, 3, 2, 200, rng(15)).unwrap();
        assert_eq!(e.mean, 1.0);
        let e = estimate_acceptance(Family::A, PointDistribution::Gaussian, 4, 2, 2000, rng(16)).unwrap().with_target(ratio(1, 2));
        assert!(e.agrees(4.0), "{e:?}");
        let exhausted = sample_dual_cone(Family::A, PointDistribution::Gaussian, 8, 2, rng(17), 3);
        assert!(matches!(exhausted, Err(Error::Exhausted { .. })));
    }

    #[test]
    fn experiments_are_deterministic() {
        let spec: ExperimentSpec = serde_json::from_str(
            r#"{"quantity":"vj","family":"B","n":3,"d":2,"j":1,"dist":"gaussian","trials":40,"inner":500,"seed":3}"#,
        )
        .unwrap();
        let budget = Budget::default();
        let a = run_experiment(&spec, &budget).unwrap().to_json();
        let b = run_experiment(&spec, &budget).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
        let fk = ExperimentSpec {
            quantity: Quantity::FaceCount,
            family: Family::A,
            n: 5,
            d: 3,
            k: Some(2),
            j: None,
            dist: PointDistribution::Gaussian,
            trials: 300,
            inner: None,
            seed: 1,
        };
        let r = run_experiment(&fk, &budget).unwrap();
        assert!(r.passed, "{}", r.to_json());
    }
}
