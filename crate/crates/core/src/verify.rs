//! Exhaustive and sampled checks of the orbit data against independent
//! computations, producing serializable reports.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equations::{component_generators, generators, GeneratorSet};
use crate::error::{Error, Result};
use crate::fields::{Field, Scalar};
use crate::forms::{BilinearForm, SpaceConfig};
use crate::linalg::Matrix;
use crate::orbits::{
    classify, closure_leq, codimension, dimension, random_orbit_point, representative,
    tangent_dimension, valid_params, OrbitParams,
};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub e: usize,
    pub f: usize,
    pub kind: String,
    pub field: String,
    pub gram: String,
}

impl ConfigSummary {
    pub fn of(config: &SpaceConfig) -> Self {
        let field = config.field();
        let f = config.f;
        let gram = if BilinearForm::split(config.kind(), field, f).ok().as_ref() == Some(&config.form) {
            "split"
        } else if BilinearForm::identity(field, f).ok().as_ref() == Some(&config.form) {
            "identity"
        } else {
            "custom"
        };
        ConfigSummary {
            e: config.e,
            f,
            kind: config.kind().to_string(),
            field: field.to_string(),
            gram: gram.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Matrix { matrix: Matrix, detail: String },
    Params { params: Vec<OrbitParams>, detail: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Matrix { matrix, detail } => {
                let rows: Vec<String> = matrix
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                    .collect();
                write!(f, "{detail}; matrix [{}]", rows.join("; "))
            }
            Witness::Params { params, detail } => {
                let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
                write!(f, "{detail}; params {}", ps.join(" "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Warn { message: String },
    Fail { witness: Witness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub config: ConfigSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<OrbitParams>,
    pub mode: Mode,
    pub status: Status,
    pub tallies: BTreeMap<String, u128>,
    /// Not serialized, so reports are byte-reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    fn new(check: &str, config: &SpaceConfig, params: Option<OrbitParams>, mode: Mode) -> Self {
        VerificationReport {
            check: check.to_string(),
            config: ConfigSummary::of(config),
            params,
            mode,
            status: Status::Pass,
            tallies: BTreeMap::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Fail { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.status {
            Status::Fail { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    fn fail(&mut self, witness: Witness) {
        if !self.failed() {
            self.status = Status::Fail { witness };
        }
    }

    fn warn(&mut self, message: String) {
        if self.status == Status::Pass {
            self.status = Status::Warn { message };
        }
    }
}

/// Summary table, one row per report. Timings are optional so that the
/// table itself can be reproducible.
pub fn summary_table(reports: &[VerificationReport], with_times: bool) -> String {
    let mut out = format!("{:<10} {:<10} {:<12} {:<6}", "check", "params", "mode", "status");
    out.push_str(if with_times { "       time\n" } else { "\n" });
    for r in reports {
        let params = r.params.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        let mode = match r.mode {
            Mode::Exhaustive => "exhaustive".to_string(),
            Mode::Sampled { n, .. } => format!("sampled({n})"),
        };
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Warn { .. } => "WARN",
            Status::Fail { .. } => "FAIL",
        };
        out.push_str(&format!("{:<10} {:<10} {:<12} {:<6}", r.check, params, mode, status));
        if with_times {
            out.push_str(&format!(" {:>9.3}s", r.wall_time.as_secs_f64()));
        }
        out.push('\n');
    }
    out
}

/// Number of matrices in `F_q^{e x f}`, or `BudgetExceeded`.
pub fn enumeration_size(config: &SpaceConfig, budget: u128) -> Result<u128> {
    let q = config.field().order().ok_or(Error::InfiniteField)?;
    let n = config.ambient_dim() as u32;
    let total = q.checked_pow(n).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    Ok(total)
}

/// Folds `visit` over every `e x f` matrix, in row-major odometer order,
/// sharded over leading entries and merged in shard order.
pub fn sweep<A, I, V, M>(config: &SpaceConfig, budget: u128, init: I, visit: V, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &Matrix) + Sync,
    M: Fn(A, A) -> A,
{
    enumeration_size(config, budget)?;
    let field = config.field();
    let elements = field.elements()?;
    let q = elements.len();
    let n = config.ambient_dim();
    let mut prefix = 0;
    let mut shards = 1usize;
    while prefix < n && shards < 256 {
        prefix += 1;
        shards *= q;
    }
    let parts: Vec<A> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut acc = init();
            let mut digits = vec![0usize; n];
            let mut s = shard;
            for k in (0..prefix).rev() {
                digits[k] = s % q;
                s /= q;
            }
            let mut phi = Matrix::zeros(field, config.e, config.f);
            for (slot, &d) in phi.entries_mut().iter_mut().zip(&digits) {
                *slot = elements[d].clone();
            }
            loop {
                visit(&mut acc, &phi);
                // advance the suffix odometer, last entry fastest
                let mut k = n;
                loop {
                    if k == prefix {
                        return acc;
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] == q {
                        digits[k] = 0;
                        phi.entries_mut()[k] = elements[0].clone();
                    } else {
                        phi.entries_mut()[k] = elements[digits[k]].clone();
                        break;
                    }
                }
            }
        })
        .collect();
    Ok(parts.into_iter().reduce(merge).expect("at least one shard"))
}

fn merge_counts(mut a: BTreeMap<String, u128>, b: BTreeMap<String, u128>) -> BTreeMap<String, u128> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// First mismatch in enumeration order plus running tallies.
#[derive(Default)]
struct Scan {
    tallies: BTreeMap<String, u128>,
    witness: Option<Witness>,
}

impl Scan {
    fn bump(&mut self, key: &str) {
        *self.tallies.entry(key.to_string()).or_default() += 1;
    }

    fn flag(&mut self, phi: &Matrix, detail: impl FnOnce() -> String) {
        self.bump("mismatches");
        if self.witness.is_none() {
            self.witness = Some(Witness::Matrix {
                matrix: phi.clone(),
                detail: detail(),
            });
        }
    }

    fn merge(mut self, other: Scan) -> Scan {
        self.tallies = merge_counts(self.tallies, other.tallies);
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }
}

/// Classifies every matrix over the finite field and tallies the classes.
pub fn exhaustive_census(config: &SpaceConfig, budget: u128) -> Result<VerificationReport> {
    exhaustive_census_with(config, budget, &|phi: &Matrix| classify(phi, config))
}

pub fn exhaustive_census_with(
    config: &SpaceConfig,
    budget: u128,
    classifier: &(dyn Fn(&Matrix) -> Result<OrbitParams> + Sync),
) -> Result<VerificationReport> {
    let start = Instant::now();
    let total = enumeration_size(config, budget)?;
    let valid = valid_params(config);
    let scan = sweep(
        config,
        budget,
        Scan::default,
        |acc, phi| match classifier(phi) {
            Ok(p) if valid.contains(&p) => acc.bump(&p.to_string()),
            Ok(p) => acc.flag(phi, || format!("classified as {p}, which is not a valid class")),
            Err(err) => acc.flag(phi, || format!("classification failed: {err}")),
        },
        Scan::merge,
    )?;
    let mut report = VerificationReport::new("census", config, None, Mode::Exhaustive);
    let counted: u128 = scan
        .tallies
        .iter()
        .filter(|(k, _)| k.as_str() != "mismatches")
        .map(|(_, v)| v)
        .sum::<u128>()
        + scan.tallies.get("mismatches").copied().unwrap_or(0);
    report.tallies = scan.tallies;
    report.tallies.insert("total".into(), total);
    report.tallies.entry("mismatches".into()).or_insert(0);
    if let Some(w) = scan.witness {
        report.fail(w);
    } else if counted != total {
        report.fail(Witness::Params {
            params: vec![],
            detail: format!("visited {counted} matrices, expected {total}"),
        });
    }
    let classes = valid.iter().filter(|p| report.tallies.contains_key(&p.to_string())).count();
    report.tallies.insert("classes-hit".into(), classes as u128);
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Matrices whose rank is at most `r1` and whose `psi` has rank at most `r2`.
fn in_rank_locus(phi: &Matrix, config: &SpaceConfig, r1: usize, r2: usize) -> bool {
    phi.rank() <= r1 && config.form.isotropic_rank(phi).expect("shape checked") <= r2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleOptions {
    /// Points drawn from each orbit, plus as many uniform matrices.
    pub per_orbit: u64,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            per_orbit: 100,
            seed: 0,
        }
    }
}

/// Deterministic sample points: `per_orbit` from every orbit, then
/// `per_orbit` uniform matrices.
fn sample_points(config: &SpaceConfig, opts: SampleOptions) -> Result<Vec<Matrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for p in valid_params(config) {
        for _ in 0..opts.per_orbit {
            match random_orbit_point(&p, config, &mut rng) {
                Ok(x) => out.push(x),
                Err(Error::InsufficientWittIndex { .. }) => break,
                Err(err) => return Err(err),
            }
        }
    }
    for _ in 0..opts.per_orbit {
        out.push(Matrix::random(config.field(), config.e, config.f, &mut rng));
    }
    Ok(out)
}

/// Compares the zero set of the generators of `params` with the locus the
/// rank conditions describe. For a signed class it also checks that the
/// two components cover the `(f/2, 0)` locus and meet in the `(f/2 - 1, 0)`
/// locus.
pub fn check_equation_cut(
    params: &OrbitParams,
    config: &SpaceConfig,
    budget: u128,
    opts: SampleOptions,
) -> Result<VerificationReport> {
    let gens = generators(params, config)?;
    check_equation_cut_with(params, config, budget, opts, &gens)
}

/// As `check_equation_cut`, with the generators of `params` supplied.
pub fn check_equation_cut_with(
    params: &OrbitParams,
    config: &SpaceConfig,
    budget: u128,
    opts: SampleOptions,
    gens: &GeneratorSet,
) -> Result<VerificationReport> {
    params.validate(config)?;
    let start = Instant::now();
    let other = match params.sign {
        Some(sign) => Some(component_generators(sign.flip(), config)?),
        None => None,
    };
    let (r1, r2) = (params.r1, params.r2);
    let visit = |acc: &mut Scan, phi: &Matrix| {
        acc.bump("visited");
        let point = phi.entries();
        let z = gens.all_vanish_at(point);
        match (params.sign, &other) {
            (Some(sign), Some(other)) => {
                let z_other = other.all_vanish_at(point);
                let union = in_rank_locus(phi, config, r1, r2);
                let meet = in_rank_locus(phi, config, r1 - 1, r2);
                if union {
                    acc.bump("locus");
                }
                if (z || z_other) != union {
                    acc.flag(phi, || format!("union of components {} but rank locus {}", z || z_other, union));
                } else if (z && z_other) != meet {
                    acc.flag(phi, || format!("intersection of components {} but ({},0) locus {}", z && z_other, r1 - 1, meet));
                } else {
                    let class = classify(phi, config).expect("shape checked");
                    let own = closure_leq(&class, &OrbitParams::signed(r1, r2, sign), config).unwrap_or(false);
                    if z != own {
                        acc.flag(phi, || format!("zero set says {z}, class {class} says {own}"));
                    }
                }
            }
            _ => {
                let locus = in_rank_locus(phi, config, r1, r2);
                if locus {
                    acc.bump("locus");
                }
                if z != locus {
                    acc.flag(phi, || format!("generators vanish: {z}, rank conditions hold: {locus}"));
                }
            }
        }
    };

    let (mode, scan, sampled_note) = match sweep(config, budget, Scan::default, visit, Scan::merge) {
        Ok(scan) => (Mode::Exhaustive, scan, None),
        Err(err @ (Error::BudgetExceeded { .. } | Error::InfiniteField)) => {
            let points = sample_points(config, opts)?;
            let scan = points
                .par_iter()
                .map(|phi| {
                    let mut acc = Scan::default();
                    visit(&mut acc, phi);
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Scan::default(), Scan::merge);
            let mode = Mode::Sampled {
                n: points.len() as u64,
                seed: opts.seed,
            };
            (mode, scan, Some(format!("sampled instead of exhaustive: {err}")))
        }
        Err(err) => return Err(err),
    };
    let mut report = VerificationReport::new("cut", config, Some(*params), mode);
    report.tallies = scan.tallies;
    report.tallies.insert("generators".into(), gens.len() as u128);
    report.tallies.entry("mismatches".into()).or_insert(0);
    if let Some(w) = scan.witness {
        report.fail(w);
    } else if let Some(note) = sampled_note {
        report.warn(note);
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Tangent space dimension at each representative against the
/// codimension formula.
pub fn check_dimensions(config: &SpaceConfig) -> Result<VerificationReport> {
    check_dimensions_with(config, &codimension)
}

pub fn check_dimensions_with(
    config: &SpaceConfig,
    codim: &(dyn Fn(&OrbitParams, &SpaceConfig) -> Result<usize> + Sync),
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new("dims", config, None, Mode::Exhaustive);
    let params = valid_params(config);
    let results: Vec<Result<Option<(OrbitParams, usize, usize)>>> = params
        .par_iter()
        .map(|p| {
            let rep = match representative(p, config) {
                Ok(rep) => rep,
                Err(Error::InsufficientWittIndex { .. }) => return Ok(None),
                Err(err) => return Err(err),
            };
            let tangent = tangent_dimension(&rep, config)?;
            let formula = config.ambient_dim() as i64 - codim(p, config)? as i64;
            Ok(Some((*p, tangent, formula.max(-1) as usize)))
        })
        .collect();
    let mut checked = 0u128;
    let mut skipped = 0u128;
    let mut bad = Vec::new();
    let mut first = None;
    for r in results {
        match r? {
            None => skipped += 1,
            Some((p, tangent, formula)) => {
                checked += 1;
                if tangent != formula {
                    bad.push(p);
                    first.get_or_insert(format!("tangent dimension {tangent}, formula {formula} at {p}"));
                }
            }
        }
    }
    report.tallies.insert("classes".into(), checked);
    report.tallies.insert("mismatches".into(), bad.len() as u128);
    if skipped > 0 {
        report.tallies.insert("skipped".into(), skipped);
        report.warn(format!("{skipped} classes have no point over this field"));
    }
    if let Some(detail) = first {
        report.fail(Witness::Params { params: bad, detail });
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Sampled points of each orbit against the generators of every orbit:
/// they must vanish exactly when the first orbit lies in the closure of
/// the second.
pub fn check_closure_order(config: &SpaceConfig, opts: SampleOptions) -> Result<VerificationReport> {
    check_closure_order_with(config, opts, &|p: &OrbitParams, q: &OrbitParams| closure_leq(p, q, config))
}

pub fn check_closure_order_with(
    config: &SpaceConfig,
    opts: SampleOptions,
    leq: &(dyn Fn(&OrbitParams, &OrbitParams) -> Result<bool> + Sync),
) -> Result<VerificationReport> {
    let start = Instant::now();
    let params = valid_params(config);
    let sets: Vec<GeneratorSet> = params
        .iter()
        .map(|p| generators(p, config))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples: Vec<(OrbitParams, Matrix)> = Vec::new();
    for p in &params {
        for _ in 0..opts.per_orbit {
            match random_orbit_point(p, config, &mut rng) {
                Ok(x) => samples.push((*p, x)),
                Err(Error::InsufficientWittIndex { .. }) => break,
                Err(err) => return Err(err),
            }
        }
    }
    let scans: Vec<Result<Scan>> = samples
        .par_iter()
        .map(|(p, x)| {
            let mut acc = Scan::default();
            for (q, set) in params.iter().zip(&sets) {
                acc.bump("pairs");
                let expected = leq(p, q)?;
                let z = set.all_vanish_at(x.entries());
                if z != expected {
                    acc.bump("mismatches");
                    if acc.witness.is_none() {
                        acc.witness = Some(Witness::Matrix {
                            matrix: x.clone(),
                            detail: format!("point of {p} vs generators of {q}: vanish {z}, order says {expected}"),
                        });
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = Scan::default();
    for s in scans {
        total = total.merge(s?);
    }
    let mode = Mode::Sampled {
        n: samples.len() as u64,
        seed: opts.seed,
    };
    let mut report = VerificationReport::new("closure", config, None, mode);
    report.tallies = total.tallies;
    report.tallies.entry("mismatches".into()).or_insert(0);
    if let Some(w) = total.witness {
        report.fail(w);
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// `|closure(F_q)|` for the closure of `params`.
pub fn closure_point_count(params: &OrbitParams, config: &SpaceConfig, budget: u128) -> Result<u128> {
    params.validate(config)?;
    sweep(
        config,
        budget,
        || 0u128,
        |acc, phi| {
            let inside = match params.sign {
                None => in_rank_locus(phi, config, params.r1, params.r2),
                Some(_) => classify(phi, config)
                    .and_then(|c| closure_leq(&c, params, config))
                    .unwrap_or(false),
            };
            if inside {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )
}

/// Estimates the dimension of the closure from point counts over two or
/// more prime fields (the same form, reduced). Heuristic: deviations only
/// ever produce a warning.
pub fn point_count_dimension_estimate(
    params: &OrbitParams,
    configs: &[SpaceConfig],
    budget: u128,
) -> Result<VerificationReport> {
    point_count_dimension_estimate_with(params, configs, budget, &dimension)
}

pub fn point_count_dimension_estimate_with(
    params: &OrbitParams,
    configs: &[SpaceConfig],
    budget: u128,
    dim: &(dyn Fn(&OrbitParams, &SpaceConfig) -> Result<usize> + Sync),
) -> Result<VerificationReport> {
    let start = Instant::now();
    if configs.len() < 2 {
        return Err(Error::Format("at least two primes are needed".into()));
    }
    let mut counts = Vec::new();
    for c in configs {
        let q = c.field().order().ok_or(Error::InfiniteField)?;
        counts.push((q, closure_point_count(params, c, budget)?));
    }
    let (q1, n1) = counts[0];
    let (q2, n2) = counts[counts.len() - 1];
    let estimate = ((n2 as f64 / n1 as f64).ln() / (q2 as f64 / q1 as f64).ln()).round() as i64;
    let expected = dim(params, &configs[0])? as i64;
    let mut report = VerificationReport::new("counts", &configs[0], Some(*params), Mode::Exhaustive);
    for (q, n) in &counts {
        report.tallies.insert(format!("N_{q}"), *n);
    }
    report.tallies.insert("estimate".into(), estimate.max(0) as u128);
    report.tallies.insert("dimension".into(), expected as u128);
    if (estimate - expected).abs() > 1 {
        report.warn(format!("point counts suggest dimension {estimate}, formula gives {expected}"));
    }
    report.wall_time = start.elapsed();
    Ok(report)
}

/// A config for the same shape and form over another prime field; the Gram
/// matrix is reduced through its integer representatives.
pub fn reduce_config(config: &SpaceConfig, field: Field) -> Result<SpaceConfig> {
    let gram = config.form.gram();
    let lifted: Vec<Vec<Scalar>> = gram
        .to_rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let (negative, magnitude) = x.signed_display();
                    let v: i64 = magnitude.parse().map_err(|_| {
                        Error::Format(format!("Gram entry {x} has no integer representative"))
                    })?;
                    Ok(field.from_i64(if negative { -v } else { v }))
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let form = BilinearForm::new(config.kind(), Matrix::from_rows(field, lifted)?)?;
    SpaceConfig::new(config.e, form)
}
