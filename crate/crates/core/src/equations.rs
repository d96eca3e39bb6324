//! Defining equations of orbit closures.
//!
//! Non-exceptional closures are cut out by the `(r1+1)`-minors of the generic
//! matrix `X` together with the `(r2+1)`-minors (symmetric) or principal
//! `(r2+2)`-Pfaffians (alternating) of `psi(X) = X K X^t`. The two components
//! at `(f/2, 0)` are cut out by the entries of `psi(X)` together with the
//! half of the `f/2`-minors of `X` lying in one eigenspace of the star
//! operator on `wedge^{f/2} F`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Field, Scalar};
use crate::forms::{BilinearForm, FormKind, SpaceConfig};
use crate::linalg::{det_by_expansion, pfaffian_by_expansion, subsets, Matrix};
use crate::orbits::{OrbitParams, Sign};
use crate::poly::{Polynomial, TermJson};

/// Generic `e x f` matrix of coordinate functions.
pub fn generic_matrix(config: &SpaceConfig) -> Vec<Vec<Polynomial>> {
    let (e, f, field) = (config.e, config.f, config.field());
    (0..e)
        .map(|i| (0..f).map(|j| Polynomial::variable(field, e, f, i, j)).collect())
        .collect()
}

/// `X K X^t` for the generic matrix `X`.
pub fn generic_psi(config: &SpaceConfig) -> Vec<Vec<Polynomial>> {
    let (e, f, field) = (config.e, config.f, config.field());
    let x = generic_matrix(config);
    let k = config.form.gram();
    let mut xk: Vec<Vec<Polynomial>> = vec![vec![Polynomial::zero(field, e, f); f]; e];
    for (i, row) in xk.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            for (m, xm) in x[i].iter().enumerate() {
                let c = k.get(m, l);
                if !c.is_zero() {
                    *slot = &*slot + &xm.scale(c);
                }
            }
        }
    }
    (0..e)
        .map(|i| {
            (0..e)
                .map(|j| {
                    let mut acc = Polynomial::zero(field, e, f);
                    for l in 0..f {
                        if !xk[i][l].is_zero() {
                            acc = &acc + &(&xk[i][l] * &x[j][l]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Where a generator comes from; enough to rebuild it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Label {
    Minor { rows: Vec<usize>, cols: Vec<usize> },
    PsiMinor { rows: Vec<usize>, cols: Vec<usize> },
    PsiPfaffian { indices: Vec<usize> },
    QuadraticInvariant { i: usize, j: usize },
    Component { sign: Sign, rows: Vec<usize>, eigen_index: Vec<usize> },
}

fn one_based(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Minor { rows, cols } => write!(f, "minor({}|{})", one_based(rows), one_based(cols)),
            Label::PsiMinor { rows, cols } => {
                write!(f, "psi-minor({}|{})", one_based(rows), one_based(cols))
            }
            Label::PsiPfaffian { indices } => write!(f, "psi-pfaffian({})", one_based(indices)),
            Label::QuadraticInvariant { i, j } => write!(f, "psi({},{})", i + 1, j + 1),
            Label::Component {
                sign,
                rows,
                eigen_index,
            } => write!(f, "component{sign}({}|{})", one_based(rows), one_based(eigen_index)),
        }
    }
}

impl Label {
    pub fn family(&self) -> &'static str {
        match self {
            Label::Minor { .. } => "minors",
            Label::PsiMinor { .. } => "psi-minors",
            Label::PsiPfaffian { .. } => "psi-pfaffians",
            Label::QuadraticInvariant { .. } => "quadratic-invariants",
            Label::Component { .. } => "component",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: Label,
    pub polynomial: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    field: Field,
    rows: usize,
    cols: usize,
    generators: Vec<Generator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub label: Label,
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

/// Count of generators of one family and degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryEntry {
    pub family: String,
    pub degree: usize,
    pub count: usize,
}

impl GeneratorSet {
    pub fn new(config: &SpaceConfig) -> Self {
        GeneratorSet {
            field: config.field(),
            rows: config.e,
            cols: config.f,
            generators: Vec::new(),
        }
    }

    fn push(&mut self, label: Label, polynomial: Polynomial) {
        self.generators.push(Generator { label, polynomial });
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn polynomials(&self) -> impl Iterator<Item = &Polynomial> {
        self.generators.iter().map(|g| &g.polynomial)
    }

    /// Removes and returns the generator at `index`.
    pub fn remove(&mut self, index: usize) -> Generator {
        self.generators.remove(index)
    }

    pub fn extend(&mut self, other: GeneratorSet) {
        self.generators.extend(other.generators);
    }

    /// Whether every generator vanishes at the row-major point.
    pub fn all_vanish_at(&self, point: &[Scalar]) -> bool {
        self.generators
            .iter()
            .all(|g| g.polynomial.evaluate_at(point).is_zero())
    }

    pub fn all_vanish(&self, phi: &Matrix) -> Result<bool> {
        if phi.rows() != self.rows || phi.cols() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", phi.rows(), phi.cols()),
            });
        }
        Ok(self.all_vanish_at(phi.entries()))
    }

    pub fn to_json(&self) -> Vec<GeneratorJson> {
        self.generators
            .iter()
            .map(|g| GeneratorJson {
                label: g.label.clone(),
                degree: g.polynomial.degree().unwrap_or(0),
                terms: g.polynomial.to_terms_json(),
            })
            .collect()
    }

    pub fn from_json(config: &SpaceConfig, items: &[GeneratorJson]) -> Result<Self> {
        let mut set = GeneratorSet::new(config);
        for item in items {
            let p = Polynomial::from_terms_json(config.field(), config.e, config.f, &item.terms)?;
            set.push(item.label.clone(), p);
        }
        Ok(set)
    }

    /// One line per generator: `label: polynomial`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            out.push_str(&format!("{}: {}\n", g.label, g.polynomial));
        }
        out
    }

    pub fn inventory(&self) -> Vec<InventoryEntry> {
        let mut counts: BTreeMap<(&'static str, usize), usize> = BTreeMap::new();
        for g in &self.generators {
            let key = (g.label.family(), g.polynomial.degree().unwrap_or(0));
            *counts.entry(key).or_default() += 1;
        }
        counts
            .into_iter()
            .map(|((family, degree), count)| InventoryEntry {
                family: family.to_string(),
                degree,
                count,
            })
            .collect()
    }
}

fn select(m: &[Vec<Polynomial>], rows: &[usize], cols: &[usize]) -> Vec<Vec<Polynomial>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

struct Ring {
    zero: Polynomial,
    one: Polynomial,
}

impl Ring {
    fn new(config: &SpaceConfig) -> Self {
        let field = config.field();
        Ring {
            zero: Polynomial::zero(field, config.e, config.f),
            one: Polynomial::constant(field, config.e, config.f, field.one()),
        }
    }

    fn det(&self, m: &[Vec<Polynomial>]) -> Polynomial {
        det_by_expansion(m, &self.zero, &self.one)
    }

    fn pf(&self, m: &[Vec<Polynomial>]) -> Polynomial {
        pfaffian_by_expansion(m, &self.zero, &self.one)
    }
}

fn pair_params_ok(params: &OrbitParams, config: &SpaceConfig) -> Result<()> {
    let probe = if params.is_exceptional(config) {
        OrbitParams::signed(params.r1, params.r2, Sign::Plus)
    } else {
        params.unsigned()
    };
    probe.validate(config)
}

/// Minors and Pfaffians expressing `rank X <= r1` and `rank psi(X) <= r2`.
///
/// For the exceptional pair (unsigned) this cuts out the union of both
/// components.
pub fn rank_condition_generators(params: &OrbitParams, config: &SpaceConfig) -> Result<GeneratorSet> {
    if params.sign.is_some() {
        return Err(Error::InvalidParams {
            params: params.to_string(),
            reason: "a signed class is cut out by its component equations".into(),
        });
    }
    pair_params_ok(params, config)?;
    let (e, f) = (config.e, config.f);
    let ring = Ring::new(config);
    let x = generic_matrix(config);
    let psi = generic_psi(config);
    let mut set = GeneratorSet::new(config);

    let size = params.r1 + 1;
    for rows in subsets(e, size) {
        for cols in subsets(f, size) {
            let p = ring.det(&select(&x, &rows, &cols));
            set.push(Label::Minor { rows: rows.clone(), cols }, p);
        }
    }
    match config.kind() {
        FormKind::Symmetric => {
            let size = params.r2 + 1;
            for rows in subsets(e, size) {
                for cols in subsets(e, size) {
                    let p = ring.det(&select(&psi, &rows, &cols));
                    set.push(Label::PsiMinor { rows: rows.clone(), cols }, p);
                }
            }
        }
        FormKind::Alternating => {
            for indices in subsets(e, params.r2 + 2) {
                let p = ring.pf(&select(&psi, &indices, &indices));
                set.push(Label::PsiPfaffian { indices }, p);
            }
        }
    }
    Ok(set)
}

/// The operator on `wedge^m F` (m = f/2) induced by the form, in the basis
/// `e_S` of increasing `m`-subsets:
/// `star[T][S] = sgn(T^c, T) det K[T^c, S]`, where `sgn(T^c, T)` is the sign
/// of the shuffle listing `T^c` and then `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarOperator {
    pub f: usize,
    pub subsets: Vec<Vec<usize>>,
    pub matrix: Matrix,
    /// `(-1)^m det K`, so that `matrix^2 = square * I`.
    pub square: Scalar,
    pub mu: Scalar,
}

fn shuffle_sign(first: &[usize], second: &[usize]) -> bool {
    let inversions: usize = first
        .iter()
        .map(|a| second.iter().filter(|b| *b < a).count())
        .sum();
    inversions % 2 == 1
}

impl StarOperator {
    pub fn new(form: &BilinearForm) -> Result<Self> {
        if form.kind() != FormKind::Symmetric {
            return Err(Error::WrongKind {
                expected: "symmetric",
            });
        }
        let f = form.dim();
        if f % 2 == 1 {
            return Err(Error::OddDimension(f));
        }
        let m = f / 2;
        let field = form.field();
        let gram = form.gram();
        let subs = subsets(f, m);
        let index: BTreeMap<&Vec<usize>, usize> = subs.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let n = subs.len();
        let mut matrix = Matrix::zeros(field, n, n);
        for (ti, t) in subs.iter().enumerate() {
            let comp: Vec<usize> = (0..f).filter(|i| !t.contains(i)).collect();
            debug_assert!(index.contains_key(&comp));
            let negative = shuffle_sign(&comp, t);
            for (si, s) in subs.iter().enumerate() {
                let d = gram.minor(&comp, s)?;
                matrix.set(ti, si, if negative { -d } else { d });
            }
        }
        let det = gram.det()?;
        let square = if m % 2 == 1 { -det } else { det };
        let mu = field.sqrt(&square).ok_or_else(|| Error::EigenvalueNotInField {
            square: square.to_string(),
            field: field.to_string(),
        })?;
        Ok(StarOperator {
            f,
            subsets: subs,
            matrix,
            square,
            mu,
        })
    }

    /// `(I + lambda^{-1} star) / 2`: projection onto the `lambda`-eigenspace.
    pub fn projector(&self, lambda: &Scalar) -> Matrix {
        let field = self.matrix.field();
        let n = self.matrix.rows();
        let inv = lambda.inv().expect("eigenvalue is nonzero");
        let half = field.from_i64(2).inv().expect("characteristic is not 2");
        (&Matrix::identity(field, n) + &self.matrix.scale(&inv)).scale(&half)
    }

    /// Plucker coordinates of the row space of an `m x f` matrix.
    pub fn plucker(&self, rows: &Matrix) -> Result<Vec<Scalar>> {
        let all: Vec<usize> = (0..rows.rows()).collect();
        self.subsets.iter().map(|s| rows.minor(&all, s)).collect()
    }

    /// The eigenvalue on the Plucker vector of `span(a_1..a_m)`.
    pub fn reference_eigenvalue(&self, form: &BilinearForm) -> Result<Scalar> {
        let witt = form.witt_basis();
        let m = self.f / 2;
        if witt.index() < m {
            return Err(Error::SignUndefinedForForm);
        }
        let l0 = Matrix::from_rows(form.field(), witt.reference_isotropic())?;
        let w = self.plucker(&l0)?;
        let image = self.matrix.mul_vec(&w);
        let k = w.iter().position(|c| !c.is_zero()).expect("basis has full rank");
        let lambda = image[k].checked_div(&w[k]).expect("nonzero");
        debug_assert!(image.iter().zip(&w).all(|(a, b)| *a == &lambda * b));
        Ok(lambda)
    }

    /// Eigenvalue whose eigenspace contains the Plucker vectors of the
    /// maximal isotropic subspaces of the given family.
    pub fn family_eigenvalue(&self, form: &BilinearForm, sign: Sign) -> Result<Scalar> {
        let plus = self.reference_eigenvalue(form)?;
        Ok(match sign {
            Sign::Plus => plus,
            Sign::Minus => -plus,
        })
    }
}

/// Entries of `psi(X)` (upper triangle) and the `f/2`-minors of `X`
/// projected away from the eigenspace of the chosen family.
pub fn component_generators(sign: Sign, config: &SpaceConfig) -> Result<GeneratorSet> {
    let star = StarOperator::new(&config.form)?;
    let m = config.f / 2;
    if m > config.e {
        return Err(Error::InvalidParams {
            params: OrbitParams::signed(m, 0, sign).to_string(),
            reason: "f/2 exceeds e".into(),
        });
    }
    let psi = generic_psi(config);
    let mut set = GeneratorSet::new(config);
    for i in 0..config.e {
        for j in i..config.e {
            set.push(Label::QuadraticInvariant { i, j }, psi[i][j].clone());
        }
    }
    let lambda = star.family_eigenvalue(&config.form, sign)?;
    let projector = star.projector(&-lambda);
    let ring = Ring::new(config);
    let x = generic_matrix(config);
    for rows in subsets(config.e, m) {
        let minors: Vec<Polynomial> = star
            .subsets
            .iter()
            .map(|s| ring.det(&select(&x, &rows, s)))
            .collect();
        for (si, s) in star.subsets.iter().enumerate() {
            let mut acc = ring.zero.clone();
            for (ti, minor) in minors.iter().enumerate() {
                let c = projector.get(si, ti);
                if !c.is_zero() {
                    acc = &acc + &minor.scale(c);
                }
            }
            if !acc.is_zero() {
                set.push(
                    Label::Component {
                        sign,
                        rows: rows.clone(),
                        eigen_index: s.clone(),
                    },
                    acc,
                );
            }
        }
    }
    Ok(set)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sizes and degrees of the generator families of `params`, without
/// expanding any polynomial. For a component the count is the dimension of
/// the span of its star-projected minors.
pub fn inventory(params: &OrbitParams, config: &SpaceConfig) -> Result<Vec<InventoryEntry>> {
    params.validate(config)?;
    let (e, f) = (config.e, config.f);
    let entry = |family: &str, degree: usize, count: usize| InventoryEntry {
        family: family.to_string(),
        degree,
        count,
    };
    let mut out = Vec::new();
    match params.sign {
        Some(_) => {
            let m = f / 2;
            out.push(entry("quadratic-invariants", 2, e * (e + 1) / 2));
            out.push(entry("component", m, binomial(e, m) * binomial(f, m) / 2));
        }
        None => {
            let s = params.r1 + 1;
            out.push(entry("minors", s, binomial(e, s) * binomial(f, s)));
            match config.kind() {
                FormKind::Symmetric => {
                    let s = params.r2 + 1;
                    out.push(entry("psi-minors", 2 * s, binomial(e, s).pow(2)));
                }
                FormKind::Alternating => {
                    let s = params.r2 + 2;
                    out.push(entry("psi-pfaffians", s, binomial(e, s)));
                }
            }
        }
    }
    out.retain(|x| x.count > 0);
    out.sort_by(|a, b| (a.family.as_str(), a.degree).cmp(&(b.family.as_str(), b.degree)));
    Ok(out)
}

/// Generators of the closure of the given orbit.
pub fn generators(params: &OrbitParams, config: &SpaceConfig) -> Result<GeneratorSet> {
    params.validate(config)?;
    match params.sign {
        Some(sign) => component_generators(sign, config),
        None => rank_condition_generators(params, config),
    }
}

/// Rebuilds the polynomial a label stands for.
pub fn regenerate(label: &Label, config: &SpaceConfig) -> Result<Polynomial> {
    let ring = Ring::new(config);
    let check = |v: &[usize], bound: usize| match v.iter().find(|&&i| i >= bound) {
        Some(&index) => Err(Error::IndexOutOfRange { index, bound }),
        None => Ok(()),
    };
    match label {
        Label::Minor { rows, cols } => {
            check(rows, config.e)?;
            check(cols, config.f)?;
            Ok(ring.det(&select(&generic_matrix(config), rows, cols)))
        }
        Label::PsiMinor { rows, cols } => {
            check(rows, config.e)?;
            check(cols, config.e)?;
            Ok(ring.det(&select(&generic_psi(config), rows, cols)))
        }
        Label::PsiPfaffian { indices } => {
            check(indices, config.e)?;
            Ok(ring.pf(&select(&generic_psi(config), indices, indices)))
        }
        Label::QuadraticInvariant { i, j } => {
            check(&[*i, *j], config.e)?;
            Ok(generic_psi(config)[*i][*j].clone())
        }
        Label::Component { sign, .. } => {
            // identically zero projections are not kept in the set
            let set = component_generators(*sign, config)?;
            Ok(set
                .generators
                .into_iter()
                .find(|g| &g.label == label)
                .map_or(ring.zero, |g| g.polynomial))
        }
    }
}

/// Whether `target` lies in the linear span of `polys`.
pub fn span_contains<'a>(polys: impl IntoIterator<Item = &'a Polynomial>, target: &Polynomial) -> bool {
    let polys: Vec<&Polynomial> = polys.into_iter().collect();
    let monomials: BTreeSet<_> = polys
        .iter()
        .chain(std::iter::once(&target))
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    let field = target.field();
    let row = |p: &Polynomial| monomials.iter().map(|m| p.coefficient(m)).collect::<Vec<_>>();
    let base: Vec<Vec<Scalar>> = polys.iter().map(|p| row(p)).collect();
    let rank = |rows: Vec<Vec<Scalar>>| {
        if rows.is_empty() {
            0
        } else {
            Matrix::from_rows(field, rows).map(|m| m.rank()).unwrap_or(0)
        }
    };
    let before = rank(base.clone());
    let mut with = base;
    with.push(row(target));
    rank(with) == before
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{closure_leq, random_orbit_point, representative, valid_params};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(kind: FormKind, e: usize, f: usize, field: Field) -> SpaceConfig {
        SpaceConfig::split(kind, e, f, field).unwrap()
    }

    #[test]
    fn generic_psi_identity_form() {
        let field = Field::rationals();
        let config = SpaceConfig::new(1, BilinearForm::identity(field, 3).unwrap()).unwrap();
        assert_eq!(generic_psi(&config)[0][0].to_string(), "x11^2 + x12^2 + x13^2");
    }

    #[test]
    fn generic_psi_shape_and_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (kind, f) in [(FormKind::Alternating, 4), (FormKind::Symmetric, 5)] {
            let field = Field::prime(7).unwrap();
            let config = cfg(kind, 3, f, field);
            let psi = generic_psi(&config);
            for i in 0..3 {
                for j in 0..3 {
                    match kind {
                        FormKind::Symmetric => assert_eq!(psi[i][j], psi[j][i]),
                        FormKind::Alternating => {
                            assert_eq!(psi[i][j], -&psi[j][i]);
                            if i == j {
                                assert!(psi[i][i].is_zero());
                            }
                        }
                    }
                }
            }
            for _ in 0..200 {
                let phi = Matrix::random(field, 3, f, &mut rng);
                let expected = config.form.psi(&phi).unwrap();
                for i in 0..3 {
                    for j in 0..3 {
                        assert_eq!(&psi[i][j].evaluate(&phi).unwrap(), expected.get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_condition_examples() {
        let q = Field::rationals();
        let dense = rank_condition_generators(&OrbitParams::new(2, 2), &cfg(FormKind::Alternating, 2, 4, q)).unwrap();
        assert!(dense.is_empty());

        let alt = cfg(FormKind::Alternating, 2, 4, q);
        let set = rank_condition_generators(&OrbitParams::new(2, 0), &alt).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.generators()[0].polynomial, generic_psi(&alt)[0][1]);
        assert_eq!(set.generators()[0].polynomial.degree(), Some(2));

        let sym = cfg(FormKind::Symmetric, 2, 3, q);
        let set = rank_condition_generators(&OrbitParams::new(1, 0), &sym).unwrap();
        let minors = set.generators().iter().filter(|g| g.label.family() == "minors").count();
        let entries: BTreeSet<String> = set
            .generators()
            .iter()
            .filter(|g| g.label.family() == "psi-minors")
            .map(|g| g.polynomial.to_string())
            .collect();
        assert_eq!(minors, 3);
        assert_eq!(entries.len(), 3);
    }

    #[test]
    fn degrees_and_homogeneity() {
        let field = Field::prime(5).unwrap();
        for (kind, e, f) in [
            (FormKind::Symmetric, 3, 4),
            (FormKind::Symmetric, 3, 5),
            (FormKind::Alternating, 3, 4),
            (FormKind::Alternating, 4, 6),
        ] {
            let config = cfg(kind, e, f, field);
            for p in valid_params(&config) {
                let set = generators(&p, &config).unwrap();
                for g in set.generators() {
                    let expected = match &g.label {
                        Label::Minor { rows, .. } => rows.len(),
                        Label::PsiMinor { rows, .. } => 2 * rows.len(),
                        Label::PsiPfaffian { indices } => indices.len(),
                        Label::QuadraticInvariant { .. } => 2,
                        Label::Component { .. } => f / 2,
                    };
                    assert!(g.polynomial.is_homogeneous());
                    if !g.polynomial.is_zero() {
                        assert_eq!(g.polynomial.degree(), Some(expected), "{}", g.label);
                    }
                }
            }
        }
    }

    #[test]
    fn labels_regenerate_identically() {
        let field = Field::prime(5).unwrap();
        for (kind, e, f) in [(FormKind::Symmetric, 2, 4), (FormKind::Alternating, 3, 4)] {
            let config = cfg(kind, e, f, field);
            for p in valid_params(&config) {
                for g in generators(&p, &config).unwrap().generators() {
                    assert_eq!(regenerate(&g.label, &config).unwrap(), g.polynomial);
                }
            }
        }
    }

    #[test]
    fn minor_labels_match_matrix_minors() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let field = Field::prime(11).unwrap();
        let config = cfg(FormKind::Symmetric, 3, 5, field);
        let set = rank_condition_generators(&OrbitParams::new(1, 1), &config).unwrap();
        for _ in 0..200 {
            let phi = Matrix::random(field, 3, 5, &mut rng);
            for g in set.generators() {
                if let Label::Minor { rows, cols } = &g.label {
                    assert_eq!(g.polynomial.evaluate(&phi).unwrap(), phi.minor(rows, cols).unwrap());
                }
            }
        }
    }

    #[test]
    fn star_operator_examples() {
        let f5 = Field::prime(5).unwrap();
        let form = BilinearForm::identity(f5, 2).unwrap();
        // f = 2 is below the configuration minimum but fine for the operator
        let star = StarOperator::new(&form).unwrap();
        assert_eq!(star.matrix, Matrix::from_i64(f5, &[&[0, -1], &[1, 0]]));
        assert_eq!(star.square, f5.from_i64(-1));

        let f3 = Field::prime(3).unwrap();
        assert!(matches!(
            StarOperator::new(&BilinearForm::identity(f3, 2).unwrap()),
            Err(Error::EigenvalueNotInField { .. })
        ));
        let f9 = Field::quadratic(3, None).unwrap();
        assert!(StarOperator::new(&BilinearForm::identity(f9, 2).unwrap()).is_ok());

        let alt = BilinearForm::split(FormKind::Alternating, f5, 4).unwrap();
        assert!(matches!(StarOperator::new(&alt), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn star_squares_to_scalar() {
        for field in [Field::prime(5).unwrap(), Field::prime(13).unwrap()] {
            for f in [2, 4, 6] {
                for form in [
                    BilinearForm::identity(field, f).unwrap(),
                    BilinearForm::split(FormKind::Symmetric, field, f).unwrap(),
                ] {
                    let star = StarOperator::new(&form).unwrap();
                    let n = star.matrix.rows();
                    let sq = &star.matrix * &star.matrix;
                    assert_eq!(sq, Matrix::identity(field, n).scale(&star.square));
                    let plus = star.projector(&star.mu);
                    let minus = star.projector(&-star.mu.clone());
                    assert_eq!(&plus + &minus, Matrix::identity(field, n));
                    assert_eq!(&plus * &plus, plus);
                    assert!((&plus * &minus).is_zero());
                }
            }
            let split = BilinearForm::split(FormKind::Symmetric, field, 6).unwrap();
            assert!(StarOperator::new(&split).unwrap().mu.is_one());
        }
    }

    #[test]
    fn component_generators_vanish_on_their_component() {
        let field = Field::prime(5).unwrap();
        for (e, f) in [(2, 4), (3, 4), (3, 6)] {
            let config = cfg(FormKind::Symmetric, e, f, field);
            let m = f / 2;
            for sign in [Sign::Plus, Sign::Minus] {
                let set = component_generators(sign, &config).unwrap();
                let own = representative(&OrbitParams::signed(m, 0, sign), &config).unwrap();
                let other = representative(&OrbitParams::signed(m, 0, sign.flip()), &config).unwrap();
                assert!(set.all_vanish(&own).unwrap());
                assert!(!set.all_vanish(&other).unwrap());
                let w_vanish = set
                    .generators()
                    .iter()
                    .filter(|g| g.label.family() == "quadratic-invariants")
                    .all(|g| g.polynomial.evaluate(&other).unwrap().is_zero());
                assert!(w_vanish);
            }
        }
    }

    #[test]
    fn identity_gram_components_contain_block_determinants() {
        let field = Field::prime(5).unwrap();
        let config = SpaceConfig::new(2, BilinearForm::identity(field, 4).unwrap()).unwrap();
        let x = generic_matrix(&config);
        let ring = Ring::new(&config);
        let det_x = ring.det(&select(&x, &[0, 1], &[0, 1]));
        let det_y = ring.det(&select(&x, &[0, 1], &[2, 3]));
        let sum = &det_x + &det_y;
        let diff = &det_x - &det_y;
        let plus = component_generators(Sign::Plus, &config).unwrap();
        let minus = component_generators(Sign::Minus, &config).unwrap();
        let contains = |set: &GeneratorSet, p: &Polynomial| span_contains(set.polynomials(), p);
        assert!(contains(&plus, &sum) != contains(&plus, &diff));
        assert!(contains(&minus, &sum) != contains(&minus, &diff));
        assert!(contains(&plus, &sum) == contains(&minus, &diff));
    }

    #[test]
    fn vanishing_matches_closure_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let field = Field::prime(5).unwrap();
        for (kind, e, f) in [
            (FormKind::Symmetric, 2, 4),
            (FormKind::Symmetric, 3, 4),
            (FormKind::Alternating, 2, 4),
            (FormKind::Symmetric, 2, 3),
        ] {
            let config = cfg(kind, e, f, field);
            let params = valid_params(&config);
            let sets: Vec<_> = params.iter().map(|p| generators(p, &config).unwrap()).collect();
            for q in &params {
                for _ in 0..20 {
                    let x = random_orbit_point(q, &config, &mut rng).unwrap();
                    for (p, set) in params.iter().zip(&sets) {
                        assert_eq!(
                            set.all_vanish(&x).unwrap(),
                            closure_leq(q, p, &config).unwrap(),
                            "{kind} e={e} f={f} point of {q} vs {p}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let field = Field::prime(7).unwrap();
        let config = cfg(FormKind::Symmetric, 2, 4, field);
        let set = component_generators(Sign::Minus, &config).unwrap();
        let json = serde_json::to_string(&set.to_json()).unwrap();
        let items: Vec<GeneratorJson> = serde_json::from_str(&json).unwrap();
        assert_eq!(GeneratorSet::from_json(&config, &items).unwrap(), set);
        assert!(json.contains(r#""type":"component""#));
    }

    #[test]
    fn combinatorial_inventory_matches_generated_sets() {
        let field = Field::prime(5).unwrap();
        for (kind, e, f) in [
            (FormKind::Symmetric, 2, 4),
            (FormKind::Symmetric, 3, 4),
            (FormKind::Symmetric, 3, 5),
            (FormKind::Alternating, 3, 4),
            (FormKind::Symmetric, 3, 6),
        ] {
            let config = cfg(kind, e, f, field);
            for p in valid_params(&config) {
                let set = generators(&p, &config).unwrap();
                let counted = inventory(&p, &config).unwrap();
                if p.sign.is_none() {
                    assert_eq!(counted, set.inventory(), "{kind} {e} {f} {p}");
                } else {
                    let v: Vec<Polynomial> = set
                        .generators()
                        .iter()
                        .filter(|g| g.label.family() == "component")
                        .map(|g| g.polynomial.clone())
                        .collect();
                    let monomials: BTreeSet<_> = v.iter().flat_map(|q| q.terms().map(|(m, _)| m.clone())).collect();
                    let rows: Vec<Vec<Scalar>> = v
                        .iter()
                        .map(|q| monomials.iter().map(|m| q.coefficient(m)).collect())
                        .collect();
                    let rank = Matrix::from_rows(field, rows).unwrap().rank();
                    let expected = counted.iter().find(|x| x.family == "component").unwrap().count;
                    assert_eq!(rank, expected);
                }
            }
        }
    }

    #[test]
    fn inventory_counts() {
        let config = cfg(FormKind::Alternating, 3, 4, Field::rationals());
        let set = rank_condition_generators(&OrbitParams::new(2, 0), &config).unwrap();
        let inv = set.inventory();
        assert_eq!(
            inv,
            vec![
                InventoryEntry {
                    family: "minors".into(),
                    degree: 3,
                    count: 4
                },
                InventoryEntry {
                    family: "psi-pfaffians".into(),
                    degree: 2,
                    count: 3
                },
            ]
        );
    }
}
