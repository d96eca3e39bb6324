//! Sparse polynomials in the entries `x_ij` of a generic `e x f` matrix.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Field, Scalar};
use crate::linalg::Matrix;

/// Exponent vector, ordered by total degree and then lexicographically
/// (so `x11 > x12 > ...` within a degree).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over `field` in the `rows * cols` variables `x_ij`; variable
/// `i * cols + j` is `x_{i+1, j+1}`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        Polynomial {
            field,
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, rows: usize, cols: usize, c: Scalar) -> Self {
        let mut p = Self::zero(field, rows, cols);
        p.add_term(Monomial::one(rows * cols), c);
        p
    }

    /// The coordinate `x_ij` (0-based).
    pub fn variable(field: Field, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut p = Self::zero(field, rows, cols);
        p.add_term(Monomial::var(rows * cols, i * cols + j), field.one());
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nvars(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in decreasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Degree of the leading term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            Some(d) => degrees.all(|x| x == d),
            None => true,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Self::zero(self.field, self.rows, self.cols);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Value at the point with coordinates `point` (row-major).
    pub fn evaluate_at(&self, point: &[Scalar]) -> Scalar {
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(m.exponents()) {
                for _ in 0..k {
                    t = &t * x;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes `x_ij -> Phi_ij`.
    pub fn evaluate(&self, phi: &Matrix) -> Result<Scalar> {
        if phi.rows() != self.rows || phi.cols() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", phi.rows(), phi.cols()),
            });
        }
        if phi.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self.evaluate_at(phi.entries()))
    }

    pub fn variable_name(&self, index: usize) -> String {
        let (i, j) = (index / self.cols + 1, index % self.cols + 1);
        if self.rows >= 10 || self.cols >= 10 {
            format!("x{i}_{j}")
        } else {
            format!("x{i}{j}")
        }
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (idx, &k) in m.exponents().iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.variable_name(idx)),
                _ => parts.push(format!("{}^{}", self.variable_name(idx), k)),
            }
        }
        parts.join("*")
    }

    fn check_compatible(&self, other: &Polynomial) {
        assert!(
            self.field == other.field && self.rows == other.rows && self.cols == other.cols,
            "polynomials over different rings were combined"
        );
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let (negative, magnitude) = c.signed_display();
            let magnitude = if magnitude.contains(['+', '*']) {
                format!("({magnitude})")
            } else {
                magnitude
            };
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let body = self.render_monomial(m);
            if body.is_empty() {
                f.write_str(&magnitude)?;
            } else if magnitude == "1" {
                f.write_str(&body)?;
            } else {
                write!(f, "{magnitude}*{body}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut out = Polynomial::zero(self.field, self.rows, self.cols);
        for (m, a) in &self.terms {
            for (n, b) in &rhs.terms {
                out.add_term(m.product(n), a * b);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-self.field.one())
    }
}

/// One term of the JSON export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u8>,
    pub coeff: String,
}

impl Polynomial {
    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.terms()
            .map(|(m, c)| TermJson {
                exps: m.exponents().to_vec(),
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn from_terms_json(field: Field, rows: usize, cols: usize, terms: &[TermJson]) -> Result<Self> {
        let mut p = Polynomial::zero(field, rows, cols);
        for t in terms {
            if t.exps.len() != rows * cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} exponents", rows * cols),
                    found: format!("{} exponents", t.exps.len()),
                });
            }
            p.add_term(Monomial(t.exps.clone()), field.parse(&t.coeff)?);
        }
        Ok(p)
    }
}
