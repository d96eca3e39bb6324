//! Exact scalar arithmetic.
//!
//! Three kinds of fields are supported: prime fields `F_p` with `p` odd, their
//! quadratic extensions `F_p(w)` with `w^2 = d` for a fixed non-residue `d`,
//! and the rationals. Every [`Scalar`] carries enough of its field to do
//! arithmetic on its own, so matrices and polynomials can use ordinary
//! operators.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exhaustive square-root search is used while the field has fewer elements
/// than this.
const EXHAUSTIVE_SQRT_LIMIT: u128 = 1_000_000;

/// Description of a coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", try_from = "RawField")]
pub enum Field {
    Prime { p: u64 },
    QuadraticExtension { p: u64, nonresidue: u64 },
    Rationals,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RawField {
    Prime {
        p: u64,
    },
    QuadraticExtension {
        p: u64,
        #[serde(default)]
        nonresidue: Option<u64>,
    },
    Rationals,
}

impl TryFrom<RawField> for Field {
    type Error = Error;

    fn try_from(raw: RawField) -> Result<Self> {
        match raw {
            RawField::Prime { p } => Field::prime(p),
            RawField::QuadraticExtension { p, nonresidue } => Field::quadratic(p, nonresidue),
            RawField::Rationals => Ok(Field::Rationals),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_modulus(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::CharTwoUnsupported);
    }
    if p >= 1 << 32 {
        return Err(Error::ModulusTooLarge(p));
    }
    if !is_prime(p) {
        return Err(Error::CompositeModulus(p));
    }
    Ok(())
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn is_square_mod(x: u64, p: u64) -> bool {
    let x = x % p;
    x == 0 || pow_mod(x, (p - 1) / 2, p) == 1
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        check_modulus(p)?;
        Ok(Field::Prime { p })
    }

    /// `F_{p^2}`; with `nonresidue = None` the smallest non-residue is used.
    pub fn quadratic(p: u64, nonresidue: Option<u64>) -> Result<Self> {
        check_modulus(p)?;
        let nonresidue = match nonresidue {
            Some(d) => {
                let d = d % p;
                if is_square_mod(d, p) {
                    return Err(Error::ResidueIsSquare { value: d, p });
                }
                d
            }
            None => (2..p)
                .find(|&d| !is_square_mod(d, p))
                .expect("every odd prime has a non-residue"),
        };
        Ok(Field::QuadraticExtension { p, nonresidue })
    }

    pub fn rationals() -> Self {
        Field::Rationals
    }

    pub fn characteristic(&self) -> u64 {
        match *self {
            Field::Prime { p } | Field::QuadraticExtension { p, .. } => p,
            Field::Rationals => 0,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u128> {
        match *self {
            Field::Prime { p } => Some(p as u128),
            Field::QuadraticExtension { p, .. } => Some((p as u128) * (p as u128)),
            Field::Rationals => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Prime { p } => Scalar::Prime {
                value: reduce_i64(n, p),
                p,
            },
            Field::QuadraticExtension { p, nonresidue } => Scalar::Quadratic {
                re: reduce_i64(n, p),
                im: 0,
                p,
                nonresidue,
            },
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// `num / den`; panics when `den` is zero in the field.
    pub fn ratio(&self, num: i64, den: i64) -> Scalar {
        let d = self.from_i64(den).inv().expect("denominator is zero in field");
        &self.from_i64(num) * &d
    }

    /// `re + im * w` in a quadratic extension; in other fields `im` must be 0.
    pub fn element(&self, re: i64, im: i64) -> Scalar {
        match *self {
            Field::QuadraticExtension { p, nonresidue } => Scalar::Quadratic {
                re: reduce_i64(re, p),
                im: reduce_i64(im, p),
                p,
                nonresidue,
            },
            _ => {
                assert_eq!(im, 0, "only quadratic extensions have a w-part");
                self.from_i64(re)
            }
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        x.field() == *self
    }

    /// All elements in canonical order: residues ascending, extension
    /// elements ordered by `(re, im)`.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        match *self {
            Field::Prime { p } => Ok((0..p).map(|value| Scalar::Prime { value, p }).collect()),
            Field::QuadraticExtension { p, nonresidue } => Ok((0..p)
                .flat_map(|re| {
                    (0..p).map(move |im| Scalar::Quadratic {
                        re,
                        im,
                        p,
                        nonresidue,
                    })
                })
                .collect()),
            Field::Rationals => Err(Error::InfiniteField),
        }
    }

    /// Uniform element of a finite field; for the rationals a small fraction
    /// with numerator in [-9, 9] and denominator in [1, 5].
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match *self {
            Field::Prime { p } => Scalar::Prime {
                value: rng.gen_range(0..p),
                p,
            },
            Field::QuadraticExtension { p, nonresidue } => Scalar::Quadratic {
                re: rng.gen_range(0..p),
                im: rng.gen_range(0..p),
                p,
                nonresidue,
            },
            Field::Rationals => {
                let n: i64 = rng.gen_range(-9..=9);
                let d: i64 = rng.gen_range(1..=5);
                Scalar::Rational(BigRational::new(n.into(), d.into()))
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Square root, when one exists in this field.
    ///
    /// Of the two roots `r` and `-r` the smaller one is returned: smaller
    /// residue in `F_p`, lexicographically smaller `(re, im)` in `F_{p^2}`,
    /// and the non-negative root over the rationals.
    pub fn sqrt(&self, x: &Scalar) -> Option<Scalar> {
        assert!(self.contains(x), "scalar is not in this field");
        if x.is_zero() {
            return Some(x.clone());
        }
        match *self {
            Field::Rationals => {
                let Scalar::Rational(q) = x else { unreachable!() };
                if q.is_negative() {
                    return None;
                }
                let n = q.numer().sqrt();
                let d = q.denom().sqrt();
                if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
                    Some(Scalar::Rational(BigRational::new(n, d)))
                } else {
                    None
                }
            }
            _ => {
                let order = self.order().unwrap();
                if order < EXHAUSTIVE_SQRT_LIMIT {
                    self.elements()
                        .unwrap()
                        .into_iter()
                        .find(|r| &(r * r) == x)
                } else {
                    let r = tonelli_shanks(self, x, order)?;
                    let neg = -&r;
                    Some(if canonical_key(&neg) < canonical_key(&r) {
                        neg
                    } else {
                        r
                    })
                }
            }
        }
    }

    /// Parses the text encoding of a scalar of this field.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let fail = |reason: &str| Error::Parse {
            input: text.to_string(),
            field: self.to_string(),
            reason: reason.to_string(),
        };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(fail("empty string"));
        }
        match *self {
            Field::Prime { p } => {
                let n = parse_integer(&s).ok_or_else(|| fail("expected an integer"))?;
                Ok(Scalar::Prime {
                    value: reduce_bigint(&n, p),
                    p,
                })
            }
            Field::QuadraticExtension { p, nonresidue } => {
                let (re, im) = parse_quadratic(&s).ok_or_else(|| fail("expected a+b*w"))?;
                Ok(Scalar::Quadratic {
                    re: reduce_bigint(&re, p),
                    im: reduce_bigint(&im, p),
                    p,
                    nonresidue,
                })
            }
            Field::Rationals => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (parse_integer(n), parse_integer(d)),
                    None => (parse_integer(&s), Some(BigInt::one())),
                };
                let (n, d) = n.zip(d).ok_or_else(|| fail("expected num/den"))?;
                if d.is_zero() {
                    return Err(fail("zero denominator"));
                }
                Ok(Scalar::Rational(BigRational::new(n, d)))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime { p } => write!(f, "F_{p}"),
            Field::QuadraticExtension { p, nonresidue } => {
                write!(f, "F_{}(w), w^2={}", p * p, nonresidue)
            }
            Field::Rationals => write!(f, "Q"),
        }
    }
}

fn reduce_i64(n: i64, p: u64) -> u64 {
    n.rem_euclid(p as i64) as u64
}

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.try_into().expect("residue fits in u64")
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Accepts `a`, `w`, `b*w`, `a+b*w`, `a-b*w` and `a+w`.
fn parse_quadratic(s: &str) -> Option<(BigInt, BigInt)> {
    if !s.contains('w') {
        return Some((parse_integer(s)?, BigInt::zero()));
    }
    let body = s.strip_suffix('w')?;
    // split at the last sign that is not leading
    let split = body
        .char_indices()
        .rev()
        .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i);
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im_part = im_part.strip_suffix('*').unwrap_or(im_part);
    let im = match im_part {
        "" | "+" => BigInt::one(),
        "-" => -BigInt::one(),
        other => parse_integer(other)?,
    };
    Some((parse_integer(re_part)?, im))
}

/// Tonelli–Shanks in the cyclic group of a finite field of the given order.
fn tonelli_shanks(field: &Field, x: &Scalar, order: u128) -> Option<Scalar> {
    let one = field.one();
    let minus_one = -&one;
    let half = (order - 1) / 2;
    if x.pow(half) != one {
        return None;
    }
    let mut q = order - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = nonsquare(field, half, &minus_one);
    let mut m = s;
    let mut c = z.pow(q);
    let mut t = x.pow(q);
    let mut r = x.pow(q.div_ceil(2));
    while t != one {
        let mut i = 0;
        let mut t2 = t.clone();
        while t2 != one {
            t2 = &t2 * &t2;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = &b * &b;
        }
        m = i;
        c = &b * &b;
        t = &t * &c;
        r = &r * &b;
    }
    Some(r)
}

fn nonsquare(field: &Field, half: u128, minus_one: &Scalar) -> Scalar {
    match *field {
        Field::Prime { p } => (2..p)
            .map(|v| field.from_i64(v as i64))
            .find(|z| &z.pow(half) == minus_one)
            .expect("non-residue exists"),
        Field::QuadraticExtension { p, .. } => (0..p as i64)
            .flat_map(|a| (1..p as i64).map(move |b| (a, b)))
            .map(|(a, b)| field.element(a, b))
            .find(|z| &z.pow(half) == minus_one)
            .expect("non-square exists"),
        Field::Rationals => unreachable!(),
    }
}

fn canonical_key(x: &Scalar) -> (u64, u64) {
    match *x {
        Scalar::Prime { value, .. } => (value, 0),
        Scalar::Quadratic { re, im, .. } => (re, im),
        Scalar::Rational(_) => (0, 0),
    }
}

/// An exact field element.
///
/// Canonical form: residues in `[0, p)`, rationals reduced with a positive
/// denominator, so structural equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Prime {
        value: u64,
        p: u64,
    },
    Quadratic {
        re: u64,
        im: u64,
        p: u64,
        nonresidue: u64,
    },
    Rational(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match *self {
            Scalar::Prime { p, .. } => Field::Prime { p },
            Scalar::Quadratic { p, nonresidue, .. } => {
                Field::QuadraticExtension { p, nonresidue }
            }
            Scalar::Rational(_) => Field::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Quadratic { re, im, .. } => *re == 0 && *im == 0,
            Scalar::Rational(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Prime { value, .. } => *value == 1,
            Scalar::Quadratic { re, im, .. } => *re == 1 && *im == 0,
            Scalar::Rational(q) => q.is_one(),
        }
    }

    pub fn zero_like(&self) -> Scalar {
        self.field().zero()
    }

    pub fn one_like(&self) -> Scalar {
        self.field().one()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match *self {
            Scalar::Prime { value, p } => Scalar::Prime {
                value: pow_mod(value, p - 2, p),
                p,
            },
            Scalar::Quadratic {
                re,
                im,
                p,
                nonresidue,
            } => {
                // (a + bw)^-1 = (a - bw) / (a^2 - d b^2)
                let norm = (re * re % p + p - nonresidue * (im * im % p) % p) % p;
                let ninv = pow_mod(norm, p - 2, p);
                Scalar::Quadratic {
                    re: re * ninv % p,
                    im: (p - im) % p * ninv % p,
                    p,
                    nonresidue,
                }
            }
            Scalar::Rational(ref q) => Scalar::Rational(q.recip()),
        })
    }

    pub fn pow(&self, mut exp: u128) -> Scalar {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// `self / other`; `None` when `other` is zero.
    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        other.inv().map(|i| self * &i)
    }

    /// Residue in `F_p`, if this is a prime-field element.
    pub fn residue(&self) -> Option<u64> {
        match *self {
            Scalar::Prime { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Signed representative for human-readable output: residues above
    /// `p/2` are shown as negatives. Returns `(negative, magnitude)`.
    pub(crate) fn signed_display(&self) -> (bool, String) {
        match self {
            Scalar::Prime { value, p } if *value > p / 2 => (true, (p - value).to_string()),
            Scalar::Rational(q) if q.is_negative() => (true, Scalar::Rational(-q).to_string()),
            other => (false, other.to_string()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Quadratic { re, im, .. } => write!(f, "{re}+{im}*w"),
            Scalar::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.partial_cmp(b),
            _ if self.field() == other.field() => {
                Some(canonical_key(self).cmp(&canonical_key(other)))
            }
            _ => None,
        }
    }
}

fn mismatch() -> ! {
    panic!("{}", Error::FieldMismatch)
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                let s = a + b;
                Scalar::Prime {
                    value: if s >= *p { s - p } else { s },
                    p: *p,
                }
            }
            (
                Scalar::Quadratic {
                    re: a,
                    im: b,
                    p,
                    nonresidue,
                },
                Scalar::Quadratic {
                    re: c, im: d, p: q, ..
                },
            ) if p == q => Scalar::Quadratic {
                re: (a + c) % p,
                im: (b + d) % p,
                p: *p,
                nonresidue: *nonresidue,
            },
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => mismatch(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Scalar::Prime {
                    value: if a >= b { a - b } else { a + p - b },
                    p: *p,
                }
            }
            (
                Scalar::Quadratic {
                    re: a,
                    im: b,
                    p,
                    nonresidue,
                },
                Scalar::Quadratic {
                    re: c, im: d, p: q, ..
                },
            ) if p == q => Scalar::Quadratic {
                re: (a + p - c) % p,
                im: (b + p - d) % p,
                p: *p,
                nonresidue: *nonresidue,
            },
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => mismatch(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Scalar::Prime {
                    value: a * b % p,
                    p: *p,
                }
            }
            (
                Scalar::Quadratic {
                    re: a,
                    im: b,
                    p,
                    nonresidue,
                },
                Scalar::Quadratic {
                    re: c, im: d, p: q, ..
                },
            ) if p == q => {
                let p = *p;
                let bd = b * d % p;
                Scalar::Quadratic {
                    re: (a * c % p + bd * nonresidue % p) % p,
                    im: (a * d % p + b * c % p) % p,
                    p,
                    nonresidue: *nonresidue,
                }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => mismatch(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Prime { value, p } => Scalar::Prime {
                value: (p - value) % p,
                p: *p,
            },
            Scalar::Quadratic {
                re,
                im,
                p,
                nonresidue,
            } => Scalar::Quadratic {
                re: (p - re) % p,
                im: (p - im) % p,
                p: *p,
                nonresidue: *nonresidue,
            },
            Scalar::Rational(q) => Scalar::Rational(-q),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);
