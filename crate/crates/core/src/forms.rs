//! Non-degenerate bilinear forms on `F`, the quadratic map `psi`, and the
//! isometry groups `Sp(F)` / `SO(F)`.
//!
//! Convention: an element of `E (x) F` is an `e x f` matrix `Phi` whose rows
//! are indexed by a basis of `E`; the group acts by `Phi -> A Phi B^t` and
//! `psi(Phi) = Phi K Phi^t` where `K` is the Gram matrix.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Field, Scalar};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Symmetric,
    Alternating,
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormKind::Symmetric => "symmetric",
            FormKind::Alternating => "alternating",
        })
    }
}

/// A non-degenerate symmetric or alternating form, given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    kind: FormKind,
    gram: Matrix,
}

impl BilinearForm {
    pub fn new(kind: FormKind, gram: Matrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::InvalidForm("Gram matrix is not square".into()));
        }
        if gram.field().characteristic() == 2 {
            return Err(Error::CharTwoUnsupported);
        }
        match kind {
            FormKind::Symmetric if !gram.is_symmetric() => {
                return Err(Error::InvalidForm("Gram matrix is not symmetric".into()))
            }
            FormKind::Alternating if !gram.is_alternating() => {
                return Err(Error::InvalidForm(
                    "Gram matrix is not skew-symmetric with zero diagonal".into(),
                ))
            }
            FormKind::Alternating if gram.rows() % 2 == 1 => {
                return Err(Error::OddDimension(gram.rows()))
            }
            _ => {}
        }
        if gram.det()?.is_zero() {
            return Err(Error::InvalidForm("Gram matrix is degenerate".into()));
        }
        Ok(BilinearForm { kind, gram })
    }

    /// Maximal Witt index form: antidiagonal ones for symmetric forms,
    /// blocks `[[0,1],[-1,0]]` for alternating ones.
    pub fn split(kind: FormKind, field: Field, f: usize) -> Result<Self> {
        let gram = match kind {
            FormKind::Symmetric => Matrix::from_fn(field, f, f, |i, j| {
                if i + j + 1 == f {
                    field.one()
                } else {
                    field.zero()
                }
            }),
            FormKind::Alternating => Matrix::from_fn(field, f, f, |i, j| {
                if i % 2 == 0 && j == i + 1 {
                    field.one()
                } else if j % 2 == 0 && i == j + 1 {
                    field.from_i64(-1)
                } else {
                    field.zero()
                }
            }),
        };
        Self::new(kind, gram)
    }

    /// The symmetric form with identity Gram matrix.
    pub fn identity(field: Field, f: usize) -> Result<Self> {
        Self::new(FormKind::Symmetric, Matrix::identity(field, f))
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> Field {
        self.gram.field()
    }

    pub fn is_split(&self) -> bool {
        Self::split(self.kind, self.field(), self.dim())
            .map(|s| s.gram == self.gram)
            .unwrap_or(false)
    }

    /// `u^t K v` for row vectors `u`, `v`.
    pub fn pair(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let kv = self.gram.mul_vec(v);
        dot(u, &kv, self.field())
    }

    /// `psi(Phi) = Phi K Phi^t`.
    pub fn psi(&self, phi: &Matrix) -> Result<Matrix> {
        if phi.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} columns", self.dim()),
                found: format!("{} columns", phi.cols()),
            });
        }
        Ok(&(phi * &self.gram) * &phi.transpose())
    }

    /// Rank of `psi(Phi)`.
    pub fn isotropic_rank(&self, phi: &Matrix) -> Result<usize> {
        Ok(self.psi(phi)?.rank())
    }

    /// Whether `B^t K B = K`.
    pub fn is_isometry(&self, b: &Matrix) -> bool {
        b.is_square()
            && b.rows() == self.dim()
            && &(&b.transpose() * &self.gram) * b == self.gram
    }

    /// Basis of the Lie algebra `{b : b^t K + K b = 0}`.
    pub fn lie_basis(&self) -> Vec<Matrix> {
        let f = self.dim();
        let field = self.field();
        // coordinates of b are b[k][l] at index k*f + l; equation (i, j) of
        // b^t K + K b is sum_k b[k][i] K[k][j] + sum_k K[i][k] b[k][j]
        let mut system = Matrix::zeros(field, f * f, f * f);
        for i in 0..f {
            for j in 0..f {
                let eq = i * f + j;
                for k in 0..f {
                    let a = system.get(eq, k * f + i) + self.gram.get(k, j);
                    system.set(eq, k * f + i, a);
                    let b = system.get(eq, k * f + j) + self.gram.get(i, k);
                    system.set(eq, k * f + j, b);
                }
            }
        }
        system
            .kernel_basis()
            .into_iter()
            .map(|v| Matrix::from_rows(field, v.chunks(f).map(<[Scalar]>::to_vec).collect()).unwrap())
            .collect()
    }

    /// Cayley transform `(I - M)(I + M)^{-1}`; `None` when `I + M` is singular.
    pub fn cayley_transform(&self, m: &Matrix) -> Option<Matrix> {
        let id = Matrix::identity(self.field(), self.dim());
        let inv = (&id + m).inverse().ok()?;
        Some(&(&id - m) * &inv)
    }

    /// Random isometry of determinant one via the Cayley transform of a
    /// random Lie algebra element.
    pub fn random_isometry<R: Rng + ?Sized>(&self, rng: &mut R) -> IsometrySample {
        let basis = self.lie_basis();
        let field = self.field();
        for attempt in 1..=MAX_CAYLEY_ATTEMPTS {
            let mut m = Matrix::zeros(field, self.dim(), self.dim());
            for b in &basis {
                m = &m + &b.scale(&field.random(rng));
            }
            if let Some(matrix) = self.cayley_transform(&m) {
                return IsometrySample {
                    matrix,
                    attempts: attempt,
                    fell_back: false,
                };
            }
        }
        IsometrySample {
            matrix: Matrix::identity(field, self.dim()),
            attempts: MAX_CAYLEY_ATTEMPTS,
            fell_back: true,
        }
    }

    /// A hyperbolic basis `(a_i, b_i)` plus an orthogonal anisotropic
    /// remainder, when one can be found over the field.
    pub fn witt_basis(&self) -> WittBasis {
        if self.is_split() {
            return WittBasis::standard(self.kind, self.field(), self.dim());
        }
        match self.kind {
            FormKind::Alternating => self.symplectic_basis(),
            FormKind::Symmetric => self.orthogonal_witt_basis(),
        }
    }

    fn symplectic_basis(&self) -> WittBasis {
        let field = self.field();
        let mut space = unit_vectors(field, self.dim());
        let mut pairs = Vec::new();
        while let Some(a) = space.first().cloned() {
            let w = space
                .iter()
                .find(|w| !self.pair(&a, w).is_zero())
                .expect("alternating form is non-degenerate")
                .clone();
            let b = scale_vec(&w, &self.pair(&a, &w).inv().unwrap());
            space = self.orthogonal_complement_within(&space, &[a.clone(), b.clone()]);
            pairs.push((a, b));
        }
        WittBasis {
            pairs,
            anisotropic: Vec::new(),
        }
    }

    fn orthogonal_witt_basis(&self) -> WittBasis {
        let field = self.field();
        let mut space = unit_vectors(field, self.dim());
        let mut pairs = Vec::new();
        while let Some(a) = self.find_isotropic(&space) {
            let w = space
                .iter()
                .find(|w| !self.pair(&a, w).is_zero())
                .expect("restricted form is non-degenerate")
                .clone();
            let w = scale_vec(&w, &self.pair(&a, &w).inv().unwrap());
            // b = w - (beta(w,w)/2) a is isotropic with beta(a, b) = 1
            let half = field.from_i64(2).inv().unwrap();
            let c = &self.pair(&w, &w) * &half;
            let b = sub_vec(&w, &scale_vec(&a, &c));
            space = self.orthogonal_complement_within(&space, &[a.clone(), b.clone()]);
            pairs.push((a, b));
        }
        WittBasis {
            pairs,
            anisotropic: self.orthogonal_basis(&space),
        }
    }

    /// Basis of `{v in span(space) : beta(v, u) = 0 for u in against}`.
    fn orthogonal_complement_within(&self, space: &[Vec<Scalar>], against: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        let field = self.field();
        // coefficients c with sum_k c_k beta(space_k, u) = 0 for each u
        let m = Matrix::from_fn(field, against.len(), space.len(), |i, k| {
            self.pair(&space[k], &against[i])
        });
        m.kernel_basis()
            .into_iter()
            .map(|c| combine(&c, space, field, self.dim()))
            .collect()
    }

    /// Orthogonal basis of a non-degenerate subspace (char != 2).
    fn orthogonal_basis(&self, space: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        let mut rest = space.to_vec();
        let mut out = Vec::new();
        while !rest.is_empty() {
            let u = match rest.iter().find(|v| !self.pair(v, v).is_zero()) {
                Some(v) => v.clone(),
                None => {
                    let (i, j) = (0..rest.len())
                        .flat_map(|i| (i + 1..rest.len()).map(move |j| (i, j)))
                        .find(|&(i, j)| !self.pair(&rest[i], &rest[j]).is_zero())
                        .expect("restricted form is non-degenerate");
                    add_vec(&rest[i], &rest[j])
                }
            };
            rest = self.orthogonal_complement_within(&rest, std::slice::from_ref(&u));
            out.push(u);
        }
        out
    }

    /// Some nonzero isotropic vector in `span(space)`, if one is found.
    ///
    /// Works on an orthogonal basis `u_i` with `d_i = beta(u_i, u_i)`:
    /// a pair gives one iff `-d_j/d_i` is a square; over a finite field any
    /// three vectors give one via `x^2 d_1 + y^2 d_2 + d_3 = 0`.
    fn find_isotropic(&self, space: &[Vec<Scalar>]) -> Option<Vec<Scalar>> {
        let field = self.field();
        let basis = self.orthogonal_basis(space);
        let d: Vec<Scalar> = basis.iter().map(|u| self.pair(u, u)).collect();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let ratio = (-&d[j]).checked_div(&d[i]).unwrap();
                if let Some(s) = field.sqrt(&ratio) {
                    return Some(add_vec(&scale_vec(&basis[i], &s), &basis[j]));
                }
            }
        }
        if basis.len() < 3 {
            return None;
        }
        let candidates: Vec<Scalar> = match field.elements() {
            Ok(all) => all,
            Err(_) => (-20..=20).map(|n| field.from_i64(n)).collect(),
        };
        for x in &candidates {
            // y^2 = -(d1 x^2 + d3) / d2
            let t = (-&(&(&d[0] * &(x * x)) + &d[2])).checked_div(&d[1]).unwrap();
            if let Some(y) = field.sqrt(&t) {
                let v = add_vec(
                    &add_vec(&scale_vec(&basis[0], x), &scale_vec(&basis[1], &y)),
                    &basis[2],
                );
                return Some(v);
            }
        }
        None
    }

    /// The improper isometry exchanging `a_1` and `b_1` of the Witt basis.
    pub fn hyperbolic_swap(&self) -> Result<Matrix> {
        if self.kind != FormKind::Symmetric {
            return Err(Error::WrongKind {
                expected: "symmetric",
            });
        }
        let witt = self.witt_basis();
        if witt.pairs.is_empty() {
            return Err(Error::InsufficientWittIndex {
                needed: 1,
                available: 0,
            });
        }
        // columns of C are the basis vectors; B = C P C^{-1}
        let cols = witt.all_vectors();
        let field = self.field();
        let f = self.dim();
        let c = Matrix::from_fn(field, f, f, |i, j| cols[j][i].clone());
        let mut swapped = cols.clone();
        swapped.swap(0, 1);
        let cp = Matrix::from_fn(field, f, f, |i, j| swapped[j][i].clone());
        Ok(&cp * &c.inverse()?)
    }
}

const MAX_CAYLEY_ATTEMPTS: usize = 64;

/// Output of [`BilinearForm::random_isometry`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometrySample {
    pub matrix: Matrix,
    pub attempts: usize,
    /// Every Cayley draw was singular and the identity was returned.
    pub fell_back: bool,
}

/// Witt decomposition `F = H_1 + ... + H_m + anisotropic part`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittBasis {
    /// Hyperbolic pairs with `beta(a_i, b_i) = 1`, all other pairings zero.
    pub pairs: Vec<(Vec<Scalar>, Vec<Scalar>)>,
    /// Pairwise orthogonal anisotropic vectors spanning the complement.
    pub anisotropic: Vec<Vec<Scalar>>,
}

impl WittBasis {
    fn standard(kind: FormKind, field: Field, f: usize) -> Self {
        let units = unit_vectors(field, f);
        match kind {
            FormKind::Symmetric => WittBasis {
                pairs: (0..f / 2)
                    .map(|i| (units[i].clone(), units[f - 1 - i].clone()))
                    .collect(),
                anisotropic: if f % 2 == 1 {
                    vec![units[f / 2].clone()]
                } else {
                    Vec::new()
                },
            },
            FormKind::Alternating => WittBasis {
                pairs: (0..f / 2)
                    .map(|i| (units[2 * i].clone(), units[2 * i + 1].clone()))
                    .collect(),
                anisotropic: Vec::new(),
            },
        }
    }

    pub fn index(&self) -> usize {
        self.pairs.len()
    }

    /// `a_1, b_1, a_2, b_2, ..., anisotropic...`
    pub fn all_vectors(&self) -> Vec<Vec<Scalar>> {
        let mut out: Vec<Vec<Scalar>> = self
            .pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        out.extend(self.anisotropic.iter().cloned());
        out
    }

    /// `span(a_1, ..., a_m)`, the reference maximal isotropic subspace.
    pub fn reference_isotropic(&self) -> Vec<Vec<Scalar>> {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }
}

/// Dimensions and form of `E (x) F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceConfig {
    pub e: usize,
    pub f: usize,
    pub form: BilinearForm,
}

impl SpaceConfig {
    pub fn new(e: usize, form: BilinearForm) -> Result<Self> {
        let f = form.dim();
        if e < 1 {
            return Err(Error::InvalidForm("dim E must be at least 1".into()));
        }
        if f < 3 {
            return Err(Error::InvalidForm("dim F must be at least 3".into()));
        }
        Ok(SpaceConfig { e, f, form })
    }

    /// Split form of the given kind.
    pub fn split(kind: FormKind, e: usize, f: usize, field: Field) -> Result<Self> {
        Self::new(e, BilinearForm::split(kind, field, f)?)
    }

    pub fn kind(&self) -> FormKind {
        self.form.kind()
    }

    pub fn field(&self) -> Field {
        self.form.field()
    }

    /// Number of coordinates `ef`.
    pub fn ambient_dim(&self) -> usize {
        self.e * self.f
    }

    pub fn check_shape(&self, phi: &Matrix) -> Result<()> {
        if phi.rows() != self.e || phi.cols() != self.f {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.e, self.f),
                found: format!("{}x{}", phi.rows(), phi.cols()),
            });
        }
        if phi.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }
}

pub(crate) fn unit_vectors(field: Field, n: usize) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { field.one() } else { field.zero() })
                .collect()
        })
        .collect()
}

pub(crate) fn dot(u: &[Scalar], v: &[Scalar], field: Field) -> Scalar {
    u.iter().zip(v).fold(field.zero(), |acc, (a, b)| &acc + &(a * b))
}

pub(crate) fn scale_vec(v: &[Scalar], c: &Scalar) -> Vec<Scalar> {
    v.iter().map(|x| x * c).collect()
}

pub(crate) fn add_vec(u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub(crate) fn sub_vec(u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

fn combine(coeffs: &[Scalar], vectors: &[Vec<Scalar>], field: Field, dim: usize) -> Vec<Scalar> {
    coeffs
        .iter()
        .zip(vectors)
        .fold(vec![field.zero(); dim], |acc, (c, v)| add_vec(&acc, &scale_vec(v, c)))
}
