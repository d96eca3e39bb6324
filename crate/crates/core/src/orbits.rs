//! Orbits of `GL(E) x Sp(F)` and `GL(E) x SO(F)` on `E (x) F`.
//!
//! An orbit is labelled by `(r1, r2)`: the rank of `Phi` and the rank of
//! `psi(Phi)`. For a symmetric form with `f` even the label `(f/2, 0)`
//! carries a sign: maximal isotropic row spaces fall into two `SO(F)`
//! families, told apart by the parity of their intersection with the
//! reference subspace `L0 = span(a_1, ..., a_{f/2})`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{add_vec, sub_vec, FormKind, SpaceConfig};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Orbit label `(r1, r2[, sign])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitParams {
    pub r1: usize,
    pub r2: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

impl OrbitParams {
    pub fn new(r1: usize, r2: usize) -> Self {
        OrbitParams { r1, r2, sign: None }
    }

    pub fn signed(r1: usize, r2: usize, sign: Sign) -> Self {
        OrbitParams {
            r1,
            r2,
            sign: Some(sign),
        }
    }

    /// Whether `(r1, r2)` is the label that splits into two components.
    pub fn is_exceptional_pair(r1: usize, r2: usize, config: &SpaceConfig) -> bool {
        config.kind() == FormKind::Symmetric && config.f % 2 == 0 && r1 == config.f / 2 && r2 == 0
    }

    pub fn is_exceptional(&self, config: &SpaceConfig) -> bool {
        Self::is_exceptional_pair(self.r1, self.r2, config)
    }

    pub fn validate(&self, config: &SpaceConfig) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidParams {
                params: self.to_string(),
                reason: reason.to_string(),
            })
        };
        let (r1, r2) = (self.r1, self.r2);
        if r2 > r1 || r1 > config.e {
            return fail("need 0 <= r2 <= r1 <= e");
        }
        if 2 * r1 > config.f + r2 {
            return fail("need 2 r1 - r2 <= f");
        }
        if config.kind() == FormKind::Alternating && r2 % 2 == 1 {
            return fail("r2 must be even for an alternating form");
        }
        match (self.is_exceptional(config), self.sign) {
            (true, None) => Err(Error::ExceptionalNeedsSign { r1, r2 }),
            (false, Some(_)) => fail("a sign is only allowed for (f/2, 0) with a symmetric form"),
            _ => Ok(()),
        }
    }

    /// Drops the sign.
    pub fn unsigned(&self) -> OrbitParams {
        OrbitParams::new(self.r1, self.r2)
    }
}

impl fmt::Display for OrbitParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Some(s) => write!(f, "({},{},{})", self.r1, self.r2, s),
            None => write!(f, "({},{})", self.r1, self.r2),
        }
    }
}

/// Parses `r1,r2` or `r1,r2,+` / `r1,r2,-` (parentheses optional).
impl FromStr for OrbitParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = || Error::Format(format!("cannot parse orbit parameters {s:?}"));
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| fail());
        match parts.as_slice() {
            [a, b] => Ok(OrbitParams::new(num(a)?, num(b)?)),
            [a, b, "+"] => Ok(OrbitParams::signed(num(a)?, num(b)?, Sign::Plus)),
            [a, b, "-"] => Ok(OrbitParams::signed(num(a)?, num(b)?, Sign::Minus)),
            _ => Err(fail()),
        }
    }
}

/// All orbit labels, ordered by `(r1, r2)` with `+` before `-`.
pub fn valid_params(config: &SpaceConfig) -> Vec<OrbitParams> {
    let mut out = Vec::new();
    for r1 in 0..=config.e {
        for r2 in 0..=r1 {
            if OrbitParams::is_exceptional_pair(r1, r2, config) {
                out.push(OrbitParams::signed(r1, r2, Sign::Plus));
                out.push(OrbitParams::signed(r1, r2, Sign::Minus));
            } else if OrbitParams::new(r1, r2).validate(config).is_ok() {
                out.push(OrbitParams::new(r1, r2));
            }
        }
    }
    out
}

/// Orbit label of `Phi`.
pub fn classify(phi: &Matrix, config: &SpaceConfig) -> Result<OrbitParams> {
    config.check_shape(phi)?;
    let r1 = phi.rank();
    let r2 = config.form.isotropic_rank(phi)?;
    if !OrbitParams::is_exceptional_pair(r1, r2, config) {
        return Ok(OrbitParams::new(r1, r2));
    }
    let m = config.f / 2;
    let witt = config.form.witt_basis();
    if witt.index() < m {
        return Err(Error::SignUndefinedForForm);
    }
    let field = config.field();
    let l0 = Matrix::from_rows(field, witt.reference_isotropic())?;
    // dim(U n L0) = dim U + dim L0 - dim(U + L0)
    let meet = r1 + m - phi.vstack(&l0).rank();
    let sign = if (m - meet) % 2 == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Ok(OrbitParams::signed(r1, r2, sign))
}

/// A canonical point of the orbit.
///
/// Rows: `a_1..a_k` (k = r1 - r2), then for a symmetric form the anisotropic
/// vectors `a_j + b_j, a_j - b_j` (j > k) followed by the anisotropic part of
/// the Witt basis; for an alternating form the pairs `a_j, b_j`. Remaining
/// rows are zero. Sign `-` replaces `a_{f/2}` by `b_{f/2}`.
pub fn representative(params: &OrbitParams, config: &SpaceConfig) -> Result<Matrix> {
    params.validate(config)?;
    let field = config.field();
    let witt = config.form.witt_basis();
    let k = params.r1 - params.r2;
    let mut rows: Vec<Vec<_>> = Vec::with_capacity(config.e);
    let insufficient = |needed| Error::InsufficientWittIndex {
        needed,
        available: witt.index(),
    };
    match config.kind() {
        FormKind::Symmetric => {
            if witt.index() < k {
                return Err(insufficient(k));
            }
            rows.extend(witt.pairs[..k].iter().map(|(a, _)| a.clone()));
            let mut anisotropic = witt.pairs[k..]
                .iter()
                .flat_map(|(a, b)| [add_vec(a, b), sub_vec(a, b)])
                .chain(witt.anisotropic.iter().cloned());
            for _ in 0..params.r2 {
                let v = anisotropic.next().ok_or_else(|| {
                    // the orthogonal complement of the first k isotropic
                    // vectors is too small
                    insufficient(k + params.r2.div_ceil(2))
                })?;
                rows.push(v);
            }
        }
        FormKind::Alternating => {
            let pairs = params.r2 / 2;
            if witt.index() < k + pairs {
                return Err(insufficient(k + pairs));
            }
            rows.extend(witt.pairs[..k].iter().map(|(a, _)| a.clone()));
            for (a, b) in &witt.pairs[k..k + pairs] {
                rows.push(a.clone());
                rows.push(b.clone());
            }
        }
    }
    if params.sign == Some(Sign::Minus) {
        let m = config.f / 2;
        rows[m - 1] = witt.pairs[m - 1].1.clone();
    }
    while rows.len() < config.e {
        rows.push(vec![field.zero(); config.f]);
    }
    Matrix::from_rows(field, rows)
}

fn binomial2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Codimension of the orbit closure in `E (x) F`.
pub fn codimension(params: &OrbitParams, config: &SpaceConfig) -> Result<usize> {
    params.validate(config)?;
    let (e, f, r1, r2) = (config.e, config.f, params.r1, params.r2);
    let base = (e - r1) * (f - r1);
    Ok(match config.kind() {
        FormKind::Alternating => base + binomial2(r1 - r2),
        FormKind::Symmetric => base + binomial2(r1 - r2 + 1),
    })
}

pub fn dimension(params: &OrbitParams, config: &SpaceConfig) -> Result<usize> {
    Ok(config.ambient_dim() - codimension(params, config)?)
}

/// Whether the orbit `p` lies in the closure of the orbit `q`.
pub fn closure_leq(p: &OrbitParams, q: &OrbitParams, config: &SpaceConfig) -> Result<bool> {
    if p.validate(config).is_err() || q.validate(config).is_err() {
        return Err(Error::ConfigMismatch);
    }
    if p.r1 > q.r1 || p.r2 > q.r2 {
        return Ok(false);
    }
    Ok(match (p.sign, q.sign) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    })
}

/// Dimension of the tangent space to the orbit at `Phi`: the rank of
/// `(a, b) -> a Phi + Phi b^t` over `gl(E) + lie(form)`.
pub fn tangent_dimension(phi: &Matrix, config: &SpaceConfig) -> Result<usize> {
    config.check_shape(phi)?;
    let (e, f) = (config.e, config.f);
    let field = config.field();
    let mut images: Vec<Vec<_>> = Vec::new();
    for i in 0..e {
        for j in 0..e {
            // E_ij Phi puts row j of Phi into row i
            let mut v = vec![field.zero(); e * f];
            for c in 0..f {
                v[i * f + c] = phi.get(j, c).clone();
            }
            images.push(v);
        }
    }
    for b in config.form.lie_basis() {
        images.push((phi * &b.transpose()).entries().to_vec());
    }
    Ok(Matrix::from_rows(field, images)?.rank())
}

/// `A * representative * B^t` for random `A` in `GL(E)` and a random
/// special isometry `B`.
pub fn random_orbit_point<R: Rng + ?Sized>(
    params: &OrbitParams,
    config: &SpaceConfig,
    rng: &mut R,
) -> Result<Matrix> {
    let rep = representative(params, config)?;
    Ok(act(&rep, config, rng))
}

/// Random group translate of `Phi`.
pub fn act<R: Rng + ?Sized>(phi: &Matrix, config: &SpaceConfig, rng: &mut R) -> Matrix {
    let a = Matrix::random_invertible(config.field(), config.e, rng);
    let b = config.form.random_isometry(rng).matrix;
    &(&a * phi) * &b.transpose()
}

/// Solves `S = A K B^t + B K A^t` for `B`, with `A` of full row rank.
///
/// Alternating: `S = X - X^t` with `X` the strict upper triangle of `S`,
/// `Y` a left inverse of `K A^t`, `B = X Y`. Symmetric: `B = S Y / 2`.
pub fn solve_congruence(s: &Matrix, a: &Matrix, form: &crate::forms::BilinearForm) -> Result<Matrix> {
    let rows = a.rows();
    if a.cols() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} columns", form.dim()),
            found: format!("{} columns", a.cols()),
        });
    }
    if s.rows() != rows || s.cols() != rows {
        return Err(Error::DimensionMismatch {
            expected: format!("{rows}x{rows}"),
            found: format!("{}x{}", s.rows(), s.cols()),
        });
    }
    let y = (form.gram() * &a.transpose()).left_inverse()?;
    match form.kind() {
        FormKind::Alternating => {
            if !s.is_alternating() {
                return Err(Error::SymmetryMismatch {
                    expected: "skew-symmetric",
                });
            }
            let field = s.field();
            let x = Matrix::from_fn(field, rows, rows, |i, j| {
                if i < j {
                    s.get(i, j).clone()
                } else {
                    field.zero()
                }
            });
            Ok(&x * &y)
        }
        FormKind::Symmetric => {
            if !s.is_symmetric() {
                return Err(Error::SymmetryMismatch {
                    expected: "symmetric",
                });
            }
            let half = s.field().from_i64(2).inv().ok_or(Error::CharTwoUnsupported)?;
            Ok((s * &y).scale(&half))
        }
    }
}

/// `A K B^t + B K A^t - S`.
pub fn congruence_residual(
    s: &Matrix,
    a: &Matrix,
    b: &Matrix,
    form: &crate::forms::BilinearForm,
) -> Matrix {
    let k = form.gram();
    let lhs = &(&(a * k) * &b.transpose()) + &(&(b * k) * &a.transpose());
    &lhs - s
}

/// Orders orbit labels for display: by dimension of the closure, then label.
pub fn cmp_by_dimension(p: &OrbitParams, q: &OrbitParams, config: &SpaceConfig) -> Ordering {
    let d = |x: &OrbitParams| dimension(x, config).unwrap_or(0);
    d(p).cmp(&d(q)).then(p.cmp(q))
}
