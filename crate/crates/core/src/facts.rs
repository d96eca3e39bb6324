//! Singularity properties of orbit closures, as known from the literature.
//!
//! These are transcribed statements, not computations. Anything not
//! explicitly established is reported as unknown.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forms::{FormKind, SpaceConfig};
use crate::orbits::{codimension, OrbitParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohenMacaulay {
    Yes,
    No,
    YesIfChar0,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tristate {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regularity {
    Yes,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitFacts {
    pub dim: usize,
    pub codim: usize,
    pub normal: bool,
    pub cohen_macaulay: CohenMacaulay,
    pub rational_singularities_char0: bool,
    pub gorenstein: Tristate,
    pub strongly_f_regular: Regularity,
}

impl fmt::Display for CohenMacaulay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CohenMacaulay::Yes => "yes",
            CohenMacaulay::No => "no",
            CohenMacaulay::YesIfChar0 => "yes (char 0)",
            CohenMacaulay::Unknown => "?",
        })
    }
}

impl fmt::Display for Tristate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tristate::Yes => "yes",
            Tristate::No => "no",
            Tristate::Unknown => "?",
        })
    }
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularity::Yes => "yes",
            Regularity::Unknown => "?",
        })
    }
}

/// Whether `O_{r1,r2}` is normal. For a symmetric form this fails exactly
/// when `r2 = 2 r1 - f` with `0 < r2 < r1`.
pub fn is_normal(kind: FormKind, f: usize, r1: usize, r2: usize) -> bool {
    match kind {
        FormKind::Alternating => true,
        FormKind::Symmetric => r2 + f != 2 * r1 || r2 == 0 || r2 == r1,
    }
}

/// Looks up the known properties of the closure of the orbit `params`.
pub fn facts(params: &OrbitParams, config: &SpaceConfig) -> Result<OrbitFacts> {
    let codim = codimension(params, config)?;
    let dim = config.ambient_dim() - codim;
    let (e, f, r1, r2) = (config.e, config.f, params.r1, params.r2);
    let kind = config.kind();
    let dense = codim == 0;
    let point = r1 == 0;
    let full = r1 == e && e < f;
    let normal = is_normal(kind, f, r1, r2);

    let (sfr, gorenstein) = match kind {
        FormKind::Alternating => {
            let sfr = r2 == 0 || r1 == r2 || dense || (r1 == e && f >= 2 * e);
            let gor = if dense || full || point {
                Tristate::Yes
            } else {
                Tristate::Unknown
            };
            (sfr, gor)
        }
        FormKind::Symmetric => {
            let sfr = r2 == 0 || r1 == r2 || dense || (r1 == e && f >= 2 * e && (e - r2) % 2 == 1);
            let gor = if dense || point {
                Tristate::Yes
            } else if params.is_exceptional(config) {
                // the statement concerns the union of both components
                Tristate::Unknown
            } else if full {
                if (e - r2) % 2 == 1 || r2 == 0 || r2 == e {
                    Tristate::Yes
                } else {
                    Tristate::No
                }
            } else {
                Tristate::Unknown
            };
            (sfr, gor)
        }
    };

    let cohen_macaulay = if !normal {
        if r1 == e {
            CohenMacaulay::Yes
        } else {
            CohenMacaulay::No
        }
    } else if sfr || gorenstein == Tristate::Yes || full {
        CohenMacaulay::Yes
    } else {
        CohenMacaulay::YesIfChar0
    };

    Ok(OrbitFacts {
        dim,
        codim,
        normal,
        cohen_macaulay,
        rational_singularities_char0: normal,
        gorenstein,
        strongly_f_regular: if sfr {
            Regularity::Yes
        } else {
            Regularity::Unknown
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Field;
    use crate::orbits::{valid_params, Sign};

    fn cfg(kind: FormKind, e: usize, f: usize) -> SpaceConfig {
        SpaceConfig::split(kind, e, f, Field::rationals()).unwrap()
    }

    #[test]
    fn alternating_always_normal() {
        for e in 1..=5 {
            for f in [4, 6, 8] {
                let config = cfg(FormKind::Alternating, e, f);
                for p in valid_params(&config) {
                    let facts = facts(&p, &config).unwrap();
                    assert!(facts.normal);
                    assert!(facts.rational_singularities_char0);
                }
            }
        }
    }

    #[test]
    fn non_normal_examples() {
        let config = cfg(FormKind::Symmetric, 3, 4);
        let x = facts(&OrbitParams::new(3, 2), &config).unwrap();
        assert!(!x.normal);
        assert_eq!(x.cohen_macaulay, CohenMacaulay::Yes);

        let config = cfg(FormKind::Symmetric, 4, 6);
        let x = facts(&OrbitParams::new(4, 2), &config).unwrap();
        assert!(!x.normal);
        assert_eq!(x.cohen_macaulay, CohenMacaulay::Yes);

        let config = cfg(FormKind::Symmetric, 5, 4);
        let x = facts(&OrbitParams::new(3, 2), &config).unwrap();
        assert!(!x.normal);
        assert_eq!(x.cohen_macaulay, CohenMacaulay::No);
    }

    #[test]
    fn regularity_implies_cohen_macaulay() {
        for kind in [FormKind::Symmetric, FormKind::Alternating] {
            for e in 1..=6 {
                for f in 3..=8 {
                    if kind == FormKind::Alternating && f % 2 == 1 {
                        continue;
                    }
                    let config = cfg(kind, e, f);
                    for p in valid_params(&config) {
                        let x = facts(&p, &config).unwrap();
                        if x.strongly_f_regular == Regularity::Yes {
                            assert_eq!(x.cohen_macaulay, CohenMacaulay::Yes, "{kind} {e} {f} {p}");
                        }
                        if x.gorenstein == Tristate::Yes {
                            assert_eq!(x.cohen_macaulay, CohenMacaulay::Yes);
                        }
                        assert_eq!(x.rational_singularities_char0, x.normal);
                        assert_eq!(x.dim + x.codim, e * f);
                    }
                }
            }
        }
    }

    #[test]
    fn exceptional_components_share_facts() {
        let config = cfg(FormKind::Symmetric, 3, 6);
        let plus = facts(&OrbitParams::signed(3, 0, Sign::Plus), &config).unwrap();
        let minus = facts(&OrbitParams::signed(3, 0, Sign::Minus), &config).unwrap();
        assert_eq!(plus, minus);
        assert!(plus.normal);
        assert_eq!(plus.gorenstein, Tristate::Unknown);
    }

    #[test]
    fn json_spelling() {
        let config = cfg(FormKind::Symmetric, 3, 4);
        let x = facts(&OrbitParams::new(2, 1), &config).unwrap();
        let json = serde_json::to_value(&x).unwrap();
        assert_eq!(json["cohen_macaulay"], "yes-if-char0");
        assert_eq!(json["strongly_f_regular"], "unknown");
    }
}
