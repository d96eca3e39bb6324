//! The orbit atlas: one row per orbit with dimensions, singularity data and
//! the shape of the defining equations.

use isodet::equations::{inventory, InventoryEntry};
use isodet::facts::{facts, OrbitFacts};
use isodet::orbits::valid_params;
use isodet::verify::ConfigSummary;
use isodet::{FormKind, OrbitParams, Result, SpaceConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasRow {
    pub params: OrbitParams,
    pub facts: OrbitFacts,
    pub generators: Vec<InventoryEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atlas {
    pub config: ConfigSummary,
    pub rows: Vec<AtlasRow>,
    pub footnotes: Vec<String>,
}

pub fn build(config: &SpaceConfig) -> Result<Atlas> {
    let mut rows = Vec::new();
    for params in valid_params(config) {
        rows.push(AtlasRow {
            params,
            facts: facts(&params, config)?,
            generators: inventory(&params, config)?,
        });
    }
    let mut footnotes = vec![
        "?: not settled by known results; no guess is made".to_string(),
        "CM = Cohen-Macaulay, RS0 = rational singularities in characteristic 0, Gor = Gorenstein, SFR = strongly F-regular".to_string(),
    ];
    if config.kind() == FormKind::Symmetric {
        footnotes.push(
            "normality fails exactly when r2 = 2r1 - f with 0 < r2 < r1".to_string(),
        );
        if config.f % 2 == 0 && config.f / 2 <= config.e {
            footnotes.push(format!(
                "({},0,+) and ({},0,-) are the two components of the rank locus ({},0); Gor is left open for each component",
                config.f / 2,
                config.f / 2,
                config.f / 2
            ));
        }
    }
    Ok(Atlas {
        config: ConfigSummary::of(config),
        rows,
        footnotes,
    })
}

fn family_short(family: &str) -> &str {
    match family {
        "minors" => "minor",
        "psi-minors" => "psi-minor",
        "psi-pfaffians" => "psi-pf",
        "quadratic-invariants" => "psi-entry",
        "component" => "V",
        other => other,
    }
}

fn inventory_text(entries: &[InventoryEntry]) -> String {
    if entries.is_empty() {
        return "none".to_string();
    }
    entries
        .iter()
        .map(|x| format!("{}x{}[deg {}]", x.count, family_short(&x.family), x.degree))
        .collect::<Vec<_>>()
        .join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_text(atlas: &Atlas) -> String {
    let c = &atlas.config;
    let mut out = format!(
        "orbits of GL({}) x {}({}) over {} ({} Gram)\n",
        c.e,
        if c.kind == "alternating" { "Sp" } else { "SO" },
        c.f,
        c.field,
        c.gram
    );
    let header = [
        "class", "dim", "codim", "normal", "CM", "RS0", "Gor", "SFR", "generators",
    ];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for row in &atlas.rows {
        let f = &row.facts;
        table.push(vec![
            row.params.to_string(),
            f.dim.to_string(),
            f.codim.to_string(),
            yes_no(f.normal).to_string(),
            f.cohen_macaulay.to_string(),
            yes_no(f.rational_singularities_char0).to_string(),
            f.gorenstein.to_string(),
            f.strongly_f_regular.to_string(),
            inventory_text(&row.generators),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|j| table.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    for r in &table {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (cell, w))| if j + 1 == r.len() { cell.clone() } else { format!("{cell:<w$}") })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    for note in &atlas.footnotes {
        out.push_str(&format!("  * {note}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use isodet::facts::CohenMacaulay;
    use isodet::{Field, Sign};

    fn cfg(kind: FormKind, e: usize, f: usize) -> SpaceConfig {
        SpaceConfig::split(kind, e, f, Field::rationals()).unwrap()
    }

    #[test]
    fn alternating_rows_are_normal() {
        let atlas = build(&cfg(FormKind::Alternating, 2, 4)).unwrap();
        assert_eq!(atlas.rows.len(), 4);
        assert!(atlas.rows.iter().all(|r| r.facts.normal));
    }

    #[test]
    fn symmetric_non_normal_row() {
        let atlas = build(&cfg(FormKind::Symmetric, 3, 4)).unwrap();
        let row = atlas.rows.iter().find(|r| r.params == OrbitParams::new(3, 2)).unwrap();
        assert!(!row.facts.normal);
        assert_eq!(row.facts.cohen_macaulay, CohenMacaulay::Yes);
        let text = render_text(&atlas);
        assert!(text.contains("(3,2)"));
    }

    #[test]
    fn exceptional_rows_agree() {
        let atlas = build(&cfg(FormKind::Symmetric, 2, 4)).unwrap();
        let plus = atlas.rows.iter().find(|r| r.params == OrbitParams::signed(2, 0, Sign::Plus)).unwrap();
        let minus = atlas.rows.iter().find(|r| r.params == OrbitParams::signed(2, 0, Sign::Minus)).unwrap();
        assert_eq!(plus.facts, minus.facts);
        assert_eq!(plus.generators, minus.generators);
    }

    #[test]
    fn json_round_trip_regenerates_text() {
        let atlas = build(&cfg(FormKind::Symmetric, 3, 6)).unwrap();
        let json = serde_json::to_string(&atlas).unwrap();
        let back: Atlas = serde_json::from_str(&json).unwrap();
        assert_eq!(back, atlas);
        assert_eq!(render_text(&back), render_text(&atlas));
    }
}
