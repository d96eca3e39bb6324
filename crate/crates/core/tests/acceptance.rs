//! Acceptance criteria. Run with `cargo test -p isodet --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::time::Instant;

use isodet::equations::{component_generators, generic_matrix, span_contains};
use isodet::facts::{facts, CohenMacaulay, Regularity, Tristate};
use isodet::linalg::det_by_expansion;
use isodet::orbits::{
    classify, codimension, congruence_residual, random_orbit_point, representative, solve_congruence,
    valid_params,
};
use isodet::verify::{
    check_closure_order, check_closure_order_with, check_dimensions, check_dimensions_with,
    check_equation_cut, check_equation_cut_with, exhaustive_census, exhaustive_census_with,
    point_count_dimension_estimate_with, SampleOptions, Status, DEFAULT_BUDGET,
};
use isodet::{BilinearForm, Field, FormKind, Matrix, OrbitParams, Polynomial, Scalar, Sign, SpaceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(id: &str, what: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("[PASS] {id} {what}: {detail}"),
        Err(detail) => {
            println!("[FAIL] {id} {what}: {detail}");
            panic!("{id} failed: {detail}");
        }
    }
}

fn split(kind: FormKind, e: usize, f: usize, field: Field) -> SpaceConfig {
    SpaceConfig::split(kind, e, f, field).unwrap()
}

fn grids() -> Vec<(FormKind, usize, usize)> {
    let mut out = Vec::new();
    for kind in [FormKind::Symmetric, FormKind::Alternating] {
        for e in 1..=3 {
            for f in 3..=6 {
                if kind == FormKind::Alternating && f % 2 == 1 {
                    continue;
                }
                out.push((kind, e, f));
            }
        }
    }
    out
}

/// Orbit dimension computed from scratch: the span of `E_ij Phi` and of
/// `Phi b^t` for `b` solving `b^t K + K b = 0`.
fn oracle_orbit_dimension(phi: &Matrix, form: &BilinearForm) -> usize {
    let field = phi.field();
    let (e, f) = (phi.rows(), phi.cols());
    let k = form.gram();
    // linear condition on the f^2 entries of b
    let mut eqs = Vec::new();
    for i in 0..f {
        for j in 0..f {
            let mut row = vec![field.zero(); f * f];
            for m in 0..f {
                // (b^t K)_{ij} = sum_m b_{mi} K_{mj}; (K b)_{ij} = sum_m K_{im} b_{mj}
                row[m * f + i] = &row[m * f + i] + k.get(m, j);
                row[m * f + j] = &row[m * f + j] + k.get(i, m);
            }
            eqs.push(row);
        }
    }
    let lie = Matrix::from_rows(field, eqs).unwrap().kernel_basis();
    let mut images = Vec::new();
    for i in 0..e {
        for j in 0..e {
            let mut v = vec![field.zero(); e * f];
            v[i * f..(i + 1) * f].clone_from_slice(phi.row(j));
            images.push(v);
        }
    }
    for b in lie {
        let b = Matrix::from_rows(field, b.chunks(f).map(|c| c.to_vec()).collect()).unwrap();
        images.push((phi * &b.transpose()).entries().to_vec());
    }
    Matrix::from_rows(field, images).unwrap().rank()
}

#[test]
fn ac1_dimension_formulas() {
    let start = Instant::now();
    let q = Field::rationals();
    let mut classes = 0;
    let mut outcome = Ok(());
    for (kind, e, f) in grids() {
        let config = split(kind, e, f, q);
        let r = check_dimensions(&config).unwrap();
        if !r.passed() {
            outcome = Err(format!("{kind} e={e} f={f}: {:?}", r.status));
            break;
        }
        for p in valid_params(&config) {
            classes += 1;
            let rep = representative(&p, &config).unwrap();
            let oracle = oracle_orbit_dimension(&rep, &config.form);
            let formula = e * f - codimension(&p, &config).unwrap();
            if oracle != formula {
                outcome = Err(format!("{kind} e={e} f={f} {p}: oracle {oracle}, formula {formula}"));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "AC1",
        "dimension formulas",
        outcome.map(|_| format!("{classes} classes on {} grids, exact, {elapsed:.2}s", grids().len())),
    );
}

#[test]
fn ac2_orbit_exhaustion() {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut outcome = Ok(());
    for (kind, p, expected_total) in [(FormKind::Alternating, 3, 6561u128), (FormKind::Symmetric, 5, 390625)] {
        let config = split(kind, 2, 4, Field::prime(p).unwrap());
        let r = exhaustive_census(&config, DEFAULT_BUDGET).unwrap();
        let valid: Vec<String> = valid_params(&config).iter().map(|x| x.to_string()).collect();
        let sum: u128 = valid.iter().map(|k| r.tallies.get(k).copied().unwrap_or(0)).sum();
        let hit = valid.iter().filter(|k| r.tallies.contains_key(*k)).count();
        if !r.passed() || sum != expected_total || sum != (p as u128).pow(8) || hit != valid.len() {
            outcome = Err(format!("{kind} F_{p}: status {:?}, sum {sum}, classes hit {hit}", r.status));
        }
        if kind == FormKind::Symmetric {
            let plus = r.tallies.get("(2,0,+)").copied().unwrap_or(0);
            let minus = r.tallies.get("(2,0,-)").copied().unwrap_or(0);
            if plus == 0 || plus != minus {
                outcome = Err(format!("exceptional tallies {plus} vs {minus}"));
            }
            out.push(format!("F_5 symmetric {sum} matrices, {hit} classes, (2,0,+)=(2,0,-)={plus}"));
        } else {
            out.push(format!("F_3 alternating {sum} matrices, {hit} classes"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "AC2",
        "orbit exhaustion",
        outcome.map(|_| format!("{}; {elapsed:.2}s", out.join("; "))),
    );
}

/// `(rank Phi, rank psi(Phi))` tallies over all of `F_p^{2x4}`, by a plain
/// single-threaded loop.
fn rank_pair_tallies(config: &SpaceConfig) -> BTreeMap<(usize, usize), u64> {
    let field = config.field();
    let p = field.order().unwrap() as u64;
    let n = config.e * config.f;
    let mut tallies = BTreeMap::new();
    for code in 0..p.pow(n as u32) {
        let mut c = code;
        let entries: Vec<Scalar> = (0..n)
            .map(|_| {
                let d = c % p;
                c /= p;
                field.from_i64(d as i64)
            })
            .collect();
        let phi = Matrix::from_rows(field, entries.chunks(config.f).map(|r| r.to_vec()).collect()).unwrap();
        let psi = &(&phi * config.form.gram()) * &phi.transpose();
        *tallies.entry((phi.rank(), psi.rank())).or_default() += 1;
    }
    tallies
}

fn locus_size(tallies: &BTreeMap<(usize, usize), u64>, r1: usize, r2: usize) -> u128 {
    tallies
        .iter()
        .filter(|((a, b), _)| *a <= r1 && *b <= r2)
        .map(|(_, n)| *n as u128)
        .sum()
}

#[test]
fn ac3_defining_equations() {
    let start = Instant::now();
    let mut outcome = Ok(());
    let mut checked = 0;
    for kind in [FormKind::Symmetric, FormKind::Alternating] {
        let config = split(kind, 2, 4, Field::prime(5).unwrap());
        let tallies = rank_pair_tallies(&config);
        for p in valid_params(&config).into_iter().filter(|p| p.sign.is_none()) {
            let r = check_equation_cut(&p, &config, DEFAULT_BUDGET, SampleOptions::default()).unwrap();
            checked += 1;
            let locus = locus_size(&tallies, p.r1, p.r2);
            if !r.passed() || r.mode != isodet::verify::Mode::Exhaustive {
                outcome = Err(format!("{kind} {p}: {:?}", r.status));
            } else if r.tallies["mismatches"] != 0 || r.tallies.get("locus").copied().unwrap_or(0) != locus {
                outcome = Err(format!("{kind} {p}: locus {:?} vs oracle {locus}", r.tallies.get("locus")));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "AC3",
        "set-theoretic defining equations",
        outcome.map(|_| format!("{checked} classes over F_5, 390625 matrices each, 0 mismatches, {elapsed:.2}s")),
    );
}

#[test]
fn ac4_exceptional_components() {
    let start = Instant::now();
    let field = Field::prime(5).unwrap();
    let config = split(FormKind::Symmetric, 2, 4, field);
    let tallies = rank_pair_tallies(&config);
    let mut outcome: Result<(), String> = Ok(());
    for sign in [Sign::Plus, Sign::Minus] {
        let p = OrbitParams::signed(2, 0, sign);
        let r = check_equation_cut(&p, &config, DEFAULT_BUDGET, SampleOptions::default()).unwrap();
        if !r.passed() || r.tallies["mismatches"] != 0 || r.tallies["locus"] != locus_size(&tallies, 2, 0) {
            outcome = Err(format!("{p}: {:?} {:?}", r.status, r.tallies));
        }
    }

    // orthonormal coordinates: det X + det Y and det X - det Y split
    // between the two components
    let ortho = SpaceConfig::new(2, BilinearForm::identity(field, 4).unwrap()).unwrap();
    let x = generic_matrix(&ortho);
    let zero = Polynomial::zero(field, 2, 4);
    let one = Polynomial::constant(field, 2, 4, field.one());
    let block = |c: [usize; 2]| {
        let m: Vec<Vec<Polynomial>> = (0..2).map(|i| c.iter().map(|&j| x[i][j].clone()).collect()).collect();
        det_by_expansion(&m, &zero, &one)
    };
    let (dx, dy) = (block([0, 1]), block([2, 3]));
    let sum = &dx + &dy;
    let diff = &dx - &dy;
    let plus = component_generators(Sign::Plus, &ortho).unwrap();
    let minus = component_generators(Sign::Minus, &ortho).unwrap();
    let has = |set: &isodet::GeneratorSet, q: &Polynomial| span_contains(set.polynomials(), q);
    let split_ok = (has(&plus, &sum) && has(&minus, &diff) && !has(&plus, &diff) && !has(&minus, &sum))
        || (has(&plus, &diff) && has(&minus, &sum) && !has(&plus, &sum) && !has(&minus, &diff));
    if !split_ok {
        outcome = Err("det X +- det Y are not separated by the two V-spans".into());
    }
    // with identity Gram the components also cut correctly
    for sign in [Sign::Plus, Sign::Minus] {
        let r = check_equation_cut(&OrbitParams::signed(2, 0, sign), &ortho, DEFAULT_BUDGET, SampleOptions::default())
            .unwrap();
        if !r.passed() {
            outcome = Err(format!("identity Gram {sign}: {:?}", r.status));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "AC4",
        "exceptional component equations",
        outcome.map(|_| {
            format!(
                "union = (2,0) locus ({}), intersection = (1,0) locus ({}), det X +- det Y separated, {elapsed:.2}s",
                locus_size(&tallies, 2, 0),
                locus_size(&tallies, 1, 0)
            )
        }),
    );
}

fn full_row_rank(field: Field, a: usize, b: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::random(field, a, b, rng);
        if m.rank() == a {
            return m;
        }
    }
}

#[test]
fn ac5_constructive_lemmas() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut outcome = Ok(());
    let mut count = 0;
    for field in [Field::prime(7).unwrap(), Field::prime(11).unwrap(), Field::rationals()] {
        for kind in [FormKind::Symmetric, FormKind::Alternating] {
            for trial in 0..500 {
                let f = match kind {
                    FormKind::Symmetric => 3 + trial % 4,
                    FormKind::Alternating => 4 + 2 * (trial % 2),
                };
                let a_rows = 1 + trial % 3;
                let form = BilinearForm::split(kind, field, f).unwrap();
                let a = full_row_rank(field, a_rows, f, &mut rng);
                let s = Matrix::random(field, a_rows, a_rows, &mut rng);
                let s = match kind {
                    FormKind::Symmetric => &s + &s.transpose(),
                    FormKind::Alternating => &s - &s.transpose(),
                };
                let b = solve_congruence(&s, &a, &form).unwrap();
                // residual recomputed directly as well
                let k = form.gram();
                let direct = &(&(&(&a * k) * &b.transpose()) + &(&(&b * k) * &a.transpose())) - &s;
                if !direct.is_zero() || !congruence_residual(&s, &a, &b, &form).is_zero() {
                    outcome = Err(format!("{kind} over {field}: nonzero residual"));
                }
                count += 1;
            }
        }
    }
    report(
        "AC5",
        "constructive lemmas",
        outcome.map(|_| format!("{count} instances (500 per kind per field), all residuals zero")),
    );
}

fn random_skew(field: Field, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let m = Matrix::random(field, n, n, rng);
    &m - &m.transpose()
}

#[test]
fn ac6_pfaffians() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut outcome = Ok(());
    let fields = [
        Field::prime(7).unwrap(),
        Field::prime(11).unwrap(),
        Field::quadratic(5, None).unwrap(),
        Field::rationals(),
    ];
    for field in fields {
        for n in [2, 4, 6, 8] {
            for _ in 0..200 {
                let a = random_skew(field, n, &mut rng);
                let pf = a.pfaffian().unwrap();
                if &pf * &pf != a.det().unwrap() {
                    outcome = Err(format!("pf^2 != det for size {n} over {field}"));
                }
            }
            let j = BilinearForm::split(FormKind::Alternating, field, n).unwrap();
            if !j.gram().pfaffian().unwrap().is_one() {
                outcome = Err(format!("pf(J) != 1 for size {n} over {field}"));
            }
        }
    }
    report(
        "AC6",
        "Pfaffian correctness",
        outcome.map(|_| "200 skew matrices per size 2,4,6,8 over F_7, F_11, F_25, Q; pf(J) = 1".to_string()),
    );
}

#[test]
fn ac7_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let field = Field::prime(7).unwrap();
    let mut outcome = Ok(());
    let mut checks = 0;
    let mut flips = 0;
    for (kind, e, f) in [
        (FormKind::Symmetric, 2, 4),
        (FormKind::Symmetric, 3, 5),
        (FormKind::Symmetric, 3, 6),
        (FormKind::Alternating, 2, 4),
        (FormKind::Alternating, 3, 6),
    ] {
        let config = split(kind, e, f, field);
        let swap = match kind {
            FormKind::Symmetric => Some(config.form.hyperbolic_swap().unwrap()),
            FormKind::Alternating => None,
        };
        for p in valid_params(&config) {
            let base = random_orbit_point(&p, &config, &mut rng).unwrap();
            for _ in 0..200 {
                let a = Matrix::random_invertible(field, e, &mut rng);
                let sample = config.form.random_isometry(&mut rng);
                let b = sample.matrix;
                if !config.form.is_isometry(&b) || !b.det().unwrap().is_one() {
                    outcome = Err("sampled isometry is not special".to_string());
                }
                let moved = &(&a * &base) * &b.transpose();
                checks += 1;
                if classify(&moved, &config).unwrap() != p {
                    outcome = Err(format!("{kind} e={e} f={f}: class {p} not invariant"));
                }
                if let (Some(sign), Some(swap)) = (p.sign, &swap) {
                    flips += 1;
                    let flipped = &moved * &swap.transpose();
                    if classify(&flipped, &config).unwrap() != OrbitParams::signed(p.r1, p.r2, sign.flip()) {
                        outcome = Err(format!("{kind} e={e} f={f}: swap did not flip {p}"));
                    }
                }
            }
        }
    }
    report(
        "AC7",
        "invariance suite",
        outcome.map(|_| format!("{checks} translates, {flips} sign flips, zero violations")),
    );
}

#[test]
fn ac8_facts_table() {
    use CohenMacaulay as C;
    use FormKind::{Alternating as Alt, Symmetric as Sym};
    struct Row {
        kind: FormKind,
        e: usize,
        f: usize,
        p: OrbitParams,
        normal: bool,
        cm: Option<C>,
        gorenstein: Option<Tristate>,
        sfr: Option<Regularity>,
    }
    let row = |kind, e, f, p, normal, cm, gorenstein, sfr| Row {
        kind,
        e,
        f,
        p,
        normal,
        cm,
        gorenstein,
        sfr,
    };
    let u = OrbitParams::new;
    let s = OrbitParams::signed;
    let rows = [
        // every symplectic orbit closure is normal with rational singularities
        row(Alt, 3, 6, u(2, 0), true, None, None, Some(Regularity::Yes)),
        row(Alt, 4, 6, u(3, 2), true, Some(C::YesIfChar0), None, None),
        // full rank, e < f: Gorenstein
        row(Alt, 3, 4, u(3, 2), true, Some(C::Yes), Some(Tristate::Yes), None),
        // full rank with f >= 2e: strongly F-regular
        row(Alt, 4, 8, u(4, 2), true, Some(C::Yes), Some(Tristate::Yes), Some(Regularity::Yes)),
        // orthogonal non-normal cases, CM iff r1 = e
        row(Sym, 3, 4, u(3, 2), false, Some(C::Yes), None, None),
        row(Sym, 4, 6, u(4, 2), false, Some(C::Yes), None, None),
        row(Sym, 5, 4, u(3, 2), false, Some(C::No), None, None),
        // orthogonal full rank: Gorenstein iff e - r odd or r in {0, e}
        row(Sym, 3, 5, u(3, 2), true, Some(C::Yes), Some(Tristate::Yes), None),
        row(Sym, 3, 5, u(3, 1), false, Some(C::Yes), Some(Tristate::No), None),
        row(Sym, 3, 5, u(3, 3), true, Some(C::Yes), Some(Tristate::Yes), None),
        // r2 = 0 closures are strongly F-regular, including each component
        row(Sym, 3, 4, u(1, 0), true, Some(C::Yes), None, Some(Regularity::Yes)),
        row(Sym, 2, 4, s(2, 0, Sign::Minus), true, Some(C::Yes), None, Some(Regularity::Yes)),
    ];
    let mut outcome = Ok(());
    for r in &rows {
        let config = split(r.kind, r.e, r.f, Field::rationals());
        let x = facts(&r.p, &config).unwrap();
        let ok = x.normal == r.normal
            && x.rational_singularities_char0 == r.normal
            && r.cm.is_none_or(|c| c == x.cohen_macaulay)
            && r.gorenstein.is_none_or(|g| g == x.gorenstein)
            && r.sfr.is_none_or(|s| s == x.strongly_f_regular);
        if !ok {
            outcome = Err(format!("{} e={} f={} {}: got {x:?}", r.kind, r.e, r.f, r.p));
        }
    }
    report("AC8", "facts table fidelity", outcome.map(|_| format!("{} rows match", rows.len())));
}

#[test]
fn ac9_mutation_sanity() {
    let mut lines = Vec::new();
    let mut outcome = Ok(());
    let f5 = Field::prime(5).unwrap();
    let config = split(FormKind::Alternating, 2, 4, Field::prime(3).unwrap());

    let census = exhaustive_census_with(&config, DEFAULT_BUDGET, &|phi: &Matrix| {
        let p = classify(phi, &config)?;
        Ok(if p.r1 == 1 { OrbitParams::new(1, 1) } else { p })
    })
    .unwrap();
    lines.push(("census (misclassify rank 1)", census.witness().is_some()));

    let sym5 = split(FormKind::Symmetric, 2, 4, f5);
    let p = OrbitParams::new(1, 1);
    let mut gens = isodet::equations::generators(&p, &sym5).unwrap();
    // minor(12|12); rows a1, a2 then escape detection
    gens.remove(0);
    let cut = check_equation_cut_with(&p, &sym5, DEFAULT_BUDGET, SampleOptions::default(), &gens).unwrap();
    lines.push(("cut (drop a minor)", cut.witness().is_some()));

    let alt5 = split(FormKind::Alternating, 2, 4, f5);
    let p = OrbitParams::new(2, 0);
    let mut gens = isodet::equations::generators(&p, &alt5).unwrap();
    gens.remove(0);
    let cut = check_equation_cut_with(&p, &alt5, DEFAULT_BUDGET, SampleOptions::default(), &gens).unwrap();
    lines.push(("cut (drop the Pfaffian)", cut.witness().is_some()));

    let p = OrbitParams::signed(2, 0, Sign::Plus);
    let mut gens = isodet::equations::generators(&p, &sym5).unwrap();
    let last = gens.len() - 1;
    gens.remove(last);
    let cut = check_equation_cut_with(&p, &sym5, DEFAULT_BUDGET, SampleOptions::default(), &gens).unwrap();
    lines.push(("cut (drop a component equation)", cut.witness().is_some()));

    let q = Field::rationals();
    for (kind, e, f) in [(FormKind::Alternating, 3, 6), (FormKind::Symmetric, 3, 5)] {
        let cfg = split(kind, e, f, q);
        let honest = check_dimensions(&cfg).unwrap();
        let bumped = check_dimensions_with(&cfg, &|p, c| codimension(p, c).map(|x| x + 1)).unwrap();
        let non_dense = valid_params(&cfg)
            .iter()
            .filter(|p| codimension(p, &cfg).unwrap() > 0)
            .count() as u128;
        // with +1 every class fails: dense classes get a negative formula
        let all_flagged = bumped.tallies["mismatches"] >= non_dense;
        lines.push((
            if kind == FormKind::Alternating { "dims alternating (codim + 1)" } else { "dims symmetric (codim + 1)" },
            honest.passed() && bumped.witness().is_some() && all_flagged,
        ));
    }

    let opts = SampleOptions { per_orbit: 20, seed: 1 };
    let honest = check_closure_order(&sym5, opts).unwrap();
    let swapped = check_closure_order_with(&sym5, opts, &|a, b| {
        Ok(a.r1 <= b.r1 && a.r2 <= b.r2)
    })
    .unwrap();
    lines.push(("closure (ignore component signs)", honest.passed() && swapped.witness().is_some()));

    let configs = [
        split(FormKind::Alternating, 2, 4, Field::prime(3).unwrap()),
        split(FormKind::Alternating, 2, 4, f5),
    ];
    let counts = point_count_dimension_estimate_with(&OrbitParams::new(2, 0), &configs, DEFAULT_BUDGET, &|_, _| Ok(3))
        .unwrap();
    lines.push((
        "counts (dimension 3), heuristic so WARN",
        matches!(counts.status, Status::Warn { .. }),
    ));

    for (name, ok) in &lines {
        if !ok {
            outcome = Err(format!("mutation not detected: {name}"));
        }
    }
    let names: Vec<&str> = lines.iter().map(|(n, _)| *n).collect();
    report(
        "AC9",
        "mutation sanity",
        outcome.map(|_| format!("{} mutations caught: {}", lines.len(), names.join(", "))),
    );
}
