//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segre_core::classify::{defective_scan, tensor_power_bounds, ClassifyConfig};
use segre_core::ffrank::{terracini_oracle, terracini_rank, FieldConfig, OracleResult, DEFAULT_PRIME};
use segre_core::induction::catalog::small_format_false_list;
use segre_core::induction::table::{self, SmallTable, TableEntry};
use segre_core::induction::{prove, verify, SearchBudget, Verdict};
use segre_core::{Abundance, Format, Statement};

fn st(s: &str) -> Statement {
    s.parse().unwrap()
}

fn forced() -> FieldConfig {
    FieldConfig {
        force: true,
        ..FieldConfig::default()
    }
}

fn oracle(s: &str) -> OracleResult {
    terracini_oracle(&st(s), &forced()).unwrap()
}

fn report(n: u32, failures: &[String], elapsed: Duration, limit: Duration) {
    let mut failures = failures.to_vec();
    if elapsed > limit {
        failures.push(format!("took {elapsed:?}, limit {limit:?}"));
    }
    if failures.is_empty() {
        println!("criterion {n}: PASS ({elapsed:.2?})");
    } else {
        println!("criterion {n}: FAIL ({elapsed:.2?})");
        for f in &failures {
            println!("  {f}");
        }
        panic!("criterion {n} failed: {failures:?}");
    }
}

#[test]
fn criterion_1_oracle_dimension_table() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let cases = [
        ("T(3,3,3;6)", 59, false),
        ("T(3,3,3;7)", 63, true),
        ("T(5,5,5;13)", 207, false),
        ("T(5,5,5;14)", 215, true),
        ("T(4,4,7;12)", 191, false),
        ("T(4,4,7;13)", 199, true),
    ];
    for (s, proj, fills) in cases {
        let one = Instant::now();
        let r = oracle(s);
        let stm = st(s);
        if !r.is_true() || r.rank() as i64 - 1 != proj {
            bad.push(format!("{s}: projective {} (certified {}), want {proj}", r.rank() as i64 - 1, r.is_true()));
        }
        if fills != (r.rank() as u128 == stm.ambient_dim()) {
            bad.push(format!("{s}: fill expectation {fills} violated"));
        }
        if one.elapsed() > Duration::from_secs(1) {
            bad.push(format!("{s}: {:?} > 1 s", one.elapsed()));
        }
    }
    report(1, &bad, t.elapsed(), Duration::from_secs(6));
}

#[test]
fn criterion_2_defective_values() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let r = oracle("T(2,3,3;5)");
    if r.is_true() || r.rank() != 44 {
        bad.push(format!("T(2,3,3;5): rank {}, want 44 (proj 43)", r.rank()));
    }
    let r = oracle("T(2,2,2;4)");
    if r.is_true() || r.rank() != 26 {
        bad.push(format!("T(2,2,2;4): rank {}, want 26 (proj 25)", r.rank()));
    }
    for n in 1..=4u32 {
        let f = Format::new(vec![1, 1, n, n]).unwrap();
        let ambient = f.ambient_dim() as u64;
        for s in 1..=2 * n + 2 {
            let stm = Statement::secant(f.clone(), s).unwrap();
            let res = terracini_oracle(&stm, &forced()).unwrap();
            let expected = stm.target_dim() as u64;
            let ok = if s == 2 * n + 1 {
                !res.is_true() && ambient - res.rank() == 2 && expected == ambient - 1
            } else if s == 2 * n + 2 {
                res.is_true() && res.rank() == ambient
            } else {
                res.is_true()
            };
            if !ok {
                bad.push(format!("(1,1,{n},{n}) s={s}: rank {} expected {expected} ambient {ambient}", res.rank()));
            }
        }
    }
    report(2, &bad, t.elapsed(), Duration::from_secs(5));
}

fn exceptions(rows: &[segre_core::classify::SecantRow], s: u32) -> BTreeSet<Vec<u32>> {
    rows.iter().filter(|r| r.s == s).map(|r| r.format.ascending()).collect()
}

fn set(xs: &[&[u32]]) -> BTreeSet<Vec<u32>> {
    xs.iter().map(|x| x.to_vec()).collect()
}

#[test]
fn criterion_3_classification_sweeps() {
    let t = Instant::now();
    let cfg = ClassifyConfig::default();
    let mut bad = Vec::new();
    let k3 = defective_scan(&[3], 6, 6, &cfg);
    let k45 = defective_scan(&[4, 5], 3, 6, &cfg);
    let want3: [(u32, BTreeSet<Vec<u32>>); 6] = [
        (1, set(&[])),
        (2, set(&[])),
        (3, set(&[&[1, 1, 3], &[1, 1, 4], &[1, 1, 5], &[1, 1, 6]])),
        (4, set(&[&[1, 2, 4], &[1, 2, 5], &[1, 2, 6], &[2, 2, 2]])),
        (5, set(&[&[2, 3, 3], &[1, 2, 5], &[1, 2, 6], &[1, 3, 5], &[1, 3, 6]])),
        (6, set(&[&[1, 3, 6], &[1, 4, 6], &[2, 2, 6]])),
    ];
    for (s, want) in &want3 {
        let got = exceptions(&k3, *s);
        if &got != want {
            bad.push(format!("k=3 sigma_{s}: got {got:?}, want {want:?}"));
        }
    }
    for s in 1..=6 {
        let want = match s {
            3 => set(&[&[1, 1, 1, 1]]),
            5 => set(&[&[1, 1, 2, 2]]),
            _ => set(&[]),
        };
        let got = exceptions(&k45, s);
        if got != want {
            bad.push(format!("k=4,5 sigma_{s}: got {got:?}, want {want:?}"));
        }
    }
    for r in k3.iter().chain(&k45) {
        if !matches!(r.status, segre_core::classify::Status::Defective(_)) {
            bad.push(format!("{} s={}: {} is not a proven defect", r.format, r.s, r.status));
        }
    }
    report(3, &bad, t.elapsed(), Duration::from_secs(120));
}

#[test]
fn criterion_4_small_format_tables() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let table = SmallTable::build(&forced());
    let listed: Vec<&Statement> = small_format_false_list().iter().map(|e| &e.statement).collect();
    for s in &listed {
        match table.lookup(s) {
            Some(TableEntry::Deficient(_)) => {}
            Some(TableEntry::True(_)) => bad.push(format!("listed {s} certified by the oracle")),
            None => bad.push(format!("listed {s} outside the table domain")),
        }
    }
    let (mut checked, mut tight) = (0, 0);
    for s in table::domain() {
        if s.dims().contains(&0) || listed.contains(&&s) {
            continue;
        }
        checked += 1;
        if s.param_count() <= s.ambient_dim() {
            tight += 1;
        }
        if let Some(TableEntry::Deficient(w)) = table.lookup(&s) {
            let again = terracini_oracle(&s, &forced()).unwrap();
            bad.push(format!(
                "unlisted {s} ({:?}, param - ambient = {}) deficient: rank {} < {}, full schedule rank {}",
                s.abundance(),
                s.param_count() as i128 - s.ambient_dim() as i128,
                w.rank,
                w.target,
                again.rank()
            ));
        }
    }
    println!(
        "  {} listed, {checked} unlisted statements on the four formats ({tight} with param <= ambient)",
        listed.len()
    );
    report(4, &bad, t.elapsed(), Duration::from_secs(120));
}

#[test]
fn criterion_5_tensor_powers() {
    let t = Instant::now();
    let mut bad = Vec::new();
    for (n, k, want) in [(3, 4, (16, 20)), (2, 5, (21, 24))] {
        let b = tensor_power_bounds(n, k).unwrap();
        if (b.nondefective_max, b.fill_min) != want {
            bad.push(format!("bounds ({n},{k}) = {:?}", (b.nondefective_max, b.fill_min)));
        }
    }
    for (s, rank) in [("T(3,3,3,3;18)", 234), ("T(2,2,2,2,2;23)", 243), ("T(4,4,4,4;36)", 612)] {
        let one = Instant::now();
        let r = oracle(s);
        if !r.is_true() || r.rank() != rank {
            bad.push(format!("{s}: rank {}, certified {}", r.rank(), r.is_true()));
        }
        if one.elapsed() > Duration::from_secs(30) {
            bad.push(format!("{s}: {:?} > 30 s", one.elapsed()));
        }
    }
    if Format::new(vec![2; 5]).unwrap().cone_dim() * 22 >= 243 {
        bad.push("sigma_22 of (P^2)^5 could fill".into());
    }
    report(5, &bad, t.elapsed(), Duration::from_secs(90));
}

#[test]
#[ignore = "minutes-scale; run with --ignored"]
fn criterion_5_extended_7_to_the_4() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let b = tensor_power_bounds(7, 4).unwrap();
    let nd = Statement::of(&[7; 4], b.nondefective_max as u32, &[0; 4]).unwrap();
    let r = terracini_oracle(&nd, &forced()).unwrap();
    if !r.is_true() || r.rank() != 3944 {
        bad.push(format!("{nd}: rank {}", r.rank()));
    }
    let fill = Statement::of(&[7; 4], b.fill_min as u32, &[0; 4]).unwrap();
    let r = terracini_oracle(&fill, &forced()).unwrap();
    if !r.is_true() || r.rank() != 4096 {
        bad.push(format!("{fill}: rank {}", r.rank()));
    }
    report(5, &bad, t.elapsed(), Duration::from_secs(600));
}

#[test]
fn criterion_6_induction_engine() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let budget = SearchBudget {
        oracle_cols: 64,
        leaf_cols: 64,
        ..SearchBudget::default()
    };
    for s in ["T(3,3,3;6)", "T(3,3,3;7)", "T(4,4,7;12)", "T(4,4,7;13)", "T(5,5,5;13)", "T(5,5,5;14)"] {
        let one = Instant::now();
        match prove(&st(s), &FieldConfig::default(), &budget) {
            Verdict::True(c) => {
                if let Err(e) = verify(&c, true) {
                    bad.push(format!("{s}: {e}"));
                }
                if let Some(big) = c.node.oracle_leaf_cols().into_iter().find(|&x| x > 64) {
                    bad.push(format!("{s}: oracle leaf with {big} columns"));
                }
                println!("  {s}: {} nodes, leaves {:?}", c.node.count(), c.node.leaf_counts());
            }
            other => bad.push(format!("{s}: {}", other.label())),
        }
        if one.elapsed() > Duration::from_secs(10) {
            bad.push(format!("{s}: {:?} > 10 s", one.elapsed()));
        }
    }
    report(6, &bad, t.elapsed(), Duration::from_secs(60));
}

fn random_statement(rng: &mut ChaCha8Rng) -> Statement {
    loop {
        let k = rng.random_range(2..=5);
        let dims: Vec<u32> = (0..k).map(|_| rng.random_range(0..=6)).collect();
        let f = Format::new(dims.clone()).unwrap();
        if f.ambient_dim() > 1000 {
            continue;
        }
        let fill = f.expected_fill_count() as u32;
        let s = rng.random_range(0..=fill + 1);
        let a: Vec<u32> = (0..k).map(|_| if rng.random_bool(0.5) { 0 } else { rng.random_range(1..=4) }).collect();
        let stm = Statement::of(&dims, s, &a).unwrap();
        let slack = stm.param_count() as i128 - stm.ambient_dim() as i128;
        if slack.unsigned_abs() <= 2 * f.cone_dim() {
            return stm;
        }
    }
}

#[test]
fn criterion_7_soundness_suite() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = FieldConfig::default();
    let budget = SearchBudget {
        max_nodes: 2_000,
        ..SearchBudget::default()
    };
    let (mut n_true, mut n_false, mut n_undet) = (0, 0, 0);
    let mut certs = Vec::new();
    for _ in 0..500 {
        let s = random_statement(&mut rng);
        let v = prove(&s, &cfg, &budget);
        match &v {
            Verdict::True(c) => {
                n_true += 1;
                if !terracini_oracle(&s, &forced()).unwrap().is_true() {
                    bad.push(format!("{s}: proved, oracle not certified"));
                }
                certs.push(c.clone());
            }
            Verdict::False(c) => {
                n_false += 1;
                if let OracleResult::Inconclusive { attempts, .. } = terracini_oracle(&s, &forced()).unwrap() {
                    let primes: BTreeSet<u64> = attempts.iter().map(|w| w.prime).collect();
                    if primes.len() < 2 || attempts.iter().any(|w| w.rank >= w.target) {
                        bad.push(format!("{s}: refuted, oracle attempts {attempts:?}"));
                    }
                } else {
                    bad.push(format!("{s}: refuted, oracle certifies"));
                }
                certs.push(c.clone());
            }
            Verdict::Undetermined(_) => n_undet += 1,
        }
    }
    for extra in ["T(5,5,5;13)", "T(4,4,4,4;36)", "T(2,2,1,1,0;5;0,0,0,0,1)", "T(1,1,3;1;0,0,2)", "T(1,2,5;4)"] {
        certs.push(prove(&st(extra), &cfg, &SearchBudget::default()).certificate().unwrap().clone());
    }
    let mut kinds = BTreeSet::new();
    let mut mutants = 0;
    for c in &certs {
        if let Err(e) = verify(c, false) {
            bad.push(format!("{}: emitted certificate rejected: {e}", c.statement));
        }
        c.node.walk(&mut |n| {
            kinds.insert(n.rule.kind());
        });
        for (what, m) in common::single_edits(c) {
            mutants += 1;
            if verify(&m, false).is_ok() {
                bad.push(format!("{}: edit {what} accepted", c.statement));
            }
        }
    }
    println!("  {n_true} true, {n_false} false, {n_undet} undetermined; {mutants} mutants; rules {kinds:?}");
    report(7, &bad, t.elapsed(), Duration::from_secs(300));
}

fn unbalanced_cases(max_ambient: u128) -> Vec<(Vec<u32>, u32)> {
    fn rec(k: usize, lo: u32, cur: &mut Vec<u32>, max: u128, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let mut n = lo;
        loop {
            cur.push(n);
            let rest = 1u128 << (k - cur.len());
            let p: u128 = cur.iter().map(|&x| x as u128 + 1).product::<u128>() * rest;
            if p > max {
                cur.pop();
                break;
            }
            rec(k, n, cur, max, out);
            cur.pop();
            n += 1;
        }
    }
    let mut formats = Vec::new();
    for k in 3..=10 {
        rec(k, 1, &mut Vec::new(), max_ambient, &mut formats);
    }
    let mut out = Vec::new();
    for d in formats {
        let f = Format::new(d.clone()).unwrap();
        if !f.is_unbalanced().unwrap() {
            continue;
        }
        let (lo, hi) = f.unbalanced_range().unwrap();
        for s in (lo + 1)..hi {
            out.push((d.clone(), s as u32));
        }
    }
    out
}

fn check_span(d: &[u32], s: u32) -> Result<(), TestCaseError> {
    let stm = Statement::of(d, s, &vec![0; d.len()]).unwrap();
    let r = terracini_rank(&stm, DEFAULT_PRIME, 1, None) as u128;
    prop_assert_eq!(r, stm.format().unbalanced_span_dim(s as u128).unwrap(), "{}", stm);
    Ok(())
}

#[test]
fn criterion_8_formula_invariants() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let runner = || TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });

    let perm_inv = runner().run(
        &(prop::collection::vec(0u32..8, 1..6), 0u32..30, prop::collection::vec(0u32..6, 5))
            .prop_flat_map(|(d, s, a)| {
                let k = d.len();
                (Just(d), Just(s), Just(a[..k].to_vec()), Just((0..k).collect::<Vec<_>>()).prop_shuffle())
            }),
        |(d, s, a, perm)| {
            let x = Statement::of(&d, s, &a).unwrap();
            let y = x.permuted(&perm).unwrap();
            prop_assert_eq!(x.abundance(), y.abundance());
            prop_assert_eq!(x.target_dim(), y.target_dim());
            Ok(())
        },
    );
    if let Err(e) = perm_inv {
        bad.push(format!("permutation invariance: {e}"));
    }

    let part = Instant::now();
    let cases = unbalanced_cases(2000);
    let f_of_d = runner().run(&prop::sample::select(cases.clone()), |(d, s)| check_span(&d, s));
    if let Err(e) = f_of_d {
        bad.push(format!("F(d) vs oracle: {e}"));
    }
    println!("  F(d) sample: {:.2?}", part.elapsed());
    let part = Instant::now();

    let balanced = runner().run(
        &prop::collection::vec(1u32..9, 3..5).prop_filter("balanced, small", |d| {
            let f = Format::new(d.clone()).unwrap();
            f.ambient_dim() <= 2000 && f.is_balanced().unwrap()
        })
        .prop_flat_map(|d| {
            let top = *d.iter().max().unwrap();
            (Just(d), 1..=top)
        }),
        |(d, s)| {
            let stm = Statement::of(&d, s, &vec![0; d.len()]).unwrap();
            prop_assert_eq!(stm.abundance(), Abundance::Subabundant);
            prop_assert!(terracini_oracle(&stm, &forced()).unwrap().is_true(), "{}", stm);
            Ok(())
        },
    );
    if let Err(e) = balanced {
        bad.push(format!("balanced proposition: {e}"));
    }
    println!("  balanced proposition: {:.2?}", part.elapsed());

    let window = runner().run(&(1u32..40, 3u32..9), |(n, k)| {
        let Ok(b) = tensor_power_bounds(n, k) else { return Ok(()) };
        prop_assert_eq!(b.fill_min - b.nondefective_max, n as u128 + 1);
        prop_assert!(b.delta_k <= n as u128);
        Ok(())
    });
    if let Err(e) = window {
        bad.push(format!("power window: {e}"));
    }
    println!("  {} unbalanced (format, d) pairs with ambient <= 2000 sampled", cases.len());
    report(8, &bad, t.elapsed(), Duration::from_secs(120));
}

#[test]
#[ignore = "exhaustive; tens of minutes on one core"]
fn criterion_8_exhaustive_unbalanced_span() {
    let t = Instant::now();
    let mut bad = Vec::new();
    for (d, s) in unbalanced_cases(2000) {
        if let Err(e) = check_span(&d, s) {
            bad.push(e.to_string());
        }
    }
    report(8, &bad, t.elapsed(), Duration::from_secs(3600));
}
