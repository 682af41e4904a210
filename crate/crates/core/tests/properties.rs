use proptest::prelude::*;

use segre_core::ffrank::{rank_mod_p, terracini_oracle, terracini_rank, Echelon, FieldConfig, Matrix, DEFAULT_PRIME};
use segre_core::induction::rules::split_children;
use segre_core::induction::{prove, verify, Rule, SearchBudget, SplitChoice, Verdict};
use segre_core::{Abundance, Format, Statement};

fn arb_statement(max_k: usize, max_n: u32, max_s: u32, max_a: u32) -> impl Strategy<Value = Statement> {
    (1..=max_k)
        .prop_flat_map(move |k| {
            (
                prop::collection::vec(0..=max_n, k),
                0..=max_s,
                prop::collection::vec(0..=max_a, k),
            )
        })
        .prop_map(|(d, s, a)| Statement::of(&d, s, &a).unwrap())
}

fn arb_perm(k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..k).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_is_stable(st in arb_statement(5, 5, 8, 4)) {
        let c = st.canonical();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(st.equivalent(&c));
        prop_assert_eq!(c.ambient_dim(), st.ambient_dim());
        prop_assert_eq!(c.param_count(), st.param_count());
    }

    #[test]
    fn permutations_preserve_counts(
        (st, perm) in arb_statement(5, 5, 8, 4).prop_flat_map(|st| { let k = st.k(); (Just(st), arb_perm(k)) })
    ) {
        let p = st.permuted(&perm).unwrap();
        prop_assert_eq!(p.ambient_dim(), st.ambient_dim());
        prop_assert_eq!(p.param_count(), st.param_count());
        prop_assert_eq!(p.target_dim(), st.target_dim());
        prop_assert_eq!(p.abundance(), st.abundance());
        prop_assert_eq!(p.canonical(), st.canonical());
    }

    #[test]
    fn display_parses_back(st in arb_statement(6, 9, 20, 9)) {
        let text = st.to_string();
        prop_assert_eq!(text.parse::<Statement>().unwrap(), st.clone());
        let f: Format = st.format().to_string().parse().unwrap();
        prop_assert_eq!(&f, st.format());
    }

    #[test]
    fn secant_dims_bounded(dims in prop::collection::vec(0u32..6, 1..5), s in 0u32..40) {
        let f = Format::new(dims).unwrap();
        let (aff, proj) = f.expected_secant_dim(s);
        prop_assert!(aff <= f.ambient_dim());
        prop_assert_eq!(proj, aff as i128 - 1);
        let r = f.expected_fill_count();
        prop_assert!(r * f.cone_dim() >= f.ambient_dim());
        prop_assert!(r == 0 || (r - 1) * f.cone_dim() < f.ambient_dim());
    }

    #[test]
    fn echelon_matches_dense_rank(
        rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()
    ) {
        let p = DEFAULT_PRIME;
        let mut x = seed | 1;
        let mut next = || { x ^= x << 13; x ^= x >> 7; x ^= x << 17; x };
        let data: Vec<Vec<u64>> = (0..rows)
            .map(|_| (0..cols).map(|_| if next() % 3 == 0 { 0 } else { next() % p }).collect())
            .collect();
        let m = Matrix::from_rows(cols, data.clone());
        let r = rank_mod_p(&m, p);
        let mut e = Echelon::new(cols, p, cols);
        for row in &data {
            e.insert(row);
        }
        prop_assert_eq!(e.rank(), r);
        prop_assert!(r <= rows.min(cols));
        prop_assert_eq!(rank_mod_p(&m.transpose(), p), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_rank_bounded_by_target(st in arb_statement(4, 3, 5, 3), seed in any::<u64>()) {
        let r = terracini_rank(&st.canonical(), DEFAULT_PRIME, seed, None) as u128;
        prop_assert!(r <= st.target_dim());
    }

    #[test]
    fn split_counts_add_up(
        (st, i, n1, s1, frac) in arb_statement(4, 5, 8, 4)
            .prop_filter("needs a factor with n >= 1", |st| st.dims().iter().any(|&n| n >= 1))
            .prop_flat_map(|st| {
                let cands: Vec<usize> = (0..st.k()).filter(|&i| st.dims()[i] >= 1).collect();
                let s = st.s();
                (Just(st), prop::sample::select(cands))
                    .prop_flat_map(move |(st, i)| {
                        let n = st.dims()[i];
                        let k = st.k();
                        (Just(st), Just(i), 0..n, 0..=s, prop::collection::vec(0.0f64..=1.0, k))
                    })
            })
    ) {
        let k = st.k();
        let mut a1 = vec![0; k];
        let mut a2 = vec![0; k];
        for j in 0..k {
            if j != i {
                a1[j] = (st.a()[j] as f64 * frac[j]).round() as u32;
                a2[j] = st.a()[j] - a1[j];
            }
        }
        let c = SplitChoice { factor: i, n1, n2: st.dims()[i] - 1 - n1, s1, s2: st.s() - s1, a1, a2 };
        let (l, r) = split_children(&st, &c).unwrap();
        prop_assert_eq!(l.param_count() + r.param_count(), st.param_count());
        prop_assert_eq!(l.ambient_dim() + r.ambient_dim(), st.ambient_dim());
        let sum = l.target_dim() + r.target_dim();
        let mixed = (l.param_count() < l.ambient_dim() && r.param_count() > r.ambient_dim())
            || (l.param_count() > l.ambient_dim() && r.param_count() < r.ambient_dim());
        prop_assert_eq!(sum == st.target_dim(), !mixed);
        let all_equi = [&st, &l, &r].iter().all(|x| x.abundance() == Abundance::Equiabundant);
        if all_equi {
            prop_assert_eq!(sum, st.target_dim());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn proofs_ignore_factor_order(
        (st, perm) in arb_statement(4, 4, 6, 3)
            .prop_filter("small", |st| st.ambient_dim() <= 300)
            .prop_flat_map(|st| { let k = st.k(); (Just(st), arb_perm(k)) })
    ) {
        let cfg = FieldConfig::default();
        let budget = SearchBudget { max_nodes: 400, ..SearchBudget::default() };
        let p = st.permuted(&perm).unwrap();
        let a = prove(&st, &cfg, &budget);
        let b = prove(&p, &cfg, &budget);
        prop_assert_eq!(a.label(), b.label());
        if let (Some(ca), Some(cb)) = (a.certificate(), b.certificate()) {
            prop_assert_eq!(&ca.node, &cb.node);
            prop_assert!(verify(ca, false).is_ok());
            prop_assert!(verify(cb, false).is_ok());
        }
    }

    #[test]
    fn false_only_from_catalog(st in arb_statement(3, 3, 6, 4)) {
        let v = prove(&st, &FieldConfig::default(), &SearchBudget { max_nodes: 200, ..SearchBudget::default() });
        if let Verdict::False(c) = &v {
            prop_assert!(verify(c, false).is_ok());
            let mut leaves = Vec::new();
            c.node.walk(&mut |n| if n.children.is_empty() { leaves.push(n.rule.kind()) });
            prop_assert_eq!(leaves.len(), 1);
            prop_assert!(matches!(
                leaves[0],
                "TableFalseLeaf" | "UnbalancedFalseLeaf" | "FibrationFalseLeaf"
            ));
            prop_assert!(c.node.oracle_leaf_cols().is_empty());
        }
    }

    #[test]
    fn verdicts_agree_with_oracle(st in arb_statement(4, 4, 8, 3).prop_filter("fits", |st| st.ambient_dim() <= 2000)) {
        let cfg = FieldConfig::default();
        let v = prove(&st, &cfg, &SearchBudget { max_nodes: 300, ..SearchBudget::default() });
        let o = terracini_oracle(&st, &FieldConfig { force: true, ..cfg }).unwrap();
        match v {
            Verdict::True(_) => prop_assert!(o.is_true(), "{} proved but oracle rank {}", st, o.rank()),
            Verdict::False(_) => prop_assert!(!o.is_true(), "{} refuted but oracle certifies", st),
            Verdict::Undetermined(_) => {}
        }
    }
}

#[test]
fn leaf_kinds_are_known() {
    let v = prove(&"T(4,4,4,4;36)".parse().unwrap(), &FieldConfig::default(), &SearchBudget::default());
    let c = v.certificate().unwrap();
    c.node.walk(&mut |n| {
        if n.children.is_empty() {
            assert!(matches!(n.rule, Rule::OracleLeaf { .. } | Rule::TableTrueLeaf { .. } | Rule::TrivialLeaf { .. }));
        }
    });
}
