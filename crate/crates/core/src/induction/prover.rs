//! Memoized depth-first search for an induction proof.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::catalog::known_false;
use super::certificate::{
    AppendedFactor, CertVerdict, Certificate, FactorRef, FromCounts, FromFormat, ProofNode, Rule,
    TrivialReason, WitnessRecord,
};
use super::rules::{apply_split, SplitChoice, SplitKind};
use super::table::{self, SmallTable, TableEntry};
use crate::ffrank::{terracini_oracle, FieldConfig, OracleResult, RankWitness};
use crate::formats::{Abundance, Format, Statement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Goals expanded per `prove` call.
    pub max_nodes: usize,
    /// Largest `prod(n_i + 1)` handed to the oracle as a fallback.
    pub oracle_cols: u128,
    /// Goals this small go straight to the oracle.
    pub leaf_cols: u128,
    /// Split candidates tried per goal.
    pub max_splits: usize,
    /// Distribution vectors tried per `(n', s')`.
    pub max_distributions: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_nodes: 50_000,
            oracle_cols: 4096,
            leaf_cols: 64,
            max_splits: 24,
            max_distributions: 8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: usize,
    pub memo_hits: usize,
    pub oracle_calls: usize,
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Undetermined {
    pub statement: Statement,
    pub target: u64,
    /// Oracle evidence when the statement fits the oracle budget.
    pub best: Option<RankWitness>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    True(Certificate),
    False(Certificate),
    Undetermined(Undetermined),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::True(_) => "TRUE",
            Verdict::False(_) => "FALSE",
            Verdict::Undetermined(_) => "UNDETERMINED",
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::True(c) | Verdict::False(c) => Some(c),
            Verdict::Undetermined(_) => None,
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::True(_))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Verdict::False(_))
    }
}

pub struct Prover {
    cfg: FieldConfig,
    budget: SearchBudget,
    table: Arc<SmallTable>,
    proven: HashMap<Statement, ProofNode>,
    by_dims: HashMap<Vec<u32>, Vec<Statement>>,
    failed: HashSet<Statement>,
    stats: SearchStats,
}

pub fn prove(st: &Statement, cfg: &FieldConfig, budget: &SearchBudget) -> Verdict {
    Prover::new(*cfg, *budget).prove(st)
}

impl Prover {
    pub fn new(cfg: FieldConfig, budget: SearchBudget) -> Self {
        Self {
            cfg: FieldConfig { force: true, ..cfg },
            budget,
            table: SmallTable::shared(&cfg),
            proven: HashMap::new(),
            by_dims: HashMap::new(),
            failed: HashSet::new(),
            stats: SearchStats::default(),
        }
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    /// Proven entries persist across calls; failures do not.
    pub fn prove(&mut self, st: &Statement) -> Verdict {
        self.failed.clear();
        self.stats = SearchStats::default();
        let canon = st.canonical();
        if let Some(node) = falsity_chain(&canon) {
            return Verdict::False(Certificate::new(st.clone(), CertVerdict::False, node));
        }
        if let Some(node) = self.search(&canon) {
            return Verdict::True(Certificate::new(st.clone(), CertVerdict::True, node));
        }
        let mut best = None;
        if canon.ambient_dim() <= self.budget.oracle_cols {
            match self.oracle(&canon) {
                OracleResult::CertifiedTrue(w) => {
                    let node = oracle_leaf(&canon, &w);
                    self.remember(&canon, &node);
                    return Verdict::True(Certificate::new(st.clone(), CertVerdict::True, node));
                }
                OracleResult::Inconclusive { best: b, .. } => best = Some(b),
            }
        }
        Verdict::Undetermined(Undetermined {
            statement: st.clone(),
            target: canon.target_dim() as u64,
            best,
            stats: self.stats.clone(),
        })
    }

    fn oracle(&mut self, st: &Statement) -> OracleResult {
        self.stats.oracle_calls += 1;
        terracini_oracle(st, &self.cfg).expect("forced oracle on a valid configuration")
    }

    fn remember(&mut self, st: &Statement, node: &ProofNode) {
        if self.proven.insert(st.clone(), node.clone()).is_none() {
            self.by_dims.entry(st.dims().to_vec()).or_default().push(st.clone());
        }
    }

    fn search(&mut self, st: &Statement) -> Option<ProofNode> {
        if let Some(n) = self.proven.get(st) {
            self.stats.memo_hits += 1;
            return Some(n.clone());
        }
        if self.failed.contains(st) {
            return None;
        }
        if self.stats.nodes >= self.budget.max_nodes {
            self.stats.exhausted = true;
            return None;
        }
        self.stats.nodes += 1;
        let res = self.expand(st);
        match &res {
            Some(n) => self.remember(st, n),
            None => {
                self.failed.insert(st.clone());
            }
        }
        res
    }

    fn reduce(&mut self, st: &Statement, rule: Rule, child: &Statement) -> Option<ProofNode> {
        let c = self.search(&child.canonical())?;
        Some(ProofNode {
            statement: st.clone(),
            rule,
            children: vec![c],
        })
    }

    fn expand(&mut self, st: &Statement) -> Option<ProofNode> {
        if known_false(st).is_some() {
            return None;
        }
        if let Some(reason) = TrivialReason::find(st) {
            return Some(ProofNode::leaf(st.clone(), Rule::TrivialLeaf { reason }));
        }
        if table::in_domain(st) {
            return match self.table.lookup(st) {
                Some(TableEntry::True(w)) => Some(ProofNode::leaf(
                    st.clone(),
                    Rule::TableTrueLeaf {
                        table_id: table::table_id(st),
                        witness: WitnessRecord::from_witness(w),
                    },
                )),
                _ => None,
            };
        }
        let abundance = st.abundance();
        if let Some(i) = st.dims().iter().position(|&n| n == 0) {
            let ai = st.a()[i];
            if ai == 0 {
                let child = super::rules::drop_zero_factor(st, i).ok()??;
                return self.reduce(st, Rule::DropZeroFactor { side_conditions: FactorRef { factor: i } }, &child);
            }
            if abundance.is_sub() {
                let child = super::rules::drop_conditions(st, i).ok()?;
                return self.reduce(st, Rule::DropConditions { side_conditions: FactorRef { factor: i } }, &child);
            }
            let child = super::rules::remove_factor(st, i).ok()?;
            let rule = Rule::AppendZeroFactor {
                side_conditions: AppendedFactor { factor: i, a: ai },
            };
            if let Some(n) = self.reduce(st, rule, &child) {
                return Some(n);
            }
        }
        if st.ambient_dim() <= self.budget.leaf_cols {
            return match self.oracle(st) {
                OracleResult::CertifiedTrue(w) => Some(oracle_leaf(st, &w)),
                OracleResult::Inconclusive { .. } => None,
            };
        }
        if let Some(n) = self.dominated(st) {
            return Some(n);
        }
        if abundance == Abundance::Superabundant {
            if let Some(n) = self.trim(st) {
                return Some(n);
            }
        }
        let kind = match abundance {
            Abundance::Subabundant => SplitKind::Sub,
            Abundance::Superabundant => SplitKind::Super,
            Abundance::Equiabundant => SplitKind::Equi,
        };
        for c in split_candidates(st, kind, &self.budget) {
            let (l, r) = match apply_split(kind, st, &c) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let (l, r) = (l.canonical(), r.canonical());
            if self.failed.contains(&l) || self.failed.contains(&r) {
                continue;
            }
            if known_false(&l).is_some() || known_false(&r).is_some() {
                continue;
            }
            let Some(ln) = self.search(&l) else { continue };
            let Some(rn) = self.search(&r) else { continue };
            return Some(ProofNode {
                statement: st.clone(),
                rule: Rule::split(kind, c),
                children: vec![ln, rn],
            });
        }
        if abundance.is_sub() {
            let mut seen = HashSet::new();
            for i in 0..st.k() {
                if st.dims()[i] == 0 || !seen.insert((st.dims()[i], st.a()[i])) {
                    continue;
                }
                let mut dims = st.dims().to_vec();
                dims[i] -= 1;
                let Ok(f) = Format::new(dims.clone()) else { continue };
                let Ok(child) = Statement::new(f, st.s(), st.a().to_vec()) else { continue };
                if !child.abundance().is_sub() {
                    continue;
                }
                let rule = Rule::MonotoneFormat {
                    side_conditions: FromFormat { from: dims },
                };
                if let Some(n) = self.reduce(st, rule, &child) {
                    return Some(n);
                }
            }
        }
        if st.ambient_dim() <= self.budget.oracle_cols {
            if let OracleResult::CertifiedTrue(w) = self.oracle(st) {
                return Some(oracle_leaf(st, &w));
            }
        }
        None
    }

    /// A proven statement on the same format that implies this one.
    fn dominated(&mut self, st: &Statement) -> Option<ProofNode> {
        let cands = self.by_dims.get(st.dims())?;
        let sub = st.abundance().is_sub();
        let le = |x: &Statement, y: &Statement| x.s() <= y.s() && x.a().iter().zip(y.a()).all(|(p, q)| p <= q);
        let hit = cands.iter().find(|p| {
            *p != st
                && if sub {
                    p.abundance().is_sub() && le(st, p)
                } else {
                    p.abundance().is_super() && le(p, st)
                }
        })?;
        let child = self.proven.get(hit)?.clone();
        self.stats.memo_hits += 1;
        Some(ProofNode {
            statement: st.clone(),
            rule: Rule::MonotoneSA {
                side_conditions: FromCounts {
                    s: hit.s(),
                    a: hit.a().to_vec(),
                },
            },
            children: vec![child],
        })
    }

    /// Drops one tangent space, or one fibre space, while staying superabundant.
    fn trim(&mut self, st: &Statement) -> Option<ProofNode> {
        let surplus = st.param_count() - st.ambient_dim();
        let mut options: Vec<(u32, Vec<u32>)> = Vec::new();
        if st.s() > 0 && surplus >= st.format().cone_dim() {
            options.push((st.s() - 1, st.a().to_vec()));
        }
        let mut order: Vec<usize> = (0..st.k()).filter(|&i| st.a()[i] > 0).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(st.dims()[i]));
        for i in order {
            if surplus > st.dims()[i] as u128 {
                let mut a = st.a().to_vec();
                a[i] -= 1;
                options.push((st.s(), a));
                break;
            }
        }
        for (s, a) in options {
            let Ok(child) = Statement::new(st.format().clone(), s, a.clone()) else { continue };
            let rule = Rule::MonotoneSA {
                side_conditions: FromCounts { s, a },
            };
            if let Some(n) = self.reduce(st, rule, &child) {
                return Some(n);
            }
        }
        None
    }
}

fn oracle_leaf(st: &Statement, w: &RankWitness) -> ProofNode {
    ProofNode::leaf(
        st.clone(),
        Rule::OracleLeaf {
            witness: WitnessRecord::from_witness(w),
        },
    )
}

/// Chain of equivalences from `st` (canonical) to a catalogued false statement.
pub fn falsity_chain(st: &Statement) -> Option<ProofNode> {
    if let Some(r) = known_false(st) {
        return Some(ProofNode::leaf(st.clone(), Rule::from_falsity(&r)));
    }
    let i = st.dims().iter().position(|&n| n == 0)?;
    let (rule, child) = if st.a()[i] == 0 {
        let child = super::rules::drop_zero_factor(st, i).ok()??;
        (Rule::DropZeroFactor { side_conditions: FactorRef { factor: i } }, child)
    } else if st.abundance().is_sub() {
        let child = super::rules::drop_conditions(st, i).ok()?;
        (Rule::DropConditions { side_conditions: FactorRef { factor: i } }, child)
    } else {
        return None;
    };
    let c = falsity_chain(&child.canonical())?;
    Some(ProofNode {
        statement: st.clone(),
        rule,
        children: vec![c],
    })
}

/// Split choices for a canonical statement, most balanced first.
pub fn split_candidates(st: &Statement, kind: SplitKind, budget: &SearchBudget) -> Vec<SplitChoice> {
    let k = st.k();
    let dims = st.dims();
    let a = st.a();
    let s = st.s();
    let total_pi = st.ambient_dim() as i128;
    let mut out = Vec::new();
    let mut seen_pairs = HashSet::new();
    let mut seen_rec = HashSet::new();
    for i in 0..k {
        let ni = dims[i];
        if ni == 0 || !seen_rec.insert((ni, a[i])) {
            continue;
        }
        let rest: i128 = dims.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &n)| n as i128).sum();
        let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
        let w_total: i128 = others.iter().map(|&j| a[j] as i128 * (dims[j] as i128 + 1)).sum();
        let base = total_pi / (ni as i128 + 1);
        for n1 in (ni / 2)..ni {
            let n2 = ni - 1 - n1;
            if n1 < n2 {
                continue;
            }
            let pi1 = base * (n1 as i128 + 1);
            let pi2 = base * (n2 as i128 + 1);
            let centre = (s as f64 * (n1 as f64 + 1.0) / (ni as f64 + 1.0)).round() as i64;
            let mut s1s: Vec<u32> = (0..=s).collect();
            s1s.sort_by_key(|&x| ((x as i64 - centre).abs(), x));
            for s1 in s1s {
                let s2 = s - s1;
                let f1 = s1 as i128 * (1 + n1 as i128 + rest) + (a[i] as i128 + s2 as i128) * (n1 as i128 + 1);
                let f2 = s2 as i128 * (1 + n2 as i128 + rest) + (a[i] as i128 + s1 as i128) * (n2 as i128 + 1);
                let (lo, hi) = match kind {
                    SplitKind::Sub => (w_total - (pi2 - f2), pi1 - f1),
                    SplitKind::Super => (pi1 - f1, w_total - (pi2 - f2)),
                    SplitKind::Equi => (pi1 - f1, pi1 - f1),
                };
                let (lo, hi) = (lo.max(0), hi.min(w_total));
                if lo > hi {
                    continue;
                }
                let ratio = (n1 as f64 + 1.0) / (ni as f64 + 1.0);
                for a1o in distributions(&others, dims, a, lo, hi, ratio, budget.max_distributions) {
                    let mut a1 = vec![0; k];
                    let mut a2 = vec![0; k];
                    for (t, &j) in others.iter().enumerate() {
                        a1[j] = a1o[t];
                        a2[j] = a[j] - a1o[t];
                    }
                    let c = SplitChoice {
                        factor: i,
                        n1,
                        n2,
                        s1,
                        s2,
                        a1,
                        a2,
                    };
                    let Ok((l, r)) = apply_split(kind, st, &c) else { continue };
                    let (l, r) = (l.canonical(), r.canonical());
                    let key = if l.to_string() <= r.to_string() { (l, r) } else { (r, l) };
                    if seen_pairs.insert(key) {
                        out.push(c);
                        if out.len() >= budget.max_splits {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Vectors `x` with `0 <= x_t <= a_{j_t}` and weighted sum
/// `sum x_t (n_{j_t} + 1)` in `[lo, hi]`, closest to `ratio * a` first.
fn distributions(
    others: &[usize],
    dims: &[u32],
    a: &[u32],
    lo: i128,
    hi: i128,
    ratio: f64,
    cap: usize,
) -> Vec<Vec<u32>> {
    const VISIT_LIMIT: usize = 4096;
    let weights: Vec<i128> = others.iter().map(|&j| dims[j] as i128 + 1).collect();
    let bounds: Vec<u32> = others.iter().map(|&j| a[j]).collect();
    let mut suffix_max = vec![0i128; others.len() + 1];
    for t in (0..others.len()).rev() {
        suffix_max[t] = suffix_max[t + 1] + weights[t] * bounds[t] as i128;
    }
    let mut found = Vec::new();
    let mut cur = Vec::with_capacity(others.len());
    let mut visits = 0usize;
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        t: usize,
        w: i128,
        cur: &mut Vec<u32>,
        weights: &[i128],
        bounds: &[u32],
        suffix_max: &[i128],
        lo: i128,
        hi: i128,
        found: &mut Vec<Vec<u32>>,
        visits: &mut usize,
    ) {
        *visits += 1;
        if *visits > VISIT_LIMIT {
            return;
        }
        if t == bounds.len() {
            if w >= lo && w <= hi {
                found.push(cur.clone());
            }
            return;
        }
        for x in 0..=bounds[t] {
            let nw = w + weights[t] * x as i128;
            if nw > hi {
                break;
            }
            if nw + suffix_max[t + 1] < lo {
                continue;
            }
            cur.push(x);
            dfs(t + 1, nw, cur, weights, bounds, suffix_max, lo, hi, found, visits);
            cur.pop();
        }
    }
    dfs(0, 0, &mut cur, &weights, &bounds, &suffix_max, lo, hi, &mut found, &mut visits);
    let dist = |v: &Vec<u32>| -> f64 {
        v.iter()
            .zip(&bounds)
            .map(|(&x, &b)| (x as f64 - ratio * b as f64).abs())
            .sum()
    };
    found.sort_by(|x, y| dist(x).total_cmp(&dist(y)).then_with(|| x.cmp(y)));
    found.truncate(cap);
    found
}
