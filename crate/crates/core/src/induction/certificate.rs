//! `cert-v1` proof trees and their independent checker.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::catalog::{fibration_false, table_false_statement, unbalanced_false, FalsityReason};
use super::rules::{
    apply_split, drop_conditions, drop_zero_factor, monotone_format, monotone_sa, remove_factor,
    SplitChoice, SplitKind,
};
use super::table;
use crate::ffrank::{check_prime, terracini_rows, RankWitness};
use crate::formats::{Format, Statement};

pub const CERT_VERSION: &str = "cert-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertVerdict {
    True,
    False,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    /// The statement as given; nodes hold canonical forms.
    pub statement: Statement,
    pub verdict: CertVerdict,
    pub node: ProofNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub statement: Statement,
    #[serde(flatten)]
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ProofNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRef {
    pub factor: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendedFactor {
    pub factor: usize,
    pub a: u32,
}

/// Child format, in the parent's factor order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FromFormat {
    pub from: Vec<u32>,
}

/// Child `(s, a)`, in the parent's factor order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FromCounts {
    pub s: u32,
    pub a: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnbalancedData {
    pub d: u32,
    pub low: u64,
    pub high: u64,
    pub span_dim: u64,
    pub target: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationData {
    pub roles: [usize; 3],
    pub loss: u64,
    pub param: u64,
    pub ambient: u64,
}

/// Rank evidence as stored in a leaf; the statement is the leaf's own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub prime: u64,
    pub seed: u64,
    pub rows: u64,
    pub cols: u64,
    pub rank: u64,
    pub target: u64,
}

impl WitnessRecord {
    pub fn from_witness(w: &RankWitness) -> Self {
        Self {
            prime: w.prime,
            seed: w.seed,
            rows: w.rows,
            cols: w.cols,
            rank: w.rank,
            target: w.target,
        }
    }

    pub fn to_witness(self, st: &Statement) -> RankWitness {
        RankWitness {
            statement: st.clone(),
            prime: self.prime,
            seed: self.seed,
            rows: self.rows,
            cols: self.cols,
            rank: self.rank,
            target: self.target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialReason {
    /// `s = 0` and every `a_i = 0`.
    Empty,
    /// Every `n_i = 0`: each contribution spans the one-dimensional ambient space.
    PointFormat,
    /// One factor: every tangent or fibre space is the whole space.
    SingleFactor,
    /// One tangent space and nothing else.
    SingleTangent,
    /// One fibre space and nothing else.
    SingleFibre,
}

impl TrivialReason {
    pub fn holds(self, st: &Statement) -> bool {
        let fibres: u64 = st.a().iter().map(|&x| x as u64).sum();
        match self {
            TrivialReason::Empty => st.s() == 0 && fibres == 0,
            TrivialReason::PointFormat => st.dims().iter().all(|&n| n == 0),
            TrivialReason::SingleFactor => st.k() == 1,
            TrivialReason::SingleTangent => st.s() == 1 && fibres == 0,
            TrivialReason::SingleFibre => st.s() == 0 && fibres == 1,
        }
    }

    pub fn find(st: &Statement) -> Option<TrivialReason> {
        [
            TrivialReason::Empty,
            TrivialReason::PointFormat,
            TrivialReason::SingleFactor,
            TrivialReason::SingleTangent,
            TrivialReason::SingleFibre,
        ]
        .into_iter()
        .find(|r| r.holds(st))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Rule {
    SubSplit { side_conditions: SplitChoice },
    SuperSplit { side_conditions: SplitChoice },
    EquiSplit { side_conditions: SplitChoice },
    DropConditions { side_conditions: FactorRef },
    DropZeroFactor { side_conditions: FactorRef },
    AppendZeroFactor { side_conditions: AppendedFactor },
    MonotoneFormat { side_conditions: FromFormat },
    MonotoneSA { side_conditions: FromCounts },
    OracleLeaf { witness: WitnessRecord },
    TableTrueLeaf { table_id: String, witness: WitnessRecord },
    TableFalseLeaf { table_id: String },
    UnbalancedFalseLeaf { side_conditions: UnbalancedData },
    FibrationFalseLeaf { side_conditions: FibrationData },
    TrivialLeaf { reason: TrivialReason },
}

impl Rule {
    pub fn kind(&self) -> &'static str {
        match self {
            Rule::SubSplit { .. } => "SubSplit",
            Rule::SuperSplit { .. } => "SuperSplit",
            Rule::EquiSplit { .. } => "EquiSplit",
            Rule::DropConditions { .. } => "DropConditions",
            Rule::DropZeroFactor { .. } => "DropZeroFactor",
            Rule::AppendZeroFactor { .. } => "AppendZeroFactor",
            Rule::MonotoneFormat { .. } => "MonotoneFormat",
            Rule::MonotoneSA { .. } => "MonotoneSA",
            Rule::OracleLeaf { .. } => "OracleLeaf",
            Rule::TableTrueLeaf { .. } => "TableTrueLeaf",
            Rule::TableFalseLeaf { .. } => "TableFalseLeaf",
            Rule::UnbalancedFalseLeaf { .. } => "UnbalancedFalseLeaf",
            Rule::FibrationFalseLeaf { .. } => "FibrationFalseLeaf",
            Rule::TrivialLeaf { .. } => "TrivialLeaf",
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(
            self,
            Rule::OracleLeaf { .. }
                | Rule::TableTrueLeaf { .. }
                | Rule::TableFalseLeaf { .. }
                | Rule::UnbalancedFalseLeaf { .. }
                | Rule::FibrationFalseLeaf { .. }
                | Rule::TrivialLeaf { .. }
        )
    }

    pub fn split(kind: SplitKind, c: SplitChoice) -> Rule {
        match kind {
            SplitKind::Sub => Rule::SubSplit { side_conditions: c },
            SplitKind::Super => Rule::SuperSplit { side_conditions: c },
            SplitKind::Equi => Rule::EquiSplit { side_conditions: c },
        }
    }

    /// Leaf for a falsity reason about the (canonical) statement it was computed on.
    pub fn from_falsity(r: &FalsityReason) -> Rule {
        match r {
            FalsityReason::Table { id } => Rule::TableFalseLeaf { table_id: id.clone() },
            FalsityReason::Unbalanced {
                d,
                low,
                high,
                span_dim,
                target,
            } => Rule::UnbalancedFalseLeaf {
                side_conditions: UnbalancedData {
                    d: *d,
                    low: *low as u64,
                    high: *high as u64,
                    span_dim: *span_dim as u64,
                    target: *target as u64,
                },
            },
            FalsityReason::Fibration {
                roles,
                loss,
                param,
                ambient,
            } => Rule::FibrationFalseLeaf {
                side_conditions: FibrationData {
                    roles: *roles,
                    loss: *loss as u64,
                    param: *param as u64,
                    ambient: *ambient as u64,
                },
            },
        }
    }
}

impl ProofNode {
    pub fn leaf(statement: Statement, rule: Rule) -> Self {
        Self {
            statement,
            rule,
            children: Vec::new(),
        }
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(ProofNode::count).sum::<usize>()
    }

    pub fn leaf_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        self.walk(&mut |n| {
            if n.rule.is_leaf() {
                *out.entry(n.rule.kind()).or_insert(0) += 1;
            }
        });
        out
    }

    /// Column counts of all oracle-backed leaves.
    pub fn oracle_leaf_cols(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let Rule::OracleLeaf { witness } = &n.rule {
                out.push(witness.cols);
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ProofNode::depth).max().unwrap_or(0)
    }

    pub fn walk(&self, f: &mut impl FnMut(&ProofNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

impl Certificate {
    pub fn new(statement: Statement, verdict: CertVerdict, node: ProofNode) -> Self {
        Self {
            version: CERT_VERSION.into(),
            statement,
            verdict,
            node,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate rejected at {path}: {reason}")]
pub struct VerifyError {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub nodes: usize,
    pub leaves: BTreeMap<String, usize>,
    pub oracle_reruns: usize,
}

/// Re-checks every node's side conditions. With `rerun_oracle`, rank witnesses
/// are recomputed from their recorded prime and seed.
pub fn verify(cert: &Certificate, rerun_oracle: bool) -> Result<VerifyReport, VerifyError> {
    let mut v = Verifier {
        rerun_oracle,
        report: VerifyReport::default(),
    };
    let root = "node".to_string();
    if cert.version != CERT_VERSION {
        return Err(fail("certificate", format!("unknown version {:?}", cert.version)));
    }
    if cert.statement.canonical() != cert.node.statement {
        return Err(fail(
            &root,
            format!(
                "root statement {} does not match certificate statement {}",
                cert.node.statement, cert.statement
            ),
        ));
    }
    match cert.verdict {
        CertVerdict::True => v.check_true(&cert.node, &root)?,
        CertVerdict::False => v.check_false(&cert.node, &root)?,
    }
    Ok(v.report)
}

fn fail(path: &str, reason: impl Into<String>) -> VerifyError {
    VerifyError {
        path: path.to_string(),
        reason: reason.into(),
    }
}

struct Verifier {
    rerun_oracle: bool,
    report: VerifyReport,
}

impl Verifier {
    fn enter(&mut self, node: &ProofNode, path: &str) -> Result<(), VerifyError> {
        self.report.nodes += 1;
        if node.rule.is_leaf() {
            *self.report.leaves.entry(node.rule.kind().to_string()).or_insert(0) += 1;
        }
        if !node.statement.is_canonical() {
            return Err(fail(path, format!("{} is not in canonical form", node.statement)));
        }
        Ok(())
    }

    fn children<'a>(node: &'a ProofNode, n: usize, path: &str) -> Result<&'a [ProofNode], VerifyError> {
        if node.children.len() != n {
            return Err(fail(
                path,
                format!("{} expects {n} children, found {}", node.rule.kind(), node.children.len()),
            ));
        }
        Ok(&node.children)
    }

    fn child_path(path: &str, i: usize) -> String {
        format!("{path}.children[{i}]")
    }

    fn expect_child(child: &ProofNode, expected: &Statement, path: &str) -> Result<(), VerifyError> {
        if child.statement != expected.canonical() {
            return Err(fail(
                path,
                format!(
                    "child statement {} does not match the derived {}",
                    child.statement,
                    expected.canonical()
                ),
            ));
        }
        Ok(())
    }

    fn first_of_kind(st: &Statement, i: usize, path: &str) -> Result<(), VerifyError> {
        if i >= st.k() {
            return Err(fail(path, format!("factor {i} out of range")));
        }
        let rec = (st.dims()[i], st.a()[i]);
        if (0..i).any(|j| (st.dims()[j], st.a()[j]) == rec) {
            return Err(fail(path, format!("factor {i} repeats an earlier identical factor")));
        }
        Ok(())
    }

    /// Statement derived by a reduction rule, or `None` for leaves.
    fn derive(&self, node: &ProofNode, path: &str) -> Result<Option<Vec<Statement>>, VerifyError> {
        let st = &node.statement;
        let err = |e: super::rules::RuleError| fail(path, e.to_string());
        let out = match &node.rule {
            Rule::SubSplit { side_conditions: c }
            | Rule::SuperSplit { side_conditions: c }
            | Rule::EquiSplit { side_conditions: c } => {
                let kind = match node.rule {
                    Rule::SubSplit { .. } => SplitKind::Sub,
                    Rule::SuperSplit { .. } => SplitKind::Super,
                    _ => SplitKind::Equi,
                };
                Self::first_of_kind(st, c.factor, path)?;
                let (l, r) = apply_split(kind, st, c).map_err(err)?;
                vec![l, r]
            }
            Rule::DropConditions { side_conditions: f } => {
                Self::first_of_kind(st, f.factor, path)?;
                if st.a()[f.factor] == 0 {
                    return Err(fail(path, "DropConditions on a factor without conditions"));
                }
                vec![drop_conditions(st, f.factor).map_err(err)?]
            }
            Rule::DropZeroFactor { side_conditions: f } => {
                Self::first_of_kind(st, f.factor, path)?;
                match drop_zero_factor(st, f.factor).map_err(err)? {
                    Some(c) => vec![c],
                    None => vec![],
                }
            }
            Rule::AppendZeroFactor { side_conditions: f } => {
                Self::first_of_kind(st, f.factor, path)?;
                if st.dims()[f.factor] != 0 || st.a()[f.factor] != f.a {
                    return Err(fail(
                        path,
                        format!("factor {} is not (0, {})", f.factor, f.a),
                    ));
                }
                vec![remove_factor(st, f.factor).map_err(err)?]
            }
            Rule::MonotoneFormat { side_conditions: f } => {
                let from = Format::new(f.from.clone()).map_err(|e| fail(path, e.to_string()))?;
                let child = Statement::new(from, st.s(), st.a().to_vec())
                    .map_err(|e| fail(path, e.to_string()))?;
                let lifted = monotone_format(&child, st.format()).map_err(err)?;
                if &lifted != st {
                    return Err(fail(path, "monotone format step does not reach the node"));
                }
                vec![child]
            }
            Rule::MonotoneSA { side_conditions: f } => {
                let child = Statement::new(st.format().clone(), f.s, f.a.clone())
                    .map_err(|e| fail(path, e.to_string()))?;
                let moved = monotone_sa(&child, st.s(), st.a()).map_err(err)?;
                if &moved != st {
                    return Err(fail(path, "monotone step does not reach the node"));
                }
                vec![child]
            }
            _ => return Ok(None),
        };
        Ok(Some(out))
    }

    fn check_witness(&mut self, st: &Statement, w: &WitnessRecord, path: &str) -> Result<(), VerifyError> {
        check_prime(w.prime).map_err(|e| fail(path, e.to_string()))?;
        let expect = [
            ("cols", w.cols as u128, st.ambient_dim()),
            ("rows", w.rows as u128, terracini_rows(st)),
            ("target", w.target as u128, st.target_dim()),
        ];
        for (name, got, want) in expect {
            if got != want {
                return Err(fail(path, format!("witness {name} = {got}, statement gives {want}")));
            }
        }
        if w.rank != w.target {
            return Err(fail(path, format!("witness rank {} is below target {}", w.rank, w.target)));
        }
        if self.rerun_oracle {
            self.report.oracle_reruns += 1;
            let got = w
                .to_witness(st)
                .recheck()
                .map_err(|e| fail(path, e.to_string()))?;
            if got != w.rank {
                return Err(fail(
                    path,
                    format!("recomputed rank {got} differs from recorded rank {}", w.rank),
                ));
            }
        }
        Ok(())
    }

    fn check_true(&mut self, node: &ProofNode, path: &str) -> Result<(), VerifyError> {
        self.enter(node, path)?;
        let st = &node.statement;
        if let Some(derived) = self.derive(node, path)? {
            let kids = Self::children(node, derived.len(), path)?;
            for (i, (kid, want)) in kids.iter().zip(&derived).enumerate() {
                let cp = Self::child_path(path, i);
                Self::expect_child(kid, want, &cp)?;
                self.check_true(kid, &cp)?;
            }
            return Ok(());
        }
        Self::children(node, 0, path)?;
        match &node.rule {
            Rule::OracleLeaf { witness } => self.check_witness(st, witness, path),
            Rule::TableTrueLeaf { table_id, witness } => {
                if !table::in_domain(st) {
                    return Err(fail(path, format!("{st} is outside the small table")));
                }
                if *table_id != table::table_id(st) {
                    return Err(fail(path, format!("table id {table_id:?} does not name {st}")));
                }
                self.check_witness(st, witness, path)
            }
            Rule::TrivialLeaf { reason } => {
                if reason.holds(st) {
                    Ok(())
                } else {
                    Err(fail(path, format!("{reason:?} does not apply to {st}")))
                }
            }
            other => Err(fail(path, format!("{} cannot support a True verdict", other.kind()))),
        }
    }

    fn check_false(&mut self, node: &ProofNode, path: &str) -> Result<(), VerifyError> {
        self.enter(node, path)?;
        let st = &node.statement;
        match &node.rule {
            Rule::DropConditions { .. } | Rule::DropZeroFactor { .. } => {
                let derived = self.derive(node, path)?.expect("reduction rule");
                if derived.is_empty() {
                    return Err(fail(path, "an empty format is never false"));
                }
                let kids = Self::children(node, 1, path)?;
                let cp = Self::child_path(path, 0);
                Self::expect_child(&kids[0], &derived[0], &cp)?;
                self.check_false(&kids[0], &cp)
            }
            Rule::TableFalseLeaf { table_id } => {
                Self::children(node, 0, path)?;
                match table_false_statement(table_id) {
                    Some(t) if &t == st => Ok(()),
                    _ => Err(fail(path, format!("{table_id:?} does not list {st}"))),
                }
            }
            Rule::UnbalancedFalseLeaf { side_conditions } => {
                Self::children(node, 0, path)?;
                let want = unbalanced_false(st).map(|r| Rule::from_falsity(&r));
                match want {
                    Some(Rule::UnbalancedFalseLeaf { side_conditions: d }) if d == *side_conditions => Ok(()),
                    _ => Err(fail(path, format!("unbalanced data does not hold for {st}"))),
                }
            }
            Rule::FibrationFalseLeaf { side_conditions } => {
                Self::children(node, 0, path)?;
                let want = fibration_false(st).map(|r| Rule::from_falsity(&r));
                match want {
                    Some(Rule::FibrationFalseLeaf { side_conditions: d }) if d == *side_conditions => Ok(()),
                    _ => Err(fail(path, format!("fibration data does not hold for {st}"))),
                }
            }
            other => Err(fail(path, format!("{} cannot support a False verdict", other.kind()))),
        }
    }
}
