use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ClassifyConfig;
use crate::ffrank::{terracini_oracle, OracleResult};
use crate::formats::{Format, Statement};
use crate::induction::{known_false, secant_upper_bound, Prover, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    NonDefective,
    /// Proven defect, affine.
    Defective(u64),
    /// Oracle deficit on every attempt, no proof.
    EvidenceDefective(u64),
    Unknown,
}

impl Status {
    pub fn is_non_defective(self) -> bool {
        self == Status::NonDefective
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::NonDefective => write!(f, "NonDefective"),
            Status::Defective(d) => write!(f, "Defective({d})"),
            Status::EvidenceDefective(d) => write!(f, "EvidenceDefective({d})"),
            Status::Unknown => write!(f, "Unknown"),
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let arg = |name: &str| -> Option<Result<u64, String>> {
            let rest = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(rest.parse().map_err(|e| format!("bad defect in {s:?}: {e}")))
        };
        match s {
            "NonDefective" => Ok(Status::NonDefective),
            "Unknown" => Ok(Status::Unknown),
            _ => {
                if let Some(d) = arg("Defective") {
                    Ok(Status::Defective(d?))
                } else if let Some(d) = arg("EvidenceDefective") {
                    Ok(Status::EvidenceDefective(d?))
                } else {
                    Err(format!("unknown status {s:?}"))
                }
            }
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Status {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One `(format, s)` resolution. Dimensions are affine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantRow {
    pub format: Format,
    pub s: u32,
    pub expected: u64,
    pub lower: Option<u64>,
    pub upper: Option<u64>,
    pub status: Status,
    pub cert_ref: Option<String>,
}

impl SecantRow {
    pub fn fills(&self) -> bool {
        self.lower == Some(self.format.ambient_dim() as u64)
    }
}

/// Resolves `sigma_s` of `format`: catalog, then induction, then the oracle.
pub fn resolve_secant(format: &Format, s: u32, cfg: &ClassifyConfig) -> SecantRow {
    let format = format.canonical();
    let st = Statement::secant(format.clone(), s).expect("secant statement");
    let expected = st.target_dim() as u64;
    let fits = st.ambient_dim() <= cfg.field.column_budget || cfg.field.force;
    let mut row = SecantRow {
        format,
        s,
        expected,
        lower: None,
        upper: None,
        status: Status::Unknown,
        cert_ref: None,
    };
    if let Some(reason) = known_false(&st) {
        let bound = secant_upper_bound(&row.format, s);
        row.upper = bound.as_ref().map(|(u, _)| *u as u64);
        row.cert_ref = Some(match &bound {
            Some((_, id)) => format!("catalog:{id}"),
            None => format!("catalog:{}", reason.label()),
        });
        if fits {
            row.lower = Some(terracini_oracle(&st, &cfg.field).expect("within budget").rank());
        }
        let measured = row.upper.or(row.lower);
        row.status = match measured {
            Some(dim) => Status::Defective(expected - dim),
            None => Status::Unknown,
        };
        return row;
    }
    if cfg.induction {
        let mut prover = Prover::new(cfg.field, cfg.budget);
        if let Verdict::True(c) = prover.prove(&st) {
            row.lower = Some(expected);
            row.status = Status::NonDefective;
            row.cert_ref = Some(format!("induction:{}:{}", c.node.rule.kind(), c.node.count()));
            return row;
        }
    }
    if !fits {
        return row;
    }
    match terracini_oracle(&st, &cfg.field).expect("within budget") {
        OracleResult::CertifiedTrue(w) => {
            row.lower = Some(w.rank);
            row.status = Status::NonDefective;
            row.cert_ref = Some(format!("oracle:p={},seed={}", w.prime, w.seed));
        }
        OracleResult::Inconclusive { best, .. } => {
            row.lower = Some(best.rank);
            row.status = Status::EvidenceDefective(expected - best.rank);
            row.cert_ref = Some(format!("oracle-evidence:p={},seed={}", best.prime, best.seed));
        }
    }
    row
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankStatus {
    /// Closed formula for unbalanced formats.
    Formula,
    /// Fill certified at `R`, and `sigma_{R-1}` proven not to fill.
    Certified,
    /// Fill certified at `R`; non-fill at `R - 1` is oracle evidence only.
    Evidence,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypicalRank {
    pub rank: Option<u64>,
    pub status: RankStatus,
    /// Known value for the special formats, when this is one.
    pub catalog: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantProfile {
    pub format: Format,
    pub rows: Vec<SecantRow>,
    pub typical_rank: TypicalRank,
}

impl SecantProfile {
    pub fn row(&self, s: u32) -> Option<&SecantRow> {
        self.rows.iter().find(|r| r.s == s)
    }

    pub fn defective_rows(&self) -> impl Iterator<Item = &SecantRow> {
        self.rows.iter().filter(|r| !r.status.is_non_defective())
    }
}

/// Last `s` the sweep will try before giving up on a certified fill.
fn sweep_cap(format: &Format) -> u32 {
    let mut cap = format.expected_fill_count();
    if format.k() >= 2 && format.is_unbalanced().unwrap_or(false) {
        cap = cap.max(format.unbalanced_typical_rank().unwrap_or(0));
    }
    (cap + 3) as u32
}

/// Sweeps `s = 1, 2, ...` until a certified fill.
pub fn secant_profile(format: &Format, cfg: &ClassifyConfig) -> SecantProfile {
    let format = format.canonical();
    let mut rows = Vec::new();
    for s in 1..=sweep_cap(&format) {
        let row = resolve_secant(&format, s, cfg);
        let done = row.fills();
        rows.push(row);
        if done {
            break;
        }
    }
    let typical_rank = rank_from_rows(&format, &rows);
    SecantProfile {
        format,
        rows,
        typical_rank,
    }
}

fn rank_from_rows(format: &Format, rows: &[SecantRow]) -> TypicalRank {
    let catalog = catalog_typical_rank(format);
    if format.k() >= 2 && format.is_unbalanced().unwrap_or(false) {
        return TypicalRank {
            rank: format.unbalanced_typical_rank().ok().map(|r| r as u64),
            status: RankStatus::Formula,
            catalog,
        };
    }
    let ambient = format.ambient_dim() as u64;
    let Some(fill) = rows.iter().find(|r| r.fills()) else {
        return TypicalRank {
            rank: None,
            status: RankStatus::Unknown,
            catalog,
        };
    };
    let r = fill.s;
    let status = match rows.iter().find(|x| x.s + 1 == r) {
        None => RankStatus::Certified,
        Some(prev) if prev.expected < ambient => RankStatus::Certified,
        Some(prev) if prev.upper.is_some_and(|u| u < ambient) => RankStatus::Certified,
        Some(prev) if matches!(prev.status, Status::Defective(_)) => RankStatus::Certified,
        Some(prev) if matches!(prev.status, Status::EvidenceDefective(_)) => RankStatus::Evidence,
        Some(_) => RankStatus::Evidence,
    };
    TypicalRank {
        rank: Some(r as u64),
        status,
        catalog,
    }
}

/// Typical rank of `format`: closed formula when unbalanced, else from the sweep.
pub fn typical_rank(format: &Format, cfg: &ClassifyConfig) -> TypicalRank {
    let format = format.canonical();
    if format.k() >= 2 && format.is_unbalanced().unwrap_or(false) {
        return rank_from_rows(&format, &[]);
    }
    secant_profile(&format, cfg).typical_rank
}

/// The special values the sweep is cross-checked against.
pub fn catalog_typical_rank(format: &Format) -> Option<u64> {
    let f = format.canonical();
    match f.dims() {
        [3, 3, 2] => Some(6),
        [2, 2, 2] => Some(5),
        [2, 2, 2, 2, 2] => Some(23),
        [3, 3, 3, 3] => Some(20),
        &[n, m, 1, 1] if n == m && n >= 1 => Some(2 * n as u64 + 2),
        _ => None,
    }
}
