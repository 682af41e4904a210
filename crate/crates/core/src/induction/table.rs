//! Oracle-computed truth table for three-factor statements with every `n_i <= 2`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::catalog::small_format_false_list;
use crate::ffrank::{terracini_oracle, FieldConfig, OracleResult, RankWitness};
use crate::formats::{Abundance, Statement};

pub const TABLE_PREFIX: &str = "k3-small:";
pub const TABLE_MAX_DIM: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableEntry {
    True(RankWitness),
    /// Best witness over all attempts; the rank stays below the target.
    Deficient(RankWitness),
}

impl TableEntry {
    pub fn witness(&self) -> &RankWitness {
        match self {
            TableEntry::True(w) | TableEntry::Deficient(w) => w,
        }
    }
}

/// Statement-level disagreement between the oracle table and the fixed false list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disagreement {
    ListedButCertified(Statement),
    UnlistedButDeficient { statement: Statement, rank: u64 },
}

/// `k = 3`, canonical, every `n_i <= 2`, parameter count at most
/// `ambient + 2 * (1 + sum n_i)`.
pub fn in_domain(st: &Statement) -> bool {
    st.k() == 3
        && st.is_canonical()
        && st.dims().iter().all(|&n| n <= TABLE_MAX_DIM)
        && st.param_count() <= st.ambient_dim() + 2 * st.format().cone_dim()
}

pub fn table_id(st: &Statement) -> String {
    format!("{TABLE_PREFIX}{st}")
}

/// Every statement in the domain, in a fixed order.
pub fn domain() -> Vec<Statement> {
    let mut out = Vec::new();
    for n0 in 0..=TABLE_MAX_DIM {
        for n1 in 0..=n0 {
            for n2 in 0..=n1 {
                let dims = [n0, n1, n2];
                let probe = Statement::of(&dims, 0, &[0, 0, 0]).expect("small format");
                let bound = probe.ambient_dim() + 2 * probe.format().cone_dim();
                let cone = probe.format().cone_dim();
                let smax = (bound / cone) as u32;
                let amax: Vec<u32> = dims.iter().map(|&n| (bound / (n as u128 + 1)) as u32).collect();
                for s in 0..=smax {
                    for a0 in 0..=amax[0] {
                        for a1 in 0..=amax[1] {
                            for a2 in 0..=amax[2] {
                                let st = Statement::of(&dims, s, &[a0, a1, a2]).expect("small statement");
                                if in_domain(&st) {
                                    out.push(st);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug)]
pub struct SmallTable {
    entries: HashMap<Statement, TableEntry>,
}

impl SmallTable {
    pub fn build(cfg: &FieldConfig) -> SmallTable {
        let entries = domain()
            .into_par_iter()
            .map(|st| {
                let res = terracini_oracle(&st, cfg).expect("table statements fit any budget");
                let entry = match res {
                    OracleResult::CertifiedTrue(w) => TableEntry::True(w),
                    OracleResult::Inconclusive { best, .. } => TableEntry::Deficient(best),
                };
                (st, entry)
            })
            .collect();
        SmallTable { entries }
    }

    /// Shared table for a field configuration; built on first use.
    pub fn shared(cfg: &FieldConfig) -> Arc<SmallTable> {
        type Key = (u64, u64, u32, u64);
        static TABLES: OnceLock<Mutex<HashMap<Key, Arc<SmallTable>>>> = OnceLock::new();
        let key = (cfg.prime, cfg.seed, cfg.retries, cfg.secondary_prime);
        let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = tables.lock().expect("table lock").get(&key) {
            return t.clone();
        }
        let table_cfg = FieldConfig {
            force: true,
            ..*cfg
        };
        let built = Arc::new(SmallTable::build(&table_cfg));
        tables
            .lock()
            .expect("table lock")
            .entry(key)
            .or_insert(built)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, st: &Statement) -> Option<&TableEntry> {
        self.entries.get(st)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Statement, &TableEntry)> {
        self.entries.iter()
    }

    /// Listed-false statements the oracle certifies, and subabundant statements on
    /// the four listed formats the oracle finds deficient although unlisted.
    pub fn disagreements(&self) -> Vec<Disagreement> {
        let listed = small_format_false_list();
        let mut out = Vec::new();
        for e in listed {
            if let Some(TableEntry::True(_)) = self.lookup(&e.statement) {
                out.push(Disagreement::ListedButCertified(e.statement.clone()));
            }
        }
        let mut rest: Vec<_> = self
            .entries
            .iter()
            .filter(|(st, _)| st.dims().iter().all(|&n| n >= 1))
            .filter(|(st, _)| st.abundance() != Abundance::Superabundant)
            .filter(|(st, _)| !listed.iter().any(|e| &e.statement == *st))
            .filter_map(|(st, e)| match e {
                TableEntry::Deficient(w) => Some(Disagreement::UnlistedButDeficient {
                    statement: st.clone(),
                    rank: w.rank,
                }),
                TableEntry::True(_) => None,
            })
            .collect();
        rest.sort_by_key(|d| format!("{d:?}"));
        out.extend(rest);
        out
    }
}
