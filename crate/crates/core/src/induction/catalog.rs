//! Statements known to be false, each with the reason it is false.
//!
//! Three sources: the explicit defective lists for the four three-factor formats
//! with all `n_i` in `{1, 2}` plus the two named families, the unbalanced
//! `d`-range, and the fibration inequality for three factors.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::formats::{Format, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum FalsityReason {
    /// Entry of a fixed false list; `id` names the entry.
    Table { id: String },
    /// `s = d` with `low < d < high` on an unbalanced format, all `a_i = 0`.
    Unbalanced {
        d: u32,
        low: u128,
        high: u128,
        span_dim: u128,
        target: u128,
    },
    /// Three factors in roles `(i1, i2, i3)` with `a_{i1} = 0` and
    /// `(s, a_{i2})` one of `(1, 0)` or `(0, 1)`. The fibre spaces of factor `i3`
    /// meet the tangent (or fibre) space of the first point in dimension at least
    /// `loss`, and that is enough to fall short of the target.
    Fibration {
        roles: [usize; 3],
        loss: u128,
        param: u128,
        ambient: u128,
    },
}

impl FalsityReason {
    pub fn label(&self) -> &'static str {
        match self {
            FalsityReason::Table { .. } => "TableFalse",
            FalsityReason::Unbalanced { .. } => "UnbalancedFalse",
            FalsityReason::Fibration { .. } => "FibrationFalse",
        }
    }
}

/// `(dims ascending, minimal (s; a), non-minimal (s; a))` as listed for the
/// four small formats, with `a` in ascending-dims order.
type SmallList = (&'static [u32], &'static [(u32, [u32; 3])], &'static [(u32, [u32; 3])]);

const SMALL_LISTS: &[SmallList] = &[
    (&[1, 1, 1], &[(0, [0, 1, 3]), (1, [0, 0, 2])], &[]),
    (
        &[1, 1, 2],
        &[
            (0, [0, 1, 3]),
            (0, [0, 4, 1]),
            (0, [1, 5, 0]),
            (1, [0, 3, 0]),
            (1, [0, 0, 2]),
        ],
        &[],
    ),
    (
        &[1, 2, 2],
        &[
            (0, [0, 1, 4]),
            (0, [7, 0, 1]),
            (0, [1, 0, 5]),
            (1, [0, 0, 3]),
            (1, [5, 0, 0]),
            (2, [0, 0, 2]),
        ],
        &[
            (1, [6, 0, 0]),
            (0, [0, 1, 5]),
            (0, [0, 2, 4]),
            (0, [1, 1, 4]),
            (1, [0, 0, 3]),
            (1, [0, 0, 4]),
            (1, [0, 1, 3]),
            (1, [1, 0, 3]),
        ],
    ),
    (
        &[2, 2, 2],
        &[
            (0, [0, 1, 7]),
            (1, [0, 0, 5]),
            (2, [0, 0, 4]),
            (3, [0, 1, 1]),
            (4, [0, 0, 0]),
        ],
        &[
            (0, [1, 1, 7]),
            (0, [0, 2, 7]),
            (0, [0, 1, 8]),
            (1, [0, 0, 6]),
            (1, [0, 1, 5]),
        ],
    ),
];

pub const SMALL_LIST_PREFIX: &str = "small-list:";
pub const FAMILY_233: &str = "sigma5-2,3,3";
pub const FAMILY_11NN_PREFIX: &str = "1,1,n,n:n=";

/// One entry of the fixed false lists, canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListedFalse {
    pub statement: Statement,
    pub minimal: bool,
}

/// Canonical statements on the formats `(1,1,1), (2,1,1), (2,2,1), (2,2,2)` that
/// are listed as defective, deduplicated.
pub fn small_format_false_list() -> &'static [ListedFalse] {
    static LIST: OnceLock<Vec<ListedFalse>> = OnceLock::new();
    LIST.get_or_init(|| {
        let mut out: Vec<ListedFalse> = Vec::new();
        for (dims, minimal, extra) in SMALL_LISTS {
            let tagged = minimal
                .iter()
                .map(|e| (e, true))
                .chain(extra.iter().map(|e| (e, false)));
            for ((s, a), is_min) in tagged {
                let st = Statement::of(dims, *s, a).expect("valid list entry").canonical();
                if let Some(prev) = out.iter_mut().find(|e| e.statement == st) {
                    prev.minimal |= is_min;
                } else {
                    out.push(ListedFalse {
                        statement: st,
                        minimal: is_min,
                    });
                }
            }
        }
        out
    })
}

fn small_list_id(st: &Statement) -> String {
    format!("{SMALL_LIST_PREFIX}{st}")
}

/// Named false statements with their id, for canonical `st`.
pub fn table_false(st: &Statement) -> Option<String> {
    if small_format_false_list().iter().any(|e| &e.statement == st) {
        return Some(small_list_id(st));
    }
    if st.a().iter().all(|&x| x == 0) {
        if st.dims() == [3, 3, 2] && st.s() == 5 {
            return Some(FAMILY_233.to_string());
        }
        if let [n, m, 1, 1] = *st.dims() {
            if n == m && n >= 1 && st.s() == 2 * n + 1 {
                return Some(format!("{FAMILY_11NN_PREFIX}{n}"));
            }
        }
    }
    None
}

/// The canonical statement a table id names, if the id is well formed.
pub fn table_false_statement(id: &str) -> Option<Statement> {
    if let Some(rest) = id.strip_prefix(SMALL_LIST_PREFIX) {
        let st: Statement = rest.parse().ok()?;
        return small_format_false_list()
            .iter()
            .find(|e| e.statement == st)
            .map(|e| e.statement.clone());
    }
    if id == FAMILY_233 {
        return Statement::of(&[3, 3, 2], 5, &[0, 0, 0]).ok();
    }
    if let Some(rest) = id.strip_prefix(FAMILY_11NN_PREFIX) {
        let n: u32 = rest.parse().ok()?;
        if n == 0 || n.to_string() != rest {
            return None;
        }
        return Statement::of(&[n, n, 1, 1], 2 * n + 1, &[0; 4]).ok();
    }
    None
}

/// Unbalanced `d`-secant defect, on any arrangement of the factors.
pub fn unbalanced_false(st: &Statement) -> Option<FalsityReason> {
    if st.k() < 2 || st.a().iter().any(|&x| x != 0) || st.dims().contains(&0) {
        return None;
    }
    let f = st.format();
    let d = st.s() as u128;
    let span_dim = f.unbalanced_span_dim(d).ok()?;
    let (low, high) = f.unbalanced_range().ok()?;
    let target = st.target_dim();
    (span_dim < target).then_some(FalsityReason::Unbalanced {
        d: st.s(),
        low,
        high,
        span_dim,
        target,
    })
}

/// Fibration rule for roles `(i1, i2, i3)`; `Some(loss)` when it applies.
pub fn fibration_loss(st: &Statement, roles: [usize; 3]) -> Option<u128> {
    if st.k() != 3 {
        return None;
    }
    let [i1, i2, i3] = roles;
    let mut seen = [false; 3];
    for r in roles {
        if r >= 3 || seen[r] {
            return None;
        }
        seen[r] = true;
    }
    let (n, a) = (st.dims(), st.a());
    if a[i1] != 0 || !matches!((st.s(), a[i2]), (1, 0) | (0, 1)) {
        return None;
    }
    let (n1, n2) = (n[i1] as u128, n[i2] as u128);
    let lhs = a[i3] as u128 + st.s() as u128 * n1 + n2 + 1;
    let fibre = (n1 + 1) * (n2 + 1);
    if lhs <= fibre {
        return None;
    }
    let loss = lhs - fibre;
    (st.param_count() - loss < st.ambient_dim()).then_some(loss)
}

pub fn fibration_false(st: &Statement) -> Option<FalsityReason> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.iter().find_map(|&roles| {
        fibration_loss(st, roles).map(|loss| FalsityReason::Fibration {
            roles,
            loss,
            param: st.param_count(),
            ambient: st.ambient_dim(),
        })
    })
}

/// A sound falsity reason for the canonical form of `st`, if one is known.
pub fn known_false(st: &Statement) -> Option<FalsityReason> {
    let st = st.canonical();
    if let Some(id) = table_false(&st) {
        return Some(FalsityReason::Table { id });
    }
    unbalanced_false(&st).or_else(|| fibration_false(&st))
}

/// Upper bound on the affine dimension of `sigma_s` from the false catalogs,
/// with the name of the entry it comes from.
pub fn secant_upper_bound(format: &Format, s: u32) -> Option<(u128, String)> {
    let st = Statement::secant(format.canonical(), s).ok()?;
    let dims = st.dims();
    if dims == [2, 2, 2] && s == 4 {
        return Some((26, small_list_id(&st)));
    }
    if dims == [3, 3, 2] && s == 5 {
        return Some((44, FAMILY_233.into()));
    }
    if let [n, m, 1, 1] = *dims {
        if n == m && n >= 1 && s == 2 * n + 1 {
            return Some((st.ambient_dim() - 2, format!("{FAMILY_11NN_PREFIX}{n}")));
        }
    }
    if let Some(FalsityReason::Unbalanced { span_dim, .. }) = unbalanced_false(&st) {
        return Some((span_dim, "unbalanced".into()));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(d: &[u32], s: u32, a: &[u32]) -> Statement {
        Statement::of(d, s, a).unwrap()
    }

    #[test]
    fn fibration_example() {
        let r = known_false(&st(&[1, 1, 3], 1, &[0, 0, 2])).unwrap();
        assert!(matches!(r, FalsityReason::Fibration { loss: 1, .. }), "{r:?}");
    }

    #[test]
    fn unbalanced_example() {
        for a in 4..9 {
            let r = known_false(&st(&[1, 2, a], 4, &[0, 0, 0])).unwrap();
            assert_eq!(r.label(), "UnbalancedFalse");
        }
        assert!(known_false(&st(&[1, 2, 3], 4, &[0, 0, 0])).is_none());
    }

    #[test]
    fn table_examples() {
        let r = known_false(&st(&[2, 2, 2], 4, &[0, 0, 0])).unwrap();
        assert_eq!(r, FalsityReason::Table { id: "small-list:T(2,2,2;4;0,0,0)".into() });
        assert!(known_false(&st(&[2, 3, 3], 5, &[0, 0, 0])).is_some());
        assert!(known_false(&st(&[3, 3, 2], 4, &[0, 0, 0])).is_none());
        for n in 1..6 {
            let t = st(&[1, n, 1, n], 2 * n + 1, &[0; 4]);
            let id = table_false(&t.canonical()).unwrap();
            assert_eq!(table_false_statement(&id).unwrap(), t.canonical());
        }
        assert!(known_false(&st(&[1, 1, 2, 2], 4, &[0; 4])).is_none());
        assert!(known_false(&st(&[2, 2, 2], 3, &[0, 1, 1])).is_some());
    }

    #[test]
    fn ids_round_trip() {
        for e in small_format_false_list() {
            let id = table_false(&e.statement).unwrap();
            assert_eq!(table_false_statement(&id).unwrap(), e.statement);
        }
        assert!(table_false_statement("small-list:T(2,2,2;3;0,0,0)").is_none());
        assert!(table_false_statement("1,1,n,n:n=02").is_none());
        assert!(table_false_statement("bogus").is_none());
    }

    #[test]
    fn superabundant_fibration_needs_the_extra_condition() {
        // (1,1,1;1;0,0,3): inequality holds but the configuration fills the space.
        let t = st(&[1, 1, 1], 1, &[0, 0, 3]);
        assert!(t.abundance().is_super());
        assert!(fibration_false(&t).is_none());
        // (2,2,2;1;0,0,7) is superabundant and still falls short.
        assert!(fibration_false(&st(&[2, 2, 2], 1, &[0, 0, 7])).is_some());
    }

    #[test]
    fn list_sizes() {
        let l = small_format_false_list();
        assert!(l.iter().all(|e| e.statement.is_canonical()));
        // one duplicate entry among the (1,2,2) non-minimal cases
        assert_eq!(l.len(), 2 + 5 + 6 + 7 + 5 + 5);
    }

    #[test]
    fn upper_bounds() {
        let f = |d: &[u32]| Format::new(d.to_vec()).unwrap();
        assert_eq!(secant_upper_bound(&f(&[2, 2, 2]), 4).unwrap().0, 26);
        assert_eq!(secant_upper_bound(&f(&[2, 3, 3]), 5).unwrap().0, 44);
        assert_eq!(secant_upper_bound(&f(&[1, 1, 2, 2]), 5).unwrap().0, 34);
        assert_eq!(secant_upper_bound(&f(&[1, 2, 5]), 4).unwrap().0, 32);
        assert!(secant_upper_bound(&f(&[3, 3, 3]), 6).is_none());
    }
}
