//! Known defective families.

use serde::Serialize;

use crate::formats::{Format, Statement};
use crate::induction::catalog::small_format_false_list;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Largest factor too big for the others: defective for `low < s < high`.
    Unbalanced,
    /// `(1,1,n,n)`: codimension 2 at `s = 2n+1`.
    OneOneNN,
    /// `(2,3,3)`: `sigma_5` has projective dimension 43.
    TwoThreeThree,
    /// `(2,n,n)` with `n` even. Membership only; no dimension is recorded.
    TwoNNEven,
    /// The listed false statements with `a = 0` on the four small formats.
    SmallList,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyMatch {
    pub family: Family,
    /// Defective secant orders, when the family records them.
    pub orders: Vec<u32>,
    /// Affine dimension at each of `orders`, when recorded.
    pub dims: Vec<Option<u128>>,
    pub typical_rank: Option<u128>,
}

pub struct DefectCatalog;

impl DefectCatalog {
    pub fn lookup(format: &Format) -> Vec<FamilyMatch> {
        let f = format.canonical();
        let d = f.dims();
        let mut out = Vec::new();
        if f.k() >= 2 && f.is_unbalanced().unwrap_or(false) {
            let (low, high) = f.unbalanced_range().expect("k >= 2");
            let orders: Vec<u32> = ((low + 1)..high).map(|x| x as u32).collect();
            let dims = orders
                .iter()
                .map(|&s| f.unbalanced_span_dim(s as u128).ok())
                .collect();
            out.push(FamilyMatch {
                family: Family::Unbalanced,
                orders,
                dims,
                typical_rank: f.unbalanced_typical_rank().ok(),
            });
        }
        if let [n, m, 1, 1] = *d {
            if n == m && n >= 1 {
                let ambient = f.ambient_dim();
                out.push(FamilyMatch {
                    family: Family::OneOneNN,
                    orders: vec![2 * n + 1],
                    dims: vec![Some(ambient - 2)],
                    typical_rank: Some(2 * n as u128 + 2),
                });
            }
        }
        if d == [3, 3, 2] {
            out.push(FamilyMatch {
                family: Family::TwoThreeThree,
                orders: vec![5],
                dims: vec![Some(44)],
                typical_rank: Some(6),
            });
        }
        if let [n, m, 2] = *d {
            if n == m && n % 2 == 0 {
                out.push(FamilyMatch {
                    family: Family::TwoNNEven,
                    orders: vec![],
                    dims: vec![],
                    typical_rank: None,
                });
            }
        }
        let listed: Vec<&Statement> = small_format_false_list()
            .iter()
            .map(|e| &e.statement)
            .filter(|st| st.format() == &f && st.a().iter().all(|&x| x == 0))
            .collect();
        if !listed.is_empty() {
            out.push(FamilyMatch {
                family: Family::SmallList,
                orders: listed.iter().map(|st| st.s()).collect(),
                dims: listed
                    .iter()
                    .map(|st| crate::induction::secant_upper_bound(&f, st.s()).map(|(u, _)| u))
                    .collect(),
                typical_rank: None,
            });
        }
        out
    }

    pub fn is_known_defective(format: &Format) -> bool {
        !Self::lookup(format).is_empty()
    }
}
