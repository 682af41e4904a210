use rayon::prelude::*;

use super::profile::{resolve_secant, SecantRow};
use super::ClassifyConfig;
use crate::formats::Format;

/// Canonical formats with `k` factors and `1 <= n_i <= n_max`.
pub fn format_grid(k: usize, n_max: u32) -> Vec<Format> {
    fn rec(k: usize, hi: u32, cur: &mut Vec<u32>, out: &mut Vec<Format>) {
        if cur.len() == k {
            out.push(Format::new(cur.clone()).expect("non-empty"));
            return;
        }
        for n in (1..=hi).rev() {
            cur.push(n);
            rec(k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, n_max, &mut Vec::new(), &mut out);
    }
    out
}

/// Resolves every `(format, s)` with `s <= r_max`, reusing `cached` rows, and
/// returns all rows in grid order.
pub fn scan_rows<F>(grid: &[Format], r_max: u32, cfg: &ClassifyConfig, cached: F) -> Vec<SecantRow>
where
    F: Fn(&Format, u32) -> Option<SecantRow> + Sync,
{
    let jobs: Vec<(&Format, u32)> = grid.iter().flat_map(|f| (1..=r_max).map(move |s| (f, s))).collect();
    jobs.into_par_iter()
        .map(|(f, s)| cached(f, s).unwrap_or_else(|| resolve_secant(f, s, cfg)))
        .collect()
}

/// `(format, s)` pairs on the grid that are not certified non-defective.
pub fn defective_scan(ks: &[usize], n_max: u32, r_max: u32, cfg: &ClassifyConfig) -> Vec<SecantRow> {
    let grid: Vec<Format> = ks.iter().flat_map(|&k| format_grid(k, n_max)).collect();
    scan_rows(&grid, r_max, cfg, |_, _| None)
        .into_iter()
        .filter(|r| !r.status.is_non_defective())
        .collect()
}
