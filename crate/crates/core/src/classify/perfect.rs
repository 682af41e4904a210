use serde::{Deserialize, Serialize};

use super::power::tensor_power_bounds;
use super::profile::{resolve_secant, Status};
use super::ClassifyConfig;
use crate::formats::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perfection {
    Perfect,
    NotPerfect,
    NotNumericallyPerfect,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectReport {
    pub format: Format,
    pub verdict: Perfection,
    /// Equiabundant secant order, when numerically perfect.
    pub s: Option<u32>,
    pub source: String,
}

/// `(P^n)^k` with `delta_k = 0`, numerically perfect.
fn power_family(f: &Format) -> bool {
    let d = f.dims();
    let n = d[0];
    if n == 0 || d.len() < 3 || d.iter().any(|&x| x != n) {
        return false;
    }
    tensor_power_bounds(n, d.len() as u32).is_ok_and(|b| b.delta_k == 0) && f.is_numerically_perfect()
}

/// `P^k x (P^n)^(k+1)` with `n` odd.
fn odd_family(f: &Format) -> bool {
    let d = f.dims();
    let m = d.len();
    if m < 3 {
        return false;
    }
    let k = (m - 2) as u32;
    for (skip, _) in d.iter().enumerate().filter(|&(_, &x)| x == k) {
        let rest: Vec<u32> = d.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x).collect();
        if rest[0] % 2 == 1 && rest.iter().all(|&x| x == rest[0]) {
            return true;
        }
    }
    false
}

pub fn perfect_check(format: &Format, cfg: &ClassifyConfig) -> PerfectReport {
    let f = format.canonical();
    let report = |verdict, s, source: &str| PerfectReport {
        format: f.clone(),
        verdict,
        s,
        source: source.to_string(),
    };
    if !f.is_numerically_perfect() {
        return report(Perfection::NotNumericallyPerfect, None, "arithmetic");
    }
    let s = (f.ambient_dim() / f.cone_dim()) as u32;
    if power_family(&f) {
        return report(Perfection::Perfect, Some(s), "family:tensor-power");
    }
    if odd_family(&f) {
        return report(Perfection::Perfect, Some(s), "family:odd-power");
    }
    let row = resolve_secant(&f, s, cfg);
    let source = row.cert_ref.clone().unwrap_or_else(|| "none".into());
    let verdict = match row.status {
        Status::NonDefective => Perfection::Perfect,
        Status::Defective(_) => Perfection::NotPerfect,
        Status::EvidenceDefective(_) | Status::Unknown => Perfection::Unknown,
    };
    report(verdict, Some(s), &source)
}
