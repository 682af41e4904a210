//! Random points, the Terracini span matrix, and the retrying rank oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{check_prime, splitmix64, FieldConfig};
use super::matrix::{Echelon, Matrix};
use super::OracleError;
use crate::formats::Statement;

/// Coordinates of a rank-one point `v_1 (x) ... (x) v_k`, one vector per factor.
pub type Point = Vec<Vec<u64>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub prime: u64,
    pub tangent: Vec<Point>,
    /// `fibres[i]` holds the `a_i` points whose `G^i` spaces are added.
    pub fibres: Vec<Vec<Point>>,
}

impl PointSet {
    pub fn is_empty(&self) -> bool {
        self.tangent.is_empty() && self.fibres.iter().all(Vec::is_empty)
    }

    /// Relabels factors: factor `j` of the result is factor `perm[j]` here.
    pub fn permuted(&self, perm: &[usize]) -> PointSet {
        let map = |pt: &Point| perm.iter().map(|&i| pt[i].clone()).collect::<Point>();
        PointSet {
            prime: self.prime,
            tangent: self.tangent.iter().map(map).collect(),
            fibres: perm
                .iter()
                .map(|&i| self.fibres[i].iter().map(map).collect())
                .collect(),
        }
    }
}

/// Deterministic in `(st, prime, seed)`. Coordinates are uniform in `[0, p)`;
/// an all-zero vector is redrawn.
pub fn sample_points(st: &Statement, prime: u64, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = st.dims();
    let point = |rng: &mut ChaCha8Rng| -> Point {
        dims.iter()
            .map(|&n| loop {
                let v: Vec<u64> = (0..=n).map(|_| rng.random_range(0..prime)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            })
            .collect()
    };
    let tangent = (0..st.s()).map(|_| point(&mut rng)).collect();
    let fibres = st
        .a()
        .iter()
        .map(|&ai| (0..ai).map(|_| point(&mut rng)).collect())
        .collect();
    PointSet {
        prime,
        tangent,
        fibres,
    }
}

fn check_shape(st: &Statement, pts: &PointSet) -> Result<(), OracleError> {
    let dims = st.dims();
    let point_ok = |pt: &Point| {
        pt.len() == dims.len() && pt.iter().zip(dims).all(|(v, &n)| v.len() == n as usize + 1)
    };
    let ok = pts.tangent.len() == st.s() as usize
        && pts.fibres.len() == st.k()
        && pts
            .fibres
            .iter()
            .zip(st.a())
            .all(|(f, &ai)| f.len() == ai as usize)
        && pts.tangent.iter().all(point_ok)
        && pts.fibres.iter().flatten().all(point_ok);
    if ok {
        Ok(())
    } else {
        Err(OracleError::ShapeMismatch(st.clone()))
    }
}

/// `s * sum(n_j+1) + sum a_i (n_i+1)`.
pub fn terracini_rows(st: &Statement) -> u128 {
    let block: u128 = st.dims().iter().map(|&n| n as u128 + 1).sum();
    let fibres: u128 = st
        .records()
        .map(|(n, a)| a as u128 * (n as u128 + 1))
        .sum();
    st.s() as u128 * block + fibres
}

/// Writes the `n_j + 1` rows `v_1 (x) .. e_b .. (x) v_k` into `emit`, one per `b`.
fn factor_rows(pt: &Point, j: usize, p: u64, row: &mut [u64], emit: &mut impl FnMut(&[u64]) -> bool) -> bool {
    let prefix = kron(&pt[..j], p);
    let suffix = kron(&pt[j + 1..], p);
    let width = pt[j].len();
    for b in 0..width {
        row.fill(0);
        for (ai, &x) in prefix.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let base = (ai * width + b) * suffix.len();
            for (si, &y) in suffix.iter().enumerate() {
                row[base + si] = x * y % p;
            }
        }
        if !emit(row) {
            return false;
        }
    }
    true
}

fn kron(vs: &[Vec<u64>], p: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for v in vs {
        let mut next = Vec::with_capacity(out.len() * v.len());
        for &x in &out {
            for &y in v {
                next.push(x * y % p);
            }
        }
        out = next;
    }
    out
}

/// Streams the rows of the Terracini matrix; `emit` returns false to stop early.
fn for_each_row(st: &Statement, pts: &PointSet, mut emit: impl FnMut(&[u64]) -> bool) {
    let cols = st.ambient_dim() as usize;
    let mut row = vec![0u64; cols];
    for pt in &pts.tangent {
        for j in 0..st.k() {
            if !factor_rows(pt, j, pts.prime, &mut row, &mut emit) {
                return;
            }
        }
    }
    for (i, fib) in pts.fibres.iter().enumerate() {
        for pt in fib {
            if !factor_rows(pt, i, pts.prime, &mut row, &mut emit) {
                return;
            }
        }
    }
}

/// Columns are multi-indices `(b_1, .., b_k)` in row-major order, last index fastest.
pub fn build_terracini_matrix(st: &Statement, pts: &PointSet) -> Result<Matrix, OracleError> {
    check_shape(st, pts)?;
    let rows = terracini_rows(st) as usize;
    let mut m = Matrix::with_capacity(rows, st.ambient_dim() as usize);
    for_each_row(st, pts, |r| {
        m.push_row(r);
        true
    });
    Ok(m)
}

/// Rank of the Terracini matrix of `st` at the points drawn from `(prime, seed)`,
/// stopping once `stop` is reached.
pub fn terracini_rank(st: &Statement, prime: u64, seed: u64, stop: Option<usize>) -> usize {
    let pts = sample_points(st, prime, seed);
    let cols = st.ambient_dim() as usize;
    let rows = terracini_rows(st).min(usize::MAX as u128) as usize;
    let limit = stop.unwrap_or(usize::MAX).min(cols);
    let mut ech = Echelon::new(cols, prime, rows.min(cols));
    for_each_row(st, &pts, |r| {
        if ech.rank() >= limit {
            return false;
        }
        ech.insert(r);
        ech.rank() < limit
    });
    ech.rank()
}

/// Evidence from one oracle attempt. `statement` is the canonical form the
/// points were drawn for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankWitness {
    pub statement: Statement,
    pub prime: u64,
    pub seed: u64,
    pub rows: u64,
    pub cols: u64,
    pub rank: u64,
    pub target: u64,
}

impl RankWitness {
    pub fn certifies(&self) -> bool {
        self.rank == self.target
    }

    /// Recomputes the rank from the recorded prime and seed.
    pub fn recheck(&self) -> Result<u64, OracleError> {
        check_prime(self.prime)?;
        let st = &self.statement;
        if !st.is_canonical()
            || st.ambient_dim() != self.cols as u128
            || terracini_rows(st) != self.rows as u128
            || st.target_dim() != self.target as u128
        {
            return Err(OracleError::ShapeMismatch(st.clone()));
        }
        Ok(terracini_rank(st, self.prime, self.seed, Some(self.target as usize)) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleResult {
    CertifiedTrue(RankWitness),
    /// Rank below target on every attempt. Evidence of a defect, not a proof.
    Inconclusive {
        best: RankWitness,
        attempts: Vec<RankWitness>,
    },
}

impl OracleResult {
    pub fn is_true(&self) -> bool {
        matches!(self, OracleResult::CertifiedTrue(_))
    }

    pub fn best(&self) -> &RankWitness {
        match self {
            OracleResult::CertifiedTrue(w) => w,
            OracleResult::Inconclusive { best, .. } => best,
        }
    }

    pub fn rank(&self) -> u64 {
        self.best().rank
    }
}

pub const INCONCLUSIVE_NOTE: &str = "rank deficiency at random points over F_p is evidence of a defect, not a proof";

/// The `(prime, seed)` schedule: the configured seed, then `retries` reseeds,
/// then one attempt with the secondary prime.
pub fn attempt_schedule(cfg: &FieldConfig) -> Vec<(u64, u64)> {
    let mut out = vec![(cfg.prime, cfg.seed)];
    for t in 1..=cfg.retries as u64 {
        out.push((cfg.prime, splitmix64(cfg.seed.wrapping_add(t))));
    }
    if cfg.secondary_prime != cfg.prime {
        let t = cfg.retries as u64 + 1;
        out.push((cfg.secondary_prime, splitmix64(cfg.seed.wrapping_add(t))));
    }
    out
}

pub fn check_budget(st: &Statement, cfg: &FieldConfig) -> Result<(), OracleError> {
    let cols = st.ambient_dim();
    if cols > cfg.column_budget && !cfg.force {
        return Err(OracleError::BudgetExceeded {
            cols,
            budget: cfg.column_budget,
        });
    }
    if cols > u32::MAX as u128 {
        return Err(OracleError::BudgetExceeded {
            cols,
            budget: u32::MAX as u128,
        });
    }
    Ok(())
}

/// Runs the Terracini rank test on the canonical form of `st`.
pub fn terracini_oracle(st: &Statement, cfg: &FieldConfig) -> Result<OracleResult, OracleError> {
    cfg.validate()?;
    let st = st.canonical();
    check_budget(&st, cfg)?;
    let target = st.target_dim() as u64;
    let rows = terracini_rows(&st) as u64;
    let cols = st.ambient_dim() as u64;
    let mut attempts: Vec<RankWitness> = Vec::new();
    for (prime, seed) in attempt_schedule(cfg) {
        let rank = terracini_rank(&st, prime, seed, Some(target as usize)) as u64;
        let w = RankWitness {
            statement: st.clone(),
            prime,
            seed,
            rows,
            cols,
            rank,
            target,
        };
        if w.certifies() {
            return Ok(OracleResult::CertifiedTrue(w));
        }
        attempts.push(w);
    }
    let best = attempts
        .iter()
        .max_by_key(|w| w.rank)
        .cloned()
        .expect("at least one attempt");
    Ok(OracleResult::Inconclusive { best, attempts })
}
