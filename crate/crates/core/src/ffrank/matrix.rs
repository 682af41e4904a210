//! Dense row-major matrices over `F_p` and exact rank by row echelon insertion.

use super::field::inv_mod;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub(crate) fn with_capacity(rows: usize, cols: usize) -> Self {
        Self {
            rows: 0,
            cols,
            data: Vec::with_capacity(rows * cols),
        }
    }

    pub(crate) fn push_row(&mut self, row: &[u64]) {
        debug_assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Reorders columns: `out[:, j] = self[:, perm[j]]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Matrix {
        assert_eq!(perm.len(), self.cols);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, &src) in perm.iter().enumerate() {
                out.data[i * self.cols + j] = self.data[i * self.cols + src];
            }
        }
        out
    }
}

/// Exact rank of `m` over `F_p`; entries must already be reduced.
pub fn rank_mod_p(m: &Matrix, p: u64) -> usize {
    rank_mod_p_until(m, p, None)
}

/// Like [`rank_mod_p`] but returns as soon as the rank reaches `stop`.
pub fn rank_mod_p_until(m: &Matrix, p: u64, stop: Option<usize>) -> usize {
    let mut echelon = Echelon::new(m.cols, p, m.rows.min(m.cols));
    let limit = stop.unwrap_or(usize::MAX).min(m.cols);
    for i in 0..m.rows {
        if echelon.rank() >= limit {
            break;
        }
        echelon.insert(m.row(i));
    }
    echelon.rank()
}

/// `x += g * y` without reduction, on the widest vector unit available.
/// Callers guarantee no overflow; wrapping ops keep the loop vectorizable
/// when overflow checks are compiled in.
fn axpy(x: &mut [u64], g: u64, y: &[u32]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { axpy_avx2(x, g, y) };
            return;
        }
    }
    axpy_plain(x, g, y);
}

#[inline(always)]
fn axpy_plain(x: &mut [u64], g: u64, y: &[u32]) {
    for (x, &y) in x.iter_mut().zip(y) {
        *x = x.wrapping_add(g.wrapping_mul(y as u64));
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn axpy_avx2(x: &mut [u64], g: u64, y: &[u32]) {
    axpy_plain(x, g, y);
}

/// Row echelon form built one row at a time. Pivot rows are stored from their
/// pivot column onwards and normalized to a leading 1. Entries fit in `u32`
/// since every accepted prime is below 2^32.
pub struct Echelon {
    cols: usize,
    p: u64,
    pivots: Vec<Option<Box<[u32]>>>,
    rank: usize,
    lazy: bool,
    scratch: Vec<u64>,
}

impl Echelon {
    /// `max_rank` bounds how many pivot subtractions can hit a single entry,
    /// which decides whether unreduced accumulation stays inside 64 bits.
    pub fn new(cols: usize, p: u64, max_rank: usize) -> Self {
        let step = (p as u128 - 1) * (p as u128 - 1);
        let lazy = step * (max_rank as u128 + 1) + p as u128 <= u64::MAX as u128;
        Self {
            cols,
            p,
            pivots: vec![None; cols],
            rank: 0,
            lazy,
            scratch: vec![0; cols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduces `row` against the current pivots; returns true if it was independent.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let p = self.p;
        let r = &mut self.scratch;
        r.copy_from_slice(row);
        for c in 0..self.cols {
            let f = r[c] % p;
            if f == 0 {
                continue;
            }
            match &self.pivots[c] {
                Some(piv) => {
                    let g = p - f;
                    let tail = &mut r[c..];
                    if self.lazy {
                        axpy(tail, g, piv);
                    } else {
                        for (x, &y) in tail.iter_mut().zip(piv.iter()) {
                            *x = (*x % p + g * y as u64) % p;
                        }
                    }
                }
                None => {
                    let inv = inv_mod(f, p);
                    let piv: Box<[u32]> = r[c..].iter().map(|&x| (x % p * inv % p) as u32).collect();
                    self.pivots[c] = Some(piv);
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}
