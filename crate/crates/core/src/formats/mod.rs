//! Formats, statements and the closed-form arithmetic around them.
//!
//! A [`Format`] `(n_1, ..., n_k)` names the Segre product `P^{n_1} x ... x P^{n_k}`.
//! A [`Statement`] `T(n; s; a)` asks whether the tangent spaces at `s` generic
//! points together with `a_i` generic fibre spaces of the `i`-th factor span
//! the expected dimension.
//!
//! Every dimension in this crate is affine (the dimension of the cone).
//! Projective values are `affine - 1` and only appear at the presentation layer.

mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::{parse_format, parse_statement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("a format needs at least one factor")]
    Empty,
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),
    #[error("fibre vector has {got} entries but the format has {expected} factors")]
    ArityMismatch { expected: usize, got: usize },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("operation needs at least two factors")]
    TooFewFactors,
    #[error("format {0} is balanced")]
    Balanced(Format),
    #[error("d = {d} is outside the defective range {low} < d < {high}")]
    OutOfRange { d: u128, low: u128, high: u128 },
}

/// Ordered tuple of projective factor dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Format {
    dims: Vec<u32>,
}

impl Format {
    pub fn new(dims: Vec<u32>) -> Result<Self, FormatError> {
        if dims.is_empty() {
            return Err(FormatError::Empty);
        }
        checked_ambient(&dims)?;
        checked_sum(&dims)?;
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    /// `1 + sum n_i`, the affine dimension of the cone over the Segre variety.
    pub fn cone_dim(&self) -> u128 {
        1 + self.dims.iter().map(|&n| n as u128).sum::<u128>()
    }

    pub fn ambient_dim(&self) -> u128 {
        ambient_of(&self.dims)
    }

    /// `(affine, projective)` expected dimension of the `s`-th secant variety.
    pub fn expected_secant_dim(&self, s: u32) -> (u128, i128) {
        let affine = self.ambient_dim().min(s as u128 * self.cone_dim());
        (affine, affine as i128 - 1)
    }

    /// `ceil(prod(n_i+1) / (1 + sum n_i))`: the generic rank if nothing is defective.
    pub fn expected_fill_count(&self) -> u128 {
        self.ambient_dim().div_ceil(self.cone_dim())
    }

    pub fn is_numerically_perfect(&self) -> bool {
        self.ambient_dim().is_multiple_of(self.cone_dim())
    }

    /// Dims sorted ascending, as in the balancedness definitions.
    pub fn ascending(&self) -> Vec<u32> {
        let mut d = self.dims.clone();
        d.sort_unstable();
        d
    }

    /// Product of `n_i + 1` and sum of `n_i` over all but the largest factor.
    fn head_product_and_sum(&self) -> Result<(u128, u128, u128), FormatError> {
        if self.k() < 2 {
            return Err(FormatError::TooFewFactors);
        }
        let asc = self.ascending();
        let (last, head) = asc.split_last().expect("k >= 2");
        let prod = ambient_of(head);
        let sum: u128 = head.iter().map(|&n| n as u128).sum();
        Ok((prod, sum, *last as u128))
    }

    /// `prod_{i<k}(n_i+1) - sum_{i<k} n_i` with factors sorted ascending.
    pub fn balance_bound(&self) -> Result<u128, FormatError> {
        let (prod, sum, _) = self.head_product_and_sum()?;
        Ok(prod - sum)
    }

    pub fn is_balanced(&self) -> Result<bool, FormatError> {
        let (_, _, last) = self.head_product_and_sum()?;
        Ok(last <= self.balance_bound()?)
    }

    pub fn is_unbalanced(&self) -> Result<bool, FormatError> {
        let (_, _, last) = self.head_product_and_sum()?;
        Ok(last >= 1 && last > self.balance_bound()?)
    }

    /// Open interval `(low, high)` of secant orders `d` for which an unbalanced
    /// format is known to be defective. Empty when `low + 1 >= high`.
    pub fn unbalanced_range(&self) -> Result<(u128, u128), FormatError> {
        let (prod, sum, last) = self.head_product_and_sum()?;
        Ok((prod - sum, prod.min(last + 1)))
    }

    /// `F(d) = d * (prod_{i<k}(n_i+1) + n_k + 1 - d)`: the dimension of the span of
    /// `d` tangent spaces, all of which lie in a sub-Segre with a `(d-1)`-dimensional
    /// last factor.
    pub fn unbalanced_span_dim(&self, d: u128) -> Result<u128, FormatError> {
        let (low, high) = self.unbalanced_range()?;
        if !(low < d && d < high) {
            return Err(FormatError::OutOfRange { d, low, high });
        }
        let (prod, _, last) = self.head_product_and_sum()?;
        Ok(d * (prod + last + 1 - d))
    }

    pub fn unbalanced_typical_rank(&self) -> Result<u128, FormatError> {
        if !self.is_unbalanced()? {
            return Err(FormatError::Balanced(self.clone()));
        }
        let (prod, _, last) = self.head_product_and_sum()?;
        Ok((last + 1).min(prod))
    }

    /// `k >= 3` is where the classification results live; smaller formats
    /// are still computed but flagged in reports.
    pub fn in_classical_scope(&self) -> bool {
        self.k() >= 3
    }

    /// Canonical order: descending.
    pub fn canonical(&self) -> Format {
        let mut dims = self.dims.clone();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        Format { dims }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.dims)
    }
}

impl FromStr for Format {
    type Err = FormatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_format(s)
    }
}

impl Serialize for Format {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.dims.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dims = Vec::<u32>::deserialize(deserializer)?;
        Format::new(dims).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Abundance {
    Subabundant,
    Superabundant,
    Equiabundant,
}

impl Abundance {
    /// True for `Subabundant` and `Equiabundant`.
    pub fn is_sub(self) -> bool {
        !matches!(self, Abundance::Superabundant)
    }

    /// True for `Superabundant` and `Equiabundant`.
    pub fn is_super(self) -> bool {
        !matches!(self, Abundance::Subabundant)
    }
}

impl fmt::Display for Abundance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Abundance::Subabundant => "subabundant",
            Abundance::Superabundant => "superabundant",
            Abundance::Equiabundant => "equiabundant",
        };
        f.write_str(s)
    }
}

/// `T(n_1..n_k; s; a_1..a_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Statement {
    format: Format,
    s: u32,
    a: Vec<u32>,
}

impl Statement {
    pub fn new(format: Format, s: u32, a: Vec<u32>) -> Result<Self, FormatError> {
        if a.len() != format.k() {
            return Err(FormatError::ArityMismatch {
                expected: format.k(),
                got: a.len(),
            });
        }
        checked_param_count(&format, s, &a)?;
        Ok(Self { format, s, a })
    }

    /// Shorthand for tests and tables: `Statement::of(&[3,3,3], 6, &[0,0,0])`.
    pub fn of(dims: &[u32], s: u32, a: &[u32]) -> Result<Self, FormatError> {
        Self::new(Format::new(dims.to_vec())?, s, a.to_vec())
    }

    /// `T(n; s; 0^k)`.
    pub fn secant(format: Format, s: u32) -> Result<Self, FormatError> {
        let k = format.k();
        Self::new(format, s, vec![0; k])
    }

    pub fn format(&self) -> &Format {
        &self.format
    }

    pub fn dims(&self) -> &[u32] {
        self.format.dims()
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn k(&self) -> usize {
        self.format.k()
    }

    pub fn ambient_dim(&self) -> u128 {
        self.format.ambient_dim()
    }

    /// `s(1 + sum n_i) + sum a_i (n_i + 1)`: the dimension the span would have if
    /// every contribution were independent.
    pub fn param_count(&self) -> u128 {
        param_of(self.dims(), self.s, &self.a)
    }

    /// `D = min(param_count, ambient)`.
    pub fn target_dim(&self) -> u128 {
        self.param_count().min(self.ambient_dim())
    }

    pub fn abundance(&self) -> Abundance {
        match self.param_count().cmp(&self.ambient_dim()) {
            Ordering::Less => Abundance::Subabundant,
            Ordering::Greater => Abundance::Superabundant,
            Ordering::Equal => Abundance::Equiabundant,
        }
    }

    /// Factor records `(n_i, a_i)` in the current order.
    pub fn records(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.dims().iter().copied().zip(self.a.iter().copied())
    }

    /// Jointly sorts `(n_i, a_i)` descending. Truth is invariant under this.
    pub fn canonical(&self) -> Statement {
        self.canonical_with_permutation().0
    }

    /// Canonical form plus `perm` with `canonical.record(j) == self.record(perm[j])`.
    pub fn canonical_with_permutation(&self) -> (Statement, Vec<usize>) {
        let mut perm: Vec<usize> = (0..self.k()).collect();
        perm.sort_by(|&x, &y| {
            (self.dims()[y], self.a[y])
                .cmp(&(self.dims()[x], self.a[x]))
                .then(x.cmp(&y))
        });
        let dims = perm.iter().map(|&i| self.dims()[i]).collect();
        let a = perm.iter().map(|&i| self.a[i]).collect();
        let st = Statement {
            format: Format { dims },
            s: self.s,
            a,
        };
        (st, perm)
    }

    pub fn is_canonical(&self) -> bool {
        self.records()
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0] >= w[1])
    }

    /// Same statement with factors permuted: `out.record(j) == self.record(perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Statement, FormatError> {
        if perm.len() != self.k() {
            return Err(FormatError::ArityMismatch {
                expected: self.k(),
                got: perm.len(),
            });
        }
        let dims = perm.iter().map(|&i| self.dims()[i]).collect();
        let a = perm.iter().map(|&i| self.a[i]).collect();
        Statement::new(Format::new(dims)?, self.s, a)
    }

    /// True when both statements agree up to a joint permutation of factor records.
    pub fn equivalent(&self, other: &Statement) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("T(")?;
        write_list(f, self.dims())?;
        write!(f, ";{};", self.s)?;
        write_list(f, &self.a)?;
        f.write_str(")")
    }
}

impl FromStr for Statement {
    type Err = FormatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_statement(s)
    }
}

impl Serialize for Statement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Statement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[u32]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

fn ambient_of(dims: &[u32]) -> u128 {
    dims.iter().map(|&n| n as u128 + 1).product()
}

fn param_of(dims: &[u32], s: u32, a: &[u32]) -> u128 {
    let cone = 1 + dims.iter().map(|&n| n as u128).sum::<u128>();
    let fibres: u128 = dims
        .iter()
        .zip(a)
        .map(|(&n, &ai)| ai as u128 * (n as u128 + 1))
        .sum();
    s as u128 * cone + fibres
}

fn checked_ambient(dims: &[u32]) -> Result<u128, FormatError> {
    dims.iter().try_fold(1u128, |acc, &n| {
        acc.checked_mul(n as u128 + 1)
            .ok_or(FormatError::Overflow("ambient dimension exceeds 128 bits"))
    })
}

fn checked_sum(dims: &[u32]) -> Result<u128, FormatError> {
    dims.iter().try_fold(1u128, |acc, &n| {
        acc.checked_add(n as u128)
            .ok_or(FormatError::Overflow("cone dimension exceeds 128 bits"))
    })
}

fn checked_param_count(format: &Format, s: u32, a: &[u32]) -> Result<u128, FormatError> {
    let overflow = || FormatError::Overflow("parameter count exceeds 128 bits");
    let mut total = (s as u128).checked_mul(format.cone_dim()).ok_or_else(overflow)?;
    for (&n, &ai) in format.dims().iter().zip(a) {
        let term = (ai as u128).checked_mul(n as u128 + 1).ok_or_else(overflow)?;
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(total)
}
