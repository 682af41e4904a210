//! Reduction rules. Each function builds the statement(s) a rule reduces to and
//! checks the rule's side conditions; none of them decides truth.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::{Abundance, Format, FormatError, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("split arithmetic: {0}")]
    Arithmetic(String),
    #[error("{role} {statement} is {actual}, rule needs {needed}")]
    Abundance {
        role: &'static str,
        statement: Statement,
        actual: Abundance,
        needed: &'static str,
    },
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("direction: {0}")]
    Direction(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Split of factor `factor` into `n1 + n2 + 1`, with `s = s1 + s2` and
/// `a_j = a1[j] + a2[j]` for `j != factor`. `a1[factor]` and `a2[factor]` are 0:
/// the split factor keeps all of its fibre conditions on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitChoice {
    pub factor: usize,
    pub n1: u32,
    pub n2: u32,
    pub s1: u32,
    pub s2: u32,
    pub a1: Vec<u32>,
    pub a2: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitKind {
    Sub,
    Super,
    Equi,
}

fn arith(msg: impl Into<String>) -> RuleError {
    RuleError::Arithmetic(msg.into())
}

/// `T(n1, rest; s1; a_i + s2, a1)` and `T(n2, rest; s2; a_i + s1, a2)`, in the
/// parent's factor order.
pub fn split_children(st: &Statement, c: &SplitChoice) -> Result<(Statement, Statement), RuleError> {
    let k = st.k();
    let i = c.factor;
    if i >= k {
        return Err(arith(format!("factor {i} out of range for k = {k}")));
    }
    if c.a1.len() != k || c.a2.len() != k {
        return Err(arith("fibre splits must have one entry per factor"));
    }
    let ni = st.dims()[i];
    if c.n1 as u64 + c.n2 as u64 + 1 != ni as u64 {
        return Err(arith(format!("{} + {} + 1 != n_{i} = {ni}", c.n1, c.n2)));
    }
    if c.s1 as u64 + c.s2 as u64 != st.s() as u64 {
        return Err(arith(format!("{} + {} != s = {}", c.s1, c.s2, st.s())));
    }
    if c.a1[i] != 0 || c.a2[i] != 0 {
        return Err(arith("the split factor's own fibre entries must be 0"));
    }
    for j in (0..k).filter(|&j| j != i) {
        if c.a1[j] as u64 + c.a2[j] as u64 != st.a()[j] as u64 {
            return Err(arith(format!(
                "{} + {} != a_{j} = {}",
                c.a1[j],
                c.a2[j],
                st.a()[j]
            )));
        }
    }
    let ai = st.a()[i];
    let child = |n: u32, s: u32, other_s: u32, a: &[u32]| -> Result<Statement, RuleError> {
        let mut dims = st.dims().to_vec();
        dims[i] = n;
        let mut av = a.to_vec();
        av[i] = ai
            .checked_add(other_s)
            .ok_or(FormatError::Overflow("fibre count"))?;
        Ok(Statement::new(Format::new(dims)?, s, av)?)
    };
    Ok((child(c.n1, c.s1, c.s2, &c.a1)?, child(c.n2, c.s2, c.s1, &c.a2)?))
}

fn require(role: &'static str, st: &Statement, ok: bool, needed: &'static str) -> Result<(), RuleError> {
    if ok {
        Ok(())
    } else {
        Err(RuleError::Abundance {
            role,
            statement: st.clone(),
            actual: st.abundance(),
            needed,
        })
    }
}

/// Parent true if both children are true; everything subabundant.
pub fn sub_split(st: &Statement, c: &SplitChoice) -> Result<(Statement, Statement), RuleError> {
    let (l, r) = split_children(st, c)?;
    require("parent", st, st.abundance().is_sub(), "subabundant")?;
    require("left child", &l, l.abundance().is_sub(), "subabundant")?;
    require("right child", &r, r.abundance().is_sub(), "subabundant")?;
    Ok((l, r))
}

/// Parent true if both children are true; everything superabundant.
pub fn super_split(st: &Statement, c: &SplitChoice) -> Result<(Statement, Statement), RuleError> {
    let (l, r) = split_children(st, c)?;
    require("parent", st, st.abundance().is_super(), "superabundant")?;
    require("left child", &l, l.abundance().is_super(), "superabundant")?;
    require("right child", &r, r.abundance().is_super(), "superabundant")?;
    Ok((l, r))
}

pub fn equi_split(st: &Statement, c: &SplitChoice) -> Result<(Statement, Statement), RuleError> {
    let (l, r) = split_children(st, c)?;
    let eq = |x: &Statement| x.abundance() == Abundance::Equiabundant;
    require("parent", st, eq(st), "equiabundant")?;
    require("left child", &l, eq(&l), "equiabundant")?;
    require("right child", &r, eq(&r), "equiabundant")?;
    Ok((l, r))
}

pub fn apply_split(kind: SplitKind, st: &Statement, c: &SplitChoice) -> Result<(Statement, Statement), RuleError> {
    match kind {
        SplitKind::Sub => sub_split(st, c),
        SplitKind::Super => super_split(st, c),
        SplitKind::Equi => equi_split(st, c),
    }
}

/// `T(0, ..; s; a_i, ..) <=> T(0, ..; s; 0, ..)` for subabundant statements.
/// Returns `st` unchanged when `a_i` is already 0.
pub fn drop_conditions(st: &Statement, i: usize) -> Result<Statement, RuleError> {
    check_factor(st, i)?;
    if st.dims()[i] != 0 {
        return Err(RuleError::Precondition(format!("n_{i} = {} is not 0", st.dims()[i])));
    }
    if st.a()[i] == 0 {
        return Ok(st.clone());
    }
    require("statement", st, st.abundance().is_sub(), "subabundant")?;
    let mut a = st.a().to_vec();
    a[i] = 0;
    Ok(Statement::new(st.format().clone(), st.s(), a)?)
}

/// Removes a factor with `n_i = 0, a_i = 0`. `None` means nothing is left, which
/// is trivially true.
pub fn drop_zero_factor(st: &Statement, i: usize) -> Result<Option<Statement>, RuleError> {
    check_factor(st, i)?;
    if st.dims()[i] != 0 || st.a()[i] != 0 {
        return Err(RuleError::Precondition(format!(
            "factor {i} has (n, a) = ({}, {}), needs (0, 0)",
            st.dims()[i],
            st.a()[i]
        )));
    }
    if st.k() == 1 {
        return Ok(None);
    }
    Ok(Some(remove_factor(st, i)?))
}

/// `T(n; s; a)` true implies `T(n, 0; s; a, A)` true.
pub fn append_zero_factor(st: &Statement, big_a: u32) -> Result<Statement, RuleError> {
    let mut dims = st.dims().to_vec();
    dims.push(0);
    let mut a = st.a().to_vec();
    a.push(big_a);
    Ok(Statement::new(Format::new(dims)?, st.s(), a)?)
}

/// Statement with factor `i` deleted.
pub fn remove_factor(st: &Statement, i: usize) -> Result<Statement, RuleError> {
    check_factor(st, i)?;
    if st.k() == 1 {
        return Err(RuleError::Precondition("cannot remove the only factor".into()));
    }
    let mut dims = st.dims().to_vec();
    dims.remove(i);
    let mut a = st.a().to_vec();
    a.remove(i);
    Ok(Statement::new(Format::new(dims)?, st.s(), a)?)
}

fn check_factor(st: &Statement, i: usize) -> Result<(), RuleError> {
    if i >= st.k() {
        Err(RuleError::Precondition(format!("factor {i} out of range for k = {}", st.k())))
    } else {
        Ok(())
    }
}

fn dominates(big: &[u32], small: &[u32]) -> bool {
    big.iter().zip(small).all(|(b, s)| b >= s)
}

/// From a true `st`, the same `(s, a)` on `target`: upwards for subabundant `st`,
/// downwards for superabundant `st`. The result keeps the abundance class.
pub fn monotone_format(st: &Statement, target: &Format) -> Result<Statement, RuleError> {
    if target.k() != st.k() {
        return Err(RuleError::Direction(format!(
            "target has {} factors, statement has {}",
            target.k(),
            st.k()
        )));
    }
    let out = Statement::new(target.clone(), st.s(), st.a().to_vec())?;
    let ab = st.abundance();
    let up = dominates(target.dims(), st.dims());
    let down = dominates(st.dims(), target.dims());
    if ab.is_sub() && up && out.abundance().is_sub() {
        return Ok(out);
    }
    if ab.is_super() && down && out.abundance().is_super() {
        return Ok(out);
    }
    Err(RuleError::Direction(format!(
        "{st} is {ab}; cannot move to format ({target})"
    )))
}

/// From a true `st`: lower `(s, a)` if subabundant, raise them if superabundant.
pub fn monotone_sa(st: &Statement, s: u32, a: &[u32]) -> Result<Statement, RuleError> {
    if a.len() != st.k() {
        return Err(FormatError::ArityMismatch {
            expected: st.k(),
            got: a.len(),
        }
        .into());
    }
    let out = Statement::new(st.format().clone(), s, a.to_vec())?;
    let ab = st.abundance();
    let lower = s <= st.s() && dominates(st.a(), a);
    let higher = s >= st.s() && dominates(a, st.a());
    if (ab.is_sub() && lower) || (ab.is_super() && higher) {
        return Ok(out);
    }
    Err(RuleError::Direction(format!(
        "{st} is {ab}; cannot move to s = {s}, a = {a:?}"
    )))
}
