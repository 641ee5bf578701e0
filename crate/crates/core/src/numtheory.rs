//! The Collatz function, its inverse relation, and forward stair indices.
//!
//! Forward loops never run unbounded: each one takes an explicit step
//! budget and reports [`Error::BudgetExceeded`] when it runs out. Orbits are
//! simulated on `u128` while they fit and promoted to [`Nat`] on overflow,
//! so results stay exact for any start value.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nat::Nat;

/// Default forward step budget.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// One application of the Collatz function: `x/2` for even `x`, `3x+1` otherwise.
pub fn collatz_step(x: &Nat) -> Result<Nat> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    Ok(step_unchecked(x))
}

fn step_unchecked(x: &Nat) -> Nat {
    let v = x.as_biguint();
    if v.is_even() {
        Nat::from(v >> 1u32)
    } else {
        Nat::from(v * 3u32 + 1u32)
    }
}

/// Preimages of a value under the Collatz function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimages {
    /// `2x`, always present.
    pub doubled: Nat,
    /// `(x-1)/3`, present only when it is an odd integer.
    pub divided: Option<Nat>,
}

impl Preimages {
    pub fn len(&self) -> usize {
        1 + usize::from(self.divided.is_some())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = &Nat> {
        std::iter::once(&self.doubled).chain(self.divided.as_ref())
    }

    pub fn into_vec(self) -> Vec<Nat> {
        let mut out = vec![self.doubled];
        out.extend(self.divided);
        out
    }
}

/// The inverse relation: `2x`, plus `(x-1)/3` when that is an odd integer.
pub fn inverse_step(x: &Nat) -> Result<Preimages> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    let v = x.as_biguint();
    let doubled = Nat::from(v << 1u32);
    let divided = if v.is_one() {
        None
    } else {
        let (q, r) = (v - 1u32).div_rem(&BigUint::from(3u32));
        (r == BigUint::from(0u32) && q.is_odd()).then(|| Nat::from(q))
    };
    Ok(Preimages { doubled, divided })
}

/// Returns the exponent `m` when `x = 2^m`.
pub fn is_power_of_two(x: &Nat) -> Option<u64> {
    x.power_of_two_exponent()
}

/// The orbit of `n` up to and including the first element satisfying `stop`.
///
/// At most `max_steps` applications are made; if `stop` still fails the
/// call returns [`Error::BudgetExceeded`].
pub fn orbit<F>(n: &Nat, stop: F, max_steps: u64) -> Result<Vec<Nat>>
where
    F: Fn(&Nat) -> bool,
{
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let mut out = vec![n.clone()];
    let mut steps = 0u64;
    loop {
        let last = out.last().expect("orbit is never empty");
        if stop(last) {
            return Ok(out);
        }
        if steps == max_steps {
            return Err(Error::BudgetExceeded {
                start: n.clone(),
                budget: max_steps,
            });
        }
        let next = step_unchecked(last);
        out.push(next);
        steps += 1;
    }
}

/// Membership in the invariant cycle `{1, 2, 4}`.
pub fn in_cycle(x: &Nat) -> bool {
    matches!(x.to_u64(), Some(1 | 2 | 4))
}

/// Runs the Collatz function from `start` until `hit` holds, returning the
/// number of applications and the value reached.
fn advance_until<S, B>(start: &Nat, max_steps: u64, hit_small: S, hit_big: B) -> Result<(u64, Nat)>
where
    S: Fn(u128) -> bool,
    B: Fn(&Nat) -> bool,
{
    if start.is_zero() {
        return Err(Error::Zero);
    }
    let exhausted = || Error::BudgetExceeded {
        start: start.clone(),
        budget: max_steps,
    };
    let mut steps = 0u64;
    let mut big = match start.to_u128() {
        Some(mut x) => loop {
            if hit_small(x) {
                return Ok((steps, Nat::from(x)));
            }
            if steps == max_steps {
                return Err(exhausted());
            }
            let next = if x & 1 == 0 {
                Some(x >> 1)
            } else {
                x.checked_mul(3).and_then(|v| v.checked_add(1))
            };
            match next {
                Some(v) => {
                    x = v;
                    steps += 1;
                }
                // 3x+1 overflowed; continue in arbitrary precision from x.
                None => break Nat::from(x),
            }
        },
        None => start.clone(),
    };
    loop {
        if hit_big(&big) {
            return Ok((steps, big));
        }
        if steps == max_steps {
            return Err(exhausted());
        }
        big = step_unchecked(&big);
        steps += 1;
    }
}

/// Number of steps until the orbit of `n` enters `{1, 2, 4}`; zero for
/// members of the cycle.
pub fn stair_index_icltz(n: &Nat, max_steps: u64) -> Result<u64> {
    advance_until(n, max_steps, |x| matches!(x, 1 | 2 | 4), in_cycle).map(|(j, _)| j)
}

/// Position of a value relative to the powers of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StairIndex {
    /// The value is itself a power of two.
    Invariant,
    /// `steps` applications reach `2^(2 * subtree)` and no earlier power of two.
    Placed { steps: u64, subtree: u32 },
}

impl StairIndex {
    pub fn steps(&self) -> u64 {
        match self {
            StairIndex::Invariant => 0,
            StairIndex::Placed { steps, .. } => *steps,
        }
    }

    pub fn subtree(&self) -> Option<u32> {
        match self {
            StairIndex::Invariant => None,
            StairIndex::Placed { subtree, .. } => Some(*subtree),
        }
    }
}

impl fmt::Display for StairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StairIndex::Invariant => f.write_str("invariant"),
            StairIndex::Placed { steps, subtree } => write!(f, "j={steps} k={subtree}"),
        }
    }
}

/// Stair index with respect to the powers of two.
///
/// The subtree index is `m/2` where `2^m` is the first power of two on the
/// orbit. An odd `m` aborts with [`Error::InternalContradiction`].
pub fn stair_index_iu(n: &Nat, max_steps: u64) -> Result<StairIndex> {
    let (steps, reached) = advance_until(
        n,
        max_steps,
        |x| x.is_power_of_two(),
        |x| x.power_of_two_exponent().is_some(),
    )?;
    if steps == 0 {
        return Ok(StairIndex::Invariant);
    }
    let m = reached
        .power_of_two_exponent()
        .expect("advance_until stops on a power of two");
    if m % 2 != 0 || m < 4 {
        return Err(Error::InternalContradiction {
            start: n.clone(),
            exponent: m,
        });
    }
    let subtree = u32::try_from(m / 2).expect("exponent fits in u32");
    Ok(StairIndex::Placed { steps, subtree })
}
