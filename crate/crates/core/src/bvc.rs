//! Binary verification codes and the ancestor-chain verifier.
//!
//! A code records the backward path from the stair-2 node `2*Y_k/3` to a
//! term, left to right: `0` is multiply-by-two, `1` is subtract-one then
//! divide-by-three. Verification scans the code from its last bit back to
//! its first, recomputing each parent with the forward rules and checking
//! that the Collatz function would actually have taken that step.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::nat::Nat;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bvc(Vec<bool>);

impl Bvc {
    pub fn new(bits: Vec<bool>) -> Self {
        Bvc(bits)
    }

    pub fn empty() -> Self {
        Bvc(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Copy with the last (least significant) bit inverted.
    pub fn flip_lsb(&self) -> Option<Bvc> {
        let mut bits = self.0.clone();
        let last = bits.last_mut()?;
        *last = !*last;
        Some(Bvc(bits))
    }
}

impl fmt::Display for Bvc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bvc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bvc(\"{self}\")")
    }
}

impl FromStr for Bvc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::ParseBvc(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bvc)
    }
}

/// Which forward-rule constraint a bit broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ParityRule {
    /// Bit `1` but the child is even: `3x+1` would not apply.
    EvenUnder1,
    /// Bit `1` with both child and parent odd. Unreachable over exact
    /// integers since `3*odd+1` is even; kept for fidelity.
    BothOddUnder1,
    /// Bit `0` but the child is odd: `x/2` would not apply.
    OddUnder0,
}

impl ParityRule {
    pub fn code(&self) -> &'static str {
        match self {
            ParityRule::EvenUnder1 => "even-under-1",
            ParityRule::BothOddUnder1 => "both-odd-under-1",
            ParityRule::OddUnder0 => "odd-under-0",
        }
    }
}

/// Why a candidate failed verification. Bit positions are 1-based from
/// the left end of the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Rejection {
    NotNatural,
    PowerOfTwo,
    AncestorPowerOfTwo { bit: usize },
    ParityViolation { bit: usize, rule: ParityRule },
    NonIntegerAncestor { bit: usize },
}

impl fmt::Display for Rejection {
    /// Stable machine-readable code.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NotNatural => f.write_str("not-natural"),
            Rejection::PowerOfTwo => f.write_str("power-of-two"),
            Rejection::AncestorPowerOfTwo { bit } => write!(f, "ancestor-power-of-two:bit={bit}"),
            Rejection::ParityViolation { bit, rule } => {
                write!(f, "parity-violation:bit={bit}:{}", rule.code())
            }
            Rejection::NonIntegerAncestor { bit } => write!(f, "non-integer-ancestor:bit={bit}"),
        }
    }
}

/// Outcome of [`verify_bvc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// `None` when accepted.
    pub rejection: Option<Rejection>,
    /// Ancestor steps performed.
    pub steps: usize,
    /// Last value reached: on acceptance, the top of the reconstructed chain.
    pub ancestor: Nat,
}

impl Verification {
    pub fn accepted(&self) -> bool {
        self.rejection.is_none()
    }
}

/// Checks that `x` is reachable along `code` from the chain top by valid
/// inverse steps.
///
/// Rejections are ordinary results. The chain top is reported but not
/// compared against any expected root; callers that know `k` check it.
pub fn verify_bvc(x: &Nat, code: &Bvc) -> Verification {
    let reject = |rejection, steps, ancestor: &Nat| Verification {
        rejection: Some(rejection),
        steps,
        ancestor: ancestor.clone(),
    };
    if x.is_zero() {
        return reject(Rejection::NotNatural, 0, x);
    }
    if x.power_of_two_exponent().is_some() {
        return reject(Rejection::PowerOfTwo, 0, x);
    }

    let mut current = x.clone();
    let mut steps = 0;
    for (idx, &bit) in code.bits().iter().enumerate().rev() {
        let pos = idx + 1;
        let parent = if bit {
            Nat::from(current.as_biguint() * 3u32 + 1u32)
        } else {
            // x/2 on an odd child is a parity failure before it is an
            // integrality failure.
            if current.is_odd() {
                return reject(
                    Rejection::ParityViolation {
                        bit: pos,
                        rule: ParityRule::OddUnder0,
                    },
                    steps,
                    &current,
                );
            }
            if current.is_zero() {
                return reject(Rejection::NonIntegerAncestor { bit: pos }, steps, &current);
            }
            Nat::from(current.as_biguint() >> 1u32)
        };
        if parent.power_of_two_exponent().is_some() {
            return reject(Rejection::AncestorPowerOfTwo { bit: pos }, steps, &current);
        }
        if bit && current.is_even() {
            return reject(
                Rejection::ParityViolation {
                    bit: pos,
                    rule: ParityRule::EvenUnder1,
                },
                steps,
                &current,
            );
        }
        if bit && current.is_odd() && parent.is_odd() {
            return reject(
                Rejection::ParityViolation {
                    bit: pos,
                    rule: ParityRule::BothOddUnder1,
                },
                steps,
                &current,
            );
        }
        current = parent;
        steps += 1;
    }
    Verification {
        rejection: None,
        steps,
        ancestor: current,
    }
}
