//! Closed-form generation of subtree stairs.
//!
//! Every node `j` levels below the root `Y_k/3` (with `Y_k = 2^(2k) - 1`)
//! of the over-approximating binary tree has the form
//!
//! ```text
//! (2^f * Y_k - sum_{r=1}^{q-1} 2^{e_r} * 3^r) / 3^q,    f + q = j
//! ```
//!
//! where `e_1 >= e_2 >= ... >= e_{q-1}` and every `e_r < f`. A stair is
//! produced by enumerating those exponent sequences for each `q`,
//! evaluating the term exactly, and running the verifier on the term's
//! code. There are `C(j-2, q-1)` candidates per `q`, so `2^(j-2)` per stair.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bvc::{verify_bvc, Bvc, Rejection};
use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::par::Execution;

/// `Y_k = 2^(2k) - 1`; divisible by three with an odd quotient for `k >= 2`.
pub fn y_k(k: u32) -> Result<Nat> {
    if k < 2 {
        return Err(Error::InvalidSubtree(k));
    }
    Ok(Nat::from(Nat::pow2(2 * u64::from(k)).into_biguint() - 1u32))
}

/// All non-increasing sequences of length `len` over `0..=max`, in
/// descending lexicographic order. There are `C(len + max, len)` of them.
pub fn enumerate_exponent_sequences(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    descend(len, max, &mut current, &mut out);
    out
}

fn descend(len: usize, cap: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for x in (0..=cap).rev() {
        current.push(x);
        descend(len, x, current, out);
        current.pop();
    }
}

/// Symbolic stair term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermExpr {
    pub k: u32,
    pub j: u32,
    /// Exponent of the denominator `3^q`.
    pub q: u32,
    /// `exps[r-1]` is the power of two paired with `3^r`.
    pub exps: Vec<u32>,
}

impl TermExpr {
    pub fn new(k: u32, j: u32, q: u32, exps: Vec<u32>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSubtree(k));
        }
        if j == 0 {
            return Err(Error::InvalidStair(j));
        }
        let q_ok = if j == 1 { q == 1 } else { (1..j).contains(&q) };
        if !q_ok {
            return Err(Error::InvalidTerm(format!("q = {q} out of range for j = {j}")));
        }
        if exps.len() != (q - 1) as usize {
            return Err(Error::InvalidTerm(format!(
                "expected {} exponents, got {}",
                q - 1,
                exps.len()
            )));
        }
        if exps.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidTerm(format!("exponents {exps:?} increase")));
        }
        if let Some(&top) = exps.first() {
            if top >= j - q {
                return Err(Error::InvalidTerm(format!("exponent {top} exceeds {}", j - q - 1)));
            }
        }
        Ok(TermExpr { k, j, q, exps })
    }

    /// Leading power-of-two exponent `f = j - q`.
    pub fn f(&self) -> u32 {
        self.j - self.q
    }
}

/// `2^f * Y_k - sum` as (is_negative, magnitude), and the denominator `3^q`.
fn numerator_parts(expr: &TermExpr) -> (bool, BigUint, BigUint) {
    let yk = (BigUint::from(1u32) << (2 * expr.k)) - 1u32;
    let lead = yk << expr.f();
    let mut pow3 = BigUint::from(1u32);
    let mut subtrahend = BigUint::zero();
    for &e in &expr.exps {
        pow3 *= 3u32;
        subtrahend += &pow3 << e;
    }
    pow3 *= 3u32;
    if subtrahend > lead {
        (true, subtrahend - lead, pow3)
    } else {
        (false, lead - subtrahend, pow3)
    }
}

/// Exact value of a term, or `None` when the numerator is not a positive
/// multiple of `3^q`.
pub fn term_value(expr: &TermExpr) -> Option<Nat> {
    let (negative, numerator, denominator) = numerator_parts(expr);
    if negative || numerator.is_zero() {
        return None;
    }
    let (value, rem) = numerator.div_rem(&denominator);
    rem.is_zero().then(|| Nat::from(value))
}

/// Path code of a term: `(f-1) - e_1` zeros, then for each `r` a one
/// followed by `e_r - e_{r+1}` zeros (`e_q` read as 0). Empty for `j <= 2`.
pub fn bvc_from_exponents(expr: &TermExpr) -> Bvc {
    let mut code = Bvc::empty();
    if expr.j <= 2 {
        return code;
    }
    let f = expr.f();
    let lead = expr.exps.first().copied().unwrap_or(0);
    for _ in 0..(f - 1 - lead) {
        code.push(false);
    }
    for (r, &e) in expr.exps.iter().enumerate() {
        let next = expr.exps.get(r + 1).copied().unwrap_or(0);
        code.push(true);
        for _ in 0..(e - next) {
            code.push(false);
        }
    }
    code
}

/// Why a candidate is not in the stair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RejectReason {
    /// The numerator is not a positive multiple of `3^q`.
    NonIntegerNumerator,
    Verification(Rejection),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::NonIntegerNumerator => f.write_str("non-integer-numerator"),
            RejectReason::Verification(r) => r.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Accepted,
    Rejected(RejectReason),
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StairTerm {
    pub expr: TermExpr,
    /// Present whenever the term evaluates to an integer.
    pub value: Option<Nat>,
    pub bvc: Bvc,
    pub status: Status,
}

impl StairTerm {
    pub fn is_accepted(&self) -> bool {
        self.status == Status::Accepted
    }

    /// The unreduced fraction as text, e.g. `57/9` or `-12/729`.
    pub fn fraction(&self) -> String {
        let (negative, numerator, denominator) = numerator_parts(&self.expr);
        let sign = if negative { "-" } else { "" };
        format!("{sign}{numerator}/{denominator}")
    }
}

/// All candidates of one stair, accepted and rejected, ordered by `q` and
/// then by exponent sequence (descending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stair {
    pub k: u32,
    pub j: u32,
    pub terms: Vec<StairTerm>,
}

impl Stair {
    pub fn accepted(&self) -> impl Iterator<Item = &StairTerm> {
        self.terms.iter().filter(|t| t.is_accepted())
    }

    pub fn rejected(&self) -> impl Iterator<Item = &StairTerm> {
        self.terms.iter().filter(|t| !t.is_accepted())
    }

    pub fn accepted_values(&self) -> impl Iterator<Item = &Nat> {
        self.accepted().filter_map(|t| t.value.as_ref())
    }
}

fn evaluate(expr: TermExpr) -> StairTerm {
    let bvc = bvc_from_exponents(&expr);
    let value = term_value(&expr);
    let status = match &value {
        None => Status::Rejected(RejectReason::NonIntegerNumerator),
        Some(v) => match verify_bvc(v, &bvc).rejection {
            None => Status::Accepted,
            Some(r) => Status::Rejected(RejectReason::Verification(r)),
        },
    };
    StairTerm {
        expr,
        value,
        bvc,
        status,
    }
}

/// Independent work unit: one `q`, and for `q >= 2` one leading exponent.
#[derive(Debug, Clone, Copy)]
struct Task {
    q: u32,
    lead: Option<u32>,
}

fn tasks(j: u32) -> Vec<Task> {
    if j == 1 {
        return vec![Task { q: 1, lead: None }];
    }
    let mut out = Vec::new();
    for q in 1..j {
        if q == 1 {
            out.push(Task { q, lead: None });
        } else {
            for lead in (0..j - q).rev() {
                out.push(Task { q, lead: Some(lead) });
            }
        }
    }
    out
}

fn run_task(k: u32, j: u32, task: Task) -> Vec<StairTerm> {
    match task.lead {
        None => vec![evaluate(TermExpr {
            k,
            j,
            q: task.q,
            exps: Vec::new(),
        })],
        Some(lead) => enumerate_exponent_sequences(task.q as usize - 2, lead)
            .into_iter()
            .map(|tail| {
                let mut exps = Vec::with_capacity(task.q as usize - 1);
                exps.push(lead);
                exps.extend(tail);
                evaluate(TermExpr { k, j, q: task.q, exps })
            })
            .collect(),
    }
}

/// The `j`-th stair of the subtree rooted at `Y_k/3`.
pub fn generate_stair(k: u32, j: u32) -> Result<Stair> {
    generate_stair_with(k, j, Execution::default())
}

pub fn generate_stair_with(k: u32, j: u32, exec: Execution) -> Result<Stair> {
    if k < 2 {
        return Err(Error::InvalidSubtree(k));
    }
    if j == 0 {
        return Err(Error::InvalidStair(j));
    }
    let terms = exec
        .map(tasks(j), |task| run_task(k, j, task))
        .into_iter()
        .flatten()
        .collect();
    Ok(Stair { k, j, terms })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn term(k: u32, j: u32, q: u32, exps: &[u32]) -> TermExpr {
        TermExpr::new(k, j, q, exps.to_vec()).unwrap()
    }

    /// Every tuple in `0..=max`^len that never increases, in descending
    /// lexicographic order (filter of the full product).
    fn brute_sequences(len: usize, max: u32) -> Vec<Vec<u32>> {
        let base = max as usize + 1;
        let total = base.pow(len as u32);
        let mut all: Vec<Vec<u32>> = (0..total)
            .map(|mut idx| {
                let mut v = vec![0; len];
                for slot in v.iter_mut().rev() {
                    *slot = (idx % base) as u32;
                    idx /= base;
                }
                v
            })
            .filter(|v| v.windows(2).all(|w| w[0] >= w[1]))
            .collect();
        all.sort_by(|a, b| b.cmp(a));
        all
    }

    fn binom(n: u64, r: u64) -> u64 {
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn y_k_examples() {
        assert_eq!(y_k(2).unwrap(), Nat::from(15u64));
        assert_eq!(y_k(3).unwrap(), Nat::from(63u64));
        assert_eq!(y_k(1), Err(Error::InvalidSubtree(1)));
    }

    #[test]
    fn y_k_divisible_with_odd_quotient() {
        for k in 2..=1000 {
            let (q, r) = y_k(k).unwrap().into_biguint().div_rem(&BigUint::from(3u32));
            assert!(r.is_zero(), "k = {k}");
            assert!(q.is_odd(), "k = {k}");
        }
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(
            enumerate_exponent_sequences(2, 2),
            vec![vec![2, 2], vec![2, 1], vec![2, 0], vec![1, 1], vec![1, 0], vec![0, 0]]
        );
        assert_eq!(enumerate_exponent_sequences(0, 5), vec![Vec::<u32>::new()]);
        assert_eq!(
            enumerate_exponent_sequences(3, 1),
            vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]
        );
    }

    #[test]
    fn sequences_match_brute_force() {
        for len in 0..=5 {
            for max in 0..=5 {
                let got = enumerate_exponent_sequences(len, max);
                assert_eq!(got, brute_sequences(len, max), "len={len} max={max}");
                assert_eq!(got.len() as u64, binom(len as u64 + max as u64, len as u64));
            }
        }
    }

    #[test]
    fn term_value_examples() {
        assert_eq!(term_value(&term(2, 1, 1, &[])), Some(Nat::from(5u64)));
        assert_eq!(term_value(&term(2, 4, 2, &[1])), Some(Nat::from(6u64)));
        assert_eq!(term_value(&term(2, 4, 2, &[0])), None);
    }

    #[test]
    fn negative_numerators_are_rejected() {
        // 2*15 - (3 + 9 + 27 + ...) goes negative quickly.
        let expr = term(2, 8, 7, &[0; 6]);
        assert_eq!(term_value(&expr), None);
        let t = evaluate(expr);
        assert!(t.fraction().starts_with('-'));
        assert_eq!(t.status, Status::Rejected(RejectReason::NonIntegerNumerator));
    }

    #[test]
    fn term_validation() {
        assert!(TermExpr::new(2, 4, 2, vec![2]).is_err());
        assert!(TermExpr::new(2, 6, 3, vec![0, 1]).is_err());
        assert!(TermExpr::new(2, 4, 4, vec![0, 0, 0]).is_err());
        assert!(TermExpr::new(2, 4, 2, vec![]).is_err());
        assert!(TermExpr::new(2, 1, 1, vec![]).is_ok());
    }

    #[test]
    fn bvc_examples() {
        assert_eq!(bvc_from_exponents(&term(2, 5, 3, &[1, 0])).to_string(), "101");
        assert_eq!(bvc_from_exponents(&term(2, 6, 1, &[])).to_string(), "0000");
        assert_eq!(bvc_from_exponents(&term(2, 6, 5, &[0, 0, 0, 0])).to_string(), "1111");
        assert!(bvc_from_exponents(&term(2, 1, 1, &[])).is_empty());
        assert!(bvc_from_exponents(&term(2, 2, 1, &[])).is_empty());
    }

    #[test]
    fn bvc_counts_bits() {
        for j in 3..=12 {
            for t in generate_stair(2, j).unwrap().terms {
                assert_eq!(t.bvc.len(), (j - 2) as usize);
                assert_eq!(t.bvc.ones(), (t.expr.q - 1) as usize);
                assert_eq!(t.bvc.zeros(), (t.expr.f() - 1) as usize);
            }
        }
    }

    #[test]
    fn bvc_is_a_bijection_onto_all_strings() {
        for j in 2..=14 {
            let codes: BTreeSet<String> = generate_stair(3, j)
                .unwrap()
                .terms
                .iter()
                .map(|t| t.bvc.to_string())
                .collect();
            assert_eq!(codes.len(), 1 << (j - 2), "j = {j}");
        }
    }

    #[test]
    fn stair_examples() {
        let values = |k, j| -> BTreeSet<u64> {
            generate_stair(k, j)
                .unwrap()
                .accepted_values()
                .map(|v| v.to_u64().unwrap())
                .collect()
        };
        assert_eq!(values(2, 3), BTreeSet::from([20, 3]));
        assert_eq!(values(2, 4), BTreeSet::from([40, 6]));
        assert_eq!(values(2, 6), BTreeSet::from([160, 26, 24]));

        let four = generate_stair(2, 4).unwrap();
        let rejected: Vec<_> = four.rejected().map(|t| (t.expr.q, t.expr.exps.clone())).collect();
        assert_eq!(rejected, vec![(2, vec![0]), (3, vec![0, 0])]);
        let fractions: Vec<_> = four.rejected().map(|t| t.fraction()).collect();
        assert_eq!(fractions, vec!["57/9", "18/27"]);

        let six = generate_stair(2, 6).unwrap();
        let four_term = six.terms.iter().find(|t| t.value == Some(Nat::from(4u64))).unwrap();
        assert_eq!(four_term.expr.q, 3);
        assert_eq!(
            four_term.status,
            Status::Rejected(RejectReason::Verification(Rejection::PowerOfTwo))
        );
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(generate_stair(2, 1).unwrap().terms.len(), 1);
        for j in 2..=14 {
            let stair = generate_stair(4, j).unwrap();
            assert_eq!(stair.terms.len(), 1 << (j - 2));
            for q in 1..j {
                let n = stair.terms.iter().filter(|t| t.expr.q == q).count() as u64;
                assert_eq!(n, binom(u64::from(j - 2), u64::from(q - 1)));
            }
        }
    }

    #[test]
    fn output_order_is_q_then_descending_exponents() {
        let stair = generate_stair(2, 9).unwrap();
        for w in stair.terms.windows(2) {
            let (a, b) = (&w[0].expr, &w[1].expr);
            assert!(a.q < b.q || (a.q == b.q && a.exps > b.exps));
        }
    }

    #[test]
    fn sequential_and_default_agree() {
        for j in [1, 2, 7, 12] {
            assert_eq!(
                generate_stair_with(3, j, Execution::Sequential).unwrap(),
                generate_stair(3, j).unwrap()
            );
        }
    }

    /// The five closed-form families, each written out independently.
    fn case_family(j: u32, q: u32) -> Vec<(Vec<u32>, String)> {
        let j2 = (j - 2) as usize;
        match q {
            1 => vec![(vec![], "0".repeat(j2))],
            _ if q == j - 1 => vec![(vec![0; j2], "1".repeat(j2))],
            2 => (0..j - 2)
                .rev()
                .map(|i| {
                    let i = i as usize;
                    let code = format!("{}1{}", "0".repeat(j2 - 1 - i), "0".repeat(i));
                    (vec![i as u32], code)
                })
                .collect(),
            _ if q == j - 2 => (0..=j - 3)
                .rev()
                .map(|m| {
                    let m = m as usize;
                    let mut exps = vec![1; m];
                    exps.resize(j2 - 1, 0);
                    // A single zero sliding from msb to lsb.
                    let mut code = vec!['1'; j2];
                    code[m] = '0';
                    (exps, code.into_iter().collect())
                })
                .collect(),
            _ => brute_sequences(q as usize - 1, j - q - 1)
                .into_iter()
                .map(|e| {
                    let code = bvc_from_exponents(&term(2, j, q, &e)).to_string();
                    (e, code)
                })
                .collect(),
        }
    }

    #[test]
    fn unified_enumeration_reproduces_each_case() {
        for k in [2, 5] {
            for j in 7..=14 {
                let stair = generate_stair(k, j).unwrap();
                for q in 1..j {
                    let got: Vec<(Vec<u32>, String)> = stair
                        .terms
                        .iter()
                        .filter(|t| t.expr.q == q)
                        .map(|t| (t.expr.exps.clone(), t.bvc.to_string()))
                        .collect();
                    assert_eq!(got, case_family(j, q), "k={k} j={j} q={q}");
                }
            }
        }
    }

    #[test]
    fn single_lead_term_in_middle_cases() {
        // (2^{j-q} Y_k - sum 3^i) / 3^q carries code 0..01..1.
        for j in 7..=12 {
            for q in 3..j - 2 {
                let t = term(2, j, q, &vec![0; q as usize - 1]);
                let code = bvc_from_exponents(&t).to_string();
                let want = format!("{}{}", "0".repeat((j - q - 1) as usize), "1".repeat((q - 1) as usize));
                assert_eq!(code, want);
            }
        }
    }
}
