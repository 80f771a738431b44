//! Exact integer arithmetic for Fibonacci/Lucas numbers and base-g repdigits.

use crate::certreal::{CertOrd, CertReal, Expr, PrecisionPolicy};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::RwLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Fibonacci,
    Lucas,
}

impl SequenceKind {
    pub fn seeds(self) -> (BigUint, BigUint) {
        match self {
            SequenceKind::Fibonacci => (BigUint::zero(), BigUint::one()),
            SequenceKind::Lucas => (BigUint::from(2u32), BigUint::one()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Fibonacci => "fibonacci",
            SequenceKind::Lucas => "lucas",
        }
    }
}

/// A base-g repdigit: `digit` repeated `length` times, value
/// digit * (g^length - 1)/(g - 1).
///
/// Ordering is by (length, digit), which realizes the canonical
/// non-decreasing factor convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Repdigit {
    pub digit: u32,
    pub length: u32,
    pub base: u32,
}

impl PartialOrd for Repdigit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Repdigit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.length, self.digit, self.base).cmp(&(other.length, other.digit, other.base))
    }
}

impl Repdigit {
    pub fn new(digit: u32, length: u32, base: u32) -> Result<Self> {
        if base < 2 || digit < 1 || digit >= base || length < 1 {
            return Err(Error::InvalidRepdigit { digit, length, base });
        }
        Ok(Repdigit { digit, length, base })
    }

    /// Exact value digit * (g^length - 1)/(g - 1).
    pub fn value(&self) -> BigUint {
        let g = BigUint::from(self.base);
        let repunit = (g.pow(self.length) - BigUint::one()) / BigUint::from(self.base - 1);
        repunit * BigUint::from(self.digit)
    }
}

/// Checked constructor + value in one step (spec's repdigit_value).
pub fn repdigit_value(digit: u32, length: u32, base: u32) -> Result<BigUint> {
    Ok(Repdigit::new(digit, length, base)?.value())
}

/// A sequence value together with every canonical three-repdigit
/// factorization found for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub kind: SequenceKind,
    pub k: u64,
    #[serde(with = "crate::report::biguint_string")]
    pub value: BigUint,
    pub witnesses: BTreeSet<[Repdigit; 3]>,
}

impl PartialOrd for Solution {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Solution {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.value, self.k, self.kind).cmp(&(&other.value, other.k, other.kind))
    }
}

struct Table {
    values: Vec<BigUint>,
}

impl Table {
    fn ensure_len(&mut self, len: usize) {
        while self.values.len() < len {
            let n = self.values.len();
            let next = &self.values[n - 1] + &self.values[n - 2];
            self.values.push(next);
        }
    }

    fn ensure_value(&mut self, target: &BigUint) {
        while self.values.last().unwrap() < target {
            let n = self.values.len();
            let next = &self.values[n - 1] + &self.values[n - 2];
            self.values.push(next);
        }
    }
}

static FIB: RwLock<Option<Table>> = RwLock::new(None);
static LUCAS: RwLock<Option<Table>> = RwLock::new(None);

fn with_table<T>(kind: SequenceKind, f: impl FnOnce(&mut Table) -> T) -> T {
    let lock = match kind {
        SequenceKind::Fibonacci => &FIB,
        SequenceKind::Lucas => &LUCAS,
    };
    let mut guard = lock.write().unwrap();
    let table = guard.get_or_insert_with(|| {
        let (a, b) = kind.seeds();
        Table { values: vec![a, b] }
    });
    f(table)
}

/// Exact F_k or L_k by the integer recurrence.
pub fn seq_value(kind: SequenceKind, k: u64) -> BigUint {
    with_table(kind, |t| {
        t.ensure_len(k as usize + 1);
        t.values[k as usize].clone()
    })
}

/// The unique index k >= 1 with seq_value(kind, k) == n, if any.
/// For Fibonacci 1 the smaller witness index 1 is returned.
pub fn seq_membership(n: &BigUint, kind: SequenceKind) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    if n.is_one() {
        return Some(1); // F_1 = L_1 = 1
    }
    with_table(kind, |t| {
        t.ensure_value(n);
        // strictly increasing from k = 3 (Fibonacci: 2,3,5,..) or
        // k = 2 (Lucas: 3,4,7,..)
        let start = match kind {
            SequenceKind::Fibonacci => 3usize,
            SequenceKind::Lucas => 2usize,
        };
        if t.values[start - 1] == *n {
            return Some((start - 1) as u64);
        }
        match t.values[start..].binary_search(n) {
            Ok(i) => Some((i + start) as u64),
            Err(_) => None,
        }
    })
}

/// Compare scale * alpha^j against the integer c exactly, using
/// alpha^j = (L_j + F_j sqrt 5)/2.
fn exact_le_alpha_pow(scale: u64, j: i64, c: &BigUint) -> bool {
    let c = BigInt::from(c.clone());
    let s = BigInt::from(scale);
    let (l, f, sign_f) = if j >= 0 {
        (
            BigInt::from(seq_value(SequenceKind::Lucas, j as u64)),
            BigInt::from(seq_value(SequenceKind::Fibonacci, j as u64)),
            1,
        )
    } else if j == -1 {
        // alpha^-1 = (-1 + sqrt 5)/2
        (BigInt::from(-1), BigInt::one(), 1)
    } else {
        unreachable!("only exponents >= -1 are used");
    };
    // scale*(l + f sqrt5)/2 <= c  <=>  scale*f*sqrt5 <= 2c - scale*l
    let rhs = BigInt::from(2) * &c - &s * &l;
    let lhs_f = &s * &f * sign_f;
    if rhs.sign() == num_bigint::Sign::Minus {
        return false;
    }
    BigInt::from(5) * &lhs_f * &lhs_f <= &rhs * &rhs
}

/// Growth sandwich self-check: alpha^(k-2) <= F_k <= alpha^(k-1), and
/// alpha^(k-1) <= L_k <= 2 alpha^k, decided with certified reals and an
/// exact algebraic fallback for the equality boundary cases.
pub fn binet_sandwich_holds(kind: SequenceKind, k: u64) -> bool {
    assert!(k >= 1);
    let value = seq_value(kind, k);
    let (lo_scale, lo_exp, hi_scale, hi_exp) = match kind {
        SequenceKind::Fibonacci => (1u64, k as i64 - 2, 1u64, k as i64 - 1),
        SequenceKind::Lucas => (1, k as i64 - 1, 2, k as i64),
    };
    let check = |scale: u64, j: i64, want_le: bool| -> bool {
        // want_le: scale*alpha^j <= value, else scale*alpha^j >= value
        let policy = PrecisionPolicy { initial_bits: 128, max_bits: 1024, escalation_factor: 2 };
        let mut prec = policy.initial_bits;
        loop {
            let alpha = match Expr::golden_ratio().eval(prec) {
                Ok(a) => a,
                Err(_) => break,
            };
            let pow = if j >= 0 {
                alpha.pow_u64(j as u64)
            } else {
                match alpha.pow_u64((-j) as u64).recip() {
                    Ok(p) => p,
                    Err(_) => break,
                }
            };
            let lhs = pow.mul_bigint(&BigInt::from(scale));
            let rhs = CertReal::from_bigint(&BigInt::from(value.clone()), prec);
            match lhs.compare(&rhs) {
                CertOrd::Less => return want_le,
                CertOrd::Greater => return !want_le,
                CertOrd::Unknown => {
                    if prec >= policy.max_bits {
                        break;
                    }
                    prec *= policy.escalation_factor;
                }
            }
        }
        // Overlapping at high precision: likely an exact equality; decide
        // algebraically.
        if want_le {
            exact_le_alpha_pow(scale, j, &value)
        } else {
            // scale*alpha^j >= value  <=>  !(scale*alpha^j < value); at
            // equality both hold, and exact_le with swapped squaring decides.
            !exact_le_alpha_pow(scale, j, &(value.clone() - BigUint::one()))
                || exact_eq_alpha_pow(scale, j, &value)
        }
    };
    check(lo_scale, lo_exp, false) && check(hi_scale, hi_exp, true)
}

fn exact_eq_alpha_pow(scale: u64, j: i64, c: &BigUint) -> bool {
    // scale * alpha^j is irrational for j != 0, so equality only when j == 0.
    j == 0 && BigUint::from(scale) == *c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seq_values_match_known() {
        assert_eq!(seq_value(SequenceKind::Fibonacci, 12), BigUint::from(144u32));
        assert_eq!(seq_value(SequenceKind::Lucas, 0), BigUint::from(2u32));
        assert_eq!(seq_value(SequenceKind::Fibonacci, 0), BigUint::zero());
        assert_eq!(seq_value(SequenceKind::Lucas, 6), BigUint::from(18u32));
    }

    #[test]
    fn repdigit_values() {
        assert_eq!(repdigit_value(7, 3, 10).unwrap(), BigUint::from(777u32));
        assert_eq!(repdigit_value(1, 5, 2).unwrap(), BigUint::from(31u32));
        for g in 2..20 {
            assert_eq!(repdigit_value(1, 1, g).unwrap(), BigUint::one());
        }
        assert!(repdigit_value(0, 1, 10).is_err());
        assert!(repdigit_value(10, 1, 10).is_err());
        assert!(repdigit_value(1, 0, 10).is_err());
        assert!(repdigit_value(1, 1, 1).is_err());
    }

    #[test]
    fn membership_known_values() {
        assert_eq!(seq_membership(&BigUint::from(55u32), SequenceKind::Fibonacci), Some(10));
        assert_eq!(seq_membership(&BigUint::from(18u32), SequenceKind::Lucas), Some(6));
        assert_eq!(seq_membership(&BigUint::from(4u32), SequenceKind::Fibonacci), None);
        // canonical smallest index for the duplicated 1
        assert_eq!(seq_membership(&BigUint::one(), SequenceKind::Fibonacci), Some(1));
        // L_0 = 2 is not reachable with k >= 1
        assert_eq!(seq_membership(&BigUint::from(2u32), SequenceKind::Lucas), None);
        assert_eq!(seq_membership(&BigUint::from(2u32), SequenceKind::Fibonacci), Some(3));
    }

    #[test]
    fn binet_sandwich_small_and_large() {
        for k in 1..=30 {
            assert!(binet_sandwich_holds(SequenceKind::Fibonacci, k), "fib k={k}");
            assert!(binet_sandwich_holds(SequenceKind::Lucas, k), "lucas k={k}");
        }
        assert!(binet_sandwich_holds(SequenceKind::Fibonacci, 500));
        assert!(binet_sandwich_holds(SequenceKind::Lucas, 500));
    }

    #[test]
    fn solution_ordering_is_by_value() {
        let w = |d, l| Repdigit::new(d, l, 10).unwrap();
        let a = Solution {
            kind: SequenceKind::Fibonacci,
            k: 3,
            value: BigUint::from(2u32),
            witnesses: BTreeSet::from([[w(1, 1), w(1, 1), w(2, 1)]]),
        };
        let b = Solution {
            kind: SequenceKind::Fibonacci,
            k: 10,
            value: BigUint::from(55u32),
            witnesses: BTreeSet::new(),
        };
        assert!(a < b);
    }

    proptest! {
        #[test]
        fn recurrence_holds(kind in prop_oneof![Just(SequenceKind::Fibonacci), Just(SequenceKind::Lucas)],
                            k in 0u64..300) {
            let a = seq_value(kind, k);
            let b = seq_value(kind, k + 1);
            let c = seq_value(kind, k + 2);
            prop_assert_eq!(a + b, c);
        }

        #[test]
        fn repdigit_digits_all_equal(digit in 1u32..16, length in 1u32..12, base in 2u32..17) {
            prop_assume!(digit < base);
            let v = repdigit_value(digit, length, base).unwrap();
            let digits = v.to_radix_le(base);
            prop_assert_eq!(digits.len(), length as usize);
            prop_assert!(digits.iter().all(|&d| d as u32 == digit));
        }

        #[test]
        fn membership_round_trip(kind in prop_oneof![Just(SequenceKind::Fibonacci), Just(SequenceKind::Lucas)],
                                 k in 3u64..200) {
            let v = seq_value(kind, k);
            prop_assert_eq!(seq_membership(&v, kind), Some(k));
        }
    }
}
