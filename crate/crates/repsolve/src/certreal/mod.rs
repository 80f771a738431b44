//! Certified real arithmetic: arbitrary-precision midpoints with rigorous
//! error radii (ball arithmetic).
//!
//! Every operation returns an enclosure that provably contains the true
//! value. Comparisons and integer extraction either succeed with a
//! certificate or signal that the caller should escalate precision.

mod dyadic;
pub mod expr;

pub use dyadic::{div_dyadic, ln_dyadic, sqrt_dyadic, Dyadic};
pub use expr::Expr;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

const GUARD_BITS: u64 = 32;
const RADIUS_BITS: u64 = 32;

/// Working-precision schedule: start small, escalate on ambiguity signals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: 192,
            max_bits: 1 << 20,
            escalation_factor: 2,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(initial_bits: u32, max_bits: u32, escalation_factor: u32) -> Result<Self> {
        if initial_bits == 0 || initial_bits > max_bits || escalation_factor < 2 {
            return Err(Error::Usage(format!(
                "invalid precision policy: initial {initial_bits}, max {max_bits}, factor {escalation_factor}"
            )));
        }
        Ok(PrecisionPolicy { initial_bits, max_bits, escalation_factor })
    }
}

/// Retry `f` at escalating precisions whenever it reports an ambiguity.
pub fn with_escalation<T>(
    policy: &PrecisionPolicy,
    context: &str,
    mut f: impl FnMut(u32) -> Result<T>,
) -> Result<T> {
    let mut prec = policy.initial_bits;
    loop {
        match f(prec) {
            Err(e) if e.is_precision_signal() => {
                if prec >= policy.max_bits {
                    return Err(Error::PrecisionExhausted {
                        bits: prec,
                        context: context.to_string(),
                    });
                }
                prec = prec.saturating_mul(policy.escalation_factor).min(policy.max_bits);
            }
            other => return other,
        }
    }
}

/// Outcome of an interval comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertOrd {
    Less,
    Greater,
    /// Intervals overlap: escalate precision to decide.
    Unknown,
}

/// A real number known to lie within `midpoint ± radius`.
#[derive(Clone, Debug)]
pub struct CertReal {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

impl CertReal {
    fn make(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        debug_assert!(!rad.is_negative());
        CertReal { mid, rad, prec }.normalize()
    }

    fn normalize(mut self) -> Self {
        let target = self.prec as u64 + GUARD_BITS;
        if self.mid.mant_bits() > target {
            let (m, e) = self.mid.round_to_bits(target);
            self.mid = m;
            self.rad = self.rad.add(&e);
        }
        if self.rad.mant_bits() > RADIUS_BITS {
            self.rad = self.rad.ceil_to_bits(RADIUS_BITS);
        }
        self
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn midpoint(&self) -> &Dyadic {
        &self.mid
    }

    pub fn radius(&self) -> &Dyadic {
        &self.rad
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn exact(d: Dyadic, prec: u32) -> Self {
        CertReal::make(d, Dyadic::zero(), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        CertReal::exact(Dyadic::from_bigint(v.clone()), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        CertReal::exact(Dyadic::from_i64(v), prec)
    }

    /// Enclosure of p/q (exact when q divides p at working precision).
    pub fn from_ratio(p: &BigInt, q: &BigInt, prec: u32) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (v, e) = div_dyadic(&Dyadic::from_bigint(p.clone()), &Dyadic::from_bigint(q.clone()), prec);
        Ok(CertReal::make(v, e, prec))
    }

    pub fn neg(&self) -> Self {
        CertReal::make(self.mid.neg(), self.rad.clone(), self.prec)
    }

    pub fn abs(&self) -> Self {
        // |x| lies within | |mid| - rad | .. |mid| + rad; the ball form keeps
        // the same radius around |mid|, which is a valid (if slightly loose
        // near zero) enclosure only when the interval does not straddle 0.
        // For a straddling interval, center at the upper end instead.
        if self.contains_zero() {
            let hi = self.upper().abs();
            let lo_abs = self.lower().abs();
            let top = if hi.cmp(&lo_abs) == Ordering::Less { lo_abs } else { hi };
            // enclosure [0, top]
            let half = Dyadic::new(top.mant.clone(), top.exp - 1);
            CertReal::make(half.clone(), half, self.prec)
        } else {
            CertReal::make(self.mid.abs(), self.rad.clone(), self.prec)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        CertReal::make(
            self.mid.add(&other.mid),
            self.rad.add(&other.rad),
            self.prec.max(other.prec),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mid = self.mid.mul(&other.mid);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        CertReal::make(mid, rad, self.prec.max(other.prec))
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        CertReal::make(self.mid.mul_bigint(k), self.rad.mul_bigint(&k.abs()), self.prec)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_bigint(&BigInt::from(k))
    }

    pub fn contains_zero(&self) -> bool {
        let lo = self.lower();
        let hi = self.upper();
        (lo.is_negative() || lo.is_zero()) && !hi.is_negative()
    }

    pub fn is_certainly_positive(&self) -> bool {
        !self.lower().is_negative() && !self.lower().is_zero()
    }

    pub fn is_certainly_negative(&self) -> bool {
        self.upper().is_negative()
    }

    /// Strict ordering when the intervals are disjoint, `Unknown` otherwise.
    pub fn compare(&self, other: &Self) -> CertOrd {
        if self.upper().cmp(&other.lower()) == Ordering::Less {
            CertOrd::Less
        } else if self.lower().cmp(&other.upper()) == Ordering::Greater {
            CertOrd::Greater
        } else {
            CertOrd::Unknown
        }
    }

    /// Multiplicative inverse; requires an interval certified away from 0.
    pub fn recip(&self) -> Result<Self> {
        let lo = self.lower();
        let hi = self.upper();
        if lo.is_negative() != hi.is_negative() || lo.is_zero() || hi.is_zero() {
            return Err(Error::AmbiguousSign);
        }
        let prec = self.prec;
        let (q, qe) = div_dyadic(&Dyadic::one(), &self.mid, prec);
        // |1/x - 1/mid| = |x - mid| / (|x||mid|) <= rad / (lo_abs * |mid|)
        let lo_abs = if lo.is_negative() { hi.abs() } else { lo.clone() };
        let denom = lo_abs.mul(&self.mid.abs());
        let (re, ree) = div_dyadic(&self.rad, &denom, 64);
        let rad = re.add(&ree).add(&qe);
        Ok(CertReal::make(q, rad, prec))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Square root; requires a certainly nonnegative interval.
    pub fn sqrt(&self) -> Result<Self> {
        let lo = self.lower();
        if lo.is_negative() {
            return Err(Error::AmbiguousSign);
        }
        let prec = self.prec;
        let (v, ve) = sqrt_dyadic(&self.mid, prec);
        if self.rad.is_zero() {
            return Ok(CertReal::make(v, ve, prec));
        }
        // |sqrt x - sqrt mid| = |x - mid| / (sqrt x + sqrt mid) <= rad / sqrt(lo)
        let (slo, _) = sqrt_dyadic(&lo, 64);
        if slo.is_zero() {
            // interval reaches 0: fall back to the trivial enclosure [0, sqrt(hi)]
            let (shi, she) = sqrt_dyadic(&self.upper(), prec);
            let top = shi.add(&she);
            let half = Dyadic::new(top.mant.clone(), top.exp - 1);
            return Ok(CertReal::make(half.clone(), half, prec));
        }
        let (re, ree) = div_dyadic(&self.rad, &slo, 64);
        Ok(CertReal::make(v, ve.add(&re).add(&ree), prec))
    }

    /// Natural logarithm; the interval must be certified positive.
    pub fn ln(&self) -> Result<Self> {
        let lo = self.lower();
        if lo.is_negative() || lo.is_zero() {
            return Err(Error::AmbiguousSign);
        }
        let prec = self.prec;
        let (v, ve) = ln_dyadic(&self.mid, prec);
        if self.rad.is_zero() {
            return Ok(CertReal::make(v, ve, prec));
        }
        // |ln x - ln mid| <= rad / lo
        let (re, ree) = div_dyadic(&self.rad, &lo, 64);
        Ok(CertReal::make(v, ve.add(&re).add(&ree), prec))
    }

    /// x^e by repeated squaring.
    pub fn pow_u64(&self, e: u64) -> Self {
        let mut result = CertReal::from_i64(1, self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Certified floor: `Some` only when every point of the interval has the
    /// same floor.
    pub fn floor_certain(&self) -> Option<BigInt> {
        let f_lo = self.lower().floor_bigint();
        let f_hi = self.upper().floor_bigint();
        if f_lo == f_hi {
            Some(f_lo)
        } else {
            None
        }
    }

    /// Nearest integer to the midpoint (no certification: any integer works
    /// as a reference point for |x - J| measurements).
    pub fn round_midpoint(&self) -> BigInt {
        self.mid.add(&Dyadic::pow2(-1)).floor_bigint()
    }

    /// Certified distance to the nearest integer, ||x||.
    ///
    /// Requires radius < 1/4. Fails with `AmbiguousNearest` when the interval
    /// is not contained in one half-integer window [n-1/2, n+1/2].
    pub fn dist_nearest_int(&self) -> Result<Self> {
        let quarter = Dyadic::pow2(-2);
        if self.rad.cmp(&quarter) != Ordering::Less {
            return Err(Error::Unresolved);
        }
        let n = self.round_midpoint();
        let d = self.mid.sub(&Dyadic::from_bigint(n)).abs();
        let half = Dyadic::pow2(-1);
        let hi = d.add(&self.rad);
        if hi.cmp(&half) == Ordering::Greater {
            return Err(Error::AmbiguousNearest);
        }
        let lo = d.sub(&self.rad);
        let lo = if lo.is_negative() { Dyadic::zero() } else { lo };
        let sum = lo.add(&hi);
        let diff = hi.sub(&lo);
        let mid = Dyadic::new(sum.mant, sum.exp - 1);
        let rad = Dyadic::new(diff.mant, diff.exp - 1);
        Ok(CertReal::make(mid, rad, self.prec))
    }

    /// (midpoint decimal, radius decimal rounded up, working bits).
    pub fn to_parts(&self, sig: usize) -> (String, String, u32) {
        (
            self.mid.to_decimal(sig, false),
            self.rad.to_decimal(sig.min(6), true),
            self.prec,
        )
    }
}

/// Certified natural log of an exact rational.
///
/// Enclosure contains ln(p/q); for p == q the result is exactly zero.
pub fn ln_rational(p: &BigInt, q: &BigInt, prec: u32) -> Result<CertReal> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p.is_zero() || p.is_negative() != q.is_negative() {
        return Err(Error::AmbiguousSign);
    }
    let (p, q) = (p.abs(), q.abs());
    if p == q {
        return Ok(CertReal::exact(Dyadic::zero(), prec));
    }
    let (lp, lpe) = ln_dyadic(&Dyadic::from_bigint(p), prec);
    let (lq, lqe) = ln_dyadic(&Dyadic::from_bigint(q), prec);
    Ok(CertReal::make(lp.sub(&lq), lpe.add(&lqe), prec))
}

/// Certified natural log of a ball (spec operation over CertReal input).
pub fn ln_ball(x: &CertReal) -> Result<CertReal> {
    x.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn assert_contains(x: &CertReal, dec_num: i64, dec_den: i64) {
        // checks the exact rational dec_num/dec_den lies in [lo, hi]
        let v = CertReal::from_ratio(&BigInt::from(dec_num), &BigInt::from(dec_den), 256).unwrap();
        assert!(x.lower().cmp(&v.upper()) != Ordering::Greater);
        assert!(x.upper().cmp(&v.lower()) != Ordering::Less);
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        let x = ln_rational(&BigInt::from(1), &BigInt::from(1), 64).unwrap();
        assert!(x.midpoint().is_zero());
        assert!(x.radius().is_zero());
        assert!(x.radius().cmp(&Dyadic::pow2(-60)) == Ordering::Less);
    }

    #[test]
    fn log_ten_contains_reference() {
        // ln 10 = 2.302585092994045684...
        let x = ln_rational(&BigInt::from(10), &BigInt::from(1), 128).unwrap();
        assert_contains(&x, 2302585092994045684, 1000000000000000000);
        // radius comfortably below 2^-124 * ln 10
        assert!(x.radius().cmp(&Dyadic::pow2(-124)) == Ordering::Less);
    }

    #[test]
    fn log_golden_ratio_contains_reference() {
        // phi = (1 + sqrt 5)/2; ln phi = 0.4812118250596034...
        let five = CertReal::from_i64(5, 160);
        let phi = five
            .sqrt()
            .unwrap()
            .add(&CertReal::from_i64(1, 160))
            .mul(&CertReal::from_ratio(&BigInt::from(1), &BigInt::from(2), 160).unwrap());
        let l = phi.ln().unwrap();
        assert_contains(&l, 4812118250596034475, 10000000000000000000);
        assert!(l.radius().cmp(&Dyadic::pow2(-124)) == Ordering::Less);
    }

    #[test]
    fn dist_nearest_int_examples() {
        // x enclosing 3.0 exactly -> enclosure of 0
        let x = CertReal::from_i64(3, 64);
        let d = x.dist_nearest_int().unwrap();
        assert!(d.midpoint().is_zero() && d.radius().is_zero());

        // x enclosing 2.75 with tiny radius -> enclosure of 0.25
        let x = CertReal::from_ratio(&BigInt::from(11), &BigInt::from(4), 128).unwrap();
        let d = x.dist_nearest_int().unwrap();
        assert_contains(&d, 1, 4);

        // x enclosing 0.499999999 -> enclosure of 0.499999999
        let x = CertReal::from_ratio(&BigInt::from(499999999), &BigInt::from(1000000000), 128).unwrap();
        let d = x.dist_nearest_int().unwrap();
        assert_contains(&d, 499999999, 1000000000);
        // midpoint lies in [0, 1/2]
        assert!(!d.midpoint().is_negative());
        assert!(d.midpoint().cmp(&Dyadic::pow2(-1)) != Ordering::Greater);
    }

    #[test]
    fn dist_nearest_int_ambiguous_on_straddle() {
        // interval [0.4, 0.6] straddles 1/2
        let mid = CertReal::from_ratio(&BigInt::from(1), &BigInt::from(2), 64).unwrap();
        let fat = CertReal::make(mid.midpoint().clone(), Dyadic::pow2(-3), 64);
        assert_eq!(fat.dist_nearest_int().unwrap_err(), Error::AmbiguousNearest);
    }

    #[test]
    fn dist_requires_quarter_radius() {
        let fat = CertReal::make(Dyadic::from_i64(3), Dyadic::pow2(-1), 64);
        assert!(fat.dist_nearest_int().unwrap_err().is_precision_signal());
    }

    #[test]
    fn dist_shift_invariance() {
        // ||x + n|| == ||x|| for integer n
        let x = CertReal::from_ratio(&BigInt::from(2718281828), &BigInt::from(10000000000i64), 128).unwrap();
        let d1 = x.dist_nearest_int().unwrap();
        let d2 = x.add(&CertReal::from_i64(7, 128)).dist_nearest_int().unwrap();
        let diff = d1.sub(&d2);
        assert!(diff.abs().upper().cmp(&Dyadic::pow2(-100)) == Ordering::Less);
    }

    #[test]
    fn compare_examples() {
        let one = CertReal::from_i64(1, 64);
        let two = CertReal::from_i64(2, 64);
        assert_eq!(one.compare(&two), CertOrd::Less);
        assert_eq!(two.compare(&one), CertOrd::Greater);
        // identical intervals overlap
        assert_eq!(one.compare(&one), CertOrd::Unknown);
        // epsilon = 0.00809526 +/- 1e-12 vs 0
        let eps = CertReal::from_ratio(&BigInt::from(809526), &BigInt::from(100000000), 128).unwrap();
        let zero = CertReal::from_i64(0, 128);
        assert_eq!(eps.compare(&zero), CertOrd::Greater);
    }

    #[test]
    fn monotone_refinement() {
        // increasing precision never increases the radius
        let mut last: Option<Dyadic> = None;
        for prec in [64u32, 128, 256, 512] {
            let l = ln_rational(&BigInt::from(7), &BigInt::from(3), prec).unwrap();
            if let Some(prev) = last {
                assert!(l.radius().cmp(&prev) != Ordering::Greater);
            }
            last = Some(l.radius().clone());
        }
    }

    #[test]
    fn containment_across_precisions() {
        // cr_log at low precision contains the midpoint of a 4x evaluation
        for (p, q) in [(3i64, 2i64), (22, 7), (355, 113), (123456, 1001)] {
            let lo = ln_rational(&BigInt::from(p), &BigInt::from(q), 96).unwrap();
            let hi = ln_rational(&BigInt::from(p), &BigInt::from(q), 384).unwrap();
            assert!(lo.lower().cmp(hi.midpoint()) != Ordering::Greater);
            assert!(lo.upper().cmp(hi.midpoint()) != Ordering::Less);
        }
    }

    #[test]
    fn escalation_runs_until_policy_cap() {
        let policy = PrecisionPolicy::new(64, 256, 2).unwrap();
        let mut seen = Vec::new();
        let r: Result<()> = with_escalation(&policy, "test", |p| {
            seen.push(p);
            Err(Error::Unresolved)
        });
        assert!(matches!(r, Err(Error::PrecisionExhausted { bits: 256, .. })));
        assert_eq!(seen, vec![64, 128, 256]);
    }

    #[test]
    fn ball_division_encloses() {
        let a = CertReal::from_i64(1, 128);
        let b = CertReal::from_i64(3, 128);
        let q = a.div(&b).unwrap();
        assert_contains(&q, 1, 3);
        let prod = q.mul(&CertReal::from_i64(3, 128));
        assert_contains(&prod, 1, 1);
    }
}
