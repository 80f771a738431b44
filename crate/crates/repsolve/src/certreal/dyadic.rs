//! Exact dyadic numbers (`mant * 2^exp`) and the rounding/series kernels that
//! back the certified-real layer.
//!
//! Every kernel returns an approximation together with an explicit absolute
//! error bound, both as dyadics, so the caller can assemble rigorous balls.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

/// An exact binary number `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic { mant: v, exp: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic { mant: BigInt::from(v), exp: 0 }
    }

    /// 2^k for any (possibly negative) k.
    pub fn pow2(k: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: k }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Significant bits of the mantissa (0 for zero).
    pub fn mant_bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// Exponent b with |value| in [2^(b-1), 2^b); None for zero.
    pub fn mag_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mant_bits() as i64 + self.exp)
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Drop trailing zero bits of the mantissa (value unchanged).
    pub fn compact(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &other.mant << (other.exp - exp) as u64;
        Dyadic { mant: a + b, exp }.compact()
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Dyadic {
        Dyadic { mant: &self.mant * k, exp: self.exp }
    }

    pub fn cmp(&self, other: &Dyadic) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) | (Sign::NoSign, Sign::Plus) => {
                return Ordering::Less
            }
            (Sign::Plus, Sign::NoSign) | (Sign::Plus, Sign::Minus) | (Sign::NoSign, Sign::Minus) => {
                return Ordering::Greater
            }
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        // Same nonzero sign: magnitude exponents decide unless they tie.
        let (ba, bb) = (self.mag_exp().unwrap(), other.mag_exp().unwrap());
        if ba != bb {
            let ord = ba.cmp(&bb);
            return if self.mant.is_negative() { ord.reverse() } else { ord };
        }
        match self.sub(other).mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    /// Floor to an exact integer.
    pub fn floor_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            // BigInt >> rounds toward -infinity, which is floor.
            &self.mant >> (-self.exp) as u64
        }
    }

    /// Ceiling to an exact integer.
    pub fn ceil_bigint(&self) -> BigInt {
        self.neg().floor_bigint().neg_ref()
    }

    /// Round mantissa to at most `bits` bits, to nearest (ties away from zero).
    /// Returns the rounded value and a bound on the rounding error.
    pub fn round_to_bits(&self, bits: u64) -> (Dyadic, Dyadic) {
        let nb = self.mant_bits();
        if nb <= bits {
            return (self.clone(), Dyadic::zero());
        }
        let k = nb - bits;
        let (sign, mag) = (self.mant.sign(), self.mant.magnitude());
        let mut q: BigUint = mag >> k;
        let half_bit = (mag >> (k - 1)) & BigUint::one();
        if half_bit.is_zero() == false {
            q += BigUint::one();
        }
        let mant = BigInt::from_biguint(if sign == Sign::Minus { Sign::Minus } else { Sign::Plus }, q);
        let val = Dyadic { mant, exp: self.exp + k as i64 }.compact();
        // |error| <= 2^(k-1) * 2^exp
        let err = Dyadic::pow2(self.exp + k as i64 - 1);
        (val, err)
    }

    /// For nonnegative dyadics: round UP to a mantissa of at most `bits` bits.
    pub fn ceil_to_bits(&self, bits: u64) -> Dyadic {
        debug_assert!(!self.is_negative());
        let nb = self.mant_bits();
        if nb <= bits {
            return self.clone();
        }
        let k = nb - bits;
        let mag = self.mant.magnitude();
        let mut q: BigUint = mag >> k;
        let mask = (BigUint::one() << k) - BigUint::one();
        if !(mag & mask).is_zero() {
            q += BigUint::one();
        }
        Dyadic { mant: BigInt::from_biguint(Sign::Plus, q), exp: self.exp + k as i64 }.compact()
    }

    /// Decimal rendering with `sig` significant digits; `round_up` forces the
    /// magnitude to round upward (used for error radii).
    pub fn to_decimal(&self, sig: usize, round_up: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.mant.is_negative();
        let mag_bits = self.mag_exp().unwrap();
        // d10 ~= floor(log10 |v|); refine below if the leading digit spills.
        let mut d10 = ((mag_bits as f64 - 0.5) * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let shift10 = sig as i64 - 1 - d10;
            let mut num = self.mant.magnitude().clone();
            let mut den = BigUint::one();
            if shift10 >= 0 {
                num *= BigUint::from(10u32).pow(shift10 as u32);
            } else {
                den *= BigUint::from(10u32).pow((-shift10) as u32);
            }
            if self.exp >= 0 {
                num <<= self.exp as u64;
            } else {
                den <<= (-self.exp) as u64;
            }
            let (q, r) = num.div_rem(&den);
            let digits = if round_up {
                if r.is_zero() { q } else { q + BigUint::one() }
            } else {
                // round to nearest, ties up
                if &r * 2u32 >= den { q + BigUint::one() } else { q }
            };
            let s = digits.to_string();
            if s.len() == sig {
                let mantissa = if sig == 1 {
                    s
                } else {
                    format!("{}.{}", &s[..1], &s[1..])
                };
                let sign = if neg { "-" } else { "" };
                return format!("{}{}e{}", sign, mantissa, d10);
            }
            // leading digit spilled over (or estimate was off): adjust
            d10 += s.len() as i64 - sig as i64;
        }
    }
}

trait NegRef {
    fn neg_ref(self) -> Self;
}
impl NegRef for BigInt {
    fn neg_ref(self) -> Self {
        -self
    }
}

/// Quotient a/b to roughly `prec` fraction bits: returns (approx, error bound).
/// b must be nonzero.
pub fn div_dyadic(a: &Dyadic, b: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    debug_assert!(!b.is_zero());
    if a.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    // Scale so the quotient keeps prec significant bits.
    let scale = prec as i64 + 2 + (b.mant_bits() as i64 - a.mant_bits() as i64).max(0);
    let num = &a.mant << scale as u64;
    let q = num / &b.mant;
    let exp = a.exp - b.exp - scale;
    // Truncated quotient: |a/b - q*2^exp| <= 2^exp.
    (Dyadic { mant: q, exp }.compact(), Dyadic::pow2(exp))
}

/// Square root of a nonnegative dyadic to roughly `prec` bits:
/// returns (approx, error bound). The approximation rounds downward.
pub fn sqrt_dyadic(x: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let bits = x.mant_bits();
    let mut sh = (2 * prec as i64 + 2 - bits as i64).max(0);
    if (x.exp - sh) % 2 != 0 {
        sh += 1;
    }
    let scaled: BigUint = x.mant.magnitude() << sh as u64;
    let root = scaled.sqrt(); // floor square root
    let exp = (x.exp - sh) / 2;
    // floor(sqrt(z)) is within 1 of sqrt(z)
    (
        Dyadic { mant: BigInt::from_biguint(Sign::Plus, root), exp }.compact(),
        Dyadic::pow2(exp),
    )
}

/// atanh(num/den) * 2^F as an integer, with an error bound in ulps of 2^-F.
/// Requires |num/den| <= 1/3 for fast convergence (all call sites guarantee
/// |t| <= 1/3).
fn atanh_fixed(num: &BigInt, den: &BigInt, f: u32) -> (BigInt, BigInt) {
    let u = (num << f as u64) / den; // |u*2^-F - t| <= 1 ulp
    let u2 = (&u * &u) >> f as u64; // t^2, error <= 3 ulps (see below)
    let mut acc = u.clone();
    let mut p = u;
    let mut k: u64 = 1;
    loop {
        p = (&p * &u2) >> f as u64;
        if p.is_zero() {
            break;
        }
        let term = &p / BigInt::from(2 * k + 1);
        if term.is_zero() {
            // remaining terms are each below 1 ulp and shrink by >= 9x
            break;
        }
        acc += term;
        k += 1;
        assert!(k < 1_000_000, "atanh series failed to converge");
    }
    // Per-iteration error stays below ~5 ulps (power error contracts by t^2
    // <= 1/9 each step while truncations add <= 4 ulps), tail below 2 ulps.
    let err = BigInt::from(6 * k + 8);
    (acc, err)
}

/// ln(2) * 2^F with error in ulps; cached per F.
fn ln2_fixed(f: u32) -> (BigInt, BigInt) {
    static CACHE: RwLock<Option<HashMap<u32, (BigInt, BigInt)>>> = RwLock::new(None);
    if let Some(map) = CACHE.read().unwrap().as_ref() {
        if let Some(v) = map.get(&f) {
            return v.clone();
        }
    }
    // ln 2 = 2 atanh(1/3)
    let (a, e) = atanh_fixed(&BigInt::one(), &BigInt::from(3), f);
    let val = (a * 2, e * 2);
    CACHE
        .write()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(f, val.clone());
    val
}

/// Natural logarithm of a positive dyadic: returns (approx, error bound).
pub fn ln_dyadic(x: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    assert!(!x.is_zero() && !x.is_negative(), "ln of non-positive dyadic");
    let mag = x.mant.magnitude();
    let l = mag.bits();
    // x = M * 2^exp with M in [2^(L-1), 2^L); pick e so m = x*2^-e in (2/3, 4/3].
    // m > 4/3  <=>  3M > 2^(L+1) at the initial e = L - 1 + exp.
    let three_m: BigUint = mag * 3u32;
    let (s, e) = if three_m > (BigUint::one() << (l + 1)) {
        (l as i64, l as i64 + x.exp)
    } else {
        (l as i64 - 1, l as i64 - 1 + x.exp)
    };
    let e_bits = 64 - (e.unsigned_abs().leading_zeros() as u32).min(63);
    let f = prec + 64 + e_bits;
    // t = (M - 2^s) / (M + 2^s), |t| <= 1/3 by construction
    let m_int = BigInt::from_biguint(Sign::Plus, mag.clone());
    let two_s = BigInt::one() << s as u64;
    let num = &m_int - &two_s;
    let den = m_int + two_s;
    let (a, aerr) = atanh_fixed(&num, &den, f);
    let mut sum = a * 2;
    let mut err_ulps = aerr * 2 + 1;
    if e != 0 {
        let (l2, l2err) = ln2_fixed(f);
        sum += BigInt::from(e) * l2;
        err_ulps += BigInt::from(e.unsigned_abs()) * l2err;
    }
    (
        Dyadic { mant: sum, exp: -(f as i64) }.compact(),
        Dyadic { mant: err_ulps, exp: -(f as i64) },
    )
}
