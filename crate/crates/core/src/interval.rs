//! Rational interval enclosures for the handful of irrational reals
//! that appear in the bounds (logarithms, square and higher roots).
//!
//! Every operation returns an interval `[lo, hi]` with exact rational
//! endpoints that provably contains the true value; endpoints are
//! rounded outward to dyadics with a configurable number of fractional
//! bits so that repeated operations do not blow up denominators.
//! Decisions (inequality checks) are made against the appropriate
//! endpoint, so a `true` answer is always certified.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

/// Default number of fractional bits carried by enclosures.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(q: Rat) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Interval::point(Rat::from_integer(BigInt::from(n)))
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value when the enclosure is a single rational.
    pub fn exact(&self) -> Option<&Rat> {
        if self.is_point() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rat) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, q: &Rat) -> Interval {
        self.mul(&Interval::point(q.clone()))
    }

    /// Reciprocal; requires the interval to exclude zero.
    pub fn recip(&self) -> Interval {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "recip of interval containing zero"
        );
        Interval::new(self.hi.recip(), self.lo.recip())
    }

    pub fn div(&self, other: &Interval) -> Interval {
        self.mul(&other.recip())
    }

    /// `self^e` for a nonnegative interval.
    pub fn pow_u32(&self, e: u32) -> Interval {
        assert!(!self.lo.is_negative(), "pow_u32 needs nonnegative base");
        if e == 0 {
            return Interval::point(Rat::one());
        }
        let powr = |q: &Rat| {
            Rat::new(
                num_traits::pow::pow(q.numer().clone(), e as usize),
                num_traits::pow::pow(q.denom().clone(), e as usize),
            )
        };
        Interval::new(powr(&self.lo), powr(&self.hi))
    }

    pub fn max_with(&self, q: &Rat) -> Interval {
        Interval::new(
            self.lo.clone().max(q.clone()),
            self.hi.clone().max(q.clone()),
        )
    }

    /// Certified comparison with a rational: `Some(ordering)` when the
    /// whole interval lies on one side, `None` when it straddles.
    pub fn cmp_rat(&self, q: &Rat) -> Option<Ordering> {
        if &self.hi < q {
            Some(Ordering::Less)
        } else if &self.lo > q {
            Some(Ordering::Greater)
        } else if self.is_point() && &self.lo == q {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Round endpoints outward to dyadics with `bits` fractional bits.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval::new(dyadic_floor(&self.lo, bits), dyadic_ceil(&self.hi, bits))
    }

    /// Smallest integer at least `hi` (for conservative ceilings).
    pub fn ceil_hi(&self) -> BigInt {
        self.hi.ceil().to_integer()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

pub fn dyadic_floor(q: &Rat, bits: u32) -> Rat {
    let scaled = q * Rat::from_integer(pow2(bits));
    Rat::new(scaled.floor().to_integer(), pow2(bits))
}

pub fn dyadic_ceil(q: &Rat, bits: u32) -> Rat {
    let scaled = q * Rat::from_integer(pow2(bits));
    Rat::new(scaled.ceil().to_integer(), pow2(bits))
}

// ---------------------------------------------------------------------------
// logarithms
// ---------------------------------------------------------------------------

/// Largest k with 2^k <= x (x > 0).
fn floor_log2(x: &Rat) -> i64 {
    debug_assert!(x.is_positive());
    let mut k = x.numer().abs().to_biguint().unwrap().bits() as i64
        - x.denom().abs().to_biguint().unwrap().bits() as i64;
    // The bit-length difference is off by at most one; fix up exactly.
    let two = Rat::from_integer(BigInt::from(2));
    let pow = |e: i64| -> Rat {
        let p = num_traits::pow::pow(two.clone(), e.unsigned_abs() as usize);
        if e < 0 {
            p.recip()
        } else {
            p
        }
    };
    while pow(k) > *x {
        k -= 1;
    }
    while pow(k + 1) <= *x {
        k += 1;
    }
    k
}

/// Enclosure of atanh(u) for exact rational 0 <= u <= 1/2, with the
/// truncation tail bounded by the geometric series. The series runs on
/// integer mantissas at scale 2^p (value = mantissa / 2^p), rounding
/// the lower accumulator down and the upper one up at every step, so
/// the enclosure stays rigorous while each step costs one bounded-size
/// integer multiply even when u has a huge numerator or denominator.
fn atanh_enclosure(u: &Rat, bits: u32) -> Interval {
    debug_assert!(!u.is_negative() && *u <= Rat::new(BigInt::one(), BigInt::from(2)));
    if u.is_zero() {
        return Interval::point(Rat::zero());
    }
    let p = bits + 16;
    let scale = pow2(p);
    let mask = &scale - BigInt::one();
    let div_ceil = |a: &BigInt, b: &BigInt| -> BigInt {
        let (q, r) = a.div_rem(b);
        if r.is_zero() {
            q
        } else {
            q + BigInt::one()
        }
    };
    let scaled_num = u.numer() * &scale;
    let mut pow_lo = scaled_num.div_floor(u.denom()); // <= u^(2i+1) * 2^p
    let mut pow_hi = div_ceil(&scaled_num, u.denom()); // >= u^(2i+1) * 2^p
    let sq_num = u.numer() * u.numer() * &scale;
    let sq_den = u.denom() * u.denom();
    let usq_lo = sq_num.div_floor(&sq_den); // <= u^2 * 2^p
    let usq_hi = div_ceil(&sq_num, &sq_den); // >= u^2 * 2^p
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    // Terminate when the tail bound drops below 2^-(bits+4), i.e. when
    // its mantissa at scale 2^p = 2^(bits+16) drops below 2^12.
    let target = BigInt::one() << 12u32;
    let mut i: u64 = 0;
    loop {
        let odd = BigInt::from(2 * i + 1);
        sum_lo += pow_lo.div_floor(&odd);
        sum_hi += div_ceil(&pow_hi, &odd);
        pow_lo = (pow_lo * &usq_lo) >> p;
        pow_hi = (pow_hi * &usq_hi + &mask) >> p;
        i += 1;
        // tail <= u^(2i+1) / ((2i+1)(1-u^2)), monotone in u
        let tail = div_ceil(
            &(&pow_hi * &scale),
            &(BigInt::from(2 * i + 1) * (&scale - &usq_hi)),
        );
        if tail < target {
            return Interval::new(
                Rat::new(sum_lo, scale.clone()),
                Rat::new(sum_hi + tail, scale),
            )
            .round_out(bits + 2);
        }
    }
}

/// Enclosure of ln 2 = 2 atanh(1/3).
fn ln2(bits: u32) -> Interval {
    atanh_enclosure(&Rat::new(BigInt::one(), BigInt::from(3)), bits + 2)
        .scale(&Rat::from_integer(BigInt::from(2)))
}

/// Enclosure of ln x for an exact positive rational x.
pub fn ln_rat(x: &Rat, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln of nonpositive value");
    if x.is_one() {
        return Interval::point(Rat::zero());
    }
    if x < &Rat::one() {
        return ln_rat(&x.recip(), bits).neg();
    }
    // x = 2^k * y with y in [1, 2); ln x = k ln 2 + 2 atanh((y-1)/(y+1)).
    let k = floor_log2(x);
    let y = x / num_traits::pow::pow(Rat::from_integer(BigInt::from(2)), k as usize);
    let u = (&y - Rat::one()) / (&y + Rat::one()); // in [0, 1/3)
    let main = atanh_enclosure(&u, bits + 2).scale(&Rat::from_integer(BigInt::from(2)));
    let k_ln2 = ln2(bits + 2).scale(&Rat::from_integer(BigInt::from(k)));
    main.add(&k_ln2).round_out(bits)
}

/// Enclosure of ln over an interval with positive lower endpoint.
pub fn ln_interval(x: &Interval, bits: u32) -> Interval {
    assert!(x.lo().is_positive());
    Interval::new(
        ln_rat(x.lo(), bits).lo.clone(),
        ln_rat(x.hi(), bits).hi.clone(),
    )
}

/// Exact integer j with x = d^j, if one exists.
pub fn exact_log(x: &Rat, d: u64) -> Option<i64> {
    debug_assert!(d >= 2);
    if !x.is_positive() {
        return None;
    }
    if x.is_one() {
        return Some(0);
    }
    if *x < Rat::one() {
        return exact_log(&x.recip(), d).map(|j| -j);
    }
    if !x.is_integer() {
        return None;
    }
    let d = BigInt::from(d);
    let mut n = x.numer().clone();
    let mut j = 0i64;
    while n > BigInt::one() {
        let (q, r) = n.div_rem(&d);
        if !r.is_zero() {
            return None;
        }
        n = q;
        j += 1;
    }
    Some(j)
}

/// Enclosure of log_d x for exact rational x > 0 and integer base d >= 2.
/// Exact powers of d are detected and yield point intervals.
pub fn log_base(x: &Rat, d: u64, bits: u32) -> Interval {
    assert!(d >= 2);
    if let Some(j) = exact_log(x, d) {
        return Interval::from_int(j);
    }
    ln_rat(x, bits + 2)
        .div(&ln_rat(&Rat::from_integer(BigInt::from(d)), bits + 2))
        .round_out(bits)
}

/// log_d over an interval with positive lower endpoint.
pub fn log_base_interval(x: &Interval, d: u64, bits: u32) -> Interval {
    Interval::new(
        log_base(x.lo(), d, bits).lo.clone(),
        log_base(x.hi(), d, bits).hi.clone(),
    )
}

// ---------------------------------------------------------------------------
// roots
// ---------------------------------------------------------------------------

/// Enclosure of x^(1/k) for rational x >= 0, k >= 1; exact roots are
/// detected and yield point intervals.
pub fn nth_root_rat(x: &Rat, k: u32, bits: u32) -> Interval {
    assert!(k >= 1);
    assert!(!x.is_negative(), "nth_root of negative value");
    if x.is_zero() {
        return Interval::point(Rat::zero());
    }
    if k == 1 {
        return Interval::point(x.clone());
    }
    let num = x.numer().to_biguint().unwrap();
    let den = x.denom().to_biguint().unwrap();
    // Exact case: both parts perfect k-th powers.
    let rn = num.nth_root(k);
    let rd = den.nth_root(k);
    if num_traits::pow::pow(rn.clone(), k as usize) == num
        && num_traits::pow::pow(rd.clone(), k as usize) == den
    {
        return Interval::point(Rat::new(rn.into(), rd.into()));
    }
    // floor((num * 2^(k*bits) / den)^(1/k)) / 2^bits
    let scaled: BigUint = num << (k as u64 * bits as u64);
    let q = scaled / den;
    let r = q.nth_root(k);
    let lo = Rat::new(r.clone().into(), pow2(bits));
    let hi = Rat::new((r + BigUint::one()).into(), pow2(bits));
    Interval::new(lo, hi)
}

pub fn sqrt_rat(x: &Rat, bits: u32) -> Interval {
    nth_root_rat(x, 2, bits)
}

/// Render a rational as a fixed-point decimal string with `digits`
/// fractional digits, rounding up (toward +infinity).
pub fn decimal_ceil_string(q: &Rat, digits: u32) -> String {
    let scale = num_traits::pow::pow(BigInt::from(10), digits as usize);
    let scaled = (q * Rat::from_integer(scale)).ceil().to_integer();
    let neg = scaled.is_negative();
    let mag = scaled.abs().to_string();
    let mag = if mag.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - mag.len()), mag)
    } else {
        mag
    };
    let split = mag.len() - digits as usize;
    let (int, frac) = mag.split_at(split);
    let int = if int.is_empty() { "0" } else { int };
    format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    #[test]
    fn floor_log2_exact() {
        assert_eq!(floor_log2(&rat(1, 1)), 0);
        assert_eq!(floor_log2(&rat(2, 1)), 1);
        assert_eq!(floor_log2(&rat(3, 1)), 1);
        assert_eq!(floor_log2(&rat(4, 1)), 2);
        assert_eq!(floor_log2(&rat(1, 2)), -1);
        assert_eq!(floor_log2(&rat(1, 3)), -2);
        assert_eq!(floor_log2(&rat(7, 8)), -1);
    }

    #[test]
    fn ln_known_digits() {
        // ln 2 = 0.69314718055994530941723212145817656807...
        let iv = ln_rat(&rat(2, 1), 128);
        let ref_lo = rat(6931471805599453, 10_000_000_000_000_000);
        let ref_hi = rat(6931471805599454, 10_000_000_000_000_000);
        assert!(iv.lo() > &ref_lo && iv.hi() < &ref_hi);
        assert!(iv.width() < rat(1, 1) / rat_int(2).pow(120));
        // ln 1 exact
        assert_eq!(ln_rat(&rat(1, 1), 64), Interval::point(Rat::zero()));
        // ln(1/2) = -ln 2
        let neg = ln_rat(&rat(1, 2), 64);
        assert!(neg.hi().is_negative());
    }

    #[test]
    fn log_base_exactness_and_digits() {
        assert_eq!(log_base(&rat(8, 1), 2, 64), Interval::from_int(3));
        assert_eq!(log_base(&rat(1, 9), 3, 64), Interval::from_int(-2));
        assert_eq!(log_base(&rat(1, 1), 7, 64), Interval::from_int(0));
        // log_2 3 = 1.58496250072115618145373894394782...
        let iv = log_base(&rat(3, 1), 2, 128);
        let lo = rat(158496250072115618, 100_000_000_000_000_000);
        let hi = rat(158496250072115619, 100_000_000_000_000_000);
        assert!(iv.lo() > &lo && iv.hi() < &hi);
    }

    #[test]
    fn sqrt_and_roots() {
        assert_eq!(sqrt_rat(&rat(9, 4), 64), Interval::point(rat(3, 2)));
        assert_eq!(nth_root_rat(&rat(27, 8), 3, 64), Interval::point(rat(3, 2)));
        // sqrt 2 = 1.41421356237309504880...
        let iv = sqrt_rat(&rat(2, 1), 128);
        let lo = rat(141421356237309504, 100_000_000_000_000_000);
        let hi = rat(141421356237309505, 100_000_000_000_000_000);
        assert!(iv.lo() > &lo && iv.hi() < &hi);
        assert!(iv.width() <= rat(2, 1) / rat_int(2).pow(128));
        // sqrt(33)/2: used by the quadratic family fixtures
        let r33 = sqrt_rat(&rat(33, 1), 96);
        assert!(r33.lo() > &rat(57445, 10000) && r33.hi() < &rat(57447, 10000));
    }

    #[test]
    fn interval_arith() {
        let a = Interval::new(rat(1, 2), rat(3, 4));
        let b = Interval::new(rat(-2, 1), rat(1, 3));
        let m = a.mul(&b);
        assert_eq!(m.lo(), &rat(-3, 2));
        assert_eq!(m.hi(), &rat(1, 4));
        let r = a.recip();
        assert_eq!(r.lo(), &rat(4, 3));
        assert_eq!(r.hi(), &rat(2, 1));
        assert_eq!(a.pow_u32(2).hi(), &rat(9, 16));
        assert_eq!(a.cmp_rat(&rat(1, 4)), Some(std::cmp::Ordering::Greater));
        assert_eq!(a.cmp_rat(&rat(2, 3)), None);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_ceil_string(&rat(1, 3), 5), "0.33334");
        assert_eq!(decimal_ceil_string(&rat(-1, 3), 5), "-0.33333");
        assert_eq!(decimal_ceil_string(&rat(54, 1), 3), "54.000");
        assert_eq!(decimal_ceil_string(&rat(1, 2), 2), "0.50");
    }
}
