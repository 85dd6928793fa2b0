//! The base-d digit-sum calculus behind the pairwise-product exponents,
//! its closed forms, and the sharp inequalities relating the exponents
//! to N log N, all checked by exact integer-power comparison.
//!
//! Notation used throughout: `e(j, d)` is the sum of base-d digits of
//! j; `E(N, d) = 2 * sum_{j<N} e(j, d)`. The two-parameter variants
//! split N as `N = c0 + m k` with `0 <= c0 < m` and set
//! `f(N, m, d) = c0 + e(k, d)` and `e(N, m, d) = f(N, m, d) - (d - m) k`,
//! with `F` and `E` the corresponding doubled partial sums.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{rat_pow_u32, Rat};
use crate::error::{Error, Result};
use crate::interval::{log_base, log_base_interval, Interval};

/// Sum of the base-d digits of j.
pub fn digit_sum(j: u64, d: u64) -> u64 {
    assert!(d >= 2, "digit_sum needs base >= 2");
    let mut j = j;
    let mut s = 0;
    while j > 0 {
        s += j % d;
        j /= d;
    }
    s
}

/// E(N, d) = 2 * sum_{j<N} e(j, d).
pub fn e_big(n: u64, d: u64) -> u64 {
    (0..n).map(|j| digit_sum(j, d)).sum::<u64>() * 2
}

fn split(n: u64, m: u64) -> (u64, u64) {
    (n % m, n / m) // (c0, k)
}

fn check_m(m: u64, d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    if m < 1 || m > d {
        return Err(Error::arg(format!("m = {m} out of range 1..={d}")));
    }
    Ok(())
}

/// e(N, m, d) = c0 + e(k, d) - (d - m) k, where N = c0 + m k.
pub fn e_small(n: u64, m: u64, d: u64) -> Result<i64> {
    check_m(m, d)?;
    let (c0, k) = split(n, m);
    Ok(c0 as i64 + digit_sum(k, d) as i64 - ((d - m) * k) as i64)
}

/// f(N, m, d) = c0 + e(k, d).
pub fn f_small(n: u64, m: u64, d: u64) -> Result<i64> {
    check_m(m, d)?;
    let (c0, k) = split(n, m);
    Ok(c0 as i64 + digit_sum(k, d) as i64)
}

/// E(N, m, d) = 2 * sum_{j<N} e(j, m, d), by direct summation.
pub fn e_mid(n: u64, m: u64, d: u64) -> Result<i64> {
    check_m(m, d)?;
    let mut s = 0i64;
    for j in 0..n {
        s += e_small(j, m, d)?;
    }
    Ok(2 * s)
}

/// F(N, m, d) = 2 * sum_{j<N} f(j, m, d), by direct summation.
pub fn f_mid(n: u64, m: u64, d: u64) -> Result<i64> {
    check_m(m, d)?;
    let mut s = 0i64;
    for j in 0..n {
        s += f_small(j, m, d)?;
    }
    Ok(2 * s)
}

/// Closed form F(N, m, d) = (m - c) E(k, d) + c E(k+1, d) + (m-1) N - c (m - c),
/// where N = c + m k. Cross-checked against `f_mid` in tests.
pub fn f_closed(n: u64, m: u64, d: u64) -> Result<i64> {
    check_m(m, d)?;
    if n == 0 {
        return Ok(0);
    }
    let (c, k) = split(n, m);
    Ok(
        ((m - c) * e_big(k, d)) as i64 + (c * e_big(k + 1, d)) as i64 + ((m - 1) * n) as i64
            - (c * (m - c)) as i64,
    )
}

/// Closed form E(N, m, d) = F(N, m, d) - ((d-m)/m) (N^2 - m N + c (m-c)).
///
/// The subtracted term is always an integer because
/// N^2 - m N + c (m - c) = (N - c)(N + c - m) and m divides N - c;
/// this is asserted rather than trusted.
pub fn e_closed(n: u64, m: u64, d: u64) -> Result<i64> {
    check_m(m, d)?;
    if n == 0 {
        return Ok(0);
    }
    let (c, k) = split(n, m);
    let n = n as i64;
    let (c, k, m_i, d_i) = (c as i64, k as i64, m as i64, d as i64);
    let quad = n * n - m_i * n + c * (m_i - c);
    if quad % m_i != 0 {
        return Err(Error::internal(format!(
            "N^2 - mN + c(m-c) = {quad} not divisible by m = {m_i}"
        )));
    }
    debug_assert_eq!(quad, (n - c) * (n + c - m_i));
    debug_assert_eq!(quad / m_i, k * (n + c - m_i));
    Ok(f_closed(n as u64, m, d)? - (d_i - m_i) * k * (n + c - m_i))
}

// ---------------------------------------------------------------------------
// exact inequality checks
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub holds: bool,
    pub equality: bool,
}

/// Outcome of the four exponent inequalities at (N, m, d). The fourth
/// is only defined for N >= m.
#[derive(Clone, Copy, Debug)]
pub struct FourBounds {
    pub a: BoundCheck,
    pub b: BoundCheck,
    pub c: BoundCheck,
    pub d: Option<BoundCheck>,
}

fn pow_big(base: u64, exp: u64) -> BigUint {
    let exp = u32::try_from(exp).expect("exponent exceeds u32 in exact power check");
    BigUint::from(base).pow(exp)
}

fn check(lhs: BigUint, rhs: BigUint) -> BoundCheck {
    BoundCheck {
        holds: lhs <= rhs,
        equality: lhs == rhs,
    }
}

/// Exact checks of the four inequalities bounding the exponent sums by
/// multiples of N log_d N. Each is decided by clearing logarithms into
/// a comparison of integer powers:
///
/// - (a) `E(N,d) <= (d-1) N log_d N`
///   becomes `d^E <= N^((d-1)N)`;
/// - (b) `E(N,m,d) <= (d-1) N (log_d N + 1 - log_d m) - (d-m) N^2 / m`
///   becomes, after multiplying by m and exponentiating,
///   `d^(mE + (d-m)N^2) * m^(m(d-1)N) <= (dN)^(m(d-1)N)`
///   (the exponent `mE + (d-m)N^2` is nonnegative, which is asserted);
/// - (c) `F(N,m,d) <= (d-1) N log_d N`
///   becomes `d^F <= N^((d-1)N)`;
/// - (d) for N >= m, `F(N,m,d) <= (d-1) N log_d(N/m) + (m-1) N`
///   becomes `d^(F - (m-1)N) * m^((d-1)N) <= N^((d-1)N)`,
///   with a negative exponent on d moved across as a power of d on the
///   right-hand side.
pub fn check_bounds(n: u64, m: u64, d: u64) -> Result<FourBounds> {
    if n < 1 {
        return Err(Error::arg("check_bounds needs N >= 1"));
    }
    check_m(m, d)?;
    if m > d - 1 {
        return Err(Error::arg("check_bounds needs m <= d - 1"));
    }

    let e_n = e_big(n, d);
    let a = check(pow_big(d, e_n), pow_big(n, (d - 1) * n));

    let e_m = e_mid(n, m, d)?;
    let x = (m as i64) * e_m + ((d - m) * n * n) as i64;
    if x < 0 {
        return Err(Error::internal(format!(
            "mE + (d-m)N^2 = {x} negative at (N,m,d) = ({n},{m},{d})"
        )));
    }
    let b_exp = m * (d - 1) * n;
    let b = check(
        pow_big(d, x as u64) * pow_big(m, b_exp),
        pow_big(d * n, b_exp),
    );

    let f_m = f_mid(n, m, d)?;
    debug_assert!(f_m >= 0);
    let c = check(pow_big(d, f_m as u64), pow_big(n, (d - 1) * n));

    let dd = if n >= m {
        let t = f_m - ((m - 1) * n) as i64;
        let side = (d - 1) * n;
        Some(if t >= 0 {
            check(pow_big(d, t as u64) * pow_big(m, side), pow_big(n, side))
        } else {
            check(pow_big(m, side), pow_big(d, (-t) as u64) * pow_big(n, side))
        })
    } else {
        None
    };

    Ok(FourBounds { a, b, c, d: dd })
}

/// Is n an exact power d^k (k >= 0)?
pub fn is_power_of(n: u64, d: u64) -> bool {
    assert!(d >= 2, "power base must be at least 2");
    let mut n = n;
    while n > 0 && n.is_multiple_of(d) {
        n /= d;
    }
    n == 1
}

// ---------------------------------------------------------------------------
// the logarithmic threshold function
// ---------------------------------------------------------------------------

/// Parameters (A, B, t, d) for the threshold lemma: for
/// `eta(x) = t log_d x - A x + B` with A, B > 0, t >= 1, d >= 2 and
/// `(d-1) A >= d^(B-1)`, every `x >= M(A, B, t)` has `eta(x) < 0`.
/// The hypothesis is verified exactly on construction by clearing the
/// rational exponent: with B = bn/bd, it is `((d-1)A)^bd >= d^(bn-bd)`.
#[derive(Clone, Debug)]
pub struct ThresholdParams {
    a: Rat,
    b: Rat,
    t: Rat,
    d: u64,
}

impl ThresholdParams {
    pub fn new(a: Rat, b: Rat, t: Rat, d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("threshold: d must be at least 2"));
        }
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::arg("threshold: A and B must be positive"));
        }
        if t < Rat::one() {
            return Err(Error::arg("threshold: t must be at least 1"));
        }
        let bd = b
            .denom()
            .to_u32()
            .filter(|&x| x <= 1 << 16)
            .ok_or_else(|| Error::SizeGuard("threshold: denominator of B too large".into()))?;
        let bn = b.numer().clone();
        let da = (&a) * Rat::from_integer(BigInt::from(d - 1));
        let lhs = rat_pow_u32(&da, bd);
        let ebig = bn - BigInt::from(bd);
        let mag = ebig
            .abs()
            .to_u32()
            .ok_or_else(|| Error::SizeGuard("threshold: B too large".into()))?;
        let p = rat_pow_u32(&Rat::from_integer(BigInt::from(d)), mag);
        let rhs = if ebig.is_negative() { p.recip() } else { p };
        if lhs < rhs {
            return Err(Error::arg(
                "threshold: hypothesis (d-1)A >= d^(B-1) fails for these parameters",
            ));
        }
        Ok(ThresholdParams { a, b, t, d })
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn t(&self) -> &Rat {
        &self.t
    }

    pub fn d(&self) -> u64 {
        self.d
    }
}

/// M(A, B, t) = (t/A) (log_d t + log_d max{1, log_d t} + 3), as an
/// enclosure. The value does not depend on B; B enters only through the
/// hypothesis checked by [`ThresholdParams::new`]. Callers that need a
/// single number should take the upper endpoint (round up).
pub fn threshold_m_raw(a: &Rat, t: &Rat, d: u64, bits: u32) -> Interval {
    assert!(a.is_positive() && *t >= Rat::one() && d >= 2);
    let lt = log_base(t, d, bits);
    let inner = lt.max_with(&Rat::one());
    let llt = log_base_interval(&inner, d, bits);
    let three = Interval::from_int(3);
    let factor = lt.add(&llt).add(&three);
    factor.scale(&(t / a)).round_out(bits)
}

pub fn threshold_m(params: &ThresholdParams, bits: u32) -> Interval {
    threshold_m_raw(&params.a, &params.t, params.d, bits)
}

/// eta(x) = t log_d x - A x + B, as an enclosure (x > 0).
pub fn eta(x: &Rat, params: &ThresholdParams, bits: u32) -> Interval {
    assert!(x.is_positive(), "eta needs x > 0");
    let lx = log_base(x, params.d, bits);
    lx.scale(&params.t)
        .sub(&Interval::point(&params.a * x))
        .add(&Interval::point(params.b.clone()))
        .round_out(bits)
}
