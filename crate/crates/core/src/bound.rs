//! Explicit uniform upper bounds for the number of preperiodic points
//! of a degree-d polynomial map, in terms of the number s of places of
//! bad reduction (including archimedean places).
//!
//! The bound has four regimes, dispatched in order:
//!
//! 1. function field, s = 0: the count is at most the constant-field
//!    size q (plus the point at infinity);
//! 2. t = 0 (number field with every bad place archimedean): the count
//!    is at most beta^D;
//! 3. 0 < t < d: beta^D (d^2 - 2d + 2) (t log_d t + 3t);
//! 4. t >= d: beta^D (d^2 - 2d + 2) t (log_d t + log_d log_d t + 3).
//!
//! Here D is the field degree, t an effective count of finite bad
//! places, and beta a constant depending on whether s exceeds sigma(d) D
//! for an explicit threshold sigma(d). All comparisons that select a
//! regime are exact; the bound itself is returned as an enclosure that
//! is a point interval whenever every logarithm involved is rational.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::interval::{log_base, log_base_interval, nth_root_rat, sqrt_rat, Interval};
use crate::poly::Polynomial;
use crate::reduction::bad_census;

/// Ground field of the dynamical system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// Extension of Q of the given degree (1 for Q itself).
    NumberField { degree: u64 },
    /// Function field with constant field of size q (no archimedean
    /// places; q at least 2).
    FunctionField { q: u64 },
}

/// Validated input to [`theorem_bound`].
#[derive(Clone, Copy, Debug)]
pub struct BoundInput {
    d: u64,
    s: u64,
    s_inf: u64,
    field: FieldKind,
}

impl BoundInput {
    pub fn number_field(d: u64, degree: u64, s: u64, s_inf: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("map degree must be at least 2"));
        }
        if d > u32::MAX as u64 {
            return Err(Error::SizeGuard("map degree too large".into()));
        }
        if degree < 1 {
            return Err(Error::arg("field degree must be at least 1"));
        }
        if degree > 10_000 {
            return Err(Error::SizeGuard("field degree too large".into()));
        }
        if s_inf < 1 || s_inf > degree {
            return Err(Error::arg(
                "a number field has between 1 and [K:Q] archimedean places",
            ));
        }
        if s < s_inf {
            return Err(Error::arg(
                "s counts all bad places and cannot be below s_inf",
            ));
        }
        Ok(BoundInput {
            d,
            s,
            s_inf,
            field: FieldKind::NumberField { degree },
        })
    }

    pub fn function_field(d: u64, s: u64, q: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("map degree must be at least 2"));
        }
        if d > u32::MAX as u64 {
            return Err(Error::SizeGuard("map degree too large".into()));
        }
        if q < 2 {
            return Err(Error::arg("constant field has at least 2 elements"));
        }
        Ok(BoundInput {
            d,
            s,
            s_inf: 0,
            field: FieldKind::FunctionField { q },
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn s_inf(&self) -> u64 {
        self.s_inf
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }
}

/// Build the input for a polynomial over Q from its bad-place census.
pub fn input_for_rational_poly(phi: &Polynomial) -> Result<BoundInput> {
    let census = bad_census(phi)?;
    BoundInput::number_field(phi.degree() as u64, 1, census.s, census.s_inf)
}

/// Regime used for the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundRow {
    FunctionFieldS0,
    ArchOnly,
    SmallT,
    General,
}

/// The bound together with every intermediate quantity that determines
/// it.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub sigma: Rat,
    pub beta: u64,
    pub t: Interval,
    pub row: BoundRow,
    /// Enclosure of the bound for the number of preperiodic points in
    /// projective space (a point interval when exactly representable).
    pub m: Interval,
    /// ceil(sup m) + 1: an integer certainly at least the true count,
    /// whatever rounding the enclosure needed.
    pub count_bound: BigUint,
    /// True if regime selection had to fall back to a conservative
    /// hull because an enclosure comparison stayed ambiguous (does not
    /// occur for exact inputs; the bound is still valid).
    pub flagged: bool,
}

/// The threshold sigma(d) separating the small-s and large-s regimes:
/// 7 for d = 2 and 2 * 33^((d-1)(d-2)) / ((d-1)(d-2)) for d >= 3.
pub fn sigma_of(d: u64) -> Result<Rat> {
    if d < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    if d == 2 {
        return Ok(Rat::from_integer(BigInt::from(7)));
    }
    let k = (d - 1)
        .checked_mul(d - 2)
        .filter(|&k| k <= 100_000)
        .ok_or_else(|| Error::SizeGuard("sigma(d) too large to materialize".into()))?;
    let num = BigInt::from(2) * BigInt::from(33u32).pow(k as u32);
    Ok(Rat::new(num, BigInt::from(k)))
}

/// Exact decision of `s <= sigma(d) * D` without materializing 33^k
/// when k = (d-1)(d-2) is large: it suffices that 33^k outgrows the
/// 192-bit quantity s * k.
fn s_le_sigma_d(d: u64, degree: u64, s: u64) -> bool {
    if d == 2 {
        return (s as u128) <= 7 * degree as u128;
    }
    let k = (d as u128 - 1) * (d as u128 - 2);
    // s <= 2 * 33^k * D / k  <=>  s * k <= 2 * D * 33^k.
    // lhs < 2^64 * 2^128 = 2^192 and 33^k > 2^(5k), so k >= 39 decides.
    if k >= 39 {
        return true;
    }
    let lhs = BigUint::from(s) * BigUint::from(k);
    let rhs = BigUint::from(2u32) * BigUint::from(degree) * BigUint::from(33u32).pow(k as u32);
    lhs <= rhs
}

fn beta_of(input: &BoundInput) -> u64 {
    match input.field {
        FieldKind::FunctionField { .. } => 1,
        FieldKind::NumberField { degree } => {
            if s_le_sigma_d(input.d, degree, input.s) {
                if input.d == 2 {
                    9
                } else {
                    11.max(2 * input.d)
                }
            } else {
                1
            }
        }
    }
}

fn t_of(input: &BoundInput, bits: u32) -> Interval {
    match input.field {
        FieldKind::FunctionField { .. } => Interval::from_int(input.s as i64),
        FieldKind::NumberField { degree } => {
            if s_le_sigma_d(input.d, degree, input.s) {
                Interval::from_int((input.s - input.s_inf) as i64)
            } else {
                // t = s + D log_2(d) / 2 (a point when d is a power of 2).
                let l2d = log_base(&Rat::from_integer(BigInt::from(input.d)), 2, bits);
                let half_d = Rat::new(BigInt::from(degree), BigInt::from(2));
                l2d.scale(&half_d).add(&Interval::from_int(input.s as i64))
            }
        }
    }
}

fn hull(a: &Interval, b: &Interval) -> Interval {
    Interval::new(a.lo().min(b.lo()).clone(), a.hi().max(b.hi()).clone())
}

fn row_small_t(pref: &Interval, t: &Interval, d: u64, bits: u32) -> Interval {
    // pref * (t log_d t + 3 t); valid for t >= 1.
    let lt = log_base_interval(t, d, bits);
    pref.mul(&t.mul(&lt.add(&Interval::from_int(3))))
}

fn row_general(pref: &Interval, t: &Interval, d: u64, bits: u32) -> Interval {
    // pref * t (log_d t + log_d log_d t + 3); valid for t >= d.
    let lt = log_base_interval(t, d, bits);
    let llt = log_base_interval(&lt, d, bits);
    pref.mul(&t.mul(&lt.add(&llt).add(&Interval::from_int(3))))
}

/// The explicit bound for the given input, as an enclosure, together
/// with the regime and constants that produced it. All regime
/// selections are exact except the comparison of an irrational t with
/// d, which cannot actually be ambiguous (t exceeds sigma(d) > d in
/// that regime) but would fall back to a conservative hull of the two
/// candidate rows if it were.
pub fn theorem_bound(input: &BoundInput, bits: u32) -> Result<BoundReport> {
    let d = input.d;
    let sigma = sigma_of(d)?;
    let beta = beta_of(input);
    let t = t_of(input, bits);

    if let FieldKind::FunctionField { q } = input.field {
        if input.s == 0 {
            let m = Interval::from_int(q as i64);
            return finish(sigma, beta, t, BoundRow::FunctionFieldS0, m, false);
        }
    }

    let degree = match input.field {
        FieldKind::NumberField { degree } => degree,
        FieldKind::FunctionField { .. } => 1,
    };
    let beta_pow = Rat::from_integer(BigInt::from(BigUint::from(beta).pow(degree as u32)));

    if t.exact().is_some_and(|x| x.is_zero()) {
        let m = Interval::point(beta_pow);
        return finish(sigma, beta, t, BoundRow::ArchOnly, m, false);
    }

    let quad = d as u128 * d as u128 - 2 * d as u128 + 2;
    let pref = Interval::point(beta_pow * Rat::from_integer(BigInt::from(quad)));

    let d_rat = Rat::from_integer(BigInt::from(d));
    let mut work = bits;
    for _ in 0..3 {
        let tw = if work == bits {
            t.clone()
        } else {
            t_of(input, work)
        };
        match tw.cmp_rat(&d_rat) {
            Some(std::cmp::Ordering::Less) => {
                let m = row_small_t(&pref, &tw, d, work);
                return finish(sigma, beta, tw, BoundRow::SmallT, m, false);
            }
            Some(_) => {
                let m = row_general(&pref, &tw, d, work);
                return finish(sigma, beta, tw, BoundRow::General, m, false);
            }
            None => work *= 2,
        }
    }
    // Ambiguous after escalation: hull of both regimes (still an upper
    // bound; the rows agree at t = d).
    let clipped_lo = hull(&t, &Interval::point(Rat::one()));
    let clipped_hi = hull(&t, &Interval::point(d_rat));
    let m = hull(
        &row_small_t(&pref, &clipped_lo, d, bits),
        &row_general(&pref, &clipped_hi, d, bits),
    );
    finish(sigma, beta, t, BoundRow::General, m, true)
}

fn finish(
    sigma: Rat,
    beta: u64,
    t: Interval,
    row: BoundRow,
    m: Interval,
    flagged: bool,
) -> Result<BoundReport> {
    let c = m.ceil_hi();
    if c.is_negative() {
        return Err(Error::internal("negative preperiodic-count bound"));
    }
    let count_bound = c.to_biguint().expect("nonnegative ceiling") + BigUint::one();
    Ok(BoundReport {
        sigma,
        beta,
        t,
        row,
        m,
        count_bound,
        flagged,
    })
}

/// Sharper bound specific to the family z^2 + c over Q with s bad
/// places (s >= 1 since the archimedean place always counts): at most 5
/// finite preperiodic points for s = 1, and for s >= 2 at most
/// (2s+1) (log_2(2s+1) + log_2(log_2(2s+1) - 1) + 2),
/// which is the general shape 2t (log_2 t + log_2 log_2 t + 3)
/// evaluated at t = s + 1/2.
pub fn quadratic_refined_bound(s: u64, bits: u32) -> Result<Interval> {
    match s {
        0 => Err(Error::arg(
            "s counts bad places including the archimedean one, so s >= 1",
        )),
        1 => Ok(Interval::from_int(5)),
        _ => {
            let g = Rat::from_integer(BigInt::from(2 * s + 1));
            let lg = log_base(&g, 2, bits);
            let inner = lg.sub(&Interval::from_int(1));
            let l2i = log_base_interval(&inner, 2, bits);
            Ok(lg
                .add(&l2i)
                .add(&Interval::from_int(2))
                .scale(&g)
                .round_out(bits))
        }
    }
}

/// C_d = d^(-(d-2)/(d-1)), the scale factor relating coefficient size
/// to the archimedean radius for degree d; C_2 = 1 and
/// C_d <= min(1, 1.2/(d-1)) for d <= 50.
pub fn c_of(d: u64, bits: u32) -> Result<Interval> {
    if d < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    if d > 4096 {
        return Err(Error::SizeGuard("degree too large for C_d".into()));
    }
    let pow = Rat::from_integer(BigInt::from(d).pow(d as u32 - 2));
    Ok(nth_root_rat(&pow, d as u32 - 1, bits).recip())
}

/// Threshold on |c| (suitably scaled coefficient size) beyond which a
/// map is past the radius-4 regime: 4 for d = 2 and (4 + sqrt(3))/C_d
/// for d >= 3.
pub fn case1_threshold(d: u64, bits: u32) -> Result<Interval> {
    if d < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    if d == 2 {
        return Ok(Interval::from_int(4));
    }
    let s3 = sqrt_rat(&Rat::from_integer(BigInt::from(3)), bits);
    let num = s3.add(&Interval::from_int(4));
    Ok(num.div(&c_of(d, bits)?))
}

/// For the split m + (d - m) of the pairing argument, the hypothesis
/// of the logarithmic threshold lemma with A = (d-m)/(m(d-1)) and
/// B = 1 - log_d m reduces exactly to d - m >= 1.
pub fn pairing_hypothesis_holds(d: u64, m: u64) -> Result<bool> {
    if d < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    if m < 1 || m > d {
        return Err(Error::arg(format!("m = {m} out of range 1..={d}")));
    }
    Ok(d - m >= 1)
}

/// A = (d-m)/(m(d-1)) for the pairing split (1 <= m <= d-1).
pub fn pairing_a(d: u64, m: u64) -> Result<Rat> {
    if !(pairing_hypothesis_holds(d, m)?) {
        return Err(Error::arg("pairing split needs 1 <= m <= d-1"));
    }
    Ok(Rat::new(
        BigInt::from(d - m),
        BigInt::from(m) * BigInt::from(d - 1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use crate::exponents::threshold_m_raw;

    fn nf(d: u64, degree: u64, s: u64, s_inf: u64) -> BoundInput {
        BoundInput::number_field(d, degree, s, s_inf).unwrap()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_of(2).unwrap(), rat_int(7));
        assert_eq!(sigma_of(3).unwrap(), rat_int(1089));
        assert_eq!(sigma_of(4).unwrap(), rat_int(430489323));
    }

    #[test]
    fn input_validation() {
        assert!(BoundInput::number_field(1, 1, 1, 1).is_err());
        assert!(BoundInput::number_field(2, 1, 0, 1).is_err());
        assert!(BoundInput::number_field(2, 1, 2, 2).is_err()); // s_inf > degree
        assert!(BoundInput::function_field(2, 0, 1).is_err());
        assert!(BoundInput::function_field(2, 0, 2).is_ok());
    }

    #[test]
    fn worked_bound_values() {
        // d = 2 over Q, two bad places (one finite): t = 1, beta = 9,
        // M = 9 * 2 * 3 = 54 exactly.
        let r = theorem_bound(&nf(2, 1, 2, 1), 128).unwrap();
        assert_eq!(r.beta, 9);
        assert_eq!(r.row, BoundRow::SmallT);
        assert_eq!(r.t.exact(), Some(&rat_int(1)));
        assert_eq!(r.m.exact(), Some(&rat_int(54)));
        assert_eq!(r.count_bound, 55u32.into());
        assert!(!r.flagged);

        // Only the archimedean place: M = beta^D = 9.
        let r = theorem_bound(&nf(2, 1, 1, 1), 128).unwrap();
        assert_eq!(r.row, BoundRow::ArchOnly);
        assert_eq!(r.m.exact(), Some(&rat_int(9)));
        assert_eq!(r.count_bound, 10u32.into());

        // Function field with no bad places: M = q.
        let r = theorem_bound(&BoundInput::function_field(2, 0, 2).unwrap(), 128).unwrap();
        assert_eq!(r.row, BoundRow::FunctionFieldS0);
        assert_eq!(r.m.exact(), Some(&rat_int(2)));
        assert_eq!(r.count_bound, 3u32.into());
    }

    #[test]
    fn regime_boundary_d2() {
        // s = 7 = sigma(2) * D is still the small-s regime: beta = 9,
        // t = 6 >= d, general row.
        let r7 = theorem_bound(&nf(2, 1, 7, 1), 128).unwrap();
        assert_eq!(r7.beta, 9);
        assert_eq!(r7.row, BoundRow::General);
        assert_eq!(r7.t.exact(), Some(&rat_int(6)));

        // s = 8 crosses it: beta = 1, t = 8 + log_2(2)/2 = 17/2 exact.
        let r8 = theorem_bound(&nf(2, 1, 8, 1), 128).unwrap();
        assert_eq!(r8.beta, 1);
        assert_eq!(r8.row, BoundRow::General);
        assert_eq!(r8.t.exact(), Some(&rat(17, 2)));
        assert!(!r8.flagged);

        // The crossing makes the bound drop (beta^D collapses to 1).
        assert!(r8.m.hi() < r7.m.lo());
    }

    #[test]
    fn monotone_in_s_within_regime() {
        let mut prev: Option<Interval> = None;
        for s in 2..=7u64 {
            let r = theorem_bound(&nf(2, 1, s, 1), 128).unwrap();
            if let Some(p) = prev {
                assert!(r.m.hi() > p.lo(), "bound not increasing at s = {s}");
            }
            prev = Some(r.m);
        }
        for s in 8..=40u64 {
            let r = theorem_bound(&nf(2, 1, s, 1), 128).unwrap();
            if let Some(p) = prev.filter(|_| s > 8) {
                assert!(r.m.lo() > p.hi(), "bound not increasing at s = {s}");
            }
            prev = Some(r.m);
        }
    }

    #[test]
    fn beta_for_higher_degree() {
        let r = theorem_bound(&nf(3, 1, 2, 1), 128).unwrap();
        assert_eq!(r.beta, 11);
        let r = theorem_bound(&nf(7, 1, 2, 1), 128).unwrap();
        assert_eq!(r.beta, 14);
        // Large-s regime for a big field degree is still exact.
        let r = theorem_bound(&nf(3, 2, 3000, 1), 128).unwrap();
        assert_eq!(r.beta, 1);
        assert!(!r.t.is_point()); // log_2 3 is irrational
        assert_eq!(r.row, BoundRow::General);
    }

    #[test]
    fn rows_agree_at_t_d() {
        // t = d: log_d t = 1, log_d log_d t = 0, both rows give 4d*pref.
        // d = 2, t = 2 arises from s = 3, s_inf = 1.
        let r = theorem_bound(&nf(2, 1, 3, 1), 128).unwrap();
        assert_eq!(r.row, BoundRow::General);
        assert_eq!(r.m.exact(), Some(&rat_int(9 * 2 * 8)));
    }

    #[test]
    fn refined_quadratic_bound() {
        assert_eq!(
            quadratic_refined_bound(1, 128).unwrap().exact(),
            Some(&rat_int(5))
        );
        let b = quadratic_refined_bound(2, 128).unwrap();
        assert!(b.lo() > &rat(2362, 100) && b.hi() < &rat(2363, 100), "{b}");
        assert!(quadratic_refined_bound(0, 128).is_err());

        // Same value through the 2t(log_2 t + log_2 log_2 t + 3) shape
        // at t = 5/2.
        let t = Interval::point(rat(5, 2));
        let lt = log_base_interval(&t, 2, 128);
        let llt = log_base_interval(&lt, 2, 128);
        let other = t
            .mul(&lt.add(&llt).add(&Interval::from_int(3)))
            .scale(&rat_int(2));
        assert!(other.lo() <= b.hi() && b.lo() <= other.hi());
    }

    #[test]
    fn scale_constant() {
        assert_eq!(c_of(2, 128).unwrap().exact(), Some(&rat_int(1)));
        let c3 = c_of(3, 128).unwrap();
        assert!(c3.lo() > &rat(577, 1000) && c3.hi() < &rat(578, 1000));
        for d in 2..=50u64 {
            let c = c_of(d, 128).unwrap();
            let cap = rat(6, 5) / rat_int(d as i64 - 1);
            assert!(c.hi() <= &rat_int(1).min(cap), "C_{d} out of range");
        }
    }

    #[test]
    fn case1_thresholds() {
        assert_eq!(case1_threshold(2, 128).unwrap().exact(), Some(&rat_int(4)));
        // (4 + sqrt(3)) / C_3 = (4 + sqrt(3)) sqrt(3) = 3 + 4 sqrt(3).
        let t = case1_threshold(3, 128).unwrap();
        assert!(t.lo() > &rat(992, 100) && t.hi() < &rat(993, 100));
    }

    #[test]
    fn pairing_split() {
        for d in 2..=20u64 {
            for m in 1..d {
                assert!(pairing_hypothesis_holds(d, m).unwrap());
            }
            assert!(!pairing_hypothesis_holds(d, d).unwrap());
        }
    }

    #[test]
    fn pairing_split_maximized_at_extremes() {
        // 1/A_m + 1/A_(d-m) = (d-1)(m/(d-m) + (d-m)/m) is largest at
        // m = 1 (or d-1), exactly.
        for d in 3..=12u64 {
            let h =
                |m: u64| pairing_a(d, m).unwrap().recip() + pairing_a(d, d - m).unwrap().recip();
            let at_1 = h(1);
            for m in 2..d {
                assert!(
                    h(m) <= at_1,
                    "split factor not maximal at 1 for d={d} m={m}"
                );
            }
            // Enclosure version: sum of threshold bounds respects it.
            for t in [rat_int(1), rat_int(2), rat_int(5), rat_int(10)] {
                let sum_1 = threshold_m_raw(&pairing_a(d, 1).unwrap(), &t, d, 96)
                    .add(&threshold_m_raw(&pairing_a(d, d - 1).unwrap(), &t, d, 96));
                for m in 2..d {
                    let sum_m = threshold_m_raw(&pairing_a(d, m).unwrap(), &t, d, 96)
                        .add(&threshold_m_raw(&pairing_a(d, d - m).unwrap(), &t, d, 96));
                    assert!(sum_m.lo() <= sum_1.hi());
                }
            }
        }
    }
}
