//! Pairwise-product bounds on finite sets of distinct points: for any
//! N distinct preperiodic points x_1, ..., x_N of phi and any place v,
//!
//! ```text
//!   prod_{i != j} |x_i - x_j|_v
//!     <=  |a_d|_v^(-N(N-1)/(d-1)) * max{1, |N|_v^N} * r_v^E(N,d)
//! ```
//!
//! with r_v the scale-invariant radius of the filled Julia set at v
//! and E(N,d) the doubled digit-sum exponent. At a finite place both
//! sides are powers of p and the check is an exact comparison of
//! rational exponents (|N|_p <= 1 makes the middle factor 1). At the
//! archimedean place the left side is an exact rational and the right
//! side is enclosed with outward rounding, substituting the certified
//! upper bound of [`arch_radius_upper`] for r_v (exact for z^2 + c
//! with c <= 0); the verdict is only reported when the enclosure
//! separates the sides, escalating precision as needed.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{padic_valuation, rat_pow_u32, LogAbs, Place, Prime, Rat};
use crate::error::{Error, Result};
use crate::exponents::e_big;
use crate::interval::Interval;
use crate::poly::Polynomial;
use crate::reduction::{arch_radius_upper, radius_at};

/// prod_{i != j} |x_i - x_j|_v over ordered pairs, exactly.
#[derive(Clone, Debug)]
pub enum PairwiseProduct {
    Arch(Rat),
    Fin(LogAbs),
}

pub fn pairwise_product(points: &[Rat], place: Place) -> Result<PairwiseProduct> {
    if points.len() < 2 {
        return Err(Error::arg("need at least two points"));
    }
    let mut diffs = Vec::new();
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            let d = x - y;
            if d.is_zero() {
                return Err(Error::arg(format!("points must be distinct, {x} repeats")));
            }
            diffs.push(d);
        }
    }
    match place {
        Place::Archimedean => {
            // Ordered pairs come in +/- pairs, so the product is the
            // product of squared differences.
            let mut prod = Rat::one();
            for d in &diffs {
                prod *= d * d;
            }
            Ok(PairwiseProduct::Arch(prod))
        }
        Place::Finite(p) => {
            let mut exp = BigInt::zero();
            for d in &diffs {
                exp -= 2 * padic_valuation(d, p).finite()?;
            }
            Ok(PairwiseProduct::Fin(LogAbs::new(p, Rat::from_integer(exp))))
        }
    }
}

/// Outcome of one pairwise-product check.
#[derive(Clone, Debug)]
pub enum ProductBoundCheck {
    /// Finite place: both sides as base-p exponents, compared exactly.
    Finite {
        prime: Prime,
        n: u64,
        lhs_exp: Rat,
        rhs_exp: Rat,
        holds: bool,
        equality: bool,
    },
    /// Archimedean place: exact left side against an enclosure of the
    /// right side (which uses a certified upper bound for the radius).
    Arch {
        n: u64,
        lhs: Rat,
        rhs: Interval,
        holds: bool,
    },
}

impl ProductBoundCheck {
    pub fn holds(&self) -> bool {
        match self {
            ProductBoundCheck::Finite { holds, .. } => *holds,
            ProductBoundCheck::Arch { holds, .. } => *holds,
        }
    }
}

fn pair_exponent(n: u64, d: u64) -> Rat {
    Rat::new(BigInt::from(n) * BigInt::from(n - 1), BigInt::from(d - 1))
}

/// |a_d|^(-q) for the rational q = N(N-1)/(d-1), as an enclosure
/// (a point when q is an integer or |a_d| = 1).
fn lead_power(lead_abs: &Rat, q: &Rat, bits: u32) -> Result<Interval> {
    if lead_abs.is_one() {
        return Ok(Interval::point(Rat::one()));
    }
    let num = q
        .numer()
        .to_u32()
        .ok_or_else(|| Error::SizeGuard("pairwise exponent too large".into()))?;
    let den = q
        .denom()
        .to_u32()
        .expect("reduced denominator of a small rational");
    let powered = rat_pow_u32(lead_abs, num);
    let rooted = if den == 1 {
        Interval::point(powered)
    } else {
        crate::interval::nth_root_rat(&powered, den, bits)
    };
    Ok(rooted.recip())
}

/// Check the pairwise-product bound for the given distinct points at
/// one place. The points need not be preperiodic; the bound is a
/// theorem only for preperiodic points, so a failed check on such
/// points indicates a bug.
pub fn check_capbd(
    phi: &Polynomial,
    points: &[Rat],
    place: Place,
    bits: u32,
) -> Result<ProductBoundCheck> {
    let n = points.len() as u64;
    let d = phi.degree() as u64;
    let product = pairwise_product(points, place)?;
    let e_exp = e_big(n, d);
    let q = pair_exponent(n, d);

    match (place, product) {
        (Place::Finite(p), PairwiseProduct::Fin(lhs)) => {
            let rho = radius_at(phi, p)?.rho;
            let v_lead = padic_valuation(phi.lead(), p).finite()?;
            // max{1, |N|_p^N} = 1 since N is a positive integer, and
            // |a_d|_p^(-q) = p^(v_p(a_d) q).
            let rhs_exp = Rat::from_integer(BigInt::from(v_lead)) * &q
                + rho * Rat::from_integer(BigInt::from(e_exp));
            let lhs_exp = lhs.exponent().clone();
            Ok(ProductBoundCheck::Finite {
                prime: p,
                n,
                holds: lhs_exp <= rhs_exp,
                equality: lhs_exp == rhs_exp,
                lhs_exp,
                rhs_exp,
            })
        }
        (Place::Archimedean, PairwiseProduct::Arch(lhs)) => {
            let e_exp = u32::try_from(e_exp)
                .map_err(|_| Error::SizeGuard("pairwise exponent too large".into()))?;
            let n_pow = rat_pow_u32(&Rat::from_integer(BigInt::from(n)), n as u32).max(Rat::one());
            let mut work = bits;
            let mut rhs = Interval::point(Rat::zero());
            for round in 0..3 {
                rhs = lead_power(&phi.lead().abs(), &q, work)?
                    .scale(&n_pow)
                    .mul(&arch_radius_upper(phi, work).pow_u32(e_exp));
                match rhs.cmp_rat(&lhs) {
                    Some(Ordering::Greater) | Some(Ordering::Equal) => {
                        return Ok(ProductBoundCheck::Arch {
                            n,
                            lhs,
                            rhs,
                            holds: true,
                        })
                    }
                    Some(Ordering::Less) => {
                        return Ok(ProductBoundCheck::Arch {
                            n,
                            lhs,
                            rhs,
                            holds: false,
                        })
                    }
                    None if round < 2 => work *= 2,
                    None => break,
                }
            }
            // Enclosure still straddles the left side: report the
            // conservative verdict against the upper endpoint.
            let holds = &lhs <= rhs.hi();
            Ok(ProductBoundCheck::Arch { n, lhs, rhs, holds })
        }
        _ => unreachable!("product variant always matches the place"),
    }
}
