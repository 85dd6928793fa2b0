//! Reduction behaviour of a polynomial map at the places of Q, and the
//! radius of the smallest disk containing its filled Julia set at each
//! finite place.
//!
//! At a finite place p the filled Julia set K_p (points with bounded
//! forward orbit in an algebraic closure of Q_p) sits inside some disk;
//! since every point of an ultrametric disk is a center, the smallest
//! closed disk containing K_p may be taken to be centered at any fixed
//! point of the map. Its radius r'_p is reached on the first preimages
//! of fixed points, so it can be read off the w-roots of the
//! displacement resultant
//!
//! ```text
//!     P(w) = Res_z(phi(z) - z, phi(z + w) - z),
//! ```
//!
//! whose nonzero roots are exactly the differences x - b with b a fixed
//! point and x a preimage of some fixed point. The largest p-adic
//! absolute value among those roots is p^mu with mu the maximal slope
//! of the Newton polygon of P, and the scale-invariant radius exponent
//! is rho = max(0, mu - v_p(a_d)/(d-1)), zero exactly when the map has
//! (potentially) good reduction at p.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor, padic_valuation, rat_pow_u32, Place, Prime, Rat};
use crate::error::{Error, Result};
use crate::interval::{nth_root_rat, sqrt_rat, Interval};
use crate::poly::{resultant, Poly, Polynomial};

/// Does phi have good reduction at p as written: all coefficients
/// p-integral and the leading coefficient a p-adic unit?
pub fn plain_good_reduction(phi: &Polynomial, p: Prime) -> bool {
    let d = phi.degree();
    for i in 0..=d {
        let c = phi.coeff(i);
        if c.is_zero() {
            continue;
        }
        let v = padic_valuation(&c, p)
            .finite()
            .expect("nonzero rational has finite valuation");
        if v < 0 || (i == d && v != 0) {
            return false;
        }
    }
    true
}

/// The finitely many primes where `plain_good_reduction` can fail:
/// divisors of a coefficient denominator, or of the numerator or
/// denominator of the leading coefficient. Sorted ascending.
pub fn candidate_primes(phi: &Polynomial) -> Result<Vec<Prime>> {
    let mut set = BTreeSet::new();
    let d = phi.degree();
    for i in 0..=d {
        let c = phi.coeff(i);
        if c.is_zero() {
            continue;
        }
        for (p, _) in factor(c.denom().magnitude())? {
            set.insert(p);
        }
        if i == d {
            for (p, _) in factor(c.numer().magnitude())? {
                set.insert(p);
            }
        }
    }
    set.into_iter().map(Prime::new).collect()
}

fn binom(n: usize, k: usize) -> Rat {
    Rat::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

/// P(w) = Res_z(phi(z) - z, phi(z + w) - z), a polynomial in w of
/// degree d^2 with leading coefficient +/- a_d^(2d). Its nonzero roots
/// are the displacements x - b over pairs (b, x) with phi(b) = b and
/// phi(x) a fixed point; at least one such displacement is nonzero for
/// every polynomial of degree >= 2.
pub fn displacement_resultant(phi: &Polynomial) -> Result<Poly> {
    let d = phi.degree();
    // phi(z) - z, coefficients constant in w.
    let mut f: Vec<Poly> = (0..=d).map(|i| Poly::constant(phi.coeff(i))).collect();
    f[1] = f[1].sub(&Poly::one());
    // phi(z + w) - z: coefficient of z^j is sum_{i>=j} a_i C(i,j) w^(i-j).
    let mut g: Vec<Poly> = (0..=d)
        .map(|j| {
            let c: Vec<Rat> = (j..=d).map(|i| phi.coeff(i) * binom(i, j)).collect();
            Poly::from_coeffs(c)
        })
        .collect();
    g[1] = g[1].sub(&Poly::one());

    let pw = resultant(&f, &g);
    if pw.degree() != Some(d * d) {
        return Err(Error::internal(format!(
            "displacement resultant of {phi} has degree {:?}, expected {}",
            pw.degree(),
            d * d
        )));
    }
    let lead_abs = pw.lead().expect("nonzero resultant").abs();
    if lead_abs != rat_pow_u32(&phi.lead().abs(), 2 * d as u32) {
        return Err(Error::internal(format!(
            "displacement resultant of {phi} has unexpected leading coefficient"
        )));
    }
    if pw.order_at_zero() == Some(d * d) {
        return Err(Error::internal(format!(
            "displacement resultant of {phi} has no nonzero root"
        )));
    }
    Ok(pw)
}

/// Maximal Newton-polygon slope of a nonzero polynomial at p: the
/// largest value of (v_p(lead) - v_p(c_j))/(deg - j) over nonzero
/// lower coefficients c_j. The largest absolute value among the roots
/// (in an algebraic closure of Q_p) is p to this power.
fn newton_max_slope(pw: &Poly, p: Prime) -> Result<Rat> {
    let deg = pw
        .degree()
        .ok_or_else(|| Error::internal("Newton polygon of the zero polynomial"))?;
    let v_lead = padic_valuation(&pw.coeff(deg), p).finite()?;
    let mut best: Option<Rat> = None;
    for j in 0..deg {
        let c = pw.coeff(j);
        if c.is_zero() {
            continue;
        }
        let vj = padic_valuation(&c, p).finite()?;
        let slope = Rat::new(BigInt::from(v_lead - vj), BigInt::from((deg - j) as i64));
        if best.as_ref().is_none_or(|b| slope > *b) {
            best = Some(slope);
        }
    }
    best.ok_or_else(|| Error::internal("polynomial with no nonzero root in Newton slope"))
}

/// Radius data of phi at one finite place, as base-p exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRadius {
    /// Scale-invariant radius exponent: the smallest disk containing
    /// K_p has radius |a_d|_p^(-1/(d-1)) * p^rho. Nonnegative; zero
    /// exactly at places of (potentially) good reduction.
    pub rho: Rat,
    /// Exponent of the plain radius of that smallest disk:
    /// r'_p = p^r_prime_rho.
    pub r_prime_rho: Rat,
}

fn radius_from_resultant(phi: &Polynomial, p: Prime, pw: &Poly) -> Result<FiniteRadius> {
    let d = phi.degree() as i64;
    let mu = newton_max_slope(pw, p)?;
    let v_lead = padic_valuation(phi.lead(), p).finite()?;
    let shift = Rat::new(BigInt::from(v_lead), BigInt::from(d - 1));
    let mut rho = mu - &shift;
    if rho.is_negative() {
        rho = Rat::zero();
    }
    let r_prime_rho = &rho + shift;
    Ok(FiniteRadius { rho, r_prime_rho })
}

/// Radius exponents of phi at the finite place p.
pub fn radius_at(phi: &Polynomial, p: Prime) -> Result<FiniteRadius> {
    if plain_good_reduction(phi, p) {
        return Ok(FiniteRadius {
            rho: Rat::zero(),
            r_prime_rho: Rat::zero(),
        });
    }
    radius_from_resultant(phi, p, &displacement_resultant(phi)?)
}

/// Verdict for one place. At the archimedean place (always counted as
/// bad for a polynomial of degree >= 2) the exponents are absent.
#[derive(Clone, Debug)]
pub struct PlaceReport {
    pub place: Place,
    pub bad: bool,
    pub rho: Option<Rat>,
    pub r_prime_rho: Option<Rat>,
}

/// All places where phi could have bad reduction, with verdicts.
#[derive(Clone, Debug)]
pub struct Census {
    /// The archimedean place first, then candidate primes ascending
    /// (including candidates that turn out to be potentially good).
    pub reports: Vec<PlaceReport>,
    /// Number of bad places including the archimedean one.
    pub s: u64,
    /// Number of archimedean places (always 1 over Q).
    pub s_inf: u64,
}

pub fn bad_census(phi: &Polynomial) -> Result<Census> {
    let mut reports = vec![PlaceReport {
        place: Place::Archimedean,
        bad: true,
        rho: None,
        r_prime_rho: None,
    }];
    let cands = candidate_primes(phi)?;
    let pw = if cands.is_empty() {
        None
    } else {
        Some(displacement_resultant(phi)?)
    };
    let mut s = 1u64;
    for p in cands {
        let fr = radius_from_resultant(phi, p, pw.as_ref().expect("resultant computed"))?;
        let bad = fr.rho.is_positive();
        if bad {
            s += 1;
        }
        reports.push(PlaceReport {
            place: Place::Finite(p),
            bad,
            rho: Some(fr.rho),
            r_prime_rho: Some(fr.r_prime_rho),
        });
    }
    Ok(Census {
        reports,
        s,
        s_inf: 1,
    })
}

/// Lower bound on the radius exponent at a finite place of bad
/// reduction: rho >= 1 for d = 2 and rho >= 1/((d-1)(d-2)) for d >= 3,
/// provided the map has a rational preperiodic point. Errs when handed
/// a report for the archimedean place or for a good place.
pub fn minrad_holds(phi: &Polynomial, report: &PlaceReport) -> Result<bool> {
    let rho = report
        .rho
        .as_ref()
        .ok_or_else(|| Error::arg("minimal-radius bound needs a finite place"))?;
    if !report.bad {
        return Err(Error::arg(
            "minimal-radius bound applies only at places of bad reduction",
        ));
    }
    let d = phi.degree() as i64;
    let threshold = if d == 2 {
        Rat::one()
    } else {
        Rat::new(BigInt::one(), BigInt::from((d - 1) * (d - 2)))
    };
    Ok(*rho >= threshold)
}

fn coeff_tail_bound(phi: &Polynomial) -> Rat {
    // (1 + sum_{i<d} |a_i|) / |a_d|, clamped below by 1. Any x (real or
    // complex) with |x| beyond this has |phi(x)| > |x|^(d-1) >= |x| and
    // the gap grows, so the orbit escapes.
    let d = phi.degree();
    let mut s = Rat::one();
    for i in 0..d {
        s += phi.coeff(i).abs();
    }
    let b = s / phi.lead().abs();
    if b < Rat::one() {
        Rat::one()
    } else {
        b
    }
}

fn quadratic_disc(phi: &Polynomial) -> Option<Rat> {
    // 1 - 4c for the family z^2 + c when the fixed points are real.
    let c = phi.as_quadratic_family()?;
    let disc = Rat::one() - Rat::from_integer(BigInt::from(4)) * c;
    if disc.is_negative() {
        None
    } else {
        Some(disc)
    }
}

/// An exact rational B such that every rational x with |x| > B has an
/// orbit escaping to infinity. For z^2 + c with c <= 1/4 this is the
/// larger real fixed point (1 + sqrt(1-4c))/2 rounded up by less than
/// 1e-6 (for real x beyond the largest real fixed point the orbit is
/// strictly increasing and cannot converge, hence escapes); otherwise
/// it is the coefficient-tail bound max(1, (1 + sum_{i<d}|a_i|)/|a_d|).
pub fn arch_escape_radius(phi: &Polynomial, bits: u32) -> Rat {
    let general = coeff_tail_bound(phi);
    if let Some(disc) = quadratic_disc(phi) {
        let s = sqrt_rat(&disc, bits.max(64));
        let beta = (Rat::one() + s.hi()) / Rat::from_integer(BigInt::from(2));
        if beta < general {
            return beta;
        }
    }
    general
}

/// Enclosure of an upper bound for the scale-invariant archimedean
/// radius |a_d|^(1/(d-1)) * r'_inf, where r'_inf is the radius of the
/// smallest complex disk containing the archimedean filled Julia set.
/// For z^2 + c with c <= 0 this is the exact radius (1 + sqrt(1-4c))/2;
/// in general it is the (complex-valid) coefficient-tail bound scaled
/// by |a_d|^(1/(d-1)), which may overestimate.
pub fn arch_radius_upper(phi: &Polynomial, bits: u32) -> Interval {
    if let Some(r) = arch_radius_exact_quadratic(phi, bits) {
        return r;
    }
    let root = nth_root_rat(&phi.lead().abs(), phi.degree() as u32 - 1, bits);
    root.mul(&Interval::point(coeff_tail_bound(phi)))
}

/// Enclosure of the exact scale-invariant archimedean radius, available
/// for z^2 + c with c <= 0: the filled Julia set then lies in the
/// closed disk of radius beta = (1 + sqrt(1-4c))/2 about 0 (for
/// |z| > beta, |z^2 + c| >= |z|^2 + c > |z|) and contains +/- beta, so
/// the smallest enclosing disk has radius exactly beta.
pub fn arch_radius_exact_quadratic(phi: &Polynomial, bits: u32) -> Option<Interval> {
    let c = phi.as_quadratic_family()?;
    if c.is_positive() {
        return None;
    }
    let disc = Rat::one() - Rat::from_integer(BigInt::from(4)) * c;
    let s = sqrt_rat(&disc, bits);
    Some(
        s.add(&Interval::point(Rat::one()))
            .scale(&Rat::new(BigInt::one(), BigInt::from(2))),
    )
}
