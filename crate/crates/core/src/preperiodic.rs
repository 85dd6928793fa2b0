//! Provably complete enumeration of the rational preperiodic points of
//! a polynomial map.
//!
//! A point is preperiodic when its forward orbit is finite, i.e. some
//! iterate repeats. The enumeration rests on a finite search box that
//! certifiably contains every rational preperiodic point:
//!
//! - at a finite place p, if v_p(x) = -e with e strictly greater than
//!   the cap below, the leading term of phi dominates p-adically, so
//!   v_p(phi(x)) = v_p(a_d) - d e < -e and the exponent then grows
//!   without bound; such an orbit never repeats. The cap at p is
//!   max(0, floor(eps_p)) with
//!   eps_p = max(v_p(a_d)/(d-1), max_{i<d, a_i != 0} (v_p(a_d) - v_p(a_i))/(d-i)),
//!   which is <= 0 at every prime of plain good reduction, so only the
//!   candidate primes can carry a positive cap;
//! - over the reals, |x| beyond [`arch_escape_radius`] forces
//!   |phi(x)| > |x| with growing gap, so the orbit diverges.
//!
//! Hence every rational preperiodic point is u/v with v dividing the
//! product of the capped prime powers and |u| <= bound * v. The box is
//! finite, membership of an orbit in it is decidable, and an orbit that
//! stays in the box must revisit a point by pigeonhole, so classifying
//! each candidate terminates and the returned set is complete.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{padic_valuation, Place, Prime, Rat};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::reduction::{arch_escape_radius, candidate_primes};

/// Cap on the number of candidates [`enumerate_preperiodic`] will test.
pub const DEFAULT_MAX_CANDIDATES: u64 = 100_000_000;

/// Finite search region containing all rational preperiodic points.
#[derive(Clone, Debug)]
pub struct CandidateBox {
    /// Real escape bound: |x| > arch_bound certifies divergence.
    pub arch_bound: Rat,
    /// Denominator exponent caps, keyed by the candidate primes (a cap
    /// may be 0, which still excludes that prime from denominators).
    pub prime_caps: BTreeMap<u64, u32>,
}

impl CandidateBox {
    /// Is x inside the box? (Denominator divides the capped prime
    /// powers, and |x| is at most the real bound.)
    pub fn contains(&self, x: &Rat) -> bool {
        if x.abs() > self.arch_bound {
            return false;
        }
        self.reduce_denominator(x).is_one()
    }

    /// What remains of den(x) after stripping each capped prime power.
    fn reduce_denominator(&self, x: &Rat) -> BigUint {
        let mut den = x.denom().magnitude().clone();
        for (&p, &cap) in &self.prime_caps {
            let pb = BigUint::from(p);
            let mut k = 0;
            while k < cap {
                let (q, r) = den.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                den = q;
                k += 1;
            }
        }
        den
    }

    /// Which place certifies that x lies outside the box, if any:
    /// the smallest capped prime whose cap is exceeded, else the
    /// archimedean place. Returns an internal error when the
    /// denominator involves a prime outside the caps (cannot happen
    /// for points produced by iterating from inside the box).
    fn exit_place(&self, x: &Rat) -> Result<Option<Place>> {
        if x.is_zero() {
            return Ok(None);
        }
        for (&p, &cap) in &self.prime_caps {
            let v = padic_valuation(x, Prime::new(p)?).finite()?;
            if v < -(cap as i64) {
                return Ok(Some(Place::finite(p)?));
            }
        }
        if !self.reduce_denominator(x).is_one() {
            return Err(Error::internal(format!(
                "orbit point {x} has a denominator prime outside the box caps"
            )));
        }
        if x.abs() > self.arch_bound {
            return Ok(Some(Place::Archimedean));
        }
        Ok(None)
    }

    fn denominators(&self) -> Result<Vec<BigUint>> {
        let mut combos: u64 = 1;
        for &cap in self.prime_caps.values() {
            combos = combos
                .checked_mul(cap as u64 + 1)
                .filter(|&c| c <= 1_000_000)
                .ok_or_else(|| Error::SizeGuard("too many candidate denominators".into()))?;
        }
        let mut ws = vec![BigUint::one()];
        for (&p, &cap) in &self.prime_caps {
            let mut next = Vec::with_capacity(ws.len() * (cap as usize + 1));
            for w in &ws {
                let mut pk = BigUint::one();
                for _ in 0..=cap {
                    next.push(w * &pk);
                    pk *= p;
                }
            }
            ws = next;
        }
        ws.sort();
        Ok(ws)
    }

    fn numerator_limit(&self, w: &BigUint) -> BigInt {
        // floor(arch_bound * w)
        let num = self.arch_bound.numer() * BigInt::from(w.clone());
        num.div_floor(self.arch_bound.denom())
    }

    /// Exact number of candidates: reduced fractions u/w with w an
    /// admissible denominator and |u| <= arch_bound * w.
    pub fn candidate_count(&self) -> Result<BigUint> {
        let mut total = BigUint::zero();
        for w in self.denominators()? {
            let n = self.numerator_limit(&w);
            if n.is_negative() {
                continue;
            }
            let n = n.to_biguint().expect("nonnegative");
            total += count_coprime_up_to(&n, &w) * 2u32;
            if w.is_one() {
                total += 1u32; // u = 0
            }
        }
        Ok(total)
    }

    fn candidates(&self) -> Result<Vec<Rat>> {
        let mut out = Vec::new();
        for w in self.denominators()? {
            let n = self.numerator_limit(&w);
            let n = match n.to_i64() {
                Some(n) if n >= 0 => n as u64,
                Some(_) => continue,
                None => return Err(Error::SizeGuard("candidate numerators too large".into())),
            };
            let wb = BigInt::from(w.clone());
            if w.is_one() {
                out.push(Rat::zero());
            }
            for u in 1..=n {
                if BigUint::from(u).gcd(&w).is_one() {
                    let x = Rat::new(BigInt::from(u), wb.clone());
                    out.push(-x.clone());
                    out.push(x);
                }
            }
        }
        Ok(out)
    }
}

/// Count of 1 <= u <= n coprime to w, by inclusion-exclusion over the
/// distinct prime divisors of w.
fn count_coprime_up_to(n: &BigUint, w: &BigUint) -> BigUint {
    let mut primes = Vec::new();
    let mut rest = w.clone();
    let mut p = BigUint::from(2u32);
    // w is a product of small primes from the caps, so trial division
    // is fine here.
    while &p * &p <= rest {
        if rest.is_multiple_of(&p) {
            primes.push(p.clone());
            while rest.is_multiple_of(&p) {
                rest /= &p;
            }
        }
        p += 1u32;
    }
    if rest > BigUint::one() {
        primes.push(rest);
    }
    let mut total = BigInt::from(n.clone());
    for mask in 1u32..(1 << primes.len()) {
        let mut prod = BigUint::one();
        for (i, q) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod *= q;
            }
        }
        let term = BigInt::from(n / &prod);
        if mask.count_ones() % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    total.to_biguint().expect("count is nonnegative")
}

/// Search box for phi: escape radius and denominator caps as in the
/// module documentation.
pub fn build_box(phi: &Polynomial, bits: u32) -> Result<CandidateBox> {
    let d = phi.degree();
    let v_of = |x: &Rat, p: Prime| padic_valuation(x, p).finite();
    let mut prime_caps = BTreeMap::new();
    for p in candidate_primes(phi)? {
        let vd = v_of(phi.lead(), p)?;
        let mut eps = Rat::new(BigInt::from(vd), BigInt::from(d as i64 - 1));
        for i in 0..d {
            let c = phi.coeff(i);
            if c.is_zero() {
                continue;
            }
            let slope = Rat::new(
                BigInt::from(vd - v_of(&c, p)?),
                BigInt::from((d - i) as i64),
            );
            eps = eps.max(slope);
        }
        let cap = if eps.is_positive() {
            eps.floor()
                .to_integer()
                .to_u32()
                .ok_or_else(|| Error::SizeGuard("denominator cap exceeds u32".into()))?
        } else {
            0
        };
        prime_caps.insert(p.get(), cap);
    }
    Ok(CandidateBox {
        arch_bound: arch_escape_radius(phi, bits),
        prime_caps,
    })
}

/// Outcome of iterating one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitResult {
    /// The orbit repeats: phi^(tail + period)(x) = phi^tail(x) with
    /// minimal such tail and period.
    Preperiodic { tail: u32, period: u32 },
    /// The orbit leaves the box at the given iterate (step 1 is
    /// phi(x)), certified by the given place; the point cannot be
    /// preperiodic.
    EscapesBox { step: u32, place: Place },
}

/// Iterate x under phi until the orbit repeats or leaves the box.
/// Errs if x itself is outside the box.
pub fn classify_orbit(phi: &Polynomial, x: &Rat, b: &CandidateBox) -> Result<OrbitResult> {
    if !b.contains(x) {
        return Err(Error::arg(format!("{x} is outside the candidate box")));
    }
    let mut seen: BTreeMap<Rat, u32> = BTreeMap::new();
    let mut y = x.clone();
    let mut n: u32 = 0;
    loop {
        seen.insert(y.clone(), n);
        y = phi.eval(&y);
        n += 1;
        if let Some(place) = b.exit_place(&y)? {
            return Ok(OrbitResult::EscapesBox { step: n, place });
        }
        if let Some(&i) = seen.get(&y) {
            return Ok(OrbitResult::Preperiodic {
                tail: i,
                period: n - i,
            });
        }
    }
}

/// All rational preperiodic points of phi, with the point at infinity
/// (always fixed for a polynomial) counted in `total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreperiodicSet {
    /// (point, tail, period), sorted by point.
    pub finite_points: Vec<(Rat, u32, u32)>,
    /// Number of preperiodic points in projective space:
    /// finite_points.len() + 1.
    pub total: u64,
}

/// Complete list of rational preperiodic points of phi (see the module
/// documentation for why no point outside the search box qualifies).
pub fn enumerate_preperiodic(phi: &Polynomial, bits: u32) -> Result<PreperiodicSet> {
    enumerate_with_limit(phi, bits, DEFAULT_MAX_CANDIDATES)
}

/// As [`enumerate_preperiodic`], refusing (with a size-guard error) to
/// test more than `max_candidates` points.
pub fn enumerate_with_limit(
    phi: &Polynomial,
    bits: u32,
    max_candidates: u64,
) -> Result<PreperiodicSet> {
    let b = build_box(phi, bits)?;
    let count = b.candidate_count()?;
    if count > BigUint::from(max_candidates) {
        return Err(Error::SizeGuard(format!(
            "candidate box holds {count} points, above the limit of {max_candidates}"
        )));
    }

    // Classification memo: Some((tail, period)) or None for "escapes".
    let mut known: BTreeMap<Rat, Option<(u32, u32)>> = BTreeMap::new();
    for x in b.candidates()? {
        if known.contains_key(&x) {
            continue;
        }
        let mut path = vec![x.clone()];
        let mut index: BTreeMap<Rat, u32> = BTreeMap::new();
        index.insert(x.clone(), 0);
        let verdict: Vec<(Rat, Option<(u32, u32)>)> = loop {
            let y = phi.eval(path.last().expect("nonempty path"));
            if b.exit_place(&y)?.is_some() {
                // Every point whose orbit passes through y escapes.
                break path.into_iter().map(|p| (p, None)).collect();
            }
            if let Some(prior) = known.get(&y) {
                break match prior {
                    None => path.into_iter().map(|p| (p, None)).collect(),
                    Some((t, per)) => {
                        let k = path.len() as u32;
                        let per = *per;
                        let t = *t;
                        path.into_iter()
                            .enumerate()
                            .map(|(j, p)| (p, Some((t + k - j as u32, per))))
                            .collect()
                    }
                };
            }
            if let Some(&i) = index.get(&y) {
                let n = path.len() as u32;
                break path
                    .into_iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let j = j as u32;
                        let tail = i.saturating_sub(j);
                        (p, Some((tail, n - i)))
                    })
                    .collect();
            }
            index.insert(y.clone(), path.len() as u32);
            path.push(y);
        };
        known.extend(verdict);
    }

    let mut finite_points: Vec<(Rat, u32, u32)> = known
        .into_iter()
        .filter_map(|(x, v)| v.map(|(t, p)| (x, t, p)))
        .collect();
    finite_points.sort_by(|a, b| a.0.cmp(&b.0));
    let total = finite_points.len() as u64 + 1;
    Ok(PreperiodicSet {
        finite_points,
        total,
    })
}

/// One entry of a family scan over z^2 + c, c = j/m^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    pub j: i64,
    pub c: Rat,
    pub finite_count: u64,
    pub total_count: u64,
}

/// Enumerate preperiodic points of z^2 + j/m^2 for every j in
/// j_lo..=j_hi, on up to `jobs` threads. The result is ordered by j
/// and independent of `jobs`.
pub fn scan_quadratic(
    j_lo: i64,
    j_hi: i64,
    m: u64,
    bits: u32,
    jobs: usize,
) -> Result<Vec<ScanRecord>> {
    if m == 0 {
        return Err(Error::arg("denominator parameter m must be positive"));
    }
    if j_lo > j_hi {
        return Err(Error::arg("empty scan range"));
    }
    let jobs = jobs.max(1);
    let m2 = BigInt::from(m) * BigInt::from(m);
    let js: Vec<i64> = (j_lo..=j_hi).collect();
    let chunk = js.len().div_ceil(jobs);

    let run = |j: i64| -> Result<ScanRecord> {
        let c = Rat::new(BigInt::from(j), m2.clone());
        let set = enumerate_preperiodic(&Polynomial::quadratic(c.clone()), bits)?;
        Ok(ScanRecord {
            j,
            c,
            finite_count: set.finite_points.len() as u64,
            total_count: set.total,
        })
    };

    let mut out = Vec::with_capacity(js.len());
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for part in js.chunks(chunk.max(1)) {
            handles.push(scope.spawn(move || -> Result<Vec<ScanRecord>> {
                part.iter().map(|&j| run(j)).collect()
            }));
        }
        for h in handles {
            out.extend(h.join().expect("scan worker panicked")?);
        }
        Ok(())
    })?;
    Ok(out)
}
