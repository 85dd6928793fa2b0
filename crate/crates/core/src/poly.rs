//! Dense univariate polynomials over Q, plus the validated wrapper for
//! dynamical systems (degree at least 2).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{rat_int, Rat};
use crate::error::{Error, Result};

/// A dense polynomial `c[0] + c[1] z + ... + c[n] z^n` over Q.
/// The zero polynomial is the empty coefficient vector; otherwise the
/// leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    c: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(q: Rat) -> Self {
        Poly::from_coeffs(vec![q])
    }

    pub fn var() -> Self {
        Poly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn from_coeffs(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|q| q.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.c.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.c.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for q in self.c.iter().rev() {
            acc = acc * x + q;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) + other.coeff(i));
        }
        Poly::from_coeffs(c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            c: self.c.iter().map(|q| -q.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn scale(&self, q: &Rat) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|a| a * q).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute `inner` for the variable.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for q in self.c.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(q.clone()));
        }
        acc
    }

    /// Exact division; returns `None` if `other` does not divide `self`.
    pub fn exact_div(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let dn = self.degree().unwrap();
        let dd = other.degree().unwrap();
        if dn < dd {
            return None;
        }
        let mut rem = self.c.clone();
        let mut quo = vec![Rat::zero(); dn - dd + 1];
        let lead = other.lead().unwrap();
        for k in (0..=dn - dd).rev() {
            let q = &rem[k + dd] / lead;
            if !q.is_zero() {
                for (i, b) in other.c.iter().enumerate() {
                    let t = &q * b;
                    rem[k + i] -= t;
                }
            }
            quo[k] = q;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return None;
        }
        Some(Poly::from_coeffs(quo))
    }

    /// Multiplicity of the root 0, i.e. the index of the lowest nonzero
    /// coefficient (`None` for the zero polynomial).
    pub fn order_at_zero(&self) -> Option<usize> {
        self.c.iter().position(|q| !q.is_zero())
    }
}

/// Determinant by fraction-free (Bareiss) elimination. Works over any
/// integral domain; here the entries are polynomials in one variable.
pub fn bareiss_determinant(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Poly::zero();
            };
            m.swap(k, swap);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t
                    .exact_div(&prev)
                    .expect("Bareiss elimination: division must be exact");
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

/// Resultant of two polynomials with coefficients in Q[w], eliminating
/// the main variable via the Sylvester matrix.
pub fn resultant(f: &[Poly], g: &[Poly]) -> Poly {
    let df = f.len() - 1;
    let dg = g.len() - 1;
    assert!(
        !f[df].is_zero() && !g[dg].is_zero(),
        "resultant: leading zero"
    );
    let n = df + dg;
    if n == 0 {
        return Poly::one();
    }
    let mut m = vec![vec![Poly::zero(); n]; n];
    for (r, row) in m.iter_mut().enumerate().take(dg) {
        for (i, fi) in f.iter().enumerate() {
            row[r + df - i] = fi.clone();
        }
    }
    for (r, row) in m.iter_mut().skip(dg).enumerate() {
        for (i, gi) in g.iter().enumerate() {
            row[r + dg - i] = gi.clone();
        }
    }
    bareiss_determinant(m)
}

// ---------------------------------------------------------------------------
// dynamical polynomials
// ---------------------------------------------------------------------------

/// A polynomial map of degree at least 2 over Q, the objects whose
/// dynamics this crate studies. Construction validates the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    p: Poly,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Rat>) -> Result<Self> {
        let p = Poly::from_coeffs(coeffs);
        match p.degree() {
            Some(d) if d >= 2 => Ok(Polynomial { p }),
            _ => Err(Error::arg("polynomial must have degree at least 2")),
        }
    }

    /// The quadratic z^2 + c.
    pub fn quadratic(c: Rat) -> Self {
        Polynomial {
            p: Poly::from_coeffs(vec![c, Rat::zero(), Rat::one()]),
        }
    }

    pub fn degree(&self) -> usize {
        self.p.degree().unwrap()
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.p.coeff(i)
    }

    pub fn coeffs(&self) -> &[Rat] {
        self.p.coeffs()
    }

    pub fn lead(&self) -> &Rat {
        self.p.lead().unwrap()
    }

    pub fn poly(&self) -> &Poly {
        &self.p
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.p.eval(x)
    }

    /// Is this z^2 + c? Returns c if so.
    pub fn as_quadratic_family(&self) -> Option<&Rat> {
        if self.degree() == 2 && self.lead().is_one() && self.coeff(1).is_zero() {
            Some(&self.p.coeffs()[0])
        } else {
            None
        }
    }

    /// Conjugate by h(z) = alpha z + beta: returns h^{-1} . phi . h,
    /// which is (phi(alpha z + beta) - beta) / alpha.
    pub fn conjugate(&self, alpha: &Rat, beta: &Rat) -> Result<Polynomial> {
        if alpha.is_zero() {
            return Err(Error::arg("conjugation scale must be nonzero"));
        }
        let h = Poly::from_coeffs(vec![beta.clone(), alpha.clone()]);
        let composed = self.p.compose(&h).sub(&Poly::constant(beta.clone()));
        Polynomial::new(composed.scale(&alpha.recip()).coeffs().to_vec())
    }
}

impl fmt::Display for Polynomial {
    /// Render in the same grammar `parse_poly` accepts, e.g.
    /// `z^2 - 29/16` or `z^3 - (1/25)z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for i in (0..=d).rev() {
            let c = self.coeff(i);
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() || i == 0 {
                    write!(f, "{}", mag)?;
                } else {
                    write!(f, "({})", mag)?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{}", i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn poly_from_ints(coeffs: &[i64]) -> Result<Polynomial> {
    Polynomial::new(coeffs.iter().map(|&n| rat_int(n)).collect())
}

/// All rational roots of a nonzero polynomial over Q, by the rational
/// root test applied to the integer polynomial obtained by clearing
/// denominators. Used as an independent oracle in tests and checks.
pub fn rational_roots(p: &Poly) -> Result<Vec<Rat>> {
    use num_integer::Integer;
    if p.is_zero() {
        return Err(Error::arg("rational_roots of the zero polynomial"));
    }
    // Clear denominators.
    let mut lcm = BigInt::one();
    for q in p.coeffs() {
        lcm = lcm.lcm(q.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|q| (q * Rat::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut roots = Vec::new();
    if p.eval(&Rat::zero()).is_zero() {
        roots.push(Rat::zero());
    }
    let lead = ints.last().unwrap().clone();
    let low = match ints.iter().find(|c| !c.is_zero()) {
        Some(c) => c.clone(),
        None => return Ok(roots),
    };
    let divs = |n: &BigInt| -> Result<Vec<BigInt>> {
        let f = crate::arith::factor(&n.abs().to_biguint().unwrap())?;
        let mut out = vec![BigInt::one()];
        for (p, k) in f {
            let mut next = Vec::new();
            for e in 0..=k {
                let pe = num_traits::pow::pow(BigInt::from(p), e as usize);
                for d in &out {
                    next.push(d * &pe);
                }
            }
            out = next;
        }
        Ok(out)
    };
    for a in divs(&low)? {
        for b in divs(&lead)? {
            for sgn in [1i64, -1] {
                let cand = Rat::new(&a * BigInt::from(sgn), b.clone());
                if p.eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn z() -> Poly {
        Poly::var()
    }

    #[test]
    fn arithmetic_and_eval() {
        // (z+1)(z-1) = z^2 - 1
        let p = z().add(&Poly::one()).mul(&z().sub(&Poly::one()));
        assert_eq!(p, Poly::from_coeffs(vec![rat(-1, 1), rat(0, 1), rat(1, 1)]));
        assert_eq!(p.eval(&rat(3, 1)), rat(8, 1));
        assert_eq!(
            p.compose(&z().add(&Poly::one())).eval(&rat(0, 1)),
            rat(0, 1)
        );
        let q = p.mul(&p).exact_div(&p).unwrap();
        assert_eq!(q, p);
        assert!(p.exact_div(&z()).is_none());
    }

    #[test]
    fn conjugation_round_trip() {
        let phi = Polynomial::new(vec![rat(-29, 16), rat(0, 1), rat(1, 1)]).unwrap();
        let psi = phi.conjugate(&rat(2, 3), &rat(1, 5)).unwrap();
        let back = psi.conjugate(&rat(3, 2), &rat(-3, 10)).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn resultant_matches_product_formula() {
        // Res(z^2 - z, g) = g(0) g(1) for monic f with roots 0, 1.
        // Take g = z^2 + 3z + 2 (constant in w): Res = 2 * 6 = 12.
        let f = vec![Poly::zero(), Poly::constant(rat(-1, 1)), Poly::one()];
        let g = vec![
            Poly::constant(rat(2, 1)),
            Poly::constant(rat(3, 1)),
            Poly::one(),
        ];
        let r = resultant(&f, &g);
        assert_eq!(r, Poly::constant(rat(12, 1)));
    }

    #[test]
    fn display_round_trip_shapes() {
        let phi = Polynomial::new(vec![rat(-29, 16), rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(phi.to_string(), "z^2 - 29/16");
        let phi = Polynomial::new(vec![rat(0, 1), rat(-1, 25), rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(phi.to_string(), "z^3 - (1/25)z");
        let phi = Polynomial::new(vec![rat(0, 1), rat(0, 1), rat(-7, 1), rat(343, 1)]).unwrap();
        assert_eq!(phi.to_string(), "343z^3 - 7z^2");
    }

    #[test]
    fn rational_roots_oracle() {
        // (z - 1/2)(z + 3)(z - 2) z
        let p = Poly::from_coeffs(vec![rat(1, 1)])
            .mul(&z().sub(&Poly::constant(rat(1, 2))))
            .mul(&z().add(&Poly::constant(rat(3, 1))))
            .mul(&z().sub(&Poly::constant(rat(2, 1))))
            .mul(&z());
        let roots = rational_roots(&p).unwrap();
        assert_eq!(roots, vec![rat(-3, 1), rat(0, 1), rat(1, 2), rat(2, 1)]);
    }

    #[test]
    fn degree_validation() {
        assert!(Polynomial::new(vec![rat(1, 1), rat(1, 1)]).is_err());
        assert!(Polynomial::new(vec![rat(1, 1), rat(1, 1), rat(0, 1)]).is_err());
        assert!(Polynomial::new(vec![rat(1, 1), rat(1, 1), rat(2, 1)]).is_ok());
    }
}
