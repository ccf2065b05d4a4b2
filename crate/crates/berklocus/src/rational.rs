//! Exact arithmetic over the rationals: polynomials, rational functions and
//! p-adic valuations of rational numbers.
//!
//! This layer is precision-free. Maps whose coefficients come from parsed
//! input keep an exact rational copy of their numerator and denominator, and
//! the operations that are ill-conditioned in finite-precision p-adic
//! arithmetic (gcd, square-free decomposition, coprimality) are performed
//! here instead.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// p-adic valuation of a nonzero integer.
pub fn int_val_p(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if r.is_zero() {
            v += 1;
            n = q;
        } else {
            return v;
        }
    }
}

/// p-adic valuation of a rational number; `None` encodes +infinity (zero).
pub fn rat_val_p(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_val_p(x.numer(), p) as i64 - int_val_p(x.denom(), p) as i64)
}

/// Dense polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<Q>, // low to high, trimmed, empty = zero
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly::new(vec![Q::one()])
    }

    pub fn constant(c: Q) -> Self {
        QPoly::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| q_int(c)).collect())
    }

    /// The monomial x.
    pub fn x() -> Self {
        QPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial answers 0 by convention of callers that have
    /// already excluded it.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        QPoly::new(out)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        QPoly::new(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &Q) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: usize) -> QPoly {
        let mut base = self.clone();
        let mut acc = QPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * q_int(i as i64 + 1))
                .collect(),
        )
    }

    pub fn divrem(&self, div: &QPoly) -> (QPoly, QPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.coeffs.len() < div.coeffs.len() {
            return (QPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dn = div.coeffs.len();
        let lead = div.coeffs.last().unwrap();
        let qn = rem.len() - dn + 1;
        let mut quot = vec![Q::zero(); qn];
        for i in (0..qn).rev() {
            let c = &rem[i + dn - 1] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in div.coeffs.iter().enumerate() {
                let t = &c * d;
                rem[i + j] -= t;
            }
            quot[i] = c;
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        self.scale(&(Q::one() / lead))
    }

    /// Monic gcd via the Euclidean algorithm; exact over the rationals.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors. Characteristic zero, so
    /// a single gcd with the derivative suffices.
    pub fn squarefree_part(&self) -> Result<QPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Ok(QPoly::one());
        }
        let g = self.gcd(&self.derivative());
        Ok(self.divrem(&g).0.monic())
    }

    /// Resultant via the Euclidean remainder sequence.
    /// Res(f,g) = lc(f)^{deg g} * prod g(roots of f).
    pub fn resultant(&self, other: &QPoly) -> Result<Q> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = Q::one();
        let mut sign = false;
        loop {
            if b.degree() == 0 {
                let db = b.coeffs.len() - 1;
                if db == 0 {
                    acc *= b.leading().pow(a.degree() as i32);
                    break;
                }
            }
            if b.is_zero() {
                return Ok(Q::zero());
            }
            if b.coeffs.len() == 1 {
                acc *= b.leading().pow(a.degree() as i32);
                break;
            }
            let r = a.divrem(&b).1;
            if r.is_zero() {
                return Ok(Q::zero());
            }
            let da = a.degree();
            let db = b.degree();
            let dr = r.coeffs.len() - 1;
            acc *= b.leading().pow((da as i32) - (dr as i32));
            if (da & 1) == 1 && (db & 1) == 1 {
                sign = !sign;
            }
            a = b;
            b = r;
        }
        Ok(if sign { -acc } else { acc })
    }

    /// Coefficients of f(a + t) as a polynomial in t.
    pub fn taylor_shift(&self, a: &Q) -> QPoly {
        let mut out = self.coeffs.clone();
        let n = out.len();
        // synthetic Horner shift
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &out[j + 1] * a;
                out[j] += t;
            }
        }
        QPoly::new(out)
    }

    /// f(c * t) for a rational scalar c.
    pub fn rescale(&self, c: &Q) -> QPoly {
        let mut pw = Q::one();
        QPoly::new(
            self.coeffs
                .iter()
                .map(|a| {
                    let r = a * &pw;
                    pw *= c;
                    r
                })
                .collect(),
        )
    }

    /// Minimum p-adic valuation over the coefficients; `None` for zero poly.
    pub fn min_val_p(&self, p: u64) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| rat_val_p(c, p)).min()
    }

    /// Extract all rational roots, returning (roots with multiplicity,
    /// cofactor without rational roots).
    pub fn rational_roots(&self) -> (Vec<(Q, usize)>, QPoly) {
        let mut f = self.clone();
        let mut roots: Vec<(Q, usize)> = Vec::new();
        if f.is_zero() {
            return (roots, f);
        }
        // clear denominators, then candidates divide a0 / lead
        loop {
            if f.degree() == 0 {
                break;
            }
            let mut den_lcm = BigInt::one();
            for c in f.coeffs() {
                den_lcm = num_integer::Integer::lcm(&den_lcm, c.denom());
            }
            let ints: Vec<BigInt> = f
                .coeffs()
                .iter()
                .map(|c| c.numer() * (&den_lcm / c.denom()))
                .collect();
            let ord = ints.iter().position(|c| !c.is_zero()).unwrap();
            if ord > 0 {
                let e = {
                    let mut e = 0;
                    let mut g = f.clone();
                    while g.coeff(0).is_zero() && g.degree() > 0 {
                        g = QPoly::new(g.coeffs()[1..].to_vec());
                        e += 1;
                    }
                    f = g;
                    e
                };
                roots.push((Q::zero(), e));
                continue;
            }
            let a0 = ints[ord].abs();
            let an = ints.last().unwrap().abs();
            let mut found = None;
            'search: for r in divisors(&a0) {
                for s in divisors(&an) {
                    for sgn in [1i64, -1] {
                        let cand = Q::new(&r * BigInt::from(sgn), s.clone());
                        if f.eval(&cand).is_zero() {
                            found = Some(cand);
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some(root) => {
                    let lin = QPoly::new(vec![-root.clone(), Q::one()]);
                    let mut mult = 0;
                    loop {
                        let (q, r) = f.divrem(&lin);
                        if r.is_zero() {
                            mult += 1;
                            f = q;
                        } else {
                            break;
                        }
                    }
                    roots.push((root, mult));
                }
                None => break,
            }
        }
        (roots, f)
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // small exact search; inputs here come from desk-scale coefficients
    let mut out = vec![];
    let mut d = BigInt::one();
    let limit = BigInt::from(1_000_000u64);
    while &d * &d <= *n && d <= limit {
        if num_integer::Integer::is_multiple_of(n, &d) {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// Rational function over the rationals, kept in lowest terms with monic
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: QPoly,
    pub den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() > 0 {
            (num.divrem(&g).0, den.divrem(&g).0)
        } else {
            (num, den)
        };
        let lead = den.leading();
        Ok(RatFunc {
            num: num.scale(&(Q::one() / lead.clone())),
            den: den.scale(&(Q::one() / lead)),
        })
    }

    pub fn from_poly(p: QPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn constant(c: Q) -> RatFunc {
        RatFunc::from_poly(QPoly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> Result<RatFunc> {
        RatFunc::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &RatFunc) -> Result<RatFunc> {
        RatFunc::new(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn mul(&self, o: &RatFunc) -> Result<RatFunc> {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        if o.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        RatFunc::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: usize) -> Result<RatFunc> {
        RatFunc::new(self.num.pow(e), self.den.pow(e))
    }
}
