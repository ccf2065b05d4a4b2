//! Field contexts and residue field arithmetic.
//!
//! A [`FieldContext`] fixes a finite tower inside C_p: the prime p, an
//! unramified degree k, a ramification index w with uniformizer pi satisfying
//! pi^w = p, and a digit budget N. Its residue field is F_{p^k}, presented as
//! F_p adjoined t modulo the lexicographically least irreducible monic polynomial of
//! degree k (coefficients compared low degree first), so the same parameters
//! always name the same field.

use crate::error::{Error, Result};
use crate::val::Val;
use std::fmt;
use std::sync::Arc;

pub type Ctx = Arc<FieldContext>;

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct FieldContext {
    prime: u64,
    unram_degree: usize,
    ram_index: u64,
    precision: usize,
    residue_modulus: Vec<u64>, // c_0..c_{k-1}; modulus = t^k + sum c_i t^i
}

/// Everything is kept in i128 during digit arithmetic; this caps the
/// parameters so intermediate products cannot overflow.
const MAX_PRIME: u64 = 1 << 20;

impl FieldContext {
    pub fn new(prime: u64, unram_degree: usize, ram_index: u64, precision: usize) -> Result<Ctx> {
        if !is_prime(prime) {
            return Err(Error::Config(format!("{prime} is not prime")));
        }
        if prime > MAX_PRIME {
            return Err(Error::Config(format!(
                "prime {prime} exceeds the supported bound {MAX_PRIME}"
            )));
        }
        if unram_degree < 1 || ram_index < 1 || precision < 1 {
            return Err(Error::Config(
                "unramified degree, ramification index and precision must be >= 1".into(),
            ));
        }
        // Carry propagation folds integer polynomials in the residue
        // generator; make sure the worst case stays far inside i128.
        let k = unram_degree as u32;
        let bound = (precision as u128)
            .checked_mul(unram_degree as u128)
            .and_then(|b| b.checked_mul((prime as u128).checked_pow(k + 2)?))
            .and_then(|b| b.checked_mul(unram_degree as u128));
        match bound {
            Some(b) if b < (1u128 << 110) => {}
            _ => {
                return Err(Error::Config(
                    "context parameters too large for exact digit arithmetic".into(),
                ))
            }
        }
        let residue_modulus = least_irreducible(prime, unram_degree)
            .ok_or_else(|| Error::Config("no irreducible polynomial found".into()))?;
        Ok(Arc::new(FieldContext {
            prime,
            unram_degree,
            ram_index,
            precision,
            residue_modulus,
        }))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn unram_degree(&self) -> usize {
        self.unram_degree
    }

    pub fn ram_index(&self) -> u64 {
        self.ram_index
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Non-leading coefficients of the residue modulus, low to high.
    pub fn residue_modulus(&self) -> &[u64] {
        &self.residue_modulus
    }

    /// Residue field cardinality p^k.
    pub fn residue_order(&self) -> u128 {
        (self.prime as u128).pow(self.unram_degree as u32)
    }

    /// v(pi) = 1/w as an exact rational.
    pub fn pi_valuation(&self) -> Val {
        Val::new(1, self.ram_index as i64)
    }

    /// Unramified extension by the given factor, same pi and digit budget.
    pub fn extend_unramified(&self, factor: usize) -> Result<Ctx> {
        FieldContext::new(
            self.prime,
            self.unram_degree * factor,
            self.ram_index,
            self.precision,
        )
    }

    /// Ramified refinement: pi' with pi'^(w*factor) = p. The digit budget
    /// scales so the refined context resolves at least as much as this one.
    pub fn extend_ramified(&self, factor: u64) -> Result<Ctx> {
        FieldContext::new(
            self.prime,
            self.unram_degree,
            self.ram_index * factor,
            self.precision * factor as usize,
        )
    }

    /// Smallest common refinement of two contexts over the same prime.
    pub fn lcm_context(a: &Ctx, b: &Ctx) -> Result<Ctx> {
        if a.prime() != b.prime() {
            return Err(Error::MixedContexts);
        }
        if a == b {
            return Ok(a.clone());
        }
        let k = num_integer::lcm(a.unram_degree(), b.unram_degree());
        let w = num_integer::lcm(a.ram_index(), b.ram_index());
        let na = a.precision() * (w / a.ram_index()) as usize;
        let nb = b.precision() * (w / b.ram_index()) as usize;
        FieldContext::new(a.prime(), k, w, na.max(nb))
    }

    pub fn ff(self: &Ctx, coeffs: Vec<u64>) -> FFElem {
        let k = self.unram_degree;
        let mut c = coeffs;
        c.resize(k, 0);
        for x in &mut c {
            *x %= self.prime;
        }
        FFElem {
            ctx: self.clone(),
            c,
        }
    }

    pub fn ff_zero(self: &Ctx) -> FFElem {
        self.ff(vec![])
    }

    pub fn ff_one(self: &Ctx) -> FFElem {
        self.ff(vec![1])
    }

    pub fn ff_from_u64(self: &Ctx, n: u64) -> FFElem {
        self.ff(vec![n % self.prime])
    }

    /// The class of the generator t (for k = 1 this is just 0 + (t ≡ 0)?? no:
    /// for k = 1 the polynomial basis is trivial and t is not an element;
    /// callers must only ask for a generator when k > 1).
    pub fn ff_generator(self: &Ctx) -> FFElem {
        assert!(self.unram_degree > 1, "prime field has no generator digit");
        self.ff(vec![0, 1])
    }

    /// Element with the given enumeration index: index = sum c_i p^i.
    pub fn ff_from_index(self: &Ctx, mut idx: u128) -> FFElem {
        let mut c = Vec::with_capacity(self.unram_degree);
        for _ in 0..self.unram_degree {
            c.push((idx % self.prime as u128) as u64);
            idx /= self.prime as u128;
        }
        self.ff(c)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the residue field F_{p^k} in the polynomial basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FFElem {
    ctx: Ctx,
    c: Vec<u64>, // length k, each < p
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let part = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            };
            parts.push(part);
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl FFElem {
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Canonical enumeration index sum c_i p^i; orders candidate choices.
    pub fn index(&self) -> u128 {
        let p = self.ctx.prime as u128;
        let mut idx = 0u128;
        for &c in self.c.iter().rev() {
            idx = idx * p + c as u128;
        }
        idx
    }

    fn check_ctx(&self, other: &FFElem) {
        assert!(
            self.ctx == other.ctx,
            "mixed residue fields: F_{}^{} vs F_{}^{}",
            self.ctx.prime,
            self.ctx.unram_degree,
            other.ctx.prime,
            other.ctx.unram_degree
        );
    }

    pub fn add(&self, other: &FFElem) -> FFElem {
        self.check_ctx(other);
        let p = self.ctx.prime;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a + b) % p)
            .collect();
        FFElem {
            ctx: self.ctx.clone(),
            c,
        }
    }

    pub fn sub(&self, other: &FFElem) -> FFElem {
        self.check_ctx(other);
        let p = self.ctx.prime;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        FFElem {
            ctx: self.ctx.clone(),
            c,
        }
    }

    pub fn neg(&self) -> FFElem {
        let p = self.ctx.prime;
        FFElem {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn mul(&self, other: &FFElem) -> FFElem {
        self.check_ctx(other);
        let p = self.ctx.prime as u128;
        let k = self.ctx.unram_degree;
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u128 * b as u128) % p;
            }
        }
        // fold t^k = -(c_{k-1} t^{k-1} + ... + c_0)
        for i in (k..2 * k - 1).rev() {
            let top = prod[i];
            if top == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.ctx.residue_modulus.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let idx = i - k + j;
                prod[idx] = (prod[idx] + top * (p - m as u128)) % p;
            }
        }
        FFElem {
            ctx: self.ctx.clone(),
            c: prod[..k].iter().map(|&x| x as u64).collect(),
        }
    }

    pub fn pow_u128(&self, mut e: u128) -> FFElem {
        let mut base = self.clone();
        let mut acc = self.ctx.ff_one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<FFElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x^(q-2) with q = p^k
        let q = self.ctx.residue_order();
        Ok(self.pow_u128(q - 2))
    }

    pub fn div(&self, other: &FFElem) -> Result<FFElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn frobenius(&self) -> FFElem {
        self.pow_u128(self.ctx.prime as u128)
    }
}

/// A point of the projective line over a residue field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ResPoint {
    Finite(FFElem),
    Infinity,
}

impl fmt::Debug for ResPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ResPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResPoint::Finite(x) => write!(f, "{x}"),
            ResPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl ResPoint {
    /// Ordering key: finite points by enumeration index, infinity last.
    pub fn order_key(&self) -> (u8, u128) {
        match self {
            ResPoint::Finite(x) => (0, x.index()),
            ResPoint::Infinity => (1, 0),
        }
    }
}

// ---------------------------------------------------------------------------
// Mod-p polynomial helpers for choosing the residue modulus. These work on
// raw coefficient vectors so the context can bootstrap itself.

fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    let prod: Vec<u64> = prod.into_iter().map(|x| x as u64).collect();
    poly_rem(&prod, m, p)
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = poly_trim(m.to_vec());
    let mut r = poly_trim(a.to_vec());
    let lead_inv = mod_inv(*m.last().unwrap(), p);
    while r.len() >= m.len() {
        let c = (r.last().copied().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
        let off = r.len() - m.len();
        for (j, &mj) in m.iter().enumerate() {
            let sub = (c as u128 * mj as u128) % p as u128;
            let idx = off + j;
            r[idx] = ((r[idx] as u128 + p as u128 - sub) % p as u128) as u64;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_gcd_modp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = (result as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    result
}

fn x_pow_q_mod(m: &[u64], p: u64, q_exp: u32) -> Vec<u64> {
    // x^(p^q_exp) mod m by repeated p-th powering
    let mut x = vec![0, 1];
    for _ in 0..q_exp {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

fn is_irreducible_modp(f: &[u64], p: u64) -> bool {
    let f = poly_trim(f.to_vec());
    let k = f.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    // x^(p^k) == x mod f, and gcd(x^(p^(k/q)) - x, f) = 1 for prime q | k
    let xq = x_pow_q_mod(&f, p, k as u32);
    let mut diff = xq;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    if !poly_trim(diff).is_empty() {
        return false;
    }
    let mut rem = k;
    let mut div = 2;
    let mut prime_divs = vec![];
    while div * div <= rem {
        if rem.is_multiple_of(div) {
            prime_divs.push(div);
            while rem.is_multiple_of(div) {
                rem /= div;
            }
        }
        div += 1;
    }
    if rem > 1 {
        prime_divs.push(rem);
    }
    for q in prime_divs {
        let mut d = x_pow_q_mod(&f, p, (k / q) as u32);
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = (d[1] + p - 1) % p;
        let g = poly_gcd_modp(&d, &f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least irreducible monic polynomial of degree k over
/// F_p, comparing coefficient tuples (c_0, ..., c_{k-1}).
fn least_irreducible(p: u64, k: usize) -> Option<Vec<u64>> {
    if k == 1 {
        return Some(vec![0]); // t itself: t + 0
    }
    let mut c = vec![0u64; k];
    loop {
        let mut f = c.clone();
        f.push(1);
        if is_irreducible_modp(&f, p) {
            return Some(c);
        }
        // increment the tuple lexicographically (c_0 least significant
        // position in the ordering, so bump from the high end)
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
        }
    }
}
