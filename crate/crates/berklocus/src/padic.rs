//! Exact finite-precision arithmetic in the tower fixed by a
//! [`crate::field::FieldContext`].
//!
//! A nonzero element is stored as pi^m * (d_0 + d_1 pi + ... ), with digits
//! d_i in the residue field and d_0 != 0, so the valuation m/w of a nonzero
//! element is always exact. Precision is tracked per element as the number
//! of known digits, and elements whose canonical digit expansion terminates
//! inside the budget are flagged exact; differences of exact elements can
//! therefore certify true equality. An element whose known digits all
//! cancel degrades to a `BigO` bound, and any question it cannot answer
//! raises [`Error::PrecisionExhausted`] instead of guessing.

use crate::error::{Error, Result};
use crate::field::{Ctx, FFElem};
use crate::rational::{int_val_p, Q};
use crate::val::{Val, ValOrInf};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, PartialEq)]
pub enum PadicElem {
    /// Exact zero.
    Zero(Ctx),
    /// pi^m * (d_0 + d_1 pi + ... + d_{L-1} pi^{L-1} + tail), d_0 != 0.
    /// When `exact`, the tail is exactly zero; otherwise it is O(pi^(m+L)).
    Approx {
        ctx: Ctx,
        m: i64,
        digits: Vec<FFElem>,
        exact: bool,
    },
    /// O(pi^m): indistinguishable from zero at the current precision.
    BigO { ctx: Ctx, m: i64 },
}

impl fmt::Debug for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicElem::Zero(_) => write!(f, "0"),
            PadicElem::BigO { ctx, m } => {
                write!(f, "O({})", pi_name(ctx, *m))
            }
            PadicElem::Approx {
                ctx,
                m,
                digits,
                exact,
            } => {
                let mut parts = vec![];
                for (i, d) in digits.iter().enumerate() {
                    if d.is_zero() {
                        continue;
                    }
                    let pos = m + i as i64;
                    let ds = format!("{d}");
                    let ds = if ds.contains('+') { format!("({ds})") } else { ds };
                    parts.push(if pos == 0 {
                        ds
                    } else {
                        format!("{}*{}", ds, pi_name(ctx, pos))
                    });
                }
                if parts.is_empty() {
                    parts.push("0".into());
                }
                if *exact {
                    write!(f, "{}", parts.join(" + "))
                } else {
                    write!(
                        f,
                        "{} + O({})",
                        parts.join(" + "),
                        pi_name(ctx, m + digits.len() as i64)
                    )
                }
            }
        }
    }
}

fn pi_name(ctx: &Ctx, e: i64) -> String {
    if ctx.ram_index() == 1 {
        match e {
            1 => format!("{}", ctx.prime()),
            _ => format!("{}^{}", ctx.prime(), e),
        }
    } else {
        match e {
            1 => "pi".into(),
            _ => format!("pi^{e}"),
        }
    }
}

impl PadicElem {
    pub fn ctx(&self) -> &Ctx {
        match self {
            PadicElem::Zero(c) | PadicElem::BigO { ctx: c, .. } => c,
            PadicElem::Approx { ctx, .. } => ctx,
        }
    }

    pub fn zero(ctx: &Ctx) -> PadicElem {
        PadicElem::Zero(ctx.clone())
    }

    pub fn one(ctx: &Ctx) -> PadicElem {
        PadicElem::lift(&ctx.ff_one())
    }

    /// The canonical digit lift: a single exact digit.
    pub fn lift(c: &FFElem) -> PadicElem {
        let ctx = c.ctx().clone();
        if c.is_zero() {
            return PadicElem::Zero(ctx);
        }
        PadicElem::Approx {
            ctx,
            m: 0,
            digits: vec![c.clone()],
            exact: true,
        }
    }

    /// pi^e, exact.
    pub fn pi_pow(ctx: &Ctx, e: i64) -> PadicElem {
        PadicElem::Approx {
            ctx: ctx.clone(),
            m: e,
            digits: vec![ctx.ff_one()],
            exact: true,
        }
    }

    pub fn from_int(ctx: &Ctx, n: i64) -> PadicElem {
        PadicElem::from_rational(ctx, &Q::from_integer(BigInt::from(n)))
    }

    /// Exact rational embedded to the context's digit budget. The valuation
    /// is exact; digits are the base-p expansion interleaved into pi
    /// positions (pi^w = p). Terminating expansions are flagged exact.
    pub fn from_rational(ctx: &Ctx, q: &Q) -> PadicElem {
        if q.is_zero() {
            return PadicElem::Zero(ctx.clone());
        }
        let p = ctx.prime();
        let w = ctx.ram_index() as i64;
        let n = ctx.precision();
        let vp = int_val_p(q.numer(), p) as i64 - int_val_p(q.denom(), p) as i64;
        let pb = BigInt::from(p);
        let unit_num = q.numer() / pb.pow(int_val_p(q.numer(), p) as u32);
        let unit_den = q.denom() / pb.pow(int_val_p(q.denom(), p) as u32);
        // p-digit count covering n pi-digits
        let t = n.div_ceil(w as usize).max(1);
        let modulus = BigUint::from(p).pow(t as u32);
        let num_mod = bigint_mod(&unit_num, &modulus);
        let den_mod = bigint_mod(&unit_den, &modulus);
        let den_inv = modinv(&den_mod, &modulus);
        let mut u = (num_mod * den_inv) % &modulus;
        let mut digits = vec![ctx.ff_zero(); n];
        let pbu = BigUint::from(p);
        for j in 0..t {
            let d = (&u % &pbu).to_u64().unwrap();
            let pos = j * w as usize;
            if pos < n {
                digits[pos] = ctx.ff_from_u64(d);
            }
            u /= &pbu;
        }
        // the expansion terminated inside the budget iff it is the honest
        // base-p expansion of a nonnegative integer prime to p
        let exact = u.is_zero() && unit_den.is_one() && unit_num >= BigInt::zero() && {
            // the top digit window must really be the end: recompute the
            // integer's digit length
            let bits = unit_num.to_biguint().unwrap();
            let mut len = 0usize;
            let mut v = bits;
            while !v.is_zero() {
                v /= &pbu;
                len += 1;
            }
            len <= t && (len.max(1) - 1) * (w as usize) < n
        };
        canonicalize_digits(ctx, vp * w, digits, exact)
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, PadicElem::Zero(_))
    }

    pub fn is_bigo(&self) -> bool {
        matches!(self, PadicElem::BigO { .. })
    }

    pub fn is_exact(&self) -> bool {
        match self {
            PadicElem::Zero(_) => true,
            PadicElem::Approx { exact, .. } => *exact,
            PadicElem::BigO { .. } => false,
        }
    }

    /// Exact valuation in units of v(p) = 1; +infinity for exact zero.
    pub fn valuation(&self) -> Result<ValOrInf> {
        match self {
            PadicElem::Zero(_) => Ok(ValOrInf::Infinite),
            PadicElem::Approx { ctx, m, .. } => Ok(ValOrInf::Finite(Val::new(
                *m,
                ctx.ram_index() as i64,
            ))),
            PadicElem::BigO { m, ctx } => Err(Error::PrecisionExhausted(format!(
                "valuation of an element only known to be O(pi^{m}) in {}; \
                 rerun with more precision",
                ctx_name(ctx)
            ))),
        }
    }

    /// Certified test v(x) >= bound. Answers even for `BigO` elements when
    /// the bound is already implied.
    pub fn val_at_least(&self, bound: Val) -> Result<bool> {
        match self {
            PadicElem::Zero(_) => Ok(true),
            PadicElem::Approx { ctx, m, .. } => {
                Ok(Val::new(*m, ctx.ram_index() as i64) >= bound)
            }
            PadicElem::BigO { ctx, m } => {
                if Val::new(*m, ctx.ram_index() as i64) >= bound {
                    Ok(true)
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "cannot certify v(x) >= {bound} for x = O(pi^{m})"
                    )))
                }
            }
        }
    }

    /// Lower bound on the valuation that is always available.
    pub fn val_lower_bound(&self) -> ValOrInf {
        match self {
            PadicElem::Zero(_) => ValOrInf::Infinite,
            PadicElem::Approx { ctx, m, .. } | PadicElem::BigO { ctx, m } => {
                ValOrInf::Finite(Val::new(*m, ctx.ram_index() as i64))
            }
        }
    }

    /// Number of known digits (relative precision); `None` when no digit is
    /// known.
    pub fn known_digits(&self) -> Option<usize> {
        match self {
            PadicElem::Approx { digits, .. } => Some(digits.len()),
            _ => None,
        }
    }

    /// Image in the residue field. Defined for v(x) >= 0, zero iff v(x) > 0.
    pub fn residue(&self) -> Result<FFElem> {
        match self {
            PadicElem::Zero(ctx) => Ok(ctx.ff_zero()),
            PadicElem::Approx { ctx, m, digits, .. } => {
                if *m > 0 {
                    Ok(ctx.ff_zero())
                } else if *m == 0 {
                    Ok(digits[0].clone())
                } else {
                    Err(Error::NegativeValuation)
                }
            }
            PadicElem::BigO { ctx, m } => {
                if *m > 0 {
                    Ok(ctx.ff_zero())
                } else {
                    Err(Error::PrecisionExhausted(
                        "residue of an element indistinguishable from zero".into(),
                    ))
                }
            }
        }
    }

    pub fn neg(&self) -> PadicElem {
        PadicElem::zero(self.ctx()).sub(self)
    }

    pub fn add(&self, other: &PadicElem) -> PadicElem {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &PadicElem) -> PadicElem {
        self.combine(other, -1)
    }

    fn combine(&self, other: &PadicElem, sign: i128) -> PadicElem {
        let ctx = self.ctx();
        assert!(ctx == other.ctx(), "mixed contexts in add/sub");
        match (self, other) {
            (PadicElem::Zero(_), _) => {
                if sign > 0 {
                    other.clone()
                } else {
                    match other {
                        PadicElem::Zero(_) | PadicElem::BigO { .. } => other.clone(),
                        PadicElem::Approx { .. } => {
                            PadicElem::zero(ctx).combine_nonzero(other, -1)
                        }
                    }
                }
            }
            (_, PadicElem::Zero(_)) => self.clone(),
            _ => self.combine_nonzero(other, sign),
        }
    }

    fn combine_nonzero(&self, other: &PadicElem, sign: i128) -> PadicElem {
        let ctx = self.ctx().clone();
        let exact = self.is_exact() && other.is_exact();
        let (s1, e1) = self.window();
        let (s2, e2) = other.window();
        let start = s1.min(s2);
        let end = if exact {
            // spans are finite for exact inputs; keep room for carries
            let span_end = self
                .span_end()
                .max(other.span_end())
                .max(start);
            span_end + ctx.precision() as i64 + ctx.ram_index() as i64
        } else {
            e1.min(e2)
        };
        if end <= start {
            return PadicElem::BigO { ctx, m: end };
        }
        let len = (end - start) as usize;
        let mut raw = vec![vec![0i128; ctx.unram_degree()]; len];
        self.pour_into(&mut raw, start, 1);
        other.pour_into(&mut raw, start, sign);
        canonicalize_raw(&ctx, start, raw, exact)
    }

    pub fn mul(&self, other: &PadicElem) -> PadicElem {
        let ctx = self.ctx();
        assert!(ctx == other.ctx(), "mixed contexts in mul");
        match (self, other) {
            (PadicElem::Zero(_), _) | (_, PadicElem::Zero(_)) => PadicElem::Zero(ctx.clone()),
            (PadicElem::BigO { m: m1, .. }, o) | (o, PadicElem::BigO { m: m1, .. }) => {
                let m2 = match o {
                    PadicElem::Approx { m, .. } | PadicElem::BigO { m, .. } => *m,
                    PadicElem::Zero(_) => unreachable!(),
                };
                PadicElem::BigO {
                    ctx: ctx.clone(),
                    m: m1 + m2,
                }
            }
            (
                PadicElem::Approx {
                    m: m1,
                    digits: d1,
                    exact: x1,
                    ..
                },
                PadicElem::Approx {
                    m: m2,
                    digits: d2,
                    exact: x2,
                    ..
                },
            ) => {
                let exact = *x1 && *x2;
                // relative precision: exact factors are infinitely precise
                let len = match (*x1, *x2) {
                    (true, true) => {
                        d1.len() + d2.len() - 1 + ctx.precision() + ctx.ram_index() as usize
                    }
                    (true, false) => d2.len(),
                    (false, true) => d1.len(),
                    (false, false) => d1.len().min(d2.len()),
                };
                let k = ctx.unram_degree();
                let mut raw = vec![vec![0i128; 2 * k - 1]; len];
                for (i, a) in d1.iter().enumerate() {
                    if a.is_zero() || i >= len {
                        continue;
                    }
                    for (j, b) in d2.iter().enumerate() {
                        if i + j >= len {
                            break;
                        }
                        if b.is_zero() {
                            continue;
                        }
                        mul_acc(&mut raw[i + j], a, b);
                    }
                }
                canonicalize_raw(ctx, m1 + m2, raw, exact)
            }
        }
    }

    /// Multiply by pi^e (exact, free).
    pub fn shift(&self, e: i64) -> PadicElem {
        match self {
            PadicElem::Zero(_) => self.clone(),
            PadicElem::BigO { ctx, m } => PadicElem::BigO {
                ctx: ctx.clone(),
                m: m + e,
            },
            PadicElem::Approx {
                ctx,
                m,
                digits,
                exact,
            } => PadicElem::Approx {
                ctx: ctx.clone(),
                m: m + e,
                digits: digits.clone(),
                exact: *exact,
            },
        }
    }

    pub fn inv(&self) -> Result<PadicElem> {
        PadicElem::one(self.ctx()).div(self)
    }

    pub fn div(&self, other: &PadicElem) -> Result<PadicElem> {
        let ctx = self.ctx().clone();
        match (self, other) {
            (_, PadicElem::Zero(_)) => Err(Error::DivisionByZero),
            (_, PadicElem::BigO { .. }) => Err(Error::PrecisionExhausted(
                "dividing by an element indistinguishable from zero".into(),
            )),
            (PadicElem::Zero(_), _) => Ok(PadicElem::Zero(ctx)),
            (PadicElem::BigO { m, .. }, PadicElem::Approx { m: mb, .. }) => {
                Ok(PadicElem::BigO { ctx, m: m - mb })
            }
            (
                PadicElem::Approx {
                    m: ma,
                    digits: da,
                    exact: xa,
                    ..
                },
                PadicElem::Approx {
                    m: mb,
                    digits: db,
                    exact: xb,
                    ..
                },
            ) => {
                // digit-by-digit long division of the unit parts
                let both_exact = *xa && *xb;
                let l = match (*xa, *xb) {
                    (true, true) => ctx.precision(),
                    (true, false) => db.len(),
                    (false, true) => da.len(),
                    (false, false) => da.len().min(db.len()),
                };
                let d0_inv = db[0].inv()?;
                let k = ctx.unram_degree();
                let mut rem = vec![vec![0i128; k]; l.max(da.len())];
                for (i, d) in da.iter().enumerate() {
                    if i < rem.len() {
                        for (j, &c) in d.coeffs().iter().enumerate() {
                            rem[i][j] += c as i128;
                        }
                    }
                }
                let mut quot: Vec<FFElem> = Vec::with_capacity(l);
                for pos in 0..l {
                    normalize_window(&ctx, &mut rem);
                    let lead = ff_from_poly(&ctx, &rem[pos]);
                    let q = lead.mul(&d0_inv);
                    quot.push(q.clone());
                    if q.is_zero() {
                        continue;
                    }
                    // rem -= q * den * pi^pos, as integer digit products so
                    // the carries survive
                    for (j, d) in db.iter().enumerate() {
                        if pos + j >= rem.len() {
                            break;
                        }
                        mul_sub_acc(&mut rem[pos + j], &q, d);
                    }
                }
                // exact division: the remainder vanished identically and
                // nothing pends beyond the window
                let dropped = normalize_window(&ctx, &mut rem);
                let exact_out = both_exact
                    && !dropped
                    && rem.iter().all(|v| v.iter().all(|&c| c == 0))
                    && db.len() + quot.iter().rposition(|q| !q.is_zero()).unwrap_or(0) < l;
                Ok(canonicalize_digits(&ctx, ma - mb, quot, exact_out))
            }
        }
    }

    pub fn pow(&self, e: i64) -> Result<PadicElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = PadicElem::one(self.ctx());
        let mut b = base;
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Forget everything at or beyond absolute pi-position `end`.
    pub fn truncate_to(&self, end: i64) -> PadicElem {
        match self {
            PadicElem::Zero(ctx) => PadicElem::BigO {
                ctx: ctx.clone(),
                m: end,
            },
            PadicElem::BigO { ctx, m } => PadicElem::BigO {
                ctx: ctx.clone(),
                m: (*m).min(end),
            },
            PadicElem::Approx { ctx, m, digits, .. } => {
                if end <= *m {
                    return PadicElem::BigO {
                        ctx: ctx.clone(),
                        m: end,
                    };
                }
                let keep = ((end - m) as usize).min(digits.len());
                canonicalize_digits(ctx, *m, digits[..keep].to_vec(), false)
            }
        }
    }

    /// Known window of absolute pi positions [start, end).
    fn window(&self) -> (i64, i64) {
        match self {
            PadicElem::Zero(_) => (i64::MAX / 4, i64::MAX / 4),
            PadicElem::Approx {
                m, digits, exact, ..
            } => {
                if *exact {
                    (*m, i64::MAX / 4)
                } else {
                    (*m, m + digits.len() as i64)
                }
            }
            PadicElem::BigO { m, .. } => (*m, *m),
        }
    }

    /// Last position holding a digit (exact elements only).
    fn span_end(&self) -> i64 {
        match self {
            PadicElem::Approx { m, digits, .. } => m + digits.len() as i64,
            _ => 0,
        }
    }

    fn pour_into(&self, raw: &mut [Vec<i128>], start: i64, sign: i128) {
        if let PadicElem::Approx { m, digits, .. } = self {
            for (i, d) in digits.iter().enumerate() {
                let pos = m + i as i64 - start;
                if pos < 0 || pos as usize >= raw.len() {
                    continue;
                }
                for (j, &c) in d.coeffs().iter().enumerate() {
                    raw[pos as usize][j] += sign * c as i128;
                }
            }
        }
    }

    /// Exact digits of the unit part (for Hensel-style callers needing raw
    /// access).
    pub fn unit_digits(&self) -> Option<(&i64, &[FFElem])> {
        match self {
            PadicElem::Approx { m, digits, .. } => Some((m, digits)),
            _ => None,
        }
    }
}

fn ctx_name(ctx: &Ctx) -> String {
    format!(
        "Q_{}(k={},w={})",
        ctx.prime(),
        ctx.unram_degree(),
        ctx.ram_index()
    )
}

fn bigint_mod(x: &BigInt, m: &BigUint) -> BigUint {
    let m_int = BigInt::from(m.clone());
    let r = ((x % &m_int) + &m_int) % &m_int;
    r.to_biguint().unwrap()
}

fn modinv(a: &BigUint, m: &BigUint) -> BigUint {
    // extended euclid over BigInt
    let (mut old_r, mut r) = (BigInt::from(a.clone()), BigInt::from(m.clone()));
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp);
    }
    assert!(old_r.is_one(), "modinv of non-unit");
    let m_int = BigInt::from(m.clone());
    (((old_s % &m_int) + &m_int) % &m_int).to_biguint().unwrap()
}

fn mul_acc(acc: &mut Vec<i128>, a: &FFElem, b: &FFElem) {
    let need = a.coeffs().len() + b.coeffs().len() - 1;
    if acc.len() < need {
        acc.resize(need, 0);
    }
    for (i, &x) in a.coeffs().iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs().iter().enumerate() {
            acc[i + j] += x as i128 * y as i128;
        }
    }
}

fn mul_sub_acc(acc: &mut Vec<i128>, a: &FFElem, b: &FFElem) {
    let need = a.coeffs().len() + b.coeffs().len() - 1;
    if acc.len() < need {
        acc.resize(need, 0);
    }
    for (i, &x) in a.coeffs().iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs().iter().enumerate() {
            acc[i + j] -= x as i128 * y as i128;
        }
    }
}

fn ff_from_poly(ctx: &Ctx, poly: &[i128]) -> FFElem {
    let p = ctx.prime() as i128;
    ctx.ff(
        poly[..ctx.unram_degree().min(poly.len())]
            .iter()
            .map(|&c| c.rem_euclid(p) as u64)
            .collect(),
    )
}

/// Fold a theta polynomial of degree >= k down using the residue modulus
/// (integer coefficients).
fn fold_theta(ctx: &Ctx, v: &mut Vec<i128>) {
    let k = ctx.unram_degree();
    while v.len() > k {
        let top = v.pop().unwrap();
        if top == 0 {
            continue;
        }
        let base = v.len() - k;
        for (j, &mj) in ctx.residue_modulus().iter().enumerate() {
            if mj != 0 {
                v[base + j] -= top * mj as i128;
            }
        }
    }
    v.resize(k, 0);
}

/// Reduce every position of a raw window to canonical digits, pushing
/// carries to position + w. Returns true when a nonzero carry fell off the
/// end of the window.
fn normalize_window(ctx: &Ctx, raw: &mut [Vec<i128>]) -> bool {
    let p = ctx.prime() as i128;
    let w = ctx.ram_index() as usize;
    let len = raw.len();
    let mut dropped = false;
    for i in 0..len {
        let mut v = std::mem::take(&mut raw[i]);
        fold_theta(ctx, &mut v);
        let mut carry = vec![0i128; ctx.unram_degree()];
        let mut has_carry = false;
        for (j, c) in v.iter_mut().enumerate() {
            let r = c.rem_euclid(p);
            let q = (*c - r) / p;
            *c = r;
            if q != 0 {
                carry[j] = q;
                has_carry = true;
            }
        }
        raw[i] = v;
        if has_carry {
            if i + w < len {
                let tgt = &mut raw[i + w];
                if tgt.len() < carry.len() {
                    tgt.resize(carry.len(), 0);
                }
                for (j, &q) in carry.iter().enumerate() {
                    tgt[j] += q;
                }
            } else {
                dropped = true;
            }
        }
    }
    dropped
}

fn canonicalize_raw(ctx: &Ctx, start: i64, mut raw: Vec<Vec<i128>>, exact_in: bool) -> PadicElem {
    let dropped = normalize_window(ctx, &mut raw);
    let digits: Vec<FFElem> = raw.iter().map(|v| ff_from_poly(ctx, v)).collect();
    if exact_in && !dropped {
        match digits.iter().position(|d| !d.is_zero()) {
            None => PadicElem::Zero(ctx.clone()),
            Some(first) => {
                let last = digits.iter().rposition(|d| !d.is_zero()).unwrap();
                // exact iff the nonzero digits fit in the budget
                if last - first < ctx.precision() {
                    PadicElem::Approx {
                        ctx: ctx.clone(),
                        m: start + first as i64,
                        digits: digits[first..=last].to_vec(),
                        exact: true,
                    }
                } else {
                    let mut ds = digits[first..].to_vec();
                    ds.truncate(ctx.precision());
                    PadicElem::Approx {
                        ctx: ctx.clone(),
                        m: start + first as i64,
                        digits: ds,
                        exact: false,
                    }
                }
            }
        }
    } else {
        canonicalize_digits(ctx, start, digits, false)
    }
}

fn canonicalize_digits(ctx: &Ctx, start: i64, digits: Vec<FFElem>, exact: bool) -> PadicElem {
    let end = start + digits.len() as i64;
    match digits.iter().position(|d| !d.is_zero()) {
        None => {
            if exact {
                PadicElem::Zero(ctx.clone())
            } else {
                PadicElem::BigO {
                    ctx: ctx.clone(),
                    m: end,
                }
            }
        }
        Some(first) => {
            let mut ds = digits[first..].to_vec();
            let exact = if exact {
                // trim trailing zeros of exact elements
                let last = ds.iter().rposition(|d| !d.is_zero()).unwrap();
                ds.truncate(last + 1);
                ds.len() <= ctx.precision()
            } else {
                false
            };
            ds.truncate(ctx.precision());
            PadicElem::Approx {
                ctx: ctx.clone(),
                m: start + first as i64,
                digits: ds,
                exact,
            }
        }
    }
}

/// Embedding of one tower into a refinement: same prime, k | k', w | w'.
pub struct TowerEmbedding {
    from: Ctx,
    to: Ctx,
    /// Image of the residue generator's canonical lift; `None` when k = 1 or
    /// the digit transport is positional (same residue field).
    theta_image: Option<PadicElem>,
    ratio: i64,
    residue: crate::ffpoly::ResidueEmbedding,
}

impl TowerEmbedding {
    pub fn new(from: &Ctx, to: &Ctx) -> Result<TowerEmbedding> {
        if from.prime() != to.prime()
            || !to.unram_degree().is_multiple_of(from.unram_degree())
            || !to.ram_index().is_multiple_of(from.ram_index())
        {
            return Err(Error::MixedContexts);
        }
        let ratio = (to.ram_index() / from.ram_index()) as i64;
        let residue = crate::ffpoly::ResidueEmbedding::new(from, to)?;
        let theta_image = if from.unram_degree() == 1
            || from.unram_degree() == to.unram_degree()
        {
            // positional transport: same digit field (canonical moduli agree)
            None
        } else {
            // Hensel root of the integer lift of the small modulus
            let mut coeffs: Vec<i64> = from
                .residue_modulus()
                .iter()
                .map(|&c| c as i64)
                .collect();
            coeffs.push(1);
            let start = PadicElem::lift(&residue.map(&from.ff_generator()));
            let root = hensel_int_poly_root(to, &coeffs, start)?;
            Some(root)
        };
        Ok(TowerEmbedding {
            from: from.clone(),
            to: to.clone(),
            theta_image,
            ratio,
            residue,
        })
    }

    pub fn from_ctx(&self) -> &Ctx {
        &self.from
    }

    pub fn to_ctx(&self) -> &Ctx {
        &self.to
    }

    pub fn map(&self, x: &PadicElem) -> PadicElem {
        match x {
            PadicElem::Zero(_) => PadicElem::Zero(self.to.clone()),
            PadicElem::BigO { m, .. } => PadicElem::BigO {
                ctx: self.to.clone(),
                m: m * self.ratio,
            },
            PadicElem::Approx {
                m, digits, exact, ..
            } => {
                match &self.theta_image {
                    None => {
                        // positional: digit at i lands at i * ratio
                        let len = (digits.len() - 1) * self.ratio as usize + 1;
                        let mut out = vec![self.to.ff_zero(); len];
                        for (i, d) in digits.iter().enumerate() {
                            out[i * self.ratio as usize] = self.residue.map(d);
                        }
                        canonicalize_digits(&self.to, m * self.ratio, out, *exact)
                    }
                    Some(theta) => {
                        let end = (m + digits.len() as i64) * self.ratio;
                        let mut acc = PadicElem::Zero(self.to.clone());
                        for (i, d) in digits.iter().enumerate() {
                            if d.is_zero() {
                                continue;
                            }
                            // evaluate the integer digit polynomial at theta
                            let mut term = PadicElem::Zero(self.to.clone());
                            let mut pw = PadicElem::one(&self.to);
                            for &c in d.coeffs() {
                                if c != 0 {
                                    let cc =
                                        PadicElem::from_int(&self.to, c as i64).mul(&pw);
                                    term = term.add(&cc);
                                }
                                pw = pw.mul(theta);
                            }
                            acc = acc.add(&term.shift((m + i as i64) * self.ratio));
                        }
                        if *exact && acc.is_exact() {
                            acc
                        } else {
                            acc.truncate_to(end)
                        }
                    }
                }
            }
        }
    }
}

/// Newton iteration for a root of an integer polynomial, starting from an
/// approximation where the derivative is a unit.
fn hensel_int_poly_root(ctx: &Ctx, coeffs: &[i64], start: PadicElem) -> Result<PadicElem> {
    let poly: Vec<PadicElem> = coeffs
        .iter()
        .map(|&c| PadicElem::from_int(ctx, c))
        .collect();
    let deriv: Vec<PadicElem> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&PadicElem::from_int(ctx, i as i64)))
        .collect();
    let eval = |cs: &[PadicElem], x: &PadicElem| -> PadicElem {
        let mut acc = PadicElem::Zero(ctx.clone());
        for c in cs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let mut x = start;
    for _ in 0..(ctx.precision().ilog2() as usize + 3) {
        let fx = eval(&poly, &x);
        if fx.is_exact_zero() || fx.is_bigo() {
            return Ok(x);
        }
        let dfx = eval(&deriv, &x);
        x = x.sub(&fx.div(&dfx)?);
    }
    let fx = eval(&poly, &x);
    if fx.is_exact_zero() || fx.is_bigo() {
        Ok(x)
    } else {
        Err(Error::PrecisionExhausted(
            "hensel iteration for generator image stalled".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use crate::rational::{q_int, q_ratio};

    fn q3() -> Ctx {
        FieldContext::new(3, 1, 1, 32).unwrap()
    }

    fn near_zero(x: &PadicElem) -> bool {
        x.is_exact_zero() || x.is_bigo()
    }

    #[test]
    fn valuation_examples() {
        let ctx = q3();
        let nine = PadicElem::from_int(&ctx, 9);
        assert_eq!(nine.valuation().unwrap(), ValOrInf::Finite(Val::from_integer(2)));
        let third = PadicElem::from_rational(&ctx, &q_ratio(1, 3));
        assert_eq!(
            third.valuation().unwrap(),
            ValOrInf::Finite(Val::from_integer(-1))
        );
        // ramified: v(pi) = 1/2
        let ctx2 = FieldContext::new(3, 1, 2, 32).unwrap();
        let pi = PadicElem::pi_pow(&ctx2, 1);
        assert_eq!(pi.valuation().unwrap(), ValOrInf::Finite(Val::new(1, 2)));
        assert_eq!(
            PadicElem::zero(&ctx).valuation().unwrap(),
            ValOrInf::Infinite
        );
    }

    #[test]
    fn residue_examples() {
        let ctx = q3();
        assert_eq!(
            PadicElem::from_int(&ctx, 4).residue().unwrap(),
            ctx.ff_one()
        );
        assert!(PadicElem::from_int(&ctx, 3).residue().unwrap().is_zero());
        // 1/(1+3) = 1 - 3 + 9 - ... has residue 1
        let x = PadicElem::from_rational(&ctx, &q_ratio(1, 4));
        assert_eq!(x.residue().unwrap(), ctx.ff_one());
        // negative valuation rejected
        assert!(matches!(
            PadicElem::from_rational(&ctx, &q_ratio(1, 3)).residue(),
            Err(Error::NegativeValuation)
        ));
    }

    #[test]
    fn exactness_tracking() {
        let ctx = q3();
        // small nonnegative integers are exact; arithmetic keeps exactness
        let a = PadicElem::from_int(&ctx, 7);
        let b = PadicElem::from_int(&ctx, 12);
        assert!(a.is_exact() && b.is_exact());
        assert!(a.add(&b).is_exact());
        assert!(a.mul(&b).is_exact());
        // subtraction certifies true equality
        assert!(a.sub(&a).is_exact_zero());
        let c = a.mul(&b).sub(&PadicElem::from_int(&ctx, 84));
        assert!(c.is_exact_zero());
        // negative values have non-terminating expansions
        assert!(!PadicElem::from_int(&ctx, -5).is_exact());
        assert!(a.sub(&b).valuation().is_ok());
        // 1/4 is not exact, but 9/3 is
        assert!(!PadicElem::from_rational(&ctx, &q_ratio(1, 4)).is_exact());
        assert!(PadicElem::from_rational(&ctx, &q_ratio(9, 3)).is_exact());
        // exact division detection: 84 / 7 = 12 exactly
        let q = a.mul(&b).div(&a).unwrap();
        assert!(q.sub(&b).is_exact_zero());
    }

    #[test]
    fn ring_identities() {
        let ctx = q3();
        let vals = [
            q_int(7),
            q_ratio(5, 4),
            q_int(-12),
            q_ratio(-1, 9),
            q_int(81),
            q_ratio(22, 7),
        ];
        for a in &vals {
            for b in &vals {
                let x = PadicElem::from_rational(&ctx, a);
                let y = PadicElem::from_rational(&ctx, b);
                let sum = PadicElem::from_rational(&ctx, &(a + b));
                let prod = PadicElem::from_rational(&ctx, &(a * b));
                assert!(near_zero(&x.add(&y).sub(&sum)), "sum mismatch {a} {b}");
                assert!(near_zero(&x.mul(&y).sub(&prod)), "prod mismatch {a} {b}");
            }
        }
    }

    #[test]
    fn ultrametric_and_multiplicativity() {
        let ctx = q3();
        let mut state = 0x12345u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let a = q_ratio((next() % 2000) as i64 - 1000, (next() % 50 + 1) as i64);
            let b = q_ratio((next() % 2000) as i64 - 1000, (next() % 50 + 1) as i64);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let x = PadicElem::from_rational(&ctx, &a);
            let y = PadicElem::from_rational(&ctx, &b);
            let vx = x.valuation().unwrap();
            let vy = y.valuation().unwrap();
            // multiplicativity
            let vxy = x.mul(&y).valuation().unwrap();
            if let (ValOrInf::Finite(a), ValOrInf::Finite(b), ValOrInf::Finite(c)) = (vx, vy, vxy)
            {
                assert_eq!(a + b, c);
            }
            // ultrametric with equality when valuations differ
            let s = x.add(&y);
            match s.val_lower_bound() {
                ValOrInf::Infinite => {}
                ValOrInf::Finite(vs) => {
                    let vmin = vx.min(vy).finite().unwrap();
                    assert!(vs >= vmin);
                    if vx != vy {
                        assert_eq!(s.valuation().unwrap(), ValOrInf::Finite(vmin));
                    }
                }
            }
        }
    }

    #[test]
    fn inversion() {
        let ctx = q3();
        for n in [2i64, 7, -5, 10, 4] {
            let x = PadicElem::from_int(&ctx, n);
            let unit = x.shift(-x.unit_digits().unwrap().0);
            let inv = unit.inv().unwrap();
            assert!(near_zero(&unit.mul(&inv).sub(&PadicElem::one(&ctx))));
        }
        let x = PadicElem::from_rational(&ctx, &q_ratio(1, 4));
        let y = PadicElem::from_int(&ctx, 4);
        assert!(near_zero(&x.mul(&y).sub(&PadicElem::one(&ctx))));
    }

    #[test]
    fn cancellation_behaviour() {
        let ctx = q3();
        // inexact equal values degrade to a BigO bound
        let a = PadicElem::from_rational(&ctx, &q_ratio(1, 4));
        let b = PadicElem::from_rational(&ctx, &q_ratio(1, 4));
        let d = a.sub(&b);
        assert!(d.is_bigo());
        assert!(d.valuation().is_err());
        // partial cancellation keeps exact valuation
        let x = PadicElem::from_int(&ctx, 4).sub(&PadicElem::one(&ctx));
        assert_eq!(x.valuation().unwrap(), ValOrInf::Finite(Val::from_integer(1)));
    }

    #[test]
    fn lift_round_trip() {
        let ctx9 = FieldContext::new(3, 2, 1, 16).unwrap();
        for idx in 0..9 {
            let c = ctx9.ff_from_index(idx);
            let lifted = PadicElem::lift(&c);
            if c.is_zero() {
                assert!(lifted.is_exact_zero());
            } else {
                assert!(lifted.is_exact());
                assert_eq!(lifted.residue().unwrap(), c);
            }
        }
    }

    #[test]
    fn unramified_tower_arithmetic() {
        // F_9 tower: theta^2 = -1 must hold for the lifted generator
        let ctx = FieldContext::new(3, 2, 1, 16).unwrap();
        let theta = PadicElem::lift(&ctx.ff_generator());
        let sq = theta.mul(&theta).add(&PadicElem::one(&ctx));
        assert!(near_zero(&sq));
        // multiplying theta around the unit circle: theta^4 = 1
        let fourth = theta.pow(4).unwrap().sub(&PadicElem::one(&ctx));
        assert!(near_zero(&fourth));
    }

    #[test]
    fn eisenstein_tower_arithmetic() {
        // pi^2 = 3 exactly in the w=2 context
        let ctx = FieldContext::new(3, 1, 2, 16).unwrap();
        let pi = PadicElem::pi_pow(&ctx, 1);
        let three = PadicElem::from_int(&ctx, 3);
        assert!(pi.mul(&pi).sub(&three).is_exact_zero());
    }

    #[test]
    fn embedding_positional() {
        let from = FieldContext::new(3, 1, 1, 16).unwrap();
        let to = FieldContext::new(3, 1, 2, 16).unwrap();
        let emb = TowerEmbedding::new(&from, &to).unwrap();
        let x = PadicElem::from_rational(&from, &q_ratio(7, 9));
        let y = emb.map(&x);
        assert_eq!(
            y.valuation().unwrap(),
            ValOrInf::Finite(Val::from_integer(-2))
        );
        let direct = PadicElem::from_rational(&to, &q_ratio(7, 9));
        assert!(near_zero(&y.sub(&direct)));
        // exact values stay exact under positional transport
        assert!(emb.map(&PadicElem::from_int(&from, 7)).is_exact());
    }

    #[test]
    fn embedding_unramified_extension() {
        let from = FieldContext::new(3, 2, 1, 16).unwrap();
        let to = from.extend_unramified(2).unwrap();
        let emb = TowerEmbedding::new(&from, &to).unwrap();
        let a = PadicElem::lift(&from.ff_generator()).add(&PadicElem::from_int(&from, 4));
        let b = PadicElem::from_rational(&from, &q_ratio(2, 5));
        let lhs = emb.map(&a.mul(&b));
        let rhs = emb.map(&a).mul(&emb.map(&b));
        assert!(near_zero(&lhs.sub(&rhs)));
        // residues transported compatibly
        let remb = crate::ffpoly::ResidueEmbedding::new(&from, &to).unwrap();
        assert_eq!(
            emb.map(&a).residue().unwrap(),
            remb.map(&a.residue().unwrap())
        );
    }
}
