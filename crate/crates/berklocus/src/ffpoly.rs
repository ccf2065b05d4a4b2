//! Polynomials over residue fields: gcd, square-free decomposition,
//! factorization into irreducibles, and roots in the algebraic closure.
//!
//! Factorization is distinct-degree splitting followed by equal-degree
//! splitting. The equal-degree stage draws its random elements from a stream
//! seeded by the polynomial's own coefficients, so repeated runs produce the
//! same factor order.

use crate::error::{Error, Result};
use crate::field::{Ctx, FFElem};
use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct FFPoly {
    ctx: Ctx,
    c: Vec<FFElem>, // low to high, trimmed; empty = zero
}

impl std::fmt::Debug for FFPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for FFPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format!("{c}");
            let cs = if cs.contains('+') || cs.contains('t') && i > 0 {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(match i {
                0 => cs,
                1 if c.is_one() => "z".into(),
                1 => format!("{cs}*z"),
                _ if c.is_one() => format!("z^{i}"),
                _ => format!("{cs}*z^{i}"),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl FFPoly {
    pub fn new(ctx: &Ctx, mut coeffs: Vec<FFElem>) -> FFPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FFPoly {
            ctx: ctx.clone(),
            c: coeffs,
        }
    }

    pub fn zero(ctx: &Ctx) -> FFPoly {
        FFPoly::new(ctx, vec![])
    }

    pub fn one(ctx: &Ctx) -> FFPoly {
        let one = ctx.ff_one();
        FFPoly::new(ctx, vec![one])
    }

    pub fn x(ctx: &Ctx) -> FFPoly {
        FFPoly::new(ctx, vec![ctx.ff_zero(), ctx.ff_one()])
    }

    pub fn constant(c: FFElem) -> FFPoly {
        let ctx = c.ctx().clone();
        FFPoly::new(&ctx, vec![c])
    }

    pub fn from_ints(ctx: &Ctx, coeffs: &[i64]) -> FFPoly {
        let p = ctx.prime() as i64;
        FFPoly::new(
            ctx,
            coeffs
                .iter()
                .map(|&n| ctx.ff_from_u64(n.rem_euclid(p) as u64))
                .collect(),
        )
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> FFElem {
        self.c.get(i).cloned().unwrap_or_else(|| self.ctx.ff_zero())
    }

    pub fn leading(&self) -> FFElem {
        self.c.last().cloned().unwrap_or_else(|| self.ctx.ff_zero())
    }

    pub fn add(&self, o: &FFPoly) -> FFPoly {
        let n = self.c.len().max(o.c.len());
        FFPoly::new(
            &self.ctx,
            (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect(),
        )
    }

    pub fn sub(&self, o: &FFPoly) -> FFPoly {
        let n = self.c.len().max(o.c.len());
        FFPoly::new(
            &self.ctx,
            (0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect(),
        )
    }

    pub fn neg(&self) -> FFPoly {
        FFPoly::new(&self.ctx, self.c.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, o: &FFPoly) -> FFPoly {
        if self.is_zero() || o.is_zero() {
            return FFPoly::zero(&self.ctx);
        }
        let mut out = vec![self.ctx.ff_zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        FFPoly::new(&self.ctx, out)
    }

    pub fn scale(&self, s: &FFElem) -> FFPoly {
        FFPoly::new(&self.ctx, self.c.iter().map(|c| c.mul(s)).collect())
    }

    pub fn mul_xpow(&self, k: usize) -> FFPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.ctx.ff_zero(); k];
        c.extend(self.c.iter().cloned());
        FFPoly::new(&self.ctx, c)
    }

    pub fn divrem(&self, div: &FFPoly) -> (FFPoly, FFPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.c.len() < div.c.len() {
            return (FFPoly::zero(&self.ctx), self.clone());
        }
        let lead_inv = div.leading().inv().expect("nonzero leading");
        let mut rem = self.c.clone();
        let dn = div.c.len();
        let qn = rem.len() - dn + 1;
        let mut quot = vec![self.ctx.ff_zero(); qn];
        for i in (0..qn).rev() {
            let c = rem[i + dn - 1].mul(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, d) in div.c.iter().enumerate() {
                rem[i + j] = rem[i + j].sub(&c.mul(d));
            }
            quot[i] = c;
        }
        (FFPoly::new(&self.ctx, quot), FFPoly::new(&self.ctx, rem))
    }

    pub fn rem(&self, div: &FFPoly) -> FFPoly {
        self.divrem(div).1
    }

    pub fn monic(&self) -> FFPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero leading");
        self.scale(&inv)
    }

    /// Monic gcd; gcd(f, 0) = monic(f).
    pub fn gcd(&self, o: &FFPoly) -> FFPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FFPoly {
        if self.c.len() <= 1 {
            return FFPoly::zero(&self.ctx);
        }
        let p = self.ctx.prime();
        FFPoly::new(
            &self.ctx,
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let n = (i as u64 + 1) % p;
                    c.mul(&self.ctx.ff_from_u64(n))
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: &FFElem) -> FFElem {
        let mut acc = self.ctx.ff_zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Coefficients of f(a + z).
    pub fn taylor_shift(&self, a: &FFElem) -> FFPoly {
        let mut out = self.c.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = out[j + 1].mul(a);
                out[j] = out[j].add(&t);
            }
        }
        FFPoly::new(&self.ctx, out)
    }

    /// Multiplicity of `a` as a root (0 if not a root).
    pub fn root_multiplicity(&self, a: &FFElem) -> usize {
        if self.is_zero() {
            panic!("root multiplicity of zero polynomial");
        }
        let shifted = self.taylor_shift(a);
        shifted
            .c
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero polynomial")
    }

    pub fn pow_mod(&self, e: &BigUint, m: &FFPoly) -> FFPoly {
        let mut acc = FFPoly::one(&self.ctx);
        let mut base = self.rem(m);
        let mut e = e.clone();
        while !e.is_zero() {
            if (&e & BigUint::one()) == BigUint::one() {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Largest divisor with the same distinct roots, each to multiplicity 1.
    /// Handles the char-p pitfall: if f' = 0 then f(z) = g(z^p) and we
    /// recurse on g.
    pub fn squarefree_part(&self) -> Result<FFPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Ok(FFPoly::one(&self.ctx));
        }
        let d = self.derivative();
        if d.is_zero() {
            return self.pth_root()?.squarefree_part();
        }
        let g = self.gcd(&d);
        let part = self.divrem(&g).0.monic();
        // g may still hide p-th power factors whose roots part missed only
        // when f is a mix; the roots of g divide f, so one more pass on g
        // keeps anything part lost.
        if g.degree() == 0 {
            return Ok(part);
        }
        let rest = g.squarefree_part()?;
        let merged = part.mul(&rest.divrem(&part.gcd(&rest)).0);
        Ok(merged.monic())
    }

    /// For f with f' = 0, write f(z) = g(z^p) and return the p-th root of f:
    /// the polynomial with coefficients c_i^(p^(k-1)) at degree i, satisfying
    /// root^p-multiset preservation over the perfect field F_{p^k}.
    fn pth_root(&self) -> Result<FFPoly> {
        let p = self.ctx.prime() as usize;
        let k = self.ctx.unram_degree() as u32;
        let mut out = vec![];
        for (i, c) in self.c.iter().enumerate() {
            if i % p == 0 {
                // p-th root of the coefficient: Frobenius applied k-1 times
                let mut r = c.clone();
                for _ in 0..k.saturating_sub(1) {
                    r = r.frobenius();
                }
                out.push(r);
            } else if !c.is_zero() {
                return Err(Error::FactorizationUnsupported(
                    "derivative zero but polynomial not in z^p".into(),
                ));
            }
        }
        Ok(FFPoly::new(&self.ctx, out))
    }

    /// Res(f,g) = lc(f)^{deg g} prod g(roots of f), by the Euclidean chain.
    pub fn resultant(&self, other: &FFPoly) -> Result<FFElem> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = self.ctx.ff_one();
        let mut sign = false;
        loop {
            if b.c.len() == 1 {
                acc = acc.mul(&b.leading().pow_u128(a.degree() as u128));
                break;
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return Ok(self.ctx.ff_zero());
            }
            let da = a.degree();
            let db = b.degree();
            let dr = r.degree();
            acc = acc.mul(&b.leading().pow_u128((da - dr) as u128));
            if (da & 1) == 1 && (db & 1) == 1 {
                sign = !sign;
            }
            a = b;
            b = r;
        }
        Ok(if sign { acc.neg() } else { acc })
    }

    /// All roots in this field (not the closure), with multiplicities.
    pub fn roots_in_field(&self) -> Vec<(FFElem, usize)> {
        // gcd with z^q - z isolates the part splitting over F_q, then the
        // factorization machinery finds the linear factors
        if self.is_zero() {
            panic!("roots of zero polynomial");
        }
        let mut out = vec![];
        for (factor, mult) in self.factor() {
            if factor.degree() == 1 {
                let root = factor.coeff(0).neg().div(&factor.coeff(1)).unwrap();
                out.push((root, mult));
            }
        }
        out.sort_by_key(|(r, _)| r.index());
        out
    }

    /// Factor into monic irreducibles with multiplicities.
    pub fn factor(&self) -> Vec<(FFPoly, usize)> {
        assert!(!self.is_zero(), "factor of zero polynomial");
        let p = self.ctx.prime() as usize;
        let mut out: Vec<(FFPoly, usize)> = vec![];
        let mut work = vec![(self.monic(), 1usize)];
        while let Some((mut g, mult)) = work.pop() {
            if g.degree() == 0 {
                continue;
            }
            let d = g.derivative();
            if d.is_zero() {
                // g = h(z^p): factor the p-th root with multiplicities * p
                let h = g.pth_root().expect("derivative-zero polynomial");
                work.push((h, mult * p));
                continue;
            }
            // squarefree part catches every factor whose multiplicity in g
            // is not divisible by p
            let sf = g.divrem(&g.gcd(&d)).0.monic();
            for (deg, prod) in sf.distinct_degree() {
                for factor in prod.equal_degree(deg) {
                    let mut e = 0;
                    loop {
                        let (q, r) = g.divrem(&factor);
                        if r.is_zero() {
                            e += 1;
                            g = q;
                        } else {
                            break;
                        }
                    }
                    push_factor(&mut out, factor, e * mult);
                }
            }
            // the leftover's factors all had p | multiplicity; its
            // derivative vanishes, so the worklist sends it to pth_root
            if g.degree() > 0 {
                work.push((g, mult));
            }
        }
        out.sort_by(|a, b| {
            (a.0.degree(), index_key(&a.0)).cmp(&(b.0.degree(), index_key(&b.0)))
        });
        out
    }

    /// Distinct-degree splitting of a squarefree monic polynomial: pairs
    /// (d, product of all irreducible factors of degree d).
    fn distinct_degree(&self) -> Vec<(usize, FFPoly)> {
        let q = BigUint::from(self.ctx.residue_order());
        let mut out = vec![];
        let mut h = self.monic();
        let x = FFPoly::x(&self.ctx);
        let mut xq = x.clone();
        let mut d = 0;
        while h.degree() > 0 {
            d += 1;
            if 2 * d > h.degree() {
                out.push((h.degree(), h.clone()));
                break;
            }
            xq = xq.pow_mod(&q, &h);
            let g = h.gcd(&xq.sub(&x));
            if g.degree() > 0 {
                out.push((d, g.clone()));
                h = h.divrem(&g).0;
                xq = xq.rem(&h);
            }
        }
        out
    }

    /// Equal-degree splitting of a squarefree product of degree-d
    /// irreducibles, with a deterministic element stream.
    fn equal_degree(&self, d: usize) -> Vec<FFPoly> {
        let f = self.monic();
        if f.degree() == d {
            return vec![f];
        }
        let mut rng = SplitStream::seeded_from(&f);
        let mut stack = vec![f];
        let mut done = vec![];
        while let Some(g) = stack.pop() {
            if g.degree() == d {
                done.push(g);
                continue;
            }
            match try_split(&g, d, &mut rng) {
                Some((a, b)) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => {
                    // stream exhausted its budget; should not happen for
                    // legitimate inputs, keep the unsplit block visible
                    done.push(g);
                }
            }
        }
        done
    }

    /// Smallest-extension splitting field data: returns the extension
    /// context and all roots there with multiplicities.
    pub fn roots_in_closure(&self) -> Result<(Ctx, Vec<(FFElem, usize)>)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let factors = self.factor();
        let mut ext: usize = 1;
        for (f, _) in &factors {
            ext = num_integer::lcm(ext, f.degree().max(1));
        }
        let target = self.ctx.extend_unramified(ext)?;
        let emb = ResidueEmbedding::new(&self.ctx, &target)?;
        let lifted = emb.map_poly(self);
        let mut roots = vec![];
        for (f, mult) in lifted.factor() {
            if f.degree() == 1 {
                let root = f.coeff(0).neg().div(&f.coeff(1)).unwrap();
                roots.push((root, mult));
            }
        }
        debug_assert_eq!(
            roots.iter().map(|(_, m)| m).sum::<usize>(),
            self.degree(),
            "closure roots must account for the full degree"
        );
        roots.sort_by_key(|(r, _)| r.index());
        Ok((target, roots))
    }
}

fn index_key(f: &FFPoly) -> Vec<u128> {
    f.coeffs().iter().map(|c| c.index()).collect()
}

fn push_factor(out: &mut Vec<(FFPoly, usize)>, factor: FFPoly, mult: usize) {
    for (f, m) in out.iter_mut() {
        if *f == factor {
            *m += mult;
            return;
        }
    }
    out.push((factor, mult));
}

fn try_split(f: &FFPoly, d: usize, rng: &mut SplitStream) -> Option<(FFPoly, FFPoly)> {
    let ctx = f.ctx().clone();
    let q = BigUint::from(ctx.residue_order());
    for _ in 0..200 {
        let a = rng.poly(&ctx, f.degree());
        if a.degree() == 0 {
            continue;
        }
        let g = f.gcd(&a);
        if g.degree() > 0 && g.degree() < f.degree() {
            return Some((g.clone(), f.divrem(&g).0.monic()));
        }
        let split = if ctx.prime() == 2 {
            // trace map over F_{2^m}: T(a) = a + a^2 + ... + a^(2^(md-1))
            let m = ctx.unram_degree() * d;
            let mut tr = a.rem(f);
            let mut cur = a.rem(f);
            for _ in 1..m {
                cur = cur.mul(&cur).rem(f);
                tr = tr.add(&cur);
            }
            tr
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            a.pow_mod(&e, f).sub(&FFPoly::one(&ctx))
        };
        let g = f.gcd(&split);
        if g.degree() > 0 && g.degree() < f.degree() {
            return Some((g.clone(), f.divrem(&g).0.monic()));
        }
    }
    None
}

/// Deterministic element stream for equal-degree splitting, seeded from the
/// polynomial's coefficients (FNV-1a over the digit values).
struct SplitStream {
    state: u64,
}

impl SplitStream {
    fn seeded_from(f: &FFPoly) -> SplitStream {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x100000001b3);
        };
        eat(f.ctx().prime());
        eat(f.ctx().unram_degree() as u64);
        for c in f.coeffs() {
            for &d in c.coeffs() {
                eat(d.wrapping_add(1));
            }
        }
        SplitStream { state: h | 1 }
    }

    fn next_u64(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    fn poly(&mut self, ctx: &Ctx, max_deg: usize) -> FFPoly {
        let deg = if max_deg <= 1 { 1 } else { max_deg - 1 };
        let mut coeffs = vec![];
        for _ in 0..=deg {
            let idx = self.next_u64() as u128 % ctx.residue_order();
            coeffs.push(ctx.ff_from_index(idx));
        }
        FFPoly::new(ctx, coeffs)
    }
}

/// Field embedding F_{p^k} -> F_{p^k'} for k | k', sending the generator to
/// the lexicographically least root of the small modulus in the big field.
pub struct ResidueEmbedding {
    from: Ctx,
    to: Ctx,
    gen_powers: Vec<FFElem>,
}

impl ResidueEmbedding {
    pub fn new(from: &Ctx, to: &Ctx) -> Result<ResidueEmbedding> {
        if from.prime() != to.prime()
            || !to.unram_degree().is_multiple_of(from.unram_degree())
        {
            return Err(Error::MixedContexts);
        }
        let k = from.unram_degree();
        let image = if k == 1 {
            to.ff_one()
        } else if from.unram_degree() == to.unram_degree() {
            // same canonical modulus: generator maps to generator
            to.ff_generator()
        } else {
            // root of the small modulus in the big field
            let mut coeffs: Vec<FFElem> = from
                .residue_modulus()
                .iter()
                .map(|&c| to.ff_from_u64(c))
                .collect();
            coeffs.push(to.ff_one());
            let small_mod = FFPoly::new(to, coeffs);
            let roots = small_mod.roots_in_field();
            let (root, _) = roots
                .first()
                .ok_or_else(|| Error::Config("modulus has no root in extension".into()))?
                .clone();
            root
        };
        let mut gen_powers = vec![to.ff_one()];
        for _ in 1..k {
            gen_powers.push(gen_powers.last().unwrap().mul(&image));
        }
        Ok(ResidueEmbedding {
            from: from.clone(),
            to: to.clone(),
            gen_powers,
        })
    }

    pub fn from_ctx(&self) -> &Ctx {
        &self.from
    }

    pub fn to_ctx(&self) -> &Ctx {
        &self.to
    }

    pub fn map(&self, x: &FFElem) -> FFElem {
        let mut acc = self.to.ff_zero();
        for (i, &c) in x.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            acc = acc.add(&self.gen_powers[i].mul(&self.to.ff_from_u64(c)));
        }
        acc
    }

    pub fn map_poly(&self, f: &FFPoly) -> FFPoly {
        FFPoly::new(&self.to, f.coeffs().iter().map(|c| self.map(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;

    fn f3() -> Ctx {
        FieldContext::new(3, 1, 1, 8).unwrap()
    }

    #[test]
    fn gcd_examples() {
        let ctx = f3();
        // gcd(z^2, z) = z
        let a = FFPoly::from_ints(&ctx, &[0, 0, 1]);
        let b = FFPoly::x(&ctx);
        assert_eq!(a.gcd(&b), FFPoly::x(&ctx));
        // gcd(z^2+1, z+1) over F_3 = 1
        let a = FFPoly::from_ints(&ctx, &[1, 0, 1]);
        let b = FFPoly::from_ints(&ctx, &[1, 1]);
        assert_eq!(a.gcd(&b), FFPoly::one(&ctx));
        // gcd(f, 0) = monic(f)
        let f = FFPoly::from_ints(&ctx, &[2, 0, 2]);
        assert_eq!(f.gcd(&FFPoly::zero(&ctx)), FFPoly::from_ints(&ctx, &[1, 0, 1]));
    }

    #[test]
    fn squarefree_examples() {
        let ctx = f3();
        // z^2 -> z
        let f = FFPoly::from_ints(&ctx, &[0, 0, 1]);
        assert_eq!(f.squarefree_part().unwrap(), FFPoly::x(&ctx));
        // z^3 - z over F_3 stays (already squarefree)
        let f = FFPoly::from_ints(&ctx, &[0, -1, 0, 1]);
        assert_eq!(f.squarefree_part().unwrap(), f.monic());
        // z^3 over F_3 (inseparable): part is z
        let f = FFPoly::from_ints(&ctx, &[0, 0, 0, 1]);
        assert_eq!(f.squarefree_part().unwrap(), FFPoly::x(&ctx));
        // (z-1)^2 (z+1) -> (z-1)(z+1)
        let lin1 = FFPoly::from_ints(&ctx, &[-1, 1]);
        let lin2 = FFPoly::from_ints(&ctx, &[1, 1]);
        let f = lin1.mul(&lin1).mul(&lin2);
        assert_eq!(f.squarefree_part().unwrap(), lin1.mul(&lin2).monic());
    }

    #[test]
    fn roots_in_closure_wronskian_of_connected_quadratic() {
        // z^2 + 2z + 2 over F_3 (the reduction of z^2 + 2z - 1): two roots
        // in F_9, none in F_3
        let ctx = f3();
        let f = FFPoly::from_ints(&ctx, &[2, 2, 1]);
        assert!(f.roots_in_field().is_empty());
        let (ext, roots) = f.roots_in_closure().unwrap();
        assert_eq!(ext.residue_order(), 9);
        assert_eq!(roots.len(), 2);
        for (r, m) in &roots {
            assert_eq!(*m, 1);
            // verify by evaluation in the extension
            let emb = ResidueEmbedding::new(&ctx, &ext).unwrap();
            let lifted = emb.map_poly(&f);
            assert!(lifted.eval(r).is_zero());
        }
    }

    #[test]
    fn roots_in_closure_interior_identity() {
        // z^3 - z^2 over F_3: root 0 (mult 2), root 1 (mult 1)
        let ctx = f3();
        let f = FFPoly::from_ints(&ctx, &[0, 0, -1, 1]);
        let (ext, roots) = f.roots_in_closure().unwrap();
        assert_eq!(ext.residue_order(), 3);
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], (ext.ff_zero(), 2));
        assert_eq!(roots[1], (ext.ff_one(), 1));
    }

    #[test]
    fn roots_in_closure_artin_schreier() {
        // z^p - z over F_p: every element of F_p, multiplicity 1
        for p in [2u64, 3, 5] {
            let ctx = FieldContext::new(p, 1, 1, 8).unwrap();
            let mut coeffs = vec![0i64; p as usize + 1];
            coeffs[1] = -1;
            coeffs[p as usize] = 1;
            let f = FFPoly::from_ints(&ctx, &coeffs);
            let (ext, roots) = f.roots_in_closure().unwrap();
            assert_eq!(ext.residue_order(), p as u128);
            assert_eq!(roots.len(), p as usize);
            assert!(roots.iter().all(|(_, m)| *m == 1));
        }
    }

    #[test]
    fn factor_deterministic() {
        let ctx = FieldContext::new(5, 1, 1, 8).unwrap();
        // (z^2+2)(z^2+3)(z+1)^2 over F_5
        let f = FFPoly::from_ints(&ctx, &[2, 0, 1])
            .mul(&FFPoly::from_ints(&ctx, &[3, 0, 1]))
            .mul(&FFPoly::from_ints(&ctx, &[1, 1]))
            .mul(&FFPoly::from_ints(&ctx, &[1, 1]));
        let f1 = f.factor();
        let f2 = f.factor();
        assert_eq!(f1, f2);
        let total: usize = f1.iter().map(|(g, m)| g.degree() * m).sum();
        assert_eq!(total, f.degree());
        for (g, _) in &f1 {
            // each factor divides f
            assert!(f.rem(g).is_zero());
        }
    }

    #[test]
    fn resultant_matches_gcd() {
        let ctx = f3();
        let f = FFPoly::from_ints(&ctx, &[-1, 0, 1]);
        let g = FFPoly::from_ints(&ctx, &[-1, 1]);
        assert!(f.resultant(&g).unwrap().is_zero());
        // z^2 + 1 is irreducible over F_3: no common factor with z^2 - 1
        let h = FFPoly::from_ints(&ctx, &[1, 0, 1]);
        assert!(!f.resultant(&h).unwrap().is_zero());
    }

    #[test]
    fn taylor_shift_round_trip() {
        let ctx = f3();
        let f = FFPoly::from_ints(&ctx, &[1, 2, 0, 1, 1]);
        let a = ctx.ff_from_u64(2);
        let back = f.taylor_shift(&a).taylor_shift(&a.neg());
        assert_eq!(f, back);
    }

    #[test]
    fn embedding_is_homomorphism() {
        let small = FieldContext::new(3, 2, 1, 8).unwrap();
        let big = small.extend_unramified(2).unwrap();
        let emb = ResidueEmbedding::new(&small, &big).unwrap();
        for i in 0..9u128 {
            for j in 0..9u128 {
                let a = small.ff_from_index(i);
                let b = small.ff_from_index(j);
                assert_eq!(emb.map(&a.mul(&b)), emb.map(&a).mul(&emb.map(&b)));
                assert_eq!(emb.map(&a.add(&b)), emb.map(&a).add(&emb.map(&b)));
            }
        }
    }
}
