//! Rational maps over the tower and their reductions.
//!
//! A map built from exact rational input keeps a rational shadow of its
//! numerator and denominator. The shadow is what makes the ill-conditioned
//! steps exact: coprimality at construction, square-free decomposition of
//! the fixed point polynomial, and the Wronskian all live over Q. The tower
//! side carries everything else (conjugation by non-rational Moebius maps,
//! reduction, evaluation).

use crate::error::{Error, Result};
use crate::field::{Ctx, ResPoint};
use crate::ffpoly::{FFPoly, ResidueEmbedding};
use crate::padic::PadicElem;
use crate::ppoly::PPoly;
use crate::rational::{rat_val_p, Q, QPoly, RatFunc};
use crate::roots::{isolate_roots, RootIsolation};
use crate::val::{Val, ValOrInf};
use num_traits::Zero;

/// A point of the classical projective line over the tower.
#[derive(Clone, Debug)]
pub enum ProjValue {
    Finite(PadicElem),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct RationalMap {
    ctx: Ctx,
    num: PPoly,
    den: PPoly,
    shadow: Option<(QPoly, QPoly)>,
    degree: usize,
}

impl RationalMap {
    /// Build from an exact rational function. Coprimality is enforced by an
    /// exact gcd over Q, and the result is normalized: all coefficient
    /// valuations >= 0 with joint minimum exactly 0.
    pub fn from_rat_func(ctx: &Ctx, f: &RatFunc) -> Result<RationalMap> {
        if f.den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let degree = f.num.degree().max(f.den.degree());
        if f.num.is_zero() || degree == 0 {
            return Err(Error::Config("constant maps are not supported".into()));
        }
        let vmin = f
            .num
            .min_val_p(ctx.prime())
            .into_iter()
            .chain(f.den.min_val_p(ctx.prime()))
            .min()
            .expect("nonzero map");
        let scale = Q::new(1.into(), 1.into())
            * Q::from_integer(num_bigint::BigInt::from(ctx.prime())).pow(-(vmin as i32));
        let num_q = f.num.scale(&scale);
        let den_q = f.den.scale(&scale);
        Ok(RationalMap {
            ctx: ctx.clone(),
            num: PPoly::from_rational_poly(ctx, &num_q),
            den: PPoly::from_rational_poly(ctx, &den_q),
            shadow: Some((num_q, den_q)),
            degree,
        })
    }

    pub fn from_exprs(ctx: &Ctx, num: &QPoly, den: &QPoly) -> Result<RationalMap> {
        RationalMap::from_rat_func(ctx, &RatFunc::new(num.clone(), den.clone())?)
    }

    /// Internal constructor for conjugates: the caller certifies that num
    /// and den are coprime of the stated degree. Normalizes.
    fn from_parts(
        ctx: &Ctx,
        num: PPoly,
        den: PPoly,
        shadow: Option<(QPoly, QPoly)>,
        degree: usize,
    ) -> Result<RationalMap> {
        if let Some((nq, dq)) = shadow {
            let rf = RatFunc::new(nq, dq)?;
            let mut m = RationalMap::from_rat_func(ctx, &rf)?;
            m.degree = degree;
            return Ok(m);
        }
        let vmin = num.min_valuation()?.min(den.min_valuation()?);
        let vmin = match vmin {
            ValOrInf::Finite(v) => v,
            ValOrInf::Infinite => return Err(Error::ZeroPolynomial),
        };
        let shift = vmin * Val::from_integer(ctx.ram_index() as i64);
        debug_assert_eq!(*shift.denom(), 1);
        let e = -shift.to_integer();
        Ok(RationalMap {
            ctx: ctx.clone(),
            num: num.shift_all(e),
            den: den.shift_all(e),
            shadow: None,
            degree,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num(&self) -> &PPoly {
        &self.num
    }

    pub fn den(&self) -> &PPoly {
        &self.den
    }

    pub fn shadow(&self) -> Option<&(QPoly, QPoly)> {
        self.shadow.as_ref()
    }

    /// Exact degrees of numerator and denominator.
    pub fn part_degrees(&self) -> Result<(usize, usize)> {
        if let Some((nq, dq)) = &self.shadow {
            return Ok((nq.degree(), dq.degree()));
        }
        Ok((self.num.certified_degree()?, self.den.certified_degree()?))
    }

    /// Coefficientwise reduction with common factors cancelled.
    pub fn reduce(&self) -> Result<ResidualMap> {
        ResidualMap::new(self.num.reduce()?, self.den.reduce()?)
    }

    pub fn is_good_reduction(&self) -> Result<bool> {
        Ok(self.reduce()?.degree() == self.degree)
    }

    /// sigma . phi . sigma^{-1}, normalized; the degree is preserved.
    pub fn conjugate(&self, sigma: &MobiusMap) -> Result<RationalMap> {
        self.sandwich(sigma, &sigma.inverse())
    }

    /// left . phi . right for independent Moebius maps, normalized. The
    /// caller is responsible for both maps being invertible (the
    /// constructors enforce it), which keeps the result coprime of the same
    /// degree.
    pub fn sandwich(&self, left: &MobiusMap, right: &MobiusMap) -> Result<RationalMap> {
        let d = self.degree;
        let p_poly = PPoly::new(
            &self.ctx,
            vec![right.entries[1].clone(), right.entries[0].clone()],
        );
        let q_poly = PPoly::new(
            &self.ctx,
            vec![right.entries[3].clone(), right.entries[2].clone()],
        );
        let a = homogeneous_substitute(&self.num, &p_poly, &q_poly, d);
        let b = homogeneous_substitute(&self.den, &p_poly, &q_poly, d);
        let num = a.scale(&left.entries[0]).add(&b.scale(&left.entries[1]));
        let den = a.scale(&left.entries[2]).add(&b.scale(&left.entries[3]));
        let shadow = match (&self.shadow, &left.shadow, &right.shadow) {
            (Some((nq, dq)), Some(lq), Some(rq)) => {
                let pq = QPoly::new(vec![rq[1].clone(), rq[0].clone()]);
                let qq = QPoly::new(vec![rq[3].clone(), rq[2].clone()]);
                let aq = homogeneous_substitute_q(nq, &pq, &qq, d);
                let bq = homogeneous_substitute_q(dq, &pq, &qq, d);
                let num_q = aq.scale(&lq[0]).add(&bq.scale(&lq[1]));
                let den_q = aq.scale(&lq[2]).add(&bq.scale(&lq[3]));
                Some((num_q, den_q))
            }
            _ => None,
        };
        RationalMap::from_parts(&self.ctx, num, den, shadow, d)
    }

    /// The conjugate by z -> 1/z: reverse both coefficient vectors.
    pub fn flip(&self) -> RationalMap {
        let d = self.degree;
        let rev = |f: &PPoly| {
            let mut c = vec![PadicElem::zero(&self.ctx); d + 1];
            for (i, x) in f.coeffs().iter().enumerate() {
                c[d - i] = x.clone();
            }
            PPoly::new(&self.ctx, c)
        };
        let rev_q = |f: &QPoly| {
            let mut c = vec![Q::zero(); d + 1];
            for (i, x) in f.coeffs().iter().enumerate() {
                c[d - i] = x.clone();
            }
            QPoly::new(c)
        };
        RationalMap {
            ctx: self.ctx.clone(),
            num: rev(&self.den),
            den: rev(&self.num),
            shadow: self
                .shadow
                .as_ref()
                .map(|(nq, dq)| (rev_q(dq), rev_q(nq))),
            degree: d,
        }
    }

    /// P(z) = num(z) - z den(z); roots are the finite type-1 fixed points.
    /// The boolean reports whether infinity is fixed.
    pub fn fixed_point_polynomial(&self) -> Result<(PPoly, Option<QPoly>, bool)> {
        let p = self.num.sub(&PPoly::x(&self.ctx).mul(&self.den));
        let shadow = self
            .shadow
            .as_ref()
            .map(|(nq, dq)| nq.sub(&QPoly::x().mul(dq)));
        let (dn, dd) = self.part_degrees()?;
        Ok((p, shadow, dn > dd))
    }

    /// Wronskian numerator of the derivative: num' den - num den'.
    pub fn wronskian_shadow(&self) -> Option<QPoly> {
        self.shadow.as_ref().map(|(nq, dq)| {
            nq.derivative().mul(dq).sub(&nq.mul(&dq.derivative()))
        })
    }

    /// Evaluate at a tower point, projectively.
    pub fn eval(&self, x: &PadicElem) -> Result<ProjValue> {
        let n = self.num.eval(x);
        let d = self.den.eval(x);
        if d.is_exact_zero() {
            return Ok(ProjValue::Infinity);
        }
        if d.is_bigo() {
            // exact rational shadow can still settle poles for rational x
            return Err(Error::PrecisionExhausted(
                "denominator indistinguishable from zero at evaluation point".into(),
            ));
        }
        Ok(ProjValue::Finite(n.div(&d)?))
    }

    /// Re-embed into a refinement context; rational shadows re-embed at full
    /// fresh precision.
    pub fn embed(&self, to: &Ctx) -> Result<RationalMap> {
        if &self.ctx == to {
            return Ok(self.clone());
        }
        if let Some((nq, dq)) = &self.shadow {
            let mut m = RationalMap::from_rat_func(
                to,
                &RatFunc {
                    num: nq.clone(),
                    den: dq.clone(),
                },
            )?;
            m.degree = self.degree;
            return Ok(m);
        }
        let emb = crate::padic::TowerEmbedding::new(&self.ctx, to)?;
        RationalMap::from_parts(
            to,
            self.num.embed(&emb),
            self.den.embed(&emb),
            None,
            self.degree,
        )
    }

    /// Classify the distinct type-1 fixed points by multiplier absolute
    /// value. Requires the exact rational shadow.
    pub fn classify_fixed_points(&self) -> Result<Vec<Type1FixedPoint>> {
        let (_, dq) = self.shadow.as_ref().ok_or_else(|| {
            Error::FactorizationUnsupported(
                "fixed point classification needs exact rational coefficients".into(),
            )
        })?;
        let (_, pq, inf_fixed) = self.fixed_point_polynomial()?;
        let pq = pq.expect("shadow present");
        let wq = self.wronskian_shadow().expect("shadow present");
        if pq.is_zero() {
            return Err(Error::Config(
                "every point is fixed; no isolated classification".into(),
            ));
        }
        let mut out = vec![];
        if pq.degree() > 0 {
            let p_star = pq.squarefree_part()?;
            // fixed points shared with the wronskian are exactly the
            // superattracting ones (lambda = 0), settled over Q
            let s = p_star.gcd(&wq);
            let a = if s.degree() > 0 {
                p_star.divrem(&s).0.monic()
            } else {
                p_star.clone()
            };
            if s.degree() > 0 {
                let iso = isolate_roots(&self.ctx, &s)?;
                for root in &iso.roots {
                    out.push(self.finite_fixed_point(&iso, root, MultiplierAbs::Zero)?);
                }
            }
            if a.degree() > 0 {
                let iso = isolate_roots(&self.ctx, &a)?;
                let w_emb = PPoly::from_rational_poly(&iso.ctx, &wq);
                let d_emb = PPoly::from_rational_poly(&iso.ctx, dq);
                for root in &iso.roots {
                    let wv = w_emb.eval(root).valuation()?;
                    let dv = d_emb.eval(root).valuation()?;
                    let (wv, dv) = match (wv, dv) {
                        (ValOrInf::Finite(a), ValOrInf::Finite(b)) => (a, b),
                        _ => {
                            return Err(Error::PrecisionExhausted(
                                "multiplier valuation not certified".into(),
                            ))
                        }
                    };
                    let lam = wv - dv - dv;
                    out.push(self.finite_fixed_point(&iso, root, MultiplierAbs::Pow(lam))?);
                }
            }
        }
        if inf_fixed {
            // multiplier at infinity: flip and evaluate at 0, all exact
            let flipped = self.flip();
            let (fn_q, fd_q) = flipped.shadow.as_ref().expect("shadow preserved");
            let w0 = fn_q
                .derivative()
                .mul(fd_q)
                .sub(&fn_q.mul(&fd_q.derivative()))
                .coeff(0);
            let d0 = fd_q.coeff(0);
            let multiplier = if w0.is_zero() {
                MultiplierAbs::Zero
            } else {
                let v = rat_val_p(&w0, self.ctx.prime()).unwrap()
                    - 2 * rat_val_p(&d0, self.ctx.prime()).unwrap();
                MultiplierAbs::Pow(Val::from_integer(v))
            };
            let class = multiplier.class();
            out.push(Type1FixedPoint {
                at_infinity: true,
                value: None,
                home: self.ctx.clone(),
                direction: ResPoint::Infinity,
                valuation: None,
                multiplier,
                class,
            });
        }
        out.sort_by_key(|a| a.sort_key());
        Ok(out)
    }

    fn finite_fixed_point(
        &self,
        iso: &RootIsolation,
        root: &PadicElem,
        multiplier: MultiplierAbs,
    ) -> Result<Type1FixedPoint> {
        let direction = direction_at_gauss(root)?;
        let class = multiplier.class();
        Ok(Type1FixedPoint {
            at_infinity: false,
            value: Some(root.clone()),
            home: iso.ctx.clone(),
            direction,
            valuation: Some(root.val_lower_bound()),
            multiplier,
            class,
        })
    }
}

/// The direction at the Gauss point containing a finite tower value: its
/// residue when v >= 0, infinity otherwise.
pub fn direction_at_gauss(x: &PadicElem) -> Result<ResPoint> {
    match x.val_lower_bound() {
        ValOrInf::Infinite => Ok(ResPoint::Finite(x.ctx().ff_zero())),
        ValOrInf::Finite(v) => {
            if v > Val::from_integer(0) {
                Ok(ResPoint::Finite(x.ctx().ff_zero()))
            } else if x.is_bigo() {
                Err(Error::PrecisionExhausted(
                    "direction of an element indistinguishable from zero".into(),
                ))
            } else if v < Val::from_integer(0) {
                Ok(ResPoint::Infinity)
            } else {
                Ok(ResPoint::Finite(x.residue()?))
            }
        }
    }
}

fn homogeneous_substitute(f: &PPoly, p: &PPoly, q: &PPoly, d: usize) -> PPoly {
    let ctx = f.ctx().clone();
    let mut out = PPoly::zero(&ctx);
    // running powers p^i, q^(d-i)
    let mut p_pows = vec![PPoly::one(&ctx)];
    for _ in 0..d {
        p_pows.push(p_pows.last().unwrap().mul(p));
    }
    let mut q_pows = vec![PPoly::one(&ctx)];
    for _ in 0..d {
        q_pows.push(q_pows.last().unwrap().mul(q));
    }
    for i in 0..=d {
        let c = f.coeff(i);
        if c.is_exact_zero() {
            continue;
        }
        out = out.add(&p_pows[i].mul(&q_pows[d - i]).scale(&c));
    }
    out
}

fn homogeneous_substitute_q(f: &QPoly, p: &QPoly, q: &QPoly, d: usize) -> QPoly {
    let mut out = QPoly::zero();
    let mut p_pows = vec![QPoly::one()];
    for _ in 0..d {
        p_pows.push(p_pows.last().unwrap().mul(p));
    }
    let mut q_pows = vec![QPoly::one()];
    for _ in 0..d {
        q_pows.push(q_pows.last().unwrap().mul(q));
    }
    for i in 0..=d {
        let c = f.coeff(i);
        if c.is_zero() {
            continue;
        }
        out = out.add(&p_pows[i].mul(&q_pows[d - i]).scale(&c));
    }
    out
}

/// Moebius transformation (az+b)/(cz+d) with exact tower entries.
#[derive(Clone, Debug)]
pub struct MobiusMap {
    ctx: Ctx,
    /// a, b, c, d
    pub entries: [PadicElem; 4],
    pub shadow: Option<[Q; 4]>,
}

impl MobiusMap {
    pub fn new(ctx: &Ctx, entries: [PadicElem; 4], shadow: Option<[Q; 4]>) -> Result<MobiusMap> {
        let m = MobiusMap {
            ctx: ctx.clone(),
            entries,
            shadow,
        };
        // determinant must be certified nonzero
        let det = m.det();
        if det.is_exact_zero() || det.is_bigo() {
            return Err(Error::Config("moebius map with vanishing determinant".into()));
        }
        Ok(m)
    }

    pub fn from_rationals(ctx: &Ctx, q: [Q; 4]) -> Result<MobiusMap> {
        let det = &q[0] * &q[3] - &q[1] * &q[2];
        if det.is_zero() {
            return Err(Error::Config("moebius map with vanishing determinant".into()));
        }
        let entries = [
            PadicElem::from_rational(ctx, &q[0]),
            PadicElem::from_rational(ctx, &q[1]),
            PadicElem::from_rational(ctx, &q[2]),
            PadicElem::from_rational(ctx, &q[3]),
        ];
        MobiusMap::new(ctx, entries, Some(q))
    }

    pub fn identity(ctx: &Ctx) -> MobiusMap {
        MobiusMap::from_rationals(
            ctx,
            [Q::from_integer(1.into()), Q::zero(), Q::zero(), Q::from_integer(1.into())],
        )
        .expect("identity is invertible")
    }

    /// The affine map z -> center + pi^e z, sending the Gauss point to the
    /// type-2 point with that center and log-radius e/w.
    pub fn affine(center: &PadicElem, e: i64) -> MobiusMap {
        let ctx = center.ctx().clone();
        MobiusMap {
            entries: [
                PadicElem::pi_pow(&ctx, e),
                center.clone(),
                PadicElem::zero(&ctx),
                PadicElem::one(&ctx),
            ],
            shadow: None,
            ctx,
        }
    }

    /// z -> 1/z.
    pub fn flip(ctx: &Ctx) -> MobiusMap {
        MobiusMap::from_rationals(
            ctx,
            [Q::zero(), Q::from_integer(1.into()), Q::from_integer(1.into()), Q::zero()],
        )
        .expect("flip is invertible")
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn det(&self) -> PadicElem {
        self.entries[0]
            .mul(&self.entries[3])
            .sub(&self.entries[1].mul(&self.entries[2]))
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            ctx: self.ctx.clone(),
            entries: [
                self.entries[3].clone(),
                self.entries[1].neg(),
                self.entries[2].neg(),
                self.entries[0].clone(),
            ],
            shadow: self.shadow.as_ref().map(|q| {
                [q[3].clone(), -q[1].clone(), -q[2].clone(), q[0].clone()]
            }),
        }
    }

    pub fn compose(&self, o: &MobiusMap) -> MobiusMap {
        let a = &self.entries;
        let b = &o.entries;
        MobiusMap {
            ctx: self.ctx.clone(),
            entries: [
                a[0].mul(&b[0]).add(&a[1].mul(&b[2])),
                a[0].mul(&b[1]).add(&a[1].mul(&b[3])),
                a[2].mul(&b[0]).add(&a[3].mul(&b[2])),
                a[2].mul(&b[1]).add(&a[3].mul(&b[3])),
            ],
            shadow: match (&self.shadow, &o.shadow) {
                (Some(x), Some(y)) => Some([
                    &x[0] * &y[0] + &x[1] * &y[2],
                    &x[0] * &y[1] + &x[1] * &y[3],
                    &x[2] * &y[0] + &x[3] * &y[2],
                    &x[2] * &y[1] + &x[3] * &y[3],
                ]),
                _ => None,
            },
        }
    }

    pub fn apply(&self, x: &ProjValue) -> Result<ProjValue> {
        let [a, b, c, d] = &self.entries;
        match x {
            ProjValue::Infinity => {
                if c.is_exact_zero() {
                    return Ok(ProjValue::Infinity);
                }
                if c.is_bigo() {
                    return Err(Error::PrecisionExhausted("moebius at infinity".into()));
                }
                Ok(ProjValue::Finite(a.div(c)?))
            }
            ProjValue::Finite(v) => {
                let nu = a.mul(v).add(b);
                let de = c.mul(v).add(d);
                if de.is_exact_zero() {
                    return Ok(ProjValue::Infinity);
                }
                if de.is_bigo() {
                    return Err(Error::PrecisionExhausted(
                        "moebius denominator indistinguishable from zero".into(),
                    ));
                }
                Ok(ProjValue::Finite(nu.div(&de)?))
            }
        }
    }
}

/// Reduction of a rational map over the residue field, in canonical form
/// (coprime; monic denominator, or the constant-infinity shape 1/0).
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualMap {
    num: FFPoly,
    den: FFPoly,
}

impl ResidualMap {
    pub fn new(num: FFPoly, den: FFPoly) -> Result<ResidualMap> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if den.is_zero() {
            let ctx = num.ctx().clone();
            return Ok(ResidualMap {
                num: FFPoly::one(&ctx),
                den: FFPoly::zero(&ctx),
            });
        }
        if num.is_zero() {
            let ctx = den.ctx().clone();
            return Ok(ResidualMap {
                num: FFPoly::zero(&ctx),
                den: FFPoly::one(&ctx),
            });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() > 0 {
            (num.divrem(&g).0, den.divrem(&g).0)
        } else {
            (num, den)
        };
        let inv = den.leading().inv().expect("nonzero denominator");
        Ok(ResidualMap {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn ctx(&self) -> &Ctx {
        self.num.ctx()
    }

    pub fn num(&self) -> &FFPoly {
        &self.num
    }

    pub fn den(&self) -> &FFPoly {
        &self.den
    }

    /// max(deg num, deg den) after cancellation; 0 for constants.
    pub fn degree(&self) -> usize {
        if self.den.is_zero() || self.num.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_constant_infinity(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.num == FFPoly::x(self.ctx()) && self.den == FFPoly::one(self.ctx())
    }

    /// Moebius map with a unique classical fixed point.
    pub fn is_translation(&self) -> Result<bool> {
        if self.degree() != 1 {
            return Ok(false);
        }
        match self.fixed_points()? {
            ResFixed::All => Ok(false),
            ResFixed::Points { pts, .. } => Ok(pts.len() == 1),
        }
    }

    pub fn eval(&self, x: &ResPoint) -> ResPoint {
        match x {
            ResPoint::Infinity => {
                let dn = if self.num.is_zero() { 0 } else { self.num.degree() };
                let dd = if self.den.is_zero() {
                    return ResPoint::Infinity; // constant infinity map
                } else {
                    self.den.degree()
                };
                match dn.cmp(&dd) {
                    std::cmp::Ordering::Greater => ResPoint::Infinity,
                    std::cmp::Ordering::Less => ResPoint::Finite(self.ctx().ff_zero()),
                    std::cmp::Ordering::Equal => ResPoint::Finite(
                        self.num
                            .leading()
                            .div(&self.den.leading())
                            .expect("monic denominator"),
                    ),
                }
            }
            ResPoint::Finite(x) => {
                if self.den.is_zero() {
                    return ResPoint::Infinity;
                }
                let d = self.den.eval(x);
                if d.is_zero() {
                    return ResPoint::Infinity;
                }
                ResPoint::Finite(self.num.eval(x).div(&d).unwrap())
            }
        }
    }

    /// The conjugate by z -> 1/z.
    pub fn flip(&self) -> ResidualMap {
        let d = self.degree().max(
            if self.num.is_zero() { 0 } else { self.num.degree() }
                .max(if self.den.is_zero() { 0 } else { self.den.degree() }),
        );
        let ctx = self.ctx().clone();
        let rev = |f: &FFPoly| {
            let mut c = vec![ctx.ff_zero(); d + 1];
            for (i, x) in f.coeffs().iter().enumerate() {
                c[d - i] = x.clone();
            }
            FFPoly::new(&ctx, c)
        };
        ResidualMap::new(rev(&self.den), rev(&self.num)).expect("flip of nonzero map")
    }

    /// Local multiplicity (local degree) at a point of P^1 over this map's
    /// own residue field. The map must be nonconstant.
    pub fn local_multiplicity(&self, a: &ResPoint) -> usize {
        assert!(!self.is_constant(), "local multiplicity of a constant map");
        match a {
            ResPoint::Infinity => self.flip().local_multiplicity(&ResPoint::Finite(
                self.ctx().ff_zero(),
            )),
            ResPoint::Finite(x) => match self.eval(a) {
                ResPoint::Infinity => self.den.root_multiplicity(x),
                ResPoint::Finite(c) => {
                    let g = self.num.sub(&self.den.scale(&c));
                    g.root_multiplicity(x)
                }
            },
        }
    }

    /// Residual fixed points with their fixed-point indices (orders of
    /// vanishing of num - z den), infinity included via the degree deficit.
    pub fn fixed_points(&self) -> Result<ResFixed> {
        let phi = self.num.sub(&FFPoly::x(self.ctx()).mul(&self.den));
        if phi.is_zero() {
            return Ok(ResFixed::All);
        }
        let dtil = self.degree();
        let mut pts: Vec<(ResPoint, usize)> = vec![];
        let (ctx, roots) = if phi.degree() == 0 {
            (self.ctx().clone(), vec![])
        } else {
            let (c, r) = phi.roots_in_closure()?;
            (c, r)
        };
        for (r, m) in roots {
            pts.push((ResPoint::Finite(r), m));
        }
        // infinity absorbs the degree deficit of num - z den
        let deficit = dtil + 1 - phi.degree();
        if deficit > 0 {
            pts.push((ResPoint::Infinity, deficit));
        }
        pts.sort_by_key(|(p, _)| p.order_key());
        Ok(ResFixed::Points { ctx, pts })
    }

    /// Residual critical points: every point where the local multiplicity
    /// is >= 2, with that multiplicity. Inseparable maps are critical
    /// everywhere.
    pub fn critical_points(&self) -> Result<ResCritical> {
        assert!(!self.is_constant(), "critical points of a constant map");
        let w = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        if w.is_zero() {
            return Ok(ResCritical::All);
        }
        let mut pts: Vec<(ResPoint, usize)> = vec![];
        let (ctx, dedup_roots) = if w.degree() == 0 {
            (self.ctx().clone(), vec![])
        } else {
            let sf = w.squarefree_part()?;
            let (c, r) = sf.roots_in_closure()?;
            (c, r)
        };
        let emb = ResidueEmbedding::new(self.ctx(), &ctx)?;
        let up = ResidualMap {
            num: emb.map_poly(&self.num),
            den: emb.map_poly(&self.den),
        };
        for (r, _) in dedup_roots {
            let m = up.local_multiplicity(&ResPoint::Finite(r.clone()));
            if m >= 2 {
                pts.push((ResPoint::Finite(r), m));
            }
        }
        let m_inf = self.local_multiplicity(&ResPoint::Infinity);
        if m_inf >= 2 {
            pts.push((ResPoint::Infinity, m_inf));
        }
        pts.sort_by_key(|(p, _)| p.order_key());
        Ok(ResCritical::Points { ctx, pts })
    }

    pub fn embed(&self, emb: &ResidueEmbedding) -> ResidualMap {
        ResidualMap {
            num: emb.map_poly(&self.num),
            den: emb.map_poly(&self.den),
        }
    }

    /// Local multiplicity at a label that may live in an extension of this
    /// map's residue field; both are embedded into a common field first.
    pub fn local_multiplicity_aligned(&self, label: &ResPoint) -> Result<usize> {
        match label {
            ResPoint::Infinity => Ok(self.local_multiplicity(label)),
            ResPoint::Finite(x) => {
                let kf = x.ctx().unram_degree();
                let km = self.ctx().unram_degree();
                let lcm = num_integer::lcm(kf, km);
                let target = if lcm == km {
                    self.ctx().clone()
                } else {
                    self.ctx().extend_unramified(lcm / km)?
                };
                let up = if &target == self.ctx() {
                    self.clone()
                } else {
                    self.embed(&ResidueEmbedding::new(self.ctx(), &target)?)
                };
                let lab = if x.ctx() == &target {
                    x.clone()
                } else {
                    ResidueEmbedding::new(x.ctx(), &target)?.map(x)
                };
                Ok(up.local_multiplicity(&ResPoint::Finite(lab)))
            }
        }
    }

    /// Residual evaluation at a label in a possibly larger residue field.
    pub fn eval_aligned(&self, label: &ResPoint) -> Result<ResPoint> {
        match label {
            ResPoint::Infinity => Ok(self.eval(label)),
            ResPoint::Finite(x) => {
                let kf = x.ctx().unram_degree();
                let km = self.ctx().unram_degree();
                let lcm = num_integer::lcm(kf, km);
                let target = if lcm == km {
                    self.ctx().clone()
                } else {
                    self.ctx().extend_unramified(lcm / km)?
                };
                let up = if &target == self.ctx() {
                    self.clone()
                } else {
                    self.embed(&ResidueEmbedding::new(self.ctx(), &target)?)
                };
                let lab = if x.ctx() == &target {
                    x.clone()
                } else {
                    ResidueEmbedding::new(x.ctx(), &target)?.map(x)
                };
                Ok(up.eval(&ResPoint::Finite(lab)))
            }
        }
    }
}

/// Residual fixed point set.
#[derive(Clone, Debug)]
pub enum ResFixed {
    /// Identity reduction: every point fixed.
    All,
    Points { ctx: Ctx, pts: Vec<(ResPoint, usize)> },
}

/// Residual critical point set.
#[derive(Clone, Debug)]
pub enum ResCritical {
    /// Inseparable reduction: every point critical.
    All,
    Points { ctx: Ctx, pts: Vec<(ResPoint, usize)> },
}

/// One distinct type-1 fixed point of the map.
#[derive(Clone, Debug)]
pub struct Type1FixedPoint {
    pub at_infinity: bool,
    /// Exact tower value (in `home`); `None` for the point at infinity.
    pub value: Option<PadicElem>,
    /// Context the value lives in (possibly an extension of the map's).
    pub home: Ctx,
    /// Direction at the Gauss point containing the point.
    pub direction: ResPoint,
    /// Exact valuation (lower bound for roots indistinguishable from their
    /// cluster center).
    pub valuation: Option<ValOrInf>,
    pub multiplier: MultiplierAbs,
    pub class: FixedClass,
}

impl Type1FixedPoint {
    fn sort_key(&self) -> (u8, (u8, u128)) {
        (
            self.at_infinity as u8,
            self.direction.order_key(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiplierAbs {
    /// lambda = 0.
    Zero,
    /// |lambda| = p^{-v}: stores v.
    Pow(Val),
}

impl MultiplierAbs {
    pub fn class(&self) -> FixedClass {
        match self {
            MultiplierAbs::Zero => FixedClass::Superattracting,
            MultiplierAbs::Pow(v) => {
                if *v > Val::from_integer(0) {
                    FixedClass::Attracting
                } else if *v == Val::from_integer(0) {
                    FixedClass::Indifferent
                } else {
                    FixedClass::Repelling
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedClass {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl std::fmt::Display for FixedClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FixedClass::Superattracting => "superattracting",
            FixedClass::Attracting => "attracting",
            FixedClass::Indifferent => "indifferent",
            FixedClass::Repelling => "repelling",
        };
        write!(f, "{s}")
    }
}

/// Sum of multiplier valuations over the roots of an irreducible factor of
/// the fixed point polynomial, via resultants (the Galois-orbit route):
/// sum v(phi'(r)) = v(Res(f, W)) - deg W v(lc f) - 2 (v(Res(f, den)) - deg den v(lc f)).
pub fn multiplier_valuation_sum_by_resultant(
    factor: &QPoly,
    map: &RationalMap,
) -> Result<Val> {
    let (_, dq) = map
        .shadow()
        .ok_or_else(|| Error::FactorizationUnsupported("resultant route needs shadow".into()))?;
    let wq = map.wronskian_shadow().expect("shadow present");
    let p = map.ctx().prime();
    let res_w = factor.resultant(&wq)?;
    let res_d = factor.resultant(dq)?;
    let lcv = rat_val_p(&factor.leading(), p).unwrap();
    let rw = rat_val_p(&res_w, p)
        .ok_or_else(|| Error::Config("factor shares a root with the wronskian".into()))?;
    let rd = rat_val_p(&res_d, p)
        .ok_or_else(|| Error::Config("factor shares a root with the denominator".into()))?;
    let sum = (rw - wq.degree() as i64 * lcv) - 2 * (rd - dq.degree() as i64 * lcv);
    Ok(Val::from_integer(sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use crate::rational::{q_int, q_ratio};

    fn ctx3() -> Ctx {
        FieldContext::new(3, 1, 1, 32).unwrap()
    }

    fn map(ctx: &Ctx, num: &[i64], den: &[i64]) -> RationalMap {
        RationalMap::from_exprs(ctx, &QPoly::from_ints(num), &QPoly::from_ints(den)).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let ctx = ctx3();
        // (3z^2 + 3)/(3z) -> (z^2+1)/z
        let m = map(&ctx, &[3, 0, 3], &[0, 3]);
        let (nq, dq) = m.shadow().unwrap();
        assert_eq!(nq, &QPoly::from_ints(&[1, 0, 1]));
        assert_eq!(dq, &QPoly::from_ints(&[0, 1]));
        // the interior-identity map map is already normalized
        let m = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        let (nq, dq) = m.shadow().unwrap();
        assert_eq!(nq, &QPoly::from_ints(&[9, 1, 1]));
        assert_eq!(dq, &QPoly::from_ints(&[1, 0, 1]));
        // (z/3)/1 -> z / 3
        let m = RationalMap::from_exprs(
            &ctx,
            &QPoly::new(vec![q_int(0), q_ratio(1, 3)]),
            &QPoly::one(),
        )
        .unwrap();
        let (nq, dq) = m.shadow().unwrap();
        assert_eq!(nq, &QPoly::from_ints(&[0, 1]));
        assert_eq!(dq, &QPoly::from_ints(&[3]));
    }

    #[test]
    fn reduction_examples() {
        let ctx = ctx3();
        // (z^2+z+9)/(z^2+1) reduces to (z^2+z)/(z^2+1)
        let m = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        let r = m.reduce().unwrap();
        assert_eq!(r.num(), &FFPoly::from_ints(&ctx, &[0, 1, 1]));
        assert_eq!(r.den(), &FFPoly::from_ints(&ctx, &[1, 0, 1]));
        assert!(m.is_good_reduction().unwrap());
        // (3z^2 + z + 3)/(9z^2 + 1) reduces to the identity
        let m = map(&ctx, &[3, 1, 3], &[1, 0, 9]);
        let r = m.reduce().unwrap();
        assert!(r.is_identity());
        assert!(!m.is_good_reduction().unwrap());
        // (z^2+3)/z: gcd cancellation drops the degree
        let m = map(&ctx, &[3, 0, 1], &[0, 1]);
        let r = m.reduce().unwrap();
        assert_eq!(r.degree(), 1);
        assert!(!m.is_good_reduction().unwrap());
    }

    #[test]
    fn good_reduction_examples() {
        let ctx = ctx3();
        assert!(map(&ctx, &[1, 0, 1], &[1, 1]).is_good_reduction().unwrap());
        assert!(map(&ctx, &[0, 0, 0, 1], &[1]).is_good_reduction().unwrap());
        assert!(!map(&ctx, &[3, 0, 1], &[0, 1]).is_good_reduction().unwrap());
    }

    #[test]
    fn conjugation_interior_identity() {
        let ctx = ctx3();
        let phi = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        // sigma(z) = 3z; psi = sigma^{-1} . phi . sigma = conjugate by sigma^{-1}
        let sigma_inv = MobiusMap::from_rationals(
            &ctx,
            [q_ratio(1, 3), q_int(0), q_int(0), q_int(1)],
        )
        .unwrap();
        let psi = phi.conjugate(&sigma_inv).unwrap();
        let (nq, dq) = psi.shadow().unwrap();
        assert_eq!(nq, &QPoly::from_ints(&[3, 1, 3]));
        assert_eq!(dq, &QPoly::from_ints(&[1, 0, 9]));
        assert_eq!(psi.degree(), 2);
        // identity conjugation is the identity
        let id = MobiusMap::identity(&ctx);
        let same = phi.conjugate(&id).unwrap();
        assert_eq!(same.shadow().unwrap(), phi.shadow().unwrap());
        // z^2 conjugated by z -> 1/z stays z^2
        let sq = map(&ctx, &[0, 0, 1], &[1]);
        let fl = sq.conjugate(&MobiusMap::flip(&ctx)).unwrap();
        assert_eq!(fl.shadow().unwrap().0, QPoly::from_ints(&[0, 0, 1]));
        assert_eq!(fl.shadow().unwrap().1, QPoly::from_ints(&[1]));
    }

    #[test]
    fn conjugation_round_trip() {
        let ctx = ctx3();
        let phi = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        let sigma = MobiusMap::from_rationals(&ctx, [q_int(2), q_int(1), q_int(1), q_int(1)])
            .unwrap();
        let there = phi.conjugate(&sigma).unwrap();
        let back = there.conjugate(&sigma.inverse()).unwrap();
        assert_eq!(back.shadow().unwrap(), phi.shadow().unwrap());
    }

    #[test]
    fn fixed_point_polynomial_examples() {
        let ctx = ctx3();
        // (z^2+1)/(z+1): P = 1 - z, infinity fixed
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let (_, pq, inf) = m.fixed_point_polynomial().unwrap();
        assert_eq!(pq.unwrap(), QPoly::from_ints(&[1, -1]));
        assert!(inf);
        // z^3: P = z^3 - z... num - z*den = z^3 - z? no: num = z^3, den = 1
        let m = map(&ctx, &[0, 0, 0, 1], &[1]);
        let (_, pq, inf) = m.fixed_point_polynomial().unwrap();
        assert_eq!(pq.unwrap(), QPoly::from_ints(&[0, -1, 0, 1]));
        assert!(inf);
        // the interior-identity map: P = -z^3 + z^2 + 9, infinity not fixed
        let m = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        let (_, pq, inf) = m.fixed_point_polynomial().unwrap();
        assert_eq!(pq.unwrap(), QPoly::from_ints(&[9, 0, 1, -1]));
        assert!(!inf);
    }

    #[test]
    fn residual_fixed_points_examples() {
        let ctx = ctx3();
        // (z^2+z)/(z^2+1) over F_3: 0 (index 2), 1 (index 1); infinity not fixed
        let m = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        let r = m.reduce().unwrap();
        match r.fixed_points().unwrap() {
            ResFixed::Points { ctx: c, pts } => {
                assert_eq!(
                    pts,
                    vec![
                        (ResPoint::Finite(c.ff_zero()), 2),
                        (ResPoint::Finite(c.ff_one()), 1)
                    ]
                );
            }
            _ => panic!("not identity"),
        }
        // z^2 over F_3: {0, 1, inf}
        let m = map(&ctx, &[0, 0, 1], &[1]);
        match m.reduce().unwrap().fixed_points().unwrap() {
            ResFixed::Points { ctx: c, pts } => {
                assert_eq!(
                    pts,
                    vec![
                        (ResPoint::Finite(c.ff_zero()), 1),
                        (ResPoint::Finite(c.ff_one()), 1),
                        (ResPoint::Infinity, 1)
                    ]
                );
            }
            _ => panic!(),
        }
        // identity reduction
        let m = map(&ctx, &[3, 1, 3], &[1, 0, 9]);
        assert!(matches!(
            m.reduce().unwrap().fixed_points().unwrap(),
            ResFixed::All
        ));
    }

    #[test]
    fn residual_critical_points_examples() {
        let ctx = ctx3();
        // reduction of (z^2+1)/(z+1) over F_3: critical points are the roots
        // of z^2+2z+2 (in F_9), and infinity is not critical
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        match m.reduce().unwrap().critical_points().unwrap() {
            ResCritical::Points { ctx: c, pts } => {
                assert_eq!(c.residue_order(), 9);
                assert_eq!(pts.len(), 2);
                let wr = FFPoly::from_ints(&c, &[2, 2, 1]);
                for (p, m) in &pts {
                    assert_eq!(*m, 2);
                    match p {
                        ResPoint::Finite(x) => assert!(wr.eval(x).is_zero()),
                        ResPoint::Infinity => panic!("infinity is not critical here"),
                    }
                }
            }
            _ => panic!("separable"),
        }
        // z^2 over F_3: {0 (m=2), inf (m=2)}
        let m = map(&ctx, &[0, 0, 1], &[1]);
        match m.reduce().unwrap().critical_points().unwrap() {
            ResCritical::Points { ctx: c, pts } => {
                assert_eq!(
                    pts,
                    vec![(ResPoint::Finite(c.ff_zero()), 2), (ResPoint::Infinity, 2)]
                );
            }
            _ => panic!(),
        }
        // z^3 over F_3 is inseparable: every point critical
        let m = map(&ctx, &[0, 0, 0, 1], &[1]);
        assert!(matches!(
            m.reduce().unwrap().critical_points().unwrap(),
            ResCritical::All
        ));
        // its local multiplicities are all p
        let r = m.reduce().unwrap();
        assert_eq!(r.local_multiplicity(&ResPoint::Finite(ctx.ff_one())), 3);
        assert_eq!(r.local_multiplicity(&ResPoint::Infinity), 3);
    }

    #[test]
    fn classification_examples() {
        let ctx = ctx3();
        // z^2 at p=3: 0 superattracting, 1 indifferent, inf superattracting
        let m = map(&ctx, &[0, 0, 1], &[1]);
        let pts = m.classify_fixed_points().unwrap();
        assert_eq!(pts.len(), 3);
        let by_dir = |d: &ResPoint| pts.iter().find(|p| &p.direction == d).unwrap();
        assert_eq!(
            by_dir(&ResPoint::Finite(ctx.ff_zero())).class,
            FixedClass::Superattracting
        );
        assert_eq!(
            by_dir(&ResPoint::Finite(ctx.ff_one())).class,
            FixedClass::Indifferent
        );
        assert_eq!(by_dir(&ResPoint::Infinity).class, FixedClass::Superattracting);
        // z^2 at p=2: 1 is attracting (|2| = 1/2)
        let ctx2 = FieldContext::new(2, 1, 1, 32).unwrap();
        let m = map(&ctx2, &[0, 0, 1], &[1]);
        let pts = m.classify_fixed_points().unwrap();
        let one = pts
            .iter()
            .find(|p| p.direction == ResPoint::Finite(ctx2.ff_one()))
            .unwrap();
        assert_eq!(one.class, FixedClass::Attracting);
        assert_eq!(one.multiplier, MultiplierAbs::Pow(Val::from_integer(1)));
        // (z^2+1)/(z+1) at p=3: fixed point 1 indifferent (phi'(1) = 1/2)
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let pts = m.classify_fixed_points().unwrap();
        assert_eq!(pts.len(), 2);
        let one = pts
            .iter()
            .find(|p| p.direction == ResPoint::Finite(ctx.ff_one()))
            .unwrap();
        assert_eq!(one.class, FixedClass::Indifferent);
    }

    #[test]
    fn resultant_route_matches_direct_multipliers() {
        let ctx = ctx3();
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let (_, pq, _) = m.fixed_point_polynomial().unwrap();
        let pq = pq.unwrap().squarefree_part().unwrap();
        // P = 1 - z: single factor; direct multiplier of the fixed point 1
        // has v(lambda) = 0 (indifferent)
        let sum = multiplier_valuation_sum_by_resultant(&pq, &m).unwrap();
        assert_eq!(sum, Val::from_integer(0));
        // z^2 at p=2: fixed point 1, v(lambda) = 1
        let ctx2 = FieldContext::new(2, 1, 1, 32).unwrap();
        let m = map(&ctx2, &[0, 0, 1], &[1]);
        let f = QPoly::from_ints(&[-1, 1]); // factor z - 1
        let sum = multiplier_valuation_sum_by_resultant(&f, &m).unwrap();
        assert_eq!(sum, Val::from_integer(1));
    }

    #[test]
    fn flip_swaps_zero_and_infinity() {
        let ctx = ctx3();
        let m = map(&ctx, &[3, 0, 1], &[0, 1]); // (z^2+3)/z
        let f = m.flip();
        // 1/phi(1/z) = z/(3 z^2 + 1)
        let (nq, dq) = f.shadow().unwrap();
        assert_eq!(nq, &QPoly::from_ints(&[0, 1]));
        assert_eq!(dq, &QPoly::from_ints(&[1, 0, 3]));
    }
}
