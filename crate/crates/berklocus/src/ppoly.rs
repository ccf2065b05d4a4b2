//! Polynomials with tower coefficients.
//!
//! In contrast to the residue-field layer, arithmetic here is tracked to
//! finite precision, so structural degree (vector length) and certified
//! degree (largest coefficient certified nonzero) are distinct notions.
//! Division and gcd are deliberately absent: every procedure that needs
//! them works over the residue field or over the exact rationals instead.

use crate::error::{Error, Result};
use crate::field::Ctx;
use crate::ffpoly::FFPoly;
use crate::newton::{CoeffVal, NewtonPolygon};
use crate::padic::{PadicElem, TowerEmbedding};
use crate::rational::QPoly;
use crate::val::ValOrInf;

#[derive(Clone, Debug)]
pub struct PPoly {
    ctx: Ctx,
    c: Vec<PadicElem>, // low to high; trailing exact zeros trimmed
}

impl PPoly {
    pub fn new(ctx: &Ctx, mut coeffs: Vec<PadicElem>) -> PPoly {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        PPoly {
            ctx: ctx.clone(),
            c: coeffs,
        }
    }

    pub fn zero(ctx: &Ctx) -> PPoly {
        PPoly::new(ctx, vec![])
    }

    pub fn one(ctx: &Ctx) -> PPoly {
        PPoly::new(ctx, vec![PadicElem::one(ctx)])
    }

    pub fn x(ctx: &Ctx) -> PPoly {
        PPoly::new(ctx, vec![PadicElem::zero(ctx), PadicElem::one(ctx)])
    }

    pub fn constant(c: PadicElem) -> PPoly {
        let ctx = c.ctx().clone();
        PPoly::new(&ctx, vec![c])
    }

    pub fn from_rational_poly(ctx: &Ctx, f: &QPoly) -> PPoly {
        PPoly::new(
            ctx,
            f.coeffs()
                .iter()
                .map(|q| PadicElem::from_rational(ctx, q))
                .collect(),
        )
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[PadicElem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> PadicElem {
        self.c
            .get(i)
            .cloned()
            .unwrap_or_else(|| PadicElem::zero(&self.ctx))
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Structural degree: length of the coefficient vector minus one.
    pub fn degree_bound(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn add(&self, o: &PPoly) -> PPoly {
        let n = self.c.len().max(o.c.len());
        PPoly::new(
            &self.ctx,
            (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect(),
        )
    }

    pub fn sub(&self, o: &PPoly) -> PPoly {
        let n = self.c.len().max(o.c.len());
        PPoly::new(
            &self.ctx,
            (0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect(),
        )
    }

    pub fn neg(&self) -> PPoly {
        PPoly::new(&self.ctx, self.c.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, o: &PPoly) -> PPoly {
        if self.c.is_empty() || o.c.is_empty() {
            return PPoly::zero(&self.ctx);
        }
        let mut out = vec![PadicElem::zero(&self.ctx); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        PPoly::new(&self.ctx, out)
    }

    pub fn scale(&self, s: &PadicElem) -> PPoly {
        PPoly::new(&self.ctx, self.c.iter().map(|c| c.mul(s)).collect())
    }

    /// Multiply every coefficient by pi^e (exact).
    pub fn shift_all(&self, e: i64) -> PPoly {
        PPoly::new(&self.ctx, self.c.iter().map(|c| c.shift(e)).collect())
    }

    /// f(pi^e * t): coefficient i picks up pi^(e*i).
    pub fn rescale_pi(&self, e: i64) -> PPoly {
        PPoly::new(
            &self.ctx,
            self.c
                .iter()
                .enumerate()
                .map(|(i, c)| c.shift(e * i as i64))
                .collect(),
        )
    }

    pub fn derivative(&self) -> PPoly {
        if self.c.len() <= 1 {
            return PPoly::zero(&self.ctx);
        }
        PPoly::new(
            &self.ctx,
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c.mul(&PadicElem::from_int(&self.ctx, i as i64 + 1)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &PadicElem) -> PadicElem {
        let mut acc = PadicElem::zero(&self.ctx);
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Coefficients of f(a + t) in t, computed by the synthetic Horner
    /// scheme; exact up to the tracked precision.
    pub fn taylor_shift(&self, a: &PadicElem) -> PPoly {
        let mut out = self.c.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = out[j + 1].mul(a);
                out[j] = out[j].add(&t);
            }
        }
        PPoly::new(&self.ctx, out)
    }

    /// Valuation knowledge for every coefficient, ready for the Newton
    /// polygon.
    pub fn coeff_vals(&self) -> Vec<CoeffVal> {
        self.c
            .iter()
            .map(|c| {
                if c.is_exact_zero() {
                    CoeffVal::Zero
                } else {
                    match c.val_lower_bound() {
                        ValOrInf::Infinite => CoeffVal::Zero,
                        ValOrInf::Finite(v) => {
                            if c.is_bigo() {
                                CoeffVal::AtLeast(v)
                            } else {
                                CoeffVal::Exact(v)
                            }
                        }
                    }
                }
            })
            .collect()
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        NewtonPolygon::certified(&self.coeff_vals())
    }

    /// Certified minimum coefficient valuation. An unknown-zero coefficient
    /// is harmless as long as its bound sits at or above the minimum of the
    /// exactly known ones.
    pub fn min_valuation(&self) -> Result<ValOrInf> {
        let mut best = ValOrInf::Infinite;
        for c in &self.c {
            if !c.is_bigo() {
                if let Ok(v) = c.valuation() {
                    best = best.min(v);
                }
            }
        }
        for c in &self.c {
            if c.is_bigo() && c.val_lower_bound() < best {
                return Err(Error::PrecisionExhausted(
                    "minimum coefficient valuation not certified".into(),
                ));
            }
        }
        Ok(best)
    }

    /// Reduce coefficientwise to the residue field. Requires every
    /// coefficient to have certified valuation >= 0.
    pub fn reduce(&self) -> Result<FFPoly> {
        let mut out = vec![];
        for c in &self.c {
            out.push(c.residue().map_err(|e| match e {
                Error::NegativeValuation => Error::PrecisionExhausted(
                    "reducing a polynomial with a negative-valuation coefficient".into(),
                ),
                e => e,
            })?);
        }
        Ok(FFPoly::new(&self.ctx, out))
    }

    /// Largest index whose coefficient is certified nonzero.
    pub fn certified_degree(&self) -> Result<usize> {
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_exact_zero() {
                continue;
            }
            if c.is_bigo() {
                return Err(Error::PrecisionExhausted(format!(
                    "leading coefficient {i} indistinguishable from zero"
                )));
            }
            return Ok(i);
        }
        Err(Error::ZeroPolynomial)
    }

    pub fn embed(&self, emb: &TowerEmbedding) -> PPoly {
        PPoly::new(
            emb.to_ctx(),
            self.c.iter().map(|c| emb.map(c)).collect(),
        )
    }

    /// Truncate every coefficient's knowledge at absolute pi position `end`.
    pub fn truncate_to(&self, end: i64) -> PPoly {
        PPoly::new(
            &self.ctx,
            self.c.iter().map(|c| c.truncate_to(end)).collect(),
        )
    }
}

/// Taylor coefficients a_0..a_max of the quotient num/den around 0, valid
/// when den(0) is a certified unit of the disk (no zero of den nearby is the
/// caller's responsibility).
pub fn series_quotient(num: &PPoly, den: &PPoly, max: usize) -> Result<Vec<PadicElem>> {
    let d0 = den.coeff(0);
    let d0_inv = d0.inv().map_err(|_| {
        Error::PrecisionExhausted("series quotient: constant term of denominator unknown".into())
    })?;
    let mut out: Vec<PadicElem> = Vec::with_capacity(max + 1);
    for i in 0..=max {
        // a_i = (n_i - sum_{j<i} a_j d_{i-j}) / d_0
        let mut acc = num.coeff(i);
        for (j, a) in out.iter().enumerate() {
            acc = acc.sub(&a.mul(&den.coeff(i - j)));
        }
        out.push(acc.mul(&d0_inv));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use crate::rational::{q_int, QPoly};
    use crate::val::val_int;

    fn q3() -> Ctx {
        FieldContext::new(3, 1, 1, 32).unwrap()
    }

    #[test]
    fn shift_and_eval_agree_with_rationals() {
        let ctx = q3();
        let f = QPoly::from_ints(&[2, -1, 0, 5]);
        let pf = PPoly::from_rational_poly(&ctx, &f);
        let a = q_int(4);
        let shifted = pf.taylor_shift(&PadicElem::from_rational(&ctx, &a));
        let expect = PPoly::from_rational_poly(&ctx, &f.taylor_shift(&a));
        for i in 0..4 {
            let d = shifted.coeff(i).sub(&expect.coeff(i));
            assert!(d.is_exact_zero() || d.is_bigo());
        }
    }

    #[test]
    fn newton_polygon_of_tower_poly() {
        let ctx = q3();
        // -z^3 + z^2 + 9
        let f = PPoly::from_rational_poly(&ctx, &QPoly::from_ints(&[9, 0, 1, -1]));
        let np = f.newton_polygon().unwrap();
        assert_eq!(np.segments, vec![(val_int(-1), 2), (val_int(0), 1)]);
    }

    #[test]
    fn reduce_requires_nonnegative_valuations() {
        let ctx = q3();
        let f = PPoly::from_rational_poly(&ctx, &QPoly::from_ints(&[1, 3, 9]));
        let red = f.reduce().unwrap();
        assert_eq!(red, FFPoly::from_ints(&ctx, &[1]));
        let g = PPoly::new(
            &ctx,
            vec![PadicElem::from_rational(
                &ctx,
                &crate::rational::q_ratio(1, 3),
            )],
        );
        assert!(g.reduce().is_err());
    }

    #[test]
    fn series_quotient_matches_geometric_series() {
        let ctx = q3();
        // 1 / (1 - 3t) = 1 + 3t + 9t^2 + ...
        let num = PPoly::one(&ctx);
        let den = PPoly::from_rational_poly(&ctx, &QPoly::from_ints(&[1, -3]));
        let q = series_quotient(&num, &den, 4).unwrap();
        for (i, a) in q.iter().enumerate() {
            let expect = PadicElem::from_int(&ctx, 3i64.pow(i as u32));
            let d = a.sub(&expect);
            assert!(d.is_exact_zero() || d.is_bigo());
        }
    }

    #[test]
    fn rescale_shifts_valuations() {
        let ctx = q3();
        let f = PPoly::from_rational_poly(&ctx, &QPoly::from_ints(&[1, 1, 1]));
        let g = f.rescale_pi(2); // f(9t) at w=1
        assert_eq!(
            g.coeff(2).valuation().unwrap(),
            ValOrInf::Finite(val_int(4))
        );
    }
}
