//! Isolation of the roots of a square-free polynomial over the tower.
//!
//! The procedure walks the Newton polygon: each segment is rescaled so its
//! roots become units, the reduction is factored over the residue field,
//! simple residual roots are lifted by Newton iteration, irreducible
//! residual factors trigger an unramified extension, fractional slopes a
//! ramified one, and residual roots of multiplicity two or more recurse on
//! the shifted polynomial. Every root comes back as an exact tower element
//! in one common extension context.

use crate::error::{Error, Result};
use crate::field::Ctx;
use crate::ffpoly::ResidueEmbedding;
use crate::padic::{PadicElem, TowerEmbedding};
use crate::ppoly::PPoly;
use crate::rational::QPoly;
use crate::val::{Val, ValOrInf};

#[derive(Debug, Clone)]
pub struct RootIsolation {
    /// Common extension context containing every root.
    pub ctx: Ctx,
    /// The isolated roots; input square-free, so all simple.
    pub roots: Vec<PadicElem>,
}

/// Isolate all roots of a square-free rational polynomial in an extension
/// of `base`.
pub fn isolate_roots(base: &Ctx, f: &QPoly) -> Result<RootIsolation> {
    debug_assert!(
        f.gcd(&f.derivative()).degree() == 0,
        "isolate_roots expects square-free input"
    );
    let pf = PPoly::from_rational_poly(base, f);
    isolate_roots_ppoly(&pf)
}

/// Isolate all roots of a square-free polynomial with tower coefficients.
pub fn isolate_roots_ppoly(f: &PPoly) -> Result<RootIsolation> {
    let deg = f.certified_degree()?;
    // a single root generates ramification at most deg over the base; a
    // wildly ramified cluster whose splitting needs more than that cannot
    // be separated in these towers and is reported unsupported
    let max_w = f.ctx().ram_index() * lcm_upto(deg.max(1) as u64);
    let mut iso = Iso {
        ctx: f.ctx().clone(),
        max_w,
        depth_cap: 4 * f.ctx().precision() + 8,
    };
    let roots = roots_into(&mut iso, f, false, 0)?;
    if roots.len() != deg {
        return Err(Error::FactorizationUnsupported(format!(
            "isolated {} of {} roots",
            roots.len(),
            deg
        )));
    }
    Ok(RootIsolation {
        ctx: iso.ctx,
        roots,
    })
}

fn lcm_upto(n: u64) -> u64 {
    (1..=n).fold(1u64, num_integer::lcm)
}

struct Iso {
    ctx: Ctx,
    max_w: u64,
    depth_cap: usize,
}

impl Iso {
    fn sync_poly(&self, f: &PPoly) -> Result<PPoly> {
        if f.ctx() == &self.ctx {
            Ok(f.clone())
        } else {
            Ok(f.embed(&TowerEmbedding::new(f.ctx(), &self.ctx)?))
        }
    }

    fn sync_elem(&self, x: &PadicElem) -> Result<PadicElem> {
        if x.ctx() == &self.ctx {
            Ok(x.clone())
        } else {
            Ok(TowerEmbedding::new(x.ctx(), &self.ctx)?.map(x))
        }
    }

    fn sync_all(&self, xs: &mut [PadicElem]) -> Result<()> {
        for x in xs {
            *x = self.sync_elem(x)?;
        }
        Ok(())
    }

    fn grow_unram(&mut self, factor: usize) -> Result<()> {
        if factor > 1 {
            self.ctx = self.ctx.extend_unramified(factor)?;
        }
        Ok(())
    }

    fn grow_ram(&mut self, factor: u64) -> Result<()> {
        if factor > 1 {
            if self.ctx.ram_index() * factor > self.max_w {
                return Err(Error::FactorizationUnsupported(format!(
                    "root cluster needs ramification index beyond {}; \
                     the splitting field is not reachable in these towers",
                    self.max_w
                )));
            }
            self.ctx = self.ctx.extend_ramified(factor)?;
        }
        Ok(())
    }
}

/// Roots of f, restricted to valuation > 0 when `only_positive`.
fn roots_into(
    iso: &mut Iso,
    f: &PPoly,
    only_positive: bool,
    depth: usize,
) -> Result<Vec<PadicElem>> {
    if depth > iso.depth_cap {
        return Err(Error::PrecisionExhausted(
            "root isolation recursion exceeded the digit budget".into(),
        ));
    }
    let f = iso.sync_poly(f)?;
    let (zero_roots, bigo_root, segments) = trimmed_segments(&f)?;
    let mut out: Vec<PadicElem> = vec![];
    if zero_roots > 0 {
        // square-free input: exactly one root at zero
        out.push(PadicElem::zero(&iso.ctx));
    }
    if let Some(m) = bigo_root {
        // a root indistinguishable from zero at the current precision
        if only_positive && m <= 0 {
            return Err(Error::PrecisionExhausted(
                "cannot certify the side of a near-zero root".into(),
            ));
        }
        out.push(PadicElem::BigO {
            ctx: iso.ctx.clone(),
            m,
        });
    }
    for (slope, len) in segments {
        let rv = -slope;
        if only_positive && rv <= Val::from_integer(0) {
            continue;
        }
        let segment = segment_roots(iso, &f, rv, len, depth)?;
        iso.sync_all(&mut out)?;
        out.extend(segment);
    }
    Ok(out)
}

/// Valuation data of a polynomial, split off its near-zero part: exact zero
/// roots at the bottom, an optional root only bounded from below (its
/// pi-position bound), and the certified polygon segments of the rest.
pub(crate) type TrimmedSegments = (usize, Option<i64>, Vec<(Val, usize)>);

/// Decompose the valuation data of f. Fails rather than guess when an
/// unknown coefficient could bend the hull.
pub(crate) fn trimmed_segments(f: &PPoly) -> Result<TrimmedSegments> {
    use crate::newton::{CoeffVal, NewtonPolygon};
    let coeffs = f.coeff_vals();
    if coeffs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let mut idx = 0;
    let mut zero_roots = 0;
    while idx < coeffs.len() && matches!(coeffs[idx], CoeffVal::Zero) {
        zero_roots += 1;
        idx += 1;
    }
    if zero_roots > 1 {
        return Err(Error::FactorizationUnsupported(
            "repeated zero root in a square-free isolation".into(),
        ));
    }
    let mut bigo_bound: Option<Val> = None;
    while idx < coeffs.len() {
        match coeffs[idx] {
            CoeffVal::AtLeast(b) => {
                if bigo_bound.is_some() {
                    return Err(Error::PrecisionExhausted(
                        "several low coefficients indistinguishable from zero".into(),
                    ));
                }
                bigo_bound = Some(b);
                idx += 1;
            }
            _ => break,
        }
    }
    if idx == coeffs.len() {
        return Err(Error::PrecisionExhausted(
            "no coefficient with certified valuation".into(),
        ));
    }
    let np = NewtonPolygon::certified(&coeffs[idx..])?;
    let v_first = match coeffs[idx] {
        CoeffVal::Exact(v) => v,
        _ => unreachable!("tail starts at an exact coefficient"),
    };
    let bigo_root = match bigo_bound {
        None => None,
        Some(b) => {
            let gap = b - v_first; // lower bound on the near-zero root's valuation
            if let Some(&(s1, _)) = np.segments.first() {
                // the implied steep first segment must not undercut the hull
                if -gap > s1 {
                    return Err(Error::PrecisionExhausted(
                        "near-zero coefficient bound too weak to separate the hull".into(),
                    ));
                }
            }
            let m = gap * Val::from_integer(f.ctx().ram_index() as i64);
            debug_assert_eq!(*m.denom(), 1);
            Some(m.to_integer())
        }
    };
    Ok((zero_roots, bigo_root, np.segments))
}

/// Roots of f with exact valuation rv (one polygon segment).
fn segment_roots(
    iso: &mut Iso,
    f: &PPoly,
    rv: Val,
    len: usize,
    depth: usize,
) -> Result<Vec<PadicElem>> {
    // make pi^(w * rv) representable
    let scaled = rv * Val::from_integer(iso.ctx.ram_index() as i64);
    if *scaled.denom() != 1 {
        iso.grow_ram(*scaled.denom() as u64)?;
    }
    let f = iso.sync_poly(f)?;
    let e = (rv * Val::from_integer(iso.ctx.ram_index() as i64)).to_integer();
    // g(t) = f(pi^e t) with unit content: its valuation-zero roots are the
    // segment's roots rescaled
    let g = f.rescale_pi(e);
    let mv = match g.min_valuation()? {
        ValOrInf::Finite(v) => v,
        ValOrInf::Infinite => return Err(Error::ZeroPolynomial),
    };
    let shift = (mv * Val::from_integer(iso.ctx.ram_index() as i64)).to_integer();
    let g = g.shift_all(-shift);
    let gbar = g.reduce()?;
    let mut out: Vec<PadicElem> = vec![];
    for (h, mult) in gbar.factor() {
        if h.coeff(0).is_zero() {
            // the t^j factor belongs to higher-valuation segments
            continue;
        }
        iso.grow_unram(h.degree())?;
        let g = iso.sync_poly(&g)?;
        let emb = ResidueEmbedding::new(h.ctx(), &iso.ctx)?;
        let h_up = emb.map_poly(&h);
        let res_roots = h_up.roots_in_field();
        if res_roots.len() != h.degree() {
            return Err(Error::FactorizationUnsupported(
                "residual factor did not split in its own splitting field".into(),
            ));
        }
        for (cbar, _) in res_roots {
            iso.sync_all(&mut out)?;
            let g = iso.sync_poly(&g)?;
            let lift = iso.sync_elem(&PadicElem::lift(&cbar))?;
            if mult == 1 {
                let t0 = hensel_root(&g, &lift)?;
                out.push(t0.shift(seg_e(iso, rv)));
            } else {
                // cluster: recurse on the shifted polynomial, keeping only
                // the roots strictly inside the residual disk
                let g2 = g.taylor_shift(&lift);
                let inner = roots_into(iso, &g2, true, depth + 1)?;
                iso.sync_all(&mut out)?;
                let lift = iso.sync_elem(&lift)?;
                for t1 in inner {
                    out.push(lift.add(&t1).shift(seg_e(iso, rv)));
                }
            }
        }
    }
    if out.len() != len {
        return Err(Error::FactorizationUnsupported(format!(
            "segment of length {len} yielded {} roots",
            out.len()
        )));
    }
    Ok(out)
}

/// e = w * rv in the current context (integral by construction).
fn seg_e(iso: &Iso, rv: Val) -> i64 {
    (rv * Val::from_integer(iso.ctx.ram_index() as i64)).to_integer()
}

/// Newton iteration from an approximation whose residue is a simple root of
/// the reduction.
pub fn hensel_root(f: &PPoly, start: &PadicElem) -> Result<PadicElem> {
    let ctx = f.ctx().clone();
    let deriv = f.derivative();
    let mut x = start.clone();
    let iterations = ctx.precision().ilog2() as usize + 4;
    for _ in 0..iterations {
        let fx = f.eval(&x);
        if fx.is_exact_zero() || fx.is_bigo() {
            return Ok(x);
        }
        let dfx = deriv.eval(&x);
        x = x.sub(&fx.div(&dfx)?);
    }
    let fx = f.eval(&x);
    if fx.is_exact_zero() || fx.is_bigo() {
        Ok(x)
    } else {
        Err(Error::PrecisionExhausted(
            "newton iteration did not certify a root".into(),
        ))
    }
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

    fn vals_of(iso: &RootIsolation) -> Vec<ValOrInf> {
        let mut v: Vec<ValOrInf> = iso
            .roots
            .iter()
            .map(|r| r.valuation().unwrap())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn fixed_point_polynomial_of_interior_identity() {
        // -z^3 + z^2 + 9 over Q_3: two roots of valuation 1 (in the
        // unramified quadratic extension) and one unit root
        let iso = isolate_roots(&q3(), &QPoly::from_ints(&[9, 0, 1, -1])).unwrap();
        assert_eq!(iso.ctx.residue_order(), 9);
        assert_eq!(
            vals_of(&iso),
            vec![
                ValOrInf::Finite(val_int(0)),
                ValOrInf::Finite(val_int(1)),
                ValOrInf::Finite(val_int(1))
            ]
        );
        // every root must vanish to full precision
        let f = PPoly::from_rational_poly(&iso.ctx, &QPoly::from_ints(&[9, 0, 1, -1]));
        for r in &iso.roots {
            let v = f.eval(r);
            assert!(v.is_bigo() || v.is_exact_zero());
        }
    }

    #[test]
    fn teichmueller_roots() {
        // z^p - z splits over Q_p with distinct residues
        for p in [2u64, 3, 5] {
            let ctx = FieldContext::new(p, 1, 1, 32).unwrap();
            let mut coeffs = vec![0i64; p as usize + 1];
            coeffs[1] = -1;
            coeffs[p as usize] = 1;
            let iso = isolate_roots(&ctx, &QPoly::from_ints(&coeffs)).unwrap();
            assert_eq!(iso.roots.len(), p as usize);
            assert_eq!(iso.ctx.residue_order(), p as u128);
            let mut residues: Vec<u128> = iso
                .roots
                .iter()
                .map(|r| r.residue().unwrap().index())
                .collect();
            residues.sort();
            assert_eq!(residues, (0..p as u128).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ramified_roots_of_z2_minus_3() {
        // z^2 - 3 needs the Eisenstein extension; roots are +-pi exactly
        let iso = isolate_roots(&q3(), &QPoly::from_ints(&[-3, 0, 1])).unwrap();
        assert_eq!(iso.ctx.ram_index(), 2);
        assert_eq!(
            vals_of(&iso),
            vec![
                ValOrInf::Finite(Val::new(1, 2)),
                ValOrInf::Finite(Val::new(1, 2))
            ]
        );
    }

    #[test]
    fn cluster_splitting_at_p2() {
        // -z^3 + z^2 + 4 over Q_2: residual double root splits on recursion;
        // z = 2 is an exact root
        let ctx = FieldContext::new(2, 1, 1, 32).unwrap();
        let f = QPoly::from_ints(&[4, 0, 1, -1]);
        let iso = isolate_roots(&ctx, &f).unwrap();
        assert_eq!(iso.roots.len(), 3);
        let pf = PPoly::from_rational_poly(&iso.ctx, &f);
        for r in &iso.roots {
            let v = pf.eval(r);
            assert!(v.is_bigo() || v.is_exact_zero());
        }
        // one root is exactly 2
        let two = PadicElem::from_int(&iso.ctx, 2);
        assert!(iso
            .roots
            .iter()
            .any(|r| r.sub(&two).is_exact_zero() || r.sub(&two).is_bigo()));
    }

    #[test]
    fn rational_roots_reproduced() {
        // (z-1)(z-4)(z+2), all rational
        let f = QPoly::from_ints(&[-1, 1])
            .mul(&QPoly::from_ints(&[-4, 1]))
            .mul(&QPoly::from_ints(&[2, 1]));
        let iso = isolate_roots(&q3(), &f).unwrap();
        assert_eq!(iso.roots.len(), 3);
        for expect in [1i64, 4, -2] {
            let e = PadicElem::from_int(&iso.ctx, expect);
            assert!(iso.roots.iter().any(|r| {
                let d = r.sub(&e);
                d.is_exact_zero() || d.is_bigo()
            }));
        }
        let _ = q_int(0);
    }

    #[test]
    fn zero_root_detected() {
        let iso = isolate_roots(&q3(), &QPoly::from_ints(&[0, 3, 1])).unwrap();
        assert!(iso.roots.iter().any(|r| r.is_exact_zero()));
        assert_eq!(iso.roots.len(), 2);
    }
}
