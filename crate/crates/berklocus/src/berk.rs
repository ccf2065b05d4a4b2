//! Points of the Berkovich projective line and the action of rational maps.
//!
//! Type-1 points are classical values; a type-2 point is a closed disk
//! D(center, p^rlog) with rational log-radius rlog. Radii outside p^Q
//! (type-3 points) and nested-disk limits (type-4 points) are not
//! representable. Joins, the big metric, seminorms, images of points,
//! multiplicities and direction classification all reduce to exact
//! valuation arithmetic on shifted polynomials.

use crate::error::{Error, Result};
use crate::field::{Ctx, ResPoint};
use crate::padic::PadicElem;
use crate::ppoly::{series_quotient, PPoly};
use crate::ratmap::{MobiusMap, ProjValue, RationalMap, ResidualMap};
use crate::roots::trimmed_segments;
use crate::val::{Val, ValOrInf};

#[derive(Clone, Debug)]
pub enum BerkPoint {
    Type1(ProjValue),
    Type2 { center: PadicElem, rlog: Val },
}

impl BerkPoint {
    pub fn gauss(ctx: &Ctx) -> BerkPoint {
        BerkPoint::Type2 {
            center: PadicElem::zero(ctx),
            rlog: Val::from_integer(0),
        }
    }

    pub fn type2(center: PadicElem, rlog: Val) -> BerkPoint {
        BerkPoint::Type2 { center, rlog }
    }

    pub fn infinity() -> BerkPoint {
        BerkPoint::Type1(ProjValue::Infinity)
    }

    pub fn from_value(v: PadicElem) -> BerkPoint {
        BerkPoint::Type1(ProjValue::Finite(v))
    }

    pub fn is_type2(&self) -> bool {
        matches!(self, BerkPoint::Type2 { .. })
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, BerkPoint::Type1(ProjValue::Infinity))
    }

    pub fn rlog(&self) -> Option<Val> {
        match self {
            BerkPoint::Type2 { rlog, .. } => Some(*rlog),
            BerkPoint::Type1(_) => None,
        }
    }

    /// Certified equality. Two type-2 points agree iff the log-radii match
    /// and the centers differ by at most the radius.
    pub fn same_point(&self, other: &BerkPoint) -> Result<bool> {
        match (self, other) {
            (
                BerkPoint::Type2 { center: c1, rlog: e1 },
                BerkPoint::Type2 { center: c2, rlog: e2 },
            ) => {
                if e1 != e2 {
                    return Ok(false);
                }
                c1.sub(c2).val_at_least(-*e1)
            }
            (BerkPoint::Type1(ProjValue::Infinity), BerkPoint::Type1(ProjValue::Infinity)) => {
                Ok(true)
            }
            (BerkPoint::Type1(ProjValue::Finite(a)), BerkPoint::Type1(ProjValue::Finite(b))) => {
                let d = a.sub(b);
                if d.is_exact_zero() {
                    Ok(true)
                } else if d.is_bigo() {
                    Err(Error::PrecisionExhausted(
                        "type-1 equality indistinguishable at working precision".into(),
                    ))
                } else {
                    Ok(false)
                }
            }
            _ => Ok(false),
        }
    }
}

impl std::fmt::Display for BerkPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BerkPoint::Type1(ProjValue::Infinity) => write!(f, "inf"),
            BerkPoint::Type1(ProjValue::Finite(v)) => write!(f, "{v}"),
            BerkPoint::Type2 { center, rlog } => {
                write!(f, "zeta({center}, rlog {rlog})")
            }
        }
    }
}

/// A direction (tangent vector) at a type-2 point, labelled by a point of
/// the residue projective line via the affine identification
/// z -> center + pi^(w rlog) z.
#[derive(Clone, Debug)]
pub struct Direction {
    pub base: BerkPoint,
    pub label: ResPoint,
}

impl Direction {
    pub fn new(base: BerkPoint, label: ResPoint) -> Result<Direction> {
        if !base.is_type2() {
            return Err(Error::Config("directions live at type-2 points".into()));
        }
        Ok(Direction { base, label })
    }

    /// Directional multiplicity of the map along this direction.
    pub fn multiplicity(&self, map: &RationalMap) -> Result<usize> {
        directional_multiplicity(map, &self.base, &self.label)
    }

    /// Good/bad dichotomy for this direction under the map.
    pub fn classify(&self, map: &RationalMap) -> Result<DirClass> {
        classify_direction(map, &self.base, &self.label)
    }

    /// The type-2 point one rlog step into the direction.
    pub fn step(&self, step: Val) -> Result<BerkPoint> {
        step_into_direction(&self.base, &self.label, step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rho {
    Finite(Val),
    Infinite,
}

/// The unique path between two points of the tree. Arcs are never
/// materialized as point sets; membership and length reduce to joins and
/// the metric.
#[derive(Clone, Debug)]
pub struct Arc {
    pub from: BerkPoint,
    pub to: BerkPoint,
}

impl Arc {
    pub fn new(from: BerkPoint, to: BerkPoint) -> Arc {
        Arc { from, to }
    }

    /// Path length under the big metric; finite iff both endpoints are
    /// type 2.
    pub fn length(&self) -> Result<Rho> {
        big_metric(&self.from, &self.to)
    }

    /// Certified membership through metric additivity.
    pub fn contains(&self, p: &BerkPoint) -> Result<bool> {
        if p.same_point(&self.from)? || p.same_point(&self.to)? {
            return Ok(true);
        }
        on_arc(&self.from, p, &self.to)
    }
}

/// Join x v_inf y: the smallest closed disk containing both points (the
/// meeting point of the arcs to infinity). Inputs must not be infinity.
pub fn join(x: &BerkPoint, y: &BerkPoint) -> Result<BerkPoint> {
    let (cx, ex) = decompose(x)?;
    let (cy, ey) = decompose(y)?;
    let base = match (ex, ey) {
        (None, None) => None,
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (Some(a), Some(b)) => Some(a.max(b)),
    };
    let diff = cx.sub(cy);
    if diff.is_exact_zero() {
        return Ok(match base {
            None => x.clone(), // identical type-1 points
            Some(e) => BerkPoint::type2(cx.clone(), e),
        });
    }
    match diff.valuation() {
        Ok(ValOrInf::Finite(v)) => {
            let dist = -v;
            let e = match base {
                None => dist,
                Some(b) => b.max(dist),
            };
            Ok(BerkPoint::type2(cx.clone(), e))
        }
        Ok(ValOrInf::Infinite) => unreachable!("exact zero handled above"),
        Err(err) => {
            // difference indistinguishable from zero: certified only when a
            // radius already dominates the distance bound
            if let (ValOrInf::Finite(bound), Some(b)) = (diff.val_lower_bound(), base) {
                if -bound <= b {
                    return Ok(BerkPoint::type2(cx.clone(), b));
                }
            }
            Err(err)
        }
    }
}

fn decompose(x: &BerkPoint) -> Result<(&PadicElem, Option<Val>)> {
    match x {
        BerkPoint::Type1(ProjValue::Infinity) => Err(Error::Config(
            "join/metric undefined with the point at infinity; flip first".into(),
        )),
        BerkPoint::Type1(ProjValue::Finite(v)) => Ok((v, None)),
        BerkPoint::Type2 { center, rlog } => Ok((center, Some(*rlog))),
    }
}

/// The unique point on all three pairwise arcs: the deepest of the three
/// pairwise joins.
pub fn median(a: &BerkPoint, b: &BerkPoint, c: &BerkPoint) -> Result<BerkPoint> {
    let jab = join(a, b)?;
    let jac = join(a, c)?;
    let jbc = join(b, c)?;
    let key = |p: &BerkPoint| match p.rlog() {
        None => (0u8, Val::from_integer(0)),
        Some(e) => (1u8, e),
    };
    let mut best = jab;
    for cand in [jac, jbc] {
        if key(&cand) < key(&best) {
            best = cand;
        }
    }
    Ok(best)
}

/// The big metric rho(x,y) = 2 rlog(join) - rlog(x) - rlog(y); infinite as
/// soon as a type-1 point is involved.
pub fn big_metric(x: &BerkPoint, y: &BerkPoint) -> Result<Rho> {
    match (x, y) {
        (BerkPoint::Type2 { rlog: ex, .. }, BerkPoint::Type2 { rlog: ey, .. }) => {
            let j = join(x, y)?;
            let ej = j.rlog().expect("join of type-2 points is type-2");
            Ok(Rho::Finite(ej + ej - ex - ey))
        }
        _ => Ok(Rho::Infinite),
    }
}

/// Certified test that y lies on the arc [x, z], via additivity of rho.
pub fn on_arc(x: &BerkPoint, y: &BerkPoint, z: &BerkPoint) -> Result<bool> {
    match (big_metric(x, z)?, big_metric(x, y)?, big_metric(y, z)?) {
        (Rho::Finite(xz), Rho::Finite(xy), Rho::Finite(yz)) => Ok(xz == xy + yz),
        _ => Err(Error::Config("arc membership needs type-2 points".into())),
    }
}

/// log_p |f|_zeta for a polynomial: max over j of (log_p|c_j| + j rlog) on
/// the shifted coefficients.
pub fn seminorm_poly(f: &PPoly, zeta: &BerkPoint) -> Result<Val> {
    let (center, rlog) = match zeta {
        BerkPoint::Type2 { center, rlog } => (center, *rlog),
        BerkPoint::Type1(_) => {
            return Err(Error::Config("seminorm evaluation needs a type-2 point".into()))
        }
    };
    let shifted = f.taylor_shift(center);
    let mut best: Option<Val> = None;
    for (j, c) in shifted.coeffs().iter().enumerate() {
        if c.is_exact_zero() || c.is_bigo() {
            continue;
        }
        if let ValOrInf::Finite(v) = c.valuation()? {
            let term = -v + Val::from_integer(j as i64) * rlog;
            best = Some(match best {
                None => term,
                Some(b) => b.max(term),
            });
        }
    }
    let best = best.ok_or_else(|| {
        Error::PrecisionExhausted("no certified term in seminorm evaluation".into())
    })?;
    // partially known coefficients must not be able to exceed the max
    for (j, c) in shifted.coeffs().iter().enumerate() {
        if c.is_bigo() {
            if let ValOrInf::Finite(b) = c.val_lower_bound() {
                if -b + Val::from_integer(j as i64) * rlog > best {
                    return Err(Error::PrecisionExhausted(
                        "seminorm dominated by an uncertified coefficient".into(),
                    ));
                }
            }
        }
    }
    Ok(best)
}

/// log_p |phi|_zeta for a rational map.
pub fn seminorm_map(map: &RationalMap, zeta: &BerkPoint) -> Result<Val> {
    Ok(seminorm_poly(map.num(), zeta)? - seminorm_poly(map.den(), zeta)?)
}

/// Number of roots of f (shifted data) with valuation >= bound, certified.
fn count_roots_val_ge(f: &PPoly, bound: Val) -> Result<usize> {
    let (zeros, bigo, segments) = trimmed_segments(f)?;
    let mut count = zeros; // exact roots at the center have valuation inf
    if let Some(m) = bigo {
        let gap = Val::new(m, f.ctx().ram_index() as i64);
        if gap >= bound {
            count += 1;
        } else {
            return Err(Error::PrecisionExhausted(
                "near-zero root cannot be placed relative to the disk".into(),
            ));
        }
    }
    for (slope, len) in segments {
        if -slope >= bound {
            count += len;
        }
    }
    Ok(count)
}

/// Number of roots with valuation > bound (open disk), certified.
fn count_roots_val_gt(f: &PPoly, bound: Val) -> Result<usize> {
    let (zeros, bigo, segments) = trimmed_segments(f)?;
    let mut count = zeros;
    if let Some(m) = bigo {
        let gap = Val::new(m, f.ctx().ram_index() as i64);
        if gap > bound {
            count += 1;
        } else {
            return Err(Error::PrecisionExhausted(
                "near-zero root cannot be placed relative to the open disk".into(),
            ));
        }
    }
    for (slope, len) in segments {
        if -slope > bound {
            count += len;
        }
    }
    Ok(count)
}

/// Image of a type-2 point under the map. Pole-free disks map by the
/// truncated Taylor expansion of the quotient; when the denominator
/// vanishes somewhere on the disk the image center is found by a certified
/// digit descent on the seminorm |phi - c|_zeta.
pub fn image_of_point(map: &RationalMap, zeta: &BerkPoint) -> Result<BerkPoint> {
    let (center, rlog) = match zeta {
        BerkPoint::Type2 { center, rlog } => (center.clone(), *rlog),
        BerkPoint::Type1(_) => {
            return Err(Error::Config("image_of_point expects a type-2 point".into()))
        }
    };
    let den_shift = map.den().taylor_shift(&center);
    let poles = if map.den().degree_bound() == 0 {
        0
    } else {
        count_roots_val_ge(&den_shift, -rlog)?
    };
    if poles == 0 {
        let num_shift = map.num().taylor_shift(&center);
        return disk_image(map, &num_shift, &den_shift, rlog);
    }
    image_by_descent(map, &center, rlog)
}

/// Image point when the disk contains a pole. Maintains a candidate center
/// c and the exact level T = log|phi - c|_zeta; the reduction of
/// (phi - c)/pi^(wT) in the source chart is either a nonzero constant (then
/// the image center agrees with c one digit further in that direction) or
/// nonconstant (then c lies in the image disk and T is its log-diameter).
fn image_by_descent(map: &RationalMap, center: &PadicElem, rlog: Val) -> Result<BerkPoint> {
    let ctx = map.ctx().clone();
    let w = ctx.ram_index() as i64;
    let grid = rlog * Val::from_integer(w);
    if *grid.denom() != 1 {
        return Err(Error::InsufficientTower(format!(
            "image of a disk containing a pole needs log-radius {rlog} on the (1/{w})Z grid"
        )));
    }
    let we = -grid.to_integer();
    // denominator in the source chart, with unit content
    let den_chart = map.den().taylor_shift(center).rescale_pi(we);
    let den_unit = unit_content(&den_chart)?;
    let den_red = den_unit.reduce()?;
    let mut c = PadicElem::zero(&ctx);
    let steps = 2 * ctx.precision() * ctx.ram_index() as usize + 8;
    for _ in 0..steps {
        let shifted = map.num().sub(&map.den().scale(&c));
        let num_chart = shifted.taylor_shift(center).rescale_pi(we);
        let num_unit = unit_content(&num_chart)?;
        let num_red = num_unit.reduce()?;
        // h = (phi - c)/pi^(wT) has reduction num_red / den_red
        let h = crate::ratmap::ResidualMap::new(num_red, den_red.clone())?;
        if !h.is_constant() {
            // c lies in the image disk; T is the diameter
            let t_num = seminorm_poly_raw(&shifted, center, rlog)?;
            let t_den = seminorm_poly_raw(map.den(), center, rlog)?;
            return Ok(BerkPoint::type2(c, t_num - t_den));
        }
        let digit = match h.eval(&ResPoint::Finite(ctx.ff_zero())) {
            ResPoint::Finite(x) => x,
            ResPoint::Infinity => {
                return Err(Error::PrecisionExhausted(
                    "descent reduction degenerated to infinity".into(),
                ))
            }
        };
        let t_num = seminorm_poly_raw(&shifted, center, rlog)?;
        let t_den = seminorm_poly_raw(map.den(), center, rlog)?;
        // next digit of the image center sits at scale p^T
        let t = (t_num - t_den) * Val::from_integer(w);
        debug_assert_eq!(*t.denom(), 1);
        c = c.add(&PadicElem::lift(&digit).shift(-t.to_integer()));
    }
    Err(Error::CandidateExhausted(
        "image center descent exceeded the digit budget".into(),
    ))
}

fn unit_content(f: &PPoly) -> Result<PPoly> {
    let mv = match f.min_valuation()? {
        ValOrInf::Finite(v) => v,
        ValOrInf::Infinite => return Err(Error::ZeroPolynomial),
    };
    let shift = mv * Val::from_integer(f.ctx().ram_index() as i64);
    debug_assert_eq!(*shift.denom(), 1);
    Ok(f.shift_all(-shift.to_integer()))
}

fn seminorm_poly_raw(f: &PPoly, center: &PadicElem, rlog: Val) -> Result<Val> {
    seminorm_poly(
        f,
        &BerkPoint::Type2 {
            center: center.clone(),
            rlog,
        },
    )
}

/// Image disk from shifted numerator/denominator data: the quotient's
/// Taylor coefficients a_0..a_d determine D(a_0, s) with
/// log_p s = max_{1<=j<=d} (log_p|a_j| + j rlog).
fn disk_image(
    map: &RationalMap,
    num_shift: &PPoly,
    den_shift: &PPoly,
    rlog: Val,
) -> Result<BerkPoint> {
    let d = map.degree();
    let series = series_quotient(num_shift, den_shift, d)?;
    let center = series[0].clone();
    let mut best: Option<Val> = None;
    for (j, a) in series.iter().enumerate().skip(1) {
        if a.is_exact_zero() || a.is_bigo() {
            continue;
        }
        if let ValOrInf::Finite(v) = a.valuation()? {
            let term = -v + Val::from_integer(j as i64) * rlog;
            best = Some(match best {
                None => term,
                Some(b) => b.max(term),
            });
        }
    }
    let best = best.ok_or_else(|| {
        Error::PrecisionExhausted("image radius dominated by uncertified coefficients".into())
    })?;
    for (j, a) in series.iter().enumerate().skip(1) {
        if a.is_bigo() {
            if let ValOrInf::Finite(b) = a.val_lower_bound() {
                if -b + Val::from_integer(j as i64) * rlog > best {
                    return Err(Error::PrecisionExhausted(
                        "image radius dominated by an uncertified coefficient".into(),
                    ));
                }
            }
        }
    }
    Ok(BerkPoint::type2(center, best))
}

/// Moebius image of a Berkovich point (degree-1 disk geometry, exact).
pub fn mobius_image(sigma: &MobiusMap, zeta: &BerkPoint) -> Result<BerkPoint> {
    match zeta {
        BerkPoint::Type1(v) => Ok(BerkPoint::Type1(sigma.apply(v)?)),
        BerkPoint::Type2 { center, rlog } => {
            let [a, b, c, d] = &sigma.entries;
            if c.is_exact_zero() {
                // affine (az+b)/d
                let cen = a.mul(center).add(b).div(d)?;
                let scale = match a.div(d)?.valuation()? {
                    ValOrInf::Finite(v) => -v,
                    ValOrInf::Infinite => return Err(Error::Config("degenerate moebius".into())),
                };
                return Ok(BerkPoint::type2(cen, rlog + scale));
            }
            // sigma = a/c + (bc - ad)/c * 1/(cz + d)
            let u_center = c.mul(center).add(d);
            let u = BerkPoint::type2(u_center.clone(), {
                match c.valuation()? {
                    ValOrInf::Finite(v) => rlog - v,
                    ValOrInf::Infinite => unreachable!("c is not exact zero"),
                }
            });
            let inv = invert_point(&u)?;
            let bc_ad = b.mul(c).sub(&a.mul(d));
            let (icen, irlog) = match &inv {
                BerkPoint::Type2 { center, rlog } => (center, rlog),
                _ => unreachable!("inversion of type-2 is type-2"),
            };
            let scale_elem = bc_ad.div(c)?;
            let scale = match scale_elem.valuation()? {
                ValOrInf::Finite(v) => -v,
                ValOrInf::Infinite => return Err(Error::Config("degenerate moebius".into())),
            };
            let cen = a.div(c)?.add(&scale_elem.mul(icen));
            Ok(BerkPoint::type2(cen, irlog + scale))
        }
    }
}

/// Image of a type-2 point under z -> 1/z.
fn invert_point(zeta: &BerkPoint) -> Result<BerkPoint> {
    let (center, rlog) = match zeta {
        BerkPoint::Type2 { center, rlog } => (center, *rlog),
        _ => return Err(Error::Config("invert_point expects type-2".into())),
    };
    if center.val_at_least(-rlog).unwrap_or(false) || center.is_exact_zero() {
        // 0 lies in the disk: the image point is zeta_{0, -rlog}
        return Ok(BerkPoint::type2(PadicElem::zero(center.ctx()), -rlog));
    }
    match center.valuation() {
        Ok(ValOrInf::Finite(v)) if -v > rlog => {
            Ok(BerkPoint::type2(center.inv()?, rlog + v + v))
        }
        Ok(_) => Ok(BerkPoint::type2(PadicElem::zero(center.ctx()), -rlog)),
        Err(e) => Err(e),
    }
}

pub fn is_fixed_point(map: &RationalMap, zeta: &BerkPoint) -> Result<bool> {
    match zeta {
        BerkPoint::Type2 { .. } => {
            let image = image_of_point(map, zeta)?;
            image.same_point(zeta)
        }
        BerkPoint::Type1(ProjValue::Infinity) => {
            let (dn, dd) = map.part_degrees()?;
            Ok(dn > dd)
        }
        BerkPoint::Type1(ProjValue::Finite(v)) => match map.eval(v)? {
            ProjValue::Infinity => Ok(false),
            ProjValue::Finite(w) => {
                let d = w.sub(v);
                if d.is_exact_zero() {
                    Ok(true)
                } else if d.is_bigo() {
                    Err(Error::PrecisionExhausted(
                        "fixedness indistinguishable at working precision".into(),
                    ))
                } else {
                    Ok(false)
                }
            }
        },
    }
}

/// The affine map sending the Gauss point to the given type-2 point;
/// requires the log-radius to live on the tower's value grid.
pub fn gauss_to(zeta: &BerkPoint) -> Result<MobiusMap> {
    let (center, rlog) = match zeta {
        BerkPoint::Type2 { center, rlog } => (center, *rlog),
        _ => return Err(Error::Config("gauss_to expects a type-2 point".into())),
    };
    let w = center.ctx().ram_index() as i64;
    let scaled = rlog * Val::from_integer(w);
    if *scaled.denom() != 1 {
        return Err(Error::InsufficientTower(format!(
            "log-radius {rlog} is not on the (1/{w})Z grid; extend the ramification index"
        )));
    }
    // scale by pi^(-w rlog): |pi^(-w rlog)| = p^rlog = radius
    Ok(MobiusMap::affine(center, -scaled.to_integer()))
}

/// tau'^{-1} . phi . tau where tau sends Gauss to zeta and tau' sends Gauss
/// to phi(zeta): the local chart in which zeta and its image both sit at
/// the Gauss point.
fn chart_at(map: &RationalMap, zeta: &BerkPoint) -> Result<RationalMap> {
    let tau = gauss_to(zeta)?;
    let image = image_of_point(map, zeta)?;
    let tau_img = gauss_to(&image)?;
    map.sandwich(&tau_img.inverse(), &tau)
}

/// Local multiplicity m_phi(zeta) = degree of the reduction in the local
/// chart.
pub fn multiplicity_at(map: &RationalMap, zeta: &BerkPoint) -> Result<usize> {
    let chart = chart_at(map, zeta)?;
    Ok(chart.reduce()?.degree())
}

/// Directional multiplicity m_phi(zeta, v): the local multiplicity of the
/// chart's reduction at the direction label.
pub fn directional_multiplicity(
    map: &RationalMap,
    zeta: &BerkPoint,
    label: &ResPoint,
) -> Result<usize> {
    let chart = chart_at(map, zeta)?;
    let red = chart.reduce()?;
    let (red, label) = align_residual(&red, label)?;
    Ok(red.local_multiplicity(&label))
}

/// The map induced on the tangent space at a fixed type-2 point: the
/// reduction of the local chart.
pub fn tangent_map_at(map: &RationalMap, zeta: &BerkPoint) -> Result<ResidualMap> {
    if !is_fixed_point(map, zeta)? {
        return Err(Error::NotFixed);
    }
    let tau = gauss_to(zeta)?;
    let chart = map.sandwich(&tau.inverse(), &tau)?;
    chart.reduce()
}

/// Embed a residual map and a label into a common residue field.
fn align_residual(red: &ResidualMap, label: &ResPoint) -> Result<(ResidualMap, ResPoint)> {
    match label {
        ResPoint::Infinity => Ok((red.clone(), ResPoint::Infinity)),
        ResPoint::Finite(x) => {
            let kf = x.ctx().unram_degree();
            let km = red.ctx().unram_degree();
            let lcm = num_integer::lcm(kf, km);
            let target = if lcm == km {
                red.ctx().clone()
            } else {
                red.ctx().extend_unramified(lcm / km)?
            };
            let red_up = if target == *red.ctx() {
                red.clone()
            } else {
                red.embed(&crate::ffpoly::ResidueEmbedding::new(red.ctx(), &target)?)
            };
            let lab_up = if x.ctx() == &target {
                label.clone()
            } else {
                ResPoint::Finite(
                    crate::ffpoly::ResidueEmbedding::new(x.ctx(), &target)?.map(x),
                )
            };
            Ok((red_up, lab_up))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirClass {
    Good,
    Bad,
}

/// Good/bad dichotomy for a direction at a type-2 point: bad iff some
/// target value outside the image direction has a preimage inside the open
/// disk of the direction.
pub fn classify_direction(
    map: &RationalMap,
    zeta: &BerkPoint,
    label: &ResPoint,
) -> Result<DirClass> {
    let tau = gauss_to(zeta)?;
    let chart = map.sandwich(&tau.inverse(), &tau)?;
    classify_direction_at_gauss(&chart, label)
}

fn classify_direction_at_gauss(map: &RationalMap, label: &ResPoint) -> Result<DirClass> {
    match label {
        ResPoint::Infinity => {
            classify_direction_at_gauss(&map.flip(), &ResPoint::Finite(map.ctx().ff_zero()))
        }
        ResPoint::Finite(x) => {
            let red = map.reduce()?;
            let (red, lab) = align_residual(&red, label)?;
            let image_label = red.eval(&lab);
            // deterministic test value with direction distinct from the
            // image direction
            let ctx = red.ctx().clone();
            let mut test = None;
            for idx in 0..ctx.residue_order() + 1 {
                let cand = if idx == ctx.residue_order() {
                    ResPoint::Infinity
                } else {
                    ResPoint::Finite(ctx.ff_from_index(idx))
                };
                if cand != image_label {
                    test = Some(cand);
                    break;
                }
            }
            let test = test.expect("projective line has at least two points");
            // count preimages of the test value inside the open disk at the
            // label
            let map_up = if red.ctx() == map.ctx() {
                map.clone()
            } else {
                map.embed(&red.ctx().clone())?
            };
            // preimages of the test value are zeros of num - t den (zeros of
            // den alone when the test value is infinity)
            let num = match &test {
                ResPoint::Infinity => map_up.den().clone(),
                ResPoint::Finite(t) => {
                    let tv = PadicElem::lift(t);
                    map_up.num().sub(&map_up.den().scale(&tv))
                }
            };
            let x_up = if x.ctx() == red.ctx() {
                x.clone()
            } else {
                crate::ffpoly::ResidueEmbedding::new(x.ctx(), red.ctx())?.map(x)
            };
            let shifted = num.taylor_shift(&PadicElem::lift(&x_up));
            let inside = count_roots_val_gt(&shifted, Val::from_integer(0))?;
            Ok(if inside > 0 { DirClass::Bad } else { DirClass::Good })
        }
    }
}

/// Direction label at a type-2 point of the arc toward a classical point.
pub fn direction_toward_value(zeta: &BerkPoint, v: &ProjValue) -> Result<ResPoint> {
    let (center, rlog) = match zeta {
        BerkPoint::Type2 { center, rlog } => (center, *rlog),
        _ => return Err(Error::Config("direction_toward_value expects type-2".into())),
    };
    match v {
        ProjValue::Infinity => Ok(ResPoint::Infinity),
        ProjValue::Finite(x) => {
            let w = center.ctx().ram_index() as i64;
            let scaled = rlog * Val::from_integer(w);
            if *scaled.denom() != 1 {
                return Err(Error::InsufficientTower(
                    "direction labels need the log-radius on the value grid".into(),
                ));
            }
            let diff = x.sub(center);
            if diff.val_at_least(-rlog).unwrap_or(false) {
                // undo the chart scaling pi^(-w rlog)
                let unit = diff.shift(scaled.to_integer());
                Ok(ResPoint::Finite(unit.residue()?))
            } else if diff.is_bigo() {
                Err(Error::PrecisionExhausted(
                    "direction of an indistinguishable difference".into(),
                ))
            } else {
                Ok(ResPoint::Infinity)
            }
        }
    }
}

/// The type-2 point one step into a direction: center + pi^(w rlog) lift of
/// the label, log-radius rlog - step. For the infinity direction the disk
/// grows instead: zeta_{center, rlog + step}.
pub fn step_into_direction(zeta: &BerkPoint, label: &ResPoint, step: Val) -> Result<BerkPoint> {
    let (center, rlog) = match zeta {
        BerkPoint::Type2 { center, rlog } => (center, *rlog),
        _ => return Err(Error::Config("step_into_direction expects type-2".into())),
    };
    match label {
        ResPoint::Infinity => Ok(BerkPoint::type2(center.clone(), rlog + step)),
        ResPoint::Finite(c) => {
            let w = center.ctx().ram_index() as i64;
            let scaled = rlog * Val::from_integer(w);
            if *scaled.denom() != 1 {
                return Err(Error::InsufficientTower(
                    "stepping into a direction needs the log-radius on the value grid".into(),
                ));
            }
            let new_center = center.add(&PadicElem::lift(c).shift(-scaled.to_integer()));
            Ok(BerkPoint::type2(new_center, rlog - step))
        }
    }
}
