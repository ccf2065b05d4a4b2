//! Decision procedures for the Berkovich fixed point locus.
//!
//! For a map in good-reduction position, connectedness of the locus is
//! equivalent to the reduction having no fixed critical point, and
//! finiteness to every residual fixed point being critical. The component
//! census bounds the number of connected components by degree + 2: one
//! component through the Gauss point plus one isolated type-1 point for
//! each fixed point falling into a residually fixed critical direction.
//! Everything here works on exact residue-field and valuation data; a
//! sampling oracle re-checks the verdicts against brute-force image
//! computations.

use crate::berk::{
    big_metric, directional_multiplicity, image_of_point, is_fixed_point, join, median, on_arc,
    step_into_direction, tangent_map_at, BerkPoint, Rho,
};
use crate::error::{Error, Result};
use crate::field::{Ctx, FieldContext, ResPoint};
use crate::ffpoly::ResidueEmbedding;
use crate::padic::{PadicElem, TowerEmbedding};
use crate::ratmap::{
    direction_at_gauss, FixedClass, MobiusMap, ProjValue, RationalMap, ResCritical, ResFixed,
    Type1FixedPoint,
};
use crate::roots::isolate_roots;
use crate::val::{fmt_val, Val, ValOrInf};

/// Sampling grid for witnesses and the oracle.
#[derive(Clone, Debug)]
pub struct GridParams {
    /// rlog step between consecutive samples; `None` picks 1/(2w).
    pub step: Option<Val>,
    /// samples per direction
    pub depth: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            step: None,
            depth: 6,
        }
    }
}

impl GridParams {
    pub fn step_for(&self, ctx: &Ctx) -> Val {
        self.step
            .unwrap_or_else(|| Val::new(1, 2 * ctx.ram_index() as i64))
    }
}

/// A map moved into good-reduction position, together with the conjugation
/// that got it there.
#[derive(Clone, Debug)]
pub struct GoodPosition {
    /// The conjugated map sigma . phi . sigma^{-1}, with good reduction.
    pub map: RationalMap,
    /// The conjugation applied (identity when phi already had good
    /// reduction).
    pub sigma: MobiusMap,
    /// The unique type-2 totally ramified fixed point of the original map,
    /// in the original chart.
    pub fixed_point: BerkPoint,
    pub already_good: bool,
}

/// Outcome of the heuristic search for a good-reduction conjugacy.
#[derive(Debug)]
pub enum GoodReductionSearch {
    Found(Box<GoodPosition>),
    /// A repelling type-1 fixed point certifies that no conjugate has good
    /// reduction (multipliers are conjugation invariants).
    CertifiedImpossible { witness: String },
    /// The candidate list is exhausted without a certificate either way.
    Inconclusive { tried: usize },
}

/// Heuristic search for a Moebius conjugation giving good reduction:
/// candidate type-2 points are pairwise joins of type-1 fixed and critical
/// points, plus their images up to depth 3.
pub fn find_good_reduction_conjugacy(map: &RationalMap) -> Result<GoodReductionSearch> {
    if map.degree() < 2 {
        return Err(Error::Config("good reduction search needs degree >= 2".into()));
    }
    if map.is_good_reduction()? {
        return Ok(GoodReductionSearch::Found(Box::new(GoodPosition {
            map: map.clone(),
            sigma: MobiusMap::identity(map.ctx()),
            fixed_point: BerkPoint::gauss(map.ctx()),
            already_good: true,
        })));
    }
    // certified negative: a repelling fixed point survives conjugation
    let classified = map.classify_fixed_points().ok();
    if let Some(points) = &classified {
        if let Some(rep) = points.iter().find(|p| p.class == FixedClass::Repelling) {
            let loc = if rep.at_infinity {
                "infinity".to_string()
            } else {
                format!("a point in direction {}", rep.direction)
            };
            return Ok(GoodReductionSearch::CertifiedImpossible {
                witness: format!("repelling type-1 fixed point at {loc}"),
            });
        }
    }
    // tower-exact special points: type-1 fixed points and critical points
    let mut values: Vec<(Ctx, PadicElem)> = vec![];
    if let Some(points) = classified {
        for p in points {
            if let Some(v) = p.value {
                values.push((p.home.clone(), v));
            }
        }
    }
    if let Some(wq) = map.wronskian_shadow() {
        if wq.degree() > 0 {
            if let Ok(sf) = wq.squarefree_part() {
                if sf.degree() > 0 {
                    if let Ok(iso) = isolate_roots(map.ctx(), &sf) {
                        for r in iso.roots {
                            values.push((iso.ctx.clone(), r));
                        }
                    }
                }
            }
        }
    }
    // move everything into one context
    let mut common = map.ctx().clone();
    for (c, _) in &values {
        common = FieldContext::lcm_context(&common, c)?;
    }
    let mut points: Vec<PadicElem> = vec![];
    for (c, v) in values {
        let emb = TowerEmbedding::new(&c, &common)?;
        points.push(emb.map(&v));
    }
    let map_up = map.embed(&common)?;
    // candidates: pairwise joins, then images to depth 3
    let mut candidates: Vec<BerkPoint> = vec![];
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let a = BerkPoint::from_value(points[i].clone());
            let b = BerkPoint::from_value(points[j].clone());
            if let Ok(jp) = join(&a, &b) {
                if jp.is_type2() {
                    push_new_point(&mut candidates, jp);
                }
            }
        }
    }
    let mut frontier = candidates.clone();
    for _ in 0..3 {
        let mut next = vec![];
        for c in &frontier {
            if let Ok(img) = image_of_point(&map_up, c) {
                if push_new_point(&mut candidates, img.clone()) {
                    next.push(img);
                }
            }
        }
        frontier = next;
    }
    let tried = candidates.len();
    for cand in candidates {
        let tau = match crate::berk::gauss_to(&cand) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let sigma = tau.inverse();
        let conj = match map_up.conjugate(&sigma) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if conj.is_good_reduction().unwrap_or(false) {
            return Ok(GoodReductionSearch::Found(Box::new(GoodPosition {
                map: conj,
                sigma,
                fixed_point: cand,
                already_good: false,
            })));
        }
    }
    Ok(GoodReductionSearch::Inconclusive { tried })
}

fn push_new_point(list: &mut Vec<BerkPoint>, p: BerkPoint) -> bool {
    for q in list.iter() {
        if let Ok(true) = q.same_point(&p) {
            return false;
        }
    }
    list.push(p);
    true
}

/// Move a map into good-reduction position or report why that failed.
pub fn good_position(map: &RationalMap) -> Result<GoodPosition> {
    match find_good_reduction_conjugacy(map)? {
        GoodReductionSearch::Found(pos) => Ok(*pos),
        GoodReductionSearch::CertifiedImpossible { witness } => Err(Error::Inconclusive(format!(
            "not potential good reduction: {witness}"
        ))),
        GoodReductionSearch::Inconclusive { tried } => Err(Error::Inconclusive(format!(
            "no totally ramified type-2 fixed point found among {tried} candidates"
        ))),
    }
}

/// One residual fixed point with its criticality data.
#[derive(Clone, Debug)]
pub struct ResidualFixedInfo {
    pub point: ResPoint,
    /// Order of vanishing of num - z den (fixed point index).
    pub index: usize,
    /// Local multiplicity of the reduction at the point.
    pub local_multiplicity: usize,
    pub critical: bool,
}

/// Evidence-carrying connectedness verdict (fixed critical residual points
/// listed when false).
#[derive(Clone, Debug)]
pub struct ConnectednessVerdict {
    pub connected: bool,
    pub residual_fixed: Vec<ResidualFixedInfo>,
}

/// The reduction's fixed points with criticality flags; the common core of
/// both verdicts.
pub fn residual_fixed_analysis(psi: &RationalMap) -> Result<Vec<ResidualFixedInfo>> {
    let red = psi.reduce()?;
    let fixed = match red.fixed_points()? {
        ResFixed::All => {
            return Err(Error::Config(
                "identity reduction is not a good-reduction position".into(),
            ))
        }
        ResFixed::Points { pts, .. } => pts,
    };
    let critical_all = matches!(red.critical_points()?, ResCritical::All);
    let mut out = vec![];
    for (pt, index) in fixed {
        let local = red.local_multiplicity_aligned(&pt)?;
        out.push(ResidualFixedInfo {
            critical: critical_all || local >= 2,
            point: pt,
            index,
            local_multiplicity: local,
        });
    }
    Ok(out)
}

/// Connected iff the reduction has no fixed critical point.
pub fn verdict_connected(psi: &RationalMap) -> Result<ConnectednessVerdict> {
    let residual_fixed = residual_fixed_analysis(psi)?;
    let connected = residual_fixed.iter().all(|r| !r.critical);
    Ok(ConnectednessVerdict {
        connected,
        residual_fixed,
    })
}

/// Finite iff every residual fixed point is critical; the locus is then the
/// type-1 fixed points together with the totally ramified point.
pub fn verdict_finite(psi: &RationalMap) -> Result<bool> {
    let residual_fixed = residual_fixed_analysis(psi)?;
    Ok(residual_fixed.iter().all(|r| r.critical))
}

/// An isolated type-1 fixed point, with its direction in the good-position
/// chart.
#[derive(Clone, Debug)]
pub struct IsolatedPoint {
    /// Classification data of the original map's fixed point.
    pub point: Type1FixedPoint,
    /// Direction at the totally ramified point (good-position chart).
    pub chart_direction: ResPoint,
    /// Directional multiplicity of that direction.
    pub directional_multiplicity: usize,
}

/// Census of the connected components of the fixed point locus.
#[derive(Clone, Debug)]
pub struct ComponentCensus {
    pub count: usize,
    /// Residually fixed non-critical directions met by the Gauss component.
    pub gauss_directions: Vec<ResPoint>,
    pub isolated_points: Vec<IsolatedPoint>,
    /// False when only the count could be established (the per-point
    /// records need root isolation, which is unsupported for wildly
    /// ramified clusters).
    pub detailed: bool,
}

/// The type-1 fixed points of the original map, transported into the
/// good-position chart, with their directions and criticality.
fn transported_fixed_points(
    original: &RationalMap,
    pos: &GoodPosition,
) -> Result<Vec<IsolatedPoint>> {
    let classified = original.classify_fixed_points()?;
    let red = pos.map.reduce()?;
    let mut out = vec![];
    for p in classified {
        // transport the value through sigma into the chart
        let value = match (&p.value, p.at_infinity) {
            (_, true) => ProjValue::Infinity,
            (Some(v), false) => ProjValue::Finite(v.clone()),
            (None, false) => unreachable!("finite fixed point carries a value"),
        };
        let common = FieldContext::lcm_context(&p.home, pos.map.ctx())?;
        let sigma_up = embed_mobius(&pos.sigma, &common)?;
        let value_up = match &value {
            ProjValue::Infinity => ProjValue::Infinity,
            ProjValue::Finite(v) => {
                ProjValue::Finite(TowerEmbedding::new(&p.home, &common)?.map(v))
            }
        };
        let moved = sigma_up.apply(&value_up)?;
        let chart_direction = match &moved {
            ProjValue::Infinity => ResPoint::Infinity,
            ProjValue::Finite(v) => direction_at_gauss(v)?,
        };
        let local = red.local_multiplicity_aligned(&chart_direction)?;
        out.push(IsolatedPoint {
            point: p,
            chart_direction,
            directional_multiplicity: local,
        });
    }
    Ok(out)
}

fn embed_mobius(m: &MobiusMap, to: &Ctx) -> Result<MobiusMap> {
    if m.ctx() == to {
        return Ok(m.clone());
    }
    if let Some(sq) = &m.shadow {
        return MobiusMap::from_rationals(to, sq.clone());
    }
    let emb = TowerEmbedding::new(m.ctx(), to)?;
    MobiusMap::new(
        to,
        [
            emb.map(&m.entries[0]),
            emb.map(&m.entries[1]),
            emb.map(&m.entries[2]),
            emb.map(&m.entries[3]),
        ],
        None,
    )
}

/// Component count by residue-field arithmetic alone: the number of
/// distinct type-1 fixed points falling into residually fixed critical
/// directions is read off from the reduction of the square-free fixed
/// point polynomial, direction by direction, with gcd extraction. Only
/// needs the exact rational shadow of a map already in good-reduction
/// position — no root isolation.
pub fn census_count_residual(psi: &RationalMap) -> Result<usize> {
    let (_, pq, inf_fixed) = psi.fixed_point_polynomial()?;
    let pq = pq.ok_or_else(|| {
        Error::FactorizationUnsupported("residual census route needs exact coefficients".into())
    })?;
    let red = psi.reduce()?;
    let ctx = psi.ctx().clone();
    // finite residually-fixed-critical directions: common roots of the
    // fixed point equation and the wronskian of the reduction
    let phi_poly = red.num().sub(&crate::ffpoly::FFPoly::x(&ctx).mul(red.den()));
    if phi_poly.is_zero() {
        return Err(Error::Config(
            "identity reduction is not a good-reduction position".into(),
        ));
    }
    let rf_poly = if phi_poly.degree() > 0 {
        phi_poly.squarefree_part()?
    } else {
        crate::ffpoly::FFPoly::one(&ctx)
    };
    let wronskian = red
        .num()
        .derivative()
        .mul(red.den())
        .sub(&red.num().mul(&red.den().derivative()));
    let inseparable = wronskian.is_zero();
    let cf_poly = if inseparable {
        rf_poly.clone()
    } else if wronskian.degree() == 0 || rf_poly.degree() == 0 {
        crate::ffpoly::FFPoly::one(&ctx)
    } else {
        rf_poly.gcd(&wronskian.squarefree_part()?)
    };
    // distinct fixed points per direction: multiplicities in the reduction
    // of the unit-content square-free fixed point polynomial
    let mut iso_finite = 0;
    let mut drop_to_infinity = 0;
    if pq.degree() > 0 {
        let p_star = pq.squarefree_part()?;
        let vmin = p_star.min_val_p(ctx.prime()).expect("nonzero");
        let scale = crate::rational::Q::from_integer(num_bigint::BigInt::from(ctx.prime()))
            .pow(-(vmin as i32));
        let p_norm = p_star.scale(&scale);
        let p_red = crate::ppoly::PPoly::from_rational_poly(&ctx, &p_norm).reduce()?;
        // square-free over Q means distinct roots; the degree drop counts
        // the distinct fixed points escaping into the infinity direction
        drop_to_infinity = p_star.degree() - p_red.degree();
        if cf_poly.degree() > 0 && !p_red.is_zero() {
            let mut q = p_red;
            loop {
                let t = q.gcd(&cf_poly);
                if t.degree() == 0 {
                    break;
                }
                iso_finite += t.degree();
                q = q.divrem(&t).0;
            }
        }
    }
    // the infinity direction, via the degree data
    let (dn, dd) = (red.num().degree(), red.den().degree());
    let inf_dir_fixed = !red.num().is_zero() && dn > dd;
    let inf_dir_critical =
        inf_dir_fixed && (inseparable || red.local_multiplicity(&ResPoint::Infinity) >= 2);
    let iso_inf = if inf_dir_critical {
        drop_to_infinity + usize::from(inf_fixed)
    } else {
        0
    };
    Ok(1 + iso_finite + iso_inf)
}

/// Count the connected components: the Gauss component plus one for each
/// distinct type-1 fixed point in a residually fixed critical direction.
/// Asserts the degree + 2 bound. The count is cross-checked between the
/// residual gcd route and the transported-point route whenever both are
/// available.
pub fn component_census(original: &RationalMap, pos: &GoodPosition) -> Result<ComponentCensus> {
    let red = pos.map.reduce()?;
    let critical_all = matches!(red.critical_points()?, ResCritical::All);
    let residual_count = if pos.map.shadow().is_some() {
        Some(census_count_residual(&pos.map)?)
    } else {
        None
    };
    let transported = match transported_fixed_points(original, pos) {
        Ok(t) => t,
        Err(Error::FactorizationUnsupported(msg)) => {
            // the detailed record needs root isolation, which can fail on
            // wildly ramified clusters; the residual count stands on its own
            if let Some(count) = residual_count {
                assert!(
                    count <= original.degree() + 2,
                    "component count {count} exceeds degree + 2"
                );
                return Ok(ComponentCensus {
                    count,
                    gauss_directions: vec![],
                    isolated_points: vec![],
                    detailed: false,
                });
            }
            return Err(Error::FactorizationUnsupported(msg));
        }
        Err(e) => return Err(e),
    };
    let mut count = 1;
    let mut gauss_directions: Vec<ResPoint> = vec![];
    let mut isolated = vec![];
    for t in transported {
        let critical = critical_all || t.directional_multiplicity >= 2;
        if critical {
            count += 1;
            isolated.push(t);
        } else if !gauss_directions.contains(&t.chart_direction) {
            gauss_directions.push(t.chart_direction.clone());
        }
    }
    if let Some(rc) = residual_count {
        if rc != count {
            return Err(Error::OracleMismatch(format!(
                "residual census count {rc} disagrees with transported count {count}"
            )));
        }
    }
    assert!(
        count <= original.degree() + 2,
        "component count {count} exceeds degree + 2"
    );
    // a totally ramified direction holds exactly one fixed point
    let d = original.degree();
    let mut by_dir: Vec<(&ResPoint, usize)> = vec![];
    for p in &isolated {
        match by_dir.iter_mut().find(|(q, _)| *q == &p.chart_direction) {
            Some((_, n)) => *n += 1,
            None => by_dir.push((&p.chart_direction, 1)),
        }
    }
    for (dir, n) in by_dir {
        if isolated
            .iter()
            .any(|p| &p.chart_direction == dir && p.directional_multiplicity == d)
            && n != 1
        {
            return Err(Error::OracleMismatch(format!(
                "totally ramified direction {dir} holds {n} fixed points"
            )));
        }
    }
    Ok(ComponentCensus {
        count,
        gauss_directions,
        isolated_points: isolated,
        detailed: true,
    })
}

/// Isolated type-1 fixed points: those in residually fixed critical
/// directions.
pub fn isolated_fixed_points(
    original: &RationalMap,
    pos: &GoodPosition,
) -> Result<Vec<IsolatedPoint>> {
    Ok(component_census(original, pos)?.isolated_points)
}

/// A drift witness: a point in the given direction moved strictly
/// outward, with the arc membership certified through the metric.
pub fn drift_witness(
    psi: &RationalMap,
    label: &ResPoint,
    grid: &GridParams,
) -> Result<BerkPoint> {
    if !psi.is_good_reduction()? {
        return Err(Error::Config("drift witness needs good reduction".into()));
    }
    let gauss = BerkPoint::gauss(psi.ctx());
    let red = psi.reduce()?;
    if red.eval_aligned(label)? != *label {
        return Err(Error::Config(format!(
            "direction {label} is not residually fixed"
        )));
    }
    if directional_multiplicity(psi, &gauss, label)? < 2 {
        return Err(Error::Config(format!(
            "direction {label} has directional multiplicity 1"
        )));
    }
    let step = grid.step_for(psi.ctx());
    for j in 1..=grid.depth {
        let beta = step_into_direction(&gauss, label, step * Val::from_integer(j as i64))?;
        let image = image_of_point(psi, &beta)?;
        if image.same_point(&beta)? {
            continue;
        }
        if on_arc(&gauss, &beta, &image)? {
            return Ok(beta);
        }
        // fall back to the meet of the three arcs
        let b2 = median(&gauss, &beta, &image)?;
        let image2 = image_of_point(psi, &b2)?;
        if !image2.same_point(&b2)? && on_arc(&gauss, &b2, &image2)? {
            return Ok(b2);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no witness in direction {label} within depth {} at step {}",
        grid.depth,
        fmt_val(step)
    )))
}

/// How one end of the Gauss component was classified.
#[derive(Clone, Debug)]
pub enum ComponentEnd {
    /// Arc ending at an indifferent type-1 fixed point.
    IndifferentType1 {
        chart_direction: ResPoint,
        point: Type1FixedPoint,
    },
    /// Interior type-2 point whose tangent map is the identity: the
    /// component meets every direction there.
    InteriorIdentity { point: BerkPoint },
    /// Type-2 end whose tangent map is a translation.
    TranslationType2 { point: BerkPoint },
    /// A residually fixed non-critical direction where no end could be
    /// located in the tower (possibly a type-4 end).
    Undetected { chart_direction: ResPoint },
}

/// Classify the reachable structure of the Gauss component per the
/// trichotomy: indifferent type-1 ends, identity-tangent interior points,
/// translation type-2 ends; directions without tower-located structure are
/// reported undetected.
pub fn component_ends(original: &RationalMap, pos: &GoodPosition) -> Result<Vec<ComponentEnd>> {
    let transported = transported_fixed_points(original, pos)?;
    let mut out = vec![];
    let mut covered: Vec<ResPoint> = vec![];
    // (b) type-1 fixed points in non-critical fixed directions are
    // indifferent ends of the component
    for t in &transported {
        if t.directional_multiplicity == 1 {
            if t.point.class != FixedClass::Indifferent {
                return Err(Error::OracleMismatch(format!(
                    "fixed point in non-critical direction {} classified {}",
                    t.chart_direction, t.point.class
                )));
            }
            covered.push(t.chart_direction.clone());
            out.push(ComponentEnd::IndifferentType1 {
                chart_direction: t.chart_direction.clone(),
                point: t.point.clone(),
            });
        }
    }
    // (a)/(c) interior branch points and type-2 ends, tested for identity
    // or translation tangent maps. Candidates: pairwise joins of the
    // transported values inside one direction, plus the input chart's
    // Gauss point (a tower-exact fixed point whenever the input reduction
    // is nonconstant, and an interior point exactly when that reduction
    // cancels down to the identity).
    let noncrit: Vec<&IsolatedPoint> = transported
        .iter()
        .filter(|t| t.directional_multiplicity == 1)
        .collect();
    let mut candidates: Vec<BerkPoint> = vec![];
    for i in 0..noncrit.len() {
        for j in (i + 1)..noncrit.len() {
            if noncrit[i].chart_direction != noncrit[j].chart_direction {
                continue;
            }
            if let Some(point) = join_transported(noncrit[i], noncrit[j], pos)? {
                push_new_point(&mut candidates, point);
            }
        }
    }
    if !pos.already_good {
        if let Ok(red_in) = original.reduce() {
            if !red_in.is_constant() {
                let gauss_in = BerkPoint::gauss(pos.map.ctx());
                let moved = crate::berk::mobius_image(&pos.sigma, &gauss_in)?;
                if !moved.same_point(&BerkPoint::gauss(pos.map.ctx()))? {
                    push_new_point(&mut candidates, moved);
                }
            }
        }
    }
    for point in candidates {
        let common = match &point {
            BerkPoint::Type2 { center, .. } => center.ctx().clone(),
            _ => continue,
        };
        let psi_up = pos.map.embed(&common)?;
        let tangent = tangent_map_at(&psi_up, &point)?;
        if tangent.is_identity() {
            out.push(ComponentEnd::InteriorIdentity { point });
        } else if tangent.is_translation()? {
            out.push(ComponentEnd::TranslationType2 { point });
        }
    }
    // residually fixed non-critical directions with nothing located
    let red = pos.map.reduce()?;
    if let ResFixed::Points { pts, .. } = red.fixed_points()? {
        for (pt, _) in pts {
            let local = red.local_multiplicity_aligned(&pt)?;
            if local == 1 && !covered.iter().any(|c| same_respoint(c, &pt)) {
                out.push(ComponentEnd::Undetected {
                    chart_direction: pt,
                });
            }
        }
    }
    Ok(out)
}

fn same_respoint(a: &ResPoint, b: &ResPoint) -> bool {
    // labels may live in different extension fields; compare via the
    // canonical embedding of the smaller into the larger
    match (a, b) {
        (ResPoint::Infinity, ResPoint::Infinity) => true,
        (ResPoint::Finite(x), ResPoint::Finite(y)) => {
            if x.ctx() == y.ctx() {
                return x == y;
            }
            let (small, big) = if x.ctx().unram_degree() <= y.ctx().unram_degree() {
                (x, y)
            } else {
                (y, x)
            };
            if big.ctx().unram_degree() % small.ctx().unram_degree() != 0 {
                return false;
            }
            match ResidueEmbedding::new(small.ctx(), big.ctx()) {
                Ok(emb) => &emb.map(small) == big,
                Err(_) => false,
            }
        }
        _ => false,
    }
}

/// Join the two transported fixed point values in the good-position chart.
fn join_transported(
    a: &IsolatedPoint,
    b: &IsolatedPoint,
    pos: &GoodPosition,
) -> Result<Option<BerkPoint>> {
    let va = transported_value(a, pos)?;
    let vb = transported_value(b, pos)?;
    match (va, vb) {
        (ProjValue::Finite(x), ProjValue::Finite(y)) => {
            let mut common = FieldContext::lcm_context(x.ctx(), y.ctx())?;
            common = FieldContext::lcm_context(&common, pos.map.ctx())?;
            let xe = TowerEmbedding::new(x.ctx(), &common)?.map(&x);
            let ye = TowerEmbedding::new(y.ctx(), &common)?.map(&y);
            let j = join(&BerkPoint::from_value(xe), &BerkPoint::from_value(ye))?;
            Ok(j.is_type2().then_some(j))
        }
        _ => Ok(None),
    }
}

fn transported_value(p: &IsolatedPoint, pos: &GoodPosition) -> Result<ProjValue> {
    let value = if p.point.at_infinity {
        ProjValue::Infinity
    } else {
        ProjValue::Finite(p.point.value.clone().expect("finite point has a value"))
    };
    let common = FieldContext::lcm_context(&p.point.home, pos.map.ctx())?;
    let sigma_up = embed_mobius(&pos.sigma, &common)?;
    let value_up = match &value {
        ProjValue::Infinity => ProjValue::Infinity,
        ProjValue::Finite(v) => ProjValue::Finite(TowerEmbedding::new(&p.point.home, &common)?.map(v)),
    };
    sigma_up.apply(&value_up)
}

/// One sampled arc of the oracle.
#[derive(Clone, Debug)]
pub struct ArcLog {
    pub target: String,
    pub direction: String,
    pub residually_fixed: bool,
    pub critical: bool,
    /// (rlog, is_fixed) per sample.
    pub samples: Vec<(Val, bool)>,
    /// Local multiplicities along the samples (Gauss first).
    pub multiplicities: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ScalingLog {
    pub direction: String,
    pub directional_multiplicity: usize,
    pub epsilon: Val,
}

/// Brute-force sampling record; produced only when every check passed
/// (violations surface as `OracleMismatch`).
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub step: Val,
    pub depth: usize,
    pub arcs: Vec<ArcLog>,
    pub scalings: Vec<ScalingLog>,
}

/// Sample the fixed point locus along arcs from the totally ramified point
/// and re-derive the verdicts from raw image computations: fixed samples
/// must form initial segments in non-critical fixed directions, must be
/// absent in critical and unfixed directions, the local degree must be
/// non-increasing outward, and the directional multiplicity must scale the
/// metric on a certified initial segment.
pub fn oracle_verify(
    original: &RationalMap,
    pos: &GoodPosition,
    grid: &GridParams,
) -> Result<OracleReport> {
    let base_step = grid.step_for(pos.map.ctx());
    // context where every sample log-radius is on the value grid and every
    // residual label lives in the residue field
    // verdicts and the residual fixed points are embedding invariants;
    // compute them once over the base position, where the residue field is
    // smallest, and only transport the labels into the sampling context
    let transported = transported_fixed_points(original, pos)?;
    let connected = verdict_connected(&pos.map)?.connected;
    let finite = verdict_finite(&pos.map)?;
    let red0 = pos.map.reduce()?;
    let fixed0 = match red0.fixed_points()? {
        ResFixed::All => {
            return Err(Error::Config(
                "identity reduction is not a good-reduction position".into(),
            ))
        }
        ResFixed::Points { ctx, pts } => (ctx, pts),
    };
    let mut octx = pos.map.ctx().clone();
    {
        let factor = num_integer::lcm(octx.unram_degree(), fixed0.0.unram_degree())
            / octx.unram_degree();
        if factor > 1 {
            octx = octx.extend_unramified(factor)?;
        }
        // the base projective line may be entirely fixed (z^p); take the
        // non-fixed sample directions from a quadratic extension then
        if octx.residue_order() + 1 < fixed0.1.len() as u128 + 2 {
            octx = octx.extend_unramified(2)?;
        }
    }
    let scaled = base_step * Val::from_integer(octx.ram_index() as i64);
    if *scaled.denom() != 1 {
        octx = octx.extend_ramified(*scaled.denom() as u64)?;
    }
    let psi = pos.map.embed(&octx)?;
    let red = psi.reduce()?;
    let d = psi.degree();
    let gauss = BerkPoint::gauss(&octx);

    // direction set: all residually fixed directions plus two unfixed ones
    let mut labels: Vec<ResPoint> = vec![];
    for (pt, _) in &fixed0.1 {
        let up = embed_respoint(pt, &octx)?;
        if !labels.iter().any(|l| same_respoint(l, &up)) {
            labels.push(up);
        }
    }
    let mut unfixed = 0;
    let mut idx = 0u128;
    while unfixed < 2 && idx < octx.residue_order() + 1 {
        let cand = if idx == octx.residue_order() {
            ResPoint::Infinity
        } else {
            ResPoint::Finite(octx.ff_from_index(idx))
        };
        idx += 1;
        if labels.iter().any(|l| same_respoint(l, &cand)) {
            continue;
        }
        if red.eval_aligned(&cand)? != cand {
            labels.push(cand);
            unfixed += 1;
        }
    }

    let mut arcs = vec![];
    let mut scalings = vec![];
    for label in &labels {
        let fixed_dir = red.eval_aligned(label)? == *label;
        let dirmult = red.local_multiplicity_aligned(label)?;
        let critical = fixed_dir && dirmult >= 2;
        let mut samples = vec![];
        let mut mults = vec![d];
        for j in 1..=grid.depth {
            let zeta = step_into_direction(&gauss, label, base_step * Val::from_integer(j as i64))?;
            let fixed = is_fixed_point(&psi, &zeta)?;
            samples.push((zeta.rlog().unwrap(), fixed));
            mults.push(crate::berk::multiplicity_at(&psi, &zeta)?);
        }
        check_sample_pattern(label, fixed_dir, critical, &samples)?;
        check_monotone(label, &mults)?;
        if fixed_dir {
            if let Some(log) = check_scaling(&psi, label, dirmult)? {
                scalings.push(log);
            }
        }
        arcs.push(ArcLog {
            target: String::new(),
            direction: format!("{label}"),
            residually_fixed: fixed_dir,
            critical,
            samples,
            multiplicities: mults,
        });
    }

    // arcs toward each transported type-1 fixed point
    for t in &transported {
        let value = transported_value(t, pos)?;
        let ProjValue::Finite(v) = value else {
            continue; // the infinity direction is already sampled
        };
        let common = FieldContext::lcm_context(v.ctx(), &octx)?;
        let v_up = TowerEmbedding::new(v.ctx(), &common)?.map(&v);
        if v_up.is_bigo() {
            continue; // center unresolved at this precision
        }
        let psi_up = psi.embed(&common)?;
        let red_up = psi_up.reduce()?;
        let dir = direction_at_gauss(&v_up)?;
        let dirmult = red_up.local_multiplicity_aligned(&dir)?;
        let critical = dirmult >= 2;
        let top = match v_up.valuation()? {
            ValOrInf::Infinite => Val::from_integer(0),
            ValOrInf::Finite(val) => (-val).max(Val::from_integer(0)),
        };
        let mut samples = vec![];
        let mut mults = vec![];
        for j in 1..=grid.depth {
            let rlog = top - base_step * Val::from_integer(j as i64);
            let zeta = BerkPoint::type2(v_up.clone(), rlog);
            let fixed = is_fixed_point(&psi_up, &zeta)?;
            samples.push((rlog, fixed));
            mults.push(crate::berk::multiplicity_at(&psi_up, &zeta)?);
        }
        // sample-scale shape of the locus: the arc toward a fixed
        // point is entirely fixed in a non-critical direction and entirely
        // moved in a critical one
        for (rlog, fixed) in &samples {
            if critical && *fixed {
                return Err(Error::OracleMismatch(format!(
                    "fixed type-2 sample at rlog {} inside critical direction {dir}",
                    fmt_val(*rlog)
                )));
            }
            if !critical && !*fixed {
                return Err(Error::OracleMismatch(format!(
                    "unfixed sample at rlog {} on the arc toward a fixed point in \
                     non-critical direction {dir}",
                    fmt_val(*rlog)
                )));
            }
        }
        check_monotone(&dir, &mults)?;
        arcs.push(ArcLog {
            target: format!("{v_up}"),
            direction: format!("{dir}"),
            residually_fixed: true,
            critical,
            samples,
            multiplicities: mults,
        });
    }

    // verdict consistency at sample scale
    let any_fixed_sample = arcs.iter().any(|a| a.samples.iter().any(|(_, f)| *f));
    if finite && any_fixed_sample {
        return Err(Error::OracleMismatch(
            "finite verdict but a fixed type-2 sample exists".into(),
        ));
    }
    if connected {
        for a in &arcs {
            if a.critical {
                return Err(Error::OracleMismatch(
                    "connected verdict with a critical fixed direction".into(),
                ));
            }
        }
    }
    Ok(OracleReport {
        step: base_step,
        depth: grid.depth,
        arcs,
        scalings,
    })
}

fn embed_respoint(p: &ResPoint, to: &Ctx) -> Result<ResPoint> {
    match p {
        ResPoint::Infinity => Ok(ResPoint::Infinity),
        ResPoint::Finite(x) => {
            if x.ctx() == to {
                Ok(p.clone())
            } else {
                Ok(ResPoint::Finite(ResidueEmbedding::new(x.ctx(), to)?.map(x)))
            }
        }
    }
}

fn check_sample_pattern(
    label: &ResPoint,
    fixed_dir: bool,
    critical: bool,
    samples: &[(Val, bool)],
) -> Result<()> {
    if !fixed_dir || critical {
        // critical fixed directions hold no type-2 fixed points at all
        if let Some((rlog, _)) = samples.iter().find(|(_, f)| *f) {
            return Err(Error::OracleMismatch(format!(
                "fixed sample at rlog {} in direction {label} (fixed={fixed_dir}, \
                 critical={critical})",
                fmt_val(*rlog)
            )));
        }
        return Ok(());
    }
    // non-critical fixed: the fixed samples must form an initial segment
    let mut seen_unfixed = false;
    for (rlog, fixed) in samples {
        if *fixed && seen_unfixed {
            return Err(Error::OracleMismatch(format!(
                "fixed sample at rlog {} beyond an unfixed one in direction {label}",
                fmt_val(*rlog)
            )));
        }
        if !fixed {
            seen_unfixed = true;
        }
    }
    Ok(())
}

fn check_monotone(label: &ResPoint, mults: &[usize]) -> Result<()> {
    for w in mults.windows(2) {
        if w[1] > w[0] {
            return Err(Error::OracleMismatch(format!(
                "multiplicity increases outward in direction {label}: {mults:?}"
            )));
        }
    }
    Ok(())
}

/// Local-isometry scaling check on a certified initial segment of the
/// direction: rho(phi x, phi y) = m rho(x, y).
fn check_scaling(
    psi: &RationalMap,
    label: &ResPoint,
    dirmult: usize,
) -> Result<Option<ScalingLog>> {
    if *label == ResPoint::Infinity {
        // conjugate by the flip and check direction zero
        let flipped = psi.flip();
        let zero = ResPoint::Finite(psi.ctx().ff_zero());
        return match check_scaling(&flipped, &zero, dirmult)? {
            Some(mut log) => {
                log.direction = "inf".into();
                Ok(Some(log))
            }
            None => Ok(None),
        };
    }
    let ResPoint::Finite(x) = label else { unreachable!() };
    let octx = psi.ctx().clone();
    let x_up = if x.ctx() == &octx {
        x.clone()
    } else {
        ResidueEmbedding::new(x.ctx(), &octx)?.map(x)
    };
    let center = PadicElem::lift(&x_up);
    // Taylor data of psi around the center; residually fixed directions
    // cannot contain a pole on their boundary
    let num_shift = psi.num().taylor_shift(&center);
    let den_shift = psi.den().taylor_shift(&center);
    let series = crate::ppoly::series_quotient(&num_shift, &den_shift, psi.degree())?;
    let m = dirmult;
    if m >= series.len() {
        return Ok(None);
    }
    match series[m].valuation() {
        Ok(ValOrInf::Finite(v)) if v == Val::from_integer(0) => {}
        Ok(_) => {
            return Err(Error::OracleMismatch(format!(
                "taylor coefficient {m} is not a unit in direction {label}"
            )))
        }
        Err(_) => return Ok(None),
    }
    let mut eps = Val::new(1, 1);
    for (i, a) in series.iter().enumerate().take(m).skip(1) {
        if a.is_exact_zero() {
            continue;
        }
        if let ValOrInf::Finite(b) = a.val_lower_bound() {
            let cap = b / Val::from_integer((m - i) as i64);
            if cap <= Val::from_integer(0) {
                return Ok(None);
            }
            eps = eps.min(cap);
        }
    }
    let x1 = BerkPoint::type2(center.clone(), -eps);
    let x2 = BerkPoint::type2(center.clone(), -eps / Val::from_integer(2));
    let y1 = image_of_point(psi, &x1)?;
    let y2 = image_of_point(psi, &x2)?;
    let lhs = big_metric(&y1, &y2)?;
    let rhs = big_metric(&x1, &x2)?;
    match (lhs, rhs) {
        (Rho::Finite(a), Rho::Finite(b)) => {
            if a != b * Val::from_integer(m as i64) {
                return Err(Error::OracleMismatch(format!(
                    "scaling violated in direction {label}: rho(images) = {}, \
                     m rho = {}",
                    fmt_val(a),
                    fmt_val(b * Val::from_integer(m as i64))
                )));
            }
        }
        _ => return Ok(None),
    }
    Ok(Some(ScalingLog {
        direction: format!("{label}"),
        directional_multiplicity: m,
        epsilon: eps,
    }))
}

/// A drift witness search outcome for one critical fixed direction.
#[derive(Clone, Debug)]
pub struct WitnessLog {
    pub direction: String,
    pub point: Option<BerkPoint>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    pub grid: GridParams,
    pub skip_oracle: bool,
}

/// The full analysis record.
#[derive(Debug)]
pub struct LocusReport {
    pub degree: usize,
    pub good_reduction: bool,
    pub position: GoodPosition,
    pub residual_fixed: Vec<ResidualFixedInfo>,
    pub connected: bool,
    pub finite: bool,
    pub census: ComponentCensus,
    pub ends: Vec<ComponentEnd>,
    pub witnesses: Vec<WitnessLog>,
    pub oracle: Option<OracleReport>,
}

/// Run the whole pipeline: good-reduction position, verdicts, census, end
/// classification, drift witnesses, and (unless skipped) the sampling
/// oracle. The two verdict routes are cross-checked against the census.
pub fn analyze(map: &RationalMap, opts: &AnalysisOptions) -> Result<LocusReport> {
    if map.degree() < 2 {
        return Err(Error::Config("analysis needs a map of degree >= 2".into()));
    }
    let good_reduction = map.is_good_reduction()?;
    let pos = good_position(map)?;
    let verdict = verdict_connected(&pos.map)?;
    let finite = verdict_finite(&pos.map)?;
    let census = component_census(map, &pos)?;
    // the verdict route (residual root sets in the closure) and the census
    // route (isolated point transport) must agree
    if verdict.connected != (census.count == 1) {
        return Err(Error::OracleMismatch(format!(
            "connectedness verdict {} disagrees with census count {}",
            verdict.connected, census.count
        )));
    }
    if finite && census.count != 1 + census.isolated_points.len() {
        return Err(Error::OracleMismatch(
            "finiteness verdict disagrees with the census".into(),
        ));
    }
    let ends = component_ends(map, &pos)?;
    let mut witnesses = vec![];
    for r in verdict.residual_fixed.iter().filter(|r| r.critical) {
        let entry = match drift_witness(&pos.map, &r.point, &opts.grid) {
            Ok(point) => WitnessLog {
                direction: format!("{}", r.point),
                point: Some(point),
                note: None,
            },
            Err(e) => WitnessLog {
                direction: format!("{}", r.point),
                point: None,
                note: Some(format!("{e}")),
            },
        };
        witnesses.push(entry);
    }
    let oracle = if opts.skip_oracle {
        None
    } else {
        Some(oracle_verify(map, &pos, &opts.grid)?)
    };
    Ok(LocusReport {
        degree: map.degree(),
        good_reduction,
        position: pos,
        residual_fixed: verdict.residual_fixed,
        connected: verdict.connected,
        finite,
        census,
        ends,
        witnesses,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::QPoly;
    use crate::val::val_int;

    fn ctx3() -> Ctx {
        FieldContext::new(3, 1, 1, 32).unwrap()
    }

    fn map(ctx: &Ctx, num: &[i64], den: &[i64]) -> RationalMap {
        RationalMap::from_exprs(ctx, &QPoly::from_ints(num), &QPoly::from_ints(den)).unwrap()
    }

    #[test]
    fn verdict_examples() {
        let ctx = ctx3();
        // the connected quadratic: connected, not finite
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let v = verdict_connected(&m).unwrap();
        assert!(v.connected);
        assert!(!verdict_finite(&m).unwrap());
        // z^3 at p = 3: not connected, finite
        let m = map(&ctx, &[0, 0, 0, 1], &[1]);
        let v = verdict_connected(&m).unwrap();
        assert!(!v.connected);
        assert!(verdict_finite(&m).unwrap());
        // z^2 at p = 5: fixed critical residual points 0 and infinity
        let ctx5 = FieldContext::new(5, 1, 1, 32).unwrap();
        let m = map(&ctx5, &[0, 0, 1], &[1]);
        let v = verdict_connected(&m).unwrap();
        assert!(!v.connected);
        let offenders: Vec<&ResidualFixedInfo> =
            v.residual_fixed.iter().filter(|r| r.critical).collect();
        assert_eq!(offenders.len(), 2);
        assert!(!verdict_finite(&m).unwrap());
    }

    #[test]
    fn census_examples() {
        let ctx = ctx3();
        // z^3 at p=3: count = p + 2 = 5
        let m = map(&ctx, &[0, 0, 0, 1], &[1]);
        let pos = good_position(&m).unwrap();
        let c = component_census(&m, &pos).unwrap();
        assert_eq!(c.count, 5);
        assert_eq!(c.isolated_points.len(), 4);
        // z^2 at p=3: count 3, isolated {0, inf}
        let m = map(&ctx, &[0, 0, 1], &[1]);
        let pos = good_position(&m).unwrap();
        let c = component_census(&m, &pos).unwrap();
        assert_eq!(c.count, 3);
        assert_eq!(c.isolated_points.len(), 2);
        // the connected quadratic: count 1
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let pos = good_position(&m).unwrap();
        let c = component_census(&m, &pos).unwrap();
        assert_eq!(c.count, 1);
        assert!(c.isolated_points.is_empty());
    }

    #[test]
    fn isolated_points_examples() {
        let ctx = ctx3();
        // z^2 at p=3: isolated points 0 and infinity, each in a totally
        // ramified direction
        let m = map(&ctx, &[0, 0, 1], &[1]);
        let pos = good_position(&m).unwrap();
        let iso = isolated_fixed_points(&m, &pos).unwrap();
        assert_eq!(iso.len(), 2);
        for p in &iso {
            assert_eq!(p.directional_multiplicity, 2);
        }
        assert!(iso.iter().any(|p| p.point.at_infinity));
        // the connected quadratic: none
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let pos = good_position(&m).unwrap();
        assert!(isolated_fixed_points(&m, &pos).unwrap().is_empty());
    }

    #[test]
    fn drift_witness_examples() {
        let ctx = ctx3();
        let grid = GridParams::default();
        // z^2, direction 0: a witness exists and is certified
        let m = map(&ctx, &[0, 0, 1], &[1]);
        let w = drift_witness(&m, &ResPoint::Finite(ctx.ff_zero()), &grid).unwrap();
        let img = image_of_point(&m, &w).unwrap();
        assert!(!img.same_point(&w).unwrap());
        assert!(on_arc(&BerkPoint::gauss(&ctx), &w, &img).unwrap());
        // z^3, direction 1
        let m = map(&ctx, &[0, 0, 0, 1], &[1]);
        let w = drift_witness(&m, &ResPoint::Finite(ctx.ff_one()), &grid).unwrap();
        let img = image_of_point(&m, &w).unwrap();
        assert!(!img.same_point(&w).unwrap());
        // non-critical direction: contract violation
        let m = map(&ctx, &[0, 0, 1], &[1]);
        assert!(drift_witness(&m, &ResPoint::Finite(ctx.ff_one()), &grid).is_err());
    }

    #[test]
    fn good_reduction_search_examples() {
        let ctx = ctx3();
        // already good: identity
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        match find_good_reduction_conjugacy(&m).unwrap() {
            GoodReductionSearch::Found(pos) => {
                assert!(pos.already_good);
                assert!(pos
                    .fixed_point
                    .same_point(&BerkPoint::gauss(&ctx))
                    .unwrap());
            }
            other => panic!("expected found, got {other:?}"),
        }
        // the interior-identity map conjugated form: finds zeta_{0, rlog 1}
        let psi = map(&ctx, &[3, 1, 3], &[1, 0, 9]);
        match find_good_reduction_conjugacy(&psi).unwrap() {
            GoodReductionSearch::Found(pos) => {
                assert!(!pos.already_good);
                let expect =
                    BerkPoint::type2(PadicElem::zero(pos.map.ctx()), val_int(1));
                assert!(pos.fixed_point.same_point(&expect).unwrap());
                assert!(pos.map.is_good_reduction().unwrap());
            }
            other => panic!("expected found, got {other:?}"),
        }
        // (z^2+3)/z: found via the join of the two critical points
        let m = map(&ctx, &[3, 0, 1], &[0, 1]);
        match find_good_reduction_conjugacy(&m).unwrap() {
            GoodReductionSearch::Found(pos) => {
                assert!(pos.map.is_good_reduction().unwrap());
                assert_eq!(pos.map.ctx().ram_index(), 2);
                // the totally ramified point is zeta_{sqrt(3), 3^(-1/2)}
                assert_eq!(pos.fixed_point.rlog(), Some(Val::new(-1, 2)));
            }
            other => panic!("expected found, got {other:?}"),
        }
        // z^2 + 1/3 has a repelling fixed point: certified impossible
        let m = RationalMap::from_exprs(
            &ctx,
            &QPoly::new(vec![
                crate::rational::q_ratio(1, 3),
                crate::rational::q_int(0),
                crate::rational::q_int(1),
            ]),
            &QPoly::one(),
        )
        .unwrap();
        assert!(matches!(
            find_good_reduction_conjugacy(&m).unwrap(),
            GoodReductionSearch::CertifiedImpossible { .. }
        ));
    }

    #[test]
    fn verdicts_after_conjugation() {
        let ctx = ctx3();
        // the interior-identity map conjugated: still connected with census 1
        let psi = map(&ctx, &[3, 1, 3], &[1, 0, 9]);
        let pos = good_position(&psi).unwrap();
        let v = verdict_connected(&pos.map).unwrap();
        assert!(v.connected);
        let c = component_census(&psi, &pos).unwrap();
        assert_eq!(c.count, 1);
        // degree-drop map (z^2+3)/z: connected, census 1
        let m = map(&ctx, &[3, 0, 1], &[0, 1]);
        let pos = good_position(&m).unwrap();
        assert!(verdict_connected(&pos.map).unwrap().connected);
        assert!(!verdict_finite(&pos.map).unwrap());
        let c = component_census(&m, &pos).unwrap();
        assert_eq!(c.count, 1);
    }

    #[test]
    fn interior_point_found_through_the_conjugation() {
        // (z^2+z+p)/(z+1) reduces to the identity after cancellation, so the
        // input Gauss point is an identity-tangent interior point of the
        // component; the good-reduction chart lives at radius 3^(-1/2)
        let ctx = ctx3();
        let m = map(&ctx, &[3, 1, 1], &[1, 1]);
        assert!(m.reduce().unwrap().is_identity());
        let pos = good_position(&m).unwrap();
        assert_eq!(pos.fixed_point.rlog(), Some(Val::new(-1, 2)));
        let ends = component_ends(&m, &pos).unwrap();
        assert!(
            ends.iter()
                .any(|e| matches!(e, ComponentEnd::InteriorIdentity { .. })),
            "transported input Gauss point must be reported: {ends:?}"
        );
        // and the map fixes the disk of radius 1/3 around 0 with a
        // translation tangent there (an end of the component)
        let zeta13 = BerkPoint::type2(PadicElem::zero(&ctx), val_int(-1));
        let t = crate::berk::tangent_map_at(&m, &zeta13).unwrap();
        assert!(t.is_translation().unwrap());
        assert!(!t.is_identity());
    }

    #[test]
    fn oracle_fixture_patterns() {
        let ctx = ctx3();
        let grid = GridParams::default();
        // z^2 at p=3: fixed samples exactly along direction 1, none along 0
        // or infinity
        let m = map(&ctx, &[0, 0, 1], &[1]);
        let pos = good_position(&m).unwrap();
        let rep = oracle_verify(&m, &pos, &grid).unwrap();
        for arc in &rep.arcs {
            let any_fixed = arc.samples.iter().any(|(_, f)| *f);
            let all_fixed = arc.samples.iter().all(|(_, f)| *f);
            if arc.direction == "1" {
                assert!(all_fixed, "direction 1 must be fixed: {arc:?}");
            } else {
                assert!(!any_fixed, "only direction 1 may hold fixed samples: {arc:?}");
            }
        }
        // z^3 at p=3: no fixed type-2 samples anywhere
        let m = map(&ctx, &[0, 0, 0, 1], &[1]);
        let pos = good_position(&m).unwrap();
        let rep = oracle_verify(&m, &pos, &grid).unwrap();
        assert!(rep
            .arcs
            .iter()
            .all(|a| a.samples.iter().all(|(_, f)| !*f)));
        // the connected quadratic: initial segments along both fixed directions
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let pos = good_position(&m).unwrap();
        let rep = oracle_verify(&m, &pos, &grid).unwrap();
        let fixed_dirs: Vec<&ArcLog> =
            rep.arcs.iter().filter(|a| a.residually_fixed).collect();
        assert!(!fixed_dirs.is_empty());
        for arc in fixed_dirs {
            assert!(
                arc.samples.iter().all(|(_, f)| *f),
                "connected locus arcs fully fixed: {arc:?}"
            );
        }
    }

    #[test]
    fn analyze_cross_checks() {
        let ctx = ctx3();
        let opts = AnalysisOptions::default();
        for (num, den, connected, finite, count) in [
            (vec![1i64, 0, 1], vec![1i64, 1], true, false, 1),
            (vec![0, 0, 0, 1], vec![1], false, true, 5),
            (vec![0, 0, 1], vec![1], false, false, 3),
            (vec![9, 1, 1], vec![1, 0, 1], true, false, 1),
            (vec![3, 1, 3], vec![1, 0, 9], true, false, 1),
        ] {
            let m = map(&ctx, &num, &den);
            let rep = analyze(&m, &opts).unwrap();
            assert_eq!(rep.connected, connected, "{num:?}/{den:?}");
            assert_eq!(rep.finite, finite, "{num:?}/{den:?}");
            assert_eq!(rep.census.count, count, "{num:?}/{den:?}");
            assert!(rep.census.count <= rep.degree + 2);
            assert!(rep.oracle.is_some());
        }
    }

    #[test]
    fn ends_examples() {
        let ctx = ctx3();
        // the interior-identity map: interior point zeta_{0,1/3} with identity tangent
        let m = map(&ctx, &[9, 1, 1], &[1, 0, 1]);
        let pos = good_position(&m).unwrap();
        let ends = component_ends(&m, &pos).unwrap();
        let interior: Vec<_> = ends
            .iter()
            .filter_map(|e| match e {
                ComponentEnd::InteriorIdentity { point } => Some(point),
                _ => None,
            })
            .collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].rlog(), Some(val_int(-1)));
        // the connected quadratic: indifferent type-1 ends at 1 and infinity
        let m = map(&ctx, &[1, 0, 1], &[1, 1]);
        let pos = good_position(&m).unwrap();
        let ends = component_ends(&m, &pos).unwrap();
        let indiff: Vec<_> = ends
            .iter()
            .filter(|e| matches!(e, ComponentEnd::IndifferentType1 { .. }))
            .collect();
        assert_eq!(indiff.len(), 2);
        // z^2 at p=3: one indifferent end toward 1
        let m = map(&ctx, &[0, 0, 1], &[1]);
        let pos = good_position(&m).unwrap();
        let ends = component_ends(&m, &pos).unwrap();
        let indiff: Vec<_> = ends
            .iter()
            .filter(|e| matches!(e, ComponentEnd::IndifferentType1 { .. }))
            .collect();
        assert_eq!(indiff.len(), 1);
    }
}
