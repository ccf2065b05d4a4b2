//! Newton polygons: the lower convex hull of coefficient valuations.
//!
//! A segment of slope -s and horizontal length l certifies exactly l roots
//! of valuation s in the algebraic closure, counted with multiplicity. The
//! certified constructor additionally accepts coefficients whose valuation
//! is only bounded below; the polygon is returned only when those bounds
//! cannot change the hull.

use crate::error::{Error, Result};
use crate::val::{Val, ValOrInf};

/// Valuation knowledge about one coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoeffVal {
    Exact(Val),
    /// Exactly zero: never part of the hull.
    Zero,
    /// v >= bound, possibly infinite.
    AtLeast(Val),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    /// Trailing exact-zero coefficients: the polynomial is x^ord * (unit
    /// constant term part).
    pub x_power: usize,
    /// (slope, horizontal length), slopes strictly increasing.
    pub segments: Vec<(Val, usize)>,
}

impl NewtonPolygon {
    /// Polygon from exactly known valuations. `None` entries are exact zero
    /// coefficients.
    pub fn from_valuations(vals: &[Option<Val>]) -> Result<NewtonPolygon> {
        let coeffs: Vec<CoeffVal> = vals
            .iter()
            .map(|v| match v {
                Some(v) => CoeffVal::Exact(*v),
                None => CoeffVal::Zero,
            })
            .collect();
        NewtonPolygon::certified(&coeffs)
    }

    /// Polygon from partially known valuations. Fails with
    /// `PrecisionExhausted` when an `AtLeast` bound dips below the hull of
    /// the exactly known points (the hull could then depend on the unknown
    /// digits), and with `ZeroPolynomial` when nothing is exactly nonzero.
    pub fn certified(coeffs: &[CoeffVal]) -> Result<NewtonPolygon> {
        let pts: Vec<(usize, Val)> = coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                CoeffVal::Exact(v) => Some((i, *v)),
                _ => None,
            })
            .collect();
        if pts.is_empty() {
            if coeffs.iter().all(|c| matches!(c, CoeffVal::Zero)) {
                return Err(Error::ZeroPolynomial);
            }
            return Err(Error::PrecisionExhausted(
                "no coefficient with certified valuation".into(),
            ));
        }
        let first = pts.first().unwrap().0;
        let last = pts.last().unwrap().0;
        // every partially known coefficient must sit on or above the hull of
        // the exact points, and inside their index range
        let hull = lower_hull(&pts);
        for (i, c) in coeffs.iter().enumerate() {
            if let CoeffVal::AtLeast(b) = c {
                if i < first || i > last {
                    return Err(Error::PrecisionExhausted(format!(
                        "coefficient {i} is only bounded and lies outside the certified range"
                    )));
                }
                if ValOrInf::Finite(*b) < hull_height(&hull, i) {
                    return Err(Error::PrecisionExhausted(format!(
                        "coefficient {i} bound {b} dips below the hull"
                    )));
                }
            }
        }
        let mut segments = vec![];
        for pair in hull.windows(2) {
            let (i0, v0) = pair[0];
            let (i1, v1) = pair[1];
            let len = i1 - i0;
            let slope = (v1 - v0) / Val::from_integer(len as i64);
            segments.push((slope, len));
        }
        Ok(NewtonPolygon {
            x_power: first,
            segments,
        })
    }

    /// Total number of roots accounted for (degree minus x_power).
    pub fn total_length(&self) -> usize {
        self.segments.iter().map(|(_, l)| l).sum()
    }

    /// Number of roots (with multiplicity, excluding the x^ord roots at 0)
    /// whose valuation satisfies the predicate. Root valuation = -slope.
    pub fn count_roots<F: Fn(Val) -> bool>(&self, pred: F) -> usize {
        self.segments
            .iter()
            .filter(|(s, _)| pred(-*s))
            .map(|(_, l)| l)
            .sum()
    }

    /// Multiset of root valuations, one entry per segment.
    pub fn root_valuations(&self) -> Vec<(Val, usize)> {
        self.segments.iter().map(|&(s, l)| (-s, l)).collect()
    }
}

fn lower_hull(pts: &[(usize, Val)]) -> Vec<(usize, Val)> {
    let mut hull: Vec<(usize, Val)> = vec![];
    for &(x, y) in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2,y2) if it lies on or above the chord (x1,y1)-(x,y)
            let lhs = (y2 - y1) * Val::from_integer((x - x1) as i64);
            let rhs = (y - y1) * Val::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

fn hull_height(hull: &[(usize, Val)], i: usize) -> ValOrInf {
    if hull.len() == 1 {
        return if i == hull[0].0 {
            ValOrInf::Finite(hull[0].1)
        } else {
            ValOrInf::Infinite
        };
    }
    for pair in hull.windows(2) {
        let (x1, y1) = pair[0];
        let (x2, y2) = pair[1];
        if i >= x1 && i <= x2 {
            let t = Val::new((i - x1) as i64, (x2 - x1) as i64);
            return ValOrInf::Finite(y1 + (y2 - y1) * t);
        }
    }
    ValOrInf::Infinite
}
