//! Module-level invariant suites, driven by seeded deterministic sampling.

use berklocus::berk::{big_metric, image_of_point, join, seminorm_poly, BerkPoint, Rho};
use berklocus::field::{FieldContext, ResPoint};
use berklocus::ffpoly::FFPoly;
use berklocus::fixtures::{corpus, Outcome};
use berklocus::locus::good_position;
use berklocus::padic::PadicElem;
use berklocus::parse::parse_expression;
use berklocus::ppoly::PPoly;
use berklocus::ratmap::{FixedClass, MobiusMap, RationalMap, ResFixed};
use berklocus::rational::{q_int, QPoly};
use berklocus::roots::isolate_roots;
use berklocus::val::{Val, ValOrInf};

struct Xorshift(u64);

impl Xorshift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }
}

#[test]
fn residue_is_a_ring_homomorphism() {
    let ctx = FieldContext::new(5, 2, 1, 32).unwrap();
    let mut rng = Xorshift(11);
    for _ in 0..100 {
        let a = PadicElem::from_int(&ctx, rng.int(0, 500));
        let b = PadicElem::from_int(&ctx, rng.int(0, 500));
        assert_eq!(
            a.add(&b).residue().unwrap(),
            a.residue().unwrap().add(&b.residue().unwrap())
        );
        assert_eq!(
            a.mul(&b).residue().unwrap(),
            a.residue().unwrap().mul(&b.residue().unwrap())
        );
    }
}

#[test]
fn ff_gcd_divides_and_is_divided() {
    // gcd divides both inputs; every common divisor divides the gcd
    // (checked by brute-force divisor enumeration over F_2 and F_3)
    for p in [2u64, 3] {
        let ctx = FieldContext::new(p, 1, 1, 8).unwrap();
        let mut rng = Xorshift(23 + p);
        for _ in 0..40 {
            let f = FFPoly::from_ints(
                &ctx,
                &(0..4).map(|_| rng.int(0, p as i64 - 1)).collect::<Vec<_>>(),
            );
            let g = FFPoly::from_ints(
                &ctx,
                &(0..4).map(|_| rng.int(0, p as i64 - 1)).collect::<Vec<_>>(),
            );
            if f.is_zero() && g.is_zero() {
                continue;
            }
            let d = f.gcd(&g);
            if !f.is_zero() {
                assert!(f.rem(&d).is_zero());
            }
            if !g.is_zero() {
                assert!(g.rem(&d).is_zero());
            }
            // enumerate monic divisors of low degree
            for mask in 0..(p.pow(3)) {
                let mut c = vec![];
                let mut m = mask;
                for _ in 0..2 {
                    c.push((m % p) as i64);
                    m /= p;
                }
                c.push(1);
                let cand = FFPoly::from_ints(&ctx, &c);
                let divides_both = (f.is_zero() || f.rem(&cand).is_zero())
                    && (g.is_zero() || g.rem(&cand).is_zero());
                if divides_both {
                    assert!(
                        d.rem(&cand).is_zero(),
                        "common divisor {cand} does not divide gcd {d}"
                    );
                }
            }
        }
    }
}

#[test]
fn closure_roots_account_for_the_degree() {
    let ctx = FieldContext::new(3, 1, 1, 8).unwrap();
    let mut rng = Xorshift(37);
    for _ in 0..60 {
        let coeffs: Vec<i64> = (0..5).map(|_| rng.int(0, 2)).collect();
        let f = FFPoly::from_ints(&ctx, &coeffs);
        if f.is_zero() || f.degree() == 0 {
            continue;
        }
        let (ext, roots) = f.roots_in_closure().unwrap();
        let total: usize = roots.iter().map(|(_, m)| m).sum();
        assert_eq!(total, f.degree());
        // every claimed root evaluates to zero in its field
        let emb = berklocus::ffpoly::ResidueEmbedding::new(&ctx, &ext).unwrap();
        let lifted = emb.map_poly(&f);
        for (r, _) in &roots {
            assert!(lifted.eval(r).is_zero());
        }
    }
}

#[test]
fn squarefree_part_has_no_repeated_roots() {
    let ctx = FieldContext::new(3, 1, 1, 8).unwrap();
    let mut rng = Xorshift(41);
    for _ in 0..60 {
        let coeffs: Vec<i64> = (0..4).map(|_| rng.int(0, 2)).collect();
        let f = FFPoly::from_ints(&ctx, &coeffs);
        if f.is_zero() {
            continue;
        }
        let sf = f.squarefree_part().unwrap();
        if sf.degree() == 0 {
            continue;
        }
        let d = sf.derivative();
        assert!(
            d.is_zero() && sf.degree() == 0 || sf.gcd(&d).degree() == 0,
            "squarefree part {sf} shares roots with its derivative"
        );
    }
}

#[test]
fn padic_newton_polygon_matches_isolated_roots() {
    // construct products of (z - a) with known valuations; the polygon and
    // the isolation must report the same multiset
    let ctx = FieldContext::new(3, 1, 1, 48).unwrap();
    let mut rng = Xorshift(53);
    for _ in 0..40 {
        let n = rng.int(1, 3) as usize;
        let mut f = QPoly::one();
        let mut expected: Vec<Val> = vec![];
        let mut used = vec![];
        for _ in 0..n {
            let v = rng.int(-2, 2);
            let unit = loop {
                let u = rng.int(1, 8);
                if u % 3 != 0 && !used.contains(&(u, v)) {
                    break u;
                }
            };
            used.push((unit, v));
            let a = if v >= 0 {
                q_int(unit * 3i64.pow(v as u32))
            } else {
                berklocus::rational::q_ratio(unit, 3i64.pow((-v) as u32))
            };
            expected.push(Val::from_integer(v));
            f = f.mul(&QPoly::new(vec![-a, q_int(1)]));
        }
        if f.gcd(&f.derivative()).degree() > 0 {
            continue;
        }
        let pf = PPoly::from_rational_poly(&ctx, &f);
        let np = pf.newton_polygon().unwrap();
        let mut from_polygon: Vec<Val> = vec![];
        for (rv, len) in np.root_valuations() {
            for _ in 0..len {
                from_polygon.push(rv);
            }
        }
        from_polygon.sort();
        expected.sort();
        assert_eq!(from_polygon, expected);
        let iso = isolate_roots(&ctx, &f).unwrap();
        let mut from_iso: Vec<Val> = iso
            .roots
            .iter()
            .map(|r| match r.valuation().unwrap() {
                ValOrInf::Finite(v) => v,
                ValOrInf::Infinite => panic!("constructed roots are nonzero"),
            })
            .collect();
        from_iso.sort();
        assert_eq!(from_iso, expected);
    }
}

#[test]
fn reduction_is_scaling_invariant() {
    let ctx = FieldContext::new(3, 1, 1, 32).unwrap();
    let mut rng = Xorshift(67);
    for _ in 0..50 {
        let d = rng.int(2, 3) as usize;
        let num: Vec<i64> = (0..=d).map(|_| rng.int(-9, 9)).collect();
        let den: Vec<i64> = (0..=d).map(|_| rng.int(-9, 9)).collect();
        let (num, den) = (QPoly::from_ints(&num), QPoly::from_ints(&den));
        if num.is_zero() || den.is_zero() || num.degree().max(den.degree()) < 2 {
            continue;
        }
        let Ok(m1) = RationalMap::from_exprs(&ctx, &num, &den) else {
            continue;
        };
        let c = berklocus::rational::q_ratio(rng.int(1, 50), 3i64.pow(rng.int(0, 3) as u32));
        let Ok(m2) = RationalMap::from_exprs(&ctx, &num.scale(&c), &den.scale(&c)) else {
            continue;
        };
        assert_eq!(m1.reduce().unwrap(), m2.reduce().unwrap());
    }
}

#[test]
fn fixed_point_count_bound() {
    // distinct finite fixed points plus infinity never exceed degree + 1
    let ctx = FieldContext::new(3, 1, 1, 48).unwrap();
    let mut rng = Xorshift(71);
    let mut done = 0;
    while done < 40 {
        let d = rng.int(2, 4) as usize;
        let num: Vec<i64> = (0..=d).map(|_| rng.int(-9, 9)).collect();
        let den: Vec<i64> = (0..=d).map(|_| rng.int(-9, 9)).collect();
        let (num, den) = (QPoly::from_ints(&num), QPoly::from_ints(&den));
        if num.is_zero() || num.degree().max(den.degree()) < 2 {
            continue;
        }
        let Ok(m) = RationalMap::from_exprs(&ctx, &num, &den) else {
            continue;
        };
        if m.degree() < 2 {
            continue;
        }
        let Ok(points) = m.classify_fixed_points() else {
            continue; // wild clusters are legitimately unsupported
        };
        assert!(points.len() <= m.degree() + 1);
        done += 1;
    }
}

#[test]
fn good_reduction_fixed_points_are_non_repelling() {
    for f in corpus() {
        if f.outcome != Outcome::Report || f.good_reduction != Some(true) {
            continue;
        }
        let ctx = FieldContext::new(f.prime, 1, 1, 64).unwrap();
        let rf = parse_expression(&f.expr, f.prime).unwrap();
        let m = RationalMap::from_rat_func(&ctx, &rf).unwrap();
        for p in m.classify_fixed_points().unwrap() {
            assert_ne!(
                p.class,
                FixedClass::Repelling,
                "{}: good reduction maps have no repelling fixed points",
                f.name
            );
        }
    }
}

#[test]
fn join_laws_and_metric_axioms() {
    let ctx = FieldContext::new(3, 1, 1, 32).unwrap();
    let mut rng = Xorshift(83);
    let mut pts = vec![];
    for _ in 0..12 {
        pts.push(BerkPoint::type2(
            PadicElem::from_int(&ctx, rng.int(-30, 30)),
            Val::new(rng.int(-6, 6), 2),
        ));
    }
    for x in &pts {
        // idempotence
        assert!(join(x, x).unwrap().same_point(x).unwrap());
        for y in &pts {
            let jxy = join(x, y).unwrap();
            let jyx = join(y, x).unwrap();
            assert!(jxy.same_point(&jyx).unwrap(), "commutativity");
            assert!(jxy.rlog().unwrap() >= x.rlog().unwrap().max(y.rlog().unwrap()));
            // metric axioms
            let Rho::Finite(dxy) = big_metric(x, y).unwrap() else {
                panic!()
            };
            assert!(dxy >= Val::from_integer(0));
            assert_eq!(dxy == Val::from_integer(0), x.same_point(y).unwrap());
            for z in &pts {
                let Rho::Finite(dxz) = big_metric(x, z).unwrap() else {
                    panic!()
                };
                let Rho::Finite(dyz) = big_metric(y, z).unwrap() else {
                    panic!()
                };
                assert!(dxz <= dxy + dyz, "triangle inequality");
            }
        }
    }
}

#[test]
fn image_consistency_with_seminorms() {
    // for computed images xi = phi(zeta) and test values c:
    // log |z - c|_xi = log |num - c den|_zeta - log |den|_zeta
    let mut rng = Xorshift(97);
    for f in corpus() {
        if f.outcome != Outcome::Report {
            continue;
        }
        let ctx = FieldContext::new(f.prime, 1, 1, 64).unwrap();
        let rf = parse_expression(&f.expr, f.prime).unwrap();
        let m = RationalMap::from_rat_func(&ctx, &rf).unwrap();
        for _ in 0..8 {
            let zeta = BerkPoint::type2(
                PadicElem::from_int(&ctx, rng.int(-10, 10)),
                Val::from_integer(rng.int(-3, 2)),
            );
            let Ok(xi) = image_of_point(&m, &zeta) else {
                continue;
            };
            let p = f.prime as i64;
            for c in [
                q_int(0),
                q_int(1),
                q_int(2),
                q_int(p * p),
                berklocus::rational::q_ratio(1, p),
                berklocus::rational::q_ratio(-2, p * p),
            ] {
                let cv = PadicElem::from_rational(&ctx, &c);
                let lhs = seminorm_poly(
                    &PPoly::new(&ctx, vec![cv.neg(), PadicElem::one(&ctx)]),
                    &xi,
                )
                .unwrap();
                let shifted = m.num().sub(&m.den().scale(&cv));
                let rhs = seminorm_poly(&shifted, &zeta).unwrap()
                    - seminorm_poly(m.den(), &zeta).unwrap();
                assert_eq!(lhs, rhs, "{}: test value {c}", f.name);
            }
        }
    }
}

#[test]
fn totally_ramified_fixed_point_is_unique() {
    // at most one candidate certifies (the searched point is the point)
    for f in corpus() {
        if f.outcome != Outcome::Report || f.good_reduction != Some(false) {
            continue;
        }
        let ctx = FieldContext::new(f.prime, 1, 1, 64).unwrap();
        let rf = parse_expression(&f.expr, f.prime).unwrap();
        let m = RationalMap::from_rat_func(&ctx, &rf).unwrap();
        let pos = good_position(&m).unwrap();
        // re-derive candidates: joins of classified fixed points and
        // critical points; all that certify must be the same point
        let mut certified: Vec<BerkPoint> = vec![pos.fixed_point.clone()];
        let m_up = m.embed(pos.map.ctx()).unwrap();
        let mut values = vec![];
        if let Ok(points) = m_up.classify_fixed_points() {
            for p in points {
                if let Some(v) = p.value {
                    if p.home == *pos.map.ctx() {
                        values.push(v);
                    }
                }
            }
        }
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                let a = BerkPoint::from_value(values[i].clone());
                let b = BerkPoint::from_value(values[j].clone());
                let Ok(cand) = join(&a, &b) else { continue };
                if !cand.is_type2() {
                    continue;
                }
                let Ok(tau) = berklocus::berk::gauss_to(&cand) else {
                    continue;
                };
                let Ok(conj) = m_up.conjugate(&tau.inverse()) else {
                    continue;
                };
                if conj.is_good_reduction().unwrap_or(false) {
                    certified.push(cand);
                }
            }
        }
        for c in &certified {
            assert!(
                c.same_point(&certified[0]).unwrap(),
                "{}: two distinct totally ramified fixed points",
                f.name
            );
        }
    }
}

#[test]
fn residual_fixed_indices_sum_to_degree_plus_one() {
    for f in corpus() {
        if f.outcome != Outcome::Report || f.good_reduction != Some(true) {
            continue;
        }
        let ctx = FieldContext::new(f.prime, 1, 1, 64).unwrap();
        let rf = parse_expression(&f.expr, f.prime).unwrap();
        let m = RationalMap::from_rat_func(&ctx, &rf).unwrap();
        let red = m.reduce().unwrap();
        match red.fixed_points().unwrap() {
            ResFixed::Points { pts, .. } => {
                let total: usize = pts.iter().map(|(_, idx)| idx).sum();
                assert_eq!(total, red.degree() + 1, "{}", f.name);
            }
            ResFixed::All => panic!("good reduction of degree >= 2"),
        }
    }
}

#[test]
fn oracle_stays_on_the_base_residue_field() {
    // the residual fixed points of this map generate F_{5^6}; the oracle
    // must not drag closure factorizations into the refined sampling
    // context (that made this take minutes)
    use berklocus::locus::oracle_verify;
    let ctx = FieldContext::new(5, 1, 1, 64).unwrap();
    let m = RationalMap::from_exprs(
        &ctx,
        &QPoly::from_ints(&[-7, -14, 4, -7, -15]),
        &QPoly::from_ints(&[-17, 17, 20, -9, -9]),
    )
    .unwrap();
    let t0 = std::time::Instant::now();
    let pos = good_position(&m).unwrap();
    let rep = oracle_verify(&m, &pos, &berklocus::locus::GridParams::default()).unwrap();
    assert!(rep.arcs.len() >= 7);
    assert!(
        t0.elapsed().as_secs_f64() < 60.0,
        "oracle too slow: {:?}",
        t0.elapsed()
    );
}

#[test]
fn conjugation_preserves_reduction_degree() {
    let ctx = FieldContext::new(3, 1, 1, 32).unwrap();
    let mut rng = Xorshift(113);
    let m = RationalMap::from_exprs(
        &ctx,
        &QPoly::from_ints(&[1, 0, 1]),
        &QPoly::from_ints(&[1, 1]),
    )
    .unwrap();
    let mut done = 0;
    while done < 20 {
        let entries = [
            q_int(rng.int(-5, 5)),
            q_int(rng.int(-5, 5)),
            q_int(rng.int(-5, 5)),
            q_int(rng.int(-5, 5)),
        ];
        let Ok(sigma) = MobiusMap::from_rationals(&ctx, entries) else {
            continue;
        };
        let conj = m.conjugate(&sigma).unwrap();
        assert_eq!(conj.degree(), m.degree());
        let back = conj.conjugate(&sigma.inverse()).unwrap();
        assert_eq!(back.shadow().unwrap(), m.shadow().unwrap());
        done += 1;
    }
}
