//! Exhaustive small-case invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subdesign::constructions::{
    build_design, find_omega, generalized_vandermonde, sigma_bounds, CoefficientScheme, Family,
};
use subdesign::designs::{
    find_blocker_exhaustive, hp_check, is_generator_set, measure, Scan, DEFAULT_BUDGET,
};
use subdesign::exterior::{meets, pluecker, PlueckerVector};
use subdesign::grassmann::{gaussian_binomial, grass_degree, random_subspace, Grassmannian};
use subdesign::{make_field, Field, Subspace};

fn gf(p: u64) -> Field {
    make_field(p, 1, None).unwrap()
}

#[test]
fn double_complement_and_rank_nullity() {
    for p in [2, 3, 5] {
        let f = gf(p);
        for m in 0..=5 {
            if p == 5 && m == 5 {
                continue;
            }
            for r in 0..=m {
                for u in Grassmannian::new(&f, m, r).unwrap().iter() {
                    let perp = u.orthogonal_complement();
                    assert_eq!(perp.rank(), m - r);
                    assert_eq!(perp.orthogonal_complement(), u);
                }
            }
        }
    }
}

#[test]
fn double_complement_gf5_m5() {
    let f = gf(5);
    for r in [1, 2] {
        for u in Grassmannian::new(&f, 5, r).unwrap().iter() {
            assert_eq!(u.orthogonal_complement().orthogonal_complement(), u);
        }
    }
}

#[test]
fn gaussian_binomial_symmetry() {
    for q in [2, 3, 4, 5, 7, 9] {
        for m in 0..=8 {
            for r in 0..=m {
                assert_eq!(
                    gaussian_binomial(m, r, q).unwrap(),
                    gaussian_binomial(m, m - r, q).unwrap()
                );
            }
        }
    }
    for r in 1..=8 {
        for s in 1..=8 {
            assert!(grass_degree(r, s) >= 1u32.into());
            assert_eq!(grass_degree(r, s), grass_degree(s, r));
        }
    }
}

#[test]
fn meet_criterion_m5() {
    for p in [2, 3] {
        let f = gf(p);
        for r in 1..=4 {
            let hs: Vec<Subspace> = Grassmannian::new(&f, 5, r).unwrap().iter().collect();
            let ws: Vec<Subspace> = Grassmannian::new(&f, 5, 5 - r).unwrap().iter().collect();
            let step = if p == 3 { 7 } else { 1 };
            for h in hs.iter().step_by(step) {
                for w in &ws {
                    assert_eq!(meets(h, w).unwrap(), h.meet_rank(w).unwrap() > 0);
                }
            }
        }
    }
}

#[test]
fn relations_hold_on_all_of_gf2_5() {
    let f = gf(2);
    for r in 1..=5 {
        for h in Grassmannian::new(&f, 5, r).unwrap().iter() {
            assert!(pluecker(&h).unwrap().relations_check());
        }
    }
}

#[test]
fn non_decomposable_vector_is_caught() {
    let f = gf(3);
    let v = PlueckerVector::from_entries(&f, 4, 2, &[(vec![0, 1], f.one()), (vec![2, 3], f.one())])
        .unwrap();
    let bad = v.first_violation().unwrap();
    assert!(!bad.value.is_zero());
}

#[test]
fn modular_law_on_random_pairs() {
    let f = make_field(3, 2, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let m = rng.gen_range(1..=5);
        let u = random_subspace(&f, m, rng.gen_range(0..=m), &mut rng).unwrap();
        let v = random_subspace(&f, m, rng.gen_range(0..=m), &mut rng).unwrap();
        let meet = u.intersect(&v).unwrap();
        let join = u.join(&v).unwrap();
        assert_eq!(meet.rank() + join.rank(), u.rank() + v.rank());
        assert!(u.contains(&meet).unwrap() && v.contains(&meet).unwrap());
    }
}

#[test]
fn closed_form_matches_every_member() {
    let cases: Vec<(u64, u32, Family, usize, usize)> = vec![
        (7, 1, Family::Tangent, 2, 2),
        (11, 1, Family::Tangent, 3, 2),
        (11, 1, Family::Tangent, 2, 4),
        (5, 1, Family::Secant, 2, 2),
        (3, 2, Family::Secant, 3, 3),
        (7, 1, Family::Diverted, 2, 3),
        (13, 1, Family::Diverted, 3, 3),
    ];
    for (p, h, fam, r, s) in cases {
        let f = make_field(p, h, None).unwrap();
        let omega = match fam {
            Family::Tangent => None,
            _ => Some(find_omega(&f, r, s, fam).unwrap().expect("omega exists")),
        };
        let sch = CoefficientScheme::new(&f, fam, r, s, omega).unwrap();
        let design = build_design(&sch).unwrap();
        assert_eq!(design.len() as u64, f.order());
        for m in design.members() {
            let expected = PlueckerVector::from_coords(&f, r + s, r, sch.closed_form(m.t)).unwrap();
            assert_eq!(m.pluecker, expected);
            assert_eq!(pluecker(&m.subspace).unwrap(), m.pluecker);
        }
    }
}

#[test]
fn tangent_coefficients_nonzero_above_characteristic() {
    for p in [5u64, 7, 11, 13] {
        let f = gf(p);
        for r in 1..=4 {
            for s in 1..=4 {
                if (p as usize) <= r + s {
                    continue;
                }
                let sch = CoefficientScheme::new(&f, Family::Tangent, r, s, None).unwrap();
                assert!(sch.check_coeffs_nonzero(), "p={p} r={r} s={s}");
            }
        }
    }
}

#[test]
fn vandermonde_product_formula() {
    let f = gf(13);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=5 {
        for _ in 0..20 {
            let a: Vec<_> = (0..n)
                .map(|_| f.element(rng.gen_range(0..13)).unwrap())
                .collect();
            let exps: Vec<u64> = (0..n as u64).collect();
            let mut prod = f.one();
            for i in 0..n {
                for j in i + 1..n {
                    prod = f.mul(prod, f.sub(a[j], a[i]));
                }
            }
            assert_eq!(generalized_vandermonde(&f, &exps, &a).unwrap(), prod);
        }
    }
}

#[test]
fn leading_degree_bound_holds() {
    for r in 1..=6i64 {
        for dr in 0..=6i64 {
            let d = dr + r;
            let n_max = r.min(dr + 1) as usize;
            for n in 1..=n_max {
                // the largest Σ(ident) comes from the top j and b values
                let j: Vec<i64> = (r - n as i64..r).collect();
                let b: Vec<i64> = (dr + 1 - n as i64..=dr).collect();
                let sb = sigma_bounds(&j, &b, d, r).unwrap();
                assert!(
                    num_rational::Ratio::from_integer(sb.sigma_ident) <= sb.leading_degree_bound,
                    "r={r} d={d} N={n}: {} > {}",
                    sb.sigma_ident,
                    sb.leading_degree_bound
                );
                assert!(sb.sigma_ident - sb.sigma_opp <= sb.root_count_bound);
            }
        }
    }
}

/// Up to |F| members, a 1-generator set of lines is exactly a set with no
/// blocking line.
#[test]
fn generator_iff_no_blocker_small_fields() {
    for p in [2u64, 3] {
        let f = gf(p);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for _ in 0..30 {
            let n = rng.gen_range(1..=p as usize);
            let members: Vec<Subspace> = (0..n)
                .map(|_| random_subspace(&f, 4, 2, &mut rng).unwrap())
                .collect();
            let gen = is_generator_set(&members, 1, &Scan::exhaustive())
                .unwrap()
                .is_generator;
            let blocker = find_blocker_exhaustive(&members, 2, DEFAULT_BUDGET).unwrap();
            assert_eq!(gen, blocker.is_none());
        }
    }
}

#[test]
fn hp_beyond_field_size_is_flagged() {
    let f = gf(2);
    let lines: Vec<Subspace> = Grassmannian::new(&f, 4, 2)
        .unwrap()
        .iter()
        .take(4)
        .collect();
    let v = hp_check(&lines, DEFAULT_BUDGET).unwrap();
    assert!(v.equivalence_hypothesis_failed);
    assert_eq!(
        v.is_generator,
        is_generator_set(&lines, 1, &Scan::exhaustive())
            .unwrap()
            .is_generator
    );
}

#[test]
fn subsets_above_weak_parameter_are_hp() {
    let f = gf(7);
    let sch = CoefficientScheme::new(&f, Family::Tangent, 2, 2, None).unwrap();
    let members = build_design(&sch).unwrap().subspaces();
    let a = measure(&members, 2, &Scan::exhaustive())
        .unwrap()
        .weak
        .value;
    assert!(a < 7);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let mut pick: Vec<Subspace> = members.clone();
        while pick.len() > a + 1 {
            pick.remove(rng.gen_range(0..pick.len()));
        }
        assert!(hp_check(&pick, DEFAULT_BUDGET).unwrap().is_generator);
    }
}

#[test]
fn weak_strong_sandwich_on_designs() {
    for (p, fam, r, s) in [
        (5u64, Family::Secant, 2, 2),
        (7, Family::Tangent, 2, 2),
        (7, Family::Diverted, 2, 2),
        (7, Family::Diverted, 1, 3),
    ] {
        let f = gf(p);
        let omega = match fam {
            Family::Tangent => None,
            _ => find_omega(&f, r, s, fam).unwrap(),
        };
        let sch = CoefficientScheme::new(&f, fam, r, s, omega).unwrap();
        let design = build_design(&sch).unwrap();
        let m = measure(&design.subspaces(), s, &Scan::exhaustive()).unwrap();
        assert!(m.sandwich_holds(r, s));
    }
}
