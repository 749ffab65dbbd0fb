use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use edgelab::families::{builtin, BuiltinFamilyId};
use edgelab::framework::{Configuration, EdgeLabeling};
use edgelab::poly::{sign_of, Point, Polynomial, Rat};
use edgelab::spec_file::FamilySpec;

const VARS: usize = 3;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=8).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn positive_rat() -> impl Strategy<Value = Rat> {
    (1i64..=40, 1i64..=8).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(small_rat(), dim)
}

fn poly(max_exp: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, VARS), small_rat()), 0..6)
        .prop_map(|terms| Polynomial::from_terms(VARS, terms).unwrap())
}

/// Polynomials of total degree at most 2, for which the central difference
/// is exact.
fn quadratic() -> impl Strategy<Value = Polynomial> {
    poly(2).prop_map(|p| {
        let kept: Vec<_> = p.terms().filter(|(e, _)| e.iter().sum::<u32>() <= 2).map(|(e, c)| (e.clone(), c.clone())).collect();
        Polynomial::from_terms(VARS, kept).unwrap()
    })
}

fn add(a: &[Rat], b: &[Rat]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

proptest! {
    #[test]
    fn eval_is_a_ring_homomorphism(p in poly(3), q in poly(3), x in point(VARS)) {
        let (px, qx) = (p.eval(&x).unwrap(), q.eval(&x).unwrap());
        prop_assert_eq!((&p + &q).eval(&x).unwrap(), &px + &qx);
        prop_assert_eq!((&p - &q).eval(&x).unwrap(), &px - &qx);
        prop_assert_eq!((&p * &q).eval(&x).unwrap(), &px * &qx);
        prop_assert_eq!(p.pow(2).eval(&x).unwrap(), &px * &px);
    }

    #[test]
    fn positive_scaling_keeps_signs(p in poly(3), c in positive_rat(), x in point(VARS)) {
        prop_assert_eq!(sign_of(&p.scale(&c).eval(&x).unwrap()), sign_of(&p.eval(&x).unwrap()));
        prop_assert_eq!(sign_of(&p.scale(&-c).eval(&x).unwrap()), sign_of(&p.eval(&x).unwrap()).flip());
    }

    #[test]
    fn gradient_matches_central_difference(p in quadratic(), x in point(VARS), h in positive_rat()) {
        let grad = p.gradient(&x).unwrap();
        for i in 0..VARS {
            let mut e = vec![Rat::zero(); VARS];
            e[i] = h.clone();
            let minus: Point = e.iter().map(|v| -v).collect();
            let diff = p.eval(&add(&x, &e)).unwrap() - p.eval(&add(&x, &minus)).unwrap();
            prop_assert_eq!(&grad[i], &(diff / (&h * Rat::from_integer(2.into()))));
            prop_assert_eq!(&grad[i], &p.partial_derivative(i).eval(&x).unwrap());
        }
    }

    #[test]
    fn restrictions_agree_with_evaluation(p in poly(3), base in point(VARS), dir in point(VARS), t in small_rat()) {
        let on_line: Point = base.iter().zip(&dir).map(|(b, v)| b + &t * v).collect();
        let expected = p.eval(&on_line).unwrap();
        prop_assert_eq!(p.restrict_to_line(&base, &dir).unwrap().eval(&t), expected.clone());
        prop_assert_eq!(p.shift(&base).unwrap().eval(&dir).unwrap(), p.eval(&add(&base, &dir)).unwrap());
        let fixed = p.fix_prefix(&on_line[..1]).unwrap();
        prop_assert_eq!(fixed.eval(&on_line[1..]).unwrap(), expected);
    }

    #[test]
    fn term_list_round_trip(p in poly(4)) {
        let json = serde_json::to_string(&p.to_term_list()).unwrap();
        let back = Polynomial::from_term_list(VARS, &serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn labeling_restricts_to_subconfigurations(
        pts in prop::collection::vec(point(3), 2..6),
        drop in 0usize..6,
    ) {
        let fam = builtin(BuiltinFamilyId::Disks);
        let pts: Vec<Point> = pts.into_iter().map(|mut p| { p[2] = p[2].abs() + Rat::one(); p }).collect();
        let cfg = Configuration::new(pts);
        let drop = drop % cfg.len();
        let full = fam.label_configuration(&cfg).unwrap();
        let sub = fam.label_configuration(&cfg.without(drop)).unwrap();
        prop_assert_eq!(full.without(drop), sub);
        let rec = full.to_record(&fam.lambda);
        let json = serde_json::to_string(&rec).unwrap();
        prop_assert_eq!(EdgeLabeling::from_record(&serde_json::from_str(&json).unwrap(), &fam.lambda).unwrap(), full);
    }

    #[test]
    fn scaling_predicates_keeps_labels(a in point(3), b in point(3), c in positive_rat()) {
        let fam = builtin(BuiltinFamilyId::Disks);
        let mut scaled = fam.clone();
        scaled.preds = fam.preds.iter().map(|p| p.scaled(&c)).collect();
        let fix = |mut p: Point| { p[2] = p[2].abs() + Rat::one(); p };
        let (a, b) = (fix(a), fix(b));
        prop_assume!(a != b);
        prop_assert_eq!(fam.pair_label(&a, &b).unwrap(), scaled.pair_label(&a, &b).unwrap());
    }
}

#[test]
fn family_files_round_trip() {
    for id in BuiltinFamilyId::all_examples() {
        let fam = builtin(id);
        let spec = FamilySpec::from_family(&fam);
        let back = FamilySpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec, "{id}");
        let again = back.to_family().unwrap();
        assert_eq!(again.preds.len(), fam.preds.len());
        assert_eq!(FamilySpec::from_family(&again), spec, "{id}");
    }
}
