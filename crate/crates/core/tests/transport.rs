use std::collections::BTreeSet;

use catmn_core::fibered::{
    build_final_monad, build_initial_comonad, build_total_category, canonical_c2, random_spec, Limits,
};
use catmn_core::maxnormal::{check_mn_hypotheses, run_mn_pipeline, MNPair};
use catmn_core::monad::{
    check_idempotent_comonad, check_idempotent_monad, fixed_subcategory_comonad, fixed_subcategory_monad,
    ComonadDatum, MonadDatum,
};
use catmn_core::transport::{
    induce_comonad, induce_monad, powerset, transport, validate_equivalence, verify_transfer,
    ContravariantEquivalence,
};
use catmn_core::Obj;
use proptest::prelude::*;

fn names(c: &catmn_core::Category, objs: &[Obj]) -> Vec<String> {
    objs.iter().map(|&x| c.obj_id(x).to_string()).collect()
}

#[test]
fn c2_monad_becomes_a_comonad_fixing_the_images_of_tops() {
    let t = build_total_category(&canonical_c2()).unwrap();
    let (n, m) = (build_final_monad(&t).unwrap(), build_initial_comonad(&t).unwrap());
    let e = ContravariantEquivalence::relabeled_opposite(t.total());
    let r = transport(&e, &n, &m).unwrap();
    let d = e.d();

    let t_fixed = fixed_subcategory_comonad(&r.induced_comonad).unwrap().fixed_objects();
    assert_eq!(names(d, &t_fixed), vec!["op:(b0,top0)", "op:(b1,top1)"]);
    // In the opposite, the fiber tops are initial within their fibers.
    for &x in &t_fixed {
        let b = t.projection().obj(x);
        for y in t.total().objects().filter(|&y| t.projection().obj(y) == b) {
            assert_eq!(d.hom(x, y).len(), 1);
        }
    }
    let s_fixed = fixed_subcategory_monad(&r.induced_monad).unwrap().fixed_objects();
    assert_eq!(names(d, &s_fixed), vec!["op:(b0,bot0)", "op:(b1,bot1)"]);
}

#[test]
fn fixed_subcategory_of_the_induced_comonad_is_the_image_of_the_monad_one() {
    for seed in 0..20 {
        let t = build_total_category(&random_spec(seed, Limits::default()).unwrap()).unwrap();
        let n = build_final_monad(&t).unwrap();
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        let w = induce_comonad(&e, &n).unwrap();
        let on_c = fixed_subcategory_monad(&n).unwrap();
        let on_d = fixed_subcategory_comonad(&w).unwrap();
        let image: BTreeSet<Obj> = on_c.fixed_objects().iter().map(|&x| e.f().obj(x)).collect();
        let fixed: BTreeSet<Obj> = on_d.fixed_objects().into_iter().collect();
        assert_eq!(image, fixed, "seed {seed}");
        // Full subcategories with matching objects: hom-sets correspond with
        // arrows reversed.
        let (c, d) = (e.c(), e.d());
        for &x in &on_c.fixed_objects() {
            for &y in &on_c.fixed_objects() {
                assert_eq!(c.hom(x, y).len(), d.hom(e.f().obj(y), e.f().obj(x)).len());
            }
        }
    }
}

#[test]
fn identity_comonad_transports_to_an_identity_like_monad() {
    let t = build_total_category(&canonical_c2()).unwrap();
    let e = ContravariantEquivalence::relabeled_opposite(t.total());
    let s = induce_monad(&e, &ComonadDatum::identity(t.total().clone())).unwrap();
    let d = e.d();
    assert!(s.unit().components().iter().all(|&m| d.is_isomorphism(m)));
}

#[test]
fn failed_antecedents_are_noted() {
    let t = build_total_category(&canonical_c2()).unwrap();
    let (n, m) = (build_final_monad(&t).unwrap(), build_initial_comonad(&t).unwrap());
    let c = t.total().clone();
    let e = ContravariantEquivalence::relabeled_opposite(&c);

    // Keep the fiber-top monad but replace the comonad by the identity:
    // M η = η is not an isomorphism away from the tops.
    let idc = ComonadDatum::identity(c.clone());
    let r = transport(&e, &n, &idc).unwrap();
    let report = verify_transfer(&e, &n, &idc, &r);
    assert!(report.is_empty(), "{report}");
    assert_eq!(report.notes().len(), 1);
    assert!(report.notes()[0].starts_with("M eta"));

    let idm = MonadDatum::identity(c.clone());
    let r = transport(&e, &idm, &m).unwrap();
    let report = verify_transfer(&e, &idm, &m, &r);
    assert!(report.is_empty(), "{report}");
    assert_eq!(report.notes().len(), 1);
    assert!(report.notes()[0].starts_with("N psi"));
}

#[test]
fn identity_everything_transfers() {
    let t = build_total_category(&canonical_c2()).unwrap();
    let c = t.total().clone();
    let e = ContravariantEquivalence::relabeled_opposite(&c);
    let (n, m) = (MonadDatum::identity(c.clone()), ComonadDatum::identity(c.clone()));
    let r = transport(&e, &n, &m).unwrap();
    let report = verify_transfer(&e, &n, &m, &r);
    assert!(report.is_empty() && report.notes().is_empty(), "{report}");
}

#[test]
fn fifty_instances_transfer_and_pass_the_pipeline_on_the_opposite() {
    for seed in 0..50 {
        let t = build_total_category(&random_spec(seed, Limits::default()).unwrap()).unwrap();
        let (n, m) = (build_final_monad(&t).unwrap(), build_initial_comonad(&t).unwrap());
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        assert!(validate_equivalence(&e).is_empty());
        let r = transport(&e, &n, &m).unwrap();
        assert!(check_idempotent_comonad(&r.induced_comonad).is_empty());
        assert!(check_idempotent_monad(&r.induced_monad).is_empty());
        let report = verify_transfer(&e, &n, &m, &r);
        assert!(report.is_empty() && report.notes().is_empty(), "seed {seed}: {report}");
        let pair = MNPair::new(&r.induced_monad, &r.induced_comonad).unwrap();
        assert!(check_mn_hypotheses(&pair).is_empty());
        let run = run_mn_pipeline(&r.induced_monad, &r.induced_comonad);
        assert!(run.passed(), "seed {seed}: {:?}", run.failed_stage());
    }
}

/// All maps `P(a) -> P(b)` preserving the Boolean operations, with subsets
/// as sorted sets of points rather than bitmasks.
fn homomorphism_count(a: usize, b: usize) -> usize {
    let subsets = |n: usize| -> Vec<BTreeSet<usize>> {
        (0..1usize << n)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    };
    let (sa, sb) = (subsets(a), subsets(b));
    let full_b: BTreeSet<usize> = (0..b).collect();
    let mut count = 0;
    let total = sb.len().pow(sa.len() as u32);
    for code in 0..total {
        let h: Vec<&BTreeSet<usize>> = (0..sa.len()).map(|i| &sb[code / sb.len().pow(i as u32) % sb.len()]).collect();
        let img = |s: &BTreeSet<usize>| h[sa.iter().position(|t| t == s).unwrap()];
        let full_a: BTreeSet<usize> = (0..a).collect();
        let ok = img(&BTreeSet::new()).is_empty()
            && *img(&full_a) == full_b
            && sa.iter().all(|x| {
                let comp: BTreeSet<usize> = full_a.difference(x).copied().collect();
                let expect: BTreeSet<usize> = full_b.difference(img(x)).copied().collect();
                *img(&comp) == expect
                    && sa.iter().all(|y| {
                        let meet: BTreeSet<usize> = x.intersection(y).copied().collect();
                        let join: BTreeSet<usize> = x.union(y).copied().collect();
                        *img(&meet) == img(x).intersection(img(y)).copied().collect()
                            && *img(&join) == img(x).union(img(y)).copied().collect()
                    })
            });
        if ok {
            count += 1;
        }
    }
    count
}

#[test]
fn powerset_duality_matches_a_brute_force_count() {
    let e = powerset::equivalence().unwrap();
    let (c, d) = (e.c(), e.d());
    let size = |name: &str| name.matches(|ch: char| ch.is_ascii_digit()).count();
    for x in c.objects() {
        for y in c.objects() {
            let (a, b) = (size(c.obj_id(x).as_str()), size(c.obj_id(y).as_str()));
            // functions a -> b
            assert_eq!(c.hom(x, y).len(), b.pow(a as u32));
            // homomorphisms P(b) -> P(a) correspond to functions a -> b
            let (fx, fy) = (e.f().obj(x), e.f().obj(y));
            assert_eq!(d.hom(fy, fx).len(), homomorphism_count(b, a));
            assert_eq!(d.hom(fy, fx).len(), c.hom(x, y).len());
        }
    }
    let r = validate_equivalence(&e);
    assert!(r.is_empty(), "{r}");
}

#[test]
fn powerset_duality_with_identity_comonad() {
    let e = powerset::equivalence().unwrap();
    let s = induce_monad(&e, &ComonadDatum::identity(e.c().clone())).unwrap();
    assert!(check_idempotent_monad(&s).is_empty());
    let d = e.d();
    assert!(s.unit().components().iter().all(|&m| d.is_isomorphism(m)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transport_preserves_idempotence(seed in any::<u64>()) {
        let t = build_total_category(&random_spec(seed, Limits::default()).unwrap()).unwrap();
        let (n, m) = (build_final_monad(&t).unwrap(), build_initial_comonad(&t).unwrap());
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        let r = transport(&e, &n, &m).unwrap();
        prop_assert!(check_idempotent_comonad(&r.induced_comonad).is_empty());
        prop_assert!(check_idempotent_monad(&r.induced_monad).is_empty());
        prop_assert!(verify_transfer(&e, &n, &m, &r).is_empty());
    }

    #[test]
    fn opposite_of_opposite_round_trips(seed in any::<u64>()) {
        let t = build_total_category(&random_spec(seed, Limits::default()).unwrap()).unwrap();
        let e = ContravariantEquivalence::relabeled_opposite(t.total());
        let back = ContravariantEquivalence::relabeled_opposite(e.d());
        prop_assert_eq!(back.d().num_morphisms(), t.total().num_morphisms());
        prop_assert_eq!(&back.d().opposite().opposite(), &**back.d());
    }
}
