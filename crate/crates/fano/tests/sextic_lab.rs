use fano::field::INTERPOLATION_PRIME;
use fano::instance::{random_chain, random_instance};
use fano::sextic::*;
use fano::{FieldSpec, Fp};

fn big() -> FieldSpec {
    FieldSpec::Prime {
        p: INTERPOLATION_PRIME,
    }
}

const SMALL: FieldSpec = FieldSpec::Prime { p: 101 };

#[test]
fn dual_sextic_is_unique_and_dual_to_primal() {
    for k in 0..2 {
        let inst = random_instance(k, big(), 100 + k as u64).unwrap();
        let f = inst.fp();
        let yd = dual_sextic(&inst, 1).unwrap();
        // disjoint samples give the same form
        let again = dual_sextic(&inst, 77).unwrap();
        assert!(yd.proportional(&f, &again));
        let y = primal_sextic(&inst, 2).unwrap();
        let rep = duality_check(&f, &y, &yd, 20, 3).unwrap();
        assert_eq!(rep.failures(), 0, "k = {k}: {rep:?}");

        let m = multiplicity_at(&f, &yd, &plucker_point(), 20, 4).unwrap();
        assert_eq!(m, k);
    }
}

#[test]
fn mismatched_sextics_fail_duality() {
    let a = random_instance(1, big(), 5).unwrap();
    let b = random_instance(1, big(), 6).unwrap();
    let f = a.fp();
    let y = primal_sextic(&a, 1).unwrap();
    let yd = dual_sextic(&b, 1).unwrap();
    let rep = duality_check(&f, &y, &yd, 10, 2).unwrap();
    assert!(rep.forward_failures > 0 && rep.backward_failures > 0);
}

#[test]
fn plucker_point_multiplicity_two_for_codimension_two() {
    let w = random_instance(2, big(), 8).unwrap();
    let f = w.fp();
    let yd = dual_sextic(&w, 1).unwrap();
    assert_eq!(
        multiplicity_at(&f, &yd, &plucker_point(), 20, 1).unwrap(),
        2
    );
}

#[test]
fn singular_locus_over_small_prime() {
    let z = random_instance(1, SMALL, 3).unwrap();
    let f = Fp::new(101).unwrap();
    let yd = dual_sextic(&z, 1).unwrap();
    let search = corank2_sample(&z, 10, 10_000, 2).unwrap();
    assert_eq!(search.found.len(), 10);
    assert!(search.max_corank() <= 2);
    for p in &search.found {
        assert_eq!(p.corank, 2);
        assert_eq!(yd.eval(&f, &p.h), 0);
        assert!(yd.gradient(&f, &p.h).iter().all(|x| *x == 0));
        assert_eq!(multiplicity_at(&f, &yd, &p.h, 20, 5).unwrap(), 2);
    }
}

#[test]
fn chain_containments() {
    let chain = random_chain(SMALL, 4).unwrap();
    let yz = dual_sextic(&chain.z, 1).unwrap();
    let sw = containment_sw(&chain, &yz, 10, 1).unwrap();
    assert_eq!(sw.failures, 0, "{sw:?}");
    let sx = containment_sx(&chain, &yz, 10, 2).unwrap();
    assert_eq!(sx.failures, 0, "{sx:?}");
    let other = random_chain(SMALL, 5).unwrap();
    let pts = corank2_sample(&other.w, 10, 0, 1).unwrap().found;
    let neg = containment_check(&chain.z, &yz, &pts).unwrap();
    assert!(neg.failures >= 8, "{neg:?}");
    assert_eq!(neg.agreements, 10, "{neg:?}");
}
