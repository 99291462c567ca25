use fano::conic::*;
use fano::field::INTERPOLATION_PRIME;
use fano::instance::random_instance;
use fano::rng::stream;
use fano::roots::ProjRoot;
use fano::sextic::{corank2_sample, dual_pencil};
use fano::{FieldSpec, Fp};

fn big() -> FieldSpec {
    FieldSpec::Prime {
        p: INTERPOLATION_PRIME,
    }
}

#[test]
fn fifty_conic_pipeline() {
    let z = random_instance(1, big(), 21).unwrap();
    let rep = conic_pipeline(&z, 50, 1).unwrap();
    assert_eq!(rep.samples, 50);
    assert_eq!(rep.structural_failures(), 0, "{:?}", rep.failures);
    assert_eq!(rep.tau, 50);
    assert!(rep.kappa >= 48, "{rep:?}");
}

#[test]
fn corank_two_member_has_one_family_of_planes() {
    let z = random_instance(1, FieldSpec::Prime { p: 101 }, 3).unwrap();
    let ctx = z.ctx();
    let f = Fp::new(101).unwrap();
    let found = corank2_sample(&z, 3, 0, 7).unwrap().found;
    assert_eq!(found.len(), 3);
    let mut rng = stream(2, "planes");
    for pt in found {
        let pencil = dual_pencil(&ctx, &pt.w).unwrap();
        let member = pencil.member(
            &f,
            &ProjRoot {
                lambda: pt.member[0],
                mu: pt.member[1],
            },
        );
        let planes = sample_member_planes(&f, &member, 6, &mut rng).unwrap();
        assert_eq!(ruling_classes(&f, &member, &planes).unwrap(), 1);
    }
}

#[test]
fn kappa_negative_control() {
    let (inst, c) = conic_through_vertex(31, 2).unwrap();
    assert!(!kappa_criterion(&inst, &c).unwrap().nondegenerate);
}

#[test]
fn special_families_over_small_fields() {
    for (p, seed) in [(3, 1), (5, 2), (7, 3)] {
        let inst = random_instance(1, FieldSpec::Prime { p }, seed).unwrap();
        let rep = special_family_checks(&inst, 20, seed).unwrap();
        assert!(rep.passed(), "p = {p}: {rep:?}");
        assert_eq!((rep.rho_planes, rep.sigma_planes), (20, 20));
    }
}
