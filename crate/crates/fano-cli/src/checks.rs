//! One function per verb; each returns the reports of the claims it checked.

use anyhow::{bail, Context, Result};
use fano::conic::{
    classify_conic, conic_pipeline, sample_conic, special_family_checks, ConicClass, ConicShape,
};
use fano::deform::{
    appendix_oracle, appendix_rank_stats, conic_tangent_dim, doubleline_hom_dim,
    instance_containing_conic, splitting_type, ParametrizedConic,
};
use fano::instance::{plane_search, FanoChain, FanoInstance, GushelInstance};
use fano::poly::fit_form;
use fano::report::VerificationReport;
use fano::rng::{stream, substream};
use fano::sextic::*;
use fano::{bott, Error, Field, FieldSpec};
use serde_json::json;

/// Largest prime for which corank-two members are searched for by random sampling.
pub const SMALL_PRIME_LIMIT: u64 = 1009;

fn digest(inst: &FanoInstance) -> Option<String> {
    Some(inst.digest())
}

fn require_k(inst: &FanoInstance, ks: &[usize], what: &str) -> Result<()> {
    if !ks.contains(&inst.k) {
        bail!(Error::Unsupported(format!(
            "{what} is available for k in {ks:?}, got k = {}",
            inst.k
        )));
    }
    Ok(())
}

fn require_small_prime(inst: &FanoInstance, limit: u64, what: &str) -> Result<()> {
    let p = inst.field.characteristic();
    if !matches!(inst.field, FieldSpec::Prime { .. }) || p > limit {
        bail!(Error::FieldTooSmall(format!(
            "{what} samples by brute force and needs a prime field with p ≤ {limit}, got {}",
            inst.field
        )));
    }
    Ok(())
}

pub fn discriminant(inst: &FanoInstance, trials: usize, seed: u64) -> Result<VerificationReport> {
    let prof = discriminant_profile(inst, trials, seed)?;
    let mut r = VerificationReport::new("discriminant-order", digest(inst), seed);
    for (o, d) in prof.orders.iter().zip(&prof.residual_degrees) {
        r.record(
            *o == 4 - inst.k && *d == 6,
            || json!({"order": o, "residual_degree": d}),
        );
    }
    Ok(r.with_details(&prof))
}

/// Fit the dual sextic to `FIT_POINTS` dual points and test it on `held_out` more.
pub fn dual(inst: &FanoInstance, held_out: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    require_k(inst, &[0, 1, 2], "the dual sextic")?;
    let f = inst.fp();
    let pts = sample_dual(inst, FIT_POINTS + held_out, seed)?;
    let (fit, held) = pts.split_at(FIT_POINTS);
    let fit: Vec<Vec<u64>> = fit.iter().map(|p| p.h.clone()).collect();
    let mut r = VerificationReport::new("dual-sextic", digest(inst), seed);
    let form = match fit_form(&f, &fit, 6) {
        Ok(form) => form,
        Err(Error::Interpolation(n)) => {
            r.record(false, || json!({"nullspace_dimension": n}));
            return Ok(vec![r]);
        }
        Err(e) => return Err(e.into()),
    };
    for p in held {
        r.record(form.eval(&f, &p.h) == 0, || json!(p.h));
    }
    r = r.with_details(
        &json!({"fit_points": FIT_POINTS, "held_out": held.len(), "nullspace_dimension": 1}),
    );
    let yd = SexticForm {
        kind: SexticKind::Dual,
        form,
    };
    let mut m = VerificationReport::new("dual-multiplicity", digest(inst), seed);
    let mult = multiplicity_at(&f, &yd, &plucker_point(), 20, seed)?;
    m.record(mult == inst.k, || json!({"multiplicity": mult}));
    let m = m.with_details(&json!({"multiplicity": mult, "expected": inst.k}));
    Ok(vec![r, m])
}

pub fn duality(inst: &FanoInstance, trials: usize, seed: u64) -> Result<VerificationReport> {
    require_k(inst, &[0, 1], "the duality check")?;
    let f = inst.fp();
    let y = primal_sextic(inst, seed)?;
    let yd = dual_sextic(inst, seed.wrapping_add(1))?;
    let rep = duality_check(&f, &y, &yd, trials, seed)?;
    let mut r = VerificationReport::new("projective-duality", digest(inst), seed);
    r.tally(2 * rep.trials, rep.failures());
    r.witnesses = rep.witnesses.iter().map(|w| json!(w)).collect();
    Ok(r.with_details(&rep))
}

/// Lagrangian test, membership agreement on `trials` points (half on the sextic, half
/// random) and, over small primes, excess intersection at corank-two points.
pub fn lagrangian(inst: &FanoInstance, trials: usize, seed: u64) -> Result<VerificationReport> {
    require_k(inst, &[0], "the Lagrangian model")?;
    let f = inst.fp();
    let a = lagrangian_a(inst, Identification::Signed)?;
    let mut r = VerificationReport::new("lagrangian", digest(inst), seed);
    r.record(a.is_lagrangian(&f), || json!("pairing on A is not zero"));
    let yd = dual_sextic(inst, seed)?;
    let on = trials / 2;
    let mut pts = points_on(&f, &yd, on, seed, "epw")?;
    let mut rng = substream(seed, "epw-random", 0);
    pts.extend((on..trials).map(|_| (0..6).map(|_| f.random(&mut rng)).collect::<Vec<u64>>()));
    let mut agree = 0;
    for h in &pts {
        let inside = epw_membership(&f, &a, h)? >= 1;
        let ok = inside == (yd.eval(&f, h) == 0);
        agree += ok as usize;
        r.record(ok, || json!(h));
    }
    let mut corank2 = json!("skipped: large field");
    if inst.field.characteristic() <= SMALL_PRIME_LIMIT {
        let found = corank2_sample(inst, 10, 0, seed)?.found;
        let mut dims = Vec::new();
        for p in &found {
            let d = epw_membership(&f, &a, &p.h)?;
            dims.push(d);
            r.record(d >= 2, || json!({"h": p.h, "dim": d}));
        }
        corank2 = json!(dims);
    }
    Ok(r.with_details(&json!({"membership_agreements": agree, "membership_trials": pts.len(), "corank2_dims": corank2})))
}

pub fn singular_locus(inst: &FanoInstance, trials: usize, seed: u64) -> Result<VerificationReport> {
    require_k(inst, &[1, 2], "the singular locus search")?;
    require_small_prime(inst, SMALL_PRIME_LIMIT, "the singular locus search")?;
    let f = inst.fp();
    let yd = dual_sextic(inst, seed)?;
    let search = corank2_sample(inst, trials, 0, seed)?;
    let mut r = VerificationReport::new("singular-locus", digest(inst), seed);
    for p in &search.found {
        let m = multiplicity_at(&f, &yd, &p.h, 20, seed)?;
        let flat = yd.eval(&f, &p.h) == 0 && yd.gradient(&f, &p.h).iter().all(|x| *x == 0);
        r.record(m == 2 && flat, || json!({"h": p.h, "multiplicity": m}));
    }
    Ok(r.with_details(
        &json!({"v4_scanned": search.v4_scanned, "corank_counts": search.corank_counts}),
    ))
}

pub fn corank3(inst: &FanoInstance, members: usize, seed: u64) -> Result<VerificationReport> {
    require_k(inst, &[1, 2], "the corank scan")?;
    require_small_prime(inst, SMALL_PRIME_LIMIT, "the corank scan")?;
    let search = corank2_sample(inst, 0, members, seed)?;
    let high: usize = search.corank_counts.iter().skip(3).sum();
    let mut r = VerificationReport::new("no-corank-three", digest(inst), seed);
    r.tally(search.members_scanned, high);
    Ok(r.with_details(
        &json!({"members_scanned": search.members_scanned, "corank_counts": search.corank_counts}),
    ))
}

pub fn containment(
    chain: &FanoChain,
    from_x: bool,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let yz = dual_sextic(&chain.z, seed)?;
    let rep = if from_x {
        containment_sx(chain, &yz, trials, seed)?
    } else {
        containment_sw(chain, &yz, trials, seed)?
    };
    let claim = if from_x {
        "containment-sx"
    } else {
        "containment-sw"
    };
    let mut r = VerificationReport::new(claim, Some(chain.z.digest()), seed);
    r.tally(rep.trials, rep.failures);
    r.witnesses = rep.witnesses.iter().map(|w| json!(w)).collect();
    Ok(r.with_details(&json!({
        "sextic_zero": rep.sextic_zero,
        "restricted_singular": rep.restricted_singular,
        "agreements": rep.agreements,
    })))
}

pub fn gushel(g: &GushelInstance, trials: usize, seed: u64) -> Result<VerificationReport> {
    let rep = gushel_compare(g, trials, seed)?;
    let mut r = VerificationReport::new("gushel", None, seed);
    r.record(rep.sextics_proportional, || {
        json!("sextics not proportional")
    });
    r.tally(rep.eps_trials, rep.eps_failures);
    r.tally(rep.witness_trials, rep.witness_failures);
    r.record(
        rep.cone_order_failures == 0,
        || json!({"cone_order_failures": rep.cone_order_failures}),
    );
    Ok(r.with_details(&rep))
}

pub fn noplane(inst: &FanoInstance, seed: u64) -> Result<VerificationReport> {
    let s = plane_search(inst)?;
    let mut r = VerificationReport::new("no-planes", digest(inst), seed);
    r.tally(s.rho_checked + s.sigma_checked, s.found.len());
    r.witnesses = s.found.iter().map(|h| json!(h)).collect();
    Ok(r.with_details(&json!({"rho_checked": s.rho_checked, "sigma_checked": s.sigma_checked})))
}

pub fn conic_sample(
    inst: &FanoInstance,
    trials: usize,
    seed: u64,
    emit: bool,
) -> Result<VerificationReport> {
    require_k(inst, &[1], "conic sampling")?;
    let f = inst.fp();
    let mut r = VerificationReport::new("conic-class", digest(inst), seed);
    let mut conics = Vec::new();
    for i in 0..trials as u64 {
        let c = sample_conic(inst, seed.wrapping_mul(1_000_003).wrapping_add(i))?;
        let (class, shape) = classify_conic(&f, &c.conic)?;
        r.record(
            class == ConicClass::Tau && shape == ConicShape::Smooth,
            || json!({"class": class, "shape": shape}),
        );
        if emit {
            conics.push(c.to_json(&f));
        }
    }
    Ok(r.with_details(&json!({ "conics": conics })))
}

/// Runs the conic pipeline and reports the part named by `verb`.
pub fn conic_verb(
    inst: &FanoInstance,
    verb: &str,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    require_k(inst, &[1], "the conic pipeline")?;
    let rep = conic_pipeline(inst, trials, seed)?;
    let s = rep.samples;
    let (claim, ok) = match verb {
        "alpha" => (
            "conic-alpha",
            vec![rep.alpha_round_trip, rep.vertex_off_conic],
        ),
        "partner" => (
            "conic-partner",
            vec![
                rep.partner_ok,
                rep.planes_meet_in_line,
                rep.involution,
                rep.union_ok,
                rep.two_ruling_classes,
            ],
        ),
        "kappa" => ("conic-kappa", vec![rep.kappa]),
        _ => bail!("unknown conic verb {verb}"),
    };
    let mut r = VerificationReport::new(claim, digest(inst), seed);
    for k in ok {
        r.tally(s, s - k);
    }
    r.witnesses = rep.failures.iter().map(|w| json!(w)).collect();
    Ok(r.with_details(&rep))
}

pub fn families(inst: &FanoInstance, limit: usize, seed: u64) -> Result<VerificationReport> {
    let rep = special_family_checks(inst, limit, seed)?;
    let mut r = VerificationReport::new("special-families", digest(inst), seed);
    r.record(rep.form_rank == 4, || json!({"form_rank": rep.form_rank}));
    r.tally(rep.rho_planes, rep.rho_planes - rep.rho_contain_kernel);
    r.tally(rep.sigma_planes, rep.sigma_planes - rep.sigma_isotropic);
    r.record(
        rep.rho_without_kernel_inside == 0,
        || json!({"rho_without_kernel_inside": rep.rho_without_kernel_inside}),
    );
    Ok(r.with_details(&rep))
}

/// Conics to study: sampled from a k = 1 instance, or built into a fresh instance.
fn conics_for(
    inst: Option<&FanoInstance>,
    k: usize,
    field: FieldSpec,
    trials: usize,
    seed: u64,
) -> Result<Vec<(FanoInstance, ParametrizedConic)>> {
    match inst {
        Some(z) => {
            require_k(z, &[1], "sampling conics")?;
            (0..trials as u64)
                .map(|i| {
                    let c = sample_conic(z, seed.wrapping_mul(1_000_003).wrapping_add(i))?;
                    let pc = ParametrizedConic::from_conic(
                        z,
                        &c.conic,
                        &mut stream(seed.wrapping_add(i), "param"),
                    )?;
                    Ok((z.clone(), pc))
                })
                .collect()
        }
        None => {
            if k > 2 {
                bail!(Error::Unsupported("conics are built for k ≤ 2".into()));
            }
            (0..trials as u64)
                .map(|i| Ok(instance_containing_conic(k, field, seed.wrapping_add(i))?))
                .collect()
        }
    }
}

pub fn tangent_conic(
    inst: Option<&FanoInstance>,
    k: usize,
    field: FieldSpec,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let pairs = conics_for(inst, k, field, trials, seed)?;
    let mut r = VerificationReport::new("tangent-conic", inst.and_then(digest), seed);
    let mut dims = Vec::new();
    for (z, pc) in &pairs {
        let expected = 8 - 3 * z.k;
        let d = conic_tangent_dim(&z.fp(), pc)?;
        dims.push(d);
        r.record(
            d == expected,
            || json!({"dim": d, "expected": expected, "instance": z.digest()}),
        );
    }
    Ok(r.with_details(&json!({ "dims": dims })))
}

pub fn tangent_splitting(
    inst: Option<&FanoInstance>,
    k: usize,
    field: FieldSpec,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let pairs = conics_for(inst, k, field, trials, seed)?;
    let mut r = VerificationReport::new("splitting-type", inst.and_then(digest), seed);
    let mut out = Vec::new();
    for (z, pc) in &pairs {
        let s = splitting_type(&z.fp(), pc, z.k)?;
        let ok = if z.k == 1 {
            s.degrees == vec![1, 1, 0]
        } else {
            !s.degrees.is_empty()
        };
        r.record(ok, || json!(s));
        out.push(s);
    }
    Ok(r.with_details(&out))
}

pub fn tangent_double_line(kinds: &[ConicClass], seed: u64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("tangent-double-line", None, seed);
    let mut reps = Vec::new();
    for &kind in kinds {
        for swapped in [false, true] {
            let h = doubleline_hom_dim(kind, 4, swapped)?;
            r.record(
                h.dim == 13 && h.dim_next_bound == 13,
                || json!({"kind": kind, "swapped": swapped, "dim": h.dim}),
            );
            reps.push(h);
        }
    }
    Ok(r.with_details(&reps))
}

pub fn appendix_verify(seed: u64) -> Result<VerificationReport> {
    let rep = appendix_oracle(seed)?;
    let mut r = VerificationReport::new("appendix-oracle", None, seed);
    for (i, eq) in rep.forms_equal.iter().enumerate() {
        r.record(*eq, || json!({"form": (b'A' + i as u8) as char}));
    }
    r.tally(104, rep.matrix_mismatches.len());
    r.tally(104, rep.m_mismatches.len());
    r.record(
        rep.generic_rank == 8,
        || json!({"generic_rank": rep.generic_rank}),
    );
    r.record(
        rep.stray_terms == 0,
        || json!({"stray_terms": rep.stray_terms}),
    );
    Ok(r.with_details(&rep))
}

pub fn appendix_stats(primes: &[u64], samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("appendix-rank", None, seed);
    let mut stats = Vec::new();
    for &p in primes {
        let s = appendix_rank_stats(p, samples, seed)?;
        r.record(s.frequency <= s.bound, || json!(s));
        stats.push(s);
    }
    if stats.len() > 1 {
        let decreasing = stats.windows(2).all(|w| w[1].frequency < w[0].frequency);
        r.record(decreasing, || json!("frequencies do not decrease with p"));
    }
    Ok(r.with_details(&stats))
}

pub fn bott_chi(bundle: &str, expect: Option<i64>, seed: u64) -> Result<VerificationReport> {
    let target = bott::ChiTarget::parse(bundle).context("parsing the bundle")?;
    let chi = bott::chi_chain(&target)?;
    let mut r = VerificationReport::new("bott-chi", None, seed);
    r.record(
        expect.is_none_or(|e| e == chi),
        || json!({"chi": chi, "expected": expect}),
    );
    Ok(r.with_details(&json!({"bundle": bundle, "chi": chi})))
}

pub fn hodge(seed: u64) -> Result<VerificationReport> {
    let rep = bott::hodge_check()?;
    let mut r = VerificationReport::new("hodge", None, seed);
    for c in &rep.checks {
        r.record(c.holds, || json!(c));
    }
    let h = |p: usize, q: usize| {
        rep.entries
            .iter()
            .find(|e| e.p == p && e.q == q)
            .map(|e| e.value)
    };
    r.record(h(3, 1) == Some(1), || json!({"h31": h(3, 1)}));
    r.record(h(2, 2) == Some(22), || json!({"h22": h(2, 2)}));
    r.record(
        rep.h1_tx_minus1 == 10,
        || json!({"h1_tx_minus1": rep.h1_tx_minus1}),
    );
    Ok(r.with_details(&rep))
}
