//! The primal and dual sextics of a quadric system, the Lagrangian model for k = 0,
//! corank strata and the containments between members of a chain.
//!
//! Coordinates on I are `(z, v_1, …, v_5)` for the quadric `zQ + P_v`; coordinates on
//! I^∨ are paired with them by the standard dot product.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::instance::{retry_budget, Ctx, FanoChain, FanoInstance, GushelInstance};
use crate::matrix::{self, Mat};
use crate::poly::{det_along_line, fit_form, monomials, upoly, BinaryForm, MultiForm};
use crate::rng::{substream, Stream};
use crate::roots::{affine_roots, univariate_roots, ProjRoot};
use crate::wedge5::{pfaffian_quadric, wedge2_basis};

/// Interpolation points for a sextic in six variables: about 1.3 times the 462 monomials.
pub const FIT_POINTS: usize = 600;
pub const HELD_OUT: usize = 100;
const BATCH: usize = 64;

/// The Plücker point: the hyperplane `z = 0` of I.
pub fn plucker_point() -> Vec<u64> {
    vec![1, 0, 0, 0, 0, 0]
}

/// Scale so that the first nonzero coordinate is 1.
pub fn normalize(f: &Fp, v: &[u64]) -> Vec<u64> {
    match v.iter().find(|x| **x != 0) {
        None => v.to_vec(),
        Some(lead) => {
            let inv = f.inv(lead).unwrap();
            v.iter().map(|x| f.mul(x, &inv)).collect()
        }
    }
}

fn random_vec(f: &Fp, rng: &mut Stream, n: usize) -> Vec<u64> {
    (0..n).map(|_| f.random(rng)).collect()
}

fn corank(f: &Fp, m: &Mat<u64>) -> usize {
    m.rows() - matrix::rank(f, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SexticKind {
    Primal,
    Dual,
}

/// A sextic form on I or I^∨, normalized so its leading graded-lex coefficient is 1.
#[derive(Clone, Debug)]
pub struct SexticForm {
    pub kind: SexticKind,
    pub form: MultiForm<u64>,
}

impl SexticForm {
    pub fn eval(&self, f: &Fp, pt: &[u64]) -> u64 {
        self.form.eval(f, pt)
    }

    pub fn gradient(&self, f: &Fp, pt: &[u64]) -> Vec<u64> {
        self.form.gradient(f, pt)
    }

    pub fn proportional(&self, f: &Fp, other: &SexticForm) -> bool {
        self.form.proportional(f, &other.form)
    }
}

/// The quadric system restricted to V: `member(z, v) = zQ|V + P_v|V`.
#[derive(Clone, Debug)]
pub struct QuadricSystem {
    pub ctx: Ctx,
    pub q: Mat<u64>,
    pub pf: Vec<Mat<u64>>,
}

impl QuadricSystem {
    pub fn new(inst: &FanoInstance) -> Self {
        Self::from_ctx(inst.ctx())
    }

    pub fn from_ctx(ctx: Ctx) -> Self {
        let mut sys = ctx.system();
        let q = sys.pop().unwrap();
        QuadricSystem { ctx, q, pf: sys }
    }

    pub fn pfaffian(&self, v: &[u64]) -> Mat<u64> {
        let f = &self.ctx.f;
        let n = self.q.rows();
        let mut out = matrix::zeros(f, n, n);
        for (m, p) in self.pf.iter().enumerate() {
            out = matrix::lincomb(f, &f.one(), &out, &v[m], p);
        }
        out
    }

    pub fn member(&self, pt: &[u64]) -> Mat<u64> {
        let f = &self.ctx.f;
        matrix::lincomb(f, &pt[0], &self.q, &f.one(), &self.pfaffian(&pt[1..]))
    }

    /// `det(zQ + P_v)|V` as a univariate in z, low degree first.
    pub fn discriminant_in_z(&self, v: &[u64]) -> Result<Vec<u64>> {
        Ok(det_along_line(&self.ctx.f, &self.pfaffian(v), &self.q)?.coeffs)
    }
}

/// Split `c` into its vanishing order at 0 and the remaining factor.
pub fn split_order(f: &Fp, c: &[u64]) -> Option<(usize, Vec<u64>)> {
    let order = c.iter().position(|x| *x != 0)?;
    Some((order, upoly::trim(f, c[order..].to_vec())))
}

// ---------------------------------------------------------------------------
// primal side

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantProfile {
    pub k: usize,
    pub trials: usize,
    pub orders: Vec<usize>,
    pub residual_degrees: Vec<usize>,
    pub degenerate: usize,
    pub failures: usize,
}

/// Vanishing order in z and residual degree of `det(zQ + P_v)|V` along random v.
pub fn discriminant_profile(
    inst: &FanoInstance,
    trials: usize,
    seed: u64,
) -> Result<DiscriminantProfile> {
    let sys = QuadricSystem::new(inst);
    let f = sys.ctx.f;
    let mut rng = substream(seed, "discriminant", 0);
    let mut rep = DiscriminantProfile {
        k: inst.k,
        trials,
        orders: Vec::new(),
        residual_degrees: Vec::new(),
        degenerate: 0,
        failures: 0,
    };
    while rep.orders.len() < trials {
        let v = random_vec(&f, &mut rng, 5);
        match split_order(&f, &sys.discriminant_in_z(&v)?) {
            None => rep.degenerate += 1,
            Some((order, rest)) => {
                let deg = rest.len() - 1;
                if order != 4 - inst.k || deg != 6 {
                    rep.failures += 1;
                }
                rep.orders.push(order);
                rep.residual_degrees.push(deg);
            }
        }
        if rep.degenerate > retry_budget() {
            return Err(Error::BudgetExhausted(
                "discriminant identically zero".into(),
            ));
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimalPoint {
    pub coords: Vec<u64>,
    pub corank: usize,
    pub kernel: Vec<Vec<u64>>,
}

fn primal_points_for(sys: &QuadricSystem, rng: &mut Stream) -> Vec<PrimalPoint> {
    let f = &sys.ctx.f;
    let v = random_vec(f, rng, 5);
    let Ok(c) = sys.discriminant_in_z(&v) else {
        return Vec::new();
    };
    let Some((_, rest)) = split_order(f, &c) else {
        return Vec::new();
    };
    affine_roots(f, &rest)
        .into_iter()
        .filter(|(z, _)| *z != 0)
        .map(|(z, _)| {
            let mut coords = vec![z];
            coords.extend(&v);
            let kernel = matrix::kernel(f, &sys.member(&coords));
            PrimalPoint {
                corank: kernel.len(),
                kernel,
                coords,
            }
        })
        .collect()
}

/// Gather at least `n` projectively distinct items from independent sub-streams; the
/// order depends only on `seed` and `label`.
fn gather<T: Send, G>(
    f: &Fp,
    n: usize,
    seed: u64,
    label: &str,
    key: impl Fn(&T) -> Vec<u64>,
    gen: G,
) -> Result<Vec<T>>
where
    G: Fn(&mut Stream) -> Vec<T> + Sync,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut next = 0u64;
    let max_batches = 64 * retry_budget().max(1) + n / BATCH;
    for _ in 0..max_batches {
        let batch: Vec<Vec<T>> = (next..next + BATCH as u64)
            .into_par_iter()
            .map(|i| gen(&mut substream(seed, label, i)))
            .collect();
        next += BATCH as u64;
        for item in batch.into_iter().flatten() {
            if seen.insert(normalize(f, &key(&item))) {
                out.push(item);
            }
        }
        if out.len() >= n {
            out.truncate(n);
            return Ok(out);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "only {} of {n} points for {label}",
        out.len()
    )))
}

/// `n` points `(z₀, v)` of the primal sextic with `z₀ ≠ 0`.
pub fn sample_primal(inst: &FanoInstance, n: usize, seed: u64) -> Result<Vec<PrimalPoint>> {
    let sys = QuadricSystem::new(inst);
    gather(
        &sys.ctx.f,
        n,
        seed,
        "primal",
        |p: &PrimalPoint| p.coords.clone(),
        |rng| primal_points_for(&sys, rng),
    )
}

/// Fit a form to `FIT_POINTS` samples and require it to vanish on `HELD_OUT` more;
/// a failed attempt is retried on fresh samples.
fn fit_validated<G>(
    f: &Fp,
    seed: u64,
    label: &str,
    kind: SexticKind,
    sample: G,
) -> Result<SexticForm>
where
    G: Fn(usize, u64) -> Result<Vec<Vec<u64>>>,
{
    let mut last = Error::BudgetExhausted(format!("{label}: no attempts"));
    for attempt in 0..retry_budget().min(4) {
        let pts = sample(
            FIT_POINTS + HELD_OUT,
            seed.wrapping_add(attempt as u64 * 0x9e37_79b9),
        )?;
        let (fit, held) = pts.split_at(FIT_POINTS);
        match fit_form(f, fit, 6) {
            Ok(form) if held.iter().all(|p| form.eval(f, p) == 0) => {
                return Ok(SexticForm { kind, form })
            }
            Ok(_) => {
                last = Error::NotGeneric(format!("{label}: held-out point off the fitted sextic"))
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// The primal sextic `Y` by interpolation.
pub fn primal_sextic(inst: &FanoInstance, seed: u64) -> Result<SexticForm> {
    let f = inst.fp();
    fit_validated(&f, seed, "primal", SexticKind::Primal, |n, s| {
        Ok(sample_primal(inst, n, s)?
            .into_iter()
            .map(|p| p.coords)
            .collect())
    })
}

// ---------------------------------------------------------------------------
// dual side

/// The pencil spanned by Q and the Plücker quadric on `M = ∧²V₄ ∩ V`, `V₄ = ker w`.
#[derive(Clone, Debug)]
pub struct DualPencil {
    pub w: Vec<u64>,
    /// Vector with `w(u) = 1`; `q_m` is `P_u` restricted.
    pub u: Vec<u64>,
    pub m: Mat<u64>,
    pub q_big: Mat<u64>,
    pub q_m: Mat<u64>,
    /// `δ(λ, μ) = det(λQ_M + μq_M)`.
    pub delta: BinaryForm<u64>,
}

impl DualPencil {
    pub fn member(&self, f: &Fp, root: &ProjRoot) -> Mat<u64> {
        matrix::lincomb(f, &root.lambda, &self.q_big, &root.mu, &self.q_m)
    }
}

pub fn v4_basis(f: &Fp, w: &[u64]) -> Mat<u64> {
    Mat::from_rows(matrix::kernel(f, &Mat::from_rows(vec![w.to_vec()], 5)), 5)
}

pub fn dual_pencil(ctx: &Ctx, w: &[u64]) -> Result<DualPencil> {
    let f = &ctx.f;
    if ctx.k > 2 {
        return Err(Error::Unsupported(
            "the dual side is built for k ≤ 2".into(),
        ));
    }
    let lead = w.iter().position(|x| *x != 0).ok_or(Error::ZeroForm)?;
    let mut u = vec![0u64; 5];
    u[lead] = f.inv(&w[lead]).unwrap();
    let m = matrix::intersect(f, &wedge2_basis(f, &v4_basis(f, w)), &ctx.v);
    if m.rows() != 6 - ctx.k {
        return Err(Error::NotGeneric(format!(
            "fiber of dimension {} over this V4",
            m.rows()
        )));
    }
    let q_big = matrix::congruence(f, &m, &ctx.q);
    let q_m = matrix::congruence(f, &m, &pfaffian_quadric(f, &u));
    let delta = det_along_line(f, &q_m, &q_big)?;
    Ok(DualPencil {
        w: w.to_vec(),
        u,
        m,
        q_big,
        q_m,
        delta,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DualPoint {
    pub h: Vec<u64>,
    /// `V₄ = ker w`.
    pub w: Vec<u64>,
    /// Pencil member `[λ:μ]`.
    pub member: [u64; 2],
    pub corank: usize,
    pub multiplicity: usize,
}

/// The hyperplane `(μ₀, −λ₀w)` of I for the member `λ₀Q_M + μ₀q_M`.
pub fn dual_coordinates(f: &Fp, w: &[u64], root: &ProjRoot) -> Vec<u64> {
    let mut h = vec![root.mu];
    h.extend(w.iter().map(|x| f.neg(&f.mul(&root.lambda, x))));
    h
}

pub fn dual_points_of(ctx: &Ctx, pencil: &DualPencil) -> Vec<DualPoint> {
    let f = &ctx.f;
    let Ok(roots) = univariate_roots(f, &pencil.delta) else {
        return Vec::new();
    };
    roots
        .into_iter()
        .map(|(r, mult)| DualPoint {
            h: dual_coordinates(f, &pencil.w, &r),
            w: pencil.w.clone(),
            member: [r.lambda, r.mu],
            corank: corank(f, &pencil.member(f, &r)),
            multiplicity: mult,
        })
        .collect()
}

fn dual_points_for(ctx: &Ctx, rng: &mut Stream) -> Vec<DualPoint> {
    let w = random_vec(&ctx.f, rng, 5);
    match dual_pencil(ctx, &w) {
        Ok(p) => dual_points_of(ctx, &p),
        Err(_) => Vec::new(),
    }
}

pub fn sample_dual(inst: &FanoInstance, n: usize, seed: u64) -> Result<Vec<DualPoint>> {
    if inst.k > 2 {
        return Err(Error::Unsupported(
            "the dual side is built for k ≤ 2".into(),
        ));
    }
    let ctx = inst.ctx();
    gather(
        &ctx.f,
        n,
        seed,
        "dual",
        |p: &DualPoint| p.h.clone(),
        |rng| dual_points_for(&ctx, rng),
    )
}

/// The dual sextic `Y^∨` by interpolation.
pub fn dual_sextic(inst: &FanoInstance, seed: u64) -> Result<SexticForm> {
    let f = inst.fp();
    fit_validated(&f, seed, "dual", SexticKind::Dual, |n, s| {
        Ok(sample_dual(inst, n, s)?.into_iter().map(|p| p.h).collect())
    })
}

/// Whether every quadric of the hyperplane `h` of I restricts on `∧²V₄ ∩ V` to a multiple
/// of one singular quadric. Computed from the full restriction, independent of the pencil
/// parametrization.
pub fn hyperplane_singular_on(ctx: &Ctx, h: &[u64], w: &[u64]) -> Result<bool> {
    let f = &ctx.f;
    let m = matrix::intersect(f, &wedge2_basis(f, &v4_basis(f, w)), &ctx.v);
    if m.rows() == 0 {
        return Err(Error::NotGeneric("empty fiber".into()));
    }
    let plucker = crate::wedge5::plucker_quadrics(f);
    let restricted: Vec<Mat<u64>> = matrix::kernel(f, &Mat::from_rows(vec![h.to_vec()], 6))
        .iter()
        .map(|x| {
            let mut quad = matrix::scale(f, &x[0], &ctx.q);
            for (mi, p) in plucker.iter().enumerate() {
                quad = matrix::lincomb(f, &f.one(), &quad, &x[mi + 1], p);
            }
            matrix::congruence(f, &m, &quad)
        })
        .collect();
    let flat: Vec<Vec<u64>> = restricted.iter().map(crate::instance::sym_vector).collect();
    let cols = flat[0].len();
    if matrix::rank(f, &Mat::from_rows(flat, cols)) > 1 {
        return Ok(false);
    }
    Ok(restricted.iter().all(|r| matrix::det(f, r) == 0))
}

// ---------------------------------------------------------------------------
// multiplicity and duality

/// Minimal vanishing order of `form` at `pt` along `lines` random lines.
pub fn multiplicity_at(
    f: &Fp,
    form: &SexticForm,
    pt: &[u64],
    lines: usize,
    seed: u64,
) -> Result<usize> {
    if form.form.is_zero() {
        return Err(Error::ZeroForm);
    }
    let mut rng = substream(seed, "multiplicity", 0);
    let mut best = usize::MAX;
    for _ in 0..lines {
        let d = random_vec(f, &mut rng, pt.len());
        let uni = form.form.restrict_to_line(f, pt, &d);
        let ord = uni
            .iter()
            .position(|c| *c != 0)
            .unwrap_or(form.form.degree + 1);
        best = best.min(ord);
    }
    Ok(best)
}

/// Points of a hypersurface found on random lines.
pub fn points_on(
    f: &Fp,
    form: &SexticForm,
    n: usize,
    seed: u64,
    label: &str,
) -> Result<Vec<Vec<u64>>> {
    let nv = form.form.nvars;
    gather(
        f,
        n,
        seed,
        label,
        |p: &Vec<u64>| p.clone(),
        |rng| {
            let a = random_vec(f, rng, nv);
            let b = random_vec(f, rng, nv);
            let uni = form.form.restrict_to_line(f, &a, &b);
            if upoly::trim(f, uni.clone()).is_empty() {
                return Vec::new();
            }
            affine_roots(f, &uni)
                .into_iter()
                .map(|(s, _)| {
                    a.iter()
                        .zip(&b)
                        .map(|(x, y)| f.add(x, &f.mul(&s, y)))
                        .collect()
                })
                .collect()
        },
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub trials: usize,
    pub forward_failures: usize,
    pub backward_failures: usize,
    pub bidual_failures: usize,
    pub singular_skipped: usize,
    pub witnesses: Vec<Vec<u64>>,
}

impl DualityReport {
    pub fn failures(&self) -> usize {
        self.forward_failures + self.backward_failures + self.bidual_failures
    }
}

/// Gradients of smooth points of each sextic lie on the other, and the gradient map
/// returns to the starting point.
pub fn duality_check(
    f: &Fp,
    y: &SexticForm,
    yd: &SexticForm,
    trials: usize,
    seed: u64,
) -> Result<DualityReport> {
    let mut rep = DualityReport {
        trials,
        forward_failures: 0,
        backward_failures: 0,
        bidual_failures: 0,
        singular_skipped: 0,
        witnesses: Vec::new(),
    };
    for (dir, (a, b)) in [(y, yd), (yd, y)].into_iter().enumerate() {
        let pts = points_on(
            f,
            a,
            2 * trials,
            seed,
            if dir == 0 {
                "duality-fwd"
            } else {
                "duality-bwd"
            },
        )?;
        let mut done = 0;
        for p in pts {
            if done == trials {
                break;
            }
            let g = a.gradient(f, &p);
            if g.iter().all(|x| *x == 0) {
                rep.singular_skipped += 1;
                continue;
            }
            done += 1;
            if b.eval(f, &g) != 0 {
                if dir == 0 {
                    rep.forward_failures += 1;
                } else {
                    rep.backward_failures += 1;
                }
                rep.witnesses.push(p.clone());
                continue;
            }
            let back = b.gradient(f, &g);
            if normalize(f, &back) != normalize(f, &p) {
                rep.bidual_failures += 1;
                rep.witnesses.push(p);
            }
        }
        if done < trials {
            return Err(Error::NotGeneric("too few smooth points".into()));
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Lagrangian model, k = 0

/// Increasing triples of {0..6}, the basis order of ∧³I.
pub fn triples6() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Sign of the permutation sorting `idx`, or 0 on a repeated index.
pub fn perm_sign(idx: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                s = -s;
            }
        }
    }
    s
}

/// Gram matrix of `(α, β) ↦ α ∧ β / e₀∧…∧e₅` on ∧³I.
pub fn wedge_gram(f: &Fp) -> Mat<u64> {
    let t = triples6();
    Mat::from_fn(20, 20, |i, j| {
        let idx: Vec<usize> = t[i].iter().chain(t[j].iter()).copied().collect();
        f.reduce(perm_sign(&idx))
    })
}

/// `x ∧ y ∧ z` in ∧³I.
pub fn wedge3(f: &Fp, x: &[u64], y: &[u64], z: &[u64]) -> Vec<u64> {
    triples6()
        .iter()
        .map(|&[a, b, c]| {
            let m = Mat::from_rows(
                vec![
                    vec![x[a], x[b], x[c]],
                    vec![y[a], y[b], y[c]],
                    vec![z[a], z[b], z[c]],
                ],
                3,
            );
            matrix::det(f, &m)
        })
        .collect()
}

/// How `∧³H_P` is matched with the dual of `∧²V₅`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identification {
    /// `ξ ∧ y = −Q(x, y)` times the volume form.
    Signed,
    /// Complementary index sets matched without permutation signs.
    Unsigned,
}

#[derive(Clone, Debug)]
pub struct LagrangianSubspace {
    pub basis: Mat<u64>,
    pub gram: Mat<u64>,
}

impl LagrangianSubspace {
    pub fn pairing(&self, f: &Fp) -> Mat<u64> {
        matrix::mul(
            f,
            &matrix::mul(f, &self.basis, &self.gram),
            &self.basis.transpose(),
        )
    }

    pub fn is_lagrangian(&self, f: &Fp) -> bool {
        matrix::rank(f, &self.basis) == 10 && matrix::is_zero(f, &self.pairing(f))
    }
}

/// The graph subspace `{(ξ_x, e₀ ∧ x)}` of ∧³I for the quadric of a k = 0 instance;
/// `e₀` is the Q direction and `e_1..e_5` the Pfaffian directions.
pub fn lagrangian_a(inst: &FanoInstance, ident: Identification) -> Result<LagrangianSubspace> {
    if inst.k != 0 {
        return Err(Error::Precondition(
            "the Lagrangian model needs k = 0".into(),
        ));
    }
    let f = inst.fp();
    let q = inst.ctx().q;
    let t = triples6();
    let rows: Vec<Vec<u64>> = (0..10)
        .map(|xi| {
            let qx = q.row(xi);
            t.iter()
                .map(|&[a, b, c]| {
                    if a == 0 {
                        // e0 ∧ e_b ∧ e_c with b < c
                        if crate::wedge5::PAIRS[xi] == (b - 1, c - 1) {
                            1
                        } else {
                            0
                        }
                    } else {
                        let rest: Vec<usize> = (1..6).filter(|i| ![a, b, c].contains(i)).collect();
                        let (i, j) = (rest[0], rest[1]);
                        let y = crate::wedge5::pair_index(i - 1, j - 1);
                        let s = match ident {
                            Identification::Signed => perm_sign(&[a, b, c, i, j]),
                            Identification::Unsigned => 1,
                        };
                        f.mul(&f.reduce(-s), &qx[y])
                    }
                })
                .collect()
        })
        .collect();
    Ok(LagrangianSubspace {
        basis: Mat::from_rows(rows, 20),
        gram: wedge_gram(&f),
    })
}

/// `dim(∧³H ∩ A)` for the hyperplane `H = ker h`.
pub fn epw_membership(f: &Fp, a: &LagrangianSubspace, h: &[u64]) -> Result<usize> {
    if h.iter().all(|x| *x == 0) {
        return Err(Error::ZeroForm);
    }
    let hb = matrix::kernel(f, &Mat::from_rows(vec![h.to_vec()], 6));
    let mut rows = a.basis.to_rows();
    for i in 0..5 {
        for j in i + 1..5 {
            for k in j + 1..5 {
                rows.push(wedge3(f, &hb[i], &hb[j], &hb[k]));
            }
        }
    }
    Ok(20 - matrix::rank(f, &Mat::from_rows(rows, 20)))
}

// ---------------------------------------------------------------------------
// corank strata

#[derive(Clone, Debug, Serialize)]
pub struct CorankSearch {
    pub v4_scanned: usize,
    pub members_scanned: usize,
    /// Number of scanned members by corank, index = corank.
    pub corank_counts: Vec<usize>,
    pub found: Vec<DualPoint>,
}

impl CorankSearch {
    pub fn max_corank(&self) -> usize {
        self.corank_counts.iter().rposition(|c| *c > 0).unwrap_or(0)
    }
}

/// Scan random V₄ until `n` members of corank at least two are found and at least
/// `min_members` pencil members were examined. Intended for small primes, where
/// double roots of δ are frequent.
pub fn corank2_sample(
    inst: &FanoInstance,
    n: usize,
    min_members: usize,
    seed: u64,
) -> Result<CorankSearch> {
    if inst.k > 2 {
        return Err(Error::Unsupported(
            "the dual side is built for k ≤ 2".into(),
        ));
    }
    let ctx = inst.ctx();
    let mut rep = CorankSearch {
        v4_scanned: 0,
        members_scanned: 0,
        corank_counts: vec![0; 7],
        found: Vec::new(),
    };
    let max_v4 = 20_000 * retry_budget().max(1) * n.max(1);
    let chunk = 4096u64;
    let mut next = 0u64;
    while rep.found.len() < n || rep.members_scanned < min_members {
        if rep.v4_scanned > max_v4 {
            return Err(Error::BudgetExhausted(format!(
                "{} corank-2 members after {} V4",
                rep.found.len(),
                rep.v4_scanned
            )));
        }
        let batch: Vec<Vec<DualPoint>> = (next..next + chunk)
            .into_par_iter()
            .map(|i| dual_points_for(&ctx, &mut substream(seed, "corank2", i)))
            .collect();
        next += chunk;
        for pts in batch {
            rep.v4_scanned += 1;
            for p in pts {
                rep.members_scanned += 1;
                rep.corank_counts[p.corank] += 1;
                if p.corank >= 2 && rep.found.len() < n {
                    rep.found.push(p);
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub trials: usize,
    /// Points with `Y_Z^∨(h) = 0`.
    pub sextic_zero: usize,
    /// Points whose hyperplane restricts singularly on `∧²V₄ ∩ V(Z)`.
    pub restricted_singular: usize,
    pub agreements: usize,
    pub failures: usize,
    pub witnesses: Vec<DualPoint>,
}

/// Test dual points against the dual sextic of `z` and against the direct restriction.
pub fn containment_check(
    z: &FanoInstance,
    yz: &SexticForm,
    pts: &[DualPoint],
) -> Result<ContainmentReport> {
    let ctx = z.ctx();
    let f = ctx.f;
    let mut rep = ContainmentReport {
        trials: pts.len(),
        sextic_zero: 0,
        restricted_singular: 0,
        agreements: 0,
        failures: 0,
        witnesses: Vec::new(),
    };
    for p in pts {
        let a = yz.eval(&f, &p.h) == 0;
        let b = hyperplane_singular_on(&ctx, &p.h, &p.w)?;
        rep.sextic_zero += a as usize;
        rep.restricted_singular += b as usize;
        rep.agreements += (a == b) as usize;
        if !(a && b) {
            rep.failures += 1;
            rep.witnesses.push(p.clone());
        }
    }
    Ok(rep)
}

/// Corank-2 points of W checked against Z.
pub fn containment_sw(
    chain: &FanoChain,
    yz: &SexticForm,
    n: usize,
    seed: u64,
) -> Result<ContainmentReport> {
    let pts = corank2_sample(&chain.w, n, 0, seed)?.found;
    containment_check(&chain.z, yz, &pts)
}

/// Corank-2 members of X's pencils checked against Z.
pub fn containment_sx(
    chain: &FanoChain,
    yz: &SexticForm,
    n: usize,
    seed: u64,
) -> Result<ContainmentReport> {
    let pts = corank2_sample(&chain.x, n, 0, seed)?.found;
    containment_check(&chain.z, yz, &pts)
}

// ---------------------------------------------------------------------------
// Gushel comparison

#[derive(Clone, Debug, Serialize)]
pub struct GushelReport {
    pub cone_order_failures: usize,
    pub sextics_proportional: bool,
    pub eps_trials: usize,
    pub eps_failures: usize,
    pub witness_trials: usize,
    pub witness_failures: usize,
}

impl GushelReport {
    pub fn passed(&self) -> bool {
        self.sextics_proportional
            && self.eps_failures == 0
            && self.witness_failures == 0
            && self.cone_order_failures == 0
    }
}

/// `det(zQ + P_v)` on the cone space as a univariate in z.
pub fn cone_discriminant(g: &GushelInstance, v: &[u64]) -> Result<Vec<u64>> {
    let f = g.fp();
    let a0 = g.cone_matrix(0, v);
    let a1 = matrix::sub(&f, &g.cone_matrix(1, v), &a0);
    Ok(det_along_line(&f, &a0, &a1)?.coeffs)
}

fn cone_points(g: &GushelInstance, rng: &mut Stream) -> Vec<(Vec<u64>, usize)> {
    let f = g.fp();
    let v = random_vec(&f, rng, 5);
    let Ok(c) = cone_discriminant(g, &v) else {
        return Vec::new();
    };
    let Some((order, rest)) = split_order(&f, &c) else {
        return Vec::new();
    };
    affine_roots(&f, &rest)
        .into_iter()
        .map(|(z, _)| {
            let mut p = vec![z];
            p.extend(&v);
            (p, order)
        })
        .collect()
}

/// Basis `{u} ∪ V_{9−k}` of `V* = ker(h_1..h_k)` with `h_0(u) = 1`.
fn flat_basis(g: &GushelInstance) -> Result<Mat<u64>> {
    let f = g.fp();
    let h = g.h_mat();
    let rest = h.select_rows(&(1..h.rows()).collect::<Vec<_>>());
    let vstar = if rest.rows() == 0 {
        matrix::identity(&f, 10)
    } else {
        Mat::from_rows(matrix::kernel(&f, &rest), 10)
    };
    let h0 = h.row(0);
    let r = (0..vstar.rows())
        .find(|&i| matrix::dot(&f, h0, vstar.row(i)) != 0)
        .ok_or(Error::DependentBasis)?;
    let c = f.inv(&matrix::dot(&f, h0, vstar.row(r))).unwrap();
    let u: Vec<u64> = vstar.row(r).iter().map(|x| f.mul(x, &c)).collect();
    Ok(Mat::from_rows(vec![u], 10).vstack(&g.v_low()))
}

/// `ε² det(zQ_ε + P_v)` on the basis of [`flat_basis`].
fn scaled_flat_det(
    g: &GushelInstance,
    basis: &Mat<u64>,
    z: u64,
    v: &[u64],
    eps: u64,
) -> Result<u64> {
    let f = g.fp();
    let q = g.flatten(eps)?.ctx().q;
    let m = matrix::lincomb(&f, &z, &q, &f.one(), &pfaffian_quadric(&f, v));
    let d = matrix::det(&f, &matrix::congruence(&f, basis, &m));
    Ok(f.mul(&d, &f.mul(&eps, &eps)))
}

pub fn gushel_compare(g: &GushelInstance, trials: usize, seed: u64) -> Result<GushelReport> {
    let f = g.fp();
    let companion = g.companion()?;
    // cone side sextic
    let mut order_bad = 0;
    let yz = fit_validated(&f, seed, "gushel-cone", SexticKind::Primal, |n, s| {
        let pts = gather(
            &f,
            n,
            s,
            "gushel-cone",
            |p: &(Vec<u64>, usize)| p.0.clone(),
            |rng| cone_points(g, rng),
        )?;
        Ok(pts.into_iter().map(|(p, _)| p).collect())
    })?;
    let yx = primal_sextic(&companion, seed)?;
    let mut rng = substream(seed, "gushel-eps", 0);
    let basis = flat_basis(g)?;
    let mut eps_failures = 0;
    for _ in 0..trials {
        let z = f.random(&mut rng);
        let v = random_vec(&f, &mut rng, 5);
        let c = cone_discriminant(g, &v)?;
        match split_order(&f, &c) {
            Some((o, _)) if o == 4 - g.k => {}
            _ => order_bad += 1,
        }
        let xs = [1u64, 2, 3];
        let ys: Vec<u64> = xs
            .iter()
            .map(|e| scaled_flat_det(g, &basis, z, &v, *e))
            .collect::<Result<_>>()?;
        let quad = upoly::interpolate(&f, &xs, &ys);
        let extra = scaled_flat_det(g, &basis, z, &v, 4)?;
        let cone = matrix::det(&f, &g.cone_matrix(z, &v));
        if upoly::eval(&f, &quad, &0) != cone || upoly::eval(&f, &quad, &4) != extra {
            eps_failures += 1;
        }
    }
    // singular points of the cone quadric map to singular points of Q'
    let pts = gather(
        &f,
        trials,
        seed,
        "gushel-witness",
        |p: &(Vec<u64>, usize)| p.0.clone(),
        |rng| cone_points(g, rng),
    )?;
    let low = g.v_low();
    let l = g.l_vec();
    let qp = g.q_prime();
    let mut witness_failures = 0;
    for (p, _) in &pts {
        let ker = matrix::kernel(&f, &g.cone_matrix(p[0], &p[1..]));
        let ok = ker.len() == 1 && {
            let (t0, c) = (ker[0][0], &ker[0][1..]);
            let omega = matrix::vec_mat(&f, c, &low);
            let member = matrix::lincomb(&f, &p[0], &qp, &f.one(), &pfaffian_quadric(&f, &p[1..]));
            let image = matrix::mat_vec(&f, &matrix::congruence(&f, &low, &member), c);
            t0 == f.neg(&matrix::dot(&f, &l, &omega)) && image.iter().all(|x| *x == 0)
        };
        if !ok {
            witness_failures += 1;
        }
    }
    Ok(GushelReport {
        cone_order_failures: order_bad,
        sextics_proportional: yz.proportional(&f, &yx),
        eps_trials: trials,
        eps_failures,
        witness_trials: pts.len(),
        witness_failures,
    })
}

/// Number of monomials of a sextic in six variables.
pub fn sextic_monomials() -> usize {
    monomials(6, 6).len()
}
