//! Fano instances `G(2,5) ∩ Q ∩ P(V)`, their serialization, genericity probes, the
//! exhaustive plane search and Gushel cones.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, Fp};
use crate::matrix::{self, Mat};
use crate::poly::upoly;
use crate::rng::{stream, substream};
use crate::roots::affine_roots;
use crate::wedge5::{self, alt_matrix, pfaffian_quadric, wedge_vv};

/// Environment variable overriding the retry budget of randomized constructions.
pub const RETRY_ENV: &str = "FANO_RETRY_BUDGET";
const DEFAULT_RETRIES: usize = 32;
/// Probe trials run by [`random_instance`] before accepting an instance.
const ACCEPT_PROBE_TRIALS: usize = 6;

pub fn retry_budget() -> usize {
    std::env::var(RETRY_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_RETRIES)
}

/// `X = G ∩ Q ∩ P(V)` with `dim V = 10 − k`, stored with integer entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoInstance {
    pub field: FieldSpec,
    pub k: usize,
    #[serde(rename = "V")]
    pub v: Vec<Vec<i64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<i64>>,
    pub seed: u64,
}

/// Working data of an instance over its computation field.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub f: Fp,
    pub k: usize,
    /// Basis rows of V.
    pub v: Mat<u64>,
    pub q: Mat<u64>,
    /// Linear forms cutting V, one per row.
    pub n: Mat<u64>,
    pub plucker: Vec<Mat<u64>>,
}

fn to_ints(f: &Fp, m: &Mat<u64>, signed: bool) -> Vec<Vec<i64>> {
    m.to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| if signed { f.lift(x) } else { x as i64 })
                .collect()
        })
        .collect()
}

fn reduce_rows(f: &Fp, rows: &[Vec<i64>], cols: usize) -> Mat<u64> {
    Mat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| f.reduce(x)).collect())
            .collect(),
        cols,
    )
}

impl FanoInstance {
    /// Assemble from matrices over the computation field.
    pub fn from_parts(field: FieldSpec, k: usize, v: &Mat<u64>, q: &Mat<u64>, seed: u64) -> Self {
        let f = field.prime_field();
        let signed = field == FieldSpec::Rationals;
        FanoInstance {
            field,
            k,
            v: to_ints(&f, v, signed),
            q: to_ints(&f, q, signed),
            seed,
        }
    }

    pub fn fp(&self) -> Fp {
        self.field.prime_field()
    }

    pub fn ctx(&self) -> Ctx {
        let f = self.fp();
        let v = reduce_rows(&f, &self.v, 10);
        let q = reduce_rows(&f, &self.q, 10);
        let n = Mat::from_rows(matrix::kernel(&f, &v), 10);
        Ctx {
            f,
            k: self.k,
            v,
            q,
            n,
            plucker: wedge5::plucker_quadrics(&f),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Decode, reducing entries modulo p for prime fields, and validate.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut inst: FanoInstance =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        inst.field.validate()?;
        if let FieldSpec::Prime { p } | FieldSpec::PrimeSquare { p } = inst.field {
            let p = p as i64;
            for row in inst.v.iter_mut().chain(inst.q.iter_mut()) {
                for x in row.iter_mut() {
                    *x = x.rem_euclid(p);
                }
            }
        }
        inst.validate()?;
        Ok(inst)
    }

    /// Hex SHA-256 of the compact JSON encoding.
    pub fn digest(&self) -> String {
        let s = serde_json::to_string(self).expect("serializable");
        hex::encode(Sha256::digest(s.as_bytes()))
    }

    /// Shape checks, full rank of V, symmetry of Q and a six-dimensional quadric system.
    pub fn validate(&self) -> Result<()> {
        if self.k > 3 {
            return Err(Error::Precondition(format!("k = {} outside 0..=3", self.k)));
        }
        if self.v.len() != 10 - self.k || self.v.iter().any(|r| r.len() != 10) {
            return Err(Error::Malformed(format!("V must be {}×10", 10 - self.k)));
        }
        if self.q.len() != 10 || self.q.iter().any(|r| r.len() != 10) {
            return Err(Error::Malformed("Q must be 10×10".into()));
        }
        let c = self.ctx();
        if matrix::rank(&c.f, &c.v) != 10 - self.k {
            return Err(Error::DependentBasis);
        }
        if !matrix::is_symmetric(&c.f, &c.q) {
            return Err(Error::Malformed("Q is not symmetric".into()));
        }
        if c.system_rank() != 6 {
            return Err(Error::NotGeneric(
                "restricted quadric system is not six-dimensional".into(),
            ));
        }
        Ok(())
    }
}

/// Flatten the upper triangle of a symmetric matrix.
pub fn sym_vector(m: &Mat<u64>) -> Vec<u64> {
    let n = m.rows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(*m.get(i, j));
        }
    }
    out
}

impl Ctx {
    /// The five restricted Plücker quadrics followed by Q, as forms on V.
    pub fn system(&self) -> Vec<Mat<u64>> {
        let mut out: Vec<Mat<u64>> = self
            .plucker
            .iter()
            .map(|p| matrix::congruence(&self.f, &self.v, p))
            .collect();
        out.push(matrix::congruence(&self.f, &self.v, &self.q));
        out
    }

    pub fn system_rank(&self) -> usize {
        let rows: Vec<Vec<u64>> = self.system().iter().map(sym_vector).collect();
        let cols = rows[0].len();
        matrix::rank(&self.f, &Mat::from_rows(rows, cols))
    }

    pub fn dim(&self) -> usize {
        10 - self.k
    }

    /// Whether a bivector lies on the variety.
    pub fn contains(&self, w: &[u64]) -> bool {
        let f = &self.f;
        matrix::mat_vec(f, &self.n, w).iter().all(|x| *x == 0)
            && matrix::bilinear(f, &self.q, w, w) == 0
            && wedge5::wedge_bb(f, w, w).iter().all(|x| *x == 0)
    }

    /// Rank of the Jacobian of the equations (Plücker quadrics, Q, linear forms) at `w`.
    pub fn jacobian_rank(&self, w: &[u64]) -> usize {
        let f = &self.f;
        let mut rows: Vec<Vec<u64>> = self
            .plucker
            .iter()
            .map(|p| matrix::mat_vec(f, p, w))
            .collect();
        rows.push(matrix::mat_vec(f, &self.q, w));
        rows.extend(self.n.to_rows());
        matrix::rank(f, &Mat::from_rows(rows, 10))
    }

    /// A point of the variety over the field, or `None` if this attempt found none.
    ///
    /// Three hyperplanes (the k defining ones plus random ones) cut G in a threefold; the
    /// planes `a ∧ x` with `a` on a random line and `x` fixed by one more random linear
    /// condition sweep a curve on it, which meets Q in at most eight points.
    pub fn find_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<u64>> {
        let f = &self.f;
        let mut forms: Vec<Mat<u64>> = (0..self.k).map(|i| alt_matrix(f, self.n.row(i))).collect();
        while forms.len() < 3 {
            let h: Vec<u64> = (0..10).map(|_| f.random(rng)).collect();
            forms.push(alt_matrix(f, &h));
        }
        if self.k > 3 {
            return None;
        }
        let a0: Vec<u64> = (0..5).map(|_| f.random(rng)).collect();
        let a1: Vec<u64> = (0..5).map(|_| f.random(rng)).collect();
        let r: Vec<u64> = (0..5).map(|_| f.random(rng)).collect();
        let point_at = |s: u64| -> Option<Vec<u64>> {
            let a: Vec<u64> = a0
                .iter()
                .zip(&a1)
                .map(|(x, y)| f.add(x, &f.mul(&s, y)))
                .collect();
            let mut rows: Vec<Vec<u64>> = forms.iter().map(|m| matrix::vec_mat(f, &a, m)).collect();
            rows.push(r.clone());
            let x = maximal_minors_kernel(f, &Mat::from_rows(rows, 5));
            let w = wedge_vv(f, &a, &x);
            if w.iter().all(|c| *c == 0) {
                None
            } else {
                Some(w)
            }
        };
        let qval = |s: u64| point_at(s).map_or(0, |w| matrix::bilinear(f, &self.q, &w, &w));
        let candidates: Vec<u64> = if f.p() <= 4096 {
            (0..f.p()).filter(|&s| qval(s) == 0).collect()
        } else {
            let xs: Vec<u64> = (0..9).collect();
            let ys: Vec<u64> = xs.iter().map(|&s| qval(s)).collect();
            let poly = upoly::interpolate(f, &xs, &ys);
            if poly.is_empty() {
                vec![f.random(rng)]
            } else {
                affine_roots(f, &poly).into_iter().map(|(s, _)| s).collect()
            }
        };
        let picks: Vec<Vec<u64>> = candidates
            .into_iter()
            .filter_map(point_at)
            .filter(|w| self.contains(w))
            .collect();
        if picks.is_empty() {
            None
        } else {
            Some(picks[rng.gen_range(0..picks.len())].clone())
        }
    }
}

/// Kernel vector of a 4×5 matrix by signed maximal minors (zero if rank < 4).
pub fn maximal_minors_kernel(f: &Fp, m: &Mat<u64>) -> Vec<u64> {
    (0..5)
        .map(|j| {
            let minor = Mat::from_fn(4, 4, |r, c| *m.get(r, if c < j { c } else { c + 1 }));
            let d = matrix::det(f, &minor);
            if j % 2 == 0 {
                d
            } else {
                f.neg(&d)
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ProbeReport {
    pub trials: usize,
    pub points: usize,
    pub no_point: usize,
    pub failures: usize,
    /// Points where the Jacobian drops rank.
    pub witnesses: Vec<Vec<u64>>,
}

/// Jacobian test at `trials` random points; each trial uses its own stream.
pub fn smoothness_probe(inst: &FanoInstance, trials: usize, seed: u64) -> ProbeReport {
    let c = inst.ctx();
    probe_ctx(&c, trials, seed)
}

fn probe_ctx(c: &Ctx, trials: usize, seed: u64) -> ProbeReport {
    let expected = 4 + c.k;
    let results: Vec<Option<(Vec<u64>, bool)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, "probe", i as u64);
            for _ in 0..16 {
                if let Some(w) = c.find_point(&mut rng) {
                    return Some((w.clone(), c.jacobian_rank(&w) == expected));
                }
            }
            None
        })
        .collect();
    let mut rep = ProbeReport {
        trials,
        points: 0,
        no_point: 0,
        failures: 0,
        witnesses: Vec::new(),
    };
    for r in results {
        match r {
            None => rep.no_point += 1,
            Some((w, ok)) => {
                rep.points += 1;
                if !ok {
                    rep.failures += 1;
                    rep.witnesses.push(w);
                }
            }
        }
    }
    rep
}

fn random_q_and_v(
    f: &Fp,
    field: FieldSpec,
    k: usize,
    rng: &mut crate::rng::Stream,
) -> (Mat<u64>, Mat<u64>) {
    let draw = |rng: &mut crate::rng::Stream| -> u64 {
        if field == FieldSpec::Rationals {
            f.reduce(rng.gen_range(-9..=9))
        } else {
            f.random(rng)
        }
    };
    let mut q = matrix::zeros(f, 10, 10);
    for i in 0..10 {
        for j in i..10 {
            let x = draw(rng);
            q.set(i, j, x);
            q.set(j, i, x);
        }
    }
    let v = if k == 0 {
        matrix::identity(f, 10)
    } else {
        Mat::from_fn(10 - k, 10, |_, _| draw(rng))
    };
    (q, v)
}

/// A random instance, deterministic in `(k, field, seed)`, accepted once it validates and
/// passes a short smoothness probe; otherwise resampled from the next sub-stream.
pub fn random_instance(k: usize, field: FieldSpec, seed: u64) -> Result<FanoInstance> {
    if k > 3 {
        return Err(Error::Precondition(format!("k = {k} outside 0..=3")));
    }
    field.validate()?;
    let f = field.prime_field();
    for attempt in 0..retry_budget() {
        let mut rng = if attempt == 0 {
            stream(seed, "instance")
        } else {
            substream(seed, "instance", attempt as u64)
        };
        let (q, v) = random_q_and_v(&f, field, k, &mut rng);
        let inst = FanoInstance::from_parts(field, k, &v, &q, seed);
        if inst.validate().is_err() {
            continue;
        }
        let rep = smoothness_probe(&inst, ACCEPT_PROBE_TRIALS, seed ^ attempt as u64);
        if rep.failures == 0 && rep.points > 0 {
            return Ok(inst);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no acceptable instance over {field} for k = {k}"
    )))
}

/// X ⊃ Z ⊃ W: nested linear sections sharing one quadric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoChain {
    pub x: FanoInstance,
    pub z: FanoInstance,
    pub w: FanoInstance,
}

impl FanoChain {
    pub fn validate(&self) -> Result<()> {
        for i in [&self.x, &self.z, &self.w] {
            i.validate()?;
        }
        let (x, z, w) = (self.x.ctx(), self.z.ctx(), self.w.ctx());
        if x.q != z.q || z.q != w.q || self.z.k != 1 || self.w.k != 2 || self.x.k != 0 {
            return Err(Error::Malformed(
                "chain members must share Q and have k = 0, 1, 2".into(),
            ));
        }
        if !matrix::contains(&z.f, &z.v, &w.v) {
            return Err(Error::Malformed("V8 is not contained in V9".into()));
        }
        Ok(())
    }
}

pub fn random_chain(field: FieldSpec, seed: u64) -> Result<FanoChain> {
    let z = random_instance(1, field, seed)?;
    let f = z.fp();
    let zc = z.ctx();
    for attempt in 0..retry_budget() {
        let mut rng = substream(seed, "chain", attempt as u64);
        let comb = matrix::random(&f, &mut rng, 8, 9);
        let v8 = matrix::mul(&f, &comb, &zc.v);
        let w = FanoInstance::from_parts(field, 2, &v8, &zc.q, seed);
        let x = FanoInstance::from_parts(field, 0, &matrix::identity(&f, 10), &zc.q, seed);
        let chain = FanoChain { x, z: z.clone(), w };
        if chain.validate().is_err() {
            continue;
        }
        let ok = [&chain.x, &chain.w].iter().all(|i| {
            let r = smoothness_probe(i, ACCEPT_PROBE_TRIALS, seed ^ attempt as u64);
            r.failures == 0 && r.points > 0
        });
        if ok {
            return Ok(chain);
        }
    }
    Err(Error::BudgetExhausted("no acceptable chain".into()))
}

// ---------------------------------------------------------------------------
// planes

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PlaneKind {
    /// `P(∧²V3)`, recorded by a basis of V3.
    Rho { v3: Vec<Vec<u64>> },
    /// `P(v1 ∧ V4)` with `V4 = ker w`.
    Sigma { v1: Vec<u64>, w: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaneHit {
    pub kind: PlaneKind,
    pub basis: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneSearch {
    pub rho_checked: usize,
    pub sigma_checked: usize,
    pub found: Vec<PlaneHit>,
}

/// Projective points of `P^{n-1}(F_p)`, normalized with first nonzero coordinate 1.
pub fn projective_points(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let count = p.pow(free as u32);
        for mut idx in 0..count {
            let mut v = vec![0u64; n];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = idx % p;
                idx /= p;
            }
            out.push(v);
        }
    }
    out
}

/// All `r`-dimensional subspaces of `F_p^n` as reduced echelon bases.
pub fn grassmannian_points(p: u64, r: usize, n: usize) -> Vec<Mat<u64>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    fn choose(start: usize, r: usize, n: usize, cur: &mut Vec<usize>, all: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            all.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            choose(i + 1, r, n, cur, all);
            cur.pop();
        }
    }
    choose(0, r, n, &mut Vec::new(), &mut pivots);
    for piv in pivots {
        // free slots: (row i, col c) with c > piv[i] and c not a pivot
        let slots: Vec<(usize, usize)> = (0..r)
            .flat_map(|i| {
                ((piv[i] + 1)..n)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let count = p.pow(slots.len() as u32);
        for mut idx in 0..count {
            let mut m = Mat::filled(r, n, 0u64);
            for (i, &c) in piv.iter().enumerate() {
                m.set(i, c, 1);
            }
            for &(i, c) in &slots {
                m.set(i, c, idx % p);
                idx /= p;
            }
            out.push(m);
        }
    }
    out
}

/// Number of points of `P^{n-1}(F_p)`.
pub fn projective_count(p: u64, n: u32) -> u64 {
    (p.pow(n) - 1) / (p - 1)
}

fn plane_inside(c: &Ctx, basis: &Mat<u64>) -> bool {
    let f = &c.f;
    for i in 0..basis.rows() {
        if matrix::mat_vec(f, &c.n, basis.row(i))
            .iter()
            .any(|x| *x != 0)
        {
            return false;
        }
    }
    matrix::is_zero(f, &matrix::congruence(f, basis, &c.q))
}

/// Every ρ-plane and σ-plane of G over a small prime field, tested for containment.
pub fn plane_search(inst: &FanoInstance) -> Result<PlaneSearch> {
    let p = inst.field.characteristic();
    if !matches!(inst.field, FieldSpec::Prime { .. }) || p > 7 {
        return Err(Error::FieldTooSmall(format!(
            "plane enumeration needs a prime field with p ≤ 7, got {}",
            inst.field
        )));
    }
    if inst.k != 1 {
        return Err(Error::Precondition(
            "plane search expects a k = 1 instance".into(),
        ));
    }
    let c = inst.ctx();
    let f = c.f;
    let g35 = grassmannian_points(p, 3, 5);
    let rho: Vec<PlaneHit> = g35
        .par_iter()
        .filter_map(|v3| {
            let basis = wedge5::wedge2_basis(&f, v3);
            plane_inside(&c, &basis).then(|| PlaneHit {
                kind: PlaneKind::Rho { v3: v3.to_rows() },
                basis: basis.to_rows(),
            })
        })
        .collect();
    let pts = projective_points(p, 5);
    let flags: Vec<(Vec<u64>, Vec<u64>)> = pts
        .iter()
        .flat_map(|v1| {
            pts.iter()
                .filter(|w| matrix::dot(&f, v1, w) == 0)
                .map(move |w| (v1.clone(), w.clone()))
        })
        .collect();
    let sigma_checked = flags.len();
    let sigma: Vec<PlaneHit> = flags
        .par_iter()
        .filter_map(|(v1, w)| {
            let basis = sigma_plane(&f, v1, w);
            plane_inside(&c, &basis).then(|| PlaneHit {
                kind: PlaneKind::Sigma {
                    v1: v1.clone(),
                    w: w.clone(),
                },
                basis: basis.to_rows(),
            })
        })
        .collect();
    let mut found = rho;
    found.extend(sigma);
    Ok(PlaneSearch {
        rho_checked: g35.len(),
        sigma_checked,
        found,
    })
}

/// Basis of the plane `v1 ∧ ker(w)`.
pub fn sigma_plane(f: &Fp, v1: &[u64], w: &[u64]) -> Mat<u64> {
    let v4 = matrix::kernel(f, &Mat::from_rows(vec![w.to_vec()], 5));
    let wedges: Vec<Vec<u64>> = v4.iter().map(|b| wedge_vv(f, v1, b)).collect();
    matrix::span(f, &wedges, 10)
}

/// A k = 1 instance over F_p containing `P(∧²⟨e1,e2,e3⟩)`: the hyperplane has zero
/// coefficients on p12, p13, p23 and Q vanishes on their span.
pub fn instance_with_rho_plane(p: u64, seed: u64) -> Result<FanoInstance> {
    let field = FieldSpec::Prime { p };
    let f = Fp::new(p)?;
    let idx = [
        wedge5::pair_index(0, 1),
        wedge5::pair_index(0, 2),
        wedge5::pair_index(1, 2),
    ];
    for attempt in 0..retry_budget() {
        let mut rng = substream(seed, "rho-plane", attempt as u64);
        let mut h: Vec<u64> = (0..10).map(|_| f.random(&mut rng)).collect();
        for &i in &idx {
            h[i] = 0;
        }
        let mut q = matrix::random_symmetric(&f, &mut rng, 10);
        for &i in &idx {
            for &j in &idx {
                q.set(i, j, 0);
            }
        }
        let v = Mat::from_rows(matrix::kernel(&f, &Mat::from_rows(vec![h], 10)), 10);
        if v.rows() != 9 {
            continue;
        }
        let inst = FanoInstance::from_parts(field, 1, &v, &q, seed);
        if inst.validate().is_ok() {
            return Ok(inst);
        }
    }
    Err(Error::BudgetExhausted(
        "no instance with a prescribed plane".into(),
    ))
}

// ---------------------------------------------------------------------------
// Gushel cones

/// `Z ⊂ CG` cut by `Q(t,ω) = t² + 2ℓ(ω)t + q(ω)` and `h_0 = … = h_k = 0`, forms on ω only,
/// so the linear space passes through the vertex of the cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GushelInstance {
    pub field: FieldSpec,
    pub k: usize,
    pub l: Vec<i64>,
    pub q: Vec<Vec<i64>>,
    /// Rows h_0, …, h_k.
    pub h: Vec<Vec<i64>>,
    pub seed: u64,
}

impl GushelInstance {
    pub fn fp(&self) -> Fp {
        self.field.prime_field()
    }

    pub fn l_vec(&self) -> Vec<u64> {
        let f = self.fp();
        self.l.iter().map(|&x| f.reduce(x)).collect()
    }

    pub fn q_mat(&self) -> Mat<u64> {
        reduce_rows(&self.fp(), &self.q, 10)
    }

    pub fn h_mat(&self) -> Mat<u64> {
        reduce_rows(&self.fp(), &self.h, 10)
    }

    /// Basis of `V_{9−k} = ker(h_0, …, h_k)`.
    pub fn v_low(&self) -> Mat<u64> {
        Mat::from_rows(matrix::kernel(&self.fp(), &self.h_mat()), 10)
    }

    /// `Q' = q − ℓ ℓᵀ`.
    pub fn q_prime(&self) -> Mat<u64> {
        let f = self.fp();
        let l = self.l_vec();
        let ll = Mat::from_fn(10, 10, |i, j| f.mul(&l[i], &l[j]));
        matrix::sub(&f, &self.q_mat(), &ll)
    }

    /// The branch-locus companion `G ∩ P(V_{9−k}) ∩ Q'`, a (k+1)-instance.
    pub fn companion(&self) -> Result<FanoInstance> {
        let inst = FanoInstance::from_parts(
            self.field,
            self.k + 1,
            &self.v_low(),
            &self.q_prime(),
            self.seed,
        );
        inst.validate()?;
        Ok(inst)
    }

    /// `zQ + P_v` on the cone space `⟨p_0⟩ ⊕ V_{9−k}`, basis `(1,0)` then `(0, ω_i)`.
    pub fn cone_matrix(&self, z: u64, v: &[u64]) -> Mat<u64> {
        let f = self.fp();
        let b = self.v_low();
        let l = self.l_vec();
        let inner = matrix::add(
            &f,
            &matrix::scale(&f, &z, &matrix::congruence(&f, &b, &self.q_mat())),
            &matrix::congruence(&f, &b, &pfaffian_quadric(&f, v)),
        );
        let lb = matrix::mat_vec(&f, &b, &l);
        let n = b.rows() + 1;
        Mat::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) => z,
            (0, j) => f.mul(&z, &lb[j - 1]),
            (i, 0) => f.mul(&z, &lb[i - 1]),
            (i, j) => *inner.get(i - 1, j - 1),
        })
    }

    /// The instance `Z*(ε)`: quadric `Q(ε⁻¹h_0(ω), ω)` on `ker(h_1, …, h_k)`.
    pub fn flatten(&self, eps: u64) -> Result<FanoInstance> {
        let f = self.fp();
        let e = f.reduce(eps as i64);
        let einv = f
            .inv(&e)
            .ok_or_else(|| Error::Precondition("ε = 0: use the Gushel instance itself".into()))?;
        let h = self.h_mat();
        let h0 = h.row(0).to_vec();
        let l = self.l_vec();
        let e2 = f.mul(&einv, &einv);
        let q = Mat::from_fn(10, 10, |i, j| {
            let cross = f.add(&f.mul(&h0[i], &l[j]), &f.mul(&l[i], &h0[j]));
            let x = f.add(self.q_mat().get(i, j), &f.mul(&einv, &cross));
            f.add(&x, &f.mul(&e2, &f.mul(&h0[i], &h0[j])))
        });
        let rest = h.select_rows(&(1..h.rows()).collect::<Vec<_>>());
        let v = if rest.rows() == 0 {
            matrix::identity(&f, 10)
        } else {
            Mat::from_rows(matrix::kernel(&f, &rest), 10)
        };
        let inst = FanoInstance::from_parts(self.field, self.k, &v, &q, self.seed);
        inst.validate()?;
        Ok(inst)
    }
}

/// A random Gushel instance over a prime field whose companion validates.
pub fn random_gushel(k: usize, field: FieldSpec, seed: u64) -> Result<GushelInstance> {
    if k > 2 {
        return Err(Error::Precondition(
            "Gushel instances need k ≤ 2 so that the companion exists".into(),
        ));
    }
    if field == FieldSpec::Rationals {
        return Err(Error::Unsupported(
            "Gushel instances are built over prime fields".into(),
        ));
    }
    let f = field.prime_field();
    for attempt in 0..retry_budget() {
        let mut rng = substream(seed, "gushel", attempt as u64);
        let l: Vec<u64> = (0..10).map(|_| f.random(&mut rng)).collect();
        let q = matrix::random_symmetric(&f, &mut rng, 10);
        let h = matrix::random(&f, &mut rng, k + 1, 10);
        let g = GushelInstance {
            field,
            k,
            l: l.iter().map(|&x| x as i64).collect(),
            q: to_ints(&f, &q, false),
            h: to_ints(&f, &h, false),
            seed,
        };
        if matrix::rank(&f, &h) != k + 1 {
            continue;
        }
        let Ok(comp) = g.companion() else { continue };
        let rep = smoothness_probe(&comp, ACCEPT_PROBE_TRIALS, seed);
        if rep.failures == 0 && rep.points > 0 {
            return Ok(g);
        }
    }
    Err(Error::BudgetExhausted(
        "no acceptable Gushel instance".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::INTERPOLATION_PRIME;
    use proptest::prelude::*;

    fn big() -> FieldSpec {
        FieldSpec::Prime {
            p: INTERPOLATION_PRIME,
        }
    }

    #[test]
    fn deterministic_generation() {
        let a = random_instance(1, big(), 42).unwrap();
        let b = random_instance(1, big(), 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
        let c = random_instance(2, big(), 42).unwrap();
        assert_eq!(c.v.len(), 8);
        assert_ne!(a.digest(), random_instance(1, big(), 43).unwrap().digest());
    }

    #[test]
    fn rational_instance_has_small_integers() {
        let x = random_instance(0, FieldSpec::Rationals, 7).unwrap();
        assert!(x.q.iter().flatten().all(|v| v.abs() <= 9));
        assert_eq!(x.v.len(), 10);
        let back = FanoInstance::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_reduces_mod_p() {
        let s = r#"{"field":{"kind":"prime","p":7},"k":0,
            "V":[[1,0,0,0,0,0,0,0,0,0],[0,1,0,0,0,0,0,0,0,0],[0,0,1,0,0,0,0,0,0,0],[0,0,0,1,0,0,0,0,0,0],
                 [0,0,0,0,1,0,0,0,0,0],[0,0,0,0,0,1,0,0,0,0],[0,0,0,0,0,0,1,0,0,0],[0,0,0,0,0,0,0,1,0,0],
                 [0,0,0,0,0,0,0,0,1,0],[0,0,0,0,0,0,0,0,0,8]],
            "Q":[[1,0,0,0,0,0,0,0,0,0],[0,1,0,0,0,0,0,0,0,0],[0,0,1,0,0,0,0,0,0,0],[0,0,0,1,0,0,0,0,0,0],
                 [0,0,0,0,1,0,0,0,0,0],[0,0,0,0,0,1,0,0,0,0],[0,0,0,0,0,0,1,0,0,0],[0,0,0,0,0,0,0,1,0,0],
                 [0,0,0,0,0,0,0,0,1,0],[0,0,0,0,0,0,0,0,0,-1]],"seed":3}"#;
        let inst = FanoInstance::from_json(s).unwrap();
        assert_eq!(inst.v[9][9], 1);
        assert_eq!(inst.q[9][9], 6);
        assert!(FanoInstance::from_json("{").is_err());
    }

    #[test]
    fn probe_accepts_random_and_rejects_pfaffian_quadric() {
        let z = random_instance(1, big(), 5).unwrap();
        let rep = smoothness_probe(&z, 50, 1);
        assert_eq!(rep.failures, 0);
        assert_eq!(rep.points, 50);
        assert_eq!(smoothness_probe(&z, 0, 1).trials, 0);
        let f = z.fp();
        let v = [1u64, 2, 3, 4, 5];
        let bad = FanoInstance::from_parts(z.field, 1, &z.ctx().v, &pfaffian_quadric(&f, &v), 0);
        let rep = smoothness_probe(&bad, 10, 2);
        assert!(rep.points > 0);
        assert_eq!(rep.failures, rep.points);
        // the witness is singular: the gradient of Q lies in the span of the Plücker gradients
        let c = bad.ctx();
        assert!(c.contains(&rep.witnesses[0]));
        assert_eq!(c.jacobian_rank(&rep.witnesses[0]), 4);
    }

    #[test]
    fn flag_and_grassmannian_counts() {
        for p in [3u64, 5] {
            let g = grassmannian_points(p, 3, 5).len() as u64;
            // Gaussian binomial [5 choose 2]_p
            let gauss = (p.pow(5) - 1) * (p.pow(4) - 1) / ((p.pow(2) - 1) * (p - 1));
            assert_eq!(g, gauss);
            let flags = projective_count(p, 5) * projective_count(p, 4);
            let pts = projective_points(p, 5);
            let counted = pts
                .iter()
                .map(|v| {
                    pts.iter()
                        .filter(|w| {
                            v.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<u64>() % p == 0
                        })
                        .count()
                })
                .sum::<usize>();
            assert_eq!(counted as u64, flags);
        }
        assert_eq!(grassmannian_points(3, 3, 5).len(), 1210);
    }

    #[test]
    fn positive_control_plane_is_found() {
        let inst = instance_with_rho_plane(3, 1).unwrap();
        let res = plane_search(&inst).unwrap();
        assert_eq!(res.sigma_checked, 4840);
        let target = PlaneKind::Rho {
            v3: vec![
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
            ],
        };
        assert!(res.found.iter().any(|h| h.kind == target));
        assert!(plane_search(&random_instance(1, big(), 1).unwrap()).is_err());
    }

    #[test]
    fn chain_is_nested() {
        let ch = random_chain(big(), 3).unwrap();
        ch.validate().unwrap();
        let w = ch.w.ctx();
        let f = w.f;
        let mut rng = stream(1, "t");
        let pt = (0..4).find_map(|_| w.find_point(&mut rng)).unwrap();
        // a point of W lies on Z and X
        assert!(ch.z.ctx().contains(&pt) && ch.x.ctx().contains(&pt));
        for qd in ch.w.ctx().system() {
            let coords = matrix::solve_left(&f, &w.v, &pt).unwrap();
            assert_eq!(matrix::bilinear(&f, &qd, &coords, &coords), 0);
        }
    }

    #[test]
    fn gushel_flatten_substitutes() {
        let g = random_gushel(1, big(), 4).unwrap();
        let f = g.fp();
        let z1 = g.flatten(1).unwrap();
        let c = z1.ctx();
        let (l, h0) = (g.l_vec(), g.h_mat().row(0).to_vec());
        let mut rng = stream(2, "t");
        let w = matrix::vec_mat(
            &f,
            &(0..9).map(|_| f.random(&mut rng)).collect::<Vec<_>>(),
            &c.v,
        );
        let t = matrix::dot(&f, &h0, &w);
        let lw = matrix::dot(&f, &l, &w);
        let expect = f.add(
            &f.add(&f.mul(&t, &t), &f.mul(&2, &f.mul(&lw, &t))),
            &matrix::bilinear(&f, &g.q_mat(), &w, &w),
        );
        assert_eq!(matrix::bilinear(&f, &c.q, &w, &w), expect);
        assert!(g.flatten(0).is_err());
        assert_eq!(g.companion().unwrap().k, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn json_round_trip(seed in 0u64..1000, k in 0usize..4) {
            let inst = random_instance(k, big(), seed).unwrap();
            let back = FanoInstance::from_json(&inst.to_json()).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(back.digest(), inst.digest());
        }
    }
}
