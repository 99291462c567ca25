//! Conics on G(2,5) and on Z: classification, supporting spaces, sampling through singular
//! pencil members, the map α, rulings and the partner conic.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, Fp};
use crate::instance::{
    grassmannian_points, projective_points, retry_budget, sigma_plane, sym_vector, Ctx,
    FanoInstance,
};
use crate::matrix::{self, Mat};
use crate::poly::BinaryForm;
use crate::rng::{substream, Stream};
use crate::roots::{affine_roots, univariate_roots, ProjRoot};
use crate::sextic::{dual_coordinates, dual_pencil, normalize, v4_basis, DualPencil};
use crate::wedge5::{self, alt_matrix, bivector_rank_support, plucker_quadrics, wedge2_basis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConicClass {
    Tau,
    Sigma,
    Rho,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConicShape {
    Smooth,
    LinePair,
    DoubleLine,
}

/// A plane of ∧²V₅ with a ternary quadratic form on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conic {
    pub plane: Mat<u64>,
    pub form: Mat<u64>,
}

impl Conic {
    /// The image of `(s, t) ↦ s²a + st·b + t²c`.
    pub fn from_parametrization(f: &Fp, a: &[u64], b: &[u64], c: &[u64]) -> Result<Conic> {
        let plane = Mat::from_rows(vec![a.to_vec(), b.to_vec(), c.to_vec()], a.len());
        if matrix::rank(f, &plane) != 3 {
            return Err(Error::DependentBasis);
        }
        // x₂² − x₁x₃ in the basis (a, b, c)
        let half = f.inv(&2).unwrap();
        let mut form = matrix::zeros(f, 3, 3);
        form.set(1, 1, 1);
        form.set(0, 2, f.neg(&half));
        form.set(2, 0, f.neg(&half));
        Ok(Conic { plane, form })
    }

    pub fn point(&self, f: &Fp, x: &[u64]) -> Vec<u64> {
        matrix::vec_mat(f, x, &self.plane)
    }

    /// Every Plücker quadric restricts to a multiple of the conic's form.
    pub fn lies_on_g(&self, f: &Fp) -> bool {
        let mut rows = vec![sym_vector(&self.form)];
        rows.extend(
            plucker_quadrics(f)
                .iter()
                .map(|p| sym_vector(&matrix::congruence(f, &self.plane, p))),
        );
        !matrix::is_zero(f, &self.form) && matrix::rank(f, &Mat::from_rows(rows, 6)) == 1
    }

    pub fn shape(&self, f: &Fp) -> ConicShape {
        match matrix::rank(f, &self.form) {
            3 => ConicShape::Smooth,
            2 => ConicShape::LinePair,
            _ => ConicShape::DoubleLine,
        }
    }

    /// Same plane and proportional forms, independent of the chosen bases.
    pub fn same_as(&self, f: &Fp, other: &Conic) -> bool {
        if matrix::row_space(f, &self.plane) != matrix::row_space(f, &other.plane) {
            return false;
        }
        // express the other's form in our basis
        let change: Vec<Vec<u64>> = (0..3)
            .map(|i| matrix::solve_left(f, &other.plane, self.plane.row(i)).unwrap())
            .collect();
        let moved = matrix::congruence(f, &Mat::from_rows(change, 3), &other.form);
        let flat = Mat::from_rows(vec![sym_vector(&self.form), sym_vector(&moved)], 6);
        matrix::rank(f, &flat) == 1
    }

    /// `n` points of the conic from random lines of its plane.
    pub fn points<R: Rng + ?Sized>(&self, f: &Fp, n: usize, rng: &mut R) -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = Vec::new();
        for _ in 0..64 * n.max(1) {
            if out.len() >= n {
                break;
            }
            let a: Vec<u64> = (0..3).map(|_| f.random(rng)).collect();
            let b: Vec<u64> = (0..3).map(|_| f.random(rng)).collect();
            let quad = [
                matrix::bilinear(f, &self.form, &a, &a),
                f.mul(&2, &matrix::bilinear(f, &self.form, &a, &b)),
                matrix::bilinear(f, &self.form, &b, &b),
            ];
            for (s, _) in affine_roots(f, &quad) {
                let x: Vec<u64> = a
                    .iter()
                    .zip(&b)
                    .map(|(u, v)| f.add(u, &f.mul(&s, v)))
                    .collect();
                let p = normalize(f, &self.point(f, &x));
                if p.iter().any(|c| *c != 0) && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out.truncate(n);
        out
    }
}

/// Class from the plane, shape from the rank of the form.
pub fn classify_conic(f: &Fp, c: &Conic) -> Result<(ConicClass, ConicShape)> {
    if !c.lies_on_g(f) {
        return Err(Error::Precondition("conic does not lie on G".into()));
    }
    let in_g = plucker_quadrics(f)
        .iter()
        .all(|p| matrix::is_zero(f, &matrix::congruence(f, &c.plane, p)));
    if !in_g {
        return Ok((ConicClass::Tau, c.shape(f)));
    }
    let supports: Vec<Vec<u64>> = (0..3)
        .flat_map(|i| bivector_rank_support(f, c.plane.row(i)).1.to_rows())
        .collect();
    let class = match matrix::rank(f, &Mat::from_rows(supports, 5)) {
        3 => ConicClass::Rho,
        4 => ConicClass::Sigma,
        r => {
            return Err(Error::Precondition(format!(
                "plane in G with supports spanning {r} dimensions"
            )))
        }
    };
    Ok((class, c.shape(f)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    V4(Mat<u64>),
    /// A ρ-conic lies in `G(2, V₄)` for every `V₄ ⊃ V₃`.
    Rho {
        v3: Mat<u64>,
    },
}

/// The span of the 2-planes of three points of the conic.
pub fn supporting_v4<R: Rng + ?Sized>(f: &Fp, c: &Conic, rng: &mut R) -> Result<Support> {
    let pts = c.points(f, 3, rng);
    if pts.len() < 3 {
        return Err(Error::BudgetExhausted("too few points on the conic".into()));
    }
    let mut rows = Vec::new();
    for p in &pts {
        let (r, s) = bivector_rank_support(f, p);
        if r != 2 {
            return Err(Error::Precondition("conic point off G".into()));
        }
        rows.extend(s.to_rows());
    }
    let span = matrix::span(f, &rows, 5);
    match span.rows() {
        4 => Ok(Support::V4(span)),
        3 => Ok(Support::Rho { v3: span }),
        r => Err(Error::Precondition(format!("2-planes span {r} dimensions"))),
    }
}

// ---------------------------------------------------------------------------
// conics on Z

/// A conic on a k = 1 instance with its supporting V₄ and the singular pencil member
/// containing its plane. Plane, vertex and forms are stored in coordinates on `M`.
#[derive(Clone, Debug)]
pub struct ConicOnZ {
    pub conic: Conic,
    pub w: Vec<u64>,
    pub member: [u64; 2],
    /// Basis of the plane in coordinates on `M = ∧²V₄ ∩ V₉`.
    pub plane_m: Mat<u64>,
    pub vertex_m: Vec<u64>,
    /// Roots skipped because the rulings of the base quadric were not defined over F_p.
    pub ruling_resamples: usize,
}

#[derive(Serialize)]
struct ConicJson {
    plane: Vec<Vec<u64>>,
    form: Vec<Vec<u64>>,
    #[serde(rename = "V4")]
    v4: Vec<Vec<u64>>,
    member: [u64; 2],
}

impl ConicOnZ {
    pub fn to_json(&self, f: &Fp) -> serde_json::Value {
        serde_json::to_value(ConicJson {
            plane: self.conic.plane.to_rows(),
            form: self.conic.form.to_rows(),
            v4: v4_basis(f, &self.w).to_rows(),
            member: self.member,
        })
        .expect("serializable")
    }

    pub fn root(&self) -> ProjRoot {
        ProjRoot {
            lambda: self.member[0],
            mu: self.member[1],
        }
    }
}

/// The member other than `root` used to cut conics out of planes.
fn cutting_member(pencil: &DualPencil, root: &ProjRoot) -> Mat<u64> {
    if root.mu != 0 {
        pencil.q_big.clone()
    } else {
        pencil.q_m.clone()
    }
}

/// Some point of the quadric `q` outside its kernel.
fn isotropic_point<R: Rng + ?Sized>(f: &Fp, q: &Mat<u64>, rng: &mut R) -> Option<Vec<u64>> {
    let n = q.rows();
    let ker = matrix::kernel(f, q);
    for _ in 0..64 {
        let a: Vec<u64> = (0..n).map(|_| f.random(rng)).collect();
        let b: Vec<u64> = (0..n).map(|_| f.random(rng)).collect();
        let quad = [
            matrix::bilinear(f, q, &a, &a),
            f.mul(&2, &matrix::bilinear(f, q, &a, &b)),
            matrix::bilinear(f, q, &b, &b),
        ];
        for (s, _) in affine_roots(f, &quad) {
            let x: Vec<u64> = a
                .iter()
                .zip(&b)
                .map(|(u, v)| f.add(u, &f.mul(&s, v)))
                .collect();
            let mut span = ker.clone();
            span.push(x.clone());
            if matrix::rank(f, &Mat::from_rows(span, n)) == ker.len() + 1 {
                return Some(x);
            }
        }
    }
    None
}

/// The two maximal isotropic spaces of `q` containing the kernel and the isotropic vector
/// `x`, when `q` has corank one and its rulings split over the field.
pub fn planes_through(f: &Fp, q: &Mat<u64>, x: &[u64]) -> Option<[Mat<u64>; 2]> {
    let n = q.rows();
    let ker = matrix::kernel(f, q);
    let qx = matrix::mat_vec(f, q, x);
    let tangent = Mat::from_rows(matrix::kernel(f, &Mat::from_rows(vec![qx], n)), n);
    let mut base = ker.clone();
    base.push(x.to_vec());
    let base_m = Mat::from_rows(base.clone(), n);
    // complete ⟨ker, x⟩ inside the tangent space
    let mut ys: Vec<Vec<u64>> = Vec::new();
    let mut cur = base_m.clone();
    for i in 0..tangent.rows() {
        let cand = cur.vstack(&Mat::from_rows(vec![tangent.row(i).to_vec()], n));
        if matrix::rank(f, &cand) == cand.rows() {
            cur = cand;
            ys.push(tangent.row(i).to_vec());
        }
    }
    if ys.len() != 2 {
        return None;
    }
    let g = |a: &[u64], b: &[u64]| matrix::bilinear(f, q, a, b);
    let form = BinaryForm {
        coeffs: vec![
            g(&ys[1], &ys[1]),
            f.mul(&2, &g(&ys[0], &ys[1])),
            g(&ys[0], &ys[0]),
        ],
    };
    let roots = univariate_roots(f, &form).ok()?;
    if roots.len() != 2 {
        return None;
    }
    let plane = |r: &ProjRoot| {
        let y: Vec<u64> = ys[0]
            .iter()
            .zip(&ys[1])
            .map(|(a, b)| f.add(&f.mul(&r.lambda, a), &f.mul(&r.mu, b)))
            .collect();
        let mut rows = base.clone();
        rows.push(y);
        matrix::span(f, &rows, n)
    };
    Some([plane(&roots[0].0), plane(&roots[1].0)])
}

fn conic_on_plane(f: &Fp, pencil: &DualPencil, root: &ProjRoot, plane_m: &Mat<u64>) -> Conic {
    let form = matrix::congruence(f, plane_m, &cutting_member(pencil, root));
    Conic {
        plane: matrix::mul(f, plane_m, &pencil.m),
        form,
    }
}

/// Try one pencil member; `allow_vertex` keeps samples whose vertex lies on the conic.
pub fn conic_in_member(
    ctx: &Ctx,
    pencil: &DualPencil,
    root: &ProjRoot,
    rng: &mut Stream,
    allow_vertex: bool,
) -> Option<std::result::Result<ConicOnZ, ()>> {
    let f = &ctx.f;
    let member = pencil.member(f, root);
    let ker = matrix::kernel(f, &member);
    if ker.len() != 1 {
        return None;
    }
    let x = isotropic_point(f, &member, rng)?;
    let Some(planes) = planes_through(f, &member, &x) else {
        return Some(Err(()));
    };
    let plane_m = planes[rng.gen_range(0..2)].clone();
    let conic = conic_on_plane(f, pencil, root, &plane_m);
    let cut = cutting_member(pencil, root);
    let vertex_on = matrix::bilinear(f, &cut, &ker[0], &ker[0]) == 0;
    if conic.shape(f) != ConicShape::Smooth || (vertex_on && !allow_vertex) {
        return None;
    }
    Some(Ok(ConicOnZ {
        conic,
        w: pencil.w.clone(),
        member: [root.lambda, root.mu],
        plane_m,
        vertex_m: ker[0].clone(),
        ruling_resamples: 0,
    }))
}

/// A smooth conic on `inst` through a corank-one pencil member whose rulings split.
pub fn sample_conic(inst: &FanoInstance, seed: u64) -> Result<ConicOnZ> {
    if inst.k != 1 {
        return Err(Error::Precondition(
            "conic sampling expects a k = 1 instance".into(),
        ));
    }
    let ctx = inst.ctx();
    let f = ctx.f;
    let mut resamples = 0;
    for attempt in 0..64 * retry_budget().max(1) {
        let mut rng = substream(seed, "conic", attempt as u64);
        let w: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
        let Ok(pencil) = dual_pencil(&ctx, &w) else {
            continue;
        };
        let Ok(roots) = univariate_roots(&f, &pencil.delta) else {
            continue;
        };
        for (root, _) in roots {
            match conic_in_member(&ctx, &pencil, &root, &mut rng, false) {
                Some(Ok(mut c)) => {
                    c.ruling_resamples = resamples;
                    return Ok(c);
                }
                Some(Err(())) => resamples += 1,
                None => {}
            }
        }
    }
    Err(Error::BudgetExhausted("no conic found".into()))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AlphaImage {
    pub member: [u64; 2],
    pub h: Vec<u64>,
    /// `P_{V₄}|⟨c⟩ = a·q_c` and `Q|⟨c⟩ = b·q_c`.
    pub a: u64,
    pub b: u64,
    pub corank: usize,
}

/// Scalar `s` with `m = s·form`, if any.
fn ratio(f: &Fp, m: &Mat<u64>, form: &Mat<u64>) -> Option<u64> {
    let (fv, mv) = (sym_vector(form), sym_vector(m));
    let i = fv.iter().position(|x| *x != 0)?;
    let s = f.div(&mv[i], &fv[i]).unwrap();
    fv.iter()
        .zip(&mv)
        .all(|(x, y)| f.mul(&s, x) == *y)
        .then_some(s)
}

/// The unique pencil member containing the plane of `c`.
pub fn alpha(inst: &FanoInstance, c: &ConicOnZ) -> Result<AlphaImage> {
    let ctx = inst.ctx();
    let f = ctx.f;
    let pencil = dual_pencil(&ctx, &c.w)?;
    let form = matrix::congruence(&f, &c.conic.plane, &wedge5::pfaffian_quadric(&f, &pencil.u));
    let qform = matrix::congruence(&f, &c.conic.plane, &ctx.q);
    let a = ratio(&f, &form, &c.conic.form)
        .ok_or_else(|| Error::Precondition("Plücker restriction not proportional".into()))?;
    let b = ratio(&f, &qform, &c.conic.form)
        .ok_or_else(|| Error::Precondition("Q restriction not proportional".into()))?;
    if a == 0 && b == 0 {
        return Err(Error::NotGeneric("the plane of the conic lies in Z".into()));
    }
    let root = ProjRoot {
        lambda: a,
        mu: f.neg(&b),
    };
    let member = pencil.member(&f, &root);
    let corank = member.rows() - matrix::rank(&f, &member);
    Ok(AlphaImage {
        member: [a, f.neg(&b)],
        h: dual_coordinates(&f, &c.w, &root),
        a,
        b,
        corank,
    })
}

/// Whether two planes through the kernel of `q` lie in one family: true iff they meet
/// exactly in the kernel or coincide.
pub fn same_ruling(f: &Fp, q: &Mat<u64>, p1: &Mat<u64>, p2: &Mat<u64>) -> Result<bool> {
    let ker = Mat::from_rows(matrix::kernel(f, q), q.rows());
    for p in [p1, p2] {
        if !matrix::is_zero(f, &matrix::congruence(f, p, q)) || !matrix::contains(f, p, &ker) {
            return Err(Error::Precondition(
                "plane not in the quadric through its vertex".into(),
            ));
        }
    }
    if matrix::row_space(f, p1) == matrix::row_space(f, p2) {
        return Ok(true);
    }
    Ok(matrix::intersect(f, p1, p2).rows() == ker.rows())
}

/// Vectors tried in order to span the 3-space containing a plane and its partner.
fn probe_vectors(n: usize) -> Vec<Vec<u64>> {
    (0..2 * n as u64)
        .map(|j| {
            (0..n as u64)
                .map(|i| 1 + (i + 1) * (j + 3) * (i + j + 7) % 97)
                .collect()
        })
        .collect()
}

/// The residual plane of the member inside `⟨L, r⟩`, for the first fixed probe `r`
/// giving a plane distinct from `L` that avoids `r`.
fn residual_plane(f: &Fp, q: &Mat<u64>, plane: &Mat<u64>) -> Option<Mat<u64>> {
    let n = q.rows();
    for r in probe_vectors(n) {
        let space = plane.vstack(&Mat::from_rows(vec![r.clone()], n));
        if matrix::rank(f, &space) != 4 {
            continue;
        }
        // q on ⟨L, r⟩ is t·(2Σ c_i x_i + d t)
        let mut lin: Vec<u64> = (0..3)
            .map(|i| f.mul(&2, &matrix::bilinear(f, q, plane.row(i), &r)))
            .collect();
        lin.push(matrix::bilinear(f, q, &r, &r));
        let coeffs = Mat::from_rows(matrix::kernel(f, &Mat::from_rows(vec![lin], 4)), 4);
        if coeffs.rows() != 3 {
            continue;
        }
        let other = matrix::row_space(f, &matrix::mul(f, &coeffs, &space));
        let with_r = other.vstack(&Mat::from_rows(vec![r], n));
        if other != matrix::row_space(f, plane) && matrix::rank(f, &with_r) == 4 {
            return Some(other);
        }
    }
    None
}

/// The conic in the other ruling cut by the 3-space through `⟨c⟩` fixed by the probe rule.
pub fn involution_partner(inst: &FanoInstance, c: &ConicOnZ) -> Result<ConicOnZ> {
    let ctx = inst.ctx();
    let f = ctx.f;
    let pencil = dual_pencil(&ctx, &c.w)?;
    let root = c.root();
    let member = pencil.member(&f, &root);
    if member.rows() - matrix::rank(&f, &member) != 1 {
        return Err(Error::NotGeneric(
            "corank-two member: the two rulings coincide".into(),
        ));
    }
    let plane_m = residual_plane(&f, &member, &c.plane_m)
        .ok_or_else(|| Error::NotGeneric("no residual plane".into()))?;
    Ok(ConicOnZ {
        conic: conic_on_plane(&f, &pencil, &root, &plane_m),
        w: c.w.clone(),
        member: c.member,
        plane_m,
        vertex_m: c.vertex_m.clone(),
        ruling_resamples: 0,
    })
}

/// Dimension of the intersection of two conic planes as linear subspaces.
pub fn plane_meet(f: &Fp, a: &ConicOnZ, b: &ConicOnZ) -> usize {
    matrix::intersect(f, &a.plane_m, &b.plane_m).rows()
}

/// Group `planes` by [`same_ruling`]; returns the number of classes, or an error if the
/// relation is not transitive on them.
pub fn ruling_classes(f: &Fp, q: &Mat<u64>, planes: &[Mat<u64>]) -> Result<usize> {
    let n = planes.len();
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            rel[i][j] = same_ruling(f, q, &planes[i], &planes[j])?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if rel[i][j] && rel[j][k] && !rel[i][k] {
                    return Err(Error::Precondition("same_ruling is not transitive".into()));
                }
            }
        }
    }
    let mut class = vec![usize::MAX; n];
    let mut count = 0;
    for i in 0..n {
        if class[i] == usize::MAX {
            for j in 0..n {
                if rel[i][j] {
                    class[j] = count;
                }
            }
            count += 1;
        }
    }
    Ok(count)
}

/// `count` planes through the vertex of the member, taken in pairs through random points.
pub fn sample_member_planes(
    f: &Fp,
    q: &Mat<u64>,
    count: usize,
    rng: &mut Stream,
) -> Result<Vec<Mat<u64>>> {
    let corank = q.rows() - matrix::rank(f, q);
    let mut out = Vec::new();
    for _ in 0..64 * count {
        if out.len() >= count {
            break;
        }
        let Some(x) = isotropic_point(f, q, rng) else {
            continue;
        };
        if corank == 1 {
            if let Some(ps) = planes_through(f, q, &x) {
                out.extend(ps);
            }
        } else {
            // the vertex is a line: planes through it are ⟨ker, x⟩
            let mut rows = matrix::kernel(f, q);
            rows.push(x);
            let p = matrix::span(f, &rows, q.rows());
            if p.rows() == 3 {
                out.push(p);
            }
        }
    }
    if out.len() < count {
        return Err(Error::BudgetExhausted(
            "too few planes in the member".into(),
        ));
    }
    out.truncate(count);
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaReport {
    pub nondegenerate: bool,
    /// Common zero of the two linear forms on the plane, in plane coordinates.
    pub common_zero: Option<Vec<u64>>,
}

/// Write the member as `x₄m₄ + x₅m₅` with the plane `{x₄ = x₅ = 0}` and test whether
/// `m₄|c` and `m₅|c` have a common zero on the conic.
pub fn kappa_criterion(inst: &FanoInstance, c: &ConicOnZ) -> Result<KappaReport> {
    let ctx = inst.ctx();
    let f = ctx.f;
    let pencil = dual_pencil(&ctx, &c.w)?;
    let member = pencil.member(&f, &c.root());
    if !matrix::is_zero(&f, &matrix::congruence(&f, &c.plane_m, &member)) {
        return Err(Error::Precondition(
            "member does not contain the plane".into(),
        ));
    }
    let comp = matrix::complement(&f, &c.plane_m)?;
    // on the plane, m_j(x) = 2B(x, b_j) for the complement vectors b_4, b_5
    let lin: Vec<Vec<u64>> = (0..comp.rows())
        .map(|j| {
            (0..3)
                .map(|i| {
                    f.mul(
                        &2,
                        &matrix::bilinear(&f, &member, c.plane_m.row(i), comp.row(j)),
                    )
                })
                .collect()
        })
        .collect();
    let zeros = matrix::kernel(&f, &Mat::from_rows(lin, 3));
    match zeros.len() {
        0 => Ok(KappaReport {
            nondegenerate: true,
            common_zero: None,
        }),
        1 => {
            let z = &zeros[0];
            let on = matrix::bilinear(&f, &c.conic.form, z, z) == 0;
            Ok(KappaReport {
                nondegenerate: !on,
                common_zero: Some(z.clone()),
            })
        }
        _ => Ok(KappaReport {
            nondegenerate: false,
            common_zero: None,
        }),
    }
}

/// A k = 1 instance over a small prime field and a conic on it whose pencil member has
/// its vertex on Z, so that every conic in that member passes through the vertex.
pub fn conic_through_vertex(p: u64, seed: u64) -> Result<(FanoInstance, ConicOnZ)> {
    let inst = crate::instance::random_instance(1, FieldSpec::Prime { p }, seed)?;
    let ctx = inst.ctx();
    let f = ctx.f;
    for attempt in 0..1000 * retry_budget().max(1) {
        let mut rng = substream(seed, "vertex-on-z", attempt as u64);
        let w: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
        let Ok(pencil) = dual_pencil(&ctx, &w) else {
            continue;
        };
        let Ok(roots) = univariate_roots(&f, &pencil.delta) else {
            continue;
        };
        for (root, _) in roots {
            let member = pencil.member(&f, &root);
            let ker = matrix::kernel(&f, &member);
            if ker.len() != 1
                || matrix::bilinear(&f, &cutting_member(&pencil, &root), &ker[0], &ker[0]) != 0
            {
                continue;
            }
            if let Some(Ok(c)) = conic_in_member(&ctx, &pencil, &root, &mut rng, true) {
                return Ok((inst, c));
            }
        }
    }
    Err(Error::BudgetExhausted("no member with vertex on Z".into()))
}

// ---------------------------------------------------------------------------
// the whole pipeline on a batch of samples

#[derive(Clone, Debug, Default, Serialize)]
pub struct PipelineReport {
    pub samples: usize,
    pub tau: usize,
    pub vertex_off_conic: usize,
    /// α returns the constructing member, of corank one, vanishing on the plane.
    pub alpha_round_trip: usize,
    /// Partner exists, differs, has the same V₄ and α-image and lies in the other ruling.
    pub partner_ok: usize,
    pub planes_meet_in_line: usize,
    pub involution: usize,
    /// `⟨c, c′⟩` is a 3-space on which the member splits into the two planes and neither
    /// pencil generator vanishes.
    pub union_ok: usize,
    /// Six planes of the member fall into exactly two ruling classes.
    pub two_ruling_classes: usize,
    pub kappa: usize,
    pub kappa_partner_agrees: usize,
    pub ruling_resamples: usize,
    pub failures: Vec<String>,
}

impl PipelineReport {
    pub fn structural_failures(&self) -> usize {
        let s = self.samples;
        [
            self.vertex_off_conic,
            self.alpha_round_trip,
            self.partner_ok,
            self.planes_meet_in_line,
            self.involution,
            self.union_ok,
            self.two_ruling_classes,
        ]
        .iter()
        .map(|x| s - x)
        .sum()
    }
}

/// Samples `n` conics on a k = 1 instance and runs every conic-level check on each.
pub fn conic_pipeline(inst: &FanoInstance, n: usize, seed: u64) -> Result<PipelineReport> {
    let ctx = inst.ctx();
    let f = ctx.f;
    let mut rep = PipelineReport::default();
    for i in 0..n {
        let c = sample_conic(inst, seed.wrapping_mul(1_000_003).wrapping_add(i as u64))?;
        rep.samples += 1;
        rep.ruling_resamples += c.ruling_resamples;
        let note =
            |rep: &mut PipelineReport, what: &str| rep.failures.push(format!("sample {i}: {what}"));
        if classify_conic(&f, &c.conic)?.0 == ConicClass::Tau {
            rep.tau += 1;
        }
        let pencil = dual_pencil(&ctx, &c.w)?;
        let root = c.root();
        let member = pencil.member(&f, &root);
        let cutting = cutting_member(&pencil, &root);
        if matrix::bilinear(&f, &cutting, &c.vertex_m, &c.vertex_m) != 0 {
            rep.vertex_off_conic += 1;
        } else {
            note(&mut rep, "vertex on the conic");
        }

        let a = alpha(inst, &c)?;
        if normalize(&f, &a.member) == normalize(&f, &c.member)
            && a.corank == 1
            && matrix::is_zero(&f, &matrix::congruence(&f, &c.plane_m, &member))
        {
            rep.alpha_round_trip += 1;
        } else {
            note(&mut rep, "α does not return the constructing member");
        }

        let partner = match involution_partner(inst, &c) {
            Ok(p) => p,
            Err(e) => {
                note(&mut rep, &format!("no partner: {e}"));
                continue;
            }
        };
        let pa = alpha(inst, &partner)?;
        if !partner.conic.same_as(&f, &c.conic)
            && partner.w == c.w
            && normalize(&f, &pa.member) == normalize(&f, &a.member)
            && !same_ruling(&f, &member, &c.plane_m, &partner.plane_m)?
        {
            rep.partner_ok += 1;
        } else {
            note(&mut rep, "partner check");
        }
        if plane_meet(&f, &c, &partner) == 2 {
            rep.planes_meet_in_line += 1;
        } else {
            note(&mut rep, "planes do not meet in a line");
        }
        match involution_partner(inst, &partner) {
            Ok(back)
                if matrix::row_space(&f, &back.plane_m) == matrix::row_space(&f, &c.plane_m) =>
            {
                rep.involution += 1
            }
            _ => note(&mut rep, "partner of partner moved the plane"),
        }

        let span = matrix::row_space(&f, &c.plane_m.vstack(&partner.plane_m));
        let on_z = {
            let mut rng = substream(seed, "pipeline-points", i as u64);
            c.conic
                .points(&f, 4, &mut rng)
                .iter()
                .chain(&partner.conic.points(&f, 4, &mut rng))
                .all(|p| ctx.contains(p))
        };
        let restricted = |m: &Mat<u64>| matrix::congruence(&f, &span, m);
        if span.rows() == 4
            && on_z
            && matrix::rank(&f, &restricted(&member)) == 2
            && !matrix::is_zero(&f, &restricted(&pencil.q_big))
            && !matrix::is_zero(&f, &restricted(&pencil.q_m))
        {
            rep.union_ok += 1;
        } else {
            note(&mut rep, "union of the conic and its partner");
        }

        let mut rng = substream(seed, "pipeline-planes", i as u64);
        match sample_member_planes(&f, &member, 6, &mut rng)
            .and_then(|ps| ruling_classes(&f, &member, &ps))
        {
            Ok(2) => rep.two_ruling_classes += 1,
            Ok(k) => note(&mut rep, &format!("{k} ruling classes")),
            Err(e) => note(&mut rep, &format!("ruling classes: {e}")),
        }

        let k1 = kappa_criterion(inst, &c)?.nondegenerate;
        let k2 = kappa_criterion(inst, &partner)?.nondegenerate;
        rep.kappa += k1 as usize;
        rep.kappa_partner_agrees += (k1 == k2) as usize;
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// special families in a hyperplane section of G

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub form_rank: usize,
    pub rho_planes: usize,
    pub rho_contain_kernel: usize,
    pub sigma_planes: usize,
    pub sigma_isotropic: usize,
    /// ρ-planes with `V₃ ⊉ W₁` found inside H (expected none).
    pub rho_without_kernel_inside: usize,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.form_rank == 4
            && self.rho_contain_kernel == self.rho_planes
            && self.sigma_isotropic == self.sigma_planes
            && self.rho_without_kernel_inside == 0
    }
}

/// Planes of G inside the hyperplane `H = {n · x = 0}` of a k = 1 instance over a small
/// prime field, found by enumeration; up to `limit` of each kind are examined.
pub fn special_family_checks(inst: &FanoInstance, limit: usize, seed: u64) -> Result<FamilyReport> {
    let p = inst.field.characteristic();
    if inst.k != 1 || !matches!(inst.field, FieldSpec::Prime { .. }) || p > 7 {
        return Err(Error::Precondition(
            "needs a k = 1 instance over F_p with p ≤ 7".into(),
        ));
    }
    let ctx = inst.ctx();
    let f = ctx.f;
    let n = ctx.n.row(0).to_vec();
    let omega = alt_matrix(&f, &n);
    let form_rank = matrix::rank(&f, &omega);
    if form_rank != 4 {
        return Err(Error::NotGeneric(format!("hyperplane of rank {form_rank}")));
    }
    let w1 = Mat::from_rows(matrix::kernel(&f, &omega), 5);
    let inside = |b: &Mat<u64>| (0..b.rows()).all(|i| matrix::dot(&f, &n, b.row(i)) == 0);
    let mut rng = substream(seed, "families", 0);
    let mut rep = FamilyReport {
        form_rank,
        rho_planes: 0,
        rho_contain_kernel: 0,
        sigma_planes: 0,
        sigma_isotropic: 0,
        rho_without_kernel_inside: 0,
    };
    let mut rho: Vec<Mat<u64>> = grassmannian_points(p, 3, 5)
        .into_iter()
        .filter(|v3| inside(&wedge2_basis(&f, v3)))
        .collect();
    shuffle(&mut rho, &mut rng);
    for v3 in rho.iter().take(limit) {
        rep.rho_planes += 1;
        rep.rho_contain_kernel += matrix::contains(&f, v3, &w1) as usize;
    }
    rep.rho_without_kernel_inside = rho
        .iter()
        .filter(|v3| !matrix::contains(&f, v3, &w1))
        .count();
    let pts = projective_points(p, 5);
    let mut sigma: Vec<(Vec<u64>, Vec<u64>)> = pts
        .iter()
        .flat_map(|v1| {
            pts.iter()
                .filter(|w| matrix::dot(&f, v1, w) == 0)
                .map(move |w| (v1.clone(), w.clone()))
        })
        .filter(|(v1, w)| inside(&sigma_plane(&f, v1, w)))
        .collect();
    shuffle(&mut sigma, &mut rng);
    for (v1, w) in sigma.iter().take(limit) {
        rep.sigma_planes += 1;
        let v4 = v4_basis(&f, w);
        let perp = matrix::mat_vec(&f, &omega, v1);
        rep.sigma_isotropic += (0..4).all(|i| matrix::dot(&f, &perp, v4.row(i)) == 0) as usize;
    }
    Ok(rep)
}

fn shuffle<T>(v: &mut [T], rng: &mut Stream) {
    for i in (1..v.len()).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::INTERPOLATION_PRIME;
    use crate::instance::random_instance;
    use crate::rng::stream;
    use crate::wedge5::wedge_vv;
    use proptest::prelude::*;

    fn fbig() -> Fp {
        Fp::new(INTERPOLATION_PRIME).unwrap()
    }

    fn e(i: usize) -> Vec<u64> {
        let mut v = vec![0; 5];
        v[i] = 1;
        v
    }

    fn add(f: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
    }

    fn tau(f: &Fp) -> Conic {
        let (v1, v2, v3, v4) = (e(0), e(1), e(2), e(3));
        let mid = add(f, &wedge_vv(f, &v1, &v4), &wedge_vv(f, &v2, &v3));
        Conic::from_parametrization(f, &wedge_vv(f, &v1, &v3), &mid, &wedge_vv(f, &v2, &v4))
            .unwrap()
    }

    fn sigma(f: &Fp) -> Conic {
        let v1 = e(0);
        Conic::from_parametrization(
            f,
            &wedge_vv(f, &v1, &e(1)),
            &wedge_vv(f, &v1, &e(2)),
            &wedge_vv(f, &v1, &e(3)),
        )
        .unwrap()
    }

    fn rho(f: &Fp) -> Conic {
        Conic::from_parametrization(
            f,
            &wedge_vv(f, &e(0), &e(1)),
            &wedge_vv(f, &e(0), &e(2)),
            &wedge_vv(f, &e(1), &e(2)),
        )
        .unwrap()
    }

    #[test]
    fn classification_of_standard_conics() {
        let f = fbig();
        assert_eq!(
            classify_conic(&f, &tau(&f)).unwrap(),
            (ConicClass::Tau, ConicShape::Smooth)
        );
        assert_eq!(
            classify_conic(&f, &sigma(&f)).unwrap(),
            (ConicClass::Sigma, ConicShape::Smooth)
        );
        assert_eq!(
            classify_conic(&f, &rho(&f)).unwrap(),
            (ConicClass::Rho, ConicShape::Smooth)
        );
        let mut rng = stream(1, "t");
        let v4 = Mat::from_rows((0..4).map(e).collect(), 5);
        assert_eq!(
            supporting_v4(&f, &tau(&f), &mut rng).unwrap(),
            Support::V4(v4.clone())
        );
        assert_eq!(
            supporting_v4(&f, &sigma(&f), &mut rng).unwrap(),
            Support::V4(v4)
        );
        let v3 = Mat::from_rows((0..3).map(e).collect(), 5);
        assert_eq!(
            supporting_v4(&f, &rho(&f), &mut rng).unwrap(),
            Support::Rho { v3 }
        );
    }

    #[test]
    fn tau_support_matches_rank_four_points() {
        let f = fbig();
        let c = tau(&f);
        let mut rng = stream(2, "t");
        let Support::V4(v4) = supporting_v4(&f, &c, &mut rng).unwrap() else {
            panic!()
        };
        for _ in 0..5 {
            let x: Vec<u64> = (0..3).map(|_| f.random(&mut rng)).collect();
            let (r, s) = bivector_rank_support(&f, &c.point(&f, &x));
            assert_eq!(r, 4);
            assert_eq!(s, v4);
        }
    }

    #[test]
    fn shapes_and_off_g() {
        let f = fbig();
        let mut c = tau(&f);
        c.form = matrix::identity(&f, 3);
        assert!(classify_conic(&f, &c).is_err());
        // degenerate conic in a plane of G: x₁x₂ and x₁² on a ρ-plane
        let mut d = rho(&f);
        d.form = Mat::from_rows(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]], 3);
        assert_eq!(classify_conic(&f, &d).unwrap().1, ConicShape::LinePair);
        d.form = Mat::from_rows(vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]], 3);
        assert_eq!(classify_conic(&f, &d).unwrap().1, ConicShape::DoubleLine);
    }

    #[test]
    fn sampled_conic_round_trip() {
        let z = random_instance(
            1,
            FieldSpec::Prime {
                p: INTERPOLATION_PRIME,
            },
            12,
        )
        .unwrap();
        let f = z.fp();
        let c = sample_conic(&z, 3).unwrap();
        let ctx = z.ctx();
        let mut rng = stream(4, "t");
        for p in c.conic.points(&f, 5, &mut rng) {
            assert!(ctx.contains(&p));
        }
        let a = alpha(&z, &c).unwrap();
        assert_eq!(normalize(&f, &a.member), normalize(&f, &c.member));
        assert_eq!(a.corank, 1);
        let partner = involution_partner(&z, &c).unwrap();
        assert!(!partner.conic.same_as(&f, &c.conic));
        assert_eq!(plane_meet(&f, &c, &partner), 2);
        let back = involution_partner(&z, &partner).unwrap();
        assert_eq!(
            matrix::row_space(&f, &back.plane_m),
            matrix::row_space(&f, &c.plane_m)
        );
        assert!(kappa_criterion(&z, &c).unwrap().nondegenerate);
    }

    #[test]
    fn kappa_fails_when_vertex_on_conic() {
        let (inst, c) = conic_through_vertex(31, 1).unwrap();
        let rep = kappa_criterion(&inst, &c).unwrap();
        assert!(!rep.nondegenerate);
    }

    #[test]
    fn special_families_over_f3() {
        let inst = random_instance(1, FieldSpec::Prime { p: 3 }, 2).unwrap();
        let rep = special_family_checks(&inst, 20, 1).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.rho_planes, 20);
        assert_eq!(rep.sigma_planes, 20);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn classification_invariant_under_basis_change(seed in 0u64..10_000, which in 0usize..3) {
            let f = fbig();
            let c = [tau(&f), sigma(&f), rho(&f)][which].clone();
            let mut rng = stream(seed, "basis");
            let g = matrix::random(&f, &mut rng, 3, 3);
            prop_assume!(matrix::rank(&f, &g) == 3);
            // new basis rows G·B; the form in the new basis is G A Gᵀ, rescaled
            let s = f.random_nonzero(&mut rng);
            let moved = Conic {
                plane: matrix::mul(&f, &g, &c.plane),
                form: matrix::scale(&f, &s, &matrix::congruence(&f, &g, &c.form)),
            };
            prop_assert!(moved.same_as(&f, &c));
            prop_assert_eq!(classify_conic(&f, &moved).unwrap(), classify_conic(&f, &c).unwrap());
        }
    }
}
