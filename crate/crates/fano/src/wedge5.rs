//! Multilinear algebra of a five-dimensional space V: Plücker coordinates on ∧²V,
//! Pfaffian quadrics, ranks and supports of two-forms.
//!
//! Bivector coordinates follow the order 12,13,14,15,23,24,25,34,35,45 and the top
//! form e1∧e2∧e3∧e4∧e5 is identified with 1.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{self, Mat};

/// Index pairs (0-based) in coordinate order.
pub const PAIRS: [(usize, usize); 10] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
];

/// Coordinate index of `e_i ∧ e_j` for `i < j`.
pub fn pair_index(i: usize, j: usize) -> usize {
    assert!(i < j && j < 5, "pair out of order");
    PAIRS.iter().position(|&p| p == (i, j)).unwrap()
}

/// The increasing complement of `m` in {0..5}.
pub fn complement(m: usize) -> [usize; 4] {
    let mut out = [0; 4];
    let mut k = 0;
    for i in 0..5 {
        if i != m {
            out[k] = i;
            k += 1;
        }
    }
    out
}

pub fn basis_vector<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

/// `u ∧ v` for `u, v ∈ V`.
pub fn wedge_vv<F: Field>(f: &F, u: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
    PAIRS
        .iter()
        .map(|&(i, j)| f.sub(&f.mul(&u[i], &v[j]), &f.mul(&u[j], &v[i])))
        .collect()
}

/// The alternating 5×5 matrix of a bivector.
pub fn alt_matrix<F: Field>(f: &F, w: &[F::Elem]) -> Mat<F::Elem> {
    let mut a = matrix::zeros(f, 5, 5);
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        a.set(i, j, w[k].clone());
        a.set(j, i, f.neg(&w[k]));
    }
    a
}

/// Inverse of [`alt_matrix`].
pub fn from_alt_matrix<F: Field>(_f: &F, a: &Mat<F::Elem>) -> Vec<F::Elem> {
    PAIRS.iter().map(|&(i, j)| a.get(i, j).clone()).collect()
}

/// `x ∧ y ∈ ∧⁴V`, as coefficients of `e_{complement(m)}` for m = 0..5.
pub fn wedge_bb<F: Field>(f: &F, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
    (0..5)
        .map(|m| {
            let [a, b, c, d] = complement(m);
            let t = |p: (usize, usize), q: (usize, usize)| {
                let (i1, i2) = (pair_index(p.0, p.1), pair_index(q.0, q.1));
                f.add(&f.mul(&x[i1], &y[i2]), &f.mul(&x[i2], &y[i1]))
            };
            let s = f.sub(&t((a, b), (c, d)), &t((a, c), (b, d)));
            f.add(&s, &t((a, d), (b, c)))
        })
        .collect()
}

/// Coefficient of the top form in `v ∧ x ∧ y`.
pub fn triple<F: Field>(f: &F, v: &[F::Elem], x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
    let w = wedge_bb(f, x, y);
    let mut s = f.zero();
    for m in 0..5 {
        let t = f.mul(&v[m], &w[m]);
        s = if m % 2 == 0 {
            f.add(&s, &t)
        } else {
            f.sub(&s, &t)
        };
    }
    s
}

/// The 10×10 symmetric matrix `P_v` with `xᵀ P_v x` the top coefficient of `v ∧ x ∧ x`;
/// its polar form is `yᵀ P_v z = v ∧ y ∧ z`.
pub fn pfaffian_quadric<F: Field>(f: &F, v: &[F::Elem]) -> Mat<F::Elem> {
    let mut q = matrix::zeros(f, 10, 10);
    for (m, vm) in v.iter().enumerate().take(5) {
        if f.is_zero(vm) {
            continue;
        }
        let sv = if m % 2 == 0 { vm.clone() } else { f.neg(vm) };
        let [a, b, c, d] = complement(m);
        for (p, r, sign) in [
            ((a, b), (c, d), 1),
            ((a, c), (b, d), -1),
            ((a, d), (b, c), 1),
        ] {
            let (i, j) = (pair_index(p.0, p.1), pair_index(r.0, r.1));
            let val = if sign > 0 { sv.clone() } else { f.neg(&sv) };
            let x = f.add(q.get(i, j), &val);
            q.set(i, j, x.clone());
            q.set(j, i, x);
        }
    }
    q
}

/// The five Plücker quadrics `P_{e_m}`, which cut out G(2,V).
pub fn plucker_quadrics<F: Field>(f: &F) -> Vec<Mat<F::Elem>> {
    (0..5)
        .map(|m| pfaffian_quadric(f, &basis_vector(f, 5, m)))
        .collect()
}

/// Rank of a bivector: the rank of its alternating matrix, 0, 2 or 4.
pub fn bivector_rank<F: Field>(f: &F, w: &[F::Elem]) -> usize {
    matrix::rank(f, &alt_matrix(f, w))
}

/// Rank and support in reduced echelon form: the hyperplane `{v : v∧ω∧ω = 0}` for rank 4,
/// the plane of a decomposable ω for rank 2, nothing for ω = 0.
pub fn bivector_rank_support<F: Field>(f: &F, w: &[F::Elem]) -> (usize, Mat<F::Elem>) {
    let a = alt_matrix(f, w);
    let r = matrix::rank(f, &a);
    let support = match r {
        4 => {
            let ww = wedge_bb(f, w, w);
            // v∧ω∧ω = Σ (-1)^m v_m (ω∧ω)_m
            let func: Vec<F::Elem> = ww
                .iter()
                .enumerate()
                .map(|(m, x)| if m % 2 == 0 { x.clone() } else { f.neg(x) })
                .collect();
            let ker = matrix::kernel(f, &Mat::from_rows(vec![func], 5));
            matrix::span(f, &ker, 5)
        }
        2 => matrix::row_space(f, &a),
        _ => Mat::from_rows(Vec::new(), 5),
    };
    (r, support)
}

/// `B Q Bᵀ` for the rows of `B` spanning a subspace.
pub fn restrict_quadric<F: Field>(
    f: &F,
    q: &Mat<F::Elem>,
    basis: &Mat<F::Elem>,
) -> Result<Mat<F::Elem>> {
    if basis.cols() != q.rows() {
        return Err(Error::Dimension("basis and quadric sizes differ".into()));
    }
    if matrix::rank(f, basis) != basis.rows() {
        return Err(Error::DependentBasis);
    }
    Ok(matrix::congruence(f, basis, q))
}

/// Basis (rows) of `∧²W ⊂ ∧²V` for `W` spanned by the rows of `w`.
pub fn wedge2_basis<F: Field>(f: &F, w: &Mat<F::Elem>) -> Mat<F::Elem> {
    let n = w.rows();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            rows.push(wedge_vv(f, w.row(i), w.row(j)));
        }
    }
    Mat::from_rows(rows, 10)
}

/// Leibniz extension of `φ : V → V` (given by a 5×5 matrix acting on columns) to ∧²V:
/// `v∧v' ↦ φ(v)∧v' + v∧φ(v')`.
pub fn contract<F: Field>(f: &F, phi: &Mat<F::Elem>, w: &[F::Elem]) -> Vec<F::Elem> {
    let a = alt_matrix(f, w);
    let pa = matrix::mul(f, phi, &a);
    let out = matrix::add(f, &pa, &pa.transpose().map(|x| f.neg(x)));
    from_alt_matrix(f, &out)
}

/// `u ⊗ λ` as a 5×5 matrix: `v ↦ λ(v) u`.
pub fn rank_one_map<F: Field>(f: &F, u: &[F::Elem], lambda: &[F::Elem]) -> Mat<F::Elem> {
    Mat::from_fn(5, 5, |i, j| f.mul(&u[i], &lambda[j]))
}

/// The Plücker quadric of `G(2,W)` for a 4-dimensional `W` with basis rows `w`, written on
/// the basis `w_i ∧ w_j` (i<j in the order 12,13,14,23,24,34): `x ↦ x∧x / (w1∧w2∧w3∧w4)`.
pub fn plucker_quadric_4<F: Field>(f: &F) -> Mat<F::Elem> {
    // x∧x = 2(x12 x34 − x13 x24 + x14 x23)
    let mut q = matrix::zeros(f, 6, 6);
    for (i, j, s) in [(0usize, 5usize, 1i64), (1, 4, -1), (2, 3, 1)] {
        q.set(i, j, f.from_i64(s));
        q.set(j, i, f.from_i64(s));
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, INTERPOLATION_PRIME};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::collections::BTreeMap;

    /// Exterior algebra on five generators with basis elements as bitmasks.
    #[derive(Clone, Debug)]
    struct Ext(BTreeMap<u8, i64>);

    impl Ext {
        fn gen(i: usize) -> Ext {
            Ext([(1u8 << i, 1)].into_iter().collect())
        }
        fn from_bivector(w: &[i64]) -> Ext {
            let mut m = BTreeMap::new();
            for (k, &(i, j)) in PAIRS.iter().enumerate() {
                if w[k] != 0 {
                    m.insert((1u8 << i) | (1u8 << j), w[k]);
                }
            }
            Ext(m)
        }
        fn from_vector(v: &[i64]) -> Ext {
            Ext(v
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0)
                .map(|(i, x)| (1u8 << i, *x))
                .collect())
        }
        fn wedge(&self, o: &Ext) -> Ext {
            let mut m = BTreeMap::new();
            for (&a, &x) in &self.0 {
                for (&b, &y) in &o.0 {
                    if a & b != 0 {
                        continue;
                    }
                    // sign: number of pairs (i in a, j in b) with i > j
                    let mut inv = 0;
                    for i in 0..5 {
                        if a >> i & 1 == 1 {
                            inv += (b & ((1u8 << i) - 1)).count_ones();
                        }
                    }
                    let s = if inv % 2 == 0 { 1 } else { -1 };
                    *m.entry(a | b).or_insert(0) += s * x * y;
                }
            }
            m.retain(|_, v| *v != 0);
            Ext(m)
        }
        fn top(&self) -> i64 {
            *self.0.get(&0b11111).unwrap_or(&0)
        }
    }

    fn eval_quadric(m: &Mat<i64>, x: &[i64]) -> i64 {
        (0..10)
            .map(|i| (0..10).map(|j| x[i] * m.get(i, j) * x[j]).sum::<i64>())
            .sum()
    }

    fn int_pfaffian(v: &[i64]) -> Mat<i64> {
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        let vv: Vec<u64> = v.iter().map(|&x| f.reduce(x)).collect();
        pfaffian_quadric(&f, &vv).map(|x| f.lift(*x))
    }

    #[test]
    fn e1_against_e23_plus_e45() {
        let x = [0, 0, 0, 0, 1, 0, 0, 0, 0, 1];
        let m = int_pfaffian(&[1, 0, 0, 0, 0]);
        assert_eq!(eval_quadric(&m, &x), 2);
        let e = Ext::gen(0)
            .wedge(&Ext::from_bivector(&x))
            .wedge(&Ext::from_bivector(&x));
        assert_eq!(e.top(), 2);
        assert!(eval_quadric(&int_pfaffian(&[0; 5]), &x) == 0);
    }

    #[test]
    fn pfaffian_quadrics_have_rank_six() {
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
            assert_eq!(matrix::rank(&f, &pfaffian_quadric(&f, &v)), 6);
        }
    }

    #[test]
    fn supports() {
        let f = Fp::new(101).unwrap();
        let e12 = basis_vector(&f, 10, 0);
        let (r, s) = bivector_rank_support(&f, &e12);
        assert_eq!(r, 2);
        assert_eq!(s.to_rows(), vec![vec![1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0]]);
        let mut w = e12.clone();
        w[pair_index(2, 3)] = 1;
        let (r, s) = bivector_rank_support(&f, &w);
        assert_eq!(r, 4);
        assert_eq!(
            s.to_rows(),
            (0..4).map(|i| basis_vector(&f, 5, i)).collect::<Vec<_>>()
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        for _ in 0..100 {
            let w: Vec<u64> = (0..10).map(|_| f.random(&mut rng)).collect();
            let (r, s) = bivector_rank_support(&f, &w);
            assert_eq!(r, 4);
            assert!(matrix::contains(
                &f,
                &wedge2_basis(&f, &s),
                &Mat::from_rows(vec![w], 10)
            ));
        }
    }

    #[test]
    fn restriction_to_wedge2_of_hyperplane() {
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let w4 = matrix::random(&f, &mut rng, 4, 5);
        let b = wedge2_basis(&f, &w4);
        // v in W restricts to zero
        let v = matrix::vec_mat(&f, &[3, 1, 4, 1], &w4);
        assert!(matrix::is_zero(
            &f,
            &restrict_quadric(&f, &pfaffian_quadric(&f, &v), &b).unwrap()
        ));
        // v outside W restricts to a multiple of the Plücker quadric of G(2,W)
        let v: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
        let r = restrict_quadric(&f, &pfaffian_quadric(&f, &v), &b).unwrap();
        let pq = plucker_quadric_4(&f);
        let c = f.div(r.get(0, 5), pq.get(0, 5)).unwrap();
        assert_ne!(c, 0);
        assert_eq!(r, matrix::scale(&f, &c, &pq));
        let x = Mat::from_rows(vec![b.row(0).to_vec()], 10);
        let one = restrict_quadric(&f, &pfaffian_quadric(&f, &v), &x).unwrap();
        assert_eq!(*one.get(0, 0), 0);
        assert!(matches!(
            restrict_quadric(&f, &pq, &matrix::zeros(&f, 2, 6)),
            Err(Error::DependentBasis)
        ));
    }

    #[test]
    fn contraction_leibniz() {
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        let zero = matrix::zeros(&f, 5, 5);
        let w = wedge_vv(&f, &basis_vector(&f, 5, 0), &basis_vector(&f, 5, 1));
        assert!(contract(&f, &zero, &w).iter().all(|x| *x == 0));
        // φ(e1) = u, φ(e2) = 0
        let u = [0, 0, 5, 7, 1];
        let phi = rank_one_map(&f, &u, &basis_vector(&f, 5, 0));
        assert_eq!(
            contract(&f, &phi, &w),
            wedge_vv(&f, &u, &basis_vector(&f, 5, 1))
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let phi = matrix::random(&f, &mut rng, 5, 5);
        let vs: Vec<Vec<u64>> = (0..4)
            .map(|_| (0..5).map(|_| f.random(&mut rng)).collect())
            .collect();
        let w: Vec<u64> = matrix::add(
            &f,
            &Mat::from_rows(vec![wedge_vv(&f, &vs[0], &vs[1])], 10),
            &Mat::from_rows(vec![wedge_vv(&f, &vs[2], &vs[3])], 10),
        )
        .row(0)
        .to_vec();
        let img = |v: &[u64]| matrix::mat_vec(&f, &phi, v);
        let mut want = vec![0u64; 10];
        for (a, b) in [(0, 1), (2, 3)] {
            for t in [
                wedge_vv(&f, &img(&vs[a]), &vs[b]),
                wedge_vv(&f, &vs[a], &img(&vs[b])),
            ] {
                want = want.iter().zip(&t).map(|(x, y)| f.add(x, y)).collect();
            }
        }
        assert_eq!(contract(&f, &phi, &w), want);
    }

    proptest! {
        #[test]
        fn quadric_matches_exterior_algebra(v in prop::collection::vec(-5i64..6, 5),
                                           x in prop::collection::vec(-5i64..6, 10),
                                           y in prop::collection::vec(-5i64..6, 10)) {
            let m = int_pfaffian(&v);
            let direct = Ext::from_vector(&v).wedge(&Ext::from_bivector(&x)).wedge(&Ext::from_bivector(&x)).top();
            prop_assert_eq!(eval_quadric(&m, &x), direct);
            let polar: i64 = (0..10).map(|i| (0..10).map(|j| x[i] * m.get(i, j) * y[j]).sum::<i64>()).sum();
            let ext = Ext::from_vector(&v).wedge(&Ext::from_bivector(&x)).wedge(&Ext::from_bivector(&y)).top();
            prop_assert_eq!(polar, ext);
        }

        #[test]
        fn linear_in_v(seed in 0u64..100_000) {
            let f = Fp::new(INTERPOLATION_PRIME).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
            let w: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
            let s: Vec<u64> = v.iter().zip(&w).map(|(a, b)| f.add(a, b)).collect();
            prop_assert_eq!(pfaffian_quadric(&f, &s), matrix::add(&f, &pfaffian_quadric(&f, &v), &pfaffian_quadric(&f, &w)));
        }

        #[test]
        fn decomposable_iff_square_vanishes(seed in 0u64..100_000, p in prop::sample::select(vec![3u64, INTERPOLATION_PRIME])) {
            let f = Fp::new(p).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // mix random and decomposable bivectors so both branches occur
            let w: Vec<u64> = if seed % 2 == 0 {
                (0..10).map(|_| f.random(&mut rng)).collect()
            } else {
                let u: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
                let v: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
                wedge_vv(&f, &u, &v)
            };
            let sq_zero = wedge_bb(&f, &w, &w).iter().all(|x| *x == 0);
            prop_assert_eq!(sq_zero, bivector_rank(&f, &w) <= 2);
        }

        #[test]
        fn nested_restriction(seed in 0u64..100_000) {
            let f = Fp::new(INTERPOLATION_PRIME).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let q = matrix::random_symmetric(&f, &mut rng, 10);
            let s = matrix::random(&f, &mut rng, 6, 10);
            let t = matrix::random(&f, &mut rng, 3, 6);
            let direct = restrict_quadric(&f, &q, &matrix::mul(&f, &t, &s)).unwrap();
            let nested = restrict_quadric(&f, &restrict_quadric(&f, &q, &s).unwrap(), &t).unwrap();
            prop_assert_eq!(direct, nested);
        }

        #[test]
        fn pfaffian_vanishes_on_wedge2_iff_v_in_hyperplane(seed in 0u64..100_000) {
            let f = Fp::new(INTERPOLATION_PRIME).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<u64> = (0..10).map(|_| f.random(&mut rng)).collect();
            let (_, v4) = bivector_rank_support(&f, &w);
            let b = wedge2_basis(&f, &v4);
            let inside = matrix::vec_mat(&f, &[f.random(&mut rng), f.random(&mut rng), f.random(&mut rng), f.random(&mut rng)], &v4);
            prop_assert!(matrix::is_zero(&f, &restrict_quadric(&f, &pfaffian_quadric(&f, &inside), &b).unwrap()));
            let outside: Vec<u64> = (0..5).map(|_| f.random(&mut rng)).collect();
            prop_assume!(!matrix::contains(&f, &v4, &Mat::from_rows(vec![outside.clone()], 5)));
            prop_assert!(!matrix::is_zero(&f, &restrict_quadric(&f, &pfaffian_quadric(&f, &outside), &b).unwrap()));
        }
    }
}
