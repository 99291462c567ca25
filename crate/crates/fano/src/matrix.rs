//! Dense matrices over an exact field.

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, fill: E) -> Self {
        Mat {
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        Mat {
            rows: r,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rows stacked below `other`'s rows.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Mat::from_rows(
            idx.iter().map(|&i| self.row(i).to_vec()).collect(),
            self.cols,
        )
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Mat<F::Elem> {
    Mat::filled(rows, cols, f.zero())
}

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::Elem> {
    Mat::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
}

pub fn from_i64<F: Field>(f: &F, rows: &[Vec<i64>]) -> Mat<F::Elem> {
    let cols = rows.first().map_or(0, |r| r.len());
    Mat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect(),
        cols,
    )
}

pub fn random<F: Field, R: rand::Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> Mat<F::Elem> {
    Mat::from_fn(rows, cols, |_, _| f.random(rng))
}

pub fn random_symmetric<F: Field, R: rand::Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    n: usize,
) -> Mat<F::Elem> {
    let mut m = zeros(f, n, n);
    for i in 0..n {
        for j in i..n {
            let x = f.random(rng);
            m.set(i, j, x.clone());
            m.set(j, i, x);
        }
    }
    m
}

pub fn is_zero<F: Field>(f: &F, m: &Mat<F::Elem>) -> bool {
    m.data.iter().all(|x| f.is_zero(x))
}

pub fn is_symmetric<F: Field>(_f: &F, m: &Mat<F::Elem>) -> bool {
    m.rows == m.cols && (0..m.rows).all(|i| (0..i).all(|j| m.get(i, j) == m.get(j, i)))
}

pub fn mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!(a.cols, b.rows, "matrix product shape");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let v = f.add(out.get(i, j), &f.mul(aik, b.get(k, j)));
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn add<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat::from_fn(a.rows, a.cols, |i, j| f.add(a.get(i, j), b.get(i, j)))
}

pub fn sub<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat::from_fn(a.rows, a.cols, |i, j| f.sub(a.get(i, j), b.get(i, j)))
}

pub fn scale<F: Field>(f: &F, c: &F::Elem, a: &Mat<F::Elem>) -> Mat<F::Elem> {
    a.map(|x| f.mul(c, x))
}

/// `c1*a + c2*b`.
pub fn lincomb<F: Field>(
    f: &F,
    c1: &F::Elem,
    a: &Mat<F::Elem>,
    c2: &F::Elem,
    b: &Mat<F::Elem>,
) -> Mat<F::Elem> {
    Mat::from_fn(a.rows, a.cols, |i, j| {
        f.add(&f.mul(c1, a.get(i, j)), &f.mul(c2, b.get(i, j)))
    })
}

pub fn mat_vec<F: Field>(f: &F, a: &Mat<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows).map(|i| dot(f, a.row(i), v)).collect()
}

pub fn vec_mat<F: Field>(f: &F, v: &[F::Elem], a: &Mat<F::Elem>) -> Vec<F::Elem> {
    assert_eq!(a.rows, v.len());
    (0..a.cols)
        .map(|j| {
            let mut s = f.zero();
            for (i, vi) in v.iter().enumerate() {
                s = f.add(&s, &f.mul(vi, a.get(i, j)));
            }
            s
        })
        .collect()
}

pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    let mut s = f.zero();
    for (x, y) in a.iter().zip(b) {
        if !f.is_zero(x) {
            s = f.add(&s, &f.mul(x, y));
        }
    }
    s
}

/// `xᵀ A y`.
pub fn bilinear<F: Field>(f: &F, a: &Mat<F::Elem>, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
    dot(f, x, &mat_vec(f, a, y))
}

/// `S A Sᵀ` for a basis given by the rows of `S`.
pub fn congruence<F: Field>(f: &F, s: &Mat<F::Elem>, a: &Mat<F::Elem>) -> Mat<F::Elem> {
    mul(f, &mul(f, s, a), &s.transpose())
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref_in_place<F: Field>(f: &F, m: &mut Mat<F::Elem>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
            continue;
        };
        m.swap_rows(r, pr);
        let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
        for j in c..m.cols {
            let v = f.mul(m.get(r, j), &inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r || f.is_zero(m.get(i, c)) {
                continue;
            }
            let factor = m.get(i, c).clone();
            for j in c..m.cols {
                let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rref<F: Field>(f: &F, m: &Mat<F::Elem>) -> (Mat<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let piv = rref_in_place(f, &mut a);
    (a, piv)
}

/// Rank by forward elimination only.
pub fn rank<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(pr) = (r..a.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        a.swap_rows(r, pr);
        let inv = f.inv(a.get(r, c)).expect("nonzero pivot");
        for i in r + 1..a.rows {
            if f.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = f.mul(a.get(i, c), &inv);
            for j in c..a.cols {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        r += 1;
    }
    r
}

/// Basis of `{x : M x = 0}`.
pub fn kernel<F: Field>(f: &F, m: &Mat<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (r, piv) = rref(f, m);
    let mut is_pivot = vec![false; m.cols];
    for &c in &piv {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); m.cols];
        v[free] = f.one();
        for (row, &pc) in piv.iter().enumerate() {
            v[pc] = f.neg(r.get(row, free));
        }
        basis.push(v);
    }
    basis
}

/// Rank together with a kernel basis; `rank + kernel.len() == cols`.
pub fn rank_kernel<F: Field>(f: &F, m: &Mat<F::Elem>) -> (usize, Vec<Vec<F::Elem>>) {
    let k = kernel(f, m);
    (m.cols - k.len(), k)
}

/// Basis of the left kernel `{y : yᵀ M = 0}`.
pub fn left_kernel<F: Field>(f: &F, m: &Mat<F::Elem>) -> Vec<Vec<F::Elem>> {
    kernel(f, &m.transpose())
}

pub fn det<F: Field>(f: &F, m: &Mat<F::Elem>) -> F::Elem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !f.is_zero(a.get(i, c))) else {
            return f.zero();
        };
        if pr != c {
            a.swap_rows(pr, c);
            d = f.neg(&d);
        }
        let piv = a.get(c, c).clone();
        d = f.mul(&d, &piv);
        let inv = f.inv(&piv).expect("nonzero pivot");
        for i in c + 1..n {
            if f.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = f.mul(a.get(i, c), &inv);
            for j in c..n {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(c, j)));
                a.set(i, j, v);
            }
        }
    }
    d
}

/// Nonzero rows of the reduced echelon form: a canonical basis of the row space.
pub fn row_space<F: Field>(f: &F, m: &Mat<F::Elem>) -> Mat<F::Elem> {
    let (r, piv) = rref(f, m);
    r.select_rows(&(0..piv.len()).collect::<Vec<_>>())
}

/// Canonical basis of the span of `rows` (each of length `n`).
pub fn span<F: Field>(f: &F, rows: &[Vec<F::Elem>], n: usize) -> Mat<F::Elem> {
    row_space(f, &Mat::from_rows(rows.to_vec(), n))
}

/// Basis of the intersection of two row spaces.
pub fn intersect<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    // x = u A = w B  <=>  (u, -w) in the left kernel of [A; B]
    let stacked = a.vstack(b);
    let lk = left_kernel(f, &stacked);
    let vecs: Vec<Vec<F::Elem>> = lk.iter().map(|y| vec_mat(f, &y[..a.rows], a)).collect();
    span(f, &vecs, a.cols)
}

/// Whether the row space of `small` is contained in that of `big`.
pub fn contains<F: Field>(f: &F, big: &Mat<F::Elem>, small: &Mat<F::Elem>) -> bool {
    rank(f, &big.vstack(small)) == rank(f, big)
}

/// Solve `x M = v` for a row vector `x`, if possible.
pub fn solve_left<F: Field>(f: &F, m: &Mat<F::Elem>, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    // augment the transpose: Mᵀ xᵀ = vᵀ
    let mt = m.transpose();
    let aug = mt.hstack(&Mat::from_rows(
        v.iter().map(|x| vec![x.clone()]).collect(),
        1,
    ));
    let (r, piv) = rref(f, &aug);
    if piv.last() == Some(&m.rows) {
        return None;
    }
    let mut x = vec![f.zero(); m.rows];
    for (row, &pc) in piv.iter().enumerate() {
        x[pc] = r.get(row, m.rows).clone();
    }
    Some(x)
}

/// Vectors completing the rows of `m` (assumed independent) to a basis, chosen among unit vectors.
pub fn complement<F: Field>(f: &F, m: &Mat<F::Elem>) -> Result<Mat<F::Elem>> {
    if rank(f, m) != m.rows {
        return Err(Error::DependentBasis);
    }
    let n = m.cols;
    let mut cur = m.clone();
    let mut extra = Vec::new();
    for i in 0..n {
        let mut e = vec![f.zero(); n];
        e[i] = f.one();
        let cand = cur.vstack(&Mat::from_rows(vec![e.clone()], n));
        if rank(f, &cand) == cand.rows {
            cur = cand;
            extra.push(e);
        }
    }
    Ok(Mat::from_rows(extra, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals, INTERPOLATION_PRIME};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn fp() -> Fp {
        Fp::new(INTERPOLATION_PRIME).unwrap()
    }

    #[test]
    fn identity_and_zero() {
        let f = fp();
        let (r, k) = rank_kernel(&f, &identity(&f, 3));
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = rank_kernel(&f, &zeros(&f, 2, 5));
        assert_eq!((r, k.len()), (0, 5));
    }

    #[test]
    fn rational_determinant() {
        let q = Rationals;
        let m = from_i64(&q, &[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(det(&q, &m), q.from_i64(18));
    }

    /// Rank by column operations from the last column backwards: a second pivoting order.
    fn rank_reverse<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
        let rev = Mat::from_fn(m.cols(), m.rows(), |i, j| {
            m.get(m.rows() - 1 - j, m.cols() - 1 - i).clone()
        });
        rank(f, &rev)
    }

    fn cofactor_det<F: Field>(f: &F, m: &Mat<F::Elem>) -> F::Elem {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut s = f.zero();
        for j in 0..n {
            let minor = Mat::from_fn(n - 1, n - 1, |a, b| {
                m.get(a + 1, if b < j { b } else { b + 1 }).clone()
            });
            let t = f.mul(m.get(0, j), &cofactor_det(f, &minor));
            s = if j % 2 == 0 {
                f.add(&s, &t)
            } else {
                f.sub(&s, &t)
            };
        }
        s
    }

    proptest! {
        #[test]
        fn rank_of_transpose(seed in 0u64..10_000, r in 1usize..7, c in 1usize..7, p in prop::sample::select(vec![3u64, 5, 7, 101])) {
            let f = Fp::new(p).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = random(&f, &mut rng, r, c);
            prop_assert_eq!(rank(&f, &m), rank(&f, &m.transpose()));
            prop_assert_eq!(rank(&f, &m), rank_reverse(&f, &m));
            let (rk, ker) = rank_kernel(&f, &m);
            prop_assert_eq!(rk + ker.len(), c);
            for k in &ker {
                prop_assert!(mat_vec(&f, &m, k).iter().all(|x| *x == 0));
                // a column built from the kernel relation keeps the rank
                let mk = mat_vec(&f, &m, k);
                let col = Mat::from_rows(mk.iter().map(|x| vec![*x]).collect(), 1);
                prop_assert_eq!(rank(&f, &m.hstack(&col)), rk);
            }
            let u: Vec<u64> = (0..c).map(|_| f.random(&mut rng)).collect();
            let col = Mat::from_rows(mat_vec(&f, &m, &u).into_iter().map(|x| vec![x]).collect(), 1);
            prop_assert_eq!(rank(&f, &m.hstack(&col)), rk);
        }

        #[test]
        fn det_matches_cofactor_expansion(seed in 0u64..10_000, n in 1usize..5) {
            let f = fp();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = random(&f, &mut rng, n, n);
            prop_assert_eq!(det(&f, &m), cofactor_det(&f, &m));
        }

        #[test]
        fn intersection_is_contained_in_both(seed in 0u64..10_000) {
            let f = Fp::new(7).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = random(&f, &mut rng, 3, 5);
            let b = random(&f, &mut rng, 3, 5);
            let i = intersect(&f, &a, &b);
            prop_assert!(contains(&f, &a, &i));
            prop_assert!(contains(&f, &b, &i));
            prop_assert_eq!(i.rows() + rank(&f, &a.vstack(&b)), rank(&f, &a) + rank(&f, &b));
        }
    }

    #[test]
    fn solve_left_round_trip() {
        let f = Fp::new(101).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = random(&f, &mut rng, 3, 6);
        let x = vec![4, 0, 77];
        let v = vec_mat(&f, &x, &m);
        assert_eq!(solve_left(&f, &m, &v).unwrap(), x);
        let c = complement(&f, &m).unwrap();
        assert_eq!(rank(&f, &m.vstack(&c)), 6);
    }
}
