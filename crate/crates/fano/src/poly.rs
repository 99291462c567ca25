//! Univariate helpers, binary forms and sparse multivariate polynomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::matrix::{self, Mat};

// ---------------------------------------------------------------------------
// univariate polynomials, coefficient vectors from low to high degree

pub mod upoly {
    use crate::field::Field;

    pub fn trim<F: Field>(f: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
        while a.last().is_some_and(|c| f.is_zero(c)) {
            a.pop();
        }
        a
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree<F: Field>(f: &F, a: &[F::Elem]) -> Option<usize> {
        a.iter().rposition(|c| !f.is_zero(c))
    }

    pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let n = a.len().max(b.len());
        let z = f.zero();
        trim(
            f,
            (0..n)
                .map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let n = a.len().max(b.len());
        let z = f.zero();
        trim(
            f,
            (0..n)
                .map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        trim(f, out)
    }

    pub fn scale<F: Field>(f: &F, c: &F::Elem, a: &[F::Elem]) -> Vec<F::Elem> {
        trim(f, a.iter().map(|x| f.mul(c, x)).collect())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
        let db = degree(f, b).expect("division by the zero polynomial");
        let lead_inv = f.inv(&b[db]).expect("nonzero");
        let mut r = trim(f, a.to_vec());
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![f.zero(); r.len() - db];
        while let Some(dr) = degree(f, &r) {
            if dr < db {
                break;
            }
            let c = f.mul(&r[dr], &lead_inv);
            let shift = dr - db;
            for (j, bj) in b.iter().enumerate().take(db + 1) {
                r[shift + j] = f.sub(&r[shift + j], &f.mul(&c, bj));
            }
            q[shift] = c;
            r = trim(f, r);
        }
        (trim(f, q), r)
    }

    pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        match degree(f, a) {
            None => Vec::new(),
            Some(d) => {
                let inv = f.inv(&a[d]).expect("nonzero");
                scale(f, &inv, &a[..=d])
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let mut x = trim(f, a.to_vec());
        let mut y = trim(f, b.to_vec());
        while !y.is_empty() {
            let (_, r) = divrem(f, &x, &y);
            x = y;
            y = r;
        }
        monic(f, &x)
    }

    /// `base^e mod m`.
    pub fn powmod<F: Field>(f: &F, base: &[F::Elem], mut e: u64, m: &[F::Elem]) -> Vec<F::Elem> {
        let mut acc = vec![f.one()];
        let mut b = divrem(f, base, m).1;
        while e > 0 {
            if e & 1 == 1 {
                acc = divrem(f, &mul(f, &acc, &b), m).1;
            }
            b = divrem(f, &mul(f, &b, &b), m).1;
            e >>= 1;
        }
        divrem(f, &acc, m).1
    }

    pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
        let mut acc = f.zero();
        for c in a.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        trim(
            f,
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| f.mul(&f.from_i64(i as i64), c))
                .collect(),
        )
    }

    /// Interpolating polynomial through `(xs[i], ys[i])` by Newton divided differences.
    pub fn interpolate<F: Field>(f: &F, xs: &[F::Elem], ys: &[F::Elem]) -> Vec<F::Elem> {
        let n = xs.len();
        let mut dd = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let num = f.sub(&dd[i], &dd[i - 1]);
                let den = f.sub(&xs[i], &xs[i - j]);
                dd[i] = f.div(&num, &den).expect("distinct nodes");
            }
        }
        let mut poly: Vec<F::Elem> = Vec::new();
        for i in (0..n).rev() {
            // poly = poly * (x - xs[i]) + dd[i]
            let lin = vec![f.neg(&xs[i]), f.one()];
            poly = add(f, &mul(f, &poly, &lin), &[dd[i].clone()]);
        }
        poly
    }
}

// ---------------------------------------------------------------------------
// binary forms

/// A binary form of fixed degree `d`; `coeffs[i]` multiplies `λ^i μ^(d-i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm<E> {
    pub coeffs: Vec<E>,
}

impl<E: Clone> BinaryForm<E> {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl<E: Clone + PartialEq> BinaryForm<E> {
    /// Homogenize a univariate `f(t)` (low to high) to degree `d`.
    pub fn from_univariate<F: Field<Elem = E>>(f: &F, u: &[E], d: usize) -> Self {
        let mut coeffs = vec![f.zero(); d + 1];
        for (i, c) in u.iter().enumerate() {
            assert!(i <= d || f.is_zero(c), "degree exceeds form degree");
            if i <= d {
                coeffs[i] = c.clone();
            }
        }
        BinaryForm { coeffs }
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.coeffs.iter().all(|c| f.is_zero(c))
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, lambda: &E, mu: &E) -> E {
        let d = self.degree();
        let mut acc = f.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let term = f.mul(
                c,
                &f.mul(&f.pow(lambda, i as u64), &f.pow(mu, (d - i) as u64)),
            );
            acc = f.add(&acc, &term);
        }
        acc
    }

    /// The dehomogenization `f(t) = δ(t, 1)`, trimmed.
    pub fn dehomogenize<F: Field<Elem = E>>(&self, f: &F) -> Vec<E> {
        upoly::trim(f, self.coeffs.clone())
    }
}

/// Determinant of the affine family `A0 + z A1` as a binary form of degree `n` in `[z : 1]`,
/// found by evaluation at `n + 1` nodes.
pub fn det_along_line<F: Field>(
    f: &F,
    a0: &Mat<F::Elem>,
    a1: &Mat<F::Elem>,
) -> Result<BinaryForm<F::Elem>> {
    let n = a0.rows();
    if a0.cols() != n || a1.rows() != n || a1.cols() != n {
        return Err(Error::Dimension(
            "det_along_line expects square matrices of one size".into(),
        ));
    }
    if f.size().is_some_and(|s| s < n as u64 + 1) {
        return Err(Error::FieldTooSmall(format!(
            "need {} interpolation nodes",
            n + 1
        )));
    }
    let xs: Vec<F::Elem> = (0..=n).map(|i| f.from_i64(i as i64)).collect();
    let ys: Vec<F::Elem> = xs
        .iter()
        .map(|z| matrix::det(f, &matrix::lincomb(f, &f.one(), a0, z, a1)))
        .collect();
    Ok(BinaryForm::from_univariate(
        f,
        &upoly::interpolate(f, &xs, &ys),
        n,
    ))
}

// ---------------------------------------------------------------------------
// sparse multivariate polynomials

/// An exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut e = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            e.push(a.checked_sub(*b)?);
        }
        Some(Mono(e))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` in `n` variables, in decreasing graded-lex order.
pub fn monomials(n: usize, d: usize) -> Vec<Mono> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u16>, out: &mut Vec<Mono>) {
        if prefix.len() == n - 1 {
            prefix.push(d as u16);
            out.push(Mono(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u16);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Mono(Vec::new()));
        }
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly<E> {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, E>,
}

impl<E: Clone + PartialEq> MPoly<E> {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, nvars: usize, c: E) -> Self {
        Self::term(f, nvars, Mono::one(nvars), c)
    }

    pub fn term<F: Field<Elem = E>>(f: &F, nvars: usize, m: Mono, c: E) -> Self {
        let mut p = Self::zero(nvars);
        if !f.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var<F: Field<Elem = E>>(f: &F, nvars: usize, i: usize) -> Self {
        Self::term(f, nvars, Mono::var(nvars, i), f.one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u16> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &E)> {
        self.terms.iter().next_back()
    }

    fn add_term<F: Field<Elem = E>>(&mut self, f: &F, m: Mono, c: E) {
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = f.add(v, &c);
                if f.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(f, m.clone(), c.clone());
        }
        r
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(f, m.clone(), f.neg(c));
        }
        r
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f.neg(c)))
                .collect(),
        }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        if f.is_zero(c) {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), f.mul(c, x)))
                .collect(),
        }
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(f, m1.mul(m2), f.mul(c1, c2));
            }
        }
        r
    }

    pub fn mul_term<F: Field<Elem = E>>(&self, f: &F, m: &Mono, c: &E) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            r.add_term(f, m1.mul(m), f.mul(c1, c));
        }
        r
    }

    pub fn pow<F: Field<Elem = E>>(&self, f: &F, e: u32) -> Self {
        let mut acc = Self::constant(f, self.nvars, f.one());
        for _ in 0..e {
            acc = acc.mul(f, self);
        }
        acc
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, pt: &[E]) -> E {
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in pt.iter().zip(&m.0) {
                if e > 0 {
                    t = f.mul(&t, &f.pow(x, e as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    pub fn derivative<F: Field<Elem = E>>(&self, f: &F, i: usize) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            r.add_term(f, m2, f.mul(c, &f.from_i64(e as i64)));
        }
        r
    }

    /// Replace every variable `x_i` by `images[i]` (all in a common ring of `images[0].nvars` variables).
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, images: &[MPoly<E>]) -> MPoly<E> {
        assert_eq!(images.len(), self.nvars);
        let n = images.first().map_or(0, |p| p.nvars);
        let mut cache: Vec<Vec<MPoly<E>>> = images
            .iter()
            .map(|p| vec![MPoly::constant(f, n, f.one()), p.clone()])
            .collect();
        let mut r = MPoly::zero(n);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(f, n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul(f, &images[i]);
                    cache[i].push(next);
                }
                t = t.mul(f, &cache[i][e as usize]);
            }
            r = r.add(f, &t);
        }
        r
    }

    /// The coefficient of `x_i^k`, as a polynomial not involving `x_i`.
    pub fn coeff_in<F: Field<Elem = E>>(&self, _f: &F, i: usize, k: u16) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == k {
                let mut m2 = m.clone();
                m2.0[i] = 0;
                r.terms.insert(m2, c.clone());
            }
        }
        r
    }

    pub fn coeff(&self, m: &Mono) -> Option<&E> {
        self.terms.get(m)
    }

    /// Embed into a ring with more variables, mapping variable `i` to `map[i]`.
    pub fn relabel(&self, nvars: usize, map: &[usize]) -> Self {
        let mut r = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            r.terms.insert(Mono(e), c.clone());
        }
        r
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Mono::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }
}

// ---------------------------------------------------------------------------
// homogeneous forms

/// A homogeneous form of fixed degree, defined up to scalar when used projectively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiForm<E> {
    pub nvars: usize,
    pub degree: usize,
    pub poly: MPoly<E>,
}

impl<E: Clone + PartialEq> MultiForm<E> {
    pub fn new(degree: usize, poly: MPoly<E>) -> Result<Self> {
        if poly.terms.keys().any(|m| m.degree() as usize != degree) {
            return Err(Error::Malformed(format!(
                "form is not homogeneous of degree {degree}"
            )));
        }
        Ok(MultiForm {
            nvars: poly.nvars,
            degree,
            poly,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, pt: &[E]) -> E {
        self.poly.eval(f, pt)
    }

    pub fn gradient<F: Field<Elem = E>>(&self, f: &F, pt: &[E]) -> Vec<E> {
        (0..self.nvars)
            .map(|i| self.poly.derivative(f, i).eval(f, pt))
            .collect()
    }

    /// Scale so that the graded-lex leading coefficient is 1.
    pub fn normalized<F: Field<Elem = E>>(&self, f: &F) -> Self {
        match self.poly.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = f.inv(c).expect("nonzero");
                MultiForm {
                    nvars: self.nvars,
                    degree: self.degree,
                    poly: self.poly.scale(f, &inv),
                }
            }
        }
    }

    pub fn proportional<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> bool {
        self.nvars == o.nvars && self.degree == o.degree && self.normalized(f) == o.normalized(f)
    }

    /// `s ↦ F(a + s b)` as a univariate polynomial (low to high).
    pub fn restrict_to_line<F: Field<Elem = E>>(&self, f: &F, a: &[E], b: &[E]) -> Vec<E> {
        let xs: Vec<E> = (0..=self.degree).map(|i| f.from_i64(i as i64)).collect();
        let ys: Vec<E> = xs
            .iter()
            .map(|s| {
                let pt: Vec<E> = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| f.add(x, &f.mul(s, y)))
                    .collect();
                self.eval(f, &pt)
            })
            .collect();
        upoly::interpolate(f, &xs, &ys)
    }
}

/// The unique form of the given degree vanishing at all `points`, up to scalar.
///
/// Works over any prime field; callers pick the prime and validate on held-out points.
pub fn fit_form(f: &Fp, points: &[Vec<u64>], degree: usize) -> Result<MultiForm<u64>> {
    let nvars = points.first().map_or(0, |p| p.len());
    let monos = monomials(nvars, degree);
    if points.len() < monos.len() {
        return Err(Error::Underdetermined {
            got: points.len(),
            needed: monos.len(),
        });
    }
    let rows: Vec<Vec<u64>> = points
        .iter()
        .map(|pt| monomial_values(f, pt, degree, &monos))
        .collect();
    let m = Mat::from_rows(rows, monos.len());
    let ker = matrix::kernel(f, &m);
    if ker.len() != 1 {
        return Err(Error::Interpolation(ker.len()));
    }
    let mut poly = MPoly::zero(nvars);
    for (mono, c) in monos.into_iter().zip(&ker[0]) {
        if *c != 0 {
            poly.terms.insert(mono, *c);
        }
    }
    Ok(MultiForm {
        nvars,
        degree,
        poly,
    }
    .normalized(f))
}

fn monomial_values(f: &Fp, pt: &[u64], degree: usize, monos: &[Mono]) -> Vec<u64> {
    let powers: Vec<Vec<u64>> = pt
        .iter()
        .map(|x| {
            let mut v = vec![1u64; degree + 1];
            for e in 1..=degree {
                v[e] = f.mul(&v[e - 1], x);
            }
            v
        })
        .collect();
    monos
        .iter()
        .map(|m| {
            m.0.iter()
                .enumerate()
                .fold(1u64, |acc, (i, &e)| f.mul(&acc, &powers[i][e as usize]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Rationals, INTERPOLATION_PRIME};
    use crate::matrix::from_i64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn big() -> Fp {
        Fp::new(INTERPOLATION_PRIME).unwrap()
    }

    #[test]
    fn det_along_line_small_cases() {
        let q = Rationals;
        let a0 = from_i64(&q, &[vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 1]]);
        let a1 = from_i64(&q, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]]);
        let d = det_along_line(&q, &a0, &a1).unwrap();
        assert_eq!(d.coeffs, vec![q.zero(), q.zero(), q.one(), q.zero()]);
        let s = from_i64(&q, &[vec![1, 2], vec![2, 4]]);
        let zero = from_i64(&q, &[vec![0, 0], vec![0, 0]]);
        assert!(det_along_line(&q, &s, &zero).unwrap().is_zero(&q));
        let f2 = Fp::new(3).unwrap();
        let m = crate::matrix::identity(&f2, 3);
        assert!(matches!(
            det_along_line(&f2, &m, &m),
            Err(Error::FieldTooSmall(_))
        ));
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(6, 6).len(), 462);
        let m = monomials(3, 2);
        assert_eq!(m.first().unwrap().0, vec![2, 0, 0]);
        assert!(m.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn fit_sixth_power() {
        let f = big();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec<u64>> = (0..470)
            .map(|_| {
                let mut v: Vec<u64> = (0..6).map(|_| f.random(&mut rng)).collect();
                v[0] = 0;
                v
            })
            .collect();
        // every sextic divisible by z vanishes on z = 0: 462 - 210 = 252 of them
        assert_eq!(fit_form(&f, &pts, 6), Err(Error::Interpolation(252)));
        let few = &pts[..461];
        assert!(matches!(
            fit_form(&f, few, 6),
            Err(Error::Underdetermined { .. })
        ));
    }

    #[test]
    fn fit_recovers_a_random_quadric_family() {
        // points on a fixed cubic in 3 variables; refitting samples reproduces it
        let f = big();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut cubic = MPoly::zero(3);
        for m in monomials(3, 3) {
            cubic.terms.insert(m, f.random_nonzero(&mut rng));
        }
        let cubic = MultiForm::new(3, cubic).unwrap();
        let pts = sample_hypersurface(&f, &cubic, 14, &mut rng);
        let fitted = fit_form(&f, &pts, 3).unwrap();
        assert!(fitted.proportional(&f, &cubic));
        let again = fit_form(&f, &sample_hypersurface(&f, &fitted, 14, &mut rng), 3).unwrap();
        assert_eq!(again, fitted);
    }

    /// Points of a hypersurface: intersect random lines with it and keep rational roots.
    fn sample_hypersurface(
        f: &Fp,
        form: &MultiForm<u64>,
        n: usize,
        rng: &mut impl Rng,
    ) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        while out.len() < n {
            let a: Vec<u64> = (0..form.nvars).map(|_| f.random(rng)).collect();
            let b: Vec<u64> = (0..form.nvars).map(|_| f.random(rng)).collect();
            let u = form.restrict_to_line(f, &a, &b);
            for (s, _) in crate::roots::affine_roots(f, &u) {
                out.push(
                    a.iter()
                        .zip(&b)
                        .map(|(x, y)| f.add(x, &f.mul(&s, y)))
                        .collect(),
                );
            }
        }
        out.truncate(n);
        out
    }

    #[test]
    fn compose_and_derivative() {
        let q = Rationals;
        let x = MPoly::var(&q, 2, 0);
        let y = MPoly::var(&q, 2, 1);
        let p = x.mul(&q, &x).add(&q, &y.scale(&q, &q.from_i64(3)));
        let c = p.compose(&q, &[y.clone(), x.clone()]);
        assert_eq!(c, y.mul(&q, &y).add(&q, &x.scale(&q, &q.from_i64(3))));
        assert_eq!(p.derivative(&q, 0), x.scale(&q, &q.from_i64(2)));
    }

    /// Cofactor determinant of a matrix with polynomial entries in z, evaluated directly.
    fn cofactor(f: &Fp, m: &[Vec<u64>]) -> u64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut s = 0;
        for j in 0..n {
            let minor: Vec<Vec<u64>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| m[i][c]).collect())
                .collect();
            let t = f.mul(&m[0][j], &cofactor(f, &minor));
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
        fn det_along_line_matches_cofactor(seed in 0u64..100_000, n in 1usize..5) {
            let f = big();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a0 = crate::matrix::random(&f, &mut rng, n, n);
            let a1 = crate::matrix::random(&f, &mut rng, n, n);
            let d = det_along_line(&f, &a0, &a1).unwrap();
            let z = f.random(&mut rng);
            let direct = cofactor(&f, &crate::matrix::lincomb(&f, &1, &a0, &z, &a1).to_rows());
            prop_assert_eq!(d.eval(&f, &z, &1), direct);
            prop_assert_eq!(d.eval(&f, &1, &0), crate::matrix::det(&f, &a1));
        }

        #[test]
        fn interpolation_round_trip(coeffs in prop::collection::vec(0u64..1000, 1..8)) {
            let f = Fp::new(1009).unwrap();
            let xs: Vec<u64> = (0..coeffs.len() as u64).collect();
            let ys: Vec<u64> = xs.iter().map(|x| upoly::eval(&f, &coeffs, x)).collect();
            prop_assert_eq!(upoly::interpolate(&f, &xs, &ys), upoly::trim(&f, coeffs.clone()));
        }
    }
}
