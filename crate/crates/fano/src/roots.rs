//! Roots of univariate polynomials and binary forms over prime fields.

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::poly::{upoly, BinaryForm};

/// Fields up to this size are searched exhaustively.
const EXHAUSTIVE_LIMIT: u64 = 4096;

/// A projective root `[λ : μ]`, normalized to `[r : 1]` or `[1 : 0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjRoot {
    pub lambda: u64,
    pub mu: u64,
}

impl ProjRoot {
    pub fn finite(r: u64) -> Self {
        ProjRoot { lambda: r, mu: 1 }
    }

    pub fn infinity() -> Self {
        ProjRoot { lambda: 1, mu: 0 }
    }

    pub fn is_infinite(&self) -> bool {
        self.mu == 0
    }
}

/// Distinct roots in the field of a nonzero polynomial, with multiplicities, sorted.
pub fn affine_roots(f: &Fp, u: &[u64]) -> Vec<(u64, usize)> {
    let u = upoly::trim(f, u.to_vec());
    assert!(!u.is_empty(), "roots of the zero polynomial");
    let mut rs = if f.p() <= EXHAUSTIVE_LIMIT {
        (0..f.p()).filter(|x| upoly::eval(f, &u, x) == 0).collect()
    } else {
        split_roots(f, &u)
    };
    rs.sort_unstable();
    rs.into_iter()
        .map(|r| (r, multiplicity(f, &u, r)))
        .collect()
}

fn multiplicity(f: &Fp, u: &[u64], r: u64) -> usize {
    let lin = [f.neg(&r), 1];
    let mut cur = u.to_vec();
    let mut m = 0;
    loop {
        let (q, rem) = upoly::divrem(f, &cur, &lin);
        if !rem.is_empty() {
            return m;
        }
        m += 1;
        cur = q;
    }
}

/// Distinct roots via `gcd(u, t^p - t)` and equal-degree splitting.
fn split_roots(f: &Fp, u: &[u64]) -> Vec<u64> {
    if upoly::degree(f, u) == Some(0) {
        return Vec::new();
    }
    let t = [0, 1];
    let tp = upoly::powmod(f, &t, f.p(), u);
    let g = upoly::gcd(f, u, &upoly::sub(f, &tp, &t));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    let mut stack = vec![g];
    while let Some(g) = stack.pop() {
        match upoly::degree(f, &g) {
            None | Some(0) => {}
            Some(1) => out.push(f.neg(&f.mul(&g[0], &f.inv(&g[1]).unwrap()))),
            Some(_) => loop {
                let a = f.random(&mut rng);
                let h = upoly::powmod(f, &[a, 1], (f.p() - 1) / 2, &g);
                let d = upoly::gcd(f, &g, &upoly::sub(f, &h, &[1]));
                let dd = upoly::degree(f, &d).unwrap_or(0);
                if dd > 0 && Some(dd) < upoly::degree(f, &g) {
                    let (q, _) = upoly::divrem(f, &g, &d);
                    stack.push(d);
                    stack.push(q);
                    break;
                }
            },
        }
    }
    out
}

/// Projective roots of a nonzero binary form, with multiplicities.
pub fn univariate_roots(f: &Fp, form: &BinaryForm<u64>) -> Result<Vec<(ProjRoot, usize)>> {
    if form.is_zero(f) {
        return Err(Error::ZeroForm);
    }
    let u = form.dehomogenize(f);
    let deg = u.len() - 1;
    let mut out: Vec<(ProjRoot, usize)> = affine_roots(f, &u)
        .into_iter()
        .map(|(r, m)| (ProjRoot::finite(r), m))
        .collect();
    if deg < form.degree() {
        out.push((ProjRoot::infinity(), form.degree() - deg));
    }
    Ok(out)
}

/// Whether a binary form has a repeated factor over the algebraic closure.
pub fn has_repeated_factor(f: &Fp, form: &BinaryForm<u64>) -> bool {
    let u = form.dehomogenize(f);
    let d = upoly::degree(f, &u).unwrap_or(0);
    if form.degree() >= d + 2 {
        return true;
    }
    let g = upoly::gcd(f, &u, &upoly::derivative(f, &u));
    upoly::degree(f, &g).unwrap_or(0) > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::INTERPOLATION_PRIME;
    use proptest::prelude::*;

    fn bf(c: &[u64]) -> BinaryForm<u64> {
        BinaryForm { coeffs: c.to_vec() }
    }

    #[test]
    fn lambda_mu() {
        let f = Fp::new(7).unwrap();
        // λμ: coefficient of λ^1 μ^1
        let r = univariate_roots(&f, &bf(&[0, 1, 0])).unwrap();
        assert_eq!(r, vec![(ProjRoot::finite(0), 1), (ProjRoot::infinity(), 1)]);
    }

    #[test]
    fn sum_of_squares_over_f5() {
        let f = Fp::new(5).unwrap();
        let r = univariate_roots(&f, &bf(&[1, 0, 1])).unwrap();
        assert_eq!(r, vec![(ProjRoot::finite(2), 1), (ProjRoot::finite(3), 1)]);
    }

    #[test]
    fn double_root() {
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        // (λ - μ)^2 = μ² - 2λμ + λ²
        let r = univariate_roots(&f, &bf(&[1, f.neg(&2), 1])).unwrap();
        assert_eq!(r, vec![(ProjRoot::finite(1), 2)]);
        assert!(has_repeated_factor(&f, &bf(&[1, f.neg(&2), 1])));
        assert_eq!(univariate_roots(&f, &bf(&[0, 0])), Err(Error::ZeroForm));
    }

    #[test]
    fn large_prime_splitting() {
        let f = Fp::new(INTERPOLATION_PRIME).unwrap();
        let mut u = vec![1u64];
        for r in [3u64, 17, 17, 123456789, 5] {
            u = upoly::mul(&f, &u, &[f.neg(&r), 1]);
        }
        // times an irreducible quadratic t² + 1 (−1 is a non-square mod 2^31 − 1)
        u = upoly::mul(&f, &u, &[1, 0, 1]);
        let r = affine_roots(&f, &u);
        assert_eq!(r, vec![(3, 1), (5, 1), (17, 2), (123456789, 1)]);
    }

    proptest! {
        #[test]
        fn matches_exhaustive_scan(p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 31, 97]),
                                   c in prop::collection::vec(0u64..97, 2..8)) {
            let f = Fp::new(p).unwrap();
            let c: Vec<u64> = c.into_iter().map(|x| x % p).collect();
            let form = bf(&c);
            prop_assume!(!form.is_zero(&f));
            let got: Vec<ProjRoot> = univariate_roots(&f, &form).unwrap().into_iter().map(|(r, _)| r).collect();
            let mut want = Vec::new();
            for x in 0..p {
                if form.eval(&f, &x, &1) == 0 {
                    want.push(ProjRoot::finite(x));
                }
            }
            if form.eval(&f, &1, &0) == 0 {
                want.push(ProjRoot::infinity());
            }
            prop_assert_eq!(got, want);
        }

        #[test]
        fn splitting_agrees_with_exhaustive(c in prop::collection::vec(0u64..4093, 2..7)) {
            let f = Fp::new(4093).unwrap();
            let u = upoly::trim(&f, c);
            prop_assume!(upoly::degree(&f, &u).unwrap_or(0) > 0);
            let mut fast = split_roots(&f, &u);
            fast.sort_unstable();
            let slow: Vec<u64> = (0..4093).filter(|x| upoly::eval(&f, &u, x) == 0).collect();
            prop_assert_eq!(fast, slow);
        }
    }
}
