//! Tangent spaces of Hilbert schemes of conics.
//!
//! Smooth conics are handled through a parametrization `P¹ → P(V)`: first-order
//! deformations are tuples of binary forms killed by the differentials of the defining
//! quadrics. Double lines on G(2,5) are handled in the two affine charts around `v₁∧v₃`
//! and `v₁∧v₂`, and the 13×8 matrix governing the τ double lines is recomputed from
//! scratch over ℚ.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conic::{Conic, ConicClass};
use crate::error::{Error, Result};
use crate::field::{rational_to_i64, Field, FieldSpec, Fp, Rationals, INTERPOLATION_PRIME};
use crate::instance::{retry_budget, smoothness_probe, FanoInstance};
use crate::matrix::{self, Mat};
use crate::poly::{MPoly, Mono};
use crate::rng::{stream, substream};
use crate::wedge5::{pair_index, plucker_quadrics, wedge_vv, PAIRS};

// ---------------------------------------------------------------------------
// smooth conics

/// `(s, t) ↦ s²·a + st·b + t²·c` in coordinates on V, with the quadrics cutting out the
/// variety in P(V).
#[derive(Clone, Debug)]
pub struct ParametrizedConic {
    pub coeffs: [Vec<u64>; 3],
    pub quadrics: Vec<Mat<u64>>,
}

impl ParametrizedConic {
    pub fn new(f: &Fp, coeffs: [Vec<u64>; 3], quadrics: Vec<Mat<u64>>) -> Result<Self> {
        let n = coeffs[0].len();
        if coeffs.iter().any(|c| c.len() != n)
            || quadrics.iter().any(|q| q.rows() != n || q.cols() != n)
        {
            return Err(Error::Dimension(
                "conic and quadrics live in different spaces".into(),
            ));
        }
        if matrix::rank(f, &Mat::from_rows(coeffs.to_vec(), n)) != 3 {
            return Err(Error::DependentBasis);
        }
        let pc = ParametrizedConic { coeffs, quadrics };
        if !pc.lies_on(f) {
            return Err(Error::Precondition(
                "the conic is not on the variety".into(),
            ));
        }
        Ok(pc)
    }

    /// The τ-conic `(s·a₀ + t·a₁) ∧ (s·a₂ + t·a₃)` on G(2,5) itself.
    pub fn on_grassmannian(f: &Fp, a: &[Vec<u64>; 4]) -> Result<Self> {
        let ab = |x: &[u64], y: &[u64]| wedge_vv(f, x, y);
        let mid: Vec<u64> = ab(&a[0], &a[3])
            .iter()
            .zip(ab(&a[1], &a[2]))
            .map(|(x, y)| f.add(x, &y))
            .collect();
        Self::new(
            f,
            [ab(&a[0], &a[2]), mid, ab(&a[1], &a[3])],
            plucker_quadrics(f),
        )
    }

    /// A parametrization of a smooth conic on an instance, by projecting from one of its points.
    pub fn from_conic<R: Rng + ?Sized>(
        inst: &FanoInstance,
        c: &Conic,
        rng: &mut R,
    ) -> Result<Self> {
        let ctx = inst.ctx();
        let f = ctx.f;
        let pt = c
            .points(&f, 1, rng)
            .pop()
            .ok_or_else(|| Error::Precondition("no rational point on the conic".into()))?;
        let x0 = matrix::solve_left(&f, &c.plane, &pt).ok_or(Error::DependentBasis)?;
        let a = &c.form;
        for _ in 0..retry_budget() {
            let y1: Vec<u64> = (0..3).map(|_| f.random(rng)).collect();
            let y2: Vec<u64> = (0..3).map(|_| f.random(rng)).collect();
            if matrix::rank(
                &f,
                &Mat::from_rows(vec![x0.clone(), y1.clone(), y2.clone()], 3),
            ) != 3
            {
                continue;
            }
            let b = |u: &[u64], v: &[u64]| matrix::bilinear(&f, a, u, v);
            let (a11, a12, a22, a01, a02) = (
                b(&y1, &y1),
                b(&y1, &y2),
                b(&y2, &y2),
                b(&x0, &y1),
                b(&x0, &y2),
            );
            let comb = |terms: &[(u64, &Vec<u64>)]| -> Vec<u64> {
                (0..3)
                    .map(|i| {
                        terms
                            .iter()
                            .fold(0, |acc, (s, v)| f.add(&acc, &f.mul(s, &v[i])))
                    })
                    .collect()
            };
            let m2 = f.neg(&2);
            let plane_coeffs = [
                comb(&[(a11, &x0), (f.mul(&m2, &a01), &y1)]),
                comb(&[
                    (f.mul(&2, &a12), &x0),
                    (f.mul(&m2, &a01), &y2),
                    (f.mul(&m2, &a02), &y1),
                ]),
                comb(&[(a22, &x0), (f.mul(&m2, &a02), &y2)]),
            ];
            let to_v = |pc: &Vec<u64>| -> Result<Vec<u64>> {
                let amb = matrix::vec_mat(&f, pc, &c.plane);
                matrix::solve_left(&f, &ctx.v, &amb)
                    .ok_or_else(|| Error::Precondition("conic plane not inside V".into()))
            };
            let coeffs = [
                to_v(&plane_coeffs[0])?,
                to_v(&plane_coeffs[1])?,
                to_v(&plane_coeffs[2])?,
            ];
            match Self::new(&f, coeffs, ctx.system()) {
                Err(Error::DependentBasis) => continue,
                r => return r,
            }
        }
        Err(Error::BudgetExhausted(
            "no projection point gave an embedding".into(),
        ))
    }

    pub fn nvars(&self) -> usize {
        self.coeffs[0].len()
    }

    /// Coefficients of the binary quartic `φᵀ·Q·φ`.
    pub fn pullback(&self, f: &Fp, q: &Mat<u64>) -> [u64; 5] {
        let mut out = [0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                out[i + j] = f.add(
                    &out[i + j],
                    &matrix::bilinear(f, q, &self.coeffs[i], &self.coeffs[j]),
                );
            }
        }
        out
    }

    pub fn lies_on(&self, f: &Fp) -> bool {
        self.quadrics
            .iter()
            .all(|q| self.pullback(f, q).iter().all(|c| *c == 0))
    }

    /// Linear conditions on `v = Σ s^{d−j} t^j v_j` (`d = 2 − m`) for `φᵀ·Q·v ≡ 0`.
    fn conditions(&self, f: &Fp, m: usize) -> Mat<u64> {
        let n = self.nvars();
        let d = 2 - m;
        let mut rows = Vec::new();
        for q in &self.quadrics {
            let pulled: Vec<Vec<u64>> = self
                .coeffs
                .iter()
                .map(|c| matrix::vec_mat(f, c, q))
                .collect();
            for e in 0..=2 + d {
                let mut row = vec![0u64; n * (d + 1)];
                for j in 0..=d {
                    if e < j || e - j > 2 {
                        continue;
                    }
                    row[j * n..(j + 1) * n].copy_from_slice(&pulled[e - j]);
                }
                rows.push(row);
            }
        }
        Mat::from_rows(rows, n * (d + 1))
    }

    /// The directions coming from rescaling and reparametrization, twisted by `O(−m)`.
    fn trivial_directions(&self, f: &Fp, m: usize) -> Vec<Vec<u64>> {
        let [a, b, c] = &self.coeffs;
        let zero = vec![0u64; self.nvars()];
        let two = |v: &Vec<u64>| v.iter().map(|x| f.mul(&2, x)).collect::<Vec<u64>>();
        let cat = |parts: &[&Vec<u64>]| {
            parts
                .iter()
                .flat_map(|p| p.iter().copied())
                .collect::<Vec<u64>>()
        };
        let (a2, c2) = (two(a), two(c));
        match m {
            // s·φ_s, t·φ_s, s·φ_t, t·φ_t
            0 => vec![
                cat(&[&a2, b, &zero]),
                cat(&[&zero, &a2, b]),
                cat(&[b, &c2, &zero]),
                cat(&[&zero, b, &c2]),
            ],
            // φ_s, φ_t
            1 => vec![cat(&[&a2, b]), cat(&[b, &c2])],
            _ => Vec::new(),
        }
    }

    /// `h⁰` of the normal bundle twisted by `O_{P¹}(−m)`, for `m ∈ {0, 1, 2}`.
    pub fn normal_h0(&self, f: &Fp, m: usize) -> Result<usize> {
        if m > 2 {
            return Err(Error::Precondition(
                "twists beyond −2 are not needed".into(),
            ));
        }
        let cond = self.conditions(f, m);
        let kernel_dim = cond.cols() - matrix::rank(f, &cond);
        let dirs = self.trivial_directions(f, m);
        for v in &dirs {
            if matrix::mat_vec(f, &cond, v).iter().any(|x| *x != 0) {
                return Err(Error::Precondition(
                    "reparametrization direction outside the tangent space".into(),
                ));
            }
        }
        let trivial = if dirs.is_empty() {
            0
        } else {
            matrix::rank(f, &Mat::from_rows(dirs, cond.cols()))
        };
        Ok(kernel_dim - trivial)
    }
}

pub fn conic_tangent_dim(f: &Fp, c: &ParametrizedConic) -> Result<usize> {
    c.normal_h0(f, 0)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SplittingReport {
    pub h0: [usize; 3],
    /// Degrees of the summands, largest first.
    pub degrees: Vec<i64>,
}

/// Splitting type of the normal bundle of a smooth conic on an instance with `k` linear
/// sections: rank `4 − k`, degree `4 − 2k`.
pub fn splitting_type(f: &Fp, c: &ParametrizedConic, k: usize) -> Result<SplittingReport> {
    if k > 3 {
        return Err(Error::Precondition(format!("k = {k} outside 0..=3")));
    }
    let h0 = [c.normal_h0(f, 0)?, c.normal_h0(f, 1)?, c.normal_h0(f, 2)?];
    let candidates = splittings_with(4 - k, 4 - 2 * k as i64, h0);
    match candidates.as_slice() {
        [one] => Ok(SplittingReport {
            h0,
            degrees: one.clone(),
        }),
        _ => Err(Error::Precondition(format!(
            "h0 triple {h0:?} matches {} splittings",
            candidates.len()
        ))),
    }
}

/// Non-increasing degree sequences of given rank and sum whose twisted `h⁰` match.
pub fn splittings_with(rank: usize, degree: i64, h0: [usize; 3]) -> Vec<Vec<i64>> {
    fn rec(rank: usize, sum: i64, max: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rank == 0 {
            if sum == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for a in (-12..=max).rev() {
            prefix.push(a);
            rec(rank - 1, sum - a, a, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    rec(rank, degree, 12, &mut Vec::new(), &mut all);
    all.retain(|seq| {
        (0..3).all(|m| {
            seq.iter()
                .map(|&a| (a - m as i64 + 1).max(0) as usize)
                .sum::<usize>()
                == h0[m]
        })
    });
    all
}

/// A random τ-conic together with a random instance containing it.
pub fn instance_containing_conic(
    k: usize,
    field: FieldSpec,
    seed: u64,
) -> Result<(FanoInstance, ParametrizedConic)> {
    if !(1..=3).contains(&k) {
        return Err(Error::Precondition(format!("k = {k} outside 1..=3")));
    }
    let FieldSpec::Prime { .. } = field else {
        return Err(Error::Unsupported(
            "conic-containing instances are built over prime fields".into(),
        ));
    };
    let f = field.prime_field();
    for attempt in 0..retry_budget() {
        let mut rng = substream(seed, "conic-instance", attempt as u64);
        let a: [Vec<u64>; 4] =
            std::array::from_fn(|_| (0..5).map(|_| f.random(&mut rng)).collect());
        let Ok(on_g) = ParametrizedConic::on_grassmannian(&f, &a) else {
            continue;
        };
        let phi = &on_g.coeffs;
        // symmetric Q with φᵀQφ ≡ 0: five linear conditions on the upper triangle
        let mut cond = Vec::new();
        for e in 0..5 {
            let mut row = Vec::with_capacity(55);
            for r in 0..10 {
                for s in r..10 {
                    let mut x = 0;
                    for i in 0..3 {
                        if e < i || e - i > 2 {
                            continue;
                        }
                        let j = e - i;
                        let t = f.mul(&phi[i][r], &phi[j][s]);
                        x = f.add(
                            &x,
                            &if r == s {
                                t
                            } else {
                                f.add(&t, &f.mul(&phi[i][s], &phi[j][r]))
                            },
                        );
                    }
                    row.push(x);
                }
            }
            cond.push(row);
        }
        let ker = matrix::kernel(&f, &Mat::from_rows(cond, 55));
        let mut upper = vec![0u64; 55];
        for v in &ker {
            let c = f.random(&mut rng);
            for (u, x) in upper.iter_mut().zip(v) {
                *u = f.add(u, &f.mul(&c, x));
            }
        }
        let mut q = matrix::zeros(&f, 10, 10);
        let mut idx = 0;
        for r in 0..10 {
            for s in r..10 {
                q.set(r, s, upper[idx]);
                q.set(s, r, upper[idx]);
                idx += 1;
            }
        }
        let mut rows = phi.to_vec();
        while rows.len() < 10 - k {
            rows.push((0..10).map(|_| f.random(&mut rng)).collect());
        }
        let v = Mat::from_rows(rows, 10);
        let inst = FanoInstance::from_parts(field, k, &v, &q, seed);
        if inst.validate().is_err() {
            continue;
        }
        let probe = smoothness_probe(&inst, 6, seed ^ attempt as u64);
        if probe.failures > 0 || probe.points == 0 {
            continue;
        }
        let ctx = inst.ctx();
        let to_v = |w: &Vec<u64>| matrix::solve_left(&f, &ctx.v, w).expect("φ spans part of V");
        let coeffs = [to_v(&phi[0]), to_v(&phi[1]), to_v(&phi[2])];
        let pc = ParametrizedConic::new(&f, coeffs, ctx.system())?;
        return Ok((inst, pc));
    }
    Err(Error::BudgetExhausted(format!(
        "no instance with k = {k} through a conic"
    )))
}

// ---------------------------------------------------------------------------
// double lines: charts and ideals over ℚ

pub type QPoly = MPoly<BigRational>;

const Q: Rationals = Rationals;

fn qi(v: i64) -> BigRational {
    Q.from_i64(v)
}

fn qvar(nvars: usize, i: usize) -> QPoly {
    MPoly::var(&Q, nvars, i)
}

fn qconst(nvars: usize, v: i64) -> QPoly {
    MPoly::constant(&Q, nvars, qi(v))
}

/// Chart variables. Chart A (around `v₁∧v₃`): rows `v₁ + z₂v₂ + z₄v₄ + z₅v₅` and
/// `v₃ + t₂v₂ + t₄v₄ + t₅v₅`. Chart B (around `v₁∧v₂`): rows `v₁ + x₃v₃ + x₄v₄ + x₅v₅` and
/// `v₂ + y₃v₃ + y₄v₄ + y₅v₅`. Both use the first six variables of their ring.
pub const CHART_A: [&str; 6] = ["z2", "z4", "z5", "t2", "t4", "t5"];
pub const CHART_B: [&str; 6] = ["x3", "x4", "x5", "y3", "y4", "y5"];

const Z2: usize = 0;
const Z4: usize = 1;
const Z5: usize = 2;
const T2: usize = 3;
const T4: usize = 4;
const T5: usize = 5;
// chart B uses the same slots
const X3: usize = 0;
const X4: usize = 1;
const X5: usize = 2;
const Y3: usize = 3;
const Y4: usize = 4;
const Y5: usize = 5;

/// Plücker coordinates of the chart point, in coordinate order.
pub fn chart_plucker(nvars: usize, chart_b: bool) -> Vec<QPoly> {
    let v = |i| qvar(nvars, i);
    let c = |x| qconst(nvars, x);
    let (r1, r2): (Vec<QPoly>, Vec<QPoly>) = if chart_b {
        (
            vec![c(1), c(0), v(X3), v(X4), v(X5)],
            vec![c(0), c(1), v(Y3), v(Y4), v(Y5)],
        )
    } else {
        (
            vec![c(1), v(Z2), c(0), v(Z4), v(Z5)],
            vec![c(0), v(T2), c(1), v(T4), v(T5)],
        )
    };
    PAIRS
        .iter()
        .map(|&(i, j)| r1[i].mul(&Q, &r2[j]).sub(&Q, &r1[j].mul(&Q, &r2[i])))
        .collect()
}

/// A generator of a double-line ideal in a chart.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `sign·(x_var − expr)`, with `expr` free of eliminated variables.
    Linear { var: usize, expr: QPoly, sign: i64 },
    /// `x_var²` for the nilpotent coordinate.
    Square { var: usize },
}

/// `I_ℓ` in one chart. Modulo the ideal every polynomial becomes `a(u) + ε·b(u)` with `u`
/// the coordinate along the line and `ε² = 0`.
#[derive(Clone, Debug)]
pub struct ChartIdeal {
    pub nvars: usize,
    pub gens: Vec<Generator>,
    pub param: usize,
    pub eps: usize,
}

impl ChartIdeal {
    /// Images `x_var ↦ x_var + expr`: afterwards the slot of `x_var` holds `x_var − expr`.
    fn shift(&self) -> Vec<QPoly> {
        let mut images: Vec<QPoly> = (0..self.nvars).map(|i| qvar(self.nvars, i)).collect();
        for g in &self.gens {
            if let Generator::Linear { var, expr, .. } = g {
                images[*var] = images[*var].add(&Q, expr);
            }
        }
        images
    }

    fn is_linear_var(&self, i: usize) -> bool {
        self.gens
            .iter()
            .any(|g| matches!(g, Generator::Linear { var, .. } if *var == i))
    }

    /// Class in `O_ℓ` of a polynomial already written in shifted variables.
    fn truncate(&self, p: &QPoly) -> QPoly {
        let mut out = QPoly::zero(self.nvars);
        for (m, c) in &p.terms {
            if m.0[self.eps] >= 2 || (0..self.nvars).any(|i| m.0[i] > 0 && self.is_linear_var(i)) {
                continue;
            }
            out.terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// Class in `O_ℓ` of an arbitrary polynomial.
    pub fn class_of(&self, p: &QPoly) -> QPoly {
        self.truncate(&p.compose(&Q, &self.shift()))
    }

    /// Writes `n = Σ cᵢ·gᵢ` by division with the generators taken in order and returns the
    /// classes of the `cᵢ` in `O_ℓ`; a nonzero remainder means `n ∉ I_ℓ`.
    pub fn divide(&self, n: &QPoly) -> Result<Vec<QPoly>> {
        let shifted = n.compose(&Q, &self.shift());
        let mut quotients: Vec<QPoly> = vec![QPoly::zero(self.nvars); self.gens.len()];
        let mut remainder = QPoly::zero(self.nvars);
        for (m, c) in &shifted.terms {
            let hit = self.gens.iter().enumerate().find_map(|(i, g)| {
                let (var, power, sign) = match g {
                    Generator::Linear { var, sign, .. } => (*var, 1, *sign),
                    Generator::Square { var } => (*var, 2, 1),
                };
                (m.0[var] >= power).then(|| {
                    let mut q = m.clone();
                    q.0[var] -= power;
                    (i, q, sign)
                })
            });
            match hit {
                Some((i, q, sign)) => {
                    let term = QPoly::term(&Q, self.nvars, q, Q.mul(c, &qi(sign)));
                    quotients[i] = quotients[i].add(&Q, &term);
                }
                None => {
                    remainder =
                        remainder.add(&Q, &QPoly::term(&Q, self.nvars, m.clone(), c.clone()))
                }
            }
        }
        if !remainder.is_zero() {
            return Err(Error::Precondition(format!(
                "{} terms left after division by I_ℓ",
                remainder.terms.len()
            )));
        }
        Ok(quotients.iter().map(|c| self.truncate(c)).collect())
    }

    /// `φ(n) = Σ cᵢ·ψ(gᵢ)` in `O_ℓ`.
    pub fn apply(&self, n: &QPoly, images: &[QPoly]) -> Result<QPoly> {
        let cs = self.divide(n)?;
        let mut out = QPoly::zero(self.nvars);
        for (c, img) in cs.iter().zip(images) {
            out = out.add(&Q, &c.mul(&Q, img));
        }
        Ok(self.truncate(&out))
    }

    /// The generators as polynomials.
    pub fn generator_polys(&self) -> Vec<QPoly> {
        self.gens
            .iter()
            .map(|g| match g {
                Generator::Linear { var, expr, sign } => {
                    qvar(self.nvars, *var).sub(&Q, expr).scale(&Q, &qi(*sign))
                }
                Generator::Square { var } => qvar(self.nvars, *var).pow(&Q, 2),
            })
            .collect()
    }
}

/// One term `coef·ψ_psi·u^power·ε^{eps}` of a printed general image.
#[derive(Clone, Copy, Debug)]
pub struct ImageTerm {
    pub psi: usize,
    pub coef: i64,
    pub power: u16,
    pub eps: bool,
}

const fn it(psi: usize, coef: i64, power: u16, eps: bool) -> ImageTerm {
    ImageTerm {
        psi,
        coef,
        power,
        eps,
    }
}

/// The standard double line of a type, with its ideal in both charts and the tabulated
/// 13-parameter general morphism on chart A (generators in tabulated order).
#[derive(Clone, Debug)]
pub struct DoubleLineChart {
    pub kind: ConicClass,
    pub plane: [[i64; 10]; 3],
    /// Quadric on the plane cutting out the double line, as a coordinate index squared;
    /// `None` when the plane is not contained in G.
    pub square_of: Option<usize>,
    pub chart_a: ChartIdeal,
    pub chart_b: ChartIdeal,
    pub names_a: Vec<&'static str>,
    pub names_b: Vec<&'static str>,
    pub tabulated: Vec<Vec<ImageTerm>>,
}

fn lin(n: usize, var: usize) -> Generator {
    Generator::Linear {
        var,
        expr: QPoly::zero(n),
        sign: 1,
    }
}

fn unit_bivectors(pairs: &[(usize, usize)]) -> [[i64; 10]; 3] {
    let mut out = [[0i64; 10]; 3];
    for (row, &(i, j)) in out.iter_mut().zip(pairs) {
        row[pair_index(i, j)] = 1;
    }
    out
}

pub fn double_line_chart(kind: ConicClass, nvars: usize) -> DoubleLineChart {
    let n = nvars;
    match kind {
        ConicClass::Sigma => DoubleLineChart {
            kind,
            plane: unit_bivectors(&[(0, 1), (0, 2), (0, 3)]),
            square_of: Some(pair_index(0, 3)),
            chart_a: ChartIdeal {
                nvars: n,
                gens: vec![
                    Generator::Square { var: T4 },
                    lin(n, T5),
                    lin(n, Z2),
                    lin(n, Z4),
                    lin(n, Z5),
                ],
                param: T2,
                eps: T4,
            },
            chart_b: ChartIdeal {
                nvars: n,
                gens: vec![
                    Generator::Square { var: Y4 },
                    lin(n, Y5),
                    lin(n, X3),
                    lin(n, X4),
                    lin(n, X5),
                ],
                param: Y3,
                eps: Y4,
            },
            names_a: vec!["t4^2", "t5", "z2", "z4", "z5"],
            names_b: vec!["y4^2", "y5", "x3", "x4", "x5"],
            tabulated: vec![
                vec![
                    it(1, 1, 0, false),
                    it(2, 1, 1, false),
                    it(3, 1, 2, false),
                    it(4, 1, 0, true),
                    it(5, 1, 1, true),
                ],
                vec![it(6, 1, 0, false), it(7, 1, 1, false), it(8, 1, 0, true)],
                vec![it(9, 1, 0, false), it(10, 1, 1, false), it(11, 1, 0, true)],
                vec![it(12, 1, 0, false), it(10, 1, 0, true)],
                vec![it(13, 1, 0, false), it(10, 1, 0, true)],
            ],
        },
        ConicClass::Rho => DoubleLineChart {
            kind,
            plane: unit_bivectors(&[(0, 1), (0, 2), (1, 2)]),
            square_of: Some(pair_index(1, 2)),
            chart_a: ChartIdeal {
                nvars: n,
                gens: vec![
                    Generator::Square { var: Z2 },
                    lin(n, T4),
                    lin(n, T5),
                    lin(n, Z4),
                    lin(n, Z5),
                ],
                param: T2,
                eps: Z2,
            },
            chart_b: ChartIdeal {
                nvars: n,
                gens: vec![
                    Generator::Square { var: X3 },
                    lin(n, Y4),
                    lin(n, Y5),
                    lin(n, X4),
                    lin(n, X5),
                ],
                param: Y3,
                eps: X3,
            },
            names_a: vec!["z2^2", "t4", "t5", "z4", "z5"],
            names_b: vec!["x3^2", "y4", "y5", "x4", "x5"],
            // the nilpotent coordinate along this line is z2
            tabulated: vec![
                vec![
                    it(1, 1, 0, false),
                    it(2, 1, 1, false),
                    it(3, 1, 2, false),
                    it(4, 1, 0, true),
                    it(5, 1, 1, true),
                ],
                vec![it(6, 1, 0, false), it(7, 1, 1, false), it(8, 1, 0, true)],
                vec![it(9, 1, 0, false), it(10, 1, 1, false), it(11, 1, 0, true)],
                vec![it(12, 1, 0, false), it(7, 1, 0, true)],
                vec![it(13, 1, 0, false), it(10, 1, 0, true)],
            ],
        },
        ConicClass::Tau => DoubleLineChart {
            kind,
            plane: {
                let mut p = unit_bivectors(&[(0, 1), (0, 2), (1, 2)]);
                p[2][pair_index(0, 3)] = 1;
                p
            },
            square_of: None,
            chart_a: ChartIdeal {
                nvars: n,
                gens: vec![
                    Generator::Square { var: T4 },
                    lin(n, T5),
                    Generator::Linear {
                        var: Z2,
                        expr: qvar(n, T4),
                        sign: -1,
                    },
                    lin(n, Z5),
                    lin(n, Z4),
                ],
                param: T2,
                eps: T4,
            },
            chart_b: ChartIdeal {
                nvars: n,
                gens: vec![
                    Generator::Square { var: Y4 },
                    lin(n, Y5),
                    Generator::Linear {
                        var: X3,
                        expr: qvar(n, Y4).neg(&Q),
                        sign: 1,
                    },
                    lin(n, X5),
                    lin(n, X4),
                ],
                param: Y3,
                eps: Y4,
            },
            names_a: vec!["t4^2", "t5", "t4-z2", "z5", "z4"],
            names_b: vec!["y4^2", "y5", "x3+y4", "x5", "x4"],
            tabulated: vec![
                vec![
                    it(1, 1, 0, false),
                    it(2, 1, 1, false),
                    it(3, 1, 2, false),
                    it(4, 1, 0, true),
                    it(5, 1, 1, true),
                ],
                vec![it(6, 1, 0, false), it(7, 1, 1, false), it(8, 1, 0, true)],
                vec![it(9, 1, 0, false), it(10, 1, 1, false), it(11, 1, 0, true)],
                vec![it(12, 1, 0, false), it(7, 1, 0, true)],
                vec![
                    it(13, 1, 0, false),
                    it(3, 1, 1, false),
                    it(5, 1, 0, true),
                    it(10, -1, 0, true),
                ],
            ],
        },
    }
}

/// Coordinates of one chart as fractions `numerator / param^e` in the other; the change of
/// coordinates is an involution, so one formula serves both directions.
pub fn transition(nvars: usize) -> Vec<(QPoly, u32)> {
    let v = |i| qvar(nvars, i);
    let one = qconst(nvars, 1);
    // (p, q, r, s, e, f) ↦ (−p, s·q − p·e, s·r − p·f, 1, e, f) / s
    let (p, q, r, s, e, ff) = (v(0), v(1), v(2), v(3), v(4), v(5));
    vec![
        (p.neg(&Q), 1),
        (s.mul(&Q, &q).sub(&Q, &p.mul(&Q, &e)), 1),
        (s.mul(&Q, &r).sub(&Q, &p.mul(&Q, &ff)), 1),
        (one, 1),
        (e, 1),
        (ff, 1),
    ]
}

/// `g(images)` as `numerator / param^e`.
fn pull_back(g: &QPoly, images: &[(QPoly, u32)], param: usize) -> (QPoly, u32) {
    let n = images[0].0.nvars;
    let e_max = g
        .terms
        .keys()
        .map(|m| {
            m.0.iter()
                .zip(images)
                .map(|(a, im)| *a as u32 * im.1)
                .sum::<u32>()
        })
        .max()
        .unwrap_or(0);
    let mut out = QPoly::zero(n);
    for (m, c) in &g.terms {
        let mut t = qconst(n, 1).scale(&Q, c);
        let mut e = 0;
        for (a, im) in m.0.iter().zip(images) {
            if *a > 0 {
                t = t.mul(&Q, &im.0.pow(&Q, *a as u32));
                e += *a as u32 * im.1;
            }
        }
        t = t.mul(&Q, &qvar(n, param).pow(&Q, e_max - e));
        out = out.add(&Q, &t);
    }
    (out, e_max)
}

#[derive(Clone, Debug, Serialize)]
pub struct HomReport {
    pub kind: ConicClass,
    pub degree_bound: u16,
    pub swapped: bool,
    pub dim: usize,
    /// Solution dimension with the degree bound raised by one.
    pub dim_next_bound: usize,
    /// General image of each generator of the primary chart, in the solution parameters.
    pub images: Vec<(String, String)>,
    /// Tabulated parameters whose images fail the gluing conditions (chart A only).
    pub tabulated_failures: Vec<usize>,
    pub tabulated_rank: usize,
}

impl HomReport {
    pub fn tabulated_matches(&self) -> bool {
        self.tabulated_failures.is_empty() && self.tabulated_rank == self.dim
    }
}

struct Gluing {
    /// Conditions (rows) on the unknowns (columns), indexed by (generator, power, ε).
    conditions: Mat<BigRational>,
    bound: u16,
}

impl Gluing {
    fn col(&self, gen: usize, power: u16, eps: bool) -> usize {
        (gen * 2 + eps as usize) * (self.bound as usize + 1) + power as usize
    }
}

fn gluing_conditions(
    primary: &ChartIdeal,
    secondary: &ChartIdeal,
    images: &[(QPoly, u32)],
    bound: u16,
) -> Result<Gluing> {
    let n = primary.nvars;
    // the secondary line coordinate is 1/u and its nilpotent coordinate ±ε/u
    let (pn, pe) = &images[secondary.param];
    let (en, ee) = &images[secondary.eps];
    let eps_class = primary.class_of(en);
    let eps_ok = eps_class == qvar(n, primary.eps) || eps_class == qvar(n, primary.eps).neg(&Q);
    if *pn != qconst(n, 1) || *pe != 1 || *ee != 1 || !eps_ok {
        return Err(Error::Precondition("charts are not glued along 1/u".into()));
    }
    let ngens = primary.gens.len();
    let ncols = ngens * 2 * (bound as usize + 1);
    let mut rows: BTreeMap<(usize, bool, u16), Vec<BigRational>> = BTreeMap::new();
    for (j, g) in secondary.generator_polys().iter().enumerate() {
        let (num, e) = pull_back(g, images, primary.param);
        let cs = primary.divide(&num)?;
        for (i, c) in cs.iter().enumerate() {
            for eps in [false, true] {
                for power in 0..=bound {
                    let mut mono = Mono::one(n);
                    mono.0[primary.param] = power;
                    mono.0[primary.eps] = eps as u16;
                    let contrib = primary.truncate(&c.mul_term(&Q, &mono, &qi(1)));
                    let col = (i * 2 + eps as usize) * (bound as usize + 1) + power as usize;
                    for (m, v) in &contrib.terms {
                        let (b, has_eps) = (m.0[primary.param] as u32, m.0[primary.eps] == 1);
                        let irregular = if has_eps { b >= e } else { b > e };
                        if irregular {
                            let row = rows
                                .entry((j, has_eps, b as u16))
                                .or_insert_with(|| vec![qi(0); ncols]);
                            row[col] = Q.add(&row[col], v);
                        }
                    }
                }
            }
        }
    }
    let conditions = Mat::from_rows(rows.into_values().collect(), ncols);
    Ok(Gluing { conditions, bound })
}

fn solution_dim(g: &Gluing) -> usize {
    g.conditions.cols()
        - if g.conditions.rows() == 0 {
            0
        } else {
            matrix::rank(&Q, &g.conditions)
        }
}

/// `dim Hom(I_ℓ, O_ℓ)` for the standard double line of a type, by gluing the two charts.
/// Unknown images have degree at most `bound` in the line coordinate.
pub fn doubleline_hom_dim(kind: ConicClass, bound: u16, swapped: bool) -> Result<HomReport> {
    let chart = double_line_chart(kind, 6);
    let (primary, secondary, names) = if swapped {
        (&chart.chart_b, &chart.chart_a, &chart.names_b)
    } else {
        (&chart.chart_a, &chart.chart_b, &chart.names_a)
    };
    let images = transition(6);
    let glue = gluing_conditions(primary, secondary, &images, bound)?;
    let dim = solution_dim(&glue);
    let dim_next_bound = solution_dim(&gluing_conditions(primary, secondary, &images, bound + 1)?);

    let kernel = if glue.conditions.rows() == 0 {
        (0..glue.conditions.cols())
            .map(|i| {
                (0..glue.conditions.cols())
                    .map(|j| qi((i == j) as i64))
                    .collect()
            })
            .collect()
    } else {
        matrix::kernel(&Q, &glue.conditions)
    };
    let var_names = if swapped { CHART_B } else { CHART_A };
    let mut general = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let mut parts = Vec::new();
        for eps in [false, true] {
            for power in 0..=bound {
                let col = glue.col(i, power, eps);
                let coef: Vec<String> = kernel
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !Q.is_zero(&v[col]))
                    .map(|(s, v)| format!("{}c{}", coef_prefix(&v[col]), s + 1))
                    .collect();
                if coef.is_empty() {
                    continue;
                }
                let mut mono = String::new();
                if power > 0 {
                    mono.push_str(var_names[primary.param]);
                    if power > 1 {
                        mono.push_str(&format!("^{power}"));
                    }
                }
                if eps {
                    if !mono.is_empty() {
                        mono.push('*');
                    }
                    mono.push_str(var_names[primary.eps]);
                }
                let c = if coef.len() == 1 {
                    coef[0].clone()
                } else {
                    format!("({})", coef.join(" + "))
                };
                parts.push(if mono.is_empty() {
                    c
                } else {
                    format!("{c}*{mono}")
                });
            }
        }
        general.push((
            name.to_string(),
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            },
        ));
    }

    let (mut tabulated_failures, mut tabulated_rank) = (Vec::new(), 0);
    if !swapped {
        let mut vecs = Vec::new();
        for psi in 1..=13 {
            let mut v = vec![qi(0); glue.conditions.cols()];
            for (i, terms) in chart.tabulated.iter().enumerate() {
                for t in terms.iter().filter(|t| t.psi == psi) {
                    let col = glue.col(i, t.power, t.eps);
                    v[col] = Q.add(&v[col], &qi(t.coef));
                }
            }
            if matrix::mat_vec(&Q, &glue.conditions, &v)
                .iter()
                .any(|x| !Q.is_zero(x))
            {
                tabulated_failures.push(psi);
            }
            vecs.push(v);
        }
        tabulated_rank = matrix::rank(&Q, &Mat::from_rows(vecs, glue.conditions.cols()));
    }
    Ok(HomReport {
        kind,
        degree_bound: bound,
        swapped,
        dim,
        dim_next_bound,
        images: general,
        tabulated_failures,
        tabulated_rank,
    })
}

fn coef_prefix(c: &BigRational) -> String {
    match rational_to_i64(c) {
        Some(1) => String::new(),
        Some(-1) => "-".into(),
        _ => format!("{c}*"),
    }
}

/// Checks that the chart ideals contain the pulled-back equations of the double line:
/// the linear forms vanishing on its plane and, for planes inside G, the square.
pub fn check_chart_ideals(chart: &DoubleLineChart) -> Result<()> {
    let plane = Mat::from_rows(
        chart
            .plane
            .iter()
            .map(|r| r.iter().map(|&x| qi(x)).collect())
            .collect(),
        10,
    );
    let forms = matrix::kernel(&Q, &plane);
    for (ideal, b) in [(&chart.chart_a, false), (&chart.chart_b, true)] {
        let p = chart_plucker(ideal.nvars, b);
        let mut eqs: Vec<QPoly> = forms
            .iter()
            .map(|l| {
                l.iter()
                    .zip(&p)
                    .fold(QPoly::zero(ideal.nvars), |acc, (c, x)| {
                        acc.add(&Q, &x.scale(&Q, c))
                    })
            })
            .collect();
        if let Some(i) = chart.square_of {
            eqs.push(p[i].pow(&Q, 2));
        }
        for e in &eqs {
            ideal.divide(e)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// the τ double line and the 13×8 matrix

/// Variable layout of the symbolic ring: six chart variables, `h_ij`, `q_{ij,kl}` and
/// `ψ₁…ψ₁₃`.
pub mod sym {
    pub const H0: usize = 6;
    pub const Q0: usize = 16;
    pub const PSI0: usize = 71;
    pub const NVARS: usize = 84;

    pub fn h(m: usize) -> usize {
        H0 + m
    }

    pub fn psi(r: usize) -> usize {
        PSI0 + r - 1
    }
}

/// Index of `q_{m,n}` for coordinate indices in either order.
fn q_index(m: usize, n: usize) -> usize {
    let (a, b) = if m <= n { (m, n) } else { (n, m) };
    sym::Q0 + 10 * a - a * a.saturating_sub(1) / 2 + (b - a)
}

/// Names for printing polynomials of the symbolic ring.
pub fn sym_name(i: usize) -> String {
    let pair = |m: usize| {
        let (a, b) = PAIRS[m];
        format!("{}{}", a + 1, b + 1)
    };
    if i < 6 {
        CHART_A[i].to_string()
    } else if i < sym::Q0 {
        format!("h{}", pair(i - sym::H0))
    } else if i < sym::PSI0 {
        let k = i - sym::Q0;
        let (mut a, mut rest) = (0, k);
        while rest >= 10 - a {
            rest -= 10 - a;
            a += 1;
        }
        format!("q{},{}", pair(a), pair(a + rest))
    } else {
        format!("psi{}", i - sym::PSI0 + 1)
    }
}

pub fn format_poly(p: &QPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (m, c) in &p.terms {
        let names: Vec<String> =
            m.0.iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| {
                    if *e == 1 {
                        sym_name(i)
                    } else {
                        format!("{}^{e}", sym_name(i))
                    }
                })
                .collect();
        let neg = c < &qi(0);
        let abs = if neg { -c.clone() } else { c.clone() };
        out.push_str(if neg { " - " } else { " + " });
        let body = names.join("*");
        if abs == qi(1) && !body.is_empty() {
            out.push_str(&body);
        } else if body.is_empty() {
            out.push_str(&abs.to_string());
        } else {
            out.push_str(&format!("{abs}*{body}"));
        }
    }
    let s = out.trim_start_matches(" + ").to_string();
    if let Some(rest) = s.strip_prefix(" - ") {
        format!("-{rest}")
    } else {
        s
    }
}

fn sv(i: usize) -> QPoly {
    qvar(sym::NVARS, i)
}

/// `h_ij` after the containment relations `h₁₂ = h₁₃ = h₁₄ + h₂₃ = 0`.
fn h_sym(m: usize) -> QPoly {
    let (h12, h13, h14, h23) = (
        pair_index(0, 1),
        pair_index(0, 2),
        pair_index(0, 3),
        pair_index(1, 2),
    );
    if m == h12 || m == h13 {
        QPoly::zero(sym::NVARS)
    } else if m == h23 {
        sv(sym::h(h14)).neg(&Q)
    } else {
        sv(sym::h(m))
    }
}

/// Plücker quadrics used to normalize q, each as `(pivot, terms)`: adding a multiple of
/// the quadric changes nothing on G and lets the pivot coefficient be set to zero.
/// A q-coefficient set to zero and the Plücker quadric used to clear it.
type Normalization = ((usize, usize), Vec<((usize, usize), i64)>);

fn normalizing_quadrics() -> Vec<Normalization> {
    let p = |i: usize, j: usize| pair_index(i - 1, j - 1);
    vec![
        (
            (p(1, 4), p(2, 3)),
            vec![
                ((p(1, 2), p(3, 4)), 1),
                ((p(1, 3), p(2, 4)), -1),
                ((p(1, 4), p(2, 3)), 1),
            ],
        ),
        (
            (p(1, 2), p(4, 5)),
            vec![
                ((p(1, 2), p(4, 5)), 1),
                ((p(1, 4), p(2, 5)), -1),
                ((p(1, 5), p(2, 4)), 1),
            ],
        ),
        (
            (p(1, 3), p(4, 5)),
            vec![
                ((p(1, 3), p(4, 5)), 1),
                ((p(1, 4), p(3, 5)), -1),
                ((p(1, 5), p(3, 4)), 1),
            ],
        ),
    ]
}

/// `q_{m,n}` after the containment relations and the normalizations
/// `q₁₄,₂₃ = q₁₂,₄₅ = q₁₃,₄₅ = 0`.
fn q_sym(m: usize, n: usize) -> QPoly {
    let [p12, p13, p14, p23] = [
        pair_index(0, 1),
        pair_index(0, 2),
        pair_index(0, 3),
        pair_index(1, 2),
    ];
    let key = if m <= n { (m, n) } else { (n, m) };
    let zero = QPoly::zero(sym::NVARS);
    let pivots: Vec<(usize, usize)> = normalizing_quadrics().into_iter().map(|(p, _)| p).collect();
    if key == (p12, p12) || key == (p12, p13) || key == (p13, p13) || pivots.contains(&key) {
        zero
    } else if key == (p12, p23) {
        sv(q_index(p12, p14)).neg(&Q)
    } else if key == (p13, p23) {
        sv(q_index(p13, p14)).neg(&Q)
    } else {
        sv(q_index(key.0, key.1))
    }
}

/// The general hyperplane `h = Σ h_ij p_ij` and quadric `q = Σ_{m≤n} q_{m,n} p_m p_n` through
/// the τ plane and double line, restricted to chart A.
pub fn tau_sections() -> (QPoly, QPoly) {
    let p = chart_plucker(sym::NVARS, false);
    let mut h = QPoly::zero(sym::NVARS);
    let mut q = QPoly::zero(sym::NVARS);
    for m in 0..10 {
        h = h.add(&Q, &h_sym(m).mul(&Q, &p[m]));
        for n in m..10 {
            q = q.add(&Q, &q_sym(m, n).mul(&Q, &p[m].mul(&Q, &p[n])));
        }
    }
    (h, q)
}

/// The tabulated general morphism for a chart as polynomials in the ψ symbols.
pub fn symbolic_images(chart: &DoubleLineChart) -> Vec<QPoly> {
    chart
        .tabulated
        .iter()
        .map(|terms| {
            terms.iter().fold(QPoly::zero(sym::NVARS), |acc, t| {
                let mut m = Mono::one(sym::NVARS);
                m.0[chart.chart_a.param] = t.power;
                m.0[chart.chart_a.eps] = t.eps as u16;
                m.0[sym::psi(t.psi)] = 1;
                acc.add(&Q, &QPoly::term(&Q, sym::NVARS, m, qi(t.coef)))
            })
        })
        .collect()
}

/// Splits `p` by its exponents in `(t₂, t₄)`.
fn by_chart_monomial(p: &QPoly) -> BTreeMap<(u16, u16), QPoly> {
    let mut out: BTreeMap<(u16, u16), QPoly> = BTreeMap::new();
    for (m, c) in &p.terms {
        let key = (m.0[T2], m.0[T4]);
        let mut rest = m.clone();
        rest.0[T2] = 0;
        rest.0[T4] = 0;
        let e = out.entry(key).or_insert_with(|| QPoly::zero(sym::NVARS));
        *e = e.add(&Q, &QPoly::term(&Q, sym::NVARS, rest, c.clone()));
    }
    out
}

pub const FORM_NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

/// Column order of the 13×8 matrix.
pub const MATRIX_COLUMNS: [usize; 8] = [3, 4, 5, 6, 7, 0, 1, 2];
/// Column and row order of the permuted matrix `M`, as indices into the 13×8 matrix.
pub const M_COLUMNS: [usize; 8] = [0, 1, 2, 5, 6, 3, 4, 7];
pub const M_ROWS: [usize; 13] = [1, 2, 4, 6, 7, 8, 9, 10, 11, 5, 12, 13, 3];

/// The eight linear forms `A…H`: `h ↦ A + B·t₂ + C·t₄` and
/// `q ↦ D + E·t₂ + F·t₂² + G·t₄ + H·t₂t₄`, plus anything else the images contain.
#[derive(Clone, Debug)]
pub struct TauForms {
    pub forms: [QPoly; 8],
    /// Coefficients of other monomials in `(t₂, t₄)`; empty when the shape is as expected.
    pub stray: Vec<((u16, u16), QPoly)>,
}

pub fn tau_forms() -> Result<TauForms> {
    let chart = double_line_chart(ConicClass::Tau, sym::NVARS);
    let images = symbolic_images(&chart);
    let (h, q) = tau_sections();
    let mut hb = by_chart_monomial(&chart.chart_a.apply(&h, &images)?);
    let mut qb = by_chart_monomial(&chart.chart_a.apply(&q, &images)?);
    let take = |map: &mut BTreeMap<(u16, u16), QPoly>, k| {
        map.remove(&k).unwrap_or_else(|| QPoly::zero(sym::NVARS))
    };
    let forms = [
        take(&mut hb, (0, 0)),
        take(&mut hb, (1, 0)),
        take(&mut hb, (0, 1)),
        take(&mut qb, (0, 0)),
        take(&mut qb, (1, 0)),
        take(&mut qb, (2, 0)),
        take(&mut qb, (0, 1)),
        take(&mut qb, (1, 1)),
    ];
    let stray = hb
        .into_iter()
        .chain(qb)
        .filter(|(_, p)| !p.is_zero())
        .collect();
    Ok(TauForms { forms, stray })
}

/// Value of a tabulated symbol (`h15`, `a24`, `c35`, `d`, `d24`, `k`, …) in the ring.
pub fn tabulated_symbol(name: &str) -> Result<QPoly> {
    let pair = |s: &str| -> Result<usize> {
        let b = s.as_bytes();
        if b.len() != 2 {
            return Err(Error::Malformed(format!("bad index {s}")));
        }
        let (i, j) = ((b[0] - b'1') as usize, (b[1] - b'1') as usize);
        if i >= j || j >= 5 {
            return Err(Error::Malformed(format!("bad index {s}")));
        }
        Ok(pair_index(i, j))
    };
    let [p12, p13, p14, p23] = [
        pair_index(0, 1),
        pair_index(0, 2),
        pair_index(0, 3),
        pair_index(1, 2),
    ];
    let two = qi(2);
    let out = match name {
        "d" => q_sym(p12, p14),
        "e" => q_sym(p13, p14),
        "f" => q_sym(p23, p23).scale(&Q, &-two),
        "g" => q_sym(p14, p14).add(&Q, &q_sym(p23, p23)),
        "d24" => tabulated_symbol("b24")?.add(&Q, &tabulated_symbol("g")?),
        "d34" => tabulated_symbol("a34")?.add(&Q, &tabulated_symbol("f")?),
        "k" => tabulated_symbol("a34")?
            .add(&Q, &tabulated_symbol("b24")?)
            .neg(&Q),
        _ if name.len() == 3 => {
            let m = pair(&name[1..])?;
            match &name[..1] {
                "h" => h_sym(m),
                "a" => q_sym(p12, m),
                "b" => q_sym(p13, m),
                "c" => q_sym(p14, m).add(&Q, &q_sym(p23, m)),
                _ => return Err(Error::Malformed(format!("unknown symbol {name}"))),
            }
        }
        _ => return Err(Error::Malformed(format!("unknown symbol {name}"))),
    };
    Ok(out)
}

/// Parses a signed sum such as `"b24+g"`, `"-b25-a35"` or `"0"`.
pub fn parse_entry(s: &str) -> Result<QPoly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "0" {
        return Ok(QPoly::zero(sym::NVARS));
    }
    let mut out = QPoly::zero(sym::NVARS);
    let mut sign = 1;
    let mut cur = String::new();
    let flush = |cur: &mut String, sign: i64, out: &mut QPoly| -> Result<()> {
        if !cur.is_empty() {
            *out = out.add(&Q, &tabulated_symbol(cur)?.scale(&Q, &qi(sign)));
            cur.clear();
        }
        Ok(())
    };
    for ch in s.chars() {
        match ch {
            '+' | '-' => {
                flush(&mut cur, sign, &mut out)?;
                sign = if ch == '-' { -1 } else { 1 };
            }
            _ => cur.push(ch),
        }
    }
    flush(&mut cur, sign, &mut out)?;
    Ok(out)
}

/// Parses a linear form written as tokens `±symbol.r`, meaning `±symbol·ψ_r`.
pub fn parse_form(s: &str) -> Result<QPoly> {
    let mut out = QPoly::zero(sym::NVARS);
    for tok in s.split_whitespace() {
        let (sign, rest) = match tok.as_bytes()[0] {
            b'+' => (1, &tok[1..]),
            b'-' => (-1, &tok[1..]),
            _ => (1, tok),
        };
        let (name, r) = rest
            .split_once('.')
            .ok_or_else(|| Error::Malformed(format!("bad token {tok}")))?;
        let r: usize = r
            .parse()
            .map_err(|_| Error::Malformed(format!("bad token {tok}")))?;
        if !(1..=13).contains(&r) {
            return Err(Error::Malformed(format!("bad token {tok}")));
        }
        out = out.add(
            &Q,
            &tabulated_symbol(name)?
                .mul(&Q, &sv(sym::psi(r)))
                .scale(&Q, &qi(sign)),
        );
    }
    Ok(out)
}

/// The tabulated forms `A…H`.
pub const TABULATED_FORMS: [&str; 8] = [
    "+h15.6 +h14.9 +h24.1 -h34.13 -h35.12",
    "+h15.7 +h14.10 +h24.2 -h24.13 -h34.3 -h25.12",
    "+h15.3 +h14.11 +h24.4 -h24.9 -h34.5 +h34.10 -h35.7 +h25.6 -h45.12",
    "+b15.6 +b24.1 +g.1 -b34.13 -b35.12 +e.9",
    "+a15.6 +b15.7 +a24.1 +b24.2 -b24.13 -a35.12 -b25.12 -a34.13 -b34.3 +d.9 +e.10 +g.2",
    "+a15.7 +a24.2 -a24.13 -a25.12 +g.3 -a34.3 +d.10",
    "+b15.8 +b25.6 +c15.6 +c24.1 +b24.4 -b24.9 -b34.5 +b34.10 -c34.13 -b35.7 -c35.12 +f.9 +e.11 +g.4",
    "+a15.8 +c15.7 +a24.4 -a24.9 +c24.2 -c24.13 +a25.6 -c25.12 -a34.5 +a34.10 -c34.3 -a35.7 +g.5 +f.10 +d.11",
];

/// The tabulated 13×8 matrix: rows ψ₁…ψ₁₃, columns D, E, F, G, H, A, B, C.
pub const TABULATED_MATRIX: [[&str; 8]; 13] = [
    ["b24+g", "a24", "0", "c24", "0", "h24", "0", "0"],
    ["0", "b24+g", "a24", "0", "c24", "0", "h24", "0"],
    ["0", "-b34", "g-a34", "0", "-c34", "0", "-h34", "0"],
    ["0", "0", "0", "b24+g", "a24", "0", "0", "h24"],
    ["0", "0", "0", "-b34", "g-a34", "0", "0", "-h34"],
    ["b15", "a15", "0", "c15+b15", "-a25", "h15", "0", "h25"],
    ["0", "b15", "a15", "-b35", "c15-a35", "0", "h15", "-h35"],
    ["0", "0", "0", "b15", "a15", "0", "0", "h15"],
    ["e", "d", "0", "f-b24", "-a24", "h14", "0", "-h24"],
    ["0", "e", "d", "b34", "f+a34", "0", "h14", "h34"],
    ["0", "0", "0", "e", "d", "0", "0", "h14"],
    [
        "-b35", "-b25-a35", "-a25", "-c35", "-c25", "-h35", "-h25", "-h45",
    ],
    [
        "-b34", "-b24-a34", "-a24", "-c34", "-c24", "-h34", "-h24", "0",
    ],
];

/// The tabulated permuted matrix `M` (rows `M_ROWS`, columns D, E, F, A, B, G, H, C).
pub const TABULATED_M: [[&str; 8]; 13] = [
    ["d24", "a24", "0", "h24", "0", "c24", "0", "0"],
    ["0", "d24", "a24", "0", "h24", "0", "c24", "0"],
    ["0", "0", "0", "0", "0", "d24", "a24", "h24"],
    ["b15", "a15", "0", "h15", "0", "c15+b15", "-a25", "h25"],
    ["0", "b15", "a15", "0", "h15", "-b35", "c15-a35", "-h35"],
    ["0", "0", "0", "0", "0", "b15", "a15", "h15"],
    ["e", "d", "0", "h14", "0", "d24+k", "-a24", "-h24"],
    ["0", "e", "d", "0", "h14", "b34", "d34", "h34"],
    ["0", "0", "0", "0", "0", "e", "d", "h14"],
    ["0", "0", "0", "0", "0", "-b34", "d24+k", "-h34"],
    [
        "-b35", "-b25-a35", "-a25", "-h35", "-h25", "-c35", "-c25", "-h45",
    ],
    ["-b34", "k", "-a24", "-h34", "-h24", "-c34", "-c24", "0"],
    ["0", "-b34", "d24+k", "0", "-h34", "0", "-c34", "0"],
];

/// Coefficient of `ψ_r` in a form that is linear in the ψ symbols.
pub fn psi_coefficient(form: &QPoly, r: usize) -> QPoly {
    form.coeff_in(&Q, sym::psi(r), 1)
}

/// The 13×8 matrix (rows ψ₁…ψ₁₃, columns D, E, F, G, H, A, B, C) of a family of forms.
pub fn matrix_of_forms(forms: &[QPoly; 8]) -> Vec<Vec<QPoly>> {
    (1..=13)
        .map(|r| {
            MATRIX_COLUMNS
                .iter()
                .map(|&c| psi_coefficient(&forms[c], r))
                .collect()
        })
        .collect()
}

/// Rearranges a 13×8 matrix into the layout of `M`.
pub fn permute_to_m(mat: &[Vec<QPoly>]) -> Vec<Vec<QPoly>> {
    M_ROWS
        .iter()
        .map(|&r| M_COLUMNS.iter().map(|&c| mat[r - 1][c].clone()).collect())
        .collect()
}

pub fn parse_table(t: &[[&str; 8]; 13]) -> Result<Vec<Vec<QPoly>>> {
    t.iter()
        .map(|row| row.iter().map(|s| parse_entry(s)).collect())
        .collect()
}

fn mismatches(a: &[Vec<QPoly>], b: &[Vec<QPoly>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
            if x != y {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FormDiscrepancy {
    pub form: String,
    /// Recomputed minus tabulated.
    pub difference: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixOracleReport {
    pub forms_equal: [bool; 8],
    pub discrepancies: Vec<FormDiscrepancy>,
    /// Monomials of the images outside the expected shape.
    pub stray_terms: usize,
    /// Entries (1-based row, column) where the recomputed 13×8 matrix differs from the table.
    pub matrix_mismatches: Vec<(usize, usize)>,
    /// Entries where the tabulated `M` is not the permutation of the tabulated 13×8 matrix.
    pub m_vs_matrix: Vec<(usize, usize)>,
    /// Entries where the tabulated `M` differs from the recomputed matrix.
    pub m_mismatches: Vec<(usize, usize)>,
    /// Entries where the tabulated matrix disagrees with the tabulated forms.
    pub matrix_vs_forms: Vec<(usize, usize)>,
    pub generic_rank: usize,
}

impl AppendixOracleReport {
    pub fn all_equal(&self) -> bool {
        self.forms_equal.iter().all(|x| *x)
            && self.stray_terms == 0
            && self.matrix_mismatches.is_empty()
            && self.m_vs_matrix.is_empty()
            && self.m_mismatches.is_empty()
    }
}

/// Recomputes `A…H` from the chart and compares them, and the matrices built from them,
/// with the tabulated versions.
pub fn appendix_oracle(seed: u64) -> Result<AppendixOracleReport> {
    let computed = tau_forms()?;
    let tabulated: Vec<QPoly> = TABULATED_FORMS
        .iter()
        .map(|s| parse_form(s))
        .collect::<Result<_>>()?;
    let mut forms_equal = [false; 8];
    let mut discrepancies = Vec::new();
    for i in 0..8 {
        forms_equal[i] = computed.forms[i] == tabulated[i];
        if !forms_equal[i] {
            discrepancies.push(FormDiscrepancy {
                form: FORM_NAMES[i].into(),
                difference: format_poly(&computed.forms[i].sub(&Q, &tabulated[i])),
            });
        }
    }
    let ours = matrix_of_forms(&computed.forms);
    let theirs_forms: [QPoly; 8] = std::array::from_fn(|i| tabulated[i].clone());
    let table = parse_table(&TABULATED_MATRIX)?;
    let table_m = parse_table(&TABULATED_M)?;
    let generic_rank = symbolic_rank(&ours, seed);
    Ok(AppendixOracleReport {
        forms_equal,
        discrepancies,
        stray_terms: computed.stray.len(),
        matrix_mismatches: mismatches(&ours, &table),
        m_vs_matrix: mismatches(&permute_to_m(&table), &table_m),
        m_mismatches: mismatches(&permute_to_m(&ours), &table_m),
        matrix_vs_forms: mismatches(&matrix_of_forms(&theirs_forms), &table),
        generic_rank,
    })
}

fn reduce_rational(f: &Fp, c: &BigRational) -> u64 {
    let num = f.reduce_big(c.numer());
    let den = f.reduce_big(c.denom());
    f.mul(&num, &f.inv(&den).expect("denominator prime to p"))
}

/// Evaluates a polynomial of the symbolic ring over F_p.
pub fn eval_mod(f: &Fp, p: &QPoly, point: &[u64]) -> u64 {
    let mut acc = 0;
    for (m, c) in &p.terms {
        let mut t = reduce_rational(f, c);
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = f.mul(&t, &f.pow(&point[i], e as u64));
            }
        }
        acc = f.add(&acc, &t);
    }
    acc
}

/// Rank over the function field, certified by one evaluation at a random point over a
/// large prime (a specialization never raises the rank, and full column rank is 8).
pub fn symbolic_rank(mat: &[Vec<QPoly>], seed: u64) -> usize {
    let f = Fp::new(INTERPOLATION_PRIME).expect("prime");
    let mut rng = stream(seed, "symbolic-rank");
    let mut best = 0;
    for _ in 0..3 {
        let point: Vec<u64> = (0..sym::NVARS).map(|_| f.random(&mut rng)).collect();
        let m = Mat::from_rows(
            mat.iter()
                .map(|r| r.iter().map(|e| eval_mod(&f, e, &point)).collect())
                .collect(),
            8,
        );
        best = best.max(matrix::rank(&f, &m));
    }
    best
}

/// A hyperplane and quadric through the τ plane, as field values: `h[m]` is the coefficient
/// of `p_m` and `q[(m, n)]` (stored symmetrically) the coefficient of `p_m·p_n`, `m ≤ n`.
#[derive(Clone, Debug)]
pub struct AppendixParams<E> {
    pub h: Vec<E>,
    pub q: Mat<E>,
}

/// The 13×8 matrix in the layout of `M`, from the recomputed forms.
pub fn appendix_matrix(f: &Fp, params: &AppendixParams<u64>) -> Result<Mat<u64>> {
    let [p12, p13, p14, p23] = [
        pair_index(0, 1),
        pair_index(0, 2),
        pair_index(0, 3),
        pair_index(1, 2),
    ];
    let (h, q) = (&params.h, &params.q);
    if h.len() != 10 || q.rows() != 10 || q.cols() != 10 || !matrix::is_symmetric(f, q) {
        return Err(Error::Dimension(
            "expected 10 hyperplane and 10×10 quadric coefficients".into(),
        ));
    }
    let relations = [
        h[p12],
        h[p13],
        f.add(&h[p14], &h[p23]),
        *q.get(p12, p12),
        *q.get(p12, p13),
        *q.get(p13, p13),
        f.add(q.get(p12, p14), q.get(p12, p23)),
        f.add(q.get(p13, p14), q.get(p13, p23)),
    ];
    if relations.iter().any(|x| *x != 0) {
        return Err(Error::Precondition(
            "the hyperplane and quadric do not contain the double line".into(),
        ));
    }
    let mut qn = q.clone();
    for (pivot, terms) in normalizing_quadrics() {
        let s = *qn.get(pivot.0, pivot.1);
        for ((m, n), c) in terms {
            let v = f.sub(qn.get(m, n), &f.mul(&s, &f.from_i64(c)));
            qn.set(m, n, v);
            qn.set(n, m, v);
        }
    }
    let mut point = vec![0u64; sym::NVARS];
    for m in 0..10 {
        point[sym::h(m)] = h[m];
        for n in m..10 {
            point[q_index(m, n)] = *qn.get(m, n);
        }
    }
    let mat = permute_to_m(&matrix_of_forms(&tau_forms()?.forms));
    Ok(Mat::from_rows(
        mat.iter()
            .map(|r| r.iter().map(|e| eval_mod(f, e, &point)).collect())
            .collect(),
        8,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct RankStats {
    pub p: u64,
    pub samples: usize,
    pub deficient: usize,
    pub frequency: f64,
    pub bound: f64,
}

/// Linear entries `Σ coef·symbol` with symbols renumbered densely.
struct LinearTable {
    entries: Vec<Vec<(usize, i64)>>,
    symbols: usize,
}

fn linear_table(mat: &[Vec<QPoly>]) -> Result<LinearTable> {
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for row in mat {
        for e in row {
            let mut lin = Vec::new();
            for (m, c) in &e.terms {
                let vars: Vec<usize> = (0..sym::NVARS).filter(|&i| m.0[i] > 0).collect();
                if vars.len() != 1 || m.0[vars[0]] != 1 {
                    return Err(Error::Precondition("matrix entry is not linear".into()));
                }
                let c = rational_to_i64(c)
                    .ok_or_else(|| Error::Precondition("non-integer coefficient".into()))?;
                let next = index.len();
                lin.push((*index.entry(vars[0]).or_insert(next), c));
            }
            entries.push(lin);
        }
    }
    Ok(LinearTable {
        entries,
        symbols: index.len(),
    })
}

fn small_rank(p: u64, m: &mut [u64], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            m.swap(rank * cols + j, piv * cols + j);
        }
        let inv = {
            let (mut a, mut e, mut acc) = (m[rank * cols + c], p - 2, 1u64);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * a % p;
                }
                a = a * a % p;
                e >>= 1;
            }
            acc
        };
        for r in rank + 1..rows {
            let factor = m[r * cols + c] * inv % p;
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                m[r * cols + j] = (m[r * cols + j] + p * p - factor * m[rank * cols + j] % p) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Frequency of rank < 8 among `n` uniform points of the containment locus over F_p.
pub fn appendix_rank_stats(p: u64, n: usize, seed: u64) -> Result<RankStats> {
    if !crate::field::is_prime(p) || p > 1000 {
        return Err(Error::Precondition(format!("{p} is not a small prime")));
    }
    let table = linear_table(&matrix_of_forms(&tau_forms()?.forms))?;
    const CHUNK: usize = 20_000;
    let chunks = n.div_ceil(CHUNK);
    let deficient: usize = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = substream(seed, "appendix-rank", ci as u64);
            let count = CHUNK.min(n - ci * CHUNK);
            let mut vals = vec![0u64; table.symbols];
            let mut m = vec![0u64; 13 * 8];
            let mut bad = 0;
            for _ in 0..count {
                for v in vals.iter_mut() {
                    *v = rng.gen_range(0..p);
                }
                for (slot, lin) in m.iter_mut().zip(&table.entries) {
                    let s: i64 = lin.iter().map(|&(i, c)| c * vals[i] as i64).sum();
                    *slot = s.rem_euclid(p as i64) as u64;
                }
                if small_rank(p, &mut m, 13, 8) < 8 {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    Ok(RankStats {
        p,
        samples: n,
        deficient,
        frequency: deficient as f64 / n.max(1) as f64,
        bound: 10.0 / (p * p * p) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::sample_conic;
    use crate::instance::random_instance;
    use crate::rng::stream;

    fn big() -> Fp {
        Fp::new(INTERPOLATION_PRIME).unwrap()
    }

    #[test]
    fn conics_on_the_grassmannian_move_in_thirteen_dimensions() {
        let f = big();
        let mut rng = stream(1, "test");
        let a: [Vec<u64>; 4] =
            std::array::from_fn(|_| (0..5).map(|_| f.random(&mut rng)).collect());
        let c = ParametrizedConic::on_grassmannian(&f, &a).unwrap();
        assert_eq!(conic_tangent_dim(&f, &c).unwrap(), 13);
    }

    #[test]
    fn conic_off_the_variety_is_rejected() {
        let f = big();
        let mut rng = stream(2, "test");
        let coeffs: [Vec<u64>; 3] =
            std::array::from_fn(|_| (0..10).map(|_| f.random(&mut rng)).collect());
        assert!(ParametrizedConic::new(&f, coeffs, plucker_quadrics(&f)).is_err());
    }

    #[test]
    fn splitting_candidates_are_separated_by_twists() {
        assert_eq!(splittings_with(3, 2, [5, 2, 0]), vec![vec![1, 1, 0]]);
        assert_eq!(splittings_with(3, 2, [5, 2, 1]), vec![vec![2, 0, 0]]);
        assert_eq!(splittings_with(3, 2, [5, 3, 1]), vec![vec![2, 1, -1]]);
        assert!(splittings_with(3, 2, [4, 2, 0]).is_empty());
    }

    #[test]
    fn conic_on_z_has_five_dimensional_tangent_space() {
        let inst = random_instance(
            1,
            FieldSpec::Prime {
                p: INTERPOLATION_PRIME,
            },
            3,
        )
        .unwrap();
        let c = sample_conic(&inst, 1).unwrap();
        let f = inst.fp();
        let pc = ParametrizedConic::from_conic(&inst, &c.conic, &mut stream(1, "param")).unwrap();
        assert_eq!(conic_tangent_dim(&f, &pc).unwrap(), 5);
        let s = splitting_type(&f, &pc, 1).unwrap();
        assert_eq!(s.degrees, vec![1, 1, 0]);
        assert_eq!(s.h0, [5, 2, 0]);
    }

    #[test]
    fn chart_ideals_contain_the_double_lines() {
        for kind in [ConicClass::Sigma, ConicClass::Rho, ConicClass::Tau] {
            check_chart_ideals(&double_line_chart(kind, 6)).unwrap();
        }
    }

    #[test]
    fn division_is_exact_on_generators() {
        let chart = double_line_chart(ConicClass::Tau, 6);
        for (i, g) in chart.chart_a.generator_polys().iter().enumerate() {
            let cs = chart.chart_a.divide(g).unwrap();
            for (j, c) in cs.iter().enumerate() {
                assert_eq!(
                    *c,
                    qconst(6, (i == j) as i64),
                    "generator {i}, quotient {j}"
                );
            }
        }
        // a polynomial outside the ideal leaves a remainder
        assert!(chart.chart_a.divide(&qvar(6, T2)).is_err());
    }

    #[test]
    fn symbol_indices_round_trip() {
        let mut seen = std::collections::BTreeSet::new();
        for m in 0..10 {
            for n in m..10 {
                let i = q_index(m, n);
                assert!((sym::Q0..sym::PSI0).contains(&i));
                assert!(seen.insert(i));
                let (a, b) = (PAIRS[m], PAIRS[n]);
                assert_eq!(
                    sym_name(i),
                    format!("q{}{},{}{}", a.0 + 1, a.1 + 1, b.0 + 1, b.1 + 1)
                );
            }
        }
        assert_eq!(seen.len(), 55);
    }

    #[test]
    fn conic_on_w_has_two_dimensional_tangent_space() {
        let (inst, pc) = instance_containing_conic(
            2,
            FieldSpec::Prime {
                p: INTERPOLATION_PRIME,
            },
            4,
        )
        .unwrap();
        let f = inst.fp();
        assert_eq!(conic_tangent_dim(&f, &pc).unwrap(), 2);
        let s = splitting_type(&f, &pc, 2).unwrap();
        assert_eq!(s.degrees.iter().sum::<i64>(), 0);
    }

    #[test]
    fn perturbed_table_is_detected() {
        let computed = tau_forms().unwrap();
        let a = parse_form(TABULATED_FORMS[0]).unwrap();
        assert_eq!(computed.forms[0], a);
        let bad = parse_form(&TABULATED_FORMS[0].replace("-h34.13", "+h34.13")).unwrap();
        assert_ne!(computed.forms[0], bad);
    }

    #[test]
    fn matrix_ignores_plucker_quadrics_added_to_q() {
        let f = Fp::new(1_000_003).unwrap();
        let mut rng = stream(9, "params");
        let (h, q) = random_params(&f, &mut rng);
        let base = appendix_matrix(
            &f,
            &AppendixParams {
                h: h.clone(),
                q: q.clone(),
            },
        )
        .unwrap();
        assert_eq!(matrix::rank(&f, &base), 8);
        let mut moved = q.clone();
        for pk in plucker_quadrics(&f) {
            let c = f.random(&mut rng);
            for m in 0..10 {
                for n in m..10 {
                    // symmetric-matrix entries to coefficients of p_m p_n
                    let x = if m == n {
                        *pk.get(m, n)
                    } else {
                        f.add(pk.get(m, n), pk.get(n, m))
                    };
                    let v = f.add(moved.get(m, n), &f.mul(&c, &x));
                    moved.set(m, n, v);
                    moved.set(n, m, v);
                }
            }
        }
        assert_ne!(moved, q);
        assert_eq!(
            appendix_matrix(&f, &AppendixParams { h, q: moved }).unwrap(),
            base
        );
    }

    fn random_params(f: &Fp, rng: &mut impl Rng) -> (Vec<u64>, Mat<u64>) {
        let p = |i: usize, j: usize| pair_index(i - 1, j - 1);
        let mut h: Vec<u64> = (0..10).map(|_| f.random(rng)).collect();
        h[p(1, 2)] = 0;
        h[p(1, 3)] = 0;
        h[p(2, 3)] = f.neg(&h[p(1, 4)]);
        let mut q = matrix::random_symmetric(f, rng, 10);
        for (m, n) in [(p(1, 2), p(1, 2)), (p(1, 2), p(1, 3)), (p(1, 3), p(1, 3))] {
            q.set(m, n, 0);
            q.set(n, m, 0);
        }
        for row in [p(1, 2), p(1, 3)] {
            let v = f.neg(q.get(row, p(1, 4)));
            q.set(row, p(2, 3), v);
            q.set(p(2, 3), row, v);
        }
        (h, q)
    }

    #[test]
    fn zero_parameters_give_zero_matrix() {
        let f = Fp::new(101).unwrap();
        let params = AppendixParams {
            h: vec![0; 10],
            q: matrix::zeros(&f, 10, 10),
        };
        let m = appendix_matrix(&f, &params).unwrap();
        assert_eq!(matrix::rank(&f, &m), 0);
    }

    #[test]
    fn relations_are_enforced() {
        let f = Fp::new(101).unwrap();
        let mut h = vec![0; 10];
        h[pair_index(0, 1)] = 1;
        let params = AppendixParams {
            h,
            q: matrix::zeros(&f, 10, 10),
        };
        assert!(appendix_matrix(&f, &params).is_err());
    }
}
