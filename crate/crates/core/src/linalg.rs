//! Dense complex linear algebra: LU with partial pivoting and full
//! (restart-free) GMRES.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::{par, Error, Result};

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Pivot-ratio condition estimate above which a factorization is rejected.
pub const SINGULAR_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SolveMethod {
    Direct,
    Gmres,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub method: SolveMethod,
    /// Krylov iterations; zero for a direct factorization.
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
    pub tolerance: f64,
    pub unknowns: usize,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.residual <= self.tolerance
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            SolveMethod::Direct => write!(f, "direct LU on {} unknowns", self.unknowns)?,
            SolveMethod::Gmres => write!(
                f,
                "GMRES on {} unknowns, {} iterations",
                self.unknowns, self.iterations
            )?,
        }
        write!(
            f,
            ", residual {:.3e} (tolerance {:.1e})",
            self.residual, self.tolerance
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target.
    pub tolerance: f64,
    /// GMRES iteration cap (no restarts).
    pub max_iterations: usize,
    /// Systems with at most this many unknowns are factorized directly.
    pub direct_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            max_iterations: 500,
            direct_limit: 1728,
        }
    }
}

/// Square complex operator `y = A x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds the matrix row by row; `fill(i, row)` writes row `i`.
    pub fn from_rows<F>(n: usize, fill: F) -> Self
    where
        F: Fn(usize, &mut [C64]) + Sync + Send,
    {
        let mut m = Self::zeros(n);
        if n > 0 {
            par::for_each_chunk(&mut m.data, n, |i, row| fill(i, row));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        par::for_each_row(y, |i, yi| {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        });
    }
}

/// `PA = LU` with partial pivoting, stored in place.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: DenseMatrix,
    perm: Vec<usize>,
    condition: f64,
}

impl LuFactorization {
    pub fn new(mut a: DenseMatrix) -> Result<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a.get(i, k).norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pmax > 0.0) || !pmax.is_finite() {
                return Err(Error::SingularSystem {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a.get(k, k);
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            par::for_each_chunk(tail, n, |_, row| {
                let l = row[k] / pivot;
                row[k] = l;
                if l != ZERO {
                    for j in k + 1..n {
                        row[j] -= l * pivot_row[j];
                    }
                }
            });
        }
        let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let d = a.get(i, i).norm();
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        let condition = if n == 0 { 1.0 } else { dmax / dmin };
        if condition > SINGULAR_CONDITION {
            return Err(Error::SingularSystem { condition });
        }
        Ok(LuFactorization {
            lu: a,
            perm,
            condition,
        })
    }

    /// Ratio of largest to smallest pivot magnitude; a cheap lower bound on
    /// the condition number.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    Float::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Relative residual `‖b − A x‖ / ‖b‖` (absolute when `b = 0`).
pub fn relative_residual(op: &dyn LinearOperator, x: &[C64], b: &[C64]) -> f64 {
    let mut ax = vec![ZERO; b.len()];
    op.apply(x, &mut ax);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Full GMRES from a zero initial guess with modified Gram–Schmidt and Givens
/// rotations. Fails with [`Error::SolverFailure`] if the relative residual
/// does not reach `tolerance` within `max_iterations`.
pub fn gmres(
    op: &dyn LinearOperator,
    b: &[C64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<C64>, SolveReport)> {
    let n = op.dim();
    if b.len() != n {
        return Err(Error::invalid(
            "right-hand side length differs from operator size",
        ));
    }
    let mut report = SolveReport {
        method: SolveMethod::Gmres,
        iterations: 0,
        residual: 0.0,
        tolerance,
        unknowns: n,
        warnings: Vec::new(),
    };
    let beta = norm(b);
    if beta == 0.0 {
        return Ok((vec![ZERO; n], report));
    }
    let m = max_iterations.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    basis.push(b.iter().map(|v| v / beta).collect());
    // Hessenberg columns, each of length j + 2.
    let mut h: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut cs: Vec<f64> = Vec::with_capacity(m);
    let mut sn: Vec<C64> = Vec::with_capacity(m);
    let mut g = vec![ZERO; m + 1];
    g[0] = C64::new(beta, 0.0);
    let mut w = vec![ZERO; n];
    let mut steps = 0;
    for j in 0..m {
        op.apply(&basis[j], &mut w);
        let mut col = vec![ZERO; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dotc(v, &w);
            col[i] = hij;
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk -= hij * vk;
            }
        }
        let wn = norm(&w);
        col[j + 1] = C64::new(wn, 0.0);
        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i].conj() * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let (c, s) = givens(col[j], col[j + 1]);
        col[j] = c * col[j] + s * col[j + 1];
        col[j + 1] = ZERO;
        g[j + 1] = -s.conj() * g[j];
        g[j] *= c;
        cs.push(c);
        sn.push(s);
        h.push(col);
        steps = j + 1;
        let rel = g[j + 1].norm() / beta;
        if rel <= 0.5 * tolerance || wn == 0.0 {
            break;
        }
        basis.push(w.iter().map(|v| v / wn).collect());
    }
    // Back substitution on the triangularized Hessenberg system.
    let mut y = vec![ZERO; steps];
    for i in (0..steps).rev() {
        let mut s = g[i];
        for l in i + 1..steps {
            s -= h[l][i] * y[l];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![ZERO; n];
    for (yi, v) in y.iter().zip(&basis) {
        for (xk, vk) in x.iter_mut().zip(v) {
            *xk += yi * vk;
        }
    }
    report.iterations = steps;
    report.residual = relative_residual(op, &x, b);
    if !report.converged() {
        return Err(Error::SolverFailure { report });
    }
    Ok((x, report))
}

/// Complex Givens rotation zeroing `b` in `(a, b)`: returns real `c` and
/// complex `s` with `c a + s b = r`, `−conj(s) a + c b = 0`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = Float::hypot(na, nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Solves `A x = b`, factorizing `dense()` when the system is small enough
/// and running GMRES on `op` otherwise.
pub fn solve<F>(
    op: &dyn LinearOperator,
    dense: F,
    b: &[C64],
    options: &SolverOptions,
) -> Result<(Vec<C64>, SolveReport)>
where
    F: FnOnce() -> DenseMatrix,
{
    let n = op.dim();
    if n <= options.direct_limit {
        let lu = LuFactorization::new(dense())?;
        let x = lu.solve(b);
        let report = SolveReport {
            method: SolveMethod::Direct,
            iterations: 0,
            residual: relative_residual(op, &x, b),
            tolerance: options.tolerance,
            unknowns: n,
            warnings: Vec::new(),
        };
        if !report.converged() {
            return Err(Error::SolverFailure { report });
        }
        Ok((x, report))
    } else {
        gmres(op, b, options.tolerance, options.max_iterations)
    }
}
