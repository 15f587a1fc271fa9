//! Sparse matrices and the Krylov solvers used throughout the crate:
//! Jacobi-preconditioned conjugate gradients for the real Laplace cell
//! problems and Jacobi-preconditioned BiCGStab for the complex curl-curl
//! systems. A dense LU solve is provided as an independent oracle for
//! small systems.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Scalars the solvers operate on (`f64` and `Complex64`).
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync {}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Row counts above which matrix-vector products run on the rayon pool.
const PARALLEL_ROWS: usize = 32_768;

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct Csr<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
}

/// Row-by-row builder; entries of one row may repeat a column and are
/// summed.
pub struct CsrBuilder<T> {
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
    scratch: Vec<(usize, T)>,
}

impl<T: Scalar> CsrBuilder<T> {
    pub fn new(ncols: usize) -> Self {
        CsrBuilder {
            ncols,
            row_ptr: vec![0],
            col_idx: Vec::new(),
            values: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn push(&mut self, col: usize, value: T) {
        debug_assert!(col < self.ncols);
        self.scratch.push((col, value));
    }

    pub fn finish_row(&mut self) {
        self.scratch.sort_by_key(|&(c, _)| c);
        let mut last: Option<usize> = None;
        for &(c, v) in &self.scratch {
            if last == Some(c) {
                let n = self.values.len() - 1;
                self.values[n] += v;
            } else {
                self.col_idx.push(c);
                self.values.push(v);
                last = Some(c);
            }
        }
        self.scratch.clear();
        self.row_ptr.push(self.col_idx.len());
    }

    pub fn build(self) -> Csr<T> {
        Csr {
            nrows: self.row_ptr.len() - 1,
            ncols: self.ncols,
            row_ptr: self.row_ptr,
            col_idx: self.col_idx,
            values: self.values,
        }
    }
}

impl<T: Scalar> Csr<T> {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows)
            .map(|i| self.row(i).find(|&(c, _)| c == i).map(|(_, v)| v).unwrap_or_else(T::zero))
            .collect()
    }

    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        let row = |i: usize| {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            acc
        };
        if self.nrows >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = row(i));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Csr<T> {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut col_idx = vec![0; self.values.len()];
        let mut values = vec![T::zero(); self.values.len()];
        for i in 0..self.nrows {
            for (c, v) in self.row(i) {
                let slot = counts[c];
                col_idx[slot] = i;
                values[slot] = v;
                counts[c] += 1;
            }
        }
        Csr {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::<T>::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (c, v) in self.row(i) {
                m[(i, c)] += v;
            }
        }
        m
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let dense = self.to_dense();
        let scale = dense.iter().map(|v| v.modulus()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (c, v) in self.row(i) {
                worst = worst.max((v - dense[(c, i)]).modulus());
            }
        }
        worst / scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            tolerance: 1e-10,
            max_iterations: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Unconjugated bilinear product `sum a_i b_i`.
fn dotu<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Hermitian product `sum conj(a_i) b_i`.
fn dotc<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x.conjugate() * y)
}

fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|v| v.modulus_squared()).sum::<f64>().sqrt()
}

fn inverse_diagonal<T: Scalar>(a: &Csr<T>) -> Vec<T> {
    a.diagonal()
        .into_iter()
        .map(|d| if d.modulus() > 0.0 { T::one() / d } else { T::one() })
        .collect()
}

pub fn relative_residual<T: Scalar>(a: &Csr<T>, b: &[T], x: &[T]) -> f64 {
    let ax = a.apply(x);
    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &yi)| bi - yi).collect();
    let bn = norm(b);
    if bn == 0.0 {
        norm(&r)
    } else {
        norm(&r) / bn
    }
}

/// Jacobi-preconditioned conjugate gradients for a real symmetric positive
/// (semi)definite matrix. For singular systems the right-hand side must be
/// consistent; the caller fixes the gauge afterwards.
pub fn conjugate_gradient(a: &Csr<f64>, b: &[f64], x: &mut [f64], opts: KrylovOptions) -> Result<SolveStats> {
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let dinv = inverse_diagonal(a);
    let mut r = a.apply(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dotu(&r, &z);
    let mut ap = vec![0.0; n];
    let mut res = norm(&r) / bn;
    let mut it = 0;
    while res > opts.tolerance && it < opts.max_iterations {
        a.mul_vec(&p, &mut ap);
        let pap = dotu(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dotu(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        res = norm(&r) / bn;
    }
    let true_res = relative_residual(a, b, x);
    if true_res > opts.tolerance * 10.0 {
        return Err(Error::SolverDiverged {
            iterations: it,
            residual: true_res,
            tolerance: opts.tolerance,
        });
    }
    Ok(SolveStats {
        iterations: it,
        relative_residual: true_res,
    })
}

/// Jacobi-preconditioned BiCGStab.
pub fn bicgstab<T: Scalar>(a: &Csr<T>, b: &[T], x: &mut [T], opts: KrylovOptions) -> Result<SolveStats> {
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let dinv = inverse_diagonal(a);
    let mut r = a.apply(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut r_hat = r.clone();
    let mut rho = T::one();
    let mut alpha = T::one();
    let mut omega = T::one();
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut y = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let mut t = vec![T::zero(); n];
    let mut res = norm(&r) / bn;
    let mut it = 0;
    while res > opts.tolerance && it < opts.max_iterations {
        let rho_new = dotc(&r_hat, &r);
        if rho_new.modulus() < 1e-300 {
            // breakdown: restart the shadow residual
            r_hat.copy_from_slice(&r);
            rho = T::one();
            alpha = T::one();
            omega = T::one();
            v.iter_mut().for_each(|e| *e = T::zero());
            p.iter_mut().for_each(|e| *e = T::zero());
            it += 1;
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = dinv[i] * p[i];
        }
        a.mul_vec(&y, &mut v);
        alpha = rho / dotc(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / bn <= opts.tolerance {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            r.copy_from_slice(&s);
            it += 1;
            break;
        }
        for i in 0..n {
            z[i] = dinv[i] * s[i];
        }
        a.mul_vec(&z, &mut t);
        let tt = dotc(&t, &t);
        omega = if tt.modulus() > 0.0 { dotc(&t, &s) / tt } else { T::zero() };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        it += 1;
        res = norm(&r) / bn;
        if omega.modulus() == 0.0 {
            break;
        }
    }
    let true_res = relative_residual(a, b, x);
    if true_res > opts.tolerance * 10.0 {
        return Err(Error::SolverDiverged {
            iterations: it,
            residual: true_res,
            tolerance: opts.tolerance,
        });
    }
    Ok(SolveStats {
        iterations: it,
        relative_residual: true_res,
    })
}

/// Dense LU with partial pivoting; intended for small oracle systems.
pub fn dense_solve<T: Scalar>(a: &Csr<T>, b: &[T]) -> Result<Vec<T>> {
    let lu = a.to_dense().lu();
    let rhs = DVector::from_column_slice(b);
    lu.solve(&rhs).map(|v| v.iter().copied().collect()).ok_or(Error::SolverDiverged {
        iterations: 0,
        residual: f64::INFINITY,
        tolerance: 0.0,
    })
}

/// Relative 2-norm distance `|a - b| / |b|`.
pub fn relative_difference<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    let diff: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let bn = norm(b);
    if bn == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / bn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplacian_1d(n: usize) -> Csr<f64> {
        let mut b = CsrBuilder::new(n);
        for i in 0..n {
            b.push(i, 2.0);
            if i > 0 {
                b.push(i - 1, -1.0);
            }
            if i + 1 < n {
                b.push(i + 1, -1.0);
            }
            b.finish_row();
        }
        b.build()
    }

    #[test]
    fn cg_matches_dense() {
        let a = laplacian_1d(40);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rhs: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut x = vec![0.0; 40];
        let stats = conjugate_gradient(&a, &rhs, &mut x, KrylovOptions::default()).unwrap();
        assert!(stats.relative_residual <= 1e-9);
        let exact = dense_solve(&a, &rhs).unwrap();
        assert!(relative_difference(&x, &exact) < 1e-8);
    }

    #[test]
    fn bicgstab_complex_shifted() {
        let n = 60;
        let lap = laplacian_1d(n);
        let shift = Complex64::new(-0.3, 0.2);
        let mut b = CsrBuilder::new(n);
        for i in 0..n {
            for (c, v) in lap.row(i) {
                b.push(c, Complex64::new(v, 0.0));
            }
            b.push(i, shift);
            b.finish_row();
        }
        let a = b.build();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rhs: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        bicgstab(&a, &rhs, &mut x, KrylovOptions { tolerance: 1e-12, max_iterations: 10_000 }).unwrap();
        let exact = dense_solve(&a, &rhs).unwrap();
        assert!(relative_difference(&x, &exact) < 1e-9);
    }

    #[test]
    fn builder_sums_duplicates() {
        let mut b = CsrBuilder::new(3);
        b.push(2, 1.0);
        b.push(0, 1.0);
        b.push(2, 2.5);
        b.finish_row();
        let m = b.build();
        assert_eq!(m.col_idx, vec![0, 2]);
        assert_eq!(m.values, vec![1.0, 3.5]);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = laplacian_1d(5);
        let mut x = vec![1.0; 5];
        let s = conjugate_gradient(&a, &[0.0; 5], &mut x, KrylovOptions::default()).unwrap();
        assert_eq!(s.iterations, 0);
        assert!(x.iter().all(|&v| v == 0.0));
    }
}
