//! Thin wrapper over matrixmultiply's complex gemm for the hot paths in
//! the master-equation right-hand side. nalgebra's generic complex matmul
//! is too slow for repeated 80x80 products inside an adaptive integrator.

use matrixmultiply::{zgemm, CGemmOption};

use crate::{C64, CMatrix};

/// c = alpha * a * b + beta * c
pub(crate) fn gemm_acc(alpha: C64, a: &CMatrix, b: &CMatrix, beta: C64, c: &mut CMatrix) {
    let (m, k) = (a.nrows(), a.ncols());
    let n = b.ncols();
    debug_assert_eq!(k, b.nrows());
    debug_assert_eq!((c.nrows(), c.ncols()), (m, n));
    // num_complex::Complex64 is repr(C) [re, im], matching [f64; 2].
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.as_slice().as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_slice().as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [beta.re, beta.im],
            c.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

/// c = a * b
pub(crate) fn gemm(a: &CMatrix, b: &CMatrix, c: &mut CMatrix) {
    gemm_acc(C64::new(1.0, 0.0), a, b, C64::new(0.0, 0.0), c);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::max_abs;

    #[test]
    fn matches_nalgebra_product() {
        let n = 17;
        let a = CMatrix::from_fn(n, n, |i, j| C64::new((i as f64).sin() + j as f64, (j as f64).cos() - i as f64 * 0.1));
        let b = CMatrix::from_fn(n, n, |i, j| C64::new((i * j) as f64 * 0.01, (i + j) as f64 * 0.02 - 0.3));
        let reference = &a * &b;
        let mut c = CMatrix::zeros(n, n);
        gemm(&a, &b, &mut c);
        assert!(max_abs(&(&c - &reference)) < 1e-10);
        // accumulate: c = 2ab - c  -> total = ab
        gemm_acc(C64::new(2.0, 0.0), &a, &b, C64::new(-1.0, 0.0), &mut c);
        assert!(max_abs(&(&c - &reference)) < 1e-10);
    }
}
