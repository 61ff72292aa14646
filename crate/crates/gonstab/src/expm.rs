//! Matrix exponential by scaling and squaring with a Taylor kernel.
//! Used as the closed-form oracle for constant-coefficient (e = 0)
//! fundamental solutions, so it deliberately shares nothing with the
//! adaptive integrator.

use nalgebra::DMatrix;

/// `exp(A)` for a dense real matrix.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let norm = a.abs().max() * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);

    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.abs().max() < 1e-18 * result.abs().max() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scalar_and_rotation() {
        let a = DMatrix::from_element(1, 1, 1.0);
        assert_abs_diff_eq!(expm(&a)[(0, 0)], std::f64::consts::E, epsilon = 1e-14);

        let t = 1.3f64;
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&j);
        assert_abs_diff_eq!(e[(0, 0)], t.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)], t.sin(), epsilon = 1e-14);
    }

    #[test]
    fn inverse_property() {
        let a = DMatrix::from_row_slice(3, 3, &[0.3, 1.0, -0.2, 0.0, -0.5, 0.7, 0.4, 0.0, 0.1]);
        let e = expm(&a);
        let einv = expm(&(-&a));
        assert!((e * einv - DMatrix::identity(3, 3)).abs().max() < 1e-13);
    }
}
