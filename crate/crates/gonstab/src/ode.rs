//! Adaptive explicit Runge-Kutta integration for dense matrix-valued
//! linear systems, using the Dormand-Prince 5(4) embedded pair.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights (the first six coincide with the last tableau row).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, Default)]
pub struct IntegrationStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evaluations: usize,
}

/// Integrate `Y' = f(t, Y)` from `t0` to `t1` with adaptive steps.
pub fn integrate_matrix(
    f: &dyn Fn(f64, &DMatrix<f64>) -> DMatrix<f64>,
    t0: f64,
    t1: f64,
    y0: DMatrix<f64>,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(DMatrix<f64>, IntegrationStats)> {
    let span = t1 - t0;
    if span <= 0.0 {
        return Err(Error::domain("integration span must be positive"));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = span / 100.0;
    let h_min = span * 1e-14;
    let max_steps = 2_000_000usize;
    let mut stats = IntegrationStats::default();
    let mut k: Vec<DMatrix<f64>> = Vec::with_capacity(7);

    while t < t1 {
        if stats.steps_accepted + stats.steps_rejected > max_steps {
            return Err(Error::IntegrationFailure(format!(
                "step budget exhausted at t = {t:.6}"
            )));
        }
        if h < h_min {
            return Err(Error::IntegrationFailure(format!(
                "step size collapsed to {h:.3e} at t = {t:.6}"
            )));
        }
        if t + h > t1 {
            h = t1 - t;
        }

        k.clear();
        k.push(f(t, &y));
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[i][j] != 0.0 {
                    yi += kj * (h * A[i][j]);
                }
            }
            k.push(f(t + C[i] * h, &yi));
        }
        stats.rhs_evaluations += 7;

        let mut y5 = y.clone();
        let mut err = DMatrix::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5 += kj * (h * B5[j]);
            }
            let diff = B5[j] - B4[j];
            if diff != 0.0 {
                err += kj * (h * diff);
            }
        }

        // error-per-unit-step control: the budget for this step is the
        // fraction of the whole span it covers, so accepted local errors
        // accumulate to roughly the requested global tolerance
        let scale = abs_tol + rel_tol * y5.abs().max().max(y.abs().max());
        let err_norm = err.abs().max() * span / (h * scale);

        if err_norm <= 1.0 {
            t += h;
            y = y5;
            stats.steps_accepted += 1;
        } else {
            stats.steps_rejected += 1;
        }
        let factor = if err_norm > 0.0 {
            0.85 * err_norm.powf(-0.25)
        } else {
            5.0
        };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scalar_exponential() {
        let f = |_t: f64, y: &DMatrix<f64>| y.clone();
        let y0 = DMatrix::from_element(1, 1, 1.0);
        let (y, _) = integrate_matrix(&f, 0.0, 1.0, y0, 1e-11, 1e-13).unwrap();
        assert_abs_diff_eq!(y[(0, 0)], std::f64::consts::E, epsilon = 1e-10);
    }

    #[test]
    fn rotation_flow() {
        // Y' = J Y over a full period returns to the identity
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let f = move |_t: f64, y: &DMatrix<f64>| &j * y;
        let (y, stats) = integrate_matrix(
            &f,
            0.0,
            2.0 * std::f64::consts::PI,
            DMatrix::identity(2, 2),
            1e-12,
            1e-14,
        )
        .unwrap();
        assert!((y - DMatrix::identity(2, 2)).abs().max() < 1e-10);
        assert!(stats.steps_accepted > 10);
    }

    #[test]
    fn time_dependent_quadrature() {
        // y' = cos t integrated over [0, pi/2]
        let f = |t: f64, _y: &DMatrix<f64>| DMatrix::from_element(1, 1, t.cos());
        let (y, _) = integrate_matrix(
            &f,
            0.0,
            std::f64::consts::FRAC_PI_2,
            DMatrix::zeros(1, 1),
            1e-12,
            1e-14,
        )
        .unwrap();
        assert_abs_diff_eq!(y[(0, 0)], 1.0, epsilon = 1e-11);
    }
}
