//! Eigenvalues of small dense real matrices (dimension <= 8) through the
//! characteristic polynomial: Faddeev-LeVerrier coefficients, simultaneous
//! (Durand-Kerner) root iteration, and a Newton polish per root. For
//! symplectic 4x4 matrices the palindromic reduction to a quadratic in
//! lambda + 1/lambda serves as an independent cross-check.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Monic characteristic polynomial coefficients `[c_0, c_1, ..., c_{n-1}]`
/// so that `p(x) = x^n + c_{n-1} x^{n-1} + ... + c_0`.
pub fn characteristic_polynomial(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let mut coeffs = vec![0.0; n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut c_prev = 1.0; // coefficient of x^n
    for k in 1..=n {
        // M_k = A (M_{k-1} + c_{n-k+1} I)
        for i in 0..n {
            m[(i, i)] += c_prev;
        }
        m = a * m;
        let c = -m.trace() / k as f64;
        coeffs[n - k] = c;
        c_prev = c;
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // returns (p(z), p'(z)) for the monic polynomial
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of the monic polynomial with the given low-order
/// coefficients, via Durand-Kerner iteration plus one Newton polish.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Cauchy-style radius bound
    let radius = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            // non-symmetric start angles avoid stalls on real-symmetric spectra
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(0.5 * radius.max(1e-3), angle)
        })
        .collect();

    let mut converged = false;
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, _) = horner(coeffs, roots[i]);
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let step = p / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius {
            converged = true;
            break;
        }
    }
    if !converged {
        // accept if residuals are already small; fail otherwise
        let worst = roots
            .iter()
            .map(|&r| horner(coeffs, r).0.norm())
            .fold(0.0f64, f64::max);
        if worst > 1e-8 * radius.powi(n as i32) {
            return Err(Error::ConvergenceFailure(format!(
                "root iteration stalled, residual {worst:.3e}"
            )));
        }
    }
    for r in roots.iter_mut() {
        let (p, dp) = horner(coeffs, *r);
        if dp.norm() > 1e-100 {
            let step = p / dp;
            if step.norm() < 1e-2 * (1.0 + r.norm()) {
                *r -= step;
            }
        }
    }
    Ok(roots)
}

/// Eigenvalues of a small real matrix (n <= 8).
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n > 8 {
        return Err(Error::domain(format!(
            "characteristic-polynomial eigenvalues limited to n <= 8, got {n}"
        )));
    }
    // scale to unit norm for conditioning, undo afterwards
    let scale = a.abs().max().max(1e-300);
    let scaled = a / scale;
    let coeffs = characteristic_polynomial(&scaled);
    let roots = polynomial_roots(&coeffs)?;
    Ok(roots.into_iter().map(|r| r * scale).collect())
}

/// Split one `mu = lambda + 1/lambda` root back into its multiplier pair,
/// keeping the pair exactly on the unit circle (real mu, |mu| <= 2) or
/// exactly reciprocal-real (real mu, |mu| > 2) by construction.
fn trace_pair_to_multipliers(mu: Complex64) -> [Complex64; 2] {
    let real_like = mu.im.abs() <= 1e-8 * (1.0 + mu.norm());
    if real_like {
        let m = mu.re;
        if m.abs() <= 2.0 {
            let half = 0.5 * m;
            let s = (1.0 - half * half).max(0.0).sqrt();
            return [Complex64::new(half, s), Complex64::new(half, -s)];
        }
        let half = 0.5 * m;
        let root = (half * half - 1.0).sqrt();
        // order so the larger-magnitude multiplier comes first
        let big = half + half.signum() * root;
        return [Complex64::new(big, 0.0), Complex64::new(1.0 / big, 0.0)];
    }
    let half = mu * 0.5;
    let root = (half * half - 1.0).sqrt();
    [half + root, half - root]
}

/// Multiplier set of a symplectic matrix of dimension 2, 4 or 8 through
/// the palindromic substitution `mu = lambda + 1/lambda`. The reciprocal
/// structure of the characteristic polynomial is enforced before the
/// reduction, so clustered unit multipliers do not smear off the circle
/// the way plain polynomial roots do.
pub fn symplectic_multipliers(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if !(n == 2 || n == 4 || n == 8) || a.ncols() != n {
        return Err(Error::domain(
            "palindromic reduction handles square dimensions 2, 4 and 8",
        ));
    }
    let coeffs = characteristic_polynomial(a);
    let scale = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    // reciprocity defect: c_k vs c_{n-k} with c_n = 1
    let mut defect = (coeffs[0] - 1.0).abs();
    for k in 1..n {
        defect = defect.max((coeffs[k] - coeffs[n - k]).abs());
    }
    if defect > 1e-6 * scale {
        return Err(Error::PropertyViolation(format!(
            "characteristic polynomial not reciprocal (defect {defect:.3e}); matrix not symplectic?"
        )));
    }
    // symmetrized low-order coefficients c_1..c_{n/2}
    let sym = |k: usize| 0.5 * (coeffs[n - k] + coeffs[k]);
    let mu_roots: Vec<Complex64> = match n {
        2 => vec![Complex64::new(-sym(1), 0.0)],
        4 => {
            let b = sym(1);
            let c = sym(2) - 2.0;
            let disc = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
            vec![
                (Complex64::new(-b, 0.0) + disc) * 0.5,
                (Complex64::new(-b, 0.0) - disc) * 0.5,
            ]
        }
        8 => {
            // p(x)/x^4 in the mu basis: powers x^k + x^{-k} reduce to
            // mu^4 - 4 mu^2 + 2, mu^3 - 3 mu, mu^2 - 2, mu
            let (c7, c6, c5, c4) = (sym(1), sym(2), sym(3), coeffs[4]);
            let quartic = [c4 - 2.0 * c6 + 2.0, c5 - 3.0 * c7, c6 - 4.0, c7];
            polynomial_roots(&quartic)?
        }
        _ => unreachable!(),
    };
    let mut out = Vec::with_capacity(n);
    for mu in mu_roots {
        out.extend(trace_pair_to_multipliers(mu));
    }
    Ok(out)
}

/// Greedy matching distance between two multisets of complex numbers.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut remaining: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, &y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("nonempty");
        worst = worst.max(dist);
        remaining.swap_remove(idx);
    }
    worst
}

/// Greedy matching with per-element relative measure
/// `|x - y| / (1 + |x|)`.
pub fn multiset_distance_relative(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut remaining: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, &y)| (i, (x - y).norm() / (1.0 + x.norm())))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("nonempty");
        worst = worst.max(dist);
        remaining.swap_remove(idx);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn char_poly_2x2() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        // x^2 - 5x - 2
        let c = characteristic_polynomial(&a);
        assert_abs_diff_eq!(c[1], -5.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c[0], -2.0, epsilon = 1e-13);
    }

    #[test]
    fn eigenvalues_known() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert_abs_diff_eq!(ev[0].im, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1].im, 1.0, epsilon = 1e-12);

        // diagonal with repeated entries
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 2.0, -1.0, 0.5]));
        let ev = eigenvalues(&a).unwrap();
        let expect = [
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.0),
        ];
        assert!(multiset_distance(&ev, &expect) < 1e-7);
    }

    #[test]
    fn random_matrices_match_nalgebra_complex_modulus() {
        // cross-check |eigenvalues| against singular-value-based bounds on
        // random symmetric matrices where the spectrum is real
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..=8);
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v: f64 = rng.gen_range(-2.0..2.0);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let mut got: Vec<f64> = eigenvalues(&a)
                .unwrap()
                .into_iter()
                .map(|z| {
                    assert!(z.im.abs() < 1e-6, "symmetric matrix produced complex eigenvalue");
                    z.re
                })
                .collect();
            got.sort_by(f64::total_cmp);
            let mut expect: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
            expect.sort_by(f64::total_cmp);
            for (g, e) in got.iter().zip(&expect) {
                assert_abs_diff_eq!(g, e, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn palindromic_reduction_agrees() {
        // a symplectic 4x4: rotation diamond hyperbolic block
        let t = 0.9f64;
        let (c, s) = (t.cos(), t.sin());
        let (lam, ilam) = (1.7f64, 1.0 / 1.7);
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                c, 0.0, -s, 0.0, //
                0.0, lam, 0.0, 0.0, //
                s, 0.0, c, 0.0, //
                0.0, 0.0, 0.0, ilam,
            ],
        );
        let direct = eigenvalues(&a).unwrap();
        let reduced = symplectic_multipliers(&a).unwrap();
        assert!(multiset_distance(&direct, &reduced) < 1e-8);
    }

    #[test]
    fn palindromic_multipliers_match_qr_reference() {
        // random symplectic matrices built as exponentials of Hamiltonian
        // generators; compare against the QR eigensolver
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for &d in &[1usize, 2, 4] {
            for _ in 0..10 {
                let n = 2 * d;
                let mut sym = DMatrix::<f64>::zeros(n, n);
                for i in 0..n {
                    for j in 0..=i {
                        let v: f64 = rng.gen_range(-0.8..0.8);
                        sym[(i, j)] = v;
                        sym[(j, i)] = v;
                    }
                }
                let mut j_std = DMatrix::<f64>::zeros(n, n);
                for i in 0..d {
                    j_std[(i, d + i)] = -1.0;
                    j_std[(d + i, i)] = 1.0;
                }
                let gamma = crate::expm::expm(&(&j_std * &sym));
                let pal = symplectic_multipliers(&gamma).unwrap();
                let qr: Vec<Complex64> = gamma.complex_eigenvalues().iter().copied().collect();
                assert!(
                    multiset_distance_relative(&pal, &qr) < 1e-7,
                    "d = {d}: {:?} vs {:?}",
                    pal,
                    qr
                );
            }
        }
    }

    #[test]
    fn clustered_unit_multipliers_stay_on_circle() {
        // two rotation pairs with nearly equal small angles: plain
        // polynomial roots smear these off the circle, the palindromic
        // route must not
        let (t1, t2) = (0.010f64, 0.012f64);
        let rot = |t: f64| {
            DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
        };
        let gamma = crate::blocks::symplectic_sum(&[rot(t1), rot(t2)]);
        let mults = symplectic_multipliers(&gamma).unwrap();
        for z in &mults {
            assert!((z.norm() - 1.0).abs() < 1e-12, "|{z}| off circle");
        }
        let mut angles: Vec<f64> = mults.iter().map(|z| z.arg().abs()).collect();
        angles.sort_by(f64::total_cmp);
        assert!((angles[0] - t1).abs() < 1e-9);
        assert!((angles[3] - t2).abs() < 1e-9);
    }
}
