//! Floquet analysis of the reduced linear Hamiltonian systems: monodromy
//! matrices over one period of the true anomaly, multiplier sets, Krein
//! signatures of unit multipliers, and stability verdicts.

use crate::blocks::{j_standard, CoefficientPath};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::ode::{integrate_matrix, IntegrationStats};
use crate::scenario::Scenario;
use crate::smalleig::{multiset_distance, symplectic_multipliers};
#[cfg(test)]
use crate::smalleig::{eigenvalues, multiset_distance_relative};
use crate::{blocks, monodromy};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_REL_TOL: f64 = 1e-11;
pub const DEFAULT_TOL_CIRCLE: f64 = 1e-7;
pub const DEFAULT_TOL_SEMISIMPLE: f64 = 1e-7;
const MULTIPLIER_CLUSTER_TOL: f64 = 1e-7;

/// Stability classification of one monodromy matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// All multipliers on the unit circle and semisimple.
    LinearlyStable,
    /// All multipliers on the circle, but some cluster is defective.
    SpectrallyStableNotLinearlyStable,
    /// No multiplier on the unit circle.
    Hyperbolic,
    /// Multipliers both on and off the circle.
    Mixed,
    /// Some multiplier sits at +-1 within tolerance; the verdict is
    /// boundary-degenerate.
    OnBoundary,
}

/// Krein data of one unit-circle multiplier cluster: the signature of the
/// Hermitian form <-i J xi, xi> restricted to the eigenspace.
#[derive(Debug, Clone, Serialize)]
pub struct KreinDatum {
    pub multiplier: (f64, f64),
    pub positive: usize,
    pub negative: usize,
    pub geometric_multiplicity: usize,
    pub algebraic_multiplicity: usize,
}

impl KreinDatum {
    /// Definite means no mixing: robustly elliptic eigenvalue.
    pub fn is_definite(&self) -> bool {
        self.positive == 0 || self.negative == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyReport {
    /// Mode index when this block came from a scenario.
    pub block: Option<usize>,
    #[serde(skip)]
    pub gamma: DMatrix<f64>,
    pub multipliers: Vec<(f64, f64)>,
    pub symplectic_residual: f64,
    pub det_residual: f64,
    /// Multiset distance between the direct multipliers and the
    /// palindromic cross-check, when the block is four-dimensional.
    pub multiplier_cross_residual: Option<f64>,
    pub verdict: Verdict,
    pub krein: Vec<KreinDatum>,
    pub rel_tol: f64,
    pub steps: usize,
}

fn complexify(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

/// det via LU; the matrices here are tiny.
fn determinant(a: &DMatrix<f64>) -> f64 {
    a.clone().lu().determinant()
}

/// Cluster multipliers into groups within a relative tolerance.
fn cluster_multipliers(mults: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &m in mults {
        if let Some((center, count)) = clusters
            .iter_mut()
            .find(|(c, _)| (*c - m).norm() <= tol * (1.0 + c.norm()))
        {
            // running mean keeps the center representative
            *center = (*center * (*count as f64) + m) / (*count as f64 + 1.0);
            *count += 1;
        } else {
            clusters.push((m, 1));
        }
    }
    clusters
}

/// Null space of `gamma - lambda I` by singular value thresholding.
fn eigenspace(gamma: &DMatrix<f64>, lambda: Complex64, tol: f64) -> Vec<DVector<Complex64>> {
    let n = gamma.nrows();
    let shifted = complexify(gamma) - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * smax.max(1.0) {
            basis.push(vt.row(i).adjoint());
        }
    }
    basis
}

/// Kernel dimension of `gamma(2pi) - omega I` by singular-value rank test.
pub fn gamma_nullity(gamma: &DMatrix<f64>, omega: Complex64, tol: f64) -> usize {
    eigenspace(gamma, omega, tol).len()
}

fn krein_signature(
    gamma: &DMatrix<f64>,
    lambda: Complex64,
    alg: usize,
    tol: f64,
) -> KreinDatum {
    let basis = eigenspace(gamma, lambda, tol);
    let geo = basis.len();
    let d = gamma.nrows() / 2;
    let jc = complexify(&j_standard(d));
    // Hermitian Gram matrix of <-i J xi, eta>
    let mut gram = DMatrix::<Complex64>::zeros(geo, geo);
    for (i, vi) in basis.iter().enumerate() {
        for (j, vj) in basis.iter().enumerate() {
            let form = (&jc * vi).scale(1.0);
            // <-i J vi, vj> with the convention <x, y> = y^H x
            gram[(j, i)] = vj.dotc(&(form * Complex64::new(0.0, -1.0)));
        }
    }
    // enforce exact Hermitian symmetry before counting
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = gram.symmetric_eigenvalues();
    let scale = ev.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut pos = 0;
    let mut neg = 0;
    for &v in ev.iter() {
        if v > 1e-8 * scale {
            pos += 1;
        } else if v < -1e-8 * scale {
            neg += 1;
        }
    }
    KreinDatum {
        multiplier: (lambda.re, lambda.im),
        positive: pos,
        negative: neg,
        geometric_multiplicity: geo,
        algebraic_multiplicity: alg,
    }
}

fn classify_gamma(
    gamma: &DMatrix<f64>,
    multipliers: &[Complex64],
    tol_circle: f64,
    tol_semisimple: f64,
) -> (Verdict, Vec<KreinDatum>) {
    let clusters = cluster_multipliers(multipliers, MULTIPLIER_CLUSTER_TOL);
    let mut krein = Vec::new();
    let mut all_on_circle = true;
    let mut none_on_circle = true;
    let mut semisimple = true;
    let mut on_pm_one = false;
    for &(center, alg) in &clusters {
        let on_circle = (center.norm() - 1.0).abs() <= tol_circle;
        if on_circle {
            none_on_circle = false;
            if (center - Complex64::ONE).norm() <= tol_circle
                || (center + Complex64::ONE).norm() <= tol_circle
            {
                on_pm_one = true;
            }
            let datum = krein_signature(gamma, center, alg, tol_semisimple);
            if datum.geometric_multiplicity < alg {
                semisimple = false;
            }
            krein.push(datum);
        } else {
            all_on_circle = false;
        }
    }
    let verdict = if on_pm_one {
        Verdict::OnBoundary
    } else if all_on_circle {
        if semisimple {
            Verdict::LinearlyStable
        } else {
            Verdict::SpectrallyStableNotLinearlyStable
        }
    } else if none_on_circle {
        Verdict::Hyperbolic
    } else {
        Verdict::Mixed
    };
    (verdict, krein)
}

/// Re-classify an existing report under different tolerances.
pub fn classify(
    report: &MonodromyReport,
    tol_circle: f64,
    tol_semisimple: f64,
) -> (Verdict, Vec<KreinDatum>) {
    let mults: Vec<Complex64> = report
        .multipliers
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    classify_gamma(&report.gamma, &mults, tol_circle, tol_semisimple)
}

/// Integrate the fundamental solution of `y' = J B(theta) y` over one
/// period; no spectral analysis, any block dimension.
pub fn integrate_gamma(
    path: &CoefficientPath,
    rel_tol: f64,
) -> Result<(DMatrix<f64>, IntegrationStats)> {
    if !(1e-13..=1e-6).contains(&rel_tol) {
        return Err(Error::domain(format!(
            "rel_tol = {rel_tol:.3e} outside [1e-13, 1e-6]"
        )));
    }
    let d = path.dim();
    let j = j_standard(d);
    let rhs = {
        let path = path.clone();
        let j = j.clone();
        move |theta: f64, y: &DMatrix<f64>| &j * path.b_at(theta) * y
    };
    integrate_matrix(
        &rhs,
        0.0,
        2.0 * std::f64::consts::PI,
        DMatrix::identity(2 * d, 2 * d),
        rel_tol,
        rel_tol * 1e-2,
    )
}

/// Integrate the fundamental solution over one period and analyze it.
pub fn integrate_monodromy(path: &CoefficientPath, rel_tol: f64) -> Result<MonodromyReport> {
    let (gamma, stats) = integrate_gamma(path, rel_tol)?;
    analyze_gamma(gamma, None, rel_tol, stats)
}

fn analyze_gamma(
    gamma: DMatrix<f64>,
    block: Option<usize>,
    rel_tol: f64,
    stats: IntegrationStats,
) -> Result<MonodromyReport> {
    let d = gamma.nrows() / 2;
    let j = j_standard(d);
    let symplectic_residual = (gamma.transpose() * &j * &gamma - &j).abs().max();
    let det_residual = (determinant(&gamma) - 1.0).abs();
    // Multipliers come from the backward-stable Schur route: polynomial
    // roots smear a k-fold cluster by the k-th root of the coefficient
    // rounding, and the palindromic reduction loses near-double trace
    // pairs (almost-colliding rotation angles), both of which occur here
    // at large central mass. The palindromic reduction stays on as a
    // structural cross-check.
    let multipliers: Vec<Complex64> = gamma.complex_eigenvalues().iter().copied().collect();
    let multiplier_cross_residual = symplectic_multipliers(&gamma)
        .ok()
        .map(|pal| multiset_distance(&pal, &multipliers));
    let (verdict, krein) = classify_gamma(
        &gamma,
        &multipliers,
        DEFAULT_TOL_CIRCLE,
        DEFAULT_TOL_SEMISIMPLE,
    );
    Ok(MonodromyReport {
        block,
        multipliers: multipliers.iter().map(|z| (z.re, z.im)).collect(),
        gamma,
        symplectic_residual,
        det_residual,
        multiplier_cross_residual,
        verdict,
        krein,
        rel_tol,
        steps: stats.steps_accepted,
    })
}

/// Closed-form spectrum of the constant-coefficient (e = 0) system matrix
/// `J B` for the two-parameter block: the quadruple
/// `+- sqrt(alpha - 1 +- sqrt(beta^2 - 4 alpha))`.
pub fn e0_spectrum(alpha: f64, beta: f64) -> [Complex64; 4] {
    let inner = Complex64::new(beta * beta - 4.0 * alpha, 0.0).sqrt();
    let base = Complex64::new(alpha - 1.0, 0.0);
    let mu_plus = (base + inner).sqrt();
    let mu_minus = (base - inner).sqrt();
    [mu_plus, -mu_plus, mu_minus, -mu_minus]
}

/// Constant-coefficient monodromy `exp(2 pi J B)`; the independent oracle
/// for e = 0 integrations.
pub fn e0_monodromy(path: &CoefficientPath) -> Result<DMatrix<f64>> {
    if path.e != 0.0 {
        return Err(Error::domain("closed-form monodromy requires e = 0"));
    }
    let d = path.dim();
    let jb = j_standard(d) * path.b_at(0.0);
    Ok(expm(&(jb * (2.0 * std::f64::consts::PI))))
}

/// Overall verdict semantics for a full scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OverallVerdict {
    LinearlyStable,
    Unstable,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct GonVerdict {
    pub scenario: Scenario,
    pub blocks: Vec<MonodromyReport>,
    pub overall: OverallVerdict,
}

/// Integrate every mode of a scenario and combine the verdicts: stable
/// only if every mode is linearly stable; unstable if any mode is
/// hyperbolic or mixed.
pub fn gon_verdict(scenario: &Scenario, rel_tol: f64) -> Result<GonVerdict> {
    let modes: Vec<usize> = (1..=scenario.mode_count()).collect();
    let mut blocks: Vec<MonodromyReport> = modes
        .par_iter()
        .map(|&l| {
            let block = blocks::reduced_block(scenario, l)?;
            let path = CoefficientPath::from_reduced(&block, scenario.e)?;
            let mut report = monodromy::integrate_monodromy(&path, rel_tol).map_err(|e| {
                Error::IntegrationFailure(format!("block {l}: {e}"))
            })?;
            report.block = Some(l);
            Ok(report)
        })
        .collect::<Result<_>>()?;
    blocks.sort_by_key(|r| r.block);
    let overall = if blocks.iter().all(|r| r.verdict == Verdict::LinearlyStable) {
        OverallVerdict::LinearlyStable
    } else if blocks
        .iter()
        .any(|r| matches!(r.verdict, Verdict::Hyperbolic | Verdict::Mixed))
    {
        OverallVerdict::Unstable
    } else {
        OverallVerdict::Indeterminate
    };
    Ok(GonVerdict {
        scenario: *scenario,
        blocks,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{reduced_block, symplectic_sum, TwoParamBlock};
    use approx::assert_abs_diff_eq;

    fn two_param_path(alpha: f64, beta: f64, e: f64) -> CoefficientPath {
        CoefficientPath::from_two_param(&TwoParamBlock::new(alpha, beta), e).unwrap()
    }

    #[test]
    fn e0_spectrum_values() {
        let s = e0_spectrum(0.5, 1.5);
        // {0, 0, +i, -i}
        let mut abs_im: Vec<f64> = s.iter().map(|z| z.im).collect();
        abs_im.sort_by(f64::total_cmp);
        assert!(s.iter().all(|z| z.re.abs() < 1e-12));
        assert_abs_diff_eq!(abs_im[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(abs_im[3], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(abs_im[1], 0.0, epsilon = 1e-12);

        let s = e0_spectrum(0.0, 0.0);
        for z in s {
            assert_abs_diff_eq!(z.im.abs(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-12);
        }

        // beta < 2 sqrt(alpha): no purely imaginary exponent, hyperbolic
        let s = e0_spectrum(2.0, 0.0);
        for z in s {
            assert!(z.re.abs() > 0.1, "{z}");
        }
        let inner = Complex64::new(-8.0f64, 0.0).sqrt();
        let expect = (Complex64::new(1.0, 0.0) + inner).sqrt();
        assert!(s.iter().any(|z| (z - expect).norm() < 1e-12));
    }

    #[test]
    fn kepler_block_unit_multiplier_multiplicity() {
        // e = 0 at (1/2, 3/2): gamma(2pi) has eigenvalue 1 with geometric
        // multiplicity 3 and algebraic multiplicity 4. The defective
        // eigenvalue is square-root sensitive, so the multiplier values
        // are only accurate to about sqrt(integration error); the rank
        // test below is the robust statement.
        let report = integrate_monodromy(&two_param_path(0.5, 1.5, 0.0), 1e-11).unwrap();
        for &(re, im) in &report.multipliers {
            assert_abs_diff_eq!(re, 1.0, epsilon = 1e-4);
            assert_abs_diff_eq!(im, 0.0, epsilon = 1e-4);
        }
        let nullity = gamma_nullity(&report.gamma, Complex64::ONE, 1e-7);
        assert_eq!(nullity, 3);
    }

    #[test]
    fn integration_matches_exponential_oracle() {
        for (alpha, beta) in [(0.3, 0.4), (1.5, 2.0), (2.5, 0.1), (0.0, 1.0)] {
            let path = two_param_path(alpha, beta, 0.0);
            let report = integrate_monodromy(&path, 1e-11).unwrap();
            let oracle = e0_monodromy(&path).unwrap();
            assert!(
                (&report.gamma - &oracle).abs().max() <= 1e-8,
                "alpha={alpha} beta={beta}"
            );
        }
    }

    #[test]
    fn symplectic_residual_and_determinant() {
        // one mildly hyperbolic and one elliptic block; strongly
        // hyperbolic blocks push the fundamental solution norm so high
        // that rounding alone dominates the raw residual
        for (alpha, beta, e) in [(0.5, 1.3, 0.65), (0.8, 1.1, 0.4)] {
            let report = integrate_monodromy(&two_param_path(alpha, beta, e), 1e-11).unwrap();
            assert!(report.symplectic_residual <= 1e-9, "{}", report.symplectic_residual);
            assert!(report.det_residual <= 1e-9);
            if let Some(res) = report.multiplier_cross_residual {
                assert!(res < 1e-6, "palindromic cross-check {res}");
            }
        }
    }

    #[test]
    fn multiplier_symmetry_under_conjugation_and_inversion() {
        for (alpha, beta, e) in [(0.8, 1.1, 0.4), (0.5, 1.3, 0.7), (0.1, 0.9, 0.2)] {
            let report = integrate_monodromy(&two_param_path(alpha, beta, e), 1e-11).unwrap();
            let mults: Vec<Complex64> = report
                .multipliers
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect();
            let conjugated: Vec<Complex64> = mults.iter().map(|z| z.conj()).collect();
            let inverted: Vec<Complex64> = mults.iter().map(|z| 1.0 / z).collect();
            assert!(multiset_distance_relative(&mults, &conjugated) < 1e-7);
            assert!(multiset_distance_relative(&mults, &inverted) < 1e-7);
        }
    }

    #[test]
    fn classify_synthetic_matrices() {
        // rotation by 2.0: linearly stable
        let t = 2.0f64;
        let rot = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let mults = eigenvalues(&rot).unwrap();
        let (verdict, krein) = classify_gamma(&rot, &mults, 1e-7, 1e-7);
        assert_eq!(verdict, Verdict::LinearlyStable);
        assert!(krein.iter().all(|k| k.is_definite()));

        // diag(2, 1/2): hyperbolic
        let hyp = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let mults = eigenvalues(&hyp).unwrap();
        let (verdict, _) = classify_gamma(&hyp, &mults, 1e-7, 1e-7);
        assert_eq!(verdict, Verdict::Hyperbolic);

        // mixed: rotation diamond hyperbolic
        let mixed = symplectic_sum(&[rot.clone(), hyp.clone()]);
        let mults = eigenvalues(&mixed).unwrap();
        let (verdict, _) = classify_gamma(&mixed, &mults, 1e-7, 1e-7);
        assert_eq!(verdict, Verdict::Mixed);
    }

    #[test]
    fn hyperbolic_block_inside_published_interval() {
        // (1+4)-gon with small central mass: the principal mode is
        // hyperbolic for every eccentricity
        let s = Scenario::new(4, 0.1, 0.3).unwrap();
        let block = reduced_block(&s, 1).unwrap();
        let path = CoefficientPath::from_reduced(&block, s.e).unwrap();
        let report = integrate_monodromy(&path, 1e-11).unwrap();
        assert_eq!(report.verdict, Verdict::Hyperbolic);
    }

    #[test]
    fn scenario_verdicts() {
        // heavy center, moderately eccentric: every block stable
        let v = gon_verdict(&Scenario::new(10, 1e4, 0.5).unwrap(), 1e-11).unwrap();
        assert_eq!(v.overall, OverallVerdict::LinearlyStable);
        assert_eq!(v.blocks.len(), 5);

        // light center: principal mode hyperbolic
        let v = gon_verdict(&Scenario::new(3, 0.05, 0.7).unwrap(), 1e-11).unwrap();
        assert_eq!(v.overall, OverallVerdict::Unstable);
        assert_eq!(v.blocks[0].verdict, Verdict::Hyperbolic);

        // published interval for the second mode of the pentagon
        let v = gon_verdict(&Scenario::new(5, 0.28, 0.4).unwrap(), 1e-11).unwrap();
        assert_eq!(v.blocks[1].verdict, Verdict::Hyperbolic);
    }

    #[test]
    fn full_system_monodromy_factorizes() {
        // gamma of the direct-sum system equals the symplectic sum of the
        // per-mode gammas
        let s = Scenario::new(5, 0.3, 0.45).unwrap();
        let full = crate::blocks::assemble_full(&s).unwrap();
        let full_path = CoefficientPath::new(full.r.clone(), s.e).unwrap();
        let (full_gamma, _) = integrate_gamma(&full_path, 1e-12).unwrap();
        let parts: Vec<DMatrix<f64>> = (1..=s.mode_count())
            .map(|l| {
                let path =
                    CoefficientPath::from_reduced(&reduced_block(&s, l).unwrap(), s.e).unwrap();
                integrate_monodromy(&path, 1e-12).unwrap().gamma
            })
            .collect();
        let interleaved = symplectic_sum(&parts);
        assert!((full_gamma - interleaved).abs().max() < 1e-8);
    }

    #[test]
    fn rejects_bad_rel_tol() {
        let path = two_param_path(0.5, 1.5, 0.0);
        assert!(integrate_monodromy(&path, 1e-5).is_err());
        assert!(integrate_monodromy(&path, 1e-14).is_err());
    }
}
