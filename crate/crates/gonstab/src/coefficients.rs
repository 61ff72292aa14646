//! Scalar coefficients of the (1+n)-gon central configuration: ring
//! distances, the trigonometric mode sums P_l, S_l, Q_l, and the derived
//! per-mode and global block scalars.

use crate::error::{Error, Result};
use crate::scenario::{Scenario, MAX_RING_SIZE};
use serde::Serialize;

/// Pairwise (tree) accumulation. The sums here have at most n-1 terms of
/// one magnitude scale, so this is plenty; it keeps rounding growth
/// logarithmic for very large rings.
pub(crate) fn pairwise_sum(values: &mut [f64]) -> f64 {
    let mut len = values.len();
    if len == 0 {
        return 0.0;
    }
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            values[i] = values[2 * i] + values[2 * i + 1];
        }
        if len % 2 == 1 {
            values[half] = values[len - 1];
            len = half + 1;
        } else {
            len = half;
        }
    }
    values[0]
}

fn sum_over_ring(n: usize, term: impl Fn(usize) -> f64) -> f64 {
    let mut terms: Vec<f64> = (1..n).map(term).collect();
    pairwise_sum(&mut terms)
}

fn check_ring_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("ring size n = {n} must be >= 2")));
    }
    if n > MAX_RING_SIZE {
        return Err(Error::domain(format!(
            "ring size n = {n} exceeds cap {MAX_RING_SIZE}"
        )));
    }
    Ok(())
}

/// Distance from ring vertex n (at angle 2*pi) to vertex j on the unit
/// circle: `2 sin(pi j / n)`.
pub fn pairwise_distance(n: usize, j: usize) -> Result<f64> {
    check_ring_size(n)?;
    if j < 1 || j >= n {
        return Err(Error::domain(format!(
            "vertex offset j = {j} out of range 1..={}",
            n - 1
        )));
    }
    Ok(2.0 * (std::f64::consts::PI * j as f64 / n as f64).sin())
}

/// Ring potential constant `sigma_n = (1/2) sum_{i=1}^{n-1} csc(pi i / n)`.
pub fn sigma_n(n: usize) -> Result<f64> {
    check_ring_size(n)?;
    Ok(0.5 * sum_over_ring(n, |i| 1.0 / (std::f64::consts::PI * i as f64 / n as f64).sin()))
}

/// The three trigonometric sums of mode `l`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrigSums {
    pub p: f64,
    pub s: f64,
    pub q: f64,
}

/// Mode sums over the ring,
/// `P_l = sum (1 - cos(theta_jl) cos(theta_j)) / (2 d_nj^3)` and the
/// analogous S_l (sine product) and Q_l (cosine difference), with
/// `theta_j = 2 pi j / n`, `theta_jl = 2 pi j l / n`.
pub fn trig_sums(n: usize, l: usize) -> Result<TrigSums> {
    check_ring_size(n)?;
    if l < 1 || l > n / 2 {
        return Err(Error::domain(format!(
            "mode l = {l} out of range 1..={} for n = {n}",
            n / 2
        )));
    }
    let nf = n as f64;
    let weight = |j: usize| {
        let d = 2.0 * (std::f64::consts::PI * j as f64 / nf).sin();
        1.0 / (2.0 * d * d * d)
    };
    let theta = |j: usize| 2.0 * std::f64::consts::PI * j as f64 / nf;
    // theta_jl reduced mod 2*pi before evaluation to keep the argument small
    let theta_l = |j: usize| 2.0 * std::f64::consts::PI * ((j * l) % n) as f64 / nf;
    let p = sum_over_ring(n, |j| (1.0 - theta_l(j).cos() * theta(j).cos()) * weight(j));
    let s = sum_over_ring(n, |j| theta_l(j).sin() * theta(j).sin() * weight(j));
    let q = sum_over_ring(n, |j| (theta(j).cos() - theta_l(j).cos()) * weight(j));
    Ok(TrigSums { p, s, q })
}

/// Which modes enter the Q maximum. Both ranges occur in the large-mass
/// bounds; the default covers every non-principal mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMaxRange {
    /// All modes 2..=floor(n/2).
    AllBlocks,
    /// Modes 2..=floor((n-1)/2), excluding the half mode of even n.
    ExcludeHalfMode,
}

/// `max Q_l` over the given mode range; 0 when the range is empty (n <= 3
/// for AllBlocks), so downstream thresholds degrade gracefully.
pub fn q_max(n: usize, range: QMaxRange) -> Result<f64> {
    check_ring_size(n)?;
    let hi = match range {
        QMaxRange::AllBlocks => n / 2,
        QMaxRange::ExcludeHalfMode => (n - 1) / 2,
    };
    let mut max = 0.0f64;
    for l in 2..=hi {
        max = max.max(trig_sums(n, l)?.q);
    }
    Ok(max)
}

/// Mode-independent scalars of one scenario.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GlobalCoefficients {
    pub sigma_n: f64,
    /// Central-configuration multiplier, `lambda = sigma_n / 2 + m`.
    pub lambda: f64,
    /// `min(2 P_1, n/2)`.
    pub d_check: f64,
    /// `max(2 P_1, n/2)`.
    pub d_hat: f64,
    /// `max Q_l` over modes 2..=floor(n/2); 0 when that range is empty.
    pub q_max: f64,
    /// Kepler-block scalar `a_0 = sigma_n + 2 m`.
    pub a0: f64,
    /// Kepler-block scalar `b_0 = -sigma_n / 2 - m`.
    pub b0: f64,
}

pub fn global_coefficients(scenario: &Scenario) -> Result<GlobalCoefficients> {
    let n = scenario.n;
    let m = scenario.m;
    let sigma = sigma_n(n)?;
    let two_p1 = 2.0 * trig_sums(n, 1)?.p;
    let half_n = n as f64 / 2.0;
    Ok(GlobalCoefficients {
        sigma_n: sigma,
        lambda: 0.5 * sigma + m,
        d_check: two_p1.min(half_n),
        d_hat: two_p1.max(half_n),
        q_max: q_max(n, QMaxRange::AllBlocks)?,
        a0: sigma + 2.0 * m,
        b0: -0.5 * sigma - m,
    })
}

/// Scalars of one reduced mode.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlockCoefficients {
    pub l: usize,
    pub p: f64,
    pub s: f64,
    pub q: f64,
    /// `a_l = P_l - 3 Q_l + 2 m`.
    pub a: f64,
    /// `b_l = P_l + 3 Q_l - m`.
    pub b: f64,
}

pub fn block_coefficients(scenario: &Scenario, l: usize) -> Result<BlockCoefficients> {
    scenario.check_mode(l)?;
    let sums = trig_sums(scenario.n, l)?;
    let m = scenario.m;
    Ok(BlockCoefficients {
        l,
        p: sums.p,
        s: sums.s,
        q: sums.q,
        a: sums.p - 3.0 * sums.q + 2.0 * m,
        b: sums.p + 3.0 * sums.q - m,
    })
}

/// Residuals and inequality flags for the closed-form identities relating
/// the ring sums.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConsistencyReport {
    /// `|2 P_1 - sigma_n + (1/2) cot(pi / 2n)|`.
    pub p1_identity_residual: f64,
    /// `4 d_check >= sigma_n`.
    pub four_dcheck_ge_sigma: bool,
    /// `(4/3) d_check + (2/3) sigma_n > n`.
    pub escape_inequality: bool,
    /// Partial harmonic sum `sum_{i=1}^{floor(n/2)-1} 1/(pi i)`, reported
    /// for n >= 28 where it certifies the large-ring bound.
    pub harmonic_partial: Option<f64>,
}

pub fn consistency_identities(n: usize) -> Result<ConsistencyReport> {
    if n < 3 {
        return Err(Error::domain(format!("n = {n} must be >= 3")));
    }
    check_ring_size(n)?;
    let sigma = sigma_n(n)?;
    let two_p1 = 2.0 * trig_sums(n, 1)?.p;
    let cot = 1.0 / (std::f64::consts::PI / (2.0 * n as f64)).tan();
    let d_check = two_p1.min(n as f64 / 2.0);
    let harmonic_partial = if n >= 28 {
        let mut terms: Vec<f64> = (1..n / 2)
            .map(|i| 1.0 / (std::f64::consts::PI * i as f64))
            .collect();
        Some(pairwise_sum(&mut terms))
    } else {
        None
    };
    Ok(ConsistencyReport {
        p1_identity_residual: (two_p1 - sigma + 0.5 * cot).abs(),
        four_dcheck_ge_sigma: 4.0 * d_check >= sigma,
        escape_inequality: 4.0 / 3.0 * d_check + 2.0 / 3.0 * sigma > n as f64,
        harmonic_partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distances() {
        // diameter of the unit circle
        assert_abs_diff_eq!(pairwise_distance(4, 2).unwrap(), 2.0, epsilon = 1e-15);
        // direct norms of the vertex differences
        let norm = |n: usize, j: usize| {
            let t = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (xa, ya) = (t(n).cos(), t(n).sin());
            let (xb, yb) = (t(j).cos(), t(j).sin());
            ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt()
        };
        assert_abs_diff_eq!(pairwise_distance(4, 1).unwrap(), norm(4, 1), epsilon = 1e-14);
        assert_abs_diff_eq!(pairwise_distance(4, 1).unwrap(), 1.41421356, epsilon = 1e-8);
        assert_abs_diff_eq!(pairwise_distance(6, 2).unwrap(), norm(6, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(pairwise_distance(6, 2).unwrap(), 1.73205081, epsilon = 1e-8);
        assert!(pairwise_distance(4, 0).is_err());
        assert!(pairwise_distance(4, 4).is_err());
    }

    #[test]
    fn sigma_values() {
        assert_abs_diff_eq!(sigma_n(2).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma_n(4).unwrap(), 1.9142, epsilon = 5e-5);
        assert_abs_diff_eq!(sigma_n(27).unwrap(), 29.4038, epsilon = 5e-5);
    }

    #[test]
    fn sigma_monotone() {
        let mut prev = sigma_n(2).unwrap();
        for n in 3..=64 {
            let s = sigma_n(n).unwrap();
            assert!(s > prev, "sigma not increasing at n = {n}");
            prev = s;
        }
    }

    #[test]
    fn trig_sum_values() {
        let t = trig_sums(3, 1).unwrap();
        assert_abs_diff_eq!(t.p, 0.144338, epsilon = 1e-6);
        assert_abs_diff_eq!(t.s, 0.144338, epsilon = 1e-6);
        assert_abs_diff_eq!(t.q, 0.0, epsilon = 1e-15);
        // P_1 / 2 is the published lower instability endpoint for n = 3
        assert_abs_diff_eq!(t.p / 2.0, 0.0722, epsilon = 5e-5);

        let t = trig_sums(4, 2).unwrap();
        assert_abs_diff_eq!(t.p, 0.478553, epsilon = 1e-6);
        assert_abs_diff_eq!(t.q, 0.228553, epsilon = 1e-6);
    }

    #[test]
    fn principal_mode_structure() {
        // l = 1 forces Q = 0 and P = S
        for n in 2..=64 {
            let t = trig_sums(n, 1).unwrap();
            assert!(t.q.abs() <= 1e-12, "Q_1 = {} at n = {n}", t.q);
            assert!((t.p - t.s).abs() <= 1e-12, "P_1 != S_1 at n = {n}");
        }
    }

    #[test]
    fn higher_mode_structure() {
        for n in 4..=64 {
            for l in 2..=n / 2 {
                let t = trig_sums(n, l).unwrap();
                assert!(t.p >= t.s - 1e-12, "P_{l} < S_{l} at n = {n}");
                assert!(t.q > 0.0, "Q_{l} <= 0 at n = {n}");
            }
        }
    }

    #[test]
    fn p1_identity() {
        // 2 P_1 = sigma_n - (1/2) cot(pi / 2n)
        for n in 3..=64 {
            let r = consistency_identities(n).unwrap();
            assert!(
                r.p1_identity_residual <= 1e-10,
                "identity residual {} at n = {n}",
                r.p1_identity_residual
            );
        }
        // spot value: 2 P_1 at n = 8 against the sigma row
        let two_p1 = 2.0 * trig_sums(8, 1).unwrap().p;
        let expect = sigma_n(8).unwrap() - 0.5 / (std::f64::consts::PI / 16.0).tan();
        assert_abs_diff_eq!(two_p1, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(trig_sums(8, 1).unwrap().p, 1.54804, epsilon = 1e-5);
    }

    #[test]
    fn inequality_ranges() {
        for n in 9..=27 {
            let r = consistency_identities(n).unwrap();
            assert!(r.four_dcheck_ge_sigma && r.escape_inequality, "n = {n}");
        }
        let r = consistency_identities(8).unwrap();
        assert!(!(r.four_dcheck_ge_sigma && r.escape_inequality));
        let r = consistency_identities(28).unwrap();
        assert_abs_diff_eq!(r.harmonic_partial.unwrap(), 1.0123, epsilon = 5e-5);
        assert!(r.harmonic_partial.unwrap() >= 1.0);
    }

    #[test]
    fn global_values() {
        let g = global_coefficients(&Scenario::circular(4, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(g.d_check, 0.7072, epsilon = 1e-4);
        assert_abs_diff_eq!(g.d_check, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        let g = global_coefficients(&Scenario::circular(12, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(g.d_check, 6.0, epsilon = 1e-12);
        assert!(g.d_hat > 6.0);
        let g = global_coefficients(&Scenario::circular(3, 1.0).unwrap()).unwrap();
        // sigma_3 = 2 / sqrt(3)
        assert_abs_diff_eq!(g.sigma_n, 2.0 / 3.0f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(g.lambda, 1.57735, epsilon = 1e-5);
        // q_max over an empty mode range
        assert_eq!(g.q_max, 0.0);
        // a0 = -2 b0
        assert_abs_diff_eq!(g.a0, -2.0 * g.b0, epsilon = 1e-14);
    }

    #[test]
    fn block_values() {
        let s = Scenario::circular(4, 0.0).unwrap();
        let b = block_coefficients(&s, 2).unwrap();
        assert_abs_diff_eq!(b.a, -0.207106, epsilon = 1e-6);
        assert_abs_diff_eq!(b.b, 1.164214, epsilon = 1e-6);

        let s = Scenario::circular(4, 10.0).unwrap();
        let b = block_coefficients(&s, 2).unwrap();
        assert_abs_diff_eq!(b.a + b.b, 10.957107, epsilon = 1e-6);
        assert!(block_coefficients(&s, 3).is_err());
    }

    #[test]
    fn block_linear_identities() {
        for n in [3usize, 4, 7, 12, 31] {
            for m in [0.0, 0.5, 10.0] {
                let s = Scenario::circular(n, m).unwrap();
                for l in 1..=n / 2 {
                    let b = block_coefficients(&s, l).unwrap();
                    let scale = 1.0 + b.a.abs() + b.b.abs();
                    assert!((b.a + b.b - (2.0 * b.p + m)).abs() <= 1e-12 * scale);
                    assert!((b.a - b.b - 3.0 * (m - 2.0 * b.q)).abs() <= 1e-12 * scale);
                    if l == 1 {
                        assert!((b.a - b.b - 3.0 * m).abs() <= 1e-12 * scale);
                    }
                }
            }
        }
    }
}
