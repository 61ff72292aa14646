//! Reduced coefficient blocks of the linearized ring system: the
//! closed-form mode matrices U(l), the normalized blocks R_l = I + U(l)/lambda,
//! the two-parameter comparison family R_{alpha,beta}, and the periodic
//! Hamiltonian coefficient paths B(theta) they generate.

use crate::coefficients::{block_coefficients, global_coefficients, trig_sums};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

/// 2x2 rotation generator [[0,-1],[1,0]].
pub fn j2() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Block-diagonal copy of j2 acting on d coordinates (d even).
pub fn j_planar(d: usize) -> DMatrix<f64> {
    assert!(d % 2 == 0, "planar rotation needs even dimension");
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d / 2 {
        m[(2 * b, 2 * b + 1)] = -1.0;
        m[(2 * b + 1, 2 * b)] = 1.0;
    }
    m
}

/// Standard symplectic structure [[0,-I],[I,0]] on 2d coordinates.
pub fn j_standard(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m[(i, d + i)] = -1.0;
        m[(d + i, i)] = 1.0;
    }
    m
}

/// Kepler-mode matrix `U(0) = diag(a0, b0)`.
pub fn u_kepler(n: usize, m: f64) -> Result<DMatrix<f64>> {
    let g = global_coefficients(&Scenario::circular(n, m)?)?;
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        g.a0, g.b0,
    ])))
}

/// Closed-form mode matrix U(l).
///
/// Mode 1 couples the center offset to the second-harmonic ring
/// deformation through `(3/2) sqrt(m (m+n))`; modes 2..floor((n-1)/2)
/// carry the +-S_l anti-diagonal couplings; the half mode of even n is the
/// 2x2 diagonal with no coupling.
pub fn u_mode(n: usize, m: f64, l: usize) -> Result<DMatrix<f64>> {
    let scenario = Scenario::circular(n, m)?;
    scenario.check_mode(l)?;
    if l == 1 {
        let p1 = trig_sums(n, 1)?.p;
        let c = 1.5 * (m * (m + n as f64)).sqrt();
        let e1 = 0.5 * (n as f64 + m);
        let g1 = 0.5 * m + 2.0 * p1;
        return Ok(DMatrix::from_row_slice(
            4,
            4,
            &[
                e1, 0.0, c, 0.0, //
                0.0, e1, 0.0, -c, //
                c, 0.0, g1, 0.0, //
                0.0, -c, 0.0, g1,
            ],
        ));
    }
    let b = block_coefficients(&scenario, l)?;
    if scenario.is_half_mode(l) {
        return Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            b.a, b.b,
        ])));
    }
    let s = b.s;
    Ok(DMatrix::from_row_slice(
        4,
        4,
        &[
            b.a, 0.0, 0.0, s, //
            0.0, b.b, -s, 0.0, //
            0.0, -s, b.a, 0.0, //
            s, 0.0, 0.0, b.b,
        ],
    ))
}

/// One normalized mode block `R_l = I + U(l) / lambda`.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedBlock {
    pub l: usize,
    pub matrix: DMatrix<f64>,
}

impl ReducedBlock {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn reduced_block(scenario: &Scenario, l: usize) -> Result<ReducedBlock> {
    scenario.check_mode(l)?;
    let lambda = global_coefficients(scenario)?.lambda;
    let u = u_mode(scenario.n, scenario.m, l)?;
    let dim = u.nrows();
    Ok(ReducedBlock {
        l,
        matrix: DMatrix::identity(dim, dim) + u / lambda,
    })
}

/// Two-parameter comparison block `(1+alpha) I_2 + beta N`,
/// `N = diag(1,-1)`. `beta` is kept signed for traceability; index
/// computations may use |beta| since the sign is a similarity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoParamBlock {
    pub alpha: f64,
    pub beta: f64,
}

impl TwoParamBlock {
    pub fn new(alpha: f64, beta: f64) -> Self {
        TwoParamBlock { alpha, beta }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[1.0 + self.alpha + self.beta, 0.0, 0.0, 1.0 + self.alpha - self.beta],
        )
    }

    /// Eigenvalues `1 + alpha +- beta`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        (1.0 + self.alpha + self.beta, 1.0 + self.alpha - self.beta)
    }
}

/// Two-parameter blocks bounding one mode from below and above in the
/// operator order, after the decoupling similarity.
#[derive(Debug, Clone, Serialize)]
pub struct BoundingBlocks {
    pub l: usize,
    pub lower: Vec<TwoParamBlock>,
    pub upper: Vec<TwoParamBlock>,
}

/// Comparison blocks for mode `l`.
///
/// Mode 1: `alpha = (d_check + m/2) / lambda`, `beta = 3 sqrt(m(m+n)) / (2 lambda)`
/// below, with `d_hat` above. Modes 2..floor((n-1)/2):
/// `alpha = (a_l + b_l -+ 2 S_l) / (2 lambda)`, `beta = (a_l - b_l) / (2 lambda)`.
/// The half mode of even n is exactly its own two-parameter block.
pub fn bounding_blocks(scenario: &Scenario, l: usize) -> Result<BoundingBlocks> {
    scenario.check_mode(l)?;
    let n = scenario.n;
    let m = scenario.m;
    let lambda = global_coefficients(scenario)?.lambda;
    if l == 1 {
        let g = global_coefficients(scenario)?;
        let beta = 1.5 * (m * (m + n as f64)).sqrt() / lambda;
        let lower = TwoParamBlock::new((g.d_check + 0.5 * m) / lambda, beta);
        let upper = TwoParamBlock::new((g.d_hat + 0.5 * m) / lambda, beta);
        return Ok(BoundingBlocks {
            l,
            lower: vec![lower],
            upper: vec![upper],
        });
    }
    let b = block_coefficients(scenario, l)?;
    let beta = (b.a - b.b) / (2.0 * lambda);
    if scenario.is_half_mode(l) {
        let exact = TwoParamBlock::new((b.a + b.b) / (2.0 * lambda), beta);
        return Ok(BoundingBlocks {
            l,
            lower: vec![exact],
            upper: vec![exact],
        });
    }
    Ok(BoundingBlocks {
        l,
        lower: vec![TwoParamBlock::new(
            (b.a + b.b - 2.0 * b.s) / (2.0 * lambda),
            beta,
        )],
        upper: vec![TwoParamBlock::new(
            (b.a + b.b + 2.0 * b.s) / (2.0 * lambda),
            beta,
        )],
    })
}

/// Normalized inverse radius of the Kepler ellipse in the true anomaly,
/// `r_e(theta) = 1 / (1 + e cos theta)`.
pub fn r_e(e: f64, theta: f64) -> Result<f64> {
    if !e.is_finite() || !(0.0..1.0).contains(&e) {
        return Err(Error::domain(format!("eccentricity e = {e} not in [0, 1)")));
    }
    Ok(1.0 / (1.0 + e * theta.cos()))
}

/// A periodic linear Hamiltonian coefficient path
/// `B(theta) = [[I, -J], [J, I - r_e(theta) R]]` for one symmetric block R.
#[derive(Debug, Clone)]
pub struct CoefficientPath {
    pub r: DMatrix<f64>,
    pub e: f64,
}

impl CoefficientPath {
    pub fn new(r: DMatrix<f64>, e: f64) -> Result<Self> {
        if r.nrows() != r.ncols() || r.nrows() % 2 != 0 {
            return Err(Error::domain("coefficient block must be square of even dimension"));
        }
        if (&r - r.transpose()).abs().max() > 1e-12 * (1.0 + r.abs().max()) {
            return Err(Error::domain("coefficient block must be symmetric"));
        }
        r_e(e, 0.0)?;
        Ok(CoefficientPath { r, e })
    }

    pub fn from_reduced(block: &ReducedBlock, e: f64) -> Result<Self> {
        CoefficientPath::new(block.matrix.clone(), e)
    }

    pub fn from_two_param(block: &TwoParamBlock, e: f64) -> Result<Self> {
        CoefficientPath::new(block.matrix(), e)
    }

    /// Block dimension d (the path matrices are 2d x 2d).
    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn b_at(&self, theta: f64) -> DMatrix<f64> {
        let d = self.dim();
        let re = 1.0 / (1.0 + self.e * theta.cos());
        let jp = j_planar(d);
        let mut b = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            b[(i, i)] = 1.0;
        }
        b.view_mut((0, d), (d, d)).copy_from(&(-&jp));
        b.view_mut((d, 0), (d, d)).copy_from(&jp);
        let lower = DMatrix::identity(d, d) - re * &self.r;
        b.view_mut((d, d), (d, d)).copy_from(&lower);
        b
    }
}

/// Direct sum of the mode blocks R_1, ..., R_{floor(n/2)} with its mode
/// boundaries, so individual blocks extract bit-identically.
#[derive(Debug, Clone)]
pub struct FullReducedSystem {
    pub r: DMatrix<f64>,
    pub dims: Vec<usize>,
}

impl FullReducedSystem {
    /// Extract the coefficient block of mode `l` (1-based).
    pub fn block(&self, l: usize) -> Result<ReducedBlock> {
        if l < 1 || l > self.dims.len() {
            return Err(Error::domain(format!("mode l = {l} out of range")));
        }
        let offset: usize = self.dims[..l - 1].iter().sum();
        let d = self.dims[l - 1];
        Ok(ReducedBlock {
            l,
            matrix: self.r.view((offset, offset), (d, d)).into_owned(),
        })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// Assemble the full essential coefficient system. In the interleaved
/// coordinates of the symplectic sum the quadrant structure of every
/// B_l(theta) is uniform, so the full path is just the path of the direct
/// sum of the R_l.
pub fn assemble_full(scenario: &Scenario) -> Result<FullReducedSystem> {
    let k = scenario.mode_count();
    if k == 0 {
        return Err(Error::domain("no modes for n < 2"));
    }
    let blocks: Vec<ReducedBlock> = (1..=k)
        .map(|l| reduced_block(scenario, l))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
    let total: usize = dims.iter().sum();
    let mut r = DMatrix::zeros(total, total);
    let mut offset = 0;
    for b in &blocks {
        r.view_mut((offset, offset), (b.dim(), b.dim()))
            .copy_from(&b.matrix);
        offset += b.dim();
    }
    Ok(FullReducedSystem { r, dims })
}

/// Symplectic sum of square matrices of even dimension: interleaves the
/// upper/lower half-coordinates of each summand.
pub fn symplectic_sum(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let halves: Vec<usize> = mats.iter().map(|m| m.nrows() / 2).collect();
    let total_half: usize = halves.iter().sum();
    let mut out = DMatrix::zeros(2 * total_half, 2 * total_half);
    let mut offset = 0;
    for (m, &h) in mats.iter().zip(&halves) {
        // global index of local row/col i within this summand
        let map = |i: usize| if i < h { offset + i } else { total_half + offset + (i - h) };
        for i in 0..2 * h {
            for j in 0..2 * h {
                out[(map(i), map(j))] = m[(i, j)];
            }
        }
        offset += h;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::sigma_n;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_mode_block() {
        // n = 4, m = 0, l = 2: R = diag(1 + a/lambda, 1 + b/lambda) with
        // lambda = sigma_4 / 2
        let s = Scenario::circular(4, 0.0).unwrap();
        let r = reduced_block(&s, 2).unwrap();
        assert_eq!(r.dim(), 2);
        let lambda = 0.5 * sigma_n(4).unwrap();
        let b = block_coefficients(&s, 2).unwrap();
        assert_abs_diff_eq!(r.matrix[(0, 0)], 1.0 + b.a / lambda, epsilon = 1e-14);
        assert_abs_diff_eq!(r.matrix[(1, 1)], 1.0 + b.b / lambda, epsilon = 1e-14);
        assert_abs_diff_eq!(r.matrix[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn large_mass_limits() {
        // R_l -> I + diag(2,-1,2,-1) entrywise for l >= 2
        let s = Scenario::circular(9, 1e9).unwrap();
        let r = reduced_block(&s, 2).unwrap();
        let limit = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 0.0, 3.0, 0.0]));
        assert!((&r.matrix - &limit).abs().max() < 1e-7);

        // mode-1 comparison parameters -> (1/2, 3/2)
        let bb = bounding_blocks(&s, 1).unwrap();
        assert_abs_diff_eq!(bb.lower[0].alpha, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(bb.lower[0].beta, 1.5, epsilon = 1e-7);

        // half mode of even n -> (1/2, 3/2) as well
        let s = Scenario::circular(8, 1e9).unwrap();
        let bb = bounding_blocks(&s, 4).unwrap();
        assert_abs_diff_eq!(bb.lower[0].alpha, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(bb.lower[0].beta, 1.5, epsilon = 1e-7);
    }

    #[test]
    fn bounding_block_identities() {
        // n = 4, m = 0, l = 2: lower alpha = (2 P_2 - 2 S_2) / (2 lambda)
        let s = Scenario::circular(4, 0.0).unwrap();
        let bb = bounding_blocks(&s, 2).unwrap();
        let b = block_coefficients(&s, 2).unwrap();
        let lambda = 0.5 * sigma_n(4).unwrap();
        // identity a + b - 2S = 2P - 2S + m (here m = 0) and S_{n/2} = 0
        assert_abs_diff_eq!(
            bb.lower[0].alpha,
            (2.0 * b.p - 2.0 * b.s) / (2.0 * lambda),
            epsilon = 1e-14
        );
    }

    #[test]
    fn two_param_eigenvalues() {
        let b = TwoParamBlock::new(0.7, 2.1);
        let (hi, lo) = b.eigenvalues();
        assert_abs_diff_eq!(hi, 3.8, epsilon = 1e-15);
        assert_abs_diff_eq!(lo, -0.4, epsilon = 1e-15);
        let m = b.matrix();
        assert_abs_diff_eq!(m[(0, 0)], hi, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)], lo, epsilon = 1e-15);
    }

    #[test]
    fn inverse_radius() {
        assert_abs_diff_eq!(r_e(0.0, 1.234).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r_e(0.5, std::f64::consts::PI).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r_e(0.5, 0.0).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
        assert!(r_e(1.0, 0.0).is_err());
        assert!(r_e(-0.1, 0.0).is_err());
    }

    #[test]
    fn path_symmetry_and_periodicity() {
        let s = Scenario::new(7, 2.0, 0.4).unwrap();
        let path = CoefficientPath::from_reduced(&reduced_block(&s, 2).unwrap(), s.e).unwrap();
        for k in 0..100 {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 * 0.618).fract();
            let b = path.b_at(theta);
            assert!((&b - b.transpose()).abs().max() == 0.0);
        }
        let b0 = path.b_at(0.0);
        let b1 = path.b_at(2.0 * std::f64::consts::PI);
        assert!((&b0 - &b1).abs().max() < 1e-15);
        // e = 0 path is constant
        let p0 = CoefficientPath::from_reduced(&reduced_block(&s, 2).unwrap(), 0.0).unwrap();
        assert!((p0.b_at(0.3) - p0.b_at(2.9)).abs().max() < 1e-15);
    }

    #[test]
    fn full_system_dims_and_extraction() {
        for n in 3..=12 {
            let s = Scenario::circular(n, 0.7).unwrap();
            let full = assemble_full(&s).unwrap();
            // essential dimension of the ring system
            assert_eq!(full.total_dim(), 2 * n - 2, "n = {n}");
            for l in 1..=s.mode_count() {
                let direct = reduced_block(&s, l).unwrap();
                let extracted = full.block(l).unwrap();
                assert_eq!(direct.matrix, extracted.matrix, "bit-identical extraction");
            }
        }
    }

    #[test]
    fn symplectic_sum_interleaving() {
        // diamond of two 2x2 blocks lands on the documented 4x4 pattern
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::from_row_slice(2, 2, &[5.0, 6.0, 7.0, 8.0]);
        let d = symplectic_sum(&[a, b]);
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 2.0, 0.0, //
                0.0, 5.0, 0.0, 6.0, //
                3.0, 0.0, 4.0, 0.0, //
                0.0, 7.0, 0.0, 8.0,
            ],
        );
        assert_eq!(d, expect);
    }

    #[test]
    fn path_of_direct_sum_matches_symplectic_sum_of_paths() {
        let s = Scenario::new(5, 0.3, 0.6).unwrap();
        let full = assemble_full(&s).unwrap();
        let path = CoefficientPath::new(full.r.clone(), s.e).unwrap();
        let theta = 1.1;
        let parts: Vec<DMatrix<f64>> = (1..=s.mode_count())
            .map(|l| {
                CoefficientPath::from_reduced(&reduced_block(&s, l).unwrap(), s.e)
                    .unwrap()
                    .b_at(theta)
            })
            .collect();
        let interleaved = symplectic_sum(&parts);
        assert!((path.b_at(theta) - interleaved).abs().max() < 1e-14);
    }
}
