//! Dense complex Hermitian kernels: a Bunch-Kaufman LDL^H factorization
//! with partial pivoting (inertia counting and linear solves), bisection
//! on the inertia, and inverse iteration for extremal eigenvalues. A
//! dense eigendecomposition backend is kept alongside; eigenvalue counts
//! from both routes must agree and tests enforce that.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const BK_ALPHA: f64 = 0.6403882032022076; // (1 + sqrt(17)) / 8

/// Signs of the diagonal blocks of D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Bunch-Kaufman factorization `P (H - shift I) P^T = L D L^H` stored
/// LAPACK-style in the lower triangle.
pub struct LdlFactor {
    a: CMatrix,
    // >= 0: 1x1 pivot swapped with that row; < 0: second halves of a 2x2
    // pivot store -(row+1)
    ipiv: Vec<i64>,
    scale: f64,
}

impl LdlFactor {
    pub fn new(h: &CMatrix, shift: f64) -> Result<Self> {
        let n = h.nrows();
        if n != h.ncols() {
            return Err(Error::domain("factorization needs a square matrix"));
        }
        let mut a = h.clone();
        let mut scale = 0.0f64;
        for i in 0..n {
            a[(i, i)] -= Complex64::new(shift, 0.0);
            for j in 0..=i {
                scale = scale.max(a[(i, j)].norm());
            }
        }
        let mut ipiv = vec![0i64; n];

        let mut k = 0usize;
        while k < n {
            let absakk = a[(k, k)].re.abs();
            let (imax, colmax) = {
                let mut best = (k, 0.0f64);
                for i in k + 1..n {
                    let v = a[(i, k)].norm();
                    if v > best.1 {
                        best = (i, v);
                    }
                }
                best
            };

            let mut kstep = 1usize;
            let kp;
            if absakk.max(colmax) == 0.0 {
                kp = k; // exactly singular pivot
            } else if absakk >= BK_ALPHA * colmax {
                kp = k;
            } else {
                let mut rowmax = 0.0f64;
                for j in k..imax {
                    rowmax = rowmax.max(a[(imax, j)].norm());
                }
                for i in imax + 1..n {
                    rowmax = rowmax.max(a[(i, imax)].norm());
                }
                if absakk * rowmax >= BK_ALPHA * colmax * colmax {
                    kp = k;
                } else if a[(imax, imax)].re.abs() >= BK_ALPHA * rowmax {
                    kp = imax;
                } else {
                    kp = imax;
                    kstep = 2;
                }
            }

            let kk = k + kstep - 1;
            if kp != kk {
                // interchange rows/columns kk and kp in the trailing block
                for i in kp + 1..n {
                    a.swap((i, kk), (i, kp));
                }
                for j in kk + 1..kp {
                    let t = a[(j, kk)].conj();
                    a[(j, kk)] = a[(kp, j)].conj();
                    a[(kp, j)] = t;
                }
                a[(kp, kk)] = a[(kp, kk)].conj();
                let t = a[(kk, kk)];
                a[(kk, kk)] = a[(kp, kp)];
                a[(kp, kp)] = t;
                if kstep == 2 {
                    a.swap((k + 1, k), (kp, k));
                }
            }

            if kstep == 1 {
                let d = a[(k, k)].re;
                if d != 0.0 && k + 1 < n {
                    let r1 = 1.0 / d;
                    for j in k + 1..n {
                        let w = a[(j, k)].conj() * r1;
                        if w != Complex64::ZERO {
                            for i in j..n {
                                let lik = a[(i, k)];
                                a[(i, j)] -= lik * w;
                            }
                        }
                        a[(j, j)] = Complex64::new(a[(j, j)].re, 0.0);
                    }
                    for i in k + 1..n {
                        a[(i, k)] *= r1;
                    }
                }
                ipiv[k] = kp as i64;
                k += 1;
            } else {
                // 2x2 pivot; trailing update in the stable scaled form
                if k + 2 < n {
                    let dmag = a[(k + 1, k)].norm();
                    let d11 = a[(k + 1, k + 1)].re / dmag;
                    let d22 = a[(k, k)].re / dmag;
                    let tt = 1.0 / (d11 * d22 - 1.0);
                    let d21 = a[(k + 1, k)] / dmag;
                    for j in k + 2..n {
                        let wk = (a[(j, k)] * d11 - a[(j, k + 1)] * d21) * tt;
                        let wkp1 = (a[(j, k + 1)] * d22 - a[(j, k)] * d21.conj()) * tt;
                        for i in j..n {
                            let upd = (a[(i, k)] / dmag) * wk.conj()
                                + (a[(i, k + 1)] / dmag) * wkp1.conj();
                            a[(i, j)] -= upd;
                        }
                        a[(j, k)] = wk / dmag;
                        a[(j, k + 1)] = wkp1 / dmag;
                        a[(j, j)] = Complex64::new(a[(j, j)].re, 0.0);
                    }
                }
                ipiv[k] = -(kp as i64) - 1;
                ipiv[k + 1] = -(kp as i64) - 1;
                k += 2;
            }
        }
        Ok(LdlFactor { a, ipiv, scale })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Counts of negative / near-zero / positive eigenvalues of the
    /// shifted matrix, read off the pivot blocks.
    pub fn inertia(&self) -> Inertia {
        let zero_tol = f64::EPSILON * self.scale * self.dim() as f64;
        let mut out = Inertia::default();
        let mut k = 0usize;
        while k < self.dim() {
            if self.ipiv[k] >= 0 {
                let d = self.a[(k, k)].re;
                if d.abs() <= zero_tol {
                    out.zero += 1;
                } else if d < 0.0 {
                    out.negative += 1;
                } else {
                    out.positive += 1;
                }
                k += 1;
            } else {
                let d11 = self.a[(k, k)].re;
                let d22 = self.a[(k + 1, k + 1)].re;
                let off = self.a[(k + 1, k)].norm();
                let det = d11 * d22 - off * off;
                let tr = d11 + d22;
                if det < 0.0 {
                    out.negative += 1;
                    out.positive += 1;
                } else if det.abs() <= zero_tol * zero_tol {
                    out.zero += 1;
                    if tr < 0.0 {
                        out.negative += 1;
                    } else {
                        out.positive += 1;
                    }
                } else if tr < 0.0 {
                    out.negative += 2;
                } else {
                    out.positive += 2;
                }
                k += 2;
            }
        }
        out
    }

    /// Solve `(H - shift I) x = b` in place.
    pub fn solve_in_place(&self, b: &mut CVector) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // forward: P, L and D applied per pivot block
        let mut k = 0usize;
        while k < n {
            if self.ipiv[k] >= 0 {
                let kp = self.ipiv[k] as usize;
                if kp != k {
                    b.swap_rows(k, kp);
                }
                let bk = b[k];
                for i in k + 1..n {
                    let l = self.a[(i, k)];
                    b[i] -= l * bk;
                }
                let d = self.a[(k, k)].re;
                b[k] /= d;
                k += 1;
            } else {
                let kp = (-self.ipiv[k] - 1) as usize;
                if kp != k + 1 {
                    b.swap_rows(k + 1, kp);
                }
                let (bk, bk1) = (b[k], b[k + 1]);
                for i in k + 2..n {
                    let upd = self.a[(i, k)] * bk + self.a[(i, k + 1)] * bk1;
                    b[i] -= upd;
                }
                // 2x2 diagonal solve in the overflow-guarded form
                let akm1k = self.a[(k + 1, k)];
                let akm1 = self.a[(k, k)] / akm1k.conj();
                let ak = self.a[(k + 1, k + 1)] / akm1k;
                let denom = akm1 * ak - Complex64::ONE;
                let bkm1 = b[k] / akm1k.conj();
                let bkk = b[k + 1] / akm1k;
                b[k] = (ak * bkm1 - bkk) / denom;
                b[k + 1] = (akm1 * bkk - bkm1) / denom;
                k += 2;
            }
        }
        // backward: L^H and P in reverse
        let mut k = n;
        while k > 0 {
            let kk = k - 1;
            if self.ipiv[kk] >= 0 {
                let mut acc = Complex64::ZERO;
                for i in k..n {
                    acc += self.a[(i, kk)].conj() * b[i];
                }
                b[kk] -= acc;
                let kp = self.ipiv[kk] as usize;
                if kp != kk {
                    b.swap_rows(kk, kp);
                }
                k -= 1;
            } else {
                // kk is the second index of a 2x2 block (kk-1, kk)
                let mut acc0 = Complex64::ZERO;
                let mut acc1 = Complex64::ZERO;
                for i in k..n {
                    acc0 += self.a[(i, kk - 1)].conj() * b[i];
                    acc1 += self.a[(i, kk)].conj() * b[i];
                }
                b[kk - 1] -= acc0;
                b[kk] -= acc1;
                let kp = (-self.ipiv[kk] - 1) as usize;
                if kp != kk {
                    b.swap_rows(kk, kp);
                }
                k -= 2;
            }
        }
    }
}

/// Number of eigenvalues of `h` strictly below `s` (counts near-zero
/// pivots of the shifted matrix as not below).
pub fn count_below(h: &CMatrix, s: f64) -> Result<usize> {
    Ok(LdlFactor::new(h, s)?.inertia().negative)
}

/// Largest absolute entry; the natural scale for tolerances here.
pub fn max_abs(h: &CMatrix) -> f64 {
    h.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn gershgorin_bounds(h: &CMatrix) -> (f64, f64) {
    let n = h.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let d = h[(i, i)].re;
        let mut r = 0.0;
        for j in 0..n {
            if j != i {
                r += h[(i, j)].norm();
            }
        }
        lo = lo.min(d - r);
        hi = hi.max(d + r);
    }
    (lo, hi)
}

fn deterministic_start(n: usize) -> CVector {
    // fixed full-support start vector; no RNG dependency in the library
    CVector::from_iterator(
        n,
        (0..n).map(|i| {
            let x = ((i as f64 + 1.0) * 0.7548776662466927).fract() - 0.5;
            let y = ((i as f64 + 1.0) * 0.5698402909980532).fract() - 0.5;
            Complex64::new(1.0 + x, y)
        }),
    )
}

fn rayleigh_quotient(h: &CMatrix, x: &CVector) -> f64 {
    let hx = h * x;
    let num: Complex64 = x.dotc(&hx);
    let den = x.norm_squared();
    num.re / den
}

/// Eigenvalue of `h` nearest `shift`, by inverse iteration with the
/// factorization held fixed.
pub fn eigenvalue_near(h: &CMatrix, shift: f64) -> Result<f64> {
    let factor = LdlFactor::new(h, shift)?;
    let n = h.nrows();
    let mut x = deterministic_start(n);
    x /= Complex64::new(x.norm(), 0.0);
    let mut prev = f64::INFINITY;
    for _ in 0..60 {
        let mut y = x.clone();
        factor.solve_in_place(&mut y);
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        x = y / Complex64::new(norm, 0.0);
        let rq = rayleigh_quotient(h, &x);
        if (rq - prev).abs() <= 1e-14 * (1.0 + rq.abs()) {
            return Ok(rq);
        }
        prev = rq;
    }
    if prev.is_finite() {
        Ok(prev)
    } else {
        Err(Error::ConvergenceFailure(
            "inverse iteration did not settle".into(),
        ))
    }
}

/// Smallest eigenvalue of `h`: bisection on the inertia down to a narrow
/// bracket, then inverse iteration inside it.
pub fn smallest_eigenvalue(h: &CMatrix) -> Result<f64> {
    let (glb, gub) = gershgorin_bounds(h);
    let span = (gub - glb).max(1e-30);
    let mut lo = glb - 1e-12 * span; // count_below(lo) == 0
    let mut hi = gub + 1e-12 * span; // count_below(hi) == n
    for _ in 0..30 {
        if hi - lo <= 1e-10 * span {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if count_below(h, mid)? >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let guess = 0.5 * (lo + hi);
    match eigenvalue_near(h, guess) {
        Ok(v) if v.is_finite() && v >= lo - 1e-8 * span && v <= hi + 1e-8 * span => Ok(v),
        _ => Ok(guess),
    }
}

/// Full real spectrum through the dense eigendecomposition backend.
pub fn dense_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Counts below `s` from both backends; errors if they disagree.
pub fn count_below_checked(h: &CMatrix, s: f64) -> Result<usize> {
    let fast = count_below(h, s)?;
    let dense = dense_eigenvalues(h).iter().filter(|&&v| v < s).count();
    if fast != dense {
        return Err(Error::AssertionFailure(format!(
            "eigenvalue-count backends disagree below {s}: factorization {fast}, dense {dense}"
        )));
    }
    Ok(fast)
}
