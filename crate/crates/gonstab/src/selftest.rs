//! One-shot integrity gate: convention self-tests (kernel facts, the
//! operator/monodromy nullity correspondence, constant-coefficient
//! closed forms), central-configuration residuals, table goldens, the
//! reduction grid, and the kernel-fact spectra. Everything here must
//! pass before any other output of this crate is worth trusting.

use crate::atlas::{reproduce_tables, thresholds, TableKind};
use crate::blocks::{CoefficientPath, TwoParamBlock};
use crate::error::{Error, Result};
use crate::monodromy::{e0_monodromy, e0_spectrum, gamma_nullity, integrate_monodromy};
use crate::morse::{two_param_index, BoundaryTwist};
use crate::reduction::{build_configuration, reduce_and_verify};

fn check(name: &str, ok: bool, detail: String, failures: &mut Vec<String>) {
    if ok {
        println!("[PASS] {name}");
    } else {
        println!("[FAIL] {name}: {detail}");
        failures.push(format!("{name}: {detail}"));
    }
}

/// Convention gate: fails loudly if any sign or ordering convention in
/// the operator assembly or the monodromy system is transcribed
/// inconsistently.
pub fn orientation_self_test(k_modes: usize) -> Result<()> {
    let mut failures = Vec::new();

    // kernel facts pin the operator conventions
    let idx = two_param_index(0.0, 0.0, 0.3, &BoundaryTwist::periodic(), k_modes)?;
    check(
        "kernel fact: flat block periodic (phi, nu) = (0, 2)",
        (idx.phi, idx.nu) == (0, 2),
        format!("got ({}, {})", idx.phi, idx.nu),
        &mut failures,
    );
    let idx = two_param_index(0.5, 1.5, 0.3, &BoundaryTwist::periodic(), k_modes)?;
    check(
        "kernel fact: Kepler block periodic (phi, nu) = (0, 3)",
        (idx.phi, idx.nu) == (0, 3),
        format!("got ({}, {})", idx.phi, idx.nu),
        &mut failures,
    );
    let idx = two_param_index(0.5, 1.5, 0.3, &BoundaryTwist::antiperiodic(), k_modes)?;
    check(
        "kernel fact: Kepler block antiperiodic (phi, nu) = (2, 0)",
        (idx.phi, idx.nu) == (2, 0),
        format!("got ({}, {})", idx.phi, idx.nu),
        &mut failures,
    );

    // constant-coefficient closed form against the integrator
    let path = CoefficientPath::from_two_param(&TwoParamBlock::new(0.5, 1.5), 0.0)?;
    let gamma = integrate_monodromy(&path, 1e-11)?.gamma;
    let oracle = e0_monodromy(&path)?;
    let dev = (&gamma - &oracle).abs().max();
    check(
        "constant-coefficient monodromy matches the exponential",
        dev <= 1e-8,
        format!("deviation {dev:.3e}"),
        &mut failures,
    );

    // operator/monodromy nullity correspondence at a complex twist: an
    // elliptic block whose exponent fraction is known in closed form
    let (alpha, beta) = (0.5, 1.45);
    let spectrum = e0_spectrum(alpha, beta);
    let rho = spectrum
        .iter()
        .filter(|z| z.re.abs() < 1e-12 && z.im > 0.0)
        .map(|z| z.im.rem_euclid(1.0))
        .next()
        .ok_or_else(|| Error::AssertionFailure("expected an elliptic exponent".into()))?;
    let path = CoefficientPath::from_two_param(&TwoParamBlock::new(alpha, beta), 0.0)?;
    let gamma = integrate_monodromy(&path, 1e-11)?.gamma;
    let twist = BoundaryTwist::from_rho(rho)?;
    let nu_op = two_param_index(alpha, beta, 0.0, &twist, k_modes)?.nu;
    let nu_gamma = gamma_nullity(&gamma, twist.omega(), 1e-7);
    check(
        "complex-twist nullity correspondence",
        nu_op == nu_gamma && nu_op >= 1,
        format!("operator {nu_op}, monodromy {nu_gamma} at rho = {rho:.6}"),
        &mut failures,
    );
    // and away from the degenerate twist both must vanish
    let off = BoundaryTwist::from_rho(rho + 0.11)?;
    let nu_off = two_param_index(alpha, beta, 0.0, &off, k_modes)?.nu;
    let nu_gamma_off = gamma_nullity(&gamma, off.omega(), 1e-7);
    check(
        "off-degenerate twist has no kernel",
        nu_off == 0 && nu_gamma_off == 0,
        format!("operator {nu_off}, monodromy {nu_gamma_off}"),
        &mut failures,
    );

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::AssertionFailure(failures.join("; ")))
    }
}

/// Full gate: orientation, central configurations, published tables,
/// reduction grid, kernel-fact spectra.
pub fn run(k_modes: usize) -> Result<()> {
    let mut failures = Vec::new();

    match orientation_self_test(k_modes) {
        Ok(()) => println!("[PASS] orientation self-test"),
        Err(e) => failures.push(format!("orientation self-test: {e}")),
    }

    for (n, m) in [(3usize, 0.0722), (8, 100.0)] {
        match build_configuration(n, m) {
            Ok(_) => println!("[PASS] central configuration n = {n}, m = {m}"),
            Err(e) => failures.push(format!("central configuration n = {n}, m = {m}: {e}")),
        }
    }

    // criterion: sigma and d-check rows within print accuracy
    for kind in [TableKind::Sigma, TableKind::Dcheck] {
        match reproduce_tables(kind) {
            Ok(r) => {
                println!("[PASS] table {kind:?}: max deviation {:.2e}", r.max_deviation)
            }
            Err(e) => failures.push(format!("table {kind:?}: {e}")),
        }
    }
    match reproduce_tables(TableKind::Instability) {
        Ok(r) => println!(
            "[PASS] instability intervals: max deviation {:.2e}",
            r.max_deviation
        ),
        Err(e) => failures.push(format!("instability intervals: {e}")),
    }
    // spot published endpoints against the threshold formulas
    let spot = [(3usize, 1usize, 0.0722f64), (4, 2, 1.7755), (8, 4, 15.6593)];
    for (n, l, upper) in spot {
        let t = thresholds(n)?;
        let dev = (t.block(l).unwrap().upper - upper).abs();
        check(
            &format!("threshold upper n = {n}, l = {l}"),
            dev <= 5e-4,
            format!("deviation {dev:.2e}"),
            &mut failures,
        );
    }

    // reduction grid
    let mut worst: f64 = 0.0;
    let mut reduction_ok = true;
    for n in 3..=12 {
        for m in [0.1, 1.0, 10.0, 1000.0] {
            match reduce_and_verify(n, m) {
                Ok(r) => {
                    worst = worst
                        .max(r.off_block_residual)
                        .max(r.closed_form_residual.values().fold(0.0f64, |a, &b| a.max(b)));
                }
                Err(e) => {
                    reduction_ok = false;
                    failures.push(format!("reduction n = {n}, m = {m}: {e}"));
                }
            }
        }
    }
    if reduction_ok {
        println!("[PASS] reduction grid n = 3..12: worst residual {worst:.2e}");
    }

    // kernel-fact spectra over the eccentricity grid
    let mut kernel_ok = true;
    for e in [0.0, 0.3, 0.6, 0.9] {
        let flat = two_param_index(0.0, 0.0, e, &BoundaryTwist::periodic(), k_modes)?;
        let kep1 = two_param_index(0.5, 1.5, e, &BoundaryTwist::periodic(), k_modes)?;
        let kep2 = two_param_index(0.5, 1.5, e, &BoundaryTwist::antiperiodic(), k_modes)?;
        if (flat.phi, flat.nu) != (0, 2)
            || (kep1.phi, kep1.nu) != (0, 3)
            || (kep2.phi, kep2.nu) != (2, 0)
            || !(flat.converged && kep1.converged && kep2.converged)
        {
            kernel_ok = false;
            failures.push(format!(
                "kernel facts at e = {e}: flat ({}, {}), periodic ({}, {}), antiperiodic ({}, {})",
                flat.phi, flat.nu, kep1.phi, kep1.nu, kep2.phi, kep2.nu
            ));
        }
    }
    if kernel_ok {
        println!("[PASS] kernel-fact spectra for e in {{0, 0.3, 0.6, 0.9}}");
    }

    // verify a flag for check() failures recorded above
    if failures.is_empty() {
        println!("[PASS] selftest complete");
        Ok(())
    } else {
        for f in &failures {
            println!("[FAIL] {f}");
        }
        Err(Error::AssertionFailure(format!(
            "{} selftest failure(s)",
            failures.len()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_gate_passes() {
        orientation_self_test(24).unwrap();
    }
}
