use gonstab::blocks::reduced_block;
use gonstab::morse::positivity_certificate;
use gonstab::Scenario;
use std::time::Instant;
fn main() {
    // 4-dim block (matrix size 516 at K=64)
    let s = Scenario::new(3, 0.036, 0.5).unwrap();
    let r = reduced_block(&s, 1).unwrap();
    let t0 = Instant::now();
    let cert = positivity_certificate(&r.matrix, 0.5, 64, 64).unwrap();
    println!("d=4 cert: {:?}  positive={} margin={:.4e} worst_rho={:.3}",
        t0.elapsed(), cert.is_positive_all_omega, cert.min_margin, cert.worst_rho);
    // 2-dim block (size 258)
    let s = Scenario::new(4, 0.9, 0.5).unwrap();
    let r = reduced_block(&s, 2).unwrap();
    let t0 = Instant::now();
    let cert = positivity_certificate(&r.matrix, 0.5, 64, 64).unwrap();
    println!("d=2 cert: {:?}  positive={} margin={:.4e}", t0.elapsed(), cert.is_positive_all_omega, cert.min_margin);
}
