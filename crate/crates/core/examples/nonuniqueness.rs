//! Sources whose far field vanishes at chosen frequencies, built by
//! applying Helmholtz operators to a compactly supported field.

use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::Sign;
use lattice_helmholtz::geometry::validate_lambda;
use lattice_helmholtz::inverse::{nonuniqueness_source, vanishing_derivative_residual, vanishing_residual};
use lattice_helmholtz::lattice::SupportDomain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = InstanceRng::new(2);
    let u = rng.field(&SupportDomain::box_domain(&[-1, -1], &[1, 1])?);

    for roots in [vec![1.5, 2.5], vec![2.0, 2.0]] {
        let f = nonuniqueness_source(&u, &roots)?;
        println!("roots {roots:?}: source has {} points", f.len());
        for lambda in [1.0, 1.5, 1.6, 2.0, 2.1, 2.5, 3.0] {
            let sp = validate_lambda(lambda, 2)?;
            let r = vanishing_residual(&f, &sp, Sign::Minus, 256)?;
            let dr = vanishing_derivative_residual(&f, lambda, Sign::Minus, 256, 1e-4)?;
            println!("  lambda {lambda:.1}: max |a| {r:.3e}, max |da/dlambda| {dr:.3e}");
        }
    }
    Ok(())
}
