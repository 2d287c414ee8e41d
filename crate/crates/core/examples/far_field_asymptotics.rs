//! Outgoing resolvent of a point source, its far-field amplitude, and how
//! fast the field approaches the predicted spherical wave along a ray.

use lattice_helmholtz::forward::{asymptotic_check, far_field, green_function, ResolventConfig, Sign};
use lattice_helmholtz::geometry::{validate_lambda, Direction};
use lattice_helmholtz::lattice::{LatticeField, Point};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = LatticeField::delta(2, Point::origin(), Complex64::new(1.0, 0.0))?;
    let sp = validate_lambda(2.0, 2)?;
    let cfg = ResolventConfig::default();

    for x in [[0, 0], [1, 0], [1, 1], [5, 2]] {
        let (g, err) = green_function(&Point::new(&x)?, &sp, Sign::Minus, &cfg)?;
        println!("G({x:?}) = {g:.10}  (quadrature error {err:.1e})");
    }

    let w = Direction::new(vec![1.0, 0.0])?;
    for sign in [Sign::Minus, Sign::Plus] {
        println!("a{}(omega=(1,0)) = {:.8}", sign.symbol(), far_field(&f, &w, &sp, sign)?);
    }

    let radii: Vec<i64> = (1..=10).map(|i| 20 * i).collect();
    let rows = asymptotic_check(&f, &sp, &Point::unit(0), &radii, Sign::Minus, &cfg)?;
    println!("\n{:>6} {:>24} {:>24} {:>12} {:>10}", "r", "psi", "prediction", "r^1.5 |res|", "rel err");
    for r in &rows {
        println!(
            "{:>6} {:>24.8} {:>24.8} {:>12.4e} {:>10.2e}",
            r.radius, r.psi, r.predicted, r.scaled_residual, r.relative_error
        );
    }
    Ok(())
}
