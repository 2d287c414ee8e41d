//! Recovers a source on a known box from noiseless far-field amplitudes on
//! a direction x frequency window, then probes the stability constant.

use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::{far_field_batch, Sign};
use lattice_helmholtz::geometry::{circle_directions, linspace};
use lattice_helmholtz::inverse::{build_sampling_operator, reconstruct_phased};
use lattice_helmholtz::lattice::SupportDomain;
use lattice_helmholtz::window::SpectralWindow;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = SupportDomain::box_domain(&[0, 0], &[3, 3])?;
    let window = SpectralWindow::product(&circle_directions(64, 0.0), &linspace(1.0, 3.0, 8))?;
    let mut rng = InstanceRng::new(1);
    let f = rng.field(&d);

    let data = far_field_batch(&f, &window, Sign::Minus)?;
    let (rec, diag) = reconstruct_phased(&data, &d, &window, Sign::Minus)?;
    println!("{} samples, {} unknowns", data.len(), d.len());
    println!("sigma in [{:.4e}, {:.4e}], cond {:.3}", diag.sigma_min, diag.sigma_max, diag.cond);
    println!("relative error {:.2e}", rec.diff_l2(&f) / f.norm_l2());

    // A single frequency with too few directions cannot separate 16 unknowns.
    for (dirs, lambdas) in [(64, 8), (16, 2), (4, 1)] {
        let w = SpectralWindow::product(&circle_directions(dirs, 0.0), &linspace(1.0, 3.0, lambdas))?;
        let op = build_sampling_operator(&d, &w, Sign::Minus)?;
        match op.stability_constant() {
            Ok(c) => println!("{dirs:>3} x {lambdas}: ||f|| <= {c:.4e} ||a||"),
            Err(e) => println!("{dirs:>3} x {lambdas}: {e}"),
        }
    }

    let op = build_sampling_operator(&d, &window, Sign::Minus)?;
    let e = op.extremal_source();
    println!("extremal source attains the bound: {:.3e} vs {:.3e}", e.norm_l2(), op.stability_constant()? * op.apply(&e).norm());
    Ok(())
}
