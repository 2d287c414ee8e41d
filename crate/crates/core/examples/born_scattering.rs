//! Scattering by a small potential: the Born amplitude against the converged
//! Lippmann-Schwinger solution, and linear inversion from Born data.

use lattice_helmholtz::born::{born_amplitude, born_batch, born_reconstruct, lippmann_schwinger_solve, IncidentWave};
use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::ResolventConfig;
use lattice_helmholtz::geometry::{circle_directions, validate_lambda, Direction};
use lattice_helmholtz::lattice::SupportDomain;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sp = validate_lambda(2.0, 2)?;
    let inc = IncidentWave::from_direction(&Direction::from_angle(0.4), &sp)?;
    let w = Direction::from_angle(2.0);
    let mut rng = InstanceRng::new(4);
    let d = SupportDomain::box_domain(&[0, 0], &[1, 1])?;
    let v1 = rng.field(&d);

    println!("{:>8} {:>26} {:>26} {:>10}", "t", "exact", "Born", "iters");
    for t in [1e-3, 1e-2, 3e-2, 1e-1] {
        let v = v1.scale(Complex64::new(t, 0.0));
        let sol = lippmann_schwinger_solve(&v, &inc, &ResolventConfig::default(), 1e-14, 500)?;
        let exact = sol.amplitude(&w)?;
        let born = born_amplitude(&v, &inc, &w)?;
        println!("{t:>8.0e} {exact:>26.4e} {born:>26.4e} {:>10}", sol.iterations);
    }

    let d3 = SupportDomain::box_domain(&[-1, -1], &[1, 1])?;
    let v = rng.field(&d3);
    let incs: Vec<IncidentWave> = circle_directions(16, 0.05)
        .iter()
        .map(|t| IncidentWave::from_direction(t, &sp))
        .collect::<Result<_, _>>()?;
    let data = born_batch(&v, &incs, &circle_directions(32, 0.0))?;
    let (rec, diag) = born_reconstruct(&data, &d3)?;
    println!(
        "\nBorn inversion from {} samples: cond {:.3}, relative error {:.2e}",
        data.len(),
        diag.cond,
        rec.diff_l2(&v) / v.norm_l2()
    );
    Ok(())
}
