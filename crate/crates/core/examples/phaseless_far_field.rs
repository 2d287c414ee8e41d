//! Recovers a source from far-field intensities alone, using a known point
//! source as the interfering reference.

use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::{far_field_batch, Sign};
use lattice_helmholtz::geometry::{circle_directions, linspace};
use lattice_helmholtz::lattice::{LatticeField, Point, SupportDomain};
use lattice_helmholtz::phase::{
    phaseless_farfield_reconstruct, GeometryMode, IntensitySample, PhaselessOptions, SupportGeometry,
};
use lattice_helmholtz::window::SpectralWindow;
use num_complex::Complex64;

fn intensities(f: &LatticeField, w: &SpectralWindow, signs: &[Sign]) -> Vec<IntensitySample> {
    signs
        .iter()
        .flat_map(|&s| far_field_batch(f, w, s).unwrap())
        .map(|s| IntensitySample { omega: s.omega, lambda: s.lambda, sign: s.sign, value: s.value.norm_sqr() })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let window = SpectralWindow::product(&circle_directions(96, 0.0), &linspace(1.5, 2.5, 12))?;
    let f0 = LatticeField::delta(2, Point::origin(), Complex64::new(1.0, 0.0))?;
    let d0 = SupportDomain::singleton(2, Point::origin())?;
    let mut rng = InstanceRng::new(3);

    for (lo, mode) in [(6, GeometryMode::FarApart), (2, GeometryMode::Disjoint)] {
        let d = SupportDomain::box_domain(&[lo, 0], &[lo + 1, 0])?;
        let geom = SupportGeometry::new(d.clone(), d0.clone(), mode)?;
        let f = rng.field(&d);
        for signs in [&[Sign::Minus, Sign::Plus][..], &[Sign::Plus]] {
            let sum = intensities(&f.add(&f0)?, &window, signs);
            let alone = (mode == GeometryMode::Disjoint).then(|| intensities(&f, &window, signs));
            let (rec, report) =
                phaseless_farfield_reconstruct(&sum, alone.as_deref(), &f0, &geom, &PhaselessOptions::default())?;
            println!(
                "{mode:?} {:?}: {} samples, grid {}, fit sigma_min {:.3e}, error {:.2e}",
                signs.iter().map(|s| s.symbol()).collect::<Vec<_>>(),
                sum.len(),
                report.grid_size,
                report.fit_sum.sigma_min,
                rec.diff_l2(&f) / f.norm_l2()
            );
        }
    }
    Ok(())
}
