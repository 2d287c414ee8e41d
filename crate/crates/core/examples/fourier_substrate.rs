//! Lattice fields, their torus transforms, and the identities that tie
//! convolution and the Laplacian to pointwise products.

use lattice_helmholtz::fourier::{apply_symbol, centred_box, dft, idft, min_grid_size, Convention};
use lattice_helmholtz::lattice::{fourier_norm, LatticeField, Point, SupportDomain};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = SupportDomain::box_domain(&[-1, 0], &[1, 1])?;
    let vals: Vec<Complex64> = (0..d.len()).map(|i| Complex64::new(i as f64, 1.0 - i as f64 * 0.5)).collect();
    let u = LatticeField::from_values(&d, &vals)?;
    let v = LatticeField::delta(2, Point::new(&[2, -1])?, Complex64::new(0.0, 1.0))?;

    let w = u.convolve(&v)?;
    let n = min_grid_size(w.extent().max(u.extent()));
    println!("support {} points, extent {}, grid {n}^2", u.len(), u.extent());

    for conv in [Convention::CenteredAtO, Convention::CenteredAtOPi] {
        let fu = dft(&u, n, conv)?;
        let back = idft(&fu, &centred_box(2, u.extent())?)?;
        let fv = dft(&v, n, conv)?;
        let prod = fu.zip_with(&fv, |a, b| a * b / fourier_norm(2))?;
        let lap = dft(&u.laplacian(), min_grid_size(u.laplacian().extent()), conv)?;
        let mult = apply_symbol(&dft(&u, lap.grid_size(), conv)?);
        println!("{conv:?}");
        println!("  round trip      {:.2e}", back.max_abs_diff(&u));
        println!("  convolution     {:.2e}", dft(&w, n, conv)?.max_abs_diff(&prod));
        println!("  Parseval        {:.2e}", (fu.quadrature_norm_sqr() - u.norm_l2().powi(2)).abs());
        println!("  Laplacian       {:.2e}", lap.max_abs_diff(&mult));
    }

    let k = [0.4, -1.1];
    println!("u^({k:?}) = {:.6}", u.fourier_at(&k));
    Ok(())
}
