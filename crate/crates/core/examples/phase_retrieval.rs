//! Fourier phase retrieval with a known reference source: the autocorrelation
//! of `f + f0` splits into four terms, one of which isolates `f`.

use lattice_helmholtz::fourier::{dft, Convention};
use lattice_helmholtz::lattice::{LatticeField, Point, SupportDomain};
use lattice_helmholtz::phase::{retrieve_source, sigma_decompose, GeometryMode, SupportGeometry};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let one = Complex64::new(1.0, 0.0);
    let f0 = LatticeField::delta(1, Point::new(&[0])?, one)?;
    let f = LatticeField::delta(1, Point::new(&[5])?, one * 2.0)?;

    let s = sigma_decompose(&f, &f0)?;
    for (name, t) in [("f*f~", &s.s1), ("f0*f~", &s.s2), ("f*f0~", &s.s3), ("f0*f0~", &s.s4)] {
        let pts: Vec<_> = t.iter().map(|(p, v)| (p.get(0), v.re)).collect();
        println!("{name:>7}: {pts:?}");
    }

    let geom = SupportGeometry::new(
        SupportDomain::singleton(1, Point::new(&[5])?)?,
        SupportDomain::singleton(1, Point::origin())?,
        GeometryMode::FarApart,
    )?;
    let n = geom.min_grid_size();
    let intensity = dft(&f.add(&f0)?, n, Convention::CenteredAtO)?.map(|v| Complex64::new(v.norm_sqr(), 0.0));
    let r = retrieve_source(&intensity, None, &f0, &geom, 1e-8)?;
    println!("grid {n}, recovered f(5) = {:.12}", r.field.get(&Point::new(&[5])?));

    // Too close to the reference: the cross term overlaps the autocorrelation of f.
    let d = SupportDomain::box_domain(&[1, 0], &[3, 0])?;
    let d0 = SupportDomain::singleton(2, Point::origin())?;
    println!("\nstrict check: {:?}", SupportGeometry::new(d.clone(), d0.clone(), GeometryMode::FarApart).err().map(|e| e.to_string()));
    let bad = SupportGeometry::unchecked(d.clone(), d0, GeometryMode::FarApart)?;
    let g = LatticeField::from_values(&d, &[one, one * -0.5, Complex64::new(0.3, 0.7)])?;
    let f0 = LatticeField::delta(2, Point::origin(), one)?;
    let n = bad.min_grid_size();
    let intensity = dft(&g.add(&f0)?, n, Convention::CenteredAtO)?.map(|v| Complex64::new(v.norm_sqr(), 0.0));
    let r = retrieve_source(&intensity, None, &f0, &bad, 1e-8)?;
    println!("forced retrieval error {:.3}", r.field.diff_l2(&g) / g.norm_l2());
    Ok(())
}
