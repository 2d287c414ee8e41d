mod common;

use common::*;
use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::Sign;
use lattice_helmholtz::lattice::{LatticeField, SupportDomain};
use lattice_helmholtz::phase::{
    phaseless_farfield_reconstruct, retrieve_source, GeometryMode, PhaselessOptions, SupportGeometry,
};
use lattice_helmholtz::fourier::{dft, Convention};

fn run(gap: i64, mode: GeometryMode, signs: &[Sign], seed: u64) -> f64 {
    let geom = two_point_setup(gap, mode);
    let mut rng = InstanceRng::new(seed);
    let f = random_field(&mut rng, &geom.domain);
    let f0 = delta(2, &[0, 0]);
    let w = band_window(96, 1.5, 2.5, 12);
    let sum = far_intensities(&f.add(&f0).unwrap(), &w, signs);
    let alone = (mode == GeometryMode::Disjoint).then(|| far_intensities(&f, &w, signs));
    let (rec, report) =
        phaseless_farfield_reconstruct(&sum, alone.as_deref(), &f0, &geom, &PhaselessOptions::default()).unwrap();
    assert_eq!(report.skipped_nodes, 0);
    relative_error(&rec, &f)
}

#[test]
fn far_apart_pipeline_recovers_source() {
    for signs in [&[Sign::Minus, Sign::Plus][..], &[Sign::Minus], &[Sign::Plus]] {
        let e = run(6, GeometryMode::FarApart, signs, 11);
        assert!(e < 1e-8, "{signs:?}: {e:e}");
    }
}

#[test]
fn disjoint_pipeline_recovers_source() {
    for signs in [&[Sign::Minus, Sign::Plus][..], &[Sign::Minus], &[Sign::Plus]] {
        let e = run(2, GeometryMode::Disjoint, signs, 12);
        assert!(e < 1e-8, "{signs:?}: {e:e}");
    }
}

#[test]
fn zero_source_gives_zero() {
    let geom = two_point_setup(6, GeometryMode::FarApart);
    let f0 = delta(2, &[0, 0]);
    let w = band_window(48, 1.5, 2.5, 6);
    let sum = far_intensities(&f0, &w, &[Sign::Minus, Sign::Plus]);
    let (rec, _) = phaseless_farfield_reconstruct(&sum, None, &f0, &geom, &PhaselessOptions::default()).unwrap();
    assert!(rec.norm_inf() < 1e-10);
}

#[test]
fn randomized_exact_retrieval_in_both_modes() {
    let mut rng = InstanceRng::new(5);
    for trial in 0..10 {
        let gap = 3 + trial % 3;
        let d = SupportDomain::box_domain(&[gap, -1], &[gap + 1, 0]).unwrap();
        let d0 = SupportDomain::box_domain(&[-1, 0], &[0, 0]).unwrap();
        for mode in [GeometryMode::FarApart, GeometryMode::Disjoint] {
            let Ok(geom) = SupportGeometry::new(d.clone(), d0.clone(), mode) else {
                continue;
            };
            let f = rng.field(&d);
            // a dominant background keeps |F f0| away from zero
            let f0 = LatticeField::from_values(&d0, &[c(0.3, 0.1), c(2.0, 0.0)]).unwrap();
            let n = geom.min_grid_size();
            let intensity = |g: &LatticeField| dft(g, n, Convention::CenteredAtO).unwrap().map(|v| c(v.norm_sqr(), 0.0));
            let i_sum = intensity(&f.add(&f0).unwrap());
            let i_f = intensity(&f);
            let r = retrieve_source(&i_sum, Some(&i_f).filter(|_| mode == GeometryMode::Disjoint), &f0, &geom, 1e-8)
                .unwrap();
            assert!(relative_error(&r.field, &f) < 1e-10, "trial {trial} {mode:?}");
        }
    }
}

#[test]
fn violated_separation_breaks_retrieval() {
    // dist(D, D0) = 1 < diam D = 2 while the far-apart formula is applied
    let d = SupportDomain::box_domain(&[1, 0], &[3, 0]).unwrap();
    let d0 = SupportDomain::singleton(2, lattice_helmholtz::lattice::Point::origin()).unwrap();
    let geom = SupportGeometry::unchecked(d.clone(), d0, GeometryMode::FarApart).unwrap();
    let f = LatticeField::from_values(&d, &[c(1.0, 0.5), c(-0.8, 0.2), c(0.4, -1.1)]).unwrap();
    let f0 = delta(2, &[0, 0]);
    let n = geom.min_grid_size();
    let i_sum = dft(&f.add(&f0).unwrap(), n, Convention::CenteredAtO).unwrap().map(|v| c(v.norm_sqr(), 0.0));
    let r = retrieve_source(&i_sum, None, &f0, &geom, 1e-8).unwrap();
    assert!(r.field.diff_l2(&f) > 1e-3);
}

#[test]
fn hand_worked_one_dimensional_example() {
    let f0 = delta(1, &[0]);
    let f = LatticeField::delta(1, pt(&[5]), c(2.0, 0.0)).unwrap();
    let geom = SupportGeometry::new(
        SupportDomain::singleton(1, pt(&[5])).unwrap(),
        SupportDomain::singleton(1, pt(&[0])).unwrap(),
        GeometryMode::FarApart,
    )
    .unwrap();
    let n = geom.min_grid_size();
    let i_sum = dft(&f.add(&f0).unwrap(), n, Convention::CenteredAtO).unwrap().map(|v| c(v.norm_sqr(), 0.0));
    let r = retrieve_source(&i_sum, None, &f0, &geom, 1e-8).unwrap();
    assert!(r.field.max_abs_diff(&f) <= 1e-10);
}
