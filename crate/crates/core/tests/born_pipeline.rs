mod common;

use common::*;
use lattice_helmholtz::born::{
    born_amplitude, born_batch, born_nonuniqueness, born_phaseless_reconstruct, born_reconstruct,
    build_born_operator, lippmann_schwinger_solve, IncidentWave,
};
use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::ResolventConfig;
use lattice_helmholtz::geometry::{circle_directions, direction_grid, validate_lambda, Direction};
use lattice_helmholtz::lattice::{LatticeField, SupportDomain};
use lattice_helmholtz::phase::{GeometryMode, PhaselessOptions};

#[test]
fn born_error_scales_quadratically() {
    let mut rng = InstanceRng::new(3);
    let d = SupportDomain::box_domain(&[0, 0], &[1, 1]).unwrap();
    let v1 = rng.field(&d);
    let inc = &incidents(5, 2.0, 0.3)[2];
    let omegas = circle_directions(6, 0.1);
    let ts = [1e-3, 3e-3, 1e-2, 3e-2];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for t in ts {
        let v = v1.scale(c(t, 0.0));
        let sol = lippmann_schwinger_solve(&v, inc, &ResolventConfig::default(), 1e-16, 500).unwrap();
        let err: f64 = omegas
            .iter()
            .map(|w| (sol.amplitude(w).unwrap() - born_amplitude(&v, inc, w).unwrap()).norm_sqr())
            .sum::<f64>()
            .sqrt();
        xs.push(t.ln());
        ys.push(err.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn round_trip_on_three_by_three_box() {
    let mut rng = InstanceRng::new(8);
    let d = SupportDomain::box_domain(&[-1, -1], &[1, 1]).unwrap();
    let v = rng.field(&d);
    let data = born_batch(&v, &incidents(16, 2.0, 0.05), &circle_directions(32, 0.0)).unwrap();
    let (rec, diag) = born_reconstruct(&data, &d).unwrap();
    assert!(relative_error(&rec, &v) <= 1e-8 * diag.cond);
}

#[test]
fn single_sample_scalar_recovery() {
    let d = SupportDomain::singleton(2, pt(&[0, 0])).unwrap();
    let v = LatticeField::delta(2, pt(&[0, 0]), c(0.3, -0.7)).unwrap();
    let data = born_batch(&v, &incidents(1, 2.0, 0.0), &[Direction::from_angle(1.0)]).unwrap();
    let (rec, _) = born_reconstruct(&data, &d).unwrap();
    assert!(rec.max_abs_diff(&v) < 1e-14);
}

#[test]
fn stability_bound_on_random_pairs() {
    let mut rng = InstanceRng::new(21);
    let d = SupportDomain::box_domain(&[-1, -1], &[1, 1]).unwrap();
    let incs = incidents(12, 2.0, 0.2);
    let omegas = circle_directions(16, 0.0);
    let pairs: Vec<(IncidentWave, Direction)> = incs
        .iter()
        .flat_map(|i| omegas.iter().map(move |w| (i.clone(), w.clone())))
        .collect();
    let op = build_born_operator(&d, &pairs).unwrap();
    let cst = op.stability_constant().unwrap();
    for _ in 0..50 {
        let v1 = rng.field(&d);
        let v2 = rng.field(&d);
        let dv = v2.sub(&v1).unwrap();
        assert!(dv.norm_l2() <= cst * op.apply(&dv).norm() * (1.0 + 1e-12));
    }
    let e = op.extremal_source();
    assert!((e.norm_l2() - cst * op.apply(&e).norm()).abs() <= 1e-10 * e.norm_l2());
}

#[test]
fn modulated_sources_are_invisible_at_their_incident_vectors() {
    let mut rng = InstanceRng::new(2);
    let u = rng.field(&SupportDomain::box_domain(&[0, 0], &[1, 1]).unwrap());
    let incs = incidents(4, 2.0, 0.7);
    let chosen = [incs[0].clone(), incs[2].clone()];
    let v = born_nonuniqueness(&u, &chosen).unwrap();
    let omegas = direction_grid(2, 256).unwrap();
    for inc in &chosen {
        let worst = omegas
            .iter()
            .map(|w| born_amplitude(&v, inc, w).unwrap().norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "{worst:e}");
    }
    let other = &incs[1];
    let control = omegas
        .iter()
        .map(|w| born_amplitude(&v, other, w).unwrap().norm())
        .fold(0.0, f64::max);
    assert!(control > 1e-3);
    // the spectral identity v^(p) = u^(p) prod (phi(p + k_j) - lambda)
    for p in [[0.4, -1.3], [2.9, 0.1], [-0.6, -0.6]] {
        let mut want = u.fourier_at(&p);
        for inc in &chosen {
            let q = [p[0] + inc.k()[0], p[1] + inc.k()[1]];
            want *= lattice_helmholtz::geometry::phi(&q) - 2.0;
        }
        assert!((v.fourier_at(&p) - want).norm() <= 1e-12);
    }
}

fn phaseless_case(gap: i64, mode: GeometryMode, seed: u64) -> f64 {
    let geom = two_point_setup(gap, mode);
    let mut rng = InstanceRng::new(seed);
    let v = rng.field(&geom.domain);
    let v0 = delta(2, &[0, 0]);
    let incs = incidents(32, 2.0, 0.0);
    let omegas = circle_directions(32, 0.05);
    let sum = born_intensities(&v.add(&v0).unwrap(), &incs, &omegas);
    let alone = (mode == GeometryMode::Disjoint).then(|| born_intensities(&v, &incs, &omegas));
    let (rec, _) = born_phaseless_reconstruct(&sum, alone.as_deref(), &v0, &geom, &PhaselessOptions::default()).unwrap();
    relative_error(&rec, &v)
}

#[test]
fn phaseless_born_far_apart() {
    let e = phaseless_case(6, GeometryMode::FarApart, 4);
    assert!(e < 1e-8, "{e:e}");
}

#[test]
fn phaseless_born_disjoint() {
    let e = phaseless_case(2, GeometryMode::Disjoint, 5);
    assert!(e < 1e-8, "{e:e}");
}

#[test]
fn mixed_lambda_samples_are_accepted() {
    let mut rng = InstanceRng::new(9);
    let d = SupportDomain::box_domain(&[0, 0], &[1, 1]).unwrap();
    let v = rng.field(&d);
    let mut data = born_batch(&v, &incidents(4, 1.5, 0.0), &circle_directions(8, 0.0)).unwrap();
    data.extend(born_batch(&v, &incidents(4, -2.5, 0.0), &circle_directions(8, 0.0)).unwrap());
    let (rec, diag) = born_reconstruct(&data, &d).unwrap();
    assert!(relative_error(&rec, &v) <= 1e-8 * diag.cond);
    assert!(validate_lambda(-2.5, 2).is_ok());
}
