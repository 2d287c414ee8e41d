//! Walks the inverse Gauss map around the level curve `phi = lambda` in
//! two dimensions and prints the point, phase and curvature per direction.

use lattice_helmholtz::geometry::{band, circle_directions, exceptional_values, grad_phi, kappa, phi, validate_lambda};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (lo, hi) = band(2);
    println!("band {lo} < |lambda| < {hi}, exceptional values {:?}", exceptional_values(2));

    for lambda in [1.0, 2.0, 3.5, -2.0] {
        let sp = validate_lambda(lambda, 2)?;
        println!("\nlambda = {lambda} ({:?} branch)", sp.branch());
        println!("{:>8} {:>10} {:>10} {:>10} {:>10} {:>10}", "theta", "k1", "k2", "mu", "|grad|", "K");
        for w in circle_directions(8, 0.0) {
            let g = kappa(&w, &sp)?;
            let theta = w.as_slice()[1].atan2(w.as_slice()[0]);
            assert!((phi(&g.kappa) - lambda).abs() < 1e-12);
            let gr = grad_phi(&g.kappa);
            assert!((gr[0] / g.grad_norm - w.as_slice()[0]).abs() < 1e-10);
            println!(
                "{theta:>8.4} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
                g.kappa[0], g.kappa[1], g.mu, g.grad_norm, g.curvature
            );
        }
    }

    match validate_lambda(0.0, 2) {
        Ok(_) => println!("\nlambda = 0 accepted"),
        Err(e) => println!("\nlambda = 0 rejected: {e}"),
    }
    Ok(())
}
