//! Simplex projection against its KKT conditions and a dense-grid oracle.

use ddio_core::learner::project_simplex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// KKT certificate for the Euclidean projection of `v` onto
/// `{ w >= offset, sum w = 1 + D * offset }`: there is a multiplier `tau`
/// with `w_i = max(offset, v_i - tau)`, and clamped coordinates satisfy
/// `v_i - tau <= offset`.
fn kkt_holds(v: &[f64], w: &[f64], offset: f64, tol: f64) -> bool {
    let d = v.len() as f64;
    let sum: f64 = w.iter().sum();
    if (sum - (1.0 + d * offset)).abs() > tol {
        return false;
    }
    if w.iter().any(|&x| x < offset - tol) {
        return false;
    }
    // Recover tau from any interior coordinate.
    let mut tau: Option<f64> = None;
    for (&vi, &wi) in v.iter().zip(w) {
        if wi > offset + tol {
            let t = vi - wi;
            match tau {
                None => tau = Some(t),
                Some(t0) => {
                    if (t - t0).abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    let tau = match tau {
        Some(t) => t,
        // All coordinates clamped: the sum constraint pins them anyway.
        None => return true,
    };
    v.iter().zip(w).all(|(&vi, &wi)| {
        if wi <= offset + tol {
            vi - tau <= offset + tol
        } else {
            true
        }
    })
}

#[test]
fn kkt_on_1000_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9ec7);
    for case in 0..1000 {
        let d = rng.random_range(1..=16);
        let offset = [0.0, 1e-3, 0.05][rng.random_range(0..3)];
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let w = project_simplex(&v, offset);
        assert!(
            kkt_holds(&v, &w.0, offset, 1e-8),
            "case {case}: KKT failed for v={v:?} w={:?} offset={offset}",
            w.0
        );
    }
}

#[test]
fn idempotent_and_nonexpansive() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1de);
    for _ in 0..500 {
        let d = rng.random_range(1..=16);
        let offset = [0.0, 1e-3][rng.random_range(0..2)];
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let pu = project_simplex(&u, offset);
        let pv = project_simplex(&v, offset);
        let ppu = project_simplex(&pu.0, offset);
        let drift: f64 = pu
            .0
            .iter()
            .zip(&ppu.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(drift <= 1e-9, "projection not idempotent: drift {drift}");
        let d_in: f64 =
            u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let d_out: f64 =
            pu.0.iter().zip(&pv.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(d_out <= d_in + 1e-9, "expansion: {d_out} > {d_in}");
    }
}

/// Coarse independent check: on a dense grid over the 3-simplex, no grid
/// point is meaningfully closer to `v` than the reported projection.
#[test]
fn grid_oracle_d3() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x97d);
    let steps = 60usize;
    for _ in 0..25 {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let w = project_simplex(&v, 0.0);
        let dist_w: f64 =
            v.iter().zip(&w.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let mut best_grid = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let k = steps - i - j;
                let g = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    k as f64 / steps as f64,
                ];
                let d: f64 =
                    v.iter().zip(&g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                best_grid = best_grid.min(d);
            }
        }
        // Grid resolution bounds how much better the best grid point can be.
        assert!(dist_w <= best_grid + 2.0 / steps as f64);
    }
}
