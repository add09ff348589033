//! Weyl-sum kernel `K_N(y, t) = Σ_k [η(k1/N) η(k2/N)]² e^{i(y·k + t|k|²)}` on `𝕋²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::cutoff::{eta_cutoff, is_dyadic};
use crate::error::{invalid, Result};

fn weight(k: i64, n: f64) -> f64 {
    eta_cutoff(k as f64, n)
}

/// Frequencies with nonzero weight: `|k_i| < 2N`.
fn support(n: f64) -> i64 {
    (2.0 * n).ceil() as i64 - 1
}

/// Side of the square y-grid: the smallest power of two `≥ 8N`.
pub fn weyl_grid_side(n: f64) -> usize {
    ((8.0 * n).ceil() as usize).next_power_of_two()
}

/// Direct evaluation of `K_N(y, t)` at one point.
pub fn weyl_kernel_at(n: f64, t: f64, y: (f64, f64)) -> Complex64 {
    let s = support(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for k1 in -s..=s {
        for k2 in -s..=s {
            let w = weight(k1, n) * weight(k2, n);
            let phase = y.0 * k1 as f64 + y.1 * k2 as f64 + t * (k1 * k1 + k2 * k2) as f64;
            acc += Complex64::from_polar(w * w, phase);
        }
    }
    acc
}

/// `|K_N(·, t)|` on the grid `y = 2π (j1, j2) / m`, row-major in `(j1, j2)`.
pub fn weyl_kernel_grid(n: f64, t: f64) -> Result<(usize, Vec<f64>)> {
    if !is_dyadic(n) {
        return Err(invalid("N", format!("{n} is not dyadic")));
    }
    let m = weyl_grid_side(n);
    let s = support(n);
    let mut a = vec![Complex64::new(0.0, 0.0); m * m];
    for k1 in -s..=s {
        for k2 in -s..=s {
            let w = weight(k1, n) * weight(k2, n);
            let i1 = k1.rem_euclid(m as i64) as usize;
            let i2 = k2.rem_euclid(m as i64) as usize;
            a[i1 * m + i2] = Complex64::from_polar(w * w, t * (k1 * k1 + k2 * k2) as f64);
        }
    }
    // Unnormalized inverse DFT along both axes: Σ_k a_k e^{+2πi j·k / m}.
    let fft = FftPlanner::new().plan_fft_inverse(m);
    fft.process(&mut a);
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for j2 in 0..m {
        for j1 in 0..m {
            col[j1] = a[j1 * m + j2];
        }
        fft.process(&mut col);
        for j1 in 0..m {
            a[j1 * m + j2] = col[j1];
        }
    }
    Ok((m, a.iter().map(|z| z.norm()).collect()))
}

pub fn weyl_kernel_sup(n: f64, t: f64) -> Result<f64> {
    let (_, v) = weyl_kernel_grid(n, t)?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

/// Grid point `y = 2π j / m`.
pub fn weyl_grid_point(m: usize, j1: usize, j2: usize) -> (f64, f64) {
    (2.0 * PI * j1 as f64 / m as f64, 2.0 * PI * j2 as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squared_weight_sum(n: f64) -> f64 {
        let s = support(n);
        let one: f64 = (-s..=s).map(|k| weight(k, n).powi(2)).sum();
        one * one
    }

    #[test]
    fn time_zero_peak_is_weight_sum() {
        for n in [1.0, 2.0, 8.0] {
            let sup = weyl_kernel_sup(n, 0.0).unwrap();
            let expect = squared_weight_sum(n);
            assert!((sup - expect).abs() < 1e-10 * expect);
            let (_, v) = weyl_kernel_grid(n, 0.0).unwrap();
            assert!((v[0] - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn grid_matches_direct_sum() {
        let n = 4.0;
        let t = PI;
        let (m, v) = weyl_kernel_grid(n, t).unwrap();
        assert!(m >= 32);
        for (j1, j2) in [(0, 0), (1, 5), (16, 16), (31, 2), (7, 30)] {
            let direct = weyl_kernel_at(n, t, weyl_grid_point(m, j1, j2)).norm();
            assert!((v[j1 * m + j2] - direct).abs() < 1e-10, "{j1},{j2}");
        }
    }

    #[test]
    fn irrational_time_decays() {
        let t = 2.0 * PI * (5f64.sqrt() - 1.0) / 2.0;
        assert!(weyl_kernel_sup(16.0, t).unwrap() < weyl_kernel_sup(16.0, 0.0).unwrap());
    }
}
