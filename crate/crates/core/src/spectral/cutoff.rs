//! Smooth cutoffs: `η = 1` on `|x| ≤ 1`, `η = 0` on `|x| ≥ 2`.

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// `η(x) = b(2-|x|) / (b(2-|x|) + b(|x|-1))` with `b(s) = e^{-1/s}` for `s > 0`.
pub fn eta(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let lo = bump(2.0 - a);
    lo / (lo + bump(a - 1.0))
}

/// `η_{≤N}(r) = η(r / N)`.
pub fn eta_cutoff(r: f64, scale: f64) -> f64 {
    eta(r / scale)
}

/// Dyadic piece `η_N = η_{≤N} - η_{≤N/2}` (and `η_1 = η_{≤1}`).
pub fn eta_piece(r: f64, n: f64) -> f64 {
    if n <= 1.0 {
        eta_cutoff(r, 1.0)
    } else {
        eta_cutoff(r, n) - eta_cutoff(r, n / 2.0)
    }
}

/// `η_{≥N} = 1 - η_{≤N/2}`.
pub fn eta_high(r: f64, n: f64) -> f64 {
    1.0 - eta_cutoff(r, n / 2.0)
}

/// Tensor cutoff `η³_{≤N}(ξ, k1, k2) = η(ξ/N) η(k1/N) η(k2/N)`.
pub fn eta3_low(xi: f64, k1: f64, k2: f64, n: f64) -> f64 {
    eta_cutoff(xi, n) * eta_cutoff(k1, n) * eta_cutoff(k2, n)
}

pub fn is_dyadic(n: f64) -> bool {
    n >= 1.0 && n.log2().fract() == 0.0
}

/// Dyadic scales `1, 2, 4, …` whose pieces can be nonzero for frequencies
/// up to `max_freq` (those with `N/2 < max_freq`). The last scale is `≥ max_freq`.
pub fn dyadic_scales(max_freq: f64) -> Vec<f64> {
    let mut out = vec![1.0];
    let mut n = 2.0;
    while n / 2.0 < max_freq {
        out.push(n);
        n *= 2.0;
    }
    out
}
