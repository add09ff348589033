use num_complex::Complex64;
use proptest::prelude::*;
use qrs_core::lattice::{enumerate_triples, Mode, ModeSet, DEFAULT_BUDGET};
use qrs_core::resonant::{
    galilean_boost, nonlinearity_direct, nonlinearity_factored, DirectTable, ResonantSolver, VecState,
};

const LX: f64 = 24.0;

/// Random smooth state: per-mode complex weight on a shared Gaussian with a
/// per-mode shift.
fn state(radius: u32, nx: usize, w: &[(f64, f64, f64)]) -> VecState {
    let modes = ModeSet::new(radius);
    let idx = modes.clone();
    VecState::from_fn(modes, LX, nx, |p, x| {
        let (re, im, c) = w[idx.index_of(p).unwrap() % w.len()];
        let decay = (-(p.norm_sq() as f64) / 6.0).exp();
        Complex64::new(re, im) * decay * (-(x - c) * (x - c) / 4.0).exp()
    })
    .unwrap()
}

fn weights() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5, -2.0f64..2.0), 25)
}

fn max_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn factored_matches_direct(w in weights(), radius in 1u32..=2) {
        let s = state(radius, 16, &w);
        let t = enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap();
        let d = nonlinearity_direct(&s, &DirectTable::new(&s.modes, &t).unwrap()).unwrap();
        let f = nonlinearity_factored(&s, &t).unwrap();
        prop_assert!(max_diff(&d, &f) <= 1e-12 * max_abs(&d));
    }

    /// `N(λ e^{iθ} u) = λ⁵ e^{iθ} N(u)`.
    #[test]
    fn nonlinearity_is_gauge_covariant_and_quintic(w in weights(), lambda in 0.2f64..3.0, theta in 0.0f64..6.3) {
        let s = state(1, 16, &w);
        let t = enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap();
        let c = Complex64::from_polar(lambda, theta);
        let a = nonlinearity_factored(&s.scaled(c), &t).unwrap();
        let b: Vec<Vec<Complex64>> = nonlinearity_factored(&s, &t)
            .unwrap()
            .into_iter()
            .map(|f| f.into_iter().map(|z| z * c * lambda.powi(4)).collect())
            .collect();
        prop_assert!(max_diff(&a, &b) <= 1e-12 * max_abs(&b));
    }

    /// `u_p ↦ e^{i p·θ} u_p` (translation in y) commutes with `N`.
    #[test]
    fn y_translation_symmetry(w in weights(), t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let s = state(2, 16, &w);
        let t = enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap();
        let phase = |p: Mode| Complex64::from_polar(1.0, p.px as f64 * t1 + p.py as f64 * t2);
        let mut shifted = s.clone();
        for (f, p) in shifted.fields.iter_mut().zip(s.modes.modes()) {
            f.iter_mut().for_each(|z| *z *= phase(*p));
        }
        let a = nonlinearity_factored(&shifted, &t).unwrap();
        let mut b = nonlinearity_factored(&s, &t).unwrap();
        for (f, p) in b.iter_mut().zip(s.modes.modes()) {
            f.iter_mut().for_each(|z| *z *= phase(*p));
        }
        prop_assert!(max_diff(&a, &b) <= 1e-12 * max_abs(&b));
    }

    /// A common phase commutes with a Strang step.
    #[test]
    fn step_is_gauge_invariant(w in weights(), theta in 0.0f64..6.3) {
        let s = state(1, 64, &w);
        let solver = ResonantSolver::for_radius(1, LX, 64).unwrap();
        let c = Complex64::from_polar(1.0, theta);
        let a = solver.step_strang(&s.scaled(c), 0.01).unwrap();
        let b = solver.step_strang(&s, 0.01).unwrap().scaled(c);
        prop_assert!(max_diff(&a.fields, &b.fields) <= 1e-13 * max_abs(&b.fields));
    }
}

/// Boost-then-evolve equals evolve-then-boost up to discretization error.
#[test]
fn galilean_covariance() {
    let w: Vec<(f64, f64, f64)> = (0..25).map(|i| (0.3 * ((i * 7) % 5) as f64 / 5.0, 0.1, 0.0)).collect();
    let (lx, nx) = (64.0, 512);
    let modes = ModeSet::new(1);
    let idx = modes.clone();
    let s0 = VecState::from_fn(modes, lx, nx, |p, x| {
        let (re, im, _) = w[idx.index_of(p).unwrap()];
        Complex64::new(re + 0.1, im) * 0.5 * (-x * x / 8.0).exp()
    })
    .unwrap();
    let solver = ResonantSolver::for_radius(1, lx, nx).unwrap();
    let xi0 = 2.0 * std::f64::consts::PI / lx * 3.0;
    let (t_end, dt) = (0.5, 1e-3);
    let opts = qrs_core::resonant::EvolveOptions { cadence: 100, store_snapshots: false };
    let boosted = galilean_boost(&s0, xi0).unwrap();
    let ev = solver.evolve(&boosted, t_end, dt, &opts).unwrap();
    assert!(ev.max_tail < 1e-10, "tail {:e}", ev.max_tail);
    let a = ev.final_state;
    let b = galilean_boost(&solver.evolve(&s0, t_end, dt, &opts).unwrap().final_state, xi0).unwrap();
    let err = a.l2_distance(&b).unwrap() / b.l2_norm();
    assert!(err < 1e-6, "relative L2 difference {err:e}");
}
