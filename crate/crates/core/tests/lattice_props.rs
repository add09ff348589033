use num_rational::Ratio;
use proptest::prelude::*;
use qrs_core::lattice::{
    circle_lattice_count, enumerate_resonances_bruteforce, enumerate_resonances_factored, enumerate_triples,
    Mode, ModeSet, DEFAULT_BUDGET,
};

fn sorted(mut v: Vec<[Mode; 5]>) -> Vec<[Mode; 5]> {
    v.sort_unstable();
    v
}

#[test]
fn factored_equals_bruteforce_radius_le_2() {
    for radius in 0..=2 {
        let modes = ModeSet::new(radius);
        let triples = enumerate_triples(&modes, DEFAULT_BUDGET).unwrap();
        for &j in modes.modes() {
            let a = enumerate_resonances_factored(j, &modes, &triples).unwrap();
            let b = enumerate_resonances_bruteforce(j, &modes, DEFAULT_BUDGET).unwrap();
            assert_eq!(
                sorted(a.iter().map(|t| t.p).collect()),
                sorted(b.iter().map(|t| t.p).collect()),
                "radius {radius}, j = {j:?}"
            );
        }
    }
}

#[test]
fn origin_circle_of_radius_five() {
    let zero = Ratio::from_integer(0);
    assert_eq!(circle_lattice_count((zero, zero), Ratio::from_integer(25), 0.0), 12);
}

#[test]
fn origin_circles_partition_a_box() {
    // Every p with |p|² ≤ 2·R² lies on exactly one origin circle.
    let zero = Ratio::from_integer(0);
    let r = 12i64;
    let total: u64 = (0..=2 * r * r)
        .map(|n| circle_lattice_count((zero, zero), Ratio::from_integer(n), 0.0))
        .sum();
    let direct = (-2 * r..=2 * r)
        .flat_map(|x| (-2 * r..=2 * r).map(move |y| (x, y)))
        .filter(|(x, y)| x * x + y * y <= 2 * r * r)
        .count();
    assert_eq!(total, direct as u64);
}

fn mode_in(radius: i64) -> impl Strategy<Value = Mode> {
    (-radius..=radius, -radius..=radius).prop_map(|(x, y)| Mode::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Permuting (p1, p3, p5) or swapping (p2, p4) keeps a tuple resonant;
    /// the enumeration is closed under both.
    #[test]
    fn resonant_set_is_permutation_invariant(j in mode_in(2), perm in 0usize..6, swap in any::<bool>()) {
        let modes = ModeSet::new(2);
        let triples = enumerate_triples(&modes, DEFAULT_BUDGET).unwrap();
        let list = sorted(enumerate_resonances_factored(j, &modes, &triples).unwrap().iter().map(|t| t.p).collect());
        const PERMS: [[usize; 3]; 6] = [[0, 2, 4], [0, 4, 2], [2, 0, 4], [2, 4, 0], [4, 0, 2], [4, 2, 0]];
        let o = PERMS[perm];
        let moved = sorted(list.iter().map(|p| {
            let mut q = *p;
            q[0] = p[o[0]];
            q[2] = p[o[1]];
            q[4] = p[o[2]];
            if swap {
                q.swap(1, 3);
            }
            q
        }).collect());
        prop_assert_eq!(moved, list);
    }

    /// Negating every mode maps R(j) onto R(-j).
    #[test]
    fn conjugation_symmetry(j in mode_in(2)) {
        let modes = ModeSet::new(2);
        let triples = enumerate_triples(&modes, DEFAULT_BUDGET).unwrap();
        let neg = |m: Mode| Mode::new(-m.px, -m.py);
        let a = sorted(enumerate_resonances_factored(j, &modes, &triples).unwrap().iter().map(|t| t.p.map(neg)).collect());
        let b = sorted(enumerate_resonances_factored(neg(j), &modes, &triples).unwrap().iter().map(|t| t.p).collect());
        prop_assert_eq!(a, b);
    }

    /// Counts against a direct scan of a box around the circle.
    #[test]
    fn circle_count_matches_scan(cx in -20i64..20, cy in -20i64..20, den in 1i64..4, r2 in 0i64..200, a in 0.0f64..5.0) {
        let c = (Ratio::new(cx, den), Ratio::new(cy, den));
        let r2q = Ratio::new(r2, den * den);
        let bound = 40;
        let scan = (-bound..=bound)
            .flat_map(|x| (-bound..=bound).map(move |y| (x, y)))
            .filter(|&(x, y)| {
                let dx = Ratio::from_integer(x) - c.0;
                let dy = Ratio::from_integer(y) - c.1;
                dx * dx + dy * dy == r2q && ((x * x + y * y) as f64) >= a * a
            })
            .count() as u64;
        prop_assert_eq!(circle_lattice_count(c, r2q, a), scan);
    }
}
