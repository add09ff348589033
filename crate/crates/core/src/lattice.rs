//! Integer lattice bookkeeping for the resonant interactions on Z².
//!
//! A quintuple `(p1, .., p5)` is resonant for the output mode `j` when
//!
//! ```text
//! p1 - p2 + p3 - p4 + p5 = j
//! |p1|² - |p2|² + |p3|² - |p4|² + |p5|² = |j|²
//! ```
//!
//! Both identities are checked in exact integer arithmetic. Two enumerations
//! are provided: an exhaustive five-fold scan, and a factored one that groups
//! `(p1, p2, p3)` by their partial momentum `q = p1 - p2 + p3` and partial
//! energy `n = |p1|² - |p2|² + |p3|²`, after which `p5 = j + p4 - q` is forced
//! and only the energy identity for `p5` remains to be tested.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of candidate checks an enumeration may perform.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A Fourier index on the two-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub px: i64,
    pub py: i64,
}

impl Mode {
    pub const ZERO: Mode = Mode { px: 0, py: 0 };

    pub const fn new(px: i64, py: i64) -> Self {
        Mode { px, py }
    }

    pub fn norm_sq(self) -> i64 {
        self.px * self.px + self.py * self.py
    }

    /// `⟨p⟩² = 1 + |p|²`
    pub fn bracket_sq(self) -> f64 {
        1.0 + self.norm_sq() as f64
    }

    pub fn sup_norm(self) -> i64 {
        self.px.abs().max(self.py.abs())
    }

    pub fn swap(self) -> Self {
        Mode::new(self.py, self.px)
    }
}

impl std::ops::Add for Mode {
    type Output = Mode;
    fn add(self, o: Mode) -> Mode {
        Mode::new(self.px + o.px, self.py + o.py)
    }
}

impl std::ops::Sub for Mode {
    type Output = Mode;
    fn sub(self, o: Mode) -> Mode {
        Mode::new(self.px - o.px, self.py - o.py)
    }
}

impl std::ops::Neg for Mode {
    type Output = Mode;
    fn neg(self) -> Mode {
        Mode::new(-self.px, -self.py)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.px, self.py)
    }
}

/// The sup-norm box `{p : |p|∞ ≤ radius}`, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSet {
    radius: u32,
    modes: Vec<Mode>,
}

impl ModeSet {
    pub fn new(radius: u32) -> Self {
        let r = radius as i64;
        let modes = (-r..=r)
            .flat_map(|px| (-r..=r).map(move |py| Mode::new(px, py)))
            .collect();
        ModeSet { radius, modes }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn contains(&self, p: Mode) -> bool {
        p.sup_norm() <= self.radius as i64
    }

    /// Position of `p` in the canonical (lexicographic) order.
    pub fn index_of(&self, p: Mode) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let r = self.radius as i64;
        let side = 2 * r + 1;
        Some(((p.px + r) * side + (p.py + r)) as usize)
    }

    pub fn require(&self, p: Mode) -> Result<usize> {
        self.index_of(p).ok_or(Error::ModeOutside {
            px: p.px,
            py: p.py,
            radius: self.radius,
        })
    }

    /// Modes on the truncation boundary `|p|∞ = radius`.
    pub fn is_boundary(&self, p: Mode) -> bool {
        p.sup_norm() == self.radius as i64
    }
}

/// A resonant quintuple for the output mode `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResonantTuple {
    pub p: [Mode; 5],
    pub j: Mode,
}

impl ResonantTuple {
    pub fn momentum_residual(&self) -> Mode {
        let [p1, p2, p3, p4, p5] = self.p;
        p1 - p2 + p3 - p4 + p5 - self.j
    }

    /// `Φ = |p1|² - |p2|² + |p3|² - |p4|² + |p5|² - |j|²`
    pub fn phase(&self) -> i64 {
        let [p1, p2, p3, p4, p5] = self.p;
        p1.norm_sq() - p2.norm_sq() + p3.norm_sq() - p4.norm_sq() + p5.norm_sq() - self.j.norm_sq()
    }

    pub fn is_resonant(&self) -> bool {
        self.momentum_residual() == Mode::ZERO && self.phase() == 0
    }
}

/// Key of the triple decomposition: partial momentum and partial energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleKey {
    pub q: Mode,
    pub n: i64,
}

/// All triples `(p1, p2, p3)` over a mode set, grouped by `(q, n)`.
#[derive(Debug, Clone)]
pub struct TripleTable {
    radius: u32,
    entries: BTreeMap<TripleKey, Vec<[Mode; 3]>>,
}

impl TripleTable {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn entries(&self) -> &BTreeMap<TripleKey, Vec<[Mode; 3]>> {
        &self.entries
    }

    pub fn get(&self, q: Mode, n: i64) -> Option<&[[Mode; 3]]> {
        self.entries.get(&TripleKey { q, n }).map(Vec::as_slice)
    }

    pub fn num_keys(&self) -> usize {
        self.entries.len()
    }

    pub fn num_triples(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Re-checks both defining identities for every stored triple.
    pub fn verify(&self) -> bool {
        self.entries.iter().all(|(key, triples)| {
            triples.iter().all(|&[p1, p2, p3]| {
                p1 - p2 + p3 == key.q && p1.norm_sq() - p2.norm_sq() + p3.norm_sq() == key.n
            })
        })
    }

    /// Inclusive range of the partial energy `n` for the given radius.
    pub fn energy_range(radius: u32) -> (i64, i64) {
        let m = 2 * (radius as i64) * (radius as i64);
        (-m, 2 * m)
    }
}

fn check_budget(what: &'static str, needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::Capacity {
            what,
            needed,
            budget,
        })
    } else {
        Ok(())
    }
}

pub fn enumerate_triples(modes: &ModeSet, budget: u64) -> Result<TripleTable> {
    if modes.is_empty() {
        return Err(crate::error::invalid("modes", "empty mode set"));
    }
    check_budget("triple table", (modes.len() as u128).pow(3), budget)?;
    let mut entries: BTreeMap<TripleKey, Vec<[Mode; 3]>> = BTreeMap::new();
    let ms = modes.modes();
    for &p1 in ms {
        for &p2 in ms {
            for &p3 in ms {
                let key = TripleKey {
                    q: p1 - p2 + p3,
                    n: p1.norm_sq() - p2.norm_sq() + p3.norm_sq(),
                };
                entries.entry(key).or_default().push([p1, p2, p3]);
            }
        }
    }
    // Insertion already follows the lexicographic order of (p1, p2, p3).
    Ok(TripleTable {
        radius: modes.radius(),
        entries,
    })
}

/// Exhaustive scan of `modes⁵`.
pub fn enumerate_resonances_bruteforce(
    j: Mode,
    modes: &ModeSet,
    budget: u64,
) -> Result<Vec<ResonantTuple>> {
    modes.require(j)?;
    check_budget("quintuple scan", (modes.len() as u128).pow(5), budget)?;
    let ms = modes.modes();
    let jn = j.norm_sq();
    let mut out = Vec::new();
    for &p1 in ms {
        for &p2 in ms {
            for &p3 in ms {
                for &p4 in ms {
                    for &p5 in ms {
                        if p1 - p2 + p3 - p4 + p5 == j
                            && p1.norm_sq() - p2.norm_sq() + p3.norm_sq() - p4.norm_sq()
                                + p5.norm_sq()
                                == jn
                        {
                            out.push(ResonantTuple {
                                p: [p1, p2, p3, p4, p5],
                                j,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Enumeration through the triple table: for each `(q, n)` and each `p4`,
/// `p5 = j + p4 - q` must lie in the set with `|p5|² = |j|² + |p4|² - n`.
pub fn enumerate_resonances_factored(
    j: Mode,
    modes: &ModeSet,
    triples: &TripleTable,
) -> Result<Vec<ResonantTuple>> {
    modes.require(j)?;
    if triples.radius() != modes.radius() {
        return Err(crate::error::invalid(
            "triples",
            format!(
                "table radius {} does not match mode set radius {}",
                triples.radius(),
                modes.radius()
            ),
        ));
    }
    let jn = j.norm_sq();
    let mut out = Vec::new();
    for (key, list) in triples.entries() {
        for &p4 in modes.modes() {
            let p5 = j + p4 - key.q;
            if modes.contains(p5) && p5.norm_sq() == jn + p4.norm_sq() - key.n {
                out.extend(list.iter().map(|&[p1, p2, p3]| ResonantTuple {
                    p: [p1, p2, p3, p4, p5],
                    j,
                }));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Rational point of the plane.
pub type RationalPoint = (Ratio<i64>, Ratio<i64>);

fn lcm(a: i128, b: i128) -> i128 {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    a / gcd(a, b) * b
}

fn exact_isqrt(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let mut r = (v as f64).sqrt() as i128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    (r * r == v).then_some(r)
}

/// Number of `p ∈ Z²` with `|p - center|² = radius_sq` and `|p| ≥ min_norm`.
pub fn circle_lattice_count(center: RationalPoint, radius_sq: Ratio<i64>, min_norm: f64) -> u64 {
    circle_lattice_points(center, radius_sq, min_norm).len() as u64
}

/// The lattice points themselves, in lexicographic order.
pub fn circle_lattice_points(
    center: RationalPoint,
    radius_sq: Ratio<i64>,
    min_norm: f64,
) -> Vec<Mode> {
    let (cx, cy) = center;
    if radius_sq < Ratio::from_integer(0) {
        return Vec::new();
    }
    // Common denominator: center = (x/l, y/l), radius² = rn/rd.
    let l = lcm(*cx.denom() as i128, *cy.denom() as i128);
    let x = *cx.numer() as i128 * (l / *cx.denom() as i128);
    let y = *cy.numer() as i128 * (l / *cy.denom() as i128);
    let rn = *radius_sq.numer() as i128;
    let rd = *radius_sq.denom() as i128;

    let r = (rn as f64 / rd as f64).sqrt();
    let cxf = x as f64 / l as f64;
    let lo = (cxf - r).floor() as i64 - 1;
    let hi = (cxf + r).ceil() as i64 + 1;
    let min_sq = min_norm * min_norm;

    let mut pts = Vec::new();
    for px in lo..=hi {
        // rd·(l·py − y)² = l²·rn − rd·(l·px − x)²
        let dx = l * px as i128 - x;
        let rhs = l * l * rn - rd * dx * dx;
        if rhs < 0 || rhs % rd != 0 {
            continue;
        }
        let Some(s) = exact_isqrt(rhs / rd) else {
            continue;
        };
        let mut cands = vec![y + s];
        if s != 0 {
            cands.push(y - s);
        }
        cands.sort_unstable();
        for t in cands {
            if t % l != 0 {
                continue;
            }
            let p = Mode::new(px, (t / l) as i64);
            if p.norm_sq() as f64 >= min_sq {
                pts.push(p);
            }
        }
    }
    pts
}

/// `⟨j⟩² Σ_{R(j)} Π ⟨p_i⟩⁻²` over the truncated resonant set.
pub fn sumlem_statistic(j: Mode, modes: &ModeSet, triples: &TripleTable) -> Result<f64> {
    let tuples = enumerate_resonances_factored(j, modes, triples)?;
    let sum: f64 = tuples
        .iter()
        .map(|t| 1.0 / t.p.iter().map(|p| p.bracket_sq()).product::<f64>())
        .sum();
    Ok(j.bracket_sq() * sum)
}

/// Statistic for every `j` in the set, in canonical order.
pub fn sumlem_sweep(modes: &ModeSet, budget: u64) -> Result<Vec<(Mode, f64)>> {
    let triples = enumerate_triples(modes, budget)?;
    modes
        .modes()
        .iter()
        .map(|&j| Ok((j, sumlem_statistic(j, modes, &triples)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn mode_set_shape() {
        let m = ModeSet::new(2);
        assert_eq!(m.len(), 25);
        assert!(m.modes().windows(2).all(|w| w[0] < w[1]));
        for (i, &p) in m.modes().iter().enumerate() {
            assert_eq!(m.index_of(p), Some(i));
            assert!(m.contains(-p) && m.contains(p.swap()));
        }
        assert!(m.contains(Mode::ZERO));
        assert_eq!(m.index_of(Mode::new(3, 0)), None);
    }

    #[test]
    fn radius_zero_table() {
        let m = ModeSet::new(0);
        let t = enumerate_triples(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.num_keys(), 1);
        assert_eq!(t.get(Mode::ZERO, 0).unwrap(), &[[Mode::ZERO; 3]]);
    }

    #[test]
    fn radius_one_table_counts() {
        let m = ModeSet::new(1);
        let t = enumerate_triples(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.num_triples(), 729);
        assert!(t.verify());
        let (lo, hi) = TripleTable::energy_range(1);
        assert!(t.entries().keys().all(|k| k.n >= lo && k.n <= hi));
    }

    #[test]
    fn capacity_is_enforced() {
        let m = ModeSet::new(2);
        assert!(matches!(
            enumerate_resonances_bruteforce(Mode::ZERO, &m, 1000),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            enumerate_triples(&m, 100),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn trivial_tuples_present() {
        let m = ModeSet::new(1);
        let j = Mode::new(1, -1);
        let all = enumerate_resonances_bruteforce(j, &m, DEFAULT_BUDGET).unwrap();
        assert!(all.contains(&ResonantTuple { p: [j; 5], j }));
        for &a in m.modes() {
            for &b in m.modes() {
                assert!(all.contains(&ResonantTuple {
                    p: [a, a, j, b, b],
                    j
                }));
            }
        }
    }

    #[test]
    fn golden_counts_radius_one() {
        // Frozen from an independent exhaustive scan.
        let m = ModeSet::new(1);
        for (j, count) in [((0, 0), 1033), ((1, 0), 1165), ((1, 1), 1027)] {
            let j = Mode::new(j.0, j.1);
            let v = enumerate_resonances_bruteforce(j, &m, DEFAULT_BUDGET).unwrap();
            assert_eq!(v.len(), count);
        }
    }

    #[test]
    fn factored_radius_zero_and_outside() {
        let m = ModeSet::new(0);
        let t = enumerate_triples(&m, DEFAULT_BUDGET).unwrap();
        let v = enumerate_resonances_factored(Mode::ZERO, &m, &t).unwrap();
        assert_eq!(v, vec![ResonantTuple { p: [Mode::ZERO; 5], j: Mode::ZERO }]);
        assert!(matches!(
            enumerate_resonances_factored(Mode::new(1, 0), &m, &t),
            Err(Error::ModeOutside { .. })
        ));
    }

    #[test]
    fn factored_matches_bruteforce_radius_one() {
        let m = ModeSet::new(1);
        let t = enumerate_triples(&m, DEFAULT_BUDGET).unwrap();
        for &j in m.modes() {
            let a = enumerate_resonances_bruteforce(j, &m, DEFAULT_BUDGET).unwrap();
            let b = enumerate_resonances_factored(j, &m, &t).unwrap();
            assert_eq!(a, b, "j = {j}");
        }
    }

    #[test]
    fn circle_examples() {
        let o = (r(0, 1), r(0, 1));
        assert_eq!(circle_lattice_count(o, r(25, 1), 0.0), 12);
        assert_eq!(circle_lattice_count(o, r(1, 1), 0.0), 4);
        assert_eq!(circle_lattice_count(o, r(0, 1), 0.0), 1);
        assert_eq!(circle_lattice_count((r(1, 2), r(0, 1)), r(3, 4), 0.0), 0);
        // (0,0), (1,0) are at distance² 1/4 from (1/2, 0)
        assert_eq!(circle_lattice_count((r(1, 2), r(0, 1)), r(1, 4), 0.0), 2);
        assert_eq!(circle_lattice_count(o, r(25, 1), 5.0), 12);
        assert_eq!(circle_lattice_count(o, r(-1, 1), 0.0), 0);
    }

    #[test]
    fn circle_min_norm_filters() {
        // Points on |p - (3,0)|² = 9 with |p| ≥ 3: everything except (0,0).
        let c = (r(3, 1), r(0, 1));
        let all = circle_lattice_count(c, r(9, 1), 0.0);
        let far = circle_lattice_count(c, r(9, 1), 3.0);
        assert_eq!(all, 4);
        assert_eq!(far, 3);
    }

    #[test]
    fn sumlem_radius_zero_is_one() {
        let m = ModeSet::new(0);
        let sweep = sumlem_sweep(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(sweep, vec![(Mode::ZERO, 1.0)]);
    }
}
