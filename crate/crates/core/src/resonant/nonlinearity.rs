//! Quintic resonant nonlinearity `N_j = Σ_{R(j)} u_{p1} ū_{p2} u_{p3} ū_{p4} u_{p5}`.
//!
//! Two evaluations are provided: a direct sum over the enumerated resonant
//! quintuples, and a factored one through the partial sums
//! `T_{q,n} = Σ_{p1-p2+p3=q, |p1|²-|p2|²+|p3|²=n} u_{p1} ū_{p2} u_{p3}`.
//!
//! The factored form splits a quintuple as `(p1, p2, p3 | p4, p5)`:
//!
//! ```text
//! N_j = Σ_{(d, f)} B_{d,f} · T_{j-d, |j|²-f},   B_{d,f} = Σ_{p5-p4=d, |p5|²-|p4|²=f} ū_{p4} u_{p5}
//! T_{q,n} = Σ_{p2} ū_{p2} · A_{q+p2, n+|p2|²}, A_{s,e} = Σ_{p1+p3=s, |p1|²+|p3|²=e} u_{p1} u_{p3}
//! ```
//!
//! Every product is pointwise in `x`, so fields are processed in fixed-size
//! x-chunks that stay in cache. All sums run in a fixed order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::state::VecState;
use crate::error::{invalid, Result};
use crate::lattice::{enumerate_resonances_factored, Mode, ModeSet, TripleKey, TripleTable};

const CHUNK: usize = 16;
type Lane = [Complex64; CHUNK];
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_table(modes: &ModeSet, table_radius: u32) -> Result<()> {
    if modes.radius() != table_radius {
        return Err(invalid(
            "table",
            format!("built for radius {table_radius}, state has radius {}", modes.radius()),
        ));
    }
    Ok(())
}

/// Resonant quintuples of every output mode as mode indices.
#[derive(Debug, Clone)]
pub struct DirectTable {
    radius: u32,
    tuples: Vec<Vec<[u16; 5]>>,
}

impl DirectTable {
    pub fn new(modes: &ModeSet, triples: &TripleTable) -> Result<Self> {
        check_table(modes, triples.radius())?;
        let mut tuples = Vec::with_capacity(modes.len());
        for &j in modes.modes() {
            let list = enumerate_resonances_factored(j, modes, triples)?;
            tuples.push(
                list.iter()
                    .map(|t| t.p.map(|p| modes.index_of(p).unwrap() as u16))
                    .collect(),
            );
        }
        Ok(DirectTable { radius: modes.radius(), tuples })
    }

    pub fn num_tuples(&self) -> usize {
        self.tuples.iter().map(Vec::len).sum()
    }

    /// Complex multiplications per grid point.
    pub fn mults_per_point(&self) -> u64 {
        4 * self.num_tuples() as u64
    }
}

pub fn nonlinearity_direct(s: &VecState, table: &DirectTable) -> Result<Vec<Vec<Complex64>>> {
    check_table(&s.modes, table.radius)?;
    let u = &s.fields;
    let mut out = vec![vec![ZERO; s.nx]; u.len()];
    for (j, tuples) in table.tuples.iter().enumerate() {
        let acc = &mut out[j];
        for &[a, b, c, d, e] in tuples {
            let (ua, ub, uc, ud, ue) = (
                &u[a as usize],
                &u[b as usize],
                &u[c as usize],
                &u[d as usize],
                &u[e as usize],
            );
            for x in 0..s.nx {
                acc[x] += ua[x] * ub[x].conj() * uc[x] * ud[x].conj() * ue[x];
            }
        }
    }
    Ok(out)
}

/// Contiguous groups of terms: `ranges[g]..ranges[g+1]` indexes `terms`.
#[derive(Debug, Clone, Default)]
struct Groups<T> {
    ranges: Vec<u32>,
    terms: Vec<T>,
}

impl<T> Groups<T> {
    fn from_lists(lists: impl IntoIterator<Item = Vec<T>>) -> Self {
        let mut g = Groups { ranges: vec![0], terms: Vec::new() };
        for list in lists {
            g.terms.extend(list);
            g.ranges.push(g.terms.len() as u32);
        }
        g
    }

    fn len(&self) -> usize {
        self.ranges.len() - 1
    }

    fn group(&self, i: usize) -> &[T] {
        &self.terms[self.ranges[i] as usize..self.ranges[i + 1] as usize]
    }
}

/// Operation counts of one nonlinearity evaluation, per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub direct_mults: u64,
    pub factored_mults: u64,
}

/// Precomputed index structure for the factored nonlinearity and for the
/// quartic part of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct FactoredPlan {
    radius: u32,
    n_modes: usize,
    keys: Vec<TripleKey>,
    /// `A` classes: `(a, b, weight)` with `a ≤ b`; weight 2 counts `(a,b)` and `(b,a)`.
    pair_sums: Groups<(u16, u16, f64)>,
    /// Per key: `(p2, A class)`.
    triple_sums: Groups<(u16, u32)>,
    /// `B` classes: `(p4, p5)`.
    conj_pairs: Groups<(u16, u16)>,
    /// Per output mode: `(B class, key)`.
    assembly: Groups<(u32, u32)>,
    direct_mults: u64,
}

impl FactoredPlan {
    pub fn new(modes: &ModeSet, triples: &TripleTable) -> Result<Self> {
        check_table(modes, triples.radius())?;
        let ms = modes.modes();
        let idx = |p: Mode| modes.index_of(p).unwrap() as u16;

        let mut a_classes: BTreeMap<(Mode, i64), Vec<(u16, u16, f64)>> = BTreeMap::new();
        for (ia, &pa) in ms.iter().enumerate() {
            for &pb in &ms[ia..] {
                let w = if pa == pb { 1.0 } else { 2.0 };
                a_classes
                    .entry((pa + pb, pa.norm_sq() + pb.norm_sq()))
                    .or_default()
                    .push((idx(pa), idx(pb), w));
            }
        }
        let a_index: BTreeMap<(Mode, i64), u32> =
            a_classes.keys().enumerate().map(|(i, k)| (*k, i as u32)).collect();

        let keys: Vec<TripleKey> = triples.entries().keys().copied().collect();
        let key_index: BTreeMap<TripleKey, u32> =
            keys.iter().enumerate().map(|(i, k)| (*k, i as u32)).collect();
        let mut triple_lists = Vec::with_capacity(keys.len());
        for key in &keys {
            let mut list = Vec::new();
            for &p2 in ms {
                if let Some(&a) = a_index.get(&(key.q + p2, key.n + p2.norm_sq())) {
                    list.push((idx(p2), a));
                }
            }
            triple_lists.push(list);
        }

        let mut b_classes: BTreeMap<(Mode, i64), Vec<(u16, u16)>> = BTreeMap::new();
        for &p4 in ms {
            for &p5 in ms {
                b_classes
                    .entry((p5 - p4, p5.norm_sq() - p4.norm_sq()))
                    .or_default()
                    .push((idx(p4), idx(p5)));
            }
        }
        let mut assembly_lists = Vec::with_capacity(ms.len());
        for &j in ms {
            let mut list = Vec::new();
            for (bi, &(d, f)) in b_classes.keys().enumerate() {
                let key = TripleKey { q: j - d, n: j.norm_sq() - f };
                if let Some(&k) = key_index.get(&key) {
                    list.push((bi as u32, k));
                }
            }
            assembly_lists.push(list);
        }

        // Direct cost: each (j, B class, key) combination stands for
        // |B class| · |triples of key| quintuples.
        let b_sizes: Vec<u64> = b_classes.values().map(|v| v.len() as u64).collect();
        let direct: u64 = assembly_lists
            .iter()
            .flatten()
            .map(|&(bi, k)| b_sizes[bi as usize] * triples.entries()[&keys[k as usize]].len() as u64)
            .sum();

        Ok(FactoredPlan {
            radius: modes.radius(),
            n_modes: ms.len(),
            keys,
            pair_sums: Groups::from_lists(a_classes.into_values()),
            triple_sums: Groups::from_lists(triple_lists),
            conj_pairs: Groups::from_lists(b_classes.into_values()),
            assembly: Groups::from_lists(assembly_lists),
            direct_mults: 4 * direct,
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn keys(&self) -> &[TripleKey] {
        &self.keys
    }

    pub fn op_counts(&self) -> OpCounts {
        OpCounts {
            direct_mults: self.direct_mults,
            factored_mults: (self.pair_sums.terms.len()
                + self.triple_sums.terms.len()
                + self.conj_pairs.terms.len()
                + self.assembly.terms.len()) as u64,
        }
    }

    /// Number of resonant quintuples summed over all output modes.
    pub fn num_quintuples(&self) -> u64 {
        self.direct_mults / 4
    }

    fn check_state(&self, s: &VecState) -> Result<()> {
        check_table(&s.modes, self.radius)?;
        if s.fields.len() != self.n_modes {
            return Err(invalid("state", "field count does not match the mode set"));
        }
        Ok(())
    }

    fn load(&self, fields: &[Vec<Complex64>], x0: usize, n: usize, u: &mut [Lane]) {
        for (lane, f) in u.iter_mut().zip(fields) {
            lane[..n].copy_from_slice(&f[x0..x0 + n]);
            lane[n..].fill(ZERO);
        }
    }

    /// Flags the groups that can be nonzero given which modes are nonzero;
    /// everything else is skipped.
    fn support(&self, fields: &[Vec<Complex64>]) -> Support {
        let active: Vec<bool> = fields.iter().map(|f| f.iter().any(|z| *z != ZERO)).collect();
        let a: Vec<bool> = (0..self.pair_sums.len())
            .map(|g| {
                self.pair_sums
                    .group(g)
                    .iter()
                    .any(|&(i, j, _)| active[i as usize] && active[j as usize])
            })
            .collect();
        let t: Vec<bool> = (0..self.keys.len())
            .map(|k| {
                self.triple_sums
                    .group(k)
                    .iter()
                    .any(|&(p2, ai)| active[p2 as usize] && a[ai as usize])
            })
            .collect();
        let b: Vec<bool> = (0..self.conj_pairs.len())
            .map(|g| {
                self.conj_pairs
                    .group(g)
                    .iter()
                    .any(|&(p4, p5)| active[p4 as usize] && active[p5 as usize])
            })
            .collect();
        let dense = active.iter().all(|&x| x);
        Support { active, a, t, b, dense }
    }

    fn build_t(&self, sp: &Support, u: &[Lane], a: &mut [Lane], t: &mut [Lane]) {
        for (g, out) in a.iter_mut().enumerate() {
            if !sp.a[g] {
                continue;
            }
            *out = [ZERO; CHUNK];
            for &(ia, ib, w) in self.pair_sums.group(g) {
                if !sp.dense && !(sp.active[ia as usize] && sp.active[ib as usize]) {
                    continue;
                }
                let (ua, ub) = (&u[ia as usize], &u[ib as usize]);
                for c in 0..CHUNK {
                    out[c] += ua[c] * ub[c] * w;
                }
            }
        }
        for (k, out) in t.iter_mut().enumerate() {
            if !sp.t[k] {
                continue;
            }
            *out = [ZERO; CHUNK];
            for &(p2, ai) in self.triple_sums.group(k) {
                if !sp.dense && !(sp.active[p2 as usize] && sp.a[ai as usize]) {
                    continue;
                }
                let (u2, av) = (&u[p2 as usize], &a[ai as usize]);
                for c in 0..CHUNK {
                    out[c] += u2[c].conj() * av[c];
                }
            }
        }
    }

    /// Writes `N(u)` into `out` (same shape as `s.fields`).
    pub fn apply_into(&self, s: &VecState, out: &mut [Vec<Complex64>]) -> Result<()> {
        self.check_state(s)?;
        self.apply_fields(&s.fields, s.nx, out);
        Ok(())
    }

    pub(crate) fn apply_fields(&self, fields: &[Vec<Complex64>], nx: usize, out: &mut [Vec<Complex64>]) {
        let sp = self.support(fields);
        let mut u = vec![[ZERO; CHUNK]; self.n_modes];
        let mut a = vec![[ZERO; CHUNK]; self.pair_sums.len()];
        let mut t = vec![[ZERO; CHUNK]; self.keys.len()];
        let mut b = vec![[ZERO; CHUNK]; self.conj_pairs.len()];
        let mut x0 = 0;
        while x0 < nx {
            let n = CHUNK.min(nx - x0);
            self.load(fields, x0, n, &mut u);
            self.build_t(&sp, &u, &mut a, &mut t);
            for (g, acc) in b.iter_mut().enumerate() {
                if !sp.b[g] {
                    continue;
                }
                *acc = [ZERO; CHUNK];
                for &(p4, p5) in self.conj_pairs.group(g) {
                    if !sp.dense && !(sp.active[p4 as usize] && sp.active[p5 as usize]) {
                        continue;
                    }
                    let (u4, u5) = (&u[p4 as usize], &u[p5 as usize]);
                    for c in 0..CHUNK {
                        acc[c] += u4[c].conj() * u5[c];
                    }
                }
            }
            for (j, dst) in out.iter_mut().enumerate() {
                let mut acc = [ZERO; CHUNK];
                for &(bi, k) in self.assembly.group(j) {
                    if !(sp.b[bi as usize] && sp.t[k as usize]) {
                        continue;
                    }
                    let (bv, tv) = (&b[bi as usize], &t[k as usize]);
                    for c in 0..CHUNK {
                        acc[c] += bv[c] * tv[c];
                    }
                }
                dst[x0..x0 + n].copy_from_slice(&acc[..n]);
            }
            x0 += n;
        }
    }

    /// `Σ_{(q,n)} Σ_x |T_{q,n}(x)|²` (no quadrature weight).
    pub(crate) fn sum_t_squared(&self, fields: &[Vec<Complex64>], nx: usize) -> f64 {
        let sp = self.support(fields);
        let mut u = vec![[ZERO; CHUNK]; self.n_modes];
        let mut a = vec![[ZERO; CHUNK]; self.pair_sums.len()];
        let mut t = vec![[ZERO; CHUNK]; self.keys.len()];
        let mut per_key = vec![0.0; self.keys.len()];
        let mut x0 = 0;
        while x0 < nx {
            let n = CHUNK.min(nx - x0);
            self.load(fields, x0, n, &mut u);
            self.build_t(&sp, &u, &mut a, &mut t);
            for (k, acc) in per_key.iter_mut().enumerate() {
                if sp.t[k] {
                    *acc += t[k].iter().map(|z| z.norm_sqr()).sum::<f64>();
                }
            }
            x0 += n;
        }
        crate::spectral::norms::pairwise_sum(&per_key)
    }
}

struct Support {
    active: Vec<bool>,
    a: Vec<bool>,
    t: Vec<bool>,
    b: Vec<bool>,
    dense: bool,
}

pub fn nonlinearity_factored(s: &VecState, triples: &TripleTable) -> Result<Vec<Vec<Complex64>>> {
    let plan = FactoredPlan::new(&s.modes, triples)?;
    let mut out = vec![vec![ZERO; s.nx]; s.fields.len()];
    plan.apply_into(s, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_triples, DEFAULT_BUDGET};

    fn single_mode(radius: u32, c: Complex64) -> VecState {
        VecState::from_fn(ModeSet::new(radius), 5.0, 8, |p, _| {
            if p == Mode::ZERO {
                c
            } else {
                ZERO
            }
        })
        .unwrap()
    }

    #[test]
    fn single_mode_constant() {
        let c = Complex64::new(0.6, -0.3);
        for radius in [0, 1] {
            let s = single_mode(radius, c);
            let t = enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap();
            let expect = c * c.norm_sqr() * c.norm_sqr();
            let direct = nonlinearity_direct(&s, &DirectTable::new(&s.modes, &t).unwrap()).unwrap();
            let fact = nonlinearity_factored(&s, &t).unwrap();
            let j0 = s.modes.index_of(Mode::ZERO).unwrap();
            for (i, (d, f)) in direct.iter().zip(&fact).enumerate() {
                for x in 0..s.nx {
                    let e = if i == j0 { expect } else { ZERO };
                    assert!((d[x] - e).norm() < 1e-15);
                    assert!((f[x] - e).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn zero_state_and_radius_mismatch() {
        let s = VecState::zeros(ModeSet::new(1), 3.0, 4).unwrap();
        let t = enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap();
        let out = nonlinearity_factored(&s, &t).unwrap();
        assert!(out.iter().flatten().all(|z| *z == ZERO));
        let t0 = enumerate_triples(&ModeSet::new(0), DEFAULT_BUDGET).unwrap();
        assert!(nonlinearity_factored(&s, &t0).is_err());
        assert!(DirectTable::new(&s.modes, &t0).is_err());
    }

    #[test]
    fn quintuple_count_matches_direct_table() {
        let modes = ModeSet::new(1);
        let t = enumerate_triples(&modes, DEFAULT_BUDGET).unwrap();
        let plan = FactoredPlan::new(&modes, &t).unwrap();
        let direct = DirectTable::new(&modes, &t).unwrap();
        assert_eq!(plan.num_quintuples(), direct.num_tuples() as u64);
        assert_eq!(plan.op_counts().direct_mults, direct.mults_per_point());
    }
}
