//! Brute-force reference implementation.
//!
//! Elements are enumerated by breadth-first search over the Cayley graph
//! with respect to the simple reflections, acting by right multiplication on
//! explicit one-line representations (permutations, signed permutations,
//! dihedral pairs). BFS depth equals Coxeter length, so the depth histogram
//! is the exact inversion distribution, and the number of generators that
//! decrease the depth of an element is its descent count. Nothing here
//! shares code with the generating-function routes in [`crate::statistics`];
//! the test suites compare the two integer-for-integer.

use std::collections::VecDeque;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::groups::{FactorKind, GroupDescriptor};
use crate::statistics::{self, Pmf, Statistic};
use crate::{Error, Result};

/// Default ceiling on the enumeration code space.
pub const DEFAULT_ORACLE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
enum FactorState {
    /// One-line permutation of {0, …, m-1} (type A with m = rank+1 letters).
    Perm(Vec<u8>),
    /// Signed one-line notation, entries ±1 … ±n (types B and D).
    Signed(Vec<i8>),
    /// ρ^rot σ^refl in the dihedral group of order 2m.
    Dihedral { rot: u32, refl: bool },
}

impl FactorState {
    fn identity(kind: FactorKind, param: u64) -> FactorState {
        match kind {
            FactorKind::A => FactorState::Perm((0..=param as u8).collect()),
            FactorKind::B | FactorKind::D => {
                FactorState::Signed((1..=param as i8).collect())
            }
            FactorKind::I2 => FactorState::Dihedral { rot: 0, refl: false },
        }
    }

    /// Dense index into the factor's code space.
    fn index(&self, m: u64) -> usize {
        match self {
            FactorState::Perm(w) => lehmer_rank(w),
            FactorState::Signed(w) => {
                let abs: Vec<u8> = w.iter().map(|&v| v.unsigned_abs() - 1).collect();
                let mut sign_bits = 0usize;
                for (i, &v) in w.iter().enumerate() {
                    if v < 0 {
                        sign_bits |= 1 << i;
                    }
                }
                lehmer_rank(&abs) * (1usize << w.len()) + sign_bits
            }
            FactorState::Dihedral { rot, refl } => {
                *rot as usize + if *refl { m as usize } else { 0 }
            }
        }
    }

    /// Right multiplication by the `gen`-th simple reflection.
    fn apply(&self, kind: FactorKind, m: u64, gen: usize) -> FactorState {
        match self {
            FactorState::Perm(w) => {
                let mut w = w.clone();
                w.swap(gen, gen + 1);
                FactorState::Perm(w)
            }
            FactorState::Signed(w) => {
                let mut w = w.clone();
                match (kind, gen) {
                    (FactorKind::B, 0) => w[0] = -w[0],
                    (FactorKind::D, 0) => {
                        let (a, b) = (w[0], w[1]);
                        w[0] = -b;
                        w[1] = -a;
                    }
                    (_, i) => w.swap(i - 1, i),
                }
                FactorState::Signed(w)
            }
            FactorState::Dihedral { rot, refl } => {
                let m = m as u32;
                if gen == 0 {
                    FactorState::Dihedral { rot: *rot, refl: !refl }
                } else if !*refl {
                    FactorState::Dihedral { rot: (rot + 1) % m, refl: true }
                } else {
                    FactorState::Dihedral { rot: (rot + m - 1) % m, refl: false }
                }
            }
        }
    }
}

fn lehmer_rank(w: &[u8]) -> usize {
    let n = w.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller = w[i + 1..].iter().filter(|&&v| v < w[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

fn code_space(kind: FactorKind, param: u64, cap: u64) -> Result<usize> {
    let mut size = 1u64;
    let mul = |size: u64, f: u64| -> Result<u64> {
        size.checked_mul(f)
            .filter(|&s| s <= cap)
            .ok_or_else(|| Error::CapExceeded(format!("oracle code space exceeds cap {cap}")))
    };
    match kind {
        FactorKind::A => {
            for k in 2..=param + 1 {
                size = mul(size, k)?;
            }
        }
        // D shares B's code space; only the even-sign half is reachable
        FactorKind::B | FactorKind::D => {
            for k in 2..=param {
                size = mul(size, k)?;
            }
            size = mul(size, 1 << param)?;
        }
        FactorKind::I2 => size = 2 * param,
    }
    if size > cap {
        return Err(Error::CapExceeded(format!(
            "oracle code space {size} exceeds cap {cap}"
        )));
    }
    Ok(size as usize)
}

/// Exact inversion and descent histograms from exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct OracleCensus {
    pub inv_counts: Vec<u64>,
    pub des_counts: Vec<u64>,
    pub order: u64,
}

impl OracleCensus {
    pub fn counts(&self, stat: Statistic) -> &[u64] {
        match stat {
            Statistic::Inv => &self.inv_counts,
            Statistic::Des => &self.des_counts,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,inv_count,des_count")?;
        let rows = self.inv_counts.len().max(self.des_counts.len());
        for k in 0..rows {
            let inv = self.inv_counts.get(k).copied().unwrap_or(0);
            let des = self.des_counts.get(k).copied().unwrap_or(0);
            writeln!(w, "{k},{inv},{des}")?;
        }
        Ok(())
    }
}

/// Enumerate the whole group by BFS and tally lengths and descents.
///
/// Hard invariants — checked, not assumed: every Cayley edge connects
/// lengths differing by exactly one, the element count matches the group
/// order, the longest element is unique with length equal to the number of
/// reflections, and both histograms are palindromic.
pub fn enumerate(g: &GroupDescriptor, cap: u64) -> Result<OracleCensus> {
    let factors = g.factors();
    let mut strides = Vec::with_capacity(factors.len());
    let mut total: usize = 1;
    for f in factors {
        let size = code_space(f.kind(), f.param(), cap)?;
        strides.push(total);
        total = total
            .checked_mul(size)
            .filter(|&t| t as u64 <= cap)
            .ok_or_else(|| {
                Error::CapExceeded(format!("oracle code space exceeds cap {cap}"))
            })?;
    }

    // (factor, generator-within-factor) pairs for the product group
    let mut gens = Vec::new();
    for (fi, f) in factors.iter().enumerate() {
        for gi in 0..f.rank() as usize {
            gens.push((fi, gi));
        }
    }

    let index_of = |state: &[FactorState]| -> usize {
        state
            .iter()
            .zip(factors)
            .zip(&strides)
            .map(|((s, f), stride)| s.index(f.param()) * stride)
            .sum()
    };

    let identity: Vec<FactorState> = factors
        .iter()
        .map(|f| FactorState::identity(f.kind(), f.param()))
        .collect();

    let mut depth = vec![u32::MAX; total];
    depth[index_of(&identity)] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(identity);
    let mut visited: Vec<Vec<FactorState>> = Vec::new();

    while let Some(state) = queue.pop_front() {
        let d = depth[index_of(&state)];
        for &(fi, gi) in &gens {
            let mut next = state.clone();
            next[fi] = next[fi].apply(factors[fi].kind(), factors[fi].param(), gi);
            let idx = index_of(&next);
            if depth[idx] == u32::MAX {
                depth[idx] = d + 1;
                queue.push_back(next);
            } else if depth[idx].abs_diff(d) != 1 {
                return Err(Error::Invariant(format!(
                    "Cayley edge between lengths {d} and {} in {g}",
                    depth[idx]
                )));
            }
        }
        visited.push(state);
    }

    let order = visited.len() as u64;
    if BigUint::from(order) != g.order() {
        return Err(Error::Invariant(format!(
            "BFS reached {order} elements of {g}, order is {}",
            g.order()
        )));
    }

    let refl = g.reflection_count() as usize;
    let rank = g.rank() as usize;
    let mut inv_counts = vec![0u64; refl + 1];
    let mut des_counts = vec![0u64; rank + 1];
    for state in &visited {
        let d = depth[index_of(state)];
        if d as usize > refl {
            return Err(Error::Invariant(format!(
                "element of length {d} exceeds reflection count {refl} in {g}"
            )));
        }
        let mut descents = 0usize;
        for &(fi, gi) in &gens {
            let mut next = state.clone();
            next[fi] = next[fi].apply(factors[fi].kind(), factors[fi].param(), gi);
            if depth[index_of(&next)] < d {
                descents += 1;
            }
        }
        inv_counts[d as usize] += 1;
        des_counts[descents] += 1;
    }

    if inv_counts[refl] != 1 {
        return Err(Error::Invariant(format!(
            "{} elements of maximal length in {g}, expected the longest element to be unique",
            inv_counts[refl]
        )));
    }
    let palindromic =
        |c: &[u64]| (0..c.len() / 2).all(|i| c[i] == c[c.len() - 1 - i]);
    if !palindromic(&inv_counts) || !palindromic(&des_counts) {
        return Err(Error::Invariant(format!("non-palindromic histogram for {g}")));
    }

    Ok(OracleCensus {
        inv_counts,
        des_counts,
        order,
    })
}

/// PMF of a statistic straight from the brute-force census.
pub fn oracle_pmf(g: &GroupDescriptor, stat: Statistic, cap: u64) -> Result<Pmf> {
    let census = enumerate(g, cap)?;
    let counts = census
        .counts(stat)
        .iter()
        .map(|&c| BigUint::from(c))
        .collect();
    statistics::pmf_from_counts(counts, stat, g.clone())
}

/// Outcome of comparing the closed-form routes against the oracle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub group: String,
    pub order: u64,
    pub inv_ok: bool,
    pub des_ok: bool,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.inv_ok && self.des_ok
    }
}

/// Compare the exact Mahonian and Eulerian count vectors against the
/// brute-force census.
pub fn verify(g: &GroupDescriptor, cap: u64) -> Result<VerifyReport> {
    let census = enumerate(g, cap)?;
    let as_u64 = |pmf: &Pmf| -> Vec<u64> {
        pmf.exact_counts
            .as_ref()
            .expect("small groups always carry exact counts")
            .iter()
            .map(|c| c.to_u64().expect("within u64 below cap"))
            .collect()
    };
    let inv_ok = as_u64(&statistics::mahonian_pmf(g, true)?) == census.inv_counts;
    let des_ok = as_u64(&statistics::eulerian_pmf(g)?) == census.des_counts;
    Ok(VerifyReport {
        group: g.to_string(),
        order: census.order,
        inv_ok,
        des_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupDescriptor {
        GroupDescriptor::parse(s).unwrap()
    }

    #[test]
    fn census_a2() {
        let c = enumerate(&g("A2"), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(c.inv_counts, [1, 2, 2, 1]);
        assert_eq!(c.des_counts, [1, 4, 1]);
    }

    #[test]
    fn census_b2() {
        let c = enumerate(&g("B2"), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(c.inv_counts, [1, 2, 2, 2, 1]);
        assert_eq!(c.des_counts, [1, 6, 1]);
    }

    #[test]
    fn census_d3_matches_a3() {
        let d3 = enumerate(&g("D3"), DEFAULT_ORACLE_CAP).unwrap();
        let a3 = enumerate(&g("A3"), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(d3.inv_counts, a3.inv_counts);
        assert_eq!(d3.des_counts, a3.des_counts);
        assert_eq!(d3.order, 24);
    }

    #[test]
    fn census_dihedral() {
        for m in 3..=10 {
            let c = enumerate(&g(&format!("I2({m})")), DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(c.order, 2 * m);
            assert_eq!(c.des_counts, [1, 2 * m - 2, 1]);
            let mut want = vec![2u64; m as usize + 1];
            want[0] = 1;
            want[m as usize] = 1;
            assert_eq!(c.inv_counts, want);
        }
    }

    #[test]
    fn verify_small_groups() {
        for name in ["A1", "A4", "B3", "D4", "I2(7)", "A2 x A2", "A1 x I2(5)"] {
            let report = verify(&g(name), DEFAULT_ORACLE_CAP).unwrap();
            assert!(report.all_ok(), "{name}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate(&g("A20"), DEFAULT_ORACLE_CAP),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn csv_export() {
        let c = enumerate(&g("A2"), DEFAULT_ORACLE_CAP).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,inv_count,des_count\n0,1,1\n1,2,4\n"));
    }
}
