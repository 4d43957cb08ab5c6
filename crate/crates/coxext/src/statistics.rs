//! Mahonian and Eulerian distributions, exact moments, sum decompositions,
//! and samplers for any [`GroupDescriptor`].
//!
//! The inversion generating function of a finite Coxeter group factors over
//! its degrees as Π (1 + z + … + z^(d-1)), so the Mahonian PMF is built by a
//! chain of uniform convolutions (floating) or an exact integer polynomial
//! product. The Eulerian polynomial is built per irreducible factor:
//!
//! * type A, rank r (letters m = r + 1):  E_m(k) = (k+1)·E_{m-1}(k) + (m-k)·E_{m-1}(k-1)
//! * type B:  B_n(k) = (2k+1)·B_{n-1}(k) + (2(n-k)+1)·B_{n-1}(k-1)
//! * type D:  D_n(t) = B_n(t) − n·2^(n-1)·t·E_{S_{n-1}}(t)
//! * I2(m):   1 + (2m-2)t + t²
//!
//! None of these closed routes is taken on faith: the oracle module
//! re-derives every histogram by brute force at small rank and the test
//! suites compare them integer-for-integer.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::groups::{FactorKind, GroupDescriptor, IrreducibleFactor};
use crate::polynomials::{compensated_sum, convolve, convolve_uniform, IntPolynomial, NeumaierSum};
use crate::rng::Stream;
use crate::{polynomials, Error, Result};

/// Largest reflection count for which the exact Mahonian count vector is
/// materialized.
pub const EXACT_MAHONIAN_CAP: u64 = 100_000;
/// Largest total rank for which Eulerian coefficients are kept as exact
/// integers (PMF counts, exact descent moments, root extraction).
pub const EXACT_EULERIAN_CAP: u64 = 300;
/// Per-factor rank cap for classical Eulerian recurrences.
pub const EULERIAN_FACTOR_RANK_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Inv,
    Des,
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistic::Inv => write!(f, "inv"),
            Statistic::Des => write!(f, "des"),
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inv" => Ok(Statistic::Inv),
            "des" => Ok(Statistic::Des),
            other => Err(Error::Domain(format!("unknown statistic '{other}'"))),
        }
    }
}

/// Probability mass function on {0, …, K} with optional exact counts.
#[derive(Debug, Clone)]
pub struct Pmf {
    pub mass: Vec<f64>,
    pub exact_counts: Option<Vec<BigUint>>,
    pub statistic: Statistic,
    pub group: GroupDescriptor,
}

impl Pmf {
    pub fn support_max(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(&self.mass)
    }

    /// tails[j] = P(X >= j), accumulated from the top of the support so the
    /// far tail keeps full relative accuracy. Length support+2; last entry 0.
    pub fn upper_tails(&self) -> Vec<f64> {
        let mut tails = vec![0.0; self.mass.len() + 1];
        let mut acc = NeumaierSum::new();
        for j in (0..self.mass.len()).rev() {
            acc.add(self.mass[j]);
            tails[j] = acc.value();
        }
        tails
    }

    /// Prefix CDF, cdf[j] = P(X <= j).
    pub fn cdf(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.mass.len());
        let mut acc = NeumaierSum::new();
        for &m in &self.mass {
            acc.add(m);
            out.push(acc.value().min(1.0));
        }
        out
    }

    pub fn mean_f64(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for (k, &m) in self.mass.iter().enumerate() {
            acc.add(k as f64 * m);
        }
        acc.value()
    }

    pub fn variance_f64(&self) -> f64 {
        let mean = self.mean_f64();
        let mut acc = NeumaierSum::new();
        for (k, &m) in self.mass.iter().enumerate() {
            let d = k as f64 - mean;
            acc.add(d * d * m);
        }
        acc.value()
    }

    pub fn is_palindromic(&self) -> bool {
        match &self.exact_counts {
            Some(c) => (0..c.len() / 2).all(|i| c[i] == c[c.len() - 1 - i]),
            None => {
                let n = self.mass.len();
                (0..n / 2).all(|i| {
                    let (a, b) = (self.mass[i], self.mass[n - 1 - i]);
                    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
                })
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "group": self.group.to_string(),
            "stat": self.statistic.to_string(),
            "support": self.support_max(),
            "mass": self.mass,
        });
        if let Some(counts) = &self.exact_counts {
            let counts: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            obj["counts"] = serde_json::json!(counts);
        }
        obj
    }

    /// CSV columns: k,count,mass (count omitted when not materialized).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        match &self.exact_counts {
            Some(counts) => {
                writeln!(w, "k,count,mass")?;
                for (k, (c, m)) in counts.iter().zip(self.mass.iter()).enumerate() {
                    writeln!(w, "{k},{c},{m}")?;
                }
            }
            None => {
                writeln!(w, "k,mass")?;
                for (k, m) in self.mass.iter().enumerate() {
                    writeln!(w, "{k},{m}")?;
                }
            }
        }
        Ok(())
    }
}

/// Exact mean and variance with floating mirrors.
#[derive(Debug, Clone)]
pub struct Moments {
    pub mean: BigRational,
    pub variance: BigRational,
    pub mean_f: f64,
    pub var_f: f64,
}

impl Moments {
    pub fn new(mean: BigRational, variance: BigRational) -> Self {
        let mean_f = mean.to_f64().unwrap_or(f64::NAN);
        let var_f = variance.to_f64().unwrap_or(f64::NAN);
        Self {
            mean,
            variance,
            mean_f,
            var_f,
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.var_f.sqrt()
    }
}

/// Success probabilities of the Bernoulli summands of the descent statistic,
/// pᵢ = 1/(1+qᵢ), sorted ascending. The raw roots qᵢ are kept alongside
/// (sorted descending, so q[i] corresponds to p[i]): reconstructing q from a
/// rounded p loses most of the precision of the small roots.
#[derive(Debug, Clone)]
pub struct BernoulliParams {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl BernoulliParams {
    pub fn sum(&self) -> f64 {
        compensated_sum(&self.p)
    }
}

/// Mahonian PMF over {0, …, reflection_count}. With `exact`, the count
/// vector is the exact coefficient list of Π (1 + z + … + z^(d-1)).
pub fn mahonian_pmf(g: &GroupDescriptor, exact: bool) -> Result<Pmf> {
    let degrees = g.degrees();
    if exact {
        let refl = g.reflection_count();
        if refl > EXACT_MAHONIAN_CAP {
            return Err(Error::CapExceeded(format!(
                "exact Mahonian support {refl} exceeds cap {EXACT_MAHONIAN_CAP}"
            )));
        }
        let mut poly = IntPolynomial::one();
        for &d in &degrees {
            poly = poly.multiply(&IntPolynomial::uniform_factor(d)?);
        }
        let counts: Vec<BigUint> = poly
            .coeffs()
            .iter()
            .map(|c| c.to_biguint().expect("nonnegative"))
            .collect();
        return pmf_from_counts(counts, Statistic::Inv, g.clone());
    }
    let mut mass = vec![1.0];
    for &d in &degrees {
        mass = convolve_uniform(&mass, d)?;
    }
    Ok(Pmf {
        mass,
        exact_counts: None,
        statistic: Statistic::Inv,
        group: g.clone(),
    })
}

pub(crate) fn pmf_from_counts(
    counts: Vec<BigUint>,
    statistic: Statistic,
    group: GroupDescriptor,
) -> Result<Pmf> {
    let order: BigUint = counts.iter().sum();
    if order != group.order() {
        return Err(Error::Invariant(format!(
            "count vector sums to {order}, group order is {}",
            group.order()
        )));
    }
    let order_int = BigInt::from(order);
    let mass: Vec<f64> = counts
        .iter()
        .map(|c| {
            BigRational::new(BigInt::from(c.clone()), order_int.clone())
                .to_f64()
                .unwrap_or(0.0)
        })
        .collect();
    Ok(Pmf {
        mass,
        exact_counts: Some(counts),
        statistic,
        group,
    })
}

// Exact per-factor Eulerian coefficient vectors.

fn eulerian_symmetric_letters(m: u64) -> Vec<BigInt> {
    // Eulerian numbers of the symmetric group on m letters (degree m-1).
    let mut e = vec![BigInt::one()];
    for letters in 2..=m {
        let mut next = vec![BigInt::zero(); e.len() + 1];
        for (k, c) in e.iter().enumerate() {
            next[k] += c * BigInt::from(k as u64 + 1);
            next[k + 1] += c * BigInt::from(letters - k as u64 - 1);
        }
        e = next;
    }
    e
}

fn eulerian_b(n: u64) -> Vec<BigInt> {
    let mut b = vec![BigInt::one()];
    for i in 1..=n {
        let mut next = vec![BigInt::zero(); b.len() + 1];
        for (k, c) in b.iter().enumerate() {
            next[k] += c * BigInt::from(2 * k as u64 + 1);
            next[k + 1] += c * BigInt::from(2 * (i - k as u64 - 1) + 1);
        }
        b = next;
    }
    b
}

fn eulerian_d(n: u64) -> Vec<BigInt> {
    // D_n(t) = B_n(t) − n·2^(n-1)·t·E_{S_{n-1}}(t); validated against the
    // brute-force oracle at ranks 2-4.
    let b = IntPolynomial::new(eulerian_b(n)).expect("nonzero");
    let s = IntPolynomial::new(eulerian_symmetric_letters(n - 1)).expect("nonzero");
    let corr = s
        .shift_up(1)
        .scale(&(BigInt::from(n) << (n as usize - 1)));
    b.sub(&corr).coeffs().to_vec()
}

fn eulerian_factor_exact(f: &IrreducibleFactor) -> Result<Vec<BigInt>> {
    if f.rank() > EULERIAN_FACTOR_RANK_CAP {
        return Err(Error::CapExceeded(format!(
            "factor rank {} exceeds Eulerian cap {EULERIAN_FACTOR_RANK_CAP}",
            f.rank()
        )));
    }
    Ok(match f.kind() {
        FactorKind::A => eulerian_symmetric_letters(f.param() + 1),
        FactorKind::B => eulerian_b(f.param()),
        FactorKind::D => eulerian_d(f.param()),
        FactorKind::I2 => vec![
            BigInt::one(),
            BigInt::from(2 * f.param() - 2),
            BigInt::one(),
        ],
    })
}

/// Exact Eulerian polynomial 𝒢_des of the whole group (product over factors).
pub fn eulerian_polynomial(g: &GroupDescriptor) -> Result<IntPolynomial> {
    let mut acc = IntPolynomial::one();
    for f in g.factors() {
        let fac = IntPolynomial::new(eulerian_factor_exact(f)?).expect("nonzero");
        acc = acc.multiply(&fac);
    }
    Ok(acc)
}

// Normalized (probability) per-factor Eulerian vectors, for ranks where the
// exact integers would be astronomically large.

fn eulerian_symmetric_letters_norm(m: u64) -> Vec<f64> {
    let mut e = vec![1.0];
    for letters in 2..=m {
        let mut next = vec![0.0; e.len() + 1];
        let inv = 1.0 / letters as f64;
        for (k, &c) in e.iter().enumerate() {
            next[k] += c * (k as u64 + 1) as f64 * inv;
            next[k + 1] += c * (letters - k as u64 - 1) as f64 * inv;
        }
        e = next;
    }
    e
}

fn eulerian_b_norm(n: u64) -> Vec<f64> {
    let mut b = vec![1.0];
    for i in 1..=n {
        let mut next = vec![0.0; b.len() + 1];
        let inv = 1.0 / (2 * i) as f64;
        for (k, &c) in b.iter().enumerate() {
            next[k] += c * (2 * k as u64 + 1) as f64 * inv;
            next[k + 1] += c * (2 * (i - k as u64 - 1) + 1) as f64 * inv;
        }
        b = next;
    }
    b
}

fn eulerian_factor_norm(f: &IrreducibleFactor) -> Result<Vec<f64>> {
    if f.rank() > EULERIAN_FACTOR_RANK_CAP {
        return Err(Error::CapExceeded(format!(
            "factor rank {} exceeds Eulerian cap {EULERIAN_FACTOR_RANK_CAP}",
            f.rank()
        )));
    }
    Ok(match f.kind() {
        FactorKind::A => eulerian_symmetric_letters_norm(f.param() + 1),
        FactorKind::B => eulerian_b_norm(f.param()),
        FactorKind::D => {
            let n = f.param();
            let b = eulerian_b_norm(n);
            let s = eulerian_symmetric_letters_norm(n - 1);
            // normalized mirror of the type-D identity; far-tail cells that
            // round below zero clamp to 0
            let mut out = vec![0.0; b.len()];
            for k in 0..b.len() {
                let corr = if k >= 1 && k - 1 < s.len() { s[k - 1] } else { 0.0 };
                out[k] = (2.0 * b[k] - corr).max(0.0);
            }
            out
        }
        FactorKind::I2 => {
            let m = f.param() as f64;
            vec![1.0 / (2.0 * m), (2.0 * m - 2.0) / (2.0 * m), 1.0 / (2.0 * m)]
        }
    })
}

/// Eulerian (descent) PMF over {0, …, rank}. Exact counts are attached when
/// the total rank is at most [`EXACT_EULERIAN_CAP`].
pub fn eulerian_pmf(g: &GroupDescriptor) -> Result<Pmf> {
    if g.rank() <= EXACT_EULERIAN_CAP {
        let poly = eulerian_polynomial(g)?;
        let counts: Vec<BigUint> = poly
            .coeffs()
            .iter()
            .map(|c| c.to_biguint().expect("nonnegative"))
            .collect();
        return pmf_from_counts(counts, Statistic::Des, g.clone());
    }
    let mut mass = vec![1.0];
    for f in g.factors() {
        let fac = eulerian_factor_norm(f)?;
        mass = convolve(&mass, &fac);
    }
    Ok(Pmf {
        mass,
        exact_counts: None,
        statistic: Statistic::Des,
        group: g.clone(),
    })
}

/// Bernoulli parameters pᵢ = 1/(1+qᵢ) from the roots of the Eulerian
/// polynomial. Roots are extracted per distinct irreducible factor and
/// unioned, so repeated factors contribute their root multiset directly.
pub fn descent_bernoulli_params(g: &GroupDescriptor, rel_tol: f64) -> Result<BernoulliParams> {
    if g.rank() > EXACT_EULERIAN_CAP {
        return Err(Error::CapExceeded(format!(
            "rank {} exceeds root-extraction cap {EXACT_EULERIAN_CAP}",
            g.rank()
        )));
    }
    let mut distinct: Vec<(IrreducibleFactor, usize)> = Vec::new();
    for f in g.factors() {
        match distinct.iter_mut().find(|(d, _)| d == f) {
            Some((_, count)) => *count += 1,
            None => distinct.push((*f, 1)),
        }
    }
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(g.rank() as usize);
    for (f, count) in distinct {
        let poly = IntPolynomial::new(eulerian_factor_exact(&f)?).expect("nonzero");
        let roots = polynomials::isolate_negative_real_roots(&poly, rel_tol)?;
        for q in roots.q {
            for _ in 0..count {
                pairs.push((1.0 / (1.0 + q), q));
            }
        }
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (p, q) = pairs.into_iter().unzip();
    Ok(BernoulliParams { p, q })
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn descent_variance_closed(f: &IrreducibleFactor) -> BigRational {
    // Validated against exact Eulerian coefficients in the tests below.
    match f.kind() {
        FactorKind::A => ratio(f.param() as i64 + 2, 12),
        FactorKind::B => ratio(f.param() as i64 + 1, 12),
        FactorKind::D => {
            if f.param() == 2 {
                ratio(1, 2)
            } else {
                ratio(f.param() as i64 + 2, 12)
            }
        }
        FactorKind::I2 => ratio(1, f.param() as i64),
    }
}

/// Exact mean and variance of the statistic.
///
/// Inversions use the degree decomposition: mean Σ(d-1)/2, variance
/// Σ(d²-1)/12. Descents use exact Eulerian coefficients up to
/// [`EXACT_EULERIAN_CAP`] and per-factor closed forms beyond; the mean is
/// asserted equal to rank/2 in either case.
pub fn moments(g: &GroupDescriptor, stat: Statistic) -> Result<Moments> {
    match stat {
        Statistic::Inv => {
            let mut num_mean = BigInt::zero();
            let mut num_var = BigInt::zero();
            for d in g.degrees() {
                let d = BigInt::from(d);
                num_mean += &d - 1;
                num_var += &d * &d - 1;
            }
            Ok(Moments::new(
                BigRational::new(num_mean, BigInt::from(2)),
                BigRational::new(num_var, BigInt::from(12)),
            ))
        }
        Statistic::Des => {
            let half_rank = BigRational::new(BigInt::from(g.rank()), BigInt::from(2));
            let (mean, variance) = if g.rank() <= EXACT_EULERIAN_CAP {
                let poly = eulerian_polynomial(g)?;
                let order = BigInt::from(g.order());
                let mut first = BigInt::zero();
                let mut second = BigInt::zero();
                for (k, c) in poly.coeffs().iter().enumerate() {
                    let k = BigInt::from(k);
                    first += &k * c;
                    second += &k * &k * c;
                }
                let mean = BigRational::new(first, order.clone());
                let var = BigRational::new(second, order) - &mean * &mean;
                (mean, var)
            } else {
                let var = g
                    .factors()
                    .iter()
                    .map(descent_variance_closed)
                    .fold(BigRational::zero(), |acc, v| acc + v);
                (half_rank.clone(), var)
            };
            if mean != half_rank {
                return Err(Error::Invariant(format!(
                    "descent mean {mean} != rank/2 for {g}"
                )));
            }
            Ok(Moments::new(mean, variance))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    Decomposition,
    InverseCdf,
}

impl std::str::FromStr for SampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decomposition" => Ok(SampleMethod::Decomposition),
            "inverse_cdf" | "inverse-cdf" => Ok(SampleMethod::InverseCdf),
            other => Err(Error::Domain(format!("unknown sample method '{other}'"))),
        }
    }
}

/// Prepared sampler; construction amortizes PMF materialization or root
/// extraction over many draws.
#[derive(Debug, Clone)]
pub enum Sampler {
    InverseCdf { cdf: Vec<f64> },
    DecompositionInv { degrees: Vec<u64> },
    DecompositionDes { p: Vec<f64> },
}

impl Sampler {
    pub fn new(g: &GroupDescriptor, stat: Statistic, method: SampleMethod) -> Result<Self> {
        match method {
            SampleMethod::InverseCdf => {
                let pmf = match stat {
                    Statistic::Inv => mahonian_pmf(g, false)?,
                    Statistic::Des => eulerian_pmf(g)?,
                };
                Ok(Sampler::InverseCdf { cdf: pmf.cdf() })
            }
            SampleMethod::Decomposition => match stat {
                Statistic::Inv => Ok(Sampler::DecompositionInv {
                    degrees: g.degrees(),
                }),
                Statistic::Des => {
                    let params = descent_bernoulli_params(g, 1e-12)?;
                    Ok(Sampler::DecompositionDes { p: params.p })
                }
            },
        }
    }

    #[inline]
    pub fn draw(&self, stream: &mut Stream) -> u64 {
        match self {
            Sampler::InverseCdf { cdf } => {
                let u = stream.next_f64();
                cdf.partition_point(|&c| c < u) as u64
            }
            Sampler::DecompositionInv { degrees } => {
                degrees.iter().map(|&d| stream.below(d)).sum()
            }
            Sampler::DecompositionDes { p } => {
                p.iter().filter(|&&pi| stream.next_f64() < pi).count() as u64
            }
        }
    }
}

/// Draw `count` i.i.d. samples of the statistic.
pub fn sample(
    g: &GroupDescriptor,
    stat: Statistic,
    count: usize,
    stream: &mut Stream,
    method: SampleMethod,
) -> Result<Vec<u64>> {
    let sampler = Sampler::new(g, stat, method)?;
    Ok((0..count).map(|_| sampler.draw(stream)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupDescriptor {
        GroupDescriptor::parse(s).unwrap()
    }

    fn counts(pmf: &Pmf) -> Vec<u64> {
        pmf.exact_counts
            .as_ref()
            .unwrap()
            .iter()
            .map(|c| c.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn mahonian_small_groups() {
        assert_eq!(counts(&mahonian_pmf(&g("A2"), true).unwrap()), [1, 2, 2, 1]);
        assert_eq!(counts(&mahonian_pmf(&g("A1"), true).unwrap()), [1, 1]);
        assert_eq!(
            counts(&mahonian_pmf(&g("I2(5)"), true).unwrap()),
            [1, 2, 2, 2, 2, 1]
        );
    }

    #[test]
    fn mahonian_float_matches_exact() {
        for name in ["A4", "B3", "D4", "B2 x I2(5)"] {
            let exact = mahonian_pmf(&g(name), true).unwrap();
            let float = mahonian_pmf(&g(name), false).unwrap();
            assert_eq!(exact.mass.len(), float.mass.len());
            for (a, b) in exact.mass.iter().zip(float.mass.iter()) {
                assert!((a - b).abs() < 1e-12, "{name}");
            }
        }
    }

    #[test]
    fn eulerian_small_groups() {
        let p = eulerian_polynomial(&g("A2")).unwrap();
        assert_eq!(p, IntPolynomial::from_u64(&[1, 4, 1]));
        let p = eulerian_polynomial(&g("B2")).unwrap();
        assert_eq!(p, IntPolynomial::from_u64(&[1, 6, 1]));
        // D3 ≅ A3
        let d3 = eulerian_polynomial(&g("D3")).unwrap();
        assert_eq!(d3, IntPolynomial::from_u64(&[1, 11, 11, 1]));
        assert_eq!(d3, eulerian_polynomial(&g("A3")).unwrap());
        // D2 ≅ A1 x A1
        assert_eq!(
            eulerian_polynomial(&g("D2")).unwrap(),
            eulerian_polynomial(&g("A1 x A1")).unwrap()
        );
    }

    #[test]
    fn eulerian_pmf_examples() {
        assert_eq!(counts(&eulerian_pmf(&g("A1")).unwrap()), [1, 1]);
        let a2 = eulerian_pmf(&g("A2")).unwrap();
        assert_eq!(counts(&a2), [1, 4, 1]);
        for m in [3u64, 5, 8] {
            let pmf = eulerian_pmf(&g(&format!("I2({m})"))).unwrap();
            let m = m as f64;
            let want = [1.0 / (2.0 * m), (2.0 * m - 2.0) / (2.0 * m), 1.0 / (2.0 * m)];
            for (a, b) in pmf.mass.iter().zip(want.iter()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn eulerian_float_route_matches_exact_at_moderate_rank() {
        for name in ["A40", "B35", "D30", "A10 x B5 x I2(9)"] {
            let desc = g(name);
            let exact = eulerian_pmf(&desc).unwrap();
            let mut mass = vec![1.0];
            for f in desc.factors() {
                mass = convolve(&mass, &eulerian_factor_norm(f).unwrap());
            }
            assert_eq!(exact.mass.len(), mass.len());
            for (a, b) in exact.mass.iter().zip(mass.iter()) {
                assert!((a - b).abs() <= 1e-12 * a.max(1e-30), "{name}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pmfs_are_palindromic() {
        for name in ["A4", "B3", "D4", "I2(7)", "A2 x A2", "A1 x I2(5)"] {
            assert!(mahonian_pmf(&g(name), true).unwrap().is_palindromic());
            assert!(eulerian_pmf(&g(name)).unwrap().is_palindromic());
        }
    }

    #[test]
    fn descent_generating_function_endpoints() {
        // 𝒢_des(0) = 1 and 𝒢_des(1) = |W| exactly
        for name in ["A5", "B4", "D4", "I2(9)", "A2 x I2(4)"] {
            let desc = g(name);
            let p = eulerian_polynomial(&desc).unwrap();
            assert_eq!(p.coeffs()[0], BigInt::one());
            assert_eq!(p.eval_one(), BigInt::from(desc.order()));
        }
    }

    #[test]
    fn bernoulli_params_examples() {
        let p = descent_bernoulli_params(&g("A1"), 1e-12).unwrap();
        assert_eq!(p.p.len(), 1);
        assert!((p.p[0] - 0.5).abs() < 1e-12);

        let p = descent_bernoulli_params(&g("I2(5)"), 1e-12).unwrap();
        assert!((p.p[0] - 0.112701665).abs() < 1e-8);
        assert!((p.p[1] - 0.887298334).abs() < 1e-8);
        assert!((p.sum() - 1.0).abs() < 1e-10);

        let p = descent_bernoulli_params(&g("A2"), 1e-12).unwrap();
        assert!((p.p[0] - 0.2113248654).abs() < 1e-9);
        assert!((p.p[1] - 0.7886751346).abs() < 1e-9);
    }

    #[test]
    fn bernoulli_params_sum_to_half_rank() {
        for name in ["A6", "B5", "D5", "A2 x A2", "A1 x I2(5)", "A1^4"] {
            let desc = g(name);
            let p = descent_bernoulli_params(&desc, 1e-12).unwrap();
            assert_eq!(p.p.len() as u64, desc.rank());
            assert!(
                (p.sum() - desc.rank() as f64 / 2.0).abs() < 1e-8,
                "{name}: {}",
                p.sum()
            );
            // Π qᵢ = 1
            let log_prod: f64 = p.p.iter().map(|&pi| ((1.0 - pi) / pi).ln()).sum();
            assert!(log_prod.abs() < 1e-8, "{name}");
        }
    }

    #[test]
    fn inv_moments_examples() {
        let m = moments(&g("I2(5)"), Statistic::Inv).unwrap();
        assert_eq!(m.mean, ratio(5, 2));
        assert_eq!(m.variance, ratio(27, 12));
        let m = moments(&g("A3"), Statistic::Inv).unwrap();
        assert_eq!(m.mean, ratio(6, 2));
        assert_eq!(m.variance, ratio(3 + 8 + 15, 12));
    }

    #[test]
    fn des_moments_examples() {
        for name in ["A5", "B3", "D4", "I2(6)", "A2 x I2(7)"] {
            let desc = g(name);
            let m = moments(&desc, Statistic::Des).unwrap();
            assert_eq!(m.mean, BigRational::new(BigInt::from(desc.rank()), BigInt::from(2)));
        }
        for m_param in 3..=12i64 {
            let mom = moments(&g(&format!("I2({m_param})")), Statistic::Des).unwrap();
            assert_eq!(mom.variance, ratio(1, m_param));
        }
    }

    #[test]
    fn des_closed_form_variance_matches_exact_coefficients() {
        for name in ["A1", "A7", "B2", "B9", "D2", "D3", "D8", "I2(4)", "I2(11)"] {
            let desc = g(name);
            let exact = moments(&desc, Statistic::Des).unwrap();
            let closed: BigRational = desc
                .factors()
                .iter()
                .map(descent_variance_closed)
                .fold(BigRational::zero(), |a, v| a + v);
            assert_eq!(exact.variance, closed, "{name}");
        }
    }

    #[test]
    fn inv_moments_match_exact_pmf() {
        for name in ["A4", "B3", "D4", "A2 x I2(5)"] {
            let desc = g(name);
            let m = moments(&desc, Statistic::Inv).unwrap();
            let pmf = mahonian_pmf(&desc, true).unwrap();
            let order = BigInt::from(desc.order());
            let mut first = BigInt::zero();
            let mut second = BigInt::zero();
            for (k, c) in pmf.exact_counts.as_ref().unwrap().iter().enumerate() {
                let k = BigInt::from(k);
                let c = BigInt::from(c.clone());
                first += &k * &c;
                second += &k * &k * c;
            }
            let mean = BigRational::new(first, order.clone());
            let var = BigRational::new(second, order) - &mean * &mean;
            assert_eq!(m.mean, mean, "{name}");
            assert_eq!(m.variance, var, "{name}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_support() {
        let desc = g("A1");
        let mut s1 = Stream::new(7).substream(1);
        let mut s2 = Stream::new(7).substream(1);
        let a = sample(&desc, Statistic::Inv, 200, &mut s1, SampleMethod::InverseCdf).unwrap();
        let b = sample(&desc, Statistic::Inv, 200, &mut s2, SampleMethod::InverseCdf).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v <= 1));
    }

    #[test]
    fn sample_mean_close_to_exact_mean() {
        let desc = g("A5");
        let m = moments(&desc, Statistic::Inv).unwrap();
        let n = 100_000usize;
        for method in [SampleMethod::InverseCdf, SampleMethod::Decomposition] {
            let mut stream = Stream::new(12345).substream(match method {
                SampleMethod::InverseCdf => 0,
                SampleMethod::Decomposition => 1,
            });
            let xs = sample(&desc, Statistic::Inv, n, &mut stream, method).unwrap();
            let mean = xs.iter().sum::<u64>() as f64 / n as f64;
            let bound = 4.0 * m.std_dev() / (n as f64).sqrt();
            assert!((mean - m.mean_f).abs() < bound, "{method:?}: {mean}");
        }
    }

    #[test]
    fn both_sampling_methods_agree_in_distribution() {
        // two-sample KS on 10^5 vs 10^5 draws below the 1% critical value
        let desc = g("B4");
        let n = 100_000usize;
        let mut s1 = Stream::new(99).substream(0);
        let mut s2 = Stream::new(99).substream(1);
        let a = sample(&desc, Statistic::Des, n, &mut s1, SampleMethod::InverseCdf).unwrap();
        let b = sample(&desc, Statistic::Des, n, &mut s2, SampleMethod::Decomposition).unwrap();
        let max_v = desc.rank() as usize;
        let hist = |xs: &[u64]| {
            let mut h = vec![0u64; max_v + 1];
            for &x in xs {
                h[x as usize] += 1;
            }
            h
        };
        let (ha, hb) = (hist(&a), hist(&b));
        let (mut ca, mut cb) = (0f64, 0f64);
        let mut d = 0f64;
        for k in 0..=max_v {
            ca += ha[k] as f64 / n as f64;
            cb += hb[k] as f64 / n as f64;
            d = d.max((ca - cb).abs());
        }
        let critical = 1.628 * (2.0 / n as f64).sqrt();
        assert!(d < critical, "KS {d} >= {critical}");
    }

    #[test]
    fn csv_and_json_export() {
        let pmf = mahonian_pmf(&g("A2"), true).unwrap();
        let mut buf = Vec::new();
        pmf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,count,mass\n0,1,"));
        let json = pmf.to_json();
        assert_eq!(json["group"], "A2");
        assert_eq!(json["stat"], "inv");
        assert_eq!(json["counts"][1], "2");
    }
}
