//! Exact integer polynomial arithmetic, floating-point PMF convolution, and
//! isolation of the (negated) real roots of Eulerian polynomials.
//!
//! Root isolation works on polynomials whose coefficients are all positive
//! and whose roots are guaranteed real (hence negative). Sign evaluation is
//! exact: the polynomial is evaluated at dyadic rationals in `BigInt`
//! arithmetic, so brackets never lie even when coefficients span hundreds of
//! bits (the Eulerian polynomial of B50 does).

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Integer polynomial, coefficients ascending by exponent, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs.last().is_some_and(Zero::is_zero) {
            return Err(Error::Domain(
                "polynomial must be nonempty with nonzero leading coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_u64(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect()).expect("nonempty")
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![BigInt::from(1)],
        }
    }

    /// 1 + z + … + z^(d-1), the generating function of U{0,…,d-1}.
    pub fn uniform_factor(d: u64) -> Result<Self> {
        if d < 1 {
            return Err(Error::Domain(format!("uniform factor needs d >= 1, got {d}")));
        }
        Ok(Self {
            coeffs: vec![BigInt::from(1); d as usize],
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Exact coefficient-wise product.
    pub fn multiply(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero_poly() || other.is_zero_poly() {
            return IntPolynomial {
                coeffs: vec![BigInt::zero()],
            };
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial { coeffs: out }
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            out[i] += b;
        }
        IntPolynomial::new(out).unwrap_or_else(|_| IntPolynomial {
            coeffs: vec![BigInt::zero()],
        })
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            out[i] -= b;
        }
        IntPolynomial::new(out).unwrap_or_else(|_| IntPolynomial {
            coeffs: vec![BigInt::zero()],
        })
    }

    pub fn scale(&self, factor: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| c * factor).collect()).unwrap_or_else(|_| {
            IntPolynomial {
                coeffs: vec![BigInt::zero()],
            }
        })
    }

    /// Multiply by z^k.
    pub fn shift_up(&self, k: usize) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs: out }
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() == 1 {
            return IntPolynomial {
                coeffs: vec![BigInt::zero()],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        IntPolynomial { coeffs }
    }

    /// Evaluation at z = 1, i.e. the sum of coefficients.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }
}

/// Law of X + U{0,…,d-1} for X given by `mass`, as a sliding-window pass.
///
/// The window sum is maintained with Neumaier compensation so that total
/// mass survives long convolution chains (the A2000 Mahonian PMF is a chain
/// of 2000 of these over a support of ~2·10^6 cells).
pub fn convolve_uniform(mass: &[f64], d: u64) -> Result<Vec<f64>> {
    if d < 1 {
        return Err(Error::Domain(format!("convolve_uniform needs d >= 1, got {d}")));
    }
    let total: f64 = compensated_sum(mass);
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "input PMF not normalized: total mass {total}"
        )));
    }
    let d = d as usize;
    if d == 1 {
        return Ok(mass.to_vec());
    }
    let out_len = mass.len() + d - 1;
    let mut out = Vec::with_capacity(out_len);
    let inv_d = 1.0 / d as f64;
    let mut window = NeumaierSum::new();
    for j in 0..out_len {
        if j < mass.len() {
            window.add(mass[j]);
        }
        if j >= d {
            window.add(-mass[j - d]);
        }
        out.push(window.value().max(0.0) * inv_d);
    }
    Ok(out)
}

/// General floating PMF convolution, O(|a|·|b|).
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut s = NeumaierSum::new();
    for &x in xs {
        s.add(x);
    }
    s.value()
}

// ---------------------------------------------------------------------------
// Root isolation
// ---------------------------------------------------------------------------

/// The negatives q_i > 0 of the roots of a real-rooted polynomial with
/// positive coefficients, sorted ascending; repeated entries report
/// multiplicity. `residual` is the largest relative reconstruction error
/// |p(-q)| / Σ|c_k| q^k over the returned roots.
#[derive(Debug, Clone)]
pub struct RootList {
    pub q: Vec<f64>,
    pub residual: f64,
}

const MAX_BISECT_ITERS: usize = 4096;

/// Relative tolerance for the intermediate derivative-chain levels of the
/// root isolator; only the polynomial itself is refined to the caller's
/// tolerance.
const COARSE_REL_TOL: f64 = 1e-5;

/// Locate all deg(p) roots of `p` on the negative real axis and return their
/// negatives. The caller asserts real-rootedness; a root-count mismatch that
/// cannot be resolved as a multiple-root cluster is reported as an error.
pub fn isolate_negative_real_roots(p: &IntPolynomial, rel_tol: f64) -> Result<RootList> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Domain(format!("rel_tol out of (0,1): {rel_tol}")));
    }
    let d = p.degree();
    if p.coeffs().iter().any(|c| c.sign() == Sign::Minus) || p.coeffs()[0] < BigInt::from(1) {
        return Err(Error::Domain(
            "root isolation expects positive coefficients and p(0) >= 1".into(),
        ));
    }
    if d == 0 {
        return Ok(RootList {
            q: vec![],
            residual: 0.0,
        });
    }

    // g(y) = ±p(-y) with positive leading coefficient; its roots are the q_i.
    let mut g: Vec<BigInt> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
        .collect();
    if g[d].sign() == Sign::Minus {
        for c in &mut g {
            *c = -&*c;
        }
    }

    let intervals = positive_roots(&g, rel_tol)?;
    let mut q: Vec<f64> = intervals.iter().map(|iv| iv.approx()).collect();
    q.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut residual = 0.0f64;
    for iv in &intervals {
        let r = relative_residual(&g, &iv.mid());
        residual = residual.max(r);
    }
    Ok(RootList { q, residual })
}

/// Dyadic rational num / 2^exp, exact.
#[derive(Debug, Clone)]
struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    fn zero() -> Self {
        Self {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    fn pow2(e: i64) -> Self {
        if e >= 0 {
            Self {
                num: BigInt::from(1) << e as usize,
                exp: 0,
            }
        } else {
            Self {
                num: BigInt::from(1),
                exp: (-e) as u32,
            }
        }
    }

    fn align(&self, exp: u32) -> BigInt {
        debug_assert!(exp >= self.exp);
        &self.num << (exp - self.exp) as usize
    }

    fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        let exp = a.exp.max(b.exp) + 1;
        Dyadic {
            num: a.align(exp - 1) + b.align(exp - 1),
            exp,
        }
    }

    fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.magnitude().bits();
        let shift = bits.saturating_sub(64);
        let top = (self.num.magnitude() >> shift).to_f64().unwrap();
        let sign = if self.num.sign() == Sign::Minus { -1.0 } else { 1.0 };
        sign * scale_pow2(top, shift as i64 - self.exp as i64)
    }
}

#[derive(Debug, Clone)]
struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    fn point(p: Dyadic) -> Self {
        Self {
            lo: p.clone(),
            hi: p,
        }
    }

    fn mid(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    fn approx(&self) -> f64 {
        self.mid().to_f64()
    }
}

/// Sign of Σ c_k x^k at a dyadic point, exact. Returns -1, 0, or 1.
fn sign_at(coeffs: &[BigInt], x: &Dyadic) -> i32 {
    let d = coeffs.len() - 1;
    // Horner for p(x) · 2^(d·exp), which has the same sign as p(x).
    let mut acc = coeffs[d].clone();
    for k in (0..d).rev() {
        acc = acc * &x.num + (&coeffs[k] << (x.exp as usize) * (d - k));
    }
    match acc.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// |p(x)| / Σ|c_k| |x|^k at a dyadic point, as an f64.
fn relative_residual(coeffs: &[BigInt], x: &Dyadic) -> f64 {
    let d = coeffs.len() - 1;
    let mut acc = coeffs[d].clone();
    let mut scale: BigUint = coeffs[d].magnitude() .clone();
    let xmag = x.num.magnitude().clone();
    for k in (0..d).rev() {
        acc = acc * &x.num + (&coeffs[k] << (x.exp as usize) * (d - k));
        scale = scale * &xmag + (coeffs[k].magnitude() << (x.exp as usize) * (d - k));
    }
    if scale.is_zero() {
        return 0.0;
    }
    big_ratio(acc.magnitude(), &scale)
}

/// x · 2^e without overflowing the intermediate power; exponents deep in the
/// bisection chain routinely exceed the f64 exponent range.
fn scale_pow2(x: f64, e: i64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if (-1000..=1000).contains(&e) {
        x * 2f64.powi(e as i32)
    } else if e < -2100 {
        0.0
    } else if e > 2100 {
        f64::INFINITY * x.signum()
    } else {
        let h = (e / 2) as i32;
        x * 2f64.powi(h) * 2f64.powi((e - h as i64) as i32)
    }
}

/// a / b for nonnegative big integers, robust to values beyond f64 range.
fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let (ba, bb) = (a.bits() as i64, b.bits() as i64);
    let sa = (ba - 64).max(0) as u64;
    let sb = (bb - 64).max(0) as u64;
    let ta = (a >> sa).to_f64().unwrap();
    let tb = (b >> sb).to_f64().unwrap();
    (ta / tb) * 2f64.powi((sa as i64 - sb as i64) as i32)
}

/// Upper bound (a power of two) strictly above every positive root,
/// Lagrange-style: 2 · max_k (|c_{d-k}| / |c_d|)^{1/k}.
fn root_upper_bound(coeffs: &[BigInt]) -> Result<Dyadic> {
    let d = coeffs.len() - 1;
    let lead_ln = big_ln(coeffs[d].magnitude());
    let mut max_log = f64::NEG_INFINITY;
    for (k, c) in coeffs.iter().enumerate().take(d) {
        if c.is_zero() {
            continue;
        }
        let log_ratio = (big_ln(c.magnitude()) - lead_ln) / (d - k) as f64;
        max_log = max_log.max(log_ratio);
    }
    if !max_log.is_finite() {
        return Err(Error::Domain("cannot bound roots of this polynomial".into()));
    }
    let e = (max_log / std::f64::consts::LN_2).ceil() as i64 + 2;
    let mut bound = Dyadic::pow2(e);
    // The bound must actually lie above the largest root: push it up until
    // the leading sign shows.
    for _ in 0..128 {
        if sign_at(coeffs, &bound) > 0 {
            return Ok(bound);
        }
        bound = Dyadic::pow2(bound_exp(&bound) + 1);
    }
    Err(Error::RootFinding("no finite upper bound found".into()))
}

fn bound_exp(b: &Dyadic) -> i64 {
    b.num.magnitude().bits() as i64 - 1 - b.exp as i64
}

/// Natural log of a positive big integer.
fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap().ln();
    }
    let top = (x >> (bits - 53)).to_f64().unwrap();
    top.ln() + (bits - 53) as f64 * std::f64::consts::LN_2
}

fn width_f64(iv: &Interval) -> f64 {
    let exp = iv.lo.exp.max(iv.hi.exp);
    let diff = Dyadic {
        num: iv.hi.align(exp) - iv.lo.align(exp),
        exp,
    };
    diff.to_f64()
}

/// Bisect to relative width `rel_tol`, signs at endpoints known and opposite
/// (or an endpoint sign of zero collapses immediately).
fn bisect(coeffs: &[BigInt], mut lo: Dyadic, mut hi: Dyadic, sign_lo: i32, rel_tol: f64) -> Result<Interval> {
    for _ in 0..MAX_BISECT_ITERS {
        let iv = Interval {
            lo: lo.clone(),
            hi: hi.clone(),
        };
        // Strictly relative: the bracket must shrink until the lower end is
        // positive and within rel_tol of the width. Anything laxer lets a
        // bracket [0, huge] pass while still spanning several tiny roots.
        let lo_f = lo.to_f64();
        if lo_f > 0.0 && width_f64(&iv) <= rel_tol * lo_f {
            return Ok(iv);
        }
        let mid = Dyadic::midpoint(&lo, &hi);
        let s = sign_at(coeffs, &mid);
        if s == 0 {
            return Ok(Interval::point(mid));
        }
        if s == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFinding(
        "bisection did not converge within the iteration budget".into(),
    ))
}

/// All positive roots of `g` (with multiplicity), assuming g is real-rooted
/// with every root in (0, ∞). Works up the derivative chain: the roots of
/// g^(k) interlace those of g^(k-1), so sample points taken at the critical
/// points split the axis into monotone segments that bisection covers
/// completely.
fn positive_roots(g: &[BigInt], rel_tol: f64) -> Result<Vec<Interval>> {
    let deg = g.len() - 1;
    let mut chain: Vec<Vec<BigInt>> = vec![g.to_vec()];
    while chain.last().unwrap().len() > 2 {
        let h = chain.last().unwrap();
        let dh: Vec<BigInt> = h
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        chain.push(dh);
    }

    // Intermediate levels only steer the bracketing, so a coarse tolerance
    // suffices there; running the whole chain at rel_tol would multiply the
    // exact-arithmetic cost for nothing.
    let coarse = COARSE_REL_TOL.max(rel_tol);
    let mut prev: Vec<Interval> = Vec::new();
    for level in (0..chain.len()).rev() {
        let h = &chain[level];
        let tol = if level == 0 { rel_tol } else { coarse };
        prev = roots_of_level(h, &prev, tol)?;
    }
    if prev.len() != deg {
        return Err(Error::RootFinding(format!(
            "found {} roots, expected {}",
            prev.len(),
            deg
        )));
    }

    // Multiple roots come back as coarse cluster intervals (bisection on g
    // itself cannot see them). A root of multiplicity k is a simple root of
    // g^(k-1); refine against the first derivative that changes sign across
    // the interval.
    for iv in &mut prev {
        let mid = iv.approx().abs();
        if width_f64(iv) <= rel_tol * mid {
            continue;
        }
        for h in &chain {
            let slo = sign_at(h, &iv.lo);
            let shi = sign_at(h, &iv.hi);
            if slo != 0 && shi != 0 && slo != shi {
                *iv = bisect(h, iv.lo.clone(), iv.hi.clone(), slo, rel_tol)?;
                break;
            }
        }
    }
    Ok(prev)
}

fn roots_of_level(h: &[BigInt], crit: &[Interval], rel_tol: f64) -> Result<Vec<Interval>> {
    let dh = h.len() - 1;
    let upper = root_upper_bound(h)?;

    // Merge overlapping critical intervals into clusters; the cluster size is
    // the candidate multiplicity of a repeated root sitting there.
    let mut clusters: Vec<(Interval, usize)> = Vec::new();
    for iv in crit {
        match clusters.last_mut() {
            Some((last, mult)) if overlaps(last, iv) => {
                if cmp_dyadic(&iv.hi, &last.hi) == std::cmp::Ordering::Greater {
                    last.hi = iv.hi.clone();
                }
                *mult += 1;
            }
            _ => clusters.push((iv.clone(), 1)),
        }
    }

    // Sample points: 0, both endpoints of every critical interval, the upper
    // bound. Using the tight endpoints (not one midpoint per cluster) keeps
    // adjacent simple roots in separate monotone segments even when the roots
    // span many orders of magnitude.
    let mut points: Vec<Dyadic> = Vec::with_capacity(2 * crit.len() + 2);
    points.push(Dyadic::zero());
    for iv in crit {
        points.push(iv.lo.clone());
        points.push(iv.hi.clone());
    }
    points.push(upper);
    points.sort_by(cmp_dyadic);
    points.dedup_by(|a, b| cmp_dyadic(a, b) == std::cmp::Ordering::Equal);

    let signs: Vec<i32> = points.iter().map(|p| sign_at(h, p)).collect();
    if signs[0] == 0 {
        return Err(Error::RootFinding("polynomial vanishes at zero".into()));
    }

    let mut roots: Vec<Interval> = Vec::new();
    // Exact hits at sample points (possible for rational roots).
    let mut exact_hits: Vec<usize> = Vec::new();
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            roots.push(Interval::point(points[i].clone()));
            exact_hits.push(i);
        }
    }
    for i in 0..points.len() - 1 {
        let (s1, s2) = (signs[i], signs[i + 1]);
        if s1 == 0 || s2 == 0 {
            continue;
        }
        if s1 != s2 {
            roots.push(bisect(h, points[i].clone(), points[i + 1].clone(), s1, rel_tol)?);
        }
    }

    if roots.len() < dh {
        // Deficit: the missing roots must hide as multiple roots at critical
        // clusters. Accept a cluster when h nearly vanishes there.
        let accept = rel_tol * 1e-2;
        let mut candidates: Vec<(usize, f64)> = clusters
            .iter()
            .enumerate()
            .map(|(ci, (iv, _))| (ci, relative_residual(h, &iv.mid())))
            .collect();
        candidates.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let mut deficit = dh - roots.len();
        for (ci, res) in candidates {
            if deficit == 0 {
                break;
            }
            if res > accept {
                break;
            }
            let (iv, mult) = &clusters[ci];
            // A sign change (or exact hit) already attributed one root here?
            let already = roots.iter().filter(|r| overlaps(r, iv)).count();
            let extra = (mult + 1).saturating_sub(already).min(deficit);
            for _ in 0..extra {
                roots.push(Interval {
                    lo: iv.lo.clone(),
                    hi: iv.hi.clone(),
                });
            }
            deficit -= extra;
        }
        if deficit > 0 {
            return Err(Error::RootFinding(format!(
                "multiplicity collision: {deficit} root(s) unaccounted for at degree {dh} \
                 (numerical trouble or violated real-rootedness)"
            )));
        }
    } else if roots.len() > dh {
        return Err(Error::RootFinding(format!(
            "found {} roots for degree {dh}",
            roots.len()
        )));
    }

    roots.sort_by(|a, b| a.approx().partial_cmp(&b.approx()).unwrap());
    Ok(roots)
}

fn cmp_dyadic(a: &Dyadic, b: &Dyadic) -> std::cmp::Ordering {
    let exp = a.exp.max(b.exp);
    a.align(exp).cmp(&b.align(exp))
}

fn overlaps(a: &Interval, b: &Interval) -> bool {
    cmp_dyadic(&a.hi, &b.lo) != std::cmp::Ordering::Less
        && cmp_dyadic(&b.hi, &a.lo) != std::cmp::Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(cs: &[u64]) -> IntPolynomial {
        IntPolynomial::from_u64(cs)
    }

    #[test]
    fn multiply_hand_examples() {
        // (1+z)(1+z+z^2) = 1+2z+2z^2+z^3, the S3 inversion generating function
        let p = poly(&[1, 1]).multiply(&poly(&[1, 1, 1]));
        assert_eq!(p, poly(&[1, 2, 2, 1]));
        assert_eq!(poly(&[1, 1]).multiply(&poly(&[1, 1])), poly(&[1, 2, 1]));
        let q = poly(&[3, 0, 7]);
        assert_eq!(q.multiply(&IntPolynomial::one()), q);
    }

    #[test]
    fn convolve_uniform_examples() {
        let delta = vec![1.0];
        assert_eq!(convolve_uniform(&delta, 2).unwrap(), vec![0.5, 0.5]);
        assert_eq!(convolve_uniform(&delta, 1).unwrap(), vec![1.0]);
        let got = convolve_uniform(&[0.5, 0.5], 3).unwrap();
        let want = [1.0 / 6.0, 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-15, "{got:?}");
        }
        assert!(convolve_uniform(&delta, 0).is_err());
        assert!(convolve_uniform(&[0.7], 2).is_err());
    }

    #[test]
    fn convolve_uniform_mass_survives_long_chains() {
        let mut mass = vec![1.0];
        for _ in 0..10_000 {
            mass = convolve_uniform(&mass, 3).unwrap();
        }
        let total = compensated_sum(&mass);
        assert!((total - 1.0).abs() < 1e-9, "drift {}", (total - 1.0).abs());
    }

    #[test]
    fn roots_linear() {
        let r = isolate_negative_real_roots(&poly(&[1, 1]), 1e-12).unwrap();
        assert_eq!(r.q.len(), 1);
        assert!((r.q[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn roots_quadratic_i2_5() {
        // 1 + 8z + z^2 has roots -(4 ± √15)
        let r = isolate_negative_real_roots(&poly(&[1, 8, 1]), 1e-13).unwrap();
        let s15 = 15f64.sqrt();
        assert!((r.q[0] - (4.0 - s15)).abs() < 1e-10);
        assert!((r.q[1] - (4.0 + s15)).abs() < 1e-9);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn roots_quadratic_a2() {
        let r = isolate_negative_real_roots(&poly(&[1, 4, 1]), 1e-13).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r.q[0] - (2.0 - s3)).abs() < 1e-12);
        assert!((r.q[1] - (2.0 + s3)).abs() < 1e-11);
    }

    #[test]
    fn roots_with_multiplicity() {
        // (1+z)^3: q = 1 three times
        let r = isolate_negative_real_roots(&poly(&[1, 3, 3, 1]), 1e-12).unwrap();
        assert_eq!(r.q.len(), 3);
        for q in &r.q {
            assert!((q - 1.0).abs() < 1e-6, "{:?}", r.q);
        }
        // (1+z)^2 (1+4z+z^2)
        let p = poly(&[1, 2, 1]).multiply(&poly(&[1, 4, 1]));
        let r = isolate_negative_real_roots(&p, 1e-12).unwrap();
        assert_eq!(r.q.len(), 4);
    }

    #[test]
    fn roots_reject_bad_input() {
        assert!(isolate_negative_real_roots(&poly(&[1, 1]), 0.0).is_err());
        let neg = IntPolynomial::new(vec![BigInt::from(-1), BigInt::from(1)]).unwrap();
        assert!(isolate_negative_real_roots(&neg, 1e-12).is_err());
    }

    fn reconstruct(q: &[f64]) -> Vec<f64> {
        let mut coeffs = vec![1.0];
        for &root in q {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] += c * root;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn roots_reconstruct_within_tolerance() {
        // Product of distinct quadratics and linears, degree 8.
        let p = poly(&[1, 4, 1])
            .multiply(&poly(&[1, 8, 1]))
            .multiply(&poly(&[1, 1]))
            .multiply(&poly(&[1, 6, 1]))
            .multiply(&poly(&[1, 3]));
        let r = isolate_negative_real_roots(&p, 1e-13).unwrap();
        assert_eq!(r.q.len(), p.degree());
        let rec = reconstruct(&r.q);
        let lead = p.coeffs().last().unwrap().to_f64().unwrap();
        for (k, c) in p.coeffs().iter().enumerate() {
            let want = c.to_f64().unwrap() / lead;
            assert!(
                (rec[k] - want).abs() <= 1e-8 * want.abs().max(1.0),
                "coeff {k}: {} vs {want}",
                rec[k]
            );
        }
    }

    proptest! {
        #[test]
        fn multiply_commutative_associative(
            a in proptest::collection::vec(0u64..50, 1..6),
            b in proptest::collection::vec(0u64..50, 1..6),
            c in proptest::collection::vec(0u64..50, 1..6),
        ) {
            prop_assume!(a.last() != Some(&0) && b.last() != Some(&0) && c.last() != Some(&0));
            let (pa, pb, pc) = (poly(&a), poly(&b), poly(&c));
            prop_assert_eq!(pa.multiply(&pb), pb.multiply(&pa));
            prop_assert_eq!(pa.multiply(&pb).multiply(&pc), pa.multiply(&pb.multiply(&pc)));
        }

        #[test]
        fn eval_at_one_is_multiplicative(
            a in proptest::collection::vec(0u64..100, 1..8),
            b in proptest::collection::vec(0u64..100, 1..8),
        ) {
            prop_assume!(a.last() != Some(&0) && b.last() != Some(&0));
            let (pa, pb) = (poly(&a), poly(&b));
            prop_assert_eq!(pa.multiply(&pb).eval_one(), pa.eval_one() * pb.eval_one());
        }

        #[test]
        fn convolve_uniform_preserves_mass(
            raw in proptest::collection::vec(0.0f64..1.0, 1..40),
            d in 1u64..12,
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let mass: Vec<f64> = raw.iter().map(|x| x / total).collect();
            // renormalize exactly enough for the precondition
            let mass: Vec<f64> = {
                let t = compensated_sum(&mass);
                mass.iter().map(|x| x / t).collect()
            };
            let out = convolve_uniform(&mass, d).unwrap();
            let got = compensated_sum(&out);
            prop_assert!((got - 1.0).abs() < 1e-12);
        }
    }
}
