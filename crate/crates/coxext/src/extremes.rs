//! Extreme-value machinery: normal and Gumbel kernels, norming constants,
//! the exact law of row maxima, convergence reports, and tail-equivalence
//! diagnostics.
//!
//! Everything at the heart of the Gumbel regime happens at CDF values
//! 1 − O(1/n), so upper tails are always accumulated from the top of the
//! support and F(t)ⁿ is computed as exp(n·ln(1−T)) from the tail mass T,
//! never by powering a number that has already rounded to 1.

use std::io::Write;

use serde::Serialize;

use crate::statistics::{Moments, Pmf};
use crate::{Error, Result};

// Complementary error function, following the FreeBSD msun rational
// approximations (as also adopted by the Go standard library): four regimes
// split at 0.84375, 1.25 and 1/0.35, each a P/Q rational fit, with the
// asymptotic regimes using a pseudo-single-precision split of x so that
// exp(-x*x) keeps full accuracy.

const ERX: f64 = 8.45062911510467529297e-01;

const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

const TINY: f64 = 1.3877787807814457e-17; // 2^-56

/// Complementary error function erfc(x) = 1 − erf(x), accurate in the far
/// tail (relative, not absolute, accuracy for large x).
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }
    if x < 28.0 {
        let s = 1.0 / (x * x);
        let (r, sq) = if x < 1.0 / 0.35 {
            (
                RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
                1.0 + s
                    * (SA1
                        + s * (SA2
                            + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
            )
        } else {
            if sign && x > 6.0 {
                return 2.0;
            }
            (
                RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
                1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
            )
        };
        // pseudo-single precision x so that -z*z is exact
        let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        let out = f64::exp(-z * z - 0.5625) * f64::exp((z - x) * (z + x) + r / sq) / x;
        return if sign { 2.0 - out } else { out };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Standard normal CDF Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail 1 − Φ(x), computed directly so relative accuracy survives in
/// the far tail.
pub fn std_normal_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Gumbel CDF Λ(x) = exp(−exp(−x)).
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Affine norming of row maxima: P(Mₙ ≤ a·x + b) → Λ(x).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GumbelNorm {
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

/// Norming constants for the maximum of n copies of a statistic with the
/// given moments: α = √(2 ln n), β = α − (ln ln n + ln 4π)/(2α), a = s/α,
/// b = μ + s·β.
///
/// The scale is s/α, not s·α: for standard normal maxima the classical
/// attraction statement is α(Mₙ − β) → Λ, equivalently n(1 − Φ(x/α + β))
/// → e⁻ˣ. With the scale inverted the normalized maxima degenerate, which
/// shows up immediately as a growing (not shrinking) sup error in the
/// convergence experiments.
pub fn norming_constants(n: u64, m: &Moments) -> Result<GumbelNorm> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "norming constants need n >= 2, got {n}"
        )));
    }
    if !(m.var_f > 0.0) {
        return Err(Error::Domain(format!(
            "norming constants need positive variance, got {}",
            m.var_f
        )));
    }
    let ln_n = (n as f64).ln();
    let alpha = (2.0 * ln_n).sqrt();
    let beta = alpha - (ln_n.ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * alpha);
    let s = m.std_dev();
    Ok(GumbelNorm {
        n,
        alpha,
        beta,
        a: s / alpha,
        b: m.mean_f + s * beta,
    })
}

/// Exact law of the maximum of n i.i.d. copies of a lattice variable,
/// P(Mₙ ≤ t) = F(⌊t⌋)ⁿ, evaluated through the upper-tail mass.
#[derive(Debug, Clone)]
pub struct MaxLaw {
    tails: Vec<f64>,
}

impl MaxLaw {
    pub fn new(pmf: &Pmf) -> Self {
        Self {
            tails: pmf.upper_tails(),
        }
    }

    /// F(⌊t⌋)ⁿ as exp(n·ln(1−T)) where T is the mass strictly above ⌊t⌋.
    /// The floor carries a tiny relative nudge so that values that are
    /// integers up to rounding noise (e.g. a·x+b round-tripped through the
    /// norming) land on the intended lattice point.
    pub fn cdf(&self, n: u64, t: f64) -> f64 {
        let nudged = t + 1e-9 * (1.0 + t.abs());
        if nudged < 0.0 {
            return 0.0;
        }
        let j = nudged.floor() as usize;
        if j + 1 >= self.tails.len() {
            return 1.0;
        }
        let tail = self.tails[j + 1].clamp(0.0, 1.0);
        if tail >= 1.0 {
            return 0.0;
        }
        (n as f64 * (-tail).ln_1p()).exp()
    }
}

/// One-shot version of [`MaxLaw::cdf`].
pub fn exact_max_cdf(pmf: &Pmf, n: u64, t: f64) -> f64 {
    MaxLaw::new(pmf).cdf(n, t)
}

/// Evaluation grid in normalized x-coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            x_min: -3.0,
            x_max: 6.0,
            step: 0.01,
        }
    }
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(x_max >= x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Domain(format!(
                "invalid grid ({x_min}, {x_max}, {step})"
            )));
        }
        Ok(Grid { x_min, x_max, step })
    }

    /// Parse "a:b:h".
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Domain(format!(
                "grid must be 'min:max:step', got '{text}'"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad grid number '{p}'")))
            })
            .collect::<Result<_>>()?;
        Grid::new(nums[0], nums[1], nums[2])
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let count = ((self.x_max - self.x_min) / self.step).round() as usize + 1;
        (0..count).map(move |i| (self.x_min + i as f64 * self.step).min(self.x_max))
    }
}

/// Sup over the grid of |P(Mₙ ≤ a·x + b) − Λ(x)| and the x attaining it.
pub fn gumbel_sup_error(
    pmf: &Pmf,
    m: &Moments,
    n: u64,
    grid: Grid,
) -> Result<(f64, f64)> {
    let norm = norming_constants(n, m)?;
    let law = MaxLaw::new(pmf);
    let mut sup = 0.0;
    let mut argmax = grid.x_min;
    for x in grid.points() {
        let err = (law.cdf(n, norm.a * x + norm.b) - gumbel_cdf(x)).abs();
        if err > sup {
            sup = err;
            argmax = x;
        }
    }
    Ok((sup, argmax))
}

/// One tail-equivalence sample point: P(X > μ + s·x) / (1 − Φ(x)).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailPoint {
    pub x: f64,
    /// None when the exact numerator underflows to zero.
    pub ratio: Option<f64>,
    /// x is within the moderate-deviation zone x ≤ N^{1/6} for the group's
    /// summand count N; outside it the ratio is still reported but the
    /// asymptotic gives no guarantee.
    pub in_zone: bool,
}

/// Compare exact standardized upper tails with normal tails at the given
/// points. The summand count is the total rank (one independent summand per
/// degree of the group).
pub fn tail_ratio(pmf: &Pmf, m: &Moments, xs: &[f64]) -> Result<Vec<TailPoint>> {
    let tails = pmf.upper_tails();
    let s = m.std_dev();
    if !(s > 0.0) {
        return Err(Error::Domain("tail ratio needs positive variance".into()));
    }
    let zone = (pmf.group.rank() as f64).powf(1.0 / 6.0);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("tail ratio needs x > 0, got {x}")));
        }
        // Resolve the continuous threshold μ + s·x to the nearest lattice
        // cut with a half-integer continuity correction: P(X ≥ j+1) is
        // compared against 1 − Φ at (j + ½ − μ)/s ≈ x. Without it the ratio
        // wobbles by a full atom mass depending on where μ + s·x happens to
        // fall between integers, which drowns the asymptotic trend.
        let t = m.mean_f + s * x;
        let nudged = t + 0.5 + 1e-9 * (1.0 + t.abs());
        let numerator = if nudged < 0.0 {
            1.0
        } else {
            let j = nudged.floor() as usize;
            if j + 1 >= tails.len() {
                0.0
            } else {
                tails[j + 1].clamp(0.0, 1.0)
            }
        };
        let denominator = std_normal_tail(x);
        let ratio = if numerator > 0.0 {
            Some(numerator / denominator)
        } else {
            None
        };
        out.push(TailPoint {
            x,
            ratio,
            in_zone: x <= zone,
        });
    }
    Ok(out)
}

/// Gumbel convergence diagnostics along a sequence of rows.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub rank: u64,
    pub a: f64,
    pub b: f64,
    pub sup_error: f64,
    pub argmax_x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub grid: Grid,
}

impl ConvergenceReport {
    /// Rows are (n, pmf of the row's statistic, its moments).
    pub fn build(items: &[(u64, Pmf, Moments)], grid: Grid) -> Result<Self> {
        let mut rows = Vec::with_capacity(items.len());
        for (n, pmf, m) in items {
            let norm = norming_constants(*n, m)?;
            let (sup_error, argmax_x) = gumbel_sup_error(pmf, m, *n, grid)?;
            rows.push(ConvergenceRow {
                n: *n,
                rank: pmf.group.rank(),
                a: norm.a,
                b: norm.b,
                sup_error,
                argmax_x,
            });
        }
        Ok(ConvergenceReport { rows, grid })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,N_n,a,b,sup_error,argmax_x")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.n, r.rank, r.a, r.b, r.sup_error, r.argmax_x
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupDescriptor;
    use crate::statistics::{eulerian_pmf, mahonian_pmf, moments, Statistic};

    fn g(s: &str) -> GroupDescriptor {
        GroupDescriptor::parse(s).unwrap()
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(1.96) - 0.9750021).abs() < 1e-6);
        assert!((std_normal_cdf(-1.0) - 0.15865525393145707).abs() < 1e-12);
        assert!((std_normal_cdf(2.0) - 0.9772498680518208).abs() < 1e-12);
        let tail5 = std_normal_tail(5.0);
        assert!((tail5 - 2.8665e-7).abs() / 2.8665e-7 < 0.01);
        // direct tail keeps relative accuracy where 1-Φ would cancel
        let tail8 = std_normal_tail(8.0);
        assert!((tail8 - 6.22096057427178e-16).abs() / 6.22096057427178e-16 < 1e-10);
    }

    #[test]
    fn normal_cdf_symmetry() {
        for x in [0.1, 0.7, 1.3, 2.5, 4.0, 6.5] {
            let sum = std_normal_cdf(x) + std_normal_cdf(-x);
            assert!((sum - 1.0).abs() < 1e-14, "x={x}");
            assert!((std_normal_tail(x) - std_normal_cdf(-x)).abs() < 1e-14);
        }
    }

    #[test]
    fn gumbel_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-12);
        assert!(gumbel_cdf(30.0) <= 1.0 && gumbel_cdf(30.0) > 1.0 - 1e-12);
        assert_eq!(gumbel_cdf(-10.0), 0.0);
        let mut prev = 0.0;
        for i in -50..=50 {
            let v = gumbel_cdf(i as f64 / 5.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    fn synthetic_moments(mean: i64, variance: i64) -> Moments {
        let ratio = |v: i64| num_rational::BigRational::from_integer(v.into());
        Moments::new(ratio(mean), ratio(variance))
    }

    #[test]
    fn norming_reference_values() {
        let std = synthetic_moments(0, 1);
        let norm = norming_constants(100, &std).unwrap();
        assert!((norm.alpha - 3.034854).abs() < 1e-6);
        assert!((norm.beta - 2.366255).abs() < 1e-6);
        assert!((norm.a - 1.0 / norm.alpha).abs() < 1e-12);
        assert!((norm.b - norm.beta).abs() < 1e-12);
        assert!(matches!(
            norming_constants(1, &std),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn norming_scales_affinely() {
        let std = synthetic_moments(0, 1);
        let scaled = synthetic_moments(10, 4);
        let a = norming_constants(100, &std).unwrap();
        let b = norming_constants(100, &scaled).unwrap();
        assert!((b.a - 2.0 * a.a).abs() < 1e-9);
        assert!((b.b - (10.0 + 2.0 * a.b)).abs() < 1e-9);
        assert!((b.a - 2.0 / 3.034854).abs() < 1e-6);
        assert!((b.b - 14.732510).abs() < 1e-6);
    }

    #[test]
    fn exact_max_cdf_examples() {
        let a2 = eulerian_pmf(&g("A2")).unwrap();
        // P(max of two A2 descents = 0) = (1/6)^2
        let v = exact_max_cdf(&a2, 2, 0.0);
        assert!((v - 1.0 / 36.0).abs() < 1e-14);
        assert!((exact_max_cdf(&a2, 1, 0.0) - 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(exact_max_cdf(&a2, 5, 10.0), 1.0);
        assert_eq!(exact_max_cdf(&a2, 5, -0.5), 0.0);
    }

    #[test]
    fn exact_max_cdf_power_identity_and_monotonicity() {
        let pmf = mahonian_pmf(&g("A5"), false).unwrap();
        let law = MaxLaw::new(&pmf);
        for t in [1.0, 4.0, 7.5, 11.0, 14.0] {
            let single = law.cdf(1, t);
            for n in [2u64, 7, 40] {
                let joint = law.cdf(n, t);
                let power = single.powi(n as i32);
                if power > 1e-300 {
                    assert!(
                        (joint - power).abs() <= 1e-12 * power,
                        "t={t} n={n}: {joint} vs {power}"
                    );
                }
                // nonincreasing in n
                assert!(joint <= single + 1e-15);
            }
        }
        let mut prev = 0.0;
        for t in 0..=14 {
            let v = law.cdf(3, t as f64);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn sup_error_degenerate_grid() {
        let a2 = eulerian_pmf(&g("A2")).unwrap();
        let m = moments(&g("A2"), Statistic::Des).unwrap();
        // one point far above the support top: exact CDF is 1
        let grid = Grid::new(8.0, 8.0, 1.0).unwrap();
        let (sup, argmax) = gumbel_sup_error(&a2, &m, 4, grid).unwrap();
        assert!((sup - (1.0 - gumbel_cdf(8.0))).abs() < 1e-12);
        assert_eq!(argmax, 8.0);
    }

    #[test]
    fn sup_error_shrinks_along_a_family_descents() {
        let mut prev = f64::INFINITY;
        for n in [30u64, 100, 300] {
            let desc = g(&format!("A{n}"));
            let pmf = eulerian_pmf(&desc).unwrap();
            let m = moments(&desc, Statistic::Des).unwrap();
            let (sup, _) = gumbel_sup_error(&pmf, &m, n, Grid::default()).unwrap();
            assert!(sup < prev, "n={n}: {sup} !< {prev}");
            prev = sup;
        }
    }

    #[test]
    fn tail_ratio_near_one_for_a_100_inversions() {
        let desc = g("A100");
        let pmf = mahonian_pmf(&desc, false).unwrap();
        let m = moments(&desc, Statistic::Inv).unwrap();
        let points = tail_ratio(&pmf, &m, &[0.5, 1.0, 1.5]).unwrap();
        for p in points {
            let r = p.ratio.unwrap();
            assert!((r - 1.0).abs() < 0.2, "x={}: ratio {r}", p.x);
        }
    }

    #[test]
    fn tail_ratio_boundary_and_errors() {
        let a2 = eulerian_pmf(&g("A2")).unwrap();
        let m = moments(&g("A2"), Statistic::Des).unwrap();
        assert!(tail_ratio(&a2, &m, &[0.0]).is_err());
        // far beyond the support: numerator underflows to exactly zero
        let far = tail_ratio(&a2, &m, &[50.0]).unwrap();
        assert!(far[0].ratio.is_none());
        assert!(!far[0].in_zone);
    }

    #[test]
    fn grid_parse_and_points() {
        let grid = Grid::parse("-2:5:0.01").unwrap();
        assert_eq!(grid.points().count(), 701);
        assert!(Grid::parse("1:2").is_err());
        assert!(Grid::parse("1:2:0").is_err());
        assert!(Grid::parse("5:1:0.1").is_err());
        let pts: Vec<f64> = Grid::new(0.0, 1.0, 0.5).unwrap().points().collect();
        assert_eq!(pts, [0.0, 0.5, 1.0]);
    }

    #[test]
    fn convergence_report_csv() {
        let items: Vec<(u64, Pmf, Moments)> = [50u64, 200]
            .iter()
            .map(|&n| {
                let desc = g(&format!("A{n}"));
                (
                    n,
                    eulerian_pmf(&desc).unwrap(),
                    moments(&desc, Statistic::Des).unwrap(),
                )
            })
            .collect();
        let report = ConvergenceReport::build(&items, Grid::default()).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows[1].sup_error < report.rows[0].sup_error);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("n,N_n,a,b,sup_error,argmax_x\n50,50,"));
    }
}
