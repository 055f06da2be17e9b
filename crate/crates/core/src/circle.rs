//! The circle of length 2π with two leads, `G(c)`.
//!
//! For `c ∈ [0, 1)` the leads sit at two points splitting the circle into
//! arcs of lengths `ρ₁ = (1−c)π` and `ρ₂ = (1+c)π`. For `c = 1` both leads
//! sit at one point; the circle is then modelled as two π-edges between
//! `v1` and `v2` with both leads at `v2`, which keeps the graph free of
//! loops without changing its resonances.
//!
//! The determinant factors as `det A(k, c) = ±4 F_even(k, c) F_odd(k, c)`
//! with
//!
//! ```text
//! F_even(k, c) = i cos(kcπ) + i cos(kπ) + 2 sin(kπ)
//! F_odd(k, c)  = i cos(kcπ) − i cos(kπ) − 2 sin(kπ)
//! ```
//!
//! Each zero of either factor moves along a real-analytic curve as `c`
//! increases. [`trace_curve`] follows one curve by continuation and records
//! where it touches the real axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::constraint::assemble;
use crate::error::{Error, Result};
use crate::exppoly::{ComplexExpPoly, ExponentVector, FrequencyTable};
use crate::graph::MetricGraph;
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleParams {
    c: f64,
}

impl CircleParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParameter(format!("c must lie in [0, 1], got {c}")));
        }
        Ok(CircleParams { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rho1(&self) -> f64 {
        (1.0 - self.c) * PI
    }

    pub fn rho2(&self) -> f64 {
        (1.0 + self.c) * PI
    }
}

pub fn build_graph(c: f64) -> Result<MetricGraph> {
    let params = CircleParams::new(c)?;
    let mut b = MetricGraph::builder();
    let v1 = b.vertex("v1");
    let v2 = b.vertex("v2");
    if c < 1.0 {
        b.edge(v2, v1, params.rho1());
        b.edge(v2, v1, params.rho2());
        b.lead(v1);
        b.lead(v2);
    } else {
        b.edge(v2, v1, PI);
        b.edge(v2, v1, PI);
        b.leads(v2, 2);
    }
    b.build_validated()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    /// `+1` for the even factor, `−1` for the odd one.
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::InvalidParameter(format!("parity must be even or odd, got {s:?}"))),
        }
    }
}

/// `F_parity(k, c)`.
pub fn f_parity(parity: Parity, k: Complex64, c: f64) -> Complex64 {
    let i = Complex64::i();
    let s = parity.sign();
    i * (k * c * PI).cos() + s * (i * (k * PI).cos() + 2.0 * (k * PI).sin())
}

pub fn f_even(k: Complex64, c: f64) -> Complex64 {
    f_parity(Parity::Even, k, c)
}

pub fn f_odd(k: Complex64, c: f64) -> Complex64 {
    f_parity(Parity::Odd, k, c)
}

/// `∂F/∂k`.
pub fn f_parity_dk(parity: Parity, k: Complex64, c: f64) -> Complex64 {
    let i = Complex64::i();
    let s = parity.sign();
    -i * c * PI * (k * c * PI).sin() + s * PI * (-i * (k * PI).sin() + 2.0 * (k * PI).cos())
}

/// `∂F/∂c`.
pub fn f_parity_dc(_parity: Parity, k: Complex64, c: f64) -> Complex64 {
    -Complex64::i() * k * PI * (k * c * PI).sin()
}

/// `F_parity(·, c)` as an exponential polynomial over the frequencies
/// `[π, cπ]`.
pub fn f_parity_poly(parity: Parity, c: f64) -> ComplexExpPoly {
    let half_i = Complex64::new(0.0, 0.5);
    let s = parity.sign();
    // i cos(kπ) + 2 sin(kπ) = (i/2 − i) e^{ikπ} + (i/2 + i) e^{−ikπ}
    let plus = -half_i * s;
    let minus = half_i * 3.0 * s;
    ComplexExpPoly::from_terms(
        FrequencyTable::new(vec![PI, c * PI]),
        [
            (ExponentVector::new(vec![0, 1]), half_i),
            (ExponentVector::new(vec![0, -1]), half_i),
            (ExponentVector::new(vec![1, 0]), plus),
            (ExponentVector::new(vec![-1, 0]), minus),
        ],
    )
}

/// `4 F_even(·, c) F_odd(·, c)`.
pub fn det_closed_form(c: f64) -> Result<ComplexExpPoly> {
    let product = f_parity_poly(Parity::Even, c).mul(&f_parity_poly(Parity::Odd, c))?;
    Ok(product.scale(&Complex64::new(4.0, 0.0)))
}

/// Outcome of [`verify_factorization`].
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub c: f64,
    pub samples: usize,
    /// Global sign `s` in `det A = s · 4 F_even F_odd`.
    pub sign: i32,
    pub max_relative_residual: f64,
}

/// Compares the expanded `det A(k, c)` with `±4 F_even F_odd` at random
/// points `|Re k| ≤ 5`, `|Im k| ≤ 2`. The sign is fixed at the first sample.
pub fn verify_factorization(c: f64, n_samples: usize, seed: u64) -> Result<FactorizationReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let det = assemble(&build_graph(c)?)?.determinant()?;
    let mut rng = sampling::rng(seed);
    let mut sign = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let k = sampling::sample_k(&mut rng, 5.0, -2.0..=2.0);
        let lhs = det.eval(k);
        let rhs = 4.0 * f_even(k, c) * f_odd(k, c);
        if sign == 0 {
            sign = if (lhs / rhs).re >= 0.0 { 1 } else { -1 };
        }
        let residual = (lhs - f64::from(sign) * rhs).norm() / lhs.norm();
        worst = worst.max(residual);
    }
    Ok(FactorizationReport {
        c,
        samples: n_samples,
        sign,
        max_relative_residual: worst,
    })
}

/// Real zeros `(k, c)` of `F_parity` with `1 ≤ k ≤ k_max` and `c ∈ [0, 1]`,
/// sorted by `k` then `c`.
///
/// Odd: `k = m + n`, `c = (m − n)/(m + n)` with `m ≥ n ≥ 0`, where `n = 0`
/// gives the boundary value `c = 1`. Even: `k = m + n − 1`,
/// `c = (m − n)/(m + n − 1)` with `m ≥ n ≥ 1`.
pub fn crossing_values(parity: Parity, k_max: i64) -> Vec<(i64, Ratio<i64>)> {
    let mut out = Vec::new();
    for k in 1..=k_max {
        match parity {
            Parity::Odd => {
                for n in (0..=k / 2).rev() {
                    let m = k - n;
                    out.push((k, Ratio::new(m - n, k)));
                }
            }
            Parity::Even => {
                for n in (1..=(k + 1) / 2).rev() {
                    let m = k + 1 - n;
                    if m >= n {
                        out.push((k, Ratio::new(m - n, k)));
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Localization rectangle `Π_n` for the zero of `F_parity(·, c)` near
/// `Re k = n`: `|Re k − n| < 1/2` and `0 ≤ −Im k ≤ h`, with
/// `h = (2|n|+1)/(2√3)` (odd) or `h = log 3 / (π(1 − c))` (even, `c < 1`).
pub fn localization_rect(parity: Parity, n: i64, c: f64) -> Result<crate::roots::Rect> {
    let h = match parity {
        Parity::Odd => (2.0 * n.unsigned_abs() as f64 + 1.0) / (2.0 * 3f64.sqrt()),
        Parity::Even if c < 1.0 => 3f64.ln() / (PI * (1.0 - c)),
        Parity::Even => {
            return Err(Error::InvalidParameter("even rectangles are unbounded at c = 1".into()));
        }
    };
    let n = n as f64;
    crate::roots::Rect::new(n - 0.5, n + 0.5, -h, 0.0)
}

/// The zero of `F_parity(·, 0)` with real part `n`: `n − i log 3/π` when
/// `n` has the parity of the factor, otherwise the real eigenvalue `n`.
pub fn start_point(parity: Parity, n: i64) -> Result<Complex64> {
    let matches = match parity {
        Parity::Even => n % 2 == 0,
        Parity::Odd => n % 2 != 0,
    };
    if matches {
        Ok(Complex64::new(n as f64, -3f64.ln() / PI))
    } else if n != 0 {
        Ok(Complex64::new(n as f64, 0.0))
    } else {
        Err(Error::InvalidParameter("k = 0 does not start a resonance curve".into()))
    }
}

/// `|Im k|` at or below this counts as touching the real axis.
pub const CROSSING_TOL: f64 = 1e-8;
/// Distance in `c` within which a touch is snapped to an exact crossing.
pub const SNAP_TOL: f64 = 1e-6;
/// Smallest continuation step in `c`.
pub const MIN_STEP: f64 = 1e-5;
/// Even curves higher than this are declared divergent.
pub const HEIGHT_CAP: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub c: f64,
    pub k: Complex64,
    pub crossed_real: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub c: f64,
    pub k: f64,
    /// The refined touch point before snapping.
    pub measured_c: f64,
    pub measured_k: Complex64,
    /// The exact `(k, c)` from [`crossing_values`] when the touch lies
    /// within [`SNAP_TOL`] of one.
    pub exact: Option<(i64, Ratio<i64>)>,
}

#[derive(Clone, Debug)]
pub struct ResonanceCurve {
    pub parity: Parity,
    pub n: i64,
    pub samples: Vec<CurveSample>,
    pub crossings: Vec<Crossing>,
    pub diverged: bool,
    /// Largest `c` at which the curve was tracked, and the zero there.
    pub last_c: f64,
    pub last_k: Complex64,
    /// Parameters where `∂F/∂k` nearly vanished on the curve, indicating a
    /// collision with another zero. Reported, not resolved.
    pub coincidences: Vec<f64>,
}

struct Tracker {
    parity: Parity,
    n: i64,
}

enum Step {
    Accepted(Complex64),
    Rejected,
}

impl Tracker {
    fn newton(&self, start: Complex64, c: f64) -> Option<Complex64> {
        let mut k = start;
        for _ in 0..50 {
            let d = f_parity_dk(self.parity, k, c);
            let step = f_parity(self.parity, k, c) / d;
            if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 0.25 {
                return None;
            }
            k -= step;
            if step.norm() <= 1e-14 * k.norm().max(1.0) {
                return Some(k);
            }
        }
        None
    }

    fn correct(&self, predicted: Complex64, c: f64) -> Step {
        match self.newton(predicted, c) {
            Some(k) if (k.re - self.n as f64).abs() < 0.5 && k.im <= 1e-9 => Step::Accepted(k),
            _ => Step::Rejected,
        }
    }

    fn tangent(&self, k: Complex64, c: f64) -> Complex64 {
        -f_parity_dc(self.parity, k, c) / f_parity_dk(self.parity, k, c)
    }

    /// Continues from `(c0, k0)` to `target`, halving the step on failure.
    /// Returns the last point reached and whether the target was reached.
    fn advance(&self, c0: f64, k0: Complex64, target: f64, coincidences: &mut Vec<f64>) -> (f64, Complex64, bool) {
        let (mut c, mut k) = (c0, k0);
        let mut step = target - c0;
        while c < target {
            let h = step.min(target - c);
            let next_c = if h >= target - c { target } else { c + h };
            let predicted = k + self.tangent(k, c) * (next_c - c);
            match self.correct(predicted, next_c) {
                Step::Accepted(next_k) => {
                    let dk = f_parity_dk(self.parity, next_k, next_c).norm();
                    if dk < 1e-8 && coincidences.last() != Some(&next_c) {
                        coincidences.push(next_c);
                    }
                    c = next_c;
                    k = next_k;
                    step = (2.0 * h).min(target - c0);
                }
                Step::Rejected => {
                    step = 0.5 * h;
                    if step < MIN_STEP {
                        return (c, k, false);
                    }
                }
            }
        }
        (c, k, true)
    }

    fn escaped(&self, k: Complex64, c: f64) -> bool {
        if self.parity != Parity::Even {
            return false;
        }
        let height = -k.im;
        height > HEIGHT_CAP || (c < 1.0 && height > 3f64.ln() / (PI * (1.0 - c)) + 1e-9)
    }

    /// `Im k(c)` by Newton from a nearby point of the curve.
    fn height_at(&self, anchor: &CurveSample, c: f64) -> Option<Complex64> {
        let predicted = anchor.k + self.tangent(anchor.k, anchor.c) * (c - anchor.c);
        self.newton(predicted, c)
    }

    /// Golden-section search for the maximum of `Im k(c)` on `[lo, hi]`.
    fn refine_touch(&self, anchor: &CurveSample, mut lo: f64, mut hi: f64) -> Option<(f64, Complex64)> {
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let mut k1 = self.height_at(anchor, x1)?;
        let mut k2 = self.height_at(anchor, x2)?;
        while hi - lo > 1e-12 {
            if k1.im >= k2.im {
                hi = x2;
                x2 = x1;
                k2 = k1;
                x1 = hi - ratio * (hi - lo);
                k1 = self.height_at(anchor, x1)?;
            } else {
                lo = x1;
                x1 = x2;
                k1 = k2;
                x2 = lo + ratio * (hi - lo);
                k2 = self.height_at(anchor, x2)?;
            }
        }
        Some(if k1.im >= k2.im { (x1, k1) } else { (x2, k2) })
    }
}

fn snap(parity: Parity, c: f64, k: f64) -> Option<(i64, Ratio<i64>)> {
    let nearest = k.round() as i64;
    if nearest < 1 {
        return None;
    }
    crossing_values(parity, nearest)
        .into_iter()
        .filter(|(kk, _)| *kk == nearest)
        .find(|(_, r)| (r.to_f64().unwrap_or(f64::NAN) - c).abs() <= SNAP_TOL)
}

fn validate_grid(c_grid: &[f64]) -> Result<()> {
    if c_grid.is_empty() {
        return Err(Error::InvalidParameter("empty c grid".into()));
    }
    if c_grid.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::InvalidParameter("c grid must lie in [0, 1]".into()));
    }
    if c_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("c grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Evenly spaced grid `0, 1/steps, …, 1`.
pub fn uniform_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// Follows the zero of `F_parity(·, c)` that starts at [`start_point`] over
/// `c_grid`.
///
/// Each step predicts along the tangent `dk/dc = −F_c/F_k` and corrects by
/// Newton's method, requiring the zero to stay in `|Re k − n| < 1/2` and
/// `Im k ≤ 0`. Failed steps are halved down to [`MIN_STEP`]. An even curve
/// that cannot be continued, leaves its localization rectangle or exceeds
/// [`HEIGHT_CAP`] is marked divergent; an odd curve that cannot be continued
/// is an error.
///
/// Touches of the real axis are located by maximising `Im k(c)` around each
/// sampled local maximum and kept when `|Im k| ≤ CROSSING_TOL`. They are
/// inserted into the samples with `crossed_real` set.
pub fn trace_curve(parity: Parity, n: i64, c_grid: &[f64]) -> Result<ResonanceCurve> {
    validate_grid(c_grid)?;
    let tracker = Tracker { parity, n };
    let mut coincidences = Vec::new();
    let mut k = tracker
        .newton(start_point(parity, n)?, 0.0)
        .ok_or_else(|| Error::NonConvergence("start point did not refine".into()))?;
    let mut c = 0.0;
    if c_grid[0] > 0.0 {
        let (reached_c, reached_k, ok) = tracker.advance(0.0, k, c_grid[0], &mut coincidences);
        if !ok {
            return Err(Error::LostTrack { c: reached_c });
        }
        (c, k) = (reached_c, reached_k);
    }

    let mut samples = vec![CurveSample { c, k, crossed_real: false }];
    let mut diverged = tracker.escaped(k, c);
    for &target in &c_grid[1..] {
        if diverged {
            break;
        }
        let (reached_c, reached_k, ok) = tracker.advance(c, k, target, &mut coincidences);
        (c, k) = (reached_c, reached_k);
        if !ok {
            match parity {
                Parity::Even => {
                    diverged = true;
                    break;
                }
                Parity::Odd => return Err(Error::LostTrack { c }),
            }
        }
        samples.push(CurveSample { c, k, crossed_real: false });
        diverged = tracker.escaped(k, c);
    }

    let crossings = find_crossings(&tracker, &mut samples);
    Ok(ResonanceCurve {
        parity,
        n,
        samples,
        crossings,
        diverged,
        last_c: c,
        last_k: k,
        coincidences,
    })
}

fn find_crossings(tracker: &Tracker, samples: &mut Vec<CurveSample>) -> Vec<Crossing> {
    let mut found: Vec<(usize, CurveSample)> = Vec::new();
    let last = samples.len() - 1;
    for i in 0..samples.len() {
        let im = samples[i].k.im;
        let left = i.checked_sub(1).map(|j| samples[j].k.im);
        let right = (i < last).then(|| samples[i + 1].k.im);
        let is_peak = left.is_none_or(|l| im >= l) && right.is_none_or(|r| im >= r);
        if !is_peak {
            continue;
        }
        let touch = match (left, right) {
            (Some(_), Some(_)) => tracker
                .refine_touch(&samples[i], samples[i - 1].c, samples[i + 1].c)
                .map(|(c, k)| CurveSample { c, k, crossed_real: true }),
            _ => Some(CurveSample { crossed_real: true, ..samples[i] }),
        };
        if let Some(t) = touch.filter(|t| t.k.im.abs() <= CROSSING_TOL) {
            found.push((i, t));
        }
    }

    let mut crossings = Vec::new();
    for (offset, (i, mut touch)) in found.into_iter().enumerate() {
        let (measured_c, measured_k) = (touch.c, touch.k);
        let exact = snap(tracker.parity, touch.c, touch.k.re);
        if let Some((kk, r)) = exact {
            touch.c = r.to_f64().unwrap_or(touch.c);
            touch.k = Complex64::new(kk as f64, 0.0);
        }
        crossings.push(Crossing {
            c: touch.c,
            k: touch.k.re,
            measured_c,
            measured_k,
            exact,
        });
        let idx = i + offset;
        if (samples[idx].c - touch.c).abs() <= 1e-12 {
            samples[idx].crossed_real = true;
            samples[idx].k = touch.k;
        } else {
            let at = if touch.c > samples[idx].c { idx + 1 } else { idx };
            samples.insert(at, touch);
        }
    }
    crossings
}
