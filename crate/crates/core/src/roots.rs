//! Zeros of entire functions in rectangles, with multiplicity.
//!
//! Zeros are counted by the argument principle, realised as phase
//! continuation along the rectangle boundary: each side is sampled and
//! bisected until consecutive phase increments stay below π/2, and the total
//! phase change divided by 2π is the winding number. A search rectangle is
//! quadrisected until each cell holds at most one zero (then refined by
//! Newton's method) or is smaller than the tolerance (then reported as one
//! zero whose multiplicity is the cell's winding number).
//!
//! Split points and contour retries use deterministic offsets, so the same
//! input always gives the same cells and the same output. Cells of one
//! subdivision level are processed in parallel and merged in a fixed order.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exppoly::{Coefficient, ExpPolynomial};

/// Default cell diameter below which a cluster is reported as one root.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Roots closer than this to the origin are excluded from counts.
pub const ORIGIN_EXCLUSION: f64 = 1e-9;
/// Slack on the disc boundary when filtering roots by modulus.
pub const RADIUS_SLACK: f64 = 1e-9;

const MAX_JITTER_RETRIES: usize = 8;
const MAX_OUTER_JITTER: f64 = 1e-3;
/// Values below this multiple of the term-magnitude scale are numerically zero.
const ZERO_VALUE_RELATIVE: f64 = 1e-13;

/// An entire function that can be evaluated with its derivative.
pub trait Analytic: Sync {
    fn value(&self, k: Complex64) -> Complex64;

    fn derivative(&self, k: Complex64) -> Complex64;

    /// Upper bound on the phase rate along horizontal lines, used to pick
    /// the initial contour sampling density.
    fn frequency_bound(&self) -> f64 {
        1.0
    }

    /// Size of the largest term at `k`. Values far below it are treated as
    /// zero on contours. Zero disables the relative test.
    fn magnitude_scale(&self, _k: Complex64) -> f64 {
        0.0
    }
}

impl<C: Coefficient> Analytic for ExpPolynomial<C> {
    fn value(&self, k: Complex64) -> Complex64 {
        self.eval(k)
    }

    fn derivative(&self, k: Complex64) -> Complex64 {
        self.eval_derivative(k)
    }

    fn frequency_bound(&self) -> f64 {
        self.max_abs_frequency().max(1e-3)
    }

    fn magnitude_scale(&self, k: Complex64) -> f64 {
        ExpPolynomial::magnitude_scale(self, k)
    }
}

/// [`Analytic`] from a pair of closures.
pub struct FnAnalytic<F, D> {
    f: F,
    df: D,
    frequency: f64,
}

impl<F, D> FnAnalytic<F, D>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    D: Fn(Complex64) -> Complex64 + Sync,
{
    pub fn new(f: F, df: D, frequency: f64) -> Self {
        FnAnalytic { f, df, frequency }
    }
}

impl<F, D> Analytic for FnAnalytic<F, D>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    D: Fn(Complex64) -> Complex64 + Sync,
{
    fn value(&self, k: Complex64) -> Complex64 {
        (self.f)(k)
    }

    fn derivative(&self, k: Complex64) -> Complex64 {
        (self.df)(k)
    }

    fn frequency_bound(&self) -> f64 {
        self.frequency
    }
}

/// Closed axis-aligned rectangle in the k-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !finite || !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidParameter(format!(
                "rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}] has no interior"
            )));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, k: Complex64, slack: f64) -> bool {
        k.re >= self.re_min - slack
            && k.re <= self.re_max + slack
            && k.im >= self.im_min - slack
            && k.im <= self.im_max + slack
    }

    /// Corners in counter-clockwise order from the bottom left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn expanded(&self, offsets: [f64; 4]) -> Rect {
        Rect {
            re_min: self.re_min - offsets[0],
            re_max: self.re_max + offsets[1],
            im_min: self.im_min - offsets[2],
            im_max: self.im_max + offsets[3],
        }
    }

    fn quadrisect(&self, split: Complex64) -> [Rect; 4] {
        let (x, y) = (split.re, split.im);
        [
            Rect { re_min: self.re_min, re_max: x, im_min: self.im_min, im_max: y },
            Rect { re_min: x, re_max: self.re_max, im_min: self.im_min, im_max: y },
            Rect { re_min: self.re_min, re_max: x, im_min: y, im_max: self.im_max },
            Rect { re_min: x, re_max: self.re_max, im_min: y, im_max: self.im_max },
        ]
    }

    fn fingerprint(&self) -> u64 {
        [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .fold(0x9e37_79b9_7f4a_7c15, |h, x| splitmix64(h ^ x.to_bits()))
    }
}

/// A zero found by [`find_roots`].
#[derive(Clone, Debug, PartialEq)]
pub struct Resonance {
    pub k: Complex64,
    pub multiplicity: u32,
    /// `|F(k)|` at the reported point.
    pub residual: f64,
    /// The last cell that isolated this zero.
    pub cell: Rect,
    /// False when Newton's method did not converge inside the cell and the
    /// centroid of a tolerance-sized cell is reported instead.
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct RootFinderOptions {
    /// Cell diameter below which subdivision stops.
    pub tol: f64,
    pub newton_max_iter: usize,
    /// Seed for the deterministic split-point and contour offsets.
    pub seed: u64,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        RootFinderOptions {
            tol: DEFAULT_TOL,
            newton_max_iter: 60,
            seed: 0,
        }
    }
}

impl RootFinderOptions {
    pub fn with_tol(tol: f64) -> Self {
        RootFinderOptions {
            tol,
            ..Self::default()
        }
    }
}

/// Phase tracking failed: the function is (numerically) zero on or very
/// near the contour.
#[derive(Debug, Clone, Copy)]
struct ContourFailure;

fn is_numerically_zero<F: Analytic + ?Sized>(f: &F, k: Complex64, value: Complex64) -> bool {
    if !value.re.is_finite() || !value.im.is_finite() || value.norm() == 0.0 {
        return true;
    }
    let scale = f.magnitude_scale(k);
    scale > 0.0 && value.norm() <= ZERO_VALUE_RELATIVE * scale
}

fn phase_step(from: Complex64, to: Complex64) -> f64 {
    (to / from).arg()
}

/// Phase change of `f` from `a` to `b`, bisecting until every increment
/// (and its two halves) is below π/2.
fn segment_phase<F: Analytic + ?Sized>(
    f: &F,
    a: Complex64,
    b: Complex64,
    fa: Complex64,
    fb: Complex64,
) -> std::result::Result<f64, ContourFailure> {
    let min_len = 1e-12 * (1.0 + a.norm().max(b.norm()));
    let mut stack = vec![(a, b, fa, fb)];
    let mut total = 0.0;
    while let Some((a, b, fa, fb)) = stack.pop() {
        let whole = phase_step(fa, fb);
        let m = 0.5 * (a + b);
        let fm = f.value(m);
        if is_numerically_zero(f, m, fm) {
            return Err(ContourFailure);
        }
        let d1 = phase_step(fa, fm);
        let d2 = phase_step(fm, fb);
        // The logarithmic derivative bounds the local phase rate and guards
        // against increments that wrap by a full turn.
        let rate = [a, m, b]
            .iter()
            .zip([fa, fm, fb])
            .map(|(&z, v)| (f.derivative(z) / v).norm())
            .fold(0.0, f64::max);
        if rate * (b - a).norm() <= 1.0
            && d1.abs() < FRAC_PI_2
            && d2.abs() < FRAC_PI_2
            && (d1 + d2 - whole).abs() < 1e-9
        {
            total += d1 + d2;
            continue;
        }
        if (b - a).norm() < min_len {
            return Err(ContourFailure);
        }
        // Second half first so the first half is processed next.
        stack.push((m, b, fm, fb));
        stack.push((a, m, fa, fm));
    }
    Ok(total)
}

fn contour_winding<F: Analytic + ?Sized>(f: &F, rect: &Rect) -> std::result::Result<i64, ContourFailure> {
    let corners = rect.corners();
    let mut values = [Complex64::new(0.0, 0.0); 4];
    for (v, &z) in values.iter_mut().zip(&corners) {
        *v = f.value(z);
        if is_numerically_zero(f, z, *v) {
            return Err(ContourFailure);
        }
    }
    let rate = f.frequency_bound();
    let mut total = 0.0;
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        let len = (b - a).norm();
        let pieces = ((len * rate / 0.5).ceil() as usize).clamp(2, 1 << 20);
        let mut prev_z = a;
        let mut prev_v = values[side];
        for j in 1..=pieces {
            let z = if j == pieces { b } else { a + (b - a) * (j as f64 / pieces as f64) };
            let v = if j == pieces { values[(side + 1) % 4] } else { f.value(z) };
            if is_numerically_zero(f, z, v) {
                return Err(ContourFailure);
            }
            total += segment_phase(f, prev_z, z, prev_v, v)?;
            prev_z = z;
            prev_v = v;
        }
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.1 {
        return Err(ContourFailure);
    }
    Ok(rounded as i64)
}

/// Number of zeros of `f` inside `rect`, counted with multiplicity.
///
/// Fails with [`Error::BoundaryZero`] when `f` vanishes (numerically) on the
/// boundary; callers are expected to move the rectangle and retry.
pub fn winding_number<F: Analytic + ?Sized>(f: &F, rect: &Rect) -> Result<i64> {
    contour_winding(f, rect).map_err(|_| Error::BoundaryZero { retries: 0 })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic value in `[-1, 1]`.
fn unit_offset(key: u64) -> f64 {
    (splitmix64(key) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Winding number of `rect`, moving its sides outward by up to 1e-3 when
/// `f` vanishes on the boundary. Returns the rectangle actually used.
pub fn winding_number_jittered<F: Analytic + ?Sized>(f: &F, rect: &Rect, seed: u64) -> Result<(Rect, i64)> {
    for attempt in 0..=MAX_JITTER_RETRIES {
        let candidate = if attempt == 0 {
            *rect
        } else {
            let base = splitmix64(seed ^ rect.fingerprint() ^ attempt as u64);
            let offsets = [0, 1, 2, 3].map(|i| MAX_OUTER_JITTER * unit_offset(base + i).abs());
            rect.expanded(offsets)
        };
        if let Ok(w) = contour_winding(f, &candidate) {
            return Ok((candidate, w));
        }
    }
    Err(Error::BoundaryZero {
        retries: MAX_JITTER_RETRIES,
    })
}

#[derive(Clone, Copy)]
struct Cell {
    rect: Rect,
    winding: i64,
}

enum CellOutcome {
    Done(Option<Resonance>),
    Split(Vec<Cell>),
}

fn newton<F: Analytic + ?Sized>(f: &F, start: Complex64, max_iter: usize) -> Option<Complex64> {
    let mut k = start;
    for _ in 0..max_iter {
        let v = f.value(k);
        if v.norm() == 0.0 {
            return Some(k);
        }
        let d = f.derivative(k);
        if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
            return None;
        }
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        k -= step;
        if step.norm() <= 4.0 * f64::EPSILON * k.norm().max(1.0) {
            return Some(k);
        }
    }
    None
}

fn split_cell<F: Analytic + ?Sized>(f: &F, cell: &Cell, seed: u64) -> Option<Vec<Cell>> {
    let r = &cell.rect;
    for attempt in 0..=MAX_JITTER_RETRIES {
        let key = splitmix64(seed ^ r.fingerprint()).wrapping_add(attempt as u64 * 2);
        // Off-centre splits keep cell edges away from symmetry lines such as
        // the real axis and integer abscissae.
        let split = r.center()
            + Complex64::new(
                0.05 * r.width() * unit_offset(key),
                0.05 * r.height() * unit_offset(key + 1),
            );
        let children = r.quadrisect(split);
        let windings: std::result::Result<Vec<i64>, _> =
            children.iter().map(|c| contour_winding(f, c)).collect();
        if let Ok(ws) = windings {
            if ws.iter().sum::<i64>() == cell.winding && ws.iter().all(|&w| w >= 0) {
                return Some(
                    children
                        .into_iter()
                        .zip(ws)
                        .filter(|(_, w)| *w > 0)
                        .map(|(rect, winding)| Cell { rect, winding })
                        .collect(),
                );
            }
        }
    }
    None
}

fn cluster(f: &(impl Analytic + ?Sized), cell: &Cell, converged: bool) -> Resonance {
    let k = cell.rect.center();
    Resonance {
        k,
        multiplicity: cell.winding as u32,
        residual: f.value(k).norm(),
        cell: cell.rect,
        converged,
    }
}

fn process_cell<F: Analytic + ?Sized>(f: &F, cell: &Cell, opts: &RootFinderOptions) -> CellOutcome {
    let rect = &cell.rect;
    let small = rect.diameter() <= opts.tol;
    if cell.winding == 1 {
        if let Some(k) = newton(f, rect.center(), opts.newton_max_iter) {
            let slack = 1e-9 * rect.diameter() + 1e-14 * k.norm();
            if rect.contains(k, slack) {
                return CellOutcome::Done(Some(Resonance {
                    k,
                    multiplicity: 1,
                    residual: f.value(k).norm(),
                    cell: *rect,
                    converged: true,
                }));
            }
        }
    }
    if small {
        return CellOutcome::Done(Some(cluster(f, cell, cell.winding > 1)));
    }
    match split_cell(f, cell, opts.seed) {
        Some(children) => CellOutcome::Split(children),
        // The contour can no longer be resolved at this scale: the zeros
        // are clustered tighter than the evaluation noise allows to separate.
        None => CellOutcome::Done(Some(cluster(f, cell, false))),
    }
}

fn sort_roots(roots: &mut [Resonance]) {
    roots.sort_by(|a, b| {
        a.k.re
            .total_cmp(&b.k.re)
            .then_with(|| a.k.im.total_cmp(&b.k.im))
            .then(Ordering::Equal)
    });
}

/// All zeros of `f` in `region`, sorted by real then imaginary part.
pub fn find_roots<F: Analytic + ?Sized>(f: &F, region: &Rect, opts: &RootFinderOptions) -> Result<Vec<Resonance>> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let (rect, winding) = winding_number_jittered(f, region, opts.seed)?;
    let mut roots = Vec::new();
    let mut work = vec![Cell { rect, winding }];
    work.retain(|c| c.winding > 0);
    while !work.is_empty() {
        let outcomes: Vec<CellOutcome> = work.par_iter().map(|c| process_cell(f, c, opts)).collect();
        work = Vec::new();
        for outcome in outcomes {
            match outcome {
                CellOutcome::Done(Some(r)) => roots.push(r),
                CellOutcome::Done(None) => {}
                CellOutcome::Split(children) => work.extend(children),
            }
        }
    }
    sort_roots(&mut roots);
    Ok(merge_clusters(f, roots, opts.tol))
}

/// Joins zeros closer than `tol` (single linkage) into one cluster at the
/// multiplicity-weighted centroid. Rounding splits a multiple zero into
/// nearby simple ones, which Newton's method then finds separately.
fn merge_clusters<F: Analytic + ?Sized>(f: &F, roots: Vec<Resonance>, tol: f64) -> Vec<Resonance> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if roots[j].k.re - roots[i].k.re > tol {
                break;
            }
            if (roots[j].k - roots[i].k).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[b.max(a)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    let mut merged: Vec<Resonance> = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            if g.len() == 1 {
                return roots[g[0]].clone();
            }
            let multiplicity: u32 = g.iter().map(|&i| roots[i].multiplicity).sum();
            let k = g
                .iter()
                .map(|&i| roots[i].k * f64::from(roots[i].multiplicity))
                .sum::<Complex64>()
                / f64::from(multiplicity);
            let mut cell = roots[g[0]].cell;
            for &i in &g[1..] {
                let c = roots[i].cell;
                cell.re_min = cell.re_min.min(c.re_min);
                cell.re_max = cell.re_max.max(c.re_max);
                cell.im_min = cell.im_min.min(c.im_min);
                cell.im_max = cell.im_max.max(c.im_max);
            }
            Resonance {
                k,
                multiplicity,
                residual: f.value(k).norm(),
                cell,
                converged: g.iter().all(|&i| roots[i].converged),
            }
        })
        .collect();
    sort_roots(&mut merged);
    merged
}

/// Numeric frequency groups of `p` with merged coefficients, ascending.
fn frequency_groups<C: Coefficient>(p: &ExpPolynomial<C>) -> Vec<(f64, f64)> {
    let mut terms: Vec<(f64, Complex64)> = p
        .terms()
        .map(|(e, a)| (p.sigma(e), a.to_complex()))
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = terms.iter().map(|t| t.0.abs()).fold(1.0, f64::max);
    let mut groups: Vec<(f64, Complex64)> = Vec::new();
    for (s, a) in terms {
        match groups.last_mut() {
            Some((gs, ga)) if (s - *gs).abs() <= 1e-12 * scale => *ga += a,
            _ => groups.push((s, a)),
        }
    }
    let max = groups.iter().map(|g| g.1.norm()).fold(0.0, f64::max);
    groups
        .into_iter()
        .filter(|g| g.1.norm() > 1e-14 * max)
        .map(|(s, a)| (s, a.norm()))
        .collect()
}

/// Smallest `y ≥ 0` (up to bisection accuracy) such that the extreme term
/// dominates all others once `|Im k| > y` on its side.
fn dominance_height(extreme: (f64, f64), others: &[(f64, f64)]) -> f64 {
    // Ratio of the other terms to the extreme one; decreasing in y.
    let ratio = |y: f64| -> f64 {
        others
            .iter()
            .map(|&(s, a)| a / extreme.1 * (-(extreme.0 - s).abs() * y).exp())
            .sum()
    };
    if ratio(0.0) < 1.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while ratio(hi) >= 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// Height `K` of a horizontal strip `|Im k| ≤ K` holding every zero of `p`.
///
/// Below the strip the term with the largest frequency dominates the sum of
/// all others in modulus, above it the term with the smallest frequency
/// does, so no zero can lie outside. Terms with equal numeric frequency are
/// merged first.
pub fn strip_bound<C: Coefficient>(p: &ExpPolynomial<C>) -> f64 {
    let groups = frequency_groups(p);
    if groups.len() < 2 {
        return 0.0;
    }
    let last = groups.len() - 1;
    // Im k = −y: |e^{iσk}| = e^{σy}, the largest σ wins.
    let below = dominance_height(groups[last], &groups[..last]);
    // Im k = +y: the smallest σ wins.
    let above = dominance_height(groups[0], &groups[1..]);
    below.max(above)
}

/// Result of [`count_in_disc`].
#[derive(Clone, Debug)]
pub struct CountReport {
    pub radius: f64,
    /// Sum of multiplicities of zeros with `0 < |k| ≤ radius`.
    pub count: u64,
    pub roots: Vec<Resonance>,
    /// Zeros within [`ORIGIN_EXCLUSION`] of `k = 0`, which is never a
    /// resonance.
    pub excluded: Vec<Resonance>,
    pub strip_bound: f64,
}

pub fn count_in_disc<C: Coefficient>(p: &ExpPolynomial<C>, radius: f64, opts: &RootFinderOptions) -> Result<CountReport> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    if p.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    let k_strip = strip_bound(p);
    let region = Rect::new(
        -radius - 0.5,
        radius + 0.5,
        -k_strip - 0.5,
        k_strip + 0.5,
    )?;
    let found = find_roots(p, &region, opts)?;
    let (excluded, inside): (Vec<Resonance>, Vec<Resonance>) = found
        .into_iter()
        .filter(|r| r.k.norm() <= radius + RADIUS_SLACK)
        .partition(|r| r.k.norm() <= ORIGIN_EXCLUSION);
    let count = inside.iter().map(|r| u64::from(r.multiplicity)).sum();
    Ok(CountReport {
        radius,
        count,
        roots: inside,
        excluded,
        strip_bound: k_strip,
    })
}

/// `W = (σ⁺ − σ⁻)/2`, so that `N(R) = (2/π)·W·R + O(1)`.
pub fn weyl_coefficient<C: Coefficient>(p: &ExpPolynomial<C>) -> Result<f64> {
    let (lo, hi) = p.sigma_range()?;
    Ok(0.5 * (hi - lo))
}

/// Least-squares slope of the counting function over `radii`, divided by
/// `2/π`.
pub fn weyl_coefficient_empirical<C: Coefficient>(
    p: &ExpPolynomial<C>,
    radii: &[f64],
    opts: &RootFinderOptions,
) -> Result<f64> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    let counts: Vec<f64> = radii
        .iter()
        .map(|&r| count_in_disc(p, r, opts).map(|c| c.count as f64))
        .collect::<Result<_>>()?;
    let n = radii.len() as f64;
    let mean_r = radii.iter().sum::<f64>() / n;
    let mean_c = counts.iter().sum::<f64>() / n;
    let sxy: f64 = radii.iter().zip(&counts).map(|(r, c)| (r - mean_r) * (c - mean_c)).sum();
    let sxx: f64 = radii.iter().map(|r| (r - mean_r).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("radii must not all be equal".into()));
    }
    Ok(sxy / sxx * PI / 2.0)
}
