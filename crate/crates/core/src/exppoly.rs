//! Exponential polynomials `F(k) = Σ a_r exp(i σ_r k)`.
//!
//! Frequencies are never stored as floats. Each term is keyed by an integer
//! [`ExponentVector`] `n` over a shared [`FrequencyTable`] `ρ`, with
//! `σ = Σ_e n_e ρ_e`. Terms with equal keys merge exactly, even when the
//! table entries are rationally dependent.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Relative threshold below which complex coefficients are pruned.
pub const COMPLEX_PRUNE_RELATIVE: f64 = 1e-14;

/// Integer exponents, one per entry of the frequency table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(Vec<i32>);

impl ExponentVector {
    pub fn new(components: Vec<i32>) -> Self {
        ExponentVector(components)
    }

    pub fn zero(dimension: usize) -> Self {
        ExponentVector(vec![0; dimension])
    }

    pub fn filled(dimension: usize, value: i32) -> Self {
        ExponentVector(vec![value; dimension])
    }

    /// The unit vector `±e_index`.
    pub fn unit(dimension: usize, index: usize, sign: i32) -> Self {
        let mut v = vec![0; dimension];
        v[index] = sign;
        ExponentVector(v)
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn plus(&self, other: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.0.len(), other.0.len());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Adds `sign` to one component in place.
    pub(crate) fn bump(&mut self, index: usize, sign: i32) {
        self.0[index] += sign;
    }
}

impl Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Shared table of base frequencies (edge lengths for determinants).
#[derive(Clone)]
pub struct FrequencyTable(Arc<[f64]>);

impl FrequencyTable {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        FrequencyTable(values.into().into())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `σ = Σ n_e ρ_e`, accumulated in index order.
    pub fn sigma(&self, exponents: &ExponentVector) -> f64 {
        exponents
            .0
            .iter()
            .zip(self.0.iter())
            .map(|(&n, &rho)| f64::from(n) * rho)
            .sum()
    }
}

impl PartialEq for FrequencyTable {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.len() == other.0.len()
                && self.0.iter().zip(other.0.iter()).all(|(a, b)| a.to_bits() == b.to_bits()))
    }
}

impl Debug for FrequencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

/// Coefficient ring of an exponential polynomial.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn to_complex(&self) -> Complex64;

    /// Drops coefficients that count as zero for this ring.
    fn prune<K: Ord>(terms: &mut BTreeMap<K, Self>);

    /// Real and imaginary parts as printed by [`ExpPolynomial::dump`].
    fn dump_parts(&self) -> (String, String);
}

impl Coefficient for BigInt {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn prune<K: Ord>(terms: &mut BTreeMap<K, Self>) {
        terms.retain(|_, a| !a.is_zero());
    }

    fn dump_parts(&self) -> (String, String) {
        (self.to_string(), "0".to_owned())
    }
}

impl Coefficient for Complex64 {
    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn prune<K: Ord>(terms: &mut BTreeMap<K, Self>) {
        let max = terms.values().map(|a| a.norm()).fold(0.0, f64::max);
        let threshold = COMPLEX_PRUNE_RELATIVE * max;
        terms.retain(|_, a| *a != Complex64::zero() && a.norm() > threshold);
    }

    fn dump_parts(&self) -> (String, String) {
        (format_f64(self.re), format_f64(self.im))
    }
}

/// 17 significant digits, '.' separator.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `Σ a_r exp(i σ_r k)` over a frequency table.
#[derive(Clone)]
pub struct ExpPolynomial<C> {
    freqs: FrequencyTable,
    terms: BTreeMap<ExponentVector, C>,
    numeric: OnceLock<Arc<[(f64, Complex64)]>>,
}

pub type IntExpPoly = ExpPolynomial<BigInt>;
pub type ComplexExpPoly = ExpPolynomial<Complex64>;

impl<C: Coefficient> PartialEq for ExpPolynomial<C> {
    fn eq(&self, other: &Self) -> bool {
        self.freqs == other.freqs && self.terms == other.terms
    }
}

impl<C: Coefficient> Debug for ExpPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpPolynomial")
            .field("freqs", &self.freqs)
            .field("terms", &self.terms)
            .finish()
    }
}

impl<C: Coefficient> ExpPolynomial<C> {
    pub fn zero(freqs: FrequencyTable) -> Self {
        Self::from_map(freqs, BTreeMap::new())
    }

    pub fn constant(freqs: FrequencyTable, value: C) -> Self {
        let dim = freqs.len();
        Self::monomial(freqs, ExponentVector::zero(dim), value)
    }

    pub fn monomial(freqs: FrequencyTable, exponents: ExponentVector, coefficient: C) -> Self {
        Self::from_terms(freqs, [(exponents, coefficient)])
    }

    /// Builds from `(exponents, coefficient)` pairs, merging equal keys.
    pub fn from_terms(
        freqs: FrequencyTable,
        terms: impl IntoIterator<Item = (ExponentVector, C)>,
    ) -> Self {
        let mut map: BTreeMap<ExponentVector, C> = BTreeMap::new();
        for (e, a) in terms {
            assert_eq!(e.dimension(), freqs.len(), "exponent vector dimension");
            accumulate(&mut map, e, a);
        }
        Self::from_map(freqs, map)
    }

    pub(crate) fn from_map(freqs: FrequencyTable, mut terms: BTreeMap<ExponentVector, C>) -> Self {
        C::prune(&mut terms);
        ExpPolynomial {
            freqs,
            terms,
            numeric: OnceLock::new(),
        }
    }

    pub fn freqs(&self) -> &FrequencyTable {
        &self.freqs
    }

    pub fn dimension(&self) -> usize {
        self.freqs.len()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&ExponentVector, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &ExponentVector) -> C {
        self.terms.get(exponents).cloned().unwrap_or_else(C::zero)
    }

    fn check_tables(&self, other: &Self) -> Result<()> {
        if self.freqs == other.freqs {
            Ok(())
        } else {
            Err(Error::MismatchedTables)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_tables(other)?;
        let mut map = self.terms.clone();
        for (e, a) in &other.terms {
            accumulate(&mut map, e.clone(), a.clone());
        }
        Ok(Self::from_map(self.freqs.clone(), map))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        let map = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), -a.clone()))
            .collect();
        Self::from_map(self.freqs.clone(), map)
    }

    pub fn scale(&self, factor: &C) -> Self {
        let map = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), a.clone() * factor.clone()))
            .collect();
        Self::from_map(self.freqs.clone(), map)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_tables(other)?;
        let mut map = BTreeMap::new();
        for (e1, a1) in &self.terms {
            for (e2, a2) in &other.terms {
                accumulate(&mut map, e1.plus(e2), a1.clone() * a2.clone());
            }
        }
        Ok(Self::from_map(self.freqs.clone(), map))
    }

    /// Numeric frequency of a key.
    pub fn sigma(&self, exponents: &ExponentVector) -> f64 {
        self.freqs.sigma(exponents)
    }

    /// `(σ_r, a_r)` pairs, computed once per value.
    fn numeric_terms(&self) -> &[(f64, Complex64)] {
        self.numeric.get_or_init(|| {
            self.terms
                .iter()
                .map(|(e, a)| (self.freqs.sigma(e), a.to_complex()))
                .collect()
        })
    }

    pub fn eval(&self, k: Complex64) -> Complex64 {
        let mut sum = KahanSum::default();
        for &(sigma, a) in self.numeric_terms() {
            sum.add(a * (Complex64::i() * sigma * k).exp());
        }
        sum.total()
    }

    pub fn eval_derivative(&self, k: Complex64) -> Complex64 {
        let mut sum = KahanSum::default();
        for &(sigma, a) in self.numeric_terms() {
            let i_sigma = Complex64::new(0.0, sigma);
            sum.add(a * i_sigma * (i_sigma * k).exp());
        }
        sum.total()
    }

    /// `Σ |a_r| |exp(i σ_r k)|`, the size of the largest possible value
    /// near `k`; used to scale residual tolerances.
    pub fn magnitude_scale(&self, k: Complex64) -> f64 {
        self.numeric_terms()
            .iter()
            .map(|&(sigma, a)| a.norm() * (-sigma * k.im).exp())
            .sum()
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.numeric_terms()
            .iter()
            .map(|&(s, _)| s.abs())
            .fold(0.0, f64::max)
    }

    /// `(σ⁻, σ⁺)` over the stored terms.
    pub fn sigma_range(&self) -> Result<(f64, f64)> {
        if self.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        let (lo, hi) = self
            .numeric_terms()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(s, _)| {
                (lo.min(s), hi.max(s))
            });
        Ok((lo, hi))
    }

    /// `(a⁻, a⁺)`: coefficients at the all `-1` and all `+1` exponent
    /// vectors, i.e. at `σ = ∓vol` when the table holds edge lengths.
    pub fn extreme_coefficients(&self) -> (C, C) {
        let dim = self.dimension();
        (
            self.coefficient(&ExponentVector::filled(dim, -1)),
            self.coefficient(&ExponentVector::filled(dim, 1)),
        )
    }

    pub fn to_complex(&self) -> ComplexExpPoly {
        ExpPolynomial::from_map(
            self.freqs.clone(),
            self.terms
                .iter()
                .map(|(e, a)| (e.clone(), a.to_complex()))
                .collect(),
        )
    }

    /// One line per term, `n_1 … n_m : re(a) im(a)`, lexicographic order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (e, a) in &self.terms {
            let exps: Vec<String> = e.0.iter().map(ToString::to_string).collect();
            let (re, im) = a.dump_parts();
            out.push_str(&exps.join(" "));
            out.push_str(&format!(" : {re} {im}\n"));
        }
        out
    }
}

impl IntExpPoly {
    /// Accumulates `factor * exp(±i ρ_index k) * source` into `self`.
    /// Used by the determinant expansion; skips pruning until the end.
    pub(crate) fn accumulate_shifted(&mut self, source: &IntExpPoly, factor: i32, shift: Option<(usize, i32)>) {
        for (e, a) in &source.terms {
            let mut key = e.clone();
            if let Some((index, s)) = shift {
                key.bump(index, s);
            }
            let value = a * factor;
            accumulate(&mut self.terms, key, value);
        }
        self.numeric = OnceLock::new();
    }

    pub(crate) fn pruned(mut self) -> Self {
        BigInt::prune(&mut self.terms);
        self.numeric = OnceLock::new();
        self
    }
}

fn accumulate<C: Coefficient>(map: &mut BTreeMap<ExponentVector, C>, key: ExponentVector, value: C) {
    match map.get_mut(&key) {
        Some(existing) => {
            let current = std::mem::replace(existing, C::zero());
            *existing = current + value;
        }
        None => {
            map.insert(key, value);
        }
    }
}

/// Compensated complex summation.
#[derive(Default, Clone, Copy)]
pub struct KahanSum {
    sum: Complex64,
    carry: Complex64,
}

impl KahanSum {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> Complex64 {
        self.sum
    }
}
