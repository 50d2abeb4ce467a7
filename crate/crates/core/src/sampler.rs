//! Exact-size uniform sampling by the recursive method.
//!
//! At class `i` and size `n` a single integer `r` is drawn uniformly from
//! `[0, A_i[n])` and walked through the productions: the `colors` leaves,
//! then the abstraction `A_child[n-1]`, then the applications
//! `A_i[a]·A_i[n-1-a]`. All weights are exact, so the result is exactly
//! uniform.

use crate::error::{Error, Result};
use crate::family::{class_rules, ClassRule, FamilySpec, MarkSpec};
use crate::series::{Census, CountTable, MomentOrder};
use crate::term::{level_histogram, Term};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rug::{Assign, Integer, Rational};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Generator for sample `index` of a run seeded with `seed`. Each index gets
/// its own ChaCha stream.
pub fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform integer in `[0, bound)`, by rejection on `bits(bound)` random bits.
pub fn uniform_below(rng: &mut impl RngCore, bound: &Integer) -> Integer {
    assert!(*bound > 0, "empty range");
    let bits = bound.significant_bits();
    let words = bits.div_ceil(64) as usize;
    let mut buf = vec![0u64; words];
    loop {
        for w in buf.iter_mut() {
            *w = rng.next_u64();
        }
        let mut x = Integer::from_digits(&buf, rug::integer::Order::Lsf);
        x.keep_bits_mut(bits);
        if x < *bound {
            return x;
        }
    }
}

/// Samples closed terms of one size from shared counting tables.
#[derive(Clone, Debug)]
pub struct Sampler {
    counts: Arc<CountTable>,
    rules: Vec<ClassRule>,
}

enum Frame {
    Build(usize, usize),
    Abs,
    App,
}

impl Sampler {
    pub fn new(counts: Arc<CountTable>) -> Sampler {
        let rules = class_rules(counts.spec, MarkSpec::None);
        Sampler { counts, rules }
    }

    pub fn spec(&self) -> FamilySpec {
        self.counts.spec
    }

    /// A uniform closed term of size `n <= max_size`.
    pub fn sample(&self, n: usize, rng: &mut impl RngCore) -> Result<Term> {
        assert!(n <= self.counts.max_size, "table too small for size {n}");
        if *self.counts.closed(n) == 0 {
            return Err(Error::EmptySize { n });
        }
        let mut todo = vec![Frame::Build(0, n)];
        let mut done: Vec<Term> = Vec::new();
        let mut prod = Integer::new();
        while let Some(frame) = todo.pop() {
            match frame {
                Frame::Abs => {
                    let body = done.pop().unwrap();
                    done.push(Term::abs(body));
                }
                Frame::App => {
                    let right = done.pop().unwrap();
                    let left = done.pop().unwrap();
                    done.push(Term::app(left, right));
                }
                Frame::Build(class, size) => {
                    let rule = self.rules[class];
                    let row = self.counts.row(class);
                    let mut r = uniform_below(rng, &row[size]);
                    if size == 1 {
                        if r < rule.colors {
                            done.push(Term::Var(r.to_u32().unwrap() + 1));
                            continue;
                        }
                        r -= rule.colors;
                    }
                    if let Some(child) = rule.child.filter(|_| size >= 2) {
                        let w = self.counts.count(child, size - 1);
                        if r < *w {
                            todo.push(Frame::Abs);
                            todo.push(Frame::Build(child, size - 1));
                            continue;
                        }
                        r -= w;
                    }
                    let split = self.pick_split(row, size, &mut r, &mut prod);
                    todo.push(Frame::App);
                    todo.push(Frame::Build(class, size - 1 - split));
                    todo.push(Frame::Build(class, split));
                }
            }
        }
        let t = done.pop().unwrap();
        debug_assert!(t.size() == n && self.spec().contains(&t));
        Ok(t)
    }

    /// Left size of an application of total size `size`, with `r` below the
    /// sum of the split weights. Splits are tried from both ends inwards,
    /// where most of the weight sits.
    fn pick_split(&self, row: &[Integer], size: usize, r: &mut Integer, prod: &mut Integer) -> usize {
        let (mut lo, mut hi) = (1, size - 2);
        loop {
            assert!(lo <= hi, "split weights do not cover the draw");
            for a in [lo, hi] {
                prod.assign(&row[a] * &row[size - 1 - a]);
                if *r < *prod {
                    return a;
                }
                *r -= &*prod;
                if lo == hi {
                    break;
                }
            }
            lo += 1;
            hi -= 1;
        }
    }
}

/// A uniform closed term of size `n`, determined by `seed`.
pub fn sample_term(spec: FamilySpec, n: usize, seed: u64) -> Result<Term> {
    let counts = Census::from_env().counts(spec, n)?;
    Sampler::new(counts).sample(n, &mut substream(seed, 0))
}

/// `m` terms from substreams `0..m` of `seed`.
pub fn sample_terms(census: &Census, spec: FamilySpec, n: usize, m: usize, seed: u64) -> Result<Vec<Term>> {
    let sampler = Sampler::new(census.counts(spec, n)?);
    (0..m).map(|i| sampler.sample(n, &mut substream(seed, i as u64))).collect()
}

/// Summary of a statistic over a batch of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBatchStats {
    pub spec: FamilySpec,
    pub mark: MarkSpec,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub empirical_mean: f64,
    /// With the `m - 1` denominator.
    pub empirical_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Mean number of leaves, abstractions and applications at each level.
    pub level_means: Vec<[f64; 3]>,
    pub exact_mean: f64,
    /// `|empirical - exact| / (σ̂/√m)`.
    pub mean_z: f64,
    /// Whether the empirical mean is more than four standard errors off.
    pub mean_flagged: bool,
}

/// Moments of integer observations from exact power sums.
#[derive(Clone, Debug, Default)]
struct PowerSums {
    m: u64,
    s: [Integer; 5],
}

impl PowerSums {
    fn push(&mut self, x: u64) {
        self.m += 1;
        let mut p = Integer::from(1);
        for s in self.s.iter_mut() {
            *s += &p;
            p *= x;
        }
    }

    /// Central moments `m_2, m_3, m_4` with denominator `m`, and the mean.
    fn central(&self) -> (Rational, Rational, Rational, Rational) {
        let m = Integer::from(self.m);
        let [_, s1, s2, s3, s4] = &self.s;
        let mean = Rational::from((s1.clone(), m.clone()));
        let mu = |k: u32| -> Rational {
            let num: Integer = match k {
                2 => Integer::from(&m * s2) - Integer::from(s1 * s1),
                3 => {
                    Integer::from(&m * &m) * s3 - Integer::from(3) * &m * s1 * s2 + Integer::from(2) * s1 * s1 * s1
                }
                _ => {
                    Integer::from(&m * &m) * &m * s4 - Integer::from(4) * &m * &m * s1 * s3
                        + Integer::from(6) * &m * s1 * s1 * s2
                        - Integer::from(3) * s1 * s1 * s1 * s1
                }
            };
            Rational::from((num, Integer::from(rug::ops::Pow::pow(&m, k))))
        };
        (mean, mu(2), mu(3), mu(4))
    }
}

/// Statistics of `mark` over `m` samples of size `n`, compared with the
/// exact mean.
pub fn batch_stats(census: &Census, spec: FamilySpec, mark: MarkSpec, n: usize, m: usize, seed: u64) -> Result<SampleBatchStats> {
    mark.validate(spec)?;
    assert!(m >= 1, "need at least one sample");
    let sampler = Sampler::new(census.counts(spec, n)?);
    let mut sums = PowerSums::default();
    let mut levels: Vec<[u64; 3]> = Vec::new();
    for i in 0..m {
        let t = sampler.sample(n, &mut substream(seed, i as u64))?;
        let h = level_histogram(&t);
        if levels.len() < h.levels.len() {
            levels.resize(h.levels.len(), [0; 3]);
        }
        for (acc, c) in levels.iter_mut().zip(&h.levels) {
            acc[0] += c.leaves as u64;
            acc[1] += c.unary as u64;
            acc[2] += c.binary as u64;
        }
        sums.push(mark.value(&h));
    }
    let (mean, m2, m3, m4) = sums.central();
    let mf = m as f64;
    let var_pop = m2.to_f64();
    let empirical_variance = if m > 1 { var_pop * mf / (mf - 1.0) } else { 0.0 };
    let (skewness, excess_kurtosis) = if var_pop > 0.0 {
        (m3.to_f64() / var_pop.powf(1.5), m4.to_f64() / (var_pop * var_pop) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let exact = if mark == MarkSpec::None {
        Rational::new()
    } else {
        let t = census.table(spec, mark, n, MomentOrder::First)?;
        Rational::from((t.first(0, n), t.count(0, n).clone()))
    };
    let diff = Rational::from(&mean - &exact).to_f64().abs();
    let se = (empirical_variance / mf).sqrt();
    let mean_z = if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(SampleBatchStats {
        spec,
        mark,
        n,
        samples: m,
        seed,
        empirical_mean: mean.to_f64(),
        empirical_variance,
        skewness,
        excess_kurtosis,
        level_means: levels.iter().map(|c| c.map(|x| x as f64 / mf)).collect(),
        exact_mean: exact.to_f64(),
        mean_z,
        mean_flagged: mean_z > 4.0,
    })
}

pub fn sample_batch_stats(spec: FamilySpec, mark: MarkSpec, n: usize, m: usize, seed: u64) -> Result<SampleBatchStats> {
    batch_stats(&Census::from_env(), spec, mark, n, m, seed)
}

/// Pearson goodness-of-fit result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Compares observed counts with expected probabilities. Cells with zero
/// probability must have zero observations.
pub fn chi_square(observed: &[u64], probabilities: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probabilities) {
        if p == 0.0 {
            if o > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        cells += 1;
        let e = p * total as f64;
        statistic += (o as f64 - e).powi(2) / e;
    }
    let degrees_of_freedom = cells.saturating_sub(1);
    let p_value = if degrees_of_freedom == 0 {
        if statistic.is_finite() { 1.0 } else { 0.0 }
    } else {
        ChiSquared::new(degrees_of_freedom as f64).unwrap().sf(statistic)
    };
    ChiSquareTest { statistic, degrees_of_freedom, p_value }
}

/// Samples `m` terms and tests that every term of size `n` is equally likely.
/// Only sensible when the count is small.
pub fn uniformity_test(census: &Census, spec: FamilySpec, n: usize, m: usize, seed: u64) -> Result<ChiSquareTest> {
    let count = census.count_closed(spec, n)?;
    let cells = count.to_usize().filter(|&c| c <= 100_000).ok_or_else(|| Error::Unsupported {
        what: format!("uniformity test over {count} terms"),
    })?;
    if cells == 0 {
        return Err(Error::EmptySize { n });
    }
    let mut seen: HashMap<Term, u64> = HashMap::new();
    for t in sample_terms(census, spec, n, m, seed)? {
        *seen.entry(t).or_insert(0) += 1;
    }
    let mut observed: Vec<u64> = seen.into_values().collect();
    observed.resize(cells.max(observed.len()), 0);
    let p = 1.0 / cells as f64;
    Ok(chi_square(&observed, &vec![p; observed.len()]))
}

/// Samples `m` terms and tests the observed values of `mark` against the
/// exact distribution.
pub fn distribution_test(census: &Census, spec: FamilySpec, mark: MarkSpec, n: usize, m: usize, seed: u64) -> Result<ChiSquareTest> {
    let exact = census.distribution(spec, mark, n)?;
    let total = exact.values().fold(Integer::new(), |acc, c| acc + c);
    let mut observed: BTreeMap<u64, u64> = exact.keys().map(|&v| (v, 0)).collect();
    for t in sample_terms(census, spec, n, m, seed)? {
        *observed.entry(mark.value_of(&t)).or_insert(0) += 1;
    }
    let probs: Vec<f64> = observed
        .keys()
        .map(|v| exact.get(v).map_or(0.0, |c| Rational::from((c.clone(), total.clone())).to_f64()))
        .collect();
    Ok(chi_square(&observed.into_values().collect::<Vec<_>>(), &probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_debruijn;

    #[test]
    fn unique_term() {
        for seed in 0..5 {
            assert_eq!(sample_term(FamilySpec::levels(1), 2, seed).unwrap(), parse_debruijn("λ1").unwrap());
        }
        assert_eq!(sample_term(FamilySpec::levels(1), 3, 0), Err(Error::EmptySize { n: 3 }));
    }

    #[test]
    fn deterministic() {
        let a = sample_term(FamilySpec::index(3), 200, 42).unwrap();
        let b = sample_term(FamilySpec::index(3), 200, 42).unwrap();
        let c = sample_term(FamilySpec::index(3), 200, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_draws_stay_in_range() {
        let mut rng = substream(1, 0);
        let bound = Integer::from(Integer::u_pow_u(2, 130)) + 7;
        for _ in 0..200 {
            let x = uniform_below(&mut rng, &bound);
            assert!(x >= 0 && x < bound);
        }
        let small = Integer::from(3);
        let mut hits = [0; 3];
        for _ in 0..3000 {
            hits[uniform_below(&mut rng, &small).to_usize().unwrap()] += 1;
        }
        assert!(hits.iter().all(|&h| (850..1150).contains(&h)), "{hits:?}");
    }

    #[test]
    fn samples_belong_to_the_family() {
        let census = Census::new();
        for spec in [FamilySpec::index(2), FamilySpec::levels(3)] {
            for t in sample_terms(&census, spec, 300, 20, 7).unwrap() {
                assert_eq!(t.size(), 300);
                assert!(spec.contains(&t));
            }
        }
    }

    #[test]
    fn power_sums_match_direct_moments() {
        let xs = [3u64, 5, 5, 8, 13, 1, 0, 7];
        let mut s = PowerSums::default();
        xs.iter().for_each(|&x| s.push(x));
        let (mean, m2, m3, m4) = s.central();
        let mf = xs.iter().sum::<u64>() as f64 / 8.0;
        let c = |p: i32| xs.iter().map(|&x| (x as f64 - mf).powi(p)).sum::<f64>() / 8.0;
        assert!((mean.to_f64() - mf).abs() < 1e-12);
        assert!((m2.to_f64() - c(2)).abs() < 1e-9);
        assert!((m3.to_f64() - c(3)).abs() < 1e-9);
        assert!((m4.to_f64() - c(4)).abs() < 1e-9);
    }

    #[test]
    fn single_term_has_no_spread() {
        let census = Census::new();
        for mark in [MarkSpec::TotalLeaves, MarkSpec::UnaryAtLevel(0), MarkSpec::LeavesAtLevel(1)] {
            let s = batch_stats(&census, FamilySpec::levels(1), mark, 2, 10, 3).unwrap();
            assert_eq!(s.empirical_variance, 0.0);
            assert!(!s.mean_flagged);
        }
    }

    #[test]
    fn chi_square_examples() {
        let t = chi_square(&[100, 100, 100], &[1.0 / 3.0; 3]);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.degrees_of_freedom, 2);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let t = chi_square(&[150, 50], &[0.5, 0.5]);
        assert!(t.p_value < 1e-9);
        assert!(!chi_square(&[1, 1], &[1.0, 0.0]).passes(1e-3));
    }

    #[test]
    fn small_sizes_are_uniform() {
        let census = Census::new();
        let t = uniformity_test(&census, FamilySpec::index(1), 5, 20_000, 11).unwrap();
        assert_eq!(t.degrees_of_freedom, 4);
        assert!(t.passes(1e-3), "{t:?}");
    }
}
