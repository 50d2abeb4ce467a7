//! Singularity analysis of the counting generating functions.
//!
//! For bounded indices the dominant singularity is a square-root zero of the
//! innermost radicand. For bounded levels it depends on where `k` falls in
//! the sequence `N_j`: strictly between `N_j` and `N_{j+1}` the radicand
//! `R_{j+1}` has a simple zero, and at `k = N_j` the radicands `R_j` and
//! `R_{j+1}` vanish together.

mod radicand;

pub use radicand::{
    eval_radicands, find_dominant_singularity, Jet, RadicandStatus, RadicandSystem, RadicandValues, Singularity,
    ROOT_TOLERANCE, VANISH_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec};
use rug::Integer;
use serde::Serialize;
use std::f64::consts::PI;

/// `(u_j, N_j)` from `u_0 = 0`, `u_{i+1} = u_i² + i + 1`, `N_i = u_i² - u_i + i`.
pub fn u_n_sequences(j: u32) -> (Integer, Integer) {
    let mut u = Integer::new();
    for i in 0..j {
        u = u.square() + (i + 1);
    }
    let n = Integer::from(u.square_ref()) - &u + j;
    (u, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `N_j < k < N_{j+1}`.
    Interior,
    /// `k = N_j`.
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundClass {
    pub j: u32,
    pub kind: BoundKind,
}

impl BoundClass {
    pub fn is_boundary(&self) -> bool {
        self.kind == BoundKind::Boundary
    }
}

/// Places `k >= 1` relative to the sequence `N_j`.
pub fn classify_bound(k: u32) -> BoundClass {
    assert!(k >= 1, "k must be positive");
    let k = Integer::from(k);
    let mut j = 0;
    loop {
        let (_, nj) = u_n_sequences(j);
        let (_, next) = u_n_sequences(j + 1);
        if k == nj {
            return BoundClass { j, kind: BoundKind::Boundary };
        }
        if nj < k && k < next {
            return BoundClass { j, kind: BoundKind::Interior };
        }
        j += 1;
    }
}

/// Limit constants of the number of leaves for bounded indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexConstants {
    pub mu: f64,
    pub sigma_sq: f64,
    /// `c_1 ..= c_{k+1}` at `u = 1`.
    pub c: Vec<f64>,
}

/// `c_1 = 1`, `c_j = 4(j-1) - 1 + 2√c_{j-1}`, first `m` terms.
pub fn c_sequence(m: usize) -> Vec<f64> {
    let mut c: Vec<f64> = Vec::with_capacity(m);
    for j in 1..=m {
        c.push(if j == 1 { 1.0 } else { 4.0 * (j - 1) as f64 - 1.0 + 2.0 * c[j - 2].sqrt() });
    }
    c
}

pub fn index_constants(k: u32) -> IndexConstants {
    let kf = k as f64;
    let s = kf.sqrt() + 2.0 * kf;
    IndexConstants {
        mu: kf / s,
        sigma_sq: kf * kf / (2.0 * kf.sqrt() * s * s),
        c: c_sequence(k as usize + 1),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpansionConstants {
    /// Bounded indices: `R̂_j(ρ) = c_j ρ²` past the vanishing radicand.
    Index { c: Vec<f64> },
    /// Bounded levels: `R_i(ρ - ε) ≈ a_i + b_i √ε` for `i = first..=k+1`, and
    /// `γ = -∂R/∂z` of the vanishing radicand (`R_{j+1}`, or `R_j` at a
    /// boundary, where no `b_i` are reported).
    Levels { first: usize, gamma: f64, a: Vec<f64>, b: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityReport {
    pub family: Family,
    pub k: u32,
    pub u: f64,
    pub rho: f64,
    pub vanishing_indices: Vec<usize>,
    pub j: Option<u32>,
    pub boundary: Option<bool>,
    #[serde(rename = "B_prime_1")]
    pub b_prime_1: f64,
    pub sigma_sq: f64,
    pub constants: ExpansionConstants,
}

pub fn index_report(k: u32) -> Result<SingularityReport> {
    let spec = FamilySpec::new(Family::BoundedIndex, k)?;
    let s = find_dominant_singularity(&RadicandSystem::total_leaves(spec), 1.0)?;
    let c = index_constants(k);
    Ok(SingularityReport {
        family: Family::BoundedIndex,
        k,
        u: 1.0,
        rho: s.rho,
        vanishing_indices: s.vanishing,
        j: None,
        boundary: None,
        b_prime_1: c.mu,
        sigma_sq: c.sigma_sq,
        constants: ExpansionConstants::Index { c: c.c },
    })
}

/// Step for the central differences of `ρ'`.
const SECOND_DERIVATIVE_STEP: f64 = 1e-4;

/// The zero of the critical radicand and its `u`-derivative, as functions of `u`.
struct Critical {
    system: RadicandSystem,
    index: usize,
}

impl Critical {
    fn rho(&self, u: f64) -> Result<f64> {
        self.system.first_zero(u, self.index, 0.0)
    }

    fn slope(&self, u: f64) -> Result<f64> {
        Ok(self.system.implicit_slope(self.rho(u)?, u, self.index))
    }

    fn curvature(&self) -> Result<f64> {
        let d = |h: f64| -> Result<f64> { Ok((self.slope(1.0 + h)? - self.slope(1.0 - h)?) / (2.0 * h)) };
        let h = SECOND_DERIVATIVE_STEP;
        Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
    }
}

/// Mean and variance constants of the number of leaves for bounded levels,
/// with the expansion constants at the singularity.
pub fn level_constants(k: u32) -> Result<SingularityReport> {
    if k == 1 {
        return Err(Error::DegenerateBound { k });
    }
    let spec = FamilySpec::new(Family::BoundedLevels, k)?;
    let class = classify_bound(k);
    let system = RadicandSystem::total_leaves(spec);
    let dominant = find_dominant_singularity(&system, 1.0)?;
    let j = class.j as usize;
    let index = if class.is_boundary() { j } else { j + 1 };
    let critical = Critical { system: system.clone(), index };
    let rho = critical.rho(1.0)?;
    let d1 = critical.slope(1.0)?;
    let d2 = critical.curvature()?;
    let b1 = -d1 / rho;
    let sigma_sq = (d1 / rho).powi(2) - d2 / rho - d1 / rho;

    let gamma = -system.jet(rho, 1.0, index).dz;
    let kf = k as f64;
    let first = j + 2;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in first..=k as usize + 1 {
        let base = 1.0 - 4.0 * (kf - i as f64 + 1.0) * rho * rho - 2.0 * rho;
        let ai = match a.last() {
            None => base,
            Some(&prev) => base + 2.0 * rho * f64::sqrt(prev),
        };
        if !class.is_boundary() {
            b.push(match (a.last(), b.last()) {
                (Some(&pa), Some(&pb)) => pb * rho / f64::sqrt(pa),
                _ => 2.0 * rho * gamma.sqrt(),
            });
        }
        a.push(ai);
    }
    Ok(SingularityReport {
        family: Family::BoundedLevels,
        k,
        u: 1.0,
        rho,
        vanishing_indices: dominant.vanishing,
        j: Some(class.j),
        boundary: Some(class.is_boundary()),
        b_prime_1: b1,
        sigma_sq,
        constants: ExpansionConstants::Levels { first, gamma, a, b },
    })
}

/// Report for either family.
pub fn singularity_report(spec: FamilySpec) -> Result<SingularityReport> {
    match spec.family {
        Family::BoundedIndex => index_report(spec.k),
        Family::BoundedLevels => level_constants(spec.k),
    }
}

/// Natural logarithm of the first-order estimate of the number of closed
/// terms of size `n`.
pub fn asymptotic_count_ln(spec: FamilySpec, n: usize) -> Result<f64> {
    let nf = n as f64;
    match spec.family {
        Family::BoundedIndex => {
            let kf = spec.k as f64;
            let c = index_constants(spec.k).c;
            let prod: f64 = c[1..].iter().map(|x| x.ln()).sum();
            let amp = 0.5 * ((kf.sqrt() + 2.0 * kf).ln() - (4.0 * PI).ln() - prod);
            Ok(amp + nf * (1.0 + 2.0 * kf.sqrt()).ln() - 1.5 * nf.ln())
        }
        Family::BoundedLevels => {
            if spec.k == 1 || classify_bound(spec.k).is_boundary() {
                return Err(Error::Unsupported {
                    what: format!("no closed-form amplitude for bounded levels at boundary k = {}", spec.k),
                });
            }
            let r = level_constants(spec.k)?;
            let ExpansionConstants::Levels { a, b, .. } = &r.constants else { unreachable!() };
            let (ak, bk) = (*a.last().unwrap(), *b.last().unwrap());
            let rho = r.rho;
            let h = -bk * rho.sqrt() / (4.0 * rho * ak.sqrt());
            let gamma_half = -2.0 * PI.sqrt();
            Ok((h / gamma_half).ln() - nf * rho.ln() - 1.5 * nf.ln())
        }
    }
}

/// The first-order estimate itself; infinite once it leaves `f64` range.
pub fn asymptotic_count(spec: FamilySpec, n: usize) -> Result<f64> {
    Ok(asymptotic_count_ln(spec, n)?.exp())
}

/// Natural logarithm of a positive big integer.
pub fn ln_integer(x: &Integer) -> f64 {
    let (m, e) = x.to_f64_exp();
    m.ln() + e as f64 * std::f64::consts::LN_2
}

/// `asymptotic / exact`, computed in log space.
pub fn asymptotic_ratio(spec: FamilySpec, n: usize, exact: &Integer) -> Result<f64> {
    Ok((asymptotic_count_ln(spec, n)? - ln_integer(exact)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        let pairs: Vec<(u64, u64)> = (0..5)
            .map(|j| {
                let (u, n) = u_n_sequences(j);
                (u.to_u64().unwrap(), n.to_u64().unwrap())
            })
            .collect();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (3, 8), (12, 135), (148, 21760)]);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_bound(8), BoundClass { j: 2, kind: BoundKind::Boundary });
        assert_eq!(classify_bound(4), BoundClass { j: 1, kind: BoundKind::Interior });
        assert_eq!(classify_bound(1), BoundClass { j: 1, kind: BoundKind::Boundary });
        assert_eq!(classify_bound(134), BoundClass { j: 2, kind: BoundKind::Interior });
        assert_eq!(classify_bound(136), BoundClass { j: 3, kind: BoundKind::Interior });
    }

    #[test]
    fn index_constant_examples() {
        let c = index_constants(1);
        assert!((c.mu - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.sigma_sq - 1.0 / 18.0).abs() < 1e-15);
        assert_eq!(c.c, vec![1.0, 5.0]);
        let seq = c_sequence(3);
        assert!((seq[2] - (7.0 + 2.0 * 5f64.sqrt())).abs() < 1e-13);
        assert!((index_constants(4).mu - 0.4).abs() < 1e-15);
        let mut last = 0.0;
        for k in 1..=1000 {
            let mu = index_constants(k).mu;
            assert!(mu > last && mu < 0.5);
            last = mu;
        }
        assert!(0.5 - last < 0.01);
    }

    #[test]
    fn degenerate_and_unsupported() {
        assert_eq!(level_constants(1), Err(Error::DegenerateBound { k: 1 }));
        assert!(matches!(asymptotic_count(FamilySpec::levels(8), 100), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn index_growth_base() {
        let a = asymptotic_count_ln(FamilySpec::index(2), 101).unwrap();
        let b = asymptotic_count_ln(FamilySpec::index(2), 100).unwrap();
        let base = (a - b + 1.5 * (101f64 / 100.0).ln()).exp();
        assert!((base - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn table_entries() {
        let r = level_constants(2).unwrap();
        assert!((r.b_prime_1 - 0.4381229337).abs() < 1e-6);
        assert!((r.sigma_sq - 0.0385234386).abs() < 1e-6);
        let r = level_constants(8).unwrap();
        assert!((r.b_prime_1 - 0.4583333333).abs() < 1e-6);
        assert!((r.sigma_sq - 0.0125868052).abs() < 1e-6);
        assert_eq!(r.vanishing_indices, vec![2, 3]);
    }
}
