//! Nested radicands and their first positive zero.
//!
//! Solving the quadratic of class `c` expresses its generating function
//! through a square root whose radicand involves the square root of the next
//! class. Numbering from the deepest class outwards (`R_1` belongs to class
//! `k`, `R_{k+1}` to class 0) gives a chain
//!
//! ```text
//! R_1 = α_1,    R_i = α_i + β_i·√R_{i-1}
//! ```
//!
//! with `α_i`, `β_i` polynomial in `z` and in the marking variable `u`.

use crate::error::{Error, Result};
use crate::family::{class_rules, ClassRule, FamilySpec, MarkSpec};
use std::ops::{Add, Mul, Neg, Sub};

/// Reporting threshold for a vanishing radicand.
pub const VANISH_TOLERANCE: f64 = 1e-9;
/// Bisection tolerance for the dominant singularity.
pub const ROOT_TOLERANCE: f64 = 1e-14;

/// A value with its partial derivatives in `z` and `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub dz: f64,
    pub du: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Jet {
        Jet { v, dz: 0.0, du: 0.0 }
    }

    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        Jet { v: s, dz: self.dz / (2.0 * s), du: self.du / (2.0 * s) }
    }

    fn recip(self) -> Jet {
        let w = 1.0 / self.v;
        Jet { v: w, dz: -self.dz * w * w, du: -self.du * w * w }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, dz: self.dz + o.dz, du: self.du + o.du }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, dz: self.dz - o.dz, du: self.du - o.du }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self.v * o.v, dz: self.dz * o.v + self.v * o.dz, du: self.du * o.v + self.v * o.du }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet { v: self.v * c, dz: self.dz * c, du: self.du * c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum RadicandStatus {
    AllPositive,
    /// First index with `|R_i| <= tolerance`.
    VanishesAt(usize),
    /// `R_i < -tolerance`; later radicands were not evaluated.
    InvalidBeyond(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadicandValues {
    /// `values[i - 1]` is `R_i`.
    pub values: Vec<f64>,
    pub status: RadicandStatus,
}

/// The radicand chain of a family, possibly with one statistic marked by `u`.
#[derive(Clone, Debug)]
pub struct RadicandSystem {
    pub spec: FamilySpec,
    pub mark: MarkSpec,
    rules: Vec<ClassRule>,
}

impl RadicandSystem {
    pub fn new(spec: FamilySpec, mark: MarkSpec) -> Result<RadicandSystem> {
        mark.validate(spec)?;
        Ok(RadicandSystem { spec, mark, rules: class_rules(spec, mark) })
    }

    /// The chain whose `u` marks all leaves.
    pub fn total_leaves(spec: FamilySpec) -> RadicandSystem {
        RadicandSystem::new(spec, MarkSpec::TotalLeaves).expect("total leaves is valid for every family")
    }

    /// Chain length `k + 1`.
    pub fn len(&self) -> usize {
        self.spec.k as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(α_i, β_i)` at `(z, u)`, for `1 <= i <= k + 1`.
    pub fn coefficients(&self, i: usize, z: Jet, u: Jet) -> (Jet, Jet) {
        let c = self.len() - i;
        let rule = self.rules[c];
        let one = Jet::constant(1.0);
        let pick = |marked: bool| if marked { u } else { one };
        let (x, w, v) = (pick(rule.leaf), pick(rule.unary), pick(rule.binary));
        let leaves = v * x * z * z * (4.0 * rule.colors as f64);
        match rule.child {
            None => (one - leaves, Jet::constant(0.0)),
            Some(ch) if ch == c => {
                let e = one - z * w;
                (e * e - leaves, Jet::constant(0.0))
            }
            Some(ch) => {
                let child = self.rules[ch];
                let e = if child.child == Some(ch) { one - z * pick(child.unary) } else { one };
                let beta = v * w * z * 2.0 * pick(child.binary).recip();
                (one - leaves - beta * e, beta)
            }
        }
    }

    /// All radicands at `(z, u)`. Values within `tol` of zero count as zero
    /// inside later square roots.
    pub fn eval_with(&self, z: f64, u: f64, tol: f64) -> RadicandValues {
        let (zj, uj) = (Jet::constant(z), Jet::constant(u));
        let mut values = Vec::with_capacity(self.len());
        let mut status = RadicandStatus::AllPositive;
        let mut root = 0.0;
        for i in 1..=self.len() {
            let (a, b) = self.coefficients(i, zj, uj);
            let r = a.v + b.v * root;
            values.push(r);
            if r < -tol {
                return RadicandValues { values, status: RadicandStatus::InvalidBeyond(i) };
            }
            if r.abs() <= tol {
                if status == RadicandStatus::AllPositive {
                    status = RadicandStatus::VanishesAt(i);
                }
                root = 0.0;
            } else {
                root = r.sqrt();
            }
        }
        RadicandValues { values, status }
    }

    pub fn eval(&self, z: f64, u: f64) -> RadicandValues {
        self.eval_with(z, u, VANISH_TOLERANCE)
    }

    /// Whether `R_1, …, R_upto` are all non-negative, with no tolerance.
    pub fn nonnegative_upto(&self, z: f64, u: f64, upto: usize) -> bool {
        let (zj, uj) = (Jet::constant(z), Jet::constant(u));
        let mut root = 0.0;
        for i in 1..=upto {
            let (a, b) = self.coefficients(i, zj, uj);
            let r = a.v + b.v * root;
            if r.is_nan() || r < 0.0 {
                return false;
            }
            root = r.sqrt();
        }
        true
    }

    /// `R_upto` with its partial derivatives, found by pushing jets up the
    /// chain. The inner radicands must be positive at `(z, u)`.
    pub fn jet(&self, z: f64, u: f64, upto: usize) -> Jet {
        let zj = Jet { v: z, dz: 1.0, du: 0.0 };
        let uj = Jet { v: u, dz: 0.0, du: 1.0 };
        let mut r = Jet::constant(0.0);
        for i in 1..=upto {
            let (a, b) = self.coefficients(i, zj, uj);
            r = if i == 1 { a } else { a + b * r.sqrt() };
        }
        r
    }

    /// `sup { z : R_1..R_upto >= 0 on [0, z] }` by bisection down to `tol`.
    pub fn first_zero(&self, u: f64, upto: usize, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, 0.5);
        if self.nonnegative_upto(hi, u, upto) {
            lo = hi;
            hi = 1.0;
            if self.nonnegative_upto(hi, u, upto) {
                return Err(Error::NoRootInRange);
            }
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.nonnegative_upto(mid, u, upto) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Implicit derivative `dρ/du = -(∂R/∂u)/(∂R/∂z)` of the zero of `R_upto`.
    pub fn implicit_slope(&self, z: f64, u: f64, upto: usize) -> f64 {
        let r = self.jet(z, u, upto);
        -r.du / r.dz
    }
}

/// Location of the dominant singularity.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Singularity {
    pub rho: f64,
    /// Indices `i` with `|R_i(ρ)| <= 1e-9`, ascending.
    pub vanishing: Vec<usize>,
}

pub fn eval_radicands(system: &RadicandSystem, z: f64, u: f64) -> RadicandValues {
    system.eval(z, u)
}

/// Smallest positive `z` at which the chain stops being real.
pub fn find_dominant_singularity(system: &RadicandSystem, u: f64) -> Result<Singularity> {
    let rho = system.first_zero(u, system.len(), ROOT_TOLERANCE)?;
    let values = system.eval(rho, u).values;
    let vanishing = values
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs() <= VANISH_TOLERANCE)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(Singularity { rho, vanishing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let levels1 = RadicandSystem::total_leaves(FamilySpec::levels(1));
        let r = levels1.eval(0.0, 1.0);
        assert_eq!((r.values, r.status), (vec![1.0, 1.0], RadicandStatus::AllPositive));
        let r = levels1.eval(0.5, 1.0);
        assert_eq!(r.values[0], 0.0);
        assert_eq!(r.status, RadicandStatus::VanishesAt(1));
        let index1 = RadicandSystem::total_leaves(FamilySpec::index(1));
        let r = index1.eval(1.0 / 3.0, 1.0);
        assert!(r.values[0].abs() < 1e-15);
        assert_eq!(r.status, RadicandStatus::VanishesAt(1));
        let r = levels1.eval(0.6, 1.0);
        assert_eq!(r.status, RadicandStatus::InvalidBeyond(1));
        assert_eq!(r.values.len(), 1);
    }

    #[test]
    fn coefficients_match_written_forms() {
        let (z, u) = (0.13, 1.07);
        let zj = Jet::constant(z);
        let uj = Jet::constant(u);
        let k = 5.0;
        let idx = RadicandSystem::total_leaves(FamilySpec::index(5));
        let (a1, b1) = idx.coefficients(1, zj, uj);
        assert!((a1.v - ((1.0 - z) * (1.0 - z) - 4.0 * k * u * z * z)).abs() < 1e-15 && b1.v == 0.0);
        let (a2, b2) = idx.coefficients(2, zj, uj);
        assert!((a2.v - (1.0 - 4.0 * (k - 1.0) * z * z * u - 2.0 * z + 2.0 * z * z)).abs() < 1e-15);
        assert!((b2.v - 2.0 * z).abs() < 1e-15);
        let (a4, _) = idx.coefficients(4, zj, uj);
        assert!((a4.v - (1.0 - 4.0 * (k - 3.0) * z * z * u - 2.0 * z)).abs() < 1e-15);

        // binary nodes at level L = k - l carry v: R_{l+1} gets v, R_{l+2} gets 1/v
        let l = 2.0;
        let bin = RadicandSystem::new(FamilySpec::levels(5), MarkSpec::BinaryAtLevel(3)).unwrap();
        let (a, b) = bin.coefficients(3, zj, uj);
        assert!((a.v - (1.0 - 4.0 * z * z * (k - l) * u - 2.0 * z * u)).abs() < 1e-15);
        assert!((b.v - 2.0 * z * u).abs() < 1e-15);
        let (a, b) = bin.coefficients(4, zj, uj);
        assert!((a.v - (1.0 - 4.0 * z * z * (k - l - 1.0) - 2.0 * z / u)).abs() < 1e-15);
        assert!((b.v - 2.0 * z / u).abs() < 1e-15);

        let un = RadicandSystem::new(FamilySpec::levels(5), MarkSpec::UnaryAtLevel(3)).unwrap();
        let (a, b) = un.coefficients(3, zj, uj);
        assert!((a.v - (1.0 - 4.0 * z * z * (k - l) - 2.0 * z * u)).abs() < 1e-15);
        assert!((b.v - 2.0 * z * u).abs() < 1e-15);

        let lv = RadicandSystem::new(FamilySpec::levels(5), MarkSpec::LeavesAtLevel(3)).unwrap();
        let (a, _) = lv.coefficients(3, zj, uj);
        assert!((a.v - (1.0 - 4.0 * z * z * u * (k - l) - 2.0 * z)).abs() < 1e-15);
        let (a, _) = lv.coefficients(4, zj, uj);
        assert!((a.v - (1.0 - 4.0 * z * z * (k - l - 1.0) - 2.0 * z)).abs() < 1e-15);
    }

    #[test]
    fn jets_match_finite_differences() {
        let sys = RadicandSystem::total_leaves(FamilySpec::levels(9));
        let (z, u, i) = (0.12, 0.97, 7);
        let j = sys.jet(z, u, i);
        let f = |z: f64, u: f64| sys.eval_with(z, u, 0.0).values[i - 1];
        let h = 1e-6;
        assert!((j.v - f(z, u)).abs() < 1e-14);
        assert!((j.dz - (f(z + h, u) - f(z - h, u)) / (2.0 * h)).abs() < 1e-7);
        assert!((j.du - (f(z, u + h) - f(z, u - h)) / (2.0 * h)).abs() < 1e-7);
    }

    #[test]
    fn dominant_singularities() {
        let s = find_dominant_singularity(&RadicandSystem::total_leaves(FamilySpec::levels(8)), 1.0).unwrap();
        assert!((s.rho - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.vanishing, vec![2, 3]);
        let s = find_dominant_singularity(&RadicandSystem::total_leaves(FamilySpec::levels(1)), 1.0).unwrap();
        assert!((s.rho - 0.5).abs() < 1e-12);
        assert_eq!(s.vanishing, vec![1, 2]);
        let s = find_dominant_singularity(&RadicandSystem::total_leaves(FamilySpec::index(4)), 1.0).unwrap();
        assert!((s.rho - 0.2).abs() < 1e-12);
        assert_eq!(s.vanishing, vec![1]);
    }
}
