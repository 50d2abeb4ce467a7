use super::cache::{file_path, read_table, write_table, CACHE_ENV};
use super::distribution::{packed_rows, unpack_histogram};
use super::{CountTable, MomentOrder, MomentTable};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, MarkSpec};
use rug::{Integer, Rational};
use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

/// Largest size for which [`Census::distribution`] builds bivariate tables.
pub const DEFAULT_DISTRIBUTION_CAP: usize = 300;

/// Count, mean and variance of a statistic over closed terms of one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMoments {
    pub n: usize,
    pub count: Integer,
    pub mean: Rational,
    pub variance: Rational,
}

/// Tables built on demand and kept for reuse, in memory and optionally on
/// disk.
#[derive(Debug)]
pub struct Census {
    cache_dir: Option<PathBuf>,
    distribution_cap: usize,
    counts: Mutex<HashMap<FamilySpec, Arc<CountTable>>>,
    tables: Mutex<HashMap<(FamilySpec, MarkSpec), Arc<MomentTable>>>,
}

impl Default for Census {
    fn default() -> Self {
        Census::new()
    }
}

impl Census {
    /// A census that keeps tables in memory only.
    pub fn new() -> Census {
        Census {
            cache_dir: None,
            distribution_cap: DEFAULT_DISTRIBUTION_CAP,
            counts: Mutex::default(),
            tables: Mutex::default(),
        }
    }

    /// Uses the directory in `DEBRUIJN_CENSUS_CACHE`, if set.
    pub fn from_env() -> Census {
        Census::new().with_cache_dir(std::env::var_os(CACHE_ENV).map(PathBuf::from))
    }

    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Census {
        self.cache_dir = dir;
        self
    }

    pub fn with_distribution_cap(mut self, cap: usize) -> Census {
        self.distribution_cap = cap;
        self
    }

    fn load(&self, spec: FamilySpec, mark: MarkSpec) -> Option<MomentTable> {
        let dir = self.cache_dir.as_ref()?;
        let path = file_path(dir, spec, mark);
        if !path.exists() {
            return None;
        }
        read_table(&path).ok().filter(|t| t.spec() == spec && t.mark == mark)
    }

    fn store(&self, table: &MomentTable) -> Result<()> {
        if let Some(dir) = &self.cache_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::Cache {
                path: dir.display().to_string(),
                message: e.to_string(),
            })?;
            write_table(&file_path(dir, table.spec(), table.mark), table)?;
        }
        Ok(())
    }

    /// Counting table covering sizes `0..=n` at least.
    pub fn counts(&self, spec: FamilySpec, n: usize) -> Result<Arc<CountTable>> {
        let mut counts = self.counts.lock().unwrap();
        let have = counts.get(&spec).map_or(0, |t| t.max_size);
        if let Some(t) = counts.get(&spec).filter(|t| t.max_size >= n) {
            return Ok(t.clone());
        }
        if let Some(t) = self.load(spec, MarkSpec::None).filter(|t| t.max_size() >= n) {
            let c = t.counts().clone();
            counts.insert(spec, c.clone());
            return Ok(c);
        }
        let t = Arc::new(CountTable::build(spec, n.max(have)));
        self.store(&MomentTable::from_parts(t.clone(), MarkSpec::None, Vec::new(), None))?;
        counts.insert(spec, t.clone());
        Ok(t)
    }

    /// Moment table for `mark` covering sizes `0..=n` with at least `order`.
    pub fn table(&self, spec: FamilySpec, mark: MarkSpec, n: usize, order: MomentOrder) -> Result<Arc<MomentTable>> {
        mark.validate(spec)?;
        if mark == MarkSpec::None {
            let counts = self.counts(spec, n)?;
            return Ok(Arc::new(MomentTable::from_parts(counts, mark, Vec::new(), None)));
        }
        let fits = |t: &MomentTable| t.max_size() >= n && t.order() >= order;
        if let Some(t) = self.tables.lock().unwrap().get(&(spec, mark)).filter(|t| fits(t)) {
            return Ok(t.clone());
        }
        if let Some(t) = self.load(spec, mark).filter(fits) {
            let t = Arc::new(t);
            self.tables.lock().unwrap().insert((spec, mark), t.clone());
            return Ok(t);
        }
        let counts = self.counts(spec, n)?;
        let counts = if counts.max_size == n { counts } else { Arc::new(counts.truncated(n)) };
        let t = Arc::new(MomentTable::from_counts(counts, mark, order)?);
        self.store(&t)?;
        self.tables.lock().unwrap().insert((spec, mark), t.clone());
        Ok(t)
    }

    pub fn count_closed(&self, spec: FamilySpec, n: usize) -> Result<Integer> {
        Ok(self.counts(spec, n)?.closed(n).clone())
    }

    pub fn exact_moments(&self, spec: FamilySpec, mark: MarkSpec, n: usize) -> Result<ExactMoments> {
        let t = self.table(spec, mark, n, MomentOrder::Second)?;
        let count = t.count(0, n).clone();
        if count == 0 {
            return Err(Error::EmptySize { n });
        }
        let mean = Rational::from((t.first(0, n), count.clone()));
        let square = Rational::from((t.second(0, n).expect("second moments were requested"), count.clone()));
        let variance = square - Rational::from(mean.square_ref());
        Ok(ExactMoments { n, count, mean, variance })
    }

    /// `{m: number of closed terms of size n with statistic m}`.
    pub fn distribution(&self, spec: FamilySpec, mark: MarkSpec, n: usize) -> Result<BTreeMap<u64, Integer>> {
        mark.validate(spec)?;
        if n > self.distribution_cap {
            return Err(Error::CapExceeded { n, cap: self.distribution_cap });
        }
        let counts = self.counts(spec, n)?;
        if *counts.closed(n) == 0 {
            return Err(Error::EmptySize { n });
        }
        let counts = counts.truncated(n);
        let (rows, shift) = packed_rows(&counts, mark);
        Ok(unpack_histogram(&rows[0][n], shift))
    }
}

/// Number of closed terms of size `n`.
pub fn count_closed(spec: FamilySpec, n: usize) -> Result<Integer> {
    Census::from_env().count_closed(spec, n)
}

pub fn exact_moments(spec: FamilySpec, mark: MarkSpec, n: usize) -> Result<ExactMoments> {
    Census::from_env().exact_moments(spec, mark, n)
}

pub fn distribution(spec: FamilySpec, mark: MarkSpec, n: usize) -> Result<BTreeMap<u64, Integer>> {
    Census::from_env().distribution(spec, mark, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(u64, u64)]) -> BTreeMap<u64, Integer> {
        pairs.iter().map(|&(m, c)| (m, Integer::from(c))).collect()
    }

    #[test]
    fn examples() {
        let c = Census::new();
        assert_eq!(c.count_closed(FamilySpec::levels(1), 4).unwrap(), 1);
        assert_eq!(c.count_closed(FamilySpec::index(1), 5).unwrap(), 5);
        for spec in [FamilySpec::index(3), FamilySpec::levels(2)] {
            assert_eq!(c.count_closed(spec, 1).unwrap(), 0);
        }
        let m = c.exact_moments(FamilySpec::index(1), MarkSpec::TotalLeaves, 5).unwrap();
        assert_eq!(m.count, 5);
        assert_eq!(m.mean, Rational::from((9, 5)));
        assert_eq!(m.variance, Rational::from((4, 25)));
        let m = c.exact_moments(FamilySpec::levels(1), MarkSpec::TotalLeaves, 2).unwrap();
        assert_eq!((m.count, m.mean, m.variance), (Integer::from(1), Rational::from(1), Rational::new()));
    }

    #[test]
    fn distributions() {
        let c = Census::new();
        let d = |spec, mark, n| c.distribution(spec, mark, n).unwrap();
        assert_eq!(d(FamilySpec::index(1), MarkSpec::TotalLeaves, 5), map(&[(1, 1), (2, 4)]));
        assert_eq!(d(FamilySpec::index(1), MarkSpec::TotalLeaves, 4), map(&[(1, 1), (2, 1)]));
        assert_eq!(d(FamilySpec::levels(2), MarkSpec::LeavesAtLevel(0), 2), map(&[(0, 1)]));
        assert_eq!(d(FamilySpec::levels(2), MarkSpec::UnaryAtLevel(0), 2), map(&[(1, 1)]));
    }

    #[test]
    fn distribution_errors() {
        let c = Census::new().with_distribution_cap(20);
        assert_eq!(
            c.distribution(FamilySpec::index(1), MarkSpec::TotalLeaves, 21),
            Err(Error::CapExceeded { n: 21, cap: 20 })
        );
        assert_eq!(c.distribution(FamilySpec::levels(1), MarkSpec::None, 3), Err(Error::EmptySize { n: 3 }));
        assert!(c.exact_moments(FamilySpec::levels(1), MarkSpec::TotalLeaves, 3).is_err());
    }

    #[test]
    fn distribution_moments_agree_with_tables() {
        let c = Census::new();
        for (spec, mark) in [
            (FamilySpec::index(2), MarkSpec::TotalLeaves),
            (FamilySpec::levels(3), MarkSpec::UnaryAtLevel(1)),
            (FamilySpec::levels(4), MarkSpec::BinaryAtLevel(2)),
        ] {
            for n in [30, 77, 120] {
                let dist = c.distribution(spec, mark, n).unwrap();
                let t = c.table(spec, mark, n, MomentOrder::Second).unwrap();
                let (mut s0, mut s1, mut s2) = (Integer::new(), Integer::new(), Integer::new());
                for (m, cnt) in &dist {
                    s0 += cnt;
                    s1 += Integer::from(cnt * *m);
                    s2 += Integer::from(cnt * (m * m));
                }
                assert_eq!(&s0, t.count(0, n));
                assert_eq!(s1, t.first(0, n));
                assert_eq!(s2, t.second(0, n).unwrap());
            }
        }
    }

    #[test]
    fn tables_grow_on_demand() {
        let c = Census::new();
        let small = c.counts(FamilySpec::index(2), 10).unwrap();
        let big = c.counts(FamilySpec::index(2), 50).unwrap();
        assert_eq!(big.max_size, 50);
        assert_eq!(small.row(0), &big.row(0)[..=10]);
        let again = c.counts(FamilySpec::index(2), 20).unwrap();
        assert!(Arc::ptr_eq(&again, &big));
    }

    #[test]
    fn disk_cache_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let spec = FamilySpec::levels(3);
        let mark = MarkSpec::LeavesAtLevel(2);
        let first = Census::new().with_cache_dir(Some(dir.path().to_path_buf()));
        let m1 = first.exact_moments(spec, mark, 40).unwrap();
        assert!(file_path(dir.path(), spec, mark).exists());
        let second = Census::new().with_cache_dir(Some(dir.path().to_path_buf()));
        assert_eq!(second.exact_moments(spec, mark, 40).unwrap(), m1);
    }
}
