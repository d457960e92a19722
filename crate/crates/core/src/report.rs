//! Plain-text reports: one `key: value` line per entry, keys sorted.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: BTreeMap<String, String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.entries.insert(key.into(), value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Copies every entry of `other` under `prefix.`.
    pub fn merge(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.insert(format!("{prefix}.{k}"), v.clone());
        }
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

/// Histogram of small non-negative values, rendered with fixed-width keys.
pub(crate) fn histogram(report: &mut Report, prefix: &str, values: impl IntoIterator<Item = u64>) {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    for (v, c) in counts {
        report.set(format!("{prefix}.{v:020}"), c);
    }
}

/// Ratio rendered with six decimals so reports stay byte-stable.
pub(crate) fn ratio(num: usize, den: usize) -> String {
    if den == 0 {
        "nan".into()
    } else {
        format!("{:.6}", num as f64 / den as f64)
    }
}

/// Runs `f(0..count)` on `jobs` worker threads (0 = rayon default) and
/// returns results in index order.
pub fn map_trials<T, F>(jobs: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if jobs == 1 {
        return (0..count as u64).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(|| (0..count as u64).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_sorted() {
        let mut r = Report::new();
        r.set("zeta", 1).set("alpha", "x");
        let mut inner = Report::new();
        inner.set("k", 2);
        r.merge("mid", &inner);
        assert_eq!(r.to_string(), "alpha: x\nmid.k: 2\nzeta: 1\n");
    }

    #[test]
    fn parallel_matches_serial() {
        let serial = map_trials(1, 50, |i| Ok(i * i)).unwrap();
        let par = map_trials(4, 50, |i| Ok(i * i)).unwrap();
        assert_eq!(serial, par);
        let err = map_trials(2, 5, |i| if i == 3 { Err(Error::Precondition("x".into())) } else { Ok(i) });
        assert!(err.is_err());
    }

    #[test]
    fn histogram_keys_sort_numerically() {
        let mut r = Report::new();
        histogram(&mut r, "h", [10, 2, 2, 0]);
        let keys: Vec<_> = r.iter().map(|(k, v)| format!("{k}={v}")).collect();
        assert_eq!(keys.len(), 3);
        assert!(keys[0].ends_with("0000=1"));
        assert!(keys[1].ends_with("0002=2"));
        assert!(keys[2].ends_with("0010=1"));
    }
}
