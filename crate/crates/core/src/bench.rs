//! Wall-clock scaling of `F` in the tree size, and the cost of incremental
//! single-bit re-evaluation.
//!
//! Times are machine dependent and only reported. The recompute counts are
//! exact and checked against the leaf depths.

use std::time::{Duration, Instant};

use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::kihprf::{EvalCache, PrfInstance};
use crate::params::Params;
use crate::report::Report;
use crate::symbols::BitString;

/// Default tree sizes.
pub const DEFAULT_SIZES: [usize; 4] = [2, 4, 8, 16];

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub leaves: usize,
    pub tree: String,
    /// Mean time of one fresh, uncached evaluation.
    pub eval: Duration,
    /// Mean time of one incremental re-evaluation after a single flip.
    pub incremental: Duration,
    /// `(flipped position, recomputed nodes, depth of that leaf)`.
    pub recomputes: Vec<(usize, usize, usize)>,
}

impl BenchRow {
    pub fn recompute_matches_depth(&self) -> bool {
        self.recomputes.iter().all(|&(_, got, depth)| got == depth)
    }
}

fn nanos(d: Duration) -> u128 {
    d.as_nanos()
}

/// Times `reps` fresh evaluations and one incremental flip per input
/// position for each balanced tree with `sizes[i]` leaves.
pub fn run_bench(base: &Params, sizes: &[usize], reps: usize, entropy: &Entropy) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::Usage("bench needs at least one tree size".into()));
    }
    if reps == 0 {
        return Err(Error::Usage("bench needs at least one repetition".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &t in sizes {
        let tree = format!("balanced:{t}");
        let params = base.with_tree(&tree)?;
        let inst = PrfInstance::sample(&params, &mut entropy.stream(&format!("bench/{t}")))?;
        let mut rng = entropy.stream(&format!("bench/{t}/inputs"));
        let seed = inst.keygen(&mut rng);
        let inputs: Vec<BitString> = (0..reps).map(|_| BitString::random(2 * t, &mut rng)).collect();

        let start = Instant::now();
        for y in &inputs {
            inst.prf_eval(&seed, y)?;
        }
        let eval = start.elapsed() / reps as u32;

        let depths = inst.tree().leaf_depths();
        let mut cache = EvalCache::new();
        let mut cur = inputs[0].clone();
        inst.prf_eval_cached(&seed, &cur, &mut cache)?;
        let mut recomputes = Vec::with_capacity(2 * t);
        let mut spent = Duration::ZERO;
        for pos in 0..2 * t {
            cur = cur.flipped(pos);
            let start = Instant::now();
            inst.eval_incremental(&seed, &cur, pos, &mut cache)?;
            spent += start.elapsed();
            recomputes.push((pos, cache.stats().last_recomputed, depths[pos % t]));
        }
        rows.push(BenchRow {
            leaves: t,
            tree,
            eval,
            incremental: spent / (2 * t) as u32,
            recomputes,
        });
    }
    Ok(rows)
}

pub fn bench_report(base: &Params, rows: &[BenchRow]) -> Report {
    let mut r = Report::new();
    r.set("params.n", base.n());
    r.set("params.q", base.q());
    r.set("params.p", base.p());
    for (i, row) in rows.iter().enumerate() {
        let k = format!("size.{:04}", row.leaves);
        r.set(format!("{k}.tree"), &row.tree);
        r.set(format!("{k}.eval_ns"), nanos(row.eval));
        r.set(format!("{k}.incremental_ns"), nanos(row.incremental));
        r.set(
            format!("{k}.incremental_speedup"),
            format!("{:.3}", row.eval.as_secs_f64() / row.incremental.as_secs_f64().max(1e-12)),
        );
        r.set(
            format!("{k}.max_recomputed_nodes"),
            row.recomputes.iter().map(|x| x.1).max().unwrap_or(0),
        );
        r.set(format!("{k}.recompute_matches_depth"), row.recompute_matches_depth());
        if i > 0 {
            let prev = &rows[i - 1];
            r.set(
                format!("{k}.time_ratio_to_previous"),
                format!("{:.3}", row.eval.as_secs_f64() / prev.eval.as_secs_f64().max(1e-12)),
            );
            r.set(
                format!("{k}.linear_ratio_to_previous"),
                format!("{:.3}", row.leaves as f64 / prev.leaves as f64),
            );
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn empty_size_list_is_a_usage_error() {
        let e = Entropy::from_hex("01").unwrap();
        let p = Params::preset(Preset::Toy);
        assert!(matches!(run_bench(&p, &[], 1, &e), Err(Error::Usage(_))));
        assert!(matches!(run_bench(&p, &[2], 0, &e), Err(Error::Usage(_))));
    }

    #[test]
    fn recompute_counts_are_exact() {
        let e = Entropy::from_hex("02").unwrap();
        let p = Params::preset(Preset::Toy);
        let rows = run_bench(&p, &[2, 8], 2, &e).unwrap();
        for row in &rows {
            assert!(row.recompute_matches_depth());
            assert_eq!(row.recomputes.len(), 2 * row.leaves);
        }
        assert_eq!(rows[1].recomputes[0].1, 3);
        let r = bench_report(&p, &rows);
        assert_eq!(r.get("size.0008.linear_ratio_to_previous"), Some("4.000"));
    }
}
