//! Measurement of the key/input homomorphism defect over random trials.

use crate::entropy::Entropy;
use crate::error::Result;
use crate::params::Params;
use crate::report::{histogram, map_trials, ratio, Report};
use crate::symbols::{BitString, SymbolString};

use super::instance::{keygen, PrfInstance, Seed};
use super::prf::{combined_symbols, homomorphism_defect, selectors_agree};

/// One measured tuple `(S1, S2, x, y)` with `x_lh = y_lh`.
#[derive(Clone, Debug)]
pub struct DefectTrial {
    pub index: u64,
    pub s1: Seed,
    pub s2: Seed,
    pub x: BitString,
    pub y: BitString,
    pub z1: SymbolString,
    pub selectors_agree: bool,
    pub defect: u64,
}

/// Draws the tuple for trial `index`; identical for any thread layout.
pub fn sample_defect_tuple(inst: &PrfInstance, entropy: &Entropy, index: u64) -> (Seed, Seed, BitString, BitString) {
    let mut rng = entropy.trial("defect", index);
    let t = inst.leaves();
    let s1 = keygen(inst.params(), &mut rng);
    let s2 = keygen(inst.params(), &mut rng);
    let left = BitString::random(t, &mut rng);
    let x = left.concat(&BitString::random(t, &mut rng));
    let y = left.concat(&BitString::random(t, &mut rng));
    (s1, s2, x, y)
}

pub fn defect_trials(inst: &PrfInstance, entropy: &Entropy, trials: usize, jobs: usize) -> Result<Vec<DefectTrial>> {
    map_trials(jobs, trials, |index| {
        let (s1, s2, x, y) = sample_defect_tuple(inst, entropy, index);
        let defect = homomorphism_defect(inst, &s1, &s2, &x, &y)?;
        Ok(DefectTrial {
            index,
            z1: combined_symbols(&x, &y)?,
            selectors_agree: selectors_agree(&x, &y),
            s1,
            s2,
            x,
            y,
            defect,
        })
    })
}

/// Distribution of defects, overall and split by whether the root
/// selectors of the two right halves agree. The claimed bound `‖E‖ ≤ 1`
/// is reported as a fraction, never enforced.
pub fn defect_report(trials: &[DefectTrial]) -> Report {
    let mut r = Report::new();
    summarize(&mut r, "all", trials.iter());
    summarize(&mut r, "selectors_agree", trials.iter().filter(|t| t.selectors_agree));
    summarize(&mut r, "selectors_differ", trials.iter().filter(|t| !t.selectors_agree));
    r
}

fn summarize<'a>(r: &mut Report, prefix: &str, trials: impl Iterator<Item = &'a DefectTrial>) {
    let values: Vec<u64> = trials.map(|t| t.defect).collect();
    let within = values.iter().filter(|&&v| v <= 1).count();
    r.set(format!("{prefix}.trials"), values.len());
    r.set(format!("{prefix}.within_bound_1"), within);
    r.set(format!("{prefix}.fraction_within_bound_1"), ratio(within, values.len()));
    r.set(
        format!("{prefix}.max_defect"),
        values.iter().max().map_or("none".into(), |v| v.to_string()),
    );
    histogram(r, &format!("{prefix}.hist"), values);
}

/// Samples one instance per tree shape and reports the defect
/// distribution for each.
pub fn defect_harness(
    base: &Params,
    shapes: &[&str],
    trials: usize,
    entropy: &Entropy,
    jobs: usize,
) -> Result<Report> {
    let mut report = Report::new();
    report.set("params.n", base.n());
    report.set("params.q", base.q());
    report.set("params.p", base.p());
    report.set("trials_per_shape", trials);
    for shape in shapes {
        let params = base.with_tree(shape)?;
        let inst = PrfInstance::sample(&params, &mut entropy.stream(&format!("instance/{shape}")))?;
        let results = defect_trials(&inst, &entropy.child(&format!("trials/{shape}")), trials, jobs)?;
        let mut sub = defect_report(&results);
        sub.set("instance", inst.id_hex());
        report.merge(&format!("shape.{shape}"), &sub);
    }
    Ok(report)
}
