//! The constructive canonization: step down to unary data, clean up the
//! unary functions, repair by random choice and read off the pattern.
//!
//! Each stage takes its target size from a [`Schedule`]. A stage that falls
//! short returns a [`StageFailure`], which [`canonize`] records instead of
//! raising. A witness is only ever returned after [`crate::canonicity`]
//! has confirmed it.

mod cleanup;
mod fix;
mod stepdown;

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cleanup::{
    cleanup_h, cleanup_h_max, constant_or_injective, constant_or_injective_max, h_regime, is_constant_or_injective,
    Unary,
};
pub use fix::{check_fix, draw, effective_positions, fix_exhaustive, random_fix, random_fix_with, FixOutcome, FixViolation};
pub use stepdown::{
    step_down, verify_stepdown, StepDownInput, StepDownState, StepViolation, Table, VerifyReport, MAX_TABLE,
};

use crate::bounds::{
    failure_bound_strict, failure_prob_bound, parse_rational, schedule_18, show_rational, BoundConstants,
    ScheduleParams,
};
use crate::canonicity::{find_patterns, CanonicalWitness, Pattern};
use crate::coloring::{Coloring, FnColoring, NPlace};
use crate::combinatorics::SortedSubset;
use crate::error::{Error, Result};

/// A stage that could not reach its target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub detail: String,
}

impl StageFailure {
    pub fn new(stage: &str, detail: String) -> Self {
        StageFailure {
            stage: stage.to_string(),
            detail,
        }
    }
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.detail)
    }
}

impl From<StageFailure> for Error {
    fn from(f: StageFailure) -> Self {
        Error::Stage(f)
    }
}

/// What a ramification run must produce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// A branch with more than this many elements.
    Size(usize),
    /// The deepest branch of a tree grown to at most `cap` levels.
    Max { cap: usize },
}

impl Target {
    pub fn describe(&self) -> String {
        match self {
            Target::Size(m) => format!("more than {m}"),
            Target::Max { cap } => format!("deepest, at most {cap} levels"),
        }
    }
}

/// One line of a [`CanonizeTrace`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub input_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_instances: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl StageRecord {
    pub fn new(stage: &str, input_size: usize) -> Self {
        StageRecord {
            stage: stage.to_string(),
            input_size,
            ..StageRecord::default()
        }
    }
}

/// Where the target sizes come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// The sizes that make every stage provably succeed. Inputs below them
    /// are rejected up front.
    Paper,
    /// Fixed sizes: `ram[i]` is the target of the ramification run that
    /// produces level `i + 1`; `coi` and `cleanup` are the output sizes of
    /// the two unary cleanups.
    Custom { ram: Vec<usize>, coi: usize, cleanup: usize },
    /// Every stage keeps as much as it can.
    Opportunistic { ram_cap: usize },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Opportunistic { ram_cap: 48 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonizeConfig {
    pub schedule: Schedule,
    /// Root seed; every random stage draws from its own labelled stream.
    pub seed: u64,
    pub retry_budget: usize,
    /// Clause instances the step-down verifier may check exhaustively.
    pub verify_budget: u64,
    /// `ε` of the bounds, as `p`, `p/q` or a decimal.
    pub epsilon: String,
}

impl Default for CanonizeConfig {
    fn default() -> Self {
        CanonizeConfig {
            schedule: Schedule::default(),
            seed: 0,
            retry_budget: 64,
            verify_budget: 2_000_000,
            epsilon: "1".into(),
        }
    }
}

/// Everything a run did, enough to replay it. Contains no timings, so equal
/// runs serialize to equal bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonizeTrace {
    pub arity: usize,
    pub domain: u32,
    pub m: usize,
    /// FNV-1a of the normalized coloring values.
    pub input_checksum: String,
    pub config: CanonizeConfig,
    pub stages: Vec<StageRecord>,
    pub failure: Option<StageFailure>,
    pub witness: Option<CanonicalWitness>,
    /// The pattern read off the unary data, for comparison with `witness`.
    pub bookkeeping_pattern: Option<Pattern>,
    pub agreement: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Canonized {
    pub witness: Option<CanonicalWitness>,
    pub failure: Option<StageFailure>,
    pub trace: CanonizeTrace,
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Checksum of a coloring as stored in traces.
pub fn coloring_checksum(f: &Coloring) -> String {
    let bytes = f.values().iter().flat_map(|v| v.to_le_bytes());
    format!("{:016x}", fnv1a(bytes))
}

/// The seed of the stream labelled `label` under `root`.
pub fn stage_seed(root: u64, label: &str) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(fnv1a(label.bytes()));
    rng.next_u64()
}

/// Stage sizes resolved from a schedule.
struct Plan {
    ram: Vec<Target>,
    coi: Option<usize>,
    cleanup: Option<usize>,
}

fn plan(n: usize, m: usize, domain: u32, config: &CanonizeConfig, params: &ScheduleParams, log: &mut Vec<StageRecord>) -> std::result::Result<Plan, StageFailure> {
    match &config.schedule {
        Schedule::Opportunistic { ram_cap } => Ok(Plan {
            ram: vec![Target::Max { cap: *ram_cap }; n.saturating_sub(1)],
            coi: None,
            cleanup: None,
        }),
        Schedule::Custom { ram, coi, cleanup } => {
            if ram.len() + 1 < n {
                return Err(StageFailure::new(
                    "schedule",
                    format!("custom schedule gives {} ramification sizes, arity {n} needs {}", ram.len(), n - 1),
                ));
            }
            Ok(Plan {
                ram: ram.iter().map(|&s| Target::Size(s)).collect(),
                coi: Some(*coi),
                cleanup: Some(*cleanup),
            })
        }
        Schedule::Paper if n == 1 => {
            // pigeonhole: a unary coloring of more than (m-1)^2 points is
            // constant or one to one on m of them
            let need = (m as u64 - 1).pow(2);
            let mut rec = StageRecord::new("schedule", domain as usize);
            rec.threshold = Some(format!("N > {need}"));
            log.push(rec);
            if u64::from(domain) <= need {
                return Err(StageFailure::new("schedule", format!("N = {domain} is not above the threshold {need}")));
            }
            Ok(Plan {
                ram: Vec::new(),
                coi: Some(m),
                cleanup: Some(m),
            })
        }
        Schedule::Paper => {
            let s = schedule_18(n as u64, m as u64, params)
                .map_err(|e| StageFailure::new("schedule", e.to_string()))?;
            let top = s.level(n as u64).expect("schedule has a top level");
            let mut rec = StageRecord::new("schedule", domain as usize);
            rec.threshold = Some(format!("N >= m({n}) = {}", top.value));
            log.push(rec);
            match top.value.value().and_then(|v| u32::try_from(v).ok()) {
                Some(v) if domain >= v => {}
                _ => {
                    return Err(StageFailure::new(
                        "schedule",
                        format!("N = {domain} is below the threshold m({n}) = {}", top.value),
                    ))
                }
            }
            let [_, m1, m2, _] = s.m_small.clone().expect("built with small sizes");
            // every level is below the top one, which fits
            let as_usize = |v: &num_bigint::BigUint| usize::try_from(v).expect("below N");
            let ram = (1..n as u64)
                .map(|l| Target::Size(as_usize(s.level(l).unwrap().value.value().expect("below N"))))
                .collect();
            Ok(Plan {
                ram,
                coi: Some(as_usize(&m2) + 1),
                cleanup: Some(as_usize(&m1)),
            })
        }
    }
}

/// Runs the whole procedure on `f` for an `m`-element canonical subset.
///
/// Returns `Err` only for malformed arguments; a stage that falls short
/// is reported in `failure` with the trace up to that point.
pub fn canonize(f: &Coloring, m: usize, config: &CanonizeConfig) -> Result<Canonized> {
    let n = f.arity();
    if n == 0 || m < n {
        return Err(Error::InvalidArgument(format!("need 1 <= n <= m, got n={n}, m={m}")));
    }
    let epsilon = parse_rational(&config.epsilon)?;
    let params = ScheduleParams {
        epsilon: epsilon.clone(),
        ..ScheduleParams::default()
    };
    let mut stages = Vec::new();
    let mut bookkeeping = None;
    let res = plan(n, m, f.domain(), config, &params, &mut stages)
        .map_err(Error::from)
        .and_then(|p| run(f, m, config, &p, &epsilon, &mut stages, &mut bookkeeping));
    let (witness, failure) = match res {
        Ok(w) => (Some(w), None),
        Err(Error::Stage(s)) => (None, Some(s)),
        Err(e @ Error::BudgetExceeded { .. }) => (None, Some(StageFailure::new("budget", e.to_string()))),
        Err(e) => return Err(e),
    };
    let agreement = match (&witness, bookkeeping) {
        (Some(w), Some(b)) => Some(w.pattern == b),
        _ => None,
    };
    let trace = CanonizeTrace {
        arity: n,
        domain: f.domain(),
        m,
        input_checksum: coloring_checksum(f),
        config: config.clone(),
        stages,
        failure: failure.clone(),
        witness: witness.clone(),
        bookkeeping_pattern: bookkeeping,
        agreement,
    };
    Ok(Canonized { witness, failure, trace })
}

fn shortfall(stage: &str, got: usize, want: usize, of: usize) -> Error {
    StageFailure::new(stage, format!("kept {got} of {of} elements, needed {want}")).into()
}

fn unary_cleanup(stage: &str, a: &[u32], fs: &[Unary<'_>], gs: &[Unary<'_>], size: Option<usize>, log: &mut Vec<StageRecord>) -> Result<SortedSubset> {
    let out = match size {
        Some(0) => return Err(Error::InvalidArgument(format!("{stage}: target size must be positive"))),
        Some(s) => constant_or_injective(a, fs, gs, s - 1).ok_or_else(|| shortfall(stage, 0, s, a.len()))?,
        None => constant_or_injective_max(a, fs, gs),
    };
    log.push(StageRecord {
        output_size: Some(out.len()),
        target: size.map(|s| format!("exactly {s}")),
        ..StageRecord::new(stage, a.len())
    });
    Ok(out)
}

/// Pattern of `m` elements `set` picked from a canonical set, smallest first.
fn extract(f: &Coloring, set: SortedSubset, log: &mut Vec<StageRecord>) -> Result<CanonicalWitness> {
    let pats = find_patterns(f, &set)?;
    let Some(&pattern) = pats.first() else {
        return Err(StageFailure::new("extract", format!("no pattern fits {:?}", set.as_slice())).into());
    };
    log.push(StageRecord {
        output_size: Some(set.len()),
        detail: Some(format!("pattern {pattern}")),
        ..StageRecord::new("extract", set.len())
    });
    Ok(CanonicalWitness { subset: set, pattern })
}

fn distinct_on(set: &[u32], f: Unary<'_>) -> usize {
    let mut v: Vec<u64> = set.iter().map(|&i| f(i)).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn run(
    f: &Coloring,
    m: usize,
    config: &CanonizeConfig,
    plan: &Plan,
    epsilon: &num_rational::BigRational,
    log: &mut Vec<StageRecord>,
    bookkeeping: &mut Option<Pattern>,
) -> Result<CanonicalWitness> {
    let n = f.arity();
    let ground = SortedSubset::interval(f.domain());
    if n == 1 {
        let f0 = |i: u32| f.color(&[i]);
        let a1 = unary_cleanup("constant_or_injective", ground.as_slice(), &[&f0], &[], plan.coi, log)?;
        if a1.len() < m {
            return Err(shortfall("constant_or_injective", a1.len(), m, ground.len()));
        }
        let set = SortedSubset::new(a1.as_slice()[..m].to_vec())?;
        let inj = m > 1 && distinct_on(set.as_slice(), &f0) == m;
        *bookkeeping = Some(Pattern::from_positions(inj.then_some(1))?);
        return extract(f, set, log);
    }

    let zero = FnColoring::new(n, |_: &[u32]| 0);
    let input = StepDownInput {
        ground: ground.clone(),
        colorings: vec![f],
        values: &zero,
        value_bound: 1,
        n_top: n,
        n_star: 1,
    };
    let first = log.len();
    let result = step_down(&input, &plan.ram, log, config.verify_budget);
    // thresholds of the ramification runs, for comparison with what they got
    for rec in &mut log[first..] {
        let Some(level) = rec.stage.strip_prefix("ramification_").and_then(|l| l.parse::<usize>().ok()) else {
            continue;
        };
        let want = match plan.ram.get(level - 1) {
            Some(Target::Size(s)) => *s as u64,
            Some(Target::Max { cap }) => cap.saturating_sub(1) as u64,
            None => continue,
        };
        if let Ok(c) = BoundConstants::new(epsilon.clone(), 1, level as u64 + 1, 1, 8) {
            rec.threshold = Some(format!("|A| >= {}", c.ramification_threshold(want)));
        }
    }
    let state = result?;
    let a = state.ground.as_slice();
    let anchors = state.anchors.clone();
    let f0 = |i: u32| f.color(&[&[i][..], &anchors].concat());
    let g0 = |i: u32| u64::from(state.g_set(0, &[i]));
    let h0 = |i: u32| state.height(0, &[i]);

    let a1 = unary_cleanup("constant_or_injective", a, &[&f0], &[&g0], plan.coi, log)?;
    let a2 = match plan.cleanup {
        Some(s) => cleanup_h(a1.as_slice(), &[&h0], s).ok_or_else(|| shortfall("cleanup_h", 0, s, a1.len()))?,
        None => cleanup_h_max(a1.as_slice(), &[&h0]),
    };
    log.push(StageRecord {
        output_size: Some(a2.len()),
        target: plan.cleanup.map(|s| format!("exactly {s}")),
        ..StageRecord::new("cleanup_h", a1.len())
    });
    if a2.len() < m {
        return Err(shortfall("cleanup_h", a2.len(), m, a1.len()));
    }

    let seed = stage_seed(config.seed, "random_fix");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = failure_prob_bound(n as u64, 1, 1, m as u64, a2.len() as u64)?;
    let strict = failure_bound_strict(&bound);
    let fs: [&dyn NPlace; 1] = [f];
    let out = random_fix_with(a2.as_slice(), &state, &fs, m, &mut rng, config.retry_budget, |s| {
        SortedSubset::new(s.to_vec())
            .ok()
            .and_then(|s| find_patterns(f, &s).ok())
            .is_some_and(|p| !p.is_empty())
    })?;
    log.push(StageRecord {
        output_size: out.subset.as_ref().map(SortedSubset::len),
        target: Some(format!("exactly {m}")),
        threshold: Some(format!(
            "failure bound {} per draw ({})",
            show_rational(&bound),
            if strict { "below 1" } else { "not below 1" }
        )),
        seed: Some(seed),
        attempts: Some(out.attempts),
        ..StageRecord::new("random_fix", a2.len())
    });
    let Some(set) = out.subset else {
        return Err(StageFailure::new(
            "random_fix",
            format!("no good {m}-subset in {} draws, failure bound {}", out.attempts, show_rational(&bound)),
        )
        .into());
    };

    let s = set.as_slice();
    let mut positions = Vec::new();
    if distinct_on(s, &f0) == m {
        positions.push(1);
    }
    if h_regime(s, &h0) == Some(true) {
        positions.push(2);
    }
    let mask = state.g_set(0, &[s[0]]);
    positions.extend((0..n).filter(|p| mask & (1 << p) != 0).map(|p| p + 1));
    *bookkeeping = Pattern::from_positions(positions).ok();
    extract(f, set, log)
}
