//! Ground truth independent of every closed form: a forward dynamic program
//! over the run-counting automaton, exhaustive enumeration for short
//! sequences, and seeded simulation.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;

use crate::error::{Error, Result};
use crate::model::{IndexScheme, PmfTable, RunParams, VariantSpec};
use crate::scalar::Scalar;

/// Largest `n_max` accepted by [`brute_force_pmf`].
pub const BRUTE_FORCE_MAX: i64 = 22;

/// How successes are grouped into runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountingSemantics {
    /// Type I: counting restarts as soon as a run of length `k` is complete.
    NonOverlapping,
    /// Type II: runs of length at least `k`, separated by at least one failure.
    AtLeastOneFailureBetween,
    /// Consecutive runs may share the last `ell` trials (`1 <= ell <= k - 1`).
    Overlap(u32),
    /// The `g` trials following each completed run are ignored.
    Gap(u32),
}

impl CountingSemantics {
    pub fn from_variant(variant: &VariantSpec, k: u32) -> Result<Self> {
        variant.validate(k)?;
        let semantics = if variant.type2 {
            CountingSemantics::AtLeastOneFailureBetween
        } else if variant.overlap > 0 {
            CountingSemantics::Overlap(variant.overlap as u32)
        } else if variant.overlap < 0 {
            CountingSemantics::Gap((-variant.overlap) as u32)
        } else {
            CountingSemantics::NonOverlapping
        };
        semantics.validate(k)?;
        Ok(semantics)
    }

    pub fn to_variant(self) -> VariantSpec {
        match self {
            CountingSemantics::NonOverlapping => VariantSpec::type1(),
            CountingSemantics::AtLeastOneFailureBetween => VariantSpec::type2(),
            CountingSemantics::Overlap(ell) => VariantSpec::overlap(ell),
            CountingSemantics::Gap(g) => VariantSpec::gap(g),
        }
    }

    pub fn validate(self, k: u32) -> Result<()> {
        match self {
            CountingSemantics::Overlap(ell) if ell == 0 || ell >= k => Err(Error::invalid(
                "overlap",
                format!("{ell} is not in 1..={}", k.saturating_sub(1)),
            )),
            CountingSemantics::Gap(0) => Err(Error::invalid("gap", "must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Number of trials a new run may share with the previous one; negative
    /// for a gap.
    fn overlap(self) -> i64 {
        match self {
            CountingSemantics::Overlap(ell) => ell as i64,
            CountingSemantics::Gap(g) => -(g as i64),
            _ => 0,
        }
    }
}

impl fmt::Display for CountingSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_variant().fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    /// Length of the current success streak that still counts.
    Progress(u32),
    /// Type II only: inside a run already credited, waiting for a failure.
    Blocked,
    /// Trials left to ignore.
    Cooldown(u32),
}

struct Automaton {
    k: u32,
    semantics: CountingSemantics,
}

impl Automaton {
    fn states(&self) -> Vec<State> {
        let mut states: Vec<State> = (0..self.k).map(State::Progress).collect();
        match self.semantics {
            CountingSemantics::AtLeastOneFailureBetween => states.push(State::Blocked),
            CountingSemantics::Gap(g) => states.extend((1..=g).map(State::Cooldown)),
            _ => {}
        }
        states
    }

    fn index(&self, state: State) -> usize {
        match state {
            State::Progress(j) => j as usize,
            State::Blocked => self.k as usize,
            State::Cooldown(c) => self.k as usize + c as usize - 1,
        }
    }

    /// Next state and whether a run was credited at this trial.
    fn step(&self, state: State, success: bool) -> (State, bool) {
        match state {
            State::Progress(j) if success && j + 1 == self.k => {
                let next = match self.semantics {
                    CountingSemantics::NonOverlapping => State::Progress(0),
                    CountingSemantics::Overlap(ell) => State::Progress(ell),
                    CountingSemantics::AtLeastOneFailureBetween => State::Blocked,
                    CountingSemantics::Gap(g) => State::Cooldown(g),
                };
                (next, true)
            }
            State::Progress(j) if success => (State::Progress(j + 1), false),
            State::Progress(_) => (State::Progress(0), false),
            State::Blocked if success => (State::Blocked, false),
            State::Blocked => (State::Progress(0), false),
            State::Cooldown(1) => (State::Progress(0), false),
            State::Cooldown(c) => (State::Cooldown(c - 1), false),
        }
    }
}

/// Waiting-time pmf from the dynamic program, with the mass not yet absorbed.
#[derive(Debug, Clone)]
pub struct DpResult<S> {
    /// Full indexing, `n_min = 0`.
    pub table: PmfTable<S>,
    /// `P(N > n_max)`.
    pub deficit: S,
}

/// Exact law of the trial at which the `r`-th run completes, for `n <= n_max`.
pub fn dp_waiting_time_pmf<S: Scalar>(
    params: &RunParams<S>,
    semantics: CountingSemantics,
    n_max: i64,
) -> Result<DpResult<S>> {
    semantics.validate(params.k())?;
    if n_max < 0 {
        return Err(Error::invalid("n_max", "must be nonnegative"));
    }
    let machine = Automaton {
        k: params.k(),
        semantics,
    };
    let states = machine.states();
    let r = params.r() as usize;
    let (p, q) = (params.p().clone(), params.q().clone());
    let moves: Vec<[(usize, bool); 2]> = states
        .iter()
        .map(|&s| {
            let (a, ca) = machine.step(s, true);
            let (b, cb) = machine.step(s, false);
            [(machine.index(a), ca), (machine.index(b), cb)]
        })
        .collect();

    // mass[runs completed][state]
    let mut mass = vec![vec![S::zero(); states.len()]; r];
    mass[0][0] = S::one();
    let mut values = vec![S::zero(); n_max as usize + 1];
    for value in values.iter_mut().skip(1) {
        let mut next = vec![vec![S::zero(); states.len()]; r];
        let mut absorbed = S::zero();
        for (runs, row) in mass.iter().enumerate() {
            for (from, m) in row.iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                for ((to, credited), weight) in moves[from].iter().zip([&p, &q]) {
                    let w = m.clone() * weight.clone();
                    if !credited {
                        next[runs][*to] = next[runs][*to].clone() + w;
                    } else if runs + 1 == r {
                        absorbed = absorbed + w;
                    } else {
                        next[runs + 1][*to] = next[runs + 1][*to].clone() + w;
                    }
                }
            }
        }
        *value = absorbed;
        mass = next;
    }
    let deficit = S::sum_terms(mass.into_iter().flatten());
    Ok(DpResult {
        table: PmfTable {
            params: params.clone(),
            scheme: IndexScheme::Full,
            variant: semantics.to_variant(),
            n_min: 0,
            values,
        },
        deficit,
    })
}

/// Trial (1-based) at which the `r`-th run completes in the first `len`
/// trials of `seq` (bit `i` set means trial `i + 1` is a success).
///
/// Works directly on windows of the sequence rather than on a state machine.
fn scan_waiting_time(seq: u32, len: u32, k: u32, r: u32, semantics: CountingSemantics) -> Option<u32> {
    let success = |t: i64| t >= 1 && seq >> (t - 1) & 1 == 1;
    let all_success = |from: i64, to: i64| (from..=to).all(success);
    let (k, len) = (k as i64, len as i64);
    let mut found = 0;
    let mut prev_end: Option<i64> = None;
    for end in k..=len {
        let start = end - k + 1;
        let credited = match semantics {
            CountingSemantics::AtLeastOneFailureBetween => {
                // exactly k successes so far in this maximal streak
                all_success(start, end) && !success(start - 1)
            }
            _ => {
                let earliest = prev_end.map_or(1, |e| e + 1 - semantics.overlap());
                start >= earliest && all_success(start, end)
            }
        };
        if credited {
            found += 1;
            prev_end = Some(end);
            if found == r {
                return Some(end as u32);
            }
        }
    }
    None
}

fn weighted_counts<S: Scalar>(params: &RunParams<S>, counts: &BTreeMap<(i64, u32), Integer>, len_of: impl Fn(i64) -> u32) -> BTreeMap<i64, S> {
    let mut out: BTreeMap<i64, S> = BTreeMap::new();
    for (&(key, s), c) in counts {
        let len = len_of(key);
        let term = S::from_integer(c) * params.p().powu(s) * params.q().powu(len - s);
        let slot = out.entry(key).or_insert_with(S::zero);
        *slot = slot.clone() + term;
    }
    out
}

/// Number of sequences of each waiting time and success count, found by
/// enumerating all `2^n_max` sequences. Independent of `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCounts {
    pub k: u32,
    pub r: u32,
    pub semantics: CountingSemantics,
    pub n_max: i64,
    /// `(waiting time t, successes among the first t trials)` to the number
    /// of length-`t` prefixes.
    pub counts: BTreeMap<(i64, u32), Integer>,
}

impl PatternCounts {
    pub fn enumerate(k: u32, r: u32, semantics: CountingSemantics, n_max: i64) -> Result<Self> {
        semantics.validate(k)?;
        if !(0..=BRUTE_FORCE_MAX).contains(&n_max) {
            return Err(Error::invalid("n_max", format!("must be in 0..={BRUTE_FORCE_MAX}")));
        }
        let len = n_max as u32;
        let mut counts: BTreeMap<(i64, u32), Integer> = BTreeMap::new();
        for seq in 0..(1u32 << len) {
            if let Some(t) = scan_waiting_time(seq, len, k, r, semantics) {
                let prefix = seq & ((1u32 << t) - 1);
                *counts.entry((t as i64, prefix.count_ones())).or_default() += 1;
            }
        }
        // each prefix of length t was counted once per completion of the tail
        for ((t, _), c) in counts.iter_mut() {
            *c >>= len - *t as u32;
        }
        Ok(Self {
            k,
            r,
            semantics,
            n_max,
            counts,
        })
    }

    /// Weights the patterns by `p^#S q^#F`. `params` must carry the same `k`
    /// and `r`.
    pub fn pmf<S: Scalar>(&self, params: &RunParams<S>) -> Result<PmfTable<S>> {
        if (params.k(), params.r()) != (self.k, self.r) {
            return Err(Error::invalid("params", "k and r differ from the enumeration"));
        }
        let by_time = weighted_counts(params, &self.counts, |t| t as u32);
        Ok(PmfTable {
            params: params.clone(),
            scheme: IndexScheme::Full,
            variant: self.semantics.to_variant(),
            n_min: 0,
            values: (0..=self.n_max).map(|n| by_time.get(&n).cloned().unwrap_or_else(S::zero)).collect(),
        })
    }
}

/// Waiting-time pmf by enumerating all `2^n_max` sequences. Full indexing,
/// `n_min = 0`.
pub fn brute_force_pmf<S: Scalar>(
    params: &RunParams<S>,
    semantics: CountingSemantics,
    n_max: i64,
) -> Result<PmfTable<S>> {
    PatternCounts::enumerate(params.k(), params.r(), semantics, n_max)?.pmf(params)
}

/// Law of the number of maximal success runs of length at least `k` in `n`
/// trials, by enumeration; entry `c` is the probability of exactly `c` runs.
pub fn brute_force_run_counts<S: Scalar>(params: &RunParams<S>, n: i64) -> Result<Vec<S>> {
    if !(1..=BRUTE_FORCE_MAX).contains(&n) {
        return Err(Error::invalid("n", format!("must be in 1..={BRUTE_FORCE_MAX}")));
    }
    let (len, k) = (n as u32, params.k());
    let mut counts: BTreeMap<(i64, u32), Integer> = BTreeMap::new();
    for seq in 0..(1u32 << len) {
        let mut runs = 0;
        let mut streak = 0;
        for t in 0..len {
            if seq >> t & 1 == 1 {
                streak += 1;
            } else {
                runs += (streak >= k) as i64;
                streak = 0;
            }
        }
        runs += (streak >= k) as i64;
        *counts.entry((runs, seq.count_ones())).or_default() += 1;
    }
    let by_runs = weighted_counts(params, &counts, |_| len);
    Ok((0..=n).map(|c| by_runs.get(&c).cloned().unwrap_or_else(S::zero)).collect())
}

/// Summary of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    /// Standard error of the mean.
    pub standard_error: f64,
    /// Waiting time (Full indexing) to number of samples.
    pub histogram: BTreeMap<u64, u64>,
}

/// Number of independent streams a simulation is split into. Fixed so that
/// results depend only on the seed, not on the machine.
pub const MONTE_CARLO_SHARDS: u64 = 8;

/// Simulates waiting times for the `r`-th run.
///
/// Each shard draws from ChaCha8 seeded with `seed` on its own stream
/// (`set_stream(shard)`), and uniforms are compared against `p`. Shards run
/// on separate threads and are merged in order.
pub fn monte_carlo(
    params: &RunParams<f64>,
    semantics: CountingSemantics,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    semantics.validate(params.k())?;
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let machine = Automaton {
        k: params.k(),
        semantics,
    };
    let (p, r) = (*params.p(), params.r());
    let shard_sizes: Vec<u64> = (0..MONTE_CARLO_SHARDS)
        .map(|i| samples / MONTE_CARLO_SHARDS + u64::from(i < samples % MONTE_CARLO_SHARDS))
        .collect();
    let histograms: Vec<BTreeMap<u64, u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = shard_sizes
            .iter()
            .enumerate()
            .map(|(shard, &size)| {
                let machine = &machine;
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(shard as u64);
                    let mut hist = BTreeMap::new();
                    for _ in 0..size {
                        let mut state = State::Progress(0);
                        let (mut runs, mut t) = (0, 0u64);
                        while runs < r {
                            t += 1;
                            let (next, credited) = machine.step(state, rng.gen::<f64>() < p);
                            state = next;
                            runs += credited as u32;
                        }
                        *hist.entry(t).or_insert(0u64) += 1;
                    }
                    hist
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread")).collect()
    });
    let mut histogram = BTreeMap::new();
    for hist in histograms {
        for (t, c) in hist {
            *histogram.entry(t).or_insert(0) += c;
        }
    }
    let n = samples as f64;
    let mean = histogram.iter().map(|(&t, &c)| t as f64 * c as f64).sum::<f64>() / n;
    let central = |e: i32| histogram.iter().map(|(&t, &c)| (t as f64 - mean).powi(e) * c as f64).sum::<f64>() / n;
    let (m2, m3) = (central(2), central(3));
    let variance = if samples > 1 { m2 * n / (n - 1.0) } else { 0.0 };
    Ok(MonteCarloReport {
        samples,
        seed,
        mean,
        variance,
        skewness: if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 },
        standard_error: (variance / n).sqrt(),
        histogram,
    })
}
