//! Monte Carlo engine: exact sampling from kernel atoms, passage times with
//! censoring, recurrence diagnostics and tail-exponent estimates.
//!
//! Trajectory `k` of a batch draws from ChaCha8 stream `k` of the master seed,
//! so results do not depend on how rayon schedules the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Kernel, State};

pub const DEFAULT_CAP: u64 = 1_000_000;
pub const MIN_UNCENSORED: usize = 1000;
pub const DEFAULT_WINDOW: (f64, f64) = (0.5, 0.99);

const FREE_RUN_STREAM: u64 = 1 << 63;

/// Generator for trajectory `index` of a batch seeded with `master`.
pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Runs `f` on a dedicated pool with `threads` workers (0 = rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub seed: u64,
    pub steps: u64,
}

/// `horizon` steps from `start`; bit-reproducible in `(model, start, horizon, seed)`.
pub fn simulate<K: Kernel + ?Sized>(
    model: &K,
    start: State,
    horizon: u64,
    seed: u64,
) -> Result<Trajectory> {
    model.check_state(start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = Vec::new();
    let mut states = Vec::with_capacity(horizon as usize + 1);
    states.push(start);
    let mut state = start;
    for _ in 0..horizon {
        state = model.step(state, rng.random::<f64>(), &mut scratch)?;
        states.push(state);
    }
    Ok(Trajectory {
        states,
        seed,
        steps: horizon,
    })
}

/// One draw of `tau = min{n >= 0 : X_n <= level}`, cut at `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageSample {
    /// `None` when censored.
    pub tau: Option<u64>,
    pub cap: u64,
    /// Transitions simulated: `tau`, or `cap` when censored.
    pub steps: u64,
    pub start: State,
    pub level: f64,
}

impl PassageSample {
    pub fn censored(&self) -> bool {
        self.tau.is_none()
    }

    /// `min(tau, cap)`
    pub fn truncated(&self) -> u64 {
        self.tau.unwrap_or(self.cap)
    }
}

fn passage<K: Kernel + ?Sized>(
    model: &K,
    start: State,
    level: f64,
    cap: u64,
    rng: &mut ChaCha8Rng,
    mut path: Option<&mut Vec<State>>,
) -> Result<PassageSample> {
    let mut scratch = Vec::new();
    let mut state = start;
    if let Some(p) = path.as_deref_mut() {
        p.push(state);
    }
    let mut tau = None;
    if state.position <= level {
        tau = Some(0);
    } else {
        for t in 1..=cap {
            state = model.step(state, rng.random::<f64>(), &mut scratch)?;
            if let Some(p) = path.as_deref_mut() {
                p.push(state);
            }
            if state.position <= level {
                tau = Some(t);
                break;
            }
        }
    }
    Ok(PassageSample {
        tau,
        cap,
        steps: tau.unwrap_or(cap),
        start,
        level,
    })
}

/// `n` independent passage times; sample `k` uses [`stream_rng`]`(master_seed, k)`.
pub fn sample_passage_times<K: Kernel + ?Sized>(
    model: &K,
    start: State,
    level: f64,
    cap: u64,
    n: usize,
    master_seed: u64,
) -> Result<Vec<PassageSample>> {
    model.check_state(start)?;
    if cap == 0 {
        return Err(Error::Invalid("cap must be >= 1".into()));
    }
    (0..n as u64)
        .into_par_iter()
        .map(|k| {
            passage(
                model,
                start,
                level,
                cap,
                &mut stream_rng(master_seed, k),
                None,
            )
        })
        .collect()
}

/// Sample `index` of [`sample_passage_times`] together with its path, for
/// checking the stopping rule.
pub fn passage_with_path<K: Kernel + ?Sized>(
    model: &K,
    start: State,
    level: f64,
    cap: u64,
    master_seed: u64,
    index: u64,
) -> Result<(PassageSample, Vec<State>)> {
    model.check_state(start)?;
    let mut path = Vec::new();
    let s = passage(
        model,
        start,
        level,
        cap,
        &mut stream_rng(master_seed, index),
        Some(&mut path),
    )?;
    Ok((s, path))
}

pub fn censored_fraction(samples: &[PassageSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| s.censored()).count() as f64 / samples.len() as f64
}

/// Mean of `min(tau, cap)^s`; the flag is set when any draw was censored, in
/// which case the estimate only bounds `E[tau^s]` from below.
pub fn empirical_moment(samples: &[PassageSample], s: f64) -> (f64, bool) {
    if samples.is_empty() {
        return (f64::NAN, false);
    }
    let total: f64 = samples.iter().map(|p| (p.truncated() as f64).powf(s)).sum();
    (
        total / samples.len() as f64,
        samples.iter().any(|p| p.censored()),
    )
}

/// [`empirical_moment`] as if the draws had been cut at `cap`, which must not
/// exceed the cap they were simulated with.
pub fn empirical_moment_at_cap(samples: &[PassageSample], s: f64, cap: u64) -> Result<(f64, bool)> {
    if samples.iter().any(|p| p.cap < cap) {
        return Err(Error::Invalid(format!(
            "cannot extend samples beyond their cap to {cap}"
        )));
    }
    let cut: Vec<PassageSample> = samples
        .iter()
        .map(|p| {
            let tau = p.tau.filter(|&t| t <= cap);
            PassageSample {
                tau,
                cap,
                steps: tau.unwrap_or(cap),
                ..*p
            }
        })
        .collect();
    Ok(empirical_moment(&cut, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    SurvivalRegression,
    Hill,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub exponent: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub censored_fraction: f64,
    pub method: TailMethod,
    /// Range of `t` the fit used.
    pub window: (f64, f64),
    /// Exponents from the lower and upper halves of the window (log scale).
    pub half_exponents: (f64, f64),
    /// Set when the halves disagree by more than a factor 1.5: the survival
    /// curve bends on the log-log scale, as for light tails.
    pub non_power_law: bool,
    /// Censored Hill estimate over the top decile, as a cross-check.
    pub hill: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailOptions {
    /// Quantiles of `tau` bounding the fit, defaults to `(0.5, 0.99)`.
    pub window: (f64, f64),
    /// Log-spaced evaluation points inside the window.
    pub points: usize,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            points: 40,
        }
    }
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if xs.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, intercept, stderr)
}

/// Power-law exponent of `P(tau > t)`: least squares of `log S(t)` on `log t`
/// between the window quantiles.
///
/// Censoring here happens only at the common cap, so the Kaplan–Meier curve
/// is the empirical survival with censored draws counted as `> t` for every
/// `t < cap`. When more than `1 - window.1` of the mass is censored the window
/// stops at the largest observed passage time. The reported stderr treats the
/// evaluation points as independent and is optimistic.
pub fn tail_exponent(samples: &[PassageSample]) -> Result<TailEstimate> {
    tail_exponent_with(samples, TailOptions::default())
}

pub fn tail_exponent_with(samples: &[PassageSample], opts: TailOptions) -> Result<TailEstimate> {
    let mut taus: Vec<u64> = samples.iter().filter_map(|s| s.tau).collect();
    if taus.len() < MIN_UNCENSORED {
        return Err(Error::TooFewSamples {
            found: taus.len(),
            required: MIN_UNCENSORED,
        });
    }
    let (q_lo, q_hi) = opts.window;
    if !(0.0 <= q_lo && q_lo < q_hi && q_hi < 1.0) || opts.points < 4 {
        return Err(Error::Invalid(format!("bad tail window {:?}", opts.window)));
    }
    taus.sort_unstable();
    let n = samples.len() as f64;
    // S(t) = #{tau > t} / n
    let survival = |t: f64| {
        let at_most = taus.partition_point(|&x| (x as f64) <= t);
        (samples.len() - at_most) as f64 / n
    };
    // smallest observed t with S(t) <= 1 - q
    let quantile = |q: f64| {
        let need = ((q * n).ceil() as usize).max(1);
        taus.get(need - 1).map(|&t| t as f64)
    };
    let t_lo = quantile(q_lo)
        .ok_or_else(|| Error::Invalid("lower quantile is censored".into()))?
        .max(1.0);
    let t_hi = quantile(q_hi).unwrap_or(*taus.last().expect("non-empty") as f64);
    if t_hi <= t_lo * 1.5 {
        return Err(Error::Invalid(format!(
            "tail window [{t_lo}, {t_hi}] is too narrow"
        )));
    }
    let (llo, lhi) = (t_lo.ln(), t_hi.ln());
    let mut xs = Vec::with_capacity(opts.points);
    let mut ys = Vec::with_capacity(opts.points);
    for k in 0..opts.points {
        let lt = llo + (lhi - llo) * k as f64 / (opts.points - 1) as f64;
        let s = survival(lt.exp());
        if s > 0.0 {
            xs.push(lt);
            ys.push(s.ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::Invalid(
            "survival curve vanishes inside the window".into(),
        ));
    }
    let (slope, _, stderr) = ols(&xs, &ys);
    let half = xs.len() / 2;
    let (lower, _, _) = ols(&xs[..half], &ys[..half]);
    let (upper, _, _) = ols(&xs[half..], &ys[half..]);
    let (lower, upper) = (-lower, -upper);
    let bend = upper / lower;
    Ok(TailEstimate {
        exponent: -slope,
        stderr,
        n_samples: samples.len(),
        censored_fraction: censored_fraction(samples),
        method: TailMethod::SurvivalRegression,
        window: (t_lo, t_hi),
        half_exponents: (lower, upper),
        non_power_law: !(bend.is_finite() && bend > 0.0 && (1.0 / 1.5..=1.5).contains(&bend)),
        hill: hill_estimate(samples, samples.len() / 10)
            .ok()
            .map(|h| h.exponent),
    })
}

/// Hill estimator adjusted for right censoring: the number of uncensored
/// draws among the top `k` over `sum_{i <= k} log(Z_(i) / Z_(k+1))`.
pub fn hill_estimate(samples: &[PassageSample], k: usize) -> Result<TailEstimate> {
    let uncensored = samples.iter().filter(|s| !s.censored()).count();
    if uncensored < MIN_UNCENSORED {
        return Err(Error::TooFewSamples {
            found: uncensored,
            required: MIN_UNCENSORED,
        });
    }
    if k == 0 || k >= samples.len() {
        return Err(Error::Invalid(format!("Hill needs 0 < k < n, got k = {k}")));
    }
    let mut z: Vec<(f64, bool)> = samples
        .iter()
        .map(|s| (s.truncated() as f64, s.censored()))
        .collect();
    z.sort_by(|a, b| b.0.total_cmp(&a.0));
    let threshold = z[k].0;
    if threshold <= 0.0 {
        return Err(Error::Invalid("Hill threshold is zero".into()));
    }
    let log_sum: f64 = z[..k].iter().map(|(v, _)| (v / threshold).ln()).sum();
    let hits = z[..k].iter().filter(|(_, c)| !c).count() as f64;
    if log_sum <= 0.0 {
        return Err(Error::Invalid("Hill log-excess sum is zero".into()));
    }
    let alpha = hits / log_sum;
    Ok(TailEstimate {
        exponent: alpha,
        stderr: alpha / hits.max(1.0).sqrt(),
        n_samples: samples.len(),
        censored_fraction: censored_fraction(samples),
        method: TailMethod::Hill,
        window: (threshold, z[0].0),
        half_exponents: (f64::NAN, f64::NAN),
        non_power_law: false,
        hill: Some(alpha),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticParams {
    pub start: State,
    /// The compact set is `{x <= level}`.
    pub level: f64,
    /// Smallest cap of the doubling ladder.
    pub cap: u64,
    /// Number of doublings: caps `cap, 2 cap, ..., 2^doublings cap`.
    pub doublings: u32,
    pub n: usize,
    pub seed: u64,
    /// Free-running horizon `T` for the median of `X_T` and `X_{2T}`; 0 skips it.
    pub horizon: u64,
    /// Number of free-running paths.
    pub paths: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmpiricalCall {
    Escaping,
    ReturningWithDivergingMean,
    ReturningWithStableMean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapRung {
    pub cap: u64,
    /// Fraction of draws with `tau <= cap`.
    pub return_fraction: f64,
    /// Mean of `min(tau, cap)`.
    pub mean_return_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub params: DiagnosticParams,
    pub ladder: Vec<CapRung>,
    /// `mean_return_time` of each rung over the previous one.
    pub mean_ratios: Vec<f64>,
    pub median_at_horizon: Option<f64>,
    pub median_at_double_horizon: Option<f64>,
    /// `median(X_{2T}) / median(X_T)`
    pub median_ratio: Option<f64>,
    pub call: EmpiricalCall,
    pub rule: String,
}

pub const DIAGNOSTIC_RULE: &str = "escaping if more than half of the draws are censored at the largest cap; \
returning-with-stable-mean if under 1% are censored there and the last mean-return-time ratio lies in [0.9, 1.1]; \
returning-with-diverging-mean otherwise";

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Return frequencies and mean return times across a cap-doubling ladder, plus
/// the median position of free-running paths at `T` and `2T`.
pub fn recurrence_diagnostic<K: Kernel + ?Sized>(
    model: &K,
    params: DiagnosticParams,
) -> Result<DiagnosticReport> {
    Ok(recurrence_diagnostic_with_samples(model, params)?.0)
}

/// [`recurrence_diagnostic`] plus the passage samples drawn at the largest cap.
pub fn recurrence_diagnostic_with_samples<K: Kernel + ?Sized>(
    model: &K,
    params: DiagnosticParams,
) -> Result<(DiagnosticReport, Vec<PassageSample>)> {
    if params.cap == 0 {
        return Err(Error::Invalid("cap must be >= 1".into()));
    }
    let top = params
        .cap
        .checked_mul(1u64 << params.doublings)
        .ok_or_else(|| Error::Invalid("cap ladder overflows".into()))?;
    let samples = sample_passage_times(
        model,
        params.start,
        params.level,
        top,
        params.n,
        params.seed,
    )?;
    let n = samples.len().max(1) as f64;
    let ladder: Vec<CapRung> = (0..=params.doublings)
        .map(|k| {
            let cap = params.cap << k;
            CapRung {
                cap,
                return_fraction: samples
                    .iter()
                    .filter(|s| s.tau.is_some_and(|t| t <= cap))
                    .count() as f64
                    / n,
                mean_return_time: samples
                    .iter()
                    .map(|s| s.truncated().min(cap) as f64)
                    .sum::<f64>()
                    / n,
            }
        })
        .collect();
    let mean_ratios: Vec<f64> = ladder
        .windows(2)
        .map(|w| w[1].mean_return_time / w[0].mean_return_time)
        .collect();

    let (mut m1, mut m2) = (None, None);
    if params.horizon > 0 && params.paths > 0 {
        let ends: Vec<(f64, f64)> = (0..params.paths as u64)
            .into_par_iter()
            .map(|k| -> Result<(f64, f64)> {
                let mut rng = stream_rng(params.seed, FREE_RUN_STREAM | k);
                let mut scratch = Vec::new();
                let mut state = params.start;
                let mut at_t = state.position;
                for t in 1..=2 * params.horizon {
                    state = model.step(state, rng.random::<f64>(), &mut scratch)?;
                    if t == params.horizon {
                        at_t = state.position;
                    }
                }
                Ok((at_t, state.position))
            })
            .collect::<Result<_>>()?;
        m1 = median(ends.iter().map(|e| e.0).collect());
        m2 = median(ends.iter().map(|e| e.1).collect());
    }
    let median_ratio = match (m1, m2) {
        (Some(a), Some(b)) if a > 0.0 => Some(b / a),
        _ => None,
    };

    let last = ladder.last().expect("ladder has at least one rung");
    let censored_top = 1.0 - last.return_fraction;
    let call = if censored_top > 0.5 {
        EmpiricalCall::Escaping
    } else if censored_top < 0.01 && mean_ratios.last().is_some_and(|r| (0.9..=1.1).contains(r)) {
        EmpiricalCall::ReturningWithStableMean
    } else {
        EmpiricalCall::ReturningWithDivergingMean
    };
    let report = DiagnosticReport {
        params,
        ladder,
        mean_ratios,
        median_at_horizon: m1,
        median_at_double_horizon: m2,
        median_ratio,
        call,
        rule: DIAGNOSTIC_RULE.to_string(),
    };
    Ok((report, samples))
}

/// Samples as CSV with columns `tau, censored, steps`; `tau` holds
/// `min(tau, cap)`.
pub fn samples_to_csv(samples: &[PassageSample]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tau", "censored", "steps"])?;
    for s in samples {
        w.write_record([
            s.truncated().to_string(),
            u8::from(s.censored()).to_string(),
            s.steps.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        make_crw, make_tabular, Atom, BoundaryRule, ChainKernel, ChainModel, TabularAtom,
        TabularRow, TabularSpec,
    };

    fn crw(q: f64, c: f64) -> ChainModel {
        ChainModel {
            kernel: ChainKernel::Crw(make_crw(q, c, c, 1.0, 0.0).unwrap()),
            description: String::new(),
        }
    }

    fn walk() -> ChainModel {
        make_tabular(&TabularSpec {
            labels: vec![0],
            rows: vec![TabularRow {
                label: 0,
                atoms: vec![
                    TabularAtom {
                        jump: 1.0,
                        to: None,
                        p: 0.5,
                        p_inv_x: 0.0,
                    },
                    TabularAtom {
                        jump: -1.0,
                        to: None,
                        p: 0.5,
                        p_inv_x: 0.0,
                    },
                ],
            }],
            boundary: BoundaryRule::Reflect,
            floor: 1.0,
            description: None,
        })
        .unwrap()
    }

    struct Deterministic;

    impl Kernel for Deterministic {
        fn labels(&self) -> &[i64] {
            &[0]
        }

        fn atoms_into(&self, state: State, out: &mut Vec<Atom>) -> Result<()> {
            self.check_state(state)?;
            out.clear();
            out.push(Atom::new(2.0, 0, 1.0));
            Ok(())
        }
    }

    #[test]
    fn zero_horizon_is_single_state() {
        let t = simulate(&crw(0.6, 0.2), State::new(5.0, 0), 0, 1).unwrap();
        assert_eq!(t.states, vec![State::new(5.0, 0)]);
        assert_eq!(t.steps, 0);
    }

    #[test]
    fn deterministic_kernel_ignores_seed() {
        let a = simulate(&Deterministic, State::new(0.0, 0), 50, 1).unwrap();
        let b = simulate(&Deterministic, State::new(0.0, 0), 50, 99).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.states[50].position, 100.0);
    }

    #[test]
    fn simulate_is_reproducible_and_follows_atoms() {
        let m = crw(0.6, 0.2);
        let a = simulate(&m, State::new(20.0, 1), 5000, 7).unwrap();
        let b = simulate(&m, State::new(20.0, 1), 5000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.states.len(), 5001);
        for w in a.states.windows(2) {
            let atoms = m.distribution(w[0]).unwrap().atoms;
            assert!(atoms.iter().any(|x| x.prob > 0.0
                && w[0].position + x.jump == w[1].position
                && x.next == w[1].label));
        }
        assert!(simulate(&m, State::new(-1.0, 0), 5, 1).is_err());
    }

    #[test]
    fn step_frequencies_match_kernel() {
        // 10^6 draws from one state: within 4 binomial standard deviations
        let m = crw(0.6, 0.2);
        let state = State::new(100.0, 0);
        let p = m.distribution(state).unwrap().atoms[0].prob;
        let mut rng = stream_rng(3, 0);
        let mut scratch = Vec::new();
        let n = 1_000_000;
        let ups = (0..n)
            .filter(|_| {
                m.step(state, rng.random::<f64>(), &mut scratch)
                    .unwrap()
                    .label
                    == 0
            })
            .count() as f64;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (ups - n as f64 * p).abs() < 4.0 * sd,
            "ups {ups} vs {}",
            n as f64 * p
        );

        let w = walk();
        let mut rng = stream_rng(4, 0);
        let downs = (0..n)
            .filter(|_| {
                w.step(State::new(10.0, 0), rng.random::<f64>(), &mut scratch)
                    .unwrap()
                    .position
                    < 10.0
            })
            .count() as f64;
        assert!((downs - 0.5 * n as f64).abs() < 4.0 * (n as f64 * 0.25).sqrt());
    }

    #[test]
    fn start_below_level_gives_zero() {
        let s = sample_passage_times(&crw(0.6, 0.2), State::new(5.0, 0), 10.0, 100, 20, 1).unwrap();
        assert!(s.iter().all(|p| p.tau == Some(0) && p.steps == 0));
    }

    #[test]
    fn passage_times_respect_definition() {
        let m = crw(0.6, 0.2);
        let start = State::new(30.0, 0);
        let batch = sample_passage_times(&m, start, 10.0, 5000, 64, 11).unwrap();
        for (k, sample) in batch.iter().enumerate() {
            let (again, path) = passage_with_path(&m, start, 10.0, 5000, 11, k as u64).unwrap();
            assert_eq!(*sample, again);
            match sample.tau {
                Some(t) => {
                    assert!(t <= sample.cap);
                    assert!(path[t as usize].position <= 10.0);
                    assert!(path[..t as usize].iter().all(|s| s.position > 10.0));
                }
                None => assert!(path.iter().all(|s| s.position > 10.0)),
            }
        }
    }

    #[test]
    fn batches_do_not_depend_on_thread_count() {
        let m = crw(0.6, 0.2);
        let run = |threads| {
            with_threads(threads, || {
                sample_passage_times(&m, State::new(30.0, 0), 10.0, 20_000, 200, 5)
            })
            .unwrap()
            .unwrap()
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn moments_and_truncation() {
        let s = sample_passage_times(&walk(), State::new(5.0, 0), 0.0, 10_000, 500, 2).unwrap();
        assert_eq!(empirical_moment(&s, 0.0).0, 1.0);
        let (m_full, _) = empirical_moment(&s, 1.0);
        let (m_cut, flag) = empirical_moment_at_cap(&s, 1.0, 100).unwrap();
        assert!(m_cut <= m_full);
        assert!(flag);
        assert!(empirical_moment_at_cap(&s, 1.0, 20_000).is_err());
    }

    #[test]
    fn tail_needs_enough_uncensored() {
        let s = sample_passage_times(&walk(), State::new(5.0, 0), 0.0, 1000, 100, 2).unwrap();
        assert!(matches!(
            tail_exponent(&s),
            Err(Error::TooFewSamples { .. })
        ));
    }

    fn synthetic(taus: impl Iterator<Item = u64>, cap: u64) -> Vec<PassageSample> {
        taus.map(|t| {
            let tau = (t <= cap).then_some(t);
            PassageSample {
                tau,
                cap,
                steps: tau.unwrap_or(cap),
                start: State::new(1.0, 0),
                level: 0.0,
            }
        })
        .collect()
    }

    #[test]
    fn pareto_tail_is_recovered() {
        // P(tau > t) = t^{-alpha} for t >= 1
        let alpha: f64 = 0.4;
        let mut rng = stream_rng(8, 0);
        let taus = (0..20_000).map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            u.powf(-1.0 / alpha).floor() as u64
        });
        let s = synthetic(taus.collect::<Vec<_>>().into_iter(), 1_000_000_000);
        let est = tail_exponent(&s).unwrap();
        assert!((est.exponent - alpha).abs() < 0.03, "{est:?}");
        assert!(!est.non_power_law, "{est:?}");
        let hill = est.hill.unwrap();
        assert!((hill - alpha).abs() < 0.05, "hill {hill}");
    }

    #[test]
    fn geometric_tail_is_flagged() {
        let mut rng = stream_rng(9, 0);
        let p: f64 = 0.01;
        let taus: Vec<u64> = (0..10_000)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                (u.ln() / (1.0 - p).ln()).ceil() as u64
            })
            .collect();
        let est = tail_exponent(&synthetic(taus.into_iter(), 1_000_000)).unwrap();
        assert!(est.non_power_law, "{est:?}");
    }

    #[test]
    fn csv_layout() {
        let s = synthetic([3u64, 50].into_iter(), 10);
        let text = String::from_utf8(samples_to_csv(&s).unwrap()).unwrap();
        assert_eq!(text, "tau,censored,steps\n3,0,3\n10,1,10\n");
        assert_eq!(
            String::from_utf8(samples_to_csv(&[]).unwrap()).unwrap(),
            "tau,censored,steps\n"
        );
    }

    #[test]
    fn diagnostic_on_positive_recurrent_walk() {
        let r = recurrence_diagnostic(
            &crw(0.6, -1.0),
            DiagnosticParams {
                start: State::new(30.0, 0),
                level: 10.0,
                cap: 20_000,
                doublings: 1,
                n: 500,
                seed: 1,
                horizon: 0,
                paths: 0,
            },
        )
        .unwrap();
        assert_eq!(r.call, EmpiricalCall::ReturningWithStableMean, "{r:?}");
        assert!(r.median_ratio.is_none());
    }
}
