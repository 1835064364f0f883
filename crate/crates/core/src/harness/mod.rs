//! Experiment orchestration: configuration, seeded trial execution for the
//! two-phase scheme and the two benchmarks, aggregation, region/sweep CSV
//! emission, and trace replay.

pub mod config;
pub mod trace;
pub mod verify;

use rayon::prelude::*;

use crate::analysis::{phase2_duration, PrecoderRow, PrecoderTrace};
use crate::channel::sample_state;
use crate::decoder::{decode, EquationStore};
use crate::error::ConfigError;
use crate::field::Gf;
use crate::multicast::{
    run_phase2, Materialize, MulticastConfig, MulticastSession, Phase2Mode,
};
use crate::observe::{NullObserver, SimObserver, SlotEvent, TxAction};
use crate::packet::{PacketId, PacketRecord, Probability, UnknownMap, User};
use crate::queues::{
    expected_queue_sizes, run_phase1, HaltKind, Phase1Config, Phase1Mode, QueueCounts,
};
use crate::rng::{Rng, Stream};

pub const FIELD_MODULUS: u64 = crate::field::MODULUS as u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Theorem1,
    Tdma,
    Rateless,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Theorem1 => "theorem1",
            Scheme::Tdma => "tdma",
            Scheme::Rateless => "rateless",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "theorem1" => Ok(Scheme::Theorem1),
            "tdma" => Ok(Scheme::Tdma),
            "rateless" => Ok(Scheme::Rateless),
            _ => Err(ConfigError::UnknownValue { what: "scheme", value: s.into() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    PaperFaithful,
    Adaptive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::PaperFaithful => "paper-faithful",
            Mode::Adaptive => "adaptive",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "paper-faithful" => Ok(Mode::PaperFaithful),
            "adaptive" => Ok(Mode::Adaptive),
            _ => Err(ConfigError::UnknownValue { what: "mode", value: s.into() }),
        }
    }
}

/// A fully specified experiment. Identical configurations produce
/// byte-identical outputs regardless of worker count.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub p: f64,
    pub m: u32,
    pub seed: u64,
    pub trials: u32,
    pub mode: Mode,
    pub workers: usize,
    pub field_modulus: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scheme: Scheme::Theorem1,
            p: 0.5,
            m: 10_000,
            seed: 0,
            trials: 1,
            mode: Mode::Adaptive,
            workers: 1,
            field_modulus: FIELD_MODULUS,
        }
    }
}

impl SimConfig {
    /// Check every invariant before any trial runs.
    pub fn validate(&self) -> Result<Probability, ConfigError> {
        let p = Probability::new(self.p)?;
        if self.field_modulus != FIELD_MODULUS {
            return Err(ConfigError::UnsupportedModulus(self.field_modulus));
        }
        if self.trials == 0 {
            return Err(ConfigError::ZeroTrials);
        }
        if self.workers == 0 {
            return Err(ConfigError::ZeroWorkers);
        }
        match self.scheme {
            Scheme::Theorem1 => {
                if self.p != 0.5 {
                    return Err(ConfigError::SchemeNeedsSymmetricP {
                        scheme: "theorem1",
                        got: self.p,
                    });
                }
            }
            Scheme::Tdma | Scheme::Rateless => {
                if self.p == 0.0 && self.m > 0 {
                    return Err(ConfigError::NoDepartures);
                }
            }
        }
        Ok(p)
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial: u32,
    pub phase1_slots: u64,
    pub phase2_slots: u64,
    pub total_slots: u64,
    /// Per-receiver throughput, set only when that receiver decoded all of
    /// its packets.
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub decode_ok_rx1: bool,
    pub decode_ok_rx2: bool,
    pub halt: Option<HaltKind>,
}

impl TrialResult {
    pub fn fully_decoded(&self) -> bool {
        self.decode_ok_rx1 && self.decode_ok_rx2 && self.halt.is_none()
    }
}

pub const CSV_HEADER: &str = "scheme,p,m,seed,trial,mode,phase1_slots,phase2_slots,total_slots,r1,r2,decode_ok_rx1,decode_ok_rx2,halt_kind";

pub fn csv_row(cfg: &SimConfig, r: &TrialResult) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        cfg.scheme.name(),
        cfg.p,
        cfg.m,
        cfg.seed,
        r.trial,
        cfg.mode.name(),
        r.phase1_slots,
        r.phase2_slots,
        r.total_slots,
        opt(r.r1),
        opt(r.r2),
        r.decode_ok_rx1,
        r.decode_ok_rx2,
        r.halt.map(|h| h.name()).unwrap_or("none"),
    )
}

/// Mean/stderr statistics over the fully decoded trials; failures and halts
/// are counted, never folded into the means.
#[derive(Clone, Copy, Debug, Default)]
pub struct Aggregate {
    pub trials: u32,
    pub fully_decoded: u32,
    pub halted: u32,
    pub mean_r1: f64,
    pub mean_r2: f64,
    pub stderr_r1: f64,
    pub stderr_r2: f64,
    pub mean_sum: f64,
    pub stderr_sum: f64,
}

impl Aggregate {
    pub fn decode_success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.fully_decoded as f64 / self.trials as f64
        }
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(results: &[TrialResult]) -> Aggregate {
    let ok: Vec<&TrialResult> = results.iter().filter(|r| r.fully_decoded()).collect();
    let r1: Vec<f64> = ok.iter().filter_map(|r| r.r1).collect();
    let r2: Vec<f64> = ok.iter().filter_map(|r| r.r2).collect();
    let sums: Vec<f64> = ok
        .iter()
        .filter_map(|r| Some(r.r1? + r.r2?))
        .collect();
    let (mean_r1, stderr_r1) = mean_stderr(&r1);
    let (mean_r2, stderr_r2) = mean_stderr(&r2);
    let (mean_sum, stderr_sum) = mean_stderr(&sums);
    Aggregate {
        trials: results.len() as u32,
        fully_decoded: ok.len() as u32,
        halted: results.iter().filter(|r| r.halt.is_some()).count() as u32,
        mean_r1,
        mean_r2,
        stderr_r1,
        stderr_r2,
        mean_sum,
        stderr_sum,
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub trials: Vec<TrialResult>,
    pub aggregate: Aggregate,
}

impl ExperimentResult {
    pub fn to_csv(&self, cfg: &SimConfig) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.trials {
            out.push_str(&csv_row(cfg, r));
            out.push('\n');
        }
        out
    }
}

/// Run one trial of the configured scheme.
pub fn run_trial(cfg: &SimConfig, p: Probability, trial: u32, obs: &mut dyn SimObserver) -> TrialResult {
    match cfg.scheme {
        Scheme::Theorem1 => {
            let opts = TwoPhaseOptions {
                p,
                m: cfg.m,
                mode: cfg.mode,
                materialize: Materialize::Auto,
                capture: false,
            };
            run_two_phase_trial(&opts, cfg.seed, trial, obs).result
        }
        Scheme::Tdma => run_tdma_trial(p, cfg.m, cfg.seed, trial, obs),
        Scheme::Rateless => run_rateless_trial(p, cfg.m, cfg.mode, cfg.seed, trial, obs).0,
    }
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, ConfigError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ConfigError::UnknownValue { what: "thread pool", value: e.to_string() })
}

/// Run every trial, in parallel when `workers > 1`. Results are keyed by
/// trial index, so aggregate statistics and CSV bytes are invariant to
/// execution order.
pub fn run_experiment(cfg: &SimConfig) -> Result<ExperimentResult, ConfigError> {
    let p = cfg.validate()?;
    let pool = worker_pool(cfg.workers)?;
    let trials: Vec<TrialResult> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, p, t, &mut NullObserver))
            .collect()
    });
    let agg = aggregate(&trials);
    Ok(ExperimentResult { trials, aggregate: agg })
}

/// Like [`run_experiment`], additionally producing the full trace text of
/// every trial.
pub fn run_experiment_traced(
    cfg: &SimConfig,
) -> Result<(ExperimentResult, Vec<String>), ConfigError> {
    let p = cfg.validate()?;
    let pool = worker_pool(cfg.workers)?;
    let pairs: Vec<(TrialResult, String)> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut writer = trace::TraceWriter::new(cfg, t);
                let r = run_trial(cfg, p, t, &mut writer);
                let text = writer.finish(&r);
                (r, text)
            })
            .collect()
    });
    let (trials, traces): (Vec<TrialResult>, Vec<String>) = pairs.into_iter().unzip();
    let agg = aggregate(&trials);
    Ok((ExperimentResult { trials, aggregate: agg }, traces))
}

/// Options for the two-phase pipeline.
#[derive(Clone, Copy, Debug)]
pub struct TwoPhaseOptions {
    pub p: Probability,
    pub m: u32,
    pub mode: Mode,
    pub materialize: Materialize,
    /// Capture per-slot channel tape and both transmitters' precoding rows.
    pub capture: bool,
}

/// Everything a two-phase trial produces beyond the result row.
pub struct TwoPhaseOutcome {
    pub result: TrialResult,
    pub counts: [QueueCounts; 2],
    pub session: Option<MulticastSession>,
    pub stores: Option<[EquationStore; 2]>,
    /// Per-transmitter precoding histories (capture mode only).
    pub precoders: Option<[PrecoderTrace; 2]>,
    /// Per-slot `(alphas, gains)` tape (capture mode only), quadruple order.
    pub tape: Option<Vec<([bool; 4], [Gf; 4])>>,
}

/// Observer shim that forwards every event and, when active, keeps the
/// channel tape plus the uncoded phase-1 precoder rows.
struct CaptureObserver<'a> {
    inner: &'a mut dyn SimObserver,
    active: bool,
    /// Cleared once phase 1 ends: phase-2 rows come from the session capture.
    record_rows: bool,
    tape: Vec<([bool; 4], [Gf; 4])>,
    rows: [Vec<PrecoderRow>; 2],
}

impl SimObserver for CaptureObserver<'_> {
    fn slot(&mut self, ev: &SlotEvent<'_>) {
        if self.active {
            let s = ev.state;
            let alphas = [s.direct1.on, s.cross12.on, s.cross21.on, s.direct2.on];
            let gains = [s.direct1.gain, s.cross12.gain, s.cross21.gain, s.direct2.gain];
            self.tape.push((alphas, gains));
            if self.record_rows {
                for (i, action) in [ev.tx1, ev.tx2].into_iter().enumerate() {
                    let row = match action {
                        TxAction::Packet(PacketId::Source { seq, .. }) => PrecoderRow::Unit(seq),
                        _ => PrecoderRow::Silent,
                    };
                    self.rows[i].push(row);
                }
            }
        }
        self.inner.slot(ev);
    }

    fn combine(&mut self, ev: &crate::observe::CombineEvent) {
        self.inner.combine(ev);
    }
}

/// The full pipeline: phase 1, both combiner passes, phase 2, then decode at
/// both receivers, all against one shared channel realization stream.
pub fn run_two_phase_trial(
    opts: &TwoPhaseOptions,
    master_seed: u64,
    trial: u32,
    obs: &mut dyn SimObserver,
) -> TwoPhaseOutcome {
    let mut channel_rng = Rng::for_trial(master_seed, trial as u64, Stream::Channel);
    let mut coding_rng = Rng::for_trial(master_seed, trial as u64, Stream::Coding);
    let m = opts.m;
    let unknowns = UnknownMap::symmetric(m);
    let mut stores = [EquationStore::new(User::U1), EquationStore::new(User::U2)];

    let mut cap = CaptureObserver {
        inner: obs,
        active: opts.capture,
        record_rows: true,
        tape: Vec::new(),
        rows: [Vec::new(), Vec::new()],
    };

    let phase1_cfg = Phase1Config {
        p: opts.p,
        m,
        mode: match opts.mode {
            Mode::PaperFaithful => Phase1Mode::PaperFaithful,
            Mode::Adaptive => Phase1Mode::Adaptive,
        },
    };
    let mut phase1 = run_phase1(&phase1_cfg, &mut channel_rng, Some(&mut stores), &mut cap);
    cap.record_rows = false;

    let counts = phase1.counts;
    if let Some(halt) = phase1.halted {
        let slots = phase1.slots_used;
        return TwoPhaseOutcome {
            result: TrialResult {
                trial,
                phase1_slots: slots,
                phase2_slots: 0,
                total_slots: slots,
                r1: None,
                r2: None,
                decode_ok_rx1: false,
                decode_ok_rx2: false,
                halt: Some(halt),
            },
            counts,
            session: None,
            stores: Some(stores),
            precoders: None,
            tape: opts.capture.then_some(cap.tape),
        };
    }

    crate::combiner::combine_all(&mut phase1.queues, &mut cap);

    let commons1: Vec<PacketRecord> = phase1.queues.tx_mut(User::U1).common.drain(..).collect();
    let commons2: Vec<PacketRecord> = phase1.queues.tx_mut(User::U2).common.drain(..).collect();

    let mut phase2_cfg = MulticastConfig::new(
        opts.p,
        match opts.mode {
            Mode::PaperFaithful => Phase2Mode::FixedDuration(phase2_duration(m as u64)),
            Mode::Adaptive => Phase2Mode::Adaptive,
        },
        opts.materialize,
    );
    if opts.capture {
        phase2_cfg.capture_width = Some(unknowns.total());
    }

    let session = run_phase2(
        [&commons1, &commons2],
        &phase2_cfg,
        &mut channel_rng,
        &mut coding_rng,
        Some(&mut stores),
        &mut cap,
        phase1.slots_used,
    );

    let mut decode_ok = [false; 2];
    for rx in User::BOTH {
        decode_ok[rx.idx()] = session.decode_ok[rx.idx()]
            && decode(&stores[rx.idx()], &unknowns).complete();
    }
    let total = phase1.slots_used + session.duration;
    let rate = |ok: bool| (ok && total > 0).then(|| m as f64 / total as f64);
    let result = TrialResult {
        trial,
        phase1_slots: phase1.slots_used,
        phase2_slots: session.duration,
        total_slots: total,
        r1: rate(decode_ok[0]),
        r2: rate(decode_ok[1]),
        decode_ok_rx1: decode_ok[0],
        decode_ok_rx2: decode_ok[1],
        halt: None,
    };

    let precoders = opts
        .capture
        .then(|| build_precoder_traces(&cap.rows, &cap.tape, &session, m, &unknowns));
    TwoPhaseOutcome {
        result,
        counts,
        tape: opts.capture.then_some(cap.tape),
        session: Some(session),
        stores: Some(stores),
        precoders,
    }
}

fn build_precoder_traces(
    phase1_rows: &[Vec<PrecoderRow>; 2],
    tape: &[([bool; 4], [Gf; 4])],
    session: &MulticastSession,
    m: u32,
    unknowns: &UnknownMap,
) -> [PrecoderTrace; 2] {
    let tx_rows = session.tx_rows.as_ref().expect("capture implies materialized rows");
    let mut out: Vec<PrecoderTrace> = Vec::with_capacity(2);
    for user in User::BOTH {
        let i = user.idx();
        let mut rows = phase1_rows[i].clone();
        let range = unknowns.user_columns(user);
        for dense in &tx_rows[i] {
            if dense.is_empty() {
                rows.push(PrecoderRow::Silent);
            } else {
                // slice the global row down to this transmitter's columns;
                // its common-queue records never touch the peer's unknowns
                let own: Vec<Gf> = dense[range.start as usize..range.end as usize].to_vec();
                debug_assert!(dense
                    .iter()
                    .enumerate()
                    .all(|(c, x)| x.is_zero()
                        || (range.start as usize..range.end as usize).contains(&c)));
                rows.push(PrecoderRow::Dense(own));
            }
        }
        let (own_idx, cross_idx) = match user {
            User::U1 => (0usize, 1usize), // a11, a12
            User::U2 => (3usize, 2usize), // a22, a21
        };
        let own_on: Vec<bool> = tape.iter().map(|(a, _)| a[own_idx]).collect();
        let cross_on: Vec<bool> = tape.iter().map(|(a, _)| a[cross_idx]).collect();
        debug_assert_eq!(own_on.len(), rows.len());
        out.push(PrecoderTrace { columns: m, rows, own_on, cross_on, causal: true });
    }
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    [a, b]
}

/// Time-division benchmark: strictly alternating slot ownership, each owner
/// retransmitting its head packet until the direct link carries it.
pub fn run_tdma_trial(
    p: Probability,
    m: u32,
    master_seed: u64,
    trial: u32,
    obs: &mut dyn SimObserver,
) -> TrialResult {
    let mut rng = Rng::for_trial(master_seed, trial as u64, Stream::Channel);
    let mut left = [m as u64, m as u64];
    let mut t = 0u64;
    let cap = if p.get() > 0.0 {
        1_000 + (40.0 * m as f64 / p.get()).ceil() as u64
    } else {
        0
    };
    while (left[0] > 0 || left[1] > 0) && t < cap {
        t += 1;
        let state = sample_state(p, &mut rng);
        let owner = if t % 2 == 1 { User::U1 } else { User::U2 };
        let i = owner.idx();
        let mut actions = [TxAction::Silent, TxAction::Silent];
        if left[i] > 0 {
            let seq = (m as u64 - left[i]) as u32;
            actions[i] = TxAction::Packet(PacketId::Source { owner, seq });
            let direct_on = match owner {
                User::U1 => state.direct1.on,
                User::U2 => state.direct2.on,
            };
            if direct_on {
                left[i] -= 1;
            }
        }
        obs.slot(&SlotEvent {
            t,
            state: &state,
            case: crate::channel::case_of(&state),
            tx1: actions[0],
            tx2: actions[1],
            transitions: &[],
        });
    }
    let done = left[0] == 0 && left[1] == 0;
    let r = (done && t > 0).then(|| m as f64 / t as f64);
    TrialResult {
        trial,
        phase1_slots: t,
        phase2_slots: 0,
        total_slots: t,
        r1: r,
        r2: r,
        decode_ok_rx1: done,
        decode_ok_rx2: done,
        halt: (!done && m > 0).then_some(HaltKind::TypeI),
    }
}

/// Rateless benchmark: both transmitters always send fresh random
/// combinations of all their packets and both receivers joint-decode
/// everything. Mechanically this is the multicast stage run directly on the
/// source packets.
pub fn run_rateless_trial(
    p: Probability,
    m: u32,
    mode: Mode,
    master_seed: u64,
    trial: u32,
    obs: &mut dyn SimObserver,
) -> (TrialResult, MulticastSession) {
    let mut channel_rng = Rng::for_trial(master_seed, trial as u64, Stream::Channel);
    let mut coding_rng = Rng::for_trial(master_seed, trial as u64, Stream::Coding);
    let unknowns = UnknownMap::symmetric(m);
    let mk = |owner: User| -> Vec<PacketRecord> {
        (0..m)
            .map(|seq| {
                let mut r = PacketRecord::source(owner, seq, &unknowns);
                r.status = crate::packet::QueueTag::Common;
                r
            })
            .collect()
    };
    let q1 = mk(User::U1);
    let q2 = mk(User::U2);
    let rate = 1.0 - (1.0 - p.get()).powi(2);
    let cfg = MulticastConfig::new(
        p,
        match mode {
            Mode::Adaptive => Phase2Mode::Adaptive,
            Mode::PaperFaithful => {
                Phase2Mode::FixedDuration((2.0 * m as f64 / rate).ceil() as u64)
            }
        },
        Materialize::Auto,
    );
    let session = run_phase2(
        [&q1, &q2],
        &cfg,
        &mut channel_rng,
        &mut coding_rng,
        None,
        obs,
        0,
    );
    let t = session.duration;
    let rate_of = |ok: bool| (ok && t > 0).then(|| m as f64 / t as f64);
    let result = TrialResult {
        trial,
        phase1_slots: 0,
        phase2_slots: t,
        total_slots: t,
        r1: rate_of(session.decode_ok[0]),
        r2: rate_of(session.decode_ok[1]),
        decode_ok_rx1: session.decode_ok[0],
        decode_ok_rx2: session.decode_ok[1],
        halt: session.aborted.then_some(HaltKind::TypeI),
    };
    (result, session)
}

/// Precoder history of a plain repetition strategy: send each packet until
/// the (one-slot-delayed) state knowledge shows it landed, then move on.
pub fn repetition_precoder_trace(
    p: Probability,
    slots: u64,
    master_seed: u64,
    trial: u32,
) -> PrecoderTrace {
    let mut rng = Rng::for_trial(master_seed, trial as u64, Stream::Channel);
    let m = (slots as f64 * p.get()).ceil().max(1.0) as u32;
    let mut head = 0u32;
    let mut rows = Vec::with_capacity(slots as usize);
    let mut own_on = Vec::with_capacity(slots as usize);
    let mut cross_on = Vec::with_capacity(slots as usize);
    for _ in 0..slots {
        let state = sample_state(p, &mut rng);
        rows.push(if head < m { PrecoderRow::Unit(head) } else { PrecoderRow::Silent });
        own_on.push(state.direct1.on);
        cross_on.push(state.cross12.on);
        // the head advances one slot after a success: delayed knowledge
        if head < m && state.direct1.on {
            head += 1;
        }
    }
    PrecoderTrace { columns: m, rows, own_on, cross_on, causal: true }
}

/// Precoder histories of both transmitters under the full two-phase scheme.
pub fn two_phase_precoder_traces(
    p: Probability,
    m: u32,
    master_seed: u64,
    trial: u32,
) -> [PrecoderTrace; 2] {
    let opts = TwoPhaseOptions {
        p,
        m,
        mode: Mode::Adaptive,
        materialize: Materialize::Never,
        capture: true,
    };
    run_two_phase_trial(&opts, master_seed, trial, &mut NullObserver)
        .precoders
        .expect("capture mode returns precoders")
}

/// Rough packet count that makes an adaptive two-phase trial last about
/// `target_slots` slots at a given p, from the expected queue-size algebra.
pub fn estimate_m_for_total_slots(p: Probability, target_slots: u64) -> u32 {
    let e = expected_queue_sizes(p, 1_000_000).expect("p > 0");
    let scale = 1.0 / 1_000_000.0;
    let (c1, iff, fp, common) = (
        e.collided * scale,
        e.interference_free * scale,
        e.for_peer * scale,
        e.common * scale,
    );
    let t1 = c1.min(iff);
    let if_left = iff - t1;
    let c1_left_each = (c1 - t1) / 2.0;
    let t2 = fp.min(if_left);
    let commons_per_tx = common + t1 + c1_left_each + t2 + (fp - t2) + (if_left - t2);
    let d = 1.0 - (1.0 - p.get()).powi(2);
    let slots_per_packet = 1.0 / d + 2.0 * commons_per_tx / d;
    ((target_slots as f64 / slots_per_packet).round() as u32).max(1)
}

/// One row per vertex; the region family is the prefix of `constraint_id`.
fn push_region_rows(out: &mut String, kind: &str, p: f64, region: &crate::analysis::ThroughputRegion) {
    for (x, y, active) in region.vertices_with_constraints() {
        out.push_str(&format!("{p},{x},{y},{kind}:{}\n", active.join(";")));
    }
}

pub const REGION_CSV_HEADER: &str = "p,vertex_x,vertex_y,constraint_id";

/// Region export: columns `p,vertex_x,vertex_y,constraint_id`, with the
/// capacity, tdma, and rateless families distinguished by the
/// `constraint_id` prefix.
pub fn region_csv(ps: &[f64]) -> Result<String, ConfigError> {
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for &pv in ps {
        let p = Probability::new(pv)?;
        push_region_rows(&mut out, "capacity", pv, &crate::analysis::capacity_region(p));
        push_region_rows(&mut out, "tdma", pv, &crate::analysis::tdma_region(p));
        push_region_rows(&mut out, "rateless", pv, &crate::analysis::rateless_region(p));
    }
    Ok(out)
}

/// An empirical point measured by the harness.
#[derive(Clone, Debug)]
pub struct EmpiricalPoint {
    pub scheme: Scheme,
    pub p: f64,
    pub r1: f64,
    pub r2: f64,
    pub stderr_r1: f64,
    pub stderr_r2: f64,
}

/// Regions plus measured points over a probability grid. The two-phase
/// scheme only runs at its design point; the benchmarks run everywhere.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    ps: &[f64],
    schemes: &[Scheme],
    m: u32,
    seed: u64,
    trials: u32,
    workers: usize,
) -> Result<(String, Vec<EmpiricalPoint>), ConfigError> {
    let mut out = region_csv(ps)?;
    let mut points = Vec::new();
    for &pv in ps {
        for &scheme in schemes {
            if scheme == Scheme::Theorem1 && pv != 0.5 {
                continue;
            }
            if pv == 0.0 {
                continue;
            }
            let cfg = SimConfig {
                scheme,
                p: pv,
                m,
                seed,
                trials,
                mode: Mode::Adaptive,
                workers,
                field_modulus: FIELD_MODULUS,
            };
            let res = run_experiment(&cfg)?;
            let a = res.aggregate;
            out.push_str(&format!(
                "{pv},{},{},empirical:{}\n",
                a.mean_r1,
                a.mean_r2,
                scheme.name()
            ));
            points.push(EmpiricalPoint {
                scheme,
                p: pv,
                r1: a.mean_r1,
                r2: a.mean_r2,
                stderr_r1: a.stderr_r1,
                stderr_r2: a.stderr_r2,
            });
        }
    }
    Ok((out, points))
}
