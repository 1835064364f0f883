//! Phase 2: delivering the packets of common interest.
//!
//! Each slot, each transmitter sends a fresh uniform random combination of
//! its entire common queue; a receiver banks an equation whenever at least
//! one incoming link is on. The subproblem is the two-multicast network -
//! both common queues must reach both receivers - whose optimal region, at
//! the symmetric design point, matches the multiple-access region at either
//! receiver.
//!
//! Rank bookkeeping has two routes. The counting route tracks, per receiver,
//! how many banked slots involve each transmitter; over a huge field the rank
//! of the banked equations equals the generic bound
//! `min(e1 + e2, useful, e1 + u2, e2 + u1)` except with probability on the
//! order of (e1 + e2)/q per trial. The materialized route instantiates the
//! actual coefficients and eliminates them exactly. Both are computed at
//! small scale and must agree; at large scale only the counting route runs.

use crate::channel::{case_of, sample_state};
use crate::decoder::EquationStore;
use crate::error::ConfigError;
use crate::field::{Eliminator, SparseVec};
use crate::observe::{SimObserver, SlotEvent, TxAction};
use crate::packet::{PacketRecord, Probability, User};
use crate::rng::Rng;

/// How to verify decodability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Materialize {
    /// Instantiate coefficients when the record count is small enough.
    Auto,
    Always,
    Never,
}

impl Materialize {
    fn decide(self, unknowns: u64) -> bool {
        match self {
            Materialize::Always => true,
            Materialize::Never => false,
            // the materialized eliminator is cubic in the record count; past
            // a few hundred records the counting route is the only sane one
            Materialize::Auto => unknowns <= 600,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase2Mode {
    /// Run exactly this many slots, then judge decodability.
    FixedDuration(u64),
    /// Stop at the first slot where both receivers reach full rank over the
    /// nonzero common records.
    Adaptive,
}

#[derive(Clone, Copy, Debug)]
pub struct MulticastConfig {
    pub p: Probability,
    pub mode: Phase2Mode,
    pub materialize: Materialize,
    /// When set, the expanded per-slot transmit rows (width = global unknown
    /// count) are kept on the session for rank analyses.
    pub capture_width: Option<u32>,
}

impl MulticastConfig {
    pub fn new(p: Probability, mode: Phase2Mode, materialize: Materialize) -> Self {
        MulticastConfig { p, mode, materialize, capture_width: None }
    }
}

/// Per-receiver slot statistics.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReceiverTally {
    /// Banked slots in which the link from tx1 was on.
    pub with_tx1: u64,
    /// Banked slots in which the link from tx2 was on.
    pub with_tx2: u64,
    /// Banked slots total (at least one link on).
    pub useful: u64,
}

impl ReceiverTally {
    /// Generic rank of the banked equations over `e1 + e2` record unknowns.
    pub fn counted_rank(&self, e1: u64, e2: u64) -> u64 {
        (e1 + e2)
            .min(self.useful)
            .min(e1 + self.with_tx2)
            .min(e2 + self.with_tx1)
    }
}

#[derive(Clone, Debug)]
pub struct MulticastSession {
    /// Common queue lengths as handed in (padding records included).
    pub queue_lengths: [u64; 2],
    /// Nonzero records per queue: the unknowns a receiver actually needs.
    pub effective_unknowns: [u64; 2],
    pub duration: u64,
    pub tallies: [ReceiverTally; 2],
    pub counted_ranks: [u64; 2],
    /// Exact elimination ranks when the coefficients were materialized.
    pub exact_ranks: Option<[u64; 2]>,
    pub decode_ok: [bool; 2],
    /// Adaptive runaway guard tripped (pathological configuration).
    pub aborted: bool,
    /// Per-slot transmit rows for each transmitter when capture was
    /// requested; an empty row means the transmitter was silent.
    pub tx_rows: Option<[Vec<Vec<crate::field::Gf>>; 2]>,
}

impl MulticastSession {
    pub fn all_decoded(&self) -> bool {
        self.decode_ok[0] && self.decode_ok[1]
    }
}

/// Deliver both common queues to both receivers.
///
/// `channel_rng` must be the same generator that drove Phase 1 so the trial
/// sees one continuous channel realization; combination coefficients come
/// from their own stream so that materializing them (or not) cannot perturb
/// the channel. When `stores` are given and a receiver ends up decodable,
/// every nonzero record is appended to its store as a known equation.
pub fn run_phase2(
    commons: [&[PacketRecord]; 2],
    cfg: &MulticastConfig,
    channel_rng: &mut Rng,
    coding_rng: &mut Rng,
    mut stores: Option<&mut [EquationStore; 2]>,
    obs: &mut dyn SimObserver,
    slot_offset: u64,
) -> MulticastSession {
    let nonzero: [Vec<&PacketRecord>; 2] = [
        commons[0].iter().filter(|r| !r.coeffs.is_zero()).collect(),
        commons[1].iter().filter(|r| !r.coeffs.is_zero()).collect(),
    ];
    let e = [nonzero[0].len() as u64, nonzero[1].len() as u64];
    let needed = e[0] + e[1];
    let materialized = cfg.materialize.decide(needed);
    let needs_coeffs = materialized || cfg.capture_width.is_some();

    let mut session = MulticastSession {
        queue_lengths: [commons[0].len() as u64, commons[1].len() as u64],
        effective_unknowns: e,
        duration: 0,
        tallies: [ReceiverTally::default(); 2],
        counted_ranks: [0; 2],
        exact_ranks: None,
        decode_ok: [needed == 0; 2],
        aborted: false,
        tx_rows: cfg.capture_width.map(|_| [Vec::new(), Vec::new()]),
    };
    if needed == 0 {
        return session;
    }

    let rate = 1.0 - (1.0 - cfg.p.get()).powi(2);
    let cap = match cfg.mode {
        Phase2Mode::FixedDuration(t) => t,
        Phase2Mode::Adaptive => {
            if rate <= 0.0 {
                session.aborted = true;
                return session;
            }
            1_000 + (20.0 * needed as f64 / rate).ceil() as u64
        }
    };

    let mut exact: Option<[Eliminator; 2]> = materialized.then(|| [Eliminator::new(), Eliminator::new()]);

    let mut t = 0u64;
    while t < cap {
        t += 1;
        let state = sample_state(cfg.p, channel_rng);

        let coeffs: Option<[Vec<crate::field::Gf>; 2]> = needs_coeffs.then(|| {
            [
                (0..e[0]).map(|_| coding_rng.field_uniform()).collect(),
                (0..e[1]).map(|_| coding_rng.field_uniform()).collect(),
            ]
        });

        if let (Some(width), Some(rows), Some(c)) =
            (cfg.capture_width, session.tx_rows.as_mut(), coeffs.as_ref())
        {
            for side in 0..2 {
                let mut dense = vec![crate::field::Gf::ZERO; width as usize];
                let mut any = false;
                for (rec, &k) in nonzero[side].iter().zip(c[side].iter()) {
                    for (col, x) in rec.coeffs.iter() {
                        dense[col as usize] += x * k;
                        any = true;
                    }
                }
                rows[side].push(if any { dense } else { Vec::new() });
            }
        }

        for rx in User::BOTH {
            let (from1, from2) = state.incoming(rx);
            let on1 = from1.on && e[0] > 0;
            let on2 = from2.on && e[1] > 0;
            if !(on1 || on2) {
                continue;
            }
            let tally = &mut session.tallies[rx.idx()];
            tally.useful += 1;
            if on1 {
                tally.with_tx1 += 1;
            }
            if on2 {
                tally.with_tx2 += 1;
            }
            if let (Some(elims), Some(c)) = (exact.as_mut(), coeffs.as_ref()) {
                // record-space row: tx1's records on columns 0..e1, tx2's on
                // e1..e1+e2, each block scaled by its link gain
                let mut row: Vec<(u32, crate::field::Gf)> = Vec::new();
                if on1 {
                    for (i, &x) in c[0].iter().enumerate() {
                        row.push((i as u32, x * from1.gain));
                    }
                }
                if on2 {
                    for (i, &x) in c[1].iter().enumerate() {
                        row.push(((e[0] as usize + i) as u32, x * from2.gain));
                    }
                }
                elims[rx.idx()].insert(SparseVec::from_pairs(row));
            }
        }

        let action = |i: usize| if e[i] > 0 { TxAction::Combination } else { TxAction::Silent };
        obs.slot(&SlotEvent {
            t: slot_offset + t,
            state: &state,
            case: case_of(&state),
            tx1: action(0),
            tx2: action(1),
            transitions: &[],
        });

        if cfg.mode == Phase2Mode::Adaptive {
            let done = User::BOTH.iter().all(|&rx| {
                session.tallies[rx.idx()].counted_rank(e[0], e[1]) == needed
            });
            if done {
                break;
            }
        }
    }
    session.duration = t;
    if cfg.mode == Phase2Mode::Adaptive {
        let complete = User::BOTH
            .iter()
            .all(|&rx| session.tallies[rx.idx()].counted_rank(e[0], e[1]) == needed);
        session.aborted = !complete;
    }

    for rx in User::BOTH {
        session.counted_ranks[rx.idx()] = session.tallies[rx.idx()].counted_rank(e[0], e[1]);
    }
    if let Some(elims) = exact.as_ref() {
        session.exact_ranks = Some([elims[0].rank() as u64, elims[1].rank() as u64]);
    }
    for rx in User::BOTH {
        let rank = match session.exact_ranks {
            Some(ranks) => ranks[rx.idx()],
            None => session.counted_ranks[rx.idx()],
        };
        session.decode_ok[rx.idx()] = rank == needed;
    }

    if let Some(stores) = stores.take() {
        for rx in User::BOTH {
            if session.decode_ok[rx.idx()] {
                let store = &mut stores[rx.idx()];
                let mut slot = slot_offset + session.duration;
                for side in &nonzero {
                    for rec in side {
                        slot += 1;
                        store.add_known(slot, rec.coeffs.clone());
                    }
                }
            }
        }
    }
    session
}

/// The optimal two-multicast region at the symmetric design point.
pub fn two_multicast_region(p: Probability) -> Result<crate::analysis::ThroughputRegion, ConfigError> {
    if p.get() != 0.5 {
        return Err(ConfigError::UnsupportedP {
            op: "two_multicast_region",
            required: 0.5,
            got: p.get(),
        });
    }
    Ok(crate::analysis::ThroughputRegion::from_half_planes(vec![
        crate::analysis::HalfPlane { c1: 1.0, c2: 0.0, rhs: 0.5, id: "mc_r1" },
        crate::analysis::HalfPlane { c1: 0.0, c2: 1.0, rhs: 0.5, id: "mc_r2" },
        crate::analysis::HalfPlane { c1: 1.0, c2: 1.0, rhs: 0.75, id: "mc_sum" },
    ]))
}

/// Build a standalone common queue of `real` unit records plus `padding`
/// zero records (what the end of Phase 1 hands to Phase 2).
pub fn synthetic_common_queue(owner: User, real: u32, padding: u32) -> Vec<PacketRecord> {
    let unknowns = crate::packet::UnknownMap::symmetric(real.max(1));
    let mut v: Vec<PacketRecord> = (0..real)
        .map(|seq| {
            let mut r = PacketRecord::source(owner, seq, &unknowns);
            r.status = crate::packet::QueueTag::Common;
            r
        })
        .collect();
    for seq in 0..padding {
        let mut r = PacketRecord::padding(owner, seq);
        r.status = crate::packet::QueueTag::Common;
        v.push(r);
    }
    v
}
