//! The two coding opportunities, applied as queue rewriters between the
//! phases, plus the analytic cost comparison against plain repetition.
//!
//! Type I (packet delivery with side information) pairs a collided packet
//! with an interference-free packet of the same transmitter; delivering the
//! sum to both receivers resolves both. Type II (interference delivery with
//! side information) pairs a packet the peer receiver needs with a packet the
//! own receiver needs; one delivery of the sum resolves collisions from
//! several past slots.
//!
//! Pass order is Type I first - it alone can consume the collided queue -
//! then Type II, then a fallback that routes any surplus side packet into the
//! common queue unchanged. A raw packet of common interest is always safe to
//! deliver, so random fluctuations in queue sizes cost a little throughput
//! but never correctness.

use crate::error::ConfigError;
use crate::field::Gf;
use crate::observe::{CombineEvent, CombineKind, SimObserver};
use crate::packet::{PacketRecord, Probability, QueueTag, User};
use crate::queues::QueueSet;

/// What one full combiner run did.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CombinationPlan {
    /// Aligned four-way pairings: one collided entry and one
    /// interference-free entry per transmitter per pair.
    pub type1_pairs: u64,
    /// Per-transmitter pairings of peer-needed with interference-free.
    pub type2_pairs: [u64; 2],
    /// Records routed into a common queue unchanged, per transmitter.
    pub raw_to_common: [u64; 2],
    /// Collided partners whose delivery obligation was absorbed by a raw
    /// routed packet.
    pub virtually_delivered: u64,
}

fn coded_sum(queues: &mut QueueSet, owner: User, x: &PacketRecord, y: &PacketRecord) -> PacketRecord {
    PacketRecord {
        id: queues.next_coded_id(owner),
        coeffs: x.coeffs.add_scaled(&y.coeffs, Gf::ONE),
        status: QueueTag::Common,
        origin_slot: None,
    }
}

fn retire(queues: &mut QueueSet, owner: User, mut rec: PacketRecord) {
    rec.status = QueueTag::Delivered;
    queues.tx_mut(owner).delivered.push_back(rec);
}

fn route_raw(queues: &mut QueueSet, owner: User, mut rec: PacketRecord, obs: &mut dyn SimObserver) {
    obs.combine(&CombineEvent {
        kind: CombineKind::RawToCommon,
        tx: owner,
        inputs: vec![rec.id],
        output: Some(rec.id),
    });
    rec.status = QueueTag::Common;
    queues.tx_mut(owner).common.push_back(rec);
}

/// Type-I rewriting.
///
/// The k-th entries of the two collided queues originate from the same slot,
/// so pairing is positional: a pair is coded only while BOTH transmitters can
/// also supply an interference-free packet, which keeps every decode chain
/// closed. Once a side queue runs out, each remaining collided pair is
/// handled the conventional way: one of the two goes into a common queue
/// unchanged and its partner becomes virtually delivered.
pub fn apply_type1(queues: &mut QueueSet, obs: &mut dyn SimObserver) -> CombinationPlan {
    let mut plan = CombinationPlan::default();
    assert_eq!(
        queues.tx(User::U1).collided.len(),
        queues.tx(User::U2).collided.len(),
        "collided queues must stay pairwise aligned"
    );
    let pairs = queues.tx(User::U1).collided.len()
        .min(queues.tx(User::U1).interference_free.len())
        .min(queues.tx(User::U2).interference_free.len());

    for _ in 0..pairs {
        for user in User::BOTH {
            let c = queues.tx_mut(user).collided.pop_front().expect("counted");
            let s = queues.tx_mut(user).interference_free.pop_front().expect("counted");
            let coded = coded_sum(queues, user, &c, &s);
            obs.combine(&CombineEvent {
                kind: CombineKind::PairWithSideInfo,
                tx: user,
                inputs: vec![c.id, s.id],
                output: Some(coded.id),
            });
            queues.tx_mut(user).common.push_back(coded);
            retire(queues, user, c);
            retire(queues, user, s);
        }
        plan.type1_pairs += 1;
    }

    // Side queues exhausted: remaining collided pairs fall back to the plain
    // packet-of-common-interest route, alternating the transmitter that
    // carries the delivery.
    let mut k = 0usize;
    while !queues.tx(User::U1).collided.is_empty() {
        let a = queues.tx_mut(User::U1).collided.pop_front().expect("nonempty");
        let b = queues.tx_mut(User::U2).collided.pop_front().expect("aligned");
        let (carrier, rider, carrier_user, rider_user) = if k.is_multiple_of(2) {
            (a, b, User::U1, User::U2)
        } else {
            (b, a, User::U2, User::U1)
        };
        route_raw(queues, carrier_user, carrier, obs);
        obs.combine(&CombineEvent {
            kind: CombineKind::VirtualDeliver,
            tx: rider_user,
            inputs: vec![rider.id],
            output: None,
        });
        retire(queues, rider_user, rider);
        plan.raw_to_common[carrier_user.idx()] += 1;
        plan.virtually_delivered += 1;
        k += 1;
    }
    plan
}

/// Type-II rewriting, run after Type I.
///
/// Within each transmitter, peer-needed packets pair with the remaining
/// interference-free packets; each pair becomes one coded packet of common
/// interest. Any surplus on either side is routed into the common queue
/// unchanged.
pub fn apply_type2(queues: &mut QueueSet, obs: &mut dyn SimObserver) -> CombinationPlan {
    let mut plan = CombinationPlan::default();
    for user in User::BOTH {
        let pairs = queues.tx(user).for_peer.len().min(queues.tx(user).interference_free.len());
        for _ in 0..pairs {
            let u = queues.tx_mut(user).for_peer.pop_front().expect("counted");
            let v = queues.tx_mut(user).interference_free.pop_front().expect("counted");
            let coded = coded_sum(queues, user, &u, &v);
            obs.combine(&CombineEvent {
                kind: CombineKind::PairAcrossCollisions,
                tx: user,
                inputs: vec![u.id, v.id],
                output: Some(coded.id),
            });
            queues.tx_mut(user).common.push_back(coded);
            retire(queues, user, u);
            retire(queues, user, v);
            plan.type2_pairs[user.idx()] += 1;
        }
        while let Some(rec) = queues.tx_mut(user).for_peer.pop_front() {
            route_raw(queues, user, rec, obs);
            plan.raw_to_common[user.idx()] += 1;
        }
        while let Some(rec) = queues.tx_mut(user).interference_free.pop_front() {
            route_raw(queues, user, rec, obs);
            plan.raw_to_common[user.idx()] += 1;
        }
    }
    plan
}

/// Run both passes; afterwards only the common and delivered queues are
/// nonempty.
pub fn combine_all(queues: &mut QueueSet, obs: &mut dyn SimObserver) -> CombinationPlan {
    let t1 = apply_type1(queues, obs);
    let t2 = apply_type2(queues, obs);
    CombinationPlan {
        type1_pairs: t1.type1_pairs,
        type2_pairs: t2.type2_pairs,
        raw_to_common: [
            t1.raw_to_common[0] + t2.raw_to_common[0],
            t1.raw_to_common[1] + t2.raw_to_common[1],
        ],
        virtually_delivered: t1.virtually_delivered,
    }
}

/// Records still owed a delivery; collided entries count one per aligned
/// pair, since providing either member to both receivers resolves both.
pub fn pending_deliveries(queues: &QueueSet) -> u64 {
    let c1 = queues.tx(User::U1).collided.len() as u64;
    let rest: u64 = User::BOTH
        .iter()
        .map(|&u| {
            let tq = queues.tx(u);
            (tq.interference_free.len() + tq.for_peer.len() + tq.common.len()) as u64
        })
        .sum();
    c1 + rest
}

/// Analytic slot costs of delivering one Type-I packet set (two collided
/// partners plus two interference-free packets) with and without coding, at
/// the symmetric design point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodingCosts {
    pub conventional_slots: f64,
    pub coded_slots: f64,
    pub improvement: f64,
}

/// At p = 1/2 an interference-free packet costs one slot on average and a
/// packet of common interest costs 4/3 slots. Conventional delivery needs
/// two interference-free packets plus one common packet; coded delivery
/// needs two common packets.
pub fn conventional_cost_vs_coded_cost(p: Probability) -> Result<CodingCosts, ConfigError> {
    if p.get() != 0.5 {
        return Err(ConfigError::UnsupportedP {
            op: "conventional_cost_vs_coded_cost",
            required: 0.5,
            got: p.get(),
        });
    }
    // exact rational bookkeeping: conventional = 2 + 4/3 = 10/3,
    // coded = 2 * 4/3 = 8/3, improvement = (10/3 - 8/3) / (10/3) = 2/10
    let conventional = (10.0, 3.0);
    let coded = (8.0, 3.0);
    let improvement_num = conventional.0 * coded.1 - coded.0 * conventional.1; // 30 - 24 = 6... over 3*3
    let improvement = improvement_num / (conventional.0 * coded.1); // 6/30 = 0.2
    Ok(CodingCosts {
        conventional_slots: conventional.0 / conventional.1,
        coded_slots: coded.0 / coded.1,
        improvement,
    })
}
