//! Small hand-built channel histories that exercise each coding opportunity
//! end to end. Used heavily by tests and the guide; instantiating them with
//! random nonzero gains makes each run a fresh algebraic instance of the same
//! connectivity story.

use crate::channel::{case_of, ChannelState};
use crate::decoder::EquationStore;
use crate::packet::{UnknownMap, User};
use crate::queues::{apply_case, QueueSet};
use crate::rng::Rng;

/// Queues and receiver stores after a forced sequence of slots.
pub struct Scenario {
    pub queues: QueueSet,
    pub stores: [EquationStore; 2],
    pub unknowns: UnknownMap,
    pub slots: u64,
}

fn forced_slot(
    queues: &mut QueueSet,
    stores: &mut [EquationStore; 2],
    flags: (bool, bool, bool, bool),
    rng: &mut Rng,
    t: u64,
) {
    let mut state = ChannelState::from_flags(flags.0, flags.1, flags.2, flags.3);
    state.direct1.gain = rng.field_nonzero();
    state.cross12.gain = rng.field_nonzero();
    state.cross21.gain = rng.field_nonzero();
    state.direct2.gain = rng.field_nonzero();

    let v1 = queues.tx(User::U1).initial.front().map(|r| r.coeffs.clone());
    let v2 = queues.tx(User::U2).initial.front().map(|r| r.coeffs.clone());
    for store in stores.iter_mut() {
        store.observe(t, &state, v1.as_ref(), v2.as_ref());
    }
    apply_case(queues, case_of(&state), t);
}

fn scenario(m: u32, slots: &[(bool, bool, bool, bool)], rng: &mut Rng) -> Scenario {
    let mut queues = QueueSet::symmetric(m);
    let mut stores = [EquationStore::new(User::U1), EquationStore::new(User::U2)];
    for (i, &flags) in slots.iter().enumerate() {
        forced_slot(&mut queues, &mut stores, flags, rng, i as u64 + 1);
    }
    Scenario { unknowns: queues.unknowns, queues, stores, slots: slots.len() as u64 }
}

/// Both packets collide at both receivers, then each is overheard by the
/// unintended receiver: the Type-I setting. Two packets per transmitter.
pub fn pair_with_side_info(rng: &mut Rng) -> Scenario {
    scenario(
        2,
        &[
            (true, true, true, true),   // both receivers store a combination
            (false, true, true, false), // both packets overheard across
        ],
        rng,
    )
}

/// One slot delivers to its own receiver while colliding at the peer, one
/// slot is overheard only: the minimal Type-II setting. Two packets per
/// transmitter.
pub fn overheard_resolver(rng: &mut Rng) -> Scenario {
    scenario(
        2,
        &[
            (true, true, false, true),  // rx1 decodes its packet, rx2 stores a combination
            (false, true, false, false), // tx1's packet overheard at rx2 only
        ],
        rng,
    )
}

/// Three slots whose leftovers chain across both transmitters: the full
/// Type-II setting with three packets per transmitter.
pub fn three_slot_chain(rng: &mut Rng) -> Scenario {
    scenario(
        3,
        &[
            (false, true, true, false), // both first packets overheard across
            (true, false, true, true),  // rx2 decodes its packet, rx1 stores a combination
            (true, true, false, true),  // rx1 decodes its packet, rx2 stores a combination
        ],
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combiner::{apply_type1, apply_type2, combine_all};
    use crate::decoder::decode;
    use crate::observe::NullObserver;
    use crate::packet::QueueTag;

    /// Deliver every common-queue record to both receivers, then decode.
    fn deliver_commons_and_decode(sc: &mut Scenario) -> [crate::decoder::DecodeReport; 2] {
        let mut t = sc.slots;
        for user in User::BOTH {
            for rec in sc.queues.tx(user).common.iter() {
                t += 1;
                for store in sc.stores.iter_mut() {
                    store.add_known(t, rec.coeffs.clone());
                }
            }
        }
        [
            decode(&sc.stores[0], &sc.unknowns),
            decode(&sc.stores[1], &sc.unknowns),
        ]
    }

    #[test]
    fn type1_scenario_resolves_all_four_packets_at_both_receivers() {
        let mut rng = Rng::new(2_718);
        for _ in 0..50 {
            let mut sc = pair_with_side_info(&mut rng);
            let plan = apply_type1(&mut sc.queues, &mut NullObserver);
            assert_eq!(plan.type1_pairs, 1);
            assert_eq!(sc.queues.tx(User::U1).common.len(), 1);
            assert_eq!(sc.queues.tx(User::U2).common.len(), 1);

            let reports = deliver_commons_and_decode(&mut sc);
            for (i, rep) in reports.iter().enumerate() {
                assert!(rep.complete(), "receiver {} incomplete: {:?}", i + 1, rep);
            }
            // every one of the four unknowns is resolvable at each receiver
            for store in &sc.stores {
                let m = store.to_matrix(sc.unknowns.total() as usize);
                let all: Vec<u32> = (0..sc.unknowns.total()).collect();
                let res = crate::field::solve_subset(&m, &all);
                assert!(res.values().all(|r| r.is_some()));
            }
        }
    }

    #[test]
    fn type2_minimal_scenario_resolves_the_chain() {
        let mut rng = Rng::new(1_618);
        for _ in 0..50 {
            let mut sc = overheard_resolver(&mut rng);
            let plan = apply_type2(&mut sc.queues, &mut NullObserver);
            assert_eq!(plan.type2_pairs, [1, 0]);
            assert_eq!(sc.queues.tx(User::U1).common.len(), 1);

            let mut t = sc.slots;
            let coded = sc.queues.tx(User::U1).common[0].coeffs.clone();
            for store in sc.stores.iter_mut() {
                t += 1;
                store.add_known(t, coded.clone());
            }
            let rx1 = decode(&sc.stores[0], &sc.unknowns);
            assert!(rx1.complete(), "rx1 should recover both its packets: {rx1:?}");
            // rx2 recovers its first packet by cancelling the delivered sum
            // out of its stored collision
            let rx2 = decode(&sc.stores[1], &sc.unknowns);
            let b1 = sc.unknowns.column(User::U2, 0);
            assert!(rx2.resolved.contains(&b1), "rx2 misses the collision partner");
        }
    }

    #[test]
    fn three_slot_chain_resolves_everything_owed() {
        let mut rng = Rng::new(3_141);
        for _ in 0..50 {
            let mut sc = three_slot_chain(&mut rng);
            let plan = combine_all(&mut sc.queues, &mut NullObserver);
            assert_eq!(plan.type2_pairs, [1, 1]);
            assert_eq!(plan.type1_pairs, 0);
            assert!(sc.queues.tx(User::U1).queue(QueueTag::Initial).is_empty());
            assert!(sc.queues.tx(User::U2).queue(QueueTag::Initial).is_empty());

            // delivering the two coded sums settles every own packet
            let reports = deliver_commons_and_decode(&mut sc);
            assert!(reports[0].complete(), "rx1 incomplete: {:?}", reports[0]);
            assert!(reports[1].complete(), "rx2 incomplete: {:?}", reports[1]);

            // the full chain of recoveries, cross packets included: rx1 works
            // through b1 (direct), b2, a2, a3 (direct), a1; rx2 through a1
            // (direct), a3, b3, b2 (direct), b1
            let a = |k| sc.unknowns.column(User::U1, k);
            let b = |k| sc.unknowns.column(User::U2, k);
            let rx1_all = crate::field::solve_subset(
                &sc.stores[0].to_matrix(sc.unknowns.total() as usize),
                &[a(0), a(1), a(2), b(0), b(1)],
            );
            assert!(rx1_all.values().all(|r| r.is_some()), "rx1 chain broken");
            let rx2_all = crate::field::solve_subset(
                &sc.stores[1].to_matrix(sc.unknowns.total() as usize),
                &[b(0), b(1), b(2), a(0), a(2)],
            );
            assert!(rx2_all.values().all(|r| r.is_some()), "rx2 chain broken");
        }
    }
}
