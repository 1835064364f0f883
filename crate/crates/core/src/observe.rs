//! Observer hooks that let the harness capture per-slot trace events without
//! the simulation modules depending on any output format.

use crate::channel::{CaseIndex, ChannelState};
use crate::packet::{PacketId, QueueTag, User};

/// What a transmitter put on the air in one slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TxAction {
    Silent,
    Packet(PacketId),
    /// A fresh random combination of the transmitter's common queue.
    Combination,
}

/// One queue transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub id: PacketId,
    pub from: QueueTag,
    pub to: QueueTag,
}

/// One simulated slot.
#[derive(Clone, Debug)]
pub struct SlotEvent<'a> {
    pub t: u64,
    pub state: &'a ChannelState,
    pub case: CaseIndex,
    pub tx1: TxAction,
    pub tx2: TxAction,
    pub transitions: &'a [Move],
}

/// A combiner action between the phases.
#[derive(Clone, Debug)]
pub struct CombineEvent {
    pub kind: CombineKind,
    pub tx: User,
    pub inputs: Vec<PacketId>,
    pub output: Option<PacketId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineKind {
    /// Pair a collided packet with an interference-free packet.
    PairWithSideInfo,
    /// Pair a peer-needed packet with an interference-free packet.
    PairAcrossCollisions,
    /// Route a packet into the common queue unchanged.
    RawToCommon,
    /// Mark the partner of a raw-routed collision as virtually delivered.
    VirtualDeliver,
}

impl CombineKind {
    pub fn name(self) -> &'static str {
        match self {
            CombineKind::PairWithSideInfo => "type1",
            CombineKind::PairAcrossCollisions => "type2",
            CombineKind::RawToCommon => "raw_common",
            CombineKind::VirtualDeliver => "virtual_deliver",
        }
    }
}

pub trait SimObserver {
    fn slot(&mut self, _ev: &SlotEvent<'_>) {}
    fn combine(&mut self, _ev: &CombineEvent) {}
}

/// Observer that drops everything.
pub struct NullObserver;

impl SimObserver for NullObserver {}
