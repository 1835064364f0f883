//! Packet identities, queue tags and the packet record itself.

use std::fmt;

use crate::field::SparseVec;

/// One of the two transmitter-receiver pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    U1,
    U2,
}

impl User {
    pub const BOTH: [User; 2] = [User::U1, User::U2];

    #[inline]
    pub fn idx(self) -> usize {
        match self {
            User::U1 => 0,
            User::U2 => 1,
        }
    }

    #[inline]
    pub fn other(self) -> User {
        match self {
            User::U1 => User::U2,
            User::U2 => User::U1,
        }
    }

    pub fn from_idx(i: usize) -> User {
        match i {
            0 => User::U1,
            1 => User::U2,
            _ => panic!("user index {i}"),
        }
    }

    fn number(self) -> u8 {
        self.idx() as u8 + 1
    }
}

/// Identity of a transmitted record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PacketId {
    /// One of the original source packets.
    Source { owner: User, seq: u32 },
    /// A combination created by a coding opportunity or routed as-is into a
    /// common queue by the combiner.
    Coded { owner: User, seq: u32 },
    /// A synthetic all-zero record appended to reach the deterministic
    /// post-deadline queue sizes.
    Padding { owner: User, seq: u32 },
}

impl PacketId {
    pub fn owner(self) -> User {
        match self {
            PacketId::Source { owner, .. }
            | PacketId::Coded { owner, .. }
            | PacketId::Padding { owner, .. } => owner,
        }
    }

    pub fn is_padding(self) -> bool {
        matches!(self, PacketId::Padding { .. })
    }
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PacketId::Source { owner, seq } => write!(f, "p{}:{}", owner.number(), seq),
            PacketId::Coded { owner, seq } => write!(f, "c{}:{}", owner.number(), seq),
            PacketId::Padding { owner, seq } => write!(f, "z{}:{}", owner.number(), seq),
        }
    }
}

/// Where a record currently lives.
///
/// Every packet sits in exactly one queue at any time; the Phase-1 transition
/// rules and the combiner are the only arcs between tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueueTag {
    /// Not yet categorized; the transmitter still has to send it.
    Initial,
    /// Collided at both receivers in the same slot (kept aligned pairwise
    /// across the two transmitters).
    Collided,
    /// Of interest to both receivers; delivered by the multicast phase.
    Common,
    /// Needed by its own receiver but already known at the other one, so
    /// retransmitting it cannot cause fresh interference.
    InterferenceFree,
    /// Already known at its own receiver but needed by the other receiver to
    /// cancel a stored collision.
    ForPeer,
    /// Delivered, or virtually delivered through a stored combination; no
    /// retransmission required.
    Delivered,
}

impl QueueTag {
    pub const ALL: [QueueTag; 6] = [
        QueueTag::Initial,
        QueueTag::Collided,
        QueueTag::Common,
        QueueTag::InterferenceFree,
        QueueTag::ForPeer,
        QueueTag::Delivered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueueTag::Initial => "initial",
            QueueTag::Collided => "collided",
            QueueTag::Common => "common",
            QueueTag::InterferenceFree => "intf_free",
            QueueTag::ForPeer => "for_peer",
            QueueTag::Delivered => "delivered",
        }
    }
}

/// A source packet or coded combination, carrying its coefficient vector over
/// the global unknowns.
#[derive(Clone, Debug)]
pub struct PacketRecord {
    pub id: PacketId,
    pub coeffs: SparseVec,
    pub status: QueueTag,
    pub origin_slot: Option<u64>,
}

impl PacketRecord {
    pub fn source(owner: User, seq: u32, unknowns: &UnknownMap) -> Self {
        PacketRecord {
            id: PacketId::Source { owner, seq },
            coeffs: SparseVec::unit(unknowns.column(owner, seq)),
            status: QueueTag::Initial,
            origin_slot: None,
        }
    }

    pub fn padding(owner: User, seq: u32) -> Self {
        PacketRecord {
            id: PacketId::Padding { owner, seq },
            coeffs: SparseVec::zero(),
            status: QueueTag::Initial,
            origin_slot: None,
        }
    }
}

/// Maps source packets onto columns of the global unknown space: user 1's
/// packets first, then user 2's.
#[derive(Clone, Copy, Debug)]
pub struct UnknownMap {
    pub m1: u32,
    pub m2: u32,
}

impl UnknownMap {
    pub fn new(m1: u32, m2: u32) -> Self {
        UnknownMap { m1, m2 }
    }

    pub fn symmetric(m: u32) -> Self {
        UnknownMap { m1: m, m2: m }
    }

    #[inline]
    pub fn column(&self, owner: User, seq: u32) -> u32 {
        match owner {
            User::U1 => seq,
            User::U2 => self.m1 + seq,
        }
    }

    pub fn total(&self) -> u32 {
        self.m1 + self.m2
    }

    /// Columns belonging to one user's source packets.
    pub fn user_columns(&self, owner: User) -> std::ops::Range<u32> {
        match owner {
            User::U1 => 0..self.m1,
            User::U2 => self.m1..self.m1 + self.m2,
        }
    }
}

/// A validated probability in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self, crate::error::ConfigError> {
        if p.is_finite() && (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(crate::error::ConfigError::InvalidProbability(p))
        }
    }

    pub const HALF: Probability = Probability(0.5);

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
