//! The channel model: four on/off links with nonzero gains, the
//! receiver-side state classification, and the canonical 16-case index.
//!
//! A slot's connectivity is the quadruple of indicators
//! `(a11, a12, a21, a22)` where `a_ji = 1` means the link from transmitter j
//! contributes its signal at receiver i. Indicators vary as i.i.d.
//! Bernoulli(p) draws; gains are resampled uniformly from the nonzero field
//! elements every slot.

use crate::error::ConfigError;
use crate::field::Gf;
use crate::packet::{Probability, User};
use crate::rng::Rng;

/// One directed link in one slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkState {
    pub on: bool,
    pub gain: Gf,
}

/// Connectivity and gains of all four links in one slot.
///
/// Field order matches the quadruple convention: `direct1` is tx1->rx1 (a11),
/// `cross12` is tx1->rx2 (a12), `cross21` is tx2->rx1 (a21), `direct2` is
/// tx2->rx2 (a22).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelState {
    pub direct1: LinkState,
    pub cross12: LinkState,
    pub cross21: LinkState,
    pub direct2: LinkState,
}

impl ChannelState {
    /// The indicator quadruple `(a11, a12, a21, a22)`.
    pub fn flags(&self) -> (bool, bool, bool, bool) {
        (self.direct1.on, self.cross12.on, self.cross21.on, self.direct2.on)
    }

    /// Incoming links at a receiver as `(from tx1, from tx2)`.
    pub fn incoming(&self, rx: User) -> (LinkState, LinkState) {
        match rx {
            User::U1 => (self.direct1, self.cross21),
            User::U2 => (self.cross12, self.direct2),
        }
    }

    /// Build a state from the indicator quadruple with fixed unit gains
    /// (handy for table-driven tests and scenarios).
    pub fn from_flags(a11: bool, a12: bool, a21: bool, a22: bool) -> Self {
        let ls = |on| LinkState { on, gain: Gf::ONE };
        ChannelState {
            direct1: ls(a11),
            cross12: ls(a12),
            cross21: ls(a21),
            direct2: ls(a22),
        }
    }

    /// Swap the two users' roles: a11 <-> a22 and a12 <-> a21.
    pub fn mirrored(&self) -> ChannelState {
        ChannelState {
            direct1: self.direct2,
            cross12: self.cross21,
            cross21: self.cross12,
            direct2: self.direct1,
        }
    }
}

/// Sample one slot: four independent Bernoulli(p) indicators, four
/// independent uniform nonzero gains. Deterministic given the generator.
pub fn sample_state(p: Probability, rng: &mut Rng) -> ChannelState {
    let p = p.get();
    let link = |rng: &mut Rng| {
        let on = rng.bernoulli(p);
        let gain = rng.field_nonzero();
        LinkState { on, gain }
    };
    ChannelState {
        direct1: link(rng),
        cross12: link(rng),
        cross21: link(rng),
        direct2: link(rng),
    }
}

/// Canonical case index in 1..=16 for a connectivity quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CaseIndex(u8);

impl CaseIndex {
    pub fn new(i: u8) -> Self {
        assert!((1..=16).contains(&i), "case index {i}");
        CaseIndex(i)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub const ALL: [u8; 16] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16];
}

impl std::fmt::Display for CaseIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The frozen quadruple-to-case table, indexed by
/// `a11 << 3 | a12 << 2 | a21 << 1 | a22`. This constant is the single source
/// of truth for the case numbering used everywhere in the crate.
pub const CASE_OF_QUADRUPLE: [u8; 16] = [
    16, // 0000
    9,  // 0001
    13, // 0010
    10, // 0011
    14, // 0100
    11, // 0101
    15, // 0110
    12, // 0111
    5,  // 1000
    4,  // 1001
    7,  // 1010
    3,  // 1011
    6,  // 1100
    2,  // 1101
    8,  // 1110
    1,  // 1111
];

/// Case index of a channel state.
pub fn case_of(state: &ChannelState) -> CaseIndex {
    let (a11, a12, a21, a22) = state.flags();
    let bits = ((a11 as usize) << 3) | ((a12 as usize) << 2) | ((a21 as usize) << 1) | (a22 as usize);
    CaseIndex(CASE_OF_QUADRUPLE[bits])
}

/// Inverse of the case table.
pub fn quadruple_of_case(case: CaseIndex) -> (bool, bool, bool, bool) {
    let bits = CASE_OF_QUADRUPLE
        .iter()
        .position(|&c| c == case.get())
        .expect("every case appears exactly once");
    (bits & 8 != 0, bits & 4 != 0, bits & 2 != 0, bits & 1 != 0)
}

/// The case obtained by swapping user identities.
pub fn mirror_case(case: CaseIndex) -> CaseIndex {
    let (a11, a12, a21, a22) = quadruple_of_case(case);
    case_of(&ChannelState::from_flags(a22, a21, a12, a11))
}

/// Receiver-side classification of one slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReceiverState {
    /// The intended packet's SINR clears the threshold: decode it.
    DecodesOwn = 1,
    /// The interfering packet's SINR clears the threshold: decode that one.
    DecodesPeer = 2,
    /// Both SINRs are below threshold but both raw links are strong: store
    /// the received signal as an exact linear combination.
    StoresCombination = 3,
    /// Nothing usable: discard the received signal.
    Discards = 4,
}

/// Receiver state implied by the indicator pair at a receiver.
pub fn receiver_state_of(state: &ChannelState, rx: User) -> ReceiverState {
    let (from_own, from_peer) = match rx {
        User::U1 => (state.direct1.on, state.cross21.on),
        User::U2 => (state.direct2.on, state.cross12.on),
    };
    match (from_own, from_peer) {
        (true, false) => ReceiverState::DecodesOwn,
        (false, true) => ReceiverState::DecodesPeer,
        (true, true) => ReceiverState::StoresCombination,
        (false, false) => ReceiverState::Discards,
    }
}

/// Raw SINR/SNR measurements (decibels) at one receiver for one slot.
#[derive(Clone, Copy, Debug)]
pub struct LinkMeasurement {
    pub sinr_own: f64,
    pub sinr_cross: f64,
    pub snr_own: f64,
    pub snr_cross: f64,
    pub gamma: f64,
}

impl LinkMeasurement {
    /// Interference only lowers the ratio, so SNR >= SINR per link.
    pub fn new(
        sinr_own: f64,
        sinr_cross: f64,
        snr_own: f64,
        snr_cross: f64,
        gamma: f64,
    ) -> Result<Self, ConfigError> {
        if snr_own < sinr_own || snr_cross < sinr_cross {
            return Err(ConfigError::UnknownValue {
                what: "link measurement (SNR below SINR)",
                value: format!("own {snr_own}<{sinr_own} or cross {snr_cross}<{sinr_cross}"),
            });
        }
        Ok(LinkMeasurement { sinr_own, sinr_cross, snr_own, snr_cross, gamma })
    }
}

/// Classify raw threshold measurements into the four receiver states.
///
/// Own-signal decodability is checked first. The indicator model cannot
/// produce simultaneous own/cross SINR clearance (states 1 and 2 are
/// mutually exclusive there), but raw measurements could; the own packet
/// wins that tie by this ordering.
pub fn classify_receiver_state(m: &LinkMeasurement) -> ReceiverState {
    if m.sinr_own >= m.gamma {
        ReceiverState::DecodesOwn
    } else if m.sinr_cross >= m.gamma {
        ReceiverState::DecodesPeer
    } else if m.snr_own >= m.gamma && m.snr_cross >= m.gamma {
        ReceiverState::StoresCombination
    } else {
        ReceiverState::Discards
    }
}
