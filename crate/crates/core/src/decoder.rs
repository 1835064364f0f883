//! Receiver-side memory and decoding.
//!
//! A receiver stores every non-discarded reception - including collisions -
//! as one exact linear equation over the global packet unknowns. Decoding is
//! plain elimination on that store, which subsumes every hand-written
//! interference-cancellation chain: if a sequence of subtract-and-substitute
//! steps recovers a packet, elimination recovers it too.

use std::collections::BTreeSet;

use crate::channel::ChannelState;
use crate::field::{Eliminator, Matrix, SparseVec};
use crate::packet::{UnknownMap, User};

/// One stored equation.
#[derive(Clone, Debug)]
pub struct StoreRow {
    pub slot: u64,
    pub coeffs: SparseVec,
}

/// A receiver's memory of past receptions.
#[derive(Clone, Debug)]
pub struct EquationStore {
    pub receiver: User,
    pub rows: Vec<StoreRow>,
}

impl EquationStore {
    pub fn new(receiver: User) -> Self {
        EquationStore { receiver, rows: Vec::new() }
    }

    /// Record one slot's reception. `v1`/`v2` are the coefficient rows the
    /// transmitters put on the air (absent when a transmitter stayed silent).
    /// A row is appended only when the combined signal is nonzero; a slot
    /// contributes at most one row.
    pub fn observe(
        &mut self,
        slot: u64,
        state: &ChannelState,
        v1: Option<&SparseVec>,
        v2: Option<&SparseVec>,
    ) {
        let (from1, from2) = state.incoming(self.receiver);
        let mut row = SparseVec::zero();
        if from1.on {
            if let Some(v1) = v1 {
                row = row.add_scaled(v1, from1.gain);
            }
        }
        if from2.on {
            if let Some(v2) = v2 {
                row = row.add_scaled(v2, from2.gain);
            }
        }
        if !row.is_zero() {
            self.rows.push(StoreRow { slot, coeffs: row });
        }
    }

    /// Append an equation whose value became known out-of-band (a delivered
    /// packet of common interest).
    pub fn add_known(&mut self, slot: u64, coeffs: SparseVec) {
        if !coeffs.is_zero() {
            self.rows.push(StoreRow { slot, coeffs });
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dense view of the store for the small-scale elimination oracles.
    pub fn to_matrix(&self, cols: usize) -> Matrix {
        Matrix::from_sparse_rows(self.rows.iter().map(|r| &r.coeffs), cols)
    }
}

/// Outcome of decoding one receiver's store.
#[derive(Clone, Debug)]
pub struct DecodeReport {
    pub resolved: Vec<u32>,
    pub unresolved: Vec<u32>,
    pub rows_consumed: usize,
    /// Rank of the store minus the rank of its interference-only part: the
    /// number of independent interference-free directions available for the
    /// intended packets. Decoding succeeds exactly when this equals the
    /// number of intended packets, which in turn happens exactly when
    /// `unresolved` is empty.
    pub projection_dimension: usize,
}

impl DecodeReport {
    pub fn complete(&self) -> bool {
        self.unresolved.is_empty()
    }
}

/// Decode everything the store admits and report on the receiver's own
/// packets. Partial results are fine.
pub fn decode(store: &EquationStore, unknowns: &UnknownMap) -> DecodeReport {
    let own: Vec<u32> = unknowns.user_columns(store.receiver).collect();
    let own_set: BTreeSet<u32> = own.iter().copied().collect();

    let mut full = Eliminator::new();
    let mut cross_only = Eliminator::new();
    for row in &store.rows {
        full.insert(row.coeffs.clone());
        let cross = SparseVec::from_pairs(
            row.coeffs.iter().filter(|(c, _)| !own_set.contains(c)),
        );
        if !cross.is_zero() {
            cross_only.insert(cross);
        }
    }
    let resolved_cols = full.resolved_columns();
    let (resolved, unresolved): (Vec<u32>, Vec<u32>) =
        own.iter().partition(|c| resolved_cols.contains(c));
    DecodeReport {
        resolved,
        unresolved,
        rows_consumed: full.rows_absorbed(),
        projection_dimension: full.rank() - cross_only.rank(),
    }
}

/// The decodability metric: dimension of the desired signal space projected
/// off the interference subspace. Assembled from a completed trial's per-slot
/// matrices; success requires it to equal the number of intended packets.
pub fn decodability_metric(desired: &Matrix, interference: &Matrix) -> usize {
    crate::field::projection_dimension(desired, interference)
}
