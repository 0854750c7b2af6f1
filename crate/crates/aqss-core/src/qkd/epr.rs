//! Step (1) and (2): the EPR source with verification sampling, the
//! intercept-resend eavesdropper, and the singlet-to-triplet conversion.
//!
//! The source is modeled, not proven: each edge emits singlets, the flying
//! half picks up outcome-flip noise with probability `noise_p`, and Eve may
//! intercept-resend on one edge. Twice the needed pairs are generated; half
//! are sampled, measured in a random matched basis by both ends, and
//! compared. A singlet anticorrelates in both bases, so any agreement is an
//! error; intercept-resend pushes the observed rate to about 25%.

use super::bus::{party_name, MessageBus};
use super::{EveAttack, ProtocolConfig};
use crate::error::Result;
use crate::quantum::{Basis, QuditRegister};
use crate::rng::RngStream;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// (|01⟩ − |10⟩)/√2.
pub fn singlet() -> QuditRegister {
    let x = std::f64::consts::FRAC_1_SQRT_2;
    QuditRegister::prepare(
        &[2, 2],
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(x, 0.0),
            Complex64::new(-x, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("singlet amplitudes are normalized")
}

/// (|00⟩ + |11⟩)/√2 up to global phase after the second party applies XZ.
pub fn singlet_to_triplet(pair: &QuditRegister) -> Result<QuditRegister> {
    // XZ on site 1: the Z phase first, then the X shift.
    let phases = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    pair.apply_phases(1, &phases)?
        .apply_basis_permutation(&[1], &[1, 0])
}

/// Fidelity to the triplet (|00⟩ + |11⟩)/√2, phase-insensitive.
pub fn triplet_fidelity(pair: &QuditRegister) -> f64 {
    let x = std::f64::consts::FRAC_1_SQRT_2;
    let amps = pair.amplitudes();
    (amps[0] * x + amps[3] * x).norm_sqr()
        / amps.iter().map(|a| a.norm_sqr()).sum::<f64>()
}

/// Verification statistics for one edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeVerification {
    pub edge: (usize, usize),
    pub samples: usize,
    pub mismatches: usize,
    pub estimated_error: f64,
}

pub struct EprOutcome {
    /// Per tree edge, the surviving pairs (site 0 = first endpoint).
    pub pairs: Vec<Vec<QuditRegister>>,
    pub stats: Vec<EdgeVerification>,
    /// Edge index that failed verification, if any.
    pub failed_edge: Option<usize>,
}

/// Run the EPR protocol on every tree edge: generate 2·rounds pairs, let Eve
/// at her configured edge intercept every transit, sample half for
/// verification, and keep the other half.
pub fn distribute_epr(
    config: &ProtocolConfig,
    rng: &RngStream,
    bus: &mut MessageBus,
) -> Result<EprOutcome> {
    let mut pairs = Vec::with_capacity(config.tree.len());
    let mut stats = Vec::with_capacity(config.tree.len());
    let mut failed_edge = None;

    for (edge_index, &(u, v)) in config.tree.iter().enumerate() {
        let edge_rng = rng.child_indexed("edge", edge_index as u64);
        let eve_here = matches!(
            config.eve,
            Some(EveAttack::InterceptResend { edge }) if edge == edge_index
        );
        let total = 2 * config.rounds;
        let mut generated = Vec::with_capacity(total);
        for pair_index in 0..total {
            let mut pair_rng = edge_rng.child_indexed("pair", pair_index as u64);
            let mut pair = singlet();
            if eve_here {
                // Eve measures the flying half in a random basis and resends
                // the collapsed eigenstate.
                let basis = if pair_rng.flip(0.5) {
                    Basis::Computational
                } else {
                    Basis::Diagonal
                };
                let (_, collapsed) = pair.measure(&[1], basis, &mut pair_rng)?;
                pair = collapsed;
            }
            generated.push(pair);
        }

        // The first half is sampled for verification; the kept half stays
        // untouched until the merge step.
        let mut mismatches = 0;
        let verify_rng = edge_rng.child("verify");
        for (pair_index, pair) in generated.drain(..config.rounds).enumerate() {
            let mut pair_rng = verify_rng.child_indexed("sample", pair_index as u64);
            let basis = if pair_rng.flip(0.5) {
                Basis::Computational
            } else {
                Basis::Diagonal
            };
            let (outcome, _) = pair.measure(&[0, 1], basis, &mut pair_rng)?;
            let mut receiver_bit = outcome.values[1] == 1;
            // Channel noise flips the flying half's outcome.
            if pair_rng.flip(config.noise_p) {
                receiver_bit = !receiver_bit;
            }
            let sender_bit = outcome.values[0] == 1;
            // A singlet anticorrelates in matched bases; agreement is an error.
            if sender_bit == receiver_bit {
                mismatches += 1;
            }
        }
        // Outcome comparison costs 2 bits per sampled pair on the channel.
        bus.send(
            "step1-verification",
            party_name(u),
            party_name(v),
            config.rounds,
        );
        bus.send(
            "step1-verification",
            party_name(v),
            party_name(u),
            config.rounds,
        );

        let estimated_error = mismatches as f64 / config.rounds as f64;
        stats.push(EdgeVerification {
            edge: (u, v),
            samples: config.rounds,
            mismatches,
            estimated_error,
        });
        if estimated_error > config.abort_threshold && failed_edge.is_none() {
            failed_edge = Some(edge_index);
        }
        pairs.push(generated);
    }

    Ok(EprOutcome {
        pairs,
        stats,
        failed_edge,
    })
}

/// Step (2): convert every kept pair; each second party notifies the leader.
pub fn convert_to_triplets(
    pairs: Vec<Vec<QuditRegister>>,
    config: &ProtocolConfig,
    bus: &mut MessageBus,
) -> Result<Vec<Vec<QuditRegister>>> {
    let mut converted = Vec::with_capacity(pairs.len());
    for (edge_index, edge_pairs) in pairs.into_iter().enumerate() {
        let (_, v) = config.tree[edge_index];
        let triplets = edge_pairs
            .iter()
            .map(singlet_to_triplet)
            .collect::<Result<Vec<_>>>()?;
        bus.send(
            "step3-completion",
            party_name(v),
            party_name(config.leader),
            1,
        );
        converted.push(triplets);
    }
    Ok(converted)
}
