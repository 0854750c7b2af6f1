//! Steps (5)–(7): diagonal-basis measurement with outcome noise, check-bit
//! selection, group parity announcement, and the abort decision.
//!
//! For a clean GHZ round the XOR of all n diagonal bits is 0, so the two
//! groups' XORed (effective) bits agree. Outcome noise flips each party's
//! bit independently with probability `noise_p`, making each group's
//! effective bit wrong with probability P(group size, p).

use super::bus::{party_name, MessageBus};
use super::ProtocolConfig;
use crate::error::Result;
use crate::quantum::{Basis, QuditRegister};
use crate::rng::RngStream;
use crate::schemes::BitString;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiftOutcome {
    /// Per round, per party: the (noisy) diagonal-basis bit.
    pub outcomes: Vec<Vec<u8>>,
    /// The m positions used as check rounds, ascending.
    pub check_positions: Vec<usize>,
    /// Announced effective check strings, one per group.
    pub effective_check: (BitString, BitString),
    /// Hamming distance of the announced strings.
    pub delta: usize,
    /// Effective non-check strings, one per group (kept private).
    pub effective_noncheck: (BitString, BitString),
    pub proceed: bool,
}

/// Group membership: parties 0..split.0 form group 1, the rest group 2.
pub fn group_of(config: &ProtocolConfig, party: usize) -> usize {
    usize::from(party >= config.group_split.0)
}

/// Measure all rounds in the diagonal basis, apply outcome noise, pick m
/// check positions, and compare effective check bits.
pub fn measure_and_sift(
    ghz_rounds: &[QuditRegister],
    config: &ProtocolConfig,
    rng: &RngStream,
    bus: &mut MessageBus,
) -> Result<SiftOutcome> {
    let n = config.n;
    let mut outcomes = Vec::with_capacity(ghz_rounds.len());
    for (round, state) in ghz_rounds.iter().enumerate() {
        let mut round_rng = rng.child_indexed("round", round as u64);
        let sites: Vec<usize> = (0..n).collect();
        let (outcome, _) = state.measure(&sites, Basis::Diagonal, &mut round_rng)?;
        let mut bits: Vec<u8> = outcome.values.iter().map(|&v| v as u8).collect();
        let mut noise_rng = round_rng.child("noise");
        for bit in bits.iter_mut() {
            if noise_rng.flip(config.noise_p) {
                *bit ^= 1;
            }
        }
        outcomes.push(bits);
    }

    let m = config.rounds / 2;
    let mut position_rng = rng.child("check-positions");
    let check_positions = position_rng.choose_distinct(ghz_rounds.len(), m);
    let index_bits = usize::BITS as usize - (ghz_rounds.len() - 1).leading_zeros() as usize;
    bus.broadcast(
        "step6-check-positions",
        party_name(config.leader),
        m * index_bits,
    );

    let effective = |positions: &[usize], group: usize| -> BitString {
        BitString(
            positions
                .iter()
                .map(|&round| {
                    outcomes[round]
                        .iter()
                        .enumerate()
                        .filter(|&(party, _)| group_of(config, party) == group)
                        .fold(false, |acc, (_, &bit)| acc ^ (bit == 1))
                })
                .collect(),
        )
    };

    let check_a = effective(&check_positions, 0);
    let check_b = effective(&check_positions, 1);
    bus.broadcast("step7-effective-check", party_name(0), m);
    bus.broadcast(
        "step7-effective-check",
        party_name(config.group_split.0),
        m,
    );
    let delta = check_a.hamming_distance(&check_b);
    let proceed = (delta as f64) <= config.abort_threshold * m as f64;

    let noncheck_positions: Vec<usize> = (0..ghz_rounds.len())
        .filter(|r| !check_positions.contains(r))
        .collect();
    let noncheck_a = effective(&noncheck_positions, 0);
    let noncheck_b = effective(&noncheck_positions, 1);

    Ok(SiftOutcome {
        outcomes,
        check_positions,
        effective_check: (check_a, check_b),
        delta,
        effective_noncheck: (noncheck_a, noncheck_b),
        proceed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkd::formulas::effective_error_probability;

    fn ghz_rounds(n: usize, rounds: usize) -> Vec<QuditRegister> {
        (0..rounds).map(|_| QuditRegister::ghz(n)).collect()
    }

    #[test]
    fn noiseless_rounds_agree_exactly() {
        let config = ProtocolConfig::default();
        let rng = RngStream::from_seed(13);
        let mut bus = MessageBus::new();
        let sift =
            measure_and_sift(&ghz_rounds(config.n, config.rounds), &config, &rng, &mut bus)
                .unwrap();
        assert_eq!(sift.delta, 0);
        assert!(sift.proceed);
        assert_eq!(sift.effective_check.0, sift.effective_check.1);
        assert_eq!(sift.effective_noncheck.0, sift.effective_noncheck.1);
        assert_eq!(sift.check_positions.len(), config.rounds / 2);
        // Parity law: every round XORs to zero.
        for round in &sift.outcomes {
            assert_eq!(round.iter().fold(0u8, |a, &b| a ^ b), 0);
        }
    }

    #[test]
    fn forced_flip_breaks_one_round() {
        let config = ProtocolConfig::default();
        let rng = RngStream::from_seed(13);
        let mut bus = MessageBus::new();
        let mut sift =
            measure_and_sift(&ghz_rounds(config.n, config.rounds), &config, &rng, &mut bus)
                .unwrap();
        // Flip one party's bit in the first check round by hand.
        let round = sift.check_positions[0];
        sift.outcomes[round][0] ^= 1;
        let group_bit = |group: usize| {
            sift.outcomes[round]
                .iter()
                .enumerate()
                .filter(|&(party, _)| group_of(&config, party) == group)
                .fold(false, |acc, (_, &bit)| acc ^ (bit == 1))
        };
        assert_ne!(group_bit(0), group_bit(1));
    }

    #[test]
    fn noisy_mismatch_rate_matches_the_composed_formula() {
        // Groups of size 2 with p = 0.1: each group's effective bit is wrong
        // with P(2, 0.1) = 0.18; the strings disagree when exactly one group
        // is wrong, and the round parity already ties the groups together,
        // which composes to P(4, 0.1).
        let mut config = ProtocolConfig::default();
        config.noise_p = 0.1;
        config.rounds = 500;
        config.abort_threshold = 0.999;
        let mut mismatches = 0usize;
        let mut total = 0usize;
        for seed in 0..40 {
            let rng = RngStream::from_seed(seed);
            let mut bus = MessageBus::new();
            let sift =
                measure_and_sift(&ghz_rounds(config.n, config.rounds), &config, &rng, &mut bus)
                    .unwrap();
            mismatches += sift.delta
                + sift
                    .effective_noncheck
                    .0
                    .hamming_distance(&sift.effective_noncheck.1);
            total += config.rounds;
        }
        let rate = mismatches as f64 / total as f64;
        let expect = effective_error_probability(4, 0.1);
        let sigma = (expect * (1.0 - expect) / total as f64).sqrt();
        assert!(
            (rate - expect).abs() < 4.0 * sigma,
            "rate {rate}, expected {expect} (sigma {sigma})"
        );
    }
}
