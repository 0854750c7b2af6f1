//! Two-group key distribution over a spanning EPR tree.
//!
//! Two mutually trusting groups, sizes k and n−k, agree on a key even though
//! members across (and within) groups hold only single qubits. The run:
//!
//! 1. EPR pairs are created along the n−1 tree edges and verified by
//!    sampling; an edge whose error estimate exceeds the abort threshold
//!    kills the run.
//! 2. Surviving singlets become triplets (the second party applies XZ).
//! 3. Each second party notifies the leader.
//! 4. The triplets are merged into one GHZ state per round by local
//!    operations and n−2 broadcast bits.
//! 5. Everyone measures in the diagonal basis; a clean round has even
//!    parity, so the two groups' XORed bits agree.
//! 6. The leader picks half the rounds as check rounds.
//! 7. The groups announce their effective check bits; too many mismatches
//!    abort the run.
//! 8. The effective non-check strings are reconciled through a linear code
//!    block by block, and the information bits become the shared key.

pub mod bus;
pub mod code;
pub mod epr;
pub mod formulas;
pub mod merge;
pub mod sift;

pub use bus::{BusEvent, MessageBus};
pub use code::{Decoded, LinearCode};
pub use epr::EdgeVerification;
pub use formulas::{
    binary_entropy, channel_capacity, effective_error_probability,
    effective_error_probability_closed,
};
pub use sift::SiftOutcome;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::schemes::BitString;
use serde::{Deserialize, Serialize};

/// Eavesdropper models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveAttack {
    /// Measure every qubit transiting the given tree edge in a random basis
    /// and forward the collapsed state.
    InterceptResend { edge: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconciliationMode {
    /// Each group independently decodes to the nearest codeword, as stated;
    /// only sound when both strings sit near one codeword.
    PaperLiteral,
    /// The first group announces its syndrome; the second aligns its string
    /// into that coset before both decode. The standard repair.
    Syndrome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Party count; parties are named P0..P(n−1).
    pub n: usize,
    /// Group sizes (k, n−k); parties 0..k form the first group.
    pub group_split: (usize, usize),
    /// Spanning tree edges. Pairs flow from the first endpoint to the
    /// second, so the second party applies the triplet conversion.
    pub tree: Vec<(usize, usize)>,
    /// The protocol leader (Lucy); may sit in either group.
    pub leader: usize,
    /// Total GHZ rounds 2m; half become check rounds.
    pub rounds: usize,
    /// Per-outcome flip probability of the classical noise model.
    pub noise_p: f64,
    pub eve: Option<EveAttack>,
    /// Abort when an edge error estimate, or δ/m, exceeds this.
    pub abort_threshold: f64,
    pub code: LinearCode,
    pub reconciliation: ReconciliationMode,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        let code = LinearCode::hamming_7_4();
        // ⌊(d−1)/2⌋ tolerated errors per block.
        let abort_threshold = code.correctable() as f64 / code.block_len() as f64;
        ProtocolConfig {
            n: 4,
            group_split: (2, 2),
            tree: vec![(0, 1), (1, 2), (2, 3)],
            leader: 0,
            rounds: 32,
            noise_p: 0.0,
            eve: None,
            abort_threshold,
            code,
            reconciliation: ReconciliationMode::Syndrome,
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    /// A default configuration resized to n parties on a chain.
    pub fn chain(n: usize, first_group: usize) -> Self {
        ProtocolConfig {
            n,
            group_split: (first_group, n - first_group),
            tree: (0..n - 1).map(|i| (i, i + 1)).collect(),
            ..ProtocolConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return fail("need at least two parties".into());
        }
        if self.group_split.0 + self.group_split.1 != self.n
            || self.group_split.0 == 0
            || self.group_split.1 == 0
        {
            return fail(format!(
                "group split {:?} does not partition {} parties",
                self.group_split, self.n
            ));
        }
        if self.tree.len() + 1 != self.n {
            return fail(format!(
                "a spanning tree over {} parties has {} edges",
                self.n,
                self.n - 1
            ));
        }
        if self.tree.iter().any(|&(u, v)| u >= self.n || v >= self.n || u == v) {
            return fail("tree edge out of range".into());
        }
        merge::bfs_edge_order(&self.tree, self.leader, self.n)?;
        if self.leader >= self.n {
            return fail("leader out of range".into());
        }
        if self.rounds == 0 || self.rounds % 2 != 0 {
            return fail("rounds must be even and positive".into());
        }
        if !(0.0..0.5).contains(&self.noise_p) {
            return fail(format!("noise_p {} outside [0, 0.5)", self.noise_p));
        }
        if !(0.0..1.0).contains(&self.abort_threshold) || self.abort_threshold <= 0.0 {
            return fail(format!(
                "abort threshold {} outside (0, 1)",
                self.abort_threshold
            ));
        }
        if let Some(EveAttack::InterceptResend { edge }) = self.eve {
            if edge >= self.tree.len() {
                return fail(format!("eve edge {edge} out of range"));
            }
        }
        Ok(())
    }
}

/// Where a run ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Decision {
    Proceed,
    Abort { step: usize, reason: String },
}

/// The final keys, one per group, as information-bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyResult {
    pub key_a: BitString,
    pub key_b: BitString,
    pub agreed: bool,
    /// Set when some block's correction exceeded the code guarantee.
    pub detected_failure: bool,
}

/// Full record of one protocol run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub config: ProtocolConfig,
    pub edge_stats: Vec<EdgeVerification>,
    pub decision: Decision,
    /// Per-round, per-party diagonal bits (absent after a step-1 abort).
    pub outcomes: Vec<Vec<u8>>,
    pub check_positions: Vec<usize>,
    pub effective_check: Option<(BitString, BitString)>,
    pub delta: usize,
    pub effective_noncheck: Option<(BitString, BitString)>,
    pub key_result: Option<KeyResult>,
    pub bus: MessageBus,
}

impl ProtocolTranscript {
    /// δ/m, the observed effective mismatch fraction.
    pub fn delta_fraction(&self) -> f64 {
        let m = self.config.rounds / 2;
        self.delta as f64 / m as f64
    }

    /// Final key bits per GHZ round consumed.
    pub fn key_rate(&self) -> f64 {
        match &self.key_result {
            Some(k) if k.agreed => k.key_a.len() as f64 / self.config.rounds as f64,
            _ => 0.0,
        }
    }
}

/// Step (8): reconcile the two effective non-check strings into keys, block
/// by block (trailing bits beyond the last whole block are discarded).
pub fn reconcile_and_key(
    noncheck_a: &BitString,
    noncheck_b: &BitString,
    code: &LinearCode,
    mode: ReconciliationMode,
    bus: &mut MessageBus,
) -> Result<KeyResult> {
    let m = code.block_len();
    let blocks = noncheck_a.len() / m;
    if blocks == 0 {
        return Err(Error::DecodingFailure(format!(
            "non-check string of {} bits is shorter than one {m}-bit block",
            noncheck_a.len()
        )));
    }
    let mut key_a = Vec::new();
    let mut key_b = Vec::new();
    let mut detected_failure = false;
    for block in 0..blocks {
        let a = &noncheck_a.0[block * m..(block + 1) * m];
        let b = &noncheck_b.0[block * m..(block + 1) * m];
        match mode {
            ReconciliationMode::PaperLiteral => {
                let da = code.decode_nearest(a)?;
                let db = code.decode_nearest(b)?;
                detected_failure |= da.detected_failure || db.detected_failure;
                key_a.extend(da.info);
                key_b.extend(db.info);
            }
            ReconciliationMode::Syndrome => {
                let syndrome = code.syndrome(a)?;
                bus.broadcast("step8-syndrome", "group1".into(), syndrome.len());
                let da = code.decode_nearest(a)?;
                let db = code.decode_to_coset(b, &syndrome)?;
                detected_failure |= db.detected_failure;
                key_a.extend(da.info);
                key_b.extend(db.info);
            }
        }
    }
    let key_a = BitString(key_a);
    let key_b = BitString(key_b);
    let agreed = key_a == key_b;
    Ok(KeyResult {
        key_a,
        key_b,
        agreed,
        detected_failure,
    })
}

/// Run the whole protocol, deterministic under the config seed.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    config.validate()?;
    let rng = RngStream::from_seed(config.seed).child("qkd");
    let mut bus = MessageBus::new();

    // Step (1): EPR distribution with sampling verification.
    let epr = epr::distribute_epr(config, &rng.child("epr"), &mut bus)?;
    if let Some(edge) = epr.failed_edge {
        let stat = &epr.stats[edge];
        return Ok(ProtocolTranscript {
            config: config.clone(),
            decision: Decision::Abort {
                step: 1,
                reason: format!(
                    "edge {:?} error estimate {:.3} exceeds threshold {:.3}",
                    stat.edge, stat.estimated_error, config.abort_threshold
                ),
            },
            edge_stats: epr.stats,
            outcomes: Vec::new(),
            check_positions: Vec::new(),
            effective_check: None,
            delta: 0,
            effective_noncheck: None,
            key_result: None,
            bus,
        });
    }

    // Steps (2) and (3): triplet conversion and completion notices.
    let triplets = epr::convert_to_triplets(epr.pairs, config, &mut bus)?;

    // Step (4): merge one GHZ instance per round.
    let merge_rng = rng.child("merge");
    let mut ghz_rounds = Vec::with_capacity(config.rounds);
    for round in 0..config.rounds {
        let round_pairs: Vec<_> = triplets.iter().map(|edge| edge[round].clone()).collect();
        let mut round_rng = merge_rng.child_indexed("round", round as u64);
        ghz_rounds.push(merge::merge_to_ghz(
            &round_pairs,
            &config.tree,
            config.leader,
            config.n,
            &mut round_rng,
            &mut bus,
        )?);
    }

    // Steps (5)-(7): measurement, sifting, abort decision.
    let sift = sift::measure_and_sift(&ghz_rounds, config, &rng.child("sift"), &mut bus)?;
    if !sift.proceed {
        let m = config.rounds / 2;
        return Ok(ProtocolTranscript {
            config: config.clone(),
            decision: Decision::Abort {
                step: 7,
                reason: format!(
                    "delta {}/{m} exceeds threshold {:.3}",
                    sift.delta, config.abort_threshold
                ),
            },
            edge_stats: epr.stats,
            outcomes: sift.outcomes,
            check_positions: sift.check_positions,
            effective_check: Some(sift.effective_check),
            delta: sift.delta,
            effective_noncheck: Some(sift.effective_noncheck),
            key_result: None,
            bus,
        });
    }

    // Step (8): reconciliation.
    let key_result = reconcile_and_key(
        &sift.effective_noncheck.0,
        &sift.effective_noncheck.1,
        &config.code,
        config.reconciliation,
        &mut bus,
    )?;

    Ok(ProtocolTranscript {
        config: config.clone(),
        decision: Decision::Proceed,
        edge_stats: epr.stats,
        outcomes: sift.outcomes,
        check_positions: sift.check_positions,
        effective_check: Some(sift.effective_check),
        delta: sift.delta,
        effective_noncheck: Some(sift.effective_noncheck),
        key_result: Some(key_result),
        bus,
    })
}
