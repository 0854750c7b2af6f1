//! Access structures: parsing, canonicalization, the no-cloning overlap
//! check, and maximalization.
//!
//! An access structure Γ is a monotone family of authorized player sets. It
//! is stored in canonical form: only the minimal authorized sets are kept
//! (a superset of an authorized set is implicitly authorized), players are
//! sorted, and sets are sorted lexicographically, so all downstream analysis
//! is deterministic.

mod graph;
mod plan;

pub use graph::{
    min_clique_partition, min_clique_partition_with, AsGraph, CliquePartition, PartitionMode,
    DEFAULT_MAX_EXACT, MAX_GRAPH_VERTICES,
};
pub use plan::{
    build_aqss_plan, evaluate_coalition, home_share_analytics, Coalition, HomeShareImportance,
    HomeShareReport, Owner, PlanMode, PlanNode, SharePlan,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A player name. Single uppercase letters in the compact text format,
/// arbitrary non-empty tokens in the JSON format. The token `dealer` is
/// reserved for the share dealer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub String);

impl PlayerId {
    pub fn new(name: impl Into<String>) -> Self {
        PlayerId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A set of players, kept sorted.
pub type PlayerSet = BTreeSet<PlayerId>;

pub(crate) fn set_label(set: &PlayerSet) -> String {
    set.iter()
        .map(PlayerId::as_str)
        .collect::<Vec<_>>()
        .join(",")
}

/// All subsets of `0..n` as bitmasks, in canonical order: by size, then
/// lexicographically on the sorted member list.
pub(crate) fn subset_masks_canonical(n: usize, include_empty: bool) -> Vec<u64> {
    assert!(n <= 24, "subset enumeration capped at 24 elements");
    let start = u64::from(!include_empty);
    let mut masks: Vec<u64> = (start..(1u64 << n)).collect();
    // Lexicographic order on member lists equals descending order on the
    // bit-reversed mask.
    masks.sort_by_key(|m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits() >> (64 - n))));
    masks
}

/// A canonical access structure: a player universe plus the minimal
/// authorized sets, both deterministically ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessStructure {
    players: Vec<PlayerId>,
    sets: Vec<Vec<PlayerId>>,
}

impl AccessStructure {
    /// Build and canonicalize from a player universe and authorized sets.
    ///
    /// Non-minimal sets are absorbed by monotonicity, duplicates are removed,
    /// and everything is sorted. The universe may declare players that appear
    /// in no authorized set; every player named in a set must be declared.
    pub fn new(
        players: impl IntoIterator<Item = PlayerId>,
        sets: impl IntoIterator<Item = PlayerSet>,
    ) -> Result<Self> {
        let universe: BTreeSet<PlayerId> = players.into_iter().collect();
        let raw: Vec<PlayerSet> = sets.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::EmptyStructure);
        }
        for set in &raw {
            if set.is_empty() {
                return Err(Error::EmptySet);
            }
            for p in set {
                if p.0.eq_ignore_ascii_case("dealer") {
                    return Err(Error::InvalidParams(
                        "player name \"dealer\" is reserved".into(),
                    ));
                }
                if !universe.contains(p) {
                    return Err(Error::UnknownPlayer(p.0.clone()));
                }
            }
        }
        // Keep only minimal sets.
        let mut minimal: Vec<PlayerSet> = Vec::new();
        for set in &raw {
            if raw
                .iter()
                .any(|other| other.is_subset(set) && other.len() < set.len())
            {
                continue;
            }
            if !minimal.contains(set) {
                minimal.push(set.clone());
            }
        }
        let mut sets: Vec<Vec<PlayerId>> = minimal
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        sets.sort();
        Ok(AccessStructure {
            players: universe.into_iter().collect(),
            sets,
        })
    }

    /// Build from sets alone; the universe is the union of the sets.
    pub fn from_sets(sets: impl IntoIterator<Item = PlayerSet>) -> Result<Self> {
        let sets: Vec<PlayerSet> = sets.into_iter().collect();
        let universe: BTreeSet<PlayerId> = sets.iter().flatten().cloned().collect();
        AccessStructure::new(universe, sets)
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    /// The minimal authorized sets, in canonical order.
    pub fn sets(&self) -> Vec<PlayerSet> {
        self.sets
            .iter()
            .map(|s| s.iter().cloned().collect())
            .collect()
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    /// True iff `coalition` contains some authorized set.
    pub fn is_authorized(&self, coalition: &PlayerSet) -> bool {
        self.sets()
            .iter()
            .any(|alpha| alpha.is_subset(coalition))
    }

    /// The no-cloning constraint: every pair of authorized sets overlaps.
    pub fn check_no_cloning(&self) -> bool {
        let sets = self.sets();
        for (j, a) in sets.iter().enumerate() {
            for b in sets.iter().skip(j + 1) {
                if a.is_disjoint(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Compact text rendering, e.g. `{ABC, BD, EFG}`.
    pub fn to_compact(&self) -> String {
        let body = self
            .sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(PlayerId::as_str)
                    .collect::<Vec<_>>()
                    .concat()
            })
            .collect::<Vec<_>>()
            .join(", ");
        format!("{{{body}}}")
    }
}

/// Parse an access structure from either the compact text format
/// `{ABC, BD, EFG}` (single uppercase letters per player) or the JSON format
/// `{"players": [...], "sets": [[...], ...]}`.
pub fn parse_access_structure(text: &str) -> Result<AccessStructure> {
    let trimmed = text.trim();
    if trimmed.contains('"') {
        parse_json(trimmed)
    } else {
        parse_compact(trimmed)
    }
}

#[derive(Deserialize)]
struct JsonStructure {
    #[serde(default)]
    players: Option<Vec<String>>,
    sets: Vec<Vec<String>>,
}

fn parse_json(text: &str) -> Result<AccessStructure> {
    let parsed: JsonStructure = serde_json::from_str(text).map_err(|e| Error::Parse {
        position: e.column().saturating_sub(1),
        message: e.to_string(),
    })?;
    let sets: Vec<PlayerSet> = parsed
        .sets
        .iter()
        .map(|s| s.iter().map(PlayerId::new).collect())
        .collect();
    match parsed.players {
        Some(players) => AccessStructure::new(players.into_iter().map(PlayerId::new), sets),
        None => AccessStructure::from_sets(sets),
    }
}

fn parse_compact(text: &str) -> Result<AccessStructure> {
    let bytes = text.as_bytes();
    let err = |position: usize, message: &str| Error::Parse {
        position,
        message: message.into(),
    };
    if bytes.is_empty() || bytes[0] != b'{' {
        return Err(err(0, "expected '{'"));
    }
    if bytes[bytes.len() - 1] != b'}' {
        return Err(err(bytes.len().saturating_sub(1), "expected '}'"));
    }
    let inner = &text[1..text.len() - 1];
    if inner.trim().is_empty() {
        return Err(Error::EmptyStructure);
    }
    let mut sets: Vec<PlayerSet> = Vec::new();
    let mut offset = 1;
    for piece in inner.split(',') {
        let token = piece.trim();
        if token.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut set = PlayerSet::new();
        for (i, ch) in token.char_indices() {
            if !ch.is_ascii_uppercase() {
                let base = offset + (piece.len() - piece.trim_start().len());
                return Err(err(base + i, "expected an uppercase letter"));
            }
            set.insert(PlayerId::new(ch.to_string()));
        }
        sets.push(set);
        offset += piece.len() + 1;
    }
    AccessStructure::from_sets(sets)
}

/// Maximum universe size accepted by [`maximalize`]; the fixpoint enumeration
/// walks every subset of the universe.
pub const MAX_MAXIMALIZE_PLAYERS: usize = 24;

/// Extend Γ to a maximal structure Γ_max in which the complement of every
/// unauthorized set is authorized.
///
/// The input must satisfy the no-cloning constraint, otherwise no such
/// extension exists. Γ_max is not unique; this routine is deterministic: it
/// scans candidate sets in canonical order (by size, then lexicographically)
/// and adds any candidate that is unauthorized with an unauthorized
/// complement. Such a candidate always intersects every currently authorized
/// set, so the no-cloning constraint is preserved at each step.
pub fn maximalize(gamma: &AccessStructure) -> Result<AccessStructure> {
    let sets = gamma.sets();
    for (j, a) in sets.iter().enumerate() {
        for b in sets.iter().skip(j + 1) {
            if a.is_disjoint(b) {
                return Err(Error::NoCloning(set_label(a), set_label(b)));
            }
        }
    }
    let players = gamma.players().to_vec();
    let n = players.len();
    if n > MAX_MAXIMALIZE_PLAYERS {
        return Err(Error::TooLarge(format!(
            "maximalize enumerates all subsets of the universe; {n} players exceeds the \
             {MAX_MAXIMALIZE_PLAYERS}-player limit"
        )));
    }

    // Candidate subsets in canonical order; bitmask bit i = players[i].
    let candidates = subset_masks_canonical(n, false);

    let mut minimal: Vec<u64> = sets
        .iter()
        .map(|s| {
            let mut mask = 0u64;
            for (i, p) in players.iter().enumerate() {
                if s.contains(p) {
                    mask |= 1 << i;
                }
            }
            mask
        })
        .collect();
    let full = (1u64 << n) - 1;
    let authorized = |minimal: &[u64], m: u64| minimal.iter().any(|&a| a & m == a);

    for &cand in &candidates {
        let comp = full & !cand;
        if !authorized(&minimal, cand) && !authorized(&minimal, comp) {
            minimal.retain(|&a| cand & a != cand);
            minimal.push(cand);
        }
    }

    let result_sets: Vec<PlayerSet> = minimal
        .iter()
        .map(|&m| {
            (0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| players[i].clone())
                .collect()
        })
        .collect();
    AccessStructure::new(players, result_sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma(text: &str) -> AccessStructure {
        parse_access_structure(text).unwrap()
    }

    #[test]
    fn parses_the_worked_example() {
        let g = gamma("{ABC, BD, EFG}");
        assert_eq!(g.to_compact(), "{ABC, BD, EFG}");
        assert_eq!(g.players().len(), 7);
    }

    #[test]
    fn superset_absorbed_by_monotonicity() {
        let g = gamma("{AB, ABC}");
        assert_eq!(g.to_compact(), "{AB}");
        // C stays in the universe even though no minimal set names it.
        assert_eq!(g.players().len(), 3);
    }

    #[test]
    fn empty_structure_is_an_error() {
        assert!(matches!(
            parse_access_structure("{}"),
            Err(Error::EmptyStructure)
        ));
    }

    #[test]
    fn empty_set_inside_is_an_error() {
        assert!(matches!(
            parse_access_structure("{AB,,C}"),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn lowercase_reports_position() {
        match parse_access_structure("{ABc}") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn json_format_with_declared_universe() {
        let g = parse_access_structure(r#"{"players":["alice","bob","carol"],"sets":[["alice","bob"]]}"#)
            .unwrap();
        assert_eq!(g.players().len(), 3);
        assert_eq!(g.set_count(), 1);
    }

    #[test]
    fn json_rejects_unknown_player() {
        let r = parse_access_structure(r#"{"players":["a"],"sets":[["a","b"]]}"#);
        assert!(matches!(r, Err(Error::UnknownPlayer(p)) if p == "b"));
    }

    #[test]
    fn dealer_name_is_reserved() {
        let r = parse_access_structure(r#"{"players":["dealer","b"],"sets":[["dealer","b"]]}"#);
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn no_cloning_examples() {
        assert!(gamma("{ABC, ADE, BDF}").check_no_cloning());
        assert!(!gamma("{AB, CD}").check_no_cloning());
        assert!(!gamma("{ABC, BD, EFG}").check_no_cloning());
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let g = gamma("{BD, ABC, ABCD, EFG}");
        let again = AccessStructure::new(g.players().to_vec(), g.sets()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn maximalize_triangle_is_fixed() {
        let g = gamma("{AB, BC, AC}");
        let m = maximalize(&g).unwrap();
        assert_eq!(m, g);
    }

    #[test]
    fn maximalize_single_set_collapses_to_one_player() {
        // {ABC} is far from maximal; the canonical-order greedy adds {A}
        // first, which then absorbs ABC.
        let g = gamma("{ABC}");
        let m = maximalize(&g).unwrap();
        assert_eq!(m.to_compact(), "{A}");
    }

    #[test]
    fn maximalize_rejects_no_cloning_violation() {
        let g = gamma("{AB, CD}");
        assert!(matches!(maximalize(&g), Err(Error::NoCloning(_, _))));
    }

    #[test]
    fn maximalize_satisfies_the_fixpoint_definition() {
        for text in ["{AB}", "{ABC}", "{AB, BC, AC}", "{ABC, ADE, BDF}"] {
            let m = maximalize(&gamma(text)).unwrap();
            let players = m.players().to_vec();
            let n = players.len();
            for mask in 0u32..(1 << n) {
                let subset: PlayerSet = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| players[i].clone())
                    .collect();
                let comp: PlayerSet = players
                    .iter()
                    .filter(|p| !subset.contains(*p))
                    .cloned()
                    .collect();
                assert!(
                    m.is_authorized(&subset) || m.is_authorized(&comp),
                    "{text}: neither {subset:?} nor its complement is authorized"
                );
            }
            assert!(m.check_no_cloning());
        }
    }
}
