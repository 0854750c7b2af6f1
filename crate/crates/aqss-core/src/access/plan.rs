//! Share plans: nested threshold schemes realizing an access structure with
//! dealer home shares.
//!
//! The construction: partition the authorized sets into λ partial-link
//! classes. For λ > 1, an outer ((λ, 2λ−1)) majority scheme assigns one share
//! to each class and keeps the remaining λ−1 shares as dealer home shares.
//! Each class share is then re-shared within the class: a class that is
//! exactly a threshold structure becomes a single ((k, n)) node; otherwise
//! each authorized set becomes a ((|α|, |α|)) node under a ((r, 2r−1))
//! OR-replacement whose r−1 surplus sub-shares go to a designated common
//! player of the class (strict mode) or to the dealer (dealer-assisted mode).

use crate::access::{
    maximalize, AccessStructure, AsGraph, CliquePartition, PlayerId, PlayerSet,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Who holds a leaf share.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Owner {
    Player(PlayerId),
    Dealer,
}

impl Owner {
    pub fn is_dealer(&self) -> bool {
        matches!(self, Owner::Dealer)
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Player(p) => f.write_str(p.as_str()),
            Owner::Dealer => f.write_str("dealer"),
        }
    }
}

impl Serialize for Owner {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Owner {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        if raw == "dealer" {
            Ok(Owner::Dealer)
        } else {
            Ok(Owner::Player(PlayerId::new(raw)))
        }
    }
}

/// A node of a share plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlanNode {
    Leaf {
        owner: Owner,
    },
    Threshold {
        k: usize,
        n: usize,
        children: Vec<PlanNode>,
    },
}

impl PlanNode {
    fn leaf(owner: Owner) -> Self {
        PlanNode::Leaf { owner }
    }

    fn threshold(k: usize, children: Vec<PlanNode>) -> Self {
        PlanNode::Threshold {
            k,
            n: children.len(),
            children,
        }
    }

    /// Validate the structural invariants: each threshold has exactly `n`
    /// children with 1 ≤ k ≤ n ≤ 2k−1 (quantum realizability).
    pub fn validate(&self) -> Result<()> {
        match self {
            PlanNode::Leaf { .. } => Ok(()),
            PlanNode::Threshold { k, n, children } => {
                if children.len() != *n {
                    return Err(Error::InvalidParams(format!(
                        "threshold node declares n={n} but has {} children",
                        children.len()
                    )));
                }
                if *k < 1 || k > n || *n > 2 * k - 1 {
                    return Err(Error::InvalidParams(format!(
                        "threshold node (({k},{n})) violates 1 <= k <= n <= 2k-1"
                    )));
                }
                children.iter().try_for_each(PlanNode::validate)
            }
        }
    }

    /// All leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&Owner> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Owner>) {
        match self {
            PlanNode::Leaf { owner } => out.push(owner),
            PlanNode::Threshold { children, .. } => {
                children.iter().for_each(|c| c.collect_leaves(out))
            }
        }
    }

    fn satisfied(&self, players: &PlayerSet, dealer: bool, granted: &BTreeSet<usize>, next_dealer_leaf: &mut usize) -> bool {
        match self {
            PlanNode::Leaf { owner } => match owner {
                Owner::Player(p) => players.contains(p),
                Owner::Dealer => {
                    let index = *next_dealer_leaf;
                    *next_dealer_leaf += 1;
                    dealer || granted.contains(&index)
                }
            },
            PlanNode::Threshold { k, children, .. } => {
                let mut hits = 0;
                for child in children {
                    // Walk every child so dealer-leaf numbering stays stable.
                    if child.satisfied(players, dealer, granted, next_dealer_leaf) {
                        hits += 1;
                    }
                }
                hits >= *k
            }
        }
    }
}

/// Extra-share routing policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    /// Surplus OR-replacement sub-shares go to a common player of the class;
    /// fails if a non-threshold class has no common player. Home shares are
    /// exactly λ−1.
    Strict,
    /// Surplus sub-shares fall back to the dealer when a class has no common
    /// player; home shares may then exceed λ−1.
    DealerAssisted,
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanMode::Strict => f.write_str("strict"),
            PlanMode::DealerAssisted => f.write_str("dealer-assisted"),
        }
    }
}

/// A tree of nested threshold schemes with dealer home shares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharePlan {
    pub root: PlanNode,
    pub mode: PlanMode,
    /// Number of dealer-owned leaves.
    pub home_share_count: usize,
    /// The partial-link classification number of the source structure.
    pub lambda: usize,
}

impl SharePlan {
    /// Dealer leaves in depth-first order; positions index into grant sets.
    pub fn dealer_leaf_count(&self) -> usize {
        self.root.leaves().iter().filter(|o| o.is_dealer()).count()
    }

    /// Dealer leaves that are direct children of the root.
    pub fn outer_dealer_leaf_count(&self) -> usize {
        match &self.root {
            PlanNode::Leaf { owner } => usize::from(owner.is_dealer()),
            PlanNode::Threshold { children, .. } => children
                .iter()
                .filter(|c| matches!(c, PlanNode::Leaf { owner } if owner.is_dealer()))
                .count(),
        }
    }
}

/// A reconstruction coalition: a set of players, optionally joined by the
/// dealer (who then contributes every home share).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coalition {
    pub players: PlayerSet,
    pub dealer: bool,
}

impl Coalition {
    pub fn of_players(players: impl IntoIterator<Item = PlayerId>) -> Self {
        Coalition {
            players: players.into_iter().collect(),
            dealer: false,
        }
    }

    pub fn with_dealer(mut self) -> Self {
        self.dealer = true;
        self
    }

    /// Parse a comma-separated member list; the token `dealer` joins the
    /// dealer.
    pub fn parse(text: &str) -> Result<Self> {
        let mut coalition = Coalition::default();
        for token in text.split(',') {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            if token.eq_ignore_ascii_case("dealer") {
                coalition.dealer = true;
            } else {
                coalition.players.insert(PlayerId::new(token));
            }
        }
        Ok(coalition)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.players.iter().map(|p| p.0.clone()).collect();
        if self.dealer {
            parts.push("dealer".into());
        }
        f.write_str(&parts.join(","))
    }
}

/// True iff the coalition satisfies the plan: a leaf is satisfied when its
/// owner is present, a ((k,n)) node when at least k children are satisfied.
pub fn evaluate_coalition(plan: &SharePlan, coalition: &Coalition) -> bool {
    let mut counter = 0;
    plan.root
        .satisfied(&coalition.players, coalition.dealer, &BTreeSet::new(), &mut counter)
}

/// Like [`evaluate_coalition`] with individual dealer leaves granted by
/// depth-first index, used for the important-share analysis.
pub fn evaluate_with_grants(
    plan: &SharePlan,
    players: &PlayerSet,
    granted_dealer_leaves: &BTreeSet<usize>,
) -> bool {
    let mut counter = 0;
    plan.root
        .satisfied(players, false, granted_dealer_leaves, &mut counter)
}

/// Build the share plan for Γ.
pub fn build_aqss_plan(gamma: &AccessStructure, mode: PlanMode) -> Result<SharePlan> {
    let graph = AsGraph::from_structure(gamma)?;
    let partition = crate::access::min_clique_partition(&graph)?;
    build_plan_from_partition(gamma, &partition, mode)
}

/// Build the plan from a precomputed partition (exact or heuristic).
pub fn build_plan_from_partition(
    gamma: &AccessStructure,
    partition: &CliquePartition,
    mode: PlanMode,
) -> Result<SharePlan> {
    let sets = gamma.sets();
    let lambda = partition.size();
    let mut extra_dealer_shares = 0;

    let mut class_subtrees = Vec::with_capacity(lambda);
    for class in &partition.classes {
        let class_sets: Vec<&PlayerSet> = class.iter().map(|&v| &sets[v]).collect();
        class_subtrees.push(build_class_subtree(
            &class_sets,
            mode,
            &mut extra_dealer_shares,
        )?);
    }

    let (root, home_share_count) = if lambda == 1 {
        let root = class_subtrees.pop().expect("one class");
        (root, extra_dealer_shares)
    } else {
        let mut children = class_subtrees;
        for _ in 0..lambda - 1 {
            children.push(PlanNode::leaf(Owner::Dealer));
        }
        (
            PlanNode::threshold(lambda, children),
            lambda - 1 + extra_dealer_shares,
        )
    };
    root.validate()?;
    Ok(SharePlan {
        root,
        mode,
        home_share_count,
        lambda,
    })
}

fn build_class_subtree(
    class_sets: &[&PlayerSet],
    mode: PlanMode,
    extra_dealer_shares: &mut usize,
) -> Result<PlanNode> {
    if let Some((k, roster)) = threshold_shape(class_sets) {
        return Ok(if roster.len() == 1 {
            PlanNode::leaf(Owner::Player(roster[0].clone()))
        } else {
            let leaves = roster
                .iter()
                .map(|p| PlanNode::leaf(Owner::Player(p.clone())))
                .collect();
            PlanNode::threshold(k, leaves)
        });
    }

    // General class: ((r, 2r−1)) over the per-set AND nodes plus r−1 extras.
    let r = class_sets.len();
    let common: Vec<&PlayerId> = class_sets[0]
        .iter()
        .filter(|p| class_sets.iter().all(|s| s.contains(*p)))
        .collect();
    let extra_owner = match common.first() {
        Some(p) => Owner::Player((*p).clone()),
        None if mode == PlanMode::DealerAssisted => Owner::Dealer,
        None => {
            let label = class_sets
                .iter()
                .map(|s| super::set_label(s))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::NoCommonPlayer { class: label });
        }
    };
    if extra_owner.is_dealer() {
        *extra_dealer_shares += r - 1;
    }

    let mut children: Vec<PlanNode> = class_sets
        .iter()
        .map(|s| {
            if s.len() == 1 {
                PlanNode::leaf(Owner::Player(s.iter().next().unwrap().clone()))
            } else {
                let leaves = s
                    .iter()
                    .map(|p| PlanNode::leaf(Owner::Player(p.clone())))
                    .collect();
                PlanNode::threshold(s.len(), leaves)
            }
        })
        .collect();
    for _ in 0..r - 1 {
        children.push(PlanNode::leaf(extra_owner.clone()));
    }
    Ok(PlanNode::threshold(r, children))
}

/// If the class is exactly the family of all k-subsets of its roster, return
/// (k, roster). Single sets are the k = |α| case.
fn threshold_shape(class_sets: &[&PlayerSet]) -> Option<(usize, Vec<PlayerId>)> {
    let k = class_sets[0].len();
    if class_sets.iter().any(|s| s.len() != k) {
        return None;
    }
    let roster: BTreeSet<PlayerId> = class_sets.iter().flat_map(|s| s.iter().cloned()).collect();
    let n = roster.len();
    if k > n {
        return None;
    }
    let mut expected: u128 = 1;
    for i in 0..k.min(n - k) {
        expected = expected * (n - i) as u128 / (i + 1) as u128;
    }
    if class_sets.len() as u128 == expected {
        // Distinct size-k subsets with the right count are all of them.
        // Pairwise overlap inside a clique class already forces n <= 2k-1.
        Some((k, roster.into_iter().collect()))
    } else {
        None
    }
}

/// Importance of one dealer leaf: whether adding just that share to some
/// unauthorized player set satisfies the plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeShareImportance {
    /// Depth-first index among the plan's dealer leaves.
    pub leaf_index: usize,
    pub important: bool,
    /// Lexicographically least unauthorized witness set, when important.
    pub witness: Option<Vec<PlayerId>>,
}

/// Home-share accounting for Γ, comparing three constructions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeShareReport {
    /// r + (r−1)·x: add a common player X to every set and count its shares
    /// in the resulting maximal structure.
    pub naive_count: usize,
    /// r: a pure-state scheme for the maximalized structure, keeping only
    /// X's shares.
    pub pure_state_count: usize,
    /// λ−1: the share-plan construction.
    pub theorem_count: usize,
    /// Occurrences of the added common player in the maximalized structure.
    pub x: usize,
    pub lambda: usize,
    pub set_count: usize,
    /// The maximalized common-player structure behind `x` (the choice of
    /// maximal structure is not unique; this is the canonical greedy one).
    pub maximalized: AccessStructure,
    /// Per-dealer-leaf importance for the built plan; `None` when the player
    /// universe is too large to enumerate.
    pub importance: Option<Vec<HomeShareImportance>>,
    /// Mode of the plan used for the importance analysis.
    pub plan_mode: PlanMode,
}

/// Universe-size limit for the importance enumeration.
const MAX_IMPORTANCE_PLAYERS: usize = 16;

pub fn home_share_analytics(gamma: &AccessStructure) -> Result<HomeShareReport> {
    let r = gamma.set_count();
    let graph = AsGraph::from_structure(gamma)?;
    let lambda = crate::access::min_clique_partition(&graph)?.size();

    // Common-player construction: Γ' = {α ∪ {X}} over the universe plus X.
    let x_name = fresh_player_name(gamma);
    let x_player = PlayerId::new(x_name);
    let mut universe = gamma.players().to_vec();
    universe.push(x_player.clone());
    let primed_sets: Vec<PlayerSet> = gamma
        .sets()
        .into_iter()
        .map(|mut s| {
            s.insert(x_player.clone());
            s
        })
        .collect();
    let primed = AccessStructure::new(universe, primed_sets)?;
    let maximalized = maximalize(&primed)?;
    let x = maximalized
        .sets()
        .iter()
        .filter(|s| s.contains(&x_player))
        .count();

    let (plan, plan_mode) = match build_aqss_plan(gamma, PlanMode::Strict) {
        Ok(plan) => (plan, PlanMode::Strict),
        Err(Error::NoCommonPlayer { .. }) => (
            build_aqss_plan(gamma, PlanMode::DealerAssisted)?,
            PlanMode::DealerAssisted,
        ),
        Err(e) => return Err(e),
    };
    let importance = if gamma.players().len() <= MAX_IMPORTANCE_PLAYERS {
        Some(importance_of_home_shares(gamma, &plan))
    } else {
        None
    };

    Ok(HomeShareReport {
        naive_count: r + (r - 1) * x,
        pure_state_count: r,
        theorem_count: lambda - 1,
        x,
        lambda,
        set_count: r,
        maximalized,
        importance,
        plan_mode,
    })
}

fn fresh_player_name(gamma: &AccessStructure) -> String {
    let taken: BTreeSet<&str> = gamma.players().iter().map(PlayerId::as_str).collect();
    if !taken.contains("X") {
        return "X".into();
    }
    (1..)
        .map(|i| format!("X{i}"))
        .find(|name| !taken.contains(name.as_str()))
        .unwrap()
}

/// For each dealer leaf q, search for a player set T that cannot satisfy the
/// plan on its own but does once that single share is granted.
pub fn importance_of_home_shares(
    gamma: &AccessStructure,
    plan: &SharePlan,
) -> Vec<HomeShareImportance> {
    let players = gamma.players().to_vec();
    let n = players.len();
    let dealer_leaves = plan.dealer_leaf_count();

    // Candidate subsets in canonical order (size, then lexicographic).
    let candidates = crate::access::subset_masks_canonical(n, true);
    let none = BTreeSet::new();

    (0..dealer_leaves)
        .map(|leaf_index| {
            let granted: BTreeSet<usize> = [leaf_index].into();
            let witness = candidates.iter().find_map(|&mask| {
                let subset: PlayerSet = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| players[i].clone())
                    .collect();
                if evaluate_with_grants(plan, &subset, &none) {
                    return None;
                }
                evaluate_with_grants(plan, &subset, &granted)
                    .then(|| subset.into_iter().collect::<Vec<_>>())
            });
            HomeShareImportance {
                leaf_index,
                important: witness.is_some(),
                witness,
            }
        })
        .collect()
}
