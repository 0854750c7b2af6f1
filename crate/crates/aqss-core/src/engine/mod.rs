//! Quantum execution of share plans: sharing, coalition reconstruction,
//! leakage certification, and the encrypted-home-share variant.
//!
//! A plan node becomes a polynomial-code isometry. ((m, m)) AND nodes with
//! m ≥ 3 are realized as a chain of ((2, 2)) links — each a ((2, 3)) code
//! with one environment site — which keeps every realized node at field size
//! 3 instead of forcing the global field up to 2m−1. One prime q serves the
//! whole plan: the smallest prime covering the secret dimension and every
//! realized node's 2k−1 evaluation points.
//!
//! Reconstruction never measures; it is a chain of interpolation
//! permutations, so superposition secrets survive. Environment sites stay in
//! the register as the purification and are excluded from every coalition.

mod encrypted;
mod leakage;

pub use encrypted::{encrypted_reconstruct, encrypted_share, encrypted_share_with_key, EncryptedAllocation};
pub use leakage::{certify_leakage, leakage_report, LeakageCertificate, LeakageMethod, LeakageReport};

use crate::access::{evaluate_coalition, Coalition, Owner, PlanNode, SharePlan};
use crate::error::{Error, Result};
use crate::quantum::{smallest_prime_at_least, QuditRegister, SiteLabel};
use crate::schemes::{qts_encode, qts_reconstruct, QtsParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default register cap: total dimension 2²².
pub const DEFAULT_MAX_TOTAL_DIM: u128 = 1 << 22;

/// Environment variable overriding the register cap.
pub const MAX_DIM_ENV: &str = "AQSS_MAX_DIM";

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub max_total_dim: u128,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_total_dim: DEFAULT_MAX_TOTAL_DIM,
        }
    }
}

impl EngineConfig {
    /// Default config with the `AQSS_MAX_DIM` environment override applied.
    pub fn from_env() -> Self {
        let mut config = EngineConfig::default();
        if let Ok(raw) = std::env::var(MAX_DIM_ENV) {
            if let Ok(cap) = raw.trim().parse::<u128>() {
                config.max_total_dim = cap;
            }
        }
        config
    }

    pub fn with_cap(max_total_dim: u128) -> Self {
        EngineConfig { max_total_dim }
    }
}

/// Layout node of the realized plan: which sites carry which node's shares.
#[derive(Debug, Clone)]
pub(crate) enum RealNode {
    Leaf {
        site: usize,
        owner: Owner,
    },
    Code {
        params: QtsParams,
        /// Sites of the n real shares, evaluation-point order.
        share_sites: Vec<usize>,
        children: Vec<RealNode>,
    },
}

impl RealNode {
    fn satisfied(&self, coalition: &Coalition) -> bool {
        match self {
            RealNode::Leaf { owner, .. } => match owner {
                Owner::Player(p) => coalition.players.contains(p),
                Owner::Dealer => coalition.dealer,
            },
            RealNode::Code {
                params, children, ..
            } => {
                children
                    .iter()
                    .filter(|c| c.satisfied(coalition))
                    .count()
                    >= params.k
            }
        }
    }
}

/// Combinatorial layout of a plan realization, independent of amplitudes.
#[derive(Debug, Clone)]
pub struct Realization {
    pub q: u64,
    pub site_labels: Vec<SiteLabel>,
    pub(crate) root: RealNode,
}

impl Realization {
    pub fn site_count(&self) -> usize {
        self.site_labels.len()
    }

    pub fn total_dim(&self) -> u128 {
        (self.q as u128).pow(self.site_count() as u32)
    }

    /// Sites owned by the coalition (a player's sites plus, with the dealer,
    /// every dealer site). Environment sites belong to no coalition.
    pub fn coalition_sites(&self, coalition: &Coalition) -> Vec<usize> {
        self.site_labels
            .iter()
            .enumerate()
            .filter(|(_, label)| match label {
                SiteLabel::Player(name) => {
                    coalition.players.iter().any(|p| p.as_str() == name)
                }
                SiteLabel::Dealer => coalition.dealer,
                _ => false,
            })
            .map(|(site, _)| site)
            .collect()
    }
}

/// The smallest field that realizes the plan for a given secret dimension:
/// every realized node needs 2k−1 evaluation points, AND chains need 3.
fn field_for(plan: &SharePlan, secret_dim: u64) -> u64 {
    fn node_requirement(node: &PlanNode) -> u64 {
        match node {
            PlanNode::Leaf { .. } => 1,
            PlanNode::Threshold { k, n, children } => {
                let own = if k == n && *n >= 2 {
                    3 // ((2,2)) chain links, realized as ((2,3))
                } else {
                    (2 * k - 1) as u64
                };
                children
                    .iter()
                    .map(node_requirement)
                    .fold(own, u64::max)
            }
        }
    }
    smallest_prime_at_least(node_requirement(&plan.root).max(secret_dim).max(2))
}

/// Compute the realization layout of `plan` for a secret of dimension
/// `secret_dim`, without touching any state.
pub fn realize_plan(plan: &SharePlan, secret_dim: u64) -> Result<Realization> {
    plan.root.validate()?;
    let q = field_for(plan, secret_dim);
    let mut site_labels = vec![SiteLabel::Unassigned];
    let root = lay_node(&plan.root, 0, q, &mut site_labels)?;
    Ok(Realization {
        q,
        site_labels,
        root,
    })
}

fn lay_node(
    node: &PlanNode,
    input_site: usize,
    q: u64,
    sites: &mut Vec<SiteLabel>,
) -> Result<RealNode> {
    match node {
        PlanNode::Leaf { owner } => {
            sites[input_site] = match owner {
                Owner::Player(p) => SiteLabel::Player(p.as_str().to_string()),
                Owner::Dealer => SiteLabel::Dealer,
            };
            Ok(RealNode::Leaf {
                site: input_site,
                owner: owner.clone(),
            })
        }
        PlanNode::Threshold { k, n, children } => {
            if k == n && *n >= 3 {
                lay_and_chain(children, input_site, q, sites)
            } else {
                lay_code(*k, children, input_site, q, sites)
            }
        }
    }
}

/// ((m, m)) with m ≥ 2 children left to place: a ((2, 2)) link holding the
/// first child and, recursively, the rest.
fn lay_and_chain(
    children: &[PlanNode],
    input_site: usize,
    q: u64,
    sites: &mut Vec<SiteLabel>,
) -> Result<RealNode> {
    let params = QtsParams::new(2, 2, q)?;
    let share_sites = allocate_sites(input_site, &params, sites);
    let first = lay_node(&children[0], share_sites[0], q, sites)?;
    let rest = if children.len() == 2 {
        lay_node(&children[1], share_sites[1], q, sites)?
    } else {
        lay_and_chain(&children[1..], share_sites[1], q, sites)?
    };
    Ok(RealNode::Code {
        params,
        share_sites,
        children: vec![first, rest],
    })
}

fn lay_code(
    k: usize,
    children: &[PlanNode],
    input_site: usize,
    q: u64,
    sites: &mut Vec<SiteLabel>,
) -> Result<RealNode> {
    let params = QtsParams::new(k, children.len(), q)?;
    let share_sites = allocate_sites(input_site, &params, sites);
    let children = share_sites
        .iter()
        .zip(children)
        .map(|(&site, child)| lay_node(child, site, q, sites))
        .collect::<Result<Vec<_>>>()?;
    Ok(RealNode::Code {
        params,
        share_sites,
        children,
    })
}

/// Reserve this node's appended sites (shares then environment), mirroring
/// the order `qts_encode` creates them.
fn allocate_sites(
    input_site: usize,
    params: &QtsParams,
    sites: &mut Vec<SiteLabel>,
) -> Vec<usize> {
    let mut share_sites = vec![input_site];
    for extra in 1..params.realized_n() {
        let site = sites.len();
        sites.push(if extra < params.n {
            SiteLabel::Unassigned
        } else {
            SiteLabel::Environment
        });
        if extra < params.n {
            share_sites.push(site);
        }
    }
    share_sites
}

/// The realized quantum sharing of one secret.
#[derive(Debug, Clone)]
pub struct ShareAllocation {
    pub register: QuditRegister,
    pub plan: SharePlan,
    pub realization: Realization,
    /// The secret embedded into a dimension-q site (zero-padded).
    pub secret_embedded: Vec<Complex64>,
}

/// Ownership table and parameters, the CLI-facing manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllocationManifest {
    pub field: u64,
    pub site_count: usize,
    pub total_dim: u128,
    pub ownership: Vec<String>,
    pub home_share_sites: Vec<usize>,
    pub environment_sites: Vec<usize>,
    pub plan: SharePlan,
}

impl ShareAllocation {
    pub fn manifest(&self) -> AllocationManifest {
        let labels = &self.realization.site_labels;
        AllocationManifest {
            field: self.realization.q,
            site_count: labels.len(),
            total_dim: self.realization.total_dim(),
            ownership: labels.iter().map(|l| l.to_string()).collect(),
            home_share_sites: labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == SiteLabel::Dealer)
                .map(|(s, _)| s)
                .collect(),
            environment_sites: labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == SiteLabel::Environment)
                .map(|(s, _)| s)
                .collect(),
            plan: self.plan.clone(),
        }
    }
}

/// Embed a secret state (any prime dimension ≤ q) into a dimension-q vector.
fn embed_secret(secret: &QuditRegister, q: u64) -> Result<Vec<Complex64>> {
    if secret.site_count() != 1 {
        return Err(Error::InvalidParams(
            "plan sharing expects a single-site secret".into(),
        ));
    }
    let d = secret.dims()[0];
    if d > q {
        return Err(Error::InvalidParams(format!(
            "secret dimension {d} exceeds the plan field {q}"
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); q as usize];
    amps[..d as usize].copy_from_slice(secret.amplitudes());
    Ok(amps)
}

/// Share a secret along the plan: recursive threshold encoding down the
/// realization tree, leaves labeled with their owners.
pub fn quantum_share(
    plan: &SharePlan,
    secret: &QuditRegister,
    config: &EngineConfig,
) -> Result<ShareAllocation> {
    let realization = realize_plan(plan, secret.dims().first().copied().unwrap_or(2))?;
    let total = realization.total_dim();
    if total > config.max_total_dim {
        return Err(Error::DimensionCap {
            required: total,
            cap: config.max_total_dim,
        });
    }
    let secret_embedded = embed_secret(secret, realization.q)?;
    let mut register = QuditRegister::prepare(&[realization.q], secret_embedded.clone())?;
    register = encode_node(register, &realization.root)?;
    debug_assert_eq!(register.site_count(), realization.site_count());
    for (site, label) in realization.site_labels.iter().enumerate() {
        register.set_label(site, label.clone());
    }
    Ok(ShareAllocation {
        register,
        plan: plan.clone(),
        realization,
        secret_embedded,
    })
}

fn encode_node(reg: QuditRegister, node: &RealNode) -> Result<QuditRegister> {
    match node {
        RealNode::Leaf { .. } => Ok(reg),
        RealNode::Code {
            params,
            share_sites,
            children,
        } => {
            let (encoded, sites) = qts_encode(&reg, share_sites[0], params)?;
            debug_assert_eq!(&sites, share_sites, "layout and encoder disagree");
            children.iter().try_fold(encoded, |reg, child| {
                encode_node(reg, child)
            })
        }
    }
}

/// A reconstruction result: the transformed register and the site now
/// carrying the secret, disentangled.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub register: QuditRegister,
    pub output_site: usize,
}

impl Reconstruction {
    /// ⟨secret| ρ_out |secret⟩ against the allocation's embedded secret.
    pub fn fidelity(&self, alloc: &ShareAllocation) -> Result<f64> {
        self.register
            .site_fidelity(self.output_site, &alloc.secret_embedded)
    }
}

/// Reconstruct the secret for an authorized coalition, using only sites the
/// coalition owns. Refused before any quantum operation otherwise.
pub fn quantum_reconstruct(
    alloc: &ShareAllocation,
    coalition: &Coalition,
) -> Result<Reconstruction> {
    if !evaluate_coalition(&alloc.plan, coalition) {
        return Err(Error::Unauthorized);
    }
    debug_assert!(alloc.realization.root.satisfied(coalition));
    let (register, output_site) =
        reconstruct_node(alloc.register.clone(), &alloc.realization.root, coalition)?;
    Ok(Reconstruction {
        register,
        output_site,
    })
}

fn reconstruct_node(
    reg: QuditRegister,
    node: &RealNode,
    coalition: &Coalition,
) -> Result<(QuditRegister, usize)> {
    match node {
        RealNode::Leaf { site, .. } => Ok((reg, *site)),
        RealNode::Code {
            params, children, ..
        } => {
            let chosen: Vec<(usize, &RealNode)> = children
                .iter()
                .enumerate()
                .filter(|(_, c)| c.satisfied(coalition))
                .take(params.k)
                .collect();
            if chosen.len() < params.k {
                return Err(Error::Unauthorized);
            }
            let mut reg = reg;
            let mut shares = Vec::with_capacity(params.k);
            for (point, child) in chosen {
                let (next, site) = reconstruct_node(reg, child, coalition)?;
                reg = next;
                shares.push((site, point as u64));
            }
            qts_reconstruct(&reg, &shares, params)
        }
    }
}
