//! Step (4): merge the n−1 edge triplets into one n-party GHZ state using
//! local operations and broadcast classical bits.
//!
//! Breadth-first from the leader. The first edge's triplet already is the
//! two-party GHZ. For every further edge (u, v) with u merged and v new, u
//! applies a CNOT from its GHZ qubit onto its triplet half, measures that
//! half computationally, and broadcasts the bit; v applies X on outcome 1
//! and its triplet half joins as its GHZ qubit. The measured qubit is fixed
//! and drops out of the register. Total classical cost: n−2 broadcast bits
//! per GHZ instance.

use super::bus::{party_name, MessageBus};
use crate::error::{Error, Result};
use crate::quantum::{Basis, QuditRegister};
use crate::rng::RngStream;

/// Order the tree edges so each one attaches a new party to the grown set,
/// starting at the leader. Orientation is normalized to (inside, outside).
pub fn bfs_edge_order(
    tree: &[(usize, usize)],
    leader: usize,
    n: usize,
) -> Result<Vec<(usize, (usize, usize))>> {
    let mut merged = vec![false; n];
    merged[leader] = true;
    let mut used = vec![false; tree.len()];
    let mut order = Vec::with_capacity(tree.len());
    loop {
        let next = tree.iter().enumerate().position(|(i, &(u, v))| {
            !used[i] && (merged[u] ^ merged[v])
        });
        match next {
            Some(i) => {
                used[i] = true;
                let (u, v) = tree[i];
                let (inside, outside) = if merged[u] { (u, v) } else { (v, u) };
                merged[outside] = true;
                order.push((i, (inside, outside)));
            }
            None => break,
        }
    }
    if order.len() != tree.len() || merged.iter().any(|&m| !m) {
        return Err(Error::InvalidConfig(
            "edges do not form a spanning tree".into(),
        ));
    }
    Ok(order)
}

/// Merge one round's triplets (indexed by tree edge, site 0 = first
/// endpoint) into the n-party GHZ state, sites in party order.
pub fn merge_to_ghz(
    triplets: &[QuditRegister],
    tree: &[(usize, usize)],
    leader: usize,
    n: usize,
    rng: &mut RngStream,
    bus: &mut MessageBus,
) -> Result<QuditRegister> {
    if triplets.len() != tree.len() || tree.len() + 1 != n {
        return Err(Error::InvalidConfig(
            "need exactly one triplet per tree edge".into(),
        ));
    }
    let order = bfs_edge_order(tree, leader, n)?;

    // Party → site in the growing register.
    let mut site_of = vec![usize::MAX; n];
    let (first_edge, (first_in, first_out)) = order[0];
    let mut ghz = triplets[first_edge].clone();
    let (u, _) = tree[first_edge];
    // Triplet site 0 belongs to the first endpoint as generated.
    if first_in == u {
        site_of[first_in] = 0;
        site_of[first_out] = 1;
    } else {
        site_of[first_in] = 1;
        site_of[first_out] = 0;
    }

    for &(edge_index, (inside, outside)) in &order[1..] {
        let pair = &triplets[edge_index];
        let offset = ghz.site_count();
        ghz = ghz.tensor(pair);
        let (u, _) = tree[edge_index];
        let (e_in, e_out) = if inside == u {
            (offset, offset + 1)
        } else {
            (offset + 1, offset)
        };

        // CNOT from the attaching party's GHZ qubit onto its triplet half.
        let control = site_of[inside];
        ghz = ghz.apply_basis_permutation(&[control, e_in], &[0, 1, 3, 2])?;
        let (outcome, collapsed) = ghz.measure(&[e_in], Basis::Computational, rng)?;
        let bit = outcome.values[0];
        bus.broadcast("step4-merge", party_name(inside), 1);
        let mut next = collapsed;
        if bit == 1 {
            next = next.apply_basis_permutation(&[e_out], &[1, 0])?;
        }
        next = next.project_out(e_in, bit)?;
        // Dropping e_in shifts any later site down by one.
        for site in site_of.iter_mut() {
            if *site != usize::MAX && *site > e_in {
                *site -= 1;
            }
        }
        site_of[outside] = if e_out > e_in { e_out - 1 } else { e_out };
        ghz = next;
    }

    ghz.reorder_sites(&site_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkd::epr::{singlet, singlet_to_triplet};

    fn triplet() -> QuditRegister {
        singlet_to_triplet(&singlet()).unwrap()
    }

    fn ghz_fidelity(state: &QuditRegister, n: usize) -> f64 {
        state
            .inner_product(&QuditRegister::ghz(n))
            .unwrap()
            .norm_sqr()
    }

    #[test]
    fn two_parties_need_no_merging() {
        let mut rng = RngStream::from_seed(1);
        let mut bus = MessageBus::new();
        let state = merge_to_ghz(&[triplet()], &[(0, 1)], 0, 2, &mut rng, &mut bus).unwrap();
        assert!((ghz_fidelity(&state, 2) - 1.0).abs() < 1e-12);
        assert_eq!(bus.total_bits(), 0);
    }

    #[test]
    fn chain_of_three_merges_to_ghz() {
        let mut rng = RngStream::from_seed(7);
        for _ in 0..20 {
            let mut bus = MessageBus::new();
            let state = merge_to_ghz(
                &[triplet(), triplet()],
                &[(0, 1), (1, 2)],
                0,
                3,
                &mut rng,
                &mut bus,
            )
            .unwrap();
            assert!((ghz_fidelity(&state, 3) - 1.0).abs() < 1e-10);
            assert_eq!(bus.bits_for("step4-merge"), 1);
        }
    }

    #[test]
    fn star_and_chain_agree_for_four_parties() {
        let mut rng = RngStream::from_seed(3);
        for _ in 0..20 {
            let mut bus = MessageBus::new();
            let chain = merge_to_ghz(
                &[triplet(), triplet(), triplet()],
                &[(0, 1), (1, 2), (2, 3)],
                0,
                4,
                &mut rng,
                &mut bus,
            )
            .unwrap();
            let star = merge_to_ghz(
                &[triplet(), triplet(), triplet()],
                &[(1, 0), (1, 2), (1, 3)],
                1,
                4,
                &mut rng,
                &mut bus,
            )
            .unwrap();
            assert!((ghz_fidelity(&chain, 4) - 1.0).abs() < 1e-10);
            assert!((ghz_fidelity(&star, 4) - 1.0).abs() < 1e-10);
            for (a, b) in chain.amplitudes().iter().zip(star.amplitudes()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn leader_may_sit_anywhere() {
        let mut rng = RngStream::from_seed(9);
        let mut bus = MessageBus::new();
        let state = merge_to_ghz(
            &[triplet(), triplet(), triplet(), triplet()],
            &[(0, 1), (1, 2), (2, 3), (3, 4)],
            2,
            5,
            &mut rng,
            &mut bus,
        )
        .unwrap();
        assert!((ghz_fidelity(&state, 5) - 1.0).abs() < 1e-10);
        // n−2 broadcast bits.
        assert_eq!(bus.bits_for("step4-merge"), 3);
    }

    #[test]
    fn disconnected_edges_are_rejected() {
        let mut rng = RngStream::from_seed(0);
        let mut bus = MessageBus::new();
        // Three edges but a repeated one: party 3 is unreachable from 0.
        let result = merge_to_ghz(
            &[triplet(), triplet(), triplet()],
            &[(0, 1), (2, 3), (2, 3)],
            0,
            4,
            &mut rng,
            &mut bus,
        );
        assert!(result.is_err());
    }
}
