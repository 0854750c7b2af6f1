//! Classical sharing of a bitstring along a monotone access structure.
//!
//! Each minimal authorized set is an AND clause realized by an XOR split of
//! the key among its members; the OR across clauses is replication. A
//! coalition containing a whole clause XORs that clause's pads back together;
//! a coalition missing at least one member of every clause sees only proper
//! subsets of one-time pads, which are jointly uniform and independent of the
//! key.

use crate::access::{AccessStructure, PlayerId, PlayerSet};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// A bitstring, rendered as e.g. "1011".
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn random(len: usize, rng: &mut RngStream) -> Self {
        BitString((0..len).map(|_| rng.flip(0.5)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len(), other.len(), "bitstring length mismatch");
        BitString(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a ^ b)
                .collect(),
        )
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len(), other.len(), "bitstring length mismatch");
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParams(format!(
                    "bitstring may only contain 0 and 1, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// One player's pads: clause index → pad.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyBundle {
    pub player: PlayerId,
    pub pads: BTreeMap<usize, BitString>,
}

/// Share `key` along Γ. Every player in the universe gets a bundle (possibly
/// empty).
pub fn classical_monotone_share(
    gamma: &AccessStructure,
    key: &BitString,
    rng: &mut RngStream,
) -> Vec<KeyBundle> {
    classical_monotone_share_with(gamma, key, &mut |_, _| BitString::random(key.len(), rng))
}

/// Pad-source hook used by the enumeration tests; `pad(clause, slot)` yields
/// the pad for one of the first |α|−1 members of clause α.
pub fn classical_monotone_share_with(
    gamma: &AccessStructure,
    key: &BitString,
    pad: &mut dyn FnMut(usize, usize) -> BitString,
) -> Vec<KeyBundle> {
    let mut bundles: BTreeMap<PlayerId, KeyBundle> = gamma
        .players()
        .iter()
        .map(|p| {
            (
                p.clone(),
                KeyBundle {
                    player: p.clone(),
                    pads: BTreeMap::new(),
                },
            )
        })
        .collect();
    for (clause, alpha) in gamma.sets().iter().enumerate() {
        let members: Vec<&PlayerId> = alpha.iter().collect();
        let mut running = key.clone();
        for (slot, member) in members.iter().enumerate() {
            let share = if slot + 1 == members.len() {
                running.clone()
            } else {
                let p = pad(clause, slot);
                assert_eq!(p.len(), key.len(), "pad length mismatch");
                running = running.xor(&p);
                p
            };
            bundles
                .get_mut(*member)
                .expect("canonical structures only name universe players")
                .pads
                .insert(clause, share);
        }
    }
    bundles.into_values().collect()
}

/// Recover the key: the coalition must contain some minimal authorized set.
pub fn classical_monotone_reconstruct(
    gamma: &AccessStructure,
    bundles: &[KeyBundle],
    coalition: &PlayerSet,
) -> Result<BitString> {
    let by_player: BTreeMap<&PlayerId, &KeyBundle> =
        bundles.iter().map(|b| (&b.player, b)).collect();
    let clause = gamma
        .sets()
        .into_iter()
        .enumerate()
        .find(|(_, alpha)| alpha.is_subset(coalition))
        .ok_or(Error::Unauthorized)?;
    let (index, alpha) = clause;
    let mut key: Option<BitString> = None;
    for member in &alpha {
        let bundle = by_player.get(member).ok_or_else(|| {
            Error::InvalidParams(format!("missing bundle for player {member}"))
        })?;
        let pad = bundle.pads.get(&index).ok_or_else(|| {
            Error::InvalidParams(format!("bundle for {member} lacks clause {index}"))
        })?;
        key = Some(match key {
            None => pad.clone(),
            Some(acc) => acc.xor(pad),
        });
    }
    key.ok_or(Error::Unauthorized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::parse_access_structure;

    fn gamma(text: &str) -> AccessStructure {
        parse_access_structure(text).unwrap()
    }

    fn players(g: &AccessStructure, names: &str) -> PlayerSet {
        names.split(',').map(PlayerId::new).collect::<PlayerSet>()
            .intersection(&g.players().iter().cloned().collect())
            .cloned()
            .collect()
    }

    #[test]
    fn two_of_two_xor() {
        let g = gamma("{AB}");
        let key: BitString = "1011".parse().unwrap();
        let mut rng = crate::rng::RngStream::from_seed(3);
        let bundles = classical_monotone_share(&g, &key, &mut rng);
        // A holds a pad p, B holds p xor key.
        let a = bundles.iter().find(|b| b.player.as_str() == "A").unwrap();
        let b = bundles.iter().find(|b| b.player.as_str() == "B").unwrap();
        assert_eq!(a.pads[&0].xor(&b.pads[&0]), key);
        let got =
            classical_monotone_reconstruct(&g, &bundles, &players(&g, "A,B")).unwrap();
        assert_eq!(got, key);
    }

    #[test]
    fn authorized_pair_reconstructs_in_the_three_clause_structure() {
        let g = gamma("{ABC, AD, DEF}");
        let key: BitString = "0110".parse().unwrap();
        let mut rng = crate::rng::RngStream::from_seed(7);
        let bundles = classical_monotone_share(&g, &key, &mut rng);
        let got = classical_monotone_reconstruct(&g, &bundles, &players(&g, "A,D")).unwrap();
        assert_eq!(got, key);
        // {B, D} contains no clause.
        let err = classical_monotone_reconstruct(&g, &bundles, &players(&g, "B,D"));
        assert!(matches!(err, Err(Error::Unauthorized)));
    }

    #[test]
    fn recovery_iff_authorized_exhaustive() {
        for text in ["{AB}", "{ABC, AD, DEF}", "{AB, CD}", "{AB, BC, AC}"] {
            let g = gamma(text);
            let key: BitString = "10".parse().unwrap();
            let mut rng = crate::rng::RngStream::from_seed(1);
            let bundles = classical_monotone_share(&g, &key, &mut rng);
            let names = g.players().to_vec();
            for mask in 0u32..(1 << names.len()) {
                let coalition: PlayerSet = names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect();
                let outcome = classical_monotone_reconstruct(&g, &bundles, &coalition);
                if g.is_authorized(&coalition) {
                    assert_eq!(outcome.unwrap(), key, "{text}: mask {mask:b}");
                } else {
                    assert!(outcome.is_err(), "{text}: mask {mask:b}");
                }
            }
        }
    }

    #[test]
    fn unauthorized_view_is_key_independent() {
        // Enumerate all pad choices for a 1-bit key on {AB}: what A alone
        // sees has the same multiset for key 0 and key 1.
        let g = gamma("{AB}");
        for viewer in ["A", "B"] {
            let mut views: Vec<Vec<bool>> = Vec::new();
            for key_bit in [false, true] {
                let key = BitString(vec![key_bit]);
                let mut seen = Vec::new();
                for pad_bit in [false, true] {
                    let bundles = classical_monotone_share_with(&g, &key, &mut |_, _| {
                        BitString(vec![pad_bit])
                    });
                    let view = bundles
                        .iter()
                        .find(|b| b.player.as_str() == viewer)
                        .unwrap()
                        .pads[&0]
                        .0[0];
                    seen.push(view);
                }
                seen.sort();
                views.push(seen);
            }
            assert_eq!(views[0], views[1]);
        }
    }
}
