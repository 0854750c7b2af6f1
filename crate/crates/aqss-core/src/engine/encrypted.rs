//! The encrypted-home-share variant: one-time-pad the whole secret, keep the
//! ciphertext as a single home share, and share the classical key along Γ.
//!
//! The access structure only needs to be monotone here — the pairwise
//! overlap (no-cloning) condition is irrelevant because the quantum state is
//! never split. Whoever reconstructs the key bits reverses the pad exactly;
//! without them the ciphertext averages to the maximally mixed state.

use crate::access::{AccessStructure, PlayerSet};
use crate::error::Result;
use crate::quantum::{qotp_decrypt, qotp_encrypt, PauliKey, QuditRegister};
use crate::rng::RngStream;
use crate::schemes::{
    classical_monotone_reconstruct, classical_monotone_share, BitString, KeyBundle,
};
use serde::{Deserialize, Serialize};

/// Ciphertext held by the dealer plus per-player classical key bundles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncryptedAllocation {
    pub gamma: AccessStructure,
    pub ciphertext: QuditRegister,
    pub key_bundles: Vec<KeyBundle>,
}

/// Encrypt with a fresh uniform key of 2·log₂(d) bits per site and share the
/// key bits along Γ.
pub fn encrypted_share(
    gamma: &AccessStructure,
    secret: &QuditRegister,
    rng: &mut RngStream,
) -> Result<EncryptedAllocation> {
    let key = PauliKey::random(secret.dims(), &mut rng.child("qotp-key"));
    encrypted_share_with_key(gamma, secret, &key, &mut rng.child("key-sharing"))
}

/// Test hook: share with an explicit key (the all-zero key leaves the
/// ciphertext equal to the secret).
pub fn encrypted_share_with_key(
    gamma: &AccessStructure,
    secret: &QuditRegister,
    key: &PauliKey,
    rng: &mut RngStream,
) -> Result<EncryptedAllocation> {
    let sites: Vec<usize> = (0..secret.site_count()).collect();
    let ciphertext = qotp_encrypt(secret, &sites, key)?;
    let bits = BitString(key.to_bits(secret.dims()));
    let key_bundles = classical_monotone_share(gamma, &bits, rng);
    Ok(EncryptedAllocation {
        gamma: gamma.clone(),
        ciphertext,
        key_bundles,
    })
}

/// Reassemble the key classically and undo the pad.
pub fn encrypted_reconstruct(
    enc: &EncryptedAllocation,
    coalition: &PlayerSet,
) -> Result<QuditRegister> {
    let bits = classical_monotone_reconstruct(&enc.gamma, &enc.key_bundles, coalition)?;
    let key = PauliKey::from_bits(&bits.0, enc.ciphertext.dims())?;
    let sites: Vec<usize> = (0..enc.ciphertext.site_count()).collect();
    qotp_decrypt(&enc.ciphertext, &sites, &key)
}
