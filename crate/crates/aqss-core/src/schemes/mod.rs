//! Secret-sharing building blocks: prime-field machinery, classical Shamir
//! and monotone sharing, and the quantum ((k, n)) threshold scheme used at
//! every node of a share plan.

mod gf;
mod monotone;
mod qts;
mod shamir;

pub use gf::Gf;
pub use monotone::{
    classical_monotone_reconstruct, classical_monotone_share, classical_monotone_share_with,
    BitString, KeyBundle,
};
pub use qts::{qts_encode, qts_reconstruct, QtsParams};
pub use shamir::{
    shamir_reconstruct, shamir_split, shamir_split_with_blinding, ClassicalShare,
};
