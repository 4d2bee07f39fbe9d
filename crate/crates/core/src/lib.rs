//! Sub-block rearranged staircase (SR-staircase) codes with shortened BCH
//! component codes.

pub mod bch;
pub mod bits;
pub mod channel;
pub mod code;
pub mod de;
pub mod decoder;
pub mod design;
pub mod error;
pub mod floor;
pub mod gf;
pub mod par;
pub mod sim;

pub use bch::{BchCode, DecodeKind, DecodeOutcome};
pub use bits::BitBlock;
pub use code::{encode_chain, phi, rearrange, Geometry, SrscCode, SrscParams, Violation};
pub use error::{Error, Result};
