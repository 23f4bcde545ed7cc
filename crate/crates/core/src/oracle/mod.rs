//! Brute-force counterparts of the primary operations, exhaustive
//! enumeration of small skeletons, and a seeded generator of proper
//! K-posets. Everything here reads a skeleton only through its node list,
//! its order relation and its class records.

mod brute;
mod enumerate;
mod generate;

pub use brute::{
    brute_connected, brute_height, brute_iso, brute_lambda, brute_mlb, brute_mub, brute_script_h, materialize, Elem,
    Materialized, TRUNCATION,
};
pub use enumerate::{enumerate_skeletons, MAX_ENUMERATION_NODES};
pub use generate::{gen_proper, GenError, GenParams};
