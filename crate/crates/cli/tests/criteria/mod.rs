mod algebra;
mod covers;
mod endtoend;

pub use algebra::{centralizer, commutant, conjugators, free_group, relations};
pub use covers::{hurwitz, levy, obstruction, pullback};
pub use endtoend::{determinism, pipeline};

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thurston_core::cover::CoverPresentation;
use thurston_core::format::parse_presentation;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> CoverPresentation {
    parse_presentation(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}
