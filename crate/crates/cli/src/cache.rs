use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use thurston_core::cover::{hurwitz_orbit, HurwitzTuple};
use thurston_core::perm::Perm;

fn encode(t: &HurwitzTuple) -> String {
    t.0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

fn decode(line: &str, degree: usize) -> Option<HurwitzTuple> {
    line.split(';').map(|p| Perm::parse_cycles(p, degree).ok()).collect::<Option<Vec<_>>>().map(HurwitzTuple)
}

/// Hurwitz orbits on disk, one file per canonical tuple, named by its SHA-256.
pub struct OrbitCache {
    dir: Option<PathBuf>,
}

impl OrbitCache {
    pub fn new(dir: Option<&Path>) -> Self {
        OrbitCache { dir: dir.map(Path::to_path_buf) }
    }

    fn path(&self, key: &HurwitzTuple) -> Option<PathBuf> {
        let digest = Sha256::digest(format!("{}|{}", key.degree(), encode(key)).as_bytes());
        self.dir.as_ref().map(|d| d.join(format!("{}.orbit", hex::encode(digest))))
    }

    /// Reads a cached orbit; entries must be canonical and contain the key.
    fn load(&self, key: &HurwitzTuple) -> Option<Vec<HurwitzTuple>> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        let orbit: Vec<HurwitzTuple> = text.lines().map(|l| decode(l, key.degree())).collect::<Option<_>>()?;
        let canonical = orbit.iter().all(|t| t.len() == key.len() && &t.canonical().0 == t);
        (canonical && orbit.binary_search(key).is_ok() && orbit.windows(2).all(|w| w[0] < w[1])).then_some(orbit)
    }

    /// Orbit of `t` (as sorted canonical forms), from the cache when a valid entry exists.
    pub fn orbit(&self, t: &HurwitzTuple, max_size: usize) -> Result<(Vec<HurwitzTuple>, bool), usize> {
        let key = t.canonical().0;
        if let Some(o) = self.load(&key) {
            return Ok((o, true));
        }
        let orbit = hurwitz_orbit(t, max_size)?;
        if let Some(path) = self.path(&key) {
            let body: String = orbit.iter().map(|t| encode(t) + "\n").collect();
            if let Some(parent) = path.parent() {
                let _ = fs::create_dir_all(parent);
            }
            let _ = fs::write(path, body);
        }
        Ok((orbit, false))
    }
}
