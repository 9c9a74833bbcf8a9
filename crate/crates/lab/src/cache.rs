//! Append-only store of lattice counts `(X, #{(a, b) : a² + b² ≤ X})`.
//!
//! ```text
//! cdlab-lattice-cache 1
//! 1000,3149
//! 1200,3773
//! #sha256 <hex of every record line so far, newlines included>
//! ```
//!
//! Each batch appends its records and then a checksum line covering the
//! whole file so far. A file that does not end on a valid checksum is
//! treated as corrupt and rebuilt from scratch.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use cdlab_core::error_terms::lattice_count;
use rand::seq::IteratorRandom;
use rand::Rng;
use sha2::{Digest, Sha256};

const HEADER: &str = "cdlab-lattice-cache 1";
const CHECKSUM: &str = "#sha256 ";

/// Keys spot-checked on every open.
pub const SPOT_CHECKS: usize = 10;

pub struct LatticeCache {
    path: PathBuf,
    map: BTreeMap<u64, u128>,
    hasher: Sha256,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_body(text: &str) -> Result<(BTreeMap<u64, u128>, Sha256), String> {
    let mut lines = text.split_inclusive('\n');
    match lines.next() {
        Some(h) if h.trim_end() == HEADER && h.ends_with('\n') => {}
        _ => return Err("missing or wrong header".into()),
    }
    let mut map = BTreeMap::new();
    let mut hasher = Sha256::new();
    let mut clean = true;
    for line in lines {
        if !line.ends_with('\n') {
            return Err("torn final line".into());
        }
        if let Some(sum) = line.strip_prefix(CHECKSUM) {
            if sum.trim_end() != hex(&hasher.clone().finalize()) {
                return Err("checksum mismatch".into());
            }
            clean = true;
            continue;
        }
        let rec = line.trim_end();
        let (x, c) = rec.split_once(',').ok_or_else(|| format!("bad record {rec:?}"))?;
        let x: u64 = x.parse().map_err(|_| format!("bad key in {rec:?}"))?;
        let c: u128 = c.parse().map_err(|_| format!("bad count in {rec:?}"))?;
        if map.insert(x, c).is_some_and(|old| old != c) {
            return Err(format!("conflicting records for X = {x}"));
        }
        hasher.update(line.as_bytes());
        clean = false;
    }
    if !clean {
        return Err("records after the last checksum".into());
    }
    Ok((map, hasher))
}

/// What happened when a cache was opened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpenStatus {
    Created,
    Loaded { records: usize },
    Rebuilt { reason: String },
}

impl LatticeCache {
    /// Load `path`, creating it if absent. Corruption, or a failed spot check
    /// of [`SPOT_CHECKS`] random keys, resets the file and warns on stderr.
    pub fn open<R: Rng>(path: &Path, rng: &mut R) -> io::Result<(LatticeCache, OpenStatus)> {
        let text = match fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) if e.kind() == io::ErrorKind::InvalidData => Some(String::new()),
            Err(e) => return Err(e),
        };
        let Some(text) = text else {
            return Ok((Self::reset(path)?, OpenStatus::Created));
        };
        let problem = match parse_body(&text) {
            Ok((map, hasher)) => {
                let cache = LatticeCache { path: path.to_path_buf(), map, hasher };
                match cache.spot_check(rng) {
                    Ok(()) => {
                        let records = cache.len();
                        return Ok((cache, OpenStatus::Loaded { records }));
                    }
                    Err(reason) => reason,
                }
            }
            Err(reason) => reason,
        };
        eprintln!("warning: lattice cache {} is corrupt ({problem}); rebuilding", path.display());
        Ok((Self::reset(path)?, OpenStatus::Rebuilt { reason: problem }))
    }

    fn reset(path: &Path) -> io::Result<LatticeCache> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = File::create(path)?;
        writeln!(f, "{HEADER}")?;
        f.sync_all()?;
        Ok(LatticeCache { path: path.to_path_buf(), map: BTreeMap::new(), hasher: Sha256::new() })
    }

    /// Recompute up to [`SPOT_CHECKS`] random stored keys.
    pub fn spot_check<R: Rng>(&self, rng: &mut R) -> Result<(), String> {
        for x in self.map.keys().copied().choose_multiple(rng, SPOT_CHECKS) {
            let fresh = lattice_count(x).map_err(|e| e.to_string())?;
            if fresh != self.map[&x] {
                return Err(format!("stored count for X = {x} is {}, recomputed {fresh}", self.map[&x]));
            }
        }
        Ok(())
    }

    pub fn get(&self, x: u64) -> Option<u128> {
        self.map.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Append new records (already-stored keys are skipped) and a checksum.
    pub fn append(&mut self, records: &[(u64, u128)]) -> io::Result<()> {
        let mut chunk = String::new();
        for &(x, c) in records {
            if self.map.insert(x, c).is_none() {
                let line = format!("{x},{c}\n");
                self.hasher.update(line.as_bytes());
                chunk.push_str(&line);
            }
        }
        if chunk.is_empty() {
            return Ok(());
        }
        chunk.push_str(CHECKSUM);
        chunk.push_str(&hex(&self.hasher.clone().finalize()));
        chunk.push('\n');
        let mut f = OpenOptions::new().append(true).open(&self.path)?;
        f.write_all(chunk.as_bytes())?;
        f.sync_data()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    fn filled(path: &Path) -> LatticeCache {
        let _ = fs::remove_file(path);
        let (mut c, status) = LatticeCache::open(path, &mut rng()).unwrap();
        assert_eq!(status, OpenStatus::Created);
        let recs: Vec<_> = (1..=30u64).map(|x| (x * 7, lattice_count(x * 7).unwrap())).collect();
        c.append(&recs[..12]).unwrap();
        c.append(&recs[12..]).unwrap();
        c
    }

    #[test]
    fn reopen_keeps_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lc");
        filled(&path);
        let (c, status) = LatticeCache::open(&path, &mut rng()).unwrap();
        assert_eq!(status, OpenStatus::Loaded { records: 30 });
        assert_eq!(c.get(70), Some(lattice_count(70).unwrap()));
        assert_eq!(fs::read_to_string(&path).unwrap().matches(CHECKSUM).count(), 2);
    }

    #[test]
    fn corruption_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lc");
        let damage: [fn(String) -> String; 3] = [
            |t| t.replacen("14,", "14,1", 1),
            |t| format!("{t}77,5\n"),
            |t| t[..t.len() - 3].to_string(),
        ];
        for d in damage {
            filled(&path);
            let text = fs::read_to_string(&path).unwrap();
            fs::write(&path, d(text)).unwrap();
            let (c, status) = LatticeCache::open(&path, &mut rng()).unwrap();
            assert!(matches!(status, OpenStatus::Rebuilt { .. }), "{status:?}");
            assert!(c.is_empty());
            assert_eq!(fs::read_to_string(&path).unwrap(), format!("{HEADER}\n"));
        }
    }

    #[test]
    fn spot_check_catches_a_wrong_count_with_valid_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lc");
        // no more records than spot checks, so every key is recomputed
        let mut body = String::new();
        for x in 1..=SPOT_CHECKS as u64 {
            let c = lattice_count(x).unwrap() + u128::from(x == 5);
            body.push_str(&format!("{x},{c}\n"));
        }
        let mut h = Sha256::new();
        h.update(body.as_bytes());
        fs::write(&path, format!("{HEADER}\n{body}{CHECKSUM}{}\n", hex(&h.finalize()))).unwrap();
        let (c, status) = LatticeCache::open(&path, &mut rng()).unwrap();
        match status {
            OpenStatus::Rebuilt { reason } => assert!(reason.contains("X = 5"), "{reason}"),
            other => panic!("{other:?}"),
        }
        assert!(c.is_empty());
    }

    #[test]
    fn duplicate_appends_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lc");
        let mut c = filled(&path);
        let before = fs::read_to_string(&path).unwrap();
        c.append(&[(7, lattice_count(7).unwrap())]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), before);
    }
}
