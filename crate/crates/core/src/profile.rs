//! Finalized recovery credentials and answer verification.
//!
//! Answers are never stored. Each one is reduced to its match-normal form
//! (trimmed, NFC, case preserved) and hashed with Argon2id under a fresh
//! per-entry salt. Recovery succeeds when at least `recovery_threshold`
//! of the five attempts reproduce their digest.

use argon2::{Algorithm, Argon2, Params, Version};
use chrono::{DateTime, Utc};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use subtle::ConstantTimeEq;
use zeroize::Zeroizing;

use crate::error::{Error, Result};
use crate::guessability::match_normal;
use crate::session::SLOT_COUNT;
use crate::strength::Band;

pub const SALT_LEN: usize = 16;
pub const DIGEST_LEN: usize = 32;
pub const DEFAULT_THRESHOLD: u8 = 3;

/// Key-derivation settings, stored alongside the digests so old profiles
/// stay verifiable when defaults change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashParams {
    pub algorithm: HashAlgorithm,
    pub version: u32,
    pub memory_kib: u32,
    pub iterations: u32,
    pub parallelism: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HashAlgorithm {
    Argon2id,
}

impl Default for HashParams {
    fn default() -> Self {
        HashParams {
            algorithm: HashAlgorithm::Argon2id,
            version: 0x13,
            memory_kib: 19 * 1024,
            iterations: 2,
            parallelism: 1,
        }
    }
}

impl HashParams {
    pub fn new(memory_kib: u32, iterations: u32, parallelism: u32) -> Result<Self> {
        let p = HashParams {
            memory_kib,
            iterations,
            parallelism,
            ..HashParams::default()
        };
        p.argon2()?;
        Ok(p)
    }

    /// The cheapest parameters Argon2 accepts. Only for tests and benches.
    pub fn minimal() -> Self {
        HashParams {
            memory_kib: 8,
            iterations: 1,
            parallelism: 1,
            ..HashParams::default()
        }
    }

    fn argon2(&self) -> Result<Argon2<'static>> {
        let version = Version::try_from(self.version).map_err(|e| Error::Hash(e.to_string()))?;
        let params = Params::new(self.memory_kib, self.iterations, self.parallelism, Some(DIGEST_LEN))
            .map_err(|e| Error::Hash(e.to_string()))?;
        Ok(Argon2::new(Algorithm::Argon2id, version, params))
    }

    /// Digest of the match-normal form of `answer` under `salt`.
    pub fn digest(&self, answer: &str, salt: &[u8]) -> Result<[u8; DIGEST_LEN]> {
        let normal = Zeroizing::new(match_normal(answer));
        let mut out = [0u8; DIGEST_LEN];
        self.argon2()?
            .hash_password_into(normal.as_bytes(), salt, &mut out)
            .map_err(|e| Error::Hash(e.to_string()))?;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub question: String,
    #[serde(with = "hex::serde")]
    pub salt: Vec<u8>,
    #[serde(with = "hex::serde")]
    pub digest: Vec<u8>,
    pub band_at_save: Band,
    pub weak_override: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredProfile {
    pub profile_id: String,
    pub entries: Vec<ProfileEntry>,
    pub recovery_threshold: u8,
    pub kdf: HashParams,
    pub created_at: DateTime<Utc>,
}

impl StoredProfile {
    /// Structural checks for profiles read back from storage.
    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != SLOT_COUNT {
            return Err(Error::validation(format!(
                "profile has {} entries, expected {SLOT_COUNT}",
                self.entries.len()
            )));
        }
        if !(1..=SLOT_COUNT as u8).contains(&self.recovery_threshold) {
            return Err(Error::validation(format!(
                "recovery threshold {} outside 1..={SLOT_COUNT}",
                self.recovery_threshold
            )));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if e.salt.len() < SALT_LEN || e.digest.len() != DIGEST_LEN {
                return Err(Error::validation(format!("entry {} has malformed salt or digest", i + 1)));
            }
            if self.entries[..i].iter().any(|o| o.salt == e.salt) {
                return Err(Error::validation(format!("entry {} reuses a salt", i + 1)));
            }
        }
        self.kdf.argon2().map(|_| ())
    }
}

pub(crate) fn random_token(bytes: usize) -> String {
    let mut buf = vec![0u8; bytes];
    rand::rng().fill_bytes(&mut buf);
    hex::encode(buf)
}

/// `count` salts, pairwise distinct.
pub(crate) fn fresh_salts(count: usize) -> Vec<[u8; SALT_LEN]> {
    let mut rng = rand::rng();
    let mut salts: Vec<[u8; SALT_LEN]> = Vec::with_capacity(count);
    while salts.len() < count {
        let mut salt = [0u8; SALT_LEN];
        rng.fill_bytes(&mut salt);
        if !salts.contains(&salt) {
            salts.push(salt);
        }
    }
    salts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryOutcome {
    pub granted: bool,
    pub correct_count: u8,
}

/// Checks recovery attempts against a profile. `None` or blank attempts
/// count as incorrect; so does any entry whose stored parameters cannot be
/// used to hash.
pub fn verify_recovery<S: AsRef<str>>(profile: &StoredProfile, attempts: &[Option<S>; SLOT_COUNT]) -> RecoveryOutcome {
    let mut correct = 0u8;
    for (entry, attempt) in profile.entries.iter().zip(attempts) {
        let Some(attempt) = attempt else { continue };
        let attempt = attempt.as_ref();
        if attempt.trim().is_empty() {
            continue;
        }
        let Ok(digest) = profile.kdf.digest(attempt, &entry.salt) else {
            continue;
        };
        if bool::from(digest.as_slice().ct_eq(&entry.digest)) {
            correct += 1;
        }
    }
    RecoveryOutcome {
        granted: correct >= profile.recovery_threshold,
        correct_count: correct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_on_salt_and_case() {
        let p = HashParams::minimal();
        let a = p.digest("CrickICC15@Aus.", &[1; 16]).unwrap();
        assert_eq!(a, p.digest("  CrickICC15@Aus. ", &[1; 16]).unwrap());
        assert_ne!(a, p.digest("CrickICC15@Aus.", &[2; 16]).unwrap());
        assert_ne!(a, p.digest("crickicc15@aus.", &[1; 16]).unwrap());
    }

    #[test]
    fn digest_applies_nfc() {
        let p = HashParams::minimal();
        assert_eq!(
            p.digest("Cafe\u{301}", &[3; 16]).unwrap(),
            p.digest("Caf\u{e9}", &[3; 16]).unwrap()
        );
    }

    #[test]
    fn rejects_bad_params() {
        assert!(HashParams::new(1, 1, 1).is_err());
        assert!(HashParams::new(64, 0, 1).is_err());
        assert!(HashParams::new(64, 1, 1).is_ok());
    }

    #[test]
    fn salts_are_distinct() {
        let salts = fresh_salts(5);
        for i in 0..5 {
            for j in 0..i {
                assert_ne!(salts[i], salts[j]);
            }
        }
    }

    #[test]
    fn token_is_hex() {
        let t = random_token(16);
        assert_eq!(t.len(), 32);
        assert!(t.chars().all(|c| c.is_ascii_hexdigit()));
        assert_ne!(t, random_token(16));
    }
}
