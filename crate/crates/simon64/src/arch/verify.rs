//! Randomized cross-verification of a simulated architecture against the
//! reference cipher.

use super::{build_machine, ArchConfig, ArchError, Mode};
use crate::cipher::{encrypt_block, Block, MasterKey};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one [`verify_vs_reference`] sweep.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub config: ArchConfig,
    pub requested: usize,
    pub seed: u64,
    /// Vectors that matched the reference before the first failure.
    pub completed: usize,
    pub failure: Option<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// First counterexample of a failed sweep.
#[derive(Clone, Copy, Debug)]
pub struct VerifyFailure {
    pub index: usize,
    pub mode: Mode,
    pub key: MasterKey,
    pub input: Block,
    pub expected: Block,
    pub actual: Block,
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "index={} mode={} key=[{}] input=[{}] expected=[{}] actual=[{}]",
            self.index, self.mode, self.key, self.input, self.expected, self.actual
        )
    }
}

/// Drive `n_vectors` seeded pseudorandom (key, block) pairs through fresh
/// machines in both modes and compare every output with the reference
/// cipher. Stops at the first mismatch.
pub fn verify_vs_reference(
    config: ArchConfig,
    n_vectors: usize,
    seed: u64,
) -> Result<VerifyReport, ArchError> {
    config.validate()?;
    if n_vectors == 0 {
        return Err(ArchError::ZeroVectors);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        VerifyReport { config, requested: n_vectors, seed, completed: 0, failure: None };

    for index in 0..n_vectors {
        let key = MasterKey::from_words([
            rng.next_u32(),
            rng.next_u32(),
            rng.next_u32(),
            rng.next_u32(),
        ]);
        let plaintext = Block::new(rng.next_u32(), rng.next_u32());
        let ciphertext = encrypt_block(plaintext, &key);

        let mut machine = build_machine(config, &key)?;
        let enc = machine.run_job(Mode::Encrypt, &[plaintext]);
        if enc.outputs != [ciphertext] {
            report.failure = Some(VerifyFailure {
                index,
                mode: Mode::Encrypt,
                key,
                input: plaintext,
                expected: ciphertext,
                actual: enc.outputs[0],
            });
            return Ok(report);
        }

        let mut machine = build_machine(config, &key)?;
        let dec = machine.run_job(Mode::Decrypt, &[ciphertext]);
        if dec.outputs != [plaintext] {
            report.failure = Some(VerifyFailure {
                index,
                mode: Mode::Decrypt,
                key,
                input: ciphertext,
                expected: plaintext,
                actual: dec.outputs[0],
            });
            return Ok(report);
        }

        report.completed += 1;
    }
    Ok(report)
}
