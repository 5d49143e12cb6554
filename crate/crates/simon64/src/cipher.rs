//! Bit-exact SIMON64/128 primitive: word rotations, the round function and
//! its inverse, the key schedule, and whole-block encryption/decryption.
//!
//! This module is the golden reference that every simulated datapath in
//! [`crate::arch`] is checked against. All operations are pure functions
//! over 32-bit words and are safe to call from any thread.

use std::fmt;

/// One 32-bit cipher word.
pub type Word = u32;

/// Word width in bits.
pub const WORD_BITS: u32 = 32;
/// Block width in bits.
pub const BLOCK_BITS: u32 = 64;
/// Number of 32-bit words in the 128-bit master key.
pub const KEY_WORDS: usize = 4;
/// Number of cipher rounds, which is also the number of round keys.
pub const ROUNDS: usize = 44;
/// Number of key-expansion steps (round keys 4..=43 are derived).
pub const EXPANSION_STEPS: usize = ROUNDS - KEY_WORDS;

/// Key-schedule constant `c = 2^32 - 4`.
pub const C: Word = 0xFFFF_FFFC;

/// The 62-bit round-constant sequence consumed one bit per key-expansion
/// step. Index 0 is the bit used by the first expansion step; the order is
/// anchored to the published SIMON64/128 test vector.
pub const Z3: [u8; 62] =
    parse_bit_string("11011011101011000110010111100000010010001010011100110100001111");

const fn parse_bit_string(s: &str) -> [u8; 62] {
    let bytes = s.as_bytes();
    assert!(bytes.len() == 62);
    let mut out = [0u8; 62];
    let mut i = 0;
    while i < 62 {
        assert!(bytes[i] == b'0' || bytes[i] == b'1');
        out[i] = bytes[i] - b'0';
        i += 1;
    }
    out
}

/// Conflated per-step schedule constants `C[i] = c ^ z3[i]`. The schedule
/// reads only this table; the separate `c ^ z3` form lives in the
/// verification oracle.
const ROUND_CONSTANTS: [Word; EXPANSION_STEPS] = round_constant_table();

const fn round_constant_table() -> [Word; EXPANSION_STEPS] {
    let mut out = [0; EXPANSION_STEPS];
    let mut i = 0;
    while i < EXPANSION_STEPS {
        out[i] = C ^ Z3[i] as Word;
        i += 1;
    }
    out
}

/// Circular left rotation by `count` positions.
///
/// `count` must be in `0..=31`; every rotation the cipher uses is one of
/// the constants 1, 2, 3, 8, so any other count is a wiring bug and is
/// rejected rather than reduced mod 32.
#[inline]
pub fn rol(x: Word, count: u32) -> Word {
    assert!(count < WORD_BITS, "rotation count {count} out of range 0..=31");
    x.rotate_left(count)
}

/// Circular right rotation by `count` positions; inverse of [`rol`].
#[inline]
pub fn ror(x: Word, count: u32) -> Word {
    assert!(count < WORD_BITS, "rotation count {count} out of range 0..=31");
    x.rotate_right(count)
}

/// The nonlinear half of the round: `(rol(l,1) & rol(l,8)) ^ rol(l,2)`.
#[inline]
pub fn feistel_f(l: Word) -> Word {
    (rol(l, 1) & rol(l, 8)) ^ rol(l, 2)
}

/// Bit `i` of the round-constant sequence, as 0 or 1.
#[inline]
pub fn z3_bit(i: usize) -> Word {
    assert!(i < Z3.len(), "z3 index {i} out of range 0..=61");
    Z3[i] as Word
}

/// Conflated key-schedule constant for expansion step `i`: `c ^ z3[i]`.
#[inline]
pub fn round_constant(i: usize) -> Word {
    assert!(i < EXPANSION_STEPS, "expansion index {i} out of range 0..=39");
    ROUND_CONSTANTS[i]
}

/// One 64-bit block as an `(l, r)` word pair. `l` is the left-most word,
/// the one transformed by the nonlinear function during encryption.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub l: Word,
    pub r: Word,
}

impl Block {
    pub const ZERO: Block = Block { l: 0, r: 0 };

    pub const fn new(l: Word, r: Word) -> Self {
        Block { l, r }
    }

    /// The block with its halves exchanged.
    pub const fn swapped(self) -> Self {
        Block { l: self.r, r: self.l }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x} {:08x}", self.l, self.r)
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block({:08x} {:08x})", self.l, self.r)
    }
}

/// The 128-bit master key as four words `k0..k3`, where `k0` is the first
/// round key consumed by encryption.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct MasterKey {
    words: [Word; KEY_WORDS],
}

impl MasterKey {
    /// Build from `[k0, k1, k2, k3]` in consumption order.
    pub const fn from_words(words: [Word; KEY_WORDS]) -> Self {
        MasterKey { words }
    }

    /// Build from `[k3, k2, k1, k0]`, the most-significant-word-first
    /// layout used by the published test vectors and the CLI.
    pub const fn from_msw_first(words: [Word; KEY_WORDS]) -> Self {
        MasterKey { words: [words[3], words[2], words[1], words[0]] }
    }

    pub const fn words(&self) -> [Word; KEY_WORDS] {
        self.words
    }

    /// Word `k_i` of the key.
    pub fn word(&self, i: usize) -> Word {
        self.words[i]
    }
}

impl fmt::Display for MasterKey {
    /// Prints `k3 k2 k1 k0`, most-significant word first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:08x} {:08x} {:08x} {:08x}",
            self.words[3], self.words[2], self.words[1], self.words[0]
        )
    }
}

impl fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MasterKey({self})")
    }
}

/// The sliding window of four cached round keys `(k_i, k_{i+1}, k_{i+2},
/// k_{i+3})` the schedule expands from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KeyCache {
    slots: [Word; KEY_WORDS],
}

impl KeyCache {
    pub const fn new(slots: [Word; KEY_WORDS]) -> Self {
        KeyCache { slots }
    }

    pub const fn of_master(mk: &MasterKey) -> Self {
        KeyCache { slots: mk.words }
    }

    pub const fn slots(&self) -> [Word; KEY_WORDS] {
        self.slots
    }

    /// The oldest cached key `k_i`, the one a cache-routed datapath feeds
    /// to the round function.
    pub const fn first(&self) -> Word {
        self.slots[0]
    }
}

/// One key-expansion step: derives round key `k_{i+4}` from the cache at
/// position `i` and returns it together with the advanced cache.
///
/// `index` is the expansion step number in `0..=39`.
pub fn key_expand_step(cache: KeyCache, index: usize) -> (Word, KeyCache) {
    let s = cache.slots;
    let tmp = ror(s[3], 3) ^ s[1];
    let tmp = tmp ^ ror(tmp, 1);
    let new_key = tmp ^ s[0] ^ round_constant(index);
    (new_key, KeyCache::new([s[1], s[2], s[3], new_key]))
}

/// All 44 round keys, indexed by round number.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct RoundKeys {
    keys: [Word; ROUNDS],
}

impl RoundKeys {
    /// Round key for round `i`.
    pub fn key(&self, i: usize) -> Word {
        self.keys[i]
    }

    pub fn as_slice(&self) -> &[Word] {
        &self.keys
    }

    pub fn iter(&self) -> impl Iterator<Item = Word> + '_ {
        self.keys.iter().copied()
    }
}

impl std::ops::Index<usize> for RoundKeys {
    type Output = Word;

    fn index(&self, i: usize) -> &Word {
        &self.keys[i]
    }
}

impl fmt::Debug for RoundKeys {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.keys.iter().map(|k| format!("{k:08x}"))).finish()
    }
}

/// Expand a master key into all 44 round keys. Keys 0..=3 are the master
/// key words in order; each later key comes from [`key_expand_step`].
pub fn expand_key(mk: &MasterKey) -> RoundKeys {
    let mut keys = [0; ROUNDS];
    keys[..KEY_WORDS].copy_from_slice(&mk.words());
    let mut cache = KeyCache::of_master(mk);
    for i in 0..EXPANSION_STEPS {
        let (new_key, next) = key_expand_step(cache, i);
        keys[KEY_WORDS + i] = new_key;
        cache = next;
    }
    RoundKeys { keys }
}

/// One encryption round: `(l, r) -> (f(l) ^ r ^ k, l)`.
#[inline]
pub fn round_enc(b: Block, k: Word) -> Block {
    Block::new(feistel_f(b.l) ^ b.r ^ k, b.l)
}

/// Inverse round: `(l, r) -> (r, f(r) ^ l ^ k)`; undoes [`round_enc`]
/// under the same key.
#[inline]
pub fn round_dec(b: Block, k: Word) -> Block {
    Block::new(b.r, feistel_f(b.r) ^ b.l ^ k)
}

/// Encrypt one block with pre-expanded round keys.
pub fn encrypt_with_keys(p: Block, keys: &RoundKeys) -> Block {
    keys.iter().fold(p, round_enc)
}

/// Decrypt one block with pre-expanded round keys, consuming them in
/// reverse order.
pub fn decrypt_with_keys(c: Block, keys: &RoundKeys) -> Block {
    keys.as_slice().iter().rev().fold(c, |b, &k| round_dec(b, k))
}

/// Encrypt one block: 44 rounds with keys in index order.
pub fn encrypt_block(p: Block, mk: &MasterKey) -> Block {
    encrypt_with_keys(p, &expand_key(mk))
}

/// Decrypt one block: 44 inverse rounds with keys in reverse order.
pub fn decrypt_block(c: Block, mk: &MasterKey) -> Block {
    decrypt_with_keys(c, &expand_key(mk))
}
