//! The iterative datapath: one combinational round closed over a feedback
//! register, a sliding 4-word key cache, and a 44-cell round-key RAM.
//! Covers the three iterative variants plus the inner-round pipelines,
//! which are the cache-routing variant with falling-edge registers
//! inserted inside the round.

use super::component::{ClockedReg, Edge, SyncRam};
use super::{pack_block, InnerDepth, KeyRouting, Mode, PreExpansion, StepCtx};
use crate::cipher::{
    feistel_f, key_expand_step, round_enc, Block, KeyCache, MasterKey, Word, EXPANSION_STEPS,
    KEY_WORDS, ROUNDS,
};

pub(super) const SIGNALS: &[(&str, u8)] =
    &[("state", 64), ("round_key", 32), ("out_valid", 1), ("output", 64)];

const LAST_ROUND: u8 = ROUNDS as u8 - 1;

/// Control state, one cycle per variant-specific phase.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Phase {
    Idle,
    /// Dedicated key-generation phase (separate pre-expansion); `g` is the
    /// index generated this cycle.
    KeyGen { g: u8 },
    /// Second init cycle of the RAM-routing variants: presents the first
    /// read address so keys align with rounds.
    Align,
    Round { i: u8 },
}

/// A block travelling through the machine, tagged with its orientation
/// and whether it is pre-expansion filler.
#[derive(Clone, Copy)]
struct JobInput {
    block: Block,
    dir: Mode,
    bogus: bool,
}

pub(super) struct IterCore {
    pre_expansion: PreExpansion,
    routing: KeyRouting,
    inner: Option<InnerDepth>,
    master: [Word; KEY_WORDS],

    state: ClockedReg<Block>,
    cache: ClockedReg<[Word; KEY_WORDS]>,
    /// Falling-edge registers of the inner-round pipelines.
    gamma: ClockedReg<Word>,
    phi: ClockedReg<Word>,
    valid: ClockedReg<bool>,
    /// Cache-routing write path: the consumed key and its round index,
    /// registered one cycle before reaching the RAM write port.
    staged_write: ClockedReg<Option<(u8, Word)>>,
    ram: SyncRam,

    phase: ClockedReg<Phase>,
    /// Next key index the integrated RAM-routing generator emits
    /// (saturates at 44 when generation is done).
    gen: ClockedReg<u8>,

    pending: Option<JobInput>,
    keygen_request: bool,
    dir: Mode,
    bogus: bool,
    loaded: bool,
    ram_filled: bool,
}

impl IterCore {
    pub(super) fn new(
        pre_expansion: PreExpansion,
        routing: KeyRouting,
        inner: Option<InnerDepth>,
        key: &MasterKey,
    ) -> Self {
        IterCore {
            pre_expansion,
            routing,
            inner,
            master: key.words(),
            state: ClockedReg::new(Edge::Rising, Block::ZERO),
            cache: ClockedReg::new(Edge::Rising, key.words()),
            gamma: ClockedReg::new(Edge::Falling, 0),
            phi: ClockedReg::new(Edge::Falling, 0),
            valid: ClockedReg::new(Edge::Rising, false),
            staged_write: ClockedReg::new(Edge::Rising, None),
            ram: SyncRam::new(),
            phase: ClockedReg::new(Edge::Rising, Phase::Idle),
            gen: ClockedReg::new(Edge::Rising, ROUNDS as u8),
            pending: None,
            keygen_request: false,
            dir: Mode::Encrypt,
            bogus: false,
            loaded: false,
            ram_filled: false,
        }
    }

    pub(super) fn pre_expansion(&self) -> PreExpansion {
        self.pre_expansion
    }

    pub(super) fn ram_filled(&self) -> bool {
        self.ram_filled
    }

    pub(super) fn ram_cell(&self, i: usize) -> Word {
        self.ram.cell(i)
    }

    pub(super) fn needs_pre_expansion(&self, mode: Mode) -> bool {
        if self.ram_filled {
            return false;
        }
        match self.pre_expansion {
            PreExpansion::Separate => true,
            PreExpansion::Integrated => mode == Mode::Decrypt,
        }
    }

    pub(super) fn present(&mut self, block: Block, dir: Mode, bogus: bool) {
        self.pending = Some(JobInput { block, dir, bogus });
    }

    pub(super) fn request_keygen(&mut self) {
        self.keygen_request = true;
    }

    pub(super) fn output(&self) -> Option<Block> {
        if !self.valid.q() {
            return None;
        }
        let b = self.state.q();
        Some(if self.dir == Mode::Decrypt { b.swapped() } else { b })
    }

    pub(super) fn reset_io(&mut self) {
        self.pending = None;
        self.keygen_request = false;
        self.valid.force(false);
        self.phase.force(Phase::Idle);
    }

    /// The round key wire feeding the round function this cycle.
    fn round_key(&self) -> Word {
        match self.routing {
            KeyRouting::CacheRouting => match self.dir {
                Mode::Encrypt => self.cache.q()[0],
                Mode::Decrypt => self.ram.read_out(),
            },
            KeyRouting::RamRouting => self.ram.read_out(),
        }
    }

    /// Integrated RAM-routing key generator: key `g` of the full stream
    /// k0..k43, tapping the master key pins for the first four.
    fn generator_output(&self, g: u8) -> Word {
        if (g as usize) < KEY_WORDS {
            self.master[g as usize]
        } else {
            key_expand_step(KeyCache::new(self.cache.q()), g as usize - KEY_WORDS).0
        }
    }

    pub(super) fn step(&mut self, ctx: &mut StepCtx<'_>) {
        let phase = self.phase.q();
        let starting = phase == Phase::Idle && self.pending.is_some();
        let keygen_starting = phase == Phase::Idle && !starting && self.keygen_request;

        if starting {
            let input = self.pending.as_ref().unwrap();
            self.dir = input.dir;
            self.bogus = input.bogus;
        }

        // ---- first settle: values feeding the falling-edge registers ----
        let key = if let Phase::Round { .. } = phase { self.round_key() } else { 0 };
        if let Phase::Round { .. } = phase {
            if self.inner.is_some() {
                self.gamma.set_d(self.state.q().r ^ key);
            }
            if self.inner == Some(InnerDepth::Two) {
                self.phi.set_d(feistel_f(self.state.q().l));
            }
        }

        // ---- falling edge ----
        self.gamma.latch(Edge::Falling);
        self.phi.latch(Edge::Falling);

        // ---- second settle: round datapath, key machinery, RAM ports ----
        let mut wrote_last_cell = false;
        let mut drive_write = |ram: &mut SyncRam, addr: u8, data: Word| {
            ram.present_write(addr as usize, data);
            if addr == LAST_ROUND {
                wrote_last_cell = true;
            }
        };

        // The cache-routing RAM write port is always driven from the
        // staged register, so the final write drains one cycle after the
        // last round regardless of what the control is doing.
        if self.routing == KeyRouting::CacheRouting {
            if let Some((addr, data)) = self.staged_write.q() {
                drive_write(&mut self.ram, addr, data);
                self.staged_write.set_d(None);
            }
        }

        // Integrated RAM-routing generation runs alongside encryption.
        let generating = self.routing == KeyRouting::RamRouting
            && self.pre_expansion == PreExpansion::Integrated
            && self.dir == Mode::Encrypt
            && (starting || matches!(phase, Phase::Align | Phase::Round { .. }));
        if generating {
            let g = if starting { 0 } else { self.gen.q() };
            if (g as usize) < ROUNDS {
                let out = self.generator_output(g);
                drive_write(&mut self.ram, g, out);
                if (g as usize) >= KEY_WORDS {
                    let c = self.cache.q();
                    self.cache.set_d([c[1], c[2], c[3], out]);
                }
                self.gen.set_d(g + 1);
            }
        }

        match phase {
            Phase::Idle if starting => {
                let input = self.pending.take().unwrap();
                let oriented = match self.dir {
                    Mode::Encrypt => input.block,
                    Mode::Decrypt => input.block.swapped(),
                };
                self.state.set_d(oriented);
                self.valid.set_d(false);
                match self.routing {
                    KeyRouting::CacheRouting => {
                        self.cache.set_d(self.master);
                        if self.dir == Mode::Decrypt {
                            self.ram.present_read(LAST_ROUND as usize);
                        }
                        self.phase.set_d(Phase::Round { i: 0 });
                    }
                    KeyRouting::RamRouting => {
                        if generating {
                            // Generation restarted above; reload the window.
                            self.cache.set_d(self.master);
                        }
                        self.phase.set_d(Phase::Align);
                    }
                }
            }
            Phase::Idle if keygen_starting => {
                self.keygen_request = false;
                self.cache.set_d(self.master);
                drive_write(&mut self.ram, 0, self.master[0]);
                self.phase.set_d(Phase::KeyGen { g: 1 });
            }
            Phase::Idle => {}
            Phase::KeyGen { g } => {
                let out = self.generator_output(g);
                drive_write(&mut self.ram, g, out);
                if (g as usize) >= KEY_WORDS {
                    let c = self.cache.q();
                    self.cache.set_d([c[1], c[2], c[3], out]);
                }
                self.phase.set_d(if g < LAST_ROUND {
                    Phase::KeyGen { g: g + 1 }
                } else {
                    Phase::Idle
                });
            }
            Phase::Align => {
                let first_addr = match self.dir {
                    Mode::Encrypt => 0,
                    Mode::Decrypt => LAST_ROUND as usize,
                };
                self.ram.present_read(first_addr);
                self.phase.set_d(Phase::Round { i: 0 });
            }
            Phase::Round { i } => {
                let l = self.state.q().l;
                let out = match self.inner {
                    None => round_enc(self.state.q(), key),
                    Some(InnerDepth::One) => Block::new(feistel_f(l) ^ self.gamma.q(), l),
                    Some(InnerDepth::Two) => Block::new(self.phi.q() ^ self.gamma.q(), l),
                };
                self.state.set_d(out);
                ctx.comb("round_key", 32, u64::from(key));

                match self.routing {
                    KeyRouting::CacheRouting => match self.dir {
                        Mode::Encrypt => {
                            // Schedule computes the cache tail; beyond the
                            // last expansion step the tail is don't-care.
                            let c = self.cache.q();
                            let tail = if (i as usize) < EXPANSION_STEPS {
                                key_expand_step(KeyCache::new(c), i as usize).0
                            } else {
                                0
                            };
                            self.cache.set_d([c[1], c[2], c[3], tail]);
                            self.staged_write.set_d(Some((i, key)));
                        }
                        Mode::Decrypt => {
                            self.ram.present_read(
                                (LAST_ROUND as usize).saturating_sub(i as usize + 1),
                            );
                        }
                    },
                    KeyRouting::RamRouting => {
                        let next_addr = match self.dir {
                            Mode::Encrypt => (i as usize + 1).min(LAST_ROUND as usize),
                            Mode::Decrypt => {
                                (LAST_ROUND as usize).saturating_sub(i as usize + 1)
                            }
                        };
                        self.ram.present_read(next_addr);
                    }
                }

                if i < LAST_ROUND {
                    self.phase.set_d(Phase::Round { i: i + 1 });
                } else {
                    self.phase.set_d(Phase::Idle);
                    if !self.bogus {
                        self.valid.set_d(true);
                    }
                }
            }
        }

        // ---- rising edge ----
        self.state.latch(Edge::Rising);
        self.cache.latch(Edge::Rising);
        self.valid.latch(Edge::Rising);
        self.staged_write.latch(Edge::Rising);
        self.phase.latch(Edge::Rising);
        self.gen.latch(Edge::Rising);
        self.ram.latch();
        if wrote_last_cell {
            self.ram_filled = true;
        }
        if starting {
            self.loaded = true;
        }

        if self.loaded {
            ctx.reg("state", 64, pack_block(self.state.q()));
        }
        ctx.reg("out_valid", 1, u64::from(self.valid.q()));
        if let Some(out) = self.output() {
            ctx.reg("output", 64, pack_block(out));
        }
    }
}
