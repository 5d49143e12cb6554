//! The unrolled datapaths: 44 replicated combinational rounds, optionally
//! with 64-bit rising-edge registers between them (outer-round pipeline)
//! and falling-edge registers inside each round (mixed pipeline). The key
//! schedule is fully unrolled; since the key pins are stable for the
//! machine's lifetime, its network is settled once at build time. Keys for
//! decryption are reversed taps, so no RAM exists here.

use super::component::{ClockedReg, Edge};
use super::{pack_block, ArchConfig, Mode, StepCtx};
use crate::cipher::{expand_key, feistel_f, round_enc, Block, MasterKey, Word, ROUNDS};

pub(super) const SIGNALS: &[(&str, u8)] = &[("out_valid", 1), ("output", 64)];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum PipeKind {
    /// All 44 rounds settle in one cycle; only the output is registered.
    Unrolled,
    /// 43 inter-round registers; one block enters per cycle.
    Outer,
    /// Outer pipeline with the two-register inner round and a registered
    /// input, adding one cycle of latency.
    Mixed,
}

/// A pipeline slot: block data plus its valid bit travelling together.
#[derive(Clone, Copy, Debug)]
struct Stage {
    data: Block,
    valid: bool,
}

const BUBBLE: Stage = Stage { data: Block::ZERO, valid: false };

pub(super) struct PipeCore {
    kind: PipeKind,
    keys: [Word; ROUNDS],
    dir: Mode,
    pending: Option<Block>,

    /// Mixed only: 64-bit input register ahead of the first round.
    input_reg: ClockedReg<Stage>,
    /// Inter-round registers (outer/mixed), one fewer than rounds.
    stages: Vec<ClockedReg<Stage>>,
    /// Mixed only: falling-edge registers after the key mix and after the
    /// nonlinear function, one pair per round.
    gamma: Vec<ClockedReg<Word>>,
    phi: Vec<ClockedReg<Word>>,
    out_reg: ClockedReg<Stage>,
}

impl PipeCore {
    pub(super) fn new(config: ArchConfig, key: &MasterKey) -> Self {
        let kind = match config {
            ArchConfig::FullUnrolled => PipeKind::Unrolled,
            ArchConfig::OuterPipelined => PipeKind::Outer,
            ArchConfig::MixedPipelined => PipeKind::Mixed,
            _ => unreachable!("not an unrolled architecture"),
        };
        let mut keys = [0; ROUNDS];
        keys.copy_from_slice(expand_key(key).as_slice());
        let stage_count = if kind == PipeKind::Unrolled { 0 } else { ROUNDS - 1 };
        let inner_count = if kind == PipeKind::Mixed { ROUNDS } else { 0 };
        PipeCore {
            kind,
            keys,
            dir: Mode::Encrypt,
            pending: None,
            input_reg: ClockedReg::new(Edge::Rising, BUBBLE),
            stages: (0..stage_count).map(|_| ClockedReg::new(Edge::Rising, BUBBLE)).collect(),
            gamma: (0..inner_count).map(|_| ClockedReg::new(Edge::Falling, 0)).collect(),
            phi: (0..inner_count).map(|_| ClockedReg::new(Edge::Falling, 0)).collect(),
            out_reg: ClockedReg::new(Edge::Rising, BUBBLE),
        }
    }

    pub(super) fn set_dir(&mut self, dir: Mode) {
        self.dir = dir;
    }

    pub(super) fn present(&mut self, block: Block) {
        self.pending = Some(block);
    }

    pub(super) fn output(&self) -> Option<Block> {
        let out = self.out_reg.q();
        if !out.valid {
            return None;
        }
        Some(if self.dir == Mode::Decrypt { out.data.swapped() } else { out.data })
    }

    pub(super) fn reset_io(&mut self) {
        self.pending = None;
        self.input_reg.force(BUBBLE);
        for s in &mut self.stages {
            s.force(BUBBLE);
        }
        self.out_reg.force(BUBBLE);
    }

    pub(super) fn round_stages(&self) -> usize {
        ROUNDS
    }

    pub(super) fn inter_round_registers(&self) -> usize {
        self.stages.len()
    }

    /// Key tap of round `k`: index order when encrypting, reversed when
    /// decrypting (the final swap lives on the output port).
    fn tap(&self, k: usize) -> Word {
        match self.dir {
            Mode::Encrypt => self.keys[k],
            Mode::Decrypt => self.keys[ROUNDS - 1 - k],
        }
    }

    /// What round `k` sees at its input during the current cycle.
    fn source(&self, k: usize, entry: Stage) -> Stage {
        if k == 0 {
            match self.kind {
                PipeKind::Mixed => self.input_reg.q(),
                _ => entry,
            }
        } else {
            self.stages[k - 1].q()
        }
    }

    pub(super) fn step(&mut self, ctx: &mut StepCtx<'_>) {
        let entry = match self.pending.take() {
            Some(b) => Stage {
                data: if self.dir == Mode::Decrypt { b.swapped() } else { b },
                valid: true,
            },
            None => BUBBLE,
        };

        // ---- first settle + falling edge: inner registers (mixed) ----
        if self.kind == PipeKind::Mixed {
            for k in 0..ROUNDS {
                let src = self.source(k, entry);
                let tap = self.tap(k);
                self.gamma[k].set_d(src.data.r ^ tap);
                self.phi[k].set_d(feistel_f(src.data.l));
            }
            for k in 0..ROUNDS {
                self.gamma[k].latch(Edge::Falling);
                self.phi[k].latch(Edge::Falling);
            }
        }

        // ---- second settle: next value of every rising-edge register ----
        match self.kind {
            PipeKind::Unrolled => {
                let mut data = entry.data;
                for k in 0..ROUNDS {
                    data = round_enc(data, self.tap(k));
                }
                self.out_reg.set_d(Stage { data, valid: entry.valid });
            }
            PipeKind::Outer => {
                for k in 0..ROUNDS - 1 {
                    let src = self.source(k, entry);
                    let tap = self.tap(k);
                    self.stages[k].set_d(Stage {
                        data: round_enc(src.data, tap),
                        valid: src.valid,
                    });
                }
                let last = self.source(ROUNDS - 1, entry);
                self.out_reg.set_d(Stage {
                    data: round_enc(last.data, self.tap(ROUNDS - 1)),
                    valid: last.valid,
                });
            }
            PipeKind::Mixed => {
                for k in 0..ROUNDS - 1 {
                    let src = self.source(k, entry);
                    let staged = Block::new(self.phi[k].q() ^ self.gamma[k].q(), src.data.l);
                    self.stages[k].set_d(Stage { data: staged, valid: src.valid });
                }
                let last = self.source(ROUNDS - 1, entry);
                self.out_reg.set_d(Stage {
                    data: Block::new(
                        self.phi[ROUNDS - 1].q() ^ self.gamma[ROUNDS - 1].q(),
                        last.data.l,
                    ),
                    valid: last.valid,
                });
                self.input_reg.set_d(entry);
            }
        }

        // ---- rising edge ----
        self.input_reg.latch(Edge::Rising);
        for s in &mut self.stages {
            s.latch(Edge::Rising);
        }
        self.out_reg.latch(Edge::Rising);

        ctx.reg("out_valid", 1, u64::from(self.out_reg.q().valid));
        if let Some(out) = self.output() {
            ctx.reg("output", 64, pack_block(out));
        }
    }
}
