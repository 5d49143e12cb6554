//! Cycle-accurate models of the SIMON64/128 datapath organizations: three
//! iterative variants, a fully unrolled combinational design, outer-round
//! and mixed pipelines, and two experimental inner-round pipelines.
//!
//! Machines are networks of [`component`] registers and RAM advanced by a
//! two-phase clock: each [`SimMachine::step`] settles combinational logic,
//! latches falling-edge registers mid-cycle, settles again, then latches
//! rising-edge registers and the RAM. Every machine's output port is
//! registered and carries a valid bit, so the first valid output appears
//! exactly at the latency given by [`latency_of`].

pub mod component;
mod iterative;
mod pipeline;
mod trace;
mod verify;

pub use trace::{CycleTrace, TraceRecord};
pub use verify::{verify_vs_reference, VerifyFailure, VerifyReport};

use crate::cipher::{Block, MasterKey};
use iterative::IterCore;
use pipeline::PipeCore;
use thiserror::Error;

/// Job direction for a machine run.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Mode {
    Encrypt,
    Decrypt,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Encrypt => "encrypt",
            Mode::Decrypt => "decrypt",
        })
    }
}

/// When the iterative designs compute the round keys decryption needs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum PreExpansion {
    /// Keys are stored to RAM while encrypting; decryption is prefaced by
    /// one throwaway encryption of a bogus block.
    Integrated,
    /// A dedicated 44-cycle key-generation phase runs before either mode.
    Separate,
}

/// How round keys travel from the schedule to the round function.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum KeyRouting {
    /// The round function reads the head of the sliding key cache
    /// (RAM output when decrypting); one init cycle.
    CacheRouting,
    /// All keys pass through the RAM, adding one cycle of delay; two init
    /// cycles align keys with rounds.
    RamRouting,
}

/// How many register banks the inner-round pipeline inserts: one after the
/// key mix, or one after the key mix and one after the nonlinear function.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum InnerDepth {
    One,
    Two,
}

/// Which datapath a [`SimMachine`] embodies.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum ArchConfig {
    Iterative { pre_expansion: PreExpansion, routing: KeyRouting },
    FullUnrolled,
    OuterPipelined,
    InnerPipelined { depth: InnerDepth },
    MixedPipelined,
}

impl ArchConfig {
    pub const ITER_CACHE: ArchConfig = ArchConfig::Iterative {
        pre_expansion: PreExpansion::Integrated,
        routing: KeyRouting::CacheRouting,
    };
    pub const ITER_RAM: ArchConfig = ArchConfig::Iterative {
        pre_expansion: PreExpansion::Integrated,
        routing: KeyRouting::RamRouting,
    };
    pub const ITER_SEPARATE: ArchConfig = ArchConfig::Iterative {
        pre_expansion: PreExpansion::Separate,
        routing: KeyRouting::RamRouting,
    };

    /// Every implemented architecture, in CLI name order.
    pub const ALL: [ArchConfig; 8] = [
        ArchConfig::ITER_CACHE,
        ArchConfig::ITER_RAM,
        ArchConfig::ITER_SEPARATE,
        ArchConfig::FullUnrolled,
        ArchConfig::OuterPipelined,
        ArchConfig::InnerPipelined { depth: InnerDepth::One },
        ArchConfig::InnerPipelined { depth: InnerDepth::Two },
        ArchConfig::MixedPipelined,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ArchConfig::Iterative { pre_expansion, routing } => match (pre_expansion, routing) {
                (PreExpansion::Integrated, KeyRouting::CacheRouting) => "iter-cache",
                (PreExpansion::Integrated, KeyRouting::RamRouting) => "iter-ram",
                (PreExpansion::Separate, KeyRouting::RamRouting) => "iter-separate",
                (PreExpansion::Separate, KeyRouting::CacheRouting) => "iter-separate-cache",
            },
            ArchConfig::FullUnrolled => "unrolled",
            ArchConfig::OuterPipelined => "outer-pipe",
            ArchConfig::InnerPipelined { depth: InnerDepth::One } => "inner-pipe-1",
            ArchConfig::InnerPipelined { depth: InnerDepth::Two } => "inner-pipe-2",
            ArchConfig::MixedPipelined => "mixed-pipe",
        }
    }

    pub fn from_name(name: &str) -> Result<ArchConfig, ArchError> {
        ArchConfig::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| ArchError::UnknownArch(name.to_owned()))
    }

    /// The separate pre-expansion phase exists only with RAM routing; the
    /// remaining combination is rejected.
    pub fn validate(&self) -> Result<(), ArchError> {
        match self {
            ArchConfig::Iterative {
                pre_expansion: PreExpansion::Separate,
                routing: KeyRouting::CacheRouting,
            } => Err(ArchError::UnsupportedConfig),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for ArchConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ArchConfig {
    type Err = ArchError;

    fn from_str(s: &str) -> Result<Self, ArchError> {
        ArchConfig::from_name(s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArchError {
    #[error("separate pre-expansion is only implemented with ram-routing")]
    UnsupportedConfig,
    #[error("unknown architecture `{0}`")]
    UnknownArch(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("vector count must be at least 1")]
    ZeroVectors,
}

/// Closed-form cycle counts for one job on a cold machine.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LatencyReport {
    /// Cycles from presenting a block to its output becoming valid.
    pub latency_cycles: u64,
    /// Cycles between successive block inputs the datapath accepts.
    pub initiation_interval: u64,
    /// One-time key pre-expansion cycles required before the first block
    /// (0 when the mode needs none).
    pub pre_expansion_cycles: u64,
    /// Total cycles the job consumed (pre-expansion included); for the
    /// closed form this is the single-block figure.
    pub total_cycles: u64,
}

/// The per-architecture cycle-accounting contract. `config` must be valid.
pub fn latency_of(config: ArchConfig, mode: Mode) -> LatencyReport {
    config.validate().expect("latency_of requires a valid configuration");
    let (latency, ii, preexp) = match (config, mode) {
        // 1 init cycle + 44 rounds; decryption needs the RAM filled by a
        // bogus encryption plus one cycle to drain the staged final write.
        (ArchConfig::ITER_CACHE, Mode::Encrypt) => (45, 45, 0),
        (ArchConfig::ITER_CACHE, Mode::Decrypt) => (45, 45, 46),
        // 2 init cycles + 44 rounds; the bogus encryption itself fills
        // the RAM completely.
        (ArchConfig::ITER_RAM, Mode::Encrypt) => (46, 46, 0),
        (ArchConfig::ITER_RAM, Mode::Decrypt) => (46, 46, 46),
        // Dedicated 44-cycle generation phase before either mode.
        (ArchConfig::ITER_SEPARATE, _) => (46, 46, 44),
        (ArchConfig::FullUnrolled, _) => (1, 1, 0),
        (ArchConfig::OuterPipelined, _) => (44, 1, 0),
        // Same schedule as iter-cache; the inner registers are
        // falling-edge, so each round still fits in one cycle.
        (ArchConfig::InnerPipelined { .. }, Mode::Encrypt) => (45, 45, 0),
        (ArchConfig::InnerPipelined { .. }, Mode::Decrypt) => (45, 45, 46),
        (ArchConfig::MixedPipelined, _) => (45, 1, 0),
        (ArchConfig::Iterative { .. }, _) => unreachable!("validated above"),
    };
    LatencyReport {
        latency_cycles: latency,
        initiation_interval: ii,
        pre_expansion_cycles: preexp,
        total_cycles: preexp + latency,
    }
}

/// Cycles a cold machine takes to complete `blocks` inputs in one job.
pub fn expected_job_cycles(config: ArchConfig, mode: Mode, blocks: usize) -> u64 {
    if blocks == 0 {
        return 0;
    }
    let l = latency_of(config, mode);
    if l.initiation_interval == 1 {
        l.latency_cycles + blocks as u64 - 1
    } else {
        l.pre_expansion_cycles + blocks as u64 * l.latency_cycles
    }
}

/// Everything a finished [`SimMachine::run_job`] reports.
#[derive(Clone, Debug)]
pub struct JobOutput {
    pub outputs: Vec<Block>,
    pub trace: CycleTrace,
    pub report: LatencyReport,
}

pub(crate) struct StepCtx<'a> {
    cycle: u64,
    tracing: bool,
    trace: &'a mut CycleTrace,
}

impl StepCtx<'_> {
    /// Log a combinational signal settled during the current cycle.
    pub(crate) fn comb(&mut self, signal: &'static str, width: u8, value: u64) {
        if self.tracing {
            self.trace.push(self.cycle, signal, width, value);
        }
    }

    /// Log a register output as it becomes visible after the rising edge.
    pub(crate) fn reg(&mut self, signal: &'static str, width: u8, value: u64) {
        if self.tracing {
            self.trace.push(self.cycle + 1, signal, width, value);
        }
    }
}

pub(crate) fn pack_block(b: Block) -> u64 {
    (u64::from(b.l) << 32) | u64::from(b.r)
}

enum Core {
    Iter(IterCore),
    Pipe(PipeCore),
}

/// One clocked instance of an architecture, bound to a master key.
///
/// A machine is single-threaded: `step`/`run_job` mutate internal state.
/// Distinct instances are independent and may run on separate threads.
pub struct SimMachine {
    config: ArchConfig,
    mode: Mode,
    cycle: u64,
    tracing: bool,
    trace: CycleTrace,
    core: Core,
}

/// Wire a machine for `config`. Fails on the rejected iterative variant.
pub fn build_machine(config: ArchConfig, key: &MasterKey) -> Result<SimMachine, ArchError> {
    SimMachine::new(config, key)
}

/// The named signals of `machine`'s last run. Unknown names are errors;
/// a machine that has not run yields an empty trace.
pub fn trace_signals(machine: &SimMachine, names: &[&str]) -> Result<CycleTrace, ArchError> {
    let known = machine.signals();
    for name in names {
        if !known.iter().any(|(n, _)| n == name) {
            return Err(ArchError::UnknownSignal((*name).to_owned()));
        }
    }
    Ok(machine.trace.select(names))
}

impl SimMachine {
    pub fn new(config: ArchConfig, key: &MasterKey) -> Result<Self, ArchError> {
        config.validate()?;
        let core = match config {
            ArchConfig::Iterative { pre_expansion, routing } => {
                Core::Iter(IterCore::new(pre_expansion, routing, None, key))
            }
            ArchConfig::InnerPipelined { depth } => Core::Iter(IterCore::new(
                PreExpansion::Integrated,
                KeyRouting::CacheRouting,
                Some(depth),
                key,
            )),
            ArchConfig::FullUnrolled | ArchConfig::OuterPipelined | ArchConfig::MixedPipelined => {
                Core::Pipe(PipeCore::new(config, key))
            }
        };
        Ok(SimMachine {
            config,
            mode: Mode::Encrypt,
            cycle: 0,
            tracing: false,
            trace: CycleTrace::new(),
            core,
        })
    }

    pub fn config(&self) -> ArchConfig {
        self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Completed clock cycles since the machine was built.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Select the job direction. Takes effect for blocks presented next;
    /// switching while blocks are in flight is a driving error.
    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
        if let Core::Pipe(p) = &mut self.core {
            p.set_dir(mode);
        }
    }

    /// Enable per-cycle recording of this machine's signal set.
    pub fn set_tracing(&mut self, on: bool) {
        self.tracing = on;
    }

    /// The signal log of the last run (empty before any traced run).
    pub fn trace(&self) -> &CycleTrace {
        &self.trace
    }

    /// Name and bit width of every traceable signal of this machine.
    pub fn signals(&self) -> &'static [(&'static str, u8)] {
        match self.core {
            Core::Iter(_) => iterative::SIGNALS,
            Core::Pipe(_) => pipeline::SIGNALS,
        }
    }

    /// Drive the input port; the block is accepted at the machine's next
    /// accepting cycle (immediately for pipelined kinds when stepping).
    pub fn present_input(&mut self, block: Block) {
        match &mut self.core {
            Core::Iter(c) => c.present(block, self.mode, false),
            Core::Pipe(p) => p.present(block),
        }
    }

    /// Advance one full clock cycle: settle, falling edge, settle, rising
    /// edge. Idle machines just count the cycle.
    pub fn step(&mut self) {
        let mut ctx = StepCtx { cycle: self.cycle, tracing: self.tracing, trace: &mut self.trace };
        match &mut self.core {
            Core::Iter(c) => c.step(&mut ctx),
            Core::Pipe(p) => p.step(&mut ctx),
        }
        self.cycle += 1;
    }

    /// The output port: `Some` while the valid flag is up.
    pub fn output(&self) -> Option<Block> {
        match &self.core {
            Core::Iter(c) => c.output(),
            Core::Pipe(p) => p.output(),
        }
    }

    /// True once all 44 round keys sit in the key RAM (iterative kinds).
    pub fn ram_filled(&self) -> bool {
        match &self.core {
            Core::Iter(c) => c.ram_filled(),
            Core::Pipe(_) => false,
        }
    }

    /// Round-key RAM cell inspection for iterative kinds.
    pub fn ram_cell(&self, i: usize) -> Option<crate::cipher::Word> {
        match &self.core {
            Core::Iter(c) => Some(c.ram_cell(i)),
            Core::Pipe(_) => None,
        }
    }

    /// Number of round-function stages instantiated in the datapath.
    pub fn round_stages(&self) -> usize {
        match &self.core {
            Core::Iter(_) => 1,
            Core::Pipe(p) => p.round_stages(),
        }
    }

    /// Number of 64-bit registers between round stages.
    pub fn inter_round_registers(&self) -> usize {
        match &self.core {
            Core::Iter(_) => 0,
            Core::Pipe(p) => p.inter_round_registers(),
        }
    }

    fn reset_io(&mut self) {
        match &mut self.core {
            Core::Iter(c) => c.reset_io(),
            Core::Pipe(p) => p.reset_io(),
        }
    }

    /// Run one whole job: trigger any required key pre-expansion, feed
    /// `blocks` at the architecture's initiation interval, and collect the
    /// outputs. The report carries observed cycle counts; on a cold
    /// machine they equal [`latency_of`].
    pub fn run_job(&mut self, mode: Mode, blocks: &[Block]) -> JobOutput {
        self.set_mode(mode);
        self.trace.clear();
        self.reset_io();
        let closed = latency_of(self.config, mode);
        let job_start = self.cycle;

        let needs_preexp = match &self.core {
            Core::Iter(c) => c.needs_pre_expansion(mode),
            Core::Pipe(_) => false,
        };
        let mut preexp_spent = 0;
        if needs_preexp && !blocks.is_empty() {
            let before = self.cycle;
            self.run_pre_expansion(mode);
            preexp_spent = self.cycle - before;
        }

        let mut outputs = Vec::with_capacity(blocks.len());
        let mut first_latency = 0;
        if !blocks.is_empty() {
            if closed.initiation_interval == 1 {
                // Pipelined: a new block every cycle.
                let mut next_in = 0;
                let mut stepped = 0u64;
                while outputs.len() < blocks.len() {
                    if next_in < blocks.len() {
                        self.present_input(blocks[next_in]);
                        next_in += 1;
                    }
                    self.step();
                    stepped += 1;
                    if let Some(out) = self.output() {
                        if outputs.is_empty() {
                            first_latency = stepped;
                        }
                        outputs.push(out);
                    }
                    assert!(
                        stepped <= closed.latency_cycles + blocks.len() as u64 + 8,
                        "{} produced no output within the latency bound",
                        self.config
                    );
                }
            } else {
                // Iterative: one block in flight at a time.
                for (i, block) in blocks.iter().enumerate() {
                    self.present_input(*block);
                    let mut waited = 0u64;
                    let out = loop {
                        self.step();
                        waited += 1;
                        if let Some(out) = self.output() {
                            break out;
                        }
                        assert!(
                            waited <= closed.latency_cycles + 8,
                            "{} produced no output within the latency bound",
                            self.config
                        );
                    };
                    if i == 0 {
                        first_latency = waited;
                    }
                    outputs.push(out);
                }
            }
        }

        let report = LatencyReport {
            latency_cycles: if blocks.is_empty() { closed.latency_cycles } else { first_latency },
            initiation_interval: closed.initiation_interval,
            pre_expansion_cycles: preexp_spent,
            total_cycles: self.cycle - job_start,
        };
        JobOutput { outputs, trace: self.trace.clone(), report }
    }

    fn run_pre_expansion(&mut self, mode: Mode) {
        let pre = match &self.core {
            Core::Iter(c) => c.pre_expansion(),
            Core::Pipe(_) => return,
        };
        match pre {
            PreExpansion::Separate => {
                if let Core::Iter(c) = &mut self.core {
                    c.request_keygen();
                }
                for _ in 0..crate::cipher::ROUNDS {
                    self.step();
                }
            }
            PreExpansion::Integrated => {
                debug_assert_eq!(mode, Mode::Decrypt);
                if let Core::Iter(c) = &mut self.core {
                    c.present(Block::ZERO, Mode::Encrypt, true);
                }
                let bogus_latency = latency_of(self.config, Mode::Encrypt).latency_cycles;
                for _ in 0..bogus_latency {
                    self.step();
                }
                // Cache routing stages RAM writes one cycle behind key
                // consumption; one idle cycle drains the final write.
                while !self.ram_filled() {
                    self.step();
                }
            }
        }
        debug_assert!(self.ram_filled());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for config in ArchConfig::ALL {
            assert_eq!(ArchConfig::from_name(config.name()).unwrap(), config);
            assert!(config.validate().is_ok());
        }
        assert_eq!(
            ArchConfig::from_name("iter-cache").unwrap(),
            ArchConfig::ITER_CACHE
        );
        assert!(matches!(
            ArchConfig::from_name("systolic"),
            Err(ArchError::UnknownArch(_))
        ));
    }

    #[test]
    fn separate_cache_routing_is_rejected() {
        let bad = ArchConfig::Iterative {
            pre_expansion: PreExpansion::Separate,
            routing: KeyRouting::CacheRouting,
        };
        assert_eq!(bad.validate(), Err(ArchError::UnsupportedConfig));
        let key = MasterKey::from_words([0; 4]);
        assert!(build_machine(bad, &key).is_err());
    }

    #[test]
    fn latency_table_matches_ledger() {
        use Mode::*;
        let l = |c, m| {
            let r = latency_of(c, m);
            (r.latency_cycles, r.initiation_interval, r.pre_expansion_cycles)
        };
        assert_eq!(l(ArchConfig::ITER_CACHE, Encrypt), (45, 45, 0));
        assert_eq!(l(ArchConfig::ITER_CACHE, Decrypt), (45, 45, 46));
        assert_eq!(l(ArchConfig::ITER_RAM, Encrypt), (46, 46, 0));
        assert_eq!(l(ArchConfig::ITER_RAM, Decrypt), (46, 46, 46));
        assert_eq!(l(ArchConfig::ITER_SEPARATE, Encrypt), (46, 46, 44));
        assert_eq!(l(ArchConfig::ITER_SEPARATE, Decrypt), (46, 46, 44));
        assert_eq!(l(ArchConfig::FullUnrolled, Encrypt), (1, 1, 0));
        assert_eq!(l(ArchConfig::OuterPipelined, Encrypt), (44, 1, 0));
        assert_eq!(l(ArchConfig::OuterPipelined, Decrypt), (44, 1, 0));
        let inner = ArchConfig::InnerPipelined { depth: InnerDepth::One };
        assert_eq!(l(inner, Encrypt), (45, 45, 0));
        assert_eq!(l(inner, Decrypt), (45, 45, 46));
        assert_eq!(l(ArchConfig::MixedPipelined, Encrypt), (45, 1, 0));
    }

    #[test]
    fn expected_job_cycles_closed_forms() {
        use Mode::*;
        assert_eq!(expected_job_cycles(ArchConfig::OuterPipelined, Encrypt, 100), 143);
        assert_eq!(expected_job_cycles(ArchConfig::FullUnrolled, Encrypt, 10), 10);
        assert_eq!(expected_job_cycles(ArchConfig::MixedPipelined, Encrypt, 100), 144);
        assert_eq!(expected_job_cycles(ArchConfig::ITER_CACHE, Encrypt, 3), 135);
        assert_eq!(expected_job_cycles(ArchConfig::ITER_CACHE, Decrypt, 3), 46 + 135);
        assert_eq!(expected_job_cycles(ArchConfig::ITER_SEPARATE, Encrypt, 2), 44 + 92);
        assert_eq!(expected_job_cycles(ArchConfig::ITER_RAM, Decrypt, 0), 0);
    }
}
