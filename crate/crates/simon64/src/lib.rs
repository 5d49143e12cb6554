//! SIMON64/128 in three layers: the bit-exact cipher primitive
//! ([`cipher`]), cycle-accurate models of several hardware datapath
//! organizations for it ([`arch`]), and an analytical throughput and
//! throughput-to-area model ([`perf`]).

pub mod arch;
pub mod cipher;
pub mod perf;
