//! Per-cycle signal logging.

use std::fmt::Write as _;

/// One logged signal sample.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TraceRecord {
    pub cycle: u64,
    pub signal: &'static str,
    /// Signal width in bits; controls the rendered hex width.
    pub width: u8,
    pub value: u64,
}

/// A deterministic, cycle-ordered log of selected signals over one run.
#[derive(Clone, Default, Debug)]
pub struct CycleTrace {
    records: Vec<TraceRecord>,
}

impl CycleTrace {
    pub fn new() -> Self {
        CycleTrace::default()
    }

    pub(crate) fn push(&mut self, cycle: u64, signal: &'static str, width: u8, value: u64) {
        debug_assert!(self.records.last().map_or(true, |r| r.cycle <= cycle));
        self.records.push(TraceRecord { cycle, signal, width, value });
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }

    /// Records for one signal, in cycle order.
    pub fn signal(&self, name: &str) -> impl Iterator<Item = &TraceRecord> + '_ {
        let name = name.to_owned();
        self.records.iter().filter(move |r| r.signal == name)
    }

    /// The trace restricted to the named signals, preserving order.
    pub fn select(&self, names: &[&str]) -> CycleTrace {
        CycleTrace {
            records: self
                .records
                .iter()
                .filter(|r| names.contains(&r.signal))
                .copied()
                .collect(),
        }
    }

    /// Line-oriented form: `cycle,signal,hex-value` with 8 hex digits for
    /// signals up to 32 bits wide and 16 digits for wider ones.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            if r.width <= 32 {
                let _ = writeln!(out, "{},{},{:08x}", r.cycle, r.signal, r.value);
            } else {
                let _ = writeln!(out, "{},{},{:016x}", r.cycle, r.signal, r.value);
            }
        }
        out
    }
}
