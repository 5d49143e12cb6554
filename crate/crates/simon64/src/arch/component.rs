//! Clocked primitives the datapaths are wired from: edge-triggered
//! registers and a synchronous-read RAM.

use crate::cipher::{Word, ROUNDS};

/// Clock edge a register latches on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Edge {
    Rising,
    Falling,
}

/// An edge-triggered register. `q` is the value combinational logic sees
/// during the current cycle; `d` is whatever was driven onto the input
/// since the last matching edge. Leaving `d` undriven holds the value.
#[derive(Clone, Debug)]
pub struct ClockedReg<T: Copy> {
    edge: Edge,
    q: T,
    d: T,
}

impl<T: Copy> ClockedReg<T> {
    pub fn new(edge: Edge, reset: T) -> Self {
        ClockedReg { edge, q: reset, d: reset }
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn set_d(&mut self, v: T) {
        self.d = v;
    }

    /// Latch `d` into `q` if `edge` matches this register's polarity.
    pub fn latch(&mut self, edge: Edge) {
        if edge == self.edge {
            self.q = self.d;
        }
    }

    /// Asynchronous reset: set both sides of the register at once.
    pub fn force(&mut self, v: T) {
        self.q = v;
        self.d = v;
    }
}

/// 44-cell synchronous-read RAM for the round keys. The read output is
/// registered: it reflects the address presented during the previous
/// cycle, one cycle after presentation. When the cell being read is
/// written at the same edge, the read returns the pre-write contents.
#[derive(Clone, Debug)]
pub struct SyncRam {
    cells: [Word; ROUNDS],
    read_addr: usize,
    read_out: Word,
    write: Option<(usize, Word)>,
}

impl SyncRam {
    pub fn new() -> Self {
        SyncRam { cells: [0; ROUNDS], read_addr: 0, read_out: 0, write: None }
    }

    /// Drive the read address for the current cycle.
    pub fn present_read(&mut self, addr: usize) {
        debug_assert!(addr < ROUNDS);
        self.read_addr = addr;
    }

    /// Drive the write port for the current cycle; committed at the edge.
    pub fn present_write(&mut self, addr: usize, data: Word) {
        debug_assert!(addr < ROUNDS);
        self.write = Some((addr, data));
    }

    /// Registered read output (address presented one cycle earlier).
    pub fn read_out(&self) -> Word {
        self.read_out
    }

    /// Direct cell inspection, for tests and verification only.
    pub fn cell(&self, i: usize) -> Word {
        self.cells[i]
    }

    /// Rising edge: capture the read, then commit any pending write.
    pub fn latch(&mut self) {
        self.read_out = self.cells[self.read_addr];
        if let Some((addr, data)) = self.write.take() {
            self.cells[addr] = data;
        }
    }
}

impl Default for SyncRam {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rising_register_ignores_falling_edge() {
        let mut reg = ClockedReg::new(Edge::Rising, 0u32);
        reg.set_d(7);
        reg.latch(Edge::Falling);
        assert_eq!(reg.q(), 0);
        reg.latch(Edge::Rising);
        assert_eq!(reg.q(), 7);
    }

    #[test]
    fn register_holds_when_undriven() {
        let mut reg = ClockedReg::new(Edge::Rising, 3u32);
        reg.latch(Edge::Rising);
        reg.latch(Edge::Rising);
        assert_eq!(reg.q(), 3);
    }

    #[test]
    fn falling_register_latches_mid_cycle() {
        let mut reg = ClockedReg::new(Edge::Falling, 0u32);
        reg.set_d(9);
        reg.latch(Edge::Falling);
        assert_eq!(reg.q(), 9);
    }

    #[test]
    fn sync_ram_read_is_one_cycle_delayed() {
        let mut ram = SyncRam::new();
        ram.present_write(5, 0xABCD_EF01);
        ram.latch();
        assert_eq!(ram.cell(5), 0xABCD_EF01);

        // Address presented this cycle is visible only after the edge.
        ram.present_read(5);
        assert_eq!(ram.read_out(), 0);
        ram.latch();
        assert_eq!(ram.read_out(), 0xABCD_EF01);
    }

    #[test]
    fn sync_ram_same_edge_write_reads_old_data() {
        let mut ram = SyncRam::new();
        ram.present_read(2);
        ram.present_write(2, 0x1111_1111);
        ram.latch();
        assert_eq!(ram.read_out(), 0, "read-before-write at the same edge");
        assert_eq!(ram.cell(2), 0x1111_1111);
    }
}
