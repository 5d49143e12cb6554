//! Analytical throughput and throughput-to-area model.
//!
//! Area figures (occupied slices) and minimum clock periods are synthesis
//! results and enter as inputs; the model evaluates the closed-form
//! throughput of each architecture and its ratio to area. The bundled
//! input set carries clock periods back-computed from reported rates, so
//! [`emit_paper_tables`] is pure arithmetic.

use thiserror::Error;

use crate::cipher::{BLOCK_BITS, ROUNDS};

/// Throughput-formula family a table row belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PerfArch {
    /// Single combinational round; its throughput figure is per round,
    /// not per block.
    RoundFunction,
    /// One round reused over all 44 cycles (all three iterative variants).
    Iterative,
    /// 44 rounds settle per cycle.
    FullUnrolled,
    /// 44 pipelined rounds, one block completing per cycle.
    OuterPipelined,
    /// Outer pipeline with the two-stage inner round; provisional figures.
    MixedPipelined,
}

impl PerfArch {
    pub fn from_label(label: &str) -> Option<PerfArch> {
        Some(match label {
            "round-function" => PerfArch::RoundFunction,
            "iter-cache" | "iter-ram" | "iter-separate" => PerfArch::Iterative,
            "unrolled" => PerfArch::FullUnrolled,
            "outer-pipe" => PerfArch::OuterPipelined,
            "mixed-pipe" => PerfArch::MixedPipelined,
            _ => return None,
        })
    }

    /// Unroll/pipeline factor K the formulas use.
    pub fn k(&self) -> u32 {
        match self {
            PerfArch::RoundFunction | PerfArch::Iterative => 1,
            // The mixed datapath instantiates 43 inter-round register
            // banks, but its published figures use K_o = 44; reproducing
            // those takes precedence (footnoted in the report).
            PerfArch::FullUnrolled | PerfArch::OuterPipelined | PerfArch::MixedPipelined => {
                ROUNDS as u32
            }
        }
    }

    /// Mixed-pipeline figures are provisional and carry a dagger marker.
    pub fn provisional(&self) -> bool {
        matches!(self, PerfArch::MixedPipelined)
    }
}

/// One architecture's model inputs.
#[derive(Clone, Debug)]
pub struct PerfInputs {
    pub label: String,
    pub arch: PerfArch,
    pub block_bits: u32,
    pub rounds: u32,
    pub k: u32,
    /// Minimum clock period in seconds.
    pub tclk: f64,
    /// Occupied slices, straight from synthesis reports.
    pub area_slices: u32,
}

impl PerfInputs {
    pub fn new(label: &str, arch: PerfArch, tclk_s: f64, area_slices: u32) -> Self {
        PerfInputs {
            label: label.to_owned(),
            arch,
            block_bits: BLOCK_BITS,
            rounds: ROUNDS as u32,
            k: arch.k(),
            tclk: tclk_s,
            area_slices,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PerfError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("clock period must be positive, got {0}")]
    NonpositiveClock(f64),
    #[error("throughput rate must be positive, got {0}")]
    NonpositiveRate(f64),
    #[error("area must be a positive slice count")]
    ZeroArea,
}

/// Throughput in Mbit/s for one row.
///
/// Round function: `blocksize / T_clk` (single-round figure).
/// Iterative: `blocksize / (rounds * T_clk)`.
/// Full unrolling: `blocksize / ((rounds / K) * T_clk)`.
/// Outer and mixed pipelining: `K * blocksize / (rounds * T_clk)`.
pub fn throughput_rate(inputs: &PerfInputs) -> Result<f64, PerfError> {
    if inputs.tclk <= 0.0 {
        return Err(PerfError::NonpositiveClock(inputs.tclk));
    }
    let b = f64::from(inputs.block_bits);
    let r = f64::from(inputs.rounds);
    let k = f64::from(inputs.k);
    let t = inputs.tclk;
    let bits_per_s = match inputs.arch {
        PerfArch::RoundFunction => b / t,
        PerfArch::Iterative => b / (r * t),
        PerfArch::FullUnrolled => b / ((r / k) * t),
        PerfArch::OuterPipelined | PerfArch::MixedPipelined => k * b / (r * t),
    };
    Ok(bits_per_s / 1e6)
}

/// The clock period (seconds) at which [`throughput_rate`] reproduces a
/// given rate; the formulas are monotone in `T_clk`, so it is unique.
pub fn back_compute_tclk(arch: PerfArch, rate_mbit_s: f64) -> Result<f64, PerfError> {
    if rate_mbit_s <= 0.0 {
        return Err(PerfError::NonpositiveRate(rate_mbit_s));
    }
    let b = f64::from(BLOCK_BITS);
    let r = ROUNDS as f64;
    let k = f64::from(arch.k());
    let bits_per_s = rate_mbit_s * 1e6;
    Ok(match arch {
        PerfArch::RoundFunction => b / bits_per_s,
        PerfArch::Iterative => b / (r * bits_per_s),
        PerfArch::FullUnrolled => b / ((r / k) * bits_per_s),
        PerfArch::OuterPipelined | PerfArch::MixedPipelined => k * b / (r * bits_per_s),
    })
}

/// Mbit/s per occupied slice.
pub fn throughput_to_area(rate_mbit_s: f64, area_slices: u32) -> Result<f64, PerfError> {
    if area_slices == 0 {
        return Err(PerfError::ZeroArea);
    }
    Ok(rate_mbit_s / f64::from(area_slices))
}

/// One evaluated report row.
#[derive(Clone, Debug)]
pub struct PerfRow {
    pub label: String,
    pub throughput_mbit_s: f64,
    pub area_slices: u32,
    pub ratio: f64,
    pub provisional: bool,
}

/// The evaluated throughput/area report.
#[derive(Clone, Debug, Default)]
pub struct PerfTable {
    pub rows: Vec<PerfRow>,
}

/// Evaluate every input row. An empty input set yields an empty table.
pub fn emit_paper_tables(inputs: &[PerfInputs]) -> Result<PerfTable, PerfError> {
    let mut rows = Vec::with_capacity(inputs.len());
    for input in inputs {
        let rate = throughput_rate(input)?;
        rows.push(PerfRow {
            label: input.label.clone(),
            throughput_mbit_s: rate,
            area_slices: input.area_slices,
            ratio: throughput_to_area(rate, input.area_slices)?,
            provisional: input.arch.provisional(),
        });
    }
    Ok(PerfTable { rows })
}

fn value_cell(value: f64, provisional: bool) -> String {
    if provisional {
        format!("{value:.3}\u{2020}")
    } else {
        format!("{value:.3}")
    }
}

impl PerfTable {
    /// Aligned text table with footnotes.
    pub fn render_text(&self) -> String {
        let header = ["architecture", "throughput (Mbit/s)", "area (slices)", "ratio (Mbit/s/slice)"];
        let mut cells: Vec<[String; 4]> = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            cells.push([
                row.label.clone(),
                value_cell(row.throughput_mbit_s, row.provisional),
                if row.provisional {
                    format!("{}\u{2020}", row.area_slices)
                } else {
                    row.area_slices.to_string()
                },
                value_cell(row.ratio, row.provisional),
            ]);
        }
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let fmt_row = |cols: [&str; 4]| {
            let mut line = String::new();
            for (i, (col, w)) in cols.iter().zip(widths).enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(col);
                if i + 1 < cols.len() {
                    for _ in col.chars().count()..w {
                        line.push(' ');
                    }
                }
            }
            line.push('\n');
            line
        };
        out.push_str(&fmt_row(header));
        for row in &cells {
            out.push_str(&fmt_row([&row[0], &row[1], &row[2], &row[3]]));
        }
        if self.rows.iter().any(|r| r.provisional) {
            out.push_str("\u{2020} provisional figures\n");
            out.push_str(
                "note: the mixed-pipeline formula uses K = 44 to match its published \
                 figures; the datapath instantiates 43 inter-round register banks\n",
            );
        }
        out
    }

    /// Comma-separated form, same values and markers as the text table.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("label,throughput_mbit_s,area_slices,ratio_mbit_s_per_slice\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.label,
                value_cell(row.throughput_mbit_s, row.provisional),
                row.area_slices,
                value_cell(row.ratio, row.provisional),
            ));
        }
        out
    }
}

/// Parse a `label,area_slices,tclk_ns` file (one header line, `#`
/// comments and blank lines ignored).
pub fn parse_inputs(text: &str) -> Result<Vec<PerfInputs>, PerfError> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            saw_header = true;
            continue;
        }
        let parse = |message: String| PerfError::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse(format!("expected 3 comma-separated fields, got {}", fields.len())));
        }
        let arch = PerfArch::from_label(fields[0])
            .ok_or_else(|| parse(format!("unknown architecture label `{}`", fields[0])))?;
        let area: u32 = fields[1]
            .parse()
            .map_err(|e| parse(format!("bad area `{}`: {e}", fields[1])))?;
        if area == 0 {
            return Err(parse("area must be positive".to_owned()));
        }
        let tclk_ns: f64 = fields[2]
            .parse()
            .map_err(|e| parse(format!("bad clock period `{}`: {e}", fields[2])))?;
        if !tclk_ns.is_finite() || tclk_ns <= 0.0 {
            return Err(parse("clock period must be positive".to_owned()));
        }
        rows.push(PerfInputs::new(fields[0], arch, tclk_ns * 1e-9, area));
    }
    Ok(rows)
}

/// The bundled input set: reported slice counts with clock periods
/// back-computed from the reported throughput rates.
pub fn builtin_inputs() -> Vec<PerfInputs> {
    parse_inputs(include_str!("../data/perf_inputs.csv"))
        .expect("bundled perf inputs always parse")
}
