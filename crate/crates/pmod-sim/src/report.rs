//! CSV emission and code description.

use std::fmt::Write as _;
use std::io::{self, Write};

use pmod::codebook::{Codebook, DISTANCE_SCAN_GUARD};
use pmod::ivp;

use crate::sweep::SweepRow;

pub const CSV_HEADER: &str = "snr_db,trials,block_errors_nearml,block_errors_ml,\
bler_nearml,bler_ml,wilson_lo_nearml,wilson_hi_nearml,wilson_lo_ml,wilson_hi_ml,\
mean_candidates,wall_time_nearml,wall_time_ml";

fn format_row(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.6},{:.6},{:.6}",
        row.snr_db,
        row.trials,
        row.block_errors_nearml,
        row.block_errors_ml,
        row.bler_nearml,
        row.bler_ml,
        row.wilson_lo_nearml,
        row.wilson_hi_nearml,
        row.wilson_lo_ml,
        row.wilson_hi_ml,
        row.mean_candidates,
        row.wall_time_nearml,
        row.wall_time_ml,
    )
}

/// Writes the header line and one line per row. Formatting is fixed
/// (decimal dot, no separators), so equal inputs give equal bytes.
pub fn emit_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", format_row(row))?;
    }
    Ok(())
}

/// [`emit_csv`] into a string.
pub fn emit_csv_string(rows: &[SweepRow]) -> String {
    let mut bytes = Vec::new();
    emit_csv(rows, &mut bytes).expect("writing to a vector cannot fail");
    String::from_utf8(bytes).expect("CSV output is ASCII")
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Human-readable description of a built code.
pub fn describe_code(cb: &Codebook) -> String {
    let report = ivp::code_size(cb.initial());
    let plan = cb.plan();
    let selected_rate = (cb.size() as f64).log2() / cb.dim() as f64;
    let mut out = String::new();
    let _ = writeln!(out, "n: {}", cb.dim());
    let _ = writeln!(out, "k: {}", cb.symbol_count());
    let _ = writeln!(out, "m: {}", join(cb.multiplicities().iter()));
    let _ = writeln!(out, "mu: {}", join(cb.initial().values().iter()));
    let _ = writeln!(out, "mu_hat: {}", join(cb.unit_values().iter()));
    let _ = writeln!(out, "M: {}", plan.total);
    let _ = writeln!(out, "N: {}", plan.size);
    let _ = writeln!(out, "rate: {selected_rate}");
    let _ = writeln!(out, "full_rate: {}", report.rate);
    let _ = writeln!(
        out,
        "plan: wide={} narrow={} tail_count={} tail_start={} last_index={}",
        plan.wide,
        plan.narrow,
        plan.tail_count,
        plan.tail_start,
        plan.selected_indices().last().unwrap_or(0),
    );
    if plan.size <= DISTANCE_SCAN_GUARD {
        match cb.min_distance() {
            Ok(d) => {
                let _ = writeln!(out, "min_distance: {d}");
            }
            Err(e) => {
                let _ = writeln!(out, "min_distance: unavailable ({e})");
            }
        }
    }
    out
}
