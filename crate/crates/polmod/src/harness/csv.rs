//! CSV emission for sweep results.
//!
//! One row per sweep point, floats printed with the shortest
//! round-trippable representation. The `sinr_db` column appears only when
//! the sweep simulated cochannel interference.

use crate::harness::runner::MetricRecord;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const CSV_HEADER: &str =
    "axis,ber,ber_ci95,bler,bler_ci95,throughput_kbps,n_bits,n_blocks,n_errors,seed";

/// Renders records as a CSV document, header included.
pub fn format_records(records: &[MetricRecord]) -> String {
    let with_sinr = records.iter().any(|r| r.sinr_db.is_some());
    let mut out = String::from(CSV_HEADER);
    if with_sinr {
        out.push_str(",sinr_db");
    }
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.axis_value,
            r.ber.rate,
            r.ber.half_width(),
            r.bler.rate,
            r.bler.half_width(),
            r.throughput_kbps,
            r.counters.bits,
            r.counters.blocks,
            r.counters.block_errors,
            r.seed,
        );
        if with_sinr {
            let _ = write!(out, ",{}", r.sinr_db.unwrap_or(f64::NAN));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(records: &[MetricRecord], path: &Path) -> io::Result<()> {
    std::fs::write(path, format_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ScenarioConfig, StopRule, SweepSpec, SweepKind};
    use crate::harness::runner::{run_sweep, to_record, LinkCounters};

    fn sample_records() -> Vec<MetricRecord> {
        let mut cfg = ScenarioConfig::default();
        cfg.bitrate_kbps = 40.0;
        let counters = LinkCounters {
            bits: 4096,
            bit_errors: 17,
            symbols: 2048,
            symbol_errors: 17,
            c_bits: 2048,
            c_bit_errors: 3,
            blocks: 4,
            block_errors: 1,
            signal_energy: 8000.0,
            impairment_energy: 400.0,
        };
        vec![to_record(&cfg, 2.0, 77, counters).unwrap()]
    }

    #[test]
    fn empty_input_yields_header_only() {
        assert_eq!(format_records(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn row_has_one_field_per_header_column() {
        let text = format_records(&sample_records());
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        let row = lines.next().unwrap();
        assert_eq!(header, CSV_HEADER);
        assert_eq!(row.split(',').count(), header.split(',').count());
        assert!(lines.next().is_none());
    }

    #[test]
    fn sinr_column_appears_only_with_interference() {
        let mut recs = sample_records();
        assert!(!format_records(&recs).contains("sinr_db"));
        recs[0].sinr_db = Some(13.0103);
        let text = format_records(&recs);
        assert!(text.starts_with(&format!("{CSV_HEADER},sinr_db\n")));
        assert!(text.contains(",13.0103\n"));
    }

    #[test]
    fn fields_round_trip_through_parse() {
        let recs = sample_records();
        let text = format_records(&recs);
        let row = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<f64>().unwrap(), 2.0);
        assert_eq!(fields[1].parse::<f64>().unwrap(), recs[0].ber.rate);
        assert_eq!(fields[2].parse::<f64>().unwrap(), recs[0].ber.half_width());
        assert_eq!(fields[6].parse::<u64>().unwrap(), 4096);
        assert_eq!(fields[7].parse::<u64>().unwrap(), 4);
        assert_eq!(fields[8].parse::<u64>().unwrap(), 1);
        assert_eq!(fields[9].parse::<u64>().unwrap(), 77);
    }

    #[test]
    fn repeated_emission_is_byte_identical() {
        let mut cfg = ScenarioConfig::default();
        cfg.coded = false;
        cfg.block_symbols = 32;
        cfg.stop = StopRule { min_block_errors: 2, max_blocks: 8 };
        cfg.sweep = SweepSpec { kind: SweepKind::Ebn0, start: 0.0, stop: 4.0, step: 2.0 };
        let a = format_records(&run_sweep(&cfg).unwrap());
        let b = format_records(&run_sweep(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 4);
    }
}
