//! CSV emission for analysis rows and simulation reports. Plain text so the
//! numbers re-plot with any external tool; formatting is fixed-precision so
//! reruns are byte-identical.

use std::io::Write;

use crate::sim::{SimReport, SimSummary};
use crate::store::FormatError;

pub const REPORT_HEADER: &str =
    "query_idx,ha_latency_us,baseline_latency_us,speedup,gpu_hits,pin_hits,page_hits,disk_loads";

pub const SUMMARY_HEADER: &str = "mean_speedup,max_speedup,first_half_mean_speedup,\
second_half_mean_speedup,mean_ha_latency_us,mean_baseline_latency_us";

pub const ANALYSIS_HEADER: &str =
    "chunk_id,kind,min,max,top1,top4,top8,rmse_int8,rmse_fp8e4m3,rmse_fp8e5m2,rmse_gse8";

fn us(seconds: f64) -> f64 {
    seconds * 1.0e6
}

pub fn write_report_csv(out: &mut impl Write, report: &SimReport) -> Result<(), FormatError> {
    writeln!(out, "{REPORT_HEADER}")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{:.3},{:.3},{:.6},{},{},{},{}",
            row.query_idx,
            us(row.ha_latency),
            us(row.baseline_latency),
            row.speedup,
            row.hits[0],
            row.hits[1],
            row.hits[2],
            row.hits[3],
        )?;
    }
    Ok(())
}

pub fn write_summary_csv(out: &mut impl Write, summary: &SimSummary) -> Result<(), FormatError> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    writeln!(
        out,
        "{:.6},{:.6},{:.6},{:.6},{:.3},{:.3}",
        summary.mean_speedup,
        summary.max_speedup,
        summary.first_half_mean_speedup,
        summary.second_half_mean_speedup,
        us(summary.mean_ha_latency),
        us(summary.mean_baseline_latency),
    )?;
    Ok(())
}

/// One analysis row per chunk; `rmse` is indexed in scheme order.
pub struct AnalysisRow {
    pub chunk_id: u32,
    pub kind: &'static str,
    pub min: f64,
    pub max: f64,
    pub coverage: [f64; 3],
    pub rmse: [f64; 4],
}

pub fn write_analysis_csv(out: &mut impl Write, rows: &[AnalysisRow]) -> Result<(), FormatError> {
    writeln!(out, "{ANALYSIS_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.chunk_id,
            r.kind,
            r.min,
            r.max,
            r.coverage[0],
            r.coverage[1],
            r.coverage[2],
            r.rmse[0],
            r.rmse[1],
            r.rmse[2],
            r.rmse[3],
        )?;
    }
    Ok(())
}
