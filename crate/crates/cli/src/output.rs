//! JSON documents emitted on stdout.

use serde::Serialize;

use entdex_core::classify::ClassReport;
use entdex_core::io::FORMAT_VERSION;
use entdex_core::partitions::{IntegerPartition, SetPartition};
use entdex_core::verify::PropertyReport;

#[derive(Serialize)]
pub struct PartitionRow {
    pub parts: IntegerPartition,
    pub p: usize,
    pub index: usize,
}

#[derive(Serialize)]
pub struct PartitionsDoc {
    format_version: u32,
    n: usize,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    partitions: Option<Vec<PartitionRow>>,
}

impl PartitionsDoc {
    pub fn counts(n: usize, count: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n,
            count,
            partitions: None,
        }
    }

    pub fn listing(n: usize, count: u64, rows: Vec<PartitionRow>) -> Self {
        Self {
            partitions: Some(rows),
            ..Self::counts(n, count)
        }
    }
}

#[derive(Serialize)]
pub struct ClassReportDoc<'a> {
    format_version: u32,
    n: usize,
    blocks: &'a SetPartition,
    shape: &'a IntegerPartition,
    p: usize,
    index: usize,
    label: &'a str,
    tolerance_used: f64,
    warnings: &'a [String],
}

impl<'a> ClassReportDoc<'a> {
    pub fn new(r: &'a ClassReport) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n: r.n_qubits(),
            blocks: &r.blocks,
            shape: &r.shape,
            p: r.blocks.len(),
            index: r.index.get(),
            label: &r.label,
            tolerance_used: r.tolerance_used,
            warnings: &r.warnings,
        }
    }
}

#[derive(Serialize)]
pub struct VerifyDoc<'a> {
    format_version: u32,
    passed: bool,
    reports: &'a [PropertyReport],
}

impl<'a> VerifyDoc<'a> {
    pub fn new(reports: &'a [PropertyReport]) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            passed: reports.iter().all(PropertyReport::passed),
            reports,
        }
    }
}

/// Rounds to `digits` significant digits and prints the shortest form,
/// so 1.6 stays "1.6" and 5.0 becomes "5".
pub fn format_significant(x: f64, digits: usize) -> String {
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific notation round-trips");
    format!("{rounded}")
}

pub fn format_deviation(d: f64) -> String {
    if d == 0.0 {
        "0".to_string()
    } else {
        format!("{d:.3e}")
    }
}
