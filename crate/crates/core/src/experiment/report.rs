use std::io::Write;

use crate::error::Result;
use crate::evalmetrics::{ClusteringAlgorithm, ClusteringOutcome};

/// Report header. The six clustering scores sit between `kappa` and
/// `floor`, named as in [`ClusteringAlgorithm::name`].
pub const REPORT_COLUMNS: [&str; 19] = [
    "run_id",
    "dataset",
    "seed",
    "method",
    "q",
    "ell",
    "clusters",
    "kappa",
    "single_link",
    "complete_link",
    "group_average",
    "kmeans_single_link",
    "kmeans_complete_link",
    "kmeans_group_average",
    "floor",
    "ceiling",
    "nonuniformity",
    "f_estimate",
    "elapsed_ms",
];

/// Columns that vary between otherwise identical runs.
pub const TIMING_COLUMNS: [&str; 1] = ["elapsed_ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub run_id: String,
    pub dataset: String,
    /// Generator seed; `None` for datasets read from disk.
    pub seed: Option<u64>,
    pub method: String,
    /// Scaling factor used (IRR only).
    pub q: Option<f64>,
    pub ell: usize,
    pub clusters: Option<usize>,
    pub kappa: Option<f64>,
    pub clustering: Option<ClusteringOutcome>,
    /// `Δ_max / Δ_min` of the true topic model.
    pub nonuniformity: Option<f64>,
    /// `f(Â)`, the estimate AUTO-SCALE uses.
    pub f_estimate: f64,
    pub elapsed_ms: f64,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ReportRow {
    fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.run_id.clone(),
            self.dataset.clone(),
            opt(self.seed),
            self.method.clone(),
            opt(self.q),
            self.ell.to_string(),
            opt(self.clusters),
            opt(self.kappa),
        ];
        for alg in ClusteringAlgorithm::ALL {
            r.push(opt(self.clustering.as_ref().and_then(|c| c.scores.get(&alg))));
        }
        r.push(opt(self.clustering.as_ref().map(|c| c.floor)));
        r.push(opt(self.clustering.as_ref().map(|c| c.ceiling)));
        r.push(opt(self.nonuniformity));
        r.push(self.f_estimate.to_string());
        r.push(format!("{:.3}", self.elapsed_ms));
        r
    }
}

/// Writes the header and one line per row; floats use their shortest
/// round-trip form, so equal results give identical text.
pub fn write_report<W: Write>(rows: &[ReportRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REPORT_COLUMNS)?;
    for row in rows {
        out.write_record(row.record())?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_empty_fields() {
        let row = ReportRow {
            run_id: "000.000.00".into(),
            dataset: "25-25".into(),
            seed: Some(3),
            method: "vsm".into(),
            q: None,
            ell: 50,
            clusters: None,
            kappa: Some(0.5),
            clustering: None,
            nonuniformity: Some(1.0),
            f_estimate: 0.25,
            elapsed_ms: 1.5,
        };
        let mut buf = Vec::new();
        write_report(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().ends_with("nonuniformity,f_estimate,elapsed_ms"));
        assert_eq!(lines.next().unwrap(), "000.000.00,25-25,3,vsm,,50,,0.5,,,,,,,,,1,0.25,1.500");
    }
}
