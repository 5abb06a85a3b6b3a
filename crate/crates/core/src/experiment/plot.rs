use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    /// Column giving the x coordinate.
    pub x: String,
    /// Column naming the series.
    pub series: String,
    /// Columns to aggregate.
    pub y: Vec<String>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            x: "nonuniformity".into(),
            series: "method".into(),
            y: vec!["kappa".into()],
        }
    }
}

struct Group {
    x: f64,
    x_text: String,
    series: String,
    rows: usize,
    values: Vec<Vec<f64>>,
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_std(v: &[f64]) -> Option<(f64, f64)> {
    if v.is_empty() {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

/// Aggregates a run report into one row per (x, series): the row count and
/// the mean and standard deviation of each y column over the rows with a
/// value. Rows are ordered by x, then by first appearance of the series.
pub fn plotdata<R: Read, W: Write>(report: R, opts: &PlotOptions, out: W) -> Result<()> {
    let mut rdr = csv::Reader::from_reader(report);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("report has no {name:?} column")))
    };
    let xi = col(&opts.x)?;
    let si = col(&opts.series)?;
    let yi: Vec<usize> = opts.y.iter().map(|y| col(y)).collect::<Result<_>>()?;

    let mut groups: Vec<Group> = Vec::new();
    for (lineno, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let x_text = rec[xi].to_owned();
        let x: f64 = x_text
            .parse()
            .map_err(|e| Error::Format(format!("report row {}: {} {x_text:?}: {e}", lineno + 2, opts.x)))?;
        let series = rec[si].to_owned();
        let g = match groups.iter().position(|g| g.x_text == x_text && g.series == series) {
            Some(i) => &mut groups[i],
            None => {
                groups.push(Group {
                    x,
                    x_text,
                    series,
                    rows: 0,
                    values: vec![Vec::new(); yi.len()],
                });
                groups.last_mut().expect("just pushed")
            }
        };
        g.rows += 1;
        for (k, &c) in yi.iter().enumerate() {
            if !rec[c].is_empty() {
                let v: f64 = rec[c]
                    .parse()
                    .map_err(|e| Error::Format(format!("report row {}: {}: {e}", lineno + 2, opts.y[k])))?;
                g.values[k].push(v);
            }
        }
    }
    // Stable sort keeps first-appearance order of series within each x.
    groups.sort_by(|a, b| a.x.total_cmp(&b.x));

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x".to_owned(), "series".to_owned(), "n".to_owned()];
    for y in &opts.y {
        header.push(format!("{y}_mean"));
        header.push(format!("{y}_std"));
    }
    w.write_record(&header)?;
    for g in &groups {
        let mut rec = vec![g.x_text.clone(), g.series.clone(), g.rows.to_string()];
        for v in &g.values {
            match mean_std(v) {
                Some((m, s)) => rec.extend([m.to_string(), s.to_string()]),
                None => rec.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const REPORT: &str = "run_id,method,nonuniformity,kappa\n\
        a,lsi,2,0.5\n\
        b,irr,2,0.75\n\
        c,lsi,1,0.25\n\
        d,lsi,2,0.7\n\
        e,irr,2,\n";

    #[test]
    fn groups_and_orders() {
        let mut out = Vec::new();
        plotdata(REPORT.as_bytes(), &PlotOptions::default(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,series,n,kappa_mean,kappa_std");
        assert_eq!(lines[1], "1,lsi,1,0.25,0");
        assert!(lines[2].starts_with("2,lsi,2,0.6,"));
        assert_eq!(lines[3], "2,irr,2,0.75,0");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn missing_column() {
        let opts = PlotOptions {
            y: vec!["floor".into()],
            ..PlotOptions::default()
        };
        let err = plotdata(REPORT.as_bytes(), &opts, Vec::new()).unwrap_err();
        assert!(err.to_string().contains("floor"));
    }
}
