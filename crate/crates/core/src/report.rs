//! CSV export of traces, rate tables and certification reports.
//!
//! All writers emit a header row, LF line endings and locale-free numbers.
//! Floats use the shortest representation that round-trips.

use std::io::Write;

use csv::{Terminator, WriterBuilder};

use crate::error::Result;
use crate::geometry::StarPoint;
use crate::iterate::IterationTrace;
use crate::rates::CertificationReport;
use crate::sequences::RateFn;

/// Flat numeric coordinates of a point, used for the optional coordinate
/// columns of a trace.
pub trait Coordinates {
    fn coords(&self) -> Vec<f64>;
    fn coord_names(&self) -> Vec<String>;
}

impl Coordinates for Vec<f64> {
    fn coords(&self) -> Vec<f64> {
        self.clone()
    }
    fn coord_names(&self) -> Vec<String> {
        (0..self.len()).map(|i| format!("x{i}")).collect()
    }
}

impl Coordinates for StarPoint {
    fn coords(&self) -> Vec<f64> {
        vec![self.ray() as f64, self.t()]
    }
    fn coord_names(&self) -> Vec<String> {
        vec!["ray".into(), "t".into()]
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Columns `n, residual_step, residual_T, tfam_gap`, followed by the
/// coordinates of `x_n` when the trace stored its points.
pub fn write_trace<P: Coordinates, W: Write>(trace: &IterationTrace<P>, out: W) -> Result<()> {
    let mut w = writer(out);
    let points = trace.x.as_deref();
    let mut header: Vec<String> = ["n", "residual_step", "residual_T", "tfam_gap"]
        .map(String::from)
        .into();
    if let Some(first) = points.and_then(|p| p.first()) {
        header.extend(first.coord_names());
    }
    w.write_record(&header)?;
    for n in 0..trace.residual_step.len() {
        let mut row = vec![
            n.to_string(),
            fmt_f64(trace.residual_step[n]),
            fmt_f64(trace.residual_t[n]),
            fmt_f64(trace.tfam_gap[n]),
        ];
        if let Some(points) = points {
            row.extend(points[n].coords().into_iter().map(fmt_f64));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per `k ≤ k_max`; a column whose rate is `None` stays empty.
pub fn write_rate_table<W: Write>(
    columns: &[(&str, Option<&RateFn>)],
    k_max: u64,
    out: W,
) -> Result<()> {
    let mut w = writer(out);
    let mut header = vec!["k".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    for k in 0..=k_max {
        let mut row = vec![k.to_string()];
        row.extend(
            columns
                .iter()
                .map(|(_, rate)| rate.map(|r| r.eval(k).to_string()).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const CERTIFICATION_HEADER: [&str; 6] = [
    "target",
    "k",
    "rate_k",
    "worst_excess",
    "minimal_empirical_index",
    "status",
];

/// Writes the rows of several reports under a single header.
pub fn write_certifications<'a, W: Write>(
    reports: impl IntoIterator<Item = &'a CertificationReport>,
    out: W,
) -> Result<()> {
    let mut w = writer(out);
    w.write_record(CERTIFICATION_HEADER)?;
    for report in reports {
        for row in &report.rows {
            w.write_record([
                report.target.clone(),
                row.k.to_string(),
                row.rate_k.to_string(),
                row.worst_excess.map(fmt_f64).unwrap_or_default(),
                row.minimal_empirical_index
                    .map(|i| i.to_string())
                    .unwrap_or_default(),
                row.status.name().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::certify_rate;

    fn trace_with(points: Option<Vec<Vec<f64>>>) -> IterationTrace<Vec<f64>> {
        IterationTrace {
            horizon: 2,
            x: points,
            u_seq: None,
            residual_step: vec![0.5, 0.1],
            residual_t: vec![1.0, 1e-17],
            tfam_gap: vec![0.0, 0.0],
            dist_x_p: vec![0.0; 3],
            dist_x_u: vec![0.0; 3],
            dist_u_p: vec![0.0; 2],
            dist_u_tu: vec![0.0; 2],
            u_step: vec![0.0],
        }
    }

    #[test]
    fn trace_csv_layout() {
        let mut buf = Vec::new();
        write_trace(&trace_with(None), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,residual_step,residual_T,tfam_gap\n0,0.5,1.0,0.0\n1,0.1,1e-17,0.0\n"
        );

        let mut buf = Vec::new();
        let pts = vec![vec![1.0, 2.0], vec![0.5, 0.25], vec![0.0, 0.0]];
        write_trace(&trace_with(Some(pts)), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("n,residual_step,residual_T,tfam_gap,x0,x1\n0,0.5,1.0,0.0,1.0,2.0\n")
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn rate_table_leaves_missing_columns_empty() {
        let sigma = RateFn::affine(2, 1);
        let mut buf = Vec::new();
        write_rate_table(&[("sigma", Some(&sigma)), ("sigma_t", None)], 2, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,sigma,sigma_t\n0,1,\n1,3,\n2,5,\n"
        );
    }

    #[test]
    fn certification_rows() {
        let residuals = [1.0, 0.4, 0.2, 0.1];
        let report = certify_rate(
            "residual_step",
            &residuals,
            &RateFn::affine(1, 1),
            1,
            4,
            1e-9,
        );
        let mut buf = Vec::new();
        write_certifications([&report], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CERTIFICATION_HEADER.join(","));
        assert!(lines.next().unwrap().starts_with("residual_step,0,1,"));
    }
}
