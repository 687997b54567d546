//! CSV and JSON writers for run artifacts. Floats are written in Rust's
//! shortest round-trip form, so identical inputs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::Histogram;
use crate::error::Result;
use crate::pointer::PointerTable;
use crate::qubit::{BasisLabel, Parity};
use crate::sme::{final_parity, TrajectoryRecord};

/// One row per serialized element, header from the field names.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FieldRow {
    t: f64,
    label: String,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    sigma_re: f64,
    sigma_im: f64,
}

/// Every `stride`-th grid point (and the last) for all eight labels.
pub fn write_pointer_table<W: Write>(out: W, table: &PointerTable, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let last = table.steps();
    let rows = (0..=last).filter(move |n| n % stride == 0 || *n == last).flat_map(move |n| {
        let sigma = table.sigma(n);
        BasisLabel::all().map(move |l| {
            let i = l.index();
            let (a, b) = (table.alpha(n)[i], table.beta(n)[i]);
            FieldRow {
                t: table.t(n),
                label: l.to_string(),
                alpha_re: a.re,
                alpha_im: a.im,
                beta_re: b.re,
                beta_im: b.im,
                sigma_re: sigma[i].re,
                sigma_im: sigma[i].im,
            }
        })
    });
    write_rows(out, rows)
}

#[derive(Serialize)]
struct HistogramRow<'a> {
    group: &'a str,
    bin_left: f64,
    bin_right: f64,
    count_even_true: usize,
    count_odd_true: usize,
}

/// Bin edges and counts of each tagged histogram, one row per bin.
pub fn write_histograms<'a, W: Write>(
    out: W,
    groups: impl IntoIterator<Item = (&'a str, &'a Histogram)>,
) -> Result<()> {
    let rows = groups.into_iter().flat_map(|(group, h)| {
        (0..h.bins()).map(move |i| HistogramRow {
            group,
            bin_left: h.edges[i],
            bin_right: h.edges[i + 1],
            count_even_true: h.count_even_true[i],
            count_odd_true: h.count_odd_true[i],
        })
    });
    write_rows(out, rows)
}

#[derive(Serialize)]
struct RecordRow<'a> {
    group: &'a str,
    index: usize,
    seed: u64,
    s: f64,
    true_parity: &'static str,
    p_even: f64,
    min_eigenvalue: f64,
}

/// One row per trajectory; `group` tags records from different ensembles in
/// the same file.
pub fn write_records<'a, W: Write>(
    out: W,
    groups: impl IntoIterator<Item = (&'a str, &'a [TrajectoryRecord])>,
) -> Result<()> {
    let rows = groups.into_iter().flat_map(|(group, records)| {
        records.iter().enumerate().map(move |(index, r)| RecordRow {
            group,
            index,
            seed: r.seed,
            s: r.s,
            true_parity: match final_parity(&r.final_state) {
                Parity::Even => "even",
                Parity::Odd => "odd",
            },
            p_even: r.final_state.parity_population(Parity::Even),
            min_eigenvalue: r.diagnostics.min_eigenvalue,
        })
    });
    write_rows(out, rows)
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointer::{integrate_pointer_fields, DrivePulse, SystemParams};

    #[test]
    fn histogram_csv_layout() {
        let h = Histogram::build(&[1.0, 2.0], &[-1.0], Some(2));
        let mut buf = Vec::new();
        write_histograms(&mut buf, [("x", &h)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "group,bin_left,bin_right,count_even_true,count_odd_true\nx,-1.0,0.5,0,1\nx,0.5,2.0,2,0\n");
    }

    #[test]
    fn pointer_csv_has_eight_rows_per_sample() {
        let p = SystemParams::reference();
        let t = integrate_pointer_fields(&p, &DrivePulse::constant(1.0), 0.01, 1e-3).unwrap();
        let mut buf = Vec::new();
        write_pointer_table(&mut buf, &t, 3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // samples 0, 3, 6, 9, 10
        assert_eq!(text.lines().count(), 1 + 5 * 8);
        assert!(text.starts_with("t,label,alpha_re"));
    }
}
