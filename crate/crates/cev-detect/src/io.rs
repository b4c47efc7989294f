//! CSV ingestion and plot-data emission.
//!
//! All emitted CSV is comma-separated, '.' decimal point, UTF-8, LF line
//! endings. Numbers are written in Rust's shortest round-trip form (at most
//! 17 significant digits), so re-ingesting a file reproduces the original
//! f64 values bit-for-bit. Undefined markers become empty fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::detection::DetectionVerdict;
use crate::marginals::EvEstimateTrace;
use crate::statistics::{KGrid, TraceBundle};
use crate::{BivariateSample, Error, Result};

/// Selects a CSV column by 1-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

/// Options for [`ingest_csv`].
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub col_x: ColumnSelector,
    pub col_y: ColumnSelector,
    /// First row is a header; required when selecting columns by name.
    pub header: bool,
    /// Replace X by the derived rate X/Y (e.g. size/duration), keeping Y.
    pub derive_rate: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            col_x: ColumnSelector::Index(1),
            col_y: ColumnSelector::Index(2),
            header: false,
            derive_rate: false,
        }
    }
}

/// Ingestion result: the validated sample plus the number of rejected rows.
#[derive(Debug, Clone)]
pub struct IngestReport {
    pub sample: BivariateSample,
    pub rejected_rows: usize,
}

fn resolve_column(sel: &ColumnSelector, headers: Option<&csv::StringRecord>) -> Result<usize> {
    match sel {
        ColumnSelector::Index(i) => {
            if *i == 0 {
                return Err(Error::Ingest(
                    "column indices are 1-based; 0 is not a valid column".into(),
                ));
            }
            Ok(*i - 1)
        }
        ColumnSelector::Name(name) => {
            let headers = headers.ok_or_else(|| {
                Error::Ingest(format!(
                    "column '{name}' selected by name but --header is not set"
                ))
            })?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Ingest(format!("column '{name}' not found in header")))
        }
    }
}

/// Read two numeric columns from a CSV file.
///
/// Rows whose selected fields are missing, non-numeric or non-finite are
/// rejected and counted, not fatal; zero valid rows is an error. With
/// `derive_rate`, each row contributes `(x/y, y)` instead of `(x, y)` —
/// the ratio column becomes the new X.
pub fn ingest_csv(path: &Path, opts: &IngestOptions) -> Result<IngestReport> {
    let file =
        File::open(path).map_err(|e| Error::io(format!("cannot open '{}'", path.display()), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .from_reader(file);

    let headers = if opts.header {
        Some(reader.headers()?.clone())
    } else {
        None
    };
    let ix = resolve_column(&opts.col_x, headers.as_ref())?;
    let iy = resolve_column(&opts.col_y, headers.as_ref())?;

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rejected = 0usize;
    for record in reader.records() {
        let record = record?;
        let parsed = |i: usize| -> Option<f64> {
            record
                .get(i)
                .and_then(|f| f.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
        };
        match (parsed(ix), parsed(iy)) {
            (Some(x), Some(y)) => {
                let x = if opts.derive_rate { x / y } else { x };
                if x.is_finite() {
                    xs.push(x);
                    ys.push(y);
                } else {
                    rejected += 1;
                }
            }
            _ => rejected += 1,
        }
    }
    if xs.is_empty() {
        return Err(Error::Ingest(format!(
            "no valid rows in '{}' ({rejected} rejected)",
            path.display()
        )));
    }
    Ok(IngestReport {
        sample: BivariateSample::new(xs, ys)?,
        rejected_rows: rejected,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path)
        .map_err(|e| Error::io(format!("cannot create '{}'", path.display()), e))?;
    Ok(BufWriter::new(file))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write a sample as `x,y` CSV (with header).
pub fn write_sample_csv(path: &Path, sample: &BivariateSample) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,y").map_err(|e| Error::io("write failed", e))?;
    for (x, y) in sample.xs().iter().zip(sample.ys()) {
        writeln!(w, "{x},{y}").map_err(|e| Error::io("write failed", e))?;
    }
    w.flush().map_err(|e| Error::io("write failed", e))
}

/// Write the statistic traces: columns `k, hillish, hillish_neg,
/// pickandsish_p{p}…, kendall`; undefined entries are empty fields.
pub fn write_cev_traces(path: &Path, bundle: &TraceBundle) -> Result<()> {
    let mut w = create(path)?;
    let mut header = String::from("k,hillish,hillish_neg");
    for (p, _) in &bundle.pickandsish {
        header.push_str(&format!(",pickandsish_p{p}"));
    }
    header.push_str(",kendall");
    writeln!(w, "{header}").map_err(|e| Error::io("write failed", e))?;
    for (i, &k) in bundle.kgrid.values().iter().enumerate() {
        let mut line = format!("{k},{},{}", bundle.hillish[i], bundle.hillish_neg[i]);
        for (_, trace) in &bundle.pickandsish {
            line.push(',');
            line.push_str(&fmt_opt(trace[i]));
        }
        line.push(',');
        line.push_str(&bundle.kendall[i].to_string());
        writeln!(w, "{line}").map_err(|e| Error::io("write failed", e))?;
    }
    w.flush().map_err(|e| Error::io("write failed", e))
}

/// Read a trace file produced by [`write_cev_traces`] back into a bundle.
pub fn read_cev_traces(path: &Path) -> Result<TraceBundle> {
    let file =
        File::open(path).map_err(|e| Error::io(format!("cannot open '{}'", path.display()), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Ingest(format!("missing column '{name}' in trace file")))
    };
    let ck = col("k")?;
    let ch = col("hillish")?;
    let chn = col("hillish_neg")?;
    let ct = col("kendall")?;
    let mut pick_cols: Vec<(f64, usize)> = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if let Some(ps) = h.strip_prefix("pickandsish_p") {
            let p: f64 = ps
                .parse()
                .map_err(|_| Error::Ingest(format!("bad pickandsish column '{h}'")))?;
            pick_cols.push((p, i));
        }
    }

    let mut ks = Vec::new();
    let mut hillish = Vec::new();
    let mut hillish_neg = Vec::new();
    let mut kendall = Vec::new();
    let mut picks: Vec<(f64, Vec<Option<f64>>)> =
        pick_cols.iter().map(|&(p, _)| (p, Vec::new())).collect();
    for record in reader.records() {
        let record = record?;
        let req = |i: usize, what: &str| -> Result<f64> {
            record
                .get(i)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| Error::Ingest(format!("bad {what} entry in trace file")))
        };
        ks.push(req(ck, "k")? as usize);
        hillish.push(req(ch, "hillish")?);
        hillish_neg.push(req(chn, "hillish_neg")?);
        kendall.push(req(ct, "kendall")?);
        for ((_, trace), &(_, i)) in picks.iter_mut().zip(&pick_cols) {
            let field = record.get(i).unwrap_or("");
            if field.is_empty() {
                trace.push(None);
            } else {
                trace.push(Some(field.parse::<f64>().map_err(|_| {
                    Error::Ingest("bad pickandsish entry in trace file".into())
                })?));
            }
        }
    }
    let p_values: Vec<f64> = picks.iter().map(|&(p, _)| p).collect();
    Ok(TraceBundle {
        kgrid: KGrid::new(ks)?,
        hillish,
        hillish_neg,
        pickandsish: picks,
        kendall,
        p_values,
    })
}

/// Write marginal estimator traces: `k`, then hill/pickands/moment per
/// variable (suffixes `_x` and `_y`).
pub fn write_marginal_traces(
    path: &Path,
    kgrid: &KGrid,
    traces_x: &[EvEstimateTrace; 3],
    traces_y: &[EvEstimateTrace; 3],
) -> Result<()> {
    let mut w = create(path)?;
    let mut header = String::from("k");
    for (suffix, traces) in [("x", traces_x), ("y", traces_y)] {
        for t in traces.iter() {
            header.push_str(&format!(",{}_{}", t.estimator.name(), suffix));
        }
    }
    writeln!(w, "{header}").map_err(|e| Error::io("write failed", e))?;
    for (i, &k) in kgrid.values().iter().enumerate() {
        let mut line = k.to_string();
        for traces in [traces_x, traces_y] {
            for t in traces.iter() {
                line.push(',');
                line.push_str(&fmt_opt(t.values[i]));
            }
        }
        writeln!(w, "{line}").map_err(|e| Error::io("write failed", e))?;
    }
    w.flush().map_err(|e| Error::io("write failed", e))
}

/// Write the verdict and its evidence as pretty-printed JSON.
pub fn write_verdict_json(path: &Path, verdict: &DetectionVerdict) -> Result<()> {
    let mut w = create(path)?;
    let json = serde_json::to_string_pretty(verdict)
        .map_err(|e| Error::Ingest(format!("cannot serialize verdict: {e}")))?;
    writeln!(w, "{json}").map_err(|e| Error::io("write failed", e))?;
    w.flush().map_err(|e| Error::io("write failed", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::compute_traces;

    fn tmp(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("cev_detect_io_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn ingest_two_columns() {
        let path = tmp("plain.csv", "1,2\n3,4\n");
        let r = ingest_csv(&path, &IngestOptions::default()).unwrap();
        assert_eq!(r.sample.n(), 2);
        assert_eq!(r.sample.xs(), &[1.0, 3.0]);
        assert_eq!(r.rejected_rows, 0);
    }

    #[test]
    fn ingest_with_header_by_name() {
        let path = tmp("header.csv", "x,y\n1,2\n3,4\n");
        let opts = IngestOptions {
            col_x: ColumnSelector::Name("x".into()),
            col_y: ColumnSelector::Name("y".into()),
            header: true,
            derive_rate: false,
        };
        let r = ingest_csv(&path, &opts).unwrap();
        assert_eq!(r.sample.xs(), &[1.0, 3.0]);
        assert_eq!(r.sample.ys(), &[2.0, 4.0]);
    }

    #[test]
    fn ingest_derive_rate() {
        let path = tmp("rate.csv", "size,duration\n100,4\n60,3\n");
        let opts = IngestOptions {
            col_x: ColumnSelector::Name("size".into()),
            col_y: ColumnSelector::Name("duration".into()),
            header: true,
            derive_rate: true,
        };
        let r = ingest_csv(&path, &opts).unwrap();
        assert_eq!(r.sample.xs(), &[25.0, 20.0]);
        assert_eq!(r.sample.ys(), &[4.0, 3.0]);
    }

    #[test]
    fn ingest_rejects_bad_rows() {
        let path = tmp("bad.csv", "1,2\nfoo,3\n4,inf\n5,6\n7\n");
        let r = ingest_csv(&path, &IngestOptions::default()).unwrap();
        assert_eq!(r.sample.n(), 2);
        assert_eq!(r.rejected_rows, 3);
    }

    #[test]
    fn ingest_errors_are_distinct() {
        let missing = ingest_csv(
            Path::new("/nonexistent/file.csv"),
            &IngestOptions::default(),
        );
        assert!(matches!(missing, Err(Error::Io { .. })));

        let path = tmp("allbad.csv", "a,b\nc,d\n");
        assert!(matches!(
            ingest_csv(&path, &IngestOptions::default()),
            Err(Error::Ingest(_))
        ));

        let path = tmp("nameless.csv", "1,2\n");
        let opts = IngestOptions {
            col_x: ColumnSelector::Name("x".into()),
            ..IngestOptions::default()
        };
        assert!(matches!(ingest_csv(&path, &opts), Err(Error::Ingest(_))));
    }

    #[test]
    fn trace_roundtrip() {
        let xs: Vec<f64> = (0..200).map(|i| ((i * 37) % 211) as f64 / 7.0).collect();
        let ys: Vec<f64> = (0..200).map(|i| ((i * 53) % 223) as f64 + 0.25).collect();
        let sample = BivariateSample::new(xs, ys).unwrap();
        let grid = KGrid::new(vec![2, 4, 8, 16]).unwrap();
        let bundle = compute_traces(&sample, &grid, &[0.3, 0.6]).unwrap();

        let dir = std::env::temp_dir().join("cev_detect_io_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("traces.csv");
        write_cev_traces(&path, &bundle).unwrap();
        let back = read_cev_traces(&path).unwrap();
        assert_eq!(bundle, back);
    }

    #[test]
    fn sample_roundtrip_preserves_bits() {
        let sample = BivariateSample::new(
            vec![1.0 / 3.0, std::f64::consts::PI, -7.25e-12],
            vec![16.0, 2.0f64.sqrt(), 1.0 + 1e-15],
        )
        .unwrap();
        let dir = std::env::temp_dir().join("cev_detect_io_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sample.csv");
        write_sample_csv(&path, &sample).unwrap();
        let opts = IngestOptions {
            header: true,
            ..IngestOptions::default()
        };
        let back = ingest_csv(&path, &opts).unwrap().sample;
        assert_eq!(sample, back);
    }
}
