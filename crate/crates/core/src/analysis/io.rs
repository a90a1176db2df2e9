//! CSV and JSON serialization of rate points and fits.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::fit::{FitKind, FitResult};
use super::rates::{RateObservable, RatePoint};
use crate::builder::Family;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Parse {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// One row per point, header included.
pub fn write_rate_points<W: Write>(points: &[RatePoint], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if points.is_empty() {
        out.write_record([
            "family",
            "d",
            "p",
            "observable",
            "shots",
            "failures",
            "rate",
            "ci_low",
            "ci_high",
        ])
        .map_err(csv_err)?;
    }
    for q in points {
        out.serialize(q).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rate_points<R: Read>(r: R) -> Result<Vec<RatePoint>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (i, row) in rd.deserialize().enumerate() {
        let q: RatePoint = row.map_err(|e| Error::Parse {
            line: i + 2,
            message: e.to_string(),
        })?;
        if q.failures > q.shots && q.observable != RateObservable::Sum {
            return Err(Error::Parse {
                line: i + 2,
                message: "failures exceed shots".into(),
            });
        }
        out.push(q);
    }
    Ok(out)
}

pub fn fit_to_json(fit: &FitResult) -> String {
    serde_json::to_string_pretty(fit).expect("fit results serialize")
}

pub fn fit_from_json(text: &str) -> Result<FitResult> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

const PLOT_HEADER: [&str; 10] = [
    "kind",
    "family",
    "d",
    "p",
    "rate_h",
    "sigma_h",
    "rate_v",
    "sigma_v",
    "rate_sum",
    "sigma_sum",
];

/// Plot data: one `curve` row per (family, d, p) with rate and standard
/// error for each observable present, then one `threshold` row per
/// threshold fit. Rows are sorted, so equal inputs give identical bytes.
pub fn write_plot_data<W: Write>(points: &[RatePoint], fits: &[FitResult], w: W) -> Result<()> {
    let mut rows: BTreeMap<(Family, usize, u64), [Option<(f64, f64)>; 3]> = BTreeMap::new();
    for q in points {
        let slot = match q.observable {
            RateObservable::H => 0,
            RateObservable::V => 1,
            RateObservable::Sum => 2,
        };
        // p >= 0, so its bit pattern orders like the value.
        rows.entry((q.family, q.d, q.p.to_bits())).or_default()[slot] = Some((q.rate, q.sigma()));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(PLOT_HEADER).map_err(csv_err)?;
    for ((family, d, p), cols) in &rows {
        let mut rec = vec![
            "curve".to_string(),
            family.to_string(),
            d.to_string(),
            f64::from_bits(*p).to_string(),
        ];
        for c in cols {
            match c {
                Some((r, s)) => rec.extend([r.to_string(), s.to_string()]),
                None => rec.extend([String::new(), String::new()]),
            }
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    let mut thresholds: Vec<(Family, f64)> = fits
        .iter()
        .filter(|f| f.kind == FitKind::ThresholdCrossing)
        .filter_map(|f| f.p_th.map(|p| (f.family, p)))
        .collect();
    thresholds.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for (family, p) in thresholds {
        let mut rec = vec![
            "threshold".to_string(),
            family.to_string(),
            String::new(),
            p.to_string(),
        ];
        rec.resize(PLOT_HEADER.len(), String::new());
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}
