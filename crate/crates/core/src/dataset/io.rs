//! CSV reading and writing.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, DatasetError, Observation, RegionSeries, SequenceLabel, CENTURY};

/// Required header columns.
pub const COLUMNS: [&str; 7] =
    ["NGA", "PolID", "AbsTime", "RelTime", "SPC1", "Culture.Sequence", "Institutions.Sequence"];

/// Extra column written by [`write_dataset`] and read back when present.
pub const SCALED_COLUMN: &str = "SPC1.scaled";

const OUTSIDE: &str = "outside.central";

pub fn read_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let file =
        std::fs::File::open(path).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    parse_dataset(file)
}

pub fn parse_dataset<R: Read>(input: R) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let index = |name: &str| headers.iter().position(|h| h == name);
    let mut cols = [0usize; 7];
    for (slot, name) in cols.iter_mut().zip(COLUMNS) {
        *slot = index(name).ok_or_else(|| DatasetError::MissingColumn(name.to_string()))?;
    }
    let scaled_col = index(SCALED_COLUMN);
    let [nga_c, pol_c, abs_c, rel_c, spc_c, cul_c, ins_c] = cols;

    let mut grouped: BTreeMap<String, Vec<(u64, Observation)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let row_err = |message: String| DatasetError::Row { line, message };

        let nga = field(nga_c);
        if nga.is_empty() {
            return Err(row_err("empty NGA".into()));
        }
        let abs_time = parse_year(field(abs_c))
            .ok_or_else(|| row_err(format!("AbsTime `{}` is not an integer year", field(abs_c))))?;
        let rel_time_recorded = match field(rel_c) {
            s if is_missing(s) => None,
            s => Some(parse_year(s).ok_or_else(|| row_err(format!("RelTime `{s}` is not an integer year")))?),
        };
        let spc1_raw = parse_real(field(spc_c))
            .ok_or_else(|| row_err(format!("SPC1 `{}` is not a finite number", field(spc_c))))?;
        let spc1_scaled = match scaled_col.map(field) {
            None => None,
            Some(s) if is_missing(s) => None,
            Some(s) => {
                Some(parse_real(s).ok_or_else(|| row_err(format!("{SCALED_COLUMN} `{s}` is not a finite number")))?)
            }
        };
        let culture = parse_label(field(cul_c), &["cultural.continuity"])
            .ok_or_else(|| row_err(format!("unknown Culture.Sequence label `{}`", field(cul_c))))?;
        let institution =
            parse_label(field(ins_c), &["institutional.continuity-equivalent", "institutional.continuity"])
                .ok_or_else(|| row_err(format!("unknown Institutions.Sequence label `{}`", field(ins_c))))?;

        grouped.entry(nga.to_string()).or_default().push((
            line,
            Observation {
                pol_id: field(pol_c).to_string(),
                abs_time,
                rel_time_recorded,
                spc1_raw,
                spc1_scaled,
                culture,
                institution,
            },
        ));
    }

    let mut regions = Vec::with_capacity(grouped.len());
    for (nga, mut rows) in grouped {
        rows.sort_by_key(|(_, o)| o.abs_time);
        for pair in rows.windows(2) {
            let (line, ref o) = pair[1];
            let gap = o.abs_time - pair[0].1.abs_time;
            if gap == 0 {
                return Err(DatasetError::Duplicate { line, nga, abs_time: o.abs_time });
            }
            if gap % CENTURY != 0 {
                return Err(DatasetError::OffGrid { nga, abs_time: o.abs_time });
            }
        }
        regions.push(RegionSeries { nga, points: rows.into_iter().map(|(_, o)| o).collect() });
    }
    Ok(Dataset { regions, scale: None })
}

/// Write the seven input columns plus the scaled score.
pub fn write_dataset<W: Write>(dataset: &Dataset, out: W) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    header.push(SCALED_COLUMN);
    writer.write_record(&header)?;
    for region in &dataset.regions {
        for p in &region.points {
            writer.write_record([
                region.nga.clone(),
                p.pol_id.clone(),
                p.abs_time.to_string(),
                p.rel_time_recorded.map(|t| t.to_string()).unwrap_or_default(),
                p.spc1_raw.to_string(),
                label_text(p.culture, "cultural.continuity").into(),
                label_text(p.institution, "institutional.continuity-equivalent").into(),
                p.spc1_scaled.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    writer.flush().map_err(|source| DatasetError::Io { path: "<output>".into(), source })?;
    Ok(())
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s == "NA"
}

fn parse_year(s: &str) -> Option<i64> {
    s.parse::<i64>().ok().or_else(|| {
        // tolerate "-500.0" style integers
        let v: f64 = s.parse().ok()?;
        (v.fract() == 0.0 && v.abs() < 1e15).then_some(v as i64)
    })
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_label(s: &str, continuous: &[&str]) -> Option<SequenceLabel> {
    if is_missing(s) || s == OUTSIDE {
        Some(SequenceLabel::OutsideCentral)
    } else if continuous.contains(&s) {
        Some(SequenceLabel::Continuous)
    } else {
        None
    }
}

fn label_text(label: SequenceLabel, continuous: &'static str) -> &'static str {
    match label {
        SequenceLabel::Continuous => continuous,
        SequenceLabel::OutsideCentral => OUTSIDE,
    }
}
