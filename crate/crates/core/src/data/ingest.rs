use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::record::{RawObservation, SectionAttributes, SectionId};
use crate::{Error, Result, SCHEMA_VERSION};

/// Header names for every required column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub section_number: String,
    pub year: String,
    pub crash_count: String,
    pub section_length: String,
    pub shoulder: String,
    pub speed_limit: String,
    pub on_street_parking: String,
    pub one_way: String,
    pub num_lanes: String,
    pub road_class: String,
    pub median: String,
    pub lane_width: String,
    pub cbd: String,
    pub aadt_per_lane: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            section_number: "section_number".into(),
            year: "year".into(),
            crash_count: "crash_count".into(),
            section_length: "section_length".into(),
            shoulder: "shoulder".into(),
            speed_limit: "speed_limit".into(),
            on_street_parking: "on_street_parking".into(),
            one_way: "one_way".into(),
            num_lanes: "num_lanes".into(),
            road_class: "road_class".into(),
            median: "median".into(),
            lane_width: "lane_width".into(),
            cbd: "cbd".into(),
            aadt_per_lane: "aadt_per_lane".into(),
        }
    }
}

impl ColumnMap {
    fn names(&self) -> [&str; 14] {
        [
            &self.section_number,
            &self.year,
            &self.crash_count,
            &self.section_length,
            &self.shoulder,
            &self.speed_limit,
            &self.on_street_parking,
            &self.one_way,
            &self.num_lanes,
            &self.road_class,
            &self.median,
            &self.lane_width,
            &self.cbd,
            &self.aadt_per_lane,
        ]
    }
}

// Positions in `ColumnMap::names`.
const SECTION: usize = 0;
const YEAR: usize = 1;
const COUNT: usize = 2;
const LENGTH: usize = 3;
const SHOULDER: usize = 4;
const SPEED: usize = 5;
const PARKING: usize = 6;
const ONE_WAY: usize = 7;
const LANES: usize = 8;
const CLASS: usize = 9;
const MEDIAN: usize = 10;
const WIDTH: usize = 11;
const CBD: usize = 12;
const AADT: usize = 13;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub missing: usize,
    pub unparsable: usize,
    pub invalid: usize,
    pub duplicate: usize,
}

impl DropCounts {
    pub fn total(&self) -> usize {
        self.missing + self.unparsable + self.invalid + self.duplicate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    /// 1-based line number in the source, header included.
    pub line: u64,
    pub column: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestionReport {
    pub schema_version: u32,
    pub rows_read: usize,
    pub rows_kept: usize,
    pub dropped: DropCounts,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub records: Vec<RawObservation>,
    pub report: IngestionReport,
}

enum RowOutcome {
    Missing(RowError),
    Unparsable(RowError),
    Invalid(RowError),
}

/// Reads section-year records from a headed CSV stream.
///
/// Incomplete rows, unparsable cells and out-of-domain values skip the row
/// and are tallied in the report. Repeated `(section, year)` pairs keep the
/// first occurrence.
pub fn ingest_csv<R: Read>(source: R, columns: &ColumnMap) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let names = columns.names();
    let mut positions = [0usize; 14];
    for (slot, name) in names.iter().enumerate() {
        positions[slot] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| Error::Schema(format!("missing required column `{name}`")))?;
    }

    let mut records = Vec::new();
    let mut dropped = DropCounts::default();
    let mut errors = Vec::new();
    let mut seen: HashSet<(SectionId, i32)> = HashSet::new();
    let mut rows_read = 0;

    for row in reader.records() {
        let row = row?;
        rows_read += 1;
        let line = row.position().map_or(rows_read as u64 + 1, |p| p.line());
        let cells: Vec<Option<&str>> = positions
            .iter()
            .map(|&i| row.get(i).filter(|s| !s.is_empty()))
            .collect();

        match parse_row(&cells, &names, line) {
            Ok(obs) => {
                if seen.insert((obs.section_number.clone(), obs.year)) {
                    records.push(obs);
                } else {
                    dropped.duplicate += 1;
                }
            }
            Err(RowOutcome::Missing(e)) => {
                dropped.missing += 1;
                errors.push(e);
            }
            Err(RowOutcome::Unparsable(e)) => {
                dropped.unparsable += 1;
                errors.push(e);
            }
            Err(RowOutcome::Invalid(e)) => {
                dropped.invalid += 1;
                errors.push(e);
            }
        }
    }

    let report = IngestionReport {
        schema_version: SCHEMA_VERSION,
        rows_read,
        rows_kept: records.len(),
        dropped,
        errors,
    };
    Ok(Ingested { records, report })
}

fn parse_row(
    cells: &[Option<&str>],
    names: &[&str; 14],
    line: u64,
) -> std::result::Result<RawObservation, RowOutcome> {
    if let Some(slot) = cells.iter().position(Option::is_none) {
        return Err(RowOutcome::Missing(RowError {
            line,
            column: names[slot].to_string(),
            message: "missing value".into(),
        }));
    }
    let cell = |slot: usize| cells[slot].unwrap_or_default();
    let number = |slot: usize| -> std::result::Result<f64, RowOutcome> {
        let raw = cell(slot);
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(RowOutcome::Unparsable(RowError {
                line,
                column: names[slot].to_string(),
                message: format!("cannot parse `{raw}` as a number"),
            })),
        }
    };
    let invalid = |slot: usize, message: String| {
        RowOutcome::Invalid(RowError {
            line,
            column: names[slot].to_string(),
            message,
        })
    };
    let whole = |slot: usize, min: f64| -> std::result::Result<f64, RowOutcome> {
        let v = number(slot)?;
        if v.fract() != 0.0 || v < min || v > u32::MAX as f64 {
            return Err(invalid(
                slot,
                format!("expected an integer >= {min}, got {v}"),
            ));
        }
        Ok(v)
    };
    let flag = |slot: usize| -> std::result::Result<bool, RowOutcome> {
        let v = number(slot)?;
        if v == 0.0 {
            Ok(false)
        } else if v == 1.0 {
            Ok(true)
        } else {
            Err(invalid(slot, format!("indicator must be 0 or 1, got {v}")))
        }
    };
    let positive = |slot: usize| -> std::result::Result<f64, RowOutcome> {
        let v = number(slot)?;
        if v <= 0.0 {
            return Err(invalid(slot, format!("must be > 0, got {v}")));
        }
        Ok(v)
    };

    let year = number(YEAR)?;
    if year.fract() != 0.0 || year.abs() > i32::MAX as f64 {
        return Err(invalid(YEAR, format!("not a calendar year: {year}")));
    }

    Ok(RawObservation {
        section_number: SectionId(cell(SECTION).to_string()),
        year: year as i32,
        crash_count: whole(COUNT, 0.0)? as u32,
        aadt_per_lane: positive(AADT)?,
        attributes: SectionAttributes {
            section_length: positive(LENGTH)?,
            shoulder: flag(SHOULDER)?,
            speed_limit: positive(SPEED)?,
            on_street_parking: flag(PARKING)?,
            one_way: flag(ONE_WAY)?,
            num_lanes: whole(LANES, 1.0)? as u32,
            road_class: cell(CLASS).to_string(),
            median: flag(MEDIAN)?,
            lane_width: positive(WIDTH)?,
            cbd: flag(CBD)?,
        },
    })
}

/// Writes records in the layout [`ingest_csv`] reads.
pub fn write_csv<W: Write>(records: &[RawObservation], columns: &ColumnMap, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(columns.names())?;
    let bit = |b: bool| if b { "1" } else { "0" };
    for r in records {
        let a = &r.attributes;
        writer.write_record([
            r.section_number.0.clone(),
            r.year.to_string(),
            r.crash_count.to_string(),
            a.section_length.to_string(),
            bit(a.shoulder).to_string(),
            a.speed_limit.to_string(),
            bit(a.on_street_parking).to_string(),
            bit(a.one_way).to_string(),
            a.num_lanes.to_string(),
            a.road_class.clone(),
            bit(a.median).to_string(),
            a.lane_width.to_string(),
            bit(a.cbd).to_string(),
            r.aadt_per_lane.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
