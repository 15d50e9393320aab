//! CSV schemas for every artifact the commands write.
//!
//! Floats are written in shortest round-trip form (`ryu`), so reading a file
//! back yields bit-identical values. Readers check the header exactly and
//! reject rows that do not fit the schema.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    ryu::Buffer::new().format(v).to_owned()
}

/// A fixed-schema CSV row.
pub trait Record: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

macro_rules! field {
    (f64, $v:expr) => {
        fmt_f64($v)
    };
    (opt_u64, $v:expr) => {
        $v.map(|x| x.to_string()).unwrap_or_default()
    };
    (opt_f64, $v:expr) => {
        $v.map(fmt_f64).unwrap_or_default()
    };
    (display, $v:expr) => {
        $v.to_string()
    };
}

macro_rules! record {
    ($(#[$meta:meta])* $name:ident { $($field:ident : $ty:ty => $kind:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $name {
            $(pub $field: $ty),+
        }

        impl Record for $name {
            const HEADER: &'static [&'static str] = &[$(stringify!($field)),+];

            fn fields(&self) -> Vec<String> {
                vec![$(field!($kind, self.$field.clone())),+]
            }
        }
    };
}

record! {
    /// `sweep.csv`
    SweepRecord {
        model: String => display,
        lr: f64 => f64,
        trials: usize => display,
        successes: usize => display,
        success_rate: f64 => f64,
    }
}

record! {
    /// `curves.csv`
    CurveRecord {
        model: String => display,
        epoch: usize => display,
        success_rate: f64 => f64,
        mean_mse: f64 => f64,
    }
}

record! {
    /// `landscape.csv`
    LandscapeRecord {
        w1: f64 => f64,
        w2: f64 => f64,
        mse: f64 => f64,
    }
}

record! {
    /// `minima.csv`: one row per local minimum (plateau centroid).
    MinimumRecord {
        w1: f64 => f64,
        w2: f64 => f64,
        mse: f64 => f64,
        cells: usize => display,
        classes: String => display,
    }
}

record! {
    /// `quadrants.csv`
    QuadrantRecord {
        slope: String => display,
        quadrant: u8 => display,
        trials: usize => display,
        successes: usize => display,
        success_rate: f64 => f64,
        and_pattern: usize => display,
    }
}

record! {
    /// `trajectory_<slope>_q<k>_<i>.csv`
    TrajectoryRecord {
        step: usize => display,
        w1: f64 => f64,
        w2: f64 => f64,
        mse: f64 => f64,
    }
}

record! {
    /// `boundary_<model>.csv`
    BoundaryRecord {
        x1: f64 => f64,
        x2: f64 => f64,
        mean_class: f64 => f64,
    }
}

record! {
    /// `margins.csv`
    MarginRecord {
        model: String => display,
        range: String => display,
        margin: f64 => f64,
        relative_margin: f64 => f64,
    }
}

record! {
    /// `bench.csv`; the time is empty when timing is suppressed.
    BenchRecord {
        model: String => display,
        repetition: usize => display,
        wall_time_ns: Option<u64> => opt_u64,
    }
}

record! {
    /// `bench_summary.csv`
    BenchSummaryRecord {
        model: String => display,
        min_ns: Option<f64> => opt_f64,
        median_ns: Option<f64> => opt_f64,
        p95_ns: Option<f64> => opt_f64,
    }
}

pub fn write_records<R: Record, W: Write>(out: W, rows: &[R]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_bytes<R: Record>(rows: &[R]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_records(&mut buf, rows)?;
    Ok(buf)
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> CliResult<()> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(CliError::Format(format!(
            "expected header {:?}, found {:?}",
            expected.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Parses a whole file of `R` rows, header included.
pub fn read_records<R: Record, I: Read>(input: I) -> CliResult<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    check_header(&header, R::HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(rec.deserialize::<R>(Some(&header))?);
    }
    Ok(rows)
}

/// `trial.csv`: `epoch, mse, correct_count` then one column per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTable {
    pub param_names: Vec<String>,
    pub rows: Vec<TrialRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub epoch: usize,
    pub mse: f64,
    pub correct_count: u8,
    pub params: Vec<f64>,
}

pub const TRIAL_FIXED_COLUMNS: [&str; 3] = ["epoch", "mse", "correct_count"];

impl TrialTable {
    pub fn write<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = TRIAL_FIXED_COLUMNS
            .iter()
            .copied()
            .chain(self.param_names.iter().map(String::as_str))
            .collect();
        w.write_record(&header)?;
        for r in &self.rows {
            let mut f = vec![
                r.epoch.to_string(),
                fmt_f64(r.mse),
                r.correct_count.to_string(),
            ];
            f.extend(r.params.iter().map(|&p| fmt_f64(p)));
            w.write_record(&f)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<I: Read>(input: I) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = rdr.headers()?.clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.len() < 4 || cols[..3] != TRIAL_FIXED_COLUMNS {
            return Err(CliError::Format(format!(
                "trial.csv header must start with {} and name at least one parameter",
                TRIAL_FIXED_COLUMNS.join(",")
            )));
        }
        let param_names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != cols.len() {
                return Err(CliError::Format(format!(
                    "row has {} fields, expected {}",
                    rec.len(),
                    cols.len()
                )));
            }
            let num = |i: usize| -> CliResult<f64> {
                rec[i]
                    .parse()
                    .map_err(|_| CliError::Format(format!("bad number {:?}", &rec[i])))
            };
            let correct_count: u8 = rec[2]
                .parse()
                .ok()
                .filter(|c| *c <= 4)
                .ok_or_else(|| CliError::Format(format!("bad correct_count {:?}", &rec[2])))?;
            rows.push(TrialRow {
                epoch: rec[0]
                    .parse()
                    .map_err(|_| CliError::Format(format!("bad epoch {:?}", &rec[0])))?,
                mse: num(1)?,
                correct_count,
                params: (3..cols.len()).map(num).collect::<CliResult<_>>()?,
            });
        }
        Ok(TrialTable { param_names, rows })
    }
}

/// Any artifact, recognised by its header line.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Sweep(Vec<SweepRecord>),
    Curves(Vec<CurveRecord>),
    Landscape(Vec<LandscapeRecord>),
    Minima(Vec<MinimumRecord>),
    Quadrants(Vec<QuadrantRecord>),
    Trajectory(Vec<TrajectoryRecord>),
    Boundary(Vec<BoundaryRecord>),
    Margins(Vec<MarginRecord>),
    Bench(Vec<BenchRecord>),
    BenchSummary(Vec<BenchSummaryRecord>),
    Trial(TrialTable),
}

impl Table {
    pub fn kind(&self) -> &'static str {
        match self {
            Table::Sweep(_) => "sweep",
            Table::Curves(_) => "curves",
            Table::Landscape(_) => "landscape",
            Table::Minima(_) => "minima",
            Table::Quadrants(_) => "quadrants",
            Table::Trajectory(_) => "trajectory",
            Table::Boundary(_) => "boundary",
            Table::Margins(_) => "margins",
            Table::Bench(_) => "bench",
            Table::BenchSummary(_) => "bench_summary",
            Table::Trial(_) => "trial",
        }
    }
}

/// Detects the schema from the header and parses the whole file.
pub fn parse_table(bytes: &[u8]) -> CliResult<Table> {
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let header = std::str::from_utf8(first)
        .map_err(|_| CliError::Format("header is not UTF-8".into()))?
        .trim_end_matches('\r');
    let is = |h: &[&str]| header == h.join(",");
    Ok(if is(SweepRecord::HEADER) {
        Table::Sweep(read_records(bytes)?)
    } else if is(CurveRecord::HEADER) {
        Table::Curves(read_records(bytes)?)
    } else if is(LandscapeRecord::HEADER) {
        Table::Landscape(read_records(bytes)?)
    } else if is(MinimumRecord::HEADER) {
        Table::Minima(read_records(bytes)?)
    } else if is(QuadrantRecord::HEADER) {
        Table::Quadrants(read_records(bytes)?)
    } else if is(TrajectoryRecord::HEADER) {
        Table::Trajectory(read_records(bytes)?)
    } else if is(BoundaryRecord::HEADER) {
        Table::Boundary(read_records(bytes)?)
    } else if is(MarginRecord::HEADER) {
        Table::Margins(read_records(bytes)?)
    } else if is(BenchRecord::HEADER) {
        Table::Bench(read_records(bytes)?)
    } else if is(BenchSummaryRecord::HEADER) {
        Table::BenchSummary(read_records(bytes)?)
    } else if header.starts_with(&TRIAL_FIXED_COLUMNS.join(",")) {
        Table::Trial(TrialTable::read(bytes)?)
    } else {
        return Err(CliError::Format(format!("unrecognised header {header:?}")));
    })
}
