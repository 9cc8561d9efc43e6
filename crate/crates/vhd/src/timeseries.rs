//! Trajectory CSV: header `t,S_h,...,G`, one row per sample, every value
//! written with 17 significant digits so that reading it back is exact.

use std::io::{Read, Write};

use vhd_core::state::{COMPONENTS, DIM};
use vhd_core::StateVector;

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

pub fn header() -> Vec<&'static str> {
    let mut h = vec!["t"];
    h.extend(COMPONENTS);
    h
}

fn format(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(out: W, times: &[f64], states: &[StateVector]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    let mut row: Vec<String> = Vec::with_capacity(DIM + 1);
    for (t, s) in times.iter().zip(states) {
        row.clear();
        row.push(format(*t));
        row.extend(s.to_array().iter().map(|v| format(*v)));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<StateVector>), CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != header() {
        return Err(CsvError::Header(found));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (idx, record) in r.records().enumerate() {
        let record = record?;
        let row = idx + 1;
        let mut values = [0.0; DIM + 1];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field.parse().map_err(|e| CsvError::Row {
                row,
                message: format!("'{field}': {e}"),
            })?;
        }
        times.push(values[0]);
        let mut state = [0.0; DIM];
        state.copy_from_slice(&values[1..]);
        states.push(StateVector::from_array(state));
    }
    Ok((times, states))
}
