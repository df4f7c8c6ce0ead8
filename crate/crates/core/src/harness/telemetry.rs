//! Per-phase, per-cycle telemetry.

use serde::Serialize;
use std::io::Write;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TelemetryRow {
    /// Simulated time, s.
    pub t: f64,
    pub phase: usize,
    /// Supervisor action.
    pub state: &'static str,
    /// Electrode command, V.
    pub u: f64,
    pub h: f64,
    pub v: f64,
    pub l_arc: f64,
    pub i: f64,
    pub e2: f64,
    pub z: f64,
    /// Scaled variable `Zs^2 / Z`, mOhm.
    pub y: f64,
    /// Regulation error in the unit of the active mode.
    pub e: f64,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub p: f64,
    pub q: f64,
    pub stage: &'static str,
}

pub trait TelemetrySink {
    fn record(&mut self, row: &TelemetryRow) -> Result<()>;

    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

/// Discards everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullSink;

impl TelemetrySink for NullSink {
    fn record(&mut self, _row: &TelemetryRow) -> Result<()> {
        Ok(())
    }
}

/// Keeps rows in memory.
#[derive(Clone, Debug, Default)]
pub struct VecSink(pub Vec<TelemetryRow>);

impl TelemetrySink for VecSink {
    fn record(&mut self, row: &TelemetryRow) -> Result<()> {
        self.0.push(row.clone());
        Ok(())
    }
}

/// CSV with a header row.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W) -> Self {
        Self {
            writer: csv::Writer::from_writer(inner),
        }
    }
}

impl<W: Write> TelemetrySink for CsvSink<W> {
    fn record(&mut self, row: &TelemetryRow) -> Result<()> {
        self.writer.serialize(row)?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
