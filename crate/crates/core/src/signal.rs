//! Uniformly sampled real signals.

use crate::error::{Error, Result};

/// A real signal sampled on a uniform axis starting at `t0` with spacing `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    pub axis_label: String,
    pub value_label: String,
}

impl SignalSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract("signal must not be empty".into()));
        }
        if !dt.is_finite() || dt <= 0.0 || !t0.is_finite() {
            return Err(Error::Contract(format!("bad signal axis: t0={t0}, dt={dt}")));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite sample at index {bad}")));
        }
        Ok(SignalSeries {
            t0,
            dt,
            values,
            axis_label: "t".into(),
            value_label: "f".into(),
        })
    }

    pub fn with_labels(mut self, axis: &str, value: &str) -> Self {
        self.axis_label = axis.into();
        self.value_label = value.into();
        self
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Axis coordinate of sample `i`.
    pub fn coord(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Coordinate of the last sample.
    pub fn end(&self) -> f64 {
        self.coord(self.values.len() - 1)
    }
}
