//! Sampled curves in `R^{2n+1}` with their parameter values.

use serde::Serialize;
use std::io::{self, Write};

use crate::error::{HeisError, Result};
use crate::fmt::fmt_f64;
use crate::group::HPoint;

/// A sampled curve: strictly increasing parameter values paired with points
/// of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    params: Vec<f64>,
    points: Vec<HPoint>,
}

impl Polyline {
    pub fn new(params: Vec<f64>, points: Vec<HPoint>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(HeisError::DimensionMismatch {
                left: params.len(),
                right: points.len(),
            });
        }
        if params.is_empty() {
            return Err(HeisError::InvalidArgument("polyline needs samples".into()));
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(HeisError::InvalidArgument(
                "polyline parameters must be finite".into(),
            ));
        }
        if params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HeisError::InvalidArgument(
                "polyline parameters must be strictly increasing".into(),
            ));
        }
        let n = points[0].dim();
        if points.iter().any(|p| p.dim() != n) {
            return Err(HeisError::InvalidArgument(
                "polyline points must share one dimension".into(),
            ));
        }
        Ok(Polyline { params, points })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[HPoint] {
        &self.points
    }

    /// Sum of Euclidean chord lengths of the xy-projection. Converges to the
    /// metric length of a sampled horizontal curve as the sampling refines.
    pub fn projected_chord_length(&self) -> f64 {
        let mut total = 0.0;
        for w in self.points.windows(2) {
            let mut chord = 0.0;
            for j in 0..w[0].dim() {
                chord += (w[1].x()[j] - w[0].x()[j]).powi(2);
                chord += (w[1].y()[j] - w[0].y()[j]).powi(2);
            }
            total += chord.sqrt();
        }
        total
    }

    /// Writes the samples as CSV with header `s,x1..xn,y1..yn,t`, one row per
    /// sample, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let n = self.dim();
        let mut header = String::from("s");
        for j in 1..=n {
            header.push_str(&format!(",x{j}"));
        }
        for j in 1..=n {
            header.push_str(&format!(",y{j}"));
        }
        header.push_str(",t");
        writeln!(out, "{header}")?;
        for (s, p) in self.params.iter().zip(self.points.iter()) {
            let mut row = fmt_f64(*s);
            for v in p.x() {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            for v in p.y() {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            row.push(',');
            row.push_str(&fmt_f64(p.t()));
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}
