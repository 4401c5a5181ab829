//! The universal data carrier: a finite sequence of equally sized real vectors.

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::{Error, Result};

/// A sequence `z_0, ..., z_{N-1}` with every `z_k` in `R^eta`.
///
/// Samples are stored as the columns of an `eta x N` matrix, so window
/// extraction and Hankel construction are plain column copies.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    data: DMatrix<f64>,
}

impl TimeSeries {
    /// Builds a series from a list of samples. All samples must share one
    /// dimension and the list must be non-empty.
    pub fn from_samples<S: AsRef<[f64]>>(samples: &[S]) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptySeries)?;
        let eta = first.as_ref().len();
        if eta == 0 {
            return Err(Error::InvalidParameter("sample dimension must be >= 1".into()));
        }
        let mut data = DMatrix::zeros(eta, samples.len());
        for (k, s) in samples.iter().enumerate() {
            let s = s.as_ref();
            if s.len() != eta {
                return Err(Error::RaggedSeries {
                    index: k,
                    expected: eta,
                    found: s.len(),
                });
            }
            data.column_mut(k).copy_from_slice(s);
        }
        Ok(Self { data })
    }

    /// A scalar (`eta = 1`) series.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self {
            data: DMatrix::from_row_slice(1, values.len(), values),
        })
    }

    /// Wraps an `eta x N` matrix whose columns are the samples.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(Error::EmptySeries);
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidParameter("sample dimension must be >= 1".into()));
        }
        Ok(Self { data })
    }

    pub fn zeros(eta: usize, len: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::zeros(eta, len))
    }

    /// Number of samples `N`.
    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    /// Sample dimension `eta`.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn sample(&self, k: usize) -> DVectorView<'_, f64> {
        self.data.column(k)
    }

    pub fn sample_vec(&self, k: usize) -> DVector<f64> {
        self.data.column(k).into_owned()
    }

    pub fn set_sample(&mut self, k: usize, value: &[f64]) {
        self.data.column_mut(k).copy_from_slice(value);
    }

    /// Stacked window `z_[l, j]` (inclusive on both ends) as one vector of
    /// length `eta * (j - l + 1)`.
    pub fn window(&self, l: usize, j: usize) -> DVector<f64> {
        assert!(l <= j && j < self.len(), "window [{l}, {j}] out of range");
        let eta = self.dim();
        let mut out = DVector::zeros(eta * (j - l + 1));
        for (b, k) in (l..=j).enumerate() {
            out.rows_mut(b * eta, eta).copy_from(&self.data.column(k));
        }
        out
    }

    /// The `eta x N` sample matrix.
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Stacked vector `z = [z_0; z_1; ...; z_{N-1}]`.
    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_column_slice(self.data.as_slice())
    }

    /// Samples as nested vectors, one inner vector per time step.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    /// Scalar component `i` across time.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    /// Sub-series of samples `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {start}..{end} invalid for series of length {}",
                self.len()
            )));
        }
        Self::from_matrix(self.data.columns(start, end - start).into_owned())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: &self.data * factor,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_samples_rejected() {
        let err = TimeSeries::from_samples(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::RaggedSeries { index: 1, .. }));
    }

    #[test]
    fn empty_rejected() {
        let empty: [Vec<f64>; 0] = [];
        assert!(matches!(
            TimeSeries::from_samples(&empty),
            Err(Error::EmptySeries)
        ));
        assert!(TimeSeries::from_scalars(&[]).is_err());
    }

    #[test]
    fn window_stacks_samples() {
        let z = TimeSeries::from_samples(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(z.window(1, 2).as_slice(), &[3.0, 4.0, 5.0, 6.0]);
        assert_eq!(z.stacked().as_slice(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(z.component(1), vec![2.0, 4.0, 6.0]);
    }
}
