//! Trajectory membership and prediction from stacked input/output Hankel
//! data.
//!
//! With input data persistently exciting of order `L + n` on a controllable
//! LTI system, a length-`L` pair `(u_bar, y_bar)` is a system trajectory
//! exactly when `[H_L(u); H_L(y)] beta = [u_bar; y_bar]` is solvable. The
//! solve here is the minimum-norm least-squares one, so results are
//! deterministic. Under noisy data the membership tolerance is a heuristic.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_norm_solve, numerical_rank};
use crate::pe::{build_mosaic_hankel, pe_check, PeReport};
use crate::series::TimeSeries;

/// `[H_L(u); H_L(y)]` (or a basis-lifted input block) built from one or more
/// experiments, with the PE evidence of its input block.
#[derive(Debug, Clone)]
pub struct DataDictionary {
    matrix: DMatrix<f64>,
    input_dim: usize,
    output_dim: usize,
    depth: usize,
    tolerance: f64,
    input_report: PeReport,
    inputs: Vec<TimeSeries>,
}

/// Dimensions and PE evidence written next to an exported dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionarySidecar {
    pub rows: usize,
    pub cols: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    #[serde(rename = "L")]
    pub depth: usize,
    pub input_report: PeReport,
}

/// Builds the dictionary. Column `c` of both blocks comes from the same
/// window of the same experiment.
pub fn build_dictionary(
    inputs: &[TimeSeries],
    outputs: &[TimeSeries],
    depth: usize,
    tol: f64,
) -> Result<DataDictionary> {
    if inputs.len() != outputs.len() {
        return Err(Error::DimensionMismatch {
            context: "number of input vs output experiments",
            expected: inputs.len(),
            found: outputs.len(),
        });
    }
    for (u, y) in inputs.iter().zip(outputs) {
        if u.len() != y.len() {
            return Err(Error::DimensionMismatch {
                context: "experiment length (inputs vs outputs)",
                expected: u.len(),
                found: y.len(),
            });
        }
    }
    let hu = build_mosaic_hankel(inputs, depth)?;
    let hy = build_mosaic_hankel(outputs, depth)?;
    let input_report = pe_check(&hu, tol);
    let (ru, ry, cols) = (hu.rows(), hy.rows(), hu.cols());
    let mut matrix = DMatrix::zeros(ru + ry, cols);
    matrix.rows_mut(0, ru).copy_from(hu.matrix());
    matrix.rows_mut(ru, ry).copy_from(hy.matrix());
    Ok(DataDictionary {
        matrix,
        input_dim: hu.eta(),
        output_dim: hy.eta(),
        depth,
        tolerance: tol,
        input_report,
        inputs: inputs.to_vec(),
    })
}

impl DataDictionary {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn columns(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn input_report(&self) -> &PeReport {
        &self.input_report
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.matrix, self.tolerance)
    }

    pub fn sidecar(&self) -> DictionarySidecar {
        DictionarySidecar {
            rows: self.matrix.nrows(),
            cols: self.matrix.ncols(),
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            depth: self.depth,
            input_report: self.input_report.clone(),
        }
    }

    /// Same dictionary with its columns reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.columns(), "permutation length mismatch");
        let mut out = self.clone();
        for (dst, &src) in perm.iter().enumerate() {
            out.matrix.set_column(dst, &self.matrix.column(src));
        }
        out
    }

    fn input_rows(&self) -> usize {
        self.input_dim * self.depth
    }

    fn check_query(&self, name: &'static str, s: &TimeSeries, dim: usize, len: usize) -> Result<()> {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: name,
                expected: dim,
                found: s.dim(),
            });
        }
        if s.len() != len {
            return Err(Error::DimensionMismatch {
                context: name,
                expected: len,
                found: s.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub is_member: bool,
    pub residual: f64,
    /// Threshold the residual was compared against, `tol * (1 + |query|)`.
    pub threshold: f64,
    pub beta: Vec<f64>,
}

/// Tests whether `(u_bar, y_bar)` lies in the column span of the dictionary.
pub fn membership(
    dict: &DataDictionary,
    u_bar: &TimeSeries,
    y_bar: &TimeSeries,
    tol: f64,
) -> Result<Membership> {
    dict.check_query("query input", u_bar, dict.input_dim, dict.depth)?;
    dict.check_query("query output", y_bar, dict.output_dim, dict.depth)?;
    let ru = dict.input_rows();
    let mut w = DVector::zeros(dict.matrix.nrows());
    w.rows_mut(0, ru).copy_from(&u_bar.stacked());
    w.rows_mut(ru, w.len() - ru).copy_from(&y_bar.stacked());
    let beta = min_norm_solve(&dict.matrix, &w, dict.tolerance);
    let residual = (&dict.matrix * &beta - &w).norm();
    let threshold = tol * (1.0 + w.norm());
    Ok(Membership {
        is_member: residual <= threshold,
        residual,
        threshold,
        beta: beta.as_slice().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub outputs: TimeSeries,
    /// Set when the stored input data is not PE of order `L + n_init`.
    pub pe_warning: Option<String>,
}

/// Predicts the length-`L` output for input `u_bar`, fixing the latent
/// initial condition through the first `n_init` outputs `y_init`.
///
/// `n_init` must be at least the system order. The answer is unique when
/// pinning inputs and initial outputs leaves no freedom in the output block;
/// otherwise an [`Error::Underdetermined`] reports the rank shortfall.
pub fn predict(dict: &DataDictionary, u_bar: &TimeSeries, y_init: &TimeSeries) -> Result<Prediction> {
    let n_init = y_init.len();
    dict.check_query("predict input", u_bar, dict.input_dim, dict.depth)?;
    if y_init.dim() != dict.output_dim {
        return Err(Error::DimensionMismatch {
            context: "initial output dimension",
            expected: dict.output_dim,
            found: y_init.dim(),
        });
    }
    if n_init > dict.depth {
        return Err(Error::InvalidParameter(format!(
            "n_init = {n_init} exceeds the dictionary depth L = {}",
            dict.depth
        )));
    }
    let ru = dict.input_rows();
    let p = dict.output_dim;
    let pinned = ru + p * n_init;
    let constrained = dict.matrix.rows(0, pinned).into_owned();
    let full_rank = dict.rank();
    let constrained_rank = numerical_rank(&constrained, dict.tolerance);
    if constrained_rank < full_rank {
        return Err(Error::Underdetermined {
            constrained: constrained_rank,
            full: full_rank,
        });
    }

    let mut rhs = DVector::zeros(pinned);
    rhs.rows_mut(0, ru).copy_from(&u_bar.stacked());
    rhs.rows_mut(ru, p * n_init).copy_from(&y_init.stacked());
    let beta = min_norm_solve(&constrained, &rhs, dict.tolerance);
    let y = dict.matrix.rows(ru, p * dict.depth) * beta;
    let outputs = TimeSeries::from_matrix(DMatrix::from_column_slice(p, dict.depth, y.as_slice()))?;

    let needed = dict.depth + n_init;
    let pe_warning = match build_mosaic_hankel(&dict.inputs, needed) {
        Ok(view) => {
            let rep = pe_check(&view, dict.tolerance);
            (!rep.persistently_exciting).then(|| {
                format!(
                    "input data not persistently exciting of order {needed} (rank {} of {})",
                    rep.rank, rep.rows
                )
            })
        }
        Err(e) => Some(format!("cannot check excitation of order {needed}: {e}")),
    };
    Ok(Prediction { outputs, pe_warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excite::impulse_train;
    use crate::linalg::DEFAULT_RANK_TOL;
    use crate::plant::{simulate, LtiPlant, Plant};

    fn scalar_plant() -> LtiPlant {
        LtiPlant::new(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap()
    }

    fn scalar_dict(depth: usize) -> DataDictionary {
        let plant = scalar_plant();
        let order = depth + plant.state_dim();
        let u = impulse_train(1, order, 2 * order - 1, 1.0).unwrap().experiments.remove(0);
        let t = simulate(&plant, &[0.0], &u).unwrap();
        build_dictionary(&[u], &[t.output_series().unwrap()], depth, DEFAULT_RANK_TOL).unwrap()
    }

    #[test]
    fn single_experiment_depth_one_pairs() {
        let u = TimeSeries::from_scalars(&[1.0, 2.0]).unwrap();
        let y = TimeSeries::from_scalars(&[3.0, 4.0]).unwrap();
        let d = build_dictionary(&[u], &[y], 1, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn zero_data_zero_dictionary() {
        let z = TimeSeries::zeros(1, 4).unwrap();
        let d = build_dictionary(std::slice::from_ref(&z), std::slice::from_ref(&z), 2, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.matrix().amax(), 0.0);
        assert_eq!(d.rank(), 0);
    }

    #[test]
    fn misaligned_lengths_rejected() {
        let u = TimeSeries::from_scalars(&[1.0, 2.0, 3.0]).unwrap();
        let y = TimeSeries::from_scalars(&[1.0, 2.0]).unwrap();
        assert!(build_dictionary(std::slice::from_ref(&u), &[y], 1, DEFAULT_RANK_TOL).is_err());
        assert!(build_dictionary(&[u.clone(), u.clone()], &[u], 1, DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn dictionary_rank_is_ml_plus_n() {
        let d = scalar_dict(3);
        assert_eq!(d.rank(), 3 + 1);
    }

    #[test]
    fn dictionary_column_is_member() {
        let d = scalar_dict(2);
        let col = d.matrix().column(1);
        let u = TimeSeries::from_scalars(&[col[0], col[1]]).unwrap();
        let y = TimeSeries::from_scalars(&[col[2], col[3]]).unwrap();
        let m = membership(&d, &u, &y, 1e-10).unwrap();
        assert!(m.is_member);
        assert!(m.residual < 1e-14);
    }

    #[test]
    fn constant_output_with_zero_input_is_rejected() {
        let d = scalar_dict(3);
        let u = TimeSeries::zeros(1, 3).unwrap();
        let y = TimeSeries::from_scalars(&[1.0, 1.0, 1.0]).unwrap();
        let m = membership(&d, &u, &y, 1e-6).unwrap();
        assert!(!m.is_member);
        assert!(m.residual > 0.1);
    }

    #[test]
    fn predict_hand_recursion() {
        let d = scalar_dict(2);
        let u = TimeSeries::from_scalars(&[1.0, 0.0]).unwrap();
        let y0 = TimeSeries::from_scalars(&[0.0]).unwrap();
        let p = predict(&d, &u, &y0).unwrap();
        let y = p.outputs.component(0);
        assert!(y[0].abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
        assert!(p.pe_warning.is_none());
    }

    #[test]
    fn predict_zero_is_zero() {
        let d = scalar_dict(3);
        let p = predict(&d, &TimeSeries::zeros(1, 3).unwrap(), &TimeSeries::zeros(1, 1).unwrap()).unwrap();
        assert_eq!(p.outputs.as_matrix().amax(), 0.0);
    }

    #[test]
    fn predict_with_too_few_initial_outputs_is_underdetermined() {
        // Two-state plant, one pinned output: the latent state keeps one
        // free direction.
        let plant = LtiPlant::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -0.5, 1.0]),
            DMatrix::from_column_slice(2, 1, &[0.0, 1.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        let depth = 3;
        let order = depth + 2;
        let u = impulse_train(1, order, 2 * order - 1, 1.0).unwrap().experiments.remove(0);
        let t = simulate(&plant, &[0.0, 0.0], &u).unwrap();
        let d = build_dictionary(&[u], &[t.output_series().unwrap()], depth, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(d.rank(), depth + 2);
        let ubar = TimeSeries::zeros(1, depth).unwrap();
        let err = predict(&d, &ubar, &TimeSeries::from_scalars(&[0.0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Underdetermined { constrained: 4, full: 5 }));
        assert!(predict(&d, &ubar, &TimeSeries::from_scalars(&[0.0, 0.0]).unwrap()).is_ok());
    }

    #[test]
    fn predict_warns_without_enough_excitation() {
        let plant = scalar_plant();
        // PE of order 2 only, dictionary depth 2, n_init 1 needs order 3.
        let u = TimeSeries::from_scalars(&[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let t = simulate(&plant, &[0.0], &u).unwrap();
        let d = build_dictionary(&[u], &[t.output_series().unwrap()], 2, DEFAULT_RANK_TOL).unwrap();
        let p = predict(
            &d,
            &TimeSeries::from_scalars(&[1.0, 0.0]).unwrap(),
            &TimeSeries::from_scalars(&[0.0]).unwrap(),
        )
        .unwrap();
        assert!(p.pe_warning.is_some());
        assert!((p.outputs.component(0)[1] - 1.0).abs() < 1e-12);
    }
}
