//! Hankel and mosaic-Hankel construction and persistence-of-excitation checks.
//!
//! Three notions are reported side by side:
//!
//! * *exciting over the interval*: the Gram sum `sum_k z_k z_k^T` is positive
//!   definite (smallest eigenvalue `nu_min > 0`);
//! * *persistently exciting of order L*: the depth-`L` Hankel matrix has full
//!   row rank `eta * L` (collectively, for a mosaic of several series);
//! * *alpha-PE*: the smallest singular value of that Hankel matrix is at
//!   least `alpha`, meaningful only when it has at least as many columns as
//!   rows.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank_from_singular_values, singular_values};
use crate::series::TimeSeries;

/// A realized (mosaic) Hankel matrix together with the series it came from.
#[derive(Debug, Clone)]
pub struct HankelView {
    depth: usize,
    eta: usize,
    sources: Vec<TimeSeries>,
    matrix: DMatrix<f64>,
}

impl HankelView {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn sources(&self) -> &[TimeSeries] {
        &self.sources
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Number of columns contributed by each source series, in order.
    pub fn block_columns(&self) -> Vec<usize> {
        self.sources
            .iter()
            .map(|s| s.len() - self.depth + 1)
            .collect()
    }
}

fn hankel_block(z: &TimeSeries, depth: usize) -> DMatrix<f64> {
    let eta = z.dim();
    let cols = z.len() - depth + 1;
    let mut h = DMatrix::zeros(eta * depth, cols);
    for c in 0..cols {
        for b in 0..depth {
            h.view_mut((b * eta, c), (eta, 1))
                .copy_from(&z.sample(c + b));
        }
    }
    h
}

/// Depth-`depth` Hankel matrix `H_L(z)`: column `c` is the stacked window
/// `z_[c, c+L-1]`.
pub fn build_hankel(z: &TimeSeries, depth: usize) -> Result<HankelView> {
    build_mosaic_hankel(std::slice::from_ref(z), depth)
}

/// Mosaic Hankel matrix `[H_L(z^(1)) ... H_L(z^(r))]`, blocks in list order.
pub fn build_mosaic_hankel(series: &[TimeSeries], depth: usize) -> Result<HankelView> {
    if depth == 0 {
        return Err(Error::InvalidParameter("Hankel depth must be >= 1".into()));
    }
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidParameter("mosaic Hankel needs at least one series".into()))?;
    let eta = first.dim();
    for s in series {
        if s.dim() != eta {
            return Err(Error::DimensionMismatch {
                context: "mosaic Hankel series dimension",
                expected: eta,
                found: s.dim(),
            });
        }
        if s.len() < depth {
            return Err(Error::HorizonTooShort {
                context: "Hankel matrix of requested depth",
                required: depth,
                found: s.len(),
            });
        }
    }
    let total: usize = series.iter().map(|s| s.len() - depth + 1).sum();
    let mut matrix = DMatrix::zeros(eta * depth, total);
    let mut offset = 0;
    for s in series {
        let block = hankel_block(s, depth);
        matrix.columns_mut(offset, block.ncols()).copy_from(&block);
        offset += block.ncols();
    }
    Ok(HankelView {
        depth,
        eta,
        sources: series.to_vec(),
        matrix,
    })
}

/// Numeric evidence and verdicts for every PE notion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeReport {
    pub eta: usize,
    pub depth: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// The `eta*L`-th largest singular value of the Hankel matrix; zero when
    /// there are fewer columns than rows.
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Smallest eigenvalue of the Gram sum over all samples.
    pub nu_min: f64,
    /// Gram sum positive definite.
    pub exciting: bool,
    /// `rank == eta * L`.
    pub persistently_exciting: bool,
    /// At least as many columns as rows; alpha-PE is only defined then.
    pub shape_ok: bool,
    pub tolerance: f64,
}

impl PeReport {
    /// Quantitative PE level check: `sigma_min >= alpha > 0` on a
    /// well-shaped matrix.
    pub fn is_alpha_pe(&self, alpha: f64) -> bool {
        alpha > 0.0 && self.shape_ok && self.sigma_min >= alpha
    }
}

/// Which notion a caller wants a pass/fail answer for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeDefinition {
    /// Gram sum positive definite.
    Exciting,
    /// Full row rank Hankel matrix.
    Order,
    /// Smallest singular value at least `alpha`.
    Alpha(f64),
}

impl PeReport {
    pub fn passes(&self, def: PeDefinition) -> bool {
        match def {
            PeDefinition::Exciting => self.exciting,
            PeDefinition::Order => self.persistently_exciting,
            PeDefinition::Alpha(a) => self.is_alpha_pe(a),
        }
    }
}

/// Evaluates all PE notions on a realized view with relative rank
/// tolerance `tol`.
pub fn pe_check(view: &HankelView, tol: f64) -> PeReport {
    let rows = view.rows();
    let cols = view.cols();
    let sv = singular_values(view.matrix());
    let rank = rank_from_singular_values(&sv, rows, cols, tol);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = if cols >= rows {
        sv.get(rows - 1).copied().unwrap_or(0.0)
    } else {
        0.0
    };

    // Gram sum over every sample of every source. Its eigenvalues are the
    // squared singular values of the sample matrix, which is the accurate
    // way to obtain the smallest one.
    let samples = concat_samples(view.sources());
    let gram_sv = singular_values(&samples);
    let eta = view.eta();
    let n_samples = samples.ncols();
    let gram_rank = rank_from_singular_values(&gram_sv, eta, n_samples, tol);
    let nu_min = if n_samples >= eta {
        gram_sv.get(eta - 1).map_or(0.0, |s| s * s)
    } else {
        0.0
    };

    PeReport {
        eta,
        depth: view.depth(),
        rows,
        cols,
        rank,
        sigma_min,
        sigma_max,
        nu_min,
        exciting: gram_rank == eta,
        persistently_exciting: rank == rows,
        shape_ok: cols >= rows,
        tolerance: tol,
    }
}

fn concat_samples(series: &[TimeSeries]) -> DMatrix<f64> {
    let eta = series[0].dim();
    let total: usize = series.iter().map(TimeSeries::len).sum();
    let mut out = DMatrix::zeros(eta, total);
    let mut offset = 0;
    for s in series {
        out.columns_mut(offset, s.len()).copy_from(s.as_matrix());
        offset += s.len();
    }
    out
}

/// Largest `L` for which the series is PE of order `L`; zero if none.
///
/// Scans upward and stops at the first failure, which is sound because PE of
/// order `L` implies PE of every smaller order.
pub fn pe_order_max(z: &TimeSeries, tol: f64) -> usize {
    pe_order_max_mosaic(std::slice::from_ref(z), tol)
}

/// Collective variant of [`pe_order_max`] over several series.
pub fn pe_order_max_mosaic(series: &[TimeSeries], tol: f64) -> usize {
    let eta = series[0].dim();
    let mut best = 0;
    let mut depth = 1;
    loop {
        if series.iter().any(|s| s.len() < depth) {
            break;
        }
        let cols: usize = series.iter().map(|s| s.len() - depth + 1).sum();
        if cols < eta * depth {
            break;
        }
        let view = match build_mosaic_hankel(series, depth) {
            Ok(v) => v,
            Err(_) => break,
        };
        if !pe_check(&view, tol).persistently_exciting {
            break;
        }
        best = depth;
        depth += 1;
    }
    best
}
