//! Reference simulators: LTI, Hammerstein and SISO flat systems in normal
//! form.
//!
//! Flat systems are represented directly in Brunovsky coordinates
//! `xi_k = y_[k, k+n-1]`:
//!
//! ```text
//! xi_{i,k+1} = xi_{i+1,k}   (i < n)
//! xi_{n,k+1} = v_k = a(xi_k) + b * u_k
//! y_k        = xi_{1,k}
//! ```
//!
//! with `a(0) = 0` and `b != 0`, so the map from `u` to the synthetic input
//! `v` is invertible everywhere.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, DEFAULT_RANK_TOL};
use crate::series::TimeSeries;

/// A discrete-time system that can be stepped from a state and an input.
pub trait Plant: Send + Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64>;
    fn output(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64>;
    /// Synthetic input `v` of a flat plant; `None` for other classes.
    fn synthetic_input(&self, _x: &DVector<f64>, _u: &DVector<f64>) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtiPlant {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl LtiPlant {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || n == 0 {
            return Err(Error::InvalidParameter("A must be square and non-empty".into()));
        }
        let check = |context, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    context,
                    expected,
                    found,
                })
            }
        };
        check("rows of B", n, b.nrows())?;
        check("columns of C", n, c.ncols())?;
        check("rows of D", c.nrows(), d.nrows())?;
        check("columns of D", b.ncols(), d.ncols())?;
        if b.ncols() == 0 || c.nrows() == 0 {
            return Err(Error::InvalidParameter("B and C must be non-empty".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// `[B AB ... A^{n-1}B]`.
    pub fn controllability_matrix(&self) -> DMatrix<f64> {
        let n = self.a.nrows();
        let m = self.b.ncols();
        let mut out = DMatrix::zeros(n, n * m);
        let mut block = self.b.clone();
        for i in 0..n {
            out.columns_mut(i * m, m).copy_from(&block);
            block = &self.a * block;
        }
        out
    }

    pub fn is_controllable(&self) -> bool {
        numerical_rank(&self.controllability_matrix(), DEFAULT_RANK_TOL) == self.a.nrows()
    }

    /// The `n`-step integrator chain `xi^+ = A xi + B v`, `y = xi_1`.
    pub fn brunovsky(n: usize) -> Self {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            a[(i, i + 1)] = 1.0;
        }
        let mut b = DMatrix::zeros(n, 1);
        b[(n - 1, 0)] = 1.0;
        let mut c = DMatrix::zeros(1, n);
        c[(0, 0)] = 1.0;
        Self {
            a,
            b,
            c,
            d: DMatrix::zeros(1, 1),
        }
    }
}

impl Plant for LtiPlant {
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    fn input_dim(&self) -> usize {
        self.b.ncols()
    }
    fn output_dim(&self) -> usize {
        self.c.nrows()
    }
    fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b * u
    }
    fn output(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.c * x + &self.d * u
    }
}

/// Shape of one scalar term of a static input nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermShape {
    /// `u_i^power`
    Power { power: u32 },
    /// `sin(u_i)`
    Sin,
    /// Piecewise-linear interpolation through `(xs, ys)`, extrapolated from
    /// the end segments. `xs` must be strictly increasing.
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

/// `gamma_output += coef * shape(u_input)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub output: usize,
    pub input: usize,
    pub coef: f64,
    #[serde(flatten)]
    pub shape: TermShape,
}

fn interpolate(xs: &[f64], ys: &[f64], s: f64) -> f64 {
    let seg = match xs.iter().position(|&x| x > s) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => xs.len() - 2,
    };
    let (x0, x1) = (xs[seg], xs[seg + 1]);
    let w = (s - x0) / (x1 - x0);
    ys[seg] + w * (ys[seg + 1] - ys[seg])
}

impl GammaTerm {
    fn eval(&self, u: &DVector<f64>) -> f64 {
        let s = u[self.input];
        self.coef
            * match &self.shape {
                TermShape::Power { power } => s.powi(*power as i32),
                TermShape::Sin => s.sin(),
                TermShape::Table { xs, ys } => interpolate(xs, ys, s),
            }
    }
}

/// Static map `gamma: R^m -> R^mbar` built from a term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputNonlinearity {
    pub inputs: usize,
    pub outputs: usize,
    pub terms: Vec<GammaTerm>,
}

impl InputNonlinearity {
    pub fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.outputs);
        for t in &self.terms {
            out[t.output] += t.eval(u);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if t.output >= self.outputs || t.input >= self.inputs {
                return Err(Error::InvalidParameter(format!(
                    "gamma term indices ({}, {}) out of range",
                    t.output, t.input
                )));
            }
            if let TermShape::Table { xs, ys } = &t.shape {
                if xs.len() < 2 || xs.len() != ys.len() || xs.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidParameter(
                        "gamma table needs >= 2 strictly increasing nodes with matching values".into(),
                    ));
                }
            }
            if let TermShape::Power { power: 0 } = t.shape {
                return Err(Error::InvalidParameter("gamma power must be >= 1".into()));
            }
        }
        let at_origin = self.eval(&DVector::zeros(self.inputs));
        if at_origin.amax() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "gamma(0) must vanish, got {:?}",
                at_origin.as_slice()
            )));
        }
        Ok(())
    }
}

/// `x+ = A x + B gamma(u)`, `y = C x + D gamma(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HammersteinPlant {
    pub core: LtiPlant,
    pub gamma: InputNonlinearity,
}

impl HammersteinPlant {
    pub fn new(core: LtiPlant, gamma: InputNonlinearity) -> Result<Self> {
        gamma.validate()?;
        if core.b.ncols() != gamma.outputs {
            return Err(Error::DimensionMismatch {
                context: "columns of B vs gamma outputs",
                expected: gamma.outputs,
                found: core.b.ncols(),
            });
        }
        Ok(Self { core, gamma })
    }
}

impl Plant for HammersteinPlant {
    fn state_dim(&self) -> usize {
        self.core.state_dim()
    }
    fn input_dim(&self) -> usize {
        self.gamma.inputs
    }
    fn output_dim(&self) -> usize {
        self.core.output_dim()
    }
    fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        self.core.step(x, &self.gamma.eval(u))
    }
    fn output(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        self.core.output(x, &self.gamma.eval(u))
    }
}

/// One term of the drift `a(xi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlatTerm {
    /// `coef * sin(xi_sin)`
    Sin { coef: f64, sin: usize },
    /// `coef * prod_i xi_i^powers[i]`
    Monomial { coef: f64, powers: Vec<u32> },
}

impl FlatTerm {
    fn eval(&self, xi: &[f64]) -> f64 {
        match self {
            FlatTerm::Sin { coef, sin } => coef * xi[*sin].sin(),
            FlatTerm::Monomial { coef, powers } => {
                coef * powers
                    .iter()
                    .zip(xi)
                    .map(|(&p, &x)| x.powi(p as i32))
                    .product::<f64>()
            }
        }
    }
}

/// SISO flat system in normal form with `v = a(xi) + b u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatPlant {
    pub n: usize,
    pub a_terms: Vec<FlatTerm>,
    pub b_const: f64,
}

impl FlatPlant {
    pub fn new(n: usize, a_terms: Vec<FlatTerm>, b_const: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("flat system order n must be >= 1".into()));
        }
        if b_const == 0.0 || !b_const.is_finite() {
            return Err(Error::InvalidParameter(
                "b_const must be finite and nonzero (input channel must be invertible)".into(),
            ));
        }
        for t in &a_terms {
            match t {
                FlatTerm::Sin { sin, .. } if *sin >= n => {
                    return Err(Error::InvalidParameter(format!("sin index {sin} >= n = {n}")));
                }
                FlatTerm::Monomial { powers, .. } if powers.len() != n => {
                    return Err(Error::DimensionMismatch {
                        context: "flat monomial powers",
                        expected: n,
                        found: powers.len(),
                    });
                }
                FlatTerm::Monomial { powers, .. } if powers.iter().all(|&p| p == 0) => {
                    return Err(Error::InvalidParameter(
                        "constant drift term violates a(0) = 0".into(),
                    ));
                }
                _ => {}
            }
        }
        Ok(Self { n, a_terms, b_const })
    }

    /// The integrator chain `v = u`.
    pub fn chain(n: usize) -> Self {
        Self::new(n, Vec::new(), 1.0).expect("valid chain")
    }

    /// Second-order example with
    /// `v = -sin(xi_1) + xi_1 xi_2^2 - xi_1^3 xi_2 + u`.
    pub fn example() -> Self {
        Self::new(
            2,
            vec![
                FlatTerm::Sin { coef: -1.0, sin: 0 },
                FlatTerm::Monomial {
                    coef: 1.0,
                    powers: vec![1, 2],
                },
                FlatTerm::Monomial {
                    coef: -1.0,
                    powers: vec![3, 1],
                },
            ],
            1.0,
        )
        .expect("valid example system")
    }

    pub fn drift(&self, xi: &[f64]) -> f64 {
        self.a_terms.iter().map(|t| t.eval(xi)).sum()
    }

    /// Synthetic input `g(xi, u) = a(xi) + b u`.
    pub fn synthetic(&self, xi: &[f64], u: f64) -> f64 {
        self.drift(xi) + self.b_const * u
    }
}

/// The example flat system used by the stabilization experiments.
pub fn example_flat_system() -> FlatPlant {
    FlatPlant::example()
}

impl Plant for FlatPlant {
    fn state_dim(&self) -> usize {
        self.n
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn output_dim(&self) -> usize {
        1
    }
    fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut next = DVector::zeros(n);
        for i in 0..n - 1 {
            next[i] = x[i + 1];
        }
        next[n - 1] = self.synthetic(x.as_slice(), u[0]);
        next
    }
    fn output(&self, x: &DVector<f64>, _u: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, x[0])
    }
    fn synthetic_input(&self, x: &DVector<f64>, u: &DVector<f64>) -> Option<f64> {
        Some(self.synthetic(x.as_slice(), u[0]))
    }
}

/// Recorded run of a plant. `states` holds one more entry than `inputs`
/// (the terminal state) unless the run diverged.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub inputs: Vec<DVector<f64>>,
    pub outputs: Vec<DVector<f64>>,
    /// Recorded `v_k` for flat plants, empty otherwise.
    pub synthetic: Vec<f64>,
    /// Index of the first step whose successor state was non-finite or left
    /// the allowed bound; the trajectory is truncated before it.
    pub diverged_at: Option<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    fn series(v: &[DVector<f64>]) -> Result<TimeSeries> {
        let samples: Vec<&[f64]> = v.iter().map(|s| s.as_slice()).collect();
        TimeSeries::from_samples(&samples)
    }

    pub fn state_series(&self) -> Result<TimeSeries> {
        Self::series(&self.states)
    }

    pub fn input_series(&self) -> Result<TimeSeries> {
        Self::series(&self.inputs)
    }

    pub fn output_series(&self) -> Result<TimeSeries> {
        Self::series(&self.outputs)
    }

    pub fn synthetic_series(&self) -> Result<TimeSeries> {
        TimeSeries::from_scalars(&self.synthetic)
    }
}

/// Runs the plant under a state-feedback policy for `steps` steps, stopping
/// early when a state becomes non-finite or its infinity norm exceeds
/// `bound`.
pub fn simulate_feedback<P, F>(
    plant: &P,
    x0: &[f64],
    steps: usize,
    bound: f64,
    mut policy: F,
) -> Result<Trajectory>
where
    P: Plant + ?Sized,
    F: FnMut(usize, &DVector<f64>) -> DVector<f64>,
{
    let n = plant.state_dim();
    let m = plant.input_dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            expected: n,
            found: x0.len(),
        });
    }
    let mut x = DVector::from_column_slice(x0);
    let mut traj = Trajectory {
        states: vec![x.clone()],
        inputs: Vec::with_capacity(steps),
        outputs: Vec::with_capacity(steps),
        synthetic: Vec::new(),
        diverged_at: None,
    };
    let out_of_bounds = |v: &DVector<f64>| v.iter().any(|s| !s.is_finite() || s.abs() > bound);
    if out_of_bounds(&x) {
        traj.diverged_at = Some(0);
        return Ok(traj);
    }
    for k in 0..steps {
        let u = policy(k, &x);
        if u.len() != m {
            return Err(Error::DimensionMismatch {
                context: "input sample",
                expected: m,
                found: u.len(),
            });
        }
        let next = plant.step(&x, &u);
        let y = plant.output(&x, &u);
        let v = plant.synthetic_input(&x, &u);
        if out_of_bounds(&next) || u.iter().any(|s| !s.is_finite()) {
            traj.diverged_at = Some(k);
            return Ok(traj);
        }
        traj.inputs.push(u);
        traj.outputs.push(y);
        if let Some(v) = v {
            traj.synthetic.push(v);
        }
        traj.states.push(next.clone());
        x = next;
    }
    Ok(traj)
}

/// Open-loop simulation with an input sequence from `x0`. Divergence
/// truncates the trajectory and sets `diverged_at`.
pub fn simulate<P: Plant + ?Sized>(plant: &P, x0: &[f64], u: &TimeSeries) -> Result<Trajectory> {
    if u.dim() != plant.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "input series dimension",
            expected: plant.input_dim(),
            found: u.dim(),
        });
    }
    simulate_feedback(plant, x0, u.len(), f64::INFINITY, |k, _| u.sample_vec(k))
}

/// Transformed flat state `xi_k = y_[k, k+n-1]` from a scalar output series.
pub fn flat_state_from_outputs(y: &TimeSeries, n: usize) -> Result<TimeSeries> {
    if y.dim() != 1 {
        return Err(Error::DimensionMismatch {
            context: "flat output dimension",
            expected: 1,
            found: y.dim(),
        });
    }
    if n == 0 || y.len() < n {
        return Err(Error::HorizonTooShort {
            context: "flat state reconstruction",
            required: n.max(1),
            found: y.len(),
        });
    }
    let samples: Vec<Vec<f64>> = (0..=y.len() - n)
        .map(|k| y.window(k, k + n - 1).iter().copied().collect())
        .collect();
    TimeSeries::from_samples(&samples)
}

/// Synthetic input recovered from measured flat states via the shift
/// structure: `v_k = xi_{n,k+1}`.
pub fn extract_synthetic_input(traj: &Trajectory) -> Result<TimeSeries> {
    if traj.states.len() < 2 {
        return Err(Error::HorizonTooShort {
            context: "synthetic input extraction (states)",
            required: 2,
            found: traj.states.len(),
        });
    }
    let n = traj.states[0].len();
    let v: Vec<f64> = traj.states[1..].iter().map(|x| x[n - 1]).collect();
    TimeSeries::from_scalars(&v)
}

/// JSON plant definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantSpec {
    /// Dense matrices as lists of rows.
    Lti {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
        d: Vec<Vec<f64>>,
    },
    Hammerstein {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
        d: Vec<Vec<f64>>,
        gamma: InputNonlinearity,
    },
    Flat {
        n: usize,
        a_terms: Vec<FlatTerm>,
        #[serde(default = "one")]
        b_const: f64,
    },
    /// The built-in second-order example flat system.
    ExampleFlat,
}

fn one() -> f64 {
    1.0
}

fn matrix_from_rows(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParameter(format!("matrix {name} has ragged rows")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// A plant of any supported class.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPlant {
    Lti(LtiPlant),
    Hammerstein(HammersteinPlant),
    Flat(FlatPlant),
}

impl PlantSpec {
    pub fn build(&self) -> Result<AnyPlant> {
        let lti = |a: &[Vec<f64>], b: &[Vec<f64>], c: &[Vec<f64>], d: &[Vec<f64>]| {
            LtiPlant::new(
                matrix_from_rows(a, "A")?,
                matrix_from_rows(b, "B")?,
                matrix_from_rows(c, "C")?,
                matrix_from_rows(d, "D")?,
            )
        };
        Ok(match self {
            PlantSpec::Lti { a, b, c, d } => AnyPlant::Lti(lti(a, b, c, d)?),
            PlantSpec::Hammerstein { a, b, c, d, gamma } => {
                AnyPlant::Hammerstein(HammersteinPlant::new(lti(a, b, c, d)?, gamma.clone())?)
            }
            PlantSpec::Flat { n, a_terms, b_const } => {
                AnyPlant::Flat(FlatPlant::new(*n, a_terms.clone(), *b_const)?)
            }
            PlantSpec::ExampleFlat => AnyPlant::Flat(FlatPlant::example()),
        })
    }
}

impl AnyPlant {
    fn inner(&self) -> &dyn Plant {
        match self {
            AnyPlant::Lti(p) => p,
            AnyPlant::Hammerstein(p) => p,
            AnyPlant::Flat(p) => p,
        }
    }
}

impl Plant for AnyPlant {
    fn state_dim(&self) -> usize {
        self.inner().state_dim()
    }
    fn input_dim(&self) -> usize {
        self.inner().input_dim()
    }
    fn output_dim(&self) -> usize {
        self.inner().output_dim()
    }
    fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        self.inner().step(x, u)
    }
    fn output(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        self.inner().output(x, u)
    }
    fn synthetic_input(&self, x: &DVector<f64>, u: &DVector<f64>) -> Option<f64> {
        self.inner().synthetic_input(x, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn scalar_lti() -> LtiPlant {
        LtiPlant::new(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn scalar_lti_hand_recursion() {
        let u = TimeSeries::from_scalars(&[1.0, 0.0]).unwrap();
        let t = simulate(&scalar_lti(), &[0.0], &u).unwrap();
        let xs: Vec<f64> = t.states.iter().map(|x| x[0]).collect();
        assert_eq!(xs, vec![0.0, 1.0, 0.5]);
        assert!(scalar_lti().is_controllable());
    }

    #[test]
    fn zero_in_zero_out() {
        let u = TimeSeries::zeros(1, 5).unwrap();
        let t = simulate(&FlatPlant::example(), &[0.0, 0.0], &u).unwrap();
        assert!(t.states.iter().all(|x| x.amax() == 0.0));
        assert!(t.synthetic.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn example_system_values() {
        let p = example_flat_system();
        assert_eq!(p.synthetic(&[0.0, 0.0], 0.0), 0.0);
        assert!((p.synthetic(&[FRAC_PI_2, 0.0], 0.0) + 1.0).abs() < 1e-15);
        assert!((p.synthetic(&[1.0, 1.0], 0.0) + 1f64.sin()).abs() < 1e-15);
        let u = TimeSeries::from_scalars(&[0.7, 0.0]).unwrap();
        let t = simulate(&p, &[0.0, 0.0], &u).unwrap();
        assert_eq!(t.synthetic[0], 0.7);
    }

    #[test]
    fn flat_state_reconstruction() {
        let y = TimeSeries::from_scalars(&[1.0, 2.0, 3.0]).unwrap();
        let xi = flat_state_from_outputs(&y, 2).unwrap();
        assert_eq!(xi.to_rows(), vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert!(flat_state_from_outputs(&y, 4).is_err());
    }

    #[test]
    fn extraction_needs_two_states() {
        let t = Trajectory {
            states: vec![DVector::zeros(2)],
            inputs: vec![],
            outputs: vec![],
            synthetic: vec![],
            diverged_at: None,
        };
        assert!(extract_synthetic_input(&t).is_err());
    }

    #[test]
    fn divergence_truncates() {
        let p = LtiPlant::new(
            DMatrix::from_element(1, 1, 1e200),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        let u = TimeSeries::from_scalars(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let t = simulate(&p, &[0.0], &u).unwrap();
        assert_eq!(t.diverged_at, Some(2));
        assert_eq!(t.states.len(), 3);
        assert_eq!(t.inputs.len(), 2);
    }

    #[test]
    fn hammerstein_gamma_must_vanish() {
        let core = scalar_lti();
        let gamma = InputNonlinearity {
            inputs: 1,
            outputs: 1,
            terms: vec![GammaTerm {
                output: 0,
                input: 0,
                coef: 1.0,
                shape: TermShape::Table {
                    xs: vec![-1.0, 1.0],
                    ys: vec![1.0, 2.0],
                },
            }],
        };
        assert!(HammersteinPlant::new(core, gamma).is_err());
    }

    #[test]
    fn dimension_checks() {
        assert!(LtiPlant::new(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 2),
            DMatrix::zeros(1, 1)
        )
        .is_err());
        let u = TimeSeries::zeros(2, 3).unwrap();
        assert!(simulate(&scalar_lti(), &[0.0], &u).is_err());
        assert!(simulate(&scalar_lti(), &[0.0, 0.0], &TimeSeries::zeros(1, 1).unwrap()).is_err());
    }

    #[test]
    fn plant_spec_json() {
        let json = r#"{"kind":"flat","n":2,"a_terms":[{"coef":-1.0,"sin":0},{"coef":1.0,"powers":[1,2]},{"coef":-1.0,"powers":[3,1]}],"b_const":1.0}"#;
        let spec: PlantSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.build().unwrap(), AnyPlant::Flat(FlatPlant::example()));

        let json = r#"{"kind":"hammerstein","a":[[0.5]],"b":[[1.0]],"c":[[1.0]],"d":[[0.0]],
            "gamma":{"inputs":1,"outputs":1,"terms":[{"output":0,"input":0,"coef":1.0,"kind":"power","power":3},
                                                     {"output":0,"input":0,"coef":2.0,"kind":"sin"}]}}"#;
        let spec: PlantSpec = serde_json::from_str(json).unwrap();
        let p = spec.build().unwrap();
        let next = p.step(&DVector::zeros(1), &DVector::from_element(1, 0.5));
        assert!((next[0] - (0.125 + 2.0 * 0.5f64.sin())).abs() < 1e-15);

        let spec: PlantSpec = serde_json::from_str(r#"{"kind":"example_flat"}"#).unwrap();
        assert!(matches!(spec.build().unwrap(), AnyPlant::Flat(_)));
    }

    #[test]
    fn table_interpolation() {
        let xs = [-1.0, 0.0, 2.0];
        let ys = [-2.0, 0.0, 1.0];
        assert_eq!(interpolate(&xs, &ys, 1.0), 0.5);
        assert_eq!(interpolate(&xs, &ys, -2.0), -4.0);
        assert_eq!(interpolate(&xs, &ys, 4.0), 2.0);
    }
}
