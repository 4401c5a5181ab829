//! Basis-function sets and the square matrices whose invertibility certifies
//! excitation of lifted data.
//!
//! A [`BasisSet`] is an ordered list of scalar functions of the input alone,
//! or of a state/input pair. Every component vanishes at the origin; custom
//! components that do not are shifted by their value there and the shift is
//! kept in the descriptor.
//!
//! Three structured matrices are built from basis evaluations:
//!
//! * `Lambda` (r x r): column `j` is `Psi(lambda_j)` for designed amplitudes;
//! * `W` (r x r): column `j` is `Theta` at the `(L+mu-1)`-th sample of
//!   experiment `j`;
//! * `Omega` (t x t): entry `(i, j)` is `v_j^i`, a scaled Vandermonde matrix.
//!
//! Linear independence of user closures on sets with non-empty interior
//! cannot be verified here and remains the caller's responsibility.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, numerical_rank};

/// Domain of the basis functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "arity", rename_all = "snake_case")]
pub enum Arity {
    /// Functions of `u in R^m`.
    Input { m: usize },
    /// Functions of `(x, u) in R^n x R^m`.
    StateInput { n: usize, m: usize },
}

impl Arity {
    pub fn state_dim(&self) -> usize {
        match *self {
            Arity::Input { .. } => 0,
            Arity::StateInput { n, .. } => n,
        }
    }

    pub fn input_dim(&self) -> usize {
        match *self {
            Arity::Input { m } | Arity::StateInput { m, .. } => m,
        }
    }
}

/// Which argument a monomial reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// Input component.
    U,
    /// State component (transformed state for flat systems).
    X,
}

/// Serializable description of one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    Monomial {
        var: Variable,
        index: usize,
        power: u32,
    },
    Custom {
        name: String,
        /// Constant subtracted so that the component vanishes at the origin.
        shift: f64,
    },
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Monomial { var, index, power } => {
                let v = match var {
                    Variable::U => "u",
                    Variable::X => "x",
                };
                if *power == 1 {
                    write!(f, "{v}{}", index + 1)
                } else {
                    write!(f, "{v}{}^{power}", index + 1)
                }
            }
            Descriptor::Custom { name, shift } if *shift != 0.0 => {
                write!(f, "{name} - ({shift})")
            }
            Descriptor::Custom { name, .. } => f.write_str(name),
        }
    }
}

type ComponentFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
struct Component {
    descriptor: Descriptor,
    func: Option<ComponentFn>,
    shift: f64,
}

impl Component {
    fn eval(&self, x: &[f64], u: &[f64]) -> f64 {
        match (&self.descriptor, &self.func) {
            (Descriptor::Monomial { var, index, power }, _) => {
                let s = match var {
                    Variable::U => u[*index],
                    Variable::X => x[*index],
                };
                s.powi(*power as i32)
            }
            (Descriptor::Custom { .. }, Some(f)) => f(x, u) - self.shift,
            (Descriptor::Custom { .. }, None) => unreachable!("custom component without closure"),
        }
    }
}

/// Ordered collection of `r` scalar basis functions sharing one arity.
#[derive(Clone)]
pub struct BasisSet {
    arity: Arity,
    components: Vec<Component>,
}

impl fmt::Debug for BasisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisSet")
            .field("arity", &self.arity)
            .field("components", &self.labels())
            .finish()
    }
}

impl BasisSet {
    pub fn builder(arity: Arity) -> BasisBuilder {
        BasisBuilder {
            arity,
            components: Vec::new(),
        }
    }

    /// Monomials in the input and (element-wise) in the state up to power
    /// `t`, ordered input powers first:
    /// `(u, u^2, ..., u^t, x, x^2, ..., x^t)`.
    ///
    /// With `n = 0` the set is input-only. For scalar input the size is
    /// `t (n + 1)`.
    pub fn monomial(n: usize, m: usize, t: u32) -> Result<Self> {
        if t < 1 {
            return Err(Error::InvalidParameter("monomial power t must be >= 1".into()));
        }
        if m < 1 {
            return Err(Error::InvalidParameter("input dimension m must be >= 1".into()));
        }
        let arity = if n == 0 {
            Arity::Input { m }
        } else {
            Arity::StateInput { n, m }
        };
        let mut b = Self::builder(arity);
        for p in 1..=t {
            for i in 0..m {
                b = b.monomial(Variable::U, i, p);
            }
        }
        for p in 1..=t {
            for i in 0..n {
                b = b.monomial(Variable::X, i, p);
            }
        }
        b.build()
    }

    /// Input-affine monomials `(u, x, x^2, ..., x^t)` for scalar input; with
    /// `t = 3` this is the usual controller-design basis of size `1 + 3n`.
    pub fn input_affine(n: usize, t: u32) -> Result<Self> {
        if t < 1 || n < 1 {
            return Err(Error::InvalidParameter(
                "input-affine basis needs n >= 1 and t >= 1".into(),
            ));
        }
        let mut b = Self::builder(Arity::StateInput { n, m: 1 }).monomial(Variable::U, 0, 1);
        for p in 1..=t {
            for i in 0..n {
                b = b.monomial(Variable::X, i, p);
            }
        }
        b.build()
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    /// Number of components `r`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn descriptors(&self) -> Vec<Descriptor> {
        self.components.iter().map(|c| c.descriptor.clone()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.components
            .iter()
            .map(|c| c.descriptor.to_string())
            .collect()
    }

    /// Stacked evaluation `[theta_1(x, u) ... theta_r(x, u)]^T`. Pass `None`
    /// for `x` on input-only sets.
    pub fn eval_stack(&self, x: Option<&[f64]>, u: &[f64]) -> Result<DVector<f64>> {
        let x = self.check_args(x, u)?;
        Ok(DVector::from_iterator(
            self.len(),
            self.components.iter().map(|c| c.eval(x, u)),
        ))
    }

    fn check_args<'a>(&self, x: Option<&'a [f64]>, u: &[f64]) -> Result<&'a [f64]> {
        let m = self.arity.input_dim();
        if u.len() != m {
            return Err(Error::DimensionMismatch {
                context: "basis input argument",
                expected: m,
                found: u.len(),
            });
        }
        match (self.arity, x) {
            (Arity::Input { .. }, None) => Ok(&[]),
            (Arity::Input { .. }, Some([])) => Ok(&[]),
            (Arity::Input { .. }, Some(x)) => Err(Error::DimensionMismatch {
                context: "basis state argument (input-only set)",
                expected: 0,
                found: x.len(),
            }),
            (Arity::StateInput { n, .. }, Some(x)) if x.len() == n => Ok(x),
            (Arity::StateInput { n, .. }, x) => Err(Error::DimensionMismatch {
                context: "basis state argument",
                expected: n,
                found: x.map_or(0, <[f64]>::len),
            }),
        }
    }

    /// Whether component `i` is exactly the first input coordinate.
    pub fn is_linear_input(&self, i: usize) -> bool {
        matches!(
            self.components[i].descriptor,
            Descriptor::Monomial {
                var: Variable::U,
                index: 0,
                power: 1
            }
        )
    }

    /// Whether component `i` depends on the input. Monomials answer from
    /// their descriptor; custom closures are probed at a fixed set of points.
    pub fn depends_on_input(&self, i: usize) -> bool {
        let c = &self.components[i];
        match c.descriptor {
            Descriptor::Monomial { var, .. } => var == Variable::U,
            Descriptor::Custom { .. } => {
                let n = self.arity.state_dim();
                let m = self.arity.input_dim();
                const PROBES: [f64; 4] = [0.0, 0.37, -0.81, 1.3];
                PROBES.iter().any(|&px| {
                    let x: Vec<f64> = (0..n).map(|k| px * (1.0 + 0.1 * k as f64)).collect();
                    let u0 = vec![0.0; m];
                    let base = c.eval(&x, &u0);
                    PROBES[1..].iter().any(|&pu| {
                        let u = vec![pu; m];
                        (c.eval(&x, &u) - base).abs() > 1e-12 * (1.0 + base.abs())
                    })
                })
            }
        }
    }
}

pub struct BasisBuilder {
    arity: Arity,
    components: Vec<Component>,
}

impl BasisBuilder {
    pub fn monomial(mut self, var: Variable, index: usize, power: u32) -> Self {
        self.components.push(Component {
            descriptor: Descriptor::Monomial { var, index, power },
            func: None,
            shift: 0.0,
        });
        self
    }

    /// Adds a closure `f(x, u)`; input-only sets receive an empty `x`.
    pub fn custom<F>(mut self, name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.components.push(Component {
            descriptor: Descriptor::Custom {
                name: name.into(),
                shift: 0.0,
            },
            func: Some(Arc::new(f)),
            shift: 0.0,
        });
        self
    }

    pub fn build(mut self) -> Result<BasisSet> {
        if self.components.is_empty() {
            return Err(Error::InvalidParameter("basis set must have r >= 1 components".into()));
        }
        let n = self.arity.state_dim();
        let m = self.arity.input_dim();
        if m == 0 {
            return Err(Error::InvalidParameter("input dimension m must be >= 1".into()));
        }
        for c in &mut self.components {
            match &mut c.descriptor {
                Descriptor::Monomial { var, index, power } => {
                    let dim = match var {
                        Variable::U => m,
                        Variable::X => n,
                    };
                    if *index >= dim {
                        return Err(Error::InvalidParameter(format!(
                            "monomial index {index} out of range for dimension {dim}"
                        )));
                    }
                    if *power == 0 {
                        return Err(Error::InvalidParameter("monomial power must be >= 1".into()));
                    }
                }
                Descriptor::Custom { shift, .. } => {
                    let f = c.func.as_ref().expect("custom closure");
                    let at_origin = f(&vec![0.0; n], &vec![0.0; m]);
                    if !at_origin.is_finite() {
                        return Err(Error::InvalidParameter(
                            "custom basis function is not finite at the origin".into(),
                        ));
                    }
                    *shift = at_origin;
                    c.shift = at_origin;
                }
            }
        }
        Ok(BasisSet {
            arity: self.arity,
            components: self.components,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Lambda,
    W,
    Omega,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::Lambda => "Lambda",
            MatrixKind::W => "W",
            MatrixKind::Omega => "Omega",
        };
        f.write_str(s)
    }
}

/// A square matrix of basis evaluations with a note per column saying what
/// produced it.
#[derive(Debug, Clone)]
pub struct StructuredMatrix {
    pub kind: MatrixKind,
    pub matrix: DMatrix<f64>,
    pub provenance: Vec<String>,
}

/// `Lambda = [Psi(lambda_1) ... Psi(lambda_r)]` for an input-only basis.
/// Invertibility is not asserted.
pub fn build_lambda<A: AsRef<[f64]>>(basis: &BasisSet, amplitudes: &[A]) -> Result<StructuredMatrix> {
    if !matches!(basis.arity(), Arity::Input { .. }) {
        return Err(Error::InvalidParameter("Lambda requires an input-only basis".into()));
    }
    let r = basis.len();
    if amplitudes.len() != r {
        return Err(Error::DimensionMismatch {
            context: "Lambda amplitude count",
            expected: r,
            found: amplitudes.len(),
        });
    }
    let mut matrix = DMatrix::zeros(r, r);
    let mut provenance = Vec::with_capacity(r);
    for (j, lam) in amplitudes.iter().enumerate() {
        let col = basis.eval_stack(None, lam.as_ref())?;
        matrix.set_column(j, &col);
        provenance.push(format!("lambda_{} = {:?}", j + 1, lam.as_ref()));
    }
    Ok(StructuredMatrix {
        kind: MatrixKind::Lambda,
        matrix,
        provenance,
    })
}

/// `Omega` with entry `(i, j) = v_j^(i+1)` for `i, j in 0..t`, where
/// `t = values.len()`. Invertible exactly when the values are nonzero and
/// pairwise distinct.
pub fn build_omega(values: &[f64]) -> StructuredMatrix {
    let t = values.len();
    let matrix = DMatrix::from_fn(t, t, |i, j| values[j].powi(i as i32 + 1));
    StructuredMatrix {
        kind: MatrixKind::Omega,
        matrix,
        provenance: values.iter().map(|v| format!("v = {v}")).collect(),
    }
}

/// One column source for `W`: the state and input of experiment `j` at
/// sample index `L + mu - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WRecord {
    pub state: Vec<f64>,
    pub input: Vec<f64>,
}

/// `W = [Theta(x^(1), u^(1)) ... Theta(x^(r), u^(r))]`.
pub fn build_w(basis: &BasisSet, records: &[WRecord]) -> Result<StructuredMatrix> {
    let r = basis.len();
    if records.len() != r {
        return Err(Error::DimensionMismatch {
            context: "W record count",
            expected: r,
            found: records.len(),
        });
    }
    let mut matrix = DMatrix::zeros(r, r);
    let mut provenance = Vec::with_capacity(r);
    for (j, rec) in records.iter().enumerate() {
        let x = match basis.arity() {
            Arity::Input { .. } => None,
            Arity::StateInput { .. } => Some(rec.state.as_slice()),
        };
        matrix.set_column(j, &basis.eval_stack(x, &rec.input)?);
        provenance.push(format!("experiment {}", j + 1));
    }
    Ok(StructuredMatrix {
        kind: MatrixKind::W,
        matrix,
        provenance,
    })
}

/// Outcome of a numerical invertibility test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invertibility {
    pub invertible: bool,
    pub rank: usize,
    /// `sigma_max / sigma_min`; infinite for exactly singular matrices.
    pub condition: f64,
}

/// Full numerical rank under the shared rank criterion, plus a condition
/// estimate.
pub fn check_invertible(m: &StructuredMatrix, tol: f64) -> Invertibility {
    check_invertible_matrix(&m.matrix, tol)
}

pub fn check_invertible_matrix(m: &DMatrix<f64>, tol: f64) -> Invertibility {
    assert!(m.is_square(), "invertibility check needs a square matrix");
    let rank = numerical_rank(m, tol);
    Invertibility {
        invertible: rank == m.nrows() && m.nrows() > 0,
        rank,
        condition: condition_number(m),
    }
}
