//! Input designers with a priori excitation guarantees.
//!
//! | designer | guarantee | minimum horizon |
//! |---|---|---|
//! | [`impulse_train`] | `rank H_L(u) = mL`, every singular value `alpha` | `N >= (m+1)L - 1` |
//! | [`hammerstein_train`] | `rank H_L(Psi(u)) = rL` when `Lambda` is invertible | `N >= (r+1)L - 1` |
//! | [`reachable_multi_experiment`] | `rank H_L(theta) = rL` when `W` is invertible | `N_j >= 2L + mu - 1` |
//! | [`flat_design`] | `rank H_L(theta) = t(n+1)L` for monomial bases | `N_j >= 2L + n - 1` |

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{build_lambda, build_w, check_invertible, Arity, BasisSet, StructuredMatrix, WRecord};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, numerical_rank, singular_values, DEFAULT_RANK_TOL};
use crate::plant::{simulate, Plant};
use crate::series::TimeSeries;

/// Default cap on `cond(Lambda)` accepted by the feasibility solver.
pub const DEFAULT_COND_CAP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Designer {
    ImpulseTrain,
    Hammerstein,
    Reachable,
    Flat,
    RandomEta,
}

impl Designer {
    pub fn is_multi_experiment(self) -> bool {
        matches!(self, Designer::Reachable | Designer::Flat | Designer::RandomEta)
    }
}

/// One or more designed input sequences plus the metadata needed to state
/// what they guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationPlan {
    pub designer: Designer,
    pub m: usize,
    /// Target excitation order `L`.
    pub order: usize,
    /// Reachability horizon for multi-experiment designs.
    pub mu: Option<usize>,
    pub alpha: Option<f64>,
    /// `lambda_j` (Hammerstein), `delta_j` (flat) or the flattened
    /// `eta^(j)` windows (reachable/random).
    pub amplitudes: Vec<Vec<f64>>,
    pub experiments: Vec<TimeSeries>,
}

impl ExcitationPlan {
    pub fn horizons(&self) -> Vec<usize> {
        self.experiments.iter().map(TimeSeries::len).collect()
    }

    /// Minimum per-experiment horizon this designer needs for `r` basis
    /// components (or `m` channels).
    pub fn minimum_horizon(&self, r: usize) -> usize {
        let l = self.order;
        match self.designer {
            Designer::ImpulseTrain => (self.m + 1) * l - 1,
            Designer::Hammerstein => (r + 1) * l - 1,
            _ => 2 * l + self.mu.unwrap_or(0) - 1,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    designer: Designer,
    m: usize,
    #[serde(rename = "L")]
    order: usize,
    mu: Option<usize>,
    alpha: Option<f64>,
    #[serde(default)]
    amplitudes: Vec<Vec<f64>>,
    experiments: Vec<Vec<Vec<f64>>>,
}

impl Serialize for ExcitationPlan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PlanDoc {
            designer: self.designer,
            m: self.m,
            order: self.order,
            mu: self.mu,
            alpha: self.alpha,
            amplitudes: self.amplitudes.clone(),
            experiments: self.experiments.iter().map(TimeSeries::to_rows).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExcitationPlan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = PlanDoc::deserialize(d)?;
        let experiments = doc
            .experiments
            .iter()
            .map(|rows| TimeSeries::from_samples(rows))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        if experiments.iter().any(|e| e.dim() != doc.m) {
            return Err(D::Error::custom("experiment sample dimension differs from m"));
        }
        Ok(Self {
            designer: doc.designer,
            m: doc.m,
            order: doc.order,
            mu: doc.mu,
            alpha: doc.alpha,
            amplitudes: doc.amplitudes,
            experiments,
        })
    }
}

fn require_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidParameter(format!("{name} must be >= 1")))
    } else {
        Ok(())
    }
}

/// Pulse of amplitude `alpha` on channel `j` at `k = jL - 1`, zero elsewhere.
pub fn impulse_train(m: usize, order: usize, horizon: usize, alpha: f64) -> Result<ExcitationPlan> {
    require_positive("m", m)?;
    require_positive("L", order)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let required = (m + 1) * order - 1;
    if horizon < required {
        return Err(Error::HorizonTooShort {
            context: "impulse train, N >= (m+1)L-1",
            required,
            found: horizon,
        });
    }
    let mut u = DMatrix::zeros(m, horizon);
    for j in 1..=m {
        u[(j - 1, j * order - 1)] = alpha;
    }
    Ok(ExcitationPlan {
        designer: Designer::ImpulseTrain,
        m,
        order,
        mu: None,
        alpha: Some(alpha),
        amplitudes: Vec::new(),
        experiments: vec![TimeSeries::from_matrix(u)?],
    })
}

/// Input `u_k = lambda_j` at `k = jL - 1`, zero elsewhere, for an
/// input-only basis whose `Lambda` matrix is invertible.
pub fn hammerstein_train<A: AsRef<[f64]>>(
    basis: &BasisSet,
    amplitudes: &[A],
    order: usize,
    horizon: usize,
) -> Result<ExcitationPlan> {
    require_positive("L", order)?;
    let m = match basis.arity() {
        Arity::Input { m } => m,
        Arity::StateInput { .. } => {
            return Err(Error::InvalidParameter(
                "Hammerstein design needs an input-only basis".into(),
            ))
        }
    };
    let r = basis.len();
    let required = (r + 1) * order - 1;
    if horizon < required {
        return Err(Error::HorizonTooShort {
            context: "Hammerstein train, N >= (r+1)L-1",
            required,
            found: horizon,
        });
    }
    let lambda = build_lambda(basis, amplitudes)?;
    let inv = check_invertible(&lambda, DEFAULT_RANK_TOL);
    if !inv.invertible {
        return Err(Error::Singular {
            kind: "Lambda".into(),
            rank: inv.rank,
            dim: r,
            condition: inv.condition,
        });
    }
    let mut u = DMatrix::zeros(m, horizon);
    for (j, lam) in amplitudes.iter().enumerate() {
        u.column_mut((j + 1) * order - 1)
            .copy_from_slice(lam.as_ref());
    }
    Ok(ExcitationPlan {
        designer: Designer::Hammerstein,
        m,
        order,
        mu: None,
        alpha: None,
        amplitudes: amplitudes.iter().map(|a| a.as_ref().to_vec()).collect(),
        experiments: vec![TimeSeries::from_matrix(u)?],
    })
}

/// Amplitudes found by [`solve_lambda_feasibility`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSolution {
    pub amplitudes: Vec<Vec<f64>>,
    pub sigma_min: f64,
    pub condition: f64,
    pub samples: usize,
}

fn sigma_min_of(m: &DMatrix<f64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Randomized search for amplitudes making `Lambda` invertible with
/// `cond(Lambda) <= cond_cap`.
///
/// Starts from a uniform draw in `bounds` (per input coordinate), then
/// cycles over the columns proposing a fresh uniform sample for one column at
/// a time and keeping it whenever `sigma_min(Lambda)` grows. `max_iters`
/// counts every sampled amplitude vector, the initial `r` included.
pub fn solve_lambda_feasibility<R: Rng + ?Sized>(
    basis: &BasisSet,
    bounds: (f64, f64),
    max_iters: usize,
    cond_cap: f64,
    rng: &mut R,
) -> Result<LambdaSolution> {
    let m = match basis.arity() {
        Arity::Input { m } => m,
        Arity::StateInput { .. } => {
            return Err(Error::InvalidParameter(
                "Lambda feasibility needs an input-only basis".into(),
            ))
        }
    };
    let (lo, hi) = bounds;
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid sampler bounds [{lo}, {hi}]")));
    }
    let r = basis.len();
    let draw = |rng: &mut R| -> Vec<f64> { (0..m).map(|_| rng.gen_range(lo..hi)).collect() };

    let mut current: Vec<Vec<f64>> = (0..r).map(|_| draw(rng)).collect();
    let mut matrix = build_lambda(basis, &current)?.matrix;
    let mut score = sigma_min_of(&matrix);
    let mut samples = r;
    loop {
        let rank = numerical_rank(&matrix, DEFAULT_RANK_TOL);
        let cond = condition_number(&matrix);
        if rank == r && cond <= cond_cap {
            return Ok(LambdaSolution {
                amplitudes: current,
                sigma_min: score,
                condition: cond,
                samples,
            });
        }
        if samples >= max_iters {
            return Err(Error::Infeasible {
                iterations: samples,
                best_rank: rank,
                dim: r,
                best_condition: cond,
            });
        }
        let j = samples % r;
        let candidate = draw(rng);
        let col = basis.eval_stack(None, &candidate)?;
        let mut trial = matrix.clone();
        trial.set_column(j, &col);
        let trial_score = sigma_min_of(&trial);
        samples += 1;
        if trial_score > score {
            matrix = trial;
            score = trial_score;
            current[j] = candidate;
        }
    }
}

/// Experiment `j` is zero except samples `L-1 ..= L+mu-1`, which carry
/// `eta^(j)` (`mu + 1` samples of dimension `m`).
pub fn reachable_multi_experiment(
    eta_sequences: &[TimeSeries],
    order: usize,
    mu: usize,
    horizons: &[usize],
) -> Result<ExcitationPlan> {
    require_positive("L", order)?;
    require_positive("mu", mu)?;
    let first = eta_sequences
        .first()
        .ok_or_else(|| Error::InvalidParameter("at least one eta sequence is required".into()))?;
    let m = first.dim();
    if horizons.len() != eta_sequences.len() {
        return Err(Error::DimensionMismatch {
            context: "horizon count vs eta sequences",
            expected: eta_sequences.len(),
            found: horizons.len(),
        });
    }
    let required = 2 * order + mu - 1;
    let mut experiments = Vec::with_capacity(eta_sequences.len());
    for (eta, &nj) in eta_sequences.iter().zip(horizons) {
        if eta.dim() != m {
            return Err(Error::DimensionMismatch {
                context: "eta sample dimension",
                expected: m,
                found: eta.dim(),
            });
        }
        if eta.len() != mu + 1 {
            return Err(Error::DimensionMismatch {
                context: "eta sequence length (mu + 1)",
                expected: mu + 1,
                found: eta.len(),
            });
        }
        if nj < required {
            return Err(Error::HorizonTooShort {
                context: "multi-experiment design, N_j >= 2L+mu-1",
                required,
                found: nj,
            });
        }
        let mut u = DMatrix::zeros(m, nj);
        u.columns_mut(order - 1, mu + 1).copy_from(eta.as_matrix());
        experiments.push(TimeSeries::from_matrix(u)?);
    }
    Ok(ExcitationPlan {
        designer: Designer::Reachable,
        m,
        order,
        mu: Some(mu),
        alpha: None,
        amplitudes: eta_sequences.iter().map(|e| e.stacked().as_slice().to_vec()).collect(),
        experiments,
    })
}

fn check_deltas(deltas: &[f64], expected: usize) -> Result<()> {
    if deltas.len() != expected {
        return Err(Error::DimensionMismatch {
            context: "number of delta values",
            expected,
            found: deltas.len(),
        });
    }
    for (i, &d) in deltas.iter().enumerate() {
        if d == 0.0 || !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta_{} = {d} must be finite and nonzero",
                i + 1
            )));
        }
        if let Some(j) = deltas[..i].iter().position(|&e| e == d) {
            return Err(Error::InvalidParameter(format!(
                "delta_{} and delta_{} are both {d}; values must be mutually distinct",
                j + 1,
                i + 1
            )));
        }
    }
    Ok(())
}

/// Scalar pulse windows `eta^(j)` of length `n + 1` for a flat system of
/// order `n` with `t` state bands and `t` input pulses.
///
/// In band `b` (experiments `(b-1)n+1 ..= bn`, 1-based) the pulse of
/// experiment `j` sits at window position `bn - j`; the last `t`
/// experiments pulse at position `n`.
pub fn flat_eta_sequences(n: usize, t: usize, deltas: &[f64]) -> Result<Vec<TimeSeries>> {
    flat_eta_sequences_split(n, t, t, deltas)
}

/// Generalization of [`flat_eta_sequences`] with independent numbers of
/// state bands and input pulses, for bases with state monomials up to power
/// `state_bands` and input monomials up to power `input_pulses`.
pub fn flat_eta_sequences_split(
    n: usize,
    state_bands: usize,
    input_pulses: usize,
    deltas: &[f64],
) -> Result<Vec<TimeSeries>> {
    require_positive("n", n)?;
    if state_bands + input_pulses == 0 {
        return Err(Error::InvalidParameter("at least one band or pulse required".into()));
    }
    check_deltas(deltas, state_bands * n + input_pulses)?;
    let mut out = Vec::with_capacity(deltas.len());
    for (idx, &d) in deltas.iter().enumerate() {
        let j = idx + 1;
        let pos = if j <= state_bands * n {
            let band = j.div_ceil(n);
            band * n - j
        } else {
            n
        };
        let mut w = vec![0.0; n + 1];
        w[pos] = d;
        out.push(TimeSeries::from_scalars(&w)?);
    }
    Ok(out)
}

/// Multi-experiment flat design for the monomial basis of power `t`: builds
/// the pulse windows and embeds them with `mu = n`. `horizon` applies to
/// every experiment.
pub fn flat_design(n: usize, t: usize, deltas: &[f64], order: usize, horizon: usize) -> Result<ExcitationPlan> {
    flat_design_split(n, t, t, deltas, order, horizon)
}

pub fn flat_design_split(
    n: usize,
    state_bands: usize,
    input_pulses: usize,
    deltas: &[f64],
    order: usize,
    horizon: usize,
) -> Result<ExcitationPlan> {
    let etas = flat_eta_sequences_split(n, state_bands, input_pulses, deltas)?;
    let horizons = vec![horizon; etas.len()];
    let mut plan = reachable_multi_experiment(&etas, order, n, &horizons)?;
    plan.designer = Designer::Flat;
    plan.amplitudes = deltas.iter().map(|&d| vec![d]).collect();
    Ok(plan)
}

/// Simulates every experiment of the plan from the origin and evaluates the
/// basis along it, one lifted series per experiment. Input-only bases ignore
/// the state.
pub fn lift_experiments<P: Plant + ?Sized>(
    plant: &P,
    basis: &BasisSet,
    plan: &ExcitationPlan,
) -> Result<Vec<TimeSeries>> {
    plan.experiments
        .iter()
        .map(|u| lift_series(plant, basis, u))
        .collect()
}

fn lift_series<P: Plant + ?Sized>(plant: &P, basis: &BasisSet, u: &TimeSeries) -> Result<TimeSeries> {
    let x0 = vec![0.0; plant.state_dim()];
    let traj = simulate(plant, &x0, u)?;
    if traj.diverged() {
        return Err(Error::InvalidParameter(format!(
            "simulation diverged at step {}",
            traj.diverged_at.unwrap_or(0)
        )));
    }
    let mut out = DMatrix::zeros(basis.len(), u.len());
    for k in 0..u.len() {
        let x = match basis.arity() {
            Arity::Input { .. } => None,
            Arity::StateInput { .. } => Some(traj.states[k].as_slice()),
        };
        out.set_column(k, &basis.eval_stack(x, traj.inputs[k].as_slice())?);
    }
    TimeSeries::from_matrix(out)
}

/// Evaluates an input-only basis on a recorded input series.
pub fn lift_inputs(basis: &BasisSet, u: &TimeSeries) -> Result<TimeSeries> {
    let mut out = DMatrix::zeros(basis.len(), u.len());
    for k in 0..u.len() {
        out.set_column(k, &basis.eval_stack(None, u.sample(k).as_slice())?);
    }
    TimeSeries::from_matrix(out)
}

/// `W` for a multi-experiment plan: column `j` is the basis at sample
/// `L + mu - 1` of experiment `j`, simulated from the origin.
pub fn w_from_plan<P: Plant + ?Sized>(
    plant: &P,
    basis: &BasisSet,
    plan: &ExcitationPlan,
) -> Result<StructuredMatrix> {
    let mu = plan
        .mu
        .ok_or_else(|| Error::InvalidParameter("W needs a multi-experiment plan with mu".into()))?;
    let idx = plan.order + mu - 1;
    let x0 = vec![0.0; plant.state_dim()];
    let mut records = Vec::with_capacity(plan.experiments.len());
    for u in &plan.experiments {
        let traj = simulate(plant, &x0, u)?;
        if traj.len() <= idx {
            return Err(Error::InvalidParameter(format!(
                "experiment diverged before sample {idx}"
            )));
        }
        records.push(WRecord {
            state: traj.states[idx].as_slice().to_vec(),
            input: traj.inputs[idx].as_slice().to_vec(),
        });
    }
    build_w(basis, &records)
}

/// Samples `eta^(j)` uniformly in `bounds` until the resulting `W` is
/// invertible. Each experiment has the minimum horizon `2L + mu - 1`.
#[allow(clippy::too_many_arguments)]
pub fn random_eta_heuristic<P: Plant + ?Sized, R: Rng + ?Sized>(
    r: usize,
    mu: usize,
    bounds: (f64, f64),
    plant: &P,
    basis: &BasisSet,
    order: usize,
    attempts: usize,
    rng: &mut R,
) -> Result<(ExcitationPlan, StructuredMatrix)> {
    if basis.len() != r {
        return Err(Error::DimensionMismatch {
            context: "basis size vs number of experiments r",
            expected: r,
            found: basis.len(),
        });
    }
    let (lo, hi) = bounds;
    if lo > hi {
        return Err(Error::InvalidParameter(format!("invalid bounds [{lo}, {hi}]")));
    }
    let m = plant.input_dim();
    let horizon = 2 * order + mu - 1;
    let mut best_cond = f64::INFINITY;
    let mut best_rank = 0;
    for _ in 0..attempts {
        let etas = (0..r)
            .map(|_| {
                let data = DMatrix::from_fn(m, mu + 1, |_, _| {
                    if lo == hi {
                        lo
                    } else {
                        rng.gen_range(lo..hi)
                    }
                });
                TimeSeries::from_matrix(data)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut plan = reachable_multi_experiment(&etas, order, mu, &vec![horizon; r])?;
        plan.designer = Designer::RandomEta;
        let w = match w_from_plan(plant, basis, &plan) {
            Ok(w) => w,
            Err(_) => continue,
        };
        let inv = check_invertible(&w, DEFAULT_RANK_TOL);
        if inv.invertible {
            return Ok((plan, w));
        }
        if inv.rank > best_rank || (inv.rank == best_rank && inv.condition < best_cond) {
            best_rank = inv.rank;
            best_cond = inv.condition;
        }
    }
    Err(Error::Infeasible {
        iterations: attempts,
        best_rank,
        dim: r,
        best_condition: best_cond,
    })
}

/// Support (indices of nonzero samples) of a series.
pub fn support(u: &TimeSeries) -> Vec<usize> {
    (0..u.len())
        .filter(|&k| u.sample(k).iter().any(|&v| v != 0.0))
        .collect()
}

/// The unit impulse train `u~` with `r` channels used to factor Hammerstein
/// Hankel matrices as `(I_L (x) Lambda) H_L(u~)`.
pub fn unit_train(r: usize, order: usize, horizon: usize) -> Result<TimeSeries> {
    Ok(impulse_train(r, order, horizon, 1.0)?.experiments.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pe::{build_hankel, build_mosaic_hankel, pe_check};
    use crate::plant::FlatPlant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn smallest_impulse_train() {
        let p = impulse_train(1, 1, 1, 1.0).unwrap();
        assert_eq!(p.experiments[0].to_rows(), vec![vec![1.0]]);
    }

    #[test]
    fn scalar_train_order_two() {
        let p = impulse_train(1, 2, 3, 1.0).unwrap();
        assert_eq!(p.experiments[0].component(0), vec![0.0, 1.0, 0.0]);
        let r = pe_check(&build_hankel(&p.experiments[0], 2).unwrap(), DEFAULT_RANK_TOL);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn two_channel_train() {
        let p = impulse_train(2, 2, 5, 1.0).unwrap();
        assert_eq!(
            p.experiments[0].to_rows(),
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 0.0]
            ]
        );
        let h = build_hankel(&p.experiments[0], 2).unwrap();
        let sv = singular_values(h.matrix());
        assert_eq!(sv.len(), 4);
        assert!(sv.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn minimum_horizon_boundary() {
        assert!(matches!(
            impulse_train(2, 3, 7, 1.0),
            Err(Error::HorizonTooShort { required: 8, found: 7, .. })
        ));
        assert!(impulse_train(2, 3, 8, 1.0).is_ok());
        assert!(impulse_train(1, 1, 1, 0.0).is_err());
    }

    #[test]
    fn hammerstein_examples() {
        let b = BasisSet::monomial(0, 1, 2).unwrap();
        let p = hammerstein_train(&b, &[[1.0], [2.0]], 1, 2).unwrap();
        assert_eq!(p.experiments[0].component(0), vec![1.0, 2.0]);
        let lifted = lift_inputs(&b, &p.experiments[0]).unwrap();
        let h = build_hankel(&lifted, 1).unwrap();
        assert_eq!(h.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 4.0]));
        assert_eq!(pe_check(&h, DEFAULT_RANK_TOL).rank, 2);

        assert!(matches!(
            hammerstein_train(&b, &[[1.0], [1.0]], 1, 2),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            hammerstein_train(&b, &[[1.0], [2.0]], 2, 4),
            Err(Error::HorizonTooShort { required: 5, .. })
        ));
    }

    #[test]
    fn hammerstein_with_identity_basis_is_impulse_train() {
        let b = BasisSet::monomial(0, 1, 1).unwrap();
        for order in 1..=4 {
            let n = 2 * order - 1;
            let h = hammerstein_train(&b, &[[2.5]], order, n).unwrap();
            let i = impulse_train(1, order, n, 2.5).unwrap();
            assert_eq!(h.experiments, i.experiments);
        }
    }

    #[test]
    fn lambda_solver_on_cubic_monomials() {
        let b = BasisSet::monomial(0, 1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sol = solve_lambda_feasibility(&b, (-1.0, 1.0), 1000, DEFAULT_COND_CAP, &mut rng).unwrap();
        let vals: Vec<f64> = sol.amplitudes.iter().map(|a| a[0]).collect();
        assert!(vals.iter().all(|&v| v != 0.0));
        for i in 0..3 {
            for j in 0..i {
                assert_ne!(vals[i], vals[j]);
            }
        }
        let l = build_lambda(&b, &sol.amplitudes).unwrap();
        assert_eq!(numerical_rank(&l.matrix, DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn lambda_solver_rejects_dependent_set() {
        let b = BasisSet::builder(Arity::Input { m: 1 })
            .monomial(crate::basis::Variable::U, 0, 1)
            .custom("2u", |_, u| 2.0 * u[0])
            .build()
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        match solve_lambda_feasibility(&b, (-1.0, 1.0), 200, DEFAULT_COND_CAP, &mut rng) {
            Err(Error::Infeasible { best_rank, dim, .. }) => assert_eq!((best_rank, dim), (1, 2)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn lambda_solver_sin_and_linear() {
        let b = BasisSet::builder(Arity::Input { m: 1 })
            .custom("sin(u)", |_, u| u[0].sin())
            .monomial(crate::basis::Variable::U, 0, 1)
            .build()
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sol = solve_lambda_feasibility(&b, (-1.0, 1.0), 1000, DEFAULT_COND_CAP, &mut rng).unwrap();
        let l = build_lambda(&b, &sol.amplitudes).unwrap();
        assert!(l.matrix.determinant().abs() > 0.0);
    }

    #[test]
    fn reachable_support() {
        let etas: Vec<TimeSeries> = (0..3)
            .map(|j| TimeSeries::from_scalars(&[1.0 + j as f64, 2.0, 3.0]).unwrap())
            .collect();
        let plan = reachable_multi_experiment(&etas, 2, 2, &[7, 7, 7]).unwrap();
        for u in &plan.experiments {
            assert_eq!(support(u), vec![1, 2, 3]);
            assert_eq!(u.len(), 7);
        }
        assert!(reachable_multi_experiment(&etas, 2, 2, &[5, 7, 7]).is_ok());
        assert!(matches!(
            reachable_multi_experiment(&etas, 2, 2, &[4, 7, 7]),
            Err(Error::HorizonTooShort { required: 5, found: 4, .. })
        ));
        assert!(reachable_multi_experiment(&etas, 2, 1, &[7, 7, 7]).is_err());
    }

    #[test]
    fn reachable_with_unit_windows_staggers_pulses() {
        let etas = vec![
            TimeSeries::from_scalars(&[1.0, 0.0]).unwrap(),
            TimeSeries::from_scalars(&[0.0, 1.0]).unwrap(),
        ];
        let plan = reachable_multi_experiment(&etas, 1, 1, &[2, 2]).unwrap();
        assert_eq!(support(&plan.experiments[0]), vec![0]);
        assert_eq!(support(&plan.experiments[1]), vec![1]);
    }

    #[test]
    fn flat_eta_examples() {
        let e = flat_eta_sequences(2, 1, &[1.0, 2.0, 3.0]).unwrap();
        let rows: Vec<Vec<f64>> = e.iter().map(|s| s.component(0)).collect();
        assert_eq!(
            rows,
            vec![vec![0.0, 1.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 0.0, 3.0]]
        );
        let e = flat_eta_sequences(1, 1, &[4.0, 5.0]).unwrap();
        assert_eq!(e[0].component(0), vec![4.0, 0.0]);
        assert_eq!(e[1].component(0), vec![0.0, 5.0]);
        assert!(flat_eta_sequences(2, 1, &[1.0, 0.0, 3.0]).is_err());
        assert!(flat_eta_sequences(2, 1, &[1.0, 2.0, 1.0]).is_err());
        assert!(flat_eta_sequences(2, 1, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn flat_eta_two_bands() {
        // n = 2, t = 2: band 1 positions (1, 0), band 2 positions (1, 0),
        // then two input pulses at position 2.
        let e = flat_eta_sequences(2, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let pos: Vec<usize> = e.iter().map(|s| support(s)[0]).collect();
        assert_eq!(pos, vec![1, 0, 1, 0, 2, 2]);
    }

    #[test]
    fn random_heuristic_examples() {
        let plant = FlatPlant::example();
        let basis = BasisSet::monomial(2, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (plan, w) =
            random_eta_heuristic(3, 2, (-1.0, 1.0), &plant, &basis, 1, 20, &mut rng).unwrap();
        assert_eq!(plan.experiments.len(), 3);
        assert!(check_invertible(&w, DEFAULT_RANK_TOL).invertible);

        let err = random_eta_heuristic(3, 2, (0.0, 0.0), &plant, &basis, 1, 5, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Infeasible { best_rank: 0, .. }));

        let chain = FlatPlant::chain(1);
        let single = BasisSet::builder(Arity::StateInput { n: 1, m: 1 })
            .monomial(crate::basis::Variable::U, 0, 1)
            .build()
            .unwrap();
        let (_, w) = random_eta_heuristic(1, 1, (0.5, 1.0), &chain, &single, 1, 1, &mut rng).unwrap();
        assert!(w.matrix[(0, 0)] != 0.0);
    }

    #[test]
    fn flat_design_is_collectively_pe() {
        let plant = FlatPlant::example();
        let basis = BasisSet::monomial(2, 1, 1).unwrap();
        let plan = flat_design(2, 1, &[0.3, -0.6, 0.9], 1, 3).unwrap();
        let lifted = lift_experiments(&plant, &basis, &plan).unwrap();
        let r = pe_check(&build_mosaic_hankel(&lifted, 1).unwrap(), DEFAULT_RANK_TOL);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn chain_shift_ties_hankel_rows_at_depth_two() {
        // xi_{1,k+1} = xi_{2,k} on every trajectory: row x1 of block 1 equals
        // row x2 of block 0, so depth-2 rank stays below 2r
        let plant = FlatPlant::example();
        let basis = BasisSet::monomial(2, 1, 1).unwrap();
        let plan = flat_design(2, 1, &[0.3, -0.6, 0.9], 2, 5).unwrap();
        let lifted = lift_experiments(&plant, &basis, &plan).unwrap();
        let view = build_mosaic_hankel(&lifted, 2).unwrap();
        let h = view.matrix();
        assert_eq!(h.row(4), h.row(2));
        assert!(pe_check(&view, DEFAULT_RANK_TOL).rank < 6);
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = flat_design(2, 1, &[1.0, 2.0, 3.0], 1, 3).unwrap();
        let json = serde_json::to_value(&plan).unwrap();
        assert_eq!(json["designer"], "flat");
        assert_eq!(json["L"], 1);
        assert_eq!(json["mu"], 2);
        assert_eq!(json["experiments"][0], serde_json::json!([[0.0], [1.0], [0.0]]));
        let back: ExcitationPlan = serde_json::from_value(json).unwrap();
        assert_eq!(back, plan);
    }
}
