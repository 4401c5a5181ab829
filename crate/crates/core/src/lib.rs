//! Persistently exciting input design and verification for data-driven
//! control of linear, Hammerstein and flat nonlinear systems.
//!
//! Signals are [`TimeSeries`]; excitation is certified by the rank of their
//! (mosaic) Hankel matrices in [`pe`]. Input designers in [`excite`] build
//! sequences whose rank is guaranteed by invertibility of small structured
//! matrices from [`basis`]. [`behavior`] applies the fundamental lemma to
//! recorded data and [`ddctl`] closes the loop on flat systems.

pub mod basis;
pub mod behavior;
pub mod ddctl;
pub mod error;
pub mod excite;
pub mod io;
pub mod linalg;
pub mod pe;
pub mod plant;
pub mod series;

pub use basis::{
    build_lambda, build_omega, build_w, check_invertible, check_invertible_matrix, Arity, BasisSet,
    Descriptor, Invertibility, MatrixKind, StructuredMatrix, Variable, WRecord,
};
pub use behavior::{build_dictionary, membership, predict, DataDictionary, Membership, Prediction};
pub use ddctl::{
    closed_loop_experiment, fit_nonlinearity, linearizing_controller, table1_experiment,
    ClosedLoopResult, LinearizingController, RegressionModel, Table1Config, Table1Report,
};
pub use error::{Error, Result};
pub use excite::{
    flat_design, hammerstein_train, impulse_train, reachable_multi_experiment,
    solve_lambda_feasibility, Designer, ExcitationPlan, LambdaSolution,
};
pub use linalg::DEFAULT_RANK_TOL;
pub use pe::{build_hankel, build_mosaic_hankel, pe_check, HankelView, PeDefinition, PeReport};
pub use plant::{
    simulate, AnyPlant, FlatPlant, HammersteinPlant, LtiPlant, Plant, PlantSpec, Trajectory,
};
pub use series::TimeSeries;
