//! Bounds on `E[Z_T]`, the mean of a randomly selected coordinate of a vector
//! of mean-zero random variables, together with exact and Monte Carlo
//! machinery to check them.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod extended;
pub mod joint;
pub mod mc;
pub mod optimize;
pub mod oracle;
pub mod orlicz;
pub mod rv;

pub use bounds::{BoundName, BoundReport, InformationKind, OptimizerState};
pub use entropy::{h_q, ln_h_q, mutual_information, pointwise_min_term, shannon_entropy, SelectionMarginal};
pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use joint::FiniteJointInstance;
pub use mc::{EstimateWithCI, GeneratorConfig, SelectionRule, ZLaw};
pub use oracle::{grid_minimize_bound, GridMinimum, OracleInput, OracleObjective};
pub use orlicz::{ConjugateOf, Knot, OrliczFamily, OrliczSpec, YoungFunction};
pub use rv::{amemiya_norm, luxemburg_norm, Atom, EmpiricalRV};
