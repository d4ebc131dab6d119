//! Guaranteed reachable-set underapproximation for unknown control-affine
//! systems on Riemannian manifolds.
//!
//! Given the drift `f(x₀)` and input matrix `G(x₀)` at a single point,
//! Lipschitz bounds on `f` and the columns of `G`, and the manifold metric,
//! [`gvs`] builds a ball of velocities every consistent system can realise and
//! [`reach`] propagates the resulting surrogate system to sample a set that is
//! contained in the true reachable set.
//!
//! ```
//! use riemreach::reach::{reach_cloud, ReachOptions};
//! use riemreach::scenarios;
//!
//! let ex = scenarios::pendulum().unwrap();
//! let opts = ReachOptions { horizon: 0.1, n_trajectories: 4, ..Default::default() };
//! let cloud = reach_cloud(&ex.system, &opts).unwrap();
//! assert_eq!(cloud.points.len(), 4 * 101);
//! ```

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod gvs;
pub mod manifolds;
pub mod reach;
pub mod scenarios;

pub use error::{ReachError, Result};
