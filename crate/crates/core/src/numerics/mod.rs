//! High-accuracy primitives shared by the other modules.
//!
//! Everything here is a pure function of its inputs and is safe to call
//! from several threads at once.

mod ode;
mod path;
mod quad;
mod root;
mod tableau;

pub use ode::{
    integrate_ode, integrate_ode_with, solve_param, OdeOptions, OdeResult, StepInfo,
};
pub use path::{ComplexPath, Segment};
pub use quad::{quad_path, quad_path_nodes, Node, QuadResult};
pub use root::{find_root, find_root_newton};

pub(crate) use ode::single_step;
