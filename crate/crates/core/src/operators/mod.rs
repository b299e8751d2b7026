//! Operators on `l^2(E_inf)` restricted to finite edge windows: projections,
//! multiplication and reversal operators, the partial isometries `V_γ`, the
//! Dirac operator, and the renormalized trace `τ_0`.

mod construct;
mod entry;
mod matrix;
mod norm;
mod random;
mod window;

pub use construct::{
    dirac, dirac_modulus, edge_reversal, identity, mult_operator, partial_isometry, projection,
    Projection,
};
pub use entry::Entry;
pub use matrix::{GeometricOperator, Support};
pub use norm::operator_norm;
pub use random::random_invariant;
pub use window::EdgeWindow;
