//! Observability constants `m_d(λ, r)` as smallest eigenvalues of ball-kernel
//! Gram matrices, the example families that drive them down, and
//! constant-free evaluators of the surrounding bounds.

pub mod bessel;
pub mod bounds;
pub mod families;
pub mod gram;
pub mod quadrature;

pub use bessel::ball_kernel;
pub use bounds::{
    delta_cc, exponent_tables, h_exponent, nazarov_lower_bound, taylor_bound_check, upper_bound_eval, ExponentTables,
    TaylorCheck,
};
pub use families::{family_hyperplane, family_simple, family_wigert, FamilyReport};
pub use gram::{
    best_pair_quotient, gram_matrix, local_mass, min_eigenvalue, observability_constant, rayleigh_quotient,
    GramMatrix, MinEigen, DEFAULT_TOL,
};
pub use quadrature::{gauss_legendre, local_mass_oracle};
