//! Closed-form laws of local times and crossing counts, and the constants
//! of the range large deviations.

pub mod clocks;
pub mod com;
pub mod densities;
pub mod hypoexp;
pub mod local_time;
pub mod rates;
pub mod special;

pub use clocks::{geometric_mixture, geometric_mixture_identity_check, orrw_count_prob, Clock, PointProcess};
pub use local_time::{
    adjusted_current, current_basis, ksum_fixed_current, ksum_with, product_density, product_fourier,
    product_ksum, Approximation, FourierOptions, LocalTimeQuery, Profile, SeriesOptions,
};
pub use densities::{
    derrw_density, dirichlet_density, dirichlet_k_prob, dirichlet_moment, dorrw_bessel_form, dorrw_density,
    dorrw_gamma_form, dorrw_gamma_ksum, dorrw_upper_bound, dorrw_vertex_count_bound, net_current, rwre_density,
    DorrwForms,
};
pub use com::{com_log_weight, com_log_weight_by_steps, com_weight};
pub use hypoexp::{hypoexp_density, interval_prob};
pub use rates::{admissible_p, ldp_bounds, nu_rate, nu_sup, RateFunctionParams};
pub use special::{bessel_jvw, first_bessel_zero, lambda_d, lower_incomplete_gamma, omega_d, psi_d};
