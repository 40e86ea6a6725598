//! Theta series, Stickelberger elements, p-adic L-functions and their
//! interpolation against directly summed Dirichlet L-functions.

mod theta;

pub use theta::{
    default_t, eval_at_one, f_t_series, stickelberger, theta_series, theta_series_with, theta_st, theta_st_with,
    Progress, ThetaOptions, ThetaST, ThetaStrategy, STABILIZATION_GUARD,
};

mod oracle;

pub use oracle::{
    dirichlet_l, dirichlet_l_direct, embed_poly, functional_eq_check, gauss_sum, omega_b, DirichletCharacter, Frac,
    FunctionalEqReport, RationalFunction,
};

mod interp;

pub use interp::{
    context_for, interp_factors, interpolation_check, l_star, p_adic_l, rebase, theta_plus, theta_plus_from,
    AbelianVarietyData, Comparison, InterpFactors, InterpolationReport,
};

mod twist;

pub use twist::{descent_compat, lambda_twist_identity, DescentReport, TwistIdentityReport};
