//! Flat outputs for a heated rod built from a linear-time Bézout identity
//! between Chebyshev polynomials in the `cosh` basis.

pub mod approx;
pub mod bezout;
pub mod coshbasis;
pub mod error;
pub mod numeric;
pub mod planning;
pub mod rod;
pub mod series;

pub use approx::{
    admissible_convergents, cf_expand, parity_filter, run_experiment, run_experiment_jobs,
    Convergent, ExperimentReport, ExperimentRow, TargetValue,
};
pub use bezout::{
    bezout_arrays, bezout_cosh, gcd_oracle, verify_identity, BezoutArrays, BezoutPair,
    BezoutProblem, BezoutStep, BezoutTrace, BezoutWalk, Side,
};
pub use coshbasis::{chebyshev_t, cosh_mul, from_monomial, to_monomial, CoshPoly, MonomialPoly};
pub use error::{Error, Result};
pub use numeric::NumericMode;
pub use planning::{
    apply_operator, gevrey_jet, simulate, synthesize_control, transfer_error, ControlProfile,
    DerivativeJet, GevreySpec, GevreyTrajectory, Trajectory,
};
pub use rod::{
    controllability_rank, flat_output_from_bezout, flat_output_with_pairing, fold_tape,
    gamma_sequence, is_flat_output, rank_of, FlatOutputVector, FoldEvent, FoldResult, GammaElement,
    Pairing, RodModel, StencilSign,
};
pub use series::{
    cosh_series, expand, identity_residual, normalize_pair, series_mul, OperatorSeries,
    SeriesCoeffs,
};
