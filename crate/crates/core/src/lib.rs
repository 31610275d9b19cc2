//! Quantized cat, standard and Harper maps on the torus: out-of-time-ordered
//! correlators, coarse-grained (dephased) dynamics, classical Lyapunov
//! estimates and Ruelle-Pollicott resonances.

pub mod classical;
pub mod coarse_grain;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod operator;
pub mod otoc;
pub mod phase_space;
pub mod resonances;
pub mod runner;

pub use classical::{cat_matrix_power, ehrenfest_time, lyapunov, LyapunovEstimate, LAMBDA_CAT};
pub use coarse_grain::{build_kernel, channel_step, CoarseGrainKernel, CoarseGrainedMap};
pub use error::{Error, Result};
pub use linalg::C64;
pub use maps::{classical_step, jacobian, quantize, ClassicalMapSpec, Direction, KickMode, QuantumMap};
pub use operator::{Basis, OperatorMatrix};
pub use otoc::{otoc_series, OperatorChoice, OtocSeries, Propagator};
pub use phase_space::{PhaseVector, TorusSpace};
pub use resonances::{dense_spectrum, fit_tail_rate, krylov_leading, trim_tail_window, KrylovSeed, ResonanceSpectrum};
