//! Ground-state energy and property estimation driven by simulated Hadamard tests.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix `f64`.

pub mod applications;
pub mod error;
pub mod estimators;
pub mod fourier;
pub mod hadamard;
pub mod pauli;
pub mod scalar;
pub mod spectral;

pub use applications::{LinearSystemInstance, QlssConfig};
pub use error::{Error, Result};
pub use estimators::{EstimateReport, EstimationConfig};
pub use hadamard::{BlockEncoding, UnitaryOp};
pub use fourier::{build_fourier_approx, degree_for, evaluate_f, heaviside, FourierApprox};
pub use pauli::{build_operator, Pauli, PauliOperator, PauliString, PhasedPauli};
pub use scalar::Real;
pub use spectral::{diagonalize, evolve, exact_cdf, overlaps, SpectralData, SpectralMeasure, StateVector};

/// Dense simulation limit.
pub const MAX_QUBITS: usize = 12;

pub type Operator64 = PauliOperator<f64>;
pub type Spectrum64 = SpectralData<f64>;
pub type State64 = StateVector<f64>;
pub type Fourier64 = FourierApprox<f64>;
pub type Report64 = EstimateReport<f64>;
pub type Config64 = EstimationConfig<f64>;
pub type Block64 = BlockEncoding<f64>;
pub type LinearSystem64 = LinearSystemInstance<f64>;

pub type Operator32 = PauliOperator<f32>;
pub type Spectrum32 = SpectralData<f32>;
pub type State32 = StateVector<f32>;
pub type Fourier32 = FourierApprox<f32>;
pub type Report32 = EstimateReport<f32>;
pub type Config32 = EstimationConfig<f32>;
pub type Block32 = BlockEncoding<f32>;
pub type LinearSystem32 = LinearSystemInstance<f32>;
