//! Z-Laplacian framework: graphs, diagonal parameters, shift operators,
//! discrete and continuous dynamics, spectral filtering and bottleneck analysis.

pub mod bottleneck;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod params;
pub mod spectral;

pub use bottleneck::{conductance, heal_rank, min_conductance, protocol_model, CutResult, Method, Protocol};
pub use dynamics::{EvolutionReport, Signal};
pub use error::{Error, Result};
pub use graph::{families, DegreeKind, DegreeVector, Graph};
pub use linalg::Matrix;
pub use operators::{ShiftOperator, ZLaplacian};
pub use params::{Bias, DelayFloor, Delays, DiagonalParams, Replication};
pub use spectral::{sym_eig, Candidate, SpectralDecomposition};
