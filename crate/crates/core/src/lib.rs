//! Simulation and reconstruction core for direct state tomography (DST) by weak
//! measurement, with linear-inversion tomography as a reference.

pub mod dst;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, RandomSource};
pub use states::{
    complementary_basis, pure_trace_distance, spin_coherent, trace_distance, DensityMatrix, Method, PointerKind,
    PureState, RawReconstruction,
};
