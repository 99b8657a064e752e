//! Density-matrix simulator and analysis toolkit for a coupled
//! electron-nuclear spin system with S = 3/2 and I = 1/2.
//!
//! The crate models the full experimental workflow of pulsed
//! ESR/ENDOR quantum-state engineering on such a system:
//!
//! - [`spinsys`]: spin operators, first-order Hamiltonian, ESR/ENDOR line
//!   positions and transition-selective (fictitious spin-1/2) operators;
//! - [`states`]: Boltzmann, pseudo-Boltzmann, pseudo-pure and Bell-state
//!   density matrices, plus the two-qubit submatrix extraction;
//! - [`sequence`]: phased selective pulses, dephasing waits, preparation and
//!   entanglement sequences, and a step-by-step sequence engine with a
//!   phenomenological coherence-decay model;
//! - [`program`]: a line-oriented pulse-program text format (`.pp`) with
//!   parser, canonical renderer and bundled programs;
//! - [`tomography`]: Rabi population readout, phase interferograms (TPPI),
//!   sin-α off-diagonal reconstruction, decoherence fitting and fidelity;
//! - [`entanglement`]: Peres-Horodecki partial-transpose analysis and the
//!   quantum critical temperature;
//! - [`cli`]: the command-line front end used by the `spintomo` binary.
//!
//! All numerical operations are pure functions on immutable values and are
//! deterministic for a fixed seed.

pub mod cli;
pub mod constants;
pub mod entanglement;
pub mod fit;
pub mod linalg;
pub mod program;
pub mod sequence;
pub mod spinsys;
pub mod states;
pub mod tomography;

pub use linalg::{ComplexMatrix, C64};
pub use spinsys::{SpinSystem, Transition};
pub use states::{BellState, DensityMatrix};

#[cfg(test)]
mod thread_safety {
    // All values are plain data with no interior mutability; state can be
    // shared and sent across threads freely.
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::ComplexMatrix>();
        assert_send_sync::<crate::DensityMatrix>();
        assert_send_sync::<crate::SpinSystem>();
        assert_send_sync::<crate::sequence::CoherenceDecayModel>();
        assert_send_sync::<crate::sequence::SequenceStep>();
        assert_send_sync::<crate::program::Program>();
        assert_send_sync::<crate::tomography::TomographyReport>();
        assert_send_sync::<crate::entanglement::PptResult>();
    }
}
