//! Density matrices: thermal, pseudo-Boltzmann, pseudo-pure and ideal
//! Bell-state targets, plus the two-qubit submatrix extraction and a
//! bit-exact structured-text serialization.
//!
//! Physical and pseudo matrices share one type distinguished by a flag:
//! pseudo matrices (deviation-type operators such as the pseudo-Boltzmann
//! matrix) need not be positive or unit-trace, only Hermitian.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{K_BOLTZMANN, PLANCK};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, C64};
use crate::spinsys::{electron_sz8, SpinSystem};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not Hermitian: max asymmetry {0:e}")]
    NotHermitian(f64),
    #[error("physical density matrix must have unit trace, got {0}")]
    NotUnitTrace(f64),
    #[error("physical density matrix has negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("serialization error: {0}")]
    Serialization(String),
}

/// Hermitian density matrix, physical or pseudo.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    pseudo: bool,
}

impl DensityMatrix {
    /// Wrap a physical density matrix: Hermitian, unit trace, positive
    /// semidefinite (within numerical tolerance).
    pub fn physical(matrix: ComplexMatrix) -> Result<Self, StateError> {
        let herm = matrix.hermitian_error();
        if herm > 1e-12 * matrix.max_abs().max(1.0) {
            return Err(StateError::NotHermitian(herm));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(StateError::NotUnitTrace(tr));
        }
        let eig = hermitian_eigensystem(&matrix).map_err(|_| StateError::NotHermitian(herm))?;
        if eig.values[0] < -1e-10 {
            return Err(StateError::NegativeEigenvalue(eig.values[0]));
        }
        Ok(Self {
            matrix,
            pseudo: false,
        })
    }

    /// Wrap a pseudo (deviation-type) matrix: only Hermiticity is required.
    pub fn pseudo(matrix: ComplexMatrix) -> Result<Self, StateError> {
        let herm = matrix.hermitian_error();
        if herm > 1e-12 * matrix.max_abs().max(1.0) {
            return Err(StateError::NotHermitian(herm));
        }
        Ok(Self {
            matrix,
            pseudo: true,
        })
    }

    /// Rewrap preserving the pseudo flag of `self`.
    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            pseudo: self.pseudo,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Matrix element r_jk addressed by 1-based level indices, matching the
    /// |1>..|8> labelling convention.
    pub fn level_entry(&self, j: usize, k: usize) -> C64 {
        self.matrix.get(j - 1, k - 1)
    }

    /// The eight populations in level order.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }

    /// Conjugate by a unitary: U ρ U†.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        self.with_matrix(self.matrix.conjugate_by(u))
    }
}

/// Thermal parameters. `beta_b` is ħ/(k_B T) in seconds; `k_b_factor` is the
/// dimensionless ħω_S/(k_B T) for a given electron frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub temperature: f64,
}

impl ThermalParams {
    pub fn new(temperature: f64) -> Self {
        assert!(temperature > 0.0, "temperature must be positive");
        Self { temperature }
    }

    pub fn beta_b(&self) -> f64 {
        crate::constants::HBAR / (K_BOLTZMANN * self.temperature)
    }

    pub fn k_b_factor(&self, nu_s: f64) -> f64 {
        // ħ ω_S / (k_B T) with ω_S = 2π ν_S, i.e. h ν_S / (k_B T).
        PLANCK * nu_s / (K_BOLTZMANN * self.temperature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoltzmannMode {
    Exact,
    HighTemperature,
}

/// Thermal equilibrium state of the electron Zeeman term,
/// exp(-β_B ω_S Sz)/Tr{...} on the eight-level space. The high-temperature
/// mode returns the linearized form (1 - K_B Sz)/8.
pub fn boltzmann(sys: &SpinSystem, th: &ThermalParams, mode: BoltzmannMode) -> DensityMatrix {
    let k = th.k_b_factor(sys.nu_s);
    let matrix = match mode {
        BoltzmannMode::Exact => {
            // Populations e^{-K_B m} for m = ±3/2, ±1/2, each twice.
            let weights: Vec<f64> = (1..=8)
                .map(|lvl| (-k * crate::spinsys::level_m_s(lvl)).exp())
                .collect();
            let z: f64 = weights.iter().sum();
            ComplexMatrix::from_real_diag(&weights.iter().map(|w| w / z).collect::<Vec<_>>())
        }
        BoltzmannMode::HighTemperature => {
            let id = ComplexMatrix::identity(8);
            (&id - &electron_sz8().scale_re(k)).scale_re(1.0 / 8.0)
        }
    };
    DensityMatrix::physical(matrix).expect("Boltzmann state is physical")
}

/// The pseudo-Boltzmann matrix 1/4 - Sz/2: the deviation part of the
/// high-temperature state and the starting point of every preparation
/// sequence. Diagonal {-1/2, -1/2, 0, 0, 1/2, 1/2, 1, 1}; trace 2.
pub fn pseudo_boltzmann() -> DensityMatrix {
    let m = &ComplexMatrix::identity(8).scale_re(0.25) - &electron_sz8().scale_re(0.5);
    DensityMatrix::pseudo(m).expect("pseudo-Boltzmann matrix is Hermitian")
}

/// Which pseudo-pure state to target: `P10` aligns the two-qubit subsystem
/// on |10>, `P11` on |11>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PseudoPureTarget {
    P10,
    P11,
}

/// Ideal pseudo-pure diagonal matrix reached by the preparation sequence
/// with exact angles.
pub fn ideal_pseudo_pure(target: PseudoPureTarget) -> DensityMatrix {
    let third = 1.0 / 3.0;
    let sixth = 1.0 / 6.0;
    let diag = match target {
        PseudoPureTarget::P10 => [0.0, 0.0, 0.0, third, 0.5, sixth, 1.0, 0.0],
        PseudoPureTarget::P11 => [0.0, 0.0, third, 0.0, sixth, 0.5, 0.0, 1.0],
    };
    DensityMatrix::pseudo(ComplexMatrix::from_real_diag(&diag)).expect("diagonal is Hermitian")
}

/// The four Bell states of the fictitious two-qubit subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "psi+" | "psi_plus" => Some(BellState::PsiPlus),
            "psi-" | "psi_minus" => Some(BellState::PsiMinus),
            "phi+" | "phi_plus" => Some(BellState::PhiPlus),
            "phi-" | "phi_minus" => Some(BellState::PhiMinus),
            _ => None,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            BellState::PsiPlus | BellState::PhiPlus => 1.0,
            BellState::PsiMinus | BellState::PhiMinus => -1.0,
        }
    }

    pub fn is_psi(self) -> bool {
        matches!(self, BellState::PsiPlus | BellState::PsiMinus)
    }

    /// 1-based level pair carrying the entangled coherence: (2,7) for Ψ,
    /// (1,8) for Φ.
    pub fn coherence_levels(self) -> (usize, usize) {
        if self.is_psi() {
            (2, 7)
        } else {
            (1, 8)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    TwoQubit,
    EightLevel,
}

/// Ideal Bell density matrix: the pure 4x4 two-qubit projector, or the full
/// eight-level matrix produced by the preparation sequence (which carries
/// spectator populations 1/6, 1/3, 1/2 outside the two-qubit subsystem).
pub fn ideal_bell(which: BellState, embedding: Embedding) -> DensityMatrix {
    match embedding {
        Embedding::TwoQubit => {
            let mut m = ComplexMatrix::zeros(4);
            let half = C64::new(0.5, 0.0);
            let off = C64::new(0.5 * which.sign(), 0.0);
            match which {
                BellState::PsiPlus | BellState::PsiMinus => {
                    m.set(1, 1, half);
                    m.set(2, 2, half);
                    m.set(1, 2, off);
                    m.set(2, 1, off);
                }
                BellState::PhiPlus | BellState::PhiMinus => {
                    m.set(0, 0, half);
                    m.set(3, 3, half);
                    m.set(0, 3, off);
                    m.set(3, 0, off);
                }
            }
            DensityMatrix::physical(m).expect("Bell projector is physical")
        }
        Embedding::EightLevel => {
            let sixth = 1.0 / 6.0;
            let third = 1.0 / 3.0;
            let mut m = match which {
                BellState::PsiPlus | BellState::PsiMinus => {
                    ComplexMatrix::from_real_diag(&[0.0, 0.5, 0.0, sixth, 0.5, third, 0.5, 0.0])
                }
                BellState::PhiPlus | BellState::PhiMinus => {
                    ComplexMatrix::from_real_diag(&[0.5, 0.0, sixth, 0.0, third, 0.5, 0.0, 0.5])
                }
            };
            let (j, k) = which.coherence_levels();
            let off = C64::new(0.5 * which.sign(), 0.0);
            m.set(j - 1, k - 1, off);
            m.set(k - 1, j - 1, off);
            DensityMatrix::pseudo(m).expect("target matrix is Hermitian")
        }
    }
}

/// 0-based row/column indices of the two-qubit subsystem inside the
/// eight-level space: levels 1, 2, 7, 8 as |00>, |01>, |10>, |11>.
pub const TWO_QUBIT_LEVELS0: [usize; 4] = [0, 1, 6, 7];

/// Extract the 4x4 two-qubit submatrix (rows/columns of levels 1, 2, 7, 8).
pub fn two_qubit_submatrix(rho: &DensityMatrix) -> Result<DensityMatrix, StateError> {
    if rho.dim() != 8 {
        return Err(StateError::DimensionMismatch {
            expected: 8,
            got: rho.dim(),
        });
    }
    let m = ComplexMatrix::from_fn(4, |i, j| {
        rho.matrix().get(TWO_QUBIT_LEVELS0[i], TWO_QUBIT_LEVELS0[j])
    });
    DensityMatrix::pseudo(m)
}

/// Re-embed a 4x4 two-qubit matrix into the eight-level space, zero
/// elsewhere.
pub fn embed_two_qubit(rho4: &DensityMatrix) -> Result<DensityMatrix, StateError> {
    if rho4.dim() != 4 {
        return Err(StateError::DimensionMismatch {
            expected: 4,
            got: rho4.dim(),
        });
    }
    let mut m = ComplexMatrix::zeros(8);
    for (i, &li) in TWO_QUBIT_LEVELS0.iter().enumerate() {
        for (j, &lj) in TWO_QUBIT_LEVELS0.iter().enumerate() {
            m.set(li, lj, rho4.matrix().get(i, j));
        }
    }
    DensityMatrix::pseudo(m)
}

/// Serialized form: dimension, pseudo flag, row-major entries as [re, im]
/// pairs. The text round-trips bit-exactly.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    pseudo: bool,
    entries: Vec<[f64; 2]>,
}

impl DensityMatrix {
    pub fn to_json(&self) -> String {
        let repr = MatrixRepr {
            dim: self.dim(),
            pseudo: self.pseudo,
            entries: self.matrix.data().iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string_pretty(&repr).expect("matrix serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, StateError> {
        let repr: MatrixRepr =
            serde_json::from_str(text).map_err(|e| StateError::Serialization(e.to_string()))?;
        if repr.entries.len() != repr.dim * repr.dim {
            return Err(StateError::Serialization(format!(
                "expected {} entries, got {}",
                repr.dim * repr.dim,
                repr.entries.len()
            )));
        }
        let data: Vec<C64> = repr
            .entries
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        let matrix = ComplexMatrix::from_row_major(repr.dim, data);
        if repr.pseudo {
            Self::pseudo(matrix)
        } else {
            Self::physical(matrix)
        }
    }
}
