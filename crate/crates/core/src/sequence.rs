//! Pulse engine: phased transition-selective pulses, dephasing waits, the
//! named preparation and entanglement sequences, and a step-by-step sequence
//! runner with a phenomenological coherence-decay model.
//!
//! A pulse with phase φ about the in-plane axis at angle φ from x is the
//! unitary exp(-iφFz)·exp(-iβFx)·exp(+iφFz) built from the fictitious
//! operators of its transition. Pulses are instantaneous; decoherence acts
//! only during `Wait` steps.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::linalg::{unitary_from_generator, ComplexMatrix, C64};
use crate::spinsys::{fictitious_ops, level_m_s, EndorPair, Transition};
use crate::states::{BellState, DensityMatrix, PseudoPureTarget};

/// Ideal inversion angle of the first preparation pulse, arccos(-1/3).
pub fn ideal_beta0() -> f64 {
    (-1.0f64 / 3.0).acos()
}

/// A phased selective pulse. `phase` is the angle of the rotation axis from
/// x in the transition's rotating frame (y corresponds to π/2), reduced
/// mod 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub transition: Transition,
    pub angle: f64,
    pub phase: f64,
}

impl Pulse {
    pub fn new(transition: Transition, angle: f64, phase: f64) -> Self {
        assert!(angle.is_finite(), "pulse angle must be finite");
        Self {
            transition,
            angle,
            phase: phase.rem_euclid(TAU),
        }
    }

    pub fn x(transition: Transition, angle: f64) -> Self {
        Self::new(transition, angle, 0.0)
    }

    pub fn y(transition: Transition, angle: f64) -> Self {
        Self::new(transition, angle, FRAC_PI_2)
    }
}

/// Which coherences a wait interval wipes out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dephase {
    None,
    /// All off-diagonal elements.
    All,
    /// Only electron coherences (elements connecting different m_S).
    EsrOnly,
}

/// A single step of a pulse program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceStep {
    Pulse(Pulse),
    Wait { duration: f64, dephase: Dephase },
}

/// The unitary implementing a pulse.
pub fn pulse_unitary(p: &Pulse) -> ComplexMatrix {
    let ops = fictitious_ops(p.transition);
    let rot = unitary_from_generator(&ops.x, p.angle).expect("Fx is Hermitian");
    if p.phase == 0.0 {
        return rot;
    }
    let zp = unitary_from_generator(&ops.z, p.phase).expect("Fz is Hermitian");
    zp.matmul(&rot).matmul(&zp.adjoint())
}

/// Apply a pulse: ρ' = U ρ U†. Trace and Hermiticity are preserved.
pub fn apply_pulse(rho: &DensityMatrix, p: &Pulse) -> DensityMatrix {
    rho.conjugated(&pulse_unitary(p))
}

/// Global z-rotation pair exp(-iφ1 Sz⊗1)·exp(-iφ2 1⊗Iz). Conjugation by this
/// unitary multiplies the basis dyad |m_S m_I><m_S' m_I'| by
/// exp(-i((m_S-m_S')φ1 + (m_I-m_I')φ2)).
pub fn z_rotation(phi1: f64, phi2: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(8, |i, j| {
        if i == j {
            let m_s = level_m_s(i + 1);
            let m_i = crate::spinsys::level_m_i(i + 1);
            C64::from_polar(1.0, -(m_s * phi1 + m_i * phi2))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Zero the selected off-diagonal elements; the diagonal is untouched and
/// the operation is idempotent.
pub fn dephase(rho: &DensityMatrix, which: Dephase) -> DensityMatrix {
    match which {
        Dephase::None => rho.clone(),
        Dephase::All => {
            let n = rho.dim();
            let m = ComplexMatrix::from_fn(n, |i, j| {
                if i == j {
                    rho.matrix().get(i, j)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            rho.with_matrix(m)
        }
        Dephase::EsrOnly => {
            let n = rho.dim();
            assert_eq!(
                n, 8,
                "electron-selective dephasing is defined on the eight-level space"
            );
            let m = ComplexMatrix::from_fn(n, |i, j| {
                if i != j && level_m_s(i + 1) != level_m_s(j + 1) {
                    C64::new(0.0, 0.0)
                } else {
                    rho.matrix().get(i, j)
                }
            });
            rho.with_matrix(m)
        }
    }
}

/// Zero only the listed coherences, addressed by 1-based level pairs (both
/// orientations of each pair).
pub fn dephase_pairs(rho: &DensityMatrix, pairs: &[(usize, usize)]) -> DensityMatrix {
    let mut m = rho.matrix().clone();
    for &(j, k) in pairs {
        m.set(j - 1, k - 1, C64::new(0.0, 0.0));
        m.set(k - 1, j - 1, C64::new(0.0, 0.0));
    }
    rho.with_matrix(m)
}

/// Pseudo-pure preparation: an inversion pulse on one electron manifold, a
/// dephasing wait, a nuclear pulse equalizing the top level pair, and a
/// final dephasing wait. With β0 = arccos(-1/3) and α0 = π/2 this maps the
/// pseudo-Boltzmann matrix onto the ideal pseudo-pure diagonal exactly.
pub fn prepare_pseudo_pure(
    start: &DensityMatrix,
    target: PseudoPureTarget,
    beta0: f64,
    alpha0: f64,
) -> DensityMatrix {
    let manifold = match target {
        PseudoPureTarget::P10 => Transition::EsrMinus,
        PseudoPureTarget::P11 => Transition::EsrPlus,
    };
    let rho = apply_pulse(start, &Pulse::y(manifold, beta0));
    let rho = dephase(&rho, Dephase::All);
    let rho = apply_pulse(&rho, &Pulse::y(Transition::Endor(EndorPair::P12), alpha0));
    dephase(&rho, Dephase::All)
}

/// Manifold pulse angle used by the entanglement sequence for each Bell
/// state: -β1 for Ψ+, +β1 for Ψ-, +β1 for Φ+, -β1 for Φ-.
fn entangle_manifold_angle(which: BellState, beta1: f64) -> f64 {
    match which {
        BellState::PsiPlus | BellState::PhiMinus => -beta1,
        BellState::PsiMinus | BellState::PhiPlus => beta1,
    }
}

fn entangle_manifold(which: BellState) -> Transition {
    if which.is_psi() {
        Transition::EsrMinus
    } else {
        Transition::EsrPlus
    }
}

/// Outcome of the entanglement sequence. `start_mismatch` warns that the
/// initial state does not look like the pseudo-pure state the chosen Bell
/// state expects (the sequence still runs).
#[derive(Debug, Clone)]
pub struct Entangled {
    pub state: DensityMatrix,
    pub start_mismatch: bool,
}

/// Entanglement sequence: a nuclear π/2-type pulse on the 7-8 transition
/// followed immediately (no dephasing) by a π-type pulse on one electron
/// manifold. Ideal angles α1 = π/2, β1 = π map the pseudo-pure states onto
/// the eight-level Bell targets exactly.
pub fn entangle(start: &DensityMatrix, which: BellState, alpha1: f64, beta1: f64) -> Entangled {
    // Ψ expects the P10-like state (level 7 carries the alignment), Φ the
    // P11-like state (level 8 does).
    let source_level = if which.is_psi() { 7 } else { 8 };
    let diag = start.diagonal();
    let max_pop = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let start_mismatch = diag[source_level - 1] < max_pop - 1e-9;

    let rho = apply_pulse(start, &Pulse::y(Transition::Endor(EndorPair::P78), alpha1));
    let rho = apply_pulse(
        &rho,
        &Pulse::y(
            entangle_manifold(which),
            entangle_manifold_angle(which, beta1),
        ),
    );
    Entangled {
        state: rho,
        start_mismatch,
    }
}

/// Which detection sequence to use: the Ψ detector works on the m_I = -1/2
/// manifold, the Φ detector on m_I = +1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionTarget {
    Psi,
    Phi,
}

impl DetectionTarget {
    pub fn manifold(self) -> Transition {
        match self {
            DetectionTarget::Psi => Transition::EsrMinus,
            DetectionTarget::Phi => Transition::EsrPlus,
        }
    }

    pub fn for_bell(which: BellState) -> Self {
        if which.is_psi() {
            DetectionTarget::Psi
        } else {
            DetectionTarget::Phi
        }
    }
}

/// Detection unitary: a phased -β electron pulse (phase φ1) followed by a
/// phased α nuclear pulse on the 7-8 transition (phase φ2).
pub fn detect_unitary_with(
    which: DetectionTarget,
    phi1: f64,
    phi2: f64,
    alpha: f64,
    beta: f64,
) -> ComplexMatrix {
    let esr = pulse_unitary(&Pulse::new(which.manifold(), -beta, phi1));
    let endor = pulse_unitary(&Pulse::new(Transition::Endor(EndorPair::P78), alpha, phi2));
    endor.matmul(&esr)
}

/// Detection unitary with the ideal angles α = π/2, β = π.
pub fn detect_unitary(which: DetectionTarget, phi1: f64, phi2: f64) -> ComplexMatrix {
    detect_unitary_with(which, phi1, phi2, FRAC_PI_2, PI)
}

/// Phenomenological coherence decay applied during wait intervals: the two
/// entangled coherences decay exponentially with their own time constants
/// and deviations of the diagonal from its mean decay with `t_diag`. Pulses
/// are instantaneous; a finite pulse of width t_p is accounted for in
/// effective-delay bookkeeping as `pulse_width_weight`·t_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceDecayModel {
    /// Decay time of the (2,7) coherence, seconds.
    pub t_psi: f64,
    /// Decay time of the (1,8) coherence, seconds.
    pub t_phi: f64,
    /// Decay time of diagonal differences, seconds.
    pub t_diag: f64,
    /// Fraction of a pulse width contributing to the effective delay.
    pub pulse_width_weight: f64,
}

impl Default for CoherenceDecayModel {
    fn default() -> Self {
        Self {
            t_psi: 208e-9,
            t_phi: 210e-9,
            t_diag: 2.60e-3,
            pulse_width_weight: 0.5,
        }
    }
}

impl CoherenceDecayModel {
    /// Effective delay seen by a coherence across a plain delay plus a list
    /// of finite pulse widths.
    pub fn effective_delay(&self, delay: f64, pulse_widths: &[f64]) -> f64 {
        delay + self.pulse_width_weight * pulse_widths.iter().sum::<f64>()
    }

    /// Apply the decay over `duration` seconds.
    pub fn apply(&self, rho: &DensityMatrix, duration: f64) -> DensityMatrix {
        let mut m = rho.matrix().clone();
        let scale_pair = |m: &mut ComplexMatrix, j: usize, k: usize, t: f64| {
            let f = (-duration / t).exp();
            m.set(j, k, m.get(j, k) * f);
            m.set(k, j, m.get(k, j) * f);
        };
        scale_pair(&mut m, 1, 6, self.t_psi); // levels (2,7)
        scale_pair(&mut m, 0, 7, self.t_phi); // levels (1,8)
        let n = m.dim();
        let mean = m.trace().re / n as f64;
        let f = (-duration / self.t_diag).exp();
        for i in 0..n {
            let p = m.get(i, i).re;
            m.set(i, i, C64::new(mean + (p - mean) * f, 0.0));
        }
        rho.with_matrix(m)
    }
}

/// Result of running a sequence: the final state plus the state after each
/// step.
#[derive(Debug, Clone)]
pub struct SequenceRun {
    pub final_state: DensityMatrix,
    pub trajectory: Vec<DensityMatrix>,
}

/// Run a list of steps. Wait steps apply the decay model (when given) over
/// their duration and then the requested dephasing; pulses are instantaneous
/// unitaries.
pub fn run_sequence(
    rho0: &DensityMatrix,
    steps: &[SequenceStep],
    decay: Option<&CoherenceDecayModel>,
) -> SequenceRun {
    let mut state = rho0.clone();
    let mut trajectory = Vec::with_capacity(steps.len());
    for step in steps {
        state = match step {
            SequenceStep::Pulse(p) => apply_pulse(&state, p),
            SequenceStep::Wait {
                duration,
                dephase: d,
            } => {
                let decayed = match decay {
                    Some(model) => model.apply(&state, *duration),
                    None => state,
                };
                dephase(&decayed, *d)
            }
        };
        trajectory.push(state.clone());
    }
    SequenceRun {
        final_state: state,
        trajectory,
    }
}
