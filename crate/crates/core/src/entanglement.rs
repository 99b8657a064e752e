//! Separability analysis via the positive-partial-transpose criterion and
//! the quantum critical temperature of the thermally prepared entanglement
//! protocol.
//!
//! A state whose partial transpose has a negative eigenvalue is entangled.
//! For the protocol simulated here (exact Boltzmann state, a π alignment
//! pulse on the m_I = -1/2 manifold, then the Ψ entanglement sequence) the
//! zero crossing of the smallest partial-transpose eigenvalue happens at
//! exp(ħω_S/(k_B T)) = (3+2√2)^{1/3}, which defines T_q.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{K_BOLTZMANN, PLANCK};
use crate::linalg::{hermitian_eigensystem, partial_transpose, Subsystem};
use crate::sequence::{apply_pulse, entangle, Pulse};
use crate::spinsys::{SpinSystem, Transition};
use crate::states::{boltzmann, BellState, BoltzmannMode, DensityMatrix, ThermalParams};

#[derive(Debug, Error)]
pub enum EntanglementError {
    #[error("PPT criterion requires a physical density matrix, not a pseudo matrix")]
    PseudoMatrix,
    #[error("state must be 8x8, got {0}x{0}")]
    WrongDimension(usize),
    #[error("bisection bracket [{0}, {1}] does not straddle the zero crossing")]
    BadBracket(f64, f64),
}

/// Result of the partial-transpose test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PptResult {
    pub min_eigenvalue: f64,
    /// Full partial-transpose spectrum, ascending.
    pub spectrum: Vec<f64>,
    /// True when the minimum eigenvalue is below -tolerance.
    pub entangled: bool,
    /// Sum of |negative eigenvalues|, a convenience entanglement measure.
    pub negativity: f64,
}

/// Apply the partial transpose on the nuclear spin and report the spectrum.
/// The spectrum does not depend on which factor is transposed, but the
/// nuclear side is the documented convention.
pub fn ppt_analyze(rho: &DensityMatrix, tolerance: f64) -> Result<PptResult, EntanglementError> {
    if rho.is_pseudo() {
        return Err(EntanglementError::PseudoMatrix);
    }
    if rho.dim() != 8 {
        return Err(EntanglementError::WrongDimension(rho.dim()));
    }
    let pt = partial_transpose(rho.matrix(), (4, 2), Subsystem::Second).expect("8x8 splits as 4x2");
    let eig = hermitian_eigensystem(&pt).expect("partial transpose stays Hermitian");
    let min_eigenvalue = eig.values[0];
    let negativity = eig.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    Ok(PptResult {
        min_eigenvalue,
        entangled: min_eigenvalue < -tolerance,
        spectrum: eig.values,
        negativity,
    })
}

/// The thermal entanglement-preparation protocol: exact Boltzmann state, a
/// π pulse on the m_I = -1/2 electron manifold to align the spins, then the
/// Ψ entanglement sequence with ideal angles. The result is a physical
/// (unit-trace, positive) state for any temperature.
pub fn outlook_state(sys: &SpinSystem, temperature: f64) -> DensityMatrix {
    let rho = boltzmann(sys, &ThermalParams::new(temperature), BoltzmannMode::Exact);
    let aligned = apply_pulse(&rho, &Pulse::y(Transition::EsrMinus, PI));
    entangle(&aligned, BellState::PsiMinus, FRAC_PI_2, PI).state
}

/// Quantum critical temperature and the threshold it derives from.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalTemperature {
    pub t_q: f64,
    pub nu_s: f64,
    /// Threshold value of exp(ħω_S/(k_B T)) at the crossing, (3+2√2)^{1/3}.
    pub threshold: f64,
}

/// Closed-form critical temperature T_q = h·ν_S/(k_B·(1/3)·ln(3+2√2)).
/// Below T_q the protocol state fails the PPT test, i.e. the quantum regime
/// is reached. Linear in ν_S.
pub fn critical_temperature(nu_s: f64) -> CriticalTemperature {
    let threshold = (3.0 + 2.0 * 2.0f64.sqrt()).powf(1.0 / 3.0);
    let t_q = PLANCK * nu_s / (K_BOLTZMANN * threshold.ln());
    CriticalTemperature {
        t_q,
        nu_s,
        threshold,
    }
}

/// Minimum partial-transpose eigenvalue of the protocol state at a given
/// temperature.
pub fn lambda_min(sys: &SpinSystem, temperature: f64) -> f64 {
    ppt_analyze(&outlook_state(sys, temperature), 1e-10)
        .expect("outlook state is physical")
        .min_eigenvalue
}

/// Locate the λ_min zero crossing by bisection on temperature. λ_min is
/// negative below the crossing and positive above it.
pub fn locate_tq_bisection(
    sys: &SpinSystem,
    t_low: f64,
    t_high: f64,
    tol: f64,
) -> Result<f64, EntanglementError> {
    let mut lo = t_low;
    let mut hi = t_high;
    let f_lo = lambda_min(sys, lo);
    let f_hi = lambda_min(sys, hi);
    if f_lo >= 0.0 || f_hi <= 0.0 {
        return Err(EntanglementError::BadBracket(t_low, t_high));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if lambda_min(sys, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// λ_min and the entangled verdict over a temperature grid, for scan output.
pub fn ppt_temperature_scan(
    sys: &SpinSystem,
    temperatures: &[f64],
    tolerance: f64,
) -> Vec<(f64, f64, bool)> {
    temperatures
        .iter()
        .map(|&t| {
            let r =
                ppt_analyze(&outlook_state(sys, t), tolerance).expect("outlook state is physical");
            (t, r.min_eigenvalue, r.entangled)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::states::pseudo_boltzmann;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn product_states_are_separable() {
        // Diagonal product state with a nuclear coherence.
        let mut electron = ComplexMatrix::from_real_diag(&[0.4, 0.3, 0.2, 0.1]);
        electron.set(0, 1, crate::linalg::C64::new(0.05, 0.02));
        electron.set(1, 0, crate::linalg::C64::new(0.05, -0.02));
        let mut nuclear = ComplexMatrix::from_real_diag(&[0.6, 0.4]);
        nuclear.set(0, 1, crate::linalg::C64::new(0.1, 0.0));
        nuclear.set(1, 0, crate::linalg::C64::new(0.1, 0.0));
        let rho = DensityMatrix::physical(electron.kron(&nuclear)).unwrap();
        let result = ppt_analyze(&rho, 1e-10).unwrap();
        assert!(!result.entangled);
        assert!(result.min_eigenvalue >= -1e-10);
        assert_close(result.negativity, 0.0, 1e-10);
    }

    #[test]
    fn pseudo_matrices_are_rejected() {
        assert!(matches!(
            ppt_analyze(&pseudo_boltzmann(), 1e-10),
            Err(EntanglementError::PseudoMatrix)
        ));
    }

    #[test]
    fn spectrum_sums_to_trace() {
        let sys = SpinSystem::default();
        let rho = outlook_state(&sys, 10.0);
        let result = ppt_analyze(&rho, 1e-10).unwrap();
        let sum: f64 = result.spectrum.iter().sum();
        assert_close(sum, rho.trace(), 1e-10);
    }

    #[test]
    fn analyzing_pt_of_a_state_returns_its_own_spectrum() {
        // PT is an involution, so analyzing PT(ρ) gives the spectrum of ρ.
        let sys = SpinSystem::default();
        let rho = outlook_state(&sys, 50.0);
        let pt = partial_transpose(rho.matrix(), (4, 2), Subsystem::Second).unwrap();
        let pt_state = DensityMatrix::physical(pt).unwrap();
        let spectrum_of_rho = hermitian_eigensystem(rho.matrix()).unwrap().values;
        let result = ppt_analyze(&pt_state, 1e-10).unwrap();
        for (a, b) in result.spectrum.iter().zip(spectrum_of_rho.iter()) {
            assert_close(*a, *b, 1e-10);
        }
    }

    #[test]
    fn outlook_state_is_physical_any_temperature() {
        let sys = SpinSystem::new(95e9, 1.45e6, -22.08e6);
        for t in [0.5, 4.0, 7.76, 50.0, 1000.0] {
            let rho = outlook_state(&sys, t);
            assert!(!rho.is_pseudo());
            assert_close(rho.trace(), 1.0, 1e-12);
            let eig = hermitian_eigensystem(rho.matrix()).unwrap();
            assert!(eig.values[0] >= -1e-12, "T={t}");
        }
        // Very hot: maximally mixed, trivially separable.
        let hot = outlook_state(&sys, 1e9);
        assert!(
            hot.matrix()
                .max_abs_diff(&ComplexMatrix::identity(8).scale_re(0.125))
                < 1e-8
        );
    }

    #[test]
    fn critical_temperature_values() {
        let ct = critical_temperature(95e9);
        assert_close(ct.threshold, 1.79963, 1e-5);
        // CODATA constants put the crossing at ~7.76 K, within the ±0.05 K
        // window around the published 7.73 K.
        assert_close(ct.t_q, 7.73, 0.05);
        // Linearity in the electron frequency.
        let ct_low = critical_temperature(9.5e9);
        assert_close(ct_low.t_q, ct.t_q / 10.0, 1e-9);
    }

    #[test]
    fn bisection_matches_closed_form() {
        let sys = SpinSystem::new(95e9, 1.45e6, -22.08e6);
        let ct = critical_temperature(sys.nu_s);
        let t_num = locate_tq_bisection(&sys, 1.0, 20.0, 1e-6).unwrap();
        assert!(
            (t_num - ct.t_q).abs() / ct.t_q < 1e-4,
            "bisection {t_num} vs closed form {}",
            ct.t_q
        );
        // λ_min straddles zero around T_q with the right signs.
        assert!(lambda_min(&sys, ct.t_q * 0.999) < 0.0);
        assert!(lambda_min(&sys, ct.t_q * 1.001) > 0.0);
        assert!(matches!(
            locate_tq_bisection(&sys, ct.t_q * 1.5, ct.t_q * 2.0, 1e-6),
            Err(EntanglementError::BadBracket(_, _))
        ));
    }

    #[test]
    fn verdicts_at_the_published_operating_points() {
        let x_band = SpinSystem::default();
        let separable = ppt_analyze(&outlook_state(&x_band, 50.0), 1e-10).unwrap();
        assert!(!separable.entangled);

        let w_band = SpinSystem::new(95e9, 1.45e6, -22.08e6);
        let entangled = ppt_analyze(&outlook_state(&w_band, 4.0), 1e-10).unwrap();
        assert!(entangled.entangled);
        assert!(entangled.negativity > 0.0);
    }

    #[test]
    fn verdict_is_two_sided_around_tq() {
        // 20 temperatures on each side of T_q·(1 ± 1e-3): entangled below,
        // separable above, with no exceptions.
        let sys = SpinSystem::new(95e9, 1.45e6, -22.08e6);
        let tq = critical_temperature(sys.nu_s).t_q;
        let below: Vec<f64> = (0..20)
            .map(|i| tq * (1.0 - 1e-3) * (0.3 + 0.7 * i as f64 / 19.0))
            .collect();
        let above: Vec<f64> = (0..20)
            .map(|i| tq * (1.0 + 1e-3) * (1.0 + 9.0 * i as f64 / 19.0))
            .collect();
        for (t, _, entangled) in ppt_temperature_scan(&sys, &below, 1e-10) {
            assert!(entangled, "T = {t} below T_q must be entangled");
        }
        for (t, _, entangled) in ppt_temperature_scan(&sys, &above, 1e-10) {
            assert!(!entangled, "T = {t} above T_q must be separable");
        }
    }

    #[test]
    fn lambda_min_is_monotone_near_crossing() {
        let sys = SpinSystem::new(95e9, 1.45e6, -22.08e6);
        let tq = critical_temperature(sys.nu_s).t_q;
        let temps: Vec<f64> = (0..21).map(|i| tq * (0.9 + 0.01 * i as f64)).collect();
        let scan = ppt_temperature_scan(&sys, &temps, 1e-10);
        for pair in scan.windows(2) {
            assert!(
                pair[0].1 < pair[1].1,
                "λ_min not increasing at {}",
                pair[0].0
            );
        }
    }
}
