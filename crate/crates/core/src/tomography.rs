//! Measurement protocols: Rabi population readout, phase interferograms
//! (TPPI), the sin-α off-diagonal reconstruction, decoherence fitting,
//! initial-value reconstruction and the mean-square-deviation fidelity.
//!
//! The detector observable is the z-magnetization of one electron manifold,
//! normalized as S = -Tr{Fz ρ}/Tr{Fz²}; the leading minus sign makes the
//! printed interferogram values come out as 2/15 ± 3/20 directly.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fit::{fit_damped_cosine, linear_least_squares, DampedCosineFit, FitError};
use crate::sequence::{
    apply_pulse, detect_unitary_with, entangle, ideal_beta0, prepare_pseudo_pure,
    CoherenceDecayModel, DetectionTarget, Pulse,
};
use crate::spinsys::fictitious_ops;
use crate::states::{
    ideal_bell, pseudo_boltzmann, two_qubit_submatrix, BellState, DensityMatrix, Embedding,
    PseudoPureTarget,
};
use crate::Transition;

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error("Nyquist violation: 3ν1+ν2 = {combined:e} Hz needs dt < {limit:e} s")]
    NyquistViolation { combined: f64, limit: f64 },
    #[error("interferogram needs at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("line ratio {0} is outside the invertible range of the ε formula")]
    RatioOutOfRange(f64),
    #[error("reference amplitude must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("fidelity target has zero norm")]
    ZeroNormTarget,
    #[error("density matrices have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Detector signal S = -Tr{Fz ρ}/Tr{Fz²} on the manifold selected by the
/// detection target.
pub fn detector_signal(rho: &DensityMatrix, which: DetectionTarget) -> f64 {
    let fz = fictitious_ops(which.manifold()).z;
    let mut num = 0.0;
    let mut norm = 0.0;
    for i in 0..8 {
        num += (fz.get(i, i) * rho.matrix().get(i, i)).re;
        norm += fz.get(i, i).norm_sqr();
    }
    -num / norm
}

/// Uniform angle grid over [0, 2π) with `n` points, the natural grid for
/// Rabi amplitude extraction.
pub fn rabi_alphas(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Simulated Rabi trace: a variable-angle pulse on `driven`, read out as the
/// detector signal on `monitor`. Field inhomogeneity is modeled as a
/// Gaussian spread of the nominal angle (`damping_sigma` as a fraction of
/// the angle), averaged over a fixed quadrature grid so the result stays
/// deterministic.
pub fn rabi_trace(
    rho: &DensityMatrix,
    driven: Transition,
    monitor: DetectionTarget,
    alphas: &[f64],
    damping_sigma: Option<f64>,
) -> Vec<f64> {
    let signal_at = |angle: f64| -> f64 {
        let rotated = apply_pulse(rho, &Pulse::x(driven, angle));
        detector_signal(&rotated, monitor)
    };
    match damping_sigma {
        None => alphas.iter().map(|&a| signal_at(a)).collect(),
        Some(0.0) => alphas.iter().map(|&a| signal_at(a)).collect(),
        Some(sigma) => {
            // 33-node truncated Gaussian quadrature over ±4σ.
            const NODES: usize = 33;
            let mut weights = Vec::with_capacity(NODES);
            let mut offsets = Vec::with_capacity(NODES);
            let mut total = 0.0;
            for i in 0..NODES {
                let xi = -4.0 + 8.0 * i as f64 / (NODES - 1) as f64;
                let w = (-0.5 * xi * xi).exp();
                offsets.push(xi);
                weights.push(w);
                total += w;
            }
            alphas
                .iter()
                .map(|&a| {
                    offsets
                        .iter()
                        .zip(weights.iter())
                        .map(|(&xi, &w)| w * signal_at(a * (1.0 + sigma * xi)))
                        .sum::<f64>()
                        / total
                })
                .collect()
        }
    }
}

/// Rabi oscillation amplitude: the cos(α) Fourier coefficient of a trace
/// sampled on the uniform [0, 2π) grid.
pub fn rabi_amplitude(alphas: &[f64], signal: &[f64]) -> f64 {
    let n = alphas.len() as f64;
    2.0 / n
        * alphas
            .iter()
            .zip(signal.iter())
            .map(|(&a, &s)| s * a.cos())
            .sum::<f64>()
}

/// Closed-form Rabi amplitude of the 1-2 transition after the pseudo-pure
/// preparation with angles (α0, β0): -(9/80)·cos α0·(1 - cos β0).
pub fn expected_rabi_amplitude_p10_12(alpha0: f64, beta0: f64) -> f64 {
    -(9.0 / 80.0) * alpha0.cos() * (1.0 - beta0.cos())
}

/// Sampled phase interferogram with its virtual frequencies and time step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Interferogram {
    pub nu1: f64,
    pub nu2: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

fn check_nyquist(nu1: f64, nu2: f64, dt: f64, n: usize) -> Result<(), TomographyError> {
    if n < 8 {
        return Err(TomographyError::TooFewSamples(n));
    }
    let combined = 3.0 * nu1 + nu2;
    if dt <= 0.0 || combined >= 0.5 / dt {
        return Err(TomographyError::NyquistViolation {
            combined,
            limit: 0.5 / combined,
        });
    }
    Ok(())
}

/// Phase interferogram with explicit detection angles: sample n applies the
/// detection unitary with phases φ1 = 2π ν1 n dt, φ2 = 2π ν2 n dt and
/// records the detector signal. The same β is used here as in the
/// preparation sequence (one amplitude, one pulse width).
#[allow(clippy::too_many_arguments)]
pub fn interferogram_with_angles(
    prep: &DensityMatrix,
    which: DetectionTarget,
    nu1: f64,
    nu2: f64,
    dt: f64,
    n: usize,
    alpha: f64,
    beta: f64,
) -> Result<Interferogram, TomographyError> {
    check_nyquist(nu1, nu2, dt, n)?;
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let u = detect_unitary_with(which, TAU * nu1 * t, TAU * nu2 * t, alpha, beta);
            detector_signal(&prep.conjugated(&u), which)
        })
        .collect();
    Ok(Interferogram {
        nu1,
        nu2,
        dt,
        samples,
    })
}

/// Phase interferogram with the ideal detection angles α = π/2, β = π.
pub fn interferogram(
    prep: &DensityMatrix,
    which: DetectionTarget,
    nu1: f64,
    nu2: f64,
    dt: f64,
    n: usize,
) -> Result<Interferogram, TomographyError> {
    interferogram_with_angles(prep, which, nu1, nu2, dt, n, FRAC_PI_2, PI)
}

/// One-sided power spectrum of an interferogram: mean removed, direct-sum
/// DFT, |X_k|² for k = 0..N/2 at frequencies k/(N·dt).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    n_samples: usize,
}

pub fn power_spectrum(g: &Interferogram) -> PowerSpectrum {
    let n = g.samples.len();
    let mean = g.samples.iter().sum::<f64>() / n as f64;
    let n_bins = n / 2 + 1;
    let mut frequencies = Vec::with_capacity(n_bins);
    let mut power = Vec::with_capacity(n_bins);
    for k in 0..n_bins {
        let mut re = 0.0;
        let mut im = 0.0;
        for (idx, &s) in g.samples.iter().enumerate() {
            let phase = TAU * k as f64 * idx as f64 / n as f64;
            let v = s - mean;
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        frequencies.push(k as f64 / (n as f64 * g.dt));
        power.push(re * re + im * im);
    }
    PowerSpectrum {
        frequencies,
        power,
        n_samples: n,
    }
}

impl PowerSpectrum {
    /// Cosine amplitude at the bin nearest `freq` (2|X_k|/N), valid for
    /// bin-centered tones away from DC and Nyquist.
    pub fn amplitude_at(&self, freq: f64) -> f64 {
        let k = self.nearest_bin(freq);
        2.0 * self.power[k].sqrt() / self.n_samples as f64
    }

    pub fn nearest_bin(&self, freq: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (k, &f) in self.frequencies.iter().enumerate() {
            let d = (f - freq).abs();
            if d < dist {
                dist = d;
                best = k;
            }
        }
        best
    }

    /// Frequency and power of the strongest non-DC bin.
    pub fn dominant_peak(&self) -> (f64, f64) {
        let mut best = 1;
        for k in 2..self.power.len() {
            if self.power[k] > self.power[best] {
                best = k;
            }
        }
        (self.frequencies[best], self.power[best])
    }
}

/// Invert the artifact-line ratio A(2ν1∓ν2)/A(3ν1∓ν2) ≈ 24ε²/(16-21ε²)
/// for |ε|. The formula is second order in ε and invertible for |ε| ≤ 0.5.
pub fn epsilon_from_line_ratio(amp_2nu: f64, amp_3nu: f64) -> Result<f64, TomographyError> {
    if amp_3nu <= 0.0 {
        return Err(TomographyError::NonPositiveReference(amp_3nu));
    }
    let ratio = amp_2nu / amp_3nu;
    if ratio < 0.0 {
        return Err(TomographyError::RatioOutOfRange(ratio));
    }
    let eps = 4.0 * (ratio / (24.0 + 21.0 * ratio)).sqrt();
    if eps > 0.5 {
        return Err(TomographyError::RatioOutOfRange(ratio));
    }
    Ok(eps)
}

/// Forward form of the artifact-line ratio.
pub fn line_ratio_from_epsilon(eps: f64) -> f64 {
    24.0 * eps * eps / (16.0 - 21.0 * eps * eps)
}

/// Coefficients of the sin-α tomography signal
/// S = B0 + A1 cos α - A2 sin φ1 + A3 sin α sin(2φ1∓φ2) - A4 sin α cos(3φ1∓φ2),
/// with the upper sign for Ψ detection and the lower for Φ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SinAlphaFit {
    pub b0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a4_sigma: f64,
    pub rms_residual: f64,
}

/// Fit the five-term sin-α model to (α, φ1, signal) samples at fixed φ2.
pub fn sin_alpha_fit_for(
    which: DetectionTarget,
    data: &[(f64, f64, f64)],
    phi2: f64,
) -> Result<SinAlphaFit, TomographyError> {
    let sign = match which {
        DetectionTarget::Psi => -1.0,
        DetectionTarget::Phi => 1.0,
    };
    let mut design = Vec::with_capacity(5 * data.len());
    let mut y = Vec::with_capacity(data.len());
    for &(alpha, phi1, signal) in data {
        design.push(1.0);
        design.push(alpha.cos());
        design.push(-phi1.sin());
        design.push(alpha.sin() * (2.0 * phi1 + sign * phi2).sin());
        design.push(-alpha.sin() * (3.0 * phi1 + sign * phi2).cos());
        y.push(signal);
    }
    let fit = linear_least_squares(&design, &y, 5)?;
    Ok(SinAlphaFit {
        b0: fit.coeffs[0],
        a1: fit.coeffs[1],
        a2: fit.coeffs[2],
        a3: fit.coeffs[3],
        a4: fit.coeffs[4],
        a4_sigma: fit.coeff_sigmas[4],
        rms_residual: fit.rms_residual,
    })
}

/// Ψ-form sin-α fit (phase signature 3φ1-φ2).
pub fn sin_alpha_fit(data: &[(f64, f64, f64)], phi2: f64) -> Result<SinAlphaFit, TomographyError> {
    sin_alpha_fit_for(DetectionTarget::Psi, data, phi2)
}

/// Drive the sin-α protocol on a prepared state: sweep the detection pulse
/// angle α and phase φ1 at fixed φ2 (90° by default exposes the sin α
/// terms), with the same β as the preparation.
pub fn sin_alpha_protocol(
    prep: &DensityMatrix,
    which: DetectionTarget,
    beta: f64,
    alphas: &[f64],
    phi1s: &[f64],
    phi2: f64,
) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(alphas.len() * phi1s.len());
    for &alpha in alphas {
        for &phi1 in phi1s {
            let u = detect_unitary_with(which, phi1, phi2, alpha, beta);
            out.push((alpha, phi1, detector_signal(&prep.conjugated(&u), which)));
        }
    }
    out
}

/// Off-diagonal element from the fitted A4: r = -10 A4 / (3 cos³(ε/2)).
pub fn offdiag_from_a4(a4: f64, epsilon_beta: f64) -> f64 {
    -10.0 * a4 / (3.0 * (epsilon_beta / 2.0).cos().powi(3))
}

/// Closed-form A4 for a given off-diagonal element and pulse-angle error.
pub fn a4_from_offdiag(r: f64, epsilon_beta: f64) -> f64 {
    -0.3 * r * (epsilon_beta / 2.0).cos().powi(3)
}

/// Fit a TPPI-modulated decay A·cos(2π ν_mod t + φ)·e^{-t/T}.
pub fn decoherence_fit(
    times: &[f64],
    values: &[f64],
    nu_mod: f64,
) -> Result<DampedCosineFit, TomographyError> {
    Ok(fit_damped_cosine(times, values, nu_mod)?)
}

/// Undo exponential decay over the effective delay between preparation and
/// detection: r_initial = r_detected · exp(τ_eff/T).
pub fn reconstruct_initial(r_detected: f64, decay_time: f64, tau_eff: f64) -> f64 {
    r_detected * (tau_eff / decay_time).exp()
}

/// Mean-square-deviation fidelity F = 1 - Tr{(ρ_exp-ρ_th)²}/Tr{ρ_th²}.
pub fn fidelity(rho_exp: &DensityMatrix, rho_th: &DensityMatrix) -> Result<f64, TomographyError> {
    if rho_exp.dim() != rho_th.dim() {
        return Err(TomographyError::DimensionMismatch(
            rho_exp.dim(),
            rho_th.dim(),
        ));
    }
    let norm = rho_th.matrix().frobenius_norm().powi(2);
    if norm <= 1e-300 {
        return Err(TomographyError::ZeroNormTarget);
    }
    let diff = rho_exp.matrix() - rho_th.matrix();
    Ok(1.0 - diff.frobenius_norm().powi(2) / norm)
}

/// Add Gaussian noise of standard deviation `amplitude/snr` to a series;
/// deterministic for a fixed seed (Box-Muller over a seeded stream).
pub fn add_gaussian_noise(values: &mut [f64], sigma: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || {
        // 53-bit uniform in (0, 1].
        let bits = rng.next_u64() >> 11;
        (bits as f64 + 1.0) / (1u64 << 53) as f64
    };
    for v in values.iter_mut() {
        let u1 = uniform();
        let u2 = uniform();
        let z = (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos();
        *v += sigma * z;
    }
}

/// Imperfections and bookkeeping for the end-to-end tomography pipeline.
#[derive(Debug, Clone)]
pub struct TomographyConfig {
    pub which: BellState,
    /// Preparation angles; the defaults are the ideal arccos(-1/3) and π/2.
    pub beta0: f64,
    pub alpha0: f64,
    /// Entanglement/detection angles: β1 = π + ε_β and the nuclear α1.
    pub beta1: f64,
    pub alpha1: f64,
    pub decay: CoherenceDecayModel,
    /// Delay between preparation and tomography, seconds.
    pub tau: f64,
    /// Width of the soft electron π pulse, seconds.
    pub esr_pulse_width: f64,
    /// Interferogram settings.
    pub nu1: f64,
    pub nu2: f64,
    pub dt: f64,
    pub n_samples: usize,
    /// sin-α grids.
    pub n_alpha: usize,
    pub n_phi1: usize,
    /// Decoherence scan settings (TPPI frequencies and delay grid).
    pub decay_nu1: f64,
    pub decay_nu2: f64,
    pub n_delays: usize,
    pub delay_step: f64,
    /// Optional measurement noise: (signal-to-noise ratio, seed).
    pub noise: Option<(f64, u64)>,
}

impl TomographyConfig {
    pub fn ideal(which: BellState) -> Self {
        Self {
            which,
            beta0: ideal_beta0(),
            alpha0: FRAC_PI_2,
            beta1: PI,
            alpha1: FRAC_PI_2,
            decay: CoherenceDecayModel {
                t_psi: f64::INFINITY,
                t_phi: f64::INFINITY,
                t_diag: f64::INFINITY,
                ..Default::default()
            },
            tau: 0.0,
            esr_pulse_width: 0.0,
            nu1: 2.5e6,
            nu2: 1.0e6,
            dt: 10e-9,
            n_samples: 400,
            n_alpha: 12,
            n_phi1: 24,
            decay_nu1: 8.0e6,
            decay_nu2: 4.0e6,
            n_delays: 300,
            delay_step: 2e-9,
            noise: None,
        }
    }

    /// Experimentally calibrated imperfections: ε_β = 0.23, α1 = 87.4°, the
    /// measured decay times, τ = 40 ns and an 88 ns electron π pulse.
    pub fn experimental(which: BellState) -> Self {
        Self {
            beta1: PI + 0.23,
            alpha1: 87.4f64.to_radians(),
            decay: CoherenceDecayModel::default(),
            tau: 40e-9,
            esr_pulse_width: 88e-9,
            ..Self::ideal(which)
        }
    }

    fn target(&self) -> PseudoPureTarget {
        if self.which.is_psi() {
            PseudoPureTarget::P10
        } else {
            PseudoPureTarget::P11
        }
    }

    fn detection(&self) -> DetectionTarget {
        DetectionTarget::for_bell(self.which)
    }

    /// TPPI modulation frequency of the entangled coherence: 3ν1-ν2 for Ψ,
    /// 3ν1+ν2 for Φ.
    pub fn signature_frequency(&self, nu1: f64, nu2: f64) -> f64 {
        if self.which.is_psi() {
            3.0 * nu1 - nu2
        } else {
            3.0 * nu1 + nu2
        }
    }

    /// Artifact-line frequency 2ν1∓ν2.
    pub fn artifact_frequency(&self, nu1: f64, nu2: f64) -> f64 {
        if self.which.is_psi() {
            2.0 * nu1 - nu2
        } else {
            2.0 * nu1 + nu2
        }
    }
}

/// One reconstructed off-diagonal element.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OffDiagonal {
    /// 1-based level indices.
    pub levels: (usize, usize),
    pub detected: f64,
    pub reconstructed: f64,
    pub sigma: f64,
}

/// Full tomography result for one Bell state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomographyReport {
    pub bell_state: String,
    pub diagonal: Vec<f64>,
    pub offdiag: Vec<OffDiagonal>,
    pub epsilon_beta: f64,
    pub alpha1_rad: f64,
    pub decoherence_time_s: f64,
    pub decoherence_time_sigma_s: f64,
    pub fidelity: f64,
    pub fidelity_two_qubit: f64,
}

impl TomographyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Prepare the configured Bell state from the pseudo-Boltzmann matrix with
/// the configured angle errors; phase-cycled variant flips the sign of the
/// nuclear preparation pulse.
fn prepare_state(cfg: &TomographyConfig, flip_alpha1: bool) -> DensityMatrix {
    let rho_p = pseudo_boltzmann();
    let pseudo_pure = prepare_pseudo_pure(&rho_p, cfg.target(), cfg.beta0, cfg.alpha0);
    let alpha1 = if flip_alpha1 { -cfg.alpha1 } else { cfg.alpha1 };
    entangle(&pseudo_pure, cfg.which, alpha1, cfg.beta1).state
}

/// Simulate the TPPI-modulated decay of the entangled coherence: for each
/// delay the state is freshly prepared, decays, and is detected with phases
/// φ_i = 2π ν_i t. Phase cycling (±α1 preparation pulses) removes the
/// population background, leaving the pure modulated decay.
pub fn simulate_decay_series(
    cfg: &TomographyConfig,
    nu1: f64,
    nu2: f64,
    delays: &[f64],
) -> Vec<f64> {
    let plus = prepare_state(cfg, false);
    let minus = prepare_state(cfg, true);
    let which = cfg.detection();
    let mut series: Vec<f64> = delays
        .iter()
        .map(|&t| {
            let u = detect_unitary_with(which, TAU * nu1 * t, TAU * nu2 * t, FRAC_PI_2, cfg.beta1);
            let s_plus = detector_signal(&cfg.decay.apply(&plus, t).conjugated(&u), which);
            let s_minus = detector_signal(&cfg.decay.apply(&minus, t).conjugated(&u), which);
            0.5 * (s_plus - s_minus)
        })
        .collect();
    if let Some((snr, seed)) = cfg.noise {
        let amp = series.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        add_gaussian_noise(&mut series, amp / snr, seed);
    }
    series
}

/// Run the full tomography pipeline: diagonal readout, interferogram ε_β
/// extraction, sin-α off-diagonal reconstruction, decoherence fit,
/// initial-value reconstruction and fidelity against the ideal target.
pub fn run_tomography(cfg: &TomographyConfig) -> Result<TomographyReport, TomographyError> {
    let which = cfg.detection();
    let prepared = prepare_state(cfg, false);
    let tau_eff = cfg.decay.effective_delay(cfg.tau, &[cfg.esr_pulse_width]);
    let at_detection = cfg.decay.apply(&prepared, tau_eff);

    // Populations; the α1 estimate comes from the population difference of
    // the coherence levels (cos α1 up to even powers of ε_β).
    let diagonal = at_detection.diagonal();
    let (lo, hi) = cfg.which.coherence_levels();
    let alpha1_rad = (diagonal[hi - 1] - diagonal[lo - 1])
        .clamp(-1.0, 1.0)
        .acos();

    // ε_β from the interferogram artifact-line ratio.
    let gram = interferogram_with_angles(
        &at_detection,
        which,
        cfg.nu1,
        cfg.nu2,
        cfg.dt,
        cfg.n_samples,
        FRAC_PI_2,
        cfg.beta1,
    )?;
    let spectrum = power_spectrum(&gram);
    let amp_main = spectrum.amplitude_at(cfg.signature_frequency(cfg.nu1, cfg.nu2));
    let amp_artifact = spectrum.amplitude_at(cfg.artifact_frequency(cfg.nu1, cfg.nu2));
    let epsilon_beta = match epsilon_from_line_ratio(amp_artifact, amp_main) {
        Ok(eps) => eps,
        // An ideal pulse has no artifact line; ratio inversion stays at 0.
        Err(TomographyError::RatioOutOfRange(_)) => 0.0,
        Err(e) => return Err(e),
    };

    // Off-diagonal element through the sin-α protocol.
    let alphas = rabi_alphas(cfg.n_alpha);
    let phi1s: Vec<f64> = (0..cfg.n_phi1)
        .map(|k| TAU * k as f64 / cfg.n_phi1 as f64)
        .collect();
    let data = sin_alpha_protocol(&at_detection, which, cfg.beta1, &alphas, &phi1s, FRAC_PI_2);
    let fit = sin_alpha_fit_for(which, &data, FRAC_PI_2)?;
    let r_detected = offdiag_from_a4(fit.a4, epsilon_beta);
    let r_sigma = (10.0 * fit.a4_sigma / (3.0 * (epsilon_beta / 2.0).cos().powi(3))).abs();

    // Decoherence time from the TPPI-modulated delay scan.
    let delays: Vec<f64> = (0..cfg.n_delays)
        .map(|k| k as f64 * cfg.delay_step)
        .collect();
    let series = simulate_decay_series(cfg, cfg.decay_nu1, cfg.decay_nu2, &delays);
    let nu_mod = cfg.signature_frequency(cfg.decay_nu1, cfg.decay_nu2);
    let decay_fit = decoherence_fit(&delays, &series, nu_mod)?;
    let decayed_finitely = decay_fit.decay_time.is_finite() && !decay_fit.exceeds_span;

    let r_initial = if decayed_finitely {
        reconstruct_initial(r_detected, decay_fit.decay_time, tau_eff)
    } else {
        r_detected
    };

    // Reconstructed matrix: measured diagonal plus the entangled coherence.
    let mut m = crate::linalg::ComplexMatrix::zeros(8);
    for (i, &p) in diagonal.iter().enumerate() {
        m.set(i, i, crate::linalg::C64::new(p, 0.0));
    }
    m.set(lo - 1, hi - 1, crate::linalg::C64::new(r_initial, 0.0));
    m.set(hi - 1, lo - 1, crate::linalg::C64::new(r_initial, 0.0));
    let reconstructed = DensityMatrix::pseudo(m).expect("reconstruction is Hermitian");

    let ideal = ideal_bell(cfg.which, Embedding::EightLevel);
    let fid = fidelity(&reconstructed, &ideal)?;
    let fid2 = fidelity(
        &two_qubit_submatrix(&reconstructed).expect("8x8 state"),
        &ideal_bell(cfg.which, Embedding::TwoQubit),
    )?;

    Ok(TomographyReport {
        bell_state: cfg.which.name().to_string(),
        diagonal,
        offdiag: vec![OffDiagonal {
            levels: (lo, hi),
            detected: r_detected,
            reconstructed: r_initial,
            sigma: r_sigma,
        }],
        epsilon_beta,
        alpha1_rad,
        decoherence_time_s: decay_fit.decay_time,
        decoherence_time_sigma_s: decay_fit.decay_time_sigma,
        fidelity: fid,
        fidelity_two_qubit: fid2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::dephase;
    use crate::states::ideal_pseudo_pure;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn flat_trace_for_maximally_mixed_state() {
        let rho =
            DensityMatrix::physical(crate::linalg::ComplexMatrix::identity(8).scale_re(0.125))
                .unwrap();
        let alphas = rabi_alphas(32);
        let trace = rabi_trace(
            &rho,
            Transition::EsrMinus,
            DetectionTarget::Psi,
            &alphas,
            None,
        );
        assert!(trace.iter().all(|s| s.abs() < 1e-12));
        assert!(rabi_amplitude(&alphas, &trace).abs() < 1e-12);
    }

    #[test]
    fn boltzmann_calibration_amplitude_is_half() {
        let rho = pseudo_boltzmann();
        let alphas = rabi_alphas(64);
        let trace = rabi_trace(
            &rho,
            Transition::EsrMinus,
            DetectionTarget::Psi,
            &alphas,
            None,
        );
        assert_close(rabi_amplitude(&alphas, &trace), 0.5, 1e-12);
    }

    #[test]
    fn inversion_level_shows_in_amplitude_ratio() {
        // After the β0 pulse the ESR Rabi amplitude drops to cos β0 of the
        // calibration value.
        let beta0 = (-0.329f64).acos();
        let rho = dephase(
            &apply_pulse(&pseudo_boltzmann(), &Pulse::y(Transition::EsrMinus, beta0)),
            crate::sequence::Dephase::All,
        );
        let alphas = rabi_alphas(64);
        let trace = rabi_trace(
            &rho,
            Transition::EsrMinus,
            DetectionTarget::Psi,
            &alphas,
            None,
        );
        let ratio = rabi_amplitude(&alphas, &trace) / 0.5;
        assert_close(ratio, -0.329, 1e-10);
    }

    #[test]
    fn rabi_amplitude_formula_matches_simulation() {
        for (alpha0, beta0) in [
            (1.55f64, ideal_beta0()),
            (1.2, 1.9),
            (0.4, 2.4),
            (FRAC_PI_2, ideal_beta0()),
        ] {
            let prep =
                prepare_pseudo_pure(&pseudo_boltzmann(), PseudoPureTarget::P10, beta0, alpha0);
            let alphas = rabi_alphas(64);
            let trace = rabi_trace(
                &prep,
                Transition::Endor(crate::spinsys::EndorPair::P12),
                DetectionTarget::Psi,
                &alphas,
                None,
            );
            let measured = rabi_amplitude(&alphas, &trace);
            let expected = expected_rabi_amplitude_p10_12(alpha0, beta0);
            assert_close(measured, expected, 1e-10);
        }
        // Spot values from the closed form itself.
        assert_close(
            expected_rabi_amplitude_p10_12(FRAC_PI_2, ideal_beta0()),
            0.0,
            1e-15,
        );
        assert_close(
            expected_rabi_amplitude_p10_12(1.55, ideal_beta0()),
            -0.00312,
            2e-5,
        );
        assert_close(expected_rabi_amplitude_p10_12(1.0, 0.0), 0.0, 1e-15);
    }

    #[test]
    fn damped_trace_attenuates_amplitude() {
        let rho = pseudo_boltzmann();
        let alphas = rabi_alphas(64);
        let clean = rabi_trace(
            &rho,
            Transition::EsrMinus,
            DetectionTarget::Psi,
            &alphas,
            None,
        );
        let damped = rabi_trace(
            &rho,
            Transition::EsrMinus,
            DetectionTarget::Psi,
            &alphas,
            Some(0.05),
        );
        let a_clean = rabi_amplitude(&alphas, &clean);
        let a_damped = rabi_amplitude(&alphas, &damped);
        assert!(a_damped < a_clean);
        assert!(a_damped > 0.8 * a_clean);
    }

    #[test]
    fn detection_law_on_ideal_bell_states() {
        // S = 2/15 ± 3/20 cos(3φ1∓φ2) over a phase grid.
        for which in [
            BellState::PsiPlus,
            BellState::PsiMinus,
            BellState::PhiPlus,
            BellState::PhiMinus,
        ] {
            let rho = ideal_bell(which, Embedding::EightLevel);
            let det = DetectionTarget::for_bell(which);
            for i in 0..8 {
                for j in 0..8 {
                    let phi1 = TAU * i as f64 / 8.0;
                    let phi2 = TAU * j as f64 / 8.0;
                    let u = crate::sequence::detect_unitary(det, phi1, phi2);
                    let s = detector_signal(&rho.conjugated(&u), det);
                    let carrier = if which.is_psi() {
                        3.0 * phi1 - phi2
                    } else {
                        3.0 * phi1 + phi2
                    };
                    let expect = 2.0 / 15.0 + which.sign() * 0.15 * carrier.cos();
                    assert_close(s, expect, 1e-10);
                }
            }
        }
    }

    #[test]
    fn interferogram_single_tone_and_zero_sample() {
        let rho = ideal_bell(BellState::PsiPlus, Embedding::EightLevel);
        let gram = interferogram(&rho, DetectionTarget::Psi, 2.5e6, 1.0e6, 10e-9, 400).unwrap();
        // n = 0: 2/15 + 3/20 = 17/60.
        assert_close(gram.samples[0], 17.0 / 60.0, 1e-12);
        let minus = ideal_bell(BellState::PsiMinus, Embedding::EightLevel);
        let gram_minus =
            interferogram(&minus, DetectionTarget::Psi, 2.5e6, 1.0e6, 10e-9, 400).unwrap();
        assert_close(gram_minus.samples[0], -1.0 / 60.0, 1e-12);
        // Every sample follows the closed form.
        for (n, &s) in gram.samples.iter().enumerate() {
            let t = n as f64 * 10e-9;
            let expect = 2.0 / 15.0 + 0.15 * (TAU * 6.5e6 * t).cos();
            assert_close(s, expect, 1e-10);
        }
        // Single-bin spectrum at 3ν1-ν2 = 6.5 MHz.
        let spec = power_spectrum(&gram);
        let (freq, peak) = spec.dominant_peak();
        assert_close(freq, 6.5e6, 1.0);
        for (k, &p) in spec.power.iter().enumerate() {
            if (spec.frequencies[k] - 6.5e6).abs() > 1.0 {
                assert!(p / peak < 1e-20, "leak at {}", spec.frequencies[k]);
            }
        }
        // Amplitude recovery: 3/20.
        assert_close(spec.amplitude_at(6.5e6), 0.15, 1e-10);
    }

    #[test]
    fn interferogram_rejects_bad_sampling() {
        let rho = ideal_bell(BellState::PsiPlus, Embedding::EightLevel);
        assert!(matches!(
            interferogram(&rho, DetectionTarget::Psi, 2.5e6, 1.0e6, 10e-9, 4),
            Err(TomographyError::TooFewSamples(4))
        ));
        assert!(matches!(
            interferogram(&rho, DetectionTarget::Psi, 30e6, 20e6, 10e-9, 64),
            Err(TomographyError::NyquistViolation { .. })
        ));
    }

    #[test]
    fn power_spectrum_matches_direct_dft_oracle() {
        for n in [256usize, 1024] {
            power_spectrum_oracle_case(n);
        }
        // Constant signal: all bins vanish after mean removal.
        let flat = Interferogram {
            nu1: 0.0,
            nu2: 0.0,
            dt: 5e-9,
            samples: vec![0.37; 64],
        };
        assert!(power_spectrum(&flat).power.iter().all(|&p| p < 1e-20));
    }

    fn power_spectrum_oracle_case(n: usize) {
        // Multi-tone synthetic signal checked against an independent O(N²)
        // DFT evaluation (different summation arrangement).
        let dt = 5e-9;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                0.7 + 0.4 * (TAU * 3.90625e6 * t).cos() + 0.1 * (TAU * 7.8125e6 * t + 0.4).cos()
            })
            .collect();
        let gram = Interferogram {
            nu1: 0.0,
            nu2: 0.0,
            dt,
            samples: samples.clone(),
        };
        let spec = power_spectrum(&gram);
        let mean: f64 = samples.iter().sum::<f64>() / n as f64;
        for (k, &p) in spec.power.iter().enumerate() {
            let mut re = 0.0;
            let mut im = 0.0;
            for (idx, &s) in samples.iter().enumerate() {
                let ang = -TAU * (k * idx) as f64 / n as f64;
                re += (s - mean) * ang.cos();
                im += (s - mean) * ang.sin();
            }
            let oracle = re * re + im * im;
            assert!(
                (p - oracle).abs() <= 1e-10 * oracle.max(1.0),
                "N={n} bin {k}: {p} vs {oracle}"
            );
        }
    }

    #[test]
    fn epsilon_ratio_round_trip() {
        assert_close(epsilon_from_line_ratio(0.0, 1.0).unwrap(), 0.0, 1e-15);
        let ratio = line_ratio_from_epsilon(0.23);
        assert_close(ratio, 0.0853, 2e-4);
        assert_close(epsilon_from_line_ratio(ratio, 1.0).unwrap(), 0.23, 1e-6);
        for eps in [0.05, 0.1, 0.2, 0.3, 0.4] {
            let r = line_ratio_from_epsilon(eps);
            assert_close(epsilon_from_line_ratio(r, 1.0).unwrap(), eps, 1e-9);
        }
        assert!(epsilon_from_line_ratio(0.7, 1.0).is_err());
        assert!(epsilon_from_line_ratio(0.1, 0.0).is_err());
    }

    #[test]
    fn sin_alpha_fit_exact_on_synthetic_data() {
        let (b0, a1, a2, a3, a4) = (0.13, -0.07, 0.02, 0.011, 0.0912);
        let phi2 = FRAC_PI_2;
        let mut data = Vec::new();
        for i in 0..12 {
            for j in 0..16 {
                let alpha = TAU * i as f64 / 12.0;
                let phi1 = TAU * j as f64 / 16.0;
                let s = b0 + a1 * alpha.cos() - a2 * phi1.sin()
                    + a3 * alpha.sin() * (2.0 * phi1 - phi2).sin()
                    - a4 * alpha.sin() * (3.0 * phi1 - phi2).cos();
                data.push((alpha, phi1, s));
            }
        }
        let fit = sin_alpha_fit(&data, phi2).unwrap();
        assert_close(fit.b0, b0, 1e-10);
        assert_close(fit.a1, a1, 1e-10);
        assert_close(fit.a2, a2, 1e-10);
        assert_close(fit.a3, a3, 1e-10);
        assert_close(fit.a4, a4, 1e-10);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn sin_alpha_fit_recovers_within_3_sigma_under_noise() {
        let (b0, a1, a2, a3, a4) = (0.13, -0.07, 0.02, 0.011, 0.0912);
        let phi2 = FRAC_PI_2;
        let sigma = 0.002;
        let mut signals = Vec::new();
        let mut grid = Vec::new();
        for i in 0..16 {
            for j in 0..24 {
                let alpha = TAU * i as f64 / 16.0;
                let phi1 = TAU * j as f64 / 24.0;
                grid.push((alpha, phi1));
                signals.push(
                    b0 + a1 * alpha.cos() - a2 * phi1.sin()
                        + a3 * alpha.sin() * (2.0 * phi1 - phi2).sin()
                        - a4 * alpha.sin() * (3.0 * phi1 - phi2).cos(),
                );
            }
        }
        add_gaussian_noise(&mut signals, sigma, 3);
        let data: Vec<(f64, f64, f64)> = grid
            .iter()
            .zip(signals.iter())
            .map(|(&(alpha, phi1), &s)| (alpha, phi1, s))
            .collect();
        let fit = sin_alpha_fit(&data, phi2).unwrap();
        for (got, want) in [
            (fit.b0, b0),
            (fit.a1, a1),
            (fit.a2, a2),
            (fit.a3, a3),
            (fit.a4, a4),
        ] {
            // 3σ window with σ the per-coefficient propagated noise; the
            // design is near-orthogonal so all sigmas are ~σ/√N.
            let bound = 3.0 * sigma / (data.len() as f64).sqrt() * 2.5;
            assert!(
                (got - want).abs() < bound,
                "{got} vs {want} (bound {bound})"
            );
        }
        assert!((fit.a4 - a4).abs() < 3.0 * fit.a4_sigma.max(1e-12));
    }

    #[test]
    fn sin_alpha_fit_rejects_degenerate_grid() {
        // A single α value cannot separate B0 from A1 cos α.
        let data: Vec<(f64, f64, f64)> =
            (0..20).map(|j| (0.0, TAU * j as f64 / 20.0, 1.0)).collect();
        assert!(sin_alpha_fit(&data, FRAC_PI_2).is_err());
    }

    #[test]
    fn offdiag_from_a4_reference_values() {
        // A4 = 0.0912, ε = 0.23 → r = -0.31.
        assert_close(offdiag_from_a4(0.0912, 0.23), -0.31, 2e-3);
        // ε = 0 → r = -10 A4/3.
        assert_close(offdiag_from_a4(0.3, 0.0), -1.0, 1e-12);
        // Forward-then-invert at the theoretical value -0.49.
        let a4 = a4_from_offdiag(-0.49, 0.23);
        assert_close(offdiag_from_a4(a4, 0.23), -0.49, 1e-12);
    }

    #[test]
    fn reconstruct_initial_values() {
        assert_close(reconstruct_initial(-0.31, 208e-9, 0.0), -0.31, 1e-15);
        assert_close(reconstruct_initial(-0.31, 208e-9, 63e-9), -0.42, 0.01);
        assert_close(reconstruct_initial(-0.33, 210e-9, 60.2e-9), -0.44, 0.01);
    }

    #[test]
    fn fidelity_on_printed_experimental_matrix() {
        // The published Ψ- two-qubit matrix against the ideal projector.
        let mut m = crate::linalg::ComplexMatrix::from_real_diag(&[-0.01, 0.47, 0.52, 0.02]);
        m.set(1, 2, crate::linalg::C64::new(-0.42, 0.0));
        m.set(2, 1, crate::linalg::C64::new(-0.42, 0.0));
        let rho_exp = DensityMatrix::pseudo(m).unwrap();
        let rho_th = ideal_bell(BellState::PsiMinus, Embedding::TwoQubit);
        let f = fidelity(&rho_exp, &rho_th).unwrap();
        assert_close(f, 0.9854, 2e-3);
        // Identical inputs give exactly 1.
        assert_close(fidelity(&rho_th, &rho_th).unwrap(), 1.0, 1e-15);
    }

    #[test]
    fn fidelity_error_cases() {
        let zero = DensityMatrix::pseudo(crate::linalg::ComplexMatrix::zeros(4)).unwrap();
        let rho = ideal_bell(BellState::PsiMinus, Embedding::TwoQubit);
        assert!(matches!(
            fidelity(&rho, &zero),
            Err(TomographyError::ZeroNormTarget)
        ));
        let rho8 = ideal_bell(BellState::PsiMinus, Embedding::EightLevel);
        assert!(matches!(
            fidelity(&rho8, &rho),
            Err(TomographyError::DimensionMismatch(8, 4))
        ));
    }

    #[test]
    fn ideal_pipeline_reports_unit_fidelity() {
        let report = run_tomography(&TomographyConfig::ideal(BellState::PsiPlus)).unwrap();
        assert_close(report.fidelity, 1.0, 1e-6);
        assert_close(report.fidelity_two_qubit, 1.0, 1e-6);
        assert_close(report.epsilon_beta, 0.0, 1e-6);
        assert_close(report.alpha1_rad, FRAC_PI_2, 1e-6);
        assert_close(report.offdiag[0].reconstructed, 0.5, 1e-6);
        // Ideal pseudo-pure diagonal after the ideal sequence.
        let expect = ideal_bell(BellState::PsiPlus, Embedding::EightLevel);
        for (got, want) in report.diagonal.iter().zip(expect.diagonal().iter()) {
            assert_close(*got, *want, 1e-9);
        }
        let _ = ideal_pseudo_pure(PseudoPureTarget::P10);
    }

    #[test]
    fn noise_injection_is_deterministic() {
        let mut a = vec![0.0; 64];
        let mut b = vec![0.0; 64];
        add_gaussian_noise(&mut a, 0.1, 7);
        add_gaussian_noise(&mut b, 0.1, 7);
        assert_eq!(a, b);
        let mut c = vec![0.0; 64];
        add_gaussian_noise(&mut c, 0.1, 8);
        assert_ne!(a, c);
    }
}
