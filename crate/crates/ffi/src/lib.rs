//! C ABI for the spin-dynamics and tomography library.
//!
//! Conventions: every function returns an [`StStatus`] code; results come
//! back through out-pointers. Heap objects are opaque handles released with
//! their matching `_free` function; strings returned by the library are
//! released with [`st_string_free`]. Matrix indices are 0-based here (the
//! library's 1-based level labels minus one). Null out-pointers are
//! rejected, never dereferenced.

#![allow(clippy::missing_safety_doc)] // pointer contract documented in the module docs

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spintomo::entanglement::{critical_temperature, outlook_state, ppt_analyze};
use spintomo::program::parse_program;
use spintomo::sequence::run_sequence;
use spintomo::states::{
    boltzmann, ideal_bell, ideal_pseudo_pure, pseudo_boltzmann, two_qubit_submatrix, BellState,
    BoltzmannMode, DensityMatrix, Embedding, PseudoPureTarget, ThermalParams,
};
use spintomo::tomography::{fidelity, run_tomography, TomographyConfig};
use spintomo::SpinSystem;

/// Status code of every C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was out of range or otherwise invalid.
    InvalidArgument = 2,
    /// Text input could not be parsed.
    ParseError = 3,
    /// A numerical routine failed.
    NumericalError = 4,
    /// A string argument was not valid UTF-8.
    Utf8Error = 5,
    /// The call panicked internally; the handle state is unchanged.
    InternalError = 6,
}

/// Bell-state selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StBell {
    PsiPlus = 0,
    PsiMinus = 1,
    PhiPlus = 2,
    PhiMinus = 3,
}

impl From<StBell> for BellState {
    fn from(b: StBell) -> Self {
        match b {
            StBell::PsiPlus => BellState::PsiPlus,
            StBell::PsiMinus => BellState::PsiMinus,
            StBell::PhiPlus => BellState::PhiPlus,
            StBell::PhiMinus => BellState::PhiMinus,
        }
    }
}

/// Opaque spin-system handle.
pub struct StSpinSystem(SpinSystem);

/// Opaque density-matrix handle.
pub struct StDensityMatrix(DensityMatrix);

/// Readable name of a status code (static storage, do not free).
#[no_mangle]
pub extern "C" fn st_status_name(status: StStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        StStatus::Ok => b"ok\0",
        StStatus::NullArgument => b"null argument\0",
        StStatus::InvalidArgument => b"invalid argument\0",
        StStatus::ParseError => b"parse error\0",
        StStatus::NumericalError => b"numerical error\0",
        StStatus::Utf8Error => b"invalid utf-8\0",
        StStatus::InternalError => b"internal error\0",
    };
    name.as_ptr() as *const c_char
}

fn guarded(f: impl FnOnce() -> StStatus) -> StStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => StStatus::InternalError,
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> StStatus {
    if out.is_null() {
        return StStatus::NullArgument;
    }
    unsafe { out.write(value) };
    StStatus::Ok
}

unsafe fn borrow<'a, T>(ptr: *const T) -> Result<&'a T, StStatus> {
    unsafe { ptr.as_ref() }.ok_or(StStatus::NullArgument)
}

/// Create a spin system from the electron and nuclear Larmor frequencies and
/// the signed hyperfine coupling, all in Hz.
#[no_mangle]
pub unsafe extern "C" fn st_spin_system_new(
    nu_s: f64,
    nu_i: f64,
    hyperfine: f64,
    out: *mut *mut StSpinSystem,
) -> StStatus {
    guarded(|| {
        if !nu_s.is_finite() || !nu_i.is_finite() || !hyperfine.is_finite() || nu_s <= 0.0 {
            return StStatus::InvalidArgument;
        }
        let handle = Box::new(StSpinSystem(SpinSystem::new(nu_s, nu_i, hyperfine)));
        unsafe { write_out(out, Box::into_raw(handle)) }
    })
}

/// Create the default nitrogen-in-fullerene spin system.
#[no_mangle]
pub unsafe extern "C" fn st_spin_system_default(out: *mut *mut StSpinSystem) -> StStatus {
    guarded(|| unsafe {
        write_out(
            out,
            Box::into_raw(Box::new(StSpinSystem(SpinSystem::default()))),
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_spin_system_free(sys: *mut StSpinSystem) {
    if !sys.is_null() {
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// The two first-order ESR line positions in Hz, written to `out[0..2]`.
#[no_mangle]
pub unsafe extern "C" fn st_esr_lines(sys: *const StSpinSystem, out: *mut f64) -> StStatus {
    guarded(|| {
        let sys = match unsafe { borrow(sys) } {
            Ok(s) => s,
            Err(e) => return e,
        };
        if out.is_null() {
            return StStatus::NullArgument;
        }
        let lines = spintomo::spinsys::esr_lines(&sys.0);
        unsafe { ptr::copy_nonoverlapping(lines.as_ptr(), out, 2) };
        StStatus::Ok
    })
}

/// The four ENDOR line positions in Hz ascending, written to `out[0..4]`.
#[no_mangle]
pub unsafe extern "C" fn st_endor_lines(sys: *const StSpinSystem, out: *mut f64) -> StStatus {
    guarded(|| {
        let sys = match unsafe { borrow(sys) } {
            Ok(s) => s,
            Err(e) => return e,
        };
        if out.is_null() {
            return StStatus::NullArgument;
        }
        let lines = spintomo::spinsys::endor_lines(&sys.0);
        unsafe { ptr::copy_nonoverlapping(lines.as_ptr(), out, 4) };
        StStatus::Ok
    })
}

/// Closed-form quantum critical temperature in K for an electron frequency
/// in Hz.
#[no_mangle]
pub unsafe extern "C" fn st_critical_temperature(nu_s: f64, out: *mut f64) -> StStatus {
    guarded(|| {
        if nu_s.is_nan() || nu_s <= 0.0 || !nu_s.is_finite() {
            return StStatus::InvalidArgument;
        }
        unsafe { write_out(out, critical_temperature(nu_s).t_q) }
    })
}

fn new_matrix(out: *mut *mut StDensityMatrix, value: DensityMatrix) -> StStatus {
    unsafe { write_out(out, Box::into_raw(Box::new(StDensityMatrix(value)))) }
}

/// The pseudo-Boltzmann matrix, the starting point of every preparation.
#[no_mangle]
pub unsafe extern "C" fn st_pseudo_boltzmann(out: *mut *mut StDensityMatrix) -> StStatus {
    guarded(|| new_matrix(out, pseudo_boltzmann()))
}

/// Thermal state at `temperature` K; `exact` selects the exact exponential
/// over the high-temperature linearization.
#[no_mangle]
pub unsafe extern "C" fn st_boltzmann(
    sys: *const StSpinSystem,
    temperature: f64,
    exact: c_int,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        let sys = match unsafe { borrow(sys) } {
            Ok(s) => s,
            Err(e) => return e,
        };
        if temperature.is_nan() || temperature <= 0.0 || !temperature.is_finite() {
            return StStatus::InvalidArgument;
        }
        let mode = if exact != 0 {
            BoltzmannMode::Exact
        } else {
            BoltzmannMode::HighTemperature
        };
        new_matrix(
            out,
            boltzmann(&sys.0, &ThermalParams::new(temperature), mode),
        )
    })
}

/// Ideal pseudo-pure matrix; `target` is 10 or 11.
#[no_mangle]
pub unsafe extern "C" fn st_ideal_pseudo_pure(
    target: c_int,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        let target = match target {
            10 => PseudoPureTarget::P10,
            11 => PseudoPureTarget::P11,
            _ => return StStatus::InvalidArgument,
        };
        new_matrix(out, ideal_pseudo_pure(target))
    })
}

/// Ideal Bell matrix; `eight_level` zero gives the 4x4 two-qubit form.
#[no_mangle]
pub unsafe extern "C" fn st_ideal_bell(
    which: StBell,
    eight_level: c_int,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        let embedding = if eight_level != 0 {
            Embedding::EightLevel
        } else {
            Embedding::TwoQubit
        };
        new_matrix(out, ideal_bell(which.into(), embedding))
    })
}

/// Run the pseudo-pure preparation sequence (`target` 10 or 11) with the
/// given pulse angles in radians.
#[no_mangle]
pub unsafe extern "C" fn st_prepare_pseudo_pure(
    start: *const StDensityMatrix,
    target: c_int,
    beta0: f64,
    alpha0: f64,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        let start = match unsafe { borrow(start) } {
            Ok(s) => s,
            Err(e) => return e,
        };
        let target = match target {
            10 => PseudoPureTarget::P10,
            11 => PseudoPureTarget::P11,
            _ => return StStatus::InvalidArgument,
        };
        if start.0.dim() != 8 || !beta0.is_finite() || !alpha0.is_finite() {
            return StStatus::InvalidArgument;
        }
        new_matrix(
            out,
            spintomo::sequence::prepare_pseudo_pure(&start.0, target, beta0, alpha0),
        )
    })
}

/// Run the entanglement sequence. `mismatch`, when non-null, receives 1 if
/// the start state does not look like the expected pseudo-pure state.
#[no_mangle]
pub unsafe extern "C" fn st_entangle(
    start: *const StDensityMatrix,
    which: StBell,
    alpha1: f64,
    beta1: f64,
    out: *mut *mut StDensityMatrix,
    mismatch: *mut c_int,
) -> StStatus {
    guarded(|| {
        let start = match unsafe { borrow(start) } {
            Ok(s) => s,
            Err(e) => return e,
        };
        if start.0.dim() != 8 || !alpha1.is_finite() || !beta1.is_finite() {
            return StStatus::InvalidArgument;
        }
        let outcome = spintomo::sequence::entangle(&start.0, which.into(), alpha1, beta1);
        if !mismatch.is_null() {
            unsafe { mismatch.write(outcome.start_mismatch as c_int) };
        }
        new_matrix(out, outcome.state)
    })
}

/// The thermally prepared entanglement-protocol state at `temperature` K.
#[no_mangle]
pub unsafe extern "C" fn st_outlook_state(
    sys: *const StSpinSystem,
    temperature: f64,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        let sys = match unsafe { borrow(sys) } {
            Ok(s) => s,
            Err(e) => return e,
        };
        if temperature.is_nan() || temperature <= 0.0 || !temperature.is_finite() {
            return StStatus::InvalidArgument;
        }
        new_matrix(out, outlook_state(&sys.0, temperature))
    })
}

/// Parse a pulse program and run it from `initial` (the pseudo-Boltzmann
/// matrix when `initial` is null), without decoherence.
#[no_mangle]
pub unsafe extern "C" fn st_run_program(
    text: *const c_char,
    initial: *const StDensityMatrix,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        if text.is_null() {
            return StStatus::NullArgument;
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => return StStatus::Utf8Error,
        };
        let program = match parse_program(text) {
            Ok(p) => p,
            Err(_) => return StStatus::ParseError,
        };
        let start = if initial.is_null() {
            pseudo_boltzmann()
        } else {
            unsafe { &*initial }.0.clone()
        };
        if start.dim() != 8 {
            return StStatus::InvalidArgument;
        }
        let run = run_sequence(&start, &program.steps, None);
        new_matrix(out, run.final_state)
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_density_matrix_free(m: *mut StDensityMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Matrix dimension (4 or 8).
#[no_mangle]
pub unsafe extern "C" fn st_density_matrix_dim(
    m: *const StDensityMatrix,
    out: *mut usize,
) -> StStatus {
    guarded(|| {
        let m = match unsafe { borrow(m) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        unsafe { write_out(out, m.0.dim()) }
    })
}

/// One matrix entry by 0-based row and column.
#[no_mangle]
pub unsafe extern "C" fn st_density_matrix_get(
    m: *const StDensityMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> StStatus {
    guarded(|| {
        let m = match unsafe { borrow(m) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        if row >= m.0.dim() || col >= m.0.dim() {
            return StStatus::InvalidArgument;
        }
        if re.is_null() || im.is_null() {
            return StStatus::NullArgument;
        }
        let z = m.0.matrix().get(row, col);
        unsafe {
            re.write(z.re);
            im.write(z.im);
        }
        StStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_density_matrix_trace(
    m: *const StDensityMatrix,
    out: *mut f64,
) -> StStatus {
    guarded(|| {
        let m = match unsafe { borrow(m) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        unsafe { write_out(out, m.0.trace()) }
    })
}

/// Extract the 4x4 two-qubit submatrix of an 8x8 state.
#[no_mangle]
pub unsafe extern "C" fn st_two_qubit_submatrix(
    m: *const StDensityMatrix,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        let m = match unsafe { borrow(m) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        match two_qubit_submatrix(&m.0) {
            Ok(sub) => new_matrix(out, sub),
            Err(_) => StStatus::InvalidArgument,
        }
    })
}

/// Serialize a matrix to its JSON text form. Free with `st_string_free`.
#[no_mangle]
pub unsafe extern "C" fn st_density_matrix_to_json(
    m: *const StDensityMatrix,
    out: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        let m = match unsafe { borrow(m) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        let text = CString::new(m.0.to_json()).expect("JSON has no interior NUL");
        unsafe { write_out(out, text.into_raw()) }
    })
}

/// Parse a matrix from its JSON text form.
#[no_mangle]
pub unsafe extern "C" fn st_density_matrix_from_json(
    text: *const c_char,
    out: *mut *mut StDensityMatrix,
) -> StStatus {
    guarded(|| {
        if text.is_null() {
            return StStatus::NullArgument;
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => return StStatus::Utf8Error,
        };
        match DensityMatrix::from_json(text) {
            Ok(m) => new_matrix(out, m),
            Err(_) => StStatus::ParseError,
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Mean-square-deviation fidelity of `exp` against `th`.
#[no_mangle]
pub unsafe extern "C" fn st_fidelity(
    exp: *const StDensityMatrix,
    th: *const StDensityMatrix,
    out: *mut f64,
) -> StStatus {
    guarded(|| {
        let exp = match unsafe { borrow(exp) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        let th = match unsafe { borrow(th) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        match fidelity(&exp.0, &th.0) {
            Ok(f) => unsafe { write_out(out, f) },
            Err(_) => StStatus::InvalidArgument,
        }
    })
}

/// Partial-transpose test on the nuclear spin. `spectrum`, when non-null,
/// receives the eight ascending eigenvalues.
#[no_mangle]
pub unsafe extern "C" fn st_ppt_analyze(
    rho: *const StDensityMatrix,
    tolerance: f64,
    min_eigenvalue: *mut f64,
    negativity: *mut f64,
    entangled: *mut c_int,
    spectrum: *mut f64,
) -> StStatus {
    guarded(|| {
        let rho = match unsafe { borrow(rho) } {
            Ok(v) => v,
            Err(e) => return e,
        };
        let result = match ppt_analyze(&rho.0, tolerance) {
            Ok(r) => r,
            Err(_) => return StStatus::InvalidArgument,
        };
        if !min_eigenvalue.is_null() {
            unsafe { min_eigenvalue.write(result.min_eigenvalue) };
        }
        if !negativity.is_null() {
            unsafe { negativity.write(result.negativity) };
        }
        if !entangled.is_null() {
            unsafe { entangled.write(result.entangled as c_int) };
        }
        if !spectrum.is_null() {
            unsafe { ptr::copy_nonoverlapping(result.spectrum.as_ptr(), spectrum, 8) };
        }
        StStatus::Ok
    })
}

/// Run the full tomography pipeline with the given imperfections and return
/// the report as JSON text. Free with `st_string_free`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn st_run_tomography(
    which: StBell,
    eps_beta: f64,
    alpha1: f64,
    t_psi: f64,
    t_phi: f64,
    tau: f64,
    esr_pulse_width: f64,
    out_json: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        if ![eps_beta, alpha1, t_psi, t_phi, tau, esr_pulse_width]
            .iter()
            .all(|v| v.is_finite() || v.is_infinite())
            || t_psi <= 0.0
            || t_phi <= 0.0
            || tau < 0.0
            || esr_pulse_width < 0.0
        {
            return StStatus::InvalidArgument;
        }
        let which: BellState = which.into();
        let mut cfg = TomographyConfig::ideal(which);
        cfg.beta1 = std::f64::consts::PI + eps_beta;
        cfg.alpha1 = alpha1;
        cfg.decay.t_psi = t_psi;
        cfg.decay.t_phi = t_phi;
        cfg.tau = tau;
        cfg.esr_pulse_width = esr_pulse_width;
        match run_tomography(&cfg) {
            Ok(report) => {
                let text = CString::new(report.to_json()).expect("JSON has no interior NUL");
                unsafe { write_out(out_json, text.into_raw()) }
            }
            Err(_) => StStatus::NumericalError,
        }
    })
}
