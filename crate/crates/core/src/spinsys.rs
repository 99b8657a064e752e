//! Spin operators, first-order Hamiltonian, line positions and
//! transition-selective operators for the coupled S = 3/2, I = 1/2 system.
//!
//! Level labels follow the convention |1> = |+3/2,+1/2>, |2> = |+3/2,-1/2>,
//! ..., |8> = |-3/2,-1/2>: the electron projection decreases every two
//! levels, the nuclear projection alternates. All frequencies are stored in
//! Hz; angular frequencies only ever appear inside exponent computations.

use thiserror::Error;

use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("unsupported spin quantum number {0}; expected 1/2 or 3/2")]
    UnsupportedSpin(f64),
    #[error("levels ({0},{1}) are not an allowed nuclear transition; allowed pairs are (1,2), (3,4), (5,6), (7,8)")]
    DisallowedPair(usize, usize),
    #[error("unknown transition channel `{0}`")]
    UnknownChannel(String),
}

/// Physical parameters of the spin system. `nu_s`/`nu_i` are the electron and
/// nuclear Larmor frequencies and `hyperfine` the isotropic coupling, all in
/// Hz (the coupling is signed; the nitrogen default is negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSystem {
    pub nu_s: f64,
    pub nu_i: f64,
    pub hyperfine: f64,
}

/// Default electron Larmor frequency, Hz (X band).
pub const DEFAULT_NU_S_HZ: f64 = 9.5e9;
/// Default nuclear Larmor frequency, Hz (B = 340 mT).
pub const DEFAULT_NU_I_HZ: f64 = 1.45e6;
/// Default isotropic hyperfine coupling, Hz.
pub const DEFAULT_HYPERFINE_HZ: f64 = -22.08e6;

impl SpinSystem {
    pub fn new(nu_s: f64, nu_i: f64, hyperfine: f64) -> Self {
        Self {
            nu_s,
            nu_i,
            hyperfine,
        }
    }

    /// True when the first-order (secular) Hamiltonian is a good
    /// approximation: the electron Zeeman term must dominate both the
    /// hyperfine coupling and the nuclear Zeeman term by two orders of
    /// magnitude.
    pub fn first_order_valid(&self) -> bool {
        self.nu_s >= 100.0 * self.hyperfine.abs().max(self.nu_i.abs())
    }
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self::new(DEFAULT_NU_S_HZ, DEFAULT_NU_I_HZ, DEFAULT_HYPERFINE_HZ)
    }
}

/// Electron spin projection of a 1-based level index.
pub fn level_m_s(level: usize) -> f64 {
    debug_assert!((1..=8).contains(&level));
    1.5 - ((level - 1) / 2) as f64
}

/// Nuclear spin projection of a 1-based level index.
pub fn level_m_i(level: usize) -> f64 {
    debug_assert!((1..=8).contains(&level));
    0.5 - ((level - 1) % 2) as f64
}

/// 1-based level index of the state |m_S, m_I>.
pub fn level_index(m_s: f64, m_i: f64) -> usize {
    (2.0 * (1.5 - m_s) + (0.5 - m_i)) as usize + 1
}

/// One of the four allowed nuclear (Delta m_I = ±1) transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndorPair {
    P12,
    P34,
    P56,
    P78,
}

impl EndorPair {
    /// 1-based level pair (j, k) with j the m_I = +1/2 partner.
    pub fn levels(self) -> (usize, usize) {
        match self {
            EndorPair::P12 => (1, 2),
            EndorPair::P34 => (3, 4),
            EndorPair::P56 => (5, 6),
            EndorPair::P78 => (7, 8),
        }
    }

    pub fn from_levels(j: usize, k: usize) -> Result<Self, SpinError> {
        match (j, k) {
            (1, 2) => Ok(EndorPair::P12),
            (3, 4) => Ok(EndorPair::P34),
            (5, 6) => Ok(EndorPair::P56),
            (7, 8) => Ok(EndorPair::P78),
            _ => Err(SpinError::DisallowedPair(j, k)),
        }
    }
}

/// A driveable transition: one of the two degenerate electron-spin manifolds
/// (all three Delta m_S = ±1 transitions of a given m_I are excited
/// simultaneously) or a single nuclear transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    /// Electron manifold with m_I = +1/2 (levels 1, 3, 5, 7).
    EsrPlus,
    /// Electron manifold with m_I = -1/2 (levels 2, 4, 6, 8).
    EsrMinus,
    /// Nuclear transition between an allowed level pair.
    Endor(EndorPair),
}

impl Transition {
    /// 0-based level indices driven by the transition, in descending-m order.
    pub fn levels0(self) -> Vec<usize> {
        match self {
            Transition::EsrPlus => vec![0, 2, 4, 6],
            Transition::EsrMinus => vec![1, 3, 5, 7],
            Transition::Endor(pair) => {
                let (j, k) = pair.levels();
                vec![j - 1, k - 1]
            }
        }
    }

    /// Channel name used by the pulse-program text format.
    pub fn channel_name(self) -> &'static str {
        match self {
            Transition::EsrPlus => "esr+",
            Transition::EsrMinus => "esr-",
            Transition::Endor(EndorPair::P12) => "endor1-2",
            Transition::Endor(EndorPair::P34) => "endor3-4",
            Transition::Endor(EndorPair::P56) => "endor5-6",
            Transition::Endor(EndorPair::P78) => "endor7-8",
        }
    }

    pub fn from_channel_name(name: &str) -> Result<Self, SpinError> {
        match name {
            "esr+" => Ok(Transition::EsrPlus),
            "esr-" => Ok(Transition::EsrMinus),
            "endor1-2" => Ok(Transition::Endor(EndorPair::P12)),
            "endor3-4" => Ok(Transition::Endor(EndorPair::P34)),
            "endor5-6" => Ok(Transition::Endor(EndorPair::P56)),
            "endor7-8" => Ok(Transition::Endor(EndorPair::P78)),
            other => Err(SpinError::UnknownChannel(other.to_string())),
        }
    }
}

/// Standard angular-momentum matrices (Sx, Sy, Sz) for spin s, in the basis
/// |m> with m descending from +s to -s.
pub fn spin_operators(s: f64) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix), SpinError> {
    if s != 0.5 && s != 1.5 {
        return Err(SpinError::UnsupportedSpin(s));
    }
    let dim = (2.0 * s + 1.0) as usize;
    let m_of = |i: usize| s - i as f64;
    let mut sz = ComplexMatrix::zeros(dim);
    let mut sp = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        sz.set(i, i, C64::new(m_of(i), 0.0));
        if i + 1 < dim {
            // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; |m+1> sits one row up.
            let m = m_of(i + 1);
            let amp = (s * (s + 1.0) - m * (m + 1.0)).sqrt();
            sp.set(i, i + 1, C64::new(amp, 0.0));
        }
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm).scale_re(0.5);
    let sy = (&sp - &sm).scale(C64::new(0.0, -0.5));
    Ok((sx, sy, sz))
}

/// S_z ⊗ I_2 on the 8-level space.
pub fn electron_sz8() -> ComplexMatrix {
    let (_, _, sz) = spin_operators(1.5).expect("3/2 is supported");
    sz.kron(&ComplexMatrix::identity(2))
}

/// I_4 ⊗ I_z on the 8-level space.
pub fn nuclear_iz8() -> ComplexMatrix {
    let (_, _, iz) = spin_operators(0.5).expect("1/2 is supported");
    ComplexMatrix::identity(4).kron(&iz)
}

/// First-order (secular) Hamiltonian divided by Planck's constant, in Hz:
/// H/h = nu_S (Sz ⊗ 1) + nu_I (1 ⊗ Iz) + a (Sz ⊗ Iz). Diagonal in the Zeeman
/// product basis; its diagonal reproduces the closed-form level energies
/// nu_S m_S + nu_I m_I + a m_S m_I.
pub fn hamiltonian_first_order(sys: &SpinSystem) -> ComplexMatrix {
    let (_, _, sz) = spin_operators(1.5).expect("3/2 is supported");
    let (_, _, iz) = spin_operators(0.5).expect("1/2 is supported");
    let i2 = ComplexMatrix::identity(2);
    let i4 = ComplexMatrix::identity(4);
    let h_s = sz.kron(&i2).scale_re(sys.nu_s);
    let h_i = i4.kron(&iz).scale_re(sys.nu_i);
    let h_a = sz.kron(&iz).scale_re(sys.hyperfine);
    &(&h_s + &h_i) + &h_a
}

/// Full Hamiltonian divided by Planck's constant, including the transverse
/// hyperfine terms a (Sx⊗Ix + Sy⊗Iy). Provided for eigenvalue comparison
/// only; all pulse dynamics are defined in the first-order eigenbasis.
pub fn hamiltonian_full(sys: &SpinSystem) -> ComplexMatrix {
    let (sx, sy, sz) = spin_operators(1.5).expect("3/2 is supported");
    let (ix, iy, iz) = spin_operators(0.5).expect("1/2 is supported");
    let mut h = hamiltonian_first_order(&SpinSystem::new(sys.nu_s, sys.nu_i, 0.0));
    h = &h + &sx.kron(&ix).scale_re(sys.hyperfine);
    h = &h + &sy.kron(&iy).scale_re(sys.hyperfine);
    h = &h + &sz.kron(&iz).scale_re(sys.hyperfine);
    h
}

/// Closed-form first-order level energy in Hz for quantum numbers (m_S, m_I).
pub fn level_energy(sys: &SpinSystem, m_s: f64, m_i: f64) -> f64 {
    sys.nu_s * m_s + sys.nu_i * m_i + sys.hyperfine * m_s * m_i
}

/// The two first-order ESR line positions nu_S + a·m_I for m_I = ±1/2, Hz.
/// Each manifold's three transitions are degenerate in first order.
pub fn esr_lines(sys: &SpinSystem) -> [f64; 2] {
    [
        sys.nu_s + sys.hyperfine * 0.5,
        sys.nu_s - sys.hyperfine * 0.5,
    ]
}

/// The four ENDOR line positions |nu_I + a·m_S| for m_S = ±1/2, ±3/2, Hz,
/// sorted ascending.
pub fn endor_lines(sys: &SpinSystem) -> [f64; 4] {
    let mut lines = [
        (sys.nu_i + sys.hyperfine * 0.5).abs(),
        (sys.nu_i - sys.hyperfine * 0.5).abs(),
        (sys.nu_i + sys.hyperfine * 1.5).abs(),
        (sys.nu_i - sys.hyperfine * 1.5).abs(),
    ];
    lines.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lines
}

/// Fictitious transition operators (Fx, Fy, Fz) as 8x8 matrices.
#[derive(Debug, Clone)]
pub struct FictitiousOps {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
}

/// Build the fictitious operators for a transition.
///
/// An ENDOR pair gets spin-1/2 operators embedded in its 2x2 block. An ESR
/// manifold gets the full spin-3/2 operators embedded on its four levels,
/// because the three degenerate transitions can only be driven together.
pub fn fictitious_ops(t: Transition) -> FictitiousOps {
    let s = match t {
        Transition::Endor(_) => 0.5,
        _ => 1.5,
    };
    let (sx, sy, sz) = spin_operators(s).expect("supported spin");
    let levels = t.levels0();
    let embed = |small: &ComplexMatrix| {
        let mut big = ComplexMatrix::zeros(8);
        for (a, &la) in levels.iter().enumerate() {
            for (b, &lb) in levels.iter().enumerate() {
                big.set(la, lb, small.get(a, b));
            }
        }
        big
    };
    FictitiousOps {
        x: embed(&sx),
        y: embed(&sy),
        z: embed(&sz),
    }
}
