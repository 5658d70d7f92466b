//! Configuration-specific Hamiltonians, pulse unitaries and their
//! compositions, plus the basis transforms each configuration needs.
//!
//! The rotating-frame pulse operators are the primitives here; nothing
//! integrates a lab-frame Hamiltonian in time. Resonant pulses rotate
//! populations, dispersive pulses imprint level-dependent phases, and
//! the three level layouts (non-degenerate, Λ, Ξ) compose them into the
//! group orbits the tomography module integrates over.

use num_complex::Complex64;

use crate::linalg::{expi_hermitian, CMat, CVec};
use crate::su3::{collective_operator, su2_triple, BasisIndexMap, OccupationState};
use crate::wigner::{Su2Euler, Su3Euler};
use crate::{Error, Result};

use std::f64::consts::PI;

/// The four knobs of the non-degenerate pulse sequence:
/// dispersive phases φ23, φ12 and resonant areas β23, β12.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PulseParams {
    pub phi23: f64,
    pub beta23: f64,
    pub phi12: f64,
    pub beta12: f64,
}

impl PulseParams {
    pub fn new(phi23: f64, beta23: f64, phi12: f64, beta12: f64) -> Self {
        Self { phi23, beta23, phi12, beta12 }
    }
}

/// Level layout of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigKind {
    NonDegenerate,
    Lambda,
    Xi,
}

impl ConfigKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConfigKind::NonDegenerate => "nondeg",
            ConfigKind::Lambda => "lambda",
            ConfigKind::Xi => "xi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nondeg" => Some(ConfigKind::NonDegenerate),
            "lambda" => Some(ConfigKind::Lambda),
            "xi" => Some(ConfigKind::Xi),
            _ => None,
        }
    }
}

impl std::fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Resonant pulse exp[-iβ (S_ij + S_ji)] on the chosen transition.
pub fn resonant_pulse(basis: &BasisIndexMap, pair: (usize, usize), beta: f64) -> CMat {
    assert!(pair == (1, 2) || pair == (2, 3), "driven pairs are (1,2) and (2,3)");
    let h = collective_operator(basis, pair.0, pair.1) + collective_operator(basis, pair.1, pair.0);
    expi_hermitian(&h, beta)
}

/// Dispersive pulse exp[+iφ S_ll] on level 1 or 3.
pub fn dispersive_pulse(basis: &BasisIndexMap, level: usize, phi: f64) -> CMat {
    assert!(level == 1 || level == 3, "dispersive drives act on level 1 or 3");
    let h = collective_operator(basis, level, level);
    expi_hermitian(&h, -phi)
}

/// The non-degenerate probe sequence
/// U(τ) = U33(-φ23) · U23(β23) · U11(φ12) · U12(β12).
pub fn nondeg_sequence(basis: &BasisIndexMap, tau: &PulseParams) -> CMat {
    dispersive_pulse(basis, 3, -tau.phi23)
        * resonant_pulse(basis, (2, 3), tau.beta23)
        * dispersive_pulse(basis, 1, tau.phi12)
        * resonant_pulse(basis, (1, 2), tau.beta12)
}

/// Global phase by which the sequence differs from its unimodular
/// part: U(τ) = phase · Ū(τ) with det Ū = 1 on the A-atom space.
pub fn nondeg_global_phase(a: u32, tau: &PulseParams) -> Complex64 {
    Complex64::from_polar(1.0, a as f64 * (tau.phi12 - tau.phi23) / 3.0)
}

fn rem_range(x: f64, range: f64) -> f64 {
    x.rem_euclid(range)
}

/// Euler angles of the unimodular part of the pulse sequence:
/// Ū(τ) = R23(α1,β1,γ1)·R12(α2,β2,α2)·R23(α3,0,0).
///
/// Phase angles are reduced into their ranges (an exact symmetry of the
/// factorization); the β's are twice the pulse areas and stay as-is.
pub fn tau_to_euler(tau: &PulseParams) -> Su3Euler {
    let PulseParams { phi23, beta23, phi12, beta12 } = *tau;
    Su3Euler::new(
        rem_range(-phi23 - 0.5 * PI, 4.0 * PI),
        2.0 * beta23,
        rem_range(1.5 * PI + (2.0 * phi12 + phi23) / 3.0, 4.0 * PI),
        rem_range(-(2.0 * phi12 + phi23) / 3.0, 2.0 * PI),
        2.0 * beta12,
        rem_range(-(4.0 * phi12 + 2.0 * phi23) / 3.0 - PI, 4.0 * PI),
        0.0,
        0.0,
    )
}

/// The mode-1/2 mixing transform: columns are the dressed basis states
/// |ñ1 ñ2 ñ3⟩ expressed over occupations. Realized as the second
/// quantization exp[(π/4)(S12 - S21)] of the single-particle rotation,
/// which reproduces the printed single-atom matrix exactly.
pub fn lambda_t12(basis: &BasisIndexMap) -> CMat {
    let gen = collective_operator(basis, 1, 2) - collective_operator(basis, 2, 1);
    // exp(θ(S12 - S21)) = exp(-iθ·[i(S12 - S21)]) with a Hermitian bracket
    let h = gen * Complex64::new(0.0, 1.0);
    expi_hermitian(&h, PI / 4.0)
}

/// Interaction Hamiltonian of the Λ layout:
/// Δ S33 + g (S13 + S23 + S31 + S32).
pub fn lambda_hamiltonian(basis: &BasisIndexMap, delta: f64, g: f64) -> CMat {
    collective_operator(basis, 3, 3).scale(delta)
        + (collective_operator(basis, 1, 3)
            + collective_operator(basis, 2, 3)
            + collective_operator(basis, 3, 1)
            + collective_operator(basis, 3, 2))
        .scale(g)
}

/// Resonant Λ pulse in the dressed basis, exp[+iθ (S23 + S32)]; θ is
/// the accumulated area √2·g·t.
pub fn lambda_resonant(basis: &BasisIndexMap, theta: f64) -> CMat {
    let h = collective_operator(basis, 2, 3) + collective_operator(basis, 3, 2);
    expi_hermitian(&h, -theta)
}

/// Dispersive Λ pulse in the dressed basis, exp[+iφ (S22 - S33)].
pub fn lambda_dispersive(basis: &BasisIndexMap, phi: f64) -> CMat {
    let h = collective_operator(basis, 2, 2) - collective_operator(basis, 3, 3);
    expi_hermitian(&h, -phi)
}

/// General Λ pulse sequence: the z-y-z rotation of the dressed (2,3)
/// doublet modes, acting on the whole A-atom space (in dressed-basis
/// coordinates). Every block of fixed ñ1 is invariant.
pub fn lambda_pulse_sequence(basis: &BasisIndexMap, angles: &Su2Euler) -> CMat {
    let (jz, jp, jm) = su2_triple(basis, (2, 3));
    crate::wigner::su2_rotation(&jz, &jp, &jm, angles)
        .expect("collective operators satisfy the su(2) relations")
}

/// The so(3) triple hidden in the Ξ layout:
/// Lz = S11 - S33, Lx = (S12+S21+S23+S32)/√2, L- = √2 (S21 + S32).
pub fn xi_generators(basis: &BasisIndexMap) -> (CMat, CMat, CMat) {
    let lz = collective_operator(basis, 1, 1) - collective_operator(basis, 3, 3);
    let lx = (collective_operator(basis, 1, 2)
        + collective_operator(basis, 2, 1)
        + collective_operator(basis, 2, 3)
        + collective_operator(basis, 3, 2))
    .scale(1.0 / 2.0_f64.sqrt());
    let lminus =
        (collective_operator(basis, 2, 1) + collective_operator(basis, 3, 2)).scale(2.0_f64.sqrt());
    (lz, lx, lminus)
}

/// Rotating-frame Hamiltonian of the Ξ layout:
/// Δ (S33 - S11) + g (S12 + S32 + S21 + S23) = -Δ Lz + √2 g Lx.
pub fn xi_hamiltonian(basis: &BasisIndexMap, delta: f64, g: f64) -> CMat {
    (collective_operator(basis, 3, 3) - collective_operator(basis, 1, 1)).scale(delta)
        + (collective_operator(basis, 1, 2)
            + collective_operator(basis, 3, 2)
            + collective_operator(basis, 2, 1)
            + collective_operator(basis, 2, 3))
        .scale(g)
}

/// General Ξ pulse sequence: a z-y-z SO(3) rotation built on the
/// hidden angular-momentum triple; acts irreducibly inside each
/// fixed-L block of the occupational space.
pub fn xi_pulse_sequence(basis: &BasisIndexMap, angles: &Su2Euler) -> CMat {
    let (lz, _, lminus) = xi_generators(basis);
    let lplus = lminus.adjoint();
    crate::wigner::su2_rotation(&lz, &lplus, &lminus, angles)
        .expect("the so(3) triple satisfies the su(2) relations")
}

/// Angular momentum label of a Ξ basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LmLabel {
    pub l: u32,
    pub m: i32,
}

/// Valid L values for ensemble size A: A, A-2, ... down to 1 or 0.
pub fn lm_ls(a: u32) -> Vec<u32> {
    let mut ls = Vec::new();
    let mut l = a as i32;
    while l >= 0 {
        ls.push(l as u32);
        l -= 2;
    }
    ls
}

/// All |L M⟩ labels in the fixed display order: L descending from A,
/// M descending inside each block.
pub fn lm_labels(a: u32) -> Vec<LmLabel> {
    let mut out = Vec::new();
    for l in lm_ls(a) {
        for k in 0..=(2 * l) {
            out.push(LmLabel { l, m: l as i32 - k as i32 });
        }
    }
    out
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// The angular-momentum basis state |L M⟩ as a normalized vector over
/// occupations, from the closed polynomial form
///
/// ```text
/// |LM⟩ ∝ ((a2†)² - 2 a1† a3†)^{(A-L)/2}
///        Σ_p (a1†)^p (a2†)^{L+M-2p} (a3†)^{p-M} / (2^p p! (p-M)! (L+M-p)!) |0⟩.
/// ```
///
/// The vector is re-normalized numerically and its Lz and L²
/// eigenrelations are asserted, so a misprinted prefactor cannot leak
/// through.
pub fn lm_state(basis: &BasisIndexMap, l: u32, m: i32) -> Result<CVec> {
    let a = basis.a();
    if !lm_ls(a).contains(&l) || m.abs() > l as i32 {
        return Err(Error::InvalidLm { a, l: l as i32, m });
    }
    let q = ((a - l) / 2) as i64;
    let li = l as i64;
    let mi = m as i64;

    // monomial coefficients on (a1†)^x (a2†)^y (a3†)^z
    let mut mono: std::collections::HashMap<(i64, i64, i64), f64> = std::collections::HashMap::new();
    for p in 0.max(mi)..=((li + mi) / 2) {
        let denom = 2.0_f64.powi(p as i32) * factorial(p) * factorial(p - mi) * factorial(li + mi - 2 * p);
        let base = 1.0 / denom;
        // ((a2†)² - 2 a1† a3†)^q expanded binomially
        for k in 0..=q {
            let binom = factorial(q) / (factorial(k) * factorial(q - k));
            let coeff = base * binom * (-2.0_f64).powi(k as i32);
            let x = p + k;
            let y = li + mi - 2 * p + 2 * (q - k);
            let z = p - mi + k;
            *mono.entry((x, y, z)).or_insert(0.0) += coeff;
        }
    }

    let mut v = CVec::zeros(basis.len());
    for ((x, y, z), c) in mono {
        let state = OccupationState::new(x as u32, y as u32, z as u32);
        let idx = basis.index_of(&state).expect("monomial has A quanta");
        // (a1†)^x (a2†)^y (a3†)^z |0⟩ = √(x! y! z!) |xyz⟩
        v[idx] += Complex64::new(c * (factorial(x) * factorial(y) * factorial(z)).sqrt(), 0.0);
    }
    let norm = v.norm();
    assert!(norm > 1e-12, "closed form must give a nonzero vector");
    v /= Complex64::new(norm, 0.0);

    #[cfg(debug_assertions)]
    {
        let (lz, _, lminus) = xi_generators(basis);
        let lplus = lminus.adjoint();
        let lsq = &lz * &lz + (&lplus * &lminus + &lminus * &lplus).scale(0.5);
        let dz = (&lz * &v - &v * Complex64::new(m as f64, 0.0)).norm();
        let dc = (&lsq * &v - &v * Complex64::new((l * (l + 1)) as f64, 0.0)).norm();
        debug_assert!(dz < 1e-10 && dc < 1e-10, "eigenrelations must hold");
    }
    Ok(v)
}

/// Unitary whose columns are the |L M⟩ states in [`lm_labels`] order —
/// the occupational → angular-momentum change of basis.
pub fn lm_basis_matrix(basis: &BasisIndexMap) -> (CMat, Vec<LmLabel>) {
    let labels = lm_labels(basis.a());
    let mut m = CMat::zeros(basis.len(), labels.len());
    for (col, lab) in labels.iter().enumerate() {
        m.set_column(col, &lm_state(basis, lab.l, lab.m).expect("labels are valid"));
    }
    (m, labels)
}
