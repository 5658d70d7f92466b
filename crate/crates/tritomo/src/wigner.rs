//! SU(2) and SU(3) Wigner D-functions, the invariant measure, and exact
//! quadrature grids for group integration.
//!
//! One rotation convention serves the whole crate: z-y-z Euler angles
//! with every factor of the form exp(-i·angle·generator). An SU(3)
//! element factorizes through two su(2) subalgebras,
//!
//! ```text
//! U(Ω) = R23(α1,β1,γ1) · R12(α2,β2,α2) · R23(α3,β3,γ3)
//! ```
//!
//! (the middle factor repeats α2 by construction), and D-functions are
//! matrix elements of these products. Rotations are evaluated by
//! diagonalizing the Hermitian generators, never from closed-form
//! matrix element formulas, except for the standard spin small-d sum
//! which is validated against exponentiation in the tests.

use num_complex::Complex64;

use crate::linalg::{commutator, max_abs, CMat, CVec};
use crate::quad::{gauss_legendre, gauss_weight_u, uniform_periodic, Rule1d};
use crate::su3::BasisIndexMap;
use crate::{Error, Result};

use std::f64::consts::PI;

/// z-y-z Euler angles of an SU(2) element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su2Euler {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Su2Euler {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

/// The eight angles of the factorized SU(3) element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su3Euler {
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub alpha3: f64,
    pub beta3: f64,
    pub gamma3: f64,
}

impl Su3Euler {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha1: f64,
        beta1: f64,
        gamma1: f64,
        alpha2: f64,
        beta2: f64,
        alpha3: f64,
        beta3: f64,
        gamma3: f64,
    ) -> Self {
        Self { alpha1, beta1, gamma1, alpha2, beta2, alpha3, beta3, gamma3 }
    }

    pub fn as_array(&self) -> [f64; 8] {
        [
            self.alpha1, self.beta1, self.gamma1, self.alpha2, self.beta2, self.alpha3,
            self.beta3, self.gamma3,
        ]
    }
}

/// Total parameter volume of the SU(3) grid, 1024 π⁵.
pub fn su3_volume() -> f64 {
    1024.0 * PI.powi(5)
}

/// Total parameter volume of the SU(2)/SO(3) grid, 8 π².
pub fn su2_volume() -> f64 {
    8.0 * PI * PI
}

/// Density of the invariant measure at the given angles:
/// sin β1 · cos(β2/2) · sin³(β2/2) · sin β3.
pub fn invariant_measure_weight(angles: &Su3Euler) -> f64 {
    let half = 0.5 * angles.beta2;
    angles.beta1.sin() * half.cos() * half.sin().powi(3) * angles.beta3.sin()
}

fn check_su2_triple(jz: &CMat, jp: &CMat, jm: &CMat) -> Result<()> {
    let d1 = max_abs(&(commutator(jz, jp) - jp));
    let d2 = max_abs(&(commutator(jz, jm) + jm));
    let d3 = max_abs(&(commutator(jp, jm) - (jz + jz)));
    let defect = d1.max(d2).max(d3);
    if defect > 1e-12 {
        return Err(Error::BadSu2Generators(defect));
    }
    Ok(())
}

/// z-y-z rotation exp(-iα Jz)·exp(-iβ Jy)·exp(-iγ Jz) with
/// Jy = (J+ - J-)/2i, after validating the su(2) relations of the triple.
pub fn su2_rotation(jz: &CMat, jp: &CMat, jm: &CMat, angles: &Su2Euler) -> Result<CMat> {
    check_su2_triple(jz, jp, jm)?;
    let jy = (jp - jm).scale(0.5) * Complex64::new(0.0, -1.0);
    let u = crate::linalg::expi_hermitian(jz, angles.alpha)
        * crate::linalg::expi_hermitian(&jy, angles.beta)
        * crate::linalg::expi_hermitian(jz, angles.gamma);
    Ok(u)
}

// Exact through 18!; beyond that f64 folds in at most one rounding,
// far below what these sums carry anyway.
fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n as i64).map(|k| k as f64).product()
}

/// Wigner small-d by the standard sum formula, in doubled-integer spin
/// labels: d^I_{m,m'}(β) = ⟨I m| exp(-iβ Jy) |I m'⟩.
pub fn su2_small_d(two_i: i32, two_m: i32, two_mp: i32, beta: f64) -> Result<f64> {
    if two_i < 0
        || (two_i + two_m) % 2 != 0
        || (two_i + two_mp) % 2 != 0
        || two_m.abs() > two_i
        || two_mp.abs() > two_i
    {
        return Err(Error::SpinIntegrality { two_i, two_m, two_mp });
    }
    let ipm = (two_i + two_m) / 2;
    let imm = (two_i - two_m) / 2;
    let ipmp = (two_i + two_mp) / 2;
    let immp = (two_i - two_mp) / 2;
    let norm = (factorial(ipm) * factorial(imm) * factorial(ipmp) * factorial(immp)).sqrt();
    let (c, s) = ((0.5 * beta).cos(), (0.5 * beta).sin());
    let mmp = (two_m - two_mp) / 2;
    let mut sum = 0.0;
    for k in 0.max(-mmp)..=ipmp.min(imm) {
        let sign = if (mmp + k) % 2 == 0 { 1.0 } else { -1.0 };
        let denom =
            factorial(ipmp - k) * factorial(k) * factorial(mmp + k) * factorial(imm - k);
        sum += sign * c.powi(two_i - mmp - 2 * k) * s.powi(mmp + 2 * k) / denom;
    }
    Ok(norm * sum)
}

/// Full SU(2) D-function e^{-imα} d^I_{m,m'}(β) e^{-im'γ} in doubled
/// spin labels.
pub fn su2_d(two_i: i32, two_m: i32, two_mp: i32, angles: &Su2Euler) -> Result<Complex64> {
    let d = su2_small_d(two_i, two_m, two_mp, angles.beta)?;
    let phase = -0.5 * (two_m as f64 * angles.alpha + two_mp as f64 * angles.gamma);
    Ok(Complex64::from_polar(d, phase))
}

/// Which su(2) subalgebra a factor rotates: modes (1,2) or (2,3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    R12,
    R23,
}

/// Rotation machinery for one irrep: doubled Jz spectra of both
/// subalgebras (diagonal in a weight basis) plus the Jy generators.
///
/// Built once per irrep; every rotation and D-function evaluation
/// reuses it.
#[derive(Debug, Clone)]
pub struct RepRotations {
    dim: usize,
    two_m12: Vec<i32>,
    two_m23: Vec<i32>,
    jy12: CMat,
    jy23: CMat,
}

impl RepRotations {
    /// Build from a generator provider g(i, j) = matrix of S_ij.
    ///
    /// Both subalgebra triples are validated; the Jz's must be diagonal
    /// with (half-)integer spectrum, which holds in any weight basis.
    pub fn from_generators(dim: usize, g: &dyn Fn(usize, usize) -> CMat) -> Result<Self> {
        let triple12 = crate::su3::su2_triple_from(g, (1, 2));
        let triple23 = crate::su3::su2_triple_from(g, (2, 3));
        check_su2_triple(&triple12.0, &triple12.1, &triple12.2)?;
        check_su2_triple(&triple23.0, &triple23.1, &triple23.2)?;
        let spectrum = |jz: &CMat| -> Result<Vec<i32>> {
            let mut out = Vec::with_capacity(dim);
            for k in 0..dim {
                let v = jz[(k, k)];
                let doubled = (2.0 * v.re).round();
                if (2.0 * v.re - doubled).abs() > 1e-9 || v.im.abs() > 1e-12 {
                    return Err(Error::BadSu2Generators((2.0 * v.re - doubled).abs()));
                }
                out.push(doubled as i32);
            }
            let diag = CMat::from_diagonal(&CVec::from_iterator(
                dim,
                (0..dim).map(|k| jz[(k, k)]),
            ));
            let off = jz - diag;
            if max_abs(&off) > 1e-10 {
                return Err(Error::BadSu2Generators(max_abs(&off)));
            }
            Ok(out)
        };
        let two_m12 = spectrum(&triple12.0)?;
        let two_m23 = spectrum(&triple23.0)?;
        let to_jy = |jp: &CMat, jm: &CMat| (jp - jm).scale(0.5) * Complex64::new(0.0, -1.0);
        Ok(Self {
            dim,
            two_m12,
            two_m23,
            jy12: to_jy(&triple12.1, &triple12.2),
            jy23: to_jy(&triple23.1, &triple23.2),
        })
    }

    /// The occupational irrep of ensemble size A.
    pub fn occupational(basis: &BasisIndexMap) -> Self {
        let b = basis.clone();
        Self::from_generators(basis.len(), &move |i, j| {
            crate::su3::collective_operator(&b, i, j)
        })
        .expect("occupational generators satisfy the algebra")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn two_m12(&self) -> &[i32] {
        &self.two_m12
    }

    pub fn two_m23(&self) -> &[i32] {
        &self.two_m23
    }

    fn doubled_for(&self, kind: FactorKind) -> &[i32] {
        match kind {
            FactorKind::R12 => &self.two_m12,
            FactorKind::R23 => &self.two_m23,
        }
    }

    fn jy_for(&self, kind: FactorKind) -> &CMat {
        match kind {
            FactorKind::R12 => &self.jy12,
            FactorKind::R23 => &self.jy23,
        }
    }

    /// Diagonal phases of exp(-i·angle·Jz) for the chosen subalgebra.
    pub fn z_phases(&self, kind: FactorKind, angle: f64) -> Vec<Complex64> {
        self.doubled_for(kind)
            .iter()
            .map(|&tm| Complex64::from_polar(1.0, -0.5 * tm as f64 * angle))
            .collect()
    }

    /// exp(-iβ Jy) on the chosen subalgebra.
    pub fn y_rotation(&self, kind: FactorKind, beta: f64) -> CMat {
        crate::linalg::expi_hermitian(self.jy_for(kind), beta)
    }

    /// Full z-y-z factor on the irrep space.
    pub fn factor(&self, kind: FactorKind, angles: &Su2Euler) -> CMat {
        let mut m = self.y_rotation(kind, angles.beta);
        let za = self.z_phases(kind, angles.alpha);
        let zg = self.z_phases(kind, angles.gamma);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(r, c)] *= za[r] * zg[c];
            }
        }
        m
    }

    /// The factorized group element R23(Ω1)·R12(α2,β2,α2)·R23(Ω3).
    pub fn element(&self, angles: &Su3Euler) -> CMat {
        let left = self.factor(
            FactorKind::R23,
            &Su2Euler::new(angles.alpha1, angles.beta1, angles.gamma1),
        );
        let mid = self.factor(
            FactorKind::R12,
            &Su2Euler::new(angles.alpha2, angles.beta2, angles.alpha2),
        );
        let right = self.factor(
            FactorKind::R23,
            &Su2Euler::new(angles.alpha3, angles.beta3, angles.gamma3),
        );
        left * mid * right
    }
}

/// One su(2)-subgroup factor acting on the full irrep space.
pub fn su3_rotation_factor(rep: &RepRotations, kind: FactorKind, angles: &Su2Euler) -> CMat {
    rep.factor(kind, angles)
}

/// The factorized SU(3) group element on the irrep.
pub fn su3_element(rep: &RepRotations, angles: &Su3Euler) -> CMat {
    rep.element(angles)
}

/// One matrix element of the group element — an SU(3) D-function.
pub fn su3_d(rep: &RepRotations, row: usize, col: usize, angles: &Su3Euler) -> Result<Complex64> {
    if row >= rep.dim() || col >= rep.dim() {
        return Err(Error::IndexOutOfRange(row.max(col)));
    }
    Ok(rep.element(angles)[(row, col)])
}

/// Product quadrature grid over the eight SU(3) angles, exact for every
/// integrand the reconstruction formulas produce at ensemble size A.
///
/// Phase angles get uniform rules over their full ranges; β1 and β3 get
/// Gauss-Legendre in cos β (the sin β factor of the measure folded into
/// the weights); β2 gets the Gauss rule for weight u du after the
/// substitution u = sin²(β2/2), which absorbs cos(β2/2)·sin³(β2/2) dβ2
/// exactly. The weights therefore carry the full invariant measure and
/// sum to 1024 π⁵.
#[derive(Debug, Clone)]
pub struct Su3Grid {
    a: u32,
    phase_nodes: usize,
    beta_nodes: usize,
    alpha1: Rule1d,
    beta1: Rule1d,
    gamma1: Rule1d,
    alpha2: Rule1d,
    beta2: Rule1d,
    alpha3: Rule1d,
    beta3: Rule1d,
    gamma3: Rule1d,
}

/// Gauss-Legendre rule re-expressed in the angle β = acos(x); weights
/// absorb sin β dβ = -dx.
fn beta_rule_legendre(n: usize) -> Rule1d {
    let gl = gauss_legendre(n);
    Rule1d {
        nodes: gl.nodes.iter().map(|&x| x.clamp(-1.0, 1.0).acos()).collect(),
        weights: gl.weights.clone(),
    }
}

/// Weight-u Gauss rule re-expressed in β2 = 2 asin(√u).
fn beta2_rule(n: usize) -> Rule1d {
    let gu = gauss_weight_u(n);
    Rule1d {
        nodes: gu.nodes.iter().map(|&u| 2.0 * u.clamp(0.0, 1.0).sqrt().asin()).collect(),
        weights: gu.weights.clone(),
    }
}

impl Su3Grid {
    /// Node counts that stay exact at ensemble size A:
    /// 4A+5 per phase angle, 2A+3 per β angle.
    pub fn exact_counts(a: u32) -> (usize, usize) {
        ((4 * a + 5) as usize, (2 * a + 3) as usize)
    }

    pub fn new(a: u32) -> Self {
        let (p, b) = Self::exact_counts(a);
        Self::with_nodes(a, p, b)
    }

    pub fn with_nodes(a: u32, phase_nodes: usize, beta_nodes: usize) -> Self {
        Self {
            a,
            phase_nodes,
            beta_nodes,
            alpha1: uniform_periodic(phase_nodes, 4.0 * PI),
            beta1: beta_rule_legendre(beta_nodes),
            gamma1: uniform_periodic(phase_nodes, 4.0 * PI),
            alpha2: uniform_periodic(phase_nodes, 2.0 * PI),
            beta2: beta2_rule(beta_nodes),
            alpha3: uniform_periodic(phase_nodes, 4.0 * PI),
            beta3: beta_rule_legendre(beta_nodes),
            gamma3: uniform_periodic(phase_nodes, 4.0 * PI),
        }
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn phase_nodes(&self) -> usize {
        self.phase_nodes
    }

    pub fn beta_nodes(&self) -> usize {
        self.beta_nodes
    }

    pub fn axes(&self) -> [&Rule1d; 8] {
        [
            &self.alpha1, &self.beta1, &self.gamma1, &self.alpha2, &self.beta2, &self.alpha3,
            &self.beta3, &self.gamma3,
        ]
    }

    /// Number of nodes in the full eight-dimensional product.
    pub fn len(&self) -> u128 {
        self.axes().iter().map(|r| r.len() as u128).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Σ over all product nodes of the weight — the grid volume.
    pub fn volume(&self) -> f64 {
        self.axes().iter().map(|r| r.weight_sum()).product()
    }

    /// Weight carried by the three left angles (α1, β1, γ1) together.
    ///
    /// Tomograms and the reconstruction integrands are exactly constant
    /// along these axes (both reference states are (2,3)-singlets), so
    /// group integrals reduce to the remaining five axes scaled by this
    /// factor (= 32 π² at any node count).
    pub fn left_factor(&self) -> f64 {
        self.alpha1.weight_sum() * self.beta1.weight_sum() * self.gamma1.weight_sum()
    }

    /// Number of nodes of the reduced five-axis grid.
    pub fn reduced_len(&self) -> usize {
        self.alpha2.len() * self.beta2.len() * self.alpha3.len() * self.beta3.len()
            * self.gamma3.len()
    }

    /// Enumerate the reduced grid in a fixed nested order
    /// (α2 → β2 → α3 → β3 → γ3); the left angles are reported as zero
    /// and their measure factor is folded into the weights, so the
    /// reduced weights still sum to 1024 π⁵.
    pub fn reduced_nodes(&self) -> impl Iterator<Item = (Su3Euler, f64)> + '_ {
        let lf = self.left_factor();
        self.alpha2.iter().flat_map(move |(a2, wa2)| {
            self.beta2.iter().flat_map(move |(b2, wb2)| {
                self.alpha3.iter().flat_map(move |(a3, wa3)| {
                    self.beta3.iter().flat_map(move |(b3, wb3)| {
                        self.gamma3.iter().map(move |(g3, wg3)| {
                            (
                                Su3Euler::new(0.0, 0.0, 0.0, a2, b2, a3, b3, g3),
                                lf * wa2 * wb2 * wa3 * wb3 * wg3,
                            )
                        })
                    })
                })
            })
        })
    }
}

/// Product grid over SU(2)/SO(3) Euler angles: uniform in α and γ over
/// [0, 2π), Gauss-Legendre in cos β; weights sum to 8π².
///
/// Exact for D^{J*}_{0,M} against integrands of trigonometric degree up
/// to 2·maxJ; every integrand in the degenerate-configuration
/// reconstructions is 2π-periodic in α and γ (the total frequencies are
/// integers).
#[derive(Debug, Clone)]
pub struct Su2Grid {
    max_j: u32,
    phase_nodes: usize,
    beta_nodes: usize,
    alpha: Rule1d,
    beta: Rule1d,
    gamma: Rule1d,
}

impl Su2Grid {
    pub fn exact_counts(max_j: u32) -> (usize, usize) {
        ((4 * max_j + 1) as usize, (2 * max_j + 1) as usize)
    }

    pub fn new(max_j: u32) -> Self {
        let (p, b) = Self::exact_counts(max_j);
        Self::with_nodes(max_j, p, b)
    }

    pub fn with_nodes(max_j: u32, phase_nodes: usize, beta_nodes: usize) -> Self {
        Self {
            max_j,
            phase_nodes,
            beta_nodes,
            alpha: uniform_periodic(phase_nodes, 2.0 * PI),
            beta: beta_rule_legendre(beta_nodes),
            gamma: uniform_periodic(phase_nodes, 2.0 * PI),
        }
    }

    pub fn max_j(&self) -> u32 {
        self.max_j
    }

    pub fn phase_nodes(&self) -> usize {
        self.phase_nodes
    }

    pub fn beta_nodes(&self) -> usize {
        self.beta_nodes
    }

    pub fn len(&self) -> usize {
        self.alpha.len() * self.beta.len() * self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.alpha.weight_sum() * self.beta.weight_sum() * self.gamma.weight_sum()
    }

    /// Enumerate nodes in the fixed order α → β → γ.
    pub fn nodes(&self) -> impl Iterator<Item = (Su2Euler, f64)> + '_ {
        self.alpha.iter().flat_map(move |(a, wa)| {
            self.beta.iter().flat_map(move |(b, wb)| {
                self.gamma
                    .iter()
                    .map(move |(g, wg)| (Su2Euler::new(a, b, g), wa * wb * wg))
            })
        })
    }
}

/// All pairwise grid integrals ∫ dΩ conj(D1_{r,c}) D2_{r',c'} between
/// two irreps, evaluated on an [`Su3Grid`].
///
/// The value equals the plain weighted sum over the full product grid;
/// it is accumulated axis by axis (phase sums and β sums per factor,
/// then one matrix contraction per factor), which turns an infeasible
/// product-grid sweep into three small matrix products.
pub struct GramPair {
    #[allow(dead_code)]
    d1: usize,
    d2: usize,
    m: CMat,
}

impl GramPair {
    pub fn get(&self, r: usize, c: usize, rp: usize, cp: usize) -> Complex64 {
        self.m[(r * self.d2 + rp, c * self.d2 + cp)]
    }
}

/// Σ_k w_k e^{i·(f/2)·node_k} over one phase rule for each doubled
/// frequency f.
fn phase_sums(rule: &Rule1d, doubled_freqs: &[i32]) -> Vec<Complex64> {
    doubled_freqs
        .iter()
        .map(|&f| {
            let half = 0.5 * f as f64;
            rule.iter()
                .map(|(x, w)| Complex64::from_polar(w, half * x))
                .sum()
        })
        .collect()
}

/// Grid integrals of conj(R1_{ra}) R2_{r'a'} over one outer R23 factor
/// (rules: phase, beta, phase), flattened as a (d1·d2)² matrix in the
/// [(r,r'), (a,a')] layout.
fn outer_factor_gram(
    rep1: &RepRotations,
    rep2: &RepRotations,
    phase_a: &Rule1d,
    beta: &Rule1d,
    phase_g: &Rule1d,
) -> CMat {
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let n = d1 * d2;
    // conj(Z1(α))_r Z2(α)_{r'} carries doubled frequency m1[r] - m2[r'].
    let freq_pairs: Vec<i32> = (0..d1)
        .flat_map(|r| (0..d2).map(move |rp| rep1.two_m23()[r] - rep2.two_m23()[rp]))
        .collect();
    let pa = phase_sums(phase_a, &freq_pairs);
    let pg = phase_sums(phase_g, &freq_pairs);

    let mut acc = CMat::zeros(n, n);
    for (b, w) in beta.iter() {
        let y1 = rep1.y_rotation(FactorKind::R23, b);
        let y2 = rep2.y_rotation(FactorKind::R23, b);
        for r in 0..d1 {
            for rp in 0..d2 {
                let row = r * d2 + rp;
                for a in 0..d1 {
                    let y1ra = y1[(r, a)].conj() * w;
                    for ap in 0..d2 {
                        acc[(row, a * d2 + ap)] += y1ra * y2[(rp, ap)];
                    }
                }
            }
        }
    }
    for row in 0..n {
        for col in 0..n {
            acc[(row, col)] *= pa[row] * pg[col];
        }
    }
    acc
}

/// Same for the middle factor R12(α2, β2, α2): the single α2 rule sees
/// the sum of the row-side and column-side frequencies.
fn middle_factor_gram(
    rep1: &RepRotations,
    rep2: &RepRotations,
    phase: &Rule1d,
    beta: &Rule1d,
) -> CMat {
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let n = d1 * d2;

    let mut acc = CMat::zeros(n, n);
    for (b, w) in beta.iter() {
        let y1 = rep1.y_rotation(FactorKind::R12, b);
        let y2 = rep2.y_rotation(FactorKind::R12, b);
        for a in 0..d1 {
            for ap in 0..d2 {
                let row = a * d2 + ap;
                for bb in 0..d1 {
                    let y1ab = y1[(a, bb)].conj() * w;
                    for bp in 0..d2 {
                        acc[(row, bb * d2 + bp)] += y1ab * y2[(ap, bp)];
                    }
                }
            }
        }
    }
    let mut memo: std::collections::HashMap<i32, Complex64> = std::collections::HashMap::new();
    let mut phase_of = |f: i32| {
        *memo.entry(f).or_insert_with(|| {
            let half = 0.5 * f as f64;
            phase
                .iter()
                .map(|(x, w)| Complex64::from_polar(w, half * x))
                .sum()
        })
    };
    for a in 0..d1 {
        for ap in 0..d2 {
            let row = a * d2 + ap;
            let fr = rep1.two_m12()[a] - rep2.two_m12()[ap];
            for bb in 0..d1 {
                for bp in 0..d2 {
                    let fc = rep1.two_m12()[bb] - rep2.two_m12()[bp];
                    acc[(row, bb * d2 + bp)] *= phase_of(fr + fc);
                }
            }
        }
    }
    acc
}

/// Grid integrals ∫ dΩ conj(D1_{r,c}(Ω)) D2_{r',c'}(Ω) for every label
/// combination, as a [`GramPair`].
pub fn gram_pair(grid: &Su3Grid, rep1: &RepRotations, rep2: &RepRotations) -> GramPair {
    let axes = grid.axes();
    let left = outer_factor_gram(rep1, rep2, axes[0], axes[1], axes[2]);
    let mid = middle_factor_gram(rep1, rep2, axes[3], axes[4]);
    let right = outer_factor_gram(rep1, rep2, axes[5], axes[6], axes[7]);
    GramPair {
        d1: rep1.dim(),
        d2: rep2.dim(),
        m: left * mid * right,
    }
}

/// The conjugate-irrep rotations paired with an occupational basis.
pub fn conjugate_rep(basis: &BasisIndexMap) -> RepRotations {
    let b = basis.clone();
    RepRotations::from_generators(basis.len(), &move |i, j| {
        crate::su3::conjugate_generator(&b, i, j)
    })
    .expect("conjugate generators satisfy the algebra")
}

/// Spin-j su(2) triple in the standard |j m⟩ basis (m descending).
pub fn spin_matrices(two_j: i32) -> (CMat, CMat, CMat) {
    let d = (two_j + 1) as usize;
    let mut jz = CMat::zeros(d, d);
    let mut jp = CMat::zeros(d, d);
    for k in 0..d {
        let two_m = two_j - 2 * k as i32;
        jz[(k, k)] = Complex64::new(0.5 * two_m as f64, 0.0);
        if k > 0 {
            let j = 0.5 * two_j as f64;
            let m_low = 0.5 * (two_j - 2 * k as i32) as f64;
            jp[(k - 1, k)] = Complex64::new(((j - m_low) * (j + m_low + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    (jz, jp, jm)
}
