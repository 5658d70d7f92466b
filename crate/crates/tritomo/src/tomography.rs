//! Tomogram simulation and group-integral inversion for the three
//! level configurations, with explicit recoverability bookkeeping.
//!
//! A tomogram is the population of a configuration-specific reference
//! state after a pulse sequence, ω = ⟨ref| U ρ U† |ref⟩, sampled over
//! an exact quadrature grid of pulse parameters. Inversion projects the
//! samples onto Wigner D-functions and strips the coupling coefficients:
//!
//! * non-degenerate: the full SU(3) orbit, every element recoverable;
//! * Λ: an SU(2) orbit in the dressed basis; only the bright block of
//!   the fully-symmetric spin survives, everything else is masked;
//! * Ξ: an SO(3) orbit; only the maximal angular-momentum block
//!   survives.
//!
//! A pseudo-inverse of the sampled linear map ρ ↦ ω is kept alongside
//! the quadrature path as an independent cross-check for the
//! non-degenerate inversion.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::cg::{su2_cg, CgTable};
use crate::dynamics::{lambda_pulse_sequence, lm_labels, ConfigKind, LmLabel};
use crate::linalg::{hermiticity_defect, hermitian_eigenvalues, CMat, C_ONE, C_ZERO};
use crate::su3::{dimension, enumerate_basis, BasisIndexMap, OccupationState};
use crate::wigner::{
    su2_d, su2_volume, su3_volume, FactorKind, RepRotations, Su2Euler, Su2Grid, Su3Euler, Su3Grid,
};
use crate::{Error, Result};

/// Which ordered basis a density matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Occupations |n1 n2 n3⟩ of the bare levels.
    Occupational,
    /// Occupations of the dressed modes produced by the mode-1/2 mixing
    /// transform (the Λ working basis).
    Dressed,
    /// Angular momentum states |L M⟩ (the Ξ working basis).
    AngularMomentum,
}

impl BasisTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisTag::Occupational => "occupational",
            BasisTag::Dressed => "dressed",
            BasisTag::AngularMomentum => "angular-momentum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "occupational" => Some(BasisTag::Occupational),
            "dressed" => Some(BasisTag::Dressed),
            "angular-momentum" => Some(BasisTag::AngularMomentum),
            _ => None,
        }
    }
}

impl std::fmt::Display for BasisTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The basis each configuration simulates and reconstructs in.
pub fn working_basis(config: ConfigKind) -> BasisTag {
    match config {
        ConfigKind::NonDegenerate => BasisTag::Occupational,
        ConfigKind::Lambda => BasisTag::Dressed,
        ConfigKind::Xi => BasisTag::AngularMomentum,
    }
}

/// A density matrix over one of the ordered bases.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub a: u32,
    pub basis: BasisTag,
    pub matrix: CMat,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Hermiticity and trace to 1e-12, spectrum above -1e-10.
    pub fn validate(&self) -> Result<()> {
        let h = hermiticity_defect(&self.matrix);
        if h > 1e-12 {
            return Err(Error::DensityInvariant { check: "hermiticity", defect: h });
        }
        let tr: Complex64 = self.matrix.trace();
        let td = (tr - C_ONE).norm();
        if td > 1e-12 {
            return Err(Error::DensityInvariant { check: "unit trace", defect: td });
        }
        let min = hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::DensityInvariant { check: "positivity", defect: -min });
        }
        Ok(())
    }

    pub fn checked(a: u32, basis: BasisTag, matrix: CMat) -> Result<Self> {
        let rho = Self { a, basis, matrix };
        rho.validate()?;
        Ok(rho)
    }
}

/// Seeded Ginibre state: G G† normalized to unit trace.
pub fn random_density_matrix(dim: usize, seed: u64) -> CMat {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = CMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            g[(r, c)] = Complex64::new(re, im);
        }
    }
    let rho = &g * g.adjoint();
    let tr: Complex64 = rho.trace();
    rho / tr
}

/// The maximally mixed state.
pub fn mixed_density_matrix(dim: usize) -> CMat {
    CMat::identity(dim, dim).scale(1.0 / dim as f64)
}

/// Index of the configuration's reference state in its working basis.
pub fn reference_index(config: ConfigKind, a: u32) -> usize {
    let basis = enumerate_basis(a);
    match config {
        // ground state |A 0 0⟩
        ConfigKind::NonDegenerate => 0,
        // every atom excited, dressed |0 0 A⟩
        ConfigKind::Lambda => basis
            .index_of(&OccupationState::new(0, 0, a))
            .expect("state exists"),
        // |L=A, M=-A⟩ sits at the bottom of the first block
        ConfigKind::Xi => lm_labels(a)
            .iter()
            .position(|l| l.l == a && l.m == -(a as i32))
            .expect("label exists"),
    }
}

/// Projector onto the reference state in the working basis.
pub fn reference_projector(config: ConfigKind, a: u32) -> CMat {
    let d = dimension(a, 0) as usize;
    let mut m = CMat::zeros(d, d);
    let k = reference_index(config, a);
    m[(k, k)] = C_ONE;
    m
}

/// A group parameter point of either orbit type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupPoint {
    Su3(Su3Euler),
    Su2(Su2Euler),
}

fn expect_basis(rho: &DensityMatrix, config: ConfigKind) -> Result<()> {
    let expected = working_basis(config);
    if rho.basis != expected {
        return Err(Error::BasisMismatch {
            expected: expected.as_str(),
            found: rho.basis.to_string(),
        });
    }
    Ok(())
}

fn sandwich(row: &[Complex64], rho: &CMat) -> f64 {
    let d = row.len();
    let mut acc = C_ZERO;
    for n in 0..d {
        if row[n] == C_ZERO {
            continue;
        }
        for v in 0..d {
            acc += row[n] * rho[(n, v)] * row[v].conj();
        }
    }
    debug_assert!(acc.im.abs() < 1e-10, "tomograms are real");
    acc.re
}

/// Row ⟨ref| U(Ω) of the Ξ pulse in the angular-momentum basis: only
/// the L = A block is populated and it carries spin-A D-functions.
fn xi_row(a: u32, labels: &[LmLabel], angles: &Su2Euler) -> Vec<Complex64> {
    labels
        .iter()
        .map(|lab| {
            if lab.l == a {
                su2_d(2 * a as i32, -2 * (a as i32), 2 * lab.m, angles).expect("valid labels")
            } else {
                C_ZERO
            }
        })
        .collect()
}

/// Row ⟨ref| R23(Ω) of the Λ pulse in the dressed basis.
fn lambda_row(basis: &BasisIndexMap, angles: &Su2Euler) -> Vec<Complex64> {
    let a = basis.a();
    let two_i = a as i32;
    basis
        .states()
        .iter()
        .map(|s| {
            if s.n1 != 0 {
                return C_ZERO;
            }
            let (ti, tm) = s.su2_sublabels((2, 3));
            debug_assert_eq!(ti, two_i);
            su2_d(two_i, -two_i, tm, angles).expect("valid labels")
        })
        .collect()
}

/// The tomogram ω = ⟨ref| U ρ U† |ref⟩ at one parameter point.
pub fn simulate_tomogram(rho: &DensityMatrix, config: ConfigKind, point: &GroupPoint) -> Result<f64> {
    expect_basis(rho, config)?;
    rho.validate()?;
    let a = rho.a;
    match (config, point) {
        (ConfigKind::NonDegenerate, GroupPoint::Su3(angles)) => {
            let basis = enumerate_basis(a);
            let rep = RepRotations::occupational(&basis);
            let u = rep.element(angles);
            let row: Vec<Complex64> = (0..rho.dim()).map(|c| u[(0, c)]).collect();
            Ok(sandwich(&row, &rho.matrix))
        }
        (ConfigKind::Lambda, GroupPoint::Su2(angles)) => {
            let basis = enumerate_basis(a);
            let u = lambda_pulse_sequence(&basis, angles);
            let r = reference_index(config, a);
            let row: Vec<Complex64> = (0..rho.dim()).map(|c| u[(r, c)]).collect();
            Ok(sandwich(&row, &rho.matrix))
        }
        (ConfigKind::Xi, GroupPoint::Su2(angles)) => {
            let labels = lm_labels(a);
            let row = xi_row(a, &labels, angles);
            Ok(sandwich(&row, &rho.matrix))
        }
        _ => Err(Error::GridMismatch(format!(
            "{config} expects a {} parameter point",
            match config {
                ConfigKind::NonDegenerate => "full-group",
                _ => "subgroup",
            }
        ))),
    }
}

/// Node counts identifying the grid a sample set was taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpec {
    Su3 { phase_nodes: usize, beta_nodes: usize },
    Su2 { max_j: u32, phase_nodes: usize, beta_nodes: usize },
}

/// Tomogram values with their grid points and quadrature weights.
#[derive(Debug, Clone)]
pub struct TomogramSamples {
    pub config: ConfigKind,
    pub a: u32,
    pub grid: GridSpec,
    pub points: Vec<(GroupPoint, f64, f64)>,
}

/// The subgroup grid each degenerate configuration integrates over.
pub fn subgroup_grid(config: ConfigKind, a: u32) -> Su2Grid {
    match config {
        ConfigKind::Lambda => Su2Grid::new(a),
        ConfigKind::Xi => Su2Grid::new(2 * a),
        ConfigKind::NonDegenerate => panic!("the non-degenerate orbit is the full group"),
    }
}

impl TomogramSamples {
    /// Check a sample set against the exact grid it claims to be on.
    pub fn validate_grid(&self) -> Result<()> {
        let expect_len = match self.grid {
            GridSpec::Su3 { phase_nodes, beta_nodes } => {
                Su3Grid::with_nodes(self.a, phase_nodes, beta_nodes).reduced_len()
            }
            GridSpec::Su2 { max_j, phase_nodes, beta_nodes } => {
                Su2Grid::with_nodes(max_j, phase_nodes, beta_nodes).len()
            }
        };
        if self.points.len() != expect_len {
            return Err(Error::GridMismatch(format!(
                "expected {expect_len} nodes, found {}",
                self.points.len()
            )));
        }
        let total: f64 = self.points.iter().map(|(_, w, _)| w).sum();
        let volume = match self.grid {
            GridSpec::Su3 { .. } => su3_volume(),
            GridSpec::Su2 { .. } => su2_volume(),
        };
        if (total / volume - 1.0).abs() > 1e-8 {
            return Err(Error::GridMismatch(format!(
                "weights sum to {total:.6e}, expected {volume:.6e}"
            )));
        }
        for (p, _, omega) in &self.points {
            if !(-1e-9..=1.0 + 1e-9).contains(omega) {
                return Err(Error::GridMismatch(format!("tomogram value {omega} out of [0,1]")));
            }
            match (self.config, p) {
                (ConfigKind::NonDegenerate, GroupPoint::Su3(_)) => {}
                (ConfigKind::Lambda | ConfigKind::Xi, GroupPoint::Su2(_)) => {}
                _ => return Err(Error::GridMismatch("point type mismatch".into())),
            }
        }
        Ok(())
    }
}

/// Cached β-rotations for the reduced-grid scans.
struct ScanCache {
    y12: Vec<CMat>,
    y23: Vec<CMat>,
}

impl ScanCache {
    fn new(rep: &RepRotations, grid: &Su3Grid) -> Self {
        let axes = grid.axes();
        Self {
            y12: axes[4].nodes.iter().map(|&b| rep.y_rotation(FactorKind::R12, b)).collect(),
            y23: axes[6].nodes.iter().map(|&b| rep.y_rotation(FactorKind::R23, b)).collect(),
        }
    }
}

/// Nodes per fixed α2 value in the reduced enumeration.
fn alpha2_slice_len(grid: &Su3Grid) -> usize {
    let axes = grid.axes();
    axes[4].len() * axes[5].len() * axes[6].len() * axes[7].len()
}

/// Scan one α2 slice of the reduced grid; `idx` counts within the slice.
fn scan_alpha2_slice(
    rep: &RepRotations,
    left: usize,
    grid: &Su3Grid,
    cache: &ScanCache,
    ia2: usize,
    mut f: impl FnMut(usize, &Su3Euler, f64, &[Complex64]),
) {
    let axes = grid.axes();
    let (alpha2, beta2, alpha3, beta3, gamma3) = (axes[3], axes[4], axes[5], axes[6], axes[7]);
    let lf = grid.left_factor();
    let d = rep.dim();
    let (a2, wa2) = (alpha2.nodes[ia2], alpha2.weights[ia2]);

    let mut idx = 0usize;
    let mut row_l = vec![C_ZERO; d];
    let mut shifted = vec![C_ZERO; d];
    let mut partial = vec![C_ZERO; d];
    let mut row = vec![C_ZERO; d];
    let z12 = rep.z_phases(FactorKind::R12, a2);
    let z12_left = z12[left];
    for (ib2, (b2, wb2)) in beta2.iter().enumerate() {
        // ⟨left| Z12(α2) Y12(β2) Z12(α2)
        for c in 0..d {
            row_l[c] = z12_left * cache.y12[ib2][(left, c)] * z12[c];
        }
        for (a3, wa3) in alpha3.iter() {
            let z23a = rep.z_phases(FactorKind::R23, a3);
            for c in 0..d {
                shifted[c] = row_l[c] * z23a[c];
            }
            for (ib3, (b3, wb3)) in beta3.iter().enumerate() {
                let y = &cache.y23[ib3];
                for c in 0..d {
                    let mut acc = C_ZERO;
                    for b in 0..d {
                        if shifted[b] != C_ZERO {
                            acc += shifted[b] * y[(b, c)];
                        }
                    }
                    partial[c] = acc;
                }
                for (g3, wg3) in gamma3.iter() {
                    let z23g = rep.z_phases(FactorKind::R23, g3);
                    for c in 0..d {
                        row[c] = partial[c] * z23g[c];
                    }
                    let angles = Su3Euler::new(0.0, 0.0, 0.0, a2, b2, a3, b3, g3);
                    let w = lf * wa2 * wb2 * wa3 * wb3 * wg3;
                    f(idx, &angles, w, &row);
                    idx += 1;
                }
            }
        }
    }
}

/// Scan ⟨left| R12(α2,β2,α2)·R23(α3,β3,γ3) over the reduced SU(3) grid
/// in the same order as [`Su3Grid::reduced_nodes`], handing each node's
/// weight and row to the callback.
///
/// `left` must be a (2,3)-singlet so the omitted left factor acts
/// trivially on it; that is what makes the reduced grid exact.
pub fn left_row_scan(
    rep: &RepRotations,
    left: usize,
    grid: &Su3Grid,
    mut f: impl FnMut(usize, &Su3Euler, f64, &[Complex64]),
) {
    debug_assert_eq!(rep.two_m23()[left], 0, "left index must be a (2,3)-singlet");
    let cache = ScanCache::new(rep, grid);
    let slice = alpha2_slice_len(grid);
    for ia2 in 0..grid.axes()[3].len() {
        let base = ia2 * slice;
        scan_alpha2_slice(rep, left, grid, &cache, ia2, |k, angles, w, row| {
            f(base + k, angles, w, row)
        });
    }
}

/// Run `per_chunk` once per α2 index, fanned out over `threads`
/// workers, and return the results in chunk order. Chunk boundaries
/// are fixed by the grid, so results are identical for every thread
/// count.
fn map_alpha2_chunks<T: Send>(
    grid: &Su3Grid,
    threads: usize,
    per_chunk: impl Fn(usize) -> T + Sync,
) -> Vec<T> {
    let n = grid.axes()[3].len();
    let threads = threads.max(1).min(n);
    if threads == 1 {
        return (0..n).map(per_chunk).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let done = std::sync::Mutex::new(Vec::<(usize, T)>::with_capacity(n));
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let ia2 = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if ia2 >= n {
                    break;
                }
                let out = per_chunk(ia2);
                done.lock().unwrap().push((ia2, out));
            });
        }
    });
    let mut results = done.into_inner().unwrap();
    results.sort_by_key(|(k, _)| *k);
    results.into_iter().map(|(_, t)| t).collect()
}

/// Sample the tomogram of ρ over the exact grid for its configuration.
pub fn simulate_samples(rho: &DensityMatrix, config: ConfigKind) -> Result<TomogramSamples> {
    simulate_samples_threaded(rho, config, 1)
}

/// Like [`simulate_samples`], fanning the non-degenerate scan over
/// worker threads; output is identical for every thread count.
pub fn simulate_samples_threaded(
    rho: &DensityMatrix,
    config: ConfigKind,
    threads: usize,
) -> Result<TomogramSamples> {
    expect_basis(rho, config)?;
    rho.validate()?;
    let a = rho.a;
    match config {
        ConfigKind::NonDegenerate => {
            let grid = Su3Grid::new(a);
            Ok(simulate_samples_nondeg_on(rho, &grid, threads))
        }
        ConfigKind::Lambda | ConfigKind::Xi => {
            let grid = subgroup_grid(config, a);
            Ok(simulate_samples_su2_on(rho, config, &grid))
        }
    }
}

/// Non-degenerate sampling on a caller-supplied grid.
pub fn simulate_samples_nondeg_on(
    rho: &DensityMatrix,
    grid: &Su3Grid,
    threads: usize,
) -> TomogramSamples {
    let a = rho.a;
    let basis = enumerate_basis(a);
    let rep = RepRotations::occupational(&basis);
    let cache = ScanCache::new(&rep, grid);
    let chunks = map_alpha2_chunks(grid, threads, |ia2| {
        let mut part = Vec::with_capacity(alpha2_slice_len(grid));
        scan_alpha2_slice(&rep, 0, grid, &cache, ia2, |_, angles, w, row| {
            part.push((GroupPoint::Su3(*angles), w, sandwich(row, &rho.matrix)));
        });
        part
    });
    TomogramSamples {
        config: ConfigKind::NonDegenerate,
        a,
        grid: GridSpec::Su3 { phase_nodes: grid.phase_nodes(), beta_nodes: grid.beta_nodes() },
        points: chunks.into_iter().flatten().collect(),
    }
}

/// Degenerate-configuration sampling on a caller-supplied subgroup grid.
pub fn simulate_samples_su2_on(
    rho: &DensityMatrix,
    config: ConfigKind,
    grid: &Su2Grid,
) -> TomogramSamples {
    let a = rho.a;
    let basis = enumerate_basis(a);
    let labels = lm_labels(a);
    let points: Vec<(GroupPoint, f64, f64)> = grid
        .nodes()
        .map(|(angles, w)| {
            let row = match config {
                ConfigKind::Lambda => lambda_row(&basis, &angles),
                ConfigKind::Xi => xi_row(a, &labels, &angles),
                ConfigKind::NonDegenerate => unreachable!(),
            };
            (GroupPoint::Su2(angles), w, sandwich(&row, &rho.matrix))
        })
        .collect();
    TomogramSamples {
        config,
        a,
        grid: GridSpec::Su2 {
            max_j: grid.max_j(),
            phase_nodes: grid.phase_nodes(),
            beta_nodes: grid.beta_nodes(),
        },
        points,
    }
}

/// Structural recoverability of density-matrix entries for a
/// configuration, independent of any sampled data.
#[derive(Debug, Clone)]
pub struct RecoverabilityMask {
    pub config: ConfigKind,
    pub a: u32,
    /// True where the group orbit determines the entry.
    pub recoverable: Vec<Vec<bool>>,
    /// Diagonal entries fixed afterwards by normalization alone.
    pub inferred: Vec<(usize, usize)>,
}

impl RecoverabilityMask {
    pub fn dim(&self) -> usize {
        self.recoverable.len()
    }

    pub fn recoverable_count(&self) -> usize {
        self.recoverable.iter().flatten().filter(|&&b| b).count()
    }

    pub fn unrecoverable_count(&self) -> usize {
        let d = self.dim();
        d * d - self.recoverable_count() - self.inferred.len()
    }
}

/// Compute the mask from block membership.
pub fn recoverability_mask(config: ConfigKind, a: u32) -> RecoverabilityMask {
    let d = dimension(a, 0) as usize;
    let basis = enumerate_basis(a);
    let mut recoverable = vec![vec![false; d]; d];
    let mut inferred = Vec::new();
    match config {
        ConfigKind::NonDegenerate => {
            recoverable = vec![vec![true; d]; d];
        }
        ConfigKind::Lambda => {
            let bright: Vec<usize> = (0..d).filter(|&k| basis.state(k).n1 == 0).collect();
            for &r in &bright {
                for &c in &bright {
                    recoverable[r][c] = true;
                }
            }
            let dark_diagonals: Vec<usize> = (0..d).filter(|&k| basis.state(k).n1 != 0).collect();
            if dark_diagonals.len() == 1 {
                inferred.push((dark_diagonals[0], dark_diagonals[0]));
            }
        }
        ConfigKind::Xi => {
            let labels = lm_labels(a);
            for (r, lr) in labels.iter().enumerate() {
                for (c, lc) in labels.iter().enumerate() {
                    if lr.l == a && lc.l == a {
                        recoverable[r][c] = true;
                    }
                }
            }
        }
    }
    RecoverabilityMask { config, a, recoverable, inferred }
}

/// Which inversion prefactor weights each coupled irrep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionPrefactor {
    /// (σ+1)³ — the constant as printed alongside the inversion formula.
    Printed,
    /// dim(σ,σ) = ½(σ+1)²(σ+2) — the constant the D-function
    /// orthogonality relation actually produces.
    OrthogonalityDerived,
}

impl InversionPrefactor {
    fn value(&self, sigma: u32) -> f64 {
        match self {
            InversionPrefactor::Printed => ((sigma + 1) as f64).powi(3),
            InversionPrefactor::OrthogonalityDerived => dimension(sigma, sigma) as f64,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            InversionPrefactor::Printed => "printed",
            InversionPrefactor::OrthogonalityDerived => "orthogonality-derived",
        }
    }
}

/// Result of an inversion: the reconstructed matrix (masked entries
/// zero and flagged, never estimates), the mask, and residual
/// diagnostics from re-simulating the recovered entries on the grid.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub rho: DensityMatrix,
    pub mask: RecoverabilityMask,
    pub max_residual: f64,
    pub hermiticity_defect: f64,
    pub notes: Vec<String>,
}

fn resimulation_residual(rho: &DensityMatrix, samples: &TomogramSamples) -> f64 {
    let again = match samples.config {
        ConfigKind::NonDegenerate => {
            let grid = match samples.grid {
                GridSpec::Su3 { phase_nodes, beta_nodes } => {
                    Su3Grid::with_nodes(samples.a, phase_nodes, beta_nodes)
                }
                _ => unreachable!(),
            };
            simulate_samples_nondeg_on(rho, &grid, 1)
        }
        c => {
            let grid = match samples.grid {
                GridSpec::Su2 { max_j, phase_nodes, beta_nodes } => {
                    Su2Grid::with_nodes(max_j, phase_nodes, beta_nodes)
                }
                _ => unreachable!(),
            };
            simulate_samples_su2_on(rho, c, &grid)
        }
    };
    samples
        .points
        .iter()
        .zip(again.points.iter())
        .map(|((_, _, w1), (_, _, w2))| (w1 - w2).abs())
        .fold(0.0, f64::max)
}

/// Invert non-degenerate samples through the coupled-irrep projection.
pub fn reconstruct_nondeg(
    samples: &TomogramSamples,
    table: &CgTable,
    prefactor: InversionPrefactor,
) -> Result<ReconstructionReport> {
    reconstruct_nondeg_threaded(samples, table, prefactor, 1)
}

/// Like [`reconstruct_nondeg`], with the grid projection fanned over
/// worker threads; partial sums reduce in fixed chunk order, so the
/// result is identical for every thread count.
pub fn reconstruct_nondeg_threaded(
    samples: &TomogramSamples,
    table: &CgTable,
    prefactor: InversionPrefactor,
    threads: usize,
) -> Result<ReconstructionReport> {
    if samples.config != ConfigKind::NonDegenerate {
        return Err(Error::GridMismatch("samples are not non-degenerate".into()));
    }
    samples.validate_grid()?;
    let a = samples.a;
    if table.a() != a {
        return Err(Error::GridMismatch(format!(
            "coupling table is for A={}, samples for A={a}",
            table.a()
        )));
    }
    let grid = match samples.grid {
        GridSpec::Su3 { phase_nodes, beta_nodes } => Su3Grid::with_nodes(a, phase_nodes, beta_nodes),
        _ => unreachable!(),
    };
    let basis = table.basis();
    let d = basis.len();
    let slice = alpha2_slice_len(&grid);

    // project the samples onto each coupled irrep's singlet row
    let mut acc = CMat::zeros(d, d);
    for irrep in &table.irreps {
        let sigma = irrep.sigma;
        let gens = table.coupled_irrep_generators(sigma)?;
        let dim_c = irrep.dim();
        let rep = RepRotations::from_generators(dim_c, &|i, j| gens[3 * (i - 1) + (j - 1)].clone())?;
        let singlet = irrep.singlet_index();

        let cache = ScanCache::new(&rep, &grid);
        let partials = map_alpha2_chunks(&grid, threads, |ia2| {
            let mut part = vec![C_ZERO; dim_c];
            let base = ia2 * slice;
            scan_alpha2_slice(&rep, singlet, &grid, &cache, ia2, |k, _, w, row| {
                let omega = samples.points[base + k].2;
                let scale = Complex64::new(w * omega, 0.0);
                for (c, val) in row.iter().enumerate() {
                    part[c] += val.conj() * scale;
                }
            });
            part
        });
        let mut integrals = vec![C_ZERO; dim_c];
        for part in partials {
            for (c, v) in part.into_iter().enumerate() {
                integrals[c] += v;
            }
        }

        // highest coefficient: ⟨(A00); slot of (0AA)| (σσσ) I3=0⟩
        let ground = OccupationState::new(a, 0, 0);
        let singlet_label = irrep.labels[singlet];
        let cg0 = table.full_cg(&ground, &ground, sigma, &singlet_label);
        assert!(cg0.abs() > 1e-12, "reference coupling must not vanish");

        let scale = prefactor.value(sigma) / (su3_volume() * cg0);
        for (col, label) in irrep.labels.iter().enumerate() {
            if integrals[col] == C_ZERO {
                continue;
            }
            let contribution = integrals[col] * Complex64::new(scale, 0.0);
            let column = irrep.vectors.column(col);
            for p in 0..d * d {
                let cg = column[p];
                if cg.abs() < 1e-14 {
                    continue;
                }
                let (n_idx, nu_idx) = (p / d, p % d);
                acc[(n_idx, nu_idx)] += contribution * cg;
            }
            let _ = label;
        }
    }

    // strip the conjugation sign (-1)^{ν2}
    let mut rho = CMat::zeros(d, d);
    for n_idx in 0..d {
        for nu_idx in 0..d {
            let sign = if basis.state(nu_idx).n2 % 2 == 0 { 1.0 } else { -1.0 };
            rho[(n_idx, nu_idx)] = acc[(n_idx, nu_idx)] * sign;
        }
    }

    let rho = DensityMatrix { a, basis: BasisTag::Occupational, matrix: rho };
    let max_residual = resimulation_residual(&rho, samples);
    let hermiticity = hermiticity_defect(&rho.matrix);
    Ok(ReconstructionReport {
        rho,
        mask: recoverability_mask(ConfigKind::NonDegenerate, a),
        max_residual,
        hermiticity_defect: hermiticity,
        notes: vec![format!("prefactor = {}", prefactor.as_str())],
    })
}

/// Shared inversion core for the two subgroup configurations: project
/// the samples onto D^{L*}_{0,M} and strip spin coupling coefficients.
///
/// `two_i` is the doubled reference spin; `entry` receives doubled
/// projections (2m, 2μ) and the recovered value.
fn invert_su2_block(
    samples: &TomogramSamples,
    two_i: i32,
    mut entry: impl FnMut(i32, i32, Complex64),
) -> Result<()> {
    samples.validate_grid()?;
    // G_{L,M} = Σ w conj(D^L_{0,M}) ω over the grid
    let l_max = two_i; // doubled spins couple up to 2I, i.e. integer L ≤ 2I/... two_i is doubled I, L runs 0..=two_i
    let mut g = std::collections::HashMap::new();
    for (point, w, omega) in &samples.points {
        let GroupPoint::Su2(angles) = point else {
            return Err(Error::GridMismatch("expected subgroup points".into()));
        };
        for l in 0..=l_max {
            for m in -l..=l {
                let dval = su2_d(2 * l, 0, 2 * m, angles).expect("integer labels");
                *g.entry((l, m)).or_insert(C_ZERO) += dval.conj() * Complex64::new(w * omega, 0.0);
            }
        }
    }
    for two_m in (-two_i..=two_i).step_by(2) {
        for two_mu in (-two_i..=two_i).step_by(2) {
            let m_big = (two_m - two_mu) / 2;
            let mut value = C_ZERO;
            for l in m_big.abs()..=l_max {
                let c_inv = su2_cg(two_i, -two_i, two_i, two_i, 2 * l, 0);
                if c_inv.abs() < 1e-14 {
                    continue;
                }
                let c = su2_cg(two_i, two_m, two_i, -two_mu, 2 * l, 2 * m_big);
                let weight = (2 * l + 1) as f64 / su2_volume();
                value += g[&(l, m_big)] * Complex64::new(weight * c / c_inv, 0.0);
            }
            // (-1)^{I+μ}
            let sign = if (two_i + two_mu) % 4 == 0 { 1.0 } else { -1.0 };
            entry(two_m, two_mu, value * sign);
        }
    }
    Ok(())
}

/// Invert Λ samples: recovers the bright block of the dressed basis,
/// infers one dark diagonal from normalization when it is the only one
/// missing, and masks the rest.
pub fn reconstruct_lambda(samples: &TomogramSamples) -> Result<ReconstructionReport> {
    if samples.config != ConfigKind::Lambda {
        return Err(Error::GridMismatch("samples are not Λ-configuration".into()));
    }
    let a = samples.a;
    let basis = enumerate_basis(a);
    let d = basis.len();
    let two_i = a as i32;
    let index_of = |two_m: i32| -> usize {
        let n2 = (two_i + two_m) / 2;
        let n3 = (two_i - two_m) / 2;
        basis
            .index_of(&OccupationState::new(0, n2 as u32, n3 as u32))
            .expect("bright states exist")
    };
    let mut rho = CMat::zeros(d, d);
    invert_su2_block(samples, two_i, |two_m, two_mu, value| {
        rho[(index_of(two_m), index_of(two_mu))] = value;
    })?;

    let mask = recoverability_mask(ConfigKind::Lambda, a);
    let mut notes = Vec::new();
    for &(r, c) in &mask.inferred {
        let bright_trace: Complex64 = (0..d)
            .filter(|&k| basis.state(k).n1 == 0)
            .map(|k| rho[(k, k)])
            .sum();
        rho[(r, c)] = C_ONE - bright_trace;
        notes.push(format!("diagonal ({r},{r}) inferred from normalization"));
    }

    let rho = DensityMatrix { a, basis: BasisTag::Dressed, matrix: rho };
    let max_residual = resimulation_residual(&rho, samples);
    let hermiticity = hermiticity_defect(&rho.matrix);
    Ok(ReconstructionReport {
        rho,
        mask,
        max_residual,
        hermiticity_defect: hermiticity,
        notes,
    })
}

/// Invert Ξ samples: recovers the L = A block in the angular-momentum
/// basis and masks every entry touching lower L.
pub fn reconstruct_xi(samples: &TomogramSamples) -> Result<ReconstructionReport> {
    if samples.config != ConfigKind::Xi {
        return Err(Error::GridMismatch("samples are not Ξ-configuration".into()));
    }
    let a = samples.a;
    let labels = lm_labels(a);
    let d = labels.len();
    let two_i = 2 * a as i32;
    let index_of = |two_m: i32| -> usize {
        labels
            .iter()
            .position(|l| l.l == a && 2 * l.m == two_m)
            .expect("top-L states exist")
    };
    let mut rho = CMat::zeros(d, d);
    invert_su2_block(samples, two_i, |two_m, two_mu, value| {
        rho[(index_of(two_m), index_of(two_mu))] = value;
    })?;

    let rho = DensityMatrix { a, basis: BasisTag::AngularMomentum, matrix: rho };
    let max_residual = resimulation_residual(&rho, samples);
    let hermiticity = hermiticity_defect(&rho.matrix);
    Ok(ReconstructionReport {
        rho,
        mask: recoverability_mask(ConfigKind::Xi, a),
        max_residual,
        hermiticity_defect: hermiticity,
        notes: Vec::new(),
    })
}

/// Change the basis a density matrix is expressed in by the exact
/// unitary between the tags.
pub fn basis_transform(rho: &DensityMatrix, to: BasisTag) -> Result<DensityMatrix> {
    if rho.basis == to {
        return Ok(rho.clone());
    }
    let basis = enumerate_basis(rho.a);
    // unitary with columns = target basis states over occupations
    let to_occupational = |tag: BasisTag| -> Option<CMat> {
        match tag {
            BasisTag::Occupational => Some(CMat::identity(basis.len(), basis.len())),
            BasisTag::Dressed => Some(crate::dynamics::lambda_t12(&basis)),
            BasisTag::AngularMomentum => Some(crate::dynamics::lm_basis_matrix(&basis).0),
        }
    };
    let from_u = to_occupational(rho.basis).ok_or_else(|| Error::UnknownTransform {
        from: rho.basis.to_string(),
        to: to.to_string(),
    })?;
    let to_u = to_occupational(to).ok_or_else(|| Error::UnknownTransform {
        from: rho.basis.to_string(),
        to: to.to_string(),
    })?;
    // ρ_occ = F ρ_from F†, then ρ_to = T† ρ_occ T
    let occ = &from_u * &rho.matrix * from_u.adjoint();
    let out = to_u.adjoint() * occ * &to_u;
    Ok(DensityMatrix { a: rho.a, basis: to, matrix: out })
}

/// Independent least-squares inversion of non-degenerate samples: the
/// pseudo-inverse of the sampled linear map ρ ↦ ω, via its normal
/// equations. Cross-checks the quadrature path.
pub fn lsq_reconstruct_nondeg(samples: &TomogramSamples) -> Result<DensityMatrix> {
    if samples.config != ConfigKind::NonDegenerate {
        return Err(Error::GridMismatch("samples are not non-degenerate".into()));
    }
    samples.validate_grid()?;
    let a = samples.a;
    let grid = match samples.grid {
        GridSpec::Su3 { phase_nodes, beta_nodes } => Su3Grid::with_nodes(a, phase_nodes, beta_nodes),
        _ => unreachable!(),
    };
    let basis = enumerate_basis(a);
    let rep = RepRotations::occupational(&basis);
    let d = basis.len();
    let dd = d * d;

    let mut normal = CMat::zeros(dd, dd);
    let mut rhs = DVector::<Complex64>::zeros(dd);
    let mut design = vec![C_ZERO; dd];
    left_row_scan(&rep, 0, &grid, |idx, _, _, row| {
        let omega = samples.points[idx].2;
        for n in 0..d {
            for v in 0..d {
                design[n * d + v] = row[n] * row[v].conj();
            }
        }
        for p in 0..dd {
            let dp = design[p].conj();
            rhs[p] += dp * omega;
            for q in 0..dd {
                normal[(p, q)] += dp * design[q];
            }
        }
    });

    let solved = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::GridMismatch("normal equations are singular".into()))?;
    let mut rho = CMat::zeros(d, d);
    for n in 0..d {
        for v in 0..d {
            rho[(n, v)] = solved[n * d + v];
        }
    }
    Ok(DensityMatrix { a, basis: BasisTag::Occupational, matrix: rho })
}

/// Round-trip residuals of both inversion prefactors on one seeded
/// state; reports which constant actually closes the loop.
///
/// The two candidates turn out to be the same number — the printed
/// (σ+1)³ equals dim(σ,σ) = ½(σ+1)(σ+1)(2σ+2) for every self-conjugate
/// irrep — so the audit certifies the coincidence instead of picking a
/// winner.
#[derive(Debug, Clone)]
pub struct PrefactorAudit {
    pub a: u32,
    pub residual_printed: f64,
    pub residual_derived: f64,
    /// True when both constants agree on every irrep in the series.
    pub constants_coincide: bool,
    pub chosen: InversionPrefactor,
}

pub fn prefactor_audit(a: u32, seed: u64) -> Result<PrefactorAudit> {
    let table = crate::cg::build_cg_table(a)?;
    let d = dimension(a, 0) as usize;
    let rho = DensityMatrix::checked(a, BasisTag::Occupational, random_density_matrix(d, seed))?;
    let samples = simulate_samples(&rho, ConfigKind::NonDegenerate)?;
    let printed = reconstruct_nondeg(&samples, &table, InversionPrefactor::Printed)?;
    let derived = reconstruct_nondeg(&samples, &table, InversionPrefactor::OrthogonalityDerived)?;
    let residual_printed = crate::linalg::frob_diff(&printed.rho.matrix, &rho.matrix);
    let residual_derived = crate::linalg::frob_diff(&derived.rho.matrix, &rho.matrix);
    let constants_coincide = (0..=a).all(|s| {
        InversionPrefactor::Printed.value(s) == InversionPrefactor::OrthogonalityDerived.value(s)
    });
    let chosen = if residual_derived <= residual_printed {
        InversionPrefactor::OrthogonalityDerived
    } else {
        InversionPrefactor::Printed
    };
    Ok(PrefactorAudit { a, residual_printed, residual_derived, constants_coincide, chosen })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cg::build_cg_table;
    use crate::linalg::frob_diff;

    #[test]
    fn random_rho_is_a_state() {
        let rho = random_density_matrix(3, 7);
        let dm = DensityMatrix::checked(1, BasisTag::Occupational, rho.clone()).unwrap();
        assert_eq!(dm.dim(), 3);
        // deterministic per seed, full rank with this seed
        let again = random_density_matrix(3, 7);
        assert!(frob_diff(&rho, &again) < 1e-15);
        let ev = hermitian_eigenvalues(&rho);
        assert!(ev.iter().all(|&v| v > 1e-6));
        let other = random_density_matrix(3, 8);
        assert!(frob_diff(&rho, &other) > 1e-3);
    }

    #[test]
    fn tomogram_reference_and_mixed_values() {
        for (config, a) in [
            (ConfigKind::NonDegenerate, 1u32),
            (ConfigKind::Lambda, 1),
            (ConfigKind::Xi, 1),
            (ConfigKind::Xi, 2),
        ] {
            let d = dimension(a, 0) as usize;
            let basis_tag = working_basis(config);
            let pure = DensityMatrix {
                a,
                basis: basis_tag,
                matrix: reference_projector(config, a),
            };
            let id_point = match config {
                ConfigKind::NonDegenerate => GroupPoint::Su3(Su3Euler::default()),
                _ => GroupPoint::Su2(Su2Euler::default()),
            };
            let w = simulate_tomogram(&pure, config, &id_point).unwrap();
            assert!((w - 1.0).abs() < 1e-12, "{config} A={a}");

            let mixed = DensityMatrix { a, basis: basis_tag, matrix: mixed_density_matrix(d) };
            let point = match config {
                ConfigKind::NonDegenerate => {
                    GroupPoint::Su3(Su3Euler::new(0.0, 0.0, 0.0, 0.3, 1.0, -0.4, 0.8, 2.0))
                }
                _ => GroupPoint::Su2(Su2Euler::new(0.3, 1.0, -0.4)),
            };
            let w = simulate_tomogram(&mixed, config, &point).unwrap();
            assert!((w - 1.0 / d as f64).abs() < 1e-12, "{config} A={a}");
        }
    }

    #[test]
    fn tomogram_kills_ground_overlap_at_quarter_pulse() {
        // β12 = π/2 sends |A00⟩ population of the ground tomogram to 0
        let a = 1;
        let basis_tag = BasisTag::Occupational;
        let rho = DensityMatrix {
            a,
            basis: basis_tag,
            matrix: reference_projector(ConfigKind::NonDegenerate, a),
        };
        let tau = crate::dynamics::PulseParams::new(0.0, 0.9, 0.0, std::f64::consts::PI / 2.0);
        let angles = crate::dynamics::tau_to_euler(&tau);
        let w = simulate_tomogram(&rho, ConfigKind::NonDegenerate, &GroupPoint::Su3(angles)).unwrap();
        assert!(w.abs() < 1e-12);
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let rho = DensityMatrix {
            a: 1,
            basis: BasisTag::Occupational,
            matrix: mixed_density_matrix(3),
        };
        assert!(simulate_tomogram(&rho, ConfigKind::Lambda, &GroupPoint::Su2(Su2Euler::default()))
            .is_err());
        assert!(simulate_tomogram(
            &rho,
            ConfigKind::NonDegenerate,
            &GroupPoint::Su2(Su2Euler::default())
        )
        .is_err());
    }

    #[test]
    fn left_row_scan_matches_full_element() {
        let basis = enumerate_basis(2);
        let rep = RepRotations::occupational(&basis);
        let grid = Su3Grid::with_nodes(2, 3, 2);
        let mut checked = 0;
        left_row_scan(&rep, 0, &grid, |_, angles, _, row| {
            let full = rep.element(angles);
            for c in 0..basis.len() {
                assert!((row[c] - full[(0, c)]).norm() < 1e-12);
            }
            checked += 1;
        });
        assert_eq!(checked, grid.reduced_len());
    }

    #[test]
    fn nondeg_roundtrip_single_atom() {
        let a = 1;
        let table = build_cg_table(a).unwrap();
        let rho = DensityMatrix::checked(
            a,
            BasisTag::Occupational,
            random_density_matrix(3, 42),
        )
        .unwrap();
        let samples = simulate_samples(&rho, ConfigKind::NonDegenerate).unwrap();
        let report =
            reconstruct_nondeg(&samples, &table, InversionPrefactor::OrthogonalityDerived).unwrap();
        let err = frob_diff(&report.rho.matrix, &rho.matrix);
        assert!(err < 1e-8, "round trip error {err}");
        assert!(report.max_residual < 1e-8);
        assert!(report.mask.recoverable_count() == 9);
    }

    #[test]
    fn nondeg_roundtrip_mixed_state() {
        let a = 1;
        let table = build_cg_table(a).unwrap();
        let rho = DensityMatrix {
            a,
            basis: BasisTag::Occupational,
            matrix: mixed_density_matrix(3),
        };
        let samples = simulate_samples(&rho, ConfigKind::NonDegenerate).unwrap();
        let report =
            reconstruct_nondeg(&samples, &table, InversionPrefactor::OrthogonalityDerived).unwrap();
        assert!(frob_diff(&report.rho.matrix, &rho.matrix) < 1e-10);
    }

    #[test]
    fn lsq_agrees_with_quadrature_single_atom() {
        let a = 1;
        let table = build_cg_table(a).unwrap();
        let rho = DensityMatrix::checked(
            a,
            BasisTag::Occupational,
            random_density_matrix(3, 5),
        )
        .unwrap();
        let samples = simulate_samples(&rho, ConfigKind::NonDegenerate).unwrap();
        let quad =
            reconstruct_nondeg(&samples, &table, InversionPrefactor::OrthogonalityDerived).unwrap();
        let lsq = lsq_reconstruct_nondeg(&samples).unwrap();
        assert!(frob_diff(&quad.rho.matrix, &lsq.matrix) < 1e-8);
        assert!(frob_diff(&lsq.matrix, &rho.matrix) < 1e-8);
    }

    #[test]
    fn prefactor_audit_certifies_coincidence() {
        let audit = prefactor_audit(1, 3).unwrap();
        assert_eq!(audit.chosen, InversionPrefactor::OrthogonalityDerived);
        assert!(audit.residual_derived < 1e-8);
        // (σ+1)³ and dim(σ,σ) are the same constant, so both close
        assert!(audit.constants_coincide);
        assert!(audit.residual_printed < 1e-8);
        for s in 0..=6u32 {
            assert_eq!(((s + 1) as u64).pow(3), dimension(s, s));
        }
    }

    #[test]
    fn lambda_masks_and_counts() {
        let m1 = recoverability_mask(ConfigKind::Lambda, 1);
        assert_eq!(m1.recoverable_count(), 4);
        assert_eq!(m1.inferred.len(), 1);
        assert_eq!(m1.unrecoverable_count(), 4);

        let m2 = recoverability_mask(ConfigKind::Lambda, 2);
        assert_eq!(m2.recoverable_count(), 9);
        assert_eq!(m2.inferred.len(), 0);
        assert_eq!(m2.unrecoverable_count(), 27);

        let x2 = recoverability_mask(ConfigKind::Xi, 2);
        assert_eq!(x2.recoverable_count(), 25);
        assert_eq!(x2.unrecoverable_count(), 11);

        let nd = recoverability_mask(ConfigKind::NonDegenerate, 2);
        assert_eq!(nd.recoverable_count(), 36);
    }

    #[test]
    fn lambda_roundtrip_on_bright_block() {
        for a in [1u32, 2] {
            let d = dimension(a, 0) as usize;
            let basis = enumerate_basis(a);
            // random state supported on the bright block only
            let bright: Vec<usize> = (0..d).filter(|&k| basis.state(k).n1 == 0).collect();
            let small = random_density_matrix(bright.len(), 11 + a as u64);
            let mut matrix = CMat::zeros(d, d);
            for (r, &br) in bright.iter().enumerate() {
                for (c, &bc) in bright.iter().enumerate() {
                    matrix[(br, bc)] = small[(r, c)];
                }
            }
            let rho = DensityMatrix::checked(a, BasisTag::Dressed, matrix).unwrap();
            let samples = simulate_samples(&rho, ConfigKind::Lambda).unwrap();
            let report = reconstruct_lambda(&samples).unwrap();
            for &r in &bright {
                for &c in &bright {
                    assert!(
                        (report.rho.matrix[(r, c)] - rho.matrix[(r, c)]).norm() < 1e-10,
                        "A={a} ({r},{c})"
                    );
                }
            }
            assert!(report.max_residual < 1e-9, "A={a}");
        }
    }

    #[test]
    fn lambda_recovers_block_of_general_state() {
        // support outside the bright block never leaks into the answer
        let a = 2;
        let d = dimension(a, 0) as usize;
        let basis = enumerate_basis(a);
        let rho =
            DensityMatrix::checked(a, BasisTag::Dressed, random_density_matrix(d, 23)).unwrap();
        let samples = simulate_samples(&rho, ConfigKind::Lambda).unwrap();
        let report = reconstruct_lambda(&samples).unwrap();
        for r in 0..d {
            for c in 0..d {
                if basis.state(r).n1 == 0 && basis.state(c).n1 == 0 {
                    assert!((report.rho.matrix[(r, c)] - rho.matrix[(r, c)]).norm() < 1e-9);
                } else {
                    assert!(report.rho.matrix[(r, c)].norm() < 1e-12, "masked entries are zero");
                }
            }
        }
    }

    #[test]
    fn lambda_single_atom_inference() {
        let a = 1;
        let rho = DensityMatrix::checked(
            a,
            BasisTag::Dressed,
            random_density_matrix(3, 99),
        )
        .unwrap();
        let samples = simulate_samples(&rho, ConfigKind::Lambda).unwrap();
        let report = reconstruct_lambda(&samples).unwrap();
        // inferred dark diagonal matches the true one (normalization)
        assert!((report.rho.matrix[(0, 0)] - rho.matrix[(0, 0)]).norm() < 1e-9);
        assert_eq!(report.mask.inferred, vec![(0, 0)]);
    }

    #[test]
    fn xi_roundtrip_single_atom_complete() {
        let a = 1;
        let rho = DensityMatrix::checked(
            a,
            BasisTag::AngularMomentum,
            random_density_matrix(3, 31),
        )
        .unwrap();
        let samples = simulate_samples(&rho, ConfigKind::Xi).unwrap();
        let report = reconstruct_xi(&samples).unwrap();
        assert!(frob_diff(&report.rho.matrix, &rho.matrix) < 1e-9);
        assert_eq!(report.mask.recoverable_count(), 9);
    }

    #[test]
    fn xi_two_atoms_recovers_top_block_only() {
        let a = 2;
        let d = 6;
        let labels = lm_labels(a);
        let rho = DensityMatrix::checked(
            a,
            BasisTag::AngularMomentum,
            random_density_matrix(d, 17),
        )
        .unwrap();
        let samples = simulate_samples(&rho, ConfigKind::Xi).unwrap();
        let report = reconstruct_xi(&samples).unwrap();
        for (r, lr) in labels.iter().enumerate() {
            for (c, lc) in labels.iter().enumerate() {
                if lr.l == a && lc.l == a {
                    assert!(
                        (report.rho.matrix[(r, c)] - rho.matrix[(r, c)]).norm() < 1e-9,
                        "({r},{c})"
                    );
                } else {
                    assert!(report.rho.matrix[(r, c)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn xi_low_block_perturbation_changes_nothing() {
        let a = 2;
        let labels = lm_labels(a);
        let l0 = labels.iter().position(|l| l.l == 0).unwrap();
        let top = random_density_matrix(5, 8);
        let mut m1 = CMat::zeros(6, 6);
        for r in 0..5 {
            for c in 0..5 {
                m1[(r, c)] = top[(r, c)] * Complex64::new(0.9, 0.0);
            }
        }
        let mut m2 = m1.clone();
        m1[(l0, l0)] = Complex64::new(0.1, 0.0);
        m2[(l0, l0)] = Complex64::new(0.1, 0.0);
        // add an L=0 ↔ L=2 coherence to the second copy only
        m2[(0, l0)] = Complex64::new(0.02, 0.01);
        m2[(l0, 0)] = Complex64::new(0.02, -0.01);
        let r1 = reconstruct_xi(
            &simulate_samples(
                &DensityMatrix { a, basis: BasisTag::AngularMomentum, matrix: m1 },
                ConfigKind::Xi,
            )
            .unwrap(),
        )
        .unwrap();
        let r2 = reconstruct_xi(
            &simulate_samples(
                &DensityMatrix { a, basis: BasisTag::AngularMomentum, matrix: m2 },
                ConfigKind::Xi,
            )
            .unwrap(),
        )
        .unwrap();
        assert!(frob_diff(&r1.rho.matrix, &r2.rho.matrix) < 1e-10);
    }

    #[test]
    fn basis_transform_roundtrip_and_spectrum() {
        let a = 2;
        let rho = DensityMatrix::checked(
            a,
            BasisTag::Occupational,
            random_density_matrix(6, 4),
        )
        .unwrap();
        for tag in [BasisTag::Dressed, BasisTag::AngularMomentum] {
            let there = basis_transform(&rho, tag).unwrap();
            let back = basis_transform(&there, BasisTag::Occupational).unwrap();
            assert!(frob_diff(&back.matrix, &rho.matrix) < 1e-13);
            let tr: Complex64 = there.matrix.trace();
            assert!((tr - C_ONE).norm() < 1e-13);
            let ev1 = hermitian_eigenvalues(&rho.matrix);
            let ev2 = hermitian_eigenvalues(&there.matrix);
            for (x, y) in ev1.iter().zip(ev2.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dressed_two_atom_states_map_to_spin_labels() {
        // |011⟩ in dressed coordinates is the m = 0 member of the
        // bright triplet; transforming a projector onto the matching
        // occupational combination must land on that dressed slot
        let a = 2;
        let basis = enumerate_basis(a);
        let t = crate::dynamics::lambda_t12(&basis);
        let idx_dressed = basis.index_of(&OccupationState::new(0, 1, 1)).unwrap();
        let dressed_vec = t.column(idx_dressed).into_owned();
        let proj = &dressed_vec * dressed_vec.adjoint();
        let rho = DensityMatrix { a, basis: BasisTag::Occupational, matrix: proj };
        let in_dressed = basis_transform(&rho, BasisTag::Dressed).unwrap();
        assert!((in_dressed.matrix[(idx_dressed, idx_dressed)] - C_ONE).norm() < 1e-12);
    }

    #[test]
    fn lm_transform_sends_scalar_state_to_unit_slot() {
        let a = 2;
        let basis = enumerate_basis(a);
        let (m, labels) = crate::dynamics::lm_basis_matrix(&basis);
        let l0 = labels.iter().position(|l| l.l == 0).unwrap();
        let v = m.column(l0).into_owned();
        let rho = DensityMatrix {
            a,
            basis: BasisTag::Occupational,
            matrix: &v * v.adjoint(),
        };
        let in_lm = basis_transform(&rho, BasisTag::AngularMomentum).unwrap();
        assert!((in_lm.matrix[(l0, l0)] - C_ONE).norm() < 1e-12);
    }

    #[test]
    fn threading_is_bit_identical() {
        let a = 1;
        let table = build_cg_table(a).unwrap();
        let rho = DensityMatrix::checked(
            a,
            BasisTag::Occupational,
            random_density_matrix(3, 12),
        )
        .unwrap();
        let s1 = simulate_samples_threaded(&rho, ConfigKind::NonDegenerate, 1).unwrap();
        let s3 = simulate_samples_threaded(&rho, ConfigKind::NonDegenerate, 3).unwrap();
        assert_eq!(s1.points.len(), s3.points.len());
        for (p1, p3) in s1.points.iter().zip(s3.points.iter()) {
            assert_eq!(p1.1.to_bits(), p3.1.to_bits());
            assert_eq!(p1.2.to_bits(), p3.2.to_bits());
        }
        let r1 =
            reconstruct_nondeg_threaded(&s1, &table, InversionPrefactor::OrthogonalityDerived, 1)
                .unwrap();
        let r3 =
            reconstruct_nondeg_threaded(&s1, &table, InversionPrefactor::OrthogonalityDerived, 3)
                .unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(
                    r1.rho.matrix[(r, c)].re.to_bits(),
                    r3.rho.matrix[(r, c)].re.to_bits()
                );
                assert_eq!(
                    r1.rho.matrix[(r, c)].im.to_bits(),
                    r3.rho.matrix[(r, c)].im.to_bits()
                );
            }
        }
    }

    #[test]
    fn samples_validate_grid_contract() {
        let rho = DensityMatrix {
            a: 1,
            basis: BasisTag::Occupational,
            matrix: mixed_density_matrix(3),
        };
        let mut samples = simulate_samples(&rho, ConfigKind::NonDegenerate).unwrap();
        samples.validate_grid().unwrap();
        samples.points.pop();
        assert!(samples.validate_grid().is_err());
    }
}
