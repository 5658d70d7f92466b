//! File-based command-line front end: generate states, sample
//! tomograms, run reconstructions, dump coupling tables, and run the
//! verification suites.
//!
//! Exit codes are stable: 0 success, 1 verification failure, 2 invalid
//! configuration or malformed input, 3 density-matrix invariant
//! violation, 4 grid mismatch, 5 reconstruction residual above 1e-6,
//! 6 table fixture deviation. Diagnostics go to stderr; data goes to
//! stdout only when no output path is given.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cg::build_cg_table;
use crate::dynamics::ConfigKind;
use crate::fixtures;
use crate::formats;
use crate::linalg::{commutator, frob_diff, max_abs, CMat, C_ONE};
use crate::su3::{dimension, enumerate_basis};
use crate::tomography::{
    lsq_reconstruct_nondeg, mixed_density_matrix, prefactor_audit, random_density_matrix,
    reconstruct_lambda, reconstruct_nondeg_threaded, reconstruct_xi, reference_projector,
    simulate_samples_nondeg_on, simulate_samples_su2_on, subgroup_grid, working_basis, BasisTag,
    DensityMatrix, InversionPrefactor, TomogramSamples,
};
use crate::wigner::{
    conjugate_rep, gram_pair, su2_volume, su3_volume, RepRotations, Su2Grid, Su3Grid,
};
use crate::Error;

const RESIDUAL_GATE: f64 = 1e-6;
const MAX_ENSEMBLE: u32 = 8;

#[derive(Parser)]
#[command(
    name = "tritomo",
    about = "Tomograms of three-level atomic ensembles: simulation and inversion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a density matrix (seeded random, maximally mixed, or the
    /// configuration's reference state).
    GenRho(GenRhoArgs),
    /// Sample the tomogram of a density matrix over the exact grid.
    Simulate(SimulateArgs),
    /// Invert a tomogram sample file back into a density matrix.
    Reconstruct(ReconstructArgs),
    /// Dump the reduced coupling tables, optionally checking them
    /// against the shipped reference values.
    Tables(TablesArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenRhoArgs {
    /// Ensemble size.
    #[arg(long = "A")]
    a: u32,
    /// Level configuration (decides the working basis).
    #[arg(long, default_value = "nondeg")]
    config: String,
    /// Seed for the random state.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Preset instead of a random state: "mixed" or "pure-ref".
    #[arg(long)]
    preset: Option<String>,
    /// Output path (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Lift the ensemble-size cap.
    #[arg(long, default_value_t = false)]
    allow_inexact: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Density matrix file produced by gen-rho (or compatible).
    #[arg(long)]
    input: PathBuf,
    /// Level configuration.
    #[arg(long, default_value = "nondeg")]
    config: String,
    /// Override the per-phase-angle node count.
    #[arg(long)]
    grid_phase_nodes: Option<usize>,
    /// Override the per-beta-angle node count.
    #[arg(long)]
    grid_beta_nodes: Option<usize>,
    /// Accept node counts below the exactness minimum.
    #[arg(long, default_value_t = false)]
    allow_inexact: bool,
    /// Worker threads for the sampling scan.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output path (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Tomogram sample file produced by simulate.
    #[arg(long)]
    input: PathBuf,
    /// Worker threads for the projection scan.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output path for the matrix; the report goes to "<output>.report"
    /// (stdout for both when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Ensemble size (tables computable through A = 4; shipped
    /// references exist for A = 1, 2).
    #[arg(long = "A")]
    a: u32,
    /// Compare against the shipped reference tables.
    #[arg(long, default_value_t = false)]
    check: bool,
    /// Output path (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest ensemble size the sized suites cover (default 2).
    #[arg(long = "A", default_value_t = 2)]
    a: u32,
    /// Run a single suite by name.
    #[arg(long)]
    suite: Option<String>,
    /// Worker threads where a suite scans a grid.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args())
}

/// Same as [`run`] for an explicit argument list (test hook).
pub fn run_from<I>(args: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own help/version through this path
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command {
        Command::GenRho(a) => cmd_gen_rho(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::DensityInvariant { .. } => 3,
        Error::GridMismatch(_) => 4,
        _ => 2,
    }
}

fn parse_config(s: &str) -> Result<ConfigKind, i32> {
    ConfigKind::parse(s)
        .ok_or_else(|| fail(2, format!("--config must be nondeg, lambda or xi (got {s:?})")))
}

fn check_ensemble(a: u32, allow_override: bool) -> Result<(), i32> {
    if a == 0 {
        return Err(fail(2, "--A must be at least 1"));
    }
    if a > MAX_ENSEMBLE && !allow_override {
        return Err(fail(
            2,
            format!("--A {a} exceeds the cap of {MAX_ENSEMBLE}; pass --allow-inexact to override"),
        ));
    }
    Ok(())
}

fn with_output<F>(path: Option<&Path>, write: F) -> Result<(), i32>
where
    F: FnOnce(&mut dyn Write) -> crate::Result<()>,
{
    let result = match path {
        Some(p) => {
            let file =
                File::create(p).map_err(|e| fail(2, format!("--output {}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w).and_then(|()| w.flush().map_err(Error::from))
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write(&mut w)
        }
    };
    result.map_err(|e| fail(exit_code_for(&e), e))
}

fn cmd_gen_rho(args: GenRhoArgs) -> i32 {
    let config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Err(code) = check_ensemble(args.a, args.allow_inexact) {
        return code;
    }
    let d = dimension(args.a, 0) as usize;
    let basis = working_basis(config);
    let matrix = match args.preset.as_deref() {
        None => random_density_matrix(d, args.seed),
        Some("mixed") => mixed_density_matrix(d),
        Some("pure-ref") => reference_projector(config, args.a),
        Some(other) => {
            return fail(2, format!("--preset must be mixed or pure-ref (got {other:?})"))
        }
    };
    let rho = DensityMatrix { a: args.a, basis, matrix };
    match with_output(args.output.as_deref(), |w| formats::write_density(w, &rho)) {
        Ok(()) => 0,
        Err(code) => code,
    }
}

fn read_density_file(path: &Path) -> Result<DensityMatrix, i32> {
    let file =
        File::open(path).map_err(|e| fail(2, format!("--input {}: {e}", path.display())))?;
    formats::read_density(&mut BufReader::new(file)).map_err(|e| fail(exit_code_for(&e), e))
}

fn read_samples_file(path: &Path) -> Result<TomogramSamples, i32> {
    let file =
        File::open(path).map_err(|e| fail(2, format!("--input {}: {e}", path.display())))?;
    formats::read_samples(&mut BufReader::new(file)).map_err(|e| fail(exit_code_for(&e), e))
}

fn cmd_simulate(args: SimulateArgs) -> i32 {
    let config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let rho = match read_density_file(&args.input) {
        Ok(r) => r,
        Err(code) => return code,
    };
    if let Err(e) = rho.validate() {
        return fail(3, e);
    }
    let expected = working_basis(config);
    if rho.basis != expected {
        return fail(
            2,
            format!("--config {config} works in the {expected} basis, input is {}", rho.basis),
        );
    }
    let a = rho.a;
    if dimension(a, 0) as usize != rho.dim() {
        return fail(3, format!("matrix dimension {} does not match A={a}", rho.dim()));
    }

    let samples = match config {
        ConfigKind::NonDegenerate => {
            let (p_min, b_min) = Su3Grid::exact_counts(a);
            let p = args.grid_phase_nodes.unwrap_or(p_min);
            let b = args.grid_beta_nodes.unwrap_or(b_min);
            if (p < p_min || b < b_min) && !args.allow_inexact {
                return fail(
                    2,
                    format!(
                        "grid nodes below the exactness minimum {p_min}/{b_min}; pass --allow-inexact"
                    ),
                );
            }
            simulate_samples_nondeg_on(&rho, &Su3Grid::with_nodes(a, p, b), args.threads.max(1))
        }
        _ => {
            let exact = subgroup_grid(config, a);
            let (p_min, b_min) = Su2Grid::exact_counts(exact.max_j());
            let p = args.grid_phase_nodes.unwrap_or(p_min);
            let b = args.grid_beta_nodes.unwrap_or(b_min);
            if (p < p_min || b < b_min) && !args.allow_inexact {
                return fail(
                    2,
                    format!(
                        "grid nodes below the exactness minimum {p_min}/{b_min}; pass --allow-inexact"
                    ),
                );
            }
            simulate_samples_su2_on(&rho, config, &Su2Grid::with_nodes(exact.max_j(), p, b))
        }
    };
    match with_output(args.output.as_deref(), |w| formats::write_samples(w, &samples)) {
        Ok(()) => 0,
        Err(code) => code,
    }
}

fn cmd_reconstruct(args: ReconstructArgs) -> i32 {
    let samples = match read_samples_file(&args.input) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Err(e) = samples.validate_grid() {
        return fail(4, e);
    }
    let report = match samples.config {
        ConfigKind::NonDegenerate => {
            let table = match build_cg_table(samples.a) {
                Ok(t) => t,
                Err(e) => return fail(exit_code_for(&e), e),
            };
            reconstruct_nondeg_threaded(
                &samples,
                &table,
                InversionPrefactor::OrthogonalityDerived,
                args.threads.max(1),
            )
        }
        ConfigKind::Lambda => reconstruct_lambda(&samples),
        ConfigKind::Xi => reconstruct_xi(&samples),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(exit_code_for(&e), e),
    };

    if let Err(code) =
        with_output(args.output.as_deref(), |w| formats::write_density(w, &report.rho))
    {
        return code;
    }
    let report_path = args.output.as_ref().map(|p| {
        let mut os = p.as_os_str().to_owned();
        os.push(".report");
        PathBuf::from(os)
    });
    if let Err(code) = with_output(report_path.as_deref(), |w| {
        formats::write_report(w, &report, samples.config)
    }) {
        return code;
    }
    eprintln!(
        "reconstructed {}/{} entries, max residual {:.3e}",
        report.mask.recoverable_count(),
        report.mask.dim() * report.mask.dim(),
        report.max_residual
    );
    if report.max_residual >= RESIDUAL_GATE {
        return fail(
            5,
            format!("residual {:.3e} exceeds {RESIDUAL_GATE:.0e}", report.max_residual),
        );
    }
    0
}

fn cmd_tables(args: TablesArgs) -> i32 {
    if let Err(code) = check_ensemble(args.a, false) {
        return code;
    }
    if args.a > 4 {
        return fail(2, "--A above 4 is not supported for table dumps");
    }
    let table = match build_cg_table(args.a) {
        Ok(t) => t,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    if let Err(code) =
        with_output(args.output.as_deref(), |w| formats::write_reduced_tables(w, &table))
    {
        return code;
    }
    if args.check {
        let refs: Vec<_> =
            fixtures::reduced_cg_entries().into_iter().filter(|e| e.a == args.a).collect();
        if refs.is_empty() {
            let defect = table.orthogonality_defect();
            eprintln!(
                "no reference tables for A={}; orthogonality self-check defect {defect:.3e}",
                args.a
            );
            return if defect < 1e-10 { 0 } else { 6 };
        }
        let mut max_dev: f64 = 0.0;
        for e in &refs {
            match table.reduced_cg(
                e.sigma,
                e.n1_coupled,
                e.two_i3,
                e.n1,
                e.two_i1,
                e.nu1_star,
                e.two_i2,
            ) {
                Ok(got) => max_dev = max_dev.max((got - e.value).abs()),
                Err(err) => return fail(6, format!("missing table entry {e:?}: {err}")),
            }
        }
        eprintln!("{} fixture values matched, max deviation {max_dev:.3e}", refs.len());
        if max_dev > 1e-12 {
            return fail(6, format!("fixture deviation {max_dev:.3e} exceeds 1e-12"));
        }
    }
    0
}

struct SuiteOutcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn suite_volume(a_max: u32) -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for a in 1..=a_max {
        let g3 = Su3Grid::new(a);
        worst = worst.max((g3.volume() / su3_volume() - 1.0).abs());
        let reduced: f64 = g3.reduced_nodes().map(|(_, w)| w).sum();
        worst = worst.max((reduced / su3_volume() - 1.0).abs());
        for max_j in [a, 2 * a] {
            let g2 = Su2Grid::new(max_j);
            worst = worst.max((g2.volume() / su2_volume() - 1.0).abs());
        }
    }
    SuiteOutcome {
        name: "volume",
        pass: worst < 1e-10,
        detail: format!("max relative volume error {worst:.3e}"),
    }
}

/// Distinct irreps arising from the couplings at sizes 1..=a_max, as
/// rotation machines.
fn irrep_zoo(a_max: u32) -> Vec<(String, RepRotations)> {
    let mut out: Vec<(String, RepRotations)> = Vec::new();
    for a in 1..=a_max {
        let basis = enumerate_basis(a);
        out.push((format!("({a},0)"), RepRotations::occupational(&basis)));
        out.push((format!("(0,{a})"), conjugate_rep(&basis)));
    }
    let top = build_cg_table(a_max).expect("table builds");
    for irrep in &top.irreps {
        let s = irrep.sigma;
        let gens = top.coupled_irrep_generators(s).expect("closed restriction");
        let rep =
            RepRotations::from_generators(irrep.dim(), &|i, j| gens[3 * (i - 1) + (j - 1)].clone())
                .expect("coupled generators satisfy the algebra");
        out.push((format!("({s},{s})"), rep));
    }
    out
}

fn suite_orthogonality(a_max: u32) -> SuiteOutcome {
    let grid = Su3Grid::new(a_max);
    let zoo = irrep_zoo(a_max);
    let vol = su3_volume();
    let mut worst: f64 = 0.0;
    for (i, (name_i, rep_i)) in zoo.iter().enumerate() {
        for (name_j, rep_j) in zoo.iter().skip(i) {
            let same = name_i == name_j;
            let gram = gram_pair(&grid, rep_i, rep_j);
            let (d1, d2) = (rep_i.dim(), rep_j.dim());
            let scale = vol / d1 as f64;
            for r in 0..d1 {
                for c in 0..d1 {
                    for rp in 0..d2 {
                        for cp in 0..d2 {
                            let expect = if same && r == rp && c == cp { scale } else { 0.0 };
                            let g = gram.get(r, c, rp, cp);
                            let dev = ((g.re - expect).abs()).max(g.im.abs()) / scale;
                            worst = worst.max(dev);
                        }
                    }
                }
            }
        }
    }
    SuiteOutcome {
        name: "orthogonality",
        pass: worst < 1e-8,
        detail: format!("max normalized deviation {worst:.3e} over {} irreps", zoo.len()),
    }
}

fn suite_conjugation(a_max: u32) -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for a in 1..=a_max {
        let basis = enumerate_basis(a);
        let fund = RepRotations::occupational(&basis);
        let conj = conjugate_rep(&basis);
        let sign = |k: usize| if basis.state(k).n2 % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..10u32 {
            let t = k as f64 + a as f64 * 0.37;
            let ang = crate::wigner::Su3Euler::new(
                1.1 * t,
                0.17 + 2.5 * t.sin().abs(),
                -0.7 * t,
                0.51 * t,
                0.11 + 2.5 * t.cos().abs(),
                2.3 * t,
                0.4 + 2.0 * (0.5 * t).sin().abs(),
                -1.9 * t,
            );
            let d = fund.element(&ang);
            let dbar = conj.element(&ang);
            for r in 0..basis.len() {
                for c in 0..basis.len() {
                    let dev = (d[(r, c)].conj() - dbar[(r, c)] * (sign(r) * sign(c))).norm();
                    worst = worst.max(dev);
                }
            }
        }
    }
    SuiteOutcome {
        name: "conjugation",
        pass: worst < 1e-10,
        detail: format!("max identity deviation {worst:.3e}"),
    }
}

fn suite_nondeg_matrix() -> SuiteOutcome {
    let basis = enumerate_basis(1);
    let mut worst: f64 = 0.0;
    for k in 0..25 {
        let t = k as f64;
        let tau = crate::dynamics::PulseParams::new(
            1.3 * t - 2.0,
            0.7 * t + 0.3,
            -0.9 * t + 1.1,
            0.4 * t - 0.8,
        );
        let composed = crate::dynamics::nondeg_sequence(&basis, &tau);
        let closed = fixtures::single_atom_sequence(&tau);
        worst = worst.max(max_abs(&(composed - closed)));
    }
    SuiteOutcome {
        name: "nondeg-matrix",
        pass: worst < 1e-12,
        detail: format!("max entry deviation {worst:.3e} over 25 pulse tuples"),
    }
}

fn suite_cg_tables() -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for a in [1u32, 2] {
        let table = match build_cg_table(a) {
            Ok(t) => t,
            Err(e) => {
                return SuiteOutcome {
                    name: "cg-tables",
                    pass: false,
                    detail: format!("table build failed: {e}"),
                }
            }
        };
        for e in fixtures::reduced_cg_entries().iter().filter(|e| e.a == a) {
            match table.reduced_cg(
                e.sigma,
                e.n1_coupled,
                e.two_i3,
                e.n1,
                e.two_i1,
                e.nu1_star,
                e.two_i2,
            ) {
                Ok(got) => {
                    worst = worst.max((got - e.value).abs());
                    count += 1;
                }
                Err(err) => {
                    return SuiteOutcome {
                        name: "cg-tables",
                        pass: false,
                        detail: format!("missing entry: {err}"),
                    }
                }
            }
        }
    }
    SuiteOutcome {
        name: "cg-tables",
        pass: worst < 1e-12,
        detail: format!("{count} reference values, max deviation {worst:.3e}"),
    }
}

fn suite_dark_block(a_max: u32) -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for a in 1..=a_max.max(3) {
        let basis = enumerate_basis(a);
        for k in 0..5u32 {
            let ang = crate::wigner::Su2Euler::new(
                0.9 * k as f64 - 1.0,
                0.6 * k as f64 + 0.2,
                1.7 * k as f64,
            );
            let u = crate::dynamics::lambda_pulse_sequence(&basis, &ang);
            for n1 in 0..=a {
                let mut proj = CMat::zeros(basis.len(), basis.len());
                for (i, s) in basis.states().iter().enumerate() {
                    if s.n1 == n1 {
                        proj[(i, i)] = C_ONE;
                    }
                }
                worst = worst.max(max_abs(&commutator(&u, &proj)));
            }
        }
    }
    SuiteOutcome {
        name: "dark-block",
        pass: worst < 1e-12,
        detail: format!("max projector commutator {worst:.3e}"),
    }
}

fn suite_xi_block(a_max: u32) -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for a in 1..=a_max.max(3) {
        let basis = enumerate_basis(a);
        let (lz, _, lminus) = crate::dynamics::xi_generators(&basis);
        let lplus = lminus.adjoint();
        let lsq = &lz * &lz + (&lplus * &lminus + &lminus * &lplus).scale(0.5);
        for k in 0..5u32 {
            let ang = crate::wigner::Su2Euler::new(
                -0.4 * k as f64,
                0.5 * k as f64 + 0.4,
                0.8 * k as f64 - 0.3,
            );
            let u = crate::dynamics::xi_pulse_sequence(&basis, &ang);
            worst = worst.max(max_abs(&commutator(&u, &lsq)));
        }
    }
    SuiteOutcome {
        name: "xi-block",
        pass: worst < 1e-12,
        detail: format!("max Casimir commutator {worst:.3e}"),
    }
}

fn suite_lm_table() -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for a in [1u32, 2] {
        let basis = enumerate_basis(a);
        for e in fixtures::angular_momentum_entries().iter().filter(|e| e.a == a) {
            let v = match crate::dynamics::lm_state(&basis, e.l, e.m) {
                Ok(v) => v,
                Err(err) => {
                    return SuiteOutcome {
                        name: "lm-table",
                        pass: false,
                        detail: format!("state build failed: {err}"),
                    }
                }
            };
            let idx = basis
                .index_of(&crate::su3::OccupationState::new(e.n[0], e.n[1], e.n[2]))
                .expect("fixture state exists");
            worst = worst.max((v[idx].re - e.value).abs().max(v[idx].im.abs()));
        }
    }
    // simultaneous eigenbasis and completeness through A = 4
    for a in 1..=4u32 {
        let basis = enumerate_basis(a);
        let (m, _) = crate::dynamics::lm_basis_matrix(&basis);
        worst = worst.max(crate::linalg::unitarity_defect(&m));
    }
    SuiteOutcome {
        name: "lm-table",
        pass: worst < 1e-12,
        detail: format!("max coefficient/unitarity deviation {worst:.3e}"),
    }
}

fn suite_prefactor_audit() -> SuiteOutcome {
    match prefactor_audit(1, 2024) {
        Ok(audit) => {
            let pass = audit.residual_derived < 1e-8 && audit.constants_coincide;
            SuiteOutcome {
                name: "prefactor-audit",
                pass,
                detail: format!(
                    "printed residual {:.3e}, dimension residual {:.3e}, constants coincide: {}; inversion uses {}",
                    audit.residual_printed,
                    audit.residual_derived,
                    audit.constants_coincide,
                    audit.chosen.as_str()
                ),
            }
        }
        Err(e) => SuiteOutcome {
            name: "prefactor-audit",
            pass: false,
            detail: format!("audit failed: {e}"),
        },
    }
}

fn suite_roundtrip(a_max: u32, threads: usize) -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for a in 1..=a_max.min(2) {
        let table = match build_cg_table(a) {
            Ok(t) => t,
            Err(e) => {
                return SuiteOutcome {
                    name: "roundtrip",
                    pass: false,
                    detail: format!("table build failed: {e}"),
                }
            }
        };
        let d = dimension(a, 0) as usize;
        let rho = DensityMatrix {
            a,
            basis: BasisTag::Occupational,
            matrix: random_density_matrix(d, 77 + a as u64),
        };
        let grid = Su3Grid::new(a);
        let samples = simulate_samples_nondeg_on(&rho, &grid, threads);
        match reconstruct_nondeg_threaded(
            &samples,
            &table,
            InversionPrefactor::OrthogonalityDerived,
            threads,
        ) {
            Ok(rec) => worst = worst.max(frob_diff(&rec.rho.matrix, &rho.matrix)),
            Err(e) => {
                return SuiteOutcome {
                    name: "roundtrip",
                    pass: false,
                    detail: format!("inversion failed: {e}"),
                }
            }
        }
        match lsq_reconstruct_nondeg(&samples) {
            Ok(lsq) => worst = worst.max(frob_diff(&lsq.matrix, &rho.matrix)),
            Err(e) => {
                return SuiteOutcome {
                    name: "roundtrip",
                    pass: false,
                    detail: format!("least-squares oracle failed: {e}"),
                }
            }
        }
    }
    SuiteOutcome {
        name: "roundtrip",
        pass: worst < 1e-8,
        detail: format!("max round-trip error {worst:.3e} (quadrature and least-squares)"),
    }
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    if let Err(code) = check_ensemble(args.a, false) {
        return code;
    }
    let a = args.a.min(2); // suites are sized for the reference regime
    let threads = args.threads.max(1);
    let all: Vec<(&str, Box<dyn Fn() -> SuiteOutcome>)> = vec![
        ("volume", Box::new(move || suite_volume(a))),
        ("orthogonality", Box::new(move || suite_orthogonality(a))),
        ("conjugation", Box::new(move || suite_conjugation(a))),
        ("nondeg-matrix", Box::new(suite_nondeg_matrix)),
        ("cg-tables", Box::new(suite_cg_tables)),
        ("dark-block", Box::new(move || suite_dark_block(a))),
        ("xi-block", Box::new(move || suite_xi_block(a))),
        ("lm-table", Box::new(suite_lm_table)),
        ("prefactor-audit", Box::new(suite_prefactor_audit)),
        ("roundtrip", Box::new(move || suite_roundtrip(a, threads))),
    ];
    let requested: Vec<&(&str, Box<dyn Fn() -> SuiteOutcome>)> = match &args.suite {
        None => all.iter().collect(),
        Some(name) => {
            let hits: Vec<_> = all.iter().filter(|(n, _)| n == name).collect();
            if hits.is_empty() {
                let names: Vec<&str> = all.iter().map(|(n, _)| *n).collect();
                return fail(2, format!("--suite {name:?} unknown; choose from {names:?}"));
            }
            hits
        }
    };
    let mut any_failed = false;
    for (_, runner) in requested {
        let outcome = runner();
        println!(
            "suite={} status={} detail={}",
            outcome.name,
            if outcome.pass { "pass" } else { "fail" },
            outcome.detail
        );
        any_failed |= !outcome.pass;
    }
    if any_failed {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        assert!(parse_config("nondeg").is_ok());
        assert!(parse_config("lambda").is_ok());
        assert!(parse_config("xi").is_ok());
        assert!(parse_config("bogus").is_err());
    }

    #[test]
    fn ensemble_cap() {
        assert!(check_ensemble(1, false).is_ok());
        assert!(check_ensemble(8, false).is_ok());
        assert!(check_ensemble(9, false).is_err());
        assert!(check_ensemble(9, true).is_ok());
        assert!(check_ensemble(0, true).is_err());
    }
}
