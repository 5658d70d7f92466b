//! On-disk formats: a structured text format for density matrices
//! (small, precision-critical — 17 significant digits) and CSV for
//! tomogram sample sets (one row per grid node, streamable).

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::dynamics::ConfigKind;
use crate::linalg::CMat;
use crate::tomography::{
    BasisTag, DensityMatrix, GridSpec, GroupPoint, ReconstructionReport, TomogramSamples,
};
use crate::wigner::{Su2Euler, Su3Euler};
use crate::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Write a density matrix: header lines, then one row per line with
/// re/im pairs at full precision.
pub fn write_density(w: &mut dyn Write, rho: &DensityMatrix) -> Result<()> {
    writeln!(w, "# density-matrix v1")?;
    writeln!(w, "dim {}", rho.dim())?;
    writeln!(w, "basis {}", rho.basis)?;
    writeln!(w, "a {}", rho.a)?;
    for r in 0..rho.dim() {
        let mut fields = Vec::with_capacity(2 * rho.dim());
        for c in 0..rho.dim() {
            let z = rho.matrix[(r, c)];
            fields.push(format!("{:.16e}", z.re));
            fields.push(format!("{:.16e}", z.im));
        }
        writeln!(w, "{}", fields.join(" "))?;
    }
    Ok(())
}

/// Read a density matrix written by [`write_density`]. The caller is
/// responsible for invariant checks if it needs a physical state.
pub fn read_density(r: &mut impl BufRead) -> Result<DensityMatrix> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))??;
    if header.trim() != "# density-matrix v1" {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut dim = None;
    let mut basis = None;
    let mut a = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(v) = t.strip_prefix("dim ") {
            dim = Some(v.trim().parse::<usize>().map_err(|e| bad(format!("dim: {e}")))?);
        } else if let Some(v) = t.strip_prefix("basis ") {
            basis =
                Some(BasisTag::parse(v.trim()).ok_or_else(|| bad(format!("unknown basis {v:?}")))?);
        } else if let Some(v) = t.strip_prefix("a ") {
            a = Some(v.trim().parse::<u32>().map_err(|e| bad(format!("a: {e}")))?);
        } else {
            let fields: Vec<f64> = t
                .split_whitespace()
                .map(|f| f.parse::<f64>().map_err(|e| bad(format!("entry: {e}"))))
                .collect::<Result<_>>()?;
            rows.push(fields);
        }
    }
    let dim = dim.ok_or_else(|| bad("missing dim"))?;
    let basis = basis.ok_or_else(|| bad("missing basis"))?;
    let a = a.ok_or_else(|| bad("missing a"))?;
    if rows.len() != dim || rows.iter().any(|r| r.len() != 2 * dim) {
        return Err(bad("matrix body does not match dim"));
    }
    let mut m = CMat::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        for c in 0..dim {
            m[(r, c)] = Complex64::new(row[2 * c], row[2 * c + 1]);
        }
    }
    Ok(DensityMatrix { a, basis, matrix: m })
}

/// Write tomogram samples as CSV: a comment header carrying the
/// configuration and grid spec, a column header, one row per node.
pub fn write_samples(w: &mut dyn Write, s: &TomogramSamples) -> Result<()> {
    match s.grid {
        GridSpec::Su3 { phase_nodes, beta_nodes } => {
            writeln!(
                w,
                "# tomogram v1 config={} a={} grid=su3 phase_nodes={} beta_nodes={}",
                s.config, s.a, phase_nodes, beta_nodes
            )?;
            writeln!(w, "alpha1,beta1,gamma1,alpha2,beta2,alpha3,beta3,gamma3,weight,omega")?;
            for (p, weight, omega) in &s.points {
                let GroupPoint::Su3(ang) = p else {
                    return Err(bad("point type mismatch"));
                };
                let a = ang.as_array();
                let coords: Vec<String> = a.iter().map(|x| format!("{x:.16e}")).collect();
                writeln!(w, "{},{weight:.16e},{omega:.16e}", coords.join(","))?;
            }
        }
        GridSpec::Su2 { max_j, phase_nodes, beta_nodes } => {
            writeln!(
                w,
                "# tomogram v1 config={} a={} grid=su2 max_j={} phase_nodes={} beta_nodes={}",
                s.config, s.a, max_j, phase_nodes, beta_nodes
            )?;
            writeln!(w, "alpha,beta,gamma,weight,omega")?;
            for (p, weight, omega) in &s.points {
                let GroupPoint::Su2(ang) = p else {
                    return Err(bad("point type mismatch"));
                };
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{weight:.16e},{omega:.16e}",
                    ang.alpha, ang.beta, ang.gamma
                )?;
            }
        }
    }
    Ok(())
}

fn header_field<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(&format!("{key}=")[..]))
        .ok_or_else(|| bad(format!("header missing {key}")))
}

/// Read a sample CSV written by [`write_samples`].
pub fn read_samples(r: &mut impl BufRead) -> Result<TomogramSamples> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))??;
    if !header.starts_with("# tomogram v1 ") {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let config = ConfigKind::parse(header_field(&header, "config")?)
        .ok_or_else(|| bad("unknown config"))?;
    let a: u32 = header_field(&header, "a")?.parse().map_err(|e| bad(format!("a: {e}")))?;
    let kind = header_field(&header, "grid")?;
    let phase_nodes: usize = header_field(&header, "phase_nodes")?
        .parse()
        .map_err(|e| bad(format!("phase_nodes: {e}")))?;
    let beta_nodes: usize = header_field(&header, "beta_nodes")?
        .parse()
        .map_err(|e| bad(format!("beta_nodes: {e}")))?;
    let grid = match kind {
        "su3" => GridSpec::Su3 { phase_nodes, beta_nodes },
        "su2" => GridSpec::Su2 {
            max_j: header_field(&header, "max_j")?
                .parse()
                .map_err(|e| bad(format!("max_j: {e}")))?,
            phase_nodes,
            beta_nodes,
        },
        other => return Err(bad(format!("unknown grid kind {other:?}"))),
    };
    let _columns = lines.next().ok_or_else(|| bad("missing column header"))??;
    let mut points = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = t
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|e| bad(format!("row: {e}"))))
            .collect::<Result<_>>()?;
        match grid {
            GridSpec::Su3 { .. } => {
                if fields.len() != 10 {
                    return Err(bad("su3 rows carry 10 columns"));
                }
                let ang = Su3Euler::new(
                    fields[0], fields[1], fields[2], fields[3], fields[4], fields[5], fields[6],
                    fields[7],
                );
                points.push((GroupPoint::Su3(ang), fields[8], fields[9]));
            }
            GridSpec::Su2 { .. } => {
                if fields.len() != 5 {
                    return Err(bad("su2 rows carry 5 columns"));
                }
                let ang = Su2Euler::new(fields[0], fields[1], fields[2]);
                points.push((GroupPoint::Su2(ang), fields[3], fields[4]));
            }
        }
    }
    Ok(TomogramSamples { config, a, grid, points })
}

/// Write the reconstruction report: counts, residuals, notes, and the
/// mask (one 0/1 row per matrix row; masked entries of the matrix file
/// are placeholders, not estimates).
pub fn write_report(
    w: &mut dyn Write,
    report: &ReconstructionReport,
    config: ConfigKind,
) -> Result<()> {
    writeln!(w, "# reconstruction-report v1")?;
    writeln!(w, "config {}", config)?;
    writeln!(w, "a {}", report.rho.a)?;
    writeln!(w, "basis {}", report.rho.basis)?;
    let d = report.mask.dim();
    writeln!(
        w,
        "recoverable {}/{}",
        report.mask.recoverable_count(),
        d * d
    )?;
    writeln!(w, "inferred {}", report.mask.inferred.len())?;
    writeln!(w, "unrecoverable {}", report.mask.unrecoverable_count())?;
    writeln!(w, "max-residual {:.3e}", report.max_residual)?;
    writeln!(w, "hermiticity-defect {:.3e}", report.hermiticity_defect)?;
    for note in &report.notes {
        writeln!(w, "note {note}")?;
    }
    for &(r, c) in &report.mask.inferred {
        writeln!(w, "inferred-entry {r} {c}")?;
    }
    writeln!(w, "mask")?;
    for r in 0..d {
        let row: String = (0..d)
            .map(|c| if report.mask.recoverable[r][c] { '1' } else { '0' })
            .collect();
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// Write reduced coupling tables in the display column layout.
pub fn write_reduced_tables(w: &mut dyn Write, table: &crate::cg::CgTable) -> Result<()> {
    writeln!(w, "# reduced-cg v1 a={}", table.a())?;
    writeln!(w, "sigma,N1,two_I3,n1,two_I1,nu1_star,two_I2,value")?;
    for sigma in crate::cg::decompose_product(table.a()) {
        for row in table.reduced_rows(sigma) {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{:.16e}",
                row.sigma,
                row.n1_coupled,
                row.two_i3,
                row.n1,
                row.two_i1,
                row.nu1_star,
                row.two_i2,
                row.value
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_diff;
    use crate::tomography::{random_density_matrix, simulate_samples};

    #[test]
    fn density_roundtrip() {
        let rho = DensityMatrix {
            a: 2,
            basis: BasisTag::Dressed,
            matrix: random_density_matrix(6, 3),
        };
        let mut buf = Vec::new();
        write_density(&mut buf, &rho).unwrap();
        let back = read_density(&mut std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.a, 2);
        assert_eq!(back.basis, BasisTag::Dressed);
        assert!(frob_diff(&back.matrix, &rho.matrix) < 1e-15);
    }

    #[test]
    fn density_rejects_garbage() {
        let mut c = std::io::Cursor::new(b"# density-matrix v1\ndim 2\nbasis occupational\na 1\n1 0\n".to_vec());
        assert!(read_density(&mut c).is_err());
        let mut c2 = std::io::Cursor::new(b"nonsense".to_vec());
        assert!(read_density(&mut c2).is_err());
    }

    #[test]
    fn samples_roundtrip_both_kinds() {
        let rho_occ = DensityMatrix {
            a: 1,
            basis: BasisTag::Occupational,
            matrix: random_density_matrix(3, 9),
        };
        let s = simulate_samples(&rho_occ, ConfigKind::NonDegenerate).unwrap();
        let mut buf = Vec::new();
        write_samples(&mut buf, &s).unwrap();
        let back = read_samples(&mut std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.config, ConfigKind::NonDegenerate);
        assert_eq!(back.points.len(), s.points.len());
        back.validate_grid().unwrap();
        for (x, y) in back.points.iter().zip(s.points.iter()) {
            assert!((x.2 - y.2).abs() < 1e-15);
        }

        let rho_lm = DensityMatrix {
            a: 1,
            basis: BasisTag::AngularMomentum,
            matrix: random_density_matrix(3, 10),
        };
        let s2 = simulate_samples(&rho_lm, ConfigKind::Xi).unwrap();
        let mut buf2 = Vec::new();
        write_samples(&mut buf2, &s2).unwrap();
        let back2 = read_samples(&mut std::io::Cursor::new(&buf2)).unwrap();
        assert_eq!(back2.config, ConfigKind::Xi);
        back2.validate_grid().unwrap();
    }

    #[test]
    fn report_layout() {
        let rho_lm = DensityMatrix {
            a: 2,
            basis: BasisTag::AngularMomentum,
            matrix: random_density_matrix(6, 10),
        };
        let s = simulate_samples(&rho_lm, ConfigKind::Xi).unwrap();
        let report = crate::tomography::reconstruct_xi(&s).unwrap();
        let mut buf = Vec::new();
        write_report(&mut buf, &report, ConfigKind::Xi).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("recoverable 25/36"));
        assert!(text.contains("mask"));
    }
}
