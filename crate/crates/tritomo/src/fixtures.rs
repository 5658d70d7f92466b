//! Reference data shipped with the crate: the reduced coupling tables
//! for one and two atoms, the labeled dressed and angular-momentum
//! basis states, and the closed-form single-atom pulse matrix. The
//! verification suites compare computed results against these.

use num_complex::Complex64;

use crate::dynamics::PulseParams;
use crate::linalg::{CMat, C_ZERO};

/// One reference entry of a reduced coupling table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCgEntry {
    pub a: u32,
    pub sigma: u32,
    pub n1_coupled: u32,
    pub two_i3: i32,
    pub n1: u32,
    pub two_i1: i32,
    pub nu1_star: u32,
    pub two_i2: i32,
    pub value: f64,
}

/// One reference coefficient of an angular-momentum basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmEntry {
    pub a: u32,
    pub l: u32,
    pub m: i32,
    pub n: [u32; 3],
    pub value: f64,
}

/// One labeled dressed two-atom basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedLabelEntry {
    pub n: [u32; 3],
    pub ntilde1: u32,
    pub two_i: i32,
    pub two_m: i32,
}

fn parse_rows(raw: &str) -> impl Iterator<Item = Vec<i64>> + '_ {
    raw.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .map(|f| f.trim().parse::<i64>().expect("integer field"))
                .collect()
        })
}

fn radical(num: i64, den: i64) -> f64 {
    (num.signum() as f64) * ((num.abs() as f64) / den as f64).sqrt()
}

/// All reference reduced-coupling entries (A = 1 and A = 2 tables).
pub fn reduced_cg_entries() -> Vec<ReducedCgEntry> {
    parse_rows(include_str!("../data/reduced_cg_tables.csv"))
        .map(|f| {
            assert_eq!(f.len(), 10);
            ReducedCgEntry {
                a: f[0] as u32,
                sigma: f[1] as u32,
                n1_coupled: f[2] as u32,
                two_i3: f[3] as i32,
                n1: f[4] as u32,
                two_i1: f[5] as i32,
                nu1_star: f[6] as u32,
                two_i2: f[7] as i32,
                value: radical(f[8], f[9]),
            }
        })
        .collect()
}

/// All reference angular-momentum coefficients (A = 1 and A = 2).
pub fn angular_momentum_entries() -> Vec<LmEntry> {
    parse_rows(include_str!("../data/angular_momentum_states.csv"))
        .map(|f| {
            assert_eq!(f.len(), 8);
            LmEntry {
                a: f[0] as u32,
                l: f[1] as u32,
                m: f[2] as i32,
                n: [f[3] as u32, f[4] as u32, f[5] as u32],
                value: radical(f[6], f[7]),
            }
        })
        .collect()
}

/// The labeled dressed basis for two atoms.
pub fn dressed_label_entries() -> Vec<DressedLabelEntry> {
    parse_rows(include_str!("../data/dressed_two_atom_labels.csv"))
        .map(|f| {
            assert_eq!(f.len(), 6);
            DressedLabelEntry {
                n: [f[0] as u32, f[1] as u32, f[2] as u32],
                ntilde1: f[3] as u32,
                two_i: f[4] as i32,
                two_m: f[5] as i32,
            }
        })
        .collect()
}

/// The single-atom pulse-sequence matrix in closed form, entry for
/// entry. The oracle for the composed sequence at A = 1.
pub fn single_atom_sequence(tau: &PulseParams) -> CMat {
    let PulseParams { phi23, beta23, phi12, beta12 } = *tau;
    let e12 = Complex64::from_polar(1.0, phi12);
    let e23 = Complex64::from_polar(1.0, -phi23);
    let (c12, s12) = (beta12.cos(), beta12.sin());
    let (c23, s23) = (beta23.cos(), beta23.sin());
    let i = Complex64::new(0.0, 1.0);
    CMat::from_row_slice(
        3,
        3,
        &[
            e12 * c12,
            -i * e12 * s12,
            C_ZERO,
            -i * c23 * s12,
            Complex64::new(c12 * c23, 0.0),
            -i * s23,
            -e23 * s12 * s23,
            -i * e23 * c12 * s23,
            e23 * c23,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cg::build_cg_table;
    use crate::dynamics::{lm_state, nondeg_sequence};
    use crate::linalg::frob_diff;
    use crate::su3::{enumerate_basis, OccupationState};

    #[test]
    fn reduced_tables_match_computed_values() {
        for a in [1u32, 2] {
            let table = build_cg_table(a).unwrap();
            let mut matched = 0;
            for e in reduced_cg_entries().iter().filter(|e| e.a == a) {
                let got = table
                    .reduced_cg(e.sigma, e.n1_coupled, e.two_i3, e.n1, e.two_i1, e.nu1_star, e.two_i2)
                    .unwrap();
                assert!(
                    (got - e.value).abs() < 1e-12,
                    "A={a} σ={} row {:?}: computed {got}, reference {}",
                    e.sigma,
                    (e.n1_coupled, e.two_i3, e.n1, e.nu1_star),
                    e.value
                );
                matched += 1;
            }
            assert_eq!(matched, if a == 1 { 7 } else { 26 });
        }
    }

    #[test]
    fn computed_tables_have_no_extra_rows() {
        // every nonzero computed reduced coefficient appears in the data
        for a in [1u32, 2] {
            let table = build_cg_table(a).unwrap();
            let refs = reduced_cg_entries();
            for sigma in 0..=a {
                for row in table.reduced_rows(sigma) {
                    let hit = refs.iter().find(|e| {
                        e.a == a
                            && e.sigma == sigma
                            && e.n1_coupled == row.n1_coupled
                            && e.two_i3 == row.two_i3
                            && e.n1 == row.n1
                            && e.nu1_star == row.nu1_star
                    });
                    let e = hit.unwrap_or_else(|| {
                        panic!("computed row missing from reference: A={a} σ={sigma} {row:?}")
                    });
                    assert!((e.value - row.value).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn angular_momentum_table_matches() {
        for a in [1u32, 2] {
            let basis = enumerate_basis(a);
            for l in crate::dynamics::lm_ls(a) {
                for m in -(l as i32)..=(l as i32) {
                    let v = lm_state(&basis, l, m).unwrap();
                    for (k, s) in basis.states().iter().enumerate() {
                        let expected = angular_momentum_entries()
                            .iter()
                            .find(|e| e.a == a && e.l == l && e.m == m && e.n == [s.n1, s.n2, s.n3])
                            .map(|e| e.value)
                            .unwrap_or(0.0);
                        assert!(
                            (v[k].re - expected).abs() < 1e-12 && v[k].im.abs() < 1e-14,
                            "A={a} L={l} M={m} state {s:?}: {} vs {expected}",
                            v[k].re
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dressed_labels_match_sublabels() {
        for e in dressed_label_entries() {
            let s = OccupationState::new(e.n[0], e.n[1], e.n[2]);
            assert_eq!(s.n1, e.ntilde1);
            let (ti, tm) = s.su2_sublabels((2, 3));
            assert_eq!((ti, tm), (e.two_i, e.two_m));
        }
        assert_eq!(dressed_label_entries().len(), 6);
    }

    #[test]
    fn sequence_matrix_matches_composition() {
        let basis = enumerate_basis(1);
        for k in 0..25 {
            let t = k as f64;
            let tau = PulseParams::new(
                1.7 * t - 3.0,
                0.9 * t + 0.1,
                -1.1 * t + 0.6,
                0.45 * t - 1.2,
            );
            let composed = nondeg_sequence(&basis, &tau);
            let closed = single_atom_sequence(&tau);
            assert!(frob_diff(&composed, &closed) < 1e-12, "k={k}");
        }
    }
}
