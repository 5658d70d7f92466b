//! SU(3) Clebsch-Gordan tables for coupling the ensemble irrep to its
//! conjugate, and the coupled-irrep generator matrices.
//!
//! The product of the A-atom irrep with its conjugate decomposes
//! multiplicity-free into the self-conjugate chain (σ,σ), σ = A..0.
//! Each coupled basis is extracted numerically in the concrete product
//! space: find the highest-weight vector, ladder down with the total
//! lowering operators, split degenerate weight spaces with the
//! (2,3)-subalgebra Casimir, and fix every phase so the coefficients
//! are real with a deterministic sign convention (the coefficient on
//! the largest ensemble occupation n1 in each multiplet is positive,
//! which reduces to the conventional positive highest coefficient on
//! |A00⟩).

use std::collections::HashMap;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;

use crate::linalg::CMat;
use crate::su3::{
    collective_operator, conjugate_generator, dimension, enumerate_basis, BasisIndexMap,
    OccupationState,
};
use crate::{Error, Result};

type RMat = DMatrix<f64>;

fn big_factorial(n: i32) -> BigInt {
    (1..=n as i64).map(BigInt::from).fold(BigInt::one(), |a, b| a * b)
}

/// SU(2) Clebsch-Gordan coefficient C^{J M}_{j1 m1, j2 m2} in the
/// Condon-Shortley convention, spins passed as doubled integers.
///
/// Violated selection rules give 0, not an error. Evaluated in exact
/// rational arithmetic under the square root, so the f64 result is
/// correct to rounding for any spins met here.
pub fn su2_cg(two_j1: i32, two_m1: i32, two_j2: i32, two_m2: i32, two_j: i32, two_m: i32) -> f64 {
    if two_m1 + two_m2 != two_m
        || two_m1.abs() > two_j1
        || two_m2.abs() > two_j2
        || two_m.abs() > two_j
        || (two_j1 + two_m1) % 2 != 0
        || (two_j2 + two_m2) % 2 != 0
        || (two_j + two_m) % 2 != 0
        || two_j < (two_j1 - two_j2).abs()
        || two_j > two_j1 + two_j2
        || (two_j1 + two_j2 + two_j) % 2 != 0
    {
        return 0.0;
    }
    let f = |x: i32| -> BigInt {
        debug_assert!(x % 2 == 0 && x >= 0);
        big_factorial(x / 2)
    };
    // prefactor under the root: (2J+1) · triangle · m-factorials
    let numer = BigInt::from(two_j + 1)
        * f(two_j1 + two_j2 - two_j)
        * f(two_j1 - two_j2 + two_j)
        * f(-two_j1 + two_j2 + two_j)
        * f(two_j + two_m)
        * f(two_j - two_m)
        * f(two_j1 - two_m1)
        * f(two_j1 + two_m1)
        * f(two_j2 - two_m2)
        * f(two_j2 + two_m2);
    let denom = f(two_j1 + two_j2 + two_j + 2);
    let prefactor = BigRational::new(numer, denom);

    let mut sum = BigRational::zero();
    let k_min = 0.max((two_j2 - two_j - two_m1) / 2).max((two_j1 + two_m2 - two_j) / 2);
    let k_max = ((two_j1 + two_j2 - two_j) / 2)
        .min((two_j1 - two_m1) / 2)
        .min((two_j2 + two_m2) / 2);
    for k in k_min..=k_max {
        let den = big_factorial(k)
            * f(two_j1 + two_j2 - two_j - 2 * k)
            * f(two_j1 - two_m1 - 2 * k)
            * f(two_j2 + two_m2 - 2 * k)
            * f(two_j - two_j2 + two_m1 + 2 * k)
            * f(two_j - two_j1 - two_m2 + 2 * k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let value2 = prefactor * sum.clone() * sum;
    sign * value2.to_f64().expect("rational fits f64").sqrt()
}

/// Irrep labels (σ,σ) appearing in the product decomposition: A..0.
pub fn decompose_product(a: u32) -> Vec<u32> {
    (0..=a).rev().collect()
}

/// Label of one coupled basis state: the occupation-like triple N
/// (summing to 3σ) and the (2,3)-subalgebra spin; the projection
/// M3 = (N2-N3)/2 is carried by the triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoupledLabel {
    pub n: [u32; 3],
    pub two_i3: i32,
}

impl CoupledLabel {
    pub fn two_m3(&self) -> i32 {
        self.n[1] as i32 - self.n[2] as i32
    }
}

/// One coupled irrep (σ,σ) realized inside the product space: labeled
/// orthonormal basis columns plus the restricted generators.
#[derive(Debug, Clone)]
pub struct CoupledIrrep {
    pub sigma: u32,
    pub labels: Vec<CoupledLabel>,
    /// d²×dim(σ,σ) real coefficients; column k expands coupled state k
    /// over product vectors indexed p = i·d + j (i: ensemble basis, j:
    /// conjugate slot).
    pub vectors: RMat,
    index: HashMap<CoupledLabel, usize>,
}

impl CoupledIrrep {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &CoupledLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Column of the zero-weight (2,3)-singlet |(σσσ), I3=0⟩ — the left
    /// index used in the non-degenerate inversion.
    pub fn singlet_index(&self) -> usize {
        self.index_of(&CoupledLabel { n: [self.sigma; 3], two_i3: 0 })
            .expect("(σσσ) I3=0 exists in every (σ,σ)")
    }
}

/// The full coupling table for ensemble size A.
#[derive(Debug, Clone)]
pub struct CgTable {
    a: u32,
    basis: BasisIndexMap,
    pub irreps: Vec<CoupledIrrep>,
}

/// A row of the reduced-coefficient table in display layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRow {
    pub sigma: u32,
    pub n1_coupled: u32,
    pub two_i3: i32,
    pub n1: u32,
    pub two_i1: i32,
    pub nu1_star: u32,
    pub two_i2: i32,
    pub value: f64,
}

fn weight_of_product(n: &OccupationState, nu: &OccupationState) -> (i32, i32) {
    let (h1n, h2n) = n.weight();
    let (h1v, h2v) = nu.weight();
    (h1n - h1v, h2n - h2v)
}

struct Builder {
    basis: BasisIndexMap,
    d: usize,
    gens: Vec<RMat>, // total generators, indexed 3(i-1)+(j-1)
}

impl Builder {
    fn new(a: u32) -> Self {
        let basis = enumerate_basis(a);
        let d = basis.len();
        let eye = RMat::identity(d, d);
        let mut gens = Vec::with_capacity(9);
        for i in 1..=3 {
            for j in 1..=3 {
                let g = to_real(&collective_operator(&basis, i, j));
                let gbar = to_real(&conjugate_generator(&basis, i, j));
                gens.push(g.kronecker(&eye) + eye.kronecker(&gbar));
            }
        }
        Self { basis, d, gens }
    }

    fn gen(&self, i: usize, j: usize) -> &RMat {
        &self.gens[3 * (i - 1) + (j - 1)]
    }

    /// Product weight of the basis vector p = i·d + j.
    fn weight(&self, p: usize) -> (i32, i32) {
        let n = self.basis.state(p / self.d);
        let nu = self.basis.state(p % self.d);
        weight_of_product(&n, &nu)
    }

    /// Indices of product vectors with the given weight.
    fn weight_space(&self, w: (i32, i32)) -> Vec<usize> {
        (0..self.d * self.d).filter(|&p| self.weight(p) == w).collect()
    }

    /// Highest-weight vector of (σ,σ): weight (σ,σ), killed by the
    /// total raising operators S12 and S23.
    fn highest_weight(&self, sigma: u32) -> Result<nalgebra::DVector<f64>> {
        let ws = self.weight_space((sigma as i32, sigma as i32));
        let dd = self.d * self.d;
        let mut k = RMat::zeros(2 * dd, ws.len());
        for (col, &p) in ws.iter().enumerate() {
            let s12col = self.gen(1, 2).column(p);
            let s23col = self.gen(2, 3).column(p);
            for r in 0..dd {
                k[(r, col)] = s12col[r];
                k[(dd + r, col)] = s23col[r];
            }
        }
        let svd = k.svd(false, true);
        let tol = 1e-9 * svd.singular_values.max().max(1.0);
        let null_cols: Vec<usize> = (0..ws.len())
            .filter(|&c| {
                if c < svd.singular_values.len() {
                    svd.singular_values[c] < tol
                } else {
                    true
                }
            })
            .collect();
        if null_cols.len() != 1 {
            return Err(Error::HighestWeightDegenerate { sigma, found: null_cols.len() });
        }
        let vt = svd.v_t.expect("requested");
        let coeffs = vt.row(null_cols[0]);
        let mut v = nalgebra::DVector::<f64>::zeros(dd);
        for (col, &p) in ws.iter().enumerate() {
            v[p] = coeffs[col];
        }
        v /= v.norm();
        Ok(v)
    }

    /// Total (2,3)-subalgebra Casimir J² on the product space.
    fn casimir23(&self) -> RMat {
        let jz = (self.gen(2, 2) - self.gen(3, 3)).scale(0.5);
        let jp = self.gen(2, 3);
        let jm = self.gen(3, 2);
        &jz * &jz + (jp * jm + jm * jp).scale(0.5)
    }

    fn build_irrep(&self, sigma: u32) -> Result<CoupledIrrep> {
        let dd = self.d * self.d;
        let target_dim = dimension(sigma, sigma) as usize;
        let v_hw = self.highest_weight(sigma)?;

        // span the invariant subspace by repeated lowering
        let lowering = [self.gen(2, 1), self.gen(3, 2), self.gen(3, 1)];
        let mut by_weight: HashMap<(i32, i32), Vec<nalgebra::DVector<f64>>> = HashMap::new();
        by_weight.insert((sigma as i32, sigma as i32), vec![v_hw.clone()]);
        let mut queue = vec![v_hw];
        let mut total = 1usize;
        while let Some(v) = queue.pop() {
            for low in lowering {
                let mut w = low * &v;
                if w.norm() < 1e-9 {
                    continue;
                }
                // weight of w: all its support shares one weight
                let p = (0..dd).max_by(|&x, &y| w[x].abs().partial_cmp(&w[y].abs()).unwrap()).unwrap();
                let wt = self.weight(p);
                let bucket = by_weight.entry(wt).or_default();
                for u in bucket.iter() {
                    let overlap = u.dot(&w);
                    w -= u * overlap;
                }
                if w.norm() > 1e-8 {
                    w /= w.norm();
                    bucket.push(w.clone());
                    queue.push(w);
                    total += 1;
                }
            }
        }
        assert_eq!(total, target_dim, "lowering span must fill (σ,σ)");

        // split each weight space by the (2,3) Casimir and tag spins
        let cas = self.casimir23();
        let mut tagged: HashMap<CoupledLabel, nalgebra::DVector<f64>> = HashMap::new();
        for (wt, bucket) in &by_weight {
            let k = bucket.len();
            let mut cw = RMat::zeros(k, k);
            for (r, u) in bucket.iter().enumerate() {
                let cu = &cas * u;
                for (c, v) in bucket.iter().enumerate() {
                    cw[(r, c)] = v.dot(&cu);
                }
            }
            let eig = cw.symmetric_eigen();
            for idx in 0..k {
                let lambda = eig.eigenvalues[idx];
                let two_i3 = ((1.0 + 4.0 * lambda).sqrt() - 1.0).round() as i32;
                debug_assert!(
                    (lambda - 0.25 * (two_i3 * (two_i3 + 2)) as f64).abs() < 1e-8,
                    "Casimir eigenvalue must be I(I+1)"
                );
                let mut vec = nalgebra::DVector::<f64>::zeros(dd);
                for (b, u) in bucket.iter().enumerate() {
                    vec += u * eig.eigenvectors[(b, idx)];
                }
                // recover N from the weight and the scalar offset
                let (h1, h2) = *wt;
                // N1-N2 = h1, N2-N3 = h2, N1+N2+N3 = 3σ
                let n3 = (3 * sigma as i32 - 2 * h2 - h1) / 3 - 0; // solve
                let n2 = n3 + h2;
                let n1 = n2 + h1;
                assert!(n1 >= 0 && n2 >= 0 && n3 >= 0 && n1 + n2 + n3 == 3 * sigma as i32);
                let label = CoupledLabel { n: [n1 as u32, n2 as u32, n3 as u32], two_i3 };
                let prior = tagged.insert(label, vec);
                assert!(prior.is_none(), "coupled labels are multiplicity-free");
            }
        }

        // phase convention: walk each multiplet from its top projection
        let jm = self.gen(3, 2);
        let mut tops: Vec<CoupledLabel> = tagged
            .keys()
            .filter(|l| l.two_m3() == l.two_i3)
            .copied()
            .collect();
        tops.sort_by_key(|l| (std::cmp::Reverse(l.n[0]), std::cmp::Reverse(l.two_i3)));
        let mut final_vecs: HashMap<CoupledLabel, nalgebra::DVector<f64>> = HashMap::new();
        for top in tops {
            let mut v = tagged[&top].clone();
            if self.top_sign(sigma, &top, &v) < 0.0 {
                v = -v;
            }
            let mut label = top;
            loop {
                final_vecs.insert(label, v.clone());
                let (two_i3, two_m3) = (label.two_i3, label.two_m3());
                if two_m3 <= -two_i3 {
                    break;
                }
                // |I, M-1⟩ = J- |I, M⟩ / √((I+M)(I-M+1))
                let coeff = (0.25 * ((two_i3 + two_m3) * (two_i3 - two_m3 + 2)) as f64).sqrt();
                v = (jm * &v) / coeff;
                label = CoupledLabel {
                    n: [label.n[0], label.n[1] - 1, label.n[2] + 1],
                    two_i3,
                };
            }
        }

        let mut labels: Vec<CoupledLabel> = final_vecs.keys().copied().collect();
        labels.sort_by_key(|l| {
            (std::cmp::Reverse(l.n[0]), std::cmp::Reverse(l.two_i3), std::cmp::Reverse(l.two_m3()))
        });
        let mut vectors = RMat::zeros(dd, labels.len());
        for (k, l) in labels.iter().enumerate() {
            vectors.set_column(k, &final_vecs[l]);
        }
        let index = labels.iter().enumerate().map(|(k, l)| (*l, k)).collect();
        Ok(CoupledIrrep { sigma, labels, vectors, index })
    }

    /// Sign of the reduced coefficient at the largest contributing n1
    /// for a multiplet top; multiplets are flipped to make it positive.
    fn top_sign(&self, sigma: u32, label: &CoupledLabel, v: &nalgebra::DVector<f64>) -> f64 {
        let a = self.basis.a();
        let two_m3 = label.two_m3();
        for n_idx in 0..self.d {
            let n = self.basis.state(n_idx);
            // highest n1 first: basis order guarantees descending n1
            for nu_idx in 0..self.d {
                let nu = self.basis.state(nu_idx);
                let nu_star = nu.star();
                // weight match via the boson-count offset
                let off = (a - sigma) as i32;
                let matches = (0..3).all(|k| {
                    let (nk, sk) = match k {
                        0 => (n.n1 + nu_star.n1, label.n[0]),
                        1 => (n.n2 + nu_star.n2, label.n[1]),
                        2 => (n.n3 + nu_star.n3, label.n[2]),
                        _ => unreachable!(),
                    };
                    nk as i32 == sk as i32 + off
                });
                if !matches {
                    continue;
                }
                let (two_i1, two_m1) = n.su2_sublabels((2, 3));
                let two_i2 = nu_star.n1 as i32;
                let two_m2 = nu.n3 as i32 - nu.n2 as i32;
                let cg = su2_cg(two_i1, two_m1, two_i2, two_m2, label.two_i3, two_m3);
                if cg.abs() < 1e-12 {
                    continue;
                }
                let full = v[n_idx * self.d + nu_idx];
                if full.abs() > 1e-9 {
                    return (full / cg).signum();
                }
            }
        }
        1.0
    }
}

fn to_real(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |r, c| {
        debug_assert!(m[(r, c)].im.abs() < 1e-14);
        m[(r, c)].re
    })
}

/// Build the full coupling table for ensemble size A.
pub fn build_cg_table(a: u32) -> Result<CgTable> {
    assert!(a >= 1, "coupling needs at least one atom");
    let builder = Builder::new(a);
    let mut irreps = Vec::new();
    for sigma in decompose_product(a) {
        irreps.push(builder.build_irrep(sigma)?);
    }
    // coefficients must be real by construction; the builder works in
    // real arithmetic, so verify orthogonality instead
    let table = CgTable { a, basis: builder.basis, irreps };
    let defect = table.orthogonality_defect();
    if defect > 1e-10 {
        return Err(Error::NonRealCoefficient(defect));
    }
    Ok(table)
}

impl CgTable {
    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn basis(&self) -> &BasisIndexMap {
        &self.basis
    }

    pub fn irrep(&self, sigma: u32) -> &CoupledIrrep {
        self.irreps
            .iter()
            .find(|c| c.sigma == sigma)
            .expect("sigma within decomposition")
    }

    /// Full coefficient ⟨n; ν*|(σ,σ) N I3⟩, addressed by the ensemble
    /// triples n and ν (the conjugate slot carries ν*).
    pub fn full_cg(
        &self,
        n: &OccupationState,
        nu: &OccupationState,
        sigma: u32,
        label: &CoupledLabel,
    ) -> f64 {
        let d = self.basis.len();
        let (Some(i), Some(j)) = (self.basis.index_of(n), self.basis.index_of(nu)) else {
            return 0.0;
        };
        let irrep = self.irrep(sigma);
        match irrep.index_of(label) {
            Some(col) => irrep.vectors[(i * d + j, col)],
            None => 0.0,
        }
    }

    /// How far the stacked coefficient matrix is from orthogonal.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.basis.len();
        let dd = d * d;
        let mut all = RMat::zeros(dd, dd);
        let mut col = 0;
        for irrep in &self.irreps {
            for k in 0..irrep.dim() {
                all.set_column(col, &irrep.vectors.column(k).into_owned());
                col += 1;
            }
        }
        assert_eq!(col, dd);
        let gram = all.transpose() * &all;
        let mut defect: f64 = 0.0;
        for r in 0..dd {
            for c in 0..dd {
                let expect = if r == c { 1.0 } else { 0.0 };
                defect = defect.max((gram[(r, c)] - expect).abs());
            }
        }
        defect
    }

    /// Reduced coefficient for a table row: the full coefficient with
    /// the SU(2) magnetic dependence stripped. Errors when every SU(2)
    /// coefficient for the requested labels vanishes.
    #[allow(clippy::too_many_arguments)]
    pub fn reduced_cg(
        &self,
        sigma: u32,
        n1_coupled: u32,
        two_i3: i32,
        n1: u32,
        two_i1: i32,
        nu1_star: u32,
        two_i2: i32,
    ) -> Result<f64> {
        let a = self.a;
        // reconstruct triple families from the reduced labels
        for two_m3 in (0..=two_i3).map(|k| two_i3 - 2 * k) {
            let rest = 3 * sigma as i32 - n1_coupled as i32;
            let n2 = (rest + two_m3) / 2;
            let n3 = (rest - two_m3) / 2;
            if n2 < 0 || n3 < 0 || (rest + two_m3) % 2 != 0 {
                continue;
            }
            let label = CoupledLabel { n: [n1_coupled, n2 as u32, n3 as u32], two_i3 };
            for two_m1 in (-two_i1..=two_i1).step_by(2) {
                let two_m2 = two_m3 - two_m1;
                if two_m2.abs() > two_i2 {
                    continue;
                }
                let cg2 = su2_cg(two_i1, two_m1, two_i2, two_m2, two_i3, two_m3);
                if cg2.abs() < 1e-12 {
                    continue;
                }
                // n: n2+n3 = 2·I1 doubled ⇒ n2-n3 = 2·m1
                let nrest = a as i32 - n1 as i32;
                if nrest != two_i1 {
                    continue;
                }
                let nn2 = (nrest + two_m1) / 2;
                let nn3 = (nrest - two_m1) / 2;
                if nn2 < 0 || nn3 < 0 || (nrest + two_m1) % 2 != 0 {
                    continue;
                }
                // ν*: ν1* fixed, M2 = (ν3-ν2)/2 ⇒ ν2-ν3 = -2m2, ν2+ν3 = A-ν1
                let nu1 = a as i32 - nu1_star as i32;
                let vrest = a as i32 - nu1;
                if vrest != two_i2 {
                    continue;
                }
                let nv2 = (vrest - two_m2) / 2;
                let nv3 = (vrest + two_m2) / 2;
                if nv2 < 0 || nv3 < 0 || (vrest - two_m2) % 2 != 0 {
                    continue;
                }
                let n_state = OccupationState::new(n1, nn2 as u32, nn3 as u32);
                let nu_state = OccupationState::new(nu1 as u32, nv2 as u32, nv3 as u32);
                let full = self.full_cg(&n_state, &nu_state, sigma, &label);
                return Ok(full / cg2);
            }
        }
        Err(Error::VanishingSu2Block)
    }

    /// All reduced rows of one (σ,σ) table in display order.
    pub fn reduced_rows(&self, sigma: u32) -> Vec<ReducedRow> {
        let a = self.a;
        let irrep = self.irrep(sigma);
        let mut groups: Vec<(u32, i32)> = irrep
            .labels
            .iter()
            .map(|l| (l.n[0], l.two_i3))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        groups.sort_by_key(|&(n1, two_i3)| (n1, std::cmp::Reverse(two_i3)));
        let mut rows = Vec::new();
        for (n1c, two_i3) in groups {
            for n1 in (0..=a).rev() {
                let two_i1 = (a - n1) as i32;
                for nu1s in 0..=a {
                    let two_i2 = nu1s as i32;
                    if let Ok(value) =
                        self.reduced_cg(sigma, n1c, two_i3, n1, two_i1, nu1s, two_i2)
                    {
                        if value.abs() > 1e-12 {
                            rows.push(ReducedRow {
                                sigma,
                                n1_coupled: n1c,
                                two_i3,
                                n1,
                                two_i1,
                                nu1_star: nu1s,
                                two_i2,
                                value,
                            });
                        }
                    }
                }
            }
        }
        rows
    }

    /// The restricted generator matrices of one coupled irrep, in its
    /// labeled orthonormal basis.
    pub fn coupled_irrep_generators(&self, sigma: u32) -> Result<Vec<CMat>> {
        let builder_gens = {
            let d = self.basis.len();
            let eye = RMat::identity(d, d);
            let mut gens = Vec::with_capacity(9);
            for i in 1..=3 {
                for j in 1..=3 {
                    let g = to_real(&collective_operator(&self.basis, i, j));
                    let gbar = to_real(&conjugate_generator(&self.basis, i, j));
                    gens.push(g.kronecker(&eye) + eye.kronecker(&gbar));
                }
            }
            gens
        };
        let irrep = self.irrep(sigma);
        let c = &irrep.vectors;
        let mut out = Vec::with_capacity(9);
        for g in &builder_gens {
            let applied = g * c;
            let restricted = c.transpose() * &applied;
            let defect = (&applied - c * &restricted).norm();
            if defect > 1e-9 {
                return Err(Error::RestrictionNotClosed(defect));
            }
            out.push(CMat::from_fn(restricted.nrows(), restricted.ncols(), |r, cc| {
                Complex64::new(restricted[(r, cc)], 0.0)
            }));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs};

    #[test]
    fn su2_cg_spot_values() {
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((su2_cg(1, 1, 1, -1, 0, 0) - s).abs() < 1e-15);
        assert!((su2_cg(1, -1, 1, 1, 0, 0) + s).abs() < 1e-15);
        assert!((su2_cg(4, 4, 0, 0, 4, 4) - 1.0).abs() < 1e-15);
        assert_eq!(su2_cg(1, 1, 1, 1, 0, 2), 0.0);
        assert_eq!(su2_cg(2, 0, 2, 0, 5, 0), 0.0);
    }

    #[test]
    fn su2_cg_matches_two_spin_diagonalization() {
        // couple j1=1 and j2=1/2 numerically and compare overlaps
        let (jz1, jp1, jm1) = crate::wigner::spin_matrices(2);
        let (jz2, jp2, jm2) = crate::wigner::spin_matrices(1);
        let d1 = 3;
        let d2 = 2;
        let eye1 = CMat::identity(d1, d1);
        let eye2 = CMat::identity(d2, d2);
        let jz = jz1.kronecker(&eye2) + eye1.kronecker(&jz2);
        let jp = jp1.kronecker(&eye2) + eye1.kronecker(&jp2);
        let jm = jm1.kronecker(&eye2) + eye1.kronecker(&jm2);
        // stretched state is pure: |3/2, 3/2⟩ = |1,1⟩|½,½⟩; ladder down
        let mut v = nalgebra::DVector::<Complex64>::zeros(d1 * d2);
        v[0] = Complex64::new(1.0, 0.0);
        let mut two_m = 3;
        loop {
            for (k, amp) in v.iter().enumerate() {
                let (m1_idx, m2_idx) = (k / d2, k % d2);
                let two_m1 = 2 - 2 * m1_idx as i32;
                let two_m2 = 1 - 2 * m2_idx as i32;
                let expect = su2_cg(2, two_m1, 1, two_m2, 3, two_m);
                assert!((amp.re - expect).abs() < 1e-12, "J=3/2 M={two_m}/2 k={k}");
            }
            if two_m == -3 {
                break;
            }
            let j = 1.5;
            let m = 0.5 * two_m as f64;
            v = (&jm * v) / Complex64::new(((j + m) * (j - m + 1.0)).sqrt(), 0.0);
            two_m -= 2;
        }
        let _ = (jz, jp);
    }

    #[test]
    fn su2_cg_unitarity() {
        for (two_j1, two_j2) in [(2, 2), (3, 1), (4, 2)] {
            for two_j in ((two_j1 - two_j2).abs()..=(two_j1 + two_j2)).step_by(2) {
                for two_m in (-two_j..=two_j).step_by(2) {
                    let mut sum = 0.0;
                    for two_m1 in (-two_j1..=two_j1).step_by(2) {
                        let c = su2_cg(two_j1, two_m1, two_j2, two_m - two_m1, two_j, two_m);
                        sum += c * c;
                    }
                    assert!((sum - 1.0).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn decomposition_dimensions() {
        for a in 1..=4u32 {
            let sigmas = decompose_product(a);
            assert_eq!(sigmas.first(), Some(&a));
            assert_eq!(sigmas.last(), Some(&0));
            let sum: u64 = sigmas.iter().map(|&s| dimension(s, s)).sum();
            assert_eq!(sum, dimension(a, 0) * dimension(a, 0));
        }
        assert_eq!(decompose_product(0), vec![0]);
    }

    #[test]
    fn table_is_orthogonal() {
        for a in 1..=3 {
            let table = build_cg_table(a).unwrap();
            assert!(table.orthogonality_defect() < 1e-10, "A={a}");
        }
    }

    #[test]
    fn weight_bookkeeping_offset() {
        let a = 2;
        let table = build_cg_table(a).unwrap();
        let d = table.basis().len();
        for irrep in &table.irreps {
            let off = (a - irrep.sigma) as i32;
            for (col, label) in irrep.labels.iter().enumerate() {
                for p in 0..d * d {
                    if irrep.vectors[(p, col)].abs() < 1e-10 {
                        continue;
                    }
                    let n = table.basis().state(p / d);
                    let nu_star = table.basis().state(p % d).star();
                    assert_eq!(n.n1 as i32 + nu_star.n1 as i32, label.n[0] as i32 + off);
                    assert_eq!(n.n2 as i32 + nu_star.n2 as i32, label.n[1] as i32 + off);
                    assert_eq!(n.n3 as i32 + nu_star.n3 as i32, label.n[2] as i32 + off);
                }
            }
        }
    }

    #[test]
    fn singlet_coefficients_single_atom() {
        let table = build_cg_table(1).unwrap();
        let r1 = table.reduced_cg(0, 0, 0, 0, 1, 1, 1).unwrap();
        assert!((r1 + (2.0f64 / 3.0).sqrt()).abs() < 1e-12, "{r1}");
        let r2 = table.reduced_cg(0, 0, 0, 1, 0, 0, 0).unwrap();
        assert!((r2 - (1.0f64 / 3.0).sqrt()).abs() < 1e-12, "{r2}");
    }

    #[test]
    fn adjoint_rows_single_atom() {
        let table = build_cg_table(1).unwrap();
        for (args, expect) in [
            ((1u32, 2u32, 1i32, 1u32, 0i32, 1u32, 1i32), 1.0),
            ((1, 1, 2, 0, 1, 1, 1), 1.0),
            ((1, 1, 0, 0, 1, 1, 1), (1.0f64 / 3.0).sqrt()),
            ((1, 1, 0, 1, 0, 0, 0), (2.0f64 / 3.0).sqrt()),
            ((1, 0, 1, 0, 1, 0, 0), 1.0),
        ] {
            let (sigma, n1c, two_i3, n1, two_i1, nu1s, two_i2) = args;
            let v = table.reduced_cg(sigma, n1c, two_i3, n1, two_i1, nu1s, two_i2).unwrap();
            assert!((v - expect).abs() < 1e-12, "{args:?}: {v} vs {expect}");
        }
    }

    #[test]
    fn reduced_values_are_m_independent() {
        let table = build_cg_table(2).unwrap();
        let irrep = table.irrep(1);
        for label in &irrep.labels {
            for n1 in 0..=2u32 {
                let two_i1 = (2 - n1) as i32;
                for nu1s in 0..=2u32 {
                    let two_i2 = nu1s as i32;
                    // compare the reduced value extracted at every magnetic pair
                    let mut values = Vec::new();
                    for two_m1 in (-two_i1..=two_i1).step_by(2) {
                        let two_m2 = label.two_m3() - two_m1;
                        if two_m2.abs() > two_i2 {
                            continue;
                        }
                        let cg2 =
                            su2_cg(two_i1, two_m1, two_i2, two_m2, label.two_i3, label.two_m3());
                        if cg2.abs() < 1e-12 {
                            continue;
                        }
                        let rest_n = 2 - n1;
                        let nn2 = (rest_n as i32 + two_m1) / 2;
                        let nn3 = (rest_n as i32 - two_m1) / 2;
                        if nn2 < 0 || nn3 < 0 || (rest_n as i32 + two_m1) % 2 != 0 {
                            continue;
                        }
                        let nu1 = 2 - nu1s;
                        let vrest = nu1s as i32;
                        let nv2 = (vrest - two_m2) / 2;
                        let nv3 = (vrest + two_m2) / 2;
                        if nv2 < 0 || nv3 < 0 || (vrest - two_m2) % 2 != 0 {
                            continue;
                        }
                        let n_state = OccupationState::new(n1, nn2 as u32, nn3 as u32);
                        let nu_state = OccupationState::new(nu1, nv2 as u32, nv3 as u32);
                        values.push(table.full_cg(&n_state, &nu_state, 1, label) / cg2);
                    }
                    for w in values.windows(2) {
                        assert!((w[0] - w[1]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn coupled_generators_satisfy_algebra() {
        let table = build_cg_table(2).unwrap();
        for sigma in [1u32, 2] {
            let gens = table.coupled_irrep_generators(sigma).unwrap();
            let g = |i: usize, j: usize| gens[3 * (i - 1) + (j - 1)].clone();
            for i in 1..=3usize {
                for j in 1..=3usize {
                    for k in 1..=3usize {
                        for l in 1..=3usize {
                            let mut expect =
                                CMat::zeros(gens[0].nrows(), gens[0].ncols());
                            if j == k {
                                expect += g(i, l);
                            }
                            if i == l {
                                expect -= g(k, j);
                            }
                            let got = commutator(&g(i, j), &g(k, l));
                            assert!(max_abs(&(got - expect)) < 1e-10, "σ={sigma}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_irrep_generators() {
        let table = build_cg_table(1).unwrap();
        let gens = table.coupled_irrep_generators(0).unwrap();
        for (k, g) in gens.iter().enumerate() {
            assert_eq!(g.nrows(), 1);
            // S_ii pick up the scalar boson offset; off-diagonal vanish
            if k % 4 != 0 {
                assert!(max_abs(g) < 1e-12);
            }
        }
    }

    #[test]
    fn casimir_is_scalar_on_coupled_block() {
        let table = build_cg_table(2).unwrap();
        let gens = table.coupled_irrep_generators(2).unwrap();
        assert_eq!(gens[0].nrows(), 27);
        let mut casimir = CMat::zeros(27, 27);
        for i in 0..3 {
            for j in 0..3 {
                casimir += &gens[3 * i + j] * &gens[3 * j + i];
            }
        }
        let scalar = casimir[(0, 0)];
        for r in 0..27 {
            for c in 0..27 {
                let expect = if r == c { scalar } else { Complex64::new(0.0, 0.0) };
                assert!((casimir[(r, c)] - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn singlet_index_exists() {
        let table = build_cg_table(2).unwrap();
        for irrep in &table.irreps {
            let k = irrep.singlet_index();
            let label = irrep.labels[k];
            assert_eq!(label.n, [irrep.sigma; 3]);
            assert_eq!(label.two_i3, 0);
        }
    }
}
