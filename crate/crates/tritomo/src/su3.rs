//! The symmetric irrep of u(3) on an ensemble of three-level atoms:
//! occupational basis, collective operators, and the conjugate irrep.
//!
//! An ensemble of `A` indistinguishable atoms with levels 1..3 lives in
//! the space spanned by `|n1 n2 n3⟩` with `n1+n2+n3 = A`; the collective
//! transition operators act as `a_i† a_j` on those bosonic occupations.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::linalg::{CMat, C_ZERO};

/// Occupation triple `(n1, n2, n3)`: atom counts per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationState {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

impl OccupationState {
    pub fn new(n1: u32, n2: u32, n3: u32) -> Self {
        Self { n1, n2, n3 }
    }

    pub fn total(&self) -> u32 {
        self.n1 + self.n2 + self.n3
    }

    pub fn get(&self, level: usize) -> u32 {
        match level {
            1 => self.n1,
            2 => self.n2,
            3 => self.n3,
            _ => panic!("level must be 1, 2 or 3"),
        }
    }

    fn set(&mut self, level: usize, value: u32) {
        match level {
            1 => self.n1 = value,
            2 => self.n2 = value,
            3 => self.n3 = value,
            _ => panic!("level must be 1, 2 or 3"),
        }
    }

    /// Stars the triple: `n ↦ (A - n1, A - n2, A - n3)`, the relabeling
    /// that carries the conjugate irrep (the starred triple holds 2A quanta).
    pub fn star(&self) -> OccupationState {
        let a = self.total();
        OccupationState::new(a - self.n1, a - self.n2, a - self.n3)
    }

    /// Weight under the diagonal su(3) operators: `(n1-n2, n2-n3)`.
    pub fn weight(&self) -> (i32, i32) {
        (
            self.n1 as i32 - self.n2 as i32,
            self.n2 as i32 - self.n3 as i32,
        )
    }

    /// Spin and projection (doubled, to stay in integers) of the su(2)
    /// subalgebra on the given mode pair:
    /// (2,3): I = (n2+n3)/2, M = (n2-n3)/2; (1,2): I = (n1+n2)/2, M = (n1-n2)/2.
    pub fn su2_sublabels(&self, modes: (usize, usize)) -> (i32, i32) {
        match modes {
            (2, 3) => (
                (self.n2 + self.n3) as i32,
                self.n2 as i32 - self.n3 as i32,
            ),
            (1, 2) => (
                (self.n1 + self.n2) as i32,
                self.n1 as i32 - self.n2 as i32,
            ),
            _ => panic!("supported mode pairs are (1,2) and (2,3)"),
        }
    }
}

/// Ordered basis of the A-atom symmetric irrep with inverse lookup.
///
/// States are ordered by descending n1, then descending n2, so for a
/// single atom the basis reads |100⟩, |010⟩, |001⟩ and all 3×3 operator
/// matrices line up with their single-atom counterparts entry for entry.
#[derive(Debug, Clone)]
pub struct BasisIndexMap {
    a: u32,
    states: Vec<OccupationState>,
    index: HashMap<OccupationState, usize>,
}

impl BasisIndexMap {
    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> OccupationState {
        self.states[i]
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn index_of(&self, s: &OccupationState) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// Dimension of the irrep (λ, μ): ½(λ+1)(μ+1)(λ+μ+2).
pub fn dimension(lambda: u32, mu: u32) -> u64 {
    let (l, m) = (lambda as u64, mu as u64);
    (l + 1) * (m + 1) * (l + m + 2) / 2
}

/// Enumerate the occupational basis for ensemble size A.
pub fn enumerate_basis(a: u32) -> BasisIndexMap {
    let mut states = Vec::with_capacity(dimension(a, 0) as usize);
    for n1 in (0..=a).rev() {
        for n2 in (0..=(a - n1)).rev() {
            states.push(OccupationState::new(n1, n2, a - n1 - n2));
        }
    }
    let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    BasisIndexMap { a, states, index }
}

/// Matrix of the collective operator S_ij = a_i† a_j on the A-atom basis.
///
/// ⟨m|S_ij|n⟩ = √(n_j (n_i + 1)) when m equals n with one quantum moved
/// from level j to level i; the diagonal case S_ii counts n_i.
pub fn collective_operator(basis: &BasisIndexMap, i: usize, j: usize) -> CMat {
    assert!((1..=3).contains(&i) && (1..=3).contains(&j));
    let d = basis.len();
    let mut m = CMat::zeros(d, d);
    for (col, n) in basis.states().iter().enumerate() {
        if i == j {
            m[(col, col)] = Complex64::new(n.get(i) as f64, 0.0);
            continue;
        }
        let nj = n.get(j);
        if nj == 0 {
            continue;
        }
        let mut moved = *n;
        moved.set(j, nj - 1);
        moved.set(i, n.get(i) + 1);
        let row = basis.index_of(&moved).expect("moved state stays in basis");
        let amp = ((nj as f64) * (n.get(i) as f64 + 1.0)).sqrt();
        m[(row, col)] = Complex64::new(amp, 0.0);
    }
    m
}

/// Diagonal sign of the conjugation operator on the state with index k:
/// (-1)^(n2).
fn conj_sign(basis: &BasisIndexMap, k: usize) -> f64 {
    if basis.state(k).n2 % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Generator of the conjugate irrep in the starred labeling.
///
/// Slot k of the conjugate space carries the starred triple of
/// `basis.state(k)`, so the conjugate matrices share the index map. The
/// construction is minus the transpose dressed with the diagonal sign
/// (-1)^(n2); it satisfies the same u(3) commutation relations, and the
/// exponentiated matrices obey the conjugation identity
/// conj(D_{n,ν}) = (-1)^(n2+ν2) D̄_{n*,ν*} checked in the wigner tests.
pub fn conjugate_generator(basis: &BasisIndexMap, i: usize, j: usize) -> CMat {
    let g = collective_operator(basis, i, j);
    let d = basis.len();
    let mut out = CMat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let v = g[(c, r)];
            if v != C_ZERO {
                out[(r, c)] = -conj_sign(basis, r) * conj_sign(basis, c) * v;
            }
        }
    }
    out
}

/// The su(2) triple (Jz, J+, J-) of a mode-pair subalgebra on the full
/// irrep space: (2,3) gives (½(S22-S33), S23, S32), (1,2) gives
/// (½(S11-S22), S12, S21).
pub fn su2_triple(basis: &BasisIndexMap, modes: (usize, usize)) -> (CMat, CMat, CMat) {
    let (p, q) = modes;
    assert!(modes == (1, 2) || modes == (2, 3));
    let jz = (collective_operator(basis, p, p) - collective_operator(basis, q, q)).scale(0.5);
    let jp = collective_operator(basis, p, q);
    let jm = collective_operator(basis, q, p);
    (jz, jp, jm)
}

/// Same triple built from caller-supplied generator matrices, for reps
/// other than the occupational one (e.g. a coupled irrep).
pub fn su2_triple_from(gens: &dyn Fn(usize, usize) -> CMat, modes: (usize, usize)) -> (CMat, CMat, CMat) {
    let (p, q) = modes;
    assert!(modes == (1, 2) || modes == (2, 3));
    let jz = (gens(p, p) - gens(q, q)).scale(0.5);
    (jz, gens(p, q), gens(q, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, frob_diff, max_abs};

    #[test]
    fn basis_ordering_single_atom() {
        let b = enumerate_basis(1);
        assert_eq!(b.len(), 3);
        assert_eq!(b.state(0), OccupationState::new(1, 0, 0));
        assert_eq!(b.state(1), OccupationState::new(0, 1, 0));
        assert_eq!(b.state(2), OccupationState::new(0, 0, 1));
    }

    #[test]
    fn basis_empty_ensemble() {
        let b = enumerate_basis(0);
        assert_eq!(b.len(), 1);
        assert_eq!(b.state(0), OccupationState::new(0, 0, 0));
    }

    #[test]
    fn basis_two_atoms() {
        let b = enumerate_basis(2);
        assert_eq!(b.len(), 6);
        assert_eq!(b.state(0), OccupationState::new(2, 0, 0));
        assert_eq!(b.state(5), OccupationState::new(0, 0, 2));
    }

    #[test]
    fn basis_roundtrip_lookup() {
        for a in 0..=4 {
            let b = enumerate_basis(a);
            assert_eq!(b.len() as u64, dimension(a, 0));
            for i in 0..b.len() {
                assert_eq!(b.index_of(&b.state(i)), Some(i));
            }
        }
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(dimension(1, 1), 8);
        assert_eq!(dimension(0, 0), 1);
        assert_eq!(dimension(2, 2), 27);
        for a in 0..=5 {
            assert_eq!(dimension(a, 0), ((a + 1) * (a + 2) / 2) as u64);
        }
    }

    #[test]
    fn single_atom_transition() {
        let b = enumerate_basis(1);
        let s12 = collective_operator(&b, 1, 2);
        // S_12 |010⟩ = |100⟩
        assert!((s12[(0, 1)].re - 1.0).abs() < 1e-15);
        assert_eq!(s12.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn number_operator_is_a_identity() {
        for a in 1..=4 {
            let b = enumerate_basis(a);
            let n = collective_operator(&b, 1, 1)
                + collective_operator(&b, 2, 2)
                + collective_operator(&b, 3, 3);
            let expect = CMat::identity(b.len(), b.len()).scale(a as f64);
            assert!(frob_diff(&n, &expect) < 1e-14);
        }
    }

    #[test]
    fn commutation_relations() {
        for a in 1..=4 {
            let b = enumerate_basis(a);
            let s: Vec<Vec<CMat>> = (1..=3)
                .map(|i| (1..=3).map(|j| collective_operator(&b, i, j)).collect())
                .collect();
            for i in 1..=3usize {
                for j in 1..=3usize {
                    for k in 1..=3usize {
                        for l in 1..=3usize {
                            let mut expect = CMat::zeros(b.len(), b.len());
                            if j == k {
                                expect += &s[i - 1][l - 1];
                            }
                            if i == l {
                                expect -= &s[k - 1][j - 1];
                            }
                            let got = commutator(&s[i - 1][j - 1], &s[k - 1][l - 1]);
                            assert!(
                                max_abs(&(got - expect)) < 1e-12,
                                "A={a} [S{i}{j},S{k}{l}]"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hermiticity_pairing() {
        let b = enumerate_basis(3);
        for i in 1..=3 {
            for j in 1..=3 {
                let sij = collective_operator(&b, i, j);
                let sji = collective_operator(&b, j, i);
                assert!(frob_diff(&sij.adjoint(), &sji) < 1e-15);
            }
        }
    }

    #[test]
    fn conjugate_generators_close_the_algebra() {
        for a in 1..=3 {
            let b = enumerate_basis(a);
            let g: Vec<Vec<CMat>> = (1..=3)
                .map(|i| (1..=3).map(|j| conjugate_generator(&b, i, j)).collect())
                .collect();
            for i in 1..=3usize {
                for j in 1..=3usize {
                    for k in 1..=3usize {
                        for l in 1..=3usize {
                            let mut expect = CMat::zeros(b.len(), b.len());
                            if j == k {
                                expect += &g[i - 1][l - 1];
                            }
                            if i == l {
                                expect -= &g[k - 1][j - 1];
                            }
                            let got = commutator(&g[i - 1][j - 1], &g[k - 1][l - 1]);
                            assert!(max_abs(&(got - expect)) < 1e-12, "A={a}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_diagonal_single_atom() {
        let b = enumerate_basis(1);
        let g11 = conjugate_generator(&b, 1, 1);
        // slot 0 carries the star of (1,0,0); eigenvalue -1 there
        assert!((g11[(0, 0)].re + 1.0).abs() < 1e-15);
        assert!(g11[(1, 1)].norm() < 1e-15);
        let tr_plain: Complex64 = collective_operator(&b, 1, 1).trace();
        let tr_conj: Complex64 = g11.trace();
        assert!((tr_plain + tr_conj).norm() < 1e-14);
    }

    #[test]
    fn weights_and_sublabels() {
        let s = OccupationState::new(3, 0, 0);
        assert_eq!(s.weight(), (3, 0));
        assert_eq!(OccupationState::new(0, 0, 4).weight(), (0, -4));
        assert_eq!(OccupationState::new(1, 1, 1).weight(), (0, 0));

        // doubled (2I, 2M)
        assert_eq!(OccupationState::new(0, 1, 1).su2_sublabels((2, 3)), (2, 0));
        assert_eq!(OccupationState::new(3, 0, 0).su2_sublabels((2, 3)), (0, 0));
        assert_eq!(OccupationState::new(0, 2, 0).su2_sublabels((2, 3)), (2, 2));
        assert_eq!(OccupationState::new(0, 2, 0).su2_sublabels((1, 2)), (2, -2));
    }
}
