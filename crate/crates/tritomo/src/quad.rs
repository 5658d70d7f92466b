//! One-dimensional quadrature rules used to assemble group-integration grids.
//!
//! Three rules cover everything the group integrals need:
//! uniform (trapezoidal on a full period, exact for trigonometric
//! polynomials), Gauss-Legendre, and a Gauss rule for the weight
//! `u du` on `[0, 1]`. The Gauss rules are built by Golub-Welsch:
//! nodes are eigenvalues of the symmetric Jacobi matrix of the
//! orthogonal-polynomial recurrence, weights come from the first
//! component of each eigenvector.

use nalgebra::DMatrix;

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Σ w_i f(x_i).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Uniform rule on `[0, range)` with n nodes at `k·range/n`.
///
/// Exact for e^{2πi m x / range} whenever m ≢ 0 (mod n), which makes it
/// exact for all trigonometric polynomials of frequency below n on a
/// full period.
pub fn uniform_periodic(n: usize, range: f64) -> Rule1d {
    assert!(n > 0);
    let h = range / n as f64;
    Rule1d {
        nodes: (0..n).map(|k| k as f64 * h).collect(),
        weights: vec![h; n],
    }
}

/// Golub-Welsch: nodes/weights from the symmetric recurrence
/// coefficients (diag a, offdiag b) and the zeroth moment mu0.
fn golub_welsch(a: &[f64], b: &[f64], mu0: f64) -> Rule1d {
    let n = a.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = a[k];
        if k + 1 < n {
            j[(k, k + 1)] = b[k];
            j[(k + 1, k)] = b[k];
        }
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Rule1d {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Legendre rule on `[-1, 1]`, exact through degree 2n-1.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n > 0);
    let a = vec![0.0; n];
    let b: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&a, &b, 2.0)
}

/// Gauss rule for ∫₀¹ f(u) u du, exact through degree 2n-1.
///
/// This is the Jacobi (α=0, β=1) rule mapped from [-1, 1] to [0, 1];
/// it integrates the β₂ factor of the group measure exactly after the
/// substitution u = sin²(β₂/2).
pub fn gauss_weight_u(n: usize) -> Rule1d {
    assert!(n > 0);
    // Jacobi (alpha=0, beta=1) recurrence on [-1, 1], mu0 = ∫(1+x)dx = 2.
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let kf = k as f64;
        if k == 0 {
            a.push(1.0 / 3.0); // (β-α)/(α+β+2)
        } else {
            let s = 2.0 * kf + 1.0; // 2k+α+β
            a.push(1.0 / (s * (s + 2.0)));
        }
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + 1.0;
            let b2 = 4.0 * m * m * (m + 1.0) * (m + 1.0) / (s * s * (s + 1.0) * (s - 1.0));
            b.push(b2.sqrt());
        }
    }
    let on_sym = golub_welsch(&a, &b, 2.0);
    // x ∈ [-1,1] with weight (1+x) → u = (1+x)/2 ∈ [0,1] with weight u du,
    // picking up a factor 1/4 from (1+x) = 2u and dx = 2du.
    Rule1d {
        nodes: on_sym.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: on_sym.weights.iter().map(|w| 0.25 * w).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_monomial_exactness() {
        for n in 1..=12 {
            let rule = gauss_legendre(n);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for deg in 0..=(2 * n - 1) {
                let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                let got = rule.integrate(|x| x.powi(deg as i32));
                assert!(
                    (got - exact).abs() < 1e-13,
                    "n={n} deg={deg}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn weight_u_monomial_exactness() {
        for n in 1..=12 {
            let rule = gauss_weight_u(n);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert!(rule.nodes.iter().all(|&x| (0.0..=1.0).contains(&x)));
            for deg in 0..=(2 * n - 1) {
                // ∫₀¹ u^deg · u du = 1/(deg+2)
                let exact = 1.0 / (deg as f64 + 2.0);
                let got = rule.integrate(|u| u.powi(deg as i32));
                assert!(
                    (got - exact).abs() < 1e-14,
                    "n={n} deg={deg}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn uniform_kills_nonzero_frequencies() {
        let n = 9;
        let rule = uniform_periodic(n, 4.0 * std::f64::consts::PI);
        // frequencies k/2 for k = 1..8 over a 4π period
        for k in 1..=(n - 1) {
            let freq = k as f64 / 2.0;
            let re = rule.integrate(|x| (freq * x).cos());
            let im = rule.integrate(|x| (freq * x).sin());
            assert!(re.abs() < 1e-12 && im.abs() < 1e-12, "k={k}");
        }
        assert!((rule.weight_sum() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
