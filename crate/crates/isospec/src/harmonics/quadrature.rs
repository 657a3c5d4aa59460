//! Gauss–Legendre quadrature nodes and weights on [−1, 1].

use crate::error::{Error, Result};

/// Gauss–Legendre rule with `n` nodes: exact for polynomials of degree
/// ≤ 2n−1. Nodes are returned ascending in (−1, 1); weights sum to 2.
///
/// Roots of P_n are found by Newton iteration from the Chebyshev-like
/// initial guesses cos(π(i−1/4)/(n+1/2)); only the upper half is solved and
/// the rule is mirrored so the symmetry x_{n−1−i} = −x_i is exact.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::invalid("gauss-legendre rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n / 2;

    for i in 0..half {
        // i-th root counted from the top (x near +1 for i = 0).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        // One final polish evaluates the derivative at the converged node.
        let (p, d) = legendre_with_derivative(n, x);
        x -= p / d;
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[half] = 0.0;
        weights[half] = 2.0 / (d * d);
    }
    Ok((nodes, weights))
}

/// (P_n(x), P_n′(x)) by the standard recurrence pair.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    // P_n′(x) = n (x P_n − P_{n−1}) / (x² − 1)
    let d = (n as f64) * (x * cur - prev) / (x * x - 1.0);
    (cur, d)
}
