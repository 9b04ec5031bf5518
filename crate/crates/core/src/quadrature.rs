//! Gauss–Legendre and periodic trapezoid rules.

use std::f64::consts::PI;

/// Gauss–Legendre rule with `n` nodes mapped onto `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are returned in ascending order.
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        let (x, w) = reference_rule(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Self {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|v| half * v).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn reference_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, refined by Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Uniform angles `2πj/n` for `j = 0..n`, each with weight `2π/n`.
pub fn periodic_trapezoid(n: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| (h * j as f64, h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let rule = GaussLegendre::new(2, -1.0, 1.0);
        let r = 1.0 / 3f64.sqrt();
        assert!((rule.nodes[0] + r).abs() < 1e-15);
        assert!((rule.nodes[1] - r).abs() < 1e-15);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let n = 7;
        let rule = GaussLegendre::new(n, 0.0, 3.0);
        for k in 0..(2 * n) {
            let exact = 3f64.powi(k as i32 + 1) / (k as f64 + 1.0);
            let got = rule.integrate(|x| x.powi(k as i32));
            assert!((got - exact).abs() <= 1e-12 * exact.max(1.0), "degree {k}");
        }
    }

    #[test]
    fn large_rule_weights_sum_to_length() {
        for n in [1, 5, 64, 200] {
            let rule = GaussLegendre::new(n, 0.0, 36.0);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 36.0).abs() < 1e-11, "n = {n}: {s}");
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn trapezoid_integrates_fourier_modes() {
        let pts = periodic_trapezoid(16);
        for k in 1..16 {
            let re: f64 = pts.iter().map(|(t, w)| w * (k as f64 * t).cos()).sum();
            assert!(re.abs() < 1e-13);
        }
    }
}
