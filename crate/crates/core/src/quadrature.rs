//! Gauss–Legendre rules, composite panels and uniform-grid trapezoid weights.

use std::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on `P_n` from the usual cosine guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Nodes and weights of a composite rule over an interval.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Splits `[a, b]` into `panels` equal panels, each carrying `rule`.
    pub fn new(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Self {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * rule.len());
        let mut weights = Vec::with_capacity(panels * rule.len());
        for k in 0..panels {
            let lo = a + k as f64 * width;
            let mid = lo + 0.5 * width;
            for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
                nodes.push(mid + 0.5 * width * t);
                weights.push(0.5 * width * w);
            }
        }
        Self { nodes, weights }
    }

    /// Panels no wider than `max_width`, never fewer than `min_panels`.
    pub fn with_max_width(
        rule: &GaussLegendre,
        a: f64,
        b: f64,
        max_width: f64,
        min_panels: usize,
    ) -> Self {
        let panels = ((b - a) / max_width).ceil().max(min_panels as f64) as usize;
        Self::new(rule, a, b, panels)
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

/// Trapezoid weights for `count` uniformly spaced samples with spacing `step`.
pub fn trapezoid_weights(count: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; count];
    if let Some(first) = w.first_mut() {
        *first *= 0.5;
    }
    if count > 1 {
        w[count - 1] *= 0.5;
    }
    w
}

/// Trapezoid integral of uniformly spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 32, 64] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(8);
        for d in 0..16 {
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(d));
            let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "degree {d}: {got} vs {want}");
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let rule = GaussLegendre::new(31);
        let n = rule.nodes();
        for i in 0..n.len() {
            assert!((n[i] + n[n.len() - 1 - i]).abs() < 1e-15);
        }
        assert!(n.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn composite_rule_resolves_oscillation() {
        let rule = GaussLegendre::new(16);
        let c = CompositeRule::with_max_width(&rule, 0.0, 10.0, 0.5, 1);
        let got = c.integrate(|x| (7.0 * x).cos());
        assert!((got - (70.0f64).sin() / 7.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_weights_match_trapezoid() {
        let v: Vec<f64> = (0..11).map(|i| (i as f64 * 0.1).exp()).collect();
        let w = trapezoid_weights(v.len(), 0.1);
        let a: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!((a - trapezoid(&v, 0.1)).abs() < 1e-15);
        assert!((a - (1.0f64.exp() - 1.0)).abs() < 2e-3);
    }
}
