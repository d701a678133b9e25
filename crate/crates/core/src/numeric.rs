//! Quadrature and interpolation used by the continuous models.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Points per Gauss–Legendre panel.
pub const GL_ORDER: usize = 20;
const MAX_BISECTIONS: u32 = 24;

/// Value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, err: 0.0 }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            err: self.err + o.err,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Self {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Composite Gauss–Legendre on `[a, b]`, bisecting panels until the
/// one-panel and two-panel results agree within `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Estimate {
    if b <= a {
        return Estimate::default();
    }
    let whole = panel(f, a, b);
    refine(f, a, b, whole, tol, 0)
}

fn refine(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Estimate {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let diff = (left + right - whole).abs();
    // Roundoff floor: agreement can't be demanded below a few ulps of the result.
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if diff <= tol.max(floor) || depth >= MAX_BISECTIONS {
        return Estimate {
            value: left + right,
            err: diff,
        };
    }
    refine(f, a, mid, left, tol * 0.5, depth + 1) + refine(f, mid, b, right, tol * 0.5, depth + 1)
}

/// Barycentric interpolant through Chebyshev points of the second kind.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

/// Adaptive construction outcome.
#[derive(Debug, Clone)]
pub struct Fit {
    pub interpolant: Chebyshev,
    /// Largest discrepancy between the final interpolant's predecessor and
    /// the sampled function at the newly added nodes.
    pub residual: f64,
    pub converged: bool,
}

fn cheb_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.5 * (lo + hi)];
    }
    (0..=n)
        .map(|j| {
            let t = (PI * j as f64 / n as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        })
        .collect()
}

impl Chebyshev {
    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        Chebyshev {
            lo,
            hi,
            nodes: vec![0.5 * (lo + hi)],
            values: vec![value],
        }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Evaluates the interpolant; arguments outside the domain are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len() - 1;
        if n == 0 {
            return self.values[0];
        }
        let x = x.clamp(self.lo, self.hi);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&xj, &fj)) in self.nodes.iter().zip(&self.values).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            let t = w / d;
            num += t * fj;
            den += t;
        }
        num / den
    }

    /// Doubles the node count from 8 until the previous interpolant predicts
    /// the new samples within `tol`, or `max_degree` is reached.
    pub fn fit(f: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64, tol: f64, max_degree: usize) -> Fit {
        Self::fit_with(|xs: &[f64]| xs.iter().map(|&x| f(x)).collect(), lo, hi, tol, max_degree)
    }

    /// Like [`Chebyshev::fit`] but samples in batches, so callers can
    /// evaluate the nodes in parallel.
    pub fn fit_with<F>(sample: F, lo: f64, hi: f64, tol: f64, max_degree: usize) -> Fit
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut n = 8;
        let nodes = cheb_points(lo, hi, n);
        let values = sample(&nodes);
        let mut current = Chebyshev { lo, hi, nodes, values };
        loop {
            let m = 2 * n;
            let all = cheb_points(lo, hi, m);
            let fresh: Vec<f64> = all.iter().skip(1).step_by(2).copied().collect();
            let fresh_values = sample(&fresh);
            let scale = current
                .values
                .iter()
                .chain(&fresh_values)
                .fold(1.0f64, |acc, v| acc.max(v.abs()));
            let residual = fresh
                .iter()
                .zip(&fresh_values)
                .map(|(&x, &v)| (current.eval(x) - v).abs())
                .fold(0.0, f64::max);
            let mut values = Vec::with_capacity(m + 1);
            for j in 0..=m {
                if j % 2 == 0 {
                    values.push(current.values[j / 2]);
                } else {
                    values.push(fresh_values[j / 2]);
                }
            }
            let refined = Chebyshev { lo, hi, nodes: all, values };
            let floor = 1e3 * f64::EPSILON * scale;
            if residual <= tol.max(floor) {
                return Fit {
                    interpolant: refined,
                    residual,
                    converged: true,
                };
            }
            if m >= max_degree {
                return Fit {
                    interpolant: refined,
                    residual,
                    converged: false,
                };
            }
            current = refined;
            n = m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // ∫_0^1 x^39 = 1/40; a 20-point rule integrates degree 39 exactly.
        let r = integrate(&|x| x.powi(39), 0.0, 1.0, 1e-14);
        assert!((r.value - 1.0 / 40.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_half_mass() {
        let sigma = 0.25;
        let phi = |x: f64| (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt());
        let r = integrate(&phi, 0.0, 8.0 * sigma, 1e-13);
        assert!((r.value - 0.5).abs() < 1e-13, "{}", r.value);
    }

    #[test]
    fn interpolant_reproduces_polynomials() {
        let f = |x: f64| 0.5 - x + 0.5 * x * x;
        let fit = Chebyshev::fit(&f, 0.0, 1.0, 1e-12, 256);
        assert!(fit.converged);
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            assert!((fit.interpolant.eval(x) - f(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolant_flags_nonconvergence() {
        let f = |x: f64| if x < 0.3 { 0.0 } else { 1.0 };
        let fit = Chebyshev::fit(&f, 0.0, 1.0, 1e-10, 64);
        assert!(!fit.converged);
        assert!(fit.residual > 1e-3);
    }
}
