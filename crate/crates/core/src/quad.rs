//! Fixed-order Gauss-Legendre quadrature with an order-doubling schedule.
//!
//! Every integrand in this crate is the restriction of an analytic function to
//! a finite interval, so fixed-order Gauss-Legendre converges spectrally and a
//! doubling schedule with a convergence threshold replaces adaptive
//! subdivision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::context::{QError, Result, SeriesValue};
use crate::kahan::KahanSum;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the rule by Newton iteration on the Legendre polynomial P_n.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Tricomi-style initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (p2, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_with_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Integrate a real function over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mut acc = KahanSum::<f64>::new();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Integrate a complex function over [a, b].
    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, a: f64, b: f64, f: F) -> Complex64 {
        let mut acc = KahanSum::<Complex64>::new();
        for (x, w) in self.mapped(a, b) {
            acc.add(f(x) * w);
        }
        acc.value()
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<GaussLegendre>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, lazily built rule of the given order.
pub fn rule(order: usize) -> Arc<GaussLegendre> {
    let mut cache = rule_cache().lock().unwrap();
    cache
        .entry(order)
        .or_insert_with(|| Arc::new(GaussLegendre::new(order)))
        .clone()
}

/// Order-doubling schedule: successive Gauss-Legendre orders until two
/// estimates agree within `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub start_order: usize,
    pub max_order: usize,
    pub threshold: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { start_order: 32, max_order: 1024, threshold: 1e-12 }
    }
}

impl QuadratureGrid {
    pub fn new(start_order: usize, max_order: usize, threshold: f64) -> Result<Self> {
        if start_order == 0 || max_order < start_order || !(threshold > 0.0) {
            return Err(QError::InvalidParameter(format!(
                "bad quadrature grid (start {start_order}, max {max_order}, threshold {threshold})"
            )));
        }
        Ok(Self { start_order, max_order, threshold })
    }
}

/// Integrate `f` over [a, b], doubling the order until successive estimates
/// differ by less than the grid threshold. The tail bound reported is the last
/// doubling change; `terms_used` is the final order.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, grid: &QuadratureGrid) -> Result<SeriesValue>
where
    F: Fn(f64) -> Complex64,
{
    let many = integrate_adaptive_many(|x| vec![f(x)], a, b, grid)?;
    Ok(many[0])
}

/// Vector version of [`integrate_adaptive`]: all components share nodes and
/// the doubling stops when every component's change drops below
/// `threshold * max(1, |I|)` (absolute for order-one integrals, relative once
/// an integral grows past that -- anything tighter would sit below the
/// integrand's own rounding floor).
pub fn integrate_adaptive_many<F>(
    f: F,
    a: f64,
    b: f64,
    grid: &QuadratureGrid,
) -> Result<Vec<SeriesValue>>
where
    F: Fn(f64) -> Vec<Complex64>,
{
    let mut order = grid.start_order;
    let mut previous: Option<Vec<Complex64>> = None;
    let mut worst_change = f64::INFINITY;
    loop {
        let r = rule(order);
        let mut acc: Option<Vec<KahanSum<Complex64>>> = None;
        for (x, w) in r.mapped(a, b) {
            let values = f(x);
            let acc = acc.get_or_insert_with(|| vec![KahanSum::new(); values.len()]);
            for (sum, v) in acc.iter_mut().zip(values) {
                sum.add(v * w);
            }
        }
        let current: Vec<Complex64> =
            acc.map(|v| v.iter().map(|k| k.value()).collect()).unwrap_or_default();
        if let Some(prev) = &previous {
            let changes: Vec<f64> =
                prev.iter().zip(current.iter()).map(|(p, c)| (p - c).norm()).collect();
            let converged = changes
                .iter()
                .zip(current.iter())
                .all(|(&d, c)| d <= grid.threshold * c.norm().max(1.0));
            if converged {
                return Ok(current
                    .into_iter()
                    .zip(changes)
                    .map(|(value, change)| SeriesValue {
                        value,
                        tail_bound: change,
                        terms_used: order,
                    })
                    .collect());
            }
            worst_change = changes
                .iter()
                .zip(current.iter())
                .map(|(&d, c)| d / c.norm().max(1.0))
                .fold(0.0, f64::max);
        }
        if order >= grid.max_order {
            return Err(QError::DoublingCapExceeded { max_order: order, last_change: worst_change });
        }
        previous = Some(current);
        order = (order * 2).min(grid.max_order);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for order in [4, 16, 33, 64] {
            let r = GaussLegendre::new(order);
            let total: f64 = r.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "order {order}: {total}");
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // order n is exact through degree 2n-1
        let r = GaussLegendre::new(6);
        for k in 0..=11u32 {
            let got = r.integrate(0.0, 1.0, |x| x.powi(k as i32));
            let expect = 1.0 / (k as f64 + 1.0);
            assert!((got - expect).abs() < 1e-14, "x^{k}: {got} vs {expect}");
        }
    }

    #[test]
    fn cosine_moments_vanish() {
        // int_0^pi cos(k theta) d theta = 0 for k = 1..20
        let r = GaussLegendre::new(64);
        for k in 1..=20 {
            let v = r.integrate(0.0, std::f64::consts::PI, |t| (k as f64 * t).cos());
            assert!(v.abs() < 1e-13, "k={k}: {v}");
        }
    }

    #[test]
    fn doubling_converges_and_reports_change() {
        let grid = QuadratureGrid::default();
        let v = integrate_adaptive(
            |x| Complex64::new((3.0 * x).sin().exp(), 0.0),
            0.0,
            2.0,
            &grid,
        )
        .unwrap();
        // reference via a much larger fixed order
        let reference = GaussLegendre::new(400).integrate(0.0, 2.0, |x| (3.0 * x).sin().exp());
        assert!((v.value.re - reference).abs() < 1e-12);
        assert!(v.tail_bound < 1e-12);
    }

    #[test]
    fn doubling_cap_reports_error() {
        let grid = QuadratureGrid::new(8, 16, 1e-300).unwrap();
        let out = integrate_adaptive(
            |x| Complex64::new((37.0 * x).sin() / (1.0 + x * x), 0.0),
            0.0,
            3.0,
            &grid,
        );
        assert!(matches!(out, Err(QError::DoublingCapExceeded { .. })));
    }
}
