//! Gauss–Legendre rules.

use std::sync::OnceLock;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule via Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
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

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

const LEVELS: [usize; 8] = [16, 32, 64, 128, 256, 512, 1024, 2048];

/// Shared rule with `LEVELS[level]` nodes.
pub fn cached(level: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    &RULES.get_or_init(|| LEVELS.iter().map(|&n| GaussLegendre::new(n)).collect())[level]
}

/// Integrates a vector-valued function on `[a, b]`, doubling the node count
/// until every component agrees with the previous level to `tol` (relative
/// to the component's magnitude, absolute below 1).
pub fn adaptive<const N: usize>(a: f64, b: f64, tol: f64, mut f: impl FnMut(f64) -> [f64; N]) -> [f64; N] {
    let mut prev = [f64::NAN; N];
    let mut cur = [0.0; N];
    for level in 0..LEVELS.len() {
        cur = [0.0; N];
        for (x, w) in cached(level).on(a, b) {
            let v = f(x);
            for k in 0..N {
                cur[k] += w * v[k];
            }
        }
        if level > 0 && (0..N).all(|k| (cur[k] - prev[k]).abs() <= tol * cur[k].abs().max(1.0)) {
            return cur;
        }
        prev = cur;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // degree 9 is the maximum exact degree for 5 nodes
        let got = rule.integrate(0.0, 2.0, |x| x.powi(9) + 3.0 * x.powi(4));
        let want = 2f64.powi(10) / 10.0 + 3.0 * 2f64.powi(5) / 5.0;
        assert!((got - want).abs() < 1e-10 * want);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_rule_is_accurate() {
        let rule = cached(4);
        let got = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((got - 2.0).abs() < 1e-13);
        let odd = GaussLegendre::new(7);
        assert_eq!(odd.nodes[3], 0.0);
    }

    #[test]
    fn adaptive_converges() {
        let [v] = adaptive(0.0, 1.0, 1e-13, |x| [(10.0 * x).exp()]);
        let want = ((10f64).exp() - 1.0) / 10.0;
        assert!((v - want).abs() < 1e-10 * want);
    }
}
