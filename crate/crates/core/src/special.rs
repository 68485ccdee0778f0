//! Factorials, orthogonal polynomials and Gauss–Laguerre rules.

use std::f64::consts::PI;
use std::sync::OnceLock;

const MAX_FACTORIAL: usize = 170;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(1024);
        t.push(0.0);
        for n in 1..1024usize {
            let prev = t[n - 1];
            t.push(prev + (n as f64).ln());
        }
        t
    })
}

/// `ln n!`, tabulated for n < 1024.
pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    if n < table.len() {
        table[n]
    } else {
        // Stirling with two correction terms; far beyond any cutoff we use.
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
    }
}

/// `n!` as a float. Exact up to 22!, finite up to 170!.
pub fn factorial(n: usize) -> f64 {
    assert!(n <= MAX_FACTORIAL, "{n}! overflows f64");
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient `C(n, k)`, zero for `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// Values `M_n = y^n L_n^{(a)}(-w / y)` for n = 0..=n_max.
///
/// With `y = 1, w = -x` this is the ordinary associated Laguerre polynomial
/// `L_n^{(a)}(x)`. The scaled form stays finite at `y = 0`, where it reduces to
/// `w^n / n!`.
pub fn scaled_laguerre(n_max: usize, a: usize, y: f64, w: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    let a = a as f64;
    out.push((1.0 + a) * y + w);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (((2.0 * nf + 1.0 + a) * y + w) * out[n] - (nf + a) * y * y * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Associated Laguerre polynomials `L_n^{(a)}(x)` for n = 0..=n_max.
pub fn laguerre(n_max: usize, a: usize, x: f64) -> Vec<f64> {
    scaled_laguerre(n_max, a, 1.0, -x)
}

/// Normalised Hermite functions `ψ_n(x)` for n = 0..=n_max, the position-space
/// Fock wavefunctions for `X = (a + a†)/√2`.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * out[0]);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Gauss–Laguerre rule for `∫_0^∞ e^{-x} f(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `w_i e^{x_i}`, for integrands that already contain the exponential.
    pub scaled_weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Laguerre needs at least one node");
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut scaled = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n {
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
                }
            };
            let mut pp = 0.0;
            let mut p2 = 0.0;
            for _ in 0..200 {
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 1..=n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = (nf * p1 - nf * p2) / z;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs() {
                    break;
                }
            }
            nodes[i] = z;
            let ln_w = -(pp * nf * p2).abs().ln();
            weights[i] = ln_w.exp();
            scaled[i] = (ln_w + z).exp();
        }
        Self { nodes, weights, scaled_weights: scaled }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_0^∞ f(x) dx` for an `f` that decays like `e^{-rate x}` times a
    /// polynomial. The rule is exact when `f e^{rate x}` is a polynomial of
    /// degree below `2n`.
    pub fn integrate_decaying(&self, rate: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = KahanSum::default();
        for (x, sw) in self.nodes.iter().zip(&self.scaled_weights) {
            acc.add(sw * f(x / rate));
        }
        acc.value() / rate
    }
}

/// Compensated (Kahan–Neumaier) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
