//! Browser bindings. Every export takes plain numbers or a state spec string
//! and returns a small struct with flat `Vec<f64>` getters, so the page can
//! draw without any serialisation layer. Errors surface as JS strings.

use fockloss::corpus::{NamedState, StateSpec};
use fockloss::fock::C64;
use fockloss::inequalities::{gaussian_husimi, gaussian_pair_derivative, husimi_pair_check_fn, HUSIMI_EXCLUSION};
use fockloss::loss::apply_loss;
use fockloss::phase_space::{default_half_width, quasi_grid};
use fockloss::purity::purity;
use fockloss::qcs::qcs_purity_rate;
use wasm_bindgen::prelude::*;

/// Largest grid side the page may request.
pub const MAX_POINTS: usize = 201;
/// Largest number of samples along `T`.
pub const MAX_SAMPLES: usize = 1001;

fn single_state(spec: &str) -> Result<NamedState, String> {
    let parsed: StateSpec = spec.trim().parse().map_err(|e: fockloss::Error| e.to_string())?;
    match parsed {
        StateSpec::File(_) => return Err("file specs are not available in the browser".into()),
        StateSpec::Random { count, .. } | StateSpec::RandomClass { count, .. } if count != 1 => {
            return Err("the demo takes exactly one state; use a count of 1".into())
        }
        _ => {}
    }
    parsed.expand(1, false).map_err(|e| e.to_string())?.into_iter().next().ok_or_else(|| "empty state spec".into())
}

fn check_points(points: usize) -> Result<(), String> {
    if (2..=MAX_POINTS).contains(&points) {
        Ok(())
    } else {
        Err(format!("points must be in 2..={MAX_POINTS}"))
    }
}

fn unit_samples(samples: usize, hi: f64) -> Result<Vec<f64>, String> {
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must be in 2..={MAX_SAMPLES}"));
    }
    Ok((0..samples).map(|i| if i + 1 == samples { hi } else { hi * i as f64 / (samples - 1) as f64 }).collect())
}

/// Row-major `s`-ordered quasiprobability of the lossy state on a square grid.
#[wasm_bindgen]
pub struct PhaseGrid {
    values: Vec<f64>,
    points: usize,
    half_width: f64,
    normalization: f64,
    min: f64,
    max: f64,
}

#[wasm_bindgen]
impl PhaseGrid {
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn points(&self) -> usize {
        self.points
    }
    #[wasm_bindgen(getter)]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    #[wasm_bindgen(getter)]
    pub fn normalization(&self) -> f64 {
        self.normalization
    }
    #[wasm_bindgen(getter)]
    pub fn min(&self) -> f64 {
        self.min
    }
    #[wasm_bindgen(getter)]
    pub fn max(&self) -> f64 {
        self.max
    }
}

/// `s = 0` is the Wigner function, `s = -1` the Husimi function.
#[wasm_bindgen]
pub fn phase_grid(spec: &str, t: f64, s: f64, points: usize) -> Result<PhaseGrid, String> {
    check_points(points)?;
    let state = single_state(spec)?;
    let rho_t = apply_loss(&state.rho, t).map_err(|e| e.to_string())?;
    let hw = default_half_width(state.rho.cutoff().saturating_sub(1));
    let g = quasi_grid(&rho_t, s, C64::default(), hw, points).map_err(|e| e.to_string())?;
    Ok(PhaseGrid { normalization: g.normalization(), min: g.min(), max: g.max(), values: g.values, points, half_width: hw })
}

/// Purity `Tr ρ_T²` and `C²(ρ_T)`, read off the purity rate, along `T ∈ [0, 1]`.
#[wasm_bindgen]
pub struct LossCurve {
    t: Vec<f64>,
    purity: Vec<f64>,
    c_squared: Vec<f64>,
}

#[wasm_bindgen]
impl LossCurve {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn purity(&self) -> Vec<f64> {
        self.purity.clone()
    }
    /// `NaN` where the purity-rate route is undefined.
    #[wasm_bindgen(getter)]
    pub fn c_squared(&self) -> Vec<f64> {
        self.c_squared.clone()
    }
}

#[wasm_bindgen]
pub fn loss_curve(spec: &str, samples: usize) -> Result<LossCurve, String> {
    let state = single_state(spec)?;
    let t = unit_samples(samples, 1.0)?;
    let mut p = Vec::with_capacity(t.len());
    let mut c = Vec::with_capacity(t.len());
    for &ti in &t {
        p.push(purity(&apply_loss(&state.rho, ti).map_err(|e| e.to_string())?));
        c.push(qcs_purity_rate(&state.rho, ti).map_or(f64::NAN, |q| q.c_squared));
    }
    Ok(LossCurve { t, purity: p, c_squared: c })
}

/// Husimi-pair integral for two centred Gaussians, numerically and in closed form.
#[wasm_bindgen]
pub struct PairScan {
    t: Vec<f64>,
    integral: Vec<f64>,
    exact: Vec<f64>,
    all_nonpositive: bool,
}

#[wasm_bindgen]
impl PairScan {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn integral(&self) -> Vec<f64> {
        self.integral.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
    /// Whether every sampled integral passed the `≤ 0` check.
    #[wasm_bindgen(getter)]
    pub fn all_nonpositive(&self) -> bool {
        self.all_nonpositive
    }
}

/// Variances are in units of the vacuum Husimi width: `v = 1` is vacuum,
/// `v ≥ 1` is a genuine Husimi function, `v < 1` is not.
#[wasm_bindgen]
pub fn husimi_pair(v1: f64, v2: f64, samples: usize, points: usize) -> Result<PairScan, String> {
    if !(v1 > 0.0 && v2 > 0.0) {
        return Err("variances must be positive".into());
    }
    check_points(points)?;
    let t = unit_samples(samples, 0.5 - HUSIMI_EXCLUSION - 1e-9)?;
    let hw = 7.0 * v1.max(v2).sqrt();
    let mut integral = Vec::with_capacity(t.len());
    let mut all = true;
    for &ti in &t {
        let r = husimi_pair_check_fn(gaussian_husimi(v1), gaussian_husimi(v2), ti, hw, points).map_err(|e| e.to_string())?;
        all &= r.pass;
        integral.push(r.lhs);
    }
    let exact = t.iter().map(|&ti| gaussian_pair_derivative(v1, v2, ti)).collect();
    Ok(PairScan { t, integral, exact, all_nonpositive: all })
}
