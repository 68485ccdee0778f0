//! Two-mode operators and the beam splitter.
//!
//! Basis index of `|n1, n2⟩` is `n1 * c2 + n2`. The beam splitter conserves
//! total photon number, so it is applied block by block; a block of total
//! number `N` is complete when `N < min(c1, c2)`. On incomplete blocks the
//! truncated generator is exponentiated, which keeps the map unitary but is
//! only exact when the input has no weight there.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{c, CMatrix, DensityOperator, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    matrix: CMatrix,
    cutoffs: (usize, usize),
}

impl TwoModeOperator {
    pub fn new(matrix: CMatrix, c1: usize, c2: usize) -> Result<Self> {
        if c1 == 0 || c2 == 0 {
            return Err(Error::EmptySpace);
        }
        let dim = c1 * c2;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        Ok(Self { matrix, cutoffs: (c1, c2) })
    }

    /// Pure two-mode state from amplitudes `ψ[n1][n2]` (normalised here).
    pub fn from_amplitudes(amps: &DMatrix<C64>) -> Result<Self> {
        let (c1, c2) = (amps.nrows(), amps.ncols());
        let v: Vec<C64> = (0..c1 * c2).map(|i| amps[(i / c2, i % c2)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero two-mode vector".into()));
        }
        let v = nalgebra::DVector::from_vec(v) / c(norm);
        Self::new(&v * v.adjoint(), c1, c2)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        self.cutoffs
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.cutoffs.1 + n2
    }

    pub fn get(&self, (m1, m2): (usize, usize), (n1, n2): (usize, usize)) -> C64 {
        self.matrix[(self.index(m1, m2), self.index(n1, n2))]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Embeds into larger cutoffs with zeros.
    pub fn padded(&self, c1: usize, c2: usize) -> Result<Self> {
        let (o1, o2) = self.cutoffs;
        if c1 < o1 || c2 < o2 {
            return Err(Error::InvalidParameter("padding cannot shrink a two-mode space".into()));
        }
        let mut m = CMatrix::zeros(c1 * c2, c1 * c2);
        for i in 0..o1 * o2 {
            for j in 0..o1 * o2 {
                m[((i / o2) * c2 + i % o2, (j / o2) * c2 + j % o2)] = self.matrix[(i, j)];
            }
        }
        Self::new(m, c1, c2)
    }

    /// Photon-number populations of one mode, summed over the other.
    pub fn marginal_populations(&self, mode: Mode) -> Vec<f64> {
        let (c1, c2) = self.cutoffs;
        let mut out = vec![0.0; if mode == Mode::First { c1 } else { c2 }];
        for n1 in 0..c1 {
            for n2 in 0..c2 {
                let p = self.matrix[(self.index(n1, n2), self.index(n1, n2))].re;
                out[if mode == Mode::First { n1 } else { n2 }] += p;
            }
        }
        out
    }

    /// `Tr[Φ A]`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        (&self.matrix * op).trace()
    }
}

/// `ρ ⊗ σ` with the cutoffs of the factors.
pub fn tensor(rho: &DensityOperator, sigma: &DensityOperator) -> TwoModeOperator {
    let m = rho.matrix().kronecker(sigma.matrix());
    TwoModeOperator { matrix: m, cutoffs: (rho.cutoff(), sigma.cutoff()) }
}

/// Reduced operator of the kept mode.
pub fn partial_trace(phi: &TwoModeOperator, keep: Mode) -> DensityOperator {
    let (c1, c2) = phi.cutoffs;
    let m = match keep {
        Mode::First => CMatrix::from_fn(c1, c1, |i, j| (0..c2).map(|k| phi.matrix[(i * c2 + k, j * c2 + k)]).sum()),
        Mode::Second => CMatrix::from_fn(c2, c2, |i, j| (0..c1).map(|k| phi.matrix[(k * c2 + i, k * c2 + j)]).sum()),
    };
    DensityOperator::from_trusted(m)
}

/// Mixing angle `θ` with `cos θ = √T`.
pub fn transmission_angle(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || t.is_nan() {
        return Err(Error::NonPhysicalTransmission(t));
    }
    Ok(t.sqrt().acos())
}

/// Real orthogonal matrix `exp(θ G)` on the block `{|k, N-k⟩ : k ∈ ks}`, where
/// `G = a1 a2† - a1† a2` and `ks` is an ascending run of consecutive values.
pub fn block_unitary(total: usize, ks: &[usize], theta: f64) -> DMatrix<f64> {
    let d = ks.len();
    let mut g = DMatrix::<f64>::zeros(d, d);
    for (col, &k) in ks.iter().enumerate() {
        let n2 = total - k;
        // a1 a2† |k, n2⟩ = √(k (n2+1)) |k-1, n2+1⟩
        if col > 0 {
            g[(col - 1, col)] += ((k * (n2 + 1)) as f64).sqrt();
        }
        // -a1† a2 |k, n2⟩ = -√((k+1) n2) |k+1, n2-1⟩
        if col + 1 < d {
            g[(col + 1, col)] -= (((k + 1) * n2) as f64).sqrt();
        }
    }
    (g * theta).exp()
}

/// Photon-number blocks of a `c1 x c2` space: for each total `N`, the
/// ascending `n1` values present and their flat indices.
fn blocks(c1: usize, c2: usize) -> Vec<(usize, Vec<usize>, Vec<usize>)> {
    (0..c1 + c2 - 1)
        .map(|total| {
            let lo = total.saturating_sub(c2 - 1);
            let hi = total.min(c1 - 1);
            let ks: Vec<usize> = (lo..=hi).collect();
            let idx = ks.iter().map(|&k| k * c2 + (total - k)).collect();
            (total, ks, idx)
        })
        .collect()
}

/// `B(θ) Φ B(θ)†` for `B(θ) = exp(θ(a1 a2† - a1† a2))`.
pub fn beam_splitter_rotate(phi: &TwoModeOperator, theta: f64) -> TwoModeOperator {
    let (c1, c2) = phi.cutoffs;
    let bl = blocks(c1, c2);
    let us: Vec<DMatrix<C64>> = bl.iter().map(|(total, ks, _)| block_unitary(*total, ks, theta).map(c)).collect();
    let mut out = CMatrix::zeros(c1 * c2, c1 * c2);
    for (b1, (_, _, i1)) in bl.iter().enumerate() {
        for (b2, (_, _, i2)) in bl.iter().enumerate() {
            let sub = CMatrix::from_fn(i1.len(), i2.len(), |r, s| phi.matrix[(i1[r], i2[s])]);
            if sub.iter().all(|z| *z == C64::default()) {
                continue;
            }
            let res = &us[b1] * sub * us[b2].transpose();
            for (r, &gi) in i1.iter().enumerate() {
                for (s, &gj) in i2.iter().enumerate() {
                    out[(gi, gj)] = res[(r, s)];
                }
            }
        }
    }
    TwoModeOperator { matrix: out, cutoffs: phi.cutoffs }
}

/// Beam splitter of transmissivity `T`: `B a1 B† = √T a1 + √(1-T) a2`.
pub fn beam_splitter_apply(phi: &TwoModeOperator, t: f64) -> Result<TwoModeOperator> {
    Ok(beam_splitter_rotate(phi, transmission_angle(t)?))
}

/// Dense unitary `B(θ)` on the full truncated two-mode space.
pub fn beam_splitter_unitary(c1: usize, c2: usize, theta: f64) -> CMatrix {
    let mut u = CMatrix::zeros(c1 * c2, c1 * c2);
    for (total, ks, idx) in blocks(c1, c2) {
        let b = block_unitary(total, &ks, theta);
        for (r, &gi) in idx.iter().enumerate() {
            for (s, &gj) in idx.iter().enumerate() {
                u[(gi, gj)] = c(b[(r, s)]);
            }
        }
    }
    u
}

/// Photon-number distribution of the dark port `a₋ = (a1 - a2)/√2` in `Φ`.
///
/// Obtained by undoing a balanced splitter and reading the second mode.
/// Exact when `Φ` has no weight on incomplete blocks.
pub fn dark_port_populations(phi: &TwoModeOperator) -> Vec<f64> {
    let out = beam_splitter_rotate(phi, -std::f64::consts::FRAC_PI_4);
    out.marginal_populations(Mode::Second)
}

/// Dark-port photon-number distribution of `ρ ⊗ σ`, computed blockwise
/// on complete (zero-padded) blocks so no truncation enters.
///
/// Entry `m` is `Tr[(ρ⊗σ) Π_m]` with `Π_m` the projector on `m` photons in
/// `a₋`; for non-positive inputs the entries may be negative.
pub fn pair_dark_port_distribution(rho: &CMatrix, sigma: &CMatrix) -> Vec<f64> {
    let (cr, cs) = (rho.nrows(), sigma.nrows());
    let max_total = cr + cs - 2;
    let mut p = vec![0.0; max_total + 1];
    let theta = -std::f64::consts::FRAC_PI_4;
    for total in 0..=max_total {
        let ks: Vec<usize> = (0..=total).collect();
        let block = CMatrix::from_fn(total + 1, total + 1, |k, kp| {
            let (l, lp) = (total - k, total - kp);
            if k < cr && kp < cr && l < cs && lp < cs {
                rho[(k, kp)] * sigma[(l, lp)]
            } else {
                C64::default()
            }
        });
        if block.iter().all(|z| *z == C64::default()) {
            continue;
        }
        let u = block_unitary(total, &ks, theta).map(c);
        let rotated = &u * block * u.transpose();
        for k in 0..=total {
            p[total - k] += rotated[(k, k)].re;
        }
    }
    p
}

/// Reduced state of the dark port for input `ρ ⊗ σ`, before any weighting:
/// `Tr_light[B ρ⊗σ B†]` with `B` the inverse balanced splitter. Built from
/// complete zero-padded blocks, so no truncation enters; its diagonal is
/// [`pair_dark_port_distribution`].
pub fn pair_dark_port_state(rho: &CMatrix, sigma: &CMatrix) -> CMatrix {
    let (cr, cs) = (rho.nrows(), sigma.nrows());
    let max_total = cr + cs - 2;
    let theta = -std::f64::consts::FRAC_PI_4;
    let us: Vec<CMatrix> = (0..=max_total)
        .map(|n| block_unitary(n, &(0..=n).collect::<Vec<_>>(), theta).map(c))
        .collect();
    let mut out = CMatrix::zeros(max_total + 1, max_total + 1);
    for n in 0..=max_total {
        for np in 0..=max_total {
            let block = CMatrix::from_fn(n + 1, np + 1, |k, kp| {
                let (l, lp) = (n - k, np - kp);
                if k < cr && kp < cr && l < cs && lp < cs {
                    rho[(k, kp)] * sigma[(l, lp)]
                } else {
                    C64::default()
                }
            });
            if block.iter().all(|z| *z == C64::default()) {
                continue;
            }
            let rotated = &us[n] * block * us[np].transpose();
            // same light-port count k on both sides
            for k in 0..=n.min(np) {
                out[(n - k, np - k)] += rotated[(k, k)];
            }
        }
    }
    out
}

/// Tensor product of two plain operators (no validation).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
