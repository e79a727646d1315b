//! Discrete probability mass functions over feedback parameters and the
//! damp-and-normalize Bayesian update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform tensor grid of parameter nodes on a box `Π_d [lo_d, hi_d]`.
///
/// Every axis includes both endpoints. Nodes are flattened row-major (last
/// axis fastest) and carry equal quadrature weight `1 / len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub counts: Vec<usize>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ParamGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let dims = lo.len();
        if dims == 0 || hi.len() != dims || counts.len() != dims {
            return Err(Error::Config(format!(
                "parameter grid needs matching bounds and counts, got {} / {} / {}",
                lo.len(),
                hi.len(),
                counts.len()
            )));
        }
        for d in 0..dims {
            if !(lo[d].is_finite() && hi[d].is_finite()) || counts[d] == 0 {
                return Err(Error::Config(format!("invalid parameter axis {d}")));
            }
            if counts[d] > 1 && hi[d] <= lo[d] {
                return Err(Error::Config(format!(
                    "parameter axis {d}: upper bound {} must exceed lower bound {}",
                    hi[d], lo[d]
                )));
            }
        }
        let axes: Vec<Vec<f64>> = (0..dims)
            .map(|d| axis_values(lo[d], hi[d], counts[d]))
            .collect();
        let len: usize = counts.iter().product();
        let mut nodes = Vec::with_capacity(len * dims);
        for l in 0..len {
            let mut rem = l;
            let mut idx = vec![0; dims];
            for d in (0..dims).rev() {
                idx[d] = rem % counts[d];
                rem /= counts[d];
            }
            nodes.extend(idx.iter().enumerate().map(|(d, &i)| axes[d][i]));
        }
        Ok(Self {
            lo,
            hi,
            counts,
            nodes,
            weights: vec![1.0 / len as f64; len],
        })
    }

    /// One-dimensional grid of `count` nodes on `[lo, hi]`.
    pub fn line(lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(vec![lo], vec![hi], vec![count])
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, l: usize) -> &[f64] {
        let d = self.dims();
        &self.nodes[l * d..(l + 1) * d]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node values along one axis.
    pub fn axis(&self, dim: usize) -> Vec<f64> {
        axis_values(self.lo[dim], self.hi[dim], self.counts[dim])
    }

    /// Node spacing along one axis (0 for single-node axes).
    pub fn spacing(&self, dim: usize) -> f64 {
        if self.counts[dim] > 1 {
            (self.hi[dim] - self.lo[dim]) / (self.counts[dim] - 1) as f64
        } else {
            0.0
        }
    }

    /// Per-axis indices of flat node `l`.
    pub fn multi_index(&self, l: usize) -> Vec<usize> {
        let mut rem = l;
        let mut idx = vec![0; self.dims()];
        for d in (0..self.dims()).rev() {
            idx[d] = rem % self.counts[d];
            rem /= self.counts[d];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }
}

/// `lo + l (hi - lo) / (n - 1)`, written so integer-valued nodes come out exact.
fn axis_values(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let m = (count - 1) as f64;
    (0..count)
        .map(|l| {
            let l = l as f64;
            (lo * (m - l) + hi * l) / m
        })
        .collect()
}

/// Probability mass function normalized by `Σ_ℓ w_ℓ P_ℓ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub grid: ParamGrid,
    pub p: Vec<f64>,
}

impl Distribution {
    /// Normalizes nonnegative node densities.
    pub fn from_density(grid: ParamGrid, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::Config(format!(
                "density has {} values for {} nodes",
                density.len(),
                grid.len()
            )));
        }
        if density.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Config("densities must be finite and nonnegative".into()));
        }
        let mut dist = Self { grid, p: density };
        dist.normalize()?;
        Ok(dist)
    }

    pub fn mass(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.p)
            .map(|(w, p)| w * p)
            .sum()
    }

    /// Weighted mass on a subset of nodes.
    pub fn mass_on(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&l| self.grid.weights()[l] * self.p[l]).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let mass = self.mass();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::ZeroMass);
        }
        let inv = 1.0 / mass;
        self.p.iter_mut().for_each(|p| *p *= inv);
        Ok(())
    }

    /// Multiplies node `l` by `lam` (all others by 1) and renormalizes.
    pub fn update(&mut self, l: usize, lam: f64) -> Result<()> {
        self.p[l] *= lam;
        self.normalize()
    }

    /// Multiplies every node by its own likelihood, then renormalizes once.
    pub fn update_all(&mut self, lams: &[f64]) -> Result<()> {
        for (p, &lam) in self.p.iter_mut().zip(lams) {
            *p *= lam;
        }
        self.normalize()
    }

    /// `ℓ¹` distance between node values.
    pub fn variation(&self, other: &Distribution) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn argmax(&self) -> usize {
        self.p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior {
    Uniform,
    /// Product of independent normal densities, same `(mu, sigma)` per axis.
    Gaussian { mu: f64, sigma: f64 },
}

pub fn make_prior(grid: ParamGrid, prior: &Prior) -> Result<Distribution> {
    let density = match *prior {
        Prior::Uniform => vec![1.0; grid.len()],
        Prior::Gaussian { mu, sigma } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::Config(format!("gaussian prior needs sigma > 0, got {sigma}")));
            }
            let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            (0..grid.len())
                .map(|l| {
                    grid.node(l)
                        .iter()
                        .map(|&k| norm * (-(k - mu).powi(2) / (2.0 * sigma * sigma)).exp())
                        .product()
                })
                .collect()
        }
    };
    Distribution::from_density(grid, density)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LikelihoodMode {
    /// Keep weight while `L^{n+1} ≤ L^0`.
    ReferenceThreshold,
    /// Keep weight while `L^{n+1} ≤ C₁ e^{-ν t^{n+1}} L^0`.
    DecayRate,
    /// Keep weight while `L^{n+1} ≤ L^n`.
    PreviousStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodConfig {
    pub mode: LikelihoodMode,
    /// Damping factor in `(0, 1)`.
    pub alpha: f64,
    pub c1: f64,
    pub nu: f64,
}

impl LikelihoodConfig {
    pub fn reference(alpha: f64) -> Self {
        Self {
            mode: LikelihoodMode::ReferenceThreshold,
            alpha,
            c1: 1.0,
            nu: 0.0,
        }
    }

    pub fn previous(alpha: f64) -> Self {
        Self {
            mode: LikelihoodMode::PreviousStep,
            ..Self::reference(alpha)
        }
    }

    pub fn decay_rate(alpha: f64, c1: f64, nu: f64) -> Self {
        Self {
            mode: LikelihoodMode::DecayRate,
            alpha,
            c1,
            nu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "damping factor must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.mode == LikelihoodMode::DecayRate && !(self.c1 >= 1.0 && self.nu >= 0.0) {
            return Err(Error::Config(format!(
                "decay-rate likelihood needs c1 >= 1 and nu >= 0, got c1 = {}, nu = {}",
                self.c1, self.nu
            )));
        }
        Ok(())
    }
}

/// Two-level likelihood: 1 if the indicator passes the configured test,
/// `alpha` otherwise.
pub fn likelihood(l_new: f64, l_prev: f64, t_new: f64, l0: f64, config: &LikelihoodConfig) -> f64 {
    let bound = match config.mode {
        LikelihoodMode::ReferenceThreshold => l0,
        LikelihoodMode::PreviousStep => l_prev,
        LikelihoodMode::DecayRate => config.c1 * (-config.nu * t_new).exp() * l0,
    };
    if l_new <= bound {
        1.0
    } else {
        config.alpha
    }
}
