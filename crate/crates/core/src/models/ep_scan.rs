use crate::error::{Error, Result};
use crate::linalg::{c64, eigvec_condition, fro, right_eigensystem, ComplexMatrix};
use crate::tolerance::Tolerances;

use super::{sigma_x, sigma_z};

/// A grid point counts as exceptional when its smallest eigenvalue gap is
/// below this fraction of `‖H‖` and its eigenbasis is defective.
pub const EP_GAP_REL: f64 = 1e-6;

const GOLDEN_MAX_ITER: usize = 200;
/// Upper bound on the number of floats enumerated once the golden-section
/// bracket has collapsed to a few ulps.
const ULP_SWEEP: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct EPScanReport {
    pub parameter_grid: Vec<f64>,
    pub min_gap: Vec<f64>,
    pub eigvec_cond: Vec<f64>,
    /// Refined positions, each inside a grid interval around a local
    /// minimum of `min_gap`.
    pub ep_locations: Vec<f64>,
    /// Per grid point: meets the EP test itself, or is the grid point
    /// nearest to a refined location.
    pub ep_flags: Vec<bool>,
}

/// Smallest pairwise eigenvalue distance and eigenvector condition number.
/// Failure to converge yields `(NaN, ∞)`.
pub fn spectral_probe(h: &ComplexMatrix) -> (f64, f64) {
    match right_eigensystem(h) {
        Ok((values, vectors)) => {
            let mut gap = f64::INFINITY;
            for i in 0..values.len() {
                for j in (i + 1)..values.len() {
                    gap = gap.min((values[i] - values[j]).norm());
                }
            }
            (gap, eigvec_condition(&vectors))
        }
        Err(_) => (f64::NAN, f64::INFINITY),
    }
}

fn dimer_hamiltonian(kappa: f64, gamma: f64) -> ComplexMatrix {
    sigma_x().scale(kappa) + sigma_z().map(|z| z * c64(0.0, gamma))
}

/// Probe plus the EP verdict at one parameter value.
fn probe(kappa: f64, gamma: f64, tol: &Tolerances) -> (f64, f64, bool) {
    let h = dimer_hamiltonian(kappa, gamma);
    let (gap, cond) = spectral_probe(&h);
    let is_ep = gap < EP_GAP_REL * fro(&h) && cond > tol.defective_cond;
    (gap, cond, is_ep)
}

fn gap_at(kappa: f64, gamma: f64) -> f64 {
    let g = spectral_probe(&dimer_hamiltonian(kappa, gamma)).0;
    if g.is_nan() {
        f64::INFINITY
    } else {
        g
    }
}

/// Minimizes the gap on `[lo, hi]` by golden section, then sweeps the
/// floats around the final bracket so an exactly representable
/// coalescence is hit.
fn refine_minimum(kappa: f64, lo_bound: f64, hi_bound: f64) -> f64 {
    let (mut lo, mut hi) = (lo_bound, hi_bound);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = gap_at(kappa, x1);
    let mut f2 = gap_at(kappa, x2);
    for _ in 0..GOLDEN_MAX_ITER {
        let ulps = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        if hi - lo <= ulps {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gap_at(kappa, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gap_at(kappa, x2);
        }
    }
    // Near the coalescence the computed gap is dominated by O(√ε) round-off,
    // which can steer the last golden steps a few dozen ulps off.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..ULP_SWEEP / 2 {
        let next = x.next_down();
        if next < lo_bound {
            break;
        }
        x = next;
    }
    let mut best = (gap_at(kappa, x), x);
    for _ in 0..ULP_SWEEP {
        x = x.next_up();
        if x > hi_bound {
            break;
        }
        let g = gap_at(kappa, x);
        if g < best.0 {
            best = (g, x);
        }
    }
    best.1
}

/// Scans `H(κ, γ) = κσ_x + iγσ_z` over an ascending grid of `γ`.
pub fn ep_scan(kappa: f64, gamma_grid: &[f64], tol: &Tolerances) -> Result<EPScanReport> {
    if !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kappa must be finite, got {kappa}"
        )));
    }
    if gamma_grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite);
    }
    if gamma_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "gamma grid must be ascending".into(),
        ));
    }
    let n = gamma_grid.len();
    let mut min_gap = Vec::with_capacity(n);
    let mut eigvec_cond = Vec::with_capacity(n);
    let mut ep_flags = Vec::with_capacity(n);
    for &g in gamma_grid {
        let (gap, cond, is_ep) = probe(kappa, g, tol);
        min_gap.push(gap);
        eigvec_cond.push(cond);
        ep_flags.push(is_ep);
    }

    let mut ep_locations: Vec<f64> = Vec::new();
    for i in 0..n {
        let left = if i > 0 { min_gap[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < n {
            min_gap[i + 1]
        } else {
            f64::INFINITY
        };
        // Ties on a plateau are attributed to the first point only.
        if !(min_gap[i] < left && min_gap[i] <= right) {
            continue;
        }
        let lo = gamma_grid[i.saturating_sub(1)];
        let hi = gamma_grid[(i + 1).min(n - 1)];
        let x = if lo < hi {
            refine_minimum(kappa, lo, hi)
        } else {
            gamma_grid[i]
        };
        let (_, _, is_ep) = probe(kappa, x, tol);
        if !is_ep {
            continue;
        }
        ep_locations.push(x);
        let nearest = (lo.max(gamma_grid[0])..=hi).contains(&x).then(|| {
            (0..n)
                .min_by(|&a, &b| {
                    (gamma_grid[a] - x)
                        .abs()
                        .total_cmp(&(gamma_grid[b] - x).abs())
                })
                .unwrap()
        });
        if let Some(k) = nearest {
            ep_flags[k] = true;
        }
    }

    Ok(EPScanReport {
        parameter_grid: gamma_grid.to_vec(),
        min_gap,
        eigvec_cond,
        ep_locations,
        ep_flags,
    })
}
