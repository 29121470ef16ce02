//! Relative-entropy measures of coherence and quantum correlations.
//!
//! Three quantities, all in bits:
//!
//! - [`coherence_rel_ent`]: distance from the fully dephased state,
//!   `S(Δρ) - S(ρ)`;
//! - [`qi_rel_ent`]: the one-sided variant that dephases only the first
//!   subsystem, `S(Φ_A ρ) - S(ρ)`;
//! - [`discord_rel_ent`]: the two-qubit discord obtained by minimizing
//!   `S(Δ_{a⊗b} ρ) - S(ρ)` over all products of local orthonormal bases.
//!
//! The discord minimization runs a dense deterministic grid over the four
//! basis angles, then polishes the best grid cells with Nelder-Mead. Both
//! stages evaluate the objective through closed-form outcome probabilities
//! (the dephased state is diagonal in its own basis), so no eigensolve is
//! needed per candidate basis.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::density::{dephase, shannon_entropy, von_neumann_entropy, DensityMatrix};
use crate::matrix::ComplexMatrix;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Binary (two-outcome) Shannon entropy in bits.
///
/// Accepts probabilities up to `1e-12` outside `[0, 1]` (clamped) to absorb
/// roundoff; anything further out is a domain error.
pub fn binary_entropy(p: f64) -> Result<f64> {
    const SLOP: f64 = 1e-12;
    if !(-SLOP..=1.0 + SLOP).contains(&p) {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: p,
            min: 0.0,
            max: 1.0,
        });
    }
    let p = p.clamp(0.0, 1.0);
    Ok(shannon_entropy(&[p, 1.0 - p]))
}

/// Relative entropy of coherence `S(Δρ) - S(ρ)` with respect to the
/// computational basis of every subsystem.
pub fn coherence_rel_ent(rho: &DensityMatrix) -> f64 {
    let diagonal = rho.diagonal_probabilities();
    (shannon_entropy(&diagonal) - von_neumann_entropy(rho)).max(0.0)
}

/// One-sided coherence `S(Φ_A ρ) - S(ρ)`, where `Φ_A` fully dephases the
/// first subsystem of a bipartite state and leaves the second untouched.
pub fn qi_rel_ent(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::NotBipartite {
            count: rho.dims().len(),
        });
    }
    let dephased = dephase(rho, &[0])?;
    Ok((von_neumann_entropy(&dephased) - von_neumann_entropy(rho)).max(0.0))
}

/// Tuning knobs for the discord minimization.
#[derive(Clone, Debug)]
pub struct DiscordConfig {
    /// Points per angle in the seeding grid; the polar angle covers
    /// `[0, π/2]` inclusive, the azimuthal angle covers `[0, 2π)`.
    pub grid_points: usize,
    /// How many of the best grid cells are polished with Nelder-Mead.
    pub refine_starts: usize,
    /// Iteration cap per Nelder-Mead start.
    pub max_iter: usize,
    /// Nelder-Mead stops when the objective spread across the simplex falls
    /// below this.
    pub f_tol: f64,
}

impl Default for DiscordConfig {
    fn default() -> Self {
        Self {
            grid_points: 12,
            refine_starts: 5,
            max_iter: 200,
            f_tol: 1e-12,
        }
    }
}

/// A product of two single-qubit orthonormal bases, parameterized by Bloch
/// angles. Canonical form: polar angles in `[0, π]`, azimuthal in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalBasisPair {
    /// Polar angle of the first qubit's basis.
    pub theta_a: f64,
    /// Azimuthal angle of the first qubit's basis.
    pub phi_a: f64,
    /// Polar angle of the second qubit's basis.
    pub theta_b: f64,
    /// Azimuthal angle of the second qubit's basis.
    pub phi_b: f64,
}

impl LocalBasisPair {
    /// Build a pair, folding the angles into canonical ranges.
    pub fn new(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> Self {
        let (theta_a, phi_a) = canonical_angles(theta_a, phi_a);
        let (theta_b, phi_b) = canonical_angles(theta_b, phi_b);
        Self {
            theta_a,
            phi_a,
            theta_b,
            phi_b,
        }
    }

    /// Basis for the first qubit as a unitary whose columns are the basis
    /// vectors.
    pub fn basis_a(&self) -> ComplexMatrix {
        basis_matrix(self.theta_a, self.phi_a)
    }

    /// Basis for the second qubit as a unitary whose columns are the basis
    /// vectors.
    pub fn basis_b(&self) -> ComplexMatrix {
        basis_matrix(self.theta_b, self.phi_b)
    }
}

/// Outcome of the discord minimization.
#[derive(Clone, Debug)]
pub struct DiscordResult {
    /// The discord value, clamped at zero.
    pub value: f64,
    /// Best objective value before clamping (can be a tiny negative number
    /// for genuinely discord-free states).
    pub raw_value: f64,
    /// The minimizing product basis.
    pub optimal_bases: LocalBasisPair,
    /// Best objective after the grid stage, then after each refinement.
    pub optimizer_trace: Vec<f64>,
    /// Whether every Nelder-Mead start met `f_tol` within `max_iter`.
    pub converged: bool,
}

/// Relative entropy of discord of a two-qubit state: the minimum over
/// product bases `a ⊗ b` of `S(Δ_{a⊗b} ρ) - S(ρ)`.
pub fn discord_rel_ent(rho: &DensityMatrix, config: &DiscordConfig) -> Result<DiscordResult> {
    if rho.dims().len() != 2 {
        return Err(Error::NotBipartite {
            count: rho.dims().len(),
        });
    }
    for &d in rho.dims() {
        if d != 2 {
            return Err(Error::DimensionOutOfRange {
                dim: d,
                min: 2,
                max: 2,
            });
        }
    }
    if config.grid_points < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "grid_points",
            value: config.grid_points as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    if config.refine_starts == 0 || config.max_iter == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "refine_starts/max_iter",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }

    let s_rho = von_neumann_entropy(rho);
    let matrix = rho.matrix();
    let objective = |angles: &[f64; 4]| dephased_entropy_gap(matrix, s_rho, angles);

    // Stage 1: deterministic dense grid. The polar grid includes both
    // endpoints so the computational basis and its equator are hit exactly.
    let g = config.grid_points;
    let thetas: Vec<f64> = (0..g).map(|i| i as f64 * (PI / 2.0) / (g - 1) as f64).collect();
    let phis: Vec<f64> = (0..g).map(|j| j as f64 * 2.0 * PI / g as f64).collect();
    let qubit_vectors: Vec<QubitBasis> = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| qubit_basis(t, p)))
        .collect();

    let cells = g * g;
    let total = cells * cells;
    let grid_values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let a = &qubit_vectors[idx / cells];
            let b = &qubit_vectors[idx % cells];
            joint_entropy(matrix, a, b) - s_rho
        })
        .collect();

    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&i, &j| {
        grid_values[i]
            .partial_cmp(&grid_values[j])
            .expect("finite objective")
            .then(i.cmp(&j))
    });

    let grid_angles = |idx: usize| -> [f64; 4] {
        let (a_cell, b_cell) = (idx / cells, idx % cells);
        [
            thetas[a_cell / g],
            phis[a_cell % g],
            thetas[b_cell / g],
            phis[b_cell % g],
        ]
    };

    let mut best_value = grid_values[order[0]];
    let mut best_angles = grid_angles(order[0]);
    let mut trace = vec![best_value];
    let mut converged = true;

    // Stage 2: Nelder-Mead polish from the best grid cells. The initial
    // simplex step is a quarter of the polar grid spacing.
    let step = (PI / 2.0) / (g - 1) as f64 / 4.0;
    let starts = config.refine_starts.min(order.len());
    for &idx in order.iter().take(starts) {
        let outcome = nelder_mead(
            &objective,
            grid_angles(idx),
            step,
            config.max_iter,
            config.f_tol,
        );
        trace.push(outcome.value);
        converged &= outcome.converged;
        if outcome.value < best_value {
            best_value = outcome.value;
            best_angles = outcome.x;
        }
    }

    Ok(DiscordResult {
        value: best_value.max(0.0),
        raw_value: best_value,
        optimal_bases: LocalBasisPair::new(
            best_angles[0],
            best_angles[1],
            best_angles[2],
            best_angles[3],
        ),
        optimizer_trace: trace,
        converged,
    })
}

/// Pair of orthonormal single-qubit basis vectors.
type QubitBasis = [[C64; 2]; 2];

/// Basis vectors `(cos(θ/2), e^{iφ} sin(θ/2))` and
/// `(-sin(θ/2), e^{iφ} cos(θ/2))`.
fn qubit_basis(theta: f64, phi: f64) -> QubitBasis {
    let (s, c) = (theta / 2.0).sin_cos();
    let ph = C64::from_polar(1.0, phi);
    [
        [C64::new(c, 0.0), ph * s],
        [C64::new(-s, 0.0), ph * c],
    ]
}

fn basis_matrix(theta: f64, phi: f64) -> ComplexMatrix {
    let vs = qubit_basis(theta, phi);
    ComplexMatrix::from_fn(2, |row, col| vs[col][row])
}

/// Objective: entropy of ρ dephased in the product basis given by `angles`,
/// minus `s_rho`.
fn dephased_entropy_gap(rho: &ComplexMatrix, s_rho: f64, angles: &[f64; 4]) -> f64 {
    let a = qubit_basis(angles[0], angles[1]);
    let b = qubit_basis(angles[2], angles[3]);
    joint_entropy(rho, &a, &b) - s_rho
}

/// Entropy of the outcome distribution `p_ij = ⟨a_i b_j| ρ |a_i b_j⟩`.
///
/// The state dephased in a product basis is diagonal in that basis, so its
/// entropy is exactly the Shannon entropy of these probabilities.
fn joint_entropy(rho: &ComplexMatrix, a: &QubitBasis, b: &QubitBasis) -> f64 {
    let mut probabilities = [0.0f64; 4];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let v = [ai[0] * bj[0], ai[0] * bj[1], ai[1] * bj[0], ai[1] * bj[1]];
            let mut acc = C64::new(0.0, 0.0);
            for (r, vr) in v.iter().enumerate() {
                let mut row = C64::new(0.0, 0.0);
                for (c, vc) in v.iter().enumerate() {
                    row += rho.get(r, c) * vc;
                }
                acc += vr.conj() * row;
            }
            probabilities[i * 2 + j] = acc.re.max(0.0);
        }
    }
    shannon_entropy(&probabilities)
}

fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let tau = 2.0 * PI;
    let mut theta = theta.rem_euclid(tau);
    let mut phi = phi;
    if theta > PI {
        theta = tau - theta;
        phi += PI;
    }
    (theta, phi.rem_euclid(tau))
}

struct NelderMeadOutcome {
    x: [f64; 4],
    value: f64,
    converged: bool,
}

/// Minimize `f` from `x0` with a standard Nelder-Mead simplex
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5). Deterministic:
/// ties in the simplex ordering are broken by insertion order.
fn nelder_mead(
    f: &impl Fn(&[f64; 4]) -> f64,
    x0: [f64; 4],
    step: f64,
    max_iter: usize,
    f_tol: f64,
) -> NelderMeadOutcome {
    const DIM: usize = 4;
    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(DIM + 1);
    simplex.push((x0, f(&x0)));
    for k in 0..DIM {
        let mut x = x0;
        x[k] += step;
        simplex.push((x, f(&x)));
    }

    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        if simplex[DIM].1 - simplex[0].1 <= f_tol {
            converged = true;
            break;
        }

        // Centroid of all points except the worst.
        let mut centroid = [0.0f64; 4];
        for (x, _) in simplex.iter().take(DIM) {
            for k in 0..DIM {
                centroid[k] += x[k] / DIM as f64;
            }
        }
        let worst = simplex[DIM];

        let blend = |a: f64| {
            let mut x = [0.0f64; 4];
            for k in 0..DIM {
                x[k] = centroid[k] + a * (worst.0[k] - centroid[k]);
            }
            x
        };

        let reflected = blend(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(-2.0);
            let fe = f(&expanded);
            simplex[DIM] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[DIM - 1].1 {
            simplex[DIM] = (reflected, fr);
        } else {
            let (contracted, toward) = if fr < worst.1 {
                (blend(-0.5), fr)
            } else {
                (blend(0.5), worst.1)
            };
            let fc = f(&contracted);
            if fc < toward {
                simplex[DIM] = (contracted, fc);
            } else {
                // Shrink toward the best point.
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for k in 0..DIM {
                        entry.0[k] = best[k] + 0.5 * (entry.0[k] - best[k]);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    NelderMeadOutcome {
        x: simplex[0].0,
        value: simplex[0].1,
        converged,
    }
}
