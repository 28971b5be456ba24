//! Stabilized saddle-point system for `(u_h, z_h) ∈ V_h x W_h`.
//!
//! The bilinear form is
//!
//! ```text
//! A[(u,z),(v,w)] = (u,v)_ω + s(u,v) + G(v,z) - a(z,w) + G(u,w)
//! s(u,v)         = γ J(u,v) + γ h² k⁴ (u,v)
//! G(u,w)         = (∇u,∇w) - k² (u,w)
//! ```
//!
//! with right-hand side `(q,v)_ω + ⟨f,w⟩`. Dual unknowns exist only at
//! interior vertices, which imposes the homogeneous Dirichlet condition on `W_h`
//! by elimination.

use crate::assembly::{
    assemble_jump_with, assemble_load_on, assemble_mass_with, assemble_stiffness_with, DofMap,
    Execution,
};
use crate::error::{Error, RegionRole, Result};
use crate::linalg::LuSolver;
use crate::mesh::{Mesh, Point};
use crate::quadrature::Quadrature;
use crate::region::{classify_elements, Region};
use crate::sparse::{norm_inf, SparseMatrix};

pub const DEFAULT_GAMMA: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationParams {
    pub gamma: f64,
    pub k: f64,
    pub h: f64,
}

impl StabilizationParams {
    pub fn new(gamma: f64, k: f64, h: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be nonnegative, got {k}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
        }
        Ok(StabilizationParams { gamma, k, h })
    }

    /// Default `γ` with `h` taken from the mesh.
    pub fn for_mesh(mesh: &Mesh, k: f64) -> Result<Self> {
        Self::new(DEFAULT_GAMMA, k, mesh.h())
    }

    /// Coefficient `γ h² k⁴` of the zeroth-order primal stabilizer.
    pub fn mass_weight(&self) -> f64 {
        self.gamma * self.h * self.h * self.k.powi(4)
    }
}

/// Data of the (possibly perturbed) problem.
///
/// `q_noise` and `f_noise` are nodal values of P1 perturbations added to the
/// data before assembly; their contributions are `M_ω δq` and `M δf`.
pub struct ProblemData<'a> {
    pub q: &'a (dyn Fn(Point) -> f64 + Sync),
    pub f: &'a (dyn Fn(Point) -> f64 + Sync),
    pub q_noise: Option<&'a [f64]>,
    pub f_noise: Option<&'a [f64]>,
    pub quadrature: &'a Quadrature,
}

/// Assembled operators of one mesh and data region.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub dofs: DofMap,
    pub omega_elements: Vec<usize>,
    pub stiffness: SparseMatrix,
    pub mass: SparseMatrix,
    pub mass_omega: SparseMatrix,
    pub jump: SparseMatrix,
}

impl Discretization {
    pub fn new(mesh: &Mesh, omega: &Region, exec: Execution) -> Result<Self> {
        let omega_elements = classify_elements(mesh, omega);
        if omega_elements.is_empty() {
            return Err(Error::EmptyRegion(RegionRole::Data));
        }
        Ok(Discretization {
            dofs: DofMap::new(mesh),
            stiffness: assemble_stiffness_with(mesh, exec),
            mass: assemble_mass_with(mesh, None, exec)?,
            mass_omega: assemble_mass_with(mesh, Some(&omega_elements), exec)?,
            jump: assemble_jump_with(mesh, exec),
            omega_elements,
        })
    }

    /// `uᵀ (A - k² M) w`.
    pub fn apply_g(&self, k: f64, u: &[f64], w: &[f64]) -> Result<f64> {
        Ok(self.stiffness.bilinear(u, w)? - k * k * self.mass.bilinear(u, w)?)
    }

    /// Primal stabilizer norm squared `‖u‖_V² = γ J(u,u) + γ h² k⁴ ‖u‖²`.
    pub fn primal_norm_sq(&self, params: &StabilizationParams, u: &[f64]) -> Result<f64> {
        Ok(params.gamma * self.jump.quadratic_form(u)?
            + params.mass_weight() * self.mass.quadratic_form(u)?)
    }

    /// Dual norm squared `‖z‖_W² = a(z,z)` for a full-length (zero-extended) nodal vector.
    pub fn dual_norm_sq(&self, z: &[f64]) -> Result<f64> {
        self.stiffness.quadratic_form(z)
    }

    pub fn omega_norm_sq(&self, u: &[f64]) -> Result<f64> {
        self.mass_omega.quadratic_form(u)
    }

    /// Assembles the saddle-point matrix and right-hand side.
    pub fn system(
        &self,
        mesh: &Mesh,
        params: &StabilizationParams,
        data: &ProblemData<'_>,
    ) -> Result<LinearSystem> {
        let nv = self.dofs.n_dofs();
        let ni = self.dofs.n_interior();
        let k2 = params.k * params.k;

        let primal = SparseMatrix::linear_combination(&[
            (1.0, &self.mass_omega),
            (params.gamma, &self.jump),
            (params.mass_weight(), &self.mass),
        ])?;
        let g = SparseMatrix::linear_combination(&[(1.0, &self.stiffness), (-k2, &self.mass)])?;

        let mut triplets: Vec<(usize, usize, f64)> =
            Vec::with_capacity(primal.nnz() + 2 * g.nnz() + self.stiffness.nnz());
        triplets.extend(primal.triplets());
        for (i, j, v) in g.triplets() {
            if let Some(jj) = self.dofs.interior_index(j) {
                triplets.push((i, nv + jj, v));
                triplets.push((nv + jj, i, v));
            }
        }
        for (i, j, v) in self.stiffness.triplets() {
            if let (Some(ii), Some(jj)) = (self.dofs.interior_index(i), self.dofs.interior_index(j)) {
                triplets.push((nv + ii, nv + jj, -v));
            }
        }
        let matrix = SparseMatrix::from_triplets(nv + ni, nv + ni, triplets);

        let mut rhs_u = assemble_load_on(mesh, data.q, data.quadrature, &self.omega_elements)?;
        if let Some(dq) = data.q_noise {
            add_assign(&mut rhs_u, &self.mass_omega.mul_vec(dq)?);
        }
        let all: Vec<usize> = (0..mesh.n_triangles()).collect();
        let mut load_f = assemble_load_on(mesh, data.f, data.quadrature, &all)?;
        if let Some(df) = data.f_noise {
            add_assign(&mut load_f, &self.mass.mul_vec(df)?);
        }
        let mut rhs = rhs_u;
        rhs.extend(self.dofs.restrict(&load_f));

        Ok(LinearSystem {
            matrix,
            rhs,
            n_primal: nv,
            dofs: self.dofs.clone(),
        })
    }
}

fn add_assign(a: &mut [f64], b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// Symmetric indefinite system; unknowns ordered as all vertices (u) then
/// interior vertices (z).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub n_primal: usize,
    pub dofs: DofMap,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn n_dual(&self) -> usize {
        self.dim() - self.n_primal
    }

    /// Packs `(u, z_interior)` into one unknown vector.
    pub fn pack(&self, u: &[f64], z_interior: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n_primal {
            return Err(Error::DimensionMismatch {
                expected: self.n_primal,
                got: u.len(),
            });
        }
        if z_interior.len() != self.n_dual() {
            return Err(Error::DimensionMismatch {
                expected: self.n_dual(),
                got: z_interior.len(),
            });
        }
        Ok(u.iter().chain(z_interior).copied().collect())
    }

    /// `A[x, y] = yᵀ A x`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.matrix.bilinear(y, x)
    }

    /// `A x - b`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.matrix.mul_vec(x)?;
        for (ri, bi) in r.iter_mut().zip(&self.rhs) {
            *ri -= bi;
        }
        Ok(r)
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: Vec<f64>,
    /// Dual values at interior vertices.
    pub z_interior: Vec<f64>,
    /// Dual values zero-extended to all vertices.
    pub z: Vec<f64>,
    /// `‖A x - b‖∞`.
    pub residual: f64,
}

/// Builds the system for `mesh` and data region `omega`.
pub fn build_system(
    mesh: &Mesh,
    omega: &Region,
    params: &StabilizationParams,
    data: &ProblemData<'_>,
) -> Result<LinearSystem> {
    Discretization::new(mesh, omega, Execution::Serial)?.system(mesh, params, data)
}

/// Direct solve with partial pivoting and one step of iterative refinement.
///
/// Fails when `‖Ax - b‖∞ > 1e-9 (‖b‖∞ + ‖A‖∞ ‖x‖∞)`.
pub fn solve(system: &LinearSystem) -> Result<Solution> {
    let lu = LuSolver::factor(&system.matrix)?;
    let mut x = lu.solve(&system.rhs)?;
    let r = system.residual(&x)?;
    let dx = lu.solve(&r)?;
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi -= di;
    }
    let residual = norm_inf(&system.residual(&x)?);
    let bound = 1e-9 * (norm_inf(&system.rhs) + system.matrix.norm_inf() * norm_inf(&x));
    if !(residual <= bound) {
        let condition = system.matrix.norm_one() * lu.inverse_norm_one_estimate();
        return Err(Error::Residual {
            residual,
            bound,
            condition,
        });
    }
    let u = x[..system.n_primal].to_vec();
    let z_interior = x[system.n_primal..].to_vec();
    let z = system.dofs.extend(&z_interior);
    Ok(Solution {
        u,
        z_interior,
        z,
        residual,
    })
}

/// `uᵀ (A - k² M) w` assembled on `mesh`.
pub fn apply_g(mesh: &Mesh, k: f64, u: &[f64], w: &[f64]) -> Result<f64> {
    let stiffness = assemble_stiffness_with(mesh, Execution::Serial);
    let mass = assemble_mass_with(mesh, None, Execution::Serial)?;
    Ok(stiffness.bilinear(u, w)? - k * k * mass.bilinear(u, w)?)
}
