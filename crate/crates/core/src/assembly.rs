//! P1 finite element operators: stiffness, (restricted) mass, the gradient
//! jump stabilizer, load vectors and the L² projection.
//!
//! Bilinear forms of P1 functions are integrated exactly. Loads use a
//! reference-triangle quadrature rule.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CholeskySolver;
use crate::mesh::{Mesh, Point};
use crate::quadrature::Quadrature;
use crate::sparse::{norm_inf, SparseMatrix};

/// Serial or element-parallel assembly. Both produce bit-identical output:
/// parallel chunks are merged in element order before duplicates are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Serial,
    Parallel,
}

const CHUNK: usize = 4096;

type Triplets = Vec<(usize, usize, f64)>;

fn collect_triplets<K>(items: &[usize], exec: Execution, kernel: K) -> Triplets
where
    K: Fn(usize, &mut Triplets) + Sync,
{
    match exec {
        Execution::Serial => {
            let mut out = Vec::new();
            for &e in items {
                kernel(e, &mut out);
            }
            out
        }
        Execution::Parallel => items
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut out = Vec::new();
                for &e in chunk {
                    kernel(e, &mut out);
                }
                out
            })
            .collect::<Vec<_>>()
            .concat(),
    }
}

/// P1 degrees of freedom: one per vertex. Dual unknowns live on interior vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    n_dofs: usize,
    interior: Vec<usize>,
    interior_index: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let interior = mesh.interior_vertices();
        let mut interior_index = vec![None; mesh.n_vertices()];
        for (k, &v) in interior.iter().enumerate() {
            interior_index[v] = Some(k);
        }
        DofMap {
            n_dofs: mesh.n_vertices(),
            interior,
            interior_index,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    /// Position of vertex `v` in the interior list.
    pub fn interior_index(&self, v: usize) -> Option<usize> {
        self.interior_index[v]
    }

    /// Restriction of a nodal vector to interior dofs.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&v| full[v]).collect()
    }

    /// Zero extension of interior values to all dofs.
    pub fn extend(&self, interior_values: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_dofs];
        for (&v, &x) in self.interior.iter().zip(interior_values) {
            full[v] = x;
        }
        full
    }
}

/// Element stiffness matrix `|K| ∇λ_a · ∇λ_b`.
pub fn local_stiffness(mesh: &Mesh, t: usize) -> [[f64; 3]; 3] {
    let g = mesh.basis_gradients(t);
    let area = mesh.area(t);
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
        }
    }
    k
}

/// Consistent element mass matrix `|K| (1 + δ_ab) / 12`.
pub fn local_mass(area: f64) -> [[f64; 3]; 3] {
    let off = area / 12.0;
    let diag = area / 6.0;
    [[diag, off, off], [off, diag, off], [off, off, diag]]
}

fn push_local(out: &mut Triplets, tri: [usize; 3], local: &[[f64; 3]; 3]) {
    for a in 0..3 {
        for b in 0..3 {
            out.push((tri[a], tri[b], local[a][b]));
        }
    }
}

fn all_elements(mesh: &Mesh) -> Vec<usize> {
    (0..mesh.n_triangles()).collect()
}

fn check_subset(mesh: &Mesh, subset: &[usize]) -> Result<()> {
    match subset.iter().find(|&&t| t >= mesh.n_triangles()) {
        Some(&index) => Err(Error::InvalidElement {
            index,
            count: mesh.n_triangles(),
        }),
        None => Ok(()),
    }
}

pub fn assemble_stiffness(mesh: &Mesh) -> SparseMatrix {
    assemble_stiffness_with(mesh, Execution::Serial)
}

pub fn assemble_stiffness_with(mesh: &Mesh, exec: Execution) -> SparseMatrix {
    let n = mesh.n_vertices();
    let triplets = collect_triplets(&all_elements(mesh), exec, |t, out| {
        push_local(out, mesh.triangles()[t], &local_stiffness(mesh, t));
    });
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Mass matrix over all elements, or over `subset` when given.
pub fn assemble_mass(mesh: &Mesh, subset: Option<&[usize]>) -> Result<SparseMatrix> {
    assemble_mass_with(mesh, subset, Execution::Serial)
}

pub fn assemble_mass_with(
    mesh: &Mesh,
    subset: Option<&[usize]>,
    exec: Execution,
) -> Result<SparseMatrix> {
    let n = mesh.n_vertices();
    let owned;
    let elements = match subset {
        Some(s) => {
            check_subset(mesh, s)?;
            s
        }
        None => {
            owned = all_elements(mesh);
            &owned
        }
    };
    let triplets = collect_triplets(elements, exec, |t, out| {
        push_local(out, mesh.triangles()[t], &local_mass(mesh.area(t)));
    });
    Ok(SparseMatrix::from_triplets(n, n, triplets))
}

/// Coefficients `c_v` with `⟦n·∇u⟧_F = Σ_v c_v u_v` on interior face `face`.
pub fn face_jump_coefficients(mesh: &Mesh, face: usize) -> Vec<(usize, f64)> {
    let f = mesh.interior_faces()[face];
    let n = mesh
        .interior_face_normal(face)
        .expect("face index comes from the interior face list");
    let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(4);
    let mut add = |v: usize, c: f64| match coeffs.iter_mut().find(|(w, _)| *w == v) {
        Some((_, x)) => *x += c,
        None => coeffs.push((v, c)),
    };
    for (t, sign) in [(f.left, 1.0), (f.right, -1.0)] {
        let g = mesh.basis_gradients(t);
        for (a, &v) in mesh.triangles()[t].iter().enumerate() {
            add(v, sign * (n[0] * g[a][0] + n[1] * g[a][1]));
        }
    }
    coeffs
}

/// Jump stabilizer `Σ_F h_F ∫_F ⟦n·∇u⟧² ds` with `h_F` the face length.
pub fn assemble_jump(mesh: &Mesh) -> SparseMatrix {
    assemble_jump_with(mesh, Execution::Serial)
}

pub fn assemble_jump_with(mesh: &Mesh, exec: Execution) -> SparseMatrix {
    let n = mesh.n_vertices();
    let faces: Vec<usize> = (0..mesh.interior_faces().len()).collect();
    let triplets = collect_triplets(&faces, exec, |f, out| {
        let len = mesh.face_length(f);
        let weight = len * len;
        let c = face_jump_coefficients(mesh, f);
        for &(a, ca) in &c {
            for &(b, cb) in &c {
                out.push((a, b, weight * (ca * cb)));
            }
        }
    });
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Quadrature points of triangle `t` in physical space with physical weights.
pub fn element_quadrature(mesh: &Mesh, t: usize, quad: &Quadrature) -> Vec<(Point, f64)> {
    let scale = 2.0 * mesh.area(t);
    quad.iter()
        .map(|([s, r], w)| (mesh.map_reference(t, s, r), w * scale))
        .collect()
}

/// `b_i = ∫ f φ_i` over all elements.
pub fn assemble_load<F>(mesh: &Mesh, f: F, quad: &Quadrature) -> Vec<f64>
where
    F: Fn(Point) -> f64 + Sync,
{
    assemble_load_on(mesh, f, quad, &all_elements(mesh)).expect("all elements are valid")
}

/// `b_i = ∫ f φ_i` restricted to `elements`.
pub fn assemble_load_on<F>(mesh: &Mesh, f: F, quad: &Quadrature, elements: &[usize]) -> Result<Vec<f64>>
where
    F: Fn(Point) -> f64 + Sync,
{
    check_subset(mesh, elements)?;
    let bary = quad.barycentric();
    let mut b = vec![0.0; mesh.n_vertices()];
    for &t in elements {
        let tri = mesh.triangles()[t];
        for ((p, w), lam) in element_quadrature(mesh, t, quad).into_iter().zip(&bary) {
            let fw = f(p) * w;
            for a in 0..3 {
                b[tri[a]] += fw * lam[a];
            }
        }
    }
    Ok(b)
}

/// Nodal interpolant.
pub fn interpolate<F: Fn(Point) -> f64>(mesh: &Mesh, f: F) -> Vec<f64> {
    mesh.vertices().iter().map(|&p| f(p)).collect()
}

/// Orthogonal L² projection onto the P1 space: solves `M p = (w, φ_i)`.
pub fn l2_project<F>(mesh: &Mesh, w: F, quad: &Quadrature) -> Result<Vec<f64>>
where
    F: Fn(Point) -> f64 + Sync,
{
    let mass = assemble_mass(mesh, None)?;
    let rhs = assemble_load(mesh, w, quad);
    let p = CholeskySolver::factor(&mass)?.solve(&rhs)?;
    let r = mass.mul_vec(&p)?;
    let residual = r.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let bound = 1e-10 * norm_inf(&rhs).max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(Error::Residual {
            residual,
            bound,
            condition: f64::NAN,
        });
    }
    Ok(p)
}
