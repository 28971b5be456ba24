//! Structured triangulations of axis-aligned rectangles.
//!
//! Every grid cell is split into two counterclockwise triangles. The diagonal
//! alternates in a checkerboard: cell `(i, j)` uses the SW-NE diagonal when
//! `i + j` is even and the NW-SE diagonal otherwise.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect::new(0.0, 1.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Open-set membership.
    pub fn contains_open(&self, p: Point) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }

    /// Closed-set membership.
    pub fn contains_closed(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    fn validate(&self) -> Result<()> {
        // Negated comparisons so that NaN bounds are rejected too.
        if !(self.x1 > self.x0) || !(self.y1 > self.y0) {
            return Err(Error::DegenerateRectangle {
                x0: self.x0,
                x1: self.x1,
                y0: self.y0,
                y1: self.y1,
            });
        }
        Ok(())
    }
}

/// An edge shared by two triangles. `left` and `right` are triangle indices;
/// the face normal points from `left` into `right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteriorFace {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    interior_faces: Vec<InteriorFace>,
    boundary_vertex: Vec<bool>,
    n_boundary_edges: usize,
    domain: Rect,
    h: f64,
    cell_size: [f64; 2],
}

/// Builds the alternating-diagonal triangulation of `domain` with `nx` by `ny` cells.
pub fn build_uniform_mesh(domain: Rect, nx: usize, ny: usize) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidSubdivision { nx, ny });
    }
    domain.validate()?;

    let hx = domain.width() / nx as f64;
    let hy = domain.height() / ny as f64;
    let idx = |i: usize, j: usize| j * (nx + 1) + i;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // Pin the last row/column to the exact rectangle bounds.
        let y = if j == ny { domain.y1 } else { domain.y0 + j as f64 * hy };
        for i in 0..=nx {
            let x = if i == nx { domain.x1 } else { domain.x0 + i as f64 * hx };
            vertices.push([x, y]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let sw = idx(i, j);
            let se = idx(i + 1, j);
            let nw = idx(i, j + 1);
            let ne = idx(i + 1, j + 1);
            if (i + j) % 2 == 0 {
                triangles.push([sw, se, ne]);
                triangles.push([sw, ne, nw]);
            } else {
                triangles.push([sw, se, nw]);
                triangles.push([se, ne, nw]);
            }
        }
    }

    let mut mesh = Mesh::from_parts(vertices, triangles, domain)?;
    mesh.cell_size = [hx, hy];
    Ok(mesh)
}

impl Mesh {
    /// Builds connectivity for an arbitrary conforming triangulation of `domain`.
    ///
    /// Triangles are reoriented counterclockwise. Boundary vertices are those on
    /// an edge owned by a single triangle.
    pub fn from_parts(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        domain: Rect,
    ) -> Result<Mesh> {
        domain.validate()?;
        let nv = vertices.len();
        for tri in triangles.iter_mut() {
            for &v in tri.iter() {
                if v >= nv {
                    return Err(Error::InvalidParameter(format!(
                        "triangle references vertex {v} but mesh has {nv}"
                    )));
                }
            }
            if signed_area(&vertices, *tri) < 0.0 {
                tri.swap(1, 2);
            }
            if signed_area(&vertices, *tri) <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "degenerate triangle {tri:?}"
                )));
            }
        }

        let mut owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut edge_order = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let entry = owners.entry(key).or_default();
                if entry.is_empty() {
                    edge_order.push(key);
                }
                entry.push(t);
            }
        }

        let mut interior_faces = Vec::new();
        let mut boundary_vertex = vec![false; nv];
        let mut n_boundary_edges = 0;
        for key in edge_order {
            match owners[&key].as_slice() {
                [_] => {
                    n_boundary_edges += 1;
                    boundary_vertex[key.0] = true;
                    boundary_vertex[key.1] = true;
                }
                [l, r] => interior_faces.push(InteriorFace {
                    vertices: [key.0, key.1],
                    left: *l,
                    right: *r,
                }),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "edge {key:?} shared by {} triangles",
                        other.len()
                    )))
                }
            }
        }

        let h = 1.0 / (nv as f64).sqrt();
        Ok(Mesh {
            vertices,
            triangles,
            interior_faces,
            boundary_vertex,
            n_boundary_edges,
            domain,
            h,
            cell_size: [f64::NAN, f64::NAN],
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn interior_faces(&self) -> &[InteriorFace] {
        &self.interior_faces
    }

    pub fn boundary_vertex(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// Reported mesh size `1 / sqrt(n_vertices)`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Geometric grid spacing `[hx, hy]`; NaN for meshes not built on a grid.
    pub fn cell_size(&self) -> [f64; 2] {
        self.cell_size
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.interior_faces.len() + self.n_boundary_edges
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.n_boundary_edges
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    pub fn barycenter(&self, t: usize) -> Point {
        let [p, q, r] = self.triangle_points(t);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    }

    /// Gradients of the three barycentric coordinates on triangle `t`.
    pub fn basis_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [p0, p1, p2] = self.triangle_points(t);
        let twice_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let inv = 1.0 / twice_area;
        [
            [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
            [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
            [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
        ]
    }

    /// Maps reference coordinates `(s, t)` on triangle `tri` to physical space.
    pub fn map_reference(&self, tri: usize, s: f64, t: f64) -> Point {
        let [p0, p1, p2] = self.triangle_points(tri);
        [
            p0[0] + s * (p1[0] - p0[0]) + t * (p2[0] - p0[0]),
            p0[1] + s * (p1[1] - p0[1]) + t * (p2[1] - p0[1]),
        ]
    }

    pub fn face_length(&self, face: usize) -> f64 {
        let [a, b] = self.interior_faces[face].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        (pb[0] - pa[0]).hypot(pb[1] - pa[1])
    }

    /// Unit normal of an interior face, pointing from its left triangle into its right one.
    pub fn interior_face_normal(&self, face: usize) -> Result<[f64; 2]> {
        let f = self
            .interior_faces
            .get(face)
            .ok_or(Error::NotInteriorFace {
                face,
                count: self.interior_faces.len(),
            })?;
        let [a, b] = f.vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let len = self.face_length(face);
        let mut n = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];

        let left = self.triangles[f.left];
        let opposite = left
            .iter()
            .copied()
            .find(|&v| v != a && v != b)
            .expect("left triangle contains the face");
        let po = self.vertices[opposite];
        if n[0] * (po[0] - pa[0]) + n[1] * (po[1] - pa[1]) > 0.0 {
            n = [-n[0], -n[1]];
        }
        Ok(n)
    }

    /// Indices of interior vertices, in increasing order.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&v| !self.boundary_vertex[v])
            .collect()
    }

    /// Returns a copy with vertices renumbered by `perm[old] = new`.
    pub fn permute_vertices(&self, perm: &[usize]) -> Result<Mesh> {
        let nv = self.n_vertices();
        if perm.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; nv];
        for &p in perm {
            if p >= nv || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(
                    "vertex renumbering is not a permutation".into(),
                ));
            }
        }
        let mut vertices = vec![[0.0; 2]; nv];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let triangles = self
            .triangles
            .iter()
            .map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]])
            .collect();
        let mut mesh = Mesh::from_parts(vertices, triangles, self.domain)?;
        mesh.cell_size = self.cell_size;
        Ok(mesh)
    }

    /// Plain-text dump: `nv nt nf`, vertex lines `x y boundary_flag`,
    /// triangle lines `i j k`, face lines `a b left right`.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{} {} {}",
            self.n_vertices(),
            self.n_triangles(),
            self.interior_faces.len()
        )?;
        for (p, &b) in self.vertices.iter().zip(&self.boundary_vertex) {
            writeln!(w, "{:.16e} {:.16e} {}", p[0], p[1], u8::from(b))?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        for f in &self.interior_faces {
            writeln!(w, "{} {} {} {}", f.vertices[0], f.vertices[1], f.left, f.right)?;
        }
        Ok(())
    }
}

fn signed_area(vertices: &[Point], tri: [usize; 3]) -> f64 {
    let [p0, p1, p2] = tri.map(|v| vertices[v]);
    0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
}
