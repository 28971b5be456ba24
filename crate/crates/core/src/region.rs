//! Geometric regions used for the data set omega and the target set B.

use crate::mesh::{Mesh, Point, Rect};

/// An open planar region. Membership is tested pointwise; elements are
/// assigned to a region by their barycenter.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Open box `(x0, x1) x (y0, y1)`.
    Box(Rect),
    /// Open `outer` with the closed box `cut` removed.
    RectMinusBox { outer: Rect, cut: Rect },
    /// Open disk.
    Disk { center: Point, radius: f64 },
    /// Points of the open `outer` box at distance greater than `radius` from `center`.
    BoxMinusDisk {
        outer: Rect,
        center: Point,
        radius: f64,
    },
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Box(r) => r.contains_open(p),
            Region::RectMinusBox { outer, cut } => outer.contains_open(p) && !cut.contains_closed(p),
            Region::Disk { center, radius } => dist2(p, *center) < radius * radius,
            Region::BoxMinusDisk {
                outer,
                center,
                radius,
            } => outer.contains_open(p) && dist2(p, *center) > radius * radius,
        }
    }
}

fn dist2(p: Point, q: Point) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    dx * dx + dy * dy
}

/// Indices (increasing) of the triangles whose barycenter lies in `region`.
pub fn classify_elements(mesh: &Mesh, region: &Region) -> Vec<usize> {
    (0..mesh.n_triangles())
        .filter(|&t| region.contains(mesh.barycenter(t)))
        .collect()
}
