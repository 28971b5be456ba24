//! Data and target regions of the benchmark configurations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::mesh::Rect;
use crate::region::Region;

/// Width of the data strip of the WKB configuration.
pub const WKB_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Continuation inside the convex hull of the data region.
    Convex,
    NonconvexBox,
    NonconvexDisk,
    HadamardConvex,
    HadamardNonconvex,
    /// Data in a strip along the bottom, target everything below the top strip.
    Wkb,
}

impl Geometry {
    pub const ALL: [Geometry; 6] = [
        Geometry::Convex,
        Geometry::NonconvexBox,
        Geometry::NonconvexDisk,
        Geometry::HadamardConvex,
        Geometry::HadamardNonconvex,
        Geometry::Wkb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Convex => "convex",
            Geometry::NonconvexBox => "nonconvex_box",
            Geometry::NonconvexDisk => "nonconvex_disk",
            Geometry::HadamardConvex => "hadamard_convex",
            Geometry::HadamardNonconvex => "hadamard_nonconvex",
            Geometry::Wkb => "wkb",
        }
    }

    pub fn domain(self) -> Rect {
        match self {
            Geometry::HadamardConvex | Geometry::HadamardNonconvex => Rect::new(0.0, PI, 0.0, 1.0),
            _ => Rect::UNIT,
        }
    }

    /// The data region omega.
    pub fn omega(self) -> Region {
        let domain = self.domain();
        match self {
            Geometry::Convex => Region::RectMinusBox {
                outer: domain,
                cut: Rect::new(0.1, 0.9, 0.25, 1.0),
            },
            Geometry::NonconvexBox => Region::Box(Rect::new(0.25, 0.75, 0.0, 0.5)),
            Geometry::NonconvexDisk => Region::Disk {
                center: [0.5, 0.5],
                radius: 0.25,
            },
            Geometry::HadamardConvex => Region::RectMinusBox {
                outer: domain,
                cut: Rect::new(PI / 4.0, 3.0 * PI / 4.0, 0.0, 0.25),
            },
            Geometry::HadamardNonconvex => {
                Region::Box(Rect::new(PI / 4.0, 3.0 * PI / 4.0, 0.0, 0.5))
            }
            Geometry::Wkb => Region::Box(Rect::new(0.0, 1.0, 0.0, WKB_EPSILON)),
        }
    }

    /// The target region B.
    pub fn target(self) -> Region {
        let domain = self.domain();
        match self {
            Geometry::Convex => Region::RectMinusBox {
                outer: domain,
                cut: Rect::new(0.1, 0.9, 0.95, 1.0),
            },
            Geometry::NonconvexBox => Region::Box(Rect::new(0.125, 0.875, 0.0, 0.95)),
            Geometry::NonconvexDisk => Region::Disk {
                center: [0.5, 0.5],
                radius: 0.45,
            },
            Geometry::HadamardConvex => Region::RectMinusBox {
                outer: domain,
                cut: Rect::new(PI / 4.0, 3.0 * PI / 4.0, 0.0, 0.95),
            },
            Geometry::HadamardNonconvex => {
                Region::Box(Rect::new(PI / 8.0, 7.0 * PI / 8.0, 0.0, 0.95))
            }
            Geometry::Wkb => Region::Box(Rect::new(0.0, 1.0, 0.0, 1.0 - WKB_EPSILON)),
        }
    }

    /// Grid cells `(nx, ny)` for `n` cells per unit length, keeping cells near-square.
    pub fn subdivisions(self, n: usize) -> (usize, usize) {
        let d = self.domain();
        let nx = ((d.width() * n as f64).round() as usize).max(1);
        let ny = ((d.height() * n as f64).round() as usize).max(1);
        (nx, ny)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Geometry::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown geometry '{s}'")))
    }
}
