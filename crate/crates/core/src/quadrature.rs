//! Symmetric quadrature rules on the reference triangle `(0,0), (1,0), (0,1)`.
//!
//! Weights sum to the reference area 1/2.

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    degree: usize,
}

impl Quadrature {
    /// One-point centroid rule, exact for degree 1.
    pub fn centroid() -> Self {
        Quadrature {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            degree: 1,
        }
    }

    /// Three interior points, exact for degree 2.
    pub fn degree2() -> Self {
        let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
        Quadrature {
            points: vec![[a, a], [b, a], [a, b]],
            weights: vec![1.0 / 6.0; 3],
            degree: 2,
        }
    }

    /// Six-point rule exact for degree 4 (two symmetric orbits of three points).
    pub fn degree4() -> Self {
        let sqrt10 = 10f64.sqrt();
        let r = (38.0 - 44.0 * (2.0f64 / 5.0).sqrt()).sqrt();
        let a1 = (8.0 - sqrt10 + r) / 18.0;
        let a2 = (8.0 - sqrt10 - r) / 18.0;
        let s = (213125.0 - 53320.0 * sqrt10).sqrt();
        let w1 = (620.0 + s) / 3720.0 / 2.0;
        let w2 = (620.0 - s) / 3720.0 / 2.0;
        let mut q = Quadrature {
            points: Vec::with_capacity(6),
            weights: Vec::with_capacity(6),
            degree: 4,
        };
        q.push_orbit(a1, w1);
        q.push_orbit(a2, w2);
        q
    }

    /// Seven-point rule exact for degree 5.
    pub fn degree5() -> Self {
        let sqrt15 = 15f64.sqrt();
        let a1 = (6.0 - sqrt15) / 21.0;
        let a2 = (6.0 + sqrt15) / 21.0;
        let w1 = (155.0 - sqrt15) / 1200.0 / 2.0;
        let w2 = (155.0 + sqrt15) / 1200.0 / 2.0;
        let mut q = Quadrature {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![9.0 / 80.0],
            degree: 5,
        };
        q.push_orbit(a1, w1);
        q.push_orbit(a2, w2);
        q
    }

    /// Rule of at least the requested degree, for degrees up to 5.
    pub fn with_degree(degree: usize) -> Option<Self> {
        match degree {
            0 | 1 => Some(Self::centroid()),
            2 => Some(Self::degree2()),
            3 | 4 => Some(Self::degree4()),
            5 => Some(Self::degree5()),
            _ => None,
        }
    }

    fn push_orbit(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        for p in [[a, a], [b, a], [a, b]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Barycentric coordinates `(1 - s - t, s, t)` of each point.
    pub fn barycentric(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|&[s, t]| [1.0 - s - t, s, t])
            .collect()
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::degree4()
    }
}
