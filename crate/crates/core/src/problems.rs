//! Manufactured problem cases with analytic derivatives, and the nodal data
//! perturbation generator.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::{Point, Rect};

/// A smooth function with analytic first and second derivatives.
pub trait ExactSolution: Send + Sync + fmt::Debug {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
    /// `[u_xx, u_xy, u_yy]`.
    fn hessian(&self, p: Point) -> [f64; 3];
}

/// `u = exp(-(x - x_c)²/(2 σ_x) - (y - y_c)²/(2 σ_y))`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianBump {
    pub center: Point,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl GaussianBump {
    fn exponent_derivatives(&self, p: Point) -> (f64, f64, f64) {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let phi = -dx * dx / (2.0 * self.sigma_x) - dy * dy / (2.0 * self.sigma_y);
        (phi, -dx / self.sigma_x, -dy / self.sigma_y)
    }
}

impl ExactSolution for GaussianBump {
    fn value(&self, p: Point) -> f64 {
        self.exponent_derivatives(p).0.exp()
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let (phi, px, py) = self.exponent_derivatives(p);
        let u = phi.exp();
        [u * px, u * py]
    }

    fn hessian(&self, p: Point) -> [f64; 3] {
        let (phi, px, py) = self.exponent_derivatives(p);
        let u = phi.exp();
        [
            u * (px * px - 1.0 / self.sigma_x),
            u * px * py,
            u * (py * py - 1.0 / self.sigma_y),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum HadamardBranch {
    /// n > k: `sin(nx) sinh(s y) / s`, `s = √(n² - k²)`.
    Hyperbolic(f64),
    /// n = k: `sin(kx) y`.
    Resonant,
    /// n < k: `sin(nx) sin(s y) / s`, `s = √(k² - n²)`.
    Oscillatory(f64),
}

/// Solution of the Cauchy problem `Δu + k²u = 0`, `u(x,0) = 0`, `u_y(x,0) = sin(nx)`.
#[derive(Debug, Clone, Copy)]
pub struct Hadamard {
    n: f64,
    branch: HadamardBranch,
}

impl Hadamard {
    pub fn new(k: f64, n: f64) -> Self {
        let d = n * n - k * k;
        let branch = if d.abs() < 1e-12 {
            HadamardBranch::Resonant
        } else if d > 0.0 {
            HadamardBranch::Hyperbolic(d.sqrt())
        } else {
            HadamardBranch::Oscillatory((-d).sqrt())
        };
        Hadamard { n, branch }
    }
}

impl ExactSolution for Hadamard {
    fn value(&self, p: Point) -> f64 {
        let sx = (self.n * p[0]).sin();
        match self.branch {
            HadamardBranch::Hyperbolic(s) => sx * (s * p[1]).sinh() / s,
            HadamardBranch::Resonant => sx * p[1],
            HadamardBranch::Oscillatory(s) => sx * (s * p[1]).sin() / s,
        }
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let n = self.n;
        let (sx, cx) = (n * p[0]).sin_cos();
        let (fy, dfy) = match self.branch {
            HadamardBranch::Hyperbolic(s) => ((s * p[1]).sinh() / s, (s * p[1]).cosh()),
            HadamardBranch::Resonant => (p[1], 1.0),
            HadamardBranch::Oscillatory(s) => ((s * p[1]).sin() / s, (s * p[1]).cos()),
        };
        [n * cx * fy, sx * dfy]
    }

    fn hessian(&self, p: Point) -> [f64; 3] {
        let n = self.n;
        let (sx, cx) = (n * p[0]).sin_cos();
        let (fy, dfy, ddfy) = match self.branch {
            HadamardBranch::Hyperbolic(s) => (
                (s * p[1]).sinh() / s,
                (s * p[1]).cosh(),
                s * (s * p[1]).sinh(),
            ),
            HadamardBranch::Resonant => (p[1], 1.0, 0.0),
            HadamardBranch::Oscillatory(s) => (
                (s * p[1]).sin() / s,
                (s * p[1]).cos(),
                -s * (s * p[1]).sin(),
            ),
        };
        [-n * n * sx * fy, n * cx * dfy, sx * ddfy]
    }
}

/// Leading-order WKB profile `cos(kx) a₀(y)` with `a₀` a smooth bump
/// supported in `(ε, 1 - ε)`.
#[derive(Debug, Clone, Copy)]
pub struct WkbLeading {
    pub k: f64,
    pub epsilon: f64,
}

impl WkbLeading {
    /// `a₀` and its first two derivatives in `y`.
    pub fn profile(&self, y: f64) -> [f64; 3] {
        let c = 2.0 / (1.0 - 2.0 * self.epsilon);
        let t = (2.0 * y - 1.0) / (1.0 - 2.0 * self.epsilon);
        if t.abs() >= 1.0 {
            return [0.0; 3];
        }
        let s = 1.0 - t * t;
        let g = (-1.0 / s).exp();
        let dpsi = -2.0 * t / (s * s);
        let ddpsi = -2.0 / (s * s) - 8.0 * t * t / (s * s * s);
        [g, g * dpsi * c, g * (dpsi * dpsi + ddpsi) * c * c]
    }
}

impl ExactSolution for WkbLeading {
    fn value(&self, p: Point) -> f64 {
        (self.k * p[0]).cos() * self.profile(p[1])[0]
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let (s, c) = (self.k * p[0]).sin_cos();
        let a = self.profile(p[1]);
        [-self.k * s * a[0], c * a[1]]
    }

    fn hessian(&self, p: Point) -> [f64; 3] {
        let k = self.k;
        let (s, c) = (k * p[0]).sin_cos();
        let a = self.profile(p[1]);
        [-k * k * c * a[0], -k * s * a[1], c * a[2]]
    }
}

/// `u = a x + b y + c`.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExactSolution for Affine {
    fn value(&self, p: Point) -> f64 {
        self.a * p[0] + self.b * p[1] + self.c
    }

    fn gradient(&self, _p: Point) -> [f64; 2] {
        [self.a, self.b]
    }

    fn hessian(&self, _p: Point) -> [f64; 3] {
        [0.0; 3]
    }
}

/// A Helmholtz problem `Δu + k²u = -f` with known solution; the data on
/// omega is the trace `q = u`.
#[derive(Debug, Clone)]
pub struct ProblemCase {
    name: String,
    domain: Rect,
    k: f64,
    frequency: Option<u32>,
    solution: Arc<dyn ExactSolution>,
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "wavenumber must be finite and nonnegative, got {k}"
        )));
    }
    Ok(())
}

impl ProblemCase {
    pub fn new(
        name: impl Into<String>,
        domain: Rect,
        k: f64,
        solution: Arc<dyn ExactSolution>,
    ) -> Result<Self> {
        check_wavenumber(k)?;
        Ok(ProblemCase {
            name: name.into(),
            domain,
            k,
            frequency: None,
            solution,
        })
    }

    /// Gaussian bump centred at `(0.5, 1)` on the unit square, `σ_x = 0.01`, `σ_y = 0.1`.
    pub fn gaussian_bump(k: f64) -> Result<Self> {
        Self::new(
            "gaussian",
            Rect::UNIT,
            k,
            Arc::new(GaussianBump {
                center: [0.5, 1.0],
                sigma_x: 0.01,
                sigma_y: 0.1,
            }),
        )
    }

    /// Hadamard's example on `(0, π) x (0, 1)` with source `f = 0`.
    pub fn hadamard(k: f64, n: u32) -> Result<Self> {
        check_wavenumber(k)?;
        if n == 0 {
            return Err(Error::InvalidParameter("Hadamard frequency n must be >= 1".into()));
        }
        let mut case = Self::new(
            "hadamard",
            Rect::new(0.0, PI, 0.0, 1.0),
            k,
            Arc::new(Hadamard::new(k, f64::from(n))),
        )?;
        case.frequency = Some(n);
        Ok(case)
    }

    /// Real part of the leading WKB term on the unit square; vanishes for `y ≤ ε`.
    pub fn wkb_leading(k: f64, epsilon: f64) -> Result<Self> {
        check_wavenumber(k)?;
        if k <= 0.0 {
            return Err(Error::InvalidParameter("WKB case needs k > 0".into()));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "WKB epsilon must lie in (0, 0.5), got {epsilon}"
            )));
        }
        Self::new("wkb", Rect::UNIT, k, Arc::new(WkbLeading { k, epsilon }))
    }

    pub fn affine(a: f64, b: f64, c: f64, k: f64, domain: Rect) -> Result<Self> {
        Self::new("affine", domain, k, Arc::new(Affine { a, b, c }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Hadamard frequency, when applicable.
    pub fn frequency(&self) -> Option<u32> {
        self.frequency
    }

    pub fn solution(&self) -> &dyn ExactSolution {
        self.solution.as_ref()
    }

    pub fn u(&self, p: Point) -> f64 {
        self.solution.value(p)
    }

    pub fn gradient(&self, p: Point) -> [f64; 2] {
        self.solution.gradient(p)
    }

    pub fn hessian(&self, p: Point) -> [f64; 3] {
        self.solution.hessian(p)
    }

    pub fn laplacian(&self, p: Point) -> f64 {
        let h = self.hessian(p);
        h[0] + h[2]
    }

    /// Source `f = -Δu - k²u`.
    pub fn f(&self, p: Point) -> f64 {
        -self.laplacian(p) - self.k * self.k * self.u(p)
    }

    /// Data `q = u` (only sampled on omega).
    pub fn q(&self, p: Point) -> f64 {
        self.u(p)
    }
}

/// Amplitude law of the nodal noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbationLaw {
    #[default]
    None,
    /// Uniform on `[-h, h]`.
    OrderH,
    /// Uniform on `[-h², h²]`.
    OrderH2,
}

impl PerturbationLaw {
    pub fn amplitude(self, h: f64) -> f64 {
        match self {
            PerturbationLaw::None => 0.0,
            PerturbationLaw::OrderH => h,
            PerturbationLaw::OrderH2 => h * h,
        }
    }
}

/// Seeded nodal noise. Values are drawn from ChaCha8 keyed by `seed`; distinct
/// `stream`s give independent sequences for the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Perturbation {
    pub law: PerturbationLaw,
    pub seed: u64,
    pub stream: u64,
}

impl Perturbation {
    pub fn new(law: PerturbationLaw, seed: u64) -> Self {
        Perturbation { law, seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Perturbation { stream, ..self }
    }

    /// `len` iid samples of the noise for mesh size `h`.
    pub fn noise(&self, len: usize, h: f64) -> Vec<f64> {
        let amp = self.law.amplitude(h);
        if amp == 0.0 {
            return vec![0.0; len];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        (0..len).map(|_| rng.random_range(-amp..=amp)).collect()
    }
}

/// Adds the configured noise to each nodal value.
pub fn perturb(values: &[f64], perturbation: &Perturbation, h: f64) -> Vec<f64> {
    values
        .iter()
        .zip(perturbation.noise(values.len(), h))
        .map(|(v, d)| v + d)
        .collect()
}
