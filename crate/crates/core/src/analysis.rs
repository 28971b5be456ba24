//! Error norms, diagnostics and convergence studies.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::assembly::{element_quadrature, Execution};
use crate::error::{Error, RegionRole, Result};
use crate::geometry::Geometry;
use crate::mesh::{build_uniform_mesh, Mesh};
use crate::problems::{ExactSolution, Perturbation, PerturbationLaw, ProblemCase};
use crate::quadrature::Quadrature;
use crate::region::{classify_elements, Region};
use crate::solver::{solve, Discretization, ProblemData, StabilizationParams, DEFAULT_GAMMA};

/// Absolute errors of a P1 function against an exact solution, with the
/// matching norms of the exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1: f64,
    pub exact_l2: f64,
    pub exact_h1: f64,
}

impl ErrorNorms {
    pub fn rel_l2(&self) -> Result<f64> {
        relative(self.l2, self.exact_l2)
    }

    pub fn rel_h1(&self) -> Result<f64> {
        relative(self.h1, self.exact_h1)
    }
}

fn relative(err: f64, reference: f64) -> Result<f64> {
    if reference > 0.0 {
        Ok(err / reference)
    } else {
        Err(Error::ZeroReferenceNorm(RegionRole::Target))
    }
}

/// L² and full H¹ errors of `u_h` over `elements`, with the exact solution
/// and its gradient evaluated at the quadrature points.
pub fn error_norms(
    mesh: &Mesh,
    elements: &[usize],
    u_h: &[f64],
    exact: &dyn ExactSolution,
    quad: &Quadrature,
) -> Result<ErrorNorms> {
    if elements.is_empty() {
        return Err(Error::EmptyRegion(RegionRole::Target));
    }
    if u_h.len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_vertices(),
            got: u_h.len(),
        });
    }
    let bary = quad.barycentric();
    let (mut e0, mut e1, mut x0, mut x1) = (0.0, 0.0, 0.0, 0.0);
    for &t in elements {
        if t >= mesh.n_triangles() {
            return Err(Error::InvalidElement {
                index: t,
                count: mesh.n_triangles(),
            });
        }
        let tri = mesh.triangles()[t];
        let g = mesh.basis_gradients(t);
        let grad_h = [0, 1].map(|d| (0..3).map(|a| u_h[tri[a]] * g[a][d]).sum::<f64>());
        for ((p, w), lam) in element_quadrature(mesh, t, quad).into_iter().zip(&bary) {
            let uh: f64 = (0..3).map(|a| u_h[tri[a]] * lam[a]).sum();
            let u = exact.value(p);
            let gu = exact.gradient(p);
            let d0 = u - uh;
            let d1 = (gu[0] - grad_h[0]).powi(2) + (gu[1] - grad_h[1]).powi(2);
            e0 += w * d0 * d0;
            e1 += w * d1;
            x0 += w * u * u;
            x1 += w * (gu[0] * gu[0] + gu[1] * gu[1]);
        }
    }
    Ok(ErrorNorms {
        l2: e0.sqrt(),
        h1: (e0 + e1).sqrt(),
        exact_l2: x0.sqrt(),
        exact_h1: (x0 + x1).sqrt(),
    })
}

/// [`error_norms`] over the elements whose barycenter lies in `region`.
pub fn error_norms_in(
    mesh: &Mesh,
    region: &Region,
    u_h: &[f64],
    exact: &dyn ExactSolution,
    quad: &Quadrature,
) -> Result<ErrorNorms> {
    error_norms(mesh, &classify_elements(mesh, region), u_h, exact, quad)
}

/// `‖u‖_* = ‖u‖_{H²(Ω)} + k² ‖u‖_{L²(Ω)}` by the composite midpoint rule on a
/// `grid x grid` partition of the problem domain.
pub fn star_norm(case: &ProblemCase, grid: usize) -> f64 {
    let d = case.domain();
    let (dx, dy) = (d.width() / grid as f64, d.height() / grid as f64);
    let (mut l2, mut h2) = (0.0, 0.0);
    for j in 0..grid {
        let y = d.y0 + (j as f64 + 0.5) * dy;
        let (mut row_l2, mut row_h2) = (0.0, 0.0);
        for i in 0..grid {
            let p = [d.x0 + (i as f64 + 0.5) * dx, y];
            let u = case.u(p);
            let g = case.gradient(p);
            let hs = case.hessian(p);
            row_l2 += u * u;
            row_h2 += u * u
                + g[0] * g[0]
                + g[1] * g[1]
                + hs[0] * hs[0]
                + 2.0 * hs[1] * hs[1]
                + hs[2] * hs[2];
        }
        l2 += row_l2;
        h2 += row_h2;
    }
    let cell = dx * dy;
    (h2 * cell).sqrt() + case.k() * case.k() * (l2 * cell).sqrt()
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_rate(h: &[f64], err: &[f64]) -> Result<f64> {
    if h.len() != err.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            got: err.len(),
        });
    }
    if h.len() < 2 {
        return Err(Error::InvalidParameter("rate fit needs at least two points".into()));
    }
    if let Some(bad) = h.iter().chain(err).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs positive finite values, got {bad}"
        )));
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("rate fit needs distinct mesh sizes".into()));
    }
    Ok(sxy / sxx)
}

/// Columns of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    RelL2B,
    RelH1B,
    Jump,
    JumpOverH,
    ZNorm,
    L2OmegaErr,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::RelL2B,
        Quantity::RelH1B,
        Quantity::Jump,
        Quantity::JumpOverH,
        Quantity::ZNorm,
        Quantity::L2OmegaErr,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Quantity::RelL2B => "rel_l2_B",
            Quantity::RelH1B => "rel_h1_B",
            Quantity::Jump => "jump",
            Quantity::JumpOverH => "jump_over_h",
            Quantity::ZNorm => "z_norm",
            Quantity::L2OmegaErr => "l2_omega_err",
        }
    }
}

/// Diagnostics of one refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Cells per unit length.
    pub n: usize,
    pub h: f64,
    pub rel_l2_b: f64,
    pub rel_h1_b: f64,
    /// `J(u_h, u_h)`, without the factor `γ`.
    pub jump: f64,
    pub jump_over_h: f64,
    /// `‖z_h‖_W = |z_h|_{H¹}`.
    pub z_norm: f64,
    /// `‖u_h - u‖_{L²(ω)}`.
    pub l2_omega_err: f64,
    pub abs_l2_b: f64,
    pub abs_h1_b: f64,
    pub exact_l2_b: f64,
    /// `‖u_h‖_{L²(B)}`.
    pub uh_l2_b: f64,
    pub star_norm: Option<f64>,
    pub n_unknowns: usize,
}

impl ErrorReport {
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::RelL2B => self.rel_l2_b,
            Quantity::RelH1B => self.rel_h1_b,
            Quantity::Jump => self.jump,
            Quantity::JumpOverH => self.jump_over_h,
            Quantity::ZNorm => self.z_norm,
            Quantity::L2OmegaErr => self.l2_omega_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<ErrorReport>,
}

impl ConvergenceReport {
    /// Fitted rate of `q` over all levels; `None` with fewer than three levels
    /// or when some value is not positive.
    pub fn rate(&self, q: Quantity) -> Option<f64> {
        if self.levels.len() < 3 {
            return None;
        }
        let h: Vec<f64> = self.levels.iter().map(|l| l.h).collect();
        let e: Vec<f64> = self.levels.iter().map(|l| l.get(q)).collect();
        fit_rate(&h, &e).ok()
    }

    pub fn finest(&self) -> Option<&ErrorReport> {
        self.levels.last()
    }

    /// CSV table, one row per level, followed by a `# rates:` footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h");
        for q in Quantity::ALL {
            out.push(',');
            out.push_str(q.column());
        }
        out.push('\n');
        for l in &self.levels {
            let _ = write!(out, "{:.16e}", l.h);
            for q in Quantity::ALL {
                let _ = write!(out, ",{:.16e}", l.get(q));
            }
            out.push('\n');
        }
        out.push_str("# rates:");
        for (i, q) in Quantity::ALL.into_iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            match self.rate(q) {
                Some(r) => {
                    let _ = write!(out, "{sep}{}={r:.16e}", q.column());
                }
                None => {
                    let _ = write!(out, "{sep}{}=nan", q.column());
                }
            }
        }
        out.push('\n');
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Problem family of a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemKind {
    Gaussian,
    Hadamard { n: u32 },
    /// Leading WKB profile with data `q ≡ 0`.
    Wkb,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Gaussian => "gaussian",
            ProblemKind::Hadamard { .. } => "hadamard",
            ProblemKind::Wkb => "wkb",
        }
    }

    pub fn case(self, k: f64) -> Result<ProblemCase> {
        match self {
            ProblemKind::Gaussian => ProblemCase::gaussian_bump(k),
            ProblemKind::Hadamard { n } => ProblemCase::hadamard(k, n),
            ProblemKind::Wkb => ProblemCase::wkb_leading(k, crate::geometry::WKB_EPSILON),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: ProblemKind,
    pub geometry: Geometry,
    pub k: f64,
    pub gamma: f64,
    /// Cells per unit length, one entry per level.
    pub levels: Vec<usize>,
    pub perturbation: PerturbationLaw,
    pub seed: u64,
    pub quadrature_degree: usize,
    /// Grid size for `‖u‖_*`; skipped when `None`.
    pub star_norm_grid: Option<usize>,
    /// Solve levels concurrently.
    pub parallel_levels: bool,
}

impl StudyConfig {
    pub fn new(problem: ProblemKind, geometry: Geometry, k: f64) -> Self {
        StudyConfig {
            problem,
            geometry,
            k,
            gamma: DEFAULT_GAMMA,
            levels: vec![16, 32, 64, 128],
            perturbation: PerturbationLaw::None,
            seed: 0,
            quadrature_degree: 4,
            star_norm_grid: None,
            parallel_levels: false,
        }
    }
}

/// Solves one level and collects its diagnostics.
pub fn run_level(config: &StudyConfig, case: &ProblemCase, level: usize, n: usize) -> Result<ErrorReport> {
    let geometry = config.geometry;
    let quad = Quadrature::with_degree(config.quadrature_degree).ok_or_else(|| {
        Error::InvalidParameter(format!("no quadrature rule of degree {}", config.quadrature_degree))
    })?;
    let (nx, ny) = geometry.subdivisions(n);
    let mesh = build_uniform_mesh(geometry.domain(), nx, ny)?;
    let h = mesh.h();
    let disc = Discretization::new(&mesh, &geometry.omega(), Execution::Parallel)?;
    let params = StabilizationParams::new(config.gamma, config.k, h)?;

    let nv = mesh.n_vertices();
    let base = Perturbation::new(config.perturbation, config.seed);
    let q_noise = base.with_stream(2 * level as u64).noise(nv, h);
    let f_noise = base.with_stream(2 * level as u64 + 1).noise(nv, h);
    let noisy = config.perturbation != PerturbationLaw::None;

    let zero = |_: [f64; 2]| 0.0;
    let q = |p: [f64; 2]| case.q(p);
    let f = |p: [f64; 2]| case.f(p);
    let data = ProblemData {
        q: if config.problem == ProblemKind::Wkb { &zero } else { &q },
        f: &f,
        q_noise: noisy.then_some(q_noise.as_slice()),
        f_noise: noisy.then_some(f_noise.as_slice()),
        quadrature: &quad,
    };
    let system = disc.system(&mesh, &params, &data)?;
    let sol = solve(&system)?;

    let exact = case.solution();
    let target = classify_elements(&mesh, &geometry.target());
    let err_b = error_norms(&mesh, &target, &sol.u, exact, &quad)?;
    let err_omega = error_norms(&mesh, &disc.omega_elements, &sol.u, exact, &quad)?;
    let zero_sol = crate::problems::Affine { a: 0.0, b: 0.0, c: 0.0 };
    let uh_b = error_norms(&mesh, &target, &sol.u, &zero_sol, &quad)?;
    let jump = disc.jump.quadratic_form(&sol.u)?;

    Ok(ErrorReport {
        n,
        h,
        rel_l2_b: err_b.rel_l2()?,
        rel_h1_b: err_b.rel_h1()?,
        jump,
        jump_over_h: jump / h,
        z_norm: disc.dual_norm_sq(&sol.z)?.max(0.0).sqrt(),
        l2_omega_err: err_omega.l2,
        abs_l2_b: err_b.l2,
        abs_h1_b: err_b.h1,
        exact_l2_b: err_b.exact_l2,
        uh_l2_b: uh_b.l2,
        star_norm: config.star_norm_grid.map(|g| star_norm(case, g)),
        n_unknowns: system.dim(),
    })
}

/// Runs every level of `config` and returns the reports ordered by level.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    if config.levels.is_empty() {
        return Err(Error::InvalidParameter("study needs at least one level".into()));
    }
    if config.levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "levels must be strictly increasing cell counts".into(),
        ));
    }
    let case = config.problem.case(config.k)?;
    if case.domain() != config.geometry.domain() {
        return Err(Error::InvalidParameter(format!(
            "problem '{}' is not posed on the domain of geometry '{}'",
            config.problem.name(),
            config.geometry
        )));
    }
    let run = |(level, &n): (usize, &usize)| {
        run_level(config, &case, level, n).map_err(|e| Error::Level {
            level,
            n,
            source: Box::new(e),
        })
    };
    let levels = if config.parallel_levels {
        config
            .levels
            .par_iter()
            .enumerate()
            .map(run)
            .collect::<Result<Vec<_>>>()?
    } else {
        config
            .levels
            .iter()
            .enumerate()
            .map(run)
            .collect::<Result<Vec<_>>>()?
    };
    Ok(ConvergenceReport { levels })
}
