use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::BodyError;
use crate::spec::BodySpec;

/// Number of boundary samples used for the discrete curvature check.
pub const CURVATURE_SAMPLES: usize = 720;

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const GAUGE_TOLERANCE: f64 = 1e-12;

/// A validated convex body.
#[derive(Debug, Clone)]
pub struct Body {
    spec: BodySpec,
    shape: Shape,
}

/// Validated, precomputed per-kind data.
#[derive(Debug, Clone)]
pub enum Shape {
    Ellipsoid(Ellipsoid),
    Superellipsoid(Superellipsoid),
    PerturbedEllipse(PerturbedEllipse),
    Polygon(Polygon),
}

#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: DVector<f64>,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    inverse_sqrt: DMatrix<f64>,
    determinant: f64,
}

impl Ellipsoid {
    fn new(center: &[f64], matrix: &[f64]) -> Result<Self, BodyError> {
        let n = center.len();
        if n < 2 {
            return Err(BodyError::invalid("dimension must be at least 2"));
        }
        if center.iter().chain(matrix).any(|v| !v.is_finite()) {
            return Err(BodyError::invalid("non-finite ellipsoid parameter"));
        }
        let m = DMatrix::from_row_slice(n, n, matrix);
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let asym = (&m - m.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE * scale {
            return Err(BodyError::invalid(format!(
                "shape matrix is not symmetric (max |M - Mᵀ| = {asym:e})"
            )));
        }
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        for (rank, &i) in order.iter().enumerate() {
            let lambda = eig.eigenvalues[i];
            if !(lambda > 0.0) {
                return Err(BodyError::invalid(format!(
                    "shape matrix is not positive definite: eigenvalue {} of {n} is {lambda:e}",
                    rank + 1
                )));
            }
        }
        let q = &eig.eigenvectors;
        let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
        let inv_sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
        let inverse = q * inv_diag * q.transpose();
        let inverse = (&inverse + inverse.transpose()) * 0.5;
        let inverse_sqrt = q * inv_sqrt_diag * q.transpose();
        let determinant = eig.eigenvalues.iter().product();
        Ok(Ellipsoid {
            center: DVector::from_column_slice(center),
            matrix: m,
            inverse,
            inverse_sqrt,
            determinant,
        })
    }

    pub fn center(&self) -> &[f64] {
        self.center.as_slice()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// M⁻¹; its quadratic form ξᵀM⁻¹ξ is the squared centered support function.
    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// M^{-1/2}, mapping the unit sphere onto the centered boundary.
    pub fn inverse_sqrt(&self) -> &DMatrix<f64> {
        &self.inverse_sqrt
    }

    pub fn determinant(&self) -> f64 {
        self.determinant
    }

    /// (x-c)ᵀ M (x-c).
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.center.len();
        let mut acc = 0.0;
        for i in 0..n {
            let di = x[i] - self.center[i];
            let mut row = 0.0;
            for j in 0..n {
                row += self.matrix[(i, j)] * (x[j] - self.center[j]);
            }
            acc += di * row;
        }
        acc
    }

    /// ξᵀ M⁻¹ ξ, written so that ξ and -ξ give bit-identical results.
    pub fn inverse_form(&self, xi: &[f64]) -> f64 {
        let n = xi.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += xi[i] * self.inverse[(i, j)] * xi[j];
            }
        }
        acc
    }

    fn is_centered(&self) -> bool {
        self.center.iter().all(|c| *c == 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Superellipsoid {
    center: Vec<f64>,
    semi_axes: Vec<f64>,
    exponent: u32,
}

impl Superellipsoid {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// (Σ |y_j / a_j|^p)^{1/p} for y = x - c, scaled against overflow.
    pub fn norm_about_center(&self, x: &[f64]) -> f64 {
        let p = self.exponent as f64;
        let scaled: Vec<f64> = x
            .iter()
            .zip(&self.center)
            .zip(&self.semi_axes)
            .map(|((xi, ci), ai)| ((xi - ci) / ai).abs())
            .collect();
        let big = scaled.iter().cloned().fold(0.0, f64::max);
        if big == 0.0 {
            return 0.0;
        }
        big * scaled.iter().map(|s| (s / big).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[derive(Debug, Clone)]
pub struct PerturbedEllipse {
    center: [f64; 2],
    semi_axes: [f64; 2],
    epsilon: f64,
    k: u32,
}

impl PerturbedEllipse {
    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn semi_axes(&self) -> [f64; 2] {
        self.semi_axes
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Radial function R(θ) about the center.
    pub fn radius(&self, theta: f64) -> f64 {
        self.radius_derivatives(theta).0
    }

    /// (R, R', R'') at θ.
    pub fn radius_derivatives(&self, theta: f64) -> (f64, f64, f64) {
        let [a, b] = self.semi_axes;
        let (s, c) = theta.sin_cos();
        let diff = 1.0 / (b * b) - 1.0 / (a * a);
        let f = c * c / (a * a) + s * s / (b * b);
        let f1 = (2.0 * theta).sin() * diff;
        let f2 = 2.0 * (2.0 * theta).cos() * diff;
        let r = f.powf(-0.5);
        let r1 = -0.5 * f.powf(-1.5) * f1;
        let r2 = 0.75 * f.powf(-2.5) * f1 * f1 - 0.5 * f.powf(-1.5) * f2;

        let k = self.k as f64;
        let (sk, ck) = (k * theta).sin_cos();
        let p = 1.0 + self.epsilon * ck;
        let p1 = -self.epsilon * k * sk;
        let p2 = -self.epsilon * k * k * ck;
        (r * p, r1 * p + r * p1, r2 * p + 2.0 * r1 * p1 + r * p2)
    }

    /// Signed curvature numerator R² + 2R'² - R R'' of the polar curve.
    pub fn curvature_numerator(&self, theta: f64) -> f64 {
        let (r, r1, r2) = self.radius_derivatives(theta);
        r * r + 2.0 * r1 * r1 - r * r2
    }

    /// Minimum of the curvature numerator over the construction-time samples.
    pub fn min_curvature_numerator(&self) -> (f64, f64) {
        (0..CURVATURE_SAMPLES)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / CURVATURE_SAMPLES as f64;
                (self.curvature_numerator(theta), theta)
            })
            .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc })
    }

    pub fn boundary_point(&self, theta: f64) -> [f64; 2] {
        let r = self.radius(theta);
        [
            self.center[0] + r * theta.cos(),
            self.center[1] + r * theta.sin(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
    /// Outward unit normal and offset of each edge: n·x ≤ d on the body.
    edges: Vec<([f64; 2], f64)>,
}

impl Polygon {
    fn new(vertices: &[[f64; 2]]) -> Result<Self, BodyError> {
        let m = vertices.len();
        if m < 3 {
            return Err(BodyError::invalid(format!("polygon needs at least 3 vertices, got {m}")));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(BodyError::invalid("non-finite polygon vertex"));
        }
        let mut turning = 0.0;
        for i in 0..m {
            let p = vertices[i];
            let q = vertices[(i + 1) % m];
            let r = vertices[(i + 2) % m];
            let e1 = [q[0] - p[0], q[1] - p[1]];
            let e2 = [r[0] - q[0], r[1] - q[1]];
            let cross = e1[0] * e2[1] - e1[1] * e2[0];
            if !(cross > 0.0) {
                return Err(BodyError::invalid(format!(
                    "polygon is not strictly convex and counterclockwise at vertex {}",
                    (i + 1) % m
                )));
            }
            turning += cross.atan2(e1[0] * e2[0] + e1[1] * e2[1]);
        }
        if (turning - 2.0 * PI).abs() > 1e-9 {
            return Err(BodyError::invalid("polygon winds more than once"));
        }
        let edges = (0..m)
            .map(|i| {
                let p = vertices[i];
                let q = vertices[(i + 1) % m];
                let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
                let len = dx.hypot(dy);
                let normal = [dy / len, -dx / len];
                (normal, normal[0] * p[0] + normal[1] * p[1])
            })
            .collect();
        Ok(Polygon {
            vertices: vertices.to_vec(),
            edges,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn edges(&self) -> &[([f64; 2], f64)] {
        &self.edges
    }

    pub fn centroid(&self) -> [f64; 2] {
        let m = self.vertices.len() as f64;
        let sx: f64 = self.vertices.iter().map(|v| v[0]).sum();
        let sy: f64 = self.vertices.iter().map(|v| v[1]).sum();
        [sx / m, sy / m]
    }
}

impl Body {
    /// Validates `spec` and precomputes evaluation data.
    pub fn new(spec: BodySpec) -> Result<Self, BodyError> {
        let shape = match &spec {
            BodySpec::Ellipsoid { center, matrix } => {
                let n = center.len();
                if matrix.len() != n * n {
                    return Err(BodyError::invalid(format!(
                        "matrix has {} entries, expected {}",
                        matrix.len(),
                        n * n
                    )));
                }
                Shape::Ellipsoid(Ellipsoid::new(center, matrix)?)
            }
            BodySpec::Superellipsoid {
                center,
                semi_axes,
                exponent,
            } => {
                let n = semi_axes.len();
                if n < 2 || center.len() != n {
                    return Err(BodyError::invalid(
                        "superellipsoid needs matching center and semi_axes of length ≥ 2",
                    ));
                }
                if semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                    return Err(BodyError::invalid("semi-axes must be positive and finite"));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(BodyError::invalid("non-finite center"));
                }
                if *exponent < 4 || exponent % 2 != 0 {
                    return Err(BodyError::invalid(format!(
                        "superellipsoid exponent must be even and at least 4, got {exponent}"
                    )));
                }
                Shape::Superellipsoid(Superellipsoid {
                    center: center.clone(),
                    semi_axes: semi_axes.clone(),
                    exponent: *exponent,
                })
            }
            BodySpec::PerturbedEllipse {
                center,
                semi_axes,
                epsilon,
                k,
            } => {
                if semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite())
                    || center.iter().any(|c| !c.is_finite())
                    || !epsilon.is_finite()
                {
                    return Err(BodyError::invalid(
                        "perturbed ellipse needs positive semi-axes and finite parameters",
                    ));
                }
                if *k < 3 {
                    return Err(BodyError::invalid(format!("perturbation order k must be ≥ 3, got {k}")));
                }
                let shape = PerturbedEllipse {
                    center: *center,
                    semi_axes: *semi_axes,
                    epsilon: *epsilon,
                    k: *k,
                };
                let (min_curv, at) = shape.min_curvature_numerator();
                if !(min_curv > 0.0) {
                    return Err(BodyError::invalid(format!(
                        "perturbation breaks convexity: boundary curvature {min_curv:.4e} < 0 at θ = {at:.4}"
                    )));
                }
                if !(0.0..=0.2).contains(epsilon) {
                    return Err(BodyError::invalid(format!(
                        "epsilon must lie in [0, 0.2], got {epsilon}"
                    )));
                }
                Shape::PerturbedEllipse(shape)
            }
            BodySpec::Polygon { vertices } => Shape::Polygon(Polygon::new(vertices)?),
        };
        Ok(Body { spec, shape })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, BodyError> {
        Body::new(BodySpec::from_path(path)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self, BodyError> {
        Body::new(BodySpec::from_json_str(text)?)
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn kind_name(&self) -> &'static str {
        self.spec.kind_name()
    }

    /// False for polygons, which violate the C^∞ boundary hypothesis.
    pub fn is_smooth(&self) -> bool {
        !matches!(self.shape, Shape::Polygon(_))
    }

    pub fn translated(&self, shift: &[f64]) -> Body {
        Body::new(self.spec.translated(shift)).expect("translation preserves validity")
    }

    /// A point guaranteed to lie in the interior.
    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ellipsoid(e) => e.center().to_vec(),
            Shape::Superellipsoid(s) => s.center.clone(),
            Shape::PerturbedEllipse(p) => p.center.to_vec(),
            Shape::Polygon(p) => p.centroid().to_vec(),
        }
    }

    /// Signed boundary excess: negative inside, zero on the boundary,
    /// positive outside. Continuous and monotone along rays from `center()`.
    pub fn excess(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match &self.shape {
            Shape::Ellipsoid(e) => e.quadratic_form(x).sqrt() - 1.0,
            Shape::Superellipsoid(s) => s.norm_about_center(x) - 1.0,
            Shape::PerturbedEllipse(p) => {
                let dx = x[0] - p.center[0];
                let dy = x[1] - p.center[1];
                dx.hypot(dy) - p.radius(dy.atan2(dx))
            }
            Shape::Polygon(p) => p
                .edges
                .iter()
                .map(|(nrm, d)| nrm[0] * x[0] + nrm[1] * x[1] - d)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.excess(x) <= 0.0
    }

    pub fn origin_interior(&self) -> bool {
        self.excess(&vec![0.0; self.dim()]) < 0.0
    }

    /// Minkowski gauge ‖x‖_K = min{a ≥ 0 : x ∈ aK}.
    pub fn gauge(&self, x: &[f64]) -> Result<f64, BodyError> {
        if x.len() != self.dim() {
            return Err(BodyError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.origin_interior() {
            return Err(BodyError::OriginNotInterior);
        }
        if x.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        let value = match &self.shape {
            Shape::Ellipsoid(e) if e.is_centered() => e.quadratic_form(x).sqrt(),
            Shape::Superellipsoid(s) if s.center.iter().all(|c| *c == 0.0) => {
                s.norm_about_center(x)
            }
            Shape::PerturbedEllipse(p) if p.center == [0.0, 0.0] => {
                x[0].hypot(x[1]) / p.radius(x[1].atan2(x[0]))
            }
            Shape::Polygon(p) => p
                .edges
                .iter()
                .map(|(nrm, d)| (nrm[0] * x[0] + nrm[1] * x[1]) / d)
                .fold(0.0, f64::max),
            _ => self.gauge_by_bisection(x),
        };
        Ok(value)
    }

    /// 1 / sup{s : s·x ∈ K}, bisected to relative tolerance 1e-12.
    fn gauge_by_bisection(&self, x: &[f64]) -> f64 {
        let point = |s: f64| -> Vec<f64> { x.iter().map(|v| v * s).collect() };
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.contains(&point(hi)) {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > GAUGE_TOLERANCE * hi {
            let mid = 0.5 * (lo + hi);
            if self.contains(&point(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        1.0 / (0.5 * (lo + hi))
    }

    /// Boundary point at polar-type parameter θ (planar bodies only).
    pub fn boundary_point_2d(&self, theta: f64) -> Option<[f64; 2]> {
        if self.dim() != 2 {
            return None;
        }
        let u = [theta.cos(), theta.sin()];
        Some(match &self.shape {
            Shape::Ellipsoid(e) => {
                let l = e.inverse_sqrt();
                [
                    e.center[0] + l[(0, 0)] * u[0] + l[(0, 1)] * u[1],
                    e.center[1] + l[(1, 0)] * u[0] + l[(1, 1)] * u[1],
                ]
            }
            Shape::Superellipsoid(s) => {
                let q = 2.0 / s.exponent as f64;
                let lift = |c: f64| c.signum() * c.abs().powf(q);
                [
                    s.center[0] + s.semi_axes[0] * lift(u[0]),
                    s.center[1] + s.semi_axes[1] * lift(u[1]),
                ]
            }
            Shape::PerturbedEllipse(p) => p.boundary_point(theta),
            Shape::Polygon(p) => {
                let g = p.centroid();
                let reach = p
                    .edges
                    .iter()
                    .filter_map(|(nrm, d)| {
                        let along = nrm[0] * u[0] + nrm[1] * u[1];
                        (along > 0.0).then(|| (d - nrm[0] * g[0] - nrm[1] * g[1]) / along)
                    })
                    .fold(f64::INFINITY, f64::min);
                [g[0] + reach * u[0], g[1] + reach * u[1]]
            }
        })
    }
}
