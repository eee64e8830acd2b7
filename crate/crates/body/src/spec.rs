use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::BodyError;

/// Version of the body-file JSON schema written and accepted by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Parametric description of a convex body.
///
/// Matrices are stored row-major. Ellipsoids are `{x : (x-c)ᵀ M (x-c) ≤ 1}`;
/// superellipsoids are `{x : Σ |(x_j - c_j)/a_j|^p ≤ 1}` with even `p ≥ 4`;
/// perturbed ellipses scale the radial function of an axis-aligned ellipse by
/// `1 + ε cos(kθ)`; polygons list their vertices counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Ellipsoid {
        center: Vec<f64>,
        matrix: Vec<f64>,
    },
    Superellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
        exponent: u32,
    },
    PerturbedEllipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        epsilon: f64,
        k: u32,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

impl BodySpec {
    pub fn unit_ball(dim: usize) -> Self {
        Self::ellipsoid_axes(&vec![1.0; dim])
    }

    /// Axis-aligned centered ellipsoid with the given semi-axes.
    pub fn ellipsoid_axes(semi_axes: &[f64]) -> Self {
        let n = semi_axes.len();
        let mut matrix = vec![0.0; n * n];
        for (j, a) in semi_axes.iter().enumerate() {
            matrix[j * n + j] = 1.0 / (a * a);
        }
        BodySpec::Ellipsoid {
            center: vec![0.0; n],
            matrix,
        }
    }

    pub fn superellipsoid(semi_axes: &[f64], exponent: u32) -> Self {
        BodySpec::Superellipsoid {
            center: vec![0.0; semi_axes.len()],
            semi_axes: semi_axes.to_vec(),
            exponent,
        }
    }

    pub fn perturbed_ellipse(a: f64, b: f64, epsilon: f64, k: u32) -> Self {
        BodySpec::PerturbedEllipse {
            center: [0.0, 0.0],
            semi_axes: [a, b],
            epsilon,
            k,
        }
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Self {
        BodySpec::Polygon {
            vertices: vertices.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Ellipsoid { center, .. } => center.len(),
            BodySpec::Superellipsoid { semi_axes, .. } => semi_axes.len(),
            BodySpec::PerturbedEllipse { .. } | BodySpec::Polygon { .. } => 2,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BodySpec::Ellipsoid { .. } => "ellipsoid",
            BodySpec::Superellipsoid { .. } => "superellipsoid",
            BodySpec::PerturbedEllipse { .. } => "perturbed_ellipse",
            BodySpec::Polygon { .. } => "polygon",
        }
    }

    /// The same body moved by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Self {
        let add = |c: &[f64]| -> Vec<f64> { c.iter().zip(shift).map(|(a, b)| a + b).collect() };
        match self {
            BodySpec::Ellipsoid { center, matrix } => BodySpec::Ellipsoid {
                center: add(center),
                matrix: matrix.clone(),
            },
            BodySpec::Superellipsoid {
                center,
                semi_axes,
                exponent,
            } => BodySpec::Superellipsoid {
                center: add(center),
                semi_axes: semi_axes.clone(),
                exponent: *exponent,
            },
            BodySpec::PerturbedEllipse {
                center,
                semi_axes,
                epsilon,
                k,
            } => BodySpec::PerturbedEllipse {
                center: [center[0] + shift[0], center[1] + shift[1]],
                semi_axes: *semi_axes,
                epsilon: *epsilon,
                k: *k,
            },
            BodySpec::Polygon { vertices } => BodySpec::Polygon {
                vertices: vertices
                    .iter()
                    .map(|v| [v[0] + shift[0], v[1] + shift[1]])
                    .collect(),
            },
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, BodyError> {
        let file: BodyFile = serde_json::from_str(text)?;
        file.into_spec()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, BodyError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_file(&self) -> BodyFile {
        let mut file = BodyFile {
            version: Some(SCHEMA_VERSION),
            kind: BodyKind::Ellipsoid,
            dim: self.dim(),
            center: None,
            matrix: None,
            semi_axes: None,
            exponent: None,
            epsilon: None,
            k: None,
            vertices: None,
        };
        match self {
            BodySpec::Ellipsoid { center, matrix } => {
                file.center = Some(center.clone());
                file.matrix = Some(matrix.clone());
            }
            BodySpec::Superellipsoid {
                center,
                semi_axes,
                exponent,
            } => {
                file.kind = BodyKind::Superellipsoid;
                file.center = Some(center.clone());
                file.semi_axes = Some(semi_axes.clone());
                file.exponent = Some(*exponent);
            }
            BodySpec::PerturbedEllipse {
                center,
                semi_axes,
                epsilon,
                k,
            } => {
                file.kind = BodyKind::PerturbedEllipse;
                file.center = Some(center.to_vec());
                file.semi_axes = Some(semi_axes.to_vec());
                file.epsilon = Some(*epsilon);
                file.k = Some(*k);
            }
            BodySpec::Polygon { vertices } => {
                file.kind = BodyKind::Polygon;
                file.vertices = Some(vertices.clone());
            }
        }
        file
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("body file serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Ellipsoid,
    Superellipsoid,
    PerturbedEllipse,
    Polygon,
}

/// On-disk body description (schema v1).
///
/// ```json
/// { "version": 1, "kind": "ellipsoid", "dim": 2, "center": [0, 0], "matrix": [0.25, 0, 0, 1] }
/// { "kind": "ellipsoid", "dim": 2, "semi_axes": [2, 1] }
/// { "kind": "superellipsoid", "dim": 2, "semi_axes": [1, 1], "exponent": 4 }
/// { "kind": "perturbed_ellipse", "dim": 2, "semi_axes": [1.5, 1], "epsilon": 0.05, "k": 3 }
/// { "kind": "polygon", "dim": 2, "vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub kind: BodyKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
}

impl BodyFile {
    /// Checks the schema-level requirements and produces a [`BodySpec`].
    /// Geometric validity (definiteness, convexity) is checked by `Body::new`.
    pub fn into_spec(self) -> Result<BodySpec, BodyError> {
        if let Some(v) = self.version {
            if v != SCHEMA_VERSION {
                return Err(BodyError::invalid(format!(
                    "unsupported schema version {v} (expected {SCHEMA_VERSION})"
                )));
            }
        }
        let n = self.dim;
        if n < 2 {
            return Err(BodyError::invalid(format!("dim must be at least 2, got {n}")));
        }
        let center = match self.center {
            Some(c) if c.len() != n => {
                return Err(BodyError::invalid(format!(
                    "center has {} entries, dim is {n}",
                    c.len()
                )))
            }
            Some(c) => c,
            None => vec![0.0; n],
        };
        let planar = |what: &str| -> Result<(), BodyError> {
            if n != 2 {
                Err(BodyError::invalid(format!("{what} requires dim = 2, got {n}")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            BodyKind::Ellipsoid => {
                let matrix = match (self.matrix, self.semi_axes) {
                    (Some(m), None) => m,
                    (None, Some(axes)) => {
                        if axes.len() != n {
                            return Err(BodyError::invalid(format!(
                                "semi_axes has {} entries, dim is {n}",
                                axes.len()
                            )));
                        }
                        if axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                            return Err(BodyError::invalid("semi_axes must be positive"));
                        }
                        match BodySpec::ellipsoid_axes(&axes) {
                            BodySpec::Ellipsoid { matrix, .. } => matrix,
                            _ => unreachable!(),
                        }
                    }
                    (Some(_), Some(_)) => {
                        return Err(BodyError::invalid(
                            "ellipsoid takes either matrix or semi_axes, not both",
                        ))
                    }
                    (None, None) => {
                        return Err(BodyError::invalid("ellipsoid needs matrix or semi_axes"))
                    }
                };
                if matrix.len() != n * n {
                    return Err(BodyError::invalid(format!(
                        "matrix has {} entries, expected {} (row-major {n}x{n})",
                        matrix.len(),
                        n * n
                    )));
                }
                Ok(BodySpec::Ellipsoid { center, matrix })
            }
            BodyKind::Superellipsoid => {
                let semi_axes = self
                    .semi_axes
                    .ok_or_else(|| BodyError::invalid("superellipsoid needs semi_axes"))?;
                if semi_axes.len() != n {
                    return Err(BodyError::invalid(format!(
                        "semi_axes has {} entries, dim is {n}",
                        semi_axes.len()
                    )));
                }
                let exponent = self
                    .exponent
                    .ok_or_else(|| BodyError::invalid("superellipsoid needs exponent"))?;
                Ok(BodySpec::Superellipsoid {
                    center,
                    semi_axes,
                    exponent,
                })
            }
            BodyKind::PerturbedEllipse => {
                planar("perturbed_ellipse")?;
                let axes = self
                    .semi_axes
                    .ok_or_else(|| BodyError::invalid("perturbed_ellipse needs semi_axes"))?;
                if axes.len() != 2 {
                    return Err(BodyError::invalid("perturbed_ellipse needs 2 semi_axes"));
                }
                Ok(BodySpec::PerturbedEllipse {
                    center: [center[0], center[1]],
                    semi_axes: [axes[0], axes[1]],
                    epsilon: self
                        .epsilon
                        .ok_or_else(|| BodyError::invalid("perturbed_ellipse needs epsilon"))?,
                    k: self
                        .k
                        .ok_or_else(|| BodyError::invalid("perturbed_ellipse needs k"))?,
                })
            }
            BodyKind::Polygon => {
                planar("polygon")?;
                let vertices = self
                    .vertices
                    .ok_or_else(|| BodyError::invalid("polygon needs vertices"))?;
                Ok(BodySpec::Polygon { vertices })
            }
        }
    }
}
