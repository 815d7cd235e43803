//! JSON formats for systems and solutions.

use serde::{Deserialize, Serialize};

use crate::algebra::{format_poly, parse_poly, PolySystem};
use crate::error::{Error, Result};
use crate::tracker::MultiProjPoint;
use crate::witness::{group_names, homogenizer_names, relative_residual, ring_from_names};

/// `{variables, groups, equations}`; equations use the text grammar of
/// [`crate::algebra::parse_poly`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub variables: Vec<String>,
    pub groups: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub homogenizers: Vec<Option<String>>,
    pub equations: Vec<String>,
}

impl SystemFile {
    pub fn from_system(f: &PolySystem) -> Self {
        let ring = f.ring();
        SystemFile {
            variables: ring.names().to_vec(),
            groups: group_names(ring),
            homogenizers: homogenizer_names(ring),
            equations: f.polys().iter().map(format_poly).collect(),
        }
    }

    pub fn to_system(&self) -> Result<PolySystem> {
        let ring = ring_from_names(&self.variables, &self.groups, &self.homogenizers)?;
        let polys = self
            .equations
            .iter()
            .enumerate()
            .map(|(i, e)| parse_poly(&ring, e).map_err(|err| err.context(format!("equation {i}"))))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(&ring, polys)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionStatus {
    Finite,
    AtInfinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Per factor, `[re, im]` pairs.
    pub coordinates: Vec<Vec<[f64; 2]>>,
    pub status: SolutionStatus,
}

/// Solutions of a projective system, tagged with the ring they live in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    /// The projective system the points solve.
    pub system: SystemFile,
    pub method: String,
    pub seed: u64,
    pub solutions: Vec<Solution>,
}

impl SolutionFile {
    /// `finite` counts the leading points of `points` that are finite.
    pub fn new(system: &PolySystem, method: &str, seed: u64, points: &[MultiProjPoint], finite: usize) -> Self {
        SolutionFile {
            system: SystemFile::from_system(system),
            method: method.to_string(),
            seed,
            solutions: points
                .iter()
                .enumerate()
                .map(|(i, p)| Solution {
                    coordinates: p.to_pairs(),
                    status: if i < finite {
                        SolutionStatus::Finite
                    } else {
                        SolutionStatus::AtInfinity
                    },
                })
                .collect(),
        }
    }

    pub fn finite(&self) -> usize {
        self.solutions
            .iter()
            .filter(|s| s.status == SolutionStatus::Finite)
            .count()
    }
}

/// Relative residual (see [`relative_residual`]) of every stored point
/// against `f`. `f` must be the system stored in the file or the affine
/// system it was homogenized from.
pub fn check_solutions(f: &PolySystem, file: &SolutionFile) -> Result<Vec<f64>> {
    let stored = file.system.to_system()?;
    let target = if f.ring().names() == stored.ring().names() {
        f.clone()
    } else {
        let h = f.homogenize()?;
        if h.ring().names() != stored.ring().names() {
            return Err(Error::RingMismatch(format!(
                "solutions use variables {:?}, the system {:?}",
                stored.ring().names(),
                f.ring().names()
            )));
        }
        h
    };
    let ring = target.ring();
    let dims: Vec<usize> = ring.groups().iter().map(Vec::len).collect();
    file.solutions
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let sizes: Vec<usize> = s.coordinates.iter().map(Vec::len).collect();
            if sizes != dims {
                return Err(Error::InvalidArgument(format!(
                    "solution {i} has factor sizes {sizes:?}, expected {dims:?}"
                )));
            }
            let p = MultiProjPoint::from_pairs(&s.coordinates);
            if !p.is_finite() || p.factors.iter().any(|f| f.iter().all(|c| c.norm() == 0.0)) {
                return Ok(f64::INFINITY);
            }
            Ok(relative_residual(target.polys(), &p))
        })
        .collect()
}
