use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{format_poly, parse_poly, MPoly, PolySystem, Ring};
use crate::error::{Error, Result};
use crate::tracker::{dedup_endpoints, MultiProjPoint, DEDUP_TOL};

/// Residual bound a stored witness point must meet, relative to the
/// coefficient size of each equation.
pub const WITNESS_TOL: f64 = 1e-8;

/// Largest `|f(p)| / Σ|coeffs of f|` over `polys` at the normalized `p`.
pub fn relative_residual<'a>(polys: impl IntoIterator<Item = &'a MPoly>, p: &MultiProjPoint) -> f64 {
    let mut worst: f64 = 0.0;
    let mut flat: Option<Vec<_>> = None;
    for f in polys {
        let z = flat.get_or_insert_with(|| p.normalized().to_flat(f.ring()));
        let scale = f.coefficient_scale().max(f64::MIN_POSITIVE);
        worst = worst.max(f.eval_unchecked(z).norm() / scale);
    }
    worst
}

/// The triple `(F, L, W)`: equations, a generic slice of `dim` linear
/// forms, and the points of `V(F) ∩ V(L)` on the component.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSet {
    system: PolySystem,
    slice: Vec<MPoly>,
    points: Vec<MultiProjPoint>,
    dim: usize,
}

impl WitnessSet {
    /// Validates residuals, normalizes and deduplicates the points.
    pub fn new(
        system: PolySystem,
        slice: Vec<MPoly>,
        points: Vec<MultiProjPoint>,
        dim: usize,
    ) -> Result<Self> {
        if slice.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "a dimension-{dim} witness set needs {dim} slice forms, got {}",
                slice.len()
            )));
        }
        let ring = system.ring();
        for l in &slice {
            if l.ring() != ring {
                return Err(Error::RingMismatch("slice form lives in another ring".into()));
            }
            if l.total_degree()? != 1 || !l.is_homogeneous() {
                return Err(Error::InvalidArgument("slice forms must be linear and homogeneous".into()));
            }
        }
        let normalized: Vec<MultiProjPoint> = points.iter().map(|p| p.normalized()).collect();
        for (k, p) in normalized.iter().enumerate() {
            let r = relative_residual(system.polys().iter().chain(&slice), p);
            if !(r <= WITNESS_TOL) {
                return Err(Error::StartPoint {
                    index: k,
                    msg: format!("witness point has relative residual {r:e}"),
                });
            }
        }
        let points = dedup_endpoints(&normalized, DEDUP_TOL).points;
        Ok(WitnessSet {
            system,
            slice,
            points,
            dim,
        })
    }

    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    pub fn slice(&self) -> &[MPoly] {
        &self.slice
    }

    pub fn points(&self) -> &[MultiProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.system.ring()
    }

    /// Same set with some points removed (they need no re-validation).
    pub fn with_points(&self, points: Vec<MultiProjPoint>) -> WitnessSet {
        WitnessSet {
            points,
            ..self.clone()
        }
    }

    pub fn to_file(&self) -> WitnessFile {
        WitnessFile {
            variables: self.ring().names().to_vec(),
            groups: group_names(self.ring()),
            homogenizers: homogenizer_names(self.ring()),
            equations: self.system.polys().iter().map(format_poly).collect(),
            slice: self.slice.iter().map(format_poly).collect(),
            points: self.points.iter().map(MultiProjPoint::to_pairs).collect(),
            dim: self.dim,
        }
    }

    pub fn from_file(file: &WitnessFile) -> Result<Self> {
        let ring = ring_from_names(&file.variables, &file.groups, &file.homogenizers)?;
        let parse_all = |v: &[String]| -> Result<Vec<MPoly>> {
            v.iter().map(|e| parse_poly(&ring, e)).collect()
        };
        let system = PolySystem::new(&ring, parse_all(&file.equations)?)?;
        let points = file.points.iter().map(|p| MultiProjPoint::from_pairs(p)).collect();
        WitnessSet::new(system, parse_all(&file.slice)?, points, file.dim)
    }
}

/// Serialized witness set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub variables: Vec<String>,
    pub groups: Vec<Vec<String>>,
    /// Homogenizing variable of each group, if designated.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub homogenizers: Vec<Option<String>>,
    pub equations: Vec<String>,
    pub slice: Vec<String>,
    pub points: Vec<Vec<Vec<[f64; 2]>>>,
    pub dim: usize,
}

pub(crate) fn group_names(ring: &Ring) -> Vec<Vec<String>> {
    ring.groups()
        .iter()
        .map(|g| g.iter().map(|&v| ring.name(v).to_string()).collect())
        .collect()
}

pub(crate) fn homogenizer_names(ring: &Ring) -> Vec<Option<String>> {
    if ring.homogenizers().iter().all(Option::is_none) {
        return Vec::new();
    }
    ring.homogenizers()
        .iter()
        .map(|h| h.map(|v| ring.name(v).to_string()))
        .collect()
}

pub(crate) fn ring_from_names(
    variables: &[String],
    groups: &[Vec<String>],
    homogenizers: &[Option<String>],
) -> Result<Arc<Ring>> {
    let index = |name: &String| {
        variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidArgument(format!("group member {name:?} is not a variable")))
    };
    let groups = groups
        .iter()
        .map(|g| g.iter().map(index).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let k = groups.len();
    let homogenizers = if homogenizers.is_empty() {
        vec![None; k]
    } else if homogenizers.len() == k {
        homogenizers
            .iter()
            .map(|h| h.as_ref().map(index).transpose())
            .collect::<Result<Vec<_>>>()?
    } else {
        return Err(Error::InvalidArgument("one homogenizer entry per group required".into()));
    };
    Ring::new(variables.to_vec(), groups, homogenizers)
}

/// One entry of a witness collection: the slice forms (grouped by factor,
/// in factor order) and the witness points.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectionEntry {
    pub slice: Vec<MPoly>,
    pub points: Vec<MultiProjPoint>,
}

/// Witness point sets of a pure-dimensional subvariety of a product of
/// projective spaces, one per slice type `(a_1, …, a_k)` with `Σ a_i = dim`
/// and `a_i` at most the dimension of factor `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCollection {
    pub(crate) system: PolySystem,
    pub(crate) dim: usize,
    pub(crate) entries: BTreeMap<Vec<usize>, CollectionEntry>,
}

impl WitnessCollection {
    pub fn new(
        system: PolySystem,
        dim: usize,
        entries: BTreeMap<Vec<usize>, CollectionEntry>,
    ) -> Result<Self> {
        let dims = system.ring().factor_dims();
        for (a, e) in &entries {
            if a.len() != dims.len() || a.iter().sum::<usize>() != dim {
                return Err(Error::InvalidArgument(format!("bad slice type {a:?}")));
            }
            if a.iter().zip(&dims).any(|(x, n)| x > n) {
                return Err(Error::InvalidArgument(format!(
                    "slice type {a:?} exceeds the factor dimensions {dims:?}"
                )));
            }
            WitnessSet::new(system.clone(), e.slice.clone(), e.points.clone(), dim)?;
        }
        Ok(WitnessCollection {
            system,
            dim,
            entries,
        })
    }

    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, CollectionEntry> {
        &self.entries
    }

    pub fn entry(&self, slice_type: &[usize]) -> Option<&CollectionEntry> {
        self.entries.get(slice_type)
    }

    /// The entry as a witness set (its slice mixes groups as recorded).
    pub fn witness_set(&self, slice_type: &[usize]) -> Option<WitnessSet> {
        self.entries.get(slice_type).map(|e| WitnessSet {
            system: self.system.clone(),
            slice: e.slice.clone(),
            points: e.points.clone(),
            dim: self.dim,
        })
    }
}
