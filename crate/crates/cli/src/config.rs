//! Simulation configuration, read from JSON or TOML.

use std::fmt;
use std::path::{Path, PathBuf};

use polydg_core::assembly::{BoundaryCondition, BoundaryConditions, FormOptions, MomentSource};
use polydg_core::materials::{ElasticParams, Materials, PoroParams};
use polydg_core::mesh::{Region, RegionRect};
use polydg_core::receivers::{Receiver, Sampling};
use polydg_core::timedg::SlabSolver;
use polydg_core::verify::ManufacturedCase;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// Seed of the mesh generator.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub geometry: Option<Geometry>,
    #[serde(default)]
    pub materials: Option<MaterialsConfig>,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub forms: FormOptions,
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub sources: Vec<SourceConfig>,
    #[serde(default)]
    pub receivers: Vec<Receiver>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Either rectangles to mesh or a mesh file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    #[serde(default)]
    pub rectangles: Vec<RectangleConfig>,
    #[serde(default)]
    pub mesh_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectangleConfig {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub region: Region,
}

impl RectangleConfig {
    pub fn to_rect(self) -> RegionRect {
        RegionRect::new(self.min, self.max, self.region)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsConfig {
    #[serde(default)]
    pub elastic: Option<ElasticParams>,
    #[serde(default, alias = "poro")]
    pub poroelastic: Option<PoroParams>,
}

/// One tag per outer side; missing tags are reported at validation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub left: Option<BoundaryCondition>,
    pub right: Option<BoundaryCondition>,
    pub bottom: Option<BoundaryCondition>,
    pub top: Option<BoundaryCondition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    #[serde(default)]
    pub n_elements: Option<usize>,
    /// Target element size; the mesh gets about `area / h²` elements.
    #[serde(default)]
    pub h: Option<f64>,
    /// Sets both space degrees unless they are given separately.
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub degree_elastic: Option<usize>,
    #[serde(default)]
    pub degree_poro: Option<usize>,
    pub step: f64,
    pub time_degree: usize,
    pub final_time: f64,
    #[serde(default)]
    pub solver: SlabSolver,
    #[serde(default)]
    pub condition_estimate: bool,
}

impl DiscretizationConfig {
    pub fn degrees(&self) -> (Option<usize>, Option<usize>) {
        (self.degree_elastic.or(self.degree), self.degree_poro.or(self.degree))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceConfig {
    /// Loads, Dirichlet data and initial state of the manufactured solution.
    Manufactured,
    MomentPoint(MomentSource),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory receiving one `<name>.csv` per receiver.
    #[serde(default)]
    pub receiver_dir: Option<PathBuf>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub snapshot_dir: Option<PathBuf>,
    /// Slabs between snapshots.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    /// JSON run report.
    #[serde(default)]
    pub report: Option<PathBuf>,
}

/// One invalid configuration entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Default)]
pub(crate) struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn require(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.0.push(Violation { field: field.into(), message: message.into() });
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(self.0))
        }
    }
}

/// Reads JSON (`.json`) or TOML (anything else) into `T`.
pub fn load_file<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| CliError::Parse { path: path.to_owned(), message })
}

impl SimulationConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        load_file(path)
    }

    pub fn is_manufactured(&self) -> bool {
        self.sources.iter().any(|s| matches!(s, SourceConfig::Manufactured))
    }

    /// Manufactured case carrying the configured materials and δ.
    pub fn manufactured_case(&self) -> ManufacturedCase {
        let mut case = ManufacturedCase { delta: self.forms.delta, ..ManufacturedCase::new() };
        if let Some(m) = &self.materials {
            case.elastic = m.elastic.unwrap_or(case.elastic);
            case.poro = m.poroelastic.unwrap_or(case.poro);
        }
        case
    }

    /// Rectangles to mesh, falling back to the manufactured domain.
    pub fn rectangles(&self) -> Vec<RegionRect> {
        match &self.geometry {
            Some(g) if !g.rectangles.is_empty() => g.rectangles.iter().map(|r| r.to_rect()).collect(),
            _ => ManufacturedCase::regions().to_vec(),
        }
    }

    pub fn mesh_file(&self) -> Option<&Path> {
        self.geometry.as_ref().and_then(|g| g.mesh_file.as_deref())
    }

    pub fn boundary_conditions(&self) -> BoundaryConditions {
        let b = &self.boundary;
        let or = |c: Option<BoundaryCondition>| c.unwrap_or(BoundaryCondition::Dirichlet);
        BoundaryConditions { left: or(b.left), right: or(b.right), bottom: or(b.bottom), top: or(b.top) }
    }

    /// Materials of the run; the manufactured solution supplies defaults.
    pub fn materials(&self) -> Result<Materials, CliError> {
        let (elastic, poro) = if self.is_manufactured() {
            let case = self.manufactured_case();
            (Some(case.elastic), Some(case.poro))
        } else {
            let m = self.materials.unwrap_or(MaterialsConfig { elastic: None, poroelastic: None });
            (m.elastic, m.poroelastic)
        };
        Ok(Materials::new(elastic, poro)?)
    }

    /// Checks everything that does not need the mesh and returns every
    /// violation at once.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut v = Violations::default();
        let d = &self.discretization;
        v.require(d.final_time > 0.0 && d.final_time.is_finite(), "discretization.final_time", "must be positive");
        v.require(d.step > 0.0 && d.step.is_finite(), "discretization.step", "must be positive");
        if d.final_time > 0.0 && d.step > 0.0 {
            let slabs = (d.final_time / d.step).round();
            v.require(
                slabs >= 1.0 && (slabs * d.step - d.final_time).abs() <= 1e-12 * d.final_time,
                "discretization.step",
                format!("must divide final_time {} exactly", d.final_time),
            );
        }
        v.require(d.time_degree >= 1, "discretization.time_degree", "must be at least 1");
        let (pe, pp) = d.degrees();
        v.require(pe.is_some_and(|p| p >= 1), "discretization.degree_elastic", "must be given and at least 1");
        v.require(pp.is_some_and(|p| p >= 1), "discretization.degree_poro", "must be given and at least 1");
        let from_file = self.mesh_file().is_some();
        if !from_file {
            v.require(
                d.n_elements.is_some() != d.h.is_some(),
                "discretization.n_elements",
                "exactly one of n_elements and h must be given",
            );
        }
        v.require(d.n_elements.is_none_or(|n| n >= 1), "discretization.n_elements", "must be positive");
        v.require(d.h.is_none_or(|h| h > 0.0 && h.is_finite()), "discretization.h", "must be positive");

        let f = &self.forms;
        v.require((0.0..=1.0).contains(&f.delta), "forms.delta", format!("{} is outside [0, 1]", f.delta));
        v.require(f.c1 > 0.0 && f.c1.is_finite(), "forms.c1", "must be positive");
        v.require(f.c2 > 0.0 && f.c2.is_finite(), "forms.c2", "must be positive");

        let b = &self.boundary;
        for (side, tag) in [("left", b.left), ("right", b.right), ("bottom", b.bottom), ("top", b.top)] {
            v.require(tag.is_some(), &format!("boundary.{side}"), "missing condition");
        }

        if let Some(g) = &self.geometry {
            v.require(
                g.rectangles.is_empty() != g.mesh_file.is_none(),
                "geometry",
                "give either rectangles or mesh_file",
            );
            for (i, r) in g.rectangles.iter().enumerate() {
                v.require(
                    r.max[0] > r.min[0] && r.max[1] > r.min[1],
                    &format!("geometry.rectangles[{i}]"),
                    "max must exceed min in both coordinates",
                );
            }
        } else {
            v.require(self.is_manufactured(), "geometry", "missing");
        }

        if self.is_manufactured() {
            v.require(self.sources.len() == 1, "sources", "the manufactured source cannot be combined with others");
            v.require(
                self.boundary_conditions() == BoundaryConditions::default(),
                "boundary",
                "the manufactured solution needs dirichlet on every side",
            );
            if let Some(g) = &self.geometry {
                let domain = ManufacturedCase::regions();
                let matches = g.rectangles.is_empty()
                    || g.rectangles.len() == domain.len()
                        && g.rectangles.iter().zip(&domain).all(|(a, b)| a.to_rect() == *b);
                v.require(matches, "geometry.rectangles", "the manufactured solution lives on (-1,1)x(0,1), poro-elastic for x<0");
            }
        } else {
            let regions: Vec<Region> = self.rectangles().iter().map(|r| r.region).collect();
            let m = self.materials.unwrap_or(MaterialsConfig { elastic: None, poroelastic: None });
            if !from_file {
                v.require(
                    !regions.contains(&Region::Elastic) || m.elastic.is_some(),
                    "materials.elastic",
                    "missing for an elastic rectangle",
                );
                v.require(
                    !regions.contains(&Region::Poro) || m.poroelastic.is_some(),
                    "materials.poroelastic",
                    "missing for a poro-elastic rectangle",
                );
            }
            for (i, s) in self.sources.iter().enumerate() {
                if let SourceConfig::MomentPoint(s) = s {
                    let field = |name: &str| format!("sources[{i}].{name}");
                    v.require(s.peak_frequency > 0.0, &field("peak_frequency"), "must be positive");
                    v.require(s.delay >= 0.0, &field("delay"), "must be non-negative");
                    v.require(s.moment.is_finite(), &field("moment"), "must be finite");
                }
            }
        }
        if let Err(e) = self.materials() {
            match e {
                CliError::Core(polydg_core::Error::Parameter(p)) => {
                    for x in p.violations {
                        v.0.push(Violation { field: format!("materials.{}", x.field), message: x.message });
                    }
                }
                other => return Err(other),
            }
        }

        let mut names = std::collections::BTreeSet::new();
        for (i, r) in self.receivers.iter().enumerate() {
            v.require(!r.name.is_empty(), &format!("receivers[{i}].name"), "must not be empty");
            v.require(names.insert(r.name.as_str()), &format!("receivers[{i}].name"), format!("duplicate name '{}'", r.name));
            let safe = r.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
            v.require(safe, &format!("receivers[{i}].name"), "use letters, digits, '-', '_' or '.'");
        }
        let o = &self.output;
        v.require(o.snapshot_every.is_none_or(|n| n > 0), "output.snapshot_every", "must be positive");
        v.require(
            o.snapshot_dir.is_none() || o.snapshot_every.is_some(),
            "output.snapshot_every",
            "required with snapshot_dir",
        );
        v.finish()
    }

    /// Number of elements to generate on the rectangles.
    pub fn element_count(&self) -> usize {
        let d = &self.discretization;
        match (d.n_elements, d.h) {
            (Some(n), _) => n,
            (None, Some(h)) => {
                let area: f64 = self.rectangles().iter().map(|r| r.area()).sum();
                ((area / (h * h)).round() as usize).max(1)
            }
            (None, None) => 1,
        }
    }

    /// Turns relative output and mesh paths into paths below `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(g) = &mut self.geometry {
            g.mesh_file.as_mut().map(fix);
        }
        let o = &mut self.output;
        for p in [&mut o.receiver_dir, &mut o.snapshot_dir, &mut o.report].into_iter().flatten() {
            fix(p);
        }
    }
}
