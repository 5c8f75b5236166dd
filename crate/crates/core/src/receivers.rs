//! Point sampling of the displacement and velocity fields during a run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fespace::{FeSpace, Field};
use crate::geometry::Point;
use crate::mesh::Location;
use crate::timedg::{Observer, SlabView, State};

#[derive(Debug, Error)]
pub enum ReceiverError {
    #[error("receiver '{name}' at ({}, {}) lies outside the mesh", .position[0], .position[1])]
    Outside { name: String, position: Point },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Receiver {
    pub name: String,
    pub position: Point,
}

/// Displacement and velocity of one field at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FieldSample {
    pub displacement: [f64; 2],
    pub velocity: [f64; 2],
}

/// Values of every field at one receiver and time; `None` for fields absent
/// from the receiver's region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReceiverSample {
    pub time: f64,
    pub fields: [Option<FieldSample>; 3],
}

impl ReceiverSample {
    pub fn field(&self, field: Field) -> Option<FieldSample> {
        self.fields[field.index()]
    }
}

/// Which time instants of each slab are stored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// The initial state and every slab end.
    #[default]
    SlabEnds,
    /// Also the interior Gauss-Lobatto nodes.
    AllNodes,
}

struct Probe {
    /// `(offset, n_modes)` of each field present at the point.
    blocks: [Option<usize>; 3],
    values: Vec<f64>,
}

impl Probe {
    fn sample(&self, time: f64, displacement: &[f64], velocity: &[f64]) -> ReceiverSample {
        let nb = self.values.len();
        let eval = |coeffs: &[f64], off: usize| {
            let mut out = [0.0; 2];
            for (c, o) in out.iter_mut().enumerate() {
                *o = self.values.iter().zip(&coeffs[off + c * nb..off + (c + 1) * nb]).map(|(v, a)| v * a).sum();
            }
            out
        };
        let mut fields = [None; 3];
        for (slot, block) in fields.iter_mut().zip(&self.blocks) {
            *slot = block.map(|off| FieldSample { displacement: eval(displacement, off), velocity: eval(velocity, off) });
        }
        ReceiverSample { time, fields }
    }
}

/// Records time series at fixed points.
pub struct ReceiverRecorder {
    receivers: Vec<Receiver>,
    probes: Vec<Probe>,
    sampling: Sampling,
    traces: Vec<Vec<ReceiverSample>>,
}

impl ReceiverRecorder {
    pub fn new(space: &FeSpace, receivers: Vec<Receiver>, sampling: Sampling) -> Result<Self, ReceiverError> {
        let mesh = space.mesh();
        let probes = receivers
            .iter()
            .map(|r| {
                let element = match mesh.locate(r.position) {
                    Location::Inside(e) | Location::OnBoundary(e) => e,
                    Location::Outside => {
                        return Err(ReceiverError::Outside { name: r.name.clone(), position: r.position })
                    }
                };
                let mut blocks = [None; 3];
                for field in Field::ALL {
                    blocks[field.index()] = space.dofs().offset(field, element);
                }
                Ok(Probe { blocks, values: space.basis(element).values(r.position) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let traces = vec![Vec::new(); receivers.len()];
        Ok(ReceiverRecorder { receivers, probes, sampling, traces })
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn traces(&self) -> &[Vec<ReceiverSample>] {
        &self.traces
    }

    pub fn into_traces(self) -> Vec<Vec<ReceiverSample>> {
        self.traces
    }

    fn record(&mut self, time: f64, displacement: &[f64], velocity: &[f64]) {
        for (probe, trace) in self.probes.iter().zip(&mut self.traces) {
            trace.push(probe.sample(time, displacement, velocity));
        }
    }
}

impl Observer for ReceiverRecorder {
    fn initial(&mut self, state: &State) {
        self.record(state.time, &state.displacement, &state.velocity);
    }

    fn slab(&mut self, view: &SlabView<'_>) {
        let s = view.solution;
        let first = match self.sampling {
            Sampling::SlabEnds => s.times.len() - 1,
            Sampling::AllNodes => 1,
        };
        for k in first..s.times.len() {
            self.record(s.times[k], &s.displacement[k], &s.velocity[k]);
        }
    }
}
