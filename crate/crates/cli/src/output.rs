//! Receiver CSV files, legacy VTK snapshots and their observers.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use polydg_core::fespace::{FeSpace, Field};
use polydg_core::mesh::Region;
use polydg_core::receivers::ReceiverSample;
use polydg_core::timedg::{Observer, SlabView, State};

pub const RECEIVER_HEADER: &str = "t,ux_e,uy_e,vx_e,vy_e,ux_p,uy_p,vx_p,vy_p,ux_f,uy_f,vx_f,vy_f";

/// One row per sample; fields missing at the receiver leave empty columns.
pub fn write_receiver_csv(out: &mut impl Write, samples: &[ReceiverSample]) -> io::Result<()> {
    writeln!(out, "{RECEIVER_HEADER}")?;
    let mut line = String::new();
    for s in samples {
        line.clear();
        write!(line, "{:e}", s.time).unwrap();
        for field in Field::ALL {
            match s.field(field) {
                Some(v) => {
                    for x in v.displacement.iter().chain(&v.velocity) {
                        write!(line, ",{x:e}").unwrap();
                    }
                }
                None => line.push_str(",,,,"),
            }
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Legacy ASCII VTK unstructured grid over the sub-triangles of every element.
/// Triangles do not share points, so the discontinuous fields are sampled
/// from their own element. Absent fields are written as zero.
pub fn write_snapshot(out: &mut impl Write, space: &FeSpace, state: &State) -> io::Result<()> {
    let mesh = space.mesh();
    let mut points = Vec::new();
    let mut owners = Vec::new();
    for e in 0..mesh.n_elements() {
        for t in &mesh.subtriangulation(e).triangles {
            points.extend_from_slice(t);
            owners.push(e);
        }
    }
    let n_tri = owners.len();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "velocity at t = {:e}", state.time)?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", points.len())?;
    for p in &points {
        writeln!(out, "{:e} {:e} 0", p[0], p[1])?;
    }
    writeln!(out, "CELLS {n_tri} {}", 4 * n_tri)?;
    for t in 0..n_tri {
        writeln!(out, "3 {} {} {}", 3 * t, 3 * t + 1, 3 * t + 2)?;
    }
    writeln!(out, "CELL_TYPES {n_tri}")?;
    for _ in 0..n_tri {
        writeln!(out, "5")?;
    }
    writeln!(out, "CELL_DATA {n_tri}")?;
    writeln!(out, "SCALARS element int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for e in &owners {
        writeln!(out, "{e}")?;
    }
    writeln!(out, "SCALARS region int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &e in &owners {
        writeln!(out, "{}", u8::from(mesh.element(e).region == Region::Poro))?;
    }
    writeln!(out, "POINT_DATA {}", points.len())?;
    for field in Field::ALL {
        let suffix = &field.name()[2..];
        for (label, coeffs) in [("velocity", &state.velocity), ("displacement", &state.displacement)] {
            writeln!(out, "VECTORS {label}_{suffix} double")?;
            for (k, p) in points.iter().enumerate() {
                let e = owners[k / 3];
                let v = if space.dofs().offset(field, e).is_some() {
                    space.evaluate(coeffs, field, e, *p).value
                } else {
                    [0.0; 2]
                };
                writeln!(out, "{:e} {:e} 0", v[0], v[1])?;
            }
        }
    }
    Ok(())
}

/// Writes a snapshot of the initial state and of every `every`-th slab end.
/// The first write error stops further output and is kept for the caller.
pub struct SnapshotWriter<'a> {
    space: &'a FeSpace,
    dir: PathBuf,
    every: usize,
    written: Vec<PathBuf>,
    error: Option<(PathBuf, io::Error)>,
}

impl<'a> SnapshotWriter<'a> {
    pub fn new(space: &'a FeSpace, dir: &Path, every: usize) -> Self {
        SnapshotWriter { space, dir: dir.to_owned(), every, written: Vec::new(), error: None }
    }

    fn write(&mut self, index: usize, state: &State) {
        if self.error.is_some() {
            return;
        }
        let path = self.dir.join(format!("snapshot_{index:06}.vtk"));
        let result = std::fs::File::create(&path).and_then(|f| {
            let mut w = io::BufWriter::new(f);
            write_snapshot(&mut w, self.space, state)?;
            w.flush()
        });
        match result {
            Ok(()) => self.written.push(path),
            Err(e) => self.error = Some((path, e)),
        }
    }

    pub fn finish(self) -> Result<Vec<PathBuf>, (PathBuf, io::Error)> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.written),
        }
    }
}

impl Observer for SnapshotWriter<'_> {
    fn initial(&mut self, state: &State) {
        self.write(0, state);
    }

    fn slab(&mut self, view: &SlabView<'_>) {
        let slab = view.index + 1;
        if slab.is_multiple_of(self.every) {
            self.write(slab, &view.solution.end_state());
        }
    }
}
