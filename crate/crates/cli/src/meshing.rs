//! `mesh gen` and `mesh check`.

use std::fmt::Write as _;
use std::path::Path;

use polydg_core::mesh::{check_regularity, generate_mesh, parse_mesh, write_mesh, FaceClass, PolyMesh, Region, RegionRect};

use crate::error::CliError;

/// Parses `xmin,ymin,xmax,ymax,region` with region `e`/`elastic` or
/// `p`/`poro`/`poroelastic`.
pub fn parse_rect(text: &str) -> Result<RegionRect, CliError> {
    let bad = || CliError::Usage(format!("rectangle '{text}' is not xmin,ymin,xmax,ymax,region"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(bad());
    }
    let mut c = [0.0; 4];
    for (slot, s) in c.iter_mut().zip(&parts) {
        *slot = s.parse().map_err(|_| bad())?;
    }
    let region = match parts[4] {
        "e" | "elastic" => Region::Elastic,
        "p" | "poro" | "poroelastic" => Region::Poro,
        _ => return Err(bad()),
    };
    Ok(RegionRect::new([c[0], c[1]], [c[2], c[3]], region))
}

pub fn generate(rects: &[RegionRect], n_elements: usize, seed: u64) -> Result<PolyMesh, CliError> {
    if rects.is_empty() {
        return Err(CliError::Usage("give at least one rectangle".into()));
    }
    Ok(generate_mesh(rects, n_elements, seed)?)
}

pub fn write(mesh: &PolyMesh, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, write_mesh(mesh)).map_err(CliError::io(path))
}

pub fn read(path: &Path) -> Result<PolyMesh, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(parse_mesh(&text)?)
}

/// Element and face counts, sizes and shape-regularity figures.
pub fn summary(mesh: &PolyMesh) -> String {
    let report = check_regularity(mesh);
    let count = |r: Region| mesh.elements().iter().filter(|e| e.region == r).count();
    let bbox = mesh.bbox();
    let mut s = String::new();
    writeln!(s, "elements        {} ({} elastic, {} poro-elastic)", mesh.n_elements(), count(Region::Elastic), count(Region::Poro)).unwrap();
    writeln!(s, "vertices        {}", mesh.vertices().len()).unwrap();
    writeln!(s, "faces           {}", mesh.faces().len()).unwrap();
    for (label, class) in [
        ("  interior e", FaceClass::InteriorElastic),
        ("  interior p", FaceClass::InteriorPoro),
        ("  interface", FaceClass::Interface),
        ("  boundary e", FaceClass::BoundaryElastic),
        ("  boundary p", FaceClass::BoundaryPoro),
    ] {
        writeln!(s, "{label:<16}{}", mesh.count_class(class)).unwrap();
    }
    writeln!(s, "bounding box    [{}, {}] x [{}, {}]", bbox.min[0], bbox.max[0], bbox.min[1], bbox.max[1]).unwrap();
    writeln!(s, "area            {:.6e}", mesh.total_area()).unwrap();
    writeln!(s, "h max / mean    {:.4e} / {:.4e}", mesh.max_diameter(), mesh.mean_diameter()).unwrap();
    writeln!(s, "face ratio max  {:.3}", report.max_face_ratio).unwrap();
    writeln!(s, "h ratio max     {:.3}", report.max_h_ratio).unwrap();
    s
}
