//! Plain-text mesh format:
//!
//! ```text
//! polymesh 2d <n_vertices> <n_elements>
//! x y                      (n_vertices lines)
//! <e|p> <k> v1 ... vk      (n_elements lines, 0-based, counterclockwise)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write;

use super::{MeshError, PolyMesh, Region};

pub fn parse_mesh(text: &str) -> Result<PolyMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_err = |line: usize, message: String| MeshError::Parse { line, message };

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 4 || tokens[0] != "polymesh" || tokens[1] != "2d" {
        return Err(parse_err(hline, format!("expected 'polymesh 2d <nv> <ne>', found '{header}'")));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|e| parse_err(hline, format!("bad count '{s}': {e}")));
    let (nv, ne) = (count(tokens[2])?, count(tokens[3])?);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, format!("expected {nv} vertices")))?;
        let xy: Vec<&str> = l.split_whitespace().collect();
        if xy.len() != 2 {
            return Err(parse_err(ln, format!("expected 'x y', found '{l}'")));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(ln, format!("bad coordinate '{s}'")))
        };
        vertices.push([num(xy[0])?, num(xy[1])?]);
    }

    let mut polygons = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, format!("expected {ne} elements")))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 2 {
            return Err(parse_err(ln, format!("expected '<e|p> <k> v1 ... vk', found '{l}'")));
        }
        let region = match t[0] {
            "e" => Region::Elastic,
            "p" => Region::Poro,
            other => return Err(parse_err(ln, format!("unknown region tag '{other}'"))),
        };
        let k: usize = t[1].parse().map_err(|e| parse_err(ln, format!("bad vertex count '{}': {e}", t[1])))?;
        if t.len() != k + 2 {
            return Err(parse_err(ln, format!("declares {k} vertices but lists {}", t.len() - 2)));
        }
        let ids = t[2..]
            .iter()
            .map(|s| s.parse::<usize>().map_err(|e| parse_err(ln, format!("bad vertex index '{s}': {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        polygons.push((region, ids));
    }
    if let Some((ln, l)) = lines.next() {
        return Err(parse_err(ln, format!("unexpected trailing content '{l}'")));
    }
    PolyMesh::from_polygons(vertices, polygons)
}

pub fn write_mesh(mesh: &PolyMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "polymesh 2d {} {}", mesh.vertices().len(), mesh.n_elements());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e}", p[0], p[1]);
    }
    for el in mesh.elements() {
        let _ = write!(out, "{} {}", el.region.tag(), el.vertices.len());
        for v in &el.vertices {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}
