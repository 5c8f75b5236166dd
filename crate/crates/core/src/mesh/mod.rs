//! Polygonal meshes split into an elastic and a poro-elastic region.

mod format;
mod generate;
mod regularity;
mod subtri;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, BoundingBox, Point};

pub use format::{parse_mesh, write_mesh};
pub use generate::{generate_mesh, RegionRect};
pub use regularity::{check_regularity, check_regularity_with_degrees, ElementRegularity, RegularityReport};
pub use subtri::SubTriangulation;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("rectangle {index} is degenerate (zero or negative area)")]
    DegenerateRectangle { index: usize },
    #[error("rectangles {first} and {second} overlap")]
    OverlappingRectangles { first: usize, second: usize },
    #[error("{requested} elements are too few: rectangle {index} would receive {assigned}")]
    TooFewElements { requested: usize, index: usize, assigned: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("element {element}: {message}")]
    Element { element: usize, message: String },
    #[error("face {face} (vertices {a}-{b}): {message}")]
    Face { face: usize, a: usize, b: usize, message: String },
    #[error("vertex {vertex} is not used by any element")]
    UnusedVertex { vertex: usize },
    #[error("empty mesh")]
    Empty,
}

/// Physical model carried by an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "e", alias = "elastic")]
    Elastic,
    #[serde(rename = "p", alias = "poroelastic", alias = "poro")]
    Poro,
}

impl Region {
    pub fn tag(self) -> char {
        match self {
            Region::Elastic => 'e',
            Region::Poro => 'p',
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Elastic => "elastic",
            Region::Poro => "poroelastic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceClass {
    InteriorElastic,
    InteriorPoro,
    BoundaryElastic,
    BoundaryPoro,
    Interface,
}

impl FaceClass {
    pub fn is_boundary(self) -> bool {
        matches!(self, FaceClass::BoundaryElastic | FaceClass::BoundaryPoro)
    }
}

/// Side of the domain bounding box a boundary face belongs to, decided by the
/// dominant component of its outward normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySide {
    Left,
    Right,
    Bottom,
    Top,
}

impl BoundarySide {
    pub const ALL: [BoundarySide; 4] =
        [BoundarySide::Left, BoundarySide::Right, BoundarySide::Bottom, BoundarySide::Top];

    pub fn from_normal(n: Point) -> Self {
        if n[0].abs() >= n[1].abs() {
            if n[0] < 0.0 {
                BoundarySide::Left
            } else {
                BoundarySide::Right
            }
        } else if n[1] < 0.0 {
            BoundarySide::Bottom
        } else {
            BoundarySide::Top
        }
    }
}

#[derive(Clone, Debug)]
pub struct Face {
    /// Endpoints in the order they are traversed by the owner element.
    pub vertices: [usize; 2],
    /// Element the normal points out of: the lower id on interior faces and
    /// the poro-elastic element on interface faces.
    pub owner: usize,
    pub neighbor: Option<usize>,
    pub class: FaceClass,
    pub normal: Point,
    pub length: f64,
}

impl Face {
    /// +1 if the stored normal is outward for `element`, -1 otherwise.
    pub fn sign_for(&self, element: usize) -> f64 {
        if element == self.owner {
            1.0
        } else {
            -1.0
        }
    }

    pub fn boundary_side(&self) -> Option<BoundarySide> {
        self.class.is_boundary().then(|| BoundarySide::from_normal(self.normal))
    }
}

#[derive(Clone, Debug)]
pub struct Element {
    /// Counterclockwise vertex loop.
    pub vertices: Vec<usize>,
    pub region: Region,
    /// `faces[i]` is the edge from `vertices[i]` to `vertices[i + 1]`.
    pub faces: Vec<usize>,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    pub bbox: BoundingBox,
}

/// Result of a point location query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside(usize),
    /// Within tolerance of an edge of this element.
    OnBoundary(usize),
    Outside,
}

#[derive(Clone, Debug)]
pub struct PolyMesh {
    vertices: Vec<Point>,
    elements: Vec<Element>,
    faces: Vec<Face>,
    subtriangulations: Vec<SubTriangulation>,
    bbox: BoundingBox,
}

impl PolyMesh {
    /// Builds a mesh from vertex coordinates and counterclockwise element
    /// loops, validating topology and classifying faces.
    pub fn from_polygons(
        vertices: Vec<Point>,
        polygons: Vec<(Region, Vec<usize>)>,
    ) -> Result<Self, MeshError> {
        if polygons.is_empty() {
            return Err(MeshError::Empty);
        }
        let bbox = BoundingBox::of(&vertices);
        let scale = bbox.width().max(bbox.height());
        let mut elements = Vec::with_capacity(polygons.len());
        for (id, (region, loop_)) in polygons.into_iter().enumerate() {
            elements.push(build_element(id, region, loop_, &vertices, scale)?);
        }

        let mut incidence: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (id, el) in elements.iter().enumerate() {
            let k = el.vertices.len();
            for i in 0..k {
                let (a, b) = (el.vertices[i], el.vertices[(i + 1) % k]);
                incidence.entry((a.min(b), a.max(b))).or_default().push((id, i));
            }
        }

        let mut faces = Vec::new();
        let mut face_of_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for id in 0..elements.len() {
            let k = elements[id].vertices.len();
            for i in 0..k {
                let a = elements[id].vertices[i];
                let b = elements[id].vertices[(i + 1) % k];
                let key = (a.min(b), a.max(b));
                if let Some(&f) = face_of_edge.get(&key) {
                    elements[id].faces[i] = f;
                    continue;
                }
                let face_id = faces.len();
                let users = &incidence[&key];
                let face = match users.as_slice() {
                    [_] => {
                        let class = match elements[id].region {
                            Region::Elastic => FaceClass::BoundaryElastic,
                            Region::Poro => FaceClass::BoundaryPoro,
                        };
                        make_face(&vertices, [a, b], id, None, class)
                    }
                    [(e0, i0), (e1, i1)] => {
                        let (e0, e1) = (*e0, *e1);
                        let v0 = elements[e0].vertices[*i0];
                        let v1 = elements[e1].vertices[*i1];
                        if v0 == v1 {
                            return Err(MeshError::Face {
                                face: face_id,
                                a,
                                b,
                                message: format!(
                                    "elements {e0} and {e1} traverse it in the same direction"
                                ),
                            });
                        }
                        let (r0, r1) = (elements[e0].region, elements[e1].region);
                        let (owner, other, class) = if r0 != r1 {
                            if r0 == Region::Poro {
                                (e0, e1, FaceClass::Interface)
                            } else {
                                (e1, e0, FaceClass::Interface)
                            }
                        } else {
                            let class = match r0 {
                                Region::Elastic => FaceClass::InteriorElastic,
                                Region::Poro => FaceClass::InteriorPoro,
                            };
                            (e0.min(e1), e0.max(e1), class)
                        };
                        let ends = if owner == e0 {
                            [v0, elements[e0].vertices[(*i0 + 1) % elements[e0].vertices.len()]]
                        } else {
                            [v1, elements[e1].vertices[(*i1 + 1) % elements[e1].vertices.len()]]
                        };
                        make_face(&vertices, ends, owner, Some(other), class)
                    }
                    _ => {
                        return Err(MeshError::Face {
                            face: face_id,
                            a,
                            b,
                            message: format!("shared by {} elements", users.len()),
                        })
                    }
                };
                face_of_edge.insert(key, face_id);
                elements[id].faces[i] = face_id;
                faces.push(face);
            }
        }

        check_conformity(&vertices, &faces, scale)?;
        check_connected_vertices(&vertices, &elements)?;

        let subtriangulations = elements
            .iter()
            .map(|el| {
                let poly: Vec<Point> = el.vertices.iter().map(|&v| vertices[v]).collect();
                SubTriangulation::of_polygon(&poly, el.centroid)
            })
            .collect();

        Ok(PolyMesh { vertices, elements, faces, subtriangulations, bbox })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Element {
        &self.elements[id]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn subtriangulation(&self, element: usize) -> &SubTriangulation {
        &self.subtriangulations[element]
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn polygon(&self, element: usize) -> Vec<Point> {
        self.elements[element].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn face_points(&self, face: usize) -> [Point; 2] {
        let f = &self.faces[face];
        [self.vertices[f.vertices[0]], self.vertices[f.vertices[1]]]
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    pub fn region_area(&self, region: Region) -> f64 {
        self.elements.iter().filter(|e| e.region == region).map(|e| e.area).sum()
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).fold(0.0, f64::max)
    }

    pub fn mean_diameter(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).sum::<f64>() / self.elements.len() as f64
    }

    pub fn count_class(&self, class: FaceClass) -> usize {
        self.faces.iter().filter(|f| f.class == class).count()
    }

    /// Finds the element containing `p` by winding number.
    pub fn locate(&self, p: Point) -> Location {
        for (id, el) in self.elements.iter().enumerate() {
            let tol = 1e-9 * el.diameter;
            if !el.bbox.contains(p, tol) {
                continue;
            }
            let poly = self.polygon(id);
            let k = poly.len();
            if (0..k).any(|i| geometry::segment_distance(p, poly[i], poly[(i + 1) % k]) <= tol) {
                return Location::OnBoundary(id);
            }
            if geometry::winding_number(&poly, p) != 0 {
                return Location::Inside(id);
            }
        }
        Location::Outside
    }

    /// Sum over faces of the outward normal times face length, per element.
    pub fn normal_closure(&self, element: usize) -> Point {
        let mut s = [0.0, 0.0];
        for &f in &self.elements[element].faces {
            let face = &self.faces[f];
            let w = face.sign_for(element) * face.length;
            s[0] += w * face.normal[0];
            s[1] += w * face.normal[1];
        }
        s
    }
}

fn build_element(
    id: usize,
    region: Region,
    loop_: Vec<usize>,
    vertices: &[Point],
    scale: f64,
) -> Result<Element, MeshError> {
    let err = |message: String| MeshError::Element { element: id, message };
    let k = loop_.len();
    if k < 3 {
        return Err(err(format!("has {k} vertices, need at least 3")));
    }
    if let Some(&v) = loop_.iter().find(|&&v| v >= vertices.len()) {
        return Err(err(format!("references missing vertex {v} (mesh has {})", vertices.len())));
    }
    let mut sorted = loop_.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(err("repeats a vertex".into()));
    }
    let poly: Vec<Point> = loop_.iter().map(|&v| vertices[v]).collect();
    let area = geometry::signed_area(&poly);
    if area <= 1e-14 * scale * scale {
        return Err(err(if area < 0.0 {
            "is oriented clockwise".into()
        } else {
            "has zero area".into()
        }));
    }
    for i in 0..k {
        for j in i + 1..k {
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            if adjacent {
                continue;
            }
            if geometry::segments_intersect(poly[i], poly[(i + 1) % k], poly[j], poly[(j + 1) % k]) {
                return Err(err(format!("edges {i} and {j} intersect")));
            }
        }
    }
    Ok(Element {
        region,
        faces: vec![usize::MAX; k],
        area,
        centroid: geometry::centroid(&poly),
        diameter: geometry::diameter(&poly),
        bbox: BoundingBox::of(&poly),
        vertices: loop_,
    })
}

fn make_face(
    vertices: &[Point],
    ends: [usize; 2],
    owner: usize,
    neighbor: Option<usize>,
    class: FaceClass,
) -> Face {
    let d = geometry::sub(vertices[ends[1]], vertices[ends[0]]);
    let length = geometry::norm(d);
    Face {
        vertices: ends,
        owner,
        neighbor,
        class,
        normal: [d[1] / length, -d[0] / length],
        length,
    }
}

/// Rejects hanging vertices: a mesh vertex lying inside a boundary face means
/// two elements meet along a partially shared edge.
fn check_conformity(vertices: &[Point], faces: &[Face], scale: f64) -> Result<(), MeshError> {
    let tol = 1e-10 * scale;
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| vertices[a][0].total_cmp(&vertices[b][0]));
    let xs: Vec<f64> = order.iter().map(|&v| vertices[v][0]).collect();
    for (id, f) in faces.iter().enumerate() {
        if !f.class.is_boundary() {
            continue;
        }
        let (a, b) = (vertices[f.vertices[0]], vertices[f.vertices[1]]);
        let lo = xs.partition_point(|&x| x < a[0].min(b[0]) - tol);
        let hi = xs.partition_point(|&x| x <= a[0].max(b[0]) + tol);
        for &v in &order[lo..hi] {
            if v == f.vertices[0] || v == f.vertices[1] {
                continue;
            }
            if geometry::segment_distance(vertices[v], a, b) <= tol {
                return Err(MeshError::Face {
                    face: id,
                    a: f.vertices[0],
                    b: f.vertices[1],
                    message: format!("vertex {v} hangs on this face (non-conforming mesh)"),
                });
            }
        }
    }
    Ok(())
}

fn check_connected_vertices(vertices: &[Point], elements: &[Element]) -> Result<(), MeshError> {
    let mut used = vec![false; vertices.len()];
    for el in elements {
        for &v in &el.vertices {
            used[v] = true;
        }
    }
    match used.iter().position(|u| !u) {
        Some(vertex) => Err(MeshError::UnusedVertex { vertex }),
        None => Ok(()),
    }
}
