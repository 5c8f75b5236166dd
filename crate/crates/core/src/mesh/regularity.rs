use super::{FaceClass, PolyMesh};

#[derive(Clone, Debug)]
pub struct ElementRegularity {
    /// max over faces of h_K |F| / (2 |S_F|), S_F the sub-triangle on F.
    pub face_ratio: f64,
    pub diameter: f64,
    pub area: f64,
}

/// Shape diagnostics of a mesh; purely informative.
#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub elements: Vec<ElementRegularity>,
    pub max_face_ratio: f64,
    /// Largest ratio of neighbouring element diameters.
    pub max_h_ratio: f64,
    /// Largest ratio of neighbouring polynomial degrees (1 for uniform degree).
    pub max_p_ratio: f64,
}

pub fn check_regularity(mesh: &PolyMesh) -> RegularityReport {
    let degrees = vec![1; mesh.n_elements()];
    check_regularity_with_degrees(mesh, &degrees)
}

pub fn check_regularity_with_degrees(mesh: &PolyMesh, degrees: &[usize]) -> RegularityReport {
    let mut elements = Vec::with_capacity(mesh.n_elements());
    for (id, el) in mesh.elements().iter().enumerate() {
        let st = mesh.subtriangulation(id);
        let mut face_ratio: f64 = 0.0;
        for (i, &f) in el.faces.iter().enumerate() {
            let tri = st.triangle_area(st.edge_triangle[i]);
            face_ratio = face_ratio.max(el.diameter * mesh.face(f).length / (2.0 * tri));
        }
        elements.push(ElementRegularity { face_ratio, diameter: el.diameter, area: el.area });
    }
    let mut max_h_ratio: f64 = 1.0;
    let mut max_p_ratio: f64 = 1.0;
    for f in mesh.faces() {
        if matches!(f.class, FaceClass::BoundaryElastic | FaceClass::BoundaryPoro) {
            continue;
        }
        let (a, b) = (f.owner, f.neighbor.expect("interior face has a neighbour"));
        let (ha, hb) = (mesh.element(a).diameter, mesh.element(b).diameter);
        max_h_ratio = max_h_ratio.max(ha / hb).max(hb / ha);
        let (pa, pb) = (degrees[a] as f64, degrees[b] as f64);
        max_p_ratio = max_p_ratio.max(pa / pb).max(pb / pa);
    }
    let max_face_ratio = elements.iter().map(|e| e.face_ratio).fold(0.0, f64::max);
    if !max_face_ratio.is_finite() {
        log::warn!("mesh has a degenerate sub-triangle (infinite regularity ratio)");
    }
    RegularityReport { elements, max_face_ratio, max_h_ratio, max_p_ratio }
}
