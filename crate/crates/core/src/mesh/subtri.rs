use crate::geometry::{self, Point};

/// Non-overlapping triangles covering one polygon.
#[derive(Clone, Debug)]
pub struct SubTriangulation {
    pub triangles: Vec<[Point; 3]>,
    /// For each polygon edge `i` (from vertex `i` to `i + 1`), the triangle
    /// having it as an edge.
    pub edge_triangle: Vec<usize>,
}

impl SubTriangulation {
    /// Fans from `center` when every fan triangle is positively oriented,
    /// otherwise clips ears.
    pub fn of_polygon(poly: &[Point], center: Point) -> Self {
        let k = poly.len();
        let area = geometry::signed_area(poly);
        let star = (0..k).all(|i| geometry::orient(center, poly[i], poly[(i + 1) % k]) > 1e-12 * area);
        if star {
            SubTriangulation {
                triangles: (0..k).map(|i| [center, poly[i], poly[(i + 1) % k]]).collect(),
                edge_triangle: (0..k).collect(),
            }
        } else {
            ear_clip(poly)
        }
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| 0.5 * geometry::orient(t[0], t[1], t[2])).sum()
    }

    pub fn triangle_area(&self, index: usize) -> f64 {
        let t = &self.triangles[index];
        0.5 * geometry::orient(t[0], t[1], t[2])
    }
}

fn ear_clip(poly: &[Point]) -> SubTriangulation {
    let k = poly.len();
    let mut remaining: Vec<usize> = (0..k).collect();
    let mut tris: Vec<[usize; 3]> = Vec::with_capacity(k - 2);
    while remaining.len() > 3 {
        let n = remaining.len();
        let mut best: Option<(usize, f64)> = None;
        let mut found = None;
        for j in 0..n {
            let (a, b, c) = (remaining[(j + n - 1) % n], remaining[j], remaining[(j + 1) % n]);
            let turn = geometry::orient(poly[a], poly[b], poly[c]);
            if turn <= 0.0 {
                continue;
            }
            if best.is_none_or(|(_, t)| turn > t) {
                best = Some((j, turn));
            }
            let blocked = remaining.iter().any(|&v| {
                v != a && v != b && v != c && in_closed_triangle(poly[v], poly[a], poly[b], poly[c])
            });
            if !blocked {
                found = Some(j);
                break;
            }
        }
        // Round-off can hide every ear on nearly degenerate input; the most
        // convex corner is the least bad choice then.
        let j = found.or(best.map(|(j, _)| j)).unwrap_or(0);
        let n = remaining.len();
        tris.push([remaining[(j + n - 1) % n], remaining[j], remaining[(j + 1) % n]]);
        remaining.remove(j);
    }
    tris.push([remaining[0], remaining[1], remaining[2]]);

    let mut edge_triangle = vec![usize::MAX; k];
    for (t, tri) in tris.iter().enumerate() {
        for s in 0..3 {
            let (a, b) = (tri[s], tri[(s + 1) % 3]);
            if b == (a + 1) % k {
                edge_triangle[a] = t;
            }
        }
    }
    SubTriangulation {
        triangles: tris.iter().map(|t| [poly[t[0]], poly[t[1]], poly[t[2]]]).collect(),
        edge_triangle,
    }
}

fn in_closed_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    geometry::orient(a, b, p) >= 0.0 && geometry::orient(b, c, p) >= 0.0 && geometry::orient(c, a, p) >= 0.0
}
