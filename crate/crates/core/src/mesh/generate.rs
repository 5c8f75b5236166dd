use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MeshError, PolyMesh, Region};
use crate::geometry::{self, Point};

const LLOYD_ITERATIONS: usize = 20;

/// Axis-aligned rectangle carrying a region tag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRect {
    pub min: Point,
    pub max: Point,
    pub region: Region,
}

impl RegionRect {
    pub fn new(min: Point, max: Point, region: Region) -> Self {
        RegionRect { min, max, region }
    }

    pub fn area(&self) -> f64 {
        (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
    }

    fn corners(&self) -> Vec<Point> {
        vec![self.min, [self.max[0], self.min[1]], self.max, [self.min[0], self.max[1]]]
    }

    fn on_boundary(&self, p: Point) -> u8 {
        let on_x = p[0] == self.min[0] || p[0] == self.max[0];
        let on_y = p[1] == self.min[1] || p[1] == self.max[1];
        on_x as u8 + on_y as u8
    }
}

/// Lloyd-relaxed Voronoi mesh, generated independently inside every rectangle
/// so region interfaces are resolved by element faces.
///
/// Elements are distributed over rectangles proportionally to their area.
pub fn generate_mesh(rects: &[RegionRect], n_elements: usize, seed: u64) -> Result<PolyMesh, MeshError> {
    for (index, r) in rects.iter().enumerate() {
        if !(r.max[0] > r.min[0] && r.max[1] > r.min[1]) || !r.area().is_finite() {
            return Err(MeshError::DegenerateRectangle { index });
        }
    }
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            let (a, b) = (&rects[i], &rects[j]);
            let w = a.max[0].min(b.max[0]) - a.min[0].max(b.min[0]);
            let h = a.max[1].min(b.max[1]) - a.min[1].max(b.min[1]);
            if w > 0.0 && h > 0.0 {
                return Err(MeshError::OverlappingRectangles { first: i, second: j });
            }
        }
    }
    if rects.is_empty() {
        return Err(MeshError::Empty);
    }
    let counts = allocate(rects, n_elements)?;

    let mut cells: Vec<(usize, Vec<Point>)> = Vec::with_capacity(n_elements);
    for (index, (rect, &count)) in rects.iter().zip(&counts).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut seeds: Vec<Point> = (0..count)
            .map(|_| {
                [
                    rng.gen_range(rect.min[0]..rect.max[0]),
                    rng.gen_range(rect.min[1]..rect.max[1]),
                ]
            })
            .collect();
        for _ in 0..LLOYD_ITERATIONS {
            seeds = voronoi_cells(rect, &seeds).iter().map(|c| geometry::centroid(c)).collect();
        }
        cells.extend(voronoi_cells(rect, &seeds).into_iter().map(|c| (index, c)));
    }
    weld(rects, cells)
}

fn allocate(rects: &[RegionRect], n_elements: usize) -> Result<Vec<usize>, MeshError> {
    let total: f64 = rects.iter().map(|r| r.area()).sum();
    let ideal: Vec<f64> = rects.iter().map(|r| n_elements as f64 * r.area() / total).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| (ideal[b] - ideal[b].floor()).total_cmp(&(ideal[a] - ideal[a].floor())).then(a.cmp(&b)));
    let missing = n_elements - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    match counts.iter().position(|&c| c == 0) {
        Some(index) => Err(MeshError::TooFewElements { requested: n_elements, index, assigned: 0 }),
        None => Ok(counts),
    }
}

/// Voronoi cells of `seeds` restricted to `rect`, by successive half-plane
/// clipping.
fn voronoi_cells(rect: &RegionRect, seeds: &[Point]) -> Vec<Vec<Point>> {
    let mut others: Vec<(f64, usize)> = Vec::with_capacity(seeds.len());
    seeds
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            others.clear();
            others.extend(
                seeds.iter().enumerate().filter(|&(j, _)| j != i).map(|(j, &t)| (geometry::distance(s, t), j)),
            );
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut cell = rect.corners();
            for &(d, j) in &others {
                let reach = cell.iter().map(|&v| geometry::distance(s, v)).fold(0.0, f64::max);
                if 0.5 * d > reach {
                    break;
                }
                cell = clip_half_plane(&cell, s, seeds[j]);
            }
            cell
        })
        .collect()
}

/// Keeps the part of the convex polygon closer to `keep` than to `other`.
fn clip_half_plane(poly: &[Point], keep: Point, other: Point) -> Vec<Point> {
    let mid = geometry::scale(geometry::add(keep, other), 0.5);
    let dir = geometry::sub(other, keep);
    let side = |p: Point| geometry::dot(geometry::sub(p, mid), dir);
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (dp, dq) = (side(p), side(q));
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            // Written so an axis-aligned edge keeps its constant coordinate exactly.
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Merges coincident cell vertices and inserts the vertices that neighbouring
/// rectangles place on shared rectangle edges.
fn weld(rects: &[RegionRect], cells: Vec<(usize, Vec<Point>)>) -> Result<PolyMesh, MeshError> {
    let mut points: Vec<Point> = Vec::new();
    let mut priority: Vec<u8> = Vec::new();
    let mut owner: Vec<(usize, usize)> = Vec::new();
    for (c, (rect, cell)) in cells.iter().enumerate() {
        for (k, &p) in cell.iter().enumerate() {
            points.push(p);
            priority.push(rects[*rect].on_boundary(p));
            owner.push((c, k));
        }
    }
    let lo = rects.iter().map(|r| r.min).fold([f64::INFINITY; 2], |a, b| [a[0].min(b[0]), a[1].min(b[1])]);
    let hi = rects.iter().map(|r| r.max).fold([f64::NEG_INFINITY; 2], |a, b| [a[0].max(b[0]), a[1].max(b[1])]);
    let tol = 1e-9 * geometry::distance(lo, hi);

    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if points[j][0] - points[i][0] > tol {
                break;
            }
            if geometry::distance(points[i], points[j]) <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    // Representative: highest boundary priority, then lowest index.
    let mut best: HashMap<usize, usize> = HashMap::new();
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        let entry = best.entry(root).or_insert(i);
        if priority[i] > priority[*entry] {
            *entry = i;
        }
    }
    let mut vertex_of_root: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut index_of_point = vec![0usize; points.len()];
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        let v = *vertex_of_root.entry(root).or_insert_with(|| {
            vertices.push(points[best[&root]]);
            vertices.len() - 1
        });
        index_of_point[i] = v;
    }

    let mut by_x: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut by_y: HashMap<u64, Vec<usize>> = HashMap::new();
    for (v, p) in vertices.iter().enumerate() {
        by_x.entry(p[0].to_bits()).or_default().push(v);
        by_y.entry(p[1].to_bits()).or_default().push(v);
    }

    let mut polygons = Vec::with_capacity(cells.len());
    let mut offset = 0;
    for (rect_id, cell) in &cells {
        let rect = &rects[*rect_id];
        let mut loop_: Vec<usize> = index_of_point[offset..offset + cell.len()].to_vec();
        offset += cell.len();
        loop_.dedup();
        while loop_.len() > 1 && loop_.first() == loop_.last() {
            loop_.pop();
        }
        let mut full = Vec::with_capacity(loop_.len() + 4);
        for i in 0..loop_.len() {
            let (a, b) = (loop_[i], loop_[(i + 1) % loop_.len()]);
            full.push(a);
            let (pa, pb) = (vertices[a], vertices[b]);
            let (axis, table) = if pa[0] == pb[0] && (pa[0] == rect.min[0] || pa[0] == rect.max[0]) {
                (1, &by_x)
            } else if pa[1] == pb[1] && (pa[1] == rect.min[1] || pa[1] == rect.max[1]) {
                (0, &by_y)
            } else {
                continue;
            };
            let key = pa[1 - axis].to_bits();
            let (s0, s1) = (pa[axis], pb[axis]);
            let mut between: Vec<usize> = table[&key]
                .iter()
                .copied()
                .filter(|&v| {
                    let s = vertices[v][axis];
                    v != a && v != b && s > s0.min(s1) && s < s0.max(s1)
                })
                .collect();
            between.sort_by(|&u, &w| {
                let (su, sw) = ((vertices[u][axis] - s0).abs(), (vertices[w][axis] - s0).abs());
                su.total_cmp(&sw)
            });
            full.extend(between);
        }
        polygons.push((rect.region, full));
    }
    PolyMesh::from_polygons(vertices, polygons)
}
