//! Gauss rules on intervals, triangles and polygons.

use crate::geometry::{self, Point};
use crate::mesh::SubTriangulation;

/// Gauss-Legendre nodes and weights on [-1, 1], exact to degree 2n - 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Lobatto-Legendre nodes and weights on [-1, 1] with `n >= 2` points
/// including both endpoints; exact to degree 2n - 3.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Lobatto rule needs at least two points");
    let order = n - 1;
    let mut nodes = vec![0.0; n];
    for (i, node) in nodes.iter_mut().enumerate() {
        let mut x = -(std::f64::consts::PI * i as f64 / order as f64).cos();
        for _ in 0..100 {
            let (p, _) = legendre_and_derivative(order, x);
            let (q, _) = legendre_and_derivative(order - 1, x);
            // Newton step on (1 - x^2) P'_N written through P_N, P_{N-1}.
            let dx = (x * p - q) / (n as f64 * p);
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        *node = x;
    }
    nodes[0] = -1.0;
    nodes[order] = 1.0;
    for i in 0..n / 2 {
        let s = 0.5 * (nodes[order - i] - nodes[i]);
        nodes[i] = -s;
        nodes[order - i] = s;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre_and_derivative(order, x);
            2.0 / (order as f64 * n as f64 * p * p)
        })
        .collect();
    (nodes, weights)
}

/// P_n(x) and P_n'(x).
pub fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Quadrature points and weights in physical coordinates.
#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// Collapsed (Duffy) tensor Gauss rule on a triangle, exact to `degree`.
    pub fn triangle(tri: &[Point; 3], degree: usize) -> Self {
        let mut rule = QuadratureRule::default();
        rule.push_triangle(tri, degree);
        rule
    }

    fn push_triangle(&mut self, tri: &[Point; 3], degree: usize) {
        let n = (degree + 2).div_ceil(2).max(1);
        let (x, w) = gauss_legendre(n);
        let twice_area = geometry::orient(tri[0], tri[1], tri[2]);
        for i in 0..n {
            let s = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let t = 0.5 * (x[j] + 1.0);
                // (s, t) -> (1 - s) A + s ((1 - t) B + t C); Jacobian 2|T| s.
                let bc = geometry::add(geometry::scale(tri[1], 1.0 - t), geometry::scale(tri[2], t));
                let p = geometry::add(geometry::scale(tri[0], 1.0 - s), geometry::scale(bc, s));
                self.points.push(p);
                self.weights.push(0.25 * w[i] * w[j] * s * twice_area);
            }
        }
    }

    /// Union of triangle rules over a sub-triangulated polygon.
    pub fn polygon(st: &SubTriangulation, degree: usize) -> Self {
        let mut rule = QuadratureRule::default();
        for tri in &st.triangles {
            rule.push_triangle(tri, degree);
        }
        rule
    }

    /// Gauss-Legendre rule with `n` points on the segment `[a, b]`.
    pub fn segment(a: Point, b: Point, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let len = geometry::distance(a, b);
        let d = geometry::sub(b, a);
        QuadratureRule {
            points: x.iter().map(|&s| geometry::add(a, geometry::scale(d, 0.5 * (s + 1.0)))).collect(),
            weights: w.iter().map(|&wi| 0.5 * len * wi).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_integral_1d(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                assert!((q - monomial_integral_1d(k)).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn gauss_lobatto_exactness_and_endpoints() {
        for n in 2..10 {
            let (x, w) = gauss_lobatto(n);
            assert_eq!(x[0], -1.0);
            assert_eq!(x[n - 1], 1.0);
            for k in 0..=(2 * n - 3) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                assert!((q - monomial_integral_1d(k)).abs() < 1e-13, "n={n} k={k}");
            }
        }
        let (x, w) = gauss_lobatto(3);
        assert!((x[1]).abs() < 1e-16);
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-15 && (w[1] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_rule_exactness() {
        // Reference triangle: int x^a y^b = a! b! / (a + b + 2)!
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        for degree in 0..12 {
            let rule = QuadratureRule::triangle(&tri, degree);
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let q = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    let exact = fact(a) * fact(b) / fact(a + b + 2);
                    assert!((q - exact).abs() <= 1e-13 * exact.max(1e-3), "deg {degree} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn polygon_rule_weights_sum_to_area() {
        let hex: Vec<Point> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 3.0;
                [3.0 + t.cos(), -2.0 + 0.5 * t.sin()]
            })
            .collect();
        let st = SubTriangulation::of_polygon(&hex, geometry::centroid(&hex));
        let rule = QuadratureRule::polygon(&st, 6);
        let area = geometry::signed_area(&hex);
        let total: f64 = rule.weights.iter().sum();
        assert!((total / area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_rule() {
        let r = QuadratureRule::segment([1.0, 1.0], [4.0, 5.0], 3);
        assert!((r.weights.iter().sum::<f64>() - 5.0).abs() < 1e-14);
        // int_0^5 s^5 ds along the segment with s the arclength from a.
        let q = r.integrate(|p| ((p[0] - 1.0).hypot(p[1] - 1.0)).powi(5));
        assert!((q - 5f64.powi(6) / 6.0).abs() < 1e-10);
    }
}
