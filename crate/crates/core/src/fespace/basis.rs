use crate::geometry::{BoundingBox, Point};

/// Tensor Legendre polynomials of total degree <= p, scaled to an element's
/// bounding box and orthonormal on it.
#[derive(Clone, Debug)]
pub struct ScaledLegendre {
    degree: usize,
    center: Point,
    half: [f64; 2],
    /// (i, j) exponents, ordered by total degree.
    modes: Vec<(usize, usize)>,
    norms: Vec<f64>,
}

/// Number of scalar modes of total degree <= p.
pub fn scalar_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

impl ScaledLegendre {
    pub fn new(degree: usize, bbox: &BoundingBox) -> Self {
        let mut modes = Vec::with_capacity(scalar_dim(degree));
        for total in 0..=degree {
            for i in (0..=total).rev() {
                modes.push((i, total - i));
            }
        }
        let (w, h) = (bbox.width(), bbox.height());
        let norms = modes
            .iter()
            .map(|&(i, j)| (((2 * i + 1) * (2 * j + 1)) as f64 / (w * h)).sqrt())
            .collect();
        ScaledLegendre { degree, center: bbox.center(), half: [0.5 * w, 0.5 * h], modes, norms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Values and Cartesian gradients of every mode at `x`.
    pub fn eval(&self, x: Point, values: &mut [f64], grads: &mut [[f64; 2]]) {
        let xi = (x[0] - self.center[0]) / self.half[0];
        let eta = (x[1] - self.center[1]) / self.half[1];
        let p = self.degree;
        let mut lx = [0.0; 16];
        let mut dx = [0.0; 16];
        let mut ly = [0.0; 16];
        let mut dy = [0.0; 16];
        assert!(p < 16, "degree {p} not supported");
        legendre_table(xi, p, &mut lx, &mut dx);
        legendre_table(eta, p, &mut ly, &mut dy);
        for (k, &(i, j)) in self.modes.iter().enumerate() {
            let c = self.norms[k];
            values[k] = c * lx[i] * ly[j];
            grads[k] = [c * dx[i] * ly[j] / self.half[0], c * lx[i] * dy[j] / self.half[1]];
        }
    }

    pub fn values(&self, x: Point) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        let mut g = vec![[0.0; 2]; self.len()];
        self.eval(x, &mut v, &mut g);
        v
    }
}

fn legendre_table(x: f64, p: usize, l: &mut [f64], d: &mut [f64]) {
    l[0] = 1.0;
    d[0] = 0.0;
    if p == 0 {
        return;
    }
    l[1] = x;
    d[1] = 1.0;
    for n in 1..p {
        let nf = n as f64;
        l[n + 1] = ((2.0 * nf + 1.0) * x * l[n] - nf * l[n - 1]) / (nf + 1.0);
        d[n + 1] = d[n - 1] + (2.0 * nf + 1.0) * l[n];
    }
}

/// Basis values and gradients tabulated on a set of points.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_modes: usize,
    /// `values[q * n_modes + i]`
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn new(basis: &ScaledLegendre, points: &[Point]) -> Self {
        let nb = basis.len();
        let mut values = vec![0.0; points.len() * nb];
        let mut grads = vec![[0.0; 2]; points.len() * nb];
        for (q, &x) in points.iter().enumerate() {
            basis.eval(x, &mut values[q * nb..(q + 1) * nb], &mut grads[q * nb..(q + 1) * nb]);
        }
        Tabulation { n_modes: nb, values, grads }
    }

    #[inline]
    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.n_modes + i]
    }

    #[inline]
    pub fn grad(&self, q: usize, i: usize) -> [f64; 2] {
        self.grads[q * self.n_modes + i]
    }

    #[inline]
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_modes..(q + 1) * self.n_modes]
    }

    #[inline]
    pub fn grads_at(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_modes..(q + 1) * self.n_modes]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::quadrature::QuadratureRule;

    fn unit_box() -> BoundingBox {
        BoundingBox { min: [0.0, 0.0], max: [2.0, 0.5] }
    }

    #[test]
    fn dimensions() {
        assert_eq!(scalar_dim(2), 6);
        assert_eq!(ScaledLegendre::new(3, &unit_box()).len(), 10);
    }

    #[test]
    fn first_mode_is_constant() {
        let b = ScaledLegendre::new(2, &unit_box());
        let mut v = vec![0.0; 6];
        let mut g = vec![[0.0; 2]; 6];
        for x in [[0.1, 0.2], [1.9, 0.4], [5.0, -3.0]] {
            b.eval(x, &mut v, &mut g);
            assert!((v[0] - 1.0).abs() < 1e-15);
            assert_eq!(g[0], [0.0, 0.0]);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let bbox = BoundingBox { min: [-0.3, 1.0], max: [0.4, 1.5] };
        let b = ScaledLegendre::new(5, &bbox);
        let n = b.len();
        let h = 1e-6 * 0.7;
        let mut v = vec![0.0; n];
        let mut g = vec![[0.0; 2]; n];
        let x = [0.13, 1.21];
        b.eval(x, &mut v, &mut g);
        for axis in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += h;
            xm[axis] -= h;
            let (vp, vm) = (b.values(xp), b.values(xm));
            for k in 0..n {
                let fd = (vp[k] - vm[k]) / (2.0 * h);
                let scale = g[k][axis].abs().max(1.0);
                assert!((fd - g[k][axis]).abs() <= 1e-6 * scale, "mode {k} axis {axis}");
            }
        }
    }

    #[test]
    fn orthonormal_on_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let st = crate::mesh::SubTriangulation::of_polygon(&sq, [0.5, 0.5]);
        let rule = QuadratureRule::polygon(&st, 8);
        let b = ScaledLegendre::new(4, &BoundingBox::of(&sq));
        let tab = Tabulation::new(&b, &rule.points);
        for i in 0..b.len() {
            for j in 0..b.len() {
                let m: f64 = (0..rule.len()).map(|q| rule.weights[q] * tab.value(q, i) * tab.value(q, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m - expect).abs() < 1e-12, "({i},{j}) = {m}");
            }
        }
    }
}
