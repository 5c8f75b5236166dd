//! Poro-elastic layer over an elastic half space, excited by an explosive
//! point source, and first-arrival picking at receivers.

use serde::Serialize;

use crate::assembly::{BoundaryCondition, BoundaryConditions, Discretization, FormOptions, MomentSource, PointSourceForcing};
use crate::fespace::FeSpace;
use crate::geometry::Point;
use crate::materials::{ElasticParams, Materials, PoroParams};
use crate::mesh::{generate_mesh, PolyMesh, Region, RegionRect};
use crate::receivers::Receiver;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoLayerCase {
    pub poro: PoroParams,
    pub elastic: ElasticParams,
    /// Side of the square domain `(0, width)²`.
    pub width: f64,
    /// Height of the horizontal interface; the poro-elastic layer is on top.
    pub interface: f64,
    pub source: MomentSource,
    pub receivers: Vec<Receiver>,
}

impl TwoLayerCase {
    /// Inviscid layers; with `viscous` the fluid viscosity and both damping
    /// rates are switched on.
    pub fn new(viscous: bool) -> Self {
        let (eta, zeta) = if viscous { (0.0015, 0.01) } else { (0.0, 0.0) };
        TwoLayerCase {
            poro: PoroParams {
                solid_density: 2200.0,
                fluid_density: 950.0,
                porosity: 0.4,
                tortuosity: 2.0,
                viscosity: eta,
                permeability: 1e-12,
                lambda: 7.2073e9,
                mu: 4.3738e9,
                biot_modulus: 6.8386e9,
                biot_coefficient: 0.0290,
                damping: zeta,
            },
            elastic: ElasticParams { density: 2650.0, lambda: 1.8121e9, mu: 1.5038e9, damping: zeta },
            width: 4800.0,
            interface: 2400.0,
            source: MomentSource {
                position: [1600.0, 2900.0],
                moment: 1.0,
                peak_frequency: 5.0,
                delay: 0.3,
                region: Some(Region::Poro),
            },
            receivers: vec![
                Receiver { name: "r1".into(), position: [2000.0, 2934.0] },
                Receiver { name: "r2".into(), position: [2000.0, 1867.0] },
            ],
        }
    }

    pub fn regions(&self) -> [RegionRect; 2] {
        [
            RegionRect::new([0.0, self.interface], [self.width, self.width], Region::Poro),
            RegionRect::new([0.0, 0.0], [self.width, self.interface], Region::Elastic),
        ]
    }

    pub fn materials(&self) -> crate::Result<Materials> {
        Ok(Materials::new(Some(self.elastic), Some(self.poro))?)
    }

    /// Mesh with about `(width / h)²` elements.
    pub fn mesh(&self, h: f64, seed: u64) -> crate::Result<PolyMesh> {
        let n = ((self.width / h).powi(2)).round().max(2.0) as usize;
        Ok(generate_mesh(&self.regions(), n, seed)?)
    }

    /// Free surface on top, absorbing elsewhere.
    pub fn boundary() -> BoundaryConditions {
        BoundaryConditions { top: BoundaryCondition::FreeSurface, ..BoundaryConditions::uniform(BoundaryCondition::Absorbing) }
    }

    pub fn discretization(&self, mesh: PolyMesh, degree: usize) -> crate::Result<Discretization> {
        let space = FeSpace::new(mesh, degree, degree)?;
        let options = FormOptions { delta: 1.0, ..FormOptions::default() };
        Ok(Discretization::new(space, self.materials()?, Self::boundary(), options)?)
    }

    pub fn forcing(&self, disc: &Discretization) -> crate::Result<PointSourceForcing> {
        Ok(PointSourceForcing::new(disc, self.source)?)
    }
}

/// Second time derivative of the Ricker wavelet.
pub fn ricker_second_derivative(t: f64, peak_frequency: f64, delay: f64) -> f64 {
    let b = (std::f64::consts::PI * peak_frequency).powi(2);
    let s = (t - delay).powi(2);
    (-6.0 * b + 24.0 * b * b * s - 8.0 * b * b * b * s * s) * (-b * s).exp()
}

/// Radial velocity, up to a positive factor, of the compressional wave of a
/// 2D explosive line source with Ricker time function in a homogeneous
/// medium: `∫₀^∞ S''(t - (r/c) cosh s) cosh s ds`.
pub fn cylindrical_pulse(t: f64, distance: f64, speed: f64, peak_frequency: f64, delay: f64) -> f64 {
    let b = (std::f64::consts::PI * peak_frequency).powi(2);
    // S'' is below 1e-13 of its peak beyond this distance from the delay
    let support = (36.0 / b).sqrt();
    let travel = distance / speed;
    let reach = t - delay + support;
    if reach <= travel {
        return 0.0;
    }
    let s_max = (reach / travel).acosh();
    let n = 4000;
    let ds = s_max / n as f64;
    // composite Simpson
    let f = |s: f64| ricker_second_derivative(t - travel * s.cosh(), peak_frequency, delay) * s.cosh();
    let mut sum = f(0.0) + f(s_max);
    for k in 1..n {
        sum += f(k as f64 * ds) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * ds / 3.0
}

/// [`cylindrical_pulse`] sampled on a uniform grid and interpolated linearly.
#[derive(Clone, Debug)]
pub struct PulseTable {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl PulseTable {
    pub fn new(distance: f64, speed: f64, peak_frequency: f64, delay: f64, end: f64, step: f64) -> Self {
        let n = (end / step).ceil() as usize + 1;
        let values = (0..n).map(|k| cylindrical_pulse(k as f64 * step, distance, speed, peak_frequency, delay)).collect();
        PulseTable { start: 0.0, step, values }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (t - self.start) / self.step;
        if x < 0.0 || x >= (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let k = x.floor() as usize;
        let f = x - k as f64;
        (1.0 - f) * self.values[k] + f * self.values[k + 1]
    }
}

/// Travel time recovered from a recorded trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArrivalPick {
    /// `distance / speed`
    pub expected: f64,
    /// `expected` shifted by the best-correlating lag.
    pub measured: f64,
    /// Normalized correlation at the best lag.
    pub correlation: f64,
}

impl ArrivalPick {
    pub fn relative_error(&self) -> f64 {
        (self.measured - self.expected).abs() / self.expected
    }
}

/// Cross-correlates `trace` (samples at `times` inside `window`) against
/// `reference(t - lag)`, where `reference` already contains the expected
/// travel time, over lags in `[-expected, expected]`.
pub fn pick_arrival(times: &[f64], trace: &[f64], window: (f64, f64), expected: f64, reference: impl Fn(f64) -> f64) -> ArrivalPick {
    let samples: Vec<(f64, f64)> =
        times.iter().zip(trace).filter(|(t, _)| **t >= window.0 && **t <= window.1).map(|(t, v)| (*t, *v)).collect();
    let trace_norm = samples.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    let steps = 2000;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..=2 * steps {
        let lag = expected * (k as f64 / steps as f64 - 1.0);
        let (mut dot, mut norm) = (0.0, 0.0);
        for &(t, v) in &samples {
            let r = reference(t - lag);
            dot += v * r;
            norm += r * r;
        }
        if norm > 0.0 {
            let c = dot / (norm.sqrt() * trace_norm);
            if c > best.0 {
                best = (c, lag);
            }
        }
    }
    ArrivalPick { expected, measured: expected + best.1, correlation: best.0 }
}

/// Distance between two points.
pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::ricker;

    #[test]
    fn second_derivative_matches_finite_differences() {
        let h = 1e-4;
        for t in [0.1, 0.27, 0.3, 0.41, 0.6] {
            let fd = (ricker(t + h, 5.0, 0.3) - 2.0 * ricker(t, 5.0, 0.3) + ricker(t - h, 5.0, 0.3)) / (h * h);
            let exact = ricker_second_derivative(t, 5.0, 0.3);
            assert!((fd - exact).abs() < 1e-4 * 250.0 * 6.0, "t {t}: {fd} vs {exact}");
        }
    }

    #[test]
    fn pulse_is_causal_and_keeps_its_shape_far_away() {
        let c = 3000.0;
        let delay = 0.3;
        // nothing before the front of the wavelet reaches the receiver
        assert_eq!(cylindrical_pulse(0.0, 400.0, c, 5.0, delay), 0.0);
        assert!(cylindrical_pulse(0.3 + 400.0 / c, 400.0, c, 5.0, delay).abs() > 0.0);
        // in the far field the shape only translates and decays like r^-1/2
        let (near, far) = (30_000.0, 60_000.0);
        let shape = |r: f64| -> Vec<f64> {
            (0..300).map(|k| r.sqrt() * cylindrical_pulse(r / c + k as f64 * 2e-3, r, c, 5.0, delay)).collect()
        };
        let (a, b) = (shape(near), shape(far));
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(dot / (na * nb) > 0.999);
        assert!((na / nb - 1.0).abs() < 0.01);
    }

    #[test]
    fn table_interpolates_the_pulse() {
        let table = PulseTable::new(400.0, 3000.0, 5.0, 0.3, 1.0, 1e-4);
        for t in [0.35, 0.4321, 0.5, 0.77] {
            let exact = cylindrical_pulse(t, 400.0, 3000.0, 5.0, 0.3);
            assert!((table.eval(t) - exact).abs() < 1e-3 * 250.0 * 6.0 * 0.05, "t {t}");
        }
        assert_eq!(table.eval(-1.0), 0.0);
    }

    #[test]
    fn picks_a_shifted_copy() {
        let table = PulseTable::new(400.0, 3000.0, 5.0, 0.3, 1.0, 1e-4);
        let reference = |t: f64| table.eval(t);
        let times: Vec<f64> = (0..400).map(|k| k as f64 * 2.5e-3).collect();
        let expected = 400.0 / 3000.0;
        let shift = 0.011;
        let trace: Vec<f64> = times.iter().map(|&t| 2.0 * reference(t - shift)).collect();
        let pick = pick_arrival(&times, &trace, (0.0, 0.8), expected, reference);
        assert!((pick.measured - expected - shift).abs() < 2e-4, "{pick:?}");
        assert!(pick.correlation > 0.999);
    }

    #[test]
    fn table_speeds_are_ordered() {
        let case = TwoLayerCase::new(false);
        let m = case.materials().unwrap();
        let d = m.poro.unwrap().derived;
        assert!(d.fast_p_speed > d.shear_speed && d.shear_speed > d.slow_p_speed);
        assert!((distance(case.source.position, case.receivers[0].position) - 161_156f64.sqrt()).abs() < 1e-12);
    }
}
