//! Open-loop motion planning for the rod from a flat-output trajectory.
//!
//! The reference is a Gevrey step `y(t) = θ_0 + (θ_1 - θ_0) Φ(t/T)` built from
//! the bump `exp(-(τ(1-τ))^{-σ})`. The control is `cosh(a√∂_t) y`, whose even
//! series only involves integer time derivatives: `Σ_j a^{2j} y^{(j)} / (2j)!`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coshbasis::CoshPoly;
use crate::error::{Error, Result};
use crate::numeric::NumericMode;
use crate::rod::{RodModel, StencilSign};
use crate::series::{expand, OperatorSeries};

/// Stability constant of the explicit four-stage integrator: `dt <= 0.25/q²`.
pub const RK4_STABILITY: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreySpec {
    pub sigma: f64,
    pub t_final: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl GevreySpec {
    pub fn new(sigma: f64, t_final: f64, theta_start: f64, theta_end: f64) -> Result<Self> {
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sigma must exceed 1 (Gevrey order below 2), got {sigma}"
            )));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidInput(format!(
                "transfer time must be positive, got {t_final}"
            )));
        }
        Ok(Self {
            sigma,
            t_final,
            theta_start,
            theta_end,
        })
    }

    /// Gevrey order `1 + 1/σ`.
    pub fn gevrey_order(&self) -> f64 {
        1.0 + 1.0 / self.sigma
    }

    fn bump(&self, tau: f64) -> f64 {
        if tau <= 0.0 || tau >= 1.0 {
            0.0
        } else {
            (-(tau * (1.0 - tau)).powf(-self.sigma)).exp()
        }
    }

    /// `∫_0^upper` of the bump, to a tolerance relative to the result.
    fn integral(&self, upper: f64) -> f64 {
        let f = |t: f64| self.bump(t);
        let rough = quadrature::integrate(f, 0.0, upper, 1e-6 * self.bump(0.5)).integral;
        if rough <= 0.0 {
            return 0.0;
        }
        quadrature::integrate(f, 0.0, upper, 1e-15 * rough).integral
    }

    /// Normalized primitive `Φ(τ)`, evaluated from the nearer end.
    fn primitive(&self, tau: f64, norm: f64) -> f64 {
        if tau <= 0.5 {
            self.integral(tau) / norm
        } else {
            1.0 - self.integral(1.0 - tau) / norm
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeJet {
    pub t: f64,
    /// `y(t), y'(t), ..., y^{(J)}(t)`.
    pub values: Vec<f64>,
}

impl DerivativeJet {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
}

/// Truncated Taylor series helpers on coefficient vectors.
fn series_log(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut l = vec![0.0; n];
    l[0] = g[0].ln();
    for k in 1..n {
        let s: f64 = (1..k).map(|j| j as f64 * l[j] * g[k - j]).sum();
        l[k] = (g[k] - s / k as f64) / g[0];
    }
    l
}

fn series_exp(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut e = vec![0.0; n];
    e[0] = p[0].exp();
    for k in 1..n {
        let s: f64 = (1..=k).map(|j| j as f64 * p[j] * e[k - j]).sum();
        e[k] = s / k as f64;
    }
    e
}

/// Taylor coefficients of the bump at `tau`, `len` of them.
fn bump_taylor(tau: f64, sigma: f64, len: usize) -> Vec<f64> {
    let mut g = vec![0.0; len.max(3)];
    g[0] = tau * (1.0 - tau);
    g[1] = 1.0 - 2.0 * tau;
    g[2] = -1.0;
    g.truncate(len);
    let neg_pow: Vec<f64> = series_log(&g).iter().map(|x| -sigma * x).collect();
    let inner: Vec<f64> = series_exp(&neg_pow).iter().map(|x| -x).collect();
    series_exp(&inner)
}

/// Context caching the normalizing integral of the bump.
#[derive(Debug, Clone, Copy)]
pub struct GevreyTrajectory {
    pub spec: GevreySpec,
    norm: f64,
}

impl GevreyTrajectory {
    pub fn new(spec: GevreySpec) -> Self {
        Self {
            spec,
            norm: spec.integral(1.0),
        }
    }

    /// `y` and its first `order` derivatives at `t`.
    pub fn jet(&self, t: f64, order: usize) -> DerivativeJet {
        let s = &self.spec;
        let mut values = vec![0.0; order + 1];
        let tau = t / s.t_final;
        if tau <= 0.0 {
            values[0] = s.theta_start;
            return DerivativeJet { t, values };
        }
        if tau >= 1.0 {
            values[0] = s.theta_end;
            return DerivativeJet { t, values };
        }
        let delta = s.theta_end - s.theta_start;
        values[0] = s.theta_start + delta * s.primitive(tau, self.norm);
        if order > 0 {
            let coeffs = bump_taylor(tau, s.sigma, order);
            let mut factorial = 1.0;
            let mut time_scale = 1.0;
            for m in 1..=order {
                if m > 1 {
                    factorial *= (m - 1) as f64;
                }
                time_scale /= s.t_final;
                values[m] = delta * factorial * coeffs[m - 1] / self.norm * time_scale;
            }
        }
        DerivativeJet { t, values }
    }
}

pub fn gevrey_jet(spec: &GevreySpec, t: f64, order: usize) -> DerivativeJet {
    GevreyTrajectory::new(*spec).jet(t, order)
}

/// `Σ_j σ_j f^{(j)}(t)`.
pub fn apply_operator(s: &OperatorSeries, jet: &DerivativeJet) -> Result<f64> {
    if s.order > jet.order() {
        return Err(Error::OrderMismatch {
            operator: s.order,
            jet: jet.order(),
        });
    }
    Ok((0..=s.order).map(|j| s.coeff_f64(j) * jet.values[j]).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlProfile {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
}

impl ControlProfile {
    /// `points` equally spaced times covering `[0, t_final]`.
    pub fn uniform_grid(t_final: f64, points: usize) -> Vec<f64> {
        let n = points.max(2) - 1;
        (0..=n).map(|i| t_final * i as f64 / n as f64).collect()
    }

    /// Catmull-Rom interpolation, held constant outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let g = &self.grid;
        let last = g.len() - 1;
        if t <= g[0] {
            return self.u[0];
        }
        if t >= g[last] {
            return self.u[last];
        }
        let i = g
            .partition_point(|x| *x <= t)
            .saturating_sub(1)
            .min(last - 1);
        let (t0, t1) = (g[i], g[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (p0, p1) = (self.u[i], self.u[i + 1]);
        let m0 = if i == 0 {
            p1 - p0
        } else {
            (p1 - self.u[i - 1]) * h / (t1 - g[i - 1])
        };
        let m1 = if i + 1 == last {
            p1 - p0
        } else {
            (self.u[i + 2] - p0) * h / (g[i + 2] - t0)
        };
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }

    pub fn constant(grid: Vec<f64>, value: f64) -> Self {
        let u = vec![value; grid.len()];
        Self { grid, u }
    }
}

/// The operator turning the flat output into the control: `cosh(a x)` for a
/// rod heated at its end, `cosh(a x)cosh(b x) = (cosh((a+b)x) + cosh((b-a)x))/2`
/// for a rod heated at distance `a` and `b` from its ends.
pub fn control_operator(a: u64, b: Option<u64>) -> CoshPoly {
    match b {
        None => CoshPoly::from_int_terms([(a, 1)]),
        Some(b) => {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let mut p = CoshPoly::term(a + b, half.clone());
            p.add_term(a.abs_diff(b), half);
            p
        }
    }
}

pub fn synthesize_control(
    a: u64,
    b: Option<u64>,
    spec: &GevreySpec,
    order: usize,
    grid: &[f64],
) -> Result<ControlProfile> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(
            "grid must be nonempty and strictly increasing".into(),
        ));
    }
    let series = expand(
        &control_operator(a, b),
        &BigRational::one(),
        order,
        NumericMode::Exact,
    );
    let traj = GevreyTrajectory::new(*spec);
    let u = grid
        .iter()
        .map(|&t| apply_operator(&series, &traj.jet(t, order)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ControlProfile {
        grid: grid.to_vec(),
        u,
    })
}

/// Sampled node temperatures; `nodes[k][i]` is node `i` at `times[k]`,
/// including the heated node (equal to the input).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub nodes: Vec<Vec<f64>>,
    pub heated: usize,
}

impl Trajectory {
    pub fn final_nodes(&self) -> &[f64] {
        self.nodes.last().expect("trajectory has samples")
    }
}

/// Dissipative system matrices in floating point, whatever the model's sign flag.
struct F64System {
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
}

impl F64System {
    fn new(model: &RodModel) -> Self {
        let factor = match model.sign {
            StencilSign::Laplacian => 1.0,
            StencilSign::Paper => -((model.q * model.q) as f64),
        };
        let to_f = crate::numeric::ratio_to_f64;
        let rows = (0..model.dim())
            .map(|s| {
                model
                    .a_row(s)
                    .iter()
                    .map(|(c, v)| (*c, factor * to_f(v)))
                    .collect()
            })
            .collect();
        let b = model.b_vector().iter().map(|v| factor * to_f(v)).collect();
        Self { rows, b }
    }

    fn rhs(&self, x: &[f64], u: f64, out: &mut [f64]) {
        for ((o, row), b) in out.iter_mut().zip(&self.rows).zip(&self.b) {
            *o = b * u + row.iter().map(|(c, v)| v * x[*c]).sum::<f64>();
        }
    }
}

fn with_heated(model: &RodModel, state: &[f64], u: f64) -> Vec<f64> {
    let mut nodes = Vec::with_capacity(state.len() + 1);
    nodes.extend_from_slice(&state[..model.heated]);
    nodes.push(u);
    nodes.extend_from_slice(&state[model.heated..]);
    nodes
}

/// Integrates `θ' = Aθ + Bu` with classical RK4 over the profile's grid,
/// sampling at every grid time. Steps are shortened so each grid interval
/// holds a whole number of steps no longer than `dt`.
pub fn simulate(
    model: &RodModel,
    profile: &ControlProfile,
    theta_init: &[f64],
    dt: f64,
) -> Result<Trajectory> {
    let bound = RK4_STABILITY / (model.q * model.q) as f64;
    if !(dt > 0.0) || dt > bound {
        return Err(Error::UnstableStep { dt, bound });
    }
    if theta_init.len() != model.dim() {
        return Err(Error::InvalidInput(format!(
            "initial state has {} entries, model has {}",
            theta_init.len(),
            model.dim()
        )));
    }
    let sys = F64System::new(model);
    let n = model.dim();
    let mut x = theta_init.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut times = vec![profile.grid[0]];
    let mut nodes = vec![with_heated(model, &x, profile.eval(profile.grid[0]))];
    for w in profile.grid.windows(2) {
        let steps = ((w[1] - w[0]) / dt).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / steps as f64;
        for s in 0..steps {
            let t = w[0] + s as f64 * h;
            let (u0, um, u1) = (
                profile.eval(t),
                profile.eval(t + h / 2.0),
                profile.eval(t + h),
            );
            sys.rhs(&x, u0, &mut k1);
            axpy(&x, h / 2.0, &k1, &mut tmp);
            sys.rhs(&tmp, um, &mut k2);
            axpy(&x, h / 2.0, &k2, &mut tmp);
            sys.rhs(&tmp, um, &mut k3);
            axpy(&x, h, &k3, &mut tmp);
            sys.rhs(&tmp, u1, &mut k4);
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        times.push(w[1]);
        nodes.push(with_heated(model, &x, profile.eval(w[1])));
    }
    Ok(Trajectory {
        times,
        nodes,
        heated: model.heated,
    })
}

fn axpy(x: &[f64], a: f64, y: &[f64], out: &mut [f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// `max_i |θ_i(T) - θ_end|`, relative to `|θ_end - θ_start|` when that is nonzero.
pub fn transfer_error(traj: &Trajectory, spec: &GevreySpec) -> f64 {
    let k = traj
        .times
        .iter()
        .position(|t| *t >= spec.t_final * (1.0 - 1e-12))
        .unwrap_or(traj.times.len() - 1);
    let worst = traj.nodes[k]
        .iter()
        .map(|v| (v - spec.theta_end).abs())
        .fold(0.0, f64::max);
    let span = (spec.theta_end - spec.theta_start).abs();
    if span > 0.0 {
        worst / span
    } else {
        worst
    }
}

/// `Σ w_i (θ_i - c)²` with trapezoid weights (1/2 at the rod ends), the norm
/// in which the insulated-end stencil is symmetric.
pub fn energy(nodes: &[f64], c: f64) -> f64 {
    let last = nodes.len() - 1;
    nodes
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            w * (v - c) * (v - c)
        })
        .sum()
}

pub fn max_deviation(nodes: &[f64], c: f64) -> f64 {
    nodes.iter().map(|v| (v - c).abs()).fold(0.0, f64::max)
}

/// Initial state vector with every node at `value`.
pub fn uniform_state(model: &RodModel, value: f64) -> Vec<f64> {
    vec![value; model.dim()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::cosh_series;

    fn spec() -> GevreySpec {
        GevreySpec::new(2.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn jet_outside_support() {
        let s = GevreySpec::new(2.0, 2.0, 0.5, 3.0).unwrap();
        assert_eq!(gevrey_jet(&s, -1.0, 3).values, [0.5, 0.0, 0.0, 0.0]);
        assert_eq!(gevrey_jet(&s, 0.0, 2).values, [0.5, 0.0, 0.0]);
        assert_eq!(gevrey_jet(&s, 2.5, 2).values, [3.0, 0.0, 0.0]);
    }

    #[test]
    fn jet_is_symmetric() {
        let s = GevreySpec::new(1.5, 2.0, 1.0, 4.0).unwrap();
        let tr = GevreyTrajectory::new(s);
        for t in [0.1, 0.4, 0.77, 1.0, 1.3] {
            let sum = tr.jet(t, 0).values[0] + tr.jet(2.0 - t, 0).values[0];
            assert!((sum - 5.0).abs() < 1e-10, "t={t}: {sum}");
        }
    }

    #[test]
    fn jet_matches_finite_differences() {
        let tr = GevreyTrajectory::new(spec());
        let h = 1e-4;
        let central = |t: f64, m: usize, h: f64| {
            (tr.jet(t + h, m).values[m] - tr.jet(t - h, m).values[m]) / (2.0 * h)
        };
        for t in [0.25, 0.35, 0.5, 0.62, 0.75] {
            let centre = tr.jet(t, 4).values;
            for m in 1..=4 {
                let fd = (4.0 * central(t, m - 1, h / 2.0) - central(t, m - 1, h)) / 3.0;
                let rel = (fd - centre[m]).abs() / centre[m].abs().max(1e-300);
                assert!(rel < 1e-6, "t={t} m={m}: {} vs {fd}", centre[m]);
            }
        }
    }

    #[test]
    fn operator_application() {
        let jet = DerivativeJet {
            t: 0.0,
            values: vec![2.0, 3.0, 5.0],
        };
        let id = cosh_series(&BigRational::from_integer(0.into()), 2, NumericMode::Exact);
        assert_eq!(apply_operator(&id, &jet).unwrap(), 2.0);
        let c = cosh_series(&BigRational::from_integer(1.into()), 2, NumericMode::Exact);
        assert_eq!(apply_operator(&c, &jet).unwrap(), 2.0 + 1.5 + 5.0 / 24.0);
        let constant = DerivativeJet {
            t: 0.0,
            values: vec![7.0, 0.0, 0.0],
        };
        assert_eq!(apply_operator(&c, &constant).unwrap(), 7.0);
        let long = cosh_series(&BigRational::from_integer(1.into()), 5, NumericMode::Exact);
        assert_eq!(
            apply_operator(&long, &jet).unwrap_err(),
            Error::OrderMismatch {
                operator: 5,
                jet: 2
            }
        );
    }

    #[test]
    fn two_sided_operator() {
        let p = control_operator(1, Some(2));
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(p, CoshPoly::from_terms([(3, half.clone()), (1, half)]));
    }

    #[test]
    fn control_edge_cases() {
        let flat = GevreySpec::new(2.0, 1.0, 0.3, 0.3).unwrap();
        let grid = ControlProfile::uniform_grid(1.0, 11);
        let u = synthesize_control(1, None, &flat, 10, &grid).unwrap();
        assert!(u.u.iter().all(|v| (v - 0.3).abs() < 1e-15));

        let s = spec();
        let u0 = synthesize_control(1, None, &s, 0, &grid).unwrap();
        let tr = GevreyTrajectory::new(s);
        for (t, v) in grid.iter().zip(&u0.u) {
            assert_eq!(*v, tr.jet(*t, 0).values[0]);
        }
    }

    #[test]
    fn interpolation_reproduces_grid_values() {
        let grid = ControlProfile::uniform_grid(1.0, 5);
        let p = ControlProfile {
            grid: grid.clone(),
            u: vec![0.0, 1.0, 4.0, 9.0, 16.0],
        };
        for (t, u) in grid.iter().zip(&p.u) {
            assert!((p.eval(*t) - u).abs() < 1e-12);
        }
        assert!((p.eval(0.375) - 2.25).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_is_preserved() {
        let model = RodModel::new(1, 2, 4, StencilSign::Laplacian).unwrap();
        let p = ControlProfile::constant(ControlProfile::uniform_grid(0.5, 11), 0.7);
        let traj = simulate(&model, &p, &uniform_state(&model, 0.7), 0.01).unwrap();
        for nodes in &traj.nodes {
            assert!(max_deviation(nodes, 0.7) < 1e-12);
        }
    }

    #[test]
    fn step_bound_is_enforced() {
        let model = RodModel::new(1, 2, 4, StencilSign::Laplacian).unwrap();
        let p = ControlProfile::constant(ControlProfile::uniform_grid(0.1, 3), 0.0);
        let err = simulate(&model, &p, &uniform_state(&model, 0.0), 0.02).unwrap_err();
        assert_eq!(
            err,
            Error::UnstableStep {
                dt: 0.02,
                bound: 0.25 / 16.0
            }
        );
    }

    #[test]
    fn scaled_sign_simulates_like_laplacian() {
        let lap = RodModel::new(1, 2, 3, StencilSign::Laplacian).unwrap();
        let pap = RodModel::new(1, 2, 3, StencilSign::Paper).unwrap();
        let p = ControlProfile::constant(ControlProfile::uniform_grid(0.2, 5), 1.0);
        let x0 = uniform_state(&lap, 0.0);
        let t1 = simulate(&lap, &p, &x0, 0.01).unwrap();
        let t2 = simulate(&pap, &p, &x0, 0.01).unwrap();
        assert_eq!(t1, t2);
    }
}
