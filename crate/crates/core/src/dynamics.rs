//! Time-dependent zeros and poles: the first-order flow
//! `z_j' = -i sum_k g_k/(z_j - z_k) + i z_j^3`, its decoupled second-order
//! form, Hamiltonians and the generating function of the zero/pole map.

use std::fmt;

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{abs_f64, czero, sub};
use crate::locus::separation;
use crate::qes::QesSpectrum;

pub const DYNAMICS_COLLISION_FACTOR: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct DynamicsState {
    /// `(z_j, g_j)`; positive charges are zeros, negative ones poles.
    pub points: Vec<(Complex, i32)>,
    pub t: f64,
    pub phase: Complex,
}

impl DynamicsState {
    pub fn new(points: Vec<(Complex, i32)>, t: f64, prec: u32) -> Result<Self> {
        if points.iter().any(|(_, g)| *g == 0) {
            return Err(Error::InvalidArgument("charges must be nonzero".into()));
        }
        Ok(DynamicsState {
            points,
            t,
            phase: czero(prec),
        })
    }

    pub fn prec(&self) -> u32 {
        self.phase.prec().0
    }

    pub fn locations(&self) -> Vec<Complex> {
        self.points.iter().map(|(z, _)| z.clone()).collect()
    }

    /// `Z - P` (counts of positive and negative charges).
    pub fn charge_balance(&self) -> i64 {
        self.points.iter().map(|(_, g)| g.signum() as i64).sum()
    }

    /// `sum g_j z_j`, which the decoupled equations require to vanish.
    pub fn parity_defect(&self) -> f64 {
        let mut s = czero(self.prec());
        for (z, g) in &self.points {
            s += Complex::with_val(self.prec(), z * *g);
        }
        abs_f64(&s)
    }

    /// Minimum pairwise distance and the threshold `1e-5 max(max |z|, 1)`.
    pub fn separation(&self) -> (f64, f64) {
        pairwise_separation(&self.locations(), DYNAMICS_COLLISION_FACTOR)
    }

    pub fn check_collision(&self) -> Result<()> {
        let (distance, threshold) = self.separation();
        if distance < threshold {
            Err(Error::Collision { distance, threshold })
        } else {
            Ok(())
        }
    }
}

fn pairwise_separation(xs: &[Complex], factor: f64) -> (f64, f64) {
    // the origin is not special for the flow
    let (_, threshold) = separation(xs, factor);
    let mut d = f64::INFINITY;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            d = d.min(abs_f64(&sub(a, b)));
        }
    }
    (d, threshold)
}

fn velocities(zs: &[Complex], gs: &[i32]) -> Result<(Vec<Complex>, Complex)> {
    let prec = zs.first().map(|z| z.prec().0).unwrap_or(53);
    let mut v = Vec::with_capacity(zs.len());
    let mut fdot = czero(prec);
    for (j, z) in zs.iter().enumerate() {
        let mut s = czero(prec);
        for (k, w) in zs.iter().enumerate() {
            if k != j {
                let d = sub(z, w);
                if d.is_zero() {
                    return Err(Error::Collision {
                        distance: 0.0,
                        threshold: 0.0,
                    });
                }
                s += Complex::with_val(prec, d.recip() * gs[k]);
            }
        }
        let z3 = Complex::with_val(prec, Complex::with_val(prec, z.square_ref()) * z);
        let vel = Complex::with_val(prec, z3 - s);
        v.push(Complex::with_val(prec, vel.mul_i(false)));
        fdot -= Complex::with_val(prec, Complex::with_val(prec, z.square_ref()) * gs[j]);
    }
    Ok((v, fdot))
}

/// Velocities of every point and the phase rate `f' = -sum g_j z_j^2`.
pub fn dynamics_rhs(state: &DynamicsState) -> Result<(Vec<Complex>, Complex)> {
    state.check_collision()?;
    let gs: Vec<i32> = state.points.iter().map(|(_, g)| *g).collect();
    let (v, f) = velocities(&state.locations(), &gs)?;
    if state.points.is_empty() {
        return Ok((v, czero(state.prec())));
    }
    Ok((v, f))
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub safety: f64,
    pub max_step: f64,
    pub collision_factor: f64,
    /// Points beyond this modulus abort the run.
    pub blowup: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rtol: 1e-12,
            atol: 1e-12,
            safety: 0.9,
            max_step: 0.05,
            collision_factor: DYNAMICS_COLLISION_FACTOR,
            blowup: 1e12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub h: Complex,
    pub h_tilde: Complex,
    /// `None` when some charge has modulus above one.
    pub cm_zero: Option<f64>,
    pub cm_pole: Option<f64>,
    pub parity: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DynamicsState>,
    pub diagnostics: Vec<Diagnostics>,
    pub rejected_steps: usize,
}

impl Trajectory {
    fn start(state: &DynamicsState) -> Self {
        Trajectory {
            times: vec![state.t],
            states: vec![state.clone()],
            diagnostics: vec![diagnose(state)],
            rejected_steps: 0,
        }
    }

    fn push(&mut self, state: DynamicsState) {
        self.times.push(state.t);
        self.diagnostics.push(diagnose(&state));
        self.states.push(state);
    }

    pub fn last(&self) -> &DynamicsState {
        self.states.last().expect("trajectory holds its initial state")
    }
}

fn diagnose(state: &DynamicsState) -> Diagnostics {
    let (h, h_tilde) = hamiltonians(state).unwrap_or_else(|_| {
        let nan = Complex::with_val(state.prec(), (f64::NAN, f64::NAN));
        (nan.clone(), nan)
    });
    let cm = cm_residual_state(state).ok();
    Diagnostics {
        h,
        h_tilde,
        cm_zero: cm.as_ref().map(|c| c.zero),
        cm_pole: cm.as_ref().map(|c| c.pole),
        parity: state.parity_defect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    Collision,
    StepUnderflow,
    BlowUp,
}

/// Early stop of [`integrate`], carrying everything computed so far.
#[derive(Clone, Debug)]
pub struct IntegrationFailure {
    pub kind: FailureKind,
    pub t: f64,
    pub distance: f64,
    pub threshold: f64,
    pub partial: Trajectory,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FailureKind::Collision => write!(
                f,
                "collision at t = {}: distance {:e} below {:e}",
                self.t, self.distance, self.threshold
            ),
            FailureKind::StepUnderflow => write!(f, "step size underflow at t = {}", self.t),
            FailureKind::BlowUp => write!(f, "points left every bounded region at t = {}", self.t),
        }
    }
}

struct Tableau {
    a: Vec<Vec<Float>>,
    b: Vec<Float>,
    e: Vec<Float>,
}

fn q(prec: u32, n: i64, d: i64) -> Float {
    Float::with_val(prec, n) / d
}

fn tableau(prec: u32) -> Tableau {
    let a = vec![
        vec![],
        vec![q(prec, 1, 5)],
        vec![q(prec, 3, 40), q(prec, 9, 40)],
        vec![q(prec, 44, 45), q(prec, -56, 15), q(prec, 32, 9)],
        vec![q(prec, 19372, 6561), q(prec, -25360, 2187), q(prec, 64448, 6561), q(prec, -212, 729)],
        vec![
            q(prec, 9017, 3168),
            q(prec, -355, 33),
            q(prec, 46732, 5247),
            q(prec, 49, 176),
            q(prec, -5103, 18656),
        ],
        vec![
            q(prec, 35, 384),
            q(prec, 0, 1),
            q(prec, 500, 1113),
            q(prec, 125, 192),
            q(prec, -2187, 6784),
            q(prec, 11, 84),
        ],
    ];
    let b = a[6].iter().cloned().chain([q(prec, 0, 1)]).collect();
    let e = vec![
        q(prec, 71, 57600),
        q(prec, 0, 1),
        q(prec, -71, 16695),
        q(prec, 71, 1920),
        q(prec, -17253, 339200),
        q(prec, 22, 525),
        q(prec, -1, 40),
    ];
    Tableau {
        a,
        b,
        e,
    }
}

/// Adaptive Dormand-Prince 5(4) integration of the flow and its phase up to
/// `t_end`. Stops on collision, step underflow or blow-up with an
/// [`Error::Integration`] that holds the partial trajectory.
pub fn integrate(state: &DynamicsState, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    if !(t_end > state.t) {
        return Err(Error::InvalidArgument("t_end must exceed the start time".into()));
    }
    let prec = state.prec();
    let gs: Vec<i32> = state.points.iter().map(|(_, g)| *g).collect();
    let n = gs.len();
    let mut traj = Trajectory::start(state);
    let fail = |traj: Trajectory, kind, t, distance, threshold| {
        Err(Error::Integration(Box::new(IntegrationFailure {
            kind,
            t,
            distance,
            threshold,
            partial: traj,
        })))
    };
    let (d0, thr0) = pairwise_separation(&state.locations(), opts.collision_factor);
    if d0 < thr0 {
        return fail(traj, FailureKind::Collision, state.t, d0, thr0);
    }
    let tab = tableau(prec);
    let rhs = |y: &[Complex]| -> Option<Vec<Complex>> {
        let (mut v, f) = velocities(&y[..n], &gs).ok()?;
        v.push(f);
        v.iter().all(|c| abs_f64(c).is_finite()).then_some(v)
    };
    let mut y: Vec<Complex> = state.locations();
    y.push(state.phase.clone());
    let mut t = state.t;
    let mut h = opts.max_step.min(t_end - t).min(1e-3);
    while t < t_end {
        let h_min = 1e-14 * t.abs().max(1.0);
        if h < h_min {
            return fail(traj, FailureKind::StepUnderflow, t, f64::NAN, f64::NAN);
        }
        let step = h.min(t_end - t);
        let hf = Float::with_val(prec, step);
        let mut ks: Vec<Vec<Complex>> = Vec::with_capacity(7);
        let mut ok = true;
        for s in 0..7 {
            let mut ys = y.clone();
            for (j, a) in tab.a[s].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let w = Float::with_val(prec, a * &hf);
                for (yi, ki) in ys.iter_mut().zip(&ks[j]) {
                    *yi += Complex::with_val(prec, ki * &w);
                }
            }
            match rhs(&ys) {
                Some(k) => ks.push(k),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            traj.rejected_steps += 1;
            h = step * 0.25;
            continue;
        }
        let mut y5 = y.clone();
        let mut err = vec![czero(prec); y.len()];
        for s in 0..7 {
            let wb = Float::with_val(prec, &tab.b[s] * &hf);
            let we = Float::with_val(prec, &tab.e[s] * &hf);
            for i in 0..y.len() {
                if !wb.is_zero() {
                    y5[i] += Complex::with_val(prec, &ks[s][i] * &wb);
                }
                if !we.is_zero() {
                    err[i] += Complex::with_val(prec, &ks[s][i] * &we);
                }
            }
        }
        let norm = (err
            .iter()
            .zip(y.iter().zip(&y5))
            .map(|(e, (a, b))| {
                let sc = opts.atol + opts.rtol * abs_f64(a).max(abs_f64(b));
                (abs_f64(e) / sc).powi(2)
            })
            .sum::<f64>()
            / y.len() as f64)
            .sqrt();
        if !norm.is_finite() {
            traj.rejected_steps += 1;
            h = step * 0.25;
            continue;
        }
        let factor = if norm == 0.0 {
            5.0
        } else {
            (opts.safety * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        if norm <= 1.0 {
            t = if step == t_end - t { t_end } else { t + step };
            y = y5;
            let next = DynamicsState {
                points: y[..n].iter().cloned().zip(gs.iter().copied()).collect(),
                t,
                phase: y[n].clone(),
            };
            let (d, thr) = pairwise_separation(&next.locations(), opts.collision_factor);
            let big = next.locations().iter().map(abs_f64).fold(0.0, f64::max);
            traj.push(next);
            if d < thr {
                return fail(traj, FailureKind::Collision, t, d, thr);
            }
            if big > opts.blowup {
                return fail(traj, FailureKind::BlowUp, t, d, thr);
            }
            h = (step * factor).min(opts.max_step);
        } else {
            traj.rejected_steps += 1;
            h = step * factor.min(1.0);
        }
    }
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct CmResidual {
    /// Max deviation from the decoupled equation over the zeros.
    pub zero: f64,
    pub pole: f64,
    /// `|sum g_j z_j|`.
    pub parity: f64,
}

/// `z''` obtained by differentiating the flow along itself.
fn accelerations(zs: &[Complex], gs: &[i32]) -> Result<Vec<Complex>> {
    let prec = zs.first().map(|z| z.prec().0).unwrap_or(53);
    let (v, _) = velocities(zs, gs)?;
    let n = zs.len();
    let mut acc = Vec::with_capacity(n);
    for j in 0..n {
        // z_j' = -i S_j + i z_j^3  =>  z_j'' = -i S_j' + 3 i z_j^2 z_j'
        let mut sdot = czero(prec);
        for k in 0..n {
            if k != j {
                let d = sub(&zs[j], &zs[k]);
                let dv = sub(&v[j], &v[k]);
                sdot -= Complex::with_val(prec, dv / d.square() * gs[k]);
            }
        }
        let z2 = Complex::with_val(prec, zs[j].square_ref());
        let t = Complex::with_val(prec, Complex::with_val(prec, &z2 * &v[j]) * 3u32 - sdot);
        acc.push(Complex::with_val(prec, t.mul_i(false)));
    }
    Ok(acc)
}

/// Deviation of `z''` from the decoupled systems
/// `z'' = sum 2/(z - z_k)^3 - 3 z^5 + z (2(Z-P) - 3 g)` (sum over points of
/// the same kind), for zeros and poles separately.
pub fn cm_residual_state(state: &DynamicsState) -> Result<CmResidual> {
    if state.points.iter().any(|(_, g)| g.abs() != 1) {
        return Err(Error::Unsupported("decoupled equations need simple zeros and poles".into()));
    }
    state.check_collision()?;
    let prec = state.prec();
    let zs = state.locations();
    let gs: Vec<i32> = state.points.iter().map(|(_, g)| *g).collect();
    let acc = accelerations(&zs, &gs)?;
    let balance = state.charge_balance();
    let (mut zero, mut pole) = (0.0f64, 0.0f64);
    for j in 0..zs.len() {
        let z = &zs[j];
        let mut rhs = czero(prec);
        for k in 0..zs.len() {
            if k != j && gs[k] == gs[j] {
                let d = sub(z, &zs[k]);
                let d3 = Complex::with_val(prec, Complex::with_val(prec, d.square_ref()) * &d);
                rhs += Complex::with_val(prec, d3.recip() * 2u32);
            }
        }
        let z5 = Complex::with_val(prec, rug::ops::Pow::pow(z.clone(), 5u32));
        rhs -= Complex::with_val(prec, z5 * 3u32);
        rhs += Complex::with_val(prec, z * (2 * balance - 3 * gs[j] as i64));
        let r = abs_f64(&sub(&acc[j], &rhs));
        if gs[j] > 0 {
            zero = zero.max(r);
        } else {
            pole = pole.max(r);
        }
    }
    Ok(CmResidual {
        zero,
        pole,
        parity: state.parity_defect(),
    })
}

/// [`cm_residual_state`] at every sample.
pub fn cm_residual(traj: &Trajectory) -> Result<Vec<CmResidual>> {
    traj.states.iter().map(cm_residual_state).collect()
}

/// `(H, H~)`: the Calogero-Moser Hamiltonians of the zeros and of the
/// poles, with momenta equal to the flow velocities.
pub fn hamiltonians(state: &DynamicsState) -> Result<(Complex, Complex)> {
    let prec = state.prec();
    if state.points.is_empty() {
        return Ok((czero(prec), czero(prec)));
    }
    let (v, _) = dynamics_rhs(state)?;
    let balance = state.charge_balance();
    let mut out = [czero(prec), czero(prec)];
    for (slot, sign) in [(0usize, 1i32), (1, -1)] {
        let idx: Vec<usize> = (0..state.points.len())
            .filter(|&j| state.points[j].1.signum() == sign)
            .collect();
        let nu_eff = 2 * balance - 3 * sign as i64;
        let mut h = czero(prec);
        for (a, &j) in idx.iter().enumerate() {
            let z = &state.points[j].0;
            let z2 = Complex::with_val(prec, z.square_ref());
            let z6 = Complex::with_val(prec, Complex::with_val(prec, z2.square_ref()) * &z2);
            h += Complex::with_val(prec, v[j].square_ref());
            h += z6;
            h -= Complex::with_val(prec, z2 * nu_eff);
            for &k in &idx[a + 1..] {
                let d = sub(z, &state.points[k].0);
                h += Complex::with_val(prec, d.square().recip() * 2u32);
            }
        }
        out[slot] = Complex::with_val(prec, h / 2u32);
    }
    let [h, ht] = out;
    Ok((h, ht))
}

/// `S = -i log(prod_{j<k}(x_j - x_k) prod_{m<n}(xt_m - xt_n) / prod(x_j - xt_k))
///      + i sum x^4/4 - i sum xt^4/4` up to the branch of the logarithm.
pub fn generating_function(zeros: &[Complex], poles: &[Complex]) -> Complex {
    let prec = zeros.iter().chain(poles).next().map(|z| z.prec().0).unwrap_or(53);
    let mut logs = czero(prec);
    for list in [zeros, poles] {
        for (j, a) in list.iter().enumerate() {
            for b in &list[j + 1..] {
                logs += sub(a, b).ln();
            }
        }
    }
    for a in zeros {
        for b in poles {
            logs -= sub(a, b).ln();
        }
    }
    let mut quartic = czero(prec);
    for a in zeros {
        quartic += Complex::with_val(prec, rug::ops::Pow::pow(a.clone(), 4u32));
    }
    for b in poles {
        quartic -= Complex::with_val(prec, rug::ops::Pow::pow(b.clone(), 4u32));
    }
    let s = Complex::with_val(prec, quartic / 4u32 - logs);
    Complex::with_val(prec, s.mul_i(false))
}

fn split(state: &DynamicsState) -> (Vec<Complex>, Vec<Complex>) {
    let zeros = state.points.iter().filter(|(_, g)| *g > 0).map(|(z, _)| z.clone()).collect();
    let poles = state.points.iter().filter(|(_, g)| *g < 0).map(|(z, _)| z.clone()).collect();
    (zeros, poles)
}

/// `(dS/dx_j, dS/dxt_m)` in closed form.
pub fn generating_gradient(zeros: &[Complex], poles: &[Complex]) -> (Vec<Complex>, Vec<Complex>) {
    let prec = zeros.iter().chain(poles).next().map(|z| z.prec().0).unwrap_or(53);
    let grad = |z: &Complex, same: &[Complex], other: &[Complex], skip: usize, sign: i32| {
        let mut s = czero(prec);
        for (k, w) in same.iter().enumerate() {
            if k != skip {
                s += sub(z, w).recip();
            }
        }
        for w in other {
            s -= sub(z, w).recip();
        }
        let z3 = Complex::with_val(prec, rug::ops::Pow::pow(z.clone(), 3u32));
        // d/dz of -i(log terms) + sign i z^4/4
        let t = Complex::with_val(prec, z3 * sign - s);
        Complex::with_val(prec, t.mul_i(false))
    };
    let gx = zeros.iter().enumerate().map(|(j, z)| grad(z, zeros, poles, j, 1)).collect();
    let gp = poles.iter().enumerate().map(|(m, z)| grad(z, poles, zeros, m, -1)).collect();
    (gx, gp)
}

#[derive(Clone, Debug)]
pub struct GeneratingReport {
    /// `max |dS/dx - p|` and `max |-dS/dxt - pt|`.
    pub momentum_residual: f64,
    /// `max |analytic - central difference|` over all coordinates.
    pub fd_residual: f64,
    pub value: Complex,
}

/// Compare the closed-form gradient of `S` with the momenta `p = z'` and
/// with central differences of step `fd_step`.
pub fn generating_function_check(state: &DynamicsState, fd_step: f64) -> Result<GeneratingReport> {
    let (zeros, poles) = split(state);
    if zeros.is_empty() || poles.is_empty() {
        return Err(Error::InvalidArgument("generating function needs zeros and poles".into()));
    }
    let prec = state.prec();
    let (v, _) = dynamics_rhs(state)?;
    let (gx, gp) = generating_gradient(&zeros, &poles);
    let mut vz = Vec::new();
    let mut vp = Vec::new();
    for ((_, g), vel) in state.points.iter().zip(&v) {
        if *g > 0 {
            vz.push(vel.clone());
        } else {
            vp.push(vel.clone());
        }
    }
    let mut momentum_residual = 0.0f64;
    for (a, b) in gx.iter().zip(&vz) {
        momentum_residual = momentum_residual.max(abs_f64(&sub(a, b)));
    }
    for (a, b) in gp.iter().zip(&vp) {
        let neg = Complex::with_val(prec, -a);
        momentum_residual = momentum_residual.max(abs_f64(&sub(&neg, b)));
    }
    let h = Complex::with_val(prec, fd_step);
    let mut fd_residual = 0.0f64;
    let nz = zeros.len();
    for idx in 0..nz + poles.len() {
        let shifted = |delta: &Complex| {
            let (mut a, mut b) = (zeros.clone(), poles.clone());
            if idx < nz {
                a[idx] += delta;
            } else {
                b[idx - nz] += delta;
            }
            (a, b)
        };
        let neg_h = Complex::with_val(prec, -&h);
        let (ap, bp) = shifted(&h);
        let (am, bm) = shifted(&neg_h);
        // difference taken through a single logarithm to stay on one branch
        let fd = fd_difference(&ap, &bp, &am, &bm, fd_step);
        let exact = if idx < nz { &gx[idx] } else { &gp[idx - nz] };
        fd_residual = fd_residual.max(abs_f64(&sub(&fd, exact)));
    }
    Ok(GeneratingReport {
        momentum_residual,
        fd_residual,
        value: generating_function(&zeros, &poles),
    })
}

fn fd_difference(ap: &[Complex], bp: &[Complex], am: &[Complex], bm: &[Complex], step: f64) -> Complex {
    let prec = ap.iter().chain(bp).next().map(|z| z.prec().0).unwrap_or(53);
    let ratio = |a: &[Complex], b: &[Complex]| {
        let mut num = Complex::with_val(prec, 1);
        let mut den = Complex::with_val(prec, 1);
        for list in [a, b] {
            for (j, x) in list.iter().enumerate() {
                for y in &list[j + 1..] {
                    num *= sub(x, y);
                }
            }
        }
        for x in a {
            for y in b {
                den *= sub(x, y);
            }
        }
        (num, den)
    };
    let (np, dp) = ratio(ap, bp);
    let (nm, dm) = ratio(am, bm);
    let q = Complex::with_val(prec, Complex::with_val(prec, &np * &dm) / Complex::with_val(prec, &nm * &dp));
    let mut quartic = czero(prec);
    for (list, sign) in [(ap, 1), (bp, -1)] {
        for x in list {
            quartic += Complex::with_val(prec, rug::ops::Pow::pow(x.clone(), 4u32)) * sign;
        }
    }
    for (list, sign) in [(am, 1), (bm, -1)] {
        for x in list {
            quartic -= Complex::with_val(prec, rug::ops::Pow::pow(x.clone(), 4u32)) * sign;
        }
    }
    let s = Complex::with_val(prec, quartic / 4u32 - q.ln());
    Complex::with_val(prec, s.mul_i(false) / (2.0 * step))
}

/// The two-zero state `{X, -X}` with
/// `X^2 = -(c1 e^{i sqrt2 t} - c2 e^{-i sqrt2 t}) / (sqrt2 (c1 e^{i sqrt2 t} + c2 e^{-i sqrt2 t}))`
/// and phase `-i log(D(t)/D(0))`, `D(t) = c1 e^{i sqrt2 t} + c2 e^{-i sqrt2 t}`.
pub fn closed_form_nu7(t: f64, c1: &Complex, c2: &Complex) -> Result<DynamicsState> {
    let prec = c1.prec().0;
    let (d, n) = nu7_parts(t, c1, c2);
    if d.is_zero() || abs_f64(&d) < 1e-300 {
        return Err(Error::InvalidArgument("closed form denominator vanishes".into()));
    }
    let s2 = Float::with_val(prec, 2).sqrt();
    let x2 = Complex::with_val(prec, -(n / Complex::with_val(prec, &d * &s2)));
    let x = Complex::with_val(prec, x2.sqrt());
    let d0 = Complex::with_val(prec, c1 + c2);
    let phase = Complex::with_val(prec, Complex::with_val(prec, &d / &d0).ln()).mul_i(true);
    let state = DynamicsState {
        points: vec![(x.clone(), 1), (Complex::with_val(prec, -&x), 1)],
        t,
        phase: Complex::with_val(prec, phase),
    };
    state.check_collision()?;
    Ok(state)
}

/// `(c1 e^{i sqrt2 t} + c2 e^{-i sqrt2 t}, c1 e^{i sqrt2 t} - c2 e^{-i sqrt2 t})`.
fn nu7_parts(t: f64, c1: &Complex, c2: &Complex) -> (Complex, Complex) {
    let prec = c1.prec().0;
    let th = Float::with_val(prec, Float::with_val(prec, 2).sqrt() * t);
    let ep = Complex::with_val(prec, (Float::with_val(prec, 0), th.clone())).exp();
    let em = Complex::with_val(prec, (Float::with_val(prec, 0), -th)).exp();
    let a = Complex::with_val(prec, c1 * &ep);
    let b = Complex::with_val(prec, c2 * &em);
    (Complex::with_val(prec, &a + &b), Complex::with_val(prec, &a - &b))
}

/// `X(t)^2` of [`closed_form_nu7`].
pub fn closed_form_nu7_square(t: f64, c1: &Complex, c2: &Complex) -> Complex {
    let prec = c1.prec().0;
    let (d, n) = nu7_parts(t, c1, c2);
    let s2 = Float::with_val(prec, 2).sqrt();
    Complex::with_val(prec, -(n / Complex::with_val(prec, d * s2)))
}

/// Zeros of `sum_j c_j P_j(x) exp(-i lambda_j t / 2)` for a QES spectrum,
/// as a state of simple zeros.
pub fn quasi_polynomial_zeros(spec: &QesSpectrum, coeffs: &[Complex], t: f64, tol: f64) -> Result<DynamicsState> {
    if coeffs.len() != spec.eigenvalues.len() {
        return Err(Error::InvalidArgument("one coefficient per eigenfunction".into()));
    }
    let prec = spec.char_poly.prec();
    let mut sum = crate::exactnum::Poly::zero(prec);
    for (j, c) in coeffs.iter().enumerate() {
        let arg = Complex::with_val(prec, &spec.eigenvalues[j] * (-t / 2.0));
        let w = Complex::with_val(prec, arg.mul_i(false)).exp();
        let p = spec.polynomial(j).scale(&Complex::with_val(prec, c * w));
        sum = &sum + &p;
    }
    let roots = crate::exactnum::poly_roots(&sum, tol)?;
    let mut points = Vec::new();
    for r in roots {
        if r.multiplicity != 1 {
            return Err(Error::Unsupported("repeated zero of the superposition".into()));
        }
        points.push((r.value, 1));
    }
    DynamicsState::new(points, t, prec)
}

/// `Z - P` expected for the `m`-th step of a chain on `x^6 - nu0 x^2`:
/// `(nu0 - 3)/2 - 3m`.
pub fn expected_charge(nu0: i64, m: i64) -> Option<i64> {
    ((nu0 - 3) % 2 == 0).then(|| (nu0 - 3) / 2 - 3 * m)
}
