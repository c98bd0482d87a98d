//! Pseudospectral simulation of the periodic Brusselator
//!
//! ```text
//! u1_t = d1 u1_xx - (beta + 1) u1 + u1^2 u2 + alpha
//! u2_t = d2 u2_xx + beta u1 - u1^2 u2
//! ```
//!
//! on `[-L, L)`. Time stepping is Strang splitting: exact diffusion half steps in
//! Fourier space around a pointwise RK4 reaction step, followed by the 2/3
//! dealiasing filter. The scheme is second order in `dt`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::model::ModelParams;

/// Collocated fields on `x_j = -L + 2 L j / N`, `j = 0..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub half_length: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn grid_size(&self) -> usize {
        self.u1.len()
    }

    pub fn grid(&self) -> Vec<f64> {
        grid(self.half_length, self.grid_size())
    }

    pub fn means(&self) -> [f64; 2] {
        let n = self.grid_size() as f64;
        [self.u1.iter().sum::<f64>() / n, self.u2.iter().sum::<f64>() / n]
    }

    pub fn max_abs(&self) -> f64 {
        self.u1.iter().chain(&self.u2).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u1
            .iter()
            .zip(&other.u1)
            .chain(self.u2.iter().zip(&other.u2))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub fn grid(half_length: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * half_length / n as f64;
    (0..n).map(|j| -half_length + h * j as f64).collect()
}

/// Number of Fourier modes excited by [`InitSpec::Random`].
pub const RANDOM_MODES: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitSpec {
    Uniform,
    /// `u1 += eps cos(k kappa x)`, `u2 += eps sin(k kappa x)`.
    Mode { k: i64, eps: f64 },
    /// `u_i += eps_i cos(k kappa x)`.
    Cosine { k: i64, eps: [f64; 2] },
    /// Band-limited random field on modes `0..=RANDOM_MODES`, sup norm `eps`.
    Random { eps: f64 },
}

impl InitSpec {
    /// `k:eps` or `random:eps`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("perturbation must be `k:eps` or `random:eps`, got `{s}`"));
        let (head, eps) = s.split_once(':').ok_or_else(bad)?;
        let eps: f64 = eps.trim().parse().map_err(|_| bad())?;
        if !eps.is_finite() {
            return Err(bad());
        }
        if head.trim() == "random" {
            Ok(InitSpec::Random { eps })
        } else {
            let k: i64 = head.trim().parse().map_err(|_| bad())?;
            Ok(InitSpec::Mode { k, eps })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_grid: usize,
    pub dt: f64,
    pub t_max: f64,
    pub dealias: bool,
    pub init: InitSpec,
    pub seed: u64,
    /// Sup norm above which a step fails with `NumericalBlowup`.
    pub blowup_bound: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_grid: 128,
            dt: 1e-3,
            t_max: 2000.0,
            dealias: true,
            init: InitSpec::Mode { k: 1, eps: 1e-3 },
            seed: 0,
            blowup_bound: 1e6,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid < 8 || !self.n_grid.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size must be a power of two >= 8, got {}",
                self.n_grid
            )));
        }
        for (name, v) in [("dt", self.dt), ("t_max", self.t_max), ("blowup_bound", self.blowup_bound)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        let k_max = match self.init {
            InitSpec::Mode { k, .. } | InitSpec::Cosine { k, .. } => k.unsigned_abs() as usize,
            InitSpec::Random { .. } => RANDOM_MODES as usize,
            InitSpec::Uniform => 0,
        };
        if 2 * k_max >= self.n_grid {
            return Err(Error::InvalidArgument(format!(
                "perturbation mode {k_max} is not resolved on {} points",
                self.n_grid
            )));
        }
        Ok(())
    }
}

fn signed_index(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Reusable stepper; holds FFT plans and diffusion multipliers for one `(params, dt, N)`.
pub struct Simulator {
    params: ModelParams,
    cfg: SimConfig,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    half_diffusion: [Vec<f64>; 2],
    keep: Vec<bool>,
    buf: [Vec<Complex64>; 2],
    scratch: Vec<Complex64>,
}

impl Simulator {
    pub fn new(params: &ModelParams, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n_grid;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let kappa = params.kappa();
        let mut half_diffusion = [vec![0.0; n], vec![0.0; n]];
        let mut keep = vec![true; n];
        for j in 0..n {
            let m = signed_index(j, n);
            let k2 = (m as f64 * kappa).powi(2);
            half_diffusion[0][j] = (-params.delta1() * k2 * cfg.dt / 2.0).exp();
            half_diffusion[1][j] = (-params.delta2() * k2 * cfg.dt / 2.0).exp();
            keep[j] = !cfg.dealias || 3 * m.unsigned_abs() as usize <= n;
        }
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Ok(Self {
            params: *params,
            cfg: *cfg,
            fwd,
            inv,
            half_diffusion,
            keep,
            buf: [vec![Complex64::default(); n], vec![Complex64::default(); n]],
            scratch: vec![Complex64::default(); scratch_len],
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn initialize(&self) -> FieldState {
        let p = &self.params;
        let n = self.cfg.n_grid;
        let xs = grid(p.half_length(), n);
        let kappa = p.kappa();
        let mut u1 = vec![p.alpha(); n];
        let mut u2 = vec![p.beta() / p.alpha(); n];
        match self.cfg.init {
            InitSpec::Uniform => {}
            InitSpec::Mode { k, eps } => {
                for (j, x) in xs.iter().enumerate() {
                    let ph = k as f64 * kappa * x;
                    u1[j] += eps * ph.cos();
                    u2[j] += eps * ph.sin();
                }
            }
            InitSpec::Cosine { k, eps } => {
                for (j, x) in xs.iter().enumerate() {
                    let c = (k as f64 * kappa * x).cos();
                    u1[j] += eps[0] * c;
                    u2[j] += eps[1] * c;
                }
            }
            InitSpec::Random { eps } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
                let mut pert = [vec![0.0; n], vec![0.0; n]];
                for field in pert.iter_mut() {
                    for m in 0..=RANDOM_MODES {
                        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        for (j, x) in xs.iter().enumerate() {
                            let ph = m as f64 * kappa * x;
                            field[j] += a * ph.cos() + b * ph.sin();
                        }
                    }
                }
                let sup = pert.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
                let scale = if sup > 0.0 { eps / sup } else { 0.0 };
                for j in 0..n {
                    u1[j] += scale * pert[0][j];
                    u2[j] += scale * pert[1][j];
                }
            }
        }
        FieldState {
            half_length: p.half_length(),
            u1,
            u2,
            time: 0.0,
        }
    }

    fn load(&mut self, state: &FieldState) {
        for (j, (a, b)) in state.u1.iter().zip(&state.u2).enumerate() {
            self.buf[0][j] = Complex64::new(*a, 0.0);
            self.buf[1][j] = Complex64::new(*b, 0.0);
        }
    }

    fn store(&self, state: &mut FieldState) {
        let scale = 1.0 / self.cfg.n_grid as f64;
        for j in 0..self.cfg.n_grid {
            state.u1[j] = self.buf[0][j].re * scale;
            state.u2[j] = self.buf[1][j].re * scale;
        }
    }

    /// Half diffusion step (and optionally the dealias filter) on the loaded buffers.
    fn spectral_pass(&mut self, filter: bool) {
        for c in 0..2 {
            self.fwd.process_with_scratch(&mut self.buf[c], &mut self.scratch);
            for j in 0..self.cfg.n_grid {
                if filter && !self.keep[j] {
                    self.buf[c][j] = Complex64::default();
                } else {
                    self.buf[c][j] *= self.half_diffusion[c][j];
                }
            }
            self.inv.process_with_scratch(&mut self.buf[c], &mut self.scratch);
        }
    }

    fn react(&self, state: &mut FieldState) {
        let (a, b) = (self.params.alpha(), self.params.beta());
        let f = |u: f64, v: f64| {
            let q = u * u * v;
            (a - (b + 1.0) * u + q, b * u - q)
        };
        let h = self.cfg.dt;
        for (u, v) in state.u1.iter_mut().zip(state.u2.iter_mut()) {
            let (k1u, k1v) = f(*u, *v);
            let (k2u, k2v) = f(*u + 0.5 * h * k1u, *v + 0.5 * h * k1v);
            let (k3u, k3v) = f(*u + 0.5 * h * k2u, *v + 0.5 * h * k2v);
            let (k4u, k4v) = f(*u + h * k3u, *v + h * k3v);
            *u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            *v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
    }

    pub fn step(&mut self, state: &mut FieldState) -> Result<()> {
        if state.grid_size() != self.cfg.n_grid {
            return Err(Error::InvalidArgument(format!(
                "state has {} points, simulator expects {}",
                state.grid_size(),
                self.cfg.n_grid
            )));
        }
        self.load(state);
        self.spectral_pass(false);
        self.store(state);
        self.react(state);
        self.load(state);
        self.spectral_pass(true);
        self.store(state);
        state.time += self.cfg.dt;
        let norm = state.max_abs();
        if !(norm <= self.cfg.blowup_bound) {
            return Err(Error::NumericalBlowup {
                t: state.time,
                norm,
                bound: self.cfg.blowup_bound,
            });
        }
        Ok(())
    }

    /// Take `round(duration / dt)` steps.
    pub fn advance(&mut self, state: &mut FieldState, duration: f64) -> Result<()> {
        let steps = (duration / self.cfg.dt).round() as u64;
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }
}

pub fn initialize(params: &ModelParams, cfg: &SimConfig) -> Result<FieldState> {
    Ok(Simulator::new(params, cfg)?.initialize())
}

/// One step. Builds a fresh [`Simulator`]; use that directly in loops.
pub fn step(state: &FieldState, params: &ModelParams, cfg: &SimConfig) -> Result<FieldState> {
    let mut sim = Simulator::new(params, cfg)?;
    let mut next = state.clone();
    sim.step(&mut next)?;
    Ok(next)
}

/// Sup norm of the PDE right-hand side, with derivatives taken spectrally.
pub fn rhs_norm(params: &ModelParams, state: &FieldState) -> f64 {
    let n = state.grid_size();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let kappa = params.kappa();
    let lap = |u: &[f64], d: f64| -> Vec<f64> {
        let mut b: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.process(&mut b);
        for (j, c) in b.iter_mut().enumerate() {
            let m = signed_index(j, n) as f64;
            *c *= -d * (m * kappa).powi(2) / n as f64;
        }
        inv.process(&mut b);
        b.into_iter().map(|c| c.re).collect()
    };
    let l1 = lap(&state.u1, params.delta1());
    let l2 = lap(&state.u2, params.delta2());
    let (a, b) = (params.alpha(), params.beta());
    (0..n).fold(0.0, |m, j| {
        let (u, v) = (state.u1[j], state.u2[j]);
        let q = u * u * v;
        let r1 = l1[j] - (b + 1.0) * u + q + a;
        let r2 = l2[j] + b * u - q;
        m.max(r1.abs()).max(r2.abs())
    })
}

fn dft(u: &[f64], k: i64, kappa: f64, half_length: f64) -> Complex64 {
    let n = u.len();
    let h = 2.0 * half_length / n as f64;
    let mut acc = Complex64::default();
    for (j, v) in u.iter().enumerate() {
        let x = -half_length + h * j as f64;
        acc += Complex64::from_polar(*v, -(k as f64) * kappa * x);
    }
    acc / n as f64
}

fn check_mode(state: &FieldState, k: i64) -> Result<()> {
    if 2 * k.unsigned_abs() as usize > state.grid_size() {
        return Err(Error::InvalidArgument(format!(
            "mode {k} exceeds the Nyquist index of a {}-point grid",
            state.grid_size()
        )));
    }
    Ok(())
}

/// Fourier coefficient of `u1` at wave index `k`: `(1/N) sum_j u1(x_j) e^{-i k kappa x_j}`.
pub fn mode_amplitude(state: &FieldState, k: i64) -> Result<Complex64> {
    check_mode(state, k)?;
    Ok(dft(&state.u1, k, PI / state.half_length, state.half_length))
}

/// Fourier coefficients of both components at wave index `k`.
pub fn mode_vector(state: &FieldState, k: i64) -> Result<[Complex64; 2]> {
    check_mode(state, k)?;
    let kappa = PI / state.half_length;
    Ok([
        dft(&state.u1, k, kappa, state.half_length),
        dft(&state.u2, k, kappa, state.half_length),
    ])
}

/// Oscillation frequency of a sampled complex amplitude.
///
/// When the modulus stays away from zero (a rotating signal) the estimate is
/// the least-squares slope of the unwrapped phase. Otherwise (standing-type
/// signals, whose phase jumps by `pi` at nodes) zero crossings of the real
/// projection with the largest variance are counted, with linear
/// interpolation of the crossing times.
pub fn oscillation_frequency(times: &[f64], amps: &[Complex64]) -> Result<f64> {
    if times.len() != amps.len() || times.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 paired samples".into()));
    }
    let max = amps.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let min = amps.iter().fold(f64::INFINITY, |m, z| m.min(z.norm()));
    if max == 0.0 {
        return Err(Error::WindowTooShort { periods: 0.0 });
    }
    if min > 0.2 * max {
        let mut phase = Vec::with_capacity(amps.len());
        let mut prev = amps[0].arg();
        let mut acc = prev;
        for z in amps {
            let mut d = z.arg() - prev;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            acc += d;
            prev = z.arg();
            phase.push(acc);
        }
        let periods = (phase[phase.len() - 1] - phase[0]).abs() / (2.0 * PI);
        if periods < 3.0 {
            return Err(Error::WindowTooShort { periods });
        }
        let (slope, _, _) = linear_fit(times, &phase);
        return Ok(slope.abs());
    }

    // principal axis of the (re, im) cloud
    let n = amps.len() as f64;
    let mean = amps.iter().sum::<Complex64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for z in amps {
        let d = z - mean;
        sxx += d.re * d.re;
        syy += d.im * d.im;
        sxy += d.re * d.im;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = Complex64::from_polar(1.0, theta);
    let s: Vec<f64> = amps.iter().map(|z| ((z - mean) * dir.conj()).re).collect();
    let mut crossings = Vec::new();
    for i in 1..s.len() {
        if (s[i - 1] < 0.0) != (s[i] < 0.0) {
            let f = s[i - 1] / (s[i - 1] - s[i]);
            crossings.push(times[i - 1] + f * (times[i] - times[i - 1]));
        }
    }
    let periods = crossings.len().saturating_sub(1) as f64 / 2.0;
    if periods < 3.0 {
        return Err(Error::WindowTooShort { periods });
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Ok(PI * (crossings.len() - 1) as f64 / span)
}

/// Least-squares `y = slope x + intercept`; returns `(slope, intercept, residuals)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    (slope, intercept, residuals)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthMeasurement {
    pub k: i64,
    pub beta: f64,
    pub window: f64,
    /// Continuous-time eigenvalue estimates `log(eig(A)) / window`.
    #[serde(with = "crate::serde_complex::pair")]
    pub eigenvalues: [Complex64; 2],
    /// Real parts, descending.
    pub rates: [f64; 2],
}

/// Smallest tolerated `|c(t)| / |c(0)|` when choosing the measurement window.
pub const MIN_DECAY_RATIO: f64 = 1e-6;

/// Measure the linear growth rates of Fourier mode `k` by simulation.
///
/// Two runs start from `eps cos(k kappa x)` in `u1` and in `u2` respectively.
/// Their mode-`k` coefficient vectors at `t = 0` and `t = h` give the
/// propagator `A = C(h) C(0)^{-1}`, whose eigenvalues are `exp(lambda h)` for
/// the eigenvalues `lambda` of the mode matrix. `h` is the largest of
/// `window i / 64` at which neither perturbation has shrunk below
/// [`MIN_DECAY_RATIO`], so fast-decaying modes are not read off roundoff.
pub fn measure_growth_rates(
    params: &ModelParams,
    beta: f64,
    k: i64,
    eps: f64,
    window: f64,
    base: &SimConfig,
) -> Result<GrowthMeasurement> {
    const CHECKPOINTS: usize = 64;
    let p = params.with_beta(beta)?;
    let uniform = [p.alpha(), p.beta() / p.alpha()];
    let pert = |s: &FieldState| -> Result<[Complex64; 2]> {
        let mut v = mode_vector(s, k)?;
        if k == 0 {
            v[0] -= uniform[0];
            v[1] -= uniform[1];
        }
        Ok(v)
    };
    let steps_total = ((window / base.dt).round() as usize).max(CHECKPOINTS);
    let mut series: Vec<Vec<[Complex64; 2]>> = Vec::with_capacity(2);
    let mut times = Vec::with_capacity(CHECKPOINTS + 1);
    for e in [[eps, 0.0], [0.0, eps]] {
        let cfg = SimConfig {
            init: InitSpec::Cosine { k, eps: e },
            ..*base
        };
        let mut sim = Simulator::new(&p, &cfg)?;
        let mut state = sim.initialize();
        let mut col = vec![pert(&state)?];
        times.clear();
        times.push(0.0);
        let mut done = 0;
        for i in 1..=CHECKPOINTS {
            let target = steps_total * i / CHECKPOINTS;
            for _ in done..target {
                sim.step(&mut state)?;
            }
            done = target;
            col.push(pert(&state)?);
            times.push(done as f64 * base.dt);
        }
        series.push(col);
    }
    let ratio = |c: usize, i: usize| linalg::norm(&series[c][i]) / linalg::norm(&series[c][0]);
    let idx = (1..=CHECKPOINTS)
        .rev()
        .find(|&i| ratio(0, i) >= MIN_DECAY_RATIO && ratio(1, i) >= MIN_DECAY_RATIO)
        .unwrap_or(1);
    let col = |c: usize, i: usize| series[c][i];
    let c0: Mat2 = [[col(0, 0)[0], col(1, 0)[0]], [col(0, 0)[1], col(1, 0)[1]]];
    let c1: Mat2 = [[col(0, idx)[0], col(1, idx)[0]], [col(0, idx)[1], col(1, idx)[1]]];
    let c0_inv = linalg::inverse(&c0)
        .ok_or_else(|| Error::InvalidArgument("initial coefficient vectors are dependent".into()))?;
    let a = linalg::matmul(&c1, &c0_inv);
    let ev = linalg::eigenvalues(&a);
    let h = times[idx];
    let eigenvalues = [ev[0].ln() / h, ev[1].ln() / h];
    let mut rates = [eigenvalues[0].re, eigenvalues[1].re];
    rates.sort_by(|x, y| y.total_cmp(x));
    Ok(GrowthMeasurement {
        k,
        beta,
        window: h,
        eigenvalues,
        rates,
    })
}

/// Spectral translation `R(phi) v(x) = v(x + phi)`.
/// Shifts by a whole number of grid cells are exact index rotations.
pub fn translate(state: &FieldState, phi: f64) -> FieldState {
    let n = state.grid_size();
    let cells = phi * n as f64 / (2.0 * state.half_length);
    if cells == cells.round() {
        let s = (cells as i64).rem_euclid(n as i64) as usize;
        let rot = |u: &[f64]| (0..n).map(|j| u[(j + s) % n]).collect();
        return FieldState {
            half_length: state.half_length,
            u1: rot(&state.u1),
            u2: rot(&state.u2),
            time: state.time,
        };
    }
    let kappa = PI / state.half_length;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let shift = |u: &[f64]| -> Vec<f64> {
        let mut b: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.process(&mut b);
        for (j, c) in b.iter_mut().enumerate() {
            let m = signed_index(j, n);
            // the Nyquist mode cannot be shifted by a real field; keep its cosine part
            let f = if 2 * m.unsigned_abs() as usize == n {
                Complex64::new((m as f64 * kappa * phi).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, m as f64 * kappa * phi)
            };
            *c *= f / n as f64;
        }
        inv.process(&mut b);
        b.into_iter().map(|c| c.re).collect()
    };
    FieldState {
        half_length: state.half_length,
        u1: shift(&state.u1),
        u2: shift(&state.u2),
        time: state.time,
    }
}

/// Reflection `S v(x) = v(-x)`, exact on the grid: `j -> (N - j) mod N`.
pub fn reflect(state: &FieldState) -> FieldState {
    let n = state.grid_size();
    let r = |u: &[f64]| (0..n).map(|j| u[(n - j) % n]).collect();
    FieldState {
        half_length: state.half_length,
        u1: r(&state.u1),
        u2: r(&state.u2),
        time: state.time,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub phi: f64,
    pub horizon: f64,
    /// `max |evolve(R v) - R evolve(v)|`.
    pub translation: f64,
    /// `max |evolve(S v) - S evolve(v)|`.
    pub reflection: f64,
}

pub fn equivariance_test(params: &ModelParams, cfg: &SimConfig, phi: f64, horizon: f64) -> Result<EquivarianceReport> {
    let mut sim = Simulator::new(params, cfg)?;
    let v0 = sim.initialize();
    let mut v = v0.clone();
    sim.advance(&mut v, horizon)?;
    let mut rv = translate(&v0, phi);
    sim.advance(&mut rv, horizon)?;
    let mut sv = reflect(&v0);
    sim.advance(&mut sv, horizon)?;
    Ok(EquivarianceReport {
        phi,
        horizon,
        translation: rv.max_abs_diff(&translate(&v, phi)),
        reflection: sv.max_abs_diff(&reflect(&v)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanIdentityReport {
    pub horizon: f64,
    pub sample_interval: f64,
    /// `max_t |d/dt <u1 + u2> - <alpha - u1>| / max_t |<alpha - u1>|`, derivative by central differences.
    pub max_relative_error: f64,
}

/// Checks `d/dt mean(u1 + u2) = alpha - mean(u1)`, i.e. `-mean(v1)` for the perturbation.
pub fn mean_identity_check(
    params: &ModelParams,
    cfg: &SimConfig,
    horizon: f64,
    sample_interval: f64,
) -> Result<MeanIdentityReport> {
    let mut sim = Simulator::new(params, cfg)?;
    let mut state = sim.initialize();
    let samples = (horizon / sample_interval).round() as usize;
    let mut total = Vec::with_capacity(samples + 1);
    let mut rhs = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        if i > 0 {
            sim.advance(&mut state, sample_interval)?;
        }
        let [m1, m2] = state.means();
        total.push(m1 + m2);
        rhs.push(params.alpha() - m1);
    }
    let h = cfg.dt * (sample_interval / cfg.dt).round();
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut err: f64 = 0.0;
    for i in 1..samples {
        let d = (total[i + 1] - total[i - 1]) / (2.0 * h);
        err = err.max((d - rhs[i]).abs() / scale);
    }
    Ok(MeanIdentityReport {
        horizon,
        sample_interval: h,
        max_relative_error: err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub horizon: f64,
    pub dts: [f64; 3],
    /// `|u_dt - u_dt/2|` and `|u_dt/2 - u_dt/4|` (sup norm).
    pub differences: [f64; 2],
    pub order: f64,
}

pub fn convergence_order(params: &ModelParams, cfg: &SimConfig, horizon: f64) -> Result<ConvergenceReport> {
    let dts = [cfg.dt, cfg.dt / 2.0, cfg.dt / 4.0];
    let mut finals = Vec::with_capacity(3);
    for dt in dts {
        let c = SimConfig { dt, ..*cfg };
        let mut sim = Simulator::new(params, &c)?;
        let mut s = sim.initialize();
        sim.advance(&mut s, horizon)?;
        finals.push(s);
    }
    let d1 = finals[0].max_abs_diff(&finals[1]);
    let d2 = finals[1].max_abs_diff(&finals[2]);
    Ok(ConvergenceReport {
        horizon,
        dts,
        differences: [d1, d2],
        order: (d1 / d2).log2(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub means: [f64; 2],
    /// `u1` Fourier coefficients of the tracked modes.
    #[serde(with = "crate::serde_complex::vec")]
    pub modes: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRun {
    pub tracked: Vec<i64>,
    pub samples: Vec<Sample>,
    pub final_state: FieldState,
}

impl SimRun {
    pub fn series(&self, k: i64) -> Option<(Vec<f64>, Vec<Complex64>)> {
        let idx = self.tracked.iter().position(|&m| m == k)?;
        Some((
            self.samples.iter().map(|s| s.t).collect(),
            self.samples.iter().map(|s| s.modes[idx]).collect(),
        ))
    }
}

/// Integrate to `cfg.t_max`, sampling means and tracked modes every `sample_interval`.
pub fn simulate(params: &ModelParams, cfg: &SimConfig, tracked: &[i64], sample_interval: f64) -> Result<SimRun> {
    if !(sample_interval > 0.0) {
        return Err(Error::InvalidArgument("sample interval must be positive".into()));
    }
    let mut sim = Simulator::new(params, cfg)?;
    let mut state = sim.initialize();
    for &k in tracked {
        check_mode(&state, k)?;
    }
    let every = ((sample_interval / cfg.dt).round() as u64).max(1);
    let total = (cfg.t_max / cfg.dt).round() as u64;
    let sample = |s: &FieldState| -> Sample {
        Sample {
            t: s.time,
            means: s.means(),
            modes: tracked.iter().map(|&k| dft(&s.u1, k, params.kappa(), s.half_length)).collect(),
        }
    };
    let mut samples = vec![sample(&state)];
    for i in 1..=total {
        sim.step(&mut state)?;
        // keep the clock exact rather than accumulated
        state.time = i as f64 * cfg.dt;
        if i % every == 0 {
            samples.push(sample(&state));
        }
    }
    Ok(SimRun {
        tracked: tracked.to_vec(),
        samples,
        final_state: state,
    })
}

/// Envelope of `|c(t)|`: running maximum over windows of `window` samples.
fn envelope(amps: &[f64], window: usize) -> Vec<f64> {
    amps.chunks(window.max(1)).map(|c| c.iter().fold(0.0f64, |m, v| m.max(*v))).collect()
}

/// Saturation rule: the envelope varies by less than 0.5% over the last 20% of the run.
pub const SATURATION_TOL: f64 = 5e-3;
/// Amplitudes below this count as decayed.
pub const DECAY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub mu: f64,
    /// Final envelope of `|mode 1|` of `u1`.
    pub amplitude: f64,
    pub envelope_variation: f64,
    pub settled: bool,
    pub decayed: bool,
    /// Frequency of the mode-1 coefficient over the tail; `None` once it has decayed.
    pub frequency: Option<f64>,
    /// Tail maximum of `|mean(u1) - alpha|`: the spatially uniform part of the attractor.
    pub mode0_amplitude: f64,
    /// Frequency of the uniform part over the tail.
    pub mode0_frequency: Option<f64>,
}

/// Run one `mu` of the scaling experiment and summarise the tail of the run.
pub fn scaling_point(params: &ModelParams, mu: f64, cfg: &SimConfig) -> Result<ScalingPoint> {
    let p = params.with_mu(mu)?;
    let run = simulate(&p, cfg, &[1], 0.05)?;
    summarize_run(&p, &run)
}

/// Tail statistics (last 20% of the run) of a simulation that tracked mode 1.
pub fn summarize_run(p: &ModelParams, run: &SimRun) -> Result<ScalingPoint> {
    let (ts, c1) = run
        .series(1)
        .ok_or_else(|| Error::InvalidArgument("mode 1 was not tracked".into()))?;
    if ts.len() < 2 {
        return Err(Error::InvalidArgument("run has fewer than two samples".into()));
    }
    let mu = p.onset().mu;
    let t_end = ts[ts.len() - 1];
    let sample_interval = ts[1] - ts[0];
    let tail_start = ts.iter().position(|&t| t >= 0.8 * t_end).unwrap_or(0);
    let omega = p.onset().omega.max(0.1);
    let window = ((2.0 * 2.0 * PI / omega) / sample_interval).ceil() as usize;
    let mods: Vec<f64> = c1[tail_start..].iter().map(|z| z.norm()).collect();
    let env = envelope(&mods, window);
    let env = if env.len() > 1 { &env[..env.len() - 1] } else { &env[..] };
    let (lo, hi) = env.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    let amplitude = *env.last().unwrap_or(&0.0);
    let decayed = hi < DECAY_TOL;
    let envelope_variation = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let frequency = if decayed {
        None
    } else {
        oscillation_frequency(&ts[tail_start..], &c1[tail_start..]).ok()
    };
    let uniform = [p.alpha(), p.beta() / p.alpha()];
    let m0: Vec<Complex64> = run.samples[tail_start..]
        .iter()
        .map(|s| Complex64::new(s.means[0] - uniform[0], s.means[1] - uniform[1]))
        .collect();
    let mode0_amplitude = m0.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
    Ok(ScalingPoint {
        mu,
        amplitude,
        envelope_variation,
        // fewer than three envelope windows in the tail cannot show saturation
        settled: decayed || (env.len() >= 3 && envelope_variation < SATURATION_TOL),
        decayed,
        frequency,
        mode0_amplitude,
        mode0_frequency: oscillation_frequency(&ts[tail_start..], &m0).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<ScalingPoint>,
    /// log-log slope of amplitude against `mu`; `None` when every amplitude decayed.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub residuals: Vec<f64>,
    /// Linear extrapolation of the frequency to `mu = 0`.
    pub frequency_limit: Option<f64>,
    pub verdict: String,
}

/// Fit already computed points; fails with `NoSaturation` on the first unsettled one.
pub fn fit_scaling(points: Vec<ScalingPoint>) -> Result<ScalingFit> {
    if let Some(p) = points.iter().find(|p| !p.settled) {
        return Err(Error::NoSaturation {
            mu: p.mu,
            detail: format!(
                "mode-1 envelope varies by {:.2}% over the last 20% of the run (amplitude {:.3e})",
                100.0 * p.envelope_variation,
                p.amplitude
            ),
        });
    }
    if points.iter().all(|p| p.decayed) {
        return Ok(ScalingFit {
            points,
            slope: None,
            intercept: None,
            residuals: vec![],
            frequency_limit: None,
            verdict: "all amplitudes decayed; no slope fitted".into(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.mu.abs().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.amplitude.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept, residuals) = linear_fit(&xs, &ys);
    let freq: Vec<(f64, f64)> = points.iter().filter_map(|p| p.frequency.map(|f| (p.mu, f))).collect();
    let frequency_limit = (freq.len() >= 2).then(|| {
        let (mx, fy): (Vec<f64>, Vec<f64>) = freq.into_iter().unzip();
        linear_fit(&mx, &fy).1
    });
    Ok(ScalingFit {
        points,
        slope: Some(slope),
        intercept: Some(intercept),
        residuals,
        frequency_limit,
        verdict: format!("log-log slope {slope:.4}"),
    })
}

/// One simulation per `mu`, run on separate threads.
pub fn amplitude_scaling_experiment(params: &ModelParams, mus: &[f64], cfg: &SimConfig) -> Result<ScalingFit> {
    let points: Vec<Result<ScalingPoint>> = std::thread::scope(|s| {
        let handles: Vec<_> = mus.iter().map(|&mu| s.spawn(move || scaling_point(params, mu, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("scaling worker panicked")).collect()
    });
    fit_scaling(points.into_iter().collect::<Result<Vec<_>>>()?)
}
