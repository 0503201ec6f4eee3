//! Explicit three-level leapfrog evolution of the Einstein–Rosen and Gowdy
//! wave systems.
//!
//! ER lives on the staggered radial grid ρ_j = (j+½)h with an even
//! reflection ghost across the axis and a first-order outgoing condition at
//! the last sample. Gowdy lives on m distinct periodic θ samples. Terms that
//! involve time derivatives are evaluated with the centred velocity and
//! iterated to a fixed point within each step.

use std::f64::consts::TAU;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BaseMetric, Minkowski};
use crate::models::boundary::{classify, closed_defects, open_defects, BoundaryReport, Slice};
use crate::models::er;
use crate::models::gowdy::{self, AvtdParams, GowdyBase};

/// Sup-norm beyond which a run is declared unstable.
pub const BLOWUP: f64 = 1e6;
const PICARD_TOL: f64 = 1e-15;
const PICARD_MAX: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolveModel {
    Er,
    Gowdy,
}

impl EvolveModel {
    pub fn name(self) -> &'static str {
        match self {
            EvolveModel::Er => "er",
            EvolveModel::Gowdy => "gowdy",
        }
    }

    pub fn coords(self) -> [&'static str; 2] {
        match self {
            EvolveModel::Er => er::COORDS,
            EvolveModel::Gowdy => gowdy::COORDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveConfig {
    pub cfl: f64,
    pub t_final: f64,
    pub output_stride: usize,
    /// Upper bound on the time step. Gowdy steps otherwise grow like e^τ.
    pub max_dt: f64,
    /// Tolerance for the per-frame boundary classification.
    pub boundary_tol: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { cfl: 0.5, t_final: 1.0, output_stride: 1, max_dt: 0.01, boundary_tol: 1e-2 }
    }
}

impl EvolveConfig {
    pub fn validate(&self, t0: f64) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if self.output_stride == 0 {
            return Err(Error::Config("output_stride must be at least 1".into()));
        }
        if !(self.max_dt > 0.0) {
            return Err(Error::Config(format!("max_dt must be positive, got {}", self.max_dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > t0) {
            return Err(Error::Config(format!("t_final = {} must exceed the initial time {t0}", self.t_final)));
        }
        Ok(())
    }
}

/// Fields and their time derivatives on the spatial grid at the initial
/// time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Initial {
    pub model: EvolveModel,
    pub t0: f64,
    pub spacing: f64,
    pub coords: Vec<f64>,
    pub fields: [Vec<f64>; 2],
    pub velocities: [Vec<f64>; 2],
}

type Profile<'a> = &'a dyn Fn(f64) -> f64;

impl Initial {
    fn build(model: EvolveModel, t0: f64, spacing: f64, coords: Vec<f64>, f: [Profile; 4]) -> Result<Self> {
        let sample = |g: Profile| coords.iter().map(|&x| g(x)).collect::<Vec<_>>();
        let init = Initial {
            model,
            t0,
            spacing,
            fields: [sample(f[0]), sample(f[1])],
            velocities: [sample(f[2]), sample(f[3])],
            coords,
        };
        init.validate()?;
        Ok(init)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.coords.len();
        if n < 8 {
            return Err(Error::GridTooSmall(format!("{n} spatial samples; need at least 8")));
        }
        for (c, v) in self.fields.iter().chain(&self.velocities).enumerate() {
            if v.len() != n {
                return Err(Error::InvalidGrid(format!("initial array {c} has {} samples, expected {n}", v.len())));
            }
            if let Some(j) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { component: c, i: 0, j });
            }
        }
        Ok(())
    }

    /// Gowdy data on `n_theta` distinct samples θ_j = 2πj/n_theta.
    pub fn gowdy(
        tau0: f64,
        n_theta: usize,
        p: Profile,
        q: Profile,
        p_tau: Profile,
        q_tau: Profile,
    ) -> Result<Self> {
        let h = TAU / n_theta as f64;
        let coords = (0..n_theta).map(|j| j as f64 * h).collect();
        Self::build(EvolveModel::Gowdy, tau0, h, coords, [p, q, p_tau, q_tau])
    }

    /// Gowdy data from the AVTD closed form at τ₀.
    pub fn gowdy_avtd(params: &AvtdParams, tau0: f64, n_theta: usize) -> Result<Self> {
        let h = TAU / n_theta as f64;
        let vals = (0..n_theta)
            .map(|j| gowdy::avtd(params, [tau0, j as f64 * h]))
            .collect::<Result<Vec<_>>>()?;
        let pick = |f: fn(&gowdy::AvtdValue) -> f64| vals.iter().map(f).collect::<Vec<_>>();
        let init = Initial {
            model: EvolveModel::Gowdy,
            t0: tau0,
            spacing: h,
            coords: (0..n_theta).map(|j| j as f64 * h).collect(),
            fields: [pick(|v| v.p), pick(|v| v.q)],
            velocities: [pick(|v| v.p_tau), pick(|v| v.q_tau)],
        };
        init.validate()?;
        Ok(init)
    }

    /// ER data on the staggered grid ρ_j = (j+½)h, h = rho_max/n_rho.
    pub fn er(
        t0: f64,
        rho_max: f64,
        n_rho: usize,
        psi: Profile,
        omega: Profile,
        psi_t: Profile,
        omega_t: Profile,
    ) -> Result<Self> {
        if !(rho_max > 0.0) {
            return Err(Error::InvalidGrid(format!("rho_max must be positive, got {rho_max}")));
        }
        let h = rho_max / n_rho as f64;
        let coords = (0..n_rho).map(|j| (j as f64 + 0.5) * h).collect();
        Self::build(EvolveModel::Er, t0, h, coords, [psi, omega, psi_t, omega_t])
    }

    /// ψ = J₀(ρ), ψ_t = 0, Ω = 0 at t = 0.
    pub fn er_bessel(rho_max: f64, n_rho: usize) -> Result<Self> {
        let zero = |_: f64| 0.0;
        Self::er(0.0, rho_max, n_rho, &crate::special::bessel_j0, &zero, &zero, &zero)
    }

    /// Regular pulse of width `a` at t = 0.
    pub fn er_pulse(a: f64, rho_max: f64, n_rho: usize) -> Result<Self> {
        let zero = |_: f64| 0.0;
        let psi = |r: f64| er::pulse(a, [0.0, r]).0;
        let psi_t = |r: f64| er::pulse(a, [0.0, r]).1;
        Self::er(0.0, rho_max, n_rho, &psi, &zero, &psi_t, &zero)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDiagnostics {
    /// Fixed-point residual of the step that produced this level, in units
    /// of the field equations.
    pub step_residual: f64,
    /// Sup-norm of the conservation-law component that encodes potential
    /// integrability (ER: t, Gowdy: θ), from three time levels.
    pub conservation: Option<f64>,
    /// ER: ∫T_tt dρ up to the last trusted radius.
    pub energy: Option<f64>,
    /// ER: T_tρ at that radius.
    pub energy_flux: Option<f64>,
    /// ER: |dE/dt − flux|.
    pub energy_balance: Option<f64>,
    /// Gowdy: ∮ ∂_θλ dθ = ∮ 4T_τθ dθ.
    pub lambda_closure: Option<f64>,
    pub boundary: BoundaryReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub level: usize,
    pub time: f64,
    /// Step that produced this level (the first step for level 0).
    pub dt: f64,
    pub fields: [Vec<f64>; 2],
    pub velocities: [Vec<f64>; 2],
    pub diagnostics: FrameDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub model: EvolveModel,
    pub coords: Vec<f64>,
    pub spacing: f64,
    pub steps: usize,
    pub frames: Vec<Frame>,
}

impl Evolution {
    pub fn last(&self) -> &Frame {
        self.frames.last().expect("an evolution has at least the initial frame")
    }
}

/// Last radius not yet reached by signals from the outer boundary after
/// evolving for `elapsed` (with half a unit of margin).
pub fn er_trusted_radius(rho_max: f64, elapsed: f64) -> f64 {
    rho_max - elapsed - 0.5
}

type Pair = [Vec<f64>; 2];

struct Disc {
    model: EvolveModel,
    h: f64,
    coords: Vec<f64>,
    t0: f64,
}

impl Disc {
    fn n(&self) -> usize {
        self.coords.len()
    }

    /// Number of leading ER samples inside the trusted radius at time `t`.
    fn trusted(&self, t: f64) -> usize {
        let r = er_trusted_radius(self.n() as f64 * self.h, t - self.t0);
        self.coords.iter().take_while(|&&rho| rho <= r).count()
    }

    /// Number of samples advanced by the interior scheme.
    fn active(&self) -> usize {
        match self.model {
            EvolveModel::Er => self.n() - 1,
            EvolveModel::Gowdy => self.n(),
        }
    }

    fn neighbours(&self, x: &[f64], j: usize) -> (f64, f64) {
        let n = self.n();
        match self.model {
            EvolveModel::Er => (if j == 0 { x[0] } else { x[j - 1] }, x[j + 1]),
            EvolveModel::Gowdy => (x[(j + n - 1) % n], x[(j + 1) % n]),
        }
    }

    /// First and second spatial derivatives at an active sample.
    fn d(&self, x: &[f64], j: usize) -> (f64, f64) {
        let (l, r) = self.neighbours(x, j);
        ((r - l) * (0.5 / self.h), (r - 2.0 * x[j] + l) / (self.h * self.h))
    }

    /// First derivative at any sample (one-sided at the ER outer edge).
    fn d1_any(&self, x: &[f64], j: usize) -> f64 {
        if j < self.active() {
            self.d(x, j).0
        } else {
            (3.0 * x[j] - 4.0 * x[j - 1] + x[j - 2]) / (2.0 * self.h)
        }
    }

    /// Second time derivatives from the field equations.
    fn accel(&self, t: f64, x: &Pair, v: &Pair) -> Pair {
        let n = self.n();
        let mut out = [vec![0.0; n], vec![0.0; n]];
        match self.model {
            EvolveModel::Er => {
                for j in 0..self.active() {
                    let rho = self.coords[j];
                    let (p1, p2) = self.d(&x[0], j);
                    let (o1, o2) = self.d(&x[1], j);
                    let e = (-4.0 * x[0][j]).exp();
                    let (pt, ot) = (v[0][j], v[1][j]);
                    out[0][j] = p2 + p1 / rho + 0.5 * e * (o1 * o1 - ot * ot);
                    out[1][j] = o2 + o1 / rho + 4.0 * (ot * pt - o1 * p1);
                }
            }
            EvolveModel::Gowdy => {
                let e = (-2.0 * t).exp();
                for j in 0..n {
                    let (p1, p2) = self.d(&x[0], j);
                    let (q1, q2) = self.d(&x[1], j);
                    let e2p = (2.0 * x[0][j]).exp();
                    let (pt, qt) = (v[0][j], v[1][j]);
                    out[0][j] = e * p2 + e2p * (qt * qt - e * q1 * q1);
                    out[1][j] = e * q2 - 2.0 * (pt * qt - e * p1 * q1);
                }
            }
        }
        out
    }

    /// First-order upwind update of the outgoing ER edge sample.
    fn outer_edge(&self, x: &Pair, k: f64, next: &mut Pair) {
        if self.model == EvolveModel::Er {
            let j = self.n() - 1;
            let rho = self.coords[j];
            for c in 0..2 {
                let dx = (x[c][j] - x[c][j - 1]) / self.h;
                next[c][j] = x[c][j] - k * (dx + x[c][j] / (2.0 * rho));
            }
        }
    }

    fn dt(&self, t: f64, cfl: f64, max_dt: f64) -> f64 {
        let speed = match self.model {
            EvolveModel::Er => 1.0,
            EvolveModel::Gowdy => (-t).exp(),
        };
        (cfl * self.h / speed).min(max_dt)
    }

    /// (T_tt, T_tx) per sample: ER (T_tt, T_tρ), Gowdy (T_ττ, T_τθ).
    fn emt(&self, t: f64, x: &Pair, v: &Pair) -> [Vec<f64>; 2] {
        let n = self.n();
        let mut out = [vec![0.0; n], vec![0.0; n]];
        for j in 0..n {
            let jet = |c: usize| crate::grid::ScalarJet {
                v: x[c][j],
                d: [v[c][j], self.d1_any(&x[c], j)],
                dd: [[0.0; 2]; 2],
            };
            let [a, b] = match self.model {
                EvolveModel::Er => er::er_emt_point(self.coords[j], &jet(0), &jet(1)),
                EvolveModel::Gowdy => gowdy::gowdy_emt_point(t, &jet(0), &jet(1)),
            };
            out[0][j] = a;
            out[1][j] = b;
        }
        out
    }
}

fn sup(p: &Pair) -> f64 {
    p.iter().flatten().fold(0.0_f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY })
}

#[derive(Clone)]
struct Level {
    t: f64,
    x: Pair,
    v: Pair,
}

/// Second-order backward derivative at the newest of three levels.
fn backward3(levels: [&Level; 3], vals: [f64; 3]) -> f64 {
    let k1 = levels[2].t - levels[1].t;
    let k2 = levels[1].t - levels[0].t;
    vals[2] * (2.0 * k1 + k2) / (k1 * (k1 + k2)) - vals[1] * (k1 + k2) / (k1 * k2)
        + vals[0] * k1 / (k2 * (k1 + k2))
}

struct Diagnostics<'a> {
    disc: &'a Disc,
    config: &'a EvolveConfig,
    history: Vec<Level>,
}

impl Diagnostics<'_> {
    /// Appends a level to the three-level history.
    fn record(&mut self, state: Level) {
        self.history.push(state);
        if self.history.len() > 3 {
            self.history.remove(0);
        }
    }

    /// Frame for the most recently recorded level.
    fn frame(&self, level: usize, step_residual: f64, dt: f64) -> Frame {
        let d = self.disc;
        let state = self.history.last().expect("a level has been recorded");
        let ts: Vec<[Vec<f64>; 2]> = self.history.iter().map(|l| d.emt(l.t, &l.x, &l.v)).collect();
        let now = ts.last().expect("one level at least");
        let full = self.history.len() == 3;
        let levels = || [&self.history[0], &self.history[1], &self.history[2]];
        let mut diag = FrameDiagnostics {
            step_residual,
            conservation: None,
            energy: None,
            energy_flux: None,
            energy_balance: None,
            lambda_closure: None,
            boundary: self.boundary(state),
        };
        match d.model {
            EvolveModel::Er => {
                // Only samples the outer boundary cannot yet have influenced.
                let trusted = d.trusted(state.t);
                if trusted >= 4 {
                    let jmax = trusted - 2;
                    let energy = |t: &[Vec<f64>; 2]| t[0][..=jmax].iter().sum::<f64>() * d.h;
                    let flux = 0.5 * (now[1][jmax] + now[1][jmax + 1]);
                    diag.energy = Some(energy(now));
                    diag.energy_flux = Some(flux);
                    if full {
                        let de = backward3(levels(), [energy(&ts[0]), energy(&ts[1]), energy(&ts[2])]);
                        diag.energy_balance = Some((de - flux).abs());
                        diag.conservation = Some(self.conservation(&ts, 0, 1, 1..trusted - 1));
                    }
                }
            }
            EvolveModel::Gowdy => {
                diag.lambda_closure = Some(4.0 * now[1].iter().sum::<f64>() * d.h);
                if full {
                    diag.conservation = Some(self.conservation(&ts, 1, 0, 0..d.n()));
                }
            }
        }
        Frame {
            level,
            time: state.t,
            dt,
            fields: state.x.clone(),
            velocities: state.v.clone(),
            diagnostics: diag,
        }
    }

    /// sup |∂_t T[time_c] − ∂_x T[space_c]| over `range`: ER ∂_tT_tt − ∂_ρT_tρ,
    /// Gowdy ∂_τT_τθ − ∂_θT_ττ.
    fn conservation(&self, ts: &[[Vec<f64>; 2]], time_c: usize, space_c: usize, range: Range<usize>) -> f64 {
        let d = self.disc;
        let levels = [&self.history[0], &self.history[1], &self.history[2]];
        range
            .map(|j| {
                let dt = backward3(levels, [ts[0][time_c][j], ts[1][time_c][j], ts[2][time_c][j]]);
                let (l, r) = d.neighbours(&ts[2][space_c], j);
                dt - (r - l) * (0.5 / d.h)
            })
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    fn boundary(&self, s: &Level) -> BoundaryReport {
        let d = self.disc;
        let (fields, velocities, periodic): (Vec<Vec<f64>>, Vec<Vec<f64>>, bool) = match d.model {
            EvolveModel::Er => (s.x.to_vec(), s.v.to_vec(), false),
            EvolveModel::Gowdy => {
                let wrap = |p: &Pair| {
                    p.iter()
                        .map(|c| c.iter().copied().chain(std::iter::once(c[0])).collect())
                        .collect()
                };
                (wrap(&s.x), wrap(&s.v), true)
            }
        };
        let slice = Slice { t: s.t, origin: d.coords[0], spacing: d.h, fields: &fields, velocities: &velocities };
        let base: &dyn BaseMetric = match d.model {
            EvolveModel::Er => &Minkowski,
            EvolveModel::Gowdy => &GowdyBase,
        };
        classify(open_defects(&slice), closed_defects(&slice, base), periodic, self.config.boundary_tol)
    }
}

/// Velocity at the newest level from X^n = X^{n−1} + kV^n − ½k²F(X^n, V^n).
fn end_velocity(d: &Disc, t: f64, x: &Pair, prev: &Pair, k: f64) -> Pair {
    let n = d.n();
    let base: Pair = [0, 1].map(|c| (0..n).map(|j| (x[c][j] - prev[c][j]) / k).collect());
    let mut v = base.clone();
    for _ in 0..PICARD_MAX {
        let f = d.accel(t, x, &v);
        let next: Pair = [0, 1].map(|c| (0..n).map(|j| base[c][j] + 0.5 * k * f[c][j]).collect());
        let change = (0..2)
            .flat_map(|c| (0..n).map(move |j| (c, j)))
            .fold(0.0_f64, |m, (c, j)| m.max((next[c][j] - v[c][j]).abs()));
        v = next;
        if change <= PICARD_TOL * sup(&v).max(1.0) {
            break;
        }
    }
    v
}

/// Integrates from the initial data to `config.t_final`.
pub fn evolve(initial: &Initial, config: &EvolveConfig) -> Result<Evolution> {
    initial.validate()?;
    config.validate(initial.t0)?;
    let d = Disc { model: initial.model, h: initial.spacing, coords: initial.coords.clone(), t0: initial.t0 };
    let n = d.n();
    let mut diags = Diagnostics { disc: &d, config, history: Vec::new() };

    let mut frames = Vec::new();
    let mut t = initial.t0;
    let mut prev = initial.fields.clone();
    diags.record(Level { t, x: prev.clone(), v: initial.velocities.clone() });

    let next_step = |t: f64| {
        let k = d.dt(t, config.cfl, config.max_dt);
        let remaining = config.t_final - t;
        if remaining <= k * (1.0 + 1e-9) {
            remaining
        } else if remaining < 2.0 * k {
            0.5 * remaining
        } else {
            k
        }
    };

    // Taylor first step.
    let k0 = next_step(t);
    frames.push(diags.frame(0, 0.0, k0));
    let f0 = d.accel(t, &initial.fields, &initial.velocities);
    let mut cur: Pair = [0, 1].map(|c| {
        (0..n).map(|j| initial.fields[c][j] + k0 * initial.velocities[c][j] + 0.5 * k0 * k0 * f0[c][j]).collect()
    });
    d.outer_edge(&initial.fields, k0, &mut cur);
    t += k0;
    let mut k_prev = k0;
    let mut level = 1;
    let mut step_residual = 0.0;

    loop {
        if !(sup(&cur) <= BLOWUP) {
            return Err(Error::Unstable { frame: level, time: t });
        }
        let done = t >= config.t_final - 1e-12 * config.t_final.abs().max(1.0);
        let v = end_velocity(&d, t, &cur, &prev, k_prev);
        diags.record(Level { t, x: cur.clone(), v });
        if level % config.output_stride == 0 || done {
            frames.push(diags.frame(level, step_residual, k_prev));
        }
        if done {
            break;
        }

        let k = next_step(t);
        let r = k / k_prev;
        let c = 0.5 * k * (k + k_prev);
        let denom = k * k_prev * (k + k_prev);
        let mut next: Pair = [0, 1].map(|cc| (0..n).map(|j| cur[cc][j] + r * (cur[cc][j] - prev[cc][j])).collect());
        let active = d.active();
        let velocity = |next: &Pair| -> Pair {
            [0, 1].map(|cc| {
                (0..n)
                    .map(|j| {
                        (k_prev * k_prev * (next[cc][j] - cur[cc][j]) + k * k * (cur[cc][j] - prev[cc][j])) / denom
                    })
                    .collect()
            })
        };
        for _ in 0..PICARD_MAX {
            let f = d.accel(t, &cur, &velocity(&next));
            let mut change = 0.0_f64;
            for cc in 0..2 {
                for j in 0..active {
                    let v = cur[cc][j] + r * (cur[cc][j] - prev[cc][j]) + c * f[cc][j];
                    change = change.max((v - next[cc][j]).abs());
                    next[cc][j] = v;
                }
            }
            if change <= PICARD_TOL * sup(&next).max(1.0) {
                break;
            }
        }
        let f = d.accel(t, &cur, &velocity(&next));
        step_residual = (0..2)
            .flat_map(|cc| (0..active).map(move |j| (cc, j)))
            .map(|(cc, j)| {
                let lhs = 2.0 * (k_prev * (next[cc][j] - cur[cc][j]) - k * (cur[cc][j] - prev[cc][j])) / denom;
                (lhs - f[cc][j]).abs()
            })
            .fold(0.0, f64::max);
        d.outer_edge(&cur, k, &mut next);
        prev = std::mem::replace(&mut cur, next);
        k_prev = k;
        t += k;
        level += 1;
    }

    Ok(Evolution { model: d.model, coords: d.coords.clone(), spacing: d.h, steps: level, frames })
}
