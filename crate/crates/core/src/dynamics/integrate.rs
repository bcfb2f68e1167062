use std::io::Write;

use serde::{Deserialize, Serialize};

use super::field::{field_into, FieldBuffers};
use crate::game::{Game, Player, SimplexPoint};
use crate::{Error, Result};

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Total integrated time `T`.
    pub horizon: f64,
    /// Keep one sample every `record_stride` steps.
    pub record_stride: usize,
    /// Entries are clamped to at least this value after every step.
    pub interior_floor: f64,
}

const MAX_STEPS: f64 = 1e11;
const MAX_SAMPLES: f64 = 1e8;

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            horizon: 1000.0,
            record_stride: 10,
            interior_floor: 1e-12,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, horizon: f64, record_stride: usize) -> Self {
        IntegratorConfig {
            dt,
            horizon,
            record_stride,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Input(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Input(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.record_stride == 0 {
            return Err(Error::Input("record_stride must be at least 1".into()));
        }
        if !(self.interior_floor >= 0.0 && self.interior_floor < 0.5) {
            return Err(Error::Input("interior_floor must lie in [0, 0.5)".into()));
        }
        let steps = self.horizon / self.dt;
        if !(steps >= 1.0 && steps <= MAX_STEPS) {
            return Err(Error::Input(format!("horizon / dt = {steps:e} must lie in [1, {MAX_STEPS:e}]")));
        }
        if steps / self.record_stride as f64 > MAX_SAMPLES {
            return Err(Error::Input(format!("more than {MAX_SAMPLES:e} samples; raise record_stride")));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Time between recorded samples.
    pub fn spacing(&self) -> f64 {
        self.dt * self.record_stride as f64
    }
}

/// Uniformly sampled joint strategy path `(x^t, y^t)`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    game: Game,
    config: IntegratorConfig,
    times: Vec<f64>,
    /// Flat `[x; y]` blocks, one per sample.
    states: Vec<f64>,
    /// Compensation terms of the integrator: the carried state is
    /// `states + residuals`.
    residuals: Vec<f64>,
}

impl Trajectory {
    /// Build a trajectory from explicit samples spaced `spacing` apart. Used
    /// for prescribed (non-replicator) strategy processes.
    pub fn from_samples(
        game: &Game,
        spacing: f64,
        samples: impl IntoIterator<Item = (SimplexPoint, SimplexPoint)>,
    ) -> Result<Self> {
        let mut states = Vec::new();
        for (x, y) in samples {
            if (x.len(), y.len()) != (game.n(), game.m()) {
                return Err(Error::Dimension("sample does not match the game".into()));
            }
            states.extend_from_slice(x.as_slice());
            states.extend_from_slice(y.as_slice());
        }
        let dim = game.n() + game.m();
        let len = states.len() / dim;
        let config = IntegratorConfig {
            dt: spacing,
            horizon: spacing * len.saturating_sub(1) as f64,
            record_stride: 1,
            ..Default::default()
        };
        Ok(Trajectory {
            game: game.clone(),
            config,
            times: (0..len).map(|k| k as f64 * spacing).collect(),
            residuals: vec![0.0; states.len()],
            states,
        })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, k: usize) -> f64 {
        self.times[k]
    }

    /// Sample spacing `dt * record_stride`.
    pub fn spacing(&self) -> f64 {
        self.config.spacing()
    }

    pub fn dim(&self) -> usize {
        self.game.n() + self.game.m()
    }

    /// Joint state `[x; y]` of sample `k`.
    pub fn state(&self, k: usize) -> &[f64] {
        let d = self.dim();
        &self.states[k * d..(k + 1) * d]
    }

    /// Low-order part of sample `k` (zero for prescribed samples).
    pub fn residual(&self, k: usize) -> &[f64] {
        let d = self.dim();
        &self.residuals[k * d..(k + 1) * d]
    }

    pub fn x(&self, k: usize) -> &[f64] {
        &self.state(k)[..self.game.n()]
    }

    pub fn y(&self, k: usize) -> &[f64] {
        &self.state(k)[self.game.n()..]
    }

    pub fn strategy(&self, k: usize, player: Player) -> &[f64] {
        match player {
            Player::Row => self.x(k),
            Player::Col => self.y(k),
        }
    }

    pub fn final_state(&self) -> (SimplexPoint, SimplexPoint) {
        let k = self.len() - 1;
        (
            SimplexPoint::normalized(self.x(k).to_vec()).expect("recorded states are on the simplex"),
            SimplexPoint::normalized(self.y(k).to_vec()).expect("recorded states are on the simplex"),
        )
    }

    /// Utility vector faced by `player` at sample `k`.
    pub fn utilities_into(&self, k: usize, player: Player, out: &mut [f64]) {
        match player {
            Player::Row => self.game.row_utilities_into(self.y(k), out),
            Player::Col => self.game.col_utilities_into(self.x(k), out),
        }
    }

    /// Replicator field at sample `k`.
    pub fn velocity(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        field_into(&self.game, self.state(k), &mut out, &mut FieldBuffers::new(&self.game));
        out
    }

    /// State at time `t` by cubic Hermite interpolation between the
    /// bracketing samples, using the replicator field as the derivative.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let h = self.spacing();
        let last = self.len() - 1;
        let k = ((t / h).floor().max(0.0) as usize).min(last.saturating_sub(1));
        if last == 0 {
            return self.state(0).to_vec();
        }
        let s = ((t - self.times[k]) / h).clamp(0.0, 1.0);
        let (p0, p1) = (self.state(k), self.state(k + 1));
        let (m0, m1) = (self.velocity(k), self.velocity(k + 1));
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (0..self.dim())
            .map(|i| h00 * p0[i] + h10 * h * m0[i] + h01 * p1[i] + h11 * h * m1[i])
            .collect()
    }

    /// CSV with header `t,x1,...,xn,y1,...,ym` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.game.n()).map(|i| format!("x{i}")));
        header.extend((1..=self.game.m()).map(|j| format!("y{j}")));
        writeln!(w, "{}", header.join(","))?;
        for k in 0..self.len() {
            write!(w, "{:.16e}", self.times[k])?;
            for v in self.state(k) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Clamp and renormalize one strategy block held as an unevaluated sum
/// `hi + lo`, so the rescaling does not add a rounding error per step.
fn project(hi: &mut [f64], lo: &mut [f64], floor: f64) {
    for (h, l) in hi.iter_mut().zip(lo.iter_mut()) {
        if *h < floor {
            *h = floor;
            *l = 0.0;
        }
    }
    // excess = sum(hi + lo) - 1
    let mut acc = -1.0;
    let mut comp = 0.0;
    for (&h, &l) in hi.iter().zip(lo.iter()) {
        let (a, e) = two_sum(acc, h);
        acc = a;
        comp += e + l;
    }
    let excess = acc + comp;
    if excess == 0.0 {
        return;
    }
    let shrink = excess / (1.0 + excess);
    for (h, l) in hi.iter_mut().zip(lo.iter_mut()) {
        let (a, e) = two_sum(*h, *l - *h * shrink);
        *h = a;
        *l = e;
    }
}

/// Same arithmetic as the general field, unrolled for 2x2 games.
#[inline(always)]
fn field_2x2(a: &[f64; 4], b: &[f64; 4], z: &[f64], out: &mut [f64]) {
    let (x0, x1, y0, y1) = (z[0], z[1], z[2], z[3]);
    let u0 = a[0] * y0 + a[1] * y1;
    let u1 = a[2] * y0 + a[3] * y1;
    let w0 = x0 * b[0] + x1 * b[2];
    let w1 = x0 * b[1] + x1 * b[3];
    let ru = x0 * u0 + x1 * u1;
    let cw = y0 * w0 + y1 * w1;
    out[0] = x0 * (u0 - ru);
    out[1] = x1 * (u1 - ru);
    out[2] = y0 * (w0 - cw);
    out[3] = y1 * (w1 - cw);
}

type Recorded = (Vec<f64>, Vec<f64>, Vec<f64>);

fn rk4<F: FnMut(&[f64], &mut [f64])>(
    n: usize,
    x0: &SimplexPoint,
    y0: &SimplexPoint,
    cfg: &IntegratorConfig,
    mut field: F,
) -> Result<Recorded> {
    let dim = x0.len() + y0.len();
    let steps = cfg.steps();
    let stride = cfg.record_stride;
    let samples = steps / stride + 1;

    let mut states = Vec::with_capacity(samples * dim);
    let mut residuals = Vec::with_capacity(samples * dim);
    let mut times = Vec::with_capacity(samples);
    let mut z: Vec<f64> = x0.as_slice().iter().chain(y0.as_slice()).copied().collect();
    let mut lo = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let h = cfg.dt;

    states.extend_from_slice(&z);
    residuals.extend_from_slice(&lo);
    times.push(0.0);
    for step in 1..=steps {
        field(&z, &mut k1);
        for i in 0..dim {
            tmp[i] = z[i] + 0.5 * h * k1[i];
        }
        field(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = z[i] + 0.5 * h * k2[i];
        }
        field(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = z[i] + h * k3[i];
        }
        field(&tmp, &mut k4);
        for i in 0..dim {
            let inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            let (a, e) = two_sum(z[i], inc + lo[i]);
            z[i] = a;
            lo[i] = e;
        }
        if let Some(bad) = z.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                step,
                detail: format!("state component {bad} became {}", z[bad]),
            });
        }
        let (x, y) = z.split_at_mut(n);
        let (xl, yl) = lo.split_at_mut(n);
        project(x, xl, cfg.interior_floor);
        project(y, yl, cfg.interior_floor);
        if step % stride == 0 {
            states.extend_from_slice(&z);
            residuals.extend_from_slice(&lo);
            times.push(step as f64 * h);
        }
    }
    Ok((times, states, residuals))
}

/// Integrate the replicator dynamics from an interior start with classical
/// RK4, clamping to `interior_floor` and renormalizing after every step.
/// Samples are kept at steps `0, stride, 2 stride, ...`. The state is
/// carried with a compensation term so rounding stays well below the
/// truncation error of the scheme.
pub fn integrate(
    g: &Game,
    x0: &SimplexPoint,
    y0: &SimplexPoint,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if (x0.len(), y0.len()) != (g.n(), g.m()) {
        return Err(Error::Dimension("initial strategies do not match the game".into()));
    }
    if !(x0.is_interior(f64::MIN_POSITIVE) && y0.is_interior(f64::MIN_POSITIVE)) {
        return Err(Error::Input("initial strategies must be strictly interior".into()));
    }
    let (times, states, residuals) = if g.n() == 2 && g.m() == 2 {
        let p = [g.a(0, 0), g.a(0, 1), g.a(1, 0), g.a(1, 1)];
        let q = [g.b(0, 0), g.b(0, 1), g.b(1, 0), g.b(1, 1)];
        rk4(2, x0, y0, cfg, |z, out| field_2x2(&p, &q, z, out))?
    } else {
        let mut buf = FieldBuffers::new(g);
        rk4(g.n(), x0, y0, cfg, |z, out| field_into(g, z, out, &mut buf))?
    };
    Ok(Trajectory {
        game: g.clone(),
        config: *cfg,
        times,
        states,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::classic;

    fn mp_start() -> (SimplexPoint, SimplexPoint) {
        (
            SimplexPoint::new(vec![0.9, 0.1]).unwrap(),
            SimplexPoint::uniform(2),
        )
    }

    #[test]
    fn unrolled_field_matches_general_path() {
        let g = crate::bruns::enumerate_144()[37].1.clone();
        let (x0, y0) = (SimplexPoint::binary(0.2).unwrap(), SimplexPoint::binary(0.7).unwrap());
        let cfg = IntegratorConfig::new(1e-2, 20.0, 5);
        let fast = integrate(&g, &x0, &y0, &cfg).unwrap();
        let mut buf = FieldBuffers::new(&g);
        let (_, states, _) = rk4(2, &x0, &y0, &cfg, |z, out| field_into(&g, z, out, &mut buf)).unwrap();
        assert_eq!(fast.states, states);
    }

    #[test]
    fn rest_point_stays_put() {
        let h = SimplexPoint::uniform(2);
        let traj = integrate(
            &classic::matching_pennies(),
            &h,
            &h,
            &IntegratorConfig::new(1e-3, 10.0, 10),
        )
        .unwrap();
        for k in 0..traj.len() {
            for v in traj.state(k) {
                assert!((v - 0.5).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn samples_are_uniform_and_on_the_simplex() {
        let (x0, y0) = mp_start();
        let cfg = IntegratorConfig::new(1e-3, 50.0, 10);
        let traj = integrate(&classic::matching_pennies(), &x0, &y0, &cfg).unwrap();
        assert_eq!(traj.len(), 5001);
        for k in 0..traj.len() {
            assert!((traj.time(k) - k as f64 * 0.01).abs() < 1e-12);
            assert!((traj.x(k).iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!((traj.y(k).iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(traj.state(k).iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn step_halving_shows_fourth_order() {
        // Richardson study: e(h) = |z_h - z_{h/2}| should shrink ~16x per halving.
        let g = crate::bruns::build_game(crate::bruns::BrunsGameId::new("Ba", "As").unwrap());
        let x0 = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let y0 = SimplexPoint::new(vec![0.8, 0.2]).unwrap();
        let run = |dt: f64| {
            let t = integrate(&g, &x0, &y0, &IntegratorConfig::new(dt, 5.0, 1)).unwrap();
            t.state(t.len() - 1).to_vec()
        };
        let (a, b, c) = (run(0.04), run(0.02), run(0.01));
        let e1 = a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        let e2 = b.iter().zip(&c).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn boundary_start_is_rejected() {
        let g = classic::matching_pennies();
        let err = integrate(
            &g,
            &SimplexPoint::vertex(2, 0),
            &SimplexPoint::uniform(2),
            &IntegratorConfig::default(),
        );
        assert!(matches!(err, Err(Error::Input(_))));
        let bad = IntegratorConfig { dt: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        let g = Game::zero_sum(vec![vec![1e300, -1e300], vec![-1e300, 1e300]]).unwrap();
        let (x0, _) = mp_start();
        let y0 = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        match integrate(&g, &x0, &y0, &IntegratorConfig::new(1.0, 10.0, 1)) {
            Err(Error::Numerical { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }

    #[test]
    fn hermite_interpolation_tracks_fine_grid() {
        let g = classic::matching_pennies();
        let (x0, y0) = mp_start();
        let coarse = integrate(&g, &x0, &y0, &IntegratorConfig::new(1e-3, 5.0, 50)).unwrap();
        let fine = integrate(&g, &x0, &y0, &IntegratorConfig::new(1e-3, 5.0, 1)).unwrap();
        for k in (0..fine.len()).step_by(7) {
            let p = coarse.interpolate(fine.time(k));
            for (a, b) in p.iter().zip(fine.state(k)) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let (x0, y0) = mp_start();
        let traj = integrate(
            &classic::matching_pennies(),
            &x0,
            &y0,
            &IntegratorConfig::new(0.01, 0.1, 1),
        )
        .unwrap();
        let mut out = Vec::new();
        traj.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x1,x2,y1,y2"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 0.9, 0.1, 0.5, 0.5]);
        assert_eq!(text.lines().count(), traj.len() + 1);
    }
}
