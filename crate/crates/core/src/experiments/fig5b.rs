use std::fmt::Write as _;
use std::fs;
use std::io::Write;

use serde::Serialize;

use super::output::{create, version_string};
use super::ExperimentConfig;
use crate::bruns::enumerate_144;
use crate::dynamics::rd_vector_field;
use crate::game::{classify_case, interior_nash_2x2, pure_nash_set, CaseClass, Game, SimplexPoint};
use crate::Result;

/// Circulation of the field around a small square centred on the interior
/// equilibrium of a Case I game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CirculationCheck {
    pub game: String,
    /// Counter-clockwise line integral of `(dx_1, dy_1)`.
    pub line_integral: f64,
    /// Extremes of `r x F` over the loop, `r` measured from the equilibrium.
    pub min_cross: f64,
    pub max_cross: f64,
}

impl CirculationCheck {
    pub fn consistent(&self) -> bool {
        (self.min_cross > 0.0 || self.max_cross < 0.0) && self.line_integral.signum() == self.max_cross.signum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig5bResult {
    /// Grid rows written to the combined CSV.
    pub rows: usize,
    /// Largest field magnitude at any marked equilibrium.
    pub max_equilibrium_speed: f64,
    pub circulation: Vec<CirculationCheck>,
}

impl Fig5bResult {
    pub fn summary(&self) -> String {
        let ok = self.circulation.iter().filter(|c| c.consistent()).count();
        format!(
            "fig5b: {} grid rows, max field at equilibria {:.1e}, {}/{} Case I games circulate consistently",
            self.rows,
            self.max_equilibrium_speed,
            ok,
            self.circulation.len()
        )
    }
}

/// `(dx_1, dy_1)` at `(x_1, y_1)`.
fn field_at(g: &Game, x1: f64, y1: f64) -> (f64, f64) {
    let x = SimplexPoint::binary(x1).expect("grid point in [0, 1]");
    let y = SimplexPoint::binary(y1).expect("grid point in [0, 1]");
    let (dx, dy) = rd_vector_field(g, &x, &y);
    (dx[0], dy[0])
}

/// Equilibria as `(x_1, y_1)`: pure ones first, then the interior one.
/// Games with a vanishing payoff difference get only the pure markers.
fn equilibria(g: &Game) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = pure_nash_set(g)
        .into_iter()
        .map(|(i, j)| (if i == 0 { 1.0 } else { 0.0 }, if j == 0 { 1.0 } else { 0.0 }))
        .collect();
    if let Ok(Some((x, y))) = interior_nash_2x2(g) {
        out.push((x[0], y[0]));
    }
    out
}

fn circulation(g: &Game, center: (f64, f64), half: f64) -> (f64, f64, f64) {
    const PER_SIDE: usize = 200;
    let (cx, cy) = center;
    let corners = [
        (cx - half, cy - half),
        (cx + half, cy - half),
        (cx + half, cy + half),
        (cx - half, cy + half),
    ];
    let mut integral = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in 0..4 {
        let (ax, ay) = corners[s];
        let (bx, by) = corners[(s + 1) % 4];
        let (lx, ly) = ((bx - ax) / PER_SIDE as f64, (by - ay) / PER_SIDE as f64);
        for k in 0..PER_SIDE {
            let f = (k as f64 + 0.5) / PER_SIDE as f64;
            let (px, py) = (ax + f * (bx - ax), ay + f * (by - ay));
            let (fx, fy) = field_at(g, px, py);
            integral += fx * lx + fy * ly;
            let cross = (px - cx) * fy - (py - cy) * fx;
            lo = lo.min(cross);
            hi = hi.max(cross);
        }
    }
    (integral, lo, hi)
}

fn svg(g: &Game, grid: usize, ne: &[(f64, f64)], header: &str) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 20.0;
    let span = SIZE - 2.0 * PAD;
    let px = |x: f64| PAD + x * span;
    // y_1 grows upwards
    let py = |y: f64| SIZE - PAD - y * span;
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(s, "<!-- {} -->", header.replace("--", "- -"));
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">");
    let _ = writeln!(s, "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{span}\" height=\"{span}\" fill=\"white\" stroke=\"black\"/>");
    let cell = span / (grid - 1) as f64;
    for a in 0..grid {
        for b in 0..grid {
            let (x1, y1) = (a as f64 / (grid - 1) as f64, b as f64 / (grid - 1) as f64);
            let (fx, fy) = field_at(g, x1, y1);
            let norm = fx.hypot(fy);
            if norm < 1e-12 {
                continue;
            }
            let len = 0.4 * cell;
            let (ux, uy) = (fx / norm * len, -fy / norm * len);
            let (x0, y0) = (px(x1), py(y1));
            let (x2, y2) = (x0 + ux, y0 + uy);
            let _ = writeln!(
                s,
                "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"steelblue\" stroke-width=\"1\"/>"
            );
            let _ = writeln!(s, "<circle cx=\"{x2:.2}\" cy=\"{y2:.2}\" r=\"1.5\" fill=\"steelblue\"/>");
        }
    }
    for &(x1, y1) in ne {
        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"red\"/>", px(x1), py(y1));
    }
    s.push_str("</svg>\n");
    s
}

/// Replicator field of every Bruns game on a square grid of `(x_1, y_1)`.
pub fn run_fig5b_fields(cfg: &ExperimentConfig) -> Result<Fig5bResult> {
    cfg.validate()?;
    let grid = cfg.fig5b.grid;
    let svg_dir = cfg.out_dir.join("fig5b");
    fs::create_dir_all(&svg_dir)?;
    let header = format!("{} config: {}", version_string(), cfg.to_json());
    let mut csv = create(&cfg.out_dir, "fig5b_fields.csv", cfg)?;
    writeln!(csv, "game_id,x1,y1,dx1,dy1")?;
    let mut rows = 0;
    let mut max_speed: f64 = 0.0;
    let mut circ = Vec::new();
    for (id, g) in enumerate_144() {
        for a in 0..grid {
            for b in 0..grid {
                let (x1, y1) = (a as f64 / (grid - 1) as f64, b as f64 / (grid - 1) as f64);
                let (fx, fy) = field_at(&g, x1, y1);
                writeln!(csv, "{id},{x1},{y1},{fx},{fy}")?;
                rows += 1;
            }
        }
        let ne = equilibria(&g);
        for &(x1, y1) in &ne {
            let (fx, fy) = field_at(&g, x1, y1);
            max_speed = max_speed.max(fx.hypot(fy));
        }
        if classify_case(&g) == CaseClass::CaseINoPureNe {
            let center = *ne.last().expect("Case I has an interior equilibrium");
            let (line_integral, min_cross, max_cross) = circulation(&g, center, cfg.fig5b.loop_half_side);
            circ.push(CirculationCheck { game: id.to_string(), line_integral, min_cross, max_cross });
        }
        fs::write(svg_dir.join(format!("{id}.svg")), svg(&g, grid, &ne, &header))?;
    }
    csv.flush()?;
    let mut w = create(&cfg.out_dir, "fig5b_circulation.csv", cfg)?;
    writeln!(w, "game_id,line_integral,min_cross,max_cross,consistent")?;
    for c in &circ {
        writeln!(w, "{},{},{},{},{}", c.game, c.line_integral, c.min_cross, c.max_cross, c.consistent())?;
    }
    w.flush()?;
    Ok(Fig5bResult { rows, max_equilibrium_speed: max_speed, circulation: circ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;
    use crate::game::classic;

    #[test]
    fn matching_pennies_rotates() {
        // linearized field at (1/2, 1/2) is (y - 1/2, -(x - 1/2)): clockwise,
        // circulation -2 * area
        let (c, lo, hi) = circulation(&classic::matching_pennies(), (0.5, 0.5), 0.01);
        assert!(hi < 0.0 && lo < 0.0);
        assert!((c + 2.0 * 0.02 * 0.02).abs() < 1e-6, "{c}");
    }

    #[test]
    fn full_run_counts_and_markers() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(ExperimentKind::Fig5bFields);
        cfg.out_dir = dir.path().to_path_buf();
        let r = run_fig5b_fields(&cfg).unwrap();
        assert_eq!(r.rows, 144 * 441);
        assert!(r.max_equilibrium_speed < 1e-9);
        assert_eq!(r.circulation.len(), 18);
        assert!(r.circulation.iter().all(|c| c.consistent()), "{:?}", r.circulation);
        let svg = fs::read_to_string(dir.path().join("fig5b").join("BaxAs.svg")).unwrap();
        assert!(svg.contains("fill=\"red\"") && svg.ends_with("</svg>\n"));
    }
}
