use serde::Serialize;

use super::integrate::Trajectory;
use crate::game::{interior_nash_2x2, rescale_decompose, Game, SimplexPoint};

/// Double-double arithmetic, just enough to evaluate `J` differences below
/// the rounding level of a plain `f64` evaluation.
mod dd {
    pub type Dd = (f64, f64);

    const LN2: Dd = (std::f64::consts::LN_2, 2.319046813846299558e-17);

    #[inline]
    pub fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    pub fn add(a: Dd, b: Dd) -> Dd {
        let (s, e) = two_sum(a.0, b.0);
        let (h, l) = two_sum(s, e + a.1 + b.1);
        (h, l)
    }

    pub fn neg(a: Dd) -> Dd {
        (-a.0, -a.1)
    }

    pub fn mul(a: Dd, b: Dd) -> Dd {
        let (p, e) = two_prod(a.0, b.0);
        two_sum(p, e + a.0 * b.1 + a.1 * b.0)
    }

    pub fn div(a: Dd, b: Dd) -> Dd {
        let q = a.0 / b.0;
        let r = add(a, neg(mul((q, 0.0), b)));
        two_sum(q, r.0 / b.0)
    }

    /// `ln(hi + lo)` for positive `hi` with `|lo| << hi`.
    pub fn ln(hi: f64, lo: f64) -> Dd {
        let bits = hi.to_bits();
        let mut e = ((bits >> 52) & 0x7ff) as i64 - 1023;
        let mut m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
        if m > std::f64::consts::SQRT_2 {
            m *= 0.5;
            e += 1;
        }
        // m - 1 is exact; the remaining correction is first order in lo / hi
        let tail = (m - 1.0).ln_1p();
        let scaled = mul(LN2, (e as f64, 0.0));
        add(scaled, two_sum(tail, lo / hi))
    }
}
use crate::{Error, Result};

/// `sum_i p_i ln(p_i / q_i)` with `0 ln 0 = 0`. Returns `+inf` when `q`
/// vanishes where `p` does not.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "KL arguments differ in length");
    let mut s = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        s += pi * (pi / qi).ln();
    }
    s.max(0.0)
}

/// Constant of motion `J(x, y) = KL(x* | x) - KL(y* | y) / c` of a 2x2 game
/// with interior equilibrium `(x*, y*)` and rescaling weight `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct KlInvariant {
    pub x_star: SimplexPoint,
    pub y_star: SimplexPoint,
    pub weight_c: f64,
    precise: Precise,
}

/// Equilibrium and weight carried to double-double precision.
#[derive(Debug, Clone, PartialEq)]
struct Precise {
    x_star: [dd::Dd; 2],
    y_star: [dd::Dd; 2],
    /// `1 / c`
    inv_c: dd::Dd,
}

fn ratio(num: f64, den: f64) -> dd::Dd {
    dd::div((num, 0.0), (den, 0.0))
}

fn complement(p: dd::Dd) -> dd::Dd {
    dd::add((1.0, 0.0), dd::neg(p))
}

impl KlInvariant {
    pub fn new(g: &Game) -> Result<Self> {
        let dec = rescale_decompose(g)?;
        let (x_star, y_star) = interior_nash_2x2(g)?
            .ok_or(Error::NoInteriorNash)?;
        let row_diff = g.a(0, 0) - g.a(0, 1) - g.a(1, 0) + g.a(1, 1);
        let col_diff = g.b(0, 0) - g.b(0, 1) - g.b(1, 0) + g.b(1, 1);
        let x1 = ratio(g.b(1, 1) - g.b(1, 0), col_diff);
        let y1 = ratio(g.a(1, 1) - g.a(0, 1), row_diff);
        Ok(KlInvariant {
            x_star,
            y_star,
            weight_c: dec.scale,
            precise: Precise {
                x_star: [x1, complement(x1)],
                y_star: [y1, complement(y1)],
                inv_c: ratio(row_diff, col_diff),
            },
        })
    }

    /// `J` up to an additive constant, in double-double, for a state given
    /// as `hi + lo` parts.
    fn precise_value(&self, x: &[f64], x_lo: &[f64], y: &[f64], y_lo: &[f64]) -> dd::Dd {
        let cross = |star: &[dd::Dd; 2], p: &[f64], lo: &[f64]| {
            (0..2).fold((0.0, 0.0), |acc, i| dd::add(acc, dd::mul(star[i], dd::ln(p[i], lo[i]))))
        };
        let px = &self.precise;
        let kx = dd::neg(cross(&px.x_star, x, x_lo));
        let ky = dd::neg(cross(&px.y_star, y, y_lo));
        dd::add(kx, dd::neg(dd::mul(px.inv_c, ky)))
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        kl_divergence(self.x_star.as_slice(), x)
            - kl_divergence(self.y_star.as_slice(), y) / self.weight_c
    }

    pub fn series(&self, traj: &Trajectory) -> InvariantSeries {
        let n = traj.game().n();
        let at = |k: usize| {
            let (lx, ly) = traj.residual(k).split_at(n);
            self.precise_value(traj.x(k), lx, traj.y(k), ly)
        };
        let j0 = at(0);
        InvariantSeries {
            values: (0..traj.len()).map(|k| self.value(traj.x(k), traj.y(k))).collect(),
            changes: (0..traj.len())
                .map(|k| {
                    let d = dd::add(at(k), dd::neg(j0));
                    d.0 + d.1
                })
                .collect(),
            weight_c: self.weight_c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSeries {
    pub values: Vec<f64>,
    /// `J_k - J_0` evaluated in double-double precision.
    pub changes: Vec<f64>,
    pub weight_c: f64,
}

impl InvariantSeries {
    /// `max_k |J_k - J_0|` over the first `len` samples.
    pub fn drift(&self, len: usize) -> f64 {
        self.changes[..len.min(self.changes.len())]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn invariant_value(g: &Game, x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
    Ok(KlInvariant::new(g)?.value(x.as_slice(), y.as_slice()))
}
