use crate::game::{dot, Game, SimplexPoint};

/// Scratch space for utility vectors so the integrator does not allocate.
#[derive(Debug, Clone)]
pub(crate) struct FieldBuffers {
    u: Vec<f64>,
    w: Vec<f64>,
}

impl FieldBuffers {
    pub(crate) fn new(g: &Game) -> Self {
        FieldBuffers {
            u: vec![0.0; g.n()],
            w: vec![0.0; g.m()],
        }
    }
}

/// Replicator field on the joint state `[x; y]`:
/// `dx_i = x_i ((A y)_i - x^T A y)`, `dy_j = y_j ((x^T B)_j - x^T B y)`.
#[inline]
pub(crate) fn field_into(g: &Game, state: &[f64], out: &mut [f64], buf: &mut FieldBuffers) {
    let (x, y) = state.split_at(g.n());
    let (dx, dy) = out.split_at_mut(g.n());
    g.row_utilities_into(y, &mut buf.u);
    g.col_utilities_into(x, &mut buf.w);
    let row_avg = dot(x, &buf.u);
    let col_avg = dot(y, &buf.w);
    for i in 0..x.len() {
        dx[i] = x[i] * (buf.u[i] - row_avg);
    }
    for j in 0..y.len() {
        dy[j] = y[j] * (buf.w[j] - col_avg);
    }
}

pub fn rd_vector_field(g: &Game, x: &SimplexPoint, y: &SimplexPoint) -> (Vec<f64>, Vec<f64>) {
    assert_eq!((x.len(), y.len()), (g.n(), g.m()), "strategy dimensions");
    let mut state = x.as_slice().to_vec();
    state.extend_from_slice(y.as_slice());
    let mut out = vec![0.0; state.len()];
    field_into(g, &state, &mut out, &mut FieldBuffers::new(g));
    let dy = out.split_off(g.n());
    (out, dy)
}
