//! Globally adaptive two-dimensional quadrature on a rectangle.
//!
//! Each cell is estimated with tensor-product Gauss–Legendre rules of order
//! 3 and 7; the difference serves as the cell error. The worst cell (by
//! error) is bisected along the axis where a low-order half-sum probe sees
//! the larger discrepancy, which keeps edge singularities (integrable
//! `y^{-a}` behavior along a boundary) refining geometrically instead of
//! spawning a whole strip of cells. Cells are totally ordered by
//! (error, insertion id), so the refinement sequence and the final sum are
//! deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const GL3_NODES: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
const GL3_WEIGHTS: [f64; 3] = [0.5555555555555556, 0.8888888888888888, 0.5555555555555556];

const GL7_NODES: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL7_WEIGHTS: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: f64,
    error: f64,
    id: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.id == other.id
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(self.id.cmp(&other.id))
    }
}

fn tensor_rule(
    f: &dyn Fn(f64, f64) -> f64,
    cell: (f64, f64, f64, f64),
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let (x0, x1, y0, y1) = cell;
    let (cx, hx) = ((x0 + x1) / 2.0, (x1 - x0) / 2.0);
    let (cy, hy) = ((y0 + y1) / 2.0, (y1 - y0) / 2.0);
    let mut sum = 0.0;
    for (i, &u) in nodes.iter().enumerate() {
        let mut row = 0.0;
        for (j, &v) in nodes.iter().enumerate() {
            row += weights[j] * f(cx + hx * u, cy + hy * v);
        }
        sum += weights[i] * row;
    }
    sum * hx * hy
}

fn estimate(f: &dyn Fn(f64, f64) -> f64, rect: (f64, f64, f64, f64), id: u64) -> Cell {
    let low = tensor_rule(f, rect, &GL3_NODES, &GL3_WEIGHTS);
    let high = tensor_rule(f, rect, &GL7_NODES, &GL7_WEIGHTS);
    Cell {
        x0: rect.0,
        x1: rect.1,
        y0: rect.2,
        y1: rect.3,
        value: high,
        error: (high - low).abs(),
        id,
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature2d {
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
}

/// Integrate `f` over `[x0,x1] × [y0,y1]` to absolute tolerance `tol`.
///
/// Fails with diagnostics if `max_cells` subdivisions do not bring the
/// summed error estimate under `tol`.
pub fn integrate_2d(
    f: &dyn Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
    max_cells: usize,
) -> Result<Quadrature2d> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!("tol = {tol} must be positive")));
    }
    let ordered = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
    if !ordered(x_range) || !ordered(y_range) {
        return Err(Error::invalid("degenerate integration rectangle"));
    }
    let mut next_id = 0u64;
    let mut heap = BinaryHeap::new();
    let first = estimate(f, (x_range.0, x_range.1, y_range.0, y_range.1), next_id);
    next_id += 1;
    let mut total_value = first.value;
    let mut total_error = first.error;
    heap.push(first);

    while total_error > tol {
        if heap.len() >= max_cells {
            return Err(Error::QuadratureNotConverged {
                error_estimate: total_error,
                tol,
                cells: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap nonempty while error positive");
        if worst.error == 0.0 {
            // every remaining cell reports zero error; cannot refine further
            return Err(Error::QuadratureNotConverged {
                error_estimate: total_error,
                tol,
                cells: heap.len() + 1,
            });
        }
        total_value -= worst.value;
        total_error -= worst.error;
        let xm = (worst.x0 + worst.x1) / 2.0;
        let ym = (worst.y0 + worst.y1) / 2.0;
        // probe with the low rule which axis profits more from splitting
        let whole = tensor_rule(
            f,
            (worst.x0, worst.x1, worst.y0, worst.y1),
            &GL3_NODES,
            &GL3_WEIGHTS,
        );
        let split_x = tensor_rule(
            f,
            (worst.x0, xm, worst.y0, worst.y1),
            &GL3_NODES,
            &GL3_WEIGHTS,
        ) + tensor_rule(
            f,
            (xm, worst.x1, worst.y0, worst.y1),
            &GL3_NODES,
            &GL3_WEIGHTS,
        );
        let split_y = tensor_rule(
            f,
            (worst.x0, worst.x1, worst.y0, ym),
            &GL3_NODES,
            &GL3_WEIGHTS,
        ) + tensor_rule(
            f,
            (worst.x0, worst.x1, ym, worst.y1),
            &GL3_NODES,
            &GL3_WEIGHTS,
        );
        let children = if (split_x - whole).abs() >= (split_y - whole).abs() {
            [
                (worst.x0, xm, worst.y0, worst.y1),
                (xm, worst.x1, worst.y0, worst.y1),
            ]
        } else {
            [
                (worst.x0, worst.x1, worst.y0, ym),
                (worst.x0, worst.x1, ym, worst.y1),
            ]
        };
        for rect in children {
            let child = estimate(f, rect, next_id);
            next_id += 1;
            total_value += child.value;
            total_error += child.error;
            heap.push(child);
        }
    }

    Ok(Quadrature2d {
        value: total_value,
        error_estimate: total_error,
        cells: heap.len(),
    })
}
