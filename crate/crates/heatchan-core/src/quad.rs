//! Gauss-Legendre quadrature: fixed-order rules plus adaptive 1D and 2D
//! drivers.
//!
//! The 2D driver subdivides cells where two rule orders disagree; integrands
//! with a positive-part kink along a smooth curve (the waterfilling
//! integrals) resolve quickly because only boundary cells split.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// found by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                let (p2, d2) = legendre_with_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// Fixed-order Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Adaptive 1D quadrature: bisect intervals until a 15-point and a 31-point
/// rule agree within the locally allotted tolerance.
pub fn adaptive_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let coarse = integrate(f, a, b, 15);
        let fine = integrate(f, a, b, 31);
        if (fine - coarse).abs() <= tol || depth >= 24 {
            return fine;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth + 1) + recurse(f, mid, b, 0.5 * tol, depth + 1)
    }
    recurse(f, a, b, abs_tol, 0)
}

/// Adaptive tensor-product quadrature of `f` over `[x0,x1] x [y0,y1]`.
///
/// Each cell carries an 8x8 and a 16x16 Gauss-Legendre value; the cell whose
/// rule disagreement is largest is split into quadrants until the summed
/// disagreement falls below `abs_tol`. Greedy refinement concentrates the
/// work on crease lines (the waterfilling integrals' positive-part boundary)
/// instead of spreading a fixed budget over smooth regions. The final sum
/// runs over cells ordered by creation index, so the result is deterministic.
pub fn adaptive_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    abs_tol: f64,
) -> f64 {
    const MAX_CELLS: usize = 400_000;
    let rule_lo = gauss_legendre(8);
    let rule_hi = gauss_legendre(16);

    struct Cell {
        err: f64,
        id: u64,
        bounds: [f64; 4],
        value: f64,
    }
    impl PartialEq for Cell {
        fn eq(&self, other: &Self) -> bool {
            self.id == other.id
        }
    }
    impl Eq for Cell {}
    impl PartialOrd for Cell {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Cell {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.err
                .total_cmp(&other.err)
                .then_with(|| other.id.cmp(&self.id))
        }
    }

    let eval = |bounds: [f64; 4], id: u64| {
        let coarse = tensor_cell(f, &rule_lo, bounds);
        let fine = tensor_cell(f, &rule_hi, bounds);
        Cell { err: (fine - coarse).abs(), id, bounds, value: fine }
    };

    let mut next_id = 0u64;
    let mut heap = std::collections::BinaryHeap::new();
    let root = eval([x0, x1, y0, y1], next_id);
    let mut total_err = root.err;
    heap.push(root);
    while total_err > abs_tol && heap.len() + 3 <= MAX_CELLS {
        let worst = heap.pop().expect("heap nonempty");
        if worst.err == 0.0 {
            heap.push(worst);
            break;
        }
        total_err -= worst.err;
        let [cx0, cx1, cy0, cy1] = worst.bounds;
        let xm = 0.5 * (cx0 + cx1);
        let ym = 0.5 * (cy0 + cy1);
        for bounds in [
            [cx0, xm, cy0, ym],
            [xm, cx1, cy0, ym],
            [cx0, xm, ym, cy1],
            [xm, cx1, ym, cy1],
        ] {
            next_id += 1;
            let child = eval(bounds, next_id);
            total_err += child.err;
            heap.push(child);
        }
    }
    let mut cells = heap.into_vec();
    cells.sort_by_key(|c| c.id);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for cell in &cells {
        let y = cell.value - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// One tensor-product Gauss-Legendre pass over a rectangular cell.
fn tensor_cell<F: Fn(f64, f64) -> f64>(
    f: &F,
    rule: &(Vec<f64>, Vec<f64>),
    [x0, x1, y0, y1]: [f64; 4],
) -> f64 {
    let (nodes, weights) = rule;
    let xm = 0.5 * (x0 + x1);
    let xh = 0.5 * (x1 - x0);
    let ym = 0.5 * (y0 + y1);
    let yh = 0.5 * (y1 - y0);
    let mut sum = 0.0;
    for (xi, wx) in nodes.iter().zip(weights) {
        let x = xm + xh * xi;
        let mut row = 0.0;
        for (yi, wy) in nodes.iter().zip(weights) {
            row += wy * f(x, ym + yh * yi);
        }
        sum += wx * row;
    }
    sum * xh * yh
}
