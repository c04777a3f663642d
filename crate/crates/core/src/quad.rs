//! Quadrature helpers shared by the simulation, Gramian and BIBO routines.

use crate::matrix::Matrix;

/// Composite Simpson weights for `panels` (even) equal subintervals of width `h`.
pub(crate) fn simpson_weights(panels: usize, h: f64) -> Vec<f64> {
    debug_assert!(panels >= 2 && panels % 2 == 0);
    (0..=panels)
        .map(|j| {
            let w = if j == 0 || j == panels {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Result of a refined Simpson integration.
#[derive(Debug, Clone)]
pub(crate) struct Refined {
    pub value: Matrix,
    pub panels: usize,
    pub converged: bool,
}

/// Integrates a matrix-valued function over `[0, length]` with composite
/// Simpson, doubling the panel count until two successive estimates differ
/// by less than `tol · max(1, max|value|)` entrywise or `max_panels` is reached.
///
/// `eval(h, panels)` must return the integrand at nodes `0, h, 2h, …, panels·h`.
pub(crate) fn refine_simpson(
    length: f64,
    tol: f64,
    max_panels: usize,
    mut eval: impl FnMut(f64, usize) -> Vec<Matrix>,
) -> Refined {
    let estimate = |panels: usize, eval: &mut dyn FnMut(f64, usize) -> Vec<Matrix>| {
        let h = length / panels as f64;
        let nodes = eval(h, panels);
        let weights = simpson_weights(panels, h);
        let mut acc = Matrix::zeros(nodes[0].rows(), nodes[0].cols());
        for (f, w) in nodes.iter().zip(weights) {
            acc = &acc + &f.scale(w);
        }
        acc
    };
    let mut panels = 8;
    let mut prev = estimate(panels, &mut eval);
    loop {
        let next_panels = panels * 2;
        let next = estimate(next_panels, &mut eval);
        let diff = next.max_abs_diff(&prev);
        let scale = next.max_abs().max(1.0);
        if diff < tol * scale {
            return Refined { value: next, panels: next_panels, converged: true };
        }
        if next_panels >= max_panels {
            return Refined { value: next, panels: next_panels, converged: false };
        }
        panels = next_panels;
        prev = next;
    }
}

/// Adaptive Simpson on a vector-valued integrand; the error test uses the
/// largest component difference against `tol · max(1, max|first estimate|)`.
pub(crate) fn adaptive_simpson(
    f: &mut dyn FnMut(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Vec<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_rule(&fa, &fm, &fb, b - a);
    let scale = whole.iter().fold(1.0, |s: f64, v| s.max(v.abs()));
    recurse(f, a, b, &fa, &fm, &fb, &whole, tol * scale, max_depth)
}

fn simpson_rule(fa: &[f64], fm: &[f64], fb: &[f64], width: f64) -> Vec<f64> {
    fa.iter()
        .zip(fm)
        .zip(fb)
        .map(|((a, m), b)| width / 6.0 * (a + 4.0 * m + b))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &mut dyn FnMut(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    fa: &[f64],
    fm: &[f64],
    fb: &[f64],
    whole: &[f64],
    tol: f64,
    depth: u32,
) -> Vec<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_rule(fa, &flm, fm, m - a);
    let right = simpson_rule(fm, &frm, fb, b - m);
    let err = left
        .iter()
        .zip(&right)
        .zip(whole)
        .map(|((l, r), w)| (l + r - w).abs())
        .fold(0.0, f64::max);
    if depth == 0 || err <= 15.0 * tol {
        return left
            .iter()
            .zip(&right)
            .zip(whole)
            .map(|((l, r), w)| l + r + (l + r - w) / 15.0)
            .collect();
    }
    let l = recurse(f, a, m, fa, &flm, fm, &left, 0.5 * tol, depth - 1);
    let r = recurse(f, m, b, fm, &frm, fb, &right, 0.5 * tol, depth - 1);
    l.iter().zip(&r).map(|(x, y)| x + y).collect()
}
