//! Globally adaptive G10/K21 quadrature over a list of initial panels.

use super::rules::{gk21, PanelEstimate};
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl AdaptiveOptions {
    pub fn absolute(abs_tol: f64, max_panels: usize) -> Self {
        AdaptiveOptions {
            abs_tol,
            rel_tol: 0.0,
            max_panels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    est: PanelEstimate,
    // panels narrower than roundoff allows are never split again
    frozen: bool,
}

impl Panel {
    fn priority(&self) -> f64 {
        if self.frozen {
            -1.0
        } else {
            self.est.error
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority()
            .total_cmp(&other.priority())
            // deterministic tie-break on position
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn make_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let est = gk21(f, a, b);
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    Panel {
        a,
        b,
        est,
        frozen: (b - a).abs() < 1e3 * f64::EPSILON * scale,
    }
}

/// Integrate `f` over consecutive panels given by `breakpoints` (ascending).
///
/// Splits the worst panel until the summed error estimate falls below
/// `max(abs_tol, rel_tol·|value|)`, failing with `BudgetExceeded` once the
/// panel count would pass `max_panels`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
    what: &'static str,
) -> Result<Integral> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "{what}: need at least two breakpoints"
        )));
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "{what}: breakpoints must be strictly increasing"
        )));
    }
    let initial = breakpoints.len() - 1;
    if initial > opts.max_panels {
        return Err(Error::BudgetExceeded {
            what,
            tol: opts.abs_tol,
            cap: opts.max_panels,
            achieved: f64::INFINITY,
        });
    }

    let mut heap = BinaryHeap::with_capacity(initial * 2);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in breakpoints.windows(2) {
        let p = make_panel(&mut f, w[0], w[1]);
        total += p.est.value;
        total_err += p.est.error;
        heap.push(p);
    }

    let target = |v: f64| opts.abs_tol.max(opts.rel_tol * v.abs());
    while total_err > target(total) {
        let worst = match heap.peek() {
            Some(p) if !p.frozen => heap.pop().expect("peeked"),
            _ => break,
        };
        if heap.len() + 2 > opts.max_panels {
            heap.push(worst);
            let (value, err) = resum(&heap);
            return Err(Error::BudgetExceeded {
                what,
                tol: target(value),
                cap: opts.max_panels,
                achieved: err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = make_panel(&mut f, worst.a, mid);
        let right = make_panel(&mut f, mid, worst.b);
        total += left.est.value + right.est.value - worst.est.value;
        total_err += left.est.error + right.est.error - worst.est.error;
        heap.push(left);
        heap.push(right);
    }

    let panels = heap.len();
    let (value, error) = resum(&heap);
    if error > target(value) && !heap.iter().any(|p| p.frozen) {
        return Err(Error::BudgetExceeded {
            what,
            tol: target(value),
            cap: opts.max_panels,
            achieved: error,
        });
    }
    Ok(Integral {
        value,
        error,
        panels,
    })
}

/// Order-independent resummation: panels sorted by position, compensated sum.
fn resum(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    for p in panels {
        let v = p.est.value;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        err += p.est.error;
    }
    (sum + comp, err)
}

/// Uniform breakpoints on [a, b] with spacing at most `width`.
pub fn uniform_breakpoints(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}
