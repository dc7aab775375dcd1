// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Classical fixed-step fourth-order Runge–Kutta on complex arrays.

use ndarray::{Array, Dimension};

use crate::C64;

/// Right-hand side `out = f(t, x)`; `out` arrives zeroed.
pub(crate) trait Rhs<D: Dimension> {
    fn eval(&self, t: f64, x: &Array<C64, D>, out: &mut Array<C64, D>);
}

pub(crate) struct Workspace<D: Dimension> {
    k: [Array<C64, D>; 4],
    tmp: Array<C64, D>,
}

impl<D: Dimension> Workspace<D> {
    pub fn new(like: &Array<C64, D>) -> Self {
        let z = Array::zeros(like.raw_dim());
        Self { k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }
}

fn eval_into<D: Dimension, F: Rhs<D>>(f: &F, t: f64, x: &Array<C64, D>, out: &mut Array<C64, D>) {
    out.fill(C64::new(0.0, 0.0));
    f.eval(t, x, out);
}

pub(crate) fn step<D: Dimension, F: Rhs<D>>(f: &F, t: f64, h: f64, x: &mut Array<C64, D>, ws: &mut Workspace<D>) {
    let half = C64::new(0.5 * h, 0.0);
    let [k1, k2, k3, k4] = &mut ws.k;
    eval_into(f, t, x, k1);
    ws.tmp.assign(x);
    ws.tmp.scaled_add(half, k1);
    eval_into(f, t + 0.5 * h, &ws.tmp, k2);
    ws.tmp.assign(x);
    ws.tmp.scaled_add(half, k2);
    eval_into(f, t + 0.5 * h, &ws.tmp, k3);
    ws.tmp.assign(x);
    ws.tmp.scaled_add(C64::new(h, 0.0), k3);
    eval_into(f, t + h, &ws.tmp, k4);
    let sixth = C64::new(h / 6.0, 0.0);
    let third = C64::new(h / 3.0, 0.0);
    x.scaled_add(sixth, k1);
    x.scaled_add(third, k2);
    x.scaled_add(third, k3);
    x.scaled_add(sixth, k4);
}

/// Advance from `t0` to `t1` in equal steps no longer than `dt`; `None`
/// takes a single step. Returns the number of steps.
pub(crate) fn advance<D: Dimension, F: Rhs<D>>(
    f: &F,
    t0: f64,
    t1: f64,
    dt: Option<f64>,
    x: &mut Array<C64, D>,
    ws: &mut Workspace<D>,
) -> usize {
    let span = t1 - t0;
    let n = match dt {
        Some(dt) => ((span / dt).ceil() as usize).max(1),
        None => 1,
    };
    let h = span / n as f64;
    for i in 0..n {
        step(f, t0 + i as f64 * h, h, x, ws);
    }
    n
}
