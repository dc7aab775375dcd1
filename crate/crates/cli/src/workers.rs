// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Worker pool for independent sweep points.

use rayon::prelude::*;

use crate::{ExpError, Result};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "KERRSIM_WORKERS";

fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(ExpError::Config(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

/// Apply `f` to every item in parallel; results keep input order.
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ExpError::Pool(e.to_string()))?;
    pool.install(|| items.par_iter().map(&f).collect())
}
