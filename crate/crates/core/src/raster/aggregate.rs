//! Per-cell height reducers.

use crate::numeric;
use crate::registry::{Named, Registry};

/// Reduces the heights of all points falling in one cell to a single value.
///
/// `values` is never empty and arrives in input-point order.
pub trait Aggregator: Named + Send + Sync {
    fn reduce(&self, values: &[f64]) -> f64;
}

/// Arithmetic mean, compensated.
pub struct Mean;
pub struct Max;
pub struct Min;

impl Named for Mean {
    fn name(&self) -> &'static str {
        "mean"
    }
}

impl Aggregator for Mean {
    fn reduce(&self, values: &[f64]) -> f64 {
        numeric::sum(values.iter().copied()) / values.len() as f64
    }
}

impl Named for Max {
    fn name(&self) -> &'static str {
        "max"
    }
}

impl Aggregator for Max {
    fn reduce(&self, values: &[f64]) -> f64 {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Named for Min {
    fn name(&self) -> &'static str {
        "min"
    }
}

impl Aggregator for Min {
    fn reduce(&self, values: &[f64]) -> f64 {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Registry holding the built-in aggregators.
pub fn aggregators() -> Registry<dyn Aggregator> {
    let mut r: Registry<dyn Aggregator> = Registry::new("aggregator");
    r.register(Box::new(Mean))
        .register(Box::new(Max))
        .register(Box::new(Min));
    r
}
