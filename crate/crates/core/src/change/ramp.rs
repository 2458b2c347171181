//! Diverging colour ramps for change heatmaps.
//!
//! A ramp maps a normalised value `t ∈ [−1, 1]` (Δz divided by the
//! half-range, clamped) to 8-bit RGB. Channel values are
//! `round(255 · f)` with halves rounded away from zero.

use crate::registry::{Named, Registry};

/// Colour of cells without data.
pub const NODATA_COLOR: [u8; 3] = [0, 0, 0];

pub trait ColorRamp: Named + Send + Sync {
    fn color(&self, t: f64) -> [u8; 3];

    /// One-line formula, recorded in the heatmap legend.
    fn formula(&self) -> &'static str;
}

fn channel(f: f64) -> u8 {
    (255.0 * f).round().clamp(0.0, 255.0) as u8
}

/// Blue at −1, white at 0, red at +1, linear in between.
pub struct BlueWhiteRed;

impl Named for BlueWhiteRed {
    fn name(&self) -> &'static str {
        "blue-white-red"
    }
}

impl ColorRamp for BlueWhiteRed {
    fn color(&self, t: f64) -> [u8; 3] {
        let t = t.clamp(-1.0, 1.0);
        let fade = channel(1.0 - t.abs());
        if t < 0.0 {
            [fade, fade, 255]
        } else {
            [255, fade, fade]
        }
    }

    fn formula(&self) -> &'static str {
        "t<0: (f, f, 255); t>=0: (255, f, f); f = round(255*(1-|t|))"
    }
}

/// Black at −1 to white at +1.
pub struct Grayscale;

impl Named for Grayscale {
    fn name(&self) -> &'static str {
        "grayscale"
    }
}

impl ColorRamp for Grayscale {
    fn color(&self, t: f64) -> [u8; 3] {
        let v = channel((t.clamp(-1.0, 1.0) + 1.0) / 2.0);
        [v, v, v]
    }

    fn formula(&self) -> &'static str {
        "(g, g, g); g = round(255*(t+1)/2)"
    }
}

/// Registry holding the built-in ramps.
pub fn ramps() -> Registry<dyn ColorRamp> {
    let mut r: Registry<dyn ColorRamp> = Registry::new("ramp");
    r.register(Box::new(BlueWhiteRed)).register(Box::new(Grayscale));
    r
}
