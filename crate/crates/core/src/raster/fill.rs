use super::grid::{RasterGrid, NODATA};
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Enough measured neighbours to stop widening the search.
const MIN_NEIGHBOURS: usize = 3;

/// Fills nodata cells by inverse-distance-squared weighting of measured
/// cells.
///
/// Square rings around each hole are searched outward until at least three
/// measured cells have been seen or `max_ring` is reached. Only measured
/// cells of the input act as sources, so fills never cascade and a second
/// pass changes nothing. Holes with no measured cell within `max_ring`
/// stay nodata. Returns the new grid and the number of cells filled.
pub fn fill_holes(grid: &RasterGrid, max_ring: usize) -> Result<(RasterGrid, usize)> {
    if max_ring == 0 {
        return Err(Error::InvalidArgument("max_ring must be ≥ 1".into()));
    }
    let spec = *grid.spec();
    let (nrows, ncols) = (spec.nrows as i64, spec.ncols as i64);
    let values = grid.values();
    let derived = grid.interpolated_mask();
    let is_source = |r: i64, c: i64| -> Option<f64> {
        if r < 0 || c < 0 || r >= nrows || c >= ncols {
            return None;
        }
        let i = (r * ncols + c) as usize;
        (values[i] != NODATA && !derived[i]).then_some(values[i])
    };

    let filled: Vec<Option<f64>> = (0..values.len())
        .into_par_iter()
        .map(|i| {
            if values[i] != NODATA {
                return None;
            }
            let (r0, c0) = ((i as i64) / ncols, (i as i64) % ncols);
            let mut weight = 0.0;
            let mut weighted = 0.0;
            let mut found = 0;
            for ring in 1..=max_ring as i64 {
                for dr in -ring..=ring {
                    let step = if dr.abs() == ring { 1 } else { 2 * ring };
                    let mut dc = -ring;
                    while dc <= ring {
                        if let Some(z) = is_source(r0 + dr, c0 + dc) {
                            let d2 = ((dr * dr + dc * dc) as f64) * spec.cell * spec.cell;
                            weight += 1.0 / d2;
                            weighted += z / d2;
                            found += 1;
                        }
                        dc += step;
                    }
                }
                if found >= MIN_NEIGHBOURS {
                    break;
                }
            }
            (found > 0).then(|| weighted / weight)
        })
        .collect();

    let mut out = values.to_vec();
    let mut mask = derived.to_vec();
    let mut count = 0;
    for (i, f) in filled.into_iter().enumerate() {
        if let Some(v) = f {
            out[i] = v;
            mask[i] = true;
            count += 1;
        }
    }
    Ok((RasterGrid::new(spec, out)?.with_interpolated(mask), count))
}
