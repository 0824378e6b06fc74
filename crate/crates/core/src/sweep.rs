//! Parameter-space exploration: SER and bound maps over (ΔωT, Δθ),
//! energy and alphabet-size scans, bound-ratio maps, and minima
//! detection including the secondary-minimum structure.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::alphabet::{Constellation, ConstellationKind, ProtocolParams};
use crate::bounds::{ppm_helstrom_closed, psk_helstrom_circulant, sql_error_mc, srm_error};
use crate::receiver::{estimate_ser, estimate_ser_sequential, ReceiverModel};
use crate::rng::derive_seed;
use crate::{exec, Error, Result};

/// Inclusive linear grid along one parameter axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn new(name: impl Into<String>, start: f64, stop: f64, points: usize) -> Result<Self> {
        let name = name.into();
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "axis {name}: bounds must be finite"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis {name}: needs at least 2 points, got {points}"
            )));
        }
        if stop <= start {
            return Err(Error::InvalidGrid(format!(
                "axis {name}: stop must exceed start (got {start}..{stop})"
            )));
        }
        Ok(Self {
            name,
            start,
            stop,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + self.step() * i as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    /// True when one step past `stop` wraps onto `start` modulo 2π, so
    /// the axis tiles a full phase period. Minima detection treats such
    /// an axis as circular.
    pub fn spans_full_circle(&self) -> bool {
        ((self.stop - self.start) + self.step() - TAU).abs() < 1e-9
    }
}

/// Two-axis grid; for CFSK maps `x` is ΔωT and `y` is Δθ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: GridAxis,
    pub y: GridAxis,
}

impl GridSpec {
    pub fn cells(&self) -> usize {
        self.x.points * self.y.points
    }
}

/// Provenance of a computed map, carried alongside the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapMetadata {
    /// What the cells hold: "ser", "hb", or "hb_ratio".
    pub quantity: String,
    pub m: Option<usize>,
    pub n_bar: Option<f64>,
    pub model: Option<ReceiverModel>,
    /// Trials per cell for Monte Carlo maps; `None` marks the map as
    /// deterministic, which also disables pre-detection smoothing.
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Values over a [`GridSpec`], stored row-major with the x index outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMap {
    grid: GridSpec,
    values: Vec<f64>,
    metadata: MapMetadata,
}

impl SweepMap {
    pub fn new(grid: GridSpec, values: Vec<f64>, metadata: MapMetadata) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidGrid(format!(
                "map holds {} values for a {}x{} grid",
                values.len(),
                grid.x.points,
                grid.y.points
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidGrid(
                "map values must be probabilities in [0, 1]".into(),
            ));
        }
        Ok(Self {
            grid,
            values,
            metadata,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn metadata(&self) -> &MapMetadata {
        &self.metadata
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.grid.y.points + iy]
    }

    /// Cell indices of the smallest value; ties go to the lowest index.
    pub fn argmin(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate().skip(1) {
            if v < self.values[best] {
                best = i;
            }
        }
        (best / self.grid.y.points, best % self.grid.y.points)
    }

    fn point(&self, ix: usize, iy: usize, value: f64) -> MapPoint {
        MapPoint {
            ix,
            iy,
            x: self.grid.x.value(ix),
            y: self.grid.y.value(iy),
            value,
        }
    }
}

/// One grid cell with its axis coordinates and value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Local minima of a map. The secondary minimum is the smallest local
/// minimum at strictly smaller x than the global one, admitted only
/// when its value is within 10x of the global minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaReport {
    pub global: Option<MapPoint>,
    pub secondary: Option<MapPoint>,
    pub local_minima: Vec<MapPoint>,
}

/// 3x3 median filter; x edges shrink the window, y wraps when the axis
/// spans a full period.
fn median_smooth3(map: &SweepMap) -> Vec<f64> {
    let nx = map.grid.x.points;
    let ny = map.grid.y.points;
    let wrap_y = map.grid.y.spans_full_circle();
    let mut out = Vec::with_capacity(nx * ny);
    let mut window: Vec<f64> = Vec::with_capacity(9);
    for ix in 0..nx {
        for iy in 0..ny {
            window.clear();
            for dx in -1i64..=1 {
                let jx = ix as i64 + dx;
                if jx < 0 || jx >= nx as i64 {
                    continue;
                }
                for dy in -1i64..=1 {
                    let jy = ix_wrap(iy as i64 + dy, ny, wrap_y);
                    if let Some(jy) = jy {
                        window.push(map.values[jx as usize * ny + jy]);
                    }
                }
            }
            window.sort_by(f64::total_cmp);
            let n = window.len();
            out.push(if n % 2 == 1 {
                window[n / 2]
            } else {
                (window[n / 2 - 1] + window[n / 2]) / 2.0
            });
        }
    }
    out
}

fn ix_wrap(j: i64, n: usize, wrap: bool) -> Option<usize> {
    if wrap {
        Some(j.rem_euclid(n as i64) as usize)
    } else if j < 0 || j >= n as i64 {
        None
    } else {
        Some(j as usize)
    }
}

/// Find cells strictly below all existing 8-neighbors. Monte Carlo maps
/// (metadata carries a trial count) are median-smoothed first, and the
/// reported values are the smoothed ones; deterministic maps are used
/// as-is. The global minimum is the smallest local minimum; a flat map
/// reports nothing.
pub fn find_minima(map: &SweepMap) -> MinimaReport {
    let vals = if map.metadata.trials.is_some() {
        median_smooth3(map)
    } else {
        map.values.clone()
    };
    let nx = map.grid.x.points;
    let ny = map.grid.y.points;
    let wrap_y = map.grid.y.spans_full_circle();
    let mut local_minima = Vec::new();
    for ix in 0..nx {
        'cells: for iy in 0..ny {
            let v = vals[ix * ny + iy];
            for dx in -1i64..=1 {
                for dy in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let jx = ix as i64 + dx;
                    if jx < 0 || jx >= nx as i64 {
                        continue;
                    }
                    let Some(jy) = ix_wrap(iy as i64 + dy, ny, wrap_y) else {
                        continue;
                    };
                    if vals[jx as usize * ny + jy] <= v {
                        continue 'cells;
                    }
                }
            }
            local_minima.push(map.point(ix, iy, v));
        }
    }
    local_minima.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.ix.cmp(&b.ix))
            .then(a.iy.cmp(&b.iy))
    });
    let global = local_minima.first().copied();
    let secondary = global.and_then(|g| {
        local_minima
            .iter()
            .find(|p| p.x < g.x && p.value <= 10.0 * g.value)
            .copied()
    });
    MinimaReport {
        global,
        secondary,
        local_minima,
    }
}

fn validate_cfsk_grid(grid: &GridSpec) -> Result<()> {
    if grid.x.start < 0.0 {
        return Err(Error::InvalidGrid(
            "frequency axis must start at a nonnegative ΔωT".into(),
        ));
    }
    Ok(())
}

/// Helstrom bound of the CFSK constellation at every grid cell.
pub fn sweep_hb_map(m: usize, n_bar: f64, grid: &GridSpec) -> Result<SweepMap> {
    validate_cfsk_grid(grid)?;
    ProtocolParams::new(m, n_bar, grid.x.start, grid.y.start)?;
    let ny = grid.y.points;
    let cells: Vec<Result<f64>> = exec::map_indexed(grid.cells(), |i| {
        let p = ProtocolParams::new(m, n_bar, grid.x.value(i / ny), grid.y.value(i % ny))?;
        Ok(srm_error(&Constellation::cfsk(p).gram_matrix())?.p_error)
    });
    let values = cells.into_iter().collect::<Result<Vec<_>>>()?;
    SweepMap::new(
        grid.clone(),
        values,
        MapMetadata {
            quantity: "hb".into(),
            m: Some(m),
            n_bar: Some(n_bar),
            model: None,
            trials: None,
            seed: None,
        },
    )
}

/// Simulated receiver SER at every grid cell. Cells are independent
/// work items; each draws its RNG streams from a seed derived from the
/// cell indices, so the map is reproducible for a fixed seed and
/// independent of the worker count.
pub fn sweep_ser_map(
    m: usize,
    n_bar: f64,
    grid: &GridSpec,
    r: &ReceiverModel,
    trials_per_cell: u64,
    seed: u64,
) -> Result<SweepMap> {
    validate_cfsk_grid(grid)?;
    ProtocolParams::new(m, n_bar, grid.x.start, grid.y.start)?;
    r.validate(m)?;
    if trials_per_cell < 1 {
        return Err(Error::InvalidParams("trials per cell must be >= 1".into()));
    }
    let ny = grid.y.points;
    let cells: Vec<Result<f64>> = exec::map_indexed(grid.cells(), |i| {
        let (ix, iy) = (i / ny, i % ny);
        let p = ProtocolParams::new(m, n_bar, grid.x.value(ix), grid.y.value(iy))?;
        let est = estimate_ser_sequential(
            &p,
            r,
            trials_per_cell,
            derive_seed(seed, ix as u64, iy as u64),
        )?;
        Ok(est.p_hat)
    });
    let values = cells.into_iter().collect::<Result<Vec<_>>>()?;
    SweepMap::new(
        grid.clone(),
        values,
        MapMetadata {
            quantity: "ser".into(),
            m: Some(m),
            n_bar: Some(n_bar),
            model: Some(*r),
            trials: Some(trials_per_cell),
            seed: Some(seed),
        },
    )
}

/// Search grid for the modulation parameters: ΔωT over [0, 4π] at 81
/// points (π/20 spacing) and Δθ over one full period at 64 points. The
/// phase axis holds the exact PSK points 2π/M for every power-of-two M
/// up to 64.
pub fn default_optimization_grid() -> GridSpec {
    GridSpec {
        x: GridAxis::new("dwt", 0.0, 4.0 * TAU / 2.0, 81).expect("static axis"),
        y: GridAxis::new("dtheta", 0.0, TAU * 63.0 / 64.0, 64).expect("static axis"),
    }
}

const REFINE_POINTS: usize = 9;

/// Minimize the CFSK Helstrom bound over (ΔωT, Δθ): coarse pass on the
/// default grid, then a 9x9 refinement spanning one coarse step around
/// the best cell.
pub fn optimize_cfsk_hb(m: usize, n_bar: f64) -> Result<(ProtocolParams, f64)> {
    let coarse_grid = default_optimization_grid();
    let coarse = sweep_hb_map(m, n_bar, &coarse_grid)?;
    let (cx, cy) = coarse.argmin();

    let refine = |axis: &GridAxis, i: usize, floor: Option<f64>| {
        let center = axis.value(i);
        let half = axis.step();
        let start = match floor {
            Some(f) => (center - half).max(f),
            None => center - half,
        };
        GridAxis::new(axis.name.clone(), start, center + half, REFINE_POINTS)
    };
    let fine_grid = GridSpec {
        x: refine(&coarse_grid.x, cx, Some(0.0))?,
        y: refine(&coarse_grid.y, cy, None)?,
    };
    let fine = sweep_hb_map(m, n_bar, &fine_grid)?;
    let (fx, fy) = fine.argmin();

    let (grid, ix, iy, value) = if fine.value(fx, fy) <= coarse.value(cx, cy) {
        (&fine_grid, fx, fy, fine.value(fx, fy))
    } else {
        (&coarse_grid, cx, cy, coarse.value(cx, cy))
    };
    let params = ProtocolParams::new(m, n_bar, grid.x.value(ix), grid.y.value(iy))?;
    Ok((params, value))
}

/// One energy point of [`scan_energy`]: the re-optimized CFSK receiver
/// with its bounds, plus whichever reference constellations were
/// requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScanRow {
    pub n_bar: f64,
    pub dwt_opt: f64,
    pub dtheta_opt: f64,
    pub cfsk_ser: f64,
    pub cfsk_ser_ci_low: f64,
    pub cfsk_ser_ci_high: f64,
    pub cfsk_hb: f64,
    pub cfsk_sql: f64,
    pub psk_hb: Option<f64>,
    pub psk_sql: Option<f64>,
    pub qam16_hb: Option<f64>,
    pub ppm_hb: Option<f64>,
}

/// SER and bounds versus pulse energy at fixed M. The CFSK modulation
/// parameters are re-optimized per energy on the bound map (cheap and
/// deterministic); the simulation runs only at the found optimum.
/// `kinds` selects the reference columns; QAM16 requires M = 16.
pub fn scan_energy(
    m: usize,
    kinds: &[ConstellationKind],
    n_bars: &[f64],
    r: &ReceiverModel,
    trials: u64,
    seed: u64,
) -> Result<Vec<EnergyScanRow>> {
    if n_bars.is_empty() {
        return Err(Error::InvalidParams(
            "energy scan needs at least one n_bar".into(),
        ));
    }
    if kinds.contains(&ConstellationKind::Qam16) && m != 16 {
        return Err(Error::InvalidParams(format!(
            "QAM16 reference requires M=16, got M={m}"
        )));
    }
    r.validate(m)?;
    let mut rows = Vec::with_capacity(n_bars.len());
    for (i, &n_bar) in n_bars.iter().enumerate() {
        let i = i as u64;
        let (p_opt, cfsk_hb) = optimize_cfsk_hb(m, n_bar)?;
        let ser = estimate_ser(&p_opt, r, trials, derive_seed(seed, i, 0))?;
        let cfsk_sql =
            sql_error_mc(&Constellation::cfsk(p_opt), trials, derive_seed(seed, i, 1))?.p_error;
        let (psk_hb, psk_sql) = if kinds.contains(&ConstellationKind::Psk) {
            let hb = psk_helstrom_circulant(m, n_bar)?.p_error;
            let sql = sql_error_mc(&Constellation::psk(m, n_bar)?, trials, derive_seed(seed, i, 2))?
                .p_error;
            (Some(hb), Some(sql))
        } else {
            (None, None)
        };
        let qam16_hb = if kinds.contains(&ConstellationKind::Qam16) {
            Some(srm_error(&Constellation::qam16(n_bar)?.gram_matrix())?.p_error)
        } else {
            None
        };
        let ppm_hb = if kinds.contains(&ConstellationKind::Ppm) {
            Some(ppm_helstrom_closed(m, n_bar)?.p_error)
        } else {
            None
        };
        rows.push(EnergyScanRow {
            n_bar,
            dwt_opt: p_opt.delta_omega_t,
            dtheta_opt: p_opt.delta_theta,
            cfsk_ser: ser.p_hat,
            cfsk_ser_ci_low: ser.ci95_low,
            cfsk_ser_ci_high: ser.ci95_high,
            cfsk_hb,
            cfsk_sql,
            psk_hb,
            psk_sql,
            qam16_hb,
            ppm_hb,
        });
    }
    Ok(rows)
}

/// One alphabet size of [`scan_alphabet`]: CFSK and PSK side by side at
/// equal energy per bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphabetScanRow {
    pub m: usize,
    pub n_bar: f64,
    pub dwt_opt: f64,
    pub dtheta_opt: f64,
    pub cfsk_ser: f64,
    pub cfsk_ser_ci_low: f64,
    pub cfsk_ser_ci_high: f64,
    pub cfsk_hb: f64,
    pub cfsk_sql: f64,
    pub psk_ser: f64,
    pub psk_ser_ci_low: f64,
    pub psk_ser_ci_high: f64,
    pub psk_hb: f64,
    pub psk_sql: f64,
}

/// Scalability scan at constant input energy per bit: each alphabet
/// size M (a power of two, so bits per symbol stays integral) runs at
/// n_bar = photons_per_bit * log2(M).
pub fn scan_alphabet(
    ms: &[usize],
    photons_per_bit: f64,
    r: &ReceiverModel,
    trials: u64,
    seed: u64,
) -> Result<Vec<AlphabetScanRow>> {
    if ms.is_empty() {
        return Err(Error::InvalidParams(
            "alphabet scan needs at least one M".into(),
        ));
    }
    if !photons_per_bit.is_finite() || photons_per_bit < 0.0 {
        return Err(Error::InvalidParams(format!(
            "photons per bit must be nonnegative, got {photons_per_bit}"
        )));
    }
    let mut rows = Vec::with_capacity(ms.len());
    for (i, &m) in ms.iter().enumerate() {
        let i = i as u64;
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "alphabet sizes must be powers of two >= 2, got {m}"
            )));
        }
        r.validate(m)?;
        let n_bar = photons_per_bit * m.trailing_zeros() as f64;
        let (p_opt, cfsk_hb) = optimize_cfsk_hb(m, n_bar)?;
        let cfsk_ser = estimate_ser(&p_opt, r, trials, derive_seed(seed, i, 0))?;
        let cfsk_sql =
            sql_error_mc(&Constellation::cfsk(p_opt), trials, derive_seed(seed, i, 1))?.p_error;
        let p_psk = ProtocolParams::psk(m, n_bar)?;
        let psk_ser = estimate_ser(&p_psk, r, trials, derive_seed(seed, i, 2))?;
        let psk_hb = psk_helstrom_circulant(m, n_bar)?.p_error;
        let psk_sql =
            sql_error_mc(&Constellation::psk(m, n_bar)?, trials, derive_seed(seed, i, 3))?.p_error;
        rows.push(AlphabetScanRow {
            m,
            n_bar,
            dwt_opt: p_opt.delta_omega_t,
            dtheta_opt: p_opt.delta_theta,
            cfsk_ser: cfsk_ser.p_hat,
            cfsk_ser_ci_low: cfsk_ser.ci95_low,
            cfsk_ser_ci_high: cfsk_ser.ci95_high,
            cfsk_hb,
            cfsk_sql,
            psk_ser: psk_ser.p_hat,
            psk_ser_ci_low: psk_ser.ci95_low,
            psk_ser_ci_high: psk_ser.ci95_high,
            psk_hb,
            psk_sql,
        });
    }
    Ok(rows)
}

/// Ratio of the optimized CFSK Helstrom bound to the PSK one over an
/// energy axis (x) and an alphabet axis holding integer log2(M) values
/// (y). The PSK parameter point lies on the optimization grid, so the
/// ratio never exceeds 1; eigensolver noise is clamped away.
pub fn hb_ratio_map(n_bar_axis: &GridAxis, log2_m_axis: &GridAxis) -> Result<SweepMap> {
    if n_bar_axis.start < 0.0 {
        return Err(Error::InvalidGrid(
            "energy axis must start at a nonnegative n_bar".into(),
        ));
    }
    let ms = log2_m_axis
        .values()
        .iter()
        .map(|&v| {
            let r = v.round();
            if (v - r).abs() > 1e-9 || !(1.0..=16.0).contains(&r) {
                Err(Error::InvalidGrid(format!(
                    "alphabet axis must hold integer log2(M) in 1..=16, got {v}"
                )))
            } else {
                Ok(1usize << r as u32)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(n_bar_axis.points * log2_m_axis.points);
    for &n_bar in &n_bar_axis.values() {
        for &m in &ms {
            let (_, cfsk) = optimize_cfsk_hb(m, n_bar)?;
            let psk = psk_helstrom_circulant(m, n_bar)?.p_error;
            values.push(if psk <= f64::MIN_POSITIVE {
                1.0
            } else {
                (cfsk / psk).clamp(0.0, 1.0)
            });
        }
    }
    SweepMap::new(
        GridSpec {
            x: n_bar_axis.clone(),
            y: log2_m_axis.clone(),
        },
        values,
        MapMetadata {
            quantity: "hb_ratio".into(),
            m: None,
            n_bar: None,
            model: None,
            trials: None,
            seed: None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn plain_metadata() -> MapMetadata {
        MapMetadata {
            quantity: "hb".into(),
            m: None,
            n_bar: None,
            model: None,
            trials: None,
            seed: None,
        }
    }

    /// Build a map from a per-cell closure; `wrap_y` makes the y axis
    /// tile a full 2π period.
    fn synthetic_map(
        nx: usize,
        ny: usize,
        wrap_y: bool,
        trials: Option<u64>,
        f: impl Fn(usize, usize) -> f64,
    ) -> SweepMap {
        let x = GridAxis::new("x", 0.0, (nx - 1) as f64, nx).unwrap();
        let y = if wrap_y {
            GridAxis::new("y", 0.0, TAU * (ny - 1) as f64 / ny as f64, ny).unwrap()
        } else {
            GridAxis::new("y", 0.0, (ny - 1) as f64, ny).unwrap()
        };
        let mut values = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            for iy in 0..ny {
                values.push(f(ix, iy));
            }
        }
        SweepMap::new(
            GridSpec { x, y },
            values,
            MapMetadata {
                trials,
                ..plain_metadata()
            },
        )
        .unwrap()
    }

    #[test]
    fn axis_validation_and_values() {
        assert!(GridAxis::new("a", 0.0, 1.0, 1).is_err());
        assert!(GridAxis::new("a", 1.0, 1.0, 4).is_err());
        assert!(GridAxis::new("a", 2.0, 1.0, 4).is_err());
        assert!(GridAxis::new("a", 0.0, f64::INFINITY, 4).is_err());
        let axis = GridAxis::new("a", 1.0, 3.0, 5).unwrap();
        assert_eq!(axis.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(!axis.spans_full_circle());
        let circle = GridAxis::new("a", 0.0, TAU * 63.0 / 64.0, 64).unwrap();
        assert!(circle.spans_full_circle());
    }

    #[test]
    fn map_shape_is_enforced() {
        let grid = GridSpec {
            x: GridAxis::new("x", 0.0, 1.0, 2).unwrap(),
            y: GridAxis::new("y", 0.0, 1.0, 2).unwrap(),
        };
        assert!(SweepMap::new(grid.clone(), vec![0.1; 3], plain_metadata()).is_err());
        assert!(SweepMap::new(grid.clone(), vec![1.5; 4], plain_metadata()).is_err());
        let map = SweepMap::new(grid, vec![0.4, 0.3, 0.2, 0.1], plain_metadata()).unwrap();
        assert_eq!(map.argmin(), (1, 1));
        assert_eq!(map.value(0, 1), 0.3);
    }

    #[test]
    fn two_by_two_hb_sweep_works() {
        let grid = GridSpec {
            x: GridAxis::new("dwt", 0.0, 1.0, 2).unwrap(),
            y: GridAxis::new("dtheta", 0.0, 1.0, 2).unwrap(),
        };
        let map = sweep_hb_map(4, 0.7, &grid).unwrap();
        assert_eq!(map.values().len(), 4);
        assert!(map.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let bad = GridSpec {
            x: GridAxis::new("dwt", -1.0, 1.0, 3).unwrap(),
            y: GridAxis::new("dtheta", 0.0, 1.0, 2).unwrap(),
        };
        assert!(sweep_hb_map(4, 0.7, &bad).is_err());
    }

    #[test]
    fn hb_map_matches_psk_at_embedding_cell() {
        for (m, n_bar) in [(4usize, 1.5), (8, 0.6), (16, 3.0)] {
            let grid = GridSpec {
                x: GridAxis::new("dwt", 0.0, 1.0, 2).unwrap(),
                y: GridAxis::new("dtheta", TAU / m as f64, TAU / m as f64 + 0.5, 2).unwrap(),
            };
            let map = sweep_hb_map(m, n_bar, &grid).unwrap();
            let psk = psk_helstrom_circulant(m, n_bar).unwrap().p_error;
            assert!(
                (map.value(0, 0) - psk).abs() < 1e-9,
                "M={m}: {} vs {psk}",
                map.value(0, 0)
            );
        }
    }

    #[test]
    fn hb_map_is_periodic_in_dtheta() {
        let cell = |dtheta: f64| {
            let grid = GridSpec {
                x: GridAxis::new("dwt", 2.0, 3.0, 2).unwrap(),
                y: GridAxis::new("dtheta", dtheta, dtheta + 0.4, 2).unwrap(),
            };
            sweep_hb_map(8, 1.2, &grid).unwrap().value(0, 0)
        };
        assert!((cell(0.3) - cell(0.3 + TAU)).abs() < 1e-12);
    }

    #[test]
    fn ser_map_matches_standalone_psk_at_embedding_cell() {
        let grid = GridSpec {
            x: GridAxis::new("dwt", 0.0, 1.0, 2).unwrap(),
            y: GridAxis::new("dtheta", TAU / 4.0, TAU / 4.0 + 0.3, 2).unwrap(),
        };
        let r = ReceiverModel::ideal();
        let trials = 40_000;
        let map = sweep_ser_map(4, 1.0, &grid, &r, trials, 7).unwrap();
        let standalone = estimate_ser(&ProtocolParams::psk(4, 1.0).unwrap(), &r, trials, 11).unwrap();
        let cell = map.value(0, 0);
        let sigma = |p: f64| (p.max(1e-12) * (1.0 - p) / trials as f64).sqrt();
        let tol = 3.0 * sigma(cell).hypot(sigma(standalone.p_hat));
        assert!(
            (cell - standalone.p_hat).abs() < tol,
            "cell {cell} vs standalone {}",
            standalone.p_hat
        );
    }

    #[test]
    fn ser_map_is_deterministic_and_labeled() {
        let grid = GridSpec {
            x: GridAxis::new("dwt", 2.0, 4.0, 3).unwrap(),
            y: GridAxis::new("dtheta", 0.0, 1.0, 2).unwrap(),
        };
        let r = ReceiverModel::default();
        let a = sweep_ser_map(4, 0.8, &grid, &r, 2_000, 42).unwrap();
        let b = sweep_ser_map(4, 0.8, &grid, &r, 2_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.metadata().quantity, "ser");
        assert_eq!(a.metadata().trials, Some(2_000));
        assert_eq!(a.metadata().m, Some(4));
        let c = sweep_ser_map(4, 0.8, &grid, &r, 2_000, 43).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn ser_cells_respect_the_bound_and_track_its_low_region() {
        // window reaching from badly overlapping modes into the known
        // M=16 low region
        let grid = GridSpec {
            x: GridAxis::new("dwt", 1.0, 7.0, 9).unwrap(),
            y: GridAxis::new("dtheta", 0.0, 0.8, 7).unwrap(),
        };
        let trials = 3_000;
        let hb = sweep_hb_map(16, 2.0, &grid).unwrap();
        let ser = sweep_ser_map(16, 2.0, &grid, &ReceiverModel::ideal(), trials, 5).unwrap();
        for (s, h) in ser.values().iter().zip(hb.values()) {
            let sigma = (h * (1.0 - h) / trials as f64).sqrt();
            assert!(s >= &(h - 3.0 * sigma), "SER {s} below bound {h}");
        }
        let (hx, hy) = hb.argmin();
        let ser_at_hb_opt = ser.value(hx, hy);
        let ser_min = ser.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let ser_max = ser.values().iter().cloned().fold(0.0, f64::max);
        assert!(
            ser_at_hb_opt < ser_min + 0.06,
            "SER at bound optimum {ser_at_hb_opt} far from map minimum {ser_min}"
        );
        assert!(ser_max > 2.0 * ser_at_hb_opt);
    }

    #[test]
    fn single_basin_reports_one_minimum() {
        let map = synthetic_map(9, 7, false, None, |ix, iy| {
            let dx = ix as f64 - 4.0;
            let dy = iy as f64 - 3.0;
            0.1 + 0.01 * (dx * dx + 1.3 * dy * dy) + 1e-4 * (ix as f64 + 0.7 * iy as f64)
        });
        let report = find_minima(&map);
        assert_eq!(report.local_minima.len(), 1);
        let g = report.global.unwrap();
        assert_eq!((g.ix, g.iy), (4, 3));
        assert!(report.secondary.is_none());
    }

    #[test]
    fn two_basins_are_recovered_exactly() {
        let base = |ix: usize, iy: usize, deep: f64, shallow: f64| -> f64 {
            match (ix, iy) {
                (7, 3) => deep,
                (2, 5) => shallow,
                _ => 0.9,
            }
        };
        let map = synthetic_map(11, 8, false, None, |ix, iy| base(ix, iy, 0.001, 0.003));
        let report = find_minima(&map);
        assert_eq!(report.local_minima.len(), 2);
        let g = report.global.unwrap();
        let s = report.secondary.unwrap();
        assert_eq!((g.ix, g.iy, g.value), (7, 3, 0.001));
        assert_eq!((s.ix, s.iy, s.value), (2, 5, 0.003));
        assert!(s.x < g.x);

        // too shallow: beyond the 10x threshold, reported but not secondary
        let faint = synthetic_map(11, 8, false, None, |ix, iy| base(ix, iy, 0.001, 0.05));
        let report = find_minima(&faint);
        assert_eq!(report.local_minima.len(), 2);
        assert!(report.secondary.is_none());

        // qualifying value but on the wrong side of the global minimum
        let wrong_side = synthetic_map(11, 8, false, None, |ix, iy| match (ix, iy) {
            (2, 3) => 0.001,
            (7, 5) => 0.003,
            _ => 0.9,
        });
        assert!(find_minima(&wrong_side).secondary.is_none());

        // argmin invariance under a constant shift
        let shifted = synthetic_map(11, 8, false, None, |ix, iy| {
            base(ix, iy, 0.001, 0.003) + 0.05
        });
        let shifted_report = find_minima(&shifted);
        let positions = |r: &MinimaReport| {
            r.local_minima
                .iter()
                .map(|p| (p.ix, p.iy))
                .collect::<Vec<_>>()
        };
        assert_eq!(positions(&shifted_report), positions(&report));
        let g = shifted_report.global.unwrap();
        assert_eq!((g.ix, g.iy), (7, 3));
    }

    #[test]
    fn flat_map_reports_nothing() {
        let report = find_minima(&synthetic_map(6, 6, false, None, |_, _| 0.5));
        assert!(report.global.is_none());
        assert!(report.secondary.is_none());
        assert!(report.local_minima.is_empty());
    }

    #[test]
    fn phase_axis_wraps_when_it_spans_a_period() {
        let f = |ix: usize, iy: usize| match (ix, iy) {
            (3, 0) => 0.1,
            (3, 7) => 0.05,
            _ => 0.8,
        };
        // circular axis: the two dips are neighbors, only one survives
        let wrapped = find_minima(&synthetic_map(7, 8, true, None, f));
        assert_eq!(wrapped.local_minima.len(), 1);
        let g = wrapped.global.unwrap();
        assert_eq!((g.ix, g.iy), (3, 7));
        // partial axis: they are separated, both are minima
        let open = find_minima(&synthetic_map(7, 8, false, None, f));
        assert_eq!(open.local_minima.len(), 2);
    }

    #[test]
    fn smoothing_suppresses_single_cell_noise_dips() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let nx = 15;
        let ny = 12;
        let mut noise = vec![0.0; nx * ny];
        for v in &mut noise {
            *v = rng.gen_range(-0.015..0.015);
        }
        let f = move |ix: usize, iy: usize| -> f64 {
            if (ix, iy) == (11, 3) {
                return 0.02; // isolated artifact, far below its plateau
            }
            let dx = ix as f64 - 4.0;
            let dy = iy as f64 - 6.0;
            0.1 + 0.8 * (dx * dx + dy * dy) / 140.0 + noise[ix * ny + iy]
        };

        // raw detection takes the artifact at face value
        let raw = find_minima(&synthetic_map(nx, ny, false, None, &f));
        let g = raw.global.unwrap();
        assert_eq!((g.ix, g.iy), (11, 3));

        // Monte Carlo maps are smoothed first: the artifact vanishes
        // and the basin wins
        let smoothed = find_minima(&synthetic_map(nx, ny, false, Some(1_000), &f));
        let g = smoothed.global.unwrap();
        assert!(
            g.ix.abs_diff(4) <= 2 && g.iy.abs_diff(6) <= 2,
            "global at ({}, {})",
            g.ix,
            g.iy
        );
        assert!(smoothed
            .local_minima
            .iter()
            .all(|p| (p.ix, p.iy) != (11, 3)));
    }

    #[test]
    fn default_grid_contains_the_psk_points() {
        let grid = default_optimization_grid();
        assert_eq!(grid.x.points, 81);
        assert_eq!(grid.y.points, 64);
        assert_eq!(grid.x.value(0), 0.0);
        assert!((grid.x.stop - 4.0 * PI).abs() < 1e-12);
        assert!(grid.y.spans_full_circle());
        for m in [2usize, 4, 8, 16, 32, 64] {
            let iy = 64 / m;
            assert!((grid.y.value(iy) - TAU / m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn m16_bound_map_has_the_secondary_minimum() {
        let map = sweep_hb_map(16, 8.0, &default_optimization_grid()).unwrap();
        let report = find_minima(&map);
        let g = report.global.unwrap();
        let s = report.secondary.expect("secondary minimum expected");
        assert!(
            (g.x - 5.811946409141117).abs() < 1e-9,
            "global at dwt {}",
            g.x
        );
        assert!((g.value - 1.930253e-7).abs() / 1.930253e-7 < 1e-4);
        let ratio = s.x / g.x;
        assert!(
            (0.45..0.55).contains(&ratio),
            "secondary at {} vs global {} (ratio {ratio})",
            s.x,
            g.x
        );
        assert!(s.value <= 10.0 * g.value);
    }

    #[test]
    fn refinement_only_improves_the_bound() {
        let coarse = sweep_hb_map(16, 8.0, &default_optimization_grid()).unwrap();
        let (cx, cy) = coarse.argmin();
        let (params, value) = optimize_cfsk_hb(16, 8.0).unwrap();
        assert!(value <= coarse.value(cx, cy));
        assert!(value < psk_helstrom_circulant(16, 8.0).unwrap().p_error);
        assert_eq!(params.m, 16);
        assert!((params.delta_omega_t - coarse.grid().x.value(cx)).abs() <= coarse.grid().x.step());
    }

    #[test]
    fn energy_scan_columns_behave() {
        let rows = scan_energy(
            4,
            &[ConstellationKind::Psk, ConstellationKind::Ppm],
            &[0.25, 0.5, 1.0],
            &ReceiverModel::ideal(),
            20_000,
            3,
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert!(b.cfsk_hb <= a.cfsk_hb + 1e-12);
            assert!(b.psk_hb.unwrap() <= a.psk_hb.unwrap() + 1e-12);
            assert!(b.ppm_hb.unwrap() <= a.ppm_hb.unwrap() + 1e-12);
            // Monte Carlo columns get statistical slack
            let slack = |p: f64| 3.0 * (p.max(1e-9) / 20_000.0f64).sqrt();
            assert!(b.cfsk_ser <= a.cfsk_ser + slack(a.cfsk_ser));
            assert!(b.cfsk_sql <= a.cfsk_sql + slack(a.cfsk_sql));
            assert!(b.psk_sql.unwrap() <= a.psk_sql.unwrap() + slack(a.psk_sql.unwrap()));
        }
        for row in &rows {
            assert!(row.qam16_hb.is_none());
            assert!(row.cfsk_hb <= row.psk_hb.unwrap() + 1e-9);
            let sigma = (row.cfsk_hb * (1.0 - row.cfsk_hb) / 20_000.0).sqrt();
            assert!(row.cfsk_ser >= row.cfsk_hb - 3.0 * sigma);
            assert!((row.cfsk_ser_ci_low..=row.cfsk_ser_ci_high).contains(&row.cfsk_ser));
        }
    }

    #[test]
    fn energy_scan_gates_qam_on_alphabet_size() {
        let err = scan_energy(
            4,
            &[ConstellationKind::Qam16],
            &[1.0],
            &ReceiverModel::ideal(),
            100,
            1,
        )
        .unwrap_err();
        assert!(err.to_string().contains("QAM16"));
    }

    #[test]
    fn alphabet_scan_shows_psk_degrading() {
        let rows = scan_alphabet(&[2, 4, 8], 1.0, &ReceiverModel::ideal(), 20_000, 9).unwrap();
        assert_eq!(rows.len(), 3);
        for (row, (m, n_bar)) in rows.iter().zip([(2usize, 1.0), (4, 2.0), (8, 3.0)]) {
            assert_eq!(row.m, m);
            assert!((row.n_bar - n_bar).abs() < 1e-12);
        }
        // PSK worsens with M at fixed photons per bit
        assert!(rows[1].psk_ser > rows[0].psk_ser);
        assert!(rows[2].psk_ser > rows[1].psk_ser);
        // CFSK never does worse than PSK beyond noise
        for row in &rows {
            let sigma = ((row.psk_ser.max(row.cfsk_ser)).max(1e-9) / 20_000.0f64).sqrt();
            assert!(row.cfsk_ser <= row.psk_ser + 3.0 * sigma);
        }
    }

    #[test]
    fn alphabet_scan_rejects_non_powers_of_two() {
        let err = scan_alphabet(&[6], 1.0, &ReceiverModel::ideal(), 100, 1).unwrap_err();
        assert!(err.to_string().contains("powers of two"));
        assert!(scan_alphabet(&[], 1.0, &ReceiverModel::ideal(), 100, 1).is_err());
    }

    #[test]
    fn ratio_map_shows_the_cfsk_advantage() {
        let n_axis = GridAxis::new("n_bar", 1.0, 2.0, 2).unwrap();
        let m_axis = GridAxis::new("log2_m", 1.0, 4.0, 4).unwrap();
        let map = hb_ratio_map(&n_axis, &m_axis).unwrap();
        assert_eq!(map.metadata().quantity, "hb_ratio");
        assert!(map.values().iter().all(|v| (0.0..=1.0).contains(v)));
        for ix in 0..2 {
            // M=16 column clearly below 1, and the advantage grows with M
            assert!(map.value(ix, 3) < 0.5);
            assert!(map.value(ix, 3) < map.value(ix, 1));
        }
        let fractional = GridAxis::new("log2_m", 1.0, 2.0, 3).unwrap();
        assert!(hb_ratio_map(&n_axis, &fractional).is_err());
    }
}
