//! Closest-point categorical models and sector-searched inverse-distance
//! continuous models over an active mask.
//!
//! Samples are ordered by `(x, y, z)` before any search and every tie goes to
//! the lowest position in that order, so results do not depend on input
//! order. Samples sharing a map position form one column; because distance
//! within a column only depends on `|dz|`, the nearest sample of a column is
//! found by binary search. Results are identical to an exhaustive scan.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::borehole::{PointSample, Unit};
use crate::error::{Error, Result};
use crate::model_space::{GridSpec, VolumeMask};

/// Per-voxel categorical codes over the active voxels of a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalModel {
    mask: VolumeMask,
    codes: Vec<Option<u32>>,
    dictionary: Vec<String>,
}

impl CategoricalModel {
    /// `codes[i]` must be `Some` exactly on active voxels and index into
    /// `dictionary`.
    pub fn new(mask: VolumeMask, codes: Vec<Option<u32>>, dictionary: Vec<String>) -> Result<Self> {
        if codes.len() != mask.grid().len() {
            return Err(Error::GridMismatch);
        }
        for (i, c) in codes.iter().enumerate() {
            match c {
                Some(c) if mask.get(i) && (*c as usize) < dictionary.len() => {}
                None if !mask.get(i) => {}
                _ => return Err(Error::Config(format!("voxel {i} has an invalid or missing code"))),
            }
        }
        Ok(Self { mask, codes, dictionary })
    }

    pub fn grid(&self) -> &GridSpec {
        self.mask.grid()
    }

    pub fn mask(&self) -> &VolumeMask {
        &self.mask
    }

    pub fn dictionary(&self) -> &[String] {
        &self.dictionary
    }

    pub fn code_index(&self, voxel: usize) -> Option<u32> {
        self.codes[voxel]
    }

    pub fn code(&self, voxel: usize) -> Option<&str> {
        self.codes[voxel].map(|c| self.dictionary[c as usize].as_str())
    }

    /// Voxels carrying `code`.
    pub fn unit_mask(&self, code: &str) -> VolumeMask {
        match self.dictionary.iter().position(|d| d == code) {
            Some(c) => VolumeMask::from_fn(*self.grid(), |i| self.codes[i] == Some(c as u32)),
            None => VolumeMask::empty(*self.grid()),
        }
    }

    /// Voxel counts per dictionary entry.
    pub fn unit_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dictionary.len()];
        for c in self.codes.iter().flatten() {
            counts[*c as usize] += 1;
        }
        counts
    }
}

/// Per-voxel values over the active voxels of a mask; inactive voxels hold
/// NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousModel {
    mask: VolumeMask,
    values: Vec<f64>,
    unit: String,
}

impl ContinuousModel {
    pub fn new(mask: VolumeMask, mut values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        if values.len() != mask.grid().len() {
            return Err(Error::GridMismatch);
        }
        for (i, v) in values.iter_mut().enumerate() {
            if mask.get(i) {
                if !v.is_finite() {
                    return Err(Error::Config(format!("non-finite value at active voxel {i}")));
                }
            } else {
                *v = f64::NAN;
            }
        }
        Ok(Self { mask, values, unit: unit.into() })
    }

    pub fn from_fn(mask: VolumeMask, unit: impl Into<String>, mut f: impl FnMut(usize) -> f64) -> Result<Self> {
        let values = (0..mask.grid().len()).map(|i| if mask.get(i) { f(i) } else { f64::NAN }).collect();
        Self::new(mask, values, unit)
    }

    pub fn grid(&self) -> &GridSpec {
        self.mask.grid()
    }

    pub fn mask(&self) -> &VolumeMask {
        &self.mask
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn value(&self, voxel: usize) -> Option<f64> {
        self.mask.get(voxel).then(|| self.values[voxel])
    }

    /// Raw per-voxel storage, NaN outside the mask.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(voxel, value)` over active voxels.
    pub fn iter_active(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.mask.iter_active().map(|i| (i, self.values[i]))
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.iter_active().fold(None, |acc, (_, v)| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Active voxels with value at or above `cutoff`.
    pub fn at_least(&self, cutoff: f64) -> VolumeMask {
        VolumeMask::from_fn(*self.grid(), |i| self.mask.get(i) && self.values[i] >= cutoff)
    }

    /// Same values, restricted to `mask` (which must be a subset).
    pub fn restrict(&self, mask: &VolumeMask) -> Result<Self> {
        if !mask.is_subset_of(&self.mask)? {
            return Err(Error::Config("restriction mask is not inside the model's mask".into()));
        }
        Self::new(mask.clone(), self.values.clone(), self.unit.clone())
    }
}

/// Per-column map raster of unit codes, e.g. a geological map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRaster {
    columns: [usize; 2],
    codes: Vec<Option<String>>,
}

impl MapRaster {
    pub fn new(columns: [usize; 2], codes: Vec<Option<String>>) -> Result<Self> {
        if codes.len() != columns[0] * columns[1] {
            return Err(Error::GridMismatch);
        }
        Ok(Self { columns, codes })
    }

    pub fn columns(&self) -> [usize; 2] {
        self.columns
    }

    pub fn code(&self, column: usize) -> Option<&str> {
        self.codes[column].as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestParams {
    /// Vertical distances are divided by this before measuring.
    pub vertical_anisotropy: f64,
}

impl Default for NearestParams {
    fn default() -> Self {
        Self { vertical_anisotropy: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwParams {
    pub power: f64,
    pub sectors: usize,
    /// Vertical distances are divided by this before measuring.
    pub vertical_anisotropy: f64,
}

impl Default for IdwParams {
    fn default() -> Self {
        Self { power: 2.0, sectors: 4, vertical_anisotropy: 1.0 }
    }
}

/// Sector of a horizontal offset. Azimuth 0 is grid east, angles increase
/// counter-clockwise and each sector includes its lower edge. A zero offset
/// falls in sector 0.
pub fn sector_of(dx: f64, dy: f64, sectors: usize) -> usize {
    let mut az = dy.atan2(dx);
    if az < 0.0 {
        az += TAU;
    }
    let s = (az / (TAU / sectors as f64)).floor() as usize;
    s.min(sectors - 1)
}

struct Column {
    x: f64,
    y: f64,
    /// ascending; equal values keep their sorted-sample order
    zs: Vec<f64>,
    first_rank: usize,
}

struct ColumnIndex {
    columns: Vec<Column>,
}

impl ColumnIndex {
    /// `positions` must already be sorted by `(x, y, z)`.
    fn new(positions: &[[f64; 3]]) -> Self {
        let mut columns: Vec<Column> = Vec::new();
        for (rank, p) in positions.iter().enumerate() {
            match columns.last_mut() {
                Some(c) if c.x == p[0] && c.y == p[1] => c.zs.push(p[2]),
                _ => columns.push(Column { x: p[0], y: p[1], zs: vec![p[2]], first_rank: rank }),
            }
        }
        Self { columns }
    }
}

impl Column {
    /// Rank and |dz| of the sample closest to `z`, ties to the lower rank.
    fn nearest(&self, z: f64) -> (usize, f64) {
        let p = self.zs.partition_point(|&v| v < z);
        let first_of = |value: f64| self.zs.partition_point(|&v| v < value);
        let below = (p > 0).then(|| {
            let i = first_of(self.zs[p - 1]);
            (i, z - self.zs[i])
        });
        let above = (p < self.zs.len()).then(|| (p, self.zs[p] - z));
        let (i, dz) = match (below, above) {
            (Some(b), Some(a)) => {
                if a.1 < b.1 {
                    a
                } else {
                    b
                }
            }
            (Some(b), None) => b,
            (None, Some(a)) => a,
            (None, None) => unreachable!("columns are never empty"),
        };
        (self.first_rank + i, dz)
    }
}

fn sort_samples<T: Clone>(mut items: Vec<([f64; 3], T)>) -> Vec<([f64; 3], T)> {
    items.sort_by(|a, b| {
        a.0[0]
            .total_cmp(&b.0[0])
            .then(a.0[1].total_cmp(&b.0[1]))
            .then(a.0[2].total_cmp(&b.0[2]))
    });
    items
}

fn check_position(p: [f64; 3]) -> Result<()> {
    if p.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::Config(format!("sample at non-finite position {p:?}")))
    }
}

/// Closest-point categorical model: every active voxel takes the code of the
/// sample nearest its centroid.
pub fn nearest_value<'a>(
    samples: impl IntoIterator<Item = &'a PointSample>,
    mask: &VolumeMask,
    params: NearestParams,
) -> Result<CategoricalModel> {
    if !(params.vertical_anisotropy > 0.0) {
        return Err(Error::Config("vertical anisotropy must be positive".into()));
    }
    let mut items = Vec::new();
    for s in samples {
        let code = s
            .value
            .as_category()
            .ok_or_else(|| Error::Config(format!("sample of {} is numeric, expected a category", s.attribute)))?;
        check_position(s.position())?;
        items.push((s.position(), code.to_string()));
    }
    if items.is_empty() {
        return Err(Error::InsufficientData("closest-point interpolation needs at least one sample".into()));
    }
    let items = sort_samples(items);
    let mut dictionary: Vec<String> = items.iter().map(|(_, c)| c.clone()).collect();
    dictionary.sort();
    dictionary.dedup();
    let sample_codes: Vec<u32> = items
        .iter()
        .map(|(_, c)| dictionary.binary_search(c).expect("code is in dictionary") as u32)
        .collect();
    let positions: Vec<[f64; 3]> = items.iter().map(|(p, _)| *p).collect();
    let index = ColumnIndex::new(&positions);
    let grid = *mask.grid();
    let inv_a = 1.0 / params.vertical_anisotropy;

    let codes: Vec<Option<u32>> = (0..grid.len())
        .into_par_iter()
        .map(|v| {
            if !mask.get(v) {
                return None;
            }
            let [cx, cy, cz] = grid.centroid(v);
            let mut best = (f64::INFINITY, usize::MAX);
            for col in &index.columns {
                let dh2 = (col.x - cx).powi(2) + (col.y - cy).powi(2);
                if dh2 > best.0 {
                    continue;
                }
                let (rank, dz) = col.nearest(cz);
                let d2 = dh2 + (dz * inv_a).powi(2);
                if d2 < best.0 || (d2 == best.0 && rank < best.1) {
                    best = (d2, rank);
                }
            }
            Some(sample_codes[best.1])
        })
        .collect();
    CategoricalModel::new(mask.clone(), codes, dictionary)
}

/// Overwrites the top active voxel of every column with the mapped unit.
pub fn constrain_surface(model: &CategoricalModel, raster: &MapRaster) -> Result<CategoricalModel> {
    let grid = *model.grid();
    let [nx, ny, nz] = grid.counts();
    if raster.columns() != [nx, ny] {
        return Err(Error::GridMismatch);
    }
    let mut dictionary = model.dictionary.clone();
    for c in raster.codes.iter().flatten() {
        if !dictionary.contains(c) {
            dictionary.push(c.clone());
        }
    }
    let mut codes = model.codes.clone();
    for column in 0..grid.columns() {
        let Some(top) = (0..nz).rev().map(|k| column + nx * ny * k).find(|&v| model.mask.get(v)) else {
            continue;
        };
        let code = raster.code(column).ok_or_else(|| {
            Error::Config(format!("map raster has no unit at active column i={}, j={}", column % nx, column / nx))
        })?;
        let c = dictionary.iter().position(|d| d == code).expect("raster codes were added");
        codes[top] = Some(c as u32);
    }
    CategoricalModel::new(model.mask.clone(), codes, dictionary)
}

/// Inverse-distance model with sector search: around each voxel the closest
/// sample in every non-empty horizontal sector is weighted by `d^-power`. A
/// voxel centroid that coincides with a sample takes that sample's value.
pub fn idw_anisotropic<'a>(
    samples: impl IntoIterator<Item = &'a PointSample>,
    mask: &VolumeMask,
    params: IdwParams,
) -> Result<ContinuousModel> {
    if !(params.power > 0.0) {
        return Err(Error::Config(format!("power must be positive, got {}", params.power)));
    }
    if params.sectors == 0 {
        return Err(Error::Config("at least one search sector is required".into()));
    }
    if !(params.vertical_anisotropy > 0.0) {
        return Err(Error::Config("vertical anisotropy must be positive".into()));
    }
    let mut items = Vec::new();
    let mut unit: Option<Unit> = None;
    for s in samples {
        let (value, u) = s
            .value
            .as_numeric()
            .ok_or_else(|| Error::Config(format!("sample of {} is categorical, expected a number", s.attribute)))?;
        match unit {
            Some(prev) if prev != u => {
                return Err(Error::Config(format!("samples of {} mix {prev} and {u}", s.attribute)));
            }
            _ => unit = Some(u),
        }
        check_position(s.position())?;
        items.push((s.position(), value));
    }
    let Some(unit) = unit else {
        return Err(Error::InsufficientData("inverse-distance interpolation needs at least one sample".into()));
    };
    let items = sort_samples(items);
    let positions: Vec<[f64; 3]> = items.iter().map(|(p, _)| *p).collect();
    let sample_values: Vec<f64> = items.iter().map(|(_, v)| *v).collect();
    let index = ColumnIndex::new(&positions);
    let grid = *mask.grid();
    let inv_a = 1.0 / params.vertical_anisotropy;
    let half_power = params.power / 2.0;
    let sectors = params.sectors;

    let values: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|v| {
            if !mask.get(v) {
                return Ok(f64::NAN);
            }
            let [cx, cy, cz] = grid.centroid(v);
            let mut best = vec![(f64::INFINITY, usize::MAX); sectors];
            for col in &index.columns {
                let (dx, dy) = (col.x - cx, col.y - cy);
                let s = sector_of(dx, dy, sectors);
                let dh2 = dx * dx + dy * dy;
                if dh2 > best[s].0 {
                    continue;
                }
                let (rank, dz) = col.nearest(cz);
                let d2 = dh2 + (dz * inv_a).powi(2);
                if d2 < best[s].0 || (d2 == best[s].0 && rank < best[s].1) {
                    best[s] = (d2, rank);
                }
            }
            weighted_mean(&best, &sample_values, half_power)
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    ContinuousModel::new(mask.clone(), values, unit.as_str())
}

/// `best[s]` is `(squared distance, sample rank)` of the sector's closest
/// sample, `rank == usize::MAX` when the sector is empty.
fn weighted_mean(best: &[(f64, usize)], values: &[f64], half_power: f64) -> Result<f64> {
    let picked = || best.iter().filter(|(_, r)| *r != usize::MAX);
    if let Some((_, r)) = picked().filter(|(d2, _)| *d2 == 0.0).min_by_key(|(_, r)| *r) {
        return Ok(values[*r]);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(d2, r) in picked() {
        let w = d2.powf(-half_power);
        num += w * values[r];
        den += w;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::InsufficientData("no sample found in any search sector".into()))
    }
}
