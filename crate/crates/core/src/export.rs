//! Plain-text artifacts: voxel and mask CSV (with readers), legacy VTK
//! structured points, and weight tables.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::interpolate::{CategoricalModel, ContinuousModel};
use crate::model_space::{GridSpec, VolumeMask};
use crate::threshold::{CVCurve, SegmentedFit};
use crate::validate::PVCurves;
use crate::wofe::{BinaryLayer, ClassBounds, ClassedLayer, ContingencyCounts, FuzzyClassRecord, WeightRecord};

/// Written in place of missing values in VTK output.
pub const VTK_NODATA: f64 = -9999.0;

fn csv_error(table: &str, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { table: table.into(), row, reason: format!("{other:?}") },
    }
}

fn io_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// `i,j,k,x,y,z,value` for every active voxel, in index order.
pub fn write_voxel_csv<W: Write>(out: W, model: &ContinuousModel) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "j", "k", "x", "y", "z", "value"]).map_err(io_error)?;
    let g = model.grid();
    for (v, value) in model.iter_active() {
        let [i, j, k] = g.ijk(v);
        let [x, y, z] = g.centroid(v);
        w.write_record([i.to_string(), j.to_string(), k.to_string(), x.to_string(), y.to_string(), z.to_string(), value.to_string()])
            .map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// `i,j,k,x,y,z,code` for every active voxel.
pub fn write_categorical_csv<W: Write>(out: W, model: &CategoricalModel) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "j", "k", "x", "y", "z", "code"]).map_err(io_error)?;
    let g = model.grid();
    for v in model.mask().iter_active() {
        let [i, j, k] = g.ijk(v);
        let [x, y, z] = g.centroid(v);
        let code = model.code(v).unwrap_or_default();
        w.write_record([i.to_string(), j.to_string(), k.to_string(), x.to_string(), y.to_string(), z.to_string(), code.to_string()])
            .map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// `i,j,k,flag` for every voxel of the grid.
pub fn write_mask_csv<W: Write>(out: W, mask: &VolumeMask) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "j", "k", "flag"]).map_err(io_error)?;
    let g = mask.grid();
    for v in 0..g.len() {
        let [i, j, k] = g.ijk(v);
        w.write_record([i.to_string(), j.to_string(), k.to_string(), u8::from(mask.get(v)).to_string()])
            .map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

fn voxel_of(g: &GridSpec, table: &str, row: u64, ijk: [&str; 3]) -> Result<usize> {
    let mut idx = [0usize; 3];
    for (a, s) in ijk.iter().enumerate() {
        idx[a] = s.trim().parse().map_err(|_| Error::Parse {
            table: table.into(),
            row,
            reason: format!("bad voxel index {s:?}"),
        })?;
        if idx[a] >= g.counts()[a] {
            return Err(Error::Parse { table: table.into(), row, reason: format!("voxel index {s} outside the grid") });
        }
    }
    Ok(g.index(idx[0], idx[1], idx[2]))
}

fn check_header(table: &str, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse {
            table: table.into(),
            row: 1,
            reason: format!("expected columns {}", expected.join(",")),
        });
    }
    Ok(())
}

/// Reads a table written by [`write_voxel_csv`].
pub fn read_voxel_csv<R: Read>(input: R, grid: GridSpec, unit: &str, table: &str) -> Result<ContinuousModel> {
    let mut r = csv::Reader::from_reader(input);
    check_header(table, &r.headers().map_err(|e| csv_error(table, e))?.clone(), &["i", "j", "k", "x", "y", "z", "value"])?;
    let mut values = vec![f64::NAN; grid.len()];
    let mut flags = vec![false; grid.len()];
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(table, e))?;
        let row = rec.position().map_or(0, |p| p.line());
        let v = voxel_of(&grid, table, row, [&rec[0], &rec[1], &rec[2]])?;
        let value: f64 = rec[6].trim().parse().map_err(|_| Error::Parse {
            table: table.into(),
            row,
            reason: format!("bad value {:?}", &rec[6]),
        })?;
        if flags[v] {
            return Err(Error::Parse { table: table.into(), row, reason: "voxel listed twice".into() });
        }
        flags[v] = true;
        values[v] = value;
    }
    ContinuousModel::new(VolumeMask::from_flags(grid, flags)?, values, unit)
}

/// Reads a table written by [`write_categorical_csv`]; codes are numbered in
/// order of first appearance.
pub fn read_categorical_csv<R: Read>(input: R, grid: GridSpec, table: &str) -> Result<CategoricalModel> {
    let mut r = csv::Reader::from_reader(input);
    check_header(table, &r.headers().map_err(|e| csv_error(table, e))?.clone(), &["i", "j", "k", "x", "y", "z", "code"])?;
    let mut codes = vec![None; grid.len()];
    let mut dictionary: Vec<String> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(table, e))?;
        let row = rec.position().map_or(0, |p| p.line());
        let v = voxel_of(&grid, table, row, [&rec[0], &rec[1], &rec[2]])?;
        let name = rec[6].trim();
        let code = match dictionary.iter().position(|d| d == name) {
            Some(c) => c,
            None => {
                dictionary.push(name.to_string());
                dictionary.len() - 1
            }
        };
        if codes[v].replace(code as u32).is_some() {
            return Err(Error::Parse { table: table.into(), row, reason: "voxel listed twice".into() });
        }
    }
    let mask = VolumeMask::from_flags(grid, codes.iter().map(Option::is_some).collect())?;
    CategoricalModel::new(mask, codes, dictionary)
}

/// Reads a table written by [`write_mask_csv`]. Voxels not listed are
/// inactive.
pub fn read_mask_csv<R: Read>(input: R, grid: GridSpec, table: &str) -> Result<VolumeMask> {
    let mut r = csv::Reader::from_reader(input);
    check_header(table, &r.headers().map_err(|e| csv_error(table, e))?.clone(), &["i", "j", "k", "flag"])?;
    let mut flags = vec![false; grid.len()];
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(table, e))?;
        let row = rec.position().map_or(0, |p| p.line());
        let v = voxel_of(&grid, table, row, [&rec[0], &rec[1], &rec[2]])?;
        flags[v] = match rec[3].trim() {
            "1" => true,
            "0" => false,
            other => return Err(Error::Parse { table: table.into(), row, reason: format!("flag {other:?} is not 0 or 1") }),
        };
    }
    VolumeMask::from_flags(grid, flags)
}

/// Legacy VTK structured points with one double scalar field per model.
/// Points sit at voxel centroids; missing values become [`VTK_NODATA`].
pub fn write_vtk<W: Write>(mut out: W, title: &str, fields: &[(&str, &ContinuousModel)]) -> Result<()> {
    let grid = match fields.first() {
        Some((_, m)) => *m.grid(),
        None => return Err(Error::Config("no fields to export".into())),
    };
    if fields.iter().any(|(_, m)| *m.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let [nx, ny, nz] = grid.counts();
    let [cx, cy, cz] = grid.centroid(0);
    let [dx, dy, dz] = grid.spacing();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.replace('\n', " "))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(out, "ORIGIN {cx} {cy} {cz}")?;
    writeln!(out, "SPACING {dx} {dy} {dz}")?;
    writeln!(out, "POINT_DATA {}", grid.len())?;
    for (name, model) in fields {
        let name: String = name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in 0..grid.len() {
            writeln!(out, "{}", model.value(v).unwrap_or(VTK_NODATA))?;
        }
    }
    Ok(())
}

const BINARY_COLUMNS: [&str; 14] = [
    "layer", "w_plus", "w_minus", "contrast", "studentized_contrast", "std_contrast", "var_w_plus", "var_w_minus",
    "n_em", "n_e_not_m", "n_not_e_m", "n_not_e_not_m", "corrected", "included",
];

const CLASS_COLUMNS: [&str; 18] = [
    "lower", "upper", "w_plus", "w_minus", "contrast", "studentized_contrast", "fuzzy_contrast", "fuzzy_weight",
    "std_contrast", "var_w_plus", "var_w_minus", "fuzzy_variance", "n_em", "n_e_not_m", "n_not_e_m", "n_not_e_not_m",
    "corrected", "included",
];

fn weight_fields(r: &WeightRecord) -> [String; 4] {
    [r.w_plus.to_string(), r.w_minus.to_string(), r.contrast.to_string(), r.studentized_contrast.to_string()]
}

fn count_fields(c: &ContingencyCounts) -> [String; 4] {
    [c.e_m.to_string(), c.e_not_m.to_string(), c.not_e_m.to_string(), c.not_e_not_m.to_string()]
}

/// One row per binary layer: weights, their variances, the (corrected)
/// contingency counts and the selection flag.
pub fn write_binary_weights<W: Write>(out: W, layers: &[&BinaryLayer]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BINARY_COLUMNS).map_err(io_error)?;
    for l in layers {
        let r = &l.record;
        let mut row = vec![l.name.clone()];
        row.extend(weight_fields(r));
        row.extend([r.std_contrast.to_string(), r.var_w_plus.to_string(), r.var_w_minus.to_string()]);
        row.extend(count_fields(&l.counts));
        row.extend([l.corrected.to_string(), l.included.to_string()]);
        w.write_record(&row).map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per class: the columns of a fuzzy weight table first, then
/// diagnostics.
pub fn write_class_weights<W: Write>(out: W, layer: &ClassedLayer) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CLASS_COLUMNS).map_err(io_error)?;
    for c in &layer.classes {
        let r = &c.record;
        let mut row = vec![c.bounds.lower.to_string(), c.bounds.upper.to_string()];
        row.extend(weight_fields(r));
        row.extend([c.fuzzy_contrast.to_string(), c.fuzzy_weight.to_string()]);
        row.extend([r.std_contrast.to_string(), r.var_w_plus.to_string(), r.var_w_minus.to_string()]);
        row.push(c.fuzzy_variance.to_string());
        row.extend(count_fields(&c.counts));
        row.extend([c.corrected.to_string(), c.included.to_string()]);
        w.write_record(&row).map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// A binary weight table row.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryWeightRow {
    pub name: String,
    pub counts: ContingencyCounts,
    pub record: WeightRecord,
    pub corrected: bool,
    pub included: bool,
}

struct Row<'a> {
    table: &'a str,
    line: u64,
    rec: csv::StringRecord,
}

impl Row<'_> {
    fn num(&self, i: usize) -> Result<f64> {
        self.rec[i].trim().parse().map_err(|_| Error::Parse {
            table: self.table.into(),
            row: self.line,
            reason: format!("bad number {:?}", &self.rec[i]),
        })
    }

    fn flag(&self, i: usize) -> Result<bool> {
        self.rec[i].trim().parse().map_err(|_| Error::Parse {
            table: self.table.into(),
            row: self.line,
            reason: format!("bad flag {:?}", &self.rec[i]),
        })
    }

    fn counts(&self, first: usize) -> Result<ContingencyCounts> {
        Ok(ContingencyCounts {
            e_m: self.num(first)?,
            e_not_m: self.num(first + 1)?,
            not_e_m: self.num(first + 2)?,
            not_e_not_m: self.num(first + 3)?,
        })
    }
}

fn rows<'a, R: Read>(input: R, table: &'a str, columns: &[&str]) -> Result<Vec<Row<'a>>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(table, &r.headers().map_err(|e| csv_error(table, e))?.clone(), columns)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| csv_error(table, e))?;
            Ok(Row { table, line: rec.position().map_or(0, |p| p.line()), rec })
        })
        .collect()
}

/// Reads a table written by [`write_binary_weights`].
pub fn read_binary_weights<R: Read>(input: R, table: &str) -> Result<Vec<BinaryWeightRow>> {
    rows(input, table, &BINARY_COLUMNS)?
        .iter()
        .map(|row| {
            Ok(BinaryWeightRow {
                name: row.rec[0].to_string(),
                record: WeightRecord::from_parts(row.num(1)?, row.num(2)?, row.num(6)?, row.num(7)?),
                counts: row.counts(8)?,
                corrected: row.flag(12)?,
                included: row.flag(13)?,
            })
        })
        .collect()
}

/// Reads a table written by [`write_class_weights`].
pub fn read_class_weights<R: Read>(input: R, table: &str) -> Result<Vec<FuzzyClassRecord>> {
    rows(input, table, &CLASS_COLUMNS)?
        .iter()
        .map(|row| {
            Ok(FuzzyClassRecord {
                bounds: ClassBounds { lower: row.num(0)?, upper: row.num(1)? },
                record: WeightRecord::from_parts(row.num(2)?, row.num(3)?, row.num(9)?, row.num(10)?),
                fuzzy_contrast: row.num(6)?,
                fuzzy_weight: row.num(7)?,
                fuzzy_variance: row.num(11)?,
                counts: row.counts(12)?,
                corrected: row.flag(16)?,
                included: row.flag(17)?,
            })
        })
        .collect()
}

/// Curve points with the fitted line value and segment of each.
pub fn write_cv_csv<W: Write>(out: W, curve: &CVCurve, fit: &SegmentedFit) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value", "volume", "segment", "fitted_volume"]).map_err(io_error)?;
    for (i, (v, vol)) in curve.values().iter().zip(curve.volumes()).enumerate() {
        let (s, seg) = fit
            .segments
            .iter()
            .enumerate()
            .find(|(_, s)| (s.first..=s.last).contains(&i))
            .expect("segments cover the curve");
        let fitted = (seg.intercept + seg.slope * v.ln()).exp();
        w.write_record([v.to_string(), vol.to_string(), s.to_string(), fitted.to_string()]).map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pv_csv<W: Write>(out: W, pv: &PVCurves) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["threshold", "prediction_rate", "occupied_volume"]).map_err(io_error)?;
    for ((t, p), v) in pv.thresholds.iter().zip(&pv.prediction).zip(&pv.volume) {
        w.write_record([t.to_string(), p.to_string(), v.to_string()]).map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}
