//! Versioned intermediate files. Every stage writes its own directory under
//! the output root together with a `manifest.toml` naming the files it
//! produced and the schema they follow. Readers refuse directories written
//! under a different schema.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wofe3d::borehole::{PointSample, SampleValue, Unit};
use wofe3d::{export, CategoricalModel, ContinuousModel, GridSpec, VolumeMask};

use crate::config::GridSection;
use crate::error::{CliError, CliResult, WithPath};

pub const SCHEMA_VERSION: u32 = 1;

/// Layout of every intermediate file; hashed into each manifest so a change
/// here invalidates earlier outputs.
const SCHEMA: &str = "\
ingest/grid.toml: origin, counts, spacing
ingest/space.csv: i,j,k,flag
ingest/samples.csv: x,y,z,attribute,value,unit (unit `category` for codes)
ingest/ribbons.csv: fault_id,quad,x0,y0,z0,x1,y1,z1,x2,y2,z2,x3,y3,z3
interp/*.csv: i,j,k,x,y,z,value | i,j,k,x,y,z,code
evidence/*.csv: i,j,k,flag
weights/binary.csv: layer,w_plus,w_minus,contrast,studentized_contrast,std_contrast,var_w_plus,var_w_minus,n_em,n_e_not_m,n_not_e_m,n_not_e_not_m,corrected,included
weights/class_*.csv: lower,upper,w_plus,w_minus,contrast,studentized_contrast,fuzzy_contrast,fuzzy_weight,std_contrast,var_w_plus,var_w_minus,fuzzy_variance,n_em,n_e_not_m,n_not_e_m,n_not_e_not_m,corrected,included
integrate/*.csv: i,j,k,x,y,z,value
threshold/*: cv value,volume,segment,fitted_volume; classes i,j,k,x,y,z,code
validate/*: threshold,prediction_rate,occupied_volume
";

pub fn schema_hash() -> String {
    let digest = Sha256::digest(format!("{SCHEMA_VERSION}\n{SCHEMA}").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// One file produced by a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// What the file holds, e.g. `categorical`, `continuous`, `layer`.
    pub role: String,
    /// Attribute, element or layer name.
    pub name: String,
    pub path: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub schema_hash: String,
    pub stage: String,
    #[serde(default)]
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn entries<'a>(&'a self, role: &'a str) -> impl Iterator<Item = &'a FileEntry> + 'a {
        self.files.iter().filter(move |f| f.role == role)
    }

    pub fn entry(&self, role: &str, name: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.role == role && f.name == name)
    }
}

/// Root of the output tree.
#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

/// Collects the files of one stage; the manifest is written by `finish`.
pub struct StageWriter<'a> {
    store: &'a Store,
    stage: &'static str,
    files: Vec<FileEntry>,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dir(&self, stage: &str) -> PathBuf {
        self.root.join(stage)
    }

    /// Starts `stage` afresh, removing whatever an earlier run left.
    pub fn begin(&self, stage: &'static str) -> CliResult<StageWriter<'_>> {
        let dir = self.dir(stage);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        }
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(StageWriter { store: self, stage, files: Vec::new() })
    }

    /// Manifest of a finished stage, checked against this build's schema.
    pub fn manifest(&self, stage: &str) -> CliResult<Manifest> {
        let path = self.dir(stage).join("manifest.toml");
        if !path.is_file() {
            return Err(CliError::MissingIntermediate { path, stage: stage.to_string() });
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let m: Manifest = toml::from_str(&text).map_err(|e| CliError::config(&path, e.to_string()))?;
        let expected = schema_hash();
        if m.schema_version != SCHEMA_VERSION || m.schema_hash != expected {
            return Err(CliError::SchemaVersion {
                path,
                stage: stage.to_string(),
                found: m.schema_version,
                found_hash: m.schema_hash,
                expected: SCHEMA_VERSION,
                expected_hash: expected,
            });
        }
        Ok(m)
    }

    fn path_of(&self, stage: &str, file: &str) -> PathBuf {
        self.dir(stage).join(file)
    }

    fn read(&self, stage: &str, file: &str) -> CliResult<(PathBuf, Vec<u8>)> {
        let path = self.path_of(stage, file);
        match fs::read(&path) {
            Ok(bytes) => Ok((path, bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(CliError::MissingIntermediate { path, stage: stage.to_string() })
            }
            Err(e) => Err(CliError::io(path, e)),
        }
    }

    pub fn read_text(&self, stage: &str, file: &str) -> CliResult<String> {
        let (path, bytes) = self.read(stage, file)?;
        String::from_utf8(bytes).map_err(|_| CliError::config(path, "not UTF-8"))
    }

    pub fn grid(&self) -> CliResult<GridSpec> {
        self.manifest("ingest")?;
        let text = self.read_text("ingest", "grid.toml")?;
        let path = self.path_of("ingest", "grid.toml");
        let g: GridSection = toml::from_str(&text).map_err(|e| CliError::config(&path, e.to_string()))?;
        GridSpec::new(g.origin, g.counts, g.spacing).at(&path)
    }

    pub fn read_mask(&self, stage: &str, file: &str, grid: GridSpec) -> CliResult<VolumeMask> {
        let (path, bytes) = self.read(stage, file)?;
        export::read_mask_csv(&bytes[..], grid, &path.display().to_string()).at(&path)
    }

    pub fn read_continuous(&self, stage: &str, file: &str, grid: GridSpec, unit: &str) -> CliResult<ContinuousModel> {
        let (path, bytes) = self.read(stage, file)?;
        export::read_voxel_csv(&bytes[..], grid, unit, &path.display().to_string()).at(&path)
    }

    pub fn read_categorical(&self, stage: &str, file: &str, grid: GridSpec) -> CliResult<CategoricalModel> {
        let (path, bytes) = self.read(stage, file)?;
        export::read_categorical_csv(&bytes[..], grid, &path.display().to_string()).at(&path)
    }

    pub fn read_bytes(&self, stage: &str, file: &str) -> CliResult<(PathBuf, Vec<u8>)> {
        self.read(stage, file)
    }
}

impl StageWriter<'_> {
    /// Writes `bytes` to `file` inside the stage directory and records it.
    pub fn put(&mut self, file: &str, role: &str, name: &str, unit: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.store.path_of(self.stage, file);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry { role: role.into(), name: name.into(), path: file.into(), unit: unit.into() });
        Ok(())
    }

    /// Serializes with `write` into `file`.
    pub fn put_with(
        &mut self,
        file: &str,
        role: &str,
        name: &str,
        unit: &str,
        write: impl FnOnce(&mut Vec<u8>) -> wofe3d::Result<()>,
    ) -> CliResult<()> {
        let mut buf = Vec::new();
        write(&mut buf).at(&self.store.path_of(self.stage, file))?;
        self.put(file, role, name, unit, &buf)
    }

    pub fn finish(self) -> CliResult<()> {
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            schema_hash: schema_hash(),
            stage: self.stage.to_string(),
            files: self.files,
        };
        let path = self.store.path_of(self.stage, "manifest.toml");
        let text = toml::to_string(&manifest).map_err(|e| CliError::config(&path, e.to_string()))?;
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

/// File-name-safe form of a layer or attribute name.
pub fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

pub fn write_samples(samples: &[PointSample]) -> wofe3d::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| wofe3d::Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(["x", "y", "z", "attribute", "value", "unit"]).map_err(io)?;
    for s in samples {
        let (value, unit) = match &s.value {
            SampleValue::Category(c) => (c.clone(), "category".to_string()),
            SampleValue::Numeric { value, unit } => (value.to_string(), unit.as_str().to_string()),
        };
        w.write_record([s.x.to_string(), s.y.to_string(), s.z.to_string(), s.attribute.clone(), value, unit]).map_err(io)?;
    }
    w.into_inner().map_err(|e| wofe3d::Error::Io(std::io::Error::other(e.to_string())))
}

pub fn read_samples(bytes: &[u8], table: &str) -> wofe3d::Result<Vec<PointSample>> {
    let mut r = csv::Reader::from_reader(bytes);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| wofe3d::Error::Parse { table: table.into(), row: 0, reason: e.to_string() })?;
        let row = rec.position().map_or(0, |p| p.line());
        let bad = |reason: &str| wofe3d::Error::Parse { table: table.into(), row, reason: reason.into() };
        if rec.len() != 6 {
            return Err(bad("expected 6 columns"));
        }
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad("bad number"));
        let value = match &rec[5] {
            "category" => SampleValue::Category(rec[4].to_string()),
            u => SampleValue::Numeric { value: num(4)?, unit: Unit::parse(u).ok_or_else(|| bad("bad unit"))? },
        };
        out.push(PointSample { x: num(0)?, y: num(1)?, z: num(2)?, attribute: rec[3].to_string(), value });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stale_manifest_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path());
        let mut w = store.begin("ingest").unwrap();
        w.put("x.txt", "note", "x", "", b"hello").unwrap();
        w.finish().unwrap();
        assert_eq!(store.manifest("ingest").unwrap().files.len(), 1);
        let path = dir.path().join("ingest/manifest.toml");
        let text = std::fs::read_to_string(&path).unwrap().replace("schema_version = 1", "schema_version = 0");
        std::fs::write(&path, text).unwrap();
        match store.manifest("ingest") {
            Err(CliError::SchemaVersion { found: 0, expected: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(store.manifest("weights"), Err(CliError::MissingIntermediate { .. })));
    }

    #[test]
    fn samples_round_trip() {
        let s = vec![
            PointSample { x: 1.5, y: 2.0, z: -3.25, attribute: "lithology".into(), value: SampleValue::Category("andesite".into()) },
            PointSample { x: 0.1, y: 0.2, z: 0.3, attribute: "Cu".into(), value: SampleValue::Numeric { value: 0.4125, unit: Unit::Percent } },
        ];
        let bytes = write_samples(&s).unwrap();
        assert_eq!(read_samples(&bytes, "s").unwrap(), s);
    }
}
