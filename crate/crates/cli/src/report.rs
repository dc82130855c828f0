//! Plain-text run report assembled from the intermediates.

use std::fmt::Write;

use wofe3d::{export, GridSpec, VolumeMask};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult, WithPath};
use crate::pipeline::{read_thresholds, MODELS};
use crate::store::Store;

pub fn build(cfg: &PipelineConfig, store: &Store, grid: GridSpec, space: &VolumeMask, training: &VolumeMask) -> CliResult<String> {
    let mut r = String::new();
    let [nx, ny, nz] = grid.counts();
    let [dx, dy, dz] = grid.spacing();
    let [ox, oy, oz] = grid.origin();
    let collars = store.read_text("ingest", "collars.txt")?;
    let prior: f64 = {
        let text = store.read_text("integrate", "prior.txt")?;
        text.trim().parse().map_err(|_| CliError::config(store.dir("integrate").join("prior.txt"), "bad prior"))?
    };
    let _ = writeln!(r, "weights-of-evidence prospectivity run");
    let _ = writeln!(r);
    let _ = writeln!(r, "grid: {nx} x {ny} x {nz} voxels of {dx} x {dy} x {dz} m, origin ({ox}, {oy}, {oz})");
    let _ = writeln!(r, "boreholes: {}", collars.trim());
    let _ = writeln!(r, "modeling space: {} voxels", space.count());
    let _ = writeln!(
        r,
        "training: {} >= {} -> {} voxels, prior probability {:.6}",
        cfg.training.element,
        cfg.training.cutoff,
        training.count(),
        prior
    );

    let (path, bytes) = store.read_bytes("weights", "binary.csv")?;
    let binary = export::read_binary_weights(&bytes[..], &path.display().to_string()).at(&path)?;
    let _ = writeln!(r);
    let _ = writeln!(r, "binary evidence (W+, W-, contrast, studentized contrast):");
    for b in &binary {
        let w = &b.record;
        let _ = writeln!(
            r,
            "  {:<9} {:<32} {:>9.4} {:>9.4} {:>9.4} {:>10.4}{}",
            if b.included { "selected" } else { "excluded" },
            b.name,
            w.w_plus,
            w.w_minus,
            w.contrast,
            w.studentized_contrast,
            if b.corrected { "  (continuity corrected)" } else { "" }
        );
    }
    let wm = store.manifest("weights")?;
    for entry in wm.entries("classed") {
        let (path, bytes) = store.read_bytes("weights", &entry.path)?;
        let classes = export::read_class_weights(&bytes[..], &path.display().to_string()).at(&path)?;
        let kept = classes.iter().filter(|c| c.included).count();
        let _ = writeln!(r);
        let _ = writeln!(
            r,
            "{} ({}) classes, {kept} of {} selected (upper bound, contrast, fuzzy contrast, fuzzy weight):",
            entry.name,
            entry.unit,
            classes.len()
        );
        for c in &classes {
            let _ = writeln!(
                r,
                "  {:<9} {:>14.4} {:>9.4} {:>7.4} {:>9.4}",
                if c.included { "selected" } else { "excluded" },
                c.bounds.upper,
                c.record.contrast,
                c.fuzzy_contrast,
                c.fuzzy_weight
            );
        }
    }
    let warnings = store.read_text("weights", "warnings.txt")?;
    if !warnings.trim().is_empty() {
        let _ = writeln!(r);
        let _ = writeln!(r, "conditional independence warnings:");
        for line in warnings.lines() {
            let _ = writeln!(r, "  {line}");
        }
    }

    let _ = writeln!(r);
    let _ = writeln!(r, "C-V thresholds ({} segments):", cfg.threshold.segments);
    for (name, t) in read_thresholds(store)? {
        let list: Vec<String> = t.iter().map(|x| format!("{x:.6}")).collect();
        let _ = writeln!(r, "  {name:<12} {}", list.join(", "));
    }

    let _ = writeln!(r);
    let _ = writeln!(r, "P-V intersections ({} thresholds):", cfg.validate.thresholds);
    let text = store.read_text("validate", "intersections.csv")?;
    let path = store.dir("validate").join("intersections.csv");
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let num = |i: usize| f.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| CliError::config(&path, "bad row"));
        if !MODELS.contains(&f[0]) {
            return Err(CliError::config(&path, format!("unknown model `{}`", f[0])));
        }
        let _ = writeln!(
            r,
            "  {:<12} prediction rate {:.1}%, occupied volume {:.1}% at fuzzy threshold {:.4}",
            f[0],
            num(2)? * 100.0,
            num(3)? * 100.0,
            num(1)?
        );
    }
    Ok(r)
}
