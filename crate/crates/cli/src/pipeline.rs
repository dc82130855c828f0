//! The stages of a run. Each stage reads the intermediates of earlier stages
//! from the output tree and writes its own, so any stage can be rerun alone.

use std::fs;
use std::path::Path;

use log::info;
use wofe3d::borehole::{desurvey, parse_boreholes, samples_of, CsvTable};
use wofe3d::interpolate::{constrain_surface, idw_anisotropic, nearest_value};
use wofe3d::model_space::{build_model_space, convex_hull, surfaces_from_collars, SurfaceMethod};
use wofe3d::structures::{buffer_mask, extrude_ribbon, parse_fault_traces, voxelize_mesh};
use wofe3d::threshold::{classify, cv_curve, fit_segments};
use wofe3d::validate::{linear_fuzzify, pv_curves};
use wofe3d::wofe::{
    check_training, class_of, default_prior, independence_warnings, integrate, select_evidence, FuzzyLogistic,
};
use wofe3d::{
    chart, export, BinaryLayer, ClassedLayer, ContinuousModel, EvidenceLayer, GridSpec, IdwParams, MapRaster,
    NearestParams, RibbonMesh, VolumeMask,
};

use crate::config::{GridSection, PipelineConfig};
use crate::error::{CliError, CliResult, WithPath};
use crate::report;
use crate::store::{read_samples, slug, write_samples, Store};

pub const STAGES: [&str; 8] = ["ingest", "interp", "evidence", "weights", "integrate", "threshold", "validate", "export"];

/// The two probability models carried through thresholding and validation.
pub const MODELS: [&str; 2] = ["posterior", "studentized"];

pub const FAILED_MARKER: &str = "FAILED";

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Runs one named stage.
pub fn run_stage(cfg: &PipelineConfig, stage: &str) -> CliResult<()> {
    let store = Store::new(&cfg.output.dir);
    info!("stage {stage}");
    let (label, result): (&'static str, CliResult<()>) = match stage {
        "ingest" => ("ingest", ingest(cfg, &store)),
        "interp" => ("interp", interp(cfg, &store)),
        "evidence" => ("evidence", evidence(cfg, &store)),
        "weights" => ("weights", weights(cfg, &store)),
        "integrate" => ("integrate", integrate_stage(&store)),
        "threshold" => ("threshold", threshold(cfg, &store)),
        "validate" => ("validate", validate(cfg, &store)),
        "export" => ("export", export_stage(cfg, &store)),
        other => {
            return Err(CliError::config(
                &cfg.output.dir,
                format!("unknown stage `{other}`; expected one of {}", STAGES.join(", ")),
            ))
        }
    };
    result.map_err(|e| e.in_stage(label))
}

/// Every stage in order. On failure a `FAILED` marker naming the stage is
/// left in the output directory next to the partial outputs.
pub fn run_pipeline(cfg: &PipelineConfig) -> CliResult<String> {
    let root = &cfg.output.dir;
    fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
    let marker = root.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    }
    for stage in STAGES {
        if let Err(e) = run_stage(cfg, stage) {
            let text = format!("stage: {}\nerror: {e}\n", e.stage().unwrap_or(stage));
            fs::write(&marker, text).map_err(|err| CliError::io(&marker, err))?;
            return Err(e);
        }
    }
    let report = root.join("export").join("report.txt");
    read_input(&report)
}

fn ingest(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    let i = &cfg.inputs;
    let name = |p: &Path| p.display().to_string();
    let collar_text = read_input(&i.collars)?;
    let interval_texts: Vec<(String, String)> =
        i.intervals.iter().map(|p| Ok((name(p), read_input(p)?))).collect::<CliResult<_>>()?;
    let assay_texts: Vec<(String, String)> =
        i.assays.iter().map(|p| Ok((name(p), read_input(p)?))).collect::<CliResult<_>>()?;
    let collar_name = name(&i.collars);
    fn table(e: &(String, String)) -> CsvTable<'_> {
        CsvTable { name: e.0.as_str(), text: e.1.as_str() }
    }
    let set = parse_boreholes(
        CsvTable { name: &collar_name, text: &collar_text },
        &interval_texts.iter().map(table).collect::<Vec<_>>(),
        &assay_texts.iter().map(table).collect::<Vec<_>>(),
    )?;
    let samples = desurvey(&set, cfg.interpolation.composite_length)?;

    let (grid, space, surfaces) = (|| -> wofe3d::Result<_> {
        let grid = cfg.grid()?;
        let hull = convex_hull(&set.collars().iter().map(|c| [c.x, c.y]).collect::<Vec<_>>())?;
        let surfaces = surfaces_from_collars(set.collars(), &grid, SurfaceMethod::NearestCollar)?;
        let space = build_model_space(&grid, &hull, &surfaces)?;
        if space.is_empty() {
            return Err(wofe3d::Error::DegenerateInput("the modeling space has no voxels".into()));
        }
        Ok((grid, space, surfaces))
    })()
    .map_err(|e| CliError::from(e).in_stage("model space"))?;
    info!("modeling space: {} of {} voxels", space.count(), grid.len());

    let mut w = store.begin("ingest")?;
    let g = GridSection { origin: grid.origin(), counts: grid.counts(), spacing: grid.spacing() };
    let grid_text = toml::to_string(&g).map_err(|e| CliError::config(store.dir("ingest"), e.to_string()))?;
    w.put("grid.toml", "grid", "grid", "", grid_text.as_bytes())?;
    w.put_with("space.csv", "mask", "space", "", |b| export::write_mask_csv(b, &space))?;
    let sample_bytes = write_samples(&samples)?;
    w.put("samples.csv", "samples", "samples", "", &sample_bytes)?;
    w.put("collars.txt", "count", "collars", "", set.collars().len().to_string().as_bytes())?;

    if let Some(path) = &i.faults {
        let depth = cfg.evidence.fault_depth.unwrap_or(grid.counts()[2] as f64 * grid.spacing()[2]);
        let text = read_input(path)?;
        let traces = parse_fault_traces(CsvTable { name: &name(path), text: &text }, depth)?;
        let mut out = String::from("fault_id,quad,x0,y0,z0,x1,y1,z1,x2,y2,z2,x3,y3,z3\n");
        for t in &traces {
            let tops: Vec<f64> = t.vertices.iter().map(|&[x, y]| surface_at(&grid, &surfaces, x, y)).collect();
            let mesh = extrude_ribbon(t, &tops).at(path)?;
            for (q, quad) in mesh.quads.iter().enumerate() {
                let coords: Vec<String> = quad.iter().flatten().map(f64::to_string).collect();
                out.push_str(&format!("{},{q},{}\n", t.id, coords.join(",")));
            }
        }
        w.put("ribbons.csv", "ribbons", "faults", "", out.as_bytes())?;
    }
    w.finish()
}

/// Super-face elevation of the column holding `(x, y)`, clamped to the grid.
fn surface_at(grid: &GridSpec, surfaces: &wofe3d::SurfacePair, x: f64, y: f64) -> f64 {
    let [nx, ny, nz] = grid.counts();
    let [ox, oy, oz] = grid.origin();
    let [dx, dy, dz] = grid.spacing();
    let i = (((x - ox) / dx).floor().max(0.0) as usize).min(nx - 1);
    let j = (((y - oy) / dy).floor().max(0.0) as usize).min(ny - 1);
    surfaces.upper(i + nx * j).unwrap_or(oz + nz as f64 * dz)
}

fn read_ribbons(store: &Store) -> CliResult<RibbonMesh> {
    let (path, bytes) = store.read_bytes("ingest", "ribbons.csv")?;
    let mut quads = Vec::new();
    let mut r = csv::Reader::from_reader(&bytes[..]);
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::config(&path, e.to_string()))?;
        let mut q = [[0.0; 3]; 4];
        for c in 0..12 {
            q[c / 3][c % 3] = rec[c + 2].parse().map_err(|_| CliError::config(&path, "bad coordinate"))?;
        }
        quads.push(q);
    }
    Ok(RibbonMesh { quads })
}

fn read_map_raster(path: &Path, grid: &GridSpec) -> CliResult<MapRaster> {
    let text = read_input(path)?;
    let [nx, ny, _] = grid.counts();
    let mut codes = vec![None; nx * ny];
    let mut r = csv::Reader::from_reader(text.as_bytes());
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::config(path, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = || CliError::config(path, format!("row {line}: expected i,j,code inside the grid"));
        if rec.len() != 3 {
            return Err(bad());
        }
        let i: usize = rec[0].trim().parse().map_err(|_| bad())?;
        let j: usize = rec[1].trim().parse().map_err(|_| bad())?;
        if i >= nx || j >= ny {
            return Err(bad());
        }
        codes[i + nx * j] = Some(rec[2].trim().to_string());
    }
    MapRaster::new([nx, ny], codes).at(path)
}

fn categorical_attributes(cfg: &PipelineConfig, samples: &[wofe3d::PointSample]) -> Vec<String> {
    if let Some(list) = &cfg.evidence.categorical {
        return list.clone();
    }
    let mut names: Vec<String> =
        samples.iter().filter(|s| s.value.as_category().is_some()).map(|s| s.attribute.clone()).collect();
    names.sort();
    names.dedup();
    names
}

fn interp(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    store.manifest("ingest")?;
    let grid = store.grid()?;
    let space = store.read_mask("ingest", "space.csv", grid)?;
    let (path, bytes) = store.read_bytes("ingest", "samples.csv")?;
    let samples = read_samples(&bytes, &path.display().to_string()).at(&path)?;
    let raster = cfg.inputs.map_raster.as_ref().map(|p| read_map_raster(p, &grid)).transpose()?;

    let mut w = store.begin("interp")?;
    let ip = &cfg.interpolation;
    for attr in categorical_attributes(cfg, &samples) {
        let picked = samples_of(&samples, &attr);
        if picked.is_empty() {
            return Err(CliError::config(&cfg.inputs.collars, format!("no logged intervals of `{attr}`")));
        }
        let mut model = nearest_value(picked, &space, NearestParams { vertical_anisotropy: ip.vertical_anisotropy })?;
        if let (Some(r), true) = (&raster, attr == cfg.evidence.map_attribute) {
            model = constrain_surface(&model, r)?;
        }
        info!("{attr}: {} units", model.dictionary().len());
        w.put_with(&format!("cat_{}.csv", slug(&attr)), "categorical", &attr, "", |b| {
            export::write_categorical_csv(b, &model)
        })?;
    }
    let params = IdwParams { power: ip.power, sectors: ip.sectors, vertical_anisotropy: ip.vertical_anisotropy };
    let elements = std::iter::once(&cfg.training.element).chain(&cfg.evidence.elements);
    for element in elements {
        let picked = samples_of(&samples, element);
        if picked.is_empty() {
            return Err(CliError::config(&cfg.inputs.collars, format!("no assays of element `{element}`")));
        }
        let model = idw_anisotropic(picked, &space, params)?;
        let unit = model.unit().to_string();
        w.put_with(&format!("num_{}.csv", slug(element)), "continuous", element, &unit, |b| {
            export::write_voxel_csv(b, &model)
        })?;
    }
    w.finish()
}

fn read_element(store: &Store, grid: GridSpec, element: &str) -> CliResult<ContinuousModel> {
    let m = store.manifest("interp")?;
    let entry = m.entry("continuous", element).ok_or_else(|| CliError::MissingIntermediate {
        path: store.dir("interp").join(format!("num_{}.csv", slug(element))),
        stage: "interp".into(),
    })?;
    store.read_continuous("interp", &entry.path, grid, &entry.unit)
}

fn evidence(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    let grid = store.grid()?;
    let space = store.read_mask("ingest", "space.csv", grid)?;
    let interp = store.manifest("interp")?;

    let training = (|| -> CliResult<VolumeMask> {
        let cu = read_element(store, grid, &cfg.training.element)?;
        let training = cu.at_least(cfg.training.cutoff).and(&space)?;
        check_training(&training, &space)?;
        Ok(training)
    })()
    .map_err(|e| e.in_stage("binarize"))?;
    info!("training: {} voxels ({:.4} of the space)", training.count(), training.count() as f64 / space.count() as f64);

    let mut w = store.begin("evidence")?;
    w.put_with("training.csv", "training", &cfg.training.element, "", |b| export::write_mask_csv(b, &training))?;
    let mut n = 0;
    let mut put_layer = |w: &mut crate::store::StageWriter<'_>, name: String, mask: &VolumeMask| -> CliResult<()> {
        let file = format!("layer_{n:03}.csv");
        n += 1;
        w.put_with(&file, "layer", &name, "", |b| export::write_mask_csv(b, mask))
    };
    for entry in interp.entries("categorical") {
        let model = store.read_categorical("interp", &entry.path, grid)?;
        let mut codes: Vec<String> = model.dictionary().to_vec();
        codes.sort();
        for code in codes {
            let mask = model.unit_mask(&code).and(&space)?;
            if !mask.is_empty() {
                put_layer(&mut w, format!("{}:{code}", entry.name), &mask)?;
            }
        }
    }
    if store.manifest("ingest")?.entry("ribbons", "faults").is_some() {
        let mesh = read_ribbons(store)?;
        if !mesh.is_empty() {
            let surface = voxelize_mesh(&mesh, &space)?;
            for r in &cfg.evidence.buffer_radii {
                let buffer = buffer_mask(&surface, *r, &space)?;
                put_layer(&mut w, format!("fault buffer {r} m"), &buffer)?;
            }
        }
    }
    w.finish()
}

fn weights(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    let grid = store.grid()?;
    let space = store.read_mask("ingest", "space.csv", grid)?;
    let ev = store.manifest("evidence")?;
    let training = store.read_mask("evidence", "training.csv", grid)?;
    let mut layers = Vec::new();
    for entry in ev.entries("layer") {
        let mask = store.read_mask("evidence", &entry.path, grid)?;
        layers.push(EvidenceLayer::Binary(BinaryLayer::build(entry.name.clone(), &mask, &training, &space)?));
    }
    for element in &cfg.evidence.elements {
        let model = read_element(store, grid, element)?;
        let layer = ClassedLayer::build(element.clone(), &model, &training, &space, cfg.evidence.classes, &FuzzyLogistic::default())
            .map_err(|e| CliError::from(e).in_stage("weights"))?;
        layers.push(EvidenceLayer::Classed(layer));
    }
    let layers = select_evidence(layers).map_err(|e| CliError::from(e).in_stage("select"))?;
    let warnings = independence_warnings(&layers, cfg.evidence.overlap_warning);

    let mut w = store.begin("weights")?;
    let binaries: Vec<&BinaryLayer> = layers
        .iter()
        .filter_map(|l| match l {
            EvidenceLayer::Binary(b) => Some(b),
            EvidenceLayer::Classed(_) => None,
        })
        .collect();
    w.put_with("binary.csv", "binary", "binary", "", |b| export::write_binary_weights(b, &binaries))?;
    for l in &layers {
        if let EvidenceLayer::Classed(c) = l {
            w.put_with(&format!("class_{}.csv", slug(&c.name)), "classed", &c.name, &c.unit, |b| {
                export::write_class_weights(b, c)
            })?;
        }
    }
    let mut text = String::new();
    for line in &warnings {
        text.push_str(line);
        text.push('\n');
    }
    w.put("warnings.txt", "warnings", "overlap", "", text.as_bytes())?;
    w.finish()
}

/// Rebuilds the weighted layers from the weight tables and evidence masks.
pub fn load_layers(store: &Store, grid: GridSpec, space: &VolumeMask) -> CliResult<Vec<EvidenceLayer>> {
    let ev = store.manifest("evidence")?;
    let wm = store.manifest("weights")?;
    let (path, bytes) = store.read_bytes("weights", "binary.csv")?;
    let rows = export::read_binary_weights(&bytes[..], &path.display().to_string()).at(&path)?;
    let mut layers = Vec::new();
    for row in rows {
        let entry = ev.entry("layer", &row.name).ok_or_else(|| {
            CliError::config(&path, format!("layer `{}` has no evidence mask; rerun the evidence stage", row.name))
        })?;
        let mask = store.read_mask("evidence", &entry.path, grid)?;
        layers.push(EvidenceLayer::Binary(BinaryLayer {
            name: row.name,
            mask,
            counts: row.counts,
            record: row.record,
            corrected: row.corrected,
            included: row.included,
        }));
    }
    for entry in wm.entries("classed") {
        let (path, bytes) = store.read_bytes("weights", &entry.path)?;
        let classes = export::read_class_weights(&bytes[..], &path.display().to_string()).at(&path)?;
        let model = read_element(store, grid, &entry.name)?;
        let bounds: Vec<_> = classes.iter().map(|c| c.bounds).collect();
        let class_of = (0..grid.len())
            .map(|v| if space.get(v) { model.value(v).map(|x| class_of(&bounds, x) as u16) } else { None })
            .collect();
        layers.push(EvidenceLayer::Classed(ClassedLayer {
            name: entry.name.clone(),
            unit: entry.unit.clone(),
            class_of,
            classes,
        }));
    }
    Ok(layers)
}

fn integrate_stage(store: &Store) -> CliResult<()> {
    let grid = store.grid()?;
    let space = store.read_mask("ingest", "space.csv", grid)?;
    let training = store.read_mask("evidence", "training.csv", grid)?;
    let layers = load_layers(store, grid, &space)?;
    let prior = default_prior(&training, &space)?;
    let model = integrate(prior, &layers, &space)?;
    info!("prior {prior:.5}; {} voxels without a studentized value", model.undefined_studentized());
    let variance = ContinuousModel::from_fn(space.clone(), "variance", |v| model.variance(v))?;

    let mut w = store.begin("integrate")?;
    w.put_with("posterior.csv", "model", "posterior", "probability", |b| {
        export::write_voxel_csv(b, &model.posterior_model())
    })?;
    w.put_with("studentized.csv", "model", "studentized", "studentized", |b| {
        export::write_voxel_csv(b, &model.studentized_model())
    })?;
    w.put_with("variance.csv", "model", "variance", "variance", |b| export::write_voxel_csv(b, &variance))?;
    w.put("prior.txt", "prior", "prior", "", prior.to_string().as_bytes())?;
    w.finish()
}

/// C-V thresholds per model, in `MODELS` order.
pub fn read_thresholds(store: &Store) -> CliResult<Vec<(String, Vec<f64>)>> {
    store.manifest("threshold")?;
    let (path, bytes) = store.read_bytes("threshold", "thresholds.csv")?;
    let mut out: Vec<(String, Vec<f64>)> = MODELS.iter().map(|m| (m.to_string(), Vec::new())).collect();
    let mut r = csv::Reader::from_reader(&bytes[..]);
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::config(&path, e.to_string()))?;
        let t: f64 = rec[2].parse().map_err(|_| CliError::config(&path, "bad threshold"))?;
        match out.iter_mut().find(|(m, _)| *m == rec[0]) {
            Some((_, list)) => list.push(t),
            None => return Err(CliError::config(&path, format!("unknown model `{}`", &rec[0]))),
        }
    }
    Ok(out)
}

pub fn read_model(store: &Store, grid: GridSpec, name: &str) -> CliResult<ContinuousModel> {
    let m = store.manifest("integrate")?;
    let entry = m.entry("model", name).ok_or_else(|| CliError::MissingIntermediate {
        path: store.dir("integrate").join(format!("{name}.csv")),
        stage: "integrate".into(),
    })?;
    store.read_continuous("integrate", &entry.path, grid, &entry.unit)
}

fn threshold(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    let grid = store.grid()?;
    let mut w = store.begin("threshold")?;
    let mut table = String::from("model,index,threshold\n");
    let mut fits = String::from("model,segment,first_value,last_value,slope,intercept,residual\n");
    for name in MODELS {
        let model = read_model(store, grid, name)?;
        let curve = cv_curve(&model, model.mask())?;
        let fit = fit_segments(&curve, cfg.threshold.segments)?;
        let classes = classify(&model, &fit.breakpoints)?;
        for (i, t) in fit.breakpoints.iter().enumerate() {
            table.push_str(&format!("{name},{i},{t}\n"));
        }
        for (i, s) in fit.segments.iter().enumerate() {
            let (a, b) = (curve.values()[s.first], curve.values()[s.last]);
            fits.push_str(&format!("{name},{i},{a},{b},{},{},{}\n", s.slope, s.intercept, s.residual));
        }
        w.put_with(&format!("{name}_cv.csv"), "curve", name, "", |b| export::write_cv_csv(b, &curve, &fit))?;
        w.put_with(&format!("{name}_classes.csv"), "classes", name, "", |b| export::write_categorical_csv(b, &classes))?;
    }
    w.put("thresholds.csv", "thresholds", "thresholds", "", table.as_bytes())?;
    w.put("segments.csv", "segments", "segments", "", fits.as_bytes())?;
    w.finish()
}

fn validate(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    let grid = store.grid()?;
    let space = store.read_mask("ingest", "space.csv", grid)?;
    let training = store.read_mask("evidence", "training.csv", grid)?;
    let mut w = store.begin("validate")?;
    let mut table = String::from("model,threshold,prediction_rate,occupied_volume\n");
    for name in MODELS {
        let model = read_model(store, grid, name)?;
        let pv = pv_curves(&linear_fuzzify(&model)?, &training, &space, cfg.validate.thresholds)?;
        let x = pv.intersection;
        table.push_str(&format!("{name},{},{},{}\n", x.threshold, x.prediction, x.volume));
        w.put_with(&format!("{name}_pv.csv"), "curve", name, "", |b| export::write_pv_csv(b, &pv))?;
    }
    w.put("intersections.csv", "intersections", "intersections", "", table.as_bytes())?;
    w.finish()
}

fn export_stage(cfg: &PipelineConfig, store: &Store) -> CliResult<()> {
    let grid = store.grid()?;
    let space = store.read_mask("ingest", "space.csv", grid)?;
    let training = store.read_mask("evidence", "training.csv", grid)?;
    let posterior = read_model(store, grid, "posterior")?;
    let studentized = read_model(store, grid, "studentized")?;
    let variance = read_model(store, grid, "variance")?;
    let element = read_element(store, grid, &cfg.training.element)?;
    let indicator = ContinuousModel::from_fn(space.clone(), "indicator", |v| f64::from(u8::from(training.get(v))))?;
    let thresholds = read_thresholds(store)?;
    let mut classes = Vec::new();
    for (name, model) in MODELS.iter().zip([&posterior, &studentized]) {
        let t = thresholds.iter().find(|(m, _)| m == name).map(|(_, t)| t.as_slice()).unwrap_or_default();
        let class = |v: usize| model.value(v).map_or(f64::NAN, |x| t.partition_point(|&b| b <= x) as f64);
        classes.push(ContinuousModel::from_fn(model.mask().clone(), "class", class)?);
    }

    let mut w = store.begin("export")?;
    let training_field = format!("{}_{}", cfg.training.element, element.unit());
    let fields: Vec<(&str, &ContinuousModel)> = vec![
        ("posterior", &posterior),
        ("studentized", &studentized),
        ("variance", &variance),
        ("posterior_class", &classes[0]),
        ("studentized_class", &classes[1]),
        (&training_field, &element),
        ("training", &indicator),
    ];
    w.put_with("model.vtk", "vtk", "model", "", |b| export::write_vtk(b, "weights of evidence prospectivity", &fields))?;

    for (name, model) in MODELS.iter().zip([&posterior, &studentized]) {
        let curve = cv_curve(model, model.mask())?;
        let fit = fit_segments(&curve, cfg.threshold.segments)?;
        w.put(&format!("{name}_cv.svg"), "chart", name, "", chart::cv_chart(&format!("C-V: {name}"), &curve, &fit).as_bytes())?;
        let pv = pv_curves(&linear_fuzzify(model)?, &training, &space, cfg.validate.thresholds)?;
        w.put(&format!("{name}_pv.svg"), "chart", name, "", chart::pv_chart(&format!("P-V: {name}"), &pv).as_bytes())?;
    }

    if let Some(path) = &cfg.inputs.sections {
        for (id, text) in section_profiles(path, &grid, &space, &posterior, &studentized)? {
            w.put(&format!("section_{}.csv", slug(&id)), "section", &id, "", text.as_bytes())?;
        }
    }
    let text = report::build(cfg, store, grid, &space, &training)?;
    w.put("report.txt", "report", "report", "", text.as_bytes())?;
    w.finish()
}

/// Voxels whose column centre lies within half a voxel of each section
/// trace, with both probability models.
fn section_profiles(
    path: &Path,
    grid: &GridSpec,
    space: &VolumeMask,
    posterior: &ContinuousModel,
    studentized: &ContinuousModel,
) -> CliResult<Vec<(String, String)>> {
    let text = read_input(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    let half = 0.5 * grid.spacing()[0].min(grid.spacing()[1]);
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::config(path, e.to_string()))?;
        let bad = || CliError::config(path, "expected section_id,x0,y0,x1,y1");
        if rec.len() != 5 {
            return Err(bad());
        }
        let n: Vec<f64> = (1..5).map(|i| rec[i].trim().parse().map_err(|_| bad())).collect::<CliResult<_>>()?;
        let (a, b) = ([n[0], n[1]], [n[2], n[3]]);
        let mut csv = String::from("i,j,k,x,y,z,distance_along,posterior,studentized\n");
        for v in space.iter_active() {
            let [x, y, z] = grid.centroid(v);
            let (along, off) = project(a, b, [x, y]);
            if off <= half {
                let [i, j, k] = grid.ijk(v);
                let fmt = |m: &ContinuousModel| m.value(v).map_or(String::new(), |x| x.to_string());
                csv.push_str(&format!("{i},{j},{k},{x},{y},{z},{along},{},{}\n", fmt(posterior), fmt(studentized)));
            }
        }
        out.push((rec[0].trim().to_string(), csv));
    }
    Ok(out)
}

/// Distance along segment `a-b` of the closest point to `p`, and the
/// distance from `p` to that point.
fn project(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> (f64, f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let c = [a[0] + t * d[0], a[1] + t * d[1]];
    (t * len2.sqrt(), ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt())
}
