//! Synthetic deposit used by the tests: a vertical Cu pipe hosted by a
//! quartzolite stock with a silicified core, a high-Fe halo coinciding with
//! the ore, a Mo ring outside it, weakly informative Zn, and one fault far
//! from the mineralization.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wofe3d::{GridSpec, VolumeMask};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 7;

/// The ore body as planted, before any sampling or interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedPipe {
    pub center: [f64; 2],
    pub radius: f64,
    /// Lowest elevation of the pipe.
    pub bottom: f64,
    /// Barren cover between the surface and the top of the pipe.
    pub cover: f64,
}

pub const PIPE: PlantedPipe = PlantedPipe { center: [205.0, 195.0], radius: 36.0, bottom: 615.0, cover: 10.0 };

const ORIGIN: [f64; 3] = [0.0, 0.0, 600.0];
const COUNTS: [usize; 3] = [40, 40, 40];
const SPACING: f64 = 10.0;

pub fn grid() -> GridSpec {
    GridSpec::new(ORIGIN, COUNTS, [SPACING; 3]).expect("fixture grid is valid")
}

/// Ground elevation.
pub fn surface(x: f64, y: f64) -> f64 {
    985.0 + 6.0 * (x / 90.0).sin() + 5.0 * (y / 70.0).cos()
}

impl PlantedPipe {
    fn radial(&self, x: f64, y: f64) -> f64 {
        ((x - self.center[0]).powi(2) + (y - self.center[1]).powi(2)).sqrt()
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        self.radial(p[0], p[1]) <= self.radius && p[2] >= self.bottom && p[2] <= surface(p[0], p[1]) - self.cover
    }

    /// Voxels whose centroid lies in the pipe.
    pub fn mask(&self, grid: GridSpec) -> VolumeMask {
        VolumeMask::from_fn(grid, |v| self.contains(grid.centroid(v)))
    }
}

fn lithology(p: &PlantedPipe, x: f64, y: f64) -> &'static str {
    if p.radial(x, y) <= 1.1 * p.radius {
        "quartzolite"
    } else if x < 110.0 + 20.0 * (y / 60.0).sin() {
        "granodiorite"
    } else {
        "andesite"
    }
}

fn alteration(p: &PlantedPipe, x: f64, y: f64) -> &'static str {
    let r = p.radial(x, y);
    if r <= 0.9 * p.radius {
        "silicified"
    } else if r <= 1.8 * p.radius {
        "potassic"
    } else {
        "propylitic"
    }
}

struct Hole {
    id: String,
    x: f64,
    y: f64,
    z: f64,
    depth: f64,
}

fn round(v: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (v * f).round() / f
}

/// Writes the fixture tables and a config running the whole pipeline on
/// them into `dir`.
pub fn generate(dir: &Path, seed: u64) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = PIPE;

    let mut sites = Vec::new();
    for gi in 0..10 {
        for gj in 0..11 {
            let x = 20.0 + 40.0 * gi as f64 + rng.gen_range(-8.0..8.0);
            let y = 20.0 + 36.0 * gj as f64 + rng.gen_range(-8.0..8.0);
            sites.push([x, y]);
        }
    }
    // infill around the discovery
    for [dx, dy] in [[-15.0, 10.0], [15.0, 10.0], [0.0, -18.0]] {
        sites.push([p.center[0] + dx, p.center[1] + dy]);
    }
    let holes: Vec<Hole> = sites
        .iter()
        .enumerate()
        .map(|(n, &[x, y])| {
            let (x, y) = (round(x, 2), round(y, 2));
            let z = round(surface(x, y), 2);
            let depth = round(z - 605.0 - rng.gen_range(0.0..5.0), 1);
            Hole { id: format!("DH{:03}", n + 1), x, y, z, depth }
        })
        .collect();

    let mut collars = String::from("hole_id,x,y,z,total_depth\n");
    let mut lith = String::from("hole_id,from,to,attribute,code\n");
    let mut alt = String::from("hole_id,from,to,attribute,code\n");
    let mut assays = String::from("hole_id,from,to,element,value,unit\n");
    for h in &holes {
        collars.push_str(&format!("{},{},{},{},{}\n", h.id, h.x, h.y, h.z, h.depth));
        let mut from = 0.0;
        let mut lith_runs: Vec<(f64, f64, &str)> = Vec::new();
        let mut alt_runs: Vec<(f64, f64, &str)> = Vec::new();
        while from < h.depth {
            let to = (from + 10.0f64).min(h.depth);
            let z = h.z - 0.5 * (from + to);
            let r = p.radial(h.x, h.y);
            let ore = p.contains([h.x, h.y, z]);
            let cu = if ore {
                0.55 + 0.9 * (1.0 - r / p.radius) + rng.gen_range(-0.1..0.1)
            } else {
                (0.03 + 0.25 * (-(r - p.radius).max(0.0) / 25.0).exp() + rng.gen_range(-0.02..0.02)).max(0.005)
            };
            let fe = if ore {
                66000.0 + rng.gen_range(0.0..8000.0)
            } else if r <= 1.5 * p.radius {
                50000.0 + rng.gen_range(-4000.0..4000.0)
            } else {
                42000.0 + rng.gen_range(-9000.0..9000.0)
            };
            let mo = 4.0 + 50.0 * (-((r - 1.6 * p.radius) / 22.0).powi(2)).exp() + rng.gen_range(0.0..3.0);
            let zn = 90.0 + 30.0 * (-r / 200.0).exp() + rng.gen_range(-25.0..25.0);
            for (element, value, unit, places) in
                [("Cu", cu, "%", 3), ("Fe", fe, "ppm", 1), ("Mo", mo, "ppm", 2), ("Zn", zn, "ppm", 1)]
            {
                assays.push_str(&format!("{},{from},{to},{element},{},{unit}\n", h.id, round(value, places)));
            }
            for (runs, code) in [(&mut lith_runs, lithology(&p, h.x, h.y)), (&mut alt_runs, alteration(&p, h.x, h.y))] {
                match runs.last_mut() {
                    Some(last) if last.2 == code => last.1 = to,
                    _ => runs.push((from, to, code)),
                }
            }
            from = to;
        }
        for (out, runs, attribute) in [(&mut lith, &lith_runs, "lithology"), (&mut alt, &alt_runs, "alteration")] {
            for (a, b, code) in runs {
                out.push_str(&format!("{},{a},{b},{attribute},{code}\n", h.id));
            }
        }
    }

    let faults = "fault_id,vertex_order,x,y,dip,dip_direction\n\
                  F1,1,25,300,70,320\n\
                  F1,2,80,335,70,320\n\
                  F1,3,140,385,70,320\n";

    let g = grid();
    let [nx, ny, _] = g.counts();
    let mut map = String::from("i,j,code\n");
    for j in 0..ny {
        for i in 0..nx {
            let [x, y] = g.column_centroid(i + nx * j);
            map.push_str(&format!("{i},{j},{}\n", lithology(&p, x, y)));
        }
    }
    let sections = "section_id,x0,y0,x1,y1\nA,10,195,390,195\nB,205,10,205,390\n";

    let config = format!(
        "# Synthetic deposit; regenerate with `wofe3d fixture --out DIR --seed {seed}`.\n\
         [inputs]\n\
         collars = \"collars.csv\"\n\
         intervals = [\"lithology.csv\", \"alteration.csv\"]\n\
         assays = [\"assays.csv\"]\n\
         faults = \"faults.csv\"\n\
         map_raster = \"map.csv\"\n\
         sections = \"sections.csv\"\n\
         \n\
         [grid]\n\
         origin = [{:?}, {:?}, {:?}]\n\
         counts = [{}, {}, {}]\n\
         spacing = [{SPACING:?}, {SPACING:?}, {SPACING:?}]\n\
         \n\
         [training]\n\
         element = \"Cu\"\n\
         cutoff = 0.4\n\
         \n\
         [evidence]\n\
         elements = [\"Fe\", \"Mo\", \"Zn\"]\n\
         classes = 10\n\
         buffer_radii = [25.0, 50.0]\n\
         \n\
         [output]\n\
         dir = \"out\"\n",
        ORIGIN[0], ORIGIN[1], ORIGIN[2], COUNTS[0], COUNTS[1], COUNTS[2]
    );
    let planted = toml::to_string(&p).map_err(|e| CliError::config(dir, e.to_string()))?;

    for (name, text) in [
        ("collars.csv", collars.as_str()),
        ("lithology.csv", &lith),
        ("alteration.csv", &alt),
        ("assays.csv", &assays),
        ("faults.csv", faults),
        ("map.csv", &map),
        ("sections.csv", sections),
        ("planted.toml", &planted),
        ("config.toml", &config),
    ] {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

/// Reads the planted pipe written next to a fixture config.
pub fn read_planted(dir: &Path) -> CliResult<PlantedPipe> {
    let path = dir.join("planted.toml");
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    toml::from_str(&text).map_err(|e| CliError::config(&path, e.to_string()))
}
