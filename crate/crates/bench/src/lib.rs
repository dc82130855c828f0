//! Synthetic inputs sized like a small deposit model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wofe3d::threshold::cv_curve;
use wofe3d::wofe::{BinaryLayer, EvidenceLayer};
use wofe3d::{CVCurve, ContinuousModel, GridSpec, PointSample, SampleValue, Unit, VolumeMask};

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new([0.0; 3], [n; 3], [10.0; 3]).expect("valid grid")
}

/// Vertical holes on a jittered lattice, one sample every 10 m.
pub fn borehole_samples(grid: &GridSpec, holes_per_side: usize, seed: u64) -> Vec<PointSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [nx, _, nz] = grid.counts();
    let side = nx as f64 * 10.0;
    let step = side / holes_per_side as f64;
    let mut out = Vec::new();
    for a in 0..holes_per_side {
        for b in 0..holes_per_side {
            let x = (a as f64 + 0.5) * step + rng.gen_range(-0.3..0.3) * step;
            let y = (b as f64 + 0.5) * step + rng.gen_range(-0.3..0.3) * step;
            for k in 0..nz {
                let z = 5.0 + 10.0 * k as f64;
                let value = rng.gen_range(0.0..1.0) + (-(x - side / 2.0).abs() / side).exp();
                out.push(PointSample {
                    x,
                    y,
                    z,
                    attribute: "Cu".into(),
                    value: SampleValue::Numeric { value, unit: Unit::Percent },
                });
            }
        }
    }
    out
}

/// A sphere of voxels near the grid center.
pub fn ball(grid: GridSpec, radius: f64) -> VolumeMask {
    let [nx, ny, nz] = grid.counts();
    let c = grid.centroid_ijk(nx / 2, ny / 2, nz / 2);
    VolumeMask::from_fn(grid, |v| {
        let p = grid.centroid(v);
        (0..3).map(|a| (p[a] - c[a]).powi(2)).sum::<f64>().sqrt() <= radius
    })
}

/// Training mask plus `count` random binary layers.
pub fn binary_layers(grid: GridSpec, count: usize, seed: u64) -> (VolumeMask, VolumeMask, Vec<EvidenceLayer>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = VolumeMask::full(grid);
    let training = VolumeMask::from_fn(grid, |_| rng.gen_bool(0.04));
    let layers = (0..count)
        .map(|i| {
            let p = rng.gen_range(0.05..0.5);
            let e = VolumeMask::from_fn(grid, |_| rng.gen_bool(p));
            EvidenceLayer::Binary(BinaryLayer::build(format!("layer {i}"), &e, &training, &space).expect("layer"))
        })
        .collect();
    (space, training, layers)
}

/// C-V curve of a lognormal-looking grade model.
pub fn grade_curve(grid: GridSpec, seed: u64) -> CVCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = VolumeMask::full(grid);
    let model = ContinuousModel::from_fn(space.clone(), "%", |_| {
        let u: f64 = rng.gen_range(1e-6..1.0);
        (-u.ln()).powf(2.0)
    })
    .expect("finite model");
    cv_curve(&model, &space).expect("curve")
}
