//! Fault ribbons: surface traces extruded down-dip into quadrilateral
//! surfaces, voxelized, and buffered by exact Euclidean distance.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::borehole::CsvTable;
use crate::error::{Error, Result};
use crate::model_space::VolumeMask;

/// Surface trace of a fault with constant dip.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultTrace {
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
    /// Degrees from horizontal, in (0, 90].
    pub dip: f64,
    /// Compass azimuth of the dip direction in degrees, clockwise from north.
    pub dip_direction: f64,
    /// Vertical extent of the ribbon below the trace, in metres.
    pub depth: f64,
}

impl FaultTrace {
    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 2 {
            return Err(Error::DegenerateInput(format!("fault {} needs at least 2 trace vertices", self.id)));
        }
        if !(self.dip > 0.0 && self.dip <= 90.0) {
            return Err(Error::DegenerateInput(format!("fault {} has dip {} outside (0, 90]", self.id, self.dip)));
        }
        if !(0.0..360.0).contains(&self.dip_direction) {
            return Err(Error::DegenerateInput(format!(
                "fault {} has dip direction {} outside [0, 360)",
                self.id, self.dip_direction
            )));
        }
        if !(self.depth > 0.0 && self.depth.is_finite()) {
            return Err(Error::DegenerateInput(format!("fault {} has non-positive extrusion depth", self.id)));
        }
        Ok(())
    }

    /// Horizontal down-dip displacement of the ribbon's lower edge.
    pub fn down_dip_offset(&self) -> [f64; 2] {
        let horizontal = if self.dip == 90.0 { 0.0 } else { self.depth / self.dip.to_radians().tan() };
        let az = self.dip_direction.to_radians();
        [horizontal * az.sin(), horizontal * az.cos()]
    }
}

/// Reads traces from a `fault_id,vertex_order,x,y,dip,dip_direction` table.
/// Every trace gets the same extrusion `depth`.
pub fn parse_fault_traces(table: CsvTable<'_>, depth: f64) -> Result<Vec<FaultTrace>> {
    let err = |row: u64, reason: String| Error::Parse { table: table.name.to_string(), row, reason };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(table.text.as_bytes());
    let headers = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| err(1, format!("missing column `{name}`")));
    let (c_id, c_ord, c_x, c_y, c_dip, c_dir) =
        (col("fault_id")?, col("vertex_order")?, col("x")?, col("y")?, col("dip")?, col("dip_direction")?);

    struct Partial {
        vertices: Vec<(i64, [f64; 2])>,
        dip: f64,
        dip_direction: f64,
    }
    let mut faults: BTreeMap<String, Partial> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |c: usize| record.get(c).unwrap_or("");
        let num = |c: usize, name: &str| -> Result<f64> {
            get(c).parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| err(row, format!("`{name}` is not a number: {:?}", get(c))))
        };
        let id = get(c_id).to_string();
        if id.is_empty() {
            return Err(err(row, "`fault_id` is empty".into()));
        }
        let order: i64 = get(c_ord).parse().map_err(|_| err(row, format!("`vertex_order` is not an integer: {:?}", get(c_ord))))?;
        let (x, y, dip, dir) = (num(c_x, "x")?, num(c_y, "y")?, num(c_dip, "dip")?, num(c_dir, "dip_direction")?);
        let entry = faults.entry(id.clone()).or_insert(Partial { vertices: Vec::new(), dip, dip_direction: dir });
        if entry.dip != dip || entry.dip_direction != dir {
            return Err(err(row, format!("fault {id} changes dip or dip direction along its trace")));
        }
        if entry.vertices.iter().any(|(o, _)| *o == order) {
            return Err(err(row, format!("fault {id} repeats vertex_order {order}")));
        }
        entry.vertices.push((order, [x, y]));
    }
    faults
        .into_iter()
        .map(|(id, mut p)| {
            p.vertices.sort_by_key(|(o, _)| *o);
            let trace = FaultTrace {
                id,
                vertices: p.vertices.into_iter().map(|(_, v)| v).collect(),
                dip: p.dip,
                dip_direction: p.dip_direction,
                depth,
            };
            trace.validate()?;
            Ok(trace)
        })
        .collect()
}

/// Planar quadrilateral facets; facet `n` and `n + 1` share an edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RibbonMesh {
    /// Corners in order: upper start, upper end, lower end, lower start.
    pub quads: Vec<[[f64; 3]; 4]>,
}

impl RibbonMesh {
    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    pub fn merge(meshes: impl IntoIterator<Item = RibbonMesh>) -> RibbonMesh {
        RibbonMesh { quads: meshes.into_iter().flat_map(|m| m.quads).collect() }
    }
}

/// One quad per trace segment; the lower edge is the upper edge moved
/// `depth / tan(dip)` along the dip direction and `depth` down.
pub fn extrude_ribbon(trace: &FaultTrace, surface_z: &[f64]) -> Result<RibbonMesh> {
    trace.validate()?;
    if surface_z.len() != trace.vertices.len() {
        return Err(Error::Config(format!(
            "fault {} has {} vertices but {} surface elevations",
            trace.id,
            trace.vertices.len(),
            surface_z.len()
        )));
    }
    let [ox, oy] = trace.down_dip_offset();
    let upper: Vec<[f64; 3]> = trace.vertices.iter().zip(surface_z).map(|(v, &z)| [v[0], v[1], z]).collect();
    let lower: Vec<[f64; 3]> = upper.iter().map(|p| [p[0] + ox, p[1] + oy, p[2] - trace.depth]).collect();
    let quads = (0..upper.len() - 1).map(|s| [upper[s], upper[s + 1], lower[s + 1], lower[s]]).collect();
    Ok(RibbonMesh { quads })
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

/// Closest point on triangle `abc` to `p` (Voronoi-region walk).
fn closest_on_triangle(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let lerp = |o: [f64; 3], d: [f64; 3], t: f64| [o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]];
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return lerp(a, ab, d1 / (d1 - d3));
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return lerp(a, ac, d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return lerp(b, sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    [a[0] + ab[0] * v + ac[0] * w, a[1] + ab[1] * v + ac[1] * w, a[2] + ab[2] * v + ac[2] * w]
}

/// Distance from `p` to a planar quad, as two triangles.
pub fn point_quad_distance(p: [f64; 3], q: &[[f64; 3]; 4]) -> f64 {
    let t1 = dist2(p, closest_on_triangle(p, q[0], q[1], q[2]));
    let t2 = dist2(p, closest_on_triangle(p, q[0], q[2], q[3]));
    t1.min(t2).sqrt()
}

/// Voxels whose centroid is within half a voxel diagonal of the mesh,
/// restricted to `mask`.
pub fn voxelize_mesh(mesh: &RibbonMesh, mask: &VolumeMask) -> Result<VolumeMask> {
    if mesh.is_empty() {
        return Err(Error::DegenerateInput("cannot voxelize an empty mesh".into()));
    }
    let grid = *mask.grid();
    let reach = 0.5 * grid.voxel_diagonal();
    // bounding boxes prune the per-voxel facet tests
    let boxes: Vec<([f64; 3], [f64; 3])> = mesh
        .quads
        .iter()
        .map(|q| {
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for c in q {
                for a in 0..3 {
                    lo[a] = lo[a].min(c[a] - reach);
                    hi[a] = hi[a].max(c[a] + reach);
                }
            }
            (lo, hi)
        })
        .collect();
    let flags: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|v| {
            if !mask.get(v) {
                return false;
            }
            let p = grid.centroid(v);
            mesh.quads.iter().zip(&boxes).any(|(q, (lo, hi))| {
                (0..3).all(|a| p[a] >= lo[a] && p[a] <= hi[a]) && point_quad_distance(p, q) <= reach
            })
        })
        .collect();
    VolumeMask::from_flags(grid, flags)
}

/// Voxels of `space` whose centroid is within `radius` of the centroid of
/// some voxel of `src`.
pub fn buffer_mask(src: &VolumeMask, radius: f64, space: &VolumeMask) -> Result<VolumeMask> {
    if !(radius >= 0.0) {
        return Err(Error::Config(format!("buffer radius must be non-negative, got {radius}")));
    }
    let grid = *src.grid();
    if *space.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let [nx, ny, nz] = grid.counts();
    let [dx, dy, dz] = grid.spacing();
    let reach = |d: f64, n: usize| ((radius / d).floor() as usize).min(n) as i64;
    let (ri, rj, rk) = (reach(dx, nx), reach(dy, ny), reach(dz, nz));
    let r2 = radius * radius;
    let mut offsets = Vec::new();
    for k in -rk..=rk {
        for j in -rj..=rj {
            for i in -ri..=ri {
                let d2 = (i as f64 * dx).powi(2) + (j as f64 * dy).powi(2) + (k as f64 * dz).powi(2);
                if d2 <= r2 {
                    offsets.push([i, j, k]);
                }
            }
        }
    }
    let mut flags = vec![false; grid.len()];
    for v in src.iter_active() {
        let [i, j, k] = grid.ijk(v);
        for o in &offsets {
            let (a, b, c) = (i as i64 + o[0], j as i64 + o[1], k as i64 + o[2]);
            if a < 0 || b < 0 || c < 0 || a >= nx as i64 || b >= ny as i64 || c >= nz as i64 {
                continue;
            }
            flags[grid.index(a as usize, b as usize, c as usize)] = true;
        }
    }
    VolumeMask::from_flags(grid, flags)?.and(space)
}
