//! Voxel lattice geometry and the active modeling volume.
//!
//! Voxels are addressed by a flat index with `i` (east) varying fastest, then
//! `j` (north), then `k` (up). This is also the point ordering of legacy VTK
//! structured points, so exports need no reordering.

use std::cmp::Ordering;

use crate::borehole::Collar;
use crate::error::{Error, Result};

/// Regular voxel lattice. `origin` is the outer corner of voxel `(0, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    origin: [f64; 3],
    counts: [usize; 3],
    spacing: [f64; 3],
}

impl GridSpec {
    pub fn new(origin: [f64; 3], counts: [usize; 3], spacing: [f64; 3]) -> Result<Self> {
        if counts.contains(&0) {
            return Err(Error::Config(format!("grid counts must be positive, got {counts:?}")));
        }
        if spacing.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing:?}")));
        }
        if origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Self { origin, counts, spacing })
    }

    /// Grid with the default 10 m cubic voxels.
    pub fn with_default_spacing(origin: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        Self::new(origin, counts, [10.0; 3])
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    /// Total number of voxels.
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of vertical columns (`nx * ny`).
    pub fn columns(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.counts[0] && j < self.counts[1] && k < self.counts[2]);
        i + self.counts[0] * (j + self.counts[1] * k)
    }

    pub fn ijk(&self, index: usize) -> [usize; 3] {
        let nx = self.counts[0];
        let ny = self.counts[1];
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    /// Column index (`i + nx * j`) of a voxel.
    pub fn column_of(&self, index: usize) -> usize {
        index % self.columns()
    }

    pub fn centroid(&self, index: usize) -> [f64; 3] {
        let [i, j, k] = self.ijk(index);
        self.centroid_ijk(i, j, k)
    }

    pub fn centroid_ijk(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.spacing[0],
            self.origin[1] + (j as f64 + 0.5) * self.spacing[1],
            self.origin[2] + (k as f64 + 0.5) * self.spacing[2],
        ]
    }

    /// Map-view centre of a column.
    pub fn column_centroid(&self, column: usize) -> [f64; 2] {
        let i = column % self.counts[0];
        let j = column / self.counts[0];
        [
            self.origin[0] + (i as f64 + 0.5) * self.spacing[0],
            self.origin[1] + (j as f64 + 0.5) * self.spacing[1],
        ]
    }

    /// Voxel containing `p`, if any. Points on an interior face belong to the
    /// voxel above them along that axis.
    pub fn locate(&self, p: [f64; 3]) -> Option<usize> {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let t = ((p[a] - self.origin[a]) / self.spacing[a]).floor();
            if !(t >= 0.0 && t < self.counts[a] as f64) {
                return None;
            }
            ijk[a] = t as usize;
        }
        Some(self.index(ijk[0], ijk[1], ijk[2]))
    }

    /// Length of one voxel's space diagonal.
    pub fn voxel_diagonal(&self) -> f64 {
        self.spacing.iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    /// Length of the whole lattice's space diagonal.
    pub fn extent_diagonal(&self) -> f64 {
        (0..3)
            .map(|a| {
                let e = self.counts[a] as f64 * self.spacing[a];
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing.iter().product()
    }
}

/// Simple polygon in map coordinates, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<[f64; 2]>,
}

const BOUNDARY_TOLERANCE: f64 = 1e-7;

impl Polygon2D {
    /// Builds a polygon from an ordered ring. Clockwise input is reversed.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::DegenerateInput("a polygon needs at least 3 vertices".into()));
        }
        let area = signed_area(&vertices);
        if !(area.abs() > 0.0) {
            return Err(Error::DegenerateInput("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for a in 0..n {
            for b in a + 1..n {
                // adjacent edges share a vertex and are allowed to touch
                if b == a + 1 || (a == 0 && b == n - 1) {
                    continue;
                }
                if segments_intersect(
                    vertices[a],
                    vertices[(a + 1) % n],
                    vertices[b],
                    vertices[(b + 1) % n],
                ) {
                    return Err(Error::DegenerateInput("polygon is self-intersecting".into()));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|a| {
            cross(self.vertices[a], self.vertices[(a + 1) % n], self.vertices[(a + 2) % n]) >= 0.0
        })
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |a| (self.vertices[a], self.vertices[(a + 1) % n]))
    }

    /// Point-in-polygon test; points on the boundary count as inside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        if self.edges().any(|(a, b)| point_segment_distance(p, a, b) <= BOUNDARY_TOLERANCE) {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|a| {
            let p = v[a];
            let q = v[(a + 1) % n];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

/// z-component of (b - a) x (c - a).
fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], p: [f64; 2], d: f64| {
        d == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Convex hull by Andrew's monotone chain. Collinear boundary points are
/// dropped, so the result holds only true corners in counter-clockwise order.
pub fn convex_hull(points: &[[f64; 2]]) -> Result<Polygon2D> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "convex hull needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::DegenerateInput("non-finite hull point".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();

    let mut lower: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateInput("all hull points are collinear".into()));
    }
    Polygon2D::new(lower)
}

/// Upper and lower bounding surfaces, one optional elevation per grid column.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePair {
    columns: [usize; 2],
    upper: Vec<Option<f64>>,
    lower: Vec<Option<f64>>,
}

impl SurfacePair {
    pub fn new(columns: [usize; 2], upper: Vec<Option<f64>>, lower: Vec<Option<f64>>) -> Result<Self> {
        let n = columns[0] * columns[1];
        if upper.len() != n || lower.len() != n {
            return Err(Error::Config(format!(
                "surfaces must have {n} columns, got {} and {}",
                upper.len(),
                lower.len()
            )));
        }
        for (c, (u, l)) in upper.iter().zip(&lower).enumerate() {
            if let (Some(u), Some(l)) = (u, l) {
                if u < l {
                    return Err(Error::Config(format!(
                        "super-face below sub-face at column {c} ({u} < {l})"
                    )));
                }
            }
        }
        Ok(Self { columns, upper, lower })
    }

    /// Same elevations over every column of `grid`.
    pub fn flat(grid: &GridSpec, upper: f64, lower: f64) -> Result<Self> {
        let [nx, ny, _] = grid.counts();
        Self::new([nx, ny], vec![Some(upper); nx * ny], vec![Some(lower); nx * ny])
    }

    pub fn columns(&self) -> [usize; 2] {
        self.columns
    }

    pub fn upper(&self, column: usize) -> Option<f64> {
        self.upper[column]
    }

    pub fn lower(&self, column: usize) -> Option<f64> {
        self.lower[column]
    }

    /// Lowest sub-face elevation over all defined columns.
    pub fn min_lower(&self) -> Option<f64> {
        self.lower.iter().flatten().copied().reduce(f64::min)
    }
}

/// How collar elevations are spread over grid columns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SurfaceMethod {
    #[default]
    NearestCollar,
    InverseDistance {
        power: f64,
    },
}

/// Super-face from collar elevations, sub-face from collar elevation minus
/// hole depth, evaluated at every column centre of `grid`.
pub fn surfaces_from_collars(
    collars: &[Collar],
    grid: &GridSpec,
    method: SurfaceMethod,
) -> Result<SurfacePair> {
    if collars.is_empty() {
        return Err(Error::InsufficientData("no collars to build surfaces from".into()));
    }
    let mut sorted: Vec<&Collar> = collars.iter().collect();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.hole_id.cmp(&b.hole_id)));

    let [nx, ny, _] = grid.counts();
    let mut upper = Vec::with_capacity(nx * ny);
    let mut lower = Vec::with_capacity(nx * ny);
    for column in 0..grid.columns() {
        let [cx, cy] = grid.column_centroid(column);
        let d2 = |c: &Collar| (c.x - cx).powi(2) + (c.y - cy).powi(2);
        match method {
            SurfaceMethod::NearestCollar => {
                let mut best = sorted[0];
                let mut best_d = d2(best);
                for &c in &sorted[1..] {
                    let d = d2(c);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                upper.push(Some(best.z));
                lower.push(Some(best.z - best.total_depth));
            }
            SurfaceMethod::InverseDistance { power } => {
                if let Some(c) = sorted.iter().find(|c| d2(c) == 0.0) {
                    upper.push(Some(c.z));
                    lower.push(Some(c.z - c.total_depth));
                    continue;
                }
                let (mut wsum, mut up, mut lo) = (0.0, 0.0, 0.0);
                for c in &sorted {
                    let w = d2(c).powf(-power / 2.0);
                    wsum += w;
                    up += w * c.z;
                    lo += w * (c.z - c.total_depth);
                }
                upper.push(Some(up / wsum));
                lower.push(Some(lo / wsum));
            }
        }
    }
    SurfacePair::new([nx, ny], upper, lower)
}

/// One flag per voxel of a grid, with a cached active count.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeMask {
    grid: GridSpec,
    flags: Vec<bool>,
    active: usize,
}

impl VolumeMask {
    pub fn empty(grid: GridSpec) -> Self {
        Self { flags: vec![false; grid.len()], grid, active: 0 }
    }

    pub fn full(grid: GridSpec) -> Self {
        Self { flags: vec![true; grid.len()], active: grid.len(), grid }
    }

    pub fn from_flags(grid: GridSpec, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let active = flags.iter().filter(|&&f| f).count();
        Ok(Self { grid, flags, active })
    }

    pub fn from_fn(grid: GridSpec, f: impl FnMut(usize) -> bool) -> Self {
        let flags: Vec<bool> = (0..grid.len()).map(f).collect();
        let active = flags.iter().filter(|&&f| f).count();
        Self { grid, flags, active }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn get(&self, index: usize) -> bool {
        self.flags[index]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count(&self) -> usize {
        self.active
    }

    pub fn is_empty(&self) -> bool {
        self.active == 0
    }

    pub fn fraction(&self) -> f64 {
        self.active as f64 / self.grid.len() as f64
    }

    pub fn iter_active(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.check_same(other)?;
        let flags = self.flags.iter().zip(&other.flags).map(|(&a, &b)| op(a, b)).collect();
        Self::from_flags(self.grid, flags)
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn and_not(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn not(&self) -> Self {
        Self {
            grid: self.grid,
            flags: self.flags.iter().map(|f| !f).collect(),
            active: self.grid.len() - self.active,
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.flags.iter().zip(&other.flags).all(|(&a, &b)| !a || b))
    }
}

/// Active iff the voxel centroid lies inside `hull` (map view, boundary
/// inclusive) and between the sub- and super-face of its column.
pub fn build_model_space(grid: &GridSpec, hull: &Polygon2D, surfaces: &SurfacePair) -> Result<VolumeMask> {
    let [nx, ny, nz] = grid.counts();
    if surfaces.columns() != [nx, ny] {
        return Err(Error::Config(format!(
            "surfaces cover {:?} columns but the grid has {:?}",
            surfaces.columns(),
            [nx, ny]
        )));
    }
    let mut flags = vec![false; grid.len()];
    for column in 0..grid.columns() {
        if !hull.contains(grid.column_centroid(column)) {
            continue;
        }
        let (Some(top), Some(bottom)) = (surfaces.upper(column), surfaces.lower(column)) else {
            return Err(Error::Config(format!(
                "bounding surfaces undefined at in-hull column {column} (i={}, j={})",
                column % nx,
                column / nx
            )));
        };
        for k in 0..nz {
            let z = grid.centroid_ijk(0, 0, k)[2];
            if z.partial_cmp(&bottom) != Some(Ordering::Less) && z <= top {
                flags[column + nx * ny * k] = true;
            }
        }
    }
    VolumeMask::from_flags(*grid, flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid10() -> GridSpec {
        GridSpec::with_default_spacing([0.0, 0.0, 0.0], [10, 10, 10]).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new([-3.5, 100.0, 7.25], [7, 5, 3], [2.0, 3.0, 0.5]).unwrap();
        for idx in 0..g.len() {
            let [i, j, k] = g.ijk(idx);
            assert_eq!(g.index(i, j, k), idx);
            assert_eq!(g.locate(g.centroid(idx)), Some(idx));
        }
        assert_eq!(g.locate([-4.0, 101.0, 7.3]), None);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(GridSpec::new([0.0; 3], [0, 1, 1], [1.0; 3]).is_err());
        assert!(GridSpec::new([0.0; 3], [1, 1, 1], [1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn hull_of_square_is_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let h = convex_hull(&sq).unwrap();
        assert_eq!(h.vertices(), &sq);
        let mut with_center = sq.to_vec();
        with_center.push([0.5, 0.5]);
        with_center.push([0.5, 0.0]);
        let h = convex_hull(&with_center).unwrap();
        assert_eq!(h.vertices(), &sq);
    }

    #[test]
    fn hull_degenerate_inputs() {
        assert!(matches!(convex_hull(&[[0.0, 0.0], [1.0, 1.0]]), Err(Error::DegenerateInput(_))));
        assert!(matches!(
            convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn hull_matches_brute_force_edge_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pts: Vec<[f64; 2]> = (0..100).map(|_| [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)]).collect();
            let hull = convex_hull(&pts).unwrap();
            assert!(hull.is_convex());
            // brute force: a directed pair (a, b) is a hull edge iff every
            // other point lies strictly left of it
            let mut brute = 0;
            for a in 0..pts.len() {
                for b in 0..pts.len() {
                    if a != b && (0..pts.len()).filter(|&c| c != a && c != b).all(|c| cross(pts[a], pts[b], pts[c]) > 0.0) {
                        brute += 1;
                    }
                }
            }
            assert_eq!(hull.vertices().len(), brute);
            let v = hull.vertices();
            for e in 0..v.len() {
                let (a, b) = (v[e], v[(e + 1) % v.len()]);
                assert!(pts.iter().all(|&p| cross(a, b, p) >= 0.0));
            }
        }
    }

    #[test]
    fn polygon_rejects_self_intersection() {
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Polygon2D::new(bowtie).is_err());
    }

    #[test]
    fn polygon_boundary_is_inside() {
        let p = Polygon2D::new(vec![[0.0, 0.0], [0.0, 2.0], [2.0, 2.0], [2.0, 0.0]]).unwrap();
        assert!(p.area() > 0.0);
        assert!(p.contains([0.0, 1.0]));
        assert!(p.contains([2.0, 2.0]));
        assert!(p.contains([1.0, 1.0]));
        assert!(!p.contains([2.1, 1.0]));
    }

    #[test]
    fn unconstrained_space_is_full() {
        let g = grid10();
        let hull = Polygon2D::new(vec![[0.0, 0.0], [100.0, 0.0], [100.0, 100.0], [0.0, 100.0]]).unwrap();
        let s = SurfacePair::flat(&g, 1e9, -1e9).unwrap();
        let m = build_model_space(&g, &hull, &s).unwrap();
        assert_eq!(m.count(), g.len());
    }

    #[test]
    fn half_hull_half_volume() {
        let g = grid10();
        let hull = Polygon2D::new(vec![[0.0, 0.0], [50.0, 0.0], [50.0, 100.0], [0.0, 100.0]]).unwrap();
        let s = SurfacePair::flat(&g, 100.0, 0.0).unwrap();
        let m = build_model_space(&g, &hull, &s).unwrap();
        assert_eq!(m.count(), g.len() / 2);
        assert_eq!(m.fraction() * g.len() as f64, m.count() as f64);
    }

    #[test]
    fn triangular_hull_sloping_surfaces_match_brute_force() {
        let g = grid10();
        let tri = [[3.0, 4.0], [97.0, 12.0], [40.0, 91.0]];
        let hull = Polygon2D::new(tri.to_vec()).unwrap();
        let [nx, ny, _] = g.counts();
        let mut up = Vec::new();
        let mut lo = Vec::new();
        for c in 0..g.columns() {
            let [x, y] = g.column_centroid(c);
            up.push(Some(60.0 + 0.3 * x - 0.1 * y));
            lo.push(Some(10.0 + 0.2 * y));
        }
        let s = SurfacePair::new([nx, ny], up.clone(), lo.clone()).unwrap();
        let m = build_model_space(&g, &hull, &s).unwrap();
        for idx in 0..g.len() {
            let [x, y, z] = g.centroid(idx);
            // barycentric sign test, independent of the crossing-number route
            let inside = {
                let d1 = cross(tri[0], tri[1], [x, y]);
                let d2 = cross(tri[1], tri[2], [x, y]);
                let d3 = cross(tri[2], tri[0], [x, y]);
                d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
            };
            let c = g.column_of(idx);
            let expect = inside && z >= lo[c].unwrap() && z <= up[c].unwrap();
            assert_eq!(m.get(idx), expect, "voxel {idx}");
        }
    }

    #[test]
    fn undefined_surface_in_hull_is_an_error() {
        let g = grid10();
        let hull = Polygon2D::new(vec![[0.0, 0.0], [100.0, 0.0], [100.0, 100.0], [0.0, 100.0]]).unwrap();
        let mut up = vec![Some(100.0); 100];
        up[55] = None;
        let s = SurfacePair::new([10, 10], up, vec![Some(0.0); 100]).unwrap();
        assert!(matches!(build_model_space(&g, &hull, &s), Err(Error::Config(_))));
    }

    fn collar(id: &str, x: f64, y: f64, z: f64, depth: f64) -> Collar {
        Collar { hole_id: id.into(), x, y, z, total_depth: depth }
    }

    #[test]
    fn single_collar_surfaces_are_constant() {
        let g = grid10();
        let s = surfaces_from_collars(&[collar("A", 33.0, 71.0, 100.0, 200.0)], &g, SurfaceMethod::NearestCollar).unwrap();
        for c in 0..g.columns() {
            assert_eq!(s.upper(c), Some(100.0));
            assert_eq!(s.lower(c), Some(-100.0));
        }
    }

    #[test]
    fn surfaces_honor_collars_and_match_brute_force() {
        let g = grid10();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let collars: Vec<Collar> = (0..15)
            .map(|n| collar(&format!("H{n}"), rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0), rng.gen_range(90.0..110.0), rng.gen_range(20.0..80.0)))
            .collect();
        let s = surfaces_from_collars(&collars, &g, SurfaceMethod::NearestCollar).unwrap();
        for c in 0..g.columns() {
            let [x, y] = g.column_centroid(c);
            let nearest = collars
                .iter()
                .min_by(|a, b| {
                    let da = (a.x - x).powi(2) + (a.y - y).powi(2);
                    let db = (b.x - x).powi(2) + (b.y - y).powi(2);
                    da.total_cmp(&db)
                })
                .unwrap();
            assert_eq!(s.upper(c), Some(nearest.z));
            assert_eq!(s.lower(c), Some(nearest.z - nearest.total_depth));
        }
        // collar sitting exactly on a column centre
        let two = [collar("A", 5.0, 5.0, 120.0, 50.0), collar("B", 95.0, 95.0, 80.0, 30.0)];
        for method in [SurfaceMethod::NearestCollar, SurfaceMethod::InverseDistance { power: 2.0 }] {
            let s = surfaces_from_collars(&two, &g, method).unwrap();
            assert_eq!(s.upper(0), Some(120.0));
            assert_eq!(s.lower(0), Some(70.0));
        }
        assert!(surfaces_from_collars(&[], &g, SurfaceMethod::NearestCollar).is_err());
    }

    #[test]
    fn mask_set_operations() {
        let g = grid10();
        let a = VolumeMask::from_fn(g, |i| i % 2 == 0);
        let b = VolumeMask::from_fn(g, |i| i % 3 == 0);
        assert_eq!(a.and(&b).unwrap().count(), (0..1000).filter(|i| i % 6 == 0).count());
        assert_eq!(a.or(&b).unwrap().count(), (0..1000).filter(|i| i % 2 == 0 || i % 3 == 0).count());
        assert_eq!(a.not().count(), 500);
        assert!(a.and(&b).unwrap().is_subset_of(&a).unwrap());
        let other = VolumeMask::empty(GridSpec::with_default_spacing([0.0; 3], [2, 2, 2]).unwrap());
        assert!(matches!(a.and(&other), Err(Error::GridMismatch)));
    }

    proptest::proptest! {
        #[test]
        fn model_space_monotone_in_hull_and_band(
            shrink in 0.0f64..40.0,
            top in 20.0f64..100.0,
            bottom in 0.0f64..20.0,
            widen in 0.0f64..30.0,
        ) {
            let g = grid10();
            let inner = Polygon2D::new(vec![[shrink, shrink], [100.0 - shrink, shrink], [50.0, 100.0 - shrink]]).unwrap();
            let outer = Polygon2D::new(vec![[0.0, 0.0], [100.0, 0.0], [50.0, 100.0]]).unwrap();
            let narrow = SurfacePair::flat(&g, top, bottom).unwrap();
            let wide = SurfacePair::flat(&g, top + widen, bottom - widen).unwrap();
            let small = build_model_space(&g, &inner, &narrow).unwrap();
            let big = build_model_space(&g, &outer, &wide).unwrap();
            proptest::prop_assert!(small.is_subset_of(&big).unwrap());
        }
    }
}
