//! Plot data for tessellations of the 2-sphere: one great circle per
//! hyperplane and one spherical polygon per cone.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cone::extreme_rays;
use crate::error::{Error, Result};
use crate::linalg::to_f64;
use crate::tessellation::{build_arrangement, cone_of, enumerate_cones, Budget, PointConfig, SignedOrdering};

#[derive(Clone, Debug, Serialize)]
pub struct GreatCircle {
    /// Unit normal of the plane cutting the sphere.
    pub normal: [f64; 3],
    /// Two orthonormal vectors spanning the plane; the circle is
    /// `cos(t) u + sin(t) v`.
    pub u: [f64; 3],
    pub v: [f64; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereCell {
    pub eps: Vec<i8>,
    pub sigma: Vec<usize>,
    /// Unit vertices in counterclockwise order seen from outside.
    pub vertices: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereExport {
    pub schema: u32,
    pub family: String,
    pub n: usize,
    pub points: Vec<Vec<String>>,
    pub great_circles: Vec<GreatCircle>,
    pub cells: Vec<SphereCell>,
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Two unit vectors completing `n` to a right-handed orthonormal frame.
fn frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = unit(cross(helper, n));
    (u, cross(n, u))
}

fn cell(cfg: &PointConfig, ord: &SignedOrdering) -> SphereCell {
    let rays = extreme_rays(&cone_of(cfg, ord));
    let mut verts: Vec<[f64; 3]> = rays
        .rays
        .iter()
        .map(|r| unit([0, 1, 2].map(|i| r[i].to_f64().unwrap_or(f64::NAN))))
        .collect();
    let c = unit(verts.iter().fold([0.0; 3], |a, v| [a[0] + v[0], a[1] + v[1], a[2] + v[2]]));
    let (u, v) = frame(c);
    verts.sort_by(|a, b| {
        let ta = dot(*a, v).atan2(dot(*a, u));
        let tb = dot(*b, v).atan2(dot(*b, u));
        ta.total_cmp(&tb)
    });
    SphereCell {
        eps: ord.eps.clone(),
        sigma: ord.sigma.clone(),
        vertices: verts,
    }
}

pub fn export_sphere(cfg: &PointConfig, budget: &Budget) -> Result<SphereExport> {
    if cfg.d() != 3 {
        return Err(Error::OutOfRange(format!("sphere export needs d = 3, got {}", cfg.d())));
    }
    let normals = build_arrangement(cfg)?;
    let great_circles = normals
        .iter()
        .map(|row| {
            let normal = unit([to_f64(&row[0]), to_f64(&row[1]), to_f64(&row[2])]);
            let (u, v) = frame(normal);
            GreatCircle { normal, u, v }
        })
        .collect();
    let cells = enumerate_cones(cfg, budget)?.iter().map(|o| cell(cfg, o)).collect();
    Ok(SphereExport {
        schema: 1,
        family: cfg.family().to_string(),
        n: cfg.n(),
        points: cfg.points().iter().map(|p| p.iter().map(|q| q.to_string()).collect()).collect(),
        great_circles,
        cells,
    })
}
