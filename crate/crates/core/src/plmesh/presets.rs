use std::f64::consts::PI;

use super::pipeline::{balanced_with_plan, BalancedMesh};
use super::plan::SubdivisionPlan;
use super::surface::PLSurface;
use super::PlMeshError;
use crate::complex::AbstractTriangulation;
use crate::metrics::{lipschitz_constant, LipschitzReport};

/// Two right isosceles triangles glued along the hypotenuse.
pub fn unit_square() -> PLSurface {
    let d = 2f64.sqrt();
    PLSurface {
        triangles: vec![[1.0, 1.0, d], [1.0, 1.0, d]],
        gluings: vec![[[0, 2], [1, 2]]],
    }
}

pub fn equilateral_surface(side: f64) -> PLSurface {
    PLSurface {
        triangles: vec![[side; 3]],
        gluings: vec![],
    }
}

/// Regular `m`-gon of circumradius `r` as a fan around its center.
/// Triangle `i` has corners center, rim `i`, rim `i+1`.
pub fn disk_surface(m: usize, r: f64) -> Result<PLSurface, PlMeshError> {
    if m < 3 || !(r > 0.0) {
        return Err(PlMeshError::Preset(format!("disk needs m >= 3 and r > 0, got m = {m}, r = {r}")));
    }
    let chord = 2.0 * r * (PI / m as f64).sin();
    Ok(PLSurface {
        triangles: vec![[r, chord, r]; m],
        gluings: (0..m).map(|i| [[i, 2], [(i + 1) % m, 0]]).collect(),
    })
}

/// Polyhedral cap inscribed in the unit upper hemisphere. The equator carries
/// `b` vertices; `rings` latitude circles (equator included) are zipped
/// together by angle and closed by a fan at the pole.
pub fn hemisphere_surface(b: usize, rings: usize) -> Result<PLSurface, PlMeshError> {
    if b < 3 || rings < 1 {
        return Err(PlMeshError::Preset(format!("hemisphere needs b >= 3 and rings >= 1, got {b}, {rings}")));
    }
    let step = PI / 2.0 / rings as f64;
    let mut points: Vec<[f64; 3]> = Vec::new();
    // first point index, count and angular offset of each ring
    let mut ring: Vec<(usize, usize, f64)> = Vec::new();
    for j in 0..rings {
        let phi = j as f64 * step;
        let count = if j == 0 { b } else { ((b as f64 * phi.cos()).round() as usize).max(3) };
        let offset = 0.5 * (j % 2) as f64;
        ring.push((points.len(), count, offset));
        for i in 0..count {
            let theta = 2.0 * PI * (i as f64 + offset) / count as f64;
            points.push([phi.cos() * theta.cos(), phi.cos() * theta.sin(), phi.sin()]);
        }
    }
    let pole = points.len();
    points.push([0.0, 0.0, 1.0]);

    let mut tris = Vec::new();
    for j in 0..rings - 1 {
        let (lo, a, oa) = ring[j];
        let (hi, c, oc) = ring[j + 1];
        let angle = |k: usize, n: usize, o: f64| (k as f64 + o) / n as f64;
        let (mut i, mut k) = (0, 0);
        while i < a || k < c {
            let lower_next = angle(i + 1, a, oa);
            let upper_next = angle(k + 1, c, oc);
            if k == c || (i < a && lower_next <= upper_next) {
                tris.push([lo + i % a, lo + (i + 1) % a, hi + k % c]);
                i += 1;
            } else {
                tris.push([lo + i % a, hi + (k + 1) % c, hi + k % c]);
                k += 1;
            }
        }
    }
    let (top, c, _) = ring[rings - 1];
    for k in 0..c {
        tris.push([top + k, top + (k + 1) % c, pole]);
    }
    PLSurface::from_vertex_mesh(&points, &tris)
}

fn uniform_mesh(m: &PLSurface, epsilon: f64) -> Result<BalancedMesh, PlMeshError> {
    let plan = SubdivisionPlan::uniform(m, epsilon)?;
    balanced_with_plan(m, &plan)
}

/// Unit disk fan with `m` spokes, each rim chord cut into `j` intervals.
pub fn flat_disk_mesh(m: usize, j: usize) -> Result<BalancedMesh, PlMeshError> {
    if j == 0 {
        return Err(PlMeshError::Preset("j must be positive".into()));
    }
    let s = disk_surface(m, 1.0)?;
    uniform_mesh(&s, s.triangles[0][1] / j as f64)
}

/// Hemisphere cap with each equator chord cut into `j` intervals.
pub fn hemisphere_mesh(b: usize, rings: usize, j: usize) -> Result<BalancedMesh, PlMeshError> {
    if j == 0 {
        return Err(PlMeshError::Preset("j must be positive".into()));
    }
    let s = hemisphere_surface(b, rings)?;
    let chord = 2.0 * (PI / b as f64).sin();
    uniform_mesh(&s, chord / j as f64)
}

fn smallest_divisor_from(n: usize, lo: usize) -> Option<usize> {
    (lo..=n).find(|b| n % b == 0)
}

/// Hemisphere mesh whose boundary is `C_n`: the cap has `b` equator
/// vertices, `b` the smallest divisor of `n` that is at least 6, and each
/// equator chord is cut into `n / b` intervals.
pub fn hemisphere_preset(n: usize) -> Result<BalancedMesh, PlMeshError> {
    let b = smallest_divisor_from(n, 6).ok_or_else(|| PlMeshError::Preset(format!("hemisphere needs n >= 6, got {n}")))?;
    let rings = ((b as f64 / 4.0).round() as usize).max(1);
    hemisphere_mesh(b, rings, n / b)
}

/// Flat unit disk whose boundary is `C_n`, with `m` spokes for `m` the
/// smallest divisor of `n` that is at least 8.
pub fn disk_preset(n: usize) -> Result<BalancedMesh, PlMeshError> {
    let m = smallest_divisor_from(n, 8).ok_or_else(|| PlMeshError::Preset(format!("disk needs n >= 8, got {n}")))?;
    flat_disk_mesh(m, n / m)
}

/// Fan of `n` triangles with unit rim chords, one interval per chord. For
/// `n = 6` this is the wheel with every triangle equilateral.
pub fn wheel_preset(n: usize) -> Result<BalancedMesh, PlMeshError> {
    if n < 3 {
        return Err(PlMeshError::Preset(format!("wheel needs n >= 3, got {n}")));
    }
    let r = 0.5 / (PI / n as f64).sin();
    uniform_mesh(&disk_surface(n, r)?, 1.0)
}

/// Triangulated hemisphere filling `C_n`.
pub fn discretized_hemisphere(n: usize) -> Result<(AbstractTriangulation, LipschitzReport), PlMeshError> {
    let mesh = hemisphere_preset(n)?;
    let lip = lipschitz_constant(&mesh.complex).map_err(|e| PlMeshError::Report(e.to_string()))?;
    Ok((mesh.complex, lip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmesh::surface::validate_surface;

    #[test]
    fn disk_is_valid() {
        let d = disk_surface(8, 1.0).unwrap();
        let r = validate_surface(&d);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(r.num_vertices, 9);
        assert_eq!(r.boundary_sides, 8);
        let area = 0.5 * 8.0 * (2.0 * PI / 8.0).sin();
        assert!((r.area - area).abs() < 1e-12);
    }

    #[test]
    fn hemisphere_is_a_disk() {
        for (b, rings) in [(6, 2), (8, 2), (12, 3), (20, 5)] {
            let h = hemisphere_surface(b, rings).unwrap();
            let r = validate_surface(&h);
            assert!(r.is_valid(), "{:?}", r.violations);
            assert_eq!(r.boundary_sides, b);
            let expected = 2.0 * b as f64 * (PI / b as f64).sin();
            assert!((r.boundary_length - expected).abs() < 1e-12);
            assert!(r.area < 2.0 * PI);
        }
        let fine = validate_surface(&hemisphere_surface(64, 16).unwrap()).area;
        assert!((fine - 2.0 * PI).abs() < 0.05, "{fine}");
    }

    #[test]
    fn small_hemisphere_fills_the_cycle() {
        let (k, lip) = discretized_hemisphere(12).unwrap();
        assert!(k.is_valid());
        assert_eq!(k.boundary_tag(), Some(12));
        assert_eq!(k.boundary_cycle().unwrap().len(), 12);
        assert!(crate::rational::to_f64(&lip.delta_achieved) > 0.5);
        assert!(discretized_hemisphere(5).is_err());
    }

    #[test]
    fn wheel_six_is_equilateral() {
        let mesh = wheel_preset(6).unwrap();
        assert_eq!(mesh.complex.num_vertices(), 7);
        assert!(mesh.lengths.values().all(|&l| (l - 1.0).abs() < 1e-12));
        assert_eq!(mesh.complex.canonical_form(), crate::search::wheel(6).canonical_form());
    }

    #[test]
    fn disk_preset_sizes() {
        let mesh = disk_preset(32).unwrap();
        assert_eq!(mesh.complex.boundary_tag(), Some(32));
        assert!(disk_preset(7).is_err());
    }
}
