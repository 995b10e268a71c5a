//! Sampled closed surfaces: latitude-longitude sphere, periodic torus grid,
//! and general oriented polygon meshes.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use serde::Serialize;

use crate::ChernError;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Surface {
    /// Vertices `(θ_i, φ_j) = (πi/n_theta, 2πj/n_phi)`, `0 ≤ i ≤ n_theta`, `φ` periodic.
    Sphere { n_theta: usize, n_phi: usize },
    /// Vertices `(t_i, s_j) = (i/nt, j/ns)`, periodic in both.
    Torus { nt: usize, ns: usize },
    /// Oriented faces listed counterclockwise.
    Mesh { genus: usize, vertices: usize, faces: Vec<Vec<usize>> },
}

impl Surface {
    pub fn sphere(n_phi: usize, n_theta: usize) -> Result<Surface, ChernError> {
        if n_theta < 4 || n_phi < 4 || n_phi % 2 == 1 {
            return Err(ChernError::Grid(format!("sphere grid {n_phi}×{n_theta} needs an even φ count ≥ 4")));
        }
        Ok(Surface::Sphere { n_theta, n_phi })
    }

    pub fn torus(nt: usize, ns: usize) -> Result<Surface, ChernError> {
        if nt < 5 || ns < 5 {
            return Err(ChernError::Grid(format!("torus grid {nt}×{ns} is too coarse")));
        }
        Ok(Surface::Torus { nt, ns })
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Surface::Sphere { n_theta, n_phi } => (n_theta + 1) * n_phi,
            Surface::Torus { nt, ns } => nt * ns,
            Surface::Mesh { vertices, .. } => *vertices,
        }
    }

    /// Chart coordinates of a vertex; `None` for meshes.
    pub fn coords(&self, v: usize) -> Option<(f64, f64)> {
        match self {
            Surface::Sphere { n_theta, n_phi } => {
                Some((PI * (v / n_phi) as f64 / *n_theta as f64, 2.0 * PI * (v % n_phi) as f64 / *n_phi as f64))
            }
            Surface::Torus { nt, ns } => Some(((v / ns) as f64 / *nt as f64, (v % ns) as f64 / *ns as f64)),
            Surface::Mesh { .. } => None,
        }
    }

    pub fn faces(&self) -> Vec<Vec<usize>> {
        match self {
            Surface::Sphere { n_theta, n_phi } => {
                let v = |i: usize, j: usize| i * n_phi + j % n_phi;
                (0..*n_theta)
                    .flat_map(|i| (0..*n_phi).map(move |j| vec![v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)]))
                    .collect()
            }
            Surface::Torus { nt, ns } => {
                let v = |i: usize, j: usize| (i % nt) * ns + j % ns;
                (0..*nt).flat_map(|i| (0..*ns).map(move |j| vec![v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)])).collect()
            }
            Surface::Mesh { faces, .. } => faces.clone(),
        }
    }

    /// `V − E + F` of the polygon complex (not meaningful for the sphere's
    /// duplicated pole vertices).
    pub fn euler_characteristic(&self) -> i64 {
        let faces = self.faces();
        let mut edges = HashSet::new();
        let mut used = HashSet::new();
        for f in &faces {
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                used.insert(a);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        used.len() as i64 - edges.len() as i64 + faces.len() as i64
    }

    /// True when every edge is shared by exactly two faces traversing it in
    /// opposite directions.
    pub fn is_closed_oriented(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in self.faces() {
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                if a != b {
                    *directed.entry((a, b)).or_default() += 1;
                }
            }
        }
        directed.iter().all(|(&(a, b), &c)| c == 1 && directed.get(&(b, a)) == Some(&1))
    }
}

/// Connected sum of `genus` copies of the `nt×ns` torus grid, chained
/// through square holes. Copy `0` keeps the vertex numbering of
/// `Surface::Torus { nt, ns }`; its hole is the face at `(0,0)`.
pub fn connected_sum(nt: usize, ns: usize, genus: usize) -> Result<Surface, ChernError> {
    if genus < 2 {
        return Err(ChernError::Grid("connected sums need genus ≥ 2".into()));
    }
    if nt < 6 || ns < 6 {
        return Err(ChernError::Grid(format!("torus grid {nt}×{ns} is too coarse for holes")));
    }
    let per = nt * ns;
    let v = |copy: usize, i: usize, j: usize| copy * per + (i % nt) * ns + j % ns;
    let hole_left = (0usize, 0usize);
    let hole_right = (nt / 2, ns / 2);
    let cycle = |copy: usize, (i, j): (usize, usize)| [v(copy, i, j), v(copy, i + 1, j), v(copy, i + 1, j + 1), v(copy, i, j + 1)];

    let mut parent: Vec<usize> = (0..genus * per).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let n = p[c];
            p[c] = r;
            c = n;
        }
        r
    }
    let mut faces = Vec::new();
    for copy in 0..genus {
        let mut holes = vec![];
        if copy > 0 {
            holes.push(hole_left);
        }
        if copy + 1 < genus {
            holes.push(if copy == 0 { hole_left } else { hole_right });
        }
        for i in 0..nt {
            for j in 0..ns {
                if !holes.contains(&(i, j)) {
                    faces.push(cycle(copy, (i, j)).to_vec());
                }
            }
        }
        if copy + 1 < genus {
            let a = cycle(copy, if copy == 0 { hole_left } else { hole_right });
            let b = cycle(copy + 1, hole_left);
            // reversed identification keeps the sum orientable
            for (x, y) in [(a[0], b[0]), (a[1], b[3]), (a[2], b[2]), (a[3], b[1])] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                let (lo, hi) = (rx.min(ry), rx.max(ry));
                parent[hi] = lo;
            }
        }
    }
    let mut relabel = HashMap::new();
    let mut vertices = 0usize;
    for x in 0..genus * per {
        let r = find(&mut parent, x);
        relabel.entry(r).or_insert_with(|| {
            vertices += 1;
            vertices - 1
        });
    }
    let faces = faces.into_iter().map(|f| f.into_iter().map(|x| relabel[&find(&mut parent, x)]).collect()).collect();
    Ok(Surface::Mesh { genus, vertices, faces })
}

/// Index of the glued mesh vertex that a vertex of copy `0` maps to.
pub fn first_copy_vertex(nt: usize, ns: usize, i: usize, j: usize) -> usize {
    // relabelling is order preserving and copy 0 only loses no vertices
    (i % nt) * ns + j % ns
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_grid_topology() {
        let t = Surface::torus(8, 6).unwrap();
        assert_eq!(t.euler_characteristic(), 0);
        assert!(t.is_closed_oriented());
    }

    #[test]
    fn connected_sums_have_the_right_genus() {
        for g in 2..=4 {
            let m = connected_sum(8, 8, g).unwrap();
            assert_eq!(m.euler_characteristic(), 2 - 2 * g as i64, "genus {g}");
            assert!(m.is_closed_oriented(), "genus {g}");
        }
    }

    #[test]
    fn sphere_needs_even_longitudes() {
        assert!(Surface::sphere(201, 100).is_err());
        let s = Surface::sphere(200, 100).unwrap();
        assert_eq!(s.vertex_count(), 101 * 200);
        assert_eq!(s.coords(200), Some((PI / 100.0, 0.0)));
    }
}
