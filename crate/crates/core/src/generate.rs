//! Generators for closed triangulated manifolds with known topology.

use crate::complex::SimplicialComplex;
use crate::error::{BettiError, Result};
use crate::simplex::Simplex;
use std::str::FromStr;

/// Built-in test manifolds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// Boundary of the 3-simplex: the minimal 2-sphere.
    SphereTetra,
    /// Icosahedral 2-sphere: 12 vertices, 30 edges, 20 faces.
    SphereIcosa,
    /// Flat torus on an m x n grid, each square split into two triangles.
    Torus(usize, usize),
    /// Orientable genus-g surface from the 4g-gon identification polygon,
    /// made simplicial by repeated barycentric subdivision.
    GenusSurface { genus: usize, subdivisions: usize },
    /// 3-torus: periodic k^3 cube grid, six tetrahedra per cube.
    ThreeTorus(usize),
}

impl Shape {
    pub fn generate(&self) -> Result<SimplicialComplex> {
        match *self {
            Shape::SphereTetra => sphere_tetra(),
            Shape::SphereIcosa => sphere_icosa(),
            Shape::Torus(m, n) => torus(m, n),
            Shape::GenusSurface { genus, subdivisions } => genus_surface(genus, subdivisions),
            Shape::ThreeTorus(k) => three_torus(k),
        }
    }

    /// Betti numbers the generated manifold must have, for cross-checks.
    pub fn expected_betti(&self) -> Vec<usize> {
        match *self {
            Shape::SphereTetra | Shape::SphereIcosa => vec![1, 0, 1],
            Shape::Torus(_, _) => vec![1, 2, 1],
            Shape::GenusSurface { genus, .. } => vec![1, 2 * genus, 1],
            Shape::ThreeTorus(_) => vec![1, 3, 3, 1],
        }
    }
}

impl FromStr for Shape {
    type Err = BettiError;

    /// Accepts `sphere:tetra`, `sphere:icosa`, `torus:M,N`, `genus:G[,S]`,
    /// `three_torus:K`.
    fn from_str(s: &str) -> Result<Shape> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<usize>> {
            args.split(',')
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| BettiError::Parse(format!("bad generator argument {p:?}")))
                })
                .collect()
        };
        match name {
            "sphere" => match args {
                "tetra" => Ok(Shape::SphereTetra),
                "icosa" | "" => Ok(Shape::SphereIcosa),
                other => Err(BettiError::Parse(format!("unknown sphere variant {other:?}"))),
            },
            "torus" => {
                let v = nums()?;
                if v.len() != 2 {
                    return Err(BettiError::Parse("torus needs two sizes, e.g. torus:8,8".into()));
                }
                Ok(Shape::Torus(v[0], v[1]))
            }
            "genus" => {
                let v = nums()?;
                match v.as_slice() {
                    [g] => Ok(Shape::GenusSurface { genus: *g, subdivisions: 2 }),
                    [g, s] => Ok(Shape::GenusSurface { genus: *g, subdivisions: *s }),
                    _ => Err(BettiError::Parse("genus needs genus[,subdivisions]".into())),
                }
            }
            "three_torus" | "three-torus" => {
                let v = nums()?;
                if v.len() != 1 {
                    return Err(BettiError::Parse("three_torus needs one size, e.g. three_torus:3".into()));
                }
                Ok(Shape::ThreeTorus(v[0]))
            }
            other => Err(BettiError::Parse(format!("unknown generator {other:?}"))),
        }
    }
}

fn sphere_tetra() -> Result<SimplicialComplex> {
    SimplicialComplex::build_from_simplexes(
        &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        4,
    )
}

fn sphere_icosa() -> Result<SimplicialComplex> {
    // standard icosahedron face list: poles 0 and 11, two pentagonal rings
    let faces: [[usize; 3]; 20] = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 7],
        [2, 3, 8],
        [3, 4, 9],
        [4, 5, 10],
        [5, 1, 6],
        [1, 6, 7],
        [2, 7, 8],
        [3, 8, 9],
        [4, 9, 10],
        [5, 10, 6],
        [6, 7, 11],
        [7, 8, 11],
        [8, 9, 11],
        [9, 10, 11],
        [10, 6, 11],
    ];
    SimplicialComplex::build_from_simplexes(
        &faces.iter().map(|f| f.to_vec()).collect::<Vec<_>>(),
        12,
    )
}

fn torus(m: usize, n: usize) -> Result<SimplicialComplex> {
    if m < 3 || n < 3 {
        return Err(BettiError::Validation(
            "torus grid needs m, n >= 3; smaller identifications degenerate".into(),
        ));
    }
    let v = |i: usize, j: usize| (i % m) * n + (j % n);
    let mut tops = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            tops.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            tops.push(vec![v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    SimplicialComplex::build_from_simplexes(&tops, m * n)
}

fn three_torus(k: usize) -> Result<SimplicialComplex> {
    if k < 3 {
        return Err(BettiError::Validation(
            "three_torus grid needs k >= 3; smaller identifications degenerate".into(),
        ));
    }
    let v = |x: usize, y: usize, z: usize| ((x % k) * k + (y % k)) * k + (z % k);
    // six tetrahedra per cube along vertex-ordering chains; the induced face
    // diagonals agree across shared cube faces and across the periodic wrap
    let perms: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tops = Vec::with_capacity(6 * k * k * k);
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                for p in &perms {
                    let mut offset = [0usize; 3];
                    let mut tet = vec![v(x, y, z)];
                    for &axis in p {
                        offset[axis] += 1;
                        tet.push(v(x + offset[0], y + offset[1], z + offset[2]));
                    }
                    tops.push(tet);
                }
            }
        }
    }
    SimplicialComplex::build_from_simplexes(&tops, k * k * k)
}

/// A 2-complex under construction: plain triangle soup with free vertex ids.
struct TriMesh {
    next_vertex: usize,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    /// One round of barycentric subdivision (2-d): a new vertex per edge and
    /// per triangle, six triangles per old triangle.
    fn barycentric_subdivide(&mut self) {
        use std::collections::HashMap;
        let mut edge_mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = self.next_vertex;
        let mut out = Vec::with_capacity(self.triangles.len() * 6);
        for t in &self.triangles {
            let center = next;
            next += 1;
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let mid = *edge_mid.entry(key).or_insert_with(|| {
                    let m = next;
                    next += 1;
                    m
                });
                out.push([a, mid, center]);
                out.push([mid, b, center]);
            }
        }
        self.next_vertex = next;
        self.triangles = out;
    }

    /// Boundary edges (appearing in exactly one triangle), as unordered pairs.
    fn boundary_edges(&self) -> Vec<(usize, usize)> {
        use std::collections::HashMap;
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect()
    }
}

/// Walk the boundary cycle starting at `start`, stepping first to the
/// neighbor `toward`. Returns the full vertex cycle (start repeated at end).
fn boundary_cycle(edges: &[(usize, usize)], start: usize, toward: usize) -> Result<Vec<usize>> {
    use std::collections::HashMap;
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut cycle = vec![start, toward];
    loop {
        let (prev, cur) = (cycle[cycle.len() - 2], cycle[cycle.len() - 1]);
        let nbrs = adj
            .get(&cur)
            .ok_or_else(|| BettiError::Validation("broken boundary cycle".into()))?;
        if nbrs.len() != 2 {
            return Err(BettiError::Validation("boundary is not a single cycle".into()));
        }
        let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
        cycle.push(next);
        if next == start {
            return Ok(cycle);
        }
        if cycle.len() > edges.len() + 2 {
            return Err(BettiError::Validation("boundary walk did not close".into()));
        }
    }
}

/// Genus-g surface from the 4g-gon with edge word aba⁻¹b⁻¹ repeated. The
/// polygon disk is fan-triangulated, barycentrically subdivided, and the
/// boundary paths are glued pairwise with reversal. Two subdivision rounds
/// are the minimum producing a valid simplicial complex.
fn genus_surface(genus: usize, subdivisions: usize) -> Result<SimplicialComplex> {
    if genus < 1 {
        return Err(BettiError::Validation("genus must be >= 1".into()));
    }
    if subdivisions < 2 {
        return Err(BettiError::Validation(
            "genus surface needs at least 2 subdivision rounds; fewer leaves repeated faces".into(),
        ));
    }
    let sides = 4 * genus;
    // fan disk: center 0, ring 1..=sides
    let mut mesh = TriMesh {
        next_vertex: sides + 1,
        triangles: (1..=sides).map(|i| [0, i, if i == sides { 1 } else { i + 1 }]).collect(),
    };
    for _ in 0..subdivisions {
        mesh.barycentric_subdivide();
    }

    // corner i sits at original ring vertex i+1
    let edges = mesh.boundary_edges();
    let corner = |side: usize| side % sides + 1;
    // orient the walk so that corner 1's successor side leads to corner 2
    let cycle_a = boundary_cycle(&edges, corner(0), pick_neighbor(&edges, corner(0), 0))?;
    let cycle = if position_of(&cycle_a, corner(1)) < position_of(&cycle_a, corner(sides - 1)) {
        cycle_a
    } else {
        boundary_cycle(&edges, corner(0), pick_neighbor(&edges, corner(0), 1))?
    };
    let seg = (cycle.len() - 1) / sides;
    for s in 0..sides {
        if cycle[s * seg] != corner(s) {
            return Err(BettiError::Validation("boundary corners out of order".into()));
        }
    }
    let side_path = |s: usize| -> &[usize] { &cycle[s * seg..=(s + 1) * seg] };

    // union-find identification of boundary vertices
    let mut parent: Vec<usize> = (0..mesh.next_vertex).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    };
    for block in 0..genus {
        // word a b a^-1 b^-1: side 4k ~ reverse of side 4k+2, 4k+1 ~ reverse of 4k+3
        for (s1, s2) in [(4 * block, 4 * block + 2), (4 * block + 1, 4 * block + 3)] {
            let p = side_path(s1).to_vec();
            let q = side_path(s2).to_vec();
            for t in 0..p.len() {
                union(&mut parent, p[t], q[q.len() - 1 - t]);
            }
        }
    }

    // compact relabel
    let mut label = vec![usize::MAX; mesh.next_vertex];
    let mut next = 0;
    for v in 0..mesh.next_vertex {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        label[v] = label[r];
    }
    let mut tops = Vec::with_capacity(mesh.triangles.len());
    for t in &mesh.triangles {
        let mapped = vec![label[t[0]], label[t[1]], label[t[2]]];
        let mut sorted = mapped.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != 3 {
            return Err(BettiError::Validation(
                "identification produced a degenerate triangle; increase subdivisions".into(),
            ));
        }
        tops.push(mapped);
    }
    let k = SimplicialComplex::build_from_simplexes(&tops, next)?;
    let expected_chi = 2 - 2 * genus as i64;
    if k.euler_characteristic() != expected_chi {
        return Err(BettiError::Validation(format!(
            "genus surface has Euler characteristic {}, expected {}",
            k.euler_characteristic(),
            expected_chi
        )));
    }
    Ok(k)
}

fn pick_neighbor(edges: &[(usize, usize)], v: usize, which: usize) -> usize {
    let mut nbrs: Vec<usize> = edges
        .iter()
        .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
        .collect();
    nbrs.sort_unstable();
    nbrs[which]
}

fn position_of(cycle: &[usize], v: usize) -> usize {
    cycle.iter().position(|&x| x == v).unwrap_or(usize::MAX)
}

/// Returns how many top simplexes a generated complex declares per cell of
/// each degree; used by tests.
pub fn skeleton_sizes(k: &SimplicialComplex) -> Vec<usize> {
    (0..=k.dim()).map(|r| k.skeleton_size(r)).collect()
}

#[allow(unused)]
fn simplex_list(k: &SimplicialComplex, r: usize) -> Vec<Simplex> {
    k.skeleton(r).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_shapes() {
        assert_eq!("sphere:tetra".parse::<Shape>().unwrap(), Shape::SphereTetra);
        assert_eq!("sphere:icosa".parse::<Shape>().unwrap(), Shape::SphereIcosa);
        assert_eq!("torus:4,5".parse::<Shape>().unwrap(), Shape::Torus(4, 5));
        assert_eq!(
            "genus:2".parse::<Shape>().unwrap(),
            Shape::GenusSurface { genus: 2, subdivisions: 2 }
        );
        assert_eq!("three_torus:3".parse::<Shape>().unwrap(), Shape::ThreeTorus(3));
        assert!("klein:1".parse::<Shape>().is_err());
    }

    #[test]
    fn icosa_counts() {
        let k = sphere_icosa().unwrap();
        assert_eq!(skeleton_sizes(&k), vec![12, 30, 20]);
        assert_eq!(k.euler_characteristic(), 2);
        assert!(k.validate_closed_manifold().is_closed());
    }

    #[test]
    fn torus_counts() {
        let k = torus(4, 4).unwrap();
        assert_eq!(skeleton_sizes(&k), vec![16, 48, 32]);
        assert_eq!(k.euler_characteristic(), 0);
        assert!(k.validate_closed_manifold().is_closed());
        assert!(torus(2, 5).is_err());
    }

    #[test]
    fn torus_f2_rows() {
        let k = torus(4, 4).unwrap();
        let am = k.incidence_matrices();
        for r in 0..k.skeleton_size(2) {
            assert_eq!(am.f[2].row_nnz(r), 3);
        }
    }

    #[test]
    fn three_torus_counts() {
        let k = three_torus(3).unwrap();
        assert_eq!(skeleton_sizes(&k), vec![27, 189, 324, 162]);
        assert_eq!(k.euler_characteristic(), 0);
        assert!(k.validate_closed_manifold().is_closed());
        assert!(three_torus(2).is_err());
    }

    #[test]
    fn genus_two_surface() {
        let k = genus_surface(2, 2).unwrap();
        assert_eq!(k.euler_characteristic(), -2);
        assert!(k.validate_closed_manifold().is_closed());
        assert!(genus_surface(0, 2).is_err());
        assert!(genus_surface(1, 1).is_err());
    }

    #[test]
    fn genus_one_is_a_torus() {
        let k = genus_surface(1, 2).unwrap();
        assert_eq!(k.euler_characteristic(), 0);
        assert!(k.validate_closed_manifold().is_closed());
    }
}
