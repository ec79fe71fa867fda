//! Simplicial complexes with explicit face incidence.
//!
//! Cells are canonically identified by ascending vertex tuples and indexed in
//! lexicographic order within each skeleton. Incidence (which cell is the
//! i-th face of which) is stored explicitly rather than recovered by tuple
//! lookup, so that glued constructions such as [`SimplicialComplex::double_cover`]
//! can carry two distinct cells over the same vertex set (the two triangles of
//! a doubled disk) and still feed every downstream operator.

use crate::error::{BettiError, Result};
use crate::simplex::Simplex;
use crate::sparse::Csr;

/// A finite simplicial complex (possibly with multi-cells after gluing).
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    n_points: usize,
    /// skeletons[r] lists the r-cells.
    skeletons: Vec<Vec<Simplex>>,
    /// faces[r][j][i] = index into skeletons[r-1] of the face of cell j that
    /// omits the i-th vertex of its tuple. faces[0] entries are empty.
    faces: Vec<Vec<Vec<usize>>>,
    /// cofaces[r][i] = indices into skeletons[r+1] of cells having i as a face.
    cofaces: Vec<Vec<Vec<usize>>>,
    coords: Option<Vec<Vec<f64>>>,
    edge_length: f64,
}

/// F_r / G_r adjacency and inclusion matrices of the input model.
#[derive(Debug, Clone)]
pub struct AdjacencyMatrices {
    /// f[r]: |S_r| x |S_r| 0/1, shared-face adjacency (graph adjacency at r=0).
    pub f: Vec<Csr<i64>>,
    /// g[r]: |S_r| x |S_{r-1}| 0/1 inclusion; g[0] is an empty placeholder.
    pub g: Vec<Csr<i64>>,
}

/// Outcome of the closed-manifold check.
#[derive(Debug, Clone)]
pub struct ManifoldReport {
    /// Indices of (n-1)-cells with coface count != 2, with their counts.
    pub violations: Vec<(usize, usize)>,
}

impl ManifoldReport {
    pub fn is_closed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SimplicialComplex {
    /// Build the full face closure of a list of top simplexes.
    ///
    /// Lower skeletons are generated, deduplicated and sorted
    /// lexicographically. Rejects vertex indices outside `0..n_points`,
    /// repeated vertices within a tuple, and duplicate top simplexes.
    pub fn build_from_simplexes(top_simplexes: &[Vec<usize>], n_points: usize) -> Result<Self> {
        if top_simplexes.is_empty() {
            return Err(BettiError::Validation("no top simplexes given".into()));
        }
        let mut tops: Vec<Simplex> = Vec::with_capacity(top_simplexes.len());
        for t in top_simplexes {
            let s = Simplex::new(t.clone())?;
            if let Some(&v) = s.vertices().iter().find(|&&v| v >= n_points) {
                return Err(BettiError::Validation(format!(
                    "vertex index {v} out of range (n_points = {n_points})"
                )));
            }
            tops.push(s);
        }
        {
            let mut sorted = tops.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(BettiError::Validation("duplicate top simplex".into()));
            }
        }
        let dim = tops.iter().map(|s| s.dim()).max().unwrap();
        let mut sets: Vec<std::collections::BTreeSet<Vec<usize>>> = vec![Default::default(); dim + 1];
        for s in &tops {
            let verts = s.vertices();
            let m = verts.len();
            // all non-empty subsets; the tuple order is inherited so each
            // subset is already ascending
            for mask in 1u64..(1u64 << m) {
                let sub: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
                sets[sub.len() - 1].insert(sub);
            }
        }
        let skeletons: Vec<Vec<Simplex>> = sets
            .into_iter()
            .map(|set| set.into_iter().map(Simplex::from_sorted).collect())
            .collect();
        let faces = derive_faces(&skeletons)?;
        Ok(Self::from_parts(n_points, skeletons, faces, None, 1.0))
    }

    /// Assemble from explicit skeletons and face incidence.
    pub(crate) fn from_parts(
        n_points: usize,
        skeletons: Vec<Vec<Simplex>>,
        faces: Vec<Vec<Vec<usize>>>,
        coords: Option<Vec<Vec<f64>>>,
        edge_length: f64,
    ) -> Self {
        let mut cofaces: Vec<Vec<Vec<usize>>> = skeletons.iter().map(|sk| vec![Vec::new(); sk.len()]).collect();
        for r in 1..skeletons.len() {
            for (j, fs) in faces[r].iter().enumerate() {
                for &fi in fs {
                    cofaces[r - 1][fi].push(j);
                }
            }
        }
        SimplicialComplex { n_points, skeletons, faces, cofaces, coords, edge_length }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Top dimension n.
    pub fn dim(&self) -> usize {
        self.skeletons.len() - 1
    }

    pub fn skeleton(&self, r: usize) -> &[Simplex] {
        &self.skeletons[r]
    }

    /// |S_r|, zero when r exceeds the dimension.
    pub fn skeleton_size(&self, r: usize) -> usize {
        self.skeletons.get(r).map_or(0, |s| s.len())
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<Self> {
        if coords.len() != self.n_points {
            return Err(BettiError::Validation(format!(
                "got {} coordinate rows for {} points",
                coords.len(),
                self.n_points
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    pub fn with_edge_length(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(BettiError::Validation("edge length must be positive".into()));
        }
        self.edge_length = a;
        Ok(self)
    }

    /// Face indices of cell `j` in degree `r`, aligned with omitted-vertex order.
    pub fn cell_faces(&self, r: usize, j: usize) -> &[usize] {
        &self.faces[r][j]
    }

    /// Cofaces (indices of (r+1)-cells) of cell `i` in degree `r`.
    pub fn cell_cofaces(&self, r: usize, i: usize) -> &[usize] {
        &self.cofaces[r][i]
    }

    /// Index of the r-cell with the given ascending vertex tuple.
    /// Only meaningful while tuples are unique (ordinary complexes).
    pub fn index_of(&self, r: usize, vertices: &[usize]) -> Option<usize> {
        self.skeletons.get(r)?.binary_search_by(|s| s.vertices().cmp(vertices)).ok()
    }

    /// Euler characteristic, sum of (-1)^r |S_r|.
    pub fn euler_characteristic(&self) -> i64 {
        self.skeletons
            .iter()
            .enumerate()
            .map(|(r, sk)| if r % 2 == 0 { sk.len() as i64 } else { -(sk.len() as i64) })
            .sum()
    }

    /// Number of top-dimensional cells containing each r-cell.
    pub fn top_incidence_counts(&self, r: usize) -> Vec<usize> {
        let n = self.dim();
        let mut counts = vec![0usize; self.skeleton_size(r)];
        if r == n {
            counts.iter_mut().for_each(|c| *c = 1);
            return counts;
        }
        // Walk down from each top cell, deduplicating per top cell with a stamp.
        let mut stamp = vec![usize::MAX; self.skeleton_size(r)];
        for t in 0..self.skeleton_size(n) {
            let mut frontier = vec![t];
            for rr in (r + 1..=n).rev() {
                let mut next = Vec::new();
                for &c in &frontier {
                    next.extend_from_slice(&self.faces[rr][c]);
                }
                next.sort_unstable();
                next.dedup();
                frontier = next;
            }
            for &c in &frontier {
                if stamp[c] != t {
                    stamp[c] = t;
                    counts[c] += 1;
                }
            }
        }
        counts
    }

    /// Signed boundary matrix B_r, |S_{r-1}| x |S_r|, entries in {-1,0,+1}.
    /// Column j carries (-1)^i on the face omitting the i-th tuple vertex.
    pub fn boundary_matrix(&self, r: usize) -> Result<Csr<i64>> {
        if r == 0 || r > self.dim() {
            return Err(BettiError::Validation(format!(
                "boundary degree {r} out of range 1..={}",
                self.dim()
            )));
        }
        let mut triplets = Vec::with_capacity(self.skeleton_size(r) * (r + 1));
        for (j, fs) in self.faces[r].iter().enumerate() {
            for (i, &fi) in fs.iter().enumerate() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                triplets.push((fi, j, sign));
            }
        }
        Ok(Csr::from_triplets(self.skeleton_size(r - 1), self.skeleton_size(r), &triplets))
    }

    /// The {F_r, G_r} matrices of the input model.
    pub fn incidence_matrices(&self) -> AdjacencyMatrices {
        let dim = self.dim();
        let mut f = Vec::with_capacity(dim + 1);
        let mut g = Vec::with_capacity(dim + 1);
        g.push(Csr::zeros(self.skeleton_size(0), 0));
        // F_0: two vertices are adjacent when an edge joins them.
        {
            let mut trip = Vec::new();
            if dim >= 1 {
                for fs in &self.faces[1] {
                    let (a, b) = (fs[0], fs[1]);
                    trip.push((a, b, 1));
                    trip.push((b, a, 1));
                }
            }
            let n0 = self.skeleton_size(0);
            f.push(Csr::from_triplets(n0, n0, &trip).map(|_, _, _| 1i64));
        }
        for r in 1..=dim {
            let nr = self.skeleton_size(r);
            let mut ftrip = Vec::new();
            for shared in &self.cofaces[r - 1] {
                for (a_pos, &a) in shared.iter().enumerate() {
                    for &b in &shared[a_pos + 1..] {
                        ftrip.push((a, b, 1));
                        ftrip.push((b, a, 1));
                    }
                }
            }
            f.push(Csr::from_triplets(nr, nr, &ftrip).map(|_, _, _| 1i64));
            let mut gtrip = Vec::with_capacity(nr * (r + 1));
            for (j, fs) in self.faces[r].iter().enumerate() {
                for &fi in fs {
                    gtrip.push((j, fi, 1));
                }
            }
            g.push(Csr::from_triplets(nr, self.skeleton_size(r - 1), &gtrip));
        }
        AdjacencyMatrices { f, g }
    }

    /// Check that every (n-1)-cell bounds exactly two top cells.
    pub fn validate_closed_manifold(&self) -> ManifoldReport {
        let n = self.dim();
        if n == 0 {
            return ManifoldReport { violations: Vec::new() };
        }
        let violations = self.cofaces[n - 1]
            .iter()
            .enumerate()
            .filter(|(_, cf)| cf.len() != 2)
            .map(|(i, cf)| (i, cf.len()))
            .collect();
        ManifoldReport { violations }
    }

    /// Marks, per degree, the cells contained in the boundary subcomplex.
    fn boundary_marks(&self) -> Vec<Vec<bool>> {
        let n = self.dim();
        let mut marks: Vec<Vec<bool>> = self.skeletons.iter().map(|sk| vec![false; sk.len()]).collect();
        if n == 0 {
            return marks;
        }
        for (i, cf) in self.cofaces[n - 1].iter().enumerate() {
            if cf.len() == 1 {
                marks[n - 1][i] = true;
            }
        }
        for r in (1..n).rev() {
            for j in 0..self.skeleton_size(r) {
                if marks[r][j] {
                    for &fi in &self.faces[r][j] {
                        marks[r - 1][fi] = true;
                    }
                }
            }
        }
        marks
    }

    /// Glue two copies of the complex along its boundary, producing a closed
    /// complex (the double). Interior vertices are duplicated; cells whose
    /// vertices all lie on the boundary are duplicated as distinct cells over
    /// the same tuple, which is why incidence is explicit.
    pub fn double_cover(&self) -> Result<SimplicialComplex> {
        let n = self.dim();
        if n == 0 {
            return Err(BettiError::Validation("cannot double a 0-dimensional complex".into()));
        }
        for (i, cf) in self.cofaces[n - 1].iter().enumerate() {
            if cf.len() > 2 {
                return Err(BettiError::Validation(format!(
                    "non-manifold input: {} lies in {} top cells",
                    self.skeletons[n - 1][i],
                    cf.len()
                )));
            }
        }
        let marks = self.boundary_marks();
        if marks[n - 1].iter().all(|&m| !m) {
            return Err(BettiError::Validation("input is already closed; nothing to glue".into()));
        }

        // Interior vertices get fresh partner ids above n_points.
        let mut partner = vec![usize::MAX; self.n_points];
        let mut next_id = self.n_points;
        for (v, s) in self.skeletons[0].iter().enumerate() {
            let vid = s.vertices()[0];
            if !marks[0][v] {
                partner[vid] = next_id;
                next_id += 1;
            } else {
                partner[vid] = vid;
            }
        }

        // Cell roster per degree: (orig index, copy), copy 0 = base, 1 = mirror.
        // Boundary-contained cells exist only in copy 0.
        let mut roster: Vec<Vec<(usize, u8)>> = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut cells = Vec::new();
            for j in 0..self.skeleton_size(r) {
                cells.push((j, 0u8));
                if !marks[r][j] {
                    cells.push((j, 1u8));
                }
            }
            roster.push(cells);
        }

        // Tuples of each new cell; mirror copies relabel interior vertices.
        let tuple_of = |r: usize, j: usize, copy: u8| -> Vec<usize> {
            let verts = self.skeletons[r][j].vertices();
            let mut t: Vec<usize> =
                if copy == 0 { verts.to_vec() } else { verts.iter().map(|&v| partner[v]).collect() };
            t.sort_unstable();
            t
        };

        // Deterministic cell order: lexicographic by (tuple, copy).
        let mut order: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
        let mut new_index: Vec<std::collections::HashMap<(usize, u8), usize>> = Vec::with_capacity(n + 1);
        let mut skeletons: Vec<Vec<Simplex>> = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut keyed: Vec<(Vec<usize>, u8, usize)> = roster[r]
                .iter()
                .map(|&(j, copy)| (tuple_of(r, j, copy), copy, j))
                .collect();
            keyed.sort();
            let mut idx_map = std::collections::HashMap::new();
            let mut sk = Vec::with_capacity(keyed.len());
            let mut ord = Vec::with_capacity(keyed.len());
            for (pos, (tuple, copy, j)) in keyed.into_iter().enumerate() {
                idx_map.insert((j, copy), pos);
                sk.push(Simplex::from_sorted(tuple));
                ord.push(j);
            }
            order.push(ord);
            new_index.push(idx_map);
            skeletons.push(sk);
        }
        let _ = order;

        // Face incidence: mirror faces stay mirrored unless they lie on the
        // boundary, where the two copies meet.
        let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
        faces[0] = vec![Vec::new(); skeletons[0].len()];
        for r in 1..=n {
            let mut all = vec![Vec::new(); skeletons[r].len()];
            for (&(j, copy), &pos) in &new_index[r] {
                let verts = self.skeletons[r][j].vertices();
                // position of each original vertex inside the sorted new tuple
                let mapped: Vec<usize> = if copy == 0 {
                    verts.to_vec()
                } else {
                    verts.iter().map(|&v| partner[v]).collect()
                };
                let mut order_idx: Vec<usize> = (0..mapped.len()).collect();
                order_idx.sort_by_key(|&i| mapped[i]);
                // new tuple position i omits original vertex position order_idx[i]
                let mut fs = Vec::with_capacity(verts.len());
                for &orig_pos in &order_idx {
                    let fi = self.faces[r][j][orig_pos];
                    let fcopy = if copy == 1 && !marks[r - 1][fi] { 1u8 } else { 0u8 };
                    fs.push(new_index[r - 1][&(fi, fcopy)]);
                }
                all[pos] = fs;
            }
            faces[r] = all;
        }

        Ok(SimplicialComplex::from_parts(next_id, skeletons, faces, None, self.edge_length))
    }
}

/// Face incidence by tuple lookup; valid for complexes with unique tuples.
fn derive_faces(skeletons: &[Vec<Simplex>]) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::with_capacity(skeletons.len());
    faces.push(vec![Vec::new(); skeletons[0].len()]);
    for r in 1..skeletons.len() {
        let lower = &skeletons[r - 1];
        let mut level = Vec::with_capacity(skeletons[r].len());
        for s in &skeletons[r] {
            let mut fs = Vec::with_capacity(r + 1);
            for face in s.faces() {
                let idx = lower
                    .binary_search_by(|c| c.vertices().cmp(face.vertices()))
                    .map_err(|_| BettiError::Validation(format!("closure missing face {face}")))?;
                fs.push(idx);
            }
            level.push(fs);
        }
        faces.push(level);
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::build_from_simplexes(&[vec![0, 1, 2]], 3).unwrap()
    }

    fn tetra_boundary() -> SimplicialComplex {
        SimplicialComplex::build_from_simplexes(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            4,
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_closure() {
        let k = triangle();
        assert_eq!(k.skeleton_size(0), 3);
        assert_eq!(k.skeleton_size(1), 3);
        assert_eq!(k.skeleton_size(2), 1);
        assert_eq!(
            k.skeleton(1).iter().map(|s| s.vertices().to_vec()).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
    }

    #[test]
    fn tetra_boundary_counts() {
        let k = tetra_boundary();
        assert_eq!((k.skeleton_size(0), k.skeleton_size(1), k.skeleton_size(2)), (4, 6, 4));
        assert_eq!(k.euler_characteristic(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SimplicialComplex::build_from_simplexes(&[vec![0, 1, 2], vec![2, 1, 0]], 3).is_err());
        assert!(SimplicialComplex::build_from_simplexes(&[vec![0, 1, 5]], 3).is_err());
        assert!(SimplicialComplex::build_from_simplexes(&[vec![0, 0, 1]], 3).is_err());
    }

    #[test]
    fn boundary_of_triangle_signs() {
        let k = triangle();
        let b2 = k.boundary_matrix(2).unwrap();
        // d[0,1,2] = [1,2] - [0,2] + [0,1]
        let col: Vec<(usize, i64)> = b2.triplets().map(|(r, _, v)| (r, v)).collect();
        let e01 = k.index_of(1, &[0, 1]).unwrap();
        let e02 = k.index_of(1, &[0, 2]).unwrap();
        let e12 = k.index_of(1, &[1, 2]).unwrap();
        let get = |i: usize| col.iter().find(|&&(r, _)| r == i).unwrap().1;
        assert_eq!(get(e12), 1);
        assert_eq!(get(e02), -1);
        assert_eq!(get(e01), 1);
    }

    #[test]
    fn boundary_squared_zero_tetra() {
        let k = tetra_boundary();
        let b1 = k.boundary_matrix(1).unwrap();
        let b2 = k.boundary_matrix(2).unwrap();
        assert_eq!(b1.matmul(&b2).nnz(), 0);
    }

    #[test]
    fn manifold_check() {
        assert!(tetra_boundary().validate_closed_manifold().is_closed());
        let report = triangle().validate_closed_manifold();
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn incidence_tetra() {
        let k = tetra_boundary();
        let am = k.incidence_matrices();
        // each face adjacent to the 3 others
        for r in 0..4 {
            assert_eq!(am.f[2].row_nnz(r), 3);
        }
        // G_2 rows have 3 ones, columns 2 ones
        assert_eq!(am.g[2].max_row_nnz(), 3);
        assert_eq!(am.g[2].transpose().max_row_nnz(), 2);
    }

    #[test]
    fn two_triangle_fragment_incidence() {
        // two triangles glued along one edge
        let k = SimplicialComplex::build_from_simplexes(&[vec![0, 1, 2], vec![1, 2, 3]], 4).unwrap();
        let am = k.incidence_matrices();
        let t0 = k.index_of(2, &[0, 1, 2]).unwrap();
        let t1 = k.index_of(2, &[1, 2, 3]).unwrap();
        assert_eq!(am.f[2].row(t0).collect::<Vec<_>>(), vec![(t1, 1)]);
        let shared = k.index_of(1, &[1, 2]).unwrap();
        let outer = k.index_of(1, &[0, 1]).unwrap();
        assert!(am.g[2].row(t0).any(|(c, _)| c == shared));
        assert!(am.g[2].row(t1).any(|(c, _)| c == shared));
        assert!(!am.g[2].row(t1).any(|(c, _)| c == outer));
    }

    #[test]
    fn double_cover_triangle_is_pillowcase() {
        let k = triangle();
        let d = k.double_cover().unwrap();
        assert_eq!((d.skeleton_size(0), d.skeleton_size(1), d.skeleton_size(2)), (3, 3, 2));
        assert!(d.validate_closed_manifold().is_closed());
        assert_eq!(d.euler_characteristic(), 2);
        let b1 = d.boundary_matrix(1).unwrap();
        let b2 = d.boundary_matrix(2).unwrap();
        assert_eq!(b1.matmul(&b2).nnz(), 0);
    }

    #[test]
    fn double_cover_square_patch() {
        let k = SimplicialComplex::build_from_simplexes(&[vec![0, 1, 2], vec![1, 2, 3]], 4).unwrap();
        let d = k.double_cover().unwrap();
        assert_eq!(d.skeleton_size(2), 4);
        assert_eq!(d.skeleton_size(1), 6);
        assert_eq!(d.skeleton_size(0), 4);
        assert_eq!(d.euler_characteristic(), 2);
        assert!(d.validate_closed_manifold().is_closed());
    }

    #[test]
    fn double_cover_rejects_nonmanifold() {
        // three triangles around one edge
        let k = SimplicialComplex::build_from_simplexes(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]],
            5,
        )
        .unwrap();
        assert!(k.double_cover().is_err());
    }

    #[test]
    fn closure_idempotent() {
        let k = tetra_boundary();
        let tops: Vec<Vec<usize>> =
            k.skeleton(2).iter().map(|s| s.vertices().to_vec()).collect();
        let k2 = SimplicialComplex::build_from_simplexes(&tops, 4).unwrap();
        for r in 0..=2 {
            assert_eq!(k.skeleton(r), k2.skeleton(r));
        }
    }
}
