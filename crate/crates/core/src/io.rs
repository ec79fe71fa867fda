//! Complex ingestion (JSON, ASCII OFF) and sparse matrix dumps.

use crate::complex::SimplicialComplex;
use crate::error::{BettiError, Result};
use crate::sparse::Csr;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// Canonical JSON fixture format.
#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n_points: usize,
    pub top_simplexes: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_length: Option<f64>,
}

pub fn read_complex_json(path: &Path) -> Result<SimplicialComplex> {
    let text = std::fs::read_to_string(path)?;
    parse_complex_json(&text)
}

pub fn parse_complex_json(text: &str) -> Result<SimplicialComplex> {
    let parsed: ComplexJson = serde_json::from_str(text)
        .map_err(|e| BettiError::Parse(format!("complex JSON at line {}: {}", e.line(), e)))?;
    let mut k = SimplicialComplex::build_from_simplexes(&parsed.top_simplexes, parsed.n_points)?;
    if let Some(coords) = parsed.coords {
        k = k.with_coords(coords)?;
    }
    if let Some(a) = parsed.edge_length {
        k = k.with_edge_length(a)?;
    }
    Ok(k)
}

pub fn write_complex_json(k: &SimplicialComplex, path: &Path) -> Result<()> {
    let top = k
        .skeleton(k.dim())
        .iter()
        .map(|s| s.vertices().to_vec())
        .collect::<Vec<_>>();
    let doc = ComplexJson {
        n_points: k.n_points(),
        top_simplexes: top,
        coords: k.coords().map(|c| c.to_vec()),
        edge_length: Some(k.edge_length()),
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| BettiError::Io(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// ASCII OFF reader for triangle meshes (2-manifolds).
///
/// Format: `OFF` header, `V F E` counts, V coordinate lines, F face lines
/// `3 i j k`. Comment lines start with `#`.
pub fn read_off(path: &Path) -> Result<SimplicialComplex> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut lines = reader.lines().enumerate().filter_map(|(ln, l)| match l {
        Ok(s) => {
            let t = s.trim().to_string();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((ln + 1, t)))
            }
        }
        Err(e) => Some(Err(BettiError::Io(e.to_string()))),
    });
    let mut next = || -> Result<(usize, String)> {
        match lines.next() {
            None => Err(BettiError::Parse("OFF: unexpected end of file".into())),
            Some(r) => r,
        }
    };

    let (ln, header) = next()?;
    let counts_line = if header == "OFF" {
        next()?
    } else if let Some(rest) = header.strip_prefix("OFF") {
        (ln, rest.trim().to_string())
    } else {
        return Err(BettiError::Parse(format!("OFF: line {ln}: missing OFF header")));
    };
    let counts: Vec<usize> = counts_line
        .1
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| BettiError::Parse(format!("OFF: line {}: bad count {t:?}", counts_line.0)))
        })
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(BettiError::Parse(format!(
            "OFF: line {}: expected vertex/face counts",
            counts_line.0
        )));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = next()?;
        let xyz: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| BettiError::Parse(format!("OFF: line {ln}: bad coordinate {t:?}")))
            })
            .collect::<Result<_>>()?;
        if xyz.len() < 3 {
            return Err(BettiError::Parse(format!("OFF: line {ln}: expected 3 coordinates")));
        }
        coords.push(xyz[..3].to_vec());
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, line) = next()?;
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| BettiError::Parse(format!("OFF: line {ln}: bad face index {t:?}")))
            })
            .collect::<Result<_>>()?;
        if nums.is_empty() || nums[0] + 1 != nums.len() {
            return Err(BettiError::Parse(format!("OFF: line {ln}: malformed face line")));
        }
        if nums[0] != 3 {
            return Err(BettiError::Parse(format!(
                "OFF: line {ln}: only triangle faces are supported, got {}-gon",
                nums[0]
            )));
        }
        faces.push(nums[1..].to_vec());
    }

    SimplicialComplex::build_from_simplexes(&faces, nv)?.with_coords(coords)
}

/// Sparse triplet dump: header `rows cols nnz`, then `row col value` lines.
pub fn write_triplets(m: &Csr<f64>, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (r, c, v) in m.triplets() {
        writeln!(out, "{r} {c} {v:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let k = crate::generate::Shape::SphereTetra.generate().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tetra.json");
        write_complex_json(&k, &path).unwrap();
        let k2 = read_complex_json(&path).unwrap();
        for r in 0..=2 {
            assert_eq!(k.skeleton(r), k2.skeleton(r));
        }
    }

    #[test]
    fn json_parse_error_reports_line() {
        let err = parse_complex_json("{\n  \"n_points\": }").unwrap_err();
        assert!(matches!(err, BettiError::Parse(_)));
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn off_reader_tetra() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tetra.off");
        std::fs::write(
            &path,
            "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n",
        )
        .unwrap();
        let k = read_off(&path).unwrap();
        assert_eq!(k.skeleton_size(1), 6);
        assert!(k.coords().is_some());
        assert!(k.validate_closed_manifold().is_closed());
    }

    #[test]
    fn off_reader_rejects_quads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("quad.off");
        std::fs::write(&path, "OFF\n4 1 4\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n").unwrap();
        assert!(read_off(&path).is_err());
    }

    #[test]
    fn triplet_dump() {
        let m = Csr::from_triplets(2, 2, &[(0, 1, 1.5), (1, 0, -2.0)]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        write_triplets(&m, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2 2 2\n"));
        assert!(text.contains("0 1 1.5"));
    }
}
