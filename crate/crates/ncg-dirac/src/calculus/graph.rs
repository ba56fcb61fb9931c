//! Graph backend: Ω¹ spanned by arrows of a bidirected graph.
//!
//! Basis conventions (all sorted lexicographically by vertex indices in the
//! order the vertices were given):
//!   Ω¹        ω_{x→y}                arrows (x, y)
//!   Ω¹⊗Ω¹     ω_{x→w→y}              two-steps (x, w, y)
//!   Ω¹⊗Ω¹⊗Ω¹  ω_{x→w→z→y}            three-steps (x, w, z, y)
//!
//! Module actions are diagonal: `a·ω_{x→y} = a(x)ω_{x→y}`,
//! `ω_{x→y}·a = a(y)ω_{x→y}`; `(ω_{x→y})* = −ω_{y→x}`.

use std::collections::BTreeMap;

use crate::check::{Error, Result};
use crate::linalg::{cr, CMat};

#[derive(Debug, Clone)]
pub struct GraphData {
    pub vertices: Vec<String>,
    pub arrows: Vec<(usize, usize)>,
    pub arrow_idx: BTreeMap<(usize, usize), usize>,
    pub two_steps: Vec<(usize, usize, usize)>,
    pub two_step_idx: BTreeMap<(usize, usize, usize), usize>,
    pub three_steps: Vec<(usize, usize, usize, usize)>,
    pub three_step_idx: BTreeMap<(usize, usize, usize, usize), usize>,
    /// Ω²_{x,y}: two-step indices grouped by endpoints, ordered by the
    /// intermediate vertex.
    pub endpoint_groups: BTreeMap<(usize, usize), Vec<usize>>,
}

impl GraphData {
    pub fn new(vertices: Vec<String>, mut arrows: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::InvalidModel("vertex set must be nonempty".into()));
        }
        {
            let mut sorted = vertices.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::InvalidModel("duplicate vertex labels".into()));
            }
        }
        arrows.sort();
        arrows.dedup();
        for &(x, y) in &arrows {
            if x >= n || y >= n {
                return Err(Error::InvalidModel("arrow endpoint out of range".into()));
            }
            if x == y {
                return Err(Error::InvalidModel(format!(
                    "self-loop at vertex '{}'",
                    vertices[x]
                )));
            }
        }
        for &(x, y) in &arrows {
            if !arrows.binary_search(&(y, x)).is_ok() {
                return Err(Error::InvalidModel(format!(
                    "arrow {}→{} has no reverse arrow",
                    vertices[x], vertices[y]
                )));
            }
        }
        let arrow_idx: BTreeMap<_, _> = arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut two_steps = Vec::new();
        for &(x, w) in &arrows {
            for &(w2, y) in &arrows {
                if w2 == w {
                    two_steps.push((x, w, y));
                }
            }
        }
        two_steps.sort();
        let two_step_idx: BTreeMap<_, _> = two_steps.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut three_steps = Vec::new();
        for &(x, w, z) in &two_steps {
            for &(z2, y) in &arrows {
                if z2 == z {
                    three_steps.push((x, w, z, y));
                }
            }
        }
        three_steps.sort();
        let three_step_idx: BTreeMap<_, _> =
            three_steps.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut endpoint_groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, &(x, _, y)) in two_steps.iter().enumerate() {
            endpoint_groups.entry((x, y)).or_default().push(i);
        }
        // within each group, two-steps are already ordered by intermediate
        // vertex because the full list is sorted lexicographically
        Ok(GraphData {
            vertices,
            arrows,
            arrow_idx,
            two_steps,
            two_step_idx,
            three_steps,
            three_step_idx,
            endpoint_groups,
        })
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn arrow_index(&self, x: usize, y: usize) -> Option<usize> {
        self.arrow_idx.get(&(x, y)).copied()
    }

    pub fn reverse_arrow(&self, a: usize) -> usize {
        let (x, y) = self.arrows[a];
        self.arrow_idx[&(y, x)]
    }

    /// Assemble a full σ matrix on Ω¹⊗Ω¹ out of per-endpoint-pair blocks
    /// σ_{x,y} (rows/columns ordered by intermediate vertex). Pairs missing
    /// from `blocks` act as the identity.
    pub fn sigma_from_blocks(&self, blocks: &BTreeMap<(usize, usize), CMat>) -> Result<CMat> {
        let dim = self.two_steps.len();
        let mut sigma = CMat::identity(dim, dim);
        for (&(x, y), block) in blocks {
            let group = self.endpoint_groups.get(&(x, y)).ok_or_else(|| {
                Error::InvalidModel(format!(
                    "no two-steps with endpoints ({}, {})",
                    self.vertices[x], self.vertices[y]
                ))
            })?;
            let d = group.len();
            if block.nrows() != d || block.ncols() != d {
                return Err(Error::Dimension(format!(
                    "sigma block for ({}, {}) must be {d}×{d}",
                    self.vertices[x], self.vertices[y]
                )));
            }
            for (bi, &row_ts) in group.iter().enumerate() {
                for (bj, &col_ts) in group.iter().enumerate() {
                    sigma[(row_ts, col_ts)] = block[(bi, bj)];
                }
            }
        }
        Ok(sigma)
    }

    /// Extract the σ_{x,y} block of a full σ matrix.
    pub fn sigma_block(&self, sigma: &CMat, x: usize, y: usize) -> Option<CMat> {
        let group = self.endpoint_groups.get(&(x, y))?;
        let d = group.len();
        let mut block = CMat::zeros(d, d);
        for (bi, &row_ts) in group.iter().enumerate() {
            for (bj, &col_ts) in group.iter().enumerate() {
                block[(bi, bj)] = sigma[(row_ts, col_ts)];
            }
        }
        Some(block)
    }

    /// Entry σ_{x,w}^{ z}{}_y: coefficient of ω_{x→z→w} in σ(ω_{x→y→w}).
    pub fn sigma_entry(&self, sigma: &CMat, x: usize, w: usize, z: usize, y: usize) -> crate::linalg::C64 {
        match (self.two_step_idx.get(&(x, z, w)), self.two_step_idx.get(&(x, y, w))) {
            (Some(&row), Some(&col)) => sigma[(row, col)],
            _ => cr(0.0),
        }
    }
}
