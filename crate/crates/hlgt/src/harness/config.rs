//! Experiment configuration: a TOML file with one table per experiment,
//! path geometry and command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cellcomplex::{Cell, Chain, LatticeBox, OrientedCell};
use crate::error::{Error, Result};
use crate::gibbs::{beta_serde, Params};
use crate::mc::McConfig;

/// The experiment recipes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    MainTheorem,
    Ratio,
    ShortLine,
    UpperBound,
    ClusterEvents,
}

/// The ratio geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    /// A U of width `l1` and height `l2` inside a `l1 x 2 l2` rectangle.
    MarcuFredenhagen,
    /// A U of width `l1` and height `l2` closed by its top side.
    Gliozzi,
    /// A `l1 x l2` rectangle with a gap of `gap` edges in its top side.
    AlmostClosed,
}

/// A path in the plane of the first two axes, centred at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathSpec {
    /// The boundary of an `l1 x l2` rectangle traversed counter-clockwise
    /// from its lower-left corner; `open` drops the left side.
    Rectangle { l1: usize, l2: usize, open: bool },
    /// A straight line of `len` edges along the first axis.
    Straight { len: usize },
    /// Explicit oriented edges `(base point, axis, coefficient)`.
    Edges { edges: Vec<([i32; 4], usize, i64)> },
}

impl PathSpec {
    /// The oriented vertex sequence of a rectangle's boundary.
    fn rectangle_steps(l1: usize, l2: usize) -> Vec<([i32; 4], usize, i64)> {
        let (x0, y0) = (-(l1 as i32) / 2, -(l2 as i32) / 2);
        let (x1, y1) = (x0 + l1 as i32, y0 + l2 as i32);
        let mut out = Vec::new();
        for x in x0..x1 {
            out.push(([x, y0, 0, 0], 0, 1));
        }
        for y in y0..y1 {
            out.push(([x1, y, 0, 0], 1, 1));
        }
        for x in (x0..x1).rev() {
            out.push(([x, y1, 0, 0], 0, -1));
        }
        for y in (y0..y1).rev() {
            out.push(([x0, y, 0, 0], 1, -1));
        }
        out
    }

    /// Oriented edges in path order.
    pub fn steps(&self) -> Result<Vec<([i32; 4], usize, i64)>> {
        match self {
            PathSpec::Rectangle { l1, l2, open } => {
                if *l1 == 0 || *l2 == 0 {
                    return Err(Error::InvalidParameter("rectangle sides must be positive".into()));
                }
                let mut s = Self::rectangle_steps(*l1, *l2);
                if *open {
                    s.truncate(2 * l1 + l2);
                }
                Ok(s)
            }
            PathSpec::Straight { len } => {
                let x0 = -(*len as i32) / 2;
                Ok((0..*len as i32).map(|i| ([x0 + i, 0, 0, 0], 0, 1)).collect())
            }
            PathSpec::Edges { edges } => {
                if edges.iter().any(|&(_, axis, a)| axis >= 4 || a.abs() != 1) {
                    return Err(Error::InvalidParameter("edges need an axis below 4 and coefficient +-1".into()));
                }
                Ok(edges.clone())
            }
        }
    }

    /// The path as a chain, checked to lie in the box.
    pub fn chain(&self, lattice: &LatticeBox) -> Result<Chain> {
        chain_of(&self.steps()?, lattice)
    }

    /// Rectangle side lengths, when the path is a rectangle.
    pub fn sides(&self) -> Option<(usize, usize)> {
        match self {
            PathSpec::Rectangle { l1, l2, .. } => Some((*l1, *l2)),
            _ => None,
        }
    }
}

/// Builds a chain from oriented steps.
pub fn chain_of(steps: &[([i32; 4], usize, i64)], lattice: &LatticeBox) -> Result<Chain> {
    let mut c = Chain::zero(1);
    for &(base, axis, a) in steps {
        let cell = Cell::edge(base, axis);
        if lattice.edge_slot(&cell).is_none() {
            return Err(Error::InvalidCell(format!("path edge {cell} outside the box")));
        }
        c.add_oriented(OrientedCell::positive(cell), a);
    }
    Ok(c)
}

/// The three paths of a ratio experiment: the loop, the open sub-path and
/// the remainder of the loop.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioPaths {
    pub loop_path: Chain,
    pub sub_path: Chain,
    pub rest: Chain,
}

/// Geometry of a ratio experiment with sides `l1, l2` and `gap` edges
/// removed for the almost closed line.
pub fn ratio_paths(kind: RatioKind, l1: usize, l2: usize, gap: usize, lattice: &LatticeBox) -> Result<RatioPaths> {
    let (h1, h2, start, len) = match kind {
        RatioKind::MarcuFredenhagen => (l1, 2 * l2, l1 + l2, l1 + 2 * l2),
        RatioKind::Gliozzi => (l1, l2, l1 + l2, l1),
        RatioKind::AlmostClosed => {
            if gap == 0 || gap >= l1 {
                return Err(Error::InvalidParameter("gap must lie in 1..l1".into()));
            }
            (l1, l2, l1 + l2 + (l1 - gap) / 2, gap)
        }
    };
    let steps = PathSpec::rectangle_steps(h1, h2);
    let rest: Vec<_> = steps[start..start + len].to_vec();
    let sub: Vec<_> = steps[..start].iter().chain(&steps[start + len..]).copied().collect();
    Ok(RatioPaths {
        loop_path: chain_of(&steps, lattice)?,
        sub_path: chain_of(&sub, lattice)?,
        rest: chain_of(&rest, lattice)?,
    })
}

fn default_n() -> u8 {
    2
}

/// One experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_n")]
    pub n: u8,
    pub half_width: u32,
    /// When set, the box `[0, box_hi]` replaces `B_N`.
    #[serde(default)]
    pub box_hi: Option<[i32; 4]>,
    #[serde(with = "beta_serde")]
    pub beta: f64,
    pub kappa: f64,
    pub path: PathSpec,
    #[serde(default)]
    pub ratio: Option<RatioKind>,
    #[serde(default)]
    pub gap: usize,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// The model parameters.
    pub fn params(&self) -> Result<Params> {
        Params::new(self.n, self.half_width, self.beta, self.kappa)
    }

    /// The box of the experiment.
    pub fn lattice(&self) -> Result<LatticeBox> {
        match self.box_hi {
            Some(hi) => LatticeBox::new([0; 4], hi),
            None => Ok(LatticeBox::centered(self.half_width)),
        }
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> Result<String> {
        let json = serde_json::to_string(self)?;
        let digest = Sha256::digest(json.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Distance from the path to the box boundary along the axes, in
    /// lattice units.
    pub fn boundary_margin(&self) -> Result<i32> {
        let lattice = self.lattice()?;
        let (lo, hi) = (lattice.lo(), lattice.hi());
        let mut margin = i32::MAX;
        for (base, axis, _) in self.path.steps()? {
            for j in 0..4 {
                let top = if j == axis { base[j] + 1 } else { base[j] };
                margin = margin.min(hi[j] - top).min(base[j] - lo[j]);
            }
        }
        Ok(margin)
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sweeps: Option<usize>,
    pub chains: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Applies the overrides.
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.mc.seed = s;
        }
        if let Some(s) = self.sweeps {
            cfg.mc.sweeps = s;
        }
        if let Some(c) = self.chains {
            cfg.mc.chains = c;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
    }
}

/// A configuration file: experiments keyed by id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(flatten)]
    pub experiments: BTreeMap<String, ExperimentConfig>,
}

impl ConfigFile {
    /// Parses TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads and parses a file.
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The built-in desk-scale experiments.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in configuration parses")
    }
}

/// Built-in experiments.
pub const BUILTIN: &str = r#"
[main_theorem]
kind = "main_theorem"
half_width = 12
beta = 1.0
kappa = 1.7
path = { kind = "rectangle", l1 = 8, l2 = 8, open = true }
mc = { sweeps = 256, burnin_frac = 0.2, chains = 2, batches = 16, thinning = 1, seed = 11 }

[ratio_gliozzi]
kind = "ratio"
ratio = "gliozzi"
half_width = 6
beta = 1.0
kappa = 1.7
path = { kind = "rectangle", l1 = 4, l2 = 3, open = false }
mc = { sweeps = 512, burnin_frac = 0.2, chains = 2, batches = 16, thinning = 1, seed = 12 }

[short_line]
kind = "short_line"
half_width = 6
beta = 0.1
kappa = 1.7
path = { kind = "straight", len = 4 }
mc = { sweeps = 512, burnin_frac = 0.2, chains = 2, batches = 16, thinning = 1, seed = 13 }

[upper_bound]
kind = "upper_bound"
half_width = 10
beta = 0.1
kappa = 0.3
path = { kind = "rectangle", l1 = 6, l2 = 6, open = false }
mc = { sweeps = 256, burnin_frac = 0.2, chains = 2, batches = 16, thinning = 1, seed = 14 }

[cluster_events]
kind = "cluster_events"
half_width = 8
beta = 0.7
kappa = 1.8
path = { kind = "straight", len = 4 }
mc = { sweeps = 320, burnin_frac = 0.2, chains = 2, batches = 16, thinning = 4, seed = 15 }
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_rectangle_has_24_edges() {
        let lat = LatticeBox::centered(12);
        let c = PathSpec::Rectangle { l1: 8, l2: 8, open: true }.chain(&lat).unwrap();
        assert_eq!(c.len(), 24);
        let closed = PathSpec::Rectangle { l1: 8, l2: 8, open: false }.chain(&lat).unwrap();
        assert_eq!(crate::cellcomplex::boundary_chain(&closed).unwrap().len(), 0);
    }

    #[test]
    fn builtin_parses_and_hashes() {
        let f = ConfigFile::builtin();
        assert_eq!(f.experiments.len(), 5);
        let m = &f.experiments["main_theorem"];
        assert_eq!(m.boundary_margin().unwrap(), 8);
        assert_eq!(m.hash().unwrap().len(), 64);
    }

    #[test]
    fn ratio_paths_split_the_loop() {
        let lat = LatticeBox::centered(6);
        for kind in [RatioKind::MarcuFredenhagen, RatioKind::Gliozzi, RatioKind::AlmostClosed] {
            let r = ratio_paths(kind, 4, 2, 2, &lat).unwrap();
            let mut sum = r.sub_path.clone();
            for (c, a) in r.rest.iter() {
                sum.add_cell(*c, a);
            }
            assert_eq!(sum, r.loop_path);
        }
    }
}
