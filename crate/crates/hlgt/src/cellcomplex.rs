//! Cubical cell complex of an axis-aligned box in `Z^4`.
//!
//! A positive `k`-cell is a base point together with a strictly increasing
//! set of `k` axes, stored as a bitmask. Axes are numbered `0..4` internally
//! and printed as `1..=4`. Oriented cells carry an extra sign. Chains are
//! sparse integer combinations of positive cells with `q[-c] = -q[c]`.
//!
//! The box keeps dense slot indices for vertices, edges and plaquettes:
//! vertex `v` has linear index with axis 0 most significant, edge slot
//! `4 v + axis`, plaquette slot `6 v + pair` with pairs ordered as
//! [`PAIRS`]. Slot order coincides with the canonical cell order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use arrayvec::ArrayVec;

use crate::error::{Error, Result};

/// Lattice dimension.
pub const DIM: usize = 4;

/// A point of `Z^4`.
pub type Point = [i32; DIM];

/// Axis pairs of the six plaquette directions, in lexicographic order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the axis pair `(a, b)` with `a < b` in [`PAIRS`].
pub fn pair_index(a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < DIM);
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}

/// Unit vector along `axis` added to `p` with multiplicity `by`.
pub fn shift(mut p: Point, axis: usize, by: i32) -> Point {
    p[axis] += by;
    p
}

/// A positively oriented cell: base point and axis bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub base: Point,
    pub mask: u8,
}

impl Cell {
    /// Cell from a base point and an axis bitmask.
    pub fn from_mask(base: Point, mask: u8) -> Self {
        debug_assert!(mask < 16);
        Self { base, mask }
    }

    /// The vertex at `base`.
    pub fn vertex(base: Point) -> Self {
        Self { base, mask: 0 }
    }

    /// The edge from `base` to `base + e_axis`.
    pub fn edge(base: Point, axis: usize) -> Self {
        Self { base, mask: 1 << axis }
    }

    /// The plaquette spanned by axes `a` and `b` at `base`.
    pub fn plaquette(base: Point, a: usize, b: usize) -> Self {
        Self { base, mask: (1 << a) | (1 << b) }
    }

    /// Dimension `k` of the cell.
    pub fn dim(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Whether `axis` is one of the spanning axes.
    pub fn has_axis(&self, axis: usize) -> bool {
        self.mask & (1 << axis) != 0
    }

    /// Spanning axes in increasing order.
    pub fn axes(&self) -> impl Iterator<Item = usize> + Clone {
        let mask = self.mask;
        (0..DIM).filter(move |j| mask & (1 << j) != 0)
    }

    /// Spanning axes as a vector.
    pub fn axis_vec(&self) -> Vec<usize> {
        self.axes().collect()
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .cmp(&other.base)
            .then_with(|| self.axes().cmp(other.axes()))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.base;
        write!(f, "{} {},{},{},{} ", self.dim(), b[0], b[1], b[2], b[3])?;
        if self.mask == 0 {
            write!(f, "-")
        } else {
            for j in self.axes() {
                write!(f, "{}", j + 1)?;
            }
            Ok(())
        }
    }
}

/// A cell together with an orientation sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedCell {
    pub cell: Cell,
    pub sign: i8,
}

impl OrientedCell {
    /// Positively oriented copy of `cell`.
    pub fn positive(cell: Cell) -> Self {
        Self { cell, sign: 1 }
    }

    /// Oriented copy of `cell` with the given sign.
    pub fn with_sign(cell: Cell, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { cell, sign }
    }

    /// Builds an oriented cell from an arbitrary axis list, normalizing the
    /// list to increasing order and multiplying the sign by the permutation
    /// sign.
    pub fn from_axes(base: Point, axes: &[usize], sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidCell(format!("sign {sign} is not +1 or -1")));
        }
        let mut mask = 0u8;
        for &a in axes {
            if a >= DIM {
                return Err(Error::InvalidCell(format!("axis {a} out of range")));
            }
            if mask & (1 << a) != 0 {
                return Err(Error::InvalidCell(format!("repeated axis {a}")));
            }
            mask |= 1 << a;
        }
        let mut inversions = 0usize;
        for i in 0..axes.len() {
            for j in i + 1..axes.len() {
                if axes[i] > axes[j] {
                    inversions += 1;
                }
            }
        }
        let parity = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Ok(Self { cell: Cell { base, mask }, sign: sign * parity })
    }

    /// The same cell with opposite orientation.
    pub fn negate(self) -> Self {
        Self { cell: self.cell, sign: -self.sign }
    }

    /// Dimension of the cell.
    pub fn dim(&self) -> usize {
        self.cell.dim()
    }
}

/// Boundary of an oriented cell, following the alternating-sign formula.
pub fn boundary(c: OrientedCell) -> Result<Chain> {
    let k = c.dim();
    if k == 0 {
        return Err(Error::InvalidCell("boundary of a 0-cell".into()));
    }
    let mut out = Chain::zero(k - 1);
    for (pos, axis) in c.cell.axes().enumerate() {
        let face_mask = c.cell.mask & !(1 << axis);
        let s = if (pos + 1) % 2 == 0 { 1 } else { -1 };
        let s = s * c.sign as i64;
        out.add_cell(Cell::from_mask(c.cell.base, face_mask), s);
        out.add_cell(Cell::from_mask(shift(c.cell.base, axis, 1), face_mask), -s);
    }
    Ok(out)
}

/// Boundary of a chain.
pub fn boundary_chain(q: &Chain) -> Result<Chain> {
    if q.k == 0 {
        return Err(Error::InvalidCell("boundary of a 0-chain".into()));
    }
    let mut out = Chain::zero(q.k - 1);
    for (cell, a) in q.iter() {
        for (face, b) in boundary(OrientedCell::positive(*cell))?.iter() {
            out.add_cell(*face, a * b);
        }
    }
    Ok(out)
}

/// A finite integer combination of positively oriented `k`-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    k: usize,
    coeffs: BTreeMap<Cell, i64>,
}

impl Chain {
    /// The empty `k`-chain.
    pub fn zero(k: usize) -> Self {
        Self { k, coeffs: BTreeMap::new() }
    }

    /// The chain `1 * c`.
    pub fn from_cell(c: OrientedCell) -> Self {
        let mut q = Self::zero(c.dim());
        q.add_cell(c.cell, c.sign as i64);
        q
    }

    /// Chain from `(positive cell, coefficient)` pairs; all cells must have
    /// dimension `k`.
    pub fn from_terms(k: usize, terms: impl IntoIterator<Item = (OrientedCell, i64)>) -> Result<Self> {
        let mut q = Self::zero(k);
        for (c, a) in terms {
            if c.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: c.dim() });
            }
            q.add_cell(c.cell, a * c.sign as i64);
        }
        Ok(q)
    }

    /// Dimension of the chain.
    pub fn dim(&self) -> usize {
        self.k
    }

    /// Adds `a` to the coefficient of the positive cell `cell`.
    pub fn add_cell(&mut self, cell: Cell, a: i64) {
        debug_assert_eq!(cell.dim(), self.k);
        if a == 0 {
            return;
        }
        let entry = self.coeffs.entry(cell).or_insert(0);
        *entry += a;
        if *entry == 0 {
            self.coeffs.remove(&cell);
        }
    }

    /// Adds `a` times an oriented cell.
    pub fn add_oriented(&mut self, c: OrientedCell, a: i64) {
        self.add_cell(c.cell, a * c.sign as i64);
    }

    /// Coefficient of an oriented cell, with `q[-c] = -q[c]`.
    pub fn coeff(&self, c: OrientedCell) -> i64 {
        self.coeffs.get(&c.cell).copied().unwrap_or(0) * c.sign as i64
    }

    /// Coefficient of a positive cell.
    pub fn coeff_of(&self, cell: &Cell) -> i64 {
        self.coeffs.get(cell).copied().unwrap_or(0)
    }

    /// Iterates `(positive cell, coefficient)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Cell, i64)> {
        self.coeffs.iter().map(|(c, a)| (c, *a))
    }

    /// Positive cells with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &Cell> {
        self.coeffs.keys()
    }

    /// Number of positive cells in the support.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Whether the chain is the zero chain.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Chain) -> Result<Chain> {
        if self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: other.k });
        }
        let mut out = self.clone();
        for (c, a) in other.iter() {
            out.add_cell(*c, a);
        }
        Ok(out)
    }

    /// Coefficientwise difference.
    pub fn sub(&self, other: &Chain) -> Result<Chain> {
        self.add(&other.negate())
    }

    /// The chain `-q`.
    pub fn negate(&self) -> Chain {
        self.scale(-1)
    }

    /// The chain `a q`.
    pub fn scale(&self, a: i64) -> Chain {
        let mut out = Chain::zero(self.k);
        for (c, b) in self.iter() {
            out.add_cell(*c, a * b);
        }
        out
    }

    /// Restriction to a symmetric cell set given by its positive members.
    pub fn restrict(&self, keep: impl Fn(&Cell) -> bool) -> Chain {
        Chain {
            k: self.k,
            coeffs: self.coeffs.iter().filter(|(c, _)| keep(c)).map(|(c, a)| (*c, *a)).collect(),
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> i64 {
        self.coeffs.values().map(|a| a.abs()).max().unwrap_or(0)
    }
}

/// An axis-aligned box `[lo, hi]` of `Z^4`, possibly degenerate along some
/// axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    lo: Point,
    hi: Point,
    dims: [usize; DIM],
    strides: [usize; DIM],
    num_vertices: usize,
}

impl LatticeBox {
    /// The box with corners `lo` and `hi`; requires `lo <= hi` coordinatewise.
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        let mut dims = [0usize; DIM];
        for j in 0..DIM {
            if hi[j] < lo[j] {
                return Err(Error::InvalidParameter(format!("box corner hi[{j}] < lo[{j}]")));
            }
            dims[j] = (hi[j] - lo[j]) as usize + 1;
        }
        let mut strides = [1usize; DIM];
        for j in (0..DIM - 1).rev() {
            strides[j] = strides[j + 1] * dims[j + 1];
        }
        let num_vertices = dims.iter().product();
        Ok(Self { lo, hi, dims, strides, num_vertices })
    }

    /// The box `B_N = [-N, N]^4`.
    pub fn centered(half_width: u32) -> Self {
        let n = half_width as i32;
        Self::new([-n; DIM], [n; DIM]).expect("centered box is well formed")
    }

    /// Unit 3-cube times a point: 8 vertices, 12 edges, 6 plaquettes.
    pub fn unit_cube3() -> Self {
        Self::new([0; DIM], [1, 1, 1, 0]).expect("unit cube is well formed")
    }

    /// Unit square: 4 vertices, 4 edges, 1 plaquette.
    pub fn unit_square() -> Self {
        Self::new([0; DIM], [1, 1, 0, 0]).expect("unit square is well formed")
    }

    /// Lower corner.
    pub fn lo(&self) -> Point {
        self.lo
    }

    /// Upper corner.
    pub fn hi(&self) -> Point {
        self.hi
    }

    /// Number of lattice points along each axis.
    pub fn dims(&self) -> [usize; DIM] {
        self.dims
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Whether a point lies in the box.
    pub fn contains_point(&self, p: &Point) -> bool {
        (0..DIM).all(|j| p[j] >= self.lo[j] && p[j] <= self.hi[j])
    }

    /// Whether every corner of the cell lies in the box.
    pub fn contains(&self, c: &Cell) -> bool {
        (0..DIM).all(|j| {
            let top = if c.has_axis(j) { c.base[j] + 1 } else { c.base[j] };
            c.base[j] >= self.lo[j] && top <= self.hi[j]
        })
    }

    /// Linear index of a vertex.
    pub fn vertex_index(&self, p: &Point) -> Option<usize> {
        if !self.contains_point(p) {
            return None;
        }
        Some((0..DIM).map(|j| (p[j] - self.lo[j]) as usize * self.strides[j]).sum())
    }

    /// Point with the given linear index.
    pub fn vertex_point(&self, mut idx: usize) -> Point {
        let mut p = [0i32; DIM];
        for ((x, lo), stride) in p.iter_mut().zip(self.lo).zip(self.strides) {
            *x = lo + (idx / stride) as i32;
            idx %= stride;
        }
        p
    }

    /// Stride of the linear vertex index along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Number of edge slots (valid or not).
    pub fn num_edge_slots(&self) -> usize {
        self.num_vertices * DIM
    }

    /// Number of plaquette slots (valid or not).
    pub fn num_plaquette_slots(&self) -> usize {
        self.num_vertices * PAIRS.len()
    }

    /// Dense slot of an edge of the box.
    pub fn edge_slot(&self, c: &Cell) -> Option<usize> {
        if c.dim() != 1 || !self.contains(c) {
            return None;
        }
        let axis = c.mask.trailing_zeros() as usize;
        Some(self.vertex_index(&c.base)? * DIM + axis)
    }

    /// Edge stored in a slot, if the slot is valid.
    pub fn edge_cell(&self, slot: usize) -> Option<Cell> {
        let v = slot / DIM;
        if v >= self.num_vertices {
            return None;
        }
        let c = Cell::edge(self.vertex_point(v), slot % DIM);
        self.contains(&c).then_some(c)
    }

    /// Whether an edge slot holds an edge of the box.
    pub fn edge_slot_valid(&self, slot: usize) -> bool {
        let v = slot / DIM;
        let axis = slot % DIM;
        v < self.num_vertices && (v / self.strides[axis]) % self.dims[axis] + 1 < self.dims[axis]
    }

    /// Dense slot of a plaquette of the box.
    pub fn plaquette_slot(&self, c: &Cell) -> Option<usize> {
        if c.dim() != 2 || !self.contains(c) {
            return None;
        }
        let mut axes = c.axes();
        let a = axes.next()?;
        let b = axes.next()?;
        Some(self.vertex_index(&c.base)? * PAIRS.len() + pair_index(a, b))
    }

    /// Plaquette stored in a slot, if the slot is valid.
    pub fn plaquette_cell(&self, slot: usize) -> Option<Cell> {
        let v = slot / PAIRS.len();
        if v >= self.num_vertices {
            return None;
        }
        let (a, b) = PAIRS[slot % PAIRS.len()];
        let c = Cell::plaquette(self.vertex_point(v), a, b);
        self.contains(&c).then_some(c)
    }

    fn coord_open(&self, v: usize, axis: usize) -> bool {
        (v / self.strides[axis]) % self.dims[axis] + 1 < self.dims[axis]
    }

    fn coord_positive(&self, v: usize, axis: usize) -> bool {
        !(v / self.strides[axis]).is_multiple_of(self.dims[axis])
    }

    /// Whether a plaquette slot holds a plaquette of the box.
    pub fn plaquette_slot_valid(&self, slot: usize) -> bool {
        let v = slot / PAIRS.len();
        let (a, b) = PAIRS[slot % PAIRS.len()];
        v < self.num_vertices && self.coord_open(v, a) && self.coord_open(v, b)
    }

    /// Valid edge slots in canonical order.
    pub fn edge_slots(&self) -> Vec<usize> {
        (0..self.num_edge_slots()).filter(|&s| self.edge_slot_valid(s)).collect()
    }

    /// Valid plaquette slots in canonical order.
    pub fn plaquette_slots(&self) -> Vec<usize> {
        (0..self.num_plaquette_slots()).filter(|&s| self.plaquette_slot_valid(s)).collect()
    }

    /// Plaquettes of the box containing edge `slot`, with the coefficient of
    /// the edge in the plaquette's boundary. Equals the coboundary of the
    /// edge.
    pub fn edge_plaquettes(&self, slot: usize) -> ArrayVec<(usize, i8), 6> {
        let v = slot / DIM;
        let j = slot % DIM;
        let mut out = ArrayVec::new();
        for k in 0..DIM {
            if k == j {
                continue;
            }
            let (a, b) = if j < k { (j, k) } else { (k, j) };
            let pair = pair_index(a, b);
            let up = if j < k { 1 } else { -1 };
            if self.coord_open(v, k) {
                out.push((v * 6 + pair, up));
            }
            if self.coord_positive(v, k) {
                out.push(((v - self.strides[k]) * 6 + pair, -up));
            }
        }
        out
    }

    /// The four edges of plaquette `slot` with their boundary coefficients.
    pub fn plaquette_edges(&self, slot: usize) -> [(usize, i8); 4] {
        let v = slot / 6;
        let (a, b) = PAIRS[slot % 6];
        [
            (v * DIM + a, 1),
            ((v + self.strides[a]) * DIM + b, 1),
            ((v + self.strides[b]) * DIM + a, -1),
            (v * DIM + b, -1),
        ]
    }

    /// Edges of the box incident to vertex `v`, with `+1` when `v` is the
    /// head of the edge and `-1` when it is the tail.
    pub fn vertex_edges(&self, v: usize) -> ArrayVec<(usize, i8), 8> {
        let mut out = ArrayVec::new();
        for j in 0..DIM {
            if self.coord_open(v, j) {
                out.push((v * DIM + j, -1));
            }
            if self.coord_positive(v, j) {
                out.push(((v - self.strides[j]) * DIM + j, 1));
            }
        }
        out
    }

    /// Neighbouring vertices of `v` in the box.
    pub fn vertex_neighbors(&self, v: usize) -> ArrayVec<usize, 8> {
        let mut out = ArrayVec::new();
        for j in 0..DIM {
            if self.coord_open(v, j) {
                out.push(v + self.strides[j]);
            }
            if self.coord_positive(v, j) {
                out.push(v - self.strides[j]);
            }
        }
        out
    }

    /// Tail and head vertex indices of edge `slot`.
    pub fn edge_endpoints(&self, slot: usize) -> (usize, usize) {
        let v = slot / DIM;
        (v, v + self.strides[slot % DIM])
    }

    /// All positive `k`-cells of the box, ordered by base point then axes.
    pub fn enumerate_cells(&self, k: usize) -> Vec<Cell> {
        let masks = masks_of_dim(k);
        let mut out = Vec::new();
        for v in 0..self.num_vertices {
            let base = self.vertex_point(v);
            for &m in &masks {
                let c = Cell::from_mask(base, m);
                if self.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Number of positive `k`-cells, by the product formula.
    pub fn cell_count(&self, k: usize) -> usize {
        masks_of_dim(k)
            .into_iter()
            .map(|m| {
                (0..DIM)
                    .map(|j| if m & (1 << j) != 0 { self.dims[j] - 1 } else { self.dims[j] })
                    .product::<usize>()
            })
            .sum()
    }

    /// Coboundary of an oriented cell: the `(k+1)`-cells of the box having
    /// it as a face, with coefficient `boundary(c')[c]`.
    pub fn coboundary(&self, c: OrientedCell) -> Result<Chain> {
        let k = c.dim();
        if k >= DIM {
            return Err(Error::InvalidCell("coboundary of a 4-cell".into()));
        }
        let mut out = Chain::zero(k + 1);
        for j in (0..DIM).filter(|&j| !c.cell.has_axis(j)) {
            let mask = c.cell.mask | (1 << j);
            for base in [c.cell.base, shift(c.cell.base, j, -1)] {
                let up = Cell::from_mask(base, mask);
                if self.contains(&up) {
                    let a = boundary(OrientedCell::positive(up))?.coeff(c);
                    out.add_cell(up, a);
                }
            }
        }
        Ok(out)
    }

    /// Whether the closed cell lies in the topological boundary of the box.
    pub fn is_boundary_cell(&self, c: &Cell) -> bool {
        (0..DIM).any(|j| !c.has_axis(j) && (c.base[j] == self.lo[j] || c.base[j] == self.hi[j]))
    }

    /// Whether every plaquette containing the edge is a plaquette of the box
    /// and none of them is a boundary plaquette.
    pub fn edge_is_interior(&self, slot: usize) -> bool {
        let Some(e) = self.edge_cell(slot) else { return false };
        let plaquettes = self.edge_plaquettes(slot);
        plaquettes.len() == 6
            && plaquettes
                .iter()
                .all(|&(p, _)| !self.is_boundary_cell(&self.plaquette_cell(p).expect("valid plaquette")))
            && !self.is_boundary_cell(&e)
    }
}

/// Axis bitmasks with `k` bits set, in lexicographic order of the axis lists.
pub fn masks_of_dim(k: usize) -> Vec<u8> {
    let mut masks: Vec<u8> = (0u8..16).filter(|m| m.count_ones() as usize == k).collect();
    masks.sort_by(|a, b| {
        let ia = (0..DIM).filter(|j| a & (1 << j) != 0);
        let ib = (0..DIM).filter(|j| b & (1 << j) != 0);
        ia.cmp(ib)
    });
    masks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts_small_boxes() {
        let b = LatticeBox::centered(1);
        assert_eq!(b.enumerate_cells(0).len(), 81);
        assert_eq!(b.enumerate_cells(1).len(), 216);
        assert_eq!(b.enumerate_cells(2).len(), 216);
        let cube = LatticeBox::unit_cube3();
        assert_eq!(cube.cell_count(0), 8);
        assert_eq!(cube.cell_count(1), 12);
        assert_eq!(cube.cell_count(2), 6);
        assert_eq!(cube.cell_count(3), 1);
    }

    #[test]
    fn edge_boundary_is_head_minus_tail() {
        let a = [1, 2, 3, 4];
        let q = boundary(OrientedCell::positive(Cell::edge(a, 0))).unwrap();
        assert_eq!(q.coeff_of(&Cell::vertex([2, 2, 3, 4])), 1);
        assert_eq!(q.coeff_of(&Cell::vertex(a)), -1);
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn zero_cell_boundary_rejected() {
        assert!(boundary(OrientedCell::positive(Cell::vertex([0; 4]))).is_err());
    }

    #[test]
    fn canonicalization_applies_permutation_sign() {
        let c = OrientedCell::from_axes([0; 4], &[2, 0], 1).unwrap();
        assert_eq!(c.cell, Cell::plaquette([0; 4], 0, 2));
        assert_eq!(c.sign, -1);
        assert!(OrientedCell::from_axes([0; 4], &[1, 1], 1).is_err());
        assert_eq!(c.negate().negate(), c);
    }

    #[test]
    fn boundary_cell_examples() {
        let b = LatticeBox::centered(3);
        assert!(b.is_boundary_cell(&Cell::vertex([3, 0, 0, 0])));
        assert!(!b.is_boundary_cell(&Cell::edge([0; 4], 0)));
        assert!(b.is_boundary_cell(&Cell::plaquette([2, 3, 0, 0], 0, 2)));
    }

    #[test]
    fn interior_edge_has_six_plaquettes() {
        let b = LatticeBox::centered(3);
        let s = b.edge_slot(&Cell::edge([0; 4], 0)).unwrap();
        assert_eq!(b.edge_plaquettes(s).len(), 6);
        assert!(b.edge_is_interior(s));
        let corner = b.edge_slot(&Cell::edge([-3, -3, -3, -3], 0)).unwrap();
        assert!(b.edge_plaquettes(corner).len() < 6);
    }

    #[test]
    fn slot_roundtrip() {
        let b = LatticeBox::new([-1, 0, 2, -2], [1, 2, 3, 0]).unwrap();
        for s in b.edge_slots() {
            assert_eq!(b.edge_slot(&b.edge_cell(s).unwrap()), Some(s));
        }
        for s in b.plaquette_slots() {
            assert_eq!(b.plaquette_slot(&b.plaquette_cell(s).unwrap()), Some(s));
        }
        assert_eq!(b.edge_slots().len(), b.cell_count(1));
        assert_eq!(b.plaquette_slots().len(), b.cell_count(2));
    }

    #[test]
    fn restrict_examples() {
        let q = boundary(OrientedCell::positive(Cell::plaquette([0; 4], 0, 1))).unwrap();
        assert_eq!(q.restrict(|c| q.coeff_of(c) != 0), q);
        assert!(q.restrict(|_| false).is_empty());
        assert!(q.add(&q.negate()).unwrap().is_empty());
        assert!(q.add(&Chain::zero(2)).is_err());
    }
}
