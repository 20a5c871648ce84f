//! `Z_n`-valued discrete differential forms on a box.
//!
//! [`Form`] is a sparse map from positive `k`-cells to group elements with
//! `w(-c) = -w(c)`. [`EdgeConfig`] is the dense 1-form used by the samplers,
//! indexed by edge slots of a [`LatticeBox`].

use std::collections::{BTreeMap, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;

use crate::cellcomplex::{boundary_chain, Cell, Chain, LatticeBox, OrientedCell, DIM};
use crate::error::{Error, Result};

/// Default support limit for exhaustive irreducibility searches.
pub const IRREDUCIBLE_LIMIT: usize = 18;

/// `-v` in `Z_n`.
pub fn neg_mod(v: u8, n: u8) -> u8 {
    if v == 0 {
        0
    } else {
        n - v
    }
}

/// Reduces an integer into `0..n`.
pub fn reduce(v: i64, n: u8) -> u8 {
    v.rem_euclid(n as i64) as u8
}

/// A sparse `k`-form with values in `Z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    k: usize,
    n: u8,
    values: BTreeMap<Cell, u8>,
}

impl Form {
    /// The zero `k`-form.
    pub fn zero(k: usize, n: u8) -> Self {
        assert!(n >= 2, "group order must be at least 2");
        Self { k, n, values: BTreeMap::new() }
    }

    /// Form with the given values on positive cells.
    pub fn from_values(k: usize, n: u8, values: impl IntoIterator<Item = (Cell, u8)>) -> Result<Self> {
        let mut f = Self::zero(k, n);
        for (c, v) in values {
            if c.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: c.dim() });
            }
            f.set(c, v);
        }
        Ok(f)
    }

    /// The form `g dx` supported on a single oriented cell.
    pub fn single(c: OrientedCell, g: u8, n: u8) -> Self {
        let mut f = Self::zero(c.dim(), n);
        f.set_oriented(c, g);
        f
    }

    /// Dimension `k`.
    pub fn dim(&self) -> usize {
        self.k
    }

    /// Group order `n`.
    pub fn modulus(&self) -> u8 {
        self.n
    }

    /// Value on an oriented cell.
    pub fn get(&self, c: OrientedCell) -> u8 {
        let v = self.get_cell(&c.cell);
        if c.sign < 0 {
            neg_mod(v, self.n)
        } else {
            v
        }
    }

    /// Value on a positive cell.
    pub fn get_cell(&self, c: &Cell) -> u8 {
        self.values.get(c).copied().unwrap_or(0)
    }

    /// Sets the value on a positive cell (reduced mod `n`).
    pub fn set(&mut self, c: Cell, v: u8) {
        debug_assert_eq!(c.dim(), self.k);
        let v = v % self.n;
        if v == 0 {
            self.values.remove(&c);
        } else {
            self.values.insert(c, v);
        }
    }

    /// Sets the value on an oriented cell.
    pub fn set_oriented(&mut self, c: OrientedCell, v: u8) {
        let v = if c.sign < 0 { neg_mod(v % self.n, self.n) } else { v };
        self.set(c.cell, v);
    }

    /// Adds `v` to the value on a positive cell.
    pub fn add_at(&mut self, c: Cell, v: i64) {
        let cur = self.get_cell(&c) as i64;
        self.set(c, reduce(cur + v, self.n));
    }

    /// Iterates `(positive cell, nonzero value)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Cell, u8)> {
        self.values.iter().map(|(c, v)| (c, *v))
    }

    /// Positive cells with nonzero value.
    pub fn support(&self) -> impl Iterator<Item = &Cell> {
        self.values.keys()
    }

    /// Whether a positive cell is in the support.
    pub fn in_support(&self, c: &Cell) -> bool {
        self.values.contains_key(c)
    }

    /// Number of positive cells in the support (half the oriented support).
    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// Whether the form vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    fn check_compatible(&self, other: &Form) -> Result<()> {
        if self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: other.k });
        }
        if self.n != other.n {
            return Err(Error::InvalidParameter(format!("group orders {} and {} differ", self.n, other.n)));
        }
        Ok(())
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (c, v) in other.iter() {
            out.add_at(*c, v as i64);
        }
        Ok(out)
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    /// Pointwise negation.
    pub fn neg(&self) -> Form {
        Form {
            k: self.k,
            n: self.n,
            values: self.values.iter().map(|(c, v)| (*c, self.n - v)).collect(),
        }
    }

    /// Restriction to a symmetric cell set given by its positive members.
    pub fn restrict(&self, keep: impl Fn(&Cell) -> bool) -> Form {
        Form {
            k: self.k,
            n: self.n,
            values: self.values.iter().filter(|(c, _)| keep(c)).map(|(c, v)| (*c, *v)).collect(),
        }
    }

    /// One line per support cell, `k base axes sign value`, canonical order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (c, v) in self.iter() {
            s.push_str(&format!("{c} 1 {v}\n"));
        }
        s
    }

    /// Parses the format written by [`Form::to_text`]; negative signs are
    /// folded into the stored value.
    pub fn from_text(k: usize, n: u8, text: &str) -> Result<Form> {
        let mut f = Form::zero(k, n);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            let kk: usize = toks[0].parse().map_err(|_| bad("dimension"))?;
            if kk != k {
                return Err(Error::DimensionMismatch { expected: k, found: kk });
            }
            let coords: Vec<i32> = toks[1]
                .split(',')
                .map(|t| t.parse::<i32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("base point"))?;
            let base: [i32; DIM] = coords.try_into().map_err(|_| bad("base point arity"))?;
            let axes: Vec<usize> = if toks[2] == "-" {
                Vec::new()
            } else {
                toks[2]
                    .chars()
                    .map(|ch| ch.to_digit(10).filter(|d| (1..=4).contains(d)).map(|d| d as usize - 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad("axes"))?
            };
            let sign: i8 = toks[3].parse().map_err(|_| bad("sign"))?;
            let value: u8 = toks[4].parse().map_err(|_| bad("value"))?;
            if value >= n {
                return Err(bad("value out of range"));
            }
            let oc = OrientedCell::from_axes(base, &axes, sign)?;
            if oc.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: oc.dim() });
            }
            f.set_oriented(oc, value);
        }
        Ok(f)
    }
}

/// Exterior derivative: `dw(c) = w(boundary c)` for every `(k+1)`-cell of
/// the box.
pub fn d(w: &Form, lattice: &LatticeBox) -> Result<Form> {
    if w.k >= DIM {
        return Err(Error::InvalidParameter("exterior derivative of a 4-form".into()));
    }
    let mut out = Form::zero(w.k + 1, w.n);
    for (c, v) in w.iter() {
        for (up, a) in lattice.coboundary(OrientedCell::positive(*c))?.iter() {
            out.add_at(*up, a * v as i64);
        }
    }
    Ok(out)
}

/// Evaluation `w(q) = sum a_i w(c_i)`.
pub fn evaluate(w: &Form, q: &Chain) -> Result<u8> {
    if w.k != q.dim() {
        return Err(Error::DimensionMismatch { expected: w.k, found: q.dim() });
    }
    let mut acc = 0i64;
    for (c, a) in q.iter() {
        acc += a * w.get_cell(c) as i64;
    }
    Ok(reduce(acc, w.n))
}

/// Partial order: `w1 <= w` iff `w1` agrees with `w` on its support and
/// `d w1` agrees with `d w` on its support.
pub fn leq(w1: &Form, w: &Form, lattice: &LatticeBox) -> Result<bool> {
    w1.check_compatible(w)?;
    if w1.iter().any(|(c, v)| w.get_cell(c) != v) {
        return Ok(false);
    }
    if w.k >= DIM {
        return Ok(true);
    }
    let dw1 = d(w1, lattice)?;
    let dw = d(w, lattice)?;
    let ok = dw1.iter().all(|(c, v)| dw.get_cell(c) == v);
    Ok(ok)
}

/// Local incidence data of a support set used by the split searches.
struct SplitData {
    cells: Vec<Cell>,
    incidences: Vec<Vec<(usize, i64)>>,
    total: Vec<u8>,
}

fn split_data(w: &Form, lattice: &LatticeBox) -> Result<SplitData> {
    let cells: Vec<Cell> = w.support().copied().collect();
    let mut index: HashMap<Cell, usize> = HashMap::new();
    let mut incidences = Vec::with_capacity(cells.len());
    let mut total: Vec<i64> = Vec::new();
    for c in &cells {
        let mut inc = Vec::new();
        if w.k < DIM {
            for (up, a) in lattice.coboundary(OrientedCell::positive(*c))?.iter() {
                let next = index.len();
                let i = *index.entry(*up).or_insert(next);
                if i == total.len() {
                    total.push(0);
                }
                let contrib = a * w.get_cell(c) as i64;
                total[i] += contrib;
                inc.push((i, contrib));
            }
        }
        incidences.push(inc);
    }
    let total = total.into_iter().map(|t| reduce(t, w.n)).collect();
    Ok(SplitData { cells, incidences, total })
}

/// Searches for a nonempty proper subset `S` of the positive support with
/// `d(w|_S)` and `d(w|_{S^c})` having disjoint supports, enumerating subsets
/// in Gray-code order. Returns `(w|_S, w|_{S^c})`.
pub fn find_split(w: &Form, lattice: &LatticeBox, limit: usize) -> Result<Option<(Form, Form)>> {
    let m = w.support_len();
    if m > limit || m > 30 {
        return Err(Error::TooLarge(format!("support of {m} cells exceeds limit {limit}")));
    }
    if m <= 1 {
        return Ok(None);
    }
    let data = split_data(w, lattice)?;
    let n = w.n as i64;
    let mut dt = vec![0i64; data.total.len()];
    let bad = |dt: i64, tot: u8| {
        let v = dt.rem_euclid(n) as u8;
        v != 0 && v != tot
    };
    let mut bad_count = 0usize;
    let mut in_set = vec![false; m];
    for i in 1u64..(1u64 << (m - 1)) {
        let flip = i.trailing_zeros() as usize;
        in_set[flip] = !in_set[flip];
        let s = if in_set[flip] { 1 } else { -1 };
        for &(j, contrib) in &data.incidences[flip] {
            if bad(dt[j], data.total[j]) {
                bad_count -= 1;
            }
            dt[j] += s * contrib;
            if bad(dt[j], data.total[j]) {
                bad_count += 1;
            }
        }
        if bad_count == 0 {
            let chosen: Vec<Cell> = (0..m).filter(|&t| in_set[t]).map(|t| data.cells[t]).collect();
            let part = w.restrict(|c| chosen.binary_search(c).is_ok());
            let rest = w.restrict(|c| chosen.binary_search(c).is_err());
            return Ok(Some((part, rest)));
        }
    }
    Ok(None)
}

/// Exact irreducibility: no nontrivial `w1 < w` exists.
pub fn is_irreducible_exact(w: &Form, lattice: &LatticeBox, limit: usize) -> Result<bool> {
    if w.is_zero() {
        return Err(Error::TrivialForm);
    }
    Ok(find_split(w, lattice, limit)?.is_none())
}

/// Connected components of the support, two cells being adjacent when their
/// coboundaries share a cell.
pub fn support_components(w: &Form, lattice: &LatticeBox) -> Result<Vec<Form>> {
    let cells: Vec<Cell> = w.support().copied().collect();
    let mut uf = UnionFind::<usize>::new(cells.len());
    if w.k < DIM {
        let mut owner: HashMap<Cell, usize> = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            for (up, _) in lattice.coboundary(OrientedCell::positive(*c))?.iter() {
                match owner.get(up) {
                    Some(&j) => {
                        uf.union(i, j);
                    }
                    None => {
                        owner.insert(*up, i);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
    let mut first_of_root: HashMap<usize, usize> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let root = uf.find(i);
        let key = *first_of_root.entry(root).or_insert(i);
        groups.entry(key).or_default().push(*c);
    }
    Ok(groups
        .into_values()
        .map(|members| w.restrict(|c| members.binary_search(c).is_ok()))
        .collect())
}

/// Decomposition of a nontrivial form into pieces with disjoint supports and
/// disjoint `d`-supports, each `<= w`, summing to `w`. Pieces are support
/// components, further split into irreducible parts when their support has
/// at most `limit` cells.
pub fn decompose_with_limit(w: &Form, lattice: &LatticeBox, limit: usize) -> Result<Vec<Form>> {
    if w.is_zero() {
        return Err(Error::TrivialForm);
    }
    let mut out = Vec::new();
    let mut stack: Vec<Form> = support_components(w, lattice)?.into_iter().rev().collect();
    while let Some(piece) = stack.pop() {
        if piece.support_len() <= limit {
            if let Some((a, b)) = find_split(&piece, lattice, limit)? {
                stack.push(b);
                stack.push(a);
                continue;
            }
        }
        out.push(piece);
    }
    out.sort_by(|a, b| a.support().next().cmp(&b.support().next()));
    Ok(out)
}

/// [`decompose_with_limit`] with the default limit.
pub fn decompose(w: &Form, lattice: &LatticeBox) -> Result<Vec<Form>> {
    decompose_with_limit(w, lattice, IRREDUCIBLE_LIMIT)
}

fn check_inside(w: &Form, lattice: &LatticeBox) -> Result<()> {
    match w.support().find(|c| !lattice.contains(c)) {
        Some(c) => Err(Error::InvalidCell(format!("cell {c} outside the box"))),
        None => Ok(()),
    }
}

fn poincare_raw(w: &Form, lattice: &LatticeBox) -> Result<Form> {
    let k = w.k;
    let mut alpha = Form::zero(k - 1, w.n);
    let dims = lattice.dims();
    let Some(t) = (0..DIM).rev().find(|&j| dims[j] > 1) else {
        return Ok(alpha);
    };
    let lo = lattice.lo();
    let mut slice_hi = lattice.hi();
    slice_hi[t] = lo[t];
    let slice = LatticeBox::new(lo, slice_hi)?;
    let bottom = poincare_raw(&w.restrict(|c| slice.contains(c)), &slice)?;
    let slice_cells = slice.enumerate_cells(k - 1);
    let sign: i64 = if k.is_multiple_of(2) { 1 } else { -1 };
    let mut prev: Vec<u8> = slice_cells.iter().map(|c| bottom.get_cell(c)).collect();
    for (c, v) in slice_cells.iter().zip(&prev) {
        alpha.set(*c, *v);
    }
    for layer in lo[t] + 1..=lattice.hi()[t] {
        for (c, p) in slice_cells.iter().zip(prev.iter_mut()) {
            let mut below = *c;
            below.base[t] = layer - 1;
            let prism = Cell::from_mask(below.base, below.mask | (1 << t));
            let v = reduce(*p as i64 - sign * w.get_cell(&prism) as i64, w.n);
            *p = v;
            let mut here = *c;
            here.base[t] = layer;
            alpha.set(here, v);
        }
    }
    Ok(alpha)
}

/// An antiderivative of a closed form by axis-sweep integration, verified
/// to satisfy `d(result) = w`. For `k <= 2`, if `w` vanishes on boundary
/// cells the result also vanishes on boundary cells.
pub fn poincare_antiderivative(w: &Form, lattice: &LatticeBox) -> Result<Form> {
    if w.k == 0 || w.k > DIM {
        return Err(Error::InvalidParameter(format!("antiderivative of a {}-form", w.k)));
    }
    check_inside(w, lattice)?;
    if w.k < DIM && !d(w, lattice)?.is_zero() {
        return Err(Error::NotClosed);
    }
    let mut alpha = poincare_raw(w, lattice)?;
    let vanishes_on_boundary = w.support().all(|c| !lattice.is_boundary_cell(c));
    if vanishes_on_boundary && w.k == 2 {
        alpha = clear_boundary_1form(&alpha, lattice)?;
    }
    if d(&alpha, lattice)? != *w {
        return Err(Error::Internal("antiderivative fails d(alpha) = w".into()));
    }
    if vanishes_on_boundary && w.k <= 2 && alpha.support().any(|c| lattice.is_boundary_cell(c)) {
        return Err(Error::Internal("antiderivative does not vanish on the boundary".into()));
    }
    Ok(alpha)
}

fn clear_boundary_1form(alpha: &Form, lattice: &LatticeBox) -> Result<Form> {
    let n = alpha.n;
    let nv = lattice.num_vertices();
    let on_boundary: Vec<bool> =
        (0..nv).map(|v| lattice.is_boundary_cell(&Cell::vertex(lattice.vertex_point(v)))).collect();
    let mut beta: Vec<Option<u8>> = vec![None; nv];
    for root in 0..nv {
        if !on_boundary[root] || beta[root].is_some() {
            continue;
        }
        beta[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let bx = beta[x].expect("visited");
            for (slot, side) in lattice.vertex_edges(x) {
                let e = lattice.edge_cell(slot).expect("valid edge");
                if !lattice.is_boundary_cell(&e) {
                    continue;
                }
                let (tail, head) = lattice.edge_endpoints(slot);
                let other = if side < 0 { head } else { tail };
                let a = alpha.get_cell(&e) as i64;
                let val = if side < 0 { reduce(bx as i64 + a, n) } else { reduce(bx as i64 - a, n) };
                if beta[other].is_none() {
                    beta[other] = Some(val);
                    queue.push_back(other);
                }
            }
        }
    }
    let mut beta_form = Form::zero(0, n);
    for (v, b) in beta.iter().enumerate() {
        if let Some(b) = b {
            beta_form.set(Cell::vertex(lattice.vertex_point(v)), *b);
        }
    }
    alpha.sub(&d(&beta_form, lattice)?)
}

/// An oriented surface `q` with `boundary(q) = gamma` for a generalized loop,
/// built by sweeping the loop down each axis from 4 to 1 onto the lower face
/// of its bounding box. The result lies in the bounding box of `gamma`.
pub fn build_surface(gamma: &Chain, lattice: &LatticeBox) -> Result<Chain> {
    if gamma.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: gamma.dim() });
    }
    if gamma.iter().any(|(_, a)| a.abs() > 1) {
        return Err(Error::InvalidParameter("path coefficients must lie in {-1, 0, 1}".into()));
    }
    if let Some(c) = gamma.support().find(|c| !lattice.contains(c)) {
        return Err(Error::InvalidCell(format!("cell {c} outside the box")));
    }
    if !boundary_chain(gamma)?.is_empty() {
        return Err(Error::NotALoop);
    }
    let mut q = Chain::zero(2);
    if gamma.is_empty() {
        return Ok(q);
    }
    let mut low = [i32::MAX; DIM];
    for c in gamma.support() {
        for (l, b) in low.iter_mut().zip(c.base) {
            *l = (*l).min(b);
        }
    }
    let mut cur = gamma.clone();
    for t in (0..DIM).rev() {
        let m = low[t];
        let mut next = Chain::zero(1);
        for (c, a) in cur.iter() {
            if c.has_axis(t) {
                continue;
            }
            let mut axes = c.axis_vec();
            let sign: i8 = if axes.len() % 2 == 0 { 1 } else { -1 };
            axes.push(t);
            for s in m..c.base[t] {
                let mut base = c.base;
                base[t] = s;
                q.add_oriented(OrientedCell::from_axes(base, &axes, sign)?, a);
            }
            let mut projected = *c;
            projected.base[t] = m;
            next.add_cell(projected, a);
        }
        cur = next;
    }
    if !cur.is_empty() || boundary_chain(&q)? != *gamma {
        return Err(Error::Internal("surface boundary differs from the loop".into()));
    }
    Ok(q)
}

/// A dense 1-form indexed by the edge slots of a box.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeConfig {
    n: u8,
    values: Vec<u8>,
}

impl EdgeConfig {
    /// The zero configuration.
    pub fn zeros(lattice: &LatticeBox, n: u8) -> Self {
        assert!(n >= 2, "group order must be at least 2");
        Self { n, values: vec![0; lattice.num_edge_slots()] }
    }

    /// Configuration from raw slot values; invalid slots must hold 0.
    pub fn from_slots(lattice: &LatticeBox, n: u8, values: Vec<u8>) -> Result<Self> {
        if values.len() != lattice.num_edge_slots() {
            return Err(Error::DimensionMismatch { expected: lattice.num_edge_slots(), found: values.len() });
        }
        for (s, &v) in values.iter().enumerate() {
            if v >= n || (v != 0 && !lattice.edge_slot_valid(s)) {
                return Err(Error::InvalidParameter(format!("bad value {v} in edge slot {s}")));
            }
        }
        Ok(Self { n, values })
    }

    /// The coboundary `d eta` of a vertex configuration.
    pub fn coboundary_of(lattice: &LatticeBox, n: u8, spins: &[u8]) -> Self {
        let mut out = Self::zeros(lattice, n);
        for slot in lattice.edge_slots() {
            let (tail, head) = lattice.edge_endpoints(slot);
            out.values[slot] = reduce(spins[head] as i64 - spins[tail] as i64, n);
        }
        out
    }

    /// Group order.
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Raw slot values.
    pub fn slots(&self) -> &[u8] {
        &self.values
    }

    /// Value on a positive edge slot.
    #[inline]
    pub fn get(&self, slot: usize) -> u8 {
        self.values[slot]
    }

    /// Sets the value on a positive edge slot.
    #[inline]
    pub fn set(&mut self, slot: usize, v: u8) {
        self.values[slot] = v;
    }

    /// `d sigma` on a plaquette slot.
    #[inline]
    pub fn plaquette_value(&self, lattice: &LatticeBox, pslot: usize) -> u8 {
        let mut acc = 0i32;
        for (e, s) in lattice.plaquette_edges(pslot) {
            acc += s as i32 * self.values[e] as i32;
        }
        acc.rem_euclid(self.n as i32) as u8
    }

    /// `d sigma` on every plaquette slot (0 on invalid slots).
    pub fn plaquette_values(&self, lattice: &LatticeBox) -> Vec<u8> {
        let mut out = vec![0u8; lattice.num_plaquette_slots()];
        for p in lattice.plaquette_slots() {
            out[p] = self.plaquette_value(lattice, p);
        }
        out
    }

    /// Whether `d sigma = 0`.
    pub fn is_closed(&self, lattice: &LatticeBox) -> bool {
        lattice.plaquette_slots().into_iter().all(|p| self.plaquette_value(lattice, p) == 0)
    }

    /// Number of positive edges with nonzero value.
    pub fn support_len(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    /// Sparse copy.
    pub fn to_form(&self, lattice: &LatticeBox) -> Form {
        let mut f = Form::zero(1, self.n);
        for (s, &v) in self.values.iter().enumerate() {
            if v != 0 {
                f.set(lattice.edge_cell(s).expect("nonzero value on a valid slot"), v);
            }
        }
        f
    }

    /// Dense copy of a sparse 1-form.
    pub fn from_form(lattice: &LatticeBox, f: &Form) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
        }
        let mut out = Self::zeros(lattice, f.modulus());
        for (c, v) in f.iter() {
            let s = lattice.edge_slot(c).ok_or_else(|| Error::InvalidCell(format!("edge {c} outside the box")))?;
            out.values[s] = v;
        }
        Ok(out)
    }

    /// `sigma(gamma)` for a 1-chain.
    pub fn evaluate(&self, lattice: &LatticeBox, gamma: &Chain) -> Result<u8> {
        if gamma.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: gamma.dim() });
        }
        let mut acc = 0i64;
        for (c, a) in gamma.iter() {
            let s = lattice.edge_slot(c).ok_or_else(|| Error::InvalidCell(format!("edge {c} outside the box")))?;
            acc += a * self.values[s] as i64;
        }
        Ok(reduce(acc, self.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_loop(base: [i32; 4], g: u8, n: u8) -> Form {
        let lat = LatticeBox::centered(3);
        let p = OrientedCell::positive(Cell::plaquette(base, 0, 1));
        let q = boundary_chain(&Chain::from_cell(p)).unwrap();
        let mut f = Form::zero(1, n);
        for (c, a) in q.iter() {
            f.set_oriented(OrientedCell::with_sign(*c, a as i8), g);
        }
        assert!(lat.contains(&p.cell));
        f
    }

    #[test]
    fn minimal_vortex_shape() {
        let lat = LatticeBox::centered(2);
        let e = OrientedCell::positive(Cell::edge([0; 4], 1));
        let w = Form::single(e, 2, 5);
        let dw = d(&w, &lat).unwrap();
        assert_eq!(dw.support_len(), 6);
        for (p, a) in lat.coboundary(e).unwrap().iter() {
            assert_eq!(dw.get(OrientedCell::with_sign(*p, a as i8)), 2);
        }
    }

    #[test]
    fn unit_loop_is_irreducible_and_pair_is_not() {
        let lat = LatticeBox::centered(3);
        let a = unit_loop([0; 4], 1, 5);
        assert!(is_irreducible_exact(&a, &lat, 18).unwrap());
        let b = unit_loop([2, 2, 0, 0], 2, 5);
        let both = a.add(&b).unwrap();
        assert!(!is_irreducible_exact(&both, &lat, 18).unwrap());
        let pieces = decompose(&both, &lat).unwrap();
        assert_eq!(pieces, vec![a, b]);
    }

    #[test]
    fn irreducibility_limit() {
        let lat = LatticeBox::centered(3);
        let mut w = Form::zero(1, 2);
        for c in lat.enumerate_cells(1).into_iter().take(19) {
            w.set(c, 1);
        }
        assert!(matches!(is_irreducible_exact(&w, &lat, 18), Err(Error::TooLarge(_))));
    }

    #[test]
    fn surface_of_plaquette_boundary() {
        let lat = LatticeBox::centered(2);
        let p = OrientedCell::positive(Cell::plaquette([0, 0, 0, 0], 1, 3));
        let gamma = boundary_chain(&Chain::from_cell(p)).unwrap();
        let q = build_surface(&gamma, &lat).unwrap();
        assert_eq!(q, Chain::from_cell(p));
        assert!(build_surface(&Chain::zero(1), &lat).unwrap().is_empty());
    }

    #[test]
    fn text_roundtrip() {
        let w = unit_loop([0; 4], 2, 5);
        let text = w.to_text();
        assert_eq!(Form::from_text(1, 5, &text).unwrap(), w);
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }
}
