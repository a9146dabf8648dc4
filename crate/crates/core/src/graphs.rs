//! Incidence structures, rank calculus, and power-counting polytopes.
//!
//! An integer matrix `M` (rows = vertices, columns = edges) encodes how
//! linear combinations of integration variables enter a product of symbols:
//! edge `e` carries the combination `(s M)_e`. Everything downstream — limit
//! normalizations, integrability regions, cumulant bounds — reduces to the
//! rank function of column subsets, its dual, and small exact optimizations
//! over edge subsets. Boundary decisions are always made in exact rational
//! arithmetic; floats appear only in reported constants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numeric::exact;
use crate::{BigRat, Rat, SpectralDomain};

/// Column subset as a bitmask; bit `e` selects column `e`.
pub type ColSet = u32;

/// Hard cap for exhaustive subset searches.
pub const MAX_SUBSET_COLS: usize = 20;

/// Cap for the include/exclude scans used in region recovery.
const MAX_SCAN_EDGES: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    EmptyMatrix,
    RaggedRows,
    TooManyColumns,
    ColumnOutOfRange,
    VertexOutOfRange,
    LoopEdge,
    NotABasis,
    SizeLimit,
    InvalidExponent,
    DimensionMismatch,
    OddBox,
    IntegerOverflow,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            GraphError::EmptyMatrix => "matrix must have at least one row and one column",
            GraphError::RaggedRows => "all rows must have equal length",
            GraphError::TooManyColumns => "too many columns for subset enumeration",
            GraphError::ColumnOutOfRange => "column index out of range",
            GraphError::VertexOutOfRange => "vertex index out of range",
            GraphError::LoopEdge => "loop edges have no incidence column",
            GraphError::NotABasis => "column set is not a basis of the column space",
            GraphError::SizeLimit => "problem size exceeds the exhaustive-search cap",
            GraphError::InvalidExponent => "exponent vector must lie in [0,1]^E and match E",
            GraphError::DimensionMismatch => "vector length does not match matrix shape",
            GraphError::OddBox => "box half-width requires an even window length",
            GraphError::IntegerOverflow => "integer overflow in exact arithmetic",
        };
        f.write_str(msg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// Every column has exactly one `+1` and one `-1`; ranks come from
    /// component counts of the underlying multigraph.
    GraphIncidence,
    /// Arbitrary integer matrix; ranks come from fraction-free elimination.
    General,
}

/// Integer vertex-by-edge matrix with exact rank machinery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    entries: Vec<Vec<i64>>,
    kind: MatrixKind,
    /// `(tail, head)` per column when `kind == GraphIncidence`.
    edges: Vec<(usize, usize)>,
}

impl IncidenceMatrix {
    /// Builds from rows, detecting graph-incidence structure automatically.
    pub fn from_rows(entries: Vec<Vec<i64>>) -> Result<Self, GraphError> {
        Self::validate(&entries)?;
        let e = entries[0].len();
        let mut edges = Vec::with_capacity(e);
        let mut graphy = true;
        'cols: for c in 0..e {
            let mut tail = None;
            let mut head = None;
            for (r, row) in entries.iter().enumerate() {
                match row[c] {
                    0 => {}
                    -1 if tail.is_none() => tail = Some(r),
                    1 if head.is_none() => head = Some(r),
                    _ => {
                        graphy = false;
                        break 'cols;
                    }
                }
            }
            match (tail, head) {
                (Some(t), Some(h)) => edges.push((t, h)),
                _ => {
                    graphy = false;
                    break;
                }
            }
        }
        if graphy {
            Ok(Self { entries, kind: MatrixKind::GraphIncidence, edges })
        } else {
            Ok(Self { entries, kind: MatrixKind::General, edges: Vec::new() })
        }
    }

    /// Builds from rows but always uses general-matrix rank machinery.
    pub fn general_from_rows(entries: Vec<Vec<i64>>) -> Result<Self, GraphError> {
        Self::validate(&entries)?;
        Ok(Self { entries, kind: MatrixKind::General, edges: Vec::new() })
    }

    /// Builds the signed incidence matrix of a directed multigraph.
    pub fn from_edge_list(v: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if v == 0 || edges.is_empty() {
            return Err(GraphError::EmptyMatrix);
        }
        if edges.len() > 31 {
            return Err(GraphError::TooManyColumns);
        }
        let mut entries = vec![vec![0i64; edges.len()]; v];
        for (c, &(t, h)) in edges.iter().enumerate() {
            if t >= v || h >= v {
                return Err(GraphError::VertexOutOfRange);
            }
            if t == h {
                return Err(GraphError::LoopEdge);
            }
            entries[t][c] = -1;
            entries[h][c] = 1;
        }
        Ok(Self { entries, kind: MatrixKind::GraphIncidence, edges: edges.to_vec() })
    }

    fn validate(entries: &[Vec<i64>]) -> Result<(), GraphError> {
        if entries.is_empty() || entries[0].is_empty() {
            return Err(GraphError::EmptyMatrix);
        }
        let e = entries[0].len();
        if entries.iter().any(|r| r.len() != e) {
            return Err(GraphError::RaggedRows);
        }
        if e > 31 {
            return Err(GraphError::TooManyColumns);
        }
        Ok(())
    }

    pub fn v(&self) -> usize {
        self.entries.len()
    }

    pub fn e(&self) -> usize {
        self.entries[0].len()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// `(tail, head)` pairs for graph-incidence matrices.
    pub fn edge_list(&self) -> Option<&[(usize, usize)]> {
        match self.kind {
            MatrixKind::GraphIncidence => Some(&self.edges),
            MatrixKind::General => None,
        }
    }

    pub fn full_set(&self) -> ColSet {
        ((1u64 << self.e()) - 1) as ColSet
    }

    fn check_subset(&self, a: ColSet) -> Result<(), GraphError> {
        if u64::from(a) >= (1u64 << self.e()) {
            return Err(GraphError::ColumnOutOfRange);
        }
        Ok(())
    }

    /// Rank of the selected columns over the rationals; `rank(0) == 0`.
    pub fn rank_subset(&self, a: ColSet) -> Result<usize, GraphError> {
        self.check_subset(a)?;
        match self.kind {
            MatrixKind::GraphIncidence => {
                let pairs = self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| a >> c & 1 == 1)
                    .map(|(_, &p)| p);
                Ok(self.v() - dsu_components(self.v(), pairs))
            }
            MatrixKind::General => {
                let cols: Vec<usize> = (0..self.e()).filter(|c| a >> c & 1 == 1).collect();
                let rows: Vec<Vec<i64>> = self
                    .entries
                    .iter()
                    .map(|r| cols.iter().map(|&c| r[c]).collect())
                    .collect();
                Ok(exact::rank_i64(&rows))
            }
        }
    }

    /// Rank of the whole matrix.
    pub fn rank(&self) -> usize {
        self.rank_subset(self.full_set()).expect("full set is valid")
    }

    /// Dual rank `r*(A) = |A| - r(M) + r(complement of A)`.
    pub fn dual_rank(&self, a: ColSet) -> Result<usize, GraphError> {
        self.check_subset(a)?;
        let comp = self.full_set() & !a;
        Ok(a.count_ones() as usize + self.rank_subset(comp)? - self.rank())
    }

    /// `co(M - A) = V - r(columns outside A)`: for graphs, the number of weak
    /// components (isolated vertices included) after deleting edge set `A`.
    pub fn components_after_removal(&self, a: ColSet) -> Result<usize, GraphError> {
        self.check_subset(a)?;
        Ok(self.v() - self.rank_subset(self.full_set() & !a)?)
    }

    /// `co(M) = V - r(M)`; 1 for connected graphs.
    pub fn co(&self) -> usize {
        self.v() - self.rank()
    }

    /// Dimension of the right kernel, `C = E - r(M)`; cycle count for graphs.
    pub fn cycle_dim(&self) -> usize {
        self.e() - self.rank()
    }

    /// Lexicographically first column basis (pivot columns of the RREF).
    pub fn column_basis(&self) -> Vec<usize> {
        let (_, pivots) = exact::rref_big(self.to_big_rows());
        pivots
    }

    /// Lexicographically first maximal independent set of rows.
    pub fn independent_rows(&self) -> Vec<usize> {
        let t: Vec<Vec<BigRat>> = (0..self.e())
            .map(|c| (0..self.v()).map(|r| BigRat::from_integer(self.entries[r][c].into())).collect())
            .collect();
        let (_, pivots) = exact::rref_big(t);
        pivots
    }

    fn to_big_rows(&self) -> Vec<Vec<BigRat>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&x| BigRat::from_integer(x.into())).collect())
            .collect()
    }
}

fn dsu_components(v: usize, pairs: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<u32> = (0..v as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            let g = p[p[x as usize] as usize];
            p[x as usize] = g;
            x = g;
        }
        x
    }
    let mut comps = v;
    for (a, b) in pairs {
        let ra = find(&mut parent, a as u32);
        let rb = find(&mut parent, b as u32);
        if ra != rb {
            parent[ra as usize] = rb;
            comps -= 1;
        }
    }
    comps
}

/// Integer row basis of the right kernel of `M`: rows `x` with `M x = 0`.
/// For graph incidence input the rows are signed fundamental cycles with
/// respect to the lexicographically first spanning forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMatrix {
    pub entries: Vec<Vec<i64>>,
    pub cols: usize,
}

impl DualMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    /// Rank of the selected columns of the dual matrix.
    pub fn rank_subset(&self, a: ColSet) -> Result<usize, GraphError> {
        if u64::from(a) >= (1u64 << self.cols) {
            return Err(GraphError::ColumnOutOfRange);
        }
        if self.entries.is_empty() {
            return Ok(0);
        }
        let cols: Vec<usize> = (0..self.cols).filter(|c| a >> c & 1 == 1).collect();
        let rows: Vec<Vec<i64>> = self
            .entries
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        Ok(exact::rank_i64(&rows))
    }

    /// Reinterprets the rows as a general integer matrix (fails when empty).
    pub fn to_incidence(&self) -> Result<IncidenceMatrix, GraphError> {
        IncidenceMatrix::general_from_rows(self.entries.clone())
    }
}

/// Computes the dual matrix: one row per non-pivot column, `+1` in that
/// column and the negated elimination coefficients on the pivot columns,
/// cleared to integers.
pub fn dual_matrix(m: &IncidenceMatrix) -> Result<DualMatrix, GraphError> {
    let (rref, pivots) = exact::rref_big(m.to_big_rows());
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut rows = Vec::new();
    for c in 0..m.e() {
        if pivot_set.contains(&c) {
            continue;
        }
        let mut row = vec![BigRat::zero(); m.e()];
        row[c] = BigRat::one();
        for (i, &p) in pivots.iter().enumerate() {
            row[p] = -rref[i][c].clone();
        }
        // Clear denominators to the least common multiple.
        let mut lcm = num_bigint::BigInt::one();
        for x in &row {
            lcm = num_integer::lcm(lcm, x.denom().clone());
        }
        let mut irow = Vec::with_capacity(m.e());
        for x in &row {
            let scaled = x * BigRat::from_integer(lcm.clone());
            debug_assert!(scaled.is_integer());
            irow.push(scaled.to_integer().to_i64().ok_or(GraphError::IntegerOverflow)?);
        }
        rows.push(irow);
    }
    Ok(DualMatrix { entries: rows, cols: m.e() })
}

fn subset_sum(z: &[Rat], a: ColSet) -> Rat {
    let mut s = Rat::zero();
    for (e, ze) in z.iter().enumerate() {
        if a >> e & 1 == 1 {
            s += *ze;
        }
    }
    s
}

fn validate_exponents(m: &IncidenceMatrix, z: &[Rat]) -> Result<(), GraphError> {
    if z.len() != m.e() {
        return Err(GraphError::InvalidExponent);
    }
    if z.iter().any(|x| x < &Rat::zero() || x > &Rat::one()) {
        return Err(GraphError::InvalidExponent);
    }
    Ok(())
}

fn check_enumerable(m: &IncidenceMatrix) -> Result<(), GraphError> {
    if m.e() > MAX_SUBSET_COLS {
        return Err(GraphError::SizeLimit);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcpCase {
    /// Summation over integer frequencies on the torus.
    Torus,
    /// Lattice-point counting normalization.
    Counting,
    /// Lebesgue convolution on the line.
    Lebesgue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintViolation {
    /// Violating column subset; `None` flags the total-sum equality.
    pub subset: Option<ColSet>,
    pub lhs: Rat,
    pub rhs: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub member: bool,
    pub violation: Option<ConstraintViolation>,
}

impl MembershipReport {
    fn ok() -> Self {
        Self { member: true, violation: None }
    }

    fn fail(subset: Option<ColSet>, lhs: Rat, rhs: Rat) -> Self {
        Self { member: false, violation: Some(ConstraintViolation { subset, lhs, rhs }) }
    }
}

/// Membership of `z` in the power-counting polytope of `M`.
///
/// Torus: `sum_{e in A} z_e <= r(A)` for every `A`. Counting: the same with
/// `1 - z` against the dual rank. Lebesgue: torus constraints plus the total
/// equality `sum z_e = r(M)`. The first violated constraint (in increasing
/// bitmask order) is reported.
pub fn pcp_membership(
    m: &IncidenceMatrix,
    z: &[Rat],
    case: PcpCase,
) -> Result<MembershipReport, GraphError> {
    validate_exponents(m, z)?;
    check_enumerable(m)?;
    if case == PcpCase::Lebesgue {
        let total = subset_sum(z, m.full_set());
        let want = Rat::from_integer(m.rank() as i64);
        if total != want {
            return Ok(MembershipReport::fail(None, total, want));
        }
    }
    let full = m.full_set();
    for a in 1..=full {
        let (lhs, rhs) = match case {
            PcpCase::Torus | PcpCase::Lebesgue => {
                (subset_sum(z, a), Rat::from_integer(m.rank_subset(a)? as i64))
            }
            PcpCase::Counting => {
                let ones = Rat::from_integer(a.count_ones() as i64);
                (ones - subset_sum(z, a), Rat::from_integer(m.dual_rank(a)? as i64))
            }
        };
        if lhs > rhs {
            return Ok(MembershipReport::fail(Some(a), lhs, rhs));
        }
    }
    Ok(MembershipReport::ok())
}

/// 0/1 vertices of the power-counting polytope: indicators of independent
/// column sets (torus), spanning sets (counting), or bases (Lebesgue).
pub fn pcp_vertices(m: &IncidenceMatrix, case: PcpCase) -> Result<Vec<Vec<Rat>>, GraphError> {
    check_enumerable(m)?;
    let full = m.full_set();
    let r = m.rank();
    let mut out = Vec::new();
    for a in 0..=full {
        let take = match case {
            PcpCase::Torus => m.rank_subset(a)? == a.count_ones() as usize,
            PcpCase::Counting => m.rank_subset(a)? == r,
            PcpCase::Lebesgue => {
                a.count_ones() as usize == r && m.rank_subset(a)? == r
            }
        };
        if take {
            out.push(
                (0..m.e())
                    .map(|e| if a >> e & 1 == 1 { Rat::one() } else { Rat::zero() })
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// Both exhaustive forms of the discrete growth exponent:
/// rank form `co(M) + max_A (sum_{e in A} z_e - r*(A))` and component form
/// `max_A (co(M - A) - sum_{e in A} (1 - z_e))`.
pub fn alpha_discrete_forms(m: &IncidenceMatrix, z: &[Rat]) -> Result<(Rat, Rat), GraphError> {
    validate_exponents(m, z)?;
    check_enumerable(m)?;
    let full = m.full_set();
    let co = Rat::from_integer(m.co() as i64);
    let mut best_rank = Rat::zero();
    let mut best_comp = co;
    for a in 0..=full {
        let zsum = subset_sum(z, a);
        let by_rank = zsum - Rat::from_integer(m.dual_rank(a)? as i64);
        if by_rank > best_rank {
            best_rank = by_rank;
        }
        let cost = Rat::from_integer(a.count_ones() as i64) - zsum;
        let by_comp = Rat::from_integer(m.components_after_removal(a)? as i64) - cost;
        if by_comp > best_comp {
            best_comp = by_comp;
        }
    }
    Ok((co + best_rank, best_comp))
}

/// Growth exponent of the normalized graph integral: discrete exhaustive
/// optimum for the torus/counting cases, `co(M) + (sum z - C)_+` on the line.
pub fn alpha_exponent(m: &IncidenceMatrix, z: &[Rat], case: PcpCase) -> Result<Rat, GraphError> {
    match case {
        PcpCase::Torus | PcpCase::Counting => {
            let (by_rank, by_comp) = alpha_discrete_forms(m, z)?;
            debug_assert_eq!(by_rank, by_comp);
            if by_rank != by_comp {
                return Err(GraphError::IntegerOverflow);
            }
            Ok(by_rank)
        }
        PcpCase::Lebesgue => {
            validate_exponents(m, z)?;
            let excess = subset_sum(z, m.full_set())
                - Rat::from_integer(m.cycle_dim() as i64);
            let co = Rat::from_integer(m.co() as i64);
            Ok(if excess > Rat::zero() { co + excess } else { co })
        }
    }
}

/// Exact-limit condition for normalized graph integrals: on the torus,
/// `sum_{e in A} z_e <= r*(A)` for every `A` (equivalently the growth
/// exponent stays at `co(M)`); on the line, `sum z_e <= C`.
pub fn szego_condition(
    m: &IncidenceMatrix,
    z: &[Rat],
    domain: SpectralDomain,
) -> Result<MembershipReport, GraphError> {
    validate_exponents(m, z)?;
    match domain {
        SpectralDomain::Torus => {
            check_enumerable(m)?;
            let full = m.full_set();
            for a in 1..=full {
                let lhs = subset_sum(z, a);
                let rhs = Rat::from_integer(m.dual_rank(a)? as i64);
                if lhs > rhs {
                    return Ok(MembershipReport::fail(Some(a), lhs, rhs));
                }
            }
            Ok(MembershipReport::ok())
        }
        SpectralDomain::Line => {
            let lhs = subset_sum(z, m.full_set());
            let rhs = Rat::from_integer(m.cycle_dim() as i64);
            if lhs > rhs {
                Ok(MembershipReport::fail(Some(m.full_set()), lhs, rhs))
            } else {
                Ok(MembershipReport::ok())
            }
        }
    }
}

/// Sharp constant at a 0/1 polytope vertex given by a column basis `A`:
/// `det(G)^(-1/2)` for the Gram matrix `G` of the selected columns. Returns
/// the float constant together with the exact Gram determinant.
pub fn holder_constant_at_vertex(
    m: &IncidenceMatrix,
    basis: ColSet,
) -> Result<(f64, i128), GraphError> {
    m.check_subset(basis)?;
    let r = m.rank();
    if basis.count_ones() as usize != r || m.rank_subset(basis)? != r {
        return Err(GraphError::NotABasis);
    }
    let cols: Vec<usize> = (0..m.e()).filter(|c| basis >> c & 1 == 1).collect();
    let mut gram = vec![vec![0i64; r]; r];
    for i in 0..r {
        for j in 0..r {
            let mut acc: i64 = 0;
            for row in &m.entries {
                acc = acc
                    .checked_add(
                        row[cols[i]].checked_mul(row[cols[j]]).ok_or(GraphError::IntegerOverflow)?,
                    )
                    .ok_or(GraphError::IntegerOverflow)?;
            }
            gram[i][j] = acc;
        }
    }
    let det = exact::det_i64(&gram);
    debug_assert!(det > 0);
    Ok((1.0 / libm::sqrt(det as f64), det))
}

/// True iff every nonsingular `r x r` minor has determinant `+-1`.
/// Graph incidence matrices are totally unimodular, hence always true.
pub fn is_unimodular(m: &IncidenceMatrix) -> Result<bool, GraphError> {
    let r = m.rank();
    if r == 0 {
        return Ok(true);
    }
    let combos = binom(m.v(), r).saturating_mul(binom(m.e(), r));
    if combos > 2_000_000 {
        return Err(GraphError::SizeLimit);
    }
    let mut ok = true;
    for_each_combination(m.v(), r, &mut |rows: &[usize]| {
        if !ok {
            return;
        }
        for_each_combination(m.e(), r, &mut |cols: &[usize]| {
            if !ok {
                return;
            }
            let sub: Vec<Vec<i64>> =
                rows.iter().map(|&i| cols.iter().map(|&j| m.entries[i][j]).collect()).collect();
            let d = exact::det_i64(&sub);
            if d != 0 && d != 1 && d != -1 {
                ok = false;
            }
        });
    });
    Ok(ok)
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Lattice-point counts of `{ s in Z^V : s M = b, |s_j| <= T/2 }` for each
/// window length in `t_list`, with the least-squares leading coefficient of
/// `count ~ leading * T^dim` fitted through the origin.
#[derive(Clone, Debug)]
pub struct LatticeFit {
    /// Dimension of the solution space, `V - r(M)` when solvable.
    pub dim: usize,
    pub counts: Vec<(u64, u128)>,
    pub leading: f64,
}

pub fn lattice_leading_coefficient(
    m: &IncidenceMatrix,
    b: &[i64],
    t_list: &[u64],
) -> Result<LatticeFit, GraphError> {
    if b.len() != m.e() {
        return Err(GraphError::DimensionMismatch);
    }
    if t_list.iter().any(|t| t % 2 != 0 || *t == 0) {
        return Err(GraphError::OddBox);
    }
    let v = m.v();
    // Row system s M = b transposes to (M^T) x = b with x = s^T.
    let mut aug: Vec<Vec<BigRat>> = (0..m.e())
        .map(|e| {
            let mut row: Vec<BigRat> =
                (0..v).map(|r| BigRat::from_integer(m.entries[r][e].into())).collect();
            row.push(BigRat::from_integer(b[e].into()));
            row
        })
        .collect();
    // Deterministic shape regardless of inconsistency.
    let dim_if_solvable = v - m.rank();
    let (rref, pivots) = {
        let taken = core::mem::take(&mut aug);
        exact::rref_big(taken)
    };
    if pivots.iter().any(|&p| p == v) {
        // b outside the row space: no solutions at any window length.
        return Ok(LatticeFit {
            dim: dim_if_solvable,
            counts: t_list.iter().map(|&t| (t, 0u128)).collect(),
            leading: 0.0,
        });
    }
    let free: Vec<usize> = (0..v).filter(|c| !pivots.contains(c)).collect();
    let dim = free.len();
    let mut counts = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let span = t as u128 + 1;
        let mut total_points: u128 = 1;
        for _ in 0..dim {
            total_points = total_points.saturating_mul(span);
            if total_points > 20_000_000 {
                return Err(GraphError::SizeLimit);
            }
        }
        let half = BigRat::from_integer((t as i64 / 2).into());
        let mut digits = vec![-(t as i64) / 2; dim];
        let mut count: u128 = 0;
        'outer: loop {
            // Back-substitute pivots and test integrality plus the box.
            let mut inside = true;
            for (i, &_p) in pivots.iter().enumerate() {
                let mut val = rref[i][v].clone();
                for (fi, &fc) in free.iter().enumerate() {
                    if !rref[i][fc].is_zero() {
                        val -= &rref[i][fc] * BigRat::from_integer(digits[fi].into());
                    }
                }
                if !val.is_integer() || val.abs() > half {
                    inside = false;
                    break;
                }
            }
            if inside {
                count += 1;
            }
            // Odometer over the free coordinates.
            let mut d = 0;
            loop {
                if d == dim {
                    break 'outer;
                }
                if digits[d] < (t as i64) / 2 {
                    digits[d] += 1;
                    break;
                }
                digits[d] = -(t as i64) / 2;
                d += 1;
            }
        }
        counts.push((t, count));
    }
    // Least squares through the origin for count ~ leading * T^dim.
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, c) in &counts {
        let x = libm::pow(t as f64, dim as f64);
        num += x * c as f64;
        den += x * x;
    }
    let leading = if den > 0.0 { num / den } else { 0.0 };
    Ok(LatticeFit { dim, counts, leading })
}

/// Seeded generator for connected random multigraphs: a random attachment
/// tree plus `extra` uniformly random non-loop edges.
pub fn random_connected_graph<R: rand::RngCore>(
    rng: &mut R,
    v: usize,
    extra: usize,
) -> IncidenceMatrix {
    assert!(v >= 2, "need at least two vertices");
    let mut edges = Vec::with_capacity(v - 1 + extra);
    for i in 1..v {
        let t = (rng.next_u32() as usize) % i;
        edges.push((t, i));
    }
    for _ in 0..extra {
        loop {
            let a = (rng.next_u32() as usize) % v;
            let b = (rng.next_u32() as usize) % v;
            if a != b {
                edges.push((a, b));
                break;
            }
        }
    }
    IncidenceMatrix::from_edge_list(v, &edges).expect("generated edges are valid")
}

// ---------------------------------------------------------------------------
// Degree-constrained multigraph families and their integrability regions.
// ---------------------------------------------------------------------------

/// Loopless multigraph stored as upper-triangular edge multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    v: usize,
    mult: Vec<u8>,
}

impl MultiGraph {
    pub fn empty(v: usize) -> Self {
        Self { v, mult: vec![0; v * (v - 1) / 2] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.v);
        // Row-major upper triangle: offset of row i plus column gap.
        i * (2 * self.v - i - 1) / 2 + (j - i - 1)
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u8 {
        if i == j {
            return 0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.mult[self.idx(a, b)]
    }

    pub fn set_multiplicity(&mut self, i: usize, j: usize, m: u8) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let k = self.idx(a, b);
        self.mult[k] = m;
    }

    pub fn degree(&self, u: usize) -> u32 {
        (0..self.v).filter(|&w| w != u).map(|w| self.multiplicity(u, w) as u32).sum()
    }

    /// Edges expanded with multiplicity, ordered by `(i, j)`.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.v {
            for j in i + 1..self.v {
                for _ in 0..self.multiplicity(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.mult.iter().map(|&m| m as usize).sum()
    }

    pub fn incidence(&self) -> Result<IncidenceMatrix, GraphError> {
        IncidenceMatrix::from_edge_list(self.v, &self.edge_pairs())
    }

    /// Connectivity of the multigraph together with extra edges.
    pub fn connected_with(&self, extra: &[(usize, usize)]) -> bool {
        let pairs = self.edge_pairs().into_iter().chain(extra.iter().copied());
        dsu_components(self.v, pairs) == 1
    }

    fn permuted(&self, map: &[usize]) -> MultiGraph {
        let mut out = MultiGraph::empty(self.v);
        for i in 0..self.v {
            for j in i + 1..self.v {
                let m = self.multiplicity(i, j);
                if m > 0 {
                    out.set_multiplicity(map[i], map[j], m);
                }
            }
        }
        out
    }

    fn canonical_key(&self, maps: &[Vec<usize>]) -> Vec<u8> {
        let mut best: Option<Vec<u8>> = None;
        for map in maps {
            let cand = self.permuted(map).mult;
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        best.expect("at least the identity map")
    }
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                cur.swap(0, i);
            } else {
                cur.swap(c[i], i);
            }
            out.push(cur.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Backtracking enumeration of multigraphs with prescribed degrees over an
/// allowed pair list. Calls `leaf` for every exact-degree assignment.
fn generate_degree_multigraphs(
    v: usize,
    target: &[u32],
    allowed: &[(usize, usize)],
    leaf: &mut impl FnMut(&MultiGraph),
) {
    let mut last_touch = vec![usize::MAX; v];
    for (t, &(i, j)) in allowed.iter().enumerate() {
        last_touch[i] = t;
        last_touch[j] = t;
    }
    // Vertices untouched by any allowed pair must need degree zero.
    if (0..v).any(|u| last_touch[u] == usize::MAX && target[u] != 0) {
        return;
    }
    let mut g = MultiGraph::empty(v);
    let mut rem: Vec<u32> = target.to_vec();
    rec(&mut g, &mut rem, allowed, &last_touch, 0, leaf);

    fn rec(
        g: &mut MultiGraph,
        rem: &mut [u32],
        allowed: &[(usize, usize)],
        last_touch: &[usize],
        t: usize,
        leaf: &mut impl FnMut(&MultiGraph),
    ) {
        if t == allowed.len() {
            if rem.iter().all(|&r| r == 0) {
                leaf(g);
            }
            return;
        }
        let (i, j) = allowed[t];
        let cap = rem[i].min(rem[j]).min(255);
        for m in 0..=cap {
            rem[i] -= m;
            rem[j] -= m;
            g.set_multiplicity(i, j, m as u8);
            let closed_ok = (last_touch[i] != t || rem[i] == 0)
                && (last_touch[j] != t || rem[j] == 0);
            if closed_ok {
                rec(g, rem, allowed, last_touch, t + 1, leaf);
            }
            g.set_multiplicity(i, j, 0);
            rem[i] += m;
            rem[j] += m;
        }
    }
}

/// Connected loopless multigraphs on `k` vertices, every degree `m`, up to
/// isomorphism, in canonical-key order. Empty when `m*k` is odd.
pub fn sum_family(m: u32, k: usize) -> Result<Vec<MultiGraph>, GraphError> {
    if k < 2 || k > 6 || m == 0 || m > 8 {
        return Err(GraphError::SizeLimit);
    }
    if (m as usize * k) % 2 == 1 {
        return Ok(Vec::new());
    }
    let allowed: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let target = vec![m; k];
    let perms = all_permutations(k);
    let mut classes: BTreeMap<Vec<u8>, MultiGraph> = BTreeMap::new();
    generate_degree_multigraphs(k, &target, &allowed, &mut |g| {
        if g.connected_with(&[]) {
            classes.entry(g.canonical_key(&perms)).or_insert_with(|| g.clone());
        }
    });
    Ok(classes.into_values().collect())
}

/// Paired-row graph: `k` rows, left vertex `j` and right vertex `k + j`,
/// one kernel edge per row, plus a correlation multigraph that never joins
/// vertices of the same row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearGraph {
    pub k: usize,
    pub corr: MultiGraph,
}

impl BilinearGraph {
    pub fn kernel_edges(&self) -> Vec<(usize, usize)> {
        (0..self.k).map(|j| (j, self.k + j)).collect()
    }

    /// `(kernel edge count, correlation edge count)`.
    pub fn edge_counts(&self) -> (usize, usize) {
        (self.k, self.corr.edge_count())
    }

    /// Incidence matrix with the `k` kernel columns first, then the
    /// correlation columns in pair order.
    pub fn incidence(&self) -> Result<IncidenceMatrix, GraphError> {
        let mut edges = self.kernel_edges();
        edges.extend(self.corr.edge_pairs());
        IncidenceMatrix::from_edge_list(2 * self.k, &edges)
    }

    /// Exponent vector matching the column order of `incidence()`.
    pub fn exponent_vector(&self, z_corr: Rat, z_kernel: Rat) -> Vec<Rat> {
        let mut z = vec![z_kernel; self.k];
        z.extend(vec![z_corr; self.corr.edge_count()]);
        z
    }
}

/// Connected paired-row graphs with left correlation degree `m` and right
/// correlation degree `n`, up to row permutations (and the left/right swap
/// when `m == n`), in canonical-key order.
pub fn bilinear_family(m: u32, n: u32, k: usize) -> Result<Vec<BilinearGraph>, GraphError> {
    if k < 2 || k > 6 || m == 0 || n == 0 || m > 6 || n > 6 {
        return Err(GraphError::SizeLimit);
    }
    if (k * (m + n) as usize) % 2 == 1 {
        return Ok(Vec::new());
    }
    let v = 2 * k;
    let mut allowed = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            if j != i + k || i >= k {
                allowed.push((i, j));
            }
        }
    }
    let mut target = vec![m; k];
    target.extend(vec![n; k]);
    let kernels: Vec<(usize, usize)> = (0..k).map(|j| (j, k + j)).collect();
    // Row permutations act jointly on both sides; the swap is degree-legal
    // only when m == n.
    let mut maps = Vec::new();
    for sigma in all_permutations(k) {
        let mut map = vec![0usize; v];
        for j in 0..k {
            map[j] = sigma[j];
            map[k + j] = k + sigma[j];
        }
        if m == n {
            let mut swapped = vec![0usize; v];
            for j in 0..k {
                swapped[j] = k + sigma[j];
                swapped[k + j] = sigma[j];
            }
            maps.push(swapped);
        }
        maps.push(map);
    }
    let mut classes: BTreeMap<Vec<u8>, MultiGraph> = BTreeMap::new();
    generate_degree_multigraphs(v, &target, &allowed, &mut |g| {
        if g.connected_with(&kernels) {
            classes.entry(g.canonical_key(&maps)).or_insert_with(|| g.clone());
        }
    });
    Ok(classes.into_values().map(|corr| BilinearGraph { k, corr }).collect())
}

/// Union-find with an undo trail, used by the include/exclude subset scans.
struct RollbackDsu {
    parent: Vec<u32>,
    size: Vec<u32>,
    comps: u32,
    trail: Vec<u32>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            comps: n as u32,
            trail: Vec::new(),
        }
    }

    fn find(&self, mut x: u32) -> u32 {
        // No path compression: unions must be reversible.
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (small, large) = if self.size[ra as usize] < self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = large;
        self.size[large as usize] += self.size[small as usize];
        self.comps -= 1;
        self.trail.push(small);
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn rollback(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let child = self.trail.pop().expect("trail nonempty");
            let parent = self.parent[child as usize];
            self.parent[child as usize] = child;
            self.size[parent as usize] -= self.size[child as usize];
            self.comps += 1;
        }
    }
}

/// Visits every edge subset of `edges`, reporting how many tagged/untagged
/// edges were kept and the resulting component count over `v` vertices.
fn scan_edge_subsets(
    v: usize,
    edges: &[(u32, u32, bool)],
    visit: &mut impl FnMut(u32, u32, u32),
) -> Result<(), GraphError> {
    if edges.len() > MAX_SCAN_EDGES {
        return Err(GraphError::SizeLimit);
    }
    let mut dsu = RollbackDsu::new(v);
    rec(&mut dsu, edges, 0, 0, 0, visit);
    return Ok(());

    fn rec(
        dsu: &mut RollbackDsu,
        edges: &[(u32, u32, bool)],
        t: usize,
        kept_tagged: u32,
        kept_plain: u32,
        visit: &mut impl FnMut(u32, u32, u32),
    ) {
        if t == edges.len() {
            visit(kept_tagged, kept_plain, dsu.comps);
            return;
        }
        let (a, b, tagged) = edges[t];
        // Keep the edge.
        let m = dsu.mark();
        dsu.union(a, b);
        rec(
            dsu,
            edges,
            t + 1,
            kept_tagged + tagged as u32,
            kept_plain + (!tagged) as u32,
            visit,
        );
        dsu.rollback(m);
        // Drop the edge.
        rec(dsu, edges, t + 1, kept_tagged, kept_plain, visit);
    }
}

/// Largest exponent `z` such that every degree-`m` family graph with
/// `2 <= k <= k_max` rows satisfies the growth bound `alpha(z) <= k/2`;
/// the closed form is `1 - 1/m`.
pub fn sum_region_bound(m: u32, k_max: usize) -> Result<Rat, GraphError> {
    let mut bound = Rat::one();
    for k in 2..=k_max {
        for g in sum_family(m, k)? {
            let total = g.edge_count() as u32;
            let edges: Vec<(u32, u32, bool)> =
                g.edge_pairs().into_iter().map(|(a, b)| (a as u32, b as u32, true)).collect();
            let half_k = Rat::new(k as i64, 2);
            scan_edge_subsets(k, &edges, &mut |kept, _, comps| {
                let broken = (total - kept) as i64;
                if broken > 0 {
                    // comps - broken*(1-z) <= k/2  =>  z <= (k/2 - comps + broken)/broken
                    let rhs = (half_k - Rat::from_integer(comps as i64)
                        + Rat::from_integer(broken))
                        / Rat::from_integer(broken);
                    if rhs < bound {
                        bound = rhs;
                    }
                }
            })?;
        }
    }
    Ok(bound)
}

pub fn sum_facet_bound(m: u32) -> Rat {
    Rat::one() - Rat::new(1, m as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionConstraint {
    /// Coefficient of the correlation exponent `z1`.
    pub corr_coeff: u32,
    /// Coefficient of the kernel exponent `z2`.
    pub kernel_coeff: u32,
    pub rhs: Rat,
}

#[derive(Clone, Debug)]
pub struct BilinearRegion {
    pub constraints: Vec<RegionConstraint>,
    /// Extreme points of the region, sorted lexicographically.
    pub vertices: Vec<(Rat, Rat)>,
}

/// Recovers the exact two-exponent integrability region of the paired-row
/// families with `2 <= k <= k_max`: every breaking of every family graph
/// yields a linear constraint `cf*z1 + cb*z2 <= k/2 - co + cf + cb`; the
/// binding ones are intersected with the unit box and the polygon vertices
/// are computed by exact pairwise line intersection.
pub fn bilinear_region(m: u32, n: u32, k_max: usize) -> Result<BilinearRegion, GraphError> {
    let mut tightest: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
    for k in 2..=k_max {
        let half_k = Rat::new(k as i64, 2);
        for g in bilinear_family(m, n, k)? {
            let (kernels, corrs) = g.edge_counts();
            let mut edges: Vec<(u32, u32, bool)> = g
                .kernel_edges()
                .into_iter()
                .map(|(a, b)| (a as u32, b as u32, false))
                .collect();
            edges.extend(g.corr.edge_pairs().into_iter().map(|(a, b)| (a as u32, b as u32, true)));
            scan_edge_subsets(2 * k, &edges, &mut |kept_corr, kept_ker, comps| {
                let cf = corrs as u32 - kept_corr;
                let cb = kernels as u32 - kept_ker;
                if cf == 0 && cb == 0 {
                    return;
                }
                let rhs = half_k - Rat::from_integer(comps as i64)
                    + Rat::from_integer((cf + cb) as i64);
                tightest
                    .entry((cf, cb))
                    .and_modify(|r| {
                        if rhs < *r {
                            *r = rhs;
                        }
                    })
                    .or_insert(rhs);
            })?;
        }
    }
    let constraints: Vec<RegionConstraint> = tightest
        .iter()
        .map(|(&(cf, cb), &rhs)| RegionConstraint { corr_coeff: cf, kernel_coeff: cb, rhs })
        .collect();
    // Half-planes a*z1 + b*z2 <= c: the graph constraints plus the unit box.
    let mut planes: Vec<(Rat, Rat, Rat)> = constraints
        .iter()
        .map(|c| {
            (
                Rat::from_integer(c.corr_coeff as i64),
                Rat::from_integer(c.kernel_coeff as i64),
                c.rhs,
            )
        })
        .collect();
    planes.push((-Rat::one(), Rat::zero(), Rat::zero()));
    planes.push((Rat::zero(), -Rat::one(), Rat::zero()));
    planes.push((Rat::one(), Rat::zero(), Rat::one()));
    planes.push((Rat::zero(), Rat::one(), Rat::one()));
    let mut verts: BTreeSet<(Rat, Rat)> = BTreeSet::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            let (a1, b1, c1) = planes[i];
            let (a2, b2, c2) = planes[j];
            let det = a1 * b2 - a2 * b1;
            if det == Rat::zero() {
                continue;
            }
            let z1 = (c1 * b2 - c2 * b1) / det;
            let z2 = (a1 * c2 - a2 * c1) / det;
            if planes.iter().all(|&(a, b, c)| a * z1 + b * z2 <= c) {
                verts.insert((z1, z2));
            }
        }
    }
    Ok(BilinearRegion { constraints, vertices: verts.into_iter().collect() })
}

/// Closed-form extreme points of the paired-row region for `m <= n`:
/// `(0,0)`, `(1-1/(m+n), 0)`, `(1-1/n, m/(2n))`, `(1-1/m, 1/2)`, `(0, 1/2)`,
/// deduplicated and sorted.
pub fn bilinear_vertex_formulas(m: u32, n: u32) -> Vec<(Rat, Rat)> {
    let (m, n) = (m as i64, n as i64);
    let mut set = BTreeSet::new();
    set.insert((Rat::zero(), Rat::zero()));
    set.insert((Rat::one() - Rat::new(1, m + n), Rat::zero()));
    set.insert((Rat::one() - Rat::new(1, n), Rat::new(m, 2 * n)));
    set.insert((Rat::one() - Rat::new(1, m), Rat::new(1, 2)));
    set.insert((Rat::zero(), Rat::new(1, 2)));
    set.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaFamily {
    Sum { m: u32 },
    Bilinear { m: u32, n: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantRow {
    pub k: usize,
    pub graphs: usize,
    /// Worst growth exponent over the family; `None` when the family is empty.
    pub alpha: Option<Rat>,
    pub bound: Rat,
    pub holds: bool,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantReport {
    pub rows: Vec<CumulantRow>,
    pub all_hold: bool,
    /// Closed-form boundary predicates evaluated at `z`.
    pub facets_hold: bool,
}

/// Checks the growth bound `alpha_k(z) <= k/2` across a generated family for
/// every order `2 <= k <= k_max`, and evaluates the closed-form facet
/// predicates of the region at `z`.
pub fn cumulant_inequality_check(
    family: &GammaFamily,
    z: &[Rat],
    k_max: usize,
) -> Result<CumulantReport, GraphError> {
    let mut rows = Vec::new();
    for k in 2..=k_max {
        let bound = Rat::new(k as i64, 2);
        let (count, alpha) = match family {
            GammaFamily::Sum { m } => {
                if z.len() != 1 {
                    return Err(GraphError::InvalidExponent);
                }
                let graphs = sum_family(*m, k)?;
                let mut worst: Option<Rat> = None;
                for g in &graphs {
                    let inc = g.incidence()?;
                    let zv = vec![z[0]; inc.e()];
                    let a = alpha_exponent(&inc, &zv, PcpCase::Torus)?;
                    worst = Some(worst.map_or(a, |w: Rat| w.max(a)));
                }
                (graphs.len(), worst)
            }
            GammaFamily::Bilinear { m, n } => {
                if z.len() != 2 {
                    return Err(GraphError::InvalidExponent);
                }
                let graphs = bilinear_family(*m, *n, k)?;
                let mut worst: Option<Rat> = None;
                for g in &graphs {
                    let inc = g.incidence()?;
                    let zv = g.exponent_vector(z[0], z[1]);
                    let a = alpha_exponent(&inc, &zv, PcpCase::Torus)?;
                    worst = Some(worst.map_or(a, |w: Rat| w.max(a)));
                }
                (graphs.len(), worst)
            }
        };
        let (holds, strict) = match alpha {
            Some(a) => (a <= bound, a < bound),
            None => (true, true),
        };
        rows.push(CumulantRow { k, graphs: count, alpha, bound, holds, strict });
    }
    let facets_hold = match family {
        GammaFamily::Sum { m } => z[0] <= sum_facet_bound(*m),
        GammaFamily::Bilinear { m, n } => {
            let (z1, z2) = (z[0], z[1]);
            let (mi, ma) = (*m.min(n) as i64, *m.max(n) as i64);
            let one = Rat::one();
            let total = Rat::new(mi + ma, 2) * (one - z1) + (one - z2) >= Rat::new(3, 2);
            let bundles = Rat::new(mi, 2) * (one - z1) + (one - z2) >= one;
            let kernels_only = z2 <= Rat::new(1, 2);
            total && bundles && kernels_only
        }
    };
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(CumulantReport { rows, all_hold, facets_hold })
}
