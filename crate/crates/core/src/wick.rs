//! Set-partition cumulant algebra: moment/cumulant conversion on subset
//! lattices, Wick-product coefficients, Appell polynomials, diagram
//! enumeration over slot tables, and compilation of sum/bilinear-form
//! cumulants into graph data with symbol tags and innovation-cumulant
//! weights.
//!
//! Exact arithmetic throughout the lattice algebra: all conversions operate
//! on `BigRat` so round trips are identities, not approximations.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, ToPrimitive, Zero};

use crate::graphs::IncidenceMatrix;
use crate::BigRat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WickError {
    SizeLimit,
    MissingValue,
    Degenerate,
}

impl core::fmt::Display for WickError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            WickError::SizeLimit => "table or index set exceeds the enumeration cap",
            WickError::MissingValue => "functional input has the wrong subset-lattice length",
            WickError::Degenerate => "innovation sequence must have positive variance",
        };
        f.write_str(msg)
    }
}

/// Slot table: rows of given sizes, slots numbered row-major from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramTable {
    row_sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl DiagramTable {
    pub fn new(row_sizes: &[usize]) -> Result<Self, WickError> {
        if row_sizes.is_empty() || row_sizes.iter().any(|&n| n == 0) {
            return Err(WickError::MissingValue);
        }
        let mut offsets = Vec::with_capacity(row_sizes.len() + 1);
        let mut acc = 0;
        for &n in row_sizes {
            offsets.push(acc);
            acc += n;
        }
        offsets.push(acc);
        Ok(DiagramTable { row_sizes: row_sizes.to_vec(), offsets })
    }

    pub fn rows(&self) -> usize {
        self.row_sizes.len()
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn row_of(&self, slot: usize) -> usize {
        debug_assert!(slot < self.total());
        match self.offsets.binary_search(&slot) {
            Ok(i) if i < self.row_sizes.len() => i,
            Ok(i) => i - 1,
            Err(i) => i - 1,
        }
    }
}

/// A partition of the table's slots into nonempty blocks ("edges"). Blocks
/// are kept canonical: each sorted, blocks ordered by least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub blocks: Vec<Vec<usize>>,
}

impl Diagram {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Diagram { blocks }
    }

    pub fn has_flat(&self, table: &DiagramTable) -> bool {
        self.blocks
            .iter()
            .any(|b| b.iter().all(|&s| table.row_of(s) == table.row_of(b[0])))
    }

    pub fn has_singletons(&self) -> bool {
        self.blocks.iter().any(|b| b.len() == 1)
    }

    pub fn is_gaussian(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    /// Connected in the table sense: the blocks do not split the rows into
    /// two or more mutually unlinked groups.
    pub fn is_connected(&self, table: &DiagramTable) -> bool {
        let k = table.rows();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for b in &self.blocks {
            let r0 = table.row_of(b[0]);
            for &s in &b[1..] {
                let (a, c) = (find(&mut parent, r0), find(&mut parent, table.row_of(s)));
                parent[a] = c;
            }
        }
        let root = find(&mut parent, 0);
        (1..k).all(|r| find(&mut parent, r) == root)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiagramConstraints {
    pub connected: bool,
    pub no_flat: bool,
    pub gaussian: bool,
    pub no_singletons: bool,
}

const GENERAL_SLOT_CAP: usize = 12;
const GAUSSIAN_SLOT_CAP: usize = 16;

fn passes(d: &Diagram, table: &DiagramTable, c: DiagramConstraints) -> bool {
    (!c.no_flat || !d.has_flat(table))
        && (!c.no_singletons || !d.has_singletons())
        && (!c.gaussian || d.is_gaussian())
        && (!c.connected || d.is_connected(table))
}

fn rgs_partitions(k: usize, mut visit: impl FnMut(&[usize])) {
    // restricted-growth strings: rgs[i] <= 1 + max(rgs[..i])
    let mut rgs = vec![0usize; k];
    let mut maxes = vec![0usize; k]; // maxes[i] = max(rgs[..=i])
    loop {
        visit(&rgs);
        let mut i = k;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let prev_max = maxes[i - 1];
            if rgs[i] <= prev_max {
                rgs[i] += 1;
                maxes[i] = prev_max.max(rgs[i]);
                for j in i + 1..k {
                    rgs[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
        }
    }
}

fn matchings(slots: &[usize], table: &DiagramTable, c: DiagramConstraints, out: &mut Vec<Diagram>) {
    fn rec(
        free: &mut Vec<usize>,
        acc: &mut Vec<Vec<usize>>,
        table: &DiagramTable,
        c: DiagramConstraints,
        out: &mut Vec<Diagram>,
    ) {
        if free.is_empty() {
            let d = Diagram::new(acc.clone());
            if passes(&d, table, c) {
                out.push(d);
            }
            return;
        }
        let first = free[0];
        for i in 1..free.len() {
            let mate = free[i];
            if c.no_flat && table.row_of(first) == table.row_of(mate) {
                continue;
            }
            let mut rest: Vec<usize> = Vec::with_capacity(free.len() - 2);
            rest.extend(free[1..i].iter().copied());
            rest.extend(free[i + 1..].iter().copied());
            acc.push(vec![first, mate]);
            rec(&mut rest, acc, table, c, out);
            acc.pop();
        }
    }
    let mut free = slots.to_vec();
    rec(&mut free, &mut Vec::new(), table, c, out);
}

/// Exhaustive diagram list under the given constraints. The Gaussian
/// constraint short-circuits to perfect-matching enumeration (odd slot
/// totals return the empty list).
pub fn enumerate_diagrams(
    table: &DiagramTable,
    c: DiagramConstraints,
) -> Result<Vec<Diagram>, WickError> {
    let k = table.total();
    let mut out = Vec::new();
    if c.gaussian {
        if k > GAUSSIAN_SLOT_CAP {
            return Err(WickError::SizeLimit);
        }
        if k % 2 == 1 {
            return Ok(out);
        }
        let slots: Vec<usize> = (0..k).collect();
        matchings(&slots, table, c, &mut out);
        return Ok(out);
    }
    if k > GENERAL_SLOT_CAP {
        return Err(WickError::SizeLimit);
    }
    rgs_partitions(k, |rgs| {
        let nb = rgs.iter().max().map_or(0, |&m| m + 1);
        let mut blocks = vec![Vec::new(); nb];
        for (slot, &b) in rgs.iter().enumerate() {
            blocks[b].push(slot);
        }
        let d = Diagram { blocks };
        if passes(&d, table, c) {
            out.push(d);
        }
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// subset-lattice conversions

fn lattice_len_ok(len: usize, cap: usize) -> Result<usize, WickError> {
    if len < 2 || !len.is_power_of_two() {
        return Err(WickError::MissingValue);
    }
    let n = len.trailing_zeros() as usize;
    if n > cap {
        return Err(WickError::SizeLimit);
    }
    Ok(n)
}

/// Cumulants from moments on the subset lattice of {0..n-1}: input indexed
/// by bitmask with moments[0] = 1. Uses the first-element recursion of the
/// moment-cumulant identity m(W) = Σ_{U ∋ min W} χ(U) m(W∖U).
pub fn moments_to_cumulants(moments: &[BigRat]) -> Result<Vec<BigRat>, WickError> {
    let n = lattice_len_ok(moments.len(), 10)?;
    if !moments[0].is_one() {
        return Err(WickError::MissingValue);
    }
    let full = 1usize << n;
    let mut chi = vec![BigRat::zero(); full];
    for w in 1..full {
        let low = w & w.wrapping_neg();
        let rest = w & !low;
        let mut acc = moments[w].clone();
        // proper submasks of w containing the lowest bit
        let mut u = rest;
        loop {
            u = (u.wrapping_sub(1)) & rest;
            let cand = u | low;
            if cand != w {
                acc -= &chi[cand] * &moments[w & !cand];
            }
            if u == 0 {
                break;
            }
        }
        chi[w] = acc;
    }
    Ok(chi)
}

/// Inverse conversion: moments from cumulants (entry 0 of the input is
/// ignored; the output has moments[0] = 1).
pub fn cumulants_to_moments(cumulants: &[BigRat]) -> Result<Vec<BigRat>, WickError> {
    let n = lattice_len_ok(cumulants.len(), 10)?;
    let full = 1usize << n;
    let mut m = vec![BigRat::zero(); full];
    m[0] = BigRat::one();
    for w in 1..full {
        let low = w & w.wrapping_neg();
        let rest = w & !low;
        let mut acc = BigRat::zero();
        let mut u = rest;
        loop {
            let cand = u | low;
            acc += &cumulants[cand] * &m[w & !cand];
            if u == 0 {
                break;
            }
            u = (u.wrapping_sub(1)) & rest;
        }
        m[w] = acc;
    }
    Ok(m)
}

/// Alternating partition sum g(S) = Σ_{{V} ⊢ S} (-1)^r χ(V_1)…χ(V_r),
/// the coefficient functional of the inverted Wick recursion.
fn signed_partition_sum(cumulants: &[BigRat], full: usize) -> Vec<BigRat> {
    let mut g = vec![BigRat::zero(); full];
    g[0] = BigRat::one();
    for w in 1..full {
        let low = w & w.wrapping_neg();
        let rest = w & !low;
        let mut acc = BigRat::zero();
        let mut u = rest;
        loop {
            let cand = u | low;
            acc -= &cumulants[cand] * &g[w & !cand];
            if u == 0 {
                break;
            }
            u = (u.wrapping_sub(1)) & rest;
        }
        g[w] = acc;
    }
    g
}

/// Coefficients c_U with :Y^W: = Σ_{U ⊆ W} c_U · Y^U for the full index set
/// W = {0..n-1}; input cumulants on the subset lattice. c_U = g(W∖U) for the
/// alternating partition functional g.
pub fn wick_coefficients(cumulants: &[BigRat]) -> Result<Vec<BigRat>, WickError> {
    let n = lattice_len_ok(cumulants.len(), 8)?;
    let full = 1usize << n;
    let g = signed_partition_sum(cumulants, full);
    Ok((0..full).map(|u| g[(full - 1) & !u].clone()).collect())
}

// ---------------------------------------------------------------------------
// Appell polynomials

/// Multivariate polynomial with exact rational coefficients, keyed by
/// exponent multi-index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppellPolynomial {
    pub vars: usize,
    pub coeffs: BTreeMap<Vec<u8>, BigRat>,
}

impl AppellPolynomial {
    pub fn coeff(&self, monomial: &[u8]) -> BigRat {
        self.coeffs.get(monomial).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.vars);
        let mut acc = 0.0;
        for (mono, c) in &self.coeffs {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for (i, &p) in mono.iter().enumerate() {
                for _ in 0..p {
                    term *= x[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Formal partial derivative in variable j.
    pub fn derivative(&self, j: usize) -> AppellPolynomial {
        let mut coeffs = BTreeMap::new();
        for (mono, c) in &self.coeffs {
            if mono[j] == 0 {
                continue;
            }
            let mut m = mono.clone();
            m[j] -= 1;
            let scaled = c * BigRat::from_integer((mono[j] as i64).into());
            *coeffs.entry(m).or_insert_with(BigRat::zero) += scaled;
        }
        coeffs.retain(|_, c| !c.is_zero());
        AppellPolynomial { vars: self.vars, coeffs }
    }
}

/// Appell polynomial P_{n_1..n_k}: the Wick product of n_j copies of each
/// variable, as an explicit coefficient table. `cumulants(α)` supplies the
/// joint cumulant with α_j repetitions of variable j, for 1 ≤ |α| ≤ Σ orders.
pub fn appell_polynomial(
    orders: &[u8],
    cumulants: &dyn Fn(&[u8]) -> BigRat,
) -> Result<AppellPolynomial, WickError> {
    let vars = orders.len();
    let total: usize = orders.iter().map(|&o| o as usize).sum();
    if vars == 0 || total == 0 {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0u8; vars.max(1)], BigRat::one());
        return Ok(AppellPolynomial { vars: vars.max(1), coeffs });
    }
    if total > 8 {
        return Err(WickError::SizeLimit);
    }
    // expand the multiset into slots and reuse the set-lattice machinery
    let mut slot_var = Vec::with_capacity(total);
    for (j, &o) in orders.iter().enumerate() {
        for _ in 0..o {
            slot_var.push(j);
        }
    }
    let full = 1usize << total;
    let mut chi = vec![BigRat::zero(); full];
    for (w, slot) in chi.iter_mut().enumerate().skip(1) {
        let mut alpha = vec![0u8; vars];
        for (s, &v) in slot_var.iter().enumerate() {
            if w >> s & 1 == 1 {
                alpha[v] += 1;
            }
        }
        *slot = cumulants(&alpha);
    }
    let g = signed_partition_sum(&chi, full);
    let mut coeffs: BTreeMap<Vec<u8>, BigRat> = BTreeMap::new();
    for u in 0..full {
        let c = &g[(full - 1) & !u];
        if c.is_zero() {
            continue;
        }
        let mut mono = vec![0u8; vars];
        for (s, &v) in slot_var.iter().enumerate() {
            if u >> s & 1 == 1 {
                mono[v] += 1;
            }
        }
        *coeffs.entry(mono).or_insert_with(BigRat::zero) += c.clone();
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(AppellPolynomial { vars, coeffs })
}

/// Univariate shorthand: cumulants[j] = χ_j for j = 1..=n (index 0 ignored).
pub fn appell_univariate(n: u8, cumulants: &[BigRat]) -> Result<AppellPolynomial, WickError> {
    if cumulants.len() <= n as usize {
        return Err(WickError::MissingValue);
    }
    appell_polynomial(&[n], &|alpha: &[u8]| cumulants[alpha[0] as usize].clone())
}

// ---------------------------------------------------------------------------
// diagram-formula evaluation

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CumulantMode {
    /// E[Y^W]: all diagrams
    Moment,
    /// E[:Y^{W_1}:…:Y^{W_k}:]: no flat edges
    WickMoment,
    /// χ(Y^{W_1},…,Y^{W_k}): connected diagrams
    Cumulant,
    /// χ(:Y^{W_1}:,…,:Y^{W_k}:): connected, no flat edges
    WickCumulant,
}

impl CumulantMode {
    fn constraints(self) -> DiagramConstraints {
        match self {
            CumulantMode::Moment => DiagramConstraints::default(),
            CumulantMode::WickMoment => {
                DiagramConstraints { no_flat: true, ..Default::default() }
            }
            CumulantMode::Cumulant => {
                DiagramConstraints { connected: true, ..Default::default() }
            }
            CumulantMode::WickCumulant => DiagramConstraints {
                connected: true,
                no_flat: true,
                ..Default::default()
            },
        }
    }
}

/// Σ_γ ∏_j χ(Y^{V_j}) over the diagram class of the mode; the oracle maps a
/// sorted slot list to the block cumulant.
pub fn diagram_cumulant(
    table: &DiagramTable,
    oracle: &dyn Fn(&[usize]) -> f64,
    mode: CumulantMode,
) -> Result<f64, WickError> {
    let diagrams = enumerate_diagrams(table, mode.constraints())?;
    let mut acc = 0.0;
    for d in &diagrams {
        let mut term = 1.0;
        for b in &d.blocks {
            term *= oracle(b);
        }
        acc += term;
    }
    Ok(acc)
}

/// Exact-rational twin of `diagram_cumulant` for oracle values in BigRat.
pub fn diagram_cumulant_exact(
    table: &DiagramTable,
    oracle: &dyn Fn(&[usize]) -> BigRat,
    mode: CumulantMode,
) -> Result<BigRat, WickError> {
    let diagrams = enumerate_diagrams(table, mode.constraints())?;
    let mut acc = BigRat::zero();
    for d in &diagrams {
        let mut term = BigRat::one();
        for b in &d.blocks {
            term *= oracle(b);
        }
        acc += term;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// innovation cumulants and cumulant-graph compilation

/// Innovation cumulants d_k, indexed by order (entries 0 and 1 are fixed at
/// zero for centered innovations).
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSequence {
    d: Vec<f64>,
}

impl CumulantSequence {
    pub fn new(d: Vec<f64>) -> Result<Self, WickError> {
        if d.len() < 3 || d[2] <= 0.0 {
            return Err(WickError::Degenerate);
        }
        if d[0] != 0.0 || d[1] != 0.0 {
            return Err(WickError::Degenerate);
        }
        Ok(CumulantSequence { d })
    }

    pub fn gaussian(sigma2: f64) -> Self {
        CumulantSequence { d: vec![0.0, 0.0, sigma2] }
    }

    /// d_k, zero beyond the stored orders.
    pub fn order(&self, k: usize) -> f64 {
        self.d.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_order(&self) -> usize {
        self.d.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolTag {
    /// spectral density f (order-2 correlation block)
    Correlation,
    /// quadratic-form kernel b
    Kernel,
    /// order-v cumulant spectral density f_v (block of size v ≥ 3)
    HigherOrder(usize),
}

/// One edge of a compiled cumulant graph: the owning vertex of every slot in
/// the block (kernel edges have synthetic slots). Pairwise edges have
/// exactly two entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledEdge {
    pub vertices: Vec<usize>,
    pub slots: Vec<usize>,
    pub tag: SymbolTag,
}

/// A connected no-flat diagram of the sum/bilinear table, rendered as graph
/// data: vertices, edges with symbol tags, and the innovation-cumulant
/// weight κ_γ as the multiset of correlation-block sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledGraph {
    pub vertices: usize,
    pub edges: Vec<CompiledEdge>,
    pub kappa: Vec<usize>,
    pub diagram: Diagram,
}

impl CompiledGraph {
    /// ∏_j d_{|V_j|} under the given innovation cumulants.
    pub fn kappa_value(&self, seq: &CumulantSequence) -> f64 {
        self.kappa.iter().map(|&v| seq.order(v)).product()
    }

    /// Slot-incidence degree of a vertex (each incident slot counts once).
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| e.vertices.iter().filter(|&&w| w == v).count())
            .sum()
    }

    pub fn is_gaussian_diagram(&self) -> bool {
        self.kappa.iter().all(|&v| v == 2)
    }

    /// Signed incidence matrix (lower-vertex tail) when every edge is
    /// pairwise; hyperedge diagrams have no single-column representation.
    pub fn incidence(&self) -> Option<IncidenceMatrix> {
        let mut list = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.vertices.len() != 2 || e.vertices[0] == e.vertices[1] {
                return None;
            }
            list.push((e.vertices[0], e.vertices[1]));
        }
        IncidenceMatrix::from_edge_list(self.vertices, &list).ok()
    }

    /// Bilinear graphs only: true when every correlation edge crosses from
    /// the left vertex block {0..k} to the right block {k..2k}.
    pub fn is_bipartite(&self, k: usize) -> bool {
        self.edges.iter().all(|e| {
            e.tag == SymbolTag::Kernel
                || e.vertices.len() != 2
                || (e.vertices[0] < k) != (e.vertices[1] < k)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFamilyKind {
    /// χ_k of S_T^{(m)}: table of k rows × m slots, graph on k vertices.
    Sum { m: usize, k: usize },
    /// χ_k of Q_T^{(m,n)}: k rows of m t-slots and n s-slots, graph on 2k
    /// vertices (left t_j = j, right s_j = k + j) plus k kernel edges.
    Bilinear { m: usize, n: usize, k: usize },
}

/// All connected no-flat no-singleton diagrams of the family table, compiled
/// to graph data. Counts are raw — equal-by-symmetry diagrams are emitted
/// individually.
pub fn compile_cumulant_graphs(kind: GraphFamilyKind) -> Result<Vec<CompiledGraph>, WickError> {
    let constraints = DiagramConstraints {
        connected: true,
        no_flat: true,
        no_singletons: true,
        ..Default::default()
    };
    match kind {
        GraphFamilyKind::Sum { m, k } => {
            if !(1..=3).contains(&m) || !(1..=4).contains(&k) {
                return Err(WickError::SizeLimit);
            }
            let table = DiagramTable::new(&vec![m; k])?;
            let diagrams = enumerate_diagrams(&table, constraints)?;
            Ok(diagrams
                .into_iter()
                .map(|d| {
                    let edges = d
                        .blocks
                        .iter()
                        .map(|b| CompiledEdge {
                            vertices: b.iter().map(|&s| table.row_of(s)).collect(),
                            slots: b.clone(),
                            tag: if b.len() == 2 {
                                SymbolTag::Correlation
                            } else {
                                SymbolTag::HigherOrder(b.len())
                            },
                        })
                        .collect();
                    let kappa = d.blocks.iter().map(|b| b.len()).collect();
                    CompiledGraph { vertices: k, edges, kappa, diagram: d }
                })
                .collect())
        }
        GraphFamilyKind::Bilinear { m, n, k } => {
            if !(1..=3).contains(&m) || !(1..=3).contains(&n) || !(1..=4).contains(&k) {
                return Err(WickError::SizeLimit);
            }
            let table = DiagramTable::new(&vec![m + n; k])?;
            let diagrams = enumerate_diagrams(&table, constraints)?;
            // slot (j, i): i < m is a t-slot owned by vertex j, otherwise an
            // s-slot owned by vertex k + j
            let owner = |slot: usize| {
                let row = table.row_of(slot);
                let pos = slot - row * (m + n);
                if pos < m {
                    row
                } else {
                    k + row
                }
            };
            Ok(diagrams
                .into_iter()
                .map(|d| {
                    let mut edges: Vec<CompiledEdge> = (0..k)
                        .map(|j| CompiledEdge {
                            vertices: vec![j, k + j],
                            slots: Vec::new(),
                            tag: SymbolTag::Kernel,
                        })
                        .collect();
                    for b in &d.blocks {
                        edges.push(CompiledEdge {
                            vertices: b.iter().map(|&s| owner(s)).collect(),
                            slots: b.clone(),
                            tag: if b.len() == 2 {
                                SymbolTag::Correlation
                            } else {
                                SymbolTag::HigherOrder(b.len())
                            },
                        });
                    }
                    let kappa = d.blocks.iter().map(|b| b.len()).collect();
                    CompiledGraph { vertices: 2 * k, edges, kappa, diagram: d }
                })
                .collect())
        }
    }
}

/// For m = n the two halves of each row may be exchanged (the kernel symbol
/// is even); returns the first flip of row roles that renders every pairwise
/// correlation edge left-right, if one exists. k ≤ 4 keeps this a 2^k scan.
pub fn bipartite_normal_form(graph: &CompiledGraph, k: usize) -> Option<CompiledGraph> {
    if graph.vertices != 2 * k {
        return None;
    }
    for mask in 0u32..(1 << k) {
        let flip = |v: usize| {
            let row = v % k;
            if mask >> row & 1 == 1 {
                if v < k {
                    v + k
                } else {
                    v - k
                }
            } else {
                v
            }
        };
        let mut cand = graph.clone();
        for e in &mut cand.edges {
            for v in &mut e.vertices {
                *v = flip(*v);
            }
        }
        if cand.is_bipartite(k) {
            return Some(cand);
        }
    }
    None
}
