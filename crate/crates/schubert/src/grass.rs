//! Cell enumeration and classification over all basis subsets of a type,
//! Euler characteristics, counting polynomials, and the brute-force
//! finite-field oracle counting subrepresentations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::classify::{classify_contradiction, ContradictionKind};
use crate::dim::DimVector;
use crate::linalg::{gaussian_binomial, subspaces, Subspace};
use crate::rep::{CoefficientQuiver, Representation};
use crate::scalar::{Field, Fp, Rat};
use crate::solve::{find_solution, variable_transformation_fallback, SolveOutcome, SubSystem};
use crate::state::{beta_state, BasisSubset, BetaOutcome};
use crate::system::{build_reduced, LinkBase, SchubertSystem};
use crate::{Error, Result};

/// How a cell was certified affine.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AffineVia {
    /// A solution of the beta-state (hash of the orientation).
    Solution(u64),
    /// A solution found after the variable transformation.
    Transformed(u64),
    /// Point counts over F_2 and F_3 match q^dim.
    PointCount,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    Empty(ContradictionKind),
    Affine { dim: usize, via: AffineVia },
    Undetermined,
}

impl Classification {
    pub fn is_empty_cell(&self) -> bool {
        matches!(self, Classification::Empty(_))
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Classification::Affine { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Classification::Empty(k) => format!("empty({k})"),
            Classification::Affine { dim, .. } => format!("affine({dim})"),
            Classification::Undetermined => "undetermined".to_string(),
        }
    }
}

/// The type of a basis subset: its fiber cardinalities.
pub fn type_of<F: Field>(gamma: &CoefficientQuiver<F>, beta: &BasisSubset) -> DimVector {
    let mut e = vec![0i64; gamma.quiver.vertex_count()];
    for id in beta {
        e[gamma.over(*id)] += 1;
    }
    DimVector(e)
}

/// All subsets of the given type, in lexicographic order (per-fiber
/// combinations, fibers in vertex order).
pub fn subsets_of_type<F: Field>(
    gamma: &CoefficientQuiver<F>,
    e: &DimVector,
) -> Result<Vec<BasisSubset>> {
    let dims = gamma.dim_vector();
    if e.len() != dims.len() || !e.is_nonneg() || !e.leq(&dims) {
        return Err(Error::DimOutOfRange(format!("e={e} vs dim={dims}")));
    }
    let mut result: Vec<BasisSubset> = vec![BasisSubset::new()];
    for p in 0..gamma.quiver.vertex_count() {
        let fiber = gamma.fiber(p);
        let k = e[p] as usize;
        let combos = combinations(&fiber, k);
        let mut next = Vec::with_capacity(result.len() * combos.len());
        for base in &result {
            for combo in &combos {
                let mut b = base.clone();
                b.extend(combo.iter().copied());
                next.push(b);
            }
        }
        result = next;
    }
    Ok(result)
}

fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k > items.len() {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < items.len() - (k - i) {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Classifies one cell against a prebuilt reduced system. The pipeline is:
/// first-kind check, beta-state computation, solution search, the variable
/// transformation, and finally per-cell point counting over F_2 and F_3.
pub fn classify_cell_with(sys: &SchubertSystem<Rat>, beta: &BasisSubset) -> Classification {
    match beta_state(sys, beta) {
        BetaOutcome::Contradictory => {
            Classification::Empty(classify_contradiction(&sys.gamma, beta))
        }
        BetaOutcome::State(state) => {
            let dim = state.cell_dimension();
            let sub = SubSystem::from(&state);
            match find_solution(&sub) {
                SolveOutcome::Solved(sol) => Classification::Affine {
                    dim,
                    via: AffineVia::Solution(sol.hash()),
                },
                outcome => {
                    if let Some(transformed) = variable_transformation_fallback(&sub) {
                        if let SolveOutcome::Solved(sol) = find_solution(&transformed) {
                            return Classification::Affine {
                                dim,
                                via: AffineVia::Transformed(sol.hash()),
                            };
                        }
                    }
                    let _ = outcome;
                    if state_counts_match(&sub, dim) {
                        Classification::Affine {
                            dim,
                            via: AffineVia::PointCount,
                        }
                    } else {
                        Classification::Undetermined
                    }
                }
            }
        }
    }
}

pub fn classify_cell(gamma: &CoefficientQuiver<Rat>, beta: &BasisSubset) -> Classification {
    classify_cell_with(&build_reduced(gamma), beta)
}

/// Counts the F_q points of the residual equation system of a state and
/// compares them against q^dim for q in {2, 3}.
fn state_counts_match(sub: &SubSystem<Rat>, dim: usize) -> bool {
    let Ok(c2) = count_state_points::<2>(sub) else {
        return false;
    };
    let Ok(c3) = count_state_points::<3>(sub) else {
        return false;
    };
    c2 == (1u128 << dim) && c3 == 3u128.pow(dim as u32)
}

/// Number of F_P solutions of a state's residual equations (all
/// assignments of the surviving pair variables).
pub fn count_state_points<const P: u64>(sub: &SubSystem<Rat>) -> Result<u128> {
    let links: Vec<(usize, LinkBase, Fp<P>)> = sub
        .links
        .iter()
        .map(|l| Ok((l.tip, l.base, Fp::<P>(l.weight.to_fp(P)?))))
        .collect::<Result<Vec<_>>>()?;
    let var_index: BTreeMap<usize, usize> =
        sub.pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let nvars = sub.pairs.len();
    let mut assignment = vec![0u64; nvars];
    let mut count: u128 = 0;
    loop {
        let ok = sub.triples.iter().all(|&t| {
            let mut acc = Fp::<P>::zero();
            for (tip, base, w) in &links {
                if *tip != t {
                    continue;
                }
                let term = match base {
                    LinkBase::Const => *w,
                    LinkBase::Lin(p) => w.mul(&Fp::new(assignment[var_index[p]])),
                    LinkBase::Quad(p, q) => w
                        .mul(&Fp::new(assignment[var_index[p]]))
                        .mul(&Fp::new(assignment[var_index[q]])),
                };
                acc = acc.add(&term);
            }
            acc.is_zero()
        });
        if ok {
            count += 1;
        }
        let mut slot = 0;
        loop {
            if slot == nvars {
                return Ok(count);
            }
            assignment[slot] += 1;
            if assignment[slot] < P {
                break;
            }
            assignment[slot] = 0;
            slot += 1;
        }
        if nvars == 0 {
            return Ok(count);
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellRow {
    pub beta: Vec<u32>,
    pub e: DimVector,
    pub class: Classification,
}

#[derive(Clone, Debug)]
pub struct CellTable {
    pub e: DimVector,
    pub rows: Vec<CellRow>,
}

impl CellTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("beta,type,classification,dimension,contradiction_kind\n");
        for row in &self.rows {
            let beta: Vec<String> = row.beta.iter().map(u32::to_string).collect();
            let (class, dim, kind) = row_fields(&row.class);
            let _ = writeln!(
                s,
                "\"{}\",\"{}\",{},{},{}",
                beta.join(" "),
                row.e,
                class,
                dim,
                kind
            );
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .rows
            .iter()
            .map(|row| {
                let (class, dim, kind) = row_fields(&row.class);
                json!({
                    "beta": row.beta,
                    "type": row.e.0,
                    "classification": class,
                    "dimension": if dim == "-" { Value::Null } else { json!(dim.parse::<u64>().unwrap()) },
                    "contradiction_kind": kind,
                })
            })
            .collect::<Vec<_>>())
    }
}

fn row_fields(class: &Classification) -> (String, String, String) {
    match class {
        Classification::Empty(k) => ("empty".into(), "-".into(), k.to_string()),
        Classification::Affine { dim, .. } => ("affine".into(), dim.to_string(), "-".into()),
        Classification::Undetermined => ("undetermined".into(), "-".into(), "-".into()),
    }
}

/// Classifies every subset of the given type.
pub fn decomposition_table(gamma: &CoefficientQuiver<Rat>, e: &DimVector) -> Result<CellTable> {
    let sys = build_reduced(gamma);
    let subsets = subsets_of_type(gamma, e)?;
    let rows: Vec<CellRow> = subsets
        .par_iter()
        .map(|beta| CellRow {
            beta: beta.iter().copied().collect(),
            e: e.clone(),
            class: classify_cell_with(&sys, beta),
        })
        .collect();
    Ok(CellTable { e: e.clone(), rows })
}

/// The Euler characteristic: the number of affine cells once every cell is
/// classified Empty or Affine.
pub fn euler_characteristic(gamma: &CoefficientQuiver<Rat>, e: &DimVector) -> Result<u64> {
    let table = decomposition_table(gamma, e)?;
    let undet = table
        .rows
        .iter()
        .filter(|r| matches!(r.class, Classification::Undetermined))
        .count();
    if undet > 0 {
        return Err(Error::UndeterminedCells(undet));
    }
    Ok(table
        .rows
        .iter()
        .filter(|r| !r.class.is_empty_cell())
        .count() as u64)
}

/// The counting polynomial: sum of q^dim over the affine cells, as a
/// coefficient vector indexed by the exponent.
pub fn counting_polynomial(gamma: &CoefficientQuiver<Rat>, e: &DimVector) -> Result<Vec<u64>> {
    let table = decomposition_table(gamma, e)?;
    let mut coeffs: Vec<u64> = Vec::new();
    for row in &table.rows {
        match row.class {
            Classification::Empty(_) => {}
            Classification::Affine { dim, .. } => {
                if coeffs.len() <= dim {
                    coeffs.resize(dim + 1, 0);
                }
                coeffs[dim] += 1;
            }
            Classification::Undetermined => {
                return Err(Error::UndeterminedCells(1));
            }
        }
    }
    Ok(coeffs)
}

pub fn eval_poly(coeffs: &[u64], q: u128) -> u128 {
    coeffs
        .iter()
        .enumerate()
        .map(|(d, &c)| c as u128 * q.pow(d as u32))
        .sum()
}

pub fn poly_string(coeffs: &[u64]) -> String {
    let mut parts = Vec::new();
    for (d, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mono = match d {
            0 => c.to_string(),
            1 => {
                if c == 1 {
                    "q".to_string()
                } else {
                    format!("{c}*q")
                }
            }
            _ => {
                if c == 1 {
                    format!("q^{d}")
                } else {
                    format!("{c}*q^{d}")
                }
            }
        };
        parts.push(mono);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.reverse();
        parts.join(" + ")
    }
}

/// Enumeration of all extremal-successor-closed subsets of the basis; all
/// other subsets are contradictory of the first kind.
pub fn extremal_successor_closed_subsets<F: Field>(
    gamma: &CoefficientQuiver<F>,
) -> Vec<BasisSubset> {
    let ids: Vec<u32> = gamma.vertex_ids().collect();
    let extremal = crate::system::extremal_arrows(gamma);
    // Successor constraints: if src is in, tgt must be in.
    let constraints: Vec<(u32, u32)> = gamma
        .arrows()
        .iter()
        .enumerate()
        .filter(|&(k, _)| extremal[k])
        .map(|(_, a)| (a.src, a.tgt))
        .collect();
    let mut out = Vec::new();
    let mut current: BTreeMap<u32, bool> = BTreeMap::new();
    fn rec(
        ids: &[u32],
        pos: usize,
        constraints: &[(u32, u32)],
        current: &mut BTreeMap<u32, bool>,
        out: &mut Vec<BasisSubset>,
    ) {
        if pos == ids.len() {
            out.push(
                current
                    .iter()
                    .filter(|&(_, &inc)| inc)
                    .map(|(&id, _)| id)
                    .collect(),
            );
            return;
        }
        let id = ids[pos];
        'choice: for include in [false, true] {
            // Check constraints decided so far.
            for &(s, t) in constraints {
                let sv = if s == id {
                    Some(include)
                } else {
                    current.get(&s).copied()
                };
                let tv = if t == id {
                    Some(include)
                } else {
                    current.get(&t).copied()
                };
                if sv == Some(true) && tv == Some(false) {
                    continue 'choice;
                }
            }
            current.insert(id, include);
            rec(ids, pos + 1, constraints, current, out);
            current.remove(&id);
        }
    }
    rec(&ids, 0, &constraints, &mut current, &mut out);
    out.sort();
    out
}

/// A full classification sweep over every extremal-successor-closed subset,
/// aggregated per type. First-kind subsets are counted implicitly.
pub struct FullSweep {
    /// Per type: (Euler characteristic, counting-polynomial coefficients,
    /// number of undetermined cells).
    pub per_type: BTreeMap<DimVector, (u64, Vec<u64>, usize)>,
    /// Every classified (esc) cell.
    pub cells: Vec<(BasisSubset, Classification)>,
}

pub fn full_sweep(gamma: &CoefficientQuiver<Rat>) -> FullSweep {
    let sys = build_reduced(gamma);
    let esc = extremal_successor_closed_subsets(gamma);
    let cells: Vec<(BasisSubset, Classification)> = esc
        .into_par_iter()
        .map(|beta| {
            let class = classify_cell_with(&sys, &beta);
            (beta, class)
        })
        .collect();
    let mut per_type: BTreeMap<DimVector, (u64, Vec<u64>, usize)> = BTreeMap::new();
    for (beta, class) in &cells {
        let e = type_of(gamma, beta);
        let entry = per_type.entry(e).or_insert_with(|| (0, Vec::new(), 0));
        match class {
            Classification::Empty(_) => {}
            Classification::Affine { dim, .. } => {
                entry.0 += 1;
                if entry.1.len() <= *dim {
                    entry.1.resize(dim + 1, 0);
                }
                entry.1[*dim] += 1;
            }
            Classification::Undetermined => entry.2 += 1,
        }
    }
    FullSweep { per_type, cells }
}

/// Exact number of subrepresentations with dimension vector `e` over F_q.
pub fn points_over_fq(gamma: &CoefficientQuiver<Rat>, e: &DimVector, q: u64) -> Result<u128> {
    let dims = gamma.dim_vector();
    if e.len() != dims.len() || !e.is_nonneg() {
        return Err(Error::DimOutOfRange(format!("e={e}")));
    }
    if !e.leq(&dims) {
        return Ok(0);
    }
    Ok(points_over_fq_all(gamma, q)?.get(e).copied().unwrap_or(0))
}

/// Counts subrepresentations over F_q, bucketed by dimension vector.
pub fn points_over_fq_all(
    gamma: &CoefficientQuiver<Rat>,
    q: u64,
) -> Result<BTreeMap<DimVector, u128>> {
    match q {
        2 => subrep_counts::<2>(gamma),
        3 => subrep_counts::<3>(gamma),
        5 => subrep_counts::<5>(gamma),
        7 => subrep_counts::<7>(gamma),
        11 => subrep_counts::<11>(gamma),
        13 => subrep_counts::<13>(gamma),
        other => Err(Error::UnsupportedPrime(other)),
    }
}

fn subrep_counts<const P: u64>(
    gamma: &CoefficientQuiver<Rat>,
) -> Result<BTreeMap<DimVector, u128>> {
    let gp = gamma.map_weights(|w| {
        let v = w.to_fp(P)?;
        if v == 0 {
            // A vanishing weight would change the support of the matrices.
            return Err(Error::WeightNotInvertible(w.to_string(), P));
        }
        Ok(Fp::<P>(v))
    })?;
    let rep = gp.push_forward();
    Ok(count_subreps(&rep))
}

/// Enumerates subspace tuples vertex by vertex with pruning along arrows;
/// vertices whose neighbours are all enumerated are closed by Gaussian
/// binomial counting instead.
fn count_subreps<const P: u64>(rep: &Representation<Fp<P>>) -> BTreeMap<DimVector, u128> {
    let q = &rep.quiver;
    let nv = q.vertex_count();
    let neighbors = |v: usize| -> Vec<usize> {
        q.arrows()
            .iter()
            .filter_map(|a| {
                if a.src == v {
                    Some(a.tgt)
                } else if a.tgt == v {
                    Some(a.src)
                } else {
                    None
                }
            })
            .collect()
    };
    // Greedy independent set of "closable" vertices, scanned from the end.
    let mut closable = vec![false; nv];
    for v in (0..nv).rev() {
        if neighbors(v).iter().all(|&u| !closable[u]) {
            closable[v] = true;
        }
    }
    let enumerated: Vec<usize> = (0..nv).filter(|&v| !closable[v]).collect();
    let closed: Vec<usize> = (0..nv).filter(|&v| closable[v]).collect();

    let mut counts: BTreeMap<DimVector, u128> = BTreeMap::new();
    let mut chosen: Vec<Option<Subspace<Fp<P>>>> = vec![None; nv];

    fn rec<const P: u64>(
        rep: &Representation<Fp<P>>,
        enumerated: &[usize],
        closed: &[usize],
        pos: usize,
        chosen: &mut Vec<Option<Subspace<Fp<P>>>>,
        counts: &mut BTreeMap<DimVector, u128>,
    ) {
        if pos == enumerated.len() {
            close_out(rep, closed, chosen, counts);
            return;
        }
        let v = enumerated[pos];
        let dv = rep.dims[v];
        for k in 0..=dv {
            for sub in subspaces::<P>(dv, k) {
                chosen[v] = Some(sub);
                let ok = rep.quiver.arrows().iter().enumerate().all(|(aid, a)| {
                    match (&chosen[a.src], &chosen[a.tgt]) {
                        (Some(ns), Some(nt)) => {
                            nt.contains_subspace(&ns.image_under(&rep.mats[aid]))
                        }
                        _ => true,
                    }
                });
                if ok {
                    rec(rep, enumerated, closed, pos + 1, chosen, counts);
                }
            }
        }
        chosen[v] = None;
    }

    fn close_out<const P: u64>(
        rep: &Representation<Fp<P>>,
        closed: &[usize],
        chosen: &[Option<Subspace<Fp<P>>>],
        counts: &mut BTreeMap<DimVector, u128>,
    ) {
        // Per closed vertex: counts of admissible subspaces per dimension.
        let mut options: Vec<Vec<(i64, u128)>> = Vec::new();
        for &v in closed {
            let dv = rep.dims[v];
            let mut lower = Subspace::<Fp<P>>::zero(dv);
            let mut upper = Subspace::<Fp<P>>::whole(dv);
            for (aid, a) in rep.quiver.arrows().iter().enumerate() {
                if a.tgt == v {
                    if let Some(ns) = &chosen[a.src] {
                        lower = lower.sum(&ns.image_under(&rep.mats[aid]));
                    }
                }
                if a.src == v {
                    if let Some(nt) = &chosen[a.tgt] {
                        let pre = nt.preimage_under(&rep.mats[aid]);
                        upper = intersect(&upper, &pre);
                    }
                }
            }
            if !upper.contains_subspace(&lower) {
                return;
            }
            let room = upper.dim() - lower.dim();
            let base = lower.dim();
            let opts: Vec<(i64, u128)> = (0..=room)
                .map(|extra| ((base + extra) as i64, gaussian_binomial(room, extra, P)))
                .collect();
            options.push(opts);
        }
        // Base dimension vector from the enumerated vertices.
        let mut base_e = vec![0i64; rep.dims.len()];
        for (v, c) in chosen.iter().enumerate() {
            if let Some(s) = c {
                base_e[v] = s.dim() as i64;
            }
        }
        // Cartesian product over the closed vertices.
        let mut stack: Vec<(usize, DimVector, u128)> = vec![(0, DimVector(base_e), 1)];
        while let Some((idx, e, mult)) = stack.pop() {
            if idx == closed.len() {
                *counts.entry(e).or_insert(0) += mult;
                continue;
            }
            for (dim_v, cnt) in &options[idx] {
                if *cnt == 0 {
                    continue;
                }
                let mut e2 = e.clone();
                e2.0[closed[idx]] = *dim_v;
                stack.push((idx + 1, e2, mult * cnt));
            }
        }
    }

    rec(rep, &enumerated, &closed, 0, &mut chosen, &mut counts);
    counts
}

/// Intersection of two subspaces given by row bases.
fn intersect<F: Field>(a: &Subspace<F>, b: &Subspace<F>) -> Subspace<F> {
    // x in A cap B iff x in A and the reduction of x by B vanishes. Compute
    // the kernel of reduce_B restricted to A.
    let rows: Vec<Vec<F>> = (0..a.dim()).map(|i| a.basis.row(i).to_vec()).collect();
    if rows.is_empty() {
        return Subspace::zero(a.ambient);
    }
    // Solve for coefficient vectors c with reduce_B(sum c_i row_i) = 0.
    let reduced: Vec<Vec<F>> = rows.iter().map(|r| b.reduce(r)).collect();
    let mut mat_rows = Vec::new();
    for col in 0..a.ambient {
        mat_rows.push(reduced.iter().map(|r| r[col].clone()).collect::<Vec<F>>());
    }
    let m = crate::linalg::Mat::from_rows(mat_rows);
    let kernel = m.kernel_basis();
    let vectors: Vec<Vec<F>> = kernel
        .iter()
        .map(|c| {
            let mut v = vec![F::zero(); a.ambient];
            for (ci, row) in c.iter().zip(&rows) {
                if !ci.is_zero() {
                    for (slot, x) in v.iter_mut().zip(row) {
                        *slot = slot.add(&ci.mul(x));
                    }
                }
            }
            v
        })
        .collect();
    Subspace::span(a.ambient, vectors)
}
