//! Combinatorial detection of empty Schubert cells: contradictory subsets of
//! the first kind (failure of extremal successor closure) and of the second
//! kind (ladder subquivers whose residual equations force an inconsistent
//! value).

use std::collections::BTreeMap;

use crate::quiver::ArrowId;
use crate::rep::CoefficientQuiver;
use crate::scalar::Field;
use crate::state::{is_extremal_successor_closed, BasisSubset};
use crate::system::extremal_arrows;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ContradictionKind {
    FirstKind,
    SecondKind,
    None,
}

impl std::fmt::Display for ContradictionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ContradictionKind::FirstKind => "first-kind",
            ContradictionKind::SecondKind => "second-kind",
            ContradictionKind::None => "none",
        })
    }
}

/// First kind: some extremal arrow has its source in beta but not its target.
pub fn is_first_kind<F: Field>(gamma: &CoefficientQuiver<F>, beta: &BasisSubset) -> bool {
    let extremal = extremal_arrows(gamma);
    !is_extremal_successor_closed(gamma, &extremal, beta)
}

/// A witness for a second-kind contradiction: the ladder subquiver with an
/// outer vertex at each end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderWitness {
    pub k: u32,
    pub l: u32,
    pub x: ArrowId,
    pub y: ArrowId,
    pub rungs: Vec<ArrowId>,
    pub i_rail: Vec<u32>,
    pub j_rail: Vec<u32>,
}

struct LadderSearch<'a, F: Field> {
    gamma: &'a CoefficientQuiver<F>,
    beta: &'a BasisSubset,
    extremal: Vec<bool>,
}

/// The residual reduced equation at a relevant triple after the normal-form
/// zeros are substituted: linear terms on surviving pairs plus a constant.
/// `None` when a quadratic term survives.
struct CleanEquation<F> {
    linear: BTreeMap<(u32, u32), F>,
    constant: F,
}

impl<'a, F: Field> LadderSearch<'a, F> {
    fn arrows_over(&self, v: ArrowId) -> impl Iterator<Item = &crate::rep::GammaArrow<F>> {
        self.gamma.arrows().iter().filter(move |ga| ga.arrow == v)
    }

    fn nf_zero(&self, i: u32, j: u32) -> bool {
        self.beta.contains(&i) || !self.beta.contains(&j)
    }

    /// Reduced equation of (v, t, s) with the normal-form zeros dropped.
    /// `None` when the triple is absent from the reduced system (its arrow
    /// is extremal, so the equation is void on successor-closed subsets).
    fn cleaned_equation(&self, v: ArrowId, t: u32, s: u32) -> Option<CleanEquation<F>> {
        let void = self
            .gamma
            .arrows()
            .iter()
            .enumerate()
            .any(|(idx, ga)| ga.arrow == v && ga.src == s && ga.tgt == t && self.extremal[idx]);
        if void {
            return None;
        }
        let mut eq = CleanEquation {
            linear: BTreeMap::new(),
            constant: F::zero(),
        };
        let add = |key: (u32, u32), w: F, eq: &mut CleanEquation<F>| {
            let cur = eq.linear.remove(&key).unwrap_or_else(F::zero);
            let next = cur.add(&w);
            if !next.is_zero() {
                eq.linear.insert(key, next);
            }
        };
        for ga in self.arrows_over(v) {
            if ga.src == s && ga.tgt > t && !self.nf_zero(t, ga.tgt) {
                add((t, ga.tgt), ga.weight.clone(), &mut eq);
            }
            if ga.src < s && ga.tgt > t {
                let left_zero = self.nf_zero(t, ga.tgt);
                let right_zero = self.nf_zero(ga.src, s);
                if !left_zero && !right_zero {
                    // A surviving quadratic term: the ladder derivation does
                    // not apply to this triple.
                    return None;
                }
            }
            if ga.src < s && ga.tgt == t && !self.nf_zero(ga.src, s) {
                add((ga.src, s), ga.weight.neg(), &mut eq);
            }
            if ga.src == s && ga.tgt == t {
                eq.constant = eq.constant.sub(&ga.weight);
            }
        }
        Some(eq)
    }

    /// Candidate outer vertices at a column (i, j) via the arrow `v`.
    fn end_candidates(&self, v: ArrowId, i: u32, j: u32) -> Vec<(u32, bool)> {
        let arr = self.gamma.quiver.arrow(v);
        let col_over = self.gamma.over(i);
        if arr.src != col_over && arr.tgt != col_over {
            return Vec::new();
        }
        let outer_vertex = if arr.src == col_over {
            arr.tgt
        } else {
            arr.src
        };
        let outer_is_source = arr.src == outer_vertex;
        let mut out = Vec::new();
        for ga in self.arrows_over(v) {
            let end = if outer_is_source { ga.src } else { ga.tgt };
            let rail = if outer_is_source { ga.tgt } else { ga.src };
            if (rail == i || rail == j) && !out.contains(&(end, outer_is_source)) {
                out.push((end, outer_is_source));
            }
        }
        out
    }

    /// Membership condition: an outer vertex lies in beta iff it is a source.
    fn end_membership_ok(&self, end: u32, is_source: bool) -> bool {
        self.beta.contains(&end) == is_source
    }

    /// Solves the end equation at the k-side for the value of w_{i0,j0}.
    /// Returns Err(true) when the equation alone is already contradictory,
    /// Err(false) when the ladder derivation does not apply.
    fn end_value(
        &self,
        v: ArrowId,
        end: u32,
        is_source: bool,
        i0: u32,
        j0: u32,
    ) -> Result<F, bool> {
        let (t, s) = if is_source { (i0, end) } else { (end, j0) };
        let eq = self.cleaned_equation(v, t, s).ok_or(false)?;
        let mut coeff = F::zero();
        for (key, w) in &eq.linear {
            if *key == (i0, j0) {
                coeff = w.clone();
            } else {
                // A foreign variable survives: not a closed derivation.
                return Err(false);
            }
        }
        if coeff.is_zero() {
            // Constant-only equation: contradictory iff nonzero.
            return Err(!eq.constant.is_zero());
        }
        Ok(eq.constant.neg().div(&coeff).expect("nonzero coefficient"))
    }

    /// Propagates the forced value across a rung from column e to e+1.
    fn propagate(&self, z: ArrowId, cols: ((u32, u32), (u32, u32)), value: &F) -> Result<F, bool> {
        let (prev, next) = cols;
        // The relevant triple of the rung: target-fiber vertex outside beta,
        // source-fiber vertex inside.
        let arr = self.gamma.quiver.arrow(z);
        let prev_over = self.gamma.over(prev.0);
        let outward = arr.src == prev_over;
        let (t, s) = if outward {
            (next.0, prev.1)
        } else {
            (prev.0, next.1)
        };
        let eq = self.cleaned_equation(z, t, s).ok_or(false)?;
        let mut c_prev = F::zero();
        let mut c_next = F::zero();
        for (key, w) in &eq.linear {
            if *key == prev {
                c_prev = w.clone();
            } else if *key == next {
                c_next = w.clone();
            } else {
                return Err(false);
            }
        }
        if c_next.is_zero() {
            // The next rail variable does not appear; the rung forces a
            // condition on the previous value instead.
            let residue = c_prev.mul(value).add(&eq.constant);
            return Err(!residue.is_zero());
        }
        Ok(c_prev
            .mul(value)
            .add(&eq.constant)
            .neg()
            .div(&c_next)
            .expect("nonzero coefficient"))
    }

    /// Whether the end equation at the l-side rejects the propagated value.
    fn end_rejects(
        &self,
        v: ArrowId,
        end: u32,
        is_source: bool,
        i_s: u32,
        j_s: u32,
        value: &F,
    ) -> Option<bool> {
        let (t, s) = if is_source { (i_s, end) } else { (end, j_s) };
        let eq = self.cleaned_equation(v, t, s)?;
        let mut coeff = F::zero();
        for (key, w) in &eq.linear {
            if *key == (i_s, j_s) {
                coeff = w.clone();
            } else {
                return None;
            }
        }
        Some(!coeff.mul(value).add(&eq.constant).is_zero())
    }

    /// Verifies that the ladder's residual equations force an inconsistent
    /// value, i.e. that the state is genuinely contradictory.
    fn forces_contradiction(&self, w: &LadderWitness, k_source: bool, l_source: bool) -> bool {
        let (i0, j0) = (w.i_rail[0], w.j_rail[0]);
        let mut value = match self.end_value(w.x, w.k, k_source, i0, j0) {
            Ok(v) => v,
            Err(contradictory) => return contradictory,
        };
        for (e, &z) in w.rungs.iter().enumerate() {
            let prev = (w.i_rail[e], w.j_rail[e]);
            let next = (w.i_rail[e + 1], w.j_rail[e + 1]);
            value = match self.propagate(z, (prev, next), &value) {
                Ok(v) => v,
                Err(contradictory) => return contradictory,
            };
        }
        let (i_s, j_s) = (*w.i_rail.last().unwrap(), *w.j_rail.last().unwrap());
        self.end_rejects(w.y, w.l, l_source, i_s, j_s, &value)
            .unwrap_or(false)
    }

    /// Extends the ladder from its last column and tries to close it.
    fn extend(
        &self,
        x: ArrowId,
        k: u32,
        k_source: bool,
        i_rail: &mut Vec<u32>,
        j_rail: &mut Vec<u32>,
        rungs: &mut Vec<ArrowId>,
    ) -> Option<LadderWitness> {
        let (i_s, j_s) = (*i_rail.last().unwrap(), *j_rail.last().unwrap());
        // Try to close with an end arrow y.
        for y in 0..self.gamma.quiver.arrows().len() {
            if y == x || rungs.contains(&y) {
                continue;
            }
            for (l, l_source) in self.end_candidates(y, i_s, j_s) {
                if l == k
                    || i_rail.contains(&l)
                    || j_rail.contains(&l)
                    || !self.end_membership_ok(l, l_source)
                {
                    continue;
                }
                let w = LadderWitness {
                    k,
                    l,
                    x,
                    y,
                    rungs: rungs.clone(),
                    i_rail: i_rail.clone(),
                    j_rail: j_rail.clone(),
                };
                if self.forces_contradiction(&w, k_source, l_source) {
                    return Some(w);
                }
            }
        }
        // Or grow the rails by one rung.
        for z in 0..self.gamma.quiver.arrows().len() {
            if z == x || rungs.contains(&z) {
                continue;
            }
            let arr = self.gamma.quiver.arrow(z);
            let col_over = self.gamma.over(i_s);
            if arr.src != col_over && arr.tgt != col_over {
                continue;
            }
            let outward = arr.src == col_over;
            let successors = |end: u32| -> Vec<u32> {
                self.arrows_over(z)
                    .filter_map(|ga| {
                        if outward && ga.src == end {
                            Some(ga.tgt)
                        } else if !outward && ga.tgt == end {
                            Some(ga.src)
                        } else {
                            None
                        }
                    })
                    .collect()
            };
            for i_next in successors(i_s) {
                for j_next in successors(j_s) {
                    if i_next >= j_next
                        || self.beta.contains(&i_next)
                        || !self.beta.contains(&j_next)
                        || i_rail.contains(&i_next)
                        || j_rail.contains(&j_next)
                        || i_next == k
                        || j_next == k
                    {
                        continue;
                    }
                    i_rail.push(i_next);
                    j_rail.push(j_next);
                    rungs.push(z);
                    if let Some(w) = self.extend(x, k, k_source, i_rail, j_rail, rungs) {
                        return Some(w);
                    }
                    rungs.pop();
                    j_rail.pop();
                    i_rail.pop();
                }
            }
        }
        None
    }
}

/// Exhaustive search for a second-kind ladder witness; `None` when no ladder
/// forces a contradiction. Assumes `beta` is not contradictory of the first
/// kind.
pub fn second_kind_search<F: Field>(
    gamma: &CoefficientQuiver<F>,
    beta: &BasisSubset,
) -> Option<LadderWitness> {
    let search = LadderSearch {
        gamma,
        beta,
        extremal: extremal_arrows(gamma),
    };
    // Candidate first columns: (i_0, j_0) in a common fiber with i_0 < j_0,
    // i_0 outside beta and j_0 inside.
    for p in 0..gamma.quiver.vertex_count() {
        let fiber = gamma.fiber(p);
        for (a, &i0) in fiber.iter().enumerate() {
            if beta.contains(&i0) {
                continue;
            }
            for &j0 in &fiber[a + 1..] {
                if !beta.contains(&j0) {
                    continue;
                }
                for x in 0..gamma.quiver.arrows().len() {
                    for (k, k_source) in search.end_candidates(x, i0, j0) {
                        if k == i0 || k == j0 || !search.end_membership_ok(k, k_source) {
                            continue;
                        }
                        let mut i_rail = vec![i0];
                        let mut j_rail = vec![j0];
                        let mut rungs = Vec::new();
                        if let Some(w) =
                            search.extend(x, k, k_source, &mut i_rail, &mut j_rail, &mut rungs)
                        {
                            return Some(w);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Full classification of a basis subset.
pub fn classify_contradiction<F: Field>(
    gamma: &CoefficientQuiver<F>,
    beta: &BasisSubset,
) -> ContradictionKind {
    if is_first_kind(gamma, beta) {
        ContradictionKind::FirstKind
    } else if second_kind_search(gamma, beta).is_some() {
        ContradictionKind::SecondKind
    } else {
        ContradictionKind::None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilySpec};
    use crate::state::subset;

    fn d4() -> crate::rep::CoefficientQuiver<crate::scalar::Rat> {
        build_family(&FamilySpec::parse("d4-example").unwrap()).unwrap()
    }

    #[test]
    fn d4_first_kind() {
        // The extremal arrow (c,3,4) has 3 in beta but 4 outside.
        let gamma = d4();
        assert_eq!(
            classify_contradiction(&gamma, &subset(&[3])),
            ContradictionKind::FirstKind
        );
    }

    #[test]
    fn d4_second_kind() {
        // {3,4,5}: the ladder k=3 --c--> (2,4) <--b-- 5 with nu_0 = 0.
        let gamma = d4();
        assert_eq!(
            classify_contradiction(&gamma, &subset(&[3, 4, 5])),
            ContradictionKind::SecondKind
        );
    }

    #[test]
    fn empty_subset_is_not_contradictory() {
        let gamma = d4();
        assert_eq!(
            classify_contradiction(&gamma, &subset(&[])),
            ContradictionKind::None
        );
    }
}
