//! Solution search for systems: orientations satisfying (S1)-(S3), and
//! extremal solutions satisfying (ES1)-(ES3), found by depth-first
//! backtracking with incremental acyclicity checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::Field;
use crate::state::BetaState;
use crate::system::{Link, LinkBase, PairId, SchubertSystem, TripleId};

/// A bipartite system with weighted links; the vertex ids refer to a parent
/// reduced Schubert system. Beta-states, patches and contractions are all
/// sub-systems in this sense.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubSystem<F> {
    pub pairs: Vec<PairId>,
    pub triples: Vec<TripleId>,
    pub links: Vec<Link<F>>,
}

impl<F: Field> SubSystem<F> {
    pub fn edges(&self) -> Vec<(TripleId, PairId)> {
        let mut out: Vec<(TripleId, PairId)> = self
            .links
            .iter()
            .flat_map(|l| l.base.pairs().map(move |p| (l.tip, p)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_simply_linked(&self, tip: TripleId, pair: PairId) -> bool {
        let mut linear = false;
        let mut others = 0usize;
        for l in self.links.iter().filter(|l| l.tip == tip) {
            if l.base.contains(pair) {
                match l.base {
                    LinkBase::Lin(_) => linear = true,
                    _ => others += 1,
                }
            }
        }
        linear && others == 0
    }
}

impl<F: Field> From<&BetaState<F>> for SubSystem<F> {
    fn from(s: &BetaState<F>) -> Self {
        SubSystem {
            pairs: s.pairs.clone(),
            triples: s.triples.clone(),
            links: s.links.clone(),
        }
    }
}

/// An orientation certificate: the unique out-edge chosen per triple; every
/// other edge of the system is oriented towards its triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub out_edges: BTreeMap<TripleId, PairId>,
}

impl Solution {
    /// A deterministic fingerprint, recorded as the witness of a cell
    /// classification.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for (&t, &p) in &self.out_edges {
            for x in [t as u64, p as u64] {
                h ^= x.wrapping_add(0x9e3779b97f4a7c15);
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(Solution),
    Unsolvable,
    /// The backtracking budget was exhausted; the state stays undetermined.
    BudgetExceeded,
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Solved(s) => Some(s),
            _ => None,
        }
    }
}

pub const BACKTRACK_BUDGET: u64 = 1_000_000;

struct Search {
    /// Candidate out-edges per triple (position in `order`).
    candidates: Vec<Vec<PairId>>,
    /// All pairs adjacent to each triple.
    adjacency: Vec<Vec<PairId>>,
    order: Vec<TripleId>,
    chosen: BTreeMap<TripleId, PairId>,
    used_pairs: BTreeSet<PairId>,
    nodes: u64,
}

impl Search {
    /// Cycle check on the partial orientation: edges of assigned triples are
    /// oriented out along the choice and in from every other adjacent pair;
    /// unassigned triples have no outgoing edges and cannot close a cycle.
    fn has_cycle(&self) -> bool {
        // Successor map on triples: t -> chosen pair -> adjacent triples.
        let mut color: BTreeMap<TripleId, u8> = BTreeMap::new();
        let mut stack: Vec<(TripleId, usize)> = Vec::new();
        let succ = |t: TripleId| -> Vec<TripleId> {
            let Some(&p) = self.chosen.get(&t) else {
                return Vec::new();
            };
            self.adjacency
                .iter()
                .zip(&self.order)
                .filter(|(adj, &t2)| t2 != t && adj.contains(&p))
                .map(|(_, &t2)| t2)
                .collect()
        };
        for &start in self.chosen.keys() {
            if color.get(&start).copied().unwrap_or(0) != 0 {
                continue;
            }
            stack.push((start, 0));
            color.insert(start, 1);
            while let Some((t, idx)) = stack.pop() {
                let next = succ(t);
                if idx < next.len() {
                    stack.push((t, idx + 1));
                    let child = next[idx];
                    match color.get(&child).copied().unwrap_or(0) {
                        0 => {
                            color.insert(child, 1);
                            stack.push((child, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    color.insert(t, 2);
                }
            }
        }
        false
    }

    fn solve(&mut self, depth: usize) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > BACKTRACK_BUDGET {
            return Err(());
        }
        if depth == self.order.len() {
            return Ok(!self.has_cycle());
        }
        let tid = self.order[depth];
        let cands = self.candidates[depth].clone();
        for p in cands {
            if self.used_pairs.contains(&p) {
                continue;
            }
            self.chosen.insert(tid, p);
            self.used_pairs.insert(p);
            if !self.has_cycle() && self.solve(depth + 1)? {
                return Ok(true);
            }
            self.chosen.remove(&tid);
            self.used_pairs.remove(&p);
        }
        Ok(false)
    }
}

fn solve_with_candidates<F: Field>(
    sub: &SubSystem<F>,
    candidate_filter: impl Fn(TripleId, PairId) -> bool,
) -> SolveOutcome {
    let mut order = sub.triples.clone();
    order.sort_unstable();
    let adjacency: Vec<Vec<PairId>> = order
        .iter()
        .map(|&t| {
            let mut adj: Vec<PairId> = sub
                .links
                .iter()
                .filter(|l| l.tip == t)
                .flat_map(|l| l.base.pairs())
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect();
    let candidates: Vec<Vec<PairId>> = order
        .iter()
        .zip(&adjacency)
        .map(|(&t, adj)| {
            adj.iter()
                .copied()
                .filter(|&p| sub.is_simply_linked(t, p) && candidate_filter(t, p))
                .collect()
        })
        .collect();
    // (S1)/(ES1) cannot be satisfied at a triple without candidates.
    if candidates.iter().any(Vec::is_empty) {
        return SolveOutcome::Unsolvable;
    }
    let mut search = Search {
        candidates,
        adjacency,
        order,
        chosen: BTreeMap::new(),
        used_pairs: BTreeSet::new(),
        nodes: 0,
    };
    match search.solve(0) {
        Ok(true) => SolveOutcome::Solved(Solution {
            out_edges: search.chosen,
        }),
        Ok(false) => SolveOutcome::Unsolvable,
        Err(()) => SolveOutcome::BudgetExceeded,
    }
}

/// Searches for a solution satisfying (S1)-(S3): one simply linked out-edge
/// per triple, pair in-degrees at most one, no oriented cycles.
pub fn find_solution<F: Field>(sub: &SubSystem<F>) -> SolveOutcome {
    solve_with_candidates(sub, |_, _| true)
}

/// Searches for an extremal solution satisfying (ES1)-(ES3): like
/// `find_solution`, but the out-edge must be an extremal edge of the
/// ambient reduced Schubert system.
pub fn find_extremal_solution<F: Field>(
    sub: &SubSystem<F>,
    sys: &SchubertSystem<F>,
) -> SolveOutcome {
    solve_with_candidates(sub, |t, p| sys.is_extremal_edge(t, p))
}

/// The triangular variable substitution used for the unsolvable eta-pattern:
/// a triple whose links are exactly one linear link (on a pair u) and one
/// quadratic link gets the quadratic term folded into a fresh coordinate
/// `u~ = u + (quotient of weights) * (quadratic monomial)`, which turns the
/// triple into a simply linked one. The substitution is unipotent, so the
/// zero set stays an affine-space-compatible coordinate change and the cell
/// dimension is unchanged. Returns the rewritten system, or `None` when no
/// triple matches the pattern (or the pair occurs quadratically elsewhere).
pub fn variable_transformation_fallback<F: Field>(sub: &SubSystem<F>) -> Option<SubSystem<F>> {
    for &ta in &sub.triples {
        let links: Vec<&Link<F>> = sub.links.iter().filter(|l| l.tip == ta).collect();
        if links.len() != 2 {
            continue;
        }
        let (lin, quad) = match (&links[0].base, &links[1].base) {
            (LinkBase::Lin(p), LinkBase::Quad(a, b)) => (
                (*p, links[0].weight.clone()),
                ((*a, *b), links[1].weight.clone()),
            ),
            (LinkBase::Quad(a, b), LinkBase::Lin(p)) => (
                (*p, links[1].weight.clone()),
                ((*a, *b), links[0].weight.clone()),
            ),
            _ => continue,
        };
        let p4 = lin.0;
        // The substitution stays quadratic only if p4 never occurs in a
        // quadratic link.
        let occurs_quadratically = sub
            .links
            .iter()
            .any(|l| matches!(l.base, LinkBase::Quad(a, b) if a == p4 || b == p4));
        if occurs_quadratically {
            continue;
        }
        // Only worthwhile if another equation mentions p4.
        if !sub
            .links
            .iter()
            .any(|l| l.tip != ta && l.base == LinkBase::Lin(p4))
        {
            continue;
        }
        let ratio = quad.1.div(&lin.1).expect("link weights are nonzero");
        let mut merged: BTreeMap<(TripleId, LinkBase), F> = BTreeMap::new();
        let mut add = |tip: TripleId, base: LinkBase, w: F| {
            let cur = merged.remove(&(tip, base)).unwrap_or_else(F::zero);
            merged.insert((tip, base), cur.add(&w));
        };
        for l in &sub.links {
            add(l.tip, l.base, l.weight.clone());
            if l.base == LinkBase::Lin(p4) {
                // u = u~ - ratio * quad, so each c*u picks up -c*ratio*quad.
                add(
                    l.tip,
                    LinkBase::Quad(quad.0 .0, quad.0 .1),
                    l.weight.mul(&ratio).neg(),
                );
            }
        }
        let links = merged
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|((tip, base), weight)| Link { tip, base, weight })
            .collect();
        return Some(SubSystem {
            pairs: sub.pairs.clone(),
            triples: sub.triples.clone(),
            links,
        });
    }
    None
}

/// Verifies (S1)-(S3) for a given orientation of a sub-system; with
/// `extremal`, additionally checks (ES1)-(ES3).
pub fn verify_solution<F: Field>(
    sub: &SubSystem<F>,
    sol: &Solution,
    sys: &SchubertSystem<F>,
    extremal: bool,
) -> bool {
    // (S1): each triple has exactly one out-edge, simply linked (extremal).
    for &t in &sub.triples {
        let Some(&p) = sol.out_edges.get(&t) else {
            return false;
        };
        if !sub.is_simply_linked(t, p) {
            return false;
        }
        if extremal && !sys.is_extremal_edge(t, p) {
            return false;
        }
    }
    // (S2): at most one in-edge per pair.
    let mut seen = BTreeSet::new();
    for (&t, &p) in &sol.out_edges {
        if !sub.triples.contains(&t) {
            continue;
        }
        if !seen.insert(p) {
            return false;
        }
    }
    // (S3): acyclicity of the full orientation.
    let adjacency: BTreeMap<TripleId, BTreeSet<PairId>> = sub
        .triples
        .iter()
        .map(|&t| {
            (
                t,
                sub.links
                    .iter()
                    .filter(|l| l.tip == t)
                    .flat_map(|l| l.base.pairs())
                    .collect(),
            )
        })
        .collect();
    // Successors of triple t: triples adjacent to its chosen pair.
    let mut color: BTreeMap<TripleId, u8> = BTreeMap::new();
    fn dfs(
        t: TripleId,
        sol: &Solution,
        adjacency: &BTreeMap<TripleId, BTreeSet<PairId>>,
        color: &mut BTreeMap<TripleId, u8>,
    ) -> bool {
        color.insert(t, 1);
        if let Some(&p) = sol.out_edges.get(&t) {
            for (&t2, adj) in adjacency {
                if t2 != t && adj.contains(&p) {
                    match color.get(&t2).copied().unwrap_or(0) {
                        0 => {
                            if dfs(t2, sol, adjacency, color) {
                                return true;
                            }
                        }
                        1 => return true,
                        _ => {}
                    }
                }
            }
        }
        color.insert(t, 2);
        false
    }
    for &t in &sub.triples {
        if color.get(&t).copied().unwrap_or(0) == 0 && dfs(t, sol, &adjacency, &mut color) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn lin(tip: TripleId, p: PairId, w: i64) -> Link<Rat> {
        Link {
            tip,
            base: LinkBase::Lin(p),
            weight: Rat::int(w),
        }
    }

    #[test]
    fn two_triples_on_one_pair_are_unsolvable() {
        let sub = SubSystem {
            pairs: vec![0],
            triples: vec![0, 1],
            links: vec![lin(0, 0, 1), lin(1, 0, -1)],
        };
        assert_eq!(find_solution(&sub), SolveOutcome::Unsolvable);
    }

    #[test]
    fn chain_is_solvable_and_verified() {
        // t0 - p0 - t1 - p1: orient t0 -> p0, t1 -> p1.
        let sub = SubSystem {
            pairs: vec![0, 1],
            triples: vec![0, 1],
            links: vec![lin(0, 0, 1), lin(1, 0, 1), lin(1, 1, -1)],
        };
        let sol = match find_solution(&sub) {
            SolveOutcome::Solved(s) => s,
            other => panic!("expected a solution, got {other:?}"),
        };
        let sys = crate::system::build_reduced(
            &crate::families::build_family(
                &crate::families::FamilySpec::parse("d4-example").unwrap(),
            )
            .unwrap(),
        );
        assert!(verify_solution(&sub, &sol, &sys, false));
    }

    #[test]
    fn oriented_cycles_are_rejected() {
        // Two triples, two pairs, all edges present: any assignment makes a
        // cycle t0 -> p -> t1 -> p' -> t0.
        let sub = SubSystem {
            pairs: vec![0, 1],
            triples: vec![0, 1],
            links: vec![lin(0, 0, 1), lin(0, 1, 1), lin(1, 0, 1), lin(1, 1, 1)],
        };
        assert_eq!(find_solution(&sub), SolveOutcome::Unsolvable);
    }

    #[test]
    fn quadratic_only_edges_are_not_candidates() {
        let sub = SubSystem::<Rat> {
            pairs: vec![0, 1],
            triples: vec![0],
            links: vec![Link {
                tip: 0,
                base: LinkBase::Quad(0, 1),
                weight: Rat::one(),
            }],
        };
        assert_eq!(find_solution(&sub), SolveOutcome::Unsolvable);
    }

    #[test]
    fn transformation_requires_the_pattern() {
        let sub = SubSystem::<Rat> {
            pairs: vec![0],
            triples: vec![0],
            links: vec![lin(0, 0, 1)],
        };
        assert!(variable_transformation_fallback(&sub).is_none());
    }
}
