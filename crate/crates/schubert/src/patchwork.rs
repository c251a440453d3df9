//! Patchworks: covers of a reduced Schubert system by full sub-systems with
//! a compatibility order, extremal paths, contraction, and the generators
//! for the Kronecker and defect -1 patchworks.

use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::Field;
use crate::solve::{verify_solution, Solution, SubSystem};
use crate::system::{Link, LinkBase, PairId, SchubertSystem, TripleId};
use crate::{Error, Result};

/// Patch index (k, l, eps) ordered by l-k, then l, then eps (- before +).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PatchIndex {
    pub k: i64,
    pub l: i64,
    /// false = "-" (path patch), true = "+" (box patch).
    pub plus: bool,
}

impl PartialOrd for PatchIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PatchIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.l - self.k, self.l, self.plus).cmp(&(other.l - other.k, other.l, other.plus))
    }
}

#[derive(Clone, Debug)]
pub struct Patch<F> {
    pub name: String,
    pub index: PatchIndex,
    pub sub: SubSystem<F>,
}

/// The whole system as a sub-system.
pub fn whole_system<F: Field>(sys: &SchubertSystem<F>) -> SubSystem<F> {
    SubSystem {
        pairs: (0..sys.pairs.len()).collect(),
        triples: (0..sys.triples.len()).collect(),
        links: sys.links.clone(),
    }
}

/// The full sub-system on a vertex set: all links whose tip and base lie in
/// the set.
pub fn full_subsystem<F: Field>(
    sys: &SchubertSystem<F>,
    pairs: &BTreeSet<PairId>,
    triples: &BTreeSet<TripleId>,
) -> SubSystem<F> {
    let links: Vec<Link<F>> = sys
        .links
        .iter()
        .filter(|l| triples.contains(&l.tip) && l.base.pairs().all(|p| pairs.contains(&p)))
        .cloned()
        .collect();
    SubSystem {
        pairs: pairs.iter().copied().collect(),
        triples: triples.iter().copied().collect(),
        links,
    }
}

/// Validates the patch condition and (P1)-(P3); an empty report means the
/// family is a patchwork for the system.
pub fn patchwork_check<F: Field>(sys: &SchubertSystem<F>, patches: &[Patch<F>]) -> Vec<String> {
    let mut report = Vec::new();
    // Patch condition: a patch contains the base vertices of all links of
    // the system with a leg in the patch.
    for patch in patches {
        let pairs: BTreeSet<PairId> = patch.sub.pairs.iter().copied().collect();
        let triples: BTreeSet<TripleId> = patch.sub.triples.iter().copied().collect();
        for l in &sys.links {
            let has_leg = triples.contains(&l.tip) && l.base.pairs().any(|p| pairs.contains(&p));
            if has_leg && !l.base.pairs().all(|p| pairs.contains(&p)) {
                report.push(format!(
                    "{}: link at {} has a leg inside but a base vertex outside",
                    patch.name,
                    sys.triple_name(l.tip)
                ));
            }
        }
    }
    // (P1): the vertex sets cover the system.
    let mut covered_pairs: BTreeSet<PairId> = BTreeSet::new();
    let mut covered_triples: BTreeSet<TripleId> = BTreeSet::new();
    for patch in patches {
        covered_pairs.extend(patch.sub.pairs.iter().copied());
        covered_triples.extend(patch.sub.triples.iter().copied());
    }
    for p in 0..sys.pairs.len() {
        if !covered_pairs.contains(&p) {
            report.push(format!(
                "(P1): pair ({},{}) uncovered",
                sys.pairs[p].i, sys.pairs[p].j
            ));
        }
    }
    for t in 0..sys.triples.len() {
        if !covered_triples.contains(&t) {
            report.push(format!("(P1): triple {} uncovered", sys.triple_name(t)));
        }
    }
    // (P2): no triple lies in two patches.
    for (a, pa) in patches.iter().enumerate() {
        for pb in &patches[a + 1..] {
            let sa: BTreeSet<TripleId> = pa.sub.triples.iter().copied().collect();
            if pb.sub.triples.iter().any(|t| sa.contains(t)) {
                report.push(format!("(P2): {} and {} share a triple", pa.name, pb.name));
            }
        }
    }
    // (P3): each neighbour pair of a triple in patch l lies in a patch k <= l.
    for patch in patches {
        for &t in &patch.sub.triples {
            for (tip, pair) in sys.edges() {
                if tip != t {
                    continue;
                }
                let ok = patches
                    .iter()
                    .any(|p2| p2.index <= patch.index && p2.sub.pairs.contains(&pair));
                if !ok {
                    report.push(format!(
                        "(P3): pair ({},{}) of {} not in an earlier patch",
                        sys.pairs[pair].i, sys.pairs[pair].j, patch.name
                    ));
                }
            }
        }
    }
    report
}

/// Checks (PS) for per-patch solutions: an edge oriented towards a shared
/// pair must come from the earliest patch containing it.
pub fn check_ps<F: Field>(patches: &[Patch<F>], sols: &[Solution]) -> Vec<String> {
    let mut report = Vec::new();
    for (patch, sol) in patches.iter().zip(sols) {
        for (&t, &p) in &sol.out_edges {
            if !patch.sub.triples.contains(&t) {
                continue;
            }
            for other in patches {
                if other.sub.pairs.contains(&p) && !(patch.index <= other.index) {
                    report.push(format!(
                        "(PS): {} orients an edge towards a pair of the earlier {}",
                        patch.name, other.name
                    ));
                }
            }
        }
    }
    report
}

/// Assembles per-patch solutions into an orientation of the whole system
/// (edges outside every patch point towards their triple).
pub fn assemble_solution<F: Field>(patches: &[Patch<F>], sols: &[Solution]) -> Solution {
    let mut out_edges = BTreeMap::new();
    for (patch, sol) in patches.iter().zip(sols) {
        for (&t, &p) in &sol.out_edges {
            if patch.sub.triples.contains(&t) {
                out_edges.insert(t, p);
            }
        }
    }
    Solution { out_edges }
}

/// Verifies that the assembled orientation solves the whole system.
pub fn assembled_is_solution<F: Field>(sys: &SchubertSystem<F>, sol: &Solution) -> bool {
    verify_solution(&whole_system(sys), sol, sys, false)
}

/// An extremal path: alternating pairs and triples as in (EP1), with all
/// edges extremal (EP2). Returned sequences start and end with pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalPath {
    pub pairs: Vec<PairId>,
    pub triples: Vec<TripleId>,
}

/// Recognizes a patch that is an extremal path and returns it in order.
/// The strict shape alternates pairs and triples with pairs at both ends;
/// half-open paths ending in a simply linked triple of degree one (as in the
/// Kronecker patches) are accepted as well.
pub fn as_extremal_path<F: Field>(
    sub: &SubSystem<F>,
    sys: &SchubertSystem<F>,
) -> Option<ExtremalPath> {
    if sub.triples.is_empty() {
        return match sub.pairs.as_slice() {
            [p] => Some(ExtremalPath {
                pairs: vec![*p],
                triples: vec![],
            }),
            _ => None,
        };
    }
    let edges = sub.edges();
    // All edges must be extremal and all degrees at most two.
    let mut deg: BTreeMap<(bool, usize), Vec<(bool, usize)>> = BTreeMap::new();
    for &(t, p) in &edges {
        if !sys.is_extremal_edge(t, p) {
            return None;
        }
        deg.entry((true, t)).or_default().push((false, p));
        deg.entry((false, p)).or_default().push((true, t));
    }
    let mut endpoints = Vec::new();
    for &t in &sub.triples {
        match deg.get(&(true, t)).map_or(0, Vec::len) {
            2 => {}
            1 => endpoints.push((true, t)),
            _ => return None,
        }
    }
    for &p in &sub.pairs {
        match deg.get(&(false, p)).map_or(0, Vec::len) {
            0 | 3.. => return None,
            1 => endpoints.push((false, p)),
            2 => {}
        }
    }
    if endpoints.len() != 2 || sub.pairs.len() + sub.triples.len() != edges.len() + 1 {
        return None;
    }
    // Walk the path from an endpoint, preferring a pair end as the base for
    // contraction.
    endpoints.sort_by_key(|&(is_triple, _)| is_triple);
    let start = endpoints[0];
    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    let mut push = |node: (bool, usize)| {
        if node.0 {
            triples.push(node.1);
        } else {
            pairs.push(node.1);
        }
    };
    push(start);
    let mut prev: Option<(bool, usize)> = None;
    let mut cur = start;
    loop {
        let next = deg[&cur].iter().find(|&&n| Some(n) != prev).copied();
        let Some(next) = next else { break };
        prev = Some(cur);
        cur = next;
        push(cur);
        if deg[&cur].len() == 1 && cur != start {
            break;
        }
    }
    if pairs.len() != sub.pairs.len() || triples.len() != sub.triples.len() {
        return None;
    }
    Some(ExtremalPath { pairs, triples })
}

/// Whether the path is pure in the ambient sub-system (EP3): its triples
/// have no edges outside the path.
pub fn path_is_pure<F: Field>(ambient: &SubSystem<F>, path: &ExtremalPath) -> bool {
    let path_pairs: BTreeSet<PairId> = path.pairs.iter().copied().collect();
    for &t in &path.triples {
        for l in ambient.links.iter().filter(|l| l.tip == t) {
            if !l.base.pairs().all(|p| path_pairs.contains(&p)) {
                return false;
            }
        }
    }
    true
}

/// Contraction of a sub-system along a pure extremal path: the pairs of the
/// path are identified with its first pair, the triples and all their links
/// disappear, and the surviving links are relabelled.
pub fn contract_path<F: Field>(sub: &SubSystem<F>, path: &ExtremalPath) -> Result<SubSystem<F>> {
    if !path_is_pure(sub, path) {
        return Err(Error::ImpurePath(
            "a path triple has an edge outside the path".into(),
        ));
    }
    let target = *path.pairs.first().expect("nonempty path");
    let merged: BTreeSet<PairId> = path.pairs.iter().copied().collect();
    let dropped: BTreeSet<TripleId> = path.triples.iter().copied().collect();
    let map = |p: PairId| if merged.contains(&p) { target } else { p };
    let pairs: Vec<PairId> = sub
        .pairs
        .iter()
        .copied()
        .filter(|p| !merged.contains(p) || *p == target)
        .collect();
    let triples: Vec<TripleId> = sub
        .triples
        .iter()
        .copied()
        .filter(|t| !dropped.contains(t))
        .collect();
    let mut links = Vec::new();
    for l in &sub.links {
        if dropped.contains(&l.tip) {
            continue;
        }
        let base = match l.base {
            LinkBase::Const => LinkBase::Const,
            LinkBase::Lin(p) => LinkBase::Lin(map(p)),
            LinkBase::Quad(p, q) => {
                let (p2, q2) = (map(p), map(q));
                if p2 == q2 {
                    return Err(Error::ImpurePath(
                        "contraction would merge both base vertices of a quadratic link".into(),
                    ));
                }
                LinkBase::Quad(p2, q2)
            }
        };
        links.push(Link {
            tip: l.tip,
            base,
            weight: l.weight.clone(),
        });
    }
    Ok(SubSystem {
        pairs,
        triples,
        links,
    })
}

/// The Kronecker patchwork: one patch per even diagonal, each an extremal
/// path along the zigzag equations.
pub fn kronecker_patchwork<F: Field>(sys: &SchubertSystem<F>) -> Vec<Patch<F>> {
    let ids: Vec<u32> = sys.gamma.vertex_ids().collect();
    let top = *ids.iter().max().expect("nonempty basis");
    let mut patches = Vec::new();
    for k in (2..top).step_by(2) {
        let pairs: BTreeSet<PairId> = sys
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.j - p.i == k)
            .map(|(id, _)| id)
            .collect();
        let a = sys.gamma.quiver.arrow_by_label("a").unwrap();
        let b = sys.gamma.quiver.arrow_by_label("b").unwrap();
        let triples: BTreeSet<TripleId> = sys
            .triples
            .iter()
            .enumerate()
            .filter(|(_, t)| {
                (t.arrow == b && t.s - t.t == k - 1) || (t.arrow == a && t.s - t.t == k + 1)
            })
            .map(|(id, _)| id)
            .collect();
        if pairs.is_empty() && triples.is_empty() {
            continue;
        }
        patches.push(Patch {
            name: format!("Xi_{k}"),
            index: PatchIndex {
                k: 0,
                l: k as i64,
                plus: true,
            },
            sub: full_subsystem(sys, &pairs, &triples),
        });
    }
    patches
}

/// The defect -1 patchwork: box patches on the joint windows and path
/// patches on the row bands, ordered by (l-k, l, eps).
pub fn build_patchwork_defect_minus_one<F: Field>(
    sys: &SchubertSystem<F>,
    n: usize,
    r: usize,
) -> Vec<Patch<F>> {
    let nn = n as u32;
    let mut patches = Vec::new();
    let in_window = |x: u32, lo: u32, hi: u32| x >= lo && x <= hi;
    // Path patches Pi_{k,l} for 1 <= k < l <= r+1.
    for k in 1..=(r as u32) {
        for l in (k + 1)..=(r as u32 + 1) {
            let pairs: BTreeSet<PairId> = sys
                .pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    in_window(p.i, (k - 1) * nn + 4, k * nn)
                        && in_window(p.j, (l - 1) * nn + 4, l * nn)
                })
                .map(|(id, _)| id)
                .collect();
            let triples: BTreeSet<TripleId> = sys
                .triples
                .iter()
                .enumerate()
                .filter(|(_, t)| {
                    in_window(t.t, (k - 1) * nn + 4, k * nn)
                        && in_window(t.s, (l - 1) * nn + 4, l * nn)
                })
                .map(|(id, _)| id)
                .collect();
            if pairs.is_empty() && triples.is_empty() {
                continue;
            }
            patches.push(Patch {
                name: format!("Pi_{{{k},{l}}}"),
                index: PatchIndex {
                    k: k as i64,
                    l: l as i64,
                    plus: false,
                },
                sub: full_subsystem(sys, &pairs, &triples),
            });
        }
    }
    // Box patches Xi_{k,l} for 0 <= k <= l <= r+1 with l-k even.
    for k in 0..=(r as u32 + 1) {
        for l in k..=(r as u32 + 1) {
            if (l - k) % 2 != 0 {
                continue;
            }
            let mut pairs: BTreeSet<PairId> = sys
                .pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    in_window(p.i, k * nn, k * nn + 4) && in_window(p.j, l * nn, l * nn + 4)
                })
                .map(|(id, _)| id)
                .collect();
            let triples: BTreeSet<TripleId> = sys
                .triples
                .iter()
                .enumerate()
                .filter(|(_, t)| {
                    in_window(t.t, k * nn, k * nn + 4) && in_window(t.s, l * nn, l * nn + 4)
                })
                .map(|(id, _)| id)
                .collect();
            // The corner pairs (kn, kn+4) and (ln, ln+4) join when they are
            // the base of a quadratic link with tip and other base inside.
            for (corner_i, corner_j, skip) in
                [(k * nn, k * nn + 4, k == 0), (l * nn, l * nn + 4, l == 0)]
            {
                if skip || k == l {
                    continue;
                }
                let Some(corner) = sys.pair_id(corner_i, corner_j) else {
                    continue;
                };
                let qualifies = sys.links.iter().any(|link| match link.base {
                    LinkBase::Quad(p, q) => {
                        (p == corner && pairs.contains(&q) || q == corner && pairs.contains(&p))
                            && triples.contains(&link.tip)
                    }
                    _ => false,
                });
                if qualifies {
                    pairs.insert(corner);
                }
            }
            if pairs.is_empty() && triples.is_empty() {
                continue;
            }
            patches.push(Patch {
                name: format!("Xi_{{{k},{l}}}"),
                index: PatchIndex {
                    k: k as i64,
                    l: l as i64,
                    plus: true,
                },
                sub: full_subsystem(sys, &pairs, &triples),
            });
        }
    }
    patches.sort_by_key(|p| p.index);
    patches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilySpec};
    use crate::scalar::Rat;
    use crate::solve::{find_extremal_solution, SolveOutcome};
    use crate::system::build_reduced;

    fn reduced(spec: &str) -> SchubertSystem<Rat> {
        build_reduced(&build_family(&FamilySpec::parse(spec).unwrap()).unwrap())
    }

    #[test]
    fn kronecker_patches_are_extremal_paths() {
        let sys = reduced("kronecker:m=3");
        let patches = kronecker_patchwork(&sys);
        assert_eq!(patchwork_check(&sys, &patches), Vec::<String>::new());
        let mut sols = Vec::new();
        for patch in &patches {
            let path = as_extremal_path(&patch.sub, &sys).expect("patch is an extremal path");
            // Contracting a path patch along itself leaves a single pair.
            let contracted = contract_path(&patch.sub, &path).unwrap();
            assert_eq!(contracted.pairs.len(), 1);
            assert!(contracted.triples.is_empty());
            assert!(contracted.links.is_empty());
            match find_extremal_solution(&patch.sub, &sys) {
                SolveOutcome::Solved(sol) => sols.push(sol),
                other => panic!("expected an extremal solution, got {other:?}"),
            }
        }
        assert_eq!(check_ps(&patches, &sols), Vec::<String>::new());
        let assembled = assemble_solution(&patches, &sols);
        assert!(assembled_is_solution(&sys, &assembled));
    }

    #[test]
    fn empty_patchwork_on_empty_system() {
        let sys = reduced("dynkin-a:n=3,orient=RR");
        assert_eq!(patchwork_check(&sys, &[]), Vec::<String>::new());
    }

    #[test]
    fn defect_minus_one_patchwork_with_no_windings_is_empty() {
        // With r = 0 only the diagonal box patches exist, and their windows
        // contain no vertices of the reduced system.
        let sys = reduced("defect-1:n=4,r=0,orient=RRRR");
        let patches = build_patchwork_defect_minus_one(&sys, 4, 0);
        assert!(patches
            .iter()
            .all(|p| !p.sub.pairs.is_empty() || !p.sub.triples.is_empty()));
        assert_eq!(patchwork_check(&sys, &patches), Vec::<String>::new());
        // The thin instance has a trivial reduced system, so nothing needs
        // covering at all.
        assert!(sys.pairs.is_empty() || !patches.is_empty());
    }

    #[test]
    fn contracting_a_single_pair_is_identity() {
        let sys = reduced("kronecker:m=2");
        let patches = kronecker_patchwork(&sys);
        let patch = &patches[0].sub;
        let single = ExtremalPath {
            pairs: vec![patch.pairs[0]],
            triples: vec![],
        };
        let contracted = contract_path(patch, &single).unwrap();
        assert_eq!(&contracted, patch);
    }
}
