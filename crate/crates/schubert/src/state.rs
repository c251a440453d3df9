//! Beta-states: partial evaluation of the reduced Schubert system at a
//! basis subset, by unit propagation over the cell equations.

use std::collections::{BTreeMap, BTreeSet};

use crate::rep::CoefficientQuiver;
use crate::scalar::Field;
use crate::system::{Link, LinkBase, PairId, SchubertSystem, TripleId};

/// A subset of the ordered basis.
pub type BasisSubset = BTreeSet<u32>;

/// A residual system after evaluation: a bipartite graph of surviving pairs
/// and triples with re-weighted links. Ids refer to the originating reduced
/// Schubert system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaState<F> {
    pub beta: BasisSubset,
    pub pairs: Vec<PairId>,
    pub triples: Vec<TripleId>,
    pub links: Vec<Link<F>>,
    /// Values assigned to evaluated (trivial) pairs; surviving pairs carry
    /// the generic value and are absent from this map.
    pub ev: BTreeMap<PairId, F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaOutcome<F> {
    Contradictory,
    State(BetaState<F>),
}

impl<F: Field> BetaOutcome<F> {
    pub fn is_contradictory(&self) -> bool {
        matches!(self, BetaOutcome::Contradictory)
    }

    pub fn state(&self) -> Option<&BetaState<F>> {
        match self {
            BetaOutcome::State(s) => Some(s),
            BetaOutcome::Contradictory => None,
        }
    }
}

impl<F: Field> BetaState<F> {
    pub fn is_trivial(&self) -> bool {
        self.pairs.is_empty() && self.triples.is_empty()
    }

    /// Affine dimension of the cell when the state is solvable.
    pub fn cell_dimension(&self) -> usize {
        self.pairs.len() - self.triples.len()
    }

    pub fn ev_of(&self, sys: &SchubertSystem<F>, i: u32, j: u32) -> Option<F> {
        let p = sys.pair_id(i, j)?;
        self.ev.get(&p).cloned()
    }
}

/// Whether `beta` is closed under targets of extremal arrows.
pub fn is_extremal_successor_closed<F: Field>(
    gamma: &CoefficientQuiver<F>,
    extremal: &[bool],
    beta: &BasisSubset,
) -> bool {
    gamma
        .arrows()
        .iter()
        .enumerate()
        .all(|(k, a)| !extremal[k] || !beta.contains(&a.src) || beta.contains(&a.tgt))
}

struct Engine<'a, F: Field> {
    sys: &'a SchubertSystem<F>,
    weights: BTreeMap<(TripleId, LinkBase), F>,
    pair_trivial: Vec<bool>,
    triple_trivial: Vec<bool>,
    ev: BTreeMap<PairId, F>,
    trace: Option<Vec<String>>,
}

impl<'a, F: Field> Engine<'a, F> {
    fn log(&mut self, line: String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(line);
        }
    }

    fn weight(&self, tip: TripleId, base: LinkBase) -> F {
        self.weights
            .get(&(tip, base))
            .cloned()
            .unwrap_or_else(F::zero)
    }

    /// Step (5): remove the trivial base vertices of a link, folding their
    /// values into the weight of the shortened link.
    fn collapse_link(&mut self, tip: TripleId, base: LinkBase) {
        let w = self.weight(tip, base);
        if w.is_zero() {
            return;
        }
        let trivial: Vec<PairId> = base.pairs().filter(|&p| self.pair_trivial[p]).collect();
        if trivial.is_empty() {
            return;
        }
        let mut factor = w.clone();
        for &p in &trivial {
            factor = factor.mul(&self.ev[&p]);
        }
        let remaining: Vec<PairId> = base.pairs().filter(|&p| !self.pair_trivial[p]).collect();
        let new_base = match remaining.as_slice() {
            [] => LinkBase::Const,
            [p] => LinkBase::Lin(*p),
            _ => unreachable!("a link has at most two base vertices"),
        };
        self.weights.insert((tip, base), F::zero());
        let cur = self.weight(tip, new_base);
        let next = cur.add(&factor);
        self.log(format!(
            "step5 triple {} base {:?} -> {:?} weight {}",
            self.sys.triple_name(tip),
            base,
            new_base,
            next
        ));
        self.weights.insert((tip, new_base), next);
    }

    /// Live edges of a triple: pairs contained in a link of nonzero weight.
    fn live_edges(&self, tip: TripleId) -> Vec<PairId> {
        let mut out = BTreeSet::new();
        for ((t, base), w) in self.weights.range((tip, LinkBase::Const)..) {
            if *t != tip {
                break;
            }
            if !w.is_zero() {
                for p in base.pairs() {
                    if !self.pair_trivial[p] {
                        out.insert(p);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Step (7) applies when a live triple has exactly one live edge and the
    /// linear link on it has nonzero weight.
    fn step7_applicable(&self, tip: TripleId) -> Option<PairId> {
        if self.triple_trivial[tip] {
            return None;
        }
        let edges = self.live_edges(tip);
        if edges.len() != 1 {
            return None;
        }
        let p = edges[0];
        if self.weight(tip, LinkBase::Lin(p)).is_zero() {
            return None;
        }
        Some(p)
    }

    fn step8_applicable(&self, tip: TripleId) -> bool {
        !self.triple_trivial[tip] && self.live_edges(tip).is_empty()
    }

    fn apply_step7(&mut self, tip: TripleId, p: PairId) {
        let mu = self.weight(tip, LinkBase::Lin(p));
        let mu0 = self.weight(tip, LinkBase::Const);
        let value = mu0
            .neg()
            .div(&mu)
            .expect("step 7 requires a nonzero weight");
        self.log(format!(
            "step7 triple {} solves pair ({},{}) = {}",
            self.sys.triple_name(tip),
            self.sys.pairs[p].i,
            self.sys.pairs[p].j,
            value
        ));
        self.ev.insert(p, value);
        self.weights.insert((tip, LinkBase::Lin(p)), F::zero());
        self.weights.insert((tip, LinkBase::Const), F::zero());
        self.triple_trivial[tip] = true;
        self.pair_trivial[p] = true;
        // Step (7d): fold the new value into every link through this pair.
        let affected: Vec<(TripleId, LinkBase)> = self
            .weights
            .iter()
            .filter(|((_, base), w)| !w.is_zero() && base.contains(p))
            .map(|(&k, _)| k)
            .collect();
        for (t, base) in affected {
            self.collapse_link(t, base);
        }
    }

    /// Returns true when contradictory.
    fn apply_step8(&mut self, tip: TripleId) -> bool {
        let mu0 = self.weight(tip, LinkBase::Const);
        if mu0.is_zero() {
            self.log(format!(
                "step8 triple {} trivial",
                self.sys.triple_name(tip)
            ));
            self.triple_trivial[tip] = true;
            false
        } else {
            self.log(format!(
                "step8 triple {} contradictory (constant {})",
                self.sys.triple_name(tip),
                mu0
            ));
            true
        }
    }
}

/// Computes the beta-state of a reduced Schubert system. The `chooser`
/// selects which applicable loop step fires next (the outcome does not
/// depend on this choice; the default takes the lexicographically smallest
/// triple).
pub fn beta_state_with<F: Field>(
    sys: &SchubertSystem<F>,
    beta: &BasisSubset,
    mut chooser: impl FnMut(&[TripleId]) -> usize,
    mut trace: Option<&mut Vec<String>>,
) -> BetaOutcome<F> {
    // A subset that is not extremal successor closed is contradictory of the
    // first kind, and the reduced system only computes states of closed ones.
    if !is_extremal_successor_closed(&sys.gamma, &sys.extremal_arrow, beta) {
        if let Some(t) = trace.as_deref_mut() {
            t.push("not extremal successor closed: contradictory".to_string());
        }
        return BetaOutcome::Contradictory;
    }
    let mut eng = Engine {
        sys,
        weights: BTreeMap::new(),
        pair_trivial: vec![false; sys.pairs.len()],
        triple_trivial: vec![false; sys.triples.len()],
        ev: BTreeMap::new(),
        trace: trace.as_deref_mut().map(|_| Vec::new()),
    };
    // Step (1).
    for l in &sys.links {
        let cur = eng.weight(l.tip, l.base);
        eng.weights.insert((l.tip, l.base), cur.add(&l.weight));
    }
    // Step (2): evaluate pairs fixed by the normal form.
    for (p, pr) in sys.pairs.iter().enumerate() {
        let trivial = pr.i == pr.j || beta.contains(&pr.i) || !beta.contains(&pr.j);
        if trivial {
            let value = if pr.i == pr.j && beta.contains(&pr.i) {
                F::one()
            } else {
                F::zero()
            };
            eng.log(format!("step2 pair ({},{}) = {}", pr.i, pr.j, value));
            eng.pair_trivial[p] = true;
            eng.ev.insert(p, value);
        }
    }
    // Step (3).
    for (t, tr) in sys.triples.iter().enumerate() {
        if beta.contains(&tr.t) || !beta.contains(&tr.s) {
            eng.log(format!("step3 triple {} trivial", sys.triple_name(t)));
            eng.triple_trivial[t] = true;
        }
    }
    // Step (4).
    for t in 0..sys.triples.len() {
        if eng.triple_trivial[t] {
            let keys: Vec<(TripleId, LinkBase)> = eng
                .weights
                .range((t, LinkBase::Const)..)
                .take_while(|((tip, _), _)| *tip == t)
                .map(|(&k, _)| k)
                .collect();
            for k in keys {
                eng.weights.insert(k, F::zero());
            }
        }
    }
    // Step (5).
    let initial: Vec<(TripleId, LinkBase)> = eng
        .weights
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(&k, _)| k)
        .collect();
    for (t, base) in initial {
        eng.collapse_link(t, base);
    }
    // Step (6) is implicit: an edge is live iff some nonzero link crosses it.
    // The loop: steps (7) and (8) in the order picked by the chooser.
    loop {
        let mut seven = Vec::new();
        let mut eight = Vec::new();
        for t in 0..sys.triples.len() {
            if eng.step7_applicable(t).is_some() {
                seven.push(t);
            } else if eng.step8_applicable(t) {
                eight.push(t);
            }
        }
        if seven.is_empty() && eight.is_empty() {
            break;
        }
        let mut candidates = seven.clone();
        candidates.extend(&eight);
        let pick = candidates[chooser(&candidates).min(candidates.len() - 1)];
        if let Some(p) = eng.step7_applicable(pick) {
            eng.apply_step7(pick, p);
        } else if eng.apply_step8(pick) {
            if let (Some(t), Some(inner)) = (trace.as_deref_mut(), eng.trace.take()) {
                t.extend(inner);
            }
            return BetaOutcome::Contradictory;
        }
    }
    let pairs: Vec<PairId> = (0..sys.pairs.len())
        .filter(|&p| !eng.pair_trivial[p])
        .collect();
    let triples: Vec<TripleId> = (0..sys.triples.len())
        .filter(|&t| !eng.triple_trivial[t])
        .collect();
    let links: Vec<Link<F>> = eng
        .weights
        .iter()
        .filter(|((tip, _), w)| !w.is_zero() && !eng.triple_trivial[*tip])
        .map(|(&(tip, base), w)| Link {
            tip,
            base,
            weight: w.clone(),
        })
        .collect();
    let mut ev = eng.ev.clone();
    ev.retain(|p, _| eng.pair_trivial[*p]);
    if let (Some(t), Some(inner)) = (trace, eng.trace.take()) {
        t.extend(inner);
    }
    BetaOutcome::State(BetaState {
        beta: beta.clone(),
        pairs,
        triples,
        links,
        ev,
    })
}

/// The beta-state with the default (deterministic) step order.
pub fn beta_state<F: Field>(sys: &SchubertSystem<F>, beta: &BasisSubset) -> BetaOutcome<F> {
    beta_state_with(sys, beta, |_| 0, None)
}

/// The beta-state with a pseudo-random step order derived from `seed`; used
/// to check that the outcome is independent of the order of steps (7)/(8).
pub fn beta_state_seeded<F: Field>(
    sys: &SchubertSystem<F>,
    beta: &BasisSubset,
    seed: u64,
) -> BetaOutcome<F> {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    beta_state_with(
        sys,
        beta,
        move |cands| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % cands.len()
        },
        None,
    )
}

/// The beta-state with a trace, one line per algorithm step.
pub fn beta_state_traced<F: Field>(
    sys: &SchubertSystem<F>,
    beta: &BasisSubset,
) -> (BetaOutcome<F>, Vec<String>) {
    let mut trace = Vec::new();
    let out = beta_state_with(sys, beta, |_| 0, Some(&mut trace));
    (out, trace)
}

pub fn subset(ids: &[u32]) -> BasisSubset {
    ids.iter().copied().collect()
}
