//! Schubert systems: relevant pairs and triples, links with weights, and the
//! complete and reduced variants of the system of cell equations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::quiver::ArrowId;
use crate::rep::CoefficientQuiver;
use crate::scalar::{rat_as_i64, Field, Rat};
use crate::{Error, Result};

/// A matrix coordinate `w_{i,j}` with `F(i) = F(j)` and `i <= j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Pair {
    pub i: u32,
    pub j: u32,
}

/// The index `(v, t, s)` of a cell equation `E(v,t,s)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Triple {
    pub arrow: ArrowId,
    pub t: u32,
    pub s: u32,
}

pub type PairId = usize;
pub type TripleId = usize;

/// The base of a link: empty (constant), one pair (linear) or two pairs
/// (quadratic). Quadratic bases record the factor coming from the target
/// fiber first, matching the order of the defining formula.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum LinkBase {
    Const,
    Lin(PairId),
    Quad(PairId, PairId),
}

impl LinkBase {
    pub fn pairs(&self) -> impl Iterator<Item = PairId> {
        let v: Vec<PairId> = match *self {
            LinkBase::Const => vec![],
            LinkBase::Lin(p) => vec![p],
            LinkBase::Quad(p, q) => vec![p, q],
        };
        v.into_iter()
    }

    pub fn contains(&self, p: PairId) -> bool {
        self.pairs().any(|x| x == p)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Link<F> {
    pub tip: TripleId,
    pub base: LinkBase,
    pub weight: F,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SystemKind {
    Complete,
    Reduced,
}

/// The (complete or reduced) Schubert system of a coefficient quiver.
#[derive(Clone, Debug)]
pub struct SchubertSystem<F> {
    pub gamma: CoefficientQuiver<F>,
    pub kind: SystemKind,
    pub pairs: Vec<Pair>,
    pub triples: Vec<Triple>,
    pub links: Vec<Link<F>>,
    /// Whether each arrow of the coefficient quiver is extremal.
    pub extremal_arrow: Vec<bool>,
}

/// An arrow `(v,s,t)` is extremal if every other arrow with the same image
/// has a strictly larger source or a strictly smaller target.
pub fn extremal_arrows<F: Field>(gamma: &CoefficientQuiver<F>) -> Vec<bool> {
    let arrows = gamma.arrows();
    (0..arrows.len())
        .map(|k| {
            let a = &arrows[k];
            arrows
                .iter()
                .enumerate()
                .filter(|&(other, b)| other != k && b.arrow == a.arrow)
                .all(|(_, b)| a.src < b.src || b.tgt < a.tgt)
        })
        .collect()
}

impl<F: Field> SchubertSystem<F> {
    pub fn pair_id(&self, i: u32, j: u32) -> Option<PairId> {
        self.pairs.binary_search(&Pair { i, j }).ok()
    }

    pub fn triple_id(&self, label: &str, t: u32, s: u32) -> Option<TripleId> {
        let arrow = self.gamma.quiver.arrow_by_label(label)?;
        self.triples
            .iter()
            .position(|x| x.arrow == arrow && x.t == t && x.s == s)
    }

    pub fn links_of_tip(&self, tip: TripleId) -> impl Iterator<Item = &Link<F>> {
        self.links.iter().filter(move |l| l.tip == tip)
    }

    /// All edges {triple, pair}, each the leg of at least one link.
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

    /// An edge is simply linked if the linear link (tip, {pair}) exists and
    /// no other link of the tip has the pair in its base.
    pub fn is_simply_linked(&self, tip: TripleId, pair: PairId) -> bool {
        let mut linear = false;
        let mut others = 0usize;
        for l in self.links_of_tip(tip) {
            if l.base.contains(pair) {
                match l.base {
                    LinkBase::Lin(_) => linear = true,
                    _ => others += 1,
                }
            }
        }
        linear && others == 0
    }

    /// An edge {(v,t,s),(i,j)} of the reduced system is extremal if it is
    /// simply linked and either j = s with (v,i,t) an extremal arrow of the
    /// coefficient quiver, or i = t with (v,s,j) extremal.
    pub fn is_extremal_edge(&self, tip: TripleId, pair: PairId) -> bool {
        if !self.is_simply_linked(tip, pair) {
            return false;
        }
        let tr = self.triples[tip];
        let pr = self.pairs[pair];
        let has_extremal = |src: u32, tgt: u32| {
            self.gamma.arrows().iter().enumerate().any(|(k, a)| {
                a.arrow == tr.arrow && a.src == src && a.tgt == tgt && self.extremal_arrow[k]
            })
        };
        (pr.j == tr.s && has_extremal(pr.i, tr.t)) || (pr.i == tr.t && has_extremal(tr.s, pr.j))
    }

    pub fn triple_name(&self, t: TripleId) -> String {
        let tr = self.triples[t];
        format!(
            "({},{},{})",
            self.gamma.quiver.arrow(tr.arrow).label,
            tr.t,
            tr.s
        )
    }

    /// Canonical text of the equation at a triple. For the complete system
    /// the quadratic terms come first, then linear, then constant; for the
    /// reduced system linear terms from the target fiber come first, then
    /// linear terms from the source fiber, then quadratic, then constant.
    pub fn equation_string(&self, tip: TripleId) -> String
    where
        F: WeightDisplay,
    {
        let tr = self.triples[tip];
        let arrow = self.gamma.quiver.arrow(tr.arrow);
        let mut lin_tgt = Vec::new();
        let mut lin_src = Vec::new();
        let mut quads = Vec::new();
        let mut consts = Vec::new();
        for l in self.links_of_tip(tip) {
            match l.base {
                LinkBase::Const => consts.push(l.weight.clone()),
                LinkBase::Lin(p) => {
                    let over = self.gamma.over(self.pairs[p].i);
                    if over == arrow.tgt {
                        lin_tgt.push((self.pairs[p], l.weight.clone()));
                    } else {
                        lin_src.push((self.pairs[p], l.weight.clone()));
                    }
                }
                LinkBase::Quad(p, q) => {
                    quads.push((self.pairs[p], self.pairs[q], l.weight.clone()))
                }
            }
        }
        lin_tgt.sort_by_key(|x| x.0);
        lin_src.sort_by_key(|x| x.0);
        quads.sort_by_key(|x| (x.0, x.1));
        let mut terms: Vec<(String, F)> = Vec::new();
        let push_lin = |terms: &mut Vec<(String, F)>, list: Vec<(Pair, F)>| {
            for (p, w) in list {
                terms.push((format!("w_{{{},{}}}", p.i, p.j), w));
            }
        };
        let push_quads = |terms: &mut Vec<(String, F)>, list: Vec<(Pair, Pair, F)>| {
            for (p, q, w) in list {
                terms.push((format!("w_{{{},{}}}*w_{{{},{}}}", p.i, p.j, q.i, q.j), w));
            }
        };
        match self.kind {
            SystemKind::Complete => {
                push_quads(&mut terms, quads);
                push_lin(&mut terms, lin_tgt);
                push_lin(&mut terms, lin_src);
            }
            SystemKind::Reduced => {
                push_lin(&mut terms, lin_tgt);
                push_lin(&mut terms, lin_src);
                push_quads(&mut terms, quads);
            }
        }
        for w in consts {
            terms.push((String::new(), w));
        }
        render_terms(&terms)
    }

    /// DOT rendering of the system: pairs as circles, triples labelled by
    /// their arrow (with any constant-link weight in brackets), extremal
    /// edges bold, quadratic links as dotted edges.
    pub fn to_dot(&self) -> String
    where
        F: WeightDisplay,
    {
        let mut s = String::from("graph system {\n  node [fontsize=10];\n");
        for (id, p) in self.pairs.iter().enumerate() {
            let _ = writeln!(s, "  p{id} [shape=circle,label=\"{},{}\"];", p.i, p.j);
        }
        for (id, t) in self.triples.iter().enumerate() {
            let label = &self.gamma.quiver.arrow(t.arrow).label;
            let consts: Vec<String> = self
                .links_of_tip(id)
                .filter(|l| l.base == LinkBase::Const)
                .map(|l| l.weight.weight_string())
                .collect();
            let txt = if consts.is_empty() {
                format!("{} {},{}", label, t.t, t.s)
            } else {
                format!("{} {},{} [{}]", label, t.t, t.s, consts.join(","))
            };
            let _ = writeln!(s, "  t{id} [shape=box,label=\"{txt}\"];");
        }
        for l in &self.links {
            match l.base {
                LinkBase::Const => {}
                LinkBase::Lin(p) => {
                    let style = if self.is_extremal_edge(l.tip, p) {
                        ",style=bold,color=gray40"
                    } else {
                        ""
                    };
                    let label = if l.weight.is_one() {
                        String::new()
                    } else {
                        format!(",label=\"{}\"", l.weight.weight_string())
                    };
                    let _ = writeln!(s, "  t{} -- p{} [penwidth=1{style}{label}];", l.tip, p);
                }
                LinkBase::Quad(p, q) => {
                    let label = if l.weight.is_one() {
                        String::new()
                    } else {
                        format!(",label=\"{}\"", l.weight.weight_string())
                    };
                    let _ = writeln!(s, "  t{} -- p{} [style=dotted{label}];", l.tip, p);
                    let _ = writeln!(s, "  t{} -- p{} [style=dotted];", l.tip, q);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Weight formatting inside equations (coefficient 1 suppressed).
pub trait WeightDisplay: Field {
    fn weight_string(&self) -> String;
    fn abs_string(&self) -> String {
        self.weight_string().trim_start_matches('-').to_string()
    }
    fn is_negative_weight(&self) -> bool {
        self.weight_string().starts_with('-')
    }
}

impl WeightDisplay for Rat {
    fn weight_string(&self) -> String {
        self.to_string()
    }
}

impl<const P: u64> WeightDisplay for crate::scalar::Fp<P> {
    fn weight_string(&self) -> String {
        self.0.to_string()
    }
}

fn render_terms<F: WeightDisplay>(terms: &[(String, F)]) -> String {
    let mut out = String::new();
    for (k, (mono, w)) in terms.iter().enumerate() {
        let neg = w.is_negative_weight();
        let mag = w.abs_string();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&mag);
        } else if mag == "1" {
            out.push_str(mono);
        } else {
            let _ = write!(out, "{mag}*{mono}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// The terms of the complete cell equation `E(v,t,s)` of one relevant triple.
fn complete_links<F: Field>(
    gamma: &CoefficientQuiver<F>,
    pairs: &BTreeMap<Pair, PairId>,
    tip: TripleId,
    tr: &Triple,
) -> Vec<Link<F>> {
    let mut acc: BTreeMap<LinkBase, F> = BTreeMap::new();
    for ga in gamma.arrows().iter().filter(|a| a.arrow == tr.arrow) {
        // Quadratic term mu_{v,s',t'} w_{t,t'} w_{s',s}; factors below the
        // diagonal are constant zero, so those terms are dropped.
        if tr.t <= ga.tgt && ga.src <= tr.s {
            let pt = pairs[&Pair { i: tr.t, j: ga.tgt }];
            let ps = pairs[&Pair { i: ga.src, j: tr.s }];
            let base = LinkBase::Quad(pt, ps);
            let cur = acc.remove(&base).unwrap_or_else(F::zero);
            acc.insert(base, cur.add(&ga.weight));
        }
        // Linear term -mu_{v,s',t} w_{s',s}.
        if ga.tgt == tr.t && ga.src <= tr.s {
            let ps = pairs[&Pair { i: ga.src, j: tr.s }];
            let base = LinkBase::Lin(ps);
            let cur = acc.remove(&base).unwrap_or_else(F::zero);
            acc.insert(base, cur.sub(&ga.weight));
        }
    }
    acc.into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(base, weight)| Link { tip, base, weight })
        .collect()
}

/// The terms of the reduced cell equation, obtained from the complete one by
/// substituting w_{s,s} = 1 and w_{t,t} = 0.
fn reduced_links<F: Field>(
    gamma: &CoefficientQuiver<F>,
    pairs: &BTreeMap<Pair, PairId>,
    tip: TripleId,
    tr: &Triple,
) -> Vec<Link<F>> {
    let mut acc: BTreeMap<LinkBase, F> = BTreeMap::new();
    let mut add = |base: LinkBase, w: F| {
        let cur = acc.remove(&base).unwrap_or_else(F::zero);
        acc.insert(base, cur.add(&w));
    };
    for ga in gamma.arrows().iter().filter(|a| a.arrow == tr.arrow) {
        if ga.src == tr.s && ga.tgt > tr.t {
            add(
                LinkBase::Lin(pairs[&Pair { i: tr.t, j: ga.tgt }]),
                ga.weight.clone(),
            );
        }
        if ga.src < tr.s && ga.tgt > tr.t {
            let pt = pairs[&Pair { i: tr.t, j: ga.tgt }];
            let ps = pairs[&Pair { i: ga.src, j: tr.s }];
            add(LinkBase::Quad(pt, ps), ga.weight.clone());
        }
        if ga.src < tr.s && ga.tgt == tr.t {
            add(
                LinkBase::Lin(pairs[&Pair { i: ga.src, j: tr.s }]),
                ga.weight.neg(),
            );
        }
        if ga.src == tr.s && ga.tgt == tr.t {
            add(LinkBase::Const, ga.weight.neg());
        }
    }
    acc.into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(base, weight)| Link { tip, base, weight })
        .collect()
}

fn relevant_pairs<F: Field>(gamma: &CoefficientQuiver<F>, strict: bool) -> Vec<Pair> {
    let mut out = Vec::new();
    for p in 0..gamma.quiver.vertex_count() {
        let fiber = gamma.fiber(p);
        for (k, &i) in fiber.iter().enumerate() {
            for &j in &fiber[if strict { k + 1 } else { k }..] {
                out.push(Pair { i, j });
            }
        }
    }
    out.sort_unstable();
    out
}

fn relevant_triples<F: Field>(gamma: &CoefficientQuiver<F>) -> Vec<Triple> {
    let mut out = Vec::new();
    for (aid, arr) in gamma.quiver.arrows().iter().enumerate() {
        let src_fiber = gamma.fiber(arr.src);
        let tgt_fiber = gamma.fiber(arr.tgt);
        for &t in &tgt_fiber {
            for &s in &src_fiber {
                let relevant = gamma
                    .arrows()
                    .iter()
                    .any(|ga| ga.arrow == aid && s >= ga.src && t <= ga.tgt);
                if relevant {
                    out.push(Triple { arrow: aid, t, s });
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Builds the complete Schubert system.
pub fn build_complete<F: Field>(gamma: &CoefficientQuiver<F>) -> SchubertSystem<F> {
    let pairs = relevant_pairs(gamma, false);
    let pair_index: BTreeMap<Pair, PairId> =
        pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let triples = relevant_triples(gamma);
    let mut links = Vec::new();
    for (tid, tr) in triples.iter().enumerate() {
        links.extend(complete_links(gamma, &pair_index, tid, tr));
    }
    SchubertSystem {
        gamma: gamma.clone(),
        kind: SystemKind::Complete,
        pairs,
        triples,
        links,
        extremal_arrow: extremal_arrows(gamma),
    }
}

/// Builds the reduced Schubert system: diagonal pairs are dropped, triples
/// whose arrow `(v,s,t)` is extremal in the coefficient quiver are dropped,
/// and the equations are rewritten with w_{s,s} = 1, w_{t,t} = 0.
pub fn build_reduced<F: Field>(gamma: &CoefficientQuiver<F>) -> SchubertSystem<F> {
    let extremal = extremal_arrows(gamma);
    let pairs = relevant_pairs(gamma, true);
    let pair_index: BTreeMap<Pair, PairId> =
        pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let triples: Vec<Triple> =
        relevant_triples(gamma)
            .into_iter()
            .filter(|tr| {
                !gamma.arrows().iter().enumerate().any(|(k, a)| {
                    a.arrow == tr.arrow && a.src == tr.s && a.tgt == tr.t && extremal[k]
                })
            })
            .collect();
    let mut links = Vec::new();
    for (tid, tr) in triples.iter().enumerate() {
        links.extend(reduced_links(gamma, &pair_index, tid, tr));
    }
    SchubertSystem {
        gamma: gamma.clone(),
        kind: SystemKind::Reduced,
        pairs,
        triples,
        links,
        extremal_arrow: extremal,
    }
}

pub fn build_system<F: Field>(gamma: &CoefficientQuiver<F>, kind: SystemKind) -> SchubertSystem<F> {
    match kind {
        SystemKind::Complete => build_complete(gamma),
        SystemKind::Reduced => build_reduced(gamma),
    }
}

/// The complete cell equation of a single triple, as a link list.
pub fn cell_equation<F: Field>(
    gamma: &CoefficientQuiver<F>,
    label: &str,
    t: u32,
    s: u32,
) -> Result<Vec<Link<F>>> {
    let sys = build_complete(gamma);
    let tid = sys
        .triple_id(label, t, s)
        .ok_or_else(|| Error::NotARelevantTriple {
            arrow: label.to_string(),
            t,
            s,
        })?;
    Ok(sys.links_of_tip(tid).cloned().collect())
}

/// Degree check: every variable appears with degree <= 1 in each term.
pub fn degrees_are_multilinear<F: Field>(sys: &SchubertSystem<F>) -> bool {
    sys.links.iter().all(|l| match l.base {
        LinkBase::Quad(p, q) => p != q,
        _ => true,
    })
}

/// Canonical string of the equation indexed by an arrow label and two basis
/// vertices.
pub fn equation_text(sys: &SchubertSystem<Rat>, label: &str, t: u32, s: u32) -> Option<String> {
    sys.triple_id(label, t, s)
        .map(|tid| sys.equation_string(tid))
}

/// Renders a link list for error messages and tests.
pub fn links_to_string(sys: &SchubertSystem<Rat>, links: &[Link<Rat>]) -> String {
    let mut parts = Vec::new();
    for l in links {
        let w = rat_as_i64(&l.weight).map_or_else(|| l.weight.to_string(), |x| x.to_string());
        let base = match l.base {
            LinkBase::Const => "1".to_string(),
            LinkBase::Lin(p) => format!("w_{{{},{}}}", sys.pairs[p].i, sys.pairs[p].j),
            LinkBase::Quad(p, q) => format!(
                "w_{{{},{}}}*w_{{{},{}}}",
                sys.pairs[p].i, sys.pairs[p].j, sys.pairs[q].i, sys.pairs[q].j
            ),
        };
        parts.push(format!("{w}*{base}"));
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{Dir, Quiver};
    use crate::rep::GammaArrow;
    use crate::scalar::Rat;

    /// The thin sincere representation of equioriented A_3.
    fn a3_thin() -> CoefficientQuiver<Rat> {
        let q = Quiver::dynkin_a(3, &[Dir::R, Dir::R]);
        let a = q.arrow_by_label("a").unwrap();
        let b = q.arrow_by_label("b").unwrap();
        CoefficientQuiver::new(
            q,
            vec![(1, 0), (2, 1), (3, 2)],
            vec![
                GammaArrow {
                    arrow: a,
                    src: 1,
                    tgt: 2,
                    weight: Rat::one(),
                },
                GammaArrow {
                    arrow: b,
                    src: 2,
                    tgt: 3,
                    weight: Rat::one(),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn a3_complete_system() {
        let gamma = a3_thin();
        let sys = build_complete(&gamma);
        let pair_set: Vec<(u32, u32)> = sys.pairs.iter().map(|p| (p.i, p.j)).collect();
        assert_eq!(pair_set, vec![(1, 1), (2, 2), (3, 3)]);
        assert_eq!(sys.triples.len(), 2);
        assert_eq!(
            equation_text(&sys, "a", 2, 1).unwrap(),
            "w_{2,2}*w_{1,1} - w_{1,1}"
        );
        assert_eq!(
            equation_text(&sys, "b", 3, 2).unwrap(),
            "w_{3,3}*w_{2,2} - w_{2,2}"
        );
    }

    #[test]
    fn a3_reduced_system_is_trivial() {
        let sys = build_reduced(&a3_thin());
        assert!(sys.pairs.is_empty());
        assert!(sys.triples.is_empty());
        assert!(sys.links.is_empty());
    }

    #[test]
    fn cell_equation_requires_a_relevant_triple() {
        let gamma = a3_thin();
        assert!(cell_equation(&gamma, "a", 3, 1).is_err());
        assert!(cell_equation(&gamma, "a", 2, 1).is_ok());
    }

    #[test]
    fn equations_are_multilinear() {
        let sys = build_complete(&a3_thin());
        assert!(degrees_are_multilinear(&sys));
    }
}
