//! Matrix representations over exact fields and coefficient quivers with
//! ordered bases.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::linalg::{cokernel_projection, Mat, Subspace};
use crate::quiver::{ArrowId, Quiver, VertexId};
use crate::scalar::{Field, Rat};
use crate::{Error, Result};

/// A representation: one exact matrix of shape (dim target x dim source) per
/// arrow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Representation<F> {
    pub quiver: Quiver,
    pub dims: Vec<usize>,
    pub mats: Vec<Mat<F>>,
}

impl<F: Field> Representation<F> {
    pub fn zero_maps(quiver: Quiver, dims: Vec<usize>) -> Self {
        assert_eq!(dims.len(), quiver.vertex_count());
        let mats = quiver
            .arrows()
            .iter()
            .map(|a| Mat::zero(dims[a.tgt], dims[a.src]))
            .collect();
        Representation { quiver, dims, mats }
    }

    pub fn dim_vector(&self) -> crate::dim::DimVector {
        crate::dim::DimVector(self.dims.iter().map(|&d| d as i64).collect())
    }

    /// Reflection functor at a sink (kernel variant) or source (cokernel
    /// variant). The new basis is chosen by reduced row echelon form with
    /// pivots preferred leftmost, so the output is reproducible.
    pub fn reflect(&self, p: VertexId) -> Result<Representation<F>> {
        let q = &self.quiver;
        if q.is_sink(p) {
            let incoming: Vec<ArrowId> = (0..q.arrows().len())
                .filter(|&a| q.arrow(a).tgt == p)
                .collect();
            // Phi: (+) M_src -> M_p, columns blocked per incoming arrow.
            let total: usize = incoming.iter().map(|&a| self.dims[q.arrow(a).src]).sum();
            let mut phi = Mat::zero(self.dims[p], total);
            let mut offset = 0;
            for &a in &incoming {
                let m = &self.mats[a];
                for i in 0..m.rows {
                    for j in 0..m.cols {
                        phi[(i, offset + j)] = m[(i, j)].clone();
                    }
                }
                offset += m.cols;
            }
            let kernel = phi.kernel_basis();
            let new_dim = kernel.len();
            let rq = q.reflect_at(p);
            let mut out = Representation::zero_maps(rq, {
                let mut d = self.dims.clone();
                d[p] = new_dim;
                d
            });
            for (a, m) in self.mats.iter().enumerate() {
                if q.arrow(a).tgt != p {
                    out.mats[a] = m.clone();
                }
            }
            // New maps M'_v: ker -> M_src are the block rows of the kernel basis.
            let mut offset = 0;
            for &a in &incoming {
                let src_dim = self.dims[q.arrow(a).src];
                let mut m = Mat::zero(src_dim, new_dim);
                for (k, vec) in kernel.iter().enumerate() {
                    for i in 0..src_dim {
                        m[(i, k)] = vec[offset + i].clone();
                    }
                }
                out.mats[a] = m;
                offset += src_dim;
            }
            Ok(out)
        } else if q.is_source(p) {
            let outgoing: Vec<ArrowId> = (0..q.arrows().len())
                .filter(|&a| q.arrow(a).src == p)
                .collect();
            // Psi: M_p -> (+) M_tgt, rows blocked per outgoing arrow.
            let total: usize = outgoing.iter().map(|&a| self.dims[q.arrow(a).tgt]).sum();
            let mut psi = Mat::zero(total, self.dims[p]);
            let mut offset = 0;
            for &a in &outgoing {
                let m = &self.mats[a];
                for i in 0..m.rows {
                    for j in 0..m.cols {
                        psi[(offset + i, j)] = m[(i, j)].clone();
                    }
                }
                offset += m.rows;
            }
            let proj = cokernel_projection(&psi);
            let new_dim = proj.rows;
            let rq = q.reflect_at(p);
            let mut out = Representation::zero_maps(rq, {
                let mut d = self.dims.clone();
                d[p] = new_dim;
                d
            });
            for (a, m) in self.mats.iter().enumerate() {
                if q.arrow(a).src != p {
                    out.mats[a] = m.clone();
                }
            }
            // New maps M'_v: M_tgt -> coker are the block columns of the projection.
            let mut offset = 0;
            for &a in &outgoing {
                let tgt_dim = self.dims[q.arrow(a).tgt];
                let mut m = Mat::zero(new_dim, tgt_dim);
                for i in 0..new_dim {
                    for j in 0..tgt_dim {
                        m[(i, j)] = proj[(i, offset + j)].clone();
                    }
                }
                out.mats[a] = m;
                offset += tgt_dim;
            }
            Ok(out)
        } else {
            Err(Error::NotSinkOrSource(q.label(p).to_string()))
        }
    }

    /// Ranks of all compositions of arrow matrices along paths of length at
    /// most `max_len`; a sound desk-scale heuristic for comparing
    /// isomorphism classes.
    pub fn rank_profile(&self, max_len: usize) -> BTreeMap<Vec<ArrowId>, usize> {
        let mut out = BTreeMap::new();
        let mut frontier: Vec<(Vec<ArrowId>, VertexId, Mat<F>)> = Vec::new();
        for (a, m) in self.mats.iter().enumerate() {
            frontier.push((vec![a], self.quiver.arrow(a).tgt, m.clone()));
        }
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (path, end, m) in &frontier {
                out.insert(path.clone(), m.rank());
                for (a, am) in self.mats.iter().enumerate() {
                    if self.quiver.arrow(a).src == *end {
                        let mut p = path.clone();
                        p.push(a);
                        next.push((p, self.quiver.arrow(a).tgt, am.mul(m)));
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        out
    }
}

/// A coefficient quiver: the support graph of a representation in an ordered
/// basis, with the nonzero matrix entries as arrow weights and the map `F`
/// to the base quiver recorded per vertex. Vertices are natural numbers and
/// the total order on the basis is the numeric order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoefficientQuiver<F> {
    pub quiver: Quiver,
    verts: Vec<(u32, VertexId)>,
    arrows: Vec<GammaArrow<F>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GammaArrow<F> {
    pub arrow: ArrowId,
    pub src: u32,
    pub tgt: u32,
    pub weight: F,
}

impl<F: Field> CoefficientQuiver<F> {
    pub fn new(
        quiver: Quiver,
        mut verts: Vec<(u32, VertexId)>,
        mut arrows: Vec<GammaArrow<F>>,
    ) -> Result<Self> {
        verts.sort_by_key(|&(id, _)| id);
        verts.dedup();
        let ids: BTreeSet<u32> = verts.iter().map(|&(id, _)| id).collect();
        if ids.len() != verts.len() {
            return Err(Error::InvalidFamily("duplicate basis vertex id".into()));
        }
        let over: BTreeMap<u32, VertexId> = verts.iter().copied().collect();
        for ga in &arrows {
            let arr = quiver.arrow(ga.arrow);
            if over.get(&ga.src) != Some(&arr.src) || over.get(&ga.tgt) != Some(&arr.tgt) {
                return Err(Error::InvalidFamily(format!(
                    "arrow ({},{},{}) does not lie over its base arrow",
                    arr.label, ga.src, ga.tgt
                )));
            }
            if ga.weight.is_zero() {
                return Err(Error::InvalidFamily("zero weight".into()));
            }
        }
        arrows.sort_by_key(|a| (a.arrow, a.src, a.tgt));
        Ok(CoefficientQuiver {
            quiver,
            verts,
            arrows,
        })
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.verts.iter().map(|&(id, _)| id)
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.verts.binary_search_by_key(&id, |&(i, _)| i).is_ok()
    }

    pub fn over(&self, id: u32) -> VertexId {
        let idx = self
            .verts
            .binary_search_by_key(&id, |&(i, _)| i)
            .expect("vertex id");
        self.verts[idx].1
    }

    /// The fiber over a base vertex, in increasing order.
    pub fn fiber(&self, p: VertexId) -> Vec<u32> {
        self.verts
            .iter()
            .filter(|&&(_, q)| q == p)
            .map(|&(id, _)| id)
            .collect()
    }

    pub fn arrows(&self) -> &[GammaArrow<F>] {
        &self.arrows
    }

    pub fn dim_vector(&self) -> crate::dim::DimVector {
        let mut d = vec![0i64; self.quiver.vertex_count()];
        for &(_, p) in &self.verts {
            d[p] += 1;
        }
        crate::dim::DimVector(d)
    }

    pub fn map_weights<G: Field>(
        &self,
        f: impl Fn(&F) -> Result<G>,
    ) -> Result<CoefficientQuiver<G>> {
        let arrows = self
            .arrows
            .iter()
            .map(|a| {
                Ok(GammaArrow {
                    arrow: a.arrow,
                    src: a.src,
                    tgt: a.tgt,
                    weight: f(&a.weight)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientQuiver::new(self.quiver.clone(), self.verts.clone(), arrows)
    }

    /// Rebuilds the representation whose matrices have the arrow weights as
    /// entries; the basis of `M_p` is the fiber over `p` in increasing order.
    pub fn push_forward(&self) -> Representation<F> {
        let dims: Vec<usize> = (0..self.quiver.vertex_count())
            .map(|p| self.fiber(p).len())
            .collect();
        let mut rep = Representation::zero_maps(self.quiver.clone(), dims);
        for ga in &self.arrows {
            let arr = self.quiver.arrow(ga.arrow);
            let col = self
                .fiber(arr.src)
                .iter()
                .position(|&i| i == ga.src)
                .unwrap();
            let row = self
                .fiber(arr.tgt)
                .iter()
                .position(|&j| j == ga.tgt)
                .unwrap();
            rep.mats[ga.arrow][(row, col)] = ga.weight.clone();
        }
        rep
    }

    /// Extracts the coefficient quiver of `rep` with respect to the basis
    /// labelled by `ids[p]` (one id per standard basis vector of `M_p`).
    pub fn of_representation(rep: &Representation<F>, ids: &[Vec<u32>]) -> Result<Self> {
        if ids.len() != rep.quiver.vertex_count() {
            return Err(Error::MismatchedVertexSets);
        }
        for (p, list) in ids.iter().enumerate() {
            if list.len() != rep.dims[p] {
                return Err(Error::BasisSizeMismatch {
                    vertex: rep.quiver.label(p).to_string(),
                    expected: rep.dims[p],
                    got: list.len(),
                });
            }
        }
        let mut verts = Vec::new();
        for (p, list) in ids.iter().enumerate() {
            for &id in list {
                verts.push((id, p));
            }
        }
        let mut arrows = Vec::new();
        for (a, m) in rep.mats.iter().enumerate() {
            let arr = rep.quiver.arrow(a);
            for (col, &i) in ids[arr.src].iter().enumerate() {
                for (row, &j) in ids[arr.tgt].iter().enumerate() {
                    if !m[(row, col)].is_zero() {
                        arrows.push(GammaArrow {
                            arrow: a,
                            src: i,
                            tgt: j,
                            weight: m[(row, col)].clone(),
                        });
                    }
                }
            }
        }
        CoefficientQuiver::new(rep.quiver.clone(), verts, arrows)
    }

    /// Rescales basis vectors so that every arrow outside an undirected
    /// cycle carries weight 1. The isomorphism class of the push-forward is
    /// unchanged.
    pub fn normalize_weights(&self) -> CoefficientQuiver<F> {
        // Scale factors lambda per vertex; an arrow (v, i, j, mu) becomes
        // mu * lambda_i / lambda_j.
        let mut lambda: BTreeMap<u32, F> = BTreeMap::new();
        let mut adj: BTreeMap<u32, Vec<(usize, bool)>> = BTreeMap::new();
        for (idx, a) in self.arrows.iter().enumerate() {
            adj.entry(a.src).or_default().push((idx, true));
            adj.entry(a.tgt).or_default().push((idx, false));
        }
        for &(root, _) in &self.verts {
            if lambda.contains_key(&root) {
                continue;
            }
            lambda.insert(root, F::one());
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                let lu = lambda[&u].clone();
                for &(idx, forward) in adj.get(&u).iter().flat_map(|v| v.iter()) {
                    let a = &self.arrows[idx];
                    let other = if forward { a.tgt } else { a.src };
                    if lambda.contains_key(&other) {
                        continue;
                    }
                    // Choose the new scale so the arrow weight becomes 1.
                    let l = if forward {
                        // other = target: mu * lu / l = 1
                        a.weight.mul(&lu)
                    } else {
                        // other = source: mu * l / lu = 1
                        lu.div(&a.weight).expect("weights are nonzero")
                    };
                    lambda.insert(other, l);
                    stack.push(other);
                }
            }
        }
        let arrows = self
            .arrows
            .iter()
            .map(|a| GammaArrow {
                arrow: a.arrow,
                src: a.src,
                tgt: a.tgt,
                weight: a
                    .weight
                    .mul(&lambda[&a.src])
                    .div(&lambda[&a.tgt])
                    .expect("scales are nonzero"),
            })
            .collect();
        CoefficientQuiver::new(self.quiver.clone(), self.verts.clone(), arrows)
            .expect("normalization preserves validity")
    }

    /// The dual coefficient quiver: all arrows reversed, the base quiver
    /// reversed, and the order reversed within each fiber. Only the order
    /// within a fiber affects Schubert cells, so ids are permuted fiberwise.
    pub fn dualize(&self) -> CoefficientQuiver<F> {
        let mut flip_map: BTreeMap<u32, u32> = BTreeMap::new();
        for p in 0..self.quiver.vertex_count() {
            let fiber = self.fiber(p);
            for (k, &id) in fiber.iter().enumerate() {
                flip_map.insert(id, fiber[fiber.len() - 1 - k]);
            }
        }
        let flip = |id: u32| flip_map[&id];
        let verts = self.verts.iter().map(|&(id, p)| (flip(id), p)).collect();
        let arrows = self
            .arrows
            .iter()
            .map(|a| GammaArrow {
                arrow: a.arrow,
                src: flip(a.tgt),
                tgt: flip(a.src),
                weight: a.weight.clone(),
            })
            .collect();
        CoefficientQuiver::new(self.quiver.opposite(), verts, arrows)
            .expect("dual of a valid coefficient quiver is valid")
    }

    /// Relabels the base quiver along a diagram automorphism of `D~n`; the
    /// basis ids are unchanged.
    pub fn apply_automorphism(
        &self,
        sigma: &crate::quiver::DiagramAut,
    ) -> Result<CoefficientQuiver<F>> {
        let sq = sigma.apply_quiver(&self.quiver)?;
        let verts = self
            .verts
            .iter()
            .map(|&(id, p)| (id, sigma.apply_vertex(&self.quiver, p)))
            .collect();
        let arrows = self
            .arrows
            .iter()
            .map(|a| {
                let old_label = &self.quiver.arrow(a.arrow).label;
                let new_label = relabel_arrow(sigma, &self.quiver, old_label);
                GammaArrow {
                    arrow: sq.arrow_by_label(&new_label).expect("relabelled arrow"),
                    src: a.src,
                    tgt: a.tgt,
                    weight: a.weight.clone(),
                }
            })
            .collect();
        CoefficientQuiver::new(sq, verts, arrows)
    }

    /// DOT rendering: fibers drawn as columns under their base vertex.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph gamma {\n  rankdir=LR;\n  node [shape=circle];\n");
        for p in 0..self.quiver.vertex_count() {
            let fiber = self.fiber(p);
            if fiber.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                "  subgraph cluster_{} {{ label=\"q_{}\";",
                p,
                self.quiver.label(p)
            );
            for id in fiber {
                let _ = writeln!(s, "    n{id} [label=\"{id}\"];");
            }
            s.push_str("  }\n");
        }
        for a in &self.arrows {
            let label = &self.quiver.arrow(a.arrow).label;
            let w = if a.weight.is_one() {
                label.clone()
            } else {
                format!("{},{}", label, a.weight)
            };
            let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", a.src, a.tgt, w);
        }
        s.push_str("}\n");
        s
    }
}

fn relabel_arrow(sigma: &crate::quiver::DiagramAut, q: &Quiver, label: &str) -> String {
    match label {
        "a" | "b" | "c" | "d" => {
            let i = "abcd".find(label).unwrap();
            crate::quiver::ARM_LETTERS[sigma.perm[i]].to_string()
        }
        other => {
            let n = q.dtilde_n().expect("chain arrows only exist in D~n");
            let x: usize = other[1..].parse().unwrap();
            if sigma.swaps_sides() {
                format!("v{}", n - 5 - x)
            } else {
                other.to_string()
            }
        }
    }
}

impl CoefficientQuiver<Rat> {
    pub fn to_json(&self) -> Value {
        json!({
            "quiver": self.quiver.to_json(),
            "vertices": self.verts.iter().map(|&(id, p)| json!({
                "id": id,
                "over": self.quiver.label(p),
            })).collect::<Vec<_>>(),
            "order": self.verts.iter().map(|&(id, _)| id).collect::<Vec<_>>(),
            "arrows": self.arrows.iter().map(|a| json!({
                "label": self.quiver.arrow(a.arrow).label,
                "src": a.src,
                "tgt": a.tgt,
                "weight": a.weight.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let quiver = Quiver::from_json(&v["quiver"])?;
        let verts = v["vertices"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing vertices".into()))?
            .iter()
            .map(|x| {
                let id = x["id"]
                    .as_u64()
                    .ok_or_else(|| Error::Parse("bad id".into()))? as u32;
                let over = quiver.vertex(x["over"].as_str().unwrap_or_default())?;
                Ok((id, over))
            })
            .collect::<Result<Vec<_>>>()?;
        let arrows = v["arrows"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing arrows".into()))?
            .iter()
            .map(|x| {
                let label = x["label"].as_str().unwrap_or_default();
                let arrow = quiver
                    .arrow_by_label(label)
                    .ok_or_else(|| Error::Parse(format!("unknown arrow {label}")))?;
                Ok(GammaArrow {
                    arrow,
                    src: x["src"].as_u64().unwrap_or(0) as u32,
                    tgt: x["tgt"].as_u64().unwrap_or(0) as u32,
                    weight: x["weight"].as_str().unwrap_or("1").parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientQuiver::new(quiver, verts, arrows)
    }
}

/// Whether a subspace tuple is a subrepresentation of the push-forward.
pub fn is_subrepresentation<F: Field>(rep: &Representation<F>, spaces: &[Subspace<F>]) -> bool {
    rep.mats.iter().enumerate().all(|(a, m)| {
        let arr = rep.quiver.arrow(a);
        spaces[arr.tgt].contains_subspace(&spaces[arr.src].image_under(m))
    })
}
