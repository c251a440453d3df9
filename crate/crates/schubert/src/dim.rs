//! Dimension vectors, the Euler form, roots, defect and simple reflections.

use std::fmt;
use std::ops::{Add, Index, Sub};

use crate::quiver::{DiagramAut, Quiver, VertexId};
use crate::Error;

/// An integer vector indexed by the vertices of a quiver. Signed entries are
/// allowed so that root arithmetic stays closed under reflections.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct DimVector(pub Vec<i64>);

impl DimVector {
    pub fn zero(q: &Quiver) -> Self {
        DimVector(vec![0; q.vertex_count()])
    }

    pub fn unit(q: &Quiver, v: VertexId) -> Self {
        let mut d = Self::zero(q);
        d.0[v] = 1;
        d
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn leq(&self, other: &DimVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scaled(&self, k: i64) -> DimVector {
        DimVector(self.0.iter().map(|x| x.checked_mul(k).unwrap()).collect())
    }

    pub fn parse(s: &str, q: &Quiver) -> Result<Self, Error> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("invalid dimension vector: {s}")))
            })
            .collect::<Result<_, _>>()?;
        if parts.len() != q.vertex_count() {
            return Err(Error::Parse(format!(
                "dimension vector needs {} entries, got {}",
                q.vertex_count(),
                parts.len()
            )));
        }
        Ok(DimVector(parts))
    }
}

impl Index<VertexId> for DimVector {
    type Output = i64;
    fn index(&self, v: VertexId) -> &i64 {
        &self.0[v]
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, other: &DimVector) -> DimVector {
        assert_eq!(self.0.len(), other.0.len());
        DimVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).unwrap())
                .collect(),
        )
    }
}

impl Sub for &DimVector {
    type Output = DimVector;
    fn sub(self, other: &DimVector) -> DimVector {
        assert_eq!(self.0.len(), other.0.len());
        DimVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_sub(*b).unwrap())
                .collect(),
        )
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

/// The Euler form `<alpha, beta> = sum_p alpha_p beta_p - sum_{v: p->q}
/// alpha_p beta_q` of the quiver.
pub fn euler_form(q: &Quiver, alpha: &DimVector, beta: &DimVector) -> Result<i64, Error> {
    if alpha.len() != q.vertex_count() || beta.len() != q.vertex_count() {
        return Err(Error::MismatchedVertexSets);
    }
    let mut acc: i64 = 0;
    for p in 0..q.vertex_count() {
        acc = acc
            .checked_add(alpha[p].checked_mul(beta[p]).unwrap())
            .unwrap();
    }
    for arr in q.arrows() {
        acc = acc
            .checked_sub(alpha[arr.src].checked_mul(beta[arr.tgt]).unwrap())
            .unwrap();
    }
    Ok(acc)
}

/// The Tits form `q(alpha) = <alpha, alpha>`.
pub fn tits_form(q: &Quiver, alpha: &DimVector) -> Result<i64, Error> {
    euler_form(q, alpha, alpha)
}

/// The minimal positive imaginary root `delta` of an extended Dynkin quiver.
pub fn delta(q: &Quiver) -> Result<DimVector, Error> {
    use crate::quiver::Shape;
    match q.shape {
        Shape::DTilde { n } => {
            let mut d = vec![1, 1];
            d.extend(std::iter::repeat_n(2, n - 3));
            d.push(1);
            d.push(1);
            Ok(DimVector(d))
        }
        Shape::Kronecker => Ok(DimVector(vec![1, 1])),
        _ => Err(Error::NotDTilde(
            "delta is only defined for extended Dynkin quivers",
        )),
    }
}

/// The defect `<delta, alpha>`; negative for preprojectives, zero for
/// regulars, positive for preinjectives.
pub fn defect(q: &Quiver, alpha: &DimVector) -> Result<i64, Error> {
    euler_form(q, &delta(q)?, alpha)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RootClass {
    Real,
    Imaginary,
    NotARoot,
}

pub fn classify_root(q: &Quiver, alpha: &DimVector) -> Result<RootClass, Error> {
    if alpha.is_zero() {
        return Ok(RootClass::NotARoot);
    }
    Ok(match tits_form(q, alpha)? {
        1 => RootClass::Real,
        0 => RootClass::Imaginary,
        _ => RootClass::NotARoot,
    })
}

/// The simple reflection `s_p(alpha) = alpha - (<alpha,e_p> + <e_p,alpha>) e_p`.
pub fn reflect_dim(q: &Quiver, p: VertexId, alpha: &DimVector) -> DimVector {
    let e = DimVector::unit(q, p);
    let c = euler_form(q, alpha, &e).unwrap() + euler_form(q, &e, alpha).unwrap();
    let mut out = alpha.clone();
    out.0[p] -= c;
    out
}

/// An admissible order of all vertices for the Coxeter transformation: each
/// vertex is a sink of the orientation obtained by reflecting at all earlier
/// vertices. Exists because the quiver is acyclic.
pub fn admissible_sink_order(q: &Quiver) -> Vec<VertexId> {
    let mut current = q.clone();
    let mut order = Vec::new();
    let mut used = vec![false; q.vertex_count()];
    for _ in 0..q.vertex_count() {
        let v = (0..q.vertex_count())
            .find(|&v| !used[v] && current.is_sink(v))
            .expect("acyclic quiver has a sink among unused vertices");
        order.push(v);
        used[v] = true;
        current = current.reflect_at(v);
    }
    order
}

/// Admissible source order (for the inverse Coxeter transformation).
pub fn admissible_source_order(q: &Quiver) -> Vec<VertexId> {
    let mut current = q.clone();
    let mut order = Vec::new();
    let mut used = vec![false; q.vertex_count()];
    for _ in 0..q.vertex_count() {
        let v = (0..q.vertex_count())
            .find(|&v| !used[v] && current.is_source(v))
            .expect("acyclic quiver has a source among unused vertices");
        order.push(v);
        used[v] = true;
        current = current.reflect_at(v);
    }
    order
}

/// Dimension-vector action of the Coxeter transformation (the Auslander-
/// Reiten translate tau on the level of dimension vectors), computed as the
/// product of simple reflections along an admissible sink order.
pub fn coxeter_dim(q: &Quiver, alpha: &DimVector) -> DimVector {
    let mut out = alpha.clone();
    let mut current = q.clone();
    for v in admissible_sink_order(q) {
        out = reflect_dim(&current, v, &out);
        current = current.reflect_at(v);
    }
    out
}

/// Dimension-vector action of the inverse Coxeter transformation.
pub fn coxeter_inv_dim(q: &Quiver, alpha: &DimVector) -> DimVector {
    let mut out = alpha.clone();
    let mut current = q.clone();
    for v in admissible_source_order(q) {
        out = reflect_dim(&current, v, &out);
        current = current.reflect_at(v);
    }
    out
}

/// Relabels a dimension vector along a diagram automorphism.
pub fn apply_automorphism_dim(sigma: &DiagramAut, q: &Quiver, alpha: &DimVector) -> DimVector {
    let mut out = vec![0; alpha.len()];
    for v in 0..alpha.len() {
        out[sigma.apply_vertex(q, v)] = alpha[v];
    }
    DimVector(out)
}

/// Dimension vectors of the indecomposable injective representations; used
/// to test whether a root is an injective dimension vector.
pub fn injective_dims(q: &Quiver) -> Vec<DimVector> {
    (0..q.vertex_count())
        .map(|p| {
            // I(p) is supported on all vertices with an oriented path to p.
            let mut reach = vec![false; q.vertex_count()];
            reach[p] = true;
            loop {
                let mut changed = false;
                for a in q.arrows() {
                    if reach[a.tgt] && !reach[a.src] {
                        reach[a.src] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            DimVector(reach.iter().map(|&b| i64::from(b)).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{DTildeOrientation, Dir};

    fn d4() -> Quiver {
        Quiver::dtilde(4, &DTildeOrientation::all_r(4))
    }

    #[test]
    fn euler_form_on_delta_vanishes() {
        for n in [4usize, 5, 6] {
            let q = Quiver::dtilde(n, &DTildeOrientation::all_r(n));
            let d = delta(&q).unwrap();
            assert_eq!(euler_form(&q, &d, &d).unwrap(), 0);
        }
    }

    #[test]
    fn euler_form_unit_vectors() {
        let q = d4();
        let e = DimVector::unit(&q, 0);
        assert_eq!(euler_form(&q, &e, &e).unwrap(), 1);
    }

    #[test]
    fn defect_of_simple_projective_at_arm_is_minus_one() {
        // The simple at q_a is projective when a points towards q_a.
        let q = Quiver::dtilde(4, &DTildeOrientation::parse("LRRR", 4).unwrap());
        let e_a = DimVector::unit(&q, 0);
        assert_eq!(euler_form(&q, &delta(&q).unwrap(), &e_a).unwrap(), -1);
        assert_eq!(defect(&q, &e_a).unwrap(), -1);
    }

    #[test]
    fn defect_is_linear() {
        let q = Quiver::dtilde(4, &DTildeOrientation::parse("LRRR", 4).unwrap());
        let d = delta(&q).unwrap();
        let e_a = DimVector::unit(&q, 0);
        let v = &d.scaled(2) + &e_a;
        assert_eq!(defect(&q, &v).unwrap(), -1);
        assert_eq!(defect(&q, &d).unwrap(), 0);
    }

    #[test]
    fn root_classification() {
        let q = d4();
        let d = delta(&q).unwrap();
        assert_eq!(classify_root(&q, &d).unwrap(), RootClass::Imaginary);
        let e = DimVector::unit(&q, 2);
        assert_eq!(classify_root(&q, &e).unwrap(), RootClass::Real);
        assert_eq!(
            classify_root(&q, &e.scaled(2)).unwrap(),
            RootClass::NotARoot
        );
    }

    #[test]
    fn reflection_examples() {
        let q = d4();
        let e0 = DimVector::unit(&q, 2);
        assert_eq!(reflect_dim(&q, 2, &e0), e0.scaled(-1));
        // s_{q_0}(e_{q_a}) = e_{q_a} + e_{q_0} when a points towards q_0.
        let e_a = DimVector::unit(&q, 0);
        let r = reflect_dim(&q, 2, &e_a);
        assert_eq!(r, &e_a + &DimVector::unit(&q, 2));
    }

    #[test]
    fn reflections_are_involutions_and_preserve_defect() {
        let q = Quiver::dtilde(5, &DTildeOrientation::parse("RLRLR", 5).unwrap());
        let alpha = DimVector(vec![1, 2, 3, 1, 0, 2]);
        for p in 0..q.vertex_count() {
            let twice = reflect_dim(&q, p, &reflect_dim(&q, p, &alpha));
            assert_eq!(twice, alpha);
            // At a sink or source, s_p preserves the defect (computed in the
            // reflected quiver); in particular s_p(delta) = delta.
            if q.is_sink(p) || q.is_source(p) {
                let rq = q.reflect_at(p);
                assert_eq!(
                    defect(&rq, &reflect_dim(&q, p, &alpha)).unwrap(),
                    defect(&q, &alpha).unwrap()
                );
            }
            assert_eq!(reflect_dim(&q, p, &delta(&q).unwrap()), delta(&q).unwrap());
        }
    }

    #[test]
    fn coxeter_fixes_delta() {
        for orient in ["RRRR", "RLRL", "LLRR"] {
            let q = Quiver::dtilde(4, &DTildeOrientation::parse(orient, 4).unwrap());
            let d = delta(&q).unwrap();
            assert_eq!(coxeter_dim(&q, &d), d);
            assert_eq!(coxeter_inv_dim(&q, &d), d);
        }
    }

    #[test]
    fn coxeter_inverse_inverts() {
        let q = Quiver::dtilde(5, &DTildeOrientation::all_r(5));
        let alpha = DimVector(vec![1, 0, 2, 1, 1, 0]);
        assert_eq!(coxeter_inv_dim(&q, &coxeter_dim(&q, &alpha)), alpha);
    }

    #[test]
    fn tits_form_is_positive_semidefinite_at_desk_scale() {
        fn sweep(q: &Quiver) {
            let mut v = vec![-3i64; 5];
            loop {
                let alpha = DimVector(v.clone());
                assert!(tits_form(q, &alpha).unwrap() >= 0, "q({alpha}) < 0");
                let mut i = 0;
                loop {
                    if i == 5 {
                        return;
                    }
                    v[i] += 1;
                    if v[i] <= 3 {
                        break;
                    }
                    v[i] = -3;
                    i += 1;
                }
            }
        }
        for orient in [
            DTildeOrientation::all_r(4),
            DTildeOrientation::parse("LRLR", 4).unwrap(),
        ] {
            sweep(&Quiver::dtilde(4, &orient));
        }
    }

    #[test]
    fn automorphism_preserves_euler_form() {
        let q = Quiver::dtilde(6, &DTildeOrientation::parse("RLRRLR", 6).unwrap());
        let alpha = DimVector(vec![1, 2, 3, 4, 5, 6, 7]);
        let beta = DimVector(vec![2, 0, 1, 3, 1, 0, 2]);
        for sigma in DiagramAut::all(6) {
            let sq = sigma.apply_quiver(&q).unwrap();
            let sa = apply_automorphism_dim(&sigma, &q, &alpha);
            let sb = apply_automorphism_dim(&sigma, &q, &beta);
            assert_eq!(
                euler_form(&q, &alpha, &beta).unwrap(),
                euler_form(&sq, &sa, &sb).unwrap(),
                "sigma={:?}",
                sigma.perm
            );
        }
    }

    #[test]
    fn injective_dimension_vectors() {
        let q = Quiver::dtilde(4, &DTildeOrientation::parse("RRLL", 4).unwrap());
        // All arrows point into q_0, so I(q_0) is sincere.
        let dims = injective_dims(&q);
        assert!(dims.contains(&DimVector(vec![1, 1, 1, 1, 1])));
        let _ = Dir::R;
    }
}
