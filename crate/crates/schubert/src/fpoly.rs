//! F-polynomials and cluster variables: assembly from cell counts and the
//! closed formulas for homogeneous tubes, exceptional tubes, preprojectives
//! and duals.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::dim::DimVector;
use crate::grass::{full_sweep, Classification};
use crate::quiver::Quiver;
use crate::rep::CoefficientQuiver;
use crate::scalar::Rat;
use crate::{Error, Result};

/// A polynomial with integer coefficients in one variable per quiver vertex;
/// exponent vectors may be negative (Laurent) when produced by
/// [`cluster_variable`].
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<DimVector, i64>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(DimVector(vec![0; nvars]), 1)
    }

    pub fn monomial(exps: DimVector, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(exps, coeff);
        }
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.terms.keys().next().map_or(0, DimVector::len)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DimVector, &i64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &DimVector) -> i64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut terms = self.terms.clone();
        for (e, &c) in &other.terms {
            let v = terms.entry(e.clone()).or_insert(0);
            *v = v.checked_add(c).expect("coefficient overflow");
            if *v == 0 {
                terms.remove(e);
            }
        }
        MultiPoly { terms }
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut terms: BTreeMap<DimVector, i64> = BTreeMap::new();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e = e1 + e2;
                let v = terms.entry(e.clone()).or_insert(0);
                *v = v
                    .checked_add(c1.checked_mul(c2).expect("coefficient overflow"))
                    .expect("coefficient overflow");
                if *v == 0 {
                    terms.remove(&e);
                }
            }
        }
        MultiPoly { terms }
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &DimVector) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(k, &c)| (k + e, c)).collect(),
        }
    }

    /// Value at x_p = 1 for all p: the total cell count.
    pub fn eval_ones(&self) -> i64 {
        self.terms.values().sum()
    }

    /// The coefficient mirror `c*_e = c_{dim - e}`.
    pub fn mirror(&self, dim: &DimVector) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(e, &c)| (dim - e, c)).collect(),
        }
    }

    /// Substitutes a Laurent monomial per variable: x_q := x^{subs[q]}.
    pub fn substitute_monomials(&self, subs: &[DimVector]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (e, &c) in &self.terms {
            let mut exp = DimVector(vec![0; subs.first().map_or(0, DimVector::len)]);
            for (q, &pow) in e.0.iter().enumerate() {
                if pow != 0 {
                    exp = &exp + &subs[q].scaled(pow);
                }
            }
            out = out.add(&MultiPoly::monomial(exp, c));
        }
        out
    }

    /// Text rendering with one variable per vertex, monomials ordered by
    /// total degree and then lexicographically.
    pub fn to_text(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&DimVector> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.total(), (*e).clone()));
        let mut out = String::new();
        for (idx, e) in keys.iter().enumerate() {
            let c = self.terms[*e];
            let mono = monomial_text(e, q);
            if idx == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            let mag = c.unsigned_abs();
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag == 1 {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }

    pub fn to_json(&self, q: &Quiver) -> Value {
        let mut keys: Vec<&DimVector> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.total(), (*e).clone()));
        json!({
            "vars": q.labels(),
            "terms": keys.iter().map(|e| json!({
                "exps": e.0,
                "coeff": self.terms[*e],
            })).collect::<Vec<_>>(),
        })
    }
}

fn monomial_text(e: &DimVector, q: &Quiver) -> String {
    let mut parts = Vec::new();
    for (v, &pow) in e.0.iter().enumerate() {
        if pow == 0 {
            continue;
        }
        let name = format!("x_{}", q.label(v));
        if pow == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{pow}"));
        }
    }
    parts.join("*")
}

/// The F-polynomial from the classified cells: the sum of chi_e x^e over all
/// types e.
pub fn f_from_cells(gamma: &CoefficientQuiver<Rat>) -> Result<MultiPoly> {
    let sweep = full_sweep(gamma);
    let undetermined = sweep
        .cells
        .iter()
        .filter(|(_, c)| matches!(c, Classification::Undetermined))
        .count();
    if undetermined > 0 {
        return Err(Error::UndeterminedCells(undetermined));
    }
    let mut out = MultiPoly::zero();
    for (e, (chi, _, _)) in &sweep.per_type {
        if *chi > 0 {
            out = out.add(&MultiPoly::monomial(e.clone(), *chi as i64));
        }
    }
    Ok(out)
}

/// `F_{r delta}` by the three-term recurrence
/// `F_{r} = F_delta F_{r-1} - x^delta F_{r-2}` with `F_0 = 1`, `F_1 = F_delta`.
pub fn f_homogeneous_tube(f_delta: &MultiPoly, delta: &DimVector, r: usize) -> MultiPoly {
    let nvars = delta.len();
    let mut prev = MultiPoly::one(nvars);
    if r == 0 {
        return prev;
    }
    let mut cur = f_delta.clone();
    for _ in 1..r {
        let next = f_delta.mul(&cur).sub(&prev.shift(delta));
        prev = cur;
        cur = next;
    }
    cur
}

/// `F_{r,i}` for an exceptional tube of rank m:
/// `F_{0,i} F_{r delta} + x^{alpha(0,i+1)} F_{alpha(0,m-1) - alpha(0,i+1)}
/// F_{(r-1) delta}`, with `alpha(0,m) = delta` and `F_alpha = 0` whenever a
/// coefficient of alpha is negative. `f_alpha` supplies the F-polynomials of
/// real roots.
pub fn f_exceptional_tube(
    f_0: &[MultiPoly],
    alphas0: &[DimVector],
    f_delta: &MultiPoly,
    delta: &DimVector,
    r: usize,
    i: usize,
    f_alpha: &dyn Fn(&DimVector) -> MultiPoly,
) -> Result<MultiPoly> {
    let m = f_0.len() + 1;
    if i >= m {
        return Err(Error::DimOutOfRange(format!(
            "tube index i={i} out of 0..{m}"
        )));
    }
    // i = 0 is the imaginary-root member, with the empty representation as
    // its base (F_{0,0} = 1).
    let f_0i = if i == 0 {
        MultiPoly::one(delta.len())
    } else {
        f_0[i - 1].clone()
    };
    if r == 0 {
        return Ok(f_0i.clone());
    }
    let alpha_next = if i + 1 == m {
        delta.clone()
    } else {
        alphas0[i].clone()
    };
    let alpha_top = alphas0[m - 2].clone();
    let diff = &alpha_top - &alpha_next;
    let f_diff = if diff.is_nonneg() && !diff.is_zero() {
        f_alpha(&diff)
    } else if diff.is_zero() {
        MultiPoly::one(delta.len())
    } else {
        MultiPoly::zero()
    };
    let f_r = f_homogeneous_tube(f_delta, delta, r);
    let f_r1 = f_homogeneous_tube(f_delta, delta, r - 1);
    Ok(f_0i.mul(&f_r).add(&f_diff.mul(&f_r1).shift(&alpha_next)))
}

/// The preprojective formula: `F_eps F_{r delta} - x^delta F_{(r-1) delta}`
/// when `delta - eps` is injective, and
/// `F_eps F_{r delta} - x^{tau^{-1} eps} F_{delta - tau^{-1} eps}
/// F_{(r-1) delta}` otherwise (aux supplies the translate and its
/// F-polynomial).
pub fn f_preprojective(
    f_eps: &MultiPoly,
    eps: &DimVector,
    f_delta: &MultiPoly,
    delta: &DimVector,
    r: usize,
    injective: bool,
    aux: Option<(&DimVector, &MultiPoly)>,
) -> Result<MultiPoly> {
    if !eps.is_nonneg() || !eps.leq(delta) {
        return Err(Error::DimOutOfRange(format!(
            "eps={eps} not between 0 and delta"
        )));
    }
    let f_r = f_homogeneous_tube(f_delta, delta, r);
    if r == 0 {
        return Ok(f_eps.clone());
    }
    let f_r1 = f_homogeneous_tube(f_delta, delta, r - 1);
    if injective {
        Ok(f_eps.mul(&f_r).sub(&f_r1.shift(delta)))
    } else {
        let (tau_inv_eps, f_comp) =
            aux.ok_or_else(|| Error::Parse("non-injective case needs the translate data".into()))?;
        Ok(f_eps.mul(&f_r).sub(&f_comp.mul(&f_r1).shift(tau_inv_eps)))
    }
}

/// The defect -2 extension formula `F_N F_M - x^{dim tau^{-1} M} F_{N/tau^{-1}M}`.
pub fn f_defect_minus_two(
    f_n: &MultiPoly,
    f_m: &MultiPoly,
    f_quot: &MultiPoly,
    tau_dim: &DimVector,
) -> MultiPoly {
    f_n.mul(f_m).sub(&f_quot.shift(tau_dim))
}

/// The dual F-polynomial (coefficient mirror at dim M).
pub fn f_dual(f: &MultiPoly, dim_m: &DimVector) -> MultiPoly {
    f.mirror(dim_m)
}

/// `F_{M + N} = F_M F_N`.
pub fn f_direct_sum(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    f.mul(g)
}

/// The cluster variable of M: a Laurent monomial prefactor times F_M
/// evaluated at the exchange monomials,
/// `X_M = prod_q x_q^{sum_p a(q,p) dim M_p - dim M_q}
///        * F_M((prod_p x_p^{a(q,p) - a(p,q)})_q)`,
/// where `a(p,q)` counts the arrows from p to q. Evaluating at x = 1 gives
/// F_M(1, .., 1).
pub fn cluster_variable(f: &MultiPoly, dim_m: &DimVector, q: &Quiver) -> MultiPoly {
    let nv = q.vertex_count();
    let a = |p: usize, r: usize| -> i64 {
        q.arrows()
            .iter()
            .filter(|arr| arr.src == p && arr.tgt == r)
            .count() as i64
    };
    let mut prefactor = vec![0i64; nv];
    for v in 0..nv {
        let mut acc = -dim_m[v];
        for p in 0..nv {
            acc += a(v, p) * dim_m[p];
        }
        prefactor[v] = acc;
    }
    let subs: Vec<DimVector> = (0..nv)
        .map(|v| DimVector((0..nv).map(|p| a(v, p) - a(p, v)).collect()))
        .collect();
    f.substitute_monomials(&subs).shift(&DimVector(prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilySpec};

    fn fam(s: &str) -> CoefficientQuiver<Rat> {
        build_family(&FamilySpec::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn thin_a3_f_polynomial() {
        let gamma = fam("dynkin-a:n=3,orient=RR");
        let f = f_from_cells(&gamma).unwrap();
        assert_eq!(f.to_text(&gamma.quiver), "1 + x_3 + x_2*x_3 + x_1*x_2*x_3");
        // The dual is the mirror.
        let dual = f_dual(&f, &gamma.dim_vector());
        assert_eq!(
            dual.to_text(&gamma.quiver),
            "1 + x_1 + x_1*x_2 + x_1*x_2*x_3"
        );
        assert_eq!(f_dual(&dual, &gamma.dim_vector()), f);
        assert_eq!(dual.eval_ones(), f.eval_ones());
    }

    #[test]
    fn zero_representation_has_unit_f_polynomial() {
        let gamma = fam("dynkin-a:n=2,orient=R");
        let rep = crate::rep::Representation::<Rat>::zero_maps(gamma.quiver.clone(), vec![0, 0]);
        let empty = CoefficientQuiver::of_representation(&rep, &[vec![], vec![]]).unwrap();
        let f = f_from_cells(&empty).unwrap();
        assert_eq!(f.eval_ones(), 1);
        assert_eq!(f.coeff(&DimVector(vec![0, 0])), 1);
    }

    #[test]
    fn homogeneous_recurrence_small_cases() {
        // Work over the Kronecker quiver: delta = (1,1).
        let q = Quiver::kronecker();
        let delta = crate::dim::delta(&q).unwrap();
        // F_delta for a regular Kronecker representation: 1 + x_2 + x_1 x_2.
        let f_delta = MultiPoly::one(2)
            .add(&MultiPoly::monomial(DimVector(vec![0, 1]), 1))
            .add(&MultiPoly::monomial(DimVector(vec![1, 1]), 1));
        assert_eq!(f_homogeneous_tube(&f_delta, &delta, 0), MultiPoly::one(2));
        assert_eq!(f_homogeneous_tube(&f_delta, &delta, 1), f_delta);
        let f2 = f_homogeneous_tube(&f_delta, &delta, 2);
        let expect = f_delta.mul(&f_delta).sub(&MultiPoly::one(2).shift(&delta));
        assert_eq!(f2, expect);
    }

    #[test]
    fn direct_sum_of_two_simples() {
        // Two copies of the A_1 simple: F = (1 + x)^2.
        let f = MultiPoly::one(1).add(&MultiPoly::monomial(DimVector(vec![1]), 1));
        let sum = f_direct_sum(&f, &f);
        assert_eq!(sum.coeff(&DimVector(vec![0])), 1);
        assert_eq!(sum.coeff(&DimVector(vec![1])), 2);
        assert_eq!(sum.coeff(&DimVector(vec![2])), 1);
        // F x 1 = F.
        assert_eq!(f_direct_sum(&f, &MultiPoly::one(1)), f);
    }

    #[test]
    fn defect_minus_two_formula_shape() {
        let one = MultiPoly::one(2);
        let x = MultiPoly::monomial(DimVector(vec![1, 0]), 1);
        let f_n = one.add(&x);
        let f_m = one.add(&x.mul(&x));
        let tau = DimVector(vec![0, 1]);
        // Zero quotient polynomial: plain product.
        assert_eq!(
            f_defect_minus_two(&f_n, &f_m, &MultiPoly::zero(), &tau),
            f_n.mul(&f_m)
        );
        let f_quot = one.clone();
        let full = f_defect_minus_two(&f_n, &f_m, &f_quot, &tau);
        assert_eq!(
            full.eval_ones(),
            f_n.eval_ones() * f_m.eval_ones() - f_quot.eval_ones()
        );
    }

    #[test]
    fn kronecker_cluster_variable() {
        // Preprojective of dimension (1,2): F = 1 + 2 x_2 + x_2^2 + x_1 x_2^2.
        let gamma = fam("kronecker:m=1");
        let f = f_from_cells(&gamma).unwrap();
        assert_eq!(f.to_text(&gamma.quiver), "1 + 2*x_2 + x_2^2 + x_1*x_2^2");
        let x = cluster_variable(&f, &gamma.dim_vector(), &gamma.quiver);
        // Denominator exponents are the dimension vector (1, 2).
        let min_exp: Vec<i64> = (0..2)
            .map(|v| x.terms().map(|(e, _)| e[v]).min().unwrap())
            .collect();
        assert_eq!(min_exp, vec![-1, -2]);
        assert_eq!(x.eval_ones(), f.eval_ones());
        // M = 0 has cluster variable 1.
        let x0 = cluster_variable(&MultiPoly::one(2), &DimVector(vec![0, 0]), &gamma.quiver);
        assert_eq!(x0, MultiPoly::one(2));
    }
}
