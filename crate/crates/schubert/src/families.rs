//! Parametric constructors for the coefficient-quiver families of extended
//! Dynkin type `D~n` (defect -1 preprojectives, the exceptional tubes of
//! rank n-2 and 2, homogeneous quasi-simples), Kronecker preprojectives and
//! Dynkin type A/D representations, together with their validity conditions
//! and per-family closed forms for second-kind contradictory subsets.

use crate::dim::{defect, DimVector};
use crate::quiver::{DTildeOrientation, Dir, Quiver, Shape, VertexId};
use crate::rep::{CoefficientQuiver, GammaArrow};
use crate::scalar::{Field, Rat};
use crate::state::BasisSubset;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Indecomposable preprojectives of defect -1; `r` is the number of
    /// non-extremal arrows of the coefficient quiver (the winding count) and
    /// `i_max` the largest basis vertex over the central chain.
    DefectMinusOne {
        n: usize,
        r: usize,
        orient: DTildeOrientation,
        i_max: Option<u32>,
    },
    /// Regular representations in the exceptional tube of rank n-2.
    TubeRankNMinus2 {
        n: usize,
        r: usize,
        orient: DTildeOrientation,
        i_min: u32,
        i_max: Option<u32>,
    },
    /// Regular representations in an exceptional tube of rank 2.
    TubeRank2 {
        n: usize,
        r: usize,
        orient: DTildeOrientation,
    },
    /// Schurian quasi-simples of dimension delta in a homogeneous tube,
    /// parametrized by the weight class [mu0 : mu1].
    Homogeneous {
        n: usize,
        orient: DTildeOrientation,
        mu0: Rat,
        mu1: Rat,
    },
    /// Kronecker preprojectives of dimension (m, m+1).
    KroneckerPreprojective { m: usize },
    /// Thin interval representations of Dynkin type A.
    DynkinA {
        n: usize,
        orient: Vec<Dir>,
        lo: usize,
        hi: usize,
    },
    /// The non-thin Dynkin D representations: dimension 2 on q_0..q_r and 1
    /// on q_{r+1}..q_s and the arms; the arm a attaches to the upper or
    /// lower chain copy.
    DynkinD {
        n: usize,
        a_dir: Dir,
        b_dir: Dir,
        chain: Vec<Dir>,
        r: usize,
        s: usize,
        attach_upper: bool,
    },
    /// The worked 5-vertex example over the three-arm star quiver.
    D4Example,
    /// The worked 7-vertex example over equioriented A_3.
    A3Extremal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
}

impl FamilySpec {
    /// Parses a CLI-facing spec string such as
    /// `defect-1:n=6,r=3,orient=RRRRRR` or `homog:n=4,mu0=1,mu1=2,orient=RRRR`.
    pub fn parse(s: &str) -> Result<FamilySpec> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&String> {
            kv.get(k)
                .ok_or_else(|| Error::Parse(format!("missing parameter '{k}' in '{s}'")))
        };
        let get_usize = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|_| Error::Parse(format!("invalid integer for '{k}'")))
        };
        let opt_u32 = |k: &str| -> Result<Option<u32>> {
            match kv.get(k) {
                None => Ok(None),
                Some(v) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Parse(format!("invalid integer for '{k}'"))),
            }
        };
        let family = match head {
            "defect-1" => {
                let n = get_usize("n")?;
                Family::DefectMinusOne {
                    n,
                    r: get_usize("r")?,
                    orient: DTildeOrientation::parse(get("orient")?, n)?,
                    i_max: opt_u32("imax")?,
                }
            }
            "tube-n-2" | "tube-rank-n-2" => {
                let n = get_usize("n")?;
                Family::TubeRankNMinus2 {
                    n,
                    r: get_usize("r")?,
                    orient: DTildeOrientation::parse(get("orient")?, n)?,
                    i_min: opt_u32("imin")?.unwrap_or(4),
                    i_max: opt_u32("imax")?,
                }
            }
            "tube-2" | "tube-rank-2" => {
                let n = get_usize("n")?;
                Family::TubeRank2 {
                    n,
                    r: get_usize("r")?,
                    orient: DTildeOrientation::parse(get("orient")?, n)?,
                }
            }
            "homog" | "homogeneous" | "homogeneous-schurian" => {
                let n = get_usize("n")?;
                Family::Homogeneous {
                    n,
                    orient: DTildeOrientation::parse(get("orient")?, n)?,
                    mu0: kv.get("mu0").map_or(Ok(Rat::int(1)), |v| v.parse())?,
                    mu1: kv.get("mu1").map_or(Ok(Rat::int(2)), |v| v.parse())?,
                }
            }
            "kronecker" | "kronecker-preprojective" => Family::KroneckerPreprojective {
                m: get_usize("m").or_else(|_| get_usize("n"))?,
            },
            "dynkin-a" => {
                let n = get_usize("n")?;
                let orient = parse_dirs(get("orient")?, n - 1)?;
                Family::DynkinA {
                    n,
                    orient,
                    lo: kv.get("lo").map_or(Ok(1), |v| {
                        v.parse().map_err(|_| Error::Parse("invalid lo".into()))
                    })?,
                    hi: kv.get("hi").map_or(Ok(n), |v| {
                        v.parse().map_err(|_| Error::Parse("invalid hi".into()))
                    })?,
                }
            }
            "dynkin-d" => {
                let n = get_usize("n")?;
                let dirs = parse_dirs(get("orient")?, n - 1)?;
                Family::DynkinD {
                    n,
                    a_dir: dirs[0],
                    b_dir: dirs[1],
                    chain: dirs[2..].to_vec(),
                    r: get_usize("r")?,
                    s: get_usize("s")?,
                    attach_upper: kv.get("attach").map(String::as_str).unwrap_or("i") == "i",
                }
            }
            "d4-example" => Family::D4Example,
            "a3-extremal" => Family::A3Extremal,
            other => return Err(Error::Parse(format!("unknown family '{other}'"))),
        };
        Ok(FamilySpec { family })
    }
}

fn parse_dirs(s: &str, expect: usize) -> Result<Vec<Dir>> {
    let dirs: Vec<Dir> = s
        .chars()
        .map(|c| match c {
            'R' | 'r' => Ok(Dir::R),
            'L' | 'l' => Ok(Dir::L),
            other => Err(Error::Parse(format!("invalid direction '{other}'"))),
        })
        .collect::<Result<_>>()?;
    if dirs.len() != expect {
        return Err(Error::Parse(format!(
            "orientation needs {expect} letters, got {}",
            dirs.len()
        )));
    }
    Ok(dirs)
}

/// Builder state for coefficient quivers over a fixed base quiver.
struct GammaBuilder {
    quiver: Quiver,
    verts: Vec<(u32, VertexId)>,
    arrows: Vec<(String, u32, u32, Rat)>,
}

impl GammaBuilder {
    fn new(quiver: Quiver) -> Self {
        GammaBuilder {
            quiver,
            verts: Vec::new(),
            arrows: Vec::new(),
        }
    }

    fn vert(&mut self, id: u32, label: &str) {
        let v = self.quiver.vertex(label).expect("builder vertex");
        self.verts.push((id, v));
    }

    fn arrow(&mut self, label: &str, src: u32, tgt: u32) {
        self.arrows.push((label.to_string(), src, tgt, Rat::int(1)));
    }

    fn weighted(&mut self, label: &str, src: u32, tgt: u32, w: Rat) {
        self.arrows.push((label.to_string(), src, tgt, w));
    }

    /// Adds an arrow between two basis vertices following the direction of
    /// the base arrow.
    fn follow(&mut self, label: &str, at_src_vertex: u32, at_tgt_vertex: u32) {
        self.arrow(label, at_src_vertex, at_tgt_vertex);
    }

    fn finish(self) -> Result<CoefficientQuiver<Rat>> {
        let arrows = self
            .arrows
            .into_iter()
            .map(|(label, src, tgt, weight)| {
                let arrow = self
                    .quiver
                    .arrow_by_label(&label)
                    .ok_or_else(|| Error::InvalidFamily(format!("no arrow '{label}'")))?;
                Ok(GammaArrow {
                    arrow,
                    src,
                    tgt,
                    weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientQuiver::new(self.quiver, self.verts, arrows)
    }
}

/// Chain label under a D~n quiver: position x in 0..=n-4 maps to the vertex
/// labelled `x`.
fn chain_label(x: usize) -> String {
    x.to_string()
}

/// Base position of the chain vertex `kn+4+x` in row `k` of the snake:
/// even rows ascend from q_0, odd rows ascend from q_{n-4}.
fn snake_pos(n: usize, k: usize, x: usize) -> usize {
    if k.is_multiple_of(2) {
        x
    } else {
        n - 4 - x
    }
}

struct SnakeParams {
    n: usize,
    r: usize,
    orient: DTildeOrientation,
    /// Smallest chain vertex of row 0 (4 for defect -1).
    i_min: u32,
    /// Largest chain vertex of row r.
    i_max: u32,
    /// Whether the row-0 start follows the tube (min) rule instead of the
    /// defect -1 rule.
    tube_start: bool,
}

/// The common snake shape shared by the defect -1 family and the tube of
/// rank n-2: alternating chain rows joined by q_c/q_b vertices.
fn build_snake(p: &SnakeParams) -> Result<CoefficientQuiver<Rat>> {
    let n = p.n;
    let nn = n as u32;
    let q = Quiver::dtilde(n, &p.orient);
    let mut b = GammaBuilder::new(q);
    let chain_dir = |x: usize| {
        if n == 4 {
            Dir::R
        } else {
            p.orient.chain[x]
        }
    };
    if p.i_min < 4
        || p.i_min > nn
        || p.i_max < p.r as u32 * nn + 4
        || p.i_max > (p.r as u32 + 1) * nn
    {
        return Err(Error::InvalidFamily(format!(
            "need 4 <= i_min <= n and rn+4 <= i_max <= (r+1)n, got i_min={}, i_max={}",
            p.i_min, p.i_max
        )));
    }
    // Chain rows.
    for k in 0..=p.r {
        let row_lo = if k == 0 { p.i_min } else { k as u32 * nn + 4 };
        let row_hi = if k == p.r {
            p.i_max
        } else {
            (k as u32 + 1) * nn
        };
        for id in row_lo..=row_hi {
            let x = (id - (k as u32 * nn + 4)) as usize;
            b.vert(id, &chain_label(snake_pos(n, k, x)));
        }
        // Arrows between consecutive chain vertices.
        for id in row_lo..row_hi {
            let x = (id - (k as u32 * nn + 4)) as usize;
            let (lo_pos, hi_pos) = (snake_pos(n, k, x), snake_pos(n, k, x + 1));
            let v_idx = lo_pos.min(hi_pos);
            let label = format!("v{v_idx}");
            // Dir::R points from q_{v_idx} towards q_{v_idx + 1}.
            let (from, to) = if (chain_dir(v_idx) == Dir::R) == (lo_pos < hi_pos) {
                (id, id + 1)
            } else {
                (id + 1, id)
            };
            b.follow(&label, from, to);
        }
    }
    // Joints between consecutive rows: q_c after odd-indexed boundaries,
    // q_b after even ones.
    for k in 1..=p.r {
        let j = k as u32 * nn + 2;
        let lower = k as u32 * nn;
        let upper = k as u32 * nn + 4;
        if k % 2 == 1 {
            b.vert(j, "c");
            // c: Dir::R points away from the chain.
            if p.orient.c == Dir::R {
                b.arrow("c", lower, j);
                b.arrow("c", upper, j);
            } else {
                b.arrow("c", j, lower);
                b.arrow("c", j, upper);
            }
        } else {
            b.vert(j, "b");
            // b: Dir::R points towards the chain.
            if p.orient.b == Dir::R {
                b.arrow("b", j, lower);
                b.arrow("b", j, upper);
            } else {
                b.arrow("b", lower, j);
                b.arrow("b", upper, j);
            }
        }
    }
    // Row-0 start.
    if p.tube_start {
        if p.i_min == 4 {
            if p.orient.a == Dir::R {
                b.vert(3, "a");
                b.arrow("a", 3, 4);
            }
            if p.orient.b == Dir::R {
                b.vert(2, "b");
                b.arrow("b", 2, 4);
            }
        } else {
            // (min) at a mid-chain start: the chain arrow on the left must
            // point away from the start.
            let x0 = (p.i_min - 4) as usize;
            if chain_dir(x0 - 1) == Dir::R {
                return Err(Error::InvalidFamily(format!(
                    "i_min={} needs v{} oriented away from q_{}",
                    p.i_min,
                    x0 - 1,
                    x0
                )));
            }
        }
    } else {
        if p.orient.a == Dir::R {
            b.vert(3, "a");
            b.arrow("a", 3, 4);
        }
        if p.orient.b == Dir::L {
            b.vert(2, "b");
            b.arrow("b", 4, 2);
        }
    }
    // Start arms of the rows k >= 1.
    for k in 1..=p.r {
        let id = k as u32 * nn + 3;
        let start = k as u32 * nn + 4;
        if k % 2 == 0 {
            if p.orient.a == Dir::R {
                b.vert(id, "a");
                b.arrow("a", id, start);
            }
        } else if p.orient.d == Dir::L {
            b.vert(id, "d");
            b.arrow("d", id, start);
        }
    }
    // End arms of the complete rows k < r.
    for k in 0..p.r {
        let end = (k as u32 + 1) * nn;
        let id = end + 1;
        if k % 2 == 0 {
            if p.orient.d == Dir::R {
                b.vert(id, "d");
                b.arrow("d", end, id);
            }
        } else if p.orient.a == Dir::L {
            b.vert(id, "a");
            b.arrow("a", end, id);
        }
    }
    // End of row r.
    let full_end = (p.r as u32 + 1) * nn;
    if p.i_max == full_end {
        let id1 = full_end + 1;
        let id2 = full_end + 2;
        if p.r.is_multiple_of(2) {
            if p.orient.d == Dir::R {
                b.vert(id1, "d");
                b.arrow("d", full_end, id1);
            }
            if p.orient.c == Dir::R {
                b.vert(id2, "c");
                b.arrow("c", full_end, id2);
            }
        } else {
            if p.orient.a == Dir::L {
                b.vert(id1, "a");
                b.arrow("a", full_end, id1);
            }
            if p.orient.b == Dir::L {
                b.vert(id2, "b");
                b.arrow("b", full_end, id2);
            }
        }
    } else {
        // (max) at a mid-chain end: the next chain arrow must point towards
        // the end vertex.
        let x_max = (p.i_max - (p.r as u32 * nn + 4)) as usize;
        let here = snake_pos(n, p.r, x_max);
        let next = snake_pos(n, p.r, x_max + 1);
        let v_idx = here.min(next);
        let towards_here = (chain_dir(v_idx) == Dir::R) == (next < here);
        if !towards_here {
            return Err(Error::InvalidFamily(format!(
                "i_max={} needs v{} oriented towards q_{}",
                p.i_max, v_idx, here
            )));
        }
        // Truncating right at the row start also exposes the free arm of the
        // start vertex, which then must point towards the chain.
        if x_max == 0 {
            let ok = if p.r.is_multiple_of(2) {
                p.orient.a == Dir::R
            } else {
                p.orient.d == Dir::L
            };
            if !ok {
                return Err(Error::InvalidFamily(format!(
                    "i_max={} needs the free arm at the row start to point towards the chain",
                    p.i_max
                )));
            }
        }
    }
    b.finish()
}

/// Smallest valid largest-chain-vertex for row r, given the orientation.
fn default_i_max(
    n: usize,
    r: usize,
    orient: &DTildeOrientation,
    i_min: u32,
    tube: bool,
) -> Result<u32> {
    let nn = n as u32;
    for i_max in (r as u32 * nn + 4)..=((r as u32 + 1) * nn) {
        let p = SnakeParams {
            n,
            r,
            orient: orient.clone(),
            i_min,
            i_max,
            tube_start: tube,
        };
        if build_snake(&p).is_ok() {
            return Ok(i_max);
        }
    }
    Err(Error::InvalidFamily(
        "no valid i_max for this orientation".into(),
    ))
}

fn build_defect_minus_one(
    n: usize,
    r: usize,
    orient: &DTildeOrientation,
    i_max: Option<u32>,
) -> Result<CoefficientQuiver<Rat>> {
    if n < 4 {
        return Err(Error::InvalidFamily("need n >= 4".into()));
    }
    let i_max = match i_max {
        Some(v) => v,
        None => default_i_max(n, r, orient, 4, false)?,
    };
    build_snake(&SnakeParams {
        n,
        r,
        orient: orient.clone(),
        i_min: 4,
        i_max,
        tube_start: false,
    })
}

fn build_tube_rank_n_minus_2(
    n: usize,
    r: usize,
    orient: &DTildeOrientation,
    i_min: u32,
    i_max: Option<u32>,
) -> Result<CoefficientQuiver<Rat>> {
    if n < 4 {
        return Err(Error::InvalidFamily("need n >= 4".into()));
    }
    let i_max = match i_max {
        Some(v) => v,
        None => default_i_max(n, r, orient, i_min, true)?,
    };
    build_snake(&SnakeParams {
        n,
        r,
        orient: orient.clone(),
        i_min,
        i_max,
        tube_start: true,
    })
}

fn build_tube_rank_2(
    n: usize,
    r: usize,
    orient: &DTildeOrientation,
) -> Result<CoefficientQuiver<Rat>> {
    if n < 4 {
        return Err(Error::InvalidFamily("need n >= 4".into()));
    }
    let nn = n as u32;
    let q = Quiver::dtilde(n, orient);
    let mut b = GammaBuilder::new(q);
    // All rows ascend from q_0 to q_{n-4}.
    for k in 0..=r {
        let base = k as u32 * nn + 4;
        for x in 0..=(n - 4) {
            b.vert(base + x as u32, &chain_label(x));
        }
        for x in 0..(n - 4) {
            let u = base + x as u32;
            let (from, to) = if orient.chain[x] == Dir::R {
                (u, u + 1)
            } else {
                (u + 1, u)
            };
            b.follow(&format!("v{x}"), from, to);
        }
    }
    // Joints on the q_{n-4} side: kn+2 joins kn and (k+1)n; q_c for odd k,
    // q_d for even k. The boundary joints k = 0 and k = r+1 are one-sided
    // and conditional on the arm orientation.
    for k in 1..=r {
        let j = k as u32 * nn + 2;
        let lower = k as u32 * nn;
        let upper = (k as u32 + 1) * nn;
        let (label, dir) = if k % 2 == 1 {
            ("c", orient.c)
        } else {
            ("d", orient.d)
        };
        b.vert(j, label);
        if dir == Dir::R {
            b.arrow(label, lower, j);
            b.arrow(label, upper, j);
        } else {
            b.arrow(label, j, lower);
            b.arrow(label, j, upper);
        }
    }
    // k = 0 boundary: vertex 2 over the q_d side, present iff d points
    // towards the chain.
    if orient.d == Dir::L {
        b.vert(2, "d");
        b.arrow("d", 2, nn);
    }
    // k = r+1 boundary: present iff the arm points away from the chain.
    {
        let j = (r as u32 + 1) * nn + 2;
        let end = (r as u32 + 1) * nn;
        let (label, dir) = if (r + 1) % 2 == 1 {
            ("c", orient.c)
        } else {
            ("d", orient.d)
        };
        if dir == Dir::R {
            b.vert(j, label);
            b.arrow(label, end, j);
        }
    }
    // Arm vertices per row.
    for k in 0..=r {
        let start = k as u32 * nn + 4;
        let lo_id = k as u32 * nn + 3;
        let hi_id = (k as u32 + 1) * nn + 1;
        if k % 2 == 0 {
            if orient.a == Dir::R {
                b.vert(lo_id, "a");
                b.arrow("a", lo_id, start);
            }
            if orient.b == Dir::L {
                b.vert(hi_id, "b");
                b.arrow("b", start, hi_id);
            }
        } else {
            if orient.b == Dir::R {
                b.vert(lo_id, "b");
                b.arrow("b", lo_id, start);
            }
            if orient.a == Dir::L {
                b.vert(hi_id, "a");
                b.arrow("a", start, hi_id);
            }
        }
    }
    b.finish()
}

fn build_homogeneous(
    n: usize,
    orient: &DTildeOrientation,
    mu0: &Rat,
    mu1: &Rat,
) -> Result<CoefficientQuiver<Rat>> {
    if n < 4 {
        return Err(Error::InvalidFamily("need n >= 4".into()));
    }
    if mu0.is_zero() || mu1.is_zero() {
        return Err(Error::InvalidFamily(
            "homogeneous weights must be nonzero".into(),
        ));
    }
    // q_b is a source iff b points towards the chain; q_c is a source iff c
    // points away from the chain towards q_c... (c: R moves q_{n-4} -> q_c,
    // so q_c is then a sink).
    let qb_source = orient.b == Dir::R;
    let qc_source = orient.c == Dir::L;
    if qb_source == qc_source {
        if mu0 == mu1 {
            return Err(Error::InvalidFamily(
                "need mu0 != mu1 when q_b and q_c are both sources or both sinks".into(),
            ));
        }
    } else if *mu0 == mu1.neg() {
        return Err(Error::InvalidFamily(
            "need mu0 != -mu1 when one of q_b, q_c is a source and the other a sink".into(),
        ));
    }
    let nn = n as u32;
    let q = Quiver::dtilde(n, orient);
    let mut b = GammaBuilder::new(q);
    // Row 0: 2..n-2 ascending over q_0..q_{n-4}.
    for x in 0..=(n - 4) {
        b.vert(2 + x as u32, &chain_label(x));
    }
    for x in 0..(n - 4) {
        let u = 2 + x as u32;
        let (from, to) = if orient.chain[x] == Dir::R {
            (u, u + 1)
        } else {
            (u + 1, u)
        };
        b.follow(&format!("v{x}"), from, to);
    }
    // Row 1: n+4..2n descending over q_{n-4}..q_0.
    for x in 0..=(n - 4) {
        b.vert(nn + 4 + x as u32, &chain_label(n - 4 - x));
    }
    for x in 0..(n - 4) {
        let u = nn + 4 + x as u32; // over q_{n-4-x}
        let v_idx = n - 5 - x;
        let (from, to) = if orient.chain[v_idx] == Dir::R {
            (u + 1, u)
        } else {
            (u, u + 1)
        };
        b.follow(&format!("v{v_idx}"), from, to);
    }
    // q_b vertex n joins the two q_0 ends (2 and 2n).
    b.vert(nn, "b");
    if orient.b == Dir::R {
        b.arrow("b", nn, 2);
        b.arrow("b", nn, 2 * nn);
    } else {
        b.arrow("b", 2, nn);
        b.arrow("b", 2 * nn, nn);
    }
    // q_c vertex n+2 joins the two q_{n-4} ends (n-2 and n+4), carrying the
    // weights mu0 and mu1.
    b.vert(nn + 2, "c");
    if orient.c == Dir::R {
        b.weighted("c", nn - 2, nn + 2, mu0.clone());
        b.weighted("c", nn + 4, nn + 2, mu1.clone());
    } else {
        b.weighted("c", nn + 2, nn - 2, mu0.clone());
        b.weighted("c", nn + 2, nn + 4, mu1.clone());
    }
    // Dashed arm vertices: exactly one of each pair exists per orientation.
    if orient.a == Dir::R {
        b.vert(1, "a");
        b.arrow("a", 1, 2);
    } else {
        b.vert(2 * nn + 1, "a");
        b.arrow("a", 2 * nn, 2 * nn + 1);
    }
    if orient.d == Dir::R {
        b.vert(nn - 1, "d");
        b.arrow("d", nn - 2, nn - 1);
    } else {
        b.vert(nn + 3, "d");
        b.arrow("d", nn + 3, nn + 4);
    }
    b.finish()
}

fn build_kronecker(m: usize) -> Result<CoefficientQuiver<Rat>> {
    if m == 0 {
        return Err(Error::InvalidFamily("need m >= 1".into()));
    }
    let q = Quiver::kronecker();
    let mut b = GammaBuilder::new(q);
    for id in 1..=(2 * m + 1) as u32 {
        b.vert(id, if id % 2 == 0 { "1" } else { "2" });
    }
    for k in 1..=m as u32 {
        b.arrow("a", 2 * k, 2 * k - 1);
        b.arrow("b", 2 * k, 2 * k + 1);
    }
    b.finish()
}

fn build_dynkin_a(
    n: usize,
    orient: &[Dir],
    lo: usize,
    hi: usize,
) -> Result<CoefficientQuiver<Rat>> {
    if lo < 1 || hi > n || lo > hi {
        return Err(Error::InvalidFamily("need 1 <= lo <= hi <= n".into()));
    }
    let q = Quiver::dynkin_a(n, orient);
    let mut b = GammaBuilder::new(q);
    for (k, v) in (lo..=hi).enumerate() {
        b.vert(k as u32 + 1, &v.to_string());
    }
    for (k, v) in (lo..hi).enumerate() {
        let label = ((b'a' + (v - 1) as u8) as char).to_string();
        let (from, to) = if orient[v - 1] == Dir::R {
            (k as u32 + 1, k as u32 + 2)
        } else {
            (k as u32 + 2, k as u32 + 1)
        };
        b.follow(&label, from, to);
    }
    b.finish()
}

fn build_dynkin_d(
    n: usize,
    a_dir: Dir,
    b_dir: Dir,
    chain: &[Dir],
    r: usize,
    s: usize,
    attach_upper: bool,
) -> Result<CoefficientQuiver<Rat>> {
    if s > n - 3 || r > s {
        return Err(Error::InvalidFamily("need r <= s <= n-3".into()));
    }
    let q = Quiver::dynkin_d(n, a_dir, b_dir, chain);
    let mut b = GammaBuilder::new(q);
    // l = 1 over q_a, k = 2 over q_b, upper chain copy i_0..i_r = 3..3+r,
    // lower copy j_0..j_s = 4+r..4+r+s; i_e < j_e throughout.
    b.vert(1, "a");
    b.vert(2, "b");
    for e in 0..=r {
        b.vert(3 + e as u32, &e.to_string());
    }
    for e in 0..=s {
        b.vert(4 + r as u32 + e as u32, &e.to_string());
    }
    let i0 = 3u32;
    let j0 = 4 + r as u32;
    let a_end = if attach_upper { i0 } else { j0 };
    if a_dir == Dir::R {
        b.arrow("a", 1, a_end);
    } else {
        b.arrow("a", a_end, 1);
    }
    if b_dir == Dir::R {
        b.arrow("b", 2, i0);
        b.arrow("b", 2, j0);
    } else {
        b.arrow("b", i0, 2);
        b.arrow("b", j0, 2);
    }
    for (rail_start, len) in [(i0, r), (j0, s)] {
        for (e, dir) in chain.iter().enumerate().take(len) {
            let u = rail_start + e as u32;
            let (from, to) = if *dir == Dir::R {
                (u, u + 1)
            } else {
                (u + 1, u)
            };
            b.follow(&format!("v{e}"), from, to);
        }
    }
    b.finish()
}

fn build_d4_example() -> Result<CoefficientQuiver<Rat>> {
    let q = Quiver::new(
        vec![
            "a".to_string(),
            "b".to_string(),
            "0".to_string(),
            "c".to_string(),
        ],
        vec![
            crate::quiver::Arrow {
                label: "a".into(),
                src: 0,
                tgt: 2,
            },
            crate::quiver::Arrow {
                label: "b".into(),
                src: 1,
                tgt: 2,
            },
            crate::quiver::Arrow {
                label: "c".into(),
                src: 3,
                tgt: 2,
            },
        ],
        Shape::Other,
    );
    let mut b = GammaBuilder::new(q);
    b.vert(1, "a");
    b.vert(2, "0");
    b.vert(3, "c");
    b.vert(4, "0");
    b.vert(5, "b");
    b.arrow("a", 1, 2);
    b.arrow("c", 3, 2);
    b.arrow("c", 3, 4);
    b.arrow("b", 5, 4);
    b.finish()
}

fn build_a3_extremal() -> Result<CoefficientQuiver<Rat>> {
    let q = Quiver::dynkin_a(3, &[Dir::R, Dir::R]);
    let mut b = GammaBuilder::new(q);
    b.vert(5, "1");
    for id in [1u32, 3, 6] {
        b.vert(id, "2");
    }
    for id in [2u32, 4, 7] {
        b.vert(id, "3");
    }
    b.arrow("a", 5, 3);
    b.arrow("a", 5, 6);
    b.arrow("b", 1, 2);
    b.arrow("b", 3, 4);
    b.arrow("b", 6, 7);
    b.finish()
}

/// Builds the coefficient quiver of a family member.
pub fn build_family(spec: &FamilySpec) -> Result<CoefficientQuiver<Rat>> {
    match &spec.family {
        Family::DefectMinusOne {
            n,
            r,
            orient,
            i_max,
        } => build_defect_minus_one(*n, *r, orient, *i_max),
        Family::TubeRankNMinus2 {
            n,
            r,
            orient,
            i_min,
            i_max,
        } => build_tube_rank_n_minus_2(*n, *r, orient, *i_min, *i_max),
        Family::TubeRank2 { n, r, orient } => build_tube_rank_2(*n, *r, orient),
        Family::Homogeneous {
            n,
            orient,
            mu0,
            mu1,
        } => build_homogeneous(*n, orient, mu0, mu1),
        Family::KroneckerPreprojective { m } => build_kronecker(*m),
        Family::DynkinA { n, orient, lo, hi } => build_dynkin_a(*n, orient, *lo, *hi),
        Family::DynkinD {
            n,
            a_dir,
            b_dir,
            chain,
            r,
            s,
            attach_upper,
        } => build_dynkin_d(*n, *a_dir, *b_dir, chain, *r, *s, *attach_upper),
        Family::D4Example => build_d4_example(),
        Family::A3Extremal => build_a3_extremal(),
    }
}

/// Checks the family-specific conditions on a coefficient quiver; an empty
/// report means the instance is valid.
pub fn validate_family(gamma: &CoefficientQuiver<Rat>, spec: &FamilySpec) -> Vec<String> {
    let mut out = Vec::new();
    let q = &gamma.quiver;
    match &spec.family {
        Family::DefectMinusOne { r, .. } => {
            if defect(q, &gamma.dim_vector()).ok() != Some(-1) {
                out.push("defect is not -1".to_string());
            }
            check_boundary(gamma, Boundary::Max, *r, &mut out);
        }
        Family::TubeRankNMinus2 { r, .. } => {
            if defect(q, &gamma.dim_vector()).ok() != Some(0) {
                out.push("defect is not 0".to_string());
            }
            check_boundary(gamma, Boundary::Max, *r, &mut out);
            check_boundary(gamma, Boundary::Min, *r, &mut out);
        }
        Family::TubeRank2 { .. } => {
            if defect(q, &gamma.dim_vector()).ok() != Some(0) {
                out.push("defect is not 0".to_string());
            }
        }
        Family::Homogeneous {
            mu0, mu1, orient, ..
        } => {
            if defect(q, &gamma.dim_vector()).ok() != Some(0) {
                out.push("defect is not 0".to_string());
            }
            if gamma.dim_vector() != crate::dim::delta(q).unwrap() {
                out.push("dimension vector is not delta".to_string());
            }
            let qb_source = orient.b == Dir::R;
            let qc_source = orient.c == Dir::L;
            let ok = if qb_source == qc_source {
                mu0 != mu1
            } else {
                *mu0 != mu1.neg()
            };
            if !ok {
                out.push("weight-constraint".to_string());
            }
            // Exactly one undirected cycle: |arrows| = |vertices|.
            if gamma.arrows().len() != gamma.vertex_count() {
                out.push("expected exactly one cycle".to_string());
            }
        }
        _ => {}
    }
    out
}

enum Boundary {
    Min,
    Max,
}

/// The (min)/(max) property at the extreme chain vertex: an adjacent base
/// arrow has a preimage there iff the preimage also connects to a vertex on
/// the admissible side, or the arrow points in the admissible direction.
/// The arm pair under test is determined by the direction of travel of the
/// extreme row: the first row starts on the a/b side, and row r ends on the
/// c/d side exactly when r is even. (For n >= 5 this matches the arms
/// adjacent to the base vertex; for n = 4 all four arms share it.)
fn check_boundary(
    gamma: &CoefficientQuiver<Rat>,
    which: Boundary,
    r: usize,
    out: &mut Vec<String>,
) {
    let q = &gamma.quiver;
    let Ok(n) = q.dtilde_n() else {
        return;
    };
    let arm_pair: [&str; 2] = match which {
        Boundary::Min => ["a", "b"],
        Boundary::Max => {
            if r.is_multiple_of(2) {
                ["c", "d"]
            } else {
                ["a", "b"]
            }
        }
    };
    let chain: Vec<VertexId> = (0..=(n - 4))
        .map(|x| q.vertex(&x.to_string()).unwrap())
        .collect();
    let chain_ids: Vec<u32> = gamma
        .vertex_ids()
        .filter(|&id| chain.contains(&gamma.over(id)))
        .collect();
    let Some(&i) = (match which {
        Boundary::Min => chain_ids.iter().min_by_key(|&&x| x),
        Boundary::Max => chain_ids.iter().max_by_key(|&&x| x),
    }) else {
        return;
    };
    let fi = gamma.over(i);
    for (aid, arr) in q.arrows().iter().enumerate() {
        if arr.src != fi && arr.tgt != fi {
            continue;
        }
        let is_arm = ["a", "b", "c", "d"].contains(&arr.label.as_str());
        if is_arm && !arm_pair.contains(&arr.label.as_str()) {
            continue;
        }
        let incident: Vec<&GammaArrow<Rat>> = gamma
            .arrows()
            .iter()
            .filter(|ga| ga.arrow == aid && (ga.src == i || ga.tgt == i))
            .collect();
        let has = !incident.is_empty();
        let side_ok = incident.iter().any(|ga| {
            let other = if ga.src == i { ga.tgt } else { ga.src };
            match which {
                Boundary::Min => other > i,
                Boundary::Max => other < i,
            }
        });
        let dir_ok = match which {
            // (min): the arrow points towards F(i).
            Boundary::Min => arr.tgt == fi,
            // (max): the arrow points away from F(i).
            Boundary::Max => arr.src == fi,
        };
        if has != (side_ok || dir_ok) {
            out.push(format!(
                "({}) violated at vertex {} for arrow {}",
                match which {
                    Boundary::Min => "min",
                    Boundary::Max => "max",
                },
                i,
                arr.label
            ));
        }
    }
}

/// Whether a basis vertex of the coefficient quiver is a source (all
/// incident arrows leave it).
fn is_gamma_source<F: Field>(gamma: &CoefficientQuiver<F>, id: u32) -> bool {
    let incident: Vec<_> = gamma
        .arrows()
        .iter()
        .filter(|ga| ga.src == id || ga.tgt == id)
        .collect();
    !incident.is_empty() && incident.iter().all(|ga| ga.src == id)
}

fn is_gamma_sink<F: Field>(gamma: &CoefficientQuiver<F>, id: u32) -> bool {
    let incident: Vec<_> = gamma
        .arrows()
        .iter()
        .filter(|ga| ga.src == id || ga.tgt == id)
        .collect();
    !incident.is_empty() && incident.iter().all(|ga| ga.tgt == id)
}

/// Joint-window test shared by the defect -1 and rank n-2 closed forms.
fn window_matches<F: Field>(
    gamma: &CoefficientQuiver<F>,
    beta: &BasisSubset,
    k: u32,
    n: u32,
) -> bool {
    let kn = k * n;
    let in_gamma = |id: u32| gamma.contains(id);
    if beta.contains(&kn) || !beta.contains(&(kn + 4)) {
        return false;
    }
    if in_gamma(kn + 1) && beta.contains(&(kn + 1)) {
        return false;
    }
    if in_gamma(kn + 3) && !beta.contains(&(kn + 3)) {
        return false;
    }
    if is_gamma_sink(gamma, kn + 2) && beta.contains(&(kn + 2)) {
        return false;
    }
    if is_gamma_source(gamma, kn + 2) && !beta.contains(&(kn + 2)) {
        return false;
    }
    true
}

/// The family-specific closed-form test for second-kind contradictory
/// subsets. For families without a closed form in terms of the numbering
/// (Dynkin types, Kronecker, the worked examples), this falls back to the
/// general pattern search.
pub fn second_kind_closed_form(
    spec: &FamilySpec,
    gamma: &CoefficientQuiver<Rat>,
    beta: &BasisSubset,
) -> bool {
    match &spec.family {
        Family::DefectMinusOne { n, r, .. } | Family::TubeRankNMinus2 { n, r, .. } => {
            let n = *n as u32;
            (1..=*r as u32).any(|k| window_matches(gamma, beta, k, n))
        }
        Family::TubeRank2 { n, r, .. } => {
            let n = *n as u32;
            (1..=*r as u32).any(|k| {
                let prev_row = ((k - 1) * n + 4)..=(k * n);
                let this_row = (k * n + 4)..=((k + 1) * n);
                prev_row.clone().all(|id| !beta.contains(&id))
                    && this_row.clone().all(|id| beta.contains(&id))
                    && window_matches(gamma, beta, k, n)
            })
        }
        Family::Homogeneous {
            n,
            orient,
            mu0,
            mu1,
            ..
        } => {
            let n = *n as u32;
            // The three contradictory subquiver patterns: the membership
            // conditions only bind the vertices of the pattern in question.
            let memb = |v: u32| beta.contains(&v) == is_gamma_source(gamma, v);
            let d_end = if orient.d == Dir::R { n - 1 } else { n + 3 };
            let rails_full = (2..=(n - 2)).all(|id| !beta.contains(&id))
                && ((n + 4)..=(2 * n)).all(|id| beta.contains(&id));
            let one_column = !beta.contains(&(n - 2)) && beta.contains(&(n + 4));
            // Ladder b .. d, avoiding the weighted arrows entirely.
            let bd = rails_full && memb(n) && memb(d_end);
            // Ladder b .. c: the weight test is the family validity
            // constraint on [mu0 : mu1].
            let qb_source = orient.b == Dir::R;
            let qc_source = orient.c == Dir::L;
            let weight_ok = if qb_source == qc_source {
                mu0 != mu1
            } else {
                *mu0 != mu1.neg()
            };
            let bc = rails_full && memb(n) && memb(n + 2) && weight_ok;
            // Ladder c .. d on the single right-hand column.
            let cd = one_column && memb(n + 2) && memb(d_end);
            bd || bc || cd
        }
        _ => crate::classify::second_kind_search(gamma, beta).is_some(),
    }
}

/// Dimension vector of a family member without building it (via the
/// coefficient quiver).
pub fn family_dim(spec: &FamilySpec) -> Result<DimVector> {
    Ok(build_family(spec)?.dim_vector())
}
