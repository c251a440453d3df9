//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Criteria:
//! 1. worked example equations reproduce exactly (canonical term order);
//! 2. worked example beta-states reproduce exactly;
//! 3. Kronecker preprojectives: states contradictory or solvable, counts
//!    match the subspace enumeration;
//! 4. main-theorem desk check on extended Dynkin families;
//! 5. Dynkin A/D indecomposables give affine pavings matching counts;
//! 6. patchwork machinery on the worked defect -1 instance and Kronecker;
//! 7. F-polynomial identities;
//! 8. property suites (step-order determinism, automorphism equivariance,
//!    multilinearity).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use schubert::classify::{classify_contradiction, ContradictionKind};
use schubert::dim::{delta, DimVector};
use schubert::families::{build_family, second_kind_closed_form, validate_family, FamilySpec};
use schubert::fpoly::{
    cluster_variable, f_direct_sum, f_dual, f_from_cells, f_homogeneous_tube, f_preprojective,
    MultiPoly,
};
use schubert::grass::{
    eval_poly, extremal_successor_closed_subsets, full_sweep, points_over_fq_all, type_of,
    Classification,
};
use schubert::patchwork::{
    as_extremal_path, assemble_solution, assembled_is_solution, build_patchwork_defect_minus_one,
    check_ps, contract_path, kronecker_patchwork, patchwork_check,
};
use schubert::quiver::{DiagramAut, Dir, Quiver};
use schubert::rep::{CoefficientQuiver, GammaArrow, Representation};
use schubert::scalar::Rat;
use schubert::solve::{find_extremal_solution, find_solution, SolveOutcome, SubSystem};
use schubert::state::{beta_state, beta_state_seeded, subset, BetaOutcome};
use schubert::system::{build_complete, build_reduced, degrees_are_multilinear, equation_text};

fn fam(s: &str) -> CoefficientQuiver<Rat> {
    build_family(&FamilySpec::parse(s).unwrap()).unwrap()
}

/// The A_2 representation with matrix [[mu, 1], [0, mu]].
fn a2_jordan(mu: i64) -> CoefficientQuiver<Rat> {
    let q = Quiver::dynkin_a(2, &[Dir::R]);
    let mut rep = Representation::zero_maps(q, vec![2, 2]);
    rep.mats[0][(0, 0)] = Rat::int(mu);
    rep.mats[0][(0, 1)] = Rat::int(1);
    rep.mats[0][(1, 1)] = Rat::int(mu);
    CoefficientQuiver::of_representation(&rep, &[vec![1, 3], vec![2, 4]]).unwrap()
}

#[test]
fn criterion_1_worked_example_equations() {
    let t0 = std::time::Instant::now();
    // Equioriented thin sincere A_3.
    let a3 = fam("dynkin-a:n=3,orient=RR");
    let complete = build_complete(&a3);
    assert_eq!(
        equation_text(&complete, "a", 2, 1).unwrap(),
        "w_{2,2}*w_{1,1} - w_{1,1}"
    );
    assert_eq!(
        equation_text(&complete, "b", 3, 2).unwrap(),
        "w_{3,3}*w_{2,2} - w_{2,2}"
    );

    // The five-vertex worked example over the three-arm star.
    let d4 = fam("d4-example");
    let sys = build_complete(&d4);
    let pairs: Vec<(u32, u32)> = sys.pairs.iter().map(|p| (p.i, p.j)).collect();
    assert_eq!(pairs, vec![(1, 1), (2, 2), (2, 4), (3, 3), (4, 4), (5, 5)]);
    let mut triples: Vec<String> = (0..sys.triples.len()).map(|t| sys.triple_name(t)).collect();
    triples.sort();
    assert_eq!(
        triples,
        vec!["(a,2,1)", "(b,2,5)", "(b,4,5)", "(c,2,3)", "(c,4,3)"]
    );
    assert_eq!(
        equation_text(&sys, "a", 2, 1).unwrap(),
        "w_{2,2}*w_{1,1} - w_{1,1}"
    );
    assert_eq!(
        equation_text(&sys, "c", 2, 3).unwrap(),
        "w_{2,2}*w_{3,3} + w_{2,4}*w_{3,3} - w_{3,3}"
    );
    assert_eq!(
        equation_text(&sys, "c", 4, 3).unwrap(),
        "w_{4,4}*w_{3,3} - w_{3,3}"
    );
    assert_eq!(equation_text(&sys, "b", 2, 5).unwrap(), "w_{2,4}*w_{5,5}");
    assert_eq!(
        equation_text(&sys, "b", 4, 5).unwrap(),
        "w_{4,4}*w_{5,5} - w_{5,5}"
    );

    // Reduced forms of the worked example.
    let red = build_reduced(&d4);
    assert_eq!(equation_text(&red, "c", 2, 3).unwrap(), "w_{2,4} - 1");
    assert_eq!(equation_text(&red, "b", 2, 5).unwrap(), "w_{2,4}");
    assert_eq!(red.pairs.len(), 1);
    assert_eq!(red.triples.len(), 2);

    // Jordan block over A_2 with mu = 5.
    let a2 = a2_jordan(5);
    let red2 = build_reduced(&a2);
    assert_eq!(
        equation_text(&red2, "a", 2, 3).unwrap(),
        "5*w_{2,4} - 5*w_{1,3} - 1"
    );

    // The extremal-solution A_3 example: all five reduced equations (the
    // canonical order lists target-fiber linear terms, then source-fiber
    // ones, then quadratic terms, then the constant; equations are
    // normalized up to overall sign by that order).
    let a3x = fam("a3-extremal");
    let redx = build_reduced(&a3x);
    let expect = [
        ("a", 1, 5, "w_{1,3} + w_{1,6}"),
        ("a", 3, 5, "w_{3,6} - 1"),
        ("b", 2, 3, "w_{2,4} - w_{1,3}"),
        ("b", 2, 6, "w_{2,7} - w_{1,6} + w_{2,4}*w_{3,6}"),
        ("b", 4, 6, "w_{4,7} - w_{3,6}"),
    ];
    for (v, t, s, text) in expect {
        assert_eq!(
            equation_text(&redx, v, t, s).unwrap(),
            text,
            "E({v},{t},{s})"
        );
    }
    assert_eq!(redx.triples.len(), 5);
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 1, "criterion 1 took {elapsed:?}");
    println!("criterion 1 (worked-example equations): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_beta_state_reproduction() {
    let t0 = std::time::Instant::now();
    let d4 = fam("d4-example");
    let sys = build_reduced(&d4);
    assert!(beta_state(&sys, &subset(&[3, 4, 5])).is_contradictory());
    match beta_state(&sys, &subset(&[3, 4])) {
        BetaOutcome::State(state) => {
            assert!(state.is_trivial());
            assert_eq!(state.ev_of(&sys, 2, 4), Some(Rat::int(1)));
        }
        BetaOutcome::Contradictory => panic!("{{3,4}}-state must not be contradictory"),
    }
    match beta_state(&sys, &subset(&[4])) {
        BetaOutcome::State(state) => {
            let pairs: Vec<(u32, u32)> = state
                .pairs
                .iter()
                .map(|&p| (sys.pairs[p].i, sys.pairs[p].j))
                .collect();
            assert_eq!(pairs, vec![(2, 4)]);
            assert!(state.triples.is_empty());
            assert_eq!(state.cell_dimension(), 1);
        }
        BetaOutcome::Contradictory => panic!("{{4}}-state must not be contradictory"),
    }

    // The extremal A_3 example at beta = {4,5,6,7}.
    let a3x = fam("a3-extremal");
    let sysx = build_reduced(&a3x);
    match beta_state(&sysx, &subset(&[4, 5, 6, 7])) {
        BetaOutcome::State(state) => {
            let pairs: Vec<(u32, u32)> = state
                .pairs
                .iter()
                .map(|&p| (sysx.pairs[p].i, sysx.pairs[p].j))
                .collect();
            assert_eq!(pairs, vec![(2, 4), (2, 7)]);
            let triples: Vec<String> = state.triples.iter().map(|&t| sysx.triple_name(t)).collect();
            assert_eq!(triples, vec!["(b,2,6)"]);
            assert_eq!(state.cell_dimension(), 1);
            assert!(matches!(
                find_solution(&SubSystem::from(&state)),
                SolveOutcome::Solved(_)
            ));
        }
        BetaOutcome::Contradictory => panic!("{{4,5,6,7}}-state must not be contradictory"),
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 1, "criterion 2 took {elapsed:?}");
    println!("criterion 2 (beta-state reproduction): PASS in {elapsed:?}");
}

/// Shared oracle check: per type, the cell counting polynomial evaluated at
/// q equals the number of subrepresentations over F_q.
fn counts_match(gamma: &CoefficientQuiver<Rat>, qs: &[u64]) {
    let sweep = full_sweep(gamma);
    for (beta, class) in &sweep.cells {
        assert!(
            !matches!(class, Classification::Undetermined),
            "undetermined cell at beta={beta:?}"
        );
    }
    for &q in qs {
        let points = points_over_fq_all(gamma, q).unwrap();
        let dims = gamma.dim_vector();
        let mut e = DimVector(vec![0; dims.len()]);
        'all: loop {
            let poly = sweep
                .per_type
                .get(&e)
                .map(|(_, p, _)| p.clone())
                .unwrap_or_default();
            assert_eq!(
                eval_poly(&poly, q as u128),
                points.get(&e).copied().unwrap_or(0),
                "count mismatch at e={e}, q={q}"
            );
            let mut i = 0;
            loop {
                if i == e.len() {
                    break 'all;
                }
                e.0[i] += 1;
                if e.0[i] <= dims.0[i] {
                    break;
                }
                e.0[i] = 0;
                i += 1;
            }
        }
    }
}

#[test]
fn criterion_3_kronecker_desk_check() {
    let t0 = std::time::Instant::now();
    for m in 1..=4 {
        let gamma = fam(&format!("kronecker:m={m}"));
        let sys = build_reduced(&gamma);
        // Every state is contradictory or solvable outright (no fallbacks).
        for beta in extremal_successor_closed_subsets(&gamma) {
            if let BetaOutcome::State(state) = beta_state(&sys, &beta) {
                assert!(
                    matches!(
                        find_solution(&SubSystem::from(&state)),
                        SolveOutcome::Solved(_)
                    ),
                    "unsolvable Kronecker state at beta={beta:?}"
                );
            }
        }
        counts_match(&gamma, &[2, 3]);
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 30, "criterion 3 took {elapsed:?}");
    println!("criterion 3 (Kronecker desk check): PASS in {elapsed:?}");
}

/// The main-theorem check for one family instance: every cell classifies as
/// empty or affine, emptiness is equivalent to a first/second-kind
/// contradiction, the family closed form agrees with the general ladder
/// search, and cell counts match the point counts.
fn main_theorem_check(spec_str: &str, qs: &[u64]) {
    let spec = FamilySpec::parse(spec_str).unwrap();
    let gamma = build_family(&spec).unwrap();
    assert_eq!(
        validate_family(&gamma, &spec),
        Vec::<String>::new(),
        "family conditions for {spec_str}"
    );
    let sweep = full_sweep(&gamma);
    for (beta, class) in &sweep.cells {
        let kind = classify_contradiction(&gamma, beta);
        match class {
            Classification::Undetermined => panic!("undetermined cell in {spec_str} at {beta:?}"),
            Classification::Empty(_) => {
                assert_ne!(
                    kind,
                    ContradictionKind::None,
                    "{spec_str}: empty cell at {beta:?} without a combinatorial witness"
                );
            }
            Classification::Affine { .. } => {
                assert_eq!(
                    kind,
                    ContradictionKind::None,
                    "{spec_str}: affine cell at {beta:?} flagged contradictory"
                );
            }
        }
        // Closed form vs. general search (esc subsets are never first kind).
        assert_eq!(
            second_kind_closed_form(&spec, &gamma, beta),
            kind == ContradictionKind::SecondKind,
            "{spec_str}: closed form disagrees with the ladder search at {beta:?}"
        );
    }
    counts_match(&gamma, qs);
}

#[test]
fn criterion_4_main_theorem_desk_check() {
    let t0 = std::time::Instant::now();
    let orientations4 = ["RRRR", "LLLL", "RLRL", "LLRR"];
    let orientations5 = ["RRRRR", "LLLLL", "RLRLR", "LLRRL"];
    for (n, orients) in [(4usize, &orientations4), (5usize, &orientations5)] {
        for orient in orients.iter() {
            for r in 0..=3 {
                main_theorem_check(&format!("defect-1:n={n},r={r},orient={orient}"), &[2, 3]);
            }
            for r in 0..=1 {
                main_theorem_check(&format!("tube-n-2:n={n},r={r},orient={orient}"), &[2, 3]);
                main_theorem_check(&format!("tube-2:n={n},r={r},orient={orient}"), &[2, 3]);
            }
            main_theorem_check(&format!("tube-2:n={n},r=2,orient={orient}"), &[2, 3]);
            // Homogeneous quasi-simples: the weight class [1 : lambda] must
            // avoid the three exceptional points modulo q, which rules out
            // q = 2 for every admissible lambda; the oracle runs at q = 3
            // (with lambda fitting the orientation) and q = 5. When q_b and
            // q_c are both sinks or both sources the exceptional value is
            // lambda = 1, otherwise lambda = -1.
            let chars: Vec<char> = orient.chars().collect();
            let qb_source = chars[1] == 'R';
            let qc_source = chars[n - 2] == 'L';
            let mu1: i64 = if qb_source == qc_source { 2 } else { 7 };
            main_theorem_check(
                &format!("homog:n={n},mu0=1,mu1={mu1},orient={orient}"),
                &[3, 5],
            );
        }
    }
    // A larger rank n-2 tube instance with a shifted minimum.
    main_theorem_check("tube-n-2:n=5,r=2,imin=5,orient=RLLRR", &[2, 3]);
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 600, "criterion 4 took {elapsed:?}");
    println!("criterion 4 (main theorem desk check): PASS in {elapsed:?}");
}

/// A thin representation over an arbitrary quiver from a support set.
fn thin_rep(q: &Quiver, support: &[&str]) -> CoefficientQuiver<Rat> {
    let verts: Vec<(u32, usize)> = support
        .iter()
        .enumerate()
        .map(|(k, label)| (k as u32 + 1, q.vertex(label).unwrap()))
        .collect();
    let index: BTreeMap<usize, u32> = verts.iter().map(|&(id, v)| (v, id)).collect();
    let arrows = q
        .arrows()
        .iter()
        .enumerate()
        .filter_map(|(aid, a)| {
            let (src, tgt) = (index.get(&a.src)?, index.get(&a.tgt)?);
            Some(GammaArrow {
                arrow: aid,
                src: *src,
                tgt: *tgt,
                weight: Rat::int(1),
            })
        })
        .collect();
    CoefficientQuiver::new(q.clone(), verts, arrows).unwrap()
}

#[test]
fn criterion_5_dynkin_a_and_d() {
    let t0 = std::time::Instant::now();
    // Type A: every interval indecomposable of A_4 in two orientations.
    for orient in ["RRR", "RLR"] {
        for lo in 1..=4 {
            for hi in lo..=4 {
                let gamma = fam(&format!("dynkin-a:n=4,orient={orient},lo={lo},hi={hi}"));
                counts_match(&gamma, &[2, 3]);
            }
        }
    }
    // Type D: every indecomposable of D_4 and D_5 (thin ones and the
    // two-on-the-branch family), in two orientations each.
    for (n, orients) in [(4usize, ["RRR", "LRL"]), (5, ["RRRR", "LRLR"])] {
        for orient in orients {
            let dirs: Vec<Dir> = orient
                .chars()
                .map(|c| if c == 'R' { Dir::R } else { Dir::L })
                .collect();
            let q = Quiver::dynkin_d(n, dirs[0], dirs[1], &dirs[2..]);
            let roots = positive_roots(&q);
            assert_eq!(roots.len(), if n == 4 { 12 } else { 20 });
            for root in roots {
                let thin = root.0.iter().all(|&x| x <= 1);
                if thin {
                    let support: Vec<&str> = (0..q.vertex_count())
                        .filter(|&v| root[v] == 1)
                        .map(|v| q.label(v))
                        .collect();
                    counts_match(&thin_rep(&q, &support), &[2, 3]);
                } else {
                    let r = (0..n - 2).filter(|&x| root[2 + x] == 2).count() - 1;
                    let s = (0..n - 2).filter(|&x| root[2 + x] >= 1).count() - 1;
                    for attach in ["i", "j"] {
                        let gamma = fam(&format!(
                            "dynkin-d:n={n},r={r},s={s},orient={orient},attach={attach}"
                        ));
                        assert_eq!(gamma.dim_vector(), root);
                        counts_match(&gamma, &[2, 3]);
                    }
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 5 took {elapsed:?}");
    println!("criterion 5 (Dynkin A/D pavings): PASS in {elapsed:?}");
}

/// Positive roots of a Dynkin quiver by bounded enumeration.
fn positive_roots(q: &Quiver) -> Vec<DimVector> {
    let nv = q.vertex_count();
    let mut out = Vec::new();
    let mut v = vec![0i64; nv];
    loop {
        let alpha = DimVector(v.clone());
        if !alpha.is_zero() && schubert::dim::tits_form(q, &alpha).unwrap() == 1 {
            out.push(alpha);
        }
        let mut i = 0;
        loop {
            if i == nv {
                return out;
            }
            v[i] += 1;
            if v[i] <= 2 {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn criterion_6_patchwork_machinery() {
    let t0 = std::time::Instant::now();
    // The worked defect -1 instance (n = 6, r = 3): eleven patches with the
    // exact vertex windows of the construction.
    let gamma = fam("defect-1:n=6,r=3,orient=RRRRRR");
    let sys = build_reduced(&gamma);
    let patches = build_patchwork_defect_minus_one(&sys, 6, 3);
    assert_eq!(patchwork_check(&sys, &patches), Vec::<String>::new());
    type PatchData = (Vec<(u32, u32)>, Vec<String>);
    let by_name: BTreeMap<String, PatchData> = patches
        .iter()
        .map(|p| {
            let mut pairs: Vec<(u32, u32)> = p
                .sub
                .pairs
                .iter()
                .map(|&id| (sys.pairs[id].i, sys.pairs[id].j))
                .collect();
            pairs.sort_unstable();
            let mut triples: Vec<String> =
                p.sub.triples.iter().map(|&t| sys.triple_name(t)).collect();
            triples.sort();
            (p.name.clone(), (pairs, triples))
        })
        .collect();
    type ExpectedPatch<'a> = (&'a str, &'a [(u32, u32)], &'a [&'a str]);
    let expected: &[ExpectedPatch] = &[
        ("Xi_{1,1}", &[(6, 10)], &["(c,8,10)", "(d,7,10)"]),
        ("Xi_{2,2}", &[(12, 16)], &["(a,12,15)", "(b,12,14)"]),
        ("Xi_{3,3}", &[(18, 22)], &["(c,20,22)", "(d,19,22)"]),
        (
            "Xi_{0,2}",
            &[(3, 15), (4, 12), (4, 16)],
            &["(a,4,15)", "(b,4,14)"],
        ),
        (
            "Xi_{1,3}",
            &[
                (6, 18),
                (6, 22),
                (7, 19),
                (8, 20),
                (10, 18),
                (10, 22),
                (18, 22),
            ],
            &["(c,8,18)", "(c,8,22)", "(d,7,18)", "(d,7,22)"],
        ),
        (
            "Pi_{1,2}",
            &[(4, 12), (5, 11), (6, 10)],
            &["(v0,5,12)", "(v1,6,11)"],
        ),
        (
            "Pi_{2,3}",
            &[(10, 18), (11, 17), (12, 16)],
            &["(v0,11,16)", "(v1,10,17)"],
        ),
        ("Pi_{3,4}", &[(17, 23), (18, 22)], &["(v1,18,23)"]),
        (
            "Pi_{1,3}",
            &[(4, 16), (5, 17), (6, 18)],
            &["(v0,5,16)", "(v1,6,17)"],
        ),
        ("Pi_{2,4}", &[(10, 22), (11, 23)], &["(v1,10,23)"]),
        ("Pi_{1,4}", &[(5, 23), (6, 22)], &["(v1,6,23)"]),
    ];
    assert_eq!(by_name.len(), expected.len(), "expected 11 patches");
    for (name, pairs, triples) in expected {
        let got = by_name
            .get(*name)
            .unwrap_or_else(|| panic!("missing patch {name}"));
        assert_eq!(got.0, *pairs, "{name} pairs");
        assert_eq!(
            got.1,
            triples.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "{name} triples"
        );
    }
    // The path patches are extremal paths; contracting one along itself
    // collapses it to a single pair.
    for patch in patches.iter().filter(|p| p.name.starts_with("Pi")) {
        let path = as_extremal_path(&patch.sub, &sys)
            .unwrap_or_else(|| panic!("{} should be an extremal path", patch.name));
        let contracted = contract_path(&patch.sub, &path).unwrap();
        assert_eq!(contracted.pairs.len(), 1);
        assert!(contracted.triples.is_empty());
    }

    // Kronecker: the patches admit extremal solutions whose assembly solves
    // the whole reduced system.
    let ksys = build_reduced(&fam("kronecker:m=4"));
    let kpatches = kronecker_patchwork(&ksys);
    assert_eq!(patchwork_check(&ksys, &kpatches), Vec::<String>::new());
    let mut sols = Vec::new();
    for patch in &kpatches {
        assert!(as_extremal_path(&patch.sub, &ksys).is_some());
        match find_extremal_solution(&patch.sub, &ksys) {
            SolveOutcome::Solved(sol) => sols.push(sol),
            other => panic!(
                "{}: expected an extremal solution, got {other:?}",
                patch.name
            ),
        }
    }
    assert_eq!(check_ps(&kpatches, &sols), Vec::<String>::new());
    let assembled = assemble_solution(&kpatches, &sols);
    assert!(assembled_is_solution(&ksys, &assembled));
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 5, "criterion 6 took {elapsed:?}");
    println!("criterion 6 (patchwork machinery): PASS in {elapsed:?}");
}

/// Symbolic closed-form oracle for F_{r delta}: expand
/// (lambda_+^{r+1} - lambda_-^{r+1}) / (2 z) with lambda_+- = F/2 +- z and
/// z^2 = (F^2 - 4 x^delta) / 4, entirely in rational-coefficient polynomials.
fn closed_form_frdelta(f_delta: &MultiPoly, delta_exp: &DimVector, r: usize) -> MultiPoly {
    type QPoly = BTreeMap<DimVector, BigRational>;
    let nvars = delta_exp.len();
    let to_q = |p: &MultiPoly| -> QPoly {
        p.terms()
            .map(|(e, &c)| (e.clone(), BigRational::from_integer(c.into())))
            .collect()
    };
    let mul = |a: &QPoly, b: &QPoly| -> QPoly {
        let mut out: QPoly = BTreeMap::new();
        for (e1, c1) in a {
            for (e2, c2) in b {
                let e = e1 + e2;
                let v = out.entry(e).or_insert_with(BigRational::zero);
                *v += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    let add = |a: &QPoly, b: &QPoly| -> QPoly {
        let mut out = a.clone();
        for (e, c) in b {
            let v = out.entry(e.clone()).or_insert_with(BigRational::zero);
            *v += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    let scale = |a: &QPoly, k: BigRational| -> QPoly {
        a.iter().map(|(e, c)| (e.clone(), c * &k)).collect()
    };
    let binom = |n: usize, k: usize| -> BigRational {
        let mut acc = BigRational::one();
        for i in 0..k {
            acc *= BigRational::from_integer(((n - i) as i64).into());
            acc /= BigRational::from_integer(((i + 1) as i64).into());
        }
        acc
    };
    let f = to_q(f_delta);
    let half = BigRational::new(1.into(), 2.into());
    let f_half = scale(&f, half.clone());
    // z^2 = (F^2 - 4 x^delta) / 4.
    let mut z2 = mul(&f, &f);
    let x_delta: QPoly = BTreeMap::from([(delta_exp.clone(), BigRational::from_integer(4.into()))]);
    z2 = add(
        &z2,
        &scale(&x_delta, BigRational::from_integer((-1).into())),
    );
    z2 = scale(&z2, BigRational::new(1.into(), 4.into()));
    // (lambda_+^{r+1} - lambda_-^{r+1}) / (2z)
    //   = sum_{k odd} binom(r+1, k) (F/2)^{r+1-k} z^{k-1}.
    let one: QPoly = BTreeMap::from([(DimVector(vec![0; nvars]), BigRational::one())]);
    let mut total: QPoly = BTreeMap::new();
    let mut k = 1usize;
    while k <= r + 1 {
        let mut term = one.clone();
        for _ in 0..(r + 1 - k) {
            term = mul(&term, &f_half);
        }
        for _ in 0..(k - 1) / 2 {
            term = mul(&term, &z2);
        }
        total = add(&total, &scale(&term, binom(r + 1, k)));
        k += 2;
    }
    // The result is integral; convert back.
    let mut out = MultiPoly::zero();
    for (e, c) in total {
        assert!(c.denom().is_one(), "closed form is not integral");
        let digits = c.numer().to_u64_digits();
        let mag = digits.1.first().copied().unwrap_or(0) as i64;
        let val = if digits.0 == num_bigint::Sign::Minus {
            -mag
        } else {
            mag
        };
        out = out.add(&MultiPoly::monomial(e, val));
    }
    out
}

#[test]
fn criterion_7_f_polynomial_identities() {
    let t0 = std::time::Instant::now();
    // Closed form vs recurrence for r <= 4, on a D~4 quasi-simple F_delta.
    let homog = fam("homog:n=4,mu0=1,mu1=2,orient=LRRR");
    let f_delta = f_from_cells(&homog).unwrap();
    let d = delta(&homog.quiver).unwrap();
    for r in 0..=4 {
        assert_eq!(
            f_homogeneous_tube(&f_delta, &d, r),
            closed_form_frdelta(&f_delta, &d, r),
            "closed form mismatch at r={r}"
        );
    }

    // F_{M + N} = F_M F_N on a decomposable thin module: two disjoint
    // intervals of A_4 glued into one coefficient quiver.
    let q = Quiver::dynkin_a(4, &[Dir::R, Dir::R, Dir::R]);
    let m1 = fam("dynkin-a:n=4,orient=RRR,lo=1,hi=2");
    let m2 = fam("dynkin-a:n=4,orient=RRR,lo=4,hi=4");
    let direct_sum = {
        let mut verts: Vec<(u32, usize)> = Vec::new();
        let mut arrows = Vec::new();
        for (offset, m) in [(0u32, &m1), (10u32, &m2)] {
            for id in m.vertex_ids() {
                verts.push((id + offset, m.over(id)));
            }
            for a in m.arrows() {
                arrows.push(GammaArrow {
                    arrow: a.arrow,
                    src: a.src + offset,
                    tgt: a.tgt + offset,
                    weight: a.weight.clone(),
                });
            }
        }
        CoefficientQuiver::new(q.clone(), verts, arrows).unwrap()
    };
    let f_sum = f_from_cells(&direct_sum).unwrap();
    assert_eq!(
        f_sum,
        f_direct_sum(&f_from_cells(&m1).unwrap(), &f_from_cells(&m2).unwrap())
    );

    // Duality: the F-polynomial of the dual is the coefficient mirror.
    let m = fam("defect-1:n=4,r=1,orient=RRRR");
    let f = f_from_cells(&m).unwrap();
    let f_op = f_from_cells(&m.dualize()).unwrap();
    assert_eq!(f_op, f_dual(&f, &m.dim_vector()));
    assert_eq!(f_dual(&f_dual(&f, &m.dim_vector()), &m.dim_vector()), f);

    // The preprojective formula at translation depth one: the defect -1
    // member with dim = delta + eps against its small companion of dim eps.
    // With orientation LRRR, delta - eps is injective.
    let small = fam("defect-1:n=4,r=0,orient=LRRR");
    let big = fam("defect-1:n=4,r=2,orient=LRRR");
    let homog_l = fam("homog:n=4,mu0=1,mu1=2,orient=LRRR");
    let eps = small.dim_vector();
    assert_eq!(big.dim_vector(), &eps + &d);
    let injective_dims = schubert::dim::injective_dims(&homog_l.quiver);
    assert!(injective_dims.contains(&(&d - &eps)));
    let f_eps = f_from_cells(&small).unwrap();
    let f_dl = f_from_cells(&homog_l).unwrap();
    let f_big = f_from_cells(&big).unwrap();
    assert_eq!(
        f_preprojective(&f_eps, &eps, &f_dl, &d, 1, true, None).unwrap(),
        f_big
    );

    // Cluster variables evaluate to the total cell count at x = 1.
    for spec in ["kronecker:m=2", "defect-1:n=4,r=1,orient=RRRR"] {
        let gamma = fam(spec);
        let f = f_from_cells(&gamma).unwrap();
        let x = cluster_variable(&f, &gamma.dim_vector(), &gamma.quiver);
        assert_eq!(x.eval_ones(), f.eval_ones(), "{spec}");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 30, "criterion 7 took {elapsed:?}");
    println!("criterion 7 (F-polynomial identities): PASS in {elapsed:?}");
}

#[test]
fn criterion_8_property_suites() {
    let t0 = std::time::Instant::now();
    // Determinism of the beta-state under random loop orders: 20 instances
    // x (some beta each), 100 shuffles total per instance.
    let instances = [
        "d4-example",
        "a3-extremal",
        "kronecker:m=3",
        "kronecker:m=4",
        "defect-1:n=4,r=1,orient=RRRR",
        "defect-1:n=4,r=2,orient=RLRL",
        "defect-1:n=4,r=3,orient=LLRR",
        "defect-1:n=5,r=1,orient=RRRRR",
        "defect-1:n=5,r=2,orient=LLLLL",
        "defect-1:n=6,r=3,orient=RRRRRR",
        "tube-2:n=4,r=1,orient=RRRR",
        "tube-2:n=4,r=2,orient=RLRL",
        "tube-2:n=5,r=1,orient=RRRRR",
        "tube-n-2:n=4,r=1,orient=RRRR",
        "tube-n-2:n=5,r=1,orient=RLRLR",
        "tube-n-2:n=5,r=2,orient=RRRRR",
        "homog:n=4,mu0=1,mu1=2,orient=RRRR",
        "homog:n=4,mu0=1,mu1=3,orient=LRRR",
        "homog:n=5,mu0=1,mu1=2,orient=RRRRR",
        "dynkin-d:n=4,r=0,s=1,orient=RRR,attach=i",
    ];
    assert_eq!(instances.len(), 20);
    for spec in instances {
        let gamma = fam(spec);
        let sys = build_reduced(&gamma);
        let esc = extremal_successor_closed_subsets(&gamma);
        // A spread of basis subsets across the instance.
        let step = (esc.len() / 5).max(1);
        for beta in esc.iter().step_by(step).take(5) {
            let reference = beta_state(&sys, beta);
            for seed in 0..20u64 {
                assert_eq!(
                    beta_state_seeded(&sys, beta, seed),
                    reference,
                    "{spec}: beta-state depends on the step order at {beta:?}"
                );
            }
        }
        // Degree bound: every variable appears at most linearly per term.
        assert!(degrees_are_multilinear(&build_complete(&gamma)));
        assert!(degrees_are_multilinear(&sys));
    }

    // Automorphism equivariance of the cell classification.
    for spec in [
        "defect-1:n=4,r=2,orient=RRRR",
        "homog:n=5,mu0=1,mu1=2,orient=RRRRR",
    ] {
        let gamma = fam(spec);
        let n = gamma.quiver.dtilde_n().unwrap();
        let sys = build_reduced(&gamma);
        for sigma in DiagramAut::all(n) {
            let sg = gamma.apply_automorphism(&sigma).unwrap();
            let ssys = build_reduced(&sg);
            for beta in extremal_successor_closed_subsets(&gamma).iter().step_by(3) {
                let a = schubert::grass::classify_cell_with(&sys, beta);
                let b = schubert::grass::classify_cell_with(&ssys, beta);
                let same = match (&a, &b) {
                    (Classification::Empty(_), Classification::Empty(_)) => true,
                    (
                        Classification::Affine { dim: d1, .. },
                        Classification::Affine { dim: d2, .. },
                    ) => d1 == d2,
                    _ => false,
                };
                assert!(
                    same,
                    "{spec}: classification not equivariant under {:?} at {beta:?}: {a:?} vs {b:?}",
                    sigma.perm
                );
            }
        }
    }
    // Type equivariance sanity: chi is invariant under dualizing with the
    // mirrored type.
    let gamma = fam("defect-1:n=4,r=1,orient=RRRR");
    let sweep = full_sweep(&gamma);
    let dual_sweep = full_sweep(&gamma.dualize());
    let dims = gamma.dim_vector();
    for (e, (chi, _, _)) in &sweep.per_type {
        let mirrored = &dims - e;
        let dual_chi = dual_sweep.per_type.get(&mirrored).map(|x| x.0).unwrap_or(0);
        assert_eq!(*chi, dual_chi, "dual chi mismatch at e={e}");
    }
    let _ = type_of(&gamma, &subset(&[4]));
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 8 took {elapsed:?}");
    println!("criterion 8 (property suites): PASS in {elapsed:?}");
}
