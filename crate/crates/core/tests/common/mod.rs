//! Randomized invariants shared by the `properties` and `acceptance` targets. Every suite runs a
//! proptest runner seeded deterministically, so failures reproduce.

#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use toric_cox::arrangement::{cubic_pencil_check, intersection_closure, kapranov_arrangement, Arrangement};
use toric_cox::cones::{
    blowup_class_group, cremona_move, minus_one_classes, multiplicity_at, multiplicity_oracle,
    orbit_closure_class, phi_star, Budget, HomogeneousForm,
};
use toric_cox::coxring::{
    cox_presentation, mds_classify, tangent_cox_ring, threshold_fails, DivisorClass, MdsStatus, PositionFlags,
};
use toric_cox::fan::{
    barycentric_subdivision, example_4_2_fan, extend_fan_theorem14, is_complete, is_projective, is_smooth,
    is_smooth_star_point, product_p1_fan, projective_space_fan, stellar_subdivide, surface_fan, Fan,
};
use toric_cox::io::{bundle_to_json, parse_input, to_pretty, Input};
use toric_cox::klyachko::{check_compatibility, cotangent_bundle, standard_bundle, sym_power_dimension, Subspace, ToricVectorBundle};
use toric_cox::lattice::{ExactMatrix, Field, Scalar};
use toric_cox::poly::monomials_of_degree;
use toric_cox::report::{classify_report, example_report, Example, Options, Position};

pub type Check = fn(u32) -> Result<(), String>;

/// Name, check and default case count of every suite.
pub const SUITES: &[(&str, Check, u32)] = &[
    ("determinant matches cofactor expansion", determinant_oracle, 64),
    ("rank-nullity", rank_nullity, 96),
    ("canonical row space is idempotent and invariant", row_space_invariance, 48),
    ("stellar subdivision adds one ray and keeps completeness", stellar_properties, 32),
    ("extension doubles cones and stays smooth and complete", extension_properties, 4),
    ("projective fans are complete; barycentric counts", projective_and_barycentric, 1),
    ("compatibility certificates re-verify", certificate_reverification, 48),
    ("symmetric powers ignore the filtrations", sym_power_independence, 24),
    ("hyperplane bundles are compatible iff transverse", hyperplane_transversality, 48),
    ("closure of the closure adds nothing", closure_of_closure, 32),
    ("cotangent points coincide exactly when rays do mod p", cotangent_coincidences, 24),
    ("Kapranov member counts", kapranov_counts, 1),
    ("cubic pencil matches the evaluation oracle", cubic_pencil_oracle, 32),
    ("presentations are homogeneous with n - s free variables", presentation_homogeneity, 48),
    ("tangent relations span the kernel of the ray matrix", tangent_kernel_round_trip, 1),
    ("classifier is antitone in s", classifier_antitone, 1),
    ("threshold identity", threshold_identity, 1),
    ("multiplicity matches local expansion", multiplicity_matches_oracle, 200),
    ("orbit closure classes add under products", orbit_class_additivity, 50),
    ("Cremona moves are involutions on (-1)-classes", cremona_involution, 64),
    ("pullback of classes is an isomorphism", phi_star_isomorphism, 32),
    ("deeper searches strictly enlarge the class set", depth_monotone, 1),
    ("reports are deterministic", report_determinism, 16),
    ("serialization round trips", io_round_trip, 24),
];

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rational), Just(Field::Prime(5)), Just(Field::Prime(7))]
}

fn scalars(f: Field, v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| f.from_i64(x)).collect()
}

fn small_matrix(max: usize) -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-4i64..=4, r * c)))
}

fn matrix(f: Field, r: usize, c: usize, v: &[i64]) -> ExactMatrix {
    let rows: Vec<Vec<Scalar>> = v.chunks(c).map(|row| scalars(f, row)).collect();
    let m = ExactMatrix::from_rows(f, c, rows).expect("consistent shape");
    assert_eq!(m.nrows(), r);
    m
}

fn cofactor(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::from(1);
    }
    let n = m.len();
    let mut acc = BigInt::from(0);
    for j in 0..n {
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * cofactor(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn determinant_oracle(cases: u32) -> Result<(), String> {
    let s = (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(-6i64..=6, n * n)));
    run(cases, s, |(n, v)| {
        let m = matrix(Field::Rational, n, n, &v);
        let rows: Vec<Vec<BigInt>> = v.chunks(n).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let det = ok(m.determinant())?;
        ensure(det == Field::Rational.from_int(&cofactor(&rows)), format!("{det} for {v:?}"))
    })
}

pub fn rank_nullity(cases: u32) -> Result<(), String> {
    run(cases, (fields(), small_matrix(6)), |(f, (r, c, v))| {
        let m = matrix(f, r, c, &v);
        let kernel = m.kernel_basis();
        ensure(m.rank() + kernel.len() == c, "rank + nullity != columns")?;
        for k in &kernel {
            ensure(m.apply(k).iter().all(Scalar::is_zero), "kernel vector not annihilated")?;
        }
        Ok(())
    })
}

pub fn row_space_invariance(cases: u32) -> Result<(), String> {
    let s = (fields(), small_matrix(5)).prop_flat_map(|(f, (r, c, v))| {
        (Just(f), Just(r), Just(c), Just(v), prop::collection::vec(-3i64..=3, r * r))
    });
    run(cases, s, |(f, r, c, v, g)| {
        let m = matrix(f, r, c, &v);
        let canon = m.row_space_canonical();
        ensure(canon.row_space_canonical() == canon, "not idempotent")?;
        let g = matrix(f, r, r, &g);
        prop_assume!(g.rank() == r);
        let moved = ok(g.mul(&m))?;
        ensure(moved.row_space_canonical() == canon, "changed by an invertible row operation")
    })
}

fn interior_vector(f: &Fan, cone: usize, coeffs: &[i64]) -> Vec<BigInt> {
    let c = &f.cones()[cone];
    let mut v = vec![BigInt::from(0); f.dim()];
    for (k, &i) in c.rays().iter().enumerate() {
        for (x, y) in v.iter_mut().zip(f.ray(i)) {
            *x += y * coeffs[k % coeffs.len()];
        }
    }
    v
}

pub fn stellar_properties(cases: u32) -> Result<(), String> {
    let fans = [projective_space_fan(2).unwrap(), projective_space_fan(3).unwrap(), product_p1_fan(3).unwrap(), surface_fan(6).unwrap()];
    let s = (0usize..fans.len(), 0usize..64, prop::collection::vec(0i64..=2, 3));
    run(cases, s, |(fi, ci, coeffs)| {
        let f = &fans[fi];
        let v = interior_vector(f, ci % f.cones().len(), &coeffs);
        prop_assume!(v.iter().any(|x| *x != BigInt::from(0)));
        prop_assume!(toric_cox::lattice::is_primitive(&v) && f.ray_index(&v).is_none());
        let g = ok(stellar_subdivide(f, &v))?;
        ensure(g.n_rays() == f.n_rays() + 1, "ray count")?;
        ensure(ok(is_complete(&g))?, "lost completeness")?;
        if ok(is_smooth_star_point(f, &v))? {
            ensure(is_smooth(&g).smooth, "smooth star point gave a singular fan")?;
        }
        Ok(())
    })
}

pub fn extension_properties(cases: u32) -> Result<(), String> {
    run(cases, 4usize..=7, |n| {
        let f = ok(surface_fan(n))?;
        let g = ok(extend_fan_theorem14(&f))?;
        ensure(g.cones().len() == 2 * f.cones().len() && g.n_rays() == f.n_rays() + 2, "counts")?;
        ensure(is_smooth(&g).smooth && ok(is_complete(&g))?, "not smooth and complete")
    })
}

pub fn projective_and_barycentric(_cases: u32) -> Result<(), String> {
    let fans = [
        projective_space_fan(2).unwrap(),
        product_p1_fan(3).unwrap(),
        surface_fan(11).unwrap(),
        example_4_2_fan().unwrap(),
    ];
    for f in &fans {
        let p = is_projective(f).map_err(|e| e.to_string())?;
        if !p.projective || !is_complete(f).map_err(|e| e.to_string())? {
            return Err("expected a projective complete fan".into());
        }
    }
    for d in 1..=3usize {
        let b = barycentric_subdivision(&projective_space_fan(d).unwrap()).map_err(|e| e.to_string())?;
        let fact: usize = (1..=d + 1).product();
        if b.n_rays() != (1 << (d + 1)) - 2 || b.cones().len() != fact {
            return Err(format!("barycentric counts for d = {d}"));
        }
    }
    Ok(())
}

/// A random proper subspace of `k^r` spanned by up to `r - 1` small integer rows.
fn subspace(f: Field, r: usize, rows: &[Vec<i64>], dim: usize) -> Subspace {
    let rows: Vec<Vec<Scalar>> = rows.iter().take(dim).map(|row| scalars(f, &row[..r])).collect();
    let s = Subspace::span(f, r, rows).expect("well formed");
    if s.is_full() {
        Subspace::zero(f, r)
    } else {
        s
    }
}

fn random_bundle(f: Field, fan: &Fan, r: usize, data: &[(usize, Vec<Vec<i64>>, u32)], zero_tail: usize) -> ToricVectorBundle {
    let n = fan.n_rays();
    let subs: Vec<Subspace> = (0..n)
        .map(|j| {
            if j + zero_tail >= n {
                return Subspace::zero(f, r);
            }
            let (dim, rows, _) = &data[j % data.len()];
            subspace(f, r, rows, *dim % r)
        })
        .collect();
    let steps = (0..n).map(|j| data[j % data.len()].2).collect();
    standard_bundle(fan.clone(), f, r, subs, steps).expect("valid bundle")
}

fn bundle_data(r: usize) -> impl Strategy<Value = Vec<(usize, Vec<Vec<i64>>, u32)>> {
    prop::collection::vec((0..r, prop::collection::vec(prop::collection::vec(-2i64..=2, r), r), 1u32..=3), 1..=6)
}

pub fn certificate_reverification(cases: u32) -> Result<(), String> {
    let fans = [projective_space_fan(2).unwrap(), product_p1_fan(2).unwrap(), surface_fan(6).unwrap(), projective_space_fan(3).unwrap()];
    let s = (fields(), 0usize..fans.len(), 2usize..=4).prop_flat_map(|(f, fi, r)| (Just(f), Just(fi), Just(r), bundle_data(r)));
    run(cases, s, |(f, fi, r, data)| {
        let b = random_bundle(f, &fans[fi], r, &data, 0);
        if let Some(cert) = ok(check_compatibility(&b))?.certificate() {
            ensure(cert.verify(&b), "certificate failed independent verification")?;
        }
        Ok(())
    })
}

pub fn sym_power_independence(cases: u32) -> Result<(), String> {
    let fan = projective_space_fan(2).unwrap();
    let s = (2usize..=4, 0u32..=5).prop_flat_map(|(r, m)| (Just(r), Just(m), bundle_data(r), bundle_data(r)));
    run(cases, s, |(r, m, d1, d2)| {
        let a = random_bundle(Field::Rational, &fan, r, &d1, 0);
        let b = random_bundle(Field::Rational, &fan, r, &d2, 0);
        let (da, db) = (ok(sym_power_dimension(&a, m))?.dimension, ok(sym_power_dimension(&b, m))?.dimension);
        ensure(da == db && da == monomials_of_degree(r, m).len(), format!("{da} vs {db}"))
    })
}

pub fn hyperplane_transversality(cases: u32) -> Result<(), String> {
    let fans = [projective_space_fan(3).unwrap(), product_p1_fan(3).unwrap()];
    let s = (0usize..2, prop::collection::vec(prop::collection::vec(-1i64..=1, 3), 6));
    run(cases, s, |(fi, normals)| {
        let fan = &fans[fi];
        let f = Field::Rational;
        let normals: Vec<Vec<BigInt>> = normals[..fan.n_rays()].iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        // distinct hyperplanes: nonzero, pairwise non-proportional normals
        for (i, a) in normals.iter().enumerate() {
            prop_assume!(a.iter().any(|x| *x != BigInt::from(0)));
            for b in &normals[..i] {
                let m = ExactMatrix::from_int_rows(f, 3, &[a.clone(), b.clone()]).unwrap();
                prop_assume!(m.rank() == 2);
            }
        }
        let subs: Vec<Subspace> = normals.iter().map(|v| Subspace::perp_of(f, v).unwrap()).collect();
        let b = ok(standard_bundle(fan.clone(), f, 3, subs, vec![1; fan.n_rays()]))?;
        let transverse = fan.cones().iter().all(|c| {
            let rows: Vec<Vec<BigInt>> = c.rays().iter().map(|&i| normals[i].clone()).collect();
            ExactMatrix::from_int_rows(f, 3, &rows).unwrap().rank() == 3
        });
        ensure(ok(check_compatibility(&b))?.is_compatible() == transverse, "compatibility disagrees with transversality")
    })
}

pub fn closure_of_closure(cases: u32) -> Result<(), String> {
    let fan = surface_fan(8).unwrap();
    let s = (fields(), 3usize..=5).prop_flat_map(|(f, r)| (Just(f), Just(r), bundle_data(r)));
    run(cases, s, |(f, r, data)| {
        let b = random_bundle(f, &fan, r, &data, 0);
        let a = Arrangement::from_bundle(&b);
        let poset = intersection_closure(&a);
        ensure(poset.is_closed(), "closure is not closed")?;
        for m in a.centers() {
            ensure(poset.contains(&m.locus()), "closure misses a center")?;
        }
        // feeding the closure back in yields the same set of loci
        let again: Vec<Subspace> = poset.elements.iter().map(|e| e.locus.annihilator()).collect();
        let fan2 = ok(surface_fan(again.len().max(4)))?;
        let mut subs = again.clone();
        subs.resize(fan2.n_rays(), Subspace::zero(f, r));
        let b2 = ok(standard_bundle(fan2.clone(), f, r, subs, vec![1; fan2.n_rays()]))?;
        let p2 = intersection_closure(&Arrangement::from_bundle(&b2));
        ensure(p2.elements.len() == poset.elements.len(), "closure of the closure grew")?;
        ensure(p2.elements.iter().all(|e| poset.contains(&e.locus)), "closure of the closure changed")
    })
}

pub fn cotangent_coincidences(cases: u32) -> Result<(), String> {
    let fans = [example_4_2_fan().unwrap(), surface_fan(9).unwrap(), extend_fan_theorem14(&surface_fan(5).unwrap()).unwrap()];
    let s = (0usize..fans.len(), prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]));
    run(cases, s, |(fi, p)| {
        let fan = &fans[fi];
        let f = Field::Prime(p);
        let b = ok(cotangent_bundle(fan, f))?;
        let a = Arrangement::from_bundle(&b.normalize());
        let n = fan.n_rays();
        // rays proportional mod p (all 2x2 minors vanish) give the same perp
        let mut classes = 0;
        let mut seen = vec![false; n];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            classes += 1;
            for j in i..n {
                let m = ExactMatrix::from_int_rows(f, fan.dim(), &[fan.ray(i).to_vec(), fan.ray(j).to_vec()]).unwrap();
                if m.rank() < 2 {
                    seen[j] = true;
                }
            }
        }
        ensure(a.members().len() == classes, format!("{} members, oracle {classes}", a.members().len()))
    })
}

pub fn kapranov_counts(_cases: u32) -> Result<(), String> {
    for r in 3..=7usize {
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        let expected: usize = (1..=r - 2).map(|k| binom(r + 1, k)).sum();
        let got = kapranov_arrangement(r, Field::Rational).map_err(|e| e.to_string())?.members().len();
        if got != expected {
            return Err(format!("r = {r}: {got} members, expected {expected}"));
        }
    }
    Ok(())
}

pub fn cubic_pencil_oracle(cases: u32) -> Result<(), String> {
    let s = (fields(), prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 9));
    run(cases, s, |(f, pts)| {
        let points: Vec<Vec<Scalar>> = pts.iter().map(|p| scalars(f, p)).collect();
        prop_assume!(points.iter().all(|p| p.iter().any(|x| !x.is_zero())));
        let rep = match cubic_pencil_check(f, &points) {
            Ok(rep) => rep,
            Err(_) => return Ok(()),
        };
        let monos = monomials_of_degree(3, 3);
        let rows: Vec<Vec<Scalar>> = points
            .iter()
            .map(|p| monos.iter().map(|e| (0..3).fold(f.one(), |acc, i| &acc * &p[i].pow(e[i]))).collect())
            .collect();
        let rank = ExactMatrix::from_rows(f, monos.len(), rows).unwrap().rank();
        ensure(rep.cubic_space_dim == 10 - rank, format!("{} vs {}", rep.cubic_space_dim, 10 - rank))
    })
}

pub fn presentation_homogeneity(cases: u32) -> Result<(), String> {
    let fans = [surface_fan(5).unwrap(), surface_fan(7).unwrap(), surface_fan(9).unwrap()];
    let s = (fields(), 0usize..fans.len(), 2usize..=4, 1usize..=3)
        .prop_flat_map(|(f, fi, r, z)| (Just(f), Just(fi), Just(r), Just(z), bundle_data(r)));
    run(cases, s, |(f, fi, r, zeros, data)| {
        let fan = &fans[fi];
        // the last two rays span a cone, so there is always an all-zero maximal cone
        let b = random_bundle(f, fan, r, &data, zeros.max(2));
        prop_assume!(ok(check_compatibility(&b))?.is_compatible());
        let p = ok(cox_presentation(&b))?;
        ensure(p.is_homogeneous(), "inhomogeneous relation")?;
        ensure(p.free_variables.len() == b.zero_rays().len(), "free variables != zero rays")
    })
}

pub fn tangent_kernel_round_trip(_cases: u32) -> Result<(), String> {
    let fans = [
        projective_space_fan(2).unwrap(),
        projective_space_fan(3).unwrap(),
        product_p1_fan(2).unwrap(),
        surface_fan(7).unwrap(),
        example_4_2_fan().unwrap(),
    ];
    for fan in &fans {
        let f = Field::Rational;
        let p = tangent_cox_ring(fan, f).map_err(|e| e.to_string())?;
        let n = fan.n_rays();
        if p.relations.len() != n - fan.dim() || !p.is_homogeneous() {
            return Err(format!("{} relations for {n} rays in dimension {}", p.relations.len(), fan.dim()));
        }
        // x_j y_j -> z_j turns each relation into a linear form in the kernel of the ray matrix
        let mut forms = Vec::new();
        for rel in &p.relations {
            let mut lambda = vec![f.zero(); n];
            for t in &rel.terms {
                let idx: Vec<usize> = t.factors.iter().map(|(a, _)| *a).collect();
                if idx.len() != 2 || idx[0] >= n || idx[1] != idx[0] + n {
                    return Err("relation term is not x_j*y_j".into());
                }
                lambda[idx[0]] = t.coeff.clone();
            }
            forms.push(lambda);
        }
        let rays = ExactMatrix::from_int_rows(f, fan.dim(), fan.rays()).unwrap().transpose();
        let kernel = rays.kernel_basis();
        let lam = ExactMatrix::from_rows(f, n, forms).unwrap();
        let kmat = ExactMatrix::from_rows(f, n, kernel).unwrap();
        if lam.row_space_canonical() != kmat.row_space_canonical() {
            return Err("relations do not span the kernel".into());
        }
    }
    Ok(())
}

pub fn classifier_antitone(_cases: u32) -> Result<(), String> {
    let general = PositionFlags { general: true, very_general: true, ..Default::default() };
    for r in 3..=12 {
        let mut seen_not = false;
        for s in r + 1..=60 {
            let st = mds_classify(r, s, general).status;
            if seen_not && st == MdsStatus::Mds {
                return Err(format!("r = {r}, s = {s} flipped back to MDS"));
            }
            seen_not |= st == MdsStatus::NotMds;
        }
    }
    Ok(())
}

pub fn threshold_identity(_cases: u32) -> Result<(), String> {
    use num_rational::BigRational;
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    for r in 3..=64i64 {
        for s in r + 1..=200i64 {
            let left = q(1, r) + q(1, s - r) <= q(1, 2);
            let right = q(s, 1) >= q(r + 2, 1) + q(4, r - 2);
            if left != right || threshold_fails(r as usize, s as usize) != left {
                return Err(format!("disagreement at r = {r}, s = {s}"));
            }
        }
    }
    Ok(())
}

fn vanishing_linear_form(f: Field, p: &[Scalar], c: &[i64]) -> Vec<Scalar> {
    let k = p.iter().position(|x| !x.is_zero()).expect("nonzero point");
    let mut out = vec![f.zero(); p.len()];
    for i in (0..p.len()).filter(|&i| i != k) {
        let ci = f.from_i64(c[i]);
        out[i] = &out[i] + &(&ci * &p[k]);
        out[k] = &out[k] - &(&ci * &p[i]);
    }
    out
}

fn linear(f: Field, coeffs: Vec<Scalar>) -> HomogeneousForm {
    HomogeneousForm::new(f, coeffs.len(), 1, coeffs).expect("linear form")
}

fn random_form(f: Field, r: usize, degree: u32, coeffs: &[i64]) -> HomogeneousForm {
    let n = monomials_of_degree(r, degree).len();
    let mut c: Vec<Scalar> = (0..n).map(|i| f.from_i64(coeffs[i % coeffs.len()])).collect();
    if c.iter().all(Scalar::is_zero) {
        c[0] = f.one();
    }
    HomogeneousForm::new(f, r, degree, c).expect("form")
}

/// Form of degree at most 4 with a prescribed number of linear factors through `p`.
fn form_through(f: Field, p: &[Scalar], through: usize, extra: u32, data: &[i64]) -> HomogeneousForm {
    let r = p.len();
    let mut h = random_form(f, r, extra, data);
    for t in 0..through {
        let c: Vec<i64> = (0..r).map(|i| data[(t * r + i + 1) % data.len()] | 1).collect();
        let l = vanishing_linear_form(f, p, &c);
        if l.iter().any(|x| !x.is_zero()) {
            h = h.mul(&linear(f, l));
        }
    }
    h
}

pub fn multiplicity_matches_oracle(cases: u32) -> Result<(), String> {
    for f in [Field::Rational, Field::Prime(5), Field::Prime(7)] {
        multiplicity_in(f, cases)?;
    }
    Ok(())
}

pub fn multiplicity_in(f: Field, cases: u32) -> Result<(), String> {
    let s = (2usize..=4, 0usize..=3, 0u32..=2, prop::collection::vec(-4i64..=4, 4), prop::collection::vec(-3i64..=3, 16));
    run(cases, s, |(r, through, extra, p, data)| {
        let p = scalars(f, &p[..r]);
        prop_assume!(p.iter().any(|x| !x.is_zero()));
        let h = form_through(f, &p, through.min(4 - extra as usize), extra, &data);
        let m = ok(multiplicity_at(&h, &p))?;
        ensure(m == multiplicity_oracle(&h, &p), format!("multiplicity {m} disagrees with the oracle"))
    })
}

pub fn orbit_class_additivity(cases: u32) -> Result<(), String> {
    let (b, _) = toric_cox::arrangement::example_1_5_bundle(Field::Rational, 1).map_err(|e| e.to_string())?;
    let pts = Arrangement::from_bundle(&b).points().expect("point centers");
    let s = (
        (0usize..9, 0usize..9, 0usize..=2, 0u32..=2),
        (0usize..9, 0usize..9, 0usize..=2, 0u32..=2),
        prop::collection::vec(-3i64..=3, 12),
    );
    let f = Field::Rational;
    let make = |(i, j, through, extra): (usize, usize, usize, u32), data: &[i64]| {
        let mut h = form_through(f, &pts[i], through, extra, data);
        if i != j {
            // the line through two centers
            let (p, q) = (&pts[i], &pts[j]);
            let l = vec![&(&p[1] * &q[2]) - &(&p[2] * &q[1]), &(&p[2] * &q[0]) - &(&p[0] * &q[2]), &(&p[0] * &q[1]) - &(&p[1] * &q[0])];
            h = h.mul(&linear(f, l));
        }
        h
    };
    run(cases, s, |(a, c, data)| {
        let (h1, h2) = (make(a, &data), make(c, &data[3..]));
        let sum = ok(orbit_closure_class(&h1, &b))?.add(&ok(orbit_closure_class(&h2, &b))?);
        ensure(ok(orbit_closure_class(&h1.mul(&h2), &b))? == sum, "class of a product is not the sum")
    })
}

pub fn cremona_involution(cases: u32) -> Result<(), String> {
    let classes: Vec<_> = minus_one_classes(9, Budget::depth(3)).map_err(|e| e.to_string())?.classes().into_iter().cloned().collect();
    let s = (0..classes.len(), prop::sample::subsequence((0..9usize).collect::<Vec<_>>(), 3));
    run(cases, s, |(ci, t)| {
        let c = &classes[ci];
        ensure(c.is_minus_one_class(), "emitted class fails the Diophantine checks")?;
        let m = cremona_move(c, t[0], t[1], t[2]);
        ensure(m.is_minus_one_class(), "Cremona image is not a (-1)-class")?;
        ensure(cremona_move(&m, t[0], t[1], t[2]) == *c, "not an involution")
    })
}

pub fn phi_star_isomorphism(cases: u32) -> Result<(), String> {
    let (b, _) = toric_cox::arrangement::example_1_5_bundle(Field::Rational, 1).map_err(|e| e.to_string())?;
    let n = blowup_class_group(&b).rank();
    let images: Vec<DivisorClass> = (0..n).map(|i| phi_star(&b, &DivisorClass::basis(n, i))).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let rows: Vec<Vec<BigInt>> = images.iter().map(|c| c.0.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let det = ExactMatrix::from_int_rows(Field::Rational, n, &rows).unwrap().determinant().unwrap();
    if !(det.is_one() || (-&det).is_one()) {
        return Err(format!("basis images have determinant {det}"));
    }
    run(cases, (prop::collection::vec(-5i64..=5, n), prop::collection::vec(-5i64..=5, n)), |(x, y)| {
        let (x, y) = (DivisorClass(x), DivisorClass(y));
        let lhs = ok(phi_star(&b, &x.add(&y)))?;
        ensure(lhs == ok(phi_star(&b, &x))?.add(&ok(phi_star(&b, &y))?), "not additive")
    })
}

pub fn depth_monotone(_cases: u32) -> Result<(), String> {
    let mut prev: Option<std::collections::BTreeSet<_>> = None;
    for k in 0..=5 {
        let set: std::collections::BTreeSet<_> =
            minus_one_classes(9, Budget::depth(k)).map_err(|e| e.to_string())?.classes().into_iter().cloned().collect();
        if let Some(p) = &prev {
            if !(p.is_subset(&set) && p.len() < set.len()) {
                return Err(format!("depth {k} does not strictly enlarge depth {}", k - 1));
            }
        }
        prev = Some(set);
    }
    Ok(())
}

pub fn report_determinism(cases: u32) -> Result<(), String> {
    let opts = Options::default();
    for ex in [Example::P2Cotangent, Example::Example15, Example::LosevManin { dim: 2 }] {
        let a = example_report(&ex, &opts).map_err(|e| e.to_string())?;
        let b = example_report(&ex, &opts).map_err(|e| e.to_string())?;
        if a.to_json() != b.to_json() || a.to_text() != b.to_text() {
            return Err("example report differs between runs".into());
        }
    }
    let pos = prop::sample::select(vec![Position::General, Position::VeryGeneral, Position::Collinear, Position::RationalNormalCurve, Position::Unspecified]);
    run(cases, (2usize..=8, 3usize..=20, pos), |(r, s, pos)| {
        let a = ok(classify_report(r, s, pos, &opts))?;
        let b = ok(classify_report(r, s, pos, &opts))?;
        ensure(a.to_json() == b.to_json() && a.to_text() == b.to_text(), "classify report differs between runs")
    })
}

pub fn io_round_trip(cases: u32) -> Result<(), String> {
    let opts = Options::default();
    let examples = [
        Example::P2Cotangent,
        Example::Example15,
        Example::Example42,
        Example::Kapranov { rank: 4 },
        Example::LosevManin { dim: 3 },
        Example::Tangent { fan: projective_space_fan(3).unwrap(), name: "P3".into() },
    ];
    for ex in &examples {
        let b = toric_cox::report::example_bundle(ex, &opts).map_err(|e| e.to_string())?.normalize();
        let text = to_pretty(&bundle_to_json(&b));
        if parse_input(&text, None).map_err(|e| e.to_string())? != Input::Bundle(b) {
            return Err("example bundle does not round trip".into());
        }
    }
    let fan = surface_fan(6).unwrap();
    let s = (fields(), 2usize..=4).prop_flat_map(|(f, r)| (Just(f), Just(r), bundle_data(r)));
    run(cases, s, |(f, r, data)| {
        let b = random_bundle(f, &fan, r, &data, 0);
        let text = to_pretty(&bundle_to_json(&b));
        ensure(ok(parse_input(&text, Some(f.characteristic())))? == Input::Bundle(b), "random bundle does not round trip")
    })
}

/// Runs every suite and returns the failures.
pub fn run_all() -> Vec<(String, String)> {
    SUITES
        .iter()
        .filter_map(|(name, check, cases)| check(*cases).err().map(|e| (name.to_string(), e)))
        .collect()
}
