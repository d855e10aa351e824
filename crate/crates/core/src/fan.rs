//! Simplicial rational fans: validation, smoothness, completeness, projectivity,
//! stellar and barycentric subdivisions, and the named fans used by the examples.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    elementary_divisors, format_vector, is_primitive, primitive, ExactMatrix, Field, Scalar,
};
use crate::lp::find_strict_solution_guided;

/// A cone given by sorted indices into the fan's ray list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone(rays)
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, ray: usize) -> bool {
        self.0.binary_search(&ray).is_ok()
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| format!("rho{}", i + 1)).collect();
        write!(f, "cone{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    WrongDimension,
    ZeroRay,
    NonPrimitiveRay,
    DuplicateRay,
    BadIndex,
    EmptyCone,
    DuplicateCone,
    NotSimplicial,
    IntersectionNotFace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

/// Outcome of [`validate_fan`]; an empty violation list means the fan is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }
}

/// A simplicial fan in `Z^dim` with primitive ray generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<BigInt>>,
    cones: Vec<Cone>,
}

impl Fan {
    /// Builds and validates a fan.
    pub fn new(dim: usize, rays: Vec<Vec<BigInt>>, cones: Vec<Vec<usize>>) -> Result<Self> {
        let fan = Self::unchecked(dim, rays, cones);
        let report = validate_fan(&fan);
        if !report.is_valid() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.message.clone()).collect();
            return Err(Error::InvalidFan(msgs.join("; ")));
        }
        Ok(fan)
    }

    /// Builds a fan without validation; use [`validate_fan`] to inspect it.
    pub fn unchecked(dim: usize, rays: Vec<Vec<BigInt>>, cones: Vec<Vec<usize>>) -> Self {
        Fan { dim, rays, cones: cones.into_iter().map(Cone::new).collect() }
    }

    pub fn from_i64(dim: usize, rays: &[&[i64]], cones: Vec<Vec<usize>>) -> Result<Self> {
        let rays = rays.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::new(dim, rays, cones)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[BigInt] {
        &self.rays[i]
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// Index of the ray with generator `v`, if any.
    pub fn ray_index(&self, v: &[BigInt]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }

    /// Generator matrix of a cone over the rationals (one row per ray).
    pub fn cone_matrix(&self, cone: &Cone) -> ExactMatrix {
        let rows: Vec<Vec<BigInt>> = cone.rays().iter().map(|&i| self.rays[i].clone()).collect();
        ExactMatrix::from_int_rows(Field::Rational, self.dim, &rows).expect("rational entries")
    }

    /// Inverse of the generator matrix of a full-dimensional simplicial cone.
    /// Column `k` is the dual functional that is 1 on the `k`-th generator.
    fn cone_inverse(&self, cone: &Cone) -> Option<ExactMatrix> {
        if cone.len() != self.dim {
            return None;
        }
        self.cone_matrix(cone).inverse()
    }

    /// Same fan with rays renumbered: new ray `k` is old ray `order[k]`.
    pub fn permute_rays(&self, order: &[usize]) -> Result<Fan> {
        let mut inverse = vec![usize::MAX; self.rays.len()];
        if order.len() != self.rays.len() {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        for (new, &old) in order.iter().enumerate() {
            if old >= self.rays.len() || inverse[old] != usize::MAX {
                return Err(Error::DimensionMismatch("not a permutation".into()));
            }
            inverse[old] = new;
        }
        let rays = order.iter().map(|&o| self.rays[o].clone()).collect();
        let cones = self
            .cones
            .iter()
            .map(|c| Cone::new(c.rays().iter().map(|&i| inverse[i]).collect()))
            .collect();
        Ok(Fan { dim: self.dim, rays, cones })
    }

    /// Cones as sets of ray vectors, for comparisons independent of ray numbering.
    pub fn canonical_cone_set(&self) -> BTreeSet<Vec<Vec<BigInt>>> {
        self.cones
            .iter()
            .map(|c| {
                let mut v: Vec<Vec<BigInt>> = c.rays().iter().map(|&i| self.rays[i].clone()).collect();
                v.sort();
                v
            })
            .collect()
    }

    pub fn canonical_ray_set(&self) -> BTreeSet<Vec<BigInt>> {
        self.rays.iter().cloned().collect()
    }
}

fn to_q(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn q_dot(a: &[BigRational], b: &[BigInt]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * BigRational::from_integer(y.clone())).sum()
}

fn column(m: &ExactMatrix, k: usize) -> Vec<BigRational> {
    (0..m.nrows())
        .map(|i| m.get(i, k).as_rational().expect("rational").clone())
        .collect()
}

/// Checks primitivity, distinctness, simpliciality and pairwise face-to-face intersections.
pub fn validate_fan(f: &Fan) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen: HashMap<&[BigInt], usize> = HashMap::new();
    for (i, r) in f.rays.iter().enumerate() {
        let name = format_vector(r);
        if r.len() != f.dim {
            report.push(
                ViolationKind::WrongDimension,
                format!("ray {} {name} has {} coordinates, expected {}", i + 1, r.len(), f.dim),
            );
            continue;
        }
        if r.iter().all(|x| x.is_zero()) {
            report.push(ViolationKind::ZeroRay, format!("ray {} is zero", i + 1));
            continue;
        }
        if !is_primitive(r) {
            report.push(
                ViolationKind::NonPrimitiveRay,
                format!("ray {} {name} is not primitive", i + 1),
            );
        }
        if let Some(j) = seen.insert(r.as_slice(), i) {
            report.push(
                ViolationKind::DuplicateRay,
                format!("duplicate ray {name} (rays {} and {})", j + 1, i + 1),
            );
        }
    }
    if !report.is_valid() {
        return report;
    }
    let mut cone_seen: HashMap<&Cone, usize> = HashMap::new();
    let mut simplicial = vec![false; f.cones.len()];
    for (ci, c) in f.cones.iter().enumerate() {
        if c.is_empty() {
            report.push(ViolationKind::EmptyCone, format!("cone {} is empty", ci + 1));
            continue;
        }
        if let Some(&bad) = c.rays().iter().find(|&&i| i >= f.rays.len()) {
            report.push(ViolationKind::BadIndex, format!("cone {} uses unknown ray index {bad}", ci + 1));
            continue;
        }
        if let Some(j) = cone_seen.insert(c, ci) {
            report.push(
                ViolationKind::DuplicateCone,
                format!("cone {} repeats cone {}", ci + 1, j + 1),
            );
            continue;
        }
        if f.cone_matrix(c).rank() != c.len() {
            report.push(
                ViolationKind::NotSimplicial,
                format!("{c} is not simplicial (generators are dependent, so it may also fail strong convexity)"),
            );
            continue;
        }
        simplicial[ci] = true;
    }
    let inverses: Vec<Option<ExactMatrix>> =
        f.cones.iter().map(|c| f.cone_inverse(c)).collect();
    let small = SmallData::new(f, &inverses);
    for a in 0..f.cones.len() {
        if !simplicial[a] {
            continue;
        }
        for b in a + 1..f.cones.len() {
            if !simplicial[b] {
                continue;
            }
            if !small.separated(f, a, b) && !meet_in_common_face(f, a, b, &inverses) {
                report.push(
                    ViolationKind::IntersectionNotFace,
                    format!(
                        "intersection not a face: {} and {}",
                        f.cones[a], f.cones[b]
                    ),
                );
            }
        }
    }
    report
}

/// Machine-integer copies of the rays and of unimodular dual bases, for quick separation checks.
struct SmallData {
    rays: Option<Vec<Vec<i64>>>,
    /// Per cone, the dual functionals (columns of the inverse) when they are integral.
    duals: Vec<Option<Vec<Vec<i64>>>>,
}

impl SmallData {
    fn new(f: &Fan, inverses: &[Option<ExactMatrix>]) -> Self {
        let rays = f
            .rays
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().filter(|v| v.abs() < 1 << 20)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>();
        let duals = inverses
            .iter()
            .map(|inv| {
                let inv = inv.as_ref()?;
                (0..inv.ncols())
                    .map(|k| {
                        (0..inv.nrows())
                            .map(|i| {
                                let q = inv.get(i, k).as_rational()?;
                                if q.is_integer() {
                                    q.to_integer().to_i64().filter(|v| v.abs() < 1 << 20)
                                } else {
                                    None
                                }
                            })
                            .collect::<Option<Vec<i64>>>()
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect();
        SmallData { rays, duals }
    }

    /// Exact check of the dual-basis candidates in machine integers; `false` means undecided.
    fn separated(&self, f: &Fan, a: usize, b: usize) -> bool {
        let (Some(rays), Some(da), Some(db)) = (&self.rays, &self.duals[a], &self.duals[b]) else {
            return false;
        };
        let (sa, sb) = (&f.cones[a], &f.cones[b]);
        let sum = |duals: &Vec<Vec<i64>>, own: &Cone, other: &Cone| {
            let mut u = vec![0i128; f.dim];
            for (k, &i) in own.rays().iter().enumerate() {
                if !other.contains(i) {
                    for (x, y) in u.iter_mut().zip(&duals[k]) {
                        *x += *y as i128;
                    }
                }
            }
            u
        };
        let ua = sum(da, sa, sb);
        let ub = sum(db, sb, sa);
        let dot = |u: &[i128], v: &[i64]| u.iter().zip(v).map(|(x, y)| x * (*y as i128)).sum::<i128>();
        for (p, q) in [(1i128, 0i128), (0, 1), (1, 1), (2, 1), (1, 2)] {
            let u: Vec<i128> = ua.iter().zip(&ub).map(|(x, y)| p * x - q * y).collect();
            let pos = sa.rays().iter().filter(|i| !sb.contains(**i)).all(|&i| dot(&u, &rays[i]) > 0);
            let neg = sb.rays().iter().filter(|i| !sa.contains(**i)).all(|&i| dot(&u, &rays[i]) < 0);
            if pos && neg {
                return true;
            }
        }
        // u = sum of alpha_k times the duals of the rays of `a` not in `b`; then u vanishes on
        // the shared rays and the conditions are alpha > 0 and u < 0 on the rest of `b`.
        let ks: Vec<usize> = (0..sa.len()).filter(|&k| !sb.contains(sa.rays()[k])).collect();
        let mut rows: Vec<Vec<i128>> = ks
            .iter()
            .enumerate()
            .map(|(t, _)| (0..ks.len()).map(|s| i128::from(s == t)).collect())
            .collect();
        for &j in sb.rays().iter().filter(|i| !sa.contains(**i)) {
            rows.push(ks.iter().map(|&k| -da[k].iter().zip(&rays[j]).map(|(x, y)| (*x as i128) * (*y as i128)).sum::<i128>()).collect());
        }
        let mut alpha = vec![1i128; ks.len()];
        for _ in 0..4000 {
            let Some(row) = rows.iter().find(|r| r.iter().zip(&alpha).map(|(x, y)| x * y).sum::<i128>() <= 0) else {
                return true;
            };
            for (x, y) in alpha.iter_mut().zip(row) {
                *x += y;
            }
            if alpha.iter().any(|x| x.abs() > 1 << 40) {
                return false;
            }
        }
        false
    }
}

/// Two simplicial cones meet in the cone on their shared rays iff some linear form vanishes on
/// the shared rays, is positive on the rest of the first cone and negative on the rest of the second.
fn meet_in_common_face(f: &Fan, a: usize, b: usize, inverses: &[Option<ExactMatrix>]) -> bool {
    let (sa, sb) = (&f.cones[a], &f.cones[b]);
    let shared: Vec<usize> = sa.rays().iter().copied().filter(|&i| sb.contains(i)).collect();
    let only_a: Vec<usize> = sa.rays().iter().copied().filter(|&i| !sb.contains(i)).collect();
    let only_b: Vec<usize> = sb.rays().iter().copied().filter(|&i| !sa.contains(i)).collect();
    // cheap candidates from the dual bases: both vanish on the shared rays
    let try_candidate = |u: &[BigRational]| {
        only_a.iter().all(|&i| q_dot(u, &f.rays[i]).is_positive())
            && only_b.iter().all(|&i| q_dot(u, &f.rays[i]).is_negative())
    };
    let dual_sum = |inv: &ExactMatrix, own: &Cone, other: &Cone| {
        let mut u = vec![BigRational::zero(); f.dim];
        for (k, &i) in own.rays().iter().enumerate() {
            if !other.contains(i) {
                for (x, y) in u.iter_mut().zip(column(inv, k)) {
                    *x += y;
                }
            }
        }
        u
    };
    if let (Some(ia), Some(ib)) = (&inverses[a], &inverses[b]) {
        let ua = dual_sum(ia, sa, sb);
        let ub = dual_sum(ib, sb, sa);
        let halves = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)];
        for (p, q) in halves {
            let (p, q) = (BigRational::from_integer(p.into()), BigRational::from_integer(q.into()));
            let u: Vec<BigRational> = ua.iter().zip(&ub).map(|(x, y)| &p * x - &q * y).collect();
            if try_candidate(&u) {
                return true;
            }
        }
    }
    let eqs: Vec<Vec<BigRational>> = shared.iter().map(|&i| to_q(&f.rays[i])).collect();
    let mut strict: Vec<Vec<BigRational>> = only_a.iter().map(|&i| to_q(&f.rays[i])).collect();
    strict.extend(only_b.iter().map(|&i| to_q(&f.rays[i]).into_iter().map(|x| -x).collect()));
    find_strict_solution_guided(&eqs, &strict, f.dim).is_some()
}

/// Result of [`is_smooth`]: the first maximal cone that is not unimodular, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessResult {
    pub smooth: bool,
    pub witness: Option<Cone>,
}

/// Every maximal cone's generators have all elementary divisors equal to 1.
pub fn is_smooth(f: &Fan) -> SmoothnessResult {
    for c in &f.cones {
        let rows: Vec<Vec<BigInt>> = c.rays().iter().map(|&i| f.rays[i].clone()).collect();
        let divs = elementary_divisors(&rows, f.dim);
        if divs.len() != c.len() || divs.iter().any(|d| !d.is_one()) {
            return SmoothnessResult { smooth: false, witness: Some(c.clone()) };
        }
    }
    SmoothnessResult { smooth: true, witness: None }
}

fn require_simplicial(f: &Fan) -> Result<()> {
    for c in &f.cones {
        if f.cone_matrix(c).rank() != c.len() {
            return Err(Error::InvalidFan(format!("{c} is not simplicial")));
        }
    }
    Ok(())
}

/// Walls of a pure fan: each `(dim-1)`-subset of a maximal cone with the cones containing it.
fn walls(f: &Fan) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, c) in f.cones.iter().enumerate() {
        for skip in 0..c.len() {
            let wall: Vec<usize> =
                c.rays().iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
            map.entry(wall).or_default().push(ci);
        }
    }
    map
}

/// Wall criterion: pure of full dimension, every wall in exactly two maximal cones,
/// and the wall graph connected. Valid for simplicial fans only.
pub fn is_complete(f: &Fan) -> Result<bool> {
    require_simplicial(f)?;
    if f.cones.is_empty() || f.cones.iter().any(|c| c.len() != f.dim) {
        return Ok(false);
    }
    let walls = walls(f);
    let mut adj = vec![Vec::new(); f.cones.len()];
    for owners in walls.values() {
        if owners.len() != 2 {
            return Ok(false);
        }
        adj[owners[0]].push(owners[1]);
        adj[owners[1]].push(owners[0]);
    }
    let mut seen = vec![false; f.cones.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(c) = queue.pop_front() {
        for &n in &adj[c] {
            if !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    Ok(seen.into_iter().all(|s| s))
}

/// Result of [`is_projective`]; the witness assigns one value per ray and is strictly convex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivityResult {
    pub projective: bool,
    pub support_values: Option<Vec<BigRational>>,
}

/// One row per wall: the linear extension from one side, evaluated at the opposite ray of the
/// other side, minus that ray's value. Strict convexity asks all rows to be positive.
fn wall_inequalities(f: &Fan) -> Vec<Vec<BigRational>> {
    let inverses: Vec<ExactMatrix> = f
        .cones
        .iter()
        .map(|c| f.cone_inverse(c).expect("complete simplicial fan"))
        .collect();
    let mut rows = Vec::new();
    for (wall, owners) in walls(f) {
        let (s, t) = (owners[0], owners[1]);
        let b = *f.cones[t].rays().iter().find(|i| !wall.contains(i)).expect("opposite ray");
        let inv = &inverses[s];
        let mut row = vec![BigRational::zero(); f.rays.len()];
        for (k, &i) in f.cones[s].rays().iter().enumerate() {
            row[i] = q_dot(&column(inv, k), &f.rays[b]);
        }
        row[b] -= BigRational::one();
        rows.push(row);
    }
    rows
}

/// Decides existence of a strictly convex piecewise-linear support function by exact LP.
pub fn is_projective(f: &Fan) -> Result<ProjectivityResult> {
    if !is_complete(f)? {
        return Err(Error::Precondition("projectivity is decided for complete fans only".into()));
    }
    let rows = wall_inequalities(f);
    let sol = find_strict_solution_guided(&[], &rows, f.rays.len());
    Ok(ProjectivityResult { projective: sol.is_some(), support_values: sol })
}

/// Checks a support-function witness against every wall inequality.
pub fn verify_support_function(f: &Fan, values: &[BigRational]) -> bool {
    wall_inequalities(f)
        .iter()
        .all(|row| row.iter().zip(values).map(|(a, b)| a * b).sum::<BigRational>().is_positive())
}

/// The minimal cone containing `v` together with the coefficients of `v` in its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainingCone {
    pub cone: Cone,
    pub coefficients: Vec<BigRational>,
}

pub fn minimal_containing_cone(f: &Fan, v: &[BigInt]) -> Result<ContainingCone> {
    if v.len() != f.dim {
        return Err(Error::DimensionMismatch(format!("vector of length {} in dimension {}", v.len(), f.dim)));
    }
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::ZeroVector);
    }
    for c in &f.cones {
        let coeffs: Option<Vec<BigRational>> = match f.cone_inverse(c) {
            Some(inv) => Some((0..c.len()).map(|k| q_dot(&column(&inv, k), v)).collect()),
            None => {
                let m = f.cone_matrix(c).transpose();
                let target: Vec<Scalar> = v.iter().map(|x| Field::Rational.from_int(x)).collect();
                m.solve(&target).map(|x| {
                    x.into_iter().map(|s| s.as_rational().expect("rational").clone()).collect()
                })
            }
        };
        let Some(coeffs) = coeffs else { continue };
        if coeffs.iter().any(|x| x.is_negative()) {
            continue;
        }
        let mut rays = Vec::new();
        let mut kept = Vec::new();
        for (k, x) in coeffs.into_iter().enumerate() {
            if x.is_positive() {
                rays.push(c.rays()[k]);
                kept.push(x);
            }
        }
        return Ok(ContainingCone { cone: Cone(rays), coefficients: kept });
    }
    Err(Error::NotInSupport(format_vector(v)))
}

/// Stellar subdivision along the ray through `v`; the new ray is appended last.
pub fn stellar_subdivide(f: &Fan, v: &[BigInt]) -> Result<Fan> {
    let v = primitive(v)?;
    if f.ray_index(&v).is_some() {
        return Err(Error::AlreadyARay(format_vector(&v)));
    }
    let tau = minimal_containing_cone(f, &v)?.cone;
    let new = f.rays.len();
    let mut cones = Vec::new();
    for c in &f.cones {
        if tau.rays().iter().all(|&i| c.contains(i)) {
            for &drop in tau.rays() {
                let mut rays: Vec<usize> = c.rays().iter().copied().filter(|&i| i != drop).collect();
                rays.push(new);
                cones.push(rays);
            }
        } else {
            cones.push(c.rays().to_vec());
        }
    }
    let mut rays = f.rays.clone();
    rays.push(v);
    Fan::new(f.dim, rays, cones)
}

/// Evidence that `v` is the sum of the generators of its minimal containing cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCertificate {
    pub vector: Vec<BigInt>,
    pub cone: Cone,
    pub coefficients: Vec<BigInt>,
}

impl StarCertificate {
    pub fn holds(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_one())
    }
}

pub fn star_certificate(f: &Fan, v: &[BigInt]) -> Result<StarCertificate> {
    let cc = minimal_containing_cone(f, v)?;
    let coefficients = cc
        .coefficients
        .iter()
        .map(|x| if x.is_integer() { x.to_integer() } else { BigInt::zero() })
        .collect();
    Ok(StarCertificate { vector: v.to_vec(), cone: cc.cone, coefficients })
}

pub fn is_smooth_star_point(f: &Fan, v: &[BigInt]) -> Result<bool> {
    Ok(star_certificate(f, v)?.holds())
}

/// Barycentric subdivision: one ray per nonempty face of a maximal cone (ordered by size, then
/// lexicographically), one maximal cone per complete flag of faces.
pub fn barycentric_subdivision(f: &Fan) -> Result<Fan> {
    require_simplicial(f)?;
    let mut faces: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for c in &f.cones {
        let k = c.len();
        for mask in 1u64..(1u64 << k) {
            let face: Vec<usize> =
                (0..k).filter(|b| mask >> b & 1 == 1).map(|b| c.rays()[b]).collect();
            faces.insert((face.len(), face));
        }
    }
    let faces: Vec<Vec<usize>> = faces.into_iter().map(|(_, f)| f).collect();
    let index: HashMap<&Vec<usize>, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let rays: Vec<Vec<BigInt>> = faces
        .iter()
        .map(|face| {
            let mut s = vec![BigInt::zero(); f.dim];
            for &i in face {
                for (a, b) in s.iter_mut().zip(&f.rays[i]) {
                    *a += b;
                }
            }
            primitive(&s)
        })
        .collect::<Result<_>>()?;
    let mut cones = Vec::new();
    for c in &f.cones {
        for perm in permutations(c.rays()) {
            let mut chain = Vec::new();
            let mut prefix = Vec::new();
            for &i in &perm {
                prefix.push(i);
                let mut key = prefix.clone();
                key.sort_unstable();
                chain.push(index[&key]);
            }
            cones.push(chain);
        }
    }
    Fan::new(f.dim, rays, cones)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

/// Embeds a smooth complete fan as the last-coordinate-zero hyperplane one dimension up and
/// cones every maximal cone over `(1,...,1)` and over `(1,...,1,-1)`.
pub fn extend_fan_theorem14(f: &Fan) -> Result<Fan> {
    if !is_smooth(f).smooth {
        return Err(Error::Precondition("extension requires a smooth fan".into()));
    }
    if !is_complete(f)? {
        return Err(Error::Precondition("extension requires a complete fan".into()));
    }
    let d = f.dim + 1;
    let mut rays: Vec<Vec<BigInt>> = f
        .rays
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(BigInt::zero());
            v
        })
        .collect();
    let n = rays.len();
    rays.push(vec![BigInt::one(); d]);
    let mut down = vec![BigInt::one(); d];
    down[d - 1] = -BigInt::one();
    rays.push(down);
    let mut cones = Vec::new();
    for c in &f.cones {
        for apex in [n, n + 1] {
            let mut v = c.rays().to_vec();
            v.push(apex);
            cones.push(v);
        }
    }
    Fan::new(d, rays, cones)
}

fn unit(d: usize, i: usize, sign: i64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); d];
    v[i] = BigInt::from(sign);
    v
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n, k)
}

/// Fan of `P^d`: rays `e_1..e_d, -(e_1+...+e_d)`, cones on all `d`-subsets.
pub fn projective_space_fan(d: usize) -> Result<Fan> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    let mut rays: Vec<Vec<BigInt>> = (0..d).map(|i| unit(d, i, 1)).collect();
    rays.push(vec![-BigInt::one(); d]);
    Fan::new(d, rays, subsets(d + 1, d))
}

/// Fan of `(P^1)^d`: rays `e_1..e_d` then `-e_1..-e_d`.
pub fn product_p1_fan(d: usize) -> Result<Fan> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    let mut rays: Vec<Vec<BigInt>> = (0..d).map(|i| unit(d, i, 1)).collect();
    rays.extend((0..d).map(|i| unit(d, i, -1)));
    let cones = (0u64..(1u64 << d))
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { i + d } else { i }).collect())
        .collect();
    Fan::new(d, rays, cones)
}

/// Smooth projective toric surface with `n >= 4` rays, obtained from `P^1 x P^1` by repeatedly
/// blowing up the fixed points in the first quadrant, one round of adjacent pairs at a time.
/// Rays: `(1,0), (0,1)`, the blowup rays in order of creation, then `(-1,0), (0,-1)`.
pub fn surface_fan(n: usize) -> Result<Fan> {
    if n < 4 {
        return Err(Error::Precondition("a complete smooth surface fan needs at least 4 rays".into()));
    }
    let mut fan = product_p1_fan(2)?;
    // quadrant boundary, ordered from (0,1) towards (1,0)
    let mut chain: Vec<Vec<BigInt>> = vec![fan.rays[1].clone(), fan.rays[0].clone()];
    'outer: while fan.n_rays() < n {
        let mut next = vec![chain[0].clone()];
        for w in chain.windows(2) {
            if fan.n_rays() == n {
                break 'outer;
            }
            let s: Vec<BigInt> = w[0].iter().zip(&w[1]).map(|(a, b)| a + b).collect();
            fan = stellar_subdivide(&fan, &s)?;
            next.push(s);
            next.push(w[1].clone());
        }
        chain = next;
    }
    let mut order: Vec<usize> = vec![0, 1];
    order.extend(4..fan.n_rays());
    order.extend([2, 3]);
    fan.permute_rays(&order)
}

/// The 11-ray surface fan: `P^1 x P^1` blown up at one fixed point, then at the two fixed
/// points of the exceptional curve, then at the four new fixed points.
pub fn example_1_5_fan() -> Result<Fan> {
    surface_fan(11)
}

/// Ray generators `v_1..v_14` of the threefold sequence (the first four give `P^3`).
pub fn example_4_2_vectors() -> Vec<Vec<BigInt>> {
    const V: [[i64; 3]; 14] = [
        [0, 0, 1],
        [0, 1, 0],
        [1, 1, 1],
        [-1, -2, -2],
        [1, 1, 2],
        [0, -1, 1],
        [1, 0, 1],
        [1, -1, 1],
        [-1, -2, -1],
        [-1, -1, 0],
        [-1, -1, 1],
        [-1, 0, 1],
        [-1, 1, 1],
        [0, 1, 1],
    ];
    V.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// A chain of stellar subdivisions with one smooth-star-point certificate per step.
#[derive(Clone, Debug)]
pub struct BlowupSequence {
    pub fans: Vec<Fan>,
    pub certificates: Vec<StarCertificate>,
}

impl BlowupSequence {
    pub fn last(&self) -> &Fan {
        self.fans.last().expect("nonempty sequence")
    }
}

/// The eleven fans `Sigma_4, ..., Sigma_14` of the threefold example.
pub fn example_4_2_sequence() -> Result<BlowupSequence> {
    let v = example_4_2_vectors();
    let base = Fan::new(3, v[..4].to_vec(), subsets(4, 3))?;
    let mut fans = vec![base];
    let mut certificates = Vec::new();
    for vi in &v[4..] {
        let prev = fans.last().expect("base fan");
        certificates.push(star_certificate(prev, vi)?);
        fans.push(stellar_subdivide(prev, vi)?);
    }
    Ok(BlowupSequence { fans, certificates })
}

/// The final 14-ray fan of the threefold example.
pub fn example_4_2_fan() -> Result<Fan> {
    Ok(example_4_2_sequence()?.fans.pop().expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::to_big;

    fn p2() -> Fan {
        projective_space_fan(2).unwrap()
    }

    #[test]
    fn p2_is_valid_smooth_complete_projective() {
        let f = p2();
        assert!(validate_fan(&f).is_valid());
        assert!(is_smooth(&f).smooth);
        assert!(is_complete(&f).unwrap());
        let p = is_projective(&f).unwrap();
        assert!(p.projective);
        assert!(verify_support_function(&f, p.support_values.as_ref().unwrap()));
        let hand = vec![BigRational::zero(), BigRational::zero(), -BigRational::one()];
        assert!(verify_support_function(&f, &hand));
    }

    #[test]
    fn duplicate_ray_is_reported() {
        let f = Fan::unchecked(2, vec![to_big(&[1, 0]), to_big(&[1, 0]), to_big(&[0, 1])], vec![vec![0, 2]]);
        let r = validate_fan(&f);
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::DuplicateRay));
        assert!(r.violations[0].message.contains("duplicate ray"));
    }

    #[test]
    fn overlapping_cones_are_reported() {
        let rays = vec![to_big(&[1, 0]), to_big(&[1, 2]), to_big(&[1, 1]), to_big(&[0, 1])];
        let f = Fan::unchecked(2, rays, vec![vec![0, 1], vec![2, 3]]);
        let r = validate_fan(&f);
        assert!(r.violations.iter().any(|v| v.message.contains("intersection not a face")));
        // the witness point lies in both interiors
        let c1 = Fan::unchecked(2, vec![to_big(&[1, 0]), to_big(&[1, 2])], vec![vec![0, 1]]);
        let c2 = Fan::unchecked(2, vec![to_big(&[1, 1]), to_big(&[0, 1])], vec![vec![0, 1]]);
        let w = to_big(&[2, 3]);
        for f in [c1, c2] {
            let cc = minimal_containing_cone(&f, &w).unwrap();
            assert_eq!(cc.cone.len(), 2);
        }
    }

    #[test]
    fn non_smooth_cone_witness() {
        let rays = vec![to_big(&[1, 0]), to_big(&[1, 2])];
        let f = Fan::new(2, rays, vec![vec![0, 1]]).unwrap();
        let s = is_smooth(&f);
        assert!(!s.smooth);
        assert_eq!(s.witness, Some(Cone::new(vec![0, 1])));
    }

    #[test]
    fn incomplete_after_deleting_a_cone() {
        let f = p2();
        let g = Fan::new(2, f.rays().to_vec(), f.cones()[1..].iter().map(|c| c.rays().to_vec()).collect())
            .unwrap();
        assert!(!is_complete(&g).unwrap());
        assert!(is_projective(&g).is_err());
    }

    #[test]
    fn p1_squared_is_projective() {
        let f = product_p1_fan(2).unwrap();
        assert!(is_complete(&f).unwrap());
        assert!(is_projective(&f).unwrap().projective);
    }

    #[test]
    fn containing_cone_examples() {
        let p3 = Fan::new(3, example_4_2_vectors()[..4].to_vec(), subsets(4, 3)).unwrap();
        let cc = minimal_containing_cone(&p3, &to_big(&[1, 1, 2])).unwrap();
        assert_eq!(cc.cone, Cone::new(vec![0, 2]));
        assert!(cc.coefficients.iter().all(|c| c.is_one()));
        let cc = minimal_containing_cone(&p3, &to_big(&[0, 0, 1])).unwrap();
        assert_eq!(cc.cone, Cone::new(vec![0]));
        let seq = example_4_2_sequence().unwrap();
        let s5 = &seq.fans[1];
        let cc = minimal_containing_cone(s5, &to_big(&[0, -1, 1])).unwrap();
        assert_eq!(cc.cone, Cone::new(vec![0, 3, 4]));
        assert!(cc.coefficients.iter().all(|c| c.is_one()));
    }

    #[test]
    fn stellar_examples() {
        let f = stellar_subdivide(&p2(), &to_big(&[1, 1])).unwrap();
        assert_eq!(f.n_rays(), 4);
        assert_eq!(f.cones().len(), 4);
        assert!(is_smooth(&f).smooth && is_complete(&f).unwrap());
        assert!(matches!(stellar_subdivide(&p2(), &to_big(&[1, 0])), Err(Error::AlreadyARay(_))));
    }

    #[test]
    fn star_point_examples() {
        assert!(!is_smooth_star_point(&p2(), &to_big(&[2, 1])).unwrap());
        let pp = product_p1_fan(2).unwrap();
        assert!(is_smooth_star_point(&pp, &to_big(&[-1, 1])).unwrap());
    }

    #[test]
    fn example_fans() {
        let f = example_1_5_fan().unwrap();
        let expected: Vec<Vec<BigInt>> = [
            [1, 0], [0, 1], [1, 1], [1, 2], [2, 1], [1, 3], [2, 3], [3, 2], [3, 1], [-1, 0], [0, -1],
        ]
        .iter()
        .map(|r| to_big(r))
        .collect();
        assert_eq!(f.rays(), expected.as_slice());
        assert!(is_smooth(&f).smooth && is_complete(&f).unwrap());
        let seq = example_4_2_sequence().unwrap();
        assert_eq!(seq.fans.len(), 11);
        assert!(seq.certificates.iter().all(|c| c.holds()));
        assert_eq!(seq.last().n_rays(), 14);
    }

    #[test]
    fn barycentric_counts() {
        let p1 = projective_space_fan(1).unwrap();
        assert_eq!(barycentric_subdivision(&p1).unwrap().n_rays(), 2);
        let b2 = barycentric_subdivision(&p2()).unwrap();
        assert_eq!((b2.n_rays(), b2.cones().len()), (6, 6));
        let b3 = barycentric_subdivision(&projective_space_fan(3).unwrap()).unwrap();
        assert_eq!((b3.n_rays(), b3.cones().len()), (14, 24));
        assert!(is_smooth(&b3).smooth && is_complete(&b3).unwrap());
    }

    #[test]
    fn extension_of_p1() {
        let f = extend_fan_theorem14(&projective_space_fan(1).unwrap()).unwrap();
        assert_eq!(f.n_rays(), 4);
        assert!(is_smooth(&f).smooth && is_complete(&f).unwrap());
        let want: BTreeSet<Vec<BigInt>> =
            [[1, 0], [-1, 0], [1, 1], [1, -1]].iter().map(|r| to_big(r)).collect();
        assert_eq!(f.canonical_ray_set(), want);
    }

    #[test]
    fn projective_space_rays_sum_to_zero() {
        let f = projective_space_fan(3).unwrap();
        assert_eq!(f.n_rays(), 4);
        let mut s = vec![BigInt::zero(); 3];
        for r in f.rays() {
            for (a, b) in s.iter_mut().zip(r) {
                *a += b;
            }
        }
        assert!(s.iter().all(|x| x.is_zero()));
    }
}
