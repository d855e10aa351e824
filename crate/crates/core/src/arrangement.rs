//! Linear subspace arrangements in `P_F` coming from bundles, and predicates on point sets.
//!
//! The locus of a subspace `F_j ⊂ F = k^r` is `P(ann F_j)` inside the dual space `k^r`, so a
//! hyperplane `F_j` gives a point and a line `F_j` gives a hyperplane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fan::{barycentric_subdivision, combinations, projective_space_fan, surface_fan, Fan};
use crate::klyachko::{standard_bundle, RayFiltration, Subspace, ToricVectorBundle};
use crate::lattice::{ExactMatrix, Field, Scalar};
use crate::poly::{monomials_of_degree, Polynomial};

/// One distinct nonzero subspace together with the rays that carry it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub subspace: Subspace,
    pub rays: Vec<usize>,
}

impl Member {
    /// `ann F_j`, whose projectivization is the locus in `P_F`.
    pub fn locus(&self) -> Subspace {
        self.subspace.annihilator()
    }

    /// Projective dimension of the locus.
    pub fn locus_dim(&self) -> usize {
        self.subspace.ambient() - self.subspace.dim() - 1
    }

    /// Codimension-one loci are hyperplanes; they are carried along but are not blown up.
    pub fn is_hyperplane(&self) -> bool {
        self.subspace.dim() == 1
    }

    pub fn is_point(&self) -> bool {
        self.subspace.dim() + 1 == self.subspace.ambient()
    }

    pub fn multiplicity(&self) -> usize {
        self.rays.len().max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    field: Field,
    rank: usize,
    members: Vec<Member>,
    zero_rays: Vec<usize>,
}

impl Arrangement {
    pub fn from_bundle(b: &ToricVectorBundle) -> Self {
        let mut members: Vec<Member> = Vec::new();
        let mut zero_rays = Vec::new();
        for (j, f) in b.filtrations().iter().enumerate() {
            if f.subspace.is_zero() {
                zero_rays.push(j);
                continue;
            }
            match members.iter_mut().find(|m| m.subspace == f.subspace) {
                Some(m) => m.rays.push(j),
                None => members.push(Member { subspace: f.subspace.clone(), rays: vec![j] }),
            }
        }
        Arrangement { field: b.field(), rank: b.rank(), members, zero_rays }
    }

    /// Arrangement of distinct points `[p] ∈ P_F`, given by coordinates in the dual space.
    pub fn from_points(field: Field, rank: usize, points: &[Vec<Scalar>]) -> Result<Self> {
        let mut members: Vec<Member> = Vec::new();
        for p in points {
            let line = Subspace::span(field, rank, vec![p.clone()])?;
            if line.is_zero() {
                return Err(Error::ZeroVector);
            }
            let subspace = line.annihilator();
            if !members.iter().any(|m| m.subspace == subspace) {
                members.push(Member { subspace, rays: Vec::new() });
            }
        }
        Ok(Arrangement { field, rank, members, zero_rays: Vec::new() })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn zero_rays(&self) -> &[usize] {
        &self.zero_rays
    }

    /// The centers `S`: members of codimension at least two.
    pub fn centers(&self) -> Vec<&Member> {
        self.members.iter().filter(|m| !m.is_hyperplane()).collect()
    }

    pub fn hyperplanes(&self) -> Vec<&Member> {
        self.members.iter().filter(|m| m.is_hyperplane()).collect()
    }

    pub fn has_repetitions(&self) -> bool {
        self.members.iter().any(|m| m.rays.len() > 1)
    }

    /// Coordinates of the centers when every center is a point.
    pub fn points(&self) -> Option<Vec<Vec<Scalar>>> {
        let centers = self.centers();
        if centers.iter().all(|m| m.is_point()) {
            Some(centers.iter().map(|m| m.locus().basis_rows().remove(0)).collect())
        } else {
            None
        }
    }

    pub fn position_report(&self) -> Result<PositionReport> {
        let pts = self
            .points()
            .ok_or_else(|| Error::OutOfScope("position predicates need a point arrangement".into()))?;
        position_report(self.field, self.rank, &pts)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetElement {
    pub locus: Subspace,
    pub projective_dim: usize,
}

/// All nonempty intersections of centers, listed in blowup order (ascending dimension).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPoset {
    pub elements: Vec<PosetElement>,
}

impl IntersectionPoset {
    pub fn contains(&self, locus: &Subspace) -> bool {
        self.elements.iter().any(|e| e.locus == *locus)
    }

    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            self.elements.iter().all(|b| {
                let m = a.locus.intersect(&b.locus);
                m.is_zero() || self.contains(&m)
            })
        })
    }

    /// Index pairs `(i, j)` with element `i` strictly contained in element `j`.
    pub fn inclusions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                if i != j && a.locus.dim() < b.locus.dim() && b.locus.contains(&a.locus) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn intersection_closure(a: &Arrangement) -> IntersectionPoset {
    let mut loci: Vec<Subspace> = Vec::new();
    for m in a.centers() {
        let l = m.locus();
        if !loci.contains(&l) {
            loci.push(l);
        }
    }
    let mut start = 0;
    loop {
        let mut fresh = Vec::new();
        for i in 0..loci.len() {
            for j in start.max(i + 1)..loci.len() {
                let m = loci[i].intersect(&loci[j]);
                if !m.is_zero() && !loci.contains(&m) && !fresh.contains(&m) {
                    fresh.push(m);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        start = loci.len();
        loci.extend(fresh);
    }
    let mut elements: Vec<PosetElement> = loci
        .into_iter()
        .map(|l| PosetElement { projective_dim: l.dim() - 1, locus: l })
        .collect();
    elements.sort_by_key(|e| e.projective_dim);
    IntersectionPoset { elements }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionReport {
    pub count: usize,
    pub distinct: bool,
    /// Every subset of at most `r` points is independent.
    pub general_position: bool,
    pub collinear: bool,
    pub on_rational_normal_curve: bool,
    /// A linear form vanishing on all points, when they lie in a hyperplane.
    pub hyperplane: Option<Vec<Scalar>>,
}

fn matrix(field: Field, r: usize, rows: Vec<Vec<Scalar>>) -> ExactMatrix {
    ExactMatrix::from_rows(field, r, rows).expect("points share the field")
}

fn rank_of(field: Field, r: usize, pts: &[&Vec<Scalar>]) -> usize {
    matrix(field, r, pts.iter().map(|p| (*p).clone()).collect()).rank()
}

pub fn position_report(field: Field, r: usize, points: &[Vec<Scalar>]) -> Result<PositionReport> {
    if r < 2 {
        return Err(Error::Precondition("points need a projective space of dimension at least 1".into()));
    }
    for p in points {
        if p.len() != r {
            return Err(Error::DimensionMismatch(format!("point of length {} in rank {r}", p.len())));
        }
        if p.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
    }
    let s = points.len();
    let total_rank = if s == 0 { 0 } else { matrix(field, r, points.to_vec()).rank() };
    let distinct = (0..s).all(|i| (i + 1..s).all(|j| rank_of(field, r, &[&points[i], &points[j]]) == 2));
    let hyperplane = (total_rank < r).then(|| {
        if s == 0 {
            let mut e = vec![field.zero(); r];
            e[0] = field.one();
            e
        } else {
            matrix(field, r, points.to_vec()).kernel_basis().remove(0)
        }
    });
    let general_position = distinct && in_general_position(field, r, points, total_rank);
    let collinear = total_rank <= 2;
    let on_rational_normal_curve = general_position && on_rnc(field, r, points);
    Ok(PositionReport { count: s, distinct, general_position, collinear, on_rational_normal_curve, hyperplane })
}

fn in_general_position(field: Field, r: usize, points: &[Vec<Scalar>], total_rank: usize) -> bool {
    let s = points.len();
    let k = r.min(s);
    if total_rank < k {
        return false;
    }
    combinations(s, k).iter().all(|idx| {
        let pts: Vec<&Vec<Scalar>> = idx.iter().map(|&i| &points[i]).collect();
        rank_of(field, r, &pts) == k
    })
}

/// Points in general position lie on a common rational normal curve. Beyond `r + 2` points the
/// first `r + 1` are moved to the standard frame; then `x` is on the curve through the frame and
/// `q` (the image of point `r + 2`) iff `(1,...,1)`, `1/q` and `1/x` are linearly dependent.
fn on_rnc(field: Field, r: usize, points: &[Vec<Scalar>]) -> bool {
    let s = points.len();
    if s <= r + 2 {
        return true;
    }
    let base = matrix(field, r, points[..r].to_vec()).transpose();
    let lambda = base.solve(&points[r]).expect("frame points span");
    let to_frame = |x: &[Scalar]| -> Vec<Scalar> {
        let c = base.solve(x).expect("frame points span");
        c.iter().zip(&lambda).map(|(a, l)| a * &l.inv()).collect()
    };
    let recip = |v: Vec<Scalar>| -> Option<Vec<Scalar>> {
        v.iter().map(|x| (!x.is_zero()).then(|| x.inv())).collect()
    };
    let ones = vec![field.one(); r];
    let Some(q) = recip(to_frame(&points[r + 1])) else { return false };
    points[r + 2..].iter().all(|x| match recip(to_frame(x)) {
        Some(y) => matrix(field, r, vec![ones.clone(), q.clone(), y]).rank() <= 2,
        None => false,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicPencilReport {
    /// Dimension of the space of plane cubics through the points.
    pub cubic_space_dim: usize,
    /// Basis of that space (two cubics in the pencil case).
    pub cubics: Vec<Polynomial>,
    /// The two cubics have independent gradients at every point.
    pub transverse: bool,
    pub complete_intersection: bool,
}

pub fn cubic_pencil_check(field: Field, points: &[Vec<Scalar>]) -> Result<CubicPencilReport> {
    if points.len() != 9 {
        return Err(Error::Precondition(format!("expected 9 points, got {}", points.len())));
    }
    if matches!(field.characteristic(), 2 | 3) {
        return Err(Error::Precondition("characteristic 2 and 3 are excluded".into()));
    }
    let distinct = combinations(9, 2)
        .iter()
        .all(|t| rank_of(field, 3, &[&points[t[0]], &points[t[1]]]) == 2);
    if !distinct {
        return Err(Error::Precondition("points are not pairwise distinct".into()));
    }
    let monos = monomials_of_degree(3, 3);
    let rows: Vec<Vec<Scalar>> = points
        .iter()
        .map(|p| {
            monos
                .iter()
                .map(|e| e.iter().zip(p).fold(field.one(), |acc, (&k, x)| &acc * &x.pow(k)))
                .collect()
        })
        .collect();
    let kernel = matrix(field, monos.len(), rows).kernel_basis();
    let cubics: Vec<Polynomial> = kernel
        .iter()
        .map(|c| Polynomial::from_dense(field, 3, 3, c))
        .collect::<Result<_>>()?;
    let transverse = cubics.len() == 2 && {
        let grads: Vec<Vec<Polynomial>> =
            cubics.iter().map(|f| (0..3).map(|i| f.derivative(i)).collect()).collect();
        points.iter().all(|p| {
            let rows = grads.iter().map(|g| g.iter().map(|d| d.eval(p)).collect()).collect();
            matrix(field, 3, rows).rank() == 2
        })
    };
    Ok(CubicPencilReport {
        cubic_space_dim: cubics.len(),
        complete_intersection: transverse,
        transverse,
        cubics,
    })
}

/// The nine points `(a, b, 1)` with `a, b ∈ {-1, 0, 1}`.
pub fn totaro_grid(field: Field) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    for a in -1..=1 {
        for b in -1..=1 {
            out.push(vec![field.from_i64(a), field.from_i64(b), field.one()]);
        }
    }
    out
}

fn projectively_equal(field: Field, a: &[Scalar], b: &[Scalar]) -> bool {
    matrix(field, a.len(), vec![a.to_vec(), b.to_vec()]).rank() == 1
}

/// Whether nine points of `P^2` are projectively equivalent to the grid configuration.
pub fn equivalent_to_totaro_grid(field: Field, points: &[Vec<Scalar>]) -> bool {
    if points.len() != 9 {
        return false;
    }
    let grid = totaro_grid(field);
    let Some(frame) = frame_of(field, points) else { return false };
    let src: Vec<Vec<Scalar>> = frame.iter().map(|&i| points[i].clone()).collect();
    let Some(from_src) = frame_transform(field, &src) else { return false };
    let inv_src = from_src.inverse().expect("frame transform is invertible");
    for tuple in ordered_tuples(9, 4) {
        let dst: Vec<Vec<Scalar>> = tuple.iter().map(|&i| grid[i].clone()).collect();
        let Some(from_dst) = frame_transform(field, &dst) else { continue };
        // maps src frame to the standard frame, then the standard frame to dst
        let t = from_dst.mul(&inv_src).expect("square");
        let all = points.iter().all(|p| {
            let img = t.apply(p);
            grid.iter().any(|g| projectively_equal(field, &img, g))
        });
        if all {
            return true;
        }
    }
    false
}

/// Indices of four points with no three collinear.
fn frame_of(field: Field, points: &[Vec<Scalar>]) -> Option<Vec<usize>> {
    combinations(points.len(), 4).into_iter().find(|idx| {
        combinations(4, 3).iter().all(|t| {
            let pts: Vec<&Vec<Scalar>> = t.iter().map(|&k| &points[idx[k]]).collect();
            rank_of(field, 3, &pts) == 3
        })
    })
}

/// The matrix sending `e_1, e_2, e_3, (1,1,1)` to the four given points (columns scaled).
fn frame_transform(field: Field, pts: &[Vec<Scalar>]) -> Option<ExactMatrix> {
    let cols = matrix(field, 3, pts[..3].to_vec()).transpose();
    let lambda = cols.solve(&pts[3])?;
    if lambda.iter().any(|l| l.is_zero()) || cols.rank() < 3 {
        return None;
    }
    let mut m = cols.clone();
    for i in 0..3 {
        for j in 0..3 {
            m.set(i, j, cols.get(i, j) * &lambda[j]);
        }
    }
    Some(m)
}

fn ordered_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for i in (0..n).filter(|i| !t.contains(i)) {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// A nine-point subset forming a transverse cubic pencil projectively equivalent to the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotaroWitness {
    pub indices: Vec<usize>,
    pub pencil: CubicPencilReport,
}

fn collinear_triples(field: Field, points: &[Vec<Scalar>]) -> Vec<Vec<usize>> {
    combinations(points.len(), 3)
        .into_iter()
        .filter(|t| {
            let pts: Vec<&Vec<Scalar>> = t.iter().map(|&k| &points[k]).collect();
            rank_of(field, 3, &pts) < 3
        })
        .collect()
}

/// Sorted per-point counts of collinear triples inside the subset.
fn triple_profile(triples: &[Vec<usize>], idx: &[usize]) -> Vec<usize> {
    let inside: Vec<&Vec<usize>> = triples.iter().filter(|t| t.iter().all(|i| idx.contains(i))).collect();
    let mut counts: Vec<usize> = idx.iter().map(|i| inside.iter().filter(|t| t.contains(i)).count()).collect();
    counts.sort_unstable();
    counts
}

pub fn find_totaro_subset(field: Field, points: &[Vec<Scalar>]) -> Result<Option<TotaroWitness>> {
    if matches!(field.characteristic(), 2 | 3) {
        return Err(Error::Precondition("characteristic 2 and 3 are excluded".into()));
    }
    if points.len() < 9 {
        return Ok(None);
    }
    // how many collinear triples pass through each point is a projective invariant, so subsets
    // whose counts differ from the grid's are skipped before any cubic is computed
    let triples = collinear_triples(field, points);
    let grid_profile = triple_profile(&collinear_triples(field, &totaro_grid(field)), &(0..9).collect::<Vec<_>>());
    for idx in combinations(points.len(), 9) {
        if triple_profile(&triples, &idx) != grid_profile {
            continue;
        }
        let sub: Vec<Vec<Scalar>> = idx.iter().map(|&i| points[i].clone()).collect();
        let Ok(pencil) = cubic_pencil_check(field, &sub) else { continue };
        if pencil.complete_intersection && equivalent_to_totaro_grid(field, &sub) {
            return Ok(Some(TotaroWitness { indices: idx, pencil }));
        }
    }
    Ok(None)
}

/// Subsets `I` of size `1..=r-2` of the frame `e_1, ..., e_r, (1,...,1)`, with the subspace
/// `ann(span I)` whose locus is the span of those points.
pub fn kapranov_subspaces(r: usize, field: Field) -> Result<Vec<(Vec<usize>, Subspace)>> {
    if r < 3 {
        return Err(Error::Precondition("the Kapranov arrangement needs r >= 3".into()));
    }
    let mut frame: Vec<Vec<Scalar>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect();
    frame.push(vec![field.one(); r]);
    let mut out = Vec::new();
    for k in 1..=r - 2 {
        for idx in combinations(r + 1, k) {
            let span = Subspace::span(field, r, idx.iter().map(|&i| frame[i].clone()).collect())?;
            out.push((idx, span.annihilator()));
        }
    }
    Ok(out)
}

pub fn kapranov_arrangement(r: usize, field: Field) -> Result<Arrangement> {
    Ok(Arrangement::from_bundle(&kapranov_bundle(r, field)?))
}

/// Kapranov subspaces on a smooth projective surface fan, plus two zero rays spanning a cone.
pub fn kapranov_bundle(r: usize, field: Field) -> Result<ToricVectorBundle> {
    let subs = kapranov_subspaces(r, field)?;
    let n = subs.len() + 2;
    let fan = surface_fan(n.max(4))?;
    let mut subspaces: Vec<Subspace> = subs.into_iter().map(|(_, s)| s).collect();
    while subspaces.len() < fan.n_rays() {
        subspaces.push(Subspace::zero(field, r));
    }
    standard_bundle(fan, field, r, subspaces, vec![1; n.max(4)])
}

/// Points on the bundle side of the Example 1.5 construction: nine certified-general points of
/// `P^2` as planes on the first nine rays of the 11-ray surface fan; the last two rays are zero.
pub fn example_1_5_bundle(field: Field, seed: u64) -> Result<(ToricVectorBundle, GenericityCertificate)> {
    let (points, cert) = very_general_points(3, 9, seed, field)?;
    let fan = surface_fan(11)?;
    let mut subspaces: Vec<Subspace> = points
        .iter()
        .map(|p| Ok(Subspace::span(field, 3, vec![p.clone()])?.annihilator()))
        .collect::<Result<_>>()?;
    subspaces.push(Subspace::zero(field, 3));
    subspaces.push(Subspace::zero(field, 3));
    Ok((standard_bundle(fan, field, 3, subspaces, vec![1; 11])?, cert))
}

/// The finite list of genericity conditions verified for sampled points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityCertificate {
    pub seed: u64,
    pub attempts: u32,
    pub conditions: Vec<String>,
}

const RNC_SUBSET_LIMIT: usize = 5000;

/// Pseudo-random integer points, resampled until the listed conditions hold.
pub fn very_general_points(
    r: usize,
    s: usize,
    seed: u64,
    field: Field,
) -> Result<(Vec<Vec<Scalar>>, GenericityCertificate)> {
    if r < 2 || s == 0 {
        return Err(Error::Precondition("need r >= 2 and at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let check_rnc = s >= r + 3 && combinations_count(s, r + 3) <= RNC_SUBSET_LIMIT;
    let mut conditions = vec!["points pairwise distinct".to_string()];
    if s >= 2 {
        conditions.push(format!("every {} of the points linearly independent", r.min(s)));
    }
    if check_rnc {
        conditions.push(format!(
            "no {} of the points on a rational normal curve of degree {}",
            r + 3,
            r - 1
        ));
    }
    for attempt in 1..=10_000u32 {
        let pts: Vec<Vec<Scalar>> = (0..s)
            .map(|_| (0..r).map(|_| field.from_i64(rng.gen_range(-30..=30))).collect())
            .collect();
        if pts.iter().any(|p| p.iter().all(|x| x.is_zero())) {
            continue;
        }
        let rep = position_report(field, r, &pts)?;
        if !rep.general_position {
            continue;
        }
        if check_rnc
            && combinations(s, r + 3).iter().any(|idx| {
                let sub: Vec<Vec<Scalar>> = idx.iter().map(|&i| pts[i].clone()).collect();
                on_rnc(field, r, &sub)
            })
        {
            continue;
        }
        return Ok((pts, GenericityCertificate { seed, attempts: attempt, conditions }));
    }
    Err(Error::Unavailable("could not sample points satisfying the genericity conditions".into()))
}

fn combinations_count(n: usize, k: usize) -> usize {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 - i) / (i + 1);
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

/// Ray data of the barycentric subdivision of the `P^d` fan: index sets `I` and subspaces `M_I`.
#[derive(Clone, Debug)]
pub struct LosevManin {
    pub fan: Fan,
    pub index_sets: Vec<Vec<usize>>,
    pub subspaces: Vec<Subspace>,
}

/// Rays of the barycentric fan are indexed by proper nonempty `I ⊂ {0..d}` (by size, then
/// lexicographically, matching [`barycentric_subdivision`]); `M_I` is the annihilator of
/// the span of `v_i, i ∈ I`.
pub fn losev_manin_subspaces(d: usize, field: Field) -> Result<LosevManin> {
    if d < 2 {
        return Err(Error::Precondition("need d >= 2".into()));
    }
    let pd = projective_space_fan(d)?;
    let fan = barycentric_subdivision(&pd)?;
    let mut index_sets = Vec::new();
    let mut subspaces = Vec::new();
    for k in 1..=d {
        for idx in combinations(d + 1, k) {
            let span = Subspace::span_int(field, d, &idx.iter().map(|&i| pd.ray(i).to_vec()).collect::<Vec<_>>())?;
            subspaces.push(span.annihilator());
            index_sets.push(idx);
        }
    }
    debug_assert_eq!(index_sets.len(), fan.n_rays());
    Ok(LosevManin { fan, index_sets, subspaces })
}

/// Pullback of the cotangent bundle of `P^d`: `M_I` at level 0, shift `-1`.
pub fn losev_manin_bundle(d: usize, field: Field) -> Result<ToricVectorBundle> {
    let lm = losev_manin_subspaces(d, field)?;
    let filtrations = lm
        .subspaces
        .into_iter()
        .map(|s| RayFiltration::new(s, 1, -1))
        .collect::<Result<Vec<_>>>()?;
    ToricVectorBundle::new(lm.fan, field, d, filtrations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::example_4_2_vectors;
    use crate::klyachko::cotangent_bundle;

    fn q(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Field::Rational.from_i64(x)).collect()
    }

    fn example_4_2_points(field: Field) -> Vec<Vec<Scalar>> {
        example_4_2_vectors().iter().map(|v| v.iter().map(|x| field.from_int(x)).collect()).collect()
    }

    #[test]
    fn closure_of_lines_and_point() {
        let f = Field::Rational;
        // x1, L12, L13, L23 in P^3, given by their loci
        let loci = [vec![q(&[1, 0, 0, 0])], vec![q(&[1, 0, 0, 0]), q(&[0, 1, 0, 0])], vec![q(&[1, 0, 0, 0]), q(&[0, 0, 1, 0])], vec![q(&[0, 1, 0, 0]), q(&[0, 0, 1, 0])]];
        let members = loci
            .iter()
            .map(|l| Member { subspace: Subspace::span(f, 4, l.clone()).unwrap().annihilator(), rays: vec![] })
            .collect();
        let a = Arrangement { field: f, rank: 4, members, zero_rays: vec![] };
        let p = intersection_closure(&a);
        assert_eq!(p.elements.len(), 6);
        assert!(p.is_closed());
        assert_eq!(p.elements.iter().filter(|e| e.projective_dim == 0).count(), 3);
    }

    #[test]
    fn positions() {
        let f = Field::Rational;
        let pts = vec![q(&[1, 0, 1]), q(&[0, 1, 1]), q(&[1, 1, 2]), q(&[5, 7, 1])];
        let r = position_report(f, 3, &pts).unwrap();
        assert!(!r.collinear && !r.general_position);
        let pts = vec![q(&[1, 0, 0]), q(&[0, 1, 0]), q(&[0, 0, 1]), q(&[1, 1, 1])];
        let r = position_report(f, 3, &pts).unwrap();
        assert!(r.general_position && r.on_rational_normal_curve);
    }

    #[test]
    fn conic_membership() {
        let f = Field::Rational;
        // points (1, t, t^2) lie on the conic xz = y^2
        let on: Vec<Vec<Scalar>> = (0..7).map(|t| q(&[1, t, t * t])).collect();
        assert!(position_report(f, 3, &on).unwrap().on_rational_normal_curve);
        let mut off = on[..6].to_vec();
        off.push(q(&[1, 2, 5]));
        assert!(!position_report(f, 3, &off).unwrap().on_rational_normal_curve);
    }

    #[test]
    fn totaro_subset_of_example_4_2() {
        let f = Field::Rational;
        let pts = example_4_2_points(f);
        let idx = [0, 2, 5, 6, 7, 10, 11, 12, 13];
        let sub: Vec<Vec<Scalar>> = idx.iter().map(|&i| pts[i].clone()).collect();
        let rep = cubic_pencil_check(f, &sub).unwrap();
        assert_eq!(rep.cubic_space_dim, 2);
        assert!(rep.transverse);
        assert!(equivalent_to_totaro_grid(f, &sub));
        let line: Vec<Vec<Scalar>> = (0..9).map(|t| q(&[1, t, 0])).collect();
        assert!(cubic_pencil_check(f, &line).unwrap().cubic_space_dim >= 3);
        assert!(cubic_pencil_check(Field::Prime(3), &sub).is_err());
    }

    #[test]
    fn kapranov_counts() {
        let f = Field::Rational;
        assert_eq!(kapranov_subspaces(3, f).unwrap().len(), 4);
        assert_eq!(kapranov_subspaces(4, f).unwrap().len(), 15);
        assert_eq!(kapranov_subspaces(5, f).unwrap().len(), 41);
        let a = kapranov_arrangement(4, f).unwrap();
        let p = intersection_closure(&a);
        assert_eq!(p.elements.len(), 15);
    }

    #[test]
    fn losev_manin_dimensions() {
        let lm = losev_manin_subspaces(3, Field::Rational).unwrap();
        let dims: Vec<usize> = lm.subspaces.iter().map(|s| s.dim()).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 4);
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 6);
        assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 4);
    }

    #[test]
    fn sampled_points_are_general() {
        let (pts, cert) = very_general_points(3, 9, 7, Field::Rational).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(cert.conditions.len(), 3);
        let again = very_general_points(3, 9, 7, Field::Rational).unwrap().0;
        assert_eq!(pts, again);
    }

    #[test]
    fn cotangent_of_p3_gives_four_general_points() {
        let b = cotangent_bundle(&projective_space_fan(3).unwrap(), Field::Rational).unwrap();
        let a = Arrangement::from_bundle(&b);
        assert_eq!(a.centers().len(), 4);
        let rep = a.position_report().unwrap();
        assert!(rep.general_position && rep.on_rational_normal_curve);
    }
}
