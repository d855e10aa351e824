//! Toric vector bundles whose filtrations carry at most one proper subspace per ray.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fan::{combinations, is_smooth, Cone, Fan};
use crate::lattice::{dot, solve_integer, ExactMatrix, Field, Scalar};
use crate::poly::{monomials_of_degree, Polynomial};

/// A linear subspace of `k^r`, stored as the rows of its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: ExactMatrix,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { ambient, basis: ExactMatrix::zeros(field, 0, ambient) }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace { ambient, basis: ExactMatrix::identity(field, ambient) }
    }

    /// Span of the given vectors.
    pub fn span(field: Field, ambient: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "basis vector length differs from ambient dimension {ambient}"
            )));
        }
        let m = ExactMatrix::from_rows(field, ambient, rows)?;
        Ok(Subspace { ambient, basis: m.row_space_canonical() })
    }

    pub fn span_int(field: Field, ambient: usize, rows: &[Vec<BigInt>]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|x| field.from_int(x)).collect()).collect();
        Self::span(field, ambient, rows)
    }

    /// The hyperplane `v^⊥` for the standard dot pairing.
    pub fn perp_of(field: Field, v: &[BigInt]) -> Result<Self> {
        Ok(Self::span_int(field, v.len(), &[v.to_vec()])?.annihilator())
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vecs()
    }

    /// `{x : <x, w> = 0 for all w}`.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.field(), self.ambient);
        }
        let rows = self.basis.kernel_basis();
        Subspace::span(self.field(), self.ambient, rows).expect("kernel vectors have ambient length")
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::span(self.field(), self.ambient, rows).expect("same ambient space")
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        let mut rows = self.basis_rows();
        rows.push(v.to_vec());
        ExactMatrix::from_rows(self.field(), self.ambient, rows).expect("same field").rank() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.sum(other).dim() == self.dim()
    }

    /// Vectors extending a basis of `self` to a basis of `larger`, chosen greedily from `larger`'s basis.
    pub fn complement_in(&self, larger: &Subspace) -> Vec<Vec<Scalar>> {
        let mut acc = self.clone();
        let mut out = Vec::new();
        for row in larger.basis_rows() {
            if !acc.contains_vector(&row) {
                acc = acc.sum(&Subspace::span(self.field(), self.ambient, vec![row.clone()]).expect("row"));
                out.push(row);
            }
        }
        out
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let rows: Vec<String> = self
            .basis_rows()
            .iter()
            .map(|r| {
                let parts: Vec<String> = r.iter().map(|s| s.to_display_string()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        write!(f, "span{{{}}}", rows.join(", "))
    }
}

/// `F(k) = F` for `k <= shift`, the subspace for `shift < k <= shift + step`, `0` beyond.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayFiltration {
    pub subspace: Subspace,
    pub step: u32,
    pub shift: i64,
}

impl RayFiltration {
    pub fn new(subspace: Subspace, step: u32, shift: i64) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidBundle("step length must be positive".into()));
        }
        if subspace.is_full() {
            return Err(Error::InvalidBundle(
                "the full space is not a proper subspace; express it as a shift".into(),
            ));
        }
        Ok(RayFiltration { subspace, step, shift })
    }

    pub fn value(&self, k: i64) -> Subspace {
        let s = &self.subspace;
        if k <= self.shift {
            Subspace::full(s.field(), s.ambient())
        } else if k <= self.shift + self.step as i64 {
            s.clone()
        } else {
            Subspace::zero(s.field(), s.ambient())
        }
    }
}

/// A fan, a fibre `F = k^r`, and one filtration per ray in ray order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricVectorBundle {
    fan: Fan,
    field: Field,
    rank: usize,
    filtrations: Vec<RayFiltration>,
    twist: Vec<i64>,
}

impl ToricVectorBundle {
    pub fn new(fan: Fan, field: Field, rank: usize, filtrations: Vec<RayFiltration>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidBundle("rank must be positive".into()));
        }
        if filtrations.len() != fan.n_rays() {
            return Err(Error::InvalidBundle(format!(
                "{} filtrations for {} rays",
                filtrations.len(),
                fan.n_rays()
            )));
        }
        for (j, f) in filtrations.iter().enumerate() {
            if f.subspace.ambient() != rank {
                return Err(Error::InvalidBundle(format!(
                    "ray {}: subspace lives in dimension {}, expected {rank}",
                    j + 1,
                    f.subspace.ambient()
                )));
            }
            if f.subspace.field() != field {
                return Err(Error::FieldMismatch {
                    expected: field.characteristic(),
                    found: f.subspace.field().characteristic(),
                });
            }
            if f.subspace.dim() >= rank {
                return Err(Error::InvalidBundle(format!(
                    "ray {}: subspace of dimension {} is not proper in rank {rank}",
                    j + 1,
                    f.subspace.dim()
                )));
            }
        }
        let twist = vec![0; filtrations.len()];
        Ok(ToricVectorBundle { fan, field, rank, filtrations, twist })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn filtrations(&self) -> &[RayFiltration] {
        &self.filtrations
    }

    pub fn filtration(&self, j: usize) -> &RayFiltration {
        &self.filtrations[j]
    }

    pub fn subspace(&self, j: usize) -> &Subspace {
        &self.filtrations[j].subspace
    }

    /// Shifts moved into the twist by [`normalize`](Self::normalize), per ray.
    pub fn twist(&self) -> &[i64] {
        &self.twist
    }

    /// Replaces the recorded twist, e.g. when re-reading a serialized bundle.
    pub fn with_twist(mut self, twist: Vec<i64>) -> Result<Self> {
        if twist.len() != self.filtrations.len() {
            return Err(Error::InvalidBundle(format!("{} twist entries for {} rays", twist.len(), self.filtrations.len())));
        }
        self.twist = twist;
        Ok(self)
    }

    pub fn is_normalized(&self) -> bool {
        self.filtrations.iter().all(|f| f.shift == 0)
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Precondition(
                "filtrations carry nonzero shifts; normalize the bundle first".into(),
            ))
        }
    }

    /// Tensors by the line bundle that moves every shift to zero; the projectivization is unchanged.
    pub fn normalize(&self) -> ToricVectorBundle {
        let mut out = self.clone();
        for (f, t) in out.filtrations.iter_mut().zip(out.twist.iter_mut()) {
            *t += f.shift;
            f.shift = 0;
        }
        out
    }

    pub fn zero_rays(&self) -> Vec<usize> {
        (0..self.fan.n_rays()).filter(|&j| self.subspace(j).is_zero()).collect()
    }

    /// Groups (of size at least two) of rays carrying the same nonzero subspace.
    pub fn coincidences(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(Subspace, Vec<usize>)> = Vec::new();
        for (j, f) in self.filtrations.iter().enumerate() {
            if f.subspace.is_zero() {
                continue;
            }
            match groups.iter_mut().find(|(s, _)| *s == f.subspace) {
                Some((_, g)) => g.push(j),
                None => groups.push((f.subspace.clone(), vec![j])),
            }
        }
        groups.into_iter().map(|(_, g)| g).filter(|g| g.len() > 1).collect()
    }
}

/// Builds a bundle from one subspace (possibly zero) and one step length per ray, all unshifted.
pub fn standard_bundle(
    fan: Fan,
    field: Field,
    rank: usize,
    subspaces: Vec<Subspace>,
    steps: Vec<u32>,
) -> Result<ToricVectorBundle> {
    if subspaces.len() != steps.len() {
        return Err(Error::InvalidBundle(format!(
            "{} subspaces but {} step lengths",
            subspaces.len(),
            steps.len()
        )));
    }
    let filtrations = subspaces
        .into_iter()
        .zip(steps)
        .map(|(s, a)| RayFiltration::new(s, a, 0))
        .collect::<Result<Vec<_>>>()?;
    ToricVectorBundle::new(fan, field, rank, filtrations)
}

fn require_smooth(fan: &Fan) -> Result<()> {
    if let Some(c) = is_smooth(fan).witness {
        return Err(Error::Precondition(format!("fan is not smooth at {c}")));
    }
    Ok(())
}

/// Cotangent bundle: `v_j^⊥` at level 0, so every filtration carries shift `-1`.
pub fn cotangent_bundle(fan: &Fan, field: Field) -> Result<ToricVectorBundle> {
    require_smooth(fan)?;
    let filtrations = fan
        .rays()
        .iter()
        .map(|v| RayFiltration::new(Subspace::perp_of(field, v)?, 1, -1))
        .collect::<Result<Vec<_>>>()?;
    ToricVectorBundle::new(fan.clone(), field, fan.dim(), filtrations)
}

/// Tangent bundle: the line `k v_j` at level 1. In dimension one that line is the whole
/// fibre, which is recorded as a shift of `+1` on the zero subspace.
pub fn tangent_bundle(fan: &Fan, field: Field) -> Result<ToricVectorBundle> {
    require_smooth(fan)?;
    let d = fan.dim();
    let filtrations = fan
        .rays()
        .iter()
        .map(|v| {
            let line = Subspace::span_int(field, d, &[v.clone()])?;
            if line.is_full() {
                RayFiltration::new(Subspace::zero(field, d), 1, 1)
            } else {
                RayFiltration::new(line, 1, 0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ToricVectorBundle::new(fan.clone(), field, d, filtrations)
}

/// How a cone's compatibility was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Surface,
    Hyperplanes,
    General,
}

impl Tier {
    pub fn label(self) -> &'static str {
        match self {
            Tier::Surface => "surface",
            Tier::Hyperplanes => "hyperplanes",
            Tier::General => "adapted-basis",
        }
    }
}

/// Lines `L_i` (by spanning vectors) and characters `u_i` realizing every filtration on one cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCertificate {
    pub cone: Cone,
    pub tier: Tier,
    pub lines: Vec<Vec<Scalar>>,
    pub characters: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityCertificate {
    pub cones: Vec<ConeCertificate>,
}

impl CompatibilityCertificate {
    /// Recomputes every filtration value from the lines and characters and compares exactly.
    pub fn verify(&self, b: &ToricVectorBundle) -> bool {
        if self.cones.len() != b.fan().cones().len() {
            return false;
        }
        self.cones.iter().zip(b.fan().cones()).all(|(c, cone)| c.cone == *cone && verify_cone(b, c))
    }
}

fn verify_cone(b: &ToricVectorBundle, c: &ConeCertificate) -> bool {
    let r = b.rank();
    if c.lines.len() != r || c.characters.len() != r {
        return false;
    }
    let full = Subspace::span(b.field(), r, c.lines.clone());
    if !matches!(full, Ok(ref s) if s.is_full()) {
        return false;
    }
    for &j in c.cone.rays() {
        let f = b.filtration(j);
        let v = b.fan().ray(j);
        let pairings: Vec<BigInt> = c.characters.iter().map(|u| dot(u, v)).collect();
        for k in f.shift..=f.shift + f.step as i64 + 1 {
            let selected: Vec<Vec<Scalar>> = c
                .lines
                .iter()
                .zip(&pairings)
                .filter(|(_, p)| **p >= BigInt::from(k))
                .map(|(l, _)| l.clone())
                .collect();
            let Ok(span) = Subspace::span(b.field(), r, selected) else { return false };
            if span != f.value(k) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Compatible(CompatibilityCertificate),
    Incompatible { cone: Cone, tier: Tier, reason: String },
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible(_))
    }

    pub fn certificate(&self) -> Option<&CompatibilityCertificate> {
        match self {
            Compatibility::Compatible(c) => Some(c),
            Compatibility::Incompatible { .. } => None,
        }
    }
}

/// Decides the compatibility condition cone by cone and returns a certificate or the first failing cone.
pub fn check_compatibility(b: &ToricVectorBundle) -> Result<Compatibility> {
    require_smooth(b.fan())?;
    let mut cones = Vec::new();
    for cone in b.fan().cones() {
        match cone_certificate(b, cone) {
            Ok(c) => cones.push(c),
            Err((tier, reason)) => {
                return Ok(Compatibility::Incompatible { cone: cone.clone(), tier, reason })
            }
        }
    }
    Ok(Compatibility::Compatible(CompatibilityCertificate { cones }))
}

fn cone_certificate(
    b: &ToricVectorBundle,
    cone: &Cone,
) -> std::result::Result<ConeCertificate, (Tier, String)> {
    let r = b.rank();
    let mut distinct: Vec<Subspace> = Vec::new();
    for &j in cone.rays() {
        let s = b.subspace(j);
        if !s.is_zero() && !distinct.contains(s) {
            distinct.push(s.clone());
        }
    }
    let tier = if b.fan().dim() == 2 {
        Tier::Surface
    } else if distinct.iter().all(|s| s.dim() + 1 == r) {
        Tier::Hyperplanes
    } else {
        Tier::General
    };
    if tier == Tier::Hyperplanes && !distinct.is_empty() {
        // distinct hyperplanes meet transversely iff their normals are independent
        let normals: Vec<Vec<Scalar>> =
            distinct.iter().flat_map(|s| s.annihilator().basis_rows()).collect();
        let m = ExactMatrix::from_rows(b.field(), r, normals).expect("same field");
        if m.rank() < distinct.len() {
            return Err((
                tier,
                format!("the {} distinct hyperplanes on {cone} do not meet transversely", distinct.len()),
            ));
        }
    }
    let lines = match tier {
        Tier::Hyperplanes => dual_lines(b.field(), r, &distinct),
        _ => adapted_basis(b.field(), r, &distinct),
    }
    .ok_or_else(|| (tier, format!("no basis of the fibre is adapted to all subspaces on {cone}")))?;
    let rows: Vec<Vec<BigInt>> = cone.rays().iter().map(|&j| b.fan().ray(j).to_vec()).collect();
    let inverse = (rows.len() == b.fan().dim())
        .then(|| b.fan().cone_matrix(cone).inverse())
        .flatten();
    let mut characters = Vec::new();
    for line in &lines {
        let targets: Vec<BigInt> = cone
            .rays()
            .iter()
            .map(|&j| {
                let f = b.filtration(j);
                let inside = !f.subspace.is_zero() && f.subspace.contains_vector(line);
                BigInt::from(if inside { f.shift + f.step as i64 } else { f.shift })
            })
            .collect();
        let u = match &inverse {
            Some(inv) => integral_image(inv, &targets),
            None => solve_integer(&rows, b.fan().dim(), &targets),
        }
        .ok_or_else(|| (tier, format!("no integral characters on {cone}")))?;
        characters.push(u);
    }
    Ok(ConeCertificate { cone: cone.clone(), tier, lines, characters })
}

/// For independent hyperplanes: the basis dual to their normals, completed by unit vectors.
fn dual_lines(field: Field, r: usize, hyperplanes: &[Subspace]) -> Option<Vec<Vec<Scalar>>> {
    let mut rows: Vec<Vec<Scalar>> = hyperplanes.iter().flat_map(|s| s.annihilator().basis_rows()).collect();
    for i in 0..r {
        if rows.len() == r {
            break;
        }
        let mut e = vec![field.zero(); r];
        e[i] = field.one();
        let mut trial = rows.clone();
        trial.push(e);
        if ExactMatrix::from_rows(field, r, trial.clone()).ok()?.rank() == trial.len() {
            rows = trial;
        }
    }
    let inv = ExactMatrix::from_rows(field, r, rows).ok()?.inverse()?;
    Some((0..r).map(|k| (0..r).map(|i| inv.get(i, k).clone()).collect()).collect())
}

/// `x` with `A x = t`, given `A⁻¹` (rows of `A` are the cone's rays), when it is integral.
fn integral_image(inv: &ExactMatrix, t: &[BigInt]) -> Option<Vec<BigInt>> {
    (0..inv.nrows())
        .map(|i| {
            let q: num_rational::BigRational = (0..t.len())
                .map(|k| inv.get(i, k).as_rational().expect("rational").clone() * num_rational::BigRational::from_integer(t[k].clone()))
                .sum();
            q.is_integer().then(|| q.to_integer())
        })
        .collect()
}

/// A basis of `k^r` such that each given subspace is spanned by the basis vectors it contains.
///
/// With `V_J` the intersection of the members indexed by `J` and `U_J` the sum of the strictly
/// smaller `V_K`, such a basis exists iff the complements of `U_J` in `V_J` have total dimension `r`;
/// their union is then one.
pub fn adapted_basis(field: Field, r: usize, subspaces: &[Subspace]) -> Option<Vec<Vec<Scalar>>> {
    let m = subspaces.len();
    let mut v: BTreeMap<Vec<usize>, Subspace> = BTreeMap::new();
    for size in (0..=m).rev() {
        for j in combinations(m, size) {
            let s = j
                .iter()
                .fold(Subspace::full(field, r), |acc, &i| acc.intersect(&subspaces[i]));
            v.insert(j, s);
        }
    }
    let mut lines = Vec::new();
    for size in (0..=m).rev() {
        for j in combinations(m, size) {
            let vj = &v[&j];
            let uj = v
                .iter()
                .filter(|(k, _)| k.len() > j.len() && j.iter().all(|x| k.contains(x)))
                .fold(Subspace::zero(field, r), |acc, (_, s)| acc.sum(s));
            lines.extend(uj.complement_in(vj));
            if lines.len() > r {
                return None;
            }
        }
    }
    (lines.len() == r).then_some(lines)
}

/// `F^σ_u`: the intersection over rays of `σ` of `F^ρ(<u, v_ρ>)`.
pub fn isotypical_sections(b: &ToricVectorBundle, sigma: &Cone, u: &[BigInt]) -> Result<Subspace> {
    if u.len() != b.fan().dim() {
        return Err(Error::DimensionMismatch(format!("character of length {}", u.len())));
    }
    let mut acc = Subspace::full(b.field(), b.rank());
    for &j in sigma.rays() {
        if j >= b.fan().n_rays() {
            return Err(Error::DimensionMismatch(format!("ray index {j} out of range")));
        }
        let k: i64 = dot(u, b.fan().ray(j))
            .try_into()
            .map_err(|_| Error::Overflow("pairing exceeds 64 bits".into()))?;
        acc = acc.intersect(&b.filtration(j).value(k));
    }
    Ok(acc)
}

/// Dimensions for `Sym^m F`: the total, and per ray the images of `Sym^j F_i ⊗ Sym^(m-j) F` for `j = 0..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPowerReport {
    pub dimension: usize,
    pub levels: Vec<Vec<usize>>,
}

pub fn sym_power_dimension(b: &ToricVectorBundle, m: u32) -> Result<SymPowerReport> {
    b.require_normalized()?;
    let r = b.rank();
    let field = b.field();
    let dimension = monomials_of_degree(r, m).len();
    let levels = b
        .filtrations()
        .iter()
        .map(|f| (0..=m).map(|j| image_dimension(field, r, &f.subspace, j, m)).collect())
        .collect();
    Ok(SymPowerReport { dimension, levels })
}

/// Dimension of the image of `Sym^j W ⊗ Sym^(m-j) F` in `Sym^m F`.
pub fn image_dimension(field: Field, r: usize, w: &Subspace, j: u32, m: u32) -> usize {
    if j == 0 {
        return monomials_of_degree(r, m).len();
    }
    if w.is_zero() {
        return 0;
    }
    let forms: Vec<Polynomial> = w.basis_rows().iter().map(|row| Polynomial::linear(field, row)).collect();
    let mut rows = Vec::new();
    for e in monomials_of_degree(forms.len(), j) {
        let prod = e
            .iter()
            .zip(&forms)
            .fold(Polynomial::constant(field, r, field.one()), |acc, (&k, f)| acc.mul(&f.pow(k)));
        for mono in monomials_of_degree(r, m - j) {
            let p = prod.mul(&Polynomial::monomial(field, r, mono, field.one()));
            rows.push(p.dense_coefficients(m));
        }
    }
    let cols = monomials_of_degree(r, m).len();
    ExactMatrix::from_rows(field, cols, rows).expect("same field").rank()
}

/// The fan of `P(ℱ)` over a single-ray chart and its image in `R^r/(1,...,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleRayQuotient {
    /// Splitting lines contained in the subspace.
    pub inside: Vec<usize>,
    /// Rays `ē_1..ē_r` then `ṽ`, in `Z x Z^(r-1)`.
    pub total_fan: Fan,
    /// Projection to `Z^(r-1)` with the cones meeting the unstable locus removed.
    pub quotient_fan: Fan,
    /// Set when the image of `ṽ` coincides with some `ē_j` (a line subspace): the quotient
    /// is the projective space with that hyperplane doubled.
    pub doubled: bool,
}

/// A splitting of `k^r` adapted to a single subspace: its basis, completed by standard vectors.
pub fn adapted_splitting(w: &Subspace) -> Vec<Vec<Scalar>> {
    let field = w.field();
    let r = w.ambient();
    let mut lines = w.basis_rows();
    let full = Subspace::full(field, r);
    lines.extend(w.complement_in(&full));
    lines
}

/// Coordinates on `Z^r/(1,...,1)`: `x -> (x_1 - x_r, ..., x_(r-1) - x_r)`.
fn quotient_coords(x: &[BigInt]) -> Vec<BigInt> {
    let last = x.last().cloned().unwrap_or_else(BigInt::zero);
    x[..x.len() - 1].iter().map(|a| a - &last).collect()
}

pub fn single_ray_projectivization_fan(
    filtration: &RayFiltration,
    splitting: &[Vec<Scalar>],
) -> Result<SingleRayQuotient> {
    let w = &filtration.subspace;
    let field = w.field();
    let r = w.ambient();
    if r < 2 {
        return Err(Error::Precondition("the fibre must have dimension at least 2".into()));
    }
    if splitting.len() != r || !Subspace::span(field, r, splitting.to_vec())?.is_full() {
        return Err(Error::Precondition("the splitting lines do not span the fibre".into()));
    }
    let inside: Vec<usize> = (0..r).filter(|&i| !w.is_zero() && w.contains_vector(&splitting[i])).collect();
    let inside_span = Subspace::span(field, r, inside.iter().map(|&i| splitting[i].clone()).collect())?;
    if inside_span != *w {
        return Err(Error::Precondition("splitting is not adapted to the subspace".into()));
    }
    let a = BigInt::from(filtration.step);
    let c = BigInt::from(filtration.shift);
    let mut n = vec![c.clone(); r];
    for &i in &inside {
        n[i] = &c + &a;
    }
    let lift = |first: i64, x: &[BigInt]| {
        let mut v = vec![BigInt::from(first)];
        v.extend(quotient_coords(x));
        v
    };
    let unit = |j: usize| {
        let mut e = vec![BigInt::zero(); r];
        e[j] = BigInt::from(1);
        e
    };
    let mut total_rays: Vec<Vec<BigInt>> = (0..r).map(|j| lift(0, &unit(j))).collect();
    total_rays.push(lift(1, &n));
    let total_cones: Vec<Vec<usize>> = (0..r)
        .map(|j| {
            let mut c: Vec<usize> = (0..r).filter(|&k| k != j).collect();
            c.push(r);
            c
        })
        .collect();
    let total_fan = Fan::new(r, total_rays, total_cones)?;

    let mut rays: Vec<Vec<BigInt>> = (0..r).map(|j| quotient_coords(&unit(j))).collect();
    let others = |skip: &[usize]| -> Vec<usize> { (0..r).filter(|k| !skip.contains(k)).collect() };
    let doubled = inside.len() == 1;
    let cones: Vec<Vec<usize>> = if inside.len() <= 1 {
        // the image of ṽ is zero or an existing ray: projective space itself
        (0..r).map(|j| others(&[j])).collect()
    } else {
        let mut w_img = vec![BigInt::zero(); r];
        for &i in &inside {
            w_img[i] = BigInt::from(1);
        }
        rays.push(quotient_coords(&w_img));
        let mut cones: Vec<Vec<usize>> = inside.iter().map(|&j| others(&[j])).collect();
        for &i in &inside {
            for j in (0..r).filter(|j| !inside.contains(j)) {
                let mut c = others(&[i, j]);
                c.push(r);
                cones.push(c);
            }
        }
        cones
    };
    let quotient_fan = Fan::new(r - 1, rays, cones)?;
    Ok(SingleRayQuotient { inside, total_fan, quotient_fan, doubled })
}
