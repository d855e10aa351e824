//! Class groups and graded presentations of Cox rings of projectivized bundles, and the
//! Mori-dream-space classifier for blowups of projective space.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arrangement::{
    find_totaro_subset, intersection_closure, position_report, Arrangement, PositionReport,
};
use crate::error::{Error, Result};
use crate::fan::{combinations, is_complete, is_smooth, Cone, Fan};
use crate::klyachko::{check_compatibility, tangent_bundle, Subspace, ToricVectorBundle};
use crate::lattice::{elementary_divisors, ExactMatrix, Field, Scalar};

pub mod cite {
    pub const COX_TRANSFER: &str = "cox-ring-transfer";
    pub const SINGLE_SUBSPACE: &str = "single-subspace-filtrations";
    pub const EMPTY_ARRANGEMENT: &str = "empty-arrangement";
    pub const COLLINEAR: &str = "collinear-points-torus-action";
    pub const RNC: &str = "rational-normal-curve";
    pub const CT_THRESHOLD: &str = "castravet-tevelev-threshold";
    pub const MUKAI: &str = "mukai-threshold";
    pub const TOTARO: &str = "totaro-nine-points";
    pub const CUBIC_PENCIL: &str = "cubic-pencil-certificate";
    pub const HYPERPLANE: &str = "hyperplane-reduction";
    pub const SUPERSET: &str = "superset-of-centers";
    pub const KAPRANOV: &str = "kapranov-blowup";
    pub const TANGENT: &str = "tangent-bundle-cox-ring";
}

/// Integer coordinates in a named basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn zero(n: usize) -> Self {
        DivisorClass(vec![0; n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DivisorClass(v)
    }

    pub fn add(&self, o: &DivisorClass) -> Self {
        DivisorClass(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &DivisorClass) -> Self {
        DivisorClass(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        DivisorClass(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

/// A free abelian group with named basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub names: Vec<String>,
}

impl ClassGroup {
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn format(&self, c: &DivisorClass) -> String {
        let mut out = String::new();
        for (name, &k) in self.names.iter().zip(&c.0) {
            if k == 0 {
                continue;
            }
            let sign = if k < 0 { "-" } else { "+" };
            let mag = k.abs();
            let coeff = if mag == 1 { String::new() } else { format!("{mag}") };
            if out.is_empty() {
                out = format!("{}{coeff}{name}", if k < 0 { "-" } else { "" });
            } else {
                out.push_str(&format!(" {sign} {coeff}{name}"));
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    /// `L` and one `E_j` per center, labelled by the first ray carrying it.
    pub fn blowup(center_rays: &[usize]) -> Self {
        let mut names = vec!["L".to_string()];
        names.extend(center_rays.iter().map(|j| format!("E_{}", j + 1)));
        ClassGroup { names }
    }
}

/// `Cl(P(ℱ))` with basis `O(1)` and `D_i` for rays outside a chosen maximal cone `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivizationClassGroup {
    pub group: ClassGroup,
    pub sigma: Cone,
    /// Whether every ray of `σ` carries the zero subspace, which makes `φ*` available.
    pub phi_available: bool,
    pub torsion_free: bool,
    /// Ray indices of the `D_i` basis elements, in basis order after `O(1)`.
    pub basis_rays: Vec<usize>,
    ray_classes: Vec<DivisorClass>,
}

impl ProjectivizationClassGroup {
    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn o1(&self) -> DivisorClass {
        DivisorClass::basis(self.rank(), 0)
    }

    /// Class of the preimage of the ray's boundary divisor.
    pub fn ray_class(&self, j: usize) -> &DivisorClass {
        &self.ray_classes[j]
    }

    pub fn format(&self, c: &DivisorClass) -> String {
        self.group.format(c)
    }
}

fn require_smooth_complete(fan: &Fan) -> Result<()> {
    if let Some(c) = is_smooth(fan).witness {
        return Err(Error::Precondition(format!("fan is not smooth at {c}")));
    }
    if !is_complete(fan)? {
        return Err(Error::Precondition("fan is not complete".into()));
    }
    Ok(())
}

fn require_compatible(b: &ToricVectorBundle) -> Result<()> {
    match check_compatibility(b)? {
        crate::klyachko::Compatibility::Compatible(_) => Ok(()),
        crate::klyachko::Compatibility::Incompatible { cone, reason, .. } => {
            Err(Error::InvalidBundle(format!("filtrations are not compatible on {cone}: {reason}")))
        }
    }
}

pub fn class_group_projectivization(b: &ToricVectorBundle) -> Result<ProjectivizationClassGroup> {
    let fan = b.fan();
    require_smooth_complete(fan)?;
    require_compatible(b)?;
    let mut sorted: Vec<&Cone> = fan.cones().iter().collect();
    sorted.sort();
    let zero_cone = sorted
        .iter()
        .find(|c| c.rays().iter().all(|&j| b.subspace(j).is_zero()))
        .copied();
    let phi_available = zero_cone.is_some();
    let sigma = zero_cone.unwrap_or(sorted[0]).clone();
    let n = fan.n_rays();
    let basis_rays: Vec<usize> = (0..n).filter(|j| !sigma.contains(*j)).collect();
    let mut names = vec!["O(1)".to_string()];
    names.extend(basis_rays.iter().map(|j| format!("D_{}", j + 1)));
    let rank = names.len();
    let inv = fan.cone_matrix(&sigma).inverse().expect("smooth full-dimensional cone");
    let mut ray_classes = vec![DivisorClass::zero(rank); n];
    for (pos, &i) in basis_rays.iter().enumerate() {
        ray_classes[i] = DivisorClass::basis(rank, pos + 1);
    }
    // for j in σ, pairing with the dual basis vector u_j gives D_j = -Σ_{i∉σ} <u_j, v_i> D_i
    for (k, &j) in sigma.rays().iter().enumerate() {
        let mut c = DivisorClass::zero(rank);
        for (pos, &i) in basis_rays.iter().enumerate() {
            let pairing: BigRational = (0..fan.dim())
                .map(|t| {
                    inv.get(t, k).as_rational().expect("rational").clone()
                        * BigRational::from_integer(fan.ray(i)[t].clone())
                })
                .sum();
            let p = pairing.to_integer().to_i64().ok_or_else(|| Error::Overflow("pairing".into()))?;
            c.0[pos + 1] = -p;
        }
        ray_classes[j] = c;
    }
    let relations: Vec<Vec<BigInt>> = (0..fan.dim())
        .map(|t| fan.rays().iter().map(|v| v[t].clone()).collect())
        .collect();
    let torsion_free = elementary_divisors(&relations, n).iter().all(|d| d.is_one());
    Ok(ProjectivizationClassGroup {
        group: ClassGroup { names },
        sigma,
        phi_available,
        torsion_free,
        basis_rays,
        ray_classes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomKind {
    Variable,
    CanonicalSection,
}

/// A generator or canonical-section symbol with its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub degree: DivisorClass,
    pub kind: AtomKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Scalar,
    /// `(atom index, exponent)` pairs.
    pub factors: Vec<(usize, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<Term>,
    /// Set on relations this library chooses where no closed formula is available.
    pub tag: Option<String>,
}

/// The base ring `R(Bl_S P_F)`, described symbolically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseDescriptor {
    pub name: String,
    pub rank: usize,
    /// Centers of codimension at least two, each by the rays carrying it.
    pub centers: Vec<Vec<usize>>,
    pub center_dims: Vec<usize>,
    /// Projective dimensions of the intersection closure, in blowup order.
    pub blowup_order: Vec<usize>,
    /// Hyperplanes along which the quotient is doubled, by rays.
    pub doubled_hyperplanes: Vec<Vec<usize>>,
    /// Repeated subspaces of dimension at least two, by rays.
    pub repeated: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxPresentation {
    pub field: Field,
    pub base: BaseDescriptor,
    pub class_group: ProjectivizationClassGroup,
    pub atoms: Vec<Atom>,
    pub relations: Vec<Relation>,
    /// Atom indices of the polynomial variables coming from zero subspaces.
    pub free_variables: Vec<usize>,
    pub annotations: Vec<String>,
}

impl CoxPresentation {
    pub fn generators(&self) -> Vec<&Atom> {
        self.atoms.iter().filter(|a| a.kind == AtomKind::Variable).collect()
    }

    pub fn term_degree(&self, t: &Term) -> DivisorClass {
        t.factors.iter().fold(DivisorClass::zero(self.class_group.rank()), |acc, &(a, e)| {
            acc.add(&self.atoms[a].degree.scale(e as i64))
        })
    }

    /// The common degree of the relation's terms, or `None` if they differ.
    pub fn relation_degree(&self, r: &Relation) -> Option<DivisorClass> {
        let mut degs = r.terms.iter().map(|t| self.term_degree(t));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.relations.iter().all(|r| self.relation_degree(r).is_some())
    }

    pub fn format_relation(&self, r: &Relation) -> String {
        format_terms(&self.atoms, &r.terms)
    }
}

fn format_terms(atoms: &[Atom], terms: &[Term]) -> String {
    let mut out = String::new();
    for (k, t) in terms.iter().enumerate() {
        let mono: Vec<String> = t
            .factors
            .iter()
            .map(|&(a, e)| if e == 1 { atoms[a].name.clone() } else { format!("{}^{e}", atoms[a].name) })
            .collect();
        let mono = mono.join("*");
        let c = t.coeff.to_display_string();
        let (neg, mag) = match c.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, c),
        };
        let body = if mag == "1" && !mono.is_empty() {
            mono
        } else if mono.is_empty() {
            mag
        } else {
            format!("{mag}*{mono}")
        };
        if k == 0 {
            out.push_str(&format!("{}{body}", if neg { "-" } else { "" }));
        } else {
            out.push_str(&format!(" {} {body}", if neg { "-" } else { "+" }));
        }
    }
    out
}

impl fmt::Display for CoxPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base: {}", self.base.name)?;
        writeln!(f, "class group: Z^{} with basis {}", self.class_group.rank(), self.class_group.group.names.join(", "))?;
        for a in &self.atoms {
            let kind = match a.kind {
                AtomKind::Variable => "generator",
                AtomKind::CanonicalSection => "section",
            };
            writeln!(f, "{kind} {} of degree {}", a.name, self.class_group.format(&a.degree))?;
        }
        for r in &self.relations {
            match &r.tag {
                Some(t) => writeln!(f, "relation {} [{t}]", self.format_relation(r))?,
                None => writeln!(f, "relation {}", self.format_relation(r))?,
            }
        }
        for a in &self.annotations {
            writeln!(f, "note: {a}")?;
        }
        Ok(())
    }
}

fn term(field: Field, coeff: i64, factors: Vec<(usize, u32)>) -> Term {
    Term { coeff: field.from_i64(coeff), factors }
}

fn push_atom(atoms: &mut Vec<Atom>, name: String, degree: DivisorClass, kind: AtomKind) -> usize {
    atoms.push(Atom { name, degree, kind });
    atoms.len() - 1
}

fn base_descriptor(a: &Arrangement) -> BaseDescriptor {
    let r = a.rank();
    let centers = a.centers();
    let pd = r - 1;
    let name = if centers.is_empty() {
        format!("R(P^{pd})")
    } else if centers.iter().all(|m| m.is_point()) {
        format!("R(Bl_{} P^{pd})", centers.len())
    } else {
        format!("R(Bl_S P^{pd}) with |S| = {}", centers.len())
    };
    let blowup_order = intersection_closure(a).elements.iter().map(|e| e.projective_dim).collect();
    BaseDescriptor {
        name,
        rank: r,
        centers: centers.iter().map(|m| m.rays.clone()).collect(),
        center_dims: centers.iter().map(|m| m.locus_dim()).collect(),
        blowup_order,
        doubled_hyperplanes: a.hyperplanes().iter().map(|m| m.rays.clone()).collect(),
        repeated: centers.iter().filter(|m| m.rays.len() > 1).map(|m| m.rays.clone()).collect(),
    }
}

/// Assembles the presentation over the symbolic base ring: free variables for zero subspaces,
/// `1_E - x^a` for longer steps, `1_H - x^a y` for line subspaces, and a product relation for
/// repeated subspaces.
pub fn cox_presentation(b: &ToricVectorBundle) -> Result<CoxPresentation> {
    b.require_normalized()?;
    let cg = class_group_projectivization(b)?;
    let field = b.field();
    let a = Arrangement::from_bundle(b);
    let base = base_descriptor(&a);
    let mut atoms = Vec::new();
    let mut relations = Vec::new();
    let mut annotations = Vec::new();
    let step = |j: usize| b.filtration(j).step;
    let derived = Some("derived: repeated subspace".to_string());

    // degree of 1_E for each center
    let center_degree = |rays: &[usize]| {
        rays.iter()
            .fold(DivisorClass::zero(cg.rank()), |acc, &j| acc.add(&cg.ray_class(j).scale(step(j) as i64)))
    };
    for m in a.members().iter().filter(|m| !m.is_hyperplane()) {
        let rays = &m.rays;
        if rays.len() == 1 && step(rays[0]) == 1 {
            continue;
        }
        let e = push_atom(
            &mut atoms,
            format!("1_E{}", rays[0] + 1),
            center_degree(rays),
            AtomKind::CanonicalSection,
        );
        let mut factors = Vec::new();
        for &j in rays {
            let x = push_atom(&mut atoms, format!("x{}", j + 1), cg.ray_class(j).clone(), AtomKind::Variable);
            factors.push((x, step(j)));
        }
        relations.push(Relation {
            terms: vec![term(field, 1, vec![(e, 1)]), term(field, -1, factors)],
            tag: if rays.len() > 1 { derived.clone() } else { None },
        });
    }
    for m in a.hyperplanes() {
        let mut deg = cg.o1();
        for c in a.centers() {
            if c.subspace.contains(&m.subspace) {
                deg = deg.sub(&center_degree(&c.rays));
            }
        }
        let h = push_atom(&mut atoms, format!("1_H{}", m.rays[0] + 1), deg.clone(), AtomKind::CanonicalSection);
        for &j in &m.rays {
            let aj = step(j);
            let dx = cg.ray_class(j).clone();
            let dy = deg.sub(&dx.scale(aj as i64));
            let x = push_atom(&mut atoms, format!("x{}", j + 1), dx, AtomKind::Variable);
            let y = push_atom(&mut atoms, format!("y{}", j + 1), dy, AtomKind::Variable);
            relations.push(Relation {
                terms: vec![term(field, 1, vec![(h, 1)]), term(field, -1, vec![(x, aj), (y, 1)])],
                tag: if m.rays.len() > 1 { derived.clone() } else { None },
            });
        }
    }
    let mut free_variables = Vec::new();
    for &j in a.zero_rays() {
        free_variables.push(push_atom(
            &mut atoms,
            format!("x{}", j + 1),
            cg.ray_class(j).clone(),
            AtomKind::Variable,
        ));
    }
    if !base.doubled_hyperplanes.is_empty() {
        annotations.push(format!(
            "quotient is the blowup doubled along the strict transforms of {} hyperplane(s)",
            base.doubled_hyperplanes.len()
        ));
    }
    for g in &base.repeated {
        annotations.push(format!(
            "nonseparated quotient: {} copies of the exceptional divisor over the center carried by rays {}",
            g.len(),
            ray_list(g)
        ));
    }
    if let Some(pts) = a.points() {
        let r = a.rank();
        if pts.len() == r + 1 && r >= 3 {
            if let Ok(rep) = position_report(field, r, &pts) {
                if rep.general_position {
                    annotations.push(format!(
                        "the base ring is the Plücker coordinate ring of Grass(2, {}) (textual identification only)",
                        r + 2
                    ));
                }
            }
        }
    }
    Ok(CoxPresentation { field, base, class_group: cg, atoms, relations, free_variables, annotations })
}

fn ray_list(rays: &[usize]) -> String {
    rays.iter().map(|j| format!("{}", j + 1)).collect::<Vec<_>>().join(",")
}

/// `k[x_1..x_n, y_1..y_n]` modulo `Σ λ_i x_i y_i` for `λ` in the kernel of the ray matrix.
pub fn tangent_cox_ring(fan: &Fan, field: Field) -> Result<CoxPresentation> {
    require_smooth_complete(fan)?;
    let b = tangent_bundle(fan, field)?.normalize();
    let cg = class_group_projectivization(&b)?;
    let n = fan.n_rays();
    let mut atoms = Vec::new();
    for j in 0..n {
        push_atom(&mut atoms, format!("x{}", j + 1), cg.ray_class(j).clone(), AtomKind::Variable);
    }
    for j in 0..n {
        let deg = cg.o1().sub(cg.ray_class(j));
        push_atom(&mut atoms, format!("y{}", j + 1), deg, AtomKind::Variable);
    }
    let rows: Vec<Vec<BigInt>> = (0..fan.dim())
        .map(|t| fan.rays().iter().map(|v| v[t].clone()).collect())
        .collect();
    let kernel = ExactMatrix::from_int_rows(field, n, &rows)?.kernel_basis();
    let relations = kernel
        .into_iter()
        .map(|lambda| Relation {
            terms: lambda
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| Term { coeff: c, factors: vec![(i, 1), (n + i, 1)] })
                .collect(),
            tag: None,
        })
        .collect();
    let mut annotations = Vec::new();
    let opposite = opposite_rays(fan);
    if !opposite.is_empty() {
        let pairs: Vec<String> = opposite.iter().map(|(i, j)| format!("({},{})", i + 1, j + 1)).collect();
        annotations.push(format!(
            "warning: opposite rays {} give repeated lines; the formula assumes none, see the repetition annotations",
            pairs.join(" ")
        ));
    }
    let base = BaseDescriptor {
        name: format!("k (polynomial ring Sym F of rank {})", fan.dim()),
        rank: fan.dim(),
        centers: Vec::new(),
        center_dims: Vec::new(),
        blowup_order: Vec::new(),
        doubled_hyperplanes: (0..n).map(|j| vec![j]).collect(),
        repeated: Vec::new(),
    };
    Ok(CoxPresentation {
        field,
        base,
        class_group: cg,
        atoms,
        relations,
        free_variables: Vec::new(),
        annotations,
    })
}

pub fn opposite_rays(fan: &Fan) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..fan.n_rays() {
        for j in i + 1..fan.n_rays() {
            if fan.ray(i).iter().zip(fan.ray(j)).all(|(a, b)| (a + b).is_zero()) {
                out.push((i, j));
            }
        }
    }
    out
}

/// One application of the hyperplane lemma: `R(Bl_S P^d) = R(Bl_S H)[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub from_dim: usize,
    pub to_dim: usize,
    pub points: usize,
    /// Linear form cutting out the hyperplane.
    pub hyperplane: Vec<Scalar>,
}

impl ReductionStep {
    pub fn describe(&self) -> String {
        format!(
            "R(Bl_{s} P^{a}) = R(Bl_{s} P^{b})[t]",
            s = self.points,
            a = self.from_dim,
            b = self.to_dim
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionChain {
    pub steps: Vec<ReductionStep>,
    pub rank: usize,
    pub points: Vec<Vec<Scalar>>,
}

/// Restricts points lying in a hyperplane to coordinates on that hyperplane.
fn reduce_once(field: Field, r: usize, points: &[Vec<Scalar>]) -> Option<(ReductionStep, Vec<Vec<Scalar>>)> {
    if r <= 3 || points.is_empty() {
        return None;
    }
    let m = ExactMatrix::from_rows(field, r, points.to_vec()).ok()?;
    if m.rank() >= r {
        return None;
    }
    let h = m.kernel_basis().remove(0);
    let basis = Subspace::span(field, r, vec![h.clone()]).ok()?.annihilator().basis().transpose();
    let new_points = points.iter().map(|p| basis.solve(p).expect("point lies in the hyperplane")).collect();
    let step = ReductionStep { from_dim: r - 1, to_dim: r - 2, points: points.len(), hyperplane: h };
    Some((step, new_points))
}

pub fn hyperplane_reduction(field: Field, r: usize, points: &[Vec<Scalar>]) -> Result<ReductionChain> {
    if r <= 3 {
        return Err(Error::Precondition("the hyperplane lemma needs projective dimension above 2".into()));
    }
    let Some((step, mut pts)) = reduce_once(field, r, points) else {
        return Err(Error::Precondition("no containing hyperplane".into()));
    };
    let mut steps = vec![step];
    let mut rank = r - 1;
    while let Some((step, next)) = reduce_once(field, rank, &pts) {
        steps.push(step);
        pts = next;
        rank -= 1;
    }
    Ok(ReductionChain { steps, rank, points: pts })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MdsStatus {
    Mds,
    NotMds,
    Unknown,
}

impl fmt::Display for MdsStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MdsStatus::Mds => "MDS",
            MdsStatus::NotMds => "Not MDS",
            MdsStatus::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: MdsStatus,
    /// The verdict assumes the points are very general.
    pub conditional: bool,
    pub citations: Vec<String>,
    pub reasons: Vec<String>,
}

impl Verdict {
    fn new(status: MdsStatus, citation: &str, reason: String) -> Self {
        Verdict { status, conditional: false, citations: vec![citation.to_string()], reasons: vec![reason] }
    }

    fn cite(&mut self, c: &str) {
        if !self.citations.iter().any(|x| x == c) {
            self.citations.push(c.to_string());
        }
    }

    pub fn summary(&self) -> String {
        match (self.status, self.conditional) {
            (MdsStatus::Mds, _) => "Mori dream space".into(),
            (MdsStatus::NotMds, true) => "not a Mori dream space (conditional on very-generality)".into(),
            (MdsStatus::NotMds, false) => "not a Mori dream space".into(),
            (MdsStatus::Unknown, _) => "unknown".into(),
        }
    }
}

/// Position hypotheses on `s` points of `P^(r-1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PositionFlags {
    pub collinear: bool,
    pub on_rnc: bool,
    pub general: bool,
    /// Assume the points are very general, beyond the certified conditions.
    pub very_general: bool,
}

impl PositionFlags {
    pub fn from_report(rep: &PositionReport, very_general: bool) -> Self {
        PositionFlags {
            collinear: rep.collinear,
            on_rnc: rep.on_rational_normal_curve,
            general: rep.general_position,
            very_general: very_general && rep.general_position,
        }
    }
}

/// `1/r + 1/(s-r) <= 1/2`, exactly. Requires `s > r`.
pub fn threshold_fails(r: usize, s: usize) -> bool {
    let q = |a: usize| BigRational::new(BigInt::one(), BigInt::from(a));
    q(r) + q(s - r) <= BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `s >= r + 2 + 4/(r-2)`, exactly. Requires `r >= 3`.
pub fn mukai_bound(r: usize, s: usize) -> bool {
    let rhs = BigRational::from_integer(BigInt::from(r + 2)) + BigRational::new(BigInt::from(4), BigInt::from(r - 2));
    BigRational::from_integer(BigInt::from(s)) >= rhs
}

pub fn mds_classify(r: usize, s: usize, flags: PositionFlags) -> Verdict {
    if flags.collinear {
        return Verdict::new(MdsStatus::Mds, cite::COLLINEAR, "the points are collinear".into());
    }
    if flags.on_rnc {
        return Verdict::new(MdsStatus::Mds, cite::RNC, "the points lie on a rational normal curve".into());
    }
    if flags.general && s <= r + 2 {
        return Verdict::new(
            MdsStatus::Mds,
            cite::RNC,
            format!("{s} points in general position lie on a rational normal curve"),
        );
    }
    if flags.general && s > r {
        if !threshold_fails(r, s) {
            return Verdict::new(
                MdsStatus::Mds,
                cite::CT_THRESHOLD,
                format!("1/{r} + 1/{} > 1/2", s - r),
            );
        }
        if flags.very_general && r >= 3 {
            debug_assert_eq!(threshold_fails(r, s), mukai_bound(r, s));
            let mut v = Verdict::new(
                MdsStatus::NotMds,
                cite::MUKAI,
                format!("1/{r} + 1/{} <= 1/2 for very general points", s - r),
            );
            v.conditional = true;
            return v;
        }
    }
    Verdict::new(MdsStatus::Unknown, "no-criterion", "no criterion applies".into())
}

/// Verdict with the supporting computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsReport {
    pub verdict: Verdict,
    pub reductions: Vec<ReductionStep>,
    /// Ray indices of a Totaro configuration among the centers.
    pub totaro_rays: Option<Vec<usize>>,
    pub cubic_space_dim: Option<usize>,
    pub position: Option<PositionReport>,
    pub annotations: Vec<String>,
}

struct PointOutcome {
    verdict: Verdict,
    reductions: Vec<ReductionStep>,
    totaro: Option<Vec<usize>>,
    cubic_space_dim: Option<usize>,
    position: Option<PositionReport>,
}

const HYPERPLANE_SEARCH_LIMIT: usize = 3000;

/// Largest subset lying in a hyperplane, among coordinate hyperplanes and spans of `r-1` points.
fn best_hyperplane_subset(field: Field, r: usize, points: &[Vec<Scalar>]) -> Option<Vec<usize>> {
    let mut candidates: Vec<Vec<Scalar>> = (0..r)
        .rev()
        .map(|k| (0..r).map(|i| if i == k { field.one() } else { field.zero() }).collect())
        .collect();
    if combinations(points.len(), r - 1).len() <= HYPERPLANE_SEARCH_LIMIT {
        for idx in combinations(points.len(), r - 1) {
            let rows: Vec<Vec<Scalar>> = idx.iter().map(|&i| points[i].clone()).collect();
            let m = ExactMatrix::from_rows(field, r, rows).expect("field");
            if m.rank() == r - 1 {
                candidates.push(m.kernel_basis().remove(0));
            }
        }
    }
    let mut best: Option<Vec<usize>> = None;
    for h in candidates {
        let inside: Vec<usize> = (0..points.len())
            .filter(|&i| {
                let dot = points[i].iter().zip(&h).fold(field.zero(), |acc, (a, b)| &acc + &(a * b));
                dot.is_zero()
            })
            .collect();
        if inside.len() < points.len() && inside.len() > best.as_ref().map_or(0, |b| b.len()) {
            best = Some(inside);
        }
    }
    best
}

fn classify_points(field: Field, r: usize, points: &[Vec<Scalar>], labels: &[usize]) -> Result<PointOutcome> {
    let s = points.len();
    if r >= 4 {
        if let Some((step, reduced)) = reduce_once(field, r, points) {
            let mut out = classify_points(field, r - 1, &reduced, labels)?;
            out.verdict.cite(cite::HYPERPLANE);
            out.verdict.reasons.insert(0, step.describe());
            out.reductions.insert(0, step);
            return Ok(out);
        }
        if let Some(inside) = best_hyperplane_subset(field, r, points) {
            let sub: Vec<Vec<Scalar>> = inside.iter().map(|&i| points[i].clone()).collect();
            let sub_labels: Vec<usize> = inside.iter().map(|&i| labels[i]).collect();
            if let Some((step, reduced)) = reduce_once(field, r, &sub) {
                let mut out = classify_points(field, r - 1, &reduced, &sub_labels)?;
                if out.verdict.status == MdsStatus::NotMds {
                    out.verdict.cite(cite::HYPERPLANE);
                    out.verdict.cite(cite::SUPERSET);
                    out.verdict.reasons.insert(
                        0,
                        format!("{} of the {s} points lie in a hyperplane: {}", inside.len(), step.describe()),
                    );
                    out.reductions.insert(0, step);
                    return Ok(out);
                }
            }
        }
    }
    let mut cubic_space_dim = None;
    if r == 3 && s >= 9 && !matches!(field.characteristic(), 2 | 3) {
        if let Some(w) = find_totaro_subset(field, points)? {
            let rays: Vec<usize> = w.indices.iter().map(|&i| labels[i]).collect();
            let mut v = Verdict::new(
                MdsStatus::NotMds,
                cite::TOTARO,
                format!("the points on rays {} form the Totaro configuration", ray_list(&rays)),
            );
            v.cite(cite::CUBIC_PENCIL);
            v.reasons.push(format!(
                "cubics through them: dimension {}, transverse base locus: {}",
                w.pencil.cubic_space_dim, w.pencil.transverse
            ));
            if s > 9 {
                v.cite(cite::SUPERSET);
            }
            return Ok(PointOutcome {
                verdict: v,
                reductions: Vec::new(),
                totaro: Some(rays),
                cubic_space_dim: Some(w.pencil.cubic_space_dim),
                position: None,
            });
        }
        cubic_space_dim = None;
    }
    let rep = position_report(field, r, points)?;
    let verdict = mds_classify(r, s, PositionFlags::from_report(&rep, true));
    Ok(PointOutcome { verdict, reductions: Vec::new(), totaro: None, cubic_space_dim, position: Some(rep) })
}

/// Whether the centers are all spans of at most `r-2` of `r+1` points in general position.
fn kapranov_structure(a: &Arrangement) -> bool {
    let r = a.rank();
    let field = a.field();
    let centers = a.centers();
    let points: Vec<Vec<Scalar>> = centers
        .iter()
        .filter(|m| m.is_point())
        .map(|m| m.locus().basis_rows().remove(0))
        .collect();
    if r < 3 || points.len() != r + 1 {
        return false;
    }
    match position_report(field, r, &points) {
        Ok(rep) if rep.general_position => {}
        _ => return false,
    }
    let mut expected = Vec::new();
    for k in 1..=r - 2 {
        for idx in combinations(r + 1, k) {
            let span = Subspace::span(field, r, idx.iter().map(|&i| points[i].clone()).collect());
            match span {
                Ok(s) => expected.push(s),
                Err(_) => return false,
            }
        }
    }
    centers.len() == expected.len() && centers.iter().all(|m| expected.contains(&m.locus()))
}

pub fn bundle_mds_report(b: &ToricVectorBundle) -> Result<MdsReport> {
    let a = Arrangement::from_bundle(b);
    let r = a.rank();
    let field = a.field();
    let centers = a.centers();
    let mut annotations = Vec::new();
    let extended = !a.hyperplanes().is_empty()
        || a.has_repetitions()
        || b.filtrations().iter().any(|f| f.step > 1);
    let kapranov = kapranov_structure(&a);
    if kapranov {
        annotations.push(format!(
            "Bl_S P^{} is isomorphic to the Deligne-Mumford moduli space M̄_{{0,{}}} (Kapranov); finite generation here is equivalent to finite generation of the Cox ring of M̄_{{0,{}}}",
            r - 1,
            r + 2,
            r + 2
        ));
    }
    let mut out = if centers.is_empty() {
        PointOutcome {
            verdict: Verdict::new(MdsStatus::Mds, cite::EMPTY_ARRANGEMENT, format!("nothing is blown up: the base is P^{}", r - 1)),
            reductions: Vec::new(),
            totaro: None,
            cubic_space_dim: None,
            position: None,
        }
    } else if let Some(points) = a.points() {
        let labels: Vec<usize> = centers.iter().map(|m| m.rays[0]).collect();
        let mut o = classify_points(field, r, &points, &labels)?;
        if kapranov && o.verdict.status != MdsStatus::Mds {
            o.verdict = Verdict::new(MdsStatus::Unknown, cite::KAPRANOV, "Kapranov arrangement".into());
        } else if kapranov {
            o.verdict.cite(cite::KAPRANOV);
        }
        o
    } else if kapranov {
        PointOutcome {
            verdict: Verdict::new(
                MdsStatus::Unknown,
                cite::KAPRANOV,
                format!("finite generation of the Cox ring of M̄_{{0,{}}} is not known", r + 2),
            ),
            reductions: Vec::new(),
            totaro: None,
            cubic_space_dim: None,
            position: None,
        }
    } else {
        PointOutcome {
            verdict: Verdict::new(MdsStatus::Unknown, "no-criterion", "centers of positive dimension; no criterion applies".into()),
            reductions: Vec::new(),
            totaro: None,
            cubic_space_dim: None,
            position: None,
        }
    };
    out.verdict.citations.insert(0, cite::COX_TRANSFER.to_string());
    if extended {
        out.verdict.cite(cite::SINGLE_SUBSPACE);
    }
    if out.verdict.status == MdsStatus::NotMds && out.verdict.conditional {
        annotations.push("the points are certified general for finitely many conditions only".into());
    }
    Ok(MdsReport {
        verdict: out.verdict,
        reductions: out.reductions,
        totaro_rays: out.totaro,
        cubic_space_dim: out.cubic_space_dim,
        position: out.position,
        annotations,
    })
}

/// Helper for sign checks on rational coefficients.
pub fn is_nonnegative(q: &BigRational) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{example_1_5_bundle, kapranov_bundle, losev_manin_bundle};
    use crate::fan::{example_4_2_fan, projective_space_fan};
    use crate::klyachko::{cotangent_bundle, standard_bundle};
    use crate::lattice::to_big;

    #[test]
    fn classifier_table() {
        let g = PositionFlags { general: true, ..Default::default() };
        let vg = PositionFlags { general: true, very_general: true, ..Default::default() };
        assert_eq!(mds_classify(3, 8, g).status, MdsStatus::Mds);
        let v = mds_classify(3, 9, vg);
        assert_eq!(v.status, MdsStatus::NotMds);
        assert!(v.conditional);
        assert_eq!(mds_classify(3, 9, PositionFlags { collinear: true, ..Default::default() }).status, MdsStatus::Mds);
        assert_eq!(mds_classify(3, 9, PositionFlags { on_rnc: true, general: true, ..Default::default() }).status, MdsStatus::Mds);
        assert_eq!(mds_classify(4, 7, g).status, MdsStatus::Mds);
        assert_eq!(mds_classify(4, 8, vg).status, MdsStatus::NotMds);
        assert_eq!(mds_classify(3, 9, g).status, MdsStatus::Unknown);
    }

    #[test]
    fn threshold_identity() {
        for r in 3..=64 {
            for s in r + 1..=200 {
                assert_eq!(threshold_fails(r, s), mukai_bound(r, s), "r={r} s={s}");
            }
        }
    }

    #[test]
    fn example_1_5_presentation() {
        let (b, _) = example_1_5_bundle(Field::Rational, 1).unwrap();
        let p = cox_presentation(&b).unwrap();
        assert_eq!(p.base.name, "R(Bl_9 P^2)");
        assert_eq!(p.generators().len(), 2);
        assert_eq!(p.free_variables.len(), 2);
        assert!(p.relations.is_empty());
        assert_eq!(p.class_group.rank(), 10);
        assert!(p.class_group.phi_available);
        let rep = bundle_mds_report(&b).unwrap();
        assert_eq!(rep.verdict.status, MdsStatus::NotMds);
        assert!(rep.verdict.conditional);
    }

    #[test]
    fn longer_step_relation() {
        let f = Field::Rational;
        let fan = projective_space_fan(2).unwrap();
        let plane = Subspace::perp_of(f, &to_big(&[1, 2, 3])).unwrap();
        let b = standard_bundle(fan, f, 3, vec![plane, Subspace::zero(f, 3), Subspace::zero(f, 3)], vec![3, 1, 1]).unwrap();
        let p = cox_presentation(&b).unwrap();
        assert_eq!(p.base.name, "R(Bl_1 P^2)");
        assert_eq!(p.relations.len(), 1);
        assert_eq!(p.format_relation(&p.relations[0]), "1_E1 - x1^3");
        assert_eq!(p.free_variables.len(), 2);
        assert!(p.is_homogeneous());
    }

    #[test]
    fn tangent_rings() {
        for d in 2..=4 {
            let p = tangent_cox_ring(&projective_space_fan(d).unwrap(), Field::Rational).unwrap();
            assert_eq!(p.relations.len(), 1);
            let expect: Vec<String> = (1..=d + 1).map(|i| format!("x{i}*y{i}")).collect();
            assert_eq!(p.format_relation(&p.relations[0]), expect.join(" + "));
            assert!(p.is_homogeneous());
        }
        let p = tangent_cox_ring(&example_4_2_fan().unwrap(), Field::Rational).unwrap();
        assert_eq!(p.relations.len(), 11);
        assert!(p.is_homogeneous());
    }

    #[test]
    fn tangent_bundle_presentation_has_pairs() {
        let b = tangent_bundle(&projective_space_fan(2).unwrap(), Field::Rational).unwrap();
        let p = cox_presentation(&b).unwrap();
        assert_eq!(p.relations.len(), 3);
        assert_eq!(p.format_relation(&p.relations[0]), "1_H1 - x1*y1");
        assert!(p.is_homogeneous());
    }

    #[test]
    fn cotangent_verdicts() {
        let b = cotangent_bundle(&projective_space_fan(3).unwrap(), Field::Rational).unwrap().normalize();
        assert_eq!(bundle_mds_report(&b).unwrap().verdict.status, MdsStatus::Mds);
        let b = cotangent_bundle(&example_4_2_fan().unwrap(), Field::Rational).unwrap().normalize();
        let rep = bundle_mds_report(&b).unwrap();
        assert_eq!(rep.verdict.status, MdsStatus::NotMds);
        assert!(!rep.verdict.conditional);
        assert!(rep.verdict.citations.iter().any(|c| c == cite::TOTARO));
        assert_eq!(rep.totaro_rays, Some(vec![0, 2, 5, 6, 7, 10, 11, 12, 13]));
    }

    #[test]
    fn losev_manin_presentations() {
        for d in 2..=3 {
            let b = losev_manin_bundle(d, Field::Rational).unwrap().normalize();
            let p = cox_presentation(&b).unwrap();
            assert_eq!(p.free_variables.len(), d + 1);
            assert_eq!(p.relations.len(), d * (d + 1) / 2);
            assert!(p.is_homogeneous());
        }
    }

    #[test]
    fn kapranov_is_unknown() {
        let b = kapranov_bundle(4, Field::Rational).unwrap();
        let rep = bundle_mds_report(&b).unwrap();
        assert_eq!(rep.verdict.status, MdsStatus::Unknown);
        assert!(rep.annotations[0].contains("isomorphic to the Deligne-Mumford moduli space"));
    }

    #[test]
    fn reduction_errors_when_spanning() {
        let f = Field::Rational;
        let pts: Vec<Vec<Scalar>> = (0..4)
            .map(|i| (0..4).map(|j| f.from_i64(if i == j { 1 } else { 0 })).collect())
            .collect();
        assert!(hyperplane_reduction(f, 4, &pts).is_err());
    }
}
