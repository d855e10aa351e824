//! Divisor classes of orbit closures, effective-cone generators, and `(-1)`-class enumeration.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arrangement::Arrangement;
use crate::coxring::{class_group_projectivization, ClassGroup, DivisorClass, ProjectivizationClassGroup};
use crate::error::{Error, Result};
use crate::klyachko::ToricVectorBundle;
use crate::lattice::{Field, Scalar};
use crate::poly::{monomials_of_degree, Polynomial};

/// The class group of `Bl_S P_F`: `L` and one `E` per center, in arrangement order.
pub fn blowup_class_group(b: &ToricVectorBundle) -> ClassGroup {
    let a = Arrangement::from_bundle(b);
    let rays: Vec<usize> = a.centers().iter().map(|m| m.rays[0]).collect();
    ClassGroup::blowup(&rays)
}

/// Sends `L` to `O(1)` and `E_k` to the class of the boundary divisor carrying the `k`-th center.
pub fn phi_star(b: &ToricVectorBundle, c: &DivisorClass) -> Result<DivisorClass> {
    let cg = class_group_projectivization(b)?;
    phi_star_with(b, &cg, c)
}

pub fn phi_star_with(b: &ToricVectorBundle, cg: &ProjectivizationClassGroup, c: &DivisorClass) -> Result<DivisorClass> {
    if !cg.phi_available {
        return Err(Error::Unavailable("no maximal cone has all subspaces zero".into()));
    }
    let a = Arrangement::from_bundle(b);
    if a.has_repetitions() {
        return Err(Error::Unavailable("phi* is undefined when a subspace repeats".into()));
    }
    let centers = a.centers();
    if c.0.len() != centers.len() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "class has {} coordinates, the blowup group has rank {}",
            c.0.len(),
            centers.len() + 1
        )));
    }
    let mut out = cg.o1().scale(c.0[0]);
    for (k, m) in centers.iter().enumerate() {
        out = out.add(&cg.ray_class(m.rays[0]).scale(c.0[k + 1]));
    }
    Ok(out)
}

/// A homogeneous form of degree `m` in `r` variables, stored densely in the graded monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousForm {
    pub field: Field,
    pub nvars: usize,
    pub degree: u32,
    pub coeffs: Vec<Scalar>,
}

impl HomogeneousForm {
    pub fn new(field: Field, nvars: usize, degree: u32, coeffs: Vec<Scalar>) -> Result<Self> {
        let expected = monomials_of_degree(nvars, degree).len();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch(format!("{} coefficients for {expected} monomials", coeffs.len())));
        }
        let coeffs = coeffs.iter().map(|c| field.convert(c)).collect::<Result<_>>()?;
        Ok(HomogeneousForm { field, nvars, degree, coeffs })
    }

    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        let degree = p.degree().ok_or_else(|| Error::Precondition("the zero polynomial has no degree".into()))?;
        if !p.is_homogeneous() {
            return Err(Error::Precondition(format!("{p} is not homogeneous")));
        }
        Ok(HomogeneousForm {
            field: p.field(),
            nvars: p.nvars(),
            degree,
            coeffs: p.dense_coefficients(degree),
        })
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_dense(self.field, self.nvars, self.degree, &self.coeffs).expect("validated")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, other: &HomogeneousForm) -> HomogeneousForm {
        HomogeneousForm::from_polynomial(&self.to_polynomial().mul(&other.to_polynomial()))
            .expect("product of nonzero forms")
    }
}

fn pivot(p: &[Scalar]) -> Result<usize> {
    p.iter().position(|x| !x.is_zero()).ok_or(Error::ZeroVector)
}

/// Vanishing order at `[p]`: translate to the affine chart where the pivot coordinate is fixed and
/// read off the lowest degree present.
pub fn multiplicity_at(h: &HomogeneousForm, p: &[Scalar]) -> Result<u32> {
    if h.is_zero() {
        return Err(Error::Precondition("the zero form has no multiplicity".into()));
    }
    if p.len() != h.nvars {
        return Err(Error::DimensionMismatch(format!("point of length {} for {} variables", p.len(), h.nvars)));
    }
    let k = pivot(p)?;
    let f = h.field;
    let images: Vec<Polynomial> = (0..h.nvars)
        .map(|i| {
            let c = Polynomial::constant(f, h.nvars, f.convert(&p[i]).expect("field"));
            if i == k {
                c
            } else {
                c.add(&Polynomial::variable(f, h.nvars, i))
            }
        })
        .collect();
    Ok(h.to_polynomial().substitute(&images).min_degree().expect("nonzero after translation"))
}

/// Class of the closure of `T·H` in `P(ℱ)`: `m O(1) - Σ m_i D_i` over the rays with nonzero subspace.
pub fn orbit_closure_class(h: &HomogeneousForm, b: &ToricVectorBundle) -> Result<DivisorClass> {
    b.require_normalized()?;
    if h.nvars != b.rank() || h.field != b.field() {
        return Err(Error::DimensionMismatch("form and bundle disagree on rank or field".into()));
    }
    let cg = class_group_projectivization(b)?;
    let mut class = cg.o1().scale(h.degree as i64);
    for (j, f) in b.filtrations().iter().enumerate() {
        if f.subspace.is_zero() {
            continue;
        }
        if f.subspace.dim() + 1 != b.rank() {
            return Err(Error::OutOfScope(format!("the center of ray {} is not a point", j + 1)));
        }
        if f.step != 1 {
            return Err(Error::OutOfScope(format!("ray {} has step {}", j + 1, f.step)));
        }
        let p = f.subspace.annihilator().basis_rows().remove(0);
        let m = multiplicity_at(h, &p)?;
        class = class.sub(&cg.ray_class(j).scale(m as i64));
    }
    Ok(class)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub class: DivisorClass,
    pub provenance: String,
}

/// `φ*` of the supplied effective classes, followed by the boundary divisors with zero subspace.
pub fn effective_generators(b: &ToricVectorBundle, supplied: &[DivisorClass]) -> Result<Vec<Generator>> {
    let cg = class_group_projectivization(b)?;
    let bl = blowup_class_group(b);
    let mut out: Vec<Generator> = Vec::new();
    let mut push = |g: Generator| {
        if !out.iter().any(|o| o.class == g.class) {
            out.push(g);
        }
    };
    for c in supplied {
        let image = phi_star_with(b, &cg, c)?;
        push(Generator { class: image, provenance: format!("phi*({})", bl.format(c)) });
    }
    if !cg.phi_available {
        return Err(Error::Unavailable("no maximal cone has all subspaces zero".into()));
    }
    for j in b.zero_rays() {
        push(Generator { class: cg.ray_class(j).clone(), provenance: format!("D_{} (zero subspace)", j + 1) });
    }
    Ok(out)
}

/// `dL - Σ m_i E_i` on a blown-up plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveClass {
    pub degree: i64,
    pub mults: Vec<i64>,
}

impl CurveClass {
    pub fn new(degree: i64, mults: Vec<i64>) -> Self {
        CurveClass { degree, mults }
    }

    pub fn self_intersection(&self) -> i64 {
        self.degree * self.degree - self.mults.iter().map(|m| m * m).sum::<i64>()
    }

    pub fn anticanonical_degree(&self) -> i64 {
        3 * self.degree - self.mults.iter().sum::<i64>()
    }

    pub fn is_minus_one_class(&self) -> bool {
        self.self_intersection() == -1 && self.anticanonical_degree() == 1
    }

    /// Multiplicities sorted in decreasing order.
    pub fn canonical(&self) -> CurveClass {
        let mut m = self.mults.clone();
        m.sort_unstable_by(|a, b| b.cmp(a));
        CurveClass { degree: self.degree, mults: m }
    }

    pub fn as_divisor(&self) -> DivisorClass {
        let mut v = vec![self.degree];
        v.extend(self.mults.iter().map(|m| -m));
        DivisorClass(v)
    }

    /// Number of distinct reorderings of the multiplicities.
    pub fn orbit_size(&self) -> u128 {
        let mut counts = std::collections::BTreeMap::new();
        for m in &self.mults {
            *counts.entry(m).or_insert(0u32) += 1;
        }
        let mut total: u128 = (1..=self.mults.len() as u128).product();
        for &c in counts.values() {
            total /= (1..=c as u128).product::<u128>();
        }
        total
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.mults.iter().map(|x| x.to_string()).collect();
        write!(f, "({}; {})", self.degree, m.join(","))
    }
}

/// The quadratic transformation centered at positions `i, j, k`.
pub fn cremona_move(c: &CurveClass, i: usize, j: usize, k: usize) -> CurveClass {
    let delta = c.degree - c.mults[i] - c.mults[j] - c.mults[k];
    let mut mults = c.mults.clone();
    for t in [i, j, k] {
        mults[t] += delta;
    }
    CurveClass { degree: c.degree + delta, mults }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Number of breadth-first levels after the seeds.
    pub depth: usize,
    pub max_degree: Option<i64>,
    pub max_count: Option<usize>,
}

impl Budget {
    pub fn depth(depth: usize) -> Self {
        Budget { depth, max_degree: None, max_count: None }
    }

    pub fn degree(max_degree: i64) -> Self {
        Budget { depth: usize::MAX, max_degree: Some(max_degree), max_count: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinusOneEnumeration {
    /// Canonical classes in discovery order, level by level.
    pub levels: Vec<Vec<CurveClass>>,
}

impl MinusOneEnumeration {
    pub fn classes(&self) -> Vec<&CurveClass> {
        self.levels.iter().flatten().collect()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level_max_degrees(&self) -> Vec<i64> {
        self.levels.iter().map(|l| l.iter().map(|c| c.degree).max().unwrap_or(0)).collect()
    }

    /// Classes counted with all reorderings of their multiplicities.
    pub fn labelled_count(&self) -> u128 {
        self.levels.iter().flatten().map(CurveClass::orbit_size).sum()
    }
}

pub fn minus_one_classes(s: usize, budget: Budget) -> Result<MinusOneEnumeration> {
    if s < 3 {
        return Err(Error::Precondition("at least three points are needed".into()));
    }
    let within = |c: &CurveClass| budget.max_degree.map_or(true, |d| c.degree <= d);
    let mut e = vec![0; s];
    e[0] = -1;
    let mut line = vec![0; s];
    line[0] = 1;
    line[1] = 1;
    let seeds: Vec<CurveClass> = [CurveClass::new(0, e), CurveClass::new(1, line)]
        .into_iter()
        .map(|c| c.canonical())
        .filter(within)
        .collect();
    let mut seen: BTreeSet<CurveClass> = seeds.iter().cloned().collect();
    let mut levels = vec![seeds];
    let mut count = seen.len();
    let triples = crate::fan::combinations(s, 3);
    while levels.len() <= budget.depth {
        let mut next = BTreeSet::new();
        for c in levels.last().expect("seeded") {
            for t in &triples {
                let n = cremona_move(c, t[0], t[1], t[2]).canonical();
                if within(&n) && !seen.contains(&n) {
                    next.insert(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        let mut level: Vec<CurveClass> = next.into_iter().collect();
        if let Some(max) = budget.max_count {
            level.truncate(max.saturating_sub(count));
        }
        count += level.len();
        seen.extend(level.iter().cloned());
        debug_assert!(level.iter().all(CurveClass::is_minus_one_class));
        let stop = level.is_empty() || budget.max_count.is_some_and(|m| count >= m);
        if !level.is_empty() {
            levels.push(level);
        }
        if stop {
            break;
        }
    }
    Ok(MinusOneEnumeration { levels })
}

/// All canonical solutions of `d² - Σm² = -1`, `3d - Σm = 1` with `0 <= d <= max_degree`, by direct search.
pub fn minus_one_oracle(s: usize, max_degree: i64) -> BTreeSet<CurveClass> {
    fn rec(d: i64, s: usize, hi: i64, lo: i64, acc: &mut Vec<i64>, slack: i64, out: &mut BTreeSet<CurveClass>) {
        if acc.len() == s {
            let c = CurveClass::new(d, acc.clone());
            if c.is_minus_one_class() {
                out.insert(c);
            }
            return;
        }
        for m in (lo..=hi).rev() {
            // every m(m-1) is nonnegative and they sum to (d-1)(d-2)
            let cost = m * (m - 1);
            if cost > slack {
                continue;
            }
            acc.push(m);
            rec(d, s, m, lo, acc, slack - cost, out);
            acc.pop();
        }
    }
    let mut out = BTreeSet::new();
    for d in 0..=max_degree {
        let bound = d + 1;
        rec(d, s, bound, -bound, &mut Vec::new(), (d - 1) * (d - 2), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonpolyhedralityReport {
    pub rank: usize,
    pub n_rays: usize,
    pub dim: usize,
    /// Rays lying in neither `σ` nor `-σ`.
    pub offending_rays: Vec<usize>,
    /// `1/r + 1/(n-d-r)` when `n - d - r > 0`.
    pub inequality_value: Option<BigRational>,
    pub inequality_holds: bool,
    pub hypotheses_met: bool,
    pub enumeration: Option<MinusOneEnumeration>,
    pub images: Vec<DivisorClass>,
    pub conditional: bool,
    pub message: String,
}

impl NonpolyhedralityReport {
    pub fn rays_in_sigma_or_minus_sigma(&self) -> bool {
        self.offending_rays.is_empty()
    }
}

pub fn nonpolyhedrality_report(b: &ToricVectorBundle, budget: Budget) -> Result<NonpolyhedralityReport> {
    let cg = class_group_projectivization(b)?;
    if !cg.phi_available {
        return Err(Error::Unavailable("no maximal cone has all subspaces zero".into()));
    }
    let fan = b.fan();
    let (n, d, r) = (fan.n_rays(), fan.dim(), b.rank());
    let inv = fan.cone_matrix(&cg.sigma).inverse().expect("smooth cone");
    let mut offending = Vec::new();
    for j in 0..n {
        let coords: Vec<BigRational> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|t| {
                        inv.get(t, k).as_rational().expect("rational").clone()
                            * BigRational::from_integer(fan.ray(j)[t].clone())
                    })
                    .sum()
            })
            .collect();
        let pos = coords.iter().all(|c| !c.is_negative());
        let neg = coords.iter().all(|c| !c.is_positive());
        if !pos && !neg {
            offending.push(j);
        }
    }
    let excess = n as i64 - d as i64 - r as i64;
    let inequality_value = (excess > 0).then(|| {
        BigRational::new(BigInt::one(), BigInt::from(r)) + BigRational::new(BigInt::one(), BigInt::from(excess))
    });
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let inequality_holds = inequality_value.as_ref().is_some_and(|v| *v <= half);
    let hypotheses_met = offending.is_empty() && inequality_holds;
    let a = Arrangement::from_bundle(b);
    let s = a.centers().len();
    let mut report = NonpolyhedralityReport {
        rank: r,
        n_rays: n,
        dim: d,
        offending_rays: offending,
        inequality_value,
        inequality_holds,
        hypotheses_met,
        enumeration: None,
        images: Vec::new(),
        conditional: true,
        message: String::new(),
    };
    if !hypotheses_met {
        report.message = "hypotheses not met".into();
        return Ok(report);
    }
    if r != 3 || s != 9 || a.points().is_none() {
        report.message = "hypotheses met; enumeration is only run for nine points in the plane".into();
        return Ok(report);
    }
    let e = minus_one_classes(s, budget)?;
    for c in e.classes() {
        report.images.push(phi_star_with(b, &cg, &c.as_divisor())?);
    }
    let degrees = e.level_max_degrees();
    report.message = format!(
        "hypotheses met; {} canonical (-1)-classes over {} levels, maximal degree {}; the pseudoeffective cone is not polyhedral if the points are very general",
        e.len(),
        e.levels.len(),
        degrees.last().copied().unwrap_or(0)
    );
    report.enumeration = Some(e);
    Ok(report)
}

/// Dense form of a product of linear forms, convenient for tests and fixtures.
pub fn product_of_linear_forms(field: Field, forms: &[Vec<Scalar>]) -> Result<HomogeneousForm> {
    let r = forms.first().map_or(0, Vec::len);
    let mut p = Polynomial::constant(field, r, field.one());
    for l in forms {
        p = p.mul(&Polynomial::linear(field, l));
    }
    if p.is_zero() {
        return Err(Error::ZeroVector);
    }
    HomogeneousForm::from_polynomial(&p)
}

/// Independent vanishing-order computation: binomial expansion of every monomial in every valid
/// chart, checking that all charts agree.
pub fn multiplicity_oracle(h: &HomogeneousForm, p: &[Scalar]) -> u32 {
    let f = h.field;
    let r = h.nvars;
    let mut answer = None;
    for k in (0..r).filter(|&k| !p[k].is_zero()) {
        // coefficient of y^beta (beta over non-pivot variables) collected in a dense map
        let mut acc: std::collections::BTreeMap<Vec<u32>, Scalar> = Default::default();
        for (e, c) in monomials_of_degree(r, h.degree).iter().zip(&h.coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut partial: Vec<(Vec<u32>, Scalar)> = vec![(vec![0; r], c.clone())];
            for i in 0..r {
                let mut next = Vec::new();
                for (beta, coeff) in &partial {
                    if i == k {
                        next.push((beta.clone(), coeff * &p[k].pow(e[i])));
                        continue;
                    }
                    for t in 0..=e[i] {
                        let binom = f.from_int(&binomial(e[i], t));
                        let mut b2 = beta.clone();
                        b2[i] = t;
                        next.push((b2, &(coeff * &binom) * &p[i].pow(e[i] - t)));
                    }
                }
                partial = next;
            }
            for (beta, coeff) in partial {
                let slot = acc.entry(beta).or_insert_with(|| f.zero());
                *slot = &*slot + &coeff;
            }
        }
        let m = acc
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(beta, _)| beta.iter().sum::<u32>())
            .min()
            .expect("nonzero form");
        match answer {
            None => answer = Some(m),
            Some(a) => assert_eq!(a, m, "charts disagree"),
        }
    }
    answer.expect("nonzero point")
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Convenience: whether a rational is zero, for report rendering.
pub fn is_zero_rational(q: &BigRational) -> bool {
    q.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::example_1_5_bundle;

    fn q(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Field::Rational.from_i64(x)).collect()
    }

    #[test]
    fn multiplicities() {
        let f = Field::Rational;
        let line = product_of_linear_forms(f, &[q(&[1, 1, 1])]).unwrap();
        assert_eq!(multiplicity_at(&line, &q(&[1, 0, 0])).unwrap(), 0);
        let two = product_of_linear_forms(f, &[q(&[0, 1, 0]), q(&[0, 0, 1])]).unwrap();
        assert_eq!(multiplicity_at(&two, &q(&[1, 0, 0])).unwrap(), 2);
        // x^2 z - y^2 z + x^3 has a node at [0:0:1]
        let cubic = HomogeneousForm::from_polynomial(&Polynomial::parse("z1^2*z3 - z2^2*z3 + z1^3", 3, f).unwrap()).unwrap();
        assert_eq!(multiplicity_at(&cubic, &q(&[0, 0, 1])).unwrap(), 2);
        assert_eq!(multiplicity_oracle(&cubic, &q(&[0, 0, 1])), 2);
        assert_eq!(multiplicity_at(&cubic, &q(&[-1, 0, 1])).unwrap(), 1);
    }

    #[test]
    fn example_1_5_generators_and_classes() {
        let (b, _) = example_1_5_bundle(Field::Rational, 1).unwrap();
        let cg = class_group_projectivization(&b).unwrap();
        let bl = blowup_class_group(&b);
        assert_eq!(bl.rank(), 10);
        let supplied: Vec<DivisorClass> = (0..10).map(|i| DivisorClass::basis(10, i)).collect();
        let gens = effective_generators(&b, &supplied).unwrap();
        assert_eq!(gens.len(), 12);
        assert_eq!(gens[0].class, cg.o1());
        assert_eq!(gens[5].class, *cg.ray_class(4));
        assert_eq!(effective_generators(&b, &[]).unwrap().len(), 2);
        let anti = DivisorClass(std::iter::once(3).chain(std::iter::repeat(-1).take(9)).collect());
        let image = phi_star(&b, &anti).unwrap();
        assert_eq!(cg.format(&image), "3O(1) - D_1 - D_2 - D_3 - D_4 - D_5 - D_6 - D_7 - D_8 - D_9");

        let plane = HomogeneousForm::from_polynomial(&Polynomial::parse("z1 + 2*z2 + 3*z3", 3, Field::Rational).unwrap()).unwrap();
        let c = orbit_closure_class(&plane, &b).unwrap();
        assert!(c == cg.o1() || cg.format(&c).starts_with("O(1) -"));
    }

    #[test]
    fn cremona_is_an_involution() {
        let c = CurveClass::new(4, vec![2, 2, 2, 1, 1, 1, 1, 1, 0]);
        assert!(c.is_minus_one_class());
        let m = cremona_move(&c, 0, 1, 8);
        assert_eq!(cremona_move(&m, 0, 1, 8), c);
        assert!(m.is_minus_one_class());
    }

    #[test]
    fn bfs_matches_oracle() {
        let bfs: BTreeSet<CurveClass> = minus_one_classes(9, Budget::degree(6)).unwrap().classes().into_iter().cloned().collect();
        assert_eq!(bfs, minus_one_oracle(9, 6));
    }

    #[test]
    fn levels_grow() {
        let e = minus_one_classes(9, Budget::depth(5)).unwrap();
        let d = e.level_max_degrees();
        assert_eq!(d.len(), 6);
        assert!(d.windows(2).all(|w| w[0] < w[1]), "{d:?}");
    }
}
