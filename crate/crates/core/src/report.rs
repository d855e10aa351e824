//! Deterministic reports: one ordered JSON document per run, with a plain-text rendering.

use serde_json::{json, Map, Value};

use crate::arrangement::{
    example_1_5_bundle, intersection_closure, kapranov_bundle, losev_manin_bundle, Arrangement, PositionReport,
};
use crate::cones::{blowup_class_group, nonpolyhedrality_report, orbit_closure_class, Budget, HomogeneousForm};
use crate::coxring::{
    bundle_mds_report, cox_presentation, hyperplane_reduction, mds_classify, tangent_cox_ring, AtomKind,
    CoxPresentation, MdsReport, MdsStatus, PositionFlags, Verdict,
};
use crate::error::{Error, Result};
use crate::fan::{
    example_4_2_fan, example_4_2_sequence, extend_fan_theorem14, is_complete, is_projective, is_smooth,
    is_smooth_star_point, projective_space_fan, validate_fan, Fan,
};
use crate::io::Input;
use crate::klyachko::{check_compatibility, cotangent_bundle, tangent_bundle, Compatibility, ToricVectorBundle};
use crate::lattice::{format_vector, Field, Scalar};
use crate::poly::Polynomial;

/// Settings shared by every report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub field: Field,
    pub seed: u64,
    /// Breadth-first depth for the `(-1)`-class search.
    pub budget: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { field: Field::Rational, seed: 1, budget: 5 }
    }
}

pub const MAX_BUDGET: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub doc: Value,
    /// False when validation found errors.
    pub ok: bool,
}

impl Report {
    fn new(command: &str, input: &str, opts: &Options) -> Self {
        let mut m = Map::new();
        m.insert("command".into(), json!(command));
        m.insert("input".into(), json!(input));
        m.insert("char".into(), json!(opts.field.characteristic()));
        m.insert("seed".into(), json!(opts.seed));
        m.insert("budget".into(), json!(opts.budget));
        Report { doc: Value::Object(m), ok: true }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.doc.as_object_mut().expect("object").insert(key.into(), v);
    }

    fn finish(mut self, citations: Vec<String>, conclusion: String) -> Self {
        let mut seen: Vec<String> = Vec::new();
        for c in citations {
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        self.set("citations", json!(seen));
        self.set("conclusion", json!(conclusion));
        self
    }

    pub fn conclusion(&self) -> Option<&str> {
        self.doc.get("conclusion").and_then(Value::as_str)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("serializable") + "\n"
    }

    /// Indented key/value rendering of the document; the conclusion is printed last, on its own.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let obj = self.doc.as_object().expect("object");
        for (k, v) in obj {
            if k != "conclusion" {
                render(&mut out, k, v, 0);
            }
        }
        if let Some(c) = self.conclusion() {
            out.push_str(c);
            out.push('\n');
        }
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in m {
                render(out, k, x, depth + 1);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            out.push_str(&format!("{pad}{key}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for x in items {
                match x {
                    Value::Object(m) => {
                        let mut first = true;
                        for (k, y) in m {
                            let mut buf = String::new();
                            render(&mut buf, k, y, depth + 2);
                            let line = buf.trim_start().to_string();
                            if first {
                                out.push_str(&format!("{pad}  - {line}"));
                                first = false;
                            } else {
                                out.push_str(&format!("{pad}    {line}"));
                            }
                        }
                    }
                    Value::Array(a) => {
                        let parts: Vec<String> = a.iter().map(scalar_text).collect();
                        out.push_str(&format!("{pad}  - [{}]\n", parts.join(", ")));
                    }
                    other => out.push_str(&format!("{pad}  - {}\n", scalar_text(other))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{key}: {}\n", scalar_text(other))),
    }
}

fn rays_1based(rays: &[usize]) -> Value {
    json!(rays.iter().map(|j| j + 1).collect::<Vec<_>>())
}

pub fn fan_section(fan: &Fan) -> Result<Value> {
    let validation = validate_fan(fan);
    let mut m = Map::new();
    m.insert("dim".into(), json!(fan.dim()));
    m.insert("rays".into(), json!(fan.n_rays()));
    m.insert("max_cones".into(), json!(fan.cones().len()));
    m.insert(
        "violations".into(),
        json!(validation.violations.iter().map(|v| v.message.clone()).collect::<Vec<_>>()),
    );
    if !validation.is_valid() {
        return Ok(Value::Object(m));
    }
    let smooth = is_smooth(fan);
    m.insert("smooth".into(), json!(smooth.smooth));
    if let Some(c) = smooth.witness {
        m.insert("singular_cone".into(), json!(c.to_string()));
    }
    let complete = is_complete(fan)?;
    m.insert("complete".into(), json!(complete));
    if complete {
        m.insert("projective".into(), json!(is_projective(fan)?.projective));
    }
    Ok(Value::Object(m))
}

fn bundle_section(b: &ToricVectorBundle) -> Value {
    let mut m = Map::new();
    m.insert("rank".into(), json!(b.rank()));
    m.insert("zero_rays".into(), rays_1based(&b.zero_rays()));
    m.insert("coincidences".into(), json!(b.coincidences().iter().map(|g| rays_1based(g)).collect::<Vec<_>>()));
    m.insert("steps".into(), json!(b.filtrations().iter().map(|f| f.step).collect::<Vec<_>>()));
    if b.twist().iter().any(|&t| t != 0) {
        m.insert("twist".into(), json!(b.twist()));
    }
    Value::Object(m)
}

fn compatibility_section(b: &ToricVectorBundle) -> Result<(Value, bool)> {
    Ok(match check_compatibility(b)? {
        Compatibility::Compatible(cert) => {
            let mut tiers: Map<String, Value> = Map::new();
            for c in &cert.cones {
                let e = tiers.entry(c.tier.label().to_string()).or_insert(json!(0));
                *e = json!(e.as_u64().unwrap_or(0) + 1);
            }
            (json!({ "compatible": true, "certificate_verified": cert.verify(b), "cones_by_tier": tiers }), true)
        }
        Compatibility::Incompatible { cone, tier, reason } => (
            json!({ "compatible": false, "cone": cone.to_string(), "tier": tier.label(), "reason": reason }),
            false,
        ),
    })
}

fn position_json(p: &PositionReport) -> Value {
    json!({
        "count": p.count,
        "distinct": p.distinct,
        "general_position": p.general_position,
        "collinear": p.collinear,
        "on_rational_normal_curve": p.on_rational_normal_curve,
    })
}

fn arrangement_section(b: &ToricVectorBundle) -> Value {
    let a = Arrangement::from_bundle(b);
    let centers = a.centers();
    let mut m = Map::new();
    m.insert("centers".into(), json!(centers.len()));
    m.insert("point_centers".into(), json!(centers.iter().filter(|c| c.is_point()).count()));
    m.insert("hyperplanes".into(), json!(a.hyperplanes().len()));
    m.insert("repeated".into(), json!(a.members().iter().filter(|c| c.rays.len() > 1).count()));
    m.insert("closure_size".into(), json!(intersection_closure(&a).elements.len()));
    if let (Some(_), Ok(p)) = (a.points(), a.position_report()) {
        if !centers.is_empty() {
            m.insert("position".into(), position_json(&p));
        }
    }
    Value::Object(m)
}

pub fn presentation_json(p: &CoxPresentation) -> Value {
    let cg = &p.class_group;
    let atom = |a: &crate::coxring::Atom| json!({ "name": a.name, "degree": a.degree.0, "degree_text": cg.format(&a.degree) });
    let generators: Vec<Value> = p.atoms.iter().filter(|a| a.kind == AtomKind::Variable).map(atom).collect();
    let sections: Vec<Value> = p.atoms.iter().filter(|a| a.kind == AtomKind::CanonicalSection).map(atom).collect();
    let relations: Vec<Value> = p
        .relations
        .iter()
        .map(|r| {
            let deg = p.relation_degree(r);
            json!({
                "relation": p.format_relation(r),
                "degree": deg.as_ref().map(|d| cg.format(d)),
                "tag": r.tag,
            })
        })
        .collect();
    json!({
        "base": p.base.name,
        "blowup_order": p.base.blowup_order,
        "class_group": {
            "rank": cg.rank(),
            "basis": cg.group.names,
            "sigma": rays_1based(cg.sigma.rays()),
            "phi_available": cg.phi_available,
            "torsion_free": cg.torsion_free,
        },
        "generators": generators,
        "free_variables": p.free_variables.iter().map(|&i| p.atoms[i].name.clone()).collect::<Vec<_>>(),
        "sections": sections,
        "relations": relations,
        "homogeneous": p.is_homogeneous(),
        "annotations": p.annotations,
    })
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "status": v.status.to_string(),
        "conditional": v.conditional,
        "reasons": v.reasons,
    })
}

fn mds_json(r: &MdsReport) -> Value {
    let mut m = verdict_json(&r.verdict).as_object().cloned().expect("object");
    m.insert("reductions".into(), json!(r.reductions.iter().map(|s| s.describe()).collect::<Vec<_>>()));
    if let Some(rays) = &r.totaro_rays {
        m.insert(
            "cubic_pencil_certificate".into(),
            json!({
                "rays": rays_1based(rays),
                "cubic_space_dim": r.cubic_space_dim,
                "transverse": true,
            }),
        );
    }
    if !r.annotations.is_empty() {
        m.insert("annotations".into(), json!(r.annotations));
    }
    Value::Object(m)
}

pub fn conclusion_of(v: &Verdict) -> String {
    match v.status {
        MdsStatus::Unknown => "unknown whether P(E) is a Mori dream space".into(),
        _ => v.summary(),
    }
}

fn effcone_json(b: &ToricVectorBundle, budget: usize) -> Result<Value> {
    let r = nonpolyhedrality_report(b, Budget::depth(budget))?;
    let mut m = Map::new();
    m.insert("rays_in_sigma_or_minus_sigma".into(), json!(r.rays_in_sigma_or_minus_sigma()));
    m.insert("offending_rays".into(), rays_1based(&r.offending_rays));
    m.insert("inequality".into(), json!(r.inequality_value.as_ref().map(|q| format!("1/{} + 1/{} = {}", r.rank, r.n_rays as i64 - r.dim as i64 - r.rank as i64, q))));
    m.insert("inequality_holds".into(), json!(r.inequality_holds));
    m.insert("hypotheses_met".into(), json!(r.hypotheses_met));
    if let Some(e) = &r.enumeration {
        m.insert("levels".into(), json!(e.levels.len()));
        m.insert("level_max_degrees".into(), json!(e.level_max_degrees()));
        m.insert("canonical_classes".into(), json!(e.len()));
        m.insert("labelled_classes".into(), json!(e.labelled_count().to_string()));
        let bl = blowup_class_group(b);
        let cg = crate::coxring::class_group_projectivization(b)?;
        let sample: Vec<Value> = e
            .classes()
            .iter()
            .zip(&r.images)
            .take(12)
            .map(|(c, img)| json!({ "class": c.to_string(), "divisor": bl.format(&c.as_divisor()), "image": cg.format(img) }))
            .collect();
        m.insert("first_classes".into(), Value::Array(sample));
    }
    m.insert("conditional_on_very_general".into(), json!(r.conditional));
    m.insert("message".into(), json!(r.message));
    Ok(Value::Object(m))
}

fn effcone_applies(b: &ToricVectorBundle) -> bool {
    let a = Arrangement::from_bundle(b);
    b.rank() == 3 && a.centers().len() == 9 && a.points().is_some() && !b.zero_rays().is_empty()
}

/// Full pipeline: fan, bundle, compatibility, arrangement, presentation, verdict.
pub fn pipeline_report(command: &str, input: &str, b: &ToricVectorBundle, opts: &Options) -> Result<Report> {
    let b = b.normalize();
    let mut rep = Report::new(command, input, opts);
    let fan = fan_section(b.fan())?;
    rep.set("fan", fan);
    rep.set("bundle", bundle_section(&b));
    let (compat, ok) = compatibility_section(&b)?;
    rep.set("compatibility", compat);
    if !ok {
        rep.ok = false;
        return Ok(rep.finish(Vec::new(), "the filtrations do not define a toric vector bundle".into()));
    }
    rep.set("arrangement", arrangement_section(&b));
    let pres = cox_presentation(&b)?;
    rep.set("cox", presentation_json(&pres));
    let mds = bundle_mds_report(&b)?;
    rep.set("mds", mds_json(&mds));
    let mut citations = mds.verdict.citations.clone();
    if effcone_applies(&b) {
        rep.set("effcone", effcone_json(&b, opts.budget)?);
        citations.push("pseudoeffective-nonpolyhedral".into());
    }
    Ok(rep.finish(citations, conclusion_of(&mds.verdict)))
}

pub fn validate_report(input_name: &str, input: &Input, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("validate", input_name, opts);
    let fan = fan_section(input.fan())?;
    let fan_ok = fan["violations"].as_array().is_some_and(Vec::is_empty);
    rep.set("fan", fan);
    rep.ok = fan_ok;
    let mut conclusion = if fan_ok { "fan is valid".to_string() } else { "fan is invalid".to_string() };
    if let Input::Bundle(b) = input {
        rep.set("bundle", bundle_section(b));
        let (c, ok) = compatibility_section(b)?;
        rep.set("compatibility", c);
        rep.ok &= ok;
        conclusion = if rep.ok { "bundle is valid".into() } else { "bundle is invalid".into() };
    }
    Ok(rep.finish(Vec::new(), conclusion))
}

pub fn cox_report(input_name: &str, b: &ToricVectorBundle, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("cox", input_name, opts);
    let p = cox_presentation(&b.normalize())?;
    let base = p.base.name.clone();
    rep.set("cox", presentation_json(&p));
    Ok(rep.finish(vec!["cox-ring-transfer".into()], format!("Cox ring presented over {base}")))
}

pub fn mds_report(input_name: &str, b: &ToricVectorBundle, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("mds", input_name, opts);
    let m = bundle_mds_report(&b.normalize())?;
    rep.set("mds", mds_json(&m));
    Ok(rep.finish(m.verdict.citations.clone(), conclusion_of(&m.verdict)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    General,
    VeryGeneral,
    Collinear,
    RationalNormalCurve,
    Unspecified,
}

impl std::str::FromStr for Position {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "general" => Position::General,
            "very-general" => Position::VeryGeneral,
            "collinear" => Position::Collinear,
            "rnc" | "on-rnc" => Position::RationalNormalCurve,
            "unspecified" => Position::Unspecified,
            other => {
                return Err(Error::Parse {
                    context: "--position".into(),
                    message: format!("unknown position {other:?}; expected general, very-general, collinear, rnc or unspecified"),
                })
            }
        })
    }
}

impl Position {
    pub fn flags(self) -> PositionFlags {
        match self {
            Position::General => PositionFlags { general: true, ..Default::default() },
            Position::VeryGeneral => PositionFlags { general: true, very_general: true, ..Default::default() },
            Position::Collinear => PositionFlags { collinear: true, ..Default::default() },
            Position::RationalNormalCurve => PositionFlags { on_rnc: true, general: true, ..Default::default() },
            Position::Unspecified => PositionFlags::default(),
        }
    }
}

pub fn classify_report(r: usize, s: usize, position: Position, opts: &Options) -> Result<Report> {
    if r < 2 {
        return Err(Error::Precondition("rank must be at least 2".into()));
    }
    let mut rep = Report::new("mds", &format!("{s} points in P^{}", r - 1), opts);
    let v = mds_classify(r, s, position.flags());
    rep.set("mds", verdict_json(&v));
    let citations = v.citations.clone();
    Ok(rep.finish(citations, conclusion_of(&v)))
}

pub fn effcone_report(input_name: &str, b: &ToricVectorBundle, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("effcone", input_name, opts);
    let v = effcone_json(&b.normalize(), opts.budget)?;
    let met = v["hypotheses_met"].as_bool().unwrap_or(false);
    rep.set("effcone", v);
    let conclusion = if met {
        "pseudoeffective cone not polyhedral (conditional on very-generality)"
    } else {
        "hypotheses not met"
    };
    Ok(rep.finish(vec!["pseudoeffective-nonpolyhedral".into()], conclusion.into()))
}

pub fn class_report(input_name: &str, b: &ToricVectorBundle, form: &str, opts: &Options) -> Result<Report> {
    let b = b.normalize();
    let mut rep = Report::new("class", input_name, opts);
    let p = Polynomial::parse(form, b.rank(), b.field())?;
    let h = HomogeneousForm::from_polynomial(&p)?;
    let c = orbit_closure_class(&h, &b)?;
    let cg = crate::coxring::class_group_projectivization(&b)?;
    let text = cg.format(&c);
    rep.set("class", json!({ "form": p.to_string(), "degree": h.degree, "coordinates": c.0, "basis": cg.group.names, "class": text }));
    Ok(rep.finish(vec!["orbit-closure-class".into()], format!("class {text}")))
}

/// One induction step of the fan extension, checked on the cotangent points.
#[derive(Clone, Debug)]
pub struct ExtensionStep {
    pub dim: usize,
    pub fan: Fan,
    pub smooth: bool,
    pub complete: bool,
    /// The points coming from the previous fan lie in one hyperplane.
    pub old_points_in_hyperplane: bool,
    /// Reduction steps taken by the hyperplane lemma on those points.
    pub reduction_steps: usize,
    pub report: MdsReport,
}

pub fn theorem_1_4_chain(max_dim: usize, field: Field) -> Result<Vec<ExtensionStep>> {
    if max_dim < 4 {
        return Err(Error::Precondition("the extension starts from dimension 3 and goes up".into()));
    }
    let mut fan = example_4_2_fan()?;
    let mut out = Vec::new();
    for dim in 4..=max_dim {
        let old = fan.n_rays();
        fan = extend_fan_theorem14(&fan)?;
        let b = cotangent_bundle(&fan, field)?.normalize();
        let old_points: Vec<Vec<Scalar>> =
            (0..old).map(|j| fan.ray(j).iter().map(|x| field.from_int(x)).collect()).collect();
        let chain = hyperplane_reduction(field, dim, &old_points);
        out.push(ExtensionStep {
            dim,
            smooth: is_smooth(&fan).smooth,
            complete: is_complete(&fan)?,
            old_points_in_hyperplane: chain.is_ok(),
            reduction_steps: chain.map(|c| c.steps.len()).unwrap_or(0),
            report: bundle_mds_report(&b)?,
            fan: fan.clone(),
        });
    }
    Ok(out)
}

/// Registry members and their arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Example {
    P2Cotangent,
    Example15,
    Example42,
    Theorem14 { dim: usize },
    Kapranov { rank: usize },
    LosevManin { dim: usize },
    Tangent { fan: Fan, name: String },
}

pub const EXAMPLE_NAMES: [&str; 7] =
    ["p2-cotangent", "example-1.5", "example-4.2", "theorem-1.4", "kapranov", "losev-manin", "tangent"];

/// Builds the bundle a registry member reports on.
pub fn example_bundle(ex: &Example, opts: &Options) -> Result<ToricVectorBundle> {
    let f = opts.field;
    match ex {
        Example::P2Cotangent => cotangent_bundle(&projective_space_fan(2)?, f),
        Example::Example15 => Ok(example_1_5_bundle(f, opts.seed)?.0),
        Example::Example42 => cotangent_bundle(&example_4_2_fan()?, f),
        Example::Theorem14 { dim } => {
            if *dim < 3 {
                return Err(Error::Precondition("--dim must be at least 3".into()));
            }
            let mut fan = example_4_2_fan()?;
            for _ in 3..*dim {
                fan = extend_fan_theorem14(&fan)?;
            }
            cotangent_bundle(&fan, f)
        }
        Example::Kapranov { rank } => kapranov_bundle(*rank, f),
        Example::LosevManin { dim } => losev_manin_bundle(*dim, f),
        Example::Tangent { fan, .. } => tangent_bundle(fan, f),
    }
}

pub fn example_report(ex: &Example, opts: &Options) -> Result<Report> {
    let name = match ex {
        Example::P2Cotangent => "p2-cotangent".to_string(),
        Example::Example15 => "example-1.5".to_string(),
        Example::Example42 => "example-4.2".to_string(),
        Example::Theorem14 { dim } => format!("theorem-1.4 --dim {dim}"),
        Example::Kapranov { rank } => format!("kapranov --rank {rank}"),
        Example::LosevManin { dim } => format!("losev-manin --dim {dim}"),
        Example::Tangent { name, .. } => format!("tangent {name}"),
    };
    let b = example_bundle(ex, opts)?;
    let mut rep = pipeline_report("example", &name, &b, opts)?;
    let conclusion = rep.conclusion().unwrap_or_default().to_string();
    let obj = rep.doc.as_object_mut().expect("object");
    let citations = obj.shift_remove("citations").unwrap_or(json!([]));
    obj.shift_remove("conclusion");
    match ex {
        Example::Example42 => {
            let seq = example_4_2_sequence()?;
            let steps: Vec<Value> = seq
                .certificates
                .iter()
                .zip(seq.fans.windows(2))
                .map(|(c, w)| {
                    json!({
                        "vector": format_vector(&c.vector),
                        "star_point": is_smooth_star_point(&w[0], &c.vector).unwrap_or(false),
                        "smooth_after": is_smooth(&w[1]).smooth,
                    })
                })
                .collect();
            obj.insert("subdivisions".into(), Value::Array(steps));
        }
        Example::Theorem14 { dim } if *dim >= 4 => {
            let chain = theorem_1_4_chain(*dim, opts.field)?;
            let steps: Vec<Value> = chain
                .iter()
                .map(|s| {
                    json!({
                        "dim": s.dim,
                        "rays": s.fan.n_rays(),
                        "smooth": s.smooth,
                        "complete": s.complete,
                        "old_points_in_hyperplane": s.old_points_in_hyperplane,
                        "reduction_steps": s.reduction_steps,
                        "verdict": s.report.verdict.status.to_string(),
                    })
                })
                .collect();
            obj.insert("induction".into(), Value::Array(steps));
        }
        Example::Kapranov { rank } => {
            obj.insert("members".into(), json!(crate::arrangement::kapranov_subspaces(*rank, opts.field)?.len()));
        }
        Example::Tangent { fan, .. } => {
            obj.insert("tangent_cox_ring".into(), presentation_json(&tangent_cox_ring(fan, opts.field)?));
        }
        _ => {}
    }
    let citations = citations
        .as_array()
        .map(|a| a.iter().filter_map(|c| c.as_str().map(String::from)).collect())
        .unwrap_or_default();
    Ok(rep.finish(citations, conclusion))
}
