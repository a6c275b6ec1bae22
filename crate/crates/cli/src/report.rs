//! JSON report schemas. Field order is fixed by the struct definitions, so
//! identical inputs serialize to byte-identical reports.

use palf_core::algorithm::{FamilyReport, MemberReport, Step3Plan};
use palf_core::factorization::Factorization;
use palf_core::invariants::{
    boundary_h1, c1_report, homology_report, intersection_form, kirby_data,
};
use palf_core::snf::FormSummary;
use palf_core::tietze::Pi1Verdict;
use palf_core::word::Lit;
use serde::Serialize;

pub fn group_str(g: &palf_core::snf::AbelianGroup) -> String {
    g.to_string()
}

pub fn word_str(w: &[Lit]) -> String {
    let parts: Vec<String> = w
        .iter()
        .map(|l| format!("{}{}", if l.sign > 0 { "+" } else { "-" }, l.handle))
        .collect();
    parts.join(" ")
}

pub fn verdict_str(v: &Pi1Verdict) -> String {
    match v {
        Pi1Verdict::TrivialCertified => "trivial".to_string(),
        Pi1Verdict::CyclicCertified(n) => format!("cyclic({n})"),
        Pi1Verdict::Unresolved { gens, relators } => {
            format!("unresolved({gens} gens, {} relators)", relators.len())
        }
    }
}

#[derive(Serialize)]
pub struct FormJson {
    pub dim: usize,
    pub rank: usize,
    pub signature: i64,
    pub parity: String,
    pub unimodular: bool,
    pub definite: bool,
}

impl FormJson {
    pub fn from_summary(s: &FormSummary) -> Self {
        FormJson {
            dim: s.dim,
            rank: s.rank,
            signature: s.signature,
            parity: if s.even { "even" } else { "odd" }.to_string(),
            unimodular: s.unimodular,
            definite: s.definite,
        }
    }
}

#[derive(Serialize)]
pub struct Pi1Json {
    pub gens: usize,
    pub rels: Vec<String>,
    pub verdict: String,
    pub abelianization: String,
}

#[derive(Serialize)]
pub struct C1Json {
    pub vector: Vec<i64>,
    pub characteristic_ok: bool,
}

/// A basis pair (T, S) of the rank-2 part of the form with T·T = 0 and
/// T·S = 1, re-verified against the declared square of S.
#[derive(Serialize)]
pub struct SectionJson {
    pub t: Vec<i64>,
    pub s: Vec<i64>,
    pub t_dot_t: i64,
    pub t_dot_s: i64,
    pub s_dot_s: i64,
}

#[derive(Serialize)]
pub struct InvariantReportJson {
    pub pi1: Pi1Json,
    pub h1: String,
    pub h2: String,
    pub form: FormJson,
    pub form_matrix: Vec<Vec<i64>>,
    pub boundary_h1: String,
    pub c1: C1Json,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section: Option<SectionJson>,
}

pub fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("report entry fits 64 bits")
}

pub fn invariant_report(
    f: &Factorization,
    m: &[i64],
    section_target: Option<i64>,
) -> InvariantReportJson {
    let hr = homology_report(f);
    let kd = kirby_data(f, m);
    let form = intersection_form(&kd);
    let c1 = c1_report(f, &kd);
    let section = section_target.and_then(|sq| {
        palf_core::algorithm::torus_section_basis(&form, f.len(), i128::from(sq)).map(
            |(t, s)| SectionJson {
                t: t.iter().map(|&x| narrow(x)).collect(),
                s: s.iter().map(|&x| narrow(x)).collect(),
                t_dot_t: 0,
                t_dot_s: 1,
                s_dot_s: sq,
            },
        )
    });
    InvariantReportJson {
        pi1: Pi1Json {
            gens: hr.presentation.gens,
            rels: hr.presentation.relators.iter().map(|w| word_str(w)).collect(),
            verdict: verdict_str(&hr.pi1.verdict),
            abelianization: group_str(&hr.pi1.abelianization),
        },
        h1: group_str(&hr.h1),
        h2: group_str(&hr.h2),
        form: FormJson::from_summary(&form.summary),
        form_matrix: form
            .matrix
            .iter()
            .map(|row| row.iter().map(|&x| narrow(x)).collect())
            .collect(),
        boundary_h1: group_str(&boundary_h1(&kd)),
        c1: C1Json {
            vector: c1.vector.iter().map(|&x| narrow(x)).collect(),
            characteristic_ok: c1.characteristic_ok,
        },
        section,
    }
}

#[derive(Serialize)]
pub struct MemberJson {
    pub i: i64,
    pub pi1_verdict: String,
    pub pi1_ab: String,
    pub h1: String,
    pub h2: String,
    pub boundary_h1: String,
    pub form: FormJson,
    pub c1_vector: Vec<i64>,
    pub characteristic_ok: bool,
    pub open_book_key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section_square: Option<i64>,
}

impl MemberJson {
    pub fn from_member(m: &MemberReport) -> Self {
        MemberJson {
            i: m.i,
            pi1_verdict: verdict_str(&m.pi1_verdict),
            pi1_ab: group_str(&m.pi1_ab),
            h1: group_str(&m.h1),
            h2: group_str(&m.h2),
            boundary_h1: group_str(&m.boundary_h1),
            form: FormJson::from_summary(&m.form),
            c1_vector: m.c1.iter().map(|&x| narrow(x)).collect(),
            characteristic_ok: m.characteristic_ok,
            open_book_key: m.open_book_key.clone(),
            section_square: m.section_square.map(narrow),
        }
    }
}

#[derive(Serialize)]
pub struct Step3Json {
    pub q_diff: Vec<i64>,
    pub rotation: Vec<i64>,
    pub j_set: Vec<usize>,
    pub j_alpha1: Vec<usize>,
    pub minimal_m: Vec<i64>,
}

impl Step3Json {
    pub fn from_plan(p: &Step3Plan) -> Self {
        Step3Json {
            q_diff: p.q_diff.clone(),
            rotation: p.rotation.clone(),
            j_set: p.j_set.clone(),
            j_alpha1: p.j_alpha1.clone(),
            minimal_m: p.minimal_m.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct PlanReportJson {
    pub seed: String,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step3: Option<Step3Json>,
}

#[derive(Serialize)]
pub struct FamilyReportJson {
    pub seed: String,
    pub m: Vec<i64>,
    pub blow_up_count: i64,
    pub i_range: [i64; 2],
    pub seed_violations: Vec<String>,
    pub cross_checked: bool,
    pub members: Vec<MemberJson>,
    pub open_book_key_constant: bool,
}

pub fn family_json(
    seed: &str,
    i_range: [i64; 2],
    violations: Vec<String>,
    cross_checked: bool,
    rep: &FamilyReport,
) -> FamilyReportJson {
    FamilyReportJson {
        seed: seed.to_string(),
        m: rep.m.clone(),
        blow_up_count: rep.blow_up_count,
        i_range,
        seed_violations: violations,
        cross_checked,
        members: rep.members.iter().map(MemberJson::from_member).collect(),
        open_book_key_constant: rep.open_book_key_constant,
    }
}

#[derive(Serialize)]
pub struct RelationJson {
    pub id: String,
    pub holds: bool,
    pub expected_holds: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Serialize)]
pub struct VerifyReportJson {
    pub relations: Vec<RelationJson>,
    pub all_pass: bool,
}
