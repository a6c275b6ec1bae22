//! Mapping classes as signed Dehn twist words, with an equality oracle that
//! compares actions on a filling family of arcs and curves (Alexander
//! method), plus verifiers for the twist relations the toolkit relies on.

use std::fmt::Write as _;
use std::sync::Arc as StdArc;

use crate::curve::{
    arcs_equal, dehn_twist, dehn_twist_arc, is_isotopic, pairing_matrix, Curve, ProperArc,
};
use crate::models::CurveRegistry;
use crate::surface::HandleSurface;

/// A word in Dehn twists: `letters[0]` acts first (so the word equals
/// t_{c_n}^{e_n} ∘ … ∘ t_{c_1}^{e_1} in functional notation).
#[derive(Clone)]
pub struct MappingClassWord {
    pub surface: StdArc<HandleSurface>,
    pub letters: Vec<(StdArc<Curve>, i64)>,
}

impl MappingClassWord {
    pub fn identity(surface: StdArc<HandleSurface>) -> Self {
        MappingClassWord { surface, letters: vec![] }
    }

    pub fn twist(c: &Curve, exp: i64) -> Self {
        MappingClassWord {
            surface: c.surface.clone(),
            letters: vec![(StdArc::new(c.clone()), exp)],
        }
    }

    /// Append a twist acting after everything already in the word.
    pub fn then_twist(mut self, c: &Curve, exp: i64) -> Self {
        self.letters.push((StdArc::new(c.clone()), exp));
        self
    }

    /// Functional composition self ∘ other (other acts first).
    pub fn compose(&self, other: &MappingClassWord) -> Self {
        let mut letters = other.letters.clone();
        letters.extend(self.letters.iter().cloned());
        MappingClassWord { surface: self.surface.clone(), letters }
    }

    pub fn inverse(&self) -> Self {
        MappingClassWord {
            surface: self.surface.clone(),
            letters: self.letters.iter().rev().map(|(c, e)| (c.clone(), -e)).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut w = MappingClassWord::identity(self.surface.clone());
        for _ in 0..n.unsigned_abs() {
            w = base.compose(&w);
        }
        w
    }

    pub fn act_curve(&self, x: &Curve) -> Curve {
        let mut c = x.clone();
        for (about, e) in &self.letters {
            let sign: i8 = if *e >= 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                c = dehn_twist(about, &c, sign);
            }
        }
        c
    }

    pub fn act_arc(&self, x: &ProperArc) -> ProperArc {
        let mut a = x.clone();
        for (about, e) in &self.letters {
            let sign: i8 = if *e >= 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                a = dehn_twist_arc(about, &a, sign);
            }
        }
        a
    }

    /// Induced matrix on H1 (product of transvections), acting on column
    /// vectors of handle-traversal coordinates.
    pub fn h1_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.surface.handles.len();
        let j = pairing_matrix(&self.surface);
        let mut m: Vec<Vec<i64>> = (0..n)
            .map(|r| (0..n).map(|c| i64::from(r == c)).collect())
            .collect();
        for (about, e) in &self.letters {
            let hc = about.homology();
            // v[l] = Q(about, core_l); transvection: x ↦ x + e·(v·x)·hc.
            let v: Vec<i64> = (0..n)
                .map(|l| (0..n).map(|k| hc[k] * j[k][l]).sum())
                .collect();
            let mut t: Vec<Vec<i64>> = (0..n)
                .map(|r| (0..n).map(|c| i64::from(r == c) + e * hc[r] * v[c]).collect())
                .collect();
            // m := t · m
            let mut out = vec![vec![0i64; n]; n];
            for r in 0..n {
                for c in 0..n {
                    out[r][c] = (0..n).map(|k| t[r][k] * m[k][c]).sum();
                }
            }
            std::mem::swap(&mut t, &mut out);
            m = t;
        }
        m
    }
}

/// The equality test family: every registered arc plus every registered
/// closed curve of a surface's registry.
pub struct FillingFamily {
    pub curves: Vec<(String, Curve)>,
    pub arcs: Vec<(String, ProperArc)>,
}

impl FillingFamily {
    /// Build from a registry; checks the arcs fill (every 1-handle is cut by
    /// some arc, so cutting along them leaves the 0-handle disk).
    pub fn from_registry(reg: &CurveRegistry) -> Self {
        let arcs: Vec<(String, ProperArc)> =
            reg.arcs().map(|(n, a)| (n.clone(), a.clone())).collect();
        for k in 0..reg.surface.handles.len() {
            assert!(
                arcs.iter().any(|(_, a)| a.start.handle == k && a.word.is_empty()),
                "filling family must contain a cocore arc for handle {k}"
            );
        }
        FillingFamily {
            curves: reg.curves().map(|(n, c)| (n.clone(), c.clone())).collect(),
            arcs,
        }
    }
}

/// Disagreement evidence from the equality oracle.
#[derive(Clone, Debug)]
pub struct Witness {
    pub member: String,
    pub image1: String,
    pub image2: String,
}

/// Result of comparing two words: H1-level agreement and the family verdict.
#[derive(Clone, Debug)]
pub struct EqualityReport {
    pub h1_equal: bool,
    pub equal: bool,
    pub witness: Option<Witness>,
}

fn word_string(w: &[crate::word::Lit]) -> String {
    let mut s = String::new();
    for l in w {
        let _ = write!(s, "{}{} ", if l.sign > 0 { "+" } else { "-" }, l.handle);
    }
    s.trim_end().to_string()
}

/// Alexander-method equality: words are equal iff they agree on every member
/// of the filling family (arcs compared rel endpoints with their windings).
pub fn classes_equal(
    w1: &MappingClassWord,
    w2: &MappingClassWord,
    fam: &FillingFamily,
) -> EqualityReport {
    let h1_equal = w1.h1_matrix() == w2.h1_matrix();
    for (name, c) in &fam.curves {
        let i1 = w1.act_curve(c);
        let i2 = w2.act_curve(c);
        if !is_isotopic(&i1, &i2) {
            return EqualityReport {
                h1_equal,
                equal: false,
                witness: Some(Witness {
                    member: name.clone(),
                    image1: word_string(&i1.word),
                    image2: word_string(&i2.word),
                }),
            };
        }
    }
    for (name, a) in &fam.arcs {
        let i1 = w1.act_arc(a);
        let i2 = w2.act_arc(a);
        if !arcs_equal(&i1, &i2) {
            return EqualityReport {
                h1_equal,
                equal: false,
                witness: Some(Witness {
                    member: name.clone(),
                    image1: word_string(&i1.word),
                    image2: word_string(&i2.word),
                }),
            };
        }
    }
    EqualityReport { h1_equal, equal: true, witness: None }
}

// ---------------------------------------------------------------------------
// Named words and relations on the three-holed torus model
// ---------------------------------------------------------------------------

/// t_{α3}^{a3} ∘ t_{α2}^{a2} ∘ t_{α1}^{a1} ∘ t_{δ3}^{d3} ∘ t_{δ2}^{d2} ∘ t_{δ1}^{d1}
/// (all six curves are pairwise disjoint, so the order is immaterial).
pub fn w_word(reg: &CurveRegistry, a: [i64; 3], d: [i64; 3]) -> MappingClassWord {
    MappingClassWord::identity(reg.surface.clone())
        .then_twist(reg.curve("delta1"), d[0])
        .then_twist(reg.curve("delta2"), d[1])
        .then_twist(reg.curve("delta3"), d[2])
        .then_twist(reg.curve("alpha1"), a[0])
        .then_twist(reg.curve("alpha2"), a[1])
        .then_twist(reg.curve("alpha3"), a[2])
}

/// Φ = t_{α3}^{-3} ∘ t_{α2}^{-3} ∘ t_{α1}^{-3} ∘ t_{δ3} ∘ t_{δ2} ∘ t_{δ1}.
pub fn phi_word(reg: &CurveRegistry) -> MappingClassWord {
    w_word(reg, [-3, -3, -3], [1, 1, 1])
}

/// Relations with verifiers. `Star` and the Φ relations refer to the
/// three-holed torus registry names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationId {
    /// t_{δ3}∘t_{δ2}∘t_{δ1} = (t_{α3}∘t_{α2}∘t_{α1}∘t_β)³
    Star,
    /// Φ = t_{γ_{-1}} ∘ t_β ∘ t_{γ_1}
    PhiFact,
    /// Φ = t_{W(γ_{-1})} ∘ t_{W(β)} ∘ t_{W(γ_1)}
    PhiW { a: [i64; 3], d: [i64; 3] },
    /// Φ ∘ W = W ∘ Φ
    PhiCommute { a: [i64; 3], d: [i64; 3] },
    /// t_{ψ(C)} = ψ ∘ t_C ∘ ψ^{-1} with ψ = t_{α1}^{e1} ∘ t_β^{e2}, C = α2
    Conjugation { e1: i64, e2: i64 },
    /// t_{α1} ∘ t_{α3} = t_{α3} ∘ t_{α1} (disjoint twists commute)
    DisjointCommute,
    /// Negative control: the star relation with t_{δ1} dropped (must fail).
    StarBroken,
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub id: String,
    pub h1_equal: bool,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Left side, right side and a display name for a relation.
fn relation_sides(
    reg: &CurveRegistry,
    id: &RelationId,
) -> (MappingClassWord, MappingClassWord, String) {
    let s = reg.surface.clone();
    let star_rhs = || {
        MappingClassWord::identity(s.clone())
            .then_twist(reg.curve("beta"), 1)
            .then_twist(reg.curve("alpha1"), 1)
            .then_twist(reg.curve("alpha2"), 1)
            .then_twist(reg.curve("alpha3"), 1)
            .pow(3)
    };
    match id {
        RelationId::Star => {
            let lhs = MappingClassWord::identity(s.clone())
                .then_twist(reg.curve("delta1"), 1)
                .then_twist(reg.curve("delta2"), 1)
                .then_twist(reg.curve("delta3"), 1);
            (lhs, star_rhs(), "star".into())
        }
        RelationId::StarBroken => {
            let lhs = MappingClassWord::identity(s.clone())
                .then_twist(reg.curve("delta2"), 1)
                .then_twist(reg.curve("delta3"), 1);
            (lhs, star_rhs(), "star-broken".into())
        }
        RelationId::PhiFact => {
            let rhs = MappingClassWord::identity(s.clone())
                .then_twist(reg.curve("gamma1"), 1)
                .then_twist(reg.curve("beta"), 1)
                .then_twist(reg.curve("gamma-1"), 1);
            (phi_word(reg), rhs, "phi-fact".into())
        }
        RelationId::PhiW { a, d } => {
            let w = w_word(reg, *a, *d);
            let rhs = MappingClassWord::identity(s.clone())
                .then_twist(&w.act_curve(reg.curve("gamma1")), 1)
                .then_twist(&w.act_curve(reg.curve("beta")), 1)
                .then_twist(&w.act_curve(reg.curve("gamma-1")), 1);
            (phi_word(reg), rhs, format!("phi-w a={a:?} d={d:?}"))
        }
        RelationId::PhiCommute { a, d } => {
            let w = w_word(reg, *a, *d);
            let phi = phi_word(reg);
            (phi.compose(&w), w.compose(&phi), format!("phi-commute a={a:?} d={d:?}"))
        }
        RelationId::Conjugation { e1, e2 } => {
            let psi = MappingClassWord::identity(s.clone())
                .then_twist(reg.curve("beta"), *e2)
                .then_twist(reg.curve("alpha1"), *e1);
            let c = reg.curve("alpha2");
            let lhs = MappingClassWord::twist(&psi.act_curve(c), 1);
            let rhs = psi.compose(&MappingClassWord::twist(c, 1)).compose(&psi.inverse());
            (lhs, rhs, format!("conjugation e=({e1},{e2})"))
        }
        RelationId::DisjointCommute => {
            let t1 = MappingClassWord::twist(reg.curve("alpha1"), 1);
            let t3 = MappingClassWord::twist(reg.curve("alpha3"), 1);
            (t1.compose(&t3), t3.compose(&t1), "disjoint-commute".into())
        }
    }
}

pub fn verify_relation(reg: &CurveRegistry, id: &RelationId) -> RelationReport {
    let fam = FillingFamily::from_registry(reg);
    let (lhs, rhs, name) = relation_sides(reg, id);
    let r = classes_equal(&lhs, &rhs, &fam);
    RelationReport { id: name, h1_equal: r.h1_equal, holds: r.equal, witness: r.witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{beta_marked, build_s_hat, gamma};

    #[test]
    fn star_relation_holds() {
        let m = build_s_hat();
        let r = verify_relation(&m.registry, &RelationId::Star);
        assert!(r.h1_equal && r.holds, "witness: {:?}", r.witness);
    }

    #[test]
    fn broken_star_fails_with_witness() {
        let m = build_s_hat();
        let r = verify_relation(&m.registry, &RelationId::StarBroken);
        assert!(!r.holds);
        assert!(r.witness.is_some());
    }

    #[test]
    fn phi_factorization_holds() {
        let m = build_s_hat();
        let r = verify_relation(&m.registry, &RelationId::PhiFact);
        assert!(r.holds, "witness: {:?}", r.witness);
    }

    #[test]
    fn phi_w_family_sample() {
        let m = build_s_hat();
        for (a, d) in [
            ([1, 0, -1], [0, 0, 0]),
            ([0, 2, 0], [1, -1, 0]),
            ([-1, -1, 2], [0, 0, 1]),
        ] {
            let r = verify_relation(&m.registry, &RelationId::PhiW { a, d });
            assert!(r.holds, "{}: witness {:?}", r.id, r.witness);
        }
    }

    #[test]
    fn boundary_twist_not_identity_but_h1_trivial() {
        let m = build_s_hat();
        let fam = FillingFamily::from_registry(&m.registry);
        let td = MappingClassWord::twist(m.registry.curve("delta1"), 1);
        let id = MappingClassWord::identity(m.surface.clone());
        let r = classes_equal(&td, &id, &fam);
        assert!(r.h1_equal, "boundary twist acts trivially on H1");
        assert!(!r.equal, "but must be separated by an arc");
        let w = r.witness.unwrap();
        assert!(w.member.starts_with("tau"), "witness was {:?}", w);
    }

    #[test]
    fn act_matches_registry_curves() {
        let m = build_s_hat();
        let w = MappingClassWord::twist(m.registry.curve("alpha1"), 3);
        let im = w.act_curve(m.registry.curve("beta"));
        assert!(is_isotopic(&im, &beta_marked(&m.registry, 3)));
        let triple = MappingClassWord::identity(m.surface.clone())
            .then_twist(m.registry.curve("alpha1"), 1)
            .then_twist(m.registry.curve("alpha2"), 1)
            .then_twist(m.registry.curve("alpha3"), 1);
        let g = triple.act_curve(m.registry.curve("beta"));
        assert!(is_isotopic(&g, &gamma(&m.registry, 1)));
    }

    #[test]
    fn conjugation_and_commutation() {
        let m = build_s_hat();
        for id in [
            RelationId::Conjugation { e1: 1, e2: -1 },
            RelationId::DisjointCommute,
            RelationId::PhiCommute { a: [1, -1, 0], d: [0, 1, 0] },
        ] {
            let r = verify_relation(&m.registry, &id);
            assert!(r.holds, "{}: witness {:?}", r.id, r.witness);
        }
    }

    #[test]
    fn h1_matrix_matches_action() {
        let m = build_s_hat();
        let w = MappingClassWord::identity(m.surface.clone())
            .then_twist(m.registry.curve("beta"), -1)
            .then_twist(m.registry.curve("alpha2"), 2);
        let mat = w.h1_matrix();
        let im = w.act_curve(m.registry.curve("gamma1"));
        let h0 = m.registry.curve("gamma1").homology();
        let n = h0.len();
        let want: Vec<i64> =
            (0..n).map(|r| (0..n).map(|c| mat[r][c] * h0[c]).sum()).collect();
        assert_eq!(im.homology(), want);
    }
}
