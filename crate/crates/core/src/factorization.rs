//! Monodromy factorizations of positive allowable Lefschetz fibrations:
//! ordered vanishing-cycle lists with the three isomorphism-preserving moves
//! (cyclic permutation, elementary transformation, simultaneous conjugation),
//! monodromy substitution, partial twists along a T²×D² block, and an
//! explicit elementary-transformation certificate for partial twists that do
//! not change the isomorphism type.

use std::sync::Arc as StdArc;

use crate::curve::{dehn_twist, is_isotopic, Curve};
use crate::mcg::{classes_equal, FillingFamily, MappingClassWord, Witness};
use crate::surface::HandleSurface;

/// An ordered vanishing-cycle list (C_1, …, C_n) on a fiber surface. The
/// monodromy is t_{C_n} ∘ … ∘ t_{C_1}; every entry must be homologically
/// non-trivial (the fibration is allowable).
#[derive(Clone)]
pub struct Factorization {
    pub surface: StdArc<HandleSurface>,
    pub curves: Vec<StdArc<Curve>>,
}

impl Factorization {
    pub fn new(
        surface: StdArc<HandleSurface>,
        curves: Vec<Curve>,
    ) -> Result<Factorization, String> {
        for (i, c) in curves.iter().enumerate() {
            if c.homology().iter().all(|&x| x == 0) {
                return Err(format!(
                    "vanishing cycle {} ({:?}) is null-homologous",
                    i + 1,
                    c.name
                ));
            }
        }
        Ok(Factorization { surface, curves: curves.into_iter().map(StdArc::new).collect() })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn entry(&self, i: usize) -> &Curve {
        &self.curves[i]
    }

    /// The composed monodromy t_{C_n} ∘ … ∘ t_{C_1}.
    pub fn total_monodromy(&self) -> MappingClassWord {
        let mut w = MappingClassWord::identity(self.surface.clone());
        for c in &self.curves {
            w = w.then_twist(c, 1);
        }
        w
    }

    /// The induced open book on the boundary: fiber plus total monodromy.
    pub fn open_book(&self) -> (StdArc<HandleSurface>, MappingClassWord) {
        (self.surface.clone(), self.total_monodromy())
    }
}

/// The three factorization moves. Indices are 0-based; `Elementary*`(i) acts
/// on the pair (C_{i+1}, C_{i+2}) in 1-based curve numbering.
#[derive(Clone)]
pub enum Move {
    /// Rotate left by k: (C_1, …, C_n) ↦ (C_{k+1}, …, C_n, C_1, …, C_k).
    Cyclic(usize),
    /// (…, A, B, …) ↦ (…, B, t_B(A), …): B moves left, A is twisted so the
    /// composition t_B ∘ t_A is unchanged (t_{t_B(A)} ∘ t_B = t_B ∘ t_A).
    ElementaryL(usize),
    /// (…, A, B, …) ↦ (…, t_A^{-1}(B), A, …): A moves right; inverse of L.
    ElementaryR(usize),
    /// Simultaneous conjugation: every entry ↦ ψ(entry).
    Conjugate(MappingClassWord),
}

pub fn hurwitz_move(f: &Factorization, mv: &Move) -> Result<Factorization, String> {
    let n = f.len();
    let mut curves = f.curves.clone();
    match mv {
        Move::Cyclic(k) => {
            if n > 0 {
                curves.rotate_left(k % n);
            }
        }
        Move::ElementaryL(i) => {
            if i + 1 >= n {
                return Err(format!("elementary move index {i} out of range for {n} entries"));
            }
            let a = curves[*i].clone();
            let b = curves[i + 1].clone();
            curves[*i] = b.clone();
            curves[i + 1] = StdArc::new(dehn_twist(&b, &a, 1));
        }
        Move::ElementaryR(i) => {
            if i + 1 >= n {
                return Err(format!("elementary move index {i} out of range for {n} entries"));
            }
            let a = curves[*i].clone();
            let b = curves[i + 1].clone();
            curves[*i] = StdArc::new(dehn_twist(&a, &b, -1));
            curves[i + 1] = a;
        }
        Move::Conjugate(psi) => {
            for c in curves.iter_mut() {
                *c = StdArc::new(psi.act_curve(c));
            }
        }
    }
    Ok(Factorization { surface: f.surface.clone(), curves })
}

pub fn apply_moves(f: &Factorization, moves: &[Move]) -> Result<Factorization, String> {
    let mut g = f.clone();
    for mv in moves {
        g = hurwitz_move(&g, mv)?;
    }
    Ok(g)
}

/// Entrywise isotopy of two factorizations (same length, same order).
pub fn factorizations_isotopic(f: &Factorization, g: &Factorization) -> bool {
    f.len() == g.len()
        && f.curves
            .iter()
            .zip(g.curves.iter())
            .all(|(a, b)| is_isotopic(a, b))
}

/// Replace entries `start..end` by `replacement` after checking that the two
/// blocks compose to the same mapping class on the filling family.
pub fn substitute_block(
    f: &Factorization,
    start: usize,
    end: usize,
    replacement: &[Curve],
    fam: &FillingFamily,
) -> Result<Factorization, Box<Witness>> {
    assert!(start <= end && end <= f.len());
    let mut old_word = MappingClassWord::identity(f.surface.clone());
    for c in &f.curves[start..end] {
        old_word = old_word.then_twist(c, 1);
    }
    let mut new_word = MappingClassWord::identity(f.surface.clone());
    for c in replacement {
        new_word = new_word.then_twist(c, 1);
    }
    let r = classes_equal(&old_word, &new_word, fam);
    if !r.equal {
        return Err(Box::new(r.witness.unwrap()));
    }
    let mut curves = f.curves[..start].to_vec();
    curves.extend(replacement.iter().cloned().map(StdArc::new));
    curves.extend_from_slice(&f.curves[end..]);
    Ok(Factorization { surface: f.surface.clone(), curves })
}

// ---------------------------------------------------------------------------
// Partial twists along a T-block
// ---------------------------------------------------------------------------

/// The standard curves a T-block is modelled on: three pairwise disjoint
/// twisting curves (each meeting `beta` once positively) and the block
/// (γ_1, β, γ_{-1}) itself.
#[derive(Clone)]
pub struct TBlockSpec {
    pub alphas: [Curve; 3],
    pub gamma1: Curve,
    pub beta: Curve,
    pub gamma_m1: Curve,
}

impl TBlockSpec {
    fn w_word(&self, a: [i64; 3]) -> MappingClassWord {
        MappingClassWord::identity(self.beta.surface.clone())
            .then_twist(&self.alphas[0], a[0])
            .then_twist(&self.alphas[1], a[1])
            .then_twist(&self.alphas[2], a[2])
    }
}

/// The induced map on H1 of the block's boundary 3-torus, on the ordered
/// basis [α1], [α2], [γ_{-1}]: [α1] and [α2] are fixed and
/// [γ_{-1}] ↦ [γ_{-1}] + (a3−a1)[α1] + (a3−a2)[α2].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GluingReport {
    pub a: [i64; 3],
    pub h1_map: [[i64; 3]; 3],
}

/// Recognize the three entries at `start` as (W'(γ_1), W'(β), W'(γ_{-1}))
/// with W' = t_{α3}^{e3} ∘ t_{α2}^{e2} ∘ t_{α1}^{e1}; returns the exponents.
pub fn detect_t_block(
    f: &Factorization,
    start: usize,
    spec: &TBlockSpec,
    max_exp: i64,
) -> Result<[i64; 3], String> {
    if start + 3 > f.len() {
        return Err("T-block start out of range".to_string());
    }
    // Exponent candidates from homology: W'(β) picks up e_i copies of α_i.
    let hb = f.entry(start + 1).homology();
    let h0 = spec.beta.homology();
    let mut e = [0i64; 3];
    for (k, al) in spec.alphas.iter().enumerate() {
        let ha = al.homology();
        let idx = ha.iter().position(|&x| x != 0).unwrap();
        e[k] = (hb[idx] - h0[idx]) / ha[idx];
        if e[k].abs() > max_exp {
            return Err(format!("T-block exponent {} exceeds the search bound {max_exp}", e[k]));
        }
    }
    let w = spec.w_word(e);
    for (slot, model) in [(&spec.gamma1, 0), (&spec.beta, 1), (&spec.gamma_m1, 2)]
        .map(|(c, off)| (w.act_curve(c), off))
    {
        if !is_isotopic(&slot, f.entry(start + model)) {
            return Err(format!(
                "entries at {start}..{} are not a T-block (mismatch in slot {model})",
                start + 3
            ));
        }
    }
    Ok(e)
}

/// Apply the partial W-twist with W = t_{α3}^{a3} ∘ t_{α2}^{a2} ∘ t_{α1}^{a1}
/// to the T-block at `start`: the three entries are replaced by their
/// W-images. Returns the new factorization and the boundary gluing map.
pub fn partial_twist(
    f: &Factorization,
    start: usize,
    a: [i64; 3],
    spec: &TBlockSpec,
    max_exp: i64,
) -> Result<(Factorization, GluingReport), String> {
    detect_t_block(f, start, spec, max_exp)?;
    let w = spec.w_word(a);
    let mut curves = f.curves.clone();
    for k in 0..3 {
        curves[start + k] = StdArc::new(w.act_curve(&curves[start + k]));
    }
    let report = GluingReport {
        a,
        h1_map: [[1, 0, a[2] - a[0]], [0, 1, a[2] - a[1]], [0, 0, 1]],
    };
    Ok((Factorization { surface: f.surface.clone(), curves }, report))
}

// ---------------------------------------------------------------------------
// Unchanged-isomorphism certificate
// ---------------------------------------------------------------------------

/// Elementary-transformation certificate that the partial t_μ^i-twist along
/// the T-block at `start` keeps the isomorphism type, valid whenever μ is one
/// of the block's twisting curves AND occurs among the remaining vanishing
/// cycles. `f_twisted` is the factorization AFTER the twist; applying the
/// returned moves to it reproduces the untwisted factorization entrywise.
///
/// The certificate walks a μ-entry next to the block, then peels off one
/// power of t_μ per sweep: carrying μ through the block in one direction
/// conjugates the block entries by t_μ^{∓1}, and the return trip turns μ into
/// a conjugate of Φ^{±1}(μ) = μ, since Φ = t_{γ_{-1}} ∘ t_β ∘ t_{γ_1} fixes
/// each twisting curve.
pub fn unchanged_certificate(
    f_twisted: &Factorization,
    start: usize,
    mu: &Curve,
    i: i64,
) -> Result<Vec<Move>, String> {
    let q = (start + 3..f_twisted.len())
        .find(|&k| is_isotopic(f_twisted.entry(k), mu))
        .ok_or_else(|| {
            format!(
                "no vanishing cycle after the block is isotopic to {:?}: the unchanged \
                 hypothesis fails",
                mu.name
            )
        })?;
    let p = start;
    let mut moves: Vec<Move> = Vec::new();
    // Walk μ from position q to p+3 (conjugating intermediate entries).
    for k in (p + 3..q).rev() {
        moves.push(Move::ElementaryL(k));
    }
    // Peel one power of t_μ per sweep.
    let step: Vec<Move> = if i >= 0 {
        // μ walks to the front (becoming Φ-conjugate-fixed), then back to
        // the right unchanged, conjugating the block by t_μ^{-1}.
        vec![
            Move::ElementaryR(p + 2),
            Move::ElementaryR(p + 1),
            Move::ElementaryR(p),
            Move::ElementaryR(p),
            Move::ElementaryR(p + 1),
            Move::ElementaryR(p + 2),
        ]
    } else {
        vec![
            Move::ElementaryL(p + 2),
            Move::ElementaryL(p + 1),
            Move::ElementaryL(p),
            Move::ElementaryL(p),
            Move::ElementaryL(p + 1),
            Move::ElementaryL(p + 2),
        ]
    };
    for _ in 0..i.unsigned_abs() {
        moves.extend(step.iter().cloned());
    }
    // Walk μ back to q (restoring the conjugated entries).
    for k in p + 3..q {
        moves.push(Move::ElementaryR(k));
    }
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_s_hat, CurveRegistry, Model};

    fn t_spec(reg: &CurveRegistry) -> TBlockSpec {
        TBlockSpec {
            alphas: [
                reg.curve("alpha1").clone(),
                reg.curve("alpha2").clone(),
                reg.curve("alpha3").clone(),
            ],
            gamma1: reg.curve("gamma1").clone(),
            beta: reg.curve("beta").clone(),
            gamma_m1: reg.curve("gamma-1").clone(),
        }
    }

    fn t_fact(m: &Model) -> Factorization {
        Factorization::new(
            m.surface.clone(),
            vec![
                m.registry.curve("gamma1").clone(),
                m.registry.curve("beta").clone(),
                m.registry.curve("gamma-1").clone(),
            ],
        )
        .unwrap()
    }

    fn n_seed(m: &Model) -> Factorization {
        Factorization::new(
            m.surface.clone(),
            vec![
                m.registry.curve("gamma1").clone(),
                m.registry.curve("beta").clone(),
                m.registry.curve("gamma-1").clone(),
                m.registry.curve("gamma-1").clone(),
                m.registry.curve("alpha1").clone(),
                m.registry.curve("alpha2").clone(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn t_monodromy_is_phi() {
        let m = build_s_hat();
        let fam = FillingFamily::from_registry(&m.registry);
        let f = t_fact(&m);
        let r = classes_equal(&f.total_monodromy(), &crate::mcg::phi_word(&m.registry), &fam);
        assert!(r.equal, "witness: {:?}", r.witness);
    }

    #[test]
    fn elementary_moves_preserve_monodromy_and_invert() {
        let m = build_s_hat();
        let fam = FillingFamily::from_registry(&m.registry);
        let f = n_seed(&m);
        for i in 0..f.len() - 1 {
            let g = hurwitz_move(&f, &Move::ElementaryL(i)).unwrap();
            let r = classes_equal(&f.total_monodromy(), &g.total_monodromy(), &fam);
            assert!(r.equal, "L({i}) changed the monodromy: {:?}", r.witness);
            let back = hurwitz_move(&g, &Move::ElementaryR(i)).unwrap();
            assert!(factorizations_isotopic(&f, &back));
        }
    }

    #[test]
    fn cyclic_move_conjugates_monodromy() {
        let m = build_s_hat();
        let fam = FillingFamily::from_registry(&m.registry);
        let f = n_seed(&m);
        let g = hurwitz_move(&f, &Move::Cyclic(2)).unwrap();
        // Rotating left by 2 conjugates the monodromy by t_{C_2} ∘ t_{C_1}.
        let pre = MappingClassWord::identity(m.surface.clone())
            .then_twist(f.entry(0), 1)
            .then_twist(f.entry(1), 1);
        let conj = pre.compose(&f.total_monodromy()).compose(&pre.inverse());
        let r = classes_equal(&g.total_monodromy(), &conj, &fam);
        assert!(r.equal, "witness: {:?}", r.witness);
    }

    #[test]
    fn substitution_accepts_relation_and_refuses_junk() {
        let m = build_s_hat();
        let fam = FillingFamily::from_registry(&m.registry);
        let f = t_fact(&m);
        let spec = t_spec(&m.registry);
        let w = spec.w_word([1, 0, -1]);
        let replacement = vec![
            w.act_curve(&spec.gamma1),
            w.act_curve(&spec.beta),
            w.act_curve(&spec.gamma_m1),
        ];
        let ok = substitute_block(&f, 0, 3, &replacement, &fam);
        assert!(ok.is_ok());
        let junk = vec![spec.beta.clone(), spec.beta.clone(), spec.beta.clone()];
        let bad = substitute_block(&f, 0, 3, &junk, &fam);
        assert!(bad.is_err());
    }

    #[test]
    fn partial_twist_identity_and_gluing() {
        let m = build_s_hat();
        let f = n_seed(&m);
        let spec = t_spec(&m.registry);
        let (same, rep0) = partial_twist(&f, 0, [0, 0, 0], &spec, 8).unwrap();
        assert!(factorizations_isotopic(&f, &same));
        assert_eq!(rep0.h1_map, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let (tw, rep1) = partial_twist(&f, 0, [1, 0, 0], &spec, 8).unwrap();
        // [γ_{-1}] ↦ [γ_{-1}] − [α1]
        assert_eq!(rep1.h1_map, [[1, 0, -1], [0, 1, 0], [0, 0, 1]]);
        // The twisted block is detected with the new exponents.
        assert_eq!(detect_t_block(&tw, 0, &spec, 8).unwrap(), [1, 0, 0]);
        // Entries outside the block are untouched.
        assert!(is_isotopic(tw.entry(4), m.registry.curve("alpha1")));
    }

    #[test]
    fn non_t_block_is_refused() {
        let m = build_s_hat();
        let f = n_seed(&m);
        let spec = t_spec(&m.registry);
        assert!(partial_twist(&f, 3, [1, 0, 0], &spec, 8).is_err());
    }

    #[test]
    fn unchanged_certificate_round_trips() {
        let m = build_s_hat();
        let f = n_seed(&m);
        let spec = t_spec(&m.registry);
        for i in [-2i64, -1, 0, 1, 2, 3] {
            let (tw, _) = partial_twist(&f, 0, [i, 0, 0], &spec, 8).unwrap();
            let moves =
                unchanged_certificate(&tw, 0, m.registry.curve("alpha1"), i).unwrap();
            let back = apply_moves(&tw, &moves).unwrap();
            assert!(factorizations_isotopic(&back, &f), "round trip failed at i={i}");
        }
    }

    #[test]
    fn certificate_refused_without_mu() {
        let m = build_s_hat();
        // T alone: α1 is not among the remaining vanishing cycles.
        let f = t_fact(&m);
        let spec = t_spec(&m.registry);
        let (tw, _) = partial_twist(&f, 0, [1, 0, 0], &spec, 8).unwrap();
        assert!(unchanged_certificate(&tw, 0, m.registry.curve("alpha1"), 1).is_err());
    }
}
