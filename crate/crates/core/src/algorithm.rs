//! The end-to-end pipeline: seed validation, rectangle-modification planning
//! (the admissibility sets J and J_α1 with the minimal modification counts),
//! construction of the modified factorization families, per-member invariant
//! reports with cross-family consistency assertions, and the reduced-chain /
//! P-function machinery used to separate family members by their Chern
//! pairings.

use crate::curve::{
    geometric_intersection, is_isotopic, r_modification, rotation_number, Curve, RVariant,
};
use crate::factorization::Factorization;
use crate::invariants::{
    boundary_h1, c1_report, homology_report, intersection_form, kirby_data,
};
use crate::mcg::FillingFamily;
use crate::models::{
    build_e, build_s_hat, cocore_arc, gamma, q_with_arc, rho, twist_power, Model,
};
use crate::snf::{AbelianGroup, FormSummary};
use crate::surface::HandleSurface;
use crate::tietze::Pi1Verdict;

use std::sync::Arc as StdArc;

/// Number of leading entries forming the torus block.
pub const BLOCK: usize = 3;

/// A seed: a model surface with its registered curves, plus a factorization
/// whose first three entries form the torus block and whose remaining
/// entries C_1..C_n are the working cycles.
pub struct Seed {
    pub model: Model,
    pub entries: Vec<Curve>,
}

impl Seed {
    /// Number of working cycles C_1..C_n.
    pub fn n(&self) -> usize {
        assert!(self.entries.len() >= BLOCK);
        self.entries.len() - BLOCK
    }

    /// 1-based access to C_j.
    pub fn c(&self, j: usize) -> &Curve {
        &self.entries[BLOCK + j - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedViolation {
    /// Leading three entries are not the torus block.
    LeadingBlock(String),
    /// A working cycle is null-homologous (not allowable).
    NullHomologous(usize),
    /// A required curve is missing from {C_1..C_n} (oriented isotopy).
    MissingCurve(&'static str),
}

impl std::fmt::Display for SeedViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedViolation::LeadingBlock(s) => write!(f, "leading torus block malformed: {s}"),
            SeedViolation::NullHomologous(j) => {
                write!(f, "working cycle C_{j} is null-homologous")
            }
            SeedViolation::MissingCurve(name) => write!(
                f,
                "required curve {name} does not occur among the working cycles \
                 (oriented isotopy)"
            ),
        }
    }
}

/// Check the three seed conditions: torus block up front, all working cycles
/// homologically non-trivial, and alpha1, alpha2, gamma-1 present among them.
pub fn validate_seed(seed: &Seed) -> Vec<SeedViolation> {
    let reg = &seed.model.registry;
    let mut out = Vec::new();
    let want = [reg.curve("gamma1"), reg.curve("beta"), reg.curve("gamma-1")];
    for (k, w) in want.iter().enumerate() {
        if seed.entries.len() <= k || !is_isotopic(&seed.entries[k], w) {
            out.push(SeedViolation::LeadingBlock(format!("position {k}")));
        }
    }
    for j in 1..=seed.n() {
        if seed.c(j).homology().iter().all(|&x| x == 0) {
            out.push(SeedViolation::NullHomologous(j));
        }
    }
    for name in ["alpha1", "alpha2", "gamma-1"] {
        let target = if name == "gamma-1" { gamma(reg, -1) } else { reg.curve(name).clone() };
        if !(1..=seed.n()).any(|j| is_isotopic(seed.c(j), &target)) {
            out.push(SeedViolation::MissingCurve(match name {
                "alpha1" => "alpha1",
                "alpha2" => "alpha2",
                _ => "gamma-1",
            }));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Modification planning
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Step3Plan {
    /// Per working cycle: Q(C_j, tau1) - Q(C_j, tau3).
    pub q_diff: Vec<i64>,
    /// Per working cycle: rotation number r(C_j).
    pub rotation: Vec<i64>,
    /// 1-based indices with nonzero q_diff.
    pub j_set: Vec<usize>,
    /// Subset of j_set whose cycles are oriented-isotopic to alpha1.
    pub j_alpha1: Vec<usize>,
    /// The smallest admissible modification counts.
    pub minimal_m: Vec<i64>,
}

pub fn step3_plan(seed: &Seed) -> Step3Plan {
    let reg = &seed.model.registry;
    let tau1 = reg.arc("tau1");
    let tau3 = reg.arc("tau3");
    let alpha1 = reg.curve("alpha1");
    let n = seed.n();
    let mut q_diff = Vec::with_capacity(n);
    let mut rotation = Vec::with_capacity(n);
    for j in 1..=n {
        q_diff.push(q_with_arc(seed.c(j), tau1) - q_with_arc(seed.c(j), tau3));
        rotation.push(rotation_number(seed.c(j)));
    }
    let j_set: Vec<usize> = (1..=n).filter(|&j| q_diff[j - 1] != 0).collect();
    let j_alpha1: Vec<usize> =
        j_set.iter().copied().filter(|&j| is_isotopic(seed.c(j), alpha1)).collect();
    // Minimal counts: settle the alpha1 indices first, then branch on their
    // parity for the remaining indices of J.
    let mut minimal_m = vec![0i64; n];
    for &j in &j_alpha1 {
        minimal_m[j - 1] = rotation[j - 1].abs() + q_diff[j - 1].abs();
    }
    let some_odd = j_alpha1.iter().any(|&j| minimal_m[j - 1] % 2 != 0);
    for &j in &j_set {
        if !j_alpha1.contains(&j) {
            let factor = if some_odd { 1 } else { 2 };
            minimal_m[j - 1] = rotation[j - 1].abs() + factor * q_diff[j - 1].abs();
        }
    }
    Step3Plan { q_diff, rotation, j_set, j_alpha1, minimal_m }
}

impl Step3Plan {
    /// Whether the given modification counts satisfy the admissibility table.
    pub fn check(&self, m: &[i64]) -> Result<(), String> {
        let n = self.q_diff.len();
        if m.len() != n {
            return Err(format!("expected {n} counts, got {}", m.len()));
        }
        if let Some(j) = m.iter().position(|&x| x < 0) {
            return Err(format!("count for C_{} is negative", j + 1));
        }
        let some_odd = self.j_alpha1.iter().any(|&j| m[j - 1] % 2 != 0);
        for &j in &self.j_set {
            let base = self.rotation[j - 1].abs();
            let q = self.q_diff[j - 1].abs();
            let need = if self.j_alpha1.contains(&j) {
                base + q
            } else if some_odd {
                base + q
            } else {
                base + 2 * q
            };
            if m[j - 1] < need {
                return Err(format!(
                    "count for C_{j} is {}, admissibility needs at least {need}",
                    m[j - 1]
                ));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Step 1: rectangle modifications and the factorization family
// ---------------------------------------------------------------------------

/// Default variant sequence for one cycle: alternate +, -, +, … so the
/// rotation number ends at r(C_j) + (m_j mod 2).
pub fn default_plan(m: &[i64]) -> Vec<Vec<RVariant>> {
    m.iter()
        .map(|&count| {
            (0..count)
                .map(|k| if k % 2 == 0 { RVariant::Plus } else { RVariant::Minus })
                .collect()
        })
        .collect()
}

/// The outcome of applying the modification step: the enlarged fiber, the
/// modified cycles and their auxiliary curves, ready to produce the whole
/// factorization family.
pub struct ModifiedSeed {
    pub model: Model,
    pub base_entries: Vec<Curve>,
    pub m: Vec<i64>,
    pub surface: StdArc<HandleSurface>,
    /// aux[j-1] = the auxiliary curves of the modifications applied to C_j.
    pub aux: Vec<Vec<Curve>>,
    /// modified[j-1] = C_j(m_j).
    pub modified: Vec<Curve>,
}

pub fn apply_step1(
    seed: &Seed,
    m: &[i64],
    plan: Option<&[Vec<RVariant>]>,
) -> Result<ModifiedSeed, String> {
    let n = seed.n();
    if m.len() != n {
        return Err(format!("expected {n} modification counts, got {}", m.len()));
    }
    let default;
    let plan = match plan {
        Some(p) => p,
        None => {
            default = default_plan(m);
            &default
        }
    };
    if plan.len() != n || plan.iter().zip(m).any(|(p, &c)| p.len() != c as usize) {
        return Err("modification plan shape does not match the counts".to_string());
    }
    let mut surface = seed.model.surface.clone();
    let mut modified: Vec<Curve> = (1..=n).map(|j| seed.c(j).clone()).collect();
    let mut aux: Vec<Vec<Curve>> = vec![Vec::new(); n];
    let alpha1 = seed.model.registry.curve("alpha1").clone();
    for j in 0..n {
        for &variant in &plan[j] {
            let cur = modified[j].on(surface.clone());
            let protect = alpha1.on(surface.clone());
            let res = r_modification(&cur, variant, &[&protect])?;
            surface = res.surface.clone();
            // The auxiliary curve is untwisted and disjoint from alpha1 by
            // construction (fresh rectangle); both facts are relied on later.
            assert_eq!(rotation_number(&res.auxiliary), 0);
            assert_eq!(
                geometric_intersection(&res.auxiliary, &alpha1.on(surface.clone())),
                0
            );
            aux[j].push(res.auxiliary);
            modified[j] = res.curve;
        }
    }
    // Re-anchor everything on the final surface.
    for j in 0..n {
        modified[j] = modified[j].on(surface.clone());
        for e in aux[j].iter_mut() {
            *e = e.on(surface.clone());
        }
    }
    Ok(ModifiedSeed {
        model: Model {
            surface: seed.model.surface.clone(),
            registry: seed.model.registry.clone(),
        },
        base_entries: seed.entries.clone(),
        m: m.to_vec(),
        surface,
        aux,
        modified,
    })
}

impl ModifiedSeed {
    pub fn n(&self) -> usize {
        self.modified.len()
    }

    fn tail_entries(&self) -> Vec<Curve> {
        let mut out = Vec::new();
        for j in 0..self.n() {
            for e in &self.aux[j] {
                out.push(e.clone());
            }
            out.push(self.modified[j].clone());
        }
        out
    }

    /// Leading torus block with the twist marking t_alpha1^i applied.
    fn marked_block(&self, i: i64) -> Vec<Curve> {
        let alpha1 = self.model.registry.curve("alpha1");
        self.base_entries[..BLOCK]
            .iter()
            .map(|c| twist_power(alpha1, c, i).on(self.surface.clone()))
            .collect()
    }

    /// The modified factorization with unmarked block.
    pub fn x_m(&self) -> Factorization {
        self.x_i(0)
    }

    /// Family member with the block twisted by i.
    pub fn x_i(&self, i: i64) -> Factorization {
        let mut entries = self.marked_block(i);
        entries.extend(self.tail_entries());
        Factorization::new(self.surface.clone(), entries).expect("member is allowable")
    }

    /// Family member with the extra trailing alpha1 entry.
    pub fn x_tilde_i(&self, i: i64) -> Factorization {
        let mut entries = self.marked_block(i);
        entries.extend(self.tail_entries());
        entries.push(self.model.registry.curve("alpha1").on(self.surface.clone()));
        Factorization::new(self.surface.clone(), entries).expect("member is allowable")
    }

    /// Per-entry modification counts aligned with `x_i` (auxiliary entries
    /// and the block count as unmodified).
    pub fn m_vector(&self) -> Vec<i64> {
        let mut v = vec![0i64; BLOCK];
        for j in 0..self.n() {
            v.extend(std::iter::repeat_n(0i64, self.aux[j].len()));
            v.push(self.m[j]);
        }
        v
    }

    /// Index of the entry C_j(m_j) inside `x_i` (1-based j).
    pub fn entry_index_of_c(&self, j: usize) -> usize {
        let mut idx = BLOCK;
        for k in 1..j {
            idx += self.aux[k - 1].len() + 1;
        }
        idx + self.aux[j - 1].len()
    }

    /// A filling family on the enlarged fiber: all registered model curves
    /// plus the modified cycles and auxiliaries, and a cocore arc for every
    /// 1-handle.
    pub fn filling_family(&self) -> FillingFamily {
        let mut curves: Vec<(String, Curve)> = self
            .model
            .registry
            .curves()
            .map(|(n, c)| (n.clone(), c.on(self.surface.clone())))
            .collect();
        for j in 0..self.n() {
            curves.push((format!("c{}({})", j + 1, self.m[j]), self.modified[j].clone()));
            for (k, e) in self.aux[j].iter().enumerate() {
                curves.push((format!("e{}^{}", k + 1, j + 1), e.clone()));
            }
        }
        let arcs: Vec<(String, crate::curve::ProperArc)> = (0..self.surface.handles.len())
            .map(|k| (format!("cocore{k}"), cocore_arc(&self.surface, k, &format!("cocore{k}"))))
            .collect();
        FillingFamily { curves, arcs }
    }
}

// ---------------------------------------------------------------------------
// Family generation and reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MemberReport {
    pub i: i64,
    pub pi1_verdict: Pi1Verdict,
    pub pi1_ab: AbelianGroup,
    pub h1: AbelianGroup,
    pub h2: AbelianGroup,
    pub boundary_h1: AbelianGroup,
    pub form: FormSummary,
    pub form_matrix: Vec<Vec<i128>>,
    pub c1: Vec<i128>,
    pub characteristic_ok: bool,
    pub open_book_key: String,
    /// Self-intersection of the distinguished section-type class S, present
    /// when the torus class T and a dual S realizing the target exist.
    pub section_square: Option<i128>,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub m: Vec<i64>,
    pub blow_up_count: i64,
    pub members: Vec<MemberReport>,
    pub open_book_key_constant: bool,
}

/// FNV-1a, enough for a deterministic fingerprint of the open-book data.
fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Characteristic polynomial of an integer matrix by interpolation: det(xI−M)
/// is evaluated at k+1 points with fraction-free elimination and the monic
/// result reconstructed by divided differences.
fn char_poly(m: &[Vec<i64>]) -> Vec<i128> {
    let k = m.len();
    if k == 0 {
        return vec![1];
    }
    // Bareiss fraction-free elimination: the last pivot is the determinant.
    let det_plain = |x: i128| -> i128 {
        let mut a: Vec<Vec<i128>> = (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| if r == c { x - i128::from(m[r][c]) } else { -i128::from(m[r][c]) })
                    .collect()
            })
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for p in 0..k {
            if a[p][p] == 0 {
                match (p + 1..k).find(|&r| a[r][p] != 0) {
                    Some(r) => {
                        a.swap(p, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for r in p + 1..k {
                for c in p + 1..k {
                    a[r][c] = (a[r][c] * a[p][p] - a[r][p] * a[p][c]) / prev;
                }
                a[r][p] = 0;
            }
            prev = a[p][p];
        }
        sign * a[k - 1][k - 1]
    };
    // Exact Lagrange interpolation at x = 0, 1, …, k:
    // p = Σ_i y_i · Π_{j≠i} (x − x_j) / (x_i − x_j).
    use num::rational::BigRational;
    use num::BigInt;
    let rat = |x: i128| BigRational::from(BigInt::from(x));
    let xs: Vec<i128> = (0..=k as i128).collect();
    let ys: Vec<i128> = xs.iter().map(|&x| det_plain(x)).collect();
    let mut acc = vec![rat(0); k + 1];
    for i in 0..=k {
        let mut poly = vec![rat(1)];
        let mut denom = rat(1);
        for j in 0..=k {
            if i == j {
                continue;
            }
            let xj = rat(xs[j]);
            let mut next = vec![rat(0); poly.len() + 1];
            for (d, cf) in poly.iter().enumerate() {
                next[d + 1] += cf;
                next[d] -= cf * &xj;
            }
            poly = next;
            denom *= rat(xs[i] - xs[j]);
        }
        let yi = rat(ys[i]);
        for (d, cf) in poly.iter().enumerate() {
            acc[d] += cf * &yi / &denom;
        }
    }
    acc.iter()
        .map(|c| {
            assert!(c.is_integer(), "characteristic polynomial must be integral");
            use std::str::FromStr;
            i128::from_str(&c.to_integer().to_string()).expect("coefficient fits i128")
        })
        .collect()
}

/// Deterministic fingerprint of the boundary open book: fiber signature,
/// entry count, the characteristic polynomial of the total monodromy's H1
/// action (invariant under elementary moves, cyclic permutation, and
/// simultaneous conjugation), and the boundary H1 invariant factors. Equal
/// keys are evidence of equal open books, never a proof.
pub fn open_book_key(f: &Factorization) -> String {
    let mut data = String::new();
    for h in f.surface.handles.iter() {
        data.push_str(&format!("{:?}:{}:{};", h.style, h.rect, h.pos));
    }
    data.push_str(&format!("n={};", f.len()));
    let m = f.total_monodromy().h1_matrix();
    data.push_str("chi=");
    for c in char_poly(&m) {
        data.push_str(&format!("{c},"));
    }
    data.push(';');
    let kd = kirby_data(f, &vec![0; f.len()]);
    data.push_str(&format!("bd={};", boundary_h1(&kd)));
    format!("{:016x}", fnv64(data.as_bytes()))
}

pub fn member_report(ms: &ModifiedSeed, i: i64) -> MemberReport {
    let f = ms.x_i(i);
    let hr = homology_report(&f);
    let kd = kirby_data(&f, &ms.m_vector());
    let form = intersection_form(&kd);
    let c1 = c1_report(&f, &kd);
    assert!(c1.characteristic_ok, "Chern cocycle failed the characteristic congruence");
    let section_square = if ms.m.len() >= 2 {
        let target = section_target(ms.m[0], ms.m[1], i);
        torus_section_basis(&form, f.len(), target).map(|_| target)
    } else {
        None
    };
    MemberReport {
        i,
        pi1_verdict: hr.pi1.verdict.clone(),
        pi1_ab: hr.pi1.abelianization.clone(),
        h1: hr.h1,
        h2: hr.h2,
        boundary_h1: boundary_h1(&kd),
        form: form.summary,
        form_matrix: form.matrix,
        c1: c1.vector,
        characteristic_ok: c1.characteristic_ok,
        open_book_key: open_book_key(&f),
        section_square,
    }
}

pub fn generate_family(ms: &ModifiedSeed, i_values: &[i64]) -> Result<FamilyReport, String> {
    let members: Vec<MemberReport> =
        i_values.iter().map(|&i| member_report(ms, i)).collect();
    // Cross-family consistency: homology-level invariants never move; the
    // intersection form is constant on each parity class of i.
    if let Some(first) = members.first() {
        for mr in &members[1..] {
            if (&mr.h1, &mr.h2, &mr.pi1_ab, &mr.boundary_h1)
                != (&first.h1, &first.h2, &first.pi1_ab, &first.boundary_h1)
            {
                return Err(format!(
                    "homology invariants differ between members i={} and i={}",
                    first.i, mr.i
                ));
            }
        }
        for a in &members {
            for b in &members {
                if (a.i - b.i) % 2 == 0 {
                    let ka = (a.form.rank, a.form.signature, a.form.even);
                    let kb = (b.form.rank, b.form.signature, b.form.even);
                    if ka != kb {
                        return Err(format!(
                            "form invariants differ within a parity class (i={} vs i={})",
                            a.i, b.i
                        ));
                    }
                }
            }
        }
    }
    let key_constant = members.windows(2).all(|w| w[0].open_book_key == w[1].open_book_key);
    if !key_constant {
        return Err("open-book key is not constant across the family".to_string());
    }
    Ok(FamilyReport {
        m: ms.m.to_vec(),
        blow_up_count: ms.m.iter().sum(),
        members,
        open_book_key_constant: key_constant,
    })
}

// ---------------------------------------------------------------------------
// Example builders
// ---------------------------------------------------------------------------

/// Named seeds: the nucleus seed (torus block, gamma-1, alpha1, alpha2), the
/// lens-type seed missing alpha1, and the double-block seed on the genus-one
/// six-boundary surface whose second block is pre-twisted by j.
pub fn build_example(name: &str, j: i64) -> Result<Seed, String> {
    match name {
        "N" => {
            let model = build_s_hat();
            let reg = &model.registry;
            let entries = vec![
                reg.curve("gamma1").clone(),
                reg.curve("beta").clone(),
                reg.curve("gamma-1").clone(),
                reg.curve("gamma-1").clone(),
                reg.curve("alpha1").clone(),
                reg.curve("alpha2").clone(),
            ];
            Ok(Seed { model, entries })
        }
        "L" => {
            let model = build_s_hat();
            let reg = &model.registry;
            let entries = vec![
                reg.curve("gamma1").clone(),
                reg.curve("beta").clone(),
                reg.curve("gamma-1").clone(),
                reg.curve("gamma-1").clone(),
                reg.curve("alpha2").clone(),
            ];
            Ok(Seed { model, entries })
        }
        "P" => {
            let model = build_e();
            let reg = &model.registry;
            let a1 = reg.curve("a1");
            let rho1 = rho(reg, 1);
            let rho_m1 = rho(reg, -1);
            let beta = reg.curve("beta");
            let entries = vec![
                reg.curve("gamma1").clone(),
                reg.curve("beta").clone(),
                reg.curve("gamma-1").clone(),
                reg.curve("gamma-1").clone(),
                reg.curve("alpha1").clone(),
                reg.curve("alpha2").clone(),
                twist_power(a1, &rho1, j),
                twist_power(a1, beta, j),
                twist_power(a1, &rho_m1, j),
                rho_m1.clone(),
                reg.curve("a2").clone(),
            ];
            Ok(Seed { model, entries })
        }
        other => Err(format!("unknown example {other:?}")),
    }
}

/// Boundary sum: place the second fiber's rectangles after the first's and
/// concatenate the factorizations (second surface's handles renumbered).
pub fn boundary_sum(a: &Seed, b: &Factorization) -> Result<Seed, String> {
    let sa = &a.model.surface;
    let sb = &b.surface;
    let mut handles = sa.handles.clone();
    let offset = handles.len();
    for h in &sb.handles {
        let mut h2 = *h;
        h2.rect += sa.rect_count;
        handles.push(h2);
    }
    let joined = StdArc::new(
        HandleSurface::new(sa.rect_count + sb.rect_count, handles).map_err(|e| e.to_string())?,
    );
    let mut entries: Vec<Curve> =
        a.entries.iter().map(|c| c.on(joined.clone())).collect();
    for k in 0..b.len() {
        let c = b.entry(k);
        let word = c
            .word
            .iter()
            .map(|l| crate::word::Lit { handle: l.handle + offset, sign: l.sign })
            .collect();
        entries.push(Curve::base(joined.clone(), word, "summand"));
    }
    // Rebuild the registry on the joined surface.
    let mut registry = crate::models::CurveRegistry::new(joined.clone());
    for (n, c) in a.model.registry.curves() {
        let mut cc = c.on(joined.clone());
        cc.name = Some(n.clone());
        registry.add_curve(cc);
    }
    for (n, arc) in a.model.registry.arcs() {
        let mut aa = arc.on(joined.clone());
        aa.name = Some(n.clone());
        registry.add_arc(aa);
    }
    Ok(Seed { model: Model { surface: joined, registry }, entries })
}

// ---------------------------------------------------------------------------
// Reduced chains and the P-functions
// ---------------------------------------------------------------------------

/// The reduced 2-chain machinery for a family member. Basis order of chain
/// vectors: (block1, block2, block3, C_1, …, C_n) — the auxiliary handles are
/// already cancelled against their modification handles.
pub struct PMachinery {
    pub i: i64,
    /// u_j for j = 3..=n, indexed u[j-3].
    pub u: Vec<Vec<i128>>,
    /// The torus cycle block3 + block1 - 2·block2.
    pub torus_chain: Vec<i128>,
    /// Boundary of each basis chain over the fiber handles (rows).
    pub d2: Vec<Vec<i128>>,
    /// Chern pairing with each basis chain: 0 on the block, r(C_j(m_j)) on C_j.
    pub r_hat: Vec<i128>,
    pub q1: Vec<i64>,
    pub q2: Vec<i64>,
    pub q3: Vec<i64>,
    pub q_beta: Vec<i64>,
    pub q_alpha1: Vec<i64>,
    pub j_set: Vec<usize>,
}

/// Build the machinery; requires the working cycles to start with alpha1,
/// alpha2, gamma-1 in this order (the reduction cancels the fiber handles
/// against precisely these entries).
pub fn reduced_chains(ms: &ModifiedSeed, i: i64) -> Result<PMachinery, String> {
    let reg = &ms.model.registry;
    let n = ms.n();
    if n < 3 {
        return Err("need at least three working cycles".to_string());
    }
    let seed_like = Seed {
        model: Model { surface: ms.model.surface.clone(), registry: reg.clone() },
        entries: ms.base_entries.clone(),
    };
    if !is_isotopic(seed_like.c(1), reg.curve("alpha1"))
        || !is_isotopic(seed_like.c(2), reg.curve("alpha2"))
        || !is_isotopic(seed_like.c(3), &gamma(reg, -1))
    {
        return Err(
            "reduced-chain form needs C_1 = alpha1, C_2 = alpha2, C_3 = gamma-1".to_string()
        );
    }
    let plan = step3_plan(&seed_like);
    let alpha1 = reg.curve("alpha1");
    let dim = BLOCK + n;
    let mut q1 = Vec::new();
    let mut q2 = Vec::new();
    let mut q3 = Vec::new();
    let mut q_beta = Vec::new();
    let mut q_alpha1 = Vec::new();
    for j in 1..=n {
        let c = seed_like.c(j);
        q1.push(q_with_arc(c, reg.arc("tau1")));
        q2.push(q_with_arc(c, reg.arc("tau2")));
        q3.push(q_with_arc(c, reg.arc("tau3")));
        q_beta.push(q_with_arc(c, reg.arc("tau_beta")));
        q_alpha1.push(crate::curve::algebraic_intersection(c, alpha1));
    }
    let mut u = Vec::new();
    for j in 3..=n {
        let mut v = vec![0i128; dim];
        let k = j - 1;
        v[BLOCK + k] = 1;
        v[1] -= i128::from(q_beta[k] - q3[k]);
        v[0] -= i128::from(q3[k]);
        v[BLOCK + 1] -= i128::from(q2[k] - q3[k]);
        v[BLOCK] -= i128::from(q1[k]) + i128::from(i) * i128::from(q_alpha1[k])
            - i128::from(q3[k]);
        u.push(v);
    }
    let mut torus_chain = vec![0i128; dim];
    torus_chain[0] = 1;
    torus_chain[1] = -2;
    torus_chain[2] = 1;
    // Boundaries: the block carries its original classes; each C_j carries
    // the class of t_alpha1^{-i}(C_j).
    let mut d2 = Vec::with_capacity(dim);
    for c in &ms.base_entries[..BLOCK] {
        d2.push(c.homology().iter().map(|&x| i128::from(x)).collect());
    }
    for j in 1..=n {
        let tw = twist_power(alpha1, seed_like.c(j), -i);
        d2.push(tw.homology().iter().map(|&x| i128::from(x)).collect());
    }
    let mut r_hat = vec![0i128; dim];
    for j in 1..=n {
        r_hat[BLOCK + j - 1] = i128::from(rotation_number(&ms.modified[j - 1]));
    }
    Ok(PMachinery {
        i,
        u,
        torus_chain,
        d2,
        r_hat,
        q1,
        q2,
        q3,
        q_beta,
        q_alpha1,
        j_set: plan.j_set,
    })
}

impl PMachinery {
    fn dim(&self) -> usize {
        self.r_hat.len()
    }

    pub fn n(&self) -> usize {
        self.dim() - BLOCK
    }

    pub fn is_cycle(&self, z: &[i128]) -> bool {
        let cols = self.d2[0].len();
        (0..cols).all(|c| (0..self.dim()).map(|r| z[r] * self.d2[r][c]).sum::<i128>() == 0)
    }

    /// Expand (a, b_3..b_n) in the basis chains.
    pub fn chain(&self, a: i128, b: &[i128]) -> Vec<i128> {
        assert_eq!(b.len(), self.n() - 2);
        let mut z: Vec<i128> = self.torus_chain.iter().map(|&x| a * x).collect();
        for (k, &bk) in b.iter().enumerate() {
            for c in 0..self.dim() {
                z[c] += bk * self.u[k][c];
            }
        }
        z
    }

    /// Chern pairing of an arbitrary chain vector.
    pub fn k_value(&self, z: &[i128]) -> i128 {
        z.iter().zip(&self.r_hat).map(|(&a, &b)| a * b).sum()
    }

    pub fn p1(&self, b: &[i128]) -> i128 {
        -(3..=self.n())
            .map(|j| b[j - 3] * i128::from(self.q_alpha1[j - 1]))
            .sum::<i128>()
    }

    pub fn p2(&self, b: &[i128]) -> i128 {
        let r1 = self.r_hat[BLOCK];
        (3..=self.n())
            .filter(|j| self.j_set.contains(j))
            .map(|j| {
                let k = j - 1;
                b[j - 3]
                    * (self.r_hat[BLOCK + k]
                        - i128::from(self.q1[k] - self.q3[k]) * r1)
            })
            .sum()
    }

    pub fn p3(&self, b: &[i128]) -> i128 {
        let r2 = self.r_hat[BLOCK + 1];
        let outside: i128 = (3..=self.n())
            .filter(|j| !self.j_set.contains(j))
            .map(|j| b[j - 3] * self.r_hat[BLOCK + j - 1])
            .sum();
        let shared: i128 = (3..=self.n())
            .map(|j| {
                let k = j - 1;
                b[j - 3] * i128::from(self.q2[k] - self.q3[k]) * r2
            })
            .sum();
        outside - shared
    }

    /// i·P1·r(C_1(m_1)) + P2 + P3: must match the Chern pairing up to sign.
    pub fn closed_form(&self, b: &[i128]) -> i128 {
        i128::from(self.i) * self.p1(b) * self.r_hat[BLOCK] + self.p2(b) + self.p3(b)
    }
}

/// Solve x·B = t over the integers for basis rows B. Uses the Smith form of
/// B: with U·B·V = D the equation becomes y·D = t·V, x = y·U.
pub fn solve_in_basis(basis: &[Vec<i128>], target: &[i128]) -> Option<Vec<i128>> {
    let k = basis.len();
    if k == 0 {
        return if target.iter().all(|&x| x == 0) { Some(vec![]) } else { None };
    }
    let n = basis[0].len();
    assert_eq!(target.len(), n);
    let s = crate::snf::smith_normal_form(basis);
    let tv: Vec<i128> = (0..n)
        .map(|c| (0..n).map(|r| target[r] * s.v[r][c]).sum())
        .collect();
    let mut y = vec![0i128; k];
    for c in 0..n {
        if c < s.rank {
            if tv[c] % s.d[c][c] != 0 {
                return None;
            }
            y[c] = tv[c] / s.d[c][c];
        } else if tv[c] != 0 {
            return None;
        }
    }
    let x: Vec<i128> =
        (0..k).map(|c| (0..k).map(|r| y[r] * s.u[r][c]).sum()).collect();
    Some(x)
}

fn form_pair(matrix: &[Vec<i128>], u: &[i128], v: &[i128]) -> i128 {
    let d = matrix.len();
    (0..d).map(|r| (0..d).map(|c| u[r] * matrix[r][c] * v[c]).sum::<i128>()).sum()
}

/// For a rank-2 form of a torus-block family member: coefficients (in the H2
/// basis) of classes T, S with T the block torus (entry chain 1·block1
/// −2·block2 + 1·block3), T·T = 0, T·S = 1, and S·S equal to the requested
/// value. Returns None when T is not integral, T·T ≠ 0, no dual class exists,
/// or the requested square has the wrong parity.
pub fn torus_section_basis(
    form: &crate::invariants::IntersectionForm,
    n_entries: usize,
    target_ss: i128,
) -> Option<(Vec<i128>, Vec<i128>)> {
    let mut t_entries = vec![0i128; n_entries];
    t_entries[0] = 1;
    t_entries[1] = -2;
    t_entries[2] = 1;
    let t = solve_in_basis(&form.basis, &t_entries)?;
    if form_pair(&form.matrix, &t, &t) != 0 {
        return None;
    }
    // Dual class: solve Σ x_c (G·t)_c = 1 by accumulating extended gcds.
    let dim = form.basis.len();
    let g: Vec<i128> = (0..dim)
        .map(|r| (0..dim).map(|c| form.matrix[r][c] * t[c]).sum())
        .collect();
    let mut s0 = vec![0i128; dim];
    let mut acc: i128 = 0;
    for c in 0..dim {
        let (d, x, y) = ext_gcd(acc, g[c]);
        for sc in s0.iter_mut() {
            *sc *= x;
        }
        s0[c] = y;
        acc = d;
    }
    if acc.abs() != 1 {
        return None;
    }
    if acc < 0 {
        for sc in s0.iter_mut() {
            *sc = -*sc;
        }
    }
    let ss = form_pair(&form.matrix, &s0, &s0);
    if (target_ss - ss).rem_euclid(2) != 0 {
        return None;
    }
    // S·(S + kT) shifts the square by 2k since T·S = 1 and T·T = 0.
    let k = (target_ss - ss) / 2;
    let s: Vec<i128> = (0..dim).map(|c| s0[c] + k * t[c]).collect();
    debug_assert_eq!(form_pair(&form.matrix, &s, &s), target_ss);
    debug_assert_eq!(form_pair(&form.matrix, &t, &s), 1);
    Some((t, s))
}

/// Self-intersection of the distinguished section-type class S of a
/// torus-block family member: −m0 − i − 2 − i²(m1 + 1), where m0, m1 are
/// the modification counts of the first two working cycles.
pub fn section_target(m0: i64, m1: i64, i: i64) -> i128 {
    i128::from(-m0 - i - 2) - i128::from(i) * i128::from(i) * i128::from(m1 + 1)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return (a, 1, 0);
    }
    let (d, x, y) = ext_gcd(b, a.rem_euclid(b));
    (d, y, x - a.div_euclid(b) * y)
}

/// Threshold index: beyond it, the relative-genus separation argument
/// applies. `g` are genus bounds for the auxiliary basis classes and
/// `v_squares` their self-intersections.
pub fn i_threshold(mu: i64, g: &[i64], v_squares: &[i128]) -> i128 {
    assert_eq!(g.len(), v_squares.len());
    let mut best: i128 = (2 * mu - 1).max(1).into();
    for (gk, vv) in g.iter().zip(v_squares) {
        best = best.max(i128::from(2 * gk - 1) - vv);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_seed_validates_and_l_seed_names_missing_alpha1() {
        let n = build_example("N", 0).unwrap();
        assert!(validate_seed(&n).is_empty());
        let l = build_example("L", 0).unwrap();
        let v = validate_seed(&l);
        assert_eq!(v, vec![SeedViolation::MissingCurve("alpha1")]);
    }

    #[test]
    fn step3_plan_for_n_seed() {
        let n = build_example("N", 0).unwrap();
        let plan = step3_plan(&n);
        assert_eq!(plan.j_set, vec![2]);
        assert_eq!(plan.j_alpha1, vec![2]);
        assert_eq!(plan.minimal_m, vec![0, 1, 0]);
        assert!(plan.check(&[0, 1, 0]).is_ok());
        assert!(plan.check(&[0, 0, 0]).is_err());
        assert!(plan.check(&[5, 3, 2]).is_ok());
    }

    #[test]
    fn step1_shapes() {
        let n = build_example("N", 0).unwrap();
        let ms = apply_step1(&n, &[1, 1, 0], None).unwrap();
        let x = ms.x_m();
        assert_eq!(x.len(), 3 + 2 + 3); // block + two aux + three cycles
        let xt = ms.x_tilde_i(2);
        assert_eq!(xt.len(), 3 + 3 + 2 + 1); // n + sum(m) + 4 entries
        assert_eq!(ms.m_vector(), vec![0, 0, 0, 0, 1, 0, 1, 0]);
        assert_eq!(ms.entry_index_of_c(1), 4);
        assert_eq!(ms.entry_index_of_c(2), 6);
        assert_eq!(ms.entry_index_of_c(3), 7);
        // x_0 equals x_m entrywise.
        assert!(crate::factorization::factorizations_isotopic(&ms.x_i(0), &x));
    }

    #[test]
    fn nucleus_family_small() {
        let n = build_example("N", 0).unwrap();
        let ms = apply_step1(&n, &[1, 1, 0], None).unwrap();
        let rep = generate_family(&ms, &[-1, 0, 1]).unwrap();
        assert!(rep.open_book_key_constant);
        for mr in &rep.members {
            assert_eq!(mr.pi1_verdict, Pi1Verdict::TrivialCertified);
            assert!(mr.h1.is_trivial());
            assert_eq!(mr.h2, AbelianGroup::free(2));
            assert!(mr.boundary_h1.is_trivial());
            assert!(mr.form.unimodular && !mr.form.definite);
        }
        // A basis realizing T·T = 0, T·S = 1, S·S = -3 - i - 2i² at
        // m = (1,1,0), and even form exactly at odd i.
        for mr in &rep.members {
            let f = ms.x_i(mr.i);
            let kd = crate::invariants::kirby_data(&f, &ms.m_vector());
            let form = crate::invariants::intersection_form(&kd);
            let target = -3 - i128::from(mr.i) - 2 * i128::from(mr.i) * i128::from(mr.i);
            let basis = torus_section_basis(&form, f.len(), target);
            assert!(basis.is_some(), "no T/S basis with S·S = {target} at i = {}", mr.i);
            assert_eq!(mr.form.even, mr.i.rem_euclid(2) == 1);
        }
    }

    #[test]
    fn boundary_sum_concatenates() {
        use crate::surface::{HandleSpec, Style};
        let n = build_example("N", 0).unwrap();
        let s = StdArc::new(
            HandleSurface::new(
                1,
                vec![HandleSpec { style: Style::Vertical, rect: 0, pos: 500 }],
            )
            .unwrap(),
        );
        let core =
            Curve::base(s.clone(), vec![crate::word::Lit { handle: 0, sign: 1 }], "d1");
        let f = Factorization::new(s, vec![core]).unwrap();
        let joined = boundary_sum(&n, &f).unwrap();
        assert_eq!(joined.entries.len(), 7);
        assert_eq!(joined.model.surface.handles.len(), 5);
        assert!(validate_seed(&joined).is_empty());
    }
}
