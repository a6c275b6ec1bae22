//! Canonical model surfaces with their named curves and cocore arcs.
//!
//! * `build_s_hat`: the genus-one surface with three boundary components,
//!   carrying α1, α2, α3 (vertical 1-handle cores), β (horizontal core),
//!   boundary-parallel δ1..δ3, and the cocore arcs τ1, τ2, τ3, τβ.
//! * `build_e`: the genus-one surface with six boundary components carrying
//!   two α-style triples (α1..α3 and a1..a3) sharing the single curve β.
//! * `build_custom`: a small text format for arbitrary handle surfaces.

use std::collections::BTreeMap;
use std::sync::Arc as StdArc;

use crate::curve::{dehn_twist, ArcEnd, Curve, Diagram, Obj, ProperArc};
use crate::surface::{End, HandleSpec, HandleSurface, Style};
use crate::word::Lit;

/// Named curves and arcs on one surface.
#[derive(Clone)]
pub struct CurveRegistry {
    pub surface: StdArc<HandleSurface>,
    curves: BTreeMap<String, Curve>,
    arcs: BTreeMap<String, ProperArc>,
}

impl CurveRegistry {
    pub fn new(surface: StdArc<HandleSurface>) -> Self {
        CurveRegistry { surface, curves: BTreeMap::new(), arcs: BTreeMap::new() }
    }

    pub fn add_curve(&mut self, c: Curve) {
        let name = c.name.clone().expect("registered curves must be named");
        self.curves.insert(name, c);
    }

    pub fn add_arc(&mut self, a: ProperArc) {
        let name = a.name.clone().expect("registered arcs must be named");
        self.arcs.insert(name, a);
    }

    pub fn curve(&self, name: &str) -> &Curve {
        self.curves
            .get(name)
            .unwrap_or_else(|| panic!("no registered curve named {name:?}"))
    }

    pub fn arc(&self, name: &str) -> &ProperArc {
        self.arcs
            .get(name)
            .unwrap_or_else(|| panic!("no registered arc named {name:?}"))
    }

    pub fn has_curve(&self, name: &str) -> bool {
        self.curves.contains_key(name)
    }

    pub fn curves(&self) -> impl Iterator<Item = (&String, &Curve)> {
        self.curves.iter()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&String, &ProperArc)> {
        self.arcs.iter()
    }
}

/// A model surface together with its registry.
pub struct Model {
    pub surface: StdArc<HandleSurface>,
    pub registry: CurveRegistry,
}

/// Push-off of the cocore of 1-handle `handle`: an arc hugging the handle's
/// A-slot, crossing exactly the strands that traverse the handle, oriented so
/// that Q(core, cocore) = +1.
pub fn cocore_arc(surface: &StdArc<HandleSurface>, handle: usize, name: &str) -> ProperArc {
    ProperArc {
        surface: surface.clone(),
        word: vec![],
        start: ArcEnd { handle, end: End::A, before: false, sub: 0 },
        finish: ArcEnd { handle, end: End::A, before: true, sub: 0 },
        name: Some(name.to_string()),
    }
}

/// Signed intersection Q(c, a) of a closed curve with a proper arc.
pub fn q_with_arc(c: &Curve, a: &ProperArc) -> i64 {
    let dg = Diagram::new(&c.surface, &[Obj::Closed(c), Obj::Open(a)]);
    dg.algebraic_intersection(0, 1)
}

/// t_about^j applied to `of` (j may be negative).
pub fn twist_power(about: &Curve, of: &Curve, j: i64) -> Curve {
    let sign: i8 = if j >= 0 { 1 } else { -1 };
    let mut c = of.clone();
    for _ in 0..j.unsigned_abs() {
        c = dehn_twist(about, &c, sign);
    }
    c
}

/// (t_{c3} ∘ t_{c2} ∘ t_{c1})^i applied to `of` (functional order: c1 acts
/// first); i may be negative.
pub fn triple_twist_power(c1: &Curve, c2: &Curve, c3: &Curve, of: &Curve, i: i64) -> Curve {
    let mut c = of.clone();
    if i >= 0 {
        for _ in 0..i {
            c = dehn_twist(c3, &dehn_twist(c2, &dehn_twist(c1, &c, 1), 1), 1);
        }
    } else {
        for _ in 0..(-i) {
            c = dehn_twist(c1, &dehn_twist(c2, &dehn_twist(c3, &c, -1), -1), -1);
        }
    }
    c
}

/// γ_i = (t_{α3} ∘ t_{α2} ∘ t_{α1})^i(β).
pub fn gamma(reg: &CurveRegistry, i: i64) -> Curve {
    let mut c = triple_twist_power(
        reg.curve("alpha1"),
        reg.curve("alpha2"),
        reg.curve("alpha3"),
        reg.curve("beta"),
        i,
    );
    c.name = Some(format!("gamma{i}"));
    c
}

/// γ_i^(j) = t_{α1}^j(γ_i).
pub fn gamma_marked(reg: &CurveRegistry, i: i64, j: i64) -> Curve {
    let mut c = twist_power(reg.curve("alpha1"), &gamma(reg, i), j);
    c.name = Some(format!("gamma{i}^({j})"));
    c
}

/// β^(j) = t_{α1}^j(β).
pub fn beta_marked(reg: &CurveRegistry, j: i64) -> Curve {
    let mut c = twist_power(reg.curve("alpha1"), reg.curve("beta"), j);
    c.name = Some(format!("beta^({j})"));
    c
}

/// ρ_i = (t_{a3} ∘ t_{a2} ∘ t_{a1})^i(β) on the six-holed model.
pub fn rho(reg: &CurveRegistry, i: i64) -> Curve {
    let mut c = triple_twist_power(
        reg.curve("a1"),
        reg.curve("a2"),
        reg.curve("a3"),
        reg.curve("beta"),
        i,
    );
    c.name = Some(format!("rho{i}"));
    c
}

/// ρ_i^(j) = t_{a1}^j(ρ_i).
pub fn rho_marked(reg: &CurveRegistry, i: i64, j: i64) -> Curve {
    let mut c = twist_power(reg.curve("a1"), &rho(reg, i), j);
    c.name = Some(format!("rho{i}^({j})"));
    c
}

/// b^(j) = t_{a1}^j(β).
pub fn b_marked(reg: &CurveRegistry, j: i64) -> Curve {
    let mut c = twist_power(reg.curve("a1"), reg.curve("beta"), j);
    c.name = Some(format!("b^({j})"));
    c
}

fn register_deltas_and_cocores(reg: &mut CurveRegistry, cocore_names: &[(usize, String)]) {
    let s = reg.surface.clone();
    for (i, w) in s.boundary_words().iter().enumerate() {
        reg.add_curve(Curve::base(s.clone(), w.clone(), &format!("delta{}", i + 1)));
    }
    for (k, name) in cocore_names {
        reg.add_arc(cocore_arc(&s, *k, name));
    }
}

/// The three-holed torus model: α1, α2, α3 vertical, β horizontal.
pub fn build_s_hat() -> Model {
    let surface = StdArc::new(
        HandleSurface::new(
            1,
            vec![
                HandleSpec { style: Style::Vertical, rect: 0, pos: 300 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 500 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 700 },
                HandleSpec { style: Style::Horizontal, rect: 0, pos: 400 },
            ],
        )
        .expect("static model surface"),
    );
    let mut reg = CurveRegistry::new(surface.clone());
    for (k, name) in ["alpha1", "alpha2", "alpha3", "beta"].iter().enumerate() {
        reg.add_curve(Curve::base(surface.clone(), vec![Lit::new(k, 1)], name));
    }
    register_deltas_and_cocores(
        &mut reg,
        &[
            (0, "tau1".to_string()),
            (1, "tau2".to_string()),
            (2, "tau3".to_string()),
            (3, "tau_beta".to_string()),
        ],
    );
    let g1 = gamma(&reg, 1);
    let gm1 = gamma(&reg, -1);
    reg.add_curve(g1);
    reg.add_curve(gm1);
    Model { surface, registry: reg }
}

/// The six-holed genus-one model: two vertical triples α1..α3 and a1..a3
/// sharing the horizontal curve β.
pub fn build_e() -> Model {
    let surface = StdArc::new(
        HandleSurface::new(
            1,
            vec![
                HandleSpec { style: Style::Vertical, rect: 0, pos: 200 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 300 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 400 },
                HandleSpec { style: Style::Horizontal, rect: 0, pos: 400 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 600 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 700 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 800 },
            ],
        )
        .expect("static model surface"),
    );
    let mut reg = CurveRegistry::new(surface.clone());
    for (k, name) in ["alpha1", "alpha2", "alpha3", "beta", "a1", "a2", "a3"]
        .iter()
        .enumerate()
    {
        reg.add_curve(Curve::base(surface.clone(), vec![Lit::new(k, 1)], name));
    }
    register_deltas_and_cocores(
        &mut reg,
        &[
            (0, "tau1".to_string()),
            (1, "tau2".to_string()),
            (2, "tau3".to_string()),
            (3, "tau_beta".to_string()),
            (4, "tau_a1".to_string()),
            (5, "tau_a2".to_string()),
            (6, "tau_a3".to_string()),
        ],
    );
    let g1 = gamma(&reg, 1);
    let gm1 = gamma(&reg, -1);
    let r1 = rho(&reg, 1);
    let rm1 = rho(&reg, -1);
    reg.add_curve(g1);
    reg.add_curve(gm1);
    reg.add_curve(r1);
    reg.add_curve(rm1);
    Model { surface, registry: reg }
}

/// Parse the textual surface spec: `rects N` once, then one `vhandle R P` or
/// `hhandle R P` line per 1-handle ('#' starts a comment). Handle ids follow
/// line order; cores are registered as c0, c1, … with cocores tau0, tau1, …
pub fn build_custom(spec: &str) -> Result<Model, String> {
    let mut rects: Option<usize> = None;
    let mut handles: Vec<HandleSpec> = Vec::new();
    for (ln, raw) in spec.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let kw = it.next().unwrap();
        let args: Vec<&str> = it.collect();
        let parse = |s: &str| -> Result<i64, String> {
            s.parse().map_err(|_| format!("line {}: bad integer {s:?}", ln + 1))
        };
        match kw {
            "rects" => {
                if args.len() != 1 || rects.is_some() {
                    return Err(format!("line {}: rects expects one count, once", ln + 1));
                }
                rects = Some(parse(args[0])? as usize);
            }
            "vhandle" | "hhandle" => {
                if args.len() != 2 {
                    return Err(format!("line {}: {kw} expects RECT POS", ln + 1));
                }
                handles.push(HandleSpec {
                    style: if kw == "vhandle" { Style::Vertical } else { Style::Horizontal },
                    rect: parse(args[0])? as usize,
                    pos: parse(args[1])?,
                });
            }
            other => return Err(format!("line {}: unknown keyword {other:?}", ln + 1)),
        }
    }
    let rects = rects.ok_or("missing `rects` line")?;
    let surface =
        StdArc::new(HandleSurface::new(rects, handles).map_err(|e| e.to_string())?);
    let mut reg = CurveRegistry::new(surface.clone());
    let cocores: Vec<(usize, String)> = (0..surface.handles.len())
        .map(|k| (k, format!("tau{k}")))
        .collect();
    for k in 0..surface.handles.len() {
        reg.add_curve(Curve::base(surface.clone(), vec![Lit::new(k, 1)], &format!("c{k}")));
    }
    register_deltas_and_cocores(&mut reg, &cocores);
    Ok(Model { surface, registry: reg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{geometric_intersection, rotation_number};

    #[test]
    fn s_hat_shape() {
        let m = build_s_hat();
        assert_eq!(m.surface.handles.len(), 4);
        assert_eq!(m.surface.genus(), 1);
        assert_eq!(m.surface.boundary_count(), 3);
    }

    #[test]
    fn e_shape() {
        let m = build_e();
        assert_eq!(m.surface.handles.len(), 7);
        assert_eq!(m.surface.genus(), 1);
        assert_eq!(m.surface.boundary_count(), 6);
    }

    #[test]
    fn gamma_homology_and_rotation() {
        let m = build_s_hat();
        let g1 = m.registry.curve("gamma1");
        let gm1 = m.registry.curve("gamma-1");
        // [γ_1] = [β] + [α1]+[α2]+[α3], [γ_{-1}] = [β] − [α1]−[α2]−[α3]
        assert_eq!(g1.homology(), vec![1, 1, 1, 1]);
        assert_eq!(gm1.homology(), vec![-1, -1, -1, 1]);
        assert_eq!(rotation_number(g1), 0);
        assert_eq!(rotation_number(gm1), 0);
    }

    #[test]
    fn deltas_are_boundary_parallel() {
        for m in [build_s_hat(), build_e()] {
            let deltas: Vec<&Curve> = m
                .registry
                .curves()
                .filter(|(n, _)| n.starts_with("delta"))
                .map(|(_, c)| c)
                .collect();
            for d in &deltas {
                for (_, c) in m.registry.curves() {
                    assert_eq!(geometric_intersection(d, c), 0, "{:?} vs {:?}", d.name, c.name);
                }
            }
        }
    }

    #[test]
    fn cocore_pairing_is_handle_count() {
        let m = build_s_hat();
        let taus = ["tau1", "tau2", "tau3", "tau_beta"];
        for (k, cn) in ["alpha1", "alpha2", "alpha3", "beta"].iter().enumerate() {
            let c = m.registry.curve(cn);
            for (l, tn) in taus.iter().enumerate() {
                let want = if k == l { 1 } else { 0 };
                assert_eq!(q_with_arc(c, m.registry.arc(tn)), want, "{cn} vs {tn}");
            }
        }
        // Q(c, τ_k) = homology[k] for derived curves too.
        let g1 = m.registry.curve("gamma1");
        for (l, tn) in taus.iter().enumerate() {
            assert_eq!(q_with_arc(g1, m.registry.arc(tn)), g1.homology()[l]);
        }
    }

    #[test]
    fn rho_mirrors_gamma_on_e() {
        let m = build_e();
        let r1 = m.registry.curve("rho1");
        assert_eq!(r1.homology(), vec![0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(rotation_number(r1), 0);
    }

    #[test]
    fn custom_spec_parses() {
        let m = build_custom("rects 1\n# a torus with one hole\nvhandle 0 500\nhhandle 0 400\n")
            .unwrap();
        assert_eq!(m.surface.genus(), 1);
        assert_eq!(m.surface.boundary_count(), 1);
        assert!(build_custom("rects 1\nvhandle 0 500\nvhandle 0 500\n").is_err());
        assert!(build_custom("vhandle 0 500\n").is_err());
    }

    #[test]
    fn marked_curves_match_definitions() {
        let m = build_s_hat();
        let g = gamma_marked(&m.registry, 1, 2);
        let direct = twist_power(m.registry.curve("alpha1"), m.registry.curve("gamma1"), 2);
        assert!(crate::curve::is_isotopic(&g, &direct));
        let b2 = beta_marked(&m.registry, 0);
        assert!(crate::curve::is_isotopic(&b2, m.registry.curve("beta")));
    }
}
