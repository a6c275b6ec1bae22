//! Cross-module property tests: layout consistency oracles, fingerprint
//! invariance, and Kirby-data sanity on randomized inputs.

use palf_core::algorithm::{apply_step1, build_example, open_book_key, boundary_sum};
use palf_core::curve::{algebraic_intersection, Curve, Diagram, Obj};
use palf_core::factorization::{apply_moves, hurwitz_move, Factorization, Move};
use palf_core::invariants::kirby_data;
use palf_core::mcg::MappingClassWord;
use palf_core::models::{build_s_hat, twist_power};

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 11
    }
    fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }
}

fn random_curves(n: usize, seed: u64) -> Vec<Curve> {
    let model = build_s_hat();
    let reg = &model.registry;
    let base = ["alpha1", "alpha2", "alpha3", "beta", "gamma1", "gamma-1"];
    let mut rng = Rng(seed);
    (0..n)
        .map(|_| {
            let mut c = reg.curve(base[(rng.next() % 6) as usize]).clone();
            for _ in 0..rng.in_range(1, 3) {
                let about = reg.curve(base[(rng.next() % 6) as usize]);
                let k = if rng.next() % 2 == 0 { 1 } else { -1 };
                c = twist_power(about, &c, k);
            }
            c
        })
        .collect()
}

/// Every handle band must carry reversed strand orders at its two slots —
/// the planarity condition behind all crossing counts.
#[test]
fn band_orders_reverse_through_every_handle() {
    let curves = random_curves(24, 3);
    let surface = curves[0].surface.clone();
    for chunk in curves.chunks(6) {
        let objs: Vec<Obj> = chunk.iter().map(Obj::Closed).collect();
        let dia = Diagram::new(&surface, &objs);
        for h in 0..surface.handles.len() {
            let (side_a, side_b) = dia.band_orders(&surface, h);
            let reversed: Vec<_> = side_b.into_iter().rev().collect();
            assert_eq!(side_a, reversed, "band of handle {h} has a hidden crossing");
        }
    }
}

/// The signed on-surface crossing count must equal the homological pairing
/// regardless of which other curves share the diagram.
#[test]
fn signed_crossings_match_homological_pairing_in_context() {
    let curves = random_curves(18, 17);
    let surface = curves[0].surface.clone();
    for chunk in curves.chunks(6) {
        let objs: Vec<Obj> = chunk.iter().map(Obj::Closed).collect();
        let dia = Diagram::new(&surface, &objs);
        for a in 0..chunk.len() {
            for b in 0..chunk.len() {
                if a != b {
                    assert_eq!(
                        dia.algebraic_intersection(a, b),
                        algebraic_intersection(&chunk[a], &chunk[b]),
                        "pairing depends on diagram context for pair ({a},{b})"
                    );
                }
            }
        }
    }
}

/// Pushed-off linking numbers are integers: the crossing total between any
/// two entries has even parity in every generated member.
#[test]
fn kirby_matrix_is_symmetric_and_defined_for_random_members() {
    let seed = build_example("N", 0).unwrap();
    for m in [[0, 0, 0], [1, 0, 0], [2, 1, 0], [1, 1, 1]] {
        let ms = apply_step1(&seed, &m, None).unwrap();
        for i in [-2, 0, 1, 3] {
            let f = ms.x_i(i);
            let kd = kirby_data(&f, &ms.m_vector());
            for r in 0..f.len() {
                for c in 0..f.len() {
                    assert_eq!(kd.lambda[r][c], kd.lambda[c][r]);
                }
            }
        }
    }
}

/// The open-book fingerprint is invariant under all three factorization
/// moves, including the ones that only preserve the monodromy up to
/// conjugation.
#[test]
fn open_book_key_is_move_invariant() {
    let seed = build_example("N", 0).unwrap();
    let f = Factorization::new(seed.model.surface.clone(), seed.entries.clone()).unwrap();
    let key = open_book_key(&f);
    let psi = MappingClassWord::twist(seed.model.registry.curve("beta"), 1);
    let mut rng = Rng(29);
    for step in 0..30 {
        let mv = match rng.next() % 4 {
            0 => Move::Cyclic(rng.in_range(1, 5) as usize),
            1 => Move::ElementaryL(rng.in_range(0, 4) as usize),
            2 => Move::ElementaryR(rng.in_range(0, 4) as usize),
            _ => Move::Conjugate(psi.clone()),
        };
        let g = hurwitz_move(&f, &mv).unwrap();
        assert_eq!(open_book_key(&g), key, "key changed under move {step}");
    }
    // A short compound walk as well.
    let walk = vec![
        Move::ElementaryL(2),
        Move::Cyclic(3),
        Move::ElementaryR(0),
        Move::Conjugate(psi),
    ];
    let g = apply_moves(&f, &walk).unwrap();
    assert_eq!(open_book_key(&g), key);
}

/// Boundary sums concatenate entries over the shared fiber.
#[test]
fn boundary_sum_concatenates_over_the_shared_fiber() {
    let seed = build_example("N", 0).unwrap();
    let f = Factorization::new(seed.model.surface.clone(), seed.entries.clone()).unwrap();
    let reg = &seed.model.registry;
    let g = Factorization::new(
        seed.model.surface.clone(),
        vec![reg.curve("alpha1").clone(), reg.curve("alpha2").clone()],
    )
    .unwrap();
    let s = boundary_sum(&seed, &g).unwrap();
    assert_eq!(s.entries.len(), f.len() + g.len());
}
