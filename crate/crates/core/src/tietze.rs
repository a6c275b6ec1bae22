//! Bounded Tietze simplification of finite group presentations.
//!
//! Presentations arise as π₁ of a handlebody: free generators (1-handles)
//! modulo relator words (attaching circles). Simplification runs under a hard
//! step budget; when the budget is exhausted without reaching a recognized
//! form the result is reported as unresolved together with the (always
//! computable) abelianization.

use crate::snf::{cokernel, AbelianGroup};
use crate::word::{cyclic_reduce, inverse_word, reduce, Lit};

#[derive(Clone, Debug)]
pub struct Presentation {
    /// Number of generators; relator letters use handles 0..gens.
    pub gens: usize,
    pub relators: Vec<Vec<Lit>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1Verdict {
    /// Reduced to zero generators.
    TrivialCertified,
    /// Reduced to one generator with a single relator x^n (n = 0 means free).
    CyclicCertified(i128),
    /// Budget exhausted or unrecognized form; fields hold the best reduction.
    Unresolved { gens: usize, relators: Vec<Vec<Lit>> },
}

#[derive(Clone, Debug)]
pub struct Pi1Report {
    pub verdict: Pi1Verdict,
    pub abelianization: AbelianGroup,
}

pub fn abelianization(p: &Presentation) -> AbelianGroup {
    let rows: Vec<Vec<i128>> = p
        .relators
        .iter()
        .map(|w| {
            let mut row = vec![0i128; p.gens];
            for l in w {
                row[l.handle] += i128::from(l.sign);
            }
            row
        })
        .collect();
    if rows.is_empty() {
        AbelianGroup::free(p.gens)
    } else {
        cokernel(&rows)
    }
}

fn substitute(word: &[Lit], gen: usize, image: &[Lit]) -> Vec<Lit> {
    let inv = inverse_word(image);
    let mut out = Vec::with_capacity(word.len() * (1 + image.len()));
    for &l in word {
        if l.handle == gen {
            if l.sign > 0 {
                out.extend_from_slice(image);
            } else {
                out.extend_from_slice(&inv);
            }
        } else {
            out.push(l);
        }
    }
    reduce(&out)
}

fn drop_generator(p: &mut Presentation, gen: usize) {
    // Renumber generators above `gen` down by one.
    p.gens -= 1;
    for w in p.relators.iter_mut() {
        for l in w.iter_mut() {
            assert_ne!(l.handle, gen);
            if l.handle > gen {
                l.handle -= 1;
            }
        }
    }
}

fn tidy(p: &mut Presentation) {
    for w in p.relators.iter_mut() {
        *w = cyclic_reduce(w);
    }
    p.relators.retain(|w| !w.is_empty());
    // Deduplicate relators equal up to cyclic rotation and inversion.
    let mut kept: Vec<Vec<Lit>> = Vec::new();
    'outer: for w in p.relators.drain(..) {
        for k in &kept {
            if k.len() == w.len() {
                let double: Vec<Lit> = [k.as_slice(), k.as_slice()].concat();
                let winv = inverse_word(&w);
                if double.windows(w.len()).any(|s| s == w.as_slice() || s == winv.as_slice()) {
                    continue 'outer;
                }
            }
        }
        kept.push(w);
    }
    p.relators = kept;
}

/// One pass of cheap moves; returns true if anything changed.
fn simplify_pass(p: &mut Presentation, steps: &mut usize, budget: usize) -> bool {
    let mut changed = false;
    tidy(p);
    // 1. Length-1 relator: the generator dies.
    if let Some(pos) = p.relators.iter().position(|w| w.len() == 1) {
        let gen = p.relators[pos][0].handle;
        p.relators.remove(pos);
        for w in p.relators.iter_mut() {
            w.retain(|l| l.handle != gen);
        }
        drop_generator(p, gen);
        *steps += 1;
        return true;
    }
    // 2. A generator occurring exactly once in some relator (exponent ±1):
    //    solve for it and eliminate (a Tietze II elimination).
    'search: for ri in 0..p.relators.len() {
        let w = p.relators[ri].clone();
        for (pos, l) in w.iter().enumerate() {
            let occurrences: usize = p
                .relators
                .iter()
                .map(|r| r.iter().filter(|x| x.handle == l.handle).count())
                .sum();
            let here = w.iter().filter(|x| x.handle == l.handle).count();
            if here == 1 && occurrences >= 1 {
                // w = u · g^s · v cyclically, so g^s = (v·u)^{-1}.
                let mut rest: Vec<Lit> = Vec::new();
                rest.extend_from_slice(&w[pos + 1..]);
                rest.extend_from_slice(&w[..pos]);
                let mut image = inverse_word(&rest);
                if l.sign < 0 {
                    image = inverse_word(&image);
                }
                let gen = l.handle;
                p.relators.remove(ri);
                for r in p.relators.iter_mut() {
                    *r = substitute(r, gen, &image);
                    *steps += 1;
                }
                drop_generator(p, gen);
                changed = true;
                break 'search;
            }
        }
        *steps += 1;
        if *steps >= budget {
            break;
        }
    }
    if changed {
        tidy(p);
    }
    changed
}

pub fn simplify(p: &Presentation, budget: usize) -> Pi1Report {
    let ab = abelianization(p);
    let mut q = p.clone();
    let mut steps = 0usize;
    while steps < budget {
        if !simplify_pass(&mut q, &mut steps, budget) {
            break;
        }
    }
    tidy(&mut q);
    let verdict = if q.gens == 0 {
        Pi1Verdict::TrivialCertified
    } else if q.gens == 1 {
        match q.relators.len() {
            0 => Pi1Verdict::CyclicCertified(0),
            1 => {
                let n: i128 = q.relators[0].iter().map(|l| i128::from(l.sign)).sum();
                if n.unsigned_abs() as usize == q.relators[0].len() {
                    Pi1Verdict::CyclicCertified(n.abs())
                } else {
                    Pi1Verdict::Unresolved { gens: q.gens, relators: q.relators.clone() }
                }
            }
            _ => Pi1Verdict::Unresolved { gens: q.gens, relators: q.relators.clone() },
        }
    } else {
        Pi1Verdict::Unresolved { gens: q.gens, relators: q.relators.clone() }
    };
    Pi1Report { verdict, abelianization: ab }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(handle: usize, sign: i8) -> Lit {
        Lit { handle, sign }
    }

    fn word(spec: &[(usize, i8)]) -> Vec<Lit> {
        spec.iter().map(|&(h, s)| lit(h, s)).collect()
    }

    #[test]
    fn trivial_group_certified() {
        // <x, y | x y, y> — both generators die.
        let p = Presentation {
            gens: 2,
            relators: vec![word(&[(0, 1), (1, 1)]), word(&[(1, 1)])],
        };
        let r = simplify(&p, 10_000);
        assert_eq!(r.verdict, Pi1Verdict::TrivialCertified);
        assert!(r.abelianization.is_trivial());
    }

    #[test]
    fn cyclic_groups() {
        // <x | x^5>
        let p = Presentation { gens: 1, relators: vec![word(&[(0, 1); 5])] };
        let r = simplify(&p, 10_000);
        assert_eq!(r.verdict, Pi1Verdict::CyclicCertified(5));
        assert_eq!(r.abelianization, AbelianGroup::cyclic(5));
        // <x, y | x y^3, x> ≅ Z/3
        let p = Presentation {
            gens: 2,
            relators: vec![word(&[(0, 1), (1, 1), (1, 1), (1, 1)]), word(&[(0, 1)])],
        };
        let r = simplify(&p, 10_000);
        assert_eq!(r.verdict, Pi1Verdict::CyclicCertified(3));
        // Free group of rank 1.
        let p = Presentation { gens: 1, relators: vec![] };
        assert_eq!(simplify(&p, 10_000).verdict, Pi1Verdict::CyclicCertified(0));
    }

    #[test]
    fn elimination_through_conjugates() {
        // <x, y | y x y^{-1} x^{-2}, x^7> abelianizes to Z: the first relator
        // gives x = 0 additively. The simplifier may or may not resolve the
        // group; the abelianization must be exact regardless.
        let p = Presentation {
            gens: 2,
            relators: vec![
                word(&[(1, 1), (0, 1), (1, -1), (0, -1), (0, -1)]),
                word(&[(0, 1); 7]),
            ],
        };
        let r = simplify(&p, 10_000);
        assert_eq!(r.abelianization, AbelianGroup::free(1));
        match r.verdict {
            Pi1Verdict::CyclicCertified(0) | Pi1Verdict::Unresolved { .. } => {}
            other => panic!("unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn surface_relator_unresolved_with_correct_abelianization() {
        // <a, b | [a,b]> — the simplifier cannot kill a genus-1 relator; it
        // must stay honest and report the abelianization Z².
        let p = Presentation {
            gens: 2,
            relators: vec![word(&[(0, 1), (1, 1), (0, -1), (1, -1)])],
        };
        let r = simplify(&p, 10_000);
        assert_eq!(r.abelianization, AbelianGroup::free(2));
        assert!(matches!(r.verdict, Pi1Verdict::Unresolved { gens: 2, .. }));
    }
}
