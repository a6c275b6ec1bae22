//! Reduced words over signed 1-handle traversals.
//!
//! A letter `+k` means "traverse handle k positively" (vertical handles:
//! northward; horizontal handles: eastward), `-k` the reverse. Curves carry
//! cyclically reduced cyclic words; arcs carry linearly reduced words.

/// Signed handle traversal. `handle` is a handle id, `sign` is +1 or -1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Lit {
    pub handle: usize,
    pub sign: i8,
}

impl Lit {
    pub fn new(handle: usize, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        Lit { handle, sign }
    }

    pub fn inverse(self) -> Self {
        Lit { handle: self.handle, sign: -self.sign }
    }
}

/// Free reduction: cancel adjacent inverse pairs.
pub fn reduce(w: &[Lit]) -> Vec<Lit> {
    let mut out: Vec<Lit> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last().is_some_and(|y| *y == x.inverse()) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Cyclic reduction: free reduction plus cancellation across the wrap-around.
pub fn cyclic_reduce(w: &[Lit]) -> Vec<Lit> {
    let mut v = reduce(w);
    while v.len() >= 2 && v[0] == v[v.len() - 1].inverse() {
        v.pop();
        v.remove(0);
        v = reduce(&v);
    }
    v
}

pub fn inverse_word(w: &[Lit]) -> Vec<Lit> {
    w.iter().rev().map(|x| x.inverse()).collect()
}

fn lit_key(x: Lit) -> (usize, i8) {
    (x.handle, x.sign)
}

/// Lexicographically least rotation of a cyclic word (canonical form for
/// oriented cyclic-word equality).
pub fn canonical_rotation(w: &[Lit]) -> Vec<Lit> {
    if w.is_empty() {
        return vec![];
    }
    let n = w.len();
    let mut best = 0usize;
    for start in 1..n {
        for i in 0..n {
            let a = lit_key(w[(start + i) % n]);
            let b = lit_key(w[(best + i) % n]);
            if a < b {
                best = start;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    (0..n).map(|i| w[(best + i) % n]).collect()
}

/// Equality of cyclic words up to rotation (orientation-sensitive).
pub fn cyclic_eq(a: &[Lit], b: &[Lit]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    canonical_rotation(a) == canonical_rotation(b)
}

/// Equality of cyclic words up to rotation and orientation reversal.
pub fn cyclic_eq_unoriented(a: &[Lit], b: &[Lit]) -> bool {
    cyclic_eq(a, b) || cyclic_eq(&inverse_word(a), b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(xs: &[isize]) -> Vec<Lit> {
        xs.iter()
            .map(|&x| Lit::new(x.unsigned_abs() - 1, if x > 0 { 1 } else { -1 }))
            .collect()
    }

    #[test]
    fn reduce_cancels_pairs() {
        assert_eq!(reduce(&w(&[1, 2, -2, 3])), w(&[1, 3]));
        assert_eq!(reduce(&w(&[1, -1])), w(&[]));
        assert_eq!(reduce(&w(&[1, 2, -2, -1])), w(&[]));
    }

    #[test]
    fn cyclic_reduce_wraps() {
        assert_eq!(cyclic_reduce(&w(&[1, 2, 3, -1])), w(&[2, 3]));
        assert_eq!(cyclic_reduce(&w(&[1, 2, -2, -1, 3])), w(&[3]));
    }

    #[test]
    fn canonical_rotation_is_least() {
        assert_eq!(canonical_rotation(&w(&[2, 1, 3])), w(&[1, 3, 2]));
        assert!(cyclic_eq(&w(&[1, 2, 3]), &w(&[3, 1, 2])));
        assert!(!cyclic_eq(&w(&[1, 2, 3]), &w(&[1, 3, 2])));
    }

    #[test]
    fn unoriented_eq_sees_reversal() {
        assert!(cyclic_eq_unoriented(&w(&[1, 2]), &w(&[-2, -1])));
        assert!(!cyclic_eq_unoriented(&w(&[1, 2]), &w(&[1, -2])));
    }
}
