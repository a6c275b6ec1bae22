//! Exact integer linear algebra: Smith normal form with transform matrices,
//! kernels/cokernels of integer matrices, and signatures of symmetric forms
//! by fraction-free rational diagonalization. No floating point anywhere.

use num::rational::BigRational;
use num::{BigInt, Signed, Zero};

/// U · A · V = D with U, V unimodular and D diagonal, d_1 | d_2 | … .
pub struct Snf {
    pub d: Vec<Vec<i128>>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub rank: usize,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|r| (0..n).map(|c| i128::from(r == c)).collect()).collect()
}

fn swap_rows(m: &mut [Vec<i128>], a: usize, b: usize) {
    m.swap(a, b);
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn add_row(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    let n = m[0].len();
    for c in 0..n {
        let x = m[src][c];
        m[dst][c] = m[dst][c].checked_add(k.checked_mul(x).expect("overflow")).expect("overflow");
    }
}

fn add_col(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    for row in m.iter_mut() {
        let x = row[src];
        row[dst] = row[dst].checked_add(k.checked_mul(x).expect("overflow")).expect("overflow");
    }
}

fn negate_row(m: &mut [Vec<i128>], r: usize) {
    for x in m[r].iter_mut() {
        *x = -*x;
    }
}

pub fn smith_normal_form(a: &[Vec<i128>]) -> Snf {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<i128>> = a.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0usize;
    while t < rows && t < cols {
        // Find the nonzero pivot of least magnitude in the trailing block.
        let mut piv: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if d[r][c] != 0
                    && piv.is_none_or(|(pr, pc)| d[r][c].abs() < d[pr][pc].abs())
                {
                    piv = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = piv else { break };
        swap_rows(&mut d, t, pr);
        swap_rows(&mut u, t, pr);
        swap_cols(&mut d, t, pc);
        swap_cols(&mut v, t, pc);
        // Clear row and column t by Euclidean steps.
        loop {
            let mut clean = true;
            for r in t + 1..rows {
                if d[r][t] != 0 {
                    let q = d[r][t].div_euclid(d[t][t]);
                    add_row(&mut d, r, t, -q);
                    add_row(&mut u, r, t, -q);
                    if d[r][t] != 0 {
                        swap_rows(&mut d, t, r);
                        swap_rows(&mut u, t, r);
                        clean = false;
                    }
                }
            }
            for c in t + 1..cols {
                if d[t][c] != 0 {
                    let q = d[t][c].div_euclid(d[t][t]);
                    add_col(&mut d, c, t, -q);
                    add_col(&mut v, c, t, -q);
                    if d[t][c] != 0 {
                        swap_cols(&mut d, t, c);
                        swap_cols(&mut v, t, c);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        // Divisibility: fold in any trailing entry the pivot does not divide.
        let mut redo = false;
        'scan: for r in t + 1..rows {
            for c in t + 1..cols {
                if d[r][c] % d[t][t] != 0 {
                    add_row(&mut d, t, r, 1);
                    add_row(&mut u, t, r, 1);
                    redo = true;
                    break 'scan;
                }
            }
        }
        if redo {
            continue;
        }
        if d[t][t] < 0 {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    Snf { rank: t, d, u, v }
}

/// Integral basis of the left kernel {x : x·A = 0} (rows).
pub fn left_kernel_basis(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let s = smith_normal_form(a);
    s.u[s.rank..].to_vec()
}

/// Whether `v` lies in the row space (integer span of the rows) of `a`.
pub fn in_row_space(a: &[Vec<i128>], v: &[i128]) -> bool {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    assert_eq!(v.len(), cols);
    let s = smith_normal_form(a);
    // rowspace(A)·V = rowspace(D), so transform v and test divisibility.
    for c in 0..cols {
        let w: i128 = (0..cols).map(|k| v[k] * s.v[k][c]).sum();
        let d = if c < s.rank { s.d[c][c] } else { 0 };
        if d == 0 {
            if w != 0 {
                return false;
            }
        } else if w % d != 0 {
            return false;
        }
    }
    true
}

/// A finitely generated abelian group in invariant-factor form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Non-unit invariant factors d_1 | d_2 | …, each ≥ 2.
    pub torsion: Vec<i128>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn cyclic(n: i128) -> Self {
        match n.abs() {
            0 => Self::free(1),
            1 => Self::trivial(),
            k => AbelianGroup { free_rank: 0, torsion: vec![k] },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel Z^cols / rowspace(A) as an abelian group.
pub fn cokernel(a: &[Vec<i128>]) -> AbelianGroup {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let s = smith_normal_form(a);
    let torsion: Vec<i128> =
        (0..s.rank).map(|i| s.d[i][i]).filter(|&x| x.abs() > 1).collect();
    AbelianGroup { free_rank: cols - s.rank, torsion }
}

/// Summary of a symmetric integer bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSummary {
    pub dim: usize,
    pub rank: usize,
    pub signature: i64,
    pub positive: usize,
    pub negative: usize,
    /// Even iff every diagonal entry of the form is even.
    pub even: bool,
    /// |det| of the form on dim = rank (0-handed forms count as unimodular
    /// only when nondegenerate with |det| = 1).
    pub unimodular: bool,
    pub definite: bool,
}

/// Exact signature of a symmetric matrix by congruence diagonalization over
/// the rationals.
pub fn symmetric_form_summary(m: &[Vec<i128>]) -> FormSummary {
    let n = m.len();
    for (r, row) in m.iter().enumerate() {
        assert_eq!(row.len(), n);
        for c in 0..n {
            assert_eq!(row[c], m[c][r], "form must be symmetric");
        }
    }
    let big = |x: i128| BigRational::from(BigInt::from(x));
    let mut a: Vec<Vec<BigRational>> =
        m.iter().map(|row| row.iter().map(|&x| big(x)).collect()).collect();
    let (mut pos, mut neg) = (0usize, 0usize);
    for i in 0..n {
        if a[i][i].is_zero() {
            // Bring a nonzero diagonal entry to position i by a congruence.
            if let Some(j) = (i + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(i, j);
                for row in a.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !a[i][j].is_zero()) {
                // All trailing diagonal entries vanish; a[i][j] ≠ 0 lets the
                // congruence "add row/col j into i" create a nonzero pivot
                // (one of the two signs must work).
                let two = big(2);
                for &s in &[1i128, -1] {
                    let cand = &a[i][i] + big(s) * &two * &a[i][j] + &a[j][j];
                    if !cand.is_zero() {
                        let sj = big(s);
                        for c in 0..n {
                            let x = a[j][c].clone();
                            a[i][c] += &sj * x;
                        }
                        for r in 0..n {
                            let x = a[r][j].clone();
                            a[r][i] += &sj * x;
                        }
                        break;
                    }
                }
            } else {
                continue; // row i is entirely zero: radical direction
            }
        }
        if a[i][i].is_zero() {
            continue;
        }
        if a[i][i].is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let piv = a[i][i].clone();
        for r in i + 1..n {
            if !a[r][i].is_zero() {
                let f = &a[r][i] / &piv;
                for c in 0..n {
                    let x = a[i][c].clone();
                    a[r][c] -= &f * x;
                }
                for rr in 0..n {
                    let x = a[rr][i].clone();
                    a[rr][r] -= &f * x;
                }
            }
        }
    }
    let rank = pos + neg;
    let even = (0..n).all(|i| m[i][i] % 2 == 0);
    // |det| via SNF product of invariant factors (0 when degenerate).
    let unimodular = if rank == n && n > 0 {
        let s = smith_normal_form(m);
        s.rank == n && (0..n).map(|i| s.d[i][i]).product::<i128>().abs() == 1
    } else {
        n == 0
    };
    FormSummary {
        dim: n,
        rank,
        signature: pos as i64 - neg as i64,
        positive: pos,
        negative: neg,
        even,
        unimodular,
        definite: rank == n && (pos == n || neg == n) && n > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(a: Vec<Vec<i128>>) -> Snf {
        let s = smith_normal_form(&a);
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        // U·A·V == D
        for r in 0..rows {
            for c in 0..cols {
                let mut acc = 0i128;
                for k in 0..rows {
                    for l in 0..cols {
                        acc += s.u[r][k] * a[k][l] * s.v[l][c];
                    }
                }
                assert_eq!(acc, s.d[r][c]);
                if r != c {
                    assert_eq!(s.d[r][c], 0);
                }
            }
        }
        // Divisibility chain
        for i in 1..s.rank {
            assert_eq!(s.d[i][i] % s.d[i - 1][i - 1], 0);
        }
        s
    }

    #[test]
    fn snf_small_examples() {
        let s = check_snf(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        // det = 624, gcd of entries 2, gcd of 2×2 minors 4 ⇒ factors 2, 2, 156.
        assert_eq!((s.d[0][0], s.d[1][1], s.d[2][2]), (2, 2, 156));
        check_snf(vec![vec![0, 0], vec![0, 0]]);
        check_snf(vec![vec![1, 2, 3]]);
        let s = check_snf(vec![vec![3, 0], vec![0, 5]]);
        assert_eq!((s.d[0][0], s.d[1][1]), (1, 15));
    }

    #[test]
    fn snf_invariant_under_shuffles() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]];
        let shuffled = vec![a[2].clone(), a[0].clone(), a[1].clone()];
        let d1: Vec<i128> = (0..3).map(|i| smith_normal_form(&a).d[i][i]).collect();
        let d2: Vec<i128> = (0..3).map(|i| smith_normal_form(&shuffled).d[i][i]).collect();
        assert_eq!(d1, d2);
    }

    #[test]
    fn left_kernel_annihilates() {
        let a = vec![vec![1, 1, 1], vec![2, 2, 2], vec![0, 1, -1]];
        let k = left_kernel_basis(&a);
        assert_eq!(k.len(), 1);
        for c in 0..3 {
            let acc: i128 = (0..3).map(|r| k[0][r] * a[r][c]).sum();
            assert_eq!(acc, 0);
        }
    }

    #[test]
    fn cokernel_groups() {
        assert_eq!(cokernel(&[vec![2, 0], vec![0, 3]]), AbelianGroup::cyclic(6));
        assert_eq!(cokernel(&[vec![1, 0]]), AbelianGroup::free(1));
        assert_eq!(
            cokernel(&[vec![0i128; 3]]),
            AbelianGroup::free(3)
        );
        assert_eq!(format!("{}", AbelianGroup { free_rank: 2, torsion: vec![4] }), "Z^2 + Z/4");
    }

    #[test]
    fn signatures() {
        // Hyperbolic plane: signature 0, even, unimodular, indefinite.
        let h = symmetric_form_summary(&[vec![0, 1], vec![1, 0]]);
        assert_eq!((h.rank, h.signature), (2, 0));
        assert!(h.even && h.unimodular && !h.definite);
        // Diagonal (1, -1, -1).
        let d = symmetric_form_summary(&[
            vec![1, 0, 0],
            vec![0, -1, 0],
            vec![0, 0, -1],
        ]);
        assert_eq!((d.rank, d.signature), (3, -1));
        assert!(!d.even && d.unimodular && !d.definite);
        // Degenerate.
        let z = symmetric_form_summary(&[vec![2, 2], vec![2, 2]]);
        assert_eq!((z.rank, z.signature), (1, 1));
        assert!(!z.unimodular && !z.definite);
        // Negative definite E8-like check on a small piece.
        let e = symmetric_form_summary(&[vec![-2, 1], vec![1, -2]]);
        assert_eq!((e.rank, e.signature), (2, -2));
        assert!(e.even && !e.unimodular && e.definite);
    }
}
