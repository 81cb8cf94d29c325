//! Smith normal form of small integer matrices, with the unimodular transforms.

use serde::{Deserialize, Serialize};

pub type IntMatrix = Vec<Vec<i64>>;

/// `p * a * q = d` with `p`, `q` unimodular and `d` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smith {
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub d: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len))).map(|k| self.d[k][k]).collect()
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()
        })
        .collect()
}

/// Determinant of a 2x2 matrix.
pub fn det2(a: &IntMatrix) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut d = a.clone();
    let mut p = identity(rows);
    let mut q = identity(cols);

    let swap_rows = |m: &mut IntMatrix, i: usize, j: usize| m.swap(i, j);
    let swap_cols = |m: &mut IntMatrix, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_i -= k * row_j
    let row_axpy = |m: &mut IntMatrix, i: usize, j: usize, k: i64| {
        for c in 0..m[i].len() {
            let v = m[j][c];
            m[i][c] -= k * v;
        }
    };
    let col_axpy = |m: &mut IntMatrix, i: usize, j: usize, k: i64| {
        for row in m.iter_mut() {
            let v = row[j];
            row[i] -= k * v;
        }
    };

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| d[i][j] != 0)
                .min_by_key(|&(i, j)| (d[i][j].unsigned_abs(), i, j));
            let Some((pi, pj)) = pivot else { break };
            swap_rows(&mut d, t, pi);
            swap_rows(&mut p, t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut q, t, pj);

            let mut clean = true;
            for i in (t + 1)..rows {
                let k = d[i][t].div_euclid(d[t][t]);
                row_axpy(&mut d, i, t, k);
                row_axpy(&mut p, i, t, k);
                clean &= d[i][t] == 0;
            }
            for j in (t + 1)..cols {
                let k = d[t][j].div_euclid(d[t][t]);
                col_axpy(&mut d, j, t, k);
                col_axpy(&mut q, j, t, k);
                clean &= d[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let offender = ((t + 1)..rows)
                .find(|&i| ((t + 1)..cols).any(|j| d[i][j] % d[t][t] != 0));
            match offender {
                Some(i) => {
                    row_axpy(&mut d, t, i, -1);
                    row_axpy(&mut p, t, i, -1);
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            for c in 0..cols {
                d[t][c] = -d[t][c];
            }
            for c in 0..rows {
                p[t][c] = -p[t][c];
            }
        }
    }
    Smith { p, q, d }
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &IntMatrix) {
        let s = smith_normal_form(a);
        assert_eq!(mat_mul(&mat_mul(&s.p, a), &s.q), s.d);
        assert_eq!(det2(&s.p).abs(), 1);
        assert_eq!(det2(&s.q).abs(), 1);
        assert_eq!(s.d[0][1], 0);
        assert_eq!(s.d[1][0], 0);
        let diag = s.diagonal();
        assert!(diag.iter().all(|&x| x >= 0));
        if diag[0] != 0 {
            assert_eq!(diag[1] % diag[0], 0);
        } else {
            assert_eq!(diag[1], 0);
        }
        assert_eq!(diag[0] * diag[1], det2(a).abs());
    }

    #[test]
    fn examples() {
        let s = smith_normal_form(&vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(s.diagonal(), vec![1, 2]);
        let s = smith_normal_form(&vec![vec![2, 3], vec![1, 2]]);
        assert_eq!(s.diagonal(), vec![1, 1]);
        let s = smith_normal_form(&vec![vec![2, 4], vec![4, 8]]);
        assert_eq!(s.diagonal(), vec![2, 0]);
        let s = smith_normal_form(&vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(s.diagonal(), vec![0, 0]);
        let s = smith_normal_form(&vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(s.diagonal(), vec![1, 6]);
        for a in [vec![vec![1, 1], vec![1, -1]], vec![vec![6, 4], vec![4, 6]], vec![vec![0, 5], vec![3, 0]]] {
            check(&a);
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(extended_gcd(4, 6).0, 2);
        let (g, x, y) = extended_gcd(-3, 7);
        assert_eq!(g, 1);
        assert_eq!(-3 * x + 7 * y, 1);
        assert_eq!(extended_gcd(0, -5), (5, 0, -1));
    }

    proptest! {
        #[test]
        fn snf_invariants(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20) {
            check(&vec![vec![a, b], vec![c, d]]);
        }

        #[test]
        fn bezout(a in -1000i64..1000, b in -1000i64..1000) {
            let (g, x, y) = extended_gcd(a, b);
            prop_assert_eq!(a * x + b * y, g);
            prop_assert!(g >= 0);
            if g != 0 {
                prop_assert_eq!(a % g, 0);
                prop_assert_eq!(b % g, 0);
            }
        }
    }
}
