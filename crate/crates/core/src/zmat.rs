//! Exact integer/rational matrix helpers for the rank-6 lattice work:
//! rational rank and solve, Smith normal form with a right transform, and
//! saturated integer kernels. Matrices here never exceed 6x6, so plain
//! Gaussian and Smith reductions over `BigInt`/`BigRational` are fine.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<BigInt>>;

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rank over Q.
pub fn rank(m: &Mat) -> usize {
    if m.is_empty() {
        return 0;
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][col].clone();
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let factor = &a[r][col] / &inv;
                for c in col..cols {
                    let sub = &factor * &a[rank][c];
                    a[r][c] = &a[r][c] - sub;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Solve `A t = b` over Q where A is given by columns. Returns the unique
/// solution when the columns are independent and the system is consistent.
pub fn solve_columns(cols: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = b.len();
    let m = cols.len();
    // augmented [A | b]
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            cols.iter()
                .map(|c| BigRational::from_integer(c[i].clone()))
                .chain(std::iter::once(BigRational::from_integer(b[i].clone())))
                .collect()
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..n).find(|&r| !a[r][col].is_zero()) else {
            return None; // dependent columns: no unique solution
        };
        a.swap(row, p);
        let inv = a[row][col].clone();
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let factor = &a[r][col] / &inv;
                for c in col..=m {
                    let sub = &factor * &a[row][c];
                    a[r][c] = &a[r][c] - sub;
                }
            }
        }
        pivot_rows.push(row);
        row += 1;
    }
    // consistency: rows below the pivots must have zero rhs
    for r in row..n {
        if !a[r][m].is_zero() {
            return None;
        }
    }
    Some(
        (0..m)
            .map(|c| &a[pivot_rows[c]][m] / &a[pivot_rows[c]][c])
            .collect(),
    )
}

/// Smith normal form. Returns the diagonal (elementary divisors, nonnegative,
/// each dividing the next) and the right transform V with `A V = U^-1 D`,
/// i.e. the columns of V matching zero diagonal entries span the saturated
/// right kernel of A.
pub fn smith(a: &Mat) -> (Vec<BigInt>, Mat) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m = a.clone();
    let mut v: Mat = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();

    reduce_block(&mut m, &mut v, 0);

    // enforce divisibility d_i | d_{i+1}
    let k = rows.min(cols);
    let mut i = 0;
    while i + 1 < k {
        let di = m[i][i].clone();
        let dj = m[i + 1][i + 1].clone();
        if !di.is_zero() && !(&dj % &di).is_zero() {
            // add column i+1 to column i and redo the block
            for r in 0..rows {
                let add = m[r][i + 1].clone();
                m[r][i] += add;
            }
            for r in 0..cols {
                let add = v[r][i + 1].clone();
                v[r][i] += add;
            }
            reduce_block(&mut m, &mut v, i);
            i = 0;
            continue;
        }
        i += 1;
    }

    let diag: Vec<BigInt> = (0..k).map(|i| m[i][i].abs()).collect();
    (diag, v)
}

fn reduce_block(m: &mut Mat, v: &mut Mat, from: usize) {
    let rows = m.len();
    if rows == 0 {
        return;
    }
    let cols = m[0].len();
    let mut t = from;
    while t < rows.min(cols) {
        let mut pivot = None;
        'outer: for r in t..rows {
            for c in t..cols {
                if !m[r][c].is_zero() {
                    pivot = Some((r, c));
                    break 'outer;
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        for row in v.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                while !m[r][t].is_zero() {
                    let q = floor_div(&m[r][t], &m[t][t]);
                    if !q.is_zero() {
                        for c in 0..cols {
                            let sub = &q * &m[t][c];
                            m[r][c] = &m[r][c] - sub;
                        }
                    }
                    if m[r][t].is_zero() {
                        break;
                    }
                    m.swap(t, r);
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                while !m[t][c].is_zero() {
                    let q = floor_div(&m[t][c], &m[t][t]);
                    if !q.is_zero() {
                        for r in 0..rows {
                            let sub = &q * &m[r][t];
                            m[r][c] = &m[r][c] - sub;
                        }
                        for r in 0..cols {
                            let sub = &q * &v[r][t];
                            v[r][c] = &v[r][c] - sub;
                        }
                    }
                    if m[t][c].is_zero() {
                        break;
                    }
                    for row in m.iter_mut() {
                        row.swap(t, c);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, c);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        t += 1;
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    // round-toward-zero is enough for the Euclidean descent above
    a / b
}

/// Elementary divisors (nonzero diagonal of the Smith form).
pub fn elementary_divisors(a: &Mat) -> Vec<BigInt> {
    smith(a).0.into_iter().filter(|d| !d.is_zero()).collect()
}

/// Saturated integer kernel of A (row-vector convention: returns v with
/// `A v = 0`, as a lattice basis).
pub fn kernel(a: &Mat) -> Vec<Vec<BigInt>> {
    if a.is_empty() {
        return Vec::new();
    }
    let cols = a[0].len();
    let (diag, v) = smith(a);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    (rank..cols)
        .map(|c| (0..cols).map(|r| v[r][c].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn rank_basic() {
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[0, 0]])), 0);
    }

    #[test]
    fn smith_divisors() {
        assert_eq!(
            elementary_divisors(&m(&[&[2, 0], &[0, 3]])),
            vec![BigInt::from(1), BigInt::from(6)]
        );
        assert_eq!(
            elementary_divisors(&m(&[&[1, 0, 0], &[0, 2, 0]])),
            vec![BigInt::from(1), BigInt::from(2)]
        );
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of (2 4): saturated kernel is generated by (2, -1), not (4, -2)
        let k = kernel(&m(&[&[2, 4]]));
        assert_eq!(k.len(), 1);
        let g = num_integer::gcd(k[0][0].clone(), k[0][1].clone());
        assert_eq!(g, BigInt::from(1));
        let combo: BigInt = &k[0][0] * 2 + &k[0][1] * 4;
        assert!(combo.is_zero());
    }

    #[test]
    fn kernel_annihilates_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=6);
            let cols = rng.gen_range(1..=6);
            let a: Mat = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| BigInt::from(rng.gen_range(-3..=3)))
                        .collect()
                })
                .collect();
            let k = kernel(&a);
            assert_eq!(k.len(), cols - rank(&a));
            for v in &k {
                for row in &a {
                    let dot: BigInt = row.iter().zip(v).map(|(x, y)| x * y).sum();
                    assert!(dot.is_zero(), "a={a:?} v={v:?}");
                }
            }
        }
    }

    #[test]
    fn solve_unique() {
        let cols = vec![
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(1)],
        ];
        let b = vec![BigInt::from(2), BigInt::from(3), BigInt::from(5)];
        let t = solve_columns(&cols, &b).unwrap();
        assert_eq!(t[0], rational(2));
        assert_eq!(t[1], rational(3));
        let bad = vec![BigInt::from(2), BigInt::from(3), BigInt::from(4)];
        assert!(solve_columns(&cols, &bad).is_none());
    }
}
