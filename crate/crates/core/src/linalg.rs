//! Exact linear algebra: fraction-free integer elimination for rational
//! null spaces, and Gaussian elimination over the field of fractions of
//! the expression ring for span-membership and rank questions.

use crate::expr::{Expr, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Null-space basis of the homogeneous system `rows * x = 0`, computed by
/// fraction-free Bareiss elimination over the integers followed by exact
/// rational back-substitution.
///
/// Deterministic pivoting: columns are processed left to right and the
/// first available row wins, so identical inputs give identical bases.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            debug_assert_eq!(row.len(), ncols);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, r| lcm(&acc, r.denom()));
            row.iter()
                .map(|r| r.numer() * (&lcm / r.denom()))
                .collect()
        })
        .collect();

    let nrows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pivot_row) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let val = (&pivot * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = val;
            }
            m[i][c] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }

    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rat::zero(); ncols];
        v[f] = Rat::one();
        for (row_idx, &p) in pivots.iter().enumerate().rev() {
            let row = &m[row_idx];
            let mut acc = Rat::zero();
            for j in p + 1..ncols {
                if !row[j].is_zero() {
                    acc += Rat::from_integer(row[j].clone()) * &v[j];
                }
            }
            v[p] = -acc / Rat::from_integer(row[p].clone());
        }
        basis.push(v);
    }
    basis
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / gcd(a, b)
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

/// One exact solution of `a * x = b` over the rationals, with free
/// variables pinned to zero; `None` when inconsistent.
pub fn solve_rational(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pivot_row) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        let pivot = m[r][c].clone();
        for i in 0..nrows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &pivot;
            for j in c..=ncols {
                let sub = &factor * &m[r][j];
                m[i][j] -= sub;
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == nrows {
            break;
        }
    }
    for i in r..nrows {
        if !m[i][ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); ncols];
    for (row, col) in pivots {
        x[col] = &m[row][ncols] / &m[row][col];
    }
    Some(x)
}

/// Rank of a matrix with polynomial-expression entries over the field of
/// rational functions, by cross-multiplication elimination with exact
/// canonical zero tests.
pub fn expr_rank(matrix: &[Vec<Expr>]) -> usize {
    let mut m: Vec<Vec<Expr>> = matrix.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0usize;
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pivot_row) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..ncols {
                m[i][j] =
                    pivot.clone() * m[i][j].clone() - factor.clone() * m[r][j].clone();
            }
        }
        rank += 1;
        r += 1;
        if r == nrows {
            break;
        }
    }
    rank
}

/// Whether `a * x = b` is solvable over the field of rational functions
/// (entries are polynomial expressions).  Cross-multiplication
/// elimination; a zero row with a nonzero right-hand side certifies
/// unsolvability.
pub fn expr_system_consistent(a: &[Vec<Expr>], b: &[Expr]) -> bool {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut m: Vec<(Vec<Expr>, Expr)> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| (row.clone(), rhs.clone()))
        .collect();

    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pivot_row) = (r..nrows).find(|&i| !m[i].0[c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        let pivot = m[r].0[c].clone();
        let pivot_rhs = m[r].1.clone();
        let pivot_row_vals = m[r].0.clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i <= r || row.0[c].is_zero() {
                continue;
            }
            let factor = row.0[c].clone();
            for j in 0..ncols {
                row.0[j] = pivot.clone() * row.0[j].clone()
                    - factor.clone() * pivot_row_vals[j].clone();
            }
            row.1 = pivot.clone() * row.1.clone() - factor * pivot_rhs.clone();
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    m.iter()
        .all(|(row, rhs)| !(row.iter().all(Expr::is_zero) && !rhs.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn nullspace_of_simple_system() {
        // x + y = 0, y + z = 0  ->  span{(1, -1, 1)}
        let rows = vec![vec![r(1), r(1), r(0)], vec![r(0), r(1), r(1)]];
        let basis = nullspace(&rows, 3);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert_eq!(v[0] + &v[1], Rat::zero());
        assert_eq!(v[1].clone() + &v[2], Rat::zero());
    }

    #[test]
    fn nullspace_reconstructs_zero() {
        let rows = vec![
            vec![r(2), r(-3), r(1), r(0)],
            vec![r(4), r(-6), r(0), r(5)],
            vec![r(0), r(0), r(2), r(-5)],
        ];
        let basis = nullspace(&rows, 4);
        for v in &basis {
            for row in &rows {
                let dot: Rat = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn rational_solve_detects_inconsistency() {
        let a = vec![vec![r(1), r(1)], vec![r(2), r(2)]];
        assert!(solve_rational(&a, &[r(1), r(3)]).is_none());
        let x = solve_rational(&a, &[r(1), r(2)]).unwrap();
        assert_eq!(x[0].clone() + &x[1], r(1));
    }

    #[test]
    fn expr_rank_over_function_field() {
        let e = Expr::func("E", &["u"]);
        let eu = Expr::func_d("E", &["u"], &["u"]);
        // rows (E, E_u) and (E^2, E*E_u) are dependent over the field
        let m = vec![
            vec![e.clone(), eu.clone()],
            vec![e.clone() * e.clone(), e.clone() * eu.clone()],
        ];
        assert_eq!(expr_rank(&m), 1);
        let m2 = vec![vec![e.clone(), eu.clone()], vec![eu, e]];
        assert_eq!(expr_rank(&m2), 2);
    }

    #[test]
    fn expr_consistency() {
        let e = Expr::func("E", &["u"]);
        // E^2 * x = E  is solvable (x = 1/E over the field)
        assert!(expr_system_consistent(
            &[vec![e.clone() * e.clone()]],
            &[e.clone()]
        ));
        // 0 * x = E is not
        assert!(!expr_system_consistent(&[vec![Expr::zero()]], &[e]));
    }
}
