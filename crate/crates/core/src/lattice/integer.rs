//! Integer lattice helpers: primitive vectors, Bareiss determinants, Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides a nonzero integer vector by the gcd of its entries, keeping signs.
pub fn primitive(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    gcd_all(v).is_one()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn format_vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Fraction-free Gaussian elimination. Returns (rank, determinant if square and full rank).
fn bareiss(m: &IntMatrix, cols: usize) -> (usize, BigInt) {
    let mut a = m.clone();
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let pivot = (rank..rows).find(|&i| !a[i][col].is_zero());
        let Some(pr) = pivot else {
            col += 1;
            continue;
        };
        if pr != rank {
            a.swap(pr, rank);
            sign = -sign;
        }
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        col += 1;
    }
    let det = if rows == cols && rank == rows {
        if sign < 0 {
            -prev
        } else {
            prev
        }
    } else {
        BigInt::zero()
    };
    (rank, det)
}

pub fn int_rank(m: &IntMatrix, cols: usize) -> usize {
    bareiss(m, cols).0
}

pub fn int_determinant(m: &IntMatrix) -> Result<BigInt> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: m.first().map_or(0, |r| r.len()) });
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    Ok(bareiss(m, n).1)
}

/// Smith normal form `U * A * V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn smith_normal_form(m: &IntMatrix, cols: usize) -> SmithForm {
    let rows = m.len();
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(diagonal, rows.min(cols), u, v);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let s = &q * &a[t][j];
                        a[i][j] -= s;
                    }
                    for j in 0..rows {
                        let s = &q * &u[t][j];
                        u[i][j] -= s;
                    }
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let s = &q * &a[i][t];
                        a[i][j] -= s;
                    }
                    for i in 0..cols {
                        let s = &q * &v[i][t];
                        v[i][j] -= s;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            if let Some((i, _)) = bad {
                for j in 0..cols {
                    let s = a[i][j].clone();
                    a[t][j] += s;
                }
                for j in 0..rows {
                    let s = u[i][j].clone();
                    u[t][j] += s;
                }
                continue;
            }
            break;
        }
        if a[t][t].is_negative() {
            for j in 0..cols {
                a[t][j] = -a[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        diagonal.push(a[t][t].clone());
    }
    finish(diagonal, rows.min(cols), u, v)
}

fn finish(mut diagonal: Vec<BigInt>, len: usize, left: IntMatrix, right: IntMatrix) -> SmithForm {
    diagonal.resize(len, BigInt::zero());
    SmithForm { diagonal, left, right }
}

/// Nonzero invariant factors of the matrix.
pub fn elementary_divisors(m: &IntMatrix, cols: usize) -> Vec<BigInt> {
    smith_normal_form(m, cols).diagonal.into_iter().filter(|d| !d.is_zero()).collect()
}

/// An integer solution of `A x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, cols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = a.len();
    let snf = smith_normal_form(a, cols);
    // U A V = D, so D (V^-1 x) = U b
    let ub: Vec<BigInt> = (0..rows).map(|i| dot(&snf.left[i], b)).collect();
    let mut y = vec![BigInt::zero(); cols];
    for (i, value) in ub.iter().enumerate() {
        let d = snf.diagonal.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !value.is_zero() {
                return None;
            }
        } else {
            if !(value % &d).is_zero() {
                return None;
            }
            y[i] = value / &d;
        }
    }
    Some((0..cols).map(|i| dot(&snf.right[i], &y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| to_big(r)).collect()
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&to_big(&[2, 4, 6])).unwrap(), to_big(&[1, 2, 3]));
        assert_eq!(primitive(&to_big(&[1, 1, 2])).unwrap(), to_big(&[1, 1, 2]));
        assert_eq!(primitive(&to_big(&[0, -3])).unwrap(), to_big(&[0, -1]));
        assert_eq!(primitive(&to_big(&[0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn determinants_of_example_cones() {
        let smooth = m(&[&[0, 0, 1], &[1, 1, 1], &[-1, -2, -2]]);
        assert_eq!(int_determinant(&smooth).unwrap().abs(), BigInt::one());
        let singular = m(&[&[0, -1, 1], &[1, 1, 1], &[-1, -2, -2]]);
        assert_eq!(int_determinant(&singular).unwrap().abs(), BigInt::from(2));
    }

    #[test]
    fn smith_form_is_a_factorisation() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let snf = smith_normal_form(&a, 3);
        assert_eq!(snf.diagonal, to_big(&[2, 6, 12]));
        let ua: IntMatrix = (0..3)
            .map(|i| (0..3).map(|j| (0..3).map(|k| &snf.left[i][k] * &a[k][j]).sum()).collect())
            .collect();
        let uav: IntMatrix = (0..3)
            .map(|i| (0..3).map(|j| (0..3).map(|k| &ua[i][k] * &snf.right[k][j]).sum()).collect())
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { snf.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(uav[i][j], expected);
            }
        }
    }

    #[test]
    fn integer_solve() {
        let a = m(&[&[1, 1], &[0, 2]]);
        assert_eq!(solve_integer(&a, 2, &to_big(&[3, 4])).unwrap(), to_big(&[1, 2]));
        assert!(solve_integer(&a, 2, &to_big(&[0, 1])).is_none());
        let wide = m(&[&[1, 2, 3]]);
        let x = solve_integer(&wide, 3, &to_big(&[7])).unwrap();
        assert_eq!(dot(&wide[0], &x), BigInt::from(7));
    }
}
