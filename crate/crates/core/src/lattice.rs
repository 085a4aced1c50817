//! Integer lattices: Smith normal form and solving `A x = b` over ℤ.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("ragged matrix")]
    Shape,
}

/// `U · A · V = D` with `D` diagonal, `d₁ | d₂ | ⋯`, `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub diagonal: Vec<i128>,
    pub rows: usize,
    pub cols: usize,
}

fn identity(k: usize) -> Vec<Vec<i128>> {
    (0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect()).collect()
}

fn ck(x: Option<i128>) -> Result<i128, LatticeError> {
    x.ok_or(LatticeError::Overflow)
}

// row_a ← row_a − q·row_b
fn row_sub(m: &mut [Vec<i128>], a: usize, b: usize, q: i128) -> Result<(), LatticeError> {
    for c in 0..m[a].len() {
        m[a][c] = ck(m[a][c].checked_sub(ck(q.checked_mul(m[b][c]))?))?;
    }
    Ok(())
}

fn col_sub(m: &mut [Vec<i128>], a: usize, b: usize, q: i128) -> Result<(), LatticeError> {
    for row in m.iter_mut() {
        row[a] = ck(row[a].checked_sub(ck(q.checked_mul(row[b]))?))?;
    }
    Ok(())
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith_normal_form(a: &[Vec<i64>], cols: usize) -> Result<SmithForm, LatticeError> {
    let rows = a.len();
    if a.iter().any(|r| r.len() != cols) {
        return Err(LatticeError::Shape);
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero entry in the remaining block
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| m[r][c] != 0)
            .min_by_key(|&(r, c)| m[r][c].abs())
        else {
            break;
        };
        m.swap(t, pr);
        u.swap(t, pr);
        swap_cols(&mut m, t, pc);
        swap_cols(&mut v, t, pc);
        loop {
            let mut done = true;
            for r in t + 1..rows {
                let q = m[r][t].div_euclid(m[t][t]);
                if q != 0 {
                    row_sub(&mut m, r, t, q)?;
                    row_sub(&mut u, r, t, q)?;
                }
                if m[r][t] != 0 {
                    done = false;
                }
            }
            for c in t + 1..cols {
                let q = m[t][c].div_euclid(m[t][t]);
                if q != 0 {
                    col_sub(&mut m, c, t, q)?;
                    col_sub(&mut v, c, t, q)?;
                }
                if m[t][c] != 0 {
                    done = false;
                }
            }
            if !done {
                let (r, c) = (t..rows)
                    .flat_map(|r| (t..cols).map(move |c| (r, c)))
                    .filter(|&(r, c)| (r == t || c == t) && m[r][c] != 0)
                    .min_by_key(|&(r, c)| m[r][c].abs())
                    .expect("pivot row or column nonzero");
                m.swap(t, r);
                u.swap(t, r);
                swap_cols(&mut m, t, c);
                swap_cols(&mut v, t, c);
                continue;
            }
            // divisibility: fold any entry not divisible by the pivot into row t
            let bad = (t + 1..rows).flat_map(|r| (t + 1..cols).map(move |c| (r, c))).find(|&(r, c)| m[r][c] % m[t][t] != 0);
            match bad {
                Some((r, _)) => {
                    row_sub(&mut m, t, r, -1)?;
                    row_sub(&mut u, t, r, -1)?;
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for c in 0..cols {
                m[t][c] = -m[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
        t += 1;
    }
    let diagonal = (0..rows.min(cols)).map(|i| m[i][i]).collect();
    Ok(SmithForm { u, v, diagonal, rows, cols })
}

/// Some integer `x` with `A x = b`, or `None` if `b` is outside the column lattice.
pub fn solve_integer(a: &[Vec<i64>], cols: usize, b: &[i64]) -> Result<Option<Vec<i64>>, LatticeError> {
    if b.len() != a.len() {
        return Err(LatticeError::Shape);
    }
    let s = smith_normal_form(a, cols)?;
    let mut ub = vec![0i128; s.rows];
    for (i, row) in s.u.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            ub[i] = ck(ub[i].checked_add(ck(x.checked_mul(b[j] as i128))?))?;
        }
    }
    let mut y = vec![0i128; s.cols];
    for i in 0..s.rows {
        let d = s.diagonal.get(i).copied().unwrap_or(0);
        if d == 0 {
            if ub[i] != 0 {
                return Ok(None);
            }
        } else if ub[i] % d != 0 {
            return Ok(None);
        } else {
            y[i] = ub[i] / d;
        }
    }
    let mut x = vec![0i64; s.cols];
    for (i, row) in s.v.iter().enumerate() {
        let mut acc = 0i128;
        for (j, &vij) in row.iter().enumerate() {
            acc = ck(acc.checked_add(ck(vij.checked_mul(y[j]))?))?;
        }
        x[i] = i64::try_from(acc).map_err(|_| LatticeError::Overflow)?;
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mul(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
        a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn small_cases() {
        let a = vec![vec![2, 4], vec![6, 8]];
        let s = smith_normal_form(&a, 2).unwrap();
        assert_eq!(s.diagonal, vec![2, 4]);
        assert_eq!(solve_integer(&a, 2, &[1, 0]).unwrap(), None);
        let x = solve_integer(&a, 2, &[2, 2]).unwrap().unwrap();
        assert_eq!(mul(&a, &x), vec![2, 2]);
        assert_eq!(solve_integer(&[vec![2], vec![0]], 1, &[4, 1]).unwrap(), None);
        assert!(solve_integer(&[vec![], vec![]], 0, &[0, 0]).unwrap().is_some());
    }

    proptest! {
        #[test]
        fn solves_constructed_systems(entries in proptest::collection::vec(-6i64..=6, 6), x in proptest::collection::vec(-5i64..=5, 3)) {
            let a: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let b = mul(&a, &x);
            let y = solve_integer(&a, 3, &b).unwrap().expect("b lies in the lattice");
            prop_assert_eq!(mul(&a, &y), b);
        }

        #[test]
        fn diagonal_divides(entries in proptest::collection::vec(-9i64..=9, 9)) {
            let a: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let s = smith_normal_form(&a, 3).unwrap();
            let nz: Vec<i128> = s.diagonal.iter().copied().filter(|&d| d != 0).collect();
            for w in nz.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            let det3 = |m: &[Vec<i64>]| -> i64 {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            };
            let prod: i128 = s.diagonal.iter().product();
            prop_assert_eq!(prod.abs(), (det3(&a) as i128).abs());
        }
    }
}
