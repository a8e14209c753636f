//! Exact linear algebra over the coefficient field, used by the trace-free
//! projector generator and the invariance solvers.

use crate::coeff::Coefficient;

/// Basis of the null space of `m` (rows are equations over `ncols` unknowns).
pub fn kernel(rows: &[Vec<Coefficient>], ncols: usize) -> Vec<Vec<Coefficient>> {
    let mut m: Vec<Vec<Coefficient>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; nrows];
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;

    for col in 0..ncols {
        // pick the structurally simplest nonzero pivot to keep fractions small
        let mut pick: Option<usize> = None;
        let mut best = usize::MAX;
        for (r, row) in m.iter().enumerate().skip(rank) {
            if !row[col].is_zero() {
                let size = row[col].numerator().terms.len() + row[col].denominator().terms.len();
                if size < best {
                    best = size;
                    pick = Some(r);
                }
            }
        }
        let Some(prow) = pick else { continue };
        m.swap(rank, prow);
        let inv = m[rank][col].inverse().expect("nonzero pivot");
        for c in col..ncols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..ncols {
                    let delta = &f * &m[rank][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivot_col_of_row[rank] = Some(col);
        pivot_row_of_col[col] = Some(rank);
        rank += 1;
        if rank == nrows {
            break;
        }
    }

    let mut basis = Vec::new();
    for free_col in 0..ncols {
        if pivot_row_of_col[free_col].is_some() {
            continue;
        }
        let mut v = vec![Coefficient::zero(); ncols];
        v[free_col] = Coefficient::one();
        for (r, pc) in pivot_col_of_row.iter().enumerate() {
            if let Some(pc) = pc {
                v[*pc] = -&m[r][free_col];
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> Coefficient {
        Coefficient::int(v)
    }

    #[test]
    fn kernel_of_simple_system() {
        // x + y = 0, y + z = 0  =>  kernel spanned by (1, -1, 1)
        let rows = vec![
            vec![c(1), c(1), c(0)],
            vec![c(0), c(1), c(1)],
        ];
        let basis = kernel(&rows, 3);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        let ratio = v[0].try_div(&v[2]).unwrap();
        assert_eq!(ratio, c(1));
        let ratio2 = v[1].try_div(&v[2]).unwrap();
        assert_eq!(ratio2, c(-1));
    }

    #[test]
    fn full_rank_gives_empty_kernel() {
        let rows = vec![vec![c(1), c(2)], vec![c(3), c(4)]];
        assert!(kernel(&rows, 2).is_empty());
    }
}
