//! Integer lattices: Hermite and Smith normal forms of small matrices.

/// Row-style Hermite normal form of the row lattice of `rows`: upper
/// triangular with positive pivots, entries above each pivot reduced into
/// `[0, pivot)`, zero rows removed.
pub fn hnf(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut out_row = 0;
    for col in 0..ncols {
        loop {
            // smallest nonzero entry in this column at or below out_row
            let piv = (out_row..a.len()).filter(|&r| a[r][col] != 0).min_by_key(|&r| a[r][col].abs());
            let Some(piv) = piv else { break };
            a.swap(out_row, piv);
            let mut clean = true;
            for r in out_row + 1..a.len() {
                if a[r][col] != 0 {
                    let q = a[r][col].div_euclid(a[out_row][col]);
                    for j in col..ncols {
                        a[r][j] -= q * a[out_row][j];
                    }
                    if a[r][col] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if out_row < a.len() && a[out_row][col] != 0 {
            if a[out_row][col] < 0 {
                for j in col..ncols {
                    a[out_row][j] = -a[out_row][j];
                }
            }
            let pv = a[out_row][col];
            for r in 0..out_row {
                let q = a[r][col].div_euclid(pv);
                if q != 0 {
                    for j in col..ncols {
                        a[r][j] -= q * a[out_row][j];
                    }
                }
            }
            out_row += 1;
        }
    }
    a.truncate(out_row);
    a.retain(|r| r.iter().any(|&x| x != 0));
    a
}

/// Smith form of a square nonsingular matrix: returns `(d, v, v_inv)` with
/// `u * a * v = diag(d)` for some unimodular `u`, `d_i | d_{i+1}`, `d_i > 0`.
pub fn snf(a: &[Vec<i128>]) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = a.len();
    let mut a: Vec<Vec<i128>> = a.to_vec();
    let mut v = identity(n);
    let mut vi = identity(n);

    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            if bj != t {
                swap_cols(&mut a, t, bj);
                swap_cols(&mut v, t, bj);
                vi.swap(t, bj);
            }
            let mut done = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    // column j -= q * column t
                    for i in 0..n {
                        a[i][j] -= q * a[i][t];
                        v[i][j] -= q * v[i][t];
                    }
                    // inverse op: row t += q * row j
                    for c in 0..n {
                        vi[t][c] += q * vi[j][c];
                    }
                }
                if a[t][j] != 0 {
                    done = false;
                }
            }
            if !done {
                continue;
            }
            let pv = a[t][t];
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % pv != 0));
            match bad {
                Some(i) => {
                    for j in t..n {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for j in t..n {
                a[t][j] = -a[t][j];
            }
        }
    }
    let d = (0..n).map(|i| a[i][i]).collect();
    (d, v, vi)
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Row vector times matrix.
pub fn vec_mat(x: &[i128], m: &[Vec<i128>]) -> Vec<i128> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| x.iter().zip(m).map(|(a, r)| a * r[j]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        a.iter().map(|r| vec_mat(r, b)).collect()
    }

    #[test]
    fn hermite_form() {
        let h = hnf(&[vec![4, 6], vec![2, 2], vec![0, 0]]);
        assert_eq!(h, vec![vec![2, 0], vec![0, 2]]);
        let h = hnf(&[vec![3, 1], vec![0, 5]]);
        assert_eq!(h, vec![vec![3, 1], vec![0, 5]]);
    }

    #[test]
    fn smith_form_of_relations() {
        let a = vec![vec![2, 4], vec![6, 8]];
        let (d, v, vi) = snf(&a);
        assert_eq!(d, vec![2, 4]);
        assert_eq!(mat_mul(&v, &vi), identity(2));
        // Z^2 / rows(a) has order |det| = 8
        assert_eq!(d.iter().product::<i128>(), 8);
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let (d, v, _) = snf(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(d, vec![2, 4]);
        assert_eq!(v, identity(2));
    }
}
