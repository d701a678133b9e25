use crate::scalar::Scalar;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting on the
/// magnitude of the pivot. Returns `None` for singular systems.
pub(crate) fn solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| {
                a[r][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&a[s][col].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / p.clone();
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f.clone() * y.clone();
            }
            let d = f * b[col].clone();
            b[r] -= d;
        }
    }
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

/// States from which some state in `targets` is reachable along edges
/// with nonzero weight (including the targets themselves).
pub(crate) fn can_reach<S: Scalar>(rows: &[Vec<(usize, S)>], targets: &[bool]) -> Vec<bool> {
    let n = rows.len();
    let mut reach = targets.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..n {
            if !reach[x] && rows[x].iter().any(|(y, w)| reach[*y] && !w.is_zero()) {
                reach[x] = true;
                changed = true;
            }
        }
    }
    reach
}
