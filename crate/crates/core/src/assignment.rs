//! Dense minimum-cost assignment (Hungarian algorithm with potentials).

use alloc::vec;
use alloc::vec::Vec;

/// Solves the square assignment problem for a row-major `n × n` cost
/// matrix. Returns `(total_cost, column assigned to each row)`.
///
/// Costs must be finite. Runs in O(n³).
pub fn solve(cost: &[f64], n: usize) -> (f64, Vec<usize>) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return (0.0, Vec::new());
    }
    // 1-based arrays; index 0 is the virtual source row/column.
    let mut row_pot = vec![0.0f64; n + 1];
    let mut col_pot = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut prev_col = vec![0usize; n + 1];

    for row in 1..=n {
        row_of_col[0] = row;
        let mut col = 0usize;
        let mut slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col] = true;
            let r = row_of_col[col];
            let mut delta = f64::INFINITY;
            let mut next = 0usize;
            for c in 1..=n {
                if used[c] {
                    continue;
                }
                let reduced = cost[(r - 1) * n + (c - 1)] - row_pot[r] - col_pot[c];
                if reduced < slack[c] {
                    slack[c] = reduced;
                    prev_col[c] = col;
                }
                if slack[c] < delta {
                    delta = slack[c];
                    next = c;
                }
            }
            for c in 0..=n {
                if used[c] {
                    row_pot[row_of_col[c]] += delta;
                    col_pot[c] -= delta;
                } else {
                    slack[c] -= delta;
                }
            }
            col = next;
            if row_of_col[col] == 0 {
                break;
            }
        }
        // Flip the augmenting path.
        loop {
            let p = prev_col[col];
            row_of_col[col] = row_of_col[p];
            col = p;
            if col == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for c in 1..=n {
        assignment[row_of_col[c] - 1] = c - 1;
    }
    // Sum the chosen costs directly rather than trusting the potentials.
    let total = assignment.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum();
    (total, assignment)
}
