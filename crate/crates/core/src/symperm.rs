//! Backtracking search for row permutations that make a 0/1 pattern
//! symmetric with a full diagonal.
//!
//! Given an `n×n` pattern `B`, we look for `p` such that `B'[i][j] = B[p[i]][j]`
//! satisfies `B'[i][i] = 1` and `B'[i][j] = B'[j][i]`. Positions are filled in
//! order `0..n`; candidate rows are pruned by two permutation-respecting
//! invariants: the zero count of the row must equal the zero count of the
//! column it is placed on, and the multiset of neighbour degrees must agree.

use std::ops::ControlFlow;

pub type Pattern = Vec<Vec<bool>>;

pub fn transpose(pattern: &[Vec<bool>]) -> Pattern {
    let n = pattern.len();
    let m = pattern.first().map_or(0, Vec::len);
    (0..m).map(|j| (0..n).map(|i| pattern[i][j]).collect()).collect()
}

struct Search<'a> {
    b: &'a [Vec<bool>],
    n: usize,
    row_sig: Vec<(usize, Vec<usize>)>,
    col_sig: Vec<(usize, Vec<usize>)>,
    perm: Vec<usize>,
    used: Vec<bool>,
}

/// Calls `visit` on every valid permutation in lexicographic DFS order until it returns `Break`.
///
/// Returns the value carried by `Break`, if any. Non-square patterns have no valid permutation.
pub fn for_each_symmetrizing_permutation<T>(
    pattern: &[Vec<bool>],
    mut visit: impl FnMut(&[usize]) -> ControlFlow<T>,
) -> Option<T> {
    let n = pattern.len();
    if pattern.iter().any(|r| r.len() != n) {
        return None;
    }
    let row_deg: Vec<usize> = pattern.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let col_deg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| pattern[i][j]).count()).collect();
    let row_sig = (0..n)
        .map(|r| {
            let mut s: Vec<usize> = (0..n).filter(|&j| pattern[r][j]).map(|j| col_deg[j]).collect();
            s.sort_unstable();
            (row_deg[r], s)
        })
        .collect();
    let col_sig = (0..n)
        .map(|c| {
            let mut s: Vec<usize> = (0..n).filter(|&i| pattern[i][c]).map(|i| row_deg[i]).collect();
            s.sort_unstable();
            (col_deg[c], s)
        })
        .collect();
    let mut search = Search { b: pattern, n, row_sig, col_sig, perm: Vec::with_capacity(n), used: vec![false; n] };
    match search.descend(&mut visit) {
        ControlFlow::Break(t) => Some(t),
        ControlFlow::Continue(()) => None,
    }
}

impl Search<'_> {
    fn descend<T>(&mut self, visit: &mut impl FnMut(&[usize]) -> ControlFlow<T>) -> ControlFlow<T> {
        let i = self.perm.len();
        if i == self.n {
            return visit(&self.perm);
        }
        for r in 0..self.n {
            if self.used[r] || !self.b[r][i] || self.row_sig[r] != self.col_sig[i] {
                continue;
            }
            let consistent = self.perm.iter().enumerate().all(|(j, &pj)| self.b[r][j] == self.b[pj][i]);
            if !consistent {
                continue;
            }
            self.used[r] = true;
            self.perm.push(r);
            self.descend(visit)?;
            self.perm.pop();
            self.used[r] = false;
        }
        ControlFlow::Continue(())
    }
}

/// First row permutation making `pattern` symmetric with a full diagonal.
pub fn first_symmetrizing_permutation(pattern: &[Vec<bool>]) -> Option<Vec<usize>> {
    for_each_symmetrizing_permutation(pattern, |p| ControlFlow::Break(p.to_vec()))
}
