//! Minimum-cost bipartite assignment.
//!
//! Shortest augmenting path with row/column potentials. Runs in
//! O(n^2 m) on an n x m matrix, exact for any finite costs, and fully
//! deterministic: ties are broken by the lowest column index, so equal
//! inputs always produce equal outputs.

/// Dense row-major cost matrix.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    /// Matched (row, column) pairs, sorted by row index.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the selected cells.
    pub total_cost: f64,
}

/// Minimum-cost assignment of rows to columns.
///
/// Returns min(rows, cols) pairs when every row (or column) can be
/// matched through allowed cells; with `forbid` in play the result is a
/// maximum-cardinality matching of minimum cost over allowed cells only.
pub fn solve_assignment(
    cost: &CostMatrix,
    forbid: Option<&dyn Fn(usize, usize) -> bool>,
) -> AssignmentResult {
    if cost.rows() == 0 || cost.cols() == 0 {
        return AssignmentResult {
            pairs: Vec::new(),
            total_cost: 0.0,
        };
    }

    // Work on the orientation with rows <= cols.
    let transposed = cost.rows() > cost.cols();
    let (n, m) = if transposed {
        (cost.cols(), cost.rows())
    } else {
        (cost.rows(), cost.cols())
    };
    let cell = |r: usize, c: usize| if transposed { (c, r) } else { (r, c) };
    let banned = |r: usize, c: usize| {
        let (rr, cc) = cell(r, c);
        forbid.map_or(false, |f| f(rr, cc))
    };

    // Forbidden cells get a sentinel larger than any sum of allowed
    // cells, so the solver uses as few of them as possible; they are
    // stripped from the result afterwards.
    let mut span = 0.0;
    for r in 0..n {
        for c in 0..m {
            if !banned(r, c) {
                let (rr, cc) = cell(r, c);
                span += cost.at(rr, cc).abs();
            }
        }
    }
    let big = 2.0 * span + 1.0;
    let w = |r: usize, c: usize| {
        if banned(r, c) {
            big
        } else {
            let (rr, cc) = cell(r, c);
            cost.at(rr, cc)
        }
    };

    const NONE: usize = usize::MAX;
    let mut u = vec![0.0_f64; n];
    let mut v = vec![0.0_f64; m + 1];
    // matched_row[j]: row occupying column j; column 0 is virtual.
    let mut matched_row = vec![NONE; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 0..n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = w(i0, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    if matched_row[j] != NONE {
                        u[matched_row[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == NONE {
                break;
            }
        }
        // Walk the augmenting path back to the virtual column.
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs = Vec::with_capacity(n);
    for j in 1..=m {
        let r = matched_row[j];
        if r == NONE || banned(r, j - 1) {
            continue;
        }
        pairs.push(cell(r, j - 1));
    }
    pairs.sort_unstable();
    let total_cost = pairs.iter().map(|&(r, c)| cost.at(r, c)).sum();
    AssignmentResult { pairs, total_cost }
}
