//! Small dense linear algebra over GF(2). Vectors are the low bits of a
//! `u64`; every space this crate touches has dimension at most 64 (the
//! largest is the 64-point form space), so one word per row is enough.

/// Row-echelon basis of a GF(2) subspace of `F_2^width`.
#[derive(Debug, Clone, Default)]
pub struct Gf2Span {
    rows: Vec<u64>,
}

impl Gf2Span {
    pub fn new() -> Self {
        Gf2Span { rows: Vec::new() }
    }

    pub fn from_rows(rows: impl IntoIterator<Item = u64>) -> Self {
        let mut span = Gf2Span::new();
        for r in rows {
            span.insert(r);
        }
        span
    }

    /// Reduce `v` against the current basis; the remainder is the canonical
    /// coset representative.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.rows {
            let pivot = 1u64 << (63 - row.leading_zeros());
            if v & pivot != 0 {
                v ^= row;
            }
        }
        v
    }

    /// Insert a vector, returning true if it enlarged the span.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.rows.push(r);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }
}

/// Rank of a list of GF(2) row vectors.
pub fn rank(rows: &[u64]) -> usize {
    Gf2Span::from_rows(rows.iter().copied()).dim()
}

/// Basis of the right kernel of the matrix whose rows are `rows`, acting on
/// `ncols` coordinates: all v with `row . v = 0` for every row.
pub fn kernel_basis(rows: &[u64], ncols: usize) -> Vec<u64> {
    // Gauss-Jordan on an explicit column-pivot bookkeeping.
    let mut mat: Vec<u64> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut pivot_col: Vec<usize> = Vec::new();
    let mut reduced: Vec<u64> = Vec::new();
    for col in 0..ncols {
        let bit = 1u64 << col;
        let Some(idx) = mat.iter().position(|&r| r & bit != 0) else {
            continue;
        };
        let row = mat.swap_remove(idx);
        for r in mat.iter_mut() {
            if *r & bit != 0 {
                *r ^= row;
            }
        }
        for r in reduced.iter_mut() {
            if *r & bit != 0 {
                *r ^= row;
            }
        }
        reduced.push(row);
        pivot_col.push(col);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_col.contains(&free) {
            continue;
        }
        let mut v = 1u64 << free;
        for (row, &pc) in reduced.iter().zip(&pivot_col) {
            if row & (1u64 << free) != 0 {
                v |= 1u64 << pc;
            }
        }
        basis.push(v);
    }
    basis
}

/// Solve `sum_i x_i rows[i] = target` over GF(2); returns the coefficient
/// mask if solvable.
pub fn solve(rows: &[u64], target: u64) -> Option<u64> {
    // Echelonize while tracking the combination of input rows for each
    // echelon row.
    let mut ech: Vec<(u64, u64)> = Vec::new(); // (vector, combination mask)
    for (i, &r) in rows.iter().enumerate() {
        let mut v = r;
        let mut c = 1u64 << i;
        for &(row, comb) in &ech {
            let pivot = 1u64 << (63 - row.leading_zeros());
            if v & pivot != 0 {
                v ^= row;
                c ^= comb;
            }
        }
        if v != 0 {
            ech.push((v, c));
            ech.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        }
    }
    let mut v = target;
    let mut c = 0u64;
    for &(row, comb) in &ech {
        let pivot = 1u64 << (63 - row.leading_zeros());
        if v & pivot != 0 {
            v ^= row;
            c ^= comb;
        }
    }
    (v == 0).then_some(c)
}

/// Echelonized span over more than 64 coordinates; rows are block vectors.
#[derive(Debug, Clone)]
pub struct WideSpan {
    rows: Vec<Vec<u64>>,
    blocks: usize,
}

fn leading_bit(v: &[u64]) -> Option<usize> {
    for (b, &word) in v.iter().enumerate().rev() {
        if word != 0 {
            return Some(b * 64 + (63 - word.leading_zeros() as usize));
        }
    }
    None
}

impl WideSpan {
    pub fn new(ncols: usize) -> Self {
        WideSpan {
            rows: Vec::new(),
            blocks: ncols.div_ceil(64),
        }
    }

    pub fn unit(&self, col: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.blocks];
        v[col / 64] |= 1 << (col % 64);
        v
    }

    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for row in &self.rows {
            let lead = leading_bit(row).expect("stored rows are nonzero");
            if v[lead / 64] & (1 << (lead % 64)) != 0 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        v
    }

    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        let r = self.reduce(v);
        if leading_bit(&r).is_none() {
            return false;
        }
        self.rows.push(r);
        self.rows
            .sort_unstable_by(|a, b| leading_bit(b).cmp(&leading_bit(a)));
        true
    }

    pub fn contains(&self, v: Vec<u64>) -> bool {
        leading_bit(&self.reduce(v)).is_none()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}
