//! Sparse exact Gaussian elimination over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::ratpoly::Rational;

type Row = BTreeMap<usize, Rational>;

/// Incremental row echelon form. Each stored row has its pivot at its
/// smallest column, scaled to 1.
#[derive(Debug, Default)]
pub struct Echelon {
    pivots: HashMap<usize, (Row, Rational)>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds the equation `Σ row[c] x_c = rhs`. Returns `false` when the row
    /// reduced to `0 = nonzero`.
    pub fn push(&mut self, mut row: Row, mut rhs: Rational) -> bool {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0usize;
        loop {
            let next = row
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| self.pivots.contains_key(c));
            let Some(col) = next else { break };
            let factor = row.remove(&col).expect("column present");
            let (prow, prhs) = &self.pivots[&col];
            for (&c, v) in prow.range(col + 1..) {
                let entry = row.entry(c).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(&c);
                }
            }
            rhs -= &factor * prhs;
            cursor = col + 1;
        }
        let Some((&pivot, lead)) = row.iter().next() else {
            if rhs.is_zero() {
                return true;
            }
            self.inconsistent = true;
            return false;
        };
        let inv = Rational::one() / lead;
        let row: Row = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
        self.pivots.insert(pivot, (row, rhs * inv));
        true
    }

    /// One solution with every free variable set to zero, or `None` if the
    /// system is inconsistent.
    pub fn solve(&self, columns: usize) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); columns];
        let mut order: Vec<usize> = self.pivots.keys().copied().collect();
        order.sort_unstable_by(|a, b| b.cmp(a));
        for p in order {
            let (row, rhs) = &self.pivots[&p];
            let mut value = rhs.clone();
            for (&c, v) in row.range(p + 1..) {
                value -= v * &x[c];
            }
            x[p] = value;
        }
        Some(x)
    }
}

/// Solves `A x = b` for `A` given as sparse rows.
pub fn solve_sparse(rows: Vec<(Row, Rational)>, columns: usize) -> Option<Vec<Rational>> {
    let mut ech = Echelon::new();
    for (row, rhs) in rows {
        if !ech.push(row, rhs) {
            return None;
        }
    }
    ech.solve(columns)
}
