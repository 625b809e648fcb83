/// Row-major sparse table of counts. Each row holds its non-zero
/// `(column, count)` pairs sorted by column.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseCounts {
    rows: Vec<Vec<(u32, u32)>>,
}

impl SparseCounts {
    pub fn new(num_rows: usize) -> Self {
        SparseCounts {
            rows: vec![Vec::new(); num_rows],
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> &[(u32, u32)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: u32) -> u32 {
        let row = &self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    pub fn increment(&mut self, r: usize, c: u32) {
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(i) => row[i].1 += 1,
            Err(i) => row.insert(i, (c, 1)),
        }
    }

    /// Panics if the cell is already zero.
    pub fn decrement(&mut self, r: usize, c: u32) {
        let row = &mut self.rows[r];
        let i = row
            .binary_search_by_key(&c, |&(col, _)| col)
            .unwrap_or_else(|_| panic!("decrement of empty cell ({r}, {c})"));
        if row[i].1 == 1 {
            row.remove(i);
        } else {
            row[i].1 -= 1;
        }
    }

    /// Replaces row `r` with the non-zero entries of `dense`.
    pub fn set_row_from_dense(&mut self, r: usize, dense: &[u32]) {
        let row = &mut self.rows[r];
        row.clear();
        row.extend(
            dense
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (k as u32, c)),
        );
    }

    pub fn row_total(&self, r: usize) -> u64 {
        self.rows[r].iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_and_decrements_stay_sorted() {
        let mut t = SparseCounts::new(2);
        t.increment(0, 5);
        t.increment(0, 1);
        t.increment(0, 5);
        assert_eq!(t.row(0), &[(1, 1), (5, 2)]);
        t.decrement(0, 1);
        assert_eq!(t.row(0), &[(5, 2)]);
        assert_eq!(t.get(0, 5), 2);
        assert_eq!(t.get(0, 1), 0);
        assert_eq!(t.row_total(0), 2);
        assert_eq!(t.nnz(), 1);
        t.set_row_from_dense(1, &[0, 3, 0, 1]);
        assert_eq!(t.row(1), &[(1, 3), (3, 1)]);
    }

    #[test]
    #[should_panic]
    fn decrement_of_zero_panics() {
        SparseCounts::new(1).decrement(0, 0);
    }
}
