//! Full 2^n contingency tables reconstructed from joint and marginal counts.
//!
//! Cells are indexed in reading order of the `1`/`2` notation: for bigrams
//! index 0 is `n11`, 1 is `n12`, 2 is `n21` and 3 is `n22`. Bit `n - 1 - i` of
//! a cell index is set when position `i` does *not* hold its token.

use crate::count::GramSize;

#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    n: GramSize,
    observed: Vec<u64>,
    expected: Vec<f64>,
    singles: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    /// Builds the table from counts indexed by position mask (bit `i` set when
    /// position `i` is fixed): mask 0 is the total, the full mask is the joint
    /// count. A negative reconstructed cell is returned as `(cell, value)`.
    pub fn from_subset_counts(n: GramSize, by_mask: &[u64]) -> Result<Self, (usize, i128)> {
        let k = n.get();
        let full = n.full_mask();
        assert_eq!(by_mask.len(), full + 1, "need one count per position subset");
        let total = by_mask[0];

        let mut observed = vec![0u64; full + 1];
        for present in 0..=full {
            // Möbius inversion over supersets of the present positions.
            let mut v: i128 = 0;
            for (sup, &count) in by_mask.iter().enumerate() {
                if sup & present != present {
                    continue;
                }
                let extra = (sup & !present).count_ones();
                let c = count as i128;
                v += if extra % 2 == 0 { c } else { -c };
            }
            let cell = cell_of(k, present);
            if v < 0 {
                return Err((cell, v));
            }
            observed[cell] = v as u64;
        }

        let singles: Vec<u64> = (0..k).map(|i| by_mask[1 << i]).collect();
        let expected = expected_cells(k, &singles, total);
        Ok(ContingencyTable {
            n,
            observed,
            expected,
            singles,
            total,
        })
    }

    /// Bigram table from `n11`, `n1p`, `np1` and `npp`.
    pub fn bigram(n11: u64, n1p: u64, np1: u64, npp: u64) -> Result<Self, (usize, i128)> {
        let n = GramSize::new(2).expect("2 is a valid gram size");
        Self::from_subset_counts(n, &[npp, n1p, np1, n11])
    }

    pub fn n(&self) -> GramSize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Joint count of the n-gram itself (the all-present cell).
    pub fn joint(&self) -> u64 {
        self.observed[0]
    }

    /// Count of windows with the n-gram's token at `position`.
    pub fn single_marginal(&self, position: usize) -> u64 {
        self.singles[position]
    }

    pub fn singles(&self) -> &[u64] {
        &self.singles
    }

    pub fn observed(&self) -> &[u64] {
        &self.observed
    }

    pub fn expected(&self) -> &[f64] {
        &self.expected
    }

    /// Expected joint cell under independence of all positions.
    pub fn expected_joint(&self) -> f64 {
        self.expected[0]
    }
}

fn cell_of(k: usize, present: usize) -> usize {
    let mut cell = 0;
    for i in 0..k {
        if present >> i & 1 == 0 {
            cell |= 1 << (k - 1 - i);
        }
    }
    cell
}

fn expected_cells(k: usize, singles: &[u64], total: u64) -> Vec<f64> {
    let size = 1 << k;
    if total == 0 {
        return vec![0.0; size];
    }
    let t = total as f64;
    let scale = t.powi(k as i32 - 1);
    (0..size)
        .map(|cell| {
            let mut prod = 1.0;
            for (i, &s) in singles.iter().enumerate() {
                let absent = cell >> (k - 1 - i) & 1 == 1;
                prod *= if absent { (total - s) as f64 } else { s as f64 };
            }
            prod / scale
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigram_cells_by_inclusion_exclusion() {
        let ct = ContingencyTable::bigram(10, 20, 40, 100).unwrap();
        assert_eq!(ct.observed(), &[10, 10, 30, 50]);
        let exp = ct.expected();
        for (e, want) in exp.iter().zip([8.0, 12.0, 32.0, 48.0]) {
            assert!((e - want).abs() < 1e-12, "{e} vs {want}");
        }
    }

    #[test]
    fn perfect_association() {
        let ct = ContingencyTable::bigram(7, 7, 7, 7).unwrap();
        assert_eq!(ct.observed(), &[7, 0, 0, 0]);
    }

    #[test]
    fn single_repeated_trigram() {
        let n = GramSize::new(3).unwrap();
        let ct = ContingencyTable::from_subset_counts(n, &[5; 8]).unwrap();
        assert_eq!(ct.observed(), &[5, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(ct.expected()[0], 5.0);
    }

    #[test]
    fn negative_cell_is_reported() {
        // n1p + np1 - n11 exceeds the total: n22 = 10 - 8 - 8 + 1 < 0
        assert_eq!(ContingencyTable::bigram(1, 8, 8, 10), Err((3, -5)));
    }

    #[test]
    fn trigram_cells_sum_to_total() {
        let n = GramSize::new(3).unwrap();
        // by mask: total, {0}, {1}, {0,1}, {2}, {0,2}, {1,2}, joint
        let counts = [100, 30, 40, 12, 50, 15, 20, 6];
        let ct = ContingencyTable::from_subset_counts(n, &counts).unwrap();
        assert_eq!(ct.observed().iter().sum::<u64>(), 100);
        assert_eq!(ct.joint(), 6);
        // n112: positions 0 and 1 present, 2 absent
        assert_eq!(ct.observed()[1], 12 - 6);
        let exp_sum: f64 = ct.expected().iter().sum();
        assert!((exp_sum - 100.0).abs() < 1e-9);
        assert!((ct.expected_joint() - 30.0 * 40.0 * 50.0 / 1e4).abs() < 1e-12);
    }
}
