//! Elementary cellular automaton with periodic boundaries and Wolfram rule
//! numbering: the next cell value is bit (4L + 2C + R) of the rule byte.

/// Advances one row. Cells are 0/1; `row` must be non-empty.
pub fn eca_step(row: &[u8], rule: u8) -> Vec<u8> {
    let n = row.len();
    assert!(n > 0, "empty row");
    let mut next = vec![0u8; n];
    for i in 0..n {
        let left = row[(i + n - 1) % n];
        let center = row[i];
        let right = row[(i + 1) % n];
        debug_assert!(left <= 1 && center <= 1 && right <= 1);
        let index = (left << 2) | (center << 1) | right;
        next[i] = (rule >> index) & 1;
    }
    next
}

/// Evolves `steps` rows, returning them newest-last; the initial row is not
/// included.
pub fn eca_evolve(initial: &[u8], rule: u8, steps: usize) -> Vec<Vec<u8>> {
    let mut rows = Vec::with_capacity(steps);
    let mut current = initial.to_vec();
    for _ in 0..steps {
        current = eca_step(&current, rule);
        rows.push(current.clone());
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent table oracle for rule 59, written out neighborhood by
    /// neighborhood.
    fn rule59_oracle(left: u8, center: u8, right: u8) -> u8 {
        match (left, center, right) {
            (1, 1, 1) => 0,
            (1, 1, 0) => 0,
            (1, 0, 1) => 1,
            (1, 0, 0) => 1,
            (0, 1, 1) => 1,
            (0, 1, 0) => 0,
            (0, 0, 1) => 1,
            (0, 0, 0) => 1,
            _ => unreachable!(),
        }
    }

    #[test]
    fn rule_59_matches_its_truth_table() {
        for l in 0..2u8 {
            for c in 0..2u8 {
                for r in 0..2u8 {
                    let row = [l, c, r];
                    // Index 1 sees exactly (l, c, r) as its neighborhood.
                    assert_eq!(eca_step(&row, 59)[1], rule59_oracle(l, c, r), "({l},{c},{r})");
                }
            }
        }
    }

    #[test]
    fn rule_59_five_cell_example() {
        assert_eq!(eca_step(&[0, 0, 1, 0, 0], 59), vec![1, 1, 0, 1, 1]);
    }

    #[test]
    fn all_zero_row_becomes_all_one_under_rule_59() {
        assert_eq!(eca_step(&[0; 7], 59), vec![1; 7]);
    }

    #[test]
    fn boundaries_wrap() {
        // Row [1, 0, 0, 0]: cell 0 sees (0, 1, 0), cell 3 sees (0, 0, 1).
        let next = eca_step(&[1, 0, 0, 0], 59);
        assert_eq!(next[0], rule59_oracle(0, 1, 0));
        assert_eq!(next[3], rule59_oracle(0, 0, 1));
    }

    #[test]
    fn rule_110_spot_check() {
        // 110 = 0b01101110. Wrapped row [0,1,0]: cells see 001 -> 1,
        // 010 -> 1, 100 -> 0.
        assert_eq!(eca_step(&[1, 1, 1], 110), vec![0, 0, 0]);
        assert_eq!(eca_step(&[0, 1, 0], 110), vec![1, 1, 0]);
        assert_eq!(eca_step(&[0, 0, 0], 110), vec![0, 0, 0]);
    }

    #[test]
    fn evolve_returns_requested_number_of_rows() {
        let rows = eca_evolve(&[0, 0, 1, 0, 0], 59, 3);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], vec![1, 1, 0, 1, 1]);
        assert_eq!(rows[1], eca_step(&rows[0], 59));
    }
}
