//! Shared inputs for the criterion benchmarks.

/// The pair `(2i, 2i+1)` whose sum is closest to `size`.
pub fn pair_for_size(size: u64) -> (u64, u64) {
    let i = (size.saturating_sub(1) / 4).max(1);
    (2 * i, 2 * i + 1)
}

/// Sizes doubling from `start` while at most `end`.
pub fn doubling_sizes(start: u64, end: u64) -> Vec<u64> {
    std::iter::successors(Some(start.max(1)), |s| Some(s * 2))
        .take_while(|s| *s <= end)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_admissible() {
        for s in doubling_sizes(8, 1 << 16) {
            let (a, b) = pair_for_size(s);
            assert!(rod_flat::BezoutProblem::new(a, b).is_ok());
            assert!((a + b).abs_diff(s) <= 4);
        }
    }
}
