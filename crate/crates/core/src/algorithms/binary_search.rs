use crate::error::{Error, Result};
use crate::model::{Pool, Tester};

/// What a halving search learned about a candidate list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// The defective at the smallest position in the candidate list.
    pub found: usize,
    /// Candidates before `found`, all shown to be non-defective.
    pub cleared: Vec<usize>,
    pub tests_spent: usize,
}

impl SearchResult {
    /// Position of `found` within the searched list.
    pub fn offset(&self) -> usize {
        self.cleared.len()
    }
}

/// Locates the leftmost defective of `candidates`, which the caller
/// guarantees to contain one, in exactly `ceil(log2 b)` tests.
///
/// The list is conceptually padded at the end with non-defective dummies up
/// to the next power of two. Each step tests the real members of the first
/// half of the current interval and keeps that half on a positive, the
/// second half on a negative. Dummies never reach the tester.
pub fn binary_search<T: Tester + ?Sized>(tester: &mut T, candidates: &[usize]) -> Result<SearchResult> {
    let b = candidates.len();
    if b == 0 {
        return Err(Error::invalid("candidates", "binary search needs at least one candidate"));
    }
    let mut lo = 0;
    let mut width = b.next_power_of_two();
    let mut tests_spent = 0;
    while width > 1 {
        if lo >= b {
            // Only reachable when the defective guarantee was violated.
            break;
        }
        width /= 2;
        let mid = lo + width;
        let pool = Pool::from_slice(&candidates[lo..mid.min(b)])?;
        tests_spent += 1;
        if !tester.test(&pool)?.is_positive()? {
            lo = mid;
        }
    }
    let at = lo.min(b - 1);
    Ok(SearchResult {
        found: candidates[at],
        cleared: candidates[..at].to_vec(),
        tests_spent,
    })
}
