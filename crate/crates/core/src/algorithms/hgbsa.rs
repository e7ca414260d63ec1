use super::{binary_search, RunResult};
use crate::error::Result;
use crate::model::{Pool, Tester};

/// Size of the next group tested by generalized binary splitting with `m`
/// unresolved items and `k` defectives among them, or `None` when items
/// should be tested one at a time (`m <= 2k - 2`).
pub fn hgbsa_group_size(m: usize, k: usize) -> Option<usize> {
    if k == 0 || m + 2 <= 2 * k {
        return None;
    }
    let ratio = (m - k + 1) / k;
    Some(1 << ratio.max(1).ilog2())
}

/// Hwang's generalized binary splitting.
///
/// Unresolved items are kept in index order and only ever leave from the
/// front: a negative group is discarded whole, and a positive group is
/// searched for its leftmost defective, which leaves together with the
/// items before it.
pub fn hgbsa<T: Tester + ?Sized>(tester: &mut T, k: usize) -> Result<RunResult> {
    let n = tester.universe();
    let items: Vec<usize> = (0..n).collect();
    let mut start = 0;
    let mut left = k;
    let mut found = Vec::with_capacity(k);
    let outcome = (|| {
        while left > 0 {
            let rest = &items[start..];
            if rest.len() <= left {
                found.extend_from_slice(rest);
                break;
            }
            match hgbsa_group_size(rest.len(), left) {
                None => {
                    if tester.test(&Pool::from_slice(&rest[..1])?)?.is_positive()? {
                        found.push(rest[0]);
                        left -= 1;
                    }
                    start += 1;
                }
                Some(g) => {
                    let group = &rest[..g];
                    if tester.test(&Pool::from_slice(group)?)?.is_positive()? {
                        let hit = binary_search(tester, group)?;
                        found.push(hit.found);
                        start += hit.offset() + 1;
                        left -= 1;
                    } else {
                        start += g;
                    }
                }
            }
        }
        Ok(())
    })();
    RunResult::conclude(tester, found, outcome)
}
