use super::{binary_search, RunResult};
use crate::error::Result;
use crate::model::Tester;

/// Repeated binary testing: `k` independent halving searches, each over
/// every item not yet found defective. Items cleared by earlier searches are
/// deliberately not remembered.
pub fn repeated_binary_testing<T: Tester + ?Sized>(tester: &mut T, k: usize) -> Result<RunResult> {
    let mut remaining: Vec<usize> = (0..tester.universe()).collect();
    let mut found = Vec::with_capacity(k);
    let outcome = (|| {
        for _ in 0..k {
            if remaining.is_empty() {
                break;
            }
            let r = binary_search(tester, &remaining)?;
            found.push(r.found);
            remaining.remove(r.offset());
        }
        Ok(())
    })();
    RunResult::conclude(tester, found, outcome)
}
