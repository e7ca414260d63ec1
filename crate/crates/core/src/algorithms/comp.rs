use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use super::RunResult;
use crate::error::{Error, Result};
use crate::model::{Outcome, Pool, Tester};

/// Random test design used by COMP.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompDesign {
    /// Every item joins every test independently with probability `1/k`.
    Bernoulli,
    /// Every item joins `round(t ln 2 / k)` distinct tests chosen uniformly.
    #[default]
    ConstantColumn,
}

impl std::str::FromStr for CompDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(CompDesign::Bernoulli),
            "constant-column" => Ok(CompDesign::ConstantColumn),
            _ => Err(Error::invalid("comp-design", format!("unknown design `{s}`"))),
        }
    }
}

/// Draws `t` non-empty pools over `n` items. An empty Bernoulli pool is
/// redrawn; an empty constant-column pool receives one uniformly chosen item.
pub fn comp_design<R: Rng + ?Sized>(n: usize, k: usize, t: usize, design: CompDesign, rng: &mut R) -> Result<Vec<Pool>> {
    if n == 0 {
        return Err(Error::InvalidSize { n, k });
    }
    match design {
        CompDesign::Bernoulli => {
            let p = 1.0 / k.max(1) as f64;
            (0..t)
                .map(|_| loop {
                    let items: Vec<usize> = (0..n).filter(|_| rng.random_bool(p)).collect();
                    if !items.is_empty() {
                        break Pool::new(items);
                    }
                })
                .collect()
        }
        CompDesign::ConstantColumn => {
            let weight = column_weight(k, t);
            let mut rows = vec![Vec::new(); t];
            for item in 0..n {
                for row in index::sample(rng, t, weight) {
                    rows[row].push(item);
                }
            }
            for row in rows.iter_mut().filter(|r| r.is_empty()) {
                row.push(rng.random_range(0..n));
            }
            rows.into_iter().map(Pool::new).collect()
        }
    }
}

fn column_weight(k: usize, t: usize) -> usize {
    let w = (t as f64 * std::f64::consts::LN_2 / k.max(1) as f64).round() as usize;
    w.clamp(1, t.max(1))
}

/// Non-adaptive COMP: submits all `t` pools of a random design, then clears
/// every item seen in a negative pool and declares the rest defective.
/// Erased outcomes clear nothing.
pub fn comp_run<T, R>(tester: &mut T, k: usize, t: usize, design: CompDesign, rng: &mut R) -> Result<RunResult>
where
    T: Tester + ?Sized,
    R: Rng + ?Sized,
{
    if t == 0 {
        return Err(Error::invalid("t", "COMP needs at least one test"));
    }
    let n = tester.universe();
    let pools = comp_design(n, k, t, design, rng)?;
    let mut cleared = vec![false; n];
    let outcome = (|| {
        for pool in &pools {
            if tester.test(pool)? == Outcome::Negative {
                for &i in pool.items() {
                    cleared[i] = true;
                }
            }
        }
        Ok(())
    })();
    let estimate = (0..n).filter(|&i| !cleared[i]).collect();
    RunResult::conclude(tester, estimate, outcome)
}
