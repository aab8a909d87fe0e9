use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::RiskScore;

/// The id named by the last line carrying `FINAL: path_<id>`, else by the last
/// standalone `path_<n>` token.
pub fn parse_verdict(transcript: &str, candidate_count: usize) -> Result<usize> {
    let id = transcript
        .lines()
        .rev()
        .find_map(|line| {
            let rest = &line[line.rfind("FINAL:")? + "FINAL:".len()..];
            let token = rest.split_whitespace().next()?;
            path_token(token.trim_matches(|c: char| matches!(c, '*' | '`' | '.' | '"' | '\'')))
        })
        .or_else(|| {
            transcript
                .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .rev()
                .find_map(path_token)
        })
        .ok_or(Error::MalformedVerdict)?;
    if id >= candidate_count {
        return Err(Error::OutOfRange {
            id,
            count: candidate_count,
        });
    }
    Ok(id)
}

fn path_token(token: &str) -> Option<usize> {
    let digits = token.strip_prefix("path_")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Most frequent id; ties go to the lowest id.
///
/// # Panics
/// If `verdicts` is empty.
pub fn majority_select(verdicts: &[usize]) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in verdicts {
        *counts.entry(v).or_default() += 1;
    }
    let best = counts.values().copied().max().expect("at least one verdict");
    counts
        .into_iter()
        .find(|&(_, n)| n == best)
        .map(|(id, _)| id)
        .unwrap()
}

/// Lowest risk, then shorter world length, then lower id.
///
/// # Panics
/// If `scores` is empty.
pub fn heuristic_select(scores: &[RiskScore]) -> usize {
    scores
        .iter()
        .min_by(|a, b| {
            a.risk
                .total_cmp(&b.risk)
                .then(a.world_length.total_cmp(&b.world_length))
                .then(a.path_id.cmp(&b.path_id))
        })
        .expect("at least one score")
        .path_id
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_final_line() {
        assert_eq!(parse_verdict("…therefore\nFINAL: path_1", 3).unwrap(), 1);
        assert_eq!(parse_verdict("I prefer path_0 over path_2.\nFINAL: path_1\n", 3).unwrap(), 1);
        assert_eq!(parse_verdict("**FINAL: path_2**", 3).unwrap(), 2);
        assert!(matches!(parse_verdict("FINAL: path_7", 3), Err(Error::OutOfRange { id: 7, count: 3 })));
        assert!(matches!(parse_verdict("no idea", 3), Err(Error::MalformedVerdict)));
    }

    #[test]
    fn fallback_to_last_token() {
        assert_eq!(parse_verdict("path_0 is long; path_2 avoids offices", 3).unwrap(), 2);
        assert_eq!(parse_verdict("therefore FINAL: path_1", 3).unwrap(), 1);
        assert!(parse_verdict("mypath_1 and path_x", 3).is_err());
    }

    #[test]
    fn majority() {
        assert_eq!(majority_select(&[1, 1, 2, 0, 1]), 1);
        assert_eq!(majority_select(&[0, 0, 1, 1, 2]), 0);
        assert_eq!(majority_select(&[3]), 3);
    }

    fn score(id: usize, risk: f64, len: f64) -> RiskScore {
        RiskScore { path_id: id, risk, world_length: len, cell_length: len * 10.0 }
    }

    #[test]
    fn heuristic() {
        assert_eq!(heuristic_select(&[score(0, 5.0, 1.0), score(1, 2.0, 1.0), score(2, 9.0, 1.0)]), 1);
        assert_eq!(heuristic_select(&[score(0, 2.0, 40.0), score(1, 2.0, 30.0)]), 1);
        assert_eq!(heuristic_select(&[score(0, 7.0, 3.0)]), 0);
    }

    proptest! {
        #[test]
        fn majority_is_permutation_invariant(mut v in prop::collection::vec(0usize..6, 1..12), seed in any::<u64>()) {
            let m = majority_select(&v);
            prop_assert!(v.contains(&m));
            use rand::{seq::SliceRandom, SeedableRng};
            v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(majority_select(&v), m);
        }

        #[test]
        fn final_line_round_trips(k in 0usize..50, extra in 0usize..50) {
            let text = format!("thinking about path_{extra}\nFINAL: path_{k}");
            prop_assert_eq!(parse_verdict(&text, 50).unwrap(), k);
        }
    }
}
