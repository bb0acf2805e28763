use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::score::{GroundTruth, ScoreMatrix};
use super::EvalError;
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// Caption queries ranking videos.
    #[serde(rename = "t2v")]
    T2V,
    /// Video queries ranking captions.
    #[serde(rename = "v2t")]
    V2T,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::T2V, Direction::V2T];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::T2V => "t2v",
            Direction::V2T => "v2t",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "t2v" => Ok(Direction::T2V),
            "v2t" => Ok(Direction::V2T),
            _ => Err(format!("unknown direction {s:?} (expected t2v or v2t)")),
        }
    }
}

/// Fraction of ground-truth queries whose correct item ranks within the top `k`.
///
/// Ranks are pessimistic: every other candidate scoring at least as high as the correct item
/// counts ahead of it. A video with several correct captions is ranked by its best-scoring
/// one, and only incorrect captions count against it.
pub fn recall_at_k(m: &ScoreMatrix, gt: &GroundTruth, k: usize, direction: Direction) -> Result<f64, EvalError> {
    recall_at_k_with(m, gt, k, direction, Exec::default())
}

pub fn recall_at_k_with(
    m: &ScoreMatrix,
    gt: &GroundTruth,
    k: usize,
    direction: Direction,
    exec: Exec,
) -> Result<f64, EvalError> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    if k == 0 {
        return Err(EvalError::InvalidK);
    }
    let idx = gt.index_in(m)?;
    let (hits, queries) = match direction {
        Direction::V2T => {
            let q = &idx.video_queries;
            let hits = exec.count_range(q.len(), |i| {
                let (row, correct) = &q[i];
                let best = correct.iter().map(|&c| m.get(*row, c)).fold(f64::NEG_INFINITY, f64::max);
                let ahead = (0..m.cols())
                    .filter(|c| !correct.contains(c) && m.get(*row, *c) >= best)
                    .count();
                ahead < k
            });
            (hits, q.len())
        }
        Direction::T2V => {
            let q = &idx.caption_queries;
            let hits = exec.count_range(q.len(), |i| {
                let (col, row) = q[i];
                let s = m.get(row, col);
                let ahead = (0..m.rows()).filter(|&r| r != row && m.get(r, col) >= s).count();
                ahead < k
            });
            (hits, q.len())
        }
    };
    if queries == 0 {
        return Err(EvalError::NoQueries);
    }
    Ok(hits as f64 / queries as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn identity(n: usize) -> GroundTruth {
        let v = ids("v", n);
        let c = ids("c", n);
        GroundTruth::from_pairs(v.iter().map(String::as_str).zip(c.iter().map(String::as_str))).unwrap()
    }

    #[test]
    fn diagonal_is_perfect() {
        let m = ScoreMatrix::from_rows(
            ids("v", 3),
            ids("c", 3),
            vec![vec![0.9, 0.1, 0.2], vec![0.3, 0.8, 0.1], vec![0.0, 0.5, 0.7]],
        )
        .unwrap();
        for d in Direction::BOTH {
            assert_eq!(recall_at_k(&m, &identity(3), 1, d).unwrap(), 1.0);
        }
    }

    #[test]
    fn constant_scores_never_hit_at_one() {
        let m = ScoreMatrix::new(ids("v", 10), ids("c", 10), vec![0.5; 100]).unwrap();
        for d in Direction::BOTH {
            assert_eq!(recall_at_k(&m, &identity(10), 1, d).unwrap(), 0.0);
            assert_eq!(recall_at_k(&m, &identity(10), 9, d).unwrap(), 0.0);
            assert_eq!(recall_at_k(&m, &identity(10), 10, d).unwrap(), 1.0);
        }
    }

    #[test]
    fn errors() {
        let m = ScoreMatrix::new(ids("v", 2), ids("c", 2), vec![0.0; 4]).unwrap();
        assert!(matches!(recall_at_k(&m, &identity(2), 0, Direction::T2V), Err(EvalError::InvalidK)));
        assert!(matches!(recall_at_k(&m, &identity(3), 1, Direction::T2V), Err(EvalError::UnknownId(_))));
        let empty = ScoreMatrix::new(vec![], vec![], vec![]).unwrap();
        assert!(matches!(recall_at_k(&empty, &identity(0), 1, Direction::V2T), Err(EvalError::EmptyMatrix)));
        assert!(matches!(
            recall_at_k(&m, &GroundTruth::default(), 1, Direction::V2T),
            Err(EvalError::NoQueries)
        ));
    }

    #[test]
    fn multiple_correct_captions_do_not_block_each_other() {
        // v0 owns c0 and c1, which tie at the top of its row
        let gt = GroundTruth::from_pairs([("v0", "c0"), ("v0", "c1"), ("v1", "c2")]).unwrap();
        let m = ScoreMatrix::from_rows(
            ids("v", 2),
            ids("c", 3),
            vec![vec![0.9, 0.9, 0.1], vec![0.2, 0.2, 0.8]],
        )
        .unwrap();
        assert_eq!(recall_at_k(&m, &gt, 1, Direction::V2T).unwrap(), 1.0);
    }

    #[test]
    fn direction_parses() {
        assert_eq!("T2V".parse::<Direction>().unwrap(), Direction::T2V);
        assert!("x".parse::<Direction>().is_err());
    }
}
