//! Exhaustive sort-based Recall@k, written independently of the library's counting approach.

use std::cmp::Ordering;

/// `correct[c]` is the row index of caption `c`'s video, or `None` when the caption has no
/// ground truth.
pub struct Problem {
    pub scores: Vec<Vec<f64>>,
    pub correct: Vec<Option<usize>>,
}

/// Position of the first correct candidate after a stable sort by descending score in which
/// ties put incorrect candidates first.
fn rank(candidates: &[(f64, bool)]) -> Option<usize> {
    let mut order: Vec<&(f64, bool)> = candidates.iter().collect();
    order.sort_by(|a, b| match b.0.partial_cmp(&a.0).unwrap() {
        Ordering::Equal => a.1.cmp(&b.1),
        o => o,
    });
    order.iter().position(|c| c.1)
}

pub fn t2v(p: &Problem, k: usize) -> f64 {
    let mut hits = 0;
    let mut queries = 0;
    for (c, owner) in p.correct.iter().enumerate() {
        let Some(v) = owner else { continue };
        queries += 1;
        let candidates: Vec<(f64, bool)> = (0..p.scores.len()).map(|r| (p.scores[r][c], r == *v)).collect();
        if rank(&candidates).unwrap() < k {
            hits += 1;
        }
    }
    hits as f64 / queries as f64
}

pub fn v2t(p: &Problem, k: usize) -> f64 {
    let mut hits = 0;
    let mut queries = 0;
    for (r, row) in p.scores.iter().enumerate() {
        if !p.correct.contains(&Some(r)) {
            continue;
        }
        queries += 1;
        let candidates: Vec<(f64, bool)> = row
            .iter()
            .zip(&p.correct)
            .map(|(&s, owner)| (s, *owner == Some(r)))
            .collect();
        if rank(&candidates).unwrap() < k {
            hits += 1;
        }
    }
    hits as f64 / queries as f64
}
