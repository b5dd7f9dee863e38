//! Shared tail of the symmetric projection solvers: tie detection, undoing the
//! quadrant reduction, and the deterministic tie-break.

use super::{Point2, ProjectionResult};
use crate::{Real, Tolerances};

/// `q` is the original query and `a = |q|` the reflected one the candidates
/// were computed for.
pub(crate) fn finish<T: Real>(
    q: Point2<T>,
    a: Point2<T>,
    quadrant: Vec<Point2<T>>,
    tol: &Tolerances<T>,
) -> ProjectionResult<T> {
    let best = quadrant
        .iter()
        .map(|c| c.dist(a))
        .fold(T::infinity(), T::min);
    let one = T::one();
    let sx = if q.x < T::zero() { -one } else { one };
    let sy = if q.y < T::zero() { -one } else { one };

    // Mirror images across the axes are on the set too; near an axis they
    // tie with the candidate from the reduced quadrant.
    let mut out: Vec<Point2<T>> = Vec::with_capacity(4);
    for c in quadrant.into_iter().filter(|c| c.dist(a) <= best + tol.tie) {
        let c = c.with_signs(sx, sy);
        push_dedup(&mut out, c, tol.dedup);
        for m in [Point2::new(-c.x, c.y), Point2::new(c.x, -c.y), -c] {
            if m.dist(q) <= best + tol.tie {
                push_dedup(&mut out, m, tol.dedup);
            }
        }
    }
    from_candidates(out)
}

pub(crate) fn push_dedup<T: Real>(out: &mut Vec<Point2<T>>, c: Point2<T>, tol: T) {
    if !out.iter().any(|o| o.dist(c) <= tol) {
        out.push(c);
    }
}

/// Picks the lexicographically largest `(x, y)` among equidistant candidates.
pub(crate) fn from_candidates<T: Real>(mut candidates: Vec<Point2<T>>) -> ProjectionResult<T> {
    candidates.sort_by(|a, b| b.lex_cmp(a));
    ProjectionResult {
        point: candidates[0],
        multivalued: candidates.len() > 1,
        candidates,
    }
}
