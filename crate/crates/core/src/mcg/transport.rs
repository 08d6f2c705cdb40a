//! Rewriting paths across a move so that they stay homotopic.

use crate::fatgraph::Spine;
use crate::geodesics::{Conn, PathWord, Route, Step, WordError};

use super::{Local, MoveRecord};

/// Connector at a trivalent vertex from arrival half `a` to exit half `b`.
fn turn(spine: &Spine, a: usize, b: usize) -> Option<Conn> {
    if spine.is_terminal(a) || a == b || spine.vertex(a) != spine.vertex(b) {
        None
    } else if spine.next(a) == b {
        Some(Conn::R)
    } else {
        Some(Conn::L)
    }
}

/// Steps of `route` starting at a crossing accepted by `start`, so that no
/// local pattern straddles the ends.
fn anchored(route: &Route, start: impl Fn(&Step) -> bool) -> Result<Vec<Step>, WordError> {
    let mut steps = route.steps.clone();
    if route.closed {
        let i = steps.iter().position(&start).ok_or(WordError::Unrealizable(0))?;
        steps.rotate_left(i);
    } else if !start(&steps[0]) || !start(steps.last().unwrap()) {
        return Err(WordError::Malformed("open word ends on the moved edge".into()));
    }
    Ok(steps)
}

/// Drops the crossings of the flipped edge and reconnects the rest through
/// the new vertices, crossing the flipped edge where they are now apart.
fn lift_inner(after: &Spine, route: &Route, z_halves: [usize; 2]) -> Result<Vec<Step>, WordError> {
    let is_z = |h: usize| z_halves.contains(&h);
    let kept: Vec<Step> = anchored(route, |s| !is_z(s.half))?
        .into_iter()
        .filter(|s| !is_z(s.half))
        .collect();
    let n = kept.len();
    let mut out = Vec::new();
    for (i, s) in kept.iter().enumerate() {
        if matches!(s.after, Conn::Rotate(_)) || (i + 1 == n && !route.closed) {
            out.push(Step {
                half: s.half,
                after: if i + 1 == n && !route.closed { Conn::End } else { s.after },
            });
            continue;
        }
        let a = after.twin(s.half);
        let b = kept[(i + 1) % n].half;
        if let Some(c) = turn(after, a, b) {
            out.push(Step { half: s.half, after: c });
            continue;
        }
        let z = *z_halves.iter().find(|&&z| after.vertex(z) == after.vertex(a)).unwrap();
        let into_z = turn(after, a, z).ok_or(WordError::Unrealizable(i))?;
        let out_z = turn(after, after.twin(z), b).ok_or(WordError::Unrealizable(i))?;
        out.push(Step { half: s.half, after: into_z });
        out.push(Step { half: z, after: out_z });
    }
    Ok(out)
}

/// Passes through the vertex `[z, y2, y1]` are `(a, k, b)`: arrive by `a`,
/// wind `k` around the orbifold point (none for a direct turn) and leave by
/// `b`. A direct turn from `y2` to `y1` counts as `k = p` and one from `y1`
/// to `y2` as `k = 0`; the move shifts `k` by one towards the new direct
/// turn.
fn lift_pending(
    before: &Spine,
    after: &Spine,
    route: &Route,
    z: usize,
    y1: usize,
    y2: usize,
    p: u32,
) -> Result<Vec<Step>, WordError> {
    let t = before.twin(z);
    let on_z = |h: usize| h == z || h == t;
    let steps = anchored(route, |s| !on_z(s.half))?;
    let n = steps.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let s = steps[i];
        if s.after == Conn::End {
            out.push(s);
            break;
        }
        let a = before.twin(s.half);
        let (k, j) = if a != y1 && a != y2 {
            out.push(s);
            i += 1;
            continue;
        } else if steps[(i + 1) % n].half == z {
            let Conn::Rotate(k) = steps[(i + 1) % n].after else {
                return Err(WordError::Unrealizable(i + 1));
            };
            (Some(k), i + 3)
        } else {
            (None, i + 1)
        };
        let b = steps[j % n].half;
        let k = match (a == y2, b == y1, k) {
            (true, true, k) => Some(k.unwrap_or(p) - 1).filter(|&k| k > 0),
            (false, false, k) => Some(k.unwrap_or(0) + 1).filter(|&k| k < p),
            (_, _, k) => k,
        };
        match k {
            None => out.push(Step {
                half: s.half,
                after: turn(after, a, b).ok_or(WordError::Unrealizable(i))?,
            }),
            Some(k) => {
                out.push(Step {
                    half: s.half,
                    after: turn(after, a, z).ok_or(WordError::Unrealizable(i))?,
                });
                out.push(Step {
                    half: z,
                    after: Conn::Rotate(k),
                });
                out.push(Step {
                    half: t,
                    after: turn(after, z, b).ok_or(WordError::Unrealizable(i))?,
                });
            }
        }
        i = j;
    }
    Ok(out)
}

/// The word on the spine after `record` homotopic to `word` on the spine
/// before it.
pub fn transport_path(word: &PathWord, record: &MoveRecord) -> Result<PathWord, WordError> {
    let route = word.realize(&record.before)?;
    let steps = match record.local {
        Local::Inner { zu, zv, .. } => lift_inner(&record.after, &route, [zu, zv])?,
        Local::Pending { z, y1, y2, p } => lift_pending(&record.before, &record.after, &route, z, y1, y2, p)?,
        Local::Spiral => route.steps.clone(),
    };
    let out = Route {
        steps,
        closed: route.closed,
    };
    debug_assert!(out.is_valid(&record.after), "transported route leaves the spine");
    if !out.is_valid(&record.after) {
        return Err(WordError::Unrealizable(0));
    }
    Ok(out.to_word(&record.after))
}
