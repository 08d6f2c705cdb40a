use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fatgraph::{Spine, SpineError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WordError {
    #[error(transparent)]
    Spine(#[from] SpineError),
    #[error("rotation at edge {0}, which is not pending")]
    RotateAtInnerEdge(u32),
    #[error("rotation {k} at edge {edge} is outside 1..{p}")]
    Winding { edge: u32, k: u32, p: u32 },
    #[error("word does not follow the spine at token {0}")]
    Unrealizable(usize),
    #[error("malformed word: {0}")]
    Malformed(String),
    #[error("closed word expected")]
    Open,
    #[error("field has no w_{0}")]
    FieldLacksOrder(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    #[serde(rename = "edge")]
    Edge(u32),
    L,
    R,
    #[serde(rename = "rotate")]
    Rotate { edge: u32, k: u32 },
}

/// Token sequence `edge (connector edge)*`, with a trailing connector back
/// to the first edge when closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathWord {
    pub tokens: Vec<Token>,
    pub closed: bool,
}

/// What follows a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conn {
    R,
    L,
    Rotate(u32),
    End,
}

/// One crossing of half-edge `half` (from its vertex to the twin's) and the
/// connector after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub half: usize,
    pub after: Conn,
}

/// A word realized on a spine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Route {
    pub steps: Vec<Step>,
    pub closed: bool,
}

/// Half-edge taken after crossing `h` and applying `c`.
pub fn follow(spine: &Spine, h: usize, c: Conn) -> Option<usize> {
    let arrive = spine.twin(h);
    match c {
        Conn::R if !spine.is_terminal(arrive) => Some(spine.next(arrive)),
        Conn::L if !spine.is_terminal(arrive) => Some(spine.next(spine.next(arrive))),
        Conn::Rotate(k) if spine.is_terminal(arrive) => {
            let p = spine.pending_order(spine.edge(h))?;
            (1..p).contains(&k).then_some(arrive)
        }
        _ => None,
    }
}

/// Every connector available after crossing `h`, with the next half-edge.
pub fn connectors(spine: &Spine, h: usize) -> Vec<(Conn, usize)> {
    let arrive = spine.twin(h);
    if spine.is_terminal(arrive) {
        let p = spine.pending_order(spine.edge(h)).unwrap();
        (1..p).map(|k| (Conn::Rotate(k), arrive)).collect()
    } else {
        [Conn::R, Conn::L]
            .into_iter()
            .map(|c| (c, follow(spine, h, c).unwrap()))
            .collect()
    }
}

/// Steps crossing `from` and ending with a connector into `to`, as short as
/// possible, using only half-edges accepted by `allowed`.
pub(crate) fn shortest_continuation(
    spine: &Spine,
    from: usize,
    to: usize,
    allowed: &dyn Fn(usize) -> bool,
) -> Option<Vec<Step>> {
    let n = spine.n_halves();
    let mut prev: Vec<Option<(usize, Conn)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    let mut reached = None;
    'bfs: while let Some(h) = queue.pop_front() {
        for (c, next) in connectors(spine, h) {
            if !allowed(next) {
                continue;
            }
            if next == to {
                reached = Some((h, c));
                break 'bfs;
            }
            if !seen[next] {
                seen[next] = true;
                prev[next] = Some((h, c));
                queue.push_back(next);
            }
        }
    }
    let (mut h, c) = reached?;
    let mut steps = vec![Step { half: h, after: c }];
    while h != from {
        let (p, c) = prev[h].unwrap();
        steps.push(Step { half: p, after: c });
        h = p;
    }
    steps.reverse();
    Some(steps)
}

impl Route {
    pub fn to_word(&self, spine: &Spine) -> PathWord {
        let mut tokens = Vec::new();
        for s in &self.steps {
            let label = spine.edges()[spine.edge(s.half)].label;
            tokens.push(Token::Edge(label));
            match s.after {
                Conn::R => tokens.push(Token::R),
                Conn::L => tokens.push(Token::L),
                Conn::Rotate(k) => tokens.push(Token::Rotate { edge: label, k }),
                Conn::End => {}
            }
        }
        PathWord {
            tokens,
            closed: self.closed,
        }
    }

    /// Checks that every connector leads to the next crossing.
    pub fn is_valid(&self, spine: &Spine) -> bool {
        let n = self.steps.len();
        (0..n).all(|i| {
            let s = self.steps[i];
            if i + 1 == n && !self.closed {
                return s.after == Conn::End;
            }
            follow(spine, s.half, s.after) == Some(self.steps[(i + 1) % n].half)
        })
    }
}

impl PathWord {
    pub fn new(tokens: Vec<Token>, closed: bool) -> PathWord {
        PathWord { tokens, closed }
    }

    fn steps(&self) -> Result<Vec<(u32, Conn)>, WordError> {
        let mut out: Vec<(u32, Conn)> = Vec::new();
        let mut iter = self.tokens.iter().enumerate().peekable();
        while let Some((i, t)) = iter.next() {
            let Token::Edge(label) = *t else {
                return Err(WordError::Malformed(format!("token {i} should be an edge")));
            };
            let conn = match iter.peek() {
                None => Conn::End,
                Some((_, Token::Edge(_))) => {
                    return Err(WordError::Malformed(format!("no connector after token {i}")));
                }
                Some((_, c)) => {
                    let c = match **c {
                        Token::R => Conn::R,
                        Token::L => Conn::L,
                        Token::Rotate { edge, k } => {
                            if edge != label {
                                return Err(WordError::Malformed(format!("rotation at {edge} after edge {label}")));
                            }
                            Conn::Rotate(k)
                        }
                        Token::Edge(_) => unreachable!(),
                    };
                    iter.next();
                    c
                }
            };
            out.push((label, conn));
        }
        if out.is_empty() {
            return Err(WordError::Malformed("empty word".into()));
        }
        let last = out.last().unwrap().1;
        if self.closed != (last != Conn::End) {
            return Err(WordError::Malformed(if self.closed {
                "closed word must end with a connector".into()
            } else {
                "open word must end with an edge".into()
            }));
        }
        Ok(out)
    }

    /// Finds the route of this word on the spine.
    pub fn realize(&self, spine: &Spine) -> Result<Route, WordError> {
        let steps = self.steps()?;
        for &(label, c) in &steps {
            let e = spine.index_of_label(label)?;
            if let Conn::Rotate(k) = c {
                let p = spine.pending_order(e).ok_or(WordError::RotateAtInnerEdge(label))?;
                if k == 0 || k >= p {
                    return Err(WordError::Winding { edge: label, k, p });
                }
            }
        }
        let first = spine.index_of_label(steps[0].0)?;
        let mut deepest = 0;
        'start: for &h0 in &spine.edges()[first].halves {
            let mut route = Vec::with_capacity(steps.len());
            let mut h = h0;
            for (i, &(_, c)) in steps.iter().enumerate() {
                route.push(Step { half: h, after: c });
                if c == Conn::End {
                    break;
                }
                let Some(next) = follow(spine, h, c) else {
                    deepest = deepest.max(i);
                    continue 'start;
                };
                let target = if i + 1 < steps.len() { steps[i + 1].0 } else { steps[0].0 };
                if spine.edges()[spine.edge(next)].label != target || (i + 1 == steps.len() && next != h0) {
                    deepest = deepest.max(i);
                    continue 'start;
                }
                h = next;
            }
            return Ok(Route {
                steps: route,
                closed: self.closed,
            });
        }
        Err(WordError::Unrealizable(deepest))
    }

    /// Cyclic rotation starting at crossing `i` of a closed word.
    pub fn rotated(&self, i: usize) -> PathWord {
        let starts: Vec<usize> = self
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, Token::Edge(_)))
            .map(|(j, _)| j)
            .collect();
        let mut tokens = self.tokens.clone();
        tokens.rotate_left(starts[i % starts.len()]);
        PathWord {
            tokens,
            closed: self.closed,
        }
    }

    pub fn crossings(&self) -> usize {
        self.tokens.iter().filter(|t| matches!(t, Token::Edge(_))).count()
    }

    pub fn has_rotations(&self) -> bool {
        self.tokens.iter().any(|t| matches!(t, Token::Rotate { .. }))
    }
}

/// Edges as labels, turns as `L`/`R`, rotations as `F<k>`; a trailing `.`
/// marks an open word.
impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tokens
            .iter()
            .map(|t| match t {
                Token::Edge(l) => l.to_string(),
                Token::L => "L".into(),
                Token::R => "R".into(),
                Token::Rotate { k, .. } => format!("F{k}"),
            })
            .collect();
        write!(f, "{}{}", parts.join(" "), if self.closed { "" } else { " ." })
    }
}

impl FromStr for PathWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tokens = Vec::new();
        let mut closed = true;
        let mut last_edge = None;
        for part in s.split_whitespace() {
            let t = match part {
                "L" => Token::L,
                "R" => Token::R,
                "." => {
                    closed = false;
                    continue;
                }
                _ if part.starts_with('F') => {
                    let k = part[1..].parse().map_err(|_| WordError::Malformed(part.into()))?;
                    let edge = last_edge.ok_or_else(|| WordError::Malformed(format!("{part} needs an edge before it")))?;
                    Token::Rotate { edge, k }
                }
                _ => {
                    let l = part.parse().map_err(|_| WordError::Malformed(part.into()))?;
                    last_edge = Some(l);
                    Token::Edge(l)
                }
            };
            tokens.push(t);
        }
        Ok(PathWord { tokens, closed })
    }
}
