//! Reading and writing tree decompositions in the PACE `.td` exchange
//! format: a `s td <bags> <max-bag-size> <vertices>` header, `b <id> <elems>`
//! lines, and one line per tree edge between bag ids.

use super::TreeDecomposition;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: expected 's td <bags> <max-bag-size> <vertices>', found '{found}'")]
    MalformedHeader { line: usize, found: String },
    #[error("no 's td' header line before content")]
    MissingHeader,
    #[error("line {line}: second 's td' header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: cannot parse token '{token}'")]
    BadToken { line: usize, token: String },
    #[error("line {line}: bag id {id} outside 1..={declared}")]
    BagIdOutOfRange { line: usize, id: usize, declared: usize },
    #[error("line {line}: bag {id} defined twice")]
    DuplicateBag { line: usize, id: usize },
    #[error("line {line}: vertex {vertex} outside 1..={declared}")]
    VertexOutOfRange { line: usize, vertex: i64, declared: usize },
    #[error("line {line}: edge endpoints must be two distinct bag ids")]
    BadEdge { line: usize },
    #[error("header declares max bag size {declared} but the largest bag has {actual} vertices")]
    MaxBagSizeMismatch { declared: usize, actual: usize },
}

/// Parses a `.td` document. Bags may appear in any order; bag ids not given
/// an explicit line are empty bags.
pub fn parse_td(input: &str) -> Result<TreeDecompositionFile, TdError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<u32>>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        let mut tokens = text.split_ascii_whitespace();
        let first = tokens.next().unwrap();
        if first == "s" {
            if header.is_some() {
                return Err(TdError::DuplicateHeader { line });
            }
            let rest: Vec<&str> = tokens.collect();
            if rest.len() != 4 || rest[0] != "td" {
                return Err(TdError::MalformedHeader {
                    line,
                    found: text.to_string(),
                });
            }
            let mut nums = [0usize; 3];
            for (i, tok) in rest[1..].iter().enumerate() {
                nums[i] = tok.parse().map_err(|_| TdError::BadToken {
                    line,
                    token: tok.to_string(),
                })?;
            }
            header = Some((nums[0], nums[1], nums[2]));
            bags = vec![None; nums[0]];
            continue;
        }
        let (num_bags, _, num_vertices) = header.ok_or(TdError::MissingHeader)?;
        if first == "b" {
            let id_tok = tokens.next().ok_or(TdError::BadEdge { line })?;
            let id: usize = id_tok.parse().map_err(|_| TdError::BadToken {
                line,
                token: id_tok.to_string(),
            })?;
            if id == 0 || id > num_bags {
                return Err(TdError::BagIdOutOfRange {
                    line,
                    id,
                    declared: num_bags,
                });
            }
            if bags[id - 1].is_some() {
                return Err(TdError::DuplicateBag { line, id });
            }
            let mut bag = Vec::new();
            for tok in tokens {
                let v: i64 = tok.parse().map_err(|_| TdError::BadToken {
                    line,
                    token: tok.to_string(),
                })?;
                if v < 1 || v as usize > num_vertices {
                    return Err(TdError::VertexOutOfRange {
                        line,
                        vertex: v,
                        declared: num_vertices,
                    });
                }
                bag.push(v as u32);
            }
            bags[id - 1] = Some(bag);
        } else {
            // tree edge: exactly two bag ids
            let a: usize = first.parse().map_err(|_| TdError::BadToken {
                line,
                token: first.to_string(),
            })?;
            let b_tok = tokens.next().ok_or(TdError::BadEdge { line })?;
            let b: usize = b_tok.parse().map_err(|_| TdError::BadToken {
                line,
                token: b_tok.to_string(),
            })?;
            if tokens.next().is_some() {
                return Err(TdError::BadEdge { line });
            }
            for id in [a, b] {
                if id == 0 || id > num_bags {
                    return Err(TdError::BagIdOutOfRange {
                        line,
                        id,
                        declared: num_bags,
                    });
                }
            }
            if a == b {
                return Err(TdError::BadEdge { line });
            }
            edges.push((a - 1, b - 1));
        }
    }
    let (num_bags, declared_max, num_vertices) = header.ok_or(TdError::MissingHeader)?;
    let mut d = TreeDecomposition::new(num_vertices);
    let mut actual_max = 0;
    for bag in bags {
        let bag = bag.unwrap_or_default();
        actual_max = actual_max.max(bag.len());
        d.add_bag(bag);
    }
    if actual_max != declared_max && num_bags > 0 {
        return Err(TdError::MaxBagSizeMismatch {
            declared: declared_max,
            actual: actual_max,
        });
    }
    edges.sort_unstable();
    edges.dedup();
    for (a, b) in edges {
        d.add_edge(a, b);
    }
    Ok(TreeDecompositionFile {
        decomposition: d,
        declared_vertices: num_vertices,
    })
}

/// A parsed `.td` file: the decomposition plus the vertex count the header
/// declared (the decomposition itself may mention fewer vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecompositionFile {
    pub decomposition: TreeDecomposition,
    pub declared_vertices: usize,
}

/// Writes the canonical `.td` form: header, bags in id order with ascending
/// elements, then tree edges in sorted order. Parsing the output and writing
/// it again reproduces the same bytes.
pub fn write_td(d: &TreeDecomposition) -> String {
    let max_size = d.bags().map(|(_, b)| b.len()).max().unwrap_or(0);
    let mut out = format!(
        "s td {} {} {}\n",
        d.num_nodes(),
        max_size,
        d.num_vertices()
    );
    for (id, bag) in d.bags() {
        out.push_str(&format!("b {}", id + 1));
        for v in bag {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    let mut edges: Vec<(usize, usize)> = d
        .tree_edges()
        .iter()
        .map(|&(a, b)| (a.min(b) + 1, a.max(b) + 1))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    for (a, b) in edges {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}
