use std::fmt::Write as _;

use crate::{TdError, TreeDecomposition};

/// Writes the PACE `.td` format: `s td <bags> <max bag size> <vertices>`, then
/// one `b` line per bag, then the tree edges. Numbering is 1-based.
pub fn write_td(td: &TreeDecomposition, vertices: usize) -> String {
    let max_bag = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), max_bag, vertices);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// Parses the PACE `.td` format. Lines starting with `c` are comments.
/// Returns the decomposition rooted at `root` (0-based) and the vertex count from the header.
pub fn read_td(text: &str, root: usize) -> Result<(TreeDecomposition, usize), TdError> {
    let err = |line: usize, msg: String| TdError::Parse { line, msg };
    let num = |tok: Option<&str>, line: usize, what: &str| -> Result<usize, TdError> {
        let t = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
        t.parse::<usize>()
            .map_err(|_| err(line, format!("bad {what} '{t}'")))
    };
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('c') {
            continue;
        }
        let mut toks = s.split_whitespace();
        match toks.clone().next() {
            Some("s") => {
                toks.next();
                if toks.next() != Some("td") {
                    return Err(err(line, "expected 's td'".into()));
                }
                let nb = num(toks.next(), line, "bag count")?;
                let _ = num(toks.next(), line, "bag size")?;
                let nv = num(toks.next(), line, "vertex count")?;
                header = Some((nb, nv));
                bags = vec![None; nb];
            }
            Some("b") => {
                toks.next();
                let (nb, nv) = header.ok_or_else(|| err(line, "bag before header".into()))?;
                let id = num(toks.next(), line, "bag id")?;
                if id == 0 || id > nb {
                    return Err(err(line, format!("bag id {id} out of range")));
                }
                let mut bag = Vec::new();
                for t in toks {
                    let v = num(Some(t), line, "vertex")?;
                    if v == 0 || v > nv {
                        return Err(err(line, format!("vertex {v} out of range")));
                    }
                    bag.push(v - 1);
                }
                if bags[id - 1].replace(bag).is_some() {
                    return Err(err(line, format!("bag {id} defined twice")));
                }
            }
            _ => {
                let (nb, _) = header.ok_or_else(|| err(line, "edge before header".into()))?;
                let a = num(toks.next(), line, "bag id")?;
                let b = num(toks.next(), line, "bag id")?;
                if toks.next().is_some() {
                    return Err(err(line, "trailing tokens".into()));
                }
                if a == 0 || b == 0 || a > nb || b > nb {
                    return Err(err(line, "edge names a missing bag".into()));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, nv) = header.ok_or_else(|| err(0, "missing header".into()))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| err(0, format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    let td = TreeDecomposition::new(bags, edges, root);
    td.check_tree()?;
    Ok((td, nv))
}
