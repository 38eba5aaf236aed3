use std::fmt::Write as _;

use crate::{Instance, InstanceError, Side};

/// Parses the text instance format.
///
/// ```text
/// p smti <men> <women>
/// m <id> : <entries>
/// w <id> : <entries>
/// ```
///
/// Entries are 1-based ids of the other side in rank order. A parenthesised
/// group is a tie. `#` starts a comment. Agents without a line have empty lists.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let syntax = |line: usize, msg: &str| InstanceError::Syntax(format!("{msg} at line {line}"));
    let mut header: Option<(usize, usize)> = None;
    let mut men: Vec<Option<Vec<Vec<usize>>>> = Vec::new();
    let mut women: Vec<Option<Vec<Vec<usize>>>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut head = content.split_whitespace();
        match head.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(syntax(line, "second header"));
                }
                if head.next() != Some("smti") {
                    return Err(syntax(line, "expected 'p smti'"));
                }
                let mut count = || -> Result<usize, InstanceError> {
                    head.next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| syntax(line, "bad agent count"))
                };
                let (nm, nw) = (count()?, count()?);
                if head.next().is_some() {
                    return Err(syntax(line, "trailing tokens"));
                }
                header = Some((nm, nw));
                men = vec![None; nm];
                women = vec![None; nw];
            }
            Some(tag @ ("m" | "w")) => {
                let (nm, nw) = header.ok_or_else(|| syntax(line, "agent line before header"))?;
                let (side, own, other) = if tag == "m" {
                    (Side::Man, nm, nw)
                } else {
                    (Side::Woman, nw, nm)
                };
                let (left, right) = content
                    .split_once(':')
                    .ok_or_else(|| syntax(line, "missing ':'"))?;
                let mut lt = left.split_whitespace().skip(1);
                let id: usize = lt
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line, "bad agent id"))?;
                if lt.next().is_some() {
                    return Err(syntax(line, "trailing tokens before ':'"));
                }
                if id == 0 || id > own {
                    return Err(InstanceError::UnknownAgent {
                        side: side.name(),
                        id,
                        line,
                    });
                }
                let groups = parse_entries(right, side.other(), other, line)?;
                let slot = if side == Side::Man {
                    &mut men[id - 1]
                } else {
                    &mut women[id - 1]
                };
                if slot.replace(groups).is_some() {
                    return Err(syntax(
                        line,
                        &format!("{} {} defined twice", side.name(), id),
                    ));
                }
            }
            _ => return Err(syntax(line, "unrecognised line")),
        }
    }
    if header.is_none() {
        return Err(InstanceError::Syntax("missing header".into()));
    }
    let fill =
        |v: Vec<Option<Vec<Vec<usize>>>>| v.into_iter().map(Option::unwrap_or_default).collect();
    Instance::from_groups(fill(men), fill(women))
}

fn parse_entries(
    text: &str,
    side: Side,
    count: usize,
    line: usize,
) -> Result<Vec<Vec<usize>>, InstanceError> {
    let spaced = text.replace('(', " ( ").replace(')', " ) ");
    let mut groups = Vec::new();
    let mut open: Option<Vec<usize>> = None;
    for tok in spaced.split_whitespace() {
        match tok {
            "(" => {
                if open.replace(Vec::new()).is_some() {
                    return Err(InstanceError::Syntax(format!(
                        "nested tie group at line {line}"
                    )));
                }
            }
            ")" => {
                let g = open.take().ok_or_else(|| {
                    InstanceError::Syntax(format!("unmatched ')' at line {line}"))
                })?;
                if g.is_empty() {
                    return Err(InstanceError::Syntax(format!(
                        "empty tie group at line {line}"
                    )));
                }
                groups.push(g);
            }
            _ => {
                let id: usize = tok.parse().map_err(|_| {
                    InstanceError::Syntax(format!("bad entry '{tok}' at line {line}"))
                })?;
                if id == 0 || id > count {
                    return Err(InstanceError::UnknownAgent {
                        side: side.name(),
                        id,
                        line,
                    });
                }
                match open.as_mut() {
                    Some(g) => g.push(id - 1),
                    None => groups.push(vec![id - 1]),
                }
            }
        }
    }
    if open.is_some() {
        return Err(InstanceError::Syntax(format!(
            "unclosed tie group at line {line}"
        )));
    }
    Ok(groups)
}

/// Writes an instance in the format read by [`parse_instance`]. Every agent gets a line.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("p smti {} {}\n", inst.num_men(), inst.num_women());
    for (side, tag, count) in [
        (Side::Man, 'm', inst.num_men()),
        (Side::Woman, 'w', inst.num_women()),
    ] {
        for a in 0..count {
            let _ = write!(out, "{tag} {} :", a + 1);
            for g in inst.groups(side, a) {
                if g.len() == 1 {
                    let _ = write!(out, " {}", g[0] + 1);
                } else {
                    let ids: Vec<String> = g.iter().map(|x| (x + 1).to_string()).collect();
                    let _ = write!(out, " ({})", ids.join(" "));
                }
            }
            out.push('\n');
        }
    }
    out
}
