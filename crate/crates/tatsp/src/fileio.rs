//! Plain-text file formats for instances and solutions.
//!
//! Instance format (`#` starts a comment, blank lines are ignored):
//!
//! ```text
//! TATSP 1
//! <node_count> <arc_count> <relation_count>
//! A <tail> <head> <cost>     # one line per arc; arc ids follow file order
//! R <trigger_arc> <target_arc> <cost>
//! ```
//!
//! Solution format: a line with the space-separated node sequence starting at
//! the depot, then `cost <value>`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{Arc, Instance, Relation, Tour};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Meaningful lines of the text with their 1-based line numbers: comments
/// stripped, blank lines skipped.
fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from {token:?}")))
}

/// Parses instance text. The instance name is left empty; callers that read
/// from disk usually set it to the file stem.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = meaningful_lines(text);

    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file, expected a TATSP header"))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["TATSP", "1"] {
        return Err(parse_err(line, format!("expected header \"TATSP 1\", got {header:?}")));
    }

    let (line, counts) = lines
        .next()
        .ok_or_else(|| parse_err(line, "missing counts line after the header"))?;
    let tokens: Vec<&str> = counts.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(parse_err(line, "counts line must hold node, arc and relation counts"));
    }
    let node_count: usize = parse_num(tokens[0], line, "node count")?;
    let arc_count: usize = parse_num(tokens[1], line, "arc count")?;
    let relation_count: usize = parse_num(tokens[2], line, "relation count")?;
    if node_count == 0 {
        return Err(parse_err(line, "node count must be positive"));
    }

    let mut arcs: Vec<Arc> = Vec::with_capacity(arc_count);
    let mut seen_arcs = std::collections::HashSet::with_capacity(arc_count);
    let mut last_line = line;
    for _ in 0..arc_count {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, format!("expected {arc_count} arc lines")))?;
        last_line = line;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 4 || tokens[0] != "A" {
            return Err(parse_err(line, "expected an arc line: A <tail> <head> <cost>"));
        }
        let tail: usize = parse_num(tokens[1], line, "arc tail")?;
        let head: usize = parse_num(tokens[2], line, "arc head")?;
        let cost: f64 = parse_num(tokens[3], line, "arc cost")?;
        if tail >= node_count || head >= node_count {
            return Err(parse_err(line, format!("unknown node id ({node_count} nodes)")));
        }
        if tail == head {
            return Err(parse_err(line, format!("self loop on node {tail}")));
        }
        if !cost.is_finite() || cost < 0.0 {
            return Err(parse_err(line, "arc cost must be finite and non-negative"));
        }
        if !seen_arcs.insert((tail, head)) {
            return Err(parse_err(line, format!("duplicate arc ({tail}, {head})")));
        }
        arcs.push(Arc { tail, head, base_cost: cost });
    }

    let mut relations: Vec<Relation> = Vec::with_capacity(relation_count);
    let mut seen_relations = std::collections::HashSet::with_capacity(relation_count);
    for _ in 0..relation_count {
        let (line, text) = lines.next().ok_or_else(|| {
            parse_err(last_line, format!("expected {relation_count} relation lines"))
        })?;
        last_line = line;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 4 || tokens[0] != "R" {
            return Err(parse_err(line, "expected a relation line: R <trigger> <target> <cost>"));
        }
        let trigger: usize = parse_num(tokens[1], line, "trigger arc index")?;
        let target: usize = parse_num(tokens[2], line, "target arc index")?;
        let cost: f64 = parse_num(tokens[3], line, "relation cost")?;
        if trigger >= arc_count || target >= arc_count {
            return Err(parse_err(
                line,
                format!("dangling relation reference ({arc_count} arcs)"),
            ));
        }
        if trigger == target {
            return Err(parse_err(line, "relation trigger and target must differ"));
        }
        if !cost.is_finite() || cost < 0.0 {
            return Err(parse_err(line, "relation cost must be finite and non-negative"));
        }
        if !seen_relations.insert((trigger, target)) {
            return Err(parse_err(line, format!("duplicate relation ({trigger}, {target})")));
        }
        relations.push(Relation { trigger, target, cost });
    }

    if let Some((line, text)) = lines.next() {
        return Err(parse_err(line, format!("unexpected trailing content: {text:?}")));
    }

    Instance::new("", node_count, arcs, relations)
}

/// Reads an instance file; the instance is named after the file stem.
pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut inst = parse_instance(&text)?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        inst.set_name(stem);
    }
    Ok(inst)
}

/// Serializes an instance in the text format. Costs are written with the
/// shortest representation that round-trips, so write/parse is lossless.
pub fn write_instance<W: Write>(inst: &Instance, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "TATSP 1")?;
    writeln!(w, "{} {} {}", inst.node_count(), inst.arcs().len(), inst.relations().len())?;
    for a in inst.arcs() {
        writeln!(w, "A {} {} {}", a.tail, a.head, a.base_cost)?;
    }
    for r in inst.relations() {
        writeln!(w, "R {} {} {}", r.trigger, r.target, r.cost)?;
    }
    Ok(())
}

pub fn instance_to_string(inst: &Instance) -> String {
    let mut buf = Vec::new();
    write_instance(inst, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("instance text is ASCII")
}

/// Writes a solution file: the node sequence, then the cost with six decimal
/// places (at least six significant digits for any tour cost >= 1).
pub fn write_solution<W: Write>(w: &mut W, tour: &Tour, cost: f64) -> std::io::Result<()> {
    writeln!(w, "{tour}")?;
    writeln!(w, "cost {cost:.6}")
}

/// Parses a solution file into the raw node sequence and the recorded cost.
/// The sequence is validated against an instance separately so that callers
/// can distinguish format errors from infeasibility.
pub fn parse_solution(text: &str) -> Result<(Vec<usize>, Option<f64>)> {
    let mut lines = meaningful_lines(text);
    let (line, seq) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty solution file"))?;
    let nodes = seq
        .split_whitespace()
        .map(|t| parse_num(t, line, "node id"))
        .collect::<Result<Vec<usize>>>()?;

    let mut cost = None;
    if let Some((line, text)) = lines.next() {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 2 || tokens[0] != "cost" {
            return Err(parse_err(line, "expected a cost line: cost <value>"));
        }
        cost = Some(parse_num(tokens[1], line, "cost")?);
        if let Some((line, text)) = lines.next() {
            return Err(parse_err(line, format!("unexpected trailing content: {text:?}")));
        }
    }
    Ok((nodes, cost))
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<(Vec<usize>, Option<f64>)> {
    parse_solution(&fs::read_to_string(path)?)
}
