//! Network and observation file formats.
//!
//! The network text format extends DIMACS max-flow files:
//!
//! ```text
//! c comment
//! p max <nodes> <arcs>
//! n <id> s
//! n <id> t
//! a <tail> <head> <capacity> [<safe>]
//! ```
//!
//! Node ids are 1-based; arcs are numbered 0, 1, ... in file order. The
//! optional flag is `1` for an arc that cannot be interdicted, `0` otherwise.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::FlowNetwork;
use crate::path::Scenario;

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

pub fn read_dimacs(text: &str) -> Result<FlowNetwork> {
    let mut header: Option<(usize, usize)> = None;
    let (mut source, mut sink) = (None, None);
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let mut tok = raw.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        let rest: Vec<&str> = tok.collect();
        match kind {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return parse_err(ln, "second problem line");
                }
                if rest.len() != 3 || rest[0] != "max" {
                    return parse_err(ln, "expected `p max <nodes> <arcs>`");
                }
                let n = parse_num(ln, rest[1])?;
                let m = parse_num(ln, rest[2])?;
                header = Some((n, m));
            }
            "n" => {
                let Some((n, _)) = header else {
                    return parse_err(ln, "node line before problem line");
                };
                if rest.len() != 2 {
                    return parse_err(ln, "expected `n <id> s|t`");
                }
                let id = node(ln, rest[0], n)?;
                let slot = match rest[1] {
                    "s" => &mut source,
                    "t" => &mut sink,
                    other => return parse_err(ln, format!("unknown terminal kind `{other}`")),
                };
                if slot.replace(id).is_some() {
                    return parse_err(ln, format!("terminal `{}` given twice", rest[1]));
                }
            }
            "a" => {
                let Some((n, _)) = header else {
                    return parse_err(ln, "arc line before problem line");
                };
                if rest.len() != 3 && rest.len() != 4 {
                    return parse_err(ln, "expected `a <tail> <head> <capacity> [<safe>]`");
                }
                let tail = node(ln, rest[0], n)?;
                let head = node(ln, rest[1], n)?;
                let cap: f64 = match rest[2].parse() {
                    Ok(c) => c,
                    Err(_) => return parse_err(ln, format!("bad capacity `{}`", rest[2])),
                };
                let safe = match rest.get(3) {
                    None | Some(&"0") => false,
                    Some(&"1") => true,
                    Some(other) => return parse_err(ln, format!("unknown arc flag `{other}`")),
                };
                arcs.push((ln, tail, head, cap, safe));
            }
            other => return parse_err(ln, format!("unknown line type `{other}`")),
        }
    }
    let Some((n, m)) = header else {
        return parse_err(0, "missing problem line");
    };
    if arcs.len() != m {
        return parse_err(0, format!("problem line announces {m} arcs, found {}", arcs.len()));
    }
    let Some(source) = source else { return parse_err(0, "missing source line") };
    let Some(sink) = sink else { return parse_err(0, "missing sink line") };
    let mut net = FlowNetwork::new(n, source, sink);
    for (ln, tail, head, cap, safe) in arcs {
        if !cap.is_finite() || cap < 0.0 {
            return parse_err(ln, format!("capacity {cap} is not a finite nonnegative number"));
        }
        net.add_arc(tail, head, cap, safe);
    }
    net.validate()?;
    Ok(net)
}

fn parse_num(line: usize, s: &str) -> Result<usize> {
    s.parse().or_else(|_| parse_err(line, format!("bad number `{s}`")))
}

fn node(line: usize, s: &str, n: usize) -> Result<usize> {
    let id = parse_num(line, s)?;
    if id == 0 || id > n {
        return parse_err(line, format!("node {id} outside 1..={n}"));
    }
    Ok(id - 1)
}

/// Capacities are written in shortest round-trip form, so reading the output
/// back gives the same network bit for bit.
pub fn write_dimacs(net: &FlowNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p max {} {}", net.node_count, net.arc_count());
    let _ = writeln!(out, "n {} s", net.source + 1);
    let _ = writeln!(out, "n {} t", net.sink + 1);
    for a in &net.arcs {
        let _ = write!(out, "a {} {} {}", a.tail + 1, a.head + 1, a.capacity);
        if a.safe {
            out.push_str(" 1");
        }
        out.push('\n');
    }
    out
}

pub fn read_json(text: &str) -> Result<FlowNetwork> {
    let net: FlowNetwork = serde_json::from_str(text)?;
    net.validate()?;
    Ok(net)
}

pub fn write_json(net: &FlowNetwork) -> String {
    serde_json::to_string_pretty(net).expect("networks always serialize")
}

/// One scenario per line as space-separated 0-based arc indices. Lines
/// starting with `#` are comments; `-` stands for the empty scenario.
pub fn read_observations(net: &FlowNetwork, text: &str) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let arcs: Vec<usize> = if line == "-" {
            Vec::new()
        } else {
            line.split_whitespace()
                .map(|t| parse_num(i + 1, t))
                .collect::<Result<_>>()?
        };
        match Scenario::new(net, arcs) {
            Ok(s) => out.push(s),
            Err(e) => return parse_err(i + 1, e.to_string()),
        }
    }
    Ok(out)
}

/// JSON form: an array of arc-index arrays.
pub fn read_observations_json(net: &FlowNetwork, text: &str) -> Result<Vec<Scenario>> {
    let raw: Vec<Vec<usize>> = serde_json::from_str(text)?;
    raw.into_iter().map(|arcs| Scenario::new(net, arcs)).collect()
}

pub fn write_observations(scenarios: &[Scenario]) -> String {
    let mut out = String::new();
    for s in scenarios {
        if s.is_empty() {
            out.push('-');
        } else {
            let parts: Vec<String> = s.arcs().iter().map(|e| e.to_string()).collect();
            out.push_str(&parts.join(" "));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "c two parallel arcs\np max 2 2\nn 1 s\nn 2 t\na 1 2 1\na 1 2 1.5 1\n";

    #[test]
    fn reads_dimacs() {
        let net = read_dimacs(TWO).unwrap();
        assert_eq!(net.node_count, 2);
        assert_eq!(net.arc_count(), 2);
        assert!(!net.arcs[0].safe && net.arcs[1].safe);
        assert_eq!(net.arcs[1].capacity, 1.5);
    }

    #[test]
    fn round_trips() {
        let mut net = FlowNetwork::new(3, 0, 2);
        net.add_arc(0, 1, 0.1 + 0.2, false);
        net.add_arc(1, 2, 1e-300, true);
        net.add_arc(0, 2, 123456.789, false);
        assert_eq!(read_dimacs(&write_dimacs(&net)).unwrap(), net);
        assert_eq!(read_json(&write_json(&net)).unwrap(), net);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = "p max 2 1\nn 1 s\nn 2 t\na 1 3 1\n";
        match read_dimacs(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(read_dimacs("p max 2 2\nn 1 s\nn 2 t\na 1 2 1\n").is_err());
        assert!(read_dimacs("p max 2 1\nn 1 s\nn 2 t\na 1 2 x\n").is_err());
    }

    #[test]
    fn observations() {
        let net = read_dimacs(TWO).unwrap();
        let obs = read_observations(&net, "# day 1\n0\n-\n\n").unwrap();
        assert_eq!(obs.len(), 2);
        assert!(obs[1].is_empty());
        assert_eq!(read_observations(&net, &write_observations(&obs)).unwrap(), obs);
        assert!(read_observations(&net, "1\n").is_err(), "arc 1 is safe");
        assert_eq!(read_observations_json(&net, "[[0], []]").unwrap(), obs);
    }
}
