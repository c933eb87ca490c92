//! Text formats.
//!
//! Colored CNF is line based:
//!
//! ```text
//! # comment
//! p ccnf <nvars> <nclauses> <ncolors> <k>
//! d <color> <t>            t is an integer or num/den
//! <color> <lit> ... <lit> 0
//! ```
//!
//! Colors and variables are 1-based, literals use DIMACS signs. Set systems are
//! JSON documents with `elements`, `colors` (1-based, one per element), `sets`
//! (0-based element indices), `demands` (rational strings), `k` and optionally
//! `kstar`. Matroid files are JSON documents tagged by `type`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Clause, CnfInstance, CoverageInstance, Literal};
use crate::matroid::{MatroidOracle, MatroidSpec};
use crate::rational::{format_rational, parse_rational, Rational};

fn at(line: usize, column: usize, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("line {line}, column {column}: {msg}"))
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn number<T: std::str::FromStr>(line: usize, (col, tok): (usize, &str), what: &str) -> Result<T> {
    tok.parse().map_err(|_| at(line, col, format!("expected {what}, found `{tok}`")))
}

struct Header {
    vars: usize,
    clauses: usize,
    colors: usize,
    k: usize,
}

pub fn parse_colored_cnf(text: &str) -> Result<CnfInstance> {
    let mut header: Option<Header> = None;
    let mut demands: Vec<Option<Rational>> = Vec::new();
    let mut clauses = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        last_line = ln;
        let toks = tokens(raw);
        let Some(&(col, first)) = toks.first() else { continue };
        if first.starts_with('#') {
            continue;
        }
        if first == "p" {
            if header.is_some() {
                return Err(at(ln, col, "second header line"));
            }
            if toks.len() != 6 || toks[1].1 != "ccnf" {
                return Err(at(ln, col, "header must read `p ccnf <nvars> <nclauses> <ncolors> <k>`"));
            }
            let h = Header {
                vars: number(ln, toks[2], "variable count")?,
                clauses: number(ln, toks[3], "clause count")?,
                colors: number(ln, toks[4], "color count")?,
                k: number(ln, toks[5], "budget")?,
            };
            demands = vec![None; h.colors];
            header = Some(h);
            continue;
        }
        let Some(h) = &header else {
            return Err(at(ln, col, "content before the `p ccnf` header"));
        };
        let color_of = |tok: (usize, &str)| -> Result<usize> {
            let c: usize = number(ln, tok, "color")?;
            if c == 0 || c > h.colors {
                return Err(at(ln, tok.0, format!("color {c} outside 1..={}", h.colors)));
            }
            Ok(c - 1)
        };
        if first == "d" {
            if toks.len() != 3 {
                return Err(at(ln, col, "demand line must read `d <color> <t>`"));
            }
            let j = color_of(toks[1])?;
            let t = parse_rational(toks[2].1).map_err(|e| at(ln, toks[2].0, e))?;
            if demands[j].replace(t).is_some() {
                return Err(at(ln, col, format!("second demand for color {}", j + 1)));
            }
            continue;
        }
        let j = color_of(toks[0])?;
        let Some(&(end_col, end)) = toks.last().filter(|_| toks.len() >= 2) else {
            return Err(at(ln, col, "clause must end with 0"));
        };
        if end != "0" {
            return Err(at(ln, end_col, "clause must end with 0"));
        }
        let mut literals: Vec<Literal> = Vec::new();
        for &(c, tok) in &toks[1..toks.len() - 1] {
            let lit: i64 = number(ln, (c, tok), "literal")?;
            if lit == 0 {
                return Err(at(ln, c, "literal 0 inside clause body"));
            }
            let l = Literal::from_dimacs(lit).expect("nonzero literal");
            if l.var >= h.vars {
                return Err(at(ln, c, format!("variable {} beyond {}", l.var + 1, h.vars)));
            }
            if literals.iter().any(|x| x.var == l.var && x.positive != l.positive) {
                return Err(at(ln, c, format!("tautological clause: variable {} appears with both signs", l.var + 1)));
            }
            literals.push(l);
        }
        clauses.push(Clause { color: j, literals });
    }
    let Some(h) = header else {
        return Err(at(last_line.max(1), 1, "missing `p ccnf` header"));
    };
    if clauses.len() != h.clauses {
        return Err(at(last_line.max(1), 1, format!("header declares {} clauses, found {}", h.clauses, clauses.len())));
    }
    let demands = demands
        .into_iter()
        .enumerate()
        .map(|(j, t)| t.ok_or_else(|| Error::Input(format!("missing demand line for color {}", j + 1))))
        .collect::<Result<Vec<_>>>()?;
    CnfInstance::new(h.vars, clauses, demands, h.k)
}

pub fn write_colored_cnf(phi: &CnfInstance) -> String {
    let mut out =
        format!("p ccnf {} {} {} {}\n", phi.num_vars(), phi.clauses().len(), phi.num_colors(), phi.budget());
    for (j, t) in phi.demands().iter().enumerate() {
        out.push_str(&format!("d {} {}\n", j + 1, format_rational(t)));
    }
    for c in phi.clauses() {
        out.push_str(&(c.color + 1).to_string());
        for l in &c.literals {
            out.push_str(&format!(" {}", l.to_dimacs()));
        }
        out.push_str(" 0\n");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum RationalText {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetSystemDoc {
    elements: usize,
    colors: Vec<usize>,
    sets: Vec<Vec<usize>>,
    demands: Vec<RationalText>,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kstar: Option<usize>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_set_system(text: &str) -> Result<CoverageInstance> {
    let doc: SetSystemDoc = serde_json::from_str(text).map_err(json_error)?;
    if doc.colors.len() != doc.elements {
        return Err(Error::Input(format!("{} elements declared but {} colors given", doc.elements, doc.colors.len())));
    }
    let r = doc.demands.len();
    let colors = doc
        .colors
        .iter()
        .enumerate()
        .map(|(e, &c)| {
            if c == 0 || c > r {
                Err(Error::Input(format!("element {e} has color {c} outside 1..={r}")))
            } else {
                Ok(c - 1)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let demands = doc
        .demands
        .iter()
        .map(|t| match t {
            RationalText::Int(n) => Ok(Rational::from_integer(*n)),
            RationalText::Text(s) => parse_rational(s),
        })
        .collect::<Result<Vec<_>>>()?;
    CoverageInstance::new(doc.sets, colors, demands, doc.k, doc.kstar)
}

/// Serializes every set (live or not) with its current adjacency.
pub fn write_set_system(inst: &CoverageInstance) -> String {
    let doc = SetSystemDoc {
        elements: inst.num_elements(),
        colors: inst.colors().iter().map(|c| c.map_or(0, |j| j + 1)).collect(),
        sets: (0..inst.num_sets()).map(|v| inst.neighbors(v).to_vec()).collect(),
        demands: inst.demands().iter().map(|t| RationalText::Text(format_rational(t))).collect(),
        k: inst.budget(),
        kstar: (inst.original_budget() != inst.budget()).then_some(inst.original_budget()),
    };
    serde_json::to_string_pretty(&doc).expect("set system serializes") + "\n"
}

pub fn parse_matroid_spec(text: &str) -> Result<MatroidSpec> {
    serde_json::from_str(text).map_err(json_error)
}

/// Parses a matroid document and builds it over `ground_size` sets.
pub fn parse_matroid(text: &str, ground_size: usize) -> Result<MatroidOracle> {
    parse_matroid_spec(text)?.build(ground_size)
}
