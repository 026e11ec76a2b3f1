//! Conjunctive row filters: `column op value` clauses joined by commas.
//!
//! Operators are `=`, `!=`, `<`, `<=`, `>`, `>=`. Values that parse as
//! numbers on both sides compare numerically; anything else compares as
//! case-insensitive text and supports only `=` and `!=`.

use std::collections::BTreeMap;

use anyhow::Result;

use crate::usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
struct Clause {
    column: String,
    op: Op,
    value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    text: String,
    clauses: Vec<Clause>,
}

fn parse_clause(raw: &str) -> Result<Clause> {
    let at = raw
        .find(['=', '!', '<', '>'])
        .ok_or_else(|| usage(format!("filter clause `{raw}` has no operator")))?;
    let rest = &raw[at..];
    let (op, len) = match rest.as_bytes() {
        [b'!', b'=', ..] => (Op::Ne, 2),
        [b'<', b'=', ..] => (Op::Le, 2),
        [b'>', b'=', ..] => (Op::Ge, 2),
        [b'=', ..] => (Op::Eq, 1),
        [b'<', ..] => (Op::Lt, 1),
        [b'>', ..] => (Op::Gt, 1),
        _ => return Err(usage(format!("filter clause `{raw}` has a malformed operator"))),
    };
    let column = raw[..at].trim();
    let value = rest[len..].trim();
    if column.is_empty() {
        return Err(usage(format!("filter clause `{raw}` names no column")));
    }
    if value.contains(['=', '<', '>']) {
        return Err(usage(format!("filter clause `{raw}` has more than one operator")));
    }
    Ok(Clause {
        column: column.to_string(),
        op,
        value: value.to_string(),
    })
}

impl Filter {
    pub fn parse(text: &str) -> Result<Self> {
        let clauses = text
            .split(',')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(parse_clause)
            .collect::<Result<Vec<_>>>()?;
        if clauses.is_empty() {
            return Err(usage(format!("filter `{text}` has no clauses")));
        }
        Ok(Self {
            text: text.to_string(),
            clauses,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Rejects clauses naming columns outside `columns`.
    pub fn check_columns<'a>(&self, columns: impl IntoIterator<Item = &'a String> + Clone) -> Result<()> {
        for c in &self.clauses {
            if !columns.clone().into_iter().any(|k| *k == c.column) {
                let known: Vec<&str> = columns.into_iter().map(String::as_str).collect();
                return Err(usage(format!(
                    "filter `{}`: unknown column `{}` (available: {})",
                    self.text,
                    c.column,
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn matches(&self, row: &BTreeMap<String, String>) -> Result<bool> {
        for c in &self.clauses {
            // quartile filters may name the band (top/bottom) instead of the label
            let column = if c.column == "imbalance_quartile"
                && matches!(c.value.to_ascii_lowercase().as_str(), "top" | "bottom")
            {
                "imbalance_band"
            } else {
                c.column.as_str()
            };
            let cell = row.get(column).map(String::as_str).unwrap_or("");
            if !c.eval(cell)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Clause {
    fn eval(&self, cell: &str) -> Result<bool> {
        if let (Ok(a), Ok(b)) = (cell.trim().parse::<f64>(), self.value.parse::<f64>()) {
            return Ok(match self.op {
                Op::Eq => a == b,
                Op::Ne => a != b,
                Op::Lt => a < b,
                Op::Le => a <= b,
                Op::Gt => a > b,
                Op::Ge => a >= b,
            });
        }
        let equal = cell.trim().eq_ignore_ascii_case(&self.value);
        match self.op {
            Op::Eq => Ok(equal),
            Op::Ne => Ok(!equal),
            _ if cell.trim().is_empty() => Ok(false),
            _ => Err(usage(format!(
                "`{}`: cannot order non-numeric value `{cell}`",
                self.column
            ))),
        }
    }
}
