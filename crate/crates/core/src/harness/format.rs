//! Line-oriented market files.
//!
//! ```text
//! # leading comments are kept
//! market n=3 p=2
//! agent 1 importance 1>2
//! parents 2: 1
//! cpt 1: 2>1>3
//! cpt 2 [1=1]: 3>1>2
//! cpt 2 [1=2]: 1>2>3
//! cpt 2 [1=3]: 2>3>1
//! explicit 2: (1,3) > (3,3) > others
//! alloc 1: (2,1)
//! ```
//!
//! Agents, types and owners are 1-based. A type without a `parents` line has
//! none. `alloc` lines are optional but must cover every agent if present.

use std::fmt::Write as _;

use thiserror::Error;

use crate::market::{Allocation, Bundle, Market};
use crate::preference::{CpNet, ExplicitPreference, ImportanceOrder, LexPreference, Preference, Profile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketFile {
    /// Comment lines before the header, without the leading `#`.
    pub comments: Vec<String>,
    pub market: Market,
    pub profile: Profile,
    pub allocation: Option<Allocation>,
}

impl MarketFile {
    pub fn new(market: Market, profile: Profile) -> Self {
        MarketFile {
            comments: Vec::new(),
            market,
            profile,
            allocation: None,
        }
    }

    pub fn with_allocation(mut self, allocation: Allocation) -> Self {
        self.allocation = Some(allocation);
        self
    }

    pub fn with_comments(mut self, comments: impl IntoIterator<Item = String>) -> Self {
        self.comments.extend(comments);
        self
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            if c.is_empty() {
                s.push_str("#\n");
            } else {
                let _ = writeln!(s, "# {c}");
            }
        }
        let (n, p) = (self.market.agents(), self.market.types());
        let _ = writeln!(s, "market n={n} p={p}");
        for (j, pref) in self.profile.prefs().iter().enumerate() {
            s.push('\n');
            match pref {
                Preference::Lex(lex) => write_lex(&mut s, j, lex),
                Preference::Explicit(ex) => {
                    let mut parts: Vec<String> = ex.ranked().iter().map(tuple).collect();
                    parts.push("others".into());
                    let _ = writeln!(s, "explicit {}: {}", j + 1, parts.join(" > "));
                }
            }
        }
        if let Some(a) = &self.allocation {
            s.push('\n');
            for (j, b) in a.bundles().iter().enumerate() {
                let _ = writeln!(s, "alloc {}: {}", j + 1, tuple(b));
            }
        }
        s
    }
}

fn tuple(b: &Bundle) -> String {
    let xs: Vec<String> = b.owners().iter().map(|o| (o + 1).to_string()).collect();
    format!("({})", xs.join(","))
}

fn chain(xs: &[usize]) -> String {
    xs.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(">")
}

fn write_lex(s: &mut String, j: usize, lex: &LexPreference) {
    let net = lex.cpnet();
    let _ = writeln!(s, "agent {} importance {}", j + 1, chain(lex.importance().types()));
    for t in 0..net.types() {
        if !net.parents(t).is_empty() {
            let ps: Vec<String> = net.parents(t).iter().map(|q| (q + 1).to_string()).collect();
            let _ = writeln!(s, "parents {}: {}", t + 1, ps.join(","));
        }
    }
    for t in 0..net.types() {
        for row in 0..net.table(t).len() {
            let assign = net.row_assignment(t, row);
            if assign.is_empty() {
                let _ = writeln!(s, "cpt {}: {}", t + 1, chain(net.order(t, row)));
            } else {
                let a: Vec<String> = assign.iter().map(|(q, o)| format!("{}={}", q + 1, o + 1)).collect();
                let _ = writeln!(s, "cpt {} [{}]: {}", t + 1, a.join(","), chain(net.order(t, row)));
            }
        }
    }
}

fn index(tok: &str, bound: usize, what: &str, line: usize) -> Result<usize, FormatError> {
    match tok.trim().parse::<usize>() {
        Ok(v) if (1..=bound).contains(&v) => Ok(v - 1),
        _ => err(line, format!("bad {what} `{}` (expected 1..={bound})", tok.trim())),
    }
}

fn parse_chain(text: &str, bound: usize, what: &str, line: usize) -> Result<Vec<usize>, FormatError> {
    text.split('>').map(|t| index(t, bound, what, line)).collect()
}

fn parse_tuple(text: &str, n: usize, p: usize, line: usize) -> Result<Bundle, FormatError> {
    let t = text.trim();
    let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return err(line, format!("expected a bundle like (1,2), got `{t}`"));
    };
    let owners = inner
        .split(',')
        .map(|x| index(x, n, "owner", line))
        .collect::<Result<Vec<_>, _>>()?;
    if owners.len() != p {
        return err(line, format!("bundle {t} has {} items, expected {p}", owners.len()));
    }
    Ok(Bundle::new(owners))
}

/// A `cpt` row: parent assignment, owner order and source line.
type RowDraft = (Vec<(usize, usize)>, Vec<usize>, usize);

struct LexDraft {
    line: usize,
    importance: Vec<usize>,
    parents: Vec<Option<Vec<usize>>>,
    rows: Vec<Vec<RowDraft>>,
}

enum Draft {
    Lex(LexDraft),
    Explicit(Preference),
}

/// Parses a market file.
pub fn parse_market(text: &str) -> Result<MarketFile, FormatError> {
    let mut comments = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut drafts: Vec<Option<Draft>> = Vec::new();
    let mut current: Option<usize> = None;
    let mut alloc: Vec<Option<Bundle>> = Vec::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let trimmed = raw.trim();
        if header.is_none() {
            if let Some(c) = trimmed.strip_prefix('#') {
                comments.push(c.strip_prefix(' ').unwrap_or(c).trim_end().to_string());
                continue;
            }
        }
        let body = trimmed.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (keyword, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let Some((n, p)) = header else {
            if keyword != "market" {
                return err(line, "expected `market n=<agents> p=<types>` header");
            }
            let mut n = None;
            let mut p = None;
            for f in rest.split_whitespace() {
                match f.split_once('=') {
                    Some(("n", v)) => n = v.parse::<usize>().ok(),
                    Some(("p", v)) => p = v.parse::<usize>().ok(),
                    _ => return err(line, format!("unexpected header field `{f}`")),
                }
            }
            let (Some(n), Some(p)) = (n, p) else {
                return err(line, "header needs n=<agents> and p=<types>");
            };
            if n == 0 || p == 0 {
                return err(line, "a market needs at least one agent and one type");
            }
            header = Some((n, p));
            drafts = (0..n).map(|_| None).collect();
            alloc = vec![None; n];
            continue;
        };
        match keyword {
            "market" => return err(line, "duplicate header"),
            "agent" => {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.len() != 3 || f[1] != "importance" {
                    return err(line, "expected `agent <j> importance <t>><t>...`");
                }
                let j = index(f[0], n, "agent", line)?;
                if drafts[j].is_some() {
                    return err(line, format!("agent {} defined twice", j + 1));
                }
                let importance = parse_chain(f[2], p, "type", line)?;
                drafts[j] = Some(Draft::Lex(LexDraft {
                    line,
                    importance,
                    parents: vec![None; p],
                    rows: vec![Vec::new(); p],
                }));
                current = Some(j);
            }
            "parents" | "cpt" => {
                let Some(Draft::Lex(d)) = current.and_then(|j| drafts[j].as_mut()) else {
                    return err(line, format!("`{keyword}` outside an `agent` block"));
                };
                let Some((lhs, rhs)) = rest.split_once(':') else {
                    return err(line, format!("expected `:` in `{keyword}` line"));
                };
                if keyword == "parents" {
                    let t = index(lhs, p, "type", line)?;
                    if d.parents[t].is_some() {
                        return err(line, format!("parents of type {} given twice", t + 1));
                    }
                    let rhs = rhs.trim();
                    d.parents[t] = Some(if rhs == "-" {
                        Vec::new()
                    } else {
                        rhs.split(',').map(|x| index(x, p, "type", line)).collect::<Result<_, _>>()?
                    });
                } else {
                    let lhs = lhs.trim();
                    let (ty, assign) = match lhs.split_once('[') {
                        Some((ty, a)) => {
                            let Some(a) = a.trim().strip_suffix(']') else {
                                return err(line, "unterminated `[`");
                            };
                            let pairs = a
                                .split(',')
                                .map(|kv| {
                                    let Some((q, o)) = kv.split_once('=') else {
                                        return err(line, format!("expected <type>=<owner>, got `{kv}`"));
                                    };
                                    Ok((index(q, p, "type", line)?, index(o, n, "owner", line)?))
                                })
                                .collect::<Result<Vec<_>, _>>()?;
                            (ty, pairs)
                        }
                        None => (lhs, Vec::new()),
                    };
                    let t = index(ty, p, "type", line)?;
                    let order = parse_chain(rhs, n, "owner", line)?;
                    d.rows[t].push((assign, order, line));
                }
            }
            "explicit" => {
                let Some((lhs, rhs)) = rest.split_once(':') else {
                    return err(line, "expected `explicit <j>: ...`");
                };
                let j = index(lhs, n, "agent", line)?;
                if drafts[j].is_some() {
                    return err(line, format!("agent {} defined twice", j + 1));
                }
                let mut parts: Vec<&str> = rhs.split('>').map(str::trim).collect();
                if parts.last() != Some(&"others") {
                    return err(line, "explicit list must end with `> others`");
                }
                parts.pop();
                let ranked = parts
                    .iter()
                    .filter(|x| !x.is_empty())
                    .map(|x| parse_tuple(x, n, p, line))
                    .collect::<Result<Vec<_>, _>>()?;
                let market = Market::new(n, p).expect("checked nonempty");
                let ex = ExplicitPreference::new(&market, ranked).or_else(|e| err(line, e.to_string()))?;
                drafts[j] = Some(Draft::Explicit(ex.into()));
                current = None;
            }
            "alloc" => {
                let Some((lhs, rhs)) = rest.split_once(':') else {
                    return err(line, "expected `alloc <j>: (...)`");
                };
                let j = index(lhs, n, "agent", line)?;
                if alloc[j].is_some() {
                    return err(line, format!("allocation of agent {} given twice", j + 1));
                }
                alloc[j] = Some(parse_tuple(rhs, n, p, line)?);
                current = None;
            }
            other => return err(line, format!("unknown keyword `{other}`")),
        }
    }
    let Some((n, p)) = header else {
        return err(last_line.max(1), "missing `market` header");
    };
    let market = Market::new(n, p).expect("checked nonempty");
    let mut prefs = Vec::with_capacity(n);
    for (j, d) in drafts.into_iter().enumerate() {
        match d {
            None => return err(last_line, format!("agent {} has no preference", j + 1)),
            Some(Draft::Explicit(pref)) => prefs.push(pref),
            Some(Draft::Lex(d)) => prefs.push(finish_lex(d, n, p)?.into()),
        }
    }
    let profile = Profile::new(&market, prefs).or_else(|e| err(last_line, e.to_string()))?;
    let allocation = if alloc.iter().all(Option::is_none) {
        None
    } else {
        if let Some(j) = alloc.iter().position(Option::is_none) {
            return err(last_line, format!("allocation misses agent {}", j + 1));
        }
        let a = Allocation::new(alloc.into_iter().map(|b| b.expect("checked")).collect());
        a.validate(&market).or_else(|e| err(last_line, e.to_string()))?;
        Some(a)
    };
    Ok(MarketFile {
        comments,
        market,
        profile,
        allocation,
    })
}

fn finish_lex(d: LexDraft, n: usize, p: usize) -> Result<LexPreference, FormatError> {
    let line = d.line;
    let importance = ImportanceOrder::new(d.importance).or_else(|e| err(line, e.to_string()))?;
    let parents: Vec<Vec<usize>> = d.parents.into_iter().map(Option::unwrap_or_default).collect();
    let mut tables = Vec::with_capacity(p);
    for (t, given) in d.rows.into_iter().enumerate() {
        let pa = &parents[t];
        let count = n.pow(pa.len() as u32);
        let mut table: Vec<Option<Vec<usize>>> = vec![None; count];
        for (assign, order, l) in given {
            let keys: Vec<usize> = assign.iter().map(|&(q, _)| q).collect();
            if &keys != pa {
                return err(l, format!("row for type {} must assign its parents {}", t + 1, chain_list(pa)));
            }
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return err(l, format!("row for type {} must rank each of the {n} owners once", t + 1));
            }
            let row = assign.iter().fold(0, |acc, &(_, o)| acc * n + o);
            if table[row].is_some() {
                return err(l, format!("duplicate row for type {}", t + 1));
            }
            table[row] = Some(order);
        }
        if table.iter().any(Option::is_none) {
            return err(line, format!("type {} needs {count} table rows", t + 1));
        }
        tables.push(table.into_iter().map(|r| r.expect("checked")).collect());
    }
    let net = CpNet::new(n, parents, tables).or_else(|e| err(line, e.to_string()))?;
    LexPreference::new(importance, net).or_else(|e| err(line, e.to_string()))
}

fn chain_list(xs: &[usize]) -> String {
    if xs.is_empty() {
        "(none)".into()
    } else {
        xs.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")
    }
}
