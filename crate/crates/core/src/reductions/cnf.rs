use std::cmp::Ordering;
use std::fmt;

use super::ReductionError;

/// A literal over variable `var` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub const fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub const fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn satisfied_by(self, valuation: &[bool]) -> bool {
        valuation[self.var] == self.positive
    }

    /// DIMACS form: `3` or `-3`.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var + 1)
        } else {
            write!(f, "~x{}", self.var + 1)
        }
    }
}

/// A formula in 3-CNF. Every variable occurs in some clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, ReductionError> {
        if clauses.is_empty() {
            return Err(ReductionError::NoClauses);
        }
        let mut used = vec![false; num_vars];
        for (j, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var >= num_vars {
                    return Err(ReductionError::VariableOutOfRange {
                        clause: j + 1,
                        var: lit.var + 1,
                        num_vars,
                    });
                }
                used[lit.var] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(ReductionError::UnusedVariable { var: v + 1 });
        }
        Ok(Cnf3 { num_vars, clauses })
    }

    /// Builds a formula from DIMACS-style signed literals.
    pub fn from_signed(num_vars: usize, clauses: &[[i64; 3]]) -> Result<Self, ReductionError> {
        let clauses = clauses
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let mut out = [Literal::pos(0); 3];
                for (k, &l) in c.iter().enumerate() {
                    out[k] = signed_literal(l).ok_or(ReductionError::VariableOutOfRange {
                        clause: j + 1,
                        var: 0,
                        num_vars,
                    })?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Cnf3::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Clauses (zero-based, ascending) that mention `var` with either sign.
    pub fn occurrences(&self, var: usize) -> Vec<usize> {
        (0..self.clauses.len())
            .filter(|&j| self.clauses[j].iter().any(|l| l.var == var))
            .collect()
    }

    pub fn contains(&self, clause: usize, lit: Literal) -> bool {
        self.clauses[clause].contains(&lit)
    }

    pub fn satisfies(&self, valuation: &[bool]) -> bool {
        valuation.len() == self.num_vars
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|l| l.satisfied_by(valuation)))
    }

    /// Every satisfying valuation, best first under the order that prefers
    /// `true` at the lowest differing variable.
    pub fn satisfying_valuations(&self) -> Vec<Vec<bool>> {
        let m = self.num_vars;
        assert!(m < 32, "brute force over {m} variables");
        (0..1u64 << m)
            .rev()
            .map(|bits| (0..m).map(|i| bits >> (m - 1 - i) & 1 == 1).collect::<Vec<bool>>())
            .filter(|v| self.satisfies(v))
            .collect()
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.satisfying_valuations().is_empty()
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{} ", l.to_dimacs()));
            }
            s.push_str("0\n");
        }
        s
    }
}

impl fmt::Display for Cnf3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| format!("({} | {} | {})", c[0], c[1], c[2]))
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

fn signed_literal(l: i64) -> Option<Literal> {
    match l {
        0 => None,
        l if l > 0 => Some(Literal::pos(l as usize - 1)),
        l => Some(Literal::neg((-l) as usize - 1)),
    }
}

/// Parses DIMACS CNF in which every clause has exactly three literals.
pub fn parse_dimacs(text: &str) -> Result<Cnf3, ReductionError> {
    let err = |line: usize, msg: String| ReductionError::Dimacs { line, msg };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<(i64, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let f: Vec<&str> = t.split_whitespace().collect();
            if header.is_some() {
                return Err(err(line, "duplicate header".into()));
            }
            if f.len() != 4 || f[1] != "cnf" {
                return Err(err(line, "expected `p cnf <vars> <clauses>`".into()));
            }
            let m = f[2].parse().map_err(|_| err(line, format!("bad variable count `{}`", f[2])))?;
            let n = f[3].parse().map_err(|_| err(line, format!("bad clause count `{}`", f[3])))?;
            header = Some((m, n, line));
            continue;
        }
        let Some((m, _, _)) = header else {
            return Err(err(line, "clause before header".into()));
        };
        for tok in t.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| err(line, format!("bad literal `{tok}`")))?;
            if l == 0 {
                if current.len() != 3 {
                    return Err(ReductionError::Arity {
                        line,
                        got: current.len(),
                    });
                }
                let mut c = [Literal::pos(0); 3];
                for (i, &(v, _)) in current.iter().enumerate() {
                    c[i] = signed_literal(v).expect("nonzero");
                }
                clauses.push(c);
                current.clear();
            } else {
                if l.unsigned_abs() as usize > m {
                    return Err(err(line, format!("literal {l} exceeds {m} variables")));
                }
                current.push((l, line));
            }
        }
    }
    let Some((m, n, hline)) = header else {
        return Err(err(0, "missing `p cnf` header".into()));
    };
    if let Some(&(_, line)) = current.first() {
        return Err(err(line, "clause not terminated by 0".into()));
    }
    if clauses.len() != n {
        return Err(err(hline, format!("header declares {n} clauses, found {}", clauses.len())));
    }
    Cnf3::new(m, clauses)
}

/// The literal ranking used to order literals within a clause: positive
/// literals first, then negative ones, each block by variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiteralOrderW {
    num_vars: usize,
}

impl LiteralOrderW {
    pub fn new(num_vars: usize) -> Self {
        LiteralOrderW { num_vars }
    }

    /// Position in the ranking, best first.
    pub fn rank(&self, lit: Literal) -> usize {
        if lit.positive {
            lit.var
        } else {
            self.num_vars + lit.var
        }
    }

    /// `Greater` iff `a` ranks above `b`.
    pub fn compare(&self, a: Literal, b: Literal) -> Ordering {
        self.rank(b).cmp(&self.rank(a))
    }

    pub fn ranking(&self) -> Vec<Literal> {
        (0..self.num_vars)
            .map(Literal::pos)
            .chain((0..self.num_vars).map(Literal::neg))
            .collect()
    }

    /// The distinct literals of `clause`, best first.
    pub fn sort_clause(&self, clause: &[Literal; 3]) -> Vec<Literal> {
        let mut v = clause.to_vec();
        v.sort_by_key(|&l| self.rank(l));
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_clause_formula() {
        let f = parse_dimacs("c sample\np cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(
            f.clauses(),
            &[
                [Literal::pos(0), Literal::pos(1), Literal::pos(2)],
                [Literal::neg(0), Literal::neg(1), Literal::neg(2)]
            ]
        );
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
        assert_eq!(f.to_string(), "(x1 | x2 | x3) & (~x1 | ~x2 | ~x3)");
    }

    #[test]
    fn clause_may_span_lines() {
        let f = parse_dimacs("p cnf 3 1\n1 2\n3 0\n").unwrap();
        assert_eq!(f.clauses().len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_dimacs("p cnf 3 0\n"), Err(ReductionError::NoClauses)));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2 0\n"), Err(ReductionError::Arity { line: 2, got: 2 })));
        assert!(matches!(parse_dimacs("1 2 3 0\n"), Err(ReductionError::Dimacs { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 3 1\n1 2 4 0\n"), Err(ReductionError::Dimacs { line: 2, .. })));
        assert!(matches!(parse_dimacs("p cnf 3 1\n1 2 x 0\n"), Err(ReductionError::Dimacs { line: 2, .. })));
        assert!(matches!(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), Err(ReductionError::Dimacs { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 3 1\n1 2 3\n"), Err(ReductionError::Dimacs { line: 2, .. })));
        assert!(matches!(parse_dimacs("p cnf 4 1\n1 2 3 0\n"), Err(ReductionError::UnusedVariable { var: 4 })));
    }

    #[test]
    fn w_order() {
        let w = LiteralOrderW::new(3);
        let names: Vec<String> = w.ranking().iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["x1", "x2", "x3", "~x1", "~x2", "~x3"]);
        assert_eq!(w.compare(Literal::pos(2), Literal::neg(0)), Ordering::Greater);
        assert_eq!(
            w.sort_clause(&[Literal::neg(0), Literal::pos(2), Literal::neg(0)]),
            vec![Literal::pos(2), Literal::neg(0)]
        );
    }

    #[test]
    fn valuations_in_preference_order() {
        let f = Cnf3::from_signed(3, &[[1, 2, 3], [-1, -2, -3]]).unwrap();
        let vals = f.satisfying_valuations();
        assert_eq!(vals.len(), 6);
        assert_eq!(vals[0], vec![true, true, false]);
        assert_eq!(vals[1], vec![true, false, true]);
        assert!(!f.satisfies(&[true, true, true]));
        let unsat = Cnf3::from_signed(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
        assert!(!unsat.is_satisfiable());
    }
}
