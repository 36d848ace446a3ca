use crate::market::Bundle;
use crate::preference::Preference;

/// Lexicographic acceptance: walk `order`; a type may keep the reference
/// owner or move to one marked `better`, after which the rest is free.
#[derive(Debug, Clone)]
struct LexPart {
    order: Vec<usize>,
    better: Vec<Vec<bool>>,
}

/// The set of bundles an agent weakly prefers to her reference bundle.
#[derive(Debug, Clone)]
pub(crate) struct AgentModel {
    reference: Vec<usize>,
    lex: Option<LexPart>,
    /// Listed bundles in the set; the first `strict_listed` are strict.
    listed: Vec<Vec<usize>>,
    strict_listed: usize,
}

impl AgentModel {
    pub(crate) fn new(pref: &Preference, reference: &Bundle, n: usize) -> Self {
        let r = reference.owners().to_vec();
        let p = r.len();
        match pref {
            Preference::Lex(lex) => {
                let net = lex.cpnet();
                let better = (0..p)
                    .map(|t| {
                        let row = net.row_index(t, |q| r[q]);
                        let mine = net.rank(t, row, r[t]);
                        (0..n).map(|o| net.rank(t, row, o) < mine).collect()
                    })
                    .collect();
                AgentModel {
                    reference: r,
                    lex: Some(LexPart {
                        order: lex.importance().types().to_vec(),
                        better,
                    }),
                    listed: Vec::new(),
                    strict_listed: 0,
                }
            }
            Preference::Explicit(ex) => match ex.rank_of(reference) {
                Some(rank) => AgentModel {
                    reference: r,
                    lex: None,
                    listed: ex.ranked()[..=rank].iter().map(|b| b.owners().to_vec()).collect(),
                    strict_listed: rank,
                },
                None => {
                    // Unlisted: every listed bundle is better, and so is every
                    // lexicographically smaller unlisted one.
                    let better = (0..p)
                        .map(|t| (0..n).map(|o| o < r[t]).collect())
                        .collect();
                    let listed: Vec<Vec<usize>> = ex.ranked().iter().map(|b| b.owners().to_vec()).collect();
                    AgentModel {
                        reference: r,
                        lex: Some(LexPart {
                            order: (0..p).collect(),
                            better,
                        }),
                        strict_listed: listed.len(),
                        listed,
                    }
                }
            },
        }
    }

    /// Whether some completion of `slots` using available items is weakly
    /// (first) or strictly (second) better than the reference.
    ///
    /// Items of different unfilled types are treated independently, so this
    /// may report true where no completion exists; never the reverse.
    pub(crate) fn feasible(&self, slots: &[Option<usize>], avail: &dyn Fn(usize, usize) -> bool) -> (bool, bool) {
        let mut weak = false;
        let mut strict = false;
        for (k, b) in self.listed.iter().enumerate() {
            let fits = b.iter().enumerate().all(|(t, &o)| match slots[t] {
                Some(s) => s == o,
                None => avail(t, o),
            });
            if fits {
                weak = true;
                if k < self.strict_listed {
                    strict = true;
                    break;
                }
            }
        }
        if let Some(lex) = &self.lex {
            if !strict {
                let (w, s) = self.lex_feasible(lex, slots, avail);
                weak |= w;
                strict |= s;
            }
        }
        (weak, strict)
    }

    fn lex_feasible(&self, lex: &LexPart, slots: &[Option<usize>], avail: &dyn Fn(usize, usize) -> bool) -> (bool, bool) {
        let n = lex.better.first().map_or(0, Vec::len);
        let fillable = |t: usize| slots[t].is_some() || (0..n).any(|o| avail(t, o));
        let rest_ok = |pos: usize| lex.order[pos..].iter().all(|&t| fillable(t));
        let mut strict = false;
        for (pos, &t) in lex.order.iter().enumerate() {
            let r = self.reference[t];
            match slots[t] {
                Some(o) if o == r => {}
                Some(o) if lex.better[t][o] => {
                    let ok = rest_ok(pos + 1);
                    return (strict || ok, strict || ok);
                }
                Some(_) => return (strict, strict),
                None => {
                    if !strict
                        && (0..n).any(|o| lex.better[t][o] && avail(t, o))
                        && rest_ok(pos + 1)
                    {
                        strict = true;
                    }
                    if !avail(t, r) {
                        return (strict, strict);
                    }
                }
            }
        }
        (true, strict)
    }
}
