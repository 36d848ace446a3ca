//! Reduction instances as market files, with a comment block naming the
//! source formula.

use super::MarketFile;
use crate::reductions::{reduce_core_nonempty, reduce_in_strict_core, Cnf3, NORMALIZATIONS};

fn header(kind: &str, source: &str, cnf: &Cnf3) -> Vec<String> {
    vec![
        format!("{kind} instance"),
        format!("source: {source}"),
        format!("formula: {cnf}"),
    ]
}

/// The membership instance, including the challenged allocation.
pub fn membership_file(cnf: &Cnf3, source: &str) -> MarketFile {
    let inst = reduce_in_strict_core(cnf);
    let mut comments = header("strict-core membership", source, cnf);
    comments.push("negative literal chains are built like the positive ones".into());
    comments.push(format!("agents: {}", inst.labels().join(" ")));
    MarketFile::new(inst.market, inst.profile)
        .with_comments(comments)
        .with_allocation(inst.allocation)
}

/// The non-emptiness instance. When the formula is satisfiable the file
/// carries the allocation built from its best satisfying valuation.
pub fn nonempty_file(cnf: &Cnf3, source: &str) -> MarketFile {
    let inst = reduce_core_nonempty(cnf);
    let mut comments = header("strict-core non-emptiness", source, cnf);
    comments.extend(NORMALIZATIONS.iter().map(|n| format!("normalized: {n}")));
    comments.push(format!("agents: {}", inst.labels().join(" ")));
    let top = inst.top_allocation().ok();
    if top.is_some() {
        comments.push("allocation: built from the best satisfying valuation".into());
    }
    let file = MarketFile::new(inst.market, inst.profile).with_comments(comments);
    match top {
        Some(a) => file.with_allocation(a),
        None => file,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_identical_for_identical_input() {
        let cnf = Cnf3::from_signed(3, &[[1, 2, 3], [-1, -2, -3]]).unwrap();
        assert_eq!(membership_file(&cnf, "f").to_text(), membership_file(&cnf.clone(), "f").to_text());
        assert_eq!(nonempty_file(&cnf, "f").to_text(), nonempty_file(&cnf.clone(), "f").to_text());
    }

    #[test]
    fn unsatisfiable_has_no_allocation() {
        let cnf = Cnf3::from_signed(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
        assert!(nonempty_file(&cnf, "f").allocation.is_none());
    }
}
