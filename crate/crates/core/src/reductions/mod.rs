//! 3-SAT reductions to strict-core questions, small fixed markets, and
//! DIMACS input.

mod cnf;
mod gadgets;
mod membership;
mod nonempty;

pub use cnf::{parse_dimacs, Cnf3, Literal, LiteralOrderW};
pub use gadgets::{house_car_alternative, house_car_market, impossibility_market, konishi_gadget};
pub use membership::{reduce_in_strict_core, valuation_to_coalition, EdgeKind, EdgeSet, MemberAgent, MembershipInstance};
pub use nonempty::{reduce_core_nonempty, NonEmptyAgent, NonEmptyInstance, NORMALIZATIONS};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("formula has no clauses")]
    NoClauses,
    #[error("clause {clause} mentions variable {var} but there are {num_vars}")]
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("variable {var} occurs in no clause")]
    UnusedVariable { var: usize },
    #[error("line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("line {line}: clause has {got} literals, expected 3")]
    Arity { line: usize, got: usize },
    #[error("valuation has {got} entries, expected {expected}")]
    ValuationLength { expected: usize, got: usize },
    #[error("valuation does not satisfy the formula")]
    NotSatisfying,
    #[error("formula is unsatisfiable")]
    Unsatisfiable,
}
