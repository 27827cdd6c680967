//! Sincere-strategy preference-based approval voting.
//!
//! A vote here is a tie-free ranking of every candidate together with an
//! approval line: the voter approves exactly the candidates ranked before
//! the line. The rule demands sincerity — the line may not sit at either
//! edge of a multi-candidate ballot — and scores each candidate by the
//! number of votes approving it; every top scorer wins.
//!
//! On top of the voting rule, [`control`] defines eleven ways an election
//! chair can tamper with an election (adding, deleting or partitioning
//! candidates or voters), each in a constructive flavour (make a chosen
//! candidate the unique winner) and a destructive one (prevent that).
//! [`solve`] decides these control questions — exhaustively for all
//! twenty-two types, and in guaranteed polynomial time for the three types
//! this voting rule is actually vulnerable to. [`reduce`] builds the
//! hardness gadgets that tie the remaining types to hitting-set and
//! exact-cover problems, and can verify a built gadget end to end.
//! [`format`] reads and writes every object as plain text, and
//! [`corpus`] bundles a few worked elections with their expected
//! behaviour as an executable demonstration.

pub mod control;
pub mod corpus;
pub mod election;
pub mod format;
pub mod reduce;
pub mod solve;

pub use control::{ControlAction, ControlError, ControlInstance, ControlType, Goal, TieRule, Witness};
pub use election::{Ballot, CandidateId, Election, ElectionError, ScoreTable};
pub use format::{
    parse_control_instance, parse_election, parse_hitting_set, parse_witness, parse_x3c,
    write_control_instance, write_election, write_witness, ParseError,
};
pub use reduce::{
    solve_hitting_set, solve_x3c, verify_equivalence, EquivalenceCheck, EquivalenceReport,
    HittingSetInstance, PredictedQuantity, ReduceError, ReductionOutput, ReductionSource,
    X3cInstance,
};
pub use solve::{
    classification, decide_auto, decide_brute, decide_poly, Budget, Classification, Decision,
    Outcome, SolveError, SolveMethod,
};
