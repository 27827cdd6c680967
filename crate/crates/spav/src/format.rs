//! The plain-text formats: election files, control-instance files, witness
//! files, and the two source-problem files. Lines hold `key: value` pairs;
//! `#` starts a comment; vote lines render a ballot as its ranking with the
//! approval line drawn as `|`, and `vote x12:` repeats a ballot twelve
//! times. Writers emit exactly what the parsers accept, byte-stably.

use thiserror::Error;

use crate::control::{
    ControlAction, ControlError, ControlInstance, ControlType, Goal, TieRule, Witness,
};
use crate::election::{Ballot, CandidateId, Election, ElectionError};
use crate::reduce::{HittingSetInstance, ReduceError, X3cInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `key: value`")]
    NotAKeyValueLine { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {key} appears twice")]
    DuplicateKey { line: usize, key: &'static str },
    #[error("the first line must declare `candidates:`")]
    MissingCandidates,
    #[error("line {line}: bad repeat count {token:?}")]
    BadRepeatCount { line: usize, token: String },
    #[error("line {line}: a vote needs exactly one approval line `|`, found {found}")]
    BadApprovalLine { line: usize, found: usize },
    #[error("line {line}: {source}")]
    Label {
        line: usize,
        source: ElectionError,
    },
    #[error("line {line}: bad number {token:?}")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: unknown control type {token:?}")]
    UnknownControlType { line: usize, token: String },
    #[error("missing `{key}:` line")]
    MissingKey { key: &'static str },
    #[error("line {line}: `{key}:` does not apply to this control type")]
    KeyNotApplicable { line: usize, key: String },
    #[error(
        "votes at lines {lines:?} leave the approval line at the ballot's edge; \
         rerun with --rewrite to move such lines inward"
    )]
    InadmissibleVotes { lines: Vec<usize> },
    #[error("line {line}: unknown element {label}")]
    UnknownElement { line: usize, label: CandidateId },
    #[error("line {line}: a triple needs exactly three elements, found {found}")]
    NotATriple { line: usize, found: usize },
    #[error("witness key {key:?} does not fit a {control} instance")]
    WitnessKeyMismatch { key: String, control: ControlType },
    #[error("vote reference {token:?} on line {line} is not a positive number")]
    BadVoterReference { line: usize, token: String },
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

/// One parsed content line: `key[ xN]: value tokens`.
struct Line<'a> {
    number: usize,
    key: &'a str,
    repeat: usize,
    values: Vec<&'a str>,
}

fn content_lines(text: &str) -> Result<Vec<Line<'_>>, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let (head, tail) = stripped
            .split_once(':')
            .ok_or(ParseError::NotAKeyValueLine { line: number })?;
        let mut head_tokens = head.split_whitespace();
        let key = head_tokens
            .next()
            .ok_or(ParseError::NotAKeyValueLine { line: number })?;
        let repeat = match head_tokens.next() {
            None => 1,
            Some(token) => {
                let count = token
                    .strip_prefix('x')
                    .and_then(|digits| digits.parse::<usize>().ok())
                    .filter(|&n| n >= 1);
                match count {
                    Some(n) if head_tokens.next().is_none() => n,
                    _ => {
                        return Err(ParseError::BadRepeatCount {
                            line: number,
                            token: token.to_string(),
                        })
                    }
                }
            }
        };
        lines.push(Line {
            number,
            key,
            repeat,
            values: tail.split_whitespace().collect(),
        });
    }
    Ok(lines)
}

fn parse_label(line: usize, token: &str) -> Result<CandidateId, ParseError> {
    CandidateId::new(token).map_err(|source| ParseError::Label { line, source })
}

fn parse_labels(line: &Line<'_>) -> Result<Vec<CandidateId>, ParseError> {
    line.values
        .iter()
        .map(|t| parse_label(line.number, t))
        .collect()
}

fn parse_ballot(line: &Line<'_>) -> Result<Ballot, ParseError> {
    let bars = line.values.iter().filter(|t| **t == "|").count();
    if bars != 1 {
        return Err(ParseError::BadApprovalLine {
            line: line.number,
            found: bars,
        });
    }
    let approved = line.values.iter().position(|t| *t == "|").unwrap();
    let ranking: Vec<CandidateId> = line
        .values
        .iter()
        .filter(|t| **t != "|")
        .map(|t| parse_label(line.number, t))
        .collect::<Result<_, _>>()?;
    Ballot::new(ranking, approved).map_err(|source| ParseError::Label {
        line: line.number,
        source,
    })
}

fn parse_count(line: &Line<'_>) -> Result<usize, ParseError> {
    match line.values.as_slice() {
        [token] => token.parse().map_err(|_| ParseError::BadNumber {
            line: line.number,
            token: token.to_string(),
        }),
        _ => Err(ParseError::BadNumber {
            line: line.number,
            token: line.values.join(" "),
        }),
    }
}

/// Shared scaffolding for election and instance files: the leading
/// `candidates:` line and every `vote` line, with other keys handed back.
struct ElectionSection<'a> {
    roster: Vec<CandidateId>,
    /// Expanded ballots, each tagged with its source line.
    votes: Vec<(usize, Ballot)>,
    rest: Vec<Line<'a>>,
}

fn parse_election_section<'a>(lines: Vec<Line<'a>>) -> Result<ElectionSection<'a>, ParseError> {
    let mut iter = lines.into_iter();
    let first = iter.next().ok_or(ParseError::MissingCandidates)?;
    if first.key != "candidates" {
        return Err(ParseError::MissingCandidates);
    }
    let roster = parse_labels(&first)?;
    let mut votes = Vec::new();
    let mut rest = Vec::new();
    for line in iter {
        match line.key {
            "candidates" => {
                return Err(ParseError::DuplicateKey {
                    line: line.number,
                    key: "candidates",
                })
            }
            "vote" => {
                let ballot = parse_ballot(&line)?;
                for _ in 0..line.repeat {
                    votes.push((line.number, ballot.clone()));
                }
            }
            _ => rest.push(line),
        }
    }
    Ok(ElectionSection { roster, votes, rest })
}

/// Enforces the sincerity rule on freshly parsed votes: with `rewrite` the
/// offending lines are moved inward, otherwise the vote lines are reported.
/// Votes over a single candidate are exempt.
fn settle_votes(
    votes: Vec<(usize, Ballot)>,
    rewrite: bool,
) -> Result<Vec<Ballot>, ParseError> {
    if rewrite {
        return Ok(votes.into_iter().map(|(_, b)| b.rewritten()).collect());
    }
    let mut bad_lines: Vec<usize> = votes
        .iter()
        .filter(|(_, b)| !b.is_admissible())
        .map(|(line, _)| *line)
        .collect();
    bad_lines.dedup();
    if !bad_lines.is_empty() {
        return Err(ParseError::InadmissibleVotes { lines: bad_lines });
    }
    Ok(votes.into_iter().map(|(_, b)| b).collect())
}

/// Parses an election file: a `candidates:` line followed by `vote:` lines.
pub fn parse_election(text: &str, rewrite: bool) -> Result<Election, ParseError> {
    let section = parse_election_section(content_lines(text)?)?;
    if let Some(line) = section.rest.first() {
        return Err(ParseError::UnknownKey {
            line: line.number,
            key: line.key.to_string(),
        });
    }
    let ballots = settle_votes(section.votes, rewrite)?;
    Ok(Election::new(section.roster, ballots)?)
}

fn ballot_line(key: &str, ballot: &Ballot, repeat: usize) -> String {
    if repeat == 1 {
        format!("{key}: {ballot}")
    } else {
        format!("{key} x{repeat}: {ballot}")
    }
}

fn push_vote_lines(out: &mut String, key: &str, ballots: &[Ballot]) {
    let mut i = 0;
    while i < ballots.len() {
        let mut j = i + 1;
        while j < ballots.len() && ballots[j] == ballots[i] {
            j += 1;
        }
        out.push_str(&ballot_line(key, &ballots[i], j - i));
        out.push('\n');
        i = j;
    }
}

/// Renders an election file; identical consecutive votes collapse into one
/// `vote xN:` line, so parsing the output reproduces the election exactly.
pub fn write_election(election: &Election) -> String {
    let mut out = String::from("candidates:");
    for c in election.candidates() {
        out.push(' ');
        out.push_str(c.as_str());
    }
    out.push('\n');
    push_vote_lines(&mut out, "vote", election.ballots());
    out
}

fn action_token(action: ControlAction) -> String {
    action.to_string()
}

fn parse_action(token: &str) -> Option<ControlAction> {
    Some(match token {
        "add-candidates-unlimited" => ControlAction::AddCandidatesUnlimited,
        "add-candidates-limited" => ControlAction::AddCandidatesLimited,
        "delete-candidates" => ControlAction::DeleteCandidates,
        "partition-candidates-te" => ControlAction::PartitionCandidates(TieRule::Eliminate),
        "partition-candidates-tp" => ControlAction::PartitionCandidates(TieRule::Promote),
        "runoff-partition-candidates-te" => {
            ControlAction::RunoffPartitionCandidates(TieRule::Eliminate)
        }
        "runoff-partition-candidates-tp" => {
            ControlAction::RunoffPartitionCandidates(TieRule::Promote)
        }
        "add-voters" => ControlAction::AddVoters,
        "delete-voters" => ControlAction::DeleteVoters,
        "partition-voters-te" => ControlAction::PartitionVoters(TieRule::Eliminate),
        "partition-voters-tp" => ControlAction::PartitionVoters(TieRule::Promote),
        _ => return None,
    })
}

fn parse_goal(token: &str) -> Option<Goal> {
    match token {
        "constructive" => Some(Goal::Constructive),
        "destructive" => Some(Goal::Destructive),
        _ => None,
    }
}

/// Parses a control-instance file: an election section plus `control:`,
/// `goal:` and, depending on the control type, `limit:`, `spoilers:` and
/// `pool-vote:` lines.
pub fn parse_control_instance(text: &str, rewrite: bool) -> Result<ControlInstance, ParseError> {
    let section = parse_election_section(content_lines(text)?)?;
    let mut control: Option<(usize, ControlType)> = None;
    let mut goal_candidate: Option<(usize, CandidateId)> = None;
    let mut limit: Option<(usize, usize)> = None;
    let mut spoilers: Option<(usize, Vec<CandidateId>)> = None;
    let mut pool: Vec<(usize, Ballot)> = Vec::new();
    for line in &section.rest {
        match line.key {
            "control" => {
                if control.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "control",
                    });
                }
                let parsed = match line.values.as_slice() {
                    [goal, action] => parse_goal(goal)
                        .zip(parse_action(action))
                        .map(|(g, a)| ControlType::new(g, a)),
                    _ => None,
                };
                match parsed {
                    Some(t) => control = Some((line.number, t)),
                    None => {
                        return Err(ParseError::UnknownControlType {
                            line: line.number,
                            token: line.values.join(" "),
                        })
                    }
                }
            }
            "goal" => {
                if goal_candidate.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "goal",
                    });
                }
                match line.values.as_slice() {
                    [token] => goal_candidate = Some((line.number, parse_label(line.number, token)?)),
                    _ => {
                        return Err(ParseError::Label {
                            line: line.number,
                            source: ElectionError::EmptyLabel,
                        })
                    }
                }
            }
            "limit" => {
                if limit.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "limit",
                    });
                }
                limit = Some((line.number, parse_count(line)?));
            }
            "spoilers" => {
                if spoilers.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "spoilers",
                    });
                }
                spoilers = Some((line.number, parse_labels(line)?));
            }
            "pool-vote" => {
                let ballot = parse_ballot(line)?;
                for _ in 0..line.repeat {
                    pool.push((line.number, ballot.clone()));
                }
            }
            key => {
                return Err(ParseError::UnknownKey {
                    line: line.number,
                    key: key.to_string(),
                })
            }
        }
    }

    let (_, control) = control.ok_or(ParseError::MissingKey { key: "control" })?;
    let (_, goal_candidate) = goal_candidate.ok_or(ParseError::MissingKey { key: "goal" })?;
    let is_add_candidates = matches!(
        control.action,
        ControlAction::AddCandidatesUnlimited | ControlAction::AddCandidatesLimited
    );
    if let Some((line, _)) = &limit {
        if !control.action.has_limit() {
            return Err(ParseError::KeyNotApplicable {
                line: *line,
                key: "limit".into(),
            });
        }
    }
    if let Some((line, _)) = &spoilers {
        if !is_add_candidates {
            return Err(ParseError::KeyNotApplicable {
                line: *line,
                key: "spoilers".into(),
            });
        }
    }
    if let Some((line, _)) = pool.first() {
        if control.action != ControlAction::AddVoters {
            return Err(ParseError::KeyNotApplicable {
                line: *line,
                key: "pool-vote".into(),
            });
        }
    }
    if control.action.has_limit() && limit.is_none() {
        return Err(ParseError::MissingKey { key: "limit" });
    }

    let ballots = settle_votes(section.votes, rewrite)?;
    let election = Election::new(section.roster, ballots)?;
    let limit = limit.map(|(_, n)| n);
    let spoilers = spoilers.map(|(_, s)| s).unwrap_or_default();
    let pool = settle_votes(pool, rewrite)?;

    let instance = match control.action {
        ControlAction::AddCandidatesUnlimited | ControlAction::AddCandidatesLimited => {
            ControlInstance::add_candidates(control.goal, limit, election, spoilers, goal_candidate)
        }
        ControlAction::DeleteCandidates => ControlInstance::delete_candidates(
            control.goal,
            limit.expect("checked above"),
            election,
            goal_candidate,
        ),
        ControlAction::PartitionCandidates(rule) => ControlInstance::partition_candidates(
            control.goal,
            rule,
            false,
            election,
            goal_candidate,
        ),
        ControlAction::RunoffPartitionCandidates(rule) => ControlInstance::partition_candidates(
            control.goal,
            rule,
            true,
            election,
            goal_candidate,
        ),
        ControlAction::AddVoters => ControlInstance::add_voters(
            control.goal,
            limit.expect("checked above"),
            election,
            pool,
            goal_candidate,
        ),
        ControlAction::DeleteVoters => ControlInstance::delete_voters(
            control.goal,
            limit.expect("checked above"),
            election,
            goal_candidate,
        ),
        ControlAction::PartitionVoters(rule) => {
            ControlInstance::partition_voters(control.goal, rule, election, goal_candidate)
        }
    }?;
    Ok(instance)
}

/// Renders a control-instance file that [`parse_control_instance`] accepts.
pub fn write_control_instance(instance: &ControlInstance) -> String {
    let mut out = write_election(instance.base());
    out.push_str(&format!(
        "control: {} {}\n",
        instance.control().goal,
        action_token(instance.control().action)
    ));
    out.push_str(&format!("goal: {}\n", instance.goal_candidate()));
    if let Some(limit) = instance.limit() {
        out.push_str(&format!("limit: {limit}\n"));
    }
    if !instance.spoilers().is_empty() {
        out.push_str("spoilers:");
        for s in instance.spoilers() {
            out.push(' ');
            out.push_str(s.as_str());
        }
        out.push('\n');
    }
    push_vote_lines(&mut out, "pool-vote", instance.pool());
    out
}

fn parse_voter_references(line: &Line<'_>) -> Result<Vec<usize>, ParseError> {
    line.values
        .iter()
        .map(|token| {
            token
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .map(|v| v - 1)
                .ok_or_else(|| ParseError::BadVoterReference {
                    line: line.number,
                    token: token.to_string(),
                })
        })
        .collect()
}

/// Keys the witness parser ignores, so the machine output of a solve run
/// can be fed back in directly.
const WITNESS_PASSTHROUGH_KEYS: [&str; 8] = [
    "decision",
    "method",
    "nodes",
    "work",
    "winners",
    "unique_winner",
    "control",
    "goal",
];

/// Parses a witness file against its instance: `add:` (alias `keep:`) or
/// `delete:` lines carry candidate labels or 1-based vote references
/// depending on the control type, `partition-1:`/`partition-2:` carry the
/// two halves of a split.
pub fn parse_witness(text: &str, instance: &ControlInstance) -> Result<Witness, ParseError> {
    let control = instance.control();
    let mut add: Option<Line<'_>> = None;
    let mut delete: Option<Line<'_>> = None;
    let mut part1: Option<Line<'_>> = None;
    let mut part2: Option<Line<'_>> = None;
    for line in content_lines(text)? {
        let slot = match line.key {
            "add" | "keep" => &mut add,
            "delete" => &mut delete,
            "partition-1" => &mut part1,
            "partition-2" => &mut part2,
            key if WITNESS_PASSTHROUGH_KEYS.contains(&key) => continue,
            key => {
                return Err(ParseError::UnknownKey {
                    line: line.number,
                    key: key.to_string(),
                })
            }
        };
        if slot.is_some() {
            return Err(ParseError::DuplicateKey {
                line: line.number,
                key: match line.key {
                    "add" | "keep" => "add",
                    "delete" => "delete",
                    "partition-1" => "partition-1",
                    _ => "partition-2",
                },
            });
        }
        *slot = Some(line);
    }

    let mismatch = |key: &str| ParseError::WitnessKeyMismatch {
        key: key.to_string(),
        control,
    };
    match control.action {
        ControlAction::AddCandidatesUnlimited | ControlAction::AddCandidatesLimited => {
            let line = add.ok_or(ParseError::MissingKey { key: "add" })?;
            if delete.is_some() || part1.is_some() || part2.is_some() {
                return Err(mismatch("delete"));
            }
            Ok(Witness::AddedCandidates(parse_labels(&line)?))
        }
        ControlAction::DeleteCandidates => {
            let line = delete.ok_or(ParseError::MissingKey { key: "delete" })?;
            if add.is_some() || part1.is_some() || part2.is_some() {
                return Err(mismatch("add"));
            }
            Ok(Witness::DeletedCandidates(parse_labels(&line)?))
        }
        ControlAction::AddVoters => {
            let line = add.ok_or(ParseError::MissingKey { key: "add" })?;
            if delete.is_some() || part1.is_some() || part2.is_some() {
                return Err(mismatch("delete"));
            }
            Ok(Witness::AddedVoters(parse_voter_references(&line)?))
        }
        ControlAction::DeleteVoters => {
            let line = delete.ok_or(ParseError::MissingKey { key: "delete" })?;
            if add.is_some() || part1.is_some() || part2.is_some() {
                return Err(mismatch("add"));
            }
            Ok(Witness::DeletedVoters(parse_voter_references(&line)?))
        }
        ControlAction::PartitionCandidates(_) | ControlAction::RunoffPartitionCandidates(_) => {
            let line1 = part1.ok_or(ParseError::MissingKey { key: "partition-1" })?;
            let line2 = part2.ok_or(ParseError::MissingKey { key: "partition-2" })?;
            if add.is_some() || delete.is_some() {
                return Err(mismatch("add"));
            }
            Ok(Witness::CandidatePartition(
                parse_labels(&line1)?,
                parse_labels(&line2)?,
            ))
        }
        ControlAction::PartitionVoters(_) => {
            let line1 = part1.ok_or(ParseError::MissingKey { key: "partition-1" })?;
            let line2 = part2.ok_or(ParseError::MissingKey { key: "partition-2" })?;
            if add.is_some() || delete.is_some() {
                return Err(mismatch("add"));
            }
            Ok(Witness::VoterPartition(
                parse_voter_references(&line1)?,
                parse_voter_references(&line2)?,
            ))
        }
    }
}

/// Renders a witness as the lines [`parse_witness`] reads. Vote references
/// are 1-based.
pub fn write_witness(witness: &Witness) -> String {
    fn labels(key: &str, ids: &[CandidateId]) -> String {
        let mut out = String::from(key);
        out.push(':');
        for c in ids {
            out.push(' ');
            out.push_str(c.as_str());
        }
        out.push('\n');
        out
    }
    fn voters(key: &str, list: &[usize]) -> String {
        let mut out = String::from(key);
        out.push(':');
        for v in list {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
        out
    }
    match witness {
        Witness::AddedCandidates(ids) => labels("add", ids),
        Witness::DeletedCandidates(ids) => labels("delete", ids),
        Witness::AddedVoters(list) => voters("add", list),
        Witness::DeletedVoters(list) => voters("delete", list),
        Witness::CandidatePartition(first, second) => {
            let mut out = labels("partition-1", first);
            out.push_str(&labels("partition-2", second));
            out
        }
        Witness::VoterPartition(first, second) => {
            let mut out = voters("partition-1", first);
            out.push_str(&voters("partition-2", second));
            out
        }
    }
}

fn element_index(
    elements: &[CandidateId],
    line: usize,
    token: &str,
) -> Result<usize, ParseError> {
    let label = parse_label(line, token)?;
    elements
        .iter()
        .position(|e| *e == label)
        .ok_or(ParseError::UnknownElement { line, label })
}

/// Parses a hitting-set file: `elements:`, one `set:` line per set (labels
/// referring back to the elements), and `k:` for the bound.
pub fn parse_hitting_set(text: &str) -> Result<HittingSetInstance, ParseError> {
    let mut elements: Option<Vec<CandidateId>> = None;
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut k: Option<usize> = None;
    for line in content_lines(text)? {
        match line.key {
            "elements" => {
                if elements.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "elements",
                    });
                }
                elements = Some(parse_labels(&line)?);
            }
            "set" => {
                let elements = elements
                    .as_ref()
                    .ok_or(ParseError::MissingKey { key: "elements" })?;
                let set = line
                    .values
                    .iter()
                    .map(|t| element_index(elements, line.number, t))
                    .collect::<Result<Vec<_>, _>>()?;
                sets.push(set);
            }
            "k" => {
                if k.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "k",
                    });
                }
                k = Some(parse_count(&line)?);
            }
            key => {
                return Err(ParseError::UnknownKey {
                    line: line.number,
                    key: key.to_string(),
                })
            }
        }
    }
    let elements = elements.ok_or(ParseError::MissingKey { key: "elements" })?;
    let k = k.ok_or(ParseError::MissingKey { key: "k" })?;
    Ok(HittingSetInstance::new(elements, sets, k)?)
}

/// Parses an exact-cover file: `elements:` and one `triple:` line per
/// three-element set.
pub fn parse_x3c(text: &str) -> Result<X3cInstance, ParseError> {
    let mut elements: Option<Vec<CandidateId>> = None;
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for line in content_lines(text)? {
        match line.key {
            "elements" => {
                if elements.is_some() {
                    return Err(ParseError::DuplicateKey {
                        line: line.number,
                        key: "elements",
                    });
                }
                elements = Some(parse_labels(&line)?);
            }
            "triple" => {
                let elements = elements
                    .as_ref()
                    .ok_or(ParseError::MissingKey { key: "elements" })?;
                if line.values.len() != 3 {
                    return Err(ParseError::NotATriple {
                        line: line.number,
                        found: line.values.len(),
                    });
                }
                let mut triple = [0usize; 3];
                for (slot, token) in triple.iter_mut().zip(&line.values) {
                    *slot = element_index(elements, line.number, token)?;
                }
                triples.push(triple);
            }
            key => {
                return Err(ParseError::UnknownKey {
                    line: line.number,
                    key: key.to_string(),
                })
            }
        }
    }
    let elements = elements.ok_or(ParseError::MissingKey { key: "elements" })?;
    Ok(X3cInstance::new(elements, triples)?)
}
