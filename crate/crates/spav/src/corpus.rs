//! A small corpus of worked elections, each bundled with the checks that
//! pin down its expected behaviour. The elections live as plain data files
//! in the standard election format (so every claim can be replayed through
//! the command line), and [`run_fixture`] re-derives each claim from the
//! live semantics and reports any drift.

use thiserror::Error;

use crate::control::{ControlInstance, Goal, TieRule, Witness};
use crate::election::{Ballot, CandidateId, Election};
use crate::format::parse_election;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown demo {name:?}")]
    UnknownFixture { name: String },
}

/// A named election data file plus a one-line summary of what it shows.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    name: &'static str,
    summary: &'static str,
    election_text: &'static str,
}

impl Fixture {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn summary(&self) -> &'static str {
        self.summary
    }

    /// The raw election file, exactly as shipped.
    pub fn election_text(&self) -> &'static str {
        self.election_text
    }

    pub fn election(&self) -> Election {
        parse_election(self.election_text, false).expect("shipped corpus files parse")
    }
}

const FIXTURES: [Fixture; 4] = [
    Fixture {
        name: "warp-failure",
        summary: "a unique winner loses its crown when an unrelated candidate leaves",
        election_text: include_str!("../corpus/v1/warp-failure.election"),
    },
    Fixture {
        name: "candidate-partition",
        summary: "one candidate split unseats the winner and crowns a runner-up",
        election_text: include_str!("../corpus/v1/candidate-partition.election"),
    },
    Fixture {
        name: "voter-partition",
        summary: "splitting the voters keeps the overall winner out of the final",
        election_text: include_str!("../corpus/v1/voter-partition.election"),
    },
    Fixture {
        name: "voter-partition-swapped",
        summary: "the same voter split, with roles traded, crowns a new winner",
        election_text: include_str!("../corpus/v1/voter-partition-swapped.election"),
    },
];

pub fn fixtures() -> &'static [Fixture] {
    &FIXTURES
}

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

/// One replayed claim: what was checked, whether it held, and the
/// expected-versus-actual detail.
#[derive(Debug, Clone)]
pub struct FixtureCheck {
    label: String,
    passed: bool,
    detail: String,
}

impl FixtureCheck {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn detail(&self) -> &str {
        &self.detail
    }
}

#[derive(Debug, Clone)]
pub struct FixtureReport {
    name: &'static str,
    checks: Vec<FixtureCheck>,
}

impl FixtureReport {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn checks(&self) -> &[FixtureCheck] {
        &self.checks
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn cid(label: &str) -> CandidateId {
    CandidateId::new(label).expect("corpus labels are valid")
}

fn ids(labels: &str) -> Vec<CandidateId> {
    labels.split_whitespace().map(cid).collect()
}

/// Renders scores in roster order as `a=3 b=2 ...` for exact comparison.
fn score_line(election: &Election) -> String {
    election
        .scores()
        .iter()
        .map(|(c, s)| format!("{c}={s}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn winner_line(election: &Election) -> String {
    election
        .winners()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn vote_lines(ballots: &[Ballot]) -> String {
    ballots
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn expect(checks: &mut Vec<FixtureCheck>, label: &str, expected: &str, actual: String) {
    checks.push(FixtureCheck {
        label: label.to_string(),
        passed: expected == actual,
        detail: format!("expected {expected:?}, got {actual:?}"),
    });
}

/// Replays a witness through the full control semantics and records
/// whether it achieves the instance's goal.
fn expect_witness(
    checks: &mut Vec<FixtureCheck>,
    label: &str,
    instance: &ControlInstance,
    witness: &Witness,
) {
    let (passed, detail) = match instance.check_witness(witness) {
        Ok(true) => (true, "witness achieves the goal".to_string()),
        Ok(false) => (false, "witness fails to achieve the goal".to_string()),
        Err(e) => (false, format!("witness rejected: {e}")),
    };
    checks.push(FixtureCheck {
        label: label.to_string(),
        passed,
        detail,
    });
}

fn sub_election(base: &Election, voters: &[usize]) -> Election {
    let ballots: Vec<Ballot> = voters.iter().map(|&i| base.ballots()[i].clone()).collect();
    Election::new(base.candidates().to_vec(), ballots).expect("same roster")
}

fn run_warp_failure(election: Election) -> Vec<FixtureCheck> {
    let mut checks = Vec::new();
    expect(
        &mut checks,
        "full-roster scores",
        "a=3 b=3 c=4 d=0",
        score_line(&election),
    );
    expect(
        &mut checks,
        "full-roster unique winner",
        "c",
        winner_line(&election),
    );
    let narrowed = election.restrict(&ids("a b c")).expect("known labels");
    expect(
        &mut checks,
        "votes after deleting d",
        "b c | a; c | a b; a b | c; b a | c",
        vote_lines(narrowed.ballots()),
    );
    expect(
        &mut checks,
        "unique winner after deleting d",
        "b",
        winner_line(&narrowed),
    );
    let dethrone = ControlInstance::delete_candidates(
        Goal::Destructive,
        1,
        election.clone(),
        cid("c"),
    )
    .expect("valid instance");
    expect_witness(
        &mut checks,
        "deleting d dethrones c",
        &dethrone,
        &Witness::DeletedCandidates(ids("d")),
    );
    let crown = ControlInstance::delete_candidates(Goal::Constructive, 1, election, cid("b"))
        .expect("valid instance");
    expect_witness(
        &mut checks,
        "deleting d crowns b",
        &crown,
        &Witness::DeletedCandidates(ids("d")),
    );
    checks
}

fn run_candidate_partition(election: Election) -> Vec<FixtureCheck> {
    let mut checks = Vec::new();
    expect(
        &mut checks,
        "full-roster scores",
        "a=5 b=4 c=6 d=2 e=2 f=1",
        score_line(&election),
    );
    expect(
        &mut checks,
        "full-roster unique winner",
        "c",
        winner_line(&election),
    );
    let first = election.restrict(&ids("a c d")).expect("known labels");
    let second = election.restrict(&ids("b e f")).expect("known labels");
    expect(
        &mut checks,
        "subelection winners",
        "a; b",
        format!("{}; {}", winner_line(&first), winner_line(&second)),
    );
    let witness = Witness::CandidatePartition(ids("a c d"), ids("b e f"));
    for (runoff, runoff_name) in [(false, "one-stage"), (true, "runoff")] {
        for rule in [TieRule::Eliminate, TieRule::Promote] {
            let unseat = ControlInstance::partition_candidates(
                Goal::Destructive,
                rule,
                runoff,
                election.clone(),
                cid("c"),
            )
            .expect("valid instance");
            expect_witness(
                &mut checks,
                &format!("split unseats c ({runoff_name}, {rule})"),
                &unseat,
                &witness,
            );
            let crown = ControlInstance::partition_candidates(
                Goal::Constructive,
                rule,
                runoff,
                election.clone(),
                cid("a"),
            )
            .expect("valid instance");
            expect_witness(
                &mut checks,
                &format!("split crowns a ({runoff_name}, {rule})"),
                &crown,
                &witness,
            );
        }
    }
    let runoff_final = election.restrict(&ids("a b")).expect("known labels");
    expect(
        &mut checks,
        "runoff final scores",
        "a=4 b=2",
        score_line(&runoff_final),
    );
    let one_stage_final = election.restrict(&ids("a b e f")).expect("known labels");
    expect(
        &mut checks,
        "one-stage final scores",
        "a=5 b=4 e=2 f=1",
        score_line(&one_stage_final),
    );
    checks
}

fn run_voter_partition(election: Election) -> Vec<FixtureCheck> {
    let mut checks = Vec::new();
    expect(
        &mut checks,
        "full-roster scores",
        "a=5 b=4 c=6 d=5 e=2 f=2",
        score_line(&election),
    );
    expect(
        &mut checks,
        "full-roster unique winner",
        "c",
        winner_line(&election),
    );
    let first = sub_election(&election, &[0, 1, 2, 3]);
    let second = sub_election(&election, &[4, 5, 6, 7]);
    expect(
        &mut checks,
        "subelection winners",
        "a; d",
        format!("{}; {}", winner_line(&first), winner_line(&second)),
    );
    let final_stage = election.restrict(&ids("a d")).expect("known labels");
    expect(
        &mut checks,
        "final-stage scores",
        "a=5 d=3",
        score_line(&final_stage),
    );
    expect(&mut checks, "final-stage winner", "a", winner_line(&final_stage));
    let witness = Witness::VoterPartition(vec![0, 1, 2, 3], vec![4, 5, 6, 7]);
    for rule in [TieRule::Eliminate, TieRule::Promote] {
        let unseat =
            ControlInstance::partition_voters(Goal::Destructive, rule, election.clone(), cid("c"))
                .expect("valid instance");
        expect_witness(
            &mut checks,
            &format!("split unseats c ({rule})"),
            &unseat,
            &witness,
        );
    }
    checks
}

fn run_voter_partition_swapped(election: Election) -> Vec<FixtureCheck> {
    let mut checks = Vec::new();
    expect(
        &mut checks,
        "full-roster scores",
        "a=6 b=4 c=5 d=5 e=2 f=2",
        score_line(&election),
    );
    expect(
        &mut checks,
        "full-roster unique winner",
        "a",
        winner_line(&election),
    );
    let first = sub_election(&election, &[0, 1, 2, 3]);
    let second = sub_election(&election, &[4, 5, 6, 7]);
    expect(
        &mut checks,
        "subelection winners",
        "c; d",
        format!("{}; {}", winner_line(&first), winner_line(&second)),
    );
    let final_stage = election.restrict(&ids("c d")).expect("known labels");
    expect(
        &mut checks,
        "final-stage scores",
        "c=5 d=3",
        score_line(&final_stage),
    );
    let witness = Witness::VoterPartition(vec![0, 1, 2, 3], vec![4, 5, 6, 7]);
    for rule in [TieRule::Eliminate, TieRule::Promote] {
        let crown =
            ControlInstance::partition_voters(Goal::Constructive, rule, election.clone(), cid("c"))
                .expect("valid instance");
        expect_witness(
            &mut checks,
            &format!("split crowns c ({rule})"),
            &crown,
            &witness,
        );
    }
    checks
}

/// Replays every claim a fixture makes and reports each as pass or fail.
pub fn run_fixture(name: &str) -> Result<FixtureReport, CorpusError> {
    let fixture = fixture(name).ok_or_else(|| CorpusError::UnknownFixture {
        name: name.to_string(),
    })?;
    let election = fixture.election();
    let checks = match fixture.name {
        "warp-failure" => run_warp_failure(election),
        "candidate-partition" => run_candidate_partition(election),
        "voter-partition" => run_voter_partition(election),
        "voter-partition-swapped" => run_voter_partition_swapped(election),
        _ => unreachable!("every fixture has a runner"),
    };
    Ok(FixtureReport {
        name: fixture.name,
        checks,
    })
}

pub fn run_all() -> Vec<FixtureReport> {
    FIXTURES
        .iter()
        .map(|f| run_fixture(f.name).expect("shipped fixtures are known"))
        .collect()
}
