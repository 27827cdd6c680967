//! The electoral-control scenarios: a chair tampers with the candidate or
//! voter structure of an election to make a designated candidate the unique
//! winner (constructive control) or to prevent exactly that (destructive
//! control). Each scenario is an instance plus a witness describing one
//! concrete tampering, and [`ControlInstance::final_winners`] evaluates the
//! resulting election.

use std::fmt;

use thiserror::Error;

use crate::election::{Ballot, CandidateId, Election, ElectionError};

/// Errors raised while building instances or checking witnesses.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ControlError {
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error("goal candidate {0} is not an eligible candidate of the instance")]
    GoalNotEligible(CandidateId),
    #[error("spoiler {0} is not in the candidate pool")]
    UnknownSpoiler(CandidateId),
    #[error("spoiler {0} listed twice")]
    DuplicateSpoiler(CandidateId),
    #[error("pool vote {position} does not match the eligible candidates: {source}")]
    BadPoolVote {
        position: usize,
        source: ElectionError,
    },
    #[error("witness kind does not match the instance's control action")]
    WitnessKindMismatch,
    #[error("witness names candidate {0} which the action may not touch")]
    CandidateNotAvailable(CandidateId),
    #[error("witness names candidate {0} twice")]
    DuplicateWitnessCandidate(CandidateId),
    #[error("witness uses {used} changes but the instance allows at most {limit}")]
    LimitExceeded { used: usize, limit: usize },
    #[error("destructive control may not delete the goal candidate {0}")]
    GoalDeleted(CandidateId),
    #[error("witness candidate sets do not partition the candidates (near {0})")]
    NotACandidatePartition(CandidateId),
    #[error("voter index {0} is out of range")]
    VoterIndexOutOfRange(usize),
    #[error("voter index {0} listed twice")]
    DuplicateVoterIndex(usize),
    #[error("witness voter lists do not partition the voters (near index {0})")]
    NotAVoterPartition(usize),
}

/// How subelection ties are handled when partitioning: either only a unique
/// winner survives into the final round, or all winners do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieRule {
    /// Ties eliminate: a subelection promotes its winner only when unique.
    Eliminate,
    /// Ties promote: a subelection promotes all its winners.
    Promote,
}

impl TieRule {
    /// The candidates a subelection sends into the final round.
    pub fn survivors(self, sub: &Election) -> Vec<CandidateId> {
        let winners = sub.winners();
        match self {
            TieRule::Eliminate if winners.len() != 1 => Vec::new(),
            _ => winners,
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieRule::Eliminate => "te",
            TieRule::Promote => "tp",
        })
    }
}

/// What the chair is allowed to change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlAction {
    /// Add any number of spoiler candidates from the pool.
    AddCandidatesUnlimited,
    /// Add at most `limit` spoiler candidates from the pool.
    AddCandidatesLimited,
    /// Delete at most `limit` candidates.
    DeleteCandidates,
    /// Split the candidates in two; the first group's survivors face the
    /// second group in the final round.
    PartitionCandidates(TieRule),
    /// Split the candidates in two; the survivors of both groups meet in
    /// the final round.
    RunoffPartitionCandidates(TieRule),
    /// Register at most `limit` additional voters from a pool.
    AddVoters,
    /// Remove at most `limit` voters.
    DeleteVoters,
    /// Split the voters in two; each group elects survivors and the full
    /// electorate decides among them.
    PartitionVoters(TieRule),
}

impl ControlAction {
    /// Whether instances of this action carry a change limit.
    pub fn has_limit(self) -> bool {
        matches!(
            self,
            ControlAction::AddCandidatesLimited
                | ControlAction::DeleteCandidates
                | ControlAction::AddVoters
                | ControlAction::DeleteVoters
        )
    }
}

impl fmt::Display for ControlAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlAction::AddCandidatesUnlimited => f.write_str("add-candidates-unlimited"),
            ControlAction::AddCandidatesLimited => f.write_str("add-candidates-limited"),
            ControlAction::DeleteCandidates => f.write_str("delete-candidates"),
            ControlAction::PartitionCandidates(rule) => write!(f, "partition-candidates-{rule}"),
            ControlAction::RunoffPartitionCandidates(rule) => {
                write!(f, "runoff-partition-candidates-{rule}")
            }
            ControlAction::AddVoters => f.write_str("add-voters"),
            ControlAction::DeleteVoters => f.write_str("delete-voters"),
            ControlAction::PartitionVoters(rule) => write!(f, "partition-voters-{rule}"),
        }
    }
}

/// Whether the chair wants the goal candidate to win or to not win.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goal {
    /// Success: the goal candidate is the unique winner.
    Constructive,
    /// Success: the goal candidate is not the unique winner.
    Destructive,
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Goal::Constructive => "constructive",
            Goal::Destructive => "destructive",
        })
    }
}

/// One of the 22 control problems: a goal combined with an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ControlType {
    pub goal: Goal,
    pub action: ControlAction,
}

impl ControlType {
    pub fn new(goal: Goal, action: ControlAction) -> Self {
        ControlType { goal, action }
    }

    /// All 22 control types, actions in canonical order, constructive
    /// before destructive.
    pub fn all() -> Vec<ControlType> {
        let actions = [
            ControlAction::AddCandidatesUnlimited,
            ControlAction::AddCandidatesLimited,
            ControlAction::DeleteCandidates,
            ControlAction::PartitionCandidates(TieRule::Eliminate),
            ControlAction::PartitionCandidates(TieRule::Promote),
            ControlAction::RunoffPartitionCandidates(TieRule::Eliminate),
            ControlAction::RunoffPartitionCandidates(TieRule::Promote),
            ControlAction::AddVoters,
            ControlAction::DeleteVoters,
            ControlAction::PartitionVoters(TieRule::Eliminate),
            ControlAction::PartitionVoters(TieRule::Promote),
        ];
        let mut all = Vec::with_capacity(22);
        for action in actions {
            for goal in [Goal::Constructive, Goal::Destructive] {
                all.push(ControlType::new(goal, action));
            }
        }
        all
    }
}

impl fmt::Display for ControlType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.goal, self.action)
    }
}

/// One concrete tampering. Voter references are 0-based positions into the
/// instance's vote list (or pool list for added voters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    AddedCandidates(Vec<CandidateId>),
    DeletedCandidates(Vec<CandidateId>),
    AddedVoters(Vec<usize>),
    DeletedVoters(Vec<usize>),
    CandidatePartition(Vec<CandidateId>, Vec<CandidateId>),
    VoterPartition(Vec<usize>, Vec<usize>),
}

/// A control problem instance: the election under attack, the goal
/// candidate, and the resources the chair may use.
///
/// For the adding-candidates actions, `base` is the election over the full
/// candidate pool (eligible candidates plus spoilers) so that every vote
/// already ranks potential spoilers; the election actually held is `base`
/// narrowed to the non-spoiler candidates plus whichever spoilers a witness
/// adds. For every other action `base` is the election itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlInstance {
    control: ControlType,
    base: Election,
    spoilers: Vec<CandidateId>,
    pool: Vec<Ballot>,
    limit: Option<usize>,
    goal_candidate: CandidateId,
}

impl ControlInstance {
    fn build(
        control: ControlType,
        base: Election,
        spoilers: Vec<CandidateId>,
        pool: Vec<Ballot>,
        limit: Option<usize>,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        for (i, s) in spoilers.iter().enumerate() {
            if base.candidate_index(s).is_none() {
                return Err(ControlError::UnknownSpoiler(s.clone()));
            }
            if spoilers[..i].contains(s) {
                return Err(ControlError::DuplicateSpoiler(s.clone()));
            }
        }
        let instance = ControlInstance {
            control,
            base,
            spoilers,
            pool,
            limit,
            goal_candidate,
        };
        if !instance.eligible_candidates().contains(&instance.goal_candidate) {
            return Err(ControlError::GoalNotEligible(instance.goal_candidate));
        }
        for (i, vote) in instance.pool.iter().enumerate() {
            // Pool votes must rank the eligible candidates exactly; reuse
            // election validation against the eligible roster.
            if let Err(source) = Election::new(
                instance.eligible_candidates().to_vec(),
                vec![vote.clone()],
            ) {
                return Err(ControlError::BadPoolVote {
                    position: i + 1,
                    source,
                });
            }
        }
        Ok(instance)
    }

    /// Adding candidates: `full_pool` ranks eligible candidates and
    /// spoilers alike; `limit` is `None` for the unlimited variant.
    pub fn add_candidates(
        goal: Goal,
        limit: Option<usize>,
        full_pool: Election,
        spoilers: Vec<CandidateId>,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        let action = match limit {
            None => ControlAction::AddCandidatesUnlimited,
            Some(_) => ControlAction::AddCandidatesLimited,
        };
        Self::build(
            ControlType::new(goal, action),
            full_pool,
            spoilers,
            Vec::new(),
            limit,
            goal_candidate,
        )
    }

    pub fn delete_candidates(
        goal: Goal,
        limit: usize,
        election: Election,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        Self::build(
            ControlType::new(goal, ControlAction::DeleteCandidates),
            election,
            Vec::new(),
            Vec::new(),
            Some(limit),
            goal_candidate,
        )
    }

    pub fn partition_candidates(
        goal: Goal,
        rule: TieRule,
        runoff: bool,
        election: Election,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        let action = if runoff {
            ControlAction::RunoffPartitionCandidates(rule)
        } else {
            ControlAction::PartitionCandidates(rule)
        };
        Self::build(
            ControlType::new(goal, action),
            election,
            Vec::new(),
            Vec::new(),
            None,
            goal_candidate,
        )
    }

    pub fn add_voters(
        goal: Goal,
        limit: usize,
        election: Election,
        pool: Vec<Ballot>,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        Self::build(
            ControlType::new(goal, ControlAction::AddVoters),
            election,
            Vec::new(),
            pool,
            Some(limit),
            goal_candidate,
        )
    }

    pub fn delete_voters(
        goal: Goal,
        limit: usize,
        election: Election,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        Self::build(
            ControlType::new(goal, ControlAction::DeleteVoters),
            election,
            Vec::new(),
            Vec::new(),
            Some(limit),
            goal_candidate,
        )
    }

    pub fn partition_voters(
        goal: Goal,
        rule: TieRule,
        election: Election,
        goal_candidate: CandidateId,
    ) -> Result<Self, ControlError> {
        Self::build(
            ControlType::new(goal, ControlAction::PartitionVoters(rule)),
            election,
            Vec::new(),
            Vec::new(),
            None,
            goal_candidate,
        )
    }

    pub fn control(&self) -> ControlType {
        self.control
    }

    /// The stored election: over the full candidate pool for the
    /// adding-candidates actions, the election itself otherwise.
    pub fn base(&self) -> &Election {
        &self.base
    }

    pub fn spoilers(&self) -> &[CandidateId] {
        &self.spoilers
    }

    pub fn pool(&self) -> &[Ballot] {
        &self.pool
    }

    pub fn limit(&self) -> Option<usize> {
        self.limit
    }

    pub fn goal_candidate(&self) -> &CandidateId {
        &self.goal_candidate
    }

    /// The candidates standing before any tampering, in roster order: the
    /// base roster minus spoilers.
    pub fn eligible_candidates(&self) -> Vec<CandidateId> {
        self.base
            .candidates()
            .iter()
            .filter(|c| !self.spoilers.contains(c))
            .cloned()
            .collect()
    }

    /// The election as held with no tampering at all.
    pub fn initial_election(&self) -> Result<Election, ControlError> {
        if self.spoilers.is_empty() {
            Ok(self.base.clone())
        } else {
            Ok(self.base.restrict(&self.eligible_candidates())?)
        }
    }

    fn check_candidate_list(
        &self,
        listed: &[CandidateId],
        available: &[CandidateId],
    ) -> Result<(), ControlError> {
        for (i, c) in listed.iter().enumerate() {
            if !available.contains(c) {
                return Err(ControlError::CandidateNotAvailable(c.clone()));
            }
            if listed[..i].contains(c) {
                return Err(ControlError::DuplicateWitnessCandidate(c.clone()));
            }
        }
        Ok(())
    }

    fn check_limit(&self, used: usize) -> Result<(), ControlError> {
        if let Some(limit) = self.limit {
            if used > limit {
                return Err(ControlError::LimitExceeded { used, limit });
            }
        }
        Ok(())
    }

    fn check_voter_list(&self, listed: &[usize], pool_len: usize) -> Result<(), ControlError> {
        for (i, &v) in listed.iter().enumerate() {
            if v >= pool_len {
                return Err(ControlError::VoterIndexOutOfRange(v));
            }
            if listed[..i].contains(&v) {
                return Err(ControlError::DuplicateVoterIndex(v));
            }
        }
        Ok(())
    }

    /// Splits the base votes by 0-based position; both lists together must
    /// cover every vote exactly once.
    fn voter_partition_cells(
        &self,
        first: &[usize],
        second: &[usize],
    ) -> Result<(Vec<Ballot>, Vec<Ballot>), ControlError> {
        let n = self.base.ballots().len();
        self.check_voter_list(first, n)?;
        self.check_voter_list(second, n)?;
        let mut seen = vec![false; n];
        for &v in first.iter().chain(second) {
            if seen[v] {
                return Err(ControlError::NotAVoterPartition(v));
            }
            seen[v] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(ControlError::NotAVoterPartition(missing));
        }
        let cell = |list: &[usize]| {
            list.iter()
                .map(|&v| self.base.ballots()[v].clone())
                .collect::<Vec<_>>()
        };
        Ok((cell(first), cell(second)))
    }

    /// Winners of an election stage over `candidates` (a subset of the base
    /// roster) with all base votes; an empty candidate set yields no
    /// winners.
    fn stage_winners(&self, candidates: &[CandidateId]) -> Result<Vec<CandidateId>, ControlError> {
        if candidates.is_empty() {
            return Ok(Vec::new());
        }
        Ok(self.base.restrict(candidates)?.winners())
    }

    /// Survivors a candidate group sends onward: the group's subelection is
    /// the base election narrowed to the group.
    fn group_survivors(
        &self,
        rule: TieRule,
        group: &[CandidateId],
    ) -> Result<Vec<CandidateId>, ControlError> {
        if group.is_empty() {
            return Ok(Vec::new());
        }
        Ok(rule.survivors(&self.base.restrict(group)?))
    }

    /// Merges candidate lists into base-roster order, dropping duplicates.
    fn in_roster_order(&self, lists: &[&[CandidateId]]) -> Vec<CandidateId> {
        self.base
            .candidates()
            .iter()
            .filter(|c| lists.iter().any(|l| l.contains(c)))
            .cloned()
            .collect()
    }

    /// The winners once the witness's tampering is applied. The witness
    /// must be well-formed for this instance: right kind, within limits,
    /// and touching only what the action allows.
    pub fn final_winners(&self, witness: &Witness) -> Result<Vec<CandidateId>, ControlError> {
        let eligible = self.eligible_candidates();
        match (self.control.action, witness) {
            (
                ControlAction::AddCandidatesUnlimited | ControlAction::AddCandidatesLimited,
                Witness::AddedCandidates(added),
            ) => {
                self.check_candidate_list(added, &self.spoilers)?;
                self.check_limit(added.len())?;
                let standing = self.in_roster_order(&[&eligible, added]);
                self.stage_winners(&standing)
            }
            (ControlAction::DeleteCandidates, Witness::DeletedCandidates(deleted)) => {
                self.check_candidate_list(deleted, &eligible)?;
                self.check_limit(deleted.len())?;
                if self.control.goal == Goal::Destructive
                    && deleted.contains(&self.goal_candidate)
                {
                    return Err(ControlError::GoalDeleted(self.goal_candidate.clone()));
                }
                let remaining: Vec<CandidateId> = eligible
                    .iter()
                    .filter(|c| !deleted.contains(c))
                    .cloned()
                    .collect();
                self.stage_winners(&remaining)
            }
            (
                ControlAction::PartitionCandidates(rule),
                Witness::CandidatePartition(first, second),
            ) => {
                self.check_candidate_partition(first, second, &eligible)?;
                let survivors = self.group_survivors(rule, first)?;
                let final_round = self.in_roster_order(&[&survivors, second]);
                self.stage_winners(&final_round)
            }
            (
                ControlAction::RunoffPartitionCandidates(rule),
                Witness::CandidatePartition(first, second),
            ) => {
                self.check_candidate_partition(first, second, &eligible)?;
                let first_survivors = self.group_survivors(rule, first)?;
                let second_survivors = self.group_survivors(rule, second)?;
                let final_round = self.in_roster_order(&[&first_survivors, &second_survivors]);
                self.stage_winners(&final_round)
            }
            (ControlAction::AddVoters, Witness::AddedVoters(added)) => {
                self.check_voter_list(added, self.pool.len())?;
                self.check_limit(added.len())?;
                let mut ballots = self.base.ballots().to_vec();
                ballots.extend(added.iter().map(|&v| self.pool[v].clone()));
                let e = Election::from_validated_parts(self.base.candidates().to_vec(), ballots);
                Ok(e.winners())
            }
            (ControlAction::DeleteVoters, Witness::DeletedVoters(deleted)) => {
                self.check_voter_list(deleted, self.base.ballots().len())?;
                self.check_limit(deleted.len())?;
                let ballots: Vec<Ballot> = self
                    .base
                    .ballots()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !deleted.contains(i))
                    .map(|(_, b)| b.clone())
                    .collect();
                let e = Election::from_validated_parts(self.base.candidates().to_vec(), ballots);
                Ok(e.winners())
            }
            (ControlAction::PartitionVoters(rule), Witness::VoterPartition(first, second)) => {
                let (cell1, cell2) = self.voter_partition_cells(first, second)?;
                let roster = self.base.candidates().to_vec();
                let sub1 = Election::from_validated_parts(roster.clone(), cell1);
                let sub2 = Election::from_validated_parts(roster, cell2);
                let s1 = rule.survivors(&sub1);
                let s2 = rule.survivors(&sub2);
                let final_round = self.in_roster_order(&[&s1, &s2]);
                self.stage_winners(&final_round)
            }
            _ => Err(ControlError::WitnessKindMismatch),
        }
    }

    fn check_candidate_partition(
        &self,
        first: &[CandidateId],
        second: &[CandidateId],
        eligible: &[CandidateId],
    ) -> Result<(), ControlError> {
        self.check_candidate_list(first, eligible)?;
        self.check_candidate_list(second, eligible)?;
        if let Some(c) = first.iter().find(|c| second.contains(c)) {
            return Err(ControlError::NotACandidatePartition(c.clone()));
        }
        if let Some(c) = eligible
            .iter()
            .find(|c| !first.contains(c) && !second.contains(c))
        {
            return Err(ControlError::NotACandidatePartition(c.clone()));
        }
        Ok(())
    }

    /// Whether the witness achieves the chair's goal: for constructive
    /// control the goal candidate is the unique final winner, for
    /// destructive control it is not.
    pub fn check_witness(&self, witness: &Witness) -> Result<bool, ControlError> {
        let winners = self.final_winners(witness)?;
        let goal_unique = winners.len() == 1 && winners[0] == self.goal_candidate;
        Ok(match self.control.goal {
            Goal::Constructive => goal_unique,
            Goal::Destructive => !goal_unique,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cid(s: &str) -> CandidateId {
        CandidateId::new(s).unwrap()
    }

    fn ids(s: &str) -> Vec<CandidateId> {
        s.split_whitespace().map(cid).collect()
    }

    fn ballot(s: &str) -> Ballot {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let approved = tokens.iter().position(|t| *t == "|").unwrap();
        let ranking = tokens
            .iter()
            .filter(|t| **t != "|")
            .map(|t| cid(t))
            .collect();
        Ballot::new(ranking, approved).unwrap()
    }

    fn election(candidates: &str, votes: &[&str]) -> Election {
        Election::new(ids(candidates), votes.iter().map(|v| ballot(v)).collect()).unwrap()
    }

    fn narrowing_election() -> Election {
        election(
            "a b c d",
            &["b c a | d", "c | a d b", "a b c | d", "b a c | d"],
        )
    }

    /// Six votes over a..f where c has maximum score 6 but loses under
    /// every candidate-partition scheme splitting off {a, c, d}.
    fn partition_prone_election() -> Election {
        election(
            "a b c d e f",
            &[
                "a b c | d e f",
                "b c | a d e f",
                "a c | b d e f",
                "b a c | d e f",
                "a b d e c | f",
                "a e d f c | b",
            ],
        )
    }

    #[test]
    fn all_control_types_are_distinct() {
        let all = ControlType::all();
        assert_eq!(all.len(), 22);
        for (i, t) in all.iter().enumerate() {
            assert!(!all[..i].contains(t), "{t} repeated");
        }
    }

    #[test]
    fn tie_rules_promote_as_documented() {
        let tied = election("a b", &["a | b", "b | a"]);
        assert_eq!(TieRule::Eliminate.survivors(&tied), Vec::<CandidateId>::new());
        assert_eq!(TieRule::Promote.survivors(&tied), ids("a b"));
        let decided = election("a b", &["a | b"]);
        assert_eq!(TieRule::Eliminate.survivors(&decided), ids("a"));
        assert_eq!(TieRule::Promote.survivors(&decided), ids("a"));
        // A one-candidate subelection with no votes still promotes its
        // candidate under either rule.
        let solo = Election::new(ids("a"), vec![]).unwrap();
        assert_eq!(TieRule::Eliminate.survivors(&solo), ids("a"));
        assert_eq!(TieRule::Promote.survivors(&solo), ids("a"));
    }

    #[test]
    fn deleting_a_candidate_can_flip_the_winner() {
        let inst = ControlInstance::delete_candidates(
            Goal::Constructive,
            1,
            narrowing_election(),
            cid("b"),
        )
        .unwrap();
        let witness = Witness::DeletedCandidates(ids("d"));
        assert_eq!(inst.final_winners(&witness).unwrap(), ids("b"));
        assert_eq!(inst.check_witness(&witness), Ok(true));
        let too_many = Witness::DeletedCandidates(ids("a d"));
        assert_eq!(
            inst.final_winners(&too_many),
            Err(ControlError::LimitExceeded { used: 2, limit: 1 })
        );
    }

    #[test]
    fn destructive_deletion_protects_the_goal() {
        let inst = ControlInstance::delete_candidates(
            Goal::Destructive,
            2,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        assert_eq!(
            inst.final_winners(&Witness::DeletedCandidates(ids("c"))),
            Err(ControlError::GoalDeleted(cid("c")))
        );
        // Deleting d narrows the election to the one b wins, so the goal
        // candidate is dethroned; deleting nothing leaves c in place.
        assert_eq!(
            inst.check_witness(&Witness::DeletedCandidates(ids("d"))),
            Ok(true)
        );
        assert_eq!(
            inst.check_witness(&Witness::DeletedCandidates(vec![])),
            Ok(false)
        );
    }

    #[test]
    fn deleting_everything_leaves_no_winners() {
        let inst = ControlInstance::delete_candidates(
            Goal::Constructive,
            4,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        let all = Witness::DeletedCandidates(ids("a b c d"));
        assert_eq!(inst.final_winners(&all).unwrap(), Vec::<CandidateId>::new());
        assert_eq!(inst.check_witness(&all), Ok(false));
    }

    #[test]
    fn added_candidates_come_from_the_spoiler_pool_only() {
        let full = narrowing_election();
        let inst = ControlInstance::add_candidates(
            Goal::Constructive,
            None,
            full,
            ids("d"),
            cid("c"),
        )
        .unwrap();
        assert_eq!(inst.eligible_candidates(), ids("a b c"));
        // Without d the held election is the narrowed one, won by b.
        assert_eq!(
            inst.final_winners(&Witness::AddedCandidates(vec![])).unwrap(),
            ids("b")
        );
        // Adding d restores the full election, won by c.
        assert_eq!(
            inst.final_winners(&Witness::AddedCandidates(ids("d"))).unwrap(),
            ids("c")
        );
        assert_eq!(
            inst.final_winners(&Witness::AddedCandidates(ids("a"))),
            Err(ControlError::CandidateNotAvailable(cid("a")))
        );
    }

    #[test]
    fn candidate_partition_flows_survivors_to_the_final_round() {
        for rule in [TieRule::Eliminate, TieRule::Promote] {
            for runoff in [false, true] {
                for (goal, goal_candidate, want) in [
                    (Goal::Destructive, "c", true),
                    (Goal::Constructive, "a", true),
                ] {
                    let inst = ControlInstance::partition_candidates(
                        goal,
                        rule,
                        runoff,
                        partition_prone_election(),
                        cid(goal_candidate),
                    )
                    .unwrap();
                    let witness = Witness::CandidatePartition(ids("a c d"), ids("b e f"));
                    assert_eq!(
                        inst.final_winners(&witness).unwrap(),
                        ids("a"),
                        "rule {rule}, runoff {runoff}"
                    );
                    assert_eq!(inst.check_witness(&witness), Ok(want));
                }
            }
        }
    }

    #[test]
    fn candidate_partition_must_cover_everything_exactly_once() {
        let inst = ControlInstance::partition_candidates(
            Goal::Destructive,
            TieRule::Promote,
            false,
            partition_prone_election(),
            cid("c"),
        )
        .unwrap();
        assert_eq!(
            inst.final_winners(&Witness::CandidatePartition(ids("a"), ids("b e f"))),
            Err(ControlError::NotACandidatePartition(cid("c")))
        );
        assert_eq!(
            inst.final_winners(&Witness::CandidatePartition(ids("a c"), ids("c b d e f"))),
            Err(ControlError::NotACandidatePartition(cid("c")))
        );
    }

    #[test]
    fn one_sided_candidate_partition_keeps_the_tie_rule_meaningful() {
        // First group empty: the final round is just the second group.
        let e = election("a b", &["a | b", "a | b", "b | a"]);
        let inst = ControlInstance::partition_candidates(
            Goal::Constructive,
            TieRule::Eliminate,
            false,
            e,
            cid("a"),
        )
        .unwrap();
        let witness = Witness::CandidatePartition(vec![], ids("a b"));
        assert_eq!(inst.final_winners(&witness).unwrap(), ids("a"));
        // Second group empty under ties-eliminate: a tied first group
        // leaves nobody standing.
        let tied = election("a b", &["a | b", "b | a"]);
        let inst = ControlInstance::partition_candidates(
            Goal::Destructive,
            TieRule::Eliminate,
            false,
            tied,
            cid("a"),
        )
        .unwrap();
        let witness = Witness::CandidatePartition(ids("a b"), vec![]);
        assert_eq!(inst.final_winners(&witness).unwrap(), Vec::<CandidateId>::new());
        assert_eq!(inst.check_witness(&witness), Ok(true));
    }

    #[test]
    fn added_voters_come_from_the_pool_by_position() {
        let e = election("a b", &["b | a", "b | a"]);
        let pool = vec![ballot("a | b"), ballot("a | b"), ballot("b | a")];
        let inst =
            ControlInstance::add_voters(Goal::Constructive, 3, e, pool, cid("a")).unwrap();
        assert_eq!(inst.check_witness(&Witness::AddedVoters(vec![0, 1])), Ok(false));
        let mut with_all = Witness::AddedVoters(vec![0, 1, 2]);
        assert_eq!(inst.check_witness(&with_all), Ok(false));
        // Three a-voters would outscore b, but only two exist in the pool.
        with_all = Witness::AddedVoters(vec![0, 1, 3]);
        assert_eq!(
            inst.final_winners(&with_all),
            Err(ControlError::VoterIndexOutOfRange(3))
        );
    }

    #[test]
    fn deleted_voters_are_positions_into_the_vote_list() {
        let inst = ControlInstance::delete_voters(
            Goal::Destructive,
            1,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        // Deleting the bullet vote for c levels a, b and c at 3.
        let witness = Witness::DeletedVoters(vec![1]);
        assert_eq!(inst.final_winners(&witness).unwrap(), ids("a b c"));
        assert_eq!(inst.check_witness(&witness), Ok(true));
        assert_eq!(
            inst.final_winners(&Witness::DeletedVoters(vec![1, 1])),
            Err(ControlError::DuplicateVoterIndex(1))
        );
    }

    #[test]
    fn voter_partition_runs_two_rounds_with_all_votes_deciding() {
        // Eight votes over a..f; the split {0,1,2,3} vs {4,5,6,7} sends a
        // and d to a final round a wins 5-3.
        let e = election(
            "a b c d e f",
            &[
                "a b c | d e f",
                "a c | b d e f",
                "c b a d | e f",
                "a b | d e c f",
                "a d c | b e f",
                "e b c d | a f",
                "d e c f | b a",
                "d f | b a c e",
            ],
        );
        for rule in [TieRule::Eliminate, TieRule::Promote] {
            let inst = ControlInstance::partition_voters(
                Goal::Destructive,
                rule,
                e.clone(),
                cid("c"),
            )
            .unwrap();
            let witness = Witness::VoterPartition(vec![0, 1, 2, 3], vec![4, 5, 6, 7]);
            assert_eq!(inst.final_winners(&witness).unwrap(), ids("a"), "rule {rule}");
            assert_eq!(inst.check_witness(&witness), Ok(true));
        }
    }

    #[test]
    fn voter_partition_must_cover_every_vote_exactly_once() {
        let inst = ControlInstance::partition_voters(
            Goal::Destructive,
            TieRule::Promote,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        assert_eq!(
            inst.final_winners(&Witness::VoterPartition(vec![0], vec![2, 3])),
            Err(ControlError::NotAVoterPartition(1))
        );
        assert_eq!(
            inst.final_winners(&Witness::VoterPartition(vec![0, 1], vec![1, 2, 3])),
            Err(ControlError::NotAVoterPartition(1))
        );
    }

    #[test]
    fn empty_voter_cell_ties_everyone_at_zero() {
        let e = election("a b", &["a | b", "a | b"]);
        // Under ties-promote the empty cell promotes both candidates, so
        // the final round is the full election again.
        let inst = ControlInstance::partition_voters(
            Goal::Constructive,
            TieRule::Promote,
            e.clone(),
            cid("a"),
        )
        .unwrap();
        let witness = Witness::VoterPartition(vec![0, 1], vec![]);
        assert_eq!(inst.final_winners(&witness).unwrap(), ids("a"));
        // Under ties-eliminate the empty cell promotes nobody and the
        // decided cell promotes a.
        let inst = ControlInstance::partition_voters(
            Goal::Constructive,
            TieRule::Eliminate,
            e,
            cid("a"),
        )
        .unwrap();
        assert_eq!(inst.final_winners(&witness).unwrap(), ids("a"));
    }

    #[test]
    fn witness_kind_must_match_the_action() {
        let inst = ControlInstance::delete_voters(
            Goal::Destructive,
            1,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        assert_eq!(
            inst.final_winners(&Witness::DeletedCandidates(ids("d"))),
            Err(ControlError::WitnessKindMismatch)
        );
    }

    #[test]
    fn constructive_and_destructive_success_are_complementary() {
        let witness = Witness::DeletedVoters(vec![1]);
        for goal_candidate in ["a", "b", "c", "d"] {
            let results: Vec<bool> = [Goal::Constructive, Goal::Destructive]
                .into_iter()
                .map(|goal| {
                    ControlInstance::delete_voters(
                        goal,
                        1,
                        narrowing_election(),
                        cid(goal_candidate),
                    )
                    .unwrap()
                    .check_witness(&witness)
                    .unwrap()
                })
                .collect();
            assert_ne!(results[0], results[1], "goal {goal_candidate}");
        }
    }

    #[test]
    fn goal_must_be_eligible() {
        let err = ControlInstance::add_candidates(
            Goal::Constructive,
            None,
            narrowing_election(),
            ids("d"),
            cid("d"),
        );
        assert_eq!(err.unwrap_err(), ControlError::GoalNotEligible(cid("d")));
    }

    #[test]
    fn pool_votes_must_rank_the_eligible_candidates() {
        let e = election("a b", &["a | b"]);
        let err = ControlInstance::add_voters(
            Goal::Constructive,
            1,
            e,
            vec![ballot("a |")],
            cid("a"),
        );
        assert!(matches!(
            err,
            Err(ControlError::BadPoolVote { position: 1, .. })
        ));
    }
}
