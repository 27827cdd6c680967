//! Deciders for the control problems. [`decide_brute`] enumerates every
//! well-formed witness in a fixed canonical order and therefore works for
//! all 22 control types at small scale; the `decide_destructive_*` functions
//! solve the three polynomial-time cases directly. [`decide_auto`] picks
//! whichever applies.
//!
//! All deciders are deterministic: the same instance yields the same
//! decision and, when one exists, the canonically first witness.

use std::collections::HashMap;

use thiserror::Error;

use crate::control::{
    ControlAction, ControlError, ControlInstance, ControlType, Goal, TieRule, Witness,
};
use crate::election::{Ballot, CandidateId, Election};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    /// The enumeration hit its node budget before reaching a decision.
    /// This is an explicit "undecided" answer, never a wrong one.
    #[error("undecided: budget of {budget} nodes exhausted after exploring {explored}")]
    BudgetExceeded { budget: u64, explored: u64 },
    #[error("the exhaustive decider handles at most 64 candidates, got {0}")]
    TooManyCandidates(usize),
    #[error("decider does not handle {instance} instances")]
    UnsupportedControlType { instance: ControlType },
    #[error("decider self-check failed: produced witness was rejected ({detail})")]
    SelfCheckFailed { detail: String },
    #[error(transparent)]
    Control(#[from] ControlError),
}

/// Cap on the number of witnesses an exhaustive search may evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    /// Generous for desk-scale instances while still terminating fast.
    fn default() -> Self {
        Budget(10_000_000)
    }
}

/// The answer to a control problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Control is possible; the witness achieves the chair's goal.
    Possible(Witness),
    /// No well-formed tampering achieves the chair's goal.
    Impossible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    BruteForce,
    Polynomial,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveMethod::BruteForce => "brute",
            SolveMethod::Polynomial => "poly",
        })
    }
}

/// A decision plus how it was reached. `nodes` counts evaluated witnesses
/// for the exhaustive decider and examined configurations for the
/// polynomial ones; `work` additionally counts enumeration steps skipped by
/// symmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub outcome: Outcome,
    pub method: SolveMethod,
    pub nodes: u64,
    pub work: u64,
}

/// Whether a control type has a known polynomial decision procedure here,
/// or only the exhaustive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Only exhaustive search is available: the problem is computationally
    /// hard for this voting system.
    Resistant,
    /// A polynomial-time decider exists.
    Vulnerable,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Resistant => "resistant",
            Classification::Vulnerable => "vulnerable",
        })
    }
}

/// The complexity status of each of the 22 control types for this voting
/// system: every constructive type resists, and of the destructive types
/// only voter addition, voter deletion and ties-eliminate voter partition
/// are polynomial-time decidable.
pub fn classification(t: ControlType) -> Classification {
    match (t.goal, t.action) {
        (Goal::Destructive, ControlAction::AddVoters)
        | (Goal::Destructive, ControlAction::DeleteVoters)
        | (Goal::Destructive, ControlAction::PartitionVoters(TieRule::Eliminate)) => {
            Classification::Vulnerable
        }
        _ => Classification::Resistant,
    }
}

/// Decides with the polynomial procedure when one exists, exhaustively
/// otherwise.
pub fn decide_auto(instance: &ControlInstance, budget: Budget) -> Result<Decision, SolveError> {
    match (instance.control().goal, instance.control().action) {
        (Goal::Destructive, ControlAction::AddVoters) => {
            decide_destructive_add_voters(instance)
        }
        (Goal::Destructive, ControlAction::DeleteVoters) => {
            decide_destructive_delete_voters(instance)
        }
        (Goal::Destructive, ControlAction::PartitionVoters(TieRule::Eliminate)) => {
            decide_destructive_partition_voters(instance)
        }
        _ => decide_brute(instance, budget),
    }
}

/// Routes to the polynomial decider for the instance's control type, and
/// refuses the nineteen types that have none here.
pub fn decide_poly(instance: &ControlInstance) -> Result<Decision, SolveError> {
    match (instance.control().goal, instance.control().action) {
        (Goal::Destructive, ControlAction::AddVoters) => decide_destructive_add_voters(instance),
        (Goal::Destructive, ControlAction::DeleteVoters) => {
            decide_destructive_delete_voters(instance)
        }
        (Goal::Destructive, ControlAction::PartitionVoters(TieRule::Eliminate)) => {
            decide_destructive_partition_voters(instance)
        }
        _ => Err(SolveError::UnsupportedControlType {
            instance: instance.control(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Exhaustive search
// ---------------------------------------------------------------------------

/// Votes compressed into identical-ballot types over one roster. Scores of
/// any sub-multiset of votes depend only on how many votes of each type it
/// holds, so enumerations over voters run over per-type counts.
struct VoterTypes {
    /// Approval set of each type as a bitmask over roster positions.
    masks: Vec<u64>,
    /// Ranking of each type as roster positions, most preferred first.
    rankings: Vec<Vec<u8>>,
    /// 0-based vote positions of each type, in list order.
    members: Vec<Vec<usize>>,
}

impl VoterTypes {
    fn build(roster: &[CandidateId], ballots: &[Ballot]) -> Self {
        let index: HashMap<&CandidateId, usize> =
            roster.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut keyed: HashMap<(Vec<u8>, usize), usize> = HashMap::new();
        let mut types = VoterTypes {
            masks: Vec::new(),
            rankings: Vec::new(),
            members: Vec::new(),
        };
        for (position, ballot) in ballots.iter().enumerate() {
            let ranking: Vec<u8> = ballot
                .ranking()
                .iter()
                .map(|c| index[c] as u8)
                .collect();
            let key = (ranking.clone(), ballot.approved_count());
            let slot = *keyed.entry(key).or_insert_with(|| {
                let mask = ranking[..ballot.approved_count()]
                    .iter()
                    .fold(0u64, |m, &i| m | 1 << i);
                types.masks.push(mask);
                types.rankings.push(ranking);
                types.members.push(Vec::new());
                types.masks.len() - 1
            });
            types.members[slot].push(position);
        }
        types
    }

    fn counts(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Approval scores of the sub-multiset holding `take[t]` votes of each
    /// type, over the full roster (no narrowing, no rewriting).
    fn scores(&self, take: &[usize], num_candidates: usize) -> Vec<u64> {
        let mut scores = vec![0u64; num_candidates];
        for (t, &n) in take.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let mut mask = self.masks[t];
            while mask != 0 {
                let c = mask.trailing_zeros() as usize;
                scores[c] += n as u64;
                mask &= mask - 1;
            }
        }
        scores
    }

    /// The first `take[t]` vote positions of each type, sorted.
    fn materialize(&self, take: &[usize]) -> Vec<usize> {
        let mut picked: Vec<usize> = take
            .iter()
            .enumerate()
            .flat_map(|(t, &n)| self.members[t][..n].iter().copied())
            .collect();
        picked.sort_unstable();
        picked
    }
}

/// Winners over a candidate subset (bitmask over roster positions), taking
/// `take[t]` votes of each type; votes are narrowed to the subset with the
/// usual line rewriting. Returns the winner set as a bitmask; the empty
/// subset has no winners.
fn narrowed_winners(types: &VoterTypes, take: &[usize], keep: u64) -> u64 {
    if keep == 0 {
        return 0;
    }
    let kept = keep.count_ones() as usize;
    let mut scores: HashMap<u8, u64> = HashMap::new();
    for (t, &n) in take.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let mut approved = types.masks[t] & keep;
        if kept >= 2 {
            let surviving = approved.count_ones() as usize;
            if surviving == 0 {
                // The line sits before every surviving candidate: it moves
                // behind the most preferred one.
                let top = types.rankings[t]
                    .iter()
                    .copied()
                    .find(|&c| keep & (1 << c) != 0)
                    .expect("keep is non-empty");
                approved = 1 << top;
            } else if surviving == kept {
                // The line sits behind every surviving candidate: it moves
                // before the least preferred one.
                let bottom = types.rankings[t]
                    .iter()
                    .copied()
                    .rev()
                    .find(|&c| keep & (1 << c) != 0)
                    .expect("keep is non-empty");
                approved &= !(1 << bottom);
            }
        }
        let mut mask = approved;
        while mask != 0 {
            let c = mask.trailing_zeros() as u8;
            *scores.entry(c).or_insert(0) += n as u64;
            mask &= mask - 1;
        }
    }
    let max = scores.values().copied().max().unwrap_or(0);
    let mut winners = 0u64;
    let mut mask = keep;
    while mask != 0 {
        let c = mask.trailing_zeros() as u8;
        if scores.get(&c).copied().unwrap_or(0) == max {
            winners |= 1 << c;
        }
        mask &= mask - 1;
    }
    winners
}

/// Winner bitmask of a voter cell over the full roster (scores only, no
/// narrowing); an empty cell ties everyone at zero.
fn cell_winners(scores: &[u64], full: u64) -> u64 {
    let max = scores.iter().copied().max().unwrap_or(0);
    let mut winners = 0u64;
    for (c, &s) in scores.iter().enumerate() {
        if s == max && full & (1 << c) != 0 {
            winners |= 1 << c;
        }
    }
    winners
}

fn survivors_mask(rule: TieRule, winners: u64) -> u64 {
    match rule {
        TieRule::Eliminate if winners.count_ones() != 1 => 0,
        _ => winners,
    }
}

/// Iterates subsets of `0..n` in canonical order: by size, then
/// lexicographically by the sorted index list. Returns `false` from the
/// callback to stop.
pub(crate) fn for_each_subset(
    n: usize,
    max_size: usize,
    mut visit: impl FnMut(&[usize]) -> Result<bool, SolveError>,
) -> Result<(), SolveError> {
    for size in 0..=max_size.min(n) {
        let mut chosen: Vec<usize> = (0..size).collect();
        loop {
            if !visit(&chosen)? {
                return Ok(());
            }
            // Advance to the next combination in lexicographic order: bump
            // the rightmost index that still has room, reset those after.
            let mut advanced = false;
            let mut i = size;
            while i > 0 {
                i -= 1;
                if chosen[i] < n - size + i {
                    chosen[i] += 1;
                    for j in i + 1..size {
                        chosen[j] = chosen[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(())
}

/// Iterates per-type take vectors with `0 <= take[t] <= counts[t]` whose
/// total is exactly `total`, in lexicographic order (`take[0]` most
/// significant). Returns `false` from the callback to stop.
fn for_each_take_of_total(
    counts: &[usize],
    total: usize,
    visit: &mut impl FnMut(&[usize]) -> Result<bool, SolveError>,
) -> Result<bool, SolveError> {
    fn recurse(
        counts: &[usize],
        t: usize,
        remaining: usize,
        take: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> Result<bool, SolveError>,
    ) -> Result<bool, SolveError> {
        if t == counts.len() {
            return if remaining == 0 { visit(take) } else { Ok(true) };
        }
        let tail: usize = counts[t + 1..].iter().sum();
        let lo = remaining.saturating_sub(tail);
        let hi = counts[t].min(remaining);
        for n in lo..=hi {
            take.push(n);
            let more = recurse(counts, t + 1, remaining - n, take, visit)?;
            take.pop();
            if !more {
                return Ok(false);
            }
        }
        Ok(true)
    }
    if total > counts.iter().sum() {
        return Ok(true);
    }
    recurse(counts, 0, total, &mut Vec::new(), visit)
}

struct SearchState {
    nodes: u64,
    work: u64,
    budget: u64,
    found: Option<Witness>,
}

impl SearchState {
    fn new(budget: Budget) -> Self {
        SearchState {
            nodes: 0,
            work: 0,
            budget: budget.0,
            found: None,
        }
    }

    /// Accounts one evaluated witness; errors once the budget is gone.
    fn spend(&mut self) -> Result<(), SolveError> {
        self.nodes += 1;
        self.work += 1;
        if self.nodes > self.budget {
            Err(SolveError::BudgetExceeded {
                budget: self.budget,
                explored: self.nodes - 1,
            })
        } else {
            Ok(())
        }
    }
}

/// Decides any of the 22 control types by trying every well-formed witness
/// in canonical order: candidate subsets by size then lexicographically in
/// roster order, voter selections by size then lexicographically over vote
/// positions (identical votes collapsed into types), voter bipartitions as
/// per-type count vectors with the mirror image of each bipartition skipped.
/// Returns the canonically first successful witness, or `Impossible` once
/// the space is exhausted. A search that would evaluate more than
/// `budget` witnesses stops with [`SolveError::BudgetExceeded`].
pub fn decide_brute(instance: &ControlInstance, budget: Budget) -> Result<Decision, SolveError> {
    let roster = instance.base().candidates();
    if roster.len() > 64 {
        return Err(SolveError::TooManyCandidates(roster.len()));
    }
    let goal_bit = 1u64
        << instance
            .base()
            .candidate_index(instance.goal_candidate())
            .expect("goal candidate is in the base roster");
    let goal_met = |winners: u64| match instance.control().goal {
        Goal::Constructive => winners == goal_bit,
        Goal::Destructive => winners != goal_bit,
    };
    let mut state = SearchState::new(budget);

    match instance.control().action {
        ControlAction::AddCandidatesUnlimited | ControlAction::AddCandidatesLimited => {
            search_added_candidates(instance, goal_met, &mut state)?
        }
        ControlAction::DeleteCandidates => search_deleted_candidates(instance, goal_met, &mut state)?,
        ControlAction::PartitionCandidates(rule) => {
            search_candidate_partition(instance, rule, false, goal_met, &mut state)?
        }
        ControlAction::RunoffPartitionCandidates(rule) => {
            search_candidate_partition(instance, rule, true, goal_met, &mut state)?
        }
        ControlAction::AddVoters => search_voter_selection(instance, true, goal_met, &mut state)?,
        ControlAction::DeleteVoters => {
            search_voter_selection(instance, false, goal_met, &mut state)?
        }
        ControlAction::PartitionVoters(rule) => {
            search_voter_partition(instance, rule, goal_met, &mut state)?
        }
    }

    let outcome = match state.found {
        Some(witness) => {
            // The search evaluates witnesses through a compressed fast
            // path; re-check the winning one through the reference
            // semantics before reporting it.
            if !instance.check_witness(&witness)? {
                return Err(SolveError::SelfCheckFailed {
                    detail: format!("{witness:?}"),
                });
            }
            Outcome::Possible(witness)
        }
        None => Outcome::Impossible,
    };
    Ok(Decision {
        outcome,
        method: SolveMethod::BruteForce,
        nodes: state.nodes,
        work: state.work,
    })
}

fn roster_subset(roster: &[CandidateId], of: &[CandidateId], chosen: &[usize]) -> Vec<CandidateId> {
    let picked: Vec<CandidateId> = chosen.iter().map(|&i| of[i].clone()).collect();
    roster
        .iter()
        .filter(|c| picked.contains(c))
        .cloned()
        .collect()
}

fn search_added_candidates(
    instance: &ControlInstance,
    goal_met: impl Fn(u64) -> bool,
    state: &mut SearchState,
) -> Result<(), SolveError> {
    let roster = instance.base().candidates();
    let types = VoterTypes::build(roster, instance.base().ballots());
    let take = types.counts();
    let eligible_mask = mask_of(instance.base(), &instance.eligible_candidates());
    let spoilers = instance.spoilers().to_vec();
    let max = instance.limit().unwrap_or(spoilers.len());
    for_each_subset(spoilers.len(), max, |chosen| {
        state.spend()?;
        let added = chosen.iter().fold(0u64, |m, &i| {
            m | 1 << instance.base().candidate_index(&spoilers[i]).unwrap()
        });
        let winners = narrowed_winners(&types, &take, eligible_mask | added);
        if goal_met(winners) {
            state.found = Some(Witness::AddedCandidates(roster_subset(
                roster, &spoilers, chosen,
            )));
            return Ok(false);
        }
        Ok(true)
    })
}

fn search_deleted_candidates(
    instance: &ControlInstance,
    goal_met: impl Fn(u64) -> bool,
    state: &mut SearchState,
) -> Result<(), SolveError> {
    let roster = instance.base().candidates();
    let types = VoterTypes::build(roster, instance.base().ballots());
    let take = types.counts();
    let full = mask_of(instance.base(), roster);
    // Destructive control may never delete the goal candidate.
    let deletable: Vec<CandidateId> = roster
        .iter()
        .filter(|c| {
            instance.control().goal == Goal::Constructive || *c != instance.goal_candidate()
        })
        .cloned()
        .collect();
    let max = instance.limit().unwrap_or(deletable.len());
    for_each_subset(deletable.len(), max, |chosen| {
        state.spend()?;
        let deleted = chosen.iter().fold(0u64, |m, &i| {
            m | 1 << instance.base().candidate_index(&deletable[i]).unwrap()
        });
        let winners = narrowed_winners(&types, &take, full & !deleted);
        if goal_met(winners) {
            state.found = Some(Witness::DeletedCandidates(roster_subset(
                roster, &deletable, chosen,
            )));
            return Ok(false);
        }
        Ok(true)
    })
}

fn search_candidate_partition(
    instance: &ControlInstance,
    rule: TieRule,
    runoff: bool,
    goal_met: impl Fn(u64) -> bool,
    state: &mut SearchState,
) -> Result<(), SolveError> {
    let roster = instance.base().candidates();
    let types = VoterTypes::build(roster, instance.base().ballots());
    let take = types.counts();
    let full = mask_of(instance.base(), roster);
    let m = roster.len();
    // Memoize subelection winners per candidate subset: partitions reuse
    // the same groups and final rounds heavily.
    let mut winner_cache: HashMap<u64, u64> = HashMap::new();
    let mut winners_of = |keep: u64, types: &VoterTypes| -> u64 {
        *winner_cache
            .entry(keep)
            .or_insert_with(|| narrowed_winners(types, &take, keep))
    };
    for_each_subset(m, m, |chosen| {
        state.spend()?;
        let first = chosen.iter().fold(0u64, |mask, &i| mask | 1 << i);
        let second = full & !first;
        let s1 = survivors_mask(rule, winners_of(first, &types));
        let final_round = if runoff {
            s1 | survivors_mask(rule, winners_of(second, &types))
        } else {
            s1 | second
        };
        let winners = winners_of(final_round, &types);
        if goal_met(winners) {
            let first_ids: Vec<CandidateId> = roster
                .iter()
                .enumerate()
                .filter(|(i, _)| first & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect();
            let second_ids: Vec<CandidateId> = roster
                .iter()
                .enumerate()
                .filter(|(i, _)| second & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect();
            state.found = Some(Witness::CandidatePartition(first_ids, second_ids));
            return Ok(false);
        }
        Ok(true)
    })
}

fn search_voter_selection(
    instance: &ControlInstance,
    adding: bool,
    goal_met: impl Fn(u64) -> bool,
    state: &mut SearchState,
) -> Result<(), SolveError> {
    let roster = instance.base().candidates();
    let full = mask_of(instance.base(), roster);
    let base_types = VoterTypes::build(roster, instance.base().ballots());
    let base_scores = base_types.scores(&base_types.counts(), roster.len());
    let pool_types = if adding {
        VoterTypes::build(roster, instance.pool())
    } else {
        VoterTypes::build(roster, instance.base().ballots())
    };
    let counts = pool_types.counts();
    let pool_size: usize = counts.iter().sum();
    let max = instance.limit().unwrap_or(pool_size).min(pool_size);
    for total in 0..=max {
        let more = for_each_take_of_total(&counts, total, &mut |take| {
            state.spend()?;
            let delta = pool_types.scores(take, roster.len());
            let scores: Vec<u64> = base_scores
                .iter()
                .zip(&delta)
                .map(|(&b, &d)| if adding { b + d } else { b - d })
                .collect();
            let winners = cell_winners(&scores, full);
            if goal_met(winners) {
                let picked = pool_types.materialize(take);
                state.found = Some(if adding {
                    Witness::AddedVoters(picked)
                } else {
                    Witness::DeletedVoters(picked)
                });
                return Ok(false);
            }
            Ok(true)
        })?;
        if !more {
            break;
        }
    }
    Ok(())
}

fn search_voter_partition(
    instance: &ControlInstance,
    rule: TieRule,
    goal_met: impl Fn(u64) -> bool,
    state: &mut SearchState,
) -> Result<(), SolveError> {
    let roster = instance.base().candidates();
    let full = mask_of(instance.base(), roster);
    let types = VoterTypes::build(roster, instance.base().ballots());
    let counts = types.counts();
    let all = counts.clone();
    let mut winner_cache: HashMap<u64, u64> = HashMap::new();
    // Odometer over per-type counts for the first cell, lexicographic with
    // take[0] most significant. The two cells play symmetric roles, so of
    // each bipartition and its mirror only the lexicographically smaller
    // vector is evaluated.
    let mut take = vec![0usize; counts.len()];
    loop {
        state.work += 1;
        let mirror: Vec<usize> = counts.iter().zip(&take).map(|(&n, &k)| n - k).collect();
        if take <= mirror {
            state.nodes += 1;
            if state.nodes > state.budget {
                return Err(SolveError::BudgetExceeded {
                    budget: state.budget,
                    explored: state.nodes - 1,
                });
            }
            let scores1 = types.scores(&take, roster.len());
            let scores2 = types.scores(&mirror, roster.len());
            let s1 = survivors_mask(rule, cell_winners(&scores1, full));
            let s2 = survivors_mask(rule, cell_winners(&scores2, full));
            let final_round = s1 | s2;
            let winners = *winner_cache
                .entry(final_round)
                .or_insert_with(|| narrowed_winners(&types, &all, final_round));
            if goal_met(winners) {
                let first = types.materialize(&take);
                let mut second: Vec<usize> =
                    (0..instance.base().ballots().len()).collect();
                second.retain(|v| !first.contains(v));
                state.found = Some(Witness::VoterPartition(first, second));
                return Ok(());
            }
        }
        // Advance the odometer.
        let mut t = counts.len();
        loop {
            if t == 0 {
                return Ok(());
            }
            t -= 1;
            if take[t] < counts[t] {
                take[t] += 1;
                for slot in take[t + 1..].iter_mut() {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

fn mask_of(election: &Election, candidates: &[CandidateId]) -> u64 {
    candidates.iter().fold(0u64, |m, c| {
        m | 1 << election.candidate_index(c).expect("known candidate")
    })
}

// ---------------------------------------------------------------------------
// Polynomial deciders for the three vulnerable destructive problems
// ---------------------------------------------------------------------------

fn require(
    instance: &ControlInstance,
    goal: Goal,
    action: ControlAction,
) -> Result<(), SolveError> {
    if instance.control() != ControlType::new(goal, action) {
        return Err(SolveError::UnsupportedControlType {
            instance: instance.control(),
        });
    }
    Ok(())
}

fn checked_witness(
    instance: &ControlInstance,
    witness: Witness,
    nodes: u64,
    work: u64,
) -> Result<Decision, SolveError> {
    if !instance.check_witness(&witness)? {
        return Err(SolveError::SelfCheckFailed {
            detail: format!("{witness:?}"),
        });
    }
    Ok(Decision {
        outcome: Outcome::Possible(witness),
        method: SolveMethod::Polynomial,
        nodes,
        work,
    })
}

fn impossible(nodes: u64, work: u64) -> Decision {
    Decision {
        outcome: Outcome::Impossible,
        method: SolveMethod::Polynomial,
        nodes,
        work,
    }
}

/// Destructive control by adding voters, in polynomial time. The goal
/// candidate is dethroned exactly when it already is no unique winner, or
/// when for some rival `d` the score deficit can be covered by registering
/// pool voters who approve `d` but not the goal; only such voters narrow
/// the gap, so greedily adding exactly the deficit is optimal.
pub fn decide_destructive_add_voters(
    instance: &ControlInstance,
) -> Result<Decision, SolveError> {
    require(instance, Goal::Destructive, ControlAction::AddVoters)?;
    let election = instance.base();
    let goal = instance.goal_candidate();
    let scores = election.scores();
    let goal_score = scores.get(goal).expect("goal candidate is eligible");
    let limit = instance.limit().unwrap_or(instance.pool().len());
    let mut work = 0u64;
    if election.unique_winner().as_ref() != Some(goal) {
        return checked_witness(instance, Witness::AddedVoters(vec![]), 0, work);
    }
    for rival in election.candidates() {
        if rival == goal {
            continue;
        }
        work += 1;
        let gap = (goal_score - scores.get(rival).unwrap()) as usize;
        let helpers: Vec<usize> = instance
            .pool()
            .iter()
            .enumerate()
            .filter(|(_, b)| b.approves(rival) && !b.approves(goal))
            .map(|(i, _)| i)
            .collect();
        // Each helper lifts the rival by one without lifting the goal, so
        // `gap` of them force at least a tie.
        if gap <= limit && gap <= helpers.len() {
            return checked_witness(
                instance,
                Witness::AddedVoters(helpers[..gap].to_vec()),
                work,
                work,
            );
        }
    }
    Ok(impossible(work, work))
}

/// Destructive control by deleting voters, in polynomial time. Deleting a
/// voter who approves the goal candidate but not rival `d` narrows their
/// score difference by one and nothing else helps more, so the goal can be
/// dethroned exactly when some rival's deficit is at most the limit and at
/// most the number of such voters.
pub fn decide_destructive_delete_voters(
    instance: &ControlInstance,
) -> Result<Decision, SolveError> {
    require(instance, Goal::Destructive, ControlAction::DeleteVoters)?;
    let election = instance.base();
    let goal = instance.goal_candidate();
    let scores = election.scores();
    let goal_score = scores.get(goal).expect("goal candidate is eligible");
    let limit = instance.limit().unwrap_or(election.ballots().len());
    let mut work = 0u64;
    for rival in election.candidates() {
        if rival == goal {
            continue;
        }
        work += 1;
        let rival_score = scores.get(rival).unwrap();
        let gap = goal_score.saturating_sub(rival_score) as usize;
        let separating: Vec<usize> = election
            .ballots()
            .iter()
            .enumerate()
            .filter(|(_, b)| b.approves(goal) && !b.approves(rival))
            .map(|(i, _)| i)
            .collect();
        if gap <= limit && gap <= separating.len() {
            return checked_witness(
                instance,
                Witness::DeletedVoters(separating[..gap].to_vec()),
                work,
                work,
            );
        }
    }
    Ok(impossible(work, work))
}

/// Per-vote approval patterns over an ordered rival pair `(a, b)` and the
/// goal candidate `c`, as used by the pair scan of
/// [`decide_destructive_partition_voters`]: how many votes approve only
/// `c`, both rivals but not `c`, only `a`, only `b`, and `a` together with
/// `c` (all within `{a, b, c}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub only_goal: u64,
    pub both_rivals: u64,
    pub only_first: u64,
    pub only_second: u64,
    pub first_and_goal: u64,
}

/// Counts the approval patterns of every vote with respect to the ordered
/// rival pair `(a, b)` and goal `c`.
pub fn pair_counts(
    election: &Election,
    a: &CandidateId,
    b: &CandidateId,
    c: &CandidateId,
) -> PairCounts {
    let mut counts = PairCounts {
        only_goal: 0,
        both_rivals: 0,
        only_first: 0,
        only_second: 0,
        first_and_goal: 0,
    };
    for ballot in election.ballots() {
        let (has_a, has_b, has_c) = (ballot.approves(a), ballot.approves(b), ballot.approves(c));
        match (has_a, has_b, has_c) {
            (false, false, true) => counts.only_goal += 1,
            (true, true, false) => counts.both_rivals += 1,
            (true, false, false) => counts.only_first += 1,
            (false, true, false) => counts.only_second += 1,
            (true, false, true) => counts.first_and_goal += 1,
            _ => {}
        }
    }
    counts
}

/// The rivals of `c` that at least tie `c` head-to-head: every `d != c`
/// ranked before `c` by at least as many voters as rank `c` before `d`.
/// In roster order.
pub fn rival_set(election: &Election, c: &CandidateId) -> Vec<CandidateId> {
    election
        .candidates()
        .iter()
        .filter(|d| *d != c)
        .filter(|d| election.preference_margin(d, c).unwrap_or(-1) >= 0)
        .cloned()
        .collect()
}

/// Destructive control by partitioning voters under ties-eliminate, in
/// polynomial time.
///
/// The procedure first handles the trivial cases: with a single candidate
/// nothing dethrones it; if the goal candidate is already no unique winner
/// the split (everyone, nobody) works; with exactly two candidates and the
/// goal a unique winner nothing works, because the goal wins any cell it
/// ties or tops and survives into a final round it then wins.
///
/// Otherwise a first scan tries every ordered rival pair `(a, b)`: cell one
/// should let `a` blot out the goal, cell two should let `b`. Writing
/// `W`, `L`, `Da`, `Db`, `Dac` for the [`pair_counts`] fields, the split
/// exists iff `W - L <= Da + Db`; cell one then holds the votes behind
/// `Da` and `Dac` plus `min(W, Da)` of the votes behind `W`, leaving
/// the goal at no net advantage over `a` there and over `b` elsewhere, so
/// ties eliminate the goal in both cells.
///
/// A second scan tries every rival in [`rival_set`]: cell one holds
/// exactly the approvers of `d` — the best possible cell for `d`, since it
/// maximizes `d`'s score while admitting no vote that approves `d`'s
/// competitors without `d` — and the split works iff `d` uniquely wins
/// that cell. If neither scan finds a split, none exists.
pub fn decide_destructive_partition_voters(
    instance: &ControlInstance,
) -> Result<Decision, SolveError> {
    require(
        instance,
        Goal::Destructive,
        ControlAction::PartitionVoters(TieRule::Eliminate),
    )?;
    let election = instance.base();
    let goal = instance.goal_candidate();
    let num_votes = election.ballots().len();
    let mut work = 0u64;

    if election.candidates().len() == 1 {
        return Ok(impossible(0, 0));
    }
    if election.unique_winner().as_ref() != Some(goal) {
        let witness = Witness::VoterPartition((0..num_votes).collect(), vec![]);
        return checked_witness(instance, witness, 0, 0);
    }
    if election.candidates().len() == 2 {
        return Ok(impossible(0, 0));
    }

    // First scan: ordered rival pairs.
    for a in election.candidates() {
        if a == goal {
            continue;
        }
        for b in election.candidates() {
            if b == goal || b == a {
                continue;
            }
            work += 1;
            let counts = pair_counts(election, a, b, goal);
            if counts.only_goal > counts.both_rivals + counts.only_first + counts.only_second {
                continue;
            }
            let keep_goal_votes = counts.only_goal.min(counts.only_first) as usize;
            let mut first: Vec<usize> = Vec::new();
            let mut taken_goal_votes = 0usize;
            for (i, ballot) in election.ballots().iter().enumerate() {
                let (has_a, has_b, has_c) = (
                    ballot.approves(a),
                    ballot.approves(b),
                    ballot.approves(goal),
                );
                let take = match (has_a, has_b, has_c) {
                    (true, false, false) | (true, false, true) => true,
                    (false, false, true) if taken_goal_votes < keep_goal_votes => {
                        taken_goal_votes += 1;
                        true
                    }
                    _ => false,
                };
                if take {
                    first.push(i);
                }
            }
            let second: Vec<usize> = (0..num_votes).filter(|v| !first.contains(v)).collect();
            let witness = Witness::VoterPartition(first, second);
            return checked_witness(instance, witness, work, work);
        }
    }

    // Second scan: each rival d that at least ties the goal head-to-head
    // is gathered with all its approvers. That cell maximizes d's score,
    // so if d cannot uniquely win it, no cell lets d blot out the goal on
    // its own.
    for d in rival_set(election, goal) {
        work += 1;
        let first: Vec<usize> = election
            .ballots()
            .iter()
            .enumerate()
            .filter(|(_, b)| b.approves(&d))
            .map(|(i, _)| i)
            .collect();
        let cell: Vec<Ballot> = first
            .iter()
            .map(|&v| election.ballots()[v].clone())
            .collect();
        let sub = Election::new(election.candidates().to_vec(), cell).expect("same roster");
        if sub.unique_winner().as_ref() == Some(&d) {
            let second: Vec<usize> = (0..num_votes).filter(|v| !first.contains(v)).collect();
            let witness = Witness::VoterPartition(first, second);
            return checked_witness(instance, witness, work, work);
        }
    }

    Ok(impossible(work, work))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{Ballot, CandidateId, Election};

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

    #[test]
    fn classification_marks_exactly_three_vulnerable_types() {
        let vulnerable: Vec<ControlType> = ControlType::all()
            .into_iter()
            .filter(|t| classification(*t) == Classification::Vulnerable)
            .collect();
        assert_eq!(
            vulnerable,
            vec![
                ControlType::new(Goal::Destructive, ControlAction::AddVoters),
                ControlType::new(Goal::Destructive, ControlAction::DeleteVoters),
                ControlType::new(
                    Goal::Destructive,
                    ControlAction::PartitionVoters(TieRule::Eliminate)
                ),
            ]
        );
        assert_eq!(
            ControlType::all()
                .into_iter()
                .filter(|t| classification(*t) == Classification::Resistant)
                .count(),
            19
        );
    }

    #[test]
    fn brute_finds_the_canonically_first_deletion() {
        let inst = ControlInstance::delete_candidates(
            Goal::Constructive,
            1,
            narrowing_election(),
            cid("b"),
        )
        .unwrap();
        let decision = decide_brute(&inst, Budget::default()).unwrap();
        assert_eq!(
            decision.outcome,
            Outcome::Possible(Witness::DeletedCandidates(ids("d")))
        );
        // Checked the empty set, then {a}, {b}, {c}, {d}.
        assert_eq!(decision.nodes, 5);
    }

    #[test]
    fn brute_reports_impossible_when_the_space_is_exhausted() {
        // b trails by one approval on every vote; deleting one candidate
        // cannot make b the unique winner... except deleting d can, so use
        // goal d instead: d is approved by nobody and can never win alone.
        let inst = ControlInstance::delete_candidates(
            Goal::Constructive,
            1,
            narrowing_election(),
            cid("d"),
        )
        .unwrap();
        let decision = decide_brute(&inst, Budget::default()).unwrap();
        assert_eq!(decision.outcome, Outcome::Impossible);
    }

    #[test]
    fn brute_stops_at_the_budget_with_an_explicit_error() {
        let inst = ControlInstance::delete_candidates(
            Goal::Constructive,
            1,
            narrowing_election(),
            cid("d"),
        )
        .unwrap();
        assert_eq!(
            decide_brute(&inst, Budget(3)),
            Err(SolveError::BudgetExceeded {
                budget: 3,
                explored: 3
            })
        );
    }

    #[test]
    fn brute_handles_added_candidates_with_and_without_limits() {
        let full = narrowing_election();
        // Adding d back restores c as the unique winner.
        let unlimited = ControlInstance::add_candidates(
            Goal::Constructive,
            None,
            full.clone(),
            ids("d"),
            cid("c"),
        )
        .unwrap();
        let decision = decide_brute(&unlimited, Budget::default()).unwrap();
        assert_eq!(
            decision.outcome,
            Outcome::Possible(Witness::AddedCandidates(ids("d")))
        );
        // With a zero limit nothing can be added and b stays the winner.
        let limited =
            ControlInstance::add_candidates(Goal::Constructive, Some(0), full, ids("d"), cid("c"))
                .unwrap();
        let decision = decide_brute(&limited, Budget::default()).unwrap();
        assert_eq!(decision.outcome, Outcome::Impossible);
    }

    #[test]
    fn brute_decides_voter_partition_both_rules() {
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
            let inst =
                ControlInstance::partition_voters(Goal::Destructive, rule, e.clone(), cid("c"))
                    .unwrap();
            let decision = decide_brute(&inst, Budget::default()).unwrap();
            assert!(
                matches!(decision.outcome, Outcome::Possible(_)),
                "rule {rule}"
            );
        }
    }

    #[test]
    fn brute_skips_mirror_bipartitions_but_counts_them_as_work() {
        let e = election("a b", &["a | b", "a | b", "b | a"]);
        let inst =
            ControlInstance::partition_voters(Goal::Constructive, TieRule::Promote, e, cid("a"))
                .unwrap();
        let decision = decide_brute(&inst, Budget::default()).unwrap();
        // Two types with 2 and 1 votes: six count vectors, three up to
        // mirror image.
        assert!(matches!(decision.outcome, Outcome::Possible(_)));
        assert!(decision.work <= 6);
        assert!(decision.nodes <= 3);
    }

    #[test]
    fn identical_votes_are_interchangeable_for_the_deciders() {
        // Two identical a-voters: deleting "the first" is the canonical
        // witness; which physical vote is first in each cell must not
        // change the verdict.
        let e = election("a b", &["a | b", "a | b", "b | a"]);
        let inst = ControlInstance::delete_voters(Goal::Destructive, 1, e, cid("a")).unwrap();
        let decision = decide_brute(&inst, Budget::default()).unwrap();
        assert_eq!(
            decision.outcome,
            Outcome::Possible(Witness::DeletedVoters(vec![0]))
        );
    }

    #[test]
    fn poly_add_voters_closes_the_smallest_gap() {
        let e = election("a b c", &["a | b c", "a | b c", "b | a c"]);
        let pool = vec![ballot("b | a c"), ballot("b a | c"), ballot("c b | a")];
        let inst =
            ControlInstance::add_voters(Goal::Destructive, 2, e, pool, cid("a")).unwrap();
        let decision = decide_destructive_add_voters(&inst).unwrap();
        // Gap to b is 1; pool voter 0 approves b but not a.
        assert_eq!(
            decision.outcome,
            Outcome::Possible(Witness::AddedVoters(vec![0]))
        );
        assert_eq!(decision.method, SolveMethod::Polynomial);
    }

    #[test]
    fn poly_add_voters_needs_no_addition_when_the_goal_already_trails() {
        let e = election("a b", &["a | b", "b | a"]);
        let pool = vec![ballot("a | b")];
        let inst =
            ControlInstance::add_voters(Goal::Destructive, 1, e, pool, cid("a")).unwrap();
        let decision = decide_destructive_add_voters(&inst).unwrap();
        assert_eq!(decision.outcome, Outcome::Possible(Witness::AddedVoters(vec![])));
    }

    #[test]
    fn poly_add_voters_respects_the_limit() {
        let e = election("a b", &["a | b", "a | b", "a | b"]);
        let pool = vec![ballot("b | a"), ballot("b | a"), ballot("b | a")];
        let tight =
            ControlInstance::add_voters(Goal::Destructive, 2, e.clone(), pool.clone(), cid("a"))
                .unwrap();
        assert_eq!(
            decide_destructive_add_voters(&tight).unwrap().outcome,
            Outcome::Impossible
        );
        let enough =
            ControlInstance::add_voters(Goal::Destructive, 3, e, pool, cid("a")).unwrap();
        assert!(matches!(
            decide_destructive_add_voters(&enough).unwrap().outcome,
            Outcome::Possible(_)
        ));
    }

    #[test]
    fn poly_delete_voters_matches_the_worked_example() {
        let inst = ControlInstance::delete_voters(
            Goal::Destructive,
            1,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        let decision = decide_destructive_delete_voters(&inst).unwrap();
        // Deleting the bullet vote for c (position 1) ties a, b, c at 3.
        assert_eq!(
            decision.outcome,
            Outcome::Possible(Witness::DeletedVoters(vec![1]))
        );
    }

    #[test]
    fn poly_delete_voters_gives_up_when_every_gap_is_too_wide() {
        let e = election("a b", &["a | b", "a | b", "a | b"]);
        let inst = ControlInstance::delete_voters(Goal::Destructive, 2, e, cid("a")).unwrap();
        let decision = decide_destructive_delete_voters(&inst).unwrap();
        assert_eq!(decision.outcome, Outcome::Impossible);
    }

    #[test]
    fn poly_partition_voters_trivial_cases() {
        let solo = Election::new(ids("a"), vec![Ballot::new(ids("a"), 1).unwrap()]).unwrap();
        let inst = ControlInstance::partition_voters(
            Goal::Destructive,
            TieRule::Eliminate,
            solo,
            cid("a"),
        )
        .unwrap();
        assert_eq!(
            decide_destructive_partition_voters(&inst).unwrap().outcome,
            Outcome::Impossible
        );

        let tied = election("a b", &["a | b", "b | a"]);
        let inst = ControlInstance::partition_voters(
            Goal::Destructive,
            TieRule::Eliminate,
            tied,
            cid("a"),
        )
        .unwrap();
        let decision = decide_destructive_partition_voters(&inst).unwrap();
        assert_eq!(
            decision.outcome,
            Outcome::Possible(Witness::VoterPartition(vec![0, 1], vec![]))
        );

        let two = election("a b", &["a | b", "a | b", "b | a"]);
        let inst = ControlInstance::partition_voters(
            Goal::Destructive,
            TieRule::Eliminate,
            two,
            cid("a"),
        )
        .unwrap();
        assert_eq!(
            decide_destructive_partition_voters(&inst).unwrap().outcome,
            Outcome::Impossible
        );
    }

    #[test]
    fn poly_partition_voters_uses_the_pair_scan() {
        // c leads 3-2-2; splitting the a-voters from the b-voters lets a
        // and b each blot out c in their cells.
        let e = election(
            "a b c",
            &[
                "c | a b",
                "c | a b",
                "c | a b",
                "a | b c",
                "a | b c",
                "b | a c",
                "b | a c",
            ],
        );
        let inst = ControlInstance::partition_voters(
            Goal::Destructive,
            TieRule::Eliminate,
            e,
            cid("c"),
        )
        .unwrap();
        let decision = decide_destructive_partition_voters(&inst).unwrap();
        match decision.outcome {
            Outcome::Possible(w) => {
                assert!(inst.check_witness(&w).unwrap());
            }
            Outcome::Impossible => panic!("expected a successful split"),
        }
    }

    #[test]
    fn poly_partition_voters_agrees_with_brute_on_a_grid() {
        // Tiny systematic sweep: 3 candidates, up to 4 votes drawn from a
        // fixed set of ballot shapes.
        let shapes = ["a | b c", "b | a c", "c | a b", "a b | c", "c a | b"];
        let mut cases = 0;
        for i in 0..shapes.len() {
            for j in 0..shapes.len() {
                for k in 0..shapes.len() {
                    let e = election("a b c", &[shapes[i], shapes[j], shapes[k]]);
                    let inst = ControlInstance::partition_voters(
                        Goal::Destructive,
                        TieRule::Eliminate,
                        e,
                        cid("c"),
                    )
                    .unwrap();
                    let fast = decide_destructive_partition_voters(&inst).unwrap();
                    let slow = decide_brute(&inst, Budget::default()).unwrap();
                    assert_eq!(
                        matches!(fast.outcome, Outcome::Possible(_)),
                        matches!(slow.outcome, Outcome::Possible(_)),
                        "ballots {} / {} / {}",
                        shapes[i],
                        shapes[j],
                        shapes[k]
                    );
                    cases += 1;
                }
            }
        }
        assert_eq!(cases, 125);
    }

    #[test]
    fn poly_deciders_reject_foreign_instances() {
        let inst = ControlInstance::delete_voters(
            Goal::Constructive,
            1,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        assert!(matches!(
            decide_destructive_delete_voters(&inst),
            Err(SolveError::UnsupportedControlType { .. })
        ));
        assert!(matches!(
            decide_destructive_add_voters(&inst),
            Err(SolveError::UnsupportedControlType { .. })
        ));
        assert!(matches!(
            decide_destructive_partition_voters(&inst),
            Err(SolveError::UnsupportedControlType { .. })
        ));
    }

    #[test]
    fn auto_routes_to_the_polynomial_deciders() {
        let inst = ControlInstance::delete_voters(
            Goal::Destructive,
            1,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        let decision = decide_auto(&inst, Budget::default()).unwrap();
        assert_eq!(decision.method, SolveMethod::Polynomial);
        let inst = ControlInstance::delete_voters(
            Goal::Constructive,
            1,
            narrowing_election(),
            cid("c"),
        )
        .unwrap();
        let decision = decide_auto(&inst, Budget::default()).unwrap();
        assert_eq!(decision.method, SolveMethod::BruteForce);
    }

    #[test]
    fn subset_enumeration_is_size_then_lexicographic() {
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for_each_subset(3, 3, |chosen| {
            seen.push(chosen.to_vec());
            Ok(true)
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2],
            ]
        );
    }

    #[test]
    fn take_enumeration_covers_each_total_lexicographically() {
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for_each_take_of_total(&[2, 1], 2, &mut |take| {
            seen.push(take.to_vec());
            Ok(true)
        })
        .unwrap();
        assert_eq!(seen, vec![vec![1, 1], vec![2, 0]]);
    }
}
