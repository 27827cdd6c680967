//! Elections in which every vote is a tie-free ranking of all candidates plus
//! an approval line: the voter approves exactly the candidates ranked before
//! the line. A candidate's score is the number of votes approving it, and the
//! candidates with maximum score win.

use std::fmt;

use thiserror::Error;

/// Errors raised while building or querying elections.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ElectionError {
    #[error("candidate label is empty")]
    EmptyLabel,
    #[error("candidate label {0:?} contains whitespace or a reserved character (| # :)")]
    BadLabel(String),
    #[error("election has no candidates")]
    EmptyRoster,
    #[error("duplicate candidate {0} in roster")]
    DuplicateCandidate(CandidateId),
    #[error("ranking lists {0} more than once")]
    DuplicateRankingEntry(CandidateId),
    #[error("ranking is empty")]
    EmptyRanking,
    #[error("approval count {approved} exceeds ranking length {len}")]
    ApprovalOutOfRange { approved: usize, len: usize },
    #[error("vote {position} does not rank the candidate roster exactly (near {candidate})")]
    NotAPermutation {
        position: usize,
        candidate: CandidateId,
    },
    #[error("vote {position} ranks {len} candidates but the roster has {roster}")]
    WrongRankingLength {
        position: usize,
        len: usize,
        roster: usize,
    },
    #[error("candidate {0} is not in the election")]
    UnknownCandidate(CandidateId),
    #[error("cannot restrict an election to an empty candidate set")]
    EmptyCandidateSet,
    #[error("preference margin of {0} against itself is undefined")]
    SameCandidate(CandidateId),
}

/// A candidate, identified by its label.
///
/// Labels are non-empty and contain no whitespace and none of `|`, `#`, `:`,
/// so every label round-trips through the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateId(String);

impl CandidateId {
    pub fn new(label: impl Into<String>) -> Result<Self, ElectionError> {
        let label = label.into();
        if label.is_empty() {
            return Err(ElectionError::EmptyLabel);
        }
        if label
            .chars()
            .any(|ch| ch.is_whitespace() || matches!(ch, '|' | '#' | ':'))
        {
            return Err(ElectionError::BadLabel(label));
        }
        Ok(CandidateId(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One vote: a strict ranking of all candidates together with the number of
/// leading candidates the voter approves.
///
/// Every prefix length from 0 (approve nobody) to the full ranking (approve
/// everybody) is representable, but only ballots whose line falls strictly
/// inside the ranking are admissible once there are at least two candidates;
/// see [`Ballot::is_admissible`] and [`Ballot::rewritten`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ballot {
    ranking: Vec<CandidateId>,
    approved: usize,
}

impl Ballot {
    pub fn new(ranking: Vec<CandidateId>, approved: usize) -> Result<Self, ElectionError> {
        if ranking.is_empty() {
            return Err(ElectionError::EmptyRanking);
        }
        if approved > ranking.len() {
            return Err(ElectionError::ApprovalOutOfRange {
                approved,
                len: ranking.len(),
            });
        }
        for (i, c) in ranking.iter().enumerate() {
            if ranking[..i].contains(c) {
                return Err(ElectionError::DuplicateRankingEntry(c.clone()));
            }
        }
        Ok(Ballot { ranking, approved })
    }

    /// The full ranking, most preferred first.
    pub fn ranking(&self) -> &[CandidateId] {
        &self.ranking
    }

    /// How many leading candidates the ballot approves.
    pub fn approved_count(&self) -> usize {
        self.approved
    }

    /// The approved candidates: the first `approved_count` of the ranking.
    pub fn approved_candidates(&self) -> &[CandidateId] {
        &self.ranking[..self.approved]
    }

    pub fn approves(&self, c: &CandidateId) -> bool {
        self.approved_candidates().contains(c)
    }

    /// Whether the approval line falls strictly inside the ranking. Ballots
    /// over a single candidate have no meaningful line and always count
    /// as-is, so they are admissible by convention.
    pub fn is_admissible(&self) -> bool {
        self.ranking.len() < 2 || (self.approved >= 1 && self.approved < self.ranking.len())
    }

    /// Moves the approval line minimally so that, with at least two
    /// candidates, at least one candidate is approved and at least one is
    /// not: a line before the whole ranking moves behind the first
    /// candidate, a line behind the whole ranking moves before the last.
    /// Admissible ballots and single-candidate ballots are returned
    /// unchanged, so the rewrite is idempotent.
    pub fn rewritten(&self) -> Ballot {
        let len = self.ranking.len();
        let approved = if len < 2 {
            self.approved
        } else if self.approved == 0 {
            1
        } else if self.approved == len {
            len - 1
        } else {
            self.approved
        };
        Ballot {
            ranking: self.ranking.clone(),
            approved,
        }
    }
}

impl fmt::Display for Ballot {
    /// Renders the ranking with the approval line as `|`, e.g. `a b | c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = Vec::with_capacity(self.ranking.len() + 1);
        for (i, c) in self.ranking.iter().enumerate() {
            if i == self.approved {
                parts.push("|");
            }
            parts.push(c.as_str());
        }
        if self.approved == self.ranking.len() {
            parts.push("|");
        }
        f.write_str(&parts.join(" "))
    }
}

/// Scores of one election, in roster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreTable {
    entries: Vec<(CandidateId, u64)>,
}

impl ScoreTable {
    pub fn get(&self, c: &CandidateId) -> Option<u64> {
        self.entries.iter().find(|(id, _)| id == c).map(|(_, s)| *s)
    }

    /// Entries in roster order.
    pub fn iter(&self) -> impl Iterator<Item = (&CandidateId, u64)> {
        self.entries.iter().map(|(c, s)| (c, *s))
    }

    pub fn max(&self) -> u64 {
        self.entries.iter().map(|(_, s)| *s).max().unwrap_or(0)
    }
}

/// An election: a non-empty candidate roster and a list of votes, each of
/// which ranks exactly the roster.
///
/// The roster order is the canonical candidate order everywhere: scores,
/// winners and witnesses are reported in it, and deciders break ties by it.
/// Votes keep their list order; voter positions (0-based internally, 1-based
/// in the text formats) identify them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<CandidateId>,
    ballots: Vec<Ballot>,
}

impl Election {
    pub fn new(candidates: Vec<CandidateId>, ballots: Vec<Ballot>) -> Result<Self, ElectionError> {
        if candidates.is_empty() {
            return Err(ElectionError::EmptyRoster);
        }
        for (i, c) in candidates.iter().enumerate() {
            if candidates[..i].contains(c) {
                return Err(ElectionError::DuplicateCandidate(c.clone()));
            }
        }
        for (position, ballot) in ballots.iter().enumerate() {
            if ballot.ranking.len() != candidates.len() {
                return Err(ElectionError::WrongRankingLength {
                    position: position + 1,
                    len: ballot.ranking.len(),
                    roster: candidates.len(),
                });
            }
            if let Some(c) = ballot.ranking.iter().find(|c| !candidates.contains(c)) {
                return Err(ElectionError::NotAPermutation {
                    position: position + 1,
                    candidate: c.clone(),
                });
            }
        }
        Ok(Election {
            candidates,
            ballots,
        })
    }

    /// Builds an election from parts already known to be consistent
    /// (ballots rank exactly `candidates`). Used internally to assemble
    /// subelections without re-validating.
    pub(crate) fn from_validated_parts(candidates: Vec<CandidateId>, ballots: Vec<Ballot>) -> Self {
        debug_assert!(ballots
            .iter()
            .all(|b| b.ranking.len() == candidates.len()
                && b.ranking.iter().all(|c| candidates.contains(c))));
        Election {
            candidates,
            ballots,
        }
    }

    /// The candidate roster, in canonical order.
    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn candidate_index(&self, c: &CandidateId) -> Option<usize> {
        self.candidates.iter().position(|x| x == c)
    }

    /// Applies [`Ballot::rewritten`] to every vote.
    pub fn rewritten(&self) -> Election {
        Election {
            candidates: self.candidates.clone(),
            ballots: self.ballots.iter().map(Ballot::rewritten).collect(),
        }
    }

    /// The election on the candidates in `keep` only. Each vote keeps its
    /// surviving candidates in ranking order and approves those it approved
    /// before; votes whose line then sits at an end are rewritten per
    /// [`Ballot::rewritten`]. The roster keeps its original order; `keep`
    /// may list candidates in any order but must be a non-empty subset of
    /// the roster.
    pub fn restrict(&self, keep: &[CandidateId]) -> Result<Election, ElectionError> {
        if keep.is_empty() {
            return Err(ElectionError::EmptyCandidateSet);
        }
        if let Some(c) = keep.iter().find(|c| !self.candidates.contains(c)) {
            return Err(ElectionError::UnknownCandidate(c.clone()));
        }
        let candidates: Vec<CandidateId> = self
            .candidates
            .iter()
            .filter(|c| keep.contains(c))
            .cloned()
            .collect();
        let ballots = self
            .ballots
            .iter()
            .map(|b| {
                let ranking: Vec<CandidateId> = b
                    .ranking
                    .iter()
                    .filter(|c| candidates.contains(c))
                    .cloned()
                    .collect();
                let approved = b.ranking[..b.approved]
                    .iter()
                    .filter(|c| candidates.contains(c))
                    .count();
                Ballot { ranking, approved }.rewritten()
            })
            .collect();
        Ok(Election {
            candidates,
            ballots,
        })
    }

    /// How many votes approve each candidate. Votes are counted exactly as
    /// stored; no rewriting happens here.
    pub fn scores(&self) -> ScoreTable {
        let mut entries: Vec<(CandidateId, u64)> = self
            .candidates
            .iter()
            .map(|c| (c.clone(), 0u64))
            .collect();
        for ballot in &self.ballots {
            for c in ballot.approved_candidates() {
                let i = self
                    .candidate_index(c)
                    .expect("ballots rank only roster candidates");
                entries[i].1 += 1;
            }
        }
        ScoreTable { entries }
    }

    /// All candidates with maximum score, in roster order. With no votes
    /// every candidate scores 0 and all of them win; in particular a
    /// single-candidate election is always won by its candidate.
    pub fn winners(&self) -> Vec<CandidateId> {
        let scores = self.scores();
        let max = scores.max();
        scores
            .iter()
            .filter(|(_, s)| *s == max)
            .map(|(c, _)| c.clone())
            .collect()
    }

    /// The sole maximum-score candidate, if there is exactly one.
    pub fn unique_winner(&self) -> Option<CandidateId> {
        let winners = self.winners();
        if winners.len() == 1 {
            winners.into_iter().next()
        } else {
            None
        }
    }

    /// Number of votes ranking `x` before `y` minus number ranking `y`
    /// before `x`. Antisymmetric; every vote counts on one side because
    /// rankings are complete and tie-free.
    pub fn preference_margin(
        &self,
        x: &CandidateId,
        y: &CandidateId,
    ) -> Result<i64, ElectionError> {
        if x == y {
            return Err(ElectionError::SameCandidate(x.clone()));
        }
        for c in [x, y] {
            if !self.candidates.contains(c) {
                return Err(ElectionError::UnknownCandidate(c.clone()));
            }
        }
        let mut margin = 0i64;
        for ballot in &self.ballots {
            let px = ballot.ranking.iter().position(|c| c == x).unwrap();
            let py = ballot.ranking.iter().position(|c| c == y).unwrap();
            margin += if px < py { 1 } else { -1 };
        }
        Ok(margin)
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

    /// `"b c a | d"` -> ballot ranking b,c,a,d approving b,c,a.
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

    /// Four votes over a, b, c, d where c wins, yet dropping d flips the
    /// winner to b because two votes get their line pushed outward.
    fn narrowing_flips_winner_election() -> Election {
        election(
            "a b c d",
            &["b c a | d", "c | a d b", "a b c | d", "b a c | d"],
        )
    }

    #[test]
    fn labels_are_validated() {
        assert!(CandidateId::new("a").is_ok());
        assert!(CandidateId::new("b12").is_ok());
        assert_eq!(CandidateId::new(""), Err(ElectionError::EmptyLabel));
        for bad in ["a b", "a|b", "a#b", "a:b", "\t"] {
            assert!(matches!(
                CandidateId::new(bad),
                Err(ElectionError::BadLabel(_))
            ));
        }
    }

    #[test]
    fn ballot_construction_checks_bounds() {
        assert!(Ballot::new(ids("a b"), 2).is_ok());
        assert_eq!(
            Ballot::new(ids("a b"), 3),
            Err(ElectionError::ApprovalOutOfRange { approved: 3, len: 2 })
        );
        assert_eq!(Ballot::new(vec![], 0), Err(ElectionError::EmptyRanking));
        assert_eq!(
            Ballot::new(ids("a a"), 1),
            Err(ElectionError::DuplicateRankingEntry(cid("a")))
        );
    }

    #[test]
    fn rewrite_moves_only_boundary_lines() {
        let all = Ballot::new(ids("a b c"), 3).unwrap();
        assert_eq!(all.rewritten().approved_count(), 2);
        let none = Ballot::new(ids("a b c"), 0).unwrap();
        assert_eq!(none.rewritten().approved_count(), 1);
        let mid = Ballot::new(ids("a b c"), 2).unwrap();
        assert_eq!(mid.rewritten(), mid);
    }

    #[test]
    fn rewrite_leaves_single_candidate_ballots_alone() {
        for approved in [0, 1] {
            let b = Ballot::new(ids("a"), approved).unwrap();
            assert_eq!(b.rewritten(), b);
            assert!(b.is_admissible());
        }
    }

    #[test]
    fn rewrite_is_idempotent_and_yields_admissible_ballots() {
        for approved in 0..=3 {
            let b = Ballot::new(ids("a b c"), approved).unwrap();
            let r = b.rewritten();
            assert!(r.is_admissible(), "t={approved} stays inadmissible");
            assert_eq!(r.rewritten(), r);
            assert_eq!(r.ranking(), b.ranking(), "rewrite must not reorder");
        }
    }

    #[test]
    fn scores_count_approval_prefixes() {
        let e = narrowing_flips_winner_election();
        let scores = e.scores();
        let expect = [("a", 3), ("b", 3), ("c", 4), ("d", 0)];
        for (label, score) in expect {
            assert_eq!(scores.get(&cid(label)), Some(score), "score({label})");
        }
        assert_eq!(e.unique_winner(), Some(cid("c")));
    }

    #[test]
    fn zero_votes_mean_all_tie_at_zero() {
        let e = Election::new(ids("a b"), vec![]).unwrap();
        assert_eq!(e.scores().get(&cid("a")), Some(0));
        assert_eq!(e.winners(), ids("a b"));
        assert_eq!(e.unique_winner(), None);
    }

    #[test]
    fn single_candidate_elections_are_always_won() {
        let e = Election::new(ids("a"), vec![Ballot::new(ids("a"), 0).unwrap()]).unwrap();
        assert_eq!(e.winners(), ids("a"));
        assert_eq!(e.unique_winner(), Some(cid("a")));
    }

    #[test]
    fn restriction_narrows_votes_and_rewrites_boundary_lines() {
        let e = narrowing_flips_winner_election();
        let r = e.restrict(&ids("a b c")).unwrap();
        assert_eq!(r.candidates(), ids("a b c").as_slice());
        let shown: Vec<String> = r.ballots().iter().map(|b| b.to_string()).collect();
        assert_eq!(shown, vec!["b c | a", "c | a b", "a b | c", "b a | c"]);
        assert_eq!(r.unique_winner(), Some(cid("b")));
        let scores = r.scores();
        assert_eq!(scores.get(&cid("b")), Some(3));
        assert_eq!(scores.get(&cid("a")), Some(2));
        assert_eq!(scores.get(&cid("c")), Some(2));
    }

    #[test]
    fn restriction_keeps_roster_order_and_ignores_keep_order() {
        let e = narrowing_flips_winner_election();
        let r = e.restrict(&ids("c a")).unwrap();
        assert_eq!(r.candidates(), ids("a c").as_slice());
    }

    #[test]
    fn restriction_rejects_empty_or_unknown_sets() {
        let e = narrowing_flips_winner_election();
        assert_eq!(e.restrict(&[]), Err(ElectionError::EmptyCandidateSet));
        assert_eq!(
            e.restrict(&ids("a z")),
            Err(ElectionError::UnknownCandidate(cid("z")))
        );
    }

    #[test]
    fn restriction_to_one_candidate_leaves_line_untouched() {
        let e = election("a b", &["a | b", "| b a"]);
        let r = e.restrict(&ids("b")).unwrap();
        // First vote approved only a, so b stays unapproved; no rewrite for
        // a single surviving candidate, and b still wins.
        assert_eq!(r.ballots()[0].approved_count(), 0);
        assert_eq!(r.ballots()[1].approved_count(), 0);
        assert_eq!(r.winners(), ids("b"));
    }

    #[test]
    fn preference_margins_are_antisymmetric_counts() {
        let e = narrowing_flips_winner_election();
        assert_eq!(e.preference_margin(&cid("b"), &cid("c")), Ok(2));
        assert_eq!(e.preference_margin(&cid("c"), &cid("b")), Ok(-2));
        assert_eq!(e.preference_margin(&cid("a"), &cid("d")), Ok(4));
        assert_eq!(e.preference_margin(&cid("d"), &cid("a")), Ok(-4));
        assert_eq!(
            e.preference_margin(&cid("a"), &cid("a")),
            Err(ElectionError::SameCandidate(cid("a")))
        );
        let empty = Election::new(ids("a b"), vec![]).unwrap();
        assert_eq!(empty.preference_margin(&cid("a"), &cid("b")), Ok(0));
    }

    #[test]
    fn elections_validate_votes_against_the_roster() {
        let bad = Election::new(ids("a b"), vec![ballot("a | c")]);
        assert!(matches!(bad, Err(ElectionError::NotAPermutation { .. })));
        let short = Election::new(ids("a b"), vec![Ballot::new(ids("a"), 1).unwrap()]);
        assert!(matches!(
            short,
            Err(ElectionError::WrongRankingLength { .. })
        ));
        let dup = Election::new(ids("a a"), vec![]);
        assert_eq!(dup, Err(ElectionError::DuplicateCandidate(cid("a"))));
    }

    #[test]
    fn ballot_display_places_the_line() {
        assert_eq!(ballot("a b | c").to_string(), "a b | c");
        assert_eq!(Ballot::new(ids("a b"), 0).unwrap().to_string(), "| a b");
        assert_eq!(Ballot::new(ids("a b"), 2).unwrap().to_string(), "a b |");
    }
}
