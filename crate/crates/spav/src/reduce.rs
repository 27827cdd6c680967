//! Compilers from two classic covering problems into control instances.
//!
//! A hitting-set question (pick at most `k` elements meeting every set in a
//! collection) compiles into adding-candidates, deleting-candidates and
//! ties-promote voter-partition instances; an exact-cover-by-three-sets
//! question compiles into a ties-eliminate voter-partition instance. Each
//! compiler emits the closed-form quantities the construction promises
//! (vote totals, score gaps) and, when the source instance is solvable and
//! the construction admits one, a ready-made witness.
//! [`verify_equivalence`] replays a compiled instance end to end: the
//! quantities must match recomputation, the witness must check out, and the
//! exhaustive decider's verdict must agree with directly solving the source.

use std::fmt;

use thiserror::Error;

use crate::control::{ControlError, ControlInstance, Goal, TieRule, Witness};
use crate::election::{Ballot, CandidateId, Election, ElectionError};
use crate::solve::{decide_brute, for_each_subset, Budget, Outcome, SolveError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("element list is empty")]
    NoElements,
    #[error("duplicate element {0}")]
    DuplicateElement(CandidateId),
    #[error("element label {0} is reserved by the construction")]
    ReservedLabel(CandidateId),
    #[error("set collection is empty")]
    NoSets,
    #[error("set {index} is empty")]
    EmptySet { index: usize },
    #[error("set {index} references element {element} outside the element list")]
    ElementOutOfRange { index: usize, element: usize },
    #[error("set {index} lists an element twice")]
    DuplicateInSet { index: usize },
    #[error("bound must satisfy 1 <= k <= {m}, got {k}")]
    BadBound { k: usize, m: usize },
    #[error("deleting-candidates compilation needs k < m, got k = {k}, m = {m}")]
    BoundNotBelowElementCount { k: usize, m: usize },
    #[error(
        "voter-partition compilation needs n(k+1)+1 <= m-k, got {lhs} > {rhs}; \
         grow the element list or shrink the collection"
    )]
    NotSparseEnough { lhs: usize, rhs: usize },
    #[error("element count {0} is not a multiple of three")]
    NotTripleSized(usize),
    #[error("need at least six elements, got {0}")]
    TooFewElements(usize),
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Control(#[from] crate::control::ControlError),
    #[error("compiled instance disagrees with its own prediction {name}: predicted {predicted}, built {built}")]
    PredictionMismatch {
        name: &'static str,
        predicted: i64,
        built: i64,
    },
}

/// Pick at most `k` of `elements` so that every set in the collection
/// contains at least one picked element. Elements double as candidate
/// labels when compiled, so they are [`CandidateId`]s; sets are element
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSetInstance {
    elements: Vec<CandidateId>,
    sets: Vec<Vec<usize>>,
    k: usize,
}

impl HittingSetInstance {
    pub fn new(
        elements: Vec<CandidateId>,
        sets: Vec<Vec<usize>>,
        k: usize,
    ) -> Result<Self, ReduceError> {
        if elements.is_empty() {
            return Err(ReduceError::NoElements);
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(ReduceError::DuplicateElement(e.clone()));
            }
        }
        if sets.is_empty() {
            return Err(ReduceError::NoSets);
        }
        let mut sets = sets;
        for (index, set) in sets.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(ReduceError::EmptySet { index: index + 1 });
            }
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(ReduceError::DuplicateInSet { index: index + 1 });
            }
            if let Some(&element) = set.iter().find(|&&e| e >= elements.len()) {
                return Err(ReduceError::ElementOutOfRange {
                    index: index + 1,
                    element,
                });
            }
        }
        if k < 1 || k > elements.len() {
            return Err(ReduceError::BadBound {
                k,
                m: elements.len(),
            });
        }
        Ok(HittingSetInstance { elements, sets, k })
    }

    pub fn elements(&self) -> &[CandidateId] {
        &self.elements
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn bound(&self) -> usize {
        self.k
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn is_hitting_set(&self, picked: &[usize]) -> bool {
        self.sets
            .iter()
            .all(|set| set.iter().any(|e| picked.contains(e)))
    }
}

/// The smallest hitting set within the bound, as sorted element indices:
/// subsets are tried by size and then lexicographically, so the answer is
/// canonical. `None` when no subset within the bound hits every set.
pub fn solve_hitting_set(h: &HittingSetInstance) -> Option<Vec<usize>> {
    let mut found: Option<Vec<usize>> = None;
    for_each_subset(h.num_elements(), h.bound(), |chosen| {
        if h.is_hitting_set(chosen) {
            found = Some(chosen.to_vec());
            return Ok(false);
        }
        Ok::<bool, SolveError>(true)
    })
    .expect("subset enumeration cannot fail");
    found
}

/// Cover a 3m-element universe exactly with m of the given three-element
/// sets. Triples are element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cInstance {
    elements: Vec<CandidateId>,
    triples: Vec<[usize; 3]>,
}

impl X3cInstance {
    pub fn new(
        elements: Vec<CandidateId>,
        triples: Vec<[usize; 3]>,
    ) -> Result<Self, ReduceError> {
        if elements.len() < 6 {
            return Err(ReduceError::TooFewElements(elements.len()));
        }
        if elements.len() % 3 != 0 {
            return Err(ReduceError::NotTripleSized(elements.len()));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(ReduceError::DuplicateElement(e.clone()));
            }
        }
        if triples.is_empty() {
            return Err(ReduceError::NoSets);
        }
        let mut triples = triples;
        for (index, triple) in triples.iter_mut().enumerate() {
            triple.sort_unstable();
            if triple[0] == triple[1] || triple[1] == triple[2] {
                return Err(ReduceError::DuplicateInSet { index: index + 1 });
            }
            if triple[2] >= elements.len() {
                return Err(ReduceError::ElementOutOfRange {
                    index: index + 1,
                    element: triple[2],
                });
            }
        }
        Ok(X3cInstance { elements, triples })
    }

    pub fn elements(&self) -> &[CandidateId] {
        &self.elements
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// m: the number of triples an exact cover must use.
    pub fn cover_size(&self) -> usize {
        self.elements.len() / 3
    }

    pub fn is_exact_cover(&self, picked: &[usize]) -> bool {
        let mut hit = vec![0usize; self.elements.len()];
        for &t in picked {
            for &e in &self.triples[t] {
                hit[e] += 1;
            }
        }
        hit.iter().all(|&h| h == 1)
    }
}

/// The canonically first exact cover, as sorted triple indices: subsets of
/// m triples are tried lexicographically. `None` when no exact cover
/// exists.
pub fn solve_x3c(x: &X3cInstance) -> Option<Vec<usize>> {
    let m = x.cover_size();
    if x.triples().len() < m {
        return None;
    }
    let mut found: Option<Vec<usize>> = None;
    for_each_subset(x.triples().len(), m, |chosen| {
        if chosen.len() == m && x.is_exact_cover(chosen) {
            found = Some(chosen.to_vec());
            return Ok(false);
        }
        Ok::<bool, SolveError>(true)
    })
    .expect("subset enumeration cannot fail");
    found
}

/// A source instance kept alongside its compiled control instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionSource {
    HittingSet(HittingSetInstance),
    ExactCover(X3cInstance),
}

impl ReductionSource {
    /// Solves the source directly: the certificate indices, if any.
    pub fn certificate(&self) -> Option<Vec<usize>> {
        match self {
            ReductionSource::HittingSet(h) => solve_hitting_set(h),
            ReductionSource::ExactCover(x) => solve_x3c(x),
        }
    }
}

/// A closed-form quantity a compilation promises about its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictedQuantity {
    pub name: &'static str,
    pub value: i64,
}

impl fmt::Display for PredictedQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, self.value)
    }
}

/// A compiled control instance: the source it came from, the instance, the
/// promised quantities, and a witness derived from a source certificate
/// when the construction supports one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub source: ReductionSource,
    pub instance: ControlInstance,
    pub predicted: Vec<PredictedQuantity>,
    pub witness: Option<Witness>,
}

fn reserved(label: &str) -> CandidateId {
    CandidateId::new(label).expect("reserved labels are valid")
}

fn check_reserved(elements: &[CandidateId], taken: &[CandidateId]) -> Result<(), ReduceError> {
    if let Some(e) = elements.iter().find(|e| taken.contains(e)) {
        return Err(ReduceError::ReservedLabel(e.clone()));
    }
    Ok(())
}

/// `elements` minus the ones at `indices`, in element order.
fn complement(elements: &[CandidateId], indices: &[usize]) -> Vec<CandidateId> {
    elements
        .iter()
        .enumerate()
        .filter(|(j, _)| !indices.contains(j))
        .map(|(_, e)| e.clone())
        .collect()
}

fn picked(elements: &[CandidateId], indices: &[usize]) -> Vec<CandidateId> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.iter().map(|&j| elements[j].clone()).collect()
}

/// Extends a certificate to exactly `k` element indices with the smallest
/// unused ones; a larger hitting set stays a hitting set.
fn pad_certificate(certificate: &[usize], k: usize, m: usize) -> Vec<usize> {
    let mut padded = certificate.to_vec();
    for e in 0..m {
        if padded.len() >= k {
            break;
        }
        if !padded.contains(&e) {
            padded.push(e);
        }
    }
    padded.sort_unstable();
    padded
}

fn repeat_ballot(ballots: &mut Vec<Ballot>, ballot: Ballot, times: usize) {
    for _ in 0..times {
        ballots.push(ballot.clone());
    }
}

fn ballot_over(groups: &[&[CandidateId]], approved: usize) -> Ballot {
    let ranking: Vec<CandidateId> = groups.iter().flat_map(|g| g.iter().cloned()).collect();
    Ballot::new(ranking, approved).expect("construction ballots are well-formed")
}

impl HittingSetInstance {
    /// The election every hitting-set compilation shares: candidates are
    /// the elements plus a leader `c` and a challenger `w`, and the votes
    /// are stacked so that `c` beats `w` by `2k(n-1) + 2n - 1` when only
    /// the two of them stand, while each element's supporters can tip the
    /// balance to `w` exactly when the chosen elements hit every set.
    ///
    /// Roster order is `c`, `w`, then the elements. Vote groups, in order:
    /// leader votes `c | w B`, challenger votes `w | c B`, per-set votes
    /// `S_i | c w (B - S_i)`, and per-element votes `b_j | w c (B - b_j)`.
    pub fn leader_challenger_election(&self) -> Result<Election, ReduceError> {
        let (m, n, k) = (self.num_elements(), self.num_sets(), self.bound());
        let c = reserved("c");
        let w = reserved("w");
        check_reserved(&self.elements, &[c.clone(), w.clone()])?;
        let mut roster = vec![c.clone(), w.clone()];
        roster.extend(self.elements.iter().cloned());

        let mut ballots = Vec::new();
        repeat_ballot(
            &mut ballots,
            ballot_over(&[&[c.clone()], &[w.clone()], &self.elements], 1),
            2 * (m - k) + 2 * n * (k + 1) + 4,
        );
        repeat_ballot(
            &mut ballots,
            ballot_over(&[&[w.clone()], &[c.clone()], &self.elements], 1),
            2 * n * (k + 1) + 5,
        );
        for set in &self.sets {
            let in_set = picked(&self.elements, set);
            let rest = complement(&self.elements, set);
            repeat_ballot(
                &mut ballots,
                ballot_over(&[&in_set, &[c.clone(), w.clone()], &rest], in_set.len()),
                2 * (k + 1),
            );
        }
        for j in 0..m {
            let rest = complement(&self.elements, &[j]);
            repeat_ballot(
                &mut ballots,
                ballot_over(
                    &[&[self.elements[j].clone()], &[w.clone(), c.clone()], &rest],
                    1,
                ),
                2,
            );
        }
        Ok(Election::new(roster, ballots)?)
    }

    fn leader_challenger_predictions(&self) -> Vec<PredictedQuantity> {
        let (m, n, k) = (
            self.num_elements() as i64,
            self.num_sets() as i64,
            self.bound() as i64,
        );
        vec![
            PredictedQuantity {
                name: "voters",
                value: 2 * (m - k) + 6 * n * (k + 1) + 2 * m + 9,
            },
            PredictedQuantity {
                name: "pair-gap-c-minus-w",
                value: 2 * k * (n - 1) + 2 * n - 1,
            },
        ]
    }

    /// Compiles into an adding-candidates instance: the elements are the
    /// spoiler pool, only `c` and `w` stand initially, and picking spoilers
    /// that hit every set makes `w` the unique winner. Constructive control
    /// asks for `w`, destructive control asks against `c`; with `limited`
    /// the chair may add at most `k` spoilers. When the source has a
    /// hitting set, the witness adds it (padded to exactly `k` elements).
    pub fn to_add_candidates(
        &self,
        limited: bool,
        goal: Goal,
    ) -> Result<ReductionOutput, ReduceError> {
        let election = self.leader_challenger_election()?;
        let goal_candidate = match goal {
            Goal::Constructive => reserved("w"),
            Goal::Destructive => reserved("c"),
        };
        let instance = ControlInstance::add_candidates(
            goal,
            limited.then_some(self.bound()),
            election,
            self.elements.clone(),
            goal_candidate,
        )?;
        let witness = solve_hitting_set(self).map(|certificate| {
            let indices = pad_certificate(&certificate, self.bound(), self.num_elements());
            Witness::AddedCandidates(picked(&self.elements, &indices))
        });
        let output = ReductionOutput {
            source: ReductionSource::HittingSet(self.clone()),
            instance,
            predicted: self.leader_challenger_predictions(),
            witness,
        };
        confirm_predictions(&output)?;
        Ok(output)
    }

    /// Compiles into a ties-promote voter-partition instance over the full
    /// leader/challenger election. Requires the source to be sparse:
    /// `n(k+1) + 1 <= m - k`, which keeps the leader votes so numerous
    /// that only partitions mirroring a hitting set can dethrone `c`.
    /// No witness is emitted; the exhaustive decider finds one.
    pub fn to_partition_voters(&self, goal: Goal) -> Result<ReductionOutput, ReduceError> {
        let (m, n, k) = (self.num_elements(), self.num_sets(), self.bound());
        let lhs = n * (k + 1) + 1;
        let rhs = m.saturating_sub(k);
        if lhs > rhs {
            return Err(ReduceError::NotSparseEnough { lhs, rhs });
        }
        let election = self.leader_challenger_election()?;
        let goal_candidate = match goal {
            Goal::Constructive => reserved("w"),
            Goal::Destructive => reserved("c"),
        };
        let instance = ControlInstance::partition_voters(
            goal,
            TieRule::Promote,
            election,
            goal_candidate,
        )?;
        let output = ReductionOutput {
            source: ReductionSource::HittingSet(self.clone()),
            instance,
            predicted: self.leader_challenger_predictions(),
            witness: None,
        };
        confirm_predictions(&output)?;
        Ok(output)
    }

    /// Compiles into a constructive deleting-candidates instance: the
    /// candidates are the elements plus the challenger `w`, every element
    /// outscores `w` by `2(m-k) - 1`, and deleting the `m - k` elements
    /// outside a size-k hitting set lifts `w` to a one-vote lead — the
    /// deleted elements' supporters lose their whole approval prefix, so
    /// their line slides over to `w`. Requires `k < m`. When the source
    /// has a hitting set, the witness deletes the complement of its
    /// padding to exactly `k` elements.
    ///
    /// Roster order is the elements then `w`. Vote groups, in order:
    /// per-set votes `S_i | (B - S_i) w` and `(B - S_i) w | S_i`,
    /// per-element votes `b_j | w (B - b_j)`, element-bloc votes `B | w`,
    /// and challenger votes `w | B`.
    pub fn to_delete_candidates(&self) -> Result<ReductionOutput, ReduceError> {
        let (m, n, k) = (self.num_elements(), self.num_sets(), self.bound());
        if k >= m {
            return Err(ReduceError::BoundNotBelowElementCount { k, m });
        }
        let w = reserved("w");
        check_reserved(&self.elements, &[w.clone()])?;
        let mut roster = self.elements.clone();
        roster.push(w.clone());

        let mut ballots = Vec::new();
        for set in &self.sets {
            let in_set = picked(&self.elements, set);
            let rest = complement(&self.elements, set);
            repeat_ballot(
                &mut ballots,
                ballot_over(&[&in_set, &rest, &[w.clone()]], in_set.len()),
                2 * (k + 1),
            );
            repeat_ballot(
                &mut ballots,
                ballot_over(&[&rest, &[w.clone()], &in_set], rest.len() + 1),
                2 * (k + 1),
            );
        }
        for j in 0..m {
            let rest = complement(&self.elements, &[j]);
            repeat_ballot(
                &mut ballots,
                ballot_over(&[&[self.elements[j].clone()], &[w.clone()], &rest], 1),
                2,
            );
        }
        repeat_ballot(
            &mut ballots,
            ballot_over(&[&self.elements, &[w.clone()]], m),
            2 * (m - k),
        );
        repeat_ballot(&mut ballots, ballot_over(&[&[w.clone()], &self.elements], 1), 3);

        let election = Election::new(roster, ballots)?;
        let instance =
            ControlInstance::delete_candidates(Goal::Constructive, m - k, election, w)?;
        let witness = solve_hitting_set(self).map(|certificate| {
            let keep = pad_certificate(&certificate, k, m);
            let delete: Vec<usize> = (0..m).filter(|j| !keep.contains(j)).collect();
            Witness::DeletedCandidates(picked(&self.elements, &delete))
        });
        let (mi, ni, ki) = (m as i64, n as i64, k as i64);
        let output = ReductionOutput {
            source: ReductionSource::HittingSet(self.clone()),
            instance,
            predicted: vec![
                PredictedQuantity {
                    name: "voters",
                    value: 4 * ni * (ki + 1) + 4 * mi - 2 * ki + 3,
                },
                PredictedQuantity {
                    name: "gap-w-minus-element",
                    value: 1 - 2 * (mi - ki),
                },
            ],
            witness,
        };
        confirm_predictions(&output)?;
        Ok(output)
    }
}

impl X3cInstance {
    /// The padded triple list the voter-partition compilation works over:
    /// copies of the first triple are appended until there are at least as
    /// many triples as an exact cover needs. Padding never changes
    /// solvability (a duplicate never helps an exact cover when the
    /// original did not) and keeps original triple indices stable.
    fn padded_triples(&self) -> Vec<[usize; 3]> {
        let mut triples = self.triples.clone();
        while triples.len() < self.cover_size() {
            triples.push(self.triples[0]);
        }
        triples
    }

    /// Compiles into a constructive ties-eliminate voter-partition
    /// instance. Candidates: a challenger `w`, two blockers `x` and `y`,
    /// the elements, and one pacer `z_i` per (padded) triple; every element
    /// scores exactly `n` overall. A voter split can make `w` the unique
    /// winner exactly when some `m` triples cover the elements: the first
    /// cell then ties `x` and `y` at the top (ties eliminate both) while
    /// `w` uniquely tops the rest. When the source has an exact cover, the
    /// witness is that split.
    ///
    /// Roster order is `w`, `x`, `y`, the elements, then the pacers. Vote
    /// groups, in order: per-triple votes `y S_i | w ...`, per-pacer votes
    /// `y z_i | w ...`, per-pacer counterweight votes
    /// `w (Z - z_i) B_i | ...` (where `B_i` holds the elements whose triple
    /// tally keeps them level), and `n + m` blocker votes `x | y ...`.
    pub fn to_partition_voters(&self) -> Result<ReductionOutput, ReduceError> {
        let m = self.cover_size();
        let triples = self.padded_triples();
        let n = triples.len();
        let w = reserved("w");
        let x = reserved("x");
        let y = reserved("y");
        let pacers: Vec<CandidateId> = (1..=n)
            .map(|i| reserved(&format!("z{i}")))
            .collect();
        let mut taken = vec![w.clone(), x.clone(), y.clone()];
        taken.extend(pacers.iter().cloned());
        check_reserved(&self.elements, &taken)?;

        let mut roster = vec![w.clone(), x.clone(), y.clone()];
        roster.extend(self.elements.iter().cloned());
        roster.extend(pacers.iter().cloned());

        // How often each element occurs across the padded triples.
        let mut occurrences = vec![0usize; self.elements.len()];
        for triple in &triples {
            for &e in triple {
                occurrences[e] += 1;
            }
        }

        let mut ballots = Vec::new();
        for triple in &triples {
            let in_triple = picked(&self.elements, triple);
            let rest = complement(&self.elements, triple);
            ballots.push(ballot_over(
                &[&[y.clone()], &in_triple, &[w.clone()], &rest, &[x.clone()], &pacers],
                4,
            ));
        }
        for i in 0..n {
            let other_pacers = complement(&pacers, &[i]);
            ballots.push(ballot_over(
                &[
                    &[y.clone(), pacers[i].clone(), w.clone()],
                    &self.elements,
                    &[x.clone()],
                    &other_pacers,
                ],
                2,
            ));
        }
        for i in 0..n {
            // Elements appearing in few triples get topped up here so all
            // of them finish with the same overall score.
            let level: Vec<usize> = (0..self.elements.len())
                .filter(|&j| i + 1 <= n - occurrences[j])
                .collect();
            let in_level = picked(&self.elements, &level);
            let out_level = complement(&self.elements, &level);
            let other_pacers = complement(&pacers, &[i]);
            ballots.push(ballot_over(
                &[
                    &[w.clone()],
                    &other_pacers,
                    &in_level,
                    &[x.clone(), y.clone(), pacers[i].clone()],
                    &out_level,
                ],
                1 + (n - 1) + in_level.len(),
            ));
        }
        repeat_ballot(
            &mut ballots,
            ballot_over(
                &[&[x.clone(), y.clone()], &self.elements, &[w.clone()], &pacers],
                1,
            ),
            n + m,
        );

        let election = Election::new(roster, ballots)?;
        let instance =
            ControlInstance::partition_voters(Goal::Constructive, TieRule::Eliminate, election, w)?;
        let witness = solve_x3c(self).map(|cover| {
            // First cell: the cover's triple votes, all pacer votes, all
            // blocker votes; x and y tie there while w sweeps the rest.
            let mut first: Vec<usize> = cover.to_vec();
            first.extend(n..2 * n);
            first.extend(3 * n..4 * n + m);
            first.sort_unstable();
            let second: Vec<usize> = (0..4 * n + m).filter(|v| !first.contains(v)).collect();
            Witness::VoterPartition(first, second)
        });
        let output = ReductionOutput {
            source: ReductionSource::ExactCover(self.clone()),
            instance,
            predicted: vec![
                PredictedQuantity {
                    name: "voters",
                    value: (4 * n + m) as i64,
                },
                PredictedQuantity {
                    name: "candidates",
                    value: (3 * m + 3 + n) as i64,
                },
                PredictedQuantity {
                    name: "element-score",
                    value: n as i64,
                },
            ],
            witness,
        };
        confirm_predictions(&output)?;
        Ok(output)
    }
}

/// Recomputes every promised quantity from the built instance itself.
fn recomputed_quantities(output: &ReductionOutput) -> Result<Vec<PredictedQuantity>, ReduceError> {
    let election = output.instance.base();
    let mut quantities = Vec::new();
    for q in &output.predicted {
        let value = match q.name {
            "voters" => election.ballots().len() as i64,
            "candidates" => election.candidates().len() as i64,
            "pair-gap-c-minus-w" => {
                let pair = election.restrict(&[reserved("c"), reserved("w")])?;
                let scores = pair.scores();
                scores.get(&reserved("c")).unwrap() as i64
                    - scores.get(&reserved("w")).unwrap() as i64
            }
            "gap-w-minus-element" => {
                let scores = election.scores();
                let w_score = scores.get(&reserved("w")).unwrap() as i64;
                let mut gaps = election
                    .candidates()
                    .iter()
                    .filter(|c| **c != reserved("w"))
                    .map(|c| w_score - scores.get(c).unwrap() as i64);
                let first = gaps.next().expect("at least one element");
                if gaps.all(|g| g == first) {
                    first
                } else {
                    // Report an impossible value so the mismatch surfaces.
                    i64::MIN
                }
            }
            "element-score" => {
                let scores = election.scores();
                let elements = match &output.source {
                    ReductionSource::ExactCover(x) => x.elements(),
                    ReductionSource::HittingSet(h) => h.elements(),
                };
                let mut element_scores =
                    elements.iter().map(|e| scores.get(e).unwrap() as i64);
                let first = element_scores.next().expect("at least one element");
                if element_scores.all(|s| s == first) {
                    first
                } else {
                    i64::MIN
                }
            }
            other => unreachable!("unknown predicted quantity {other}"),
        };
        quantities.push(PredictedQuantity {
            name: q.name,
            value,
        });
    }
    Ok(quantities)
}

fn confirm_predictions(output: &ReductionOutput) -> Result<(), ReduceError> {
    for (predicted, built) in output.predicted.iter().zip(recomputed_quantities(output)?) {
        if predicted.value != built.value {
            return Err(ReduceError::PredictionMismatch {
                name: predicted.name,
                predicted: predicted.value,
                built: built.value,
            });
        }
    }
    Ok(())
}

/// One check of an end-to-end replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The result of replaying a compiled instance: every check must pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub checks: Vec<EquivalenceCheck>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Replays a compiled instance end to end: the promised quantities must
/// match recomputation, a constructed witness must achieve the chair's
/// goal, deleting-candidates witnesses must shift every score gap to
/// exactly +1, and the exhaustive decider's verdict on the compiled
/// instance must agree with solving the source directly. Any mismatch
/// fails the report; an exhausted budget surfaces as an error.
pub fn verify_equivalence(
    output: &ReductionOutput,
    budget: Budget,
) -> Result<EquivalenceReport, SolveError> {
    let mut checks = Vec::new();

    let recomputed = recomputed_quantities(output).map_err(|e| SolveError::SelfCheckFailed {
        detail: e.to_string(),
    })?;
    for (predicted, built) in output.predicted.iter().zip(&recomputed) {
        checks.push(EquivalenceCheck {
            name: predicted.name,
            passed: predicted.value == built.value,
            detail: format!("predicted {}, built {}", predicted.value, built.value),
        });
    }

    let certificate = output.source.certificate();
    match (&output.witness, &certificate) {
        (Some(witness), _) => {
            let passed = output.instance.check_witness(witness)?;
            checks.push(EquivalenceCheck {
                name: "witness",
                passed,
                detail: if passed {
                    "constructed witness achieves the goal".into()
                } else {
                    "constructed witness fails".into()
                },
            });
        }
        (None, Some(_)) => checks.push(EquivalenceCheck {
            name: "witness",
            passed: true,
            detail: "construction emits no witness; exhaustive search supplies it".into(),
        }),
        (None, None) => checks.push(EquivalenceCheck {
            name: "witness",
            passed: true,
            detail: "source is unsolvable, no witness expected".into(),
        }),
    }

    if let (Some(Witness::DeletedCandidates(deleted)), ReductionSource::HittingSet(h)) =
        (&output.witness, &output.source)
    {
        let election = output.instance.base();
        let keep: Vec<CandidateId> = election
            .candidates()
            .iter()
            .filter(|c| !deleted.contains(c))
            .cloned()
            .collect();
        let after = election.restrict(&keep).map_err(ControlError::from)?;
        let scores = after.scores();
        let w_score = scores.get(&reserved("w")).unwrap() as i64;
        let passed = h
            .elements()
            .iter()
            .filter(|e| keep.contains(e))
            .all(|e| w_score - scores.get(e).unwrap() as i64 == 1);
        checks.push(EquivalenceCheck {
            name: "post-deletion-gap",
            passed,
            detail: "challenger must lead every kept element by exactly one".into(),
        });
    }

    let decision = decide_brute(&output.instance, budget)?;
    let decided_possible = matches!(decision.outcome, Outcome::Possible(_));
    let source_solvable = certificate.is_some();
    checks.push(EquivalenceCheck {
        name: "verdict-agreement",
        passed: decided_possible == source_solvable,
        detail: format!(
            "source {}, compiled instance {} ({} nodes)",
            if source_solvable { "solvable" } else { "unsolvable" },
            if decided_possible { "controllable" } else { "uncontrollable" },
            decision.nodes
        ),
    });

    Ok(EquivalenceReport { checks })
}
