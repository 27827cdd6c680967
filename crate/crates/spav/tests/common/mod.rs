//! Seeded random generators shared by the integration suites. Everything
//! is deterministic per seed, so a failure reproduces exactly.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use spav::election::{Ballot, CandidateId, Election};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<CandidateId> {
    (1..=n)
        .map(|i| CandidateId::new(&format!("c{i}")).expect("generated labels are valid"))
        .collect()
}

/// A ballot with the approval line anywhere from 0 to the full length, so
/// both edge positions (the ones the sincerity rewrite moves) occur.
pub fn any_ballot(rng: &mut ChaCha8Rng, roster: &[CandidateId]) -> Ballot {
    let mut ranking = roster.to_vec();
    ranking.shuffle(rng);
    let approved = rng.gen_range(0..=ranking.len());
    Ballot::new(ranking, approved).expect("in range")
}

/// A ballot that already satisfies the sincerity rule.
pub fn admissible_ballot(rng: &mut ChaCha8Rng, roster: &[CandidateId]) -> Ballot {
    let mut ranking = roster.to_vec();
    ranking.shuffle(rng);
    let approved = if ranking.len() < 2 {
        rng.gen_range(0..=ranking.len())
    } else {
        rng.gen_range(1..ranking.len())
    };
    Ballot::new(ranking, approved).expect("in range")
}

/// A random election built from up to `max_types` ballot shapes, each
/// repeated up to `max_mult` times. All votes are admissible.
pub fn random_election(
    rng: &mut ChaCha8Rng,
    max_candidates: usize,
    max_types: usize,
    max_mult: usize,
) -> Election {
    let roster = labels(rng.gen_range(1..=max_candidates));
    let types = rng.gen_range(1..=max_types);
    let mut ballots = Vec::new();
    for _ in 0..types {
        let ballot = admissible_ballot(rng, &roster);
        for _ in 0..rng.gen_range(1..=max_mult) {
            ballots.push(ballot.clone());
        }
    }
    Election::new(roster, ballots).expect("roster and ballots agree")
}
