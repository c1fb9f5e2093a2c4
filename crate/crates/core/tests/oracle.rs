//! Type-class ranks and distributions against brute-force enumeration.

mod common;

use common::*;

#[test]
fn small_named_sources_match_enumeration() {
    for n in 1..=6 {
        for (i, s) in [bsc(), uniform_binary(), noiseless()].iter().enumerate() {
            oracle_check(s, n, i as u64).unwrap();
        }
    }
}

#[test]
fn corpus_matches_enumeration_up_to_n6() {
    for (i, s) in corpus(20).iter().enumerate() {
        for n in 1..=6 {
            oracle_check(s, n, i as u64).unwrap();
        }
    }
}
