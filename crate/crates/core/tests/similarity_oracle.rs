//! Similarity measures against strsim on random strings.

use namevar::similarity::{jaro, jaro_winkler, levenshtein_distance, levenshtein_similarity};
use proptest::prelude::*;

proptest! {
    #[test]
    fn levenshtein_matches_strsim(a in "[a-f]{0,14}", b in "[a-f]{0,14}") {
        prop_assert_eq!(levenshtein_distance(&a, &b), strsim::levenshtein(&a, &b));
    }

    #[test]
    fn normalized_levenshtein_matches_strsim(a in "[a-f]{0,14}", b in "[a-f]{0,14}") {
        prop_assert!((levenshtein_similarity(&a, &b) - strsim::normalized_levenshtein(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn jaro_matches_strsim(a in "[a-f]{1,14}", b in "[a-f]{1,14}") {
        prop_assert!((jaro(&a, &b) - strsim::jaro(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn jaro_winkler_matches_strsim(a in "[a-f]{1,14}", b in "[a-f]{1,14}") {
        // strsim withholds the prefix bonus below a Jaro of 0.7; the bonus here always applies.
        let j = strsim::jaro(&a, &b);
        let want = if j > 0.7 {
            strsim::jaro_winkler(&a, &b)
        } else {
            let prefix = a.bytes().zip(b.bytes()).take(4).take_while(|(x, y)| x == y).count();
            j + 0.1 * prefix as f64 * (1.0 - j)
        };
        prop_assert!((jaro_winkler(&a, &b) - want).abs() < 1e-12);
    }
}

#[test]
fn textbook_values() {
    assert_eq!(levenshtein_distance("johnson", "johnston"), 1);
    assert!((jaro("dixon", "dicksonx") - 0.7667).abs() < 1e-4);
    assert!((jaro_winkler("dwayne", "duane") - 0.84).abs() < 1e-9);
}
