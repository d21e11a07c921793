//! Encoder agreement with independent references: the `rphonetic` crate for Soundex,
//! NYSIIS, Double Metaphone and Phonex, and the Python encoders in `tests/data` for the rest.

mod common;

use common::agreement;
use namevar::phonetic::PhoneticMethod;

fn check(method: PhoneticMethod, min_rate: f64) {
    let a = agreement(method);
    assert!(a.total >= 200);
    for (name, ours, theirs) in &a.mismatches {
        println!("{method}: {name}: ours {ours}, reference {theirs}");
    }
    println!("{method}: {}/{} agree", a.total - a.mismatches.len(), a.total);
    assert!(a.rate() >= min_rate, "{method} agreement {:.4} below {min_rate}", a.rate());
}

#[test]
fn soundex_matches_exactly() {
    check(PhoneticMethod::Soundex, 1.0);
}

#[test]
fn nysiis_matches_exactly() {
    check(PhoneticMethod::Nysiis, 1.0);
}

#[test]
fn double_metaphone_agrees() {
    check(PhoneticMethod::DoubleMetaphone, 0.95);
}

#[test]
fn phonix_agrees() {
    check(PhoneticMethod::Phonix, 0.95);
}

#[test]
fn phonex_agrees() {
    check(PhoneticMethod::Phonex, 1.0);
}

#[test]
fn fuzzy_soundex_agrees() {
    check(PhoneticMethod::FuzzySoundex, 1.0);
}

#[test]
fn modified_soundex_agrees() {
    check(PhoneticMethod::ModifiedSoundex, 1.0);
}
