//! Phonix (Gadd): an ordered table of contextual letter-group substitutions
//! followed by a Soundex-like digit coding.
//!
//! Each substitution applies at the start of the word, at the end, strictly inside
//! it, or anywhere, optionally requiring a vowel (`v`: A E I O U) or consonant
//! (`c`: B..Z without vowels) immediately before and/or after the match.
//! Inside-word rules without conditions never touch the first or last letter.
//! A rule with conditions is applied for each admissible context letter in
//! alphabetical order, replacing every non-overlapping occurrence.
//!
//! Digits: B P = 1; C G J K Q = 2; D T = 3; L = 4; M N = 5; R = 6; F V = 7;
//! S X Z = 8; vowels, H, W, Y = 0. The key is the first letter (`V` for a vowel
//! or Y) followed by the digits of the remaining letters with runs collapsed and
//! zeros dropped, padded or cut to four characters.

use super::soundex::replace_all;

const DIGITS: &[u8; 26] = b"01230720022455012683070808";
const VOWELS: &[u8] = b"AEIOU";
const CONSONANTS: &[u8] = b"BCDFGHJKLMNPQRSTVWXYZ";
const CODE_LEN: usize = 4;

#[derive(Clone, Copy)]
enum At {
    Start,
    End,
    Middle,
    Any,
}

#[derive(Clone, Copy)]
enum Ctx {
    None,
    Vowel,
    Consonant,
}

impl Ctx {
    fn letters(self) -> Option<&'static [u8]> {
        match self {
            Ctx::None => None,
            Ctx::Vowel => Some(VOWELS),
            Ctx::Consonant => Some(CONSONANTS),
        }
    }
}

struct Rule {
    at: At,
    from: &'static [u8],
    to: &'static [u8],
    pre: Ctx,
    post: Ctx,
}

const fn r(at: At, from: &'static str, to: &'static str, pre: Ctx, post: Ctx) -> Rule {
    Rule {
        at,
        from: from.as_bytes(),
        to: to.as_bytes(),
        pre,
        post,
    }
}

use At::{Any, End, Middle, Start};
use Ctx::{Consonant as C, None as N, Vowel as V};

#[rustfmt::skip]
const RULES: &[Rule] = &[
    r(Any, "DG", "G", N, N),
    r(Any, "CO", "KO", N, N),
    r(Any, "CA", "KA", N, N),
    r(Any, "CU", "KU", N, N),
    r(Any, "CY", "SI", N, N),
    r(Any, "CI", "SI", N, N),
    r(Any, "CE", "SE", N, N),
    r(Start, "CL", "KL", N, V),
    r(Any, "CK", "K", N, N),
    r(End, "GC", "K", N, N),
    r(End, "JC", "K", N, N),
    r(Start, "CHR", "KR", N, V),
    r(Start, "CR", "KR", N, V),
    r(Start, "WR", "R", N, N),
    r(Any, "NC", "NK", N, N),
    r(Any, "CT", "KT", N, N),
    r(Any, "PH", "F", N, N),
    r(Any, "AA", "AR", N, N),
    r(Any, "SCH", "SH", N, N),
    r(Any, "BTL", "TL", N, N),
    r(Any, "GHT", "T", N, N),
    r(Any, "AUGH", "ARF", N, N),
    r(Middle, "LJ", "LD", V, V),
    r(Any, "LOUGH", "LOW", N, N),
    r(Start, "Q", "KW", N, N),
    r(Start, "KN", "N", N, N),
    r(End, "GN", "N", N, N),
    r(Any, "GHN", "N", N, N),
    r(End, "GNE", "N", N, N),
    r(Any, "GHNE", "NE", N, N),
    r(End, "GNES", "NS", N, N),
    r(Start, "GN", "N", N, N),
    r(Middle, "GN", "N", N, C),
    r(End, "GN", "N", N, N),
    r(Start, "PS", "S", N, N),
    r(Start, "PT", "T", N, N),
    r(Start, "CZ", "C", N, N),
    r(Middle, "WZ", "Z", V, N),
    r(Middle, "CZ", "CH", N, N),
    r(Any, "LZ", "LSH", N, N),
    r(Any, "RZ", "RSH", N, N),
    r(Middle, "Z", "S", N, V),
    r(Any, "ZZ", "TS", N, N),
    r(Middle, "Z", "TS", C, N),
    r(Any, "HROUG", "REW", N, N),
    r(Any, "OUGH", "OF", N, N),
    r(Middle, "Q", "KW", V, V),
    r(Middle, "J", "Y", V, V),
    r(Start, "YJ", "Y", N, V),
    r(Start, "GH", "G", N, N),
    r(End, "GH", "E", V, N),
    r(Start, "CY", "S", N, N),
    r(Any, "NX", "NKS", N, N),
    r(Start, "PF", "F", N, N),
    r(End, "DT", "T", N, N),
    r(End, "TL", "TIL", N, N),
    r(End, "DL", "DIL", N, N),
    r(Any, "YTH", "ITH", N, N),
    r(Start, "TJ", "CH", N, V),
    r(Start, "TSJ", "CH", N, V),
    r(Start, "TS", "T", N, V),
    r(Any, "TCH", "CH", N, N),
    r(Middle, "WSK", "VSKIE", V, N),
    r(End, "WSK", "VSKIE", V, N),
    r(Start, "MN", "N", N, V),
    r(Start, "PN", "N", N, V),
    r(Middle, "STL", "SL", V, N),
    r(End, "STL", "SL", V, N),
    r(End, "TNT", "ENT", N, N),
    r(End, "EAUX", "OH", N, N),
    r(Any, "EXCI", "ECS", N, N),
    r(Any, "X", "ECS", N, N),
    r(End, "NED", "ND", N, N),
    r(Any, "JR", "DR", N, N),
    r(End, "EE", "EA", N, N),
    r(Any, "ZS", "S", N, N),
    r(Middle, "R", "AH", V, C),
    r(End, "R", "AH", V, N),
    r(Middle, "HR", "AH", V, C),
    r(End, "HR", "AH", V, N),
    r(End, "HR", "AH", V, N),
    r(End, "RE", "AR", N, N),
    r(End, "R", "AH", V, N),
    r(Any, "LLE", "LE", N, N),
    r(End, "LE", "ILE", C, N),
    r(End, "LES", "ILES", C, N),
    r(End, "E", "", N, N),
    r(End, "ES", "S", N, N),
    r(End, "SS", "AS", V, N),
    r(End, "MB", "M", V, N),
    r(Any, "MPTS", "MPS", N, N),
    r(Any, "MPS", "MS", N, N),
    r(Any, "MPT", "MT", N, N),
];

fn concat(a: &[u8], b: &[u8], c: &[u8]) -> Vec<u8> {
    [a, b, c].concat()
}

fn replace_with_context(word: &[u8], rule: &Rule) -> Vec<u8> {
    let pres: Vec<&[u8]> = match rule.pre.letters() {
        Some(ls) => ls.chunks(1).collect(),
        None => vec![&[]],
    };
    let posts: Vec<&[u8]> = match rule.post.letters() {
        Some(ls) => ls.chunks(1).collect(),
        None => vec![&[]],
    };
    let mut w = word.to_vec();
    for pre in &pres {
        for post in &posts {
            w = replace_all(&w, &concat(pre, rule.from, post), &concat(pre, rule.to, post));
        }
    }
    w
}

fn apply(word: Vec<u8>, rule: &Rule) -> Vec<u8> {
    match rule.at {
        At::Start => {
            let hit = match rule.post.letters() {
                Some(ls) => ls
                    .iter()
                    .any(|&c| word.starts_with(rule.from) && word.get(rule.from.len()) == Some(&c)),
                None => word.starts_with(rule.from),
            };
            if hit {
                concat(rule.to, &word[rule.from.len()..], &[])
            } else {
                word
            }
        }
        At::End => {
            let hit = word.ends_with(rule.from)
                && match rule.pre.letters() {
                    Some(ls) => word.len() > rule.from.len()
                        && ls.contains(&word[word.len() - rule.from.len() - 1]),
                    None => true,
                };
            if hit {
                concat(&word[..word.len() - rule.from.len()], rule.to, &[])
            } else {
                word
            }
        }
        At::Middle => {
            if word.len() < 2 {
                return word;
            }
            let last = word.len() - 1;
            match (rule.pre.letters(), rule.post.letters()) {
                (None, None) => concat(
                    &word[..1],
                    &replace_with_context(&word[1..last], rule),
                    &word[last..],
                ),
                (None, Some(_)) => concat(&word[..1], &replace_with_context(&word[1..], rule), &[]),
                (Some(_), None) => concat(&replace_with_context(&word[..last], rule), &word[last..], &[]),
                (Some(_), Some(_)) => replace_with_context(&word, rule),
            }
        }
        At::Any => replace_with_context(&word, rule),
    }
}

pub fn phonix(word: &[u8]) -> String {
    let w = RULES.iter().fold(word.to_vec(), apply);
    let src = if w.is_empty() { &word[..1] } else { &w[..] };

    let first = match src[0] {
        b'A' | b'E' | b'I' | b'O' | b'U' | b'Y' => b'V',
        c => c,
    };
    let mut digits: Vec<u8> = Vec::new();
    for &c in &src[1..] {
        let d = DIGITS[(c - b'A') as usize];
        if digits.last() != Some(&d) {
            digits.push(d);
        }
    }
    let mut out = vec![first];
    out.extend(digits.into_iter().filter(|&d| d != b'0'));
    out.resize(CODE_LEN, b'0');
    out.truncate(CODE_LEN);
    String::from_utf8(out).expect("ascii")
}
