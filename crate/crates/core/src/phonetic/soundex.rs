//! The Soundex family. Inputs are nonempty uppercase ASCII letters.

/// American Soundex digits for `A`..=`Z`:
/// B F P V = 1; C G J K Q S X Z = 2; D T = 3; L = 4; M N = 5; R = 6; vowels, H, W, Y = 0.
const AMERICAN: &[u8; 26] = b"01230120022455012623010202";

/// Refined digits for `A`..=`Z`:
/// B P = 1; F V = 2; C K S = 3; G J = 4; Q X Z = 5; D T = 6; L = 7; M N = 8; R = 9.
const REFINED: &[u8; 26] = b"01360240043788015936020505";

/// Holmes & McCabe digits for `A`..=`Z`; `-` marks H, W and Y, which are dropped.
const FUZZY: &[u8; 26] = b"0193017-07745501769301-7-9";

const CODE_LEN: usize = 4;

fn digit(table: &[u8; 26], c: u8) -> u8 {
    table[(c - b'A') as usize]
}

/// First letter kept; later letters coded. H and W do not separate equal digits,
/// vowels do. Zero padded to four characters.
fn soundex_with(table: &[u8; 26], word: &[u8]) -> String {
    let mut code = vec![word[0]];
    let mut last = digit(table, word[0]);
    for &c in &word[1..] {
        if code.len() == CODE_LEN {
            break;
        }
        if c == b'H' || c == b'W' {
            continue;
        }
        let d = digit(table, c);
        if d != b'0' && d != last {
            code.push(d);
        }
        last = d;
    }
    code.resize(CODE_LEN, b'0');
    String::from_utf8(code).expect("ascii")
}

pub fn soundex(word: &[u8]) -> String {
    soundex_with(AMERICAN, word)
}

pub fn modified_soundex(word: &[u8]) -> String {
    soundex_with(REFINED, word)
}

fn replace_prefix(word: &mut Vec<u8>, from: &[&[u8]], to: &[u8]) -> bool {
    if from.iter().any(|p| word.starts_with(p)) {
        word.splice(..to.len(), to.iter().copied());
        true
    } else {
        false
    }
}

fn replace_suffix(word: &mut Vec<u8>, from: &[u8], to: &[u8]) -> bool {
    if word.ends_with(from) {
        let at = word.len() - from.len();
        word.truncate(at);
        word.extend_from_slice(to);
        true
    } else {
        false
    }
}

/// Non-overlapping, left-to-right replacement of every occurrence.
pub(super) fn replace_all(word: &[u8], from: &[u8], to: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(word.len() + 4);
    let mut i = 0;
    while i < word.len() {
        if word[i..].starts_with(from) {
            out.extend_from_slice(to);
            i += from.len();
        } else {
            out.push(word[i]);
            i += 1;
        }
    }
    out
}

/// Substitutions applied in order, each over the whole word.
const FUZZY_SUBSTITUTIONS: &[(&[u8], &[u8])] = &[
    (b"CA", b"KA"),
    (b"CC", b"KK"),
    (b"CK", b"KK"),
    (b"CE", b"SE"),
    (b"CHL", b"KL"),
    (b"CL", b"KL"),
    (b"CHR", b"KR"),
    (b"CR", b"KR"),
    (b"CI", b"SI"),
    (b"CO", b"KO"),
    (b"CU", b"KU"),
    (b"CY", b"SY"),
    (b"DG", b"GG"),
    (b"GH", b"HH"),
    (b"MAC", b"MK"),
    (b"MC", b"MK"),
    (b"NST", b"NSS"),
    (b"PF", b"FF"),
    (b"PH", b"FF"),
    (b"SCH", b"SSS"),
    (b"TIO", b"SIO"),
    (b"TIA", b"SIO"),
    (b"TCH", b"CHH"),
];

/// Fuzzy Soundex.
///
/// 1. Leading CS CZ TS TZ become SS; GN, KN and NG become NN; HR and WR become RR; HW becomes WW.
/// 2. Trailing CH becomes KK, NT becomes TT, RT becomes RR, RDT becomes RR.
/// 3. The q-gram substitutions in `FUZZY_SUBSTITUTIONS`, in order.
/// 4. Every letter is coded, H W Y dropped, runs of equal digits collapsed.
/// 5. The first digit is replaced by the first letter (unless that letter was dropped
///    in step 4, in which case the letter is prepended); zeros removed; padded to four.
pub fn fuzzy_soundex(word: &[u8]) -> String {
    let mut w = word.to_vec();
    let _ = replace_prefix(&mut w, &[b"CS", b"CZ", b"TS", b"TZ"], b"SS")
        || replace_prefix(&mut w, &[b"GN"], b"NN")
        || replace_prefix(&mut w, &[b"HR", b"WR"], b"RR")
        || replace_prefix(&mut w, &[b"HW"], b"WW")
        || replace_prefix(&mut w, &[b"KN", b"NG"], b"NN");
    let _ = replace_suffix(&mut w, b"CH", b"KK")
        || replace_suffix(&mut w, b"NT", b"TT")
        || replace_suffix(&mut w, b"RT", b"RR")
        || replace_suffix(&mut w, b"RDT", b"RR");
    for (from, to) in FUZZY_SUBSTITUTIONS {
        w = replace_all(&w, from, to);
    }

    let mut digits: Vec<u8> = Vec::with_capacity(w.len());
    for &c in &w {
        let d = digit(FUZZY, c);
        if d != b'-' && digits.last() != Some(&d) {
            digits.push(d);
        }
    }
    let mut code = vec![w[0]];
    if matches!(w[0], b'H' | b'W' | b'Y') {
        code.extend_from_slice(&digits);
    } else {
        code.extend_from_slice(digits.get(1..).unwrap_or(&[]));
    }
    let mut out: Vec<u8> = code
        .into_iter()
        .enumerate()
        .filter(|&(i, c)| i == 0 || c != b'0')
        .map(|(_, c)| c)
        .collect();
    out.resize(CODE_LEN, b'0');
    out.truncate(CODE_LEN);
    String::from_utf8(out).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(f: fn(&[u8]) -> String, w: &str) -> String {
        f(w.as_bytes())
    }

    #[test]
    fn american_collapse_rules() {
        assert_eq!(s(soundex, "ROBERT"), "R163");
        assert_eq!(s(soundex, "RUPERT"), "R163");
        // H between equal digits does not separate them, a vowel does.
        assert_eq!(s(soundex, "ASHCRAFT"), "A261");
        assert_eq!(s(soundex, "TYMCZAK"), "T522");
        assert_eq!(s(soundex, "PFISTER"), "P236");
        assert_eq!(s(soundex, "LEE"), "L000");
    }

    #[test]
    fn refined_table_separates_classes() {
        assert_eq!(s(modified_soundex, "ROBERT"), "R196");
        assert_ne!(s(modified_soundex, "BAKER"), s(modified_soundex, "BAGER"));
        assert_eq!(s(soundex, "BAKER"), s(soundex, "BAGER"));
    }

    #[test]
    fn fuzzy_examples() {
        assert_eq!(s(fuzzy_soundex, "PHILLIPS"), "F419");
        assert_eq!(s(fuzzy_soundex, "KNIGHT"), "N300");
        assert_eq!(s(fuzzy_soundex, "WRIGHT"), "R300");
        assert_eq!(s(fuzzy_soundex, "SMITH"), "S530");
    }

    #[test]
    fn replace_all_is_non_overlapping() {
        assert_eq!(replace_all(b"CCC", b"CC", b"KK"), b"KKC");
        assert_eq!(replace_all(b"ABAB", b"AB", b""), b"");
    }
}
