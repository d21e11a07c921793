//! NYSIIS with Taft's original rule set and six character keys.
//!
//! 1. Prefixes: MAC→MCC, KN→NN, K→C, PH/PF→FF, SCH→SSS.
//! 2. Suffixes: EE/IE→Y, DT/RT/RD/NT/ND→D.
//! 3. The first letter starts the key.
//! 4. Every later letter is rewritten in place, looking at its (already rewritten)
//!    predecessor: EV→AF, vowels→A, Q→G, Z→S, M→N, KN→NN, K→C, SCH→SSS, PH→FF,
//!    H→previous letter unless between vowels, W→previous letter after a vowel.
//!    The rewritten letter is appended when it differs from its predecessor.
//! 5. Trailing S removed, trailing AY→Y, trailing A removed (a key never shrinks to nothing).
//! 6. Truncated to six characters.

use super::is_vowel;

const KEY_LEN: usize = 6;

pub fn nysiis(word: &[u8]) -> String {
    let mut w = word.to_vec();
    if w.starts_with(b"MAC") {
        w[1] = b'C';
    }
    if w.starts_with(b"KN") {
        w[0] = b'N';
    }
    if w[0] == b'K' {
        w[0] = b'C';
    }
    if w.starts_with(b"PH") || w.starts_with(b"PF") {
        w[0] = b'F';
        w[1] = b'F';
    }
    if w.starts_with(b"SCH") {
        w[1] = b'S';
        w[2] = b'S';
    }
    if w.ends_with(b"EE") || w.ends_with(b"IE") {
        w.truncate(w.len() - 2);
        w.push(b'Y');
    }
    if [&b"DT"[..], b"RT", b"RD", b"NT", b"ND"]
        .iter()
        .any(|s| w.ends_with(s))
    {
        w.truncate(w.len() - 2);
        w.push(b'D');
    }

    let mut key = vec![w[0]];
    let at = |w: &[u8], i: usize| w.get(i).copied().unwrap_or(b' ');
    for i in 1..w.len() {
        let prev = w[i - 1];
        let cur = w[i];
        let next = at(&w, i + 1);
        let after = at(&w, i + 2);
        let rewrite: &[u8] = match cur {
            b'E' if next == b'V' => b"AF",
            c if is_vowel(c) => b"A",
            b'Q' => b"G",
            b'Z' => b"S",
            b'M' => b"N",
            b'K' if next == b'N' => b"NN",
            b'K' => b"C",
            b'S' if next == b'C' && after == b'H' => b"SSS",
            b'P' if next == b'H' => b"FF",
            b'H' if !is_vowel(prev) || !is_vowel(next) => std::slice::from_ref(&w[i - 1]),
            b'W' if is_vowel(prev) => std::slice::from_ref(&w[i - 1]),
            _ => std::slice::from_ref(&w[i]),
        };
        let rewrite = rewrite.to_vec();
        w[i..i + rewrite.len()].copy_from_slice(&rewrite);
        if w[i] != w[i - 1] {
            key.push(w[i]);
        }
    }

    if key.len() > 1 {
        if key.last() == Some(&b'S') {
            key.pop();
        }
        if key.len() > 2 && key.ends_with(b"AY") {
            let n = key.len();
            key.remove(n - 2);
        }
        if key.len() > 1 && key.last() == Some(&b'A') {
            key.pop();
        }
    }
    key.truncate(KEY_LEN);
    String::from_utf8(key).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(w: &str) -> String {
        nysiis(w.as_bytes())
    }

    #[test]
    fn worked_examples() {
        assert_eq!(k("SHEPARD"), "SAPAD");
        assert_eq!(k("SHEPPERD"), "SAPAD");
        assert_eq!(k("MACINTOSH"), "MCANT");
        assert_eq!(k("KNIGHT"), "NAGT");
        assert_eq!(k("PHILLIPS"), "FALAP");
        assert_eq!(k("BROWN"), "BRAN");
        assert_eq!(k("LOUIS"), "L");
    }
}
