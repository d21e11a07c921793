//! Double Metaphone with a four character cap on both keys.
//!
//! The rule set follows the widely used Java port. One difference: a final `J`
//! adds nothing to the alternate key (the Java port appends a space there).

const MAX_LEN: usize = 4;

struct Keys {
    primary: String,
    alternate: String,
}

impl Keys {
    fn complete(&self) -> bool {
        self.primary.len() >= MAX_LEN && self.alternate.len() >= MAX_LEN
    }

    fn push_primary(&mut self, s: &str) {
        let room = MAX_LEN.saturating_sub(self.primary.len());
        self.primary.push_str(&s[..s.len().min(room)]);
    }

    fn push_alternate(&mut self, s: &str) {
        let room = MAX_LEN.saturating_sub(self.alternate.len());
        self.alternate.push_str(&s[..s.len().min(room)]);
    }

    fn push(&mut self, s: &str) {
        self.push_primary(s);
        self.push_alternate(s);
    }

    fn push2(&mut self, primary: &str, alternate: &str) {
        self.push_primary(primary);
        self.push_alternate(alternate);
    }
}

struct Word<'a> {
    w: &'a [u8],
    slavo_germanic: bool,
}

impl Word<'_> {
    fn len(&self) -> isize {
        self.w.len() as isize
    }

    /// Byte at `i`, or 0 outside the word.
    fn at(&self, i: isize) -> u8 {
        if i < 0 {
            0
        } else {
            self.w.get(i as usize).copied().unwrap_or(0)
        }
    }

    /// True when the `n` bytes starting at `start` lie inside the word and equal one of `options`.
    fn has(&self, start: isize, n: usize, options: &[&str]) -> bool {
        if start < 0 || start as usize + n > self.w.len() {
            return false;
        }
        let s = &self.w[start as usize..start as usize + n];
        options.iter().any(|o| o.as_bytes() == s)
    }

    fn vowel(&self, i: isize) -> bool {
        matches!(self.at(i), b'A' | b'E' | b'I' | b'O' | b'U' | b'Y')
    }

    fn last(&self) -> isize {
        self.len() - 1
    }
}

const LRNMBHFVW: &[&str] = &["L", "R", "N", "M", "B", "H", "F", "V", "W", " "];
const LTKSNMBZ: &[&str] = &["L", "T", "K", "S", "N", "M", "B", "Z"];
const G_FRONT: &[&str] = &[
    "ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER",
];

fn germanic_start(w: &Word) -> bool {
    w.has(0, 4, &["VAN ", "VON "]) || w.has(0, 3, &["SCH"])
}

fn c_is_k_after_ach(w: &Word, i: isize) -> bool {
    if w.has(i, 4, &["CHIA"]) {
        return true;
    }
    if i <= 1 || w.vowel(i - 2) || !w.has(i - 1, 3, &["ACH"]) {
        return false;
    }
    let c = w.at(i + 2);
    (c != b'I' && c != b'E') || w.has(i - 2, 6, &["BACHER", "MACHER"])
}

fn ch_greek_start(w: &Word, i: isize) -> bool {
    i == 0
        && (w.has(i + 1, 5, &["HARAC", "HARIS"]) || w.has(i + 1, 3, &["HOR", "HYM", "HIA", "HEM"]))
        && !w.has(0, 5, &["CHORE"])
}

fn ch_is_k(w: &Word, i: isize) -> bool {
    germanic_start(w)
        || w.has(i - 2, 6, &["ORCHES", "ARCHIT", "ORCHID"])
        || w.has(i + 2, 1, &["T", "S"])
        || ((w.has(i - 1, 1, &["A", "O", "U", "E"]) || i == 0)
            && (w.has(i + 2, 1, LRNMBHFVW) || i + 1 == w.last()))
}

fn handle_ch(w: &Word, k: &mut Keys, i: isize) -> isize {
    if i > 0 && w.has(i, 4, &["CHAE"]) {
        k.push2("K", "X");
    } else if ch_greek_start(w, i) || ch_is_k(w, i) {
        k.push("K");
    } else if i > 0 {
        if w.has(0, 2, &["MC"]) {
            k.push("K");
        } else {
            k.push2("X", "K");
        }
    } else {
        k.push("X");
    }
    i + 2
}

fn handle_cc(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.has(i + 2, 1, &["I", "E", "H"]) && !w.has(i + 2, 2, &["HU"]) {
        if (i == 1 && w.at(i - 1) == b'A') || w.has(i - 1, 5, &["UCCEE", "UCCES"]) {
            k.push("KS");
        } else {
            k.push("X");
        }
        i + 3
    } else {
        k.push("K");
        i + 2
    }
}

fn handle_c(w: &Word, k: &mut Keys, i: isize) -> isize {
    if c_is_k_after_ach(w, i) {
        k.push("K");
        i + 2
    } else if i == 0 && w.has(i, 6, &["CAESAR"]) {
        k.push("S");
        i + 2
    } else if w.has(i, 2, &["CH"]) {
        handle_ch(w, k, i)
    } else if w.has(i, 2, &["CZ"]) && !w.has(i - 2, 4, &["WICZ"]) {
        k.push2("S", "X");
        i + 2
    } else if w.has(i + 1, 3, &["CIA"]) {
        k.push("X");
        i + 3
    } else if w.has(i, 2, &["CC"]) && !(i == 1 && w.at(0) == b'M') {
        handle_cc(w, k, i)
    } else if w.has(i, 2, &["CK", "CG", "CQ"]) {
        k.push("K");
        i + 2
    } else if w.has(i, 2, &["CI", "CE", "CY"]) {
        if w.has(i, 3, &["CIO", "CIE", "CIA"]) {
            k.push2("S", "X");
        } else {
            k.push("S");
        }
        i + 2
    } else {
        k.push("K");
        if w.has(i + 1, 2, &[" C", " Q", " G"]) {
            i + 3
        } else if w.has(i + 1, 1, &["C", "K", "Q"]) && !w.has(i + 1, 2, &["CE", "CI"]) {
            i + 2
        } else {
            i + 1
        }
    }
}

fn handle_d(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.has(i, 2, &["DG"]) {
        if w.has(i + 2, 1, &["I", "E", "Y"]) {
            k.push("J");
            i + 3
        } else {
            k.push("TK");
            i + 2
        }
    } else if w.has(i, 2, &["DT", "DD"]) {
        k.push("T");
        i + 2
    } else {
        k.push("T");
        i + 1
    }
}

fn handle_gh(w: &Word, k: &mut Keys, i: isize) -> isize {
    if i > 0 && !w.vowel(i - 1) {
        k.push("K");
    } else if i == 0 {
        k.push(if w.at(i + 2) == b'I' { "J" } else { "K" });
    } else if (i > 1 && w.has(i - 2, 1, &["B", "H", "D"]))
        || (i > 2 && w.has(i - 3, 1, &["B", "H", "D"]))
        || (i > 3 && w.has(i - 4, 1, &["B", "H"]))
    {
        // silent
    } else if i > 2 && w.at(i - 1) == b'U' && w.has(i - 3, 1, &["C", "G", "L", "R", "T"]) {
        k.push("F");
    } else if i > 0 && w.at(i - 1) != b'I' {
        k.push("K");
    }
    i + 2
}

fn handle_g(w: &Word, k: &mut Keys, i: isize) -> isize {
    let next = w.at(i + 1);
    if next == b'H' {
        handle_gh(w, k, i)
    } else if next == b'N' {
        if i == 1 && w.vowel(0) && !w.slavo_germanic {
            k.push2("KN", "N");
        } else if !w.has(i + 2, 2, &["EY"]) && !w.slavo_germanic {
            k.push2("N", "KN");
        } else {
            k.push("KN");
        }
        i + 2
    } else if w.has(i + 1, 2, &["LI"]) && !w.slavo_germanic {
        k.push2("KL", "L");
        i + 2
    } else if (i == 0 && (next == b'Y' || w.has(i + 1, 2, G_FRONT)))
        || ((w.has(i + 1, 2, &["ER"]) || next == b'Y')
            && !w.has(0, 6, &["DANGER", "RANGER", "MANGER"])
            && !w.has(i - 1, 1, &["E", "I"])
            && !w.has(i - 1, 3, &["RGY", "OGY"]))
    {
        k.push2("K", "J");
        i + 2
    } else if w.has(i + 1, 1, &["E", "I", "Y"]) || w.has(i - 1, 4, &["AGGI", "OGGI"]) {
        if germanic_start(w) || w.has(i + 1, 2, &["ET"]) {
            k.push("K");
        } else if w.has(i + 1, 3, &["IER"]) {
            k.push("J");
        } else {
            k.push2("J", "K");
        }
        i + 2
    } else if next == b'G' {
        k.push("K");
        i + 2
    } else {
        k.push("K");
        i + 1
    }
}

fn handle_h(w: &Word, k: &mut Keys, i: isize) -> isize {
    if (i == 0 || w.vowel(i - 1)) && w.vowel(i + 1) {
        k.push("H");
        i + 2
    } else {
        i + 1
    }
}

fn handle_j(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.has(i, 4, &["JOSE"]) || w.has(0, 4, &["SAN "]) {
        if (i == 0 && w.at(i + 4) == b' ') || w.len() == 4 || w.has(0, 4, &["SAN "]) {
            k.push("H");
        } else {
            k.push2("J", "H");
        }
        return i + 1;
    }
    if i == 0 {
        k.push2("J", "A");
    } else if w.vowel(i - 1) && !w.slavo_germanic && matches!(w.at(i + 1), b'A' | b'O') {
        k.push2("J", "H");
    } else if i == w.last() {
        k.push_primary("J");
    } else if !w.has(i + 1, 1, LTKSNMBZ) && !w.has(i - 1, 1, &["S", "K", "L"]) {
        k.push("J");
    }
    if w.at(i + 1) == b'J' {
        i + 2
    } else {
        i + 1
    }
}

fn spanish_ll(w: &Word, i: isize) -> bool {
    let n = w.len();
    (i == n - 3 && w.has(i - 1, 4, &["ILLO", "ILLA", "ALLE"]))
        || ((w.has(n - 2, 2, &["AS", "OS"]) || w.has(n - 1, 1, &["A", "O"]))
            && w.has(i - 1, 4, &["ALLE"]))
}

fn handle_l(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.at(i + 1) == b'L' {
        if spanish_ll(w, i) {
            k.push_primary("L");
        } else {
            k.push("L");
        }
        i + 2
    } else {
        k.push("L");
        i + 1
    }
}

fn m_skips_next(w: &Word, i: isize) -> bool {
    w.at(i + 1) == b'M'
        || (w.has(i - 1, 3, &["UMB"]) && (i + 1 == w.last() || w.has(i + 2, 2, &["ER"])))
}

fn handle_p(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.at(i + 1) == b'H' {
        k.push("F");
        i + 2
    } else {
        k.push("P");
        if w.has(i + 1, 1, &["P", "B"]) {
            i + 2
        } else {
            i + 1
        }
    }
}

fn handle_r(w: &Word, k: &mut Keys, i: isize) -> isize {
    if i == w.last()
        && !w.slavo_germanic
        && w.has(i - 2, 2, &["IE"])
        && !w.has(i - 4, 2, &["ME", "MA"])
    {
        k.push_alternate("R");
    } else {
        k.push("R");
    }
    if w.at(i + 1) == b'R' {
        i + 2
    } else {
        i + 1
    }
}

fn handle_sc(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.at(i + 2) == b'H' {
        if w.has(i + 3, 2, &["OO", "ER", "EN", "UY", "ED", "EM"]) {
            if w.has(i + 3, 2, &["ER", "EN"]) {
                k.push2("X", "SK");
            } else {
                k.push("SK");
            }
        } else if i == 0 && !w.vowel(3) && w.at(3) != b'W' {
            k.push2("X", "S");
        } else {
            k.push("X");
        }
    } else if w.has(i + 2, 1, &["I", "E", "Y"]) {
        k.push("S");
    } else {
        k.push("SK");
    }
    i + 3
}

fn handle_s(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.has(i - 1, 3, &["ISL", "YSL"]) {
        i + 1
    } else if i == 0 && w.has(i, 5, &["SUGAR"]) {
        k.push2("X", "S");
        i + 1
    } else if w.has(i, 2, &["SH"]) {
        if w.has(i + 1, 4, &["HEIM", "HOEK", "HOLM", "HOLZ"]) {
            k.push("S");
        } else {
            k.push("X");
        }
        i + 2
    } else if w.has(i, 3, &["SIO", "SIA"]) || w.has(i, 4, &["SIAN"]) {
        if w.slavo_germanic {
            k.push("S");
        } else {
            k.push2("S", "X");
        }
        i + 3
    } else if (i == 0 && w.has(i + 1, 1, &["M", "N", "L", "W"])) || w.has(i + 1, 1, &["Z"]) {
        k.push2("S", "X");
        if w.has(i + 1, 1, &["Z"]) {
            i + 2
        } else {
            i + 1
        }
    } else if w.has(i, 2, &["SC"]) {
        handle_sc(w, k, i)
    } else {
        if i == w.last() && w.has(i - 2, 2, &["AI", "OI"]) {
            k.push_alternate("S");
        } else {
            k.push("S");
        }
        if w.has(i + 1, 1, &["S", "Z"]) {
            i + 2
        } else {
            i + 1
        }
    }
}

fn handle_t(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.has(i, 4, &["TION"]) || w.has(i, 3, &["TIA", "TCH"]) {
        k.push("X");
        i + 3
    } else if w.has(i, 2, &["TH"]) || w.has(i, 3, &["TTH"]) {
        if w.has(i + 2, 2, &["OM", "AM"]) || germanic_start(w) {
            k.push("T");
        } else {
            k.push2("0", "T");
        }
        i + 2
    } else {
        k.push("T");
        if w.has(i + 1, 1, &["T", "D"]) {
            i + 2
        } else {
            i + 1
        }
    }
}

fn handle_w(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.has(i, 2, &["WR"]) {
        k.push("R");
        return i + 2;
    }
    if i == 0 && (w.vowel(i + 1) || w.has(i, 2, &["WH"])) {
        if w.vowel(i + 1) {
            k.push2("A", "F");
        } else {
            k.push("A");
        }
        i + 1
    } else if (i == w.last() && w.vowel(i - 1))
        || w.has(i - 1, 5, &["EWSKI", "EWSKY", "OWSKI", "OWSKY"])
        || w.has(0, 3, &["SCH"])
    {
        k.push_alternate("F");
        i + 1
    } else if w.has(i, 4, &["WICZ", "WITZ"]) {
        k.push2("TS", "FX");
        i + 4
    } else {
        i + 1
    }
}

fn handle_x(w: &Word, k: &mut Keys, i: isize) -> isize {
    if i == 0 {
        k.push("S");
        return i + 1;
    }
    let silent_french = i == w.last()
        && (w.has(i - 3, 3, &["IAU", "EAU"]) || w.has(i - 2, 2, &["AU", "OU"]));
    if !silent_french {
        k.push("KS");
    }
    if w.has(i + 1, 1, &["C", "X"]) {
        i + 2
    } else {
        i + 1
    }
}

fn handle_z(w: &Word, k: &mut Keys, i: isize) -> isize {
    if w.at(i + 1) == b'H' {
        k.push("J");
        return i + 2;
    }
    if w.has(i + 1, 2, &["ZO", "ZI", "ZA"])
        || (w.slavo_germanic && i > 0 && w.at(i - 1) != b'T')
    {
        k.push2("S", "TS");
    } else {
        k.push("S");
    }
    if w.at(i + 1) == b'Z' {
        i + 2
    } else {
        i + 1
    }
}

/// Skips the second letter when it doubles the first.
fn single(w: &Word, k: &mut Keys, i: isize, code: &str, twin: u8) -> isize {
    k.push(code);
    if w.at(i + 1) == twin {
        i + 2
    } else {
        i + 1
    }
}

/// Primary and alternate keys of an uppercase word. The alternate equals the
/// primary when no rule diverges.
pub fn double_metaphone(word: &[u8]) -> (String, String) {
    let contains = |pat: &[u8]| word.windows(pat.len()).any(|x| x == pat);
    let w = Word {
        w: word,
        slavo_germanic: word.contains(&b'W') || word.contains(&b'K') || contains(b"CZ"),
    };
    let mut k = Keys {
        primary: String::new(),
        alternate: String::new(),
    };
    let mut i: isize = if w.has(0, 2, &["GN", "KN", "PN", "WR", "PS"]) {
        1
    } else {
        0
    };
    while !k.complete() && i < w.len() {
        i = match w.at(i) {
            b'A' | b'E' | b'I' | b'O' | b'U' | b'Y' => {
                if i == 0 {
                    k.push("A");
                }
                i + 1
            }
            b'B' => single(&w, &mut k, i, "P", b'B'),
            b'C' => handle_c(&w, &mut k, i),
            b'D' => handle_d(&w, &mut k, i),
            b'F' => single(&w, &mut k, i, "F", b'F'),
            b'G' => handle_g(&w, &mut k, i),
            b'H' => handle_h(&w, &mut k, i),
            b'J' => handle_j(&w, &mut k, i),
            b'K' => single(&w, &mut k, i, "K", b'K'),
            b'L' => handle_l(&w, &mut k, i),
            b'M' => {
                k.push("M");
                if m_skips_next(&w, i) {
                    i + 2
                } else {
                    i + 1
                }
            }
            b'N' => single(&w, &mut k, i, "N", b'N'),
            b'P' => handle_p(&w, &mut k, i),
            b'Q' => single(&w, &mut k, i, "K", b'Q'),
            b'R' => handle_r(&w, &mut k, i),
            b'S' => handle_s(&w, &mut k, i),
            b'T' => handle_t(&w, &mut k, i),
            b'V' => single(&w, &mut k, i, "F", b'V'),
            b'W' => handle_w(&w, &mut k, i),
            b'X' => handle_x(&w, &mut k, i),
            b'Z' => handle_z(&w, &mut k, i),
            _ => i + 1,
        };
    }
    (k.primary, k.alternate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(w: &str) -> (String, String) {
        let (p, a) = double_metaphone(w.as_bytes());
        (p, a)
    }

    fn pair(p: &str, a: &str) -> (String, String) {
        (p.to_string(), a.to_string())
    }

    #[test]
    fn worked_examples() {
        assert_eq!(dm("SMITH"), pair("SM0", "XMT"));
        assert_eq!(dm("SCHMIDT"), pair("XMT", "SMT"));
        assert_eq!(dm("THOMAS"), pair("TMS", "TMS"));
        assert_eq!(dm("KNIGHT"), pair("NT", "NT"));
        assert_eq!(dm("PHILLIPS"), pair("FLPS", "FLPS"));
        assert_eq!(dm("JOHNSON"), pair("JNSN", "ANSN"));
        assert_eq!(dm("XAVIER"), pair("SF", "SFR"));
        assert_eq!(dm("CAESAR"), pair("SSR", "SSR"));
        assert_eq!(dm("GEORGE"), pair("JRJ", "KRK"));
    }

    #[test]
    fn keys_are_capped() {
        let (p, a) = dm("WASHINGTONIANS");
        assert!(p.len() <= MAX_LEN && a.len() <= MAX_LEN);
    }

    #[test]
    fn final_j_leaves_alternate_untouched() {
        assert_eq!(dm("RAJ"), pair("RJ", "R"));
    }
}
