//! Phonetic encoders and same-code testing.
//!
//! Every encoder works on the uppercase ASCII form of a [`Name`] and returns a
//! lowercase code. Rule editions:
//!
//! | method             | edition                                                        | code shape            |
//! |--------------------|----------------------------------------------------------------|-----------------------|
//! | `soundex`          | American (census) Soundex, H/W transparent                     | letter + 3 digits     |
//! | `modified_soundex` | Soundex collapse rules over the refined digit table            | letter + 3 digits     |
//! | `fuzzy_soundex`    | Holmes & McCabe q-gram substitutions                           | letter + up to 3 digits, zero padded |
//! | `nysiis`           | Taft's original rules, 6 character key                         | up to 6 letters       |
//! | `double_metaphone` | Philips, primary and alternate, 4 character cap                | up to 4 characters    |
//! | `phonex`           | Lait & Randell                                                 | letter + 3 digits     |
//! | `phonix`           | Gadd substitution table followed by the Phonix digit table     | letter + 3 digits     |

mod metaphone;
mod nysiis;
mod phonex;
mod phonix;
mod soundex;

use std::fmt;
use std::str::FromStr;

use crate::corpus::Name;
use crate::error::Error;

pub use metaphone::double_metaphone;
pub use nysiis::nysiis;
pub use phonex::phonex;
pub use phonix::phonix;
pub use soundex::{fuzzy_soundex, modified_soundex, soundex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhoneticMethod {
    Soundex,
    Nysiis,
    DoubleMetaphone,
    Phonex,
    Phonix,
    FuzzySoundex,
    ModifiedSoundex,
}

impl PhoneticMethod {
    pub const ALL: [PhoneticMethod; 7] = [
        PhoneticMethod::Soundex,
        PhoneticMethod::Nysiis,
        PhoneticMethod::DoubleMetaphone,
        PhoneticMethod::Phonex,
        PhoneticMethod::Phonix,
        PhoneticMethod::FuzzySoundex,
        PhoneticMethod::ModifiedSoundex,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PhoneticMethod::Soundex => "soundex",
            PhoneticMethod::Nysiis => "nysiis",
            PhoneticMethod::DoubleMetaphone => "double_metaphone",
            PhoneticMethod::Phonex => "phonex",
            PhoneticMethod::Phonix => "phonix",
            PhoneticMethod::FuzzySoundex => "fuzzy_soundex",
            PhoneticMethod::ModifiedSoundex => "modified_soundex",
        }
    }
}

impl fmt::Display for PhoneticMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PhoneticMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        PhoneticMethod::ALL
            .into_iter()
            .find(|m| m.id() == key)
            .or(match key.as_str() {
                "dmetaphone" | "metaphone" => Some(PhoneticMethod::DoubleMetaphone),
                "mod_soundex" => Some(PhoneticMethod::ModifiedSoundex),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidArgument(format!("unknown phonetic method {s:?}")))
    }
}

/// A phonetic key. Only Double Metaphone produces an alternate, and only when it
/// differs from the primary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhoneticCode {
    pub primary: String,
    pub alternate: Option<String>,
}

impl PhoneticCode {
    fn single(primary: String) -> Self {
        PhoneticCode {
            primary,
            alternate: None,
        }
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.primary.as_str()).chain(self.alternate.as_deref())
    }

    /// True when any code of `self` equals any code of `other`, ignoring case.
    pub fn matches(&self, other: &PhoneticCode) -> bool {
        self.codes()
            .any(|a| other.codes().any(|b| a.eq_ignore_ascii_case(b)))
    }
}

impl fmt::Display for PhoneticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.alternate {
            Some(alt) => write!(f, "{} {}", self.primary, alt),
            None => f.write_str(&self.primary),
        }
    }
}

pub fn encode(method: PhoneticMethod, name: &Name) -> PhoneticCode {
    encode_str(method, name.as_str())
}

/// Encodes any string; characters outside `a`–`z` (either case) are ignored.
/// An input with no letters yields an empty primary code.
pub fn encode_str(method: PhoneticMethod, text: &str) -> PhoneticCode {
    let upper: Vec<u8> = text
        .bytes()
        .filter(u8::is_ascii_alphabetic)
        .map(|b| b.to_ascii_uppercase())
        .collect();
    if upper.is_empty() {
        return PhoneticCode::single(String::new());
    }
    let code = match method {
        PhoneticMethod::Soundex => PhoneticCode::single(soundex(&upper)),
        PhoneticMethod::ModifiedSoundex => PhoneticCode::single(modified_soundex(&upper)),
        PhoneticMethod::FuzzySoundex => PhoneticCode::single(fuzzy_soundex(&upper)),
        PhoneticMethod::Nysiis => PhoneticCode::single(nysiis(&upper)),
        PhoneticMethod::Phonex => PhoneticCode::single(phonex(&upper)),
        PhoneticMethod::Phonix => PhoneticCode::single(phonix(&upper)),
        PhoneticMethod::DoubleMetaphone => {
            let (primary, alternate) = double_metaphone(&upper);
            let alternate = (alternate != primary).then_some(alternate);
            PhoneticCode { primary, alternate }
        }
    };
    PhoneticCode {
        primary: code.primary.to_ascii_lowercase(),
        alternate: code.alternate.map(|a| a.to_ascii_lowercase()),
    }
}

pub fn has_same_code(method: PhoneticMethod, s: &Name, t: &Name) -> bool {
    encode(method, s).matches(&encode(method, t))
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'A' | b'E' | b'I' | b'O' | b'U')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn code(m: PhoneticMethod, s: &str) -> String {
        encode(m, &n(s)).primary
    }

    #[test]
    fn soundex_examples() {
        assert_eq!(code(PhoneticMethod::Soundex, "robert"), "r163");
        assert_eq!(code(PhoneticMethod::Soundex, "shepard"), "s163");
        assert_eq!(code(PhoneticMethod::Soundex, "shephard"), "s163");
        assert_eq!(code(PhoneticMethod::Soundex, "clark"), "c462");
        assert_eq!(code(PhoneticMethod::Soundex, "smith"), "s530");
    }

    #[test]
    fn same_code_examples() {
        assert!(has_same_code(PhoneticMethod::Soundex, &n("shepard"), &n("shephard")));
        assert!(!has_same_code(PhoneticMethod::Soundex, &n("clark"), &n("smith")));
        assert!(has_same_code(PhoneticMethod::Nysiis, &n("shepard"), &n("shepperd")));
        for m in PhoneticMethod::ALL {
            assert!(has_same_code(m, &n("thoroughgood"), &n("thoroughgood")));
        }
    }

    #[test]
    fn metaphone_alternate_cross_match() {
        // Primary of one side may equal the alternate of the other.
        let smith = encode(PhoneticMethod::DoubleMetaphone, &n("smith"));
        let schmidt = encode(PhoneticMethod::DoubleMetaphone, &n("schmidt"));
        assert_eq!(smith.primary, "sm0");
        assert_eq!(smith.alternate.as_deref(), Some("xmt"));
        assert_eq!(schmidt.primary, "xmt");
        assert_eq!(schmidt.alternate.as_deref(), Some("smt"));
        assert!(smith.matches(&schmidt));
    }

    #[test]
    fn ids_round_trip() {
        for m in PhoneticMethod::ALL {
            assert_eq!(m.id().parse::<PhoneticMethod>().unwrap(), m);
        }
        assert_eq!("phonex4".parse::<PhoneticMethod>().ok(), None);
    }
}
