//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use namevar::phonetic::{encode, PhoneticMethod};
use namevar::Name;
use rphonetic::{DoubleMetaphone, Encoder, Nysiis, Phonex, Soundex};

pub fn data_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(file)
}

pub fn surnames() -> Vec<Name> {
    std::fs::read_to_string(data_path("surnames.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| Name::new(l).unwrap())
        .collect()
}

/// Frozen `name -> code` table for one method from the Python reference encoders.
fn python_reference(method: &str) -> BTreeMap<String, String> {
    std::fs::read_to_string(data_path("phonetic_reference.tsv"))
        .unwrap()
        .lines()
        .filter_map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[1] == method).then(|| (f[0].to_string(), f[2].to_string()))
        })
        .collect()
}

pub struct Agreement {
    pub method: PhoneticMethod,
    pub total: usize,
    /// `(name, ours, reference)` for every disagreement.
    pub mismatches: Vec<(String, String, String)>,
}

impl Agreement {
    pub fn rate(&self) -> f64 {
        (self.total - self.mismatches.len()) as f64 / self.total as f64
    }
}

/// Codes are compared as `primary` or `primary alternate`, case-insensitively.
pub fn agreement(method: PhoneticMethod) -> Agreement {
    let names = surnames();
    let table = python_reference(method.id());
    let reference = |n: &str| -> String {
        let up = n.to_ascii_uppercase();
        match method {
            PhoneticMethod::Soundex => Soundex::default().encode(&up),
            PhoneticMethod::Nysiis => Nysiis::new(true).encode(&up),
            PhoneticMethod::Phonex => Phonex::default().encode(&up),
            PhoneticMethod::DoubleMetaphone => {
                let r = DoubleMetaphone::default().double_metaphone(&up);
                format!("{} {}", r.primary(), r.alternate())
            }
            _ => table[n].clone(),
        }
        .to_ascii_lowercase()
    };
    let mut mismatches = Vec::new();
    for n in &names {
        let code = encode(method, n);
        let ours = match method {
            PhoneticMethod::DoubleMetaphone => {
                format!("{} {}", code.primary, code.alternate.as_deref().unwrap_or(&code.primary))
            }
            _ => code.primary.clone(),
        }
        .to_ascii_lowercase();
        let theirs = reference(n.as_str());
        if ours != theirs {
            mismatches.push((n.to_string(), ours, theirs));
        }
    }
    Agreement {
        method,
        total: names.len(),
        mismatches,
    }
}
