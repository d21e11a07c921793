//! Every phonetic encoder over a handful of surnames.
//!
//! `cargo run --example phonetic_codes -- smith schmidt`

use namevar::phonetic::{encode, has_same_code, PhoneticMethod};
use namevar::normalize;

fn main() -> Result<(), namevar::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let raw = if args.is_empty() {
        vec!["Smith".into(), "Schmidt".into(), "O'Shaughnessy".into(), "Thompson".into()]
    } else {
        args
    };
    let names = raw.iter().map(|r| normalize(r)).collect::<Result<Vec<_>, _>>()?;
    print!("{:<18}", "method");
    for n in &names {
        print!("{:<18}", n.as_str());
    }
    println!();
    for &m in PhoneticMethod::ALL.iter() {
        print!("{:<18}", m.id());
        for n in &names {
            print!("{:<18}", encode(m, n).to_string());
        }
        println!();
    }
    if names.len() >= 2 {
        let agree: Vec<&str> = PhoneticMethod::ALL
            .iter()
            .filter(|&&m| has_same_code(m, &names[0], &names[1]))
            .map(|m| m.id())
            .collect();
        println!("\n{} ~ {} under: {}", names[0], names[1], agree.join(", "));
    }
    Ok(())
}
