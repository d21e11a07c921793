//! Noisy-channel decoding: a small hand-made segment table with a name model.

use namevar::alignment::SegmentTable;
use namevar::decoder::{decode, Channel, DecoderConfig};
use namevar::langmodel::{train_lm, Weighting};
use namevar::Name;

fn main() -> Result<(), namevar::Error> {
    let names: Vec<Name> = ["shepard", "shephard", "sheppard", "stephen", "steven", "stevens", "philip", "phillip"]
        .iter()
        .map(|s| Name::new(*s).unwrap())
        .collect();
    let lm = train_lm(&names, 3, Weighting::Forms)?;
    let table = SegmentTable::from_entries(
        [("ph", "ph", 0.7, 0.6), ("ph", "v", 0.2, 0.3), ("ph", "pph", 0.1, 0.2), ("p", "ph", 0.1, 0.2), ("p", "pp", 0.1, 0.2)]
            .into_iter()
            .map(|(s, t, pf, pb)| ((s.to_string(), t.to_string()), (pf, pb))),
    );
    let config = DecoderConfig {
        nbest: 8,
        ..DecoderConfig::default()
    };
    for source in ["stephen", "shepard"] {
        for channel in [Channel::Backward, Channel::Both] {
            let list = decode(&Name::new(source).unwrap(), &table, &lm, &DecoderConfig { channel, ..config.clone() })?;
            let shown: Vec<String> = list.iter().map(|c| format!("{}({:.2})", c.candidate, c.score)).collect();
            println!("{source} [{}]: {}", channel.id(), shown.join(" "));
        }
    }
    Ok(())
}
