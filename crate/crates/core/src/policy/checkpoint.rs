//! Policy checkpoints: JSON with the vocabulary, context order, maximum
//! length, and the full logit table per conditioning id.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{PolicyError, TokenVocabulary, ToyPolicy};

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    vocabulary: Vec<String>,
    eos_token: String,
    context_order: usize,
    max_length: usize,
    // [condition][state][token], states in canonical order
    logits: Vec<Vec<Vec<f64>>>,
}

pub fn save_checkpoint<W: Write>(policy: &ToyPolicy, mut writer: W) -> Result<(), PolicyError> {
    let file = CheckpointFile {
        vocabulary: policy.vocab().tokens().to_vec(),
        eos_token: policy.vocab().token(policy.vocab().eos()).to_owned(),
        context_order: policy.context_order(),
        max_length: policy.max_length(),
        logits: policy.tables().to_vec(),
    };
    serde_json::to_writer_pretty(&mut writer, &file)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn load_checkpoint<R: Read>(reader: R) -> Result<ToyPolicy, PolicyError> {
    let file: CheckpointFile = serde_json::from_reader(reader)?;
    let vocab = TokenVocabulary::new(file.vocabulary, &file.eos_token)?;
    ToyPolicy::from_parts(vocab, file.context_order, file.max_length, file.logits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let policy = ToyPolicy::seeded_random(TokenVocabulary::default_toy(), 2, 4, 3, 1.1, 15)
            .unwrap();
        let mut buf = Vec::new();
        save_checkpoint(&policy, &mut buf).unwrap();
        let back = load_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back, policy);

        // and the serialization itself is deterministic
        let mut buf2 = Vec::new();
        save_checkpoint(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn malformed_shapes_rejected() {
        let policy = ToyPolicy::default_toy(1);
        let mut buf = Vec::new();
        save_checkpoint(&policy, &mut buf).unwrap();
        let mut value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        value["logits"][0]
            .as_array_mut()
            .unwrap()
            .pop();
        let text = serde_json::to_string(&value).unwrap();
        assert!(load_checkpoint(text.as_bytes()).is_err());
    }
}
