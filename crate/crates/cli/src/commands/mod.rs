//! Subcommand implementations: thin wrappers that wire file formats between
//! the library stages and validate every declared output after writing it.

pub mod annotate;
pub mod build_pairs;
pub mod calibrate;
pub mod emit_prompts;
pub mod evaluate;
pub mod filter_qa;
pub mod requests;
pub mod simulate;
pub mod train;
pub mod verify_pairs;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};
use std::path::Path;

use anyhow::{bail, Context, Result};

pub(crate) fn open_reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

pub(crate) fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("writing {}", path.display()))?,
    ))
}

/// Output validation: the written JSONL must hold exactly the expected
/// number of records.
pub(crate) fn check_jsonl_lines(path: &Path, expected: usize) -> Result<()> {
    let reader = open_reader(path)?;
    let mut count = 0usize;
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            count += 1;
        }
    }
    if count != expected {
        bail!(
            "output {} holds {count} records, expected {expected}",
            path.display()
        );
    }
    Ok(())
}
