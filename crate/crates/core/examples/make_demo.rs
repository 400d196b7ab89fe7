//! Writes the bundled demo corpus to `fixtures/demo/` (or the directory
//! given as the first argument).

use std::fs;
use std::path::PathBuf;

use reckmine_core::artifacts;
use reckmine_core::corpus::write_apps;
use reckmine_core::synth::demo_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo"));
    fs::create_dir_all(dir.join("reviews"))?;
    let demo = demo_corpus(42);
    for (market, lines) in &demo.reviews {
        let mut text = lines.join("\n");
        text.push('\n');
        fs::write(dir.join("reviews").join(format!("{market}.jsonl")), text)?;
    }
    let mut apps = Vec::new();
    write_apps(&demo.apps, &mut apps)?;
    fs::write(dir.join("apps.jsonl"), apps)?;
    artifacts::write_jsonl(&dir.join("labeled.jsonl"), &demo.labeled)?;
    println!("wrote {}", dir.display());
    Ok(())
}
