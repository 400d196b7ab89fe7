//! detect-popup: classify hooked pop-up events and score their text.

use std::collections::BTreeMap;

use anyhow::Context as _;
use reckmine_core::artifacts::POPUP_DETECTIONS_FILE;
use reckmine_core::popdetect::{
    detect_event, GenericTextSet, PopupDetection, PopupEvent, PopupType, RedPacketScorer,
    RuleTables,
};
use serde::{Deserialize, Serialize};

use super::embedder::CliEmbedder;
use crate::context::Ctx;
use crate::error::{CliError, CliResult};

/// Input line: a hooked call, optionally with the expected pop-up type.
#[derive(Deserialize)]
struct EventLine {
    #[serde(flatten)]
    event: PopupEvent,
    /// `null` means the call is expected not to be a pop-up.
    #[serde(default, deserialize_with = "present")]
    expected: Option<Option<PopupType>>,
}

/// Distinguishes an explicit `null` from a missing field.
fn present<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Option<PopupType>>, D::Error> {
    Option::<PopupType>::deserialize(d).map(Some)
}

#[derive(Serialize)]
struct DetectionLine<'a> {
    #[serde(flatten)]
    event: &'a PopupEvent,
    #[serde(flatten)]
    detection: PopupDetection,
}

pub fn detect(ctx: &mut Ctx) -> CliResult<()> {
    let input = ctx.input_file()?;
    let c = ctx.config.popup.clone();
    let rules = match &c.rules {
        Some(p) => {
            let p = ctx.configured_file(p, "rule file")?;
            RuleTables::load(&p).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => RuleTables::default(),
    };
    let generic = match &c.generic_texts {
        Some(p) => {
            let p = ctx.configured_file(p, "generic text file")?;
            GenericTextSet::load(&p).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => GenericTextSet::default(),
    };
    let scorer = RedPacketScorer::with_threshold(
        generic,
        CliEmbedder::from_config(&ctx.config.embed)?,
        c.threshold,
    );
    scorer
        .generic_vectors()
        .context("embedding generic texts")?;

    let events: Vec<EventLine> = ctx.read_jsonl(&input)?;
    let mut by_type: BTreeMap<String, usize> = BTreeMap::new();
    let (mut labelled, mut correct, mut red_packet) = (0, 0, 0);
    let mut out = Vec::with_capacity(events.len());
    for line in &events {
        let detection = detect_event(&line.event, &rules, &scorer);
        let name = detection
            .popup_type
            .map_or("not a pop-up".to_string(), |t| {
                serde_json::to_string(&t)
                    .unwrap_or_default()
                    .replace('"', "")
            });
        *by_type.entry(name).or_default() += 1;
        red_packet += usize::from(detection.is_red_packet);
        if let Some(expected) = line.expected {
            labelled += 1;
            correct += usize::from(expected == detection.popup_type);
        }
        out.push(DetectionLine {
            event: &line.event,
            detection,
        });
    }
    ctx.write_jsonl(POPUP_DETECTIONS_FILE, &out)?;
    for (t, n) in &by_type {
        println!("{t:<14} {n}");
    }
    println!(
        "{red_packet} of {} events show red-packet text",
        events.len()
    );
    if labelled > 0 {
        println!("type accuracy {correct}/{labelled}");
    }
    Ok(())
}
