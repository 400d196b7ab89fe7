//! One function per subcommand.

pub mod clusters;
pub mod embedder;
pub mod popup;
pub mod prepare;
pub mod report;
pub mod sentiment;
pub mod serve;

use std::path::{Path, PathBuf};

use reckmine_core::artifacts::{RED_PACKET_FILE, TRANSLATED_FILE};
use reckmine_core::filter::RedPacketReview;

use crate::context::Ctx;
use crate::error::CliResult;

/// Red-packet reviews in their latest form: translated when available.
pub fn latest_red_packet(ctx: &mut Ctx, dir: &Path) -> CliResult<Vec<RedPacketReview>> {
    let translated = dir.join(TRANSLATED_FILE);
    let path: PathBuf = if translated.exists() {
        translated
    } else {
        dir.join(RED_PACKET_FILE)
    };
    ctx.read_jsonl(&path)
}
