//! serve: the annotation and browsing HTTP service.

use reckmine_api::{queue_from_run_dir, AnnotationStore, AppState};

use crate::context::Ctx;
use crate::error::{CliError, CliResult};
use crate::manifest::{self, ManifestEntry};

pub fn serve(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let c = ctx.config.serve.clone();
    if c.tokens.is_empty() {
        return Err(CliError::Config(
            "serve needs at least one access token under serve.tokens".into(),
        ));
    }
    let items = queue_from_run_dir(&dir)?;
    let store_path = c
        .store
        .clone()
        .unwrap_or_else(|| dir.join("annotations.json"));
    let store = AnnotationStore::open(&store_path, items).map_err(|e| CliError::Other(e.into()))?;
    ctx.outputs.push(store_path);

    let entry = ManifestEntry {
        stage: "serve".into(),
        status: "ok",
        exit_code: 0,
        error: None,
        inputs: ctx.inputs.clone(),
        outputs: ctx.outputs.clone(),
        seed: ctx.seed,
        config: serde_json::to_value(&ctx.config).unwrap_or_default(),
        tool_version: env!("CARGO_PKG_VERSION"),
        started_at_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        wall_time_ms: 0,
    };
    if let Err(e) = manifest::append(&dir, &entry) {
        log::warn!("could not append to the run manifest: {e}");
    }

    let state = AppState::new(store, dir, c.tokens);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    log::info!("listening on {}", c.addr);
    runtime.block_on(reckmine_api::serve(c.addr, state))?;
    Ok(())
}
