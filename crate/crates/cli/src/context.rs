//! Per-invocation state: effective config, resolved paths, and the files
//! the stage read and wrote (for the manifest).

use std::path::{Path, PathBuf};

use reckmine_core::artifacts;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, CliResult};

pub struct Ctx {
    pub config: Config,
    pub seed: u64,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    /// Output directory once a stage has created it.
    out_ready: Option<PathBuf>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Ctx {
    pub fn new(config: Config, seed: u64, input: Option<PathBuf>, out: Option<PathBuf>) -> Self {
        Ctx {
            config,
            seed,
            input,
            out,
            out_ready: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Input file of a stage that reads a single file; required.
    pub fn input_file(&mut self) -> CliResult<PathBuf> {
        let path = self
            .input
            .clone()
            .ok_or_else(|| CliError::MissingInput("missing input: pass --in".into()))?;
        if !path.exists() {
            return Err(CliError::MissingInput(format!(
                "missing input: {}",
                path.display()
            )));
        }
        self.inputs.push(path.clone());
        Ok(path)
    }

    /// Run directory the stage reads from [default: `.`].
    pub fn run_dir(&self) -> CliResult<PathBuf> {
        let dir = self.input.clone().unwrap_or_else(|| PathBuf::from("."));
        if !dir.is_dir() {
            return Err(CliError::MissingInput(format!(
                "missing input directory: {}",
                dir.display()
            )));
        }
        Ok(dir)
    }

    /// Output directory, created if needed. Defaults to the run directory
    /// for directory inputs and `.` for file inputs.
    pub fn out_dir(&mut self) -> CliResult<PathBuf> {
        if let Some(d) = &self.out_ready {
            return Ok(d.clone());
        }
        let dir = match (&self.out, &self.input) {
            (Some(o), _) => o.clone(),
            (None, Some(i)) if i.is_dir() => i.clone(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir)?;
        self.out_ready = Some(dir.clone());
        Ok(dir)
    }

    /// Source stages write to `.` unless --out is given, never into their input.
    pub fn default_out_to_cwd(&mut self) {
        if self.out.is_none() {
            self.out = Some(PathBuf::from("."));
        }
    }

    /// The input directory, or `.` when none was given. Unlike
    /// [`Ctx::run_dir`] it does not have to exist.
    pub fn input_dir_or_cwd(&self) -> PathBuf {
        self.input.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    /// Where the manifest entry goes: the output directory if it exists.
    pub fn manifest_dir(&self) -> Option<PathBuf> {
        if let Some(d) = &self.out_ready {
            return Some(d.clone());
        }
        let dir = match (&self.out, &self.input) {
            (Some(o), _) => o.clone(),
            (None, Some(i)) if i.is_dir() => i.clone(),
            // a missing input directory gets no manifest rather than one in `.`
            (None, Some(i)) if !i.is_file() => return None,
            _ => PathBuf::from("."),
        };
        dir.is_dir().then_some(dir)
    }

    pub fn out_path(&mut self, name: &str) -> CliResult<PathBuf> {
        let p = self.out_dir()?.join(name);
        self.outputs.push(p.clone());
        Ok(p)
    }

    pub fn note_input(&mut self, path: &Path) {
        if !self.inputs.iter().any(|p| p == path) {
            self.inputs.push(path.to_path_buf());
        }
    }

    /// A configured file must exist; a missing one is a config error.
    pub fn configured_file(&mut self, path: &Path, what: &str) -> CliResult<PathBuf> {
        if !path.is_file() {
            return Err(CliError::Config(format!(
                "{what} {} does not exist",
                path.display()
            )));
        }
        self.note_input(path);
        Ok(path.to_path_buf())
    }

    pub fn read_jsonl<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<Vec<T>> {
        let v = artifacts::read_jsonl(path)?;
        self.note_input(path);
        Ok(v)
    }

    pub fn read_json<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let v = artifacts::read_json(path)?;
        self.note_input(path);
        Ok(v)
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, items: &[T]) -> CliResult<PathBuf> {
        let path = self.out_path(name)?;
        artifacts::write_jsonl(&path, items)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(
        &mut self,
        name: &str,
        value: &T,
    ) -> CliResult<PathBuf> {
        let path = self.out_path(name)?;
        artifacts::write_json(&path, value)?;
        Ok(path)
    }
}
