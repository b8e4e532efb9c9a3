//! Where command output goes: standard output or a file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Default directory for relative `--output` paths.
pub const OUT_DIR_ENV: &str = "CLIPTREE_OUT_DIR";

pub enum Output {
    Stdout(io::Stdout),
    File(BufWriter<File>, PathBuf),
}

impl Output {
    pub fn open(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Output::Stdout(io::stdout()));
        };
        let path = match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if path.is_relative() => Path::new(&dir).join(path),
            _ => path.to_path_buf(),
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Output::File(BufWriter::new(file), path))
    }

    pub fn is_stdout(&self) -> bool {
        matches!(self, Output::Stdout(_))
    }

    fn writer(&mut self) -> &mut dyn Write {
        match self {
            Output::Stdout(s) => s,
            Output::File(f, _) => f,
        }
    }

    pub fn line(&mut self, text: &str) -> anyhow::Result<()> {
        writeln!(self.writer(), "{text}")?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        let w = self.writer();
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn csv(&mut self) -> csv::Writer<&mut dyn Write> {
        csv::Writer::from_writer(self.writer())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match self {
            Output::Stdout(mut s) => s.flush()?,
            Output::File(mut f, path) => f.flush().with_context(|| format!("writing {}", path.display()))?,
        }
        Ok(())
    }
}
