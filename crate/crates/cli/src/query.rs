//! Query files: a TOML description of one check, with machine paths relative
//! to the file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use zvass_core::backend::Query;
use zvass_core::model::{parse_configuration, parse_machine, Machine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Reach,
    Cover,
    Incl,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryFile {
    pub kind: Kind,
    pub machine: PathBuf,
    pub from: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_from: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: Options,
}

fn is_default(o: &Options) -> bool {
    *o == Options::default()
}

/// A query with its machines loaded.
pub struct Loaded {
    pub machine: Machine,
    pub query: Query,
    pub options: Options,
}

pub fn load_machine(path: &Path) -> Result<Machine> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_machine(&text).with_context(|| format!("{}", path.display()))
}

impl QueryFile {
    pub fn read(path: &Path) -> Result<QueryFile> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("{}", path.display()))
    }

    /// Loads the machines, resolving relative paths against `base`.
    pub fn load(&self, base: &Path) -> Result<Loaded> {
        let resolve = |p: &Path| {
            if p.is_relative() {
                base.join(p)
            } else {
                p.to_path_buf()
            }
        };
        let machine = load_machine(&resolve(&self.machine))?;
        let src = parse_configuration(&machine, &self.from)
            .with_context(|| format!("source `{}`", self.from))?;
        let query = match self.kind {
            Kind::Reach | Kind::Cover => {
                let Some(to) = &self.to else {
                    bail!("{:?} query needs a target (`to`)", self.kind)
                };
                let dst =
                    parse_configuration(&machine, to).with_context(|| format!("target `{to}`"))?;
                if self.kind == Kind::Reach {
                    Query::Reach { src, dst }
                } else {
                    Query::Cover { src, dst }
                }
            }
            Kind::Incl => {
                let (Some(other), Some(other_from)) = (&self.other, &self.other_from) else {
                    bail!("inclusion needs `other` and `other_from`")
                };
                let other = load_machine(&resolve(other))?;
                let other_src = parse_configuration(&other, other_from)
                    .with_context(|| format!("source `{other_from}`"))?;
                Query::Incl {
                    src,
                    other,
                    other_src,
                }
            }
        };
        Ok(Loaded {
            machine,
            query,
            options: self.options.clone(),
        })
    }
}
