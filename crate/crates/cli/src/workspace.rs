//! A named catalog of categories, functors, theories, monoids and
//! presentations loaded from a workspace manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use strsem_core::eqpres::Presentation;
use strsem_core::fincat::{FinCategory, FinFunctor};
use strsem_core::groupsem::FinMonoid;

use crate::formats;

#[derive(Default)]
pub struct Workspace {
    pub categories: BTreeMap<String, Arc<FinCategory>>,
    pub functors: BTreeMap<String, FinFunctor>,
    pub monoids: BTreeMap<String, FinMonoid>,
    pub presentations: BTreeMap<String, Presentation>,
}

impl Workspace {
    /// Load a manifest: lines of `kind name path`, with paths relative to
    /// the manifest location. Categories load before functors so
    /// cross-references resolve regardless of manifest order.
    pub fn load(path: &Path) -> Result<Workspace, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let mut entries: Vec<(usize, String, String, PathBuf)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let kind = parts.next().unwrap_or_default().to_string();
            let name = parts
                .next()
                .ok_or_else(|| format!("line {}: missing name", i + 1))?
                .to_string();
            let rel = parts
                .next()
                .ok_or_else(|| format!("line {}: missing path", i + 1))?;
            entries.push((i + 1, kind, name, dir.join(rel)));
        }
        let mut ws = Workspace::default();
        let read = |p: &Path| -> Result<String, String> {
            std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
        };
        for (line, kind, name, p) in &entries {
            if kind == "category" {
                let cat = formats::parse_category(&read(p)?)
                    .map_err(|e| format!("{}: {e}", p.display()))?;
                if ws.categories.insert(name.clone(), Arc::new(cat)).is_some() {
                    return Err(format!("line {line}: duplicate name `{name}`"));
                }
            }
        }
        for (line, kind, name, p) in &entries {
            match kind.as_str() {
                "category" => {}
                "functor" => {
                    let cats = ws.categories.clone();
                    let lookup = move |n: &str| cats.get(n).cloned();
                    let f = formats::parse_functor(&read(p)?, &lookup)
                        .map_err(|e| format!("{}: {e}", p.display()))?;
                    if ws.functors.insert(name.clone(), f).is_some() {
                        return Err(format!("line {line}: duplicate name `{name}`"));
                    }
                }
                "monoid" => {
                    let m = formats::parse_monoid(&read(p)?)
                        .map_err(|e| format!("{}: {e}", p.display()))?;
                    if ws.monoids.insert(name.clone(), m).is_some() {
                        return Err(format!("line {line}: duplicate name `{name}`"));
                    }
                }
                "presentation" => {
                    let pr = formats::parse_presentation(&read(p)?)
                        .map_err(|e| format!("{}: {e}", p.display()))?;
                    if ws.presentations.insert(name.clone(), pr).is_some() {
                        return Err(format!("line {line}: duplicate name `{name}`"));
                    }
                }
                other => {
                    return Err(format!("line {line}: unknown kind `{other}`"));
                }
            }
        }
        Ok(ws)
    }
}
