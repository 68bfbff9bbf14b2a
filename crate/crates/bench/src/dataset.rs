//! Datasets laid out as `images/<id>.png`, `masks/<id>.{pgm,png}` and optional
//! `instances/<id>/*.{pgm,png}` holding the other objects of the image.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use guidemap_core::imaging::io::{read_mask, read_png};
use guidemap_core::{BinaryMask, ImageBuffer};
use serde::Serialize;

use crate::error::{io_err, Result};

#[derive(Debug, Clone)]
pub struct DatasetInstance {
    pub id: String,
    pub image_path: PathBuf,
    pub mask_path: PathBuf,
    pub other_paths: Vec<PathBuf>,
    pub image: ImageBuffer,
    pub gt: BinaryMask,
    pub others: Vec<BinaryMask>,
}

/// A problem with one instance; loading continues past it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadError {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    /// Valid instances sorted by id.
    pub instances: Vec<DatasetInstance>,
    pub errors: Vec<LoadError>,
}

fn is_mask_file(p: &Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()), Some("pgm" | "png"))
}

/// Files of `dir` keyed by stem, keeping only the given extensions.
fn files_by_stem(
    dir: &Path,
    keep: impl Fn(&Path) -> bool,
) -> Result<BTreeMap<String, Vec<PathBuf>>> {
    let mut out: BTreeMap<String, Vec<PathBuf>> = BTreeMap::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() || !keep(&path) {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.entry(stem.to_owned()).or_default().push(path);
        }
    }
    for paths in out.values_mut() {
        paths.sort();
    }
    Ok(out)
}

fn load_one(
    id: &str,
    image_path: PathBuf,
    mask_path: PathBuf,
    root: &Path,
) -> Result<DatasetInstance, String> {
    let image = read_png(&image_path).map_err(|e| format!("image: {e}"))?;
    let gt = read_mask(&mask_path).map_err(|e| format!("mask: {e}"))?;
    if gt.dims() != image.dims() {
        return Err(format!(
            "mask is {}x{} but image is {}x{}",
            gt.width(),
            gt.height(),
            image.width(),
            image.height()
        ));
    }
    let inst_dir = root.join("instances").join(id);
    let mut other_paths = Vec::new();
    if inst_dir.is_dir() {
        let entries =
            fs::read_dir(&inst_dir).map_err(|e| format!("{}: {e}", inst_dir.display()))?;
        for entry in entries {
            let p = entry.map_err(|e| e.to_string())?.path();
            if p.is_file() && is_mask_file(&p) {
                other_paths.push(p);
            }
        }
        other_paths.sort();
    }
    let mut others = Vec::with_capacity(other_paths.len());
    for p in &other_paths {
        let m = read_mask(p).map_err(|e| format!("instance mask: {e}"))?;
        if m.dims() != image.dims() {
            return Err(format!("instance mask {} has the wrong size", p.display()));
        }
        others.push(m);
    }
    Ok(DatasetInstance {
        id: id.to_owned(),
        image_path,
        mask_path,
        other_paths,
        image,
        gt,
        others,
    })
}

/// Loads and validates every instance under `root`.
///
/// A missing root or an empty directory gives an empty dataset.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<Dataset> {
    let root = root.as_ref();
    let images = files_by_stem(&root.join("images"), |p| {
        p.extension().is_some_and(|e| e == "png")
    })?;
    let masks = files_by_stem(&root.join("masks"), is_mask_file)?;
    let mut ds = Dataset::default();
    for (id, paths) in &images {
        let Some(mask_paths) = masks.get(id) else {
            ds.errors.push(LoadError {
                id: id.clone(),
                reason: "no mask".into(),
            });
            continue;
        };
        if mask_paths.len() > 1 {
            ds.errors.push(LoadError {
                id: id.clone(),
                reason: "both .pgm and .png masks exist".into(),
            });
            continue;
        }
        match load_one(id, paths[0].clone(), mask_paths[0].clone(), root) {
            Ok(inst) => ds.instances.push(inst),
            Err(reason) => ds.errors.push(LoadError {
                id: id.clone(),
                reason,
            }),
        }
    }
    for id in masks.keys().filter(|id| !images.contains_key(*id)) {
        ds.errors.push(LoadError {
            id: id.clone(),
            reason: "mask without image".into(),
        });
    }
    Ok(ds)
}
