//! On-disk class stores: one `.opb` file per class, named by its key, plus
//! `manifest.json`. Every file is written to a temporary sibling and renamed
//! into place.

use std::io::Write as _;
use std::path::Path;

use serde_json::json;

use super::text::{serialize, Style};
use crate::lattice::ClassStore;

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Summary of a store as written to `manifest.json`.
pub fn manifest(store: &ClassStore) -> serde_json::Value {
    let histogram: serde_json::Map<String, serde_json::Value> = store
        .nu_histogram()
        .into_iter()
        .map(|(nu, count)| (nu.to_string(), json!(count)))
        .collect();
    let classes: Vec<serde_json::Value> = store
        .records
        .values()
        .map(|r| {
            json!({
                "key": r.key.to_hex(),
                "nu": r.signature.nu,
                "partitions": r.signature.partitions,
                "maximal": r.maximal,
                "reducible": r.reducible,
            })
        })
        .collect();
    json!({
        "n": store.n,
        "complete": store.complete,
        "maximal_only": store.maximal_only,
        "budget": {
            "max_nodes": store.budget.max_nodes,
            "max_seconds": store.budget.max_time.map(|d| d.as_secs_f64()),
        },
        "classes_seen": store.classes_seen,
        "maximal_seen": store.maximal_seen,
        "stored": store.len(),
        "nu_histogram": histogram,
        "classes": classes,
    })
}

/// Writes the store into `dir`, creating it if needed.
pub fn write_store(store: &ClassStore, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for record in store.records.values() {
        let hex = record.key.to_hex();
        let mut text = String::new();
        text.push_str(if record.maximal {
            "# maximal\n"
        } else {
            "# not maximal\n"
        });
        text.push_str(&serialize(&record.representative(), Style::Full, Some(&hex)));
        write_atomic(&dir.join(format!("{hex}.opb")), text.as_bytes())?;
    }
    let manifest = serde_json::to_string_pretty(&manifest(store)).expect("manifest serializes");
    write_atomic(&dir.join("manifest.json"), format!("{manifest}\n").as_bytes())
}
