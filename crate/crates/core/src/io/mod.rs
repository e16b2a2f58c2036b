//! Run configuration, norm-series files and binary field snapshots.

mod config;
mod series;
mod snapshot;

pub use config::{parse_config, render_config, MonitorSettings, RunConfig};
pub use series::{read_csv, read_ndjson, series_csv, series_ndjson, write_series};
pub use snapshot::{
    decode_snapshot, encode_snapshot, read_snapshot, snapshot_len, write_snapshot, SNAPSHOT_COMPONENTS,
    SNAPSHOT_HEADER_LEN, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};

use std::path::Path;

use crate::error::{Error, Result};

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}
