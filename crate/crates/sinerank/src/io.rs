//! File formats: binary PGM images, CSV tables, and per-run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Writes a binary (P5) PGM with maxval 255 in canonical form.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::BadPgm(format!(
            "pixel count {} does not match {width}x{height}",
            pixels.len()
        )));
    }
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{width} {height}\n255\n")?;
    file.write_all(pixels)?;
    Ok(())
}

/// Reads a binary (P5) PGM with maxval <= 255. Comments are accepted on read;
/// emission is always canonical, so a load/emit cycle of our own files is
/// byte-identical.
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let mut pos = 0usize;

    fn token(bytes: &[u8], pos: &mut usize) -> Result<String> {
        // skip whitespace and '#' comments
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::BadPgm("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    }

    let magic = token(&bytes, &mut pos)?;
    if magic != "P5" {
        return Err(Error::BadPgm(format!("expected P5 magic, got `{magic}`")));
    }
    let width: usize = token(&bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::BadPgm("bad width".into()))?;
    let height: usize = token(&bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::BadPgm("bad height".into()))?;
    let maxval: usize = token(&bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::BadPgm("bad maxval".into()))?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::BadPgm(format!("unsupported maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::BadPgm("zero dimension".into()));
    }
    // exactly one whitespace byte separates header and raster
    pos += 1;
    let need = width * height;
    if bytes.len() < pos || bytes.len() - pos < need {
        return Err(Error::BadPgm(format!(
            "raster truncated: need {need} bytes, have {}",
            bytes.len().saturating_sub(pos)
        )));
    }
    Ok((width, height, bytes[pos..pos + need].to_vec()))
}

/// Min-max scales values to `0..=255` bytes; a constant field maps to zeros.
pub fn quantize_min_max(values: &[f64]) -> Vec<u8> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|v| (((v - lo) / (hi - lo)) * 255.0).round() as u8)
        .collect()
}

/// A CSV table with a fixed header, written row by row with `Display`
/// formatting (shortest round-trip for floats).
pub struct CsvTable {
    buf: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            buf: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "csv row width");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Written alongside every command's outputs as `run.json`. Re-running the
/// same command with these flags reproduces every other output bitwise on
/// the same platform; `wall_seconds` is the only timing field and lives here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            flags: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            wall_seconds: 0.0,
        }
    }

    pub fn flag(&mut self, name: &str, value: impl ToString) {
        self.flags.insert(name.to_string(), value.to_string());
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("run.json");
        fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

/// Creates `dir` (and parents) if needed and returns it.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_bit_identical() {
        let dir = std::env::temp_dir().join(format!("sinerank-pgm-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.pgm");
        let pixels: Vec<u8> = (0..30 * 7).map(|i| (i % 251) as u8).collect();
        write_pgm(&path, 30, 7, &pixels).unwrap();
        let original = fs::read(&path).unwrap();
        let (w, h, px) = read_pgm(&path).unwrap();
        assert_eq!((w, h), (30, 7));
        let path2 = dir.join("t2.pgm");
        write_pgm(&path2, w, h, &px).unwrap();
        assert_eq!(original, fs::read(&path2).unwrap());
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn pgm_rejects_malformed() {
        let dir = std::env::temp_dir().join(format!("sinerank-pgm-bad-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.pgm");
        fs::write(&path, b"P2\n2 2\n255\n0 0 0 0\n").unwrap();
        assert!(matches!(read_pgm(&path), Err(Error::BadPgm(_))));
        fs::write(&path, b"P5\n4 4\n255\nxx").unwrap();
        assert!(matches!(read_pgm(&path), Err(Error::BadPgm(_))));
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn quantize_constant_field_is_zero() {
        assert_eq!(quantize_min_max(&[2.5, 2.5, 2.5]), vec![0, 0, 0]);
        assert_eq!(quantize_min_max(&[0.0, 1.0]), vec![0, 255]);
    }

    #[test]
    fn csv_table_shape() {
        let mut t = CsvTable::new(&["epoch", "loss"]);
        t.row(&["0".into(), "0.5".into()]);
        assert_eq!(t.finish(), "epoch,loss\n0,0.5\n");
    }
}
