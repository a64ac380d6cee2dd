//! Opening plain, gzip and bzip2 files by extension.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use bzip2::read::MultiBzDecoder;
use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};

const BUF: usize = 1 << 16;

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// Buffered reader that transparently decompresses `.gz` and `.bz2` files.
pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(if has_ext(path, "gz") {
        Box::new(BufReader::with_capacity(BUF, MultiGzDecoder::new(file)))
    } else if has_ext(path, "bz2") {
        Box::new(BufReader::with_capacity(BUF, MultiBzDecoder::new(file)))
    } else {
        Box::new(BufReader::with_capacity(BUF, file))
    })
}

/// Buffered writer; gzip-compressed when the path ends in `.gz`.
pub fn create_writer(path: &Path) -> Result<Box<dyn Write + Send>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(if has_ext(path, "gz") {
        Box::new(GzEncoder::new(BufWriter::with_capacity(BUF, file), Compression::default()))
    } else {
        Box::new(BufWriter::with_capacity(BUF, file))
    })
}

/// Reads lines as raw bytes decoded lossily, so one bad byte sequence costs
/// one line rather than the whole stream. Returns `Ok(false)` at EOF.
pub(crate) fn read_line(reader: &mut dyn BufRead, raw: &mut Vec<u8>, line: &mut String) -> io::Result<bool> {
    raw.clear();
    line.clear();
    if reader.read_until(b'\n', raw)? == 0 {
        return Ok(false);
    }
    while matches!(raw.last(), Some(b'\n' | b'\r')) {
        raw.pop();
    }
    match std::str::from_utf8(raw) {
        Ok(s) => line.push_str(s),
        Err(_) => line.push_str(&String::from_utf8_lossy(raw)),
    }
    Ok(true)
}
