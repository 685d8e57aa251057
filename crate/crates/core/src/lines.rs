use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Reads `\n`-terminated lines as raw bytes, validating UTF-8 per line.
pub(crate) struct LineReader {
    path: PathBuf,
    inner: BufReader<Box<dyn Read>>,
    pub(crate) line_no: usize,
    buf: Vec<u8>,
}

impl LineReader {
    pub(crate) fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(path, Box::new(file)))
    }

    pub(crate) fn new(path: &Path, reader: Box<dyn Read>) -> Self {
        LineReader {
            path: path.to_path_buf(),
            inner: BufReader::with_capacity(1 << 16, reader),
            line_no: 0,
            buf: Vec::new(),
        }
    }

    pub(crate) fn next_line(&mut self) -> Result<Option<String>> {
        self.buf.clear();
        let n = self
            .inner
            .read_until(b'\n', &mut self.buf)
            .map_err(|e| Error::io(&self.path, e))?;
        if n == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        if self.buf.last() == Some(&b'\n') {
            self.buf.pop();
        }
        if self.buf.last() == Some(&b'\r') {
            self.buf.pop();
        }
        match std::str::from_utf8(&self.buf) {
            Ok(s) => Ok(Some(s.to_owned())),
            Err(_) => Err(Error::InvalidEncoding {
                path: self.path.clone(),
                line: self.line_no,
            }),
        }
    }

    /// Consumes the rest of the input and returns the total line count.
    pub(crate) fn drain(&mut self) -> Result<usize> {
        loop {
            self.buf.clear();
            let n = self
                .inner
                .read_until(b'\n', &mut self.buf)
                .map_err(|e| Error::io(&self.path, e))?;
            if n == 0 {
                return Ok(self.line_no);
            }
            self.line_no += 1;
        }
    }
}
