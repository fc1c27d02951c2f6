//! Embedding-provider protocol for encoders running in another process.
//!
//! Request: `u32` token count, then for each token a `u32` byte length and
//! its UTF-8 bytes. Response: `u32` rows, `u32` cols, then `rows * cols`
//! `f32` values in row-major order. A response whose row count is
//! `u32::MAX` is an error: it is followed by a `u32` length and a UTF-8
//! message. All integers and floats are little endian.

use std::io::{self, BufReader, BufWriter, Read, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use ndarray::Array2;

use super::{MatcherError, TokenEncoder};

const ERROR_ROWS: u32 = u32::MAX;

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_request(w: &mut impl Write, tokens: &[String]) -> io::Result<()> {
    w.write_all(&(tokens.len() as u32).to_le_bytes())?;
    for t in tokens {
        w.write_all(&(t.len() as u32).to_le_bytes())?;
        w.write_all(t.as_bytes())?;
    }
    w.flush()
}

/// Reads one request; `Ok(None)` on a clean end of stream.
pub fn read_request(r: &mut impl Read) -> io::Result<Option<Vec<String>>> {
    let mut first = [0u8; 4];
    match r.read_exact(&mut first) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let n = u32::from_le_bytes(first) as usize;
    let mut tokens = Vec::with_capacity(n.min(1 << 16));
    for _ in 0..n {
        let len = read_u32(r)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        tokens.push(String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
    }
    Ok(Some(tokens))
}

pub fn write_response(w: &mut impl Write, result: Result<&Array2<f64>, &str>) -> io::Result<()> {
    match result {
        Ok(m) => {
            w.write_all(&(m.nrows() as u32).to_le_bytes())?;
            w.write_all(&(m.ncols() as u32).to_le_bytes())?;
            for x in m.iter() {
                w.write_all(&(*x as f32).to_le_bytes())?;
            }
        }
        Err(message) => {
            w.write_all(&ERROR_ROWS.to_le_bytes())?;
            w.write_all(&(message.len() as u32).to_le_bytes())?;
            w.write_all(message.as_bytes())?;
        }
    }
    w.flush()
}

pub fn read_response(r: &mut impl Read) -> Result<Array2<f64>, MatcherError> {
    let rows = read_u32(r)?;
    if rows == ERROR_ROWS {
        let len = read_u32(r)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        return Err(MatcherError::EncoderFailure(String::from_utf8_lossy(&buf).into_owned()));
    }
    let cols = read_u32(r)? as usize;
    let mut buf = vec![0u8; rows as usize * cols * 4];
    r.read_exact(&mut buf)?;
    let values = buf.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64).collect();
    Array2::from_shape_vec((rows as usize, cols), values).map_err(|e| MatcherError::EncoderFailure(e.to_string()))
}

/// Answers requests from `input` with `encoder` until the stream ends.
pub fn serve(encoder: &dyn TokenEncoder, input: impl Read, output: impl Write) -> io::Result<()> {
    let mut input = BufReader::new(input);
    let mut output = BufWriter::new(output);
    while let Some(tokens) = read_request(&mut input)? {
        match encoder.encode(&tokens) {
            Ok(m) => write_response(&mut output, Ok(&m))?,
            Err(e) => write_response(&mut output, Err(&e.to_string()))?,
        }
    }
    Ok(())
}

/// Client side of the protocol over any byte stream pair.
pub struct StreamEncoder<R, W> {
    id: String,
    dim: usize,
    io: Mutex<(R, W)>,
}

impl<R: Read + Send, W: Write + Send> StreamEncoder<R, W> {
    pub fn new(id: impl Into<String>, dim: usize, reader: R, writer: W) -> Self {
        Self { id: id.into(), dim, io: Mutex::new((reader, writer)) }
    }
}

impl<R: Read + Send, W: Write + Send> TokenEncoder for StreamEncoder<R, W> {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, tokens: &[String]) -> Result<Array2<f64>, MatcherError> {
        let mut guard = self.io.lock().map_err(|_| MatcherError::EncoderFailure("provider lock poisoned".into()))?;
        let (reader, writer) = &mut *guard;
        write_request(writer, tokens)?;
        let m = read_response(reader)?;
        if m.dim() != (tokens.len(), self.dim) {
            return Err(MatcherError::EncoderFailure(format!(
                "provider returned {}x{} for {} tokens of width {}",
                m.nrows(),
                m.ncols(),
                tokens.len(),
                self.dim
            )));
        }
        Ok(m)
    }
}

/// Encoder backed by a child process speaking the provider protocol on its
/// standard input and output.
pub struct ProcessEncoder {
    child: Child,
    inner: StreamEncoder<BufReader<ChildStdout>, BufWriter<ChildStdin>>,
}

impl ProcessEncoder {
    pub fn spawn(program: &str, args: &[String], id: impl Into<String>, dim: usize) -> Result<Self, MatcherError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| MatcherError::EncoderFailure(format!("cannot start {program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let inner = StreamEncoder::new(id, dim, BufReader::new(stdout), BufWriter::new(stdin));
        Ok(Self { child, inner })
    }
}

impl TokenEncoder for ProcessEncoder {
    fn id(&self) -> String {
        self.inner.id()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn encode(&self, tokens: &[String]) -> Result<Array2<f64>, MatcherError> {
        self.inner.encode(tokens)
    }
}

impl Drop for ProcessEncoder {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::ToyEncoder;
    use std::io::Cursor;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn request_round_trip() {
        let mut buf = Vec::new();
        write_request(&mut buf, &toks(&["α", "", "beta"])).unwrap();
        write_request(&mut buf, &[]).unwrap();
        let mut r = Cursor::new(buf);
        assert_eq!(read_request(&mut r).unwrap().unwrap(), toks(&["α", "", "beta"]));
        assert_eq!(read_request(&mut r).unwrap().unwrap(), Vec::<String>::new());
        assert!(read_request(&mut r).unwrap().is_none());
    }

    #[test]
    fn served_toy_encoder_matches_direct_calls_at_f32_precision() {
        let toy = ToyEncoder::new(6, 2);
        let mut requests = Vec::new();
        write_request(&mut requests, &toks(&["a", "b"])).unwrap();
        write_request(&mut requests, &toks(&["c"])).unwrap();
        let mut responses = Vec::new();
        serve(&toy, Cursor::new(requests), &mut responses).unwrap();
        let mut r = Cursor::new(responses);
        let m = read_response(&mut r).unwrap();
        let direct = toy.encode(&toks(&["a", "b"])).unwrap();
        assert_eq!(m.dim(), (2, 6));
        for (a, b) in m.iter().zip(direct.iter()) {
            assert_eq!(*a, *b as f32 as f64);
        }
        assert_eq!(read_response(&mut r).unwrap().dim(), (1, 6));
    }

    #[test]
    fn error_responses_become_encoder_failures() {
        let mut buf = Vec::new();
        write_response(&mut buf, Err("model offline")).unwrap();
        match read_response(&mut Cursor::new(buf)) {
            Err(MatcherError::EncoderFailure(m)) => assert_eq!(m, "model offline"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
