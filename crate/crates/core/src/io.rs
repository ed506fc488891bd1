//! Text formats for POVMs, state sets and density operators.
//!
//! Complex entries are written as two decimal floats `re im` with 17
//! significant digits, which round-trips doubles exactly. Blank lines and
//! lines starting with `#` are ignored on input.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::discriminator::Povm;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, HermitianOperator};
use crate::mixed::DensityOperator;
use crate::state::{PureState, StateSet};
use crate::tol::Cap;

/// States further than this from unit norm are rejected.
pub const NORM_REJECT_TOL: f64 = 1e-6;
/// States further than this from unit norm are renormalized with a warning.
pub const NORM_WARN_TOL: f64 = 1e-9;

struct Reader<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last_line: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Reader { lines: it.peekable(), last_line: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.lines.next() {
            Some((n, l)) => {
                self.last_line = n;
                Ok((n, l))
            }
            None => Err(Error::Parse {
                line: self.last_line + 1,
                message: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn finish(mut self) -> Result<()> {
        match self.lines.next() {
            Some((line, l)) => Err(Error::Parse { line, message: format!("unexpected trailing content `{l}`") }),
            None => Ok(()),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// `keyword a b …` with `count` unsigned integers.
fn header(reader: &mut Reader<'_>, keyword: &str, count: usize) -> Result<(usize, Vec<usize>)> {
    let (line, text) = reader.next(&format!("`{keyword}` header"))?;
    let mut words = text.split_whitespace();
    if words.next() != Some(keyword) {
        return Err(parse_err(line, format!("expected `{keyword}` header, found `{text}`")));
    }
    let values = words
        .map(|w| w.parse::<usize>().map_err(|_| parse_err(line, format!("`{w}` is not a non-negative integer"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != count {
        return Err(parse_err(line, format!("`{keyword}` header takes {count} integers, got {}", values.len())));
    }
    Ok((line, values))
}

/// One line of exactly `count` complex pairs.
fn complex_row(reader: &mut Reader<'_>, count: usize) -> Result<(usize, Vec<Complex64>)> {
    let (line, text) = reader.next(&format!("a row of {count} complex entries"))?;
    let values = text
        .split_whitespace()
        .map(|w| {
            w.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{w}` is not a finite number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != 2 * count {
        return Err(parse_err(
            line,
            format!("expected {count} complex entries ({} numbers), got {} numbers", 2 * count, values.len()),
        ));
    }
    Ok((line, values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()))
}

fn square_matrix(reader: &mut Reader<'_>, dim: usize) -> Result<(usize, ComplexMatrix)> {
    let mut entries = Vec::with_capacity(dim * dim);
    let mut first = 0;
    for r in 0..dim {
        let (line, row) = complex_row(reader, dim)?;
        if r == 0 {
            first = line;
        }
        entries.extend(row);
    }
    Ok((first, ComplexMatrix::from_row_major(dim, dim, entries)?))
}

fn hermitian_at(line: usize, matrix: ComplexMatrix) -> Result<HermitianOperator> {
    HermitianOperator::new(matrix).map_err(|e| parse_err(line, e.to_string()))
}

fn write_row(out: &mut String, row: impl Iterator<Item = Complex64>) {
    let parts: Vec<String> = row.map(|z| format!("{:.16e} {:.16e}", z.re, z.im)).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

fn write_matrix(out: &mut String, m: &ComplexMatrix) {
    for r in 0..m.rows() {
        write_row(out, (0..m.cols()).map(|c| m[(r, c)]));
    }
}

pub fn write_povm(povm: &Povm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "povm {} {} {}", povm.m(), povm.n(), povm.elements().len());
    for (k, e) in povm.elements().iter().enumerate() {
        let _ = writeln!(out, "element {k}");
        write_matrix(&mut out, e.matrix());
    }
    out
}

pub fn read_povm(text: &str, cap: Cap) -> Result<Povm> {
    let mut reader = Reader::new(text);
    let (line, h) = header(&mut reader, "povm", 3)?;
    let (m, n, k) = (h[0], h[1], h[2]);
    if m == 0 || n == 0 {
        return Err(parse_err(line, "m and n must be positive"));
    }
    if k != n + 1 {
        return Err(parse_err(line, format!("a POVM for {n} states has {} elements, header says {k}", n + 1)));
    }
    let dim = cap.check_power(m, n + 1)?;
    let mut elements = Vec::with_capacity(k);
    for expected in 0..k {
        let (line, text) = reader.next(&format!("`element {expected}`"))?;
        if text != format!("element {expected}") {
            return Err(parse_err(line, format!("expected `element {expected}`, found `{text}`")));
        }
        let (first, matrix) = square_matrix(&mut reader, dim)?;
        elements.push(hermitian_at(first, matrix)?);
    }
    reader.finish()?;
    Povm::new(m, n, elements)
}

/// A parsed state file and any renormalization warnings.
#[derive(Clone, Debug)]
pub struct StateFile {
    pub states: StateSet,
    pub warnings: Vec<String>,
}

pub fn read_states(text: &str) -> Result<StateFile> {
    let mut reader = Reader::new(text);
    let (line, h) = header(&mut reader, "states", 2)?;
    let (m, n) = (h[0], h[1]);
    if m == 0 || n == 0 {
        return Err(parse_err(line, "m and n must be positive"));
    }
    let mut states = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for j in 1..=n {
        let (line, row) = complex_row(&mut reader, m)?;
        let v = ComplexVector::from_vec(row);
        let deviation = (v.norm() - 1.0).abs();
        if deviation > NORM_REJECT_TOL {
            return Err(parse_err(line, format!("state {j} has norm {}", v.norm())));
        }
        if deviation > NORM_WARN_TOL {
            warnings.push(format!("line {line}: state {j} renormalized (norm {})", v.norm()));
        }
        states.push(PureState::new(v).map_err(|e| parse_err(line, e.to_string()))?);
    }
    reader.finish()?;
    Ok(StateFile { states: StateSet::new(states)?, warnings })
}

pub fn write_states(states: &StateSet) -> String {
    let mut out = format!("states {} {}\n", states.dim(), states.len());
    for v in states.vectors() {
        write_row(&mut out, v.iter().copied());
    }
    out
}

pub fn read_density(text: &str) -> Result<DensityOperator> {
    let mut reader = Reader::new(text);
    let (line, h) = header(&mut reader, "rho", 1)?;
    let d = h[0];
    if d == 0 {
        return Err(parse_err(line, "dimension must be positive"));
    }
    let (first, matrix) = square_matrix(&mut reader, d)?;
    let op = hermitian_at(first, matrix)?;
    reader.finish()?;
    DensityOperator::new(op).map_err(|e| parse_err(first, e.to_string()))
}

pub fn write_density(rho: &DensityOperator) -> String {
    let mut out = format!("rho {}\n", rho.dim());
    write_matrix(&mut out, rho.operator().matrix());
    out
}
