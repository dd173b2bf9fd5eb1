//! Payoff matrices, mixed strategies and exact expected-gradient feedback.
//!
//! The x-player (rows) maximizes `<x, A y>`, the y-player (columns)
//! minimizes it. Each round the x-player sees the gain vector `g = A y`
//! and the y-player the loss vector `l = A^T x`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Absolute tolerance on the probability mass of a [`Strategy`].
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Dense row-major payoff matrix with entries in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgs(format!(
                "matrix needs at least one row and column, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        for (k, &value) in entries.iter().enumerate() {
            // NaN fails the range test as well
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::EntryOutOfRange {
                    row: k / cols,
                    col: k % cols,
                    value,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    /// The 2x2 matching-pennies game.
    pub fn matching_pennies() -> Self {
        Self {
            rows: 2,
            cols: 2,
            entries: vec![1.0, -1.0, -1.0, 1.0],
        }
    }

    /// Lower-bound instance: action 1 is strictly dominant for both players
    /// with a payoff gap of `delta`.
    ///
    /// `A(1,1) = 0`, `A(1,j) = delta` for `j != 1`, `A(i,1) = -delta` for
    /// `i != 1`, and zero elsewhere.
    pub fn adversarial(rows: usize, cols: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidDelta(delta));
        }
        if rows < 2 || cols < 2 {
            return Err(Error::TooFewActions { m: rows, n: cols });
        }
        let mut entries = vec![0.0; rows * cols];
        entries[1..cols].fill(delta);
        for i in 1..rows {
            entries[i * cols] = -delta;
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// `A y` written into `out`.
    pub fn gain_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.cols, y.len())?;
        check_len(self.rows, out.len())?;
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), y);
        }
        Ok(())
    }

    /// `A^T x` written into `out`.
    pub fn loss_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.rows, x.len())?;
        check_len(self.cols, out.len())?;
        out.fill(0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        Ok(())
    }

    pub fn gain(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.rows];
        self.gain_into(y, &mut out)?;
        Ok(out)
    }

    pub fn loss(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.cols];
        self.loss_into(x, &mut out)?;
        Ok(out)
    }

    /// Expected payoff `<x, A y>`.
    pub fn value(&self, x: &Strategy, y: &Strategy) -> Result<f64> {
        Ok(dot(x.probs(), &self.gain(y.probs())?))
    }

    /// Parses the plain-text matrix format: a header line `m n`, then `m`
    /// lines of `n` whitespace-separated reals. Lines starting with `#` and
    /// blank lines are ignored.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::MatrixFile {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(0, "missing 'm n' header".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(err(hline, format!("expected 'm n', found '{header}'")));
        }
        let parse_dim = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| err(hline, format!("bad dimension '{s}'")))
        };
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

        let mut entries = Vec::with_capacity(rows * cols);
        let mut seen_rows = 0;
        for (lno, line) in lines {
            if seen_rows == rows {
                return Err(err(lno, format!("more than {rows} rows")));
            }
            let before = entries.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| err(lno, format!("'{tok}' is not a number")))?;
                if !(-1.0..=1.0).contains(&v) {
                    return Err(err(lno, format!("entry {v} outside [-1, 1]")));
                }
                entries.push(v);
            }
            if entries.len() - before != cols {
                return Err(err(
                    lno,
                    format!("expected {cols} values, found {}", entries.len() - before),
                ));
            }
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(err(0, format!("expected {rows} rows, found {seen_rows}")));
        }
        Self::new(rows, cols, entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy(Vec<f64>);

impl Strategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
            return Err(Error::InvalidStrategy(format!(
                "coordinate {i} is {p}, expected a nonnegative probability"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidStrategy(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "uniform strategy needs at least one action");
        Self(vec![1.0 / dim as f64; dim])
    }

    pub fn pure(dim: usize, action: usize) -> Self {
        let mut p = vec![0.0; dim];
        p[action] = 1.0;
        Self(p)
    }

    /// Skips validation; callers guarantee a normalized nonnegative vector.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Strategy {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Gain and loss vectors `(A y, A^T x)` for a strategy pair.
pub fn gradients(a: &PayoffMatrix, x: &Strategy, y: &Strategy) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((a.gain(y.probs())?, a.loss(x.probs())?))
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn construction() {
        let z = PayoffMatrix::new(1, 1, vec![0.0]).unwrap();
        assert_eq!(z.get(0, 0), 0.0);
        let mp = PayoffMatrix::new(2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        assert_eq!(mp, PayoffMatrix::matching_pennies());
        assert!(matches!(
            PayoffMatrix::new(2, 2, vec![0.0, 2.0, -1.0, 0.0]),
            Err(Error::EntryOutOfRange { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            PayoffMatrix::new(2, 2, vec![0.0; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 3
            })
        ));
        assert!(PayoffMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn adversarial_layout() {
        let a = PayoffMatrix::adversarial(2, 2, 1.0).unwrap();
        assert_eq!(a.entries(), &[0.0, 1.0, -1.0, 0.0]);
        let b = PayoffMatrix::adversarial(3, 2, 0.5).unwrap();
        assert_eq!(b.entries(), &[0.0, 0.5, -0.5, 0.0, -0.5, 0.0]);
        assert!(matches!(
            PayoffMatrix::adversarial(2, 2, 0.0),
            Err(Error::InvalidDelta(_))
        ));
        assert!(matches!(
            PayoffMatrix::adversarial(2, 2, 1.5),
            Err(Error::InvalidDelta(_))
        ));
        assert!(matches!(
            PayoffMatrix::adversarial(1, 3, 0.5),
            Err(Error::TooFewActions { .. })
        ));
    }

    #[test]
    fn gradient_examples() {
        let a = PayoffMatrix::adversarial(2, 2, 1.0).unwrap();
        let u = Strategy::uniform(2);
        let (g, l) = gradients(&a, &u, &u).unwrap();
        assert!(close(&g, &[0.5, -0.5], 1e-15));
        assert!(close(&l, &[-0.5, 0.5], 1e-15));

        let z = PayoffMatrix::zeros(3, 4).unwrap();
        let (g, l) = gradients(&z, &Strategy::pure(3, 1), &Strategy::uniform(4)).unwrap();
        assert!(g.iter().chain(&l).all(|v| *v == 0.0));

        let (g, l) = gradients(&PayoffMatrix::matching_pennies(), &u, &u).unwrap();
        assert!(close(&g, &[0.0, 0.0], 0.0) && close(&l, &[0.0, 0.0], 0.0));

        let wrong = Strategy::uniform(3);
        assert!(matches!(
            gradients(&a, &wrong, &u),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn strategy_validation() {
        assert!(Strategy::new(vec![0.5, 0.5]).is_ok());
        assert!(Strategy::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(Strategy::new(vec![0.5, 0.6]).is_err());
        assert!(Strategy::new(vec![1.5, -0.5]).is_err());
        assert!(Strategy::new(vec![]).is_err());
    }

    #[test]
    fn matrix_file_round_trip() {
        let text = "# comment\n3 2\n0 0.5\n# mid comment\n-0.5 0\n\n-0.5 0\n";
        let a = PayoffMatrix::parse(text, Path::new("t.txt")).unwrap();
        assert_eq!(a, PayoffMatrix::adversarial(3, 2, 0.5).unwrap());
        let again = PayoffMatrix::parse(&a.to_text(), Path::new("t.txt")).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn matrix_file_errors() {
        let p = Path::new("bad.txt");
        for text in [
            "",
            "2\n1 1\n",
            "2 2\n1 1\n",
            "2 2\n1 1\n1\n",
            "2 2\n1 1\n1 x\n",
            "2 2\n1 1\n1 1.5\n",
            "1 1\n0\n0\n",
            "0 2\n",
        ] {
            assert!(PayoffMatrix::parse(text, p).is_err(), "accepted {text:?}");
        }
    }
}
