//! Dense real-or-complex matrix carrier.
//!
//! One type carries every matrix in the crate: sample matrices `A`, Gram
//! matrices `A*A`, covariance estimates, and the complex partial-Fourier
//! measurement matrices. Storage is row-major. Constructors reject
//! non-finite entries.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Entries,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: Entries::Real(vec![0.0; rows * cols]),
        }
    }

    pub fn zeros_complex(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: Entries::Complex(vec![Complex64::new(0.0, 0.0); rows * cols]),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, x) in data.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    row: i / cols,
                    col: i % cols,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            data: Entries::Real(data),
        })
    }

    pub fn from_row_major_complex(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: i / cols,
                    col: i % cols,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            data: Entries::Complex(data),
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("no rows supplied".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Self::from_row_major(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.data, Entries::Complex(_))
    }

    pub fn entries(&self) -> &Entries {
        &self.data
    }

    /// Uniform accessor; real matrices report a zero imaginary part.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match &self.data {
            Entries::Real(v) => Complex64::new(v[r * self.cols + c], 0.0),
            Entries::Complex(v) => v[r * self.cols + c],
        }
    }

    /// Real part accessor; panics on complex storage to catch misuse early.
    #[inline]
    pub fn get_real(&self, r: usize, c: usize) -> f64 {
        match &self.data {
            Entries::Real(v) => v[r * self.cols + c],
            Entries::Complex(_) => panic!("get_real on a complex matrix"),
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        let cols = self.cols;
        match &mut self.data {
            Entries::Real(v) => v[r * cols + c] = value,
            Entries::Complex(v) => v[r * cols + c] = Complex64::new(value, 0.0),
        }
    }

    #[inline]
    pub fn set_complex(&mut self, r: usize, c: usize, value: Complex64) {
        let cols = self.cols;
        match &mut self.data {
            Entries::Real(_) => panic!("set_complex on a real matrix"),
            Entries::Complex(v) => v[r * cols + c] = value,
        }
    }

    /// Row slice for real matrices.
    pub fn row(&self, r: usize) -> &[f64] {
        match &self.data {
            Entries::Real(v) => &v[r * self.cols..(r + 1) * self.cols],
            Entries::Complex(_) => panic!("row slice on a complex matrix"),
        }
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn column_norm(&self, c: usize) -> f64 {
        let mut s = 0.0;
        match &self.data {
            Entries::Real(v) => {
                for r in 0..self.rows {
                    let x = v[r * self.cols + c];
                    s += x * x;
                }
            }
            Entries::Complex(v) => {
                for r in 0..self.rows {
                    s += v[r * self.cols + c].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols).map(|c| self.column_norm(c)).collect()
    }

    pub fn scaled(&self, f: f64) -> Self {
        let data = match &self.data {
            Entries::Real(v) => Entries::Real(v.iter().map(|x| x * f).collect()),
            Entries::Complex(v) => Entries::Complex(v.iter().map(|z| z * f).collect()),
        };
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        match &self.data {
            Entries::Real(v) => {
                let mut out = vec![0.0; self.rows * self.cols];
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        out[c * self.rows + r] = v[r * self.cols + c];
                    }
                }
                Self {
                    rows: self.cols,
                    cols: self.rows,
                    data: Entries::Real(out),
                }
            }
            Entries::Complex(v) => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.rows * self.cols];
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        out[c * self.rows + r] = v[r * self.cols + c].conj();
                    }
                }
                Self {
                    rows: self.cols,
                    cols: self.rows,
                    data: Entries::Complex(out),
                }
            }
        }
    }

    /// Gram matrix `A* A` (cols x cols, Hermitian by construction).
    pub fn gram(&self) -> Self {
        let n = self.cols;
        match &self.data {
            Entries::Real(v) => {
                let mut g = vec![0.0; n * n];
                for r in 0..self.rows {
                    let row = &v[r * n..(r + 1) * n];
                    for j in 0..n {
                        let a = row[j];
                        if a != 0.0 {
                            let grow = &mut g[j * n..(j + 1) * n];
                            for (gk, &rk) in grow[j..].iter_mut().zip(&row[j..]) {
                                *gk += a * rk;
                            }
                        }
                    }
                }
                for j in 0..n {
                    for k in 0..j {
                        g[j * n + k] = g[k * n + j];
                    }
                }
                Self {
                    rows: n,
                    cols: n,
                    data: Entries::Real(g),
                }
            }
            Entries::Complex(v) => {
                let mut g = vec![Complex64::new(0.0, 0.0); n * n];
                for r in 0..self.rows {
                    let row = &v[r * n..(r + 1) * n];
                    for j in 0..n {
                        let a = row[j].conj();
                        for k in j..n {
                            g[j * n + k] += a * row[k];
                        }
                    }
                }
                for j in 0..n {
                    for k in 0..j {
                        g[j * n + k] = g[k * n + j].conj();
                    }
                }
                Self {
                    rows: n,
                    cols: n,
                    data: Entries::Complex(g),
                }
            }
        }
    }

    /// Subtracts `s * I` in place; requires a square matrix.
    pub fn sub_scaled_identity(&mut self, s: f64) {
        assert_eq!(self.rows, self.cols, "sub_scaled_identity needs a square matrix");
        let n = self.cols;
        match &mut self.data {
            Entries::Real(v) => {
                for i in 0..n {
                    v[i * n + i] -= s;
                }
            }
            Entries::Complex(v) => {
                for i in 0..n {
                    v[i * n + i] -= s;
                }
            }
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.is_complex() || other.is_complex() {
            let mut out = DenseMatrix::zeros_complex(self.rows, other.cols);
            for r in 0..self.rows {
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    for c in 0..other.cols {
                        let cur = out.get(r, c);
                        out.set_complex(r, c, cur + a * other.get(k, c));
                    }
                }
            }
            Ok(out)
        } else {
            let mut out = DenseMatrix::zeros(self.rows, other.cols);
            let (a, b) = (self.real_slice(), other.real_slice());
            if let Entries::Real(o) = &mut out.data {
                for r in 0..self.rows {
                    for k in 0..self.cols {
                        let av = a[r * self.cols + k];
                        if av != 0.0 {
                            let brow = &b[k * other.cols..(k + 1) * other.cols];
                            let orow = &mut o[r * other.cols..(r + 1) * other.cols];
                            for (x, y) in orow.iter_mut().zip(brow) {
                                *x += av * y;
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
    }

    /// Applies the matrix to a real vector, returning `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        assert!(!self.is_complex(), "apply expects a real matrix");
        let v = self.real_slice();
        (0..self.rows)
            .map(|r| {
                v[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        match &self.data {
            Entries::Real(v) => {
                let mut out = Vec::with_capacity(self.rows * idx.len());
                for r in 0..self.rows {
                    let row = &v[r * self.cols..(r + 1) * self.cols];
                    out.extend(idx.iter().map(|&c| row[c]));
                }
                Self {
                    rows: self.rows,
                    cols: idx.len(),
                    data: Entries::Real(out),
                }
            }
            Entries::Complex(v) => {
                let mut out = Vec::with_capacity(self.rows * idx.len());
                for r in 0..self.rows {
                    let row = &v[r * self.cols..(r + 1) * self.cols];
                    out.extend(idx.iter().map(|&c| row[c]));
                }
                Self {
                    rows: self.rows,
                    cols: idx.len(),
                    data: Entries::Complex(out),
                }
            }
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        match &self.data {
            Entries::Real(v) => {
                let mut out = Vec::with_capacity(idx.len() * self.cols);
                for &r in idx {
                    out.extend_from_slice(&v[r * self.cols..(r + 1) * self.cols]);
                }
                Self {
                    rows: idx.len(),
                    cols: self.cols,
                    data: Entries::Real(out),
                }
            }
            Entries::Complex(v) => {
                let mut out = Vec::with_capacity(idx.len() * self.cols);
                for &r in idx {
                    out.extend_from_slice(&v[r * self.cols..(r + 1) * self.cols]);
                }
                Self {
                    rows: idx.len(),
                    cols: self.cols,
                    data: Entries::Complex(out),
                }
            }
        }
    }

    /// Largest deviation from Hermitian symmetry, `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs(&self) -> f64 {
        match &self.data {
            Entries::Real(v) => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            Entries::Complex(v) => v.iter().fold(0.0f64, |m, z| m.max(z.norm())),
        }
    }

    pub(crate) fn real_slice(&self) -> &[f64] {
        match &self.data {
            Entries::Real(v) => v,
            Entries::Complex(_) => panic!("real_slice on a complex matrix"),
        }
    }

    pub(crate) fn complex_slice(&self) -> &[Complex64] {
        match &self.data {
            Entries::Complex(v) => v,
            Entries::Real(_) => panic!("complex_slice on a real matrix"),
        }
    }

    /// Reinterprets a real matrix as complex (no-op for complex input).
    pub fn to_complex(&self) -> DenseMatrix {
        match &self.data {
            Entries::Complex(_) => self.clone(),
            Entries::Real(v) => Self {
                rows: self.rows,
                cols: self.cols,
                data: Entries::Complex(v.iter().map(|&x| Complex64::new(x, 0.0)).collect()),
            },
        }
    }

    // ---- CSV (real matrices, one row per line) ----

    pub fn to_csv(&self) -> String {
        assert!(!self.is_complex(), "CSV format carries real matrices only");
        let mut out = String::new();
        let v = self.real_slice();
        for r in 0..self.rows {
            let row = &v[r * self.cols..(r + 1) * self.cols];
            for (i, x) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            match row {
                Ok(r) => rows.push(r),
                Err(e) => {
                    return Err(Error::Parse(format!("line {}: {e}", lineno + 1)));
                }
            }
        }
        Self::from_rows(rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    // ---- binary format: u64 rows, u64 cols, u8 complex flag, then raw
    // little-endian doubles, row-major (complex interleaved re, im) ----

    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        w.write_all(&[self.is_complex() as u8])?;
        match &self.data {
            Entries::Real(v) => {
                for x in v {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
            Entries::Complex(v) => {
                for z in v {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let rows = u64::from_le_bytes(u64buf) as usize;
        r.read_exact(&mut u64buf)?;
        let cols = u64::from_le_bytes(u64buf) as usize;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Parse("matrix dimensions overflow".into()))?;
        if flag[0] == 0 {
            let mut data = Vec::with_capacity(count);
            for _ in 0..count {
                r.read_exact(&mut u64buf)?;
                data.push(f64::from_le_bytes(u64buf));
            }
            Self::from_row_major(rows, cols, data)
        } else {
            let mut data = Vec::with_capacity(count);
            for _ in 0..count {
                r.read_exact(&mut u64buf)?;
                let re = f64::from_le_bytes(u64buf);
                r.read_exact(&mut u64buf)?;
                let im = f64::from_le_bytes(u64buf);
                data.push(Complex64::new(re, im));
            }
            Self::from_row_major_complex(rows, cols, data)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]);
        assert!(matches!(err, Err(Error::NonFinite { row: 0, col: 1 })));
        let err = DenseMatrix::from_row_major(2, 1, vec![1.0, f64::INFINITY]);
        assert!(matches!(err, Err(Error::NonFinite { row: 1, col: 0 })));
    }

    #[test]
    fn gram_is_adjoint_times_self() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]])
            .unwrap();
        let g = a.gram();
        let g2 = a.adjoint().matmul(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.get_real(i, j) - g2.get_real(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_gram_is_hermitian() {
        let a = DenseMatrix::from_row_major_complex(
            2,
            2,
            vec![
                Complex64::new(1.0, 1.0),
                Complex64::new(0.0, -2.0),
                Complex64::new(3.0, 0.5),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let g = a.gram();
        assert!(g.hermitian_deviation() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let a = DenseMatrix::from_rows(vec![vec![1.5, -2.25], vec![0.1, 1e-17]]).unwrap();
        let b = DenseMatrix::from_csv(&a.to_csv()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binary_round_trip_real_and_complex() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 0.25]]).unwrap();
        let mut buf = Vec::new();
        a.write_binary(&mut buf).unwrap();
        let b = DenseMatrix::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(a, b);

        let c = a.to_complex();
        let mut buf = Vec::new();
        c.write_binary(&mut buf).unwrap();
        let d = DenseMatrix::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn select_columns_and_rows() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let c = a.select_columns(&[2, 0]);
        assert_eq!(c.row(0), &[3.0, 1.0]);
        let r = a.select_rows(&[1]);
        assert_eq!(r.row(0), &[4.0, 5.0, 6.0]);
    }
}
