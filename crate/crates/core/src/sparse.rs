//! Compressed sparse row matrices with a fixed pattern.

use std::io::Write;

use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<u32>,
    pub val: Vec<f64>,
}

impl CsrMatrix {
    /// Pattern from sorted, duplicate-free rows.
    pub fn from_rows(rows: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            col.extend_from_slice(&r);
            row_ptr.push(col.len());
        }
        let n = row_ptr.len() - 1;
        let val = vec![0.0; col.len()];
        CsrMatrix { n, row_ptr, col, val }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::from_rows((0..n as u32).map(|i| vec![i]));
        m.val.fill(1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col[r.clone()], &self.val[r])
    }

    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].binary_search(&(j as u32)).ok().map(|k| r.start + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.find(i, j).map_or(0.0, |k| self.val[k])
    }

    /// Adds into an existing pattern entry; panics if `(i, j)` is absent.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.find(i, j).unwrap_or_else(|| panic!("entry ({i}, {j}) not in pattern"));
        self.val[k] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(1024).enumerate().for_each(|(c, ys)| {
            for (k, yi) in ys.iter_mut().enumerate() {
                let i = c * 1024 + k;
                let (cols, vals) = self.row(i);
                *yi = cols.iter().zip(vals).map(|(j, a)| a * x[*j as usize]).sum();
            }
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij − a_ji| / max |a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (j, a) in cols.iter().zip(vals) {
                d = d.max((a - self.get(*j as usize, i)).abs());
            }
        }
        d / self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn pattern_is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).0.iter().all(|&j| self.find(j as usize, i).is_some()))
    }

    pub fn write_matrix_market(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (j, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

pub fn write_vector_market(v: &[f64], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{x:.17e}")?;
    }
    Ok(())
}
