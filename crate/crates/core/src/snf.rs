//! Smith normal form over the integers with overflow-checked `i64` arithmetic.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnfError {
    #[error("integer overflow during Smith normal form reduction")]
    Overflow,
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: i64) -> Result<(), SnfError> {
        for c in 0..self.cols {
            let v = checked_sub_mul(self.get(dst, c), q, self.get(src, c))?;
            self.set(dst, c, v);
        }
        Ok(())
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: i64) -> Result<(), SnfError> {
        for r in 0..self.rows {
            let v = checked_sub_mul(self.get(r, dst), q, self.get(r, src))?;
            self.set(r, dst, v);
        }
        Ok(())
    }
}

fn checked_sub_mul(a: i64, q: i64, b: i64) -> Result<i64, SnfError> {
    q.checked_mul(b)
        .and_then(|p| a.checked_sub(p))
        .ok_or(SnfError::Overflow)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero invariant factors `d1 | d2 | ...`, all positive.
    pub diagonal: Vec<i64>,
    pub rank: usize,
}

/// Diagonalizes `m` by unimodular row and column operations, pivoting on the
/// entry of least absolute value in the remaining block.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm, SnfError> {
    let mut a = m.clone();
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < a.rows.min(a.cols) {
        let Some((pr, pc)) = min_pivot(&a, t) else {
            break;
        };
        a.swap_rows(t, pr);
        a.swap_cols(t, pc);
        loop {
            let p = a.get(t, t);
            let mut dirty = false;
            for r in t + 1..a.rows {
                let q = a.get(r, t) / p;
                if q != 0 {
                    a.row_axpy(r, t, q)?;
                }
                dirty |= a.get(r, t) != 0;
            }
            for c in t + 1..a.cols {
                let q = a.get(t, c) / p;
                if q != 0 {
                    a.col_axpy(c, t, q)?;
                }
                dirty |= a.get(t, c) != 0;
            }
            if dirty {
                // A remainder smaller than the pivot appeared; move it to the pivot.
                let (pr, pc) = min_pivot_cross(&a, t);
                a.swap_rows(t, pr);
                a.swap_cols(t, pc);
                continue;
            }
            // Pivot must divide every remaining entry.
            let bad = (t + 1..a.rows)
                .flat_map(|r| (t + 1..a.cols).map(move |c| (r, c)))
                .find(|&(r, c)| a.get(r, c) % p != 0);
            match bad {
                Some((r, _)) => {
                    // row[t] += row[r] brings the offending entry into row t.
                    a.row_axpy(t, r, -1)?;
                }
                None => break,
            }
        }
        diagonal.push(a.get(t, t).checked_abs().ok_or(SnfError::Overflow)?);
        t += 1;
    }
    let rank = diagonal.len();
    Ok(SmithForm { diagonal, rank })
}

fn min_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, u64)> = None;
    for r in t..a.rows {
        for c in t..a.cols {
            let v = a.get(r, c).unsigned_abs();
            if v != 0 && best.is_none_or(|(_, _, b)| v < b) {
                best = Some((r, c, v));
            }
        }
    }
    best.map(|(r, c, _)| (r, c))
}

fn min_pivot_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t, a.get(t, t).unsigned_abs());
    for r in t + 1..a.rows {
        let v = a.get(r, t).unsigned_abs();
        if v != 0 && v < best.2 {
            best = (r, t, v);
        }
    }
    for c in t + 1..a.cols {
        let v = a.get(t, c).unsigned_abs();
        if v != 0 && v < best.2 {
            best = (t, c, v);
        }
    }
    (best.0, best.1)
}
