use nalgebra::{DMatrix, DMatrixView, DVectorView};

/// Column-major tall matrix that grows one column at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    rows: usize,
    data: Vec<f64>,
}

impl Basis {
    pub fn new(rows: usize) -> Self {
        Basis { rows, data: Vec::new() }
    }

    pub fn with_capacity(rows: usize, cols: usize) -> Self {
        Basis {
            rows,
            data: Vec::with_capacity(rows * cols),
        }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Basis {
            rows: m.nrows(),
            data: m.as_slice().to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        if self.rows == 0 {
            0
        } else {
            self.data.len() / self.rows
        }
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn push(&mut self, col: &[f64]) {
        assert_eq!(col.len(), self.rows, "column length");
        self.data.extend_from_slice(col);
    }

    pub fn truncate(&mut self, cols: usize) {
        self.data.truncate(cols * self.rows);
    }

    pub fn view(&self) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.data, self.rows, self.ncols())
    }

    /// View of the leading `cols` columns.
    pub fn leading(&self, cols: usize) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.data[..cols * self.rows], self.rows, cols)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        self.view().into_owned()
    }

    /// `Bᵀ x`
    pub fn tr_mul(&self, x: &[f64]) -> Vec<f64> {
        let xv = DVectorView::from_slice(x, self.rows);
        self.view().tr_mul(&xv).as_slice().to_vec()
    }

    /// `y ← y - B c`, with `c` possibly shorter than the number of columns.
    pub fn sub_mul(&self, c: &[f64], y: &mut [f64]) {
        for (j, &cj) in c.iter().enumerate() {
            if cj != 0.0 {
                for (yi, bi) in y.iter_mut().zip(self.col(j)) {
                    *yi -= cj * bi;
                }
            }
        }
    }

    /// `B c`
    pub fn mul(&self, c: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (j, &cj) in c.iter().enumerate() {
            for (yi, bi) in y.iter_mut().zip(self.col(j)) {
                *yi += cj * bi;
            }
        }
        y
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
