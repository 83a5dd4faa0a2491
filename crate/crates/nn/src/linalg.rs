//! Safe strided wrapper around `matrixmultiply::dgemm`.

/// Read-only strided matrix view.
#[derive(Clone, Copy)]
pub struct MatRef<'a> {
    pub data: &'a [f64],
    pub rows: usize,
    pub cols: usize,
    pub rs: usize,
    pub cs: usize,
}

impl<'a> MatRef<'a> {
    /// Dense row-major view.
    pub fn dense(data: &'a [f64], rows: usize, cols: usize) -> Self {
        Self {
            data,
            rows,
            cols,
            rs: cols,
            cs: 1,
        }
    }

    pub fn t(self) -> Self {
        Self {
            data: self.data,
            rows: self.cols,
            cols: self.rows,
            rs: self.cs,
            cs: self.rs,
        }
    }

    fn check(&self) {
        if self.rows > 0 && self.cols > 0 {
            let last = (self.rows - 1) * self.rs + (self.cols - 1) * self.cs;
            assert!(last < self.data.len(), "strided view exceeds its storage");
        }
    }
}

/// Writable strided matrix view.
pub struct MatMut<'a> {
    pub data: &'a mut [f64],
    pub rows: usize,
    pub cols: usize,
    pub rs: usize,
    pub cs: usize,
}

impl<'a> MatMut<'a> {
    pub fn dense(data: &'a mut [f64], rows: usize, cols: usize) -> Self {
        Self {
            data,
            rows,
            cols,
            rs: cols,
            cs: 1,
        }
    }
}

/// `c = alpha * a * b + beta * c`.
pub fn gemm(alpha: f64, a: MatRef<'_>, b: MatRef<'_>, beta: f64, c: MatMut<'_>) {
    assert_eq!(a.cols, b.rows, "gemm inner dimension");
    assert_eq!(a.rows, c.rows, "gemm output rows");
    assert_eq!(b.cols, c.cols, "gemm output cols");
    a.check();
    b.check();
    if c.rows > 0 && c.cols > 0 {
        let last = (c.rows - 1) * c.rs + (c.cols - 1) * c.cs;
        assert!(last < c.data.len(), "strided output exceeds its storage");
    } else {
        return;
    }
    // Distinct output elements must not alias.
    assert!(c.rows == 1 || c.cols == 1 || c.rs != c.cs);
    // SAFETY: every index touched through the given strides was checked to
    // lie inside its slice; `c` is uniquely borrowed.
    unsafe {
        matrixmultiply::dgemm(
            a.rows,
            a.cols,
            b.cols,
            alpha,
            a.data.as_ptr(),
            a.rs as isize,
            a.cs as isize,
            b.data.as_ptr(),
            b.rs as isize,
            b.cs as isize,
            beta,
            c.data.as_mut_ptr(),
            c.rs as isize,
            c.cs as isize,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_product() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]; // 2x3
        let b = [1.0, 0.0, 0.0, 1.0, 1.0, 1.0]; // 3x2
        let mut c = [0.0; 4];
        gemm(1.0, MatRef::dense(&a, 2, 3), MatRef::dense(&b, 3, 2), 0.0, MatMut::dense(&mut c, 2, 2));
        assert_eq!(c, [4.0, 5.0, 10.0, 11.0]);
    }

    #[test]
    fn interleaved_views() {
        // 2x2 complex, interleaved; real part [[1,2],[3,4]], imaginary [[5,6],[7,8]]
        let w = [1.0, 5.0, 2.0, 6.0, 3.0, 7.0, 4.0, 8.0];
        let re = MatRef { data: &w, rows: 2, cols: 2, rs: 4, cs: 2 };
        let im = MatRef { data: &w[1..], rows: 2, cols: 2, rs: 4, cs: 2 };
        let eye = [1.0, 0.0, 0.0, 1.0];
        let mut c = [0.0; 4];
        gemm(1.0, re.t(), MatRef::dense(&eye, 2, 2), 0.0, MatMut::dense(&mut c, 2, 2));
        assert_eq!(c, [1.0, 3.0, 2.0, 4.0]);
        gemm(1.0, im, MatRef::dense(&eye, 2, 2), 0.0, MatMut::dense(&mut c, 2, 2));
        assert_eq!(c, [5.0, 6.0, 7.0, 8.0]);
    }
}
