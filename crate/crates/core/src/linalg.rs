//! Exact linear algebra over the rationals.
//!
//! Everything here works on [`Scalar`] (arbitrary precision rationals), so
//! ranks, kernels and subspace comparisons are exact. Subspaces are kept in
//! reduced row echelon form with unit pivots, which makes structural equality
//! the same thing as equality of subspaces.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(LinalgError::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Stacks `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        Ok(out)
    }

    /// Exact rank, by fraction-free (Bareiss) elimination on an integer copy.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| clear_denominators(self.row(r)))
            .filter(|row| row.iter().any(|x| !x.is_zero()))
            .collect();
        let mut rank = 0;
        let mut prev = BigInt::one();
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank][c].clone();
            for r in rank + 1..rows.len() {
                let factor = rows[r][c].clone();
                let (top, bottom) = rows.split_at_mut(r);
                for (k, entry) in bottom[0].iter_mut().enumerate().skip(c) {
                    let v = &pivot * &*entry - &factor * &top[rank][k];
                    // Bareiss: the division is exact.
                    *entry = v / &prev;
                }
            }
            prev = pivot;
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Reduced row echelon form with unit pivots; returns the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = m[(lead, c)].recip();
            for k in c..m.cols {
                let v = &m[(lead, k)] * &inv;
                m[(lead, k)] = v;
            }
            for r in 0..m.rows {
                if r == lead || m[(r, c)].is_zero() {
                    continue;
                }
                let factor = m[(r, c)].clone();
                for k in c..m.cols {
                    let v = &m[(lead, k)] * &factor;
                    if !v.is_zero() {
                        m[(r, k)] -= v;
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    /// Basis of the right null space, one vector per free column, in column order.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        (0..self.cols)
            .filter(|&c| is_pivot[c].is_none())
            .map(|free| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[free] = Scalar::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, free)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinalgError> {
        let (x, _, _) = match self.solve_affine(b)? {
            Some(s) => s,
            None => return Ok(None),
        };
        Ok(Some(x))
    }

    /// Particular solution (free variables zero), kernel basis, and free columns.
    #[allow(clippy::type_complexity)]
    fn solve_affine(
        &self,
        b: &[Scalar],
    ) -> Result<Option<(Vec<Scalar>, Vec<Vec<Scalar>>, Vec<usize>)>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let aug = self.hstack(&Matrix::from_columns(self.rows, &[b.to_vec()])?)?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r[(row, self.cols)].clone();
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        Ok(Some((x, self.kernel(), free)))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

fn clear_denominators(row: &[Scalar]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect()
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// A linear subspace of `Q^ambient`, stored by its canonical echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}; {:?})", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    /// The span of `vectors`, each of length `ambient`.
    pub fn span(ambient: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let m = Matrix::from_rows(ambient, vectors)?;
        Ok(Self::from_matrix_rows(&m))
    }

    fn from_matrix_rows(m: &Matrix) -> Self {
        let (r, pivots) = m.rref();
        let basis = Matrix::from_rows(m.cols(), (0..pivots.len()).map(|i| r.row(i).to_vec()).collect())
            .expect("rref rows have ambient length");
        Subspace {
            ambient: m.cols(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.to_rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    fn check_ambient(&self, other: usize) -> Result<(), LinalgError> {
        if self.ambient != other {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: other,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other.ambient)?;
        let mut rows = self.basis.to_rows();
        rows.extend(other.basis.to_rows());
        Subspace::span(self.ambient, rows)
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> Result<bool, LinalgError> {
        self.check_ambient(v.len())?;
        if is_zero_vec(v) {
            return Ok(true);
        }
        // With unit pivots in echelon form, v is in the span iff subtracting
        // v[pivot] * row for every pivot leaves zero.
        let mut rest = v.to_vec();
        for r in 0..self.dim() {
            let row = self.basis.row(r);
            let pivot = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            let factor = rest[pivot].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &factor * b;
            }
        }
        Ok(is_zero_vec(&rest))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other.ambient)?;
        for r in 0..other.dim() {
            if !self.contains_vector(other.basis.row(r))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First basis vector of `other` not lying in `self`, if any.
    pub fn first_missing(&self, other: &Subspace) -> Result<Option<Vec<Scalar>>, LinalgError> {
        self.check_ambient(other.ambient)?;
        for r in 0..other.dim() {
            if !self.contains_vector(other.basis.row(r))? {
                return Ok(Some(other.basis.row(r).to_vec()));
            }
        }
        Ok(None)
    }
}

/// Outcome of [`solve_nonneg`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveReport {
    /// Exactly one admissible solution.
    Unique(Vec<Scalar>),
    NoSolution,
    /// More than one solution of `a x = b`. `particular` is a non-negative
    /// (and integral, when requested) solution whenever `certified` is true;
    /// otherwise it is only an affine solution.
    NonUnique {
        particular: Vec<Scalar>,
        kernel: Vec<Vec<Scalar>>,
        certified: bool,
    },
}

/// Kernels up to this dimension are searched for non-negative solutions.
pub const MAX_ENUMERATED_KERNEL: usize = 2;

/// Integer parameters tried along an unbounded direction before giving up.
const UNBOUNDED_SEARCH: i64 = 64;

/// Solves `a x = b` for `x >= 0` (and integral when `integral` is set).
pub fn solve_nonneg(a: &Matrix, b: &[Scalar], integral: bool) -> Result<SolveReport, LinalgError> {
    let Some((x0, kernel, free)) = a.solve_affine(b)? else {
        return Ok(SolveReport::NoSolution);
    };
    let admissible = |x: &[Scalar]| {
        x.iter()
            .all(|v| !v.is_negative() && (!integral || v.is_integer()))
    };
    if kernel.is_empty() {
        return Ok(if admissible(&x0) {
            SolveReport::Unique(x0)
        } else {
            SolveReport::NoSolution
        });
    }
    if kernel.len() > MAX_ENUMERATED_KERNEL {
        return Ok(SolveReport::NonUnique {
            particular: x0,
            kernel,
            certified: false,
        });
    }

    // The free coordinates of x are exactly the kernel parameters t, and
    // x(t) = x0 + sum_j t_j kernel_j. Each coordinate gives a constraint
    // x_i(t) >= 0, i.e. (kernel_1[i], kernel_2[i]) . t >= -x0[i].
    let point = |t: &[Scalar]| -> Vec<Scalar> {
        let mut x = x0.clone();
        for (tj, kj) in t.iter().zip(&kernel) {
            for (xi, ki) in x.iter_mut().zip(kj) {
                *xi += tj * ki;
            }
        }
        x
    };
    let constraints: Vec<HalfPlane> = (0..x0.len())
        .map(|i| HalfPlane {
            coeffs: kernel.iter().map(|k| k[i].clone()).collect(),
            rhs: -x0[i].clone(),
        })
        .collect();
    debug_assert_eq!(free.len(), kernel.len());

    let region = Region::new(constraints, kernel.len());
    let non_unique = |particular: Vec<Scalar>, certified: bool| SolveReport::NonUnique {
        particular,
        kernel: kernel.clone(),
        certified,
    };
    if !integral {
        return Ok(match region.describe() {
            RegionShape::Empty => SolveReport::NoSolution,
            RegionShape::Point(t) => SolveReport::Unique(point(&t)),
            RegionShape::Many(t) => non_unique(point(&t), true),
        });
    }

    // Integral points: free coordinates must be integers, pivot coordinates
    // are checked after substitution.
    let mut found: Vec<Vec<Scalar>> = Vec::new();
    let mut exhaustive = true;
    region.for_each_integer_point(UNBOUNDED_SEARCH, &mut exhaustive, &mut |t| {
        let x = point(t);
        if admissible(&x) {
            found.push(x);
        }
        found.len() < 2
    });
    Ok(match found.len() {
        0 if exhaustive => SolveReport::NoSolution,
        0 => non_unique(x0, false),
        1 if exhaustive => SolveReport::Unique(found.pop().unwrap()),
        // A single integral point in an unbounded region repeats along the
        // recession direction, so it is never alone.
        1 => non_unique(found.pop().unwrap(), true),
        _ => non_unique(found.swap_remove(0), true),
    })
}

/// `coeffs . t >= rhs`
#[derive(Debug, Clone)]
struct HalfPlane {
    coeffs: Vec<Scalar>,
    rhs: Scalar,
}

enum RegionShape {
    Empty,
    Point(Vec<Scalar>),
    Many(Vec<Scalar>),
}

#[derive(Debug, Clone, Default)]
struct Interval {
    lo: Option<Scalar>,
    hi: Option<Scalar>,
    empty: bool,
}

impl Interval {
    fn from_1d(cs: &[HalfPlane]) -> Interval {
        let mut iv = Interval::default();
        for c in cs {
            let a = &c.coeffs[0];
            if a.is_zero() {
                if c.rhs.is_positive() {
                    iv.empty = true;
                }
                continue;
            }
            let bound = &c.rhs / a;
            if a.is_positive() {
                if iv.lo.as_ref().is_none_or(|lo| &bound > lo) {
                    iv.lo = Some(bound);
                }
            } else if iv.hi.as_ref().is_none_or(|hi| &bound < hi) {
                iv.hi = Some(bound);
            }
        }
        if let (Some(lo), Some(hi)) = (&iv.lo, &iv.hi) {
            if lo > hi {
                iv.empty = true;
            }
        }
        iv
    }

    fn is_point(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(a), Some(b)) if a == b)
    }

    /// Any point of a non-empty interval.
    fn sample(&self) -> Scalar {
        match (&self.lo, &self.hi) {
            (Some(lo), _) => lo.clone(),
            (None, Some(hi)) => hi.clone(),
            (None, None) => Scalar::zero(),
        }
    }
}

/// Feasible region of at most two parameters, handled by Fourier-Motzkin.
struct Region {
    constraints: Vec<HalfPlane>,
    dims: usize,
}

impl Region {
    fn new(constraints: Vec<HalfPlane>, dims: usize) -> Self {
        Region { constraints, dims }
    }

    /// Constraints on t_0 after eliminating t_1.
    fn projected(&self) -> Vec<HalfPlane> {
        if self.dims == 1 {
            return self.constraints.clone();
        }
        let (mut lower, mut upper, mut out) = (Vec::new(), Vec::new(), Vec::new());
        for c in &self.constraints {
            let b = &c.coeffs[1];
            if b.is_zero() {
                out.push(HalfPlane {
                    coeffs: vec![c.coeffs[0].clone()],
                    rhs: c.rhs.clone(),
                });
            } else if b.is_positive() {
                lower.push(c);
            } else {
                upper.push(c);
            }
        }
        // lower: t1 >= (rhs - a t0)/b, upper: t1 <= (rhs - a t0)/b with b < 0.
        for l in &lower {
            for u in &upper {
                let (al, bl) = (&l.coeffs[0], &l.coeffs[1]);
                let (au, bu) = (&u.coeffs[0], &u.coeffs[1]);
                // (rl - al t0)/bl <= (ru - au t0)/bu, multiply by bl * (-bu) > 0
                let nbu = -bu.clone();
                out.push(HalfPlane {
                    coeffs: vec![al * &nbu + au * bl],
                    rhs: &l.rhs * &nbu + &u.rhs * bl,
                });
            }
        }
        out
    }

    /// Interval for t_1 once t_0 is fixed.
    fn fiber(&self, t0: &Scalar) -> Interval {
        let cs: Vec<HalfPlane> = self
            .constraints
            .iter()
            .map(|c| HalfPlane {
                coeffs: vec![c.coeffs[1].clone()],
                rhs: &c.rhs - &c.coeffs[0] * t0,
            })
            .collect();
        Interval::from_1d(&cs)
    }

    fn describe(&self) -> RegionShape {
        let first = Interval::from_1d(&self.projected());
        if first.empty {
            return RegionShape::Empty;
        }
        let t0 = first.sample();
        if self.dims == 1 {
            return if first.is_point() {
                RegionShape::Point(vec![t0])
            } else {
                RegionShape::Many(vec![t0])
            };
        }
        let fiber = self.fiber(&t0);
        debug_assert!(!fiber.empty);
        let t1 = fiber.sample();
        if first.is_point() && fiber.is_point() {
            RegionShape::Point(vec![t0, t1])
        } else {
            RegionShape::Many(vec![t0, t1])
        }
    }

    /// Visits integer points; `visit` returns false to stop early. Unbounded
    /// ranges are cut at `cap` steps and `exhaustive` is cleared.
    fn for_each_integer_point(
        &self,
        cap: i64,
        exhaustive: &mut bool,
        visit: &mut dyn FnMut(&[Scalar]) -> bool,
    ) {
        let first = Interval::from_1d(&self.projected());
        if first.empty {
            return;
        }
        let range = |iv: &Interval, exhaustive: &mut bool| -> Vec<Scalar> {
            let lo = iv.lo.as_ref().map(|x| x.ceil());
            let hi = iv.hi.as_ref().map(|x| x.floor());
            let (lo, hi) = match (lo, hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                (Some(lo), None) => {
                    *exhaustive = false;
                    let hi = &lo + int(cap);
                    (lo, hi)
                }
                (None, Some(hi)) => {
                    *exhaustive = false;
                    let lo = &hi - int(cap);
                    (lo, hi)
                }
                (None, None) => {
                    *exhaustive = false;
                    (int(-cap), int(cap))
                }
            };
            let mut out = Vec::new();
            let mut t = lo;
            while t <= hi {
                out.push(t.clone());
                t += Scalar::one();
            }
            out
        };
        for t0 in range(&first, exhaustive) {
            if self.dims == 1 {
                if !visit(&[t0]) {
                    return;
                }
                continue;
            }
            let fiber = self.fiber(&t0);
            if fiber.empty {
                continue;
            }
            for t1 in range(&fiber, exhaustive) {
                if !visit(&[t0.clone(), t1]) {
                    return;
                }
            }
        }
    }
}
