//! Dense complex linear-algebra kernels with explicit rank tolerances.
//!
//! Every routine is total on empty (zero-row or zero-column) matrices; the
//! conventions for those cases are part of the contract of each function.

use crate::error::{Error, Result};
use ndarray::{concatenate, s, Array1, Array2, Axis};
use ndarray_linalg::{Eig, Eigh, Factorize, Solve, SVD, UPLO};
use num_complex::Complex64;

/// Complex double-precision matrix, row-major.
pub type CMat = Array2<Complex64>;
/// Complex double-precision vector.
pub type CVec = Array1<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cutoffs used by every rank, definiteness and equality decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_rel: f64,
    /// Admissible negative-eigenvalue magnitude, relative to the matrix norm.
    pub psd_tol: f64,
    /// Required distance of Re(lambda) from the imaginary axis.
    pub stab_margin: f64,
    /// Relative residual for matrix-equality checks.
    pub equality_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            rank_rel: 1e-10,
            psd_tol: 1e-10,
            stab_margin: 1e-8,
            equality_tol: 1e-10,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_rel", self.rank_rel),
            ("psd_tol", self.psd_tol),
            ("stab_margin", self.stab_margin),
            ("equality_tol", self.equality_tol),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.rank_rel < f64::EPSILON {
            return Err(Error::InvalidInput(format!(
                "rank_rel must be at least machine epsilon, got {}",
                self.rank_rel
            )));
        }
        Ok(())
    }

    /// Singular-value cutoff for a matrix with the given extents and largest
    /// singular value.
    pub fn sv_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_rel * sigma_max * rows.max(cols) as f64
    }
}

// ---------------------------------------------------------------------------
// construction and elementwise helpers
// ---------------------------------------------------------------------------

pub fn czeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros((rows, cols))
}

pub fn ceye(n: usize) -> CMat {
    CMat::eye(n)
}

pub fn cscalar(z: Complex64) -> CMat {
    CMat::from_elem((1, 1), z)
}

/// Build a matrix from a row-major slice of complex entries.
pub fn cmat(rows: usize, cols: usize, entries: &[Complex64]) -> CMat {
    CMat::from_shape_vec((rows, cols), entries.to_vec()).expect("shape mismatch in cmat")
}

/// Build a complex matrix from row-major real entries.
pub fn cmat_re(rows: usize, cols: usize, entries: &[f64]) -> CMat {
    CMat::from_shape_vec(
        (rows, cols),
        entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    )
    .expect("shape mismatch in cmat_re")
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    let mut out = CMat::zeros((m.ncols(), m.nrows()));
    for ((i, j), v) in m.indexed_iter() {
        out[(j, i)] = v.conj();
    }
    out
}

/// Hermitian part (M + M^H)/2.
pub fn herm_part(m: &CMat) -> CMat {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

/// Skew-Hermitian part (M - M^H)/2.
pub fn skew_part(m: &CMat) -> CMat {
    (m - &dagger(m)).mapv(|z| z * 0.5)
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value; 0 for empty matrices.
pub fn two_norm(m: &CMat) -> f64 {
    svd(m).s.first().copied().unwrap_or(0.0)
}

pub fn ensure_finite(context: &str, m: &CMat) -> Result<()> {
    for ((i, j), v) in m.indexed_iter() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                context: context.to_string(),
                row: i,
                col: j,
            });
        }
    }
    Ok(())
}

/// Rebuild with guaranteed standard (row-major, positive-stride) layout.
/// Slicing in ndarray can produce zero strides on length-1 axes, which the
/// LAPACK wrappers reject.
pub fn standardize(m: &CMat) -> CMat {
    CMat::from_shape_vec((m.nrows(), m.ncols()), m.iter().cloned().collect())
        .expect("standardize shape")
}

pub fn hstack(parts: &[&CMat]) -> CMat {
    assert!(!parts.is_empty());
    let rows = parts[0].nrows();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMat::zeros((rows, cols));
    let mut off = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hstack row mismatch");
        if p.ncols() > 0 {
            out.slice_mut(s![.., off..off + p.ncols()]).assign(p);
        }
        off += p.ncols();
    }
    out
}

pub fn vstack(parts: &[&CMat]) -> CMat {
    assert!(!parts.is_empty());
    let cols = parts[0].ncols();
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = CMat::zeros((rows, cols));
    let mut off = 0;
    for p in parts {
        assert_eq!(p.ncols(), cols, "vstack column mismatch");
        if p.nrows() > 0 {
            out.slice_mut(s![off..off + p.nrows(), ..]).assign(p);
        }
        off += p.nrows();
    }
    out
}

/// Matrix product that tolerates empty operands.
pub fn mm(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "mm dimension mismatch");
    if a.nrows() == 0 || b.ncols() == 0 || a.ncols() == 0 {
        return CMat::zeros((a.nrows(), b.ncols()));
    }
    a.dot(b)
}

/// Relative Frobenius distance ||a - b|| / max(||a||, ||b||, 1e-300).
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    let scale = fro_norm(a).max(fro_norm(b)).max(1e-300);
    fro_norm(&(a - b)) / scale
}

// ---------------------------------------------------------------------------
// SVD and rank machinery
// ---------------------------------------------------------------------------

/// Full singular value decomposition M = U diag(s) V^H with square U and V.
pub struct SvdParts {
    pub u: CMat,
    pub s: Vec<f64>,
    pub vh: CMat,
}

pub fn svd(m: &CMat) -> SvdParts {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return SvdParts {
            u: ceye(rows),
            s: vec![],
            vh: ceye(cols),
        };
    }
    let std = standardize(m);
    let (u, s, vh) = std.svd(true, true).expect("LAPACK SVD failed");
    SvdParts {
        u: u.expect("SVD U missing"),
        s: s.to_vec(),
        vh: vh.expect("SVD V^H missing"),
    }
}

fn rank_from_sv_scaled(
    s: &[f64],
    rows: usize,
    cols: usize,
    tol: &TolerancePolicy,
    scale: f64,
) -> usize {
    let sigma_max = s.first().copied().unwrap_or(0.0).max(scale);
    if sigma_max == 0.0 {
        return 0;
    }
    let cutoff = tol.sv_cutoff(rows, cols, sigma_max);
    s.iter().filter(|&&x| x > cutoff).count()
}

fn rank_from_sv(s: &[f64], rows: usize, cols: usize, tol: &TolerancePolicy) -> usize {
    rank_from_sv_scaled(s, rows, cols, tol, 0.0)
}

/// Number of singular values above the relative cutoff. Empty matrices have
/// rank zero.
pub fn rank_of(m: &CMat, tol: &TolerancePolicy) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let parts = svd(m);
    rank_from_sv(&parts.s, m.nrows(), m.ncols(), tol)
}

/// Rank decision where the cutoff is taken relative to max(local sigma_max,
/// `scale`); used when a submatrix of a larger computation may consist
/// entirely of roundoff noise.
pub fn rank_of_scaled(m: &CMat, tol: &TolerancePolicy, scale: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let parts = svd(m);
    rank_from_sv_scaled(&parts.s, m.nrows(), m.ncols(), tol, scale)
}

/// Rank together with the decisive singular values around the cutoff.
#[derive(Debug, Clone, Copy)]
pub struct RankDetail {
    pub rank: usize,
    /// Smallest singular value counted toward the rank (infinite if rank 0).
    pub sigma_kept: f64,
    /// Largest singular value below the cutoff (0 if none dropped).
    pub sigma_dropped: f64,
    pub cutoff: f64,
}

pub fn rank_detail(m: &CMat, tol: &TolerancePolicy) -> RankDetail {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RankDetail {
            rank: 0,
            sigma_kept: f64::MAX,
            sigma_dropped: 0.0,
            cutoff: 0.0,
        };
    }
    let parts = svd(m);
    let rank = rank_from_sv(&parts.s, m.nrows(), m.ncols(), tol);
    let sigma_max = parts.s.first().copied().unwrap_or(0.0);
    RankDetail {
        rank,
        sigma_kept: if rank > 0 { parts.s[rank - 1] } else { f64::MAX },
        sigma_dropped: parts.s.get(rank).copied().unwrap_or(0.0),
        cutoff: tol.sv_cutoff(m.nrows(), m.ncols(), sigma_max),
    }
}

/// Which nullspace a basis spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// Orthonormal basis of a right or left nullspace.
#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    pub basis: CMat,
    pub side: Side,
}

/// Orthonormal basis of {x : Mx = 0}. For an n x 0 matrix the nullspace is
/// zero-dimensional; for a 0 x k matrix it is all of C^k.
pub fn right_nullspace(m: &CMat, tol: &TolerancePolicy) -> NullspaceBasis {
    let cols = m.ncols();
    if cols == 0 {
        return NullspaceBasis {
            basis: czeros(0, 0),
            side: Side::Right,
        };
    }
    if m.nrows() == 0 {
        return NullspaceBasis {
            basis: ceye(cols),
            side: Side::Right,
        };
    }
    let parts = svd(m);
    let rank = rank_from_sv(&parts.s, m.nrows(), cols, tol);
    let v = dagger(&parts.vh);
    NullspaceBasis {
        basis: v.slice(s![.., rank..]).to_owned(),
        side: Side::Right,
    }
}

/// Orthonormal basis of {y : y^H M = 0}. The left nullspace of an n x 0
/// matrix is all of C^n.
pub fn left_nullspace(m: &CMat, tol: &TolerancePolicy) -> NullspaceBasis {
    let rows = m.nrows();
    if rows == 0 {
        return NullspaceBasis {
            basis: czeros(0, 0),
            side: Side::Left,
        };
    }
    if m.ncols() == 0 {
        return NullspaceBasis {
            basis: ceye(rows),
            side: Side::Left,
        };
    }
    let parts = svd(m);
    let rank = rank_from_sv(&parts.s, rows, m.ncols(), tol);
    NullspaceBasis {
        basis: parts.u.slice(s![.., rank..]).to_owned(),
        side: Side::Left,
    }
}

/// Result of a one-sided unitary compression.
#[derive(Debug, Clone)]
pub struct Compression {
    /// The unitary factor (state-space side).
    pub q: CMat,
    pub rank: usize,
}

/// Unitary U with U^H M = [M1; 0], M1 of full row rank. For M = 0 (or empty)
/// U is the identity and the rank is 0.
pub fn row_compress(m: &CMat, tol: &TolerancePolicy) -> Compression {
    row_compress_scaled(m, tol, 0.0)
}

/// Row compression with a parent-relative rank cutoff.
pub fn row_compress_scaled(m: &CMat, tol: &TolerancePolicy, scale: f64) -> Compression {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return Compression { q: ceye(rows), rank: 0 };
    }
    let parts = svd(m);
    let rank = rank_from_sv_scaled(&parts.s, rows, m.ncols(), tol, scale);
    if rank == 0 {
        return Compression { q: ceye(rows), rank: 0 };
    }
    Compression { q: parts.u, rank }
}

/// Unitary U with U^H M = [0; M1], M1 of full row rank (zero rows on top).
pub fn row_compress_zeros_first(m: &CMat, tol: &TolerancePolicy) -> Compression {
    row_compress_zeros_first_scaled(m, tol, 0.0)
}

/// Zeros-first row compression with a parent-relative rank cutoff.
pub fn row_compress_zeros_first_scaled(
    m: &CMat,
    tol: &TolerancePolicy,
    scale: f64,
) -> Compression {
    let c = row_compress_scaled(m, tol, scale);
    let n = c.q.nrows();
    let r = c.rank;
    if r == 0 || r == n {
        return c;
    }
    let swapped = hstack(&[&c.q.slice(s![.., r..]).to_owned(), &c.q.slice(s![.., ..r]).to_owned()]);
    Compression { q: swapped, rank: r }
}

/// Unitary V with M V = [M2 0], M2 of full column rank. For M = 0 (or empty)
/// V is the identity and the rank is 0.
pub fn col_compress(m: &CMat, tol: &TolerancePolicy) -> Compression {
    col_compress_scaled(m, tol, 0.0)
}

/// Column compression with a parent-relative rank cutoff.
pub fn col_compress_scaled(m: &CMat, tol: &TolerancePolicy, scale: f64) -> Compression {
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return Compression { q: ceye(cols), rank: 0 };
    }
    let parts = svd(m);
    let rank = rank_from_sv_scaled(&parts.s, m.nrows(), cols, tol, scale);
    if rank == 0 {
        return Compression { q: ceye(cols), rank: 0 };
    }
    Compression { q: dagger(&parts.vh), rank }
}

/// Unitary V with M V = [0 M2], M2 of full column rank (zero columns first).
pub fn col_compress_zeros_first(m: &CMat, tol: &TolerancePolicy) -> Compression {
    col_compress_zeros_first_scaled(m, tol, 0.0)
}

/// Zeros-first column compression with a parent-relative rank cutoff.
pub fn col_compress_zeros_first_scaled(
    m: &CMat,
    tol: &TolerancePolicy,
    scale: f64,
) -> Compression {
    let c = col_compress_scaled(m, tol, scale);
    let n = c.q.ncols();
    let r = c.rank;
    if r == 0 || r == n {
        return c;
    }
    let swapped = hstack(&[&c.q.slice(s![.., r..]).to_owned(), &c.q.slice(s![.., ..r]).to_owned()]);
    Compression { q: swapped, rank: r }
}

/// Orthonormal basis of the column space of M.
pub fn range_basis(m: &CMat, tol: &TolerancePolicy) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return czeros(m.nrows(), 0);
    }
    let parts = svd(m);
    let rank = rank_from_sv(&parts.s, m.nrows(), m.ncols(), tol);
    parts.u.slice(s![.., ..rank]).to_owned()
}

// ---------------------------------------------------------------------------
// definiteness checks
// ---------------------------------------------------------------------------

/// Outcome of the Hermitian/semidefiniteness probe of a square matrix.
#[derive(Debug, Clone, Copy)]
pub struct PsdReport {
    pub is_hermitian: bool,
    pub is_psd: bool,
    pub is_pd: bool,
    /// Smallest eigenvalue of the Hermitian part; None for 0 x 0 input.
    pub min_eig: Option<f64>,
    /// ||M - M^H||_F
    pub herm_residual: f64,
}

/// Hermitian and (semi)definiteness checks on the Hermitian part of M.
/// The 0 x 0 matrix counts as positive definite.
pub fn psd_check(m: &CMat, tol: &TolerancePolicy) -> Result<PsdReport> {
    if m.nrows() != m.ncols() {
        return Err(Error::dimension(
            "psd_check",
            "square matrix",
            format!("{} x {}", m.nrows(), m.ncols()),
        ));
    }
    if m.nrows() == 0 {
        return Ok(PsdReport {
            is_hermitian: true,
            is_psd: true,
            is_pd: true,
            min_eig: None,
            herm_residual: 0.0,
        });
    }
    let norm = fro_norm(m);
    let herm_residual = fro_norm(&(m - &dagger(m)));
    let is_hermitian = herm_residual <= tol.equality_tol * norm;
    let h = herm_part(m);
    let (vals, _) = eigh(&h);
    let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let is_psd = min_eig >= -tol.psd_tol * norm;
    let is_pd = min_eig > tol.psd_tol * norm;
    Ok(PsdReport {
        is_hermitian,
        is_psd,
        is_pd,
        min_eig: Some(min_eig),
        herm_residual,
    })
}

/// Eigendecomposition of (the Hermitian part of) a Hermitian matrix.
/// Returns eigenvalues in ascending order and the unitary of eigenvectors.
///
/// ndarray-linalg 0.16 returns the eigenvectors of the conjugated matrix for
/// complex row-major input; the wrapper picks whichever of vecs/conj(vecs)
/// actually diagonalizes the input.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    if m.nrows() == 0 {
        return (vec![], czeros(0, 0));
    }
    let h = standardize(&herm_part(m));
    let (vals, vecs) = h.eigh(UPLO::Lower).expect("LAPACK Hermitian eigen failed");
    let vals = vals.to_vec();
    let conj_vecs = vecs.mapv(|z| z.conj());
    let resid = |v: &CMat| -> f64 {
        let d = mm(&dagger(v), &mm(&h, v));
        let mut r = 0.0;
        for i in 0..vals.len() {
            for j in 0..vals.len() {
                let want = if i == j {
                    Complex64::new(vals[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                r += (d[(i, j)] - want).norm_sqr();
            }
        }
        r.sqrt()
    };
    if resid(&conj_vecs) < resid(&vecs) {
        (vals, conj_vecs)
    } else {
        (vals, vecs)
    }
}

/// Eigenvalues of a general square complex matrix.
pub fn eig_general(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let (vals, _) = standardize(m).eig().expect("LAPACK general eigen failed");
    vals.to_vec()
}

// ---------------------------------------------------------------------------
// pseudo-inverse and linear solves
// ---------------------------------------------------------------------------

/// Moore-Penrose pseudo-inverse via SVD with the rank cutoff of `tol`.
pub fn pinv(m: &CMat, tol: &TolerancePolicy) -> CMat {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return czeros(cols, rows);
    }
    let parts = svd(m);
    let rank = rank_from_sv(&parts.s, rows, cols, tol);
    let v = dagger(&parts.vh);
    let mut out = czeros(cols, rows);
    for k in 0..rank {
        let col_v = v.slice(s![.., k]);
        let col_u = parts.u.slice(s![.., k]);
        let inv_s = Complex64::new(1.0 / parts.s[k], 0.0);
        for i in 0..cols {
            for j in 0..rows {
                out[(i, j)] += col_v[i] * inv_s * col_u[j].conj();
            }
        }
    }
    out
}

/// Solve A X = B by LU factorization. A must be square and nonsingular.
pub fn solve_mat(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(Error::dimension(
            "solve_mat",
            "square matrix",
            format!("{} x {}", a.nrows(), a.ncols()),
        ));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::dimension("solve_mat", a.nrows(), b.nrows()));
    }
    if a.nrows() == 0 || b.ncols() == 0 {
        return Ok(czeros(a.ncols(), b.ncols()));
    }
    let a_std = standardize(a);
    let f = a_std.factorize()?;
    let mut out = czeros(a.ncols(), b.ncols());
    for j in 0..b.ncols() {
        let col = b.column(j).to_owned();
        let x = f.solve(&col)?;
        out.column_mut(j).assign(&x);
    }
    Ok(out)
}

/// Inverse of a square nonsingular matrix (LU-based solve against I).
pub fn inv(a: &CMat) -> Result<CMat> {
    solve_mat(a, &ceye(a.nrows()))
}

/// Frobenius deviation of U from unitarity, ||U^H U - I||_F.
pub fn unitary_error(u: &CMat) -> f64 {
    let n = u.ncols();
    fro_norm(&(mm(&dagger(u), u) - ceye(n)))
}

/// Concatenate [A B] along columns (helper for rank conditions).
pub fn concat_cols(parts: &[&CMat]) -> CMat {
    hstack(parts)
}

/// Concatenate [A; B] along rows.
pub fn concat_rows(parts: &[&CMat]) -> CMat {
    vstack(parts)
}

// Re-exported so callers do not need a direct ndarray dependency for simple
// elementwise work.
pub fn map_scale(m: &CMat, c: Complex64) -> CMat {
    m.mapv(|z| z * c)
}

/// Real diagonal as a complex matrix.
pub fn cdiag(values: &[f64]) -> CMat {
    let n = values.len();
    let mut out = czeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        out[(i, i)] = Complex64::new(v, 0.0);
    }
    out
}

pub fn concat_axis0(a: &CMat, b: &CMat) -> CMat {
    concatenate(Axis(0), &[a.view(), b.view()]).expect("concat_axis0")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(rank_of(&ceye(3), &tol()), 3);
        assert_eq!(rank_of(&czeros(2, 5), &tol()), 0);
        assert_eq!(rank_of(&czeros(0, 4), &tol()), 0);
        assert_eq!(rank_of(&czeros(4, 0), &tol()), 0);
    }

    #[test]
    fn rank_below_cutoff() {
        let m = cmat_re(2, 2, &[1.0, 0.0, 0.0, 1e-30]);
        let t = TolerancePolicy {
            rank_rel: 1e-12,
            ..tol()
        };
        assert_eq!(rank_of(&m, &t), 1);
    }

    #[test]
    fn nullspace_conventions() {
        let nb = right_nullspace(&czeros(1, 1), &tol());
        assert_eq!(nb.basis.dim(), (1, 1));
        assert!((nb.basis[(0, 0)].norm() - 1.0).abs() < 1e-14);

        let nb = right_nullspace(&ceye(2), &tol());
        assert_eq!(nb.basis.dim(), (2, 0));

        // right nullspace of an n x 0 matrix is zero-dimensional
        let nb = right_nullspace(&czeros(3, 0), &tol());
        assert_eq!(nb.basis.dim(), (0, 0));

        // left nullspace of an n x 0 matrix is all of C^n
        let nb = left_nullspace(&czeros(3, 0), &tol());
        assert_eq!(nb.basis.dim(), (3, 3));
        assert!(unitary_error(&nb.basis) < 1e-12);
    }

    #[test]
    fn left_nullspace_of_ones_column() {
        let m = cmat_re(2, 1, &[1.0, 1.0]);
        let nb = left_nullspace(&m, &tol());
        assert_eq!(nb.basis.dim(), (2, 1));
        let v = nb.basis.column(0);
        // v^H M = 0 and unit norm
        let r = v[0].conj() * m[(0, 0)] + v[1].conj() * m[(1, 0)];
        assert!(r.norm() < 1e-12);
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_compress_examples() {
        let m = cmat_re(2, 1, &[0.0, 2.0]);
        let c = row_compress(&m, &tol());
        assert_eq!(c.rank, 1);
        let um = mm(&dagger(&c.q), &m);
        assert!((um[(0, 0)].norm() - 2.0).abs() < 1e-12);
        assert!(um[(1, 0)].norm() < 1e-12);
        assert!(unitary_error(&c.q) < 1e-12);

        let z = czeros(3, 2);
        let c = row_compress(&z, &tol());
        assert_eq!(c.rank, 0);
        assert!(fro_norm(&(&c.q - &ceye(3))) < 1e-15);

        let full = cmat_re(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let c = row_compress(&full, &tol());
        assert_eq!(c.rank, 2);
    }

    #[test]
    fn col_compress_orientations() {
        let m = cmat_re(1, 2, &[0.0, 2.0]);
        let c = col_compress(&m, &tol());
        assert_eq!(c.rank, 1);
        let mv = mm(&m, &c.q);
        assert!((mv[(0, 0)].norm() - 2.0).abs() < 1e-12);
        assert!(mv[(0, 1)].norm() < 1e-12);

        let c = col_compress_zeros_first(&m, &tol());
        let mv = mm(&m, &c.q);
        assert!(mv[(0, 0)].norm() < 1e-12);
        assert!((mv[(0, 1)].norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_after_compress() {
        let m = cmat(
            3,
            2,
            &[
                Complex64::new(1.0, 0.5),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.25),
            ],
        );
        let c = row_compress(&m, &tol());
        let recomposed = mm(&c.q, &mm(&dagger(&c.q), &m));
        assert!(rel_diff(&recomposed, &m) < 1e-12);
    }

    #[test]
    fn psd_checks() {
        let m = cdiag(&[1.0, 0.0]);
        let r = psd_check(&m, &tol()).unwrap();
        assert!(r.is_hermitian && r.is_psd && !r.is_pd);

        let skew = cmat_re(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let r = psd_check(&skew, &tol()).unwrap();
        assert!(!r.is_hermitian);

        let m = cdiag(&[1.0, -1e-20]);
        let t = TolerancePolicy {
            psd_tol: 1e-12,
            ..tol()
        };
        let r = psd_check(&m, &t).unwrap();
        assert!(r.is_psd);

        let r = psd_check(&czeros(0, 0), &tol()).unwrap();
        assert!(r.is_pd && r.is_psd && r.is_hermitian);
        assert!(r.min_eig.is_none());

        assert!(psd_check(&czeros(1, 2), &tol()).is_err());
    }

    #[test]
    fn pinv_examples() {
        let m = cdiag(&[2.0, 0.0]);
        let p = pinv(&m, &tol());
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!(p[(1, 1)].norm() < 1e-14);

        let z = czeros(3, 2);
        let p = pinv(&z, &tol());
        assert_eq!(p.dim(), (2, 3));
        assert_eq!(fro_norm(&p), 0.0);
    }

    #[test]
    fn pinv_full_column_rank_left_inverse() {
        // fixed pseudorandom 4 x 3 full-column-rank matrix
        let m = cmat_re(
            4,
            3,
            &[
                0.9, -0.3, 0.2, 0.1, 1.2, -0.7, -0.5, 0.4, 1.1, 0.3, 0.8, 0.6,
            ],
        );
        let p = pinv(&m, &tol());
        let prod = mm(&p, &m);
        assert!(rel_diff(&prod, &ceye(3)) < 1e-12);
        // all four Penrose identities
        let mp = mm(&m, &p);
        assert!(rel_diff(&mm(&m, &mm(&p, &m)), &m) < 1e-12);
        assert!(rel_diff(&mm(&p, &mm(&m, &p)), &p) < 1e-12);
        assert!(fro_norm(&(&mp - &dagger(&mp))) < 1e-12);
        let pm = mm(&p, &m);
        assert!(fro_norm(&(&pm - &dagger(&pm))) < 1e-12);
    }

    #[test]
    fn solve_and_inv() {
        let a = cmat_re(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let b = ceye(2);
        let x = solve_mat(&a, &b).unwrap();
        assert!(rel_diff(&mm(&a, &x), &b) < 1e-13);
        let ai = inv(&a).unwrap();
        assert!(rel_diff(&ai, &x) < 1e-13);
    }

    #[test]
    fn eigh_diagonalizes_complex_hermitian() {
        let m = cmat(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.3, 0.7),
                Complex64::new(0.3, -0.7),
                Complex64::new(1.0, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&m);
        let d = mm(&dagger(&vecs), &mm(&m, &vecs));
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j {
                    Complex64::new(vals[i], 0.0)
                } else {
                    ZERO
                };
                assert!((d[(i, j)] - want).norm() < 1e-12, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn complex_row_compress_zero_pattern() {
        let m = cmat(
            3,
            2,
            &[
                Complex64::new(0.4, -1.1),
                Complex64::new(0.0, 0.3),
                Complex64::new(0.8, 0.8),
                Complex64::new(-0.2, 0.1),
                Complex64::new(0.4, -1.1),
                Complex64::new(0.0, 0.3),
            ],
        );
        let c = row_compress(&m, &TolerancePolicy::default());
        let um = mm(&dagger(&c.q), &m);
        for i in c.rank..3 {
            for j in 0..2 {
                assert!(um[(i, j)].norm() < 1e-12, "row {i} not compressed");
            }
        }
    }

    #[test]
    fn nullspace_dimension_plus_rank() {
        for (r, c) in [(0usize, 0usize), (0, 3), (3, 0), (2, 4), (4, 2), (3, 3)] {
            let mut m = czeros(r, c);
            for i in 0..r.min(c) {
                if i % 2 == 0 {
                    m[(i, i)] = ONE;
                }
            }
            let rank = rank_of(&m, &tol());
            let nb = right_nullspace(&m, &tol());
            assert_eq!(nb.basis.ncols() + rank, c, "dims {r} x {c}");
        }
    }
}
