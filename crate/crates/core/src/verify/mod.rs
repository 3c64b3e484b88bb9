//! Independent certification oracles for matrix pencils: regularity, index,
//! finite spectrum, asymptotic stability and uncontrollable imaginary modes.

pub mod generator;

use crate::error::{Error, Result};
use crate::linalg::{
    self, ceye, dagger, eig_general, fro_norm, left_nullspace, mm, rank_detail, rank_of,
    right_nullspace, solve_mat, CMat, TolerancePolicy,
};
use crate::model::Pencil;
use num_complex::Complex64;

/// How a regularity verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Rank certificate at a single point or a structural certificate.
    Deterministic,
    /// Rank deficiency at n+1 sampled shifts; exact-arithmetic failure
    /// probability zero, still labeled as sampled.
    Probabilistic,
}

/// Certification record for one pencil.
#[derive(Debug, Clone)]
pub struct PencilReport {
    pub regular: bool,
    pub method: Method,
    /// Nilpotency index; None when the pencil is singular.
    pub index: Option<usize>,
    /// Finite spectrum; empty for singular pencils.
    pub finite_eigs: Vec<Complex64>,
    /// regular, index <= 1 and all finite eigenvalues left of -stab_margin.
    pub stable: bool,
    /// Smallest decisive singular values of the rank tests taken.
    pub margins: Vec<f64>,
    /// Largest real part over finite eigenvalues (None if no finite ones).
    pub max_re: Option<f64>,
}

impl PencilReport {
    pub fn index_at_most_one(&self) -> bool {
        self.regular && self.index.map(|v| v <= 1).unwrap_or(false)
    }
}

/// Decides regularity of a square pencil (E, A).
///
/// Fast deterministic paths: nonsingular E, or the index-<=1 certificate
/// T_inf(E)^H A S_inf(E) nonsingular. Otherwise rank(s E - A) is evaluated at
/// n+1 distinct shifts on a circle; full rank at any shift proves regularity,
/// rank deficiency at all of them means det(s E - A) == 0 identically in
/// exact arithmetic.
pub fn is_regular(p: &Pencil, tol: &TolerancePolicy) -> Result<(bool, Method)> {
    let n = p.dim();
    if n == 0 {
        return Ok((true, Method::Deterministic));
    }
    if rank_of(&p.e, tol) == n {
        return Ok((true, Method::Deterministic));
    }
    if index_le_one_certificate(p, tol) {
        return Ok((true, Method::Deterministic));
    }
    let norm_e = fro_norm(&p.e);
    let norm_a = fro_norm(&p.a);
    let radius = if norm_e > 0.0 { 1.0 + norm_a / norm_e } else { 1.0 };
    for k in 0..=n {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / (n + 1) as f64;
        let shift = Complex64::from_polar(radius, theta);
        let m = &p.e.mapv(|z| z * shift) - &p.a;
        if rank_of(&m, tol) == n {
            return Ok((true, Method::Deterministic));
        }
    }
    Ok((false, Method::Probabilistic))
}

/// Certificate used by the index-reduction theory: if T_inf(E)^H A S_inf(E)
/// is square nonsingular the pencil is regular with index at most one.
pub fn index_le_one_certificate(p: &Pencil, tol: &TolerancePolicy) -> bool {
    let n = p.dim();
    let rank_e = rank_of(&p.e, tol);
    if rank_e == n {
        return true;
    }
    let s_inf = right_nullspace(&p.e, tol).basis;
    let t_inf = left_nullspace(&p.e, tol).basis;
    if s_inf.ncols() != t_inf.ncols() {
        return false;
    }
    let core = mm(&dagger(&t_inf), &mm(&p.a, &s_inf));
    rank_of(&core, tol) == core.nrows() && core.nrows() == n - rank_e
}

/// Nilpotency index of a regular pencil via the Wong sequence
/// W_0 = {0}, W_{k+1} = E^{-1}(A W_k); the index is the first k with
/// W_{k+1} = W_k. Zero iff E is nonsingular.
pub fn index_of(p: &Pencil, tol: &TolerancePolicy) -> Result<usize> {
    let n = p.dim();
    let (regular, _) = is_regular(p, tol)?;
    if !regular {
        return Err(Error::SingularPencil {
            context: "index_of requires a regular pencil".into(),
        });
    }
    if n == 0 || rank_of(&p.e, tol) == n {
        return Ok(0);
    }
    // W_1 = ker E
    let mut basis = right_nullspace(&p.e, tol).basis;
    let mut dim = basis.ncols();
    let mut steps = 1usize;
    loop {
        if steps > n + 1 {
            return Err(Error::NonStabilized(
                "Wong sequence did not stabilize within n+1 steps".into(),
            ));
        }
        let next = preimage_of_range(&p.e, &mm(&p.a, &basis), tol);
        if next.ncols() == dim {
            return Ok(steps);
        }
        if next.ncols() < dim {
            return Err(Error::NonStabilized(
                "Wong sequence dimension decreased; inconsistent tolerances".into(),
            ));
        }
        basis = next;
        dim = basis.ncols();
        steps += 1;
    }
}

/// Orthonormal basis of {x : M x in range(S)}.
fn preimage_of_range(m: &CMat, span: &CMat, tol: &TolerancePolicy) -> CMat {
    let q = linalg::range_basis(span, tol);
    let proj = &mm(m, &ceye(m.ncols())) - &mm(&q, &mm(&dagger(&q), m));
    right_nullspace(&proj, tol).basis
}

/// Finite spectrum of a regular pencil. The infinite part is deflated by the
/// Wong sequence V_{k+1} = A^{-1}(E V_k) starting from the full space; on the
/// stabilized subspace the problem reduces to an ordinary eigenproblem.
pub fn finite_eigenvalues(p: &Pencil, tol: &TolerancePolicy) -> Result<Vec<Complex64>> {
    let n = p.dim();
    let (regular, _) = is_regular(p, tol)?;
    if !regular {
        return Err(Error::SingularPencil {
            context: "finite_eigenvalues requires a regular pencil".into(),
        });
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let mut basis = ceye(n);
    for _ in 0..=n + 1 {
        let next = preimage_of_range(&p.a, &mm(&p.e, &basis), tol);
        if next.ncols() == basis.ncols() {
            break;
        }
        basis = next;
        if basis.ncols() == 0 {
            break;
        }
    }
    let nf = basis.ncols();
    if nf == 0 {
        return Ok(vec![]);
    }
    let ev = mm(&p.e, &basis);
    let w = linalg::range_basis(&ev, tol);
    if w.ncols() != nf {
        return Err(Error::NonStabilized(format!(
            "finite deflation produced a rank-deficient restriction ({} < {})",
            w.ncols(),
            nf
        )));
    }
    let e_f = mm(&dagger(&w), &ev);
    let a_f = mm(&dagger(&w), &mm(&p.a, &basis));
    let reduced = solve_mat(&e_f, &a_f)?;
    Ok(eig_general(&reduced))
}

/// Composite stability oracle: regular, index at most one and every finite
/// eigenvalue with Re(lambda) < -stab_margin.
pub fn is_asymptotically_stable(p: &Pencil, tol: &TolerancePolicy) -> Result<PencilReport> {
    let n = p.dim();
    let (regular, method) = is_regular(p, tol)?;
    let mut margins = Vec::new();
    if n > 0 {
        let d = rank_detail(&p.e, tol);
        margins.push(d.sigma_kept.min(1e300));
    }
    if !regular {
        return Ok(PencilReport {
            regular: false,
            method,
            index: None,
            finite_eigs: vec![],
            stable: false,
            margins,
            max_re: None,
        });
    }
    let index = index_of(p, tol)?;
    let finite_eigs = finite_eigenvalues(p, tol)?;
    let max_re = finite_eigs
        .iter()
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a: f64| a.max(v))));
    let eig_ok = finite_eigs.iter().all(|z| z.re < -tol.stab_margin);
    let stable = index <= 1 && eig_ok;
    Ok(PencilReport {
        regular: true,
        method,
        index: Some(index),
        finite_eigs,
        stable,
        margins,
        max_re,
    })
}

/// Purely imaginary (within stab_margin) values s where rank[A - s E, B]
/// drops below n. Candidates are the near-axis finite eigenvalues of (E, A)
/// plus s = 0; for singular pencils the candidates come from a regularized
/// pencil obtained by a proportional-feedback perturbation, and the report is
/// flagged as heuristic.
#[derive(Debug, Clone)]
pub struct UncontrollableModes {
    pub modes: Vec<Complex64>,
    pub heuristic_candidates: bool,
}

pub fn uncontrollable_imaginary_modes(
    e: &CMat,
    a: &CMat,
    b: &CMat,
    tol: &TolerancePolicy,
) -> Result<UncontrollableModes> {
    let n = e.nrows();
    if e.ncols() != n || a.dim() != (n, n) || b.nrows() != n {
        return Err(Error::dimension(
            "uncontrollable_imaginary_modes",
            format!("square E, A of size {n} and B with {n} rows"),
            format!(
                "E {} x {}, A {} x {}, B {} x {}",
                e.nrows(),
                e.ncols(),
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            ),
        ));
    }
    let pencil = Pencil::new(e.clone(), a.clone())?;
    let (regular, _) = is_regular(&pencil, tol)?;
    let mut heuristic = false;
    let mut candidates: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    if regular {
        candidates.extend(
            finite_eigenvalues(&pencil, tol)?
                .into_iter()
                .filter(|z| z.re.abs() <= tol.stab_margin),
        );
    } else {
        heuristic = true;
        // perturb by an admissible dissipative output feedback and retry
        let bh = dagger(b);
        for gamma in [1.0, 0.5, 2.0, 0.25, 4.0] {
            let scale = fro_norm(a).max(fro_norm(e)).max(1.0) / fro_norm(b).powi(2).max(1e-30);
            let a_pert = a - &mm(b, &bh).mapv(|z| z * Complex64::new(gamma * scale, 0.0));
            let p2 = Pencil::new(e.clone(), a_pert)?;
            if is_regular(&p2, tol)?.0 {
                candidates.extend(
                    finite_eigenvalues(&p2, tol)?
                        .into_iter()
                        .filter(|z| z.re.abs() <= tol.stab_margin),
                );
                break;
            }
        }
    }
    let mut modes = Vec::new();
    for cand in candidates {
        let s = Complex64::new(0.0, cand.im);
        let shifted = a - &e.mapv(|z| z * s);
        let compound = linalg::hstack(&[&shifted, b]);
        if rank_of(&compound, tol) < n {
            if !modes.iter().any(|z: &Complex64| (z - s).norm() <= 1e-8 * (1.0 + s.norm())) {
                modes.push(s);
            }
        }
    }
    Ok(UncontrollableModes {
        modes,
        heuristic_candidates: heuristic,
    })
}

/// Greedy matching of two eigenvalue multisets within a relative tolerance.
pub fn spectra_match(a: &[Complex64], b: &[Complex64], rel: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a
        .iter()
        .chain(b.iter())
        .map(|z| z.norm())
        .fold(1.0_f64, f64::max);
    let mut used = vec![false; b.len()];
    for x in a {
        let mut best: Option<(usize, f64)> = None;
        for (i, y) in b.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = (x - y).norm();
            if best.map(|(_, bd)| d < bd).unwrap_or(true) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, d)) if d <= rel * scale => used[i] = true,
            _ => return false,
        }
    }
    true
}

/// Left-nullspace test for whether some near-axis or right-half-plane mode of
/// (E, A) is untouchable by any feedback through B: returns the offending s
/// values with Re(s) >= -stab_margin and rank[A - s E, B] < n.
pub fn unstable_uncontrollable_modes(
    e: &CMat,
    a: &CMat,
    b: &CMat,
    tol: &TolerancePolicy,
) -> Result<Vec<Complex64>> {
    let n = e.nrows();
    let pencil = Pencil::new(e.clone(), a.clone())?;
    let (regular, _) = is_regular(&pencil, tol)?;
    let mut candidates: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    if regular {
        candidates.extend(
            finite_eigenvalues(&pencil, tol)?
                .into_iter()
                .filter(|z| z.re >= -tol.stab_margin),
        );
    }
    let mut out = Vec::new();
    for s in candidates {
        let shifted = a - &e.mapv(|z| z * s);
        let compound = linalg::hstack(&[&shifted, b]);
        if rank_of(&compound, tol) < n
            && !out
                .iter()
                .any(|z: &Complex64| (z - s).norm() <= 1e-8 * (1.0 + s.norm()))
        {
            out.push(s);
        }
    }
    Ok(out)
}

/// Deflating subspace dimension of the infinite part (algebraic multiplicity
/// of the eigenvalue at infinity) for a regular pencil.
pub fn infinite_multiplicity(p: &Pencil, tol: &TolerancePolicy) -> Result<usize> {
    let finite = finite_eigenvalues(p, tol)?;
    Ok(p.dim() - finite.len())
}

/// Column-space membership residual of a matrix product used by self-checks.
pub fn residual_into_range(target: &CMat, span: &CMat, tol: &TolerancePolicy) -> f64 {
    if target.ncols() == 0 || target.nrows() == 0 {
        return 0.0;
    }
    let q = linalg::range_basis(span, tol);
    let proj = target - &mm(&q, &mm(&dagger(&q), target));
    fro_norm(&proj) / fro_norm(target).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmat_re, czeros, TolerancePolicy};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn pencil(n: usize, e: &[f64], a: &[f64]) -> Pencil {
        Pencil::new(cmat_re(n, n, e), cmat_re(n, n, a)).unwrap()
    }

    #[test]
    fn regularity_basics() {
        let p = pencil(2, &[1.0, 0.0, 0.0, 1.0], &[3.0, 1.0, -2.0, 0.5]);
        let (reg, m) = is_regular(&p, &tol()).unwrap();
        assert!(reg);
        assert_eq!(m, Method::Deterministic);

        let p = pencil(1, &[0.0], &[0.0]);
        let (reg, m) = is_regular(&p, &tol()).unwrap();
        assert!(!reg);
        assert_eq!(m, Method::Probabilistic);

        // det(sE - A) = 0 identically although neither E nor A is zero
        let p = pencil(2, &[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 0.0]);
        let (reg, _) = is_regular(&p, &tol()).unwrap();
        assert!(!reg);

        // 0 x 0 pencil is regular
        let p = Pencil::new(czeros(0, 0), czeros(0, 0)).unwrap();
        assert!(is_regular(&p, &tol()).unwrap().0);
    }

    #[test]
    fn index_values() {
        let p = pencil(2, &[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(index_of(&p, &tol()).unwrap(), 0);

        let p = pencil(1, &[0.0], &[1.0]);
        assert_eq!(index_of(&p, &tol()).unwrap(), 1);

        // single nilpotent block of size two
        let p = pencil(2, &[0.0, 1.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(index_of(&p, &tol()).unwrap(), 2);

        let p = pencil(1, &[0.0], &[0.0]);
        assert!(index_of(&p, &tol()).is_err());
    }

    #[test]
    fn finite_spectrum() {
        let p = pencil(1, &[1.0], &[-1.0]);
        let eigs = finite_eigenvalues(&p, &tol()).unwrap();
        assert_eq!(eigs.len(), 1);
        assert!((eigs[0].re + 1.0).abs() < 1e-12);

        let p = pencil(1, &[0.0], &[1.0]);
        assert!(finite_eigenvalues(&p, &tol()).unwrap().is_empty());

        let p = pencil(2, &[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, -1.0, 0.0]);
        let eigs = finite_eigenvalues(&p, &tol()).unwrap();
        let expected = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert!(spectra_match(&eigs, &expected, 1e-8));

        // index-2 pencil: no finite eigenvalues
        let p = pencil(2, &[0.0, 1.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        assert!(finite_eigenvalues(&p, &tol()).unwrap().is_empty());
    }

    #[test]
    fn stability_reports() {
        let p = pencil(1, &[1.0], &[-1.0]);
        let rep = is_asymptotically_stable(&p, &tol()).unwrap();
        assert!(rep.stable && rep.regular && rep.index == Some(0));

        // vacuous stability: regular index-1 with no finite spectrum
        let p = pencil(1, &[0.0], &[-1.0]);
        let rep = is_asymptotically_stable(&p, &tol()).unwrap();
        assert!(rep.stable);
        assert!(rep.finite_eigs.is_empty());

        // rotation: eigenvalues on the axis
        let p = pencil(2, &[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, -1.0, 0.0]);
        let rep = is_asymptotically_stable(&p, &tol()).unwrap();
        assert!(!rep.stable && rep.regular);
    }

    #[test]
    fn uncontrollable_modes_cases() {
        let e = cmat_re(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let a = cmat_re(2, 2, &[-1.0, 0.0, 0.0, 0.0]);
        let b = cmat_re(2, 1, &[1.0, 0.0]);
        let um = uncontrollable_imaginary_modes(&e, &a, &b, &tol()).unwrap();
        assert_eq!(um.modes.len(), 1);
        assert!(um.modes[0].norm() < 1e-12);
        assert!(!um.heuristic_candidates);

        let e = ceye(1);
        let a = cmat_re(1, 1, &[-1.0]);
        let b = czeros(1, 1);
        let um = uncontrollable_imaginary_modes(&e, &a, &b, &tol()).unwrap();
        assert!(um.modes.is_empty());

        // controllable pair: no drops anywhere
        let e = ceye(2);
        let a = cmat_re(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let b = cmat_re(2, 1, &[1.0, 1.0]);
        let um = uncontrollable_imaginary_modes(&e, &a, &b, &tol()).unwrap();
        assert!(um.modes.is_empty());
    }

    #[test]
    fn index_le_one_certificate_matches_index() {
        let p = pencil(1, &[0.0], &[1.0]);
        assert!(index_le_one_certificate(&p, &tol()));
        let p = pencil(2, &[0.0, 1.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        assert!(!index_le_one_certificate(&p, &tol()));
    }
}
