//! Port-Hamiltonian descriptor system types and structural validation.

use crate::error::{Error, Result};
use crate::linalg::{
    self, ceye, cmat_re, czeros, dagger, fro_norm, herm_part, mm, psd_check, rank_of, CMat,
    TolerancePolicy,
};

/// Raw port-Hamiltonian descriptor model
///
///   E x' = (J - R) Q x + (B - P) u
///   y    = (B + P)^H Q x + (S - N) u
///
/// with E, Q of size l x n; J, R of size l x l; B, P of size l x m and
/// Hermitian S, skew-Hermitian N of size m x m.
#[derive(Debug, Clone)]
pub struct GeneralPhdae {
    pub e: CMat,
    pub q: CMat,
    pub j: CMat,
    pub r: CMat,
    pub b: CMat,
    pub p: CMat,
    pub s: CMat,
    pub n: CMat,
}

impl GeneralPhdae {
    pub fn new(
        e: CMat,
        q: CMat,
        j: CMat,
        r: CMat,
        b: CMat,
        p: CMat,
        s: CMat,
        n: CMat,
    ) -> Result<Self> {
        let (l, nn) = e.dim();
        let m = b.ncols();
        let checks: [(&str, (usize, usize), (usize, usize)); 7] = [
            ("Q", q.dim(), (l, nn)),
            ("J", j.dim(), (l, l)),
            ("R", r.dim(), (l, l)),
            ("B", b.dim(), (l, m)),
            ("P", p.dim(), (l, m)),
            ("S", s.dim(), (m, m)),
            ("N", n.dim(), (m, m)),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::dimension(
                    &format!("GeneralPhdae field {name}"),
                    format!("{} x {}", want.0, want.1),
                    format!("{} x {}", got.0, got.1),
                ));
            }
        }
        for (name, mat) in [
            ("E", &e),
            ("Q", &q),
            ("J", &j),
            ("R", &r),
            ("B", &b),
            ("P", &p),
            ("S", &s),
            ("N", &n),
        ] {
            linalg::ensure_finite(&format!("GeneralPhdae field {name}"), mat)?;
        }
        Ok(GeneralPhdae { e, q, j, r, b, p, s, n })
    }

    pub fn state_rows(&self) -> usize {
        self.e.nrows()
    }

    pub fn state_cols(&self) -> usize {
        self.e.ncols()
    }

    pub fn num_inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Dissipation matrix W = [Q^H R Q, Q^H P; P^H Q, S].
    pub fn dissipation_matrix(&self) -> CMat {
        let qrq = mm(&dagger(&self.q), &mm(&self.r, &self.q));
        let qp = mm(&dagger(&self.q), &self.p);
        let top = linalg::hstack(&[&qrq, &qp]);
        let bottom = linalg::hstack(&[&dagger(&qp), &self.s]);
        linalg::vstack(&[&top, &bottom])
    }
}

/// Reduced model E x' = (J - R) x + B u, y = B^H x with Hermitian PSD E and
/// R, skew-Hermitian J, and B of full column rank.
#[derive(Debug, Clone)]
pub struct SimplifiedPhdae {
    pub e: CMat,
    pub j: CMat,
    pub r: CMat,
    pub b: CMat,
}

impl SimplifiedPhdae {
    /// Constructs the system after dimension and finiteness checks and a full
    /// column rank check on B. Structural (definiteness/symmetry) conditions
    /// are reported by [`validate_simplified`], not enforced here.
    pub fn new(e: CMat, j: CMat, r: CMat, b: CMat, tol: &TolerancePolicy) -> Result<Self> {
        let sys = Self::new_unchecked(e, j, r, b)?;
        let m = sys.b.ncols();
        let rank_b = rank_of(&sys.b, tol);
        if rank_b < m {
            return Err(Error::NotFullRank {
                context: "SimplifiedPhdae input map B".into(),
                rank: rank_b,
                required: m,
            });
        }
        Ok(sys)
    }

    /// Dimension and finiteness checks only.
    pub fn new_unchecked(e: CMat, j: CMat, r: CMat, b: CMat) -> Result<Self> {
        let n = e.nrows();
        if e.ncols() != n {
            return Err(Error::dimension(
                "SimplifiedPhdae field E",
                "square matrix",
                format!("{} x {}", e.nrows(), e.ncols()),
            ));
        }
        for (name, mat) in [("J", &j), ("R", &r)] {
            if mat.dim() != (n, n) {
                return Err(Error::dimension(
                    &format!("SimplifiedPhdae field {name}"),
                    format!("{n} x {n}"),
                    format!("{} x {}", mat.nrows(), mat.ncols()),
                ));
            }
        }
        if b.nrows() != n {
            return Err(Error::dimension(
                "SimplifiedPhdae field B",
                format!("{n} rows"),
                format!("{} rows", b.nrows()),
            ));
        }
        for (name, mat) in [("E", &e), ("J", &j), ("R", &r), ("B", &b)] {
            linalg::ensure_finite(&format!("SimplifiedPhdae field {name}"), mat)?;
        }
        Ok(SimplifiedPhdae { e, j, r, b })
    }

    /// Construct with a rank-deficient B compressed to an equivalent
    /// full-column-rank input map. The returned [`InputMap`] carries the
    /// unitary column transformation needed to express feedback matrices in
    /// the original input coordinates.
    pub fn new_compressing(
        e: CMat,
        j: CMat,
        r: CMat,
        b: CMat,
        tol: &TolerancePolicy,
    ) -> Result<(Self, InputMap)> {
        let sys = Self::new_unchecked(e, j, r, b)?;
        let m = sys.b.ncols();
        let comp = linalg::col_compress(&sys.b, tol);
        let rank_b = comp.rank;
        if rank_b == m {
            let map = InputMap {
                v: ceye(m),
                original_m: m,
                reduced_m: m,
            };
            return Ok((sys, map));
        }
        let bv = mm(&sys.b, &comp.q);
        let b_reduced = bv.slice(ndarray::s![.., ..rank_b]).to_owned();
        let reduced = SimplifiedPhdae {
            e: sys.e,
            j: sys.j,
            r: sys.r,
            b: b_reduced,
        };
        Ok((
            reduced,
            InputMap {
                v: comp.q,
                original_m: m,
                reduced_m: rank_b,
            },
        ))
    }

    pub fn state_dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn num_inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Open-loop pencil (E, J - R).
    pub fn pencil(&self) -> Pencil {
        Pencil {
            e: self.e.clone(),
            a: &self.j - &self.r,
        }
    }

    /// Stored energy 1/2 x^H E x of a state.
    pub fn hamiltonian(&self, x: &linalg::CVec) -> f64 {
        let ex = self.e.dot(x);
        let v: num_complex::Complex64 = x
            .iter()
            .zip(ex.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        0.5 * v.re
    }
}

/// Records the unitary input-coordinate change used when a rank-deficient B
/// was compressed; feedback matrices computed for the reduced system map back
/// with [`InputMap::expand_feedback`].
#[derive(Debug, Clone)]
pub struct InputMap {
    /// Unitary m x m column transformation, B_original * v = [B_reduced 0].
    pub v: CMat,
    pub original_m: usize,
    pub reduced_m: usize,
}

impl InputMap {
    pub fn is_identity(&self) -> bool {
        self.original_m == self.reduced_m
    }

    /// Lift a reduced-coordinates feedback block to original input
    /// coordinates: F = V diag(F_red, 0) V^H.
    pub fn expand_feedback(&self, f_reduced: &CMat) -> CMat {
        assert_eq!(f_reduced.nrows(), self.reduced_m);
        assert_eq!(f_reduced.ncols(), self.reduced_m);
        let k = self.original_m - self.reduced_m;
        let padded = linalg::vstack(&[
            &linalg::hstack(&[f_reduced, &czeros(self.reduced_m, k)]),
            &linalg::hstack(&[&czeros(k, self.reduced_m), &czeros(k, k)]),
        ]);
        mm(&self.v, &mm(&padded, &dagger(&self.v)))
    }
}

/// Matrix pencil lambda E - A.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub e: CMat,
    pub a: CMat,
}

impl Pencil {
    pub fn new(e: CMat, a: CMat) -> Result<Self> {
        let n = e.nrows();
        if e.ncols() != n || a.dim() != (n, n) {
            return Err(Error::dimension(
                "Pencil",
                format!("square {n} x {n} pair"),
                format!(
                    "E {} x {}, A {} x {}",
                    e.nrows(),
                    e.ncols(),
                    a.nrows(),
                    a.ncols()
                ),
            ));
        }
        Ok(Pencil { e, a })
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }
}

/// Which synthesis problem a feedback solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    /// Regularization by proportional output feedback.
    Regularize,
    /// Regularization and index reduction by proportional output feedback.
    IndexReduce,
    /// Stabilization by proportional output feedback.
    Stabilize,
    /// Regularization by derivative output feedback.
    DerivRegularize,
    /// Regularization with prescribed rank(E + B K B^H).
    DerivRank,
    /// Index reduction by derivative output feedback.
    DerivIndexReduce,
    /// Index reduction with prescribed rank(E + B K B^H).
    DerivIndexRank,
    /// Combined derivative/proportional stabilization.
    DerivStabilize,
}

impl ProblemId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemId::Regularize => "problem-1",
            ProblemId::IndexReduce => "problem-2",
            ProblemId::Stabilize => "problem-3",
            ProblemId::DerivRegularize => "derivative-regularize",
            ProblemId::DerivRank => "derivative-rank",
            ProblemId::DerivIndexReduce => "derivative-index-reduce",
            ProblemId::DerivIndexRank => "derivative-index-rank",
            ProblemId::DerivStabilize => "derivative-stabilize",
        }
    }
}

/// Output feedback u = (F_S - F_H) y + v, optionally with derivative part
/// u += K y'.
#[derive(Debug, Clone)]
pub struct Feedback {
    /// Skew-Hermitian (lossless) part.
    pub f_s: CMat,
    /// Hermitian (damping) part.
    pub f_h: CMat,
    /// Optional Hermitian derivative feedback.
    pub k: Option<CMat>,
    pub problem: ProblemId,
    pub rank_target: Option<usize>,
}

impl Feedback {
    pub fn zero(m: usize, problem: ProblemId) -> Self {
        Feedback {
            f_s: czeros(m, m),
            f_h: czeros(m, m),
            k: None,
            problem,
            rank_target: None,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.f_s.nrows()
    }

    /// Structural checks: F_S skew-Hermitian, F_H Hermitian, K Hermitian,
    /// all m x m.
    pub fn validate(&self, m: usize, tol: &TolerancePolicy) -> Result<ValidationReport> {
        let mut report = ValidationReport::new();
        for (name, mat) in [("F_S", &self.f_s), ("F_H", &self.f_h)] {
            if mat.dim() != (m, m) {
                return Err(Error::dimension(
                    &format!("Feedback field {name}"),
                    format!("{m} x {m}"),
                    format!("{} x {}", mat.nrows(), mat.ncols()),
                ));
            }
        }
        if let Some(k) = &self.k {
            if k.dim() != (m, m) {
                return Err(Error::dimension(
                    "Feedback field K",
                    format!("{m} x {m}"),
                    format!("{} x {}", k.nrows(), k.ncols()),
                ));
            }
        }
        let skew_resid = fro_norm(&(&self.f_s + &dagger(&self.f_s)));
        let skew_scale = fro_norm(&self.f_s).max(1.0);
        report.push(
            "F_S skew-Hermitian",
            skew_resid <= tol.equality_tol * skew_scale,
            skew_resid,
            tol.equality_tol * skew_scale,
        );
        let herm_resid = fro_norm(&(&self.f_h - &dagger(&self.f_h)));
        let herm_scale = fro_norm(&self.f_h).max(1.0);
        report.push(
            "F_H Hermitian",
            herm_resid <= tol.equality_tol * herm_scale,
            herm_resid,
            tol.equality_tol * herm_scale,
        );
        if let Some(k) = &self.k {
            let k_resid = fro_norm(&(k - &dagger(k)));
            let k_scale = fro_norm(k).max(1.0);
            report.push(
                "K Hermitian",
                k_resid <= tol.equality_tol * k_scale,
                k_resid,
                tol.equality_tol * k_scale,
            );
        }
        Ok(report)
    }
}

/// One named structural check with its measured residual.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
}

/// Itemized outcome of a validation pass.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub items: Vec<CheckItem>,
    /// rank(Q) for general systems (the theory assumes full column rank but
    /// the artifact only records it).
    pub rank_q: Option<usize>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport::default()
    }

    pub fn push(&mut self, name: &str, passed: bool, residual: f64, threshold: f64) {
        self.items.push(CheckItem {
            name: name.to_string(),
            passed,
            residual,
            threshold,
        });
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|c| !c.passed).collect()
    }
}

/// Checks conditions (i)-(ii) of the pHDAE definition on the raw model:
/// Q^H E = E^H Q >= 0, Re(Q^H (J - J^H) Q) = 0, the dissipation matrix is
/// PSD, S Hermitian and N skew-Hermitian.
pub fn validate_general(sys: &GeneralPhdae, tol: &TolerancePolicy) -> Result<ValidationReport> {
    let mut report = ValidationReport::new();
    let qe = mm(&dagger(&sys.q), &sys.e);
    let scale_qe = fro_norm(&qe).max(1.0);

    let sym_resid = fro_norm(&(&qe - &dagger(&qe)));
    report.push(
        "Q^H E = E^H Q",
        sym_resid <= tol.equality_tol * scale_qe,
        sym_resid,
        tol.equality_tol * scale_qe,
    );

    let qe_psd = psd_check(&herm_part(&qe), tol)?;
    report.push(
        "Q^H E >= 0",
        qe_psd.is_psd,
        qe_psd.min_eig.map(|x| (-x).max(0.0)).unwrap_or(0.0),
        tol.psd_tol * fro_norm(&qe).max(1.0),
    );

    // Re(Q^H (J - J^H) Q) = 0 with Re the operator real part (Hermitian
    // part). The entrywise reading would reject every system with a real
    // rotation block, contradicting the simplified form's J = -J^H; since
    // J - J^H is skew-Hermitian the condition can only fail through
    // numerically asymmetric data.
    let jskew = &sys.j - &dagger(&sys.j);
    let qjq = mm(&dagger(&sys.q), &mm(&jskew, &sys.q));
    let re_part = herm_part(&qjq);
    let scale_j = (fro_norm(&sys.q).powi(2) * fro_norm(&jskew)).max(1.0);
    let re_resid = fro_norm(&re_part);
    report.push(
        "Re(Q^H (J - J^H) Q) = 0",
        re_resid <= tol.equality_tol * scale_j,
        re_resid,
        tol.equality_tol * scale_j,
    );

    let w = sys.dissipation_matrix();
    let w_herm_resid = fro_norm(&(&w - &dagger(&w)));
    let w_scale = fro_norm(&w).max(1.0);
    report.push(
        "W Hermitian",
        w_herm_resid <= tol.equality_tol * w_scale,
        w_herm_resid,
        tol.equality_tol * w_scale,
    );
    let w_psd = psd_check(&herm_part(&w), tol)?;
    report.push(
        "W >= 0",
        w_psd.is_psd,
        w_psd.min_eig.map(|x| (-x).max(0.0)).unwrap_or(0.0),
        tol.psd_tol * w_scale,
    );

    let s_resid = fro_norm(&(&sys.s - &dagger(&sys.s)));
    let s_scale = fro_norm(&sys.s).max(1.0);
    report.push(
        "S Hermitian",
        s_resid <= tol.equality_tol * s_scale,
        s_resid,
        tol.equality_tol * s_scale,
    );
    let n_resid = fro_norm(&(&sys.n + &dagger(&sys.n)));
    let n_scale = fro_norm(&sys.n).max(1.0);
    report.push(
        "N skew-Hermitian",
        n_resid <= tol.equality_tol * n_scale,
        n_resid,
        tol.equality_tol * n_scale,
    );

    report.rank_q = Some(rank_of(&sys.q, tol));
    Ok(report)
}

/// Checks E = E^H >= 0, J = -J^H, R = R^H >= 0 and full column rank of B.
pub fn validate_simplified(
    sys: &SimplifiedPhdae,
    tol: &TolerancePolicy,
) -> Result<ValidationReport> {
    let mut report = ValidationReport::new();

    let e_check = psd_check(&sys.e, tol)?;
    let e_scale = fro_norm(&sys.e).max(1.0);
    report.push(
        "E Hermitian",
        e_check.is_hermitian,
        e_check.herm_residual,
        tol.equality_tol * e_scale,
    );
    report.push(
        "E >= 0",
        e_check.is_psd,
        e_check.min_eig.map(|x| (-x).max(0.0)).unwrap_or(0.0),
        tol.psd_tol * e_scale,
    );

    let j_resid = fro_norm(&(&sys.j + &dagger(&sys.j)));
    let j_scale = fro_norm(&sys.j).max(1.0);
    report.push(
        "J skew-Hermitian",
        j_resid <= tol.equality_tol * j_scale,
        j_resid,
        tol.equality_tol * j_scale,
    );

    let r_check = psd_check(&sys.r, tol)?;
    let r_scale = fro_norm(&sys.r).max(1.0);
    report.push(
        "R Hermitian",
        r_check.is_hermitian,
        r_check.herm_residual,
        tol.equality_tol * r_scale,
    );
    report.push(
        "R >= 0",
        r_check.is_psd,
        r_check.min_eig.map(|x| (-x).max(0.0)).unwrap_or(0.0),
        tol.psd_tol * r_scale,
    );

    let m = sys.b.ncols();
    let rank_b = rank_of(&sys.b, tol);
    report.push(
        "B full column rank",
        rank_b == m,
        (m - rank_b) as f64,
        0.5,
    );

    Ok(report)
}

/// Closed-loop pencil of u = (F_S - F_H) y (+ K y'):
/// E' = E + B K B^H (E' = E when K is absent),
/// A' = J + B F_S B^H - (R + B F_H B^H).
pub fn closed_loop(sys: &SimplifiedPhdae, fb: &Feedback) -> Result<Pencil> {
    let m = sys.num_inputs();
    if fb.f_s.dim() != (m, m) || fb.f_h.dim() != (m, m) {
        return Err(Error::dimension(
            "closed_loop feedback",
            format!("{m} x {m}"),
            format!(
                "F_S {} x {}, F_H {} x {}",
                fb.f_s.nrows(),
                fb.f_s.ncols(),
                fb.f_h.nrows(),
                fb.f_h.ncols()
            ),
        ));
    }
    let bh = dagger(&sys.b);
    let e = match &fb.k {
        Some(k) => {
            if k.dim() != (m, m) {
                return Err(Error::dimension(
                    "closed_loop derivative feedback K",
                    format!("{m} x {m}"),
                    format!("{} x {}", k.nrows(), k.ncols()),
                ));
            }
            &sys.e + &mm(&sys.b, &mm(k, &bh))
        }
        None => sys.e.clone(),
    };
    let a = &(&sys.j + &mm(&sys.b, &mm(&fb.f_s, &bh)))
        - &(&sys.r + &mm(&sys.b, &mm(&fb.f_h, &bh)));
    Pencil::new(e, a)
}

/// Closed-loop dissipation R + B F_H B^H.
pub fn closed_loop_dissipation(sys: &SimplifiedPhdae, fb: &Feedback) -> CMat {
    &sys.r + &mm(&sys.b, &mm(&fb.f_h, &dagger(&sys.b)))
}

/// Closed-loop generalized mass matrix E + B K B^H (E if no K).
pub fn closed_loop_mass(sys: &SimplifiedPhdae, fb: &Feedback) -> CMat {
    match &fb.k {
        Some(k) => &sys.e + &mm(&sys.b, &mm(k, &dagger(&sys.b))),
        None => sys.e.clone(),
    }
}

/// Convenience constructor for real test data.
pub fn simplified_from_real(
    n: usize,
    m: usize,
    e: &[f64],
    j: &[f64],
    r: &[f64],
    b: &[f64],
) -> SimplifiedPhdae {
    SimplifiedPhdae::new_unchecked(
        cmat_re(n, n, e),
        cmat_re(n, n, j),
        cmat_re(n, n, r),
        cmat_re(n, m, b),
    )
    .expect("simplified_from_real dimensions")
}
