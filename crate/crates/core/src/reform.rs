//! Reduction of a raw pHDAE model to the simplified form: multiply out the
//! energy weight Q, then remove the feedthrough term by extending the state
//! space.

use crate::error::{Error, Result};
use crate::linalg::{
    self, ceye, czeros, dagger, fro_norm, hstack, mm, psd_check, rank_of, right_nullspace,
    solve_mat, vstack, CMat, TolerancePolicy,
};
use crate::model::{validate_general, GeneralPhdae, InputMap, SimplifiedPhdae};
use ndarray::s;

/// Result of the Q-elimination step.
#[derive(Debug, Clone)]
pub struct QElimination {
    /// System with Q = I (square, state dimension = rank of the original Q).
    pub system: GeneralPhdae,
    /// Columns of the state transformation: original x = state_map * x_new
    /// spans the retained subspace.
    pub state_map: CMat,
    /// Number of state directions dropped (0 when Q had full column rank).
    pub discarded: usize,
}

/// Multiplies the state equation by Q^H, producing a system with Q = I.
/// Fails with `NotFullRank` when rank(Q) < n; see
/// [`eliminate_q_with_projection`] for the rank-deficient path.
pub fn eliminate_q(sys: &GeneralPhdae, tol: &TolerancePolicy) -> Result<GeneralPhdae> {
    let n = sys.state_cols();
    let rank_q = rank_of(&sys.q, tol);
    if rank_q < n {
        return Err(Error::NotFullRank {
            context: "eliminate_q: Q must have full column rank".into(),
            rank: rank_q,
            required: n,
        });
    }
    Ok(q_multiplied(sys))
}

fn q_multiplied(sys: &GeneralPhdae) -> GeneralPhdae {
    let qh = dagger(&sys.q);
    let n = sys.state_cols();
    GeneralPhdae {
        e: mm(&qh, &sys.e),
        q: ceye(n),
        j: mm(&qh, &mm(&sys.j, &sys.q)),
        r: mm(&qh, &mm(&sys.r, &sys.q)),
        b: mm(&qh, &sys.b),
        p: mm(&qh, &sys.p),
        s: sys.s.clone(),
        n: sys.n.clone(),
    }
}

/// Q-elimination for a possibly rank-deficient Q: an SVD of Q splits off the
/// subsystem associated with the invertible part; the dropped directions
/// never enter the energy, the dynamics or the output.
pub fn eliminate_q_with_projection(
    sys: &GeneralPhdae,
    tol: &TolerancePolicy,
) -> Result<QElimination> {
    let n = sys.state_cols();
    let parts = linalg::svd(&sys.q);
    let rank_q = rank_of(&sys.q, tol);
    if rank_q == n {
        return Ok(QElimination {
            system: q_multiplied(sys),
            state_map: ceye(n),
            discarded: 0,
        });
    }
    // x = V_q x_hat; only the leading rank_q components of x_hat couple
    // through Q, and condition (i) confines E^H Q to the same subspace.
    let v_q = dagger(&parts.vh);
    let v1 = v_q.slice(s![.., ..rank_q]).to_owned();
    let reduced = GeneralPhdae {
        e: mm(&sys.e, &v1),
        q: mm(&sys.q, &v1),
        j: sys.j.clone(),
        r: sys.r.clone(),
        b: sys.b.clone(),
        p: sys.p.clone(),
        s: sys.s.clone(),
        n: sys.n.clone(),
    };
    let out = q_multiplied(&reduced);
    Ok(QElimination {
        system: out,
        state_map: v1,
        discarded: n - rank_q,
    })
}

/// Maps extended states back to the original state and the transformed input
/// component that was absorbed into the extension.
#[derive(Debug, Clone)]
pub struct StateEmbedding {
    /// Original state dimension.
    pub n: usize,
    /// Number of appended algebraic states (= rank of the feedthrough D).
    pub k: usize,
    /// Unitary input rotation U_D; new inputs are U_D^H u.
    pub u_d: CMat,
    /// Leading feedthrough block in the rotated coordinates (k x k,
    /// nonsingular).
    pub d1: CMat,
    /// Rotated first input-block coupling P1 (n x k).
    pub p1: CMat,
    /// Which split construction produced U_D.
    pub path: FeedthroughPath,
}

/// How the unitary splitting of the feedthrough matrix was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedthroughPath {
    /// Eigendecomposition of the Hermitian part of D sufficed.
    HermitianPart,
    /// The skew part coupled the Hermitian kernel; an SVD of D itself was
    /// used instead.
    FullSvd,
}

impl StateEmbedding {
    pub fn extended_dim(&self) -> usize {
        self.n + self.k
    }

    /// Original state part of an extended state.
    pub fn extract_state(&self, x_ext: &linalg::CVec) -> linalg::CVec {
        x_ext.slice(s![..self.n]).to_owned()
    }

    /// Recovers the absorbed input component u1 = D1^-1 (x2 - P1^H x).
    pub fn extract_u1(&self, x_ext: &linalg::CVec) -> Result<linalg::CVec> {
        let x = x_ext.slice(s![..self.n]).to_owned();
        let x2 = x_ext.slice(s![self.n..]).to_owned();
        let p1h_x = dagger(&self.p1).dot(&x);
        let rhs = &x2 - &p1h_x;
        let rhs_mat = CMat::from_shape_vec((self.k, 1), rhs.to_vec()).expect("shape");
        let sol = solve_mat(&self.d1, &rhs_mat)?;
        Ok(sol.column(0).to_owned())
    }
}

/// Outcome of the feedthrough removal.
#[derive(Debug, Clone)]
pub struct FeedthroughRemoval {
    pub system: SimplifiedPhdae,
    pub embedding: StateEmbedding,
    /// Input compression applied after the extension if the extended B was
    /// rank deficient (identity otherwise).
    pub input_map: InputMap,
}

/// Splits D = U_D diag(D1, 0) U_D^H with D1 nonsingular. Tries the
/// eigendecomposition of the Hermitian part first; if the skew part couples
/// that kernel, recomputes the split from an SVD of D.
fn split_feedthrough(d: &CMat, tol: &TolerancePolicy) -> Result<(CMat, usize, FeedthroughPath)> {
    let m = d.nrows();
    let scale = fro_norm(d).max(1e-300);
    // path A: Hermitian part eigendecomposition
    let h = linalg::herm_part(d);
    let (vals, vecs) = linalg::eigh(&h);
    let cutoff = tol.rank_rel * scale * m.max(1) as f64;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| vals[j].abs().partial_cmp(&vals[i].abs()).unwrap());
    let k = vals.iter().filter(|v| v.abs() > cutoff).count();
    let mut u = czeros(m, m);
    for (c, &o) in order.iter().enumerate() {
        u.column_mut(c).assign(&vecs.column(o));
    }
    if split_is_valid(d, &u, k, tol) {
        return Ok((u, k, FeedthroughPath::HermitianPart));
    }
    // path B: SVD of D; ker(D) = ker(D^H) because the Hermitian part is PSD
    let parts = linalg::svd(d);
    let k = rank_of(d, tol);
    let v = dagger(&parts.vh);
    if split_is_valid(d, &v, k, tol) {
        return Ok((v, k, FeedthroughPath::FullSvd));
    }
    Err(Error::StructuralInconsistency {
        context: "feedthrough matrix admits no unitary diag(D1, 0) splitting; \
                  its Hermitian part is not positive semidefinite"
            .into(),
        residual: f64::NAN,
    })
}

fn split_is_valid(d: &CMat, u: &CMat, k: usize, tol: &TolerancePolicy) -> bool {
    let m = d.nrows();
    let scale = fro_norm(d).max(1e-300);
    let t = mm(&dagger(u), &mm(d, u));
    let off = fro_norm(&t.slice(s![k.., ..]).to_owned())
        .hypot(fro_norm(&t.slice(s![..k, k..]).to_owned()));
    if off > tol.equality_tol * scale * 64.0 {
        return false;
    }
    if k == 0 {
        return true;
    }
    let d1 = t.slice(s![..k, ..k]).to_owned();
    rank_of(&d1, tol) == k
}

/// Removes the feedthrough D = S - N of a Q = I system by extending the
/// state with x2 = D1 u1 + P1^H x, producing a simplified pHDAE.
pub fn remove_feedthrough(
    sys: &GeneralPhdae,
    tol: &TolerancePolicy,
) -> Result<FeedthroughRemoval> {
    let n = sys.state_cols();
    if sys.state_rows() != n {
        return Err(Error::dimension(
            "remove_feedthrough",
            "square system (Q already eliminated)",
            format!("{} x {}", sys.state_rows(), n),
        ));
    }
    let q_resid = fro_norm(&(&sys.q - &ceye(n)));
    if q_resid > tol.equality_tol * (1.0 + fro_norm(&sys.q)) {
        return Err(Error::InvalidInput(format!(
            "remove_feedthrough expects Q = I (residual {q_resid:.3e}); run eliminate_q first"
        )));
    }
    let report = validate_general(sys, tol)?;
    if !report.passed() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name.clone()).collect();
        return Err(Error::InvalidInput(format!(
            "remove_feedthrough requires a valid pHDAE; failing checks: {names:?}"
        )));
    }

    let m = sys.num_inputs();
    let d = &sys.s - &sys.n;
    let (u_d, k, path) = split_feedthrough(&d, tol)?;
    let d_rot = mm(&dagger(&u_d), &mm(&d, &u_d));
    let d1 = d_rot.slice(s![..k, ..k]).to_owned();

    let b_rot = mm(&sys.b, &u_d);
    let p_rot = mm(&sys.p, &u_d);
    let b1 = b_rot.slice(s![.., ..k]).to_owned();
    let b2 = b_rot.slice(s![.., k..]).to_owned();
    let p1 = p_rot.slice(s![.., ..k]).to_owned();
    let p2 = p_rot.slice(s![.., k..]).to_owned();

    // The dissipation inequality forces the trailing P block to vanish.
    let p2_norm = fro_norm(&p2);
    let scale = fro_norm(&sys.p).max(fro_norm(&sys.b)).max(1.0);
    if p2_norm > 64.0 * tol.equality_tol * scale {
        return Err(Error::StructuralInconsistency {
            context: "P2 != 0 after the feedthrough split; the input data is \
                      not a port-Hamiltonian system"
                .into(),
            residual: p2_norm,
        });
    }

    // Extended coefficients. The combined state matrix is
    //   [ J - R + P1 D1^-1 P1^H   -P1 D1^-1 ]
    //   [ D1^-1 P1^H              -D1^-1    ]
    // split into its skew-Hermitian and Hermitian parts. For Hermitian D1
    // this reproduces the block-diagonal dissipation of the reference
    // construction; a skew component of D1 couples the new dissipation block
    // to the P1 rows.
    let d1_inv = if k > 0 {
        solve_mat(&d1, &ceye(k))?
    } else {
        czeros(0, 0)
    };
    let p1_d1inv = mm(&p1, &d1_inv);
    let p1_d1inv_p1h = mm(&p1_d1inv, &dagger(&p1));

    let a_ext = vstack(&[
        &hstack(&[
            &(&(&sys.j - &sys.r) + &p1_d1inv_p1h),
            &p1_d1inv.mapv(|z| -z),
        ]),
        &hstack(&[&mm(&d1_inv, &dagger(&p1)), &d1_inv.mapv(|z| -z)]),
    ]);
    let e_ext = vstack(&[
        &hstack(&[&sys.e, &czeros(n, k)]),
        &hstack(&[&czeros(k, n), &czeros(k, k)]),
    ]);
    let j_ext = linalg::skew_part(&a_ext);
    let r_ext = linalg::herm_part(&a_ext).mapv(|z| -z);
    let b_ext = vstack(&[
        &hstack(&[&b1, &b2]),
        &hstack(&[&ceye(k), &czeros(k, m - k)]),
    ]);

    let (system, input_map) =
        SimplifiedPhdae::new_compressing(e_ext, j_ext, r_ext, b_ext, tol)?;

    Ok(FeedthroughRemoval {
        system,
        embedding: StateEmbedding {
            n,
            k,
            u_d,
            d1,
            p1,
            path,
        },
        input_map,
    })
}

/// Convenience: full reduction pipeline from a raw model to the simplified
/// form (Q-elimination followed by feedthrough removal).
pub fn reduce_to_simplified(
    sys: &GeneralPhdae,
    tol: &TolerancePolicy,
) -> Result<(SimplifiedPhdae, QElimination, FeedthroughRemoval)> {
    let elim = eliminate_q_with_projection(sys, tol)?;
    let removal = remove_feedthrough(&elim.system, tol)?;
    Ok((removal.system.clone(), elim, removal))
}

/// Hamiltonian of the extended state equals the Hamiltonian of the embedded
/// original state (the appended variables carry no energy).
pub fn extension_preserves_hamiltonian(
    original: &GeneralPhdae,
    removal: &FeedthroughRemoval,
    x: &linalg::CVec,
    u1: &linalg::CVec,
) -> (f64, f64) {
    let k = removal.embedding.k;
    let p1h_x = dagger(&removal.embedding.p1).dot(x);
    let d1_u1 = removal.embedding.d1.dot(u1);
    let x2 = &d1_u1 + &p1h_x;
    let mut x_ext = linalg::CVec::zeros(removal.embedding.n + k);
    for (i, v) in x.iter().enumerate() {
        x_ext[i] = *v;
    }
    for (i, v) in x2.iter().enumerate() {
        x_ext[removal.embedding.n + i] = *v;
    }
    // 1/2 x^H (Q^H E) x for the original (Q = I here)
    let qe = mm(&dagger(&original.q), &original.e);
    let ex = qe.dot(x);
    let h_orig: num_complex::Complex64 =
        x.iter().zip(ex.iter()).map(|(a, b)| a.conj() * b).sum();
    // extended Hamiltonian via the extended E and the (possibly compressed)
    // input map does not alter the state block
    let e_ext_dim = removal.embedding.extended_dim();
    let mut e_ext = czeros(e_ext_dim, e_ext_dim);
    e_ext
        .slice_mut(s![..removal.embedding.n, ..removal.embedding.n])
        .assign(&qe);
    let ex2 = e_ext.dot(&x_ext);
    let h_ext: num_complex::Complex64 = x_ext
        .iter()
        .zip(ex2.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    (0.5 * h_orig.re, 0.5 * h_ext.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmat_re, TolerancePolicy};
    use crate::model::validate_simplified;
    use crate::verify::generator::{rand_mat, rand_pd, rand_psd, rand_skew, rand_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn eliminate_q_identity_is_copy() {
        let sys = GeneralPhdae::new(
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        let out = eliminate_q(&sys, &tol()).unwrap();
        assert_eq!(out.e, sys.e);
        assert_eq!(out.j, sys.j);
    }

    #[test]
    fn eliminate_q_scalar_scaling() {
        let sys = GeneralPhdae::new(
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[2.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        let out = eliminate_q(&sys, &tol()).unwrap();
        assert!((out.e[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((out.q[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eliminate_q_unitary_random_stays_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = 3;
            let q = rand_unitary(&mut rng, n);
            let e0 = rand_psd(&mut rng, n);
            // build E so that Q^H E = E^H Q >= 0: E = Q H with H Hermitian PSD
            let e = mm(&q, &e0);
            let j = rand_skew(&mut rng, n);
            let r = rand_psd(&mut rng, n);
            let sys = GeneralPhdae::new(
                e,
                q,
                j,
                r,
                rand_mat(&mut rng, n, 1),
                czeros(n, 1),
                czeros(1, 1),
                czeros(1, 1),
            )
            .unwrap();
            assert!(validate_general(&sys, &tol()).unwrap().passed());
            let out = eliminate_q(&sys, &tol()).unwrap();
            let rep = validate_general(&out, &tol()).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures());
            // new E is Hermitian PSD
            let e_check = crate::linalg::psd_check(&out.e, &tol()).unwrap();
            assert!(e_check.is_hermitian && e_check.is_psd);
        }
    }

    #[test]
    fn rank_deficient_q_projection() {
        // Q = diag(1, 0): one state direction is dropped
        let sys = GeneralPhdae::new(
            cmat_re(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            cmat_re(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            cmat_re(2, 2, &[0.0; 4]),
            cmat_re(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            cmat_re(2, 1, &[1.0, 0.0]),
            cmat_re(2, 1, &[0.0, 0.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        assert!(matches!(
            eliminate_q(&sys, &tol()),
            Err(Error::NotFullRank { .. })
        ));
        let elim = eliminate_q_with_projection(&sys, &tol()).unwrap();
        assert_eq!(elim.discarded, 1);
        assert_eq!(elim.system.state_cols(), 1);
        assert!(validate_general(&elim.system, &tol()).unwrap().passed());
    }

    #[test]
    fn feedthrough_identity_when_d_zero() {
        let sys = GeneralPhdae::new(
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        let out = remove_feedthrough(&sys, &tol()).unwrap();
        assert_eq!(out.embedding.k, 0);
        assert_eq!(out.system.state_dim(), 1);
        assert!((out.system.e[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((out.system.b[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn feedthrough_scalar_worked_example() {
        // n = 1, E = 1, J = 0, R = 0, B = 1, P = 0, S = 1, N = 0:
        // extension gives E = diag(1, 0), R = diag(0, 1), B = [1; 1].
        let sys = GeneralPhdae::new(
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        let out = remove_feedthrough(&sys, &tol()).unwrap();
        assert_eq!(out.embedding.k, 1);
        let sysx = &out.system;
        assert_eq!(sysx.state_dim(), 2);
        assert!(linalg::rel_diff(&sysx.e, &cmat_re(2, 2, &[1.0, 0.0, 0.0, 0.0])) < 1e-12);
        assert!(linalg::rel_diff(&sysx.r, &cmat_re(2, 2, &[0.0, 0.0, 0.0, 1.0])) < 1e-12);
        assert!(fro_norm(&sysx.j) < 1e-12);
        // B = [1; 1] up to the unitary input rotation (here 1 x 1, phase 1)
        assert!(linalg::rel_diff(&sysx.b, &cmat_re(2, 1, &[1.0, 1.0])) < 1e-12);
        assert!(validate_simplified(sysx, &tol()).unwrap().passed());
    }

    #[test]
    fn random_feedthrough_systems_become_valid_simplified() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hermitian_path_seen = false;
        for trial in 0..40 {
            let n = 2;
            let m = 2;
            let e = rand_psd(&mut rng, n);
            let j = rand_skew(&mut rng, n);
            // W = [R P; P^H S] must be PSD: draw it as a Gram matrix
            let w = rand_psd(&mut rng, n + m);
            let r = w.slice(s![..n, ..n]).to_owned();
            let p = w.slice(s![..n, n..]).to_owned();
            let s_mat = linalg::herm_part(&w.slice(s![n.., n..]).to_owned());
            let nn = rand_skew(&mut rng, m);
            let sys = GeneralPhdae::new(
                e,
                ceye(n),
                j,
                r,
                rand_mat(&mut rng, n, m),
                p,
                s_mat,
                nn,
            )
            .unwrap();
            if !validate_general(&sys, &tol()).unwrap().passed() {
                continue;
            }
            let out = remove_feedthrough(&sys, &tol()).unwrap();
            let rep = validate_simplified(&out.system, &tol()).unwrap();
            assert!(rep.passed(), "trial {trial}: {:?}", rep.failures());
            // Hamiltonian preservation on a random embedded state
            let x = rand_mat(&mut rng, n, 1).column(0).to_owned();
            let u1 = rand_mat(&mut rng, out.embedding.k, 1).column(0).to_owned();
            let (h0, h1) = extension_preserves_hamiltonian(&sys, &out, &x, &u1);
            assert!((h0 - h1).abs() <= 1e-10 * (1.0 + h0.abs()));
            if out.embedding.path == FeedthroughPath::HermitianPart {
                hermitian_path_seen = true;
            }
        }
        assert!(hermitian_path_seen);
    }

    #[test]
    fn skew_feedthrough_uses_svd_path() {
        // D = S - N with S = 0, N = -[[0, 1], [-1, 0]]: Hermitian part zero,
        // so the Hermitian-part split sees rank 0 while D is nonsingular.
        let n = 1;
        let sys = GeneralPhdae::new(
            cmat_re(n, n, &[1.0]),
            cmat_re(n, n, &[1.0]),
            cmat_re(n, n, &[0.0]),
            cmat_re(n, n, &[1.0]),
            cmat_re(n, 2, &[1.0, 0.0]),
            cmat_re(n, 2, &[0.0, 0.0]),
            cmat_re(2, 2, &[0.0; 4]),
            cmat_re(2, 2, &[0.0, -1.0, 1.0, 0.0]),
        )
        .unwrap();
        let out = remove_feedthrough(&sys, &tol()).unwrap();
        assert_eq!(out.embedding.path, FeedthroughPath::FullSvd);
        assert_eq!(out.embedding.k, 2);
        assert!(validate_simplified(&out.system, &tol()).unwrap().passed());
    }

    #[test]
    fn p2_violation_detected() {
        // D = 0 forces P = 0; a nonzero P must be flagged as inconsistent.
        // This input deliberately violates the W >= 0 condition, which the
        // validity gate reports first.
        let sys = GeneralPhdae::new(
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.5]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        assert!(remove_feedthrough(&sys, &tol()).is_err());
    }

    #[test]
    fn psd_of_extended_r_blocks() {
        // the extended R must stay PSD: check on the worked scalar example
        let sys = GeneralPhdae::new(
            cmat_re(1, 1, &[2.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.5]),
            cmat_re(1, 1, &[1.0]),
            cmat_re(1, 1, &[0.0]),
        )
        .unwrap();
        let rep = validate_general(&sys, &tol()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
        let out = remove_feedthrough(&sys, &tol()).unwrap();
        let r_check = psd_check(&out.system.r, &tol()).unwrap();
        assert!(r_check.is_psd);
    }
}
