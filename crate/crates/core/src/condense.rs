//! Unitary condensed form of a simplified pHDAE, its non-unitary scaled
//! refinement, and the coordinate-free rank formulas for the structural
//! dimensions.
//!
//! The staircase exposes six structural block sizes n1..n6 of the state
//! space. Every solvability question answered by the synthesis module is a
//! rank condition on these blocks.

use crate::error::{Error, Result};
use crate::linalg::{
    self, ceye, col_compress_zeros_first_scaled, czeros, dagger, fro_norm, hstack, left_nullspace,
    mm, psd_check, rank_detail, rank_of, right_nullspace, row_compress,
    row_compress_scaled, row_compress_zeros_first_scaled, solve_mat, two_norm, CMat,
    TolerancePolicy,
};
use crate::model::{validate_simplified, SimplifiedPhdae};
use ndarray::s;

/// Structural dimensions (n1, ..., n6) of the condensed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims(pub [usize; 6]);

impl Dims {
    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Start offset of block `i` (1-based).
    pub fn offset(&self, i: usize) -> usize {
        assert!((1..=6).contains(&i));
        self.0[..i - 1].iter().sum()
    }

    /// Row/column range of block `i` (1-based).
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.offset(i);
        start..start + self.0[i - 1]
    }

    /// Combined range of blocks `i..=j`.
    pub fn range_span(&self, i: usize, j: usize) -> std::ops::Range<usize> {
        self.offset(i)..self.offset(j) + self.0[j - 1]
    }

    pub fn n(&self, i: usize) -> usize {
        self.0[i - 1]
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {}, {})",
            self.0[0], self.0[1], self.0[2], self.0[3], self.0[4], self.0[5]
        )
    }
}

/// Unitary condensed form: U^H E U, U^H (J - R) U and U^H B V carry the
/// staircase zero pattern, with all structural ranks exposed as block sizes.
#[derive(Debug, Clone)]
pub struct CondensedForm {
    pub u: CMat,
    pub v: CMat,
    pub dims: Dims,
    /// U^H E U
    pub e_c: CMat,
    /// U^H (J - R) U
    pub a_c: CMat,
    /// U^H B V
    pub b_c: CMat,
    pub m: usize,
}

impl CondensedForm {
    pub fn state_dim(&self) -> usize {
        self.dims.sum()
    }

    /// Column range of input group 1 (width m - n3) or 2 (width n3).
    pub fn input_range(&self, group: usize) -> std::ops::Range<usize> {
        let n3 = self.dims.n(3);
        match group {
            1 => 0..self.m - n3,
            2 => self.m - n3..self.m,
            _ => panic!("input group must be 1 or 2"),
        }
    }

    pub fn e_block(&self, i: usize, j: usize) -> CMat {
        self.e_c
            .slice(s![self.dims.range(i), self.dims.range(j)])
            .to_owned()
    }

    pub fn a_block(&self, i: usize, j: usize) -> CMat {
        self.a_c
            .slice(s![self.dims.range(i), self.dims.range(j)])
            .to_owned()
    }

    pub fn b_block(&self, i: usize, group: usize) -> CMat {
        self.b_c
            .slice(s![self.dims.range(i), self.input_range(group)])
            .to_owned()
    }

    /// Full postcondition battery of the condensed form; returns a
    /// diagnostic error naming the first violated check.
    pub fn check_invariants(&self, sys: &SimplifiedPhdae, tol: &TolerancePolicy) -> Result<()> {
        let n = sys.state_dim();
        let d = &self.dims;
        if d.sum() != n {
            return Err(Error::CondensedFormCheck(format!(
                "block sizes {} do not sum to n = {n}",
                d
            )));
        }
        let ue = linalg::unitary_error(&self.u).max(linalg::unitary_error(&self.v));
        let unitary_budget = 64.0 * (n.max(self.m).max(1)) as f64 * f64::EPSILON;
        if ue > unitary_budget {
            return Err(Error::CondensedFormCheck(format!(
                "transformation unitarity error {ue:.3e} exceeds {unitary_budget:.3e}"
            )));
        }

        let e_scale = fro_norm(&self.e_c).max(1e-300);
        let a_scale = fro_norm(&self.a_c).max(1e-300);
        let b_scale = fro_norm(&self.b_c).max(1e-300);
        let check_zero = |name: &str, block: &CMat, scale: f64| -> Result<()> {
            let r = fro_norm(block);
            if r > tol.equality_tol * scale {
                return Err(Error::CondensedFormCheck(format!(
                    "{name} not zero: residual {r:.3e} (scale {scale:.3e})"
                )));
            }
            Ok(())
        };

        // E zero rows/columns on blocks 5 and 6
        for i in [5usize, 6] {
            for j in 1..=6 {
                check_zero(
                    &format!("E block ({i},{j})"),
                    &self.e_block(i, j),
                    e_scale,
                )?;
                check_zero(
                    &format!("E block ({j},{i})"),
                    &self.e_block(j, i),
                    e_scale,
                )?;
            }
        }
        // B zero rows 4..6 and zero (1,1) block
        for i in [4usize, 5, 6] {
            for g in [1usize, 2] {
                check_zero(
                    &format!("B block ({i},{g})"),
                    &self.b_block(i, g),
                    b_scale,
                )?;
            }
        }
        check_zero("B block (1,1)", &self.b_block(1, 1), b_scale)?;
        // A column/row 6 zero pattern outside the (1..2, 6) coupling
        for i in 3..=6 {
            check_zero(&format!("A block ({i},6)"), &self.a_block(i, 6), a_scale)?;
            check_zero(&format!("A block (6,{i})"), &self.a_block(6, i), a_scale)?;
        }
        check_zero("A block (5,6)", &self.a_block(5, 6), a_scale)?;
        check_zero("A block (6,5)", &self.a_block(6, 5), a_scale)?;

        // rank conditions
        let j16 = linalg::vstack(&[&self.a_block(1, 6), &self.a_block(2, 6)]);
        let want = d.n(1) + d.n(2);
        if rank_of(&j16, tol) != want {
            return Err(Error::CondensedFormCheck(format!(
                "rank [J16; J26] = {} but n1+n2 = {want}",
                rank_of(&j16, tol)
            )));
        }
        if rank_of(&self.b_block(2, 1), tol) != d.n(2) {
            return Err(Error::CondensedFormCheck("rank B21 != n2".into()));
        }
        if rank_of(&self.b_block(3, 2), tol) != d.n(3) {
            return Err(Error::CondensedFormCheck("rank B32 != n3".into()));
        }
        if rank_of(&self.a_block(5, 5), tol) != d.n(5) {
            return Err(Error::CondensedFormCheck("rank (J55 - R55) != n5".into()));
        }

        // leading compound has full row rank and E44 is positive definite
        let top = d.range_span(1, 4);
        let compound = hstack(&[
            &self.e_c.slice(s![top.clone(), top.clone()]).to_owned(),
            &self.b_c.slice(s![top.clone(), ..]).to_owned(),
        ]);
        let want = d.n(1) + d.n(2) + d.n(3) + d.n(4);
        if rank_of(&compound, tol) != want {
            return Err(Error::CondensedFormCheck(format!(
                "leading [E B] compound rank {} != n1+n2+n3+n4 = {want}",
                rank_of(&compound, tol)
            )));
        }
        let e44 = self.e_block(4, 4);
        if !psd_check(&e44, tol)?.is_pd {
            return Err(Error::CondensedFormCheck("E44 not positive definite".into()));
        }

        // reconstruction
        let back_e = mm(&self.u, &mm(&self.e_c, &dagger(&self.u)));
        let a = &sys.j - &sys.r;
        let back_a = mm(&self.u, &mm(&self.a_c, &dagger(&self.u)));
        let back_b = mm(&self.u, &mm(&self.b_c, &dagger(&self.v)));
        for (name, got, wanted) in [
            ("E", &back_e, &sys.e),
            ("A", &back_a, &a),
            ("B", &back_b, &sys.b),
        ] {
            let r = linalg::rel_diff(got, wanted);
            if r > tol.equality_tol {
                return Err(Error::CondensedFormCheck(format!(
                    "reconstruction of {name} off by {r:.3e}"
                )));
            }
        }

        // E_c Hermitian; A_c + A_c^H reproduces -2 U^H R U
        let herm_resid = fro_norm(&(&self.e_c - &dagger(&self.e_c)));
        if herm_resid > tol.equality_tol * e_scale {
            return Err(Error::CondensedFormCheck("E_c not Hermitian".into()));
        }
        let sym = &self.a_c + &dagger(&self.a_c);
        let rr = mm(&dagger(&self.u), &mm(&sys.r, &self.u)).mapv(|z| z * -2.0);
        let sym_resid = fro_norm(&(&sym - &rr));
        if sym_resid > tol.equality_tol * a_scale.max(fro_norm(&rr)) {
            return Err(Error::CondensedFormCheck(
                "A_c + A_c^H does not match -2 U^H R U".into(),
            ));
        }
        Ok(())
    }
}

/// Computes the unitary condensed form by a deterministic sequence of
/// SVD-based compressions.
pub fn condensed_form(sys: &SimplifiedPhdae, tol: &TolerancePolicy) -> Result<CondensedForm> {
    let report = validate_simplified(sys, tol)?;
    if !report.passed() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name.clone()).collect();
        return Err(Error::InvalidInput(format!(
            "condensed_form requires a valid simplified pHDAE; failing checks: {names:?}"
        )));
    }
    let n = sys.state_dim();
    let m = sys.num_inputs();

    let mut u = ceye(n);
    let mut e = sys.e.clone();
    let mut a = &sys.j - &sys.r;
    let mut b = sys.b.clone();
    // parent scales for all rank decisions inside the staircase; submatrices
    // of unitary transforms of E, A, B never exceed these
    let scale_e = two_norm(&e);
    let scale_a = two_norm(&a);
    let scale_b = two_norm(&b);

    let apply = |u_acc: &mut CMat, e: &mut CMat, a: &mut CMat, b: &mut CMat, q: &CMat| {
        let qh = dagger(q);
        *e = mm(&qh, &mm(e, q));
        *a = mm(&qh, &mm(a, q));
        *b = mm(&qh, b);
        *u_acc = mm(u_acc, q);
    };

    // Step 1: compress the rows of B.
    let c1 = row_compress(&b, tol);
    let mu1 = c1.rank;
    apply(&mut u, &mut e, &mut a, &mut b, &c1.q);

    // Step 2: split the trailing E block into a definite part and its kernel.
    let e22 = e.slice(s![mu1.., mu1..]).to_owned();
    let mu2;
    {
        let (vals, vecs) = linalg::eigh(&e22);
        let dim = e22.nrows();
        let vmax = vals.iter().cloned().fold(0.0_f64, f64::max).max(scale_e);
        let cutoff = tol.rank_rel * vmax * dim.max(1) as f64;
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
        let mut q2 = czeros(dim, dim);
        for (kc, &ko) in order.iter().enumerate() {
            q2.column_mut(kc).assign(&vecs.column(ko));
        }
        mu2 = vals.iter().filter(|&&v| v > cutoff).count();
        let q2_full = embed(n, mu1, &q2);
        apply(&mut u, &mut e, &mut a, &mut b, &q2_full);
    }

    // Step 3: compress the trailing (J - R) block.
    let t = mu1 + mu2;
    let a33 = a.slice(s![t.., t..]).to_owned();
    let c3 = row_compress_scaled(&a33, tol, scale_a);
    let n5 = c3.rank;
    let n6 = n - t - n5;
    {
        let q3_full = embed(n, t, &c3.q);
        apply(&mut u, &mut e, &mut a, &mut b, &q3_full);
    }

    // Step 4a: split the leading t rows by their coupling to block 6.
    let j6 = a.slice(s![..t, n - n6..]).to_owned();
    let c4 = row_compress_scaled(&j6, tol, scale_a);
    let q_top = c4.rank; // = n1 + n2
    {
        let w1_full = embed_leading(n, t, &c4.q);
        apply(&mut u, &mut e, &mut a, &mut b, &w1_full);
    }

    // Step 4b: inside the bottom group, compress B rows to isolate n3.
    let b_bot = b.slice(s![q_top..t, ..]).to_owned();
    let c5 = row_compress_scaled(&b_bot, tol, scale_b);
    let n3 = c5.rank;
    let n4 = t - q_top - n3;
    {
        let mut w2_full = ceye(n);
        w2_full
            .slice_mut(s![q_top..t, q_top..t])
            .assign(&c5.q);
        apply(&mut u, &mut e, &mut a, &mut b, &w2_full);
    }

    // Step 4c: input transformation putting the nonsingular part of the
    // compressed B rows into the trailing n3 columns.
    let b3 = b.slice(s![q_top..q_top + n3, ..]).to_owned();
    let cv = col_compress_zeros_first_scaled(&b3, tol, scale_b);
    let v = cv.q;
    b = mm(&b, &v);

    // Step 4d: split the top group by the leading input columns of B.
    let b_top_left = b.slice(s![..q_top, ..m - n3]).to_owned();
    let c6 = row_compress_zeros_first_scaled(&b_top_left, tol, scale_b);
    let n2 = c6.rank;
    let n1 = q_top - n2;
    {
        let w3_full = embed_leading(n, q_top, &c6.q);
        apply(&mut u, &mut e, &mut a, &mut b, &w3_full);
        // the input transform must not be re-applied; undo the B update from
        // `apply` and redo it column-only
        // (apply multiplied b on the left only, which is what we want)
    }

    let dims = Dims([n1, n2, n3, n4, n5, n6]);
    let cf = CondensedForm {
        u,
        v,
        dims,
        e_c: e,
        a_c: a,
        b_c: b,
        m,
    };
    cf.check_invariants(sys, tol)?;
    Ok(cf)
}

/// diag(I_offset, q, I_rest)
fn embed(n: usize, offset: usize, q: &CMat) -> CMat {
    let k = q.nrows();
    let mut out = ceye(n);
    out.slice_mut(s![offset..offset + k, offset..offset + k])
        .assign(q);
    out
}

/// diag(q, I_rest) for a block acting on the leading `k` rows.
fn embed_leading(n: usize, k: usize, q: &CMat) -> CMat {
    assert_eq!(q.nrows(), k);
    let mut out = ceye(n);
    out.slice_mut(s![..k, ..k]).assign(q);
    out
}

// ---------------------------------------------------------------------------
// scaled (non-unitary) condensed form
// ---------------------------------------------------------------------------

/// Non-unitary refinement achieved by block Gaussian elimination: additional
/// zero blocks in E, A and B, a positive definite E11, and S B = T^H B.
#[derive(Debug, Clone)]
pub struct ScaledForm {
    pub s: CMat,
    pub t: CMat,
    pub v: CMat,
    pub e: CMat,
    pub a: CMat,
    pub b: CMat,
    pub dims: Dims,
    pub m: usize,
}

impl ScaledForm {
    pub fn e_block(&self, i: usize, j: usize) -> CMat {
        self.e
            .slice(s![self.dims.range(i), self.dims.range(j)])
            .to_owned()
    }
    pub fn a_block(&self, i: usize, j: usize) -> CMat {
        self.a
            .slice(s![self.dims.range(i), self.dims.range(j)])
            .to_owned()
    }
    pub fn input_range(&self, group: usize) -> std::ops::Range<usize> {
        let n3 = self.dims.n(3);
        match group {
            1 => 0..self.m - n3,
            2 => self.m - n3..self.m,
            _ => panic!("input group must be 1 or 2"),
        }
    }
    pub fn b_block(&self, i: usize, group: usize) -> CMat {
        self.b
            .slice(s![self.dims.range(i), self.input_range(group)])
            .to_owned()
    }
}

fn conditioning_pivot(name: &str, m: &CMat, tol: &TolerancePolicy) -> Result<CMat> {
    if m.nrows() == 0 {
        return Ok(czeros(0, 0));
    }
    let d = rank_detail(m, tol);
    if d.rank < m.nrows().min(m.ncols()) || m.nrows() != m.ncols() {
        return Err(Error::Conditioning {
            context: name.to_string(),
            smin: d.sigma_dropped.max(d.sigma_kept.min(1e300)).min(d.sigma_kept),
            threshold: d.cutoff,
        });
    }
    Ok(m.clone())
}

/// Block Gaussian elimination from the unitary condensed form. The pivots
/// E44, A55, B32 and E11 must be numerically nonsingular.
pub fn scaled_condensed_form(cf: &CondensedForm, tol: &TolerancePolicy) -> Result<ScaledForm> {
    let d = cf.dims;
    let n = cf.state_dim();
    let mut e = cf.e_c.clone();
    let mut a = cf.a_c.clone();
    let mut b = cf.b_c.clone();
    let mut s_acc = ceye(n);
    let mut t_acc = ceye(n);

    // Stage 1: eliminate the couplings of block 4 in E (congruence).
    {
        let e44 = conditioning_pivot("E44", &cf.e_block(4, 4), tol)?;
        if d.n(4) > 0 {
            let mut s1 = ceye(n);
            for i in 1..=3 {
                if d.n(i) == 0 {
                    continue;
                }
                let ei4 = e.slice(s![d.range(i), d.range(4)]).to_owned();
                let x = solve_mat(&dagger(&e44), &dagger(&ei4))?; // (Ei4 E44^-1)^H
                let xh = dagger(&x).mapv(|z| -z);
                s1.slice_mut(s![d.range(i), d.range(4)]).assign(&xh);
            }
            let s1h = dagger(&s1);
            e = mm(&s1, &mm(&e, &s1h));
            a = mm(&s1, &mm(&a, &s1h));
            b = mm(&s1, &b);
            s_acc = mm(&s1, &s_acc);
            t_acc = mm(&t_acc, &s1h);
        }
    }

    // Stage 2: eliminate the couplings of block 5 in A (non-congruent pair),
    // legal because the corresponding rows and columns of E and B are zero.
    if d.n(5) > 0 {
        let a55 = conditioning_pivot("A55", &a.slice(s![d.range(5), d.range(5)]).to_owned(), tol)?;
        let mut s2 = ceye(n);
        let mut t2 = ceye(n);
        for i in 1..=4 {
            if d.n(i) == 0 {
                continue;
            }
            let ai5 = a.slice(s![d.range(i), d.range(5)]).to_owned();
            let x = solve_mat(&dagger(&a55), &dagger(&ai5))?;
            s2.slice_mut(s![d.range(i), d.range(5)])
                .assign(&dagger(&x).mapv(|z| -z));
            let a5j = a.slice(s![d.range(5), d.range(i)]).to_owned();
            let y = solve_mat(&a55, &a5j)?;
            t2.slice_mut(s![d.range(5), d.range(i)]).assign(&y.mapv(|z| -z));
        }
        e = mm(&s2, &mm(&e, &t2));
        a = mm(&s2, &mm(&a, &t2));
        b = mm(&s2, &b);
        s_acc = mm(&s2, &s_acc);
        t_acc = mm(&t_acc, &t2);
    }

    // Stage 3: clear the trailing input columns of B rows 1 and 2.
    if d.n(3) > 0 {
        let b32 = conditioning_pivot(
            "B32",
            &b.slice(s![d.range(3), cf.input_range(2)]).to_owned(),
            tol,
        )?;
        let mut s3 = ceye(n);
        for i in 1..=2 {
            if d.n(i) == 0 {
                continue;
            }
            let bi2 = b.slice(s![d.range(i), cf.input_range(2)]).to_owned();
            let x = solve_mat(&dagger(&b32), &dagger(&bi2))?;
            s3.slice_mut(s![d.range(i), d.range(3)])
                .assign(&dagger(&x).mapv(|z| -z));
        }
        let s3h = dagger(&s3);
        e = mm(&s3, &mm(&e, &s3h));
        a = mm(&s3, &mm(&a, &s3h));
        b = mm(&s3, &b);
        s_acc = mm(&s3, &s_acc);
        t_acc = mm(&t_acc, &s3h);
    }

    // Stage 4: eliminate E12 against the now positive definite E11.
    if d.n(1) > 0 && d.n(2) > 0 {
        let e11 = conditioning_pivot("E11", &e.slice(s![d.range(1), d.range(1)]).to_owned(), tol)?;
        let e12 = e.slice(s![d.range(1), d.range(2)]).to_owned();
        let x = solve_mat(&e11, &e12)?; // E11^-1 E12
        let mut s4 = ceye(n);
        s4.slice_mut(s![d.range(2), d.range(1)])
            .assign(&dagger(&x).mapv(|z| -z));
        let s4h = dagger(&s4);
        e = mm(&s4, &mm(&e, &s4h));
        a = mm(&s4, &mm(&a, &s4h));
        b = mm(&s4, &b);
        s_acc = mm(&s4, &s_acc);
        t_acc = mm(&t_acc, &s4h);
    }

    let sf = ScaledForm {
        s: s_acc,
        t: t_acc,
        v: cf.v.clone(),
        e,
        a,
        b,
        dims: d,
        m: cf.m,
    };
    check_scaled_invariants(cf, &sf, tol)?;
    Ok(sf)
}

fn check_scaled_invariants(
    cf: &CondensedForm,
    sf: &ScaledForm,
    tol: &TolerancePolicy,
) -> Result<()> {
    let d = sf.dims;
    let e_scale = fro_norm(&sf.e).max(1e-300);
    let a_scale = fro_norm(&sf.a).max(1e-300);
    let b_scale = fro_norm(&sf.b).max(1e-300);
    let tol_zero = |name: &str, block: &CMat, scale: f64| -> Result<()> {
        let r = fro_norm(block);
        // elimination is non-orthogonal: allow a modest factor over the
        // plain equality tolerance
        if r > 256.0 * tol.equality_tol * scale {
            return Err(Error::CondensedFormCheck(format!(
                "scaled form: {name} not zero (residual {r:.3e}, scale {scale:.3e})"
            )));
        }
        Ok(())
    };

    // E pattern: only (1,1), (1,3), (2,2), (2,3), (3,3), (4,4) blocks
    // (plus Hermitian mirrors) may be nonzero.
    for i in 1..=6usize {
        for j in 1..=6usize {
            let keep = matches!(
                (i, j),
                (1, 1) | (1, 3) | (3, 1) | (2, 2) | (2, 3) | (3, 2) | (3, 3) | (4, 4)
            );
            if !keep {
                tol_zero(&format!("E({i},{j})"), &sf.e_block(i, j), e_scale)?;
            }
        }
    }
    // A pattern: rows/cols 5 decoupled except A55; column 6 rows 3..6 zero.
    for i in 1..=4usize {
        tol_zero(&format!("A({i},5)"), &sf.a_block(i, 5), a_scale)?;
        tol_zero(&format!("A(5,{i})"), &sf.a_block(5, i), a_scale)?;
    }
    for i in 3..=6usize {
        tol_zero(&format!("A({i},6)"), &sf.a_block(i, 6), a_scale)?;
        tol_zero(&format!("A(6,{i})"), &sf.a_block(6, i), a_scale)?;
    }
    tol_zero("A(5,6)", &sf.a_block(5, 6), a_scale)?;
    tol_zero("A(6,5)", &sf.a_block(6, 5), a_scale)?;
    // B pattern: rows 1, 4, 5, 6 zero; row 2 only leading group; row 3 only
    // trailing group.
    for g in [1usize, 2] {
        for i in [1usize, 4, 5, 6] {
            tol_zero(&format!("B({i},{g})"), &sf.b_block(i, g), b_scale)?;
        }
    }
    tol_zero("B(2,2)", &sf.b_block(2, 2), b_scale)?;
    tol_zero("B(3,1)", &sf.b_block(3, 1), b_scale)?;

    // rank conditions
    let a16 = linalg::vstack(&[&sf.a_block(1, 6), &sf.a_block(2, 6)]);
    if rank_of(&a16, tol) != d.n(1) + d.n(2) {
        return Err(Error::CondensedFormCheck(
            "scaled form: rank [A16; A26] != n1 + n2".into(),
        ));
    }
    if rank_of(&sf.b_block(2, 1), tol) != d.n(2) {
        return Err(Error::CondensedFormCheck("scaled form: rank B21 != n2".into()));
    }
    if rank_of(&sf.b_block(3, 2), tol) != d.n(3) {
        return Err(Error::CondensedFormCheck("scaled form: rank B32 != n3".into()));
    }
    if rank_of(&sf.a_block(5, 5), tol) != d.n(5) {
        return Err(Error::CondensedFormCheck("scaled form: rank A55 != n5".into()));
    }

    // definiteness: E11 > 0, E44 > 0, leading 3x3 compound PSD
    if !psd_check(&sf.e_block(1, 1), tol)?.is_pd {
        return Err(Error::CondensedFormCheck("scaled form: E11 not PD".into()));
    }
    if !psd_check(&sf.e_block(4, 4), tol)?.is_pd {
        return Err(Error::CondensedFormCheck("scaled form: E44 not PD".into()));
    }
    let span = d.range_span(1, 3);
    let compound = sf.e.slice(s![span.clone(), span]).to_owned();
    if !psd_check(&compound, tol)?.is_psd {
        return Err(Error::CondensedFormCheck(
            "scaled form: leading 3x3 E compound not PSD".into(),
        ));
    }

    // S B_c = T^H B_c (both equal the scaled B)
    let sb = mm(&sf.s, &cf.b_c);
    let thb = mm(&dagger(&sf.t), &cf.b_c);
    if linalg::rel_diff(&sb, &thb) > 256.0 * tol.equality_tol {
        return Err(Error::CondensedFormCheck("scaled form: S B != T^H B".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// coordinate-free structural indices
// ---------------------------------------------------------------------------

/// One named rank condition with the decisive singular values.
#[derive(Debug, Clone)]
pub struct ConditionCheck {
    pub name: String,
    pub holds: bool,
    pub observed: usize,
    pub required: usize,
    pub sigma_kept: f64,
    pub sigma_dropped: f64,
    pub cutoff: f64,
}

impl ConditionCheck {
    fn from_rank(name: &str, m: &CMat, required: usize, tol: &TolerancePolicy) -> Self {
        let det = rank_detail(m, tol);
        ConditionCheck {
            name: name.to_string(),
            holds: det.rank == required,
            observed: det.rank,
            required,
            sigma_kept: det.sigma_kept.min(1e300),
            sigma_dropped: det.sigma_dropped,
            cutoff: det.cutoff,
        }
    }
}

/// Values of the coordinate-free formulas for the condensed dimensions.
#[derive(Debug, Clone)]
pub struct StructuralIndices {
    pub n1_plus_n4: usize,
    pub n3_plus_n4: usize,
    /// rank(T_inf(B)^H E S_inf(T_inf([E B])^H (J-R))), which equals
    /// rank(E13) + n4 in the scaled condensed coordinates.
    pub rank_e13_plus_n4: usize,
    pub cond1: ConditionCheck,
    pub cond3: ConditionCheck,
}

/// [E B]
pub fn compound_eb(sys: &SimplifiedPhdae) -> CMat {
    hstack(&[&sys.e, &sys.b])
}

/// Rank test rank [E, J-R, B] = n (regularizability by proportional
/// feedback).
pub fn cond1_check(sys: &SimplifiedPhdae, tol: &TolerancePolicy) -> ConditionCheck {
    let a = &sys.j - &sys.r;
    let m = hstack(&[&sys.e, &a, &sys.b]);
    ConditionCheck::from_rank("cond1: rank [E, J-R, B] = n", &m, sys.state_dim(), tol)
}

/// Rank test rank [E, (J-R) S_inf(E), B] = n (regularizability with index at
/// most one by proportional feedback).
pub fn con1_check(sys: &SimplifiedPhdae, tol: &TolerancePolicy) -> ConditionCheck {
    let a = &sys.j - &sys.r;
    let s_inf_e = right_nullspace(&sys.e, tol).basis;
    let mid = mm(&a, &s_inf_e);
    let m = hstack(&[&sys.e, &mid, &sys.b]);
    ConditionCheck::from_rank(
        "con-1: rank [E, (J-R) S_inf(E), B] = n",
        &m,
        sys.state_dim(),
        tol,
    )
}

/// Rank test rank [E, (J-R) S_inf([E; B^H]), B] = n (maximal-rank derivative
/// regularization with index at most one).
pub fn cond11_check(sys: &SimplifiedPhdae, tol: &TolerancePolicy) -> ConditionCheck {
    let a = &sys.j - &sys.r;
    let stacked = linalg::vstack(&[&sys.e, &dagger(&sys.b)]);
    let s_inf = right_nullspace(&stacked, tol).basis;
    let mid = mm(&a, &s_inf);
    let m = hstack(&[&sys.e, &mid, &sys.b]);
    ConditionCheck::from_rank(
        "cond11: rank [E, (J-R) S_inf([E; B^H]), B] = n",
        &m,
        sys.state_dim(),
        tol,
    )
}

/// Evaluates the three coordinate-free dimension formulas plus the rank
/// conditions cond1 and cond3.
pub fn structural_indices(sys: &SimplifiedPhdae, tol: &TolerancePolicy) -> StructuralIndices {
    let a = &sys.j - &sys.r;
    let eb = compound_eb(sys);
    let rank_eb = rank_of(&eb, tol);
    let rank_b = rank_of(&sys.b, tol);
    let n1_plus_n4 = rank_eb - rank_b;

    // n3 + n4 = rank(T_inf((J-R) S_inf([E; B^H]))^H [E B])
    let stacked = linalg::vstack(&[&sys.e, &dagger(&sys.b)]);
    let s_inf = right_nullspace(&stacked, tol).basis;
    let inner = mm(&a, &s_inf);
    let t_inf = left_nullspace(&inner, tol).basis;
    let n3_plus_n4 = rank_of(&mm(&dagger(&t_inf), &eb), tol);

    // rank(E13) + n4 = rank(T_inf(B)^H E S_inf(T_inf([E B])^H (J-R)))
    let t_inf_b = left_nullspace(&sys.b, tol).basis;
    let t_inf_eb = left_nullspace(&eb, tol).basis;
    let core = mm(&dagger(&t_inf_eb), &a);
    let s_core = right_nullspace(&core, tol).basis;
    let e13_mat = mm(&dagger(&t_inf_b), &mm(&sys.e, &s_core));
    let rank_e13_plus_n4 = rank_of(&e13_mat, tol);

    let cond1 = cond1_check(sys, tol);
    let cond3 = ConditionCheck {
        name: "cond3: rank(T_inf(B)^H E S_inf(T_inf([E B])^H (J-R))) = rank [E B] - rank B"
            .into(),
        holds: rank_e13_plus_n4 == n1_plus_n4,
        observed: rank_e13_plus_n4,
        required: n1_plus_n4,
        sigma_kept: f64::MAX.min(1e300),
        sigma_dropped: 0.0,
        cutoff: 0.0,
    };

    StructuralIndices {
        n1_plus_n4,
        n3_plus_n4,
        rank_e13_plus_n4,
        cond1,
        cond3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::simplified_from_real;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn scalar_systems_land_in_block_three() {
        // E = 0, J = 0, R = 0, B = 1: the single state is the B-governed
        // algebraic block; forced by rank [J16; J26] = n1 + n2 with n6 = 0.
        let sys = simplified_from_real(1, 1, &[0.0], &[0.0], &[0.0], &[1.0]);
        let cf = condensed_form(&sys, &tol()).unwrap();
        assert_eq!(cf.dims, Dims([0, 0, 1, 0, 0, 0]));

        let sys = simplified_from_real(1, 1, &[1.0], &[0.0], &[1.0], &[1.0]);
        let cf = condensed_form(&sys, &tol()).unwrap();
        assert_eq!(cf.dims, Dims([0, 0, 1, 0, 0, 0]));
        assert!((cf.e_block(3, 3)[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((cf.b_block(3, 2)[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((cf.a_block(3, 3)[(0, 0)].re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_with_one_sided_input() {
        let sys = simplified_from_real(
            2,
            1,
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, -1.0, 0.0],
            &[0.0; 4],
            &[1.0, 0.0],
        );
        let cf = condensed_form(&sys, &tol()).unwrap();
        assert_eq!(cf.dims, Dims([0, 1, 0, 0, 0, 1]));
        let si = structural_indices(&sys, &tol());
        assert_eq!(si.n1_plus_n4, 0);
        assert_eq!(si.n3_plus_n4, 0);
        assert!(si.cond1.holds);
    }

    #[test]
    fn structural_indices_full_rank_e() {
        // E = I: n1 + n4 = n - m
        let sys = simplified_from_real(
            3,
            1,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            &[0.0; 9],
            &[0.0; 9],
            &[1.0, 0.0, 0.0],
        );
        let si = structural_indices(&sys, &tol());
        assert_eq!(si.n1_plus_n4, 2);
        let cf = condensed_form(&sys, &tol()).unwrap();
        assert_eq!(cf.dims.n(1) + cf.dims.n(4), 2);
        assert_eq!(cf.dims, Dims([0, 0, 1, 2, 0, 0]));

        // E = 0, full column rank B
        let sys = simplified_from_real(1, 1, &[0.0], &[0.0], &[0.0], &[2.0]);
        let si = structural_indices(&sys, &tol());
        assert_eq!(si.n1_plus_n4, 0);
    }

    #[test]
    fn scaled_form_scalar_identity() {
        let sys = simplified_from_real(1, 1, &[1.0], &[0.0], &[1.0], &[1.0]);
        let cf = condensed_form(&sys, &tol()).unwrap();
        let sf = scaled_condensed_form(&cf, &tol()).unwrap();
        assert!(linalg::rel_diff(&sf.s, &ceye(1)) < 1e-12);
        assert!(linalg::rel_diff(&sf.t, &ceye(1)) < 1e-12);
        assert!((sf.e[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_system_is_total() {
        let sys = simplified_from_real(0, 0, &[], &[], &[], &[]);
        let cf = condensed_form(&sys, &tol()).unwrap();
        assert_eq!(cf.dims.sum(), 0);
        let sf = scaled_condensed_form(&cf, &tol()).unwrap();
        assert_eq!(sf.e.dim(), (0, 0));
        let si = structural_indices(&sys, &tol());
        assert_eq!(si.n1_plus_n4, 0);
        assert_eq!(si.n3_plus_n4, 0);
        assert!(si.cond1.holds);
        assert!(si.cond3.holds);
    }
}
