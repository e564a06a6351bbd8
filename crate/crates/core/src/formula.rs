//! Closed Dyck-path formula for torus knots and the normalization turning
//! the triply graded series into a knot invariant.

use serde::Serialize;

use crate::dyck::{enumerate_paths, DyckPath, KnotParams};
use crate::error::Result;
use crate::laurent::{ExponentTriple, Invariant, LaurentPoly};

/// `chi = (m-1)(n-1)/2` and the normalizing monomial `(a (qt)^{-1/2})^chi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizationData {
    pub chi: u32,
    pub prefactor: LaurentPoly,
}

impl NormalizationData {
    pub fn new(params: KnotParams) -> Self {
        let chi = chi(params);
        let c = chi as i64;
        Self { chi, prefactor: LaurentPoly::monomial(ExponentTriple::new(c, -c, -c), 1) }
    }
}

pub fn chi(params: KnotParams) -> u32 {
    // one of m, n is odd, so the product is even
    ((params.m() - 1) * (params.n() - 1) / 2) as u32
}

/// `t^area q^hplus prod_{v in v*} (1 - a q^{-k(v)})`.
pub fn path_summand(path: &DyckPath) -> Result<LaurentPoly> {
    let mut out = &LaurentPoly::t_pow(path.area() as i64) * &LaurentPoly::q_pow(path.hplus() as i64);
    for v in path.vstar()? {
        let k = path.k_of(v)? as i64;
        let factor = LaurentPoly::one().try_sub(&LaurentPoly::a().try_mul(&LaurentPoly::q_pow(-k))?)?;
        out = out.try_mul(&factor)?;
    }
    Ok(out)
}

/// Numerator of one path's contribution to the unnormalized series, in the
/// factored form `t^area q^{hplus - chi - sum k(v)} prod (q^{k(v)} - a)`.
pub fn hhh_summand(path: &DyckPath) -> Result<LaurentPoly> {
    let chi = chi(path.params()) as i64;
    let vstar = path.vstar()?;
    let ks = vstar.iter().map(|v| path.k_of(*v).map(i64::from)).collect::<Result<Vec<_>>>()?;
    let qexp = path.hplus() as i64 - chi - ks.iter().sum::<i64>();
    let mut out = &LaurentPoly::t_pow(path.area() as i64) * &LaurentPoly::q_pow(qexp);
    for k in ks {
        out = out.try_mul(&LaurentPoly::q_pow(k).try_sub(&LaurentPoly::a())?)?;
    }
    Ok(out)
}

/// Unnormalized series of the `(m, n)` torus knot as a sum over Dyck paths.
pub fn hhh_direct(params: KnotParams) -> Result<Invariant> {
    let mut num = LaurentPoly::zero();
    for path in enumerate_paths(params) {
        num.try_add_assign(&hhh_summand(&path)?)?;
    }
    Ok(Invariant::new(num, 1))
}

/// The knot invariant in the displayed form of the closed formula.
pub fn invariant_p_display(params: KnotParams) -> Result<Invariant> {
    let norm = NormalizationData::new(params);
    let mut sum = LaurentPoly::zero();
    for path in enumerate_paths(params) {
        sum.try_add_assign(&path_summand(&path)?)?;
    }
    Ok(Invariant::new(norm.prefactor.try_mul(&sum)?, 1))
}

/// The knot invariant `(a q^{1/2} t^{-1/2})^chi * HHH`.
pub fn invariant_p_normalized(params: KnotParams) -> Result<Invariant> {
    let c = chi(params) as i64;
    hhh_direct(params)?.try_mul_poly(&LaurentPoly::mono(c, c, -c))
}

/// The superpolynomial of the `(m, n)` torus knot. Both routes to it are
/// computed and must agree.
pub fn invariant_p(params: KnotParams) -> Result<Invariant> {
    let display = invariant_p_display(params)?;
    let normalized = invariant_p_normalized(params)?;
    if display != normalized {
        return Err(crate::error::KhrError::Internal(format!(
            "{params}: display form {display} differs from normalized series {normalized}"
        )));
    }
    Ok(display)
}

/// Graded Euler characteristic: `(qt)^{1/2} -> -(qt)^{1/2}`.
pub fn euler_characteristic(v: &Invariant) -> Result<Invariant> {
    v.map_numerator(LaurentPoly::euler_sign)
}
