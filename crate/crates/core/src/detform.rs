//! Closed-form determinant assembly for the contravariant form on Verma
//! modules: the generic linear factors attached to affine root towers, the
//! extra factor for the odd middle vector, the level prefactor, and the
//! partition-function exponents, together with the odd-isotropic collapse
//! and the double-root cancellation.
//!
//! Everything is exact: factor expressions are multivariate polynomials in
//! `h, j, j'` whose coefficients are rational functions of the level `k`;
//! determinants are expanded only after substituting a sampled rational
//! level, so the result is an honest polynomial with big-rational
//! coefficients.

use num_traits::{One, Signed, Zero};
use std::ops::{Div, Mul};

use crate::partition::{Eta, Partitions, RootCopy};
use crate::poly::{k_plus, MPoly, Mono, RatFn, VH, VJ, VJP};
use crate::rootdata::{AffTower, RootDatum};
use crate::scalar::{binom2, q, qi};
use crate::Q;

/// Factor expressions: polynomials in `h, j, j'` over rational functions
/// of the level.
pub type FPoly = MPoly<RatFn>;

fn fconst(c: RatFn) -> FPoly {
    MPoly::constant(c)
}

fn fq(c: Q) -> FPoly {
    MPoly::constant(RatFn::from_q(c))
}

/// Coordinates of `lambda_nat + gamma_half - gamma'` on the restricted
/// basis, as linear polynomials in `j`, `j'`.
pub fn lambda_tilde(datum: &RootDatum) -> Vec<FPoly> {
    let nn = datum.nat_names.len();
    let mut out = Vec::with_capacity(nn);
    for i in 0..nn {
        let (cj, cjp) = datum.lambda_nat[i].clone();
        let mut p = FPoly::zero();
        p.add_term(Mono::var(VJ), RatFn::from_q(cj));
        p.add_term(Mono::var(VJP), RatFn::from_q(cjp));
        p.add_term(
            Mono::unit(),
            RatFn::from_q(datum.gamma_half_nat[i].clone() - &datum.gamma_prime_nat[i]),
        );
        out.push(p);
    }
    out
}

fn pair_fpoly(datum: &RootDatum, u: &[FPoly], v: &[FPoly]) -> FPoly {
    let mut out = FPoly::zero();
    for (i, a) in u.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            let g = RatFn::from_q(datum.nat_gram[i][j].clone());
            out = out.add(&a.mul(b).scale(&g));
        }
    }
    out
}

fn nat_fpoly(nat: &[Q]) -> Vec<FPoly> {
    nat.iter().map(|c| fq(c.clone())).collect()
}

fn norm2_tilde(datum: &RootDatum) -> FPoly {
    let lt = lambda_tilde(datum);
    pair_fpoly(datum, &lt, &lt)
}

fn gamma_prime_norm2(datum: &RootDatum) -> Q {
    datum.nat_pair(&datum.gamma_prime_nat, &datum.gamma_prime_nat)
}

/// The linear factor attached to the affine root `alpha + d delta` and the
/// positive integer `n`, by the grade of `alpha`.
pub fn phi_factor(datum: &RootDatum, tower: &AffTower, d: &Q, n: i64) -> FPoly {
    let hv = datum.h_vee.clone();
    let lt = lambda_tilde(datum);
    let alpha = nat_fpoly(&tower.nat);
    let pair_la = pair_fpoly(datum, &lt, &alpha);
    let nq = qi(n);
    if tower.x_eval.is_zero() {
        // d (k + hv) + (lambda~ | alpha) - (n/2) |alpha|^2
        let mut out = fconst(k_plus(hv).mul(RatFn::from_q(d.clone())));
        out = out.add(&pair_la);
        out = out.add(&fq(-nq * &tower.norm2 / qi(2)));
        out
    } else if tower.x_eval == q(1, 2) {
        // h - (1/(k+hv)) [ B^2 + |l~|^2/2 - (k+1-eps/2)^2/4 - |g'|^2/2 ] - s_g - s_gh
        let b = fq(nq.clone() * &tower.norm2 / qi(2))
            .sub(&fconst(k_plus(hv.clone()).mul(RatFn::from_q(d.clone() + q(1, 2)))))
            .sub(&pair_la);
        let kk = k_plus(Q::one() - qi(datum.epsilon as i64) / qi(2));
        let mut bracket = b.mul(&b);
        bracket = bracket.add(&norm2_tilde(datum).scale(&RatFn::from_q(q(1, 2))));
        bracket = bracket.add(&fconst(kk.clone().mul(kk).mul(RatFn::from_q(q(-1, 4)))));
        bracket = bracket.add(&fq(-gamma_prime_norm2(datum) / qi(2)));
        let inv = RatFn::one().div(k_plus(datum.h_vee.clone()));
        FPoly::var(VH)
            .sub(&bracket.scale(&inv))
            .sub(&fconst(datum.s_g_gh()))
    } else if tower.x_eval == Q::one() {
        // h - (1/(4(k+hv))) [ (n-(d+1)(k+hv))^2 + 2|l~|^2 - (k+1-eps/2)^2 - 2|g'|^2 ]
        //   - s_g - s_gh
        let b = fq(nq).sub(&fconst(k_plus(hv.clone()).mul(RatFn::from_q(d.clone() + Q::one()))));
        let kk = k_plus(Q::one() - qi(datum.epsilon as i64) / qi(2));
        let mut bracket = b.mul(&b);
        bracket = bracket.add(&norm2_tilde(datum).scale(&RatFn::from_q(qi(2))));
        bracket = bracket.add(&fconst(kk.clone().mul(kk).neg_r()));
        bracket = bracket.add(&fq(-gamma_prime_norm2(datum) * qi(2)));
        let inv = RatFn::one().div(k_plus(datum.h_vee.clone()).mul(RatFn::from_q(qi(4))));
        FPoly::var(VH)
            .sub(&bracket.scale(&inv))
            .sub(&fconst(datum.s_g_gh()))
    } else {
        panic!("factor grades must be 0, 1/2 or 1; got {}", tower.x_eval);
    }
}

trait NegR {
    fn neg_r(self) -> RatFn;
}
impl NegR for RatFn {
    fn neg_r(self) -> RatFn {
        RatFn::zero() - self
    }
}

/// Eigenvalue polynomial of the squared odd zero mode, in the simplified
/// form valid when the even Killing form is proportional to the invariant
/// form on the centralizer.
pub fn phi_zero_simplified(datum: &RootDatum) -> FPoly {
    let data = datum.phi0.as_ref().expect("family has no odd middle vector");
    let hv = datum.h_vee.clone();
    let hv0 = data.h_vee_0.clone();
    let s_dd: Q = data.s_dd.iter().map(|(p, s)| p.sign_q() * binom2(s)).sum();
    let gdiff = {
        // |gamma_half - gamma'|^2
        let d: Vec<Q> = datum
            .gamma_half_nat
            .iter()
            .zip(&datum.gamma_prime_nat)
            .map(|(a, b)| a.clone() - b)
            .collect();
        datum.nat_pair(&d, &d)
    };
    let mut bracket = norm2_tilde(datum);
    bracket = bracket.add(&fq(-gdiff));
    bracket = bracket.add(&fq((hv.clone() + &hv0) / qi(2) * &s_dd));
    let kk = k_plus(q(1, 2));
    bracket = bracket.add(&fconst(kk.clone().mul(kk).mul(RatFn::from_q(q(-1, 2)))));
    bracket = bracket.add(&fq(hv.clone() * (hv.clone() - Q::one()) / qi(3) + q(1, 8)));
    bracket = bracket.add(&fq(
        -(hv.clone() - &hv0) / qi(24) * (data.sdim_g0.clone() + &data.sdim_ghalf),
    ));
    let inv = RatFn::one().div(k_plus(hv.clone()).mul(RatFn::from_q(qi(2))));
    FPoly::var(VH)
        .sub(&bracket.scale(&inv))
        .add(&fq(s_dd / qi(2) + hv / qi(8)))
}

/// Inputs for the general eigenvalue formula: the shifted-cocycle traces.
pub struct GeneralPhiZeroInputs {
    /// Sum of beta_k(h_i, h^i) over dual bases of the restricted Cartan.
    pub beta_cartan_sum: RatFn,
    /// Per kernel-index data: (parity, s, beta_k(u, u-dual)).
    pub s_dd_terms: Vec<(crate::liealg::Parity, Q, RatFn)>,
}

impl GeneralPhiZeroInputs {
    /// Traces under the proportional-Killing-form assumption:
    /// every beta value equals `k + (hv - hv0)/2`.
    pub fn from_proportional(datum: &RootDatum) -> GeneralPhiZeroInputs {
        let data = datum.phi0.as_ref().expect("family has no odd middle vector");
        let beta = k_plus((datum.h_vee.clone() - &data.h_vee_0) / qi(2));
        GeneralPhiZeroInputs {
            beta_cartan_sum: beta
                .clone()
                .mul(RatFn::from_q(qi(datum.nat_names.len() as i64))),
            s_dd_terms: data
                .s_dd
                .iter()
                .map(|(p, s)| (*p, s.clone(), beta.clone()))
                .collect(),
        }
    }
}

/// Eigenvalue polynomial of the squared odd zero mode, general form with
/// explicitly supplied traces.
pub fn phi_zero_general(datum: &RootDatum, inputs: &GeneralPhiZeroInputs) -> FPoly {
    let hv = datum.h_vee.clone();
    let gdiff = {
        let d: Vec<Q> = datum
            .gamma_half_nat
            .iter()
            .zip(&datum.gamma_prime_nat)
            .map(|(a, b)| a.clone() - b)
            .collect();
        datum.nat_pair(&d, &d)
    };
    let mut bracket = norm2_tilde(datum);
    bracket = bracket.add(&fq(-gdiff));
    let mut beta_dd = RatFn::zero();
    let mut beta_dd_weighted = RatFn::zero();
    for (p, s, beta) in &inputs.s_dd_terms {
        beta_dd = beta_dd + RatFn::from_q(p.sign_q()).mul(beta.clone());
        beta_dd_weighted =
            beta_dd_weighted + RatFn::from_q(p.sign_q() * binom2(s)).mul(beta.clone());
    }
    bracket = bracket.sub(&fconst(beta_dd_weighted));
    let inv2 = RatFn::one().div(k_plus(hv.clone()).mul(RatFn::from_q(qi(2))));
    let inv24 = RatFn::one().div(k_plus(hv).mul(RatFn::from_q(qi(24))));
    let tail = inputs.beta_cartan_sum.clone() + beta_dd;
    FPoly::var(VH)
        .sub(&bracket.scale(&inv2))
        .sub(&fconst(tail.mul(inv24)))
        .sub(&fconst(datum.central_charge().mul(RatFn::from_q(q(1, 24)))))
}

/// The conjectural closed form of the extra factor: the grade-one factor
/// formula continued to the half-step position.
pub fn phi_zero_conjecture(datum: &RootDatum) -> FPoly {
    let mut bracket = norm2_tilde(datum);
    let kk = k_plus(q(1, 2));
    bracket = bracket.add(&fconst(kk.clone().mul(kk).mul(RatFn::from_q(q(-1, 2)))));
    bracket = bracket.add(&fq(-gamma_prime_norm2(datum)));
    let inv = RatFn::one().div(k_plus(datum.h_vee.clone()).mul(RatFn::from_q(qi(2))));
    FPoly::var(VH)
        .sub(&bracket.scale(&inv))
        .sub(&fconst(datum.s_g_gh()))
}

/// The coefficient of the quadratic term in the bracket of two odd
/// generators, simplified form (proportional Killing form).
pub fn gamma_k_simplified(g_uv: &Q, datum: &RootDatum) -> RatFn {
    let data = datum.phi0.as_ref().expect("family has no odd middle vector");
    let hv = datum.h_vee.clone();
    let hv0 = data.h_vee_0.clone();
    let c = datum.central_charge();
    let inner = k_plus(hv.clone()).mul(c)
        - k_plus((hv - hv0) / qi(2))
            .mul(RatFn::from_q(data.sdim_g0.clone() + &data.sdim_ghalf));
    RatFn::from_q(-g_uv.clone()).mul(inner)
}

/// Same coefficient from explicitly supplied traces.
pub fn gamma_k_general(
    g_uv: &Q,
    c_k: &RatFn,
    h_vee: &Q,
    beta_centralizer_sum: &RatFn,
    beta_cross_sum: &RatFn,
) -> RatFn {
    RatFn::from_q(-g_uv.clone()).mul(k_plus(h_vee.clone())).mul(c_k.clone())
        + RatFn::from_q(g_uv.clone()).mul(beta_centralizer_sum.clone())
        + RatFn::from_q(qi(2)).mul(beta_cross_sum.clone())
}

/// One assembled determinant factor.
#[derive(Clone, Debug)]
pub struct DetFactor {
    pub label: String,
    pub expr: FPoly,
    pub exponent: i64,
}

/// The determinant of one weight space as a factored product, up to a
/// nonzero constant.
#[derive(Clone, Debug)]
pub struct FactoredDeterminant {
    pub family: String,
    pub eta: Eta,
    pub factors: Vec<DetFactor>,
}

impl FactoredDeterminant {
    /// Total degree in `h`: the sum of exponents of `h`-carrying factors.
    pub fn h_degree(&self) -> i64 {
        self.factors
            .iter()
            .filter(|f| f.expr.degree_in(VH) > 0)
            .map(|f| f.exponent * f.expr.degree_in(VH) as i64)
            .sum()
    }

    /// Rational poles of the factor coefficients (denominator roots are
    /// only ever at shifted levels, so linear denominators suffice).
    pub fn has_pole_at(&self, k: &Q) -> bool {
        self.factors.iter().any(|f| {
            f.expr
                .terms()
                .any(|(_, c)| c.has_pole_at(k))
        })
    }
}

/// Builds the factored determinant of the weight space `eta`.
pub fn assemble(datum: &RootDatum, parts: &Partitions, eta: &Eta) -> FactoredDeterminant {
    let mut factors: Vec<DetFactor> = Vec::new();
    let nat_dim = datum.nat_names.len();

    // extra factor for the odd middle vector
    if datum.epsilon == 1 {
        let e = parts.p_prime(eta) as i64;
        if e > 0 {
            factors.push(DetFactor {
                label: "phi0".into(),
                expr: phi_zero_simplified(datum),
                exponent: e,
            });
        }
    }

    // level prefactor over the printed imaginary towers
    let hv = datum.h_vee.clone();
    let mut pre_exp: i64 = 0;
    for (off, mult) in &datum.prefactor_im {
        let mut m = off.clone();
        while m <= eta.level {
            let mut n = 1i64;
            while m.clone() * qi(n) <= eta.level {
                let shifted = Eta {
                    level: eta.level.clone() - m.clone() * qi(n),
                    nat: eta.nat.clone(),
                };
                pre_exp += (*mult as i64) * parts.p(&shifted) as i64;
                n += 1;
            }
            m += Q::one();
        }
    }
    if datum.extra_reduced_prefactor {
        // the extra reduced sum over odd integer-level roots
        let mut m = Q::one();
        while m <= eta.level {
            let removed = RootCopy {
                level: m.clone(),
                nat: vec![Q::zero(); nat_dim],
                parity: crate::liealg::Parity::Odd,
            };
            let shifted = Eta { level: eta.level.clone() - &m, nat: eta.nat.clone() };
            pre_exp += parts.p_reduced(&removed, &shifted) as i64;
            m += Q::one();
        }
    }
    if pre_exp > 0 {
        let label = if hv.is_zero() { "k".to_string() } else { format!("k+{hv}") };
        factors.push(DetFactor {
            label,
            expr: fconst(k_plus(hv.clone())),
            exponent: pre_exp,
        });
    }

    // real towers
    for t in &datum.pp {
        let isotropic_odd = t.parity.is_odd() && t.norm2.is_zero();
        let mut d = t.delta0.clone();
        while d.clone() + &t.x_eval <= eta.level {
            // double-root cancellation, instance by instance: an even root
            // that is twice an odd one pairs off against the even-index
            // factors of its half; the half keeps only odd indices
            if !t.parity.is_odd() && has_half_instance(datum, t, &d) {
                d += Q::one();
                continue;
            }
            let odd_only = t.parity.is_odd() && has_double_instance(datum, t, &d);
            assert!(
                !(isotropic_odd && odd_only),
                "isotropic odd root with a doubled root is unsupported"
            );
            let w_level = d.clone() + &t.x_eval;
            let w = Eta { level: w_level.clone(), nat: t.nat.clone() };
            if isotropic_odd {
                // n-independent factor with a reduced-partition exponent
                let removed =
                    RootCopy { level: w_level.clone(), nat: t.nat.clone(), parity: t.parity };
                let shifted = Eta {
                    level: eta.level.clone() - &w.level,
                    nat: eta.nat.iter().zip(&w.nat).map(|(a, b)| a.clone() - b).collect(),
                };
                if shifted.level >= Q::zero() {
                    let e = parts.p_reduced(&removed, &shifted) as i64;
                    if e > 0 {
                        factors.push(DetFactor {
                            label: format!("phi[{}d+{},1]", d, t.label),
                            expr: phi_factor(datum, t, &d, 1),
                            exponent: e,
                        });
                    }
                }
            } else {
                let mut n = 1i64;
                loop {
                    let shifted_level = eta.level.clone() - w.level.clone() * qi(n);
                    if shifted_level < Q::zero() {
                        break;
                    }
                    if w.level.is_zero() && n > charge_reach_bound(parts, eta, &w) {
                        break;
                    }
                    let keep = !odd_only || n % 2 == 1;
                    if keep {
                        let sign: i64 = if t.parity.is_odd() && n % 2 == 0 { -1 } else { 1 };
                        let shifted = Eta {
                            level: shifted_level,
                            nat: eta
                                .nat
                                .iter()
                                .zip(&w.nat)
                                .map(|(a, b)| a.clone() - b.clone() * qi(n))
                                .collect(),
                        };
                        let e = sign * parts.p(&shifted) as i64;
                        if e != 0 {
                            factors.push(DetFactor {
                                label: format!("phi[{}d+{},{}]", d, t.label, n),
                                expr: phi_factor(datum, t, &d, n),
                                exponent: e,
                            });
                        }
                    }
                    n += 1;
                }
            }
            d += Q::one();
        }
    }

    FactoredDeterminant { family: datum.family.clone(), eta: eta.clone(), factors }
}

/// True if the doubled root `2 alpha + 2d delta` is present: the tower of
/// `2 alpha` contains the delta coordinate `2d`.
fn has_double_instance(datum: &RootDatum, t: &AffTower, d: &Q) -> bool {
    let combo2: Vec<Q> = t.combo.iter().map(|c| c.clone() * qi(2)).collect();
    datum.pp.iter().any(|u| {
        u.combo == combo2 && {
            let diff = d.clone() * qi(2) - &u.delta0;
            diff.is_integer() && !diff.is_negative()
        }
    })
}

/// True if the root `alpha + d delta` is twice an odd root in the system:
/// some odd tower of `alpha/2` contains the coordinate `d/2`.
fn has_half_instance(datum: &RootDatum, t: &AffTower, d: &Q) -> bool {
    let half: Vec<Q> = t.combo.iter().map(|c| c.clone() / qi(2)).collect();
    datum.pp.iter().any(|u| {
        u.parity.is_odd() && u.combo == half && {
            let diff = d.clone() / qi(2) - &u.delta0;
            diff.is_integer() && !diff.is_negative()
        }
    })
}

/// Bound on the factor index for pure-charge roots: beyond the reachable
/// charge extent the exponents vanish.
fn charge_reach_bound(parts: &Partitions, eta: &Eta, w: &Eta) -> i64 {
    use num_traits::ToPrimitive;
    let j = w.nat.iter().position(|c| !c.is_zero()).expect("charged root");
    let reach = parts.charge_extent(j);
    let num = eta.nat[j].abs() + reach;
    (num / w.nat[j].abs()).floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

/// Result of specializing a factored determinant at a sampled level.
#[derive(Clone, Debug)]
pub struct ExpandedDet {
    /// Product of the nonnegative-exponent factors.
    pub num: MPoly<Q>,
    /// Product of factors carried with negative exponents (usually 1).
    pub den: MPoly<Q>,
    pub factors: Vec<(String, MPoly<Q>, i64)>,
}

/// Expands the determinant at the sampled level; fails on a pole.
pub fn expand_at(det: &FactoredDeterminant, k: &Q) -> Result<ExpandedDet, String> {
    let mut num = MPoly::<Q>::one();
    let mut den = MPoly::<Q>::one();
    let mut specialized = Vec::new();
    for f in &det.factors {
        let mut p = MPoly::<Q>::zero();
        for (m, c) in f.expr.terms() {
            match c.eval(k) {
                Some(v) => p.add_term(*m, v),
                None => return Err(format!("factor {} has a pole at k = {k}", f.label)),
            }
        }
        if p.is_zero() {
            return Err(format!("factor {} vanishes identically at k = {k}", f.label));
        }
        specialized.push((f.label.clone(), p.clone(), f.exponent));
        if f.exponent >= 0 {
            num = num.mul(&p.pow(f.exponent as u32));
        } else {
            den = den.mul(&p.pow((-f.exponent) as u32));
        }
    }
    Ok(ExpandedDet { num, den, factors: specialized })
}
