//! Finite-dimensional Lie superalgebras, their twists and triangular data.
//!
//! The two concrete algebras are `spo(2|1)` and `sl(2|1)`, built from
//! explicit 3x3 supermatrices; structure constants, the supertrace form and
//! all algebra axioms (super anticommutativity, super Jacobi, invariance)
//! are verified exactly at construction.  On top of those sit the twist
//! presets (Ramond involution, the `sigma_a` family, the order-two mixing
//! involution with its root-diagonal basis), the triangular choices, the
//! boundary table of `s`-values for every basis element, and the derived
//! reduction constants (`gamma'`, `gamma_1/2`, `s_g`, `s_ne`, `s_ch`).

use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::poly::{PolyK, RatFn};
use crate::scalar::{binom2, q, qi, solve_linear, Scalar, Sqrt};
use crate::Q;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn sign_q(self) -> Q {
        qi(self.sign())
    }

    pub fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

#[derive(Debug)]
pub enum AlgebraError {
    Anticommutativity(usize, usize),
    Jacobi(usize, usize, usize),
    FormNotEven(usize, usize),
    FormNotSupersymmetric(usize, usize),
    FormNotInvariant(usize, usize, usize),
    SlTwoTriple(&'static str),
    AdXNotDiagonal(usize),
    TwistPhases(String),
    Triangular(String),
    Parameter(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::Anticommutativity(i, j) => {
                write!(f, "super anticommutativity fails on basis pair ({i}, {j})")
            }
            AlgebraError::Jacobi(i, j, k) => {
                write!(f, "super Jacobi identity fails on basis triple ({i}, {j}, {k})")
            }
            AlgebraError::FormNotEven(i, j) => {
                write!(f, "bilinear form pairs opposite parities at ({i}, {j})")
            }
            AlgebraError::FormNotSupersymmetric(i, j) => {
                write!(f, "bilinear form not supersymmetric at ({i}, {j})")
            }
            AlgebraError::FormNotInvariant(i, j, k) => {
                write!(f, "([u{i},u{j}]|u{k}) != (u{i}|[u{j},u{k}])")
            }
            AlgebraError::SlTwoTriple(which) => write!(f, "sl2-triple relation {which} fails"),
            AlgebraError::AdXNotDiagonal(i) => {
                write!(f, "ad x does not act diagonally on basis element {i}")
            }
            AlgebraError::TwistPhases(msg) => write!(f, "twist phases invalid: {msg}"),
            AlgebraError::Triangular(msg) => write!(f, "triangular choice invalid: {msg}"),
            AlgebraError::Parameter(msg) => write!(f, "parameter out of range: {msg}"),
        }
    }
}

impl std::error::Error for AlgebraError {}

/// A finite-dimensional Lie superalgebra in a fixed basis, with an even
/// supersymmetric invariant bilinear form and a distinguished sl2-pair.
#[derive(Clone, Debug)]
pub struct LieSuperalgebra {
    pub name: String,
    pub names: Vec<String>,
    pub parity: Vec<Parity>,
    bracket_table: Vec<Vec<Vec<Q>>>,
    pub form: Vec<Vec<Q>>,
    pub cartan: Vec<usize>,
    pub x_coords: Vec<Q>,
    pub f_index: usize,
    pub e_coords: Vec<Q>,
    pub dual_coxeter: Q,
    pub ad_x_eig: Vec<Q>,
}

impl LieSuperalgebra {
    /// Builds and verifies the algebra from raw tables.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        names: Vec<String>,
        parity: Vec<Parity>,
        bracket_table: Vec<Vec<Vec<Q>>>,
        form: Vec<Vec<Q>>,
        cartan: Vec<usize>,
        x_coords: Vec<Q>,
        f_index: usize,
        e_coords: Vec<Q>,
        dual_coxeter: Q,
    ) -> Result<Self, AlgebraError> {
        let n = names.len();
        assert!(parity.len() == n && bracket_table.len() == n && form.len() == n);
        let mut alg = LieSuperalgebra {
            name: name.to_string(),
            names,
            parity,
            bracket_table,
            form,
            cartan,
            x_coords,
            f_index,
            e_coords,
            dual_coxeter,
            ad_x_eig: vec![Q::zero(); n],
        };

        for i in 0..n {
            for j in 0..n {
                // [u_i,u_j] = -(-1)^{p_i p_j}[u_j,u_i]
                let s = if alg.parity[i].is_odd() && alg.parity[j].is_odd() {
                    Q::one()
                } else {
                    -Q::one()
                };
                for l in 0..n {
                    if alg.bracket_table[i][j][l] != s.clone() * &alg.bracket_table[j][i][l] {
                        return Err(AlgebraError::Anticommutativity(i, j));
                    }
                }
            }
        }

        for i in 0..n {
            for j in 0..n {
                for k_ in 0..n {
                    if !alg.jacobi_holds(i, j, k_) {
                        return Err(AlgebraError::Jacobi(i, j, k_));
                    }
                }
            }
        }

        for i in 0..n {
            for j in 0..n {
                if !alg.form[i][j].is_zero() && alg.parity[i] != alg.parity[j] {
                    return Err(AlgebraError::FormNotEven(i, j));
                }
                let s = if alg.parity[i].is_odd() && alg.parity[j].is_odd() {
                    -Q::one()
                } else {
                    Q::one()
                };
                if alg.form[i][j] != s * &alg.form[j][i] {
                    return Err(AlgebraError::FormNotSupersymmetric(i, j));
                }
            }
        }

        for i in 0..n {
            for j in 0..n {
                for k_ in 0..n {
                    // ([u_i,u_j]|u_k) = (u_i|[u_j,u_k])
                    let lhs: Q = (0..n)
                        .map(|l| alg.bracket_table[i][j][l].clone() * &alg.form[l][k_])
                        .sum();
                    let rhs: Q = (0..n)
                        .map(|l| alg.bracket_table[j][k_][l].clone() * &alg.form[i][l])
                        .sum();
                    if lhs != rhs {
                        return Err(AlgebraError::FormNotInvariant(i, j, k_));
                    }
                }
            }
        }

        // ad x eigenvalues
        for i in 0..n {
            let br = alg.bracket_vec(&alg.x_coords, &unit_vec(n, i));
            let mut eig = Q::zero();
            let mut seen = false;
            for (l, c) in br.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if l != i {
                    return Err(AlgebraError::AdXNotDiagonal(i));
                }
                eig = c.clone();
                seen = true;
            }
            if !seen {
                eig = Q::zero();
            }
            alg.ad_x_eig[i] = eig;
        }

        // sl2-triple relations [x,e]=e, [x,f]=-f, [e,f]=x
        let f_vec = unit_vec(n, alg.f_index);
        let xe = alg.bracket_vec(&alg.x_coords, &alg.e_coords);
        if xe != alg.e_coords {
            return Err(AlgebraError::SlTwoTriple("[x,e]=e"));
        }
        let xf = alg.bracket_vec(&alg.x_coords, &f_vec);
        if xf != f_vec.iter().map(|c| -c.clone()).collect::<Vec<_>>() {
            return Err(AlgebraError::SlTwoTriple("[x,f]=-f"));
        }
        let ef = alg.bracket_vec(&alg.e_coords, &f_vec);
        if ef != alg.x_coords {
            return Err(AlgebraError::SlTwoTriple("[e,f]=x"));
        }

        Ok(alg)
    }

    fn jacobi_holds(&self, i: usize, j: usize, k: usize) -> bool {
        let n = self.dim();
        // (-1)^{p_i p_k}[u_i,[u_j,u_k]] + cyclic = 0
        let sgn = |a: usize, b: usize| -> Q {
            if self.parity[a].is_odd() && self.parity[b].is_odd() {
                -Q::one()
            } else {
                Q::one()
            }
        };
        let mut total = vec![Q::zero(); n];
        let parts = [(i, j, k), (j, k, i), (k, i, j)];
        for (a, b, c) in parts {
            let inner = self.bracket(b, c);
            let outer = self.bracket_vec(&unit_vec(n, a), &inner);
            let s = sgn(a, c);
            for l in 0..n {
                total[l] += s.clone() * &outer[l];
            }
        }
        total.iter().all(|c| c.is_zero())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn sdim(&self) -> i64 {
        self.parity.iter().map(|p| p.sign()).sum()
    }

    pub fn bracket(&self, i: usize, j: usize) -> Vec<Q> {
        self.bracket_table[i][j].clone()
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket_vec(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for l in 0..n {
                    out[l] += a.clone() * b * &self.bracket_table[i][j][l];
                }
            }
        }
        out
    }

    pub fn form_vec(&self, u: &[Q], v: &[Q]) -> Q {
        let mut out = Q::zero();
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                out += a.clone() * b * &self.form[i][j];
            }
        }
        out
    }

    /// Dual basis coordinate vectors: `(dual[i] | u_j) = delta_ij`.
    pub fn dual_basis(&self) -> Vec<Vec<Q>> {
        let n = self.dim();
        // (sum_m c_m u_m | u_j) = sum_m c_m form[m][j]
        let a: Vec<Vec<Q>> = (0..n)
            .map(|j| (0..n).map(|m| self.form[m][j].clone()).collect())
            .collect();
        (0..n)
            .map(|i| {
                let rhs: Vec<Q> = (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
                solve_linear(&a, &rhs).expect("bilinear form is nondegenerate")
            })
            .collect()
    }

    /// Central charge of the minimal W-algebra,
    /// `c(k) = k sdim(g)/(k + h_vee) - 6k + h_vee - 4`.
    pub fn central_charge(&self) -> RatFn {
        let hv = self.dual_coxeter.clone();
        let sugawara = RatFn::new(
            PolyK::linear(Q::zero(), qi(self.sdim())),
            PolyK::linear(hv.clone(), Q::one()),
        );
        sugawara
            + RatFn::from_poly(PolyK::linear(hv - qi(4), qi(-6)))
    }
}

fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

impl LieSuperalgebra {
    /// Serializes the defining data: names, parities, nonzero structure
    /// constants as triples, and the bilinear form, all numbers as exact
    /// fraction strings.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (l, c) in self.bracket_table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        serde_json::to_value((i, j, l, c.to_string()))
                            .map(|v| triples.push(v))
                            .unwrap();
                    }
                }
            }
        }
        let mut form = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.form[i][j].is_zero() {
                    form.push(serde_json::json!([i, j, self.form[i][j].to_string()]));
                }
            }
        }
        serde_json::json!({
            "name": self.name,
            "basis": self.names,
            "parity": self.parity.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "structureConstants": triples,
            "form": form,
            "cartan": self.cartan,
            "x": self.x_coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "fIndex": self.f_index,
            "e": self.e_coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "dualCoxeter": self.dual_coxeter.to_string(),
            "adXEigenvalues": self.ad_x_eig.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Diagonal twist data: eigenphase of each basis element, in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct TwistAutomorphism {
    pub phases: Vec<Q>,
}

fn canon_phase(p: &Q) -> Q {
    p - p.floor()
}

impl TwistAutomorphism {
    pub fn new(alg: &LieSuperalgebra, raw: Vec<Q>) -> Result<Self, AlgebraError> {
        let phases: Vec<Q> = raw.iter().map(canon_phase).collect();
        let n = alg.dim();
        assert_eq!(phases.len(), n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if !alg.bracket_table[i][j][l].is_zero() {
                        let sum = canon_phase(&(phases[i].clone() + &phases[j]));
                        if sum != phases[l] {
                            return Err(AlgebraError::TwistPhases(format!(
                                "bracket ({i},{j})->{l} breaks phase additivity"
                            )));
                        }
                    }
                }
                if !alg.form[i][j].is_zero()
                    && !canon_phase(&(phases[i].clone() + &phases[j])).is_zero()
                {
                    return Err(AlgebraError::TwistPhases(format!(
                        "form pairing ({i},{j}) breaks phase compatibility"
                    )));
                }
            }
        }
        for (i, c) in alg.x_coords.iter().enumerate() {
            if !c.is_zero() && !phases[i].is_zero() {
                return Err(AlgebraError::TwistPhases("x is not fixed".into()));
            }
        }
        if !phases[alg.f_index].is_zero() {
            return Err(AlgebraError::TwistPhases("f is not fixed".into()));
        }
        Ok(TwistAutomorphism { phases })
    }

    pub fn is_identity(&self) -> bool {
        self.phases.iter().all(|p| p.is_zero())
    }
}

/// Partition of (part of) the basis realizing the triangular decomposition
/// of the fixed-sector subalgebra.
#[derive(Clone, Debug)]
pub struct TriangularChoice {
    pub n_plus: Vec<usize>,
    pub n_minus: Vec<usize>,
    pub g12_zero: Option<usize>,
}

impl TriangularChoice {
    pub fn validate(
        &self,
        alg: &LieSuperalgebra,
        twist: &TwistAutomorphism,
    ) -> Result<(), AlgebraError> {
        let err = |m: String| Err(AlgebraError::Triangular(m));
        if !self.n_plus.contains(&alg.f_index) {
            return err("f must lie in n_plus".into());
        }
        // the fixed sector: phase 0 on integral grades, 1/2 on half-integral
        let in_fixed_sector = |i: usize| -> bool {
            let m = &alg.ad_x_eig[i];
            let want = if m.is_integer() { Q::zero() } else { q(1, 2) };
            twist.phases[i] == want
        };
        for &i in self.n_plus.iter().chain(self.n_minus.iter()) {
            if !in_fixed_sector(i) {
                return err(format!("basis element {i} is not in the sigma-fixed sector"));
            }
        }
        if let Some(z) = self.g12_zero {
            if alg.ad_x_eig[z] != q(1, 2) {
                return err("g12 zero-space element must have grade 1/2".into());
            }
            if !self.n_minus.contains(&z) {
                return err("g12 zero-space element must sit inside n_minus".into());
            }
        }
        // isotropy of n_plus cap g_{1/2}(sigma) for the neutral form <a,b> = (f|[a,b])
        let f_vec = unit_vec(alg.dim(), alg.f_index);
        let half = q(1, 2);
        for &i in &self.n_plus {
            for &j in &self.n_plus {
                if alg.ad_x_eig[i] == half && alg.ad_x_eig[j] == half {
                    let br = alg.bracket_vec(&unit_vec(alg.dim(), i), &unit_vec(alg.dim(), j));
                    if !alg.form_vec(&f_vec, &br).is_zero() {
                        return err(format!("n_plus not neutral-isotropic at ({i},{j})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> u8 {
        self.g12_zero.is_some() as u8
    }
}

/// A weight: its values on the fixed Cartan basis of the setup.
#[derive(Clone, PartialEq, Debug)]
pub struct Weight {
    pub values: Vec<Q>,
}

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight { values: vec![Q::zero(); n] }
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Weight {
        Weight { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

/// Boundary values `s_i` for every basis element, plus `epsilon(sigma)`.
#[derive(Clone, Debug)]
pub struct SValueTable {
    pub s: Vec<Q>,
    pub epsilon: u8,
}

impl SValueTable {
    /// Ghost value for a neutral fermion attached to a grade-1/2 element.
    pub fn s_neutral(&self, i: usize) -> Q {
        self.s[i].clone()
    }

    /// Ghost values for the charged pair attached to a positive-grade element.
    pub fn s_charged(&self, i: usize) -> (Q, Q) {
        (self.s[i].clone(), Q::one() - &self.s[i])
    }
}

/// Derived scalars of the reduction.
#[derive(Clone, Debug)]
pub struct ReductionConstants {
    pub gamma_prime: Weight,
    pub gamma_half: Weight,
    pub gamma_prime_zero: Weight,
    pub s_g: RatFn,
    pub s_ne: Q,
    pub s_ch: Q,
    pub s_gh: Q,
    pub epsilon: u8,
}

/// Algebra presets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgPreset {
    Spo21,
    Sl21,
}

/// Full setup presets: algebra + twist + triangular choice, with the
/// basis rotated to a twist-diagonal one where necessary.
#[derive(Clone, PartialEq, Debug)]
pub enum SetupPreset {
    /// spo(2|1) with the identity twist (Neveu-Schwarz sector).
    NeveuSchwarz,
    /// spo(2|1) with the parity involution (Ramond sector).
    Ramond,
    /// sl(2|1) with the identity twist.
    N2Untwisted,
    /// sl(2|1) with the phase-`a` family, `-1/2 < a <= 1/2`.
    N2Ramond(Q),
    /// sl(2|1) with the generator-swapping involution, in its diagonal basis.
    N2Twisted,
}

/// A verified (algebra, twist, triangular choice) triple.
#[derive(Clone, Debug)]
pub struct Setup {
    pub algebra: LieSuperalgebra,
    pub twist: TwistAutomorphism,
    pub tri: TriangularChoice,
    /// Basis indices of the twist-fixed Cartan.
    pub h_sigma: Vec<usize>,
}

pub fn build_algebra(preset: AlgPreset) -> LieSuperalgebra {
    match preset {
        AlgPreset::Spo21 => build_spo21(),
        AlgPreset::Sl21 => build_sl21(),
    }
}

impl Setup {
    pub fn new(preset: SetupPreset) -> Result<Setup, AlgebraError> {
        let (algebra, phases, tri) = match preset {
            SetupPreset::NeveuSchwarz => {
                let alg = build_spo21();
                let phases = vec![Q::zero(); 5];
                let tri = TriangularChoice { n_plus: vec![0], n_minus: vec![4], g12_zero: None };
                (alg, phases, tri)
            }
            SetupPreset::Ramond => {
                let alg = build_spo21();
                let phases = vec![Q::zero(), q(1, 2), Q::zero(), q(1, 2), Q::zero()];
                let tri =
                    TriangularChoice { n_plus: vec![0, 1], n_minus: vec![4, 3], g12_zero: Some(3) };
                (alg, phases, tri)
            }
            SetupPreset::N2Untwisted => {
                let alg = build_sl21();
                let phases = vec![Q::zero(); 8];
                let tri = TriangularChoice { n_plus: vec![5], n_minus: vec![2], g12_zero: None };
                (alg, phases, tri)
            }
            SetupPreset::N2Ramond(a) => {
                if a <= q(-1, 2) || a > q(1, 2) {
                    return Err(AlgebraError::Parameter(format!(
                        "sigma_a needs -1/2 < a <= 1/2, got {a}"
                    )));
                }
                let alg = build_sl21();
                // basis [e1, e2, e_th, f1, f2, f_th, h1, h2]
                let phases = vec![
                    a.clone(),
                    -a.clone(),
                    Q::zero(),
                    -a.clone(),
                    a.clone(),
                    Q::zero(),
                    Q::zero(),
                    Q::zero(),
                ];
                let tri = if a == q(1, 2) {
                    TriangularChoice { n_plus: vec![1, 3, 5], n_minus: vec![4, 0, 2], g12_zero: None }
                } else {
                    TriangularChoice { n_plus: vec![5], n_minus: vec![2], g12_zero: None }
                };
                (alg, phases, tri)
            }
            SetupPreset::N2Twisted => {
                let alg = build_sl21_twist_basis();
                // basis [e(1), e(2), f(1), f(2), H, x, e(th), f(th)]
                let phases = vec![
                    Q::zero(),
                    q(1, 2),
                    Q::zero(),
                    q(1, 2),
                    q(1, 2),
                    Q::zero(),
                    Q::zero(),
                    Q::zero(),
                ];
                let tri =
                    TriangularChoice { n_plus: vec![3, 7], n_minus: vec![1, 6], g12_zero: Some(1) };
                (alg, phases, tri)
            }
        };
        let twist = TwistAutomorphism::new(&algebra, phases)?;
        tri.validate(&algebra, &twist)?;
        let h_sigma: Vec<usize> = algebra
            .cartan
            .iter()
            .copied()
            .filter(|&i| twist.phases[i].is_zero())
            .collect();
        Ok(Setup { algebra, twist, tri, h_sigma })
    }

    /// Indices outside the fixed Cartan (the index set `S'`).
    pub fn s_prime(&self) -> Vec<usize> {
        (0..self.algebra.dim()).filter(|i| !self.h_sigma.contains(i)).collect()
    }

    /// Indices of grade-1/2 basis elements.
    pub fn s_half(&self) -> Vec<usize> {
        (0..self.algebra.dim()).filter(|&i| self.algebra.ad_x_eig[i] == q(1, 2)).collect()
    }

    /// Indices of positive-grade basis elements.
    pub fn s_plus(&self) -> Vec<usize> {
        (0..self.algebra.dim())
            .filter(|&i| self.algebra.ad_x_eig[i].is_positive())
            .collect()
    }

    /// Gram matrix of the fixed Cartan.
    pub fn h_sigma_gram(&self) -> Vec<Vec<Q>> {
        self.h_sigma
            .iter()
            .map(|&i| self.h_sigma.iter().map(|&j| self.algebra.form[i][j].clone()).collect())
            .collect()
    }

    /// Induced pairing on weights.
    pub fn pairing(&self, a: &Weight, b: &Weight) -> Q {
        let gram = self.h_sigma_gram();
        let y = solve_linear(&gram, &b.values).expect("Cartan form nondegenerate");
        a.values.iter().zip(&y).map(|(av, yv)| av * yv).sum()
    }

    /// Root of basis element `i` as a weight on the fixed Cartan.
    pub fn root_weight(&self, i: usize) -> Weight {
        let n = self.algebra.dim();
        let mut values = Vec::with_capacity(self.h_sigma.len());
        for &c in &self.h_sigma {
            let br = self.algebra.bracket_vec(&unit_vec(n, c), &unit_vec(n, i));
            let mut val = Q::zero();
            for (l, coeff) in br.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                assert!(l == i, "basis element {i} is not a root vector for the fixed Cartan");
                val = coeff.clone();
            }
            values.push(val);
        }
        Weight { values }
    }

    /// Value of a weight on `x`.
    pub fn weight_on_x(&self, w: &Weight) -> Q {
        let mut out = Q::zero();
        for (pos, &c) in self.h_sigma.iter().enumerate() {
            if !self.algebra.x_coords[c].is_zero() {
                out += self.algebra.x_coords[c].clone() * &w.values[pos];
            }
        }
        out
    }

    /// Value of a weight on a Cartan element given in fixed-Cartan coords.
    pub fn weight_on(&self, w: &Weight, h: &[Q]) -> Q {
        w.values.iter().zip(h).map(|(v, c)| v * c).sum()
    }

    /// Checks that `h` (fixed-Cartan coords) centralizes `f`.
    pub fn in_f_centralizer(&self, h: &[Q]) -> bool {
        let n = self.algebra.dim();
        let mut coords = vec![Q::zero(); n];
        for (pos, &c) in self.h_sigma.iter().enumerate() {
            coords[c] = h[pos].clone();
        }
        let br = self.algebra.bracket_vec(&coords, &unit_vec(n, self.algebra.f_index));
        br.iter().all(|c| c.is_zero())
    }
}

/// Boundary table per the twisted triangular decomposition: `s_i = -m_i`
/// on `n_plus`, otherwise the least exponent in the phase coset exceeding
/// `-m_i`.
pub fn s_values(setup: &Setup) -> SValueTable {
    let alg = &setup.algebra;
    let n = alg.dim();
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let m = alg.ad_x_eig[i].clone();
        let v = if setup.tri.n_plus.contains(&i) {
            -m
        } else {
            // min { n in phase + Z : n > -m }
            let phase = setup.twist.phases[i].clone();
            let t = -m - &phase;
            phase + t.floor() + Q::one()
        };
        s.push(v);
    }
    SValueTable { s, epsilon: setup.tri.epsilon() }
}

/// Reduction constants from the boundary table.
pub fn reduction_constants(setup: &Setup, sv: &SValueTable) -> ReductionConstants {
    let alg = &setup.algebra;
    let nh = setup.h_sigma.len();
    let mut gamma_prime = Weight::zero(nh);
    let mut gamma_half = Weight::zero(nh);
    let mut gamma_prime_zero = Weight::zero(nh);
    let mut s_g_sum = Q::zero();
    for i in setup.s_prime() {
        let p = alg.parity[i].sign_q();
        let alpha = setup.root_weight(i);
        let term = alpha.scale(&(p.clone() * &sv.s[i] / qi(2)));
        gamma_prime = gamma_prime.add(&term);
        if alg.ad_x_eig[i].is_zero() {
            gamma_prime_zero = gamma_prime_zero.add(&term);
        }
        s_g_sum += p * binom2(&sv.s[i]);
    }
    for i in setup.s_half() {
        let p = alg.parity[i].sign_q();
        let alpha = setup.root_weight(i);
        gamma_half = gamma_half.add(&alpha.scale(&(p * &sv.s[i] / qi(2))));
    }
    // s_g = -k/(2(k+hv)) * sum
    let s_g = RatFn::new(
        PolyK::linear(Q::zero(), -s_g_sum / qi(2)),
        PolyK::linear(alg.dual_coxeter.clone(), Q::one()),
    );
    let mut s_ne = qi(sv.epsilon as i64) / qi(8);
    for i in setup.s_half() {
        s_ne -= alg.parity[i].sign_q() * binom2(&sv.s[i]) / qi(2);
    }
    let mut s_ch = Q::zero();
    for i in setup.s_plus() {
        s_ch += alg.parity[i].sign_q()
            * (binom2(&sv.s[i]) + alg.ad_x_eig[i].clone() * &sv.s[i]);
    }
    let s_gh = s_ne.clone() + &s_ch;
    ReductionConstants {
        gamma_prime,
        gamma_half,
        gamma_prime_zero,
        s_g,
        s_ne,
        s_ch,
        s_gh,
        epsilon: sv.epsilon,
    }
}

/// Ghost-constant identity of the minimal gradation:
/// `s_gh = (1/4) sum_{grade 1/2} sign * s^2`.
pub fn s_gh_minimal(setup: &Setup, sv: &SValueTable) -> Q {
    let mut out = Q::zero();
    for i in setup.s_half() {
        out += setup.algebra.parity[i].sign_q() * &sv.s[i] * &sv.s[i] / qi(4);
    }
    out
}

/// Lowest conformal weight of the reduced module attached to a singular
/// vector of weight `lambda`, as a rational function of the level.
pub fn highest_weight_h(setup: &Setup, rc: &ReductionConstants, lambda: &Weight) -> RatFn {
    let norm = setup.pairing(lambda, lambda);
    let cross = setup.pairing(lambda, &rc.gamma_prime);
    let lx = setup.weight_on_x(lambda);
    let hv = setup.algebra.dual_coxeter.clone();
    let quad = RatFn::new(
        PolyK::from_q((norm - qi(2) * cross) / qi(2)),
        PolyK::linear(hv, Q::one()),
    );
    quad + RatFn::from_q(-lx + &rc.s_gh) + rc.s_g.clone()
}

/// Same, evaluated at a level away from the pole.
pub fn highest_weight_h_at(
    setup: &Setup,
    rc: &ReductionConstants,
    lambda: &Weight,
    k: &Q,
) -> Option<Q> {
    highest_weight_h(setup, rc, lambda).eval(k)
}

/// Zero-mode eigenvalue of the Cartan current attached to `h` (fixed-Cartan
/// coordinates, must centralize `f`) on the reduced highest-weight vector.
pub fn j_eigenvalue(
    setup: &Setup,
    sv: &SValueTable,
    lambda: &Weight,
    h: &[Q],
) -> Result<Q, AlgebraError> {
    if !setup.in_f_centralizer(h) {
        return Err(AlgebraError::Parameter(
            "element is not in the f-centralizer of the Cartan".into(),
        ));
    }
    let mut out = setup.weight_on(lambda, h);
    for i in setup.s_half() {
        let alpha = setup.root_weight(i);
        out += setup.algebra.parity[i].sign_q() * &sv.s[i] * setup.weight_on(&alpha, h) / qi(2);
    }
    for i in setup.s_plus() {
        let alpha = setup.root_weight(i);
        out -= setup.algebra.parity[i].sign_q() * &sv.s[i] * setup.weight_on(&alpha, h);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Supermatrix constructions of the preset algebras.
// ---------------------------------------------------------------------------

type Mat3<S> = [[S; 3]; 3];

fn zmat<S: Scalar>() -> Mat3<S> {
    [
        [S::zero(), S::zero(), S::zero()],
        [S::zero(), S::zero(), S::zero()],
        [S::zero(), S::zero(), S::zero()],
    ]
}

fn unit_mat<S: Scalar>(i: usize, j: usize, c: S) -> Mat3<S> {
    let mut m = zmat();
    m[i][j] = c;
    m
}

fn mat_add<S: Scalar>(a: &Mat3<S>, b: &Mat3<S>) -> Mat3<S> {
    let mut out = zmat();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j].clone() + b[i][j].clone();
        }
    }
    out
}

fn mat_scale<S: Scalar>(a: &Mat3<S>, c: &S) -> Mat3<S> {
    let mut out = zmat();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j].clone() * c.clone();
        }
    }
    out
}

fn mat_mul<S: Scalar>(a: &Mat3<S>, b: &Mat3<S>) -> Mat3<S> {
    let mut out = zmat();
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                out[i][j] += a[i][l].clone() * b[l][j].clone();
            }
        }
    }
    out
}

/// Supercommutator `ab -(-1)^{p(a)p(b)} ba`.
fn mat_bracket<S: Scalar>(a: &Mat3<S>, pa: Parity, b: &Mat3<S>, pb: Parity) -> Mat3<S> {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    let s = if pa.is_odd() && pb.is_odd() { S::one() } else { -S::one() };
    mat_add(&ab, &mat_scale(&ba, &s))
}

/// Supertrace with index parities `p`.
fn mat_str<S: Scalar>(p: &[Parity; 3], a: &Mat3<S>) -> S {
    let mut out = S::zero();
    for i in 0..3 {
        let t = a[i][i].clone();
        out += if p[i].is_odd() { -t } else { t };
    }
    out
}

fn mat_flat<S: Scalar>(a: &Mat3<S>) -> Vec<S> {
    let mut v = Vec::with_capacity(9);
    for row in a {
        for c in row {
            v.push(c.clone());
        }
    }
    v
}

/// Expresses `target` in the span of `basis` (exact; panics if impossible).
fn express<S: Scalar>(basis: &[Vec<S>], target: &[S]) -> Vec<S> {
    let m = target.len();
    let n = basis.len();
    let mut a: Vec<Vec<S>> = (0..m)
        .map(|r| {
            let mut row: Vec<S> = basis.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) {
            a.swap(row, p);
            let inv = S::one() / a[row][col].clone();
            for c in col..=n {
                a[row][c] = a[row][c].clone() * inv.clone();
            }
            for r in 0..m {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in col..=n {
                        let sub = f.clone() * a[row][c].clone();
                        a[r][c] = a[r][c].clone() - sub;
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
        }
    }
    for r in row..m {
        assert!(a[r][n].is_zero(), "vector not in the span of the basis");
    }
    let mut x = vec![S::zero(); n];
    for (r, c) in pivots {
        x[c] = a[r][n].clone();
    }
    x
}

/// Builds bracket table and supertrace form from explicit supermatrices.
fn tables_from_matrices<S: Scalar>(
    index_parity: &[Parity; 3],
    basis: &[(Mat3<S>, Parity)],
) -> (Vec<Vec<Vec<S>>>, Vec<Vec<S>>) {
    let n = basis.len();
    let flat: Vec<Vec<S>> = basis.iter().map(|(m, _)| mat_flat(m)).collect();
    let mut table = vec![vec![vec![S::zero(); n]; n]; n];
    let mut form = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let br = mat_bracket(&basis[i].0, basis[i].1, &basis[j].0, basis[j].1);
            table[i][j] = express(&flat, &mat_flat(&br));
            form[i][j] = mat_str(index_parity, &mat_mul(&basis[i].0, &basis[j].0));
        }
    }
    (table, form)
}

/// `spo(2|1)` in its minimal-gradation basis.
fn build_spo21() -> LieSuperalgebra {
    let h = q(1, 2);
    let p = [Parity::Even, Parity::Even, Parity::Odd];
    let e_mth = unit_mat(1, 0, h.clone());
    let e_mth2 = mat_add(&unit_mat(2, 0, h.clone()), &unit_mat(1, 2, -h.clone()));
    let x = mat_add(&unit_mat(0, 0, h.clone()), &unit_mat(1, 1, -h.clone()));
    let e_th2 = mat_add(&unit_mat(0, 2, Q::one()), &unit_mat(2, 1, Q::one()));
    let e_th = unit_mat(0, 1, qi(2));
    let basis = vec![
        (e_mth, Parity::Even),
        (e_mth2, Parity::Odd),
        (x, Parity::Even),
        (e_th2, Parity::Odd),
        (e_th, Parity::Even),
    ];
    let (table, form) = tables_from_matrices(&p, &basis);
    let mut e_coords = vec![Q::zero(); 5];
    e_coords[4] = q(1, 2);
    let mut x_coords = vec![Q::zero(); 5];
    x_coords[2] = Q::one();
    LieSuperalgebra::new(
        "spo(2|1)",
        ["e(-th)", "e(-th/2)", "x", "e(th/2)", "e(th)"].iter().map(|s| s.to_string()).collect(),
        basis.iter().map(|(_, p)| *p).collect(),
        table,
        form,
        vec![2],
        x_coords,
        0,
        e_coords,
        q(3, 2),
    )
    .expect("spo(2|1) preset must pass all algebra checks")
}

/// `sl(2|1)` in the Chevalley basis, even coordinates 1 and 3.
fn build_sl21() -> LieSuperalgebra {
    let p = [Parity::Even, Parity::Odd, Parity::Even];
    let e1 = unit_mat(0, 1, Q::one());
    let e2 = unit_mat(1, 2, Q::one());
    let e_th = unit_mat(0, 2, -Q::one()); // -[e1,e2]
    let f1 = unit_mat(1, 0, Q::one());
    let f2 = unit_mat(2, 1, -Q::one());
    let f_th = unit_mat(2, 0, -Q::one()); // [f1,f2]
    let h1 = mat_add(&unit_mat(0, 0, Q::one()), &unit_mat(1, 1, Q::one()));
    let h2 = mat_add(&unit_mat(1, 1, -Q::one()), &unit_mat(2, 2, -Q::one()));
    let basis = vec![
        (e1, Parity::Odd),
        (e2, Parity::Odd),
        (e_th, Parity::Even),
        (f1, Parity::Odd),
        (f2, Parity::Odd),
        (f_th, Parity::Even),
        (h1, Parity::Even),
        (h2, Parity::Even),
    ];
    let (table, form) = tables_from_matrices(&p, &basis);
    let mut e_coords = vec![Q::zero(); 8];
    e_coords[2] = q(1, 2);
    let mut x_coords = vec![Q::zero(); 8];
    x_coords[6] = q(1, 2);
    x_coords[7] = q(1, 2);
    LieSuperalgebra::new(
        "sl(2|1)",
        ["e1", "e2", "e(th)", "f1", "f2", "f(th)", "h1", "h2"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        basis.iter().map(|(_, p)| *p).collect(),
        table,
        form,
        vec![6, 7],
        x_coords,
        5,
        e_coords,
        Q::one(),
    )
    .expect("sl(2|1) preset must pass all algebra checks")
}

/// `sl(2|1)` rotated to the diagonal basis of the mixing involution:
/// `e(i) = (e1 +- e2)/sqrt2`, `f(i) = (f1 +- f2)/sqrt2`, `H = h1 - h2`.
///
/// The rotation is performed over `Q(sqrt2)`; all resulting structure
/// constants and form entries are rational, which is asserted.
fn build_sl21_twist_basis() -> LieSuperalgebra {
    type S = Sqrt<Q>;
    let rt2 = S::root(qi(2));
    let inv_rt2 = S::one() / rt2.clone();
    let lift = |m: Mat3<Q>| -> Mat3<S> {
        let mut out = zmat();
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = S::rational(m[i][j].clone());
            }
        }
        out
    };
    let p = [Parity::Even, Parity::Odd, Parity::Even];
    let e1 = lift(unit_mat(0, 1, Q::one()));
    let e2 = lift(unit_mat(1, 2, Q::one()));
    let f1 = lift(unit_mat(1, 0, Q::one()));
    let f2 = lift(unit_mat(2, 1, -Q::one()));
    let e_th = lift(unit_mat(0, 2, -Q::one()));
    let f_th = lift(unit_mat(2, 0, -Q::one()));
    let h1 = lift(mat_add(&unit_mat(0, 0, Q::one()), &unit_mat(1, 1, Q::one())));
    let h2 = lift(mat_add(&unit_mat(1, 1, -Q::one()), &unit_mat(2, 2, -Q::one())));

    let comb = |a: &Mat3<S>, b: &Mat3<S>, sign: i64| {
        mat_scale(&mat_add(a, &mat_scale(b, &S::from_int(sign))), &inv_rt2)
    };
    let e_1 = comb(&e1, &e2, 1);
    let e_2 = comb(&e1, &e2, -1);
    let f_1 = comb(&f1, &f2, 1);
    let f_2 = comb(&f1, &f2, -1);
    let h_cap = mat_add(&h1, &mat_scale(&h2, &(-S::one())));
    let x = mat_scale(&mat_add(&h1, &h2), &S::from_q(&q(1, 2)));

    let basis = vec![
        (e_1, Parity::Odd),
        (e_2, Parity::Odd),
        (f_1, Parity::Odd),
        (f_2, Parity::Odd),
        (h_cap, Parity::Even),
        (x, Parity::Even),
        (e_th, Parity::Even),
        (f_th, Parity::Even),
    ];
    let (table_s, form_s) = tables_from_matrices(&p, &basis);
    let table: Vec<Vec<Vec<Q>>> = table_s
        .iter()
        .map(|row| row.iter().map(|v| v.iter().map(|c| c.expect_rational()).collect()).collect())
        .collect();
    let form: Vec<Vec<Q>> =
        form_s.iter().map(|row| row.iter().map(|c| c.expect_rational()).collect()).collect();

    let mut e_coords = vec![Q::zero(); 8];
    e_coords[6] = q(1, 2);
    let mut x_coords = vec![Q::zero(); 8];
    x_coords[5] = Q::one();
    LieSuperalgebra::new(
        "sl(2|1) twist basis",
        ["e(1)", "e(2)", "f(1)", "f(2)", "H", "x", "e(th)", "f(th)"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        basis.iter().map(|(_, p)| *p).collect(),
        table,
        form,
        vec![4, 5],
        x_coords,
        7,
        e_coords,
        Q::one(),
    )
    .expect("twist-diagonal sl(2|1) basis must pass all algebra checks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn spo21_form_and_triple() {
        let alg = build_algebra(AlgPreset::Spo21);
        assert_eq!(alg.form[2][2], q(1, 2)); // (x|x) = 1/2
        assert_eq!(alg.form[3][1], Q::one()); // (e(th/2)|e(-th/2)) = 1
        assert_eq!(alg.form[4][0], Q::one()); // (e(th)|e(-th)) = 1
        assert_eq!(alg.dual_coxeter, q(3, 2));
        assert_eq!(alg.ad_x_eig, vec![qi(-1), q(-1, 2), qi(0), q(1, 2), qi(1)]);
        assert_eq!(alg.sdim(), 1);
    }

    #[test]
    fn sl21_form_and_roots() {
        let alg = build_algebra(AlgPreset::Sl21);
        assert_eq!(alg.dual_coxeter, Q::one());
        assert_eq!(alg.sdim(), 0);
        let setup = Setup::new(SetupPreset::N2Untwisted).unwrap();
        let a1 = setup.root_weight(0);
        let a2 = setup.root_weight(1);
        assert_eq!(setup.pairing(&a1, &a2), Q::one()); // (alpha1|alpha2) = 1
        assert!(setup.pairing(&a1, &a1).is_zero());
        let th = setup.root_weight(2);
        assert_eq!(setup.pairing(&th, &th), qi(2)); // (theta|theta) = 2
    }

    #[test]
    fn twist_phase_examples() {
        let ram = Setup::new(SetupPreset::Ramond).unwrap();
        assert_eq!(ram.twist.phases, vec![qi(0), q(1, 2), qi(0), q(1, 2), qi(0)]);
        let ns = Setup::new(SetupPreset::NeveuSchwarz).unwrap();
        assert!(ns.twist.is_identity());
        let tw = Setup::new(SetupPreset::N2Twisted).unwrap();
        assert_eq!(tw.twist.phases[1], q(1, 2)); // e(2)
        assert!(tw.twist.phases[0].is_zero()); // e(1)
        assert!(Setup::new(SetupPreset::N2Ramond(qi(1))).is_err());
    }

    #[test]
    fn s_value_examples() {
        // spo(2|1) Ramond: s_{th/2} = s_{-th/2} = 1/2, s_th = 0, s_{-th} = 1
        let ram = Setup::new(SetupPreset::Ramond).unwrap();
        let sv = s_values(&ram);
        assert_eq!(sv.s, vec![Q::one(), q(1, 2), Q::one(), q(1, 2), Q::zero()]);
        assert_eq!(sv.epsilon, 1);

        // sl(2|1) sigma_a
        let a = q(1, 4);
        let st = Setup::new(SetupPreset::N2Ramond(a.clone())).unwrap();
        let sv = s_values(&st);
        assert_eq!(sv.s[0], a); // e1
        assert_eq!(sv.s[1], -a.clone()); // e2
        assert_eq!(sv.s[2], Q::zero()); // e(th)
        assert_eq!(sv.s[3], Q::one() - &a); // f1
        assert_eq!(sv.s[4], Q::one() + &a); // f2
        assert_eq!(sv.s[5], Q::one()); // f(th)
        assert_eq!(sv.epsilon, 0);

        // boundary a = 1/2 stays consistent with the same table
        let st = Setup::new(SetupPreset::N2Ramond(q(1, 2))).unwrap();
        let sv = s_values(&st);
        assert_eq!(sv.s[0], q(1, 2));
        assert_eq!(sv.s[1], q(-1, 2));
        assert_eq!(sv.s[3], q(1, 2));
        assert_eq!(sv.s[4], q(3, 2));

        // twisted sector
        let st = Setup::new(SetupPreset::N2Twisted).unwrap();
        let sv = s_values(&st);
        // [e(1), e(2), f(1), f(2), H, x, e(th), f(th)]
        assert_eq!(
            sv.s,
            vec![qi(0), q(1, 2), qi(1), q(1, 2), q(1, 2), Q::one(), Q::zero(), Q::one()]
        );
        assert_eq!(sv.epsilon, 1);
    }

    #[test]
    fn reduction_constant_examples() {
        let ram = Setup::new(SetupPreset::Ramond).unwrap();
        let sv = s_values(&ram);
        let rc = reduction_constants(&ram, &sv);
        // gamma' = -theta/2, gamma_1/2 = -theta/8 as values on x
        assert_eq!(rc.gamma_prime.values, vec![q(-1, 2)]);
        assert_eq!(rc.gamma_half.values, vec![q(-1, 8)]);
        // s_g = -k/(4(2k+3))
        assert_eq!(rc.s_g.eval(&Q::one()), Some(q(-1, 20)));
        assert_eq!(rc.s_gh, q(-1, 16));
        assert_eq!(rc.s_gh, s_gh_minimal(&ram, &sv));

        let a = q(1, 4);
        let st = Setup::new(SetupPreset::N2Ramond(a.clone())).unwrap();
        let sv = s_values(&st);
        let rc = reduction_constants(&st, &sv);
        // s_g = k a^2 / (k+1)
        assert_eq!(rc.s_g.eval(&qi(1)), Some(a.clone() * &a / qi(2)));
        assert_eq!(rc.s_gh, -a.clone() * &a / qi(2));
        // gamma' = -aH: values (a, -a) on (h1, h2)
        assert_eq!(rc.gamma_prime.values, vec![a.clone(), -a.clone()]);
        assert_eq!(rc.gamma_half.values, vec![a.clone() / qi(2), -a / qi(2)]);
        assert_eq!(rc.s_gh, s_gh_minimal(&st, &sv));

        let tw = Setup::new(SetupPreset::N2Twisted).unwrap();
        let sv = s_values(&tw);
        let rc = reduction_constants(&tw, &sv);
        // s_g = -k/(16(k+1)), s_gh = -1/16
        assert_eq!(rc.s_g.eval(&qi(1)), Some(q(-1, 32)));
        assert_eq!(rc.s_gh, q(-1, 16));

        // identity twists: all s in {0,1} so s_g = 0
        for preset in [SetupPreset::NeveuSchwarz, SetupPreset::N2Untwisted] {
            let ns = Setup::new(preset).unwrap();
            let sv = s_values(&ns);
            let rc = reduction_constants(&ns, &sv);
            assert!(rc.s_g.is_zero());
        }
    }

    #[test]
    fn structural_identities() {
        for preset in [
            SetupPreset::NeveuSchwarz,
            SetupPreset::Ramond,
            SetupPreset::N2Untwisted,
            SetupPreset::N2Ramond(q(1, 4)),
            SetupPreset::N2Ramond(q(-1, 3)),
            SetupPreset::N2Ramond(q(1, 2)),
            SetupPreset::N2Twisted,
        ] {
            let st = Setup::new(preset.clone()).unwrap();
            let sv = s_values(&st);
            let rc = reduction_constants(&st, &sv);
            // 2 gamma'(x) = 1 - hv - eps/2
            let lhs = st.weight_on_x(&rc.gamma_prime) * qi(2);
            let rhs = Q::one()
                - &st.algebra.dual_coxeter
                - qi(sv.epsilon as i64) / qi(2);
            assert_eq!(lhs, rhs, "gamma'(x) identity fails for {preset:?}");
            // sum over grade-1/2 of sign * s = -eps/2
            let sum: Q = st
                .s_half()
                .iter()
                .map(|&i| st.algebra.parity[i].sign_q() * &sv.s[i])
                .sum();
            assert_eq!(sum, -qi(sv.epsilon as i64) / qi(2));
            // s-duality on S': dual basis vector pairs to a single index
            let dual = st.algebra.dual_basis();
            for i in st.s_prime() {
                let nz: Vec<usize> =
                    (0..st.algebra.dim()).filter(|&l| !dual[i][l].is_zero()).collect();
                assert_eq!(nz.len(), 1, "dual of {i} not a single basis vector");
                assert_eq!(sv.s[i].clone() + &sv.s[nz[0]], Q::one());
            }
            // epsilon parity: eps = dim g_{1/2}(sigma) mod 2
            let half = q(1, 2);
            let fixed_half = (0..st.algebra.dim())
                .filter(|&i| st.algebra.ad_x_eig[i] == half && st.twist.phases[i] == half)
                .count();
            assert_eq!(fixed_half % 2, sv.epsilon as usize % 2);
        }
    }

    #[test]
    fn central_charge_identities() {
        let spo = build_algebra(AlgPreset::Spo21);
        // c(k) = 3/2 - 12 (k+1)^2/(2k+3)
        let lhs = spo.central_charge();
        let rhs = RatFn::from_q(q(3, 2))
            - RatFn::new(
                PolyK::new(vec![qi(12), qi(24), qi(12)]),
                PolyK::new(vec![qi(3), qi(2)]),
            );
        assert_eq!(lhs, rhs);
        let sl = build_algebra(AlgPreset::Sl21);
        // c(k) = -3(2k+1)
        assert_eq!(sl.central_charge(), RatFn::from_poly(PolyK::new(vec![qi(-3), qi(-6)])));
    }

    #[test]
    fn highest_weight_and_j_examples() {
        let ram = Setup::new(SetupPreset::Ramond).unwrap();
        let sv = s_values(&ram);
        let rc = reduction_constants(&ram, &sv);
        // Lambda = 0 gives h = s_g + s_gh; at k = 0 that is -1/16
        let zero = Weight::zero(1);
        assert_eq!(highest_weight_h_at(&ram, &rc, &zero, &Q::zero()), Some(q(-1, 16)));
        // pole at k = -hv
        assert_eq!(highest_weight_h_at(&ram, &rc, &zero, &q(-3, 2)), None);

        // j shift for sigma_a: j = Lambda(H) - a on H = h1 - h2
        let a = q(1, 4);
        let st = Setup::new(SetupPreset::N2Ramond(a.clone())).unwrap();
        let sv = s_values(&st);
        let rc = reduction_constants(&st, &sv);
        let h_elt = vec![Q::one(), -Q::one()];
        let lambda = Weight { values: vec![qi(2), qi(1)] };
        let j = j_eigenvalue(&st, &sv, &lambda, &h_elt).unwrap();
        let lam_h = st.weight_on(&lambda, &h_elt);
        assert_eq!(j, lam_h.clone() - &a);
        // minimal gradation: j == (Lambda - gamma_1/2)(H)
        let gh = st.weight_on(&rc.gamma_half, &h_elt);
        assert_eq!(j, lam_h - gh);
        // x is not in the f-centralizer
        assert!(j_eigenvalue(&st, &sv, &lambda, &vec![Q::one(), Q::one()]).is_err());
    }
}
