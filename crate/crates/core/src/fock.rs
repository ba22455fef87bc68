//! Truncated twisted free-field Fock modules with exact mode operators,
//! and the free-field realizations of the three linear families.
//!
//! A module is spanned by ordered monomials of creation modes acting on a
//! (momentum-carrying) vacuum, truncated by total degree.  Mode operators
//! are sparse exact matrices; any contribution that would leave the
//! truncation is flagged per column, and relation checks only assert on
//! clean columns ("safe windows" are computed, never estimated).
//!
//! Scalars are generic: realizations whose printed coefficients carry
//! square-root normalizations run over quadratic-extension towers, so no
//! floating point enters.  Each realized generator carries the exact
//! square of its normalization relative to the abstract presentation; the
//! relation checks rescale with those squares, which always combine to
//! rationals.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};

use crate::liealg::Parity;
use crate::scalar::{q, qi, Scalar, Sqrt};
use crate::verma::{presentation, Presentation};
use crate::rootdata::Family;
use crate::Q;

/// One free-field generator: mode lattice, conformal weight, and the
/// boundary between creation and annihilation modes.
#[derive(Clone, Debug)]
pub struct FockGen {
    pub name: String,
    pub parity: Parity,
    /// Mode lattice `offset + Z`, offset in `[0, 1)`.
    pub offset: Q,
    pub weight: Q,
    /// Modes `>= threshold` annihilate the vacuum.
    pub threshold: Q,
    /// Vacuum eigenvalue of the zero mode (bosons only).
    pub momentum: Q,
}

/// Free-field data: generators plus the pairing table
/// `[A_m, B_n] = c m^p delta_{m,-n}`.
#[derive(Clone, Debug)]
pub struct FockSpec {
    pub gens: Vec<FockGen>,
    /// `brackets[i][j] = (c, p)`.
    pub brackets: Vec<Vec<(Q, u8)>>,
}

impl FockSpec {
    pub fn validate(&self) -> Result<(), String> {
        let n = self.gens.len();
        // creation modes must mutually super-commute (the only allowed
        // exception is a self-paired odd zero mode)
        for i in 0..n {
            for j in 0..n {
                let (c, _) = &self.brackets[i][j];
                if c.is_zero() {
                    continue;
                }
                // look for m on lattice_i with -thr_j < m < thr_i
                let lo = -self.gens[j].threshold.clone();
                let hi = self.gens[i].threshold.clone();
                let mut m = self.gens[i].offset.clone() + (lo.clone() - &self.gens[i].offset).ceil();
                if m <= lo {
                    m += Q::one();
                }
                while m < hi {
                    let slot = i == j && m.is_zero() && self.gens[i].parity.is_odd();
                    if !slot {
                        return Err(format!(
                            "creation modes of ({i},{j}) fail to commute at mode {m}"
                        ));
                    }
                    m += Q::one();
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (c, p) = &self.brackets[i][j];
                let (c2, p2) = &self.brackets[j][i];
                if p != p2 {
                    return Err(format!("bracket powers differ for ({i},{j})"));
                }
                // [A_m, B_n] = c m^p d_{m,-n}; super symmetry of the bracket
                // forces c_ji = -(-1)^{p_i p_j} (-1)^p c_ij
                let odd_pair =
                    self.gens[i].parity.is_odd() && self.gens[j].parity.is_odd();
                let sign = if odd_pair { Q::one() } else { -Q::one() };
                let flip = if *p % 2 == 1 { -Q::one() } else { Q::one() };
                if *c2 != sign * flip * c {
                    return Err(format!("bracket table not super-consistent at ({i},{j})"));
                }
                if !c.is_zero() {
                    let sum = self.gens[i].offset.clone() + &self.gens[j].offset;
                    if !(sum.clone() - sum.floor()).is_zero() {
                        return Err(format!("paired generators ({i},{j}) on mismatched lattices"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A basis monomial: ordered creation modes (generator, scaled mode).
pub type FockMono = Vec<(u8, i64)>;

/// Degree-truncated Fock module over a generic scalar.
pub struct FockModule<S: Scalar> {
    pub spec: FockSpec,
    pub depth: Q,
    pub den: i64,
    pub basis: Vec<FockMono>,
    pub index: HashMap<FockMono, usize>,
    /// Degree of each basis vector, scaled by `den`.
    pub degrees: Vec<i64>,
    _marker: std::marker::PhantomData<S>,
}

fn scale(v: &Q, den: i64) -> i64 {
    let s = v * qi(den);
    assert!(s.is_integer(), "{v} not on the 1/{den} lattice");
    s.to_integer().to_i64().unwrap()
}

impl<S: Scalar> FockModule<S> {
    pub fn new(spec: FockSpec, depth: &Q) -> FockModule<S> {
        spec.validate().expect("inconsistent bracket table");
        let den = spec
            .gens
            .iter()
            .map(|g| g.offset.denom().to_i64().unwrap())
            .fold(2i64, |acc, d| acc.lcm(&d));
        let depth_scaled = scale(depth, den);
        // enumerate creation modes per generator
        let mut ops: Vec<(u8, i64)> = Vec::new();
        for (gi, g) in spec.gens.iter().enumerate() {
            // largest lattice point strictly below the threshold
            let mut m = g.offset.clone() + (g.threshold.clone() - &g.offset).ceil() - Q::one();
            while -m.clone() <= *depth {
                let zero_slot = m.is_zero() && g.parity.is_odd();
                if m.is_negative() || zero_slot {
                    ops.push((gi as u8, scale(&m, den)));
                }
                m -= Q::one();
            }
        }
        ops.sort();
        let mut basis = Vec::new();
        let mut word: FockMono = Vec::new();
        enumerate(&spec, &ops, 0, depth_scaled, &mut word, &mut basis);
        basis.sort();
        let index: HashMap<FockMono, usize> =
            basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let degrees = basis.iter().map(|w| w.iter().map(|&(_, m)| -m).sum()).collect();
        FockModule { spec, depth: depth.clone(), den, basis, index, degrees, _marker: Default::default() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vacuum(&self) -> usize {
        self.index[&vec![]]
    }

    fn parity(&self, g: u8) -> Parity {
        self.spec.gens[g as usize].parity
    }

    /// Applies a single mode to a basis monomial; `None` marks truncation
    /// overflow.
    pub fn apply_mode(&self, g: u8, m: i64, mono: &FockMono) -> Option<Vec<(FockMono, S)>> {
        let gen = &self.spec.gens[g as usize];
        let thr = scale(&gen.threshold, self.den);
        let odd = gen.parity.is_odd();
        let mut out: Vec<(FockMono, S)> = Vec::new();
        if m >= thr {
            // annihilator: contract against matching creations, and pick up
            // the momentum on the vacuum when m = 0
            let mut crossings = 0i64;
            for (i, &(g2, m2)) in mono.iter().enumerate() {
                let (c, pw) = &self.spec.brackets[g as usize][g2 as usize];
                if !c.is_zero() && m + m2 == 0 {
                    let mq = q(m, self.den);
                    let mut coeff = c.clone();
                    for _ in 0..*pw {
                        coeff *= mq.clone();
                    }
                    let sign = if odd && crossings % 2 == 1 { -Q::one() } else { Q::one() };
                    let mut w = mono.clone();
                    w.remove(i);
                    out.push((w, S::from_q(&(coeff * sign))));
                }
                if self.parity(g2).is_odd() {
                    crossings += 1;
                }
            }
            if m == 0 && !gen.momentum.is_zero() {
                // bosonic zero mode reaching the vacuum
                let sign = if odd && crossings % 2 == 1 { -Q::one() } else { Q::one() };
                out.push((mono.clone(), S::from_q(&(gen.momentum.clone() * sign))));
            }
            return Some(out);
        }
        // creation: insert in order, with the odd-mode once-only rule and
        // the squared zero mode for self-paired odd generators
        let pos = mono.partition_point(|&e| e < (g, m));
        let crossings: i64 =
            mono[..pos].iter().filter(|&&(g2, _)| self.parity(g2).is_odd()).count() as i64;
        let sign = if odd && crossings % 2 == 1 { -Q::one() } else { Q::one() };
        if odd && mono.get(pos) == Some(&(g, m)) {
            if m == 0 {
                let (c, _) = &self.spec.brackets[g as usize][g as usize];
                let mut w = mono.clone();
                w.remove(pos);
                out.push((w, S::from_q(&(c.clone() / qi(2) * sign))));
                return Some(out);
            }
            return Some(out); // repeated odd creation vanishes
        }
        let degree: i64 = mono.iter().map(|&(_, mm)| -mm).sum::<i64>() - m;
        if degree > scale(&self.depth, self.den) {
            return None; // leaves the truncation
        }
        let mut w = mono.clone();
        w.insert(pos, (g, m));
        out.push((w, S::from_q(&sign)));
        Some(out)
    }
}

fn enumerate(
    spec: &FockSpec,
    ops: &[(u8, i64)],
    idx: usize,
    depth_left: i64,
    word: &mut FockMono,
    basis: &mut Vec<FockMono>,
) {
    if idx == ops.len() {
        basis.push(word.clone());
        return;
    }
    let (g, m) = ops[idx];
    let d = -m;
    let max_uses = if spec.gens[g as usize].parity.is_odd() {
        1
    } else if d > 0 {
        depth_left / d
    } else {
        0
    };
    for uses in 0..=max_uses {
        let mut w = word.clone();
        for _ in 0..uses {
            w.push((g, m));
        }
        std::mem::swap(&mut w, word);
        enumerate(spec, ops, idx + 1, depth_left - uses * d, word, basis);
        std::mem::swap(&mut w, word);
    }
}

/// A sum of operator words; modes within a word act right to left.
#[derive(Clone, Debug)]
pub struct Op<S: Scalar> {
    pub words: Vec<(S, Vec<(u8, i64)>)>,
}

impl<S: Scalar> Op<S> {
    pub fn zero() -> Op<S> {
        Op { words: vec![] }
    }

    pub fn push(&mut self, coeff: S, modes: Vec<(u8, i64)>) {
        if !coeff.is_zero() {
            self.words.push((coeff, modes));
        }
    }

    /// Applies to one basis vector; `None` on truncation overflow.
    pub fn apply(
        &self,
        module: &FockModule<S>,
        col: usize,
    ) -> Option<BTreeMap<usize, S>> {
        let mut out: BTreeMap<usize, S> = BTreeMap::new();
        for (coeff, modes) in &self.words {
            let mut state: Vec<(FockMono, S)> =
                vec![(module.basis[col].clone(), coeff.clone())];
            for &(g, m) in modes.iter().rev() {
                let mut next: Vec<(FockMono, S)> = Vec::new();
                for (w, c) in state {
                    let applied = module.apply_mode(g, m, &w)?;
                    for (w2, c2) in applied {
                        next.push((w2, c2 * c.clone()));
                    }
                }
                state = next;
            }
            for (w, c) in state {
                let i = module.index[&w];
                let e = out.entry(i).or_insert_with(S::zero);
                *e += c;
                if e.is_zero() {
                    out.remove(&i);
                }
            }
        }
        Some(out)
    }
}

/// A mode operator as a column-sparse matrix with per-column overflow.
#[derive(Clone, Debug)]
pub struct ModeOp<S: Scalar> {
    pub cols: Vec<Option<BTreeMap<usize, S>>>,
    pub shift: Q,
}

impl<S: Scalar> ModeOp<S> {
    pub fn from_op(module: &FockModule<S>, op: &Op<S>, shift: Q) -> ModeOp<S> {
        let cols = (0..module.dim()).map(|c| op.apply(module, c)).collect();
        ModeOp { cols, shift }
    }

    /// Composition `self . other`, with overflow propagation.
    pub fn compose(&self, other: &ModeOp<S>) -> ModeOp<S> {
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let col = col.as_ref()?;
                let mut out: BTreeMap<usize, S> = BTreeMap::new();
                for (i, c) in col {
                    let inner = self.cols[*i].as_ref()?;
                    for (i2, c2) in inner {
                        let e = out.entry(*i2).or_insert_with(S::zero);
                        *e += c2.clone() * c.clone();
                        if e.is_zero() {
                            out.remove(i2);
                        }
                    }
                }
                Some(out)
            })
            .collect();
        ModeOp { cols, shift: self.shift.clone() + &other.shift }
    }

    pub fn scale(&self, s: &S) -> ModeOp<S> {
        let cols = self
            .cols
            .iter()
            .map(|col| {
                col.as_ref().map(|c| {
                    c.iter()
                        .map(|(i, v)| (*i, v.clone() * s.clone()))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
            })
            .collect();
        ModeOp { cols, shift: self.shift.clone() }
    }

    pub fn add(&self, other: &ModeOp<S>) -> ModeOp<S> {
        assert_eq!(self.shift, other.shift, "adding operators of different degree shift");
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => {
                    let mut out = a.clone();
                    for (i, c) in b {
                        let e = out.entry(*i).or_insert_with(S::zero);
                        *e += c.clone();
                        if e.is_zero() {
                            out.remove(i);
                        }
                    }
                    Some(out)
                }
                _ => None,
            })
            .collect();
        ModeOp { cols, shift: self.shift.clone() }
    }

    /// Supercommutator `AB - (-1)^{p q} BA`; columns where either path
    /// overflowed are `None`.
    pub fn commutator(&self, other: &ModeOp<S>, odd_pair: bool) -> ModeOp<S> {
        let ab = self.compose(other);
        let ba = other.compose(self);
        let sign = if odd_pair { S::one() } else { -S::one() };
        ab.add(&ba.scale(&sign))
    }

    /// The eigenvalue on a column, if the column is clean and diagonal.
    pub fn eigenvalue(&self, col: usize) -> Option<S> {
        let c = self.cols[col].as_ref()?;
        match c.len() {
            0 => Some(S::zero()),
            1 => {
                let (i, v) = c.iter().next().unwrap();
                if *i == col {
                    Some(v.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// A realized generating field: normally ordered pairs, linear terms and
/// mode-zero constants, with the split thresholds taken from the module.
#[derive(Clone)]
pub struct RealField<S: Scalar> {
    pub name: String,
    pub parity: Parity,
    pub weight: Q,
    /// Mode lattice offset of the realized field.
    pub offset: Q,
    /// Squared normalization relative to the abstract presentation.
    pub rho2: Q,
    terms: Vec<RTerm<S>>,
}

#[derive(Clone)]
enum RTerm<S: Scalar> {
    /// `coeff * :a b:` with optional derivatives on either factor.
    No(S, (u8, bool), (u8, bool)),
    /// `coeff * a` or `coeff * da`.
    Lin(S, (u8, bool)),
    /// `coeff * z^{-weight}`: contributes to the zero mode.
    Const(S),
}

use RTerm::{Const, Lin, No};

impl<S: Scalar> RealField<S> {
    /// Builds the mode operator `X_n` as a finite word sum on the module.
    pub fn mode(&self, module: &FockModule<S>, n: &Q) -> Op<S> {
        let den = module.den;
        let n_scaled = scale(n, den);
        let mut op = Op::zero();
        let band = scale(&module.depth, den) + n_scaled.abs() + 2 * den;
        for t in &self.terms {
            match t {
                Const(c) => {
                    if n_scaled == 0 {
                        op.push(c.clone(), vec![]);
                    }
                }
                Lin(c, (g, deriv)) => {
                    let gen = &module.spec.gens[*g as usize];
                    if !on_lattice(n, &gen.offset) {
                        continue;
                    }
                    let mut coeff = c.clone();
                    if *deriv {
                        coeff = coeff * S::from_q(&(-n.clone() - &gen.weight));
                    }
                    op.push(coeff, vec![(*g, n_scaled)]);
                }
                No(c, (ga, da), (gb, db)) => {
                    let a = &module.spec.gens[*ga as usize];
                    let b = &module.spec.gens[*gb as usize];
                    let thr_a = scale(&a.threshold, den);
                    // m runs over a's lattice; the partner mode must lie on
                    // b's lattice
                    let start = scale(&a.offset, den) - (band / den + 1) * den;
                    let mut m = start;
                    while m <= band {
                        let mb = n_scaled - m;
                        if mb.abs() <= band && on_lattice(&q(mb, den), &b.offset) {
                            let mut coeff = c.clone();
                            if *da {
                                coeff = coeff * S::from_q(&(-q(m, den) - &a.weight));
                            }
                            if *db {
                                coeff = coeff * S::from_q(&(-q(mb, den) - &b.weight));
                            }
                            if m < thr_a {
                                op.push(coeff, vec![(*ga, m), (*gb, mb)]);
                            } else {
                                let sign = if a.parity.is_odd() && b.parity.is_odd() {
                                    -S::one()
                                } else {
                                    S::one()
                                };
                                op.push(coeff * sign, vec![(*gb, mb), (*ga, m)]);
                            }
                        }
                        m += den;
                    }
                }
            }
        }
        op
    }

    pub fn mode_matrix(&self, module: &FockModule<S>, n: &Q) -> ModeOp<S> {
        ModeOp::from_op(module, &self.mode(module, n), -n.clone())
    }
}

fn on_lattice(v: &Q, offset: &Q) -> bool {
    (v.clone() - offset).is_integer()
}

/// A realized family: module, fields aligned with the abstract
/// presentation's generators, and the presentation itself.
pub struct Realization<S: Scalar> {
    pub module: FockModule<S>,
    pub fields: Vec<RealField<S>>,
    pub pres: Presentation,
}

/// Report for one bracket relation on the realization.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub max_degree_verified: String,
    pub status: String,
}

impl<S: Scalar> Realization<S> {
    pub fn field(&self, name: &str) -> &RealField<S> {
        self.fields.iter().find(|f| f.name == name).unwrap_or_else(|| panic!("no field {name}"))
    }

    /// Verifies every presentation bracket `[X_m, Y_n]` for modes within
    /// `|m|, |n| <= window` on the columns where truncation cannot leak.
    pub fn verify_presentation(&self, window: &Q) -> Vec<RelationReport> {
        let mut cache: BTreeMap<(usize, String), ModeOp<S>> = BTreeMap::new();
        let mut mode_of = |gen: usize, m: &Q| -> ModeOp<S> {
            cache
                .entry((gen, m.to_string()))
                .or_insert_with(|| self.fields[gen].mode_matrix(&self.module, m))
                .clone()
        };
        let mut reports = Vec::new();
        for (gi, fx) in self.fields.iter().enumerate() {
            for (gj, fy) in self.fields.iter().enumerate() {
                if gj < gi {
                    continue;
                }
                let mut max_checked: Option<Q> = None;
                let mut failed = false;
                let mut columns = 0usize;
                for m in lattice_window(&fx.offset, window) {
                    for n in lattice_window(&fy.offset, window) {
                        let a = mode_of(gi, &m);
                        let b = mode_of(gj, &n);
                        let odd_pair = fx.parity.is_odd() && fy.parity.is_odd();
                        let lhs = a.commutator(&b, odd_pair);
                        let rhs = self.bracket_rhs_cached(gi, &m, gj, &n, &mut mode_of);
                        for col in 0..self.module.dim() {
                            let (Some(lc), Some(rc)) = (&lhs.cols[col], &rhs.cols[col]) else {
                                continue;
                            };
                            columns += 1;
                            if lc != rc {
                                failed = true;
                            } else {
                                let deg = q(self.module.degrees[col], self.module.den);
                                if max_checked.as_ref().map_or(true, |d| deg > *d) {
                                    max_checked = Some(deg);
                                }
                            }
                        }
                    }
                }
                reports.push(RelationReport {
                    relation: format!("[{}, {}]", fx.name, fy.name),
                    max_degree_verified: max_checked
                        .map(|d| d.to_string())
                        .unwrap_or_else(|| "none".into()),
                    status: if failed {
                        "mismatch".into()
                    } else if columns == 0 {
                        "empty window".into()
                    } else {
                        "ok".into()
                    },
                });
            }
        }
        reports
    }

    /// Right-hand side of `[X_m, Y_n]` from the presentation, rescaled by
    /// the realized normalizations (the square roots always cancel).
    pub fn bracket_rhs(&self, gi: usize, m: &Q, gj: usize, n: &Q) -> ModeOp<S> {
        let mut plain = |gen: usize, mm: &Q| self.fields[gen].mode_matrix(&self.module, mm);
        self.bracket_rhs_cached(gi, m, gj, n, &mut plain)
    }

    fn bracket_rhs_cached(
        &self,
        gi: usize,
        m: &Q,
        gj: usize,
        n: &Q,
        mode_of: &mut impl FnMut(usize, &Q) -> ModeOp<S>,
    ) -> ModeOp<S> {
        let (terms, central) = self.pres.bracket(gi, m, gj, n);
        let rho_x = &self.fields[gi].rho2;
        let rho_y = &self.fields[gj].rho2;
        let dim = self.module.dim();
        let shift = -(m.clone() + n);
        let mut acc = ModeOp {
            cols: (0..dim).map(|_| Some(BTreeMap::new())).collect(),
            shift: shift.clone(),
        };
        for (co, gz, mz) in terms {
            let rho_z = &self.fields[gz].rho2;
            let ratio = rho_z.clone() / (rho_x.clone() * rho_y);
            let factor = sqrt_exact(&ratio)
                .expect("normalization ratios must be rational squares");
            let zmat = mode_of(gz, &mz);
            acc = acc.add(&zmat.scale(&S::from_q(&(co * factor))));
        }
        if !central.is_zero() {
            let ratio = Q::one() / (rho_x.clone() * rho_y);
            let factor = sqrt_exact(&ratio).expect("central rescale must be rational");
            let cval = S::from_q(&(central * factor));
            let idmat = ModeOp {
                cols: (0..dim)
                    .map(|i| {
                        let mut m = BTreeMap::new();
                        m.insert(i, cval.clone());
                        Some(m)
                    })
                    .collect(),
                shift,
            };
            acc = acc.add(&idmat);
        }
        acc
    }

    /// Central charge from `[L_2, L_{-2}] - 4 L_0` on the vacuum.
    pub fn central_charge(&self) -> Option<S> {
        let l = self.field("L");
        let l2 = l.mode_matrix(&self.module, &qi(2));
        let lm2 = l.mode_matrix(&self.module, &qi(-2));
        let l0 = l.mode_matrix(&self.module, &Q::zero());
        let comm = l2.commutator(&lm2, false);
        let four_l0 = l0.scale(&S::from_int(4));
        let diff = comm.add(&four_l0.scale(&(-S::one())));
        let v = self.module.vacuum();
        diff.eigenvalue(v).map(|e| e * S::from_int(2))
    }

    /// Eigenvalue of a realized zero mode on the vacuum column.
    pub fn vacuum_eigenvalue(&self, name: &str) -> Option<S> {
        let f = self.field(name);
        let m0 = f.mode_matrix(&self.module, &Q::zero());
        m0.eigenvalue(self.module.vacuum())
    }
}

fn lattice_window(offset: &Q, window: &Q) -> Vec<Q> {
    let mut out = Vec::new();
    let mut m = offset.clone() - window.floor() - Q::one();
    while m <= *window {
        if m.clone().abs() <= *window {
            out.push(m.clone());
        }
        m += Q::one();
    }
    out
}

/// Exact square root of a rational, if it exists.
pub fn sqrt_exact(v: &Q) -> Option<Q> {
    if v.is_zero() {
        return Some(Q::zero());
    }
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(n.clone() * &n) == v.numer() && &(d.clone() * &d) == v.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Family realizations.
// ---------------------------------------------------------------------------

/// Scalars for the Ramond realization: sqrt(2) and sqrt(2k+3) adjoined.
pub type RamondScalar = Sqrt<Sqrt<Q>>;

/// Scalars for the two sl(2|1) realizations: sqrt(-(k+1)) adjoined.
pub type N2Scalar = Sqrt<Q>;

fn fgen(name: &str, parity: Parity, offset: Q, weight: Q, threshold: Q, momentum: Q) -> FockGen {
    FockGen { name: name.into(), parity, offset, weight, threshold, momentum }
}

/// Ramond realization: one free boson, one integer-moded fermion.
pub fn realize_ramond(k: &Q, depth: &Q, momentum: &Q) -> Result<Realization<RamondScalar>, String> {
    let pres = presentation(&Family::RamondN1, k)?;
    let spec = FockSpec {
        gens: vec![
            fgen("b", Parity::Even, Q::zero(), Q::one(), Q::zero(), momentum.clone()),
            fgen("Phi", Parity::Odd, Q::zero(), q(1, 2), q(1, 2), Q::zero()),
        ],
        brackets: vec![
            vec![(Q::one(), 1), (Q::zero(), 0)],
            vec![(Q::zero(), 0), (Q::one(), 0)],
        ],
    };
    let module: FockModule<RamondScalar> = FockModule::new(spec, depth);
    type S = RamondScalar;
    let rt2: S = Sqrt::rational(Sqrt::root(qi(2)));
    let root_2k3: S = Sqrt::root(Sqrt::rational(qi(2) * k + qi(3)));
    if (qi(2) * k + qi(3)).is_zero() {
        return Err("degenerate radical 2k+3 = 0".into());
    }
    let gamma = Sqrt::rational(Sqrt::rational(k.clone() + Q::one())) / root_2k3;
    let half = S::from_q(&q(1, 2));
    let b = 0u8;
    let phi = 1u8;
    let l = RealField {
        name: "L".into(),
        parity: Parity::Even,
        weight: qi(2),
        offset: Q::zero(),
        rho2: Q::one(),
        terms: vec![
            No(half.clone(), (b, false), (b, false)),
            Lin(gamma.clone(), (b, true)),
            No(-half.clone(), (phi, false), (phi, true)),
            Const(S::from_q(&q(-1, 16))),
        ],
    };
    let g = RealField {
        name: "G".into(),
        parity: Parity::Odd,
        weight: q(3, 2),
        offset: Q::zero(),
        rho2: qi(2),
        terms: vec![
            No(S::one() / rt2.clone(), (phi, false), (b, false)),
            Lin(rt2 * gamma, (phi, true)),
        ],
    };
    Ok(Realization { module, fields: vec![l, g], pres })
}

/// Phase-family realization of sl(2|1): two bosons, two fermions.
pub fn realize_n2_ramond(
    a: &Q,
    k: &Q,
    depth: &Q,
    momenta: (&Q, &Q),
) -> Result<Realization<N2Scalar>, String> {
    let pres = presentation(&Family::N2Ramond { a: a.clone() }, k)?;
    let kp1 = k.clone() + Q::one();
    let off1 = canonical(&(q(1, 2) + a));
    let off2 = canonical(&(q(1, 2) - a));
    let spec = FockSpec {
        gens: vec![
            fgen("h1", Parity::Even, Q::zero(), Q::one(), Q::zero(), momenta.0.clone()),
            fgen("h2", Parity::Even, Q::zero(), Q::one(), Q::zero(), momenta.1.clone()),
            fgen("Phi1", Parity::Odd, off1, q(1, 2), q(1, 2) + a, Q::zero()),
            fgen("Phi2", Parity::Odd, off2, q(1, 2), q(1, 2) - a, Q::zero()),
        ],
        brackets: vec![
            vec![(Q::zero(), 1), (kp1.clone(), 1), (Q::zero(), 0), (Q::zero(), 0)],
            vec![(kp1.clone(), 1), (Q::zero(), 1), (Q::zero(), 0), (Q::zero(), 0)],
            vec![(Q::zero(), 0), (Q::zero(), 0), (Q::zero(), 0), (-Q::one(), 0)],
            vec![(Q::zero(), 0), (Q::zero(), 0), (-Q::one(), 0), (Q::zero(), 0)],
        ],
    };
    let module: FockModule<N2Scalar> = FockModule::new(spec, depth);
    type S = N2Scalar;
    let beta: S = {
        let rad = -(k.clone() + Q::one());
        if rad.is_zero() {
            return Err("degenerate radical k + 1 = 0".into());
        }
        S::one() / Sqrt::root(rad)
    };
    let (h1, h2, p1, p2) = (0u8, 1u8, 2u8, 3u8);
    let half = S::from_q(&q(1, 2));
    let l = RealField {
        name: "L".into(),
        parity: Parity::Even,
        weight: qi(2),
        offset: Q::zero(),
        rho2: Q::one(),
        terms: vec![
            No(S::from_q(&(Q::one() / &kp1)), (h1, false), (h2, false)),
            No(half.clone(), (p1, false), (p2, true)),
            No(half.clone(), (p2, false), (p1, true)),
            Lin(half.clone(), (h1, true)),
            Lin(half.clone(), (h2, true)),
            Const(S::from_q(&(a.clone() * a / qi(2)))),
        ],
    };
    let j = RealField {
        name: "J".into(),
        parity: Parity::Even,
        weight: Q::one(),
        offset: Q::zero(),
        rho2: Q::one(),
        terms: vec![
            Lin(S::one(), (h1, false)),
            Lin(-S::one(), (h2, false)),
            No(S::one(), (p1, false), (p2, false)),
            Const(S::from_q(a)),
        ],
    };
    let gp = RealField {
        name: "G+".into(),
        parity: Parity::Odd,
        weight: q(3, 2),
        offset: canonical(&(q(1, 2) - a)),
        rho2: qi(2),
        terms: vec![
            No(beta.clone(), (p2, false), (h1, false)),
            Lin(beta.clone() * S::from_q(&kp1), (p2, true)),
        ],
    };
    let gm = RealField {
        name: "G-".into(),
        parity: Parity::Odd,
        weight: q(3, 2),
        offset: canonical(&(q(1, 2) + a)),
        rho2: qi(2),
        terms: vec![
            No(beta.clone(), (p1, false), (h2, false)),
            Lin(beta * S::from_q(&kp1), (p1, true)),
        ],
    };
    Ok(Realization { module, fields: vec![l, j, gp, gm], pres })
}

/// Twisted-involution realization of sl(2|1).
pub fn realize_n2_twisted(
    k: &Q,
    depth: &Q,
    momentum: &Q,
) -> Result<Realization<N2Scalar>, String> {
    let pres = presentation(&Family::N2Twisted, k)?;
    let kp1 = k.clone() + Q::one();
    let spec = FockSpec {
        gens: vec![
            fgen("x", Parity::Even, Q::zero(), Q::one(), Q::zero(), momentum.clone()),
            fgen("H", Parity::Even, q(1, 2), Q::one(), q(1, 2), Q::zero()),
            fgen("Phi1", Parity::Odd, q(1, 2), q(1, 2), q(1, 2), Q::zero()),
            fgen("Phi2", Parity::Odd, Q::zero(), q(1, 2), q(1, 2), Q::zero()),
        ],
        brackets: vec![
            vec![(kp1.clone() / qi(2), 1), (Q::zero(), 1), (Q::zero(), 0), (Q::zero(), 0)],
            vec![(Q::zero(), 1), (qi(-2) * &kp1, 1), (Q::zero(), 0), (Q::zero(), 0)],
            vec![(Q::zero(), 0), (Q::zero(), 0), (-Q::one(), 0), (Q::zero(), 0)],
            vec![(Q::zero(), 0), (Q::zero(), 0), (Q::zero(), 0), (Q::one(), 0)],
        ],
    };
    let module: FockModule<N2Scalar> = FockModule::new(spec, depth);
    type S = N2Scalar;
    let beta: S = {
        let rad = -(k.clone() + Q::one());
        if rad.is_zero() {
            return Err("degenerate radical k + 1 = 0".into());
        }
        S::one() / Sqrt::root(rad)
    };
    let (x, hh, p1, p2) = (0u8, 1u8, 2u8, 3u8);
    let half = S::from_q(&q(1, 2));
    let quarter = S::from_q(&q(1, 4));
    let inv = S::from_q(&(Q::one() / &kp1));
    let l = RealField {
        name: "L".into(),
        parity: Parity::Even,
        weight: qi(2),
        offset: Q::zero(),
        rho2: Q::one(),
        terms: vec![
            No(inv.clone(), (x, false), (x, false)),
            No(-inv * quarter, (hh, false), (hh, false)),
            No(half.clone(), (p1, false), (p1, true)),
            No(-half.clone(), (p2, false), (p2, true)),
            Lin(S::one(), (x, true)),
        ],
    };
    let j = RealField {
        name: "J".into(),
        parity: Parity::Even,
        weight: Q::one(),
        offset: q(1, 2),
        rho2: Q::one(),
        terms: vec![
            Lin(S::one(), (hh, false)),
            No(-S::one(), (p1, false), (p2, false)),
        ],
    };
    let g1 = RealField {
        name: "G1".into(),
        parity: Parity::Odd,
        weight: q(3, 2),
        offset: q(1, 2),
        rho2: Q::one(),
        terms: vec![
            No(beta.clone(), (p1, false), (x, false)),
            No(-beta.clone() * half.clone(), (p2, false), (hh, false)),
            Lin(beta.clone() * S::from_q(&kp1), (p1, true)),
        ],
    };
    let g2 = RealField {
        name: "G2".into(),
        parity: Parity::Odd,
        weight: q(3, 2),
        offset: Q::zero(),
        rho2: Q::one(),
        terms: vec![
            No(beta.clone(), (p2, false), (x, false)),
            // closure of [J, G1] and [L, G2] forces these two signs; the
            // squared-zero-mode anchor is quadratic and cannot see them
            No(-beta.clone() * half, (p1, false), (hh, false)),
            Lin(beta * S::from_q(&kp1), (p2, true)),
        ],
    };
    Ok(Realization { module, fields: vec![l, j, g1, g2], pres })
}

/// Root-free rescaling of the Ramond odd generator: `sqrt(2(2k+3)) G`
/// lives over the single extension `Q(sqrt(2k+3))`; bracket right-hand
/// sides rescale by the exact rational `2(2k+3)`.
pub fn realize_ramond_rescaled(
    k: &Q,
    depth: &Q,
    momentum: &Q,
) -> Result<Realization<N2Scalar>, String> {
    let pres = presentation(&Family::RamondN1, k)?;
    let spec = FockSpec {
        gens: vec![
            fgen("b", Parity::Even, Q::zero(), Q::one(), Q::zero(), momentum.clone()),
            fgen("Phi", Parity::Odd, Q::zero(), q(1, 2), q(1, 2), Q::zero()),
        ],
        brackets: vec![
            vec![(Q::one(), 1), (Q::zero(), 0)],
            vec![(Q::zero(), 0), (Q::one(), 0)],
        ],
    };
    let module: FockModule<N2Scalar> = FockModule::new(spec, depth);
    type S = N2Scalar;
    let rad = qi(2) * k + qi(3);
    if rad.is_zero() {
        return Err("degenerate radical 2k+3 = 0".into());
    }
    let root: S = Sqrt::root(rad.clone());
    let gamma = S::from_q(&(k.clone() + Q::one())) / root.clone();
    let half = S::from_q(&q(1, 2));
    let (b, phi) = (0u8, 1u8);
    let l = RealField {
        name: "L".into(),
        parity: Parity::Even,
        weight: qi(2),
        offset: Q::zero(),
        rho2: Q::one(),
        terms: vec![
            No(half.clone(), (b, false), (b, false)),
            Lin(gamma, (b, true)),
            No(-half, (phi, false), (phi, true)),
            Const(S::from_q(&q(-1, 16))),
        ],
    };
    // sqrt(2(2k+3)) G = sqrt(2k+3) :Phi b: + 2(k+1) dPhi, which equals
    // sqrt(2k+3) times the presentation-normalized generator
    let g = RealField {
        name: "G".into(),
        parity: Parity::Odd,
        weight: q(3, 2),
        offset: Q::zero(),
        rho2: Q::one() / &rad,
        terms: vec![
            No(root, (phi, false), (b, false)),
            Lin(S::from_q(&(qi(2) * (k.clone() + Q::one()))), (phi, true)),
        ],
    };
    Ok(Realization { module, fields: vec![l, g], pres })
}

fn canonical(v: &Q) -> Q {
    v - v.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{
        highest_weight_h_at, j_eigenvalue, reduction_constants, s_values, Setup, SetupPreset,
        Weight,
    };

    fn rational<S: Scalar>(v: &S) -> Q
    where
        S: RationalPart,
    {
        v.rational_value()
    }

    trait RationalPart {
        fn rational_value(&self) -> Q;
    }
    impl RationalPart for Sqrt<Q> {
        fn rational_value(&self) -> Q {
            self.expect_rational()
        }
    }
    impl RationalPart for Sqrt<Sqrt<Q>> {
        fn rational_value(&self) -> Q {
            self.expect_rational().expect_rational()
        }
    }

    #[test]
    fn free_brackets_hold_on_safe_windows() {
        let r = realize_ramond(&Q::zero(), &qi(4), &Q::zero()).unwrap();
        let m = &r.module;
        // [Phi_m, Phi_n] = delta_{m,-n} for |m|, |n| <= 2
        for mm in -2..=2i64 {
            for nn in -2..=2i64 {
                let a = ModeOp::from_op(
                    m,
                    &Op { words: vec![(RamondScalar::one(), vec![(1, mm * m.den)])] },
                    qi(-mm),
                );
                let b = ModeOp::from_op(
                    m,
                    &Op { words: vec![(RamondScalar::one(), vec![(1, nn * m.den)])] },
                    qi(-nn),
                );
                let c = a.commutator(&b, true);
                for col in 0..m.dim() {
                    let Some(entries) = &c.cols[col] else { continue };
                    let expect = if mm + nn == 0 { RamondScalar::one() } else { RamondScalar::zero() };
                    let diag = entries.get(&col).cloned().unwrap_or_else(RamondScalar::zero);
                    assert_eq!(diag, expect, "fermion bracket ({mm},{nn})");
                    assert!(entries.iter().all(|(i, _)| *i == col));
                }
            }
        }
        // [b_m, b_n] = m delta_{m,-n}
        for mm in -2..=2i64 {
            let a = ModeOp::from_op(
                m,
                &Op { words: vec![(RamondScalar::one(), vec![(0, mm * m.den)])] },
                qi(-mm),
            );
            let b = ModeOp::from_op(
                m,
                &Op { words: vec![(RamondScalar::one(), vec![(0, -mm * m.den)])] },
                qi(mm),
            );
            let c = a.commutator(&b, false);
            let v = r.module.vacuum();
            if let Some(e) = c.eigenvalue(v) {
                assert_eq!(e, RamondScalar::from_int(mm));
            }
        }
    }

    #[test]
    fn ramond_relations_and_central_charge() {
        for k in [Q::zero(), Q::one(), q(1, 3)] {
            let r = realize_ramond(&k, &qi(4), &Q::zero()).unwrap();
            let reports = r.verify_presentation(&q(3, 2));
            for rep in &reports {
                assert_eq!(rep.status, "ok", "k={k}: {rep:?}");
            }
            // c(k) = 3/2 - 12 (k+1)^2/(2k+3)
            let c = r.central_charge().unwrap();
            let expect = q(3, 2) - qi(12) * (k.clone() + Q::one()).pow(2) / (qi(2) * &k + qi(3));
            assert_eq!(rational(&c), expect);
        }
        // k = -1: gamma = 0, c = 3/2
        let r = realize_ramond(&qi(-1), &qi(3), &Q::zero()).unwrap();
        assert_eq!(rational(&r.central_charge().unwrap()), q(3, 2));
    }

    #[test]
    fn n2_ramond_relations_and_j_vacuum() {
        let a = q(1, 4);
        for k in [Q::zero(), qi(-2)] {
            let r = realize_n2_ramond(&a, &k, &qi(3), (&Q::zero(), &Q::zero())).unwrap();
            let reports = r.verify_presentation(&Q::one());
            for rep in &reports {
                assert_eq!(rep.status, "ok", "k={k}: {rep:?}");
            }
            // J_0 on the vacuum = a
            assert_eq!(rational(&r.vacuum_eigenvalue("J").unwrap()), a);
            // c = -3(2k+1)
            let c = r.central_charge().unwrap();
            assert_eq!(rational(&c), qi(-3) * (qi(2) * &k + Q::one()));
        }
    }

    #[test]
    fn n2_twisted_relations_and_anchor() {
        for k in [Q::zero(), Q::one()] {
            let r = realize_n2_twisted(&k, &qi(3), &Q::zero()).unwrap();
            let reports = r.verify_presentation(&Q::one());
            for rep in &reports {
                assert_eq!(rep.status, "ok", "k={k}: {rep:?}");
            }
            // [G2_0, G2_0] = -(L_0 - c/24) verbatim on the vacuum
            let g2 = r.field("G2").mode_matrix(&r.module, &Q::zero());
            let comm = g2.commutator(&g2, true);
            let v = r.module.vacuum();
            let lhs = comm.eigenvalue(v).unwrap();
            let l0 = r.field("L").mode_matrix(&r.module, &Q::zero());
            let h0 = l0.eigenvalue(v).unwrap();
            let c = qi(-3) * (qi(2) * &k + Q::one());
            let rhs = -(rational(&h0) - c / qi(24));
            assert_eq!(rational(&lhs), rhs);
        }
        // c at k = -1 is 3... the realization degenerates there, use k=-2
        let r = realize_n2_twisted(&qi(-2), &qi(3), &Q::zero()).unwrap();
        assert_eq!(rational(&r.central_charge().unwrap()), qi(9));
    }

    #[test]
    fn highest_weights_match_reduction_constants() {
        // Ramond: Lambda(x) = p sqrt(2k+3)/2 - 1/4, checked in the extension
        for (k, p) in [(Q::zero(), Q::one()), (Q::one(), q(1, 2)), (q(1, 3), qi(2))] {
            let r = realize_ramond(&k, &qi(2), &p).unwrap();
            let v = r.module.vacuum();
            let h_real = r.field("L").mode_matrix(&r.module, &Q::zero()).eigenvalue(v).unwrap();
            type S = RamondScalar;
            let root: S = Sqrt::root(Sqrt::rational(qi(2) * &k + qi(3)));
            let ell = S::from_q(&p) * root / S::from_int(2) - S::from_q(&q(1, 4));
            // h = (1/(2(k+3/2)))((L|L) - 2(L|g')) - L(x) + s_g + s_gh with
            // (L|L) = 2 ell^2, (L|g') = -ell, L(x) = ell
            let two = S::from_int(2);
            let h_pred = (two.clone() * ell.clone() * ell.clone() + two.clone() * ell.clone())
                / (two.clone() * S::from_q(&(k.clone() + q(3, 2))))
                - ell
                + S::from_q(&(-k.clone() / (qi(4) * (qi(2) * &k + qi(3))) - q(1, 16)));
            assert_eq!(h_real, h_pred, "k={k}, p={p}");
        }

        // N=2 phase family: Lambda = (p1 + a, p2 - a) on the Cartan
        let a = q(1, 4);
        let setup = Setup::new(SetupPreset::N2Ramond(a.clone())).unwrap();
        let sv = s_values(&setup);
        let rc = reduction_constants(&setup, &sv);
        for (k, p1, p2) in [
            (Q::zero(), Q::one(), q(1, 2)),
            (Q::one(), q(-1, 3), Q::zero()),
            (qi(2), q(1, 5), q(2, 5)),
        ] {
            let r = realize_n2_ramond(&a, &k, &qi(2), (&p1, &p2)).unwrap();
            let v = r.module.vacuum();
            let h_real =
                rational(&r.field("L").mode_matrix(&r.module, &Q::zero()).eigenvalue(v).unwrap());
            let lambda = Weight { values: vec![p1.clone() + &a, p2.clone() - &a] };
            let h_pred = highest_weight_h_at(&setup, &rc, &lambda, &k).unwrap();
            assert_eq!(h_real, h_pred, "k={k} p=({p1},{p2})");
            // J_0 matches the current eigenvalue on H = h1 - h2
            let j_real =
                rational(&r.field("J").mode_matrix(&r.module, &Q::zero()).eigenvalue(v).unwrap());
            let j_pred =
                j_eigenvalue(&setup, &sv, &lambda, &[Q::one(), -Q::one()]).unwrap();
            assert_eq!(j_real, j_pred);
        }

        // twisted family: Lambda(x) = p - 1/4 on the fixed Cartan
        let setup = Setup::new(SetupPreset::N2Twisted).unwrap();
        let sv = s_values(&setup);
        let rc = reduction_constants(&setup, &sv);
        for (k, p) in [(Q::zero(), Q::one()), (Q::one(), q(1, 2)), (qi(2), q(-1, 3))] {
            let r = realize_n2_twisted(&k, &qi(2), &p).unwrap();
            let v = r.module.vacuum();
            let h_real =
                rational(&r.field("L").mode_matrix(&r.module, &Q::zero()).eigenvalue(v).unwrap());
            // the fixed Cartan is the x-line; the weight is p - 1/4 on it
            let lambda = Weight { values: vec![p.clone() - q(1, 4)] };
            let h_pred = highest_weight_h_at(&setup, &rc, &lambda, &k).unwrap();
            assert_eq!(h_real, h_pred, "k={k} p={p}");
        }
    }

    #[test]
    fn degree_bookkeeping() {
        let r = realize_ramond(&Q::one(), &qi(3), &Q::zero()).unwrap();
        for n in [-2i64, -1, 0, 1, 2] {
            let m = r.field("L").mode_matrix(&r.module, &qi(n));
            for col in 0..r.module.dim() {
                let Some(entries) = &m.cols[col] else { continue };
                for (i, _) in entries {
                    assert_eq!(
                        r.module.degrees[*i],
                        r.module.degrees[col] - n * r.module.den,
                        "L_{n} does not shift degree by -{n}"
                    );
                }
            }
        }
    }

    #[test]
    fn split_choice_absorbed_by_correction() {
        // the neutral Virasoro mode with boundary s and its correction
        // -(1/2) sign binom(s,2) is independent of the admissible s
        let r = realize_ramond(&Q::zero(), &qi(3), &Q::zero()).unwrap();
        let m = &r.module;
        type S = RamondScalar;
        let build = |thr: i64, s_val: Q| -> ModeOp<S> {
            // -(1/2) : Phi dPhi :_0 with split at thr, plus correction
            let mut op = Op::zero();
            let band = 4i64;
            for mm in -band..=band {
                let coeff = S::from_q(&(-q(1, 2) * (-qi(mm) - q(1, 2))));
                if mm < thr {
                    op.push(coeff, vec![(1, mm * m.den), (1, -mm * m.den)]);
                } else {
                    // odd pair reorder sign
                    op.push(-coeff, vec![(1, -mm * m.den), (1, mm * m.den)]);
                }
            }
            // Eq-style correction: -(1/2)(-1) binom(s,2) on the mode-zero
            op.push(S::from_q(&(crate::scalar::binom2(&s_val) / qi(2))), vec![]);
            ModeOp::from_op(m, &op, Q::zero())
        };
        // s = 1/2 (annihilators from mode 1) vs s = -1/2 (from mode 0)
        let a = build(1, q(1, 2));
        let b = build(0, q(-1, 2));
        for col in 0..m.dim() {
            if let (Some(ca), Some(cb)) = (&a.cols[col], &b.cols[col]) {
                assert_eq!(ca, cb, "split choice leaks at column {col}");
            }
        }
    }

    #[test]
    fn charged_pair_constant_absorbs_split_choice() {
        // the charged-pair Virasoro modes with the printed binomial
        // constant are independent of the admissible boundary choice
        let s_val = q(1, 4); // boundary in the current indexing
        let m_w = q(1, 2); // ghost weight
        // mode thresholds: phi anns from s + m_w, phi* from 1 - s - m_w
        let spec = FockSpec {
            gens: vec![
                fgen(
                    "phi",
                    Parity::Odd,
                    canonical(&(s_val.clone() + &m_w)),
                    Q::one() - &m_w,
                    s_val.clone() + &m_w,
                    Q::zero(),
                ),
                fgen(
                    "phi*",
                    Parity::Odd,
                    canonical(&(Q::one() - &s_val - &m_w)),
                    m_w.clone(),
                    Q::one() - &s_val - &m_w,
                    Q::zero(),
                ),
            ],
            brackets: vec![
                vec![(Q::zero(), 0), (Q::one(), 0)],
                vec![(Q::one(), 0), (Q::zero(), 0)],
            ],
        };
        let module: FockModule<Sqrt<Q>> = FockModule::new(spec, &qi(3));
        type S = Sqrt<Q>;
        // L^{ch}_0 with a chosen split boundary sv for phi (and 1 - sv for
        // phi*), plus the printed constant (-1)^{p(phi)} binom(sv, 2)
        let build = |sv: Q| -> ModeOp<S> {
            let den = module.den;
            let band = 4i64;
            let mut op = Op::zero();
            // -m :phi* dphi:_0 + (1-m) :dphi* phi:_0 with explicit splits
            let thr_star = Q::one() - &sv - &m_w; // phi* boundary, mode units
            let thr_phi = sv.clone() + &m_w;
            for mm in -band..=band {
                let r = q(mm * den, den) + module.spec.gens[1].offset.clone();
                let r_sc = scale(&r, den);
                if r_sc.abs() > band * den {
                    continue;
                }
                // term 1: A = phi*, B = dphi at modes (r, -r)
                let dcoef = -(-r.clone()) - (Q::one() - &m_w); // (-m_B - w_B) at m_B = -r
                let c1 = S::from_q(&(-m_w.clone() * &dcoef));
                if r < thr_star {
                    op.push(c1, vec![(1, r_sc), (0, -r_sc)]);
                } else {
                    op.push(-c1, vec![(0, -r_sc), (1, r_sc)]);
                }
                // term 2: A = dphi*, B = phi at modes (r, -r)
                let dcoef2 = -r.clone() - &m_w;
                let c2 = S::from_q(&((Q::one() - &m_w) * dcoef2));
                if r < thr_star {
                    op.push(c2, vec![(1, r_sc), (0, -r_sc)]);
                } else {
                    op.push(-c2, vec![(0, -r_sc), (1, r_sc)]);
                }
                let _ = &thr_phi;
            }
            // the absorbing constant is the ghost summand binom(s,2) + m s
            op.push(S::from_q(&(crate::scalar::binom2(&sv) + m_w.clone() * &sv)), vec![]);
            ModeOp::from_op(&module, &op, Q::zero())
        };
        let a = build(s_val.clone());
        let b = build(s_val.clone() + Q::one());
        let c = build(s_val.clone() - Q::one());
        let mut compared = 0;
        for col in 0..module.dim() {
            if let (Some(ca), Some(cb), Some(cc)) = (&a.cols[col], &b.cols[col], &c.cols[col]) {
                assert_eq!(ca, cb, "split shift +1 leaks at column {col}");
                assert_eq!(ca, cc, "split shift -1 leaks at column {col}");
                compared += 1;
            }
        }
        assert!(compared > 0);
    }

    #[test]
    fn triple_correction_makes_split_independent() {
        // :a b c: - z^{-1}(s_b <b,c> a + s_a <a,b> c + s_a (-1)^{pa pb} <a,c> b)
        // does not depend on the admissible splits; exercise with three
        // pairwise-paired odd fermions at mode 0
        let spec = FockSpec {
            gens: vec![
                fgen("p1", Parity::Odd, Q::zero(), q(1, 2), q(1, 2), Q::zero()),
                fgen("p2", Parity::Odd, Q::zero(), q(1, 2), q(-1, 2), Q::zero()),
                fgen("p3", Parity::Odd, Q::zero(), q(1, 2), q(-1, 2), Q::zero()),
            ],
            brackets: vec![
                vec![(Q::one(), 0), (qi(2), 0), (qi(3), 0)],
                vec![(qi(2), 0), (Q::one(), 0), (qi(5), 0)],
                vec![(qi(3), 0), (qi(5), 0), (Q::one(), 0)],
            ],
        };
        let module: FockModule<Sqrt<Q>> = FockModule::new(spec, &qi(2));
        type S = Sqrt<Q>;
        let t: Q = Q::zero();
        let den = module.den;
        let tw_triple = |s_a: Q, s_b: Q| -> ModeOp<S> {
            // naive :a :bc:: with splits (s_a for a, s_b for b), minus the
            // stated corrections
            let band = 3i64;
            let mut op = Op::zero();
            for ma in -band..=band {
                for mb in -band..=band {
                    let mc = -ma - mb; // t = 0
                    if mc.abs() > band {
                        continue;
                    }
                    // inner :bc: with split s_b, then outer with split s_a
                    let inner: Vec<(Q, Vec<(u8, i64)>)> = if qi(mb) < s_b {
                        vec![(Q::one(), vec![(1, mb * den), (2, mc * den)])]
                    } else {
                        vec![(-Q::one(), vec![(2, mc * den), (1, mb * den)])]
                    };
                    for (ic, iw) in inner {
                        if qi(ma) < s_a {
                            let mut w = vec![(0u8, ma * den)];
                            w.extend(iw.iter().copied());
                            op.push(S::from_q(&ic), w);
                        } else {
                            // move a past the odd pair bc: sign (+1)
                            let mut w = iw.clone();
                            w.push((0u8, ma * den));
                            op.push(S::from_q(&ic), w);
                        }
                    }
                }
            }
            // corrections at mode zero; the boundary values are the
            // split thresholds in the shifted indexing
            let sb = s_b.clone() - q(1, 2);
            let sa = s_a.clone() - q(1, 2);
            let bc = qi(5);
            let ab = qi(2);
            let ac = qi(3);
            op.push(S::from_q(&-(sb * bc)), vec![(0, 0)]);
            op.push(S::from_q(&-(sa.clone() * ab)), vec![(2, 0)]);
            op.push(S::from_q(&(sa * ac)), vec![(1, 0)]);
            let _ = t.clone();
            ModeOp::from_op(&module, &op, Q::zero())
        };
        let one = tw_triple(q(1, 2), q(1, 2));
        let other = tw_triple(q(-1, 2), q(3, 2));
        for col in 0..module.dim() {
            if let (Some(a), Some(b)) = (&one.cols[col], &other.cols[col]) {
                assert_eq!(a, b, "triple correction fails at column {col}");
            }
        }
    }
}
