//! Brute-force Verma-module oracle for the linear superconformal families.
//!
//! A presentation is a finite list of mode families with bracket closure
//! (central terms as exact rationals at a fixed level) and an
//! anti-involution.  Verma modules are built as ordered words of creation
//! operators acting on a highest-weight vector with symbolic `h` (and `j`)
//! eigenvalues; the contravariant form is computed by straightening
//! `omega(a) b` to normal order and reading off the highest-weight
//! coefficient.  Gram determinants come from fraction-free elimination and
//! are compared, up to a leading-coefficient normalization, against the
//! closed-form factorization.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::detform::{assemble, expand_at};
use crate::liealg::Parity;
use crate::partition::{Eta, Partitions};
use crate::poly::{det_bareiss, MPoly, VH, VJ};
use crate::rootdata::{Family, RootDatum};
use crate::scalar::{q, qi};
use crate::Q;

/// Polynomial ring of Gram entries: `h`, `j` over the rationals.
pub type GPoly = MPoly<Q>;

/// One generator family of a presentation.
#[derive(Clone, Debug)]
pub struct GenSpec {
    pub name: String,
    pub parity: Parity,
    /// Mode lattice `offset + Z`, canonicalized to `[0, 1)`.
    pub offset: Q,
    /// Weight-space shift per creation use, in restricted coordinates.
    pub w_charge: Vec<Q>,
    /// `omega(X_n) = omega_sign * partner_{-n}`.
    pub omega_partner: usize,
    pub omega_sign: Q,
}

#[derive(Clone, PartialEq, Debug)]
pub enum PresFamily {
    RamondN1,
    N2Ramond { a: Q },
    N2Twisted,
}

/// A superconformal presentation at a fixed rational level.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub fam: PresFamily,
    pub gens: Vec<GenSpec>,
    pub k: Q,
    pub c: Q,
    /// Common denominator of all mode lattices.
    pub den: i64,
}

/// Indices of the generators per family, for readability.
const L: usize = 0;
const GG: usize = 1; // Ramond G
const J: usize = 1; // N=2 current
const GP: usize = 2;
const GM: usize = 3;
const G1: usize = 2;
const G2: usize = 3;

fn canon(v: &Q) -> Q {
    v - v.floor()
}

impl Presentation {
    pub fn new(fam: PresFamily, k: &Q) -> Result<Presentation, String> {
        let (c, gens) = match &fam {
            PresFamily::RamondN1 => {
                if *k == q(-3, 2) {
                    return Err("level at the pole k = -3/2".into());
                }
                let c = q(3, 2)
                    - qi(12) * (k + Q::one()) * (k + Q::one()) / (qi(2) * k + qi(3));
                let gens = vec![
                    gen("L", Parity::Even, Q::zero(), vec![], 0, Q::one()),
                    gen("G", Parity::Odd, Q::zero(), vec![], 1, Q::one()),
                ];
                (c, gens)
            }
            PresFamily::N2Ramond { a } => {
                if *k == qi(-1) {
                    return Err("level at the pole k = -1".into());
                }
                let c = qi(-3) * (qi(2) * k + Q::one());
                let gens = vec![
                    gen("L", Parity::Even, Q::zero(), vec![Q::zero()], 0, Q::one()),
                    gen("J", Parity::Even, Q::zero(), vec![Q::zero()], 1, Q::one()),
                    gen("G+", Parity::Odd, canon(&(q(1, 2) - a)), vec![-Q::one()], GM, Q::one()),
                    gen("G-", Parity::Odd, canon(&(q(1, 2) + a)), vec![Q::one()], GP, Q::one()),
                ];
                (c, gens)
            }
            PresFamily::N2Twisted => {
                if *k == qi(-1) {
                    return Err("level at the pole k = -1".into());
                }
                let c = qi(-3) * (qi(2) * k + Q::one());
                let gens = vec![
                    gen("L", Parity::Even, Q::zero(), vec![], 0, Q::one()),
                    gen("J", Parity::Even, q(1, 2), vec![], 1, Q::one()),
                    gen("G1", Parity::Odd, q(1, 2), vec![], G1, Q::one()),
                    gen("G2", Parity::Odd, Q::zero(), vec![], G2, -Q::one()),
                ];
                (c, gens)
            }
        };
        let den = gens
            .iter()
            .map(|g| g.offset.denom().to_i64().unwrap())
            .fold(2i64, |acc, d| acc.lcm(&d));
        let pres = Presentation { fam, gens, k: k.clone(), c, den };
        pres.check_consistency()?;
        Ok(pres)
    }

    /// Bracket closure `[X_m, Y_n]`: linear terms plus a central scalar.
    pub fn bracket(&self, gi: usize, m: &Q, gj: usize, n: &Q) -> (Vec<(Q, usize, Q)>, Q) {
        let c = &self.c;
        let s = m.clone() + n;
        let delta = (m.clone() + n).is_zero();
        let virasoro = |m: &Q, n: &Q| -> (Vec<(Q, usize, Q)>, Q) {
            let mut terms = vec![];
            let co = m.clone() - n;
            if !co.is_zero() {
                terms.push((co, L, m.clone() + n));
            }
            let central = if (m.clone() + n).is_zero() {
                c.clone() * (m.clone() * m * m - m) / qi(12)
            } else {
                Q::zero()
            };
            (terms, central)
        };
        let l_primary = |m: &Q, r: &Q, gen: usize, wt: Q| -> (Vec<(Q, usize, Q)>, Q) {
            // [L_m, X_r] = ((wt-1) m - r) X_{m+r}
            let co = (wt - Q::one()) * m - r;
            if co.is_zero() {
                (vec![], Q::zero())
            } else {
                (vec![(co, gen, m.clone() + r)], Q::zero())
            }
        };
        match (&self.fam, gi, gj) {
            (_, L, lx) if lx == L => virasoro(m, n),
            (PresFamily::RamondN1, L, GG) => l_primary(m, n, GG, q(3, 2)),
            (PresFamily::RamondN1, GG, L) => {
                let (t, z) = l_primary(n, m, GG, q(3, 2));
                (t.into_iter().map(|(co, g, mm)| (-co, g, mm)).collect(), -z)
            }
            (PresFamily::RamondN1, GG, gx) if gx == GG => {
                let central = if delta {
                    c.clone() * (m.clone() * m - q(1, 4)) / qi(3)
                } else {
                    Q::zero()
                };
                (vec![(qi(2), L, s)], central)
            }
            (PresFamily::N2Ramond { .. }, _, _) | (PresFamily::N2Twisted, _, _) => {
                self.bracket_n2(gi, m, gj, n)
            }
            _ => unreachable!("bracket ({gi},{gj}) not covered"),
        }
    }

    fn bracket_n2(&self, gi: usize, m: &Q, gj: usize, n: &Q) -> (Vec<(Q, usize, Q)>, Q) {
        let c = &self.c;
        let s = m.clone() + n;
        let delta = s.is_zero();
        let weight: fn(usize) -> Q = |g| match g {
            L => qi(2),
            J => Q::one(),
            _ => q(3, 2),
        };
        if gi == L || gj == L {
            if gi == L && gj == L {
                unreachable!("handled above");
            }
            let (other, om, on, flip) =
                if gi == L { (gj, m, n, false) } else { (gi, n, m, true) };
            let co = (weight(other) - Q::one()) * om - on;
            let sign = if flip { -Q::one() } else { Q::one() };
            if co.is_zero() {
                return (vec![], Q::zero());
            }
            return (vec![(sign * co, other, s)], Q::zero());
        }
        match &self.fam {
            PresFamily::N2Ramond { .. } => match (gi, gj) {
                (J, jx) if jx == J => {
                    let central = if delta { c.clone() * m / qi(3) } else { Q::zero() };
                    (vec![], central)
                }
                (J, GP) => (vec![(Q::one(), GP, s)], Q::zero()),
                (J, GM) => (vec![(-Q::one(), GM, s)], Q::zero()),
                (GP, J) => (vec![(-Q::one(), GP, s)], Q::zero()),
                (GM, J) => (vec![(Q::one(), GM, s)], Q::zero()),
                (GP, GM) | (GM, GP) => {
                    // [G+_r, G-_t] = 2 L + (r - t) J + (c/3)(r^2 - 1/4) delta
                    let (r, t) = if gi == GP { (m, n) } else { (n, m) };
                    let mut terms = vec![(qi(2), L, s.clone())];
                    let co = r.clone() - t;
                    if !co.is_zero() {
                        terms.push((co, J, s));
                    }
                    let central = if delta {
                        c.clone() * (r.clone() * r - q(1, 4)) / qi(3)
                    } else {
                        Q::zero()
                    };
                    (terms, central)
                }
                (GP, gpx) if gpx == GP => (vec![], Q::zero()),
                (GM, gmx) if gmx == GM => (vec![], Q::zero()),
                _ => unreachable!(),
            },
            PresFamily::N2Twisted => match (gi, gj) {
                (J, jx) if jx == J => {
                    let central = if delta { c.clone() * m / qi(3) } else { Q::zero() };
                    (vec![], central)
                }
                (J, G1) | (G1, J) => {
                    // signs pinned by the free-field realization
                    let sign = if gi == J { -Q::one() } else { Q::one() };
                    (vec![(sign, G2, s)], Q::zero())
                }
                (J, G2) | (G2, J) => {
                    let sign = if gi == J { -Q::one() } else { Q::one() };
                    (vec![(sign, G1, s)], Q::zero())
                }
                (G1, gx) if gx == G1 => {
                    let central = if delta {
                        c.clone() * (m.clone() * m - q(1, 4)) / qi(6)
                    } else {
                        Q::zero()
                    };
                    (vec![(Q::one(), L, s)], central)
                }
                (G2, gx) if gx == G2 => {
                    let central = if delta {
                        -c.clone() * (m.clone() * m - q(1, 4)) / qi(6)
                    } else {
                        Q::zero()
                    };
                    (vec![(-Q::one(), L, s)], central)
                }
                (G1, G2) | (G2, G1) => {
                    // [G1_r, G2_t] = ((r - t)/2) J_{r+t}, symmetric in odd pairs
                    let (r, t) = if gi == G1 { (m, n) } else { (n, m) };
                    let co = (r.clone() - t) / qi(2);
                    if co.is_zero() {
                        (vec![], Q::zero())
                    } else {
                        (vec![(co, J, s)], Q::zero())
                    }
                }
                _ => unreachable!(),
            },
            PresFamily::RamondN1 => unreachable!(),
        }
    }

    /// Super-Jacobi and anti-involution checks on a finite mode window.
    fn check_consistency(&self) -> Result<(), String> {
        let window: Vec<(usize, Q)> = self
            .gens
            .iter()
            .enumerate()
            .flat_map(|(gi, g)| {
                let mut modes = vec![];
                let mut m = g.offset.clone() - qi(3);
                while m <= qi(3) {
                    modes.push((gi, m.clone()));
                    m += Q::one();
                }
                modes
            })
            .collect();
        // formal elements: map (gen, mode) -> coeff, plus a central line
        type Elem = (BTreeMap<(usize, String), (usize, Q, Q)>, Q);
        let add_term = |e: &mut Elem, co: Q, g: usize, m: Q| {
            if co.is_zero() {
                return;
            }
            let key = (g, m.to_string());
            let entry = e.0.entry(key).or_insert((g, m, Q::zero()));
            entry.2 += co;
        };
        let bracket_elem = |a: &(usize, Q), b: &(usize, Q)| -> Elem {
            let (terms, central) = self.bracket(a.0, &a.1, b.0, &b.1);
            let mut e: Elem = (BTreeMap::new(), central);
            for (co, g, m) in terms {
                add_term(&mut e, co, g, m);
            }
            e
        };
        let parity = |g: usize| self.gens[g].parity;
        for a in &window {
            for b in &window {
                // super skew-symmetry
                let ab = bracket_elem(a, b);
                let ba = bracket_elem(b, a);
                let sign = if parity(a.0).is_odd() && parity(b.0).is_odd() {
                    Q::one()
                } else {
                    -Q::one()
                };
                let mut diff = ab.1.clone() - sign.clone() * &ba.1;
                let mut keys: Vec<_> = ab.0.keys().chain(ba.0.keys()).cloned().collect();
                keys.dedup();
                let mut bad = !diff.is_zero();
                for k in keys {
                    let ca = ab.0.get(&k).map(|t| t.2.clone()).unwrap_or_else(Q::zero);
                    let cb = ba.0.get(&k).map(|t| t.2.clone()).unwrap_or_else(Q::zero);
                    diff = ca - sign.clone() * cb;
                    if !diff.is_zero() {
                        bad = true;
                    }
                }
                if bad {
                    return Err(format!("bracket not super-skew on {a:?}, {b:?}"));
                }
            }
        }
        for a in &window {
            for b in &window {
                for cc in &window {
                    if !self.jacobi_ok(a, b, cc) {
                        return Err(format!("Jacobi fails on {a:?}, {b:?}, {cc:?}"));
                    }
                }
            }
        }
        // omega is an anti-involution on the window
        for a in &window {
            for b in &window {
                let (terms, central) = self.bracket(a.0, &a.1, b.0, &b.1);
                let oa = (self.gens[a.0].omega_partner, -a.1.clone());
                let ob = (self.gens[b.0].omega_partner, -b.1.clone());
                let sa = self.gens[a.0].omega_sign.clone();
                let sb = self.gens[b.0].omega_sign.clone();
                let (rterms, rcentral) = self.bracket(ob.0, &ob.1, oa.0, &oa.1);
                // omega([a,b]) = [omega(b), omega(a)]
                let mut lhs: BTreeMap<(usize, String), Q> = BTreeMap::new();
                let mut lcentral = central;
                for (co, g, m) in terms {
                    let og = self.gens[g].omega_partner;
                    let os = self.gens[g].omega_sign.clone();
                    *lhs.entry((og, (-m).to_string())).or_insert_with(Q::zero) += co * os;
                }
                lcentral *= Q::one(); // central terms are omega-fixed
                let mut rhs: BTreeMap<(usize, String), Q> = BTreeMap::new();
                let rc = rcentral * sa.clone() * sb.clone();
                for (co, g, m) in rterms {
                    *rhs.entry((g, m.to_string())).or_insert_with(Q::zero) +=
                        co * sa.clone() * sb.clone();
                }
                if lhs != rhs || lcentral != rc {
                    return Err(format!("omega fails to reverse bracket on {a:?}, {b:?}"));
                }
            }
        }
        Ok(())
    }

    fn jacobi_ok(&self, a: &(usize, Q), b: &(usize, Q), c: &(usize, Q)) -> bool {
        // (-1)^{p(a)p(c)} [a,[b,c]] + cyclic = 0
        let parity = |g: usize| self.gens[g].parity;
        let mut acc: BTreeMap<(usize, String), (usize, Q, Q)> = BTreeMap::new();
        let mut acc_central = Q::zero();
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            let sign = if parity(x.0).is_odd() && parity(z.0).is_odd() {
                -Q::one()
            } else {
                Q::one()
            };
            let (inner, inner_central) = self.bracket(y.0, &y.1, z.0, &z.1);
            let _ = inner_central; // [x, central] = 0
            for (co, g, m) in inner {
                let (terms, central) = self.bracket(x.0, &x.1, g, &m);
                acc_central += sign.clone() * co.clone() * central;
                for (co2, g2, m2) in terms {
                    let e = acc
                        .entry((g2, m2.to_string()))
                        .or_insert((g2, m2.clone(), Q::zero()));
                    e.2 += sign.clone() * co.clone() * co2;
                }
            }
        }
        acc_central.is_zero() && acc.values().all(|(_, _, co)| co.is_zero())
    }
}

fn gen(
    name: &str,
    parity: Parity,
    offset: Q,
    w_charge: Vec<Q>,
    omega_partner: usize,
    omega_sign: Q,
) -> GenSpec {
    GenSpec { name: name.into(), parity, offset, w_charge, omega_partner, omega_sign }
}

/// Builds the presentation for one of the linear families.
pub fn presentation(family: &Family, k: &Q) -> Result<Presentation, String> {
    match family {
        Family::RamondN1 => Presentation::new(PresFamily::RamondN1, k),
        Family::N2Ramond { a } => Presentation::new(PresFamily::N2Ramond { a: a.clone() }, k),
        Family::N2Twisted => Presentation::new(PresFamily::N2Twisted, k),
        _ => Err("no linear presentation for this family".into()),
    }
}

/// An ordered word of creation operators, encoded as (generator, mode).
type Word = Vec<(usize, i64)>; // mode scaled by the presentation denominator

/// Normal-order position key: decreasing depth, then generator index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum OrderConvention {
    Standard,
    Alternate,
}

fn op_key(conv: OrderConvention, g: usize, m: i64) -> (i64, i64) {
    match conv {
        OrderConvention::Standard => (m, g as i64),
        OrderConvention::Alternate => (m, -(g as i64)),
    }
}

type State = BTreeMap<Word, GPoly>;

/// A truncated Verma module with symbolic highest weight.
pub struct VermaModule {
    pub pres: Presentation,
    pub depth: Q,
    pub conv: OrderConvention,
    /// Weight spaces keyed by (scaled level, scaled charge).
    pub spaces: BTreeMap<(i64, Vec<i64>), Vec<Word>>,
    charge_den: i64,
    memo: RefCell<HashMap<(usize, i64, Word), State>>,
}

impl VermaModule {
    pub fn new(pres: Presentation, depth: &Q, conv: OrderConvention) -> VermaModule {
        let den = pres.den;
        let charge_den = 2; // restricted coordinates are half-integral at most
        // creation modes: m < 0 on the lattice, plus odd zero modes
        let mut ops: Vec<(usize, i64)> = Vec::new();
        for (gi, g) in pres.gens.iter().enumerate() {
            let mut m = if g.offset.is_zero() { Q::zero() } else { g.offset.clone() - Q::one() };
            loop {
                if -m.clone() > *depth {
                    break;
                }
                let creation = m.is_negative() || (m.is_zero() && g.parity.is_odd());
                if creation {
                    let scaled = (m.clone() * qi(den)).to_integer().to_i64().unwrap();
                    ops.push((gi, scaled));
                }
                m -= Q::one();
            }
        }
        // sort by normal-order key so word generation emits ordered words:
        // descending depth means ascending scaled mode from most negative...
        // normal order: decreasing depth = increasing mode value
        ops.sort_by_key(|&(g, m)| op_key(conv, g, m));

        let mut spaces: BTreeMap<(i64, Vec<i64>), Vec<Word>> = BTreeMap::new();
        let depth_scaled = (depth.clone() * qi(den)).to_integer().to_i64().unwrap();
        let nat_dim = pres.gens.iter().map(|g| g.w_charge.len()).max().unwrap_or(0);
        let mut stack: Word = Vec::new();
        gen_words(&pres, &ops, 0, depth_scaled, &mut stack, &mut spaces, nat_dim, charge_den);
        VermaModule {
            pres,
            depth: depth.clone(),
            conv,
            spaces,
            charge_den,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn space(&self, eta: &Eta) -> &[Word] {
        static EMPTY: Vec<Word> = Vec::new();
        let key = self.space_key(eta);
        self.spaces.get(&key).map(|v| v.as_slice()).unwrap_or(&EMPTY)
    }

    pub fn space_key(&self, eta: &Eta) -> (i64, Vec<i64>) {
        let lvl = (eta.level.clone() * qi(self.pres.den)).to_integer().to_i64().unwrap();
        let nat = eta
            .nat
            .iter()
            .map(|c| (c.clone() * qi(self.charge_den)).to_integer().to_i64().unwrap())
            .collect();
        (lvl, nat)
    }

    pub fn etas(&self) -> Vec<Eta> {
        self.spaces
            .keys()
            .map(|(lvl, nat)| Eta {
                level: q(*lvl, self.pres.den),
                nat: nat.iter().map(|&c| q(c, self.charge_den)).collect(),
            })
            .collect()
    }

    fn mode_q(&self, scaled: i64) -> Q {
        q(scaled, self.pres.den)
    }

    /// Applies a single mode operator to a normal-ordered word.
    fn apply(&self, g: usize, m: i64, word: &Word) -> State {
        if let Some(s) = self.memo.borrow().get(&(g, m, word.clone())) {
            return s.clone();
        }
        let result = self.apply_uncached(g, m, word);
        self.memo.borrow_mut().insert((g, m, word.clone()), result.clone());
        result
    }

    fn apply_uncached(&self, g: usize, m: i64, word: &Word) -> State {
        let mut out: State = BTreeMap::new();
        let parity = |g: usize| self.pres.gens[g].parity;
        if word.is_empty() {
            if m > 0 {
                return out;
            }
            if m == 0 {
                match parity(g) {
                    Parity::Even => {
                        // Cartan zero modes: L0 -> h, J0 -> j
                        let val = if g == L { GPoly::var(VH) } else { GPoly::var(VJ) };
                        out.insert(vec![], val);
                    }
                    Parity::Odd => {
                        out.insert(vec![(g, 0)], GPoly::one());
                    }
                }
                return out;
            }
            out.insert(vec![(g, m)], GPoly::one());
            return out;
        }
        let (g0, m0) = word[0];
        let creation = m < 0 || (m == 0 && parity(g).is_odd());
        if creation {
            let k_new = op_key(self.conv, g, m);
            let k_head = op_key(self.conv, g0, m0);
            if k_new < k_head || (k_new == k_head && !parity(g).is_odd()) {
                let mut w = word.clone();
                w.insert(0, (g, m));
                out.insert(w, GPoly::one());
                return out;
            }
            if (g, m) == (g0, m0) && parity(g).is_odd() {
                // X X = [X, X]/2 on equal odd modes
                let rest: Word = word[1..].to_vec();
                let (terms, central) =
                    self.pres.bracket(g, &self.mode_q(m), g0, &self.mode_q(m0));
                let half = q(1, 2);
                return self.bracket_applied(&terms, &central, &rest, &half);
            }
        }
        // push through the head: X Y0 rest = sign Y0 (X rest) + [X, Y0] rest
        let rest: Word = word[1..].to_vec();
        let sign = if parity(g).is_odd() && parity(g0).is_odd() { -Q::one() } else { Q::one() };
        let pushed = self.apply(g, m, &rest);
        for (w, coeff) in pushed {
            let reinserted = self.apply(g0, m0, &w);
            for (w2, c2) in reinserted {
                add_state(&mut out, w2, c2.mul(&coeff).scale(&sign));
            }
        }
        let (terms, central) = self.pres.bracket(g, &self.mode_q(m), g0, &self.mode_q(m0));
        let one = Q::one();
        let br = self.bracket_applied(&terms, &central, &rest, &one);
        for (w, c) in br {
            add_state(&mut out, w, c);
        }
        out
    }

    fn bracket_applied(
        &self,
        terms: &[(Q, usize, Q)],
        central: &Q,
        rest: &Word,
        scale: &Q,
    ) -> State {
        let mut out: State = BTreeMap::new();
        if !central.is_zero() {
            add_state(
                &mut out,
                rest.clone(),
                GPoly::constant(central.clone() * scale),
            );
        }
        for (co, g2, m2) in terms {
            let scaled_mode = (m2.clone() * qi(self.pres.den)).to_integer().to_i64().unwrap();
            let applied = self.apply(*g2, scaled_mode, rest);
            for (w, c) in applied {
                add_state(&mut out, w, c.scale(&(co.clone() * scale)));
            }
        }
        out
    }

    /// `B(a v, b v)`: straightens `omega(a) b v` and reads the coefficient
    /// of the highest-weight vector.
    pub fn gram_entry(&self, a: &Word, b: &Word) -> GPoly {
        let mut state: State = BTreeMap::new();
        state.insert(b.clone(), GPoly::one());
        let mut sign_total = Q::one();
        for &(g, m) in a.iter() {
            let spec = &self.pres.gens[g];
            sign_total *= spec.omega_sign.clone();
            let og = spec.omega_partner;
            let om = -m;
            let mut next: State = BTreeMap::new();
            for (w, coeff) in &state {
                for (w2, c2) in self.apply(og, om, w) {
                    add_state(&mut next, w2, c2.mul(coeff));
                }
            }
            state = next;
        }
        state
            .get(&vec![])
            .cloned()
            .unwrap_or_else(GPoly::zero)
            .scale(&sign_total)
    }

    pub fn gram_matrix(&self, eta: &Eta) -> Vec<Vec<GPoly>> {
        let basis = self.space(eta);
        let n = basis.len();
        let mut m = vec![vec![GPoly::zero(); n]; n];
        for i in 0..n {
            for jx in i..n {
                let e = self.gram_entry(&basis[i], &basis[jx]);
                m[jx][i] = e.clone();
                m[i][jx] = e;
            }
        }
        m
    }

    pub fn gram_determinant(&self, eta: &Eta) -> GPoly {
        let m = self.gram_matrix(eta);
        det_bareiss(&m)
    }
}

fn add_state(state: &mut State, w: Word, c: GPoly) {
    if c.is_zero() {
        return;
    }
    let e = state.entry(w.clone()).or_insert_with(GPoly::zero);
    *e = e.add(&c);
    if e.is_zero() {
        state.remove(&w);
    }
}

#[allow(clippy::too_many_arguments)]
fn gen_words(
    pres: &Presentation,
    ops: &[(usize, i64)],
    idx: usize,
    depth_left: i64,
    stack: &mut Word,
    spaces: &mut BTreeMap<(i64, Vec<i64>), Vec<Word>>,
    nat_dim: usize,
    charge_den: i64,
) {
    if idx == ops.len() {
        let mut level = 0i64;
        let mut charge = vec![0i64; nat_dim];
        for &(g, m) in stack.iter() {
            level -= m;
            for (ci, cv) in pres.gens[g].w_charge.iter().enumerate() {
                charge[ci] += (cv.clone() * qi(charge_den)).to_integer().to_i64().unwrap();
            }
        }
        spaces.entry((level, charge)).or_default().push(stack.clone());
        return;
    }
    let (g, m) = ops[idx];
    let depth_op = -m; // scaled
    let max_uses = if pres.gens[g].parity.is_odd() {
        1
    } else if depth_op > 0 {
        depth_left / depth_op
    } else {
        0
    };
    for uses in 0..=max_uses {
        if uses > 0 {
            for _ in 0..uses {
                // appended in normal order since ops are sorted by key
            }
        }
        let mut st = stack.clone();
        for _ in 0..uses {
            st.push((g, m));
        }
        let mut inner = st;
        std::mem::swap(&mut inner, stack);
        gen_words(pres, ops, idx + 1, depth_left - uses * depth_op, stack, spaces, nat_dim, charge_den);
        std::mem::swap(&mut inner, stack);
    }
}

/// Result of one closed-form comparison.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub family: String,
    pub eta: Eta,
    pub k: Q,
    pub dim: usize,
    pub matches: bool,
    /// Ratio of leading coefficients, oracle over closed form.
    pub constant_ratio: Option<Q>,
    pub oracle_h_degree: u16,
    pub closed_h_degree: i64,
}

/// Compares the brute-force Gram determinant against the assembled closed
/// form on one weight space, after leading-coefficient normalization.
pub fn compare_closed_form(
    datum: &RootDatum,
    module: &VermaModule,
    parts: &Partitions,
    eta: &Eta,
) -> Result<GramReport, String> {
    let det = module.gram_determinant(eta);
    let assembled = assemble(datum, parts, eta);
    let expanded = expand_at(&assembled, &module.pres.k)?;
    if !expanded.den.is_zero() && expanded.den != MPoly::one() {
        return Err("closed form carries negative-exponent factors".into());
    }
    let dim = module.space(eta).len();
    if det.is_zero() {
        return Err(format!("oracle determinant vanished identically at {eta:?}"));
    }
    let (det_monic, det_lead) = det.monic();
    let (closed_monic, closed_lead) = expanded.num.monic();
    let matches = det_monic == closed_monic;
    Ok(GramReport {
        family: datum.family.clone(),
        eta: eta.clone(),
        k: module.pres.k.clone(),
        dim,
        matches,
        constant_ratio: if closed_lead.is_zero() {
            None
        } else {
            Some(det_lead / closed_lead)
        },
        oracle_h_degree: det.degree_in(VH),
        closed_h_degree: assembled.h_degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::family_preset;

    fn lvl(l: Q) -> Eta {
        Eta { level: l, nat: vec![] }
    }

    #[test]
    fn presentations_are_consistent() {
        for k in [Q::zero(), Q::one(), q(-1, 2), q(1, 3)] {
            presentation(&Family::RamondN1, &k).unwrap();
        }
        presentation(&Family::N2Ramond { a: q(1, 4) }, &Q::zero()).unwrap();
        presentation(&Family::N2Ramond { a: Q::zero() }, &Q::one()).unwrap();
        presentation(&Family::N2Twisted, &Q::zero()).unwrap();
        presentation(&Family::N2Twisted, &Q::one()).unwrap();
        assert!(presentation(&Family::RamondN1, &q(-3, 2)).is_err());
    }

    #[test]
    fn anchor_relations() {
        let p = presentation(&Family::RamondN1, &Q::zero()).unwrap();
        // [G_0, G_0] = 2 L_0 - c/12
        let (terms, central) = p.bracket(GG, &Q::zero(), GG, &Q::zero());
        assert_eq!(terms, vec![(qi(2), L, Q::zero())]);
        assert_eq!(central, -p.c.clone() / qi(12));

        let p = presentation(&Family::N2Twisted, &Q::one()).unwrap();
        // [G2_0, G2_0] = -(L_0 - c/24)
        let (terms, central) = p.bracket(G2, &Q::zero(), G2, &Q::zero());
        assert_eq!(terms, vec![(-Q::one(), L, Q::zero())]);
        assert_eq!(central, p.c.clone() / qi(24));
    }

    #[test]
    fn ramond_small_spaces() {
        let pres = presentation(&Family::RamondN1, &Q::zero()).unwrap();
        let m = VermaModule::new(pres, &qi(2), OrderConvention::Standard);
        // eta = 0: {v, G0 v}
        assert_eq!(m.space(&lvl(Q::zero())).len(), 2);
        // eta = 1: dim 4
        assert_eq!(m.space(&lvl(Q::one())).len(), 4);
        // B(v, v) = 1, B(G0 v, G0 v) = h - c/24, off-diagonal zero
        let gram = m.gram_matrix(&lvl(Q::zero()));
        assert_eq!(gram[0][0], GPoly::one());
        assert!(gram[0][1].is_zero());
        let c24 = m.pres.c.clone() / qi(24);
        let expect = GPoly::var(VH).sub(&GPoly::constant(c24));
        assert_eq!(gram[1][1], expect);
        let det = m.gram_determinant(&lvl(Q::zero()));
        assert_eq!(det, expect);
    }

    #[test]
    fn basic_norms() {
        // B(L_{-1} v, L_{-1} v) = 2h
        let pres = presentation(&Family::RamondN1, &Q::one()).unwrap();
        let m = VermaModule::new(pres, &Q::one(), OrderConvention::Standard);
        let word: Word = vec![(L, -1 * m.pres.den)];
        let e = m.gram_entry(&word, &word);
        assert_eq!(e, GPoly::var(VH).scale(&qi(2)));
    }

    #[test]
    fn dims_match_partition_function() {
        for (fam, depth) in [
            (Family::RamondN1, qi(3)),
            (Family::N2Ramond { a: q(1, 4) }, q(3, 2)),
            (Family::N2Ramond { a: Q::zero() }, q(3, 2)),
            (Family::N2Twisted, qi(2)),
        ] {
            let datum = family_preset(&fam).unwrap();
            let nat_dim = datum.nat_names.len();
            let parts = Partitions::new(&datum, &depth);
            let pres = presentation(&fam, &Q::zero()).unwrap();
            let m = VermaModule::new(pres, &depth, OrderConvention::Standard);
            for eta in m.etas() {
                if eta.level > depth {
                    continue;
                }
                assert_eq!(
                    m.space(&eta).len() as u64,
                    parts.p(&eta),
                    "{fam:?} at {eta:?}"
                );
            }
            // and a probe of an unreachable charge agrees with the count
            if nat_dim > 0 {
                let probe = Eta { level: depth.clone(), nat: vec![q(7, 2); nat_dim] };
                assert_eq!(parts.p(&probe), 0);
            }
        }
    }

    #[test]
    fn gram_is_weight_orthogonal() {
        let pres = presentation(&Family::N2Ramond { a: q(1, 4) }, &Q::one()).unwrap();
        let m = VermaModule::new(pres, &Q::one(), OrderConvention::Standard);
        // words from different weight spaces pair to zero
        let e1 = m.etas();
        let mut seen = 0;
        for (i, ea) in e1.iter().enumerate() {
            for eb in e1.iter().skip(i + 1) {
                let wa = m.space(ea);
                let wb = m.space(eb);
                if wa.is_empty() || wb.is_empty() {
                    continue;
                }
                let e = m.gram_entry(&wa[0], &wb[0]);
                assert!(e.is_zero(), "{ea:?} vs {eb:?}");
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn truncation_independence() {
        let fam = Family::N2Twisted;
        let k = Q::one();
        let eta = lvl(Q::one());
        let m1 = VermaModule::new(presentation(&fam, &k).unwrap(), &Q::one(), OrderConvention::Standard);
        let m2 = VermaModule::new(presentation(&fam, &k).unwrap(), &qi(2), OrderConvention::Standard);
        assert_eq!(m1.gram_matrix(&eta), m2.gram_matrix(&eta));
    }

    #[test]
    fn pbw_order_invariance() {
        let fam = Family::RamondN1;
        let k = q(1, 3);
        let eta = lvl(qi(2));
        let m1 = VermaModule::new(presentation(&fam, &k).unwrap(), &qi(2), OrderConvention::Standard);
        let m2 = VermaModule::new(presentation(&fam, &k).unwrap(), &qi(2), OrderConvention::Alternate);
        assert_eq!(m1.gram_determinant(&eta), m2.gram_determinant(&eta));
    }

    #[test]
    fn ramond_determinant_matches_closed_form() {
        let fam = Family::RamondN1;
        let datum = family_preset(&fam).unwrap();
        let depth = qi(2);
        let parts = Partitions::new(&datum, &depth);
        for k in [Q::zero(), Q::one()] {
            let m = VermaModule::new(presentation(&fam, &k).unwrap(), &depth, OrderConvention::Standard);
            for n in 0..=2i64 {
                let eta = lvl(qi(n));
                let rep = compare_closed_form(&datum, &m, &parts, &eta).unwrap();
                assert!(rep.matches, "k={k} eta={n}: {rep:?}");
                assert_eq!(rep.oracle_h_degree as i64, rep.closed_h_degree);
            }
        }
    }

    #[test]
    fn vanishing_locus_spot_check() {
        // at k = 0 and h = h^R_{1,2}(0), the level-one Gram is singular
        let fam = Family::RamondN1;
        let k = Q::zero();
        let m = VermaModule::new(presentation(&fam, &k).unwrap(), &Q::one(), OrderConvention::Standard);
        let det = m.gram_determinant(&lvl(Q::one()));
        // h^R_{1,2}(k) = (1/(4(k+3/2)))((1/2 - 2(k+3/2))^2 - (k+1)^2) + 1/16
        let h_r12 = (q(1, 2) - qi(2) * q(3, 2)).pow(2) / (qi(4) * q(3, 2))
            - Q::one() / (qi(4) * q(3, 2))
            + q(1, 16);
        let val = det.eval(&[h_r12, Q::zero(), Q::zero()]);
        assert!(val.is_zero());
    }
}

#[cfg(test)]
mod oracle_probes {
    use super::*;
    use crate::rootdata::family_preset;

    #[test]
    fn twisted_determinant_matches_closed_form() {
        let fam = Family::N2Twisted;
        let datum = family_preset(&fam).unwrap();
        let depth = q(3, 2);
        let parts = Partitions::new(&datum, &depth);
        for k in [Q::zero(), Q::one()] {
            let m = VermaModule::new(
                presentation(&fam, &k).unwrap(),
                &depth,
                OrderConvention::Standard,
            );
            for n in 1..=3i64 {
                let eta = Eta { level: q(n, 2), nat: vec![] };
                let rep = compare_closed_form(&datum, &m, &parts, &eta).unwrap();
                assert!(rep.matches, "k={k} eta={}/2: {rep:?}", n);
            }
        }
    }

    #[test]
    fn n2_ramond_determinant_matches_closed_form() {
        for a in [Q::zero(), q(1, 4)] {
            let fam = Family::N2Ramond { a: a.clone() };
            let datum = family_preset(&fam).unwrap();
            let depth = q(3, 2);
            let parts = Partitions::new(&datum, &depth);
            let k = Q::one();
            let m = VermaModule::new(
                presentation(&fam, &k).unwrap(),
                &depth,
                OrderConvention::Standard,
            );
            for eta in m.etas() {
                if eta.level > depth || eta.level.is_zero() {
                    continue;
                }
                let rep = compare_closed_form(&datum, &m, &parts, &eta).unwrap();
                assert!(rep.matches, "a={a} eta={eta:?}: {rep:?}");
            }
        }
    }
}
