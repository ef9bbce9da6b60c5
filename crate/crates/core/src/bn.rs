//! Brill–Noether generality of `S(n, d, g)`.
//!
//! `(S, H)` is BN general when no splitting `H = M + N` into nontrivial
//! effective classes has `h⁰(M)·h⁰(N) ≥ h⁰(H) = n + 2`. [`bn_general`]
//! answers through closed forms where they apply and falls back to the
//! lattice oracle; [`oracle_bn_general`] decides by exhaustive search.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::existence::rank_one_certificate;
use crate::lattice::{discriminant, DivisorClass, IntersectionLattice, LatticeError};
use crate::oracle::{effective_box, h_is_ample, OracleContext, OracleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BnError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("undecided: H not ample on S({n}, {d}, {g})")]
    Undecided { n: i64, d: i64, g: i64 },
    #[error("no K3 surface with d^2 = 4n(g-1) exists for (n, d, g) = ({n}, {d}, {g})")]
    NoRankOneSurface { n: i64, d: i64, g: i64 },
    #[error("reduction precondition violated: {0}")]
    Reduction(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BnRoute {
    /// `Δ = 0`: BN general iff `2n | d`.
    Divisibility,
    Rational,
    Triangle,
    EllipticThreshold,
    ResidualTable,
    Oracle,
}

impl fmt::Display for BnRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BnRoute::Divisibility => "divisibility",
            BnRoute::Rational => "rational",
            BnRoute::Triangle => "triangle",
            BnRoute::EllipticThreshold => "elliptic-threshold",
            BnRoute::ResidualTable => "residual-table",
            BnRoute::Oracle => "oracle",
        })
    }
}

/// A splitting `H = M + N` with `h⁰(M)·h⁰(N) ≥ n + 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub m: DivisorClass,
    pub n: DivisorClass,
    pub h0_m: u64,
    pub h0_n: u64,
}

impl Witness {
    pub fn product(&self) -> u64 {
        self.h0_m * self.h0_n
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) h0 {}*{}", self.m, self.n, self.h0_m, self.h0_n)
    }
}

/// One change of basis applied while reducing `(d, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStep {
    /// `C ↦ C − kH`.
    Translate { k: i64, d: i64, g: i64 },
    /// `C ↦ H − C`.
    Reflect { d: i64, g: i64 },
}

impl ReductionStep {
    /// Target `(d, g)` after the step.
    pub fn target(&self) -> (i64, i64) {
        match *self {
            ReductionStep::Translate { d, g, .. } | ReductionStep::Reflect { d, g } => (d, g),
        }
    }

    /// Maps a class written in the reduced basis back to the source basis.
    fn pull_back(&self, x: DivisorClass) -> DivisorClass {
        match *self {
            ReductionStep::Translate { k, .. } => DivisorClass::new(x.a - x.b * k, x.b),
            ReductionStep::Reflect { .. } => DivisorClass::new(x.a + x.b, -x.b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnVerdict {
    pub bn_general: bool,
    /// The route that decided the final (possibly reduced) triple.
    pub route: BnRoute,
    pub reductions: Vec<ReductionStep>,
    /// Present whenever `bn_general` is false and the Picard rank is 2;
    /// classes are written in the basis of the input triple.
    pub witness: Option<Witness>,
    /// `k` with `H = k·L` on the rank-one surface (`Δ = 0` only).
    pub rank_one_k: Option<i64>,
}

impl BnVerdict {
    fn decided(bn_general: bool, route: BnRoute, witness: Option<Witness>) -> Self {
        BnVerdict {
            bn_general,
            route,
            reductions: Vec::new(),
            witness,
            rank_one_k: None,
        }
    }

    /// `route`, prefixed with `reduction+` when the triple was reduced first.
    pub fn route_label(&self) -> String {
        if self.reductions.is_empty() {
            self.route.to_string()
        } else {
            format!("reduction+{}", self.route)
        }
    }
}

/// The twelve triples left after all reductions for `n ≤ 9`.
pub const RESIDUAL_TRIPLES: [(i64, i64, i64); 12] = [
    (6, 6, 2),
    (7, 7, 2),
    (7, 6, 2),
    (7, 8, 3),
    (8, 8, 2),
    (8, 7, 2),
    (8, 6, 2),
    (8, 8, 3),
    (9, 9, 2),
    (9, 8, 2),
    (9, 7, 2),
    (9, 9, 3),
];

/// `h⁰(H − C)·h⁰(C) = (n − d + g + 1)(g + 1)`.
pub fn residual_product(n: i64, d: i64, g: i64) -> i64 {
    (n - d + g + 1) * (g + 1)
}

/// `h⁰(H − bC)·h⁰(bC)` on `S(n, d, 1)`: `(n − bd + 2)(b + 1)` when `bd ≤ n + 1`, else 0.
pub fn prodell(n: i64, d: i64, b: i64) -> i64 {
    if b * d <= n + 1 {
        (n - b * d + 2) * (b + 1)
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Small1Reduction {
    pub d0: i64,
    pub g0: i64,
    pub steps: u32,
}

fn require_hyperbolic(n: i64, d: i64, g: i64) -> Result<(), BnError> {
    IntersectionLattice::new(n, d, g)?;
    Ok(())
}

/// Lowers `d` by `2n` (and `g` by `d − n`) until `g < d − n` or `d ≤ 2n`.
pub fn reduce_small1(n: i64, d: i64, g: i64) -> Result<Small1Reduction, BnError> {
    require_hyperbolic(n, d, g)?;
    let (mut d, mut g, mut steps) = (d, g, 0);
    while g >= d - n && d > 2 * n {
        (d, g) = (d - 2 * n, g - d + n);
        steps += 1;
    }
    Ok(Small1Reduction {
        d0: d,
        g0: g,
        steps,
    })
}

/// `(d, g) ↦ (2n − d, n − d + g)`, the change of basis `C ↦ H − C`.
pub fn reduce_small2(n: i64, d: i64, g: i64) -> Result<(i64, i64), BnError> {
    if n - d + g < 0 {
        return Err(BnError::Reduction("reflection needs n - d + g >= 0"));
    }
    if d > 2 * n - 1 {
        return Err(BnError::Reduction("reflection needs d <= 2n - 1"));
    }
    require_hyperbolic(n, d, g)?;
    Ok((2 * n - d, n - d + g))
}

/// Orients an unordered splitting so that `M = aH − bC` with `a, b ≥ 1`
/// when possible; otherwise `M` is the smaller of the two by
/// (degree, coordinates). Returns whether the normalized form was reached.
fn orient(
    l: &IntersectionLattice,
    x: DivisorClass,
    y: DivisorClass,
) -> (DivisorClass, DivisorClass, bool) {
    let normal = |c: &DivisorClass| c.a >= 1 && c.b <= -1;
    if normal(&x) {
        (x, y, true)
    } else if normal(&y) {
        (y, x, true)
    } else if (l.degree(&x), x) <= (l.degree(&y), y) {
        (x, y, false)
    } else {
        (y, x, false)
    }
}

fn witness_key(l: &IntersectionLattice, w: &Witness) -> (i64, i64, i64) {
    (l.degree(&w.m), w.m.a, w.m.b)
}

/// Outcome of the exhaustive splitting search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnSearch {
    /// Oriented splittings that survived pruning, in search order.
    pub visited: Vec<(DivisorClass, DivisorClass)>,
    /// Violating splittings, smallest first.
    pub violations: Vec<Witness>,
    /// Whether `C` was nef, enabling the `M·C ≥ 0`, `N·C ≥ 0` pruning.
    pub pruned_by_nef_c: bool,
    /// Every violation had the normalized shape `M = aH − bC`, `a, b ≥ 1`.
    pub violations_normalized: bool,
}

/// Enumerates every splitting `H = M + N` with both parts effective and nonzero.
///
/// `M` ranges over degrees `1..2n` and, on each degree line, over the box
/// `Δ·b² ≤ t²(1 + 4n)` that contains every effective class of degree `t`.
/// When `C` is nef, splittings with `M·C < 0` or `N·C < 0` cannot have both
/// parts effective and are skipped before any effectivity test.
pub fn oracle_bn_search(ctx: &OracleContext) -> Result<BnSearch, BnError> {
    let l = *ctx.lattice();
    let c_nef = ctx.is_nef(DivisorClass::C)?;
    let n = l.n();
    let mut seen = BTreeSet::new();
    let mut visited = Vec::new();
    let mut violations = Vec::new();
    let mut all_normal = true;
    for t in 1..2 * n {
        let b_max = l.coefficient_bound(effective_box(&l, t));
        for b in -b_max..=b_max {
            let Some(m) = l.class_on_degree_line(t, b) else {
                continue;
            };
            let rest = DivisorClass::H - m;
            let (m, rest, normal) = orient(&l, m, rest);
            if !seen.insert((m, rest)) {
                continue;
            }
            if c_nef
                && (l.intersect(&m, &DivisorClass::C) < 0
                    || l.intersect(&rest, &DivisorClass::C) < 0)
            {
                continue;
            }
            visited.push((m, rest));
            if !(ctx.effective_or_zero(m)? && ctx.effective_or_zero(rest)?) {
                continue;
            }
            let w = Witness {
                m,
                n: rest,
                h0_m: ctx.h0(m)?.h0,
                h0_n: ctx.h0(rest)?.h0,
            };
            if w.product() >= (n + 2) as u64 {
                all_normal &= normal;
                violations.push(w);
            }
        }
    }
    violations.sort_by_key(|w| witness_key(&l, w));
    Ok(BnSearch {
        visited,
        violations,
        pruned_by_nef_c: c_nef,
        violations_normalized: all_normal,
    })
}

/// BN generality by exhaustive search; requires ample `H`.
pub fn oracle_bn_general(ctx: &OracleContext) -> Result<BnVerdict, BnError> {
    let search = oracle_bn_search(ctx)?;
    let witness = search.violations.first().copied();
    Ok(BnVerdict::decided(
        witness.is_none(),
        BnRoute::Oracle,
        witness,
    ))
}

/// Searches for a splitting whose Riemann–Roch lower bounds already
/// violate BN generality. Valid whenever `H` is nef, ample or not: for
/// `D·H > 0` the class `−D` is not effective, so `h⁰(D) ≥ D²/2 + 2`.
/// Returns the smallest such splitting, or `None` if the bounds are inconclusive.
pub fn lower_bound_witness(l: &IntersectionLattice) -> Option<Witness> {
    let n = l.n();
    let rr = |x: &DivisorClass| (l.square(x) / 2 + 2) as u64;
    let mut found: Option<Witness> = None;
    for t in 1..2 * n {
        for m in l.classes_on_degree_line(t, -2) {
            let rest = DivisorClass::H - m;
            if l.square(&rest) < -2 {
                continue;
            }
            let (m, rest, _) = orient(l, m, rest);
            let w = Witness {
                m,
                n: rest,
                h0_m: rr(&m),
                h0_n: rr(&rest),
            };
            if w.product() >= (n + 2) as u64
                && found.is_none_or(|f| witness_key(l, &w) < witness_key(l, &f))
            {
                found = Some(w);
            }
        }
    }
    found
}

/// BN generality of the rank-one surface with `Δ = 0`: `Pic = Z·L`,
/// `H = kL` for the certificate `(k, m)`, and the splittings are
/// `iL + (k − i)L` with `h⁰(iL) = i²m + 2`.
pub fn oracle_bn_general_rank_one(n: i64, d: i64, g: i64) -> Result<BnVerdict, BnError> {
    if discriminant(n, d, g) != 0 {
        return Err(BnError::Reduction("rank-one oracle needs d^2 = 4n(g-1)"));
    }
    let (k, m) = rank_one_certificate(n, d).ok_or(BnError::NoRankOneSurface { n, d, g })?;
    let violating = (1..k).any(|i| {
        let (h_i, h_rest) = (i * i * m + 2, (k - i) * (k - i) * m + 2);
        h_i * h_rest >= n + 2
    });
    Ok(BnVerdict {
        rank_one_k: Some(k),
        ..BnVerdict::decided(!violating, BnRoute::Oracle, None)
    })
}

/// BN generality of `S(n, d, g)`, or of the rank-one surface when `Δ = 0`.
///
/// Routes are tried in a fixed order: divisibility (`Δ = 0`), rational
/// (`g = 0`), triangle (`d > n + g`), elliptic threshold (`g = 1`),
/// reductions to `d ≤ n`, the residual table for `n ≤ 9`, and finally the
/// oracle, which needs `H` ample.
pub fn bn_general(n: i64, d: i64, g: i64) -> Result<BnVerdict, BnError> {
    let disc = discriminant(n, d, g);
    if disc == 0 && n >= 2 && d >= 1 && g >= 0 {
        let (k, _) = rank_one_certificate(n, d).ok_or(BnError::NoRankOneSurface { n, d, g })?;
        return Ok(BnVerdict {
            rank_one_k: Some(k),
            ..BnVerdict::decided(d % (2 * n) == 0, BnRoute::Divisibility, None)
        });
    }
    let lattice = IntersectionLattice::new(n, d, g)?;
    let mut verdict = dispatch(&lattice)?;
    if let Some(w) = verdict.witness.as_mut() {
        let pull = |x: DivisorClass| {
            verdict
                .reductions
                .iter()
                .rev()
                .fold(x, |x, s| s.pull_back(x))
        };
        let (m, rest) = (pull(w.m), pull(w.n));
        let (om, orest, _) = orient(&lattice, m, rest);
        let (h0_m, h0_n) = if om == m {
            (w.h0_m, w.h0_n)
        } else {
            (w.h0_n, w.h0_m)
        };
        *w = Witness {
            m: om,
            n: orest,
            h0_m,
            h0_n,
        };
    }
    Ok(verdict)
}

fn dispatch(l: &IntersectionLattice) -> Result<BnVerdict, BnError> {
    let (n, d, g) = (l.n(), l.d(), l.g());
    if g == 0 {
        return Ok(BnVerdict::decided(true, BnRoute::Rational, None));
    }
    if d > n + g {
        return Ok(BnVerdict::decided(true, BnRoute::Triangle, None));
    }
    if g == 1 {
        return Ok(elliptic(n, d));
    }
    let step = if d > 2 * n {
        let r = reduce_small1(n, d, g)?;
        Some(ReductionStep::Translate {
            k: (d - r.d0) / (2 * n),
            d: r.d0,
            g: r.g0,
        })
    } else if d > n && d < 2 * n {
        let (d0, g0) = reduce_small2(n, d, g)?;
        Some(ReductionStep::Reflect { d: d0, g: g0 })
    } else {
        None
    };
    if let Some(step) = step {
        let (d0, g0) = step.target();
        let mut inner = dispatch(&IntersectionLattice::new(n, d0, g0)?)?;
        inner.reductions.insert(0, step);
        return Ok(inner);
    }
    if n <= 9 && RESIDUAL_TRIPLES.contains(&(n, d, g)) {
        let product = residual_product(n, d, g);
        let general = product < n + 2;
        let witness = (!general).then_some(Witness {
            m: DivisorClass::new(1, -1),
            n: DivisorClass::C,
            h0_m: (n - d + g + 1) as u64,
            h0_n: (g + 1) as u64,
        });
        return Ok(BnVerdict::decided(general, BnRoute::ResidualTable, witness));
    }
    if !h_is_ample(l) {
        return Err(BnError::Undecided { n, d, g });
    }
    oracle_bn_general(&OracleContext::new(*l))
}

/// `g = 1`: the only candidate splittings are `(H − bC) + bC`.
fn elliptic(n: i64, d: i64) -> BnVerdict {
    let worst = (1..)
        .take_while(|b| b * d <= n + 1)
        .filter(|&b| prodell(n, d, b) >= n + 2)
        .last();
    let witness = worst.map(|b| Witness {
        m: DivisorClass::new(1, -b),
        n: DivisorClass::new(0, b),
        h0_m: (n - b * d + 2) as u64,
        h0_n: (b + 1) as u64,
    });
    BnVerdict::decided(witness.is_none(), BnRoute::EllipticThreshold, witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: i64, d: i64, g: i64) -> OracleContext {
        OracleContext::new(IntersectionLattice::new(n, d, g).unwrap())
    }

    #[test]
    fn closed_form_examples() {
        let v = bn_general(6, 6, 2).unwrap();
        assert!(!v.bn_general);
        assert_eq!(v.route, BnRoute::ResidualTable);
        let w = v.witness.unwrap();
        assert_eq!((w.m, w.n), (DivisorClass::new(1, -1), DivisorClass::C));
        assert_eq!(w.product(), 9);

        let v = bn_general(8, 8, 2).unwrap();
        assert!(v.bn_general);
        assert_eq!(v.route, BnRoute::ResidualTable);

        let v = bn_general(5, 7, 0).unwrap();
        assert!(v.bn_general);
        assert_eq!(v.route, BnRoute::Rational);

        let v = bn_general(4, 3, 1).unwrap();
        assert!(!v.bn_general);
        assert_eq!(v.route, BnRoute::EllipticThreshold);
    }

    #[test]
    fn divisibility_route() {
        let v = bn_general(8, 8, 3).unwrap();
        assert!(!v.bn_general);
        assert_eq!((v.route, v.rank_one_k), (BnRoute::Divisibility, Some(2)));
        let v = bn_general(4, 8, 5).unwrap();
        assert!(v.bn_general);
        assert!(matches!(
            bn_general(4, 4, 2),
            Err(BnError::NoRankOneSurface { .. })
        ));
        assert!(!oracle_bn_general_rank_one(8, 8, 3).unwrap().bn_general);
        assert!(oracle_bn_general_rank_one(4, 8, 5).unwrap().bn_general);
    }

    #[test]
    fn oracle_examples() {
        assert!(oracle_bn_general(&ctx(2, 3, 1)).unwrap().bn_general);

        let search = oracle_bn_search(&ctx(9, 9, 2)).unwrap();
        assert!(search.violations.is_empty());
        assert!(search.pruned_by_nef_c);
        assert_eq!(
            search.visited,
            vec![(DivisorClass::new(1, -1), DivisorClass::C)]
        );

        let v = oracle_bn_general(&ctx(6, 6, 2)).unwrap();
        assert!(!v.bn_general);
        let w = v.witness.unwrap();
        assert_eq!((w.m, w.n), (DivisorClass::new(1, -1), DivisorClass::C));
    }

    #[test]
    fn reductions() {
        assert_eq!(
            reduce_small1(3, 8, 5).unwrap(),
            Small1Reduction {
                d0: 2,
                g0: 0,
                steps: 1
            }
        );
        assert_eq!(
            reduce_small1(2, 7, 2).unwrap(),
            Small1Reduction {
                d0: 7,
                g0: 2,
                steps: 0
            }
        );
        assert_eq!(
            reduce_small1(4, 4, 1).unwrap(),
            Small1Reduction {
                d0: 4,
                g0: 1,
                steps: 0
            }
        );
        assert!(reduce_small1(2, 3, 3).is_err());

        assert_eq!(reduce_small2(8, 8, 2).unwrap(), (8, 2));
        assert_eq!(reduce_small2(6, 7, 3).unwrap(), (5, 2));
        assert_eq!(reduce_small2(8, 6, 2).unwrap(), (10, 4));
        let (d, g) = reduce_small2(6, 7, 3).unwrap();
        assert_eq!(reduce_small2(6, d, g).unwrap(), (7, 3));
        assert!(reduce_small2(3, 6, 3).is_err());
        assert!(reduce_small2(3, 5, 1).is_err());
    }

    #[test]
    fn prodell_examples() {
        assert_eq!(prodell(6, 5, 1), 6);
        assert_eq!(prodell(6, 4, 1), 8);
        assert_eq!(prodell(6, 5, 2), 0);
    }

    #[test]
    fn non_ample_is_undecided() {
        // Δ = 4n, d ≡ 0 (mod 2n), g ≥ 2 and d ≤ n + g.
        assert!(matches!(
            bn_general(3, 6, 3),
            Err(BnError::Undecided { .. })
        ));
        assert!(matches!(bn_general(2, 3, 3), Err(BnError::Lattice(_))));
    }

    #[test]
    fn witness_survives_reflection() {
        // (7, 8, 3) reflects to (7, 6, 2); the witness must still split H in the original basis.
        let v = bn_general(7, 8, 3).unwrap();
        assert_eq!(v.route_label(), "reduction+residual-table");
        let w = v.witness.unwrap();
        assert_eq!(w.m + w.n, DivisorClass::H);
        let c = ctx(7, 8, 3);
        assert_eq!(c.h0(w.m).unwrap().h0, w.h0_m);
        assert_eq!(c.h0(w.n).unwrap().h0, w.h0_n);
    }

    #[test]
    fn lower_bound_certificate_without_ampleness() {
        let l = IntersectionLattice::new(9, 9, 3).unwrap();
        assert!(!h_is_ample(&l));
        let w = lower_bound_witness(&l).unwrap();
        assert_eq!(w.m + w.n, DivisorClass::H);
        assert!(w.product() >= 11);
        assert!(lower_bound_witness(&IntersectionLattice::new(9, 9, 2).unwrap()).is_none());
    }
}
