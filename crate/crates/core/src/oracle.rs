//! Brute-force decision procedures on `S(n, d, g)`.
//!
//! Everything here works directly from the intersection form and the fact
//! that `H` is ample:
//!
//! * a class of positive degree with `D² ≥ −2` is effective (Riemann–Roch
//!   on a K3 surface makes `D` or `−D` effective, and `−D` has negative
//!   degree);
//! * an effective class with `D² < −2` has a (−2)-curve `Γ` in its fixed
//!   part with `Γ·D < 0`, and `D − Γ` is again effective or zero;
//! * removing a (−2)-curve `Γ` with `Γ·D < 0` does not change `h⁰`.
//!
//! Effectivity is therefore decided by induction on the degree `D·H`, and
//! `h⁰` by stripping fixed curves down to a nef class, where Riemann–Roch
//! (or the elliptic pencil count) is exact.
//!
//! Enumeration bounds come from the identity `2n·D² = (D·H)² − Δ·b²` for
//! `D = aH + bC`: on the line `D·H = t` the form is negative definite in
//! `b`, so `D² ≥ q` confines `b` to `Δ·b² ≤ t² − 2n·q`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::lattice::{DivisorClass, IntersectionLattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle requires ample H, but H is not ample on {0}")]
    NotAmple(IntersectionLattice),
}

/// Closed-form ampleness test for `H` on `S(n, d, g)`: `H` fails to be
/// ample exactly when `Δ = n` and `d ≡ n (mod 2n)`, or `Δ = 4n` and
/// `d ≡ 0 (mod 2n)`.
pub fn h_is_ample(lattice: &IntersectionLattice) -> bool {
    let (n, d, disc) = (lattice.n(), lattice.d(), lattice.discriminant());
    let r = d.rem_euclid(2 * n);
    !((disc == n && r == n) || (disc == 4 * n && r == 0))
}

/// Whether a class is effective, zero, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effectivity {
    Zero,
    Effective,
    NotEffective,
}

impl Effectivity {
    /// True for effective classes and for the zero class.
    pub fn effective_or_zero(self) -> bool {
        !matches!(self, Effectivity::NotEffective)
    }
}

/// Why the oracle decided the way it did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectivityCertificate {
    ZeroClass,
    /// Nonzero class with `D·H ≤ 0`.
    NonPositiveDegree {
        degree: i64,
    },
    /// `D·H > 0` and `D² ≥ −2`.
    RiemannRoch {
        square: i64,
    },
    /// `D = Γ₁ + … + Γ_k + R` with effective (−2)-classes `Γᵢ`, each
    /// meeting the running remainder negatively, and `R` settled by
    /// Riemann–Roch.
    Stripped {
        curves: Vec<DivisorClass>,
        remainder: DivisorClass,
    },
    /// `D² < −2` and no effective (−2)-class of smaller degree can be split off.
    NoSplitting {
        square: i64,
    },
}

impl fmt::Display for EffectivityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectivityCertificate::ZeroClass => f.write_str("zero"),
            EffectivityCertificate::NonPositiveDegree { degree } => {
                write!(f, "degree {degree} <= 0")
            }
            EffectivityCertificate::RiemannRoch { square } => {
                write!(f, "riemann-roch, square {square}")
            }
            EffectivityCertificate::Stripped { curves, remainder } => {
                for c in curves {
                    write!(f, "({c}) + ")?;
                }
                write!(f, "({remainder})")
            }
            EffectivityCertificate::NoSplitting { square } => {
                write!(f, "square {square} < -2 with no splitting curve")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectivityVerdict {
    pub status: Effectivity,
    pub certificate: EffectivityCertificate,
}

/// `h⁰` together with the nef model reached by stripping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H0Result {
    pub h0: u64,
    pub nef_model: DivisorClass,
    /// (−2)-curves removed, in removal order.
    pub stripped: Vec<DivisorClass>,
    pub status: Effectivity,
}

#[derive(Debug, Clone, Copy)]
enum EffEntry {
    No,
    Split(DivisorClass),
}

#[derive(Debug, Default)]
struct Memo {
    effective: RwLock<HashMap<DivisorClass, EffEntry>>,
    irreducible: RwLock<HashMap<DivisorClass, bool>>,
    minus_two: RwLock<HashMap<i64, Arc<Vec<DivisorClass>>>>,
}

fn cached<K, V>(map: &RwLock<HashMap<K, V>>, key: &K) -> Option<V>
where
    K: std::hash::Hash + Eq,
    V: Clone,
{
    map.read().expect("oracle memo poisoned").get(key).cloned()
}

fn store<K, V>(map: &RwLock<HashMap<K, V>>, key: K, value: V) -> V
where
    K: std::hash::Hash + Eq,
    V: Clone,
{
    map.write()
        .expect("oracle memo poisoned")
        .entry(key)
        .or_insert(value)
        .clone()
}

/// A lattice together with memoized oracle answers.
///
/// The memo tables sit behind read/write locks and every answer is a pure
/// function of the class, so one context may be shared between threads.
#[derive(Debug)]
pub struct OracleContext {
    lattice: IntersectionLattice,
    ample_ok: bool,
    memo: Memo,
}

impl OracleContext {
    pub fn new(lattice: IntersectionLattice) -> Self {
        OracleContext {
            ample_ok: h_is_ample(&lattice),
            lattice,
            memo: Memo::default(),
        }
    }

    pub fn lattice(&self) -> &IntersectionLattice {
        &self.lattice
    }

    pub fn ample_ok(&self) -> bool {
        self.ample_ok
    }

    fn require_ample(&self) -> Result<(), OracleError> {
        if self.ample_ok {
            Ok(())
        } else {
            Err(OracleError::NotAmple(self.lattice))
        }
    }

    /// Classes `Γ` with `Γ² = −2` and `0 < Γ·H ≤ degree_bound`, sorted by degree then `b`.
    pub fn minus_two_classes(&self, degree_bound: i64) -> Result<Vec<DivisorClass>, OracleError> {
        self.require_ample()?;
        Ok((1..=degree_bound)
            .flat_map(|t| {
                self.minus_two_of_degree(t)
                    .iter()
                    .copied()
                    .collect::<Vec<_>>()
            })
            .collect())
    }

    fn minus_two_of_degree(&self, t: i64) -> Arc<Vec<DivisorClass>> {
        if let Some(v) = cached(&self.memo.minus_two, &t) {
            return v;
        }
        // Γ² = −2 on the line Γ·H = t means Δ·b² = t² + 4n exactly.
        let l = &self.lattice;
        let rhs = t as i128 * t as i128 + 4 * l.n() as i128;
        let disc = l.discriminant() as i128;
        let mut found = Vec::new();
        if rhs % disc == 0 {
            let q = (rhs / disc) as u128;
            let r = crate::lattice::isqrt(q);
            if r * r == q {
                let r = r as i64;
                for b in [-r, r] {
                    if let Some(x) = l.class_on_degree_line(t, b) {
                        debug_assert_eq!(l.square(&x), -2);
                        found.push(x);
                    }
                }
            }
        }
        store(&self.memo.minus_two, t, Arc::new(found))
    }

    /// Decides effectivity of `class`, with a certificate.
    pub fn is_effective(&self, class: DivisorClass) -> Result<EffectivityVerdict, OracleError> {
        self.require_ample()?;
        let l = &self.lattice;
        if class.is_zero() {
            return Ok(EffectivityVerdict {
                status: Effectivity::Zero,
                certificate: EffectivityCertificate::ZeroClass,
            });
        }
        let degree = l.degree(&class);
        if degree <= 0 {
            return Ok(EffectivityVerdict {
                status: Effectivity::NotEffective,
                certificate: EffectivityCertificate::NonPositiveDegree { degree },
            });
        }
        let square = l.square(&class);
        if square >= -2 {
            return Ok(EffectivityVerdict {
                status: Effectivity::Effective,
                certificate: EffectivityCertificate::RiemannRoch { square },
            });
        }
        if !self.effective(class) {
            return Ok(EffectivityVerdict {
                status: Effectivity::NotEffective,
                certificate: EffectivityCertificate::NoSplitting { square },
            });
        }
        let mut curves = Vec::new();
        let mut rest = class;
        while let Some(EffEntry::Split(gamma)) = cached(&self.memo.effective, &rest) {
            curves.push(gamma);
            rest = rest - gamma;
        }
        Ok(EffectivityVerdict {
            status: Effectivity::Effective,
            certificate: EffectivityCertificate::Stripped {
                curves,
                remainder: rest,
            },
        })
    }

    /// Shorthand: effective or zero.
    pub fn effective_or_zero(&self, class: DivisorClass) -> Result<bool, OracleError> {
        self.require_ample()?;
        Ok(class.is_zero() || self.effective(class))
    }

    /// Memoized degree induction. The zero class answers `false` here.
    fn effective(&self, class: DivisorClass) -> bool {
        if class.is_zero() {
            return false;
        }
        let l = &self.lattice;
        let degree = l.degree(&class);
        if degree <= 0 {
            return false;
        }
        if l.square(&class) >= -2 {
            return true;
        }
        if let Some(e) = cached(&self.memo.effective, &class) {
            return !matches!(e, EffEntry::No);
        }
        let mut entry = EffEntry::No;
        'search: for s in 1..degree {
            for gamma in self.minus_two_of_degree(s).iter() {
                if l.intersect(gamma, &class) < 0 && self.effective(class - *gamma) {
                    entry = EffEntry::Split(*gamma);
                    break 'search;
                }
            }
        }
        !matches!(store(&self.memo.effective, class, entry), EffEntry::No)
    }

    /// Whether the (−2)-class `gamma` (assumed effective) is the class of an
    /// irreducible curve: no `A` with `A² ≥ −2`, `0 < A·H < Γ·H` and `Γ − A`
    /// effective. Any component of a reducible member would be such an `A`.
    fn irreducible(&self, gamma: DivisorClass) -> bool {
        if let Some(v) = cached(&self.memo.irreducible, &gamma) {
            return v;
        }
        let l = &self.lattice;
        let t = l.degree(&gamma);
        let reducible = (1..t).any(|s| {
            l.classes_on_degree_line(s, -2)
                .into_iter()
                .any(|part| self.effective(gamma - part))
        });
        store(&self.memo.irreducible, gamma, !reducible)
    }

    /// Irreducible (−2)-curves of degree at most `degree_bound`.
    pub fn irreducible_curves(&self, degree_bound: i64) -> Result<Vec<DivisorClass>, OracleError> {
        self.require_ample()?;
        Ok(self.irreducible_up_to(degree_bound))
    }

    fn irreducible_up_to(&self, degree_bound: i64) -> Vec<DivisorClass> {
        (1..=degree_bound)
            .flat_map(|t| {
                self.minus_two_of_degree(t)
                    .iter()
                    .copied()
                    .collect::<Vec<_>>()
            })
            .filter(|gamma| self.irreducible(*gamma))
            .collect()
    }

    /// Nef test. A nef class of positive degree is effective with `D² ≥ 0`,
    /// and a (−2)-curve meeting it negatively would be one of its
    /// components, hence of degree at most `D·H`.
    pub fn is_nef(&self, class: DivisorClass) -> Result<bool, OracleError> {
        self.require_ample()?;
        if class.is_zero() {
            return Ok(true);
        }
        let l = &self.lattice;
        let degree = l.degree(&class);
        if degree <= 0 || l.square(&class) < 0 {
            return Ok(false);
        }
        Ok(self
            .irreducible_up_to(degree)
            .iter()
            .all(|gamma| l.intersect(gamma, &class) >= 0))
    }

    /// Irreducible (−2)-curves `Γ` with `Γ·D < 0`; these lie in the base
    /// locus of `|D|` and have degree at most `D·H`.
    pub fn negative_curves(&self, class: DivisorClass) -> Result<Vec<DivisorClass>, OracleError> {
        self.require_ample()?;
        let l = &self.lattice;
        let degree = l.degree(&class);
        Ok(self
            .irreducible_up_to(degree)
            .into_iter()
            .filter(|gamma| l.intersect(gamma, &class) < 0)
            .collect())
    }

    /// `h⁰(D)`, computed by stripping fixed (−2)-curves down to a nef model.
    pub fn h0(&self, class: DivisorClass) -> Result<H0Result, OracleError> {
        let status = self.is_effective(class)?.status;
        if status == Effectivity::NotEffective {
            return Ok(H0Result {
                h0: 0,
                nef_model: class,
                stripped: Vec::new(),
                status,
            });
        }
        let mut model = class;
        let mut stripped = Vec::new();
        // Each removal lowers the degree, so this terminates.
        while let Some(gamma) = self.negative_curves(model)?.first().copied() {
            model = model - gamma;
            stripped.push(gamma);
        }
        Ok(H0Result {
            h0: self.nef_h0(model),
            nef_model: model,
            stripped,
            status,
        })
    }

    /// `h⁰` of an effective-or-zero nef class.
    fn nef_h0(&self, model: DivisorClass) -> u64 {
        let square = self.lattice.square(&model);
        debug_assert!(square >= 0, "nef model {model} has negative square");
        if model.is_zero() {
            1
        } else if square > 0 {
            (square / 2 + 2) as u64
        } else {
            // M = k·E with E a primitive elliptic pencil.
            model.divisibility() as u64 + 1
        }
    }

    /// Every nef model reachable by stripping in any admissible order.
    /// Uniqueness of the fixed part means this set has exactly one element
    /// for an effective class.
    pub fn strip_outcomes(
        &self,
        class: DivisorClass,
    ) -> Result<BTreeSet<DivisorClass>, OracleError> {
        let mut outcomes = BTreeSet::new();
        if !self.effective_or_zero(class)? {
            return Ok(outcomes);
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![class];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            let negative = self.negative_curves(x)?;
            if negative.is_empty() {
                outcomes.insert(x);
            }
            stack.extend(negative.into_iter().map(|gamma| x - gamma));
        }
        Ok(outcomes)
    }

    /// Every effective class with `0 < D·H ≤ degree_bound`.
    ///
    /// An effective class is a sum of irreducible curves `Aᵢ` of degrees
    /// `sᵢ` with `Aᵢ² ≥ −2`, i.e. `Δ·bᵢ² ≤ sᵢ² + 4n ≤ sᵢ²(1 + 4n)`. Summing,
    /// `Δ·b² ≤ t²(1 + 4n)` for the class of degree `t = Σ sᵢ`.
    pub fn effective_classes(&self, degree_bound: i64) -> Result<Vec<DivisorClass>, OracleError> {
        self.require_ample()?;
        let l = &self.lattice;
        let mut out = Vec::new();
        for t in 1..=degree_bound {
            let b_max = l.coefficient_bound(effective_box(l, t));
            for b in -b_max..=b_max {
                if let Some(x) = l.class_on_degree_line(t, b) {
                    if self.effective(x) {
                        out.push(x);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Right-hand side of the `b`-box `Δ·b² ≤ t²(1 + 4n)` for effective classes of degree `t`.
pub(crate) fn effective_box(l: &IntersectionLattice, t: i64) -> i128 {
    t as i128 * t as i128 * (1 + 4 * l.n() as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: i64, d: i64, g: i64) -> OracleContext {
        OracleContext::new(IntersectionLattice::new(n, d, g).unwrap())
    }

    const HC: DivisorClass = DivisorClass::new(1, -1);

    #[test]
    fn minus_two_examples() {
        assert_eq!(ctx(2, 3, 1).minus_two_classes(5).unwrap(), vec![HC]);
        assert!(ctx(2, 5, 1).minus_two_classes(10).unwrap().is_empty());
        let c = ctx(3, 7, 4);
        let found = c.minus_two_classes(3).unwrap();
        for x in &found {
            let deg = c.lattice().degree(x);
            assert_eq!(c.lattice().square(x), -2);
            assert!(0 < deg && deg <= 3);
        }
    }

    #[test]
    fn rejects_non_ample() {
        // Δ = 4n and d ≡ 0 (mod 2n).
        let c = ctx(3, 6, 3);
        assert!(!c.ample_ok());
        assert!(matches!(
            c.minus_two_classes(3),
            Err(OracleError::NotAmple(_))
        ));
        assert!(c.is_effective(DivisorClass::H).is_err());
        assert!(c.is_nef(DivisorClass::H).is_err());
        assert!(c.h0(DivisorClass::H).is_err());
        // Δ = n and d ≡ n (mod 2n).
        let c = ctx(9, 9, 3);
        assert!(!c.ample_ok());
    }

    #[test]
    fn effectivity_examples() {
        let c = ctx(2, 3, 1);
        let v = c.is_effective(HC).unwrap();
        assert_eq!(v.status, Effectivity::Effective);
        assert_eq!(
            v.certificate,
            EffectivityCertificate::RiemannRoch { square: -2 }
        );

        let v = ctx(8, 8, 2).is_effective(DivisorClass::new(1, -2)).unwrap();
        assert_eq!(v.status, Effectivity::NotEffective);
        assert_eq!(
            v.certificate,
            EffectivityCertificate::NonPositiveDegree { degree: 0 }
        );

        let v = c.is_effective(DivisorClass::new(2, -2)).unwrap();
        assert_eq!(v.status, Effectivity::Effective);
        assert_eq!(
            v.certificate,
            EffectivityCertificate::Stripped {
                curves: vec![HC],
                remainder: HC
            }
        );

        let v = c.is_effective(DivisorClass::ZERO).unwrap();
        assert_eq!(v.status, Effectivity::Zero);
    }

    #[test]
    fn nef_examples() {
        let c = ctx(2, 3, 1);
        assert!(c.is_nef(DivisorClass::C).unwrap());
        assert!(!c.is_nef(HC).unwrap());
        assert!(ctx(3, 7, 4).is_nef(DivisorClass::H).unwrap());
        assert!(c.is_nef(DivisorClass::ZERO).unwrap());
    }

    #[test]
    fn h0_examples() {
        assert_eq!(ctx(6, 5, 1).h0(HC).unwrap().h0, 3);
        assert_eq!(ctx(2, 3, 1).h0(DivisorClass::new(0, 2)).unwrap().h0, 3);
        let r = ctx(2, 3, 1).h0(DivisorClass::new(2, -2)).unwrap();
        assert_eq!(r.h0, 1);
        assert_eq!(r.nef_model, DivisorClass::ZERO);
        assert_eq!(r.stripped, vec![HC, HC]);
        let r = ctx(2, 3, 1).h0(DivisorClass::ZERO).unwrap();
        assert_eq!((r.h0, r.status), (1, Effectivity::Zero));
        assert_eq!(ctx(2, 3, 1).h0(DivisorClass::new(-1, 0)).unwrap().h0, 0);
        for (n, d, g) in [(2, 3, 1), (5, 7, 3), (9, 4, 0), (7, 6, 2)] {
            assert_eq!(ctx(n, d, g).h0(DivisorClass::H).unwrap().h0, n as u64 + 2);
        }
    }

    #[test]
    fn c_fails_nef_at_the_special_pair() {
        // (d, g) = (2n + 1, n + 1): C − H is a (−2)-curve with C·(C − H) = −1.
        for n in 2..7 {
            let c = ctx(n, 2 * n + 1, n + 1);
            assert!(!c.is_nef(DivisorClass::C).unwrap());
            assert_eq!(
                c.negative_curves(DivisorClass::C).unwrap(),
                vec![DivisorClass::new(-1, 1)]
            );
        }
    }

    #[test]
    fn shared_context_across_threads() {
        let c = ctx(5, 4, 1);
        let classes: Vec<_> = (-4..=4)
            .flat_map(|a| (-4..=4).map(move |b| DivisorClass::new(a, b)))
            .collect();
        let serial: Vec<_> = {
            let fresh = ctx(5, 4, 1);
            classes.iter().map(|x| fresh.h0(*x).unwrap().h0).collect()
        };
        let parallel: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = classes
                .chunks(9)
                .map(|chunk| {
                    s.spawn(|| {
                        chunk
                            .iter()
                            .map(|x| c.h0(*x).unwrap().h0)
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().unwrap())
                .collect()
        });
        assert_eq!(serial, parallel);
    }
}
