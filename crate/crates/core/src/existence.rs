//! Existence of smooth curves of degree `d` and genus `g` on K3 surfaces of
//! degree `2n`, and on Brill–Noether general K3 surfaces of genus 3 to 10.
//!
//! Fractional conditions on `g` are compared after clearing denominators;
//! most of them are conditions on `Δ = d² − 4n(g − 1)`:
//!
//! | condition                  | cleared form     |
//! |----------------------------|------------------|
//! | `g = d²/4n + 1`            | `Δ = 0`          |
//! | `d²/4n < g < d²/4n + 1`    | `0 < Δ < 4n`     |
//! | `g = d²/4n`                | `Δ = 4n`         |
//! | `g < d²/4n`                | `Δ > 4n`         |

use std::fmt;

use thiserror::Error;

use crate::lattice::discriminant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExistenceError {
    #[error("n = {0} is out of range (need n >= 2)")]
    PolarizationDegree(i64),
    #[error("d = {0} is out of range (need d >= 1)")]
    CurveDegree(i64),
    #[error("g = {0} is out of range (need g >= 0)")]
    Genus(i64),
    #[error("genus {0} of the K3 surface is out of range (need {1})")]
    SurfaceGenus(i64, &'static str),
}

fn check_dg(d: i64, g: i64) -> Result<(), ExistenceError> {
    if d < 1 {
        return Err(ExistenceError::CurveDegree(d));
    }
    if g < 0 {
        return Err(ExistenceError::Genus(g));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardRank {
    Rank1,
    Rank2,
}

impl fmt::Display for PicardRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PicardRank::Rank1 => "rank1",
            PicardRank::Rank2 => "rank2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// `n = k²m`, `(k, m) ≠ (2, 1)` and `2n | kd`; the Picard group is `Z·H/k`.
    RankOne { k: i64, m: i64 },
    /// `C` is cut out by a hypersurface of this degree. `divisibility_enforced`
    /// marks clauses where `2(μ − 1) | d` is imposed although not printed.
    Hypersurface {
        degree: i64,
        divisibility_enforced: bool,
    },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::RankOne { k, m } => write!(f, "k={k},m={m}"),
            Certificate::Hypersurface {
                degree,
                divisibility_enforced,
            } => {
                write!(f, "hypersurface-degree={degree}")?;
                if *divisibility_enforced {
                    write!(f, ",divisibility-enforced")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub case_label: String,
    pub certificate: Option<Certificate>,
    pub picard: PicardRank,
}

impl ExistenceVerdict {
    fn new(exists: bool, label: impl Into<String>, picard: PicardRank) -> Self {
        ExistenceVerdict {
            exists,
            case_label: label.into(),
            certificate: None,
            picard,
        }
    }
}

/// Which of the four discriminant ranges `(n, d, g)` falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscriminantRange {
    /// `Δ < 0`: no curve class of this kind exists.
    Negative,
    Zero,
    Band,
    FourN,
    Large,
}

pub fn discriminant_range(n: i64, d: i64, g: i64) -> DiscriminantRange {
    let disc = discriminant(n, d, g);
    let four_n = 4 * n as i128;
    match disc {
        x if x < 0 => DiscriminantRange::Negative,
        0 => DiscriminantRange::Zero,
        x if x < four_n => DiscriminantRange::Band,
        x if x == four_n => DiscriminantRange::FourN,
        _ => DiscriminantRange::Large,
    }
}

/// `x ≡ ±c (mod m)` with least nonnegative residues.
fn congruent_pm(x: i64, c: i64, m: i64) -> bool {
    let r = x.rem_euclid(m);
    r == c.rem_euclid(m) || r == (-c).rem_euclid(m)
}

fn divides(a: i64, b: i64) -> bool {
    a != 0 && b % a == 0
}

/// Smallest `(k, m)` with `k, m ≥ 1`, `n = k²m`, `(k, m) ≠ (2, 1)` and `2n | kd`.
pub fn rank_one_certificate(n: i64, d: i64) -> Option<(i64, i64)> {
    (1..)
        .take_while(|k| k * k <= n)
        .filter(|k| n % (k * k) == 0)
        .map(|k| (k, n / (k * k)))
        .find(|&(k, m)| (k, m) != (2, 1) && (k as i128 * d as i128) % (2 * n as i128) == 0)
}

/// Which exclusion of the `0 < Δ < 4n` band applies, if any.
fn band_exclusion(n: i64, d: i64, disc: i128) -> Option<char> {
    let two_n = 2 * n;
    if congruent_pm(d, 1, two_n) || congruent_pm(d, 2, two_n) {
        return Some('a');
    }
    if disc == 1 && (congruent_pm(d, n + 1, two_n) || congruent_pm(d, n - 1, two_n)) {
        return Some('b');
    }
    if disc == n as i128 && d.rem_euclid(two_n) == n {
        return Some('c');
    }
    if disc == 1 && (divides(d - 1, two_n) || divides(d + 1, two_n)) {
        return Some('d');
    }
    None
}

/// Existence of a K3 surface of degree `2n` in `P^{n+1}` containing a smooth
/// curve of degree `d` and genus `g`.
pub fn k3_curve_exists(n: i64, d: i64, g: i64) -> Result<ExistenceVerdict, ExistenceError> {
    if n < 2 {
        return Err(ExistenceError::PolarizationDegree(n));
    }
    check_dg(d, g)?;
    let disc = discriminant(n, d, g);
    let verdict = match discriminant_range(n, d, g) {
        DiscriminantRange::Negative => {
            ExistenceVerdict::new(false, "mainthm.none", PicardRank::Rank2)
        }
        DiscriminantRange::Zero => match rank_one_certificate(n, d) {
            Some((k, m)) => ExistenceVerdict {
                certificate: Some(Certificate::RankOne { k, m }),
                ..ExistenceVerdict::new(true, "mainthm.i", PicardRank::Rank1)
            },
            None => ExistenceVerdict::new(false, "mainthm.i.excl", PicardRank::Rank1),
        },
        DiscriminantRange::Band => match band_exclusion(n, d, disc) {
            Some(c) => {
                ExistenceVerdict::new(false, format!("mainthm.ii.excl.{c}"), PicardRank::Rank2)
            }
            None => ExistenceVerdict::new(true, "mainthm.ii", PicardRank::Rank2),
        },
        DiscriminantRange::FourN => {
            if d % (2 * n) == 0 {
                ExistenceVerdict::new(false, "mainthm.iii.excl", PicardRank::Rank2)
            } else {
                ExistenceVerdict::new(true, "mainthm.iii", PicardRank::Rank2)
            }
        }
        DiscriminantRange::Large => {
            if (d, g) == (2 * n + 1, n + 1) {
                ExistenceVerdict::new(false, "mainthm.iv.excl", PicardRank::Rank2)
            } else {
                ExistenceVerdict::new(true, "mainthm.iv", PicardRank::Rank2)
            }
        }
    };
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadricGeneration {
    Quadrics,
    QuadricsAndCubics,
    NotApplicable,
}

impl fmt::Display for QuadricGeneration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadricGeneration::Quadrics => "quadrics",
            QuadricGeneration::QuadricsAndCubics => "quadrics-and-cubics",
            QuadricGeneration::NotApplicable => "not-applicable",
        })
    }
}

/// Whether the surface can be cut out by quadrics alone (only meaningful for `n ≥ 4`
/// and when the surface exists).
pub fn quadric_generation(n: i64, d: i64, g: i64) -> QuadricGeneration {
    if n < 4 || !k3_curve_exists(n, d, g).is_ok_and(|v| v.exists) {
        return QuadricGeneration::NotApplicable;
    }
    if discriminant_range(n, d, g) != DiscriminantRange::Band {
        return QuadricGeneration::Quadrics;
    }
    let disc = discriminant(n, d, g);
    let two_n = 2 * n;
    let cubic =
        (disc == 1 && congruent_pm(3 * d, 3, two_n)) || (disc == 9 && congruent_pm(d, 3, two_n));
    if cubic {
        QuadricGeneration::QuadricsAndCubics
    } else {
        QuadricGeneration::Quadrics
    }
}

/// Reading of the genus-9 boundary clause, whose printed form `g = d²/28`
/// does not fit the `4n = 32` of a genus-9 surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClauseReading {
    /// `d² = 28g`, as printed.
    Literal,
    /// `d² = 32g`.
    #[default]
    Corrected,
}

impl fmt::Display for ClauseReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClauseReading::Literal => "literal",
            ClauseReading::Corrected => "corrected",
        })
    }
}

const ROMAN: [&str; 8] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];

/// The genus-specific boundary clause sitting between the dependent case
/// and the strict inequality `g < d²/4n`.
#[derive(Debug, Clone, Copy)]
enum BoundaryClause {
    Absent,
    /// `d² = 4n·g − c` (equivalently `Δ = 4n − c`).
    Shift(i64),
    /// `Δ = 4n` and `d mod m ∈ residues`.
    OnLine {
        modulus: i64,
        residues: &'static [i64],
    },
}

#[derive(Debug, Clone, Copy)]
struct BnRow {
    /// Printed divisibility for the dependent clause, if any.
    dependent_divisor: Option<i64>,
    boundary: BoundaryClause,
    exception: (i64, i64),
}

fn bn_row(mu: i64) -> BnRow {
    use BoundaryClause::*;
    let (dependent_divisor, boundary, exception) = match mu {
        3 => (None, Absent, (5, 3)),
        4 => (None, Shift(3), (7, 4)),
        5 => (
            Some(8),
            OnLine {
                modulus: 8,
                residues: &[4],
            },
            (9, 5),
        ),
        6 => (None, Shift(4), (11, 6)),
        7 => (None, Absent, (13, 7)),
        8 => (None, Shift(3), (15, 8)),
        9 => (
            Some(16),
            OnLine {
                modulus: 16,
                residues: &[8],
            },
            (17, 9),
        ),
        10 => (
            Some(18),
            OnLine {
                modulus: 18,
                residues: &[6, 12],
            },
            (19, 10),
        ),
        _ => unreachable!("genus checked by caller"),
    };
    BnRow {
        dependent_divisor,
        boundary,
        exception,
    }
}

/// Existence of a smooth curve of degree `d` and genus `g` on a
/// Brill–Noether general K3 surface of genus `μ ∈ [3, 10]`, evaluated
/// clause by clause as `(a)` dependent, `(b)` boundary, `(c)` general.
pub fn bn_curve_exists(
    mu: i64,
    d: i64,
    g: i64,
    reading: ClauseReading,
) -> Result<ExistenceVerdict, ExistenceError> {
    if !(3..=10).contains(&mu) {
        return Err(ExistenceError::SurfaceGenus(mu, "3 <= genus <= 10"));
    }
    check_dg(d, g)?;
    let n = mu - 1;
    let roman = ROMAN[(mu - 3) as usize];
    let row = bn_row(mu);
    let disc = discriminant(n, d, g);
    let four_n = 4 * n as i128;
    let label = |clause: &str| format!("bncurves.{roman}.{clause}");

    // (a) O(1) and O(C) dependent: Δ = 0 and C is cut out by a hypersurface of degree d/2n.
    if disc == 0 {
        let divisor = row.dependent_divisor.unwrap_or(2 * n);
        if d % divisor == 0 && d % (2 * n) == 0 {
            return Ok(ExistenceVerdict {
                certificate: Some(Certificate::Hypersurface {
                    degree: d / (2 * n),
                    divisibility_enforced: row.dependent_divisor.is_none(),
                }),
                ..ExistenceVerdict::new(true, label("a"), PicardRank::Rank1)
            });
        }
    }

    let boundary = match row.boundary {
        BoundaryClause::Absent => false,
        BoundaryClause::Shift(c) => disc == four_n - c as i128,
        BoundaryClause::OnLine { modulus, residues } => {
            let on_line = match (mu, reading) {
                (9, ClauseReading::Literal) => d as i128 * d as i128 == 28 * g as i128,
                _ => disc == four_n,
            };
            on_line && residues.contains(&d.rem_euclid(modulus))
        }
    };
    if boundary {
        return Ok(ExistenceVerdict::new(true, label("b"), PicardRank::Rank2));
    }

    let general_clause = match row.boundary {
        BoundaryClause::Absent => "b",
        _ => "c",
    };
    if disc > four_n {
        return Ok(if (d, g) == row.exception {
            ExistenceVerdict::new(false, format!("bncurves.{roman}.excl"), PicardRank::Rank2)
        } else {
            ExistenceVerdict::new(true, label(general_clause), PicardRank::Rank2)
        });
    }
    Ok(ExistenceVerdict::new(
        false,
        format!("bncurves.{roman}.none"),
        PicardRank::Rank2,
    ))
}

/// A projective model of a Brill–Noether general polarized K3 surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K3Model {
    pub genus: i64,
    pub model: &'static str,
    pub ambient: &'static str,
}

impl K3Model {
    /// `n` with `H² = 2n`.
    pub fn n(&self) -> i64 {
        self.genus - 1
    }
}

const MUKAI_MODELS: [(&str, &str); 9] = [
    ("double covering with branch sextic", "P^2"),
    ("(4) ⊆ P^3", "P^3"),
    ("(2,3) ⊆ P^4", "P^4"),
    ("(2,2,2) ⊆ P^5", "P^5"),
    ("(1,1,1,2) ∩ G(2,V^5) ⊆ P^6", "G(2,V^5)"),
    ("(1^8) ∩ Σ^10_12 ⊆ P^7", "Σ^10_12"),
    ("(1^6) ∩ G(V^6,2) ⊆ P^8", "G(V^6,2)"),
    ("(1^4) ∩ Σ^6_16 ⊆ P^9", "Σ^6_16"),
    ("(1^3) ∩ Σ^5_18 ⊆ P^10", "Σ^5_18"),
];

pub fn mukai_model(mu: i64) -> Result<K3Model, ExistenceError> {
    if !(2..=10).contains(&mu) {
        return Err(ExistenceError::SurfaceGenus(mu, "2 <= genus <= 10"));
    }
    let (model, ambient) = MUKAI_MODELS[(mu - 2) as usize];
    Ok(K3Model {
        genus: mu,
        model,
        ambient,
    })
}

pub fn mukai_models() -> Vec<K3Model> {
    (2..=10)
        .map(|mu| mukai_model(mu).expect("in range"))
        .collect()
}
