//! The eleven Calabi–Yau threefold families, their K3 constructions, and
//! the two admissibility classifiers for rigid curves of degree `d` and
//! genus `g`.
//!
//! [`theorem_result`] evaluates the printed conditions as stated.
//! [`derived_admissible`] rebuilds the answer from its ingredients: a curve
//! on a BN general K3 surface ([`bn_curve_exists`]) together with the node
//! count gate [`a2_gate`] and the normal bundle gate [`a3_gate`].

use std::fmt;

use thiserror::Error;

use crate::existence::{bn_curve_exists, ClauseReading, ExistenceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family label {0:?}, expected a..k")]
    UnknownLabel(char),
    #[error("minimum K3 intersection degree must be 1 or 2, got {0}")]
    InvalidMinA(i64),
    #[error("curve degree must be at least 1, got {0}")]
    CurveDegree(i64),
    #[error("genus must be nonnegative, got {0}")]
    Genus(i64),
    #[error("family ({label}) has no construction #{index}")]
    ConstructionIndex { label: char, index: usize },
    #[error("node count m = {m} is below g + 2 = {}", .g + 2)]
    NodeGate { m: i64, g: i64 },
    #[error(transparent)]
    Existence(#[from] ExistenceError),
}

/// A nodal degeneration `X₀ ⊇ S` of a family member through a K3 surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct K3Construction {
    /// Intersection degrees `(a_j)` of the K3 surface.
    pub k3_type: &'static [i64],
    /// Intersection degrees `(b_i)` of the threefold.
    pub cy_type: &'static [i64],
    /// The homogeneous space both live in.
    pub ambient: &'static str,
    /// Degree of `ambient` in its Plücker-type embedding (1 for projective space).
    pub ambient_degree: i64,
    pub k3_descriptor: &'static str,
    /// Number of ordinary double points of `X₀`.
    pub m: i64,
    /// Sectional genus of the K3 surface.
    pub mu: i64,
    pub min_a: i64,
    /// The two deformation hypotheses without numeric content; always assumed.
    pub a4_assumed: bool,
    pub a5_assumed: bool,
}

/// Inequality of the low-genus band, `d² ≥ coeff·g + offset` (or `>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticClause {
    pub coeff: i64,
    pub offset: i64,
    pub strict: bool,
    pub g_max: i64,
}

/// Inequality of the high-genus band: `d > g + c`, or `d > g/2 + c` when `halved`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearClause {
    pub c: i64,
    pub halved: bool,
    pub g_min: i64,
    pub g_max: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremConditions {
    pub special_pairs: &'static [(i64, i64)],
    pub quadratic: QuadraticClause,
    pub linear: LinearClause,
}

impl TheoremConditions {
    /// Largest genus covered by any clause.
    pub fn genus_cap(&self) -> i64 {
        self.linear.g_max
    }
}

impl fmt::Display for QuadraticClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.strict { ">" } else { "≥" };
        write!(f, "d^2 {rel} {}g", self.coeff)?;
        if self.offset != 0 {
            write!(f, "{}", self.offset)?;
        }
        write!(f, " for 0 ≤ g ≤ {}", self.g_max)
    }
}

impl fmt::Display for LinearClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = if self.halved { "g/2" } else { "g" };
        write!(
            f,
            "d > {g} + {} for {} ≤ g ≤ {}",
            self.c, self.g_min, self.g_max
        )
    }
}

impl fmt::Display for TheoremConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.special_pairs.is_empty() {
            let pairs: Vec<String> = self
                .special_pairs
                .iter()
                .map(|(d, g)| format!("({d},{g})"))
                .collect();
            write!(f, "(d,g) = {}; ", pairs.join(", "))?;
        }
        write!(f, "{}; {}", self.quadratic, self.linear)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyFamily {
    pub label: char,
    pub cy_descriptor: &'static str,
    /// Dimension of the projective space spanned by the threefold.
    pub r: i64,
    pub constructions: &'static [K3Construction],
    pub conditions: TheoremConditions,
}

impl CyFamily {
    pub fn construction(&self, index: usize) -> Result<&K3Construction, FamilyError> {
        self.constructions
            .get(index)
            .ok_or(FamilyError::ConstructionIndex {
                label: self.label,
                index,
            })
    }

    pub fn max_nodes(&self) -> i64 {
        self.constructions.iter().map(|c| c.m).max().unwrap_or(0)
    }
}

const fn proj(
    k3_type: &'static [i64],
    cy_type: &'static [i64],
    ambient: &'static str,
    k3_descriptor: &'static str,
    m: i64,
    mu: i64,
    min_a: i64,
) -> K3Construction {
    K3Construction {
        k3_type,
        cy_type,
        ambient,
        ambient_degree: 1,
        k3_descriptor,
        m,
        mu,
        min_a,
        a4_assumed: true,
        a5_assumed: true,
    }
}

const fn homog(
    k3_type: &'static [i64],
    cy_type: &'static [i64],
    ambient: &'static str,
    ambient_degree: i64,
    k3_descriptor: &'static str,
    m: i64,
    mu: i64,
) -> K3Construction {
    K3Construction {
        ambient_degree,
        ..proj(k3_type, cy_type, ambient, k3_descriptor, m, mu, 1)
    }
}

const fn quad(coeff: i64, offset: i64, g_max: i64) -> QuadraticClause {
    QuadraticClause {
        coeff,
        offset,
        strict: false,
        g_max,
    }
}

const fn lin(c: i64, halved: bool, g_min: i64, g_max: i64) -> LinearClause {
    LinearClause {
        c,
        halved,
        g_min,
        g_max,
    }
}

const NO_PAIRS: &[(i64, i64)] = &[];
const SPECIAL: &[(i64, i64)] = &[(3, 1), (5, 2)];

static REGISTRY: [CyFamily; 11] = [
    CyFamily {
        label: 'a',
        cy_descriptor: "(5) ⊆ P^4",
        r: 4,
        constructions: &[
            proj(&[4, 1], &[5], "P^4", "(4,1) ⊆ P^4", 16, 3, 1),
            proj(&[3, 2], &[5], "P^4", "(3,2) ⊆ P^4", 36, 4, 2),
        ],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(12, -3, 12),
            linear: lin(6, true, 13, 34),
        },
    },
    CyFamily {
        label: 'b',
        cy_descriptor: "(4,2) ⊆ P^5",
        r: 5,
        constructions: &[
            proj(&[4, 1, 1], &[4, 2], "P^5", "(4,1,1) ⊆ P^5", 4, 3, 1),
            proj(&[3, 2, 1], &[4, 2], "P^5", "(3,2,1) ⊆ P^5", 18, 4, 1),
            proj(&[2, 2, 2], &[4, 2], "P^5", "(2,2,2) ⊆ P^5", 32, 5, 2),
        ],
        conditions: TheoremConditions {
            special_pairs: SPECIAL,
            quadratic: quad(16, 0, 15),
            linear: lin(8, true, 16, 30),
        },
    },
    CyFamily {
        label: 'c',
        cy_descriptor: "(3,3) ⊆ P^5",
        r: 5,
        constructions: &[
            proj(&[3, 2, 1], &[3, 3], "P^5", "(3,2,1) ⊆ P^5", 12, 4, 1),
            proj(&[2, 2, 2], &[3, 3], "P^5", "(2,2,2) ⊆ P^5", 32, 5, 2),
        ],
        conditions: TheoremConditions {
            special_pairs: SPECIAL,
            quadratic: quad(16, 0, 15),
            linear: lin(8, true, 16, 30),
        },
    },
    CyFamily {
        label: 'd',
        cy_descriptor: "(3,2,2) ⊆ P^6",
        r: 6,
        constructions: &[
            proj(&[3, 2, 1, 1], &[3, 2, 2], "P^6", "(3,2,1,1) ⊆ P^6", 6, 4, 1),
            proj(
                &[2, 2, 2, 1],
                &[3, 2, 2],
                "P^6",
                "(2,2,2,1) ⊆ P^6",
                16,
                5,
                1,
            ),
        ],
        conditions: TheoremConditions {
            special_pairs: SPECIAL,
            quadratic: quad(16, 0, 4),
            linear: lin(4, false, 5, 14),
        },
    },
    CyFamily {
        label: 'e',
        cy_descriptor: "(2,2,2,2) ⊆ P^7",
        r: 7,
        constructions: &[proj(
            &[2, 2, 2, 1, 1],
            &[2, 2, 2, 2],
            "P^7",
            "(2,2,2,1,1) ⊆ P^7",
            8,
            5,
            1,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(16, 0, 3),
            linear: lin(4, false, 4, 6),
        },
    },
    CyFamily {
        label: 'f',
        cy_descriptor: "(3,1,1) ∩ G(2,V^5) ⊆ P^7",
        r: 7,
        constructions: &[homog(
            &[2, 1, 1, 1],
            &[3, 1, 1],
            "G(2,V^5)",
            5,
            "(2,1,1,1) ∩ G(2,V^5) ⊆ P^6",
            20,
            6,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(20, -4, 4),
            linear: lin(5, false, 5, 18),
        },
    },
    CyFamily {
        label: 'g',
        cy_descriptor: "(2,2,1) ∩ G(2,V^5) ⊆ P^8",
        r: 8,
        constructions: &[homog(
            &[2, 1, 1, 1],
            &[2, 2, 1],
            "G(2,V^5)",
            5,
            "(2,1,1,1) ∩ G(2,V^5) ⊆ P^6",
            10,
            6,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(20, -4, 4),
            linear: lin(5, false, 5, 8),
        },
    },
    CyFamily {
        label: 'h',
        cy_descriptor: "(2,1^6) ∩ Σ^10_12 ⊆ P^9",
        r: 9,
        constructions: &[homog(
            &[1, 1, 1, 1, 1, 1, 1, 1],
            &[2, 1, 1, 1, 1, 1, 1],
            "Σ^10_12",
            12,
            "(1^8) ∩ Σ^10_12 ⊆ P^7",
            12,
            7,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: QuadraticClause {
                coeff: 24,
                offset: 0,
                strict: true,
                g_max: 5,
            },
            linear: lin(6, false, 6, 10),
        },
    },
    CyFamily {
        label: 'i',
        cy_descriptor: "(2,1^4) ∩ G(V^6,2) ⊆ P^10",
        r: 10,
        constructions: &[homog(
            &[1, 1, 1, 1, 1, 1],
            &[2, 1, 1, 1, 1],
            "G(V^6,2)",
            14,
            "(1^6) ∩ G(V^6,2) ⊆ P^8",
            14,
            8,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(28, -3, 6),
            linear: lin(7, false, 7, 12),
        },
    },
    CyFamily {
        label: 'j',
        cy_descriptor: "(2,1,1) ∩ Σ^6_16 ⊆ P^11",
        r: 11,
        constructions: &[homog(
            &[1, 1, 1, 1],
            &[2, 1, 1],
            "Σ^6_16",
            16,
            "(1^4) ∩ Σ^6_16 ⊆ P^9",
            16,
            9,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(32, 0, 7),
            linear: lin(8, false, 8, 14),
        },
    },
    CyFamily {
        label: 'k',
        cy_descriptor: "(2,1) ∩ Σ^5_18 ⊆ P^12",
        r: 12,
        constructions: &[homog(
            &[1, 1, 1],
            &[2, 1],
            "Σ^5_18",
            18,
            "(1^3) ∩ Σ^5_18 ⊆ P^10",
            18,
            10,
        )],
        conditions: TheoremConditions {
            special_pairs: NO_PAIRS,
            quadratic: quad(36, 0, 8),
            linear: lin(9, false, 9, 16),
        },
    },
];

pub fn registry() -> &'static [CyFamily] {
    &REGISTRY
}

pub fn family(label: char) -> Result<&'static CyFamily, FamilyError> {
    REGISTRY
        .iter()
        .find(|f| f.label == label)
        .ok_or(FamilyError::UnknownLabel(label))
}

/// One `threefold | K3 surface | m` row per construction, in registry order.
pub fn node_rows() -> Vec<String> {
    registry()
        .iter()
        .flat_map(|f| {
            f.constructions
                .iter()
                .map(move |c| format!("{} | {} | {}", f.cy_descriptor, c.k3_descriptor, c.m))
        })
        .collect()
}

/// A registry row that fails an internal consistency check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryIssue {
    pub label: char,
    pub detail: String,
}

/// Checks every family: the genus cap equals the largest `m` minus 2, each
/// `min_a` is the minimum of the K3 type, and the K3 degree
/// `ambient_degree·∏ a_j` equals `2μ − 2`.
pub fn registry_issues() -> Vec<RegistryIssue> {
    let mut issues = Vec::new();
    for f in registry() {
        let mut push = |detail: String| {
            issues.push(RegistryIssue {
                label: f.label,
                detail,
            })
        };
        if f.conditions.genus_cap() != f.max_nodes() - 2 {
            push(format!(
                "genus cap {} != {} - 2",
                f.conditions.genus_cap(),
                f.max_nodes()
            ));
        }
        let (q, l) = (f.conditions.quadratic, f.conditions.linear);
        if l.g_min != q.g_max + 1 {
            push(format!(
                "genus bands {}..{} and {}.. are not adjacent",
                0, q.g_max, l.g_min
            ));
        }
        for c in f.constructions {
            if c.k3_type.iter().min() != Some(&c.min_a) {
                push(format!(
                    "{}: min_a {} is not min of the type",
                    c.k3_descriptor, c.min_a
                ));
            }
            let degree = c.ambient_degree * c.k3_type.iter().product::<i64>();
            if degree != 2 * c.mu - 2 {
                push(format!(
                    "{}: degree {degree} != 2*{} - 2",
                    c.k3_descriptor, c.mu
                ));
            }
        }
    }
    issues
}

/// `m ≥ g + 2`: enough nodes for the linear system of the curve.
pub fn a2_gate(m: i64, g: i64) -> bool {
    m >= g + 2
}

/// Vanishing of `H¹` of the normal bundle of the curve in the ambient space.
pub fn a3_gate(mu: i64, min_a: i64, d: i64, g: i64) -> Result<bool, FamilyError> {
    match min_a {
        1 => Ok(d <= 2 * (mu - 1) || d > mu + g - 1),
        2 => Ok(d <= 4 * (mu - 1) || 2 * d > 4 * mu + g - 4),
        other => Err(FamilyError::InvalidMinA(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Literal,
    Derived,
}

impl fmt::Display for Via {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Via::Literal => "literal",
            Via::Derived => "derived",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub admissible: bool,
    pub via: Via,
    pub construction_used: Option<K3Construction>,
    /// For literal verdicts one of `special-pair`, `quadratic-clause`,
    /// `linear-clause`, `excluded`; for derived ones the K3 existence label
    /// of the witnessing construction, or `excluded`.
    pub clause: String,
}

fn check_point(d: i64, g: i64) -> Result<(), FamilyError> {
    if d < 1 {
        return Err(FamilyError::CurveDegree(d));
    }
    if g < 0 {
        return Err(FamilyError::Genus(g));
    }
    Ok(())
}

/// Evaluates the printed conditions for family `label` exactly as stated.
pub fn theorem_result(label: char, d: i64, g: i64) -> Result<FamilyVerdict, FamilyError> {
    let f = family(label)?;
    check_point(d, g)?;
    let TheoremConditions {
        special_pairs,
        quadratic: q,
        linear: l,
    } = f.conditions;
    let clause = if special_pairs.contains(&(d, g)) {
        "special-pair"
    } else if (0..=q.g_max).contains(&g)
        && if q.strict {
            d * d > q.coeff * g + q.offset
        } else {
            d * d >= q.coeff * g + q.offset
        }
    {
        "quadratic-clause"
    } else if (l.g_min..=l.g_max).contains(&g)
        && if l.halved {
            2 * d > g + 2 * l.c
        } else {
            d > g + l.c
        }
    {
        "linear-clause"
    } else {
        "excluded"
    };
    Ok(FamilyVerdict {
        admissible: clause != "excluded",
        via: Via::Literal,
        construction_used: None,
        clause: clause.to_string(),
    })
}

/// Whether `construction` yields a rigid `(d, g)` curve: the curve lies on
/// the BN general K3 surface and both numeric gates pass.
pub fn construction_admits(
    c: &K3Construction,
    d: i64,
    g: i64,
    reading: ClauseReading,
) -> Result<Option<String>, FamilyError> {
    let v = bn_curve_exists(c.mu, d, g, reading)?;
    let ok = v.exists && a2_gate(c.m, g) && a3_gate(c.mu, c.min_a, d, g)?;
    Ok(ok.then_some(v.case_label))
}

/// Union over the family's constructions, first passing construction wins.
pub fn derived_admissible(label: char, d: i64, g: i64) -> Result<FamilyVerdict, FamilyError> {
    derived_admissible_with(label, d, g, ClauseReading::Corrected)
}

pub fn derived_admissible_with(
    label: char,
    d: i64,
    g: i64,
    reading: ClauseReading,
) -> Result<FamilyVerdict, FamilyError> {
    let f = family(label)?;
    check_point(d, g)?;
    for c in f.constructions {
        if let Some(case_label) = construction_admits(c, d, g, reading)? {
            return Ok(FamilyVerdict {
                admissible: true,
                via: Via::Derived,
                construction_used: Some(*c),
                clause: case_label,
            });
        }
    }
    Ok(FamilyVerdict {
        admissible: false,
        via: Via::Derived,
        construction_used: None,
        clause: "excluded".to_string(),
    })
}

/// `C(m − 2, g)`, the number of rigid curves the nodal degeneration deforms to.
pub fn rigid_curve_count(label: char, construction: usize, g: i64) -> Result<u128, FamilyError> {
    let c = family(label)?.construction(construction)?;
    if g < 0 {
        return Err(FamilyError::Genus(g));
    }
    if !a2_gate(c.m, g) {
        return Err(FamilyError::NodeGate { m: c.m, g });
    }
    Ok(binomial((c.m - 2) as u128, g as u128))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
