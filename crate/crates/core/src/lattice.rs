//! The rank-2 Picard lattice `ZH ⊕ ZC` of a polarized K3 surface carrying a
//! curve class `C` of degree `d` and genus `g` against a polarization of
//! degree `H² = 2n`.
//!
//! All arithmetic is exact. Intersection numbers are evaluated in `i128`
//! and narrowed with a check, so an overflow panics instead of wrapping.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("n = {0} is out of range (need n >= 2)")]
    PolarizationDegree(i64),
    #[error("d = {0} is out of range (need d >= 1)")]
    CurveDegree(i64),
    #[error("g = {0} is out of range (need g >= 0)")]
    Genus(i64),
    #[error("discriminant d^2 - 4n(g-1) = {0} is not positive; the lattice is not hyperbolic")]
    NonPositiveDiscriminant(i128),
    #[error("arithmetic overflow in lattice computation")]
    Overflow,
}

/// A divisor class `a·H + b·C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DivisorClass {
    pub a: i64,
    pub b: i64,
}

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass { a: 0, b: 0 };
    /// The polarization `H`.
    pub const H: DivisorClass = DivisorClass { a: 1, b: 0 };
    /// The curve class `C`.
    pub const C: DivisorClass = DivisorClass { a: 0, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        DivisorClass { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Largest `k` with `self = k·E` for an integral class `E`; zero for the zero class.
    pub fn divisibility(&self) -> i64 {
        gcd(self.a, self.b)
    }

    /// Determinant of the coordinate matrix with rows `self`, `other`.
    pub fn cross(&self, other: &DivisorClass) -> i128 {
        self.a as i128 * other.b as i128 - other.a as i128 * self.b as i128
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: DivisorClass) -> DivisorClass {
        DivisorClass::new(
            self.a
                .checked_add(rhs.a)
                .expect("class coordinate overflow"),
            self.b
                .checked_add(rhs.b)
                .expect("class coordinate overflow"),
        )
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        DivisorClass::new(
            self.a
                .checked_sub(rhs.a)
                .expect("class coordinate overflow"),
            self.b
                .checked_sub(rhs.b)
                .expect("class coordinate overflow"),
        )
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass::ZERO - self
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        DivisorClass::new(
            self.checked_mul(rhs.a).expect("class coordinate overflow"),
            self.checked_mul(rhs.b).expect("class coordinate overflow"),
        )
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, 0) => write!(f, "0"),
            (a, 0) => write!(f, "{}", term(a, "H")),
            (0, b) => write!(f, "{}", term(b, "C")),
            (a, b) => {
                let rest = term(b.abs(), "C");
                let sign = if b < 0 { '-' } else { '+' };
                write!(f, "{}{}{}", term(a, "H"), sign, rest)
            }
        }
    }
}

fn term(k: i64, sym: &str) -> String {
    match k {
        1 => sym.to_string(),
        -1 => format!("-{sym}"),
        _ => format!("{k}{sym}"),
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a.unsigned_abs(), b.unsigned_abs());
    while y != 0 {
        (x, y) = (y, x % y);
    }
    i64::try_from(x).expect("gcd overflow")
}

/// The fundamental discriminant `d² − 4n(g − 1)` without any range checks.
pub fn discriminant(n: i64, d: i64, g: i64) -> i128 {
    let (n, d, g) = (n as i128, d as i128, g as i128);
    d * d - 4 * n * (g - 1)
}

/// `ZH ⊕ ZC` with Gram matrix `[[2n, d], [d, 2(g−1)]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntersectionLattice {
    n: i64,
    d: i64,
    g: i64,
    disc: i64,
}

impl IntersectionLattice {
    /// Builds `S(n, d, g)`; requires `n ≥ 2`, `d ≥ 1`, `g ≥ 0` and a positive discriminant.
    pub fn new(n: i64, d: i64, g: i64) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::PolarizationDegree(n));
        }
        if d < 1 {
            return Err(LatticeError::CurveDegree(d));
        }
        if g < 0 {
            return Err(LatticeError::Genus(g));
        }
        let disc = discriminant(n, d, g);
        if disc <= 0 {
            return Err(LatticeError::NonPositiveDiscriminant(disc));
        }
        // The Gram entries themselves must fit.
        n.checked_mul(2).ok_or(LatticeError::Overflow)?;
        g.checked_sub(1)
            .and_then(|x| x.checked_mul(2))
            .ok_or(LatticeError::Overflow)?;
        let disc = i64::try_from(disc).map_err(|_| LatticeError::Overflow)?;
        Ok(IntersectionLattice { n, d, g, disc })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn g(&self) -> i64 {
        self.g
    }

    /// `Δ = d² − 4n(g−1)`, always positive.
    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn gram(&self) -> [[i64; 2]; 2] {
        [[2 * self.n, self.d], [self.d, 2 * (self.g - 1)]]
    }

    fn intersect_wide(&self, x: &DivisorClass, y: &DivisorClass) -> i128 {
        let [[hh, hc], [_, cc]] = self.gram();
        let (xa, xb, ya, yb) = (x.a as i128, x.b as i128, y.a as i128, y.b as i128);
        hh as i128 * xa * ya + hc as i128 * (xa * yb + ya * xb) + cc as i128 * xb * yb
    }

    pub fn try_intersect(&self, x: &DivisorClass, y: &DivisorClass) -> Result<i64, LatticeError> {
        i64::try_from(self.intersect_wide(x, y)).map_err(|_| LatticeError::Overflow)
    }

    /// The intersection pairing. Panics if the result leaves `i64`.
    pub fn intersect(&self, x: &DivisorClass, y: &DivisorClass) -> i64 {
        self.try_intersect(x, y)
            .expect("intersection number overflow")
    }

    pub fn square(&self, x: &DivisorClass) -> i64 {
        self.intersect(x, x)
    }

    /// `D·H`.
    pub fn degree(&self, x: &DivisorClass) -> i64 {
        self.intersect(x, &DivisorClass::H)
    }

    /// `(A·B)² − A²·B²`.
    pub fn disc_pair(&self, x: &DivisorClass, y: &DivisorClass) -> i128 {
        let xy = self.intersect_wide(x, y);
        let xx = self.intersect_wide(x, x);
        let yy = self.intersect_wide(y, y);
        xy.checked_mul(xy)
            .zip(xx.checked_mul(yy))
            .and_then(|(p, q)| p.checked_sub(q))
            .expect("discriminant overflow")
    }

    /// Solves `D·H = t` for `a` given `b`; `None` when `a` would not be integral.
    pub fn class_on_degree_line(&self, t: i64, b: i64) -> Option<DivisorClass> {
        let num = t as i128 - self.d as i128 * b as i128;
        let den = 2 * self.n as i128;
        (num % den == 0).then(|| DivisorClass::new((num / den) as i64, b))
    }

    /// Largest `B ≥ 0` with `Δ·B² ≤ bound`.
    ///
    /// Every class of degree `t` satisfies `2n·D² = t² − Δ·b²`, so `D² ≥ q`
    /// is the same as `Δ·b² ≤ t² − 2n·q`; this turns a lower bound on the
    /// self-intersection along a degree line into a box for `b`.
    pub fn coefficient_bound(&self, bound: i128) -> i64 {
        if bound < 0 {
            return -1;
        }
        let q = (bound / self.disc as i128) as u128;
        isqrt(q) as i64
    }

    /// All classes of degree `t` with `D² ≥ min_square`, ordered by `b`.
    pub fn classes_on_degree_line(&self, t: i64, min_square: i64) -> Vec<DivisorClass> {
        let bound = (t as i128) * (t as i128) - 2 * self.n as i128 * min_square as i128;
        let b_max = self.coefficient_bound(bound);
        (-b_max..=b_max)
            .filter_map(|b| self.class_on_degree_line(t, b))
            .collect()
    }
}

impl fmt::Display for IntersectionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({}, {}, {})", self.n, self.d, self.g)
    }
}

pub fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: i64, d: i64, g: i64) -> IntersectionLattice {
        IntersectionLattice::new(n, d, g).unwrap()
    }

    #[test]
    fn gram_matrices() {
        assert_eq!(lat(3, 7, 4).gram(), [[6, 7], [7, 6]]);
        assert_eq!(lat(2, 3, 1).gram(), [[4, 3], [3, 0]]);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(
            IntersectionLattice::new(2, 3, 3),
            Err(LatticeError::NonPositiveDiscriminant(-7))
        );
        assert_eq!(
            IntersectionLattice::new(2, 4, 3),
            Err(LatticeError::NonPositiveDiscriminant(0))
        );
        assert_eq!(
            IntersectionLattice::new(1, 3, 0),
            Err(LatticeError::PolarizationDegree(1))
        );
        assert_eq!(
            IntersectionLattice::new(2, 0, 0),
            Err(LatticeError::CurveDegree(0))
        );
        assert_eq!(
            IntersectionLattice::new(2, 3, -1),
            Err(LatticeError::Genus(-1))
        );
    }

    #[test]
    fn pairing_examples() {
        let c = DivisorClass::C;
        let h = DivisorClass::H;
        let hc = DivisorClass::new(1, -1);
        assert_eq!(lat(2, 5, 1).intersect(&h, &c), 5);
        assert_eq!(lat(8, 8, 2).square(&hc), 2);
        assert_eq!(lat(2, 3, 1).square(&hc), -2);
        assert_eq!(lat(2, 3, 1).degree(&hc), 1);
        assert_eq!(lat(8, 8, 2).degree(&DivisorClass::new(1, -2)), 0);
        assert_eq!(lat(3, 7, 4).degree(&c), 7);
    }

    #[test]
    fn disc_pair_examples() {
        let (h, c) = (DivisorClass::H, DivisorClass::C);
        assert_eq!(lat(2, 5, 3).disc_pair(&h, &c), 9);
        assert_eq!(lat(3, 7, 4).disc_pair(&h, &c), 13);
        let x = DivisorClass::new(4, -9);
        assert_eq!(lat(3, 7, 4).disc_pair(&x, &x), 0);
    }

    #[test]
    fn degree_line_enumeration() {
        let l = lat(2, 3, 1);
        // Δ = 9; the only (-2)-class of degree 1 is H - C.
        let minus_two: Vec<_> = l
            .classes_on_degree_line(1, -2)
            .into_iter()
            .filter(|x| l.square(x) == -2)
            .collect();
        assert_eq!(minus_two, vec![DivisorClass::new(1, -1)]);
        for x in l.classes_on_degree_line(7, -10) {
            assert_eq!(l.degree(&x), 7);
            assert!(l.square(&x) >= -10);
        }
    }

    #[test]
    fn display() {
        assert_eq!(DivisorClass::new(1, -1).to_string(), "H-C");
        assert_eq!(DivisorClass::new(0, 2).to_string(), "2C");
        assert_eq!(DivisorClass::new(-2, 3).to_string(), "-2H+3C");
        assert_eq!(DivisorClass::ZERO.to_string(), "0");
    }

    #[test]
    fn isqrt_exact() {
        for x in 0u128..2000 {
            let r = isqrt(x);
            assert!(r * r <= x && (r + 1) * (r + 1) > x);
        }
        assert_eq!(isqrt(u64::MAX as u128 * 4), 2 * (u32::MAX as u128) + 1);
    }
}
