//! Characteristic numbers of 4-manifolds under fiber sum, blow-up and
//! connected sum, and the (m, n) type of a simply connected manifold with
//! odd intersection form.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharNumError {
    #[error("e + sigma = {0} is not divisible by 4")]
    ChiHolomorphic(i64),
    #[error("(e, sigma) = ({0}, {1}) is not of type m CP2 # n CP2-bar")]
    NotStandardType(i64, i64),
    #[error("genus must be nonnegative, got {0}")]
    NegativeGenus(i64),
}

/// Euler characteristic and signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CharNumbers {
    pub e: i64,
    pub sigma: i64,
}

impl CharNumbers {
    pub const fn new(e: i64, sigma: i64) -> Self {
        CharNumbers { e, sigma }
    }

    /// The 4-torus and any product with a circle factor (such as the
    /// zero-surgery on the trefoil times a circle) have e = sigma = 0.
    pub const TORUS4: CharNumbers = CharNumbers::new(0, 0);
    pub const MK_S1: CharNumbers = CharNumbers::new(0, 0);
    pub const S4: CharNumbers = CharNumbers::new(2, 0);
    pub const CP2: CharNumbers = CharNumbers::new(3, 1);
    pub const CP2_BAR: CharNumbers = CharNumbers::new(3, -1);
}

pub fn c1_sq(c: CharNumbers) -> i64 {
    2 * c.e + 3 * c.sigma
}

pub fn chi_h(c: CharNumbers) -> Result<i64, CharNumError> {
    let s = c.e + c.sigma;
    if s % 4 != 0 {
        return Err(CharNumError::ChiHolomorphic(s));
    }
    Ok(s / 4)
}

/// Fiber sum along surfaces of the given genus: the Euler characteristics
/// add less twice that of the surface, signatures add.
pub fn fiber_sum(a: CharNumbers, b: CharNumbers, genus: i64) -> Result<CharNumbers, CharNumError> {
    if genus < 0 {
        return Err(CharNumError::NegativeGenus(genus));
    }
    Ok(CharNumbers::new(
        a.e + b.e - 2 * (2 - 2 * genus),
        a.sigma + b.sigma,
    ))
}

/// `k`-fold blow-up, one CP2-bar summand each.
pub fn blow_up(c: CharNumbers, k: u32) -> CharNumbers {
    CharNumbers::new(c.e + i64::from(k), c.sigma - i64::from(k))
}

pub fn connected_sum(a: CharNumbers, b: CharNumbers) -> CharNumbers {
    CharNumbers::new(a.e + b.e - 2, a.sigma + b.sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HomeoType {
    pub m: i64,
    pub n: i64,
}

impl HomeoType {
    /// (e, sigma) of m CP2 # n CP2-bar.
    pub fn char_numbers(self) -> CharNumbers {
        CharNumbers::new(2 + self.m + self.n, self.m - self.n)
    }
}

/// Arithmetic inverse of `(m, n) -> (2 + m + n, m - n)`. The caller asserts
/// the manifold is simply connected with odd intersection form.
pub fn freedman_type(c: CharNumbers) -> Result<HomeoType, CharNumError> {
    let p = c.e + c.sigma - 2;
    let q = c.e - c.sigma - 2;
    if p < 0 || q < 0 || p % 2 != 0 || q % 2 != 0 {
        return Err(CharNumError::NotStandardType(c.e, c.sigma));
    }
    Ok(HomeoType { m: p / 2, n: q / 2 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharRow {
    pub name: String,
    pub e: i64,
    pub sigma: i64,
    pub c1_sq: i64,
    pub chi_h: Option<i64>,
}

impl CharRow {
    fn of(name: &str, c: CharNumbers) -> Self {
        CharRow {
            name: name.to_string(),
            e: c.e,
            sigma: c.sigma,
            c1_sq: c1_sq(c),
            chi_h: chi_h(c).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharCheck {
    pub quantity: String,
    pub expected: i64,
    pub actual: Option<i64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharTable {
    pub rows: Vec<CharRow>,
    pub checks: Vec<CharCheck>,
    pub types: Vec<(String, Option<HomeoType>)>,
}

impl CharTable {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CharCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Builds every manifold of the construction from its pieces and checks the
/// stated values.
pub fn reproduce_paper_table() -> CharTable {
    let mk = CharNumbers::MK_S1;
    let y_k = fiber_sum(mk, mk, 1).expect("genus 1");
    let x_k = fiber_sum(y_k, y_k, 2).expect("genus 2");
    let y = blow_up(CharNumbers::TORUS4, 2);
    let q = blow_up(mk, 2);
    let x = fiber_sum(x_k, y, 2).expect("genus 2");
    let u = fiber_sum(y_k, q, 2).expect("genus 2");

    let rows = vec![
        CharRow::of("Y_K", y_k),
        CharRow::of("X_K", x_k),
        CharRow::of("Y", y),
        CharRow::of("Q", q),
        CharRow::of("X", x),
        CharRow::of("U", u),
    ];

    let mut checks = Vec::new();
    let mut check = |quantity: &str, expected: i64, actual: Option<i64>| {
        checks.push(CharCheck {
            quantity: quantity.to_string(),
            expected,
            actual,
            passed: actual == Some(expected),
        });
    };
    check("e(X)", 10, Some(x.e));
    check("sigma(X)", -2, Some(x.sigma));
    check("c1^2(X)", 14, Some(c1_sq(x)));
    check("chi_h(X)", 2, chi_h(x).ok());
    check("e(U)", 6, Some(u.e));
    check("sigma(U)", -2, Some(u.sigma));
    check("c1^2(U)", 6, Some(c1_sq(u)));
    check("chi_h(U)", 1, chi_h(u).ok());
    check("e(X_K)", 4, Some(x_k.e));
    check("sigma(X_K)", 0, Some(x_k.sigma));
    check("c1^2(X_K)", 8, Some(c1_sq(x_k)));
    check("chi_h(X_K)", 1, chi_h(x_k).ok());
    check("e(Y_K)", 0, Some(y_k.e));
    check("sigma(Y_K)", 0, Some(y_k.sigma));
    check("c1^2(Y_K)", 0, Some(c1_sq(y_k)));
    check("chi_h(Y_K)", 0, chi_h(y_k).ok());
    check("e(Y)", 2, Some(y.e));
    check("sigma(Y)", -2, Some(y.sigma));
    check("c1^2(Y)", -2, Some(c1_sq(y)));
    check("chi_h(Y)", 0, chi_h(y).ok());
    check("e(Q)", 2, Some(q.e));
    check("sigma(Q)", -2, Some(q.sigma));
    check("c1^2(Q)", -2, Some(c1_sq(q)));
    check("chi_h(Q)", 0, chi_h(q).ok());

    let tx = freedman_type(x).ok();
    let tu = freedman_type(u).ok();
    check("m(X)", 3, tx.map(|t| t.m));
    check("n(X)", 5, tx.map(|t| t.n));
    check("m(U)", 1, tu.map(|t| t.m));
    check("n(U)", 3, tu.map(|t| t.n));
    // c1^2 of m CP2 # n CP2-bar is 5m - n + 4.
    check("5m-n+4 (X)", c1_sq(x), tx.map(|t| 5 * t.m - t.n + 4));
    check("5m-n+4 (U)", c1_sq(u), tu.map(|t| 5 * t.m - t.n + 4));

    CharTable {
        rows,
        checks,
        types: vec![("X".into(), tx), ("U".into(), tu)],
    }
}
