//! Shallow-cell-complexity parameters per geometric family.
//!
//! A family with parameters `(c1, c, g)` has `psi(m, k) = m^c1 * g(m) * k^c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "exponent")]
pub enum GDescriptor {
    /// `g(m) = 1`.
    Constant,
    /// `g(m) = log* m`, floored at 1.
    LogStar,
    /// `g(m) = 2^(a * log* m)` for the given `a`.
    Exp2LogStar(f64),
}

impl GDescriptor {
    pub fn eval(&self, m: f64) -> f64 {
        match *self {
            GDescriptor::Constant => 1.0,
            GDescriptor::LogStar => (log_star(m) as f64).max(1.0),
            GDescriptor::Exp2LogStar(a) => (a * log_star(m) as f64).exp2(),
        }
    }
}

/// Iterated base-2 logarithm: the number of times `log2` must be applied
/// before the value drops to at most 1.
pub fn log_star(mut x: f64) -> u32 {
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub family_tag: String,
    pub c1: f64,
    pub c: f64,
    pub g: GDescriptor,
    pub source_note: String,
    /// Whether a point-set generator exists; other families load from file.
    pub has_generator: bool,
}

impl FamilyParams {
    /// Exponent of `t` in the crossing-number bound, `c / (1 + c1 + c)`.
    pub fn crossing_exponent(&self) -> f64 {
        self.c / (1.0 + self.c1 + self.c)
    }
}

const REGISTRY: &[(&str, f64, f64, GDescriptor, &str, bool)] = &[
    ("intervals", 0.0, 0.0, GDescriptor::Constant, "intervals in R: m psi(m,k) = m, so psi = 1", true),
    ("halfplanes", 0.0, 1.0, GDescriptor::Constant, "half-planes in R^2: m psi(m,k) = mk", true),
    ("homothets", 0.0, 1.0, GDescriptor::Constant, "homothets of a convex body in R^2: mk", false),
    ("disks", 0.0, 1.0, GDescriptor::Constant, "disks in R^2: mk", true),
    ("pseudodisks", 0.0, 1.0, GDescriptor::Constant, "pseudodisks in R^2: mk", false),
    ("fat-triangles", 0.0, 1.0, GDescriptor::LogStar, "alpha-fat triangles in R^2: mk log*(m/k)", false),
    (
        "gamma-fat",
        0.0,
        1.0,
        GDescriptor::Exp2LogStar(1.0),
        "locally gamma-fat semi-algebraic objects in R^2: mk 2^O(log* m)",
        false,
    ),
    ("linear-union", 0.0, 1.0, GDescriptor::Constant, "objects with linear union complexity: mk", false),
    (
        "halfspaces3",
        0.0,
        2.0,
        GDescriptor::Constant,
        "half-spaces in R^3: c = 2, from the t^(2/3) crossing bound; the tabulated mk row would give c = 1",
        true,
    ),
    ("orthants2", 0.0, 1.0, GDescriptor::Constant, "orthants in R^2: mk", true),
    ("orthants3", 0.0, 1.0, GDescriptor::Constant, "orthants in R^3: mk", true),
];

/// Looks up the registry row for a family tag. `orthants` is accepted as an
/// alias of `orthants2`.
pub fn family_params(tag: &str) -> Result<FamilyParams> {
    let tag = if tag == "orthants" { "orthants2" } else { tag };
    REGISTRY
        .iter()
        .find(|row| row.0 == tag)
        .map(|&(tag, c1, c, g, note, has_generator)| FamilyParams {
            family_tag: tag.to_string(),
            c1,
            c,
            g,
            source_note: note.to_string(),
            has_generator,
        })
        .ok_or_else(|| Error::UnknownFamily(tag.to_string()))
}

pub fn known_families() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|row| row.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_exponents() {
        assert_eq!(family_params("halfplanes").unwrap().crossing_exponent(), 0.5);
        assert!((family_params("halfspaces3").unwrap().crossing_exponent() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(family_params("orthants2").unwrap().crossing_exponent(), 0.5);
        assert_eq!(family_params("orthants3").unwrap().crossing_exponent(), 0.5);
        assert_eq!(family_params("orthants").unwrap().family_tag, "orthants2");
        assert_eq!(family_params("intervals").unwrap().crossing_exponent(), 0.0);
    }

    #[test]
    fn unknown_tag() {
        assert!(matches!(family_params("hexagons"), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn g_values() {
        assert_eq!(log_star(1.0), 0);
        assert_eq!(log_star(2.0), 1);
        assert_eq!(log_star(16.0), 3);
        assert_eq!(log_star(65536.0), 4);
        assert_eq!(GDescriptor::LogStar.eval(65536.0), 4.0);
        assert_eq!(GDescriptor::Exp2LogStar(1.0).eval(16.0), 8.0);
        assert_eq!(GDescriptor::Constant.eval(1e9), 1.0);
    }
}
