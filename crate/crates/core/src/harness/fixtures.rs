use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::parse::{parse_constant, parse_mpoly, parse_poly};
use crate::algebra::{FiniteField, RationalFunction};
use crate::curves::{
    ArtinSchreierCurve, AsTower, Curve, FiberProduct, HyperellipticOdd, PlaneQuartic, TrigonalCurve, TrigonalShape,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    Hyperelliptic,
    ArtinSchreier,
    PlaneQuartic,
    FiberProduct,
    Trigonal,
    AsTower,
}

impl FixtureKind {
    /// Curve fields an entry of this kind must carry, then the optional ones.
    fn fields(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            FixtureKind::Hyperelliptic => (&["f"], &[]),
            FixtureKind::ArtinSchreier => (&["num", "den"], &["constant"]),
            FixtureKind::PlaneQuartic => (&["equation"], &["affine"]),
            FixtureKind::FiberProduct => (&["f", "g"], &[]),
            FixtureKind::Trigonal => (&["shape", "num", "den"], &[]),
            FixtureKind::AsTower => (&["num", "den", "num2", "den2"], &[]),
        }
    }
}

/// One curve with its claims. Polynomials are written in x (x, y, z for
/// quartics, u for trigonal models) with `a` the field generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    pub id: String,
    pub table: String,
    pub p: u64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defining_poly: Option<String>,
    pub kind: FixtureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<TrigonalShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    pub genus: u32,
    pub pointless: bool,
    /// Claimed N_1, N_2, ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
    /// Claimed real Weil polynomial in factored form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_weil: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    #[serde(default)]
    pub curve: Vec<FixtureEntry>,
}

impl FixtureEntry {
    fn invalid(&self, e: impl std::fmt::Display) -> Error {
        Error::Validation { id: self.id.clone(), message: e.to_string() }
    }

    fn present(&self) -> Vec<&'static str> {
        let slots: [(&'static str, bool); 10] = [
            ("f", self.f.is_some()),
            ("g", self.g.is_some()),
            ("num", self.num.is_some()),
            ("den", self.den.is_some()),
            ("num2", self.num2.is_some()),
            ("den2", self.den2.is_some()),
            ("equation", self.equation.is_some()),
            ("affine", self.affine.is_some()),
            ("shape", self.shape.is_some()),
            ("constant", self.constant.is_some()),
        ];
        slots.iter().filter(|s| s.1).map(|s| s.0).collect()
    }

    pub fn field(&self) -> Result<FiniteField> {
        let k = match (&self.defining_poly, self.n) {
            (None, 1) => FiniteField::prime(self.p),
            (None, _) => return Err(self.invalid("extension fields need defining_poly")),
            (Some(src), n) => {
                let fp = FiniteField::prime(self.p).map_err(|e| self.invalid(e))?;
                let m = parse_poly(&fp, "a", src).map_err(|e| self.invalid(format!("defining_poly: {e}")))?;
                if m.deg() != n as isize {
                    return Err(self.invalid(format!("defining_poly has degree {}, expected {n}", m.deg())));
                }
                let coeffs: Vec<u64> = m.monic().coeffs().iter().map(|c| c.0).collect();
                FiniteField::new(self.p, n, Some(&coeffs))
            }
        };
        k.map_err(|e| self.invalid(e))
    }

    fn text<'s>(&self, v: &'s Option<String>, name: &str) -> Result<&'s str> {
        v.as_deref().ok_or_else(|| self.invalid(format!("missing {name}")))
    }

    fn poly(&self, k: &FiniteField, var: &str, v: &Option<String>, name: &str) -> Result<crate::algebra::Poly> {
        parse_poly(k, var, self.text(v, name)?).map_err(|e| self.invalid(format!("{name}: {e}")))
    }

    /// Builds the curve model, checking the entry's shape on the way.
    pub fn curve(&self) -> Result<Curve> {
        let (required, optional) = self.kind.fields();
        for name in self.present() {
            if !required.contains(&name) && !optional.contains(&name) {
                return Err(self.invalid(format!("field {name} does not apply to {:?} entries", self.kind)));
            }
        }
        let k = self.field()?;
        let wrap = |r: Result<Curve>| r.map_err(|e| self.invalid(e));
        match self.kind {
            FixtureKind::Hyperelliptic => {
                wrap(HyperellipticOdd::new(self.poly(&k, "x", &self.f, "f")?).map(Curve::Hyperelliptic))
            }
            FixtureKind::ArtinSchreier => {
                let mut r =
                    RationalFunction::new(self.poly(&k, "x", &self.num, "num")?, self.poly(&k, "x", &self.den, "den")?)
                        .map_err(|e| self.invalid(e))?;
                if let Some(c) = &self.constant {
                    r = r.add_constant(parse_constant(&k, c).map_err(|e| self.invalid(format!("constant: {e}")))?);
                }
                wrap(ArtinSchreierCurve::new(r).map(Curve::ArtinSchreier))
            }
            FixtureKind::PlaneQuartic => {
                let eq = self.text(&self.equation, "equation")?;
                let c = if self.affine == Some(true) {
                    parse_mpoly(&k, &["x", "y"], eq).and_then(|m| PlaneQuartic::from_affine(&m))
                } else {
                    parse_mpoly(&k, &["x", "y", "z"], eq).and_then(PlaneQuartic::new)
                };
                wrap(c.map(Curve::Quartic))
            }
            FixtureKind::FiberProduct => wrap(
                FiberProduct::new(self.poly(&k, "x", &self.f, "f")?, self.poly(&k, "x", &self.g, "g")?)
                    .map(Curve::FiberProduct),
            ),
            FixtureKind::Trigonal => {
                let shape = self.shape.ok_or_else(|| self.invalid("missing shape"))?;
                let r =
                    RationalFunction::new(self.poly(&k, "u", &self.num, "num")?, self.poly(&k, "u", &self.den, "den")?)
                        .map_err(|e| self.invalid(e))?;
                wrap(TrigonalCurve::new(shape, r).map(Curve::Trigonal))
            }
            FixtureKind::AsTower => {
                let first =
                    RationalFunction::new(self.poly(&k, "x", &self.num, "num")?, self.poly(&k, "x", &self.den, "den")?)
                        .and_then(ArtinSchreierCurve::new)
                        .map_err(|e| self.invalid(e))?;
                let vars = ["x", "y"];
                let num2 = parse_mpoly(&k, &vars, self.text(&self.num2, "num2")?)
                    .map_err(|e| self.invalid(format!("num2: {e}")))?;
                let den2 = parse_mpoly(&k, &vars, self.text(&self.den2, "den2")?)
                    .map_err(|e| self.invalid(format!("den2: {e}")))?;
                wrap(AsTower::new(first, num2, den2, self.genus).map(Curve::Tower))
            }
        }
    }
}

/// Parses fixture text; every entry must build a valid curve model.
pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureEntry>> {
    let file: FixtureFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_column(text, s.start)).unwrap_or((0, 0));
        Error::Parse { line, column, message: e.message().to_string() }
    })?;
    let mut ids = BTreeSet::new();
    for entry in &file.curve {
        if !ids.insert(entry.id.as_str()) {
            return Err(entry.invalid("duplicate id"));
        }
        entry.curve()?;
    }
    Ok(file.curve)
}

pub fn load_fixtures(path: impl AsRef<Path>) -> Result<Vec<FixtureEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_fixtures(&text)
}

pub fn to_toml(entries: &[FixtureEntry]) -> String {
    toml::to_string(&FixtureFile { curve: entries.to_vec() }).expect("fixtures serialize")
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "[[curve]]\nid = \"x\"\ntable = \"t\"\n";

    #[test]
    fn unknown_fields_are_rejected_with_position() {
        let text = format!("{HEADER}p = 5\nn = 1\nkind = \"hyperelliptic\"\nf = \"2x^8 + 3x^4 + 2\"\ngenus = 3\npointless = true\ncolour = 1\n");
        match parse_fixtures(&text) {
            Err(Error::Parse { line, .. }) => assert!(line >= 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reducible_defining_poly_is_a_validation_error() {
        let text = format!("{HEADER}p = 5\nn = 2\ndefining_poly = \"a^2 - 1\"\nkind = \"hyperelliptic\"\nf = \"a(x^8 + 1)\"\ngenus = 3\npointless = true\n");
        assert!(matches!(parse_fixtures(&text), Err(Error::Validation { id, .. }) if id == "x"));
    }

    #[test]
    fn field_constants_reduce_in_presentation() {
        let text = format!(
            "{HEADER}p = 2\nn = 5\ndefining_poly = \"a^5 + a^2 + 1\"\nkind = \"artin_schreier\"\nnum = \"a^30 x^3 + 1\"\nden = \"x^2 + x + 1\"\ngenus = 2\npointless = false\n"
        );
        let e = &parse_fixtures(&text).unwrap()[0];
        let k = e.field().unwrap();
        let p = parse_poly(&k, "x", e.num.as_ref().unwrap()).unwrap();
        assert_eq!(p.coeff(3), k.pow(k.generator(), 30));
        assert_eq!(k.digits(p.coeff(3)), vec![0, 1, 0, 0, 1]);
    }

    #[test]
    fn misplaced_field_is_rejected() {
        let text = format!("{HEADER}p = 5\nn = 1\nkind = \"hyperelliptic\"\nf = \"2x^8 + 3x^4 + 2\"\ng = \"x\"\ngenus = 3\npointless = true\n");
        assert!(matches!(parse_fixtures(&text), Err(Error::Validation { .. })));
    }
}
