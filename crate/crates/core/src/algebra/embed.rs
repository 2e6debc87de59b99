//! Ring embeddings F_q -> F_{q^m}.

use super::field::{Fe, FiniteField};
use super::poly::Poly;
use crate::error::Result;

/// A field embedding determined by the image of the generator.
#[derive(Clone)]
pub struct Embedding {
    source: FiniteField,
    target: FiniteField,
    /// Images of a^0, .., a^{n-1}.
    basis_images: Vec<Fe>,
    /// Full lookup for small sources.
    table: Option<Vec<Fe>>,
}

impl std::fmt::Debug for Embedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.source, self.target)
    }
}

impl Embedding {
    pub fn source(&self) -> &FiniteField {
        &self.source
    }

    pub fn target(&self) -> &FiniteField {
        &self.target
    }

    /// The image of the generator `a`.
    pub fn generator_image(&self) -> Fe {
        self.basis_images.get(1).copied().unwrap_or(Fe::ONE)
    }

    #[inline]
    pub fn apply(&self, v: Fe) -> Fe {
        if let Some(t) = &self.table {
            return t[v.0 as usize];
        }
        self.apply_slow(v)
    }

    fn apply_slow(&self, v: Fe) -> Fe {
        let t = &self.target;
        let mut acc = Fe::ZERO;
        for (d, &img) in self.source.digits(v).iter().zip(&self.basis_images) {
            if *d != 0 {
                acc = t.add(acc, t.mul(Fe(*d), img));
            }
        }
        acc
    }

    pub fn apply_poly(&self, p: &Poly) -> Poly {
        p.map(&self.target, |c| self.apply(c))
    }

    /// The identity embedding.
    pub fn identity(f: &FiniteField) -> Self {
        Self::from_generator_image(f, f, f.generator())
    }

    fn from_generator_image(source: &FiniteField, target: &FiniteField, g: Fe) -> Self {
        let mut basis_images = Vec::with_capacity(source.n());
        let mut cur = Fe::ONE;
        for _ in 0..source.n() {
            basis_images.push(cur);
            cur = target.mul(cur, g);
        }
        let mut e = Embedding { source: source.clone(), target: target.clone(), basis_images, table: None };
        if source.q() <= 1 << 16 {
            let t = source.elements().map(|v| e.apply_slow(v)).collect();
            e.table = Some(t);
        }
        e
    }

    /// Embeds `source` into an explicitly given `target` of degree divisible
    /// by the source degree, choosing the smallest root of the source modulus.
    pub fn into_field(source: &FiniteField, target: &FiniteField) -> Result<Self> {
        if source == target {
            return Ok(Self::identity(source));
        }
        assert_eq!(source.p(), target.p(), "embedding across characteristics");
        assert_eq!(target.n() % source.n(), 0, "degree does not divide");
        if source.n() == 1 {
            return Ok(Self::from_generator_image(source, target, Fe::ONE));
        }
        let m: Vec<Fe> = source.modulus().iter().map(|&c| Fe(c)).collect();
        let poly = Poly::new(target, m);
        let root = *poly.roots().first().expect("modulus splits in an extension field");
        Ok(Self::from_generator_image(source, target, root))
    }
}

/// Builds F_{q^m} with the deterministic smallest irreducible modulus over F_p,
/// together with the embedding of F_q.
pub fn embed(base: &FiniteField, m: usize) -> Result<(FiniteField, Embedding)> {
    if m == 1 {
        return Ok((base.clone(), Embedding::identity(base)));
    }
    let big = FiniteField::standard(base.p(), base.n() * m)?;
    let e = Embedding::into_field(base, &big)?;
    Ok((big, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inclusion() {
        let f5 = FiniteField::prime(5).unwrap();
        let (big, e) = embed(&f5, 2).unwrap();
        assert_eq!(big.q(), 25);
        for v in f5.elements() {
            assert_eq!(e.apply(v), v);
        }
    }

    #[test]
    fn defining_relation_preserved() {
        // a^2 - a + 2 = 0 over F_5
        let f25 = FiniteField::new(5, 2, Some(&[2, 4, 1])).unwrap();
        let (big, e) = embed(&f25, 2).unwrap();
        assert_eq!(big.q(), 625);
        let a = e.generator_image();
        let lhs = big.add(big.sub(big.mul(a, a), a), big.from_int(2));
        assert_eq!(lhs, Fe::ZERO);
    }

    #[test]
    fn f27_into_f729_has_three_roots() {
        // a^3 - a + 1 = 0
        let f27 = FiniteField::new(3, 3, Some(&[1, 2, 0, 1])).unwrap();
        let (big, e) = embed(&f27, 2).unwrap();
        let roots: Vec<Fe> = big
            .elements()
            .filter(|&v| {
                let c = big.add(big.sub(big.pow(v, 3), v), Fe::ONE);
                c.is_zero()
            })
            .collect();
        assert_eq!(roots.len(), 3);
        assert_eq!(e.generator_image(), roots[0]);
    }

    #[test]
    fn homomorphism_exhaustive_small() {
        let f9 = FiniteField::new(3, 2, Some(&[2, 2, 1])).unwrap();
        let (big, e) = embed(&f9, 3).unwrap();
        for x in f9.elements() {
            for y in f9.elements() {
                assert_eq!(e.apply(f9.add(x, y)), big.add(e.apply(x), e.apply(y)));
                assert_eq!(e.apply(f9.mul(x, y)), big.mul(e.apply(x), e.apply(y)));
            }
        }
        assert_eq!(e.apply(Fe::ONE), Fe::ONE);
    }
}
