//! Dirichlet characters of odd modulus with values in a cyclotomic field.
//!
//! A character mod d is stored as a table over residues 0..d: `None` for
//! residues sharing a factor with d, otherwise an exponent k meaning ζ_M^k.
//! The modulus d = 1 is allowed and has the single value 1 (also at 0).

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::algebra::arith::{
    carmichael_odd, euler_phi, factorize, gcd, is_squarefree, jacobi, lcm, mod_pow,
    primitive_root_odd_prime_power,
};
use crate::algebra::{CyclotomicField, CyclotomicNumber};
use crate::error::{Error, Result};

const MAX_ENUMERATION_MODULUS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    values: Vec<Option<u64>>,
}

fn invalid(reason: impl Into<String>) -> Error {
    Error::InvalidCharacter {
        reason: reason.into(),
    }
}

impl DirichletCharacter {
    /// Validate a full value table (`table[a]` for residues a = 0..d).
    ///
    /// Checks the zero pattern, χ(1) = 1, exponent ranges, that every value
    /// has order dividing λ(d), and complete multiplicativity over all d²
    /// pairs of residues.
    pub fn from_table(modulus: u64, order: u64, table: Vec<Option<u64>>) -> Result<Self> {
        if modulus == 0 || modulus % 2 == 0 {
            return Err(invalid(format!("modulus {modulus} is not odd and positive")));
        }
        if order == 0 {
            return Err(invalid("value order must be positive"));
        }
        if table.len() as u64 != modulus {
            return Err(invalid(format!(
                "table covers {} residues, expected {modulus}",
                table.len()
            )));
        }
        let d = modulus;
        for (a, v) in table.iter().enumerate() {
            let unit = d == 1 || gcd(a as u64, d) == 1;
            match v {
                None if unit => return Err(invalid(format!("unit residue {a} mapped to zero"))),
                Some(_) if !unit => return Err(invalid(format!("non-unit residue {a} has a nonzero value"))),
                Some(k) if *k >= order => {
                    return Err(invalid(format!("exponent {k} at residue {a} is not below order {order}")))
                }
                _ => {}
            }
        }
        if table[(1 % d) as usize] != Some(0) {
            return Err(invalid("value at 1 must be 1"));
        }
        let lambda = carmichael_odd(d);
        for (a, v) in table.iter().enumerate() {
            if let Some(k) = v {
                let elem_order = order / gcd(*k, order);
                if lambda % elem_order != 0 {
                    return Err(invalid(format!(
                        "value at residue {a} has order {elem_order}, which does not divide λ({d}) = {lambda}"
                    )));
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                let ab = (a * b % d) as usize;
                let expected = match (table[a as usize], table[b as usize]) {
                    (Some(x), Some(y)) => Some((x + y) % order),
                    _ => None,
                };
                if table[ab] != expected {
                    return Err(invalid(format!(
                        "multiplicativity fails at (a, b) = ({a}, {b})"
                    )));
                }
            }
        }
        Ok(DirichletCharacter {
            modulus,
            order,
            values: table,
        })
    }

    /// Like [`Self::from_table`] but keyed by residue; every residue must appear.
    pub fn from_map(modulus: u64, order: u64, map: &BTreeMap<u64, Option<u64>>) -> Result<Self> {
        let table = (0..modulus)
            .map(|a| {
                map.get(&a)
                    .copied()
                    .ok_or_else(|| invalid(format!("residue {a} missing from table")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_table(modulus, order, table)
    }

    pub fn principal(modulus: u64) -> Result<Self> {
        let table = (0..modulus)
            .map(|a| (modulus == 1 || gcd(a, modulus) == 1).then_some(0))
            .collect();
        Self::from_table(modulus, 1, table)
    }

    /// The Jacobi symbol (· | d) for odd squarefree d ≥ 3.
    pub fn quadratic(modulus: u64) -> Result<Self> {
        if modulus < 3 || modulus % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "quadratic character needs an odd modulus >= 3, got {modulus}"
            )));
        }
        if !is_squarefree(modulus) {
            return Err(Error::NotSquarefree(modulus));
        }
        let table = (0..modulus)
            .map(|a| match jacobi(a as i64, modulus) {
                1 => Some(0),
                -1 => Some(1),
                _ => None,
            })
            .collect();
        Self::from_table(modulus, 2, table)
    }

    /// The zero function mod d. Not a character; it exercises linearity of
    /// the constructions in χ.
    pub fn vanishing(modulus: u64) -> Self {
        DirichletCharacter {
            modulus,
            order: 1,
            values: vec![None; modulus as usize],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// M, the order of the cyclotomic field holding the values.
    pub fn value_order(&self) -> u64 {
        self.order
    }

    pub fn table(&self) -> &[Option<u64>] {
        &self.values
    }

    /// Exponent k with χ(m) = ζ_M^k, or `None` when χ(m) = 0.
    pub fn exponent(&self, m: i64) -> Option<u64> {
        self.values[m.rem_euclid(self.modulus as i64) as usize]
    }

    /// χ(m) in Q(ζ_M).
    pub fn value(&self, m: i64) -> CyclotomicNumber {
        let field = CyclotomicField::new(self.order).expect("order is positive");
        self.value_in(&field, m).expect("M divides M")
    }

    /// χ(m) inside a larger cyclotomic field Q(ζ_L) with M | L.
    pub fn value_in(&self, field: &Arc<CyclotomicField>, m: i64) -> Result<CyclotomicNumber> {
        if field.order() % self.order != 0 {
            return Err(Error::FieldMismatch {
                left: self.order,
                right: field.order(),
            });
        }
        Ok(match self.exponent(m) {
            None => CyclotomicNumber::zero(field),
            Some(k) => {
                CyclotomicNumber::root_of_unity(field, (k * (field.order() / self.order)) as i64)
            }
        })
    }

    /// The actual order of χ as an element of the character group.
    pub fn character_order(&self) -> u64 {
        self.values
            .iter()
            .flatten()
            .map(|&k| self.order / gcd(k, self.order))
            .fold(1, lcm)
    }

    /// Same character with M reduced to its actual order.
    pub fn normalized(&self) -> Self {
        let m = self.character_order();
        DirichletCharacter {
            modulus: self.modulus,
            order: m,
            values: self
                .values
                .iter()
                .map(|v| v.map(|k| k * m / self.order))
                .collect(),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.values.iter().flatten().all(|&k| k == 0)
    }

    /// True when every value lies in {0, ±1}.
    pub fn is_rational_valued(&self) -> bool {
        self.character_order() <= 2
    }

    /// Pointwise product, normalized.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidParameter(format!(
                "cannot multiply characters mod {} and mod {}",
                self.modulus, other.modulus
            )));
        }
        let l = lcm(self.order, other.order);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some((x * (l / self.order) + y * (l / other.order)) % l),
                _ => None,
            })
            .collect();
        Ok(DirichletCharacter {
            modulus: self.modulus,
            order: l,
            values,
        }
        .normalized())
    }

    /// The complex-conjugate character.
    pub fn conjugate(&self) -> Self {
        DirichletCharacter {
            modulus: self.modulus,
            order: self.order,
            values: self
                .values
                .iter()
                .map(|v| v.map(|k| (self.order - k) % self.order))
                .collect(),
        }
    }

    pub fn to_file(&self) -> CharacterFile {
        CharacterFile {
            modulus: self.modulus,
            order: self.order,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(a, v)| (a.to_string(), *v))
                .collect(),
        }
    }
}

/// JSON layout `{"modulus": d, "order": M, "values": {"a": k | null, ...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterFile {
    pub modulus: u64,
    pub order: u64,
    pub values: BTreeMap<String, Option<u64>>,
}

impl CharacterFile {
    pub fn into_character(self) -> Result<DirichletCharacter> {
        let mut map = BTreeMap::new();
        for (key, v) in self.values {
            let a: u64 = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("residue key {key:?} is not an integer")))?;
            if a >= self.modulus {
                return Err(invalid(format!("residue {a} out of range for modulus {}", self.modulus)));
            }
            map.insert(a, v);
        }
        DirichletCharacter::from_map(self.modulus, self.order, &map)
    }
}

pub fn parse_character_json(text: &str) -> Result<DirichletCharacter> {
    let file: CharacterFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_character()
}

/// All φ(d) characters mod d, in lexicographic order of their exponent
/// tuples over the cyclic factors (Z/p^e Z)* taken in increasing p.
pub fn enumerate_characters(modulus: u64) -> Result<Vec<DirichletCharacter>> {
    if modulus == 0 || modulus % 2 == 0 || modulus > MAX_ENUMERATION_MODULUS {
        return Err(Error::InvalidParameter(format!(
            "enumeration needs an odd modulus in 1..={MAX_ENUMERATION_MODULUS}, got {modulus}"
        )));
    }
    if modulus == 1 {
        return Ok(vec![DirichletCharacter::principal(1)?]);
    }
    struct Component {
        prime_power: u64,
        group_order: u64,
        dlog: Vec<Option<u64>>,
    }
    let components: Vec<Component> = factorize(modulus)
        .into_iter()
        .map(|(p, e)| {
            let prime_power = p.pow(e);
            let group_order = euler_phi(prime_power);
            let g = primitive_root_odd_prime_power(p, e);
            let mut dlog = vec![None; prime_power as usize];
            for k in 0..group_order {
                dlog[mod_pow(g, k, prime_power) as usize] = Some(k);
            }
            Component {
                prime_power,
                group_order,
                dlog,
            }
        })
        .collect();

    components
        .iter()
        .map(|c| 0..c.group_order)
        .multi_cartesian_product()
        .map(|js| {
            // Work in Q(ζ_λ) with λ the lcm of the component orders, then normalize.
            let big = components.iter().map(|c| c.group_order).fold(1, lcm);
            let table = (0..modulus)
                .map(|a| {
                    if gcd(a, modulus) != 1 {
                        return None;
                    }
                    let exp = components.iter().zip(&js).fold(0, |acc, (c, &j)| {
                        let k = c.dlog[(a % c.prime_power) as usize].expect("unit residue");
                        (acc + j * k % c.group_order * (big / c.group_order)) % big
                    });
                    Some(exp)
                })
                .collect();
            DirichletCharacter {
                modulus,
                order: big,
                values: table,
            }
            .normalized()
        })
        .map(|chi| DirichletCharacter::from_table(chi.modulus, chi.order, chi.values))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    #[test]
    fn table_construction() {
        let chi = DirichletCharacter::from_table(3, 2, vec![None, Some(0), Some(1)]).unwrap();
        assert_eq!(chi, DirichletCharacter::quadratic(3).unwrap());
        assert!(DirichletCharacter::from_table(3, 2, vec![None, Some(0), Some(0)]).is_ok());
        let mut bad = DirichletCharacter::principal(9).unwrap().table().to_vec();
        bad[2] = None;
        assert!(matches!(
            DirichletCharacter::from_table(9, 1, bad),
            Err(Error::InvalidCharacter { .. })
        ));
        // χ(2) = i is not multiplicative mod 3 (2·2 = 1 needs χ(2)^2 = 1).
        let err = DirichletCharacter::from_table(3, 4, vec![None, Some(0), Some(1)]).unwrap_err();
        assert!(matches!(err, Error::InvalidCharacter { .. }));
    }

    #[test]
    fn multiplicativity_failure_names_the_pair() {
        // mod 5 with χ(2) = -1 but χ(4) = -1 as well breaks χ(2)^2 = χ(4).
        let err = DirichletCharacter::from_table(5, 2, vec![None, Some(0), Some(1), Some(1), Some(1)])
            .unwrap_err();
        match err {
            Error::InvalidCharacter { reason } => assert!(reason.contains("(a, b)"), "{reason}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_values() {
        let chi3 = DirichletCharacter::quadratic(3).unwrap();
        assert_eq!(chi3.value(2).as_rational(), Some(Rational::from(-1)));
        assert_eq!(chi3.value(1).as_rational(), Some(Rational::one()));
        assert_eq!(chi3.value(5).as_rational(), Some(Rational::from(-1)));
        assert!(chi3.value(6).is_zero());
        assert!(chi3.value(-3).is_zero());
        let chi15 = DirichletCharacter::quadratic(15).unwrap();
        assert_eq!(chi15.value(2).as_rational(), Some(Rational::one()));
        assert_eq!(DirichletCharacter::quadratic(9), Err(Error::NotSquarefree(9)));
    }

    #[test]
    fn enumeration_counts_and_orders() {
        for d in [1u64, 3, 5, 9, 15, 27] {
            assert_eq!(enumerate_characters(d).unwrap().len() as u64, euler_phi(d));
        }
        let orders: Vec<u64> = enumerate_characters(5)
            .unwrap()
            .iter()
            .map(DirichletCharacter::value_order)
            .collect();
        assert_eq!(orders, vec![1, 4, 2, 4]);
        let trivial = enumerate_characters(1).unwrap();
        assert_eq!(trivial[0].value(0).as_rational(), Some(Rational::one()));
        assert!(enumerate_characters(4).is_err());
    }

    #[test]
    fn orthogonality() {
        for d in [3u64, 5, 9, 15] {
            for chi in enumerate_characters(d).unwrap() {
                let field = CyclotomicField::new(chi.value_order()).unwrap();
                let sum = (0..d as i64).fold(CyclotomicNumber::zero(&field), |acc, a| {
                    &acc + &chi.value(a)
                });
                let expected = if chi.is_principal() { euler_phi(d) as i64 } else { 0 };
                assert_eq!(sum.as_rational(), Some(Rational::from(expected)));
            }
        }
    }

    #[test]
    fn closure_and_conjugation() {
        let chars = enumerate_characters(15).unwrap();
        for a in &chars {
            for b in &chars {
                assert!(chars.contains(&a.product(b).unwrap()));
            }
            let c = a.conjugate().normalized();
            assert!(a.product(&c).unwrap().is_principal());
        }
    }

    #[test]
    fn json_round_trip() {
        let chi = enumerate_characters(5).unwrap().remove(1);
        let text = serde_json::to_string(&chi.to_file()).unwrap();
        assert_eq!(parse_character_json(&text).unwrap(), chi);
        let principal = r#"{"modulus":3,"order":1,"values":{"0":null,"1":0,"2":0}}"#;
        assert!(parse_character_json(principal).unwrap().is_principal());
        let missing = r#"{"modulus":3,"order":1,"values":{"0":null,"1":0}}"#;
        assert!(parse_character_json(missing).is_err());
    }
}
