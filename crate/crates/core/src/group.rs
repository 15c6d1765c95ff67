//! Finite abelian groups `Z_{n_1} x ... x Z_{n_m}` with counting measure and
//! their characters.
//!
//! Elements are enumerated in lexicographic mixed-radix order (last
//! coordinate fastest), so the rank of an element is its mixed-radix value.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `|G|` accepted by [`GroupSpec::new`].
pub const MAX_GROUP_SIZE: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GroupSpec {
    orders: Vec<usize>,
    size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    coords: Vec<usize>,
}

impl GroupSpec {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup("at least one cyclic factor is required".into()));
        }
        if let Some(pos) = orders.iter().position(|&n| n == 0) {
            return Err(Error::InvalidGroup(format!("factor {pos} has order 0")));
        }
        let size = orders
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&p| p <= MAX_GROUP_SIZE))
            .ok_or_else(|| {
                Error::InvalidGroup(format!("group order exceeds the cap of {MAX_GROUP_SIZE}"))
            })?;
        Ok(Self { orders, size })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Builds an element, reducing every coordinate modulo its factor order.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.orders.len() {
            return Err(Error::DimensionMismatch {
                expected: self.orders.len(),
                actual: coords.len(),
            });
        }
        let coords = coords
            .iter()
            .zip(&self.orders)
            .map(|(&c, &n)| c.rem_euclid(n as i64) as usize)
            .collect();
        Ok(GroupElement { coords })
    }

    /// All elements in the stable lexicographic order.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.size).map(|k| self.element_at(k)).collect()
    }

    /// Inverse of [`GroupSpec::index`].
    pub fn element_at(&self, index: usize) -> GroupElement {
        assert!(index < self.size, "element index {index} out of range");
        let mut coords = vec![0; self.orders.len()];
        let mut rest = index;
        for (c, &n) in coords.iter_mut().zip(&self.orders).rev() {
            *c = rest % n;
            rest /= n;
        }
        GroupElement { coords }
    }

    /// Mixed-radix rank of `x`.
    pub fn index(&self, x: &GroupElement) -> usize {
        x.coords.iter().zip(&self.orders).fold(0, |acc, (&c, &n)| acc * n + c)
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .zip(&self.orders)
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect();
        GroupElement { coords }
    }

    /// `chi_k(x) = exp(2 pi i sum_j k_j x_j / n_j)`.
    ///
    /// The phase is reduced exactly over the lcm of the orders; quarter turns
    /// return exact values.
    pub fn character(&self, dual_index: &GroupElement, x: &GroupElement) -> Complex64 {
        let period = self.orders.iter().fold(1usize, |l, &n| lcm(l, n));
        let turns = dual_index
            .coords
            .iter()
            .zip(&x.coords)
            .zip(&self.orders)
            .fold(0usize, |acc, ((&k, &c), &n)| (acc + (k * c % n) * (period / n)) % period);
        root_of_unity(turns, period)
    }

    /// Character table indexed `[k][x]` by element rank.
    pub fn character_table(&self) -> Vec<Vec<Complex64>> {
        let elements = self.elements();
        elements
            .iter()
            .map(|k| elements.iter().map(|x| self.character(k, x)).collect())
            .collect()
    }

    /// The scalar orthonormal basis `e_k = chi_k / sqrt(|G|)` of `L^2(G)`,
    /// indexed `[k][x]`.
    pub fn scalar_onb(&self) -> Vec<Vec<Complex64>> {
        let norm = 1.0 / (self.size as f64).sqrt();
        self.character_table()
            .into_iter()
            .map(|row| row.into_iter().map(|z| z * norm).collect())
            .collect()
    }
}

impl TryFrom<Vec<usize>> for GroupSpec {
    type Error = Error;

    fn try_from(orders: Vec<usize>) -> Result<Self> {
        Self::new(orders)
    }
}

impl From<GroupSpec> for Vec<usize> {
    fn from(spec: GroupSpec) -> Self {
        spec.orders
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|n| format!("Z_{n}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl GroupElement {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn root_of_unity(turns: usize, period: usize) -> Complex64 {
    if (4 * turns).is_multiple_of(period) {
        return match 4 * turns / period {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * turns as f64 / period as f64)
}
