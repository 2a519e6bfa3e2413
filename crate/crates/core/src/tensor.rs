use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Symmetric 2×2 tensor stored as its three independent components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { xx: 0.0, yy: 0.0, xy: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, yy: 1.0, xy: 0.0 };

    pub const fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Sym2 { xx, yy, xy }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Full contraction `A : B`; the off-diagonal entry counts twice.
    pub fn ddot(&self, other: &Sym2) -> f64 {
        self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.yy.is_finite() && self.xy.is_finite()
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.xx + rhs.xx, self.yy + rhs.yy, self.xy + rhs.xy)
    }
}

impl AddAssign for Sym2 {
    fn add_assign(&mut self, rhs: Sym2) {
        *self = *self + rhs;
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.xx - rhs.xx, self.yy - rhs.yy, self.xy - rhs.xy)
    }
}

impl Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.xx, -self.yy, -self.xy)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.xx * s, self.yy * s, self.xy * s)
    }
}

impl Mul<Sym2> for f64 {
    type Output = Sym2;
    fn mul(self, e: Sym2) -> Sym2 {
        e * self
    }
}
