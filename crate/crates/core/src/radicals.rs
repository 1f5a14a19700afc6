//! Exact matrix entries of the form (num/den) * sqrt(rad_num/rad_den),
//! realized to floating point at load time.

/// One exact entry; rationals use `rad_num = rad_den = 1`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Radical {
    pub num: i64,
    pub den: i64,
    pub rad_num: i64,
    pub rad_den: i64,
}

impl Radical {
    pub const fn rational(num: i64, den: i64) -> Self {
        Self {
            num,
            den,
            rad_num: 1,
            rad_den: 1,
        }
    }

    pub const fn new(num: i64, den: i64, rad_num: i64, rad_den: i64) -> Self {
        Self {
            num,
            den,
            rad_num,
            rad_den,
        }
    }

    pub fn value(&self) -> f64 {
        (self.num as f64 / self.den as f64)
            * (self.rad_num as f64 / self.rad_den as f64).sqrt()
    }
}
