use crate::config::KvFile;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, GRAVITY};

/// Response time and acceleration bounds used by every RSS rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RssParams<T> {
    /// Response time ρ (s).
    pub rho: T,
    pub lat_a_max_acc: T,
    pub lat_a_min_brk: T,
    pub lon_a_max_acc: T,
    pub lon_a_min_brk: T,
    pub lon_a_max_brk: T,
    /// Centre-to-centre separation at which two agents are in contact; gaps
    /// are measured from this margin on both axes (m).
    pub margin: T,
}

impl<T: Scalar> Default for RssParams<T> {
    /// ρ = 0; lateral 0.1g / 0.05g; longitudinal 0.1g / 0.7g / 0.7g.
    fn default() -> Self {
        let g = |k: f64| T::lit(k * GRAVITY);
        Self {
            rho: T::zero(),
            lat_a_max_acc: g(0.1),
            lat_a_min_brk: g(0.05),
            lon_a_max_acc: g(0.1),
            lon_a_min_brk: g(0.7),
            lon_a_max_brk: g(0.7),
            margin: T::half(),
        }
    }
}

impl<T: Scalar> RssParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho >= T::zero()) || !self.rho.is_finite() {
            return Err(Error::config("rss.rho", "must be finite and >= 0"));
        }
        for (name, v) in [
            ("rss.lat_a_max_acc", self.lat_a_max_acc),
            ("rss.lat_a_min_brk", self.lat_a_min_brk),
            ("rss.lon_a_max_acc", self.lon_a_max_acc),
            ("rss.lon_a_min_brk", self.lon_a_min_brk),
            ("rss.lon_a_max_brk", self.lon_a_max_brk),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::config(name, "must be finite and > 0"));
            }
        }
        if !(self.margin >= T::zero()) || !self.margin.is_finite() {
            return Err(Error::config("rss.margin", "must be finite and >= 0"));
        }
        if self.lon_a_min_brk > self.lon_a_max_brk {
            return Err(Error::config(
                "rss.lon_a_min_brk",
                "must not exceed rss.lon_a_max_brk",
            ));
        }
        Ok(())
    }

    /// Reads `rss.<name>` keys; a bare `<name>` is accepted too so that a
    /// standalone parameter file does not need the prefix.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut p = Self::default();
        let read = |name: &str, slot: &mut T| -> Result<()> {
            let prefixed = format!("rss.{name}");
            let v = match kv.get::<f64>(&prefixed)? {
                Some(v) => Some(v),
                None => kv.get::<f64>(name)?,
            };
            if let Some(v) = v {
                *slot = T::lit(v);
            }
            Ok(())
        };
        read("rho", &mut p.rho)?;
        read("lat_a_max_acc", &mut p.lat_a_max_acc)?;
        read("lat_a_min_brk", &mut p.lat_a_min_brk)?;
        read("lon_a_max_acc", &mut p.lon_a_max_acc)?;
        read("lon_a_min_brk", &mut p.lon_a_min_brk)?;
        read("lon_a_max_brk", &mut p.lon_a_max_brk)?;
        read("margin", &mut p.margin)?;
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_in_units_of_g() {
        let p = RssParams::<f64>::default();
        assert_eq!(p.rho, 0.0);
        assert!((p.lon_a_min_brk - 6.86).abs() < 1e-12);
        assert!((p.lat_a_min_brk - 0.49).abs() < 1e-12);
        assert!((p.lat_a_max_acc - 0.98).abs() < 1e-12);
        p.validate().unwrap();
    }

    #[test]
    fn min_brake_above_max_brake_rejected() {
        let p = RssParams::<f64> {
            lon_a_min_brk: 8.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn reads_prefixed_and_bare_keys() {
        let kv = KvFile::parse("rss.rho = 0.2\nlon_a_max_brk = 9\n", "p").unwrap();
        let p = RssParams::<f64>::from_kv(&kv).unwrap();
        assert_eq!(p.rho, 0.2);
        assert_eq!(p.lon_a_max_brk, 9.0);
    }
}
