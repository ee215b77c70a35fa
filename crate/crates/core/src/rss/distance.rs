//! Minimum safe distances between two agents.

use super::params::RssParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Safe longitudinal gap when the rear agent (speed `v1`) follows the front
/// agent (speed `v2`) in the same direction. Both speeds must be non-negative.
pub fn safe_lon_distance_same_dir<T: Scalar>(v1: T, v2: T, p: &RssParams<T>) -> Result<T> {
    if !(v1 >= T::zero()) || !(v2 >= T::zero()) {
        return Err(Error::Domain(format!(
            "same-direction distance needs non-negative speeds, got v1={v1}, v2={v2}"
        )));
    }
    let rho = p.rho;
    let v1_rho = v1 + rho * p.lon_a_max_acc;
    let d = v1 * rho + T::half() * p.lon_a_max_acc * rho * rho
        + v1_rho * v1_rho / (T::two() * p.lon_a_min_brk)
        - v2 * v2 / (T::two() * p.lon_a_max_brk);
    Ok(d.pos_part())
}

/// Safe longitudinal gap when the agents drive toward each other; `v2` is the
/// (non-positive) velocity of the oncoming agent.
pub fn safe_lon_distance_opposite<T: Scalar>(v1: T, v2: T, p: &RssParams<T>) -> Result<T> {
    if !(v1 >= T::zero()) || !(v2 <= T::zero()) {
        return Err(Error::Domain(format!(
            "opposite-direction distance needs v1 >= 0 and v2 <= 0, got v1={v1}, v2={v2}"
        )));
    }
    let rho = p.rho;
    let two = T::two();
    let v1_rho = v1 + rho * p.lon_a_max_acc;
    let v2_abs = v2.abs();
    let v2_rho = v2_abs + rho * p.lon_a_max_acc;
    Ok((v1 + v1_rho) / two * rho
        + v1_rho * v1_rho / (two * p.lon_a_min_brk)
        + (v2_abs + v2_rho) / two * rho
        + v2_rho * v2_rho / (two * p.lon_a_min_brk))
}

/// Safe lateral gap between a left agent `c1` and a right agent `c2`.
/// Lateral velocities are signed positive toward the right.
pub fn safe_lat_distance<T: Scalar>(v1: T, v2: T, p: &RssParams<T>) -> T {
    let rho = p.rho;
    let two = T::two();
    let a = p.lat_a_min_brk;
    let v1_rho = v1 + rho * p.lat_a_max_acc;
    let v2_rho = v2 - rho * p.lat_a_max_acc;
    let left = (v1 + v1_rho) / two * rho + v1_rho * v1_rho / (two * a);
    let right = (v2 + v2_rho) / two * rho - v2_rho * v2_rho / (two * a);
    (left - right).pos_part()
}
