//! Segment-representative trajectory dissimilarity and the top-k failure
//! archive that feeds the diversity reward.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::Trajectory;

pub type Point<T> = [T; 2];

/// Centres of mass of `n` consecutive segments of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeSeq<T> {
    points: Vec<Point<T>>,
}

impl<T: Scalar> RepresentativeSeq<T> {
    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn segment_count(&self) -> usize {
        self.points.len()
    }
}

/// Index ranges of the `n` segments of a sequence of `len` samples.
///
/// With `len >= n` the sizes differ by at most one and the leading segments
/// take the extra samples. With `len < n` each segment covers the fractional
/// index range `[i·len/n, (i+1)·len/n)` and falls back to the sample nearest
/// its midpoint when that range holds no integer index.
pub fn segment_ranges(len: usize, n: usize) -> Vec<std::ops::Range<usize>> {
    assert!(len >= 1 && n >= 1);
    if len >= n {
        let (base, extra) = (len / n, len % n);
        let mut start = 0;
        (0..n)
            .map(|i| {
                let size = base + usize::from(i < extra);
                let r = start..start + size;
                start += size;
                r
            })
            .collect()
    } else {
        (0..n)
            .map(|i| {
                let lo = i as f64 * len as f64 / n as f64;
                let hi = (i + 1) as f64 * len as f64 / n as f64;
                let first = lo.ceil() as usize;
                let idx = if (first as f64) < hi {
                    first
                } else {
                    (((lo + hi) / 2.0).round() as usize).min(len - 1)
                };
                idx..idx + 1
            })
            .collect()
    }
}

pub fn normalize<T: Scalar>(path: &[Point<T>], n: usize) -> Result<RepresentativeSeq<T>> {
    if n == 0 {
        return Err(Error::Domain("segment count must be >= 1".into()));
    }
    if path.is_empty() {
        return Err(Error::Domain("cannot normalize an empty path".into()));
    }
    let points = segment_ranges(path.len(), n)
        .into_iter()
        .map(|r| {
            let count = T::lit(r.len() as f64);
            let (sx, sy) = path[r]
                .iter()
                .fold((T::zero(), T::zero()), |(sx, sy), p| (sx + p[0], sy + p[1]));
            [sx / count, sy / count]
        })
        .collect();
    Ok(RepresentativeSeq { points })
}

/// Mean distance between matching representatives. Both sequences must have
/// been built with the same segment count.
pub fn representative_distance<T: Scalar>(a: &RepresentativeSeq<T>, b: &RepresentativeSeq<T>) -> T {
    debug_assert_eq!(a.points.len(), b.points.len());
    let n = T::lit(a.points.len() as f64);
    a.points
        .iter()
        .zip(&b.points)
        .fold(T::zero(), |acc, (p, q)| acc + (p[0] - q[0]).hypot(p[1] - q[1]))
        / n
}

pub fn dissimilarity<T: Scalar>(a: &[Point<T>], b: &[Point<T>], n: usize) -> Result<T> {
    Ok(representative_distance(&normalize(a, n)?, &normalize(b, n)?))
}

/// Which agents' paths enter the dissimilarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DissimSource {
    /// Path of the lead car (the vehicle under test).
    #[default]
    LeadCar,
    /// Representatives of every agent, concatenated.
    AllAgents,
}

impl std::str::FromStr for DissimSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lead" | "lead_car" => Ok(Self::LeadCar),
            "all" | "all_agents" => Ok(Self::AllAgents),
            other => Err(format!("unknown dissimilarity source `{other}`")),
        }
    }
}

/// Representative sequence of a trajectory as seen by the diversity metric.
pub fn trajectory_signature<T: Scalar>(
    traj: &Trajectory<T>,
    n: usize,
    source: DissimSource,
) -> Result<RepresentativeSeq<T>> {
    match source {
        DissimSource::LeadCar => normalize(&traj.path(0), n),
        DissimSource::AllAgents => {
            let mut points = Vec::with_capacity(n * traj.agents().len());
            for a in 0..traj.agents().len() {
                points.extend(normalize(&traj.path(a), n)?.points);
            }
            Ok(RepresentativeSeq { points })
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArchiveEntry<T> {
    pub trajectory: Trajectory<T>,
    pub signature: RepresentativeSeq<T>,
    /// Insertion counter, used to break reward ties in favour of older entries.
    pub order: u64,
}

impl<T: Scalar> ArchiveEntry<T> {
    pub fn total_reward(&self) -> T {
        self.trajectory.total_reward()
    }
}

/// Failure trajectories kept in descending order of total reward, at most
/// `capacity` of them.
#[derive(Debug, Clone)]
pub struct FailureArchive<T> {
    capacity: usize,
    entries: Vec<ArchiveEntry<T>>,
    inserted: u64,
}

impl<T: Scalar> FailureArchive<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "archive capacity must be >= 1");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity + 1),
            inserted: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry<T>] {
        &self.entries
    }

    pub fn into_trajectories(self) -> Vec<Trajectory<T>> {
        self.entries.into_iter().map(|e| e.trajectory).collect()
    }

    /// Would a trajectory with this total reward be kept?
    pub fn admits(&self, total_reward: T) -> bool {
        self.entries.len() < self.capacity
            || self.entries.last().is_some_and(|e| total_reward > e.total_reward())
    }

    /// Inserts a failure trajectory. Returns whether it was kept.
    pub fn insert(&mut self, trajectory: Trajectory<T>, signature: RepresentativeSeq<T>) -> Result<bool> {
        if !trajectory.is_failure() {
            return Err(Error::Precondition(
                "only failure trajectories can enter the archive".into(),
            ));
        }
        let reward = trajectory.total_reward();
        let order = self.inserted;
        self.inserted += 1;
        // after every entry with reward >= the new one: equal rewards keep insertion order
        let pos = self.entries.partition_point(|e| e.total_reward() >= reward);
        if pos >= self.capacity {
            return Ok(false);
        }
        self.entries.insert(
            pos,
            ArchiveEntry {
                trajectory,
                signature,
                order,
            },
        );
        self.entries.truncate(self.capacity);
        Ok(true)
    }

    /// Mean dissimilarity of `signature` to the top `min(k, len)` entries; zero
    /// for an empty archive.
    pub fn mean_dissimilarity(&self, signature: &RepresentativeSeq<T>, k: usize) -> T {
        let mu = k.min(self.entries.len());
        if mu == 0 {
            return T::zero();
        }
        let sum = self.entries[..mu]
            .iter()
            .fold(T::zero(), |acc, e| acc + representative_distance(signature, &e.signature));
        sum / T::lit(mu as f64)
    }
}

/// Convenience wrapper over [`FailureArchive::mean_dissimilarity`] that
/// builds the signature of `traj` first.
pub fn mean_dissimilarity<T: Scalar>(
    traj: &Trajectory<T>,
    archive: &FailureArchive<T>,
    n: usize,
    k: usize,
    source: DissimSource,
) -> Result<T> {
    let sig = trajectory_signature(traj, n, source)?;
    Ok(archive.mean_dissimilarity(&sig, k))
}
