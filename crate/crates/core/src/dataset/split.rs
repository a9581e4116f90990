use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Default edge length of a geographic stratification cell, in degrees.
pub const DEFAULT_CELL_DEGREES: f64 = 5.0;

/// A lat/lon grid cell used as the geographic half of a stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeoCell {
    pub row: i32,
    pub col: i32,
}

impl GeoCell {
    pub fn from_lat_lon(lat: f64, lon: f64, cell_degrees: f64) -> Self {
        Self {
            row: (lat / cell_degrees).floor() as i32,
            col: (lon / cell_degrees).floor() as i32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub cell: GeoCell,
    pub risk_bin: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub id: String,
    pub cell: GeoCell,
    pub risk_bin: u8,
}

impl Candidate {
    pub fn stratum(&self) -> Stratum {
        Stratum {
            cell: self.cell,
            risk_bin: self.risk_bin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    /// Requested sample counts for train, val and test.
    pub target_counts: [usize; 3],
    pub seed: u64,
}

/// Per-stratum, per-split allocation by largest remainder.
///
/// Each split's global count is distributed over strata in proportion to
/// stratum size. Fractional leftovers go to the strata with the largest
/// remainders (ties to the lower stratum index), skipping strata whose
/// capacity is already used up by earlier splits.
fn allocate(sizes: &[usize], targets: [usize; 3]) -> Vec<[usize; 3]> {
    let total: usize = sizes.iter().sum();
    let mut alloc = vec![[0usize; 3]; sizes.len()];
    let mut capacity = sizes.to_vec();
    for (k, &target) in targets.iter().enumerate() {
        let mut remainders = Vec::with_capacity(sizes.len());
        let mut assigned = 0;
        for (s, &n) in sizes.iter().enumerate() {
            // Exact integer arithmetic for quota = target * n / total.
            let num = target as u128 * n as u128;
            let floor = ((num / total as u128) as usize).min(capacity[s]);
            alloc[s][k] = floor;
            capacity[s] -= floor;
            assigned += floor;
            remainders.push(num - floor as u128 * total as u128);
        }
        let mut leftover = target - assigned;
        while leftover > 0 {
            let best = (0..sizes.len())
                .filter(|&s| capacity[s] > 0)
                .max_by(|&a, &b| remainders[a].cmp(&remainders[b]).then(b.cmp(&a)))
                .expect("total capacity covers every target");
            alloc[best][k] += 1;
            capacity[best] -= 1;
            remainders[best] = remainders[best].saturating_sub(total as u128);
            leftover -= 1;
        }
    }
    alloc
}

/// Assigns candidates to train/val/test with proportional per-stratum
/// allocation and a seeded shuffle inside each stratum.
///
/// Candidates not needed to meet the targets are left out of the result.
/// The assignment depends only on the candidate set and the seed, not on the
/// order of `candidates`.
pub fn stratified_split(
    candidates: &[Candidate],
    spec: &SplitSpec,
) -> Result<BTreeMap<String, Split>, DatasetError> {
    if candidates.is_empty() {
        return Err(DatasetError::NoCandidates);
    }
    let mut seen = HashSet::with_capacity(candidates.len());
    for c in candidates {
        if !seen.insert(c.id.as_str()) {
            return Err(DatasetError::DuplicateCandidate(c.id.clone()));
        }
    }
    let requested: usize = spec.target_counts.iter().sum();
    if requested > candidates.len() {
        return Err(DatasetError::InsufficientCandidates {
            requested,
            available: candidates.len(),
        });
    }

    let mut strata: BTreeMap<Stratum, Vec<&str>> = BTreeMap::new();
    for c in candidates {
        strata.entry(c.stratum()).or_default().push(c.id.as_str());
    }
    let sizes: Vec<usize> = strata.values().map(Vec::len).collect();
    let alloc = allocate(&sizes, spec.target_counts);

    let mut out = BTreeMap::new();
    for (index, (members, counts)) in strata.into_values().zip(alloc).enumerate() {
        let mut members = members;
        members.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(index as u64);
        members.shuffle(&mut rng);
        let mut it = members.into_iter();
        for (split, count) in Split::ALL.into_iter().zip(counts) {
            for id in it.by_ref().take(count) {
                out.insert(id.to_owned(), split);
            }
        }
    }
    Ok(out)
}
