/// Size limits for exhaustive checks and enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest `|G|` for whole-group exhaustive checks on an extension.
    pub exhaustion: u64,
    /// Largest table order accepted by the brute-force automorphism search.
    pub brute: u64,
    /// Largest number of residue-class matrices an enumeration may visit.
    pub enumeration: u64,
    /// Random pairs used when a homomorphism check cannot be exhaustive.
    pub sample_pairs: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            exhaustion: 729,
            brute: 750,
            enumeration: crate::endomat::DEFAULT_ENUMERATION_BOUND,
            sample_pairs: 10_000,
            seed: 0x5eed,
        }
    }
}
