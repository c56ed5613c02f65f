//! Resource limits for the potentially explosive operations.
//!
//! The decision procedures are computable but exponential in the worst case;
//! every operation that can blow up takes a [`Limits`] and aborts with
//! [`crate::Error::ResourceLimit`] instead of exhausting memory.

/// Configurable resource limits.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Maximum total letters across the images of an endomorphism.
    pub max_endo_letters: usize,
    /// Maximum length of a single word produced while iterating.
    pub max_word_letters: usize,
    /// Node budget for bounded fixed-point enumeration.
    pub max_enum_nodes: u64,
    /// Hard cap on the coset count accepted by quotient enumeration.
    pub max_quotient_degree: usize,
    /// Above this value the eventually-periodic exponent switches from k!
    /// to lcm{1..k}.
    pub factorial_threshold: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_endo_letters: 1_000_000,
            max_word_letters: 1_000_000,
            max_enum_nodes: 50_000_000,
            max_quotient_degree: 6,
            factorial_threshold: 10_000,
        }
    }
}

/// Default length bound for the bounded fixed-point oracle.
pub const DEFAULT_FIX_BOUND: u32 = 12;
