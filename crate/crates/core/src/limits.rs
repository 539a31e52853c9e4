//! Enumeration caps.

use std::env;

/// Environment variable overriding every atom cap.
pub const MAX_ATOMS_ENV: &str = "PSIMC_MAX_ATOMS";

/// Default cap for two-valued enumeration (2^n interpretations).
pub const DEFAULT_MAX_ATOMS: usize = 20;

/// Default cap for three-valued enumeration (3^n interpretations).
pub const DEFAULT_MAX_ATOMS_THREE_VALUED: usize = 12;

/// Upper bounds on signature size for the brute-force enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_atoms_three_valued: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: DEFAULT_MAX_ATOMS,
            max_atoms_three_valued: DEFAULT_MAX_ATOMS_THREE_VALUED,
        }
    }
}

impl Limits {
    /// Same cap for both enumerations.
    pub fn uniform(max_atoms: usize) -> Self {
        Limits {
            max_atoms,
            max_atoms_three_valued: max_atoms,
        }
    }

    /// Defaults, unless `PSIMC_MAX_ATOMS` holds a number, which then caps both.
    pub fn from_env() -> Self {
        match env::var(MAX_ATOMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            Some(n) => Limits::uniform(n),
            None => Limits::default(),
        }
    }
}
