pub mod cat;
pub mod evolve;
pub mod fig1;
pub mod medium;
pub mod oracle;
pub mod sieve;
