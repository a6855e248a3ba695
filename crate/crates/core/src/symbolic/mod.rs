//! Words, approximate squares, the refinement tree and antichains.

pub mod antichain;
pub mod entropy;
pub mod shells;
pub mod tree;
pub mod word;

pub use antichain::{
    antichain_entropy_ratio, antichain_exponent, build_antichain, check_incomparable, check_membership, words_exponent,
    write_antichain_csv, Antichain, AntichainKind, AntichainStats, BuildOptions, Exponent,
};
pub use entropy::{digit_entropy, entropy_ik, mean_exponent_sk0, row_entropy};
pub use shells::{shell_counts, ShellCounts, ShellRow};
pub use tree::{level_size, level_words, DEFAULT_NODE_BUDGET};
pub use word::{children, parent_flat, square_geometry, SquareGeometry, Word};
