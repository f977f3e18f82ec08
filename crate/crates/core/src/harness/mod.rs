//! Brute-force oracles, dataset loading, workload generation and the
//! benchmark driver.
//!
//! Oracles deliberately share no code with the structures they check.

mod avgcmp;
mod bench;
mod dataset;
mod oracle;
mod synth;
mod workload;

pub use avgcmp::{
    avg_comparison_experiment, avg_comparison_weighted, DEFAULT_LENGTH as DEFAULT_COMPARISON_LENGTH, expected_comparisons, expected_comparisons_weighted,
};
pub use bench::{run_bench, BenchConfig, BenchReport, BenchRow, FmBench, SplitBench, BENCH_CSV_HEADER};
pub use dataset::{load_corpus, load_dictionary, load_misspellings, load_queries, parse_dictionary, parse_queries};
pub use oracle::{naive_count, naive_hamming_search, naive_hamming_search_by_index};
pub use synth::{dna_text, english_like_text, random_words, weighted_text};
pub use workload::{generate_noisy_queries, sample_patterns, Provenance, QueryWorkload};
