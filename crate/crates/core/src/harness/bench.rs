//! Benchmark driver. Query times cover everything from pattern bytes to the
//! answer (splitting, hashing, list walks, verification).

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use super::workload::{generate_noisy_queries, sample_patterns};
use crate::bloated::{LinearIndex, SuperlinearIndex, DEFAULT_MAX_LOAD_FACTOR};
use crate::error::{invalid, Result};
use crate::hashing;
use crate::split::{self, Compression, Dictionary, QueryStats, SplitConfig, SplitIndex};
use crate::text::Corpus;

/// Columns of [`BenchReport::to_csv`]. Times are nanoseconds per query;
/// `per_char_ns` is the median divided by the pattern length.
pub const BENCH_CSV_HEADER: &str = "structure,params,pattern_len,index_bytes,build_ms,queries,repeats,\
mean_ns,p50_ns,p95_ns,per_char_ns,verifications,length_rejections,mean_lf_steps,load_factor,max_chain";

pub const DEFAULT_REPEATS: usize = 100;

#[derive(Debug, Clone)]
pub struct SplitBench {
    pub words: Vec<Vec<u8>>,
    pub ks: Vec<usize>,
    pub compress: bool,
    pub queries: usize,
}

#[derive(Debug, Clone)]
pub struct FmBench {
    pub corpus: Corpus,
    /// Superlinear `q_max` values to build.
    pub q_maxes: Vec<usize>,
    /// Linear `(alpha, q)` pairs to build.
    pub linear: Vec<(usize, usize)>,
    pub lengths: Vec<usize>,
    pub queries_per_length: usize,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub repeats: usize,
    pub warmup: bool,
    pub seed: u64,
    pub hash: String,
    pub max_load_factor: Option<f64>,
    pub split: Option<SplitBench>,
    pub fm: Option<FmBench>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            repeats: DEFAULT_REPEATS,
            warmup: true,
            seed: 1,
            hash: hashing::DEFAULT_HASH.into(),
            max_load_factor: None,
            split: None,
            fm: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub mean_ns: f64,
    pub p50_ns: f64,
    pub p95_ns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub structure: String,
    pub params: String,
    pub pattern_len: Option<usize>,
    pub index_bytes: usize,
    pub build_ms: f64,
    pub queries: usize,
    pub repeats: usize,
    pub timing: Option<Timing>,
    pub verifications: Option<usize>,
    pub length_rejections: Option<usize>,
    pub mean_lf_steps: Option<f64>,
    pub load_factor: f64,
    pub max_chain: usize,
}

impl BenchRow {
    pub fn per_char_ns(&self) -> Option<f64> {
        Some(self.timing?.p50_ns / self.pattern_len? as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fixed(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(BENCH_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let t = r.timing;
            let _ = writeln!(
                out,
                "{},{},{},{},{:.3},{},{},{},{},{},{},{},{},{},{:.4},{}",
                r.structure,
                r.params,
                opt(r.pattern_len),
                r.index_bytes,
                r.build_ms,
                r.queries,
                r.repeats,
                fixed(t.map(|t| t.mean_ns)),
                fixed(t.map(|t| t.p50_ns)),
                fixed(t.map(|t| t.p95_ns)),
                fixed(r.per_char_ns()),
                opt(r.verifications),
                opt(r.length_rejections),
                fixed(r.mean_lf_steps),
                r.load_factor,
                r.max_chain,
            );
        }
        out
    }
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Per-query time of each repetition over the whole batch.
fn time_batch(repeats: usize, warmup: bool, queries: usize, mut run: impl FnMut()) -> Option<Timing> {
    if queries == 0 || repeats == 0 {
        return None;
    }
    if warmup {
        run();
    }
    let mut per_query: Vec<f64> = (0..repeats)
        .map(|_| {
            let start = Instant::now();
            run();
            start.elapsed().as_nanos() as f64 / queries as f64
        })
        .collect();
    let mean_ns = per_query.iter().sum::<f64>() / repeats as f64;
    per_query.sort_by(f64::total_cmp);
    Some(Timing {
        mean_ns,
        p50_ns: percentile(&per_query, 0.5),
        p95_ns: percentile(&per_query, 0.95),
    })
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    let hasher = hashing::by_name(&config.hash)?;
    let mut report = BenchReport::default();

    if let Some(sb) = &config.split {
        let dict = Dictionary::new(sb.words.iter().cloned())?;
        let workload = if sb.queries > 0 && !dict.is_empty() {
            generate_noisy_queries(dict.words(), sb.queries, 3, 0.5, config.seed)?.queries
        } else {
            Vec::new()
        };
        for &k in &sb.ks {
            let split_config = SplitConfig {
                max_load_factor: config.max_load_factor.unwrap_or(split::DEFAULT_MAX_LOAD_FACTOR),
                hasher: hasher.clone(),
                compression: if sb.compress {
                    Compression::default_select()
                } else {
                    Compression::None
                },
            };
            let start = Instant::now();
            let idx = SplitIndex::build(&dict, k, &split_config)?;
            let build_ms = elapsed_ms(start);
            let queries: Vec<&Vec<u8>> = workload.iter().filter(|q| q.len() > k).collect();
            let mut counters = QueryStats::default();
            for q in &queries {
                idx.query_instrumented(q, k, &mut counters)?;
            }
            let timing = time_batch(config.repeats, config.warmup, queries.len(), || {
                for q in &queries {
                    black_box(idx.query(q, k).ok());
                }
            });
            let s = idx.stats();
            report.rows.push(BenchRow {
                structure: "split".into(),
                params: format!("k={k};compress={}", sb.compress),
                pattern_len: None,
                index_bytes: idx.index_bytes(),
                build_ms,
                queries: queries.len(),
                repeats: if timing.is_some() { config.repeats } else { 0 },
                timing,
                verifications: timing.map(|_| counters.verifications),
                length_rejections: timing.map(|_| counters.length_rejections),
                mean_lf_steps: None,
                load_factor: s.load_factor,
                max_chain: s.max_chain,
            });
        }
    }

    if let Some(fb) = &config.fm {
        let lf = config.max_load_factor.unwrap_or(DEFAULT_MAX_LOAD_FACTOR);
        let body = fb.corpus.body();
        let patterns: Vec<(usize, Vec<Vec<u8>>)> = fb
            .lengths
            .iter()
            .map(|&m| {
                let seed = config.seed.wrapping_add(m as u64);
                (m, sample_patterns(body, fb.queries_per_length, &[m], 0.0, seed))
            })
            .collect();

        for &q_max in &fb.q_maxes {
            let start = Instant::now();
            let idx = SuperlinearIndex::build(&fb.corpus, q_max, hasher.clone(), lf)?;
            let build_ms = elapsed_ms(start);
            let stats = idx.load_stats();
            let base = BenchRow {
                structure: "fm-super".into(),
                params: format!("q_max={q_max}"),
                pattern_len: None,
                index_bytes: idx.heap_bytes(),
                build_ms,
                queries: 0,
                repeats: 0,
                timing: None,
                verifications: None,
                length_rejections: None,
                mean_lf_steps: None,
                load_factor: stats.load_factor,
                max_chain: stats.max_chain,
            };
            push_fm_rows(&mut report, base, &patterns, config, |p| idx.count_instrumented(p).map(|o| o.lf_steps))?;
        }
        for &(alpha, q) in &fb.linear {
            let start = Instant::now();
            let idx = LinearIndex::build(&fb.corpus, alpha, q, hasher.clone(), lf)?;
            let build_ms = elapsed_ms(start);
            let stats = idx.load_stats();
            let base = BenchRow {
                structure: "fm-linear".into(),
                params: format!("alpha={alpha};q={q}"),
                pattern_len: None,
                index_bytes: idx.heap_bytes(),
                build_ms,
                queries: 0,
                repeats: 0,
                timing: None,
                verifications: None,
                length_rejections: None,
                mean_lf_steps: None,
                load_factor: stats.load_factor,
                max_chain: stats.max_chain,
            };
            let window = idx.window();
            let usable: Vec<(usize, Vec<Vec<u8>>)> =
                patterns.iter().filter(|(m, _)| *m >= window).cloned().collect();
            push_fm_rows(&mut report, base, &usable, config, |p| idx.count_instrumented(p).map(|o| o.lf_steps))?;
        }
    }
    Ok(report)
}

fn push_fm_rows(
    report: &mut BenchReport,
    base: BenchRow,
    patterns: &[(usize, Vec<Vec<u8>>)],
    config: &BenchConfig,
    count: impl Fn(&[u8]) -> Result<usize>,
) -> Result<()> {
    let mut any = false;
    for (m, batch) in patterns {
        if batch.is_empty() {
            continue;
        }
        any = true;
        let mut steps = 0usize;
        for p in batch {
            steps += count(p)?;
        }
        let timing = time_batch(config.repeats, config.warmup, batch.len(), || {
            for p in batch {
                black_box(count(p).ok());
            }
        });
        report.rows.push(BenchRow {
            pattern_len: Some(*m),
            queries: batch.len(),
            repeats: config.repeats,
            timing,
            mean_lf_steps: Some(steps as f64 / batch.len() as f64),
            ..base.clone()
        });
    }
    if !any {
        report.rows.push(base);
    }
    Ok(())
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.split.is_none() && self.fm.is_none() {
            return Err(invalid("nothing to benchmark"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::random_words;
    use crate::text::ENGLISH_LETTER_FREQUENCIES;

    fn split_config(queries: usize) -> BenchConfig {
        BenchConfig {
            repeats: 3,
            split: Some(SplitBench {
                words: random_words(2000, 4..=12, &ENGLISH_LETTER_FREQUENCIES, 3),
                ks: vec![1, 2, 3],
                compress: false,
                queries,
            }),
            ..BenchConfig::default()
        }
    }

    #[test]
    fn split_rows_grow_with_k() {
        let report = run_bench(&split_config(200)).unwrap();
        assert_eq!(report.rows.len(), 3);
        let sizes: Vec<usize> = report.rows.iter().map(|r| r.index_bytes).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
        let csv = report.to_csv();
        assert!(csv.starts_with(BENCH_CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn zero_queries_give_build_only_rows() {
        let report = run_bench(&split_config(0)).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.timing.is_none() && r.queries == 0));
    }

    #[test]
    fn deterministic_fields_repeat() {
        let strip = |r: &BenchReport| -> Vec<(usize, Option<usize>, Option<usize>)> {
            r.rows.iter().map(|x| (x.index_bytes, x.verifications, x.length_rejections)).collect()
        };
        let a = run_bench(&split_config(100)).unwrap();
        let b = run_bench(&split_config(100)).unwrap();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn fm_rows_per_length() {
        let text = crate::harness::english_like_text(20_000, 4);
        let config = BenchConfig {
            repeats: 3,
            fm: Some(FmBench {
                corpus: Corpus::new(text).unwrap(),
                q_maxes: vec![128],
                linear: vec![(8, 4)],
                lengths: vec![16, 31, 32, 64],
                queries_per_length: 20,
            }),
            ..BenchConfig::default()
        };
        let report = run_bench(&config).unwrap();
        assert_eq!(report.rows.len(), 8);
        let steps: Vec<f64> = report.rows[..4].iter().map(|r| r.mean_lf_steps.unwrap()).collect();
        assert_eq!(steps, [1.0, 5.0, 1.0, 1.0]);
    }
}
