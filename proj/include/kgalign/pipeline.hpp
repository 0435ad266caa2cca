#pragma once
// End-to-end orchestration: dataset -> adjacencies -> trained embeddings ->
// batch samplers -> sparse similarity fusion -> metrics. Stage-sequential;
// every stage persists its artifacts under out_dir before the next stage
// starts, so --resume-from can reuse them. The adjacency stage is the one
// exception: it is a cheap deterministic function of the persisted KGs and is
// rebuilt on resume instead of serialized.

#include <map>
#include <string>
#include <vector>

#include "kgalign/eval.hpp"
#include "kgalign/fusion.hpp"
#include "kgalign/samplers.hpp"
#include "kgalign/synth.hpp"
#include "kgalign/train.hpp"

namespace kgalign {

// Which sampler(s) feed the local similarity fusion. Full is the default
// three-view scheme (CMCS + ISCS in both directions); the others keep a single
// view, e.g. CmcsOnly skips ISCS entirely so M_L reduces to the CMCS matrix.
enum class SamplerMode { Full, CmcsOnly, Vps, MetisCps, Iscs };

SamplerMode parse_sampler_mode(const std::string& name);  // throws on unknown
std::string sampler_mode_name(SamplerMode mode);

ClassifierKind parse_classifier_kind(const std::string& name);  // logreg | gbt

struct PipelineConfig {
  // Dataset: triple/link files, or a synthetic benchmark when all three paths
  // are empty.
  std::string triples_s, triples_t, links;
  SyntheticSpec synth;

  double train_ratio = 0.3;
  uint64_t split_seed = 0;

  // Component configs. Their rng_seed fields are ignored: the pipeline derives
  // every component seed from rng_seed below so one value pins the whole run.
  // train.n_p is clamped to the seed-pair count at run time.
  TrainConfig train;
  PartitionerConfig part;
  FusionConfig fusion;

  int num_batches = 0;  // 0 = auto by scale: 5 (<=20k entities), 10 (<=200k), 30 above
  SamplerMode sampler = SamplerMode::Full;
  std::vector<int> hits = {1, 10};

  std::string out_dir = "out";
  std::string resume_from;  // stage name; earlier stages reuse on-disk artifacts
  std::string stop_after;   // stage name; empty = run through evaluate
  uint64_t rng_seed = 0;
  bool deterministic = true;  // forces single-threaded execution
  int threads = 1;            // worker cap; current kernels are all serial
};

// Ordered stage names: load, adjacency, train, sample, assemble, fuse-local,
// topk-global, fuse-final, evaluate. resume_from / stop_after must name one.
const std::vector<std::string>& pipeline_stages();

// configured > 0 wins; otherwise picks by the larger entity count.
int resolve_num_batches(int configured, int max_side_entities);

// Runs the stages in order and returns the report: hits/MRR of M_F on the
// test split, per-stage wall seconds (every executed stage, including resumed
// ones), sampler overlaps against the full alignment, and peak RSS. When the
// evaluate stage runs, the report is also written to out_dir/report.{txt,json}.
// Any stage failure rethrows as std::runtime_error prefixed "[stage <name>]".
EvalReport run_pipeline(const PipelineConfig& cfg);

// Trains once on the configured dataset, then times vps / metis-cps / cmcs /
// iscs at every K, measuring overlap against the full alignment. Returns CSV
// text ("sampler,K,overlap,seconds" header plus 4*|k_values| rows) and writes
// it to out_dir/study.csv.
std::string run_sampler_study(const PipelineConfig& cfg, const std::vector<int>& k_values);

// Flat key=value file with [section] headers; '#' starts a comment. Returns
// "section.key" -> value. Throws on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies recognized keys to cfg; throws on unknown keys or unparsable values.
// CLI flags are applied after this, so they override file values.
void apply_config(const std::map<std::string, std::string>& kv, PipelineConfig& cfg);

// "1,10" -> {1, 10}; throws on empty lists or non-positive entries.
std::vector<int> parse_hits_list(const std::string& csv);

}  // namespace kgalign
