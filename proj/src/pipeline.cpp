#include "kgalign/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kgalign/adjacency.hpp"
#include "kgalign/rng.hpp"

namespace kgalign {
namespace {

namespace fs = std::filesystem;

constexpr uint64_t kTagTrain = 0xD1;
constexpr uint64_t kTagSample = 0xD2;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: invalid integer for '" + key + "': '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: invalid number for '" + key + "': '" + value + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: invalid seed for '" + key + "': '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::runtime_error("config: invalid boolean for '" + key + "': '" + value + "'");
}

// ---------------------------------------------------------------------------
// Id-exact KG persistence. load_kg assigns ids in first-seen triple order,
// which need not match the in-memory numbering; a vocabulary sidecar (one
// label per line, line number = id) makes the reload exact so that id-indexed
// artifacts (embeddings, batch assignments) stay meaningful across resumes.

void save_vocab(const std::vector<std::string>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("vocab: cannot open " + path + " for writing");
  for (const std::string& l : labels) out << l << '\n';
  if (!out) throw std::runtime_error("vocab: write failed for " + path);
}

std::vector<std::string> load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("vocab: cannot open " + path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) labels.push_back(line);
  if (labels.empty()) throw std::runtime_error("vocab: " + path + " is empty");
  return labels;
}

KnowledgeGraph load_kg_exact(const std::string& triples_path, const std::string& ents_path,
                             const std::string& rels_path) {
  KnowledgeGraph kg;
  kg.entity_labels = load_vocab(ents_path);
  kg.relation_labels = load_vocab(rels_path);
  for (int i = 0; i < static_cast<int>(kg.entity_labels.size()); ++i)
    kg.entity_ids[kg.entity_labels[i]] = i;
  for (int i = 0; i < static_cast<int>(kg.relation_labels.size()); ++i)
    kg.relation_ids[kg.relation_labels[i]] = i;

  std::ifstream in(triples_path);
  if (!in) throw std::runtime_error("dataset artifact: cannot open " + triples_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw std::runtime_error("dataset artifact: malformed triple line in " + triples_path);
    const std::string h = line.substr(0, t1);
    const std::string r = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string t = line.substr(t2 + 1);
    auto hi = kg.entity_ids.find(h);
    auto ri = kg.relation_ids.find(r);
    auto ti = kg.entity_ids.find(t);
    if (hi == kg.entity_ids.end() || ri == kg.relation_ids.end() || ti == kg.entity_ids.end())
      throw std::runtime_error("dataset artifact: label missing from vocabulary in " +
                               triples_path);
    kg.triples.push_back({hi->second, ri->second, ti->second});
  }
  return kg;
}

EmbeddingMatrix swap_sides(const EmbeddingMatrix& f) {
  EmbeddingMatrix out;
  out.n_source = f.n_target();
  out.f = Mat<float>(f.f.rows(), f.f.cols());
  const size_t row_bytes = sizeof(float) * static_cast<size_t>(f.f.cols());
  for (int t = 0; t < f.n_target(); ++t) std::memcpy(out.f.row(t), f.target_row(t), row_bytes);
  for (int s = 0; s < f.n_source; ++s)
    std::memcpy(out.f.row(f.n_target() + s), f.source_row(s), row_bytes);
  return out;
}

BatchAssignment swap_assignment(const BatchAssignment& a) {
  return {a.K, a.target_labels, a.source_labels};
}

// Per-mode naming: artifact file tag and the overlap key shown in reports.
struct SamplerNames {
  std::string file_tag;
  std::string report_key;
};

SamplerNames single_sampler_names(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::CmcsOnly: return {"cmcs", "cmcs"};
    case SamplerMode::Vps: return {"vps", "vps"};
    case SamplerMode::MetisCps: return {"metis_cps", "metis-cps"};
    case SamplerMode::Iscs: return {"iscs_st", "iscs-st"};
    default: throw std::logic_error("single_sampler_names: full mode has no single sampler");
  }
}

int stage_index(const std::string& name, const char* what) {
  const auto& stages = pipeline_stages();
  auto it = std::find(stages.begin(), stages.end(), name);
  if (it == stages.end()) {
    std::string all;
    for (const auto& s : stages) all += (all.empty() ? "" : ", ") + s;
    throw std::runtime_error(std::string("pipeline: unknown ") + what + " stage '" + name +
                             "' (expected one of: " + all + ")");
  }
  return static_cast<int>(it - stages.begin());
}

void validate_config(const PipelineConfig& cfg) {
  const bool any_path = !cfg.triples_s.empty() || !cfg.triples_t.empty() || !cfg.links.empty();
  const bool all_paths = !cfg.triples_s.empty() && !cfg.triples_t.empty() && !cfg.links.empty();
  if (any_path && !all_paths)
    throw std::runtime_error("pipeline: triples_s, triples_t and links must be given together");
  if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0))
    throw std::runtime_error("pipeline: train_ratio must lie in (0,1)");
  if (cfg.num_batches < 0) throw std::runtime_error("pipeline: num_batches must be >= 0");
  if (cfg.threads < 1) throw std::runtime_error("pipeline: threads must be >= 1");
  if (cfg.hits.empty()) throw std::runtime_error("pipeline: hits list must be non-empty");
  for (int n : cfg.hits)
    if (n < 1) throw std::runtime_error("pipeline: hits entries must be >= 1");
  if (cfg.out_dir.empty()) throw std::runtime_error("pipeline: out_dir must be non-empty");
}

// Shared by run_pipeline's load stage and run_sampler_study.
struct Dataset {
  KnowledgeGraph kg_s, kg_t;
  AlignmentSet all, seed, test;
};

Dataset build_dataset(const PipelineConfig& cfg) {
  Dataset d;
  if (!cfg.triples_s.empty()) {
    d.kg_s = load_kg(cfg.triples_s);
    d.kg_t = load_kg(cfg.triples_t);
    d.all = load_alignment(cfg.links, d.kg_s, d.kg_t);
  } else {
    SyntheticBenchmark b = generate_synthetic(cfg.synth);
    d.kg_s = std::move(b.kg_s);
    d.kg_t = std::move(b.kg_t);
    d.all = std::move(b.alignment);
  }
  auto [seed, test] = split_seed(d.all, cfg.train_ratio, cfg.split_seed);
  d.seed = std::move(seed);
  d.test = std::move(test);
  return d;
}

}  // namespace

SamplerMode parse_sampler_mode(const std::string& name) {
  if (name == "full") return SamplerMode::Full;
  if (name == "cmcs-only" || name == "cmcs") return SamplerMode::CmcsOnly;
  if (name == "vps") return SamplerMode::Vps;
  if (name == "metis-cps") return SamplerMode::MetisCps;
  if (name == "iscs") return SamplerMode::Iscs;
  throw std::runtime_error("sampler: unknown mode '" + name +
                           "' (expected full, cmcs-only, vps, metis-cps or iscs)");
}

std::string sampler_mode_name(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::Full: return "full";
    case SamplerMode::CmcsOnly: return "cmcs-only";
    case SamplerMode::Vps: return "vps";
    case SamplerMode::MetisCps: return "metis-cps";
    case SamplerMode::Iscs: return "iscs";
  }
  return "full";
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "logreg") return ClassifierKind::Logreg;
  if (name == "gbt") return ClassifierKind::Gbt;
  throw std::runtime_error("classifier: unknown kind '" + name + "' (expected logreg or gbt)");
}

const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> stages = {"load",       "adjacency",  "train",
                                                  "sample",     "assemble",   "fuse-local",
                                                  "topk-global", "fuse-final", "evaluate"};
  return stages;
}

int resolve_num_batches(int configured, int max_side_entities) {
  if (configured > 0) return configured;
  if (max_side_entities <= 20000) return 5;
  if (max_side_entities <= 200000) return 10;
  return 30;
}

EvalReport run_pipeline(const PipelineConfig& cfg) {
  validate_config(cfg);
  const auto& stages = pipeline_stages();
  const int resume_idx = cfg.resume_from.empty() ? 0 : stage_index(cfg.resume_from, "resume-from");
  const int stop_idx = cfg.stop_after.empty() ? static_cast<int>(stages.size()) - 1
                                              : stage_index(cfg.stop_after, "stop-after");
  if (resume_idx > stop_idx)
    throw std::runtime_error("pipeline: stop-after stage precedes resume-from stage");
  fs::create_directories(cfg.out_dir);
  auto of = [&](const std::string& name) { return path_join(cfg.out_dir, name); };

  // Mutable pipeline state threaded through the stages.
  Dataset data;
  WeightedAdjacency adj_s, adj_t;
  EmbeddingMatrix emb;
  int K = 0;
  BatchAssignment a_cmcs, a_iscs_st, a_iscs_ts, a_single;
  SparseSim m_c, m_i_st, m_i_ts, m_l, m_g, m_f;
  EvalReport report;

  PartitionerConfig pc = cfg.part;
  pc.rng_seed = derive_seed(cfg.rng_seed, kTagSample);

  auto resolve_k = [&] { K = resolve_num_batches(cfg.num_batches,
                                                 std::max(data.kg_s.num_entities(),
                                                          data.kg_t.num_entities())); };
  auto record_overlaps = [&] {
    if (cfg.sampler == SamplerMode::Full) {
      report.sampler_overlap["cmcs"] = overlap(a_cmcs, data.all);
      report.sampler_overlap["iscs-st"] = overlap(a_iscs_st, data.all);
      report.sampler_overlap["iscs-ts"] = overlap(a_iscs_ts, data.all);
    } else {
      report.sampler_overlap[single_sampler_names(cfg.sampler).report_key] =
          overlap(a_single, data.all);
    }
  };

  struct StageDef {
    const char* name;
    std::function<void()> compute;
    std::function<void()> reuse;
  };

  const std::vector<StageDef> defs = {
      {"load",
       [&] {
         data = build_dataset(cfg);
         save_kg(data.kg_s, of("rel_triples_1"));
         save_kg(data.kg_t, of("rel_triples_2"));
         save_vocab(data.kg_s.entity_labels, of("entities_1.txt"));
         save_vocab(data.kg_s.relation_labels, of("relations_1.txt"));
         save_vocab(data.kg_t.entity_labels, of("entities_2.txt"));
         save_vocab(data.kg_t.relation_labels, of("relations_2.txt"));
         save_alignment(data.all, data.kg_s, data.kg_t, of("ent_links"));
         save_alignment(data.seed, data.kg_s, data.kg_t, of("ent_links_seed"));
         save_alignment(data.test, data.kg_s, data.kg_t, of("ent_links_test"));
       },
       [&] {
         data.kg_s = load_kg_exact(of("rel_triples_1"), of("entities_1.txt"), of("relations_1.txt"));
         data.kg_t = load_kg_exact(of("rel_triples_2"), of("entities_2.txt"), of("relations_2.txt"));
         data.all = load_alignment(of("ent_links"), data.kg_s, data.kg_t);
         data.seed = load_alignment(of("ent_links_seed"), data.kg_s, data.kg_t);
         data.test = load_alignment(of("ent_links_test"), data.kg_s, data.kg_t);
         data.test.role = AlignmentRole::Test;
       }},
      {"adjacency",
       [&] {
         adj_s = build_weighted_adjacency(data.kg_s);
         adj_t = build_weighted_adjacency(data.kg_t);
       },
       [&] {
         adj_s = build_weighted_adjacency(data.kg_s);
         adj_t = build_weighted_adjacency(data.kg_t);
       }},
      {"train",
       [&] {
         TrainConfig tc = cfg.train;
         tc.rng_seed = derive_seed(cfg.rng_seed, kTagTrain);
         // Desk-scale datasets can hold fewer seed pairs than the default
         // batch size; an oversized N_p is a hard error in the trainer.
         if (data.seed.size() > 0) tc.n_p = std::min(tc.n_p, data.seed.size());
         emb = train_embeddings(adj_s, adj_t, data.seed, tc);
         save_embeddings(emb, of("embeddings.bin"));
       },
       [&] {
         emb = load_embeddings(of("embeddings.bin"));
         if (emb.n_source != data.kg_s.num_entities() ||
             emb.n_target() != data.kg_t.num_entities())
           throw std::runtime_error("embeddings artifact does not match the dataset");
       }},
      {"sample",
       [&] {
         resolve_k();
         pc.K = K;
         if (cfg.sampler == SamplerMode::Full) {
           a_cmcs = cmcs(emb, data.seed, K, pc);
           save_assignment(a_cmcs, of("batches_cmcs_s.tsv"), of("batches_cmcs_t.tsv"));
           a_iscs_st = iscs(adj_s, adj_t, emb, data.seed, K, pc, IscsDirection::SourceToTarget);
           save_assignment(a_iscs_st, of("batches_iscs_st_s.tsv"), of("batches_iscs_st_t.tsv"));
           a_iscs_ts = iscs(adj_s, adj_t, emb, data.seed, K, pc, IscsDirection::TargetToSource);
           save_assignment(a_iscs_ts, of("batches_iscs_ts_s.tsv"), of("batches_iscs_ts_t.tsv"));
         } else {
           switch (cfg.sampler) {
             case SamplerMode::CmcsOnly: a_single = cmcs(emb, data.seed, K, pc); break;
             case SamplerMode::Vps:
               a_single = vps(data.seed, data.kg_s.num_entities(), data.kg_t.num_entities(), K,
                              derive_seed(cfg.rng_seed, kTagSample));
               break;
             case SamplerMode::MetisCps: a_single = metis_cps(adj_s, adj_t, data.seed, K, pc); break;
             case SamplerMode::Iscs:
               a_single = iscs(adj_s, adj_t, emb, data.seed, K, pc, IscsDirection::SourceToTarget);
               break;
             default: break;
           }
           const SamplerNames names = single_sampler_names(cfg.sampler);
           save_assignment(a_single, of("batches_" + names.file_tag + "_s.tsv"),
                           of("batches_" + names.file_tag + "_t.tsv"));
         }
         record_overlaps();
       },
       [&] {
         resolve_k();
         pc.K = K;
         if (cfg.sampler == SamplerMode::Full) {
           a_cmcs = load_assignment(of("batches_cmcs_s.tsv"), of("batches_cmcs_t.tsv"));
           a_iscs_st = load_assignment(of("batches_iscs_st_s.tsv"), of("batches_iscs_st_t.tsv"));
           a_iscs_ts = load_assignment(of("batches_iscs_ts_s.tsv"), of("batches_iscs_ts_t.tsv"));
         } else {
           const SamplerNames names = single_sampler_names(cfg.sampler);
           a_single = load_assignment(of("batches_" + names.file_tag + "_s.tsv"),
                                      of("batches_" + names.file_tag + "_t.tsv"));
         }
         record_overlaps();
       }},
      {"assemble",
       [&] {
         if (cfg.sampler == SamplerMode::Full) {
           m_c = assemble_local(a_cmcs, emb, cfg.fusion);
           m_c.save_text(of("m_cmcs.coo"));
           m_i_st = assemble_local(a_iscs_st, emb, cfg.fusion);
           m_i_st.save_text(of("m_iscs_st.coo"));
           // The reversed view is assembled in target x source orientation;
           // fuse_local transposes it back when summing.
           m_i_ts = assemble_local(swap_assignment(a_iscs_ts), swap_sides(emb), cfg.fusion);
           m_i_ts.save_text(of("m_iscs_ts.coo"));
         } else {
           m_c = assemble_local(a_single, emb, cfg.fusion);
           m_c.save_text(of("m_" + single_sampler_names(cfg.sampler).file_tag + ".coo"));
         }
       },
       [&] {
         if (cfg.sampler == SamplerMode::Full) {
           m_c = SparseSim::load_text(of("m_cmcs.coo"));
           m_i_st = SparseSim::load_text(of("m_iscs_st.coo"));
           m_i_ts = SparseSim::load_text(of("m_iscs_ts.coo"));
         } else {
           m_c = SparseSim::load_text(of("m_" + single_sampler_names(cfg.sampler).file_tag +
                                         ".coo"));
         }
         if (m_c.rows() != data.kg_s.num_entities() || m_c.cols() != data.kg_t.num_entities())
           throw std::runtime_error("assembled matrix artifact does not match the dataset");
       }},
      {"fuse-local",
       [&] {
         m_l = cfg.sampler == SamplerMode::Full ? fuse_local(m_c, m_i_st, m_i_ts) : m_c;
         m_l.save_text(of("m_l.coo"));
       },
       [&] { m_l = SparseSim::load_text(of("m_l.coo")); }},
      {"topk-global",
       [&] {
         m_g = topk_global(emb, cfg.fusion.topk);
         m_g.save_text(of("m_g.coo"));
       },
       [&] { m_g = SparseSim::load_text(of("m_g.coo")); }},
      {"fuse-final",
       [&] {
         m_f = fuse_final(m_l, m_g, emb, cfg.fusion.csls_k);
         m_f.save_text(of("m_f.coo"));
         m_f.save_binary(of("m_f.bin"));
       },
       [&] { m_f = SparseSim::load_binary(of("m_f.bin")); }},
      {"evaluate",
       [&] {
         for (int n : cfg.hits) report.hits_at[n] = hits_at_n(m_f, data.test, n);
         report.mrr = mrr(m_f, data.test);
       },
       [&] {}},
  };

  for (int i = 0; i <= stop_idx; ++i) {
    const bool reuse = i < resume_idx;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      (reuse ? defs[i].reuse : defs[i].compute)();
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("[stage ") + defs[i].name + "] " + e.what());
    }
    report.stage_seconds.emplace_back(defs[i].name, seconds_since(t0));
  }
  report.peak_rss_mb = peak_rss_mb();
  if (stop_idx == static_cast<int>(stages.size()) - 1) {
    write_report_text(report, of("report.txt"));
    write_report_json(report, of("report.json"));
  }
  return report;
}

std::string run_sampler_study(const PipelineConfig& cfg, const std::vector<int>& k_values) {
  validate_config(cfg);
  if (k_values.empty()) throw std::runtime_error("study: K list must be non-empty");
  for (int k : k_values)
    if (k < 1) throw std::runtime_error("study: K values must be >= 1");
  fs::create_directories(cfg.out_dir);

  Dataset data;
  WeightedAdjacency adj_s, adj_t;
  EmbeddingMatrix emb;
  try {
    data = build_dataset(cfg);
    adj_s = build_weighted_adjacency(data.kg_s);
    adj_t = build_weighted_adjacency(data.kg_t);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[study load] ") + e.what());
  }
  try {
    TrainConfig tc = cfg.train;
    tc.rng_seed = derive_seed(cfg.rng_seed, kTagTrain);
    if (data.seed.size() > 0) tc.n_p = std::min(tc.n_p, data.seed.size());
    emb = train_embeddings(adj_s, adj_t, data.seed, tc);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[study train] ") + e.what());
  }

  PartitionerConfig pc = cfg.part;
  pc.rng_seed = derive_seed(cfg.rng_seed, kTagSample);
  const std::vector<std::string> samplers = {"vps", "metis-cps", "cmcs", "iscs"};
  std::ostringstream csv;
  csv << "sampler,K,overlap,seconds\n";
  for (const std::string& name : samplers) {
    for (int k : k_values) {
      pc.K = k;
      BatchAssignment a;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (name == "vps") {
          a = vps(data.seed, data.kg_s.num_entities(), data.kg_t.num_entities(), k,
                  derive_seed(cfg.rng_seed, kTagSample));
        } else if (name == "metis-cps") {
          a = metis_cps(adj_s, adj_t, data.seed, k, pc);
        } else if (name == "cmcs") {
          a = cmcs(emb, data.seed, k, pc);
        } else {
          a = iscs(adj_s, adj_t, emb, data.seed, k, pc, IscsDirection::SourceToTarget);
        }
      } catch (const std::exception& e) {
        throw std::runtime_error("[study " + name + " K=" + std::to_string(k) + "] " + e.what());
      }
      const double secs = seconds_since(t0);
      csv << name << ',' << k << ',' << overlap(a, data.all) << ',' << secs << '\n';
    }
  }
  const std::string text = csv.str();
  std::ofstream out(path_join(cfg.out_dir, "study.csv"));
  if (!out) throw std::runtime_error("study: cannot open " +
                                     path_join(cfg.out_dir, "study.csv") + " for writing");
  out << text;
  return text;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw std::runtime_error("config: malformed section header at line " +
                                 std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::runtime_error("config: empty section name at line " + std::to_string(lineno));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key=value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) throw std::runtime_error("config: duplicate key '" + full + "'");
    kv[full] = value;
  }
  return kv;
}

void apply_config(const std::map<std::string, std::string>& kv, PipelineConfig& cfg) {
  for (const auto& [key, value] : kv) {
    if (key == "data.triples_s") cfg.triples_s = value;
    else if (key == "data.triples_t") cfg.triples_t = value;
    else if (key == "data.links") cfg.links = value;
    else if (key == "data.n_entities") cfg.synth.n_entities = parse_int(key, value);
    else if (key == "data.n_relations") cfg.synth.n_relations = parse_int(key, value);
    else if (key == "data.avg_degree") cfg.synth.avg_degree = parse_double(key, value);
    else if (key == "data.edge_dropout") cfg.synth.edge_dropout = parse_double(key, value);
    else if (key == "data.relation_remap_prob")
      cfg.synth.relation_remap_prob = parse_double(key, value);
    else if (key == "data.synth_seed") cfg.synth.rng_seed = parse_u64(key, value);
    else if (key == "data.train_ratio") cfg.train_ratio = parse_double(key, value);
    else if (key == "data.split_seed") cfg.split_seed = parse_u64(key, value);
    else if (key == "train.dim") cfg.train.dim = parse_int(key, value);
    else if (key == "train.layers") cfg.train.layers = parse_int(key, value);
    else if (key == "train.fanout") cfg.train.fanout = parse_int(key, value);
    else if (key == "train.np") cfg.train.n_p = parse_int(key, value);
    else if (key == "train.nn") cfg.train.n_n = parse_int(key, value);
    else if (key == "train.gamma") cfg.train.gamma = parse_double(key, value);
    else if (key == "train.lambda") cfg.train.lambda = parse_double(key, value);
    else if (key == "train.epochs") cfg.train.epochs = parse_int(key, value);
    else if (key == "train.lr") cfg.train.lr = parse_double(key, value);
    else if (key == "sample.num_batches") cfg.num_batches = parse_int(key, value);
    else if (key == "sample.sampler") cfg.sampler = parse_sampler_mode(value);
    else if (key == "sample.classifier") cfg.part.classifier.kind = parse_classifier_kind(value);
    else if (key == "sample.kmeans_max_iter") cfg.part.kmeans_max_iter = parse_int(key, value);
    else if (key == "sample.kmeans_tol") cfg.part.kmeans_tol = parse_double(key, value);
    else if (key == "sample.gcn_classifier_epochs")
      cfg.part.gcn_classifier_epochs = parse_int(key, value);
    else if (key == "sample.gcn_classifier_lr")
      cfg.part.gcn_classifier_lr = parse_double(key, value);
    else if (key == "sample.gcn_classifier_hidden")
      cfg.part.gcn_classifier_hidden = parse_int(key, value);
    else if (key == "sample.metis_seed_weight")
      cfg.part.metis_seed_weight = parse_double(key, value);
    else if (key == "fuse.sinkhorn_iters") cfg.fusion.sinkhorn_rounds = parse_int(key, value);
    else if (key == "fuse.topk") cfg.fusion.topk = parse_int(key, value);
    else if (key == "fuse.csls_k") cfg.fusion.csls_k = parse_int(key, value);
    else if (key == "fuse.tau") cfg.fusion.tau = parse_double(key, value);
    else if (key == "eval.hits") cfg.hits = parse_hits_list(value);
    else if (key == "run.out_dir") cfg.out_dir = value;
    else if (key == "run.rng_seed") cfg.rng_seed = parse_u64(key, value);
    else if (key == "run.deterministic") cfg.deterministic = parse_bool(key, value);
    else if (key == "run.threads") cfg.threads = parse_int(key, value);
    else if (key == "run.resume_from") cfg.resume_from = value;
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

std::vector<int> parse_hits_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const int n = parse_int("hits", item);
    if (n < 1) throw std::runtime_error("hits: entries must be >= 1");
    out.push_back(n);
  }
  if (out.empty()) throw std::runtime_error("hits: list must be non-empty");
  return out;
}

}  // namespace kgalign
