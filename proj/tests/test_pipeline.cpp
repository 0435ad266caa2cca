#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgalign/pipeline.hpp"

using namespace kgalign;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const std::string dir = "/tmp/kgalign_pipe_" + name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(static_cast<bool>(in), "missing file: " << path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small synthetic run tuned for speed: tiny model, few epochs.
PipelineConfig small_cfg(const std::string& dir, uint64_t seed = 7) {
  PipelineConfig cfg;
  cfg.synth.n_entities = 150;
  cfg.synth.n_relations = 5;
  cfg.synth.edge_dropout = 0.05;
  cfg.synth.relation_remap_prob = 0.05;
  cfg.synth.rng_seed = seed;
  cfg.train.dim = 16;
  cfg.train.epochs = 3;
  cfg.train.fanout = 4;
  cfg.train.n_p = 500;
  cfg.train.n_n = 500;
  cfg.part.gcn_classifier_epochs = 40;
  cfg.part.gcn_classifier_hidden = 32;
  cfg.fusion.topk = 10;
  cfg.rng_seed = seed;
  cfg.split_seed = seed;
  cfg.out_dir = dir;
  return cfg;
}

void check_stage_names(const EvalReport& r) {
  const auto& stages = pipeline_stages();
  REQUIRE(r.stage_seconds.size() == stages.size());
  for (size_t i = 0; i < stages.size(); ++i) {
    CHECK(r.stage_seconds[i].first == stages[i]);
    CHECK(r.stage_seconds[i].second >= 0.0);
  }
}

}  // namespace

TEST_CASE("num_batches resolution by dataset scale") {
  CHECK(resolve_num_batches(0, 150) == 5);
  CHECK(resolve_num_batches(0, 20000) == 5);
  CHECK(resolve_num_batches(0, 20001) == 10);
  CHECK(resolve_num_batches(0, 200000) == 10);
  CHECK(resolve_num_batches(0, 200001) == 30);
  CHECK(resolve_num_batches(7, 1000000) == 7);
}

TEST_CASE("sampler mode and classifier kind parsing") {
  CHECK(parse_sampler_mode("full") == SamplerMode::Full);
  CHECK(parse_sampler_mode("cmcs-only") == SamplerMode::CmcsOnly);
  CHECK(parse_sampler_mode("cmcs") == SamplerMode::CmcsOnly);
  CHECK(parse_sampler_mode("vps") == SamplerMode::Vps);
  CHECK(parse_sampler_mode("metis-cps") == SamplerMode::MetisCps);
  CHECK(parse_sampler_mode("iscs") == SamplerMode::Iscs);
  CHECK(sampler_mode_name(SamplerMode::MetisCps) == "metis-cps");
  CHECK_THROWS_WITH_AS(parse_sampler_mode("bogus"), doctest::Contains("unknown mode"),
                       std::runtime_error);
  CHECK(parse_classifier_kind("logreg") == ClassifierKind::Logreg);
  CHECK(parse_classifier_kind("gbt") == ClassifierKind::Gbt);
  CHECK_THROWS_WITH_AS(parse_classifier_kind("svm"), doctest::Contains("unknown kind"),
                       std::runtime_error);
}

TEST_CASE("config file parsing") {
  const std::string path = "/tmp/kgalign_pipe_config.ini";
  {
    std::ofstream out(path);
    out << "# top comment\n"
        << "[data]\n"
        << "n_entities = 500   # inline comment\n"
        << "train_ratio = 0.25\n"
        << "\n"
        << "[train]\n"
        << "dim=64\n"
        << "lr = 0.01\n"
        << "[sample]\n"
        << "sampler = metis-cps\n"
        << "classifier = gbt\n"
        << "[eval]\n"
        << "hits = 1, 5,10\n"
        << "[run]\n"
        << "deterministic = true\n"
        << "out_dir = /tmp/x\n";
  }
  auto kv = parse_config_file(path);
  CHECK(kv.at("data.n_entities") == "500");
  CHECK(kv.at("train.dim") == "64");
  CHECK(kv.at("run.out_dir") == "/tmp/x");

  PipelineConfig cfg;
  apply_config(kv, cfg);
  CHECK(cfg.synth.n_entities == 500);
  CHECK(cfg.train_ratio == doctest::Approx(0.25));
  CHECK(cfg.train.dim == 64);
  CHECK(cfg.train.lr == doctest::Approx(0.01));
  CHECK(cfg.sampler == SamplerMode::MetisCps);
  CHECK(cfg.part.classifier.kind == ClassifierKind::Gbt);
  CHECK(cfg.hits == std::vector<int>{1, 5, 10});
  CHECK(cfg.deterministic);
  CHECK(cfg.out_dir == "/tmp/x");
  fs::remove(path);
}

TEST_CASE("config file rejects malformed input") {
  const std::string path = "/tmp/kgalign_pipe_badcfg.ini";
  auto write_and_parse = [&](const std::string& body) {
    std::ofstream(path) << body;
    return parse_config_file(path);
  };
  CHECK_THROWS_WITH_AS(write_and_parse("[data\nx = 1\n"), doctest::Contains("section header"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(write_and_parse("just a line\n"), doctest::Contains("key=value"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(write_and_parse("= 3\n"), doctest::Contains("empty key"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(write_and_parse("[a]\nx = 1\nx = 2\n"), doctest::Contains("duplicate"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_config_file("/tmp/kgalign_no_such_config.ini"), std::runtime_error);

  PipelineConfig cfg;
  CHECK_THROWS_WITH_AS(apply_config({{"data.bogus", "1"}}, cfg), doctest::Contains("unknown key"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config({{"train.dim", "abc"}}, cfg),
                       doctest::Contains("invalid integer"), std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config({{"fuse.tau", "0.05x"}}, cfg),
                       doctest::Contains("invalid number"), std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config({{"run.deterministic", "yes"}}, cfg),
                       doctest::Contains("invalid boolean"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_hits_list(""), doctest::Contains("non-empty"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_hits_list("1,0"), doctest::Contains(">= 1"), std::runtime_error);
  fs::remove(path);
}

TEST_CASE("pipeline config validation") {
  PipelineConfig cfg = small_cfg(fresh_dir("validate"));
  cfg.triples_s = "only_one.tsv";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("given together"),
                       std::runtime_error);
  cfg = small_cfg(fresh_dir("validate"));
  cfg.train_ratio = 1.0;
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("train_ratio"), std::runtime_error);
  cfg = small_cfg(fresh_dir("validate"));
  cfg.hits = {};
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("hits"), std::runtime_error);
  cfg = small_cfg(fresh_dir("validate"));
  cfg.resume_from = "warp";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("unknown resume-from"),
                       std::runtime_error);
  cfg = small_cfg(fresh_dir("validate"));
  cfg.resume_from = "evaluate";
  cfg.stop_after = "train";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("precedes"), std::runtime_error);
}

TEST_CASE("stage failures carry the stage name") {
  PipelineConfig cfg = small_cfg(fresh_dir("stagefail"));
  cfg.synth.n_entities = 5;  // generator rejects this
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[stage load]"), std::runtime_error);
}

TEST_CASE("twin-KG run with default model settings reaches hits@1 >= 0.9") {
  PipelineConfig cfg;  // full model defaults: dim 128, 2 layers, 40 epochs
  cfg.synth.n_entities = 400;
  cfg.synth.n_relations = 10;
  cfg.synth.edge_dropout = 0.0;
  cfg.synth.relation_remap_prob = 0.0;
  cfg.synth.rng_seed = 1;
  cfg.rng_seed = 1;
  cfg.out_dir = fresh_dir("twin");

  EvalReport r = run_pipeline(cfg);
  check_stage_names(r);
  CHECK(r.hits_at.at(1) >= 0.9);
  CHECK(r.hits_at.at(10) >= r.hits_at.at(1));
  CHECK(r.mrr >= r.hits_at.at(1));
  REQUIRE(r.sampler_overlap.count("cmcs") == 1);
  REQUIRE(r.sampler_overlap.count("iscs-st") == 1);
  REQUIRE(r.sampler_overlap.count("iscs-ts") == 1);
  for (const auto& [name, ov] : r.sampler_overlap) {
    CHECK(ov >= 0.0);
    CHECK(ov <= 1.0);
  }
  // Every stage's artifacts are on disk.
  for (const char* f :
       {"rel_triples_1", "rel_triples_2", "ent_links", "ent_links_seed", "ent_links_test",
        "embeddings.bin", "batches_cmcs_s.tsv", "batches_iscs_st_s.tsv", "batches_iscs_ts_t.tsv",
        "m_cmcs.coo", "m_iscs_st.coo", "m_iscs_ts.coo", "m_l.coo", "m_g.coo", "m_f.coo", "m_f.bin",
        "report.txt", "report.json"})
    CHECK_MESSAGE(fs::exists(fs::path(cfg.out_dir) / f), "missing artifact: " << f);
  // Round-trip of the persisted report preserves the metrics.
  EvalReport persisted = read_report_json((fs::path(cfg.out_dir) / "report.json").string());
  CHECK(persisted.hits_at.at(1) == doctest::Approx(r.hits_at.at(1)).epsilon(1e-12));
  CHECK(persisted.mrr == doctest::Approx(r.mrr).epsilon(1e-12));
}

TEST_CASE("identical config and seed give identical metrics and bitwise-identical M_F") {
  PipelineConfig a = small_cfg(fresh_dir("det_a"), 21);
  PipelineConfig b = small_cfg(fresh_dir("det_b"), 21);
  EvalReport ra = run_pipeline(a);
  EvalReport rb = run_pipeline(b);
  CHECK(ra.hits_at == rb.hits_at);
  CHECK(ra.mrr == rb.mrr);
  CHECK(ra.sampler_overlap == rb.sampler_overlap);
  CHECK(slurp(a.out_dir + "/m_f.bin") == slurp(b.out_dir + "/m_f.bin"));
  CHECK(slurp(a.out_dir + "/m_f.coo") == slurp(b.out_dir + "/m_f.coo"));
}

TEST_CASE("cmcs-only ablation skips ISCS and sets M_L = M_C") {
  PipelineConfig cfg = small_cfg(fresh_dir("ablate"), 3);
  cfg.sampler = SamplerMode::CmcsOnly;
  EvalReport r = run_pipeline(cfg);
  check_stage_names(r);
  CHECK(r.sampler_overlap.size() == 1);
  CHECK(r.sampler_overlap.count("cmcs") == 1);
  CHECK(slurp(cfg.out_dir + "/m_l.coo") == slurp(cfg.out_dir + "/m_cmcs.coo"));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "m_iscs_st.coo"));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "batches_iscs_st_s.tsv"));
}

TEST_CASE("single-sampler ablations run end to end") {
  for (SamplerMode mode : {SamplerMode::Vps, SamplerMode::MetisCps, SamplerMode::Iscs}) {
    PipelineConfig cfg = small_cfg(fresh_dir("ablate_" + sampler_mode_name(mode)), 3);
    cfg.sampler = mode;
    EvalReport r = run_pipeline(cfg);
    check_stage_names(r);
    CHECK(r.sampler_overlap.size() == 1);
    CHECK(r.hits_at.count(1) == 1);
  }
}

TEST_CASE("resume reuses artifacts and reproduces the run") {
  PipelineConfig cfg = small_cfg(fresh_dir("resume"), 11);
  EvalReport full = run_pipeline(cfg);
  const std::string mf = slurp(cfg.out_dir + "/m_f.bin");

  PipelineConfig again = cfg;
  again.resume_from = "sample";  // reuse dataset + embeddings, recompute the rest
  EvalReport resumed = run_pipeline(again);
  check_stage_names(resumed);
  CHECK(resumed.hits_at == full.hits_at);
  CHECK(resumed.mrr == full.mrr);
  CHECK(resumed.sampler_overlap == full.sampler_overlap);
  CHECK(slurp(cfg.out_dir + "/m_f.bin") == mf);

  again.resume_from = "evaluate";  // reuse everything, re-evaluate only
  EvalReport evaled = run_pipeline(again);
  CHECK(evaled.hits_at == full.hits_at);
  CHECK(evaled.mrr == full.mrr);
  CHECK(evaled.sampler_overlap == full.sampler_overlap);
}

TEST_CASE("resume without artifacts fails in the stage that loads them") {
  PipelineConfig cfg = small_cfg(fresh_dir("resume_missing"), 11);
  cfg.resume_from = "train";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[stage load]"), std::runtime_error);
}

TEST_CASE("stop_after runs a prefix; a later resume completes the pipeline") {
  PipelineConfig cfg = small_cfg(fresh_dir("stoppart"), 5);
  cfg.stop_after = "train";
  EvalReport partial = run_pipeline(cfg);
  REQUIRE(partial.stage_seconds.size() == 3);
  CHECK(partial.hits_at.empty());
  CHECK(fs::exists(fs::path(cfg.out_dir) / "embeddings.bin"));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "m_f.bin"));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "report.json"));

  PipelineConfig rest = cfg;
  rest.stop_after.clear();
  rest.resume_from = "sample";
  EvalReport done = run_pipeline(rest);
  check_stage_names(done);
  CHECK(done.hits_at.count(1) == 1);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "report.json"));

  // The composed run matches a straight-through run of the same config.
  PipelineConfig oneshot = small_cfg(fresh_dir("stoppart_ref"), 5);
  EvalReport ref = run_pipeline(oneshot);
  CHECK(done.hits_at == ref.hits_at);
  CHECK(done.mrr == ref.mrr);
  CHECK(slurp(cfg.out_dir + "/m_f.bin") == slurp(oneshot.out_dir + "/m_f.bin"));
}

TEST_CASE("sampler study emits one CSV row per sampler per K") {
  PipelineConfig cfg = small_cfg(fresh_dir("study"), 13);
  const std::string csv = run_sampler_study(cfg, {2, 3});
  CHECK(slurp(cfg.out_dir + "/study.csv") == csv);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "sampler,K,overlap,seconds");
  int rows = 0;
  std::map<std::string, int> per_sampler;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string name, k_str, ov_str, sec_str;
    REQUIRE(std::getline(ls, name, ','));
    REQUIRE(std::getline(ls, k_str, ','));
    REQUIRE(std::getline(ls, ov_str, ','));
    REQUIRE(std::getline(ls, sec_str, ','));
    per_sampler[name]++;
    const int k = std::stoi(k_str);
    CHECK((k == 2 || k == 3));
    const double ov = std::stod(ov_str);
    CHECK(ov >= 0.0);
    CHECK(ov <= 1.0);
    CHECK(std::stod(sec_str) >= 0.0);
  }
  CHECK(rows == 8);
  CHECK(per_sampler == std::map<std::string, int>{
                           {"cmcs", 2}, {"iscs", 2}, {"metis-cps", 2}, {"vps", 2}});
  CHECK_THROWS_WITH_AS(run_sampler_study(cfg, {}), doctest::Contains("non-empty"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(run_sampler_study(cfg, {0}), doctest::Contains(">= 1"),
                       std::runtime_error);
}
