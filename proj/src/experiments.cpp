#include "rstlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "rstlab/depconv.hpp"
#include "rstlab/errors.hpp"
#include "rstlab/parser.hpp"
#include "rstlab/rs3.hpp"
#include "rstlab/strutil.hpp"
#include "rstlab/treeops.hpp"

namespace rstlab {

namespace fs = std::filesystem;

Regime regime_from(const std::string& name) {
  if (name == "plain") return Regime::plain;
  if (name == "concat") return Regime::concat;
  if (name == "tagger-label") return Regime::tagger_label;
  if (name == "sr-label") return Regime::sr_label;
  if (name == "sr-graph") return Regime::sr_graph;
  if (name == "warm-start") return Regime::warm_start;
  throw Error(Errc::bad_manifest, "unknown regime \"" + name + "\"");
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::plain: return "plain";
    case Regime::concat: return "concat";
    case Regime::tagger_label: return "tagger-label";
    case Regime::sr_label: return "sr-label";
    case Regime::sr_graph: return "sr-graph";
    case Regime::warm_start: return "warm-start";
  }
  return "?";
}

bool regime_needs_base(Regime r) {
  return r == Regime::sr_label || r == Regime::sr_graph || r == Regime::warm_start;
}

namespace {

void check_no_duplicates(const std::vector<DocRef>& refs, const std::string& role) {
  std::set<DocRef> seen;
  for (const auto& r : refs)
    if (!seen.insert(r).second)
      throw Error(Errc::duplicate_doc_id, r.corpus + ":" + r.doc_id + " appears twice in " + role);
}

void check_disjoint(const std::vector<DocRef>& a, const std::string& role_a,
                    const std::vector<DocRef>& b, const std::string& role_b) {
  std::set<DocRef> sa(a.begin(), a.end());
  for (const auto& r : b)
    if (sa.count(r))
      throw Error(Errc::bad_manifest,
                  r.corpus + ":" + r.doc_id + " is in both " + role_a + " and " + role_b);
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.name.empty()) throw Error(Errc::bad_manifest, "experiment has no name");
  if (config.runs < 1) throw Error(Errc::bad_manifest, "runs must be positive");
  if (static_cast<int>(config.seeds.size()) != config.runs)
    throw Error(Errc::bad_manifest, "seed count does not match runs");
  if (config.max_epochs < 1) throw Error(Errc::bad_manifest, "max_epochs must be positive");
  if (config.train.empty()) throw Error(Errc::empty_train_set, config.name);
  if (regime_needs_base(config.regime) && config.base_train.empty())
    throw Error(Errc::bad_manifest,
                std::string(regime_name(config.regime)) + " regime needs base_train documents");

  check_no_duplicates(config.train, "train");
  check_no_duplicates(config.dev, "dev");
  check_no_duplicates(config.base_train, "base_train");
  check_no_duplicates(config.base_dev, "base_dev");
  check_disjoint(config.train, "train", config.dev, "dev");
  check_disjoint(config.base_train, "base_train", config.base_dev, "base_dev");

  std::set<std::string> target_names;
  for (const auto& t : config.tests) {
    if (t.name.empty()) throw Error(Errc::bad_manifest, "test target has no name");
    if (!target_names.insert(t.name).second)
      throw Error(Errc::bad_manifest, "duplicate test target \"" + t.name + "\"");
    if (t.docs.empty())
      throw Error(Errc::bad_manifest, "test target \"" + t.name + "\" has no documents");
    check_no_duplicates(t.docs, "test target \"" + t.name + "\"");
  }

  if (config.self_test) return;
  std::set<DocRef> sources;
  sources.insert(config.train.begin(), config.train.end());
  sources.insert(config.dev.begin(), config.dev.end());
  sources.insert(config.base_train.begin(), config.base_train.end());
  sources.insert(config.base_dev.begin(), config.base_dev.end());
  for (const auto& t : config.tests)
    for (const auto& r : t.docs)
      if (sources.count(r))
        throw Error(Errc::leakage_detected,
                    r.corpus + ":" + r.doc_id + " is both a training source and a test document");
}

namespace {

int parse_int(const std::string& s, const std::string& what) {
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw Error(Errc::bad_manifest, "bad " + what + " \"" + s + "\"");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw Error(Errc::bad_manifest, "bad " + what + " \"" + s + "\"");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "on" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "off" || s == "0" || s == "no") return false;
  throw Error(Errc::bad_manifest, "bad boolean \"" + s + "\"");
}

DocRef parse_ref(const std::string& token) {
  auto colon = token.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
    throw Error(Errc::bad_manifest, "document reference \"" + token + "\" is not corpus:doc_id");
  return {token.substr(0, colon), token.substr(colon + 1)};
}

void append_refs(std::vector<DocRef>& out, const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) out.push_back(parse_ref(t));
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  bool runs_set = false, seeds_set = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);

    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::bad_manifest, where + ": expected key = value");
    auto lhs = split_ws(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    auto values = split_ws(value);
    if (lhs.empty() || lhs.size() > 2)
      throw Error(Errc::bad_manifest, where + ": bad key \"" + trim(line.substr(0, eq)) + "\"");
    const std::string& key = lhs[0];
    const std::string qualifier = lhs.size() == 2 ? lhs[1] : "";

    auto plain_key = [&] {
      if (!qualifier.empty())
        throw Error(Errc::bad_manifest, where + ": key \"" + key + "\" takes no qualifier");
    };

    if (key == "name") {
      plain_key();
      cfg.name = value;
    } else if (key == "regime") {
      plain_key();
      cfg.regime = regime_from(value);
    } else if (key == "runs") {
      plain_key();
      cfg.runs = parse_int(value, "runs");
      runs_set = true;
    } else if (key == "seeds") {
      plain_key();
      cfg.seeds.clear();
      for (const auto& v : values) cfg.seeds.push_back(parse_u64(v, "seed"));
      seeds_set = true;
    } else if (key == "max_epochs") {
      plain_key();
      cfg.max_epochs = parse_int(value, "max_epochs");
    } else if (key == "patience") {
      plain_key();
      cfg.patience = parse_int(value, "patience");
    } else if (key == "organizational") {
      plain_key();
      cfg.organizational = parse_bool(value);
    } else if (key == "self_test") {
      plain_key();
      cfg.self_test = parse_bool(value);
    } else if (key == "out_dir") {
      plain_key();
      cfg.out_dir = value;
    } else if (key == "baseline") {
      plain_key();
      cfg.baseline = value;
    } else if (key == "corpus") {
      if (qualifier.empty()) throw Error(Errc::bad_manifest, where + ": corpus needs a key");
      if (values.size() != 2)
        throw Error(Errc::bad_manifest, where + ": corpus wants \"<root> <manifest>\"");
      cfg.corpora[qualifier] = {values[0], values[1]};
    } else if (key == "collapse") {
      if (qualifier.empty()) throw Error(Errc::bad_manifest, where + ": collapse needs a key");
      cfg.collapse[qualifier] = collapse_from(value);
    } else if (key == "train") {
      plain_key();
      append_refs(cfg.train, values);
    } else if (key == "dev") {
      plain_key();
      append_refs(cfg.dev, values);
    } else if (key == "base_train") {
      plain_key();
      append_refs(cfg.base_train, values);
    } else if (key == "base_dev") {
      plain_key();
      append_refs(cfg.base_dev, values);
    } else if (key == "test") {
      if (qualifier.empty()) throw Error(Errc::bad_manifest, where + ": test needs a target name");
      auto it = std::find_if(cfg.tests.begin(), cfg.tests.end(),
                             [&](const TestTarget& t) { return t.name == qualifier; });
      if (it == cfg.tests.end()) {
        cfg.tests.push_back({qualifier, {}});
        it = cfg.tests.end() - 1;
      }
      append_refs(it->docs, values);
    } else {
      throw Error(Errc::bad_manifest, where + ": unknown key \"" + key + "\"");
    }
  }

  if (runs_set && !seeds_set) {
    cfg.seeds.clear();
    for (int i = 1; i <= cfg.runs; ++i) cfg.seeds.push_back(i);
  } else if (seeds_set && !runs_set) {
    cfg.runs = static_cast<int>(cfg.seeds.size());
  }
  return cfg;
}

namespace {

void emit_refs(std::ostringstream& out, const std::string& key, const std::vector<DocRef>& refs) {
  for (std::size_t i = 0; i < refs.size(); i += 8) {
    out << key << " =";
    for (std::size_t j = i; j < refs.size() && j < i + 8; ++j)
      out << ' ' << refs[j].corpus << ':' << refs[j].doc_id;
    out << '\n';
  }
}

}  // namespace

std::string write_experiment_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "name = " << config.name << '\n';
  out << "regime = " << regime_name(config.regime) << '\n';
  out << "runs = " << config.runs << '\n';
  out << "seeds =";
  for (auto s : config.seeds) out << ' ' << s;
  out << '\n';
  out << "max_epochs = " << config.max_epochs << '\n';
  out << "patience = " << config.patience << '\n';
  out << "organizational = " << (config.organizational ? "true" : "false") << '\n';
  if (config.self_test) out << "self_test = true\n";
  if (!config.out_dir.empty()) out << "out_dir = " << config.out_dir << '\n';
  if (!config.baseline.empty()) out << "baseline = " << config.baseline << '\n';
  for (const auto& [key, paths] : config.corpora)
    out << "corpus " << key << " = " << paths.root << ' ' << paths.manifest << '\n';
  for (const auto& [key, mode] : config.collapse)
    out << "collapse " << key << " = " << collapse_name(mode) << '\n';
  emit_refs(out, "train", config.train);
  emit_refs(out, "dev", config.dev);
  emit_refs(out, "base_train", config.base_train);
  emit_refs(out, "base_dev", config.base_dev);
  for (const auto& t : config.tests) emit_refs(out, "test " + t.name, t.docs);
  return out.str();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_file(path));
}

std::vector<int> stratified_dev_indices(const std::vector<std::pair<int, std::string>>& docs) {
  if (docs.size() < 2) return {};
  std::vector<int> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (docs[a].first != docs[b].first) return docs[a].first < docs[b].first;
    if (docs[a].second != docs[b].second) return docs[a].second < docs[b].second;
    return a < b;
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < order.size(); i += 10) out.push_back(order[i]);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<TargetMean> fold_means(const std::vector<std::string>& targets,
                                   const std::vector<RunScore>& per_run, int runs) {
  std::vector<TargetMean> out;
  out.reserve(targets.size());
  for (const auto& t : targets) {
    ScoreTriple sum;
    for (const auto& row : per_run) {
      if (row.target != t) continue;
      sum.s += row.triple.s;
      sum.n += row.triple.n;
      sum.r += row.triple.r;
    }
    out.push_back({t, {sum.s / runs, sum.n / runs, sum.r / runs}});
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::vector<TargetMean> recompute_means(const ScoreReport& report) {
  return fold_means(report.targets, report.per_run, report.runs);
}

std::string report_csv(const ScoreReport& report) {
  std::ostringstream out;
  out << "name,run,seed,target,s,n,r\n";
  for (const auto& row : report.per_run)
    out << report.name << ',' << row.run + 1 << ',' << row.seed << ',' << row.target << ','
        << fmt(row.triple.s) << ',' << fmt(row.triple.n) << ',' << fmt(row.triple.r) << '\n';
  for (const auto& m : report.means)
    out << report.name << ",mean,," << m.target << ',' << fmt(m.mean.s) << ',' << fmt(m.mean.n)
        << ',' << fmt(m.mean.r) << '\n';
  return out.str();
}

std::vector<DegradationRow> degradation(const ScoreReport& baseline, const ScoreReport& report) {
  std::vector<DegradationRow> out;
  for (const auto& m : report.means) {
    auto it = std::find_if(baseline.means.begin(), baseline.means.end(),
                           [&](const TargetMean& b) { return b.target == m.target; });
    if (it == baseline.means.end()) continue;
    DegradationRow row;
    row.target = m.target;
    row.baseline = it->mean;
    row.score = m.mean;
    row.delta = {it->mean.s - m.mean.s, it->mean.n - m.mean.n, it->mean.r - m.mean.r};
    out.push_back(std::move(row));
  }
  return out;
}

std::string degradation_csv(const std::vector<DegradationRow>& rows) {
  std::ostringstream out;
  out << "target,baseline_s,baseline_n,baseline_r,s,n,r,delta_s,delta_n,delta_r\n";
  for (const auto& r : rows)
    out << r.target << ',' << fmt(r.baseline.s) << ',' << fmt(r.baseline.n) << ','
        << fmt(r.baseline.r) << ',' << fmt(r.score.s) << ',' << fmt(r.score.n) << ','
        << fmt(r.score.r) << ',' << fmt(r.delta.s) << ',' << fmt(r.delta.n) << ','
        << fmt(r.delta.r) << '\n';
  return out.str();
}

namespace {

struct PreparedTarget {
  std::string name;
  std::vector<const BinaryTree*> docs;
};

}  // namespace

ScoreReport run_experiment(const ExperimentConfig& config, const CorpusRegistry& registry,
                           const RunOptions& opts) {
  validate_config(config);

  bool collapsing = false;
  for (const auto& [key, mode] : config.collapse)
    if (mode != Collapse::none) collapsing = true;
  MappingTable local_table;
  const MappingTable* table = opts.mapping;
  if (collapsing && !table) {
    local_table = MappingTable::builtin();
    table = &local_table;
  }

  std::map<DocRef, BinaryTree> cache;
  auto prepare = [&](const DocRef& ref) -> const BinaryTree* {
    auto it = cache.find(ref);
    if (it != cache.end()) return &it->second;
    auto cit = registry.find(ref.corpus);
    if (cit == registry.end() || cit->second == nullptr)
      throw Error(Errc::missing_document, "corpus \"" + ref.corpus + "\" is not registered");
    const ConstituentTree* tree = cit->second->find(ref.doc_id);
    if (tree == nullptr) throw Error(Errc::missing_document, ref.corpus + ":" + ref.doc_id);
    Collapse mode = Collapse::none;
    if (auto mit = config.collapse.find(ref.corpus); mit != config.collapse.end())
      mode = mit->second;
    BinaryTree b = mode == Collapse::none ? binarize(*tree)
                                          : binarize(collapse_tree(*tree, *table, mode));
    return &cache.emplace(ref, std::move(b)).first->second;
  };

  std::vector<const BinaryTree*> train_set, dev_set, base_train_set, base_dev_set;
  for (const auto& r : config.train) train_set.push_back(prepare(r));
  for (const auto& r : config.dev) dev_set.push_back(prepare(r));
  for (const auto& r : config.base_train) base_train_set.push_back(prepare(r));
  for (const auto& r : config.base_dev) base_dev_set.push_back(prepare(r));
  std::vector<PreparedTarget> targets;
  for (const auto& t : config.tests) {
    PreparedTarget pt{t.name, {}};
    for (const auto& r : t.docs) pt.docs.push_back(prepare(r));
    targets.push_back(std::move(pt));
  }

  auto carve = [](std::vector<const BinaryTree*>& train, std::vector<const BinaryTree*>& dev) {
    if (!dev.empty() || train.size() < 2) return;
    std::vector<std::pair<int, std::string>> meta;
    meta.reserve(train.size());
    for (const auto* b : train) meta.emplace_back(static_cast<int>(b->edus.size()), b->doc_id);
    auto picked = stratified_dev_indices(meta);
    std::set<int> carved(picked.begin(), picked.end());
    std::vector<const BinaryTree*> kept;
    for (int i = 0; i < static_cast<int>(train.size()); ++i)
      (carved.count(i) ? dev : kept).push_back(train[i]);
    train = std::move(kept);
  };
  carve(train_set, dev_set);
  if (regime_needs_base(config.regime)) carve(base_train_set, base_dev_set);

  std::vector<std::string> row_names;
  for (const auto& t : targets) row_names.push_back(t.name);
  if (targets.size() > 1) {
    row_names.push_back("micro");
    row_names.push_back("macro");
  }

  auto run_one = [&](int run) -> std::vector<RunScore> {
    const std::uint64_t seed = config.seeds[run];
    FeatureConfig plain_features;
    plain_features.organizational = config.organizational;
    FeatureConfig features = plain_features;
    std::map<const BinaryTree*, DocAnnotations> annotations;
    auto annotations_for = [&](const BinaryTree* b) -> DocAnnotations {
      auto it = annotations.find(b);
      return it == annotations.end() ? DocAnnotations{} : it->second;
    };
    auto annotate_everywhere = [&](auto&& fn) {
      for (const auto* b : train_set) fn(b);
      for (const auto* b : dev_set) fn(b);
      for (const auto& t : targets)
        for (const auto* b : t.docs) fn(b);
    };

    TrainConfig tc;
    tc.max_epochs = config.max_epochs;
    tc.patience = config.patience;
    tc.seed = seed;
    tc.quiet = opts.quiet;

    switch (config.regime) {
      case Regime::plain:
      case Regime::concat:
      case Regime::warm_start:
        break;
      case Regime::tagger_label: {
        const auto& source = base_train_set.empty() ? train_set : base_train_set;
        std::vector<DepDocument> deps;
        deps.reserve(source.size());
        for (const auto* b : source) deps.push_back(to_dependencies(*b));
        std::vector<const DepDocument*> dep_ptrs;
        for (const auto& d : deps) dep_ptrs.push_back(&d);
        Tagger tagger = train_window_tagger(dep_ptrs, {5, seed});
        features.stacking = StackingMode::label;
        annotate_everywhere([&](const BinaryTree* b) {
          auto labels = tag(tagger, b->edus);
          DocAnnotations a(labels.size());
          for (std::size_t i = 0; i < labels.size(); ++i) a[i].dep_label = labels[i];
          annotations[b] = std::move(a);
        });
        break;
      }
      case Regime::sr_label:
      case Regime::sr_graph: {
        std::vector<TrainDoc> bt, bd;
        for (const auto* b : base_train_set) bt.push_back({b, {}});
        for (const auto* b : base_dev_set) bd.push_back({b, {}});
        TrainConfig base_tc = tc;
        base_tc.features = plain_features;
        Model base = train(bt, bd, base_tc);
        StackingMode mode =
            config.regime == Regime::sr_label ? StackingMode::label : StackingMode::graph;
        features.stacking = mode;
        annotate_everywhere([&](const BinaryTree* b) {
          annotations[b] = stack_features_from_parser(base, b->edus, mode, b->doc_id);
        });
        break;
      }
    }

    tc.features = features;
    std::vector<TrainDoc> tr, dv;
    for (const auto* b : train_set) tr.push_back({b, annotations_for(b)});
    for (const auto* b : dev_set) dv.push_back({b, annotations_for(b)});

    Model model;
    if (config.regime == Regime::warm_start) {
      std::vector<TrainDoc> bt, bd;
      for (const auto* b : base_train_set) bt.push_back({b, {}});
      for (const auto* b : base_dev_set) bd.push_back({b, {}});
      Model base = train(bt, bd, tc);
      model = warm_start(base, tr, dv, tc);
    } else {
      model = train(tr, dv, tc);
    }

    std::vector<RunScore> rows;
    std::vector<DocScore> pooled;
    std::vector<std::pair<const BinaryTree*, BinaryTree>> parses;
    for (const auto& t : targets) {
      std::vector<DocScore> scores;
      for (const auto* gold : t.docs) {
        BinaryTree pred =
            parse(model, gold->edus, annotations_for(gold), gold->doc_id, gold->genre);
        DocScore ds{gold->doc_id, gold->genre, parseval(*gold, pred)};
        scores.push_back(ds);
        pooled.push_back(ds);
        if (!config.out_dir.empty()) parses.emplace_back(gold, std::move(pred));
      }
      rows.push_back({run, seed, t.name, aggregate(scores, AggregateMode::micro)});
    }
    if (targets.size() > 1) {
      rows.push_back({run, seed, "micro", aggregate(pooled, AggregateMode::micro)});
      rows.push_back({run, seed, "macro", aggregate(pooled, AggregateMode::macro_by_genre)});
    }

    if (!config.out_dir.empty()) {
      fs::path dir = fs::path(config.out_dir) / config.name / std::to_string(seed);
      fs::create_directories(dir / "parses");
      save_model(model, (dir / "model.bin").string());
      for (const auto& [gold, pred] : parses) {
        write_file((dir / "parses" / (gold->doc_id + ".rs3")).string(),
                   write_rs3(debinarize(pred)));
        write_file((dir / "parses" / (gold->doc_id + ".rsd")).string(),
                   write_rsd(to_dependencies(pred)));
      }
      ScoreReport rr{config.name, 1, row_names, rows, fold_means(row_names, rows, 1)};
      write_file((dir / "report.csv").string(), report_csv(rr));
    }
    return rows;
  };

  std::vector<std::vector<RunScore>> outs(config.runs);
  int jobs = std::clamp(opts.jobs, 1, config.runs);
  if (jobs == 1) {
    for (int r = 0; r < config.runs; ++r) outs[r] = run_one(r);
  } else {
    std::vector<std::exception_ptr> errors(config.runs);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (int r = next++; r < config.runs; r = next++) {
          try {
            outs[r] = run_one(r);
          } catch (...) {
            errors[r] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  ScoreReport report;
  report.name = config.name;
  report.runs = config.runs;
  report.targets = row_names;
  for (const auto& rows : outs)
    report.per_run.insert(report.per_run.end(), rows.begin(), rows.end());
  report.means = fold_means(row_names, report.per_run, config.runs);

  if (!config.out_dir.empty()) {
    fs::path dir = fs::path(config.out_dir) / config.name;
    fs::create_directories(dir);
    write_file((dir / "report.csv").string(), report_csv(report));
    write_file((dir / "config.cfg").string(), write_experiment_config(config));
  }
  return report;
}

namespace {

void require_genre(const Corpus& corpus, const std::string& genre) {
  auto gs = corpus.genres();
  if (std::find(gs.begin(), gs.end(), genre) == gs.end())
    throw Error(Errc::unknown_genre, genre);
}

std::vector<DocRef> refs_of(const std::vector<const ConstituentTree*>& docs,
                            const std::string& key) {
  std::vector<DocRef> out;
  out.reserve(docs.size());
  for (const auto* d : docs) out.push_back({key, d->doc_id});
  return out;
}

TestTarget genre_target(const Corpus& corpus, const std::string& key, const std::string& genre) {
  TestTarget t{genre, {}};
  for (const auto* d : corpus.select("dev", genre)) t.docs.push_back({key, d->doc_id});
  for (const auto* d : corpus.select("test", genre)) t.docs.push_back({key, d->doc_id});
  return t;
}

}  // namespace

ExperimentConfig build_ova(const Corpus& corpus, const std::string& corpus_key,
                           const std::string& held_out_genre) {
  require_genre(corpus, held_out_genre);
  ExperimentConfig cfg;
  cfg.name = "no-" + held_out_genre;
  cfg.baseline = "base-" + held_out_genre;
  for (const auto* d : corpus.select("train"))
    if (d->genre != held_out_genre) cfg.train.push_back({corpus_key, d->doc_id});
  for (const auto* d : corpus.select("dev"))
    if (d->genre != held_out_genre) cfg.dev.push_back({corpus_key, d->doc_id});
  cfg.tests.push_back(genre_target(corpus, corpus_key, held_out_genre));
  return cfg;
}

ExperimentConfig build_baseline(const Corpus& corpus, const std::string& corpus_key,
                                const std::string& genre) {
  require_genre(corpus, genre);
  ExperimentConfig cfg;
  cfg.name = "base-" + genre;
  cfg.runs = 5;
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.train = refs_of(corpus.select("train"), corpus_key);
  // The target genre's dev docs are part of the test target and must stay
  // out of the early-stopping set.
  for (const auto* d : corpus.select("dev"))
    if (d->genre != genre) cfg.dev.push_back({corpus_key, d->doc_id});
  cfg.tests.push_back(genre_target(corpus, corpus_key, genre));
  return cfg;
}

ExperimentConfig build_all_large(const Corpus& corpus, const std::string& corpus_key,
                                 const std::vector<std::string>& growing,
                                 std::vector<std::string>* warnings) {
  ExperimentConfig cfg;
  cfg.name = "all-large";
  auto is_growing = [&](const std::string& genre) {
    return std::find(growing.begin(), growing.end(), genre) != growing.end();
  };
  for (const auto* d : corpus.select("train"))
    if (!is_growing(d->genre)) cfg.train.push_back({corpus_key, d->doc_id});
  for (const auto* d : corpus.select("dev"))
    if (!is_growing(d->genre)) cfg.dev.push_back({corpus_key, d->doc_id});
  auto present = corpus.genres();
  for (const auto& g : growing)
    if (std::find(present.begin(), present.end(), g) != present.end())
      cfg.tests.push_back(genre_target(corpus, corpus_key, g));
  if (cfg.tests.empty() && warnings)
    warnings->push_back("all-large: corpus has no growing genres; test list is empty");
  return cfg;
}

namespace {

// Achievable EDU totals choosing exactly k documents from vals[from..].
std::vector<char> exact_k_sums(const std::vector<int>& vals, int from, int k) {
  int n = static_cast<int>(vals.size()) - from;
  if (k < 0 || k > n) return {};
  long long total = 0;
  for (int i = from; i < static_cast<int>(vals.size()); ++i) total += vals[i];
  std::vector<std::vector<char>> dp(k + 1, std::vector<char>(total + 1, 0));
  dp[0][0] = 1;
  for (int i = from; i < static_cast<int>(vals.size()); ++i) {
    int v = vals[i];
    for (int c = k; c >= 1; --c)
      for (long long s = total; s >= v; --s)
        if (dp[c - 1][s - v]) dp[c][s] = 1;
  }
  return dp[k];
}

std::vector<char> convolve(const std::vector<char>& a, const std::vector<char>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<char> out(a.size() + b.size() - 1, 0);
  std::vector<int> bs;
  for (int j = 0; j < static_cast<int>(b.size()); ++j)
    if (b[j]) bs.push_back(j);
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    if (a[i])
      for (int j : bs) out[i + j] = 1;
  return out;
}

bool reachable(const std::vector<char>& head, const std::vector<char>& tail, long long want) {
  if (want < 0 || head.empty() || tail.empty()) return false;
  for (long long s = 0; s < static_cast<long long>(head.size()) && s <= want; ++s)
    if (head[s] && want - s < static_cast<long long>(tail.size()) && tail[want - s]) return true;
  return false;
}

}  // namespace

std::vector<ExperimentConfig> build_fixed_cohorts(const Corpus& corpus,
                                                  const std::string& corpus_key,
                                                  const std::vector<CohortSpec>& specs,
                                                  const CohortOptions& opts) {
  struct Row {
    std::string genre;
    int want = 0;
    std::vector<const ConstituentTree*> pool;  // lexicographic, all partitions
    std::vector<int> edus;
  };
  struct Cohort {
    std::string name;
    std::vector<Row> rows;
    std::vector<const ConstituentTree*> chosen;
    long long total = 0;
  };

  std::set<std::string> used_genres;
  std::vector<Cohort> cohorts;
  for (const auto& spec : specs) {
    Cohort c;
    c.name = spec.name;
    for (const auto& row : spec.rows) {
      Row r;
      r.genre = row.genre;
      r.want = row.docs;
      r.pool = corpus.select("", row.genre);
      if (row.docs <= 0 || static_cast<int>(r.pool.size()) < row.docs)
        throw Error(Errc::infeasible_budget,
                    spec.name + ": genre \"" + row.genre + "\" has " +
                        std::to_string(r.pool.size()) + " documents, needs " +
                        std::to_string(row.docs));
      for (const auto* d : r.pool) r.edus.push_back(static_cast<int>(d->edus.size()));
      used_genres.insert(row.genre);
      c.rows.push_back(std::move(r));
    }
    cohorts.push_back(std::move(c));
  }

  for (auto& c : cohorts) {
    if (opts.target_edus <= 0) {
      for (auto& r : c.rows)
        for (int i = 0; i < r.want; ++i) {
          c.chosen.push_back(r.pool[i]);
          c.total += r.edus[i];
        }
      continue;
    }

    // Per-row achievable totals and their suffix convolutions.
    int m = static_cast<int>(c.rows.size());
    std::vector<std::vector<char>> row_sums(m);
    for (int i = 0; i < m; ++i) row_sums[i] = exact_k_sums(c.rows[i].edus, 0, c.rows[i].want);
    std::vector<std::vector<char>> suffix(m + 1);
    suffix[m] = {1};
    for (int i = m - 1; i >= 0; --i) suffix[i] = convolve(row_sums[i], suffix[i + 1]);

    long long best = -1;
    const auto& all = suffix[0];
    for (long long t = opts.target_edus; t >= opts.target_edus - opts.tolerance; --t)
      if (t >= 0 && t < static_cast<long long>(all.size()) && all[t]) {
        best = t;
        break;
      }
    for (long long t = opts.target_edus + 1; t <= opts.target_edus + opts.tolerance; ++t)
      if (t < static_cast<long long>(all.size()) && all[t]) {
        if (best < 0 || t - opts.target_edus < opts.target_edus - best) best = t;
        break;
      }
    if (best < 0)
      throw Error(Errc::infeasible_budget,
                  c.name + ": no document subset reaches " + std::to_string(opts.target_edus) +
                      " EDUs within " + std::to_string(opts.tolerance));

    // Lexicographically first selection hitting the total exactly: include
    // each document in order whenever the remainder stays reachable.
    long long remaining = best;
    for (int i = 0; i < m; ++i) {
      auto& r = c.rows[i];
      int need = r.want;
      for (int j = 0; j < static_cast<int>(r.pool.size()) && need > 0; ++j) {
        int v = r.edus[j];
        if (v <= remaining) {
          auto rest = exact_k_sums(r.edus, j + 1, need - 1);
          if (reachable(rest, suffix[i + 1], remaining - v)) {
            c.chosen.push_back(r.pool[j]);
            remaining -= v;
            --need;
            continue;
          }
        }
      }
      if (need != 0)
        throw Error(Errc::infeasible_budget, c.name + ": selection reconstruction failed");
    }
    c.total = best;
  }

  for (std::size_t i = 0; i < cohorts.size(); ++i)
    for (std::size_t j = i + 1; j < cohorts.size(); ++j)
      if (std::llabs(cohorts[i].total - cohorts[j].total) > opts.tolerance)
        throw Error(Errc::infeasible_budget,
                    cohorts[i].name + " (" + std::to_string(cohorts[i].total) + " EDUs) and " +
                        cohorts[j].name + " (" + std::to_string(cohorts[j].total) +
                        " EDUs) differ by more than " + std::to_string(opts.tolerance));

  std::vector<TestTarget> tests;
  for (const auto& g : corpus.genres())
    if (!used_genres.count(g)) tests.push_back(genre_target(corpus, corpus_key, g));

  std::vector<ExperimentConfig> out;
  for (const auto& c : cohorts) {
    ExperimentConfig cfg;
    cfg.name = c.name;
    cfg.train = refs_of(c.chosen, corpus_key);
    cfg.tests = tests;
    out.push_back(std::move(cfg));
  }
  return out;
}

}  // namespace rstlab
