#include "rstlab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "rstlab/analysis.hpp"
#include "rstlab/corpus.hpp"
#include "rstlab/depconv.hpp"
#include "rstlab/errors.hpp"
#include "rstlab/experiments.hpp"
#include "rstlab/metrics.hpp"
#include "rstlab/parser.hpp"
#include "rstlab/relmap.hpp"
#include "rstlab/rs3.hpp"
#include "rstlab/rsd.hpp"
#include "rstlab/strutil.hpp"
#include "rstlab/treeops.hpp"

namespace rstlab {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> collect(const std::string& path, std::initializer_list<const char*> exts) {
  fs::path p(path);
  if (fs::is_directory(p)) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(p)) {
      if (!e.is_regular_file()) continue;
      const std::string ext = e.path().extension().string();
      for (const char* x : exts)
        if (ext == x) {
          out.push_back(e.path());
          break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  if (!fs::exists(p)) throw Error(Errc::io_error, "no such file: " + path);
  return {p};
}

std::vector<fs::path> collect_many(const std::vector<std::string>& paths,
                                   std::initializer_list<const char*> exts) {
  std::vector<fs::path> out;
  for (const auto& p : paths)
    for (auto& f : collect(p, exts)) out.push_back(std::move(f));
  return out;
}

std::vector<std::pair<fs::path, fs::path>> pair_by_stem(const std::string& gold,
                                                        const std::string& pred,
                                                        std::initializer_list<const char*> exts) {
  auto gs = collect(gold, exts);
  std::map<std::string, fs::path> pm;
  for (auto& p : collect(pred, exts)) pm[p.stem().string()] = p;
  std::vector<std::pair<fs::path, fs::path>> out;
  std::set<std::string> seen;
  for (auto& g : gs) {
    const std::string stem = g.stem().string();
    seen.insert(stem);
    auto it = pm.find(stem);
    if (it == pm.end()) throw Error(Errc::doc_mismatch, "no prediction for " + stem);
    out.emplace_back(std::move(g), it->second);
  }
  for (const auto& [stem, p] : pm)
    if (!seen.count(stem)) throw Error(Errc::doc_mismatch, "no gold document for " + stem);
  if (out.empty()) throw Error(Errc::empty_input, "no documents under " + gold);
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  if (fs::path(out_path).has_parent_path())
    fs::create_directories(fs::path(out_path).parent_path());
  write_file(out_path, text);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::map<std::string, std::string> genre_map(const std::string& manifest_path) {
  std::map<std::string, std::string> out;
  if (manifest_path.empty()) return out;
  for (const auto& e : parse_manifest(read_file(manifest_path))) out[e.doc_id] = e.genre;
  return out;
}

Relabel make_relabel(const std::string& mode_name) {
  Collapse mode = collapse_from(mode_name);
  if (mode == Collapse::none) return {};
  auto table = std::make_shared<MappingTable>(MappingTable::builtin());
  return [table, mode](const std::string& label) {
    if (label == kRootLabel) return label;
    switch (mode) {
      case Collapse::gum_classes: return table->to_class(label, Scheme::gum);
      case Collapse::rstdt_classes: return table->to_class(label, Scheme::rstdt);
      case Collapse::gum_to_rstdt: return table->gum_to_rstdt(label);
      default: return label;
    }
  };
}

std::vector<std::string> edu_texts(const fs::path& p, bool lenient,
                                   std::vector<std::string>* warnings) {
  std::vector<std::string> out;
  if (p.extension() == ".rsd") {
    for (const auto& e : load_rsd(p.string()).edus) out.push_back(e.text);
  } else {
    for (const auto& e : load_rs3(p.string(), {lenient, warnings}).edus) out.push_back(e.text);
  }
  return out;
}

std::vector<Edu> edus_from_file(const fs::path& p, bool lenient,
                                std::vector<std::string>* warnings) {
  if (p.extension() == ".rs3")
    return load_rs3(p.string(), {lenient, warnings}).edus;
  std::vector<Edu> out;
  std::istringstream in(read_file(p.string()));
  std::string line;
  while (std::getline(in, line)) {
    const std::string text = normalize_ws(line);
    if (text.empty()) continue;
    Edu e;
    e.index = static_cast<int>(out.size()) + 1;
    e.text = text;
    out.push_back(std::move(e));
  }
  if (out.empty()) throw Error(Errc::empty_input, p.string());
  return out;
}

StackingMode stacking_from(const std::string& name) {
  if (name == "none") return StackingMode::none;
  if (name == "label") return StackingMode::label;
  if (name == "graph") return StackingMode::graph;
  throw CLI::ValidationError("--stacking must be none, label, or graph");
}

std::string fmt2(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommand option bags. CLI11 callbacks run inside parse(), so each struct
// holds everything its action reads.

struct ConvertOpts {
  std::vector<std::string> inputs;
  std::string output, out_dir;
  bool lenient = false;
};

void add_convert(CLI::App& app, std::shared_ptr<ConvertOpts> o) {
  auto* cmd = app.add_subcommand("convert", "Normalize rs3 documents");
  cmd->add_option("inputs", o->inputs, "rs3 files or directories")->required();
  cmd->add_option("-o,--output", o->output, "single output file");
  cmd->add_option("--out-dir", o->out_dir, "output directory");
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->callback([o] {
    auto files = collect_many(o->inputs, {".rs3"});
    if (!o->output.empty() && files.size() != 1)
      throw CLI::ValidationError("-o needs exactly one input");
    if (o->output.empty() && o->out_dir.empty() && files.size() != 1)
      throw CLI::ValidationError("several inputs need --out-dir");
    for (const auto& f : files) {
      std::vector<std::string> warnings;
      ConstituentTree tree = load_rs3(f.string(), {o->lenient, &warnings});
      print_warnings(warnings);
      std::string out_path = o->output;
      if (!o->out_dir.empty()) out_path = (fs::path(o->out_dir) / f.filename()).string();
      emit(write_rs3(tree), out_path);
    }
  });
}

struct DepconvertOpts {
  std::vector<std::string> inputs;
  std::string output, out_dir;
  bool lenient = false;
};

void add_depconvert(CLI::App& app, std::shared_ptr<DepconvertOpts> o) {
  auto* cmd = app.add_subcommand("depconvert", "Convert rs3 trees to rsd dependencies");
  cmd->add_option("inputs", o->inputs, "rs3 files or directories")->required();
  cmd->add_option("-o,--output", o->output, "single output file");
  cmd->add_option("--out-dir", o->out_dir, "output directory");
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->callback([o] {
    auto files = collect_many(o->inputs, {".rs3"});
    if (!o->output.empty() && files.size() != 1)
      throw CLI::ValidationError("-o needs exactly one input");
    if (o->output.empty() && o->out_dir.empty() && files.size() != 1)
      throw CLI::ValidationError("several inputs need --out-dir");
    for (const auto& f : files) {
      std::vector<std::string> warnings;
      ConstituentTree tree = load_rs3(f.string(), {o->lenient, &warnings});
      print_warnings(warnings);
      std::string out_path = o->output;
      if (!o->out_dir.empty())
        out_path = (fs::path(o->out_dir) / f.stem()).string() + ".rsd";
      emit(write_rsd(to_dependencies(tree)), out_path);
    }
  });
}

struct ScoreOpts {
  std::string gold, pred, mode = "micro", collapse = "none", manifest, per_doc;
  bool include_root = false, left_branching = false, lenient = false;
};

void add_score(CLI::App& app, std::shared_ptr<ScoreOpts> o) {
  auto* cmd = app.add_subcommand("score", "Parseval S/N/R over gold and predicted rs3");
  cmd->add_option("--gold", o->gold, "gold rs3 file or directory")->required();
  cmd->add_option("--pred", o->pred, "predicted rs3 file or directory")->required();
  cmd->add_option("--mode", o->mode, "micro or macro")
      ->check(CLI::IsMember({"micro", "macro"}));
  cmd->add_option("--collapse", o->collapse, "relabel before the R comparison")
      ->check(CLI::IsMember({"none", "gum-classes", "rstdt-classes", "gum-to-rstdt"}));
  cmd->add_option("--manifest", o->manifest, "manifest supplying genres for macro");
  cmd->add_option("--per-doc", o->per_doc, "write per-document counts CSV here");
  cmd->add_flag("--include-root", o->include_root, "count the whole-document span too");
  cmd->add_flag("--left-branching", o->left_branching, "binarize multinuclear chains leftward");
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->callback([o] {
    auto genres = genre_map(o->manifest);
    ParsevalOptions popts;
    popts.include_root = o->include_root;
    popts.relabel = make_relabel(o->collapse);
    BinarizeOptions bopts{o->left_branching};
    std::vector<DocScore> scores;
    std::ostringstream per_doc;
    per_doc << "doc_id,genre,gold_units,pred_units,matched_s,matched_n,matched_r,s,n,r\n";
    for (const auto& [g, p] : pair_by_stem(o->gold, o->pred, {".rs3"})) {
      std::vector<std::string> warnings;
      BinaryTree gb = binarize(load_rs3(g.string(), {o->lenient, &warnings}), bopts);
      BinaryTree pb = binarize(load_rs3(p.string(), {o->lenient, &warnings}), bopts);
      print_warnings(warnings);
      DocScore ds;
      ds.doc_id = g.stem().string();
      if (auto it = genres.find(ds.doc_id); it != genres.end()) ds.genre = it->second;
      ds.counts = parseval(gb, pb, popts);
      ScoreTriple t = triple_from(ds.counts);
      per_doc << ds.doc_id << ',' << ds.genre << ',' << ds.counts.gold_units << ','
              << ds.counts.pred_units << ',' << ds.counts.matched_s << ',' << ds.counts.matched_n
              << ',' << ds.counts.matched_r << ',' << fmt2(t.s) << ',' << fmt2(t.n) << ','
              << fmt2(t.r) << '\n';
      scores.push_back(std::move(ds));
    }
    ScoreTriple t = aggregate(
        scores, o->mode == "macro" ? AggregateMode::macro_by_genre : AggregateMode::micro);
    if (!o->per_doc.empty()) emit(per_doc.str(), o->per_doc);
    std::cout << "S\t" << fmt2(t.s) << "\nN\t" << fmt2(t.n) << "\nR\t" << fmt2(t.r) << '\n';
  });
}

struct SegScoreOpts {
  std::string gold, pred;
  bool lenient = false;
};

void add_seg_score(CLI::App& app, std::shared_ptr<SegScoreOpts> o) {
  auto* cmd = app.add_subcommand("seg-score", "EDU boundary P/R/F1 over parallel documents");
  cmd->add_option("--gold", o->gold, "gold rs3/rsd file or directory")->required();
  cmd->add_option("--pred", o->pred, "predicted rs3/rsd file or directory")->required();
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->callback([o] {
    SegCounts total;
    for (const auto& [g, p] : pair_by_stem(o->gold, o->pred, {".rs3", ".rsd"})) {
      std::vector<std::string> warnings;
      auto [gb, gt] = edu_boundaries(edu_texts(g, o->lenient, &warnings));
      auto [pb, pt] = edu_boundaries(edu_texts(p, o->lenient, &warnings));
      print_warnings(warnings);
      total += seg_counts(gt, pt, gb, pb);
    }
    SegScore s = seg_score(total);
    std::cout << "P\t" << fmt2(s.p) << "\nR\t" << fmt2(s.r) << "\nF1\t" << fmt2(s.f1) << '\n';
  });
}

struct StatsOpts {
  std::string root, manifest, partition, genre;
  bool by_genre = false, lenient = false;
  int jobs = 1;
};

void add_stats(CLI::App& app, std::shared_ptr<StatsOpts> o) {
  auto* cmd = app.add_subcommand("stats", "Corpus size, instance, and nuclearity statistics");
  cmd->add_option("--root", o->root, "directory holding the rs3 files")->required();
  cmd->add_option("--manifest", o->manifest, "doc_id/partition/genre manifest")->required();
  cmd->add_option("--partition", o->partition, "restrict to one partition");
  cmd->add_option("--genre", o->genre, "restrict to one genre");
  cmd->add_flag("--by-genre", o->by_genre, "per-genre CSV instead of totals");
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->add_option("--jobs", o->jobs, "parallel document loads");
  cmd->callback([o] {
    std::vector<std::string> warnings;
    Corpus corpus = load_corpus(o->root, o->manifest, {o->lenient, o->jobs, &warnings});
    print_warnings(warnings);
    auto emit_row = [](std::ostream& out, const std::string& name,
                       const std::vector<const ConstituentTree*>& docs) {
      CorpusStats st = corpus_stats(docs);
      out << name << ',' << st.docs << ',' << st.tokens << ',' << st.edus << ','
          << st.relation_instances << ',' << st.same_unit_instances << ',' << st.label_count;
      if (st.relation_instances > 0) {
        NuclearityDistribution d = nuclearity_distribution(docs);
        out << ',' << fmt2(d.ns * 100) << ',' << fmt2(d.sn * 100) << ',' << fmt2(d.nn * 100);
      } else {
        out << ",,,";
      }
      out << '\n';
    };
    if (o->by_genre) {
      std::cout
          << "genre,docs,tokens,edus,relation_instances,same_unit,labels,ns_pct,sn_pct,nn_pct\n";
      for (const auto& g : corpus.genres())
        emit_row(std::cout, g, corpus.select(o->partition, g));
      emit_row(std::cout, "total", corpus.select(o->partition, o->genre));
      return;
    }
    auto docs = corpus.select(o->partition, o->genre);
    CorpusStats st = corpus_stats(docs);
    std::cout << "docs\t" << st.docs << "\ntokens\t" << st.tokens << "\nedus\t" << st.edus
              << "\nrelation_instances\t" << st.relation_instances << "\nsame_unit_instances\t"
              << st.same_unit_instances << "\nlabels\t" << st.label_count << '\n';
    if (st.relation_instances > 0) {
      NuclearityDistribution d = nuclearity_distribution(docs);
      std::cout << "ns_pct\t" << fmt2(d.ns * 100) << "\nsn_pct\t" << fmt2(d.sn * 100)
                << "\nnn_pct\t" << fmt2(d.nn * 100) << '\n';
    }
  });
}

struct MapOpts {
  std::string data_dir, scheme = "gum", root, manifest;
  std::vector<std::string> labels;
  bool rate = false, checksum = false, cross = false, lenient = false;
};

void add_map(CLI::App& app, std::shared_ptr<MapOpts> o) {
  auto* cmd = app.add_subcommand("map", "Relation-class mapping lookups and table info");
  cmd->add_option("--data-dir", o->data_dir, "directory with the mapping tables");
  cmd->add_option("--label", o->labels, "relation label to collapse (repeatable)");
  cmd->add_option("--scheme", o->scheme, "label scheme")->check(CLI::IsMember({"gum", "rstdt"}));
  cmd->add_flag("--cross", o->cross, "map GUM labels to RST-DT classes instead");
  cmd->add_flag("--checksum", o->checksum, "print row count and table checksum");
  cmd->add_flag("--rate", o->rate, "mismatch rate over a corpus (needs --root/--manifest)");
  cmd->add_option("--root", o->root, "corpus root for --rate");
  cmd->add_option("--manifest", o->manifest, "corpus manifest for --rate");
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->callback([o] {
    MappingTable table = MappingTable::builtin(o->data_dir);
    if (o->checksum) {
      std::ostringstream hex;
      hex << std::hex << table.checksum();
      std::cout << "rows\t" << table.size() << "\nchecksum\t" << hex.str() << '\n';
      return;
    }
    if (o->rate) {
      if (o->root.empty() || o->manifest.empty())
        throw CLI::ValidationError("--rate needs --root and --manifest");
      std::vector<std::string> warnings;
      Corpus corpus = load_corpus(o->root, o->manifest, {o->lenient, 1, &warnings});
      print_warnings(warnings);
      std::vector<const ConstituentTree*> docs;
      for (const auto& d : corpus.docs) docs.push_back(&d);
      std::cout << "mismatch_rate\t" << fmt2(mapping_mismatch_rate(docs, table) * 100) << '\n';
      return;
    }
    if (!o->labels.empty()) {
      Scheme scheme = o->scheme == "rstdt" ? Scheme::rstdt : Scheme::gum;
      for (const auto& l : o->labels) {
        if (o->cross)
          std::cout << l << '\t' << table.gum_to_rstdt(l) << '\n';
        else
          std::cout << l << '\t' << table.to_class(l, scheme) << '\n';
      }
      return;
    }
    std::cout << "gum_relation,gum_class,rstdt_class,diverges\n";
    for (const auto& r : table.rows())
      std::cout << r.gum_relation << ',' << r.gum_class << ',' << r.rstdt_class << ','
                << (table.diverges(r.gum_relation) ? "yes" : "no") << '\n';
  });
}

struct TrainOpts {
  std::string root, manifest, partition = "train", dev_partition = "dev";
  std::vector<std::string> genres, exclude_genres;
  std::string collapse = "none", model, stacking = "none", base_model, warm_start_from;
  int epochs = 20, patience = 5, jobs = 1;
  std::uint64_t seed = 1;
  bool no_organizational = false, left_branching = false, lenient = false, verbose = false;
};

void add_train(CLI::App& app, std::shared_ptr<TrainOpts> o) {
  auto* cmd = app.add_subcommand("train", "Train a shift-reduce model on a corpus selection");
  cmd->add_option("--root", o->root, "directory holding the rs3 files")->required();
  cmd->add_option("--manifest", o->manifest, "doc_id/partition/genre manifest")->required();
  cmd->add_option("--model", o->model, "output model path")->required();
  cmd->add_option("--partition", o->partition, "training partition");
  cmd->add_option("--dev-partition", o->dev_partition,
                  "early-stopping partition; empty trains in-sample");
  cmd->add_option("--genre", o->genres, "keep only these genres (repeatable)");
  cmd->add_option("--exclude-genre", o->exclude_genres, "drop these genres (repeatable)");
  cmd->add_option("--collapse", o->collapse, "label collapse applied before training")
      ->check(CLI::IsMember({"none", "gum-classes", "rstdt-classes", "gum-to-rstdt"}));
  cmd->add_option("--stacking", o->stacking, "stacked feature mode")
      ->check(CLI::IsMember({"none", "label", "graph"}));
  cmd->add_option("--base-model", o->base_model, "base parser for --stacking label/graph");
  cmd->add_option("--warm-start", o->warm_start_from, "continue training from this model");
  cmd->add_option("--epochs", o->epochs, "epoch cap");
  cmd->add_option("--patience", o->patience, "epochs without dev improvement before stopping");
  cmd->add_option("--seed", o->seed, "shuffle seed");
  cmd->add_option("--jobs", o->jobs, "parallel document loads");
  cmd->add_flag("--no-organizational", o->no_organizational, "drop sentence/paragraph features");
  cmd->add_flag("--left-branching", o->left_branching, "binarize multinuclear chains leftward");
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->add_flag("--verbose", o->verbose, "log per-epoch dev scores");
  cmd->callback([o] {
    StackingMode stacking = stacking_from(o->stacking);
    if (stacking != StackingMode::none && o->base_model.empty())
      throw CLI::ValidationError("--stacking label/graph needs --base-model");
    if (!o->warm_start_from.empty() && stacking != StackingMode::none)
      throw CLI::ValidationError("--warm-start and --stacking are mutually exclusive");

    std::vector<std::string> warnings;
    Corpus corpus = load_corpus(o->root, o->manifest, {o->lenient, o->jobs, &warnings});
    print_warnings(warnings);
    auto keep = [&](const ConstituentTree* d) {
      if (!o->genres.empty() &&
          std::find(o->genres.begin(), o->genres.end(), d->genre) == o->genres.end())
        return false;
      return std::find(o->exclude_genres.begin(), o->exclude_genres.end(), d->genre) ==
             o->exclude_genres.end();
    };

    Collapse mode = collapse_from(o->collapse);
    MappingTable table;
    if (mode != Collapse::none) table = MappingTable::builtin();
    BinarizeOptions bopts{o->left_branching};
    auto prepare = [&](const std::string& partition) {
      std::vector<BinaryTree> out;
      for (const auto* d : corpus.select(partition))
        if (keep(d))
          out.push_back(binarize(mode == Collapse::none ? *d : collapse_tree(*d, table, mode),
                                 bopts));
      return out;
    };
    std::vector<BinaryTree> train_trees = prepare(o->partition);
    std::vector<BinaryTree> dev_trees =
        o->dev_partition.empty() ? std::vector<BinaryTree>{} : prepare(o->dev_partition);
    if (train_trees.empty()) throw Error(Errc::empty_train_set, "no documents selected");

    Model base;
    if (stacking != StackingMode::none) base = load_model_auto(o->base_model);
    auto to_docs = [&](const std::vector<BinaryTree>& trees) {
      std::vector<TrainDoc> out;
      for (const auto& t : trees) {
        TrainDoc d{&t, {}};
        if (stacking != StackingMode::none)
          d.annotations = stack_features_from_parser(base, t.edus, stacking, t.doc_id);
        out.push_back(std::move(d));
      }
      return out;
    };

    TrainConfig tc;
    tc.features.organizational = !o->no_organizational;
    tc.features.stacking = stacking;
    tc.max_epochs = o->epochs;
    tc.patience = o->patience;
    tc.seed = o->seed;
    tc.quiet = !o->verbose;
    Model model;
    if (o->warm_start_from.empty())
      model = train(to_docs(train_trees), to_docs(dev_trees), tc);
    else
      model = warm_start(load_model_auto(o->warm_start_from), to_docs(train_trees),
                         to_docs(dev_trees), tc);
    if (fs::path(o->model).has_parent_path())
      fs::create_directories(fs::path(o->model).parent_path());
    save_model(model, o->model);
    std::cout << "model\t" << o->model << "\nactions\t" << model.actions.size() << "\nfeatures\t"
              << model.weights.size() << '\n';
  });
}

struct ParseOpts {
  std::vector<std::string> inputs;
  std::string model, base_model, out_dir;
  bool lenient = false;
};

void add_parse(CLI::App& app, std::shared_ptr<ParseOpts> o) {
  auto* cmd = app.add_subcommand("parse", "Parse segmented documents with a trained model");
  cmd->add_option("inputs", o->inputs, "rs3 files (gold EDUs) or one-EDU-per-line text")
      ->required();
  cmd->add_option("--model", o->model, "trained model")->required();
  cmd->add_option("--base-model", o->base_model, "base parser for stacked models");
  cmd->add_option("--out-dir", o->out_dir, "directory for <doc>.rs3 and <doc>.rsd")->required();
  cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  cmd->callback([o] {
    Model model = load_model_auto(o->model);
    Model base;
    if (model.config.stacking != StackingMode::none) {
      if (o->base_model.empty())
        throw CLI::ValidationError("this model stacks base-parser features; pass --base-model");
      base = load_model_auto(o->base_model);
    }
    fs::create_directories(o->out_dir);
    for (const auto& f : collect_many(o->inputs, {".rs3", ".edus", ".txt"})) {
      std::vector<std::string> warnings;
      std::vector<Edu> edus = edus_from_file(f, o->lenient, &warnings);
      print_warnings(warnings);
      const std::string doc_id = f.stem().string();
      DocAnnotations ann;
      if (model.config.stacking != StackingMode::none)
        ann = stack_features_from_parser(base, edus, model.config.stacking, doc_id);
      BinaryTree pred = parse(model, edus, ann, doc_id);
      write_file((fs::path(o->out_dir) / (doc_id + ".rs3")).string(),
                 write_rs3(debinarize(pred)));
      write_file((fs::path(o->out_dir) / (doc_id + ".rsd")).string(),
                 write_rsd(to_dependencies(pred)));
    }
  });
}

struct ExperimentOpts {
  std::vector<std::string> configs;
  std::string runs_dir;
  int jobs = 1;
  bool verbose = false, lenient = false;
  // builders
  std::string root, manifest, key = "gum", genre, out = ".";
  bool with_baseline = false;
  std::vector<std::string> growing = {"conversation", "speech", "textbook", "vlog"};
  std::vector<std::string> cohorts;
  int target_edus = 0, tolerance = 0;
};

CohortSpec parse_cohort_arg(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0)
    throw CLI::ValidationError("--cohort wants NAME:genre=count[,genre=count...]");
  CohortSpec spec;
  spec.name = s.substr(0, colon);
  for (const auto& part : split_char(s.substr(colon + 1), ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("bad cohort row \"" + part + "\"");
    CohortGenre row;
    row.genre = part.substr(0, eq);
    try {
      row.docs = std::stoi(part.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad cohort count in \"" + part + "\"");
    }
    spec.rows.push_back(std::move(row));
  }
  if (spec.rows.empty()) throw CLI::ValidationError("cohort \"" + spec.name + "\" has no rows");
  return spec;
}

void write_config_file(const ExperimentConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / (cfg.name + ".cfg")).string();
  write_file(path, write_experiment_config(cfg));
  std::cout << path << '\n';
}

void add_experiment(CLI::App& app, std::shared_ptr<ExperimentOpts> o) {
  auto* cmd = app.add_subcommand("experiment", "Run or generate experiment configurations");
  cmd->require_subcommand(1);

  auto* run_cmd = cmd->add_subcommand("run", "Run experiment config files in order");
  run_cmd->add_option("configs", o->configs, "experiment .cfg files")->required();
  run_cmd->add_option("--runs-dir", o->runs_dir, "override each config's out_dir");
  run_cmd->add_option("--jobs", o->jobs, "concurrent runs per experiment");
  run_cmd->add_flag("--verbose", o->verbose, "log per-epoch dev scores");
  run_cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  run_cmd->callback([o] {
    std::map<std::string, ScoreReport> reports;
    std::map<std::string, Corpus> corpora;  // cache across configs, keyed by root|manifest
    for (const auto& path : o->configs) {
      ExperimentConfig cfg = load_experiment_config(path);
      if (!o->runs_dir.empty()) cfg.out_dir = o->runs_dir;
      CorpusRegistry registry;
      for (const auto& [key, paths] : cfg.corpora) {
        const std::string cache_key = paths.root + "|" + paths.manifest;
        auto it = corpora.find(cache_key);
        if (it == corpora.end()) {
          std::vector<std::string> warnings;
          it = corpora
                   .emplace(cache_key,
                            load_corpus(paths.root, paths.manifest, {o->lenient, 1, &warnings}))
                   .first;
          print_warnings(warnings);
        }
        registry[key] = &it->second;
      }
      RunOptions ropts;
      ropts.jobs = o->jobs;
      ropts.quiet = !o->verbose;
      ScoreReport report = run_experiment(cfg, registry, ropts);
      std::cout << report_csv(report);
      if (!cfg.baseline.empty() && reports.count(cfg.baseline)) {
        auto rows = degradation(reports.at(cfg.baseline), report);
        const std::string csv = degradation_csv(rows);
        std::cout << csv;
        if (!cfg.out_dir.empty())
          write_file((fs::path(cfg.out_dir) / cfg.name / "degradation.csv").string(), csv);
      }
      reports[report.name] = std::move(report);
    }
  });

  auto add_corpus_opts = [&o](CLI::App* c) {
    c->add_option("--root", o->root, "directory holding the rs3 files")->required();
    c->add_option("--manifest", o->manifest, "doc_id/partition/genre manifest")->required();
    c->add_option("--key", o->key, "corpus key used in the generated config");
    c->add_option("-o,--out", o->out, "directory for the generated .cfg files");
    c->add_option("--runs-dir", o->runs_dir, "out_dir recorded in the configs");
    c->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  };
  auto load_for_build = [o] {
    std::vector<std::string> warnings;
    Corpus corpus = load_corpus(o->root, o->manifest, {o->lenient, 1, &warnings});
    print_warnings(warnings);
    return corpus;
  };
  auto stamp = [o](ExperimentConfig& cfg) {
    cfg.out_dir = o->runs_dir;
    cfg.corpora[o->key] = {o->root, o->manifest};
  };

  auto* ova_cmd = cmd->add_subcommand("build-ova", "Hold one genre out of training");
  add_corpus_opts(ova_cmd);
  ova_cmd->add_option("--genre", o->genre, "held-out genre")->required();
  ova_cmd->add_flag("--with-baseline", o->with_baseline,
                    "also emit the in-domain reference config");
  ova_cmd->callback([o] {
    std::vector<std::string> warnings;
    Corpus corpus = load_corpus(o->root, o->manifest, {o->lenient, 1, &warnings});
    print_warnings(warnings);
    ExperimentConfig cfg = build_ova(corpus, o->key, o->genre);
    cfg.out_dir = o->runs_dir;
    cfg.corpora[o->key] = {o->root, o->manifest};
    write_config_file(cfg, o->out);
    if (o->with_baseline) {
      ExperimentConfig base = build_baseline(corpus, o->key, o->genre);
      base.out_dir = o->runs_dir;
      base.corpora[o->key] = {o->root, o->manifest};
      write_config_file(base, o->out);
    }
  });

  auto* large_cmd = cmd->add_subcommand("build-all-large", "Train on every non-growing genre");
  add_corpus_opts(large_cmd);
  large_cmd->add_option("--growing", o->growing, "growing genres used as test targets");
  large_cmd->callback([o, load_for_build, stamp] {
    Corpus corpus = load_for_build();
    std::vector<std::string> warnings;
    ExperimentConfig cfg = build_all_large(corpus, o->key, o->growing, &warnings);
    print_warnings(warnings);
    stamp(cfg);
    write_config_file(cfg, o->out);
  });

  auto* cohort_cmd = cmd->add_subcommand("build-cohorts", "Equal-budget genre cohorts");
  add_corpus_opts(cohort_cmd);
  cohort_cmd->add_option("--cohort", o->cohorts, "NAME:genre=count[,genre=count...] (repeatable)")
      ->required();
  cohort_cmd->add_option("--target-edus", o->target_edus, "EDU budget each cohort aims for");
  cohort_cmd->add_option("--tolerance", o->tolerance, "largest allowed pairwise EDU difference");
  cohort_cmd->callback([o, load_for_build, stamp] {
    Corpus corpus = load_for_build();
    std::vector<CohortSpec> specs;
    for (const auto& s : o->cohorts) specs.push_back(parse_cohort_arg(s));
    CohortOptions copts{o->target_edus, o->tolerance};
    for (ExperimentConfig& cfg : build_fixed_cohorts(corpus, o->key, specs, copts)) {
      stamp(cfg);
      write_config_file(cfg, o->out);
    }
  });
}

struct AnalyzeOpts {
  std::string gold, pred, manifest, filter = "correct", collapse = "none", out;
  bool all_instances = false, left_branching = false, lenient = false;
};

ConfusionFilter filter_from(const std::string& name) {
  if (name == "all") return ConfusionFilter::all;
  if (name == "correct") return ConfusionFilter::correct_attachment_only;
  throw CLI::ValidationError("--filter must be all or correct");
}

std::vector<DepDocument> load_deps(const std::string& path,
                                   const std::map<std::string, std::string>& genres) {
  std::vector<DepDocument> out;
  for (const auto& f : collect(path, {".rsd"})) {
    DepDocument d = load_rsd(f.string());
    if (auto it = genres.find(d.doc_id); it != genres.end()) d.genre = it->second;
    out.push_back(std::move(d));
  }
  return out;
}

void add_analyze(CLI::App& app, std::shared_ptr<AnalyzeOpts> o) {
  auto* cmd = app.add_subcommand("analyze", "Error analysis over parallel gold/predicted files");
  cmd->require_subcommand(1);

  auto add_common = [&o](CLI::App* c, const char* what) {
    c->add_option("--gold", o->gold, std::string("gold ") + what + " file or directory")
        ->required();
    c->add_option("--pred", o->pred, std::string("predicted ") + what + " file or directory")
        ->required();
    c->add_option("-o,--out", o->out, "write CSV here instead of stdout");
  };
  auto paired_deps = [o] {
    auto genres = genre_map(o->manifest);
    std::vector<DepDocument> gold, pred;
    for (const auto& [g, p] : pair_by_stem(o->gold, o->pred, {".rsd"})) {
      DepDocument gd = load_rsd(g.string());
      DepDocument pd = load_rsd(p.string());
      if (auto it = genres.find(gd.doc_id); it != genres.end()) {
        gd.genre = it->second;
        pd.genre = it->second;
      }
      gold.push_back(std::move(gd));
      pred.push_back(std::move(pd));
    }
    return std::pair(std::move(gold), std::move(pred));
  };
  auto ptrs = [](const std::vector<DepDocument>& v) {
    std::vector<const DepDocument*> out;
    for (const auto& d : v) out.push_back(&d);
    return out;
  };

  auto* conf_cmd = cmd->add_subcommand("confusion", "Gold-by-predicted class matrix");
  add_common(conf_cmd, "rsd");
  conf_cmd->add_option("--filter", o->filter, "all or correct (attachments)")
      ->check(CLI::IsMember({"all", "correct"}));
  conf_cmd->add_option("--collapse", o->collapse, "label collapse before counting")
      ->check(CLI::IsMember({"none", "gum-classes", "rstdt-classes", "gum-to-rstdt"}));
  conf_cmd->callback([o, paired_deps, ptrs] {
    auto [gold, pred] = paired_deps();
    ConfusionMatrix m = confusion(ptrs(gold), ptrs(pred), filter_from(o->filter),
                                  make_relabel(o->collapse));
    emit(m.to_csv(), o->out);
  });

  auto* acc_cmd = cmd->add_subcommand("accuracy", "Per-class head+label accuracy");
  add_common(acc_cmd, "rsd");
  acc_cmd->add_option("--collapse", o->collapse, "label collapse before counting")
      ->check(CLI::IsMember({"none", "gum-classes", "rstdt-classes", "gum-to-rstdt"}));
  acc_cmd->callback([o, paired_deps, ptrs] {
    auto [gold, pred] = paired_deps();
    std::ostringstream out;
    out << "class,correct,total,accuracy\n";
    for (const auto& row : per_class_accuracy(ptrs(gold), ptrs(pred), make_relabel(o->collapse)))
      out << row.cls << ',' << row.correct << ',' << row.total << ',' << std::fixed
          << std::setprecision(3) << row.accuracy << '\n';
    emit(out.str(), o->out);
  });

  auto* res_cmd = cmd->add_subcommand("residuals", "Chi-square residuals of errors by genre");
  add_common(res_cmd, "rsd");
  res_cmd->add_option("--manifest", o->manifest, "manifest supplying genres")->required();
  res_cmd->add_option("--filter", o->filter, "all or correct (attachments)")
      ->check(CLI::IsMember({"all", "correct"}));
  res_cmd->add_option("--collapse", o->collapse, "label collapse before counting")
      ->check(CLI::IsMember({"none", "gum-classes", "rstdt-classes", "gum-to-rstdt"}));
  res_cmd->add_flag("--all-instances", o->all_instances,
                    "count all instances, not just misclassified ones");
  res_cmd->preparse_callback([o](std::size_t) { o->filter = "all"; });
  res_cmd->callback([o, paired_deps, ptrs] {
    auto [gold, pred] = paired_deps();
    auto table = error_table(ptrs(gold), ptrs(pred), filter_from(o->filter), !o->all_instances,
                             make_relabel(o->collapse));
    emit(chi2_residuals(table).to_csv(), o->out);
  });

  auto* cdu_cmd = cmd->add_subcommand("cdu", "Fraction of documents with the right root EDU");
  add_common(cdu_cmd, "rsd");
  cdu_cmd->callback([o, paired_deps, ptrs] {
    auto [gold, pred] = paired_deps();
    std::ostringstream out;
    out << "cdu_accuracy\t" << std::fixed << std::setprecision(3)
        << cdu_accuracy(ptrs(gold), ptrs(pred)) << '\n';
    emit(out.str(), o->out);
  });

  auto* br_cmd = cmd->add_subcommand("branching", "Span F1 per nuclearity category");
  add_common(br_cmd, "rs3");
  br_cmd->add_flag("--left-branching", o->left_branching,
                   "binarize multinuclear chains leftward");
  br_cmd->add_flag("--lenient", o->lenient, "drop unused empty segments with a warning");
  br_cmd->callback([o] {
    BinarizeOptions bopts{o->left_branching};
    std::vector<BinaryTree> gold, pred;
    for (const auto& [g, p] : pair_by_stem(o->gold, o->pred, {".rs3"})) {
      std::vector<std::string> warnings;
      gold.push_back(binarize(load_rs3(g.string(), {o->lenient, &warnings}), bopts));
      pred.push_back(binarize(load_rs3(p.string(), {o->lenient, &warnings}), bopts));
      print_warnings(warnings);
    }
    std::vector<const BinaryTree*> gp, pp;
    for (const auto& t : gold) gp.push_back(&t);
    for (const auto& t : pred) pp.push_back(&t);
    std::ostringstream out;
    out << "category,gold_units,pred_units,matched,f1\n";
    for (const auto& row : branching_report(gp, pp))
      out << category_name(row.cat) << ',' << row.gold_units << ',' << row.pred_units << ','
          << row.matched << ',' << fmt2(row.f1) << '\n';
    emit(out.str(), o->out);
  });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"RST constituent and dependency parsing workbench"};
  app.require_subcommand(1);

  auto convert_opts = std::make_shared<ConvertOpts>();
  auto depconvert_opts = std::make_shared<DepconvertOpts>();
  auto score_opts = std::make_shared<ScoreOpts>();
  auto seg_opts = std::make_shared<SegScoreOpts>();
  auto stats_opts = std::make_shared<StatsOpts>();
  auto map_opts = std::make_shared<MapOpts>();
  auto train_opts = std::make_shared<TrainOpts>();
  auto parse_opts = std::make_shared<ParseOpts>();
  auto experiment_opts = std::make_shared<ExperimentOpts>();
  auto analyze_opts = std::make_shared<AnalyzeOpts>();

  add_convert(app, convert_opts);
  add_depconvert(app, depconvert_opts);
  add_score(app, score_opts);
  add_seg_score(app, seg_opts);
  add_stats(app, stats_opts);
  add_map(app, map_opts);
  add_train(app, train_opts);
  add_parse(app, parse_opts);
  add_experiment(app, experiment_opts);
  add_analyze(app, analyze_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rstlab
