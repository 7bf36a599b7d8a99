/*
 * Copyright 2026 The ODT Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "odt/cli.h"

#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "odt/branch_and_bound.h"
#include "odt/dataset.h"
#include "odt/errors.h"
#include "odt/experiments.h"
#include "odt/milp_model.h"
#include "odt/oracle.h"
#include "odt/rational.h"
#include "odt/topology.h"
#include "odt/tree.h"

namespace odt {
namespace {

using nlohmann::json;

struct Options {
  std::string command;
  std::string data;
  std::string format = "auto";
  std::string label_col;
  std::optional<std::string> label_positive;
  std::vector<std::string> topology;
  bool no_strengthen = false;
  bool no_anchor = false;
  bool no_relax = false;
  bool keep_unused_c = false;
  bool forbid_trivial = false;
  std::string class_weight = "1";
  std::optional<std::string> min_specificity;
  std::optional<std::string> min_sensitivity;
  bool simple_branching = false;
  double time_limit = 1800.0;
  uint64_t seed = 1;
  std::string split = "protocol";
  std::string out;
  std::string emit = "table";
  std::string tree;
  std::vector<std::string> betas = {"0.95", "0.96", "0.97", "0.98", "0.99", "1"};
  double budget = 1e8;
  bool verbose = false;
};

std::string FormatName(const Options& o) {
  if (o.format != "auto") return o.format;
  const std::string& p = o.data;
  return p.size() >= 4 && p.compare(p.size() - 4, 4, ".csv") == 0 ? "csv" : "monks";
}

BuildConfig MakeBuildConfig(const Options& o) {
  BuildConfig c;
  c.strengthen = !o.no_strengthen;
  c.anchor = !o.no_anchor;
  c.relax_integrality = !o.no_relax;
  c.drop_unused_c = !o.keep_unused_c;
  c.forbid_trivial = o.forbid_trivial;
  c.class_weight = Rational::Parse(o.class_weight);
  if (o.min_specificity) {
    c.mode = BuildMode::kMaxSensitivity;
    c.min_rate = Rational::Parse(*o.min_specificity);
  } else if (o.min_sensitivity) {
    c.mode = BuildMode::kMaxSpecificity;
    c.min_rate = Rational::Parse(*o.min_sensitivity);
  }
  c.Validate();
  return c;
}

std::vector<TreeTopology> Topologies(const Options& o) {
  std::vector<TreeTopology> out;
  if (o.topology.empty()) {
    if (o.command == "cv") {
      for (const std::string& name : TreeTopology::PresetNames()) {
        out.push_back(TreeTopology::Preset(name));
      }
    } else {
      out.push_back(TreeTopology::Preset("depth2"));
    }
  }
  for (const std::string& spec : o.topology) out.push_back(TreeTopology::FromSpec(spec));
  return out;
}

// Everything needed to regenerate an artifact.
json ConfigEcho(const Options& o) {
  json j;
  j["command"] = o.command;
  j["data"] = o.data;
  j["format"] = FormatName(o);
  j["label_col"] = o.label_col;
  j["label_positive"] = o.label_positive ? json(*o.label_positive) : json(nullptr);
  j["simple_branching"] = o.simple_branching;
  j["split"] = o.split;
  j["seed"] = o.seed;
  json topologies = json::array();
  for (const TreeTopology& t : Topologies(o)) topologies.push_back(t.ToString());
  j["topology"] = topologies;
  j["build"] = MakeBuildConfig(o).ToJson();
  j["time_limit"] = o.time_limit;
  if (o.command == "sweep") j["betas"] = o.betas;
  if (o.command == "oracle") j["budget"] = o.budget;
  return j;
}

EncodedDataset LoadData(const Options& o) {
  LabelOptions label;
  label.column = o.label_col;
  label.positive = o.label_positive;
  EncodedDataset data = Encode(ReadTableFile(o.data, ParseTableFormat(FormatName(o)), label));
  return o.simple_branching ? BinarizeForSimpleBranching(data) : data;
}

// Training rows under the chosen split; `test` is empty for "all".
struct Partition {
  EncodedDataset train;
  EncodedDataset test;
};

Partition SplitData(const EncodedDataset& data, const Options& o) {
  if (o.split == "all") return {data, data.Subset(std::vector<int>{})};
  const int n = data.num_samples();
  if (n < 10) {
    throw Error(ErrorCode::kInvalidConfig,
                "the protocol split needs at least 10 samples; use --split all");
  }
  Rng rng(o.seed);
  const Split s = MakeSplit(n, TrainSize(n), rng);
  return {data.Subset(s.train), data.Subset(s.test)};
}

TrainOptions MakeTrainOptions(const Options& o, std::ostream& err) {
  TrainOptions t;
  t.build = MakeBuildConfig(o);
  t.solve.time_limit = o.time_limit;
  t.solve.seed = o.seed;
  if (o.verbose) {
    t.solve.progress = [&err](const std::string& line) { err << line << '\n'; };
  }
  t.solve.Validate();
  return t;
}

void Emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + o.out);
  f << text;
  if (!f) throw Error(ErrorCode::kIoError, "write failed for " + o.out);
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

void RequireEmit(const Options& o, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (o.emit == a) return;
  }
  throw CLI::ValidationError("--emit", o.emit + " is not available for " + o.command);
}

int Encode(const Options& o, std::ostream& out) {
  RequireEmit(o, {"table", "json"});
  const EncodedDataset data = LoadData(o);
  if (o.emit == "json") {
    json j;
    j["config"] = ConfigEcho(o);
    j["dataset"] = DatasetToJson(data);
    Emit(o, Dump(j), out);
    return kExitOk;
  }
  std::ostringstream s;
  s << "samples " << data.num_samples() << " (positive " << data.positive_indices().size()
    << ", negative " << data.negative_indices().size() << "), features "
    << data.num_features() << ", groups " << data.num_groups() << '\n';
  for (const FeatureGroup& g : data.schema().groups()) {
    s << "  " << g.column << ":";
    for (int j : g.features) s << ' ' << data.schema().feature(j).value;
    s << '\n';
  }
  Emit(o, s.str(), out);
  return kExitOk;
}

int Train(const Options& o, std::ostream& out, std::ostream& err) {
  RequireEmit(o, {"table", "json"});
  const std::vector<TreeTopology> topologies = Topologies(o);
  if (topologies.size() != 1) throw CLI::ValidationError("--topology", "train takes one topology");
  const EncodedDataset data = LoadData(o);
  const Partition part = SplitData(data, o);
  TrainResult result = TrainTree(part.train, topologies[0], MakeTrainOptions(o, err));
  const Metrics train_m = Evaluate(result.tree, part.train);
  const Metrics test_m = Evaluate(result.tree, part.test);
  const RunResult run{o.seed, part.train.num_samples(), part.test.num_samples(),
                      train_m, test_m, std::move(result)};
  if (o.emit == "json") {
    json j;
    j["config"] = ConfigEcho(o);
    j["run"] = RunResultToJson(run);
    Emit(o, Dump(j), out);
  } else {
    Emit(o, RunTable({run}) + "\n" + RenderTree(run.result.tree), out);
  }
  return run.result.flagged ? kExitTimeLimit : kExitOk;
}

int Export(const Options& o, std::ostream& out) {
  RequireEmit(o, {"table", "json", "mps", "lp"});
  const std::vector<TreeTopology> topologies = Topologies(o);
  if (topologies.size() != 1) throw CLI::ValidationError("--topology", "export takes one topology");
  const EncodedDataset data = LoadData(o);
  const MilpModel model = BuildModel(SplitData(data, o).train, topologies[0], MakeBuildConfig(o));
  if (o.emit == "mps") {
    Emit(o, ExportMps(model), out);
  } else if (o.emit == "lp") {
    Emit(o, ExportLp(model), out);
  } else {
    const ModelStats stats = ComputeModelStats(model);
    if (o.emit == "json") {
      json j;
      j["config"] = ConfigEcho(o);
      j["model"] = ModelStatsToJson(stats);
      Emit(o, Dump(j), out);
    } else {
      std::ostringstream s;
      s << "rows " << stats.rows << "\ncolumns " << stats.columns << "\ninteger_columns "
        << stats.integer_columns << "\nnonzeros " << stats.nonzeros << '\n';
      Emit(o, s.str(), out);
    }
  }
  return kExitOk;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot read " + path);
  const std::string text{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

// Re-derives data and split from the echo of a train artifact.
int Eval(const Options& cli, std::ostream& out) {
  RequireEmit(cli, {"table", "json"});
  if (cli.tree.empty()) throw CLI::RequiredError("--tree");
  const json artifact = ReadJsonFile(cli.tree);
  if (!artifact.contains("config") || !artifact.contains("run")) {
    throw Error(ErrorCode::kParseError, cli.tree + " is not a train artifact");
  }
  const json& echo = artifact["config"];
  Options o;
  o.command = "eval";
  o.data = cli.data.empty() ? echo.at("data").get<std::string>() : cli.data;
  o.format = echo.at("format").get<std::string>();
  o.label_col = echo.at("label_col").get<std::string>();
  if (!echo.at("label_positive").is_null()) {
    o.label_positive = echo["label_positive"].get<std::string>();
  }
  o.simple_branching = echo.at("simple_branching").get<bool>();
  o.split = echo.at("split").get<std::string>();
  o.seed = echo.at("seed").get<uint64_t>();

  const EncodedDataset data = LoadData(o);
  const Partition part = SplitData(data, o);
  const DecisionTree tree = TreeFromJson(artifact["run"]["tree"], data.schema_ptr());
  const Metrics train_m = Evaluate(tree, part.train);
  const Metrics test_m = Evaluate(tree, part.test);
  const Metrics all_m = Evaluate(tree, data);
  if (cli.emit == "json") {
    json j;
    j["config"] = {{"command", "eval"}, {"tree", cli.tree}, {"data", o.data},
                   {"split", o.split}, {"seed", o.seed}};
    j["train"] = MetricsToJson(train_m);
    j["test"] = MetricsToJson(test_m);
    j["all"] = MetricsToJson(all_m);
    Emit(cli, Dump(j), out);
    return kExitOk;
  }
  std::ostringstream s;
  auto line = [&s](const char* name, const Metrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-5s  n=%-5lld  acc=%.4f  tpr=%.4f  tnr=%.4f\n", name,
                  static_cast<long long>(m.total()), m.accuracy(), m.tpr(), m.tnr());
    s << buf;
  };
  line("train", train_m);
  line("test", test_m);
  line("all", all_m);
  Emit(cli, s.str(), out);
  return kExitOk;
}

int Cv(const Options& o, std::ostream& out, std::ostream& err) {
  RequireEmit(o, {"table", "json"});
  const EncodedDataset data = LoadData(o);
  const CvResult cv = CrossValidateTopology(data, Topologies(o), MakeTrainOptions(o, err), o.seed);
  if (o.emit == "json") {
    json j;
    j["config"] = ConfigEcho(o);
    j["cv"] = CvResultToJson(cv);
    Emit(o, Dump(j), out);
  } else {
    Emit(o, CvTable(cv) + "\n" + RenderTree(cv.final_run.result.tree), out);
  }
  return cv.final_run.result.flagged ? kExitTimeLimit : kExitOk;
}

int Oracle(const Options& o, std::ostream& out) {
  RequireEmit(o, {"table", "json"});
  const std::vector<TreeTopology> topologies = Topologies(o);
  if (topologies.size() != 1) throw CLI::ValidationError("--topology", "oracle takes one topology");
  const EncodedDataset data = LoadData(o);
  const EncodedDataset train = SplitData(data, o).train;
  const BuildConfig build = MakeBuildConfig(o);
  OracleOptions opt;
  opt.class_weight = build.class_weight;
  opt.mode = build.mode;
  opt.min_rate = build.min_rate;
  opt.budget = o.budget;
  const OracleResult r = EnumerateOptimal(train, topologies[0], opt);
  const Metrics m = Evaluate(r.tree, train);
  if (o.emit == "json") {
    json j;
    j["config"] = ConfigEcho(o);
    j["objective"] = r.objective;
    j["search_size"] = SearchSize(topologies[0], train.schema());
    j["train"] = MetricsToJson(m);
    j["tree"] = TreeToJson(r.tree);
    j["tree_text"] = RenderTree(r.tree);
    Emit(o, Dump(j), out);
  } else {
    std::ostringstream s;
    s << "objective " << r.objective << "\ntrain_acc " << m.accuracy() << "\n\n"
      << RenderTree(r.tree);
    Emit(o, s.str(), out);
  }
  return kExitOk;
}

int Sweep(const Options& o, std::ostream& out, std::ostream& err) {
  RequireEmit(o, {"table", "json"});
  const std::vector<TreeTopology> topologies = Topologies(o);
  if (topologies.size() != 1) throw CLI::ValidationError("--topology", "sweep takes one topology");
  std::vector<Rational> betas;
  for (const std::string& b : o.betas) betas.push_back(Rational::Parse(b));
  const EncodedDataset data = LoadData(o);
  const SweepResult sweep =
      SensitivitySweep(data, topologies[0], betas, MakeTrainOptions(o, err), o.seed);
  if (o.emit == "json") {
    json j;
    j["config"] = ConfigEcho(o);
    j["sweep"] = SweepResultToJson(sweep);
    Emit(o, Dump(j), out);
  } else {
    Emit(o, SweepTable(sweep), out);
  }
  for (const SweepRow& r : sweep.rows) {
    if (r.flagged) return kExitTimeLimit;
  }
  return kExitOk;
}

void AddCommon(CLI::App* app, Options& o) {
  app->add_option("--data", o.data, "Input table")->required();
  app->add_option("--format", o.format, "csv, monks or auto (by extension)")
      ->check(CLI::IsMember({"auto", "csv", "monks"}));
  app->add_option("--label-col", o.label_col, "Label column name or index");
  app->add_option("--label-positive", o.label_positive, "Label value mapped to +1");
  app->add_flag("--simple-branching", o.simple_branching, "Split on single features only");
  app->add_option("--seed", o.seed, "Split seed");
  app->add_option("--split", o.split, "protocol (seeded train/test) or all")
      ->check(CLI::IsMember({"protocol", "all"}));
  app->add_option("--out", o.out, "Output file (default stdout)");
  app->add_option("--emit", o.emit, "table, json, mps or lp")
      ->check(CLI::IsMember({"table", "json", "mps", "lp"}));
}

void AddModel(CLI::App* app, Options& o) {
  app->add_option("--topology", o.topology, "Preset name or parenthesised form");
  app->add_flag("--no-strengthen", o.no_strengthen, "Per-leaf routing rows");
  app->add_flag("--no-anchor", o.no_anchor, "Omit anchor rows");
  app->add_flag("--no-relax", o.no_relax, "Declare every column integer");
  app->add_flag("--keep-unused-c", o.keep_unused_c, "Keep C for wrong-label leaves");
  app->add_flag("--forbid-trivial", o.forbid_trivial, "Forbid empty and full subsets");
  auto* weight = app->add_option("--class-weight", o.class_weight, "Weight of negatives");
  auto* spec = app->add_option("--min-specificity", o.min_specificity,
                               "Maximise sensitivity with this specificity floor");
  auto* sens = app->add_option("--min-sensitivity", o.min_sensitivity,
                               "Maximise specificity with this sensitivity floor");
  spec->excludes(sens);
  weight->excludes(spec)->excludes(sens);
  app->add_option("--time-limit", o.time_limit, "Seconds per solve")->check(CLI::PositiveNumber);
  app->add_flag("--verbose", o.verbose, "Solver progress on stderr");
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Optimal categorical decision trees"};
  app.require_subcommand(1);
  struct Sub {
    const char* name;
    const char* help;
    bool model;
  };
  const Sub subs[] = {
      {"encode", "Encode a table and summarise its groups", false},
      {"train", "Train a tree by branch and bound", true},
      {"export", "Write the integer program", true},
      {"eval", "Evaluate a saved train artifact", false},
      {"cv", "Pick a topology by 4-fold cross validation", true},
      {"oracle", "Optimal tree by enumeration", true},
      {"sweep", "Sensitivity under specificity floors", true},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    if (std::string_view(s.name) == "eval") {
      sub->add_option("--tree", o.tree, "Artifact written by train --emit json")->required();
      sub->add_option("--data", o.data, "Input table (default: the path in the artifact)");
      sub->add_option("--out", o.out, "Output file (default stdout)");
      sub->add_option("--emit", o.emit, "table or json")->check(CLI::IsMember({"table", "json"}));
      continue;
    }
    AddCommon(sub, o);
    if (s.model) AddModel(sub, o);
    if (std::string_view(s.name) == "sweep") {
      sub->add_option("--betas", o.betas, "Specificity floors");
    }
    if (std::string_view(s.name) == "oracle") {
      sub->add_option("--budget", o.budget, "Largest enumeration size");
    }
  }

  try {
    app.parse(argc, argv);
    o.command = app.get_subcommands().front()->get_name();
    if (o.command == "encode") return Encode(o, out);
    if (o.command == "train") return Train(o, out, err);
    if (o.command == "export") return Export(o, out);
    if (o.command == "eval") return Eval(o, out);
    if (o.command == "cv") return Cv(o, out, err);
    if (o.command == "oracle") return Oracle(o, out);
    return Sweep(o, out, err);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace odt
