// Copyright 2026 The Pairrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pairrank command-line tool.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pairrank/dataio.h"
#include "pairrank/errors.h"
#include "pairrank/label_server.h"
#include "pairrank/label_service.h"
#include "pairrank/metrics.h"
#include "pairrank/simjudge.h"
#include "pairrank/text_format.h"
#include "pairrank/tournament.h"
#include "pairrank/training.h"

namespace pairrank {
namespace {

// Writes to `path`, or to stdout when it is empty or "-".
void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    WriteFile(path, text);
  }
}

std::string DashName(const std::string& key) {
  std::string out = key;
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

// --<config-key> flags, applied on top of --config.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "Training config file (key = value)");
    for (const std::string& key : ConfigKeys()) {
      app->add_option("--" + DashName(key), values[key],
                      "Config key '" + key + "' (overrides --config)");
    }
  }

  TrainConfig Resolve(CLI::App* app) const {
    TrainConfig config =
        config_path.empty() ? TrainConfig{} : ReadConfigFile(config_path);
    for (const std::string& key : ConfigKeys()) {
      if (app->count("--" + DashName(key)) > 0) {
        SetConfigValue(config, key, values.at(key));
      }
    }
    config.Validate();
    return config;
  }
};

std::vector<QueryItems> QueriesFrom(const std::string& manifest_path,
                                    const std::string& items_path,
                                    CampaignManifest* manifest) {
  if (!manifest_path.empty()) {
    *manifest = ReadManifestFile(manifest_path);
    return manifest->queries;
  }
  if (!items_path.empty()) return GroupByQuery(ReadItemsFile(items_path));
  throw ConfigError("either --manifest or --items is required");
}

std::vector<JudgmentRecord> LoadJudgments(const std::string& path) {
  JudgmentParse parsed = ReadJudgmentsFile(path);
  for (const std::string& w : parsed.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return std::move(parsed.records);
}

// --- sample-pairs ----------------------------------------------------------

struct SamplePairsArgs {
  std::string manifest;
  std::string items;
  std::string judgments;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int SamplePairs(const SamplePairsArgs& a) {
  CampaignManifest manifest;
  const std::vector<QueryItems> queries = QueriesFrom(a.manifest, a.items, &manifest);
  const int rounds = a.rounds.value_or(manifest.rounds);
  const std::uint64_t seed = a.seed.value_or(manifest.seed);
  const std::vector<JudgmentRecord> records =
      a.judgments.empty() ? std::vector<JudgmentRecord>{} : LoadJudgments(a.judgments);
  std::vector<PairSpec> pairs;
  for (const TournamentState& state : ReplayCampaign(queries, seed, rounds, records)) {
    pairs.insert(pairs.end(), state.pending().begin(), state.pending().end());
  }
  std::ostringstream out;
  WritePairs(out, pairs);
  Emit(a.out, out.str());
  return 0;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string world;
  std::size_t num_items = 50;
  std::size_t num_queries = 1;
  std::vector<double> gammas = {1, 1, 1, 1, 1, 1};
  std::size_t feature_dim = 8;
  double feature_noise = 0.01;
  int rounds = 2;
  int judges_per_pair = 5;
  std::uint64_t seed = 1;
  std::string items_out;
  std::string world_out;
  std::string out;
};

int Simulate(const SimulateArgs& a) {
  PlantedWorld world = [&] {
    if (!a.world.empty()) return ReadWorldFile(a.world);
    PlantSpec spec;
    spec.num_items = a.num_items;
    spec.num_queries = a.num_queries;
    spec.judge_gammas = a.gammas;
    spec.feature_dim = a.feature_dim;
    spec.feature_noise = a.feature_noise;
    spec.seed = a.seed;
    return PlantWorld(spec);
  }();
  const std::vector<JudgmentRecord> records =
      GenerateDataset(world, a.rounds, a.judges_per_pair, a.seed);
  if (!a.items_out.empty()) {
    std::ostringstream items;
    WriteItems(items, world.Features());
    WriteFile(a.items_out, items.str());
  }
  if (!a.world_out.empty()) {
    std::ostringstream w;
    WriteWorld(w, world);
    WriteFile(a.world_out, w.str());
  }
  std::ostringstream out;
  WriteJudgments(out, records);
  Emit(a.out, out.str());
  return 0;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string items;
  std::string judgments;
  std::string validation_items;
  std::string validation_judgments;
  std::string checkpoint;
  bool quiet = false;
};

int RunTrain(const TrainArgs& a, const TrainConfig& config) {
  Dataset train{ReadItemsFile(a.items), LoadJudgments(a.judgments)};
  std::optional<Dataset> validation;
  if (!a.validation_judgments.empty()) {
    validation = Dataset{
        a.validation_items.empty() ? train.items : ReadItemsFile(a.validation_items),
        LoadJudgments(a.validation_judgments)};
  }
  TrainOptions options;
  if (validation) options.validation = &*validation;
  if (!a.quiet) {
    options.on_epoch = [](const EpochReport& r) {
      std::cerr << "epoch " << r.epoch << " loss " << FormatDouble(r.train_loss);
      if (r.validation_accuracy) {
        std::cerr << " val_acc " << FormatDouble(*r.validation_accuracy);
      }
      std::cerr << "\n";
    };
  }
  const Checkpoint checkpoint = Train(train, config, options);
  Emit(a.checkpoint, SerializeCheckpoint(checkpoint));
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string items;
  std::string judgments;
  std::string metric;
  std::string scores;     // planted / reference scores (srcc)
  std::string predicted;  // score file to evaluate instead of a checkpoint
  std::optional<bool> majority_filter;
  std::string out;
};

std::vector<AbsoluteScoreRecord> ModelScores(const Checkpoint& ckpt,
                                             const ItemTable& items) {
  const std::vector<ScoreDistribution> scores = ScoreItems(ckpt.model, items);
  std::vector<AbsoluteScoreRecord> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({items.item_id(i), scores[i].mu});
  }
  return out;
}

int RunEval(const EvalArgs& a) {
  EvalReport report;
  report.metric = a.metric;
  std::optional<Checkpoint> ckpt;
  if (!a.checkpoint.empty()) {
    ckpt = ReadCheckpointFile(a.checkpoint);
    report.variant = VariantName(ckpt->model.variant);
    for (const std::string& key : ConfigKeys()) {
      report.config.emplace_back(key, GetConfigValue(ckpt->config, key));
    }
  }
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("--metric needs " + what);
  };
  const bool filter =
      a.majority_filter.value_or(ckpt ? ckpt->config.majority_filter : true);

  if (a.metric == "srcc") {
    need(!a.scores.empty(), "--scores");
    need(ckpt.has_value() || !a.predicted.empty(), "--checkpoint or --predicted");
    std::vector<AbsoluteScoreRecord> predicted;
    if (!a.predicted.empty()) {
      predicted = ReadScoresFile(a.predicted);
    } else {
      need(!a.items.empty(), "--items");
      predicted = ModelScores(*ckpt, ReadItemsFile(a.items));
    }
    std::map<std::string, double> truth;
    for (const AbsoluteScoreRecord& r : ReadScoresFile(a.scores)) truth[r.item_id] = r.score;
    std::vector<double> x;
    std::vector<double> y;
    for (const AbsoluteScoreRecord& r : predicted) {
      const auto it = truth.find(r.item_id);
      if (it == truth.end()) continue;
      x.push_back(it->second);
      y.push_back(r.score);
    }
    report.value = Srcc(x, y);
    report.items = x.size();
  } else if (a.metric == "majority-baseline") {
    need(!a.judgments.empty(), "--judgments");
    std::vector<PairCounts> table = AggregateCounts(LoadJudgments(a.judgments));
    if (filter) table = MajorityFilter(table);
    std::vector<int> labels;
    for (const PairCounts& p : table) labels.push_back(ArgmaxLabel(p.counts));
    const int majority = MajorityVoteBaseline(labels);
    const std::vector<int> constant(labels.size(), majority);
    report.value = BinaryAccuracy(constant, labels);
    report.pairs = labels.size();
  } else {
    need(ckpt.has_value(), "--checkpoint");
    need(!a.items.empty() && !a.judgments.empty(), "--items and --judgments");
    Dataset data{ReadItemsFile(a.items), LoadJudgments(a.judgments)};
    report.items = data.items.size();
    if (a.metric == "loss") {
      Model model = ckpt->model;
      const PreparedPairs prepared =
          PreparePairs(data.items, data.judgments, model, filter, false);
      report.value = EvaluateLoss(model, data.items.features(), prepared.observations);
      report.pairs = prepared.observations.size();
    } else {
      const PairPredictions p =
          PredictPairs(ckpt->model, data.items, data.judgments, filter);
      report.pairs = p.predicted.size();
      if (a.metric == "five-way") {
        need(ckpt->model.num_labels() == kNumFiveWayLabels, "a five-label model");
        report.value = FiveWayAccuracy(p.predicted, p.truth);
      } else if (a.metric == "binary-score") {
        report.value = BinaryAccuracyFromScores(p.mu_left_right, p.truth);
      } else {  // binary
        std::vector<int> predicted;
        std::vector<int> truth;
        const bool two_way = ckpt->model.num_labels() == 2;
        for (std::size_t i = 0; i < p.predicted.size(); ++i) {
          predicted.push_back(two_way ? p.predicted[i] : BinaryFromFiveWay(p.predicted[i]));
          truth.push_back(BinaryFromFiveWay(ArgmaxLabel(p.truth[i])));
        }
        report.value = BinaryAccuracy(predicted, truth);
      }
    }
  }
  std::ostringstream out;
  WriteEvalReport(out, report);
  std::cout << out.str();
  if (!a.out.empty()) WriteFile(a.out, out.str());
  return 0;
}

// --- rank ------------------------------------------------------------------

int RunRank(const std::string& checkpoint_path, const std::string& items_path,
            const std::string& out_path) {
  const Checkpoint ckpt = ReadCheckpointFile(checkpoint_path);
  const ItemTable items = ReadItemsFile(items_path);
  const std::vector<ScoreDistribution> scores = ScoreItems(ckpt.model, items);
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].mu != scores[b].mu) return scores[a].mu > scores[b].mu;
    return items.item_id(a) < items.item_id(b);
  });
  std::ostringstream out;
  out << "rank,item_id,mu,sigma\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    out << r + 1 << "," << items.item_id(i) << "," << FormatDouble(scores[i].mu)
        << "," << FormatDouble(scores[i].sigma) << "\n";
  }
  Emit(out_path, out.str());
  return 0;
}

// --- synth-pairs -----------------------------------------------------------

struct SynthArgs {
  std::string scores;
  std::size_t items_sample = 0;
  std::size_t partners = 20;
  std::uint64_t seed = 0;
  std::string query = "synth";
  std::string out;
};

int RunSynth(const SynthArgs& a) {
  const std::vector<BinaryPair> pairs =
      SynthesizePairs(ReadScoresFile(a.scores), a.items_sample, a.partners, a.seed);
  std::ostringstream out;
  WriteJudgments(out, BinaryPairsToJudgments(pairs, a.query));
  Emit(a.out, out.str());
  return 0;
}

// --- serve -----------------------------------------------------------------

std::atomic<bool> g_stop{false};

extern "C" void HandleSignal(int) { g_stop = true; }

struct ServeArgs {
  std::string manifest;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log_dir;
  std::string image_dir;
  std::string ui_dir;
  double timeout = 600.0;
  std::optional<std::uint64_t> seed;
  bool exit_after_start = false;
};

int RunServe(const ServeArgs& a) {
  LabelServiceOptions options;
  options.log_dir = a.log_dir;
  options.presentation_timeout = a.timeout;
  options.seed = a.seed;
  LabelService service(options);
  if (!a.manifest.empty()) service.EnsureCampaign(ReadManifestFile(a.manifest));

  LabelServer server(service, {a.image_dir, a.ui_dir});
  const int port = server.Bind(a.host, a.port);
  std::cerr << "listening on " << a.host << ":" << port << "\n";

  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  if (a.exit_after_start) g_stop = true;
  std::atomic<bool> finished{false};
  std::thread watcher([&] {
    while (!g_stop && !finished) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    // Stop() is a no-op until the accept loop runs, so repeat until it ends.
    while (!finished) {
      server.Stop();
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  });
  server.Run();
  finished = true;
  watcher.join();
  service.Flush();
  std::cerr << "stopped\n";
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"pairrank: pairwise ordinal ranking"};
  app.require_subcommand(1);

  SamplePairsArgs sp;
  CLI::App* sample = app.add_subcommand("sample-pairs", "Emit the next round's tournament pairs");
  sample->add_option("--manifest", sp.manifest, "Campaign manifest")->check(CLI::ExistingFile);
  sample->add_option("--items", sp.items, "Item file (queries taken from it)")->check(CLI::ExistingFile);
  sample->add_option("--judgments", sp.judgments, "Judgments of earlier rounds")->check(CLI::ExistingFile);
  sample->add_option("--rounds", sp.rounds, "Round limit (default: manifest)");
  sample->add_option("--seed", sp.seed, "Campaign seed (default: manifest)");
  sample->add_option("--out", sp.out, "Output pair file (default stdout)");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate judgments from a planted world");
  simulate->add_option("--world", sim.world, "World file (default: plant one)")->check(CLI::ExistingFile);
  simulate->add_option("--num-items", sim.num_items, "Planted items");
  simulate->add_option("--num-queries", sim.num_queries, "Planted queries");
  simulate->add_option("--gammas", sim.gammas, "Judge boundary scales")->delimiter(',');
  simulate->add_option("--feature-dim", sim.feature_dim, "Feature dimension");
  simulate->add_option("--feature-noise", sim.feature_noise, "Feature noise");
  simulate->add_option("--rounds", sim.rounds, "Tournament rounds");
  simulate->add_option("--judges-per-pair", sim.judges_per_pair, "Judges per pair");
  simulate->add_option("--seed", sim.seed, "World and campaign seed");
  simulate->add_option("--items-out", sim.items_out, "Write item features here");
  simulate->add_option("--world-out", sim.world_out, "Write the planted world here");
  simulate->add_option("--out", sim.out, "Output judgment file (default stdout)");

  TrainArgs tr;
  ConfigFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train a model");
  train->add_option("--items", tr.items, "Item file")->required()->check(CLI::ExistingFile);
  train->add_option("--judgments", tr.judgments, "Judgment file")->required()->check(CLI::ExistingFile);
  train->add_option("--validation-items", tr.validation_items, "Validation items")->check(CLI::ExistingFile);
  train->add_option("--validation-judgments", tr.validation_judgments,
                    "Validation judgments (enables early stopping)")->check(CLI::ExistingFile);
  train->add_option("--checkpoint,--out", tr.checkpoint, "Output checkpoint (default stdout)");
  train->add_flag("--quiet", tr.quiet, "No per-epoch log");
  train_flags.Register(train);

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model or score file");
  eval->add_option("--checkpoint", ev.checkpoint, "Checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--items", ev.items, "Item file")->check(CLI::ExistingFile);
  eval->add_option("--judgments", ev.judgments, "Judgment file")->check(CLI::ExistingFile);
  eval->add_option("--metric", ev.metric, "Metric")
      ->required()
      ->check(CLI::IsMember({"five-way", "binary", "binary-score", "srcc",
                             "majority-baseline", "loss"}));
  eval->add_option("--scores", ev.scores, "Reference scores (srcc)")->check(CLI::ExistingFile);
  eval->add_option("--predicted", ev.predicted, "Predicted scores (srcc)")->check(CLI::ExistingFile);
  eval->add_option("--majority-filter", ev.majority_filter, "Keep strict-majority pairs only");
  eval->add_option("--out", ev.out, "Also write the report here");

  std::string rank_ckpt, rank_items, rank_out;
  CLI::App* rank = app.add_subcommand("rank", "Rank items by predicted score");
  rank->add_option("--checkpoint", rank_ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  rank->add_option("--items", rank_items, "Item file")->required()->check(CLI::ExistingFile);
  rank->add_option("--out", rank_out, "Output file (default stdout)");

  SynthArgs sy;
  CLI::App* synth = app.add_subcommand("synth-pairs", "Binary pairs from absolute scores");
  synth->add_option("--scores", sy.scores, "Score file")->required()->check(CLI::ExistingFile);
  synth->add_option("--items-sample", sy.items_sample, "Anchor items (0 = all)");
  synth->add_option("--partners", sy.partners, "Partners per anchor");
  synth->add_option("--seed", sy.seed, "Sampling seed");
  synth->add_option("--query", sy.query, "Query id for the emitted records");
  synth->add_option("--out", sy.out, "Output judgment file (default stdout)");

  ServeArgs sv;
  CLI::App* serve = app.add_subcommand("serve", "Run the labeling service");
  serve->add_option("--manifest", sv.manifest, "Campaign manifest")->check(CLI::ExistingFile);
  serve->add_option("--host", sv.host, "Bind address");
  serve->add_option("--port", sv.port, "Port (0 = any)");
  serve->add_option("--log-dir", sv.log_dir, "Persistence directory");
  serve->add_option("--image-dir", sv.image_dir, "Directory of item images");
  serve->add_option("--ui-dir", sv.ui_dir, "Static UI directory");
  serve->add_option("--timeout", sv.timeout, "Presentation timeout, seconds");
  serve->add_option("--seed", sv.seed, "Seed for flips and tokens");
  serve->add_flag("--exit-after-start", sv.exit_after_start, "Shut down right after binding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sample) return SamplePairs(sp);
    if (*simulate) return Simulate(sim);
    if (*train) return RunTrain(tr, train_flags.Resolve(train));
    if (*eval) return RunEval(ev);
    if (*rank) return RunRank(rank_ckpt, rank_items, rank_out);
    if (*synth) return RunSynth(sy);
    if (*serve) return RunServe(sv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace pairrank

int main(int argc, char** argv) { return pairrank::Main(argc, argv); }
