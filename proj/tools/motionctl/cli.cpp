#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "motion/baseline/baseline.hpp"
#include "motion/error.hpp"
#include "motion/model/gradient_suite.hpp"
#include "motion/model/inference.hpp"
#include "motion/model/macs.hpp"
#include "motion/numerics/checkpoint.hpp"
#include "motion/recommender/recommender.hpp"
#include "motion/retrieval/retrieval.hpp"
#include "motion/synth/dataset.hpp"
#include "motion/trainer/trainer.hpp"
#include "motion/util/binary_io.hpp"
#include "motion/video/clip_io.hpp"

namespace motion::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Raised while expanding --config; reported as a usage error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::string scalar_token(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  throw UsageError("unsupported config value " + v.dump());
}

// Pulls `--config <file>` out of the arguments and splices the file's keys in
// as flags placed before the user's own, skipping any flag given explicitly.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path) return rest;

  std::ifstream in(*config_path);
  if (!in) throw UsageError("cannot read config file " + *config_path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid JSON in " + *config_path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

  const auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (sub == rest.end()) throw UsageError("a subcommand is required");
  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = flag_name(key);
    if (flag_given(rest, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_array()) {
      injected.push_back(flag);
      for (const auto& v : value) injected.push_back(scalar_token(v));
    } else if (!value.is_null()) {
      injected.push_back(flag);
      injected.push_back(scalar_token(value));
    }
  }
  rest.insert(sub + 1, injected.begin(), injected.end());
  return rest;
}

bool is_baseline_checkpoint(const fs::path& path) {
  const auto tensors = nn::load_checkpoint(path);
  return !tensors.empty() && tensors.front().name.rfind("baseline.", 0) == 0;
}

// Writes a clip as MTC1 when the path ends in .mtc1, otherwise as a PNG sequence directory.
void write_clip(const video::Clip& clip, const fs::path& path) {
  if (path.extension() == ".mtc1") {
    video::save_clip(clip, path);
  } else {
    video::save_png_sequence(clip, path);
  }
}

std::vector<synth::LabeledClip> select_split(const synth::Dataset& data, const std::string& split) {
  if (split == "all") {
    std::vector<synth::LabeledClip> all;
    for (auto s : {synth::Split::Train, synth::Split::Val, synth::Split::Test}) {
      const auto& part = data.split(s);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  return data.split(*synth::parse_split(split));
}

json probs_json(const nn::Tensor& probs) {
  json j = json::object();
  for (auto t : kAllMotionTypes) j[std::string(to_string(t))] = probs[code(t)];
  return j;
}

struct SynthgenOpts {
  std::string out;
  synth::SynthConfig cfg;
  std::string background = "textured";
  std::vector<double> split = {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
  unsigned threads = 1;
};

struct TrainOpts {
  std::string data;
  std::string out;
  std::string metrics;
  std::string report;
  model::ModelConfig model;
  trainer::TrainConfig train;
  bool baseline = false;
  bool progress = false;
};

struct EvalOpts {
  std::string data;
  std::string model;
  std::string split = "test";
  std::string report;
};

struct ClassifyOpts {
  std::string clip;
  std::string model;
};

struct ExtractOpts {
  std::string data;
  std::vector<std::string> clips;
  std::string split = "test";
  std::string model;
  std::string out;
  unsigned threads = 1;
};

struct RetrieveOpts {
  std::string store;
  std::vector<std::string> queries;
  std::size_t k = 3;
  std::string metric = "l2";
  std::string out;
  bool accuracy = false;
};

struct RecommendOpts {
  std::string clip;
  std::string model;
  std::uint64_t seed = 0;
  std::size_t loop_count = recommender::kDefaultLoopCount;
  std::string out;
};

struct ApplyStyleOpts {
  std::string clip;
  std::string style;
  std::size_t loop_count = recommender::kDefaultLoopCount;
  std::string out;
};

struct MacsOpts {
  model::ModelConfig model;
};

struct GradcheckOpts {
  std::uint64_t seed = 7;
  double tolerance = 1e-5;
};

void add_model_flags(CLI::App* app, model::ModelConfig& m) {
  app->add_option("--segments", m.segments, "Temporal segments T")->check(CLI::PositiveNumber);
  app->add_option("--input-size", m.input_size, "Canonical input side S")->check(CLI::PositiveNumber);
  app->add_option("--channels", m.input_channels, "Input channels (1 or 3)")->check(CLI::IsMember({1, 3}));
  app->add_option("--shift-fraction", m.shift_fraction, "Channels shifted per direction")->check(CLI::Range(0.0, 0.5));
}

int cmd_synthgen(SynthgenOpts& o, std::ostream& out) {
  o.cfg.background = o.background == "plain" ? synth::Background::Plain : synth::Background::Textured;
  const synth::SplitFractions f{o.split[0], o.split[1], o.split[2]};
  const auto data = synth::gen_dataset(o.cfg, f, o.out, o.threads);
  json j;
  j["out"] = o.out;
  j["train"] = data.train.size();
  j["val"] = data.val.size();
  j["test"] = data.test.size();
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_train(TrainOpts& o, std::ostream& out, std::ostream& err) {
  const auto data = synth::load_dataset(o.data);
  json j;
  if (o.baseline) {
    baseline::BaselineConfig bc;
    bc.seed = o.train.seed;
    const auto model = baseline::train_baseline(std::span<const synth::LabeledClip>(data.train), bc);
    baseline::save_baseline(o.out, model);
    j["model"] = o.out;
    j["method"] = "baseline";
    if (!data.val.empty()) {
      std::vector<MotionType> labels, preds;
      for (const auto& lc : data.val) {
        labels.push_back(lc.label);
        preds.push_back(baseline::predict_baseline(lc.clip, model, bc).motion);
      }
      j["val_accuracy"] = trainer::summarize(labels, preds).accuracy;
    }
  } else {
    const auto result = trainer::train(o.model, data, o.train, [&](const trainer::EpochMetrics& e) {
      if (o.progress) {
        err << "epoch " << e.epoch << " lr " << e.lr << " loss " << e.train_loss << " train_acc " << e.train_acc
            << " val_acc " << e.val_acc << '\n';
      }
    });
    model::save_model(o.out, result.params, o.model);
    if (!o.metrics.empty()) trainer::write_metrics(result.metrics, o.metrics);
    if (!o.report.empty()) io::write_text_atomic(o.report, trainer::eval_json(result.metrics.best_val) + "\n");
    j["model"] = o.out;
    j["method"] = "tsm";
    j["best_epoch"] = result.metrics.best_epoch;
    j["val_accuracy"] = result.metrics.best_val.accuracy;
  }
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_eval(EvalOpts& o, std::ostream& out) {
  const auto data = synth::load_dataset(o.data);
  const auto clips = select_split(data, o.split);
  trainer::EvalResult r;
  if (is_baseline_checkpoint(o.model)) {
    const auto model = baseline::load_baseline(o.model);
    std::vector<MotionType> labels, preds;
    for (const auto& lc : clips) {
      labels.push_back(lc.label);
      preds.push_back(baseline::predict_baseline(lc.clip, model).motion);
    }
    r = trainer::summarize(labels, preds);
  } else {
    const auto m = model::load_model(o.model);
    r = trainer::evaluate(m.params, clips, m.config);
  }
  const std::string report = trainer::eval_json(r);
  if (!o.report.empty()) io::write_text_atomic(o.report, report + "\n");
  out << json::parse(report).dump() << '\n';
  return kExitOk;
}

int cmd_classify(ClassifyOpts& o, std::ostream& out) {
  const auto clip = video::load_clip(o.clip);
  json j;
  j["id"] = clip.id;
  if (is_baseline_checkpoint(o.model)) {
    const auto p = baseline::predict_baseline(clip, baseline::load_baseline(o.model));
    j["motion"] = std::string(to_string(p.motion));
    j["probs"] = probs_json(p.probs);
  } else {
    const auto m = model::load_model(o.model);
    const auto p = model::predict(clip, m.params, m.config);
    j["motion"] = std::string(to_string(p.motion));
    j["probs"] = probs_json(p.probs);
  }
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_extract(ExtractOpts& o, std::ostream& out, std::ostream& err) {
  const auto m = model::load_model(o.model);
  retrieval::ExtractResult result;
  if (!o.clips.empty()) {
    std::vector<video::Clip> clips;
    for (const auto& p : o.clips) clips.push_back(video::load_clip(p));
    result = retrieval::extract_features(clips, {}, m.params, m.config, o.threads);
  } else {
    const auto data = synth::load_dataset(o.data);
    result = retrieval::extract_features(select_split(data, o.split), m.params, m.config, o.threads);
  }
  for (const auto& f : result.failures) err << "skipped " << f.id << ": " << one_line(f.message) << '\n';
  retrieval::save_store(o.out, result.store);
  json j;
  j["out"] = o.out;
  j["records"] = result.store.size();
  j["dim"] = result.store.dim();
  j["skipped"] = result.failures.size();
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_retrieve(RetrieveOpts& o, std::ostream& out) {
  const auto store = retrieval::load_store(o.store);
  const auto metric = *retrieval::parse_metric(o.metric);
  if (o.accuracy) {
    json j;
    j["k"] = o.k;
    j["metric"] = std::string(retrieval::to_string(metric));
    j["retrieval_accuracy"] = retrieval::retrieval_accuracy(store, o.k, metric);
    out << j.dump() << '\n';
    return kExitOk;
  }
  std::vector<std::string> queries = o.queries;
  if (queries.empty()) {
    for (const auto& r : store.records()) queries.push_back(r.id);
  }
  std::string csv = retrieval::neighbors_csv_header();
  for (const auto& q : queries) {
    const auto* rec = store.find(q);
    if (!rec) throw ConfigError("query id '" + q + "' is not in the store");
    const auto nn = retrieval::knn(store, rec->vector, o.k, metric, rec->id);
    csv += retrieval::neighbors_csv_rows(q, nn);
  }
  if (o.out.empty()) {
    out << csv;
  } else {
    io::write_text_atomic(o.out, csv);
  }
  return kExitOk;
}

int cmd_recommend(RecommendOpts& o, std::ostream& out) {
  const auto clip = video::load_clip(o.clip);
  const auto m = model::load_model(o.model);
  const auto r = recommender::recommend_for_clip(clip, m.params, m.config, o.seed, o.loop_count);
  if (!o.out.empty()) write_clip(r.styled, o.out);
  json j;
  j["motion"] = std::string(to_string(r.motion));
  j["style"] = std::string(recommender::to_string(r.style));
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_apply_style(ApplyStyleOpts& o, std::ostream& out) {
  const auto clip = video::load_clip(o.clip);
  const auto style = *recommender::parse_style(o.style);
  const auto styled = recommender::apply_style(clip, style, o.loop_count);
  write_clip(styled, o.out);
  json j;
  j["style"] = std::string(recommender::to_string(style));
  j["frames"] = styled.frame_count;
  j["out"] = o.out;
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_macs(MacsOpts& o, std::ostream& out) {
  const auto report = model::count_macs(o.model);
  out << std::left << std::setw(22) << "layer" << std::right << std::setw(6) << "in" << std::setw(6) << "out"
      << std::setw(4) << "k" << std::setw(9) << "out_hw" << std::setw(14) << "macs/segment" << std::setw(14)
      << "macs" << '\n';
  for (const auto& l : report.layers) {
    std::ostringstream hw;
    hw << l.out_height << 'x' << l.out_width;
    out << std::left << std::setw(22) << l.name << std::right << std::setw(6) << l.in_features << std::setw(6)
        << l.out_features << std::setw(4) << l.kernel << std::setw(9) << hw.str() << std::setw(14)
        << (l.per_segment ? std::to_string(l.macs_once) : std::string("-")) << std::setw(14) << l.macs_total
        << '\n';
  }
  out << "segments " << o.model.segments << '\n'
      << "backbone " << report.backbone << '\n'
      << "head " << report.head << '\n'
      << "total " << report.total << '\n';

  model::ModelConfig one = o.model;
  one.segments = 1;
  const auto base = model::count_macs(one).backbone;
  const bool linear = report.backbone == o.model.segments * base;
  out << "linearity backbone(T)=" << report.backbone << " T*backbone(1)=" << o.model.segments * base << ' '
      << (linear ? "ok" : "FAIL") << '\n';
  return linear ? kExitOk : kExitRuntime;
}

int cmd_gradcheck(GradcheckOpts& o, std::ostream& out) {
  bool ok = true;
  for (const auto& e : model::run_gradient_suite(o.seed)) {
    const bool pass = e.max_rel_error <= o.tolerance;
    ok = ok && pass;
    out << std::left << std::setw(26) << e.name << std::scientific << std::setprecision(3) << e.max_rel_error
        << (pass ? " ok" : " FAIL") << '\n';
  }
  out << (ok ? "gradcheck passed" : "gradcheck FAILED") << '\n';
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  try {
    args = expand_config(std::move(args));
  } catch (const UsageError& e) {
    err << "usage error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  CLI::App app{"Motion-type classification, retrieval and playback-style tools", "motionctl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  app.footer("Every subcommand also accepts --config <file.json>; its keys mirror the flags and explicit flags win.");

  SynthgenOpts sg;
  auto* synthgen = app.add_subcommand("synthgen", "Generate the synthetic motion-clip corpus");
  synthgen->add_option("--out", sg.out, "Output directory")->required();
  synthgen->add_option("--clips-per-class", sg.cfg.clips_per_class)->check(CLI::PositiveNumber);
  synthgen->add_option("--height", sg.cfg.height)->check(CLI::PositiveNumber);
  synthgen->add_option("--width", sg.cfg.width)->check(CLI::PositiveNumber);
  synthgen->add_option("--frames", sg.cfg.frames)->check(CLI::PositiveNumber);
  synthgen->add_option("--radius", sg.cfg.sprite_radius)->check(CLI::PositiveNumber);
  synthgen->add_option("--background", sg.background)->check(CLI::IsMember({"plain", "textured"}));
  synthgen->add_option("--seed", sg.cfg.master_seed);
  synthgen->add_option("--split", sg.split, "Train, val and test fractions")->expected(3);
  synthgen->add_option("--threads", sg.threads)->check(CLI::PositiveNumber);

  TrainOpts tr;
  auto* train = app.add_subcommand("train", "Train the motion classifier (or the flow baseline)");
  train->add_option("--data", tr.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", tr.out, "Checkpoint path")->required();
  add_model_flags(train, tr.model);
  train->add_option("--epochs", tr.train.epochs)->check(CLI::PositiveNumber);
  train->add_option("--batch-size", tr.train.batch_size)->check(CLI::PositiveNumber);
  train->add_option("--lr", tr.train.base_lr)->check(CLI::PositiveNumber);
  train->add_option("--seed", tr.train.seed);
  train->add_option("--metrics", tr.metrics, "Per-epoch metrics CSV");
  train->add_option("--report", tr.report, "Validation report JSON");
  train->add_flag("--baseline", tr.baseline, "Train the optical-flow baseline instead");
  train->add_flag("--progress", tr.progress, "Print per-epoch progress to stderr");

  EvalOpts ev;
  auto* eval = app.add_subcommand("eval", "Top-1 accuracy and confusion matrix on a split");
  eval->add_option("--data", ev.data)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--model", ev.model)->required()->check(CLI::ExistingFile);
  eval->add_option("--split", ev.split)->check(CLI::IsMember({"train", "val", "test", "all"}));
  eval->add_option("--report", ev.report, "Write the JSON report here too");

  ClassifyOpts cl;
  auto* classify = app.add_subcommand("classify", "Predict the motion type of one clip");
  classify->add_option("--clip", cl.clip)->required()->check(CLI::ExistingPath);
  classify->add_option("--model", cl.model)->required()->check(CLI::ExistingFile);

  ExtractOpts ex;
  auto* extract = app.add_subcommand("extract-features", "Build a feature store of consensus vectors");
  auto* ex_data = extract->add_option("--data", ex.data)->check(CLI::ExistingDirectory);
  extract->add_option("--clips", ex.clips, "Clip files or frame directories")->check(CLI::ExistingPath)->excludes(ex_data);
  extract->add_option("--split", ex.split)->check(CLI::IsMember({"train", "val", "test", "all"}));
  extract->add_option("--model", ex.model)->required()->check(CLI::ExistingFile);
  extract->add_option("--out", ex.out, "Store path")->required();
  extract->add_option("--threads", ex.threads)->check(CLI::PositiveNumber);

  RetrieveOpts rt;
  auto* retrieve = app.add_subcommand("retrieve", "k-nearest-neighbour retrieval over a feature store");
  retrieve->add_option("--store", rt.store)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--query", rt.queries, "Query ids (default: every record)");
  retrieve->add_option("--k", rt.k)->check(CLI::PositiveNumber);
  retrieve->add_option("--metric", rt.metric)->check(CLI::IsMember({"l2", "cosine"}));
  retrieve->add_option("--out", rt.out, "CSV path (default: stdout)");
  retrieve->add_flag("--accuracy", rt.accuracy, "Print leave-one-out top-k label agreement instead");

  RecommendOpts rc;
  auto* recommend = app.add_subcommand("recommend", "Recommend a playback style for a clip");
  recommend->add_option("--clip", rc.clip)->required()->check(CLI::ExistingPath);
  recommend->add_option("--model", rc.model)->required()->check(CLI::ExistingFile);
  recommend->add_option("--seed", rc.seed);
  recommend->add_option("--loop-count", rc.loop_count)->check(CLI::Range(2, 1 << 20));
  recommend->add_option("--out", rc.out, "Write the styled clip (.mtc1 or PNG directory)");

  ApplyStyleOpts as;
  auto* apply = app.add_subcommand("apply-style", "Apply a playback style to a clip");
  apply->add_option("--clip", as.clip)->required()->check(CLI::ExistingPath);
  apply->add_option("--style", as.style)->required()->check(CLI::IsMember({"reverse", "loop", "boomerang"}, CLI::ignore_case));
  apply->add_option("--loop-count", as.loop_count)->check(CLI::Range(2, 1 << 20));
  apply->add_option("--out", as.out, "Output .mtc1 file or PNG directory")->required();

  MacsOpts mc;
  auto* macs = app.add_subcommand("macs", "Per-layer multiply-accumulate counts");
  add_model_flags(macs, mc.model);

  GradcheckOpts gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  gradcheck->add_option("--seed", gc.seed);
  gradcheck->add_option("--tolerance", gc.tolerance)->check(CLI::PositiveNumber);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synthgen->parsed()) return cmd_synthgen(sg, out);
    if (train->parsed()) return cmd_train(tr, out, err);
    if (eval->parsed()) return cmd_eval(ev, out);
    if (classify->parsed()) return cmd_classify(cl, out);
    if (extract->parsed()) {
      if (ex.data.empty() && ex.clips.empty()) {
        err << "usage error: extract-features needs --data or --clips\n";
        return kExitUsage;
      }
      return cmd_extract(ex, out, err);
    }
    if (retrieve->parsed()) return cmd_retrieve(rt, out);
    if (recommend->parsed()) return cmd_recommend(rc, out);
    if (apply->parsed()) return cmd_apply_style(as, out);
    if (macs->parsed()) return cmd_macs(mc, out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc, out);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: RuntimeError: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace motion::cli
