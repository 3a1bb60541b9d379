#include "cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "diffhash/dataset.hpp"
#include "diffhash/error.hpp"
#include "diffhash/eval.hpp"
#include "diffhash/hashcodec.hpp"
#include "diffhash/model_io.hpp"
#include "diffhash/train_kernel.hpp"
#include "diffhash/train_linear.hpp"
#include "json.hpp"

namespace diffhash::cli {

using Json = nlohmann::ordered_json;

namespace {

/// Rethrows InputError with the offending flag prefixed.
template <typename F>
auto for_flag(const std::string& flag, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(flag + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text, const std::string& flag) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(flag + ": cannot write " + path);
  out << text;
}

// Reproducible-builds convention: SOURCE_DATE_EPOCH if set, else the epoch, so
// identical invocations produce identical model files.
std::string creation_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json bits_json(const TrainReport& report) {
  Json bits = Json::array();
  for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
    const ThresholdChoice& c = report.thresholds[k];
    bits.push_back(Json{{"bit", k},
                        {"eigenvalue", report.eigenvalues[k]},
                        {"threshold", c.threshold},
                        {"fnr", c.fnr},
                        {"fpr", c.fpr},
                        {"objective", c.objective}});
  }
  return bits;
}

struct TrainArgs {
  std::string mode;
  std::string desc, pos, neg, out;
  std::size_t m = 0;
  double alpha = 25.0;
  std::size_t l = 256;
  std::string kernel = "gaussian-mahalanobis";
  double gamma = 1.0;
  std::string exponent_mode = "half";
  std::uint64_t seed = 0;
  bool center = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const DescriptorSet data = for_flag("--desc", [&] { return load_descriptors(a.desc); });
  const PairSet pos = for_flag("--pos", [&] { return load_pairs(a.pos, PairLabel::positive, data.size()); });
  const PairSet neg = for_flag("--neg", [&] { return load_pairs(a.neg, PairLabel::negative, data.size()); });
  if (pos.empty()) throw InputError("--pos: no positive pairs");
  if (neg.empty()) throw InputError("--neg: no negative pairs");
  if (!(a.alpha > 0.0)) throw InputError("--alpha: must be > 0");

  ModelFile file;
  file.provenance.created_at = creation_timestamp();
  for (const auto& [role, path] : {std::pair{"desc", a.desc}, std::pair{"pos", a.pos}, std::pair{"neg", a.neg}}) {
    file.provenance.inputs.push_back({role, path, sha256_file(path)});
  }

  Json summary;
  summary["type"] = a.mode;
  if (a.mode == "linear") {
    if (a.m > data.dim()) {
      throw InputError("--m: linear diff-hash requires m <= n (m=" + std::to_string(a.m) +
                       ", n=" + std::to_string(data.dim()) + ")");
    }
    const auto trained = for_flag("--m", [&] { return train_diff_hash(pos, neg, data, {a.m, a.alpha, a.center}); });
    file.model = trained.model;
    summary["m"] = trained.model.m;
    summary["n"] = trained.model.n;
    summary["alpha"] = a.alpha;
    summary["bits"] = bits_json(trained.report);
  } else {
    if (a.center) throw InputError("--center: only applies to --mode linear");
    if (a.m > a.l) {
      throw InputError("--m: kernelized diff-hash requires m <= l (m=" + std::to_string(a.m) + ", l=" +
                       std::to_string(a.l) + ")");
    }
    KernelTrainOptions opt;
    opt.m = a.m;
    opt.l = a.l;
    opt.alpha = a.alpha;
    opt.kind = parse_kernel_kind(a.kernel);
    opt.gamma = a.gamma;
    opt.exponent_mode = parse_exponent_mode(a.exponent_mode);
    opt.seed = a.seed;
    const auto trained = for_flag("--l", [&] { return train_kdiff_hash(pos, neg, data, opt); });
    file.model = trained.model;
    summary["m"] = trained.model.m;
    summary["n"] = trained.model.n;
    summary["l"] = trained.model.l;
    summary["alpha"] = a.alpha;
    summary["kernel"] = a.kernel;
    summary["seed"] = a.seed;
    summary["bits"] = bits_json(trained.report);
  }
  for_flag("--out", [&] { save_model(file, a.out); });
  summary["model"] = a.out;
  out << summary.dump(2) << "\n";
  return kExitOk;
}

struct EncodeArgs {
  std::string model, desc, out;
};

int cmd_encode(const EncodeArgs& a, std::ostream&) {
  const ModelFile file = for_flag("--model", [&] { return load_model(a.model); });
  const DescriptorSet data = for_flag("--desc", [&] { return load_descriptors(a.desc); });
  if (data.dim() != model_dim(file.model)) {
    throw InputError("--desc: descriptor dimension " + std::to_string(data.dim()) +
                     " does not match model dimension " + std::to_string(model_dim(file.model)));
  }
  const CodeSet codes = encode_all(file.model, data);
  for_flag("--out", [&] { save_codes(codes, a.out); });
  return kExitOk;
}

struct MatchArgs {
  std::string db, query;
  std::size_t k = 5;
};

int cmd_match(const MatchArgs& a, std::ostream& out) {
  const CodeSet db = for_flag("--db", [&] { return load_codes(a.db); });
  const CodeSet query = for_flag("--query", [&] { return load_codes(a.query); });
  if (db.bits() != query.bits()) {
    throw InputError("--query: code length " + std::to_string(query.bits()) + " differs from database length " +
                     std::to_string(db.bits()));
  }
  if (a.k > db.size()) {
    throw InputError("--k: " + std::to_string(a.k) + " exceeds database size " + std::to_string(db.size()));
  }
  std::ostringstream report;
  for (std::size_t q = 0; q < query.size(); ++q) {
    report << q << ":";
    for (const Match& match : knn(query.at(q), db, a.k)) report << " (" << match.index << "," << match.distance << ")";
    report << "\n";
  }
  out << report.str();
  return kExitOk;
}

struct EvalArgs {
  std::string model, desc, pos, neg, roc_out;
  std::vector<double> fpr{0.001, 0.0001};
  bool baseline = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const ModelFile file = for_flag("--model", [&] { return load_model(a.model); });
  const DescriptorSet data = for_flag("--desc", [&] { return load_descriptors(a.desc); });
  const PairSet pos = for_flag("--pos", [&] { return load_pairs(a.pos, PairLabel::positive, data.size()); });
  const PairSet neg = for_flag("--neg", [&] { return load_pairs(a.neg, PairLabel::negative, data.size()); });
  if (pos.empty()) throw InputError("--pos: no positive pairs");
  if (neg.empty()) throw InputError("--neg: no negative pairs");
  if (data.dim() != model_dim(file.model)) {
    throw InputError("--desc: descriptor dimension " + std::to_string(data.dim()) +
                     " does not match model dimension " + std::to_string(model_dim(file.model)));
  }
  for (double t : a.fpr) {
    if (!(t > 0.0 && t < 1.0)) throw InputError("--fpr: targets must lie in (0, 1)");
  }

  const CodeSet codes = encode_all(file.model, data);
  const std::size_t m = model_bits(file.model);
  const RocCurve curve = roc(pair_distances(codes, pos), pair_distances(codes, neg), m);

  Json summary;
  Json warnings = Json::array();
  summary["m"] = m;
  summary["auc"] = auc(curve);
  Json ops = Json::array();
  for (double t : a.fpr) {
    const OperatingPoint op = operating_point(curve, t);
    ops.push_back(Json{{"target_fpr", t}, {"radius", op.radius ? Json(*op.radius) : Json()}, {"fnr", op.fnr}});
    if (!op.radius) {
      warnings.push_back("target FPR " + std::to_string(t) + " is below the FPR at radius 0; reporting FNR 1.0");
    }
  }
  summary["operating_points"] = std::move(ops);

  std::filesystem::path baseline_csv;
  if (a.baseline) {
    const ThresholdRoc base = euclidean_baseline(data, pos, neg);
    Json b;
    b["auc"] = auc(base);
    Json bops = Json::array();
    for (double t : a.fpr) {
      const ThresholdOperatingPoint op = operating_point(base, t);
      bops.push_back(
          Json{{"target_fpr", t}, {"threshold", op.threshold ? Json(*op.threshold) : Json()}, {"fnr", op.fnr}});
      if (!op.threshold) {
        warnings.push_back("euclidean baseline: target FPR " + std::to_string(t) +
                           " is below the smallest achievable FPR; reporting FNR 1.0");
      }
    }
    b["operating_points"] = std::move(bops);
    if (!a.roc_out.empty()) {
      baseline_csv = std::filesystem::path(a.roc_out);
      baseline_csv.replace_extension(".euclidean.csv");
      write_text(baseline_csv.string(), roc_csv(base), "--roc-out");
      b["roc_csv"] = baseline_csv.string();
    }
    summary["baseline_euclidean"] = std::move(b);
  }
  if (!a.roc_out.empty()) write_text(a.roc_out, roc_csv(curve), "--roc-out");
  summary["warnings"] = std::move(warnings);
  out << summary.dump(2) << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string preset = "gaussian-clusters";
  SynthConfig cfg;
  std::string out_desc, out_pos, out_neg;
};

int cmd_synth(SynthArgs a, std::ostream& out) {
  a.cfg.preset = a.preset == "rings" ? SynthPreset::rings : SynthPreset::gaussian_clusters;
  const SynthData data = gen_synthetic(a.cfg);
  for_flag("--out-desc", [&] { save_descriptors(data.descriptors, a.out_desc); });
  for_flag("--out-pos", [&] { save_pairs(data.positives, a.out_pos); });
  for_flag("--out-neg", [&] { save_pairs(data.negatives, a.out_neg); });
  out << Json{{"preset", a.preset},
              {"points", data.descriptors.size()},
              {"dim", data.descriptors.dim()},
              {"positives", data.positives.size()},
              {"negatives", data.negatives.size()},
              {"seed", a.cfg.seed}}
             .dump(2)
      << "\n";
  return kExitOk;
}

struct SplitArgs {
  std::string desc, pairs, out_train, out_test;
  double ratio = 0.8;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  const DescriptorSet data = for_flag("--desc", [&] { return load_descriptors(a.desc); });
  const PairSet pairs = for_flag("--pairs", [&] { return load_pairs(a.pairs, PairLabel::positive, data.size()); });
  const auto [train, test] = for_flag("--ratio", [&] { return split_pairs(pairs, a.ratio, a.seed); });
  for_flag("--out-train", [&] { save_pairs(train, a.out_train); });
  for_flag("--out-test", [&] { save_pairs(test, a.out_test); });
  out << Json{{"train", train.size()}, {"test", test.size()}}.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity-sensitive binary hashing with linear and kernelized diff-hash projections"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Learn a hash model from labeled pairs");
  t->add_option("--mode", train.mode, "linear or kernel")->required()->check(CLI::IsMember({"linear", "kernel"}));
  t->add_option("--desc", train.desc, "Descriptor file (DHD1 or CSV)")->required();
  t->add_option("--pos", train.pos, "Positive pair file")->required();
  t->add_option("--neg", train.neg, "Negative pair file")->required();
  t->add_option("--m", train.m, "Hash length in bits")->required()->check(CLI::PositiveNumber);
  t->add_option("--alpha", train.alpha, "FNR weight")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--l", train.l, "Kernel basis size")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--kernel", train.kernel, "Kernel")
      ->capture_default_str()
      ->check(CLI::IsMember({"linear", "gaussian-mahalanobis"}));
  t->add_option("--gamma", train.gamma, "Gaussian kernel scale")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--exponent-mode", train.exponent_mode, "half: Sigma^-1/2 metric, full: Sigma^-1")
      ->capture_default_str()
      ->check(CLI::IsMember({"half", "full"}));
  t->add_option("--seed", train.seed, "Basis selection seed")->capture_default_str();
  t->add_flag("--center", train.center, "Subtract the descriptor mean (linear mode)");
  t->add_option("--out", train.out, "Model output path")->required();

  EncodeArgs encode;
  auto* e = app.add_subcommand("encode", "Encode descriptors into a DHB1 code file");
  e->add_option("--model", encode.model)->required();
  e->add_option("--desc", encode.desc)->required();
  e->add_option("--out", encode.out)->required();

  MatchArgs match;
  auto* mt = app.add_subcommand("match", "Hamming k-nearest-neighbor ranking");
  mt->add_option("--db", match.db)->required();
  mt->add_option("--query", match.query)->required();
  mt->add_option("--k", match.k)->capture_default_str();

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "ROC and FNR at fixed FPR on labeled pairs");
  ev->add_option("--model", eval.model)->required();
  ev->add_option("--desc", eval.desc)->required();
  ev->add_option("--pos", eval.pos)->required();
  ev->add_option("--neg", eval.neg)->required();
  ev->add_option("--fpr", eval.fpr, "Comma-separated FPR targets")->delimiter(',')->capture_default_str();
  ev->add_option("--roc-out", eval.roc_out, "Write the per-radius ROC as CSV");
  ev->add_flag("--baseline-euclidean", eval.baseline, "Also evaluate raw Euclidean distances");

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Generate a synthetic descriptor set with labeled pairs");
  sy->add_option("--preset", synth.preset)->capture_default_str()->check(CLI::IsMember({"gaussian-clusters", "rings"}));
  sy->add_option("--points", synth.cfg.points)->capture_default_str();
  sy->add_option("--dim", synth.cfg.dim)->capture_default_str();
  sy->add_option("--noise", synth.cfg.noise)->capture_default_str();
  sy->add_option("--pos-pairs", synth.cfg.pos_pairs)->capture_default_str();
  sy->add_option("--neg-pairs", synth.cfg.neg_pairs)->capture_default_str();
  sy->add_option("--seed", synth.cfg.seed)->capture_default_str();
  sy->add_option("--out-desc", synth.out_desc, "Descriptor output (.csv for CSV, DHD1 otherwise)")->required();
  sy->add_option("--out-pos", synth.out_pos)->required();
  sy->add_option("--out-neg", synth.out_neg)->required();

  SplitArgs split;
  auto* sp = app.add_subcommand("split", "Split a pair file into disjoint train/test parts");
  sp->add_option("--desc", split.desc)->required();
  sp->add_option("--pairs", split.pairs)->required();
  sp->add_option("--ratio", split.ratio)->capture_default_str();
  sp->add_option("--seed", split.seed)->capture_default_str();
  sp->add_option("--out-train", split.out_train)->required();
  sp->add_option("--out-test", split.out_test)->required();

  std::vector<const char*> argv;
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex, out, err);
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  }

  try {
    if (t->parsed()) return cmd_train(train, out);
    if (e->parsed()) return cmd_encode(encode, out);
    if (mt->parsed()) return cmd_match(match, out);
    if (ev->parsed()) return cmd_eval(eval, out);
    if (sy->parsed()) return cmd_synth(synth, out);
    if (sp->parsed()) return cmd_split(split, out);
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ConvergenceError& ex) {
    err << "numerical failure: " << ex.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace diffhash::cli
