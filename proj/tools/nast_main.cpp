// Copyright 2026 NAST Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nast/checkpoint.hpp"
#include "nast/eval.hpp"
#include "nast/presets.hpp"
#include "nast/tokenize.hpp"
#include "nast/train.hpp"
#include "nast/wav.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

// Every run drops exactly one manifest next to its primary outputs.
void write_run_manifest(const fs::path& path, const std::string& command, const json& config,
                        uint64_t seed, const std::vector<std::string>& artifacts,
                        Clock::time_point started) {
  json j;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["artifacts"] = artifacts;
  j["toolkit_version"] = nast::kVersion;
  j["duration_seconds"] = std::chrono::duration<double>(Clock::now() - started).count();
  std::ofstream out(path);
  if (!out) throw nast::IoError("cannot write run manifest: " + path.string());
  out << j.dump(2) << "\n";
}

// Flat key-value config file: `key = value`, '#' comments.
std::map<std::string, std::string> parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw nast::IoError("cannot open config file: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw nast::ValidationError("config line " + std::to_string(line_no) +
                                    ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw nast::ValidationError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

// "kind:lo:hi[:path]" items, comma-separated.
std::vector<nast::AugmentSpec> parse_augment_list(const std::string& text) {
  std::vector<nast::AugmentSpec> specs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    std::vector<std::string> parts;
    std::stringstream ps(item);
    std::string part;
    while (std::getline(ps, part, ':')) parts.push_back(part);
    nast::AugmentSpec spec;
    spec.kind = nast::augment_kind_from_name(parts[0]);
    if (parts.size() >= 2) spec.lo = spec.hi = std::stod(parts[1]);
    if (parts.size() >= 3) spec.hi = std::stod(parts[2]);
    if (parts.size() >= 4) spec.path = parts[3];
    spec.validate();
    specs.push_back(spec);
  }
  if (specs.empty()) throw nast::ConfigError("empty augmentation list: '" + text + "'");
  return specs;
}

void apply_config_kv(const std::map<std::string, std::string>& kv, nast::NastConfig* mc,
                     nast::TrainConfig* tc) {
  auto geti = [](const std::string& v) { return static_cast<int64_t>(std::stoll(v)); };
  auto getd = [](const std::string& v) { return std::stod(v); };
  auto getb = [](const std::string& v) { return v == "true" || v == "1" || v == "yes"; };
  for (const auto& [key, value] : kv) {
    if (key == "k") mc->k = geti(value);
    else if (key == "input_dim") mc->input_dim = geti(value);
    else if (key == "global_dim") mc->global_dim = geti(value);
    else if (key == "decoder_out_dim") mc->decoder_out_dim = geti(value);
    else if (key == "predictor_blocks") mc->predictor_blocks = geti(value);
    else if (key == "attention_heads") mc->attention_heads = geti(value);
    else if (key == "conv_kernel") mc->conv_kernel = geti(value);
    else if (key == "ffn_dim") mc->ffn_dim = geti(value);
    else if (key == "tau_start") mc->tau_start = getd(value);
    else if (key == "tau_end") mc->tau_end = getd(value);
    else if (key == "tau_decay_steps") mc->tau_decay_steps = geti(value);
    else if (key == "lambda1") mc->lambda1 = getd(value);
    else if (key == "lambda2") mc->lambda2 = getd(value);
    else if (key == "model_seed") mc->seed = static_cast<uint64_t>(geti(value));
    else if (key == "learning_rate") tc->learning_rate = getd(value);
    else if (key == "batch_size") tc->batch_size = geti(value);
    else if (key == "max_steps") tc->max_steps = geti(value);
    else if (key == "checkpoint_every") tc->checkpoint_every = geti(value);
    else if (key == "seed") tc->seed = static_cast<uint64_t>(geti(value));
    else if (key == "hard_gumbel") tc->hard_gumbel = getb(value);
    else if (key == "robust_frame_mean") tc->robust_frame_mean = getb(value);
    else if (key == "compose_augmentations") tc->compose_augmentations = getb(value);
    else if (key == "grad_clip_norm") tc->grad_clip_norm = getd(value);
    else if (key == "augment") tc->augment_specs = parse_augment_list(value);
    else throw nast::ConfigError("unknown config key: " + key);
  }
}

json probe_report_json(const nast::ProbeReport& r) {
  json j;
  j["representation"] = r.representation;
  j["accuracy"] = r.accuracy;
  j["num_speakers"] = r.num_speakers;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  if (r.degenerate_single_speaker) j["degenerate_single_speaker"] = true;
  return j;
}

json ued_report_json(const nast::UedReport& r) {
  json j;
  j["augmentation"] = r.augmentation;
  j["mean"] = r.mean;
  j["pooled"] = r.pooled;
  json per = json::array();
  for (const auto& e : r.per_utterance) per.push_back({{"id", e.id}, {"ued", e.ued}});
  j["per_utterance"] = per;
  return j;
}

// ------------------------- subcommands -------------------------

struct SynthArgs {
  std::string out;
  std::string preset;
  nast::SyntheticSpec spec;
  bool seed_given = false;
  uint64_t seed = 0;
};

int run_synth(const SynthArgs& args) {
  const auto started = Clock::now();
  nast::SyntheticSpec spec = args.spec;
  if (args.preset == "desk") spec = nast::preset_desk().synth;
  else if (!args.preset.empty()) throw nast::UsageError("unknown preset: " + args.preset);
  if (args.seed_given) spec.seed = args.seed;

  const fs::path out_dir(args.out);
  const fs::path manifest = nast::synthesize_corpus(spec, out_dir);
  std::cout << "corpus: " << manifest.string() << "\n";

  json config;
  config["num_utterances"] = spec.num_utterances;
  config["num_phonemes"] = spec.num_phonemes;
  config["num_speakers"] = spec.num_speakers;
  config["feature_dim"] = spec.feature_dim;
  config["mean_duration_frames"] = spec.mean_duration_frames;
  config["prototype_scale"] = spec.prototype_scale;
  config["noise_scale"] = spec.noise_scale;
  config["speaker_offset_scale"] = spec.speaker_offset_scale;
  if (!args.preset.empty()) config["preset"] = args.preset;
  write_run_manifest(out_dir / "run_manifest.json", "synth", config, spec.seed,
                     {manifest.string()}, started);
  return 0;
}

struct AugmentArgs {
  std::string kind;
  std::string in;
  std::string out;
  uint64_t seed = 0;
  double lo = 0.0, hi = 0.0;
  bool range_given = false;
  std::string noise_path;
  std::string rir_path;
};

int run_augment(const AugmentArgs& args) {
  const auto started = Clock::now();
  nast::AugmentSpec spec;
  spec.kind = nast::augment_kind_from_name(args.kind);
  switch (spec.kind) {
    case nast::AugmentKind::kTimeStretch:
      spec.lo = args.range_given ? args.lo : 0.8;
      spec.hi = args.range_given ? args.hi : 1.2;
      break;
    case nast::AugmentKind::kPitchShift:
      spec.lo = args.range_given ? args.lo : 4.0;
      spec.hi = args.range_given ? args.hi : spec.lo;
      break;
    case nast::AugmentKind::kNoise:
      spec.lo = args.range_given ? args.lo : 5.0;
      spec.hi = args.range_given ? args.hi : 15.0;
      spec.path = args.noise_path;
      if (spec.path.empty()) throw nast::UsageError("--noise is required for --kind noise");
      break;
    case nast::AugmentKind::kReverb:
      spec.path = args.rir_path;
      if (spec.path.empty()) throw nast::UsageError("--rir is required for --kind reverb");
      break;
    case nast::AugmentKind::kIdentity:
      break;
    default:
      throw nast::UsageError("kind '" + args.kind +
                             "' operates on features; `nast augment` processes wav files");
  }
  spec.validate();

  std::vector<fs::path> inputs;
  const fs::path in_path(args.in);
  if (fs::is_directory(in_path)) {
    for (const auto& e : fs::directory_iterator(in_path))
      if (e.path().extension() == ".wav") inputs.push_back(e.path());
    std::sort(inputs.begin(), inputs.end());
  } else {
    inputs.push_back(in_path);
  }
  if (inputs.empty()) throw nast::ValidationError("no .wav inputs under " + args.in);

  const fs::path out_dir(args.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  nast::Rng rng(args.seed);
  std::ofstream provenance(out_dir / "augment_manifest.jsonl");
  std::vector<std::string> artifacts;
  for (const auto& input : inputs) {
    nast::AugmentSpec concrete = spec;
    if (concrete.hi > concrete.lo) {
      const double v = rng.uniform(concrete.lo, concrete.hi);
      concrete.lo = concrete.hi = v;
    }
    const nast::Waveform w = nast::read_wav(input);
    const nast::Waveform augmented = nast::apply_waveform_augment(w, concrete, rng);
    const fs::path out_path = out_dir / input.filename();
    nast::write_wav(augmented, out_path);
    artifacts.push_back(out_path.string());

    json line;
    line["source"] = input.string();
    line["kind"] = nast::augment_kind_name(concrete.kind);
    line["params"] = {{"value", concrete.lo}};
    if (!concrete.path.empty()) line["params"]["path"] = concrete.path;
    line["seed"] = args.seed;
    provenance << line.dump() << "\n";
  }

  json config;
  config["kind"] = args.kind;
  config["in"] = args.in;
  write_run_manifest(out_dir / "run_manifest.json", "augment", config, args.seed, artifacts,
                     started);
  std::cout << "augmented " << inputs.size() << " file(s) into " << out_dir.string() << "\n";
  return 0;
}

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::string config_file;
  std::string preset;
  std::string resume;
  std::string aug_manifest;
  std::map<std::string, std::string> overrides;
};

int run_train(const TrainArgs& args) {
  const auto started = Clock::now();
  nast::NastConfig mc;
  nast::TrainConfig tc;
  if (args.preset == "desk") {
    const auto preset = nast::preset_desk();
    mc = preset.model;
    tc = preset.train;
  } else if (!args.preset.empty()) {
    throw nast::UsageError("unknown preset: " + args.preset);
  }
  if (!args.config_file.empty()) apply_config_kv(parse_config_file(args.config_file), &mc, &tc);
  apply_config_kv(args.overrides, &mc, &tc);
  mc.validate();
  tc.validate();

  const fs::path out_dir(args.out);
  const fs::path resume_path(args.resume);
  const fs::path aug_path(args.aug_manifest);
  const fs::path final_ckpt = nast::train_loop(
      mc, tc, fs::path(args.manifest), out_dir, args.resume.empty() ? nullptr : &resume_path,
      args.aug_manifest.empty() ? nullptr : &aug_path);
  std::cout << "final checkpoint: " << final_ckpt.string() << "\n";

  json config = json::parse(mc.to_json());
  config.update(json::parse(tc.to_json()));
  if (!args.preset.empty()) config["preset"] = args.preset;
  write_run_manifest(out_dir / "run_manifest.json", "train", config, tc.seed,
                     {final_ckpt.string(), (out_dir / "train_log.jsonl").string()}, started);
  return 0;
}

struct QuantizerArgs {
  std::string checkpoint;
  std::string kmeans;
};

// Holds whichever quantizer was named (exactly one must be).
struct LoadedQuantizer {
  std::unique_ptr<nast::NastModel> model;
  std::unique_ptr<nast::KMeansModel> km;
  std::unique_ptr<nast::Quantizer> quantizer;
};

LoadedQuantizer load_quantizer(const QuantizerArgs& args) {
  if (args.checkpoint.empty() == args.kmeans.empty())
    throw nast::UsageError("give exactly one of --checkpoint or --kmeans");
  LoadedQuantizer lq;
  if (!args.checkpoint.empty()) {
    nast::Trainer trainer = nast::Trainer::load_checkpoint(fs::path(args.checkpoint));
    lq.model = std::make_unique<nast::NastModel>(trainer.model());
    lq.quantizer = std::make_unique<nast::NastQuantizer>(*lq.model);
  } else {
    lq.km = std::make_unique<nast::KMeansModel>(nast::load_kmeans(fs::path(args.kmeans)));
    lq.quantizer = std::make_unique<nast::KMeansQuantizer>(*lq.km);
  }
  return lq;
}

int run_tokenize(const QuantizerArgs& qargs, const std::string& manifest, const std::string& out,
                 uint64_t seed) {
  const auto started = Clock::now();
  const LoadedQuantizer lq = load_quantizer(qargs);
  nast::tokenize_corpus(*lq.quantizer, fs::path(manifest), fs::path(out));
  std::cout << "units: " << out << "\n";
  json config;
  config["manifest"] = manifest;
  config["quantizer"] = qargs.checkpoint.empty() ? "kmeans" : "nast";
  write_run_manifest(fs::path(out + ".run.json"), "tokenize", config, seed, {out}, started);
  return 0;
}

struct KmeansArgs {
  bool fit = false;
  bool assign = false;
  std::string manifest;
  std::string model;
  std::string out;
  int64_t k = 8;
  int64_t max_iters = 100;
  uint64_t seed = 0;
};

int run_kmeans(const KmeansArgs& args) {
  const auto started = Clock::now();
  if (args.fit == args.assign) throw nast::UsageError("give exactly one of --fit or --assign");
  json config;
  config["manifest"] = args.manifest;
  if (args.fit) {
    const auto records = nast::load_manifest(fs::path(args.manifest), true);
    const nast::Mat frames =
        nast::stack_corpus_frames(records, fs::path(args.manifest).parent_path());
    const nast::KMeansModel model = nast::kmeans_fit(frames, args.k, args.seed, args.max_iters);
    nast::save_kmeans(model, fs::path(args.out));
    std::cout << "kmeans model: " << args.out << " (final inertia "
              << model.inertia_history.back() << ")\n";
    config["k"] = args.k;
    config["max_iters"] = args.max_iters;
    write_run_manifest(fs::path(args.out + ".run.json"), "kmeans", config, args.seed, {args.out},
                       started);
  } else {
    if (args.model.empty()) throw nast::UsageError("--assign needs --model");
    const nast::KMeansModel model = nast::load_kmeans(fs::path(args.model));
    const nast::KMeansQuantizer q(model);
    nast::tokenize_corpus(q, fs::path(args.manifest), fs::path(args.out));
    std::cout << "units: " << args.out << "\n";
    config["model"] = args.model;
    write_run_manifest(fs::path(args.out + ".run.json"), "kmeans", config, args.seed, {args.out},
                       started);
  }
  return 0;
}

struct EvalUedArgs {
  std::string units_clean;
  std::string units_aug;
  QuantizerArgs quantizer;
  std::string manifest;
  std::string augment = "feature_noise";
  double lo = 0.3, hi = 0.3;
  uint64_t seed = 0;
  std::string out;
};

int run_eval_ued(const EvalUedArgs& args) {
  const auto started = Clock::now();
  nast::UedReport report;
  json config;
  if (!args.units_clean.empty() || !args.units_aug.empty()) {
    if (args.units_clean.empty() || args.units_aug.empty())
      throw nast::UsageError("file mode needs both --units-clean and --units-aug");
    auto clean = nast::read_unit_file(fs::path(args.units_clean));
    auto aug = nast::read_unit_file(fs::path(args.units_aug));
    std::map<std::string, const nast::UnitSequence*> by_id;
    for (const auto& z : aug) by_id[z.utterance_id] = &z;
    std::vector<nast::UnitSequence> aug_ordered;
    for (const auto& z : clean) {
      auto it = by_id.find(z.utterance_id);
      if (it == by_id.end())
        throw nast::ValidationError("utterance '" + z.utterance_id + "' missing from " +
                                    args.units_aug);
      aug_ordered.push_back(*it->second);
    }
    report = nast::ued_from_units(clean, aug_ordered, "files");
    config["units_clean"] = args.units_clean;
    config["units_aug"] = args.units_aug;
  } else {
    if (args.manifest.empty())
      throw nast::UsageError("corpus mode needs --manifest plus --checkpoint or --kmeans");
    const LoadedQuantizer lq = load_quantizer(args.quantizer);
    nast::AugmentSpec spec;
    spec.kind = nast::augment_kind_from_name(args.augment);
    spec.lo = args.lo;
    spec.hi = args.hi;
    spec.validate();
    report = nast::ued_corpus(*lq.quantizer, fs::path(args.manifest), spec, args.seed);
    config["manifest"] = args.manifest;
    config["augment"] = args.augment;
    config["lo"] = args.lo;
    config["hi"] = args.hi;
  }

  char buf[64];
  std::cout << "augmentation   " << report.augmentation << "\n";
  std::cout << "utterances     " << report.per_utterance.size() << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", report.mean);
  std::cout << "mean UED       " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", report.pooled);
  std::cout << "pooled UED     " << buf << "\n";

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    out << ued_report_json(report).dump(2) << "\n";
    write_run_manifest(fs::path(args.out + ".run.json"), "eval-ued", config, args.seed,
                       {args.out}, started);
  }
  return 0;
}

struct ProbeArgs {
  QuantizerArgs quantizer;
  std::string manifest;
  std::string rep = "local";
  uint64_t seed = 0;
  std::string out;
};

int run_probe(const ProbeArgs& args) {
  const auto started = Clock::now();
  if (args.rep != "local" && args.rep != "global")
    throw nast::UsageError("--rep must be local or global");
  const auto records = nast::load_manifest(fs::path(args.manifest), true);
  const fs::path dir = fs::path(args.manifest).parent_path();

  const LoadedQuantizer lq = load_quantizer(args.quantizer);
  if (args.rep == "global" && lq.model == nullptr)
    throw nast::UsageError("--rep global needs --checkpoint (k-means has no global encoder)");

  std::vector<std::vector<double>> reps;
  std::vector<std::string> speakers;
  for (const auto& rec : records) {
    const nast::FeatureSequence seq = nast::load_record_features(rec, dir);
    if (args.rep == "local") {
      const nast::UnitSequence z = lq.quantizer->tokenize(seq);
      reps.push_back(nast::unit_histogram(z, lq.quantizer->unit_count()));
    } else {
      reps.push_back(lq.model->encode_global(seq).u);
    }
    speakers.push_back(rec.speaker_id);
  }

  const nast::ProbeReport report = nast::speaker_probe(reps, speakers, args.seed, args.rep);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", report.accuracy);
  std::cout << "representation " << report.representation << "\n"
            << "speakers       " << report.num_speakers << "\n"
            << "train/test     " << report.train_size << "/" << report.test_size << "\n"
            << "accuracy       " << buf << "\n";

  if (!args.out.empty()) {
    json config;
    config["manifest"] = args.manifest;
    config["rep"] = args.rep;
    std::ofstream out(args.out);
    out << probe_report_json(report).dump(2) << "\n";
    write_run_manifest(fs::path(args.out + ".run.json"), "probe", config, args.seed, {args.out},
                       started);
  }
  return 0;
}

struct SweepArgs {
  QuantizerArgs quantizer;
  std::string manifest;
  std::string levels = "0,0.25,0.5,0.75,1.0";
  uint64_t seed = 0;
  std::string out;
};

int run_sweep(const SweepArgs& args) {
  const auto started = Clock::now();
  std::vector<double> levels;
  std::stringstream ss(args.levels);
  std::string item;
  while (std::getline(ss, item, ',')) levels.push_back(std::stod(item));

  const LoadedQuantizer lq = load_quantizer(args.quantizer);
  const auto curve = nast::noise_sweep(*lq.quantizer, fs::path(args.manifest), levels, args.seed);

  std::cout << "level,mean_ued\n";
  for (const auto& pt : curve) std::cout << pt.level << "," << pt.metric << "\n";

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    out << "level,mean_ued\n";
    for (const auto& pt : curve) out << pt.level << "," << pt.metric << "\n";
    json config;
    config["manifest"] = args.manifest;
    config["levels"] = levels;
    write_run_manifest(fs::path(args.out + ".run.json"), "sweep", config, args.seed, {args.out},
                       started);
  }
  return 0;
}

struct StatsArgs {
  std::string units;
  int64_t k = 0;
  std::string out;
};

int run_stats(const StatsArgs& args) {
  const auto started = Clock::now();
  const auto seqs = nast::read_unit_file(fs::path(args.units));
  int64_t k = args.k;
  if (k == 0) {
    for (const auto& z : seqs)
      for (int u : z.units) k = std::max<int64_t>(k, u + 1);
  }
  if (k < 1) throw nast::ValidationError("empty unit file and no --k given");
  const nast::UsageStats stats = nast::unit_usage_stats(seqs, k);

  char buf[64];
  std::cout << "units          " << k << "\n"
            << "frames         " << stats.total << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", stats.entropy_nats);
  std::cout << "entropy (nats) " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", stats.normalized_entropy);
  std::cout << "normalized     " << buf << "\n";
  std::cout << "counts        ";
  for (int64_t c : stats.counts) std::cout << " " << c;
  std::cout << "\n";

  if (!args.out.empty()) {
    json j;
    j["k"] = k;
    j["total"] = stats.total;
    j["counts"] = stats.counts;
    j["entropy_nats"] = stats.entropy_nats;
    j["normalized_entropy"] = stats.normalized_entropy;
    std::ofstream out(args.out);
    out << j.dump(2) << "\n";
    json config;
    config["units"] = args.units;
    config["k"] = k;
    write_run_manifest(fs::path(args.out + ".run.json"), "stats", config, 0, {args.out}, started);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NAST: noise-aware speech tokenization toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic feature corpus");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--preset", synth.preset, "named preset (desk)");
  auto* synth_seed = synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--utterances", synth.spec.num_utterances);
  synth_cmd->add_option("--phonemes", synth.spec.num_phonemes);
  synth_cmd->add_option("--speakers", synth.spec.num_speakers);
  synth_cmd->add_option("--dim", synth.spec.feature_dim);
  synth_cmd->add_option("--mean-duration", synth.spec.mean_duration_frames);
  synth_cmd->add_option("--prototype-scale", synth.spec.prototype_scale);
  synth_cmd->add_option("--noise-scale", synth.spec.noise_scale);
  synth_cmd->add_option("--offset-scale", synth.spec.speaker_offset_scale);

  AugmentArgs augment;
  auto* augment_cmd = app.add_subcommand("augment", "apply a waveform augmentation to wav files");
  augment_cmd->add_option("--kind", augment.kind, "time_stretch|pitch_shift|noise|reverb|identity")
      ->required();
  augment_cmd->add_option("--in", augment.in, "input wav file or directory")->required();
  augment_cmd->add_option("--out", augment.out, "output directory")->required();
  augment_cmd->add_option("--seed", augment.seed, "random seed");
  auto* lo_opt = augment_cmd->add_option("--lo", augment.lo, "parameter range low");
  augment_cmd->add_option("--hi", augment.hi, "parameter range high");
  augment_cmd->add_option("--noise", augment.noise_path, "noise wav file or directory");
  augment_cmd->add_option("--rir", augment.rir_path, "impulse-response wav");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a tokenizer on a feature manifest");
  train_cmd->add_option("--manifest", train.manifest, "corpus manifest")->required();
  train_cmd->add_option("--out", train.out, "output directory")->required();
  train_cmd->add_option("--config", train.config_file, "flat key=value config file");
  train_cmd->add_option("--preset", train.preset, "named preset (desk)");
  train_cmd->add_option("--resume", train.resume, "checkpoint to resume from");
  train_cmd->add_option("--aug-manifest", train.aug_manifest,
                        "manifest of precomputed augmented features paired by id");
  const std::vector<std::pair<std::string, std::string>> train_flags = {
      {"--k", "k"}, {"--input-dim", "input_dim"}, {"--global-dim", "global_dim"},
      {"--lambda1", "lambda1"}, {"--lambda2", "lambda2"}, {"--lr", "learning_rate"},
      {"--batch-size", "batch_size"}, {"--max-steps", "max_steps"},
      {"--checkpoint-every", "checkpoint_every"}, {"--seed", "seed"},
      {"--model-seed", "model_seed"}, {"--augment", "augment"}, {"--tau-start", "tau_start"},
      {"--tau-end", "tau_end"}, {"--tau-decay-steps", "tau_decay_steps"}};
  for (const auto& [flag, key] : train_flags) {
    train_cmd->add_option_function<std::string>(
        flag, [&train, key = key](const std::string& v) { train.overrides[key] = v; });
  }

  QuantizerArgs tok_q;
  std::string tok_manifest, tok_out;
  uint64_t tok_seed = 0;
  auto* tok_cmd = app.add_subcommand("tokenize", "tokenize a corpus with a trained quantizer");
  tok_cmd->add_option("--checkpoint", tok_q.checkpoint, "nast checkpoint");
  tok_cmd->add_option("--kmeans", tok_q.kmeans, "kmeans model file");
  tok_cmd->add_option("--manifest", tok_manifest)->required();
  tok_cmd->add_option("--out", tok_out, "unit file to write")->required();
  tok_cmd->add_option("--seed", tok_seed);

  KmeansArgs km;
  auto* km_cmd = app.add_subcommand("kmeans", "fit or apply the k-means baseline");
  km_cmd->add_flag("--fit", km.fit);
  km_cmd->add_flag("--assign", km.assign);
  km_cmd->add_option("--manifest", km.manifest)->required();
  km_cmd->add_option("--model", km.model, "model file (for --assign)");
  km_cmd->add_option("--out", km.out)->required();
  km_cmd->add_option("--k", km.k);
  km_cmd->add_option("--max-iters", km.max_iters);
  km_cmd->add_option("--seed", km.seed);

  EvalUedArgs ued;
  auto* ued_cmd = app.add_subcommand("eval-ued", "unit edit distance between clean and augmented");
  ued_cmd->add_option("--units-clean", ued.units_clean);
  ued_cmd->add_option("--units-aug", ued.units_aug);
  ued_cmd->add_option("--checkpoint", ued.quantizer.checkpoint);
  ued_cmd->add_option("--kmeans", ued.quantizer.kmeans);
  ued_cmd->add_option("--manifest", ued.manifest);
  ued_cmd->add_option("--augment", ued.augment, "feature_warp|feature_noise|identity");
  ued_cmd->add_option("--lo", ued.lo);
  ued_cmd->add_option("--hi", ued.hi);
  ued_cmd->add_option("--seed", ued.seed);
  ued_cmd->add_option("--out", ued.out, "write the JSON report here");

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "speaker probing on local/global representations");
  probe_cmd->add_option("--checkpoint", probe.quantizer.checkpoint);
  probe_cmd->add_option("--kmeans", probe.quantizer.kmeans);
  probe_cmd->add_option("--manifest", probe.manifest)->required();
  probe_cmd->add_option("--rep", probe.rep, "local|global");
  probe_cmd->add_option("--seed", probe.seed);
  probe_cmd->add_option("--out", probe.out, "write the JSON report here");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "mean UED across noise levels");
  sweep_cmd->add_option("--checkpoint", sweep.quantizer.checkpoint);
  sweep_cmd->add_option("--kmeans", sweep.quantizer.kmeans);
  sweep_cmd->add_option("--manifest", sweep.manifest)->required();
  sweep_cmd->add_option("--levels", sweep.levels, "comma-separated feature-noise scales");
  sweep_cmd->add_option("--seed", sweep.seed);
  sweep_cmd->add_option("--out", sweep.out, "write the CSV here");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "unit-usage histogram and entropy");
  stats_cmd->add_option("--units", stats.units)->required();
  stats_cmd->add_option("--k", stats.k, "unit count (default: max id + 1)");
  stats_cmd->add_option("--out", stats.out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    synth.seed_given = synth_seed->count() > 0;
    augment.range_given = lo_opt->count() > 0;
    if (synth_cmd->parsed()) return run_synth(synth);
    if (augment_cmd->parsed()) return run_augment(augment);
    if (train_cmd->parsed()) return run_train(train);
    if (tok_cmd->parsed()) return run_tokenize(tok_q, tok_manifest, tok_out, tok_seed);
    if (km_cmd->parsed()) return run_kmeans(km);
    if (ued_cmd->parsed()) return run_eval_ued(ued);
    if (probe_cmd->parsed()) return run_probe(probe);
    if (sweep_cmd->parsed()) return run_sweep(sweep);
    if (stats_cmd->parsed()) return run_stats(stats);
  } catch (const nast::UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const nast::Error& e) {
    std::cerr << "error: " << nast::error_category_name(e.category()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
