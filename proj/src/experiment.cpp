#include "fsaug/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

#include "fsaug/format.hpp"
#include "fsaug/svg.hpp"

namespace fsaug {

namespace {

using nlohmann::json;

// sub-stream tags hung off the experiment seed
constexpr std::uint64_t kDataTag = 0x44415441ULL;
constexpr std::uint64_t kInitTag = 0x494e4954ULL;
constexpr std::uint64_t kSaTrainTag = 0x545241494eULL;
constexpr std::uint64_t kRunSeedTag = 0x52554e53ULL;
constexpr std::uint64_t kFoldTag = 0x464f4c44ULL;
constexpr std::uint64_t kSweepTag = 0x5357454550ULL;
constexpr std::uint64_t kAugTag = 0x415547ULL;
constexpr std::uint64_t kMlpInitTag = 0x4d4c50ULL;
constexpr std::uint64_t kMlpTrainTag = 0x4d4c5054ULL;

void read_interval(const json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 2)
    throw ConfigError(std::string("config: '") + key + "' must be [lo, hi]");
  lo = arr[0].get<double>();
  hi = arr[1].get<double>();
}

AugmentOperator parse_operator(const std::string& name) {
  if (name == "noise") return AugmentOperator::kNoise;
  if (name == "interpolate") return AugmentOperator::kInterpolate;
  if (name == "extrapolate") return AugmentOperator::kExtrapolate;
  throw ConfigError("config: unknown operator '" + name + "'");
}

NeighborPolicy parse_policy(const std::string& name) {
  if (name == "in_class_nearest") return NeighborPolicy::kInClassNearest;
  if (name == "in_class_random") return NeighborPolicy::kInClassRandom;
  throw ConfigError("config: unknown neighbor policy '" + name + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  try {
    ExperimentConfig c;
    c.raw_text = json_text;
    if (!j.contains("seed"))
      throw ConfigError("config: 'seed' is required (no wall-clock seeding)");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);

    const json jd = j.at("dataset");
    c.dataset.type = jd.at("type").get<std::string>();
    c.experiment_id = j.value("experiment_id", c.dataset.type);
    if (c.dataset.type == "sinusoid") {
      auto& s = c.dataset.sinusoid;
      read_interval(jd, "amplitude", s.amplitude_lo, s.amplitude_hi);
      read_interval(jd, "frequency", s.frequency_lo, s.frequency_hi);
      read_interval(jd, "phase", s.phase_lo, s.phase_hi);
      s.length = jd.value("length", s.length);
      s.count = jd.value("count", 1000);
      c.dataset.test_fraction = jd.value("test_fraction", c.dataset.test_fraction);
    } else if (c.dataset.type == "linear" || c.dataset.type == "circles" ||
               c.dataset.type == "spirals") {
      c.dataset.train_per_class = jd.value("train_per_class", c.dataset.train_per_class);
      c.dataset.test_per_class = jd.value("test_per_class", c.dataset.test_per_class);
      c.dataset.noise_std = jd.value("noise_std", c.dataset.noise_std);
    } else if (c.dataset.type == "csv") {
      c.dataset.train_path = jd.at("train_path").get<std::string>();
      c.dataset.test_path = jd.value("test_path", std::string());
      c.dataset.test_fraction = jd.value("test_fraction", c.dataset.test_fraction);
      if (!std::filesystem::exists(c.dataset.train_path))
        throw ConfigError("config: train_path does not exist: " + c.dataset.train_path);
      if (!c.dataset.test_path.empty() &&
          !std::filesystem::exists(c.dataset.test_path))
        throw ConfigError("config: test_path does not exist: " + c.dataset.test_path);
    } else {
      throw ConfigError("config: unknown dataset type '" + c.dataset.type + "'");
    }

    if (j.contains("preprocess")) {
      const json jp = j.at("preprocess");
      c.preprocess.local_center = jp.value("local_center", c.preprocess.local_center);
      c.preprocess.global_normalize =
          jp.value("global_normalize", c.preprocess.global_normalize);
    }

    if (j.contains("autoencoder")) {
      const json ja = j.at("autoencoder");
      c.autoencoder.hidden_units = ja.value("hidden_units", c.autoencoder.hidden_units);
      c.autoencoder.dropout = ja.value("dropout", c.autoencoder.dropout);
      c.autoencoder.context_dropout =
          ja.value("context_dropout", c.autoencoder.context_dropout);
      c.autoencoder.reverse_inputs =
          ja.value("reverse_inputs", c.autoencoder.reverse_inputs);
    }

    if (j.contains("sa_training")) {
      const json jt = j.at("sa_training");
      c.sa_updates = jt.value("updates", c.sa_updates);
      c.sa_training.batch_size = jt.value("batch_size", c.sa_training.batch_size);
      c.sa_training.learning_rate =
          jt.value("learning_rate", c.sa_training.learning_rate);
      c.sa_training.plateau_patience =
          jt.value("plateau_patience", c.sa_training.plateau_patience);
      c.sa_training.plateau_factor =
          jt.value("plateau_factor", c.sa_training.plateau_factor);
      c.sa_training.min_rel_improvement =
          jt.value("min_rel_improvement", c.sa_training.min_rel_improvement);
      c.sa_training.val_fraction = jt.value("val_fraction", c.sa_training.val_fraction);
      c.sa_training.clip_norm = jt.value("clip_norm", c.sa_training.clip_norm);
    }
    c.sa_training.reverse_inputs = c.autoencoder.reverse_inputs;

    if (j.contains("augment")) {
      const json ja = j.at("augment");
      if (ja.contains("operator"))
        c.augment.op = parse_operator(ja.at("operator").get<std::string>());
      c.augment.lambda = ja.value("lambda", c.augment.lambda);
      c.augment.gamma = ja.value("gamma", c.augment.gamma);
      c.augment.k = ja.value("k", c.augment.k);
      if (ja.contains("policy"))
        c.augment.policy = parse_policy(ja.at("policy").get<std::string>());
      c.augment.random_lambda = ja.value("random_lambda", c.augment.random_lambda);
      c.augment.accelerated_knn =
          ja.value("accelerated_knn", c.augment.accelerated_knn);
    }

    if (j.contains("classifier")) {
      const json jc = j.at("classifier");
      c.classifier_hidden = jc.value("hidden_units", c.classifier_hidden);
      c.classifier_dropout = jc.value("dropout", c.classifier_dropout);
      c.classifier_updates = jc.value("updates", c.classifier_updates);
      c.classifier_training.batch_size =
          jc.value("batch_size", c.classifier_training.batch_size);
      c.classifier_training.learning_rate =
          jc.value("learning_rate", c.classifier_training.learning_rate);
    }

    if (j.contains("classify")) {
      const json jc = j.at("classify");
      if (jc.contains("variants"))
        c.classify.variants = jc.at("variants").get<std::vector<std::string>>();
      c.classify.runs = jc.value("runs", c.classify.runs);
      c.classify.folds = jc.value("folds", c.classify.folds);
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

LoadedData prepare_dataset(const ExperimentConfig& config) {
  RandomStream data_stream = RandomStream(config.seed).split(kDataTag);
  LoadedData data;
  const auto& d = config.dataset;

  if (d.type == "sinusoid") {
    RandomStream train_stream = data_stream.split(0);
    RandomStream test_stream = data_stream.split(1);
    data.train = gen_sinusoids(d.sinusoid, train_stream);
    SinusoidSpec test_spec = d.sinusoid;
    test_spec.count = std::max<int>(
        1, static_cast<int>(std::lround(d.test_fraction * d.sinusoid.count)));
    data.test = gen_sinusoids(test_spec, test_stream);
    for (auto& s : data.test) s.id += d.sinusoid.count;
  } else if (d.type == "linear" || d.type == "circles" || d.type == "spirals") {
    BoundarySpec spec;
    spec.kind = d.type == "linear"    ? BoundaryKind::kLinear
                : d.type == "circles" ? BoundaryKind::kCircles
                                      : BoundaryKind::kSpirals;
    spec.noise_std = d.noise_std;
    spec.samples_per_class = d.train_per_class;
    RandomStream train_stream = data_stream.split(0);
    data.train = gen_boundary_dataset(spec, train_stream);
    spec.samples_per_class = d.test_per_class;
    RandomStream test_stream = data_stream.split(1);
    data.test = gen_boundary_dataset(spec, test_stream);
    for (auto& s : data.test) s.id += 2 * d.train_per_class;
  } else if (d.type == "csv") {
    data.train = load_csv_sequences(d.train_path);
    if (!d.test_path.empty()) {
      data.test = load_csv_sequences(d.test_path);
    } else {
      // deterministic split of a single file
      std::vector<int> order(data.train.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      RandomStream split_stream = data_stream.split(2);
      split_stream.shuffle(order);
      const int test_count = std::max<int>(
          1, static_cast<int>(std::lround(d.test_fraction *
                                          static_cast<double>(order.size()))));
      std::vector<SequenceSample> train, test;
      for (std::size_t i = 0; i < order.size(); ++i) {
        auto& dest = i < static_cast<std::size_t>(test_count) ? test : train;
        dest.push_back(std::move(data.train[order[i]]));
      }
      data.train = std::move(train);
      data.test = std::move(test);
    }
  } else {
    throw ConfigError("prepare_dataset: unknown dataset type '" + d.type + "'");
  }
  return data;
}

EncodedSet encode_dataset(const AutoencoderModel& model,
                          const std::vector<SequenceSample>& samples,
                          bool reverse) {
  EncodedSet set;
  set.contexts.resize(static_cast<Eigen::Index>(samples.size()),
                      model.hidden_size());
  set.labels.reserve(samples.size());
  set.lengths.reserve(samples.size());
  EncodeDecodeOptions opts;
  opts.reverse = reverse;
  opts.train_mode = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    set.contexts.row(static_cast<Eigen::Index>(i)) =
        encode(model, samples[i].values, opts).transpose();
    set.labels.push_back(samples[i].label.value_or(-1));
    set.lengths.push_back(samples[i].length());
  }
  return set;
}

namespace {

void preprocess_in_place(const ExperimentConfig& config,
                         std::vector<SequenceSample>& samples) {
  if (config.preprocess.local_center)
    for (auto& s : samples) s = normalize_local(std::move(s));
}

AutoencoderModel make_model(const ExperimentConfig& config, int feature_dim) {
  RandomStream init_stream = RandomStream(config.seed).split(kInitTag);
  AutoencoderModel model = AutoencoderModel::init(
      feature_dim, config.autoencoder.hidden_units, init_stream);
  model.dropout_prob = config.autoencoder.dropout;
  model.context_dropout = config.autoencoder.context_dropout;
  return model;
}

}  // namespace

TrainSaOutputs run_train_sa(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  LoadedData data = prepare_dataset(config);
  if (data.train.empty())
    throw InsufficientDataError("run_train_sa: empty training set");

  preprocess_in_place(config, data.train);
  NormalizationRecord record;
  if (config.preprocess.global_normalize) record = normalize_global(data.train);

  AutoencoderModel model = make_model(config, data.train.front().feature_dim());
  RandomStream train_stream = RandomStream(config.seed).split(kSaTrainTag);
  SaTrainResult result = train_autoencoder(
      model, data.train, UpdateBudget{config.sa_updates}, config.sa_training,
      train_stream);

  TrainSaOutputs out;
  out.loss_log_path = out_dir / "loss_log.csv";
  {
    std::ofstream log(out.loss_log_path);
    if (!log) throw IoError("run_train_sa: cannot open " + out.loss_log_path.string());
    log << "epoch,train_loss,val_loss,lr\n";
    for (const auto& r : result.history)
      log << r.epoch << "," << g17(r.train_loss) << "," << g17(r.val_loss)
          << "," << g17(r.learning_rate) << "\n";
  }

  Checkpoint ckpt{std::move(model), std::move(record),
                  config_fingerprint(config.raw_text)};
  out.checkpoint_path = out_dir / "checkpoint.bin";
  save_checkpoint(out.checkpoint_path, ckpt);
  out.result = std::move(result);
  return out;
}

namespace {

const SequenceSample* find_sample(const LoadedData& data, std::int64_t id) {
  for (const auto& s : data.train)
    if (s.id == id) return &s;
  for (const auto& s : data.test)
    if (s.id == id) return &s;
  return nullptr;
}

std::string ramp_color(double t) {
  // deterministic blue->red ramp for the sweep children
  const int r = static_cast<int>(std::lround(40 + 200 * t));
  const int g = 80;
  const int b = static_cast<int>(std::lround(240 - 200 * t));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

SweepOutputs run_sweep(const ExperimentConfig& config,
                       const std::filesystem::path& checkpoint_path,
                       const SweepRequest& request,
                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  LoadedData data = prepare_dataset(config);
  preprocess_in_place(config, data.train);
  preprocess_in_place(config, data.test);
  ckpt.normalization.apply(data.train);
  ckpt.normalization.apply(data.test);

  const SequenceSample* a = find_sample(data, request.sample_a);
  const SequenceSample* b = find_sample(data, request.sample_b);
  if (a == nullptr || b == nullptr)
    throw ParameterError("run_sweep: sample id not found in dataset");
  if (request.grid.empty())
    throw ParameterError("run_sweep: empty parameter grid");

  EncodeDecodeOptions opts;
  opts.reverse = config.autoencoder.reverse_inputs;
  const ContextVector c_a = encode(ckpt.model, a->values, opts);
  const ContextVector c_b = encode(ckpt.model, b->values, opts);

  SigmaVector sigma;
  RandomStream noise_stream = RandomStream(config.seed).split(kSweepTag);
  if (request.op == "noise") {
    const EncodedSet enc = encode_dataset(ckpt.model, data.train, opts.reverse);
    sigma = per_element_std(enc.contexts);
  }

  SweepOutputs out;
  std::vector<SvgSeries> series;
  // bold parents, feature 0
  for (const auto* parent : {a, b}) {
    SvgSeries s;
    s.color = parent == a ? "#1f77b4" : "#2ca02c";
    s.stroke_width = 2.5;
    for (Eigen::Index t = 0; t < parent->values.rows(); ++t) {
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(parent->values(t, 0));
    }
    series.push_back(std::move(s));
    if (request.op == "noise") break;  // noise perturbs a single parent
  }

  for (std::size_t i = 0; i < request.grid.size(); ++i) {
    const double value = request.grid[i];
    ContextVector ctx;
    int target_len = a->length();
    if (request.op == "interpolate") {
      ctx = interpolate(c_a, c_b, value);
      target_len = (a->length() + b->length()) / 2;
    } else if (request.op == "extrapolate") {
      ctx = extrapolate(c_a, c_b, value);
    } else if (request.op == "noise") {
      ctx = add_noise(c_a, sigma, value, noise_stream);
    } else {
      throw ParameterError("run_sweep: unknown operator '" + request.op + "'");
    }
    const NumericMatrix decoded = decode(ckpt.model, ctx, target_len);

    char name[32];
    std::snprintf(name, sizeof(name), "sweep_%02zu.csv", i);
    const auto csv_path = out_dir / name;
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("run_sweep: cannot open " + csv_path.string());
    csv << "t";
    for (Eigen::Index f = 0; f < decoded.cols(); ++f) csv << ",f" << f;
    csv << "\n";
    for (Eigen::Index t = 0; t < decoded.rows(); ++t) {
      csv << t;
      for (Eigen::Index f = 0; f < decoded.cols(); ++f)
        csv << "," << g17(decoded(t, f));
      csv << "\n";
    }
    out.curve_csvs.push_back(csv_path);

    SvgSeries s;
    const double ramp = request.grid.size() > 1
                            ? static_cast<double>(i) /
                                  static_cast<double>(request.grid.size() - 1)
                            : 0.0;
    s.color = ramp_color(ramp);
    s.stroke_width = 1.0;
    for (Eigen::Index t = 0; t < decoded.rows(); ++t) {
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(decoded(t, 0));
    }
    series.push_back(std::move(s));
  }

  out.svg_path = out_dir / "sweep.svg";
  write_svg_lines(out.svg_path, series,
                  request.op + " sweep, samples " +
                      std::to_string(request.sample_a) + " and " +
                      std::to_string(request.sample_b));
  return out;
}

namespace {

AugmentConfig variant_augment(const std::string& name, AugmentConfig base) {
  if (name == "noise") {
    base.op = AugmentOperator::kNoise;
  } else if (name == "random_interpolation") {
    base.op = AugmentOperator::kInterpolate;
    base.policy = NeighborPolicy::kInClassRandom;
  } else if (name == "nn_interpolation") {
    base.op = AugmentOperator::kInterpolate;
    base.policy = NeighborPolicy::kInClassNearest;
  } else if (name == "nn_extrapolation") {
    base.op = AugmentOperator::kExtrapolate;
    base.policy = NeighborPolicy::kInClassNearest;
  } else {
    throw ConfigError("classify: unknown variant '" + name + "'");
  }
  return base;
}

void require_labeled(const EncodedSet& set, const char* which) {
  for (int label : set.labels)
    if (label < 0)
      throw ConfigError(std::string("classify: ") + which +
                        " set contains unlabeled samples");
}

}  // namespace

ClassifyOutputs run_classify(const ExperimentConfig& config,
                             const std::filesystem::path& checkpoint_path,
                             const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  LoadedData data = prepare_dataset(config);
  preprocess_in_place(config, data.train);
  preprocess_in_place(config, data.test);
  ckpt.normalization.apply(data.train);
  ckpt.normalization.apply(data.test);

  const bool reverse = config.autoencoder.reverse_inputs;
  EncodedSet train_enc = encode_dataset(ckpt.model, data.train, reverse);
  EncodedSet test_enc = encode_dataset(ckpt.model, data.test, reverse);
  require_labeled(train_enc, "training");
  require_labeled(test_enc, "test");

  int num_classes = 0;
  for (int y : train_enc.labels) num_classes = std::max(num_classes, y + 1);
  for (int y : test_enc.labels) num_classes = std::max(num_classes, y + 1);

  const bool cv = config.classify.folds > 0;
  const int n_runs = cv ? config.classify.folds : config.classify.runs;

  // one rows/fold structure shared by every variant
  std::vector<std::vector<int>> folds;
  NumericMatrix pool_contexts;
  std::vector<int> pool_labels, pool_lengths;
  if (cv) {
    const Eigen::Index n =
        train_enc.contexts.rows() + test_enc.contexts.rows();
    pool_contexts.resize(n, train_enc.contexts.cols());
    pool_contexts.topRows(train_enc.contexts.rows()) = train_enc.contexts;
    pool_contexts.bottomRows(test_enc.contexts.rows()) = test_enc.contexts;
    pool_labels = train_enc.labels;
    pool_labels.insert(pool_labels.end(), test_enc.labels.begin(),
                       test_enc.labels.end());
    pool_lengths = train_enc.lengths;
    pool_lengths.insert(pool_lengths.end(), test_enc.lengths.begin(),
                        test_enc.lengths.end());
    RandomStream fold_stream = RandomStream(config.seed).split(kFoldTag);
    folds = stratified_folds(pool_labels, config.classify.folds, fold_stream);
  }

  // run seeds shared across variants so comparisons are paired
  std::vector<std::uint64_t> run_seeds;
  RandomStream seed_stream = RandomStream(config.seed).split(kRunSeedTag);
  for (int r = 0; r < n_runs; ++r)
    run_seeds.push_back(seed_stream.split(static_cast<std::uint64_t>(r)).seed());

  ClassifyOutputs out;
  out.runs_csv = out_dir / "classify_runs.csv";
  out.summary_csv = out_dir / "classify_summary.csv";
  std::ofstream runs_file(out.runs_csv);
  if (!runs_file) throw IoError("run_classify: cannot open " + out.runs_csv.string());
  runs_file << "experiment_id,variant,run,error\n";

  for (const auto& variant : config.classify.variants) {
    std::vector<long> updates(n_runs, 0);
    std::vector<int> synth_counts(n_runs, 0);

    const auto run_fn = [&](int run_idx, std::uint64_t seed) -> double {
      RandomStream rs(seed);

      const NumericMatrix* base_contexts = &train_enc.contexts;
      const std::vector<int>* base_labels = &train_enc.labels;
      const std::vector<int>* base_lengths = &train_enc.lengths;
      NumericMatrix fold_train_contexts, fold_test_contexts;
      std::vector<int> fold_train_labels, fold_train_lengths, fold_test_labels;
      if (cv) {
        std::vector<char> in_test(pool_labels.size(), 0);
        for (int idx : folds[run_idx]) in_test[idx] = 1;
        for (std::size_t i = 0; i < pool_labels.size(); ++i) {
          if (in_test[i]) {
            fold_test_labels.push_back(pool_labels[i]);
          } else {
            fold_train_labels.push_back(pool_labels[i]);
            fold_train_lengths.push_back(pool_lengths[i]);
          }
        }
        fold_train_contexts.resize(
            static_cast<Eigen::Index>(fold_train_labels.size()),
            pool_contexts.cols());
        fold_test_contexts.resize(
            static_cast<Eigen::Index>(fold_test_labels.size()),
            pool_contexts.cols());
        Eigen::Index tr = 0, te = 0;
        for (std::size_t i = 0; i < pool_labels.size(); ++i) {
          if (in_test[i])
            fold_test_contexts.row(te++) = pool_contexts.row(static_cast<Eigen::Index>(i));
          else
            fold_train_contexts.row(tr++) = pool_contexts.row(static_cast<Eigen::Index>(i));
        }
        base_contexts = &fold_train_contexts;
        base_labels = &fold_train_labels;
        base_lengths = &fold_train_lengths;
      }

      NumericMatrix features = *base_contexts;
      std::vector<int> labels = *base_labels;
      if (variant != "baseline") {
        const AugmentConfig acfg = variant_augment(variant, config.augment);
        RandomStream aug_stream = rs.split(kAugTag);
        const auto synthetics = augment_dataset(*base_contexts, *base_labels,
                                                *base_lengths, acfg, aug_stream);
        synth_counts[run_idx] = static_cast<int>(synthetics.size());
        NumericMatrix expanded(features.rows() + static_cast<Eigen::Index>(synthetics.size()),
                               features.cols());
        expanded.topRows(features.rows()) = features;
        for (std::size_t s = 0; s < synthetics.size(); ++s) {
          expanded.row(features.rows() + static_cast<Eigen::Index>(s)) =
              synthetics[s].values.transpose();
          labels.push_back(synthetics[s].label);
        }
        features = std::move(expanded);
      }

      RandomStream init_stream = rs.split(kMlpInitTag);
      MlpModel mlp = MlpModel::init(static_cast<int>(features.cols()),
                                    config.classifier_hidden, num_classes,
                                    init_stream);
      mlp.dropout_prob = config.classifier_dropout;
      RandomStream train_stream = rs.split(kMlpTrainTag);
      const auto train_result = train_classifier(
          mlp, features, labels, UpdateBudget{config.classifier_updates},
          config.classifier_training, train_stream);
      updates[run_idx] = train_result.updates_performed;

      if (cv) return evaluate(mlp, fold_test_contexts, fold_test_labels);
      return evaluate(mlp, test_enc.contexts, test_enc.labels);
    };

    const EvalResult result = repeated_eval(run_seeds, run_fn, config.threads);

    for (int r = 0; r < n_runs; ++r)
      runs_file << config.experiment_id << "," << variant << "," << r << ","
                << g17(result.errors[r]) << "\n";

    VariantSummary summary;
    summary.variant = variant;
    summary.result = result;
    summary.updates = updates.front();
    for (long u : updates)
      if (u != summary.updates)
        throw std::logic_error("run_classify: unequal update counts across runs");
    summary.synthetic_count = synth_counts.front();
    out.summaries.push_back(std::move(summary));
  }
  runs_file.close();

  std::ofstream summary_file(out.summary_csv);
  if (!summary_file)
    throw IoError("run_classify: cannot open " + out.summary_csv.string());
  summary_file << "experiment_id,variant,runs,mean_error,std_error,updates,"
                  "synthetic_count\n";
  for (const auto& s : out.summaries)
    summary_file << config.experiment_id << "," << s.variant << ","
                 << s.result.runs << "," << g17(s.result.mean) << ","
                 << g17(s.result.std_dev) << "," << s.updates << ","
                 << s.synthetic_count << "\n";
  return out;
}

RoundtripOutputs run_roundtrip(const ExperimentConfig& config,
                               const std::filesystem::path& checkpoint_path,
                               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  LoadedData data = prepare_dataset(config);
  preprocess_in_place(config, data.train);
  preprocess_in_place(config, data.test);
  ckpt.normalization.apply(data.train);
  ckpt.normalization.apply(data.test);

  const auto& samples = data.test.empty() ? data.train : data.test;

  RoundtripOutputs out;
  out.report_csv = out_dir / "roundtrip_report.csv";
  out.summary_csv = out_dir / "roundtrip_summary.csv";
  std::ofstream report(out.report_csv);
  if (!report) throw IoError("run_roundtrip: cannot open " + out.report_csv.string());
  report << "id,length,mse\n";

  EncodeDecodeOptions opts;
  opts.reverse = config.autoencoder.reverse_inputs;
  double acc = 0.0;
  for (const auto& s : samples) {
    const ContextVector c = encode(ckpt.model, s.values, opts);
    const NumericMatrix decoded = decode(ckpt.model, c, s.length());
    const double mse = reconstruction_loss(decoded, s.values);
    report << s.id << "," << s.length() << "," << g17(mse) << "\n";
    acc += mse;
  }
  out.sample_count = static_cast<long>(samples.size());
  out.aggregate_mse = acc / static_cast<double>(samples.size());

  std::ofstream summary(out.summary_csv);
  if (!summary)
    throw IoError("run_roundtrip: cannot open " + out.summary_csv.string());
  summary << "count,aggregate_mse\n";
  summary << out.sample_count << "," << g17(out.aggregate_mse) << "\n";
  return out;
}

GenDataOutputs run_gen_data(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const LoadedData data = prepare_dataset(config);
  GenDataOutputs out;
  out.train_csv = out_dir / "train.csv";
  out.test_csv = out_dir / "test.csv";
  save_csv_sequences(out.train_csv, data.train);
  save_csv_sequences(out.test_csv, data.test);
  return out;
}

}  // namespace fsaug
