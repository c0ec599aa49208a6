#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsaug/augment.hpp"
#include "fsaug/checkpoint.hpp"
#include "fsaug/classifier.hpp"
#include "fsaug/datasets.hpp"
#include "fsaug/optimizer.hpp"

namespace fsaug {

// Experiment configuration, loaded from a JSON file. Every stochastic choice
// is derived from `seed`; nothing is wall-clock seeded.
struct DatasetConfig {
  std::string type;  // sinusoid | linear | circles | spirals | csv
  SinusoidSpec sinusoid;
  double test_fraction = 0.2;  // sinusoid test count, csv single-file split
  int train_per_class = 100;   // boundary kinds
  int test_per_class = 400;
  double noise_std = 0.0;
  std::string train_path;  // csv
  std::string test_path;   // csv, optional
};

struct PreprocessConfig {
  bool local_center = false;
  bool global_normalize = true;
};

struct AutoencoderConfig {
  int hidden_units = 32;
  double dropout = 0.2;
  bool context_dropout = true;
  bool reverse_inputs = true;
};

struct ClassifyConfig {
  std::vector<std::string> variants = {"baseline"};
  int runs = 10;
  int folds = 0;  // > 0 switches to stratified cross-validation
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string experiment_id = "experiment";
  std::string out_dir = "out";
  int threads = 1;

  DatasetConfig dataset;
  PreprocessConfig preprocess;
  AutoencoderConfig autoencoder;

  long sa_updates = 5000;
  SaTrainConfig sa_training;

  AugmentConfig augment;

  int classifier_hidden = 256;
  double classifier_dropout = 0.5;
  long classifier_updates = 3000;
  ClassifierTrainConfig classifier_training;

  ClassifyConfig classify;

  std::string raw_text;  // original JSON, fingerprinted into checkpoints
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Train/test data per the dataset config. Generated sets carry unique ids
// across the two splits. No preprocessing is applied here.
struct LoadedData {
  std::vector<SequenceSample> train;
  std::vector<SequenceSample> test;
};
LoadedData prepare_dataset(const ExperimentConfig& config);

// Eval-mode context vectors of a sample set: one row per sample, plus the
// aligned labels (-1 when absent) and lengths.
struct EncodedSet {
  NumericMatrix contexts;
  std::vector<int> labels;
  std::vector<int> lengths;
};
EncodedSet encode_dataset(const AutoencoderModel& model,
                          const std::vector<SequenceSample>& samples,
                          bool reverse);

// --- command runners (the CLI is a thin shell around these) ---

struct TrainSaOutputs {
  std::filesystem::path checkpoint_path;
  std::filesystem::path loss_log_path;
  SaTrainResult result;
};
TrainSaOutputs run_train_sa(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);

struct SweepRequest {
  std::int64_t sample_a = 0;
  std::int64_t sample_b = 1;
  std::string op = "interpolate";  // interpolate | extrapolate | noise
  std::vector<double> grid;        // lambda values (gamma values for noise)
};
struct SweepOutputs {
  std::vector<std::filesystem::path> curve_csvs;
  std::filesystem::path svg_path;
};
SweepOutputs run_sweep(const ExperimentConfig& config,
                       const std::filesystem::path& checkpoint_path,
                       const SweepRequest& request,
                       const std::filesystem::path& out_dir);

struct VariantSummary {
  std::string variant;
  EvalResult result;
  long updates = 0;
  int synthetic_count = 0;
};
struct ClassifyOutputs {
  std::vector<VariantSummary> summaries;
  std::filesystem::path runs_csv;
  std::filesystem::path summary_csv;
};
ClassifyOutputs run_classify(const ExperimentConfig& config,
                             const std::filesystem::path& checkpoint_path,
                             const std::filesystem::path& out_dir);

struct RoundtripOutputs {
  std::filesystem::path report_csv;
  std::filesystem::path summary_csv;
  double aggregate_mse = 0.0;
  long sample_count = 0;
};
RoundtripOutputs run_roundtrip(const ExperimentConfig& config,
                               const std::filesystem::path& checkpoint_path,
                               const std::filesystem::path& out_dir);

struct GenDataOutputs {
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
};
GenDataOutputs run_gen_data(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace fsaug
