#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsaug/random.hpp"
#include "fsaug/sample.hpp"

namespace fsaug {

// a(t) = A * sin(2*pi*f*t + phi) on t = 0..length-1 with (A, f, phi) drawn
// uniformly from the ranges below. Defaults give 2-10 visible cycles over
// the default length. Zero-width ranges pin a parameter exactly.
struct SinusoidSpec {
  double amplitude_lo = 0.5, amplitude_hi = 2.0;
  double frequency_lo = 0.02, frequency_hi = 0.1;  // cycles per step
  double phase_lo = 0.0, phase_hi = 6.283185307179586476925286766559;
  int length = 100;
  int count = 0;
};

std::vector<SequenceSample> gen_sinusoids(const SinusoidSpec& spec,
                                          RandomStream& stream);

// Two-class 2-D point sets of graded boundary complexity. Points are emitted
// as length-1 sequences so they travel through the same pipeline as time
// series.
//   linear   Gaussian blobs either side of the x = 0 line
//   circles  concentric annuli, class 0 inside class 1
//   spirals  two interleaved Archimedean spirals
enum class BoundaryKind { kLinear, kCircles, kSpirals };

struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::kSpirals;
  int samples_per_class = 100;
  double noise_std = 0.0;
};

std::vector<SequenceSample> gen_boundary_dataset(const BoundarySpec& spec,
                                                 RandomStream& stream);

// Subtracts the per-sample, per-feature mean; idempotent.
SequenceSample normalize_local(SequenceSample sample);

// Per-feature affine transform fitted on a training set and reusable on test
// data. Population convention, so the pooled std of the transformed training
// set is exactly 1. Zero-variance features are centered with a unit divisor
// (and flagged).
struct NormalizationRecord {
  NumericVector mean;
  NumericVector std_dev;

  void apply(SequenceSample& sample) const;
  void apply(std::vector<SequenceSample>& samples) const;
  bool is_identity() const { return mean.size() == 0; }
};

// Pools statistics over all timesteps of all samples and transforms the set
// in place. Needs at least 2 samples.
NormalizationRecord normalize_global(std::vector<SequenceSample>& samples);

// Time order reversed, features untouched.
SequenceSample reverse_sequence(SequenceSample sample);

// CSV sequence format: header `seq_id,t,label,f0..f{d-1}`, one row per
// timestep. Timesteps of each sequence must form 0..T-1 after sorting (rows
// may arrive in any order); label may be empty for unlabeled data but must
// agree across a sequence. Values are written with 17 significant digits so
// a write/read round trip is value-exact.
std::vector<SequenceSample> load_csv_sequences(const std::filesystem::path& path);
void save_csv_sequences(const std::filesystem::path& path,
                        const std::vector<SequenceSample>& samples);

}  // namespace fsaug
