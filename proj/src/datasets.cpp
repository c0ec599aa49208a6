#include "fsaug/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "fsaug/format.hpp"
#include "fsaug/log.hpp"

namespace fsaug {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_range(double lo, double hi, const char* name) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ParameterError(std::string("gen_sinusoids: invalid ") + name +
                         " range");
}
}  // namespace

std::vector<SequenceSample> gen_sinusoids(const SinusoidSpec& spec,
                                          RandomStream& stream) {
  check_range(spec.amplitude_lo, spec.amplitude_hi, "amplitude");
  check_range(spec.frequency_lo, spec.frequency_hi, "frequency");
  check_range(spec.phase_lo, spec.phase_hi, "phase");
  if (spec.length < 2) throw ParameterError("gen_sinusoids: length must be >= 2");
  if (spec.count < 1) throw ParameterError("gen_sinusoids: count must be >= 1");

  std::vector<SequenceSample> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    const double amplitude = stream.uniform(spec.amplitude_lo, spec.amplitude_hi);
    const double frequency = stream.uniform(spec.frequency_lo, spec.frequency_hi);
    const double phase = stream.uniform(spec.phase_lo, spec.phase_hi);
    SequenceSample s;
    s.id = i;
    s.values.resize(spec.length, 1);
    for (int t = 0; t < spec.length; ++t)
      s.values(t, 0) = amplitude * std::sin(kTwoPi * frequency * t + phase);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SequenceSample> gen_boundary_dataset(const BoundarySpec& spec,
                                                 RandomStream& stream) {
  if (spec.samples_per_class < 1)
    throw ParameterError("gen_boundary_dataset: samples_per_class must be >= 1");
  if (spec.noise_std < 0.0 || !std::isfinite(spec.noise_std))
    throw ParameterError("gen_boundary_dataset: noise_std must be >= 0");

  std::vector<SequenceSample> out;
  out.reserve(2 * spec.samples_per_class);
  std::int64_t next_id = 0;
  for (int label = 0; label < 2; ++label) {
    for (int i = 0; i < spec.samples_per_class; ++i) {
      double x = 0.0, y = 0.0;
      switch (spec.kind) {
        case BoundaryKind::kLinear: {
          x = label == 0 ? -1.0 : 1.0;
          break;
        }
        case BoundaryKind::kCircles: {
          const double r = label == 0 ? stream.uniform(0.5, 1.0)
                                      : stream.uniform(1.5, 2.0);
          const double angle = stream.uniform(0.0, kTwoPi);
          x = r * std::cos(angle);
          y = r * std::sin(angle);
          break;
        }
        case BoundaryKind::kSpirals: {
          // Archimedean arm over 1.25 turns; class 1 is the pi-rotated twin.
          const double theta = stream.uniform(0.5 * kTwoPi / 2.0, 1.5 * kTwoPi);
          const double r = theta / (1.5 * kTwoPi);
          const double rot = label == 0 ? 0.0 : kTwoPi / 2.0;
          x = r * std::cos(theta + rot);
          y = r * std::sin(theta + rot);
          break;
        }
      }
      x += spec.noise_std * stream.normal();
      y += spec.noise_std * stream.normal();

      SequenceSample s;
      s.id = next_id++;
      s.label = label;
      s.values.resize(1, 2);
      s.values(0, 0) = x;
      s.values(0, 1) = y;
      out.push_back(std::move(s));
    }
  }
  return out;
}

SequenceSample normalize_local(SequenceSample sample) {
  const Eigen::RowVectorXd mean = sample.values.colwise().mean();
  sample.values.rowwise() -= mean;
  return sample;
}

void NormalizationRecord::apply(SequenceSample& sample) const {
  if (is_identity()) return;
  if (sample.values.cols() != mean.size())
    throw DimensionError("NormalizationRecord: feature dim mismatch");
  sample.values.rowwise() -= mean.transpose();
  sample.values.array().rowwise() /= std_dev.transpose().array();
}

void NormalizationRecord::apply(std::vector<SequenceSample>& samples) const {
  for (auto& s : samples) apply(s);
}

NormalizationRecord normalize_global(std::vector<SequenceSample>& samples) {
  if (samples.size() < 2)
    throw InsufficientDataError("normalize_global: need at least 2 samples");
  const Eigen::Index features = samples.front().values.cols();

  NumericVector sum = NumericVector::Zero(features);
  long rows = 0;
  for (const auto& s : samples) {
    if (s.values.cols() != features)
      throw DimensionError("normalize_global: inconsistent feature dims");
    sum += s.values.colwise().sum().transpose();
    rows += s.values.rows();
  }
  NumericVector mean = sum / static_cast<double>(rows);

  NumericVector sq = NumericVector::Zero(features);
  for (const auto& s : samples)
    sq += (s.values.rowwise() - mean.transpose())
              .array()
              .square()
              .colwise()
              .sum()
              .matrix()
              .transpose();
  NumericVector std_dev(features);
  for (Eigen::Index j = 0; j < features; ++j) {
    const double var = sq[j] / static_cast<double>(rows);
    if (var > 0.0) {
      std_dev[j] = std::sqrt(var);
    } else {
      std_dev[j] = 1.0;
      log_warning("normalize_global: feature " + std::to_string(j) +
                  " has zero variance; centering only");
    }
  }

  NormalizationRecord record{std::move(mean), std::move(std_dev)};
  record.apply(samples);
  return record;
}

SequenceSample reverse_sequence(SequenceSample sample) {
  sample.values = sample.values.colwise().reverse().eval();
  return sample;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw ParseError(where + ": bad number '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty())
    throw ParseError(where + ": bad integer '" + s + "'");
  return v;
}

struct CsvRow {
  int t = 0;
  int line = 0;
  std::optional<int> label;
  std::vector<double> values;
};

}  // namespace

std::vector<SequenceSample> load_csv_sequences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv_sequences: cannot open " + path.string());
  const std::string name = path.filename().string();

  std::string line;
  if (!std::getline(in, line))
    throw ParseError(name + ":1: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() < 4 || header[0] != "seq_id" || header[1] != "t" ||
      header[2] != "label")
    throw ParseError(name + ":1: expected header seq_id,t,label,f0,...");
  const std::size_t features = header.size() - 3;

  std::map<std::int64_t, std::vector<CsvRow>> sequences;
  int line_no = 1;
  while (std::getline(in, line)) {
    line_no += 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError(where + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    CsvRow row;
    const std::int64_t seq_id = parse_long(fields[0], where);
    row.t = static_cast<int>(parse_long(fields[1], where));
    row.line = line_no;
    if (!fields[2].empty())
      row.label = static_cast<int>(parse_long(fields[2], where));
    row.values.reserve(features);
    for (std::size_t f = 0; f < features; ++f)
      row.values.push_back(parse_double(fields[3 + f], where));
    sequences[seq_id].push_back(std::move(row));
  }
  if (sequences.empty())
    throw ParseError(name + ": no data rows");

  std::vector<SequenceSample> out;
  out.reserve(sequences.size());
  for (auto& [seq_id, rows] : sequences) {
    std::sort(rows.begin(), rows.end(),
              [](const CsvRow& a, const CsvRow& b) { return a.t < b.t; });
    SequenceSample s;
    s.id = seq_id;
    s.label = rows.front().label;
    s.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(features));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string where = name + ":" + std::to_string(rows[r].line);
      if (rows[r].t != static_cast<int>(r))
        throw ParseError(where + ": sequence " + std::to_string(seq_id) +
                         " has non-contiguous timesteps (expected " +
                         std::to_string(r) + ", got " +
                         std::to_string(rows[r].t) + ")");
      if (rows[r].label != s.label)
        throw ParseError(where + ": sequence " + std::to_string(seq_id) +
                         " has conflicting labels");
      for (std::size_t f = 0; f < features; ++f)
        s.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) =
            rows[r].values[f];
    }
    out.push_back(std::move(s));
  }
  return out;
}

void save_csv_sequences(const std::filesystem::path& path,
                        const std::vector<SequenceSample>& samples) {
  std::ofstream out(path);
  if (!out) throw IoError("save_csv_sequences: cannot open " + path.string());
  const Eigen::Index features =
      samples.empty() ? 1 : samples.front().values.cols();

  out << "seq_id,t,label";
  for (Eigen::Index f = 0; f < features; ++f) out << ",f" << f;
  out << "\n";
  for (const auto& s : samples) {
    for (Eigen::Index t = 0; t < s.values.rows(); ++t) {
      out << s.id << "," << t << ",";
      if (s.label.has_value()) out << *s.label;
      for (Eigen::Index f = 0; f < features; ++f)
        out << "," << g17(s.values(t, f));
      out << "\n";
    }
  }
  if (!out) throw IoError("save_csv_sequences: write failed for " + path.string());
}

}  // namespace fsaug
