#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/em.hpp"
#include "dlcluster/gmm.hpp"
#include "dlcluster/trainer.hpp"

namespace dlcluster {

/// Thrown for malformed input files; the message names the offending line or field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataFormat { csv, bin };

/// `.bin` selects the binary format, anything else CSV.
DataFormat format_from_path(const std::filesystem::path& path);

/**
 * Comma-separated rows of decimal numbers. A first row that does not parse as
 * numbers is a header; if its last column is named `label`, that column is
 * read as non-negative integer labels. Blank lines are ignored.
 */
Dataset parse_csv(std::istream& in);
/// Writes a header `x0,...,x{d-1}` (plus `label` when requested and present)
/// and shortest round-trip decimal values.
void write_csv(std::ostream& out, const Dataset& data, bool with_labels = true);

/// "DCDL", u32 version 1, u32 N, u32 d, N*d float32, all little-endian.
Dataset parse_bin(std::istream& in);
/// Values are rounded to float32.
void write_bin(std::ostream& out, const Dataset& data);

Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
inline Dataset load_dataset(const std::filesystem::path& path) { return load_dataset(path, format_from_path(path)); }
void save_dataset(const std::filesystem::path& path, const Dataset& data, DataFormat format);

/// One integer per line.
Labels parse_labels(std::istream& in);
void write_labels(std::ostream& out, const Labels& labels);
Labels load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const Labels& labels);

/// {"k","d","weights","means","variances"} with constrained parameters.
std::string model_to_json(const Gmm& model);
Gmm model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const Gmm& model);
Gmm load_model(const std::filesystem::path& path);

/// Header `iter,kl,wsd,total`.
void write_train_log(std::ostream& out, const std::vector<IterationRecord>& history);
/// Header `iter,loglik,floor,reseed`.
void write_em_log(std::ostream& out, const std::vector<EmRecord>& history);

struct MetricsReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  std::size_t n = 0;
  std::size_t k_true = 0;
  std::size_t k_pred = 0;
};

MetricsReport evaluate_labels(const Labels& truth, const Labels& pred);
std::string report_to_json(const MetricsReport& report);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Whole file as a string; throws std::runtime_error if it cannot be read.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace dlcluster
