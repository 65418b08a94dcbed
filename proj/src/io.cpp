#include "dlcluster/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "dlcluster/metrics.hpp"

namespace dlcluster {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

int parse_label(std::string_view s, std::size_t line_no) {
  long long value = 0;
  if (!parse_int(s, value)) {
    throw ParseError("line " + std::to_string(line_no) + ": label '" + std::string(s) + "' is not an integer");
  }
  if (value < 0 || value > std::numeric_limits<int>::max()) {
    throw ParseError("line " + std::to_string(line_no) + ": label " + std::to_string(value) + " out of range");
  }
  return static_cast<int>(value);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                  static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

DataFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? DataFormat::bin : DataFormat::csv;
}

Dataset parse_csv(std::istream& in) {
  std::vector<double> values;
  Labels labels;
  std::size_t width = 0;
  bool header_seen = false;
  bool label_column = false;
  bool first_row = true;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const std::vector<std::string_view> fields = split(view);
    if (first_row) {
      first_row = false;
      double probe = 0.0;
      bool numeric = true;
      for (std::string_view f : fields) numeric = numeric && parse_number(f, probe);
      if (!numeric) {
        header_seen = true;
        label_column = fields.back() == "label";
        width = fields.size();
        if (label_column && width < 2) throw ParseError("line 1: header has a label column but no features");
        continue;
      }
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " columns, found " + std::to_string(fields.size()));
    }
    const std::size_t features = label_column ? width - 1 : width;
    for (std::size_t j = 0; j < features; ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v)) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) + ": '" +
                         std::string(fields[j]) + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                         ": non-finite value");
      }
      values.push_back(v);
    }
    if (label_column) labels.push_back(parse_label(fields.back(), line_no));
    ++rows;
  }
  if (rows == 0) throw ParseError(header_seen ? "CSV has a header but no data rows" : "CSV is empty");
  const std::size_t d = label_column ? width - 1 : width;
  Matrix points = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  if (label_column) return Dataset(std::move(points), std::move(labels));
  return Dataset(std::move(points));
}

void write_csv(std::ostream& out, const Dataset& data, bool with_labels) {
  with_labels = with_labels && data.has_labels();
  for (std::size_t j = 0; j < data.dim(); ++j) out << (j ? "," : "") << 'x' << j;
  if (with_labels) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
      out << (j ? "," : "") << format_double(data.points()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    if (with_labels) out << ',' << (*data.labels())[i];
    out << '\n';
  }
}

Dataset parse_bin(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw ParseError("BIN: file shorter than the 16-byte header");
  if (bytes.compare(0, 4, "DCDL") != 0) throw ParseError("BIN: bad magic (expected DCDL)");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t version = get_u32(p + 4);
  if (version != 1) throw ParseError("BIN: unsupported version " + std::to_string(version));
  const std::uint64_t n = get_u32(p + 8);
  const std::uint64_t d = get_u32(p + 12);
  if (n == 0 || d == 0) throw ParseError("BIN: N and d must be positive");
  const std::uint64_t expected = 16 + 4 * n * d;
  if (bytes.size() != expected) {
    throw ParseError("BIN: expected " + std::to_string(expected) + " bytes for N=" + std::to_string(n) +
                     ", d=" + std::to_string(d) + ", found " + std::to_string(bytes.size()));
  }
  Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < d; ++j) {
      const float v = std::bit_cast<float>(get_u32(p + 16 + 4 * (i * d + j)));
      if (!std::isfinite(v)) {
        throw ParseError("BIN: non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(v);
    }
  }
  return Dataset(std::move(points));
}

void write_bin(std::ostream& out, const Dataset& data) {
  if (data.size() > 0xffffffffULL || data.dim() > 0xffffffffULL) throw std::runtime_error("BIN: dataset too large");
  out.write("DCDL", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  put_u32(out, static_cast<std::uint32_t>(data.dim()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
      const float v = static_cast<float>(data.points()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
  }
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  try {
    return format == DataFormat::bin ? parse_bin(in) : parse_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data, DataFormat format) {
  if (format == DataFormat::bin) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    write_bin(out, data);
  } else {
    std::ofstream out = open_out(path);
    write_csv(out, data);
  }
}

Labels parse_labels(std::istream& in) {
  Labels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    labels.push_back(parse_label(line, line_no));
  }
  return labels;
}

void write_labels(std::ostream& out, const Labels& labels) {
  for (int l : labels) out << l << '\n';
}

Labels load_labels(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return parse_labels(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_labels(const std::filesystem::path& path, const Labels& labels) {
  std::ofstream out = open_out(path);
  write_labels(out, labels);
}

std::string model_to_json(const Gmm& model) {
  const Vector w = model.weights();
  const Matrix var = model.variances();
  nlohmann::ordered_json doc;
  doc["k"] = model.k();
  doc["d"] = model.dim();
  doc["weights"] = std::vector<double>(w.data(), w.data() + w.size());
  doc["means"] = nlohmann::ordered_json::array();
  doc["variances"] = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < model.means().rows(); ++c) {
    std::vector<double> mu(model.means().row(c).begin(), model.means().row(c).end());
    std::vector<double> v(var.row(c).begin(), var.row(c).end());
    doc["means"].push_back(mu);
    doc["variances"].push_back(v);
  }
  return doc.dump(2) + "\n";
}

Gmm model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  try {
    const std::size_t k = doc.at("k").get<std::size_t>();
    const std::size_t d = doc.at("d").get<std::size_t>();
    const auto weights = doc.at("weights").get<std::vector<double>>();
    const auto means = doc.at("means").get<std::vector<std::vector<double>>>();
    const auto vars = doc.at("variances").get<std::vector<std::vector<double>>>();
    if (k == 0 || d == 0 || weights.size() != k || means.size() != k || vars.size() != k) {
      throw ParseError("model JSON: k, weights, means and variances disagree");
    }
    Vector w(static_cast<Eigen::Index>(k));
    Matrix mu(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    Matrix var(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < k; ++c) {
      if (means[c].size() != d || vars[c].size() != d) {
        throw ParseError("model JSON: component " + std::to_string(c) + " does not have d=" + std::to_string(d) +
                         " entries");
      }
      w[static_cast<Eigen::Index>(c)] = weights[c];
      for (std::size_t j = 0; j < d; ++j) {
        mu(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) = means[c][j];
        var(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) = vars[c][j];
      }
    }
    return Gmm::from_constrained(w, std::move(mu), var);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Gmm& model) { write_file(path, model_to_json(model)); }

Gmm load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_train_log(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iter,kl,wsd,total\n";
  for (const IterationRecord& r : history) {
    out << r.iteration << ',' << format_double(r.kl) << ',' << format_double(r.wsd) << ','
        << format_double(r.total) << '\n';
  }
}

void write_em_log(std::ostream& out, const std::vector<EmRecord>& history) {
  out << "iter,loglik,floor,reseed\n";
  for (const EmRecord& r : history) {
    out << r.iteration << ',' << format_double(r.log_likelihood) << ',' << (r.floor_fired ? 1 : 0) << ','
        << (r.reseeded ? 1 : 0) << '\n';
  }
}

MetricsReport evaluate_labels(const Labels& truth, const Labels& pred) {
  MetricsReport r;
  r.acc = acc(truth, pred);
  r.nmi = nmi(truth, pred);
  r.ari = ari(truth, pred);
  r.n = truth.size();
  r.k_true = count_distinct(truth);
  r.k_pred = count_distinct(pred);
  return r;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["acc"] = report.acc;
  doc["nmi"] = report.nmi;
  doc["ari"] = report.ari;
  doc["n"] = report.n;
  doc["k_true"] = report.k_true;
  doc["k_pred"] = report.k_pred;
  return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace dlcluster
