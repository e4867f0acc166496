#include "ahcrf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ahcrf/error.hpp"

namespace ahcrf {
namespace {

constexpr const char* kUndefined = "undefined";
constexpr const char* kNull = "null";

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) parts.push_back(text.substr(start, i - start));
  }
  return parts;
}

void check_name(const std::string& what, const std::string& name) {
  if (name.empty() || name == kNull) throw InvalidInput(what + " must be non-empty and not 'null'");
  for (char c : name) {
    if (c == ',' || c == '=' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw InvalidInput(what + " '" + name + "' contains whitespace, ',' or '='");
    }
  }
}

std::string mask_string(const std::vector<bool>& mask) {
  std::string s;
  for (bool b : mask) s.push_back(b ? '1' : '0');
  return s;
}

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << ',';
    out << format_double(values[k]);
  }
  out << '\n';
}

// Line-oriented reader that tracks 1-based line numbers for errors.
class Lines {
 public:
  Lines(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(source_, line_ + 1, std::string("unexpected end of file, expected ") + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& detail) const { throw ParseError(source_, line_, detail); }

  double number(std::string_view text) const {
    try {
      return parse_double(text);
    } catch (const InvalidInput& e) {
      fail(e.what());
    }
  }

  std::size_t count(std::string_view text) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail("expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
  }

  std::vector<double> row(std::string_view text, std::size_t expected) const {
    const auto parts = split(text, ',');
    if (parts.size() != expected) {
      fail("expected " + std::to_string(expected) + " values, got " + std::to_string(parts.size()));
    }
    std::vector<double> values;
    values.reserve(parts.size());
    for (auto p : parts) values.push_back(number(p));
    return values;
  }

  std::vector<bool> mask(std::string_view text, std::size_t length) const {
    if (text.size() != length) fail("mask length does not match action length");
    std::vector<bool> mask;
    for (char c : text) {
      if (c != '0' && c != '1') fail("mask must contain only 0 and 1");
      mask.push_back(c == '1');
    }
    return mask;
  }

  void header(std::string_view magic) {
    const std::string line = require("file header");
    const auto parts = split_ws(line);
    if (parts.size() != 2 || parts[0] != magic) fail("expected header '" + std::string(magic) + " <version>'");
    if (count(parts[1]) != static_cast<std::size_t>(kFormatVersion)) {
      fail("unsupported version " + std::string(parts[1]) + ", expected " + std::to_string(kFormatVersion));
    }
  }

  // "word k1=v1 k2=v2 ..." with keys from `allowed`; duplicates rejected.
  std::map<std::string, std::string> record(std::string_view line, std::string_view word,
                                            std::initializer_list<std::string_view> allowed) const {
    const auto parts = split_ws(line);
    if (parts.empty() || parts[0] != word) fail("expected '" + std::string(word) + "' record");
    std::map<std::string, std::string> fields;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      if (eq == std::string_view::npos) fail("expected key=value, got '" + std::string(parts[i]) + "'");
      const std::string key(parts[i].substr(0, eq));
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail("unknown field '" + key + "'");
      if (!fields.emplace(key, std::string(parts[i].substr(eq + 1))).second) fail("duplicate field '" + key + "'");
    }
    return fields;
  }

  const std::string& field(const std::map<std::string, std::string>& fields, const std::string& key) const {
    const auto it = fields.find(key);
    if (it == fields.end()) fail("missing field '" + key + "'");
    return it->second;
  }

  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::optional<std::string> optional_name(const std::string& text) {
  if (text == kNull) return std::nullopt;
  return text;
}

void write_action_line(std::ostream& out, const std::string& id, const std::optional<std::string>& label,
                       std::size_t length, std::size_t dim, const std::optional<std::vector<bool>>& known,
                       const std::optional<std::vector<bool>>& truth) {
  check_name("action id", id);
  if (label) check_name("label", *label);
  out << "action id=" << id << " label=" << (label ? *label : kNull) << " length=" << length << " dim=" << dim;
  if (known) out << " outlier_mask=" << mask_string(*known);
  if (truth) out << " truth_mask=" << mask_string(*truth);
  out << '\n';
}

std::string optional_double(const std::optional<double>& v) { return v ? format_double(*v) : kUndefined; }

std::string join_doubles(std::span<const double> values) {
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) s += ',';
    s += format_double(values[k]);
  }
  return s;
}

std::string join_counts(const std::vector<std::size_t>& values) {
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(values[k]);
  }
  return s;
}

template <typename Open>
auto with_file(const std::string& path, Open&& body) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  return body(in);
}

template <typename Body>
void to_file(const std::string& path, Body&& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  body(out);
  out.flush();
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw InvalidInput("cannot format number");
  return std::string(buffer, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (begin == end || ec != std::errc() || ptr != end) {
    throw InvalidInput("expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

// ---------------------------------------------------------------------------
// Datasets

void write_dataset(std::ostream& out, const Dataset& dataset) {
  validate(dataset);
  out << "ahcrf-dataset " << kFormatVersion << '\n';
  for (const auto& action : dataset.actions) {
    write_action_line(out, action.id, action.label, action.length(), action.dim(), action.known_outlier_mask,
                      action.truth_mask);
    for (const auto& segment : action.segments) write_row(out, segment);
  }
}

Dataset read_dataset(std::istream& in, const std::string& source) {
  Lines lines(in, source);
  lines.header("ahcrf-dataset");
  Dataset dataset;
  std::string line;
  while (lines.next(line)) {
    if (line.empty()) lines.fail("unexpected blank line");
    const auto fields =
        lines.record(line, "action", {"id", "label", "length", "dim", "outlier_mask", "truth_mask"});
    ActionSequence action;
    action.id = lines.field(fields, "id");
    action.label = optional_name(lines.field(fields, "label"));
    const std::size_t length = lines.count(lines.field(fields, "length"));
    const std::size_t dim = lines.count(lines.field(fields, "dim"));
    if (length == 0 || dim == 0) lines.fail("length and dim must be >= 1");
    if (fields.count("outlier_mask")) action.known_outlier_mask = lines.mask(fields.at("outlier_mask"), length);
    if (fields.count("truth_mask")) action.truth_mask = lines.mask(fields.at("truth_mask"), length);
    const std::size_t action_line = lines.line();
    for (std::size_t t = 0; t < length; ++t) action.segments.push_back(lines.row(lines.require("segment row"), dim));
    dataset.actions.push_back(std::move(action));
    try {
      validate(dataset);
    } catch (const InvalidInput& e) {
      throw ParseError(source, action_line, e.what());
    }
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Augmented datasets

void write_augmented(std::ostream& out, const AugmentedDataset& dataset) {
  out << "ahcrf-augmented " << kFormatVersion << '\n';
  for (const auto& action : dataset.actions) {
    if (action.segments.empty()) throw InvalidInput("augmented action '" + action.id + "' has no segments");
    const std::size_t dim = action.segments.front().original.size();
    if (action.truth_mask && action.truth_mask->size() != action.length()) {
      throw InvalidInput("augmented action '" + action.id + "' has a truth mask of the wrong length");
    }
    write_action_line(out, action.id, action.label, action.length(), dim, std::nullopt, action.truth_mask);
    for (std::size_t t = 0; t < action.length(); ++t) {
      const auto& segment = action.segments[t];
      if (segment.original.size() != dim) throw InvalidInput("augmented action '" + action.id + "' mixes dimensions");
      out << "segment t=" << t + 1 << " alternatives=" << segment.alternatives.size()
          << " original=" << (segment.original_allowed ? 1 : 0) << '\n';
      write_row(out, segment.original);
      for (const auto& alt : segment.alternatives) {
        if (alt.vector.size() != dim) throw InvalidInput("alternative dimension mismatch in '" + action.id + "'");
        check_name("source id", alt.source_id);
        if (alt.source_label) check_name("source label", *alt.source_label);
        out << "alt," << alt.recommender + 1 << ',' << alt.source_id << ',' << alt.source_position + 1 << ','
            << (alt.source_label ? *alt.source_label : kNull);
        for (double v : alt.vector) out << ',' << format_double(v);
        out << '\n';
      }
    }
  }
}

AugmentedDataset read_augmented(std::istream& in, const std::string& source) {
  Lines lines(in, source);
  lines.header("ahcrf-augmented");
  AugmentedDataset dataset;
  std::string line;
  while (lines.next(line)) {
    const auto fields = lines.record(line, "action", {"id", "label", "length", "dim", "truth_mask"});
    AugmentedAction action;
    action.id = lines.field(fields, "id");
    action.label = optional_name(lines.field(fields, "label"));
    const std::size_t length = lines.count(lines.field(fields, "length"));
    const std::size_t dim = lines.count(lines.field(fields, "dim"));
    if (length == 0 || dim == 0) lines.fail("length and dim must be >= 1");
    if (fields.count("truth_mask")) action.truth_mask = lines.mask(fields.at("truth_mask"), length);
    for (std::size_t t = 0; t < length; ++t) {
      const auto seg = lines.record(lines.require("segment record"), "segment", {"t", "alternatives", "original"});
      if (lines.count(lines.field(seg, "t")) != t + 1) lines.fail("segments out of order");
      const std::size_t count = lines.count(lines.field(seg, "alternatives"));
      const std::string& original = lines.field(seg, "original");
      if (original != "0" && original != "1") lines.fail("original must be 0 or 1");
      AugmentedSegment segment;
      segment.original_allowed = original == "1";
      segment.original = lines.row(lines.require("original row"), dim);
      for (std::size_t k = 0; k < count; ++k) {
        const std::string row = lines.require("alternative row");
        const auto parts = split(row, ',');
        if (parts.size() != 5 + dim || parts[0] != "alt") lines.fail("malformed alternative row");
        Alternative alt;
        const std::size_t j = lines.count(parts[1]);
        const std::size_t source_t = lines.count(parts[3]);
        if (j == 0 || source_t == 0) lines.fail("positions are 1-based");
        alt.recommender = j - 1;
        alt.source_position = source_t - 1;
        alt.source_id = std::string(parts[2]);
        alt.source_label = optional_name(std::string(parts[4]));
        for (std::size_t v = 0; v < dim; ++v) alt.vector.push_back(lines.number(parts[5 + v]));
        segment.alternatives.push_back(std::move(alt));
      }
      action.segments.push_back(std::move(segment));
    }
    dataset.actions.push_back(std::move(action));
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Models

void write_model(std::ostream& out, const ModelParameters& params, bool augmented) {
  if (params.class_names.size() != params.num_classes()) throw InvalidInput("model class table size mismatch");
  const std::size_t C = params.num_classes(), S = params.num_poses(), d = params.dim();
  out << "ahcrf-model " << kFormatVersion << '\n';
  out << "classes=" << C << " poses=" << S << " dim=" << d << " epsilon=" << format_double(params.epsilon)
      << " sigma=" << format_double(params.sigma) << " augmented=" << (augmented ? 1 : 0) << '\n';
  for (std::size_t y = 0; y < C; ++y) {
    check_name("class name", params.class_names[y]);
    out << "class " << y + 1 << ' ' << params.class_names[y] << '\n';
  }
  const auto values = params.values();
  out << "poses\n";
  for (std::size_t p = 0; p < S; ++p) write_row(out, values.subspan(p * d, d));
  out << "class_pose\n";
  for (std::size_t y = 0; y < C; ++y) write_row(out, values.subspan(params.class_pose_offset() + y * S, S));
  out << "transition\n";
  for (std::size_t r = 0; r < C * S; ++r) write_row(out, values.subspan(params.transition_offset() + r * S, S));
}

LoadedModel read_model(std::istream& in, const std::string& source) {
  Lines lines(in, source);
  lines.header("ahcrf-model");
  std::string shape = lines.require("model shape");
  auto parts = split_ws(shape);
  if (parts.empty() || parts[0].substr(0, 8) != "classes=") lines.fail("expected model shape line");
  const auto fields = lines.record("shape " + shape, "shape", {"classes", "poses", "dim", "epsilon", "sigma", "augmented"});
  const std::size_t C = lines.count(lines.field(fields, "classes"));
  const std::size_t S = lines.count(lines.field(fields, "poses"));
  const std::size_t d = lines.count(lines.field(fields, "dim"));
  if (C == 0 || S == 0 || d == 0) lines.fail("classes, poses and dim must be >= 1");
  LoadedModel model{ModelParameters(C, S, d), false};
  model.params.epsilon = lines.number(lines.field(fields, "epsilon"));
  model.params.sigma = lines.number(lines.field(fields, "sigma"));
  if (!(model.params.epsilon >= 0.0) || !(model.params.sigma > 0.0)) lines.fail("epsilon must be >= 0 and sigma > 0");
  const std::string& augmented = lines.field(fields, "augmented");
  if (augmented != "0" && augmented != "1") lines.fail("augmented must be 0 or 1");
  model.augmented = augmented == "1";

  for (std::size_t y = 0; y < C; ++y) {
    const std::string line = lines.require("class record");
    parts = split_ws(line);
    if (parts.size() != 3 || parts[0] != "class" || lines.count(parts[1]) != y + 1) lines.fail("expected 'class " + std::to_string(y + 1) + " <name>'");
    model.params.class_names.emplace_back(parts[2]);
  }
  auto values = model.params.values();
  const auto section = [&](const char* name, std::size_t rows, std::size_t cols, std::size_t offset) {
    if (lines.require(name) != name) lines.fail(std::string("expected section '") + name + "'");
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = lines.row(lines.require("parameter row"), cols);
      for (std::size_t c = 0; c < cols; ++c) {
        if (!std::isfinite(row[c])) lines.fail("parameters must be finite");
        values[offset + r * cols + c] = row[c];
      }
    }
  };
  section("poses", S, d, 0);
  section("class_pose", C, S, model.params.class_pose_offset());
  section("transition", C * S, S, model.params.transition_offset());
  std::string extra;
  while (lines.next(extra)) {
    if (!extra.empty()) lines.fail("trailing content after model");
  }
  return model;
}

// ---------------------------------------------------------------------------
// Reports

void write_reports(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << "ahcrf-report " << kFormatVersion << '\n';
  for (const auto& r : reports) {
    for (const auto& name : r.classes) check_name("class name", name);
    out << "row\n";
    out << "task=" << r.task << '\n';
    out << "ratio=" << format_double(r.ratio) << '\n';
    out << "classes=";
    for (std::size_t k = 0; k < r.classes.size(); ++k) out << (k ? "," : "") << r.classes[k];
    out << '\n';
    out << "test_count=" << r.test_count << '\n';
    out << "accuracy=" << optional_double(r.accuracy) << '\n';
    out << "baseline_accuracy=" << optional_double(r.baseline_accuracy) << '\n';
    out << "confusion=" << join_counts(r.confusion.counts()) << '\n';
    out << "baseline_confusion=" << (r.baseline_confusion ? join_counts(r.baseline_confusion->counts()) : kUndefined)
        << '\n';
    out << "alternative_accurate_fraction=" << optional_double(r.alternative_accurate_fraction) << '\n';
    out << "alternative_at_least_one=" << optional_double(r.alternative_at_least_one) << '\n';
    out << "replaced_outliers=" << r.replaced_outliers << '\n';
    out << "correct_replacement=" << optional_double(r.correct_replacement) << '\n';
    out << "epsilons=" << join_doubles(r.epsilons) << '\n';
    if (r.runtime) {
      out << "runtime=" << format_double(r.runtime->augment_seconds) << ',' << format_double(r.runtime->train_seconds)
          << ',' << format_double(r.runtime->predict_seconds) << '\n';
    }
    out << "end\n";
  }
}

std::vector<ExperimentReport> read_reports(std::istream& in, const std::string& source) {
  Lines lines(in, source);
  lines.header("ahcrf-report");
  std::vector<ExperimentReport> reports;
  std::string line;
  const auto optional_number = [&](const std::string& text) -> std::optional<double> {
    if (text == kUndefined) return std::nullopt;
    return lines.number(text);
  };
  const auto counts = [&](const std::string& text) {
    std::vector<std::size_t> values;
    if (text.empty()) return values;
    for (auto part : split(text, ',')) values.push_back(lines.count(part));
    return values;
  };
  const auto confusion = [&](const std::string& text, std::size_t classes) {
    auto cells = counts(text);
    if (cells.size() != classes * classes) lines.fail("confusion table size does not match class count");
    return ConfusionMatrix::from_counts(classes, std::move(cells));
  };
  static const std::vector<std::string> kKeys = {
      "task", "ratio", "classes", "test_count", "accuracy", "baseline_accuracy", "confusion", "baseline_confusion",
      "alternative_accurate_fraction", "alternative_at_least_one", "replaced_outliers", "correct_replacement",
      "epsilons"};
  while (lines.next(line)) {
    if (line != "row") lines.fail("expected 'row'");
    ExperimentReport r;
    for (const auto& key : kKeys) {
      const std::string entry = lines.require(key.c_str());
      const auto eq = entry.find('=');
      if (eq == std::string::npos || entry.substr(0, eq) != key) lines.fail("expected '" + key + "=...'");
      const std::string value = entry.substr(eq + 1);
      if (key == "task") {
        r.task = value;
      } else if (key == "ratio") {
        r.ratio = lines.number(value);
      } else if (key == "classes") {
        if (!value.empty()) {
          for (auto part : split(value, ',')) r.classes.emplace_back(part);
        }
      } else if (key == "test_count") {
        r.test_count = lines.count(value);
      } else if (key == "accuracy") {
        r.accuracy = optional_number(value);
      } else if (key == "baseline_accuracy") {
        r.baseline_accuracy = optional_number(value);
      } else if (key == "confusion") {
        r.confusion = confusion(value, r.classes.size());
      } else if (key == "baseline_confusion") {
        if (value != kUndefined) r.baseline_confusion = confusion(value, r.classes.size());
      } else if (key == "alternative_accurate_fraction") {
        r.alternative_accurate_fraction = optional_number(value);
      } else if (key == "alternative_at_least_one") {
        r.alternative_at_least_one = optional_number(value);
      } else if (key == "replaced_outliers") {
        r.replaced_outliers = lines.count(value);
      } else if (key == "correct_replacement") {
        r.correct_replacement = optional_number(value);
      } else if (key == "epsilons") {
        if (!value.empty()) {
          for (auto part : split(value, ',')) r.epsilons.push_back(lines.number(part));
        }
      }
    }
    std::string tail = lines.require("'end'");
    if (tail.rfind("runtime=", 0) == 0) {
      const auto parts = split(std::string_view(tail).substr(8), ',');
      if (parts.size() != 3) lines.fail("runtime needs three values");
      r.runtime = RuntimeStats{lines.number(parts[0]), lines.number(parts[1]), lines.number(parts[2])};
      tail = lines.require("'end'");
    }
    if (tail != "end") lines.fail("expected 'end'");
    reports.push_back(std::move(r));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// CSV tables

void write_train_trace_csv(std::ostream& out, const TrainReport& report) {
  out << "# ahcrf-trace " << kFormatVersion << '\n';
  out << "iteration,objective,gradient_norm\n";
  for (const auto& entry : report.trace) {
    out << entry.iteration << ',' << format_double(entry.value) << ',' << format_double(entry.gradient_norm) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << "# ahcrf-curve " << kFormatVersion << '\n';
  out << "task,ratio,accuracy,baseline_accuracy,alternative_accurate_fraction,alternative_at_least_one,"
         "replaced_outliers,correct_replacement\n";
  for (const auto& r : reports) {
    out << r.task << ',' << format_double(r.ratio) << ',' << optional_double(r.accuracy) << ','
        << optional_double(r.baseline_accuracy) << ',' << optional_double(r.alternative_accurate_fraction) << ','
        << optional_double(r.alternative_at_least_one) << ',' << r.replaced_outliers << ','
        << optional_double(r.correct_replacement) << '\n';
  }
}

void write_confusion_csv(std::ostream& out, const ExperimentReport& report) {
  out << "# ahcrf-confusion " << kFormatVersion << '\n';
  out << "truth";
  for (const auto& name : report.classes) out << ',' << name;
  out << '\n';
  for (std::size_t y = 0; y < report.classes.size(); ++y) {
    out << report.classes[y];
    for (std::size_t p = 0; p < report.classes.size(); ++p) out << ',' << report.confusion.at(y, p);
    out << '\n';
  }
}

std::string peek_format(const std::string& path) {
  return with_file(path, [](std::istream& in) {
    std::string line;
    std::getline(in, line);
    const auto parts = split_ws(line);
    return parts.empty() ? std::string() : std::string(parts[0]);
  });
}

// ---------------------------------------------------------------------------
// Paths

void save_dataset(const std::string& path, const Dataset& dataset) {
  to_file(path, [&](std::ostream& out) { write_dataset(out, dataset); });
}
Dataset load_dataset(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_dataset(in, path); });
}
void save_augmented(const std::string& path, const AugmentedDataset& dataset) {
  to_file(path, [&](std::ostream& out) { write_augmented(out, dataset); });
}
AugmentedDataset load_augmented(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_augmented(in, path); });
}
void save_model(const std::string& path, const ModelParameters& params, bool augmented) {
  to_file(path, [&](std::ostream& out) { write_model(out, params, augmented); });
}
LoadedModel load_model(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_model(in, path); });
}
void save_reports(const std::string& path, const std::vector<ExperimentReport>& reports) {
  to_file(path, [&](std::ostream& out) { write_reports(out, reports); });
}
std::vector<ExperimentReport> load_reports(const std::string& path) {
  return with_file(path, [&](std::istream& in) { return read_reports(in, path); });
}

}  // namespace ahcrf
