#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/crf.hpp"
#include "ahcrf/dataset.hpp"
#include "ahcrf/experiment.hpp"
#include "ahcrf/training.hpp"

// Text formats. Every file starts with "<magic> <version>". Numbers use
// the shortest representation that parses back to the same double, so a
// load followed by a save reproduces the input byte for byte.

namespace ahcrf {

inline constexpr int kFormatVersion = 1;

std::string format_double(double value);
double parse_double(std::string_view text);

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in, const std::string& source = "<dataset>");

void write_augmented(std::ostream& out, const AugmentedDataset& dataset);
AugmentedDataset read_augmented(std::istream& in, const std::string& source = "<augmented>");

void write_model(std::ostream& out, const ModelParameters& params, bool augmented);
struct LoadedModel {
  ModelParameters params;
  bool augmented = false;
};
LoadedModel read_model(std::istream& in, const std::string& source = "<model>");

void write_reports(std::ostream& out, const std::vector<ExperimentReport>& reports);
std::vector<ExperimentReport> read_reports(std::istream& in, const std::string& source = "<report>");

/// iteration,objective,gradient_norm
void write_train_trace_csv(std::ostream& out, const TrainReport& report);

/// One row per report: ratio, accuracies and replacement statistics.
void write_curve_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);

/// truth,predicted... table of one confusion matrix.
void write_confusion_csv(std::ostream& out, const ExperimentReport& report);

/// Magic word of the first line ("ahcrf-dataset", "ahcrf-augmented", ...).
std::string peek_format(const std::string& path);

// Path conveniences; errors name the path.
void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);
void save_augmented(const std::string& path, const AugmentedDataset& dataset);
AugmentedDataset load_augmented(const std::string& path);
void save_model(const std::string& path, const ModelParameters& params, bool augmented);
LoadedModel load_model(const std::string& path);
void save_reports(const std::string& path, const std::vector<ExperimentReport>& reports);
std::vector<ExperimentReport> load_reports(const std::string& path);

}  // namespace ahcrf
