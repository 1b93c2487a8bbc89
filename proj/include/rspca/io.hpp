#pragma once

// File formats: CSV data/streams, the versioned model document, and the
// key/value experiment configuration file.

#include <map>
#include <string>
#include <vector>

#include "rspca/monitor.hpp"
#include "rspca/types.hpp"

namespace rspca {

// One sample per row; optional header row (detected by non-numeric cells).
// Malformed rows raise InputError naming the 1-based row number.
Matrix read_csv_matrix(const std::string& path, bool* had_header = nullptr);

void write_csv_matrix(const std::string& path, const Matrix& values,
                      const std::vector<std::string>& header = {});

// Per-sample score rows: index, latent_stat, residual_stat, alarms.
void write_scores_csv(const std::string& path,
                      const std::vector<MonitorScore>& scores);

// Self-describing versioned text document holding everything scoring and
// diagnosis need. Numbers are printed with 17 significant digits so a
// write/read/write cycle is byte-identical; an FNV-1a checksum guards loads.
void save_model(const std::string& path, const FittedModel& model, int n_fit);

struct LoadedModel {
  FittedModel model;
  int n_fit = 0;
};
LoadedModel load_model(const std::string& path);

// `key = value` lines with optional [section] headers; keys are returned as
// "section.key". '#' starts a comment.
std::map<std::string, std::string> parse_config(const std::string& path);

std::string format_double(double v);  // shortest exact decimal form

}  // namespace rspca
