#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdc/detection.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/slm.hpp"
#include "spdc/tpa_kernel.hpp"

// CSV and sidecar serialization. Numbers are printed with 17 significant
// digits in scientific notation so output is byte-stable across runs.
namespace spdc::io {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Write `data` to `path` through a temporary file and rename.
/// Parent directories are created.
void write_atomic(const std::filesystem::path& path, const std::string& data);

std::string read_file(const std::filesystem::path& path);

std::string format_number(double v);

std::string kernel_csv(const tpa::TpaKernel& kernel);
std::string profile_csv(const std::string& x_name, const std::string& y_name,
                        const std::vector<double>& x, const std::vector<double>& y);
std::string scan_csv(const detection::ScanSpectrum& scan);
std::string crosstalk_csv(const detection::CrosstalkMatrix& matrix);
std::string coefficients_csv(const schmidt::SchmidtDecomposition& dec);
/// One column per retained mode.
std::string modes_csv(const schmidt::SchmidtDecomposition& dec, tpa::Axis which);
std::string field_csv(const slm::FieldProfile1D& field);

/// Parses "x_um,re,im" rows; the header line is required.
slm::FieldProfile1D parse_field_csv(const std::string& text);

/// Numeric table parsed from a headed CSV file.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

Table parse_csv(const std::string& text);

}  // namespace spdc::io
