#include "spdc/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spdc::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& data) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing: " + std::strerror(errno));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

std::string kernel_csv(const tpa::TpaKernel& kernel) {
  std::string out = "ks,ki,amplitude\n";
  for (std::size_t i = 0; i < kernel.grid_s.size(); ++i) {
    const std::string ks = format_number(kernel.grid_s[i]);
    for (std::size_t j = 0; j < kernel.grid_i.size(); ++j) {
      out += ks;
      out += ',';
      out += format_number(kernel.grid_i[j]);
      out += ',';
      out += format_number(kernel.amplitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out += '\n';
    }
  }
  return out;
}

std::string profile_csv(const std::string& x_name, const std::string& y_name,
                        const std::vector<double>& x, const std::vector<double>& y) {
  std::string out = x_name + "," + y_name + "\n";
  for (std::size_t j = 0; j < x.size() && j < y.size(); ++j) {
    out += format_number(x[j]) + "," + format_number(y[j]) + "\n";
  }
  return out;
}

std::string scan_csv(const detection::ScanSpectrum& scan) {
  return profile_csv("position_um_inv", "rate", scan.positions, scan.rates);
}

std::string crosstalk_csv(const detection::CrosstalkMatrix& matrix) {
  std::string out = "m,n,linear,log10\n";
  for (Eigen::Index m = 0; m < matrix.size(); ++m) {
    for (Eigen::Index n = 0; n < matrix.size(); ++n) {
      out += std::to_string(m) + "," + std::to_string(n) + "," + format_number(matrix.linear(m, n)) +
             "," + format_number(matrix.log10(m, n)) + "\n";
    }
  }
  return out;
}

std::string coefficients_csv(const schmidt::SchmidtDecomposition& dec) {
  std::string out = "mode,coefficient,weight\n";
  for (std::size_t m = 0; m < dec.size(); ++m) {
    const double c = dec.coefficients[m];
    out += std::to_string(m) + "," + format_number(c) + "," + format_number(c * c) + "\n";
  }
  return out;
}

std::string modes_csv(const schmidt::SchmidtDecomposition& dec, tpa::Axis which) {
  const bool sig = which == tpa::Axis::signal;
  const auto& grid = sig ? dec.grid_s : dec.grid_i;
  const Eigen::MatrixXd& modes = sig ? dec.signal_modes : dec.idler_modes;
  std::string out = "k_um_inv";
  for (Eigen::Index m = 0; m < modes.cols(); ++m) out += ",mode_" + std::to_string(m);
  out += '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out += format_number(grid[j]);
    for (Eigen::Index m = 0; m < modes.cols(); ++m) {
      out += ',';
      out += format_number(modes(static_cast<Eigen::Index>(j), m));
    }
    out += '\n';
  }
  return out;
}

std::string field_csv(const slm::FieldProfile1D& field) {
  std::string out = "x_um,re,im\n";
  for (std::size_t j = 0; j < field.size(); ++j) {
    out += format_number(field.x[j]) + "," + format_number(field.amplitude[j].real()) + "," +
           format_number(field.amplitude[j].imag()) + "\n";
  }
  return out;
}

std::vector<double> Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
  throw IoError("CSV has no column '" + name + "'");
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw IoError("CSV line " + std::to_string(line_no) + ": expected " +
                    std::to_string(t.header.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') {
        throw IoError("CSV line " + std::to_string(line_no) + ": not a number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError("CSV is empty");
  return t;
}

slm::FieldProfile1D parse_field_csv(const std::string& text) {
  const Table t = parse_csv(text);
  slm::FieldProfile1D f;
  f.x = t.column("x_um");
  const auto re = t.column("re");
  const auto im = t.column("im");
  for (std::size_t j = 0; j < re.size(); ++j) f.amplitude.emplace_back(re[j], im[j]);
  f.validate();
  return f;
}

}  // namespace spdc::io
