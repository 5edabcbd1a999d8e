#include "mixedergo/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "mixedergo/error.hpp"
#include "mixedergo/serialize.hpp"

namespace mixedergo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, const fs::path& path, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    fail(Errc::parse_error, path.string() + ":" + std::to_string(line) + ": bad number '" +
                                std::string(field) + "'");
  }
  return v;
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const json& entry, const std::string& what) {
  if (!entry.is_string()) fail(Errc::parse_error, "manifest entry '" + what + "' must be a path string");
  const fs::path p = entry.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Errc::io_error, "cannot read " + path.string());
  return buf.str();
}

Matrix read_csv_matrix(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_number(rest.substr(0, comma), path, line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(Errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(rows.front().size()) + " fields");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Errc::parse_error, path.string() + ": no data");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Vector read_csv_vector(const fs::path& path) {
  const Matrix m = read_csv_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  fail(Errc::parse_error, path.string() + ": expected a single row or column");
}

std::string format_csv(const Matrix& m) {
  std::string out;
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      const int n = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out.append(buf, static_cast<std::size_t>(n));
    }
    out.push_back('\n');
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(Errc::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(Errc::io_error, "cannot move " + tmp.string() + " into place at " + path.string());
  }
}

GlmmDesign load_design_manifest(const fs::path& manifest) {
  const json j = parse_json_file(manifest);
  if (!j.is_object() || !j.contains("y") || !j.contains("x") || !j.contains("z_blocks")) {
    fail(Errc::parse_error, manifest.string() + ": manifest needs keys y, x, z_blocks");
  }
  if (!j["z_blocks"].is_array()) fail(Errc::parse_error, "z_blocks must be an array");
  const fs::path base = manifest.parent_path();
  Vector y = read_csv_vector(resolve(base, j["y"], "y"));
  Matrix x = read_csv_matrix(resolve(base, j["x"], "x"));
  std::vector<Matrix> zs;
  for (const auto& entry : j["z_blocks"]) zs.push_back(read_csv_matrix(resolve(base, entry, "z_blocks")));
  return GlmmDesign(std::move(y), std::move(x), std::move(zs));
}

fs::path save_design(const GlmmDesign& design, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::io_error, "cannot create " + dir.string());
  json manifest;
  write_file_atomic(dir / "y.csv", format_csv(design.y()));
  write_file_atomic(dir / "x.csv", format_csv(design.x()));
  manifest["y"] = "y.csv";
  manifest["x"] = "x.csv";
  manifest["z_blocks"] = json::array();
  for (std::size_t i = 0; i < design.n_blocks(); ++i) {
    const std::string name = "z" + std::to_string(i + 1) + ".csv";
    write_file_atomic(dir / name, format_csv(design.z_block(i)));
    manifest["z_blocks"].push_back(name);
  }
  const fs::path path = dir / "design.json";
  write_file_atomic(path, manifest.dump(2) + "\n");
  return path;
}

PriorSpec load_prior(const fs::path& path) {
  try {
    return prior_from_json(parse_json_file(path));
  } catch (const json::exception& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
}

void save_prior(const PriorSpec& prior, const fs::path& path) {
  write_file_atomic(path, to_json(prior).dump(2) + "\n");
}

}  // namespace mixedergo
