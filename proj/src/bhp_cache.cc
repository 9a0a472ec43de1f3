#include "bhpfit/bhp_cache.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "bhpfit/errors.h"

namespace bhpfit {
namespace fs = std::filesystem;
namespace {

constexpr int kFormatVersion = 1;

std::string num17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::map<std::string, std::string> parse_metadata(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

double to_double(const std::map<std::string, std::string>& kv,
                 const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("table metadata lacks '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ParseError("table metadata '" + key + "' is not a number");
  }
}

}  // namespace

fs::path default_cache_dir() {
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return fs::path(xdg) / "bhpfit";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".cache" / "bhpfit";
  }
  return fs::temp_directory_path() / "bhpfit-cache";
}

std::string table_cache_name(int side, Orientation orientation,
                             const GridSpec& grid, const QuadratureSpec& quad) {
  return "bhp_v" + std::to_string(kFormatVersion) + "_L" +
         std::to_string(side) + "_" + orientation_name(orientation) + "_" +
         short_num(grid.lower) + "_" + short_num(grid.upper) + "_" +
         short_num(grid.step) + "_q" + short_num(quad.panel_width) + "x" +
         std::to_string(quad.order) + "_" + short_num(quad.envelope_cutoff) +
         "_" + short_num(quad.extent_scale) + ".csv";
}

void write_table(const fs::path& path, const BhpTable& table) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  // Unique temporary name in the same directory so the rename is atomic.
  std::random_device rd;
  const fs::path tmp =
      path.string() + ".tmp" + std::to_string(rd()) + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write table cache " + tmp.string());
    const auto& spec = table.spectrum();
    const auto& grid = table.grid();
    const auto& quad = table.quadrature();
    out << "# bhp-table format=" << kFormatVersion << " L=" << spec.side
        << " N=" << spec.sites << " eigenvalues=" << spec.eigenvalues.size()
        << " spectrum=" << kSpectrumFormula
        << " orientation=" << orientation_name(table.orientation())
        << " grid_lower=" << num17(grid.lower)
        << " grid_upper=" << num17(grid.upper) << " step=" << num17(grid.step)
        << " panel_width=" << num17(quad.panel_width)
        << " order=" << quad.order
        << " envelope_cutoff=" << num17(quad.envelope_cutoff)
        << " extent_scale=" << num17(quad.extent_scale)
        << " x_max=" << num17(table.x_max())
        << " normalization_defect=" << num17(table.normalization_defect())
        << "\n";
    out << "x,pdf,cdf\n";
    const auto& xs = table.xs();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << num17(xs[i]) << ',' << num17(table.pdf_values()[i]) << ','
          << num17(table.cdf_values()[i]) << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing table cache " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move table cache into place: " + ec.message());
  }
}

BhpTable read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table cache " + path.string());
  std::string meta;
  std::getline(in, meta);
  if (meta.rfind("# bhp-table", 0) != 0) {
    throw ParseError("not a BHP table file: " + path.string(), 1);
  }
  const auto kv = parse_metadata(meta);
  if (static_cast<int>(to_double(kv, "format")) != kFormatVersion) {
    throw ParseError("unsupported table format version", 1);
  }
  const int side = static_cast<int>(to_double(kv, "L"));
  const auto orient_it = kv.find("orientation");
  if (orient_it == kv.end()) throw ParseError("table metadata lacks orientation", 1);
  const Orientation orientation = parse_orientation(orient_it->second);
  GridSpec grid{to_double(kv, "grid_lower"), to_double(kv, "grid_upper"),
                to_double(kv, "step")};
  QuadratureSpec quad{to_double(kv, "panel_width"),
                      static_cast<int>(to_double(kv, "order")),
                      to_double(kv, "envelope_cutoff"),
                      to_double(kv, "extent_scale")};
  const double x_max = to_double(kv, "x_max");

  std::string line;
  std::getline(in, line);
  if (line != "x,pdf,cdf") throw ParseError("missing column header", 2);
  std::vector<double> pdf;
  pdf.reserve(grid.count());
  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double x = 0.0, f = 0.0, c = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &f, &c) != 3) {
      throw ParseError("malformed table row", row);
    }
    pdf.push_back(f);
  }
  try {
    return BhpTable::from_rows(side, orientation, grid, quad, x_max,
                               std::move(pdf));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("inconsistent table file: ") + e.what());
  }
}

CachedTable load_or_build_table(const fs::path& cache_dir, int side,
                                Orientation orientation, const GridSpec& grid,
                                const QuadratureSpec& quad) {
  const fs::path path =
      cache_dir / table_cache_name(side, orientation, grid, quad);
  if (fs::exists(path)) {
    try {
      return {read_table(path), path, true};
    } catch (const std::exception&) {
      // Corrupt or stale file: fall through and rebuild.
    }
  }
  BhpTable table = BhpTable::build(side, orientation, grid, quad);
  write_table(path, table);
  return {std::move(table), path, false};
}

}  // namespace bhpfit
