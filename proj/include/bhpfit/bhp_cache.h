#ifndef BHPFIT_BHP_CACHE_H_
#define BHPFIT_BHP_CACHE_H_

#include <filesystem>
#include <optional>

#include "bhpfit/bhp_dist.h"

namespace bhpfit {

// Environment variable that overrides the cache location.
inline constexpr const char* kCacheDirEnv = "BHPFIT_CACHE_DIR";

// $BHPFIT_CACHE_DIR, else $XDG_CACHE_HOME/bhpfit, else ~/.cache/bhpfit.
std::filesystem::path default_cache_dir();

// File name derived from (L, orientation, grid, quadrature parameters).
std::string table_cache_name(int side, Orientation orientation,
                             const GridSpec& grid, const QuadratureSpec& quad);

// Table file: one metadata line, a column header, then "x,pdf,cdf" rows with
// 17 significant digits. Written to a temporary file and renamed into place.
void write_table(const std::filesystem::path& path, const BhpTable& table);
BhpTable read_table(const std::filesystem::path& path);

struct CachedTable {
  BhpTable table;
  std::filesystem::path path;
  bool from_cache;
};

// Loads the table from `cache_dir` when present, otherwise builds and stores
// it. An unreadable or mismatched cache file is rebuilt.
CachedTable load_or_build_table(const std::filesystem::path& cache_dir,
                                int side, Orientation orientation,
                                const GridSpec& grid = {},
                                const QuadratureSpec& quad = {});

}  // namespace bhpfit

#endif  // BHPFIT_BHP_CACHE_H_
