#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "minorant/error.hpp"
#include "minorant/ext_real.hpp"
#include "minorant/io.hpp"

namespace minorant::io {

std::string field_csv(const GridDomain& d, const GridFunction& f) {
  check_shape(d, f);
  std::string out = "ix,iy,x,y,value\n";
  for (std::size_t p : d.inside_nodes()) {
    out += std::to_string(d.ix(p)) + ',' + std::to_string(d.iy(p)) + ',' + ExtReal(d.x(p)).to_string() + ',' +
           ExtReal(d.y(p)).to_string() + ',' + ExtReal(f[p]).to_string() + '\n';
  }
  return out;
}

std::string field_pgm(const GridDomain& d, const GridFunction& f) {
  check_shape(d, f);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t p : d.inside_nodes()) {
    if (!std::isfinite(f[p])) continue;
    lo = std::min(lo, f[p]);
    hi = std::max(hi, f[p]);
  }
  std::ostringstream os;
  os << "P2\n" << d.nx() << ' ' << d.ny() << "\n255\n";
  // Top row first so that larger iy appears higher.
  for (int iy = d.ny() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < d.nx(); ++ix) {
      const std::size_t p = d.index(ix, iy);
      int g = 0;
      if (d.is_inside(p) && std::isfinite(f[p]))
        g = hi > lo ? static_cast<int>(std::lround(255.0 * (f[p] - lo) / (hi - lo))) : 255;
      os << g << (ix + 1 < d.nx() ? ' ' : '\n');
    }
  }
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + target.string());
  }
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "pgm") return Format::Pgm;
  if (s == "all") return Format::All;
  throw Error(ErrorCode::ParseError, "unknown format '" + s + "'");
}

ReportCheck check_report(const std::string& text) {
  using json = nlohmann::json;
  ReportCheck rc;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
  auto value = [&](const char* key) -> std::optional<double> {
    const auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (it->is_number()) return it->get<double>();
    if (it->is_string()) return ExtReal::parse(it->get<std::string>()).value();
    return std::nullopt;
  };
  const auto primal = value("primal");
  const auto dual = value("dual");
  const auto gap = value("gap");
  rc.has_primal_dual = primal.has_value() && dual.has_value();
  if (rc.has_primal_dual && gap) {
    const double g = *primal == *dual ? 0.0 : std::abs(*primal - *dual);
    rc.gap_matches = g == *gap || std::abs(g - *gap) <= 1e-12 * (1.0 + std::abs(g));
  }
  return rc;
}

}  // namespace minorant::io
