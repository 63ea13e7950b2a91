#include "lagfront_cli/scene.hpp"

#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "lagfront/errors.hpp"
#include "lagfront/fronts.hpp"

namespace lagfront::cli {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(where + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!out.values_.emplace(key, value).second) throw UsageError(where + ": duplicate key '" + key + "'");
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueFile::number(const std::string& key) const { return parse_number(get(key), origin_ + ": " + key); }

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t.empty()) throw UsageError(what + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw UsageError(what + ": '" + t + "' is not a finite number");
  }
  return v;
}

Range parse_range(const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ':')) parts.push_back(piece);
  if (parts.size() != 3) throw UsageError(what + ": expected lo:hi:step, got '" + trim(text) + "'");
  Range r{parse_number(parts[0], what), parse_number(parts[1], what), parse_number(parts[2], what)};
  if (!(r.step > 0.0)) throw UsageError(what + ": step must be positive");
  if (r.hi < r.lo) throw UsageError(what + ": empty range");
  return r;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ',')) out.push_back(parse_number(piece, what));
  return out;
}

std::vector<Vector> parse_vectors(const std::string& text, const std::string& what) {
  static const std::regex group(R"(\[([^\]]*)\])");
  std::vector<Vector> out;
  for (std::sregex_iterator it(text.begin(), text.end(), group), end; it != end; ++it) {
    const std::vector<double> v = parse_list((*it)[1].str(), what);
    out.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (!trim(std::regex_replace(text, group, "")).empty()) {
    throw UsageError(what + ": expected a list of [a, b, ...] groups");
  }
  return out;
}

FamilySpec family_from(const KeyValueFile& file) {
  const double k_value = file.number("k");
  const double n_value = file.number("n");
  if (k_value < 1 || n_value < 1 || k_value != std::floor(k_value) || n_value != std::floor(n_value)) {
    throw UsageError(file.origin() + ": k and n must be positive integers");
  }
  const auto k = static_cast<std::size_t>(k_value);
  const auto n = static_cast<std::size_t>(n_value);
  if (n > 3) throw UsageError(file.origin() + ": n must be at most 3");

  Box box;
  if (file.has("domain")) {
    for (const auto& v : parse_vectors(file.get("domain"), file.origin() + ": domain")) {
      if (v.size() != 2 || !(v(1) > v(0))) throw UsageError(file.origin() + ": domain entries must be [lo, hi] with lo < hi");
      box.push_back({v(0), v(1)});
    }
    if (box.size() != k + n) {
      throw UsageError(file.origin() + ": domain needs " + std::to_string(k + n) + " intervals (q then x)");
    }
  } else {
    box.assign(k + n, Interval{-2.0, 2.0});
  }

  FamilySpec spec;
  spec.expr = file.get("expr");
  spec.family = GeneratingFamily::from_expression(spec.expr, k, n, box);
  if (file.has("seeds")) {
    spec.q_seeds = parse_vectors(file.get("seeds"), file.origin() + ": seeds");
    for (const auto& s : spec.q_seeds) {
      if (static_cast<std::size_t>(s.size()) != k) throw UsageError(file.origin() + ": seeds must have k entries");
    }
  }
  if (spec.q_seeds.empty()) {
    const Box q_box(box.begin(), box.begin() + static_cast<std::ptrdiff_t>(k));
    spec.q_seeds = box_grid(q_box, k == 1 ? 9 : 3);
  }
  return spec;
}

FamilySpec load_family(const std::string& path) { return family_from(KeyValueFile::load(path)); }

ParametricHypersurface surface_from(const std::string& kind, const std::map<std::string, double>& params) {
  try {
    return surfaces::from_spec(kind, params);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

ParametricHypersurface surface_from(const KeyValueFile& file) {
  std::map<std::string, double> params;
  for (const auto& [key, value] : file.values()) {
    if (key == "kind") continue;
    params[key] = parse_number(value, file.origin() + ": " + key);
  }
  return surface_from(file.get("kind"), params);
}

void check_writable(const std::string& path) {
  if (path.empty()) return;
  namespace fs = std::filesystem;
  fs::path dir = fs::path(path).parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw UsageError("output directory '" + dir.string() + "' does not exist");
  if (::access(dir.c_str(), W_OK) != 0) throw UsageError("output directory '" + dir.string() + "' is not writable");
}

}  // namespace lagfront::cli
