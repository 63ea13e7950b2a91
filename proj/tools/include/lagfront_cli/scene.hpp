#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagfront/genfam.hpp"
#include "lagfront/geomapps.hpp"
#include "lagfront/linalg.hpp"

namespace lagfront::cli {

// Bad flags, files or values: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `key = value` lines; `#` starts a comment, values may be double-quoted.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<text>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

std::string trim(const std::string& s);
double parse_number(const std::string& text, const std::string& what);
// "lo:hi:step" with hi >= lo and step > 0; surrounding spaces are allowed.
Range parse_range(const std::string& text, const std::string& what);
// "[a, b] [c, d] ..." as a list of vectors.
std::vector<Vector> parse_vectors(const std::string& text, const std::string& what);
// Comma-separated numbers.
std::vector<double> parse_list(const std::string& text, const std::string& what);

struct FamilySpec {
  GeneratingFamily family;
  std::string expr;
  std::vector<Vector> q_seeds;  // grid over the q box when the file lists none
};

// Keys: k, n, expr, domain (one [lo,hi] per q then x variable), seeds.
FamilySpec load_family(const std::string& path);
FamilySpec family_from(const KeyValueFile& file);

// Keys: kind plus numeric parameters (r or R, a, b, c, u_lo, u_hi).
ParametricHypersurface surface_from(const KeyValueFile& file);
ParametricHypersurface surface_from(const std::string& kind, const std::map<std::string, double>& params);

// Throws UsageError unless the directory that will hold `path` exists and is
// writable.
void check_writable(const std::string& path);

}  // namespace lagfront::cli
