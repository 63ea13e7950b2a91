#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "lagfront/errors.hpp"
#include "lagfront_cli/commands.hpp"
#include "lagfront_cli/emit.hpp"
#include "lagfront_cli/scene.hpp"

using namespace lagfront;
using namespace lagfront::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "lagfront_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

const char* kCuspFamily =
    "k = 1\n"
    "n = 2\n"
    "expr = \"q1^4 + x1*q1^2 + x2*q1\"\n"
    "domain = [-1.5,1.5] [-2,2] [-2,2]\n";

}  // namespace

TEST_CASE("empty point set gives a header-only CSV") {
  const std::string path = (scratch_dir() / "empty.csv").string();
  emit_csv(path, {}, 2, 1);
  CHECK(read_file(path) == "t,x1,x2,q1,label\n");
  emit_csv(path, {}, 3, 2);
  CHECK(read_file(path) == "t,x1,x2,x3,q1,q2,label\n");
}

TEST_CASE("CSV rows use nine significant digits") {
  const std::string path = (scratch_dir() / "row.csv").string();
  Vector x(2), q(1);
  x << 1.0 / 3.0, -0.0;
  q << 2.0;
  emit_csv(path, {{0.5, x, q, "front"}}, 2, 1);
  CHECK(read_file(path) == "t,x1,x2,q1,label\n0.5,0.333333333,0,2,front\n");
  x(0) = std::nan("");
  CHECK_THROWS_AS(emit_csv(path, {{0.5, x, q, "front"}}, 2, 1), FormatError);
}

TEST_CASE("two-point curve gives a single polyline with two pairs") {
  const std::string path = (scratch_dir() / "two.svg").string();
  Polyline line = {(Vector(2) << 0.0, 0.0).finished(), (Vector(2) << 1.0, 1.0).finished()};
  emit_svg(path, {{"caustic", {line}}}, std::nullopt);
  const std::string svg = read_file(path);
  CHECK(count_of(svg, "<polyline") == 1);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  const std::regex points("class=\"caustic\" points=\"([^\"]*)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, points));
  CHECK(count_of(m[1].str(), ",") == 2);
  CHECK(count_of(m[1].str(), " ") == 1);
}

TEST_CASE("SVG y axis points down the page") {
  const std::string path = (scratch_dir() / "flip.svg").string();
  Polyline line = {(Vector(2) << 0.0, 0.0).finished(), (Vector(2) << 0.0, 1.0).finished()};
  emit_svg(path, {{"front", {line}}}, parse_viewport("-1,1,-1,1"));
  const std::regex points("points=\"([-0-9.]+),([-0-9.]+) ([-0-9.]+),([-0-9.]+)\"");
  std::smatch m;
  const std::string svg = read_file(path);
  REQUIRE(std::regex_search(svg, m, points));
  CHECK(std::stod(m[4].str()) < std::stod(m[2].str()));
}

TEST_CASE("range and list parsing") {
  const Range r = parse_range(" -2.8:-0.4:0.2", "--r");
  CHECK(r.values().size() == 13);
  CHECK_THROWS_AS(parse_range("1:0:0.1", "--t"), UsageError);
  CHECK_THROWS_AS(parse_range("0:1:0", "--t"), UsageError);
  CHECK_THROWS_AS(parse_range("0:1", "--t"), UsageError);
  CHECK(parse_list("1, 2,3", "--x") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(parse_list("1,x", "--x"), UsageError);
}

TEST_CASE("key-value files") {
  const KeyValueFile f = KeyValueFile::parse("# comment\na = 1\nb = \"x y\"  # trailing\n", "mem");
  CHECK(f.get("b") == "x y");
  CHECK(f.number("a") == 1.0);
  CHECK_THROWS_AS(KeyValueFile::parse("a = 1\na = 2\n", "mem"), UsageError);
  CHECK_THROWS_AS(KeyValueFile::parse("novalue\n", "mem"), UsageError);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({}).code == kExitUsage);
  CHECK(run_cli({"--help"}).code == kExitOk);
  CHECK(run_cli({"nonsense"}).code == kExitUsage);
  CHECK(run_cli({"burgers", "--t", "1:0:0.1"}).code == kExitUsage);
  CHECK(run_cli({"verify", "--family", "/no/such/file.fam"}).code == kExitUsage);

  const Result syntax = run_cli({"versal", "--f", "q1^"});
  CHECK(syntax.code == kExitUsage);
  CHECK(syntax.err.find("SyntaxError") != std::string::npos);

  const Result numerical = run_cli({"versal", "--f", "1 + q1^2"});
  CHECK(numerical.code == kExitNumerical);
  CHECK(numerical.err.find("NotSingularGerm") != std::string::npos);

  const Result unknown = run_cli({"ode-gallery", "--germ", "9"});
  CHECK(unknown.code == kExitNumerical);
  CHECK(unknown.err.find("UnknownGerm") != std::string::npos);
}

TEST_CASE("unwritable output is rejected before any work") {
  const Result r = run_cli({"evolute", "--curve", "ellipse", "--a", "2", "--b", "1", "--csv", "/no/such/dir/x.csv"});
  CHECK(r.code == kExitUsage);
  CHECK(r.out.empty());
}

TEST_CASE("every subcommand documents --seed-density and --tol") {
  for (const char* cmd : {"verify", "front", "big-front", "caustic", "maxwell", "discriminant", "evolute", "parallels",
                          "burgers", "ode-gallery", "versal"}) {
    CAPTURE(cmd);
    const Result r = run_cli({cmd, "--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("--seed-density") != std::string::npos);
    CHECK(r.out.find("--tol") != std::string::npos);
  }
}

TEST_CASE("verify reports the three checks") {
  const std::string fam = write_file("cusp.fam", kCuspFamily);
  const Result r = run_cli({"verify", "--family", fam});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("morse-family: PASS") != std::string::npos);
  CHECK(r.out.find("graph-like: PASS") != std::string::npos);
  CHECK(r.out.find("non-degeneracy: ") != std::string::npos);
}

TEST_CASE("burgers reports the breaking time") {
  const Result r = run_cli({"burgers", "--t", " 0:1:0.001", "--report-breaking", "--count-at", "3.14159265358979,0.8"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("t* = 0.5000") != std::string::npos);
  CHECK(r.out.find(": 3\n") != std::string::npos);
}

TEST_CASE("config file values yield to flags") {
  const std::string cfg = write_file("burgers.cfg", "t = \"0:0.4:0.001\"\nseed-density = 100\n");
  const Result from_file = run_cli({"burgers", "--config", cfg, "--report-breaking"});
  CHECK(from_file.code == kExitOk);
  CHECK(from_file.out.find("strips: 100") != std::string::npos);
  CHECK(from_file.out.find("t* = none") != std::string::npos);

  const Result overridden = run_cli({"burgers", "--config", cfg, "--t", "0:1:0.001", "--report-breaking"});
  CHECK(overridden.out.find("strips: 100") != std::string::npos);
  CHECK(overridden.out.find("t* = 0.50") != std::string::npos);
}

TEST_CASE("parallels of the ellipse: layout and cusps on the evolute") {
  const std::string svg = (scratch_dir() / "parallels.svg").string();
  const std::string csv = (scratch_dir() / "parallels.csv").string();
  const Result r = run_cli({"parallels", "--curve", "ellipse", "--a", "2", "--b", "1", "--r", " -2.8:-0.4:0.2", "--svg",
                            svg, "--csv", csv});
  REQUIRE(r.code == kExitOk);
  const std::string text = read_file(svg);
  CHECK(count_of(text, "class=\"front\" points") == 13);
  CHECK(count_of(text, "class=\"caustic\" points") >= 1);
  CHECK(read_file(csv).rfind("t,x1,x2,q1,label\n", 0) == 0);
  const std::regex cusps("cusps: ([0-9]+), on the evolute within [^:]*: ([0-9]+)");
  std::smatch m;
  REQUIRE(std::regex_search(r.out, m, cusps));
  CHECK(std::stoi(m[1].str()) > 0);
  CHECK(m[1].str() == m[2].str());
}

TEST_CASE("outputs are byte-identical across runs") {
  const std::string fam = write_file("cusp_det.fam", kCuspFamily);
  std::string first_csv, first_svg;
  for (int i = 0; i < 2; ++i) {
    const std::string csv = (scratch_dir() / ("det" + std::to_string(i) + ".csv")).string();
    const std::string svg = (scratch_dir() / ("det" + std::to_string(i) + ".svg")).string();
    REQUIRE(run_cli({"discriminant", "--family", fam, "--csv", csv, "--svg", svg}).code == kExitOk);
    if (i == 0) {
      first_csv = read_file(csv);
      first_svg = read_file(svg);
    } else {
      CHECK(read_file(csv) == first_csv);
      CHECK(read_file(svg) == first_svg);
    }
  }
  CHECK(first_csv.find(",caustic\n") != std::string::npos);
  CHECK(first_csv.find(",maxwell\n") != std::string::npos);
}

TEST_CASE("ode-gallery and versal summaries") {
  const Result g = run_cli({"ode-gallery", "--germ", "5", "--t", "-0.5:0.5:0.5"});
  REQUIRE(g.code == kExitOk);
  CHECK(count_of(g.out, " 0 cusp(s)") == 3);
  CHECK(g.out.find("delta: 0 point(s)") == std::string::npos);

  const Result stable = run_cli({"versal", "--f", "q1^4", "--dfdx", "q1;q1^2"});
  CHECK(stable.out.find("S.P+ versality: PASS") != std::string::npos);
  const Result deficient = run_cli({"versal", "--f", "q1^4", "--dfdx", "q1"});
  CHECK(deficient.out.find("S.P+ versality: FAIL (defect 1") != std::string::npos);
  CHECK(deficient.out.find("lagrangian stability: FAIL") != std::string::npos);
}
