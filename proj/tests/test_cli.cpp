#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dfcal/csv.hpp"
#include "dfcal/rng.hpp"
#include "dfcal/serialize.hpp"

using namespace dfcal;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("dfcal_test_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string calibration_csv(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::ostringstream s;
  s << "score,label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rng.uniform();
    s << format_double(v) << "," << (rng.bernoulli(v * v) ? 1 : 0) << "\n";
  }
  return s.str();
}

}  // namespace

TEST_CASE("calibrate, predict and evaluate") {
  TempDir dir("pipeline");
  write(dir.file("cal.csv"), calibration_csv(2000, 1));
  auto r = run({"calibrate", "--bins", "10", "--alpha", "0.1", "--in", dir.file("cal.csv"), "--out",
                dir.file("model.json")});
  REQUIRE(r.code == 0);
  const auto model = calibrator_from_json(read_file(dir.file("model.json")));
  CHECK(model.stats().size() == 10);

  write(dir.file("test.csv"), "score\n0.05\n0.5\n0.97\n");
  r = run({"predict", "--model", dir.file("model.json"), "--in", dir.file("test.csv"),
           "--with-interval", "--with-set"});
  REQUIRE(r.code == 0);
  const auto t = parse_csv(r.out);
  CHECK(t.header == std::vector<std::string>{"score", "p", "lo", "hi", "set"});
  const auto p = t.numbers("p");
  const auto lo = t.numbers("lo");
  const auto hi = t.numbers("hi");
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] >= 0.0);
    CHECK(p[i] <= 1.0);
    CHECK(lo[i] <= p[i]);
    CHECK(p[i] <= hi[i]);
  }

  // Aligned evaluation on the calibration data.
  r = run({"predict", "--model", dir.file("model.json"), "--in", dir.file("cal.csv"), "--out",
           dir.file("pred.csv")});
  REQUIRE(r.code == 0);
  const auto cal = parse_csv(read_file(dir.file("cal.csv")));
  const auto pred = parse_csv(read_file(dir.file("pred.csv")));
  std::ostringstream joined;
  joined << "p,label\n";
  for (std::size_t i = 0; i < cal.rows.size(); ++i) {
    joined << pred.rows[i][1] << "," << cal.rows[i][1] << "\n";
  }
  write(dir.file("joined.csv"), joined.str());
  r = run({"evaluate", "--preds", dir.file("joined.csv"), "--bins", "10", "--svg",
           dir.file("diagram.svg")});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("bin,lo,hi,count,fp,mp\n", 0) == 0);
  const auto pos = r.out.find("ece=");
  REQUIRE(pos != std::string::npos);
  const double ece = std::stod(r.out.substr(pos + 4));
  CHECK(ece <= model.epsilon_star());
  CHECK(fs::exists(dir.file("diagram.svg")));
}

TEST_CASE("malformed label is reported with its line") {
  TempDir dir("badlabel");
  write(dir.file("cal.csv"), "score,label\n0.1,0\n0.2,1\n0.3,0\n0.4,1\n0.5,0\n0.6,2\n0.7,1\n");
  const auto r = run({"calibrate", "--bins", "2", "--in", dir.file("cal.csv"), "--out",
                      dir.file("model.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 7") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  CHECK_FALSE(fs::exists(dir.file("model.json")));
}

TEST_CASE("usage and schema errors") {
  TempDir dir("errors");
  CHECK(run({"calibrate"}).code == 1);
  CHECK(run({"no-such-command"}).code == 1);
  CHECK(run({"calibrate", "--in", dir.file("missing.csv")}).code == 1);
  write(dir.file("cal.csv"), calibration_csv(100, 2));
  CHECK(run({"calibrate", "--in", dir.file("cal.csv"), "--alpha", "1.5"}).code == 1);
  REQUIRE(run({"bin-fit", "--in", dir.file("cal.csv"), "--out", dir.file("scheme.json")}).code == 0);
  write(dir.file("s.csv"), "score\n0.5\n");
  const auto r = run({"predict", "--model", dir.file("scheme.json"), "--in", dir.file("s.csv")});
  CHECK(r.code == 1);
  CHECK(r.err.find("schema") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("commands are idempotent") {
  TempDir dir("idem");
  write(dir.file("cal.csv"), calibration_csv(500, 3));
  for (const std::string mode : {"closed", "stitched"}) {
    const auto a = run({"stream", "--in", dir.file("cal.csv"), "--bins", "4", "--mode", mode});
    const auto b = run({"stream", "--in", dir.file("cal.csv"), "--bins", "4", "--mode", mode});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("n,bin,mean,lo,hi\n", 0) == 0);
  }
  REQUIRE(run({"calibrate", "--in", dir.file("cal.csv"), "--out", dir.file("a.json")}).code == 0);
  REQUIRE(run({"calibrate", "--in", dir.file("cal.csv"), "--out", dir.file("b.json")}).code == 0);
  CHECK(read_file(dir.file("a.json")) == read_file(dir.file("b.json")));

  const auto s1 = run({"simulate", "--experiment", "adversary", "--trials", "3", "--seed", "9",
                       "--out", dir.file("sim1"), "--threads", "2"});
  const auto s2 = run({"simulate", "--experiment", "adversary", "--trials", "3", "--seed", "9",
                       "--out", dir.file("sim2"), "--threads", "1"});
  REQUIRE(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(read_file(dir.file("sim1") + "/summary.csv") == read_file(dir.file("sim2") + "/summary.csv"));
  CHECK(read_file(dir.file("sim1") + "/trial_0002.csv") ==
        read_file(dir.file("sim2") + "/trial_0002.csv"));
}

TEST_CASE("shift workflow") {
  TempDir dir("shift");
  CounterRng rng(4);
  std::ostringstream src, tgt, lab;
  src << "x1,x2\n";
  tgt << "x1,x2\n";
  lab << "score,label,x1,x2\n";
  for (int i = 0; i < 300; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    src << format_double(a) << "," << format_double(b) << "\n";
    tgt << format_double(std::sqrt(rng.uniform())) << "," << format_double(rng.uniform()) << "\n";
    lab << format_double(a) << "," << (rng.bernoulli(a) ? 1 : 0) << "," << format_double(a) << ","
        << format_double(b) << "\n";
  }
  write(dir.file("src.csv"), src.str());
  write(dir.file("tgt.csv"), tgt.str());
  write(dir.file("lab.csv"), lab.str());
  auto r = run({"dr-fit", "--source", dir.file("src.csv"), "--target", dir.file("tgt.csv"),
                "--sigma-grid", "0.1,1,3", "--lambda-grid", "0.01,1,3", "--centers", "20",
                "--clip-lower", "0.05", "--clip-upper", "10", "--out", dir.file("ratio.json")});
  REQUIRE(r.code == 0);
  CHECK(model_type(read_file(dir.file("ratio.json"))) == "density_ratio");
  r = run({"shift-calibrate", "--in", dir.file("lab.csv"), "--ratio", dir.file("ratio.json"),
           "--bins", "3", "--out", dir.file("shift.json")});
  REQUIRE(r.code == 0);
  write(dir.file("s.csv"), "score\n0.2\n0.9\n");
  r = run({"predict", "--model", dir.file("shift.json"), "--in", dir.file("s.csv"),
           "--with-interval"});
  REQUIRE(r.code == 0);
  CHECK(parse_csv(r.out).rows.size() == 2);
}
