#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "zdiheat/config.hpp"
#include "zdiheat/experiment.hpp"

using namespace zdiheat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zdiheat_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.uniform_m = 4;
  c.nx = 60;
  c.nt = 11;
  c.t_end = 1.5;
  c.sigma = 1.5;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults describe the reproduction scenario") {
    const auto c = parse_config("");
    CHECK(c.k0 == 10.0);
    CHECK(c.k1 == 10.0);
    CHECK(c.uniform_m == 12);
    CHECK(c.sigma == 1.1);
    CHECK(c.nx == 200);
    CHECK(c.nt == 50);
    CHECK(c.t_end == 2.0);
    CHECK(c.initial == InitialKind::kCosine);
  }
  SUBCASE("keys, comments and blank lines") {
    const auto c = parse_config(
        "# scenario\n\nbc.k0 = 2.5\nbc.k1=4 # trailing\nlayout.points = 0.2, 0.5, 0.8\n"
        "gevrey.sigma = 1.3\ngevrey.form = standard\ngrid.nx = 101\ninitial = zero\n"
        "target = values\ntarget.values = 0.1, 0.2, 0.3\nreference.gamma = printed\noutput.dir = results\n");
    CHECK(c.k0 == 2.5);
    CHECK(c.k1 == 4.0);
    CHECK(c.points == std::vector<double>{0.2, 0.5, 0.8});
    CHECK(c.form == BumpForm::kStandard);
    CHECK(c.nx == 101);
    CHECK(c.initial == InitialKind::kZero);
    CHECK(c.target == TargetKind::kValues);
    CHECK(c.gamma == GammaForm::kPrinted);
    CHECK(c.output_dir == "results");
  }
  SUBCASE("round trip") {
    auto c = parse_config("layout.points = 0.1, 0.45\ngevrey.sigma = 1.7\ntarget = values\ntarget.values = 1, -2\n");
    const auto again = parse_config(format_config(c));
    CHECK(format_config(again) == format_config(c));
    CHECK(again.points == c.points);
    CHECK(again.sigma == c.sigma);
  }
  SUBCASE("diagnostics name file, line and field") {
    const auto msg = error_message([] { parse_config("bc.k0 = 1\nbc.k1 = abc\n", "exp.cfg"); });
    CHECK(msg.find("exp.cfg:2") != std::string::npos);
    CHECK(msg.find("bc.k1") != std::string::npos);
    CHECK(ZDH_ERROR_KIND(parse_config("grid.nx 200\n")) == ErrorKind::kConfig);
    CHECK(ZDH_ERROR_KIND(parse_config("bogus.key = 1\n")) == ErrorKind::kConfig);
    CHECK(ZDH_ERROR_KIND(parse_config("grid.nx = 10\ngrid.nx = 20\n")) == ErrorKind::kConfig);
    CHECK(ZDH_ERROR_KIND(parse_config("grid.nx = -3\n")) == ErrorKind::kConfig);
    CHECK(ZDH_ERROR_KIND(load_config("/nonexistent/zdiheat.cfg")) == ErrorKind::kIo);
  }
  SUBCASE("validation") {
    ExperimentConfig c;
    c.k0 = 0.0;
    c.k1 = 0.0;
    CHECK(ZDH_ERROR_KIND(validate_config(c)) == ErrorKind::kInvalidArgument);
    CHECK(error_message([&] { validate_config(c); }).find("bc") != std::string::npos);
    ExperimentConfig d;
    d.points = {0.3, 0.3, 0.6};
    CHECK(ZDH_ERROR_KIND(validate_config(d)) == ErrorKind::kInvalidArgument);
    CHECK(error_message([&] { validate_config(d); }).find("layout") != std::string::npos);
    ExperimentConfig e;
    e.target = TargetKind::kValues;
    e.target_values = {1.0, 2.0};
    CHECK(ZDH_ERROR_KIND(validate_config(e)) == ErrorKind::kConfig);
  }
  SUBCASE("divergent sigma is rejected at validation") {
    ExperimentConfig c;
    c.sigma = 2.5;
    bool caught = false;
    try {
      synthesize(c);
    } catch (const StageError& e) {
      caught = true;
      CHECK(e.stage() == kValidateStage);
      CHECK(e.kind() == ErrorKind::kDivergentSeries);
    }
    CHECK(caught);
  }
}

TEST_CASE("run outputs") {
  const auto cfg = small_config();
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  const auto ra = run(cfg, a.string());
  run(cfg, b.string());

  for (const char* name : {"field.csv", "controls.csv", "errors.csv", "field.svg", "controls.svg", "errors.svg"}) {
    CAPTURE(name);
    CHECK(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(fs::exists(a / "report.txt"));

  SUBCASE("checksums match the files") {
    REQUIRE(ra.files.size() == 6);
    const auto report = slurp(a / "report.txt");
    for (const auto& f : ra.files) {
      CHECK(f.sha256 == sha256_file((a / f.name).string()));
      CHECK(f.bytes == fs::file_size(a / f.name));
      CHECK(report.find(f.sha256 + "  " + std::to_string(f.bytes) + "  " + f.name) != std::string::npos);
    }
    // Known digest of "abc".
    std::ofstream(a / "abc.txt", std::ios::binary) << "abc";
    CHECK(sha256_file((a / "abc.txt").string()) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
  SUBCASE("csv schemas and finiteness") {
    const auto field = lines(slurp(a / "field.csv"));
    CHECK(field.front() == "t,x,z");
    CHECK(field.size() == 1 + cfg.nx * cfg.nt);
    CHECK(lines(slurp(a / "controls.csv")).front() == "t,u_1,u_2,u_3,u_4");
    CHECK(lines(slurp(a / "errors.csv")).front() == "t,e_1,e_2,e_3,e_4,max_abs");
    for (const char* name : {"field.csv", "controls.csv", "errors.csv"}) {
      const auto rows = lines(slurp(a / name));
      for (std::size_t r = 1; r < rows.size(); ++r) {
        std::istringstream in(rows[r]);
        for (std::string cell; std::getline(in, cell, ',');) CHECK(std::isfinite(std::stod(cell)));
      }
    }
  }
  SUBCASE("report contents") {
    CHECK(ra.achieved_orders.size() == 4);
    CHECK(ra.condition_estimate > 1.0);
    CHECK(ra.final_max_error <= 1e-2 * ra.max_target);
    CHECK(ra.total_seconds() > 0.0);
  }
}

TEST_CASE("zero target and zero initial give zero outputs") {
  auto cfg = small_config();
  cfg.initial = InitialKind::kZero;
  cfg.target = TargetKind::kValues;
  cfg.target_values = std::vector<double>(4, 0.0);
  const auto dir = scratch("zero");
  const auto r = run(cfg, dir.string());
  CHECK(r.final_max_error == 0.0);
  for (const char* name : {"field.csv", "controls.csv", "errors.csv"}) {
    const auto rows = lines(slurp(dir / name));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      std::istringstream in(rows[i]);
      std::string cell;
      std::getline(in, cell, ',');  // t
      if (std::string(name) == "field.csv") std::getline(in, cell, ',');  // x
      while (std::getline(in, cell, ',')) CHECK(std::stod(cell) == 0.0);
    }
  }
}

TEST_CASE("sweep") {
  const auto cfg = small_config();
  SUBCASE("empty list writes only the header") {
    const auto dir = scratch("sweep_empty");
    CHECK(sweep(cfg, "sigma", {}, dir.string()).empty());
    CHECK(slurp(dir / "summary.csv") ==
          "value,status,max_error,achieved_order,model_discrepancy,runtime_s,message\n");
  }
  SUBCASE("failures become rows") {
    const auto dir = scratch("sweep_sigma");
    const auto rows = sweep(cfg, "sigma", {1.5, 2.5}, dir.string(), 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].status == "DivergentSeries");
    CHECK(lines(slurp(dir / "summary.csv")).size() == 3);
  }
  SUBCASE("unknown parameter") {
    CHECK(ZDH_ERROR_KIND(sweep(cfg, "colour", {1.0}, scratch("sweep_bad").string())) == ErrorKind::kConfig);
  }
}

TEST_CASE("verify passes at the default parameters") {
  const auto checks = verify(ExperimentConfig{});
  CHECK(checks.size() >= 10);
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
}
