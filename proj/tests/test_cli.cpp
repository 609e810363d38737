#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "nlqc/instprotocols.hpp"
#include "nlqc/serialize.hpp"

using nlqc::serialize::json;

namespace {

#ifndef NLQC_CLI_PATH
#error "NLQC_CLI_PATH must point at the nlqc binary"
#endif

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLQC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json report_for(const std::string& args, const std::string& out_path) {
  const std::string cmd =
      std::string(NLQC_CLI_PATH) + " " + args + " --out " + out_path + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WEXITSTATUS(status) == 0);
  return nlqc::serialize::load_json_file(out_path);
}

std::string canonical(json j) {
  j.erase("wall_clock_ms");
  return j.dump();
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("definitely-not-a-subcommand") == 2);
  CHECK(run_cli("pbt --d -1") == 2);
  CHECK(run_cli("pbt --no-such-flag 3") == 2);
  CHECK(run_cli("inst --mode nonsense") == 2);
  CHECK(run_cli("pbt --tol nonsense=1") == 2);
}

TEST_CASE("size limits exit with code 3") {
  CHECK(run_cli("pbt --d 2 --N 13") == 3);
  CHECK(run_cli("inst --mode measure --n 2 --N 3 --trials 10") == 3);
}

TEST_CASE("passing experiments exit 0 and echo their config") {
  json rep = report_for("pbt --d 2 --N 4 --seed 5", "/tmp/nlqc_cli_pbt.json");
  CHECK(rep["all_pass"] == true);
  CHECK(rep["command"] == "pbt");
  CHECK(rep["config"]["d"] == 2);
  CHECK(rep["config"]["N"] == 4);
  CHECK(rep["seed"] == 5);
  CHECK(rep.contains("wall_clock_ms"));
  bool saw_floor = false;
  for (const auto& c : rep["checks"])
    if (c["name"] == "fidelity_floor/d2N4") {
      saw_floor = true;
      CHECK(c["pass"] == true);
    }
  CHECK(saw_floor);
}

TEST_CASE("grid runs produce one row per cell") {
  json rep = report_for("pbt --grid d=2:N=1..5", "/tmp/nlqc_cli_grid.json");
  CHECK(rep["rows"].size() == 5);
  CHECK(rep["all_pass"] == true);
}

TEST_CASE("reports are byte-reproducible modulo wall clock") {
  const std::vector<std::string> experiments = {
      "pbt --d 2 --N 3 --seed 11",
      "pgm --random 3 --states 3 --dim 4 --seed 11",
      "mub --d 4",
      "bound --d 4 --dimb 1 --restarts 2 --sweeps 8 --seed 3",
      "inst --mode measure --n 1 --N 2 --trials 5000 --seed 9",
      "posverify --mode bounds --n 4 --m 0 --k 10 --eps 0.001",
      "posverify --mode intercept --n 1 --trials 3000 --seed 21",
      "cost --n 2 --eps 0.5",
  };
  for (const auto& exp : experiments) {
    json a = report_for(exp, "/tmp/nlqc_cli_det_a.json");
    json b = report_for(exp, "/tmp/nlqc_cli_det_b.json");
    CHECK(canonical(a) == canonical(b));
  }
}

TEST_CASE("matrix-schema files round-trip as targets") {
  using nlqc::serialize::matrix_to_json;
  using nlqc::serialize::povm_to_json;

  {
    json j = povm_to_json(nlqc::instprotocols::computational_povm(2));
    std::ofstream out("/tmp/nlqc_cli_povm.json");
    out << j.dump();
  }
  CHECK(run_cli("inst --mode measure --n 1 --N 1 --trials 1000 "
                "--target file:/tmp/nlqc_cli_povm.json") == 0);

  {
    json j = matrix_to_json(nlqc::ComplexMatrix(nlqc::instprotocols::cnot_gate(), {4}));
    std::ofstream out("/tmp/nlqc_cli_unitary.json");
    out << j.dump();
  }
  CHECK(run_cli("inst --mode unitary --n 1 --N 1 --trials 1000 "
                "--target file:/tmp/nlqc_cli_unitary.json") == 0);
}

TEST_CASE("bound subcommand reports the ceiling") {
  json rep = report_for("bound --d 4 --dimb 1 --restarts 2 --sweeps 10 --seed 1",
                        "/tmp/nlqc_cli_bound.json");
  const auto& summary = rep["rows"].back();
  CHECK(summary["bound"] == 1.0);
  CHECK(summary["vacuous"] == true);
  CHECK(summary["best_p"].get<double>() <= 1.0);
}

TEST_CASE("serialization round trip") {
  nlqc::RngStream rng(3);
  nlqc::Mat m(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = nlqc::Complex(rng.normal(), rng.normal());
  nlqc::ComplexMatrix cm(m, {3});
  json j = nlqc::serialize::matrix_to_json(cm);
  nlqc::ComplexMatrix back = nlqc::serialize::matrix_from_json(j);
  CHECK((back.mat - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.dims == cm.dims);
}
