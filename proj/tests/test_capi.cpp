#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "acpsim.h"
#include "acpsim/scenario.h"
#include "doctest.h"

namespace {

const char* kConfig = R"([scenario]
strategy = odo
duration_s = 4
arrival_rate_hz = 2
seed = 9

[traffic]
pairs = n0:n1
)";

std::string slurp(const char* path) {
  std::ifstream in(path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace

TEST_CASE("c api runs a scenario end to end") {
  acpsim_scenario* s = nullptr;
  REQUIRE(acpsim_scenario_parse(kConfig, &s) == ACPSIM_OK);
  REQUIRE(s != nullptr);
  CHECK(acpsim_scenario_set_seed(s, 9) == ACPSIM_OK);

  std::string echo = acpsim_scenario_describe(s);
  CHECK(echo.find("strategy=odo\n") != std::string::npos);
  CHECK(echo.find("seed=9\n") != std::string::npos);

  acpsim_result* r = nullptr;
  REQUIRE(acpsim_run(s, &r) == ACPSIM_OK);
  REQUIRE(r != nullptr);

  // The C surface must agree with the library run of the same config.
  acpsim::ScenarioResult direct = acpsim::run_scenario(acpsim::parse_scenario_text(kConfig));
  CHECK(acpsim_result_request_count(r) == direct.generated);
  CHECK(acpsim_result_served_count(r) == direct.served_count);
  CHECK(acpsim_result_mean_tts_ms(r) == direct.mean_tts_ms);
  CHECK(acpsim_result_mean_fidelity(r) == direct.mean_fidelity);
  CHECK(acpsim_result_trace_digest(r) == direct.trace_digest);
  CHECK(acpsim_result_invariant_violations(r) == 0);

  REQUIRE(acpsim_result_window_count(r) == direct.windows.size());
  acpsim_window w{};
  REQUIRE(acpsim_result_window(r, 0, &w) == ACPSIM_OK);
  CHECK(w.window_start_s == direct.windows[0].window_start_s);
  CHECK(w.arrivals == static_cast<uint64_t>(direct.windows[0].arrivals));
  CHECK(w.served_fraction == direct.windows[0].served_fraction);

  const char* req_path = "capi_requests.tmp.csv";
  const char* sum_path = "capi_summary.tmp.csv";
  REQUIRE(acpsim_result_write_requests_csv(r, req_path) == ACPSIM_OK);
  REQUIRE(acpsim_result_write_summary_csv(r, sum_path) == ACPSIM_OK);
  std::ostringstream req_mem, sum_mem;
  acpsim::write_requests_csv(direct, req_mem);
  acpsim::write_summary_csv(direct, sum_mem);
  CHECK(slurp(req_path) == req_mem.str());
  CHECK(slurp(sum_path) == sum_mem.str());
  std::remove(req_path);
  std::remove(sum_path);

  acpsim_result_free(r);
  acpsim_scenario_free(s);
  CHECK(std::strlen(acpsim_version()) > 0);
}

TEST_CASE("c api maps failures to status codes") {
  acpsim_scenario* s = nullptr;
  CHECK(acpsim_scenario_parse(nullptr, &s) == ACPSIM_ERR_INVALID_ARG);
  CHECK(acpsim_scenario_load("no/such/file.ini", &s) == ACPSIM_ERR_IO);
  CHECK(std::string(acpsim_last_error()).find("no/such/file.ini") != std::string::npos);

  CHECK(acpsim_scenario_parse("[scenario]\nseed = maybe\n", &s) == ACPSIM_ERR_PARSE);
  CHECK(s == nullptr);
  CHECK(std::string(acpsim_last_error()).find("line 2") != std::string::npos);

  CHECK(acpsim_scenario_set_seed(nullptr, 1) == ACPSIM_ERR_INVALID_ARG);
  CHECK(acpsim_run(nullptr, nullptr) == ACPSIM_ERR_INVALID_ARG);

  REQUIRE(acpsim_scenario_parse(kConfig, &s) == ACPSIM_OK);
  acpsim_result* r = nullptr;
  REQUIRE(acpsim_run(s, &r) == ACPSIM_OK);
  acpsim_window w{};
  CHECK(acpsim_result_window(r, 999, &w) == ACPSIM_ERR_INVALID_ARG);
  CHECK(acpsim_result_write_requests_csv(r, "/no-such-dir/out.csv") == ACPSIM_ERR_IO);
  acpsim_result_free(r);
  acpsim_scenario_free(s);
}
