#include "acpsim.h"

#include <exception>
#include <fstream>
#include <string>

#include "acpsim/scenario.h"

struct acpsim_scenario {
  acpsim::ScenarioConfig cfg;
  std::string describe_cache;
};

struct acpsim_result {
  acpsim::ScenarioResult res;
};

namespace {

thread_local std::string g_last_error;

acpsim_status fail(acpsim_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Every entry point funnels its body through here so the exception -> status
// mapping stays in one place.
template <typename Fn>
acpsim_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const acpsim::IoError& e) {
    return fail(ACPSIM_ERR_IO, e.what());
  } catch (const acpsim::ScenarioError& e) {
    return fail(ACPSIM_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ACPSIM_ERR_CONFIG, e.what());
  } catch (const std::logic_error& e) {
    return fail(ACPSIM_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(ACPSIM_ERR_RUNTIME, e.what());
  }
}

template <typename Writer>
acpsim_status write_csv(const acpsim_result* r, const char* path, Writer writer) {
  if (!r || !path) return fail(ACPSIM_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw acpsim::IoError(std::string("cannot open for writing: ") + path);
    writer(r->res, out);
    out.flush();
    if (!out) throw acpsim::IoError(std::string("write failed: ") + path);
    return ACPSIM_OK;
  });
}

}  // namespace

extern "C" {

const char* acpsim_version(void) { return "1.0.0"; }

const char* acpsim_last_error(void) { return g_last_error.c_str(); }

acpsim_status acpsim_scenario_load(const char* path, acpsim_scenario** out) {
  if (!path || !out) return fail(ACPSIM_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* s = new acpsim_scenario{acpsim::parse_scenario_file(path), {}};
    *out = s;
    return ACPSIM_OK;
  });
}

acpsim_status acpsim_scenario_parse(const char* text, acpsim_scenario** out) {
  if (!text || !out) return fail(ACPSIM_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* s = new acpsim_scenario{acpsim::parse_scenario_text(text), {}};
    *out = s;
    return ACPSIM_OK;
  });
}

void acpsim_scenario_free(acpsim_scenario* s) { delete s; }

acpsim_status acpsim_scenario_set_seed(acpsim_scenario* s, uint64_t seed) {
  if (!s) return fail(ACPSIM_ERR_INVALID_ARG, "null scenario");
  s->cfg.seed = seed;
  return ACPSIM_OK;
}

const char* acpsim_scenario_describe(acpsim_scenario* s) {
  if (!s) return "";
  s->describe_cache = acpsim::describe(s->cfg);
  return s->describe_cache.c_str();
}

acpsim_status acpsim_run(const acpsim_scenario* s, acpsim_result** out) {
  if (!s || !out) return fail(ACPSIM_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* r = new acpsim_result{acpsim::run_scenario(s->cfg)};
    *out = r;
    return ACPSIM_OK;
  });
}

void acpsim_result_free(acpsim_result* r) { delete r; }

uint64_t acpsim_result_request_count(const acpsim_result* r) {
  return r ? r->res.generated : 0;
}

uint64_t acpsim_result_served_count(const acpsim_result* r) {
  return r ? r->res.served_count : 0;
}

double acpsim_result_mean_tts_ms(const acpsim_result* r) {
  return r ? r->res.mean_tts_ms : 0.0;
}

double acpsim_result_mean_fidelity(const acpsim_result* r) {
  return r ? r->res.mean_fidelity : 0.0;
}

uint64_t acpsim_result_invariant_violations(const acpsim_result* r) {
  return r ? r->res.invariants.total() : 0;
}

uint64_t acpsim_result_trace_digest(const acpsim_result* r) {
  return r ? r->res.trace_digest : 0;
}

uint64_t acpsim_result_window_count(const acpsim_result* r) {
  return r ? r->res.windows.size() : 0;
}

acpsim_status acpsim_result_window(const acpsim_result* r, uint64_t index,
                                   acpsim_window* out) {
  if (!r || !out) return fail(ACPSIM_ERR_INVALID_ARG, "null argument");
  if (index >= r->res.windows.size())
    return fail(ACPSIM_ERR_INVALID_ARG, "window index out of range");
  const acpsim::SummaryWindow& w = r->res.windows[index];
  out->window_start_s = w.window_start_s;
  out->window_end_s = w.window_end_s;
  out->arrivals = static_cast<uint64_t>(w.arrivals);
  out->served = static_cast<uint64_t>(w.served);
  out->mean_tts_ms = w.mean_tts_ms;
  out->mean_fidelity = w.mean_fidelity;
  out->served_fraction = w.served_fraction;
  return ACPSIM_OK;
}

acpsim_status acpsim_result_write_requests_csv(const acpsim_result* r,
                                               const char* path) {
  return write_csv(r, path, [](const acpsim::ScenarioResult& res, std::ostream& out) {
    acpsim::write_requests_csv(res, out);
  });
}

acpsim_status acpsim_result_write_summary_csv(const acpsim_result* r,
                                              const char* path) {
  return write_csv(r, path, [](const acpsim::ScenarioResult& res, std::ostream& out) {
    acpsim::write_summary_csv(res, out);
  });
}

}  // extern "C"
