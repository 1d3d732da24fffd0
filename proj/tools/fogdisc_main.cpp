// fogdisc CLI: run scenarios on the virtual network, audit metric dumps,
// validate scenario files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fogdisc/fogdisc.hpp"

namespace {

int cmd_run(const std::string& path, std::uint64_t seed, const std::string& dump_path) {
  fogdisc::Metrics m = fogdisc::run_scenario(path, seed);
  std::string dump = m.dump();
  if (!dump_path.empty()) {
    std::ofstream out(dump_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << dump_path << "\n";
      return 1;
    }
    out << dump << "\n";
  }
  unsigned q_ok = 0;
  for (const auto& q : m.queries) q_ok += q.success ? 1 : 0;
  unsigned c_ok = 0;
  for (const auto& c : m.composes) c_ok += c.success ? 1 : 0;
  bool audits_ok = true;
  for (const auto& a : m.ring_audits) audits_ok = audits_ok && a.ring_ok && a.pointers_ok;
  bool conserved = m.counters.at("sent") ==
                   m.counters.at("delivered") + m.counters.at("dropped") +
                       m.counters.at("in_flight");
  std::printf("queries:    %u/%zu ok\n", q_ok, m.queries.size());
  std::printf("composes:   %u/%zu ok\n", c_ok, m.composes.size());
  std::printf("audits:     %zu (%s)\n", m.ring_audits.size(), audits_ok ? "pass" : "FAIL");
  std::printf("messages:   sent=%llu delivered=%llu dropped=%llu in_flight=%llu (%s)\n",
              static_cast<unsigned long long>(m.counters.at("sent")),
              static_cast<unsigned long long>(m.counters.at("delivered")),
              static_cast<unsigned long long>(m.counters.at("dropped")),
              static_cast<unsigned long long>(m.counters.at("in_flight")),
              conserved ? "conserved" : "LEAK");
  return (audits_ok && conserved) ? 0 : 1;
}

int cmd_audit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 1;
  }
  fogdisc::Json j = fogdisc::Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("ring_audits")) {
    std::cerr << "not a metrics dump\n";
    return 1;
  }
  bool ok = true;
  for (const auto& a : j.at("ring_audits")) {
    bool ring = a.value("ring_ok", false);
    bool ptr = a.value("pointers_ok", false);
    std::printf("t=%.0fms nodes=%u ring=%s pointers=%s missing=%u misplaced=%u\n",
                a.value("time_ms", 0.0), a.value("nodes", 0u), ring ? "ok" : "FAIL",
                ptr ? "ok" : "FAIL", a.value("missing", 0u), a.value("misplaced", 0u));
    ok = ok && ring && ptr;
  }
  if (j.at("ring_audits").empty()) std::printf("no ring audits recorded\n");
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_validate(const std::string& path) {
  fogdisc::Scenario sc = fogdisc::load_scenario(path);
  std::printf("ok: %zu gateways, %zu devices, %zu actions\n", sc.gateways.size(),
              sc.devices.size(), sc.timeline.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fog service discovery simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::uint64_t seed = 0;
  std::string dump_path;
  auto* run = app.add_subcommand("run", "execute a scenario");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--dump", dump_path, "write the metrics dump here");

  std::string metrics_path;
  auto* audit = app.add_subcommand("audit-ring", "check ring audits in a metrics dump");
  audit->add_option("metrics", metrics_path, "metrics JSON file")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("scenario", validate_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, seed, dump_path);
    if (audit->parsed()) return cmd_audit(metrics_path);
    if (validate->parsed()) return cmd_validate(validate_path);
  } catch (const fogdisc::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
