// Acceptance suite: one line per criterion 1-10.
//
// Exit status is 0 iff the set of failing criteria equals the set passed via
// --expect-fail (default: none). An unlisted failure or an unexpected pass
// both exit 1, so the registered ctest entry tracks the known state exactly.

#include "rieszgreen/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <set>

int main(int argc, char** argv) {
  using namespace rieszgreen;
  CLI::App app{"Acceptance criteria"};
  verify::Options opt;
  std::vector<int> expect_fail;
  std::string out_dir;
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--filter", opt.filter, "Run a single criterion");
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail")->delimiter(',');
  app.add_option("--out", out_dir, "Write summary and per-criterion CSVs here");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  std::set<int> failed;
  const auto print = [&](const verify::Criterion& c) {
    const verify::Check h = c.headline();
    const bool ok = c.passed();
    if (!ok) failed.insert(c.id);
    std::printf("[%s] criterion %2d  %-40s %s = %.6g %s %.6g  (%.1fs of %.0fs)%s\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(),
                h.label.c_str(), h.measured, h.relation.c_str(), h.threshold, c.seconds, c.runtime_limit,
                !ok && expected.count(c.id) ? "  [known failure]" : "");
    std::fflush(stdout);
  };
  std::vector<verify::Criterion> results;
  try {
    results = verify::run_all(opt, print);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!out_dir.empty())
    for (const auto& [name, text] : verify::csv_files(results)) io::write_text(std::filesystem::path(out_dir) / name, text);

  std::set<int> ran;
  for (const auto& c : results) ran.insert(c.id);
  std::set<int> expected_ran;
  for (int id : expected)
    if (ran.count(id)) expected_ran.insert(id);
  std::printf("%zu/%zu criteria passed\n", results.size() - failed.size(), results.size());
  if (failed != expected_ran) {
    for (int id : failed)
      if (!expected_ran.count(id)) std::printf("unexpected failure: criterion %d\n", id);
    for (int id : expected_ran)
      if (!failed.count(id)) std::printf("unexpected pass: criterion %d (update --expect-fail)\n", id);
    return 1;
  }
  return 0;
}
