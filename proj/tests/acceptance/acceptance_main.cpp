#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "acceptance/criteria.hpp"

namespace {

struct Entry {
  int id;
  const char* title;
  acceptance::Outcome (*run)();
  double budget_s;
};

const Entry kEntries[] = {
    {1, "pedagogical RLE worked examples", acceptance::criterion_1, 0.001},
    {2, "binary RLE / LZW round-trip fuzzing", acceptance::criterion_2, 30.0},
    {3, "compressed length tracks signal period", acceptance::criterion_3,
     10.0},
    {4, "policy-effect recovery across estimators", acceptance::criterion_4,
     300.0},
    {5, "absorbed vs dense fixed-effect agreement", acceptance::criterion_5,
     30.0},
    {6, "event-study null behavior and planted step", acceptance::criterion_6,
     180.0},
    {7, "clustered confidence-interval coverage", acceptance::criterion_7,
     300.0},
    {8, "dose-response bin recovery", acceptance::criterion_8, 180.0},
    {9, "demand closed forms vs simulation and finite differences",
     acceptance::criterion_9, 60.0},
    {10, "taste-depreciation log-gap decay", acceptance::criterion_10, 1.0},
    {11, "perplexity identities and ordering", acceptance::criterion_11, 60.0},
    {12, "excerpt alignment recovery", acceptance::criterion_12, 60.0},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  int ran = 0;
  for (const Entry& entry : kEntries) {
    if (only != 0 && entry.id != only) continue;
    ++ran;
    acceptance::Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = entry.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("unexpected exception: ") + e.what();
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - t0;
    const bool in_budget = elapsed.count() < entry.budget_s;
    const bool pass = out.pass && in_budget;
    failures += !pass;
    std::printf("[%s] criterion %2d: %s — %s%s [%.3fs, budget %gs]\n",
                pass ? "PASS" : "FAIL", entry.id, entry.title,
                out.detail.c_str(),
                in_budget ? "" : " (runtime budget exceeded)", elapsed.count(),
                entry.budget_s);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matches --only %d\n", only);
    return 2;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
