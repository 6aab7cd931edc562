// Timing comparison between the chain-expansion reference evaluator and the
// fixpoint evaluator, serial and corpus-parallel.  All three configurations
// must produce identical truth values; the run aborts with a message if
// they ever disagree.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "beliefmc/checker.hpp"
#include "beliefmc/reference.hpp"
#include "beliefmc/scenarios.hpp"

using namespace beliefmc;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int nmodels = 24;
  int nformulas = 24;
  uint64_t seed = 42;
  for (int i = 1; i < argc; ++i) {
    auto next_int = [&](int& out) {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value after %s\n", argv[i]);
        std::exit(1);
      }
      out = std::atoi(argv[++i]);
    };
    if (std::strcmp(argv[i], "--models") == 0) {
      next_int(nmodels);
    } else if (std::strcmp(argv[i], "--formulas") == 0) {
      next_int(nformulas);
    } else if (std::strcmp(argv[i], "--seed") == 0) {
      int s = 0;
      next_int(s);
      seed = static_cast<uint64_t>(s);
    } else {
      std::fprintf(stderr,
                   "usage: %s [--models N] [--formulas M] [--seed S]\n",
                   argv[0]);
      return 1;
    }
  }

  RandomModelParams mp;
  mp.min_runs = 3;
  mp.max_runs = 6;
  mp.min_horizon = 4;
  mp.max_horizon = 8;
  mp.max_agents = 4;

  std::vector<Model> models;
  std::vector<std::vector<Formula>> formulas(nmodels);
  models.reserve(nmodels);
  int total_points = 0;
  for (int i = 0; i < nmodels; ++i) {
    models.push_back(random_model(seed + i, mp));
    total_points += models.back().point_count();
    std::mt19937_64 rng(seed * 31 + i);
    RandomFormulaParams fp;
    fp.max_depth = 4;
    fp.require_common = true;
    for (int j = 0; j < nformulas; ++j)
      formulas[i].push_back(random_formula(rng, models[i], fp));
  }
  std::printf("corpus: %d models (%d points total), %d formulas each\n",
              nmodels, total_points, nformulas);

  // truth[i][j] holds formula j's bits over model i's points.
  std::vector<std::vector<std::vector<uint8_t>>> reference(nmodels);

  auto t0 = Clock::now();
  for (int i = 0; i < nmodels; ++i) {
    RefEvaluator ref(models[i]);
    reference[i].resize(nformulas);
    for (int j = 0; j < nformulas; ++j) {
      auto& bits = reference[i][j];
      bits.resize(models[i].point_count());
      for (int p = 0; p < models[i].point_count(); ++p)
        bits[p] = ref.holds(formulas[i][j], models[i].point_at(p)) ? 1 : 0;
    }
  }
  double ref_ms = ms_since(t0);
  std::printf("reference chain expansion (serial):   %8.1f ms\n", ref_ms);

  EvalOptions serial;
  serial.parallel = false;

  long long mismatches = 0;
  t0 = Clock::now();
  for (int i = 0; i < nmodels; ++i) {
    Evaluator ev(models[i], serial);
    for (int j = 0; j < nformulas; ++j) {
      Extension ext = ev.extension(formulas[i][j]);
      for (int p = 0; p < models[i].point_count(); ++p)
        if (ext.holds(p) != (reference[i][j][p] != 0)) ++mismatches;
    }
  }
  double fix_ms = ms_since(t0);
  std::printf("fixpoint evaluator (serial):          %8.1f ms\n", fix_ms);

  long long par_mismatches = 0;
  t0 = Clock::now();
#pragma omp parallel for schedule(dynamic) reduction(+ : par_mismatches)
  for (int i = 0; i < nmodels; ++i) {
    Evaluator ev(models[i], serial);
    for (int j = 0; j < nformulas; ++j) {
      Extension ext = ev.extension(formulas[i][j]);
      for (int p = 0; p < models[i].point_count(); ++p)
        if (ext.holds(p) != (reference[i][j][p] != 0)) ++par_mismatches;
    }
  }
  double par_ms = ms_since(t0);
  std::printf("fixpoint evaluator (corpus-parallel): %8.1f ms\n", par_ms);

  if (mismatches + par_mismatches > 0) {
    std::printf("DISAGREEMENT: %lld serial, %lld parallel\n", mismatches,
                par_mismatches);
    return 1;
  }
  std::printf("all three configurations agree on every (formula, point)\n");
  std::printf("speedup vs reference: serial %.1fx, corpus-parallel %.1fx\n",
              ref_ms / fix_ms, ref_ms / par_ms);
  return 0;
}
