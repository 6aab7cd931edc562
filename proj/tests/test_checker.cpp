#include <doctest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "beliefmc/checker.hpp"
#include "beliefmc/reference.hpp"
#include "beliefmc/scenarios.hpp"
#include "test_support.hpp"

using namespace beliefmc;

namespace {

EvalOptions serial_opts() {
  EvalOptions o;
  o.parallel = false;
  return o;
}

// One agent, one point, one self-loop.
Model singleton_model() {
  ModelBuilder b;
  b.agent("a");
  b.variable("x", {"0", "1"});
  b.run("r", 1);
  b.value("r", 0, "x", "1");
  b.belief("a", "r", 0, "r", 0);
  b.rigid_group("g", {"a"});
  return b.build();
}

// Two agents over two runs; in run bad the fact fails.  Each agent's
// relation is a pair of two-point clusters keeping the agents' information
// asymmetric: agent a cannot rule out run bad at time 0.
Model two_run_fact_model() {
  ModelBuilder b;
  b.agent("a").agent("c");
  b.variable("ok", {"0", "1"});
  b.run("good", 2).run("bad", 2);
  for (int t = 0; t < 2; ++t) {
    b.value("good", t, "ok", "1");
    b.value("bad", t, "ok", t == 0 ? "1" : "0");
  }
  // agent a at time 0 considers both runs possible (one 2-point cluster);
  // at time 1 it knows the run.
  for (const char* r1 : {"good", "bad"})
    for (const char* r2 : {"good", "bad"}) b.belief("a", r1, 0, r2, 0);
  b.belief("a", "good", 1, "good", 1);
  b.belief("a", "bad", 1, "bad", 1);
  // agent c always knows the run.
  for (const char* r : {"good", "bad"})
    for (int t = 0; t < 2; ++t) b.belief("c", r, t, r, t);
  b.rigid_group("g", {"a", "c"});
  return b.build();
}

}  // namespace

TEST_CASE("belief, mutual belief and common belief on a single point") {
  Model m = singleton_model();
  Evaluator ev(m, serial_opts());
  Point p{0, 0};
  CHECK(ev.check(parse("x=1", m), p));
  CHECK_FALSE(ev.check(parse("x=0", m), p));
  CHECK(ev.check(parse("B_a(x=1)", m), p));
  CHECK(ev.check(parse("E{g}(x=1)", m), p));
  CHECK(ev.check(parse("C{g}(x=1)", m), p));
  CHECK_FALSE(ev.check(parse("C{g}(x=0)", m), p));
  CHECK(ev.check(parse("ALW(x=1)", m), p));
}

TEST_CASE("mutual belief is the conjunction of members' beliefs") {
  Model m = two_run_fact_model();
  Evaluator ev(m, serial_opts());
  Extension e = ev.extension(parse("E{g}(ok=1)", m));
  Extension ba = ev.extension(parse("B_a(ok=1)", m));
  Extension bc = ev.extension(parse("B_c(ok=1)", m));
  for (int p = 0; p < m.point_count(); ++p)
    CHECK(e.holds(p) == (ba.holds(p) && bc.holds(p)));

  // Membership varies per point for indexical groups: E over an empty
  // membership is vacuously true.
  ModelBuilder b;
  b.agent("a");
  b.variable("x", {"0", "1"});
  b.run("r", 1);
  b.value("r", 0, "x", "0");
  b.belief("a", "r", 0, "r", 0);
  b.group("s");  // never populated
  Model empty_group = b.build();
  Evaluator ev2(empty_group, serial_opts());
  CHECK(ev2.check(parse("E{s}(x=1)", empty_group), Point{0, 0}));
  // no step ever leaves an empty-membership point, so C quantifies over
  // nothing reachable and is vacuous as well
  CHECK(ev2.check(parse("C{s}(x=1)", empty_group), Point{0, 0}));
  CHECK(ev2.check(parse("C{s}(x=0)", empty_group), Point{0, 0}));
}

TEST_CASE("common belief fails exactly where some E-chain link fails") {
  Model m = two_run_fact_model();
  Evaluator ev(m, serial_opts());
  // Agent a cannot rule out run bad at time 0, and in run bad the fact
  // eventually fails, so no common belief at either time-0 point.
  Formula c = parse("C{g}(ALW(ok=1))", m);
  CHECK_FALSE(ev.check(c, Point{m.run_index("good"), 0}));
  CHECK_FALSE(ev.check(c, Point{m.run_index("bad"), 0}));
  // At time 1 in run good both agents' edges stay inside run good.
  CHECK(ev.check(c, Point{m.run_index("good"), 1}));

  // Chain length matters: a believes the fact and believes that c believes
  // it one hop away, but two hops land where the fact fails.
  ModelBuilder b;
  b.agent("a").agent("c");
  b.variable("ok", {"0", "1"});
  b.run("g", 1).run("b", 1).run("u", 1);
  b.value("g", 0, "ok", "1").value("b", 0, "ok", "1").value("u", 0, "ok", "0");
  // a's clusters: {g,b} and {u}; c's clusters: {g} and {b,u}.
  for (const char* r1 : {"g", "b"})
    for (const char* r2 : {"g", "b"}) b.belief("a", r1, 0, r2, 0);
  b.belief("a", "u", 0, "u", 0);
  b.belief("c", "g", 0, "g", 0);
  for (const char* r1 : {"b", "u"})
    for (const char* r2 : {"b", "u"}) b.belief("c", r1, 0, r2, 0);
  b.rigid_group("both", {"a", "c"});
  Model chain = b.build();
  REQUIRE(chain.validated_ok());
  Evaluator ev2(chain, serial_opts());
  Point start{chain.run_index("g"), 0};
  CHECK(ev2.check(parse("E{both}(ok=1)", chain), start));
  CHECK_FALSE(ev2.check(parse("E{both}(E{both}(ok=1))", chain), start));
  CHECK_FALSE(ev2.check(parse("C{both}(ok=1)", chain), start));
}

TEST_CASE("reachable sets match a breadth-first oracle on generated models") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    Model m = random_model(seed);
    Evaluator ev(m, serial_opts());
    std::vector<ReachKind> kinds = {ReachKind::standard(),
                                    ReachKind::action_stamped()};
    for (int s = 0; s < m.stamp_count(); ++s)
      kinds.push_back(ReachKind::time_stamped(s));
    for (int g = 0; g < m.group_count(); ++g) {
      GroupRef gr;
      gr.named = g;
      for (const ReachKind& kind : kinds)
        for (int p = 0; p < m.point_count(); ++p) {
          Point from = m.point_at(p);
          CHECK(ev.reachable_set(gr, from, kind) ==
                testsup::naive_reachable(m, gr, from, kind));
        }
    }
  }
}

TEST_CASE("reachable set of a reflexive singleton is the point itself") {
  Model m = singleton_model();
  GroupRef g;
  g.named = 0;
  auto pts = reachable_set(m, g, Point{0, 0}, ReachKind::standard());
  REQUIRE(pts.size() == 1);
  CHECK(pts[0] == Point{0, 0});
}

TEST_CASE("action-stamped reachability is empty without acting points") {
  Model m = two_run_fact_model();  // declares no acting flags
  GroupRef g;
  g.named = 0;
  for (int p = 0; p < m.point_count(); ++p)
    CHECK(reachable_set(m, g, m.point_at(p), ReachKind::action_stamped())
              .empty());
  // ... which makes action-stamped common belief vacuously true.
  Evaluator ev(m, serial_opts());
  Extension ca = ev.extension(parse("Ca{g}(ok=0)", m));
  CHECK(ca.count() == m.point_count());
}

TEST_CASE("name-resolving reachable_set front end") {
  Model m = two_run_fact_model();
  auto pts = reachable_set(m, "g", Point{0, 0}, ReachKind::Standard);
  CHECK_FALSE(pts.empty());
  CHECK_THROWS_AS(reachable_set(m, "ghost", Point{0, 0}, ReachKind::Standard),
                  LookupError);
  CHECK_THROWS_AS(
      reachable_set(m, "g", Point{0, 0}, ReachKind::TimeStamped, "none"),
      LookupError);
}

TEST_CASE("fixpoint evaluator agrees with the chain-expansion reference") {
  std::mt19937_64 rng(61);
  RandomFormulaParams params;
  params.max_depth = 4;
  params.max_common_depth = 2;
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    Model m = random_model(seed);
    Evaluator ev(m, serial_opts());
    RefEvaluator ref(m);
    for (int i = 0; i < 10; ++i) {
      Formula f = random_formula(rng, m, params);
      Extension ext = ev.extension(f);
      for (int p = 0; p < m.point_count(); ++p)
        CHECK(ext.holds(p) == ref.holds(f, m.point_at(p)));
    }
  }
}

TEST_CASE("bounded nesting saturates to the fixpoint at the point count") {
  std::mt19937_64 rng(62);
  RandomFormulaParams params;
  params.max_depth = 3;
  params.require_common = true;
  params.max_common_depth = 1;
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    Model m = random_model(seed);
    Evaluator ev(m, serial_opts());
    for (int i = 0; i < 6; ++i) {
      Formula f = random_formula(rng, m, params);
      for (const Formula& sub : subformulas(f)) {
        if (sub.kind() != Kind::Common && sub.kind() != Kind::CommonT &&
            sub.kind() != Kind::CommonA)
          continue;
        Extension ext = ev.extension(sub);
        for (int p = 0; p < m.point_count(); ++p)
          CHECK(ext.holds(p) ==
                bounded_nesting_oracle(m, sub, m.point_at(p),
                                       m.point_count()));
      }
    }
  }
}

TEST_CASE("nesting depth one of common belief is exactly mutual belief") {
  Model m = two_run_fact_model();
  Evaluator ev(m, serial_opts());
  Formula c = parse("C{g}(ok=1)", m);
  Formula e = parse("E{g}(ok=1)", m);
  for (int p = 0; p < m.point_count(); ++p)
    CHECK(bounded_nesting_oracle(m, c, m.point_at(p), 1) ==
          ev.check(e, m.point_at(p)));
}

TEST_CASE("deeper nesting never rescues a failed chain over plain operands") {
  // With a negation-free operand the chain E^1 & ... & E^k only loses
  // points as k grows.
  std::mt19937_64 rng(63);
  RandomFormulaParams params;
  params.max_depth = 2;
  params.max_common_depth = 0;  // keep the operand free of common belief
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Model m = random_model(seed);
    GroupRef g;
    g.named = 0;
    Formula c = Formula::common(g, random_formula(rng, m, params));
    for (int p = 0; p < m.point_count(); ++p) {
      bool prev = true;
      for (int k = 1; k <= m.point_count(); ++k) {
        bool now = bounded_nesting_oracle(m, c, m.point_at(p), k);
        if (!prev) CHECK_FALSE(now);
        prev = now;
      }
    }
  }
}

TEST_CASE("oracle rejects non-common formulas and negative depths") {
  Model m = singleton_model();
  CHECK_THROWS_AS(
      bounded_nesting_oracle(m, parse("x=1", m), Point{0, 0}, 3),
      std::invalid_argument);
  CHECK_THROWS_AS(
      bounded_nesting_oracle(m, parse("E{g}(x=1)", m), Point{0, 0}, 3),
      std::invalid_argument);
  CHECK_THROWS_AS(
      bounded_nesting_oracle(m, parse("C{g}(x=1)", m), Point{0, 0}, -1),
      std::invalid_argument);
}

TEST_CASE("established common belief persists under introspection") {
  // Whenever C(f) holds, C(C(f)) holds too, for all three flavors.
  std::mt19937_64 rng(64);
  RandomFormulaParams params;
  params.max_depth = 2;
  params.max_common_depth = 0;
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    Model m = random_model(seed);
    Evaluator ev(m, serial_opts());
    GroupRef g;
    g.named = static_cast<int>(seed % m.group_count());
    Formula f = random_formula(rng, m, params);
    std::vector<std::pair<Formula, Formula>> pairs;
    pairs.emplace_back(Formula::common(g, f),
                       Formula::common(g, Formula::common(g, f)));
    pairs.emplace_back(Formula::common_a(g, f),
                       Formula::common_a(g, Formula::common_a(g, f)));
    int st = 0;  // models always declare one stamp
    pairs.emplace_back(Formula::common_t(g, st, f),
                       Formula::common_t(g, st, Formula::common_t(g, st, f)));
    for (const auto& [once, twice] : pairs) {
      Extension e1 = ev.extension(once);
      Extension e2 = ev.extension(twice);
      for (int p = 0; p < m.point_count(); ++p)
        if (e1.holds(p)) CHECK(e2.holds(p));
    }
  }
}

TEST_CASE("run-scoped operators are constant within each run") {
  std::mt19937_64 rng(65);
  RandomFormulaParams params;
  params.max_depth = 4;
  params.require_common = true;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Model m = random_model(seed);
    Evaluator ev(m, serial_opts());
    for (int i = 0; i < 5; ++i) {
      Formula f = random_formula(rng, m, params);
      for (const Formula& sub : subformulas(f)) {
        switch (sub.kind()) {
          case Kind::EveryoneT:
          case Kind::CommonT:
          case Kind::EveryoneA:
          case Kind::CommonA:
          case Kind::Chi:
          case Kind::Alw:
            break;
          default:
            continue;
        }
        Extension ext = ev.extension(sub);
        for (int r = 0; r < m.run_count(); ++r) {
          bool at_start = ext.holds(m.point_index(Point{r, 0}));
          for (int t = 1; t < m.horizon(r); ++t)
            CHECK(ext.holds(m.point_index(Point{r, t})) == at_start);
        }
      }
    }
  }
}

TEST_CASE("acting exactly at stamped points turns Ca into Ct") {
  std::mt19937_64 rng(66);
  RandomFormulaParams params;
  params.max_depth = 3;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Model m = random_model(seed);
    int stamp = 0;
    for (int g = 0; g < m.group_count(); ++g) {
      std::vector<uint64_t> flags(m.point_count(), 0);
      for (int a = 0; a < m.agent_count(); ++a)
        for (int r = 0; r < m.run_count(); ++r) {
          int t = m.stamp_time(stamp, a, r);
          flags[m.point_index(Point{r, t})] |= uint64_t{1} << a;
        }
      Model m2 = m.with_acting_flags(g, flags);
      REQUIRE(m2.validated_ok());
      Evaluator ev(m2, serial_opts());
      GroupRef gr;
      gr.named = g;
      for (int i = 0; i < 3; ++i) {
        Formula phi = random_formula(rng, m2, params);
        Extension ca = ev.extension(Formula::common_a(gr, phi));
        Extension ct = ev.extension(Formula::common_t(gr, stamp, phi));
        CHECK(ca.bits() == ct.bits());
        Extension ea = ev.extension(Formula::everyone_a(gr, phi));
        Extension et = ev.extension(Formula::everyone_t(gr, stamp, phi));
        CHECK(ea.bits() == et.bits());
      }
    }
  }
}

TEST_CASE("parallel and serial evaluation produce identical extensions") {
  std::mt19937_64 rng(67);
  RandomFormulaParams params;
  params.max_depth = 4;
  params.require_common = true;
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    Model m = random_model(seed);
    EvalOptions par;
    par.parallel = true;
    Evaluator ev_serial(m, serial_opts());
    Evaluator ev_parallel(m, par);
    for (int i = 0; i < 6; ++i) {
      Formula f = random_formula(rng, m, params);
      CHECK(ev_serial.extension(f).bits() == ev_parallel.extension(f).bits());
    }
  }
}

TEST_CASE("repeated queries against one evaluator are stable") {
  Model m = two_run_fact_model();
  Evaluator ev(m, serial_opts());
  Formula f = parse("C{g}(ALW(ok=1))", m);
  Extension first = ev.extension(f);
  Extension second = ev.extension(f);
  CHECK(first.bits() == second.bits());
  for (int p = 0; p < m.point_count(); ++p)
    CHECK(ev.check(f, m.point_at(p)) == first.holds(p));
  // A structurally equal but separately parsed formula hits the same cache.
  Extension third = ev.extension(parse("C{g}(ALW(ok=1))", m));
  CHECK(third.bits() == first.bits());
}

TEST_CASE("extension exposes points, count and bits consistently") {
  Model m = two_run_fact_model();
  Extension e = extension(m, parse("ok=1", m), serial_opts());
  CHECK(e.count() == 3);
  auto pts = e.points();
  REQUIRE(pts.size() == 3);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  for (Point p : pts) CHECK(e.holds(p));
}

TEST_CASE("the evaluator refuses invalid models unless told otherwise") {
  ModelBuilder b;
  b.agent("a");
  b.variable("x", {"0", "1"});
  b.run("r", 2);
  b.value("r", 0, "x", "1").value("r", 1, "x", "1");
  b.belief("a", "r", 0, "r", 0);  // (r,1) has no successor
  Model m = b.build();
  REQUIRE_FALSE(m.validated_ok());
  CHECK_THROWS_AS(Evaluator{m}, ModelError);

  EvalOptions skip = serial_opts();
  skip.skip_validation_check = true;
  Evaluator ev(m, skip);
  CHECK(ev.check(parse("x=1", m), Point{0, 0}));
}

TEST_CASE("time-stamped operators fault on incomplete stamp tables") {
  ModelBuilder b;
  b.agent("a").agent("c");
  b.variable("x", {"0", "1"});
  b.run("r", 2);
  for (int t = 0; t < 2; ++t) {
    b.value("r", t, "x", "1");
    b.belief("a", "r", t, "r", t);
    b.belief("c", "r", t, "r", t);
  }
  b.rigid_group("g", {"a", "c"});
  b.stamp("clock");
  b.stamp_time("clock", "a", "r", 0);  // c's time missing
  Model m = b.build();
  REQUIRE_FALSE(m.validated_ok());

  EvalOptions skip = serial_opts();
  skip.skip_validation_check = true;
  Evaluator ev(m, skip);
  CHECK_THROWS_AS(ev.check(parse("E[t:clock]{g}(x=1)", m), Point{0, 0}),
                  ModelError);
  RefEvaluator ref(m);
  CHECK_THROWS_AS(ref.holds(parse("E[t:clock]{g}(x=1)", m), Point{0, 0}),
                  ModelError);
}

TEST_CASE("formulas from a foreign vocabulary are rejected") {
  Model small = singleton_model();
  Model big = two_run_fact_model();
  Formula foreign = parse("B_c(ok=1)", big);  // agent 1, variable beyond small
  Evaluator ev(small, serial_opts());
  CHECK_THROWS_AS(ev.check(foreign, Point{0, 0}), LookupError);
}
