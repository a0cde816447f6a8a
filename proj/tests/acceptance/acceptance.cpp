// Acceptance suite: one self-contained check per criterion, each printing a
// single [PASS]/[FAIL] line. Run all with no arguments or one with
// --criterion N. Exit status is nonzero when any executed criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bpsched/exact.hpp"
#include "bpsched/generators.hpp"
#include "bpsched/mrf.hpp"
#include "bpsched/rng.hpp"
#include "bpsched/schedulers.hpp"
#include "support/test_helpers.hpp"

using namespace bpsched;

namespace {

constexpr SchedulerKind kAllSchedulers[] = {SchedulerKind::lbp, SchedulerKind::serial_rbp,
                                            SchedulerKind::rbp, SchedulerKind::rs,
                                            SchedulerKind::rnbp};

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

SchedulerConfig rnbp_config(double low_p, double time_limit, uint64_t seed) {
  SchedulerConfig cfg;
  cfg.kind = SchedulerKind::rnbp;
  cfg.low_p = low_p;
  cfg.high_p = 1.0;
  cfg.edge_ratio_threshold = 0.9;
  cfg.epsilon = 1e-5;
  cfg.max_iterations = UINT64_MAX;
  cfg.time_limit = time_limit;
  cfg.seed = seed;
  return cfg;
}

// 1. Tree exactness: chains and random trees at C=10, every scheduler
//    converges and lands within 1e-9 mean KL of exact marginals at eps=1e-8.
Check criterion_tree_exactness() {
  Check check;
  std::mt19937_64 tree_rng(1000);
  for (int instance = 0; instance < 100; ++instance) {
    PairwiseMRF graph =
        instance % 2 == 0
            ? generate_chain({20 + 9 * static_cast<uint32_t>(instance % 21), 10.0,
                              static_cast<uint64_t>(instance)})
            : bptest::random_tree(tree_rng, 20 + 9 * static_cast<uint32_t>(instance % 21), 10.0);
    const BeliefTable exact = variable_elimination(graph, min_degree_order(graph));

    for (SchedulerKind kind : kAllSchedulers) {
      SchedulerConfig cfg;
      cfg.kind = kind;
      cfg.epsilon = 1e-8;
      cfg.p = 1.0 / 16.0;
      cfg.max_iterations = 100000000;
      cfg.time_limit = 30.0;
      cfg.seed = static_cast<uint64_t>(instance);
      const RunResult result = run(graph, cfg);
      check.require(result.converged, std::string(to_string(kind)) + " failed to converge on instance " +
                                          std::to_string(instance));
      if (!result.converged) return check;
      const double kl = mean_vertex_kl(exact, result.beliefs);
      check.require(kl < 1e-9, std::string(to_string(kind)) + " mean KL " + std::to_string(kl) +
                                   " on instance " + std::to_string(instance));
      if (!check.ok) return check;
    }
  }
  return check;
}

// 2. Oracle cross-check: variable elimination and brute force agree to 1e-12
//    max-norm on 50 random graphs of at most 16 binary variables.
Check criterion_oracle_crosscheck() {
  Check check;
  std::mt19937_64 rng(2000);
  for (int instance = 0; instance < 50; ++instance) {
    const uint32_t n = 4 + static_cast<uint32_t>(uniform_unit(rng) * 13); // 4..16
    const PairwiseMRF graph = bptest::random_graph(rng, n, 2, 0.25);
    const BeliefTable brute = brute_force_marginals(graph);
    const BeliefTable ve = variable_elimination(graph, min_degree_order(graph));
    for (vertex_id v = 0; v < graph.num_vertices(); ++v) {
      const double diff = bptest::max_abs_diff(brute.at(v), ve.at(v));
      check.require(diff <= 1e-12, "instance " + std::to_string(instance) + " vertex " +
                                       std::to_string(v) + " disagreement " + std::to_string(diff));
    }
    if (!check.ok) return check;
  }
  return check;
}

// 3. Correctness parity: on Ising 10x10 C=2, RnBP (LowP=0.7) and serial RBP
//    both converge and their mean KLs against exact marginals agree to 0.01.
Check criterion_correctness_parity() {
  Check check;
  for (int instance = 0; instance < 25; ++instance) {
    const PairwiseMRF graph = generate_ising({10, 2.0, 300 + static_cast<uint64_t>(instance)});
    const BeliefTable exact = variable_elimination(graph, min_degree_order(graph));

    SchedulerConfig srbp;
    srbp.kind = SchedulerKind::serial_rbp;
    srbp.epsilon = 1e-5;
    srbp.max_iterations = 100000000;
    srbp.time_limit = 90.0;
    const RunResult srbp_result = run(graph, srbp);

    const RunResult rnbp_result =
        run(graph, rnbp_config(0.7, 90.0, static_cast<uint64_t>(instance)));

    check.require(srbp_result.converged,
                  "srbp failed to converge on instance " + std::to_string(instance));
    check.require(rnbp_result.converged,
                  "rnbp failed to converge on instance " + std::to_string(instance));
    if (!check.ok) return check;

    const double kl_srbp = mean_vertex_kl(exact, srbp_result.beliefs);
    const double kl_rnbp = mean_vertex_kl(exact, rnbp_result.beliefs);
    check.require(std::fabs(kl_srbp - kl_rnbp) <= 0.01,
                  "instance " + std::to_string(instance) + ": |" + std::to_string(kl_rnbp) +
                      " - " + std::to_string(kl_srbp) + "| > 0.01");
    if (!check.ok) return check;
  }
  return check;
}

// 4. Parallelism/convergence tradeoff on Ising 30x30 C=3 with a 30 s cap:
//    lower p converges on at least as many instances, strictly beating LBP,
//    and commonly-converged instances take longer as p shrinks.
Check criterion_tradeoff() {
  Check check;
  const int instances = 25;
  const double cap = 30.0;
  const std::vector<double> ps{1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0};

  std::vector<std::vector<bool>> converged(ps.size() + 1, std::vector<bool>(instances, false));
  std::vector<std::vector<double>> times(ps.size() + 1, std::vector<double>(instances, 0.0));

  for (int instance = 0; instance < instances; ++instance) {
    const PairwiseMRF graph = generate_ising({30, 3.0, 400 + static_cast<uint64_t>(instance)});
    for (size_t pi = 0; pi < ps.size(); ++pi) {
      SchedulerConfig cfg;
      cfg.kind = SchedulerKind::rs;
      cfg.p = ps[pi];
      cfg.splash_depth = 2;
      cfg.epsilon = 1e-5;
      cfg.max_iterations = UINT64_MAX;
      cfg.time_limit = cap;
      const RunResult r = run(graph, cfg);
      converged[pi][instance] = r.converged;
      times[pi][instance] = r.wall_time;
    }
    SchedulerConfig lbp;
    lbp.kind = SchedulerKind::lbp;
    lbp.epsilon = 1e-5;
    lbp.max_iterations = UINT64_MAX;
    lbp.time_limit = cap;
    const RunResult r = run(graph, lbp);
    converged[ps.size()][instance] = r.converged;
    times[ps.size()][instance] = r.wall_time;
  }

  const auto fraction = [&](size_t row) {
    int count = 0;
    for (bool c : converged[row]) count += c ? 1 : 0;
    return static_cast<double>(count) / instances;
  };
  const double f16 = fraction(0);
  const double f64 = fraction(1);
  const double f256 = fraction(2);
  const double flbp = fraction(3);
  std::cerr << "  [tradeoff] fractions: rs 1/16 " << f16 << ", rs 1/64 " << f64 << ", rs 1/256 "
            << f256 << ", lbp " << flbp << "\n";
  check.require(f256 >= f64 && f64 >= f16 && f16 >= flbp,
                "fraction ordering violated: " + std::to_string(f256) + " / " +
                    std::to_string(f64) + " / " + std::to_string(f16) + " / " +
                    std::to_string(flbp));
  check.require(f256 > flbp, "lowest parallelism did not strictly beat LBP");

  std::vector<std::vector<double>> common_times(ps.size());
  for (int instance = 0; instance < instances; ++instance) {
    if (converged[0][instance] && converged[1][instance] && converged[2][instance]) {
      for (size_t pi = 0; pi < ps.size(); ++pi) {
        common_times[pi].push_back(times[pi][instance]);
      }
    }
  }
  check.require(!common_times[0].empty(), "no commonly-converged instances");
  if (!common_times[0].empty()) {
    const double m16 = median_of(common_times[0]);
    const double m64 = median_of(common_times[1]);
    const double m256 = median_of(common_times[2]);
    std::cerr << "  [tradeoff] medians (s): 1/16 " << m16 << ", 1/64 " << m64 << ", 1/256 "
              << m256 << "\n";
    check.require(m256 >= m64 && m64 >= m16 && m256 > m16,
                  "median time did not increase as p decreased: " + std::to_string(m16) + " / " +
                      std::to_string(m64) + " / " + std::to_string(m256));
  }
  return check;
}

// 10. Module invariant behind the tradeoff criterion, in its portable
//     rendering: over 30 seeded instances, the converged fraction is
//     non-increasing in p for both bulk RBP and RS, and the median
//     converged-iteration count is non-decreasing as p decreases (iteration
//     counts, unlike wall time, do not depend on how many cores execute the
//     frontier).
Check criterion_tradeoff_iterations() {
  Check check;
  const int instances = 30;
  const double cap = 30.0;
  const std::vector<double> ps{1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0};

  for (SchedulerKind kind : {SchedulerKind::rbp, SchedulerKind::rs}) {
    std::vector<double> fractions;
    std::vector<std::vector<bool>> ok(ps.size(), std::vector<bool>(instances, false));
    std::vector<std::vector<double>> iters(ps.size(), std::vector<double>(instances, 0.0));
    for (int instance = 0; instance < instances; ++instance) {
      const PairwiseMRF graph = generate_ising({30, 3.0, 400 + static_cast<uint64_t>(instance)});
      for (size_t pi = 0; pi < ps.size(); ++pi) {
        SchedulerConfig cfg;
        cfg.kind = kind;
        cfg.p = ps[pi];
        cfg.splash_depth = 2;
        cfg.epsilon = 1e-5;
        cfg.max_iterations = UINT64_MAX;
        cfg.time_limit = cap;
        const RunResult r = run(graph, cfg);
        ok[pi][instance] = r.converged;
        iters[pi][instance] = static_cast<double>(r.iterations);
      }
    }
    std::vector<double> medians;
    for (size_t pi = 0; pi < ps.size(); ++pi) {
      int count = 0;
      std::vector<double> common;
      for (int i = 0; i < instances; ++i) {
        count += ok[pi][i] ? 1 : 0;
        if (ok[0][i] && ok[1][i] && ok[2][i]) common.push_back(iters[pi][i]);
      }
      fractions.push_back(static_cast<double>(count) / instances);
      medians.push_back(median_of(common));
    }
    std::cerr << "  [trend " << to_string(kind) << "] fractions 1/16 " << fractions[0] << ", 1/64 "
              << fractions[1] << ", 1/256 " << fractions[2] << "; median iterations "
              << medians[0] << " / " << medians[1] << " / " << medians[2] << "\n";
    check.require(fractions[2] >= fractions[1] && fractions[1] >= fractions[0],
                  std::string(to_string(kind)) + ": fraction not non-increasing in p");
    check.require(medians[2] >= medians[1] && medians[1] >= medians[0],
                  std::string(to_string(kind)) +
                      ": median converged-iteration count decreased as p decreased");
  }
  return check;
}

// 5. LBP partial convergence on Ising 100x100 C=2.5 with a 60 s cap: the
//    converged fraction is strictly between 0 and 1.
Check criterion_lbp_partial() {
  Check check;
  const int instances = 25;
  int converged = 0;
  for (int instance = 0; instance < instances; ++instance) {
    const PairwiseMRF graph = generate_ising({100, 2.5, 500 + static_cast<uint64_t>(instance)});
    SchedulerConfig cfg;
    cfg.kind = SchedulerKind::lbp;
    cfg.epsilon = 1e-5;
    cfg.max_iterations = UINT64_MAX;
    cfg.time_limit = 60.0;
    const RunResult r = run(graph, cfg);
    converged += r.converged ? 1 : 0;
  }
  std::cerr << "  [lbp-partial] converged " << converged << "/" << instances << "\n";
  check.require(converged > 0, "LBP converged on no instance");
  check.require(converged < instances, "LBP converged on every instance");
  return check;
}

// 6. RnBP convergence extension on the same C=2.5 suite: RnBP converges on a
//    superset of LBP's instances plus at least one more, and is at most 2x
//    LBP's median wall time where both converge.
Check criterion_rnbp_extension() {
  Check check;
  const int instances = 25;
  std::vector<bool> lbp_ok(instances);
  std::vector<bool> rnbp_ok(instances);
  std::vector<double> lbp_time(instances);
  std::vector<double> rnbp_time(instances);

  for (int instance = 0; instance < instances; ++instance) {
    const PairwiseMRF graph = generate_ising({100, 2.5, 500 + static_cast<uint64_t>(instance)});
    SchedulerConfig lbp;
    lbp.kind = SchedulerKind::lbp;
    lbp.epsilon = 1e-5;
    lbp.max_iterations = UINT64_MAX;
    lbp.time_limit = 60.0;
    const RunResult lr = run(graph, lbp);
    lbp_ok[instance] = lr.converged;
    lbp_time[instance] = lr.wall_time;

    const RunResult rr = run(graph, rnbp_config(0.7, 60.0, static_cast<uint64_t>(instance)));
    rnbp_ok[instance] = rr.converged;
    rnbp_time[instance] = rr.wall_time;
  }

  int extra = 0;
  std::vector<double> common_lbp;
  std::vector<double> common_rnbp;
  for (int i = 0; i < instances; ++i) {
    check.require(!lbp_ok[i] || rnbp_ok[i],
                  "LBP converged on instance " + std::to_string(i) + " but RnBP did not");
    if (rnbp_ok[i] && !lbp_ok[i]) ++extra;
    if (rnbp_ok[i] && lbp_ok[i]) {
      common_lbp.push_back(lbp_time[i]);
      common_rnbp.push_back(rnbp_time[i]);
    }
  }
  std::cerr << "  [rnbp-ext] rnbp extra conversions: " << extra
            << ", common instances: " << common_lbp.size() << "\n";
  check.require(extra >= 1, "RnBP did not extend convergence beyond LBP");
  if (!common_lbp.empty()) {
    const double ml = median_of(common_lbp);
    const double mr = median_of(common_rnbp);
    std::cerr << "  [rnbp-ext] median time (s): lbp " << ml << ", rnbp " << mr << "\n";
    check.require(mr <= 2.0 * ml, "RnBP median time " + std::to_string(mr) +
                                      " exceeds 2x LBP median " + std::to_string(ml));
  }
  return check;
}

// 7. Hard instances: RnBP at LowP=0.1 converges on strictly more Ising 30x30
//    C=3 instances than LBP within 60 s.
Check criterion_low_parallelism_hard() {
  Check check;
  const int instances = 10;
  int lbp_converged = 0;
  int rnbp_converged = 0;
  for (int instance = 0; instance < instances; ++instance) {
    const PairwiseMRF graph = generate_ising({30, 3.0, 700 + static_cast<uint64_t>(instance)});
    SchedulerConfig lbp;
    lbp.kind = SchedulerKind::lbp;
    lbp.epsilon = 1e-5;
    lbp.max_iterations = UINT64_MAX;
    lbp.time_limit = 60.0;
    lbp_converged += run(graph, lbp).converged ? 1 : 0;
    rnbp_converged +=
        run(graph, rnbp_config(0.1, 60.0, static_cast<uint64_t>(instance))).converged ? 1 : 0;
  }
  std::cerr << "  [hard] lbp " << lbp_converged << "/10, rnbp lowp=0.1 " << rnbp_converged
            << "/10\n";
  check.require(rnbp_converged > lbp_converged,
                "rnbp " + std::to_string(rnbp_converged) + " <= lbp " +
                    std::to_string(lbp_converged));
  return check;
}

// 8. Determinism: identical seeds give bitwise-identical traces and beliefs
//    for every scheduler; bulk frontier application is worker-count invariant.
Check criterion_determinism() {
  Check check;
  const PairwiseMRF graph = generate_ising({8, 2.5, 800});
  for (SchedulerKind kind : kAllSchedulers) {
    SchedulerConfig cfg;
    cfg.kind = kind;
    cfg.p = 0.25;
    cfg.seed = 17;
    cfg.max_iterations = 5000;
    cfg.time_limit = 30.0;
    const RunResult a = run(graph, cfg);
    const RunResult b = run(graph, cfg);
    check.require(bptest::trace_signature(a) == bptest::trace_signature(b),
                  std::string(to_string(kind)) + " trace not reproducible");
    for (vertex_id v = 0; v < graph.num_vertices(); ++v) {
      const auto ba = a.beliefs.at(v);
      const auto bb = b.beliefs.at(v);
      for (size_t i = 0; i < ba.size(); ++i) {
        check.require(ba[i] == bb[i], std::string(to_string(kind)) + " beliefs differ bitwise");
      }
    }
  }

  // Worker-count independence: 1 worker vs clearly-more-than-the-machine.
  const unsigned max_workers = std::max(4u, std::thread::hardware_concurrency());
  SchedulerConfig one;
  one.kind = SchedulerKind::rbp;
  one.worker_count = 1;
  SchedulerConfig many = one;
  many.worker_count = max_workers;
  EngineState sa(graph, one);
  EngineState sb(graph, many);
  for (int iter = 0; iter < 20; ++iter) {
    const std::vector<directed_edge_id> frontier = rbp_frontier(sa, 0.3);
    apply_frontier(sa, frontier);
    apply_frontier(sb, frontier);
  }
  check.require(bptest::stores_identical(sa.messages(), sb.messages()),
                "apply_frontier differs between 1 and " + std::to_string(max_workers) +
                    " workers");
  for (directed_edge_id d = 0; d < graph.num_directed_edges(); ++d) {
    check.require(sa.tracker().residual_of(d) == sb.tracker().residual_of(d),
                  "residuals differ between worker counts");
  }

  EngineState spa(graph, one);
  EngineState spb(graph, many);
  for (int iter = 0; iter < 10; ++iter) {
    apply_splash_frontier(spa, rs_frontier(spa, 0.2, 2));
    apply_splash_frontier(spb, rs_frontier(spb, 0.2, 2));
  }
  check.require(bptest::stores_identical(spa.messages(), spb.messages()),
                "apply_splash_frontier differs between worker counts");
  return check;
}

// 9. Frontier unit properties: RnBP pruning, RBP/LBP coincidence, splash
//    disjointness, EdgeRatio boundary.
Check criterion_frontier_properties() {
  Check check;
  const PairwiseMRF graph = generate_ising({6, 2.5, 900});

  SchedulerConfig cfg;
  cfg.kind = SchedulerKind::rnbp;
  EngineState st(graph, cfg);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    for (directed_edge_id d : rnbp_frontier(st, 0.4, rng)) {
      check.require(st.tracker().residual_of(d) >= cfg.epsilon,
                    "rnbp frontier contains a converged message");
    }
  }

  check.require(rbp_frontier(st, 1.0) == frontier_lbp(st), "rbp p=1 differs from the LBP frontier");

  const std::vector<Splash> splashes = rs_frontier(st, 1.0, 2);
  std::set<vertex_id> claimed_once;
  size_t total_claims = 0;
  for (const Splash& s : splashes) {
    std::set<vertex_id> sources;
    for (directed_edge_id d : s.edges) sources.insert(graph.directed_edge(d).source);
    total_claims += sources.size();
    claimed_once.insert(sources.begin(), sources.end());
  }
  check.require(claimed_once.size() == total_claims, "splash claimed sets overlap");

  check.require(select_parallelism(1000, 900, cfg) == cfg.high_p,
                "EdgeRatio boundary 0.9 must map to high_p");
  check.require(select_parallelism(1000, 901, cfg) == cfg.low_p,
                "EdgeRatio just above 0.9 must map to low_p");
  check.require(select_parallelism(0, 123, cfg) == cfg.high_p,
                "first iteration must use high_p");
  return check;
}

struct Criterion {
  int number;
  const char* name;
  Check (*fn)();
};

const Criterion kCriteria[] = {
    {1, "tree exactness across all schedulers", criterion_tree_exactness},
    {2, "variable elimination vs brute force", criterion_oracle_crosscheck},
    {3, "RnBP/SRBP correctness parity on Ising 10x10 C=2", criterion_correctness_parity},
    {4, "parallelism/convergence tradeoff on Ising 30x30 C=3", criterion_tradeoff},
    {5, "LBP partial convergence on Ising 100x100 C=2.5", criterion_lbp_partial},
    {6, "RnBP convergence extension on Ising 100x100 C=2.5", criterion_rnbp_extension},
    {7, "low-parallelism RnBP on hard instances", criterion_low_parallelism_hard},
    {8, "seed determinism and worker-count independence", criterion_determinism},
    {9, "frontier selection unit properties", criterion_frontier_properties},
    {10, "tradeoff-trend invariant (fractions and iteration medians)", criterion_tradeoff_iterations},
};

} // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }

  bool all_ok = true;
  for (const Criterion& criterion : kCriteria) {
    if (only != 0 && criterion.number != only) continue;
    const Check result = criterion.fn();
    all_ok = all_ok && result.ok;
    std::cout << (result.ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.number << ": "
              << criterion.name;
    if (!result.ok) std::cout << " — " << result.detail;
    std::cout << "\n" << std::flush;
  }
  return all_ok ? 0 : 1;
}
