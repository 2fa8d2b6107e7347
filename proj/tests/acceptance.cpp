// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exits 1 when any criterion fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "adiabound/bounds/bounds.hpp"
#include "adiabound/bounds/gap.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/evolution/evolve.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/models/models.hpp"
#include "adiabound/tsp/statistics.hpp"

using namespace adiabound;
using evolution::Schedule;
using models::ModelBundle;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [miss: " << what << "]";
    }
  }
};

// Largest norm drift over every accepted run in criteria 4 and 6, read by 11.
double g_max_drift = 0.0;
std::size_t g_accepted_runs = 0;
std::size_t g_drift_failures = 0;

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= limit_seconds) {
    v.pass = false;
    v.detail << " [runtime " << secs << " s over " << limit_seconds << " s]";
  }
  if (!v.pass) ++failures;
  std::printf("criterion %2d %-28s %s (%.2f s)%s\n", id, name, v.pass ? "PASS" : "FAIL", secs, v.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const std::vector<std::size_t> kGroverSizes{2, 4, 8, 64, 1024};

/// Schedule family for a bundle: das_wei is parameterized by the Hilbert-space dimension.
Schedule family(Schedule::Kind kind, const ModelBundle& b) { return evolution::make_schedule(kind, b.g_I.dim(), 1.0); }

tsp::TspInstance audit_instance(std::size_t M, std::uint64_t index) {
  return tsp::random_instance(M, tsp::DistanceSampler::uniform(0.0, 1.0), 2024, index);
}

}  // namespace

int main() {
  std::printf("adiabound acceptance %s\n", ADIABOUND_VERSION);

  criterion(1, "grover-spread", 1.0, [](Verdict& v) {
    double worst = 0.0;
    for (auto N : kGroverSizes) {
      const auto b = models::build_grover(N, 0);
      const double n = static_cast<double>(N);
      worst = std::max(worst, std::abs(bounds::delta_ie(b.g_I, b.H_P) - std::sqrt(n - 1) / n));
    }
    v.detail << " max |delta_ie - sqrt(N-1)/N| = " << fmt(worst) << " (tol 1e-12)";
    v.check(worst <= 1e-12, "spread");
  });

  criterion(2, "linear-t_min", 1.0, [](Verdict& v) {
    double worst = 0.0;
    for (auto N : kGroverSizes) {
      const auto b = models::build_grover(N, 0);
      const double n = static_cast<double>(N);
      const double t = bounds::t_min(Schedule::linear(1.0), bounds::delta_ie(b.g_I, b.H_P));
      const double closed = 4 * n / std::sqrt(n - 1);
      worst = std::max(worst, std::abs(t / closed - 1));
      if (N >= 64) {
        const double r = t / std::sqrt(n);
        v.detail << " N=" << N << ": t_min/sqrt(N)=" << fmt(r);
        v.check(r >= 3.8 && r <= 4.2, "t_min/sqrt(N) in [3.8, 4.2] at N=" + std::to_string(N));
      }
    }
    v.detail << "; max rel error vs 4N/sqrt(N-1) = " << fmt(worst) << " (tol 1e-9)";
    v.check(worst <= 1e-9, "closed form");
  });

  criterion(3, "das_wei-constancy", 1.0, [](Verdict& v) {
    // max_u g(u) for g = u + sqrt(N) u (1 - u) sits at u* = (1 + sqrt N) / (2 sqrt N):
    // g_max = (1 + sqrt N)^2 / (4 sqrt N) = (1/2)(1 + sqrt(N)/2) + 1/(4 sqrt N).
    // The scale 1/2 is the one fixed by the large-N asymptote.
    const std::vector<std::size_t> Ns{4, 16, 64, 256, 1024};
    double prev = INFINITY, first = 0.0;
    bool monotone = true, bounded = true;
    double worst_dev = 0.0, worst_analytic = 0.0;
    v.detail << " t_min:";
    for (auto N : Ns) {
      const auto b = models::build_grover(N, 0);
      const auto fam = Schedule::das_wei(N, 1.0);
      const double t = bounds::t_min(fam, bounds::delta_ie(b.g_I, b.H_P));
      if (N == Ns.front()) first = t;
      monotone = monotone && t <= prev * (1 + 1e-12);
      bounded = bounded && t <= first * (1 + 1e-12);
      prev = t;
      v.detail << " " << fmt(t);

      const double rn = std::sqrt(static_cast<double>(N));
      const double analytic = (1 + rn) * (1 + rn) / (4 * rn);
      double grid_max = 0.0;
      for (int k = 0; k <= 200000; ++k) grid_max = std::max(grid_max, fam.g_unit(k / 200000.0));
      worst_analytic = std::max(worst_analytic, std::abs(grid_max - analytic) / analytic);
      worst_analytic = std::max(worst_analytic, std::abs(fam.max_g() - analytic) / analytic);
      const double dev = analytic / (0.5 * (1 + rn / 2)) - 1;
      worst_dev = std::max(worst_dev, std::abs(dev));
    }
    v.detail << "; max g vs (1+sqrt(N)/2)/2: worst deviation " << fmt(worst_dev) << " (tol 0.10, at N=4 it is 1/8)"
             << "; analytic max vs grid " << fmt(worst_analytic);
    v.check(monotone, "t_min non-increasing in N");
    v.check(bounded, "t_min bounded by t_min(N=4)");
    v.check(worst_dev <= 0.10, "energy proxy within 10%");
    v.check(worst_analytic <= 1e-9, "analytic max of g");
  });

  criterion(4, "inequality-audit", 600.0, [](Verdict& v) {
    std::vector<ModelBundle> suite;
    for (std::size_t m = 0; m < 4; ++m) suite.push_back(models::build_grover(4, m));
    for (std::size_t m : {0u, 5u, 9u, 15u, 11u}) suite.push_back(models::build_grover(16, m));
    for (std::uint64_t i = 0; i < 5; ++i) suite.push_back(models::build_tsp_finite(audit_instance(3, i), tsp::DsqPolicy::parity()));
    for (std::uint64_t i = 0; i < 5; ++i) suite.push_back(models::build_tsp_finite(audit_instance(4, i), tsp::DsqPolicy::parity()));

    std::size_t runs = 0, margins = 0;
    double slack_min = INFINITY, distance_max = 0.0;
    for (const auto& b : suite) {
      const double delta = bounds::delta_ie(b.g_I, b.H_P);
      const auto betas = bounds::standard_betas(b.g_I, b.H_P);
      for (auto kind : {Schedule::Kind::linear, Schedule::Kind::das_wei}) {
        const auto fam = family(kind, b);
        const double tm = bounds::t_min(fam, delta);
        for (double mult : {0.1, 1.0, 10.0}) {
          const auto sch = fam.with_duration(mult * tm);
          ++runs;
          try {
            const auto run = evolution::evolve_refined(b.H_I, b.H_P, b.g_I, sch);
            ++g_accepted_runs;
            g_max_drift = std::max(g_max_drift, run.max_norm_drift);
            for (const auto& m : bounds::verify_distance_bound(run, b.g_I, 0.0, b.H_P, sch, betas)) {
              distance_max = std::max(distance_max, m.distance);
              if (!m.applicable) continue;
              ++margins;
              slack_min = std::min(slack_min, m.slack);
            }
          } catch (const NormDriftError&) {
            ++g_drift_failures;
          }
        }
      }
    }
    v.detail << " runs=" << runs << " margins=" << margins << " min slack=" << fmt(slack_min)
             << " max distance=" << fmt(distance_max);
    v.check(runs >= 100, "at least 100 runs");
    v.check(g_drift_failures == 0, "every run accepted");
    v.check(slack_min >= -1e-7, "slack >= -1e-7");
    v.check(distance_max <= 2 + 1e-7, "distance <= 2 + 1e-7");
  });

  criterion(5, "beta-minimum-identity", 10.0, [](Verdict& v) {
    const auto sampler = tsp::DistanceSampler::uniform(0.0, 1.0);
    std::vector<ModelBundle> suite{models::build_grover(16, 3), models::build_tsp_rank(tsp::random_instance(4, sampler, 5)),
                                   models::build_tsp_tuple(tsp::random_instance(3, sampler, 5), std::nullopt,
                                                           std::nullopt, tsp::DsqPolicy::parity()),
                                   models::build_tsp_finite(tsp::random_instance(4, sampler, 5), tsp::DsqPolicy::parity())};
    std::mt19937_64 gen(99);
    double worst = 0.0;
    for (const auto& b : suite) {
      const double mean = hilbert::expectation(b.H_P, b.g_I);
      const double d = bounds::delta_ie(b.g_I, b.H_P);
      std::uniform_real_distribution<double> U(mean - 5 * d - 1, mean + 5 * d + 1);
      for (int i = 0; i < 100; ++i) {
        const double beta = U(gen);
        const double sn = hilbert::shifted_norm(b.H_P, b.g_I, beta);
        worst = std::max(worst, std::abs(sn * sn - d * d - (beta - mean) * (beta - mean)));
      }
    }
    v.detail << " models=4 betas=100 each, max residual " << fmt(worst) << " (tol 1e-9)";
    v.check(worst <= 1e-9, "identity");
  });

  criterion(6, "adiabatic-correctness", 300.0, [](Verdict& v) {
    std::size_t ok = 0, total = 0;
    for (std::size_t M : {3u, 4u}) {
      std::size_t ok_m = 0;
      double p_min = 1.0, p_sum = 0.0;
      for (std::uint64_t i = 0; i < 10; ++i) {
        const auto inst = tsp::random_instance(M, tsp::DistanceSampler::uniform(0.0, 1.0), 6, i);
        const auto b = models::build_tsp_finite(inst, tsp::DsqPolicy::parity());
        // oracle: every tuple whose decoded tour is a brute-force shortest tour
        const double best = tsp::brute_force_shortest(inst).length;
        std::vector<std::size_t> argmin;
        for (std::size_t k = 0; k < b.g_I.dim(); ++k) {
          const auto tour = b.decode(k);
          if (tour && tsp::lengths_tied(tsp::tour_length(inst, *tour), best)) argmin.push_back(k);
        }
        const auto fam = Schedule::linear(1.0);
        const double T = 50 * bounds::t_min(fam, bounds::delta_ie(b.g_I, b.H_P));
        ++total;
        try {
          const auto run = evolution::evolve_refined(b.H_I, b.H_P, b.g_I, fam.with_duration(T));
          ++g_accepted_runs;
          g_max_drift = std::max(g_max_drift, run.max_norm_drift);
          const double p = evolution::success_probability(run, argmin);
          p_min = std::min(p_min, p);
          p_sum += p;
          if (p >= 0.99) ++ok_m;
        } catch (const NormDriftError&) {
          ++g_drift_failures;
        }
      }
      ok += ok_m;
      v.detail << " M=" << M << ": " << ok_m << "/10 with p>=0.99, min p " << fmt(p_min) << ", mean p "
               << fmt(p_sum / 10) << ";";
    }
    v.check(ok == total, "p >= 0.99 on every instance");
  });

  criterion(7, "sigma-scaling", 120.0, [](Verdict& v) {
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    const auto rep = tsp::sigma_scaling_study(5, 9, 200, 7, tsp::DistanceSampler::uniform(0.0, 1.0), threads);
    v.detail << " ratios:";
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
      const double r = rep.rows[i].ratio_sqrtM / rep.rows[i + 1].ratio_sqrtM;
      v.detail << " " << fmt(r);
      v.check(r >= 0.75 && r <= 1.33, "ratio in [0.75, 1.33] at M=" + std::to_string(rep.rows[i].M));
    }
  });

  criterion(8, "tour-fraction-decay", 1.0, [](Verdict& v) {
    const auto rows = tsp::tour_fraction_decay(7, 12);
    for (const auto& r : rows) {
      // independent product form prod_{k=1..M} k/M
      long double exact = 1.0L;
      for (std::size_t k = 1; k <= r.M; ++k) exact *= static_cast<long double>(k) / static_cast<long double>(r.M);
      v.check(std::abs(static_cast<double>(exact) / r.ratio - 1) <= 1e-12, "library ratio at M=" + std::to_string(r.M));
      if (r.M == 7) continue;
      v.check(r.log_decrement >= -1.2 && r.log_decrement <= -0.8, "log decrement at M=" + std::to_string(r.M));
      if (r.M % 2 == 0) {
        const double dev = static_cast<double>(exact) / r.stirling - 1;
        v.detail << " M=" << r.M << ": dev vs sqrt(2 pi M)e^-M " << fmt(dev) << ", vs e^-M/sqrt(M) "
                 << fmt(r.quoted_deviation) << ";";
        v.check(std::abs(dev) <= 0.01, "within 1% of Stirling at M=" + std::to_string(r.M));
      }
    }
    v.detail << " log decrements in [" << fmt(rows.back().log_decrement) << ", " << fmt(rows[1].log_decrement) << "]";
  });

  criterion(9, "tuple-energy-budget", 1.0, [](Verdict& v) {
    const auto sampler = tsp::DistanceSampler::uniform(0.0, 1.0);
    for (std::size_t M : {3u, 4u}) {
      const auto inst = tsp::random_instance(M, sampler, 9);
      const auto tup = models::build_tsp_tuple(inst, std::nullopt, std::nullopt, tsp::DsqPolicy::parity());
      const auto rank = models::build_tsp_rank(inst);
      v.detail << " M=" << M << ": tuple " << fmt(tup.energy_budget.alpha_cost) << ", rank "
               << fmt(rank.energy_budget.alpha_cost) << ";";
      v.check(tup.energy_budget.alpha_cost == static_cast<double>(M * M), "tuple alpha_cost = M^2");
      v.check(rank.energy_budget.alpha_cost == static_cast<double>(tsp::factorial(M)), "rank alpha_cost = M!");
    }
  });

  criterion(10, "delta_ie-asymptote", 300.0, [](Verdict& v) {
    const auto rows =
        models::delta_ie_asymptote_study(tsp::DistanceSampler::uniform(0.0, 1.0), 7, 3, 6, tsp::DsqPolicy::parity());
    v.detail << " rel deviation from non-tour std:";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      v.detail << " M=" << rows[i].M << " " << fmt(rows[i].rel_deviation);
      if (i > 0) v.check(rows[i].rel_deviation < rows[i - 1].rel_deviation, "monotone at M=" + std::to_string(rows[i].M));
    }
    v.check(rows.back().M == 6 && rows.back().rel_deviation <= 0.10, "within 10% at M=6");
  });

  criterion(11, "numerics-hygiene", 60.0, [](Verdict& v) {
    v.detail << " accepted runs=" << g_accepted_runs << " max drift=" << fmt(g_max_drift);
    v.check(g_accepted_runs > 0 && g_drift_failures == 0, "criteria 4 and 6 runs accepted");
    v.check(g_max_drift <= 1e-8, "drift <= 1e-8");

    const auto b = models::build_grover(4, 0);
    const auto sch = Schedule::linear(10.0);
    auto final_at = [&](double h) {
      evolution::StepPolicy p;
      p.fixed_step = h;
      p.norm_tol = 1e-2;
      return evolution::evolve(b.H_I, b.H_P, b.g_I, sch, p).final_state.amps;
    };
    const hilbert::CVector ref = final_at(0.25 / 8);
    const double order = std::log2((final_at(0.25) - ref).norm() / (final_at(0.125) - ref).norm());
    v.detail << "; step-halving order " << fmt(order);
    v.check(order >= 3.7 && order <= 4.3, "order in [3.7, 4.3]");

    Eigen::VectorXd diag(2);
    diag << 0.0, 1.0;
    const hilbert::HamiltonianOp D = hilbert::Diagonal(diag);
    const auto e0 = hilbert::basis_state(hilbert::BasisSpec::flat(2), 0);
    const auto run = evolution::evolve(D, D, e0, Schedule::linear(5.0));
    const double dev = (run.final_state.amps - e0.amps).norm();
    v.detail << "; eigenstate deviation " << fmt(dev);
    v.check(dev <= 1e-8, "stationary eigenstate");
  });

  criterion(12, "gap-cross-check", 1.0, [](Verdict& v) {
    const auto b = models::build_grover(4, 0);
    const auto r = bounds::gap_scan(b.H_I, b.H_P, Schedule::linear(1.0));
    const Eigen::MatrixXcd H = 0.5 * (hilbert::to_dense(b.H_I) + hilbert::to_dense(b.H_P));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const double oracle = es.eigenvalues()[1] - es.eigenvalues()[0];
    v.detail << " g_min=" << fmt(r.g_min) << " at s=" << fmt(r.g_min_location) << ", dense oracle " << fmt(oracle);
    v.check(std::abs(r.g_min - 0.5) <= 1e-6, "g_min = 1/2");
    v.check(std::abs(r.g_min_location - 0.5) <= 1e-6, "location s = 1/2");
    v.check(std::abs(r.g_min - oracle) <= 1e-6, "dense oracle");
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
