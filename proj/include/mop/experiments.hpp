#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mop/diagnostics.hpp"
#include "mop/io.hpp"

namespace mop {

enum class Algorithm { kryl, krylreorth_partial, krylreorth_full, core, oracle };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kryl: return "kryl";
    case Algorithm::krylreorth_partial: return "krylreorth_partial";
    case Algorithm::krylreorth_full: return "krylreorth_full";
    case Algorithm::core: return "core";
    case Algorithm::oracle: return "oracle";
  }
  return "?";
}

inline Algorithm algorithm_from_name(const std::string& s) {
  if (s == "kryl") return Algorithm::kryl;
  if (s == "krylreorth_partial") return Algorithm::krylreorth_partial;
  if (s == "krylreorth_full") return Algorithm::krylreorth_full;
  if (s == "core") return Algorithm::core;
  if (s == "oracle") return Algorithm::oracle;
  throw solver_error(errc::validation, "unknown algorithm: " + s);
}

template <class S>
SolveResult<S> run_algorithm(Algorithm a, const DiscreteSystem<S>& sys) {
  switch (a) {
    case Algorithm::kryl: return iep_kryl(sys);
    case Algorithm::core: return iep_core(sys);
    case Algorithm::oracle: return oracle_solve(sys);
    case Algorithm::krylreorth_partial:
    case Algorithm::krylreorth_full:
      if constexpr (scalar_traits<S>::has_sqrt) {
        return iep_krylreorth(sys, a == Algorithm::krylreorth_full ? ReorthWindow::full
                                                                   : ReorthWindow::partial);
      } else {
        throw solver_error(errc::validation,
                           "normalized variants need a kind with a square root");
      }
  }
  throw solver_error(errc::validation, "unknown algorithm");
}

inline int thread_budget_from_env() {
  const char* s = std::getenv("MOP_THREADS");
  if (!s) return 1;
  const int v = std::atoi(s);
  return v < 1 ? 1 : v;
}

struct ExperimentOptions {
  std::vector<std::size_t> sizes;  // empty: per-experiment default
  std::uint64_t seed = 1;          // synthetic weight streams
  bool timings = false;
  int threads = thread_budget_from_env();
  int cond_trials = 5;
  double cond_eps = 0x1p-52;
};

namespace detail {

template <class F>
void parallel_cells(std::size_t count, int threads, F&& body) {
  if (threads > static_cast<int>(count)) threads = static_cast<int>(count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Metrics of one (size, algorithm) cell.  A solver failure leaves the cell's
// numbers as NaN so one hard size does not abort a whole figure.
struct CellMetrics {
  double e = std::numeric_limits<double>::quiet_NaN();
  double loss = std::numeric_limits<double>::quiet_NaN();
  double loss_scaled = std::numeric_limits<double>::quiet_NaN();
  double back_nodes = std::numeric_limits<double>::quiet_NaN();
  double back_w1 = std::numeric_limits<double>::quiet_NaN();
  double back_w2 = std::numeric_limits<double>::quiet_NaN();
  double cond = std::numeric_limits<double>::quiet_NaN();
  double seconds = std::numeric_limits<double>::quiet_NaN();
};

inline std::string csv_path(const std::string& out_dir, const std::string& stem) {
  std::filesystem::create_directories(out_dir);
  return out_dir + "/" + stem + ".csv";
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw solver_error(errc::validation, "cannot open " + path + " for writing");
  out << header << '\n';
  for (const auto& line : lines) out << line << '\n';
}

using SystemFactory = DiscreteSystem<double> (*)(std::size_t, const ExperimentOptions&);

inline DiscreteSystem<double> kravchuk_factory(std::size_t n, const ExperimentOptions&) {
  return make_kravchuk_system<double>(n, 0.4, 0.5);
}
inline DiscreteSystem<double> hahn_factory(std::size_t n, const ExperimentOptions&) {
  return make_hahn_system<double>(n, 1.0, 1.5, 1.0);
}
inline DiscreteSystem<double> equidistant_factory(std::size_t n, const ExperimentOptions& o) {
  return make_equidistant_system<double>(n, o.seed);
}
inline DiscreteSystem<double> chebyshev_factory(std::size_t n, const ExperimentOptions& o) {
  return make_chebyshev_system<double>(n, o.seed);
}

// Accuracy-vs-size figure: forward error against the reference solution,
// biorthogonality loss, and the perturbation yardstick for each size.
inline std::string accuracy_figure(const std::string& stem, SystemFactory make,
                                   std::vector<std::size_t> sizes, const ExperimentOptions& o,
                                   const std::string& out_dir, bool with_conditioning,
                                   bool with_scaled_loss) {
  const std::array<Algorithm, 4> algs = {Algorithm::kryl, Algorithm::krylreorth_partial,
                                         Algorithm::krylreorth_full, Algorithm::core};
  std::vector<std::array<CellMetrics, 4>> cells(sizes.size());
  parallel_cells(sizes.size(), o.threads, [&](std::size_t idx) {
    const std::size_t n = sizes[idx];
    const DiscreteSystem<double> sys = make(n, o);
    const BandedHessenberg<double> href = reference_solve(sys);
    double cond = std::numeric_limits<double>::quiet_NaN();
    if (with_conditioning)
      cond = conditioning_estimate(sys, o.cond_eps, o.cond_trials, derive_seed(o.seed, n, 3));
    for (std::size_t a = 0; a < algs.size(); ++a) {
      CellMetrics& m = cells[idx][a];
      m.cond = cond;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const SolveResult<double> r = run_algorithm(algs[a], sys);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m.e = forward_error(r.h, href);
        m.loss = biorth_loss(r.w, r.v);
        if (with_scaled_loss) m.loss_scaled = biorth_loss_scaled(r.w, r.v);
      } catch (const solver_error&) {
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    }
  });
  std::string header = with_conditioning ? "n,algorithm,e_n,biorth_loss,conditioning"
                                         : "n,algorithm,e_n,biorth_loss,biorth_loss_scaled";
  if (o.timings) header += ",runtime_seconds";
  std::vector<std::string> lines;
  for (std::size_t idx = 0; idx < sizes.size(); ++idx)
    for (std::size_t a = 0; a < algs.size(); ++a) {
      const CellMetrics& m = cells[idx][a];
      std::string line = std::to_string(sizes[idx]);
      line += ',';
      line += algorithm_name(algs[a]);
      line += ',' + format_double(m.e) + ',' + format_double(m.loss);
      line += ',' + format_double(with_conditioning ? m.cond : m.loss_scaled);
      if (o.timings) line += ',' + format_double(m.seconds);
      lines.push_back(std::move(line));
    }
  const std::string path = csv_path(out_dir, stem);
  write_csv(path, header, lines);
  return path;
}

inline std::string backward_figure(const std::string& stem, SystemFactory make,
                                   std::vector<std::size_t> sizes, const ExperimentOptions& o,
                                   const std::string& out_dir) {
  const std::array<Algorithm, 4> algs = {Algorithm::kryl, Algorithm::krylreorth_partial,
                                         Algorithm::krylreorth_full, Algorithm::core};
  std::vector<std::array<CellMetrics, 4>> cells(sizes.size());
  parallel_cells(sizes.size(), o.threads, [&](std::size_t idx) {
    const std::size_t n = sizes[idx];
    const DiscreteSystem<double> sys = make(n, o);
    for (std::size_t a = 0; a < algs.size(); ++a) {
      CellMetrics& m = cells[idx][a];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const SolveResult<double> r = run_algorithm(algs[a], sys);
        const BackwardReport rep = backward_errors(sys, r.h);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m.back_nodes = rep.nodes;
        m.back_w1 = rep.weights1;
        m.back_w2 = rep.weights2;
      } catch (const solver_error&) {
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    }
  });
  std::string header = "n,algorithm,backward_nodes,backward_w1,backward_w2";
  if (o.timings) header += ",runtime_seconds";
  std::vector<std::string> lines;
  for (std::size_t idx = 0; idx < sizes.size(); ++idx)
    for (std::size_t a = 0; a < algs.size(); ++a) {
      const CellMetrics& m = cells[idx][a];
      std::string line = std::to_string(sizes[idx]);
      line += ',';
      line += algorithm_name(algs[a]);
      line += ',' + format_double(m.back_nodes) + ',' + format_double(m.back_w1) + ',' +
              format_double(m.back_w2);
      if (o.timings) line += ',' + format_double(m.seconds);
      lines.push_back(std::move(line));
    }
  const std::string path = csv_path(out_dir, stem);
  write_csv(path, header, lines);
  return path;
}

// Large-size scaling run: the three Krylov-style variants only (the chasing
// route is quartic in the size and is excluded here), forward error against
// the extended-precision reference.
inline std::string scaling_figure(const std::string& stem, SystemFactory make,
                                  std::vector<std::size_t> sizes, const ExperimentOptions& o,
                                  const std::string& out_dir) {
  const std::array<Algorithm, 3> algs = {Algorithm::kryl, Algorithm::krylreorth_partial,
                                         Algorithm::krylreorth_full};
  std::vector<std::array<CellMetrics, 3>> cells(sizes.size());
  parallel_cells(sizes.size(), o.threads, [&](std::size_t idx) {
    const std::size_t n = sizes[idx];
    const DiscreteSystem<double> sys = make(n, o);
    const BandedHessenberg<double> href = reference_solve(sys);
    for (std::size_t a = 0; a < algs.size(); ++a) {
      CellMetrics& m = cells[idx][a];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const SolveResult<double> r = run_algorithm(algs[a], sys);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m.e = forward_error(r.h, href);
      } catch (const solver_error&) {
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    }
  });
  std::string header = "n,algorithm,e_n";
  if (o.timings) header += ",runtime_seconds";
  std::vector<std::string> lines;
  for (std::size_t idx = 0; idx < sizes.size(); ++idx)
    for (std::size_t a = 0; a < algs.size(); ++a) {
      const CellMetrics& m = cells[idx][a];
      std::string line = std::to_string(sizes[idx]);
      line += ',';
      line += algorithm_name(algs[a]);
      line += ',' + format_double(m.e);
      if (o.timings) line += ',' + format_double(m.seconds);
      lines.push_back(std::move(line));
    }
  const std::string path = csv_path(out_dir, stem);
  write_csv(path, header, lines);
  return path;
}

inline std::vector<std::size_t> range_sizes(std::size_t lo, std::size_t hi, std::size_t step) {
  std::vector<std::size_t> v;
  for (std::size_t n = lo; n <= hi; n += step) v.push_back(n);
  return v;
}

}  // namespace detail

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig1_kravchuk",      "fig1_hahn",
                                                 "fig2_hahn_backward", "fig3_equidistant",
                                                 "fig4_chebyshev",     "fig5_scaling"};
  return names;
}

// Runs one named experiment and returns the CSV paths it wrote.
inline std::vector<std::string> run_experiment(const std::string& name,
                                               const ExperimentOptions& opts,
                                               const std::string& out_dir) {
  using namespace detail;
  auto sizes_or = [&](std::vector<std::size_t> dflt) {
    return opts.sizes.empty() ? std::move(dflt) : opts.sizes;
  };
  if (name == "fig1_kravchuk")
    return {accuracy_figure(name, &kravchuk_factory, sizes_or(range_sizes(5, 30, 5)), opts,
                            out_dir, /*with_conditioning=*/true, /*with_scaled_loss=*/false)};
  if (name == "fig1_hahn")
    return {accuracy_figure(name, &hahn_factory, sizes_or(range_sizes(5, 30, 5)), opts, out_dir,
                            true, false)};
  if (name == "fig2_hahn_backward")
    return {backward_figure(name, &hahn_factory, sizes_or(range_sizes(5, 20, 5)), opts, out_dir)};
  if (name == "fig3_equidistant")
    return {accuracy_figure(name, &equidistant_factory, sizes_or(range_sizes(25, 150, 25)), opts,
                            out_dir, false, true)};
  if (name == "fig4_chebyshev")
    return {accuracy_figure(name, &chebyshev_factory, sizes_or(range_sizes(25, 150, 25)), opts,
                            out_dir, false, true)};
  if (name == "fig5_scaling") {
    const std::vector<std::size_t> dflt = {50, 100, 200, 400, 700, 1000};
    std::vector<std::string> paths;
    paths.push_back(scaling_figure(name + "_equidistant", &equidistant_factory, sizes_or(dflt),
                                   opts, out_dir));
    paths.push_back(
        scaling_figure(name + "_chebyshev", &chebyshev_factory, sizes_or(dflt), opts, out_dir));
    return paths;
  }
  throw solver_error(errc::validation, "unknown experiment: " + name);
}

}  // namespace mop
