// Command-line front end: solve one system, run a named experiment, or probe
// backward errors / conditioning.  Exit codes are typed so scripts can tell
// data problems from numerical failures:
//   2  bad input or a degenerate system
//   3  recurrence breakdown (a vanishing coupling)
//   4  elimination or chase pivot failure
//   5  root iteration failed to converge or roots collided

#include <cstdint>
#include <iostream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include <mop/mop.hpp>

namespace {

struct Config {
  std::string family = "kravchuk";
  std::string input;
  std::size_t size = 0;
  std::string p1 = "2/5";
  std::string p2 = "1/2";
  bool binomial = false;
  std::string beta1 = "1";
  std::string beta2 = "3/2";
  std::string gamma = "1";
  std::uint64_t seed = 1;
  std::string algorithm = "core";
  std::string precision = "double";
  std::string out;
};

int exit_code_for(mop::errc kind) {
  switch (kind) {
    case mop::errc::breakdown: return 3;
    case mop::errc::lu_breakdown:
    case mop::errc::chase_pivot: return 4;
    case mop::errc::non_convergence:
    case mop::errc::root_collision: return 5;
    default: return 2;  // validation, degenerate, division_by_zero
  }
}

// Family parameters are parsed as exact rationals ("2/5", "0.4", "1.5e0" all
// work) and converted into the requested kind, so every precision sees the
// same problem.
template <class S>
S param(const std::string& text) {
  return mop::scalar_convert<S>(mop::Rational(text));
}

template <class S>
mop::DiscreteSystem<S> build_system(const Config& c) {
  if (!c.input.empty()) return mop::system_from_json<S>(mop::read_json_file(c.input));
  if (c.size < 3)
    throw mop::solver_error(mop::errc::validation, "--size must be at least 3");
  if (c.family == "kravchuk")
    return mop::make_kravchuk_system<S>(c.size, param<S>(c.p1), param<S>(c.p2), c.binomial);
  if (c.family == "hahn")
    return mop::make_hahn_system<S>(c.size, param<S>(c.beta1), param<S>(c.beta2),
                                    param<S>(c.gamma));
  if (c.family == "equidistant") return mop::make_equidistant_system<S>(c.size, c.seed);
  if (c.family == "chebyshev") return mop::make_chebyshev_system<S>(c.size, c.seed);
  throw mop::solver_error(mop::errc::validation, "unknown family: " + c.family);
}

void emit(const mop::json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    mop::write_json_file(out, j);
}

template <class F>
int dispatch_precision(const std::string& p, F&& f) {
  if (p == "double") return f(std::type_identity<double>{});
  if (p == "extended") return f(std::type_identity<mop::DoubleDouble>{});
  if (p == "rational") return f(std::type_identity<mop::Rational>{});
  throw mop::solver_error(mop::errc::validation, "unknown precision: " + p);
}

template <class S>
int do_solve(const Config& c) {
  const auto sys = build_system<S>(c);
  const auto r = mop::run_algorithm(mop::algorithm_from_name(c.algorithm), sys);
  emit(mop::json{{"algorithm", c.algorithm},
                 {"precision", c.precision},
                 {"size", sys.size()},
                 {"h", mop::band_to_json(r.h)}},
       c.out);
  return 0;
}

template <class S>
int do_backward(const Config& c) {
  const auto sys = build_system<S>(c);
  const auto r = mop::run_algorithm(mop::algorithm_from_name(c.algorithm), sys);
  const mop::BackwardReport rep = mop::backward_errors(sys, r.h);
  emit(mop::json{{"algorithm", c.algorithm},
                 {"precision", c.precision},
                 {"size", sys.size()},
                 {"nodes", rep.nodes},
                 {"weights1", rep.weights1},
                 {"weights2", rep.weights2}},
       c.out);
  return 0;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  auto to_num = [](const std::string& t) -> std::size_t {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(t, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != t.size() || v == 0)
      throw mop::solver_error(mop::errc::validation, "bad size '" + t + "'");
    return v;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == sep) {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    return parts;
  };
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2 && parts.size() != 3)
      throw mop::solver_error(mop::errc::validation, "size ranges are lo:hi or lo:hi:step");
    const std::size_t lo = to_num(parts[0]);
    const std::size_t hi = to_num(parts[1]);
    const std::size_t step = parts.size() == 3 ? to_num(parts[2]) : 1;
    if (hi < lo)
      throw mop::solver_error(mop::errc::validation, "size range is empty");
    for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
    return out;
  }
  for (const auto& p : split(text, ',')) out.push_back(to_num(p));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banded recurrence matrices of multiple orthogonal polynomials "
               "from discrete data"};
  app.require_subcommand(1);

  Config cfg;
  auto add_system_options = [&cfg](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "kravchuk | hahn | equidistant | chebyshev");
    sub->add_option("--input", cfg.input, "read the system from a JSON file instead");
    sub->add_option("--size", cfg.size, "number of support points");
    sub->add_option("--p1", cfg.p1, "first success probability (kravchuk)");
    sub->add_option("--p2", cfg.p2, "second success probability (kravchuk)");
    sub->add_flag("--binomial", cfg.binomial, "keep the binomial factor in the weights");
    sub->add_option("--beta1", cfg.beta1, "first exponent (hahn)");
    sub->add_option("--beta2", cfg.beta2, "second exponent (hahn)");
    sub->add_option("--gamma", cfg.gamma, "shared exponent (hahn)");
    sub->add_option("--seed", cfg.seed, "weight stream seed (synthetic families)");
  };
  auto add_solver_options = [&cfg](CLI::App* sub) {
    sub->add_option("--algorithm", cfg.algorithm,
                    "kryl | krylreorth_partial | krylreorth_full | core | oracle");
    sub->add_option("--precision", cfg.precision, "double | extended | rational");
    sub->add_option("--out", cfg.out, "write JSON here instead of stdout");
  };

  CLI::App* solve = app.add_subcommand("solve", "compute the recurrence band of one system");
  add_system_options(solve);
  add_solver_options(solve);

  CLI::App* backward =
      app.add_subcommand("backward", "recover nodes and weights from a computed band");
  add_system_options(backward);
  add_solver_options(backward);

  CLI::App* condition =
      app.add_subcommand("condition", "probe sensitivity to data perturbations");
  add_system_options(condition);
  int trials = 5;
  double eps = 0x1p-52;
  condition->add_option("--trials", trials, "number of random perturbations");
  condition->add_option("--eps", eps, "relative perturbation magnitude");
  condition->add_option("--out", cfg.out, "write JSON here instead of stdout");

  CLI::App* experiment = app.add_subcommand("experiment", "run a named experiment to CSV");
  std::string exp_name, sizes_text, out_dir = "experiments";
  bool timings = false;
  int threads = 0;
  experiment->add_option("name", exp_name, "one of the named experiments")->required();
  experiment->add_option("--sizes", sizes_text, "lo:hi[:step] or a comma list");
  experiment->add_option("--out-dir", out_dir, "directory for the CSV files");
  experiment->add_flag("--timings", timings, "add wall-clock seconds per cell");
  experiment->add_option("--threads", threads, "worker threads (default: MOP_THREADS or 1)");
  experiment->add_option("--trials", trials, "conditioning trials per size");
  experiment->add_option("--seed", cfg.seed, "weight stream seed (synthetic families)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(solve))
      return dispatch_precision(cfg.precision, [&](auto tag) {
        return do_solve<typename decltype(tag)::type>(cfg);
      });
    if (app.got_subcommand(backward))
      return dispatch_precision(cfg.precision, [&](auto tag) {
        return do_backward<typename decltype(tag)::type>(cfg);
      });
    if (app.got_subcommand(condition)) {
      const auto sys = build_system<double>(cfg);
      const double c = mop::conditioning_estimate(sys, eps, trials);
      emit(mop::json{{"size", sys.size()}, {"eps", eps}, {"trials", trials}, {"conditioning", c}},
           cfg.out);
      return 0;
    }
    // experiment
    mop::ExperimentOptions opts;
    opts.sizes = parse_sizes(sizes_text);
    opts.seed = cfg.seed;
    opts.timings = timings;
    if (threads > 0) opts.threads = threads;
    opts.cond_trials = trials;
    for (const auto& path : mop::run_experiment(exp_name, opts, out_dir))
      std::cout << path << '\n';
    return 0;
  } catch (const mop::solver_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
